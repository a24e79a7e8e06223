//! Hand-crafted per-domain features for the random-forest detector.
//!
//! Ten features per domain: length, character entropy, vowel/consonant
//! ratio, n-gram co-occurrence hit fractions and normality scores for
//! n = 3, 4, 5 (tables built from a benign corpus), and the ratio of
//! positions covered by dictionary words.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;

use crate::corpus::{Corpus, DomainName};
use crate::error::{Error, Result};

/// Names of the ten features, in vector order.
pub const FEATURE_NAMES: [&str; 10] = [
    "length",
    "entropy",
    "vowel_consonant_ratio",
    "cooc3",
    "cooc4",
    "cooc5",
    "norm3",
    "norm4",
    "norm5",
    "meaningful_ratio",
];

const VOWELS: [char; 5] = ['a', 'e', 'i', 'o', 'u'];

/// Counts of overlapping n-grams across a corpus.
#[derive(Debug, Clone)]
pub struct NgramTable {
    pub n: usize,
    counts: BTreeMap<String, u64>,
    total: u64,
}

impl NgramTable {
    pub fn count(&self, gram: &str) -> u64 {
        self.counts.get(gram).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    /// "ngram,count" CSV, keys sorted.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("ngram,count\n");
        for (gram, count) in &self.counts {
            out.push_str(gram);
            out.push(',');
            out.push_str(&count.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut counts = BTreeMap::new();
        let mut total = 0u64;
        let mut n = 0usize;
        for (i, line) in text.lines().enumerate() {
            if i == 0 && line.starts_with("ngram") {
                continue;
            }
            let (gram, count) = line
                .split_once(',')
                .ok_or_else(|| Error::Format(format!("bad ngram row: {line:?}")))?;
            let count: u64 = count
                .trim()
                .parse()
                .map_err(|_| Error::Format(format!("bad ngram count: {line:?}")))?;
            if n == 0 {
                n = gram.len();
            } else if gram.len() != n {
                return Err(Error::Format(format!("mixed n-gram lengths near {line:?}")));
            }
            total += count;
            counts.insert(gram.to_string(), count);
        }
        if n == 0 {
            return Err(Error::Format("empty ngram table".into()));
        }
        Ok(NgramTable { n, counts, total })
    }
}

/// Count every overlapping window of length `n` across the corpus. Domains
/// shorter than `n` contribute nothing.
pub fn build_ngram_table(corpus: &Corpus, n: usize) -> NgramTable {
    debug_assert!((3..=5).contains(&n));
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut total = 0u64;
    for d in &corpus.entries {
        let bytes = d.as_str().as_bytes();
        if bytes.len() < n {
            continue;
        }
        for w in bytes.windows(n) {
            let gram = std::str::from_utf8(w).expect("domains are ascii");
            *counts.entry(gram.to_string()).or_insert(0) += 1;
            total += 1;
        }
    }
    NgramTable { n, counts, total }
}

/// Set of lowercase English words, length >= 3, a-z only.
#[derive(Debug, Clone)]
pub struct WordList {
    set: HashSet<String>,
    ordered: Vec<String>,
}

/// The bundled word list: common English words in frequency-rank order,
/// restricted to valid dictionary spellings.
pub const BUNDLED_WORDS: &str = include_str!("../data/words.txt");

impl WordList {
    /// Build from raw text, one word per line. Words shorter than 3
    /// characters or containing anything outside a-z are dropped.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut set = HashSet::new();
        let mut ordered = Vec::new();
        for line in text.lines() {
            let w = line.trim().to_ascii_lowercase();
            if w.len() >= 3 && w.bytes().all(|b| b.is_ascii_lowercase()) && set.insert(w.clone()) {
                ordered.push(w);
            }
        }
        if ordered.is_empty() {
            return Err(Error::EmptyInput("word list has no usable words".into()));
        }
        Ok(WordList { set, ordered })
    }

    pub fn bundled() -> Self {
        WordList::from_text(BUNDLED_WORDS).expect("bundled word list is valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        WordList::from_text(&text)
    }

    pub fn contains(&self, w: &str) -> bool {
        self.set.contains(w)
    }

    pub fn len(&self) -> usize {
        self.ordered.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordered.is_empty()
    }

    /// Words in their stable file order (frequency rank for the bundled
    /// list); used by the dictionary-concatenation generator.
    pub fn ordered(&self) -> &[String] {
        &self.ordered
    }
}

/// The ten features for one domain, in declared order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub length: f64,
    pub entropy: f64,
    pub vowel_consonant_ratio: f64,
    pub cooc3: f64,
    pub cooc4: f64,
    pub cooc5: f64,
    pub norm3: f64,
    pub norm4: f64,
    pub norm5: f64,
    pub meaningful_ratio: f64,
}

impl FeatureVector {
    pub fn as_array(&self) -> [f64; 10] {
        [
            self.length,
            self.entropy,
            self.vowel_consonant_ratio,
            self.cooc3,
            self.cooc4,
            self.cooc5,
            self.norm3,
            self.norm4,
            self.norm5,
            self.meaningful_ratio,
        ]
    }
}

/// Shannon entropy (bits) of the empirical character distribution.
pub fn entropy(d: &DomainName) -> f64 {
    let mut counts = [0usize; 256];
    let bytes = d.as_str().as_bytes();
    for &b in bytes {
        counts[b as usize] += 1;
    }
    let n = bytes.len() as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

/// Vowels divided by consonants (floor 1 in the denominator); digits and
/// hyphen count as neither.
pub fn vowel_consonant_ratio(d: &DomainName) -> f64 {
    let mut vowels = 0usize;
    let mut consonants = 0usize;
    for c in d.as_str().chars() {
        if VOWELS.contains(&c) {
            vowels += 1;
        } else if c.is_ascii_lowercase() {
            consonants += 1;
        }
    }
    vowels as f64 / consonants.max(1) as f64
}

/// Fraction of the domain's n-gram windows present in the table; 0 when the
/// domain is shorter than n.
pub fn cooccurrence_fraction(d: &DomainName, table: &NgramTable) -> f64 {
    let bytes = d.as_str().as_bytes();
    if bytes.len() < table.n {
        return 0.0;
    }
    let mut hits = 0usize;
    let mut windows = 0usize;
    for w in bytes.windows(table.n) {
        windows += 1;
        if table.count(std::str::from_utf8(w).unwrap()) > 0 {
            hits += 1;
        }
    }
    hits as f64 / windows.max(1) as f64
}

/// Mean over the domain's n-gram windows of ln(1 + table count); 0 when the
/// domain has no windows.
pub fn normality_score(d: &DomainName, table: &NgramTable) -> f64 {
    let bytes = d.as_str().as_bytes();
    if bytes.len() < table.n {
        return 0.0;
    }
    let mut sum = 0.0;
    let mut windows = 0usize;
    for w in bytes.windows(table.n) {
        windows += 1;
        sum += (1.0 + table.count(std::str::from_utf8(w).unwrap()) as f64).ln();
    }
    sum / windows as f64
}

/// Fraction of positions covered by at least one word-list substring of
/// length >= 3.
pub fn meaningful_ratio(d: &DomainName, words: &WordList) -> f64 {
    let s = d.as_str();
    let n = s.len();
    let mut covered = vec![false; n];
    for i in 0..n {
        for j in (i + 3)..=n {
            if words.contains(&s[i..j]) {
                covered[i..j].iter_mut().for_each(|c| *c = true);
            }
        }
    }
    covered.iter().filter(|&&c| c).count() as f64 / n as f64
}

/// Tables for n = 3, 4, 5 built from one benign corpus.
#[derive(Debug, Clone)]
pub struct NgramTables {
    pub t3: NgramTable,
    pub t4: NgramTable,
    pub t5: NgramTable,
}

impl NgramTables {
    pub fn build(benign: &Corpus) -> Self {
        NgramTables {
            t3: build_ngram_table(benign, 3),
            t4: build_ngram_table(benign, 4),
            t5: build_ngram_table(benign, 5),
        }
    }
}

/// Compute all ten features for one domain.
pub fn featurize(d: &DomainName, tables: &NgramTables, words: &WordList) -> FeatureVector {
    FeatureVector {
        length: d.len() as f64,
        entropy: entropy(d),
        vowel_consonant_ratio: vowel_consonant_ratio(d),
        cooc3: cooccurrence_fraction(d, &tables.t3),
        cooc4: cooccurrence_fraction(d, &tables.t4),
        cooc5: cooccurrence_fraction(d, &tables.t5),
        norm3: normality_score(d, &tables.t3),
        norm4: normality_score(d, &tables.t4),
        norm5: normality_score(d, &tables.t5),
        meaningful_ratio: meaningful_ratio(d, words),
    }
}

/// Featurize a whole slice of domains.
pub fn featurize_all(
    domains: &[DomainName],
    tables: &NgramTables,
    words: &WordList,
) -> Vec<FeatureVector> {
    domains.iter().map(|d| featurize(d, tables, words)).collect()
}
