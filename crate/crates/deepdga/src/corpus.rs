//! Domain-name corpora: normalization, the character vocabulary, and the
//! fixed-length index encoding shared by every model in the crate.
//!
//! A domain here is always the registered label with the public suffix
//! removed ("google.com" becomes "google"), lowercased, restricted to the
//! 37 valid label characters, and capped at [`MAX_DOMAIN_LEN`].

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Maximum modeled label length. 63 is the DNS label limit, so every legal
/// label fits without truncation.
pub const MAX_DOMAIN_LEN: usize = 63;

/// Vocabulary size: PAD plus the 37 valid label characters.
pub const VOCAB_SIZE: usize = 38;

/// Index of the PAD symbol.
pub const PAD: u8 = 0;

/// The character vocabulary: PAD at index 0, then a-z, 0-9, and hyphen.
///
/// Indices are contiguous and the layout is fixed, so encoded corpora and
/// serialized weights stay compatible across runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharVocab {
    symbols: Vec<char>,
    // dense map over the u8 range; 0xFF marks characters outside the vocabulary
    index_of: [u8; 256],
}

impl CharVocab {
    pub fn new() -> Self {
        let mut symbols = vec!['\0']; // PAD placeholder at index 0
        symbols.extend('a'..='z');
        symbols.extend('0'..='9');
        symbols.push('-');
        debug_assert_eq!(symbols.len(), VOCAB_SIZE);
        let mut index_of = [0xFFu8; 256];
        for (i, &c) in symbols.iter().enumerate().skip(1) {
            index_of[c as usize] = i as u8;
        }
        CharVocab { symbols, index_of }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of a character, or None if it is not a valid label character.
    pub fn index_of(&self, c: char) -> Option<u8> {
        if (c as u32) < 256 {
            let i = self.index_of[c as usize];
            (i != 0xFF).then_some(i)
        } else {
            None
        }
    }

    /// Character at a non-PAD index.
    pub fn symbol(&self, index: u8) -> char {
        debug_assert!(index != PAD && (index as usize) < VOCAB_SIZE);
        self.symbols[index as usize]
    }

    pub fn contains(&self, c: char) -> bool {
        self.index_of(c).is_some()
    }

    /// The 37 non-PAD characters in index order.
    pub fn characters(&self) -> &[char] {
        &self.symbols[1..]
    }
}

impl Default for CharVocab {
    fn default() -> Self {
        CharVocab::new()
    }
}

/// A normalized domain label: lowercase, no dots, vocabulary characters only,
/// length 1..=MAX_DOMAIN_LEN.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DomainName(String);

impl DomainName {
    /// Validating constructor.
    pub fn new(label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        if label.is_empty() || label.len() > MAX_DOMAIN_LEN {
            return Err(Error::Format(format!(
                "label length {} outside 1..={}",
                label.len(),
                MAX_DOMAIN_LEN
            )));
        }
        let vocab = CharVocab::new();
        if let Some(bad) = label.chars().find(|&c| !vocab.contains(c)) {
            return Err(Error::Format(format!("invalid character {bad:?} in label")));
        }
        Ok(DomainName(label))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl std::fmt::Display for DomainName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// A labeled collection of domain names. Duplicates are allowed; real ranking
/// lists repeat roots once suffixes are stripped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub entries: Vec<DomainName>,
    pub source: String,
    pub label: CorpusLabel,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CorpusLabel {
    Benign,
    Family(String),
}

impl Corpus {
    pub fn new(entries: Vec<DomainName>, source: impl Into<String>, label: CorpusLabel) -> Self {
        Corpus {
            entries,
            source: source.into(),
            label,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Fixed-length index encoding of a domain: `MAX-or-configured T` entries,
/// right-padded with PAD.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EncodedDomain {
    pub indices: Vec<u8>,
}

impl EncodedDomain {
    /// Number of leading non-PAD entries.
    pub fn length(&self) -> usize {
        self.indices.iter().position(|&i| i == PAD).unwrap_or(self.indices.len())
    }
}

/// A set of public suffixes with longest-match stripping semantics.
#[derive(Debug, Clone)]
pub struct SuffixList {
    suffixes: HashSet<String>,
}

/// The bundled suffix list (common gTLDs, ccTLDs, second-level registries,
/// dynamic-DNS providers).
pub const BUNDLED_SUFFIXES: &str = include_str!("../data/suffixes.txt");

impl SuffixList {
    pub fn from_text(text: &str) -> Self {
        let suffixes = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.to_ascii_lowercase())
            .collect();
        SuffixList { suffixes }
    }

    pub fn bundled() -> Self {
        SuffixList::from_text(BUNDLED_SUFFIXES)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Ok(SuffixList::from_text(&text))
    }

    pub fn len(&self) -> usize {
        self.suffixes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.suffixes.is_empty()
    }

    /// Longest suffix (by label count, then byte length) that terminates
    /// `host` on a dot boundary or equals it entirely.
    fn longest_match<'a>(&self, host: &'a str) -> Option<&'a str> {
        let mut best: Option<&str> = None;
        // candidate suffixes begin after each dot, and at 0 for whole-host match
        let positions = std::iter::once(0).chain(
            host.char_indices()
                .filter(|&(_, c)| c == '.')
                .map(|(i, _)| i + 1),
        );
        for pos in positions {
            let cand = &host[pos..];
            if self.suffixes.contains(cand) {
                match best {
                    Some(b) if b.len() >= cand.len() => {}
                    _ => best = Some(cand),
                }
            }
        }
        best
    }
}

/// Normalize a raw hostname into a modeled label: lowercase, strip the
/// longest matching public suffix, keep the right-most remaining label, drop
/// characters outside the vocabulary, truncate to the maximum length.
pub fn normalize(raw: &str, suffixes: &SuffixList) -> Result<DomainName> {
    let vocab = CharVocab::new();
    let lower = raw.trim().trim_matches('.').to_ascii_lowercase();
    if lower.is_empty() {
        return Err(Error::EmptyAfterNormalize(raw.to_string()));
    }
    let remainder = match suffixes.longest_match(&lower) {
        Some(suffix) if suffix.len() == lower.len() => {
            return Err(Error::EmptyAfterNormalize(raw.to_string()));
        }
        Some(suffix) => &lower[..lower.len() - suffix.len() - 1], // drop ".suffix"
        None => &lower[..],
    };
    let label = remainder.rsplit('.').find(|s| !s.is_empty()).unwrap_or("");
    let mut cleaned: String = label.chars().filter(|&c| vocab.contains(c)).collect();
    cleaned.truncate(MAX_DOMAIN_LEN);
    if cleaned.is_empty() {
        return Err(Error::EmptyAfterNormalize(raw.to_string()));
    }
    Ok(DomainName(cleaned))
}

/// Input file format for [`load_corpus`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    /// "rank,hostname" per line.
    RankedCsv,
    /// One hostname per line; "#"-prefixed comment lines are ignored.
    Lines,
}

/// Result of loading a corpus file; rows that fail to parse are counted, not
/// fatal.
#[derive(Debug)]
pub struct LoadedCorpus {
    pub corpus: Corpus,
    pub skipped: usize,
}

/// Load and normalize the first `limit` parseable rows of a corpus file.
pub fn load_corpus(
    path: &Path,
    format: CorpusFormat,
    limit: usize,
    suffixes: &SuffixList,
    label: CorpusLabel,
) -> Result<LoadedCorpus> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let mut entries = Vec::new();
    let mut skipped = 0usize;
    for line in text.lines() {
        if entries.len() >= limit {
            break;
        }
        let line = line.trim();
        if format == CorpusFormat::Lines && line.starts_with('#') {
            continue;
        }
        let host = match format {
            CorpusFormat::RankedCsv => match line.split_once(',') {
                Some((rank, host)) if rank.trim().parse::<u64>().is_ok() => host.trim(),
                _ => {
                    skipped += 1;
                    continue;
                }
            },
            CorpusFormat::Lines => line,
        };
        match normalize(host, suffixes) {
            Ok(d) => entries.push(d),
            Err(_) => skipped += 1,
        }
    }
    if entries.is_empty() {
        return Err(Error::Format(format!(
            "no rows parsed from {} ({} skipped)",
            path.display(),
            skipped
        )));
    }
    Ok(LoadedCorpus {
        corpus: Corpus::new(entries, path.display().to_string(), label),
        skipped,
    })
}

/// Encode a domain into exactly `t` indices, right-padded with PAD.
pub fn encode(d: &DomainName, vocab: &CharVocab, t: usize) -> EncodedDomain {
    debug_assert!(d.len() <= t);
    let mut indices = vec![PAD; t];
    for (i, c) in d.as_str().chars().enumerate() {
        indices[i] = vocab.index_of(c).expect("DomainName invariant");
    }
    EncodedDomain { indices }
}

/// Inverse of [`encode`]: read symbols up to the first PAD.
pub fn decode_indices(e: &EncodedDomain, vocab: &CharVocab) -> Result<DomainName> {
    let label: String = e
        .indices
        .iter()
        .take_while(|&&i| i != PAD)
        .map(|&i| vocab.symbol(i))
        .collect();
    DomainName::new(label)
}

/// Deterministically partition a corpus by fractions: seeded shuffle, then
/// cut with largest-remainder rounding (earlier parts take the extra items).
pub fn split(corpus: &Corpus, fractions: &[f64], seed: u64) -> Result<Vec<Corpus>> {
    if fractions.is_empty()
        || fractions.iter().any(|&f| f < 0.0)
        || (fractions.iter().sum::<f64>() - 1.0).abs() > 1e-9
    {
        return Err(Error::BadFractions(fractions.to_vec()));
    }
    let n = corpus.entries.len();
    let mut order: Vec<usize> = (0..n).collect();
    SplitMix64::derive(seed, 0x5fu64).shuffle(&mut order);

    // largest-remainder apportionment, remainder priority by part order
    let ideal: Vec<f64> = fractions.iter().map(|f| f * n as f64).collect();
    let mut sizes: Vec<usize> = ideal.iter().map(|&x| x.floor() as usize).collect();
    let mut leftover = n - sizes.iter().sum::<usize>();
    let mut by_remainder: Vec<usize> = (0..fractions.len()).collect();
    by_remainder.sort_by(|&a, &b| {
        let ra = ideal[a] - ideal[a].floor();
        let rb = ideal[b] - ideal[b].floor();
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    for &i in &by_remainder {
        if leftover == 0 {
            break;
        }
        sizes[i] += 1;
        leftover -= 1;
    }

    let mut parts = Vec::with_capacity(fractions.len());
    let mut cursor = 0;
    for (k, &size) in sizes.iter().enumerate() {
        let entries: Vec<DomainName> = order[cursor..cursor + size]
            .iter()
            .map(|&i| corpus.entries[i].clone())
            .collect();
        cursor += size;
        parts.push(Corpus::new(
            entries,
            format!("{}#part{}", corpus.source, k),
            corpus.label.clone(),
        ));
    }
    Ok(parts)
}
