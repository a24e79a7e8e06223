//! Seeded generators for classic DGA families.
//!
//! These are statistical mimics parameterized by [`DgaProfile`], not
//! reimplementations of malware binaries: each profile reproduces a family's
//! charset, length law, and structural rule (uniform draws, LCG arithmetic,
//! dictionary concatenation, vowel/consonant alternation) so the generated
//! populations have the right distributional character. All randomness flows
//! from the profile seed through SplitMix64 substreams, one per domain, so
//! output is byte-identical across runs and platforms.

use std::collections::BTreeMap;

use crate::corpus::{CharVocab, DomainName, MAX_DOMAIN_LEN};
use crate::error::{Error, Result};
use crate::features::WordList;
use crate::rng::SplitMix64;

const VOWELS: [char; 5] = ['a', 'e', 'i', 'o', 'u'];

/// How a family draws its domain length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LengthDist {
    Uniform,
    Fixed,
}

/// The structural generation rule of a family.
#[derive(Debug, Clone, PartialEq)]
pub enum GenerationRule {
    /// Independent uniform draws from the charset.
    UniformChar,
    /// Multiplicative congruential stream; each character is
    /// `charset[(state / divisor) % |charset|]`.
    ArithmeticLcg {
        multiplier: u64,
        divisor: u64,
        modulus: u64,
    },
    /// Concatenation of `word_count` pseudorandomly chosen dictionary words.
    DictionaryConcat { word_count: usize },
    /// Strictly alternating vowel/consonant classes, random starting class.
    VowelConsonantAlternating,
}

impl GenerationRule {
    pub fn name(&self) -> &'static str {
        match self {
            GenerationRule::UniformChar => "uniform-char",
            GenerationRule::ArithmeticLcg { .. } => "arithmetic-lcg",
            GenerationRule::DictionaryConcat { .. } => "dictionary-concat",
            GenerationRule::VowelConsonantAlternating => "vowel-consonant-alternating",
        }
    }
}

/// Per-family parameterization driving a generator.
#[derive(Debug, Clone, PartialEq)]
pub struct DgaProfile {
    pub family: String,
    pub charset: Vec<char>,
    pub min_len: usize,
    pub max_len: usize,
    pub length_dist: LengthDist,
    pub rule: GenerationRule,
    /// Suffixes the family historically registered under; metadata only,
    /// never part of the modeled label.
    pub tld_pool: Vec<String>,
    pub seed: u64,
}

impl DgaProfile {
    pub fn validate(&self) -> Result<()> {
        let vocab = CharVocab::new();
        if self.charset.is_empty() {
            return Err(Error::Profile(format!("{}: empty charset", self.family)));
        }
        if let Some(&bad) = self.charset.iter().find(|&&c| !vocab.contains(c)) {
            return Err(Error::Profile(format!(
                "{}: {bad:?} is not a domain character",
                self.family
            )));
        }
        if self.min_len < 4 {
            return Err(Error::Profile(format!("{}: min_len < 4", self.family)));
        }
        if self.max_len > MAX_DOMAIN_LEN || self.min_len > self.max_len {
            return Err(Error::Profile(format!(
                "{}: bad length range {}..{}",
                self.family, self.min_len, self.max_len
            )));
        }
        if self.length_dist == LengthDist::Fixed && self.min_len != self.max_len {
            return Err(Error::Profile(format!(
                "{}: fixed length needs min_len == max_len",
                self.family
            )));
        }
        match &self.rule {
            GenerationRule::ArithmeticLcg {
                multiplier,
                divisor,
                modulus,
            } => {
                if *multiplier == 0 || *modulus == 0 || *divisor == 0 {
                    return Err(Error::Profile(format!(
                        "{}: arithmetic rule needs nonzero multiplier/divisor/modulus",
                        self.family
                    )));
                }
            }
            GenerationRule::DictionaryConcat { word_count } => {
                if *word_count == 0 {
                    return Err(Error::Profile(format!(
                        "{}: word_count must be positive",
                        self.family
                    )));
                }
            }
            GenerationRule::VowelConsonantAlternating => {
                let has_vowel = self.charset.iter().any(|c| VOWELS.contains(c));
                let has_consonant = self
                    .charset
                    .iter()
                    .any(|c| c.is_ascii_lowercase() && !VOWELS.contains(c));
                if !has_vowel || !has_consonant {
                    return Err(Error::Profile(format!(
                        "{}: alternating rule needs vowels and consonants in the charset",
                        self.family
                    )));
                }
            }
            GenerationRule::UniformChar => {}
        }
        Ok(())
    }
}

/// A family name with its generated domains.
#[derive(Debug, Clone)]
pub struct FamilySample {
    pub family: String,
    pub domains: Vec<DomainName>,
}

fn draw_length(profile: &DgaProfile, rng: &mut SplitMix64) -> usize {
    match profile.length_dist {
        LengthDist::Fixed => profile.min_len,
        LengthDist::Uniform => {
            rng.next_range(profile.min_len as u64, profile.max_len as u64) as usize
        }
    }
}

fn generate_one(profile: &DgaProfile, rng: &mut SplitMix64, dictionary: &[String]) -> DomainName {
    let charset = &profile.charset;
    let label = match &profile.rule {
        GenerationRule::UniformChar => {
            let len = draw_length(profile, rng);
            (0..len)
                .map(|_| charset[rng.next_below(charset.len() as u64) as usize])
                .collect::<String>()
        }
        GenerationRule::ArithmeticLcg {
            multiplier,
            divisor,
            modulus,
        } => {
            let len = draw_length(profile, rng);
            let mut state = rng.next_u64() % modulus;
            if state == 0 {
                state = 1;
            }
            let mut s = String::with_capacity(len);
            for _ in 0..len {
                state = state.wrapping_mul(*multiplier) % modulus;
                let idx = (state / divisor) % charset.len() as u64;
                s.push(charset[idx as usize]);
            }
            s
        }
        GenerationRule::DictionaryConcat { word_count } => {
            // rejection-sample word tuples until the concatenation fits
            loop {
                let mut s = String::new();
                for _ in 0..*word_count {
                    let w = &dictionary[rng.next_below(dictionary.len() as u64) as usize];
                    s.push_str(w);
                }
                if (profile.min_len..=profile.max_len).contains(&s.len()) {
                    break s;
                }
            }
        }
        GenerationRule::VowelConsonantAlternating => {
            let len = draw_length(profile, rng);
            let vowels: Vec<char> = charset.iter().copied().filter(|c| VOWELS.contains(c)).collect();
            let consonants: Vec<char> = charset
                .iter()
                .copied()
                .filter(|c| c.is_ascii_lowercase() && !VOWELS.contains(c))
                .collect();
            let mut use_vowel = rng.next_below(2) == 1;
            let mut s = String::with_capacity(len);
            for _ in 0..len {
                let class = if use_vowel { &vowels } else { &consonants };
                s.push(class[rng.next_below(class.len() as u64) as usize]);
                use_vowel = !use_vowel;
            }
            s
        }
    };
    DomainName::new(label).expect("profile invariants keep labels valid")
}

/// Generate `count` domains with an explicit dictionary (used by the
/// dictionary-concat rule; ignored by the others).
pub fn generate_family_with(
    profile: &DgaProfile,
    count: usize,
    dictionary: &[String],
) -> Result<FamilySample> {
    profile.validate()?;
    if let GenerationRule::DictionaryConcat { word_count } = &profile.rule {
        if dictionary.is_empty() {
            return Err(Error::Profile(format!(
                "{}: dictionary rule needs a nonempty dictionary",
                profile.family
            )));
        }
        // a tuple must be able to fit in the length window
        let shortest = dictionary.iter().map(|w| w.len()).min().unwrap();
        if shortest * word_count > profile.max_len {
            return Err(Error::Profile(format!(
                "{}: no {word_count}-word concatenation fits in max_len {}",
                profile.family, profile.max_len
            )));
        }
    }
    let domains = (0..count)
        .map(|i| {
            let mut rng = SplitMix64::derive(profile.seed, i as u64);
            generate_one(profile, &mut rng, dictionary)
        })
        .collect();
    Ok(FamilySample {
        family: profile.family.clone(),
        domains,
    })
}

/// Generate `count` domains; dictionary rules use the bundled word list
/// restricted to words of 3..=10 characters.
pub fn generate_family(profile: &DgaProfile, count: usize) -> Result<FamilySample> {
    let dictionary = concat_dictionary(&WordList::bundled());
    generate_family_with(profile, count, &dictionary)
}

/// Words usable for concatenation rules: 3..=10 characters, stable order.
pub fn concat_dictionary(words: &WordList) -> Vec<String> {
    words
        .ordered()
        .iter()
        .filter(|w| w.len() <= 10)
        .cloned()
        .collect()
}

fn letters() -> Vec<char> {
    ('a'..='z').collect()
}

fn letters_and_digits() -> Vec<char> {
    ('a'..='z').chain('0'..='9').collect()
}

/// The twelve built-in family profiles: the ten comparison families plus the
/// dictionary-based and alternating exemplars. Length ranges and charsets are
/// calibrated to published sample domains.
pub fn builtin_profiles() -> Vec<DgaProfile> {
    let p = |family: &str,
             charset: Vec<char>,
             min_len: usize,
             max_len: usize,
             length_dist: LengthDist,
             rule: GenerationRule,
             tld_pool: &[&str],
             seed: u64| DgaProfile {
        family: family.to_string(),
        charset,
        min_len,
        max_len,
        length_dist,
        rule,
        tld_pool: tld_pool.iter().map(|s| s.to_string()).collect(),
        seed,
    };
    let lcg = |divisor: u64| GenerationRule::ArithmeticLcg {
        multiplier: 48271,
        divisor,
        modulus: 2147483647,
    };
    vec![
        p("corebot", letters_and_digits(), 16, 19, LengthDist::Uniform, GenerationRule::UniformChar, &["ddns.net"], 101),
        p("cryptolocker", letters(), 13, 15, LengthDist::Uniform, lcg(7), &["ru", "org", "com"], 102),
        p("dircrypt", letters(), 12, 18, LengthDist::Uniform, lcg(11), &["co.uk", "com"], 103),
        p("kraken_v2", letters(), 8, 11, LengthDist::Uniform, GenerationRule::UniformChar, &["com", "cc", "net"], 104),
        p("lockyv2", letters(), 8, 15, LengthDist::Uniform, GenerationRule::UniformChar, &["info", "click", "biz"], 105),
        p("pykspa", letters(), 6, 9, LengthDist::Uniform, GenerationRule::UniformChar, &["net", "org"], 106),
        p("qakbot", letters(), 9, 18, LengthDist::Uniform, lcg(13), &["info", "biz", "com"], 107),
        p("ramdo", letters(), 16, 16, LengthDist::Fixed, lcg(17), &["org"], 108),
        p("ramnit", letters(), 9, 15, LengthDist::Uniform, lcg(100), &["com"], 109),
        p("simda", letters(), 10, 10, LengthDist::Fixed, GenerationRule::VowelConsonantAlternating, &["com"], 110),
        p("suppobox", letters(), 6, 20, LengthDist::Uniform, GenerationRule::DictionaryConcat { word_count: 2 }, &["net", "com"], 111),
        p("symmi", letters(), 8, 14, LengthDist::Uniform, GenerationRule::VowelConsonantAlternating, &["ddns.net"], 112),
    ]
}

/// Look up a built-in profile by family name.
pub fn builtin_profile(family: &str) -> Result<DgaProfile> {
    builtin_profiles()
        .into_iter()
        .find(|p| p.family == family)
        .ok_or_else(|| Error::Profile(format!("unknown family {family:?}")))
}

/// Empirical per-character distribution over the 37 non-PAD vocabulary
/// symbols, in vocabulary index order.
pub fn unigram_distribution(domains: &[DomainName]) -> Result<Vec<f64>> {
    if domains.is_empty() {
        return Err(Error::EmptyInput("no domains for unigram distribution".into()));
    }
    let vocab = CharVocab::new();
    let mut counts = vec![0u64; vocab.len() - 1];
    let mut total = 0u64;
    for d in domains {
        for c in d.as_str().chars() {
            let idx = vocab.index_of(c).expect("DomainName invariant") as usize;
            counts[idx - 1] += 1;
            total += 1;
        }
    }
    Ok(counts.iter().map(|&c| c as f64 / total as f64).collect())
}

// ---------------------------------------------------------------------------
// profile text config
// ---------------------------------------------------------------------------

/// Serialize profiles as stanzas of `key=value` lines separated by blank
/// lines.
pub fn profiles_to_text(profiles: &[DgaProfile]) -> String {
    let mut out = String::new();
    for (i, p) in profiles.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&format!("family={}\n", p.family));
        out.push_str(&format!("charset={}\n", p.charset.iter().collect::<String>()));
        out.push_str(&format!("min_len={}\n", p.min_len));
        out.push_str(&format!("max_len={}\n", p.max_len));
        out.push_str(&format!(
            "length_dist={}\n",
            match p.length_dist {
                LengthDist::Uniform => "uniform",
                LengthDist::Fixed => "fixed",
            }
        ));
        out.push_str(&format!("rule={}\n", p.rule.name()));
        match &p.rule {
            GenerationRule::ArithmeticLcg {
                multiplier,
                divisor,
                modulus,
            } => {
                out.push_str(&format!("multiplier={multiplier}\n"));
                out.push_str(&format!("divisor={divisor}\n"));
                out.push_str(&format!("modulus={modulus}\n"));
            }
            GenerationRule::DictionaryConcat { word_count } => {
                out.push_str(&format!("word_count={word_count}\n"));
            }
            _ => {}
        }
        out.push_str(&format!("tld_pool={}\n", p.tld_pool.join(",")));
        out.push_str(&format!("seed={}\n", p.seed));
    }
    out
}

/// Parse the stanza config form written by [`profiles_to_text`].
pub fn profiles_from_text(text: &str) -> Result<Vec<DgaProfile>> {
    let mut profiles = Vec::new();
    for stanza in text.split("\n\n") {
        let mut kv: BTreeMap<&str, &str> = BTreeMap::new();
        for line in stanza.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("bad profile line: {line:?}")))?;
            kv.insert(k.trim(), v.trim());
        }
        if kv.is_empty() {
            continue;
        }
        let get = |k: &str| -> Result<&str> {
            kv.get(k)
                .copied()
                .ok_or_else(|| Error::Format(format!("profile missing key {k:?}")))
        };
        let parse_u64 = |k: &str| -> Result<u64> {
            get(k)?
                .parse()
                .map_err(|_| Error::Format(format!("bad integer for {k:?}")))
        };
        let rule = match get("rule")? {
            "uniform-char" => GenerationRule::UniformChar,
            "arithmetic-lcg" => GenerationRule::ArithmeticLcg {
                multiplier: parse_u64("multiplier")?,
                divisor: parse_u64("divisor")?,
                modulus: parse_u64("modulus")?,
            },
            "dictionary-concat" => GenerationRule::DictionaryConcat {
                word_count: parse_u64("word_count")? as usize,
            },
            "vowel-consonant-alternating" => GenerationRule::VowelConsonantAlternating,
            other => return Err(Error::Format(format!("unknown rule {other:?}"))),
        };
        let profile = DgaProfile {
            family: get("family")?.to_string(),
            charset: get("charset")?.chars().collect(),
            min_len: parse_u64("min_len")? as usize,
            max_len: parse_u64("max_len")? as usize,
            length_dist: match get("length_dist")? {
                "uniform" => LengthDist::Uniform,
                "fixed" => LengthDist::Fixed,
                other => return Err(Error::Format(format!("unknown length_dist {other:?}"))),
            },
            rule,
            tld_pool: get("tld_pool")?
                .split(',')
                .filter(|s| !s.is_empty())
                .map(|s| s.to_string())
                .collect(),
            seed: parse_u64("seed")?,
        };
        profile.validate()?;
        profiles.push(profile);
    }
    if profiles.is_empty() {
        return Err(Error::Format("no profiles in config".into()));
    }
    Ok(profiles)
}
