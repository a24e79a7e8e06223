//! Experiment protocols: per-family detectability, pooled detection rates,
//! and leave-one-family-out hardening.

use serde::Serialize;

use crate::corpus::{Corpus, DomainName};
use crate::error::{Error, Result};
use crate::features::{featurize, FeatureVector, NgramTables, WordList};
use crate::forest::{predict_proba, train, ForestParams};
use crate::metrics::{auc, kfold, tpr_at_fpr};
use crate::rng::SplitMix64;

/// N-gram tables and word list shared by every featurization in an
/// experiment. Tables come from the benign corpus feeding the experiment.
pub struct FeatureContext {
    pub tables: NgramTables,
    pub words: WordList,
}

impl FeatureContext {
    pub fn build(benign: &Corpus, words: WordList) -> Self {
        FeatureContext {
            tables: NgramTables::build(benign),
            words,
        }
    }
}

pub fn features_matrix(domains: &[DomainName], ctx: &FeatureContext) -> Vec<[f64; 10]> {
    domains
        .iter()
        .map(|d| featurize(d, &ctx.tables, &ctx.words).as_array())
        .collect()
}

pub fn feature_vector(d: &DomainName, ctx: &FeatureContext) -> FeatureVector {
    featurize(d, &ctx.tables, &ctx.words)
}

/// One labeled family sample ready for an experiment.
pub struct LabeledFamily {
    pub name: String,
    pub domains: Vec<DomainName>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyAucRow {
    pub family: String,
    pub mean_auc: f64,
}

/// One forest per family (family vs benign), mean AUC over stratified
/// k-fold cross-validation.
pub fn per_family_auc(
    families: &[LabeledFamily],
    benign: &Corpus,
    ctx: &FeatureContext,
    params: &ForestParams,
    k: usize,
    seed: u64,
) -> Result<Vec<FamilyAucRow>> {
    let benign_x = features_matrix(&benign.entries, ctx);
    let mut rows = Vec::with_capacity(families.len());
    for (fi, family) in families.iter().enumerate() {
        let pos_x = features_matrix(&family.domains, ctx);
        let folds = kfold(pos_x.len(), benign_x.len(), k, SplitMix64::derive(seed, fi as u64).next_u64())?;
        let mut fold_aucs = Vec::with_capacity(k);
        for (fold_i, fold) in folds.iter().enumerate() {
            let mut x: Vec<[f64; 10]> = Vec::new();
            let mut y: Vec<bool> = Vec::new();
            for &i in &fold.train_pos {
                x.push(pos_x[i]);
                y.push(true);
            }
            for &i in &fold.train_neg {
                x.push(benign_x[i]);
                y.push(false);
            }
            let forest = train(&x, &y, params, SplitMix64::derive(seed, (fi * 1000 + fold_i) as u64).next_u64())?;
            let mut scores = Vec::new();
            let mut labels = Vec::new();
            for &i in &fold.test_pos {
                scores.push(predict_proba(&forest, &pos_x[i]));
                labels.push(true);
            }
            for &i in &fold.test_neg {
                scores.push(predict_proba(&forest, &benign_x[i]));
                labels.push(false);
            }
            fold_aucs.push(auc(&scores, &labels)?);
        }
        rows.push(FamilyAucRow {
            family: family.name.clone(),
            mean_auc: fold_aucs.iter().sum::<f64>() / fold_aucs.len() as f64,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct PooledRow {
    pub family: String,
    pub detection_rate: f64,
    pub support: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct PooledReport {
    pub rows: Vec<PooledRow>,
    pub average: f64,
    pub total_support: usize,
}

/// One forest on all families pooled against benign; per-family recall at
/// probability threshold 0.5 on 20% holdouts, averaged over seeded
/// repetitions (the "10 crossvalidation folds with 20% holdout" protocol).
pub fn pooled_detection(
    families: &[LabeledFamily],
    benign: &Corpus,
    ctx: &FeatureContext,
    params: &ForestParams,
    repetitions: usize,
    seed: u64,
) -> Result<PooledReport> {
    if families.is_empty() {
        return Err(Error::EmptyInput("no families".into()));
    }
    let family_x: Vec<Vec<[f64; 10]>> = families
        .iter()
        .map(|f| features_matrix(&f.domains, ctx))
        .collect();
    let benign_x = features_matrix(&benign.entries, ctx);

    let mut rate_sums = vec![0.0; families.len()];
    let mut support_sums = vec![0usize; families.len()];
    for rep in 0..repetitions {
        let mut rng = SplitMix64::derive(seed, 0x907 ^ rep as u64);
        // stratified 80/20 split of every class
        let split = |n: usize, rng: &mut SplitMix64| -> (Vec<usize>, Vec<usize>) {
            let mut idx: Vec<usize> = (0..n).collect();
            rng.shuffle(&mut idx);
            let test_n = (n as f64 * 0.2).round() as usize;
            let test = idx[..test_n].to_vec();
            let train = idx[test_n..].to_vec();
            (train, test)
        };
        let mut x: Vec<[f64; 10]> = Vec::new();
        let mut y: Vec<bool> = Vec::new();
        let mut tests: Vec<Vec<usize>> = Vec::with_capacity(families.len());
        for fx in &family_x {
            let (train_idx, test_idx) = split(fx.len(), &mut rng);
            for i in train_idx {
                x.push(fx[i]);
                y.push(true);
            }
            tests.push(test_idx);
        }
        let (btrain, _btest) = split(benign_x.len(), &mut rng);
        for i in btrain {
            x.push(benign_x[i]);
            y.push(false);
        }
        let forest = train(&x, &y, params, SplitMix64::derive(seed, 0xF025 ^ rep as u64).next_u64())?;
        for (fi, test_idx) in tests.iter().enumerate() {
            let detected = test_idx
                .iter()
                .filter(|&&i| predict_proba(&forest, &family_x[fi][i]) > 0.5)
                .count();
            rate_sums[fi] += detected as f64 / test_idx.len().max(1) as f64;
            support_sums[fi] += test_idx.len();
        }
    }

    let rows: Vec<PooledRow> = families
        .iter()
        .enumerate()
        .map(|(fi, f)| PooledRow {
            family: f.name.clone(),
            detection_rate: rate_sums[fi] / repetitions as f64,
            support: (support_sums[fi] as f64 / repetitions as f64).round() as usize,
        })
        .collect();
    let total_support: usize = rows.iter().map(|r| r.support).sum();
    let average = rows
        .iter()
        .map(|r| r.detection_rate * r.support as f64)
        .sum::<f64>()
        / total_support.max(1) as f64;
    Ok(PooledReport {
        rows,
        average,
        total_support,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct HardenRow {
    pub family: String,
    pub baseline_tpr: f64,
    pub hardened_tpr: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HardenReport {
    pub rows: Vec<HardenRow>,
    pub baseline_average: f64,
    pub hardened_average: f64,
}

/// Leave-one-family-out hardening: for each family, train on the remaining
/// families plus benign-train (baseline) and additionally on the
/// adversarial samples (hardened); report TPR at 1% FPR on the held-out
/// family against the held-out benign slice.
pub fn harden_lofo(
    families: &[LabeledFamily],
    benign_train: &Corpus,
    benign_holdout: &Corpus,
    adversarial: &[DomainName],
    ctx: &FeatureContext,
    params: &ForestParams,
    seed: u64,
) -> Result<HardenReport> {
    if families.len() < 2 {
        return Err(Error::TooFew("hardening needs at least two families".into()));
    }
    let family_x: Vec<Vec<[f64; 10]>> = families
        .iter()
        .map(|f| features_matrix(&f.domains, ctx))
        .collect();
    let btrain_x = features_matrix(&benign_train.entries, ctx);
    let bhold_x = features_matrix(&benign_holdout.entries, ctx);
    let adv_x = features_matrix(adversarial, ctx);

    let mut rows = Vec::with_capacity(families.len());
    for held in 0..families.len() {
        let mut x: Vec<[f64; 10]> = Vec::new();
        let mut y: Vec<bool> = Vec::new();
        for (fi, fx) in family_x.iter().enumerate() {
            if fi == held {
                continue;
            }
            for row in fx {
                x.push(*row);
                y.push(true);
            }
        }
        for row in &btrain_x {
            x.push(*row);
            y.push(false);
        }
        let evaluate = |forest: &crate::forest::Forest| -> Result<f64> {
            let mut scores = Vec::new();
            let mut labels = Vec::new();
            for row in &family_x[held] {
                scores.push(predict_proba(forest, row));
                labels.push(true);
            }
            for row in &bhold_x {
                scores.push(predict_proba(forest, row));
                labels.push(false);
            }
            Ok(tpr_at_fpr(&scores, &labels, 0.01)?.0)
        };

        let baseline = train(&x, &y, params, SplitMix64::derive(seed, held as u64).next_u64())?;
        let baseline_tpr = evaluate(&baseline)?;

        for row in &adv_x {
            x.push(*row);
            y.push(true);
        }
        let hardened = train(&x, &y, params, SplitMix64::derive(seed, 0x4A2d ^ held as u64).next_u64())?;
        let hardened_tpr = evaluate(&hardened)?;

        rows.push(HardenRow {
            family: families[held].name.clone(),
            baseline_tpr,
            hardened_tpr,
        });
    }
    let n = rows.len() as f64;
    let baseline_average = rows.iter().map(|r| r.baseline_tpr).sum::<f64>() / n;
    let hardened_average = rows.iter().map(|r| r.hardened_tpr).sum::<f64>() / n;
    Ok(HardenReport {
        rows,
        baseline_average,
        hardened_average,
    })
}

// ---------------------------------------------------------------------------
// report rendering
// ---------------------------------------------------------------------------

pub fn family_auc_csv(rows: &[FamilyAucRow]) -> String {
    let mut out = String::from("family,mean_auc\n");
    for r in rows {
        out.push_str(&format!("{},{:.6}\n", r.family, r.mean_auc));
    }
    out
}

pub fn pooled_csv(report: &PooledReport) -> String {
    let mut out = String::from("family,detection_rate,support\n");
    for r in &report.rows {
        out.push_str(&format!("{},{:.6},{}\n", r.family, r.detection_rate, r.support));
    }
    out.push_str(&format!(
        "avg/total,{:.6},{}\n",
        report.average, report.total_support
    ));
    out
}

pub fn harden_csv(report: &HardenReport) -> String {
    let mut out = String::from("family,baseline_tpr,hardened_tpr\n");
    for r in &report.rows {
        out.push_str(&format!(
            "{},{:.6},{:.6}\n",
            r.family, r.baseline_tpr, r.hardened_tpr
        ));
    }
    out.push_str(&format!(
        "average,{:.6},{:.6}\n",
        report.baseline_average, report.hardened_average
    ));
    out
}

/// "char,probability" rows for a unigram distribution over the 37 non-PAD
/// vocabulary characters.
pub fn unigram_csv(dist: &[f64]) -> String {
    let vocab = crate::corpus::CharVocab::new();
    let mut out = String::from("char,probability\n");
    for (i, &p) in dist.iter().enumerate() {
        out.push_str(&format!("{},{:.9}\n", vocab.symbol((i + 1) as u8), p));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::CorpusLabel;
    use crate::dga::{builtin_profile, generate_family};

    fn benign_corpus(n: usize) -> Corpus {
        let words = WordList::bundled();
        let mut entries = Vec::with_capacity(n);
        let mut rng = SplitMix64::new(4);
        let pool = words.ordered();
        while entries.len() < n {
            let a = &pool[rng.next_below(pool.len() as u64) as usize];
            let b = &pool[rng.next_below(pool.len() as u64) as usize];
            let label = format!("{a}{b}");
            if label.len() <= 24 {
                entries.push(DomainName::new(label).unwrap());
            }
        }
        Corpus::new(entries, "synthetic-benign", CorpusLabel::Benign)
    }

    fn small_params() -> ForestParams {
        ForestParams {
            n_trees: 20,
            ..ForestParams::default()
        }
    }

    #[test]
    fn per_family_auc_separates_random_from_wordlike() {
        let benign = benign_corpus(200);
        let ctx = FeatureContext::build(&benign, WordList::bundled());
        let ramnit = generate_family(&builtin_profile("ramnit").unwrap(), 200).unwrap();
        let families = vec![LabeledFamily {
            name: ramnit.family,
            domains: ramnit.domains,
        }];
        let rows = per_family_auc(&families, &benign, &ctx, &small_params(), 5, 0).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].mean_auc > 0.95, "auc {}", rows[0].mean_auc);
    }

    #[test]
    fn per_family_auc_self_vs_self_is_chance() {
        // identical distributions on both sides must hover near 0.5; the
        // n-gram tables come from a third slice so neither class is the
        // table-building corpus itself
        let big = benign_corpus(600);
        let table_slice = Corpus::new(big.entries[..200].to_vec(), "t", CorpusLabel::Benign);
        let pos_slice = big.entries[200..400].to_vec();
        let neg_slice = Corpus::new(big.entries[400..].to_vec(), "n", CorpusLabel::Benign);
        let ctx = FeatureContext::build(&table_slice, WordList::bundled());
        let families = vec![LabeledFamily {
            name: "self".into(),
            domains: pos_slice,
        }];
        let rows = per_family_auc(&families, &neg_slice, &ctx, &small_params(), 5, 1).unwrap();
        assert!(
            (rows[0].mean_auc - 0.5).abs() < 0.12,
            "auc {} should be near chance",
            rows[0].mean_auc
        );
    }

    #[test]
    fn pooled_detection_rates_bounded_with_support() {
        let benign = benign_corpus(300);
        let ctx = FeatureContext::build(&benign, WordList::bundled());
        let families: Vec<LabeledFamily> = ["ramnit", "simda"]
            .iter()
            .map(|name| {
                let s = generate_family(&builtin_profile(name).unwrap(), 300).unwrap();
                LabeledFamily {
                    name: s.family,
                    domains: s.domains,
                }
            })
            .collect();
        let report = pooled_detection(&families, &benign, &ctx, &small_params(), 3, 2).unwrap();
        assert_eq!(report.rows.len(), 2);
        for row in &report.rows {
            assert!((0.0..=1.0).contains(&row.detection_rate));
            assert_eq!(row.support, 60);
        }
        assert!((0.0..=1.0).contains(&report.average));
        // random-string families against word-built benign should be caught
        assert!(report.rows.iter().all(|r| r.detection_rate > 0.9));
    }

    #[test]
    fn pooled_detection_deterministic() {
        let benign = benign_corpus(150);
        let ctx = FeatureContext::build(&benign, WordList::bundled());
        let s = generate_family(&builtin_profile("pykspa").unwrap(), 150).unwrap();
        let families = vec![LabeledFamily {
            name: s.family,
            domains: s.domains,
        }];
        let a = pooled_detection(&families, &benign, &ctx, &small_params(), 2, 7).unwrap();
        let b = pooled_detection(&families, &benign, &ctx, &small_params(), 2, 7).unwrap();
        assert_eq!(a.rows[0].detection_rate, b.rows[0].detection_rate);
    }

    #[test]
    fn harden_lofo_shapes_and_bounds() {
        let benign = benign_corpus(400);
        let train_slice = Corpus::new(benign.entries[..200].to_vec(), "t", CorpusLabel::Benign);
        let hold_slice = Corpus::new(benign.entries[200..].to_vec(), "h", CorpusLabel::Benign);
        let ctx = FeatureContext::build(&train_slice, WordList::bundled());
        let families: Vec<LabeledFamily> = ["ramnit", "simda", "pykspa"]
            .iter()
            .map(|name| {
                let s = generate_family(&builtin_profile(name).unwrap(), 200).unwrap();
                LabeledFamily {
                    name: s.family,
                    domains: s.domains,
                }
            })
            .collect();
        // stand-in adversarial set: another slice of benign-like strings
        let adversarial: Vec<DomainName> = benign_corpus(120).entries;
        let report = harden_lofo(
            &families,
            &train_slice,
            &hold_slice,
            &adversarial,
            &ctx,
            &small_params(),
            5,
        )
        .unwrap();
        assert_eq!(report.rows.len(), 3);
        for row in &report.rows {
            assert!((0.0..=1.0).contains(&row.baseline_tpr));
            assert!((0.0..=1.0).contains(&row.hardened_tpr));
        }
        assert!(matches!(
            harden_lofo(&families[..1], &train_slice, &hold_slice, &adversarial, &ctx, &small_params(), 5),
            Err(Error::TooFew(_))
        ));
    }

    #[test]
    fn csv_renderers_have_expected_rows() {
        let rows = vec![FamilyAucRow {
            family: "x".into(),
            mean_auc: 0.5,
        }];
        assert_eq!(family_auc_csv(&rows).lines().count(), 2);
        let pooled = PooledReport {
            rows: vec![PooledRow {
                family: "x".into(),
                detection_rate: 1.0,
                support: 10,
            }],
            average: 1.0,
            total_support: 10,
        };
        assert_eq!(pooled_csv(&pooled).lines().count(), 3);
        let harden = HardenReport {
            rows: vec![HardenRow {
                family: "x".into(),
                baseline_tpr: 0.5,
                hardened_tpr: 0.6,
            }],
            baseline_average: 0.5,
            hardened_average: 0.6,
        };
        assert_eq!(harden_csv(&harden).lines().count(), 3);
        let uni = crate::dga::unigram_distribution(&[DomainName::new("ab").unwrap()]).unwrap();
        let csv = unigram_csv(&uni);
        assert_eq!(csv.lines().count(), 38);
        assert!(csv.starts_with("char,probability\na,0.5"));
    }
}
