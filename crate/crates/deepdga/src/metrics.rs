//! Classifier metrics: ROC curves, AUC, TPR at a fixed FPR, stratified
//! k-fold splits, and KL divergence between character distributions.

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// One ROC operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    pub threshold: f64,
}

/// ROC curve from (0,0) to (1,1); fpr and tpr are nondecreasing.
#[derive(Debug, Clone)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
}

fn check_two_classes(labels: &[bool]) -> Result<(usize, usize)> {
    let pos = labels.iter().filter(|&&l| l).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::OneClass);
    }
    Ok((pos, neg))
}

/// Build the ROC curve by sweeping the decision threshold over the observed
/// scores, highest first. A sample is predicted positive when its score is
/// >= the threshold.
pub fn roc_curve(scores: &[f64], labels: &[bool]) -> Result<RocCurve> {
    assert_eq!(scores.len(), labels.len());
    let (pos, neg) = check_two_classes(labels)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).expect("finite scores"));

    let mut points = vec![RocPoint {
        fpr: 0.0,
        tpr: 0.0,
        threshold: f64::INFINITY,
    }];
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut k = 0usize;
    while k < order.len() {
        let threshold = scores[order[k]];
        // absorb the whole tie group before emitting a point
        while k < order.len() && scores[order[k]] == threshold {
            if labels[order[k]] {
                tp += 1;
            } else {
                fp += 1;
            }
            k += 1;
        }
        points.push(RocPoint {
            fpr: fp as f64 / neg as f64,
            tpr: tp as f64 / pos as f64,
            threshold,
        });
    }
    Ok(RocCurve { points })
}

/// Area under the ROC curve as the rank statistic
/// P(score_pos > score_neg) + 0.5 * P(tie).
pub fn auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    assert_eq!(scores.len(), labels.len());
    let (pos, neg) = check_two_classes(labels)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).expect("finite scores"));

    // sum of positive ranks with midranks for ties (Mann-Whitney U)
    let mut rank_sum = 0.0;
    let mut k = 0usize;
    while k < order.len() {
        let mut j = k;
        while j < order.len() && scores[order[j]] == scores[order[k]] {
            j += 1;
        }
        // ranks are 1-based; tie group [k, j) shares the midrank
        let midrank = (k + 1 + j) as f64 / 2.0;
        for &i in &order[k..j] {
            if labels[i] {
                rank_sum += midrank;
            }
        }
        k = j;
    }
    let p = pos as f64;
    let u = rank_sum - p * (p + 1.0) / 2.0;
    Ok(u / (p * neg as f64))
}

/// TPR at the highest-TPR threshold whose FPR stays at or below the target.
/// The threshold is the smallest observed score with FPR <= target
/// (predicting positive when score >= threshold); +inf when no score
/// qualifies.
pub fn tpr_at_fpr(scores: &[f64], labels: &[bool], target_fpr: f64) -> Result<(f64, f64)> {
    let curve = roc_curve(scores, labels)?;
    // FPR is nondecreasing along the curve, so feasible points form a prefix
    // and the last of them carries the smallest feasible threshold (and the
    // highest TPR attainable within the FPR budget).
    let mut best = (0.0, f64::INFINITY);
    for p in &curve.points {
        if p.fpr <= target_fpr {
            best = (p.tpr, p.threshold);
        }
    }
    Ok(best)
}

/// Index sets for one stratified fold.
#[derive(Debug, Clone)]
pub struct FoldIndices {
    pub train_pos: Vec<usize>,
    pub train_neg: Vec<usize>,
    pub test_pos: Vec<usize>,
    pub test_neg: Vec<usize>,
}

/// Stratified k-fold split over two classes given by their sizes. Folds are
/// disjoint and exhaustive per class, deterministic in the seed.
pub fn kfold(n_pos: usize, n_neg: usize, k: usize, seed: u64) -> Result<Vec<FoldIndices>> {
    if k < 2 || n_pos < k || n_neg < k {
        return Err(Error::TooFew(format!(
            "k-fold needs at least k={k} samples per class, got {n_pos} and {n_neg}"
        )));
    }
    let assign = |n: usize, stream: u64| -> Vec<Vec<usize>> {
        let mut order: Vec<usize> = (0..n).collect();
        SplitMix64::derive(seed, stream).shuffle(&mut order);
        let mut folds = vec![Vec::new(); k];
        for (i, idx) in order.into_iter().enumerate() {
            folds[i % k].push(idx);
        }
        folds
    };
    let pos_folds = assign(n_pos, 0xF01d);
    let neg_folds = assign(n_neg, 0xF01e);
    Ok((0..k)
        .map(|f| {
            let pick = |folds: &[Vec<usize>], test: bool| -> Vec<usize> {
                folds
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| (i == f) == test)
                    .flat_map(|(_, v)| v.iter().copied())
                    .collect()
            };
            FoldIndices {
                train_pos: pick(&pos_folds, false),
                train_neg: pick(&neg_folds, false),
                test_pos: pick(&pos_folds, true),
                test_neg: pick(&neg_folds, true),
            }
        })
        .collect())
}

/// KL divergence sum p ln(p/q) in nats. q is smoothed by adding 1e-6 to
/// every entry and renormalizing; zero-p terms contribute nothing.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::BadDistribution(format!(
            "length mismatch {} vs {}",
            p.len(),
            q.len()
        )));
    }
    for (name, v) in [("p", p), ("q", q)] {
        if v.iter().any(|&x| x < 0.0 || !x.is_finite()) {
            return Err(Error::BadDistribution(format!("{name} has invalid entries")));
        }
        let sum: f64 = v.iter().sum();
        if (sum - 1.0).abs() > 1e-6 {
            return Err(Error::BadDistribution(format!("{name} sums to {sum}")));
        }
    }
    let q_total: f64 = q.iter().map(|&x| x + 1e-6).sum();
    Ok(p.iter()
        .zip(q)
        .filter(|&(&pi, _)| pi > 0.0)
        .map(|(&pi, &qi)| pi * (pi / ((qi + 1e-6) / q_total)).ln())
        .sum())
}
