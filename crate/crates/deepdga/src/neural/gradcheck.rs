//! Finite-difference gradient checking.
//!
//! The harness perturbs one coordinate at a time of a flattened value vector
//! and compares the central difference against the analytic gradient. All
//! layer backward passes in this crate are verified this way.

/// Central-difference gradient of `loss` with respect to `base`.
pub fn numeric_gradient<F>(base: &[f64], mut loss: F, eps: f64) -> Vec<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    let mut work = base.to_vec();
    (0..base.len())
        .map(|i| {
            let orig = work[i];
            work[i] = orig + eps;
            let plus = loss(&work);
            work[i] = orig - eps;
            let minus = loss(&work);
            work[i] = orig;
            (plus - minus) / (2.0 * eps)
        })
        .collect()
}

/// Worst relative error between analytic and numeric gradients:
/// |a - n| / max(|a|, |n|, 1e-8).
pub fn max_rel_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    assert_eq!(analytic.len(), numeric.len());
    analytic
        .iter()
        .zip(numeric)
        .map(|(&a, &n)| (a - n).abs() / a.abs().max(n.abs()).max(1e-8))
        .fold(0.0, f64::max)
}

/// Convenience wrapper: compare an analytic gradient against central
/// differences of `loss` around `base` and return the max relative error.
pub fn grad_check<F>(base: &[f64], analytic: &[f64], loss: F, eps: f64) -> f64
where
    F: FnMut(&[f64]) -> f64,
{
    let numeric = numeric_gradient(base, loss, eps);
    max_rel_error(analytic, &numeric)
}

/// Flatten a list of tensors into one coordinate vector (the order the
/// autoencoder's parameter list defines).
pub fn flatten(tensors: &[&super::tensor::Tensor]) -> Vec<f64> {
    tensors.iter().flat_map(|t| t.data().iter().copied()).collect()
}

/// Scatter a flat coordinate vector back into tensors of matching sizes.
pub fn unflatten(flat: &[f64], tensors: &mut [&mut super::tensor::Tensor]) {
    let mut offset = 0;
    for t in tensors.iter_mut() {
        let n = t.len();
        t.data_mut().copy_from_slice(&flat[offset..offset + n]);
        offset += n;
    }
    assert_eq!(offset, flat.len());
}
