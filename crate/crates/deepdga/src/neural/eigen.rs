//! Symmetric eigendecomposition via cyclic Jacobi rotations. Used to find
//! the principal axes of embedding clouds; H x H inputs stay tiny, so the
//! classic O(n^3)-per-sweep scheme is plenty.

use super::tensor::Tensor;

/// Eigenvalues (descending) and eigenvectors (columns of the returned
/// matrix, aligned with the eigenvalues) of a symmetric matrix.
pub fn symmetric_eigen(a: &Tensor) -> (Vec<f64>, Tensor) {
    let n = a.shape()[0];
    assert_eq!(a.shape(), &[n, n], "matrix must be square");
    let mut m = a.data().to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[p * n + q] * m[p * n + q];
            }
        }
        if off.sqrt() < 1e-12 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = vec![0.0; n * n];
    for (new_col, &old_col) in order.iter().enumerate() {
        for k in 0..n {
            vectors[k * n + new_col] = v[k * n + old_col];
        }
    }
    (eigenvalues, Tensor::from_vec(&[n, n], vectors))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonalizes_known_matrix() {
        // eigenvalues of [[2,1],[1,2]] are 3 and 1
        let a = Tensor::from_vec(&[2, 2], vec![2.0, 1.0, 1.0, 2.0]);
        let (vals, vecs) = symmetric_eigen(&a);
        assert!((vals[0] - 3.0).abs() < 1e-10);
        assert!((vals[1] - 1.0).abs() < 1e-10);
        // first eigenvector is (1,1)/sqrt(2) up to sign
        let v0 = (vecs.data()[0], vecs.data()[2]);
        assert!((v0.0.abs() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-10);
        assert!((v0.0 - v0.1).abs() < 1e-10);
    }

    #[test]
    fn reconstructs_random_symmetric_matrix() {
        let n = 8;
        let mut rng = crate::rng::SplitMix64::new(5);
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let x = rng.next_f64_range(-1.0, 1.0);
                data[i * n + j] = x;
                data[j * n + i] = x;
            }
        }
        let a = Tensor::from_vec(&[n, n], data.clone());
        let (vals, vecs) = symmetric_eigen(&a);
        // A v_k = lambda_k v_k for every k
        let v = vecs.data();
        for k in 0..n {
            for i in 0..n {
                let av: f64 = (0..n).map(|j| data[i * n + j] * v[j * n + k]).sum();
                assert!((av - vals[k] * v[i * n + k]).abs() < 1e-8);
            }
        }
        // columns orthonormal
        for a_col in 0..n {
            for b_col in 0..n {
                let d: f64 = (0..n).map(|i| v[i * n + a_col] * v[i * n + b_col]).sum();
                let want = if a_col == b_col { 1.0 } else { 0.0 };
                assert!((d - want).abs() < 1e-10);
            }
        }
    }
}
