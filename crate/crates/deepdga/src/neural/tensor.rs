//! Dense row-major tensors and the few linear-algebra kernels the layers
//! are built from. Training arithmetic is f64 throughout; the weights
//! container downcasts to f32 on serialization.

/// Dense n-dimensional array, row-major f64 storage.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(shape: &[usize]) -> Self {
        let len = shape.iter().product();
        Tensor {
            shape: shape.to_vec(),
            data: vec![0.0; len],
        }
    }

    pub fn from_vec(shape: &[usize], data: Vec<f64>) -> Self {
        assert_eq!(shape.iter().product::<usize>(), data.len(), "shape/data mismatch");
        Tensor {
            shape: shape.to_vec(),
            data,
        }
    }

    pub fn filled(shape: &[usize], value: f64) -> Self {
        let len = shape.iter().product();
        Tensor {
            shape: shape.to_vec(),
            data: vec![value; len],
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn zeros_like(&self) -> Self {
        Tensor::zeros(&self.shape)
    }

    pub fn fill(&mut self, value: f64) {
        self.data.iter_mut().for_each(|v| *v = value);
    }

    /// Row `r` of a 2-D tensor.
    pub fn row(&self, r: usize) -> &[f64] {
        debug_assert_eq!(self.shape.len(), 2);
        let cols = self.shape[1];
        &self.data[r * cols..(r + 1) * cols]
    }
}

/// Dot product, 4-way unrolled so LLVM vectorizes it.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let n = a.len();
    let chunks = n / 4;
    let (mut s0, mut s1, mut s2, mut s3) = (0.0, 0.0, 0.0, 0.0);
    for k in 0..chunks {
        let i = k * 4;
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    let mut sum = (s0 + s1) + (s2 + s3);
    for i in chunks * 4..n {
        sum += a[i] * b[i];
    }
    sum
}

/// out[r] += W[r, :] . x for an (rows x cols) row-major matrix.
#[inline]
pub fn matvec_accum(w: &[f64], rows: usize, cols: usize, x: &[f64], out: &mut [f64]) {
    debug_assert_eq!(w.len(), rows * cols);
    debug_assert_eq!(x.len(), cols);
    debug_assert_eq!(out.len(), rows);
    for r in 0..rows {
        out[r] += dot(&w[r * cols..(r + 1) * cols], x);
    }
}

/// out[c] += W[:, c] . dy, i.e. the transposed matvec, accumulated row-wise
/// so memory access stays sequential.
#[inline]
pub fn matvec_t_accum(w: &[f64], rows: usize, cols: usize, dy: &[f64], out: &mut [f64]) {
    debug_assert_eq!(w.len(), rows * cols);
    debug_assert_eq!(dy.len(), rows);
    debug_assert_eq!(out.len(), cols);
    for r in 0..rows {
        axpy(dy[r], &w[r * cols..(r + 1) * cols], out);
    }
}

/// dW[r, c] += dy[r] * x[c] (outer-product accumulation).
#[inline]
pub fn outer_accum(dy: &[f64], x: &[f64], dw: &mut [f64]) {
    debug_assert_eq!(dw.len(), dy.len() * x.len());
    let cols = x.len();
    for (r, &g) in dy.iter().enumerate() {
        axpy(g, x, &mut dw[r * cols..(r + 1) * cols]);
    }
}

/// y += alpha * x.
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}
