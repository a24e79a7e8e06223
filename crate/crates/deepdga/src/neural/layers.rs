//! Differentiable layers: embedding, convolution bank, dual max-pooling,
//! highway, LSTM, time-distributed dense softmax, and the box generator
//! layer. Every layer exposes an explicit forward that fills caller-owned
//! buffers and a backward that accumulates parameter gradients into a
//! `zeros_like` twin of itself.

use super::tensor::{axpy, dot, matvec_accum, matvec_t_accum, outer_accum, sigmoid, Tensor};
use crate::rng::SplitMix64;

fn xavier(rng: &mut SplitMix64, fan_in: usize, fan_out: usize, shape: &[usize]) -> Tensor {
    let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
    let len: usize = shape.iter().product();
    let data = (0..len).map(|_| rng.next_f64_range(-limit, limit)).collect();
    Tensor::from_vec(shape, data)
}

// ---------------------------------------------------------------------------
// embedding
// ---------------------------------------------------------------------------

/// Linear map from vocabulary symbols to d-dimensional vectors; also accepts
/// probability rows (soft symbols) so gradients can cross the decoder's
/// softmax during generator training.
#[derive(Debug, Clone)]
pub struct Embedding {
    /// vocab x d
    pub table: Tensor,
}

impl Embedding {
    pub fn new(vocab: usize, dim: usize, rng: &mut SplitMix64) -> Self {
        let data = (0..vocab * dim).map(|_| rng.next_f64_range(-0.5, 0.5)).collect();
        Embedding {
            table: Tensor::from_vec(&[vocab, dim], data),
        }
    }

    pub fn zeros_like(&self) -> Self {
        Embedding {
            table: self.table.zeros_like(),
        }
    }

    pub fn dim(&self) -> usize {
        self.table.shape()[1]
    }

    pub fn vocab(&self) -> usize {
        self.table.shape()[0]
    }

    /// indices (T) -> out (T x d).
    pub fn forward(&self, indices: &[u8], out: &mut [f64]) {
        let d = self.dim();
        for (t, &idx) in indices.iter().enumerate() {
            out[t * d..(t + 1) * d].copy_from_slice(self.table.row(idx as usize));
        }
    }

    pub fn backward(&self, indices: &[u8], dout: &[f64], grads: &mut Embedding) {
        let d = self.dim();
        for (t, &idx) in indices.iter().enumerate() {
            let row = &mut grads.table.data_mut()[idx as usize * d..(idx as usize + 1) * d];
            axpy(1.0, &dout[t * d..(t + 1) * d], row);
        }
    }

    /// probs (T x vocab) -> out (T x d): each step is the probability-weighted
    /// mixture of symbol embeddings.
    pub fn forward_soft(&self, probs: &[f64], t_len: usize, out: &mut [f64]) {
        let v = self.vocab();
        let d = self.dim();
        for t in 0..t_len {
            let row = &mut out[t * d..(t + 1) * d];
            row.iter_mut().for_each(|x| *x = 0.0);
            matvec_t_accum(self.table.data(), v, d, &probs[t * v..(t + 1) * v], row);
        }
    }

    /// Gradient through the soft mixture back to the probability rows.
    pub fn backward_soft(&self, probs: &[f64], t_len: usize, dout: &[f64], dprobs: &mut [f64]) {
        let v = self.vocab();
        let d = self.dim();
        let _ = probs;
        for t in 0..t_len {
            matvec_accum(
                self.table.data(),
                v,
                d,
                &dout[t * d..(t + 1) * d],
                &mut dprobs[t * v..(t + 1) * v],
            );
        }
    }
}

// ---------------------------------------------------------------------------
// convolution bank
// ---------------------------------------------------------------------------

/// Width-2 and width-3 filters over a T x C sequence with implicit left zero
/// padding, so the output keeps length T. Tap k of a filter multiplies the
/// input row at t - k.
#[derive(Debug, Clone)]
pub struct ConvBank {
    pub n_bigram: usize,
    pub n_trigram: usize,
    pub in_channels: usize,
    /// n_bigram x 2 x C
    pub w2: Tensor,
    pub b2: Tensor,
    /// n_trigram x 3 x C
    pub w3: Tensor,
    pub b3: Tensor,
}

impl ConvBank {
    pub fn new(n_bigram: usize, n_trigram: usize, in_channels: usize, rng: &mut SplitMix64) -> Self {
        ConvBank {
            n_bigram,
            n_trigram,
            in_channels,
            w2: xavier(rng, 2 * in_channels, n_bigram, &[n_bigram, 2, in_channels]),
            b2: Tensor::zeros(&[n_bigram]),
            w3: xavier(rng, 3 * in_channels, n_trigram, &[n_trigram, 3, in_channels]),
            b3: Tensor::zeros(&[n_trigram]),
        }
    }

    pub fn zeros_like(&self) -> Self {
        ConvBank {
            n_bigram: self.n_bigram,
            n_trigram: self.n_trigram,
            in_channels: self.in_channels,
            w2: self.w2.zeros_like(),
            b2: self.b2.zeros_like(),
            w3: self.w3.zeros_like(),
            b3: self.b3.zeros_like(),
        }
    }

    pub fn n_filters(&self) -> usize {
        self.n_bigram + self.n_trigram
    }

    /// x (T x C) -> out (T x F) with F = n_bigram + n_trigram.
    pub fn forward(&self, x: &[f64], t_len: usize, out: &mut [f64]) {
        let c = self.in_channels;
        let f_total = self.n_filters();
        debug_assert_eq!(x.len(), t_len * c);
        debug_assert_eq!(out.len(), t_len * f_total);
        for t in 0..t_len {
            let out_row = &mut out[t * f_total..(t + 1) * f_total];
            for f in 0..self.n_bigram {
                let mut acc = self.b2.data()[f];
                for k in 0..2usize {
                    if t >= k {
                        let w = &self.w2.data()[(f * 2 + k) * c..(f * 2 + k + 1) * c];
                        acc += dot(w, &x[(t - k) * c..(t - k + 1) * c]);
                    }
                }
                out_row[f] = acc;
            }
            for f in 0..self.n_trigram {
                let mut acc = self.b3.data()[f];
                for k in 0..3usize {
                    if t >= k {
                        let w = &self.w3.data()[(f * 3 + k) * c..(f * 3 + k + 1) * c];
                        acc += dot(w, &x[(t - k) * c..(t - k + 1) * c]);
                    }
                }
                out_row[self.n_bigram + f] = acc;
            }
        }
    }

    pub fn backward(
        &self,
        x: &[f64],
        t_len: usize,
        dout: &[f64],
        dx: &mut [f64],
        grads: &mut ConvBank,
    ) {
        let c = self.in_channels;
        let f_total = self.n_filters();
        for t in 0..t_len {
            let dout_row = &dout[t * f_total..(t + 1) * f_total];
            for f in 0..self.n_bigram {
                let g = dout_row[f];
                if g == 0.0 {
                    continue;
                }
                grads.b2.data_mut()[f] += g;
                for k in 0..2usize {
                    if t >= k {
                        let wi = (f * 2 + k) * c;
                        axpy(g, &x[(t - k) * c..(t - k + 1) * c], &mut grads.w2.data_mut()[wi..wi + c]);
                        axpy(g, &self.w2.data()[wi..wi + c], &mut dx[(t - k) * c..(t - k + 1) * c]);
                    }
                }
            }
            for f in 0..self.n_trigram {
                let g = dout_row[self.n_bigram + f];
                if g == 0.0 {
                    continue;
                }
                grads.b3.data_mut()[f] += g;
                for k in 0..3usize {
                    if t >= k {
                        let wi = (f * 3 + k) * c;
                        axpy(g, &x[(t - k) * c..(t - k + 1) * c], &mut grads.w3.data_mut()[wi..wi + c]);
                        axpy(g, &self.w3.data()[wi..wi + c], &mut dx[(t - k) * c..(t - k + 1) * c]);
                    }
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// dual max-pooling
// ---------------------------------------------------------------------------

/// Argmax bookkeeping for the pooling backward pass.
#[derive(Debug, Clone)]
pub struct PoolCache {
    /// winning time step per filter (broadcast channels)
    pub time_argmax: Vec<usize>,
    /// winning filter per (step, group) for the two per-step channels
    pub filter_argmax: Vec<[usize; 2]>,
}

/// conv_out (T x F) -> out (T x (F + 2)): every filter's max over time,
/// broadcast to each step, concatenated with the per-step max over the
/// bigram group and over the trigram group. Ties resolve to the earliest
/// index.
pub fn dual_maxpool(
    conv_out: &[f64],
    t_len: usize,
    n_bigram: usize,
    n_trigram: usize,
    out: &mut [f64],
    cache: &mut PoolCache,
) {
    let f_total = n_bigram + n_trigram;
    let p = f_total + 2;
    debug_assert_eq!(conv_out.len(), t_len * f_total);
    debug_assert_eq!(out.len(), t_len * p);

    cache.time_argmax.clear();
    cache.time_argmax.resize(f_total, 0);
    let mut time_max = vec![f64::NEG_INFINITY; f_total];
    for t in 0..t_len {
        let row = &conv_out[t * f_total..(t + 1) * f_total];
        for f in 0..f_total {
            if row[f] > time_max[f] {
                time_max[f] = row[f];
                cache.time_argmax[f] = t;
            }
        }
    }

    cache.filter_argmax.clear();
    cache.filter_argmax.resize(t_len, [0, 0]);
    for t in 0..t_len {
        let row = &conv_out[t * f_total..(t + 1) * f_total];
        let out_row = &mut out[t * p..(t + 1) * p];
        out_row[..f_total].copy_from_slice(&time_max);
        let (mut big, mut big_at) = (f64::NEG_INFINITY, 0);
        for f in 0..n_bigram {
            if row[f] > big {
                big = row[f];
                big_at = f;
            }
        }
        let (mut tri, mut tri_at) = (f64::NEG_INFINITY, n_bigram);
        for f in n_bigram..f_total {
            if row[f] > tri {
                tri = row[f];
                tri_at = f;
            }
        }
        out_row[f_total] = big;
        out_row[f_total + 1] = tri;
        cache.filter_argmax[t] = [big_at, tri_at];
    }
}

/// Route pooled gradients back to the winning positions.
pub fn dual_maxpool_backward(
    dout: &[f64],
    t_len: usize,
    n_bigram: usize,
    n_trigram: usize,
    cache: &PoolCache,
    dconv: &mut [f64],
) {
    let f_total = n_bigram + n_trigram;
    let p = f_total + 2;
    for t in 0..t_len {
        let dout_row = &dout[t * p..(t + 1) * p];
        // broadcast channels: each step's gradient flows to the time winner
        for f in 0..f_total {
            dconv[cache.time_argmax[f] * f_total + f] += dout_row[f];
        }
        let [big_at, tri_at] = cache.filter_argmax[t];
        dconv[t * f_total + big_at] += dout_row[f_total];
        dconv[t * f_total + tri_at] += dout_row[f_total + 1];
    }
}

// ---------------------------------------------------------------------------
// highway
// ---------------------------------------------------------------------------

/// y = t . g(Wx + b) + (1 - t) . x with t = sigma(Wt x + bt) and rectifier g,
/// weights shared across time steps.
#[derive(Debug, Clone)]
pub struct Highway {
    pub w: Tensor,
    pub b: Tensor,
    pub wt: Tensor,
    pub bt: Tensor,
}

#[derive(Debug, Clone)]
pub struct HighwayCache {
    /// T x d pre-activations of the transform branch
    pub pre: Tensor,
    /// T x d gate values
    pub gate: Tensor,
}

impl Highway {
    pub fn new(dim: usize, rng: &mut SplitMix64) -> Self {
        Highway {
            w: xavier(rng, dim, dim, &[dim, dim]),
            b: Tensor::zeros(&[dim]),
            wt: xavier(rng, dim, dim, &[dim, dim]),
            // negative gate bias favors the carry path early in training
            bt: Tensor::filled(&[dim], -1.0),
        }
    }

    pub fn zeros_like(&self) -> Self {
        Highway {
            w: self.w.zeros_like(),
            b: self.b.zeros_like(),
            wt: self.wt.zeros_like(),
            bt: self.bt.zeros_like(),
        }
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn cache(&self, t_len: usize) -> HighwayCache {
        let d = self.dim();
        HighwayCache {
            pre: Tensor::zeros(&[t_len, d]),
            gate: Tensor::zeros(&[t_len, d]),
        }
    }

    /// x (T x d) -> out (T x d).
    pub fn forward_seq(&self, x: &[f64], t_len: usize, out: &mut [f64], cache: &mut HighwayCache) {
        let d = self.dim();
        for t in 0..t_len {
            let xr = &x[t * d..(t + 1) * d];
            let pre = &mut cache.pre.data_mut()[t * d..(t + 1) * d];
            pre.copy_from_slice(self.b.data());
            matvec_accum(self.w.data(), d, d, xr, pre);
            let gate = &mut cache.gate.data_mut()[t * d..(t + 1) * d];
            gate.copy_from_slice(self.bt.data());
            matvec_accum(self.wt.data(), d, d, xr, gate);
            let out_row = &mut out[t * d..(t + 1) * d];
            for i in 0..d {
                gate[i] = sigmoid(gate[i]);
                let h = pre[i].max(0.0);
                out_row[i] = gate[i] * h + (1.0 - gate[i]) * xr[i];
            }
        }
    }

    pub fn backward_seq(
        &self,
        x: &[f64],
        t_len: usize,
        cache: &HighwayCache,
        dout: &[f64],
        dx: &mut [f64],
        grads: &mut Highway,
    ) {
        let d = self.dim();
        let mut dpre = vec![0.0; d];
        let mut dgate_z = vec![0.0; d];
        for t in 0..t_len {
            let xr = &x[t * d..(t + 1) * d];
            let pre = &cache.pre.data()[t * d..(t + 1) * d];
            let gate = &cache.gate.data()[t * d..(t + 1) * d];
            let dout_row = &dout[t * d..(t + 1) * d];
            let dx_row = &mut dx[t * d..(t + 1) * d];
            for i in 0..d {
                let h = pre[i].max(0.0);
                let dy = dout_row[i];
                let dgate = dy * (h - xr[i]);
                dgate_z[i] = dgate * gate[i] * (1.0 - gate[i]);
                dpre[i] = if pre[i] > 0.0 { dy * gate[i] } else { 0.0 };
                dx_row[i] += dy * (1.0 - gate[i]);
            }
            outer_accum(&dpre, xr, grads.w.data_mut());
            axpy(1.0, &dpre, grads.b.data_mut());
            matvec_t_accum(self.w.data(), d, d, &dpre, dx_row);
            outer_accum(&dgate_z, xr, grads.wt.data_mut());
            axpy(1.0, &dgate_z, grads.bt.data_mut());
            matvec_t_accum(self.wt.data(), d, d, &dgate_z, dx_row);
        }
    }
}

// ---------------------------------------------------------------------------
// LSTM
// ---------------------------------------------------------------------------

/// Gate parameter block order: input, forget, output, state-update.
#[derive(Debug, Clone)]
pub struct Lstm {
    pub input_dim: usize,
    pub hidden: usize,
    pub wi: Tensor,
    pub ui: Tensor,
    pub bi: Tensor,
    pub wf: Tensor,
    pub uf: Tensor,
    pub bf: Tensor,
    pub wo: Tensor,
    pub uo: Tensor,
    pub bo: Tensor,
    pub wg: Tensor,
    pub ug: Tensor,
    pub bg: Tensor,
}

#[derive(Debug, Clone)]
pub struct LstmCache {
    pub i: Tensor,
    pub f: Tensor,
    pub o: Tensor,
    pub g: Tensor,
    pub c: Tensor,
    pub tanh_c: Tensor,
    pub h: Tensor,
}

impl Lstm {
    pub fn new(input_dim: usize, hidden: usize, rng: &mut SplitMix64) -> Self {
        let w = |rng: &mut SplitMix64| xavier(rng, input_dim, hidden, &[hidden, input_dim]);
        let u = |rng: &mut SplitMix64| xavier(rng, hidden, hidden, &[hidden, hidden]);
        Lstm {
            input_dim,
            hidden,
            wi: w(rng),
            ui: u(rng),
            bi: Tensor::zeros(&[hidden]),
            wf: w(rng),
            uf: u(rng),
            // positive forget bias so state persists at initialization
            bf: Tensor::filled(&[hidden], 1.0),
            wo: w(rng),
            uo: u(rng),
            bo: Tensor::zeros(&[hidden]),
            wg: w(rng),
            ug: u(rng),
            bg: Tensor::zeros(&[hidden]),
        }
    }

    pub fn zeros_like(&self) -> Self {
        Lstm {
            input_dim: self.input_dim,
            hidden: self.hidden,
            wi: self.wi.zeros_like(),
            ui: self.ui.zeros_like(),
            bi: self.bi.zeros_like(),
            wf: self.wf.zeros_like(),
            uf: self.uf.zeros_like(),
            bf: self.bf.zeros_like(),
            wo: self.wo.zeros_like(),
            uo: self.uo.zeros_like(),
            bo: self.bo.zeros_like(),
            wg: self.wg.zeros_like(),
            ug: self.ug.zeros_like(),
            bg: self.bg.zeros_like(),
        }
    }

    pub fn cache(&self, t_len: usize) -> LstmCache {
        let h = self.hidden;
        LstmCache {
            i: Tensor::zeros(&[t_len, h]),
            f: Tensor::zeros(&[t_len, h]),
            o: Tensor::zeros(&[t_len, h]),
            g: Tensor::zeros(&[t_len, h]),
            c: Tensor::zeros(&[t_len, h]),
            tanh_c: Tensor::zeros(&[t_len, h]),
            h: Tensor::zeros(&[t_len, h]),
        }
    }

    /// x (T x input_dim) -> emissions cached in `cache.h` (T x hidden);
    /// c0 = h0 = 0.
    pub fn forward_seq(&self, x: &[f64], t_len: usize, cache: &mut LstmCache) {
        let hd = self.hidden;
        let k = self.input_dim;
        let zero = vec![0.0; hd];
        for t in 0..t_len {
            let xr = &x[t * k..(t + 1) * k];
            // split_at_mut juggling avoided by collecting the previous row first
            let h_prev: Vec<f64> = if t == 0 {
                zero.clone()
            } else {
                cache.h.data()[(t - 1) * hd..t * hd].to_vec()
            };
            let c_prev: Vec<f64> = if t == 0 {
                zero.clone()
            } else {
                cache.c.data()[(t - 1) * hd..t * hd].to_vec()
            };
            let gate = |wv: &Tensor, uv: &Tensor, bv: &Tensor| -> Vec<f64> {
                let mut z = bv.data().to_vec();
                matvec_accum(wv.data(), hd, k, xr, &mut z);
                matvec_accum(uv.data(), hd, hd, &h_prev, &mut z);
                z
            };
            let zi = gate(&self.wi, &self.ui, &self.bi);
            let zf = gate(&self.wf, &self.uf, &self.bf);
            let zo = gate(&self.wo, &self.uo, &self.bo);
            let zg = gate(&self.wg, &self.ug, &self.bg);
            let row = t * hd..(t + 1) * hd;
            for j in 0..hd {
                let iv = sigmoid(zi[j]);
                let fv = sigmoid(zf[j]);
                let ov = sigmoid(zo[j]);
                let gv = zg[j].tanh();
                let cv = fv * c_prev[j] + iv * gv;
                let tc = cv.tanh();
                cache.i.data_mut()[row.start + j] = iv;
                cache.f.data_mut()[row.start + j] = fv;
                cache.o.data_mut()[row.start + j] = ov;
                cache.g.data_mut()[row.start + j] = gv;
                cache.c.data_mut()[row.start + j] = cv;
                cache.tanh_c.data_mut()[row.start + j] = tc;
                cache.h.data_mut()[row.start + j] = ov * tc;
            }
        }
    }

    /// Backpropagate through time. `dh_seq` holds dL/dh for every step
    /// (callers that only use the last emission zero-fill the rest).
    pub fn backward_seq(
        &self,
        x: &[f64],
        t_len: usize,
        cache: &LstmCache,
        dh_seq: &[f64],
        dx: &mut [f64],
        grads: &mut Lstm,
    ) {
        let hd = self.hidden;
        let k = self.input_dim;
        let mut dh = vec![0.0; hd];
        let mut dc = vec![0.0; hd];
        let mut dzi = vec![0.0; hd];
        let mut dzf = vec![0.0; hd];
        let mut dzo = vec![0.0; hd];
        let mut dzg = vec![0.0; hd];
        let mut dh_prev = vec![0.0; hd];
        for t in (0..t_len).rev() {
            let row = t * hd..(t + 1) * hd;
            for j in 0..hd {
                dh[j] += dh_seq[row.start + j];
            }
            let iv = &cache.i.data()[row.clone()];
            let fv = &cache.f.data()[row.clone()];
            let ov = &cache.o.data()[row.clone()];
            let gv = &cache.g.data()[row.clone()];
            let tc = &cache.tanh_c.data()[row.clone()];
            let c_prev: Vec<f64> = if t == 0 {
                vec![0.0; hd]
            } else {
                cache.c.data()[(t - 1) * hd..t * hd].to_vec()
            };
            let h_prev: Vec<f64> = if t == 0 {
                vec![0.0; hd]
            } else {
                cache.h.data()[(t - 1) * hd..t * hd].to_vec()
            };
            for j in 0..hd {
                let do_ = dh[j] * tc[j];
                dc[j] += dh[j] * ov[j] * (1.0 - tc[j] * tc[j]);
                let di = dc[j] * gv[j];
                let df = dc[j] * c_prev[j];
                let dg = dc[j] * iv[j];
                dzi[j] = di * iv[j] * (1.0 - iv[j]);
                dzf[j] = df * fv[j] * (1.0 - fv[j]);
                dzo[j] = do_ * ov[j] * (1.0 - ov[j]);
                dzg[j] = dg * (1.0 - gv[j] * gv[j]);
                dc[j] *= fv[j]; // becomes dc_prev
            }
            let xr = &x[t * k..(t + 1) * k];
            let dx_row = &mut dx[t * k..(t + 1) * k];
            dh_prev.iter_mut().for_each(|v| *v = 0.0);
            for (dz, wv, uv, dwv, duv, dbv) in [
                (&dzi, &self.wi, &self.ui, &mut grads.wi, &mut grads.ui, &mut grads.bi),
                (&dzf, &self.wf, &self.uf, &mut grads.wf, &mut grads.uf, &mut grads.bf),
                (&dzo, &self.wo, &self.uo, &mut grads.wo, &mut grads.uo, &mut grads.bo),
                (&dzg, &self.wg, &self.ug, &mut grads.wg, &mut grads.ug, &mut grads.bg),
            ] {
                outer_accum(dz, xr, dwv.data_mut());
                outer_accum(dz, &h_prev, duv.data_mut());
                axpy(1.0, dz, dbv.data_mut());
                matvec_t_accum(wv.data(), hd, k, dz, dx_row);
                matvec_t_accum(uv.data(), hd, hd, dz, &mut dh_prev);
            }
            dh.copy_from_slice(&dh_prev);
        }
    }
}

// ---------------------------------------------------------------------------
// time-distributed dense softmax
// ---------------------------------------------------------------------------

/// Shared-weight multinomial regressor: logits = Wx + b per step, softmax
/// rows.
#[derive(Debug, Clone)]
pub struct DenseSoftmax {
    /// vocab x in_dim
    pub w: Tensor,
    pub b: Tensor,
}

impl DenseSoftmax {
    pub fn new(in_dim: usize, vocab: usize, rng: &mut SplitMix64) -> Self {
        DenseSoftmax {
            w: xavier(rng, in_dim, vocab, &[vocab, in_dim]),
            b: Tensor::zeros(&[vocab]),
        }
    }

    pub fn zeros_like(&self) -> Self {
        DenseSoftmax {
            w: self.w.zeros_like(),
            b: self.b.zeros_like(),
        }
    }

    pub fn in_dim(&self) -> usize {
        self.w.shape()[1]
    }

    pub fn vocab(&self) -> usize {
        self.w.shape()[0]
    }

    /// x (T x in_dim) -> probs (T x vocab), each row a distribution.
    pub fn forward_seq(&self, x: &[f64], t_len: usize, probs: &mut [f64]) {
        let v = self.vocab();
        let p_dim = self.in_dim();
        for t in 0..t_len {
            let row = &mut probs[t * v..(t + 1) * v];
            row.copy_from_slice(self.b.data());
            matvec_accum(self.w.data(), v, p_dim, &x[t * p_dim..(t + 1) * p_dim], row);
            softmax_in_place(row);
        }
    }

    /// Backward from dL/dlogits (the caller computes it either from the
    /// fused cross-entropy shortcut or the general softmax jacobian).
    pub fn backward_from_dlogits(
        &self,
        x: &[f64],
        t_len: usize,
        dlogits: &[f64],
        dx: &mut [f64],
        grads: &mut DenseSoftmax,
    ) {
        let v = self.vocab();
        let p_dim = self.in_dim();
        for t in 0..t_len {
            let dl = &dlogits[t * v..(t + 1) * v];
            let xr = &x[t * p_dim..(t + 1) * p_dim];
            outer_accum(dl, xr, grads.w.data_mut());
            axpy(1.0, dl, grads.b.data_mut());
            matvec_t_accum(self.w.data(), v, p_dim, dl, &mut dx[t * p_dim..(t + 1) * p_dim]);
        }
    }
}

pub fn softmax_in_place(row: &mut [f64]) {
    let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in row.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in row.iter_mut() {
        *v /= sum;
    }
}

/// dL/dlogits from dL/dprobs for a softmax row: p . (dp - (dp . p)).
pub fn softmax_backward_row(probs: &[f64], dprobs: &[f64], dlogits: &mut [f64]) {
    let inner = dot(probs, dprobs);
    for j in 0..probs.len() {
        dlogits[j] = probs[j] * (dprobs[j] - inner);
    }
}

// ---------------------------------------------------------------------------
// box layer
// ---------------------------------------------------------------------------

/// Principal-axis state: embeddings are modeled in the rotated coordinates
/// p = axes^T (e - mean), and generated points map back through
/// e = mean + axes p.
#[derive(Debug, Clone)]
pub struct BoxRotation {
    /// H
    pub mean: Tensor,
    /// H x H, principal directions as columns
    pub axes: Tensor,
}

/// Sigmoid-gated convex combination of fitted box corners:
/// a = sigma(Wu + b), y = a . v_max + (1 - a) . v_min, optionally mapped out
/// of a principal-axis frame. Output lies inside the box by construction.
#[derive(Debug, Clone)]
pub struct BoxLayer {
    /// H x seed_dim
    pub w: Tensor,
    pub b: Tensor,
    pub v_min: Tensor,
    pub v_max: Tensor,
    pub rotation: Option<BoxRotation>,
}

#[derive(Debug, Clone)]
pub struct BoxCache {
    pub a: Vec<f64>,
}

impl BoxLayer {
    pub fn new(seed_dim: usize, out_dim: usize, rng: &mut SplitMix64) -> Self {
        BoxLayer {
            w: xavier(rng, seed_dim, out_dim, &[out_dim, seed_dim]),
            b: Tensor::zeros(&[out_dim]),
            v_min: Tensor::zeros(&[out_dim]),
            v_max: Tensor::zeros(&[out_dim]),
            rotation: None,
        }
    }

    pub fn zeros_like(&self) -> Self {
        BoxLayer {
            w: self.w.zeros_like(),
            b: self.b.zeros_like(),
            v_min: self.v_min.zeros_like(),
            v_max: self.v_max.zeros_like(),
            rotation: None,
        }
    }

    pub fn seed_dim(&self) -> usize {
        self.w.shape()[1]
    }

    pub fn out_dim(&self) -> usize {
        self.w.shape()[0]
    }

    /// u (seed_dim) -> y (out_dim).
    pub fn forward(&self, u: &[f64], y: &mut [f64], cache: &mut BoxCache) {
        let h = self.out_dim();
        cache.a.clear();
        cache.a.extend_from_slice(self.b.data());
        matvec_accum(self.w.data(), h, self.seed_dim(), u, &mut cache.a);
        for j in 0..h {
            cache.a[j] = sigmoid(cache.a[j]);
        }
        let vmin = self.v_min.data();
        let vmax = self.v_max.data();
        match &self.rotation {
            None => {
                for j in 0..h {
                    y[j] = cache.a[j] * vmax[j] + (1.0 - cache.a[j]) * vmin[j];
                }
            }
            Some(rot) => {
                let mut r = vec![0.0; h];
                for j in 0..h {
                    r[j] = cache.a[j] * vmax[j] + (1.0 - cache.a[j]) * vmin[j];
                }
                y.copy_from_slice(rot.mean.data());
                // y += axes . r with axes stored row-major (rows are ambient dims)
                matvec_accum(rot.axes.data(), h, h, &r, y);
            }
        }
    }

    /// Only W and b are trainable; corners and rotation are fitted offline.
    pub fn backward(&self, u: &[f64], cache: &BoxCache, dy: &[f64], grads: &mut BoxLayer) {
        let h = self.out_dim();
        let vmin = self.v_min.data();
        let vmax = self.v_max.data();
        let dr: Vec<f64> = match &self.rotation {
            None => dy.to_vec(),
            Some(rot) => {
                let mut dr = vec![0.0; h];
                matvec_t_accum(rot.axes.data(), h, h, dy, &mut dr);
                dr
            }
        };
        let mut dz = vec![0.0; h];
        for j in 0..h {
            let da = dr[j] * (vmax[j] - vmin[j]);
            dz[j] = da * cache.a[j] * (1.0 - cache.a[j]);
        }
        outer_accum(&dz, u, grads.w.data_mut());
        axpy(1.0, &dz, grads.b.data_mut());
    }
}

// ---------------------------------------------------------------------------
// masked cross-entropy
// ---------------------------------------------------------------------------

use crate::corpus::EncodedDomain;
use crate::error::{Error, Result};

/// Mean negative log-likelihood over the steps whose target symbol is not
/// PAD; PAD steps contribute to neither the sum nor the denominator.
pub fn masked_crossentropy(probs: &[f64], vocab: usize, target: &EncodedDomain) -> Result<f64> {
    let t_len = target.indices.len();
    if probs.len() != t_len * vocab {
        return Err(Error::Shape(format!(
            "probs has {} values, expected {} x {}",
            probs.len(),
            t_len,
            vocab
        )));
    }
    for t in 0..t_len {
        let sum: f64 = probs[t * vocab..(t + 1) * vocab].iter().sum();
        if (sum - 1.0).abs() > 1e-6 {
            return Err(Error::Shape(format!("probs row {t} sums to {sum}")));
        }
    }
    Ok(masked_crossentropy_unchecked(probs, vocab, target))
}

pub(crate) fn masked_crossentropy_unchecked(
    probs: &[f64],
    vocab: usize,
    target: &EncodedDomain,
) -> f64 {
    let mut loss = 0.0;
    let mut steps = 0usize;
    for (t, &sym) in target.indices.iter().enumerate() {
        if sym == 0 {
            continue;
        }
        loss -= probs[t * vocab + sym as usize].max(1e-300).ln();
        steps += 1;
    }
    if steps == 0 {
        0.0
    } else {
        loss / steps as f64
    }
}

/// Fused softmax + masked cross-entropy gradient: dL/dlogits is
/// (p - onehot(target)) / n_nonpad on non-PAD steps and zero elsewhere.
pub fn masked_crossentropy_dlogits(
    probs: &[f64],
    vocab: usize,
    target: &EncodedDomain,
    dlogits: &mut [f64],
) {
    dlogits.iter_mut().for_each(|v| *v = 0.0);
    let n_nonpad = target.indices.iter().filter(|&&s| s != 0).count();
    if n_nonpad == 0 {
        return;
    }
    let scale = 1.0 / n_nonpad as f64;
    for (t, &sym) in target.indices.iter().enumerate() {
        if sym == 0 {
            continue;
        }
        let row = &mut dlogits[t * vocab..(t + 1) * vocab];
        row.copy_from_slice(&probs[t * vocab..(t + 1) * vocab]);
        row.iter_mut().for_each(|v| *v *= scale);
        row[sym as usize] -= scale;
    }
}
