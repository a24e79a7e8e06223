//! Minimal differentiable-layer kernel: tensors, the layers of the domain
//! autoencoder and GAN, masked cross-entropy, Adam, and finite-difference
//! gradient checking.

pub mod adam;
pub mod gradcheck;
pub mod eigen;
pub mod layers;
pub mod tensor;

pub use adam::{adam_step, AdamParams, AdamState};
pub use gradcheck::{grad_check, max_rel_error, numeric_gradient};
pub use layers::{
    dual_maxpool, dual_maxpool_backward, masked_crossentropy, masked_crossentropy_dlogits,
    softmax_backward_row, softmax_in_place, BoxCache, BoxLayer, BoxRotation, ConvBank,
    DenseSoftmax, Embedding, Highway, HighwayCache, Lstm, LstmCache, PoolCache,
};
pub use tensor::Tensor;

#[cfg(test)]
mod tests {
    use super::gradcheck::{flatten, grad_check, unflatten};
    use super::layers::*;
    use super::tensor::{dot, Tensor};
    use crate::corpus::EncodedDomain;
    use crate::rng::SplitMix64;

    fn probe(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = SplitMix64::new(seed);
        (0..n).map(|_| rng.next_f64_range(-1.0, 1.0)).collect()
    }

    // -- hand-value forward cases ------------------------------------------

    #[test]
    fn conv_zero_weights_pass_bias() {
        let mut rng = SplitMix64::new(1);
        let mut bank = ConvBank::new(20, 10, 20, &mut rng);
        bank.w2.fill(0.0);
        bank.w3.fill(0.0);
        bank.b2.fill(0.3);
        bank.b3.fill(0.3);
        let t_len = 7;
        let x = probe(t_len * 20, 2);
        let mut out = vec![0.0; t_len * 30];
        bank.forward(&x, t_len, &mut out);
        assert!(out.iter().all(|&v| (v - 0.3).abs() < 1e-12));
    }

    #[test]
    fn conv_width2_hand_case() {
        // single channel, one width-2 filter [1, -1], zero left pad:
        // out[t] = 1*x[t] - 1*x[t-1]
        let mut rng = SplitMix64::new(1);
        let mut bank = ConvBank::new(1, 0, 1, &mut rng);
        bank.w2.data_mut().copy_from_slice(&[1.0, -1.0]);
        bank.b2.fill(0.0);
        let x = [1.0, 2.0, 4.0];
        let mut out = vec![0.0; 3];
        bank.forward(&x, 3, &mut out);
        assert_eq!(out, vec![1.0, 1.0, 2.0]);
    }

    #[test]
    fn conv_output_shape() {
        let mut rng = SplitMix64::new(3);
        let bank = ConvBank::new(20, 10, 20, &mut rng);
        let t_len = 63;
        let x = probe(t_len * 20, 4);
        let mut out = vec![0.0; t_len * 30];
        bank.forward(&x, t_len, &mut out);
        assert_eq!(out.len(), t_len * bank.n_filters());
    }

    #[test]
    fn pool_constant_input() {
        let t_len = 5;
        let conv = vec![0.7; t_len * 30];
        let mut out = vec![0.0; t_len * 32];
        let mut cache = PoolCache {
            time_argmax: vec![],
            filter_argmax: vec![],
        };
        dual_maxpool(&conv, t_len, 20, 10, &mut out, &mut cache);
        assert!(out.iter().all(|&v| (v - 0.7).abs() < 1e-12));
    }

    #[test]
    fn pool_spike_routing() {
        let t_len = 6;
        let (spike_t, spike_f) = (3usize, 4usize); // bigram group
        let mut conv = vec![0.0; t_len * 30];
        conv[spike_t * 30 + spike_f] = 2.5;
        let mut out = vec![0.0; t_len * 32];
        let mut cache = PoolCache {
            time_argmax: vec![],
            filter_argmax: vec![],
        };
        dual_maxpool(&conv, t_len, 20, 10, &mut out, &mut cache);
        for t in 0..t_len {
            // broadcast channel carries the spike at every step
            assert_eq!(out[t * 32 + spike_f], 2.5);
            // per-step bigram group max sees it only at the spike step
            let want = if t == spike_t { 2.5 } else { 0.0 };
            assert_eq!(out[t * 32 + 30], want);
        }
    }

    #[test]
    fn highway_gate_limits() {
        let mut rng = SplitMix64::new(5);
        let dim = 8;
        let x = probe(dim, 6);
        let mut out = vec![0.0; dim];

        let mut closed = Highway::new(dim, &mut rng);
        closed.bt.fill(-1e6);
        let mut cache = closed.cache(1);
        closed.forward_seq(&x, 1, &mut out, &mut cache);
        for (o, xi) in out.iter().zip(&x) {
            assert!((o - xi).abs() < 1e-9, "closed gate must carry input");
        }

        let mut open = Highway::new(dim, &mut rng);
        open.bt.fill(1e6);
        let mut cache = open.cache(1);
        open.forward_seq(&x, 1, &mut out, &mut cache);
        for (i, o) in out.iter().enumerate() {
            let pre = dot(open.w.row(i), &x) + open.b.data()[i];
            assert!((o - pre.max(0.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn highway_half_gate_hand_case() {
        let mut rng = SplitMix64::new(7);
        let dim = 4;
        let mut hw = Highway::new(dim, &mut rng);
        hw.w.fill(0.0);
        hw.b.fill(1.0);
        hw.wt.fill(0.0);
        hw.bt.fill(0.0); // sigma(0) = 0.5
        let x = [0.2, -0.4, 0.8, 0.0];
        let mut out = vec![0.0; dim];
        let mut cache = hw.cache(1);
        hw.forward_seq(&x, 1, &mut out, &mut cache);
        for (o, xi) in out.iter().zip(&x) {
            assert!((o - (0.5 + 0.5 * xi)).abs() < 1e-12);
        }
    }

    #[test]
    fn lstm_zero_params_silent() {
        let mut rng = SplitMix64::new(9);
        let mut lstm = Lstm::new(3, 4, &mut rng);
        for t in [
            &mut lstm.wi, &mut lstm.ui, &mut lstm.bi, &mut lstm.wf, &mut lstm.uf, &mut lstm.bf,
            &mut lstm.wo, &mut lstm.uo, &mut lstm.bo, &mut lstm.wg, &mut lstm.ug, &mut lstm.bg,
        ] {
            t.fill(0.0);
        }
        let t_len = 5;
        let x = probe(t_len * 3, 10);
        let mut cache = lstm.cache(t_len);
        lstm.forward_seq(&x, t_len, &mut cache);
        // i = f = o = 0.5, g = 0 at every step, so c = h = 0 throughout
        assert!(cache.i.data().iter().all(|&v| (v - 0.5).abs() < 1e-12));
        assert!(cache.g.data().iter().all(|&v| v.abs() < 1e-12));
        assert!(cache.c.data().iter().all(|&v| v.abs() < 1e-12));
        assert!(cache.h.data().iter().all(|&v| v.abs() < 1e-12));
    }

    #[test]
    fn lstm_saturated_integrator() {
        let mut rng = SplitMix64::new(11);
        let mut lstm = Lstm::new(2, 3, &mut rng);
        for t in [
            &mut lstm.wi, &mut lstm.ui, &mut lstm.wf, &mut lstm.uf, &mut lstm.wo, &mut lstm.uo,
            &mut lstm.wg, &mut lstm.ug, &mut lstm.bo,
        ] {
            t.fill(0.0);
        }
        lstm.bi.fill(50.0);
        lstm.bf.fill(50.0);
        lstm.bg.fill(50.0);
        let t_len = 6;
        let x = vec![0.0; t_len * 2];
        let mut cache = lstm.cache(t_len);
        lstm.forward_seq(&x, t_len, &mut cache);
        for t in 0..t_len {
            let c_want = (t + 1) as f64; // c_t = c_{t-1} + 1
            let h_want = 0.5 * c_want.tanh(); // o = sigma(0) = 0.5
            for j in 0..3 {
                assert!((cache.c.data()[t * 3 + j] - c_want).abs() < 1e-9);
                assert!((cache.h.data()[t * 3 + j] - h_want).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn dense_softmax_rows_are_distributions() {
        let mut rng = SplitMix64::new(13);
        let dense = DenseSoftmax::new(32, 38, &mut rng);
        let t_len = 9;
        let x = probe(t_len * 32, 14);
        let mut probs = vec![0.0; t_len * 38];
        dense.forward_seq(&x, t_len, &mut probs);
        for t in 0..t_len {
            let row = &probs[t * 38..(t + 1) * 38];
            assert!(row.iter().all(|&p| p >= 0.0));
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-6);
        }
    }

    // -- masked cross-entropy ----------------------------------------------

    fn encoded(indices: &[u8], t_len: usize) -> EncodedDomain {
        let mut v = indices.to_vec();
        v.resize(t_len, 0);
        EncodedDomain { indices: v }
    }

    #[test]
    fn masked_ce_perfect_prediction() {
        let vocab = 38;
        let target = encoded(&[3, 7], 4);
        let mut probs = vec![0.0; 4 * vocab];
        probs[3] = 1.0;
        probs[vocab + 7] = 1.0;
        // PAD steps: put valid rows there too (uniform)
        for t in 2..4 {
            probs[t * vocab..(t + 1) * vocab].iter_mut().for_each(|p| *p = 1.0 / 38.0);
        }
        assert_eq!(masked_crossentropy(&probs, vocab, &target).unwrap(), 0.0);
    }

    #[test]
    fn masked_ce_uniform_is_log_vocab() {
        let vocab = 38;
        let target = encoded(&[1, 2, 3], 3);
        let probs = vec![1.0 / 38.0; 3 * vocab];
        let loss = masked_crossentropy(&probs, vocab, &target).unwrap();
        assert!((loss - (38f64).ln()).abs() < 1e-9);
    }

    #[test]
    fn masked_ce_ignores_pad_region() {
        let vocab = 38;
        let t_len = 63;
        let target = encoded(&[1, 2], t_len);
        let mut rng = SplitMix64::new(15);
        let dense = DenseSoftmax::new(8, vocab, &mut rng);
        let x = probe(t_len * 8, 16);
        let mut probs = vec![0.0; t_len * vocab];
        dense.forward_seq(&x, t_len, &mut probs);
        let loss_a = masked_crossentropy(&probs, vocab, &target).unwrap();
        // rewrite the PAD-step rows with a different distribution
        for t in 2..t_len {
            let row = &mut probs[t * vocab..(t + 1) * vocab];
            row.iter_mut().for_each(|p| *p = 0.0);
            row[5] = 1.0;
        }
        let loss_b = masked_crossentropy(&probs, vocab, &target).unwrap();
        assert_eq!(loss_a, loss_b);
        // and the value is exactly the two-term mean
        let expected = -(probs[1].ln() + probs[vocab + 2].ln()) / 2.0;
        assert!((loss_a - expected).abs() < 1e-12);
    }

    #[test]
    fn masked_ce_shape_errors() {
        let vocab = 38;
        let target = encoded(&[1], 2);
        assert!(masked_crossentropy(&[0.5; 10], vocab, &target).is_err());
        let bad_rows = vec![0.5; 2 * vocab]; // rows sum to 19
        assert!(masked_crossentropy(&bad_rows, vocab, &target).is_err());
    }

    // -- gradient checks -----------------------------------------------------

    #[test]
    fn grad_embedding_table() {
        let mut rng = SplitMix64::new(21);
        let emb = Embedding::new(10, 4, &mut rng);
        let indices = [3u8, 0, 7, 3];
        let t_len = indices.len();
        let c = probe(t_len * 4, 22);
        let base = flatten(&[&emb.table]);
        let loss = |vals: &[f64]| {
            let mut l = emb.clone();
            unflatten(vals, &mut [&mut l.table]);
            let mut out = vec![0.0; t_len * 4];
            l.forward(&indices, &mut out);
            dot(&out, &c)
        };
        let mut grads = emb.zeros_like();
        emb.backward(&indices, &c, &mut grads);
        let err = grad_check(&base, &flatten(&[&grads.table]), loss, 1e-5);
        assert!(err < 1e-7, "embedding grad error {err}");
    }

    #[test]
    fn grad_embedding_soft_input() {
        let mut rng = SplitMix64::new(23);
        let emb = Embedding::new(6, 3, &mut rng);
        let t_len = 4;
        let mut probs = probe(t_len * 6, 24);
        probs.iter_mut().for_each(|p| *p = p.abs() + 0.05);
        let c = probe(t_len * 3, 25);
        let loss = |vals: &[f64]| {
            let mut out = vec![0.0; t_len * 3];
            emb.forward_soft(vals, t_len, &mut out);
            dot(&out, &c)
        };
        let mut dprobs = vec![0.0; t_len * 6];
        emb.backward_soft(&probs, t_len, &c, &mut dprobs);
        let err = grad_check(&probs, &dprobs, loss, 1e-5);
        assert!(err < 1e-7, "soft embedding input grad error {err}");
    }

    #[test]
    fn grad_conv_params_and_input() {
        let mut rng = SplitMix64::new(27);
        let bank = ConvBank::new(3, 2, 4, &mut rng);
        let t_len = 6;
        let x = probe(t_len * 4, 28);
        let c = probe(t_len * 5, 29);
        let forward_loss = |l: &ConvBank, xv: &[f64]| {
            let mut out = vec![0.0; t_len * 5];
            l.forward(xv, t_len, &mut out);
            dot(&out, &c)
        };
        let mut grads = bank.zeros_like();
        let mut dx = vec![0.0; t_len * 4];
        bank.backward(&x, t_len, &c, &mut dx, &mut grads);

        let base = flatten(&[&bank.w2, &bank.b2, &bank.w3, &bank.b3]);
        let err_p = grad_check(
            &base,
            &flatten(&[&grads.w2, &grads.b2, &grads.w3, &grads.b3]),
            |vals| {
                let mut l = bank.clone();
                unflatten(vals, &mut [&mut l.w2, &mut l.b2, &mut l.w3, &mut l.b3]);
                forward_loss(&l, &x)
            },
            1e-5,
        );
        assert!(err_p < 1e-7, "conv param grad error {err_p}");
        let err_x = grad_check(&x, &dx, |xv| forward_loss(&bank, xv), 1e-5);
        assert!(err_x < 1e-7, "conv input grad error {err_x}");
    }

    #[test]
    fn grad_dual_maxpool_input() {
        let t_len = 7;
        let n2 = 4;
        let n3 = 2;
        let f = n2 + n3;
        let p = f + 2;
        let x = probe(t_len * f, 31);
        let c = probe(t_len * p, 32);
        let loss = |xv: &[f64]| {
            let mut out = vec![0.0; t_len * p];
            let mut cache = PoolCache {
                time_argmax: vec![],
                filter_argmax: vec![],
            };
            dual_maxpool(xv, t_len, n2, n3, &mut out, &mut cache);
            dot(&out, &c)
        };
        let mut cache = PoolCache {
            time_argmax: vec![],
            filter_argmax: vec![],
        };
        let mut out = vec![0.0; t_len * p];
        dual_maxpool(&x, t_len, n2, n3, &mut out, &mut cache);
        let mut dx = vec![0.0; t_len * f];
        dual_maxpool_backward(&c, t_len, n2, n3, &cache, &mut dx);
        let err = grad_check(&x, &dx, loss, 1e-6);
        assert!(err < 1e-7, "pool input grad error {err}");
    }

    #[test]
    fn grad_highway() {
        let mut rng = SplitMix64::new(33);
        let hw = Highway::new(5, &mut rng);
        let t_len = 4;
        let x = probe(t_len * 5, 34);
        let c = probe(t_len * 5, 35);
        let forward_loss = |l: &Highway, xv: &[f64]| {
            let mut out = vec![0.0; t_len * 5];
            let mut cache = l.cache(t_len);
            l.forward_seq(xv, t_len, &mut out, &mut cache);
            dot(&out, &c)
        };
        let mut grads = hw.zeros_like();
        let mut dx = vec![0.0; t_len * 5];
        let mut cache = hw.cache(t_len);
        let mut out = vec![0.0; t_len * 5];
        hw.forward_seq(&x, t_len, &mut out, &mut cache);
        hw.backward_seq(&x, t_len, &cache, &c, &mut dx, &mut grads);

        let base = flatten(&[&hw.w, &hw.b, &hw.wt, &hw.bt]);
        let err_p = grad_check(
            &base,
            &flatten(&[&grads.w, &grads.b, &grads.wt, &grads.bt]),
            |vals| {
                let mut l = hw.clone();
                unflatten(vals, &mut [&mut l.w, &mut l.b, &mut l.wt, &mut l.bt]);
                forward_loss(&l, &x)
            },
            1e-5,
        );
        assert!(err_p < 1e-4, "highway param grad error {err_p}");
        let err_x = grad_check(&x, &dx, |xv| forward_loss(&hw, xv), 1e-5);
        assert!(err_x < 1e-4, "highway input grad error {err_x}");
    }

    fn lstm_param_list(l: &Lstm) -> Vec<&Tensor> {
        vec![
            &l.wi, &l.ui, &l.bi, &l.wf, &l.uf, &l.bf, &l.wo, &l.uo, &l.bo, &l.wg, &l.ug, &l.bg,
        ]
    }

    fn lstm_grad_error(t_len: usize, seed: u64) -> (f64, f64) {
        let mut rng = SplitMix64::new(seed);
        let lstm = Lstm::new(3, 4, &mut rng);
        let x = probe(t_len * 3, seed + 1);
        let c = probe(t_len * 4, seed + 2);
        let forward_loss = |l: &Lstm, xv: &[f64]| {
            let mut cache = l.cache(t_len);
            l.forward_seq(xv, t_len, &mut cache);
            dot(cache.h.data(), &c)
        };
        let mut cache = lstm.cache(t_len);
        lstm.forward_seq(&x, t_len, &mut cache);
        let mut grads = lstm.zeros_like();
        let mut dx = vec![0.0; t_len * 3];
        lstm.backward_seq(&x, t_len, &cache, &c, &mut dx, &mut grads);

        let base = flatten(&lstm_param_list(&lstm));
        let analytic = flatten(&lstm_param_list(&grads));
        let err_p = grad_check(
            &base,
            &analytic,
            |vals| {
                let mut l = lstm.clone();
                unflatten(
                    vals,
                    &mut [
                        &mut l.wi, &mut l.ui, &mut l.bi, &mut l.wf, &mut l.uf, &mut l.bf,
                        &mut l.wo, &mut l.uo, &mut l.bo, &mut l.wg, &mut l.ug, &mut l.bg,
                    ],
                );
                forward_loss(&l, &x)
            },
            1e-5,
        );
        let err_x = grad_check(&x, &dx, |xv| forward_loss(&lstm, xv), 1e-5);
        (err_p, err_x)
    }

    #[test]
    fn grad_lstm_short_sequence() {
        let (err_p, err_x) = lstm_grad_error(5, 41);
        assert!(err_p < 1e-4, "lstm param grad error {err_p}");
        assert!(err_x < 1e-4, "lstm input grad error {err_x}");
    }

    #[test]
    fn grad_lstm_long_sequence() {
        let (err_p, err_x) = lstm_grad_error(20, 47);
        assert!(err_p < 1e-3, "lstm param grad error {err_p}");
        assert!(err_x < 1e-3, "lstm input grad error {err_x}");
    }

    #[test]
    fn grad_dense_softmax_with_masked_ce() {
        let mut rng = SplitMix64::new(51);
        let dense = DenseSoftmax::new(6, 10, &mut rng);
        let t_len = 5;
        let x = probe(t_len * 6, 52);
        let target = encoded(&[2, 9, 1], t_len);
        let forward_loss = |l: &DenseSoftmax, xv: &[f64]| {
            let mut probs = vec![0.0; t_len * 10];
            l.forward_seq(xv, t_len, &mut probs);
            masked_crossentropy(&probs, 10, &target).unwrap()
        };
        let mut probs = vec![0.0; t_len * 10];
        dense.forward_seq(&x, t_len, &mut probs);
        let mut dlogits = vec![0.0; t_len * 10];
        masked_crossentropy_dlogits(&probs, 10, &target, &mut dlogits);
        let mut grads = dense.zeros_like();
        let mut dx = vec![0.0; t_len * 6];
        dense.backward_from_dlogits(&x, t_len, &dlogits, &mut dx, &mut grads);

        let base = flatten(&[&dense.w, &dense.b]);
        let err_p = grad_check(
            &base,
            &flatten(&[&grads.w, &grads.b]),
            |vals| {
                let mut l = dense.clone();
                unflatten(vals, &mut [&mut l.w, &mut l.b]);
                forward_loss(&l, &x)
            },
            1e-5,
        );
        assert!(err_p < 1e-4, "dense param grad error {err_p}");
        let err_x = grad_check(&x, &dx, |xv| forward_loss(&dense, xv), 1e-5);
        assert!(err_x < 1e-4, "dense input grad error {err_x}");
    }

    #[test]
    fn grad_softmax_general_backward() {
        let mut rng = SplitMix64::new(55);
        let dense = DenseSoftmax::new(4, 7, &mut rng);
        let t_len = 3;
        let x = probe(t_len * 4, 56);
        let c = probe(t_len * 7, 57);
        let forward_loss = |xv: &[f64]| {
            let mut probs = vec![0.0; t_len * 7];
            dense.forward_seq(xv, t_len, &mut probs);
            dot(&probs, &c)
        };
        let mut probs = vec![0.0; t_len * 7];
        dense.forward_seq(&x, t_len, &mut probs);
        let mut dlogits = vec![0.0; t_len * 7];
        for t in 0..t_len {
            softmax_backward_row(
                &probs[t * 7..(t + 1) * 7],
                &c[t * 7..(t + 1) * 7],
                &mut dlogits[t * 7..(t + 1) * 7],
            );
        }
        let mut grads = dense.zeros_like();
        let mut dx = vec![0.0; t_len * 4];
        dense.backward_from_dlogits(&x, t_len, &dlogits, &mut dx, &mut grads);
        let err = grad_check(&x, &dx, forward_loss, 1e-5);
        assert!(err < 1e-6, "softmax general backward error {err}");
    }

    #[test]
    fn grad_box_layer_axis_and_principal() {
        let mut rng = SplitMix64::new(61);
        for principal in [false, true] {
            let mut layer = BoxLayer::new(5, 4, &mut rng);
            layer.v_min = Tensor::from_vec(&[4], vec![-1.0, 0.0, -0.5, 0.2]);
            layer.v_max = Tensor::from_vec(&[4], vec![0.5, 2.0, 0.1, 0.9]);
            if principal {
                // a signed permutation is orthogonal, which is all the
                // rotation path needs exercised
                let axes = Tensor::from_vec(
                    &[4, 4],
                    vec![
                        0.0, 1.0, 0.0, 0.0, //
                        -1.0, 0.0, 0.0, 0.0, //
                        0.0, 0.0, 0.0, 1.0, //
                        0.0, 0.0, 1.0, 0.0,
                    ],
                );
                layer.rotation = Some(BoxRotation {
                    mean: Tensor::from_vec(&[4], vec![0.3, -0.2, 0.0, 1.0]),
                    axes,
                });
            }
            let u = probe(5, 62);
            let c = probe(4, 63);
            let forward_loss = |l: &BoxLayer| {
                let mut y = vec![0.0; 4];
                let mut cache = BoxCache { a: vec![] };
                l.forward(&u, &mut y, &mut cache);
                dot(&y, &c)
            };
            let mut cache = BoxCache { a: vec![] };
            let mut y = vec![0.0; 4];
            layer.forward(&u, &mut y, &mut cache);
            let mut grads = layer.zeros_like();
            layer.backward(&u, &cache, &c, &mut grads);

            let base = flatten(&[&layer.w, &layer.b]);
            let err = grad_check(
                &base,
                &flatten(&[&grads.w, &grads.b]),
                |vals| {
                    let mut l = layer.clone();
                    unflatten(vals, &mut [&mut l.w, &mut l.b]);
                    forward_loss(&l)
                },
                1e-5,
            );
            assert!(err < 1e-6, "box layer grad error {err} (principal={principal})");
        }
    }

    #[test]
    fn box_output_contained_in_box() {
        let mut rng = SplitMix64::new(65);
        let mut layer = BoxLayer::new(20, 8, &mut rng);
        for j in 0..8 {
            layer.v_min.data_mut()[j] = -(j as f64) - 0.5;
            layer.v_max.data_mut()[j] = j as f64 + 0.25;
        }
        let mut cache = BoxCache { a: vec![] };
        let mut y = vec![0.0; 8];
        for _ in 0..500 {
            let u: Vec<f64> = (0..20).map(|_| rng.next_f64()).collect();
            layer.forward(&u, &mut y, &mut cache);
            for j in 0..8 {
                assert!(y[j] >= layer.v_min.data()[j] && y[j] <= layer.v_max.data()[j]);
            }
        }
    }
}
