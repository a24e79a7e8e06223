//! The autoencoder repurposed as a GAN.
//!
//! After pretraining, the autoencoder weights freeze. The generator is the
//! decoder behind a box layer that maps a 20-number uniform seed into the
//! bounding box of benign embeddings; the discriminator is the encoder
//! behind a logistic-regression head. Rounds alternate one discriminator
//! epoch (benign vs a sample of the full generation history) with one
//! generator epoch (box layer trained toward the "valid domain" label
//! through a soft decode, since discrete sampling admits no gradient).

use crate::autoencoder::{sample_decoded, Autoencoder};
use crate::corpus::{encode, CharVocab, Corpus, DomainName, EncodedDomain, VOCAB_SIZE};
use crate::error::{Error, Result};
use crate::neural::eigen::symmetric_eigen;
use crate::neural::layers::{softmax_backward_row, BoxCache, BoxLayer, BoxRotation};
use crate::neural::tensor::{dot, sigmoid};
use crate::neural::{adam_step, AdamParams, AdamState, Tensor};
use crate::rng::SplitMix64;

pub const SEED_DIM: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoxMode {
    Axis,
    Principal,
}

/// Schedule and shape knobs for adversarial training.
#[derive(Debug, Clone)]
pub struct GanConfig {
    pub n_generate: usize,
    pub batch_size: usize,
    /// learning rate for the two trainable heads; the desk-scale schedule
    /// compresses the paper's many-batch rounds into few, so the default is
    /// hotter than the pretraining rate
    pub lr: f64,
    pub box_mode: BoxMode,
    pub disc_epochs: usize,
    pub gen_epochs: usize,
}

impl Default for GanConfig {
    fn default() -> Self {
        GanConfig {
            n_generate: 1280,
            batch_size: 128,
            lr: 0.01,
            box_mode: BoxMode::Axis,
            disc_epochs: 1,
            gen_epochs: 1,
        }
    }
}

/// Frozen autoencoder plus the trainable generator/discriminator heads and
/// the cross-round sample history.
pub struct GanState {
    pub autoencoder: Autoencoder,
    pub box_layer: BoxLayer,
    /// logistic-regression head on the encoder embedding; 1 = generated
    pub head_w: Tensor,
    pub head_b: f64,
    pub history: Vec<(u32, EncodedDomain)>,
    pub round: u32,
    pub rng_seed: u64,
    pub config: GanConfig,
    box_adam: AdamState,
    head_adam: AdamState,
    /// encoder embeddings of the benign corpus; exact cache because the
    /// encoder is frozen
    benign_embeddings: Vec<Vec<f64>>,
    /// embeddings of history entries, aligned with `history`
    history_embeddings: Vec<Vec<f64>>,
}

/// Per-dimension min/max corners (and principal rotation when asked) of the
/// benign embedding cloud.
pub fn fit_box(ae: &Autoencoder, benign: &Corpus, mode: BoxMode, seed: u64) -> Result<BoxLayer> {
    if benign.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let embeddings = embed_corpus(ae, benign);
    fit_box_from_embeddings(&embeddings, ae.cfg.hidden, mode, seed)
}

pub(crate) fn embed_corpus(ae: &Autoencoder, corpus: &Corpus) -> Vec<Vec<f64>> {
    let vocab = CharVocab::new();
    let mut state = ae.encode_state();
    corpus
        .entries
        .iter()
        .map(|d| ae.encode_domain(&encode(d, &vocab, ae.cfg.t), &mut state))
        .collect()
}

fn fit_box_from_embeddings(
    embeddings: &[Vec<f64>],
    hidden: usize,
    mode: BoxMode,
    seed: u64,
) -> Result<BoxLayer> {
    if embeddings.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let n = embeddings.len();
    let mut rng = SplitMix64::derive(seed, 0xB0);
    let mut layer = BoxLayer::new(SEED_DIM, hidden, &mut rng);
    match mode {
        BoxMode::Axis => {
            let vmin = layer.v_min.data_mut();
            vmin.copy_from_slice(&embeddings[0]);
            for e in embeddings {
                for j in 0..hidden {
                    vmin[j] = vmin[j].min(e[j]);
                }
            }
            let vmax = layer.v_max.data_mut();
            vmax.copy_from_slice(&embeddings[0]);
            for e in embeddings {
                for j in 0..hidden {
                    vmax[j] = vmax[j].max(e[j]);
                }
            }
        }
        BoxMode::Principal => {
            let mut mean = vec![0.0; hidden];
            for e in embeddings {
                for j in 0..hidden {
                    mean[j] += e[j];
                }
            }
            mean.iter_mut().for_each(|m| *m /= n as f64);
            // covariance-like scatter matrix of the centered cloud
            let mut scatter = vec![0.0; hidden * hidden];
            for e in embeddings {
                for i in 0..hidden {
                    let ci = e[i] - mean[i];
                    for j in i..hidden {
                        scatter[i * hidden + j] += ci * (e[j] - mean[j]);
                    }
                }
            }
            for i in 0..hidden {
                for j in 0..i {
                    scatter[i * hidden + j] = scatter[j * hidden + i];
                }
            }
            let (_, axes) = symmetric_eigen(&Tensor::from_vec(&[hidden, hidden], scatter));
            // project each centered embedding onto the axes and track extents
            let v = axes.data();
            let mut vmin = vec![f64::INFINITY; hidden];
            let mut vmax = vec![f64::NEG_INFINITY; hidden];
            for e in embeddings {
                for k in 0..hidden {
                    let p: f64 = (0..hidden).map(|i| (e[i] - mean[i]) * v[i * hidden + k]).sum();
                    vmin[k] = vmin[k].min(p);
                    vmax[k] = vmax[k].max(p);
                }
            }
            layer.v_min = Tensor::from_vec(&[hidden], vmin);
            layer.v_max = Tensor::from_vec(&[hidden], vmax);
            layer.rotation = Some(BoxRotation {
                mean: Tensor::from_vec(&[hidden], mean),
                axes,
            });
        }
    }
    Ok(layer)
}

impl GanState {
    /// Assemble a GAN from a pretrained autoencoder. Fits the box on the
    /// benign corpus and caches its embeddings (exact: the encoder is
    /// frozen from here on).
    pub fn new(
        autoencoder: Autoencoder,
        benign: &Corpus,
        config: GanConfig,
        rng_seed: u64,
    ) -> Result<Self> {
        if benign.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let benign_embeddings = embed_corpus(&autoencoder, benign);
        let box_layer = fit_box_from_embeddings(
            &benign_embeddings,
            autoencoder.cfg.hidden,
            config.box_mode,
            rng_seed,
        )?;
        let hidden = autoencoder.cfg.hidden;
        let head_w = Tensor::zeros(&[hidden]);
        let box_adam = AdamState::new(&[&box_layer.w, &box_layer.b]);
        let head_adam = AdamState::new(&[&head_w, &Tensor::zeros(&[1])]);
        Ok(GanState {
            autoencoder,
            box_layer,
            head_w,
            head_b: 0.0,
            history: Vec::new(),
            round: 0,
            rng_seed,
            config,
            box_adam,
            head_adam,
            benign_embeddings,
            history_embeddings: Vec::new(),
        })
    }

    /// Assemble from already-fitted parts (weights reload): no box fit, and
    /// the benign embedding cache fills on the first training round.
    pub fn from_parts(autoencoder: Autoencoder, config: GanConfig, rng_seed: u64) -> Result<Self> {
        let hidden = autoencoder.cfg.hidden;
        let mut rng = SplitMix64::derive(rng_seed, 0xB0);
        let box_layer = BoxLayer::new(SEED_DIM, hidden, &mut rng);
        let head_w = Tensor::zeros(&[hidden]);
        let box_adam = AdamState::new(&[&box_layer.w, &box_layer.b]);
        let head_adam = AdamState::new(&[&head_w, &Tensor::zeros(&[1])]);
        Ok(GanState {
            autoencoder,
            box_layer,
            head_w,
            head_b: 0.0,
            history: Vec::new(),
            round: 0,
            rng_seed,
            config,
            box_adam,
            head_adam,
            benign_embeddings: Vec::new(),
            history_embeddings: Vec::new(),
        })
    }

    /// sigma(w . encode(d) + b); 1 = generated, 0 = valid domain.
    pub fn discriminator_score(&self, d: &DomainName) -> f64 {
        let vocab = CharVocab::new();
        let mut state = self.autoencoder.encode_state();
        let e = encode(d, &vocab, self.autoencoder.cfg.t);
        let emb = self.autoencoder.encode_domain(&e, &mut state);
        self.score_embedding(&emb)
    }

    pub fn score_embedding(&self, embedding: &[f64]) -> f64 {
        sigmoid(dot(self.head_w.data(), embedding) + self.head_b)
    }
}

/// Generate domains from seeded uniform draws: 20 numbers -> box layer ->
/// decoder -> per-step multinomial sampling, all from one stream, so the
/// output is byte-identical for identical (state, seed).
pub fn generate(state: &GanState, count: usize, seed: u64) -> Result<Vec<DomainName>> {
    let ae = &state.autoencoder;
    let vocab = CharVocab::new();
    let mut stream = SplitMix64::derive(seed, 0x9e4);
    let mut dec = ae.decode_state();
    let mut cache = BoxCache { a: vec![] };
    let mut emb = vec![0.0; ae.cfg.hidden];
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let u: Vec<f64> = (0..SEED_DIM).map(|_| stream.next_f64()).collect();
        state.box_layer.forward(&u, &mut emb, &mut cache);
        ae.decode(&emb, &mut dec)?;
        out.push(sample_decoded(&dec.probs, ae.cfg.t, &vocab, &mut stream));
    }
    Ok(out)
}

/// Draw `count` history indices: whole passes over the history plus a
/// without-replacement remainder, covering the "sample from all rounds"
/// regularization even while the history is still shorter than the benign
/// stream.
fn sample_history_indices(history_len: usize, count: usize, rng: &mut SplitMix64) -> Vec<usize> {
    let mut picks = Vec::with_capacity(count);
    let full_passes = count / history_len;
    for _ in 0..full_passes {
        picks.extend(0..history_len);
    }
    let remainder = count - full_passes * history_len;
    picks.extend(rng.sample_indices(history_len, remainder));
    picks
}

/// One adversarial round: generate and record samples, train the logistic
/// head on benign vs history, then train the box layer toward the valid
/// label through the soft decode path.
pub fn adversarial_round(state: &mut GanState, n_generate: usize, benign: &Corpus) -> Result<()> {
    if benign.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if state.benign_embeddings.is_empty() {
        state.benign_embeddings = embed_corpus(&state.autoencoder, benign);
    } else if state.benign_embeddings.len() != benign.len() {
        return Err(Error::Shape(format!(
            "benign corpus changed size ({} cached vs {})",
            state.benign_embeddings.len(),
            benign.len()
        )));
    }
    let vocab = CharVocab::new();
    let round = state.round;
    let cfg = state.config.clone();
    let hidden = state.autoencoder.cfg.hidden;
    let adam_hp = AdamParams::with_lr(cfg.lr);

    // 1. generate this round's samples and append them to the history
    let samples = generate(state, n_generate, SplitMix64::derive(state.rng_seed, round as u64).next_u64())?;
    {
        let mut enc_state = state.autoencoder.encode_state();
        for d in &samples {
            let e = encode(d, &vocab, state.autoencoder.cfg.t);
            let emb = state.autoencoder.encode_domain(&e, &mut enc_state);
            state.history.push((round, e));
            state.history_embeddings.push(emb);
        }
    }

    // 2. one epoch of binary cross-entropy for the head: benign (0) vs an
    //    equal-size uniform sample from the full history (1)
    let mut rng = SplitMix64::derive(state.rng_seed, 0xD15C ^ round as u64);
    for _ in 0..cfg.disc_epochs {
        let n = benign.len();
        let fake_picks = sample_history_indices(state.history.len(), n, &mut rng);
        let mut order: Vec<(usize, bool)> = (0..n)
            .map(|i| (i, false))
            .chain(fake_picks.iter().map(|&i| (i, true)))
            .collect();
        rng.shuffle(&mut order);
        for batch in order.chunks(cfg.batch_size) {
            let scale = 1.0 / batch.len() as f64;
            let mut dw = Tensor::zeros(&[hidden]);
            let mut db = Tensor::zeros(&[1]);
            for &(idx, fake) in batch {
                let emb = if fake {
                    &state.history_embeddings[idx]
                } else {
                    &state.benign_embeddings[idx]
                };
                let p = sigmoid(dot(state.head_w.data(), emb) + state.head_b);
                let dz = (p - if fake { 1.0 } else { 0.0 }) * scale;
                for j in 0..hidden {
                    dw.data_mut()[j] += dz * emb[j];
                }
                db.data_mut()[0] += dz;
            }
            let mut head_b = Tensor::from_vec(&[1], vec![state.head_b]);
            adam_step(
                &mut [&mut state.head_w, &mut head_b],
                &[&dw, &db],
                &mut state.head_adam,
                &adam_hp,
            )?;
            state.head_b = head_b.data()[0];
        }
    }

    // 3. one epoch for the box layer toward label 0 on fresh seeds, with
    //    gradients crossing the sampling step via the soft decode
    let mut seed_rng = SplitMix64::derive(state.rng_seed, 0x6E40 ^ round as u64);
    let t_len = state.autoencoder.cfg.t;
    for _ in 0..cfg.gen_epochs {
        let steps = (n_generate / cfg.batch_size).max(1);
        for _ in 0..steps {
            let mut box_grads = state.box_layer.zeros_like();
            let scale = 1.0 / cfg.batch_size as f64;
            let mut scratch = state.autoencoder.zeros_like();
            let mut dec = state.autoencoder.decode_state();
            let mut enc = state.autoencoder.encode_state();
            let mut cache = BoxCache { a: vec![] };
            let mut emb = vec![0.0; hidden];
            for _ in 0..cfg.batch_size {
                let u: Vec<f64> = (0..SEED_DIM).map(|_| seed_rng.next_f64()).collect();
                state.box_layer.forward(&u, &mut emb, &mut cache);
                state.autoencoder.decode(&emb, &mut dec)?;
                let emb2 = state.autoencoder.encode_soft(&dec.probs, &mut enc);
                let z = dot(state.head_w.data(), &emb2) + state.head_b;
                // BCE toward 0: dL/dz = sigma(z)
                let dz = sigmoid(z) * scale;
                let mut d_emb2 = vec![0.0; hidden];
                for j in 0..hidden {
                    d_emb2[j] = dz * state.head_w.data()[j];
                }
                let d_x_emb = state.autoencoder.encode_backward(&enc, &d_emb2, &mut scratch);
                let mut dprobs = vec![0.0; t_len * VOCAB_SIZE];
                state
                    .autoencoder
                    .embedding
                    .backward_soft(&dec.probs, t_len, &d_x_emb, &mut dprobs);
                let mut dlogits = vec![0.0; t_len * VOCAB_SIZE];
                for t in 0..t_len {
                    softmax_backward_row(
                        &dec.probs[t * VOCAB_SIZE..(t + 1) * VOCAB_SIZE],
                        &dprobs[t * VOCAB_SIZE..(t + 1) * VOCAB_SIZE],
                        &mut dlogits[t * VOCAB_SIZE..(t + 1) * VOCAB_SIZE],
                    );
                }
                let d_emb = state.autoencoder.decode_backward(&dec, &dlogits, &mut scratch);
                state.box_layer.backward(&u, &cache, &d_emb, &mut box_grads);
            }
            adam_step(
                &mut [&mut state.box_layer.w, &mut state.box_layer.b],
                &[&box_grads.w, &box_grads.b],
                &mut state.box_adam,
                &adam_hp,
            )?;
        }
    }

    state.round += 1;
    Ok(())
}

/// Outcome of the full pipeline: final state plus the per-round samples.
pub struct DeepDgaRun {
    pub state: GanState,
    pub per_round_samples: Vec<Vec<DomainName>>,
}

/// pretrain -> fit box -> `rounds` adversarial rounds. The caller hands in
/// the pretrained autoencoder so the pretraining schedule stays separate.
pub fn run_rounds(
    autoencoder: Autoencoder,
    benign: &Corpus,
    rounds: usize,
    config: GanConfig,
    seed: u64,
) -> Result<DeepDgaRun> {
    let mut state = GanState::new(autoencoder, benign, config, seed)?;
    let mut per_round_samples = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        let start = state.history.len();
        let n_generate = state.config.n_generate;
        adversarial_round(&mut state, n_generate, benign)?;
        let vocab = CharVocab::new();
        let round_samples = state.history[start..]
            .iter()
            .map(|(_, e)| crate::corpus::decode_indices(e, &vocab))
            .collect::<Result<Vec<_>>>()?;
        per_round_samples.push(round_samples);
    }
    Ok(DeepDgaRun {
        state,
        per_round_samples,
    })
}

/// FNV fingerprint of every autoencoder parameter's bit pattern; the freeze
/// invariant asserts this never changes across rounds.
pub fn autoencoder_fingerprint(ae: &Autoencoder) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for t in ae.params() {
        for &x in t.data() {
            h ^= x.to_bits();
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    h
}

/// Full pipeline: pretrain the autoencoder, assemble the GAN, run rounds.
pub fn run_deepdga(
    benign: &Corpus,
    ae_cfg: crate::autoencoder::AeConfig,
    pretrain_cfg: &crate::autoencoder::PretrainConfig,
    gan_cfg: GanConfig,
    rounds: usize,
    seed: u64,
) -> Result<(DeepDgaRun, Vec<f64>)> {
    let outcome = crate::autoencoder::pretrain_autoencoder(benign, ae_cfg, pretrain_cfg, seed)?;
    let run = run_rounds(outcome.model, benign, rounds, gan_cfg, seed)?;
    Ok((run, outcome.loss_curve))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autoencoder::{pretrain_autoencoder, AeConfig, PretrainConfig};
    use crate::corpus::CorpusLabel;
    use crate::neural::AdamParams;

    fn tiny_cfg() -> AeConfig {
        AeConfig {
            t: 12,
            embed_dim: 6,
            hidden: 8,
            n_bigram: 4,
            n_trigram: 2,
            tie_decoder_conv: false,
        }
    }

    fn word_corpus() -> Corpus {
        let entries = [
            "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "theta", "iota", "kappa",
            "lambda", "sigma", "omega", "window", "garden", "stream", "planet", "bridge",
            "forest", "market", "silver",
        ]
        .iter()
        .map(|s| DomainName::new(*s).unwrap())
        .collect();
        Corpus::new(entries, "words", CorpusLabel::Benign)
    }

    fn tiny_pretrained() -> Autoencoder {
        pretrain_autoencoder(
            &word_corpus(),
            tiny_cfg(),
            &PretrainConfig {
                epochs: 3,
                batch_size: 8,
                samples_per_epoch: 64,
                adam: AdamParams::default(),
            },
            11,
        )
        .unwrap()
        .model
    }

    #[test]
    fn fit_box_degenerate_single_domain() {
        let ae = Autoencoder::new(tiny_cfg(), 2);
        let one = Corpus::new(
            vec![DomainName::new("alpha").unwrap()],
            "one",
            CorpusLabel::Benign,
        );
        let layer = fit_box(&ae, &one, BoxMode::Axis, 0).unwrap();
        assert_eq!(layer.v_min, layer.v_max);
        let emb = embed_corpus(&ae, &one);
        for j in 0..8 {
            assert!((layer.v_min.data()[j] - emb[0][j]).abs() < 1e-12);
        }
    }

    #[test]
    fn fit_box_contains_all_training_embeddings() {
        let ae = Autoencoder::new(tiny_cfg(), 3);
        let corpus = word_corpus();
        let layer = fit_box(&ae, &corpus, BoxMode::Axis, 0).unwrap();
        for e in embed_corpus(&ae, &corpus) {
            for j in 0..8 {
                assert!(e[j] >= layer.v_min.data()[j] - 1e-12);
                assert!(e[j] <= layer.v_max.data()[j] + 1e-12);
            }
        }
    }

    #[test]
    fn principal_box_two_points_is_a_segment() {
        let ae = Autoencoder::new(tiny_cfg(), 4);
        let two = Corpus::new(
            vec![
                DomainName::new("alpha").unwrap(),
                DomainName::new("window").unwrap(),
            ],
            "two",
            CorpusLabel::Benign,
        );
        let embeddings = embed_corpus(&ae, &two);
        let (e1, e2) = (&embeddings[0], &embeddings[1]);
        let layer = fit_box(&ae, &two, BoxMode::Principal, 0).unwrap();

        // hand-computed picture: centered points are +/- (e1 - e2)/2, so the
        // only nonzero extent is along (e1 - e2); every generated embedding
        // must land on the segment between e1 and e2
        let mut rng = SplitMix64::new(9);
        let mut cache = BoxCache { a: vec![] };
        let mut y = vec![0.0; 8];
        let diff: Vec<f64> = e1.iter().zip(e2).map(|(a, b)| a - b).collect();
        let diff_norm2 = dot(&diff, &diff);
        for _ in 0..50 {
            let u: Vec<f64> = (0..SEED_DIM).map(|_| rng.next_f64()).collect();
            layer.forward(&u, &mut y, &mut cache);
            // project y - e2 onto diff: coefficient must be in [0, 1], and
            // the orthogonal residual must vanish
            let rel: Vec<f64> = y.iter().zip(e2).map(|(a, b)| a - b).collect();
            let coeff = dot(&rel, &diff) / diff_norm2;
            assert!((-1e-9..=1.0 + 1e-9).contains(&coeff), "coeff {coeff}");
            let mut ortho2 = 0.0;
            for j in 0..8 {
                let r = rel[j] - coeff * diff[j];
                ortho2 += r * r;
            }
            assert!(ortho2.sqrt() < 1e-9, "off-segment distance {}", ortho2.sqrt());
        }
    }

    #[test]
    fn generate_is_reproducible_and_valid() {
        let ae = tiny_pretrained();
        let state = GanState::new(ae, &word_corpus(), GanConfig::default(), 5).unwrap();
        let a = generate(&state, 100, 42).unwrap();
        let b = generate(&state, 100, 42).unwrap();
        assert_eq!(a, b);
        for d in &a {
            assert!(!d.as_str().is_empty());
            assert!(d.len() <= 12);
        }
        let c = generate(&state, 100, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn discriminator_score_contract() {
        let ae = tiny_pretrained();
        let state = GanState::new(ae, &word_corpus(), GanConfig::default(), 6).unwrap();
        // zero head weights score 0.5 for anything
        let d = DomainName::new("whatever").unwrap();
        assert_eq!(state.discriminator_score(&d), 0.5);
    }

    #[test]
    fn round_updates_history_and_freezes_autoencoder() {
        let ae = tiny_pretrained();
        let benign = word_corpus();
        let cfg = GanConfig {
            n_generate: 32,
            batch_size: 8,
            ..GanConfig::default()
        };
        let mut state = GanState::new(ae, &benign, cfg, 7).unwrap();
        let fp_before = autoencoder_fingerprint(&state.autoencoder);
        adversarial_round(&mut state, 32, &benign).unwrap();
        assert_eq!(state.round, 1);
        assert_eq!(state.history.len(), 32);
        adversarial_round(&mut state, 32, &benign).unwrap();
        assert_eq!(state.round, 2);
        assert_eq!(state.history.len(), 64);
        assert_eq!(autoencoder_fingerprint(&state.autoencoder), fp_before);
        // rounds recorded against their generation round index
        assert!(state.history[..32].iter().all(|(r, _)| *r == 0));
        assert!(state.history[32..].iter().all(|(r, _)| *r == 1));
    }

    #[test]
    fn head_learns_separation_after_one_round() {
        let ae = tiny_pretrained();
        let benign = word_corpus();
        let cfg = GanConfig {
            n_generate: 64,
            batch_size: 8,
            lr: 0.05,
            ..GanConfig::default()
        };
        let mut state = GanState::new(ae, &benign, cfg, 8).unwrap();
        adversarial_round(&mut state, 64, &benign).unwrap();
        let mean_real: f64 = benign
            .entries
            .iter()
            .map(|d| state.discriminator_score(d))
            .sum::<f64>()
            / benign.len() as f64;
        let vocab = CharVocab::new();
        let mean_fake: f64 = state
            .history
            .iter()
            .map(|(_, e)| {
                let d = crate::corpus::decode_indices(e, &vocab).unwrap();
                state.discriminator_score(&d)
            })
            .sum::<f64>()
            / state.history.len() as f64;
        assert!(
            mean_real < mean_fake,
            "real {mean_real:.3} should score below fake {mean_fake:.3}"
        );
    }

    #[test]
    fn run_rounds_zero_is_a_noop_pipeline() {
        let ae = tiny_pretrained();
        let run = run_rounds(ae, &word_corpus(), 0, GanConfig::default(), 9).unwrap();
        assert_eq!(run.state.round, 0);
        assert!(run.state.history.is_empty());
        assert!(run.per_round_samples.is_empty());
    }

    #[test]
    fn per_round_sample_counts() {
        let ae = tiny_pretrained();
        let cfg = GanConfig {
            n_generate: 16,
            batch_size: 8,
            ..GanConfig::default()
        };
        let run = run_rounds(ae, &word_corpus(), 2, cfg, 10).unwrap();
        assert_eq!(run.per_round_samples.len(), 2);
        assert!(run.per_round_samples.iter().all(|s| s.len() == 16));
        assert_eq!(run.state.history.len(), 32);
    }
}
