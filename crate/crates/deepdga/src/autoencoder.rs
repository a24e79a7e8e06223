//! The character-level domain autoencoder.
//!
//! Encoder: embedding -> conv bank -> dual max-pool -> time-shared highway
//! -> LSTM, whose final emission is the domain embedding. Decoder: the
//! embedding repeated over all time steps -> LSTM -> time-shared highway ->
//! conv bank -> dual max-pool -> time-distributed dense softmax. The decoder
//! LSTM's hidden size equals the character embedding width, which makes the
//! decoder conv bank the exact shape of the encoder's (and weight-tying a
//! flag rather than a surgery).

use crate::corpus::{encode, CharVocab, Corpus, DomainName, EncodedDomain, PAD, VOCAB_SIZE};
use crate::error::{Error, Result};
use crate::neural::layers::{
    dual_maxpool, dual_maxpool_backward, masked_crossentropy_dlogits,
    masked_crossentropy_unchecked, ConvBank, DenseSoftmax, Embedding, Highway, HighwayCache,
    Lstm, LstmCache, PoolCache,
};
use crate::neural::{adam_step, AdamParams, AdamState, Tensor};
use crate::rng::SplitMix64;

/// Architecture hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AeConfig {
    /// fixed sequence length
    pub t: usize,
    /// character embedding width (d)
    pub embed_dim: usize,
    /// encoder LSTM hidden size = domain embedding size (H)
    pub hidden: usize,
    pub n_bigram: usize,
    pub n_trigram: usize,
    /// share the encoder's conv filters on the decoder side
    pub tie_decoder_conv: bool,
}

impl Default for AeConfig {
    fn default() -> Self {
        AeConfig {
            t: crate::corpus::MAX_DOMAIN_LEN,
            embed_dim: 20,
            hidden: 64,
            n_bigram: 20,
            n_trigram: 10,
            tie_decoder_conv: false,
        }
    }
}

impl AeConfig {
    /// pooled feature width per step: one channel per filter plus the two
    /// per-step group maxima
    pub fn pool_dim(&self) -> usize {
        self.n_bigram + self.n_trigram + 2
    }
}

#[derive(Debug, Clone)]
pub struct Autoencoder {
    pub cfg: AeConfig,
    pub embedding: Embedding,
    pub enc_conv: ConvBank,
    pub enc_highway: Highway,
    pub enc_lstm: Lstm,
    pub dec_lstm: Lstm,
    pub dec_highway: Highway,
    pub dec_conv: ConvBank,
    pub dec_dense: DenseSoftmax,
}

/// Forward caches for one encoded sequence.
#[derive(Debug, Clone)]
pub struct EncodeState {
    pub x_emb: Vec<f64>,
    pub conv_out: Vec<f64>,
    pub pool_out: Vec<f64>,
    pub pool_cache: PoolCache,
    pub hw_out: Vec<f64>,
    pub hw_cache: HighwayCache,
    pub lstm_cache: LstmCache,
}

#[derive(Debug, Clone)]
pub struct DecodeState {
    pub dec_in: Vec<f64>,
    pub lstm_cache: LstmCache,
    pub hw_out: Vec<f64>,
    pub hw_cache: HighwayCache,
    pub conv_out: Vec<f64>,
    pub pool_out: Vec<f64>,
    pub pool_cache: PoolCache,
    pub probs: Vec<f64>,
}

impl Autoencoder {
    pub fn new(cfg: AeConfig, seed: u64) -> Self {
        let mut rng = SplitMix64::derive(seed, 0xAE);
        let p = cfg.pool_dim();
        Autoencoder {
            embedding: Embedding::new(VOCAB_SIZE, cfg.embed_dim, &mut rng),
            enc_conv: ConvBank::new(cfg.n_bigram, cfg.n_trigram, cfg.embed_dim, &mut rng),
            enc_highway: Highway::new(p, &mut rng),
            enc_lstm: Lstm::new(p, cfg.hidden, &mut rng),
            dec_lstm: Lstm::new(cfg.hidden, cfg.embed_dim, &mut rng),
            dec_highway: Highway::new(cfg.embed_dim, &mut rng),
            dec_conv: ConvBank::new(cfg.n_bigram, cfg.n_trigram, cfg.embed_dim, &mut rng),
            dec_dense: DenseSoftmax::new(p, VOCAB_SIZE, &mut rng),
            cfg,
        }
    }

    /// Gradient container with the same shapes, all zeros.
    pub fn zeros_like(&self) -> Self {
        Autoencoder {
            cfg: self.cfg.clone(),
            embedding: self.embedding.zeros_like(),
            enc_conv: self.enc_conv.zeros_like(),
            enc_highway: self.enc_highway.zeros_like(),
            enc_lstm: self.enc_lstm.zeros_like(),
            dec_lstm: self.dec_lstm.zeros_like(),
            dec_highway: self.dec_highway.zeros_like(),
            dec_conv: self.dec_conv.zeros_like(),
            dec_dense: self.dec_dense.zeros_like(),
        }
    }

    /// Named parameter tensors in the fixed crate-wide order.
    pub fn param_names(&self) -> Vec<String> {
        let mut names = vec!["embedding.table".to_string()];
        for (prefix, kind) in [
            ("enc_conv", "conv"),
            ("enc_highway", "highway"),
            ("enc_lstm", "lstm"),
            ("dec_lstm", "lstm"),
            ("dec_highway", "highway"),
            ("dec_conv", "conv"),
            ("dec_dense", "dense"),
        ] {
            let fields: &[&str] = match kind {
                "conv" => &["w2", "b2", "w3", "b3"],
                "highway" => &["w", "b", "wt", "bt"],
                "lstm" => &["wi", "ui", "bi", "wf", "uf", "bf", "wo", "uo", "bo", "wg", "ug", "bg"],
                _ => &["w", "b"],
            };
            for f in fields {
                names.push(format!("{prefix}.{f}"));
            }
        }
        names
    }

    pub fn params(&self) -> Vec<&Tensor> {
        let mut p: Vec<&Tensor> = vec![&self.embedding.table];
        for bank in [&self.enc_conv] {
            p.extend([&bank.w2, &bank.b2, &bank.w3, &bank.b3]);
        }
        p.extend([&self.enc_highway.w, &self.enc_highway.b, &self.enc_highway.wt, &self.enc_highway.bt]);
        for l in [&self.enc_lstm, &self.dec_lstm] {
            p.extend([
                &l.wi, &l.ui, &l.bi, &l.wf, &l.uf, &l.bf, &l.wo, &l.uo, &l.bo, &l.wg, &l.ug, &l.bg,
            ]);
        }
        p.extend([&self.dec_highway.w, &self.dec_highway.b, &self.dec_highway.wt, &self.dec_highway.bt]);
        p.extend([&self.dec_conv.w2, &self.dec_conv.b2, &self.dec_conv.w3, &self.dec_conv.b3]);
        p.extend([&self.dec_dense.w, &self.dec_dense.b]);
        p
    }

    pub fn params_mut(&mut self) -> Vec<&mut Tensor> {
        let mut p: Vec<&mut Tensor> = vec![&mut self.embedding.table];
        p.extend([
            &mut self.enc_conv.w2,
            &mut self.enc_conv.b2,
            &mut self.enc_conv.w3,
            &mut self.enc_conv.b3,
        ]);
        p.extend([
            &mut self.enc_highway.w,
            &mut self.enc_highway.b,
            &mut self.enc_highway.wt,
            &mut self.enc_highway.bt,
        ]);
        for l in [&mut self.enc_lstm, &mut self.dec_lstm] {
            p.extend([
                &mut l.wi, &mut l.ui, &mut l.bi, &mut l.wf, &mut l.uf, &mut l.bf, &mut l.wo,
                &mut l.uo, &mut l.bo, &mut l.wg, &mut l.ug, &mut l.bg,
            ]);
        }
        p.extend([
            &mut self.dec_highway.w,
            &mut self.dec_highway.b,
            &mut self.dec_highway.wt,
            &mut self.dec_highway.bt,
        ]);
        p.extend([
            &mut self.dec_conv.w2,
            &mut self.dec_conv.b2,
            &mut self.dec_conv.w3,
            &mut self.dec_conv.b3,
        ]);
        p.extend([&mut self.dec_dense.w, &mut self.dec_dense.b]);
        p
    }

    pub fn encode_state(&self) -> EncodeState {
        let t = self.cfg.t;
        let d = self.cfg.embed_dim;
        let f = self.cfg.n_bigram + self.cfg.n_trigram;
        let p = self.cfg.pool_dim();
        EncodeState {
            x_emb: vec![0.0; t * d],
            conv_out: vec![0.0; t * f],
            pool_out: vec![0.0; t * p],
            pool_cache: PoolCache {
                time_argmax: vec![],
                filter_argmax: vec![],
            },
            hw_out: vec![0.0; t * p],
            hw_cache: self.enc_highway.cache(t),
            lstm_cache: self.enc_lstm.cache(t),
        }
    }

    pub fn decode_state(&self) -> DecodeState {
        let t = self.cfg.t;
        let d = self.cfg.embed_dim;
        let f = self.cfg.n_bigram + self.cfg.n_trigram;
        let p = self.cfg.pool_dim();
        DecodeState {
            dec_in: vec![0.0; t * self.cfg.hidden],
            lstm_cache: self.dec_lstm.cache(t),
            hw_out: vec![0.0; t * d],
            hw_cache: self.dec_highway.cache(t),
            conv_out: vec![0.0; t * f],
            pool_out: vec![0.0; t * p],
            pool_cache: PoolCache {
                time_argmax: vec![],
                filter_argmax: vec![],
            },
            probs: vec![0.0; t * VOCAB_SIZE],
        }
    }

    fn encode_from_emb(&self, state: &mut EncodeState) -> Vec<f64> {
        let t = self.cfg.t;
        self.enc_conv.forward(&state.x_emb, t, &mut state.conv_out);
        dual_maxpool(
            &state.conv_out,
            t,
            self.cfg.n_bigram,
            self.cfg.n_trigram,
            &mut state.pool_out,
            &mut state.pool_cache,
        );
        self.enc_highway
            .forward_seq(&state.pool_out, t, &mut state.hw_out, &mut state.hw_cache);
        self.enc_lstm.forward_seq(&state.hw_out, t, &mut state.lstm_cache);
        let h = self.cfg.hidden;
        state.lstm_cache.h.data()[(t - 1) * h..t * h].to_vec()
    }

    /// Encode a hard symbol sequence into the domain embedding.
    pub fn encode_domain(&self, e: &EncodedDomain, state: &mut EncodeState) -> Vec<f64> {
        self.embedding.forward(&e.indices, &mut state.x_emb);
        self.encode_from_emb(state)
    }

    /// Encode per-step symbol distributions (the generator's soft path).
    pub fn encode_soft(&self, probs: &[f64], state: &mut EncodeState) -> Vec<f64> {
        self.embedding.forward_soft(probs, self.cfg.t, &mut state.x_emb);
        self.encode_from_emb(state)
    }

    /// Decode an embedding into per-step symbol distributions.
    pub fn decode(&self, embedding_vec: &[f64], state: &mut DecodeState) -> Result<()> {
        let t = self.cfg.t;
        let h = self.cfg.hidden;
        if embedding_vec.len() != h {
            return Err(Error::Shape(format!(
                "embedding has {} dims, expected {h}",
                embedding_vec.len()
            )));
        }
        for step in 0..t {
            state.dec_in[step * h..(step + 1) * h].copy_from_slice(embedding_vec);
        }
        self.dec_lstm.forward_seq(&state.dec_in, t, &mut state.lstm_cache);
        self.dec_highway.forward_seq(
            state.lstm_cache.h.data(),
            t,
            &mut state.hw_out,
            &mut state.hw_cache,
        );
        let conv = if self.cfg.tie_decoder_conv {
            &self.enc_conv
        } else {
            &self.dec_conv
        };
        conv.forward(&state.hw_out, t, &mut state.conv_out);
        dual_maxpool(
            &state.conv_out,
            t,
            self.cfg.n_bigram,
            self.cfg.n_trigram,
            &mut state.pool_out,
            &mut state.pool_cache,
        );
        self.dec_dense.forward_seq(&state.pool_out, t, &mut state.probs);
        Ok(())
    }

    /// Backward through the decoder from dL/dlogits; returns dL/dembedding.
    pub fn decode_backward(
        &self,
        state: &DecodeState,
        dlogits: &[f64],
        grads: &mut Autoencoder,
    ) -> Vec<f64> {
        let t = self.cfg.t;
        let d = self.cfg.embed_dim;
        let f = self.cfg.n_bigram + self.cfg.n_trigram;
        let p = self.cfg.pool_dim();
        let h = self.cfg.hidden;

        let mut d_pool = vec![0.0; t * p];
        self.dec_dense.backward_from_dlogits(
            &state.pool_out,
            t,
            dlogits,
            &mut d_pool,
            &mut grads.dec_dense,
        );
        let mut d_conv = vec![0.0; t * f];
        dual_maxpool_backward(
            &d_pool,
            t,
            self.cfg.n_bigram,
            self.cfg.n_trigram,
            &state.pool_cache,
            &mut d_conv,
        );
        let mut d_hw = vec![0.0; t * d];
        if self.cfg.tie_decoder_conv {
            self.enc_conv
                .backward(&state.hw_out, t, &d_conv, &mut d_hw, &mut grads.enc_conv);
        } else {
            self.dec_conv
                .backward(&state.hw_out, t, &d_conv, &mut d_hw, &mut grads.dec_conv);
        }
        let mut d_hdec = vec![0.0; t * d];
        self.dec_highway.backward_seq(
            state.lstm_cache.h.data(),
            t,
            &state.hw_cache,
            &d_hw,
            &mut d_hdec,
            &mut grads.dec_highway,
        );
        let mut d_dec_in = vec![0.0; t * h];
        self.dec_lstm.backward_seq(
            &state.dec_in,
            t,
            &state.lstm_cache,
            &d_hdec,
            &mut d_dec_in,
            &mut grads.dec_lstm,
        );
        // the embedding was broadcast over time, so its gradient is the sum
        let mut d_emb = vec![0.0; h];
        for step in 0..t {
            for j in 0..h {
                d_emb[j] += d_dec_in[step * h + j];
            }
        }
        d_emb
    }

    /// Backward through the encoder from dL/dembedding; returns dL/dx_emb
    /// (the character-embedding rows), leaving the embedding-table or
    /// soft-probability step to the caller.
    pub fn encode_backward(
        &self,
        state: &EncodeState,
        d_emb: &[f64],
        grads: &mut Autoencoder,
    ) -> Vec<f64> {
        let t = self.cfg.t;
        let d = self.cfg.embed_dim;
        let f = self.cfg.n_bigram + self.cfg.n_trigram;
        let p = self.cfg.pool_dim();
        let h = self.cfg.hidden;

        let mut dh_seq = vec![0.0; t * h];
        dh_seq[(t - 1) * h..t * h].copy_from_slice(d_emb);
        let mut d_hw = vec![0.0; t * p];
        self.enc_lstm.backward_seq(
            &state.hw_out,
            t,
            &state.lstm_cache,
            &dh_seq,
            &mut d_hw,
            &mut grads.enc_lstm,
        );
        let mut d_pool = vec![0.0; t * p];
        self.enc_highway.backward_seq(
            &state.pool_out,
            t,
            &state.hw_cache,
            &d_hw,
            &mut d_pool,
            &mut grads.enc_highway,
        );
        let mut d_conv = vec![0.0; t * f];
        dual_maxpool_backward(
            &d_pool,
            t,
            self.cfg.n_bigram,
            self.cfg.n_trigram,
            &state.pool_cache,
            &mut d_conv,
        );
        let mut d_x_emb = vec![0.0; t * d];
        self.enc_conv
            .backward(&state.x_emb, t, &d_conv, &mut d_x_emb, &mut grads.enc_conv);
        d_x_emb
    }

    /// Full reconstruction pass; returns the masked cross-entropy loss and
    /// accumulates parameter gradients (scaled by `grad_scale`).
    pub fn reconstruction_step(
        &self,
        example: &EncodedDomain,
        enc: &mut EncodeState,
        dec: &mut DecodeState,
        grads: &mut Autoencoder,
        grad_scale: f64,
    ) -> Result<f64> {
        let emb = self.encode_domain(example, enc);
        self.decode(&emb, dec)?;
        let loss = masked_crossentropy_unchecked(&dec.probs, VOCAB_SIZE, example);
        let mut dlogits = vec![0.0; self.cfg.t * VOCAB_SIZE];
        masked_crossentropy_dlogits(&dec.probs, VOCAB_SIZE, example, &mut dlogits);
        if grad_scale != 1.0 {
            dlogits.iter_mut().for_each(|v| *v *= grad_scale);
        }
        let d_emb = self.decode_backward(dec, &dlogits, grads);
        let d_x_emb = self.encode_backward(enc, &d_emb, grads);
        self.embedding
            .backward(&example.indices, &d_x_emb, &mut grads.embedding);
        Ok(loss)
    }
}

/// Training-schedule knobs for pretraining.
#[derive(Debug, Clone)]
pub struct PretrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub samples_per_epoch: usize,
    pub adam: AdamParams,
}

impl Default for PretrainConfig {
    fn default() -> Self {
        PretrainConfig {
            epochs: 30,
            batch_size: 128,
            samples_per_epoch: 2560,
            adam: AdamParams::default(),
        }
    }
}

/// Pretrained model plus its per-epoch loss curve.
pub struct PretrainOutcome {
    pub model: Autoencoder,
    pub loss_curve: Vec<f64>,
}

/// Train the autoencoder to reconstruct benign domains under masked
/// cross-entropy. Deterministic in (config, seed).
pub fn pretrain_autoencoder(
    benign: &Corpus,
    ae_cfg: AeConfig,
    train_cfg: &PretrainConfig,
    seed: u64,
) -> Result<PretrainOutcome> {
    if benign.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let vocab = CharVocab::new();
    let encoded: Vec<EncodedDomain> = benign
        .entries
        .iter()
        .map(|d| encode(d, &vocab, ae_cfg.t))
        .collect();

    let mut model = Autoencoder::new(ae_cfg, seed);
    let mut adam = AdamState::new(&model.params());
    let mut enc = model.encode_state();
    let mut dec = model.decode_state();
    let mut loss_curve = Vec::with_capacity(train_cfg.epochs);

    let steps_per_epoch = (train_cfg.samples_per_epoch / train_cfg.batch_size).max(1);
    for epoch in 0..train_cfg.epochs {
        let mut picker = SplitMix64::derive(seed, 0xE90c ^ epoch as u64);
        let mut epoch_loss = 0.0;
        for _ in 0..steps_per_epoch {
            let mut grads = model.zeros_like();
            let mut batch_loss = 0.0;
            for _ in 0..train_cfg.batch_size {
                let idx = picker.next_below(encoded.len() as u64) as usize;
                batch_loss += model.reconstruction_step(
                    &encoded[idx],
                    &mut enc,
                    &mut dec,
                    &mut grads,
                    1.0 / train_cfg.batch_size as f64,
                )?;
            }
            batch_loss /= train_cfg.batch_size as f64;
            epoch_loss += batch_loss;
            let grad_list = grads.params();
            let mut param_list = model.params_mut();
            // params_mut borrows model mutably while grads is a separate
            // object, so the zip below is sound
            adam_step(&mut param_list, &grad_list, &mut adam, &train_cfg.adam)?;
        }
        let mean = epoch_loss / steps_per_epoch as f64;
        if !mean.is_finite() {
            return Err(Error::Divergence(format!("epoch {epoch} loss {mean}")));
        }
        loss_curve.push(mean);
    }
    Ok(PretrainOutcome { model, loss_curve })
}

/// Sample a reconstruction: encode, decode, then draw each step from its
/// multinomial, cutting at the first PAD. Falls back to argmax decoding
/// after eight empty draws; output always has at least one character.
pub fn reconstruct_sample(
    ae: &Autoencoder,
    d: &DomainName,
    rng: &mut SplitMix64,
) -> Result<DomainName> {
    let vocab = CharVocab::new();
    let e = encode(d, &vocab, ae.cfg.t);
    let mut enc = ae.encode_state();
    let mut dec = ae.decode_state();
    let emb = ae.encode_domain(&e, &mut enc);
    ae.decode(&emb, &mut dec)?;
    Ok(sample_decoded(&dec.probs, ae.cfg.t, &vocab, rng))
}

/// Draw per-step symbols from decoder output rows, stripping from the first
/// PAD; resample up to 8 times before falling back to argmax.
pub fn sample_decoded(
    probs: &[f64],
    t_len: usize,
    vocab: &CharVocab,
    rng: &mut SplitMix64,
) -> DomainName {
    for _ in 0..8 {
        let mut label = String::new();
        for t in 0..t_len {
            let sym = sample_row(&probs[t * VOCAB_SIZE..(t + 1) * VOCAB_SIZE], rng);
            if sym == PAD {
                break;
            }
            label.push(vocab.symbol(sym));
        }
        if !label.is_empty() {
            return DomainName::new(label).expect("sampled symbols are vocabulary characters");
        }
    }
    argmax_decoded(probs, t_len, vocab)
}

/// Deterministic decoding: per-step argmax, stripped from the first PAD;
/// when even the first step argmaxes to PAD, the best non-PAD symbol of
/// step 0 is kept so the output is never empty.
pub fn argmax_decoded(probs: &[f64], t_len: usize, vocab: &CharVocab) -> DomainName {
    let mut label = String::new();
    for t in 0..t_len {
        let row = &probs[t * VOCAB_SIZE..(t + 1) * VOCAB_SIZE];
        let sym = row
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, _)| i as u8)
            .unwrap();
        if sym == PAD {
            break;
        }
        label.push(vocab.symbol(sym));
    }
    if label.is_empty() {
        let row = &probs[..VOCAB_SIZE];
        let sym = row
            .iter()
            .enumerate()
            .skip(1)
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, _)| i as u8)
            .unwrap();
        label.push(vocab.symbol(sym));
    }
    DomainName::new(label).expect("argmax symbols are vocabulary characters")
}

fn sample_row(row: &[f64], rng: &mut SplitMix64) -> u8 {
    let u = rng.next_f64();
    let mut acc = 0.0;
    for (i, &p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return i as u8;
        }
    }
    (row.len() - 1) as u8
}

/// Mean fraction of non-PAD positions whose argmax decoding matches the
/// input symbol, over a sample of domains.
pub fn reconstruction_accuracy(ae: &Autoencoder, domains: &[DomainName]) -> Result<f64> {
    if domains.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let vocab = CharVocab::new();
    let mut enc = ae.encode_state();
    let mut dec = ae.decode_state();
    let mut hits = 0usize;
    let mut total = 0usize;
    for d in domains {
        let e = encode(d, &vocab, ae.cfg.t);
        let emb = ae.encode_domain(&e, &mut enc);
        ae.decode(&emb, &mut dec)?;
        for (t, &sym) in e.indices.iter().enumerate() {
            if sym == PAD {
                continue;
            }
            let row = &dec.probs[t * VOCAB_SIZE..(t + 1) * VOCAB_SIZE];
            let best = row
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .map(|(i, _)| i as u8)
                .unwrap();
            total += 1;
            if best == sym {
                hits += 1;
            }
        }
    }
    Ok(hits as f64 / total as f64)
}


#[cfg(test)]
mod bench {
    use super::*;
    use crate::corpus::{CorpusFormat, CorpusLabel, SuffixList};

    #[test]
    #[ignore]
    fn timing_one_epoch_production_dims() {
        let s = SuffixList::bundled();
        let loaded = crate::corpus::load_corpus(
            std::path::Path::new("data/benign_5000.txt"),
            CorpusFormat::Lines,
            5000,
            &s,
            CorpusLabel::Benign,
        )
        .unwrap();
        for (label, samples, lr) in [("steps3x_full", 7680usize, 0.001f64), ("mix_full", 5120, 0.002)] {
            let start = std::time::Instant::now();
            let out = pretrain_autoencoder(
                &loaded.corpus,
                AeConfig::default(),
                &PretrainConfig {
                    epochs: 30,
                    batch_size: 128,
                    samples_per_epoch: samples,
                    adam: AdamParams::with_lr(lr),
                },
                0,
            )
            .unwrap();
            let acc = reconstruction_accuracy(&out.model, &loaded.corpus.entries[..500]).unwrap();
            println!(
                "{label}: {:.0}s, curve {:?}, acc {:.4}",
                start.elapsed().as_secs_f64(),
                out.loss_curve.iter().map(|l| (l * 1000.0).round() / 1000.0).collect::<Vec<_>>(),
                acc
            );
        }
    }
}
