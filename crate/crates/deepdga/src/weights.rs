//! The "DDGA" weights container.
//!
//! Layout, all integers little-endian u32: magic "DDGA", format version,
//! tensor count, then per tensor: name length, name bytes (UTF-8), rank,
//! dims, and the values as little-endian IEEE-754 f32, row-major. Training
//! happens in f64; serialization rounds to f32, and write -> read -> write
//! is byte-identical.

use std::fs;
use std::path::Path;

use crate::autoencoder::{AeConfig, Autoencoder};
use crate::error::{Error, Result};
use crate::gan::{GanConfig, GanState};
use crate::neural::layers::BoxRotation;
use crate::neural::Tensor;

pub const MAGIC: &[u8; 4] = b"DDGA";
pub const FORMAT_VERSION: u32 = 1;

/// A named-tensor container, the unit the file format stores.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightsFile {
    pub entries: Vec<NamedTensor>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedTensor {
    pub name: String,
    pub dims: Vec<usize>,
    pub values: Vec<f32>,
}

impl NamedTensor {
    pub fn from_tensor(name: &str, t: &Tensor) -> Self {
        NamedTensor {
            name: name.to_string(),
            dims: t.shape().to_vec(),
            values: t.data().iter().map(|&x| x as f32).collect(),
        }
    }

    pub fn to_tensor(&self) -> Tensor {
        Tensor::from_vec(
            &self.dims,
            self.values.iter().map(|&x| x as f64).collect(),
        )
    }
}

impl WeightsFile {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.entries.len() as u32).to_le_bytes());
        for e in &self.entries {
            out.extend_from_slice(&(e.name.len() as u32).to_le_bytes());
            out.extend_from_slice(e.name.as_bytes());
            out.extend_from_slice(&(e.dims.len() as u32).to_le_bytes());
            for &d in &e.dims {
                out.extend_from_slice(&(d as u32).to_le_bytes());
            }
            for &v in &e.values {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut pos = 0usize;
        let take = |pos: &mut usize, n: usize| -> Result<&[u8]> {
            if *pos + n > bytes.len() {
                return Err(Error::Format("truncated weights container".into()));
            }
            let s = &bytes[*pos..*pos + n];
            *pos += n;
            Ok(s)
        };
        let read_u32 = |pos: &mut usize| -> Result<u32> {
            Ok(u32::from_le_bytes(take(pos, 4)?.try_into().unwrap()))
        };
        if take(&mut pos, 4)? != MAGIC {
            return Err(Error::Format("bad magic, not a DDGA container".into()));
        }
        let version = read_u32(&mut pos)?;
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported format version {version}")));
        }
        let count = read_u32(&mut pos)? as usize;
        let mut entries = Vec::with_capacity(count);
        for _ in 0..count {
            let name_len = read_u32(&mut pos)? as usize;
            let name = String::from_utf8(take(&mut pos, name_len)?.to_vec())
                .map_err(|_| Error::Format("tensor name is not UTF-8".into()))?;
            let rank = read_u32(&mut pos)? as usize;
            let mut dims = Vec::with_capacity(rank);
            for _ in 0..rank {
                dims.push(read_u32(&mut pos)? as usize);
            }
            let len: usize = dims.iter().product();
            let raw = take(&mut pos, len * 4)?;
            let values = raw
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
                .collect();
            entries.push(NamedTensor { name, dims, values });
        }
        if pos != bytes.len() {
            return Err(Error::Format("trailing bytes in weights container".into()));
        }
        Ok(WeightsFile { entries })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes()).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        WeightsFile::from_bytes(&bytes)
    }

    pub fn find(&self, name: &str) -> Result<&NamedTensor> {
        self.entries
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| Error::Format(format!("container is missing tensor {name:?}")))
    }

    pub fn has(&self, name: &str) -> bool {
        self.entries.iter().any(|e| e.name == name)
    }
}

/// Snapshot an autoencoder (architecture dims ride along in a meta tensor).
pub fn autoencoder_to_weights(ae: &Autoencoder) -> WeightsFile {
    let mut entries = vec![NamedTensor {
        name: "meta.ae".into(),
        dims: vec![6],
        values: vec![
            ae.cfg.t as f32,
            ae.cfg.embed_dim as f32,
            ae.cfg.hidden as f32,
            ae.cfg.n_bigram as f32,
            ae.cfg.n_trigram as f32,
            ae.cfg.tie_decoder_conv as u8 as f32,
        ],
    }];
    for (name, tensor) in ae.param_names().iter().zip(ae.params()) {
        entries.push(NamedTensor::from_tensor(name, tensor));
    }
    WeightsFile { entries }
}

pub fn autoencoder_from_weights(w: &WeightsFile) -> Result<Autoencoder> {
    let meta = w.find("meta.ae")?;
    if meta.values.len() != 6 {
        return Err(Error::Format("meta.ae must have 6 values".into()));
    }
    let cfg = AeConfig {
        t: meta.values[0] as usize,
        embed_dim: meta.values[1] as usize,
        hidden: meta.values[2] as usize,
        n_bigram: meta.values[3] as usize,
        n_trigram: meta.values[4] as usize,
        tie_decoder_conv: meta.values[5] != 0.0,
    };
    let mut ae = Autoencoder::new(cfg, 0);
    let names = ae.param_names();
    for (name, param) in names.iter().zip(ae.params_mut()) {
        let stored = w.find(name)?.to_tensor();
        if stored.shape() != param.shape() {
            return Err(Error::Format(format!(
                "tensor {name:?} has shape {:?}, expected {:?}",
                stored.shape(),
                param.shape()
            )));
        }
        *param = stored;
    }
    Ok(ae)
}

/// Snapshot a full GAN state: the frozen autoencoder, box layer (corners and
/// optional rotation), discriminator head, and the round counter.
pub fn gan_to_weights(state: &GanState) -> WeightsFile {
    let mut file = autoencoder_to_weights(&state.autoencoder);
    file.entries.push(NamedTensor {
        name: "meta.gan".into(),
        dims: vec![2],
        values: vec![state.round as f32, state.rng_seed as f32],
    });
    for (name, t) in [
        ("box.w", &state.box_layer.w),
        ("box.b", &state.box_layer.b),
        ("box.v_min", &state.box_layer.v_min),
        ("box.v_max", &state.box_layer.v_max),
        ("head.w", &state.head_w),
    ] {
        file.entries.push(NamedTensor::from_tensor(name, t));
    }
    file.entries.push(NamedTensor {
        name: "head.b".into(),
        dims: vec![1],
        values: vec![state.head_b as f32],
    });
    if let Some(rot) = &state.box_layer.rotation {
        file.entries.push(NamedTensor::from_tensor("box.rot_mean", &rot.mean));
        file.entries.push(NamedTensor::from_tensor("box.rot_axes", &rot.axes));
    }
    file
}

/// Rebuild a generation-ready GAN state from a container. The history buffer
/// is not serialized; a reloaded state generates and scores but resumes
/// training from an empty history.
pub fn gan_from_weights(w: &WeightsFile, config: GanConfig) -> Result<GanState> {
    let ae = autoencoder_from_weights(w)?;
    let meta = w.find("meta.gan")?;
    let round = meta.values[0] as u32;
    let rng_seed = meta.values[1] as u64;
    let mut state = GanState::from_parts(ae, config, rng_seed)?;
    state.round = round;
    state.box_layer.w = w.find("box.w")?.to_tensor();
    state.box_layer.b = w.find("box.b")?.to_tensor();
    state.box_layer.v_min = w.find("box.v_min")?.to_tensor();
    state.box_layer.v_max = w.find("box.v_max")?.to_tensor();
    if w.has("box.rot_mean") {
        state.box_layer.rotation = Some(BoxRotation {
            mean: w.find("box.rot_mean")?.to_tensor(),
            axes: w.find("box.rot_axes")?.to_tensor(),
        });
    }
    state.head_w = w.find("head.w")?.to_tensor();
    state.head_b = w.find("head.b")?.values[0] as f64;
    Ok(state)
}
