//! Versioned binary container for trained models.
//!
//! Layout, all little-endian: magic `ZSLM`, format version, SHA-256 of the
//! vocabulary file form, the training config, the distance metric, the
//! layer-size chain, then each layer's weights (row-major) and bias as raw
//! f64 bits. Raw bits make save→load→save byte-identical, which is what the
//! reproducibility contract is stated in terms of.

use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::net::{LayerParams, NetworkParams, TrainConfig};
use crate::text::Vocabulary;
use crate::zsl::Metric;

const MAGIC: &[u8; 4] = b"ZSLM";
const VERSION: u32 = 1;

/// A trained network plus everything needed to reuse it coherently: the
/// config that produced it, the metric it was tuned for, and the hash of
/// the vocabulary it indexes into.
#[derive(Debug, Clone)]
pub struct ModelFile {
    pub params: NetworkParams,
    pub config: TrainConfig,
    pub metric: Metric,
    pub vocab_sha256: [u8; 32],
}

/// SHA-256 of the vocabulary's canonical file form.
pub fn vocabulary_hash(vocab: &Vocabulary) -> [u8; 32] {
    sha256(vocab.to_file_string().as_bytes())
}

pub fn sha256(bytes: &[u8]) -> [u8; 32] {
    let digest = Sha256::digest(bytes);
    let mut out = [0u8; 32];
    out.copy_from_slice(&digest);
    out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    to_hex(&sha256(bytes))
}

pub fn to_hex(bytes: &[u8]) -> String {
    use std::fmt::Write;
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        write!(s, "{b:02x}").expect("infallible");
    }
    s
}

impl ModelFile {
    pub fn new(
        params: NetworkParams,
        config: TrainConfig,
        metric: Metric,
        vocab: &Vocabulary,
    ) -> ModelFile {
        ModelFile {
            vocab_sha256: vocabulary_hash(vocab),
            params,
            config,
            metric,
        }
    }

    /// Errors unless `vocab` hashes to the vocabulary this model was
    /// trained against.
    pub fn check_vocabulary(&self, vocab: &Vocabulary) -> Result<()> {
        if vocabulary_hash(vocab) != self.vocab_sha256 {
            return Err(Error::VocabularyHashMismatch);
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&self.vocab_sha256);
        out.extend_from_slice(&self.config.learning_rate.to_le_bytes());
        out.extend_from_slice(&(self.config.batch_size as u64).to_le_bytes());
        out.extend_from_slice(&(self.config.epochs as u64).to_le_bytes());
        out.extend_from_slice(&self.config.dropout_rate.to_le_bytes());
        out.extend_from_slice(&self.config.seed.to_le_bytes());
        out.extend_from_slice(&self.config.lambda.to_le_bytes());
        out.push(self.config.binary_bow as u8);
        out.push(match self.metric {
            Metric::Euclidean => 0,
            Metric::Cosine => 1,
        });
        let sizes = self.params.layer_sizes();
        out.extend_from_slice(&(sizes.len() as u32).to_le_bytes());
        for &s in &sizes {
            out.extend_from_slice(&(s as u64).to_le_bytes());
        }
        for layer in self.params.layers() {
            for &w in layer.weights.iter() {
                out.extend_from_slice(&w.to_le_bytes());
            }
            for &b in layer.bias.iter() {
                out.extend_from_slice(&b.to_le_bytes());
            }
        }
        out
    }

    /// Strict parse: wrong magic or version, truncation, undefined enum
    /// bytes, inconsistent sizes, and trailing bytes are all rejected.
    pub fn from_bytes(bytes: &[u8]) -> Result<ModelFile> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(bad("not a model file (wrong magic)"));
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(bad(&format!("unsupported format version {version}")));
        }
        let mut vocab_sha256 = [0u8; 32];
        vocab_sha256.copy_from_slice(r.take(32)?);
        let config = TrainConfig {
            learning_rate: r.f64()?,
            batch_size: r.usize()?,
            epochs: r.usize()?,
            dropout_rate: r.f64()?,
            seed: r.u64()?,
            lambda: r.f64()?,
            binary_bow: r.flag()?,
        };
        let metric = match r.u8()? {
            0 => Metric::Euclidean,
            1 => Metric::Cosine,
            m => return Err(bad(&format!("undefined metric byte {m}"))),
        };
        let num_sizes = r.u32()? as usize;
        let mut sizes = Vec::with_capacity(num_sizes);
        for _ in 0..num_sizes {
            sizes.push(r.usize()?);
        }
        if sizes.len() < 2 {
            return Err(bad("layer-size chain shorter than 2"));
        }
        let mut layers = Vec::with_capacity(sizes.len() - 1);
        for pair in sizes.windows(2) {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let mut layer = LayerParams::zeros(fan_out, fan_in);
            for w in layer.weights.iter_mut() {
                *w = r.f64()?;
            }
            for b in layer.bias.iter_mut() {
                *b = r.f64()?;
            }
            layers.push(layer);
        }
        if r.pos != bytes.len() {
            return Err(bad(&format!(
                "{} trailing bytes after model data",
                bytes.len() - r.pos
            )));
        }
        Ok(ModelFile {
            params: NetworkParams::new(layers)?,
            config,
            metric,
            vocab_sha256,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()).map_err(|e| Error::io(path.display().to_string(), e))
    }

    pub fn load(path: &Path) -> Result<ModelFile> {
        let bytes =
            std::fs::read(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        ModelFile::from_bytes(&bytes)
    }
}

fn bad(message: &str) -> Error {
    Error::BadModelFile(message.to_owned())
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(bad(&format!(
                "truncated at byte {} (needed {n} more)",
                self.pos
            )));
        }
        let slice = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn flag(&mut self) -> Result<bool> {
        match self.u8()? {
            0 => Ok(false),
            1 => Ok(true),
            b => Err(bad(&format!("flag byte {b} is neither 0 nor 1"))),
        }
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("len 4")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("len 8")))
    }

    fn usize(&mut self) -> Result<usize> {
        self.u64()?
            .try_into()
            .map_err(|_| bad("size field exceeds platform usize"))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("len 8")))
    }
}
