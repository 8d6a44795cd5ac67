//! Persistent records for channels and classes. JSON with full-precision
//! floats: values are written in the shortest decimal form that parses back
//! to the identical bits, so save/load round-trips are exact and rerunning a
//! writer produces byte-identical files.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::QuantumChannel;
use crate::classes::CircuitClass;
use crate::error::{Error, Result};
use crate::mat::CMat;

/// A self-contained channel payload: qubit count, provenance label, and the
/// superoperator as row-major `(re, im)` pairs.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ChannelRecord {
    pub n: usize,
    pub label: String,
    pub superop: Vec<[f64; 2]>,
}

impl ChannelRecord {
    pub fn from_channel(chan: &QuantumChannel) -> Self {
        let sop = chan.superop();
        let dim = sop.nrows();
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let z = sop[(i, j)];
                entries.push([z.re, z.im]);
            }
        }
        Self {
            n: chan.n(),
            label: chan.label().to_string(),
            superop: entries,
        }
    }

    /// Rebuilds the channel, revalidating complete positivity and trace
    /// preservation.
    pub fn to_channel(&self) -> Result<QuantumChannel> {
        let d2 = 1usize << (2 * self.n);
        if self.superop.len() != d2 * d2 {
            return Err(Error::DimensionMismatch {
                context: "channel record entry count",
                expected: d2 * d2,
                got: self.superop.len(),
            });
        }
        let mut m = CMat::zeros(d2, d2);
        for i in 0..d2 {
            for j in 0..d2 {
                let [re, im] = self.superop[i * d2 + j];
                m[(i, j)] = Complex64::new(re, im);
            }
        }
        QuantumChannel::new(self.n, self.label.clone(), m)
    }
}

/// A class manifest: the class spec, member labels in class order, and
/// optionally the full channel payloads. Labels double as payload
/// references — for the canonical families each label is a gate word that
/// reconstructs its channel exactly, and the spec string reconstructs the
/// whole class.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ClassManifest {
    pub spec: String,
    pub n: usize,
    pub count: usize,
    pub dedup_tol: f64,
    pub labels: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub payload: Option<Vec<ChannelRecord>>,
}

impl ClassManifest {
    pub fn from_class(class: &CircuitClass, embed_payload: bool) -> Self {
        Self {
            spec: class.spec().to_string(),
            n: class.n(),
            count: class.len(),
            dedup_tol: class.dedup_tol(),
            labels: class
                .channels()
                .iter()
                .map(|c| c.label().to_string())
                .collect(),
            payload: embed_payload.then(|| {
                class
                    .channels()
                    .iter()
                    .map(ChannelRecord::from_channel)
                    .collect()
            }),
        }
    }

    /// Rebuilds the class from an embedded payload.
    pub fn to_class(&self) -> Result<CircuitClass> {
        let Some(payload) = &self.payload else {
            return Err(Error::InvalidParameter(
                "manifest has no embedded payload; rebuild from its spec instead".into(),
            ));
        };
        if payload.len() != self.count || self.labels.len() != self.count {
            return Err(Error::DimensionMismatch {
                context: "manifest payload count",
                expected: self.count,
                got: payload.len(),
            });
        }
        let channels = payload
            .iter()
            .map(|r| r.to_channel())
            .collect::<Result<Vec<_>>>()?;
        Ok(CircuitClass::new(
            self.n,
            self.spec.clone(),
            self.dedup_tol,
            channels,
        ))
    }
}

fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Serialization(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Writes a channel record as pretty JSON.
pub fn save_channel(path: &Path, chan: &QuantumChannel) -> Result<()> {
    std::fs::write(path, to_json_pretty(&ChannelRecord::from_channel(chan))?)?;
    Ok(())
}

/// Reads a channel record written by [`save_channel`] and revalidates it.
pub fn load_channel(path: &Path) -> Result<QuantumChannel> {
    let text = std::fs::read_to_string(path)?;
    let record: ChannelRecord =
        serde_json::from_str(&text).map_err(|e| Error::Serialization(e.to_string()))?;
    record.to_channel()
}

/// Writes a class manifest as pretty JSON.
pub fn save_manifest(path: &Path, manifest: &ClassManifest) -> Result<()> {
    std::fs::write(path, to_json_pretty(manifest)?)?;
    Ok(())
}

/// Reads a class manifest.
pub fn load_manifest(path: &Path) -> Result<ClassManifest> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Serialization(e.to_string()))
}
