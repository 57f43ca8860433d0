//! Binary checkpoint of a fitted model.
//!
//! Layout: an 8-byte little-endian header length `L`, then `L` bytes of JSON
//! header, then a payload of little-endian f64 values. The header's `sections`
//! list gives each block's offset and length in f64 units from the start of
//! the payload:
//!
//! | section     | length         | contents                                   |
//! |-------------|----------------|--------------------------------------------|
//! | `w1`        | `N × hidden`   | layer-1 weights, row-major                 |
//! | `w2`        | `hidden × 4`   | layer-2 weights, row-major                 |
//! | `globals`   | 3              | `log scale, α, η_T`                        |
//! | `embedding` | `2N`           | per node `(r, θ)` or `(x, y)`              |
//!
//! Only `embedding` is required; sampling-based fits carry no encoder.
//! Optimizer moments are not stored.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::elbo::{GlobalParams, Globals, LatentModel};
use super::fit::VariationalFit;
use super::gcn::{EncoderWeights, HEADS};
use crate::error::{Error, Result};
use crate::graph::Graph;

pub const CHECKPOINT_FORMAT: &str = "hcls-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub name: String,
    pub offset: usize,
    pub len: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointHeader {
    pub format: String,
    pub version: u32,
    /// `"vi"` or `"hmc"`.
    pub engine: String,
    pub model: LatentModel,
    pub n: usize,
    pub hidden: Option<usize>,
    pub config: serde_json::Value,
    pub seed: u64,
    pub elbo_trace: Vec<f64>,
    pub params: GlobalParams,
    pub fixed_temperature: Option<f64>,
    pub degrees: Vec<usize>,
    pub sections: Vec<Section>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub header: CheckpointHeader,
    pub encoder: Option<EncoderWeights>,
    pub globals: Option<Globals>,
    pub embedding: Vec<[f64; 2]>,
}

impl Checkpoint {
    pub fn from_fit(fit: &VariationalFit, g: &Graph) -> Result<Self> {
        let s = &fit.state;
        let mut c = Self::from_embedding(
            "vi",
            s.model,
            s.params(),
            s.mean_embedding(g)?,
            g.degrees(),
            serde_json::to_value(&fit.config)?,
            fit.config.seed,
        );
        c.header.hidden = Some(s.encoder.hidden);
        c.header.elbo_trace = fit.elbo_trace.clone();
        c.header.fixed_temperature = s.fixed_temperature;
        c.encoder = Some(s.encoder.clone());
        c.globals = Some(s.globals);
        Ok(c)
    }

    pub fn from_embedding(
        engine: &str,
        model: LatentModel,
        params: GlobalParams,
        embedding: Vec<[f64; 2]>,
        degrees: Vec<usize>,
        config: serde_json::Value,
        seed: u64,
    ) -> Self {
        Checkpoint {
            header: CheckpointHeader {
                format: CHECKPOINT_FORMAT.into(),
                version: CHECKPOINT_VERSION,
                engine: engine.into(),
                model,
                n: embedding.len(),
                hidden: None,
                config,
                seed,
                elbo_trace: Vec::new(),
                params,
                fixed_temperature: None,
                degrees,
                sections: Vec::new(),
            },
            encoder: None,
            globals: None,
            embedding,
        }
    }

    pub fn write<W: Write>(&self, out: W) -> Result<()> {
        let mut out = BufWriter::new(out);
        let mut payload: Vec<f64> = Vec::new();
        let mut sections = Vec::new();
        let mut push = |name: &str, values: &mut dyn Iterator<Item = f64>| {
            let offset = payload.len();
            payload.extend(values);
            sections.push(Section {
                name: name.into(),
                offset,
                len: payload.len() - offset,
            });
        };
        if let Some(w) = &self.encoder {
            push("w1", &mut w.w1.iter().copied());
            push("w2", &mut w.w2.iter().copied());
        }
        if let Some(g) = &self.globals {
            push("globals", &mut g.to_array().into_iter());
        }
        push("embedding", &mut self.embedding.iter().flatten().copied());
        let header = CheckpointHeader {
            sections,
            n: self.embedding.len(),
            ..self.header.clone()
        };
        let json = serde_json::to_vec(&header)?;
        out.write_all(&(json.len() as u64).to_le_bytes())?;
        out.write_all(&json)?;
        for v in payload {
            out.write_all(&v.to_le_bytes())?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read<R: Read>(input: R) -> Result<Self> {
        let mut input = BufReader::new(input);
        let mut len = [0u8; 8];
        input.read_exact(&mut len)?;
        let len = u64::from_le_bytes(len);
        // read through `take` so a corrupt length cannot force a huge allocation
        let mut json = Vec::new();
        (&mut input).take(len).read_to_end(&mut json)?;
        if json.len() as u64 != len {
            return Err(Error::Format("truncated checkpoint header".into()));
        }
        let header: CheckpointHeader = serde_json::from_slice(&json)?;
        if header.format != CHECKPOINT_FORMAT {
            return Err(Error::Format(format!("not a checkpoint: format {:?}", header.format)));
        }
        if header.version != CHECKPOINT_VERSION {
            return Err(Error::Format(format!("unsupported checkpoint version {}", header.version)));
        }
        let mut bytes = Vec::new();
        input.read_to_end(&mut bytes)?;
        if bytes.len() % 8 != 0 {
            return Err(Error::Format("payload is not a whole number of f64 values".into()));
        }
        let payload: Vec<f64> = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
            .collect();
        let section = |name: &str| -> Result<Option<&[f64]>> {
            match header.sections.iter().find(|s| s.name == name) {
                None => Ok(None),
                Some(s) => payload
                    .get(s.offset..s.offset + s.len)
                    .map(Some)
                    .ok_or_else(|| Error::Format(format!("section {name} runs past the payload"))),
            }
        };
        let embedding: Vec<[f64; 2]> = section("embedding")?
            .ok_or_else(|| Error::Format("checkpoint has no embedding".into()))?
            .chunks_exact(2)
            .map(|c| [c[0], c[1]])
            .collect();
        if embedding.len() != header.n {
            return Err(Error::Format(format!(
                "embedding has {} nodes, header says {}",
                embedding.len(),
                header.n
            )));
        }
        let encoder = match (section("w1")?, section("w2")?, header.hidden) {
            (Some(w1), Some(w2), Some(hidden)) => {
                let w = EncoderWeights {
                    input_dim: header.n,
                    hidden,
                    w1: w1.to_vec(),
                    w2: w2.to_vec(),
                };
                if w2.len() != hidden * HEADS {
                    return Err(Error::Format("encoder sections do not match hidden width".into()));
                }
                w.validate().map_err(|e| Error::Format(e.to_string()))?;
                Some(w)
            }
            (None, None, _) => None,
            _ => return Err(Error::Format("incomplete encoder sections".into())),
        };
        let globals = section("globals")?.map(Globals::from_slice);
        Ok(Checkpoint {
            header,
            encoder,
            globals,
            embedding,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write(File::create(path)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read(File::open(path)?)
    }
}
