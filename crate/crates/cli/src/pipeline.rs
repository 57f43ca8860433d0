//! One fit of one candidate model to one graph, by either engine.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use hcls::eval::{accuracy, auc, distance_correlations, PairMatrix, RunMetrics};
use hcls::hmc::{
    fixed_temperature_mode, hmc_sample, posterior_distance_summary, posterior_probability_summary, HmcConfig,
    PosteriorDraws,
};
use hcls::vi::{
    fit_model, reconstruct_distances, reconstruct_probabilities, Checkpoint, GlobalParams, LatentModel,
    VariationalConfig,
};
use hcls::{Error, Graph, Result};

/// Temperature of the fixed-temperature comparison model.
pub const FIXED_TEMPERATURE: f64 = 0.5;

/// Above this size HMC needs an explicit override: every gradient costs O(N²).
pub const HMC_NODE_LIMIT: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FitModel {
    #[serde(rename = "hcls")]
    Hcls,
    #[serde(rename = "hcls-fixed-T")]
    HclsFixedT,
    #[serde(rename = "ecls")]
    Ecls,
}

impl FitModel {
    pub const ALL: [FitModel; 3] = [FitModel::Hcls, FitModel::HclsFixedT, FitModel::Ecls];

    pub fn latent(self) -> LatentModel {
        match self {
            FitModel::Ecls => LatentModel::Euclidean,
            _ => LatentModel::Hyperbolic,
        }
    }

    pub fn fixed_temperature(self) -> Option<f64> {
        (self == FitModel::HclsFixedT).then_some(FIXED_TEMPERATURE)
    }
}

impl fmt::Display for FitModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FitModel::Hcls => "hcls",
            FitModel::HclsFixedT => "hcls-fixed-T",
            FitModel::Ecls => "ecls",
        })
    }
}

impl FromStr for FitModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hcls" => Ok(FitModel::Hcls),
            "hcls-fixed-T" | "hcls-fixed-t" => Ok(FitModel::HclsFixedT),
            "ecls" => Ok(FitModel::Ecls),
            other => Err(Error::Config(format!("unknown model {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    #[default]
    Vi,
    Hmc,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Vi => "vi",
            Engine::Hmc => "hmc",
        })
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vi" => Ok(Engine::Vi),
            "hmc" => Ok(Engine::Hmc),
            other => Err(Error::Config(format!("unknown engine {other:?}"))),
        }
    }
}

/// Engine settings. The seed of each is overridden per fit.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct FitOptions {
    pub vi: VariationalConfig,
    pub hmc: HmcConfig,
    /// Allow HMC above [`HMC_NODE_LIMIT`] nodes.
    pub force: bool,
}

#[derive(Debug, Clone)]
pub struct FitOutcome {
    pub model: FitModel,
    pub engine: Engine,
    pub probabilities: PairMatrix,
    pub distances: PairMatrix,
    pub params: GlobalParams,
    pub checkpoint: Checkpoint,
    pub draws: Option<PosteriorDraws>,
}

impl FitOutcome {
    pub fn metrics(&self, g: &Graph, truth: Option<&PairMatrix>, threshold: f64) -> Result<RunMetrics> {
        let corr = truth.map(|t| distance_correlations(t, &self.distances)).transpose()?;
        Ok(RunMetrics {
            auc: auc(&self.probabilities, g)?,
            accuracy: accuracy(&self.probabilities, g, threshold)?,
            pearson: corr.map(|c| c.pearson),
            spearman: corr.map(|c| c.spearman),
        })
    }
}

pub fn fit_graph(g: &Graph, model: FitModel, engine: Engine, options: &FitOptions, seed: u64) -> Result<FitOutcome> {
    match engine {
        Engine::Vi => {
            let cfg = VariationalConfig {
                seed,
                fixed_temperature: model.fixed_temperature(),
                ..options.vi.clone()
            };
            let fit = fit_model(g, model.latent(), &cfg)?;
            Ok(FitOutcome {
                model,
                engine,
                probabilities: reconstruct_probabilities(g, &fit.state)?,
                distances: reconstruct_distances(g, &fit.state)?,
                params: fit.state.params(),
                checkpoint: Checkpoint::from_fit(&fit, g)?,
                draws: None,
            })
        }
        Engine::Hmc => {
            if model == FitModel::Ecls {
                return Err(Error::Config(
                    "the HMC engine fits hyperbolic models only; use the vi engine for ecls".into(),
                ));
            }
            if g.n() > HMC_NODE_LIMIT && !options.force {
                return Err(Error::Config(format!(
                    "HMC cost grows as O(N²) per gradient; N = {} exceeds {HMC_NODE_LIMIT}. Pass --force to run anyway",
                    g.n()
                )));
            }
            let cfg = HmcConfig {
                seed,
                ..options.hmc.clone()
            };
            let draws = match model.fixed_temperature() {
                Some(t) => fixed_temperature_mode(g, t, &cfg)?,
                None => hmc_sample(g, &cfg)?,
            };
            let mean = draws
                .posterior_mean_params()
                .ok_or_else(|| Error::Config("HMC run stored no draws".into()))?;
            let params = GlobalParams {
                scale: mean.radius,
                alpha: mean.alpha,
                temperature: mean.temperature,
            };
            // positions are only identified up to rotation, so the export
            // keeps the final draw rather than a coordinate average
            let last = draws.draws.last().expect("non-empty draws");
            let embedding = last.positions.iter().map(|p| [p.r(), p.theta()]).collect();
            let mut checkpoint = Checkpoint::from_embedding(
                "hmc",
                LatentModel::Hyperbolic,
                params,
                embedding,
                g.degrees(),
                serde_json::to_value(&cfg)?,
                seed,
            );
            checkpoint.header.fixed_temperature = draws.fixed_temperature;
            Ok(FitOutcome {
                model,
                engine,
                probabilities: posterior_probability_summary(&draws)?,
                distances: posterior_distance_summary(&draws)?,
                params,
                checkpoint,
                draws: Some(draws),
            })
        }
    }
}
