//! Experiment configuration: a flat key=value file plus command-line
//! overrides, validated into a typed config.

use std::path::{Path, PathBuf};

use thiserror::Error;

use gromov_core::graph::{DelayModel, GraphKind};
use gromov_core::infer::{CandidateSet, ScoreDirection};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("key `{key}`: {message}")]
    Bad { key: String, message: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("line {line}: expected `key=value`, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("referenced file {0} does not exist")]
    FileMissing(PathBuf),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    ApproxPath,
    AcqOrder,
    SourceSnapshot,
    Placement,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::ApproxPath => "approx-path",
            ExperimentKind::AcqOrder => "acq-order",
            ExperimentKind::SourceSnapshot => "source-snapshot",
            ExperimentKind::Placement => "placement",
        }
    }
}

#[derive(Debug, Clone)]
pub enum GraphSpec {
    Generate(GraphKind),
    File { path: PathBuf, unit_weights: bool },
}

/// Fully validated experiment parameters; defaults follow the experiment
/// setups the drivers reproduce.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub graph: GraphSpec,
    pub trials: usize,
    pub seed: u64,
    pub jobs: usize,
    /// Denominator of combination-weight grids (components are multiples of
    /// `1/grid_step`).
    pub grid_step: usize,
    /// Propagation means swept by approx-path.
    pub mus: Vec<f64>,
    pub sigma2: f64,
    /// Delay model for acq-order sampling and snapshot infections.
    pub delay: DelayModel,
    pub infected_lo: f64,
    pub infected_hi: f64,
    pub k: usize,
    pub eta: f64,
    pub max_iterations: usize,
    pub truth_samples: usize,
    pub sources: usize,
    pub pairs_per_source: usize,
    /// Spanning trees sampled per source for the synthesized family.
    pub sample_count: usize,
    pub top_fraction: f64,
    pub candidates: CandidateSet,
    pub direction: ScoreDirection,
}

fn bad(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Bad { key: key.to_string(), message: message.into() }
}

fn parse_usize(key: &str, v: &str) -> Result<usize, ConfigError> {
    v.parse().map_err(|_| bad(key, format!("expected an integer, got {v:?}")))
}

fn parse_f64(key: &str, v: &str) -> Result<f64, ConfigError> {
    v.parse().map_err(|_| bad(key, format!("expected a number, got {v:?}")))
}

fn parse_graph(key: &str, v: &str) -> Result<GraphSpec, ConfigError> {
    let parts: Vec<&str> = v.split(':').collect();
    let spec = match parts.as_slice() {
        ["er", n, deg] => GraphSpec::Generate(GraphKind::Er {
            n: parse_usize(key, n)?,
            avg_degree: parse_f64(key, deg)?,
        }),
        ["ba", n, m] => GraphSpec::Generate(GraphKind::Ba {
            n: parse_usize(key, n)?,
            m: parse_usize(key, m)?,
        }),
        ["grid", r, c] => GraphSpec::Generate(GraphKind::Grid2d {
            rows: parse_usize(key, r)?,
            cols: parse_usize(key, c)?,
        }),
        ["complete", n] => GraphSpec::Generate(GraphKind::Complete { n: parse_usize(key, n)? }),
        ["file", path] => GraphSpec::File { path: PathBuf::from(path), unit_weights: false },
        ["file", path, "unit"] => {
            GraphSpec::File { path: PathBuf::from(path), unit_weights: true }
        }
        _ => {
            return Err(bad(
                key,
                format!("expected er:N:DEG, ba:N:M, grid:R:C, complete:N or file:PATH[:unit], got {v:?}"),
            ))
        }
    };
    Ok(spec)
}

fn parse_delay(key: &str, v: &str) -> Result<DelayModel, ConfigError> {
    let parts: Vec<&str> = v.split(':').collect();
    let model = match parts.as_slice() {
        ["exp", rate] => DelayModel::exponential(parse_f64(key, rate)?),
        ["tgauss", mean, var] => {
            DelayModel::truncated_gaussian(parse_f64(key, mean)?, parse_f64(key, var)?)
        }
        _ => return Err(bad(key, format!("expected exp:RATE or tgauss:MEAN:VAR, got {v:?}"))),
    };
    model.map_err(|e| bad(key, e.to_string()))
}

impl ExperimentConfig {
    /// Parses a key=value config file, then applies `key=value` overrides.
    /// A `seed` key wins over the `GROMOV_SEED` environment variable, which
    /// in turn overrides the built-in default of 0.
    pub fn load(path: impl AsRef<Path>, overrides: &[String]) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_text(&text, overrides)
    }

    pub fn from_text(text: &str, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut pairs: Vec<(String, String)> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::Syntax { line: i + 1, text: line.to_string() })?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        for (i, o) in overrides.iter().enumerate() {
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| ConfigError::Syntax { line: i + 1, text: o.clone() })?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        Self::from_pairs(&pairs)
    }

    fn from_pairs(pairs: &[(String, String)]) -> Result<Self, ConfigError> {
        let mut kind = None;
        let mut graph = None;
        let mut cfg = Self {
            kind: ExperimentKind::ApproxPath,
            graph: GraphSpec::Generate(GraphKind::Er { n: 200, avg_degree: 4.0 }),
            trials: 10,
            seed: std::env::var("GROMOV_SEED").ok().and_then(|v| v.parse().ok()).unwrap_or(0),
            jobs: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            grid_step: 10,
            mus: vec![2.0, 10.0],
            sigma2: 1.0,
            delay: DelayModel::Exponential { rate: 1.0 },
            infected_lo: 0.2,
            infected_hi: 0.3,
            k: 2,
            eta: 0.5,
            max_iterations: 50,
            truth_samples: 200,
            sources: 3,
            pairs_per_source: 10,
            sample_count: 3,
            top_fraction: 0.2,
            candidates: CandidateSet::Infected,
            direction: ScoreDirection::Argmax,
        };
        for (k, v) in pairs {
            match k.as_str() {
                "experiment" => {
                    kind = Some(match v.as_str() {
                        "approx-path" => ExperimentKind::ApproxPath,
                        "acq-order" => ExperimentKind::AcqOrder,
                        "source-snapshot" => ExperimentKind::SourceSnapshot,
                        "placement" => ExperimentKind::Placement,
                        other => return Err(bad(k, format!("unknown experiment {other:?}"))),
                    })
                }
                "graph" => graph = Some(parse_graph(k, v)?),
                "trials" => cfg.trials = parse_usize(k, v)?,
                "seed" => cfg.seed = v.parse().map_err(|_| bad(k, "expected an integer"))?,
                "jobs" => cfg.jobs = parse_usize(k, v)?,
                "grid_step" => cfg.grid_step = parse_usize(k, v)?,
                "mu" => {
                    cfg.mus = v
                        .split(',')
                        .map(|t| parse_f64(k, t.trim()))
                        .collect::<Result<_, _>>()?
                }
                "sigma2" => cfg.sigma2 = parse_f64(k, v)?,
                "delay" => cfg.delay = parse_delay(k, v)?,
                "infected" => {
                    let (lo, hi) = v
                        .split_once(':')
                        .ok_or_else(|| bad(k, "expected LO:HI"))?;
                    cfg.infected_lo = parse_f64(k, lo)?;
                    cfg.infected_hi = parse_f64(k, hi)?;
                }
                "k" => cfg.k = parse_usize(k, v)?,
                "eta" => cfg.eta = parse_f64(k, v)?,
                "max_iterations" => cfg.max_iterations = parse_usize(k, v)?,
                "truth_samples" => cfg.truth_samples = parse_usize(k, v)?,
                "sources" => cfg.sources = parse_usize(k, v)?,
                "pairs" => cfg.pairs_per_source = parse_usize(k, v)?,
                "samples" => cfg.sample_count = parse_usize(k, v)?,
                "top_fraction" => cfg.top_fraction = parse_f64(k, v)?,
                "candidates" => {
                    cfg.candidates = match v.as_str() {
                        "infected" => CandidateSet::Infected,
                        "all" => CandidateSet::AllNodes,
                        other => return Err(bad(k, format!("expected infected|all, got {other:?}"))),
                    }
                }
                "direction" => {
                    cfg.direction = match v.as_str() {
                        "argmax" => ScoreDirection::Argmax,
                        "argmin" => ScoreDirection::Argmin,
                        other => return Err(bad(k, format!("expected argmax|argmin, got {other:?}"))),
                    }
                }
                other => return Err(ConfigError::UnknownKey(other.to_string())),
            }
        }
        cfg.kind = kind.ok_or(ConfigError::Missing("experiment"))?;
        if let Some(g) = graph {
            cfg.graph = g;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if self.trials == 0 {
            return Err(bad("trials", "must be at least 1"));
        }
        if self.grid_step == 0 {
            return Err(bad("grid_step", "must be at least 1"));
        }
        if self.jobs == 0 {
            return Err(bad("jobs", "must be at least 1"));
        }
        if !(self.infected_lo > 0.0
            && self.infected_lo <= self.infected_hi
            && self.infected_hi <= 1.0)
        {
            return Err(bad("infected", "need 0 < LO <= HI <= 1"));
        }
        if self.mus.is_empty() || self.mus.iter().any(|&m| m <= 0.0) {
            return Err(bad("mu", "need a non-empty list of positive means"));
        }
        if self.sigma2 <= 0.0 {
            return Err(bad("sigma2", "must be positive"));
        }
        if !(self.top_fraction > 0.0 && self.top_fraction <= 1.0) {
            return Err(bad("top_fraction", "need 0 < f <= 1"));
        }
        if self.sample_count < 1 {
            return Err(bad("samples", "must be at least 1"));
        }
        if let GraphSpec::File { path, .. } = &self.graph {
            if !path.exists() {
                return Err(ConfigError::FileMissing(path.clone()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config_with_defaults() {
        let cfg = ExperimentConfig::from_text("experiment=placement\ngraph=grid:6:6\n", &[]).unwrap();
        assert_eq!(cfg.kind, ExperimentKind::Placement);
        assert_eq!(cfg.trials, 10);
        assert!(matches!(cfg.graph, GraphSpec::Generate(GraphKind::Grid2d { rows: 6, cols: 6 })));
    }

    #[test]
    fn overrides_win_over_file_values() {
        let cfg = ExperimentConfig::from_text(
            "experiment=approx-path\ntrials=5\n",
            &["trials=9".to_string(), "mu=3".to_string()],
        )
        .unwrap();
        assert_eq!(cfg.trials, 9);
        assert_eq!(cfg.mus, vec![3.0]);
    }

    #[test]
    fn rejects_bad_values_by_name() {
        let err = ExperimentConfig::from_text("experiment=placement\ntrials=0\n", &[]).unwrap_err();
        assert!(err.to_string().contains("trials"));
        let err =
            ExperimentConfig::from_text("experiment=placement\ninfected=0.5:0.2\n", &[]).unwrap_err();
        assert!(err.to_string().contains("infected"));
        let err = ExperimentConfig::from_text("experiment=nope\n", &[]).unwrap_err();
        assert!(err.to_string().contains("experiment"));
        assert!(ExperimentConfig::from_text("wat\n", &[]).is_err());
        assert!(ExperimentConfig::from_text("bogus=1\nexperiment=placement\n", &[]).is_err());
        let err = ExperimentConfig::from_text(
            "experiment=placement\ngraph=file:/no/such/file\n",
            &[],
        )
        .unwrap_err();
        assert!(matches!(err, ConfigError::FileMissing(_)));
    }

    #[test]
    fn delay_models_parse() {
        let cfg = ExperimentConfig::from_text(
            "experiment=acq-order\ndelay=tgauss:10:1\n",
            &[],
        )
        .unwrap();
        assert!(matches!(cfg.delay, DelayModel::TruncatedGaussian { .. }));
        assert!(ExperimentConfig::from_text("experiment=acq-order\ndelay=exp:0\n", &[]).is_err());
    }
}
