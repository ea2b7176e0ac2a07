//! Experiment configuration: TOML on disk, validated into a typed struct
//! that round-trips exactly.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::hamiltonian::ModelSpec;

/// Initial state of the evolution / measure under study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialState {
    /// site-basis delta at the given site (defaults to the index origin)
    Delta { site: Option<usize> },
    Eigenvector { index: usize },
    /// low-dimension construction: tail j^{-s/2} behind an optional head
    LowDim {
        #[serde(default)]
        head: Vec<f64>,
        tail_exponent: f64,
    },
    /// high-dimension construction along a weakly-spaced eigenvalue witness
    HighDim { n: u32, depth: usize },
    /// divergent-moment construction: delta head inside |n| <= cutoff
    Divergent { cutoff: usize },
    /// one coefficient per line, site basis, normalized on load
    File { path: PathBuf },
}

/// Log-spaced time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGridSpec {
    pub lo: f64,
    pub hi: f64,
    pub per_decade: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleWindowSpec {
    pub lo: f64,
    pub hi: f64,
}

/// Optional spacing-witness stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacingStageSpec {
    pub alpha: f64,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub initial_state: InitialState,
    pub q_grid: Vec<f64>,
    pub p_grid: Vec<f64>,
    pub time_grid: TimeGridSpec,
    /// scale window for dimension fits; omitted = measure default
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale_window: Option<ScaleWindowSpec>,
    /// disorder seeds; one full pipeline run per seed
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    /// also estimate dimensions through the correlation-integral route
    /// (slower; ball-scaling and mean-q always run)
    #[serde(default)]
    pub correlation_route: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacing: Option<SpacingStageSpec>,
}

fn cfg_err(path: &str, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        message: message.into(),
    }
}

impl ExperimentConfig {
    pub fn from_toml(input: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(input)
            .map_err(|e| cfg_err("", e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serialization cannot fail")
    }

    /// SHA-256 of the canonical rendering; stamped into every output file.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.to_toml().as_bytes());
        let mut out = String::with_capacity(64);
        for b in h.finalize() {
            out.push_str(&format!("{b:02x}"));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        self.model
            .validate()
            .map_err(|e| cfg_err("model", e.to_string()))?;
        if self.q_grid.is_empty() {
            return Err(cfg_err("q_grid", "must not be empty"));
        }
        for &q in &self.q_grid {
            if !(q > 0.0 && q < 1.0) {
                return Err(cfg_err("q_grid", format!("q = {q} outside (0,1)")));
            }
        }
        for &p in &self.p_grid {
            if !(p > 0.0 && p.is_finite()) {
                return Err(cfg_err("p_grid", format!("p = {p} must be positive")));
            }
            // bound verification needs D(1/(1+p)) on the q grid
            let q = 1.0 / (1.0 + p);
            if !self.q_grid.iter().any(|&g| (g - q).abs() < 1e-12) {
                return Err(cfg_err(
                    "q_grid",
                    format!("missing q = 1/(1+p) = {q} for p = {p}"),
                ));
            }
        }
        let t = &self.time_grid;
        if !(t.lo > 0.0 && t.hi > t.lo && t.per_decade > 0) {
            return Err(cfg_err(
                "time_grid",
                "needs 0 < lo < hi and per_decade >= 1",
            ));
        }
        if let Some(w) = &self.scale_window {
            if !(w.lo > 0.0 && w.hi > w.lo) {
                return Err(cfg_err("scale_window", "needs 0 < lo < hi"));
            }
        }
        if self.seeds.is_empty() {
            return Err(cfg_err("seeds", "must not be empty"));
        }
        if let Some(s) = &self.spacing {
            if !(s.alpha > 0.0) || s.depth < 2 {
                return Err(cfg_err("spacing", "needs alpha > 0 and depth >= 2"));
            }
        }
        match &self.initial_state {
            InitialState::Delta { site: Some(s) } if *s >= self.model.size => {
                return Err(cfg_err("initial_state.site", "site outside the lattice"));
            }
            InitialState::Eigenvector { index } if *index >= self.model.size => {
                return Err(cfg_err("initial_state.index", "index outside the spectrum"));
            }
            InitialState::LowDim { tail_exponent, .. } => {
                let qmax = self
                    .q_grid
                    .iter()
                    .copied()
                    .fold(f64::NEG_INFINITY, f64::max);
                // the construction itself re-checks per q; fail fast on the
                // largest q so a bad config never starts a run
                if tail_exponent * qmax <= 1.0 {
                    return Err(cfg_err(
                        "initial_state.tail_exponent",
                        format!("s*q = {} <= 1 at the largest q", tail_exponent * qmax),
                    ));
                }
            }
            InitialState::HighDim { n, depth } => {
                if *depth < 2 {
                    return Err(cfg_err("initial_state.depth", "needs depth >= 2"));
                }
                for &q in &self.q_grid {
                    if (*n as f64) <= q / (1.0 - q) {
                        return Err(cfg_err(
                            "initial_state.n",
                            format!("n = {n} not above q/(1-q) for q = {q}"),
                        ));
                    }
                }
            }
            InitialState::Divergent { cutoff } if 2 * cutoff >= self.model.size => {
                return Err(cfg_err("initial_state.cutoff", "cutoff leaves no tail"));
            }
            _ => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::ModelFamily;

    fn base() -> ExperimentConfig {
        ExperimentConfig {
            model: ModelSpec {
                family: ModelFamily::Free,
                size: 256,
                index_origin: None,
            },
            initial_state: InitialState::Delta { site: None },
            q_grid: vec![0.25, 1.0 / 3.0, 0.5],
            p_grid: vec![1.0, 2.0, 3.0],
            time_grid: TimeGridSpec {
                lo: 1.0,
                hi: 100.0,
                per_decade: 8,
            },
            scale_window: None,
            seeds: vec![1],
            output_dir: PathBuf::from("out"),
            correlation_route: false,
            spacing: None,
        }
    }

    #[test]
    fn round_trip_identity() {
        let cfg = base();
        let back = ExperimentConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, back);
        assert_eq!(cfg.hash(), back.hash());
    }

    #[test]
    fn rejects_q_outside_unit_interval() {
        let mut cfg = base();
        cfg.q_grid = vec![1.5, 0.5, 1.0 / 3.0, 0.25];
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("q_grid"), "{err}");
    }

    #[test]
    fn rejects_missing_conjugate_q() {
        let mut cfg = base();
        cfg.q_grid = vec![0.5];
        assert!(cfg.validate().is_err());
        cfg.p_grid = vec![1.0];
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn rejects_bad_states() {
        let mut cfg = base();
        cfg.initial_state = InitialState::Eigenvector { index: 256 };
        assert!(cfg.validate().is_err());
        cfg.initial_state = InitialState::Divergent { cutoff: 128 };
        assert!(cfg.validate().is_err());
        cfg.initial_state = InitialState::HighDim { n: 1, depth: 10 };
        // q = 0.5 needs n > 1
        assert!(cfg.validate().is_err());
        cfg.initial_state = InitialState::LowDim {
            head: vec![],
            tail_exponent: 1.0,
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn parses_example_toml() {
        let text = r#"
q_grid = [0.25, 0.3333333333333333, 0.5]
p_grid = [1.0, 2.0]
seeds = [7, 8]
output_dir = "runs/demo"

[model]
family = "anderson"
coupling = 2.0
seed = 7
size = 512

[initial_state]
kind = "delta"

[time_grid]
lo = 1.0
hi = 1000.0
per_decade = 8
"#;
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        assert_eq!(cfg.seeds, vec![7, 8]);
        assert!(ExperimentConfig::from_toml("q_grid = [2.0]").is_err());
    }
}
