//! Run configuration: a JSON document, overridden by command-line flags and
//! completed with per-experiment defaults.

use crate::dynamics::Numerator;
use crate::error::{Error, Result};
use crate::models::{preset, ModelSpec, Preset, Transition};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    GapScan,
    QfiScan,
    Scaling,
    Adiabatic,
    PrepareUnknown,
    Dephasing,
    Adaptive,
    PrepTime,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::GapScan => "gap-scan",
            Experiment::QfiScan => "qfi-scan",
            Experiment::Scaling => "scaling",
            Experiment::Adiabatic => "adiabatic",
            Experiment::PrepareUnknown => "prepare-unknown",
            Experiment::Dephasing => "dephasing",
            Experiment::Adaptive => "adaptive",
            Experiment::PrepTime => "prep-time",
        }
    }
}

/// A model given inline, with the window in which its critical point lies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineModel {
    pub spec: ModelSpec,
    pub bracket: (f64, f64),
    pub transition: Transition,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelChoice {
    Preset(String),
    Inline(InlineModel),
}

impl ModelChoice {
    pub fn family(&self) -> Result<Preset> {
        match self {
            ModelChoice::Preset(name) => preset(name),
            ModelChoice::Inline(m) => {
                m.spec.validate()?;
                if !(m.bracket.0 < m.bracket.1) {
                    return Err(Error::InvalidArgument(format!("bracket {:?} is empty", m.bracket)));
                }
                Ok(Preset {
                    name: m.spec.name(),
                    description: "inline model",
                    spec: m.spec.clone(),
                    bracket: m.bracket,
                    theta_c_hint: 0.5 * (m.bracket.0 + m.bracket.1),
                    transition: m.transition,
                    sizes: vec![m.spec.size()],
                })
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThetaGrid {
    List(Vec<f64>),
    Range { start: f64, stop: f64, points: usize },
}

impl ThetaGrid {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            ThetaGrid::List(ref v) => v.clone(),
            ThetaGrid::Range { start, stop, points } => match points {
                0 => vec![],
                1 => vec![start],
                n => (0..n).map(|i| start + (stop - start) * i as f64 / (n - 1) as f64).collect(),
            },
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<Experiment>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelChoice>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sizes: Option<Vec<usize>>,
    /// Single size for the preparation experiments.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thetas: Option<ThetaGrid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gammas: Option<Vec<f64>>,
    /// Adiabatic error budget.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub numerator: Option<Numerator>,
    /// Half-width of the window around `theta_c` for `adiabatic`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_true: Option<f64>,
    /// Initial detuning half-width of the adaptive loop.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rounds: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    /// Number of independent adaptive runs, seeded `seed, seed+1, ...`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seeds: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_probe_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

pub const DEFAULT_OUT: &str = "results";

const GROVER_GAMMAS: [f64; 8] = [0.0, 1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 0.1];
const LOCAL_GAMMAS: [f64; 6] = [0.0, 1e-4, 3e-4, 1e-3, 3e-3, 1e-2];

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Fills every field the experiment uses and checks the result.
    pub fn resolve(mut self, experiment: Experiment) -> Result<Self> {
        if let Some(e) = self.experiment {
            if e != experiment {
                return Err(Error::InvalidArgument(format!(
                    "config names experiment '{}' but '{}' was requested",
                    e.name(),
                    experiment.name()
                )));
            }
        }
        self.experiment = Some(experiment);
        let fallback = if experiment == Experiment::PrepTime { "pspin-first" } else { "grover" };
        let model = self.model.get_or_insert_with(|| ModelChoice::Preset(fallback.into())).clone();
        let fam = model.family()?;
        let grover = matches!(fam.spec, ModelSpec::Grover { .. });
        let name = fam.name;
        self.seed.get_or_insert(0);
        self.out.get_or_insert_with(|| PathBuf::from(DEFAULT_OUT));
        use Experiment::*;
        match experiment {
            GapScan | QfiScan => {
                self.sizes.get_or_insert_with(|| if grover { vec![10, 12, 14] } else { vec![fam.spec.size()] });
                let h = fam.theta_c_hint;
                self.thetas.get_or_insert(ThetaGrid::Range { start: 0.9 * h, stop: 1.1 * h, points: 41 });
            }
            Scaling => {
                self.sizes.get_or_insert_with(|| fam.sizes.clone());
                self.beta_tolerance.get_or_insert(0.25);
            }
            Adiabatic => {
                self.size.get_or_insert(default_size(name, &fam));
                self.epsilon.get_or_insert(if grover { 0.08 } else { 0.05 });
                self.numerator.get_or_insert(Numerator::AppendixBound);
                self.points.get_or_insert(13);
            }
            PrepareUnknown => {
                self.size.get_or_insert(default_size(name, &fam));
                self.epsilon.get_or_insert(0.03);
                let h = fam.theta_c_hint;
                self.thetas.get_or_insert(ThetaGrid::Range { start: h - 0.01, stop: h + 0.01, points: 9 });
            }
            Dephasing => {
                self.sizes.get_or_insert_with(|| match name {
                    "grover" => vec![10, 14, 18, 22, 26, 30],
                    "pspin-first" | "pspin-second" => vec![6, 8, 10],
                    "biclique-dynamics" | "biclique-scaling" => vec![5, 7, 9, 11],
                    _ => vec![fam.spec.size()],
                });
                self.gammas.get_or_insert_with(|| if grover { GROVER_GAMMAS.to_vec() } else { LOCAL_GAMMAS.to_vec() });
                self.epsilon.get_or_insert(0.1);
                self.numerator.get_or_insert(Numerator::AppendixBound);
            }
            Adaptive => {
                self.theta_true.get_or_insert(1.05);
                self.epsilon0.get_or_insert(0.2);
                self.rounds.get_or_insert(4);
                self.shots.get_or_insert(10_000);
                self.seeds.get_or_insert(1);
                self.max_probe_size.get_or_insert(crate::experiments::DEFAULT_MAX_PROBE_SIZE);
            }
            PrepTime => {
                self.sizes.get_or_insert_with(|| (8..=24).step_by(2).collect());
                self.epsilon.get_or_insert(0.1);
            }
        }
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if let Some(s) = &self.sizes {
            if s.is_empty() {
                return Err(Error::InvalidArgument("size list is empty".into()));
            }
        }
        if let Some(t) = &self.thetas {
            let v = t.values();
            if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidArgument("theta grid is empty or not finite".into()));
            }
        }
        if let Some(g) = &self.gammas {
            if g.is_empty() || g.iter().any(|x| !(*x >= 0.0 && x.is_finite())) {
                return Err(Error::InvalidArgument("gamma list must be non-empty, finite and >= 0".into()));
            }
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0 && e < 1.0) {
                return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 1), got {e}")));
            }
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidArgument("threads must be at least 1".into()));
        }
        Ok(())
    }

    pub fn family(&self) -> Result<Preset> {
        self.model.as_ref().map_or_else(|| preset("grover"), ModelChoice::family)
    }

    /// Name used in artifact file names.
    pub fn model_label(&self) -> String {
        match &self.model {
            Some(ModelChoice::Preset(n)) => n.clone(),
            Some(ModelChoice::Inline(m)) => m.spec.name().to_string(),
            None => "grover".into(),
        }
    }
}

fn default_size(name: &str, fam: &Preset) -> usize {
    match name {
        "grover" => 20,
        "pspin-first" => 30,
        "pspin-second" => 20,
        _ => fam.spec.size(),
    }
}
