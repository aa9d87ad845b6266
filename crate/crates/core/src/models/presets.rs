use super::ModelSpec;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Nature of the transition, which selects the scaling law used in fits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Transition {
    FirstOrder,
    SecondOrder,
}

/// A named model configuration with its critical-point search window.
#[derive(Clone, Debug, Serialize)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub spec: ModelSpec,
    pub bracket: (f64, f64),
    pub theta_c_hint: f64,
    pub transition: Transition,
    pub sizes: Vec<usize>,
}

pub const PRESET_NAMES: [&str; 5] = ["grover", "pspin-first", "pspin-second", "biclique-scaling", "biclique-dynamics"];

pub fn preset(name: &str) -> Result<Preset> {
    let p = match name {
        "grover" => Preset {
            name: "grover",
            description: "unstructured search, any L",
            spec: ModelSpec::grover(10),
            bracket: (0.5, 1.5),
            theta_c_hint: 1.0,
            transition: Transition::FirstOrder,
            sizes: (6..=26).step_by(2).collect(),
        },
        "pspin-first" => Preset {
            name: "pspin-first",
            description: "p-spin, p=3, k=1, lambda=1 (first order)",
            spec: ModelSpec::pspin(12, 3, 1, 1.0),
            bracket: (1.0, 1.6),
            theta_c_hint: 1.3,
            transition: Transition::FirstOrder,
            sizes: (8..=30).step_by(2).collect(),
        },
        "pspin-second" => Preset {
            name: "pspin-second",
            description: "p-spin, p=5, k=2, lambda=0.1 (second order)",
            spec: ModelSpec::pspin(20, 5, 2, 0.1),
            bracket: (1.0, 2.5),
            theta_c_hint: 1.8,
            transition: Transition::SecondOrder,
            sizes: (10..=30).step_by(2).collect(),
        },
        "biclique-scaling" => Preset {
            name: "biclique-scaling",
            description: "biclique, J=1, W_A=0.49, W_B=0.5, L_A = L_B + 1",
            spec: ModelSpec::biclique(3, 2, 1.0, 0.49, 0.5),
            bracket: (0.01, 0.3),
            theta_c_hint: 0.1,
            transition: Transition::FirstOrder,
            sizes: vec![5, 7, 9, 11, 13],
        },
        "biclique-dynamics" => Preset {
            name: "biclique-dynamics",
            description: "biclique, J=1, W_A=4, W_B=3.5; larger sizes use L_B = L_A + 1",
            spec: ModelSpec::biclique(3, 2, 1.0, 4.0, 3.5),
            bracket: (0.5, 3.0),
            theta_c_hint: 1.4,
            transition: Transition::FirstOrder,
            sizes: vec![5, 7, 9, 11],
        },
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown preset '{other}', expected one of {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(p)
}

impl Preset {
    /// The preset's model at total size `l`.
    ///
    /// For `biclique-dynamics` only the 5-spin default keeps `L_A = 3`;
    /// other sizes put the extra spin in part B, the orientation in which
    /// these weights produce an anticrossing.
    pub fn at_size(&self, l: usize) -> Result<ModelSpec> {
        if l == self.spec.size() {
            return Ok(self.spec.clone());
        }
        if self.name == "biclique-dynamics" {
            if let ModelSpec::Biclique { j, w_a, w_b, .. } = self.spec {
                return ModelSpec::biclique(1, 2, j, w_a, w_b).with_size(l);
            }
        }
        self.spec.with_size(l)
    }
}

pub fn list_presets() -> Vec<Preset> {
    PRESET_NAMES.iter().map(|n| preset(n).unwrap()).collect()
}
