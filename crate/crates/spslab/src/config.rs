use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use spslab_core::minimize::SolverConfig;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Energy,
    MinimizeRadial,
    #[serde(rename = "minimize-3d")]
    Minimize3d,
    TentSweep,
    BumpSweep,
    DilatedBumpSweep,
    LowerBoundSweep,
    DyadicLemma,
    HlsCheck,
    SweepLambda,
    ThresholdLambda0,
    BallSymmetry,
    LambdaPositivity,
}

impl Scenario {
    pub const ALL: [Scenario; 13] = [
        Scenario::Energy,
        Scenario::MinimizeRadial,
        Scenario::Minimize3d,
        Scenario::TentSweep,
        Scenario::BumpSweep,
        Scenario::DilatedBumpSweep,
        Scenario::LowerBoundSweep,
        Scenario::DyadicLemma,
        Scenario::HlsCheck,
        Scenario::SweepLambda,
        Scenario::ThresholdLambda0,
        Scenario::BallSymmetry,
        Scenario::LambdaPositivity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Energy => "energy",
            Scenario::MinimizeRadial => "minimize-radial",
            Scenario::Minimize3d => "minimize-3d",
            Scenario::TentSweep => "tent-sweep",
            Scenario::BumpSweep => "bump-sweep",
            Scenario::DilatedBumpSweep => "dilated-bump-sweep",
            Scenario::LowerBoundSweep => "lower-bound-sweep",
            Scenario::DyadicLemma => "dyadic-lemma",
            Scenario::HlsCheck => "hls-check",
            Scenario::SweepLambda => "sweep-lambda",
            Scenario::ThresholdLambda0 => "threshold-lambda0",
            Scenario::BallSymmetry => "ball-symmetry",
            Scenario::LambdaPositivity => "lambda-positivity",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Scenario::ALL.iter().map(|s| s.name()).collect();
                Error::UnknownScenario(s.to_string(), names.join(", "))
            })
    }
}

/// Radial profile used by the `energy` and `minimize-radial` scenarios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProfileSpec {
    /// `amplitude · exp(−r²/(2 width²))`
    Gaussian { amplitude: f64, width: f64 },
    /// `1` on `r < radius`
    Indicator { radius: f64 },
    /// `amplitude · cos²(πr/(2 support))` on `r < support`
    Bump { amplitude: f64, support: f64 },
    /// Tent of parameter `eps` on its own grid.
    Tent { eps: f64 },
    /// Two-column `r,value` CSV.
    File { path: PathBuf },
}

/// 3D starting field for `minimize-3d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitSpec {
    Gaussian {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        center: [f64; 3],
    },
    MultiBump {
        amplitude: f64,
        width: f64,
        centers: Vec<[f64; 3]>,
    },
    /// Random Gaussians; the run seed is `seed + restart index`.
    Seeded {
        bumps: usize,
        amplitude: [f64; 2],
        width: [f64; 2],
    },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    /// Radial node count.
    pub n: Option<usize>,
    pub r_max: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoxConfig {
    /// Nodes per axis; several values give a refinement study.
    pub n: Option<Vec<usize>>,
    #[serde(rename = "L")]
    pub half_width: Option<f64>,
}

/// Experiment configuration. Every list left out takes the scenario's
/// default; a list given as `[]` is an error.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Option<String>,
    pub p: Option<Vec<f64>>,
    pub lambda: Option<Vec<f64>>,
    pub omega: Option<f64>,
    pub eps: Option<Vec<f64>>,
    #[serde(rename = "R")]
    pub radius: Option<Vec<f64>>,
    #[serde(rename = "N")]
    pub bumps: Option<Vec<usize>>,
    pub alpha: Option<Vec<f64>>,
    pub sigma: Option<Vec<f64>>,
    /// Outer cutoffs `c`; the truncation is `(1/c, c)`.
    pub cutoffs: Option<Vec<f64>>,
    /// Dyadic block counts.
    #[serde(rename = "K")]
    pub blocks: Option<Vec<usize>>,
    pub beta: Option<f64>,
    pub grid: GridConfig,
    #[serde(rename = "box")]
    pub box_grid: BoxConfig,
    pub solver: Option<SolverConfig>,
    pub profile: Option<ProfileSpec>,
    pub init: Option<Vec<InitSpec>>,
    pub restarts: Option<usize>,
    pub amplitude: Option<f64>,
    pub support: Option<f64>,
    pub tolerance: Option<f64>,
    pub floor: Option<f64>,
    pub instances: Option<usize>,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub workers: Option<usize>,
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn scenario(&self) -> Result<Scenario> {
        match &self.scenario {
            Some(s) => s.parse(),
            None => Err(Error::InvalidConfig("no scenario given".into())),
        }
    }

    pub fn workers(&self) -> usize {
        self.workers.unwrap_or(1).max(1)
    }
}

/// `value` if given and nonempty, `default` if absent.
pub(crate) fn list<T: Clone>(value: &Option<Vec<T>>, name: &'static str, default: &[T]) -> Result<Vec<T>> {
    match value {
        Some(v) if v.is_empty() => Err(Error::EmptyGrid(name)),
        Some(v) => Ok(v.clone()),
        None => Ok(default.to_vec()),
    }
}
