use efetlab_core::taylor::Ratio;
use efetlab_core::{CoefficientSequence, SequenceSpec};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    DichotomyScan,
    SqrtExample,
    InterpVerify,
    HadamardProfile,
    Subharmonic,
    Combi,
    Count,
    Locate,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        ExperimentKind::DichotomyScan,
        ExperimentKind::SqrtExample,
        ExperimentKind::InterpVerify,
        ExperimentKind::HadamardProfile,
        ExperimentKind::Subharmonic,
        ExperimentKind::Combi,
        ExperimentKind::Count,
        ExperimentKind::Locate,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            ExperimentKind::DichotomyScan => "dichotomy-scan",
            ExperimentKind::SqrtExample => "sqrt-example",
            ExperimentKind::InterpVerify => "interp-verify",
            ExperimentKind::HadamardProfile => "hadamard-profile",
            ExperimentKind::Subharmonic => "subharmonic",
            ExperimentKind::Combi => "combi",
            ExperimentKind::Count => "count",
            ExperimentKind::Locate => "locate",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.tag() == tag)
    }
}

/// Experiment-specific parameters. Unset entries are filled by [`parse_config`].
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Extra {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Ratio>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(default, rename = "R", skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_density: Option<usize>,
    /// Zero-growth exponent of the synthetic hadamard-profile family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_prime: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sequence: Option<SequenceSpec>,
    #[serde(default)]
    pub radii: Vec<f64>,
    #[serde(default = "default_precision")]
    pub precision_bits: u32,
    #[serde(default)]
    pub h_list: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub extra: Extra,
}

pub const DEFAULT_PRECISION: u32 = 128;
pub const DEFAULT_GRID_DENSITY: usize = 100;
pub const DEFAULT_DELTA: f64 = 0.1;
pub const DEFAULT_ETA: f64 = 0.5;
pub const DEFAULT_MU: f64 = 0.45;

fn default_precision() -> u32 {
    DEFAULT_PRECISION
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Parses and validates a JSON config, filling every default so the result is the effective
/// configuration of the run.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| invalid(e.to_string()))?;
    cfg.resolve()
}

impl ExperimentConfig {
    /// A config with nothing but the experiment tag set, before defaults.
    pub fn bare(experiment: ExperimentKind) -> Self {
        ExperimentConfig {
            experiment,
            sequence: None,
            radii: Vec::new(),
            precision_bits: DEFAULT_PRECISION,
            h_list: Vec::new(),
            output: None,
            seed: None,
            extra: Extra::default(),
        }
    }

    /// The validated coefficient sequence, reseeded when a seed is set.
    pub fn coefficient_sequence(&self) -> Result<Option<CoefficientSequence>, CliError> {
        let Some(spec) = &self.sequence else {
            return Ok(None);
        };
        let seq = CoefficientSequence::new(spec.clone()).map_err(|e| invalid(e.to_string()))?;
        Ok(Some(match self.seed {
            Some(s) => seq.with_seed(s),
            None => seq,
        }))
    }

    /// Fills defaults and checks invariants.
    pub fn resolve(mut self) -> Result<Self, CliError> {
        use ExperimentKind::*;
        if !(16..=1 << 16).contains(&self.precision_bits) {
            return Err(invalid(format!("precision_bits must lie in [16, 65536], got {}", self.precision_bits)));
        }
        if let Some(s) = self.seed {
            if let Some(spec) = &self.sequence {
                let seq = CoefficientSequence::new(spec.clone()).map_err(|e| invalid(e.to_string()))?;
                self.sequence = Some(seq.with_seed(s).spec().clone());
            }
        }
        let e = &mut self.extra;
        match self.experiment {
            Count | Locate | DichotomyScan => {
                if self.sequence.is_none() {
                    return Err(invalid(format!("{} needs a sequence", self.experiment.tag())));
                }
                if self.radii.is_empty() {
                    if self.experiment == DichotomyScan {
                        self.radii = vec![25.0, 50.0, 75.0, 100.0];
                    } else {
                        return Err(invalid(format!("{} needs radii", self.experiment.tag())));
                    }
                }
            }
            SqrtExample => {
                match &self.sequence {
                    None => self.sequence = Some(SequenceSpec::CosSqrtPlus2),
                    Some(SequenceSpec::CosSqrtPlus2) => {}
                    Some(_) => return Err(invalid("sqrt-example is defined for the cos_sqrt_plus2 sequence only")),
                }
                if self.radii.is_empty() {
                    self.radii = vec![16.0, 32.0, 64.0, 128.0];
                }
            }
            InterpVerify => {
                if self.sequence.is_none() {
                    let beta = *e.beta.get_or_insert(Ratio { num: 1, den: 5 });
                    self.sequence = Some(SequenceSpec::QuadraticPhase {
                        beta,
                        gamma: Ratio::ZERO,
                        delta: Ratio::ZERO,
                    });
                }
                if self.h_list.is_empty() {
                    self.h_list = vec![0, 1, 5];
                }
                e.r.get_or_insert(40.0);
                e.n_max.get_or_insert(25);
            }
            HadamardProfile => {
                let r = *e.r.get_or_insert(if self.sequence.is_none() { 1e4 } else { 20.0 });
                if self.sequence.is_none() {
                    let a = *e.alpha.get_or_insert(0.4);
                    if !(a > 0.0 && a <= 1.0) {
                        return Err(invalid(format!("alpha must lie in (0, 1], got {a}")));
                    }
                    e.alpha_prime.get_or_insert(a + 0.05);
                }
                let delta = *e.delta.get_or_insert(DEFAULT_DELTA);
                if !(delta > 0.0 && delta < 1.0) {
                    return Err(invalid(format!("delta must lie in (0, 1), got {delta}")));
                }
                e.eta.get_or_insert(DEFAULT_ETA);
                let mu = *e.mu.get_or_insert(DEFAULT_MU);
                if !(mu > 0.0 && mu < 0.5) {
                    return Err(invalid(format!("mu must lie in (0, 1/2), got {mu}")));
                }
                if self.radii.is_empty() {
                    let limit = r.powf(1.0 - delta).min(r / 2.0);
                    self.radii = (1..=20).map(|k| limit * k as f64 / 20.0).collect();
                }
            }
            Subharmonic => {
                let r = *e.r.get_or_insert(1e4);
                if r < 100.0 {
                    return Err(invalid(format!("subharmonic needs R >= 100, got {r}")));
                }
                if *e.grid_density.get_or_insert(DEFAULT_GRID_DENSITY) < 10 {
                    return Err(invalid("grid_density must be at least 10"));
                }
                if self.radii.is_empty() {
                    self.radii = vec![1.0, r.sqrt(), r / 2.0];
                }
            }
            Combi => {
                let spec = self.sequence.get_or_insert(SequenceSpec::Constant {
                    theta: efetlab_core::taylor::CNum::real(1.0),
                    alpha: efetlab_core::taylor::CNum::real(1.0),
                });
                if e.d.is_none() {
                    let seq = CoefficientSequence::new(spec.clone()).map_err(|e| invalid(e.to_string()))?;
                    match seq.density_hint() {
                        Some(d) if d > 0.0 => e.d = Some(d),
                        _ => return Err(invalid("combi needs extra.d: the sequence declares no positive density")),
                    }
                }
                let r = *e.r.get_or_insert(1000.0);
                if r.fract() != 0.0 || r < 1.0 {
                    return Err(invalid(format!("combi needs a positive integer R, got {r}")));
                }
            }
        }
        if self.radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) || self.radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("radii must be positive and strictly increasing"));
        }
        // catches bad sequence parameters early
        self.coefficient_sequence()?;
        Ok(self)
    }
}
