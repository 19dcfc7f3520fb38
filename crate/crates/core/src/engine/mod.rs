//! Noisy evaluation of wrapped transfer circuits.
//!
//! Two engines share one noise model: an exact density-matrix evaluator that
//! enumerates measurement branches, and a seeded statevector trajectory
//! sampler. Bloch-sphere averages use product Gauss–Legendre quadrature.

mod exact;
mod quadrature;
mod sampler;
mod transfer;

pub use exact::{evaluate, exact_eval, exact_fidelity, register_distribution};
pub use quadrature::{bloch_average, gauss_legendre, try_bloch_average, Quadrature};
pub use sampler::{sample_shots, sample_wrapped};
pub use transfer::{averaged_eval, AveragedResult, RegisterMap, TransferMap};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channels::ReadoutModel;
use crate::circuit::NoisePlacement;
use crate::error::{Error, Result};

/// How readout error on mid-circuit measurements reaches the conditional gates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReadoutMode {
    /// Branch on the true outcome; each conditional gate misfires with
    /// probability `q0` (true bit 0) or `q1` (true bit 1), independently.
    FlipChannelApprox,
    /// Branch on the true and the recorded bit; every conditional reading a
    /// bit follows the same recorded value.
    ExactRecord,
}

/// When a conditional gate receives its noise channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConditionalNoise {
    WhenApplied,
    Always,
}

/// Weight given to mid-circuit measurement branches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchWeighting {
    /// Born probabilities.
    Probability,
    /// Each outcome with non-zero probability counts equally.
    Uniform,
}

macro_rules! kebab_enum {
    ($ty:ident { $($var:ident => $name:literal),+ $(,)? }) => {
        impl $ty {
            pub fn as_str(self) -> &'static str {
                match self { $($ty::$var => $name),+ }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s.trim().to_ascii_lowercase().as_str() {
                    $($name => Ok($ty::$var),)+
                    other => Err(Error::Config(format!(concat!("unknown ", stringify!($ty), " '{}'"), other))),
                }
            }
        }
    };
}

kebab_enum!(ReadoutMode { FlipChannelApprox => "flip-channel-approx", ExactRecord => "exact-record" });
kebab_enum!(ConditionalNoise { WhenApplied => "when-applied", Always => "always" });
kebab_enum!(BranchWeighting { Probability => "probability", Uniform => "uniform" });

/// Full error configuration of one evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Depolarizing probability after each selected gate, per qubit.
    pub p: f64,
    /// Readout parameter: `q1 = q`, `q0 = κ q`.
    pub q: f64,
    pub kappa: f64,
    pub placement: NoisePlacement,
    pub readout_mode: ReadoutMode,
    pub conditional_noise: ConditionalNoise,
    pub branch_weighting: BranchWeighting,
}

impl NoiseSpec {
    /// Body gates and conditionals are noisy, conditionals only when they
    /// fire, mid-circuit readout handled by the flip-channel surrogate.
    pub fn new(p: f64, q: f64) -> Self {
        Self {
            p,
            q,
            kappa: ReadoutModel::DEFAULT_KAPPA,
            placement: NoisePlacement::AllGates,
            readout_mode: ReadoutMode::FlipChannelApprox,
            conditional_noise: ConditionalNoise::WhenApplied,
            branch_weighting: BranchWeighting::Probability,
        }
    }

    /// The configuration that reproduces the closed-form three-qubit series:
    /// noise after every gate including initializer and disentangler, and on
    /// conditional gates whether or not they fire.
    pub fn oracle_matched(p: f64, q: f64) -> Self {
        Self {
            placement: NoisePlacement::AllGatesIncludingBoundary,
            conditional_noise: ConditionalNoise::Always,
            ..Self::new(p, q)
        }
    }

    pub fn noiseless() -> Self {
        Self::new(0.0, 0.0)
    }

    pub fn with_p(self, p: f64) -> Self {
        Self { p, ..self }
    }

    pub fn with_q(self, q: f64) -> Self {
        Self { q, ..self }
    }

    pub fn with_readout_mode(self, readout_mode: ReadoutMode) -> Self {
        Self { readout_mode, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("p", self.p), ("q", self.q)] {
            if !(0.0..=1.0).contains(&v) || v.is_nan() {
                return Err(Error::Probability { name, value: v });
            }
        }
        if !(self.kappa >= 0.0) || self.kappa * self.q > 1.0 {
            return Err(Error::Noise(format!("kappa = {} gives q0 = {} outside [0, 1]", self.kappa, self.kappa * self.q)));
        }
        Ok(())
    }

    pub fn readout(&self) -> ReadoutModel {
        ReadoutModel { q0: self.kappa * self.q, q1: self.q }
    }

    /// Bloch-vector shrink factor `1 − 4p/3` of one depolarizing channel.
    pub fn shrink(&self) -> f64 {
        1.0 - 4.0 * self.p / 3.0
    }
}

/// Outcome of one evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    /// Probability of outcome 0 on the final measurement, before readout error.
    pub m0_true: f64,
    /// The same after the final readout response.
    pub m0_recorded: f64,
    pub fidelity: Option<f64>,
    pub stderr: Option<f64>,
    pub shots: Option<u64>,
    /// Largest number of simultaneously tracked branches (1 for the sampler).
    pub branch_count: usize,
}
