use serde::{Deserialize, Serialize};

use crate::circuit::{build, NoisePlacement, Scheme};
use crate::engine::{averaged_eval, BranchWeighting, ConditionalNoise, NoiseSpec, Quadrature};
use crate::error::Result;

use super::{fidelity_kappa, m_tilde_kappa};

/// Agreement between the engine under one noise configuration and the
/// published series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationEntry {
    pub scheme: Scheme,
    pub placement: NoisePlacement,
    pub conditional_noise: ConditionalNoise,
    pub branch_weighting: BranchWeighting,
    pub max_success_diff: f64,
    pub max_fidelity_diff: f64,
}

impl CalibrationEntry {
    pub fn matches(&self, tol: f64) -> bool {
        self.max_success_diff < tol && self.max_fidelity_diff < tol
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub tolerance: f64,
    pub entries: Vec<CalibrationEntry>,
}

impl CalibrationReport {
    /// Matching configurations for `scheme`.
    pub fn matching(&self, scheme: Scheme) -> impl Iterator<Item = &CalibrationEntry> {
        self.entries.iter().filter(move |e| e.scheme == scheme && e.matches(self.tolerance))
    }
}

/// Evaluates every named placement, conditional-noise rule and branch
/// weighting for each scheme at three qubits on `grid × grid` and records the
/// largest deviation from the closed forms.
pub fn calibrate(schemes: &[Scheme], grid: &[f64], quad: Quadrature, tolerance: f64) -> Result<CalibrationReport> {
    let mut entries = Vec::new();
    for &scheme in schemes {
        let body = build(scheme, 3)?;
        for placement in NoisePlacement::NAMED {
            for conditional_noise in [ConditionalNoise::WhenApplied, ConditionalNoise::Always] {
                for branch_weighting in [BranchWeighting::Probability, BranchWeighting::Uniform] {
                    let base = NoiseSpec { placement, conditional_noise, branch_weighting, ..NoiseSpec::new(0.0, 0.0) };
                    let (mut ds, mut df) = (0.0f64, 0.0f64);
                    for &p in grid {
                        for &q in grid {
                            let spec = base.with_p(p).with_q(q);
                            let r = averaged_eval(&body, &spec, quad)?;
                            ds = ds.max((r.m0_recorded - m_tilde_kappa(scheme, q, p, spec.kappa)?).abs());
                            df = df.max((r.fidelity - fidelity_kappa(scheme, q, p, spec.kappa)?).abs());
                        }
                    }
                    entries.push(CalibrationEntry {
                        scheme,
                        placement,
                        conditional_noise,
                        branch_weighting,
                        max_success_diff: ds,
                        max_fidelity_diff: df,
                    });
                }
            }
        }
    }
    Ok(CalibrationReport { tolerance, entries })
}
