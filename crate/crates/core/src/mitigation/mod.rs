//! Zero-noise extrapolation, readout inversion and the combined pipeline.

mod fit;
mod fold;
mod interp;

pub use fit::{exp_fit, exp_fit_bounded, zne_extrapolate, ExpFit, FitPoint, DEFAULT_B_MAX};
pub use fold::{fold_circuit, FoldSpec};
pub use interp::MonotoneCubic;

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::ReadoutModel;
use crate::circuit::{build, Circuit, Scheme};
use crate::engine::{averaged_eval, NoiseSpec, Quadrature, TransferMap};
use crate::error::{Error, Result};
use crate::oracle;

/// Smallest admissible `1 − q0 − q1` for readout inversion.
pub const MIN_READOUT_DETERMINANT: f64 = 0.1;

/// Scale factors used when none are given.
pub const DEFAULT_ALPHAS: [f64; 5] = [1.0, 1.5, 2.0, 2.5, 3.0];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvertedReadout {
    pub probs: [f64; 2],
    /// The raw inverse left `[0, 1]` and was clipped.
    pub overshoot: bool,
}

/// `Λ⁻¹ [m̃0, m̃1]`, clipped to `[0, 1]` and renormalized when it overshoots.
pub fn invert_readout(recorded: [f64; 2], q0: f64, q1: f64) -> Result<InvertedReadout> {
    let model = ReadoutModel::new(q0, q1)?;
    let det = model.determinant();
    if det < MIN_READOUT_DETERMINANT {
        return Err(Error::SingularReadout(det));
    }
    let raw = model.apply_inverse(recorded)?;
    let overshoot = raw.iter().any(|v| !(0.0..=1.0).contains(v));
    if !overshoot {
        return Ok(InvertedReadout { probs: raw, overshoot });
    }
    let clipped = raw.map(|v| v.clamp(0.0, 1.0));
    let sum = clipped[0] + clipped[1];
    let probs = if sum > 0.0 { clipped.map(|v| v / sum) } else { [0.5, 0.5] };
    Ok(InvertedReadout { probs, overshoot })
}

/// Parses comma-separated `alpha:value` pairs.
pub fn parse_points(text: &str) -> Result<Vec<FitPoint>> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let bad = || Error::Config(format!("expected alpha:value, got '{t}'"));
            let (a, v) = t.split_once(':').ok_or_else(bad)?;
            Ok(FitPoint::new(a.trim().parse().map_err(|_| bad())?, v.trim().parse().map_err(|_| bad())?))
        })
        .collect()
}

/// Input states for ZNE point generation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZneTarget {
    /// One initial state `(θ, φ)`.
    State { theta: f64, phi: f64 },
    /// Bloch-sphere average.
    Averaged(Quadrature),
}

/// Recorded success of `body` folded to each scale factor.
pub fn zne_points(body: &Circuit, spec: &NoiseSpec, alphas: &[f64], target: ZneTarget) -> Result<Vec<FitPoint>> {
    alphas
        .par_iter()
        .map(|&alpha| {
            let folded = fold_circuit(body, &FoldSpec::new(alpha))?;
            let value = match target {
                ZneTarget::State { theta, phi } => TransferMap::new(&folded, spec)?.eval(theta, phi).m0_recorded,
                ZneTarget::Averaged(quad) => averaged_eval(&folded, spec, quad)?.m0_recorded,
            };
            Ok(FitPoint::new(alpha, value))
        })
        .collect()
}

/// Engine-generated `p = 0` success curve `m̃₀(q)`, used to infer `q` where no
/// closed form exists.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QContour {
    pub scheme: Scheme,
    pub n: usize,
    pub kappa: f64,
    pub curve: MonotoneCubic,
}

impl QContour {
    /// Samples `knots` evenly spaced `q` values on `[0, 1]`.
    pub fn from_engine(scheme: Scheme, n: usize, template: &NoiseSpec, quad: Quadrature, knots: usize) -> Result<Self> {
        if knots < 2 {
            return Err(Error::Config("contour needs at least two knots".into()));
        }
        let body = build(scheme, n)?;
        let qs: Vec<f64> = (0..knots).map(|i| i as f64 / (knots - 1) as f64).collect();
        let ys = qs
            .par_iter()
            .map(|&q| averaged_eval(&body, &template.with_p(0.0).with_q(q), quad).map(|r| r.m0_recorded))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { scheme, n, kappa: template.kappa, curve: MonotoneCubic::new(qs, ys)? })
    }

    pub fn solve(&self, target: f64) -> Result<f64> {
        self.curve.solve(target)
    }
}

/// Where the readout estimate came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QSource {
    Oracle,
    Contour,
}

/// All intermediates of one mitigation run, mirroring a row of the
/// unmitigated / ZNE / readout-mitigated comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MitigationReport {
    pub scheme: Scheme,
    pub n: usize,
    pub kappa: f64,
    pub unmitigated: f64,
    pub q_hat: f64,
    pub q_source: QSource,
    pub points: Vec<FitPoint>,
    pub fit: ExpFit,
    pub zne_value: f64,
    pub zne_err: f64,
    pub final_value: f64,
    /// `zne_err / (1 − q0 − q1)`.
    pub final_err: f64,
    pub overshoot: bool,
}

impl MitigationReport {
    pub const HEADER: &'static str = "scheme     n  unmitigated  zne                    readout-mitigated";

    pub fn row(&self) -> String {
        format!(
            "{:<9} {:>2}  {:.5}      {:.5} ± {:.5}      {:.5} ± {:.5}{}",
            self.scheme.as_str(),
            self.n,
            self.unmitigated,
            self.zne_value,
            self.zne_err,
            self.final_value,
            self.final_err,
            if self.overshoot { "  (clipped)" } else { "" }
        )
    }
}

impl fmt::Display for MitigationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", Self::HEADER)?;
        write!(f, "{}", self.row())
    }
}

/// `q̂` from the unmitigated value, ZNE from `points`, then `Λ⁻¹` with
/// `(κ q̂, q̂)`.
///
/// At three qubits `q̂` comes from the closed form; longer chains need a
/// [`QContour`].
pub fn mitigate_pipeline(
    scheme: Scheme,
    n: usize,
    unmitigated: f64,
    points: &[FitPoint],
    kappa: f64,
    contour: Option<&QContour>,
) -> Result<MitigationReport> {
    let (q_hat, q_source) = match contour {
        Some(c) => {
            if c.scheme != scheme || c.n != n || c.kappa != kappa {
                return Err(Error::Config(format!(
                    "contour is for {} n={} kappa={}, pipeline asked for {scheme} n={n} kappa={kappa}",
                    c.scheme, c.n, c.kappa
                )));
            }
            (c.solve(unmitigated)?, QSource::Contour)
        }
        None if n == 3 => (oracle::solve_q(scheme, unmitigated, kappa)?, QSource::Oracle),
        None => return Err(Error::Config(format!("no closed form at n={n}; supply a q contour"))),
    };
    let fit = exp_fit(points)?;
    let (zne_value, zne_err) = zne_extrapolate(&fit);
    let e = zne_value.clamp(0.0, 1.0);
    let (q0, q1) = (kappa * q_hat, q_hat);
    let inverted = invert_readout([e, 1.0 - e], q0, q1)?;
    let det = 1.0 - q0 - q1;
    Ok(MitigationReport {
        scheme,
        n,
        kappa,
        unmitigated,
        q_hat,
        q_source,
        points: points.to_vec(),
        fit,
        zne_value,
        zne_err,
        final_value: inverted.probs[0],
        final_err: zne_err / det,
        overshoot: inverted.overshoot || e != zne_value,
    })
}
