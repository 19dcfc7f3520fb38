//! Numerical invariants verified by `chainxfer check`.

use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::circuit::{build, Scheme};
use crate::engine::{averaged_eval, exact_eval, sample_shots, NoiseSpec, Quadrature};
use crate::error::{Error, Result};
use crate::mitigation::{fold_circuit, FoldSpec};
use crate::oracle::{self, Quantity};
use crate::sweep::{hellinger_fidelity, linspace};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub entries: Vec<CheckEntry>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    /// `Err(Invariant)` naming the failed checks, if any.
    pub fn into_result(self) -> Result<Self> {
        let failed: Vec<&str> = self.entries.iter().filter(|e| !e.passed).map(|e| e.name.as_str()).collect();
        if failed.is_empty() {
            Ok(self)
        } else {
            Err(Error::Invariant(format!("failed checks: {}", failed.join(", "))))
        }
    }

    fn push(&mut self, name: &str, outcome: Result<(bool, String)>) {
        let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        self.entries.push(CheckEntry { name: name.into(), passed, detail });
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(f, "{} {:<28} {}", if e.passed { "PASS" } else { "FAIL" }, e.name, e.detail)?;
        }
        Ok(())
    }
}

/// Largest `|engine − closed form|` for recorded success and fidelity over
/// `grid × grid` at three qubits under the calibrated noise policy.
pub fn oracle_deviation(scheme: Scheme, grid: &[f64], quad: Quadrature) -> Result<(f64, f64)> {
    let body = build(scheme, 3)?;
    let (mut ds, mut df) = (0.0f64, 0.0f64);
    for &p in grid {
        for &q in grid {
            let r = averaged_eval(&body, &NoiseSpec::oracle_matched(p, q), quad)?;
            ds = ds.max((r.m0_recorded - oracle::m_tilde(scheme, q, p)?).abs());
            df = df.max((r.fidelity - oracle::fidelity(scheme, q, p)?).abs());
        }
    }
    Ok((ds, df))
}

/// Runs the invariant suite. `grid_points` sets the (p, q) grid size of the
/// oracle comparison.
pub fn run_checks(grid_points: usize) -> CheckReport {
    let mut report = CheckReport::default();
    let grid = linspace(0.0, 1.0, grid_points.max(2));
    let quad = Quadrature::default();

    for s in [Scheme::Swap, Scheme::Teleport, Scheme::Cluster] {
        report.push(&format!("oracle-equivalence/{s}"), (|| {
            let (ds, df) = oracle_deviation(s, &grid, quad)?;
            Ok((ds < 1e-10 && df < 1e-10, format!("success {ds:.2e}, fidelity {df:.2e}")))
        })());
    }

    report.push("depolarized-limit", (|| {
        let half = BigRational::new(1.into(), 2.into());
        let (zero, p) = (oracle::exact(0.0), BigRational::new(3.into(), 4.into()));
        let mut ok = true;
        for s in [Scheme::Swap, Scheme::Teleport, Scheme::Cluster] {
            for qty in [Quantity::Success, Quantity::Fidelity] {
                ok &= oracle::evaluate_exact(s, qty, &zero, &p)? == half;
            }
        }
        Ok((ok, "all series equal 1/2 at p = 3/4".into()))
    })());

    report.push("zero-noise-identity", (|| {
        let mut worst = 0.0f64;
        for s in Scheme::TRANSFER {
            for n in [3, 5, 7].into_iter().filter(|&n| s.supports(n)) {
                let body = build(s, n)?;
                let e = exact_eval(&body, &NoiseSpec::noiseless(), 1.2, 0.7)?;
                let m = sample_shots(&body, &NoiseSpec::noiseless(), 1.2, 0.7, 64, 1)?;
                worst = worst.max((e.m0_recorded - 1.0).abs()).max((m.m0_recorded - 1.0).abs());
            }
        }
        Ok((worst < 1e-12, format!("max deviation {worst:.2e}")))
    })());

    report.push("ghz-teleport-equivalence", (|| {
        let (t, g) = (build(Scheme::Teleport, 3)?, build(Scheme::Ghz, 3)?);
        let mut worst = 0.0f64;
        for &p in &grid {
            for &q in &grid {
                let spec = NoiseSpec::oracle_matched(p, q);
                let d = averaged_eval(&t, &spec, quad)?.m0_recorded - averaged_eval(&g, &spec, quad)?.m0_recorded;
                worst = worst.max(d.abs());
            }
        }
        Ok((worst < 1e-12, format!("max difference {worst:.2e}")))
    })());

    report.push("quadrature-doubling", (|| {
        let mut worst = 0.0f64;
        for s in Scheme::TRANSFER {
            let body = build(s, 3)?;
            let spec = NoiseSpec::oracle_matched(0.3, 0.2);
            let (a, b) = (averaged_eval(&body, &spec, quad)?, averaged_eval(&body, &spec, quad.doubled())?);
            worst = worst.max((a.m0_recorded - b.m0_recorded).abs()).max((a.fidelity - b.fidelity).abs());
        }
        Ok((worst < 1e-12, format!("max change {worst:.2e}")))
    })());

    report.push("fold-zero-noise", (|| {
        let mut worst = 0.0f64;
        for s in Scheme::TRANSFER {
            let body = build(s, 3)?;
            for alpha in [1.0, 1.5, 3.0, 5.0] {
                let f = fold_circuit(&body, &FoldSpec::new(alpha))?;
                worst = worst.max((exact_eval(&f, &NoiseSpec::noiseless(), 0.8, 2.1)?.m0_true - 1.0).abs());
            }
        }
        Ok((worst < 1e-12, format!("max deviation {worst:.2e}")))
    })());

    report.push("hellinger-identities", (|| {
        let same = hellinger_fidelity(&[0.25, 0.75], &[0.25, 0.75])?;
        let disjoint = hellinger_fidelity(&[1.0, 0.0], &[0.0, 1.0])?;
        let half = hellinger_fidelity(&[1.0, 0.0], &[0.5, 0.5])?;
        let ok = same == 1.0 && disjoint == 0.0 && (half - 0.5).abs() < 1e-15;
        Ok((ok, format!("{same}, {disjoint}, {half}")))
    })());

    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_on_coarse_grid() {
        let r = run_checks(3);
        assert!(r.passed(), "{r}");
        assert!(r.into_result().is_ok());
    }

    #[test]
    fn failures_map_to_invariant_errors() {
        let mut r = CheckReport::default();
        r.push("broken", Ok((false, String::new())));
        let e = r.into_result().unwrap_err();
        assert_eq!(e.exit_code(), 3);
    }
}
