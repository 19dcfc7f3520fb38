//! Parameter sweeps, scheme comparison, Hellinger fidelity and CSV/manifest output.

mod config;
mod metrics;
mod record;

pub use config::{linspace, parse_grid, parse_list, Averaging, Mode, SweepConfig, DEFAULT_HAAR_STATES};
pub use metrics::{derive_seed, haar_sample, hellinger_fidelity, mean_stderr};
pub use record::{
    format_sig, read_csv, round_sig, to_csv_string, write_csv, SurfaceRecord, CSV_HEADER, SIGNIFICANT_DIGITS,
};

use std::fmt;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{build, wrap_protocol, Circuit, NoisePlacement, Scheme};
use crate::engine::{
    averaged_eval, exact_eval, exact_fidelity, register_distribution, sample_shots, try_bloch_average,
    BranchWeighting, ConditionalNoise, NoiseSpec, RegisterMap, TransferMap,
};
use crate::error::{Error, Result};
use crate::oracle;

/// One point of the sweep grid, in output order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridPoint {
    pub index: usize,
    pub scheme: Scheme,
    pub n: usize,
    pub p: f64,
    pub q: f64,
}

/// Grid in output order: scheme, then n, then p, then q.
pub fn grid_points(cfg: &SweepConfig) -> Vec<GridPoint> {
    let mut out = Vec::new();
    for &scheme in &cfg.schemes {
        for &n in &cfg.n_list {
            for &p in &cfg.p_grid {
                for &q in &cfg.q_grid {
                    out.push(GridPoint { index: out.len(), scheme, n, p, q });
                }
            }
        }
    }
    out
}

/// Initial states and weights for one averaging rule.
fn states(av: Averaging) -> Vec<(f64, f64, f64)> {
    match av {
        Averaging::Quadrature(quad) => quad.nodes(),
        Averaging::Haar { count, seed } => {
            haar_sample(seed, count).into_iter().map(|(t, f)| (t, f, 1.0 / count as f64)).collect()
        }
    }
}

fn weighted_mean(xs: &[f64], states: &[(f64, f64, f64)]) -> f64 {
    xs.iter().zip(states).map(|(x, s)| x * s.2).sum()
}

/// Spread of per-state estimates for Haar averaging; propagated per-state
/// errors for quadrature.
fn combined_stderr(av: Averaging, values: &[f64], errs: &[Option<f64>], states: &[(f64, f64, f64)]) -> Option<f64> {
    match av {
        Averaging::Haar { .. } if values.len() >= 2 => mean_stderr(values).1,
        _ => {
            let mut acc = 0.0;
            for (e, s) in errs.iter().zip(states) {
                acc += (e.unwrap_or(0.0) * s.2).powi(2);
            }
            errs.iter().any(Option::is_some).then(|| acc.sqrt())
        }
    }
}

/// Evaluates one grid point under `cfg`.
pub fn evaluate_point(cfg: &SweepConfig, body: &Circuit, pt: GridPoint) -> Result<SurfaceRecord> {
    let av = cfg.averaging();
    let spec = cfg.noise(pt.p, pt.q);
    let mut rec = SurfaceRecord {
        scheme: pt.scheme,
        n: pt.n,
        p: pt.p,
        q: pt.q,
        success_recorded: 0.0,
        success_true: 0.0,
        fidelity: None,
        hellinger: None,
        stderr: None,
        shots: None,
        seed: None,
        oracle_diff: None,
    };
    match (cfg.mode, av) {
        (Mode::Exact, Averaging::Quadrature(quad)) => {
            let r = averaged_eval(body, &spec, quad)?;
            rec.success_recorded = r.m0_recorded;
            rec.success_true = r.m0_true;
            rec.fidelity = Some(r.fidelity);
        }
        (Mode::Exact, Averaging::Haar { .. }) => {
            let st = states(av);
            let map = match spec.branch_weighting {
                BranchWeighting::Probability => Some(TransferMap::new(body, &spec)?),
                BranchWeighting::Uniform => None,
            };
            let (mut rec0, mut tru0, mut fid) = (Vec::new(), Vec::new(), Vec::new());
            for &(t, f, _) in &st {
                let (r, fi) = match &map {
                    Some(m) => (m.eval(t, f), m.fidelity(t, f)),
                    None => (exact_eval(body, &spec, t, f)?, exact_fidelity(body, &spec, t, f)?),
                };
                rec0.push(r.m0_recorded);
                tru0.push(r.m0_true);
                fid.push(fi);
            }
            rec.success_recorded = weighted_mean(&rec0, &st);
            rec.success_true = weighted_mean(&tru0, &st);
            rec.fidelity = Some(weighted_mean(&fid, &st));
            rec.stderr = combined_stderr(av, &rec0, &[], &st);
        }
        (Mode::Shots(shots), _) => {
            let st = states(av);
            let point_seed = derive_seed(cfg.seed, pt.index as u64);
            let runs = st
                .iter()
                .enumerate()
                .map(|(k, &(t, f, _))| sample_shots(body, &spec, t, f, shots, derive_seed(point_seed, k as u64)))
                .collect::<Result<Vec<_>>>()?;
            let rec0: Vec<f64> = runs.iter().map(|r| r.m0_recorded).collect();
            let tru0: Vec<f64> = runs.iter().map(|r| r.m0_true).collect();
            let errs: Vec<Option<f64>> = runs.iter().map(|r| r.stderr).collect();
            rec.success_recorded = weighted_mean(&rec0, &st);
            rec.success_true = weighted_mean(&tru0, &st);
            rec.stderr = combined_stderr(av, &rec0, &errs, &st);
            rec.shots = Some(shots);
            rec.seed = Some(point_seed);
        }
    }
    if cfg.hellinger {
        rec.hellinger = Some(averaged_hellinger(body, &spec, av)?);
    }
    if cfg.oracle_overlay && pt.n == 3 {
        let want = oracle::m_tilde_kappa(pt.scheme, pt.q, pt.p, cfg.kappa)?;
        rec.oracle_diff = Some((rec.success_recorded - want).abs());
    }
    check_record(&rec)?;
    Ok(rec.quantized())
}

/// Probabilities below this are round-off and are zeroed before the
/// Hellinger overlap, whose square roots would otherwise amplify them.
const ROUND_OFF: f64 = 1e-14;

/// Hellinger fidelity of the full recorded register against the noiseless
/// run, averaged over initial states.
pub fn averaged_hellinger(body: &Circuit, spec: &NoiseSpec, av: Averaging) -> Result<f64> {
    let ideal = spec.with_p(0.0).with_q(0.0);
    let maps = match spec.branch_weighting {
        BranchWeighting::Probability => Some((RegisterMap::new(body, spec)?, RegisterMap::new(body, &ideal)?)),
        BranchWeighting::Uniform => None,
    };
    let floor = |mut d: Vec<f64>| {
        d.iter_mut().filter(|v| **v < ROUND_OFF).for_each(|v| *v = 0.0);
        d
    };
    let one = |t: f64, f: f64| -> Result<f64> {
        let (a, b) = match &maps {
            Some((noisy, clean)) => (noisy.distribution(t, f), clean.distribution(t, f)),
            None => {
                let w = wrap_protocol(body, t, f);
                (register_distribution(&w, spec)?, register_distribution(&w, &ideal)?)
            }
        };
        hellinger_fidelity(&floor(a), &floor(b))
    };
    match av {
        Averaging::Quadrature(quad) => try_bloch_average(one, quad),
        Averaging::Haar { .. } => {
            let st = states(av);
            let vals = st.iter().map(|&(t, f, _)| one(t, f)).collect::<Result<Vec<_>>>()?;
            Ok(weighted_mean(&vals, &st))
        }
    }
}

const PROBABILITY_SLACK: f64 = 1e-9;

fn check_record(r: &SurfaceRecord) -> Result<()> {
    let fields = [
        ("success_recorded", Some(r.success_recorded)),
        ("success_true", Some(r.success_true)),
        ("fidelity", r.fidelity),
        ("hellinger", r.hellinger),
    ];
    for (name, v) in fields {
        if let Some(v) = v {
            if !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&v) {
                return Err(Error::Invariant(format!(
                    "{name} = {v} outside [0, 1] at {} n={} p={} q={}",
                    r.scheme, r.n, r.p, r.q
                )));
            }
        }
    }
    Ok(())
}

/// Every grid point of `cfg`, in grid order.
pub fn evaluate_grid(cfg: &SweepConfig) -> Result<Vec<SurfaceRecord>> {
    cfg.validate()?;
    let mut bodies = std::collections::BTreeMap::new();
    for &s in &cfg.schemes {
        for &n in &cfg.n_list {
            bodies.insert((s, n), build(s, n)?);
        }
    }
    let pts = grid_points(cfg);
    let eval = |pt: &GridPoint| evaluate_point(cfg, &bodies[&(pt.scheme, pt.n)], *pt);
    if cfg.parallel {
        pts.par_iter().map(eval).collect()
    } else {
        pts.iter().map(eval).collect()
    }
}

/// Noise policy applied to one scheme, next to the policy that reproduces
/// the closed forms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyEntry {
    pub scheme: Scheme,
    pub placement: NoisePlacement,
    pub conditional_noise: ConditionalNoise,
    pub calibrated_placement: NoisePlacement,
    pub calibrated_conditional_noise: ConditionalNoise,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: SweepConfig,
    /// Averaging rule after defaults were resolved.
    pub averaging: String,
    pub policies: Vec<PolicyEntry>,
    pub columns: Vec<String>,
    pub record_count: usize,
    pub wall_time_s: f64,
    pub csv: Option<PathBuf>,
}

impl RunManifest {
    pub fn new(command: &str, cfg: &SweepConfig, record_count: usize, wall_time_s: f64) -> Self {
        let calibrated = NoiseSpec::oracle_matched(0.0, 0.0);
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config: cfg.clone(),
            averaging: cfg.averaging().to_string(),
            policies: cfg
                .schemes
                .iter()
                .map(|&scheme| PolicyEntry {
                    scheme,
                    placement: cfg.placement,
                    conditional_noise: cfg.conditional_noise,
                    calibrated_placement: calibrated.placement,
                    calibrated_conditional_noise: calibrated.conditional_noise,
                })
                .collect(),
            columns: CSV_HEADER.iter().map(|s| s.to_string()).collect(),
            record_count,
            wall_time_s,
            csv: cfg.output.clone(),
        }
    }
}

/// `out.csv` → `out.manifest.json` in the same directory.
pub fn manifest_path(csv: &Path) -> PathBuf {
    let stem = csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "sweep".into());
    csv.with_file_name(format!("{stem}.manifest.json"))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepOutput {
    pub records: Vec<SurfaceRecord>,
    pub manifest: RunManifest,
}

/// Writes `records` to `path` and the manifest beside it.
pub fn write_outputs(path: &Path, records: &[SurfaceRecord], manifest: &RunManifest) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    write_csv(BufWriter::new(File::create(path)?), records)?;
    let mut m = manifest.clone();
    m.csv = Some(path.to_path_buf());
    std::fs::write(manifest_path(path), serde_json::to_string_pretty(&m)? + "\n")?;
    Ok(())
}

/// Evaluates the grid and, when `cfg.output` is set, writes CSV and manifest.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutput> {
    let start = Instant::now();
    let records = evaluate_grid(cfg)?;
    let manifest = RunManifest::new("sweep", cfg, records.len(), start.elapsed().as_secs_f64());
    if let Some(path) = &cfg.output {
        write_outputs(path, &records, &manifest)?;
    }
    Ok(SweepOutput { records, manifest })
}

/// Closed-form surfaces on the config grid, in the sweep CSV schema.
pub fn oracle_records(cfg: &SweepConfig) -> Result<Vec<SurfaceRecord>> {
    if cfg.n_list.iter().any(|&n| n != 3) {
        return Err(Error::Config("closed forms exist only for n = 3".into()));
    }
    let mut cfg = cfg.clone();
    cfg.mode = Mode::Exact;
    cfg.validate()?;
    grid_points(&cfg)
        .into_iter()
        .map(|pt| {
            let m0 = oracle::m0bar(pt.scheme, pt.q, pt.p, cfg.kappa)?;
            Ok(SurfaceRecord {
                scheme: pt.scheme,
                n: 3,
                p: pt.p,
                q: pt.q,
                success_recorded: oracle::nominal_success(m0, pt.q, cfg.kappa),
                success_true: m0,
                fidelity: Some(oracle::fidelity_kappa(pt.scheme, pt.q, pt.p, cfg.kappa)?),
                hellinger: None,
                stderr: None,
                shots: None,
                seed: None,
                oracle_diff: None,
            }
            .quantized())
        })
        .collect()
}

/// Mean success of one scheme at one chain length and noise point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub n: usize,
    pub scheme: Scheme,
    pub p: f64,
    pub q: f64,
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareTable {
    pub schemes: Vec<Scheme>,
    pub rows: Vec<CompareRow>,
}

impl CompareTable {
    pub fn get(&self, n: usize, scheme: Scheme, p: f64, q: f64) -> Option<&CompareRow> {
        self.rows.iter().find(|r| r.n == n && r.scheme == scheme && r.p == p && r.q == q)
    }
}

impl fmt::Display for CompareTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:>3} {:>8} {:>8}", "n", "p", "q")?;
        for s in &self.schemes {
            write!(f, "  {:<21}", s.as_str())?;
        }
        writeln!(f)?;
        let mut keys: Vec<(usize, f64, f64)> = Vec::new();
        for r in &self.rows {
            if !keys.contains(&(r.n, r.p, r.q)) {
                keys.push((r.n, r.p, r.q));
            }
        }
        keys.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.total_cmp(&b.2)));
        for (n, p, q) in keys {
            write!(f, "{n:>3} {p:>8.4} {q:>8.4}")?;
            for &s in &self.schemes {
                match self.get(n, s, p, q) {
                    Some(r) if r.stderr > 0.0 => write!(f, "  {:<21}", format!("{:.6} ± {:.6}", r.mean, r.stderr))?,
                    Some(r) => write!(f, "  {:<21.6}", r.mean)?,
                    None => write!(f, "  {:<21}", "-")?,
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Per-n, per-scheme recorded success with its standard error (zero when the
/// averaging is exact).
///
/// Schemes that do not support a given `n` are skipped rather than rejected.
pub fn compare_schemes(cfg: &SweepConfig) -> Result<CompareTable> {
    let mut rows = Vec::new();
    for &scheme in &cfg.schemes {
        let ns: Vec<usize> = cfg.n_list.iter().copied().filter(|&n| scheme.supports(n)).collect();
        if ns.is_empty() {
            continue;
        }
        let sub = SweepConfig { schemes: vec![scheme], n_list: ns, hellinger: false, output: None, ..cfg.clone() };
        for r in evaluate_grid(&sub)? {
            rows.push(CompareRow {
                n: r.n,
                scheme: r.scheme,
                p: r.p,
                q: r.q,
                mean: r.success_recorded,
                stderr: r.stderr.unwrap_or(0.0),
            });
        }
    }
    Ok(CompareTable { schemes: cfg.schemes.clone(), rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Quadrature;

    fn small() -> SweepConfig {
        SweepConfig {
            p_grid: vec![0.0, 0.1],
            q_grid: vec![0.0, 0.2],
            averaging: Some(Averaging::Quadrature(Quadrature::new(4, 4).unwrap())),
            ..Default::default()
        }
    }

    #[test]
    fn zero_grid_is_all_ones() {
        let cfg = SweepConfig { p_grid: vec![0.0], q_grid: vec![0.0], ..Default::default() };
        let out = run_sweep(&cfg).unwrap();
        assert_eq!(out.records.len(), 4);
        assert!(out.records.iter().all(|r| r.success_recorded == 1.0 && r.fidelity == Some(1.0)));
    }

    #[test]
    fn csv_round_trip_is_field_exact() {
        let cfg = SweepConfig { oracle_overlay: true, hellinger: true, ..small() };
        let recs = evaluate_grid(&cfg).unwrap();
        let text = to_csv_string(&recs).unwrap();
        assert!(text.starts_with(&CSV_HEADER.join(",")));
        assert_eq!(read_csv(text.as_bytes()).unwrap(), recs);
    }

    #[test]
    fn parallel_matches_serial() {
        let cfg = SweepConfig { mode: Mode::Shots(64), n_list: vec![3], seed: 5, ..small() };
        let a = evaluate_grid(&cfg).unwrap();
        let b = evaluate_grid(&SweepConfig { parallel: false, ..cfg }).unwrap();
        assert_eq!(to_csv_string(&a).unwrap(), to_csv_string(&b).unwrap());
    }

    #[test]
    fn overlay_matches_closed_form() {
        let cfg = SweepConfig { oracle_overlay: true, ..small() };
        for r in evaluate_grid(&cfg).unwrap() {
            assert!(r.oracle_diff.unwrap() < 1e-10, "{r:?}");
        }
    }

    #[test]
    fn oracle_records_match_engine() {
        let cfg = small();
        let o = oracle_records(&cfg).unwrap();
        let e = evaluate_grid(&cfg).unwrap();
        for (a, b) in o.iter().zip(&e) {
            assert!((a.success_recorded - b.success_recorded).abs() < 1e-10);
        }
        assert!(oracle_records(&SweepConfig { n_list: vec![5], ..cfg }).is_err());
    }

    #[test]
    fn manifest_beside_csv() {
        assert_eq!(manifest_path(Path::new("out/a.csv")), Path::new("out/a.manifest.json"));
    }

    #[test]
    fn compare_skips_unsupported_lengths() {
        let cfg = SweepConfig { n_list: vec![3, 4], p_grid: vec![0.0], q_grid: vec![0.0], ..small() };
        let t = compare_schemes(&cfg).unwrap();
        assert!(t.get(4, Scheme::Teleport, 0.0, 0.0).is_none());
        assert_eq!(t.get(4, Scheme::Ghz, 0.0, 0.0).unwrap().mean, 1.0);
        assert!(t.to_string().lines().count() == 3);
    }
}
