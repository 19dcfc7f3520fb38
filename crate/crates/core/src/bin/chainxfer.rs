use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use chainxfer::checks::run_checks;
use chainxfer::circuit::{build, write_circuit, NoisePlacement, Scheme};
use chainxfer::engine::{BranchWeighting, ConditionalNoise, Quadrature, ReadoutMode};
use chainxfer::mitigation::{
    exp_fit, fold_circuit, mitigate_pipeline, parse_points, zne_extrapolate, zne_points, FitPoint, FoldSpec,
    MitigationReport, QContour, ZneTarget, DEFAULT_ALPHAS,
};
use chainxfer::oracle;
use chainxfer::sweep::{
    compare_schemes, oracle_records, parse_grid, parse_list, run_sweep, to_csv_string, write_outputs, Averaging,
    Mode, RunManifest, SweepConfig,
};
use chainxfer::{Error, Result};

#[derive(Parser)]
#[command(name = "chainxfer", version, about = "Noisy state transfer along a qubit chain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate success and fidelity surfaces over a (p, q) grid.
    Sweep(SweepArgs),
    /// Tabulate mean success per scheme and chain length.
    Compare {
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long)]
        json: bool,
    },
    /// Closed-form three-qubit surfaces in the sweep CSV schema.
    Oracle {
        #[command(flatten)]
        sweep: SweepArgs,
        /// Print the readout parameter reproducing this p = 0 success instead.
        #[arg(long)]
        solve_q: Option<f64>,
    },
    /// Fold, evaluate and extrapolate to zero gate noise.
    Zne {
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        zne: ZneArgs,
    },
    /// Full pipeline: extrapolation, readout estimate and response inversion.
    Mitigate {
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        zne: ZneArgs,
        /// Measured unmitigated value; requires --points.
        #[arg(long, requires = "points")]
        unmitigated: Option<f64>,
        /// Measured `alpha:value` pairs, comma-separated.
        #[arg(long, requires = "unmitigated")]
        points: Option<String>,
        /// Knots of the engine p = 0 contour used beyond three qubits.
        #[arg(long, default_value_t = 101)]
        contour_knots: usize,
    },
    /// Run the numerical invariant suite.
    Check {
        /// Points per axis of the oracle comparison grid.
        #[arg(long, default_value_t = 11)]
        grid: usize,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Clone, Default)]
struct SweepArgs {
    /// JSON object or `key = value` lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated scheme names.
    #[arg(long)]
    schemes: Option<String>,
    /// Comma-separated chain lengths.
    #[arg(long = "n")]
    n_list: Option<String>,
    /// `a,b,c` or `start:stop:count`.
    #[arg(long)]
    p_grid: Option<String>,
    #[arg(long)]
    q_grid: Option<String>,
    #[arg(long)]
    kappa: Option<f64>,
    /// `exact` or `shots:<count>`.
    #[arg(long)]
    mode: Option<String>,
    /// `quadrature:<n>[x<m>]` or `haar:<count>[:<seed>]`.
    #[arg(long)]
    averaging: Option<String>,
    #[arg(long)]
    placement: Option<String>,
    #[arg(long)]
    readout_mode: Option<String>,
    #[arg(long)]
    conditional_noise: Option<String>,
    #[arg(long)]
    branch_weighting: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV path; the manifest is written beside it.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long)]
    oracle_overlay: bool,
    #[arg(long)]
    hellinger: bool,
    /// Evaluate grid points on one thread.
    #[arg(long)]
    serial: bool,
    /// Print the circuits that would be evaluated and exit.
    #[arg(long)]
    dump_circuit: bool,
}

#[derive(Args, Clone)]
struct ZneArgs {
    /// Comma-separated fold scale factors.
    #[arg(long)]
    alphas: Option<String>,
    /// Initial state polar angle; Bloch average when omitted.
    #[arg(long, requires = "phi")]
    theta: Option<f64>,
    #[arg(long, requires = "theta")]
    phi: Option<f64>,
    #[arg(long)]
    json: bool,
}

impl SweepArgs {
    fn resolve(&self) -> Result<SweepConfig> {
        let mut c = match &self.config {
            Some(path) => SweepConfig::load(path)?,
            None => SweepConfig::default(),
        };
        if let Some(s) = &self.schemes {
            c.schemes = parse_list::<Scheme>(s)?;
        }
        if let Some(s) = &self.n_list {
            c.n_list = parse_list(s)?;
        }
        if let Some(s) = &self.p_grid {
            c.p_grid = parse_grid(s)?;
        }
        if let Some(s) = &self.q_grid {
            c.q_grid = parse_grid(s)?;
        }
        if let Some(k) = self.kappa {
            c.kappa = k;
        }
        if let Some(s) = &self.mode {
            c.mode = s.parse()?;
        }
        if let Some(s) = &self.averaging {
            c.averaging = Some(s.parse()?);
        }
        if let Some(s) = &self.placement {
            c.placement = s.parse::<NoisePlacement>()?;
        }
        if let Some(s) = &self.readout_mode {
            c.readout_mode = s.parse::<ReadoutMode>()?;
        }
        if let Some(s) = &self.conditional_noise {
            c.conditional_noise = s.parse::<ConditionalNoise>()?;
        }
        if let Some(s) = &self.branch_weighting {
            c.branch_weighting = s.parse::<BranchWeighting>()?;
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if self.output.is_some() {
            c.output = self.output.clone();
        }
        c.oracle_overlay |= self.oracle_overlay;
        c.hellinger |= self.hellinger;
        c.parallel &= !self.serial;
        Ok(c)
    }
}

impl ZneArgs {
    fn alphas(&self) -> Result<Vec<f64>> {
        self.alphas.as_deref().map_or(Ok(DEFAULT_ALPHAS.to_vec()), parse_list)
    }

    fn target(&self, cfg: &SweepConfig) -> ZneTarget {
        match (self.theta, self.phi) {
            (Some(theta), Some(phi)) => ZneTarget::State { theta, phi },
            _ => ZneTarget::Averaged(match cfg.averaging() {
                Averaging::Quadrature(q) => q,
                Averaging::Haar { .. } => Quadrature::default(),
            }),
        }
    }
}

fn dump_circuits(cfg: &SweepConfig, alphas: &[f64]) -> Result<()> {
    let mut out = io::stdout().lock();
    for &s in &cfg.schemes {
        for &n in &cfg.n_list {
            let body = build(s, n)?;
            for &alpha in alphas {
                writeln!(out, "# {s} n={n} alpha={alpha}")?;
                write!(out, "{}", write_circuit(&fold_circuit(&body, &FoldSpec::new(alpha))?))?;
            }
        }
    }
    Ok(())
}

fn emit_records(cfg: &SweepConfig, records: &[chainxfer::sweep::SurfaceRecord], manifest: &RunManifest) -> Result<()> {
    match &cfg.output {
        Some(path) => {
            write_outputs(path, records, manifest)?;
            eprintln!("wrote {} records to {}", records.len(), path.display());
        }
        None => {
            print!("{}", to_csv_string(records)?);
            eprintln!("{}", serde_json::to_string(manifest)?);
        }
    }
    Ok(())
}

fn print_json<T: Serialize>(v: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn exact_only(cfg: &SweepConfig, what: &str) -> Result<()> {
    if cfg.mode != Mode::Exact {
        return Err(Error::Config(format!("{what} runs on the exact engine; drop --mode")));
    }
    cfg.validate()
}

#[derive(Serialize)]
struct ZneRow {
    scheme: Scheme,
    n: usize,
    p: f64,
    q: f64,
    points: Vec<FitPoint>,
    fit: chainxfer::mitigation::ExpFit,
    value: f64,
    err: f64,
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sweep(args) => {
            let cfg = args.resolve()?;
            if args.dump_circuit {
                return dump_circuits(&cfg, &[1.0]);
            }
            let out = run_sweep(&SweepConfig { output: None, ..cfg.clone() })?;
            emit_records(&cfg, &out.records, &out.manifest)
        }
        Command::Compare { sweep, json } => {
            let cfg = sweep.resolve()?;
            if sweep.dump_circuit {
                return dump_circuits(&cfg, &[1.0]);
            }
            let table = compare_schemes(&cfg)?;
            if json {
                print_json(&table)
            } else {
                print!("{table}");
                Ok(())
            }
        }
        Command::Oracle { sweep, solve_q } => {
            let cfg = sweep.resolve()?;
            if let Some(target) = solve_q {
                for &s in &cfg.schemes {
                    println!("{s}\t{}", oracle::solve_q(s, target, cfg.kappa)?);
                }
                return Ok(());
            }
            let start = Instant::now();
            let records = oracle_records(&cfg)?;
            let manifest = RunManifest::new("oracle", &cfg, records.len(), start.elapsed().as_secs_f64());
            emit_records(&cfg, &records, &manifest)
        }
        Command::Zne { sweep, zne } => {
            let cfg = sweep.resolve()?;
            let alphas = zne.alphas()?;
            if sweep.dump_circuit {
                return dump_circuits(&cfg, &alphas);
            }
            exact_only(&cfg, "zne")?;
            let mut rows = Vec::new();
            for &scheme in &cfg.schemes {
                for &n in &cfg.n_list {
                    let body = build(scheme, n)?;
                    for &p in &cfg.p_grid {
                        for &q in &cfg.q_grid {
                            let points = zne_points(&body, &cfg.noise(p, q), &alphas, zne.target(&cfg))?;
                            let fit = exp_fit(&points)?;
                            let (value, err) = zne_extrapolate(&fit);
                            rows.push(ZneRow { scheme, n, p, q, points, fit, value, err });
                        }
                    }
                }
            }
            if zne.json {
                return print_json(&rows);
            }
            println!("scheme     n       p       q   E(1)        E(0)        ±");
            for r in &rows {
                let e1 = r.points.iter().find(|p| p.alpha == 1.0).map_or(f64::NAN, |p| p.value);
                println!(
                    "{:<9} {:>2} {:>7.4} {:>7.4}   {:.8}  {:.8}  {:.2e}",
                    r.scheme.as_str(),
                    r.n,
                    r.p,
                    r.q,
                    e1,
                    r.value,
                    r.err
                );
            }
            Ok(())
        }
        Command::Mitigate { sweep, zne, unmitigated, points, contour_knots } => {
            let cfg = sweep.resolve()?;
            let alphas = zne.alphas()?;
            if sweep.dump_circuit {
                return dump_circuits(&cfg, &alphas);
            }
            let mut reports: Vec<MitigationReport> = Vec::new();
            if let (Some(u), Some(pts)) = (unmitigated, points) {
                let pts = parse_points(&pts)?;
                for &scheme in &cfg.schemes {
                    for &n in &cfg.n_list {
                        let contour = contour_for(&cfg, scheme, n, contour_knots)?;
                        reports.push(mitigate_pipeline(scheme, n, u, &pts, cfg.kappa, contour.as_ref())?);
                    }
                }
            } else {
                exact_only(&cfg, "mitigate")?;
                for &scheme in &cfg.schemes {
                    for &n in &cfg.n_list {
                        let body = build(scheme, n)?;
                        let contour = contour_for(&cfg, scheme, n, contour_knots)?;
                        for &p in &cfg.p_grid {
                            for &q in &cfg.q_grid {
                                let pts = zne_points(&body, &cfg.noise(p, q), &alphas, zne.target(&cfg))?;
                                let u = pts
                                    .iter()
                                    .find(|pt| pt.alpha == 1.0)
                                    .ok_or_else(|| Error::Config("scale factors must include 1".into()))?
                                    .value;
                                reports.push(mitigate_pipeline(scheme, n, u, &pts, cfg.kappa, contour.as_ref())?);
                            }
                        }
                    }
                }
            }
            if zne.json {
                return print_json(&reports);
            }
            println!("{}", MitigationReport::HEADER);
            for r in &reports {
                println!("{}   q̂ = {:.5} ({:?})", r.row(), r.q_hat, r.q_source);
            }
            Ok(())
        }
        Command::Check { grid, json } => {
            let report = run_checks(grid);
            if json {
                print_json(&report)?;
            } else {
                print!("{report}");
            }
            report.into_result().map(|_| ())
        }
    }
}

fn contour_for(cfg: &SweepConfig, scheme: Scheme, n: usize, knots: usize) -> Result<Option<QContour>> {
    if n == 3 {
        return Ok(None);
    }
    let quad = match cfg.averaging() {
        Averaging::Quadrature(q) => q,
        Averaging::Haar { .. } => Quadrature::default(),
    };
    QContour::from_engine(scheme, n, &cfg.noise(0.0, 0.0), quad, knots).map(Some)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
