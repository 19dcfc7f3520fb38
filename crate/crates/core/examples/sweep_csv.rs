//! A grid sweep written as CSV plus a JSON manifest, then read back.

use chainxfer::circuit::Scheme;
use chainxfer::sweep::{linspace, read_csv, run_sweep, write_outputs, manifest_path, SweepConfig};

fn main() -> chainxfer::Result<()> {
    let cfg = SweepConfig {
        schemes: vec![Scheme::Swap, Scheme::Cluster],
        n_list: vec![3, 5],
        p_grid: linspace(0.0, 0.1, 3),
        q_grid: linspace(0.0, 0.1, 3),
        oracle_overlay: true,
        ..SweepConfig::default()
    };
    let out = run_sweep(&cfg)?;
    let dir = std::env::temp_dir().join("chainxfer-sweep-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("surface.csv");
    write_outputs(&path, &out.records, &out.manifest)?;
    let back = read_csv(std::fs::File::open(&path)?)?;
    assert_eq!(back, out.records);
    println!("{} records -> {}", back.len(), path.display());
    println!("manifest -> {}", manifest_path(&path).display());
    print!("{}", std::fs::read_to_string(&path)?.lines().take(6).collect::<Vec<_>>().join("\n"));
    println!();
    Ok(())
}
