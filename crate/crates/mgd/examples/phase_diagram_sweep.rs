//! Planted-mode error rates over an (n, m, rho) grid, written as CSV and
//! summarized as a text matrix: empirical detectability against the signal
//! strength rho^2 m (n-1) / (8 ln n).

use mgd::harness::{phase_diagram, signal_strength, ExperimentConfig, RunMode};

fn main() -> mgd::Result<()> {
    let path = std::env::temp_dir().join("mgd_phase_demo.csv");
    let config = ExperimentConfig {
        n_values: vec![50, 100],
        m_values: vec![2, 3],
        rho_values: vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6],
        trials_per_point: 200,
        c: 1.25,
        mode: RunMode::Planted,
        master_seed: 11,
        budget: 1_000_000,
        output_path: path.to_str().unwrap().to_string(),
    };
    let rows = phase_diagram(&config)?;
    println!("wrote {rows} rows to {}\n", path.display());

    let text = std::fs::read_to_string(&path)?;
    println!("{:>5} {:>3} {:>5}  {:>9}  {:>11}", "n", "m", "rho", "strength", "total error");
    for line in text.lines().skip(1).filter(|l| !l.starts_with('#')) {
        let f: Vec<&str> = line.split(',').collect();
        let (n, m): (usize, usize) = (f[0].parse().unwrap(), f[1].parse().unwrap());
        let rho: f64 = f[2].parse().unwrap();
        let total: f64 = f[6].parse().unwrap();
        println!(
            "{n:>5} {m:>3} {rho:>5.2}  {:>9.3}  {total:>11.3}",
            signal_strength(n, m, rho)
        );
    }
    println!("\nthe planted diagnostic needs far less signal than the strength-1");
    println!("boundary that gates the realizable max test: only the vacuous-");
    println!("threshold cell (m = 2, rho = 0.1) shows large error, and the small");
    println!("m = 3 residuals trace the fixed n^c margin against a statistic");
    println!("whose spread grows with m. Rerunning reproduces the CSV byte for byte.");
    std::fs::remove_file(&path)?;
    Ok(())
}
