//! How the number of graphs m enters detection, in two regimes: the
//! analytic boundary (the rho needed for fixed signal strength shrinks like
//! 1/sqrt(m)) and the planted-mode diagnostic at fixed rho, whose error
//! direction is set by the statistic's spread rather than the boundary.

use mgd::harness::{m_separation_report, rho_at_strength, signal_strength};

fn main() -> mgd::Result<()> {
    let n = 200usize;
    println!("rho required for signal strength 1 at n = {n}:");
    for m in [2usize, 3, 4, 5] {
        println!("  m = {m}: rho = {:.4}", rho_at_strength(n, m, 1.0));
    }

    // Fix rho below the two-graph boundary (strength 0.75 at m = 2) and scan m.
    let rho = rho_at_strength(n, 2, 0.75);
    let path = std::env::temp_dir().join("mgd_msep_demo.csv");
    m_separation_report(n, &[2, 3, 4, 5], rho, 300, 1.25, 3, &path)?;
    println!("\nplanted-mode report at fixed rho = {rho:.4} (300 trials per m):");
    println!("{:>3}  {:>9}  {:>8}  {:>8}", "m", "strength", "type I", "type II");
    let text = std::fs::read_to_string(&path)?;
    for line in text.lines().skip(1).filter(|l| !l.starts_with('#')) {
        let f: Vec<&str> = line.split(',').collect();
        let m: usize = f[1].parse().unwrap();
        let (t1, t2): (f64, f64) = (f[4].parse().unwrap(), f[5].parse().unwrap());
        println!("{m:>3}  {:>9.3}  {t1:>8.3}  {t2:>8.3}", signal_strength(n, m, rho));
    }
    println!("\nthe planted diagnostic knows the alignment, so it already succeeds");
    println!("at strength 0.75 with m = 2; its miss rate grows mildly with m");
    println!("because the statistic's standard deviation scales with the pair");
    println!("count while the threshold margin n^c does not. The m-advantage of");
    println!("the realizable max test lives in the union-bound side: the boundary");
    println!("rho above shrinks like 1/sqrt(m).");
    std::fs::remove_file(&path)?;
    Ok(())
}
