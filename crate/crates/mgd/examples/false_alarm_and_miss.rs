//! Analytic error exponents of the thresholded max statistic as the signal
//! strength rho^2 m (n-1) / (8 ln n) crosses 1: the union-bound false-alarm
//! exponent and the planted-side miss bound.

use mgd::bounds::false_alarm_exponent;
use mgd::glr::miss_bound;
use mgd::harness::rho_at_strength;
use mgd::{ModelParams, ThresholdParams};

fn main() -> mgd::Result<()> {
    let n = 10_000usize;
    println!("n = {n}, c = 1.25\n");
    println!(
        "{:>3} {:>9} {:>8}  {:>14}  {:>12}",
        "m", "strength", "rho", "ln P_Q(T>tau)", "miss bound"
    );
    for m in [2usize, 3] {
        for strength in [1.0, 1.2, 1.5, 2.0, 3.0] {
            let rho = rho_at_strength(n, m, strength);
            let params = ModelParams::new(n, m, rho)?;
            let tp = ThresholdParams::new(rho, 1.25)?;
            let fae = false_alarm_exponent(&params, &tp)?;
            let miss = miss_bound(&params, &tp)?;
            println!(
                "{m:>3} {strength:>9.1} {rho:>8.4}  {:>14.4e}  {miss:>12.3e}",
                fae.total
            );
        }
        println!();
    }
    println!("at strength 1 the union bound and the Gaussian tail nearly cancel;");
    println!("any fixed margin above it drives the false-alarm exponent far below");
    println!("zero while the miss bound stays negligible: that is the detectable region");
    Ok(())
}
