//! The spectral-initialization coordinate-ascent heuristic at a scale where
//! exhaustive enumeration is far out of reach (20! profiles), measured
//! against the planted alignment it is trying to rediscover.

use mgd::glr::{heuristic_glr, profile_statistic};
use mgd::{sample_alternative, ModelParams};

fn main() -> mgd::Result<()> {
    let params = ModelParams::new(20, 2, 0.9)?;
    println!("n = 20, m = 2, rho = 0.9, 10 restarts per instance\n");
    println!("{:>4}  {:>12}  {:>12}  {}", "seed", "heuristic T", "planted T", "recovered");

    let mut recovered = 0;
    let trials = 12u64;
    for seed in 0..trials {
        let (ens, planted) = sample_alternative(&params, seed);
        let h = heuristic_glr(&ens, 10, seed)?;
        let p = profile_statistic(&ens, &planted)?;
        // The maximizer usually sits slightly above the planted profile's
        // value because noise lets a few transpositions improve on it.
        let hit = h.value >= p - 1e-9;
        recovered += hit as u32;
        println!("{seed:>4}  {:>12.3}  {p:>12.3}  {hit}", h.value);
    }
    println!("\nreached the planted value or better in {recovered}/{trials} instances");
    Ok(())
}
