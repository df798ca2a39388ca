//! The max-correlation test: align the ensemble under a candidate profile,
//! sum aligned edge products over all graph pairs, and maximize over
//! profiles. The maximized statistic is compared against a threshold
//! tau = C(n,2) C(m,2) rho - n^c, which sits n^c below the alternative's
//! mean and (for c > 1) asymptotically above the null's maximum.
//!
//! Two maximizers: `exact_glr` enumerates all (n!)^(m-1) profiles,
//! `heuristic_glr` runs coordinate ascent over the component permutations
//! with spectral re-matching, from several deterministic restarts.

pub mod assignment;
pub mod matching;

pub use assignment::{linear_assignment, Assignment};
pub use matching::{pairwise_match, pairwise_overlap, MatchMethod, MatchResult, EXHAUSTIVE_MAX_N};

use std::fmt;

use crate::error::{Error, Result};
use crate::model::{
    for_each_profile, profile_count, GraphEnsemble, ModelParams, Permutation, PermutationProfile,
    WeightedGraph,
};
use crate::rng::{Stream, StreamKind};
use crate::util::{binom2, pairwise_sum};

/// Default cap on the number of profiles `exact_glr` may enumerate.
pub const DEFAULT_EXACT_BUDGET: u64 = 10_000_000;

/// Default restart count for `heuristic_glr`: identity start, spectral
/// start, and eight random starts.
pub const DEFAULT_RESTARTS: u64 = 10;

/// Threshold configuration. `rho` is the correlation level the test is
/// calibrated against (a design choice, not necessarily the data's true
/// correlation); `c` trades the two error exponents and must lie in
/// (1, 1.5).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdParams {
    pub rho: f64,
    pub c: f64,
}

impl ThresholdParams {
    pub fn new(rho: f64, c: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&rho) {
            return Err(Error::InvalidParams(format!(
                "threshold rho must lie in [0, 1), got {rho}"
            )));
        }
        if !(c > 1.0 && c < 1.5) {
            return Err(Error::InvalidParams(format!(
                "exponent c must lie in (1, 1.5), got {c}"
            )));
        }
        Ok(ThresholdParams { rho, c })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decision {
    /// Retain the independence hypothesis.
    H0,
    /// Declare the graphs correlated.
    H1,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::H0 => "H0",
            Decision::H1 => "H1",
        })
    }
}

/// How the statistic is obtained.
#[derive(Clone, Debug, PartialEq)]
pub enum Mode {
    Exact { budget: u64 },
    Heuristic { restarts: u64, seed: u64 },
    /// No maximization: evaluate at a fixed (e.g. known-planted) profile.
    /// The result is a feasible-point lower bound on the exact statistic.
    Planted(PermutationProfile),
}

impl Mode {
    pub fn label(&self) -> &'static str {
        match self {
            Mode::Exact { .. } => "exact",
            Mode::Heuristic { .. } => "heuristic",
            Mode::Planted(_) => "planted",
        }
    }
}

/// A (possibly approximate) maximizer and its statistic value.
#[derive(Clone, Debug, PartialEq)]
pub struct GlrStatistic {
    pub value: f64,
    pub profile: PermutationProfile,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TestOutcome {
    pub statistic: GlrStatistic,
    pub threshold: f64,
    pub decision: Decision,
    pub mode: Mode,
}

/// The alignment score of one profile:
/// sum over reference edges e, then over graph pairs k < l, of
/// X^k[pi_1k(e)] * X^l[pi_1l(e)]. Per-edge terms are reduced by pairwise
/// summation in edge-index order; for m = 2 this reproduces
/// `pairwise_overlap` of the two graphs bit for bit.
pub fn profile_statistic(ens: &GraphEnsemble, profile: &PermutationProfile) -> Result<f64> {
    ens.check_profile(profile)?;
    let (n, m) = (ens.n(), ens.m());
    let to_graph: Vec<Permutation> = (0..m).map(|k| profile.to_graph(k)).collect();
    let mut aligned = vec![0.0f64; m];
    let terms: Vec<f64> = WeightedGraph::edges(n)
        .map(|(i, j)| {
            for k in 0..m {
                let p = &to_graph[k];
                aligned[k] = ens.graph(k).get(p.apply(i), p.apply(j));
            }
            let mut t = 0.0;
            for k in 0..m {
                for l in (k + 1)..m {
                    t += aligned[k] * aligned[l];
                }
            }
            t
        })
        .collect();
    Ok(pairwise_sum(&terms))
}

/// Exact maximization by lexicographic enumeration of all profiles. Keeps
/// the first strictly-greater value seen, so the returned maximizer is the
/// lexicographically smallest one. Errors when (n!)^(m-1) exceeds `budget`.
pub fn exact_glr(ens: &GraphEnsemble, budget: u64) -> Result<GlrStatistic> {
    let (n, m) = (ens.n(), ens.m());
    let required = profile_count(n, m);
    if !(required <= budget as f64) {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let mut best: Option<GlrStatistic> = None;
    for_each_profile(n, m, |imgs| {
        let profile = PermutationProfile::new(
            imgs.iter()
                .map(|v| Permutation::from_images(v.clone()).expect("enumerated images"))
                .collect(),
        )
        .expect("m >= 2");
        let value = profile_statistic(ens, &profile).expect("profile matches ensemble");
        if best.as_ref().is_none_or(|b| value > b.value) {
            best = Some(GlrStatistic { value, profile });
        }
    });
    Ok(best.expect("at least one profile visited"))
}

/// Sum of all graphs except `skip`, aligned into the reference labeling by
/// the profile (entry (i,j) = sum over l != skip of X^l at the pi_1l-image).
fn aligned_rest(
    ens: &GraphEnsemble,
    to_graph: &[Permutation],
    skip: usize,
) -> WeightedGraph {
    let n = ens.n();
    let mut out = WeightedGraph::zeros(n);
    for (i, j) in WeightedGraph::edges(n) {
        let mut acc = 0.0;
        for (l, p) in to_graph.iter().enumerate() {
            if l != skip {
                acc += ens.graph(l).get(p.apply(i), p.apply(j));
            }
        }
        out.set(i, j, acc);
    }
    out
}

/// Coordinate ascent from one starting profile: re-match each graph against
/// the aligned sum of the others, accepting only strict improvements of the
/// full statistic. Returns the local optimum and its value.
fn ascend(ens: &GraphEnsemble, start: PermutationProfile) -> Result<GlrStatistic> {
    let m = ens.m();
    let mut perms: Vec<Permutation> = (0..m).map(|k| start.to_graph(k)).collect();
    let mut profile = start;
    let mut value = profile_statistic(ens, &profile)?;
    for _sweep in 0..50 {
        let mut improved = false;
        for k in 1..m {
            let rest = aligned_rest(ens, &perms, k);
            let mr = pairwise_match(&rest, ens.graph(k), MatchMethod::Spectral)?;
            if mr.perm == perms[k] {
                continue;
            }
            let mut cand_perms = profile.perms().to_vec();
            cand_perms[k - 1] = mr.perm.clone();
            let cand = PermutationProfile::new(cand_perms)?;
            let cand_value = profile_statistic(ens, &cand)?;
            // Strict improvement beyond a fixed epsilon: guarantees
            // termination under floating point (the profile space is finite
            // and the value increases by > 1e-12 at every accepted step).
            if cand_value > value + 1e-12 {
                perms[k] = mr.perm;
                profile = cand;
                value = cand_value;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    Ok(GlrStatistic { value, profile })
}

/// Heuristic maximization: coordinate ascent from `restarts` deterministic
/// starting profiles (identity, then independent spectral matches of each
/// graph to the first, then seeded random profiles). Best local optimum
/// wins; near-ties resolve to the lexicographically smaller profile.
pub fn heuristic_glr(ens: &GraphEnsemble, restarts: u64, seed: u64) -> Result<GlrStatistic> {
    if restarts == 0 {
        return Err(Error::InvalidParams("restarts must be >= 1".into()));
    }
    let (n, m) = (ens.n(), ens.m());
    let mut best: Option<GlrStatistic> = None;
    for r in 0..restarts {
        let start = match r {
            0 => PermutationProfile::identity(n, m),
            1 => {
                let perms = (1..m)
                    .map(|k| {
                        pairwise_match(ens.graph(0), ens.graph(k), MatchMethod::Spectral)
                            .map(|mr| mr.perm)
                    })
                    .collect::<Result<Vec<_>>>()?;
                PermutationProfile::new(perms)?
            }
            _ => {
                let perms = (1..m)
                    .map(|k| {
                        let mut s =
                            Stream::new(seed, StreamKind::Profile, (r << 16) | k as u64);
                        Permutation::sample(n, &mut s)
                    })
                    .collect();
                PermutationProfile::new(perms)?
            }
        };
        let local = ascend(ens, start)?;
        let replace = match &best {
            None => true,
            Some(b) => {
                let eps = 1e-9 * (1.0 + b.value.abs());
                local.value > b.value + eps
                    || ((local.value - b.value).abs() <= eps && local.profile < b.profile)
            }
        };
        if replace {
            best = Some(local);
        }
    }
    Ok(best.expect("restarts >= 1"))
}

/// tau = C(n,2) C(m,2) rho - n^c with (rho, c) from the threshold
/// parameters; `params` contributes only the instance dimensions.
pub fn threshold(params: &ModelParams, tp: &ThresholdParams) -> f64 {
    (binom2(params.n) * binom2(params.m)) as f64 * tp.rho - (params.n as f64).powf(tp.c)
}

/// Runs the full test: maximize the statistic (per `mode`), compare with
/// the threshold, declare H1 on statistic >= threshold.
pub fn glr_test(ens: &GraphEnsemble, tp: &ThresholdParams, mode: Mode) -> Result<TestOutcome> {
    let statistic = match &mode {
        Mode::Exact { budget } => exact_glr(ens, *budget)?,
        Mode::Heuristic { restarts, seed } => heuristic_glr(ens, *restarts, *seed)?,
        Mode::Planted(profile) => GlrStatistic {
            value: profile_statistic(ens, profile)?,
            profile: profile.clone(),
        },
    };
    let params = ModelParams::new(ens.n(), ens.m(), tp.rho)?;
    let tau = threshold(&params, tp);
    let decision = if statistic.value >= tau {
        Decision::H1
    } else {
        Decision::H0
    };
    Ok(TestOutcome {
        statistic,
        threshold: tau,
        decision,
        mode,
    })
}

/// Upper bound on the miss probability P(statistic < tau) under the
/// correlated model with `params.rho`: the statistic at the true profile
/// already concentrates at mean mu = C(n,2) C(m,2) rho, and the bound is
/// the quadratic-form tail of dropping mu - tau below that mean. Errors
/// with `VacuousBound` when tau >= mu.
pub fn miss_bound(params: &ModelParams, tp: &ThresholdParams) -> Result<f64> {
    let mu = (binom2(params.n) * binom2(params.m)) as f64 * params.rho;
    let t = mu - threshold(params, tp);
    if t <= 0.0 {
        return Err(Error::VacuousBound(t));
    }
    let per_edge = crate::bounds::lemma2_spec(params.m, params.rho)?;
    let spec = crate::bounds::scale_and_replicate(&per_edge, binom2(params.n) as u64)?;
    crate::bounds::hw_bound_eq3(&spec, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{hw_bound_eq3, lemma2_spec, scale_and_replicate};
    use crate::model::{relabel, sample_alternative, sample_null};
    use approx::assert_relative_eq;

    #[test]
    fn threshold_params_validation() {
        assert!(ThresholdParams::new(0.3, 1.25).is_ok());
        assert!(ThresholdParams::new(0.0, 1.25).is_ok());
        assert!(ThresholdParams::new(1.0, 1.25).is_err());
        assert!(ThresholdParams::new(-0.1, 1.25).is_err());
        assert!(ThresholdParams::new(0.3, 1.0).is_err());
        assert!(ThresholdParams::new(0.3, 1.5).is_err());
        assert!(ThresholdParams::new(f64::NAN, 1.25).is_err());
        assert!(ThresholdParams::new(0.3, f64::NAN).is_err());
    }

    #[test]
    fn threshold_reference_values() {
        // n = 100, c = 1.25: n^c = 316.22776601683796.
        let tp = ThresholdParams::new(0.3, 1.25).unwrap();
        let p2 = ModelParams::new(100, 2, 0.3).unwrap();
        assert_relative_eq!(threshold(&p2, &tp), 1168.772233983162, max_relative = 1e-14);
        let p3 = ModelParams::new(100, 3, 0.3).unwrap();
        assert_relative_eq!(threshold(&p3, &tp), 4138.772233983162, max_relative = 1e-14);
    }

    #[test]
    fn statistic_matches_pairwise_overlap_for_two_graphs() {
        let params = ModelParams::new(9, 2, 0.4).unwrap();
        let (ens, profile) = sample_alternative(&params, 41);
        let via_profile = profile_statistic(&ens, &profile).unwrap();
        let via_overlap =
            pairwise_overlap(ens.graph(0), ens.graph(1), &profile.to_graph(1)).unwrap();
        assert_eq!(via_profile, via_overlap);
    }

    #[test]
    fn statistic_rejects_mismatched_profile() {
        let params = ModelParams::new(5, 2, 0.0).unwrap();
        let ens = sample_null(&params, 1);
        let bad = PermutationProfile::identity(4, 2);
        assert!(profile_statistic(&ens, &bad).is_err());
    }

    #[test]
    fn exact_glr_matches_direct_enumeration_bit_for_bit() {
        let params = ModelParams::new(4, 3, 0.6).unwrap();
        let (ens, _) = sample_alternative(&params, 8);
        let fast = exact_glr(&ens, DEFAULT_EXACT_BUDGET).unwrap();
        let mut best = f64::NEG_INFINITY;
        for_each_profile(4, 3, |imgs| {
            let profile = PermutationProfile::new(
                imgs.iter()
                    .map(|v| Permutation::from_images(v.clone()).unwrap())
                    .collect(),
            )
            .unwrap();
            let v = profile_statistic(&ens, &profile).unwrap();
            if v > best {
                best = v;
            }
        });
        assert_eq!(fast.value, best);
    }

    #[test]
    fn exact_glr_finds_planted_profile_in_twin_ensemble() {
        // Graph 2 is an exact relabeled copy of graph 1, so the planted
        // permutation maximizes the statistic at the graph's weight energy.
        let params = ModelParams::new(5, 2, 0.0).unwrap();
        let base = sample_null(&params, 2);
        let twin = crate::model::GraphEnsemble::new(vec![
            base.graph(0).clone(),
            base.graph(0).clone(),
        ])
        .unwrap();
        let sigma = Permutation::from_images(vec![3, 1, 4, 0, 2]).unwrap();
        let shuffled = relabel(&twin, 1, &sigma).unwrap();
        let res = exact_glr(&shuffled, DEFAULT_EXACT_BUDGET).unwrap();
        assert_eq!(res.profile.to_graph(1), sigma);
        let energy: f64 = base.graph(0).weights().iter().map(|w| w * w).sum();
        assert_relative_eq!(res.value, energy, max_relative = 1e-12);
    }

    #[test]
    fn exact_glr_tie_breaks_to_identity_profile() {
        let zeros = crate::model::GraphEnsemble::new(vec![
            WeightedGraph::zeros(4),
            WeightedGraph::zeros(4),
            WeightedGraph::zeros(4),
        ])
        .unwrap();
        let res = exact_glr(&zeros, DEFAULT_EXACT_BUDGET).unwrap();
        assert_eq!(res.value, 0.0);
        assert!(res.profile.perms().iter().all(|p| p.is_identity()));
    }

    #[test]
    fn exact_glr_enforces_budget() {
        let params = ModelParams::new(12, 2, 0.0).unwrap();
        let ens = sample_null(&params, 3);
        match exact_glr(&ens, 1000) {
            Err(Error::BudgetExceeded { required, budget }) => {
                assert_eq!(budget, 1000);
                assert!(required > 4.0e8);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn heuristic_equals_exact_on_small_correlated_instance() {
        let params = ModelParams::new(7, 2, 0.9).unwrap();
        let (ens, _) = sample_alternative(&params, 19);
        let exact = exact_glr(&ens, DEFAULT_EXACT_BUDGET).unwrap();
        let heur = heuristic_glr(&ens, DEFAULT_RESTARTS, 1).unwrap();
        assert!(heur.value <= exact.value + 1e-9 * (1.0 + exact.value.abs()));
        // On this seed the ascent reaches the global optimum.
        assert_eq!(heur.value, exact.value);
    }

    #[test]
    fn heuristic_is_deterministic_and_validates_restarts() {
        let params = ModelParams::new(10, 3, 0.7).unwrap();
        let (ens, _) = sample_alternative(&params, 77);
        let a = heuristic_glr(&ens, 4, 9).unwrap();
        let b = heuristic_glr(&ens, 4, 9).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.profile, b.profile);
        assert!(heuristic_glr(&ens, 0, 9).is_err());
    }

    #[test]
    fn heuristic_recovers_planted_profile_under_strong_correlation() {
        let params = ModelParams::new(12, 3, 0.95).unwrap();
        let (ens, profile) = sample_alternative(&params, 5);
        let res = heuristic_glr(&ens, DEFAULT_RESTARTS, 5).unwrap();
        assert_eq!(res.profile, profile);
    }

    #[test]
    fn glr_test_decides_correctly_on_clear_instances() {
        let tp = ThresholdParams::new(0.8, 1.25).unwrap();
        let params = ModelParams::new(30, 2, 0.8).unwrap();
        // Correlated side: the planted profile's statistic concentrates at
        // mu = 435 * 0.8 = 348 (sd ~ 27) while tau ~ 277.8, so evaluating at
        // the known profile decides H1 with a wide margin.
        let (alt, profile) = sample_alternative(&params, 12);
        let out = glr_test(&alt, &tp, Mode::Planted(profile.clone())).unwrap();
        assert_eq!(out.decision, Decision::H1);
        assert_eq!(out.statistic.profile, profile);
        assert_eq!(
            out.statistic.value,
            profile_statistic(&alt, &profile).unwrap()
        );
        assert_eq!(out.mode.label(), "planted");

        // Independent side: no alignment of a null ensemble reaches tau.
        let null = sample_null(&params, 12);
        let out = glr_test(
            &null,
            &tp,
            Mode::Heuristic {
                restarts: DEFAULT_RESTARTS,
                seed: 12,
            },
        )
        .unwrap();
        assert_eq!(out.decision, Decision::H0);
    }

    #[test]
    fn heuristic_matches_exact_on_most_strong_signal_trials() {
        // Strong-signal sanity gate: at n=6, rho=0.95 the heuristic should
        // land on the exact maximizer in >= 80% of trials.
        let params = ModelParams::new(6, 2, 0.95).unwrap();
        let mut hits = 0;
        for trial in 0..20 {
            let (ens, _) = sample_alternative(&params, trial);
            let exact = exact_glr(&ens, 1000).unwrap();
            let heur = heuristic_glr(&ens, DEFAULT_RESTARTS, trial).unwrap();
            assert!(heur.value <= exact.value + 1e-9);
            if heur.value >= exact.value - 1e-9 {
                hits += 1;
            }
        }
        assert!(hits >= 16, "heuristic matched exact on only {hits}/20 trials");
    }

    #[test]
    fn exact_statistic_is_label_invariant() {
        // Relabeling a non-reference graph permutes profile values within
        // the orbit without touching any per-edge term order, so the max is
        // unchanged bit for bit. Relabeling the reference graph also maps
        // the orbit onto itself, but it reorders the fixed edge-index
        // summation, so equality there holds only up to summation ulps.
        for (n, m, seed) in [(4usize, 2usize, 3u64), (4, 3, 4), (5, 2, 6)] {
            let params = ModelParams::new(n, m, 0.6).unwrap();
            let (ens, _) = sample_alternative(&params, seed);
            let base = exact_glr(&ens, DEFAULT_EXACT_BUDGET).unwrap();
            let sigma = Permutation::from_images((0..n).map(|i| (i + 1) % n).collect()).unwrap();
            for idx in 1..m {
                let moved = relabel(&ens, idx, &sigma).unwrap();
                let re = exact_glr(&moved, DEFAULT_EXACT_BUDGET).unwrap();
                assert_eq!(re.value, base.value, "n={n} m={m} graph {idx}");
            }
            let moved = relabel(&ens, 0, &sigma).unwrap();
            let re = exact_glr(&moved, DEFAULT_EXACT_BUDGET).unwrap();
            assert_relative_eq!(re.value, base.value, max_relative = 1e-12);
        }
    }

    #[test]
    fn planted_profile_never_beats_exact_maximum() {
        let params = ModelParams::new(5, 2, 0.7).unwrap();
        for seed in 0..6 {
            let (ens, profile) = sample_alternative(&params, seed);
            let planted = profile_statistic(&ens, &profile).unwrap();
            let exact = exact_glr(&ens, 1000).unwrap();
            assert!(planted <= exact.value);
        }
    }

    #[test]
    fn planted_statistic_mean_matches_model_mean() {
        // E[statistic at the true profile] = C(n,2) C(m,2) rho. With 200
        // trials the Monte Carlo mean lands within 4 standard errors except
        // with probability < 1e-4; the seed is fixed anyway.
        let params = ModelParams::new(20, 3, 0.5).unwrap();
        let trials = 200;
        let vals: Vec<f64> = (0..trials)
            .map(|t| {
                let (ens, profile) = sample_alternative(&params, 1000 + t);
                profile_statistic(&ens, &profile).unwrap()
            })
            .collect();
        let mean = vals.iter().sum::<f64>() / trials as f64;
        let mu = (binom2(20) * binom2(3)) as f64 * 0.5;
        let sd = {
            let var =
                vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (trials - 1) as f64;
            var.sqrt()
        };
        let stderr = sd / (trials as f64).sqrt();
        assert!(
            (mean - mu).abs() <= 4.0 * stderr,
            "mean {mean} vs mu {mu} (stderr {stderr})"
        );
    }

    #[test]
    fn miss_bound_decreases_in_the_threshold_exponent() {
        let params = ModelParams::new(100, 2, 0.45).unwrap();
        let mut prev = f64::INFINITY;
        for k in 1..9 {
            let c = 1.0 + 0.05 * k as f64;
            let b = miss_bound(&params, &ThresholdParams::new(0.45, c).unwrap()).unwrap();
            assert!(b > 0.0 && b < prev, "c={c}: {b} !< {prev}");
            prev = b;
        }
    }

    #[test]
    fn miss_bound_is_the_edge_sum_tail_at_the_threshold_gap() {
        let params = ModelParams::new(100, 2, 0.3).unwrap();
        let tp = ThresholdParams::new(0.3, 1.25).unwrap();
        let b = miss_bound(&params, &tp).unwrap();
        let spec =
            scale_and_replicate(&lemma2_spec(2, 0.3).unwrap(), 4950).unwrap();
        let mu = 4950.0 * 0.3;
        let expect = hw_bound_eq3(&spec, mu - threshold(&params, &tp)).unwrap();
        assert_eq!(b, expect);
        assert!(b > 1.5e-4 && b < 2.0e-4, "bound = {b}");
    }

    #[test]
    fn miss_bound_rejects_vacuous_gap() {
        // Calibrating against a rho far above the true correlation puts the
        // threshold above the alternative's mean.
        let params = ModelParams::new(100, 2, 0.0).unwrap();
        let tp = ThresholdParams::new(0.3, 1.25).unwrap();
        match miss_bound(&params, &tp) {
            Err(Error::VacuousBound(t)) => assert!(t < 0.0),
            other => panic!("expected vacuous-bound error, got {other:?}"),
        }
    }
}
