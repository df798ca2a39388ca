//! Tail bounds for Gaussian quadratic forms Z = sum_i lambda_i W_i^2 with
//! independent standard normal W_i, described by their eigenvalue spectrum.
//!
//! The per-edge pair statistic Z = sum_{k<l} Y_k Y_l of an equicorrelated
//! Gaussian vector diagonalizes to eigenvalue (m-1+(m-1)^2 rho)/2 with
//! multiplicity 1 and (rho-1)/2 with multiplicity m-1; `lemma2_spec` builds
//! that spectrum and `scale_and_replicate` extends it to a sum over many
//! independent edges. Centered tails P(Z - E[Z] >= t) are bounded three
//! ways (two closed forms plus a numerically optimized Chernoff bound) and
//! can be checked against Monte Carlo samples from `sample_quadform`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::glr::ThresholdParams;
use crate::model::ModelParams;
use crate::rng::{Stream, StreamKind};
use crate::util::binom2;

/// Spectrum of a quadratic form: (eigenvalue, multiplicity) pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadFormSpec {
    eigs: Vec<(f64, u64)>,
}

impl QuadFormSpec {
    pub fn new(eigs: Vec<(f64, u64)>) -> Result<Self> {
        if eigs.is_empty() {
            return Err(Error::InvalidParams("empty spectrum".into()));
        }
        for &(l, mult) in &eigs {
            if !l.is_finite() {
                return Err(Error::NonFinite(format!("eigenvalue {l}")));
            }
            if mult == 0 {
                return Err(Error::InvalidParams(
                    "eigenvalue multiplicity must be >= 1".into(),
                ));
            }
        }
        Ok(QuadFormSpec { eigs })
    }

    pub fn eigenvalues(&self) -> &[(f64, u64)] {
        &self.eigs
    }

    /// Total dimension (number of independent chi-square factors).
    pub fn dim(&self) -> u64 {
        self.eigs.iter().map(|&(_, m)| m).sum()
    }

    /// E[Z] = tr A = sum lambda_i.
    pub fn trace(&self) -> f64 {
        self.eigs.iter().map(|&(l, m)| l * m as f64).sum()
    }

    /// ||A||_F^2 = sum lambda_i^2.
    pub fn frobenius_sq(&self) -> f64 {
        self.eigs.iter().map(|&(l, m)| l * l * m as f64).sum()
    }

    /// ||A|| = max |lambda_i|.
    pub fn spectral(&self) -> f64 {
        self.eigs
            .iter()
            .map(|&(l, _)| l.abs())
            .fold(0.0, f64::max)
    }

    /// Var(Z) = 2 ||A||_F^2.
    pub fn variance(&self) -> f64 {
        2.0 * self.frobenius_sq()
    }
}

/// Spectrum of the single-edge pair statistic Z = sum_{k<l} Y_k Y_l for an
/// m-vector with equicorrelation rho: eigenvalue (m-1+(m-1)^2 rho)/2 once
/// and (rho-1)/2 with multiplicity m-1.
pub fn lemma2_spec(m: usize, rho: f64) -> Result<QuadFormSpec> {
    if m < 2 {
        return Err(Error::InvalidParams(format!("m must be >= 2, got {m}")));
    }
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::InvalidParams(format!(
            "rho must lie in [0, 1), got {rho}"
        )));
    }
    let mf = m as f64;
    let l_max = (mf - 1.0 + (mf - 1.0) * (mf - 1.0) * rho) / 2.0;
    let l_min = (rho - 1.0) / 2.0;
    QuadFormSpec::new(vec![(l_max, 1), (l_min, m as u64 - 1)])
}

/// Spectrum of a sum of `copies` independent copies of `spec` (each
/// multiplicity scaled by `copies`).
pub fn scale_and_replicate(spec: &QuadFormSpec, copies: u64) -> Result<QuadFormSpec> {
    if copies == 0 {
        return Err(Error::InvalidParams("copies must be >= 1".into()));
    }
    QuadFormSpec::new(
        spec.eigs
            .iter()
            .map(|&(l, m)| (l, m.checked_mul(copies).expect("multiplicity overflow")))
            .collect(),
    )
}

fn check_t(t: f64) -> Result<()> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidParams(format!(
            "tail offset t must be finite and >= 0, got {t}"
        )));
    }
    Ok(())
}

/// Centered upper-tail bound
/// P(Z - E[Z] >= t) <= exp(-t^2 / (4 (||A||_F^2 + ||A|| t))).
pub fn hw_bound_eq3(spec: &QuadFormSpec, t: f64) -> Result<f64> {
    check_t(t)?;
    let denom = 4.0 * (spec.frobenius_sq() + spec.spectral() * t);
    if denom == 0.0 {
        // Degenerate all-zero spectrum: Z is constant.
        return Ok(if t == 0.0 { 1.0 } else { 0.0 });
    }
    Ok((-t * t / denom).exp())
}

/// Split-form bound
/// P(Z - E[Z] >= t) <= exp(-1/4 min{gamma t^2 / ||A||_F^2,
///                                   (1-gamma) t / ||A||}).
pub fn hw_bound_eq4(spec: &QuadFormSpec, t: f64, gamma: f64) -> Result<f64> {
    check_t(t)?;
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidParams(format!(
            "gamma must lie in (0, 1), got {gamma}"
        )));
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    let f2 = spec.frobenius_sq();
    let a = spec.spectral();
    let quad = if f2 == 0.0 {
        f64::INFINITY
    } else {
        gamma * t * t / f2
    };
    let lin = if a == 0.0 {
        f64::INFINITY
    } else {
        (1.0 - gamma) * t / a
    };
    Ok((-0.25 * quad.min(lin)).exp())
}

/// The sub-gamma Chernoff objective exp(theta^2 ||A||_F^2 / (1 - 2||A||theta)
/// - theta t), valid on 0 < theta < 1/(2||A||).
fn chernoff_objective(f2: f64, a: f64, t: f64, theta: f64) -> f64 {
    theta * theta * f2 / (1.0 - 2.0 * a * theta) - theta * t
}

/// Chernoff bound minimized over theta in (0, 1/(2||A||)) by golden-section
/// search (the objective is convex, hence unimodal). The closed-form `eq3`
/// bound equals this objective at theta = t / (2(||A||_F^2 + ||A|| t)), so
/// the optimized value can never exceed it.
pub fn chernoff_optimized(spec: &QuadFormSpec, t: f64) -> Result<f64> {
    check_t(t)?;
    let a = spec.spectral();
    if a <= 0.0 {
        return Err(Error::InvalidParams(
            "chernoff bound needs a nonzero spectrum".into(),
        ));
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    let f2 = spec.frobenius_sq();
    let hi = (1.0 - 1e-12) / (2.0 * a);
    let mut lo = hi * 1e-18;
    let mut hi = hi;
    let inv_phi = 0.618_033_988_749_894_9;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = chernoff_objective(f2, a, t, x1);
    let mut f2v = chernoff_objective(f2, a, t, x2);
    for _ in 0..200 {
        if f1 <= f2v {
            hi = x2;
            x2 = x1;
            f2v = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = chernoff_objective(f2, a, t, x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2v;
            x2 = lo + inv_phi * (hi - lo);
            f2v = chernoff_objective(f2, a, t, x2);
        }
        if (hi - lo) <= 1e-10 * hi.abs() {
            break;
        }
    }
    // The eq3 stationary point is a feasible candidate; including it keeps
    // chernoff <= eq3 even under search-tolerance wobble.
    let theta3 = t / (2.0 * (f2 + a * t));
    let best = chernoff_objective(f2, a, t, x1)
        .min(chernoff_objective(f2, a, t, x2))
        .min(chernoff_objective(f2, a, t, theta3));
    Ok(best.exp())
}

/// log E[exp(theta Z)] = -1/2 sum_i log(1 - 2 lambda_i theta); requires
/// 1 - 2 lambda_i theta > 0 for every eigenvalue.
pub fn exact_mgf_log(spec: &QuadFormSpec, theta: f64) -> Result<f64> {
    if !theta.is_finite() {
        return Err(Error::NonFinite(format!("theta {theta}")));
    }
    let mut acc = 0.0;
    for &(l, mult) in spec.eigenvalues() {
        let arg = 1.0 - 2.0 * l * theta;
        if arg <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "mgf undefined: 1 - 2*{l}*{theta} = {arg} <= 0"
            )));
        }
        acc += -0.5 * arg.ln() * mult as f64;
    }
    Ok(acc)
}

const QUADFORM_CHUNK: usize = 4096;

/// `count` independent samples of Z = sum_i lambda_i W_i^2. Work is split
/// into fixed-size chunks, each drawing from its own stream keyed by chunk
/// index, so the output is one deterministic vector regardless of thread
/// count or scheduling.
pub fn sample_quadform(spec: &QuadFormSpec, seed: u64, count: usize) -> Vec<f64> {
    let chunks: Vec<Vec<f64>> = (0..count.div_ceil(QUADFORM_CHUNK))
        .into_par_iter()
        .map(|c| {
            let lo = c * QUADFORM_CHUNK;
            let hi = (lo + QUADFORM_CHUNK).min(count);
            let mut s = Stream::new(seed, StreamKind::QuadFormChunk, c as u64);
            (lo..hi)
                .map(|_| {
                    let mut z = 0.0;
                    for &(l, mult) in spec.eigenvalues() {
                        for _ in 0..mult {
                            let w = s.normal();
                            z += l * w * w;
                        }
                    }
                    z
                })
                .collect()
        })
        .collect();
    chunks.concat()
}

/// Terms of the log union-bound false-alarm guarantee at threshold tau:
/// Q(max-statistic > tau) <= exp(total) with
/// total = union + log + stirling + quad, where union + log + stirling
/// bounds log (n!)^(m-1) via Stirling and quad is the `eq3` exponent of the
/// null pair statistic summed over C(n,2) edges. `a_n` and `b_n` are the
/// correction terms that dominate the looser closed form
/// total <= stirling + a_n + b_n once rho sits at the detection threshold.
#[derive(Clone, Copy, Debug)]
pub struct FalseAlarmExponent {
    pub total: f64,
    pub union_term: f64,
    pub log_term: f64,
    pub stirling_term: f64,
    pub quad_term: f64,
    pub a_n: f64,
    pub b_n: f64,
}

/// Assembles the exponent at tau = C(n,2) C(m,2) rho - n^c built from the
/// threshold parameters (the null side depends on rho only through tau).
/// Errors when tau <= 0: the bound is vacuous there.
pub fn false_alarm_exponent(
    params: &ModelParams,
    tp: &ThresholdParams,
) -> Result<FalseAlarmExponent> {
    let tau = crate::glr::threshold(params, tp);
    if tau <= 0.0 {
        return Err(Error::VacuousBound(tau));
    }
    let n = params.n as f64;
    let m = params.m as f64;
    let edges = binom2(params.n) as f64;
    let log_n = n.ln();
    let mu = edges * binom2(params.m) as f64 * tp.rho;
    let nc = n.powf(tp.c);

    let union_term = (m - 1.0) * n * log_n;
    let log_term = (m - 1.0) / 2.0 * log_n;
    let stirling_term = -(m - 1.0) * (n - 1.0);
    let d = edges * m * (m - 1.0);
    let quad_term = -tau * tau / (d + 2.0 * (m - 1.0) * tau);
    let a_n = union_term * 2.0 * (m - 1.0) * mu / d;
    let b_n = union_term * 2.0 * nc / mu + log_term;
    Ok(FalseAlarmExponent {
        total: union_term + log_term + stirling_term + quad_term,
        union_term,
        log_term,
        stirling_term,
        quad_term,
        a_n,
        b_n,
    })
}
