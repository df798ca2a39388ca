//! Detection of correlation across multiple unlabeled Gaussian graphs.
//!
//! The model: `m` complete weighted graphs on `n` shared nodes. Under the
//! null hypothesis every edge weight is independent standard normal; under
//! the alternative, hidden node relabelings make corresponding edges
//! pairwise correlated at level `rho`. The detector must decide which
//! regime produced an observed ensemble without seeing the relabelings.
//!
//! Module map:
//! - [`model`] — parameters, ensemble sampling, permutation profiles,
//!   covariance algebra, text serialization.
//! - [`glr`] — the alignment-maximization statistic (exact enumeration and
//!   a spectral heuristic), threshold rule, miss-probability bound.
//! - [`bounds`] — quadratic-form tail bounds (two closed forms and a
//!   numerically optimized Chernoff bound), false-alarm exponent.
//! - [`oracle`] — exact likelihood ratio, total-variation and Bayes-error
//!   estimators for small instances.
//! - [`harness`] — reproducible Monte Carlo sweeps writing CSV.
//! - [`cli`] — the `mgd` binary's subcommands.
//!
//! Each major capability has a runnable example:
//!
//! ```text
//! cargo run --release --example generate_and_roundtrip
//! cargo run --release --example covariance_algebra
//! cargo run --release --example exact_test_small
//! cargo run --release --example heuristic_recovery
//! cargo run --release --example tail_bound_chain
//! cargo run --release --example false_alarm_and_miss
//! cargo run --release --example tv_oracle_small
//! cargo run --release --example genie_channel
//! cargo run --release --example phase_diagram_sweep
//! cargo run --release --example m_separation_scan
//! ```

#![forbid(unsafe_code)]

pub mod bounds;
pub mod cli;
pub mod error;
pub mod glr;
pub mod harness;
pub mod model;
pub mod oracle;
pub mod rng;
pub mod util;

pub use error::{Error, Result};
pub use glr::{glr_test, Decision, Mode, TestOutcome, ThresholdParams};
pub use model::{
    sample_alternative, sample_null, GraphEnsemble, ModelParams, Permutation, PermutationProfile,
};
