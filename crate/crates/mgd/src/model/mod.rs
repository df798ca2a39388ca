//! Probabilistic model: m complete graphs on n nodes with standard Gaussian
//! edge weights, either independent (H0) or pairwise correlated at level rho
//! through latent node alignments (H1).
//!
//! Under H1 a hidden profile (pi_{1,2}, ..., pi_{1,m}) of uniform
//! permutations relabels graphs 2..m; the weight tuple
//! (X^1_{ij}, X^2 at pi_{1,2}{i,j}, ..., X^m at pi_{1,m}{i,j}) for each
//! reference edge is jointly Gaussian with unit marginals and equicorrelated
//! covariance Sigma = (1-rho) I + rho E.

pub mod io;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::rng::{Stream, StreamKind};
use crate::util::binom2;

/// Model dimensions and correlation level. `n` nodes, `m` graphs,
/// `0 <= rho < 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub n: usize,
    pub m: usize,
    pub rho: f64,
}

impl ModelParams {
    pub fn new(n: usize, m: usize, rho: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParams(format!("n must be >= 2, got {n}")));
        }
        if m < 2 {
            return Err(Error::InvalidParams(format!("m must be >= 2, got {m}")));
        }
        if !(0.0..1.0).contains(&rho) {
            return Err(Error::InvalidParams(format!(
                "rho must lie in [0, 1), got {rho}"
            )));
        }
        Ok(ModelParams { n, m, rho })
    }

    pub fn edge_count(&self) -> usize {
        binom2(self.n)
    }
}

/// Complete weighted graph on `n` nodes storing the strict upper triangle
/// row-major: (0,1), (0,2), ..., (0,n-1), (1,2), ..., (n-2,n-1).
/// The diagonal does not exist; accessors reject i == j.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    w: Vec<f64>,
}

impl WeightedGraph {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 2, "graph needs at least two nodes");
        WeightedGraph {
            n,
            w: vec![0.0; binom2(n)],
        }
    }

    pub fn from_weights(n: usize, w: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParams(format!("n must be >= 2, got {n}")));
        }
        if w.len() != binom2(n) {
            return Err(Error::DimensionMismatch(format!(
                "expected {} edge weights for n = {n}, got {}",
                binom2(n),
                w.len()
            )));
        }
        Ok(WeightedGraph { n, w })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.w.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    /// Flat index of the unordered edge {i, j} in the canonical order.
    #[inline]
    pub fn edge_index(n: usize, i: usize, j: usize) -> usize {
        assert!(i != j && i < n && j < n, "invalid edge ({i}, {j}) for n = {n}");
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        i * (2 * n - i - 1) / 2 + (j - i) - 1
    }

    /// Iterator over edges (i, j), i < j, in the canonical storage order.
    pub fn edges(n: usize) -> impl Iterator<Item = (usize, usize)> {
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.w[Self::edge_index(self.n, i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.w[Self::edge_index(self.n, i, j)] = v;
    }
}

/// Permutation of `0..n`, stored as its image vector. The derived ordering
/// is lexicographic on images, which defines all tie-breaking in this crate.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    img: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            img: (0..n).collect(),
        }
    }

    pub fn from_images(img: Vec<usize>) -> Result<Self> {
        let n = img.len();
        let mut seen = vec![false; n];
        for &v in &img {
            if v >= n || seen[v] {
                return Err(Error::InvalidParams(format!(
                    "images {img:?} do not form a permutation of 0..{n}"
                )));
            }
            seen[v] = true;
        }
        Ok(Permutation { img })
    }

    pub fn n(&self) -> usize {
        self.img.len()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.img[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.img
    }

    pub fn is_identity(&self) -> bool {
        self.img.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.img.len()];
        for (i, &v) in self.img.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { img: inv }
    }

    /// (self . other)(i) = self(other(i)).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose permutations of sizes {} and {}",
                self.n(),
                other.n()
            )));
        }
        Ok(Permutation {
            img: other.img.iter().map(|&i| self.img[i]).collect(),
        })
    }

    pub(crate) fn sample(n: usize, stream: &mut Stream) -> Self {
        Permutation {
            img: stream.permutation_images(n),
        }
    }
}

/// Alignment profile (pi_{1,2}, ..., pi_{1,m}); graph 1's alignment is
/// pinned to the identity. Graphs are indexed 0-based throughout the API,
/// so `to_graph(0)` is the identity and `to_graph(k)` is pi_{1,k+1}.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PermutationProfile {
    perms: Vec<Permutation>,
}

impl PermutationProfile {
    /// `perms[k]` aligns graph k+1 (0-based) to the reference graph 0.
    pub fn new(perms: Vec<Permutation>) -> Result<Self> {
        if perms.is_empty() {
            return Err(Error::InvalidParams(
                "profile needs at least one permutation (m >= 2)".into(),
            ));
        }
        let n = perms[0].n();
        if perms.iter().any(|p| p.n() != n) {
            return Err(Error::DimensionMismatch(
                "profile permutations must share one n".into(),
            ));
        }
        Ok(PermutationProfile { perms })
    }

    pub fn identity(n: usize, m: usize) -> Self {
        assert!(m >= 2);
        PermutationProfile {
            perms: vec![Permutation::identity(n); m - 1],
        }
    }

    pub fn n(&self) -> usize {
        self.perms[0].n()
    }

    pub fn m(&self) -> usize {
        self.perms.len() + 1
    }

    pub fn perms(&self) -> &[Permutation] {
        &self.perms
    }

    /// pi_{1,k} for 0-based graph index k; k = 0 yields the identity.
    pub fn to_graph(&self, k: usize) -> Permutation {
        assert!(k < self.m(), "graph index {k} out of range");
        if k == 0 {
            Permutation::identity(self.n())
        } else {
            self.perms[k - 1].clone()
        }
    }

    /// pi_{k,l} = pi_{1,l} . pi_{1,k}^{-1} for 0-based graph indices.
    pub fn pairwise(&self, k: usize, l: usize) -> Permutation {
        let pk = self.to_graph(k);
        let pl = self.to_graph(l);
        pl.compose(&pk.inverse()).expect("same n by construction")
    }
}

/// Graphs sharing one node count; `m >= 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphEnsemble {
    graphs: Vec<WeightedGraph>,
}

impl GraphEnsemble {
    pub fn new(graphs: Vec<WeightedGraph>) -> Result<Self> {
        if graphs.len() < 2 {
            return Err(Error::InvalidParams(
                "ensemble needs at least two graphs".into(),
            ));
        }
        let n = graphs[0].n();
        if graphs.iter().any(|g| g.n() != n) {
            return Err(Error::DimensionMismatch(
                "ensemble graphs must share one n".into(),
            ));
        }
        Ok(GraphEnsemble { graphs })
    }

    pub fn n(&self) -> usize {
        self.graphs[0].n()
    }

    pub fn m(&self) -> usize {
        self.graphs.len()
    }

    pub fn edge_count(&self) -> usize {
        self.graphs[0].edge_count()
    }

    pub fn graph(&self, k: usize) -> &WeightedGraph {
        &self.graphs[k]
    }

    pub fn graphs(&self) -> &[WeightedGraph] {
        &self.graphs
    }

    /// Checks that `profile` is usable with this ensemble.
    pub fn check_profile(&self, profile: &PermutationProfile) -> Result<()> {
        if profile.n() != self.n() || profile.m() != self.m() {
            return Err(Error::DimensionMismatch(format!(
                "profile is for (n = {}, m = {}), ensemble has (n = {}, m = {})",
                profile.n(),
                profile.m(),
                self.n(),
                self.m()
            )));
        }
        Ok(())
    }
}

/// Independent ensemble: every entry of every graph is standard normal.
/// Ignores `rho`, so samples agree bit-for-bit across rho settings.
pub fn sample_null(params: &ModelParams, seed: u64) -> GraphEnsemble {
    let n = params.n;
    let mut graphs = vec![WeightedGraph::zeros(n); params.m];
    for (e, (i, j)) in WeightedGraph::edges(n).enumerate() {
        let mut s = Stream::new(seed, StreamKind::NullEdge, e as u64);
        for g in graphs.iter_mut() {
            g.set(i, j, s.normal());
        }
    }
    GraphEnsemble::new(graphs).expect("dimensions valid by construction")
}

/// Correlated ensemble with a uniformly random latent profile. For each
/// reference edge e = {i, j} the tuple is built from one shared and m
/// independent variates: X^k at pi_{1,k}(e) = sqrt(rho) W0 + sqrt(1-rho) Wk,
/// giving unit marginals and pairwise correlation rho.
pub fn sample_alternative(params: &ModelParams, seed: u64) -> (GraphEnsemble, PermutationProfile) {
    let (n, m, rho) = (params.n, params.m, params.rho);
    let perms: Vec<Permutation> = (1..m)
        .map(|k| {
            let mut s = Stream::new(seed, StreamKind::Profile, k as u64);
            Permutation::sample(n, &mut s)
        })
        .collect();
    let profile = PermutationProfile::new(perms).expect("m >= 2");
    let (sr, sc) = (rho.sqrt(), (1.0 - rho).sqrt());
    let mut graphs = vec![WeightedGraph::zeros(n); m];
    for (e, (i, j)) in WeightedGraph::edges(n).enumerate() {
        let mut s = Stream::new(seed, StreamKind::AltEdge, e as u64);
        let w0 = s.normal();
        for (k, g) in graphs.iter_mut().enumerate() {
            let wk = s.normal();
            let v = sr * w0 + sc * wk;
            if k == 0 {
                g.set(i, j, v);
            } else {
                let p = &profile.perms()[k - 1];
                g.set(p.apply(i), p.apply(j), v);
            }
        }
    }
    (
        GraphEnsemble::new(graphs).expect("dimensions valid by construction"),
        profile,
    )
}

/// New ensemble where graph `graph_index` has entry (sigma(i), sigma(j))
/// equal to the old entry (i, j); other graphs are copied bit-exactly.
pub fn relabel(
    ens: &GraphEnsemble,
    graph_index: usize,
    sigma: &Permutation,
) -> Result<GraphEnsemble> {
    if graph_index >= ens.m() {
        return Err(Error::InvalidParams(format!(
            "graph index {graph_index} out of range for m = {}",
            ens.m()
        )));
    }
    if sigma.n() != ens.n() {
        return Err(Error::DimensionMismatch(format!(
            "permutation is on {} nodes, ensemble on {}",
            sigma.n(),
            ens.n()
        )));
    }
    let mut graphs = ens.graphs().to_vec();
    let old = ens.graph(graph_index);
    let new = &mut graphs[graph_index];
    for (i, j) in WeightedGraph::edges(ens.n()) {
        new.set(sigma.apply(i), sigma.apply(j), old.get(i, j));
    }
    GraphEnsemble::new(graphs)
}

fn check_cov_args(m: usize, rho: f64) -> Result<()> {
    if m < 2 {
        return Err(Error::InvalidParams(format!("m must be >= 2, got {m}")));
    }
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::InvalidParams(format!(
            "rho must lie in [0, 1), got {rho}"
        )));
    }
    Ok(())
}

/// det Sigma = (1 - rho)^(m-1) (1 + (m-1) rho) for Sigma = (1-rho) I + rho E.
pub fn det_sigma(m: usize, rho: f64) -> Result<f64> {
    check_cov_args(m, rho)?;
    Ok((1.0 - rho).powi(m as i32 - 1) * (1.0 + (m as f64 - 1.0) * rho))
}

/// Closed form for Sigma^(-1) - I:
/// [ (rho + (m-1) rho^2) I - rho E ] / (1 + (m-2) rho - (m-1) rho^2).
pub fn sigma_inverse_minus_identity(m: usize, rho: f64) -> Result<DMatrix<f64>> {
    check_cov_args(m, rho)?;
    let mf = m as f64;
    let denom = 1.0 + (mf - 2.0) * rho - (mf - 1.0) * rho * rho;
    let diag = (rho + (mf - 1.0) * rho * rho) / denom;
    let off = -rho / denom;
    Ok(DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            // E has ones everywhere, so the diagonal combines both terms.
            diag + off
        } else {
            off
        }
    }))
}

/// Equicorrelated covariance Sigma = (1-rho) I + rho E together with its
/// closed-form determinant and (Sigma^(-1) - I).
#[derive(Clone, Debug)]
pub struct CovarianceSpec {
    pub m: usize,
    pub rho: f64,
    sigma: DMatrix<f64>,
    inv_minus_id: DMatrix<f64>,
    det: f64,
}

impl CovarianceSpec {
    pub fn new(m: usize, rho: f64) -> Result<Self> {
        check_cov_args(m, rho)?;
        let sigma = DMatrix::from_fn(m, m, |i, j| if i == j { 1.0 } else { rho });
        Ok(CovarianceSpec {
            m,
            rho,
            inv_minus_id: sigma_inverse_minus_identity(m, rho)?,
            det: det_sigma(m, rho)?,
            sigma,
        })
    }

    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    pub fn inverse_minus_identity(&self) -> &DMatrix<f64> {
        &self.inv_minus_id
    }

    pub fn det(&self) -> f64 {
        self.det
    }
}

/// Sum of graphs 2..m aligned to graph 2's labeling (0-based: graphs 1..m-1
/// aligned to graph 1): entry (i, j) is the sum over k of X^k at the
/// pi_{2,k}-image of {i, j}. For m = 2 this is a bit-exact copy of graph 2.
pub fn aggregate_aligned(
    ens: &GraphEnsemble,
    profile: &PermutationProfile,
) -> Result<WeightedGraph> {
    ens.check_profile(profile)?;
    let n = ens.n();
    let pair: Vec<Permutation> = (1..ens.m()).map(|k| profile.pairwise(1, k)).collect();
    let mut out = WeightedGraph::zeros(n);
    for (i, j) in WeightedGraph::edges(n) {
        let mut acc = 0.0;
        for (k, p) in pair.iter().enumerate() {
            acc += ens.graph(k + 1).get(p.apply(i), p.apply(j));
        }
        out.set(i, j, acc);
    }
    Ok(out)
}

/// Correlation between X^1 and the normalized aligned aggregate of graphs
/// 2..m: rho' = rho sqrt((m-1) / (1 + (m-2) rho)). Requires m >= 3; the
/// aggregate is degenerate for m = 2.
pub fn effective_rho(m: usize, rho: f64) -> Result<f64> {
    if m < 3 {
        return Err(Error::InvalidParams(format!(
            "effective rho needs m >= 3, got {m}"
        )));
    }
    check_cov_args(m, rho)?;
    let mf = m as f64;
    Ok(rho * ((mf - 1.0) / (1.0 + (mf - 2.0) * rho)).sqrt())
}

/// Conditional law of X^1 given the aligned sum x = X^2 + X^3 at one edge
/// (three-graph model): mean rho x / (1 + rho), variance
/// (1 + rho - 2 rho^2) / (1 + rho). Returns (mean, variance).
pub fn conditional_x1_channel(x: f64, rho: f64) -> Result<(f64, f64)> {
    if !x.is_finite() {
        return Err(Error::NonFinite(format!("conditioning value {x}")));
    }
    check_cov_args(3, rho)?;
    let mean = rho * x / (1.0 + rho);
    let var = (1.0 + rho - 2.0 * rho * rho) / (1.0 + rho);
    Ok((mean, var))
}

/// Lexicographic successor of a permutation image vector; false once `img`
/// is the last (descending) arrangement. Standard next-permutation step.
pub(crate) fn next_permutation(img: &mut [usize]) -> bool {
    let n = img.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && img[i - 1] >= img[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while img[j] <= img[i - 1] {
        j -= 1;
    }
    img.swap(i - 1, j);
    img[i..].reverse();
    true
}

/// Number of profiles (n!)^(m-1) as f64 (inf when it overflows).
pub(crate) fn profile_count(n: usize, m: usize) -> f64 {
    let mut fact = 1.0f64;
    for k in 2..=n {
        fact *= k as f64;
    }
    fact.powi(m as i32 - 1)
}

/// Visits every alignment profile of (n, m) in lexicographic order (the
/// profile compares as the tuple of image vectors, pi_{1,2} outermost).
/// The callback receives the m-1 image vectors.
pub(crate) fn for_each_profile<F: FnMut(&[Vec<usize>])>(n: usize, m: usize, mut f: F) {
    let mut imgs: Vec<Vec<usize>> = vec![(0..n).collect(); m - 1];
    loop {
        f(&imgs);
        // Odometer: advance the last slot, rolling over like digits.
        let mut slot = m - 1;
        loop {
            if slot == 0 {
                return;
            }
            slot -= 1;
            if next_permutation(&mut imgs[slot]) {
                break;
            }
            imgs[slot] = (0..n).collect();
        }
    }
}
