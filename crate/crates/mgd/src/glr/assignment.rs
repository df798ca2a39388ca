//! Exact maximum-weight assignment on a complete bipartite graph via the
//! Jonker-Volgenant shortest-augmenting-path scheme, O(n^3).
//!
//! Degenerate instances (many optimal assignments) are resolved
//! deterministically: a second pass restricts to edges made tight by the
//! dual potentials and extracts the lexicographically smallest perfect
//! matching among them, so equal-score inputs always yield the same
//! permutation regardless of search order.

use crate::error::{Error, Result};
use crate::model::Permutation;

/// Result of an assignment solve: `perm.apply(i)` is the column matched to
/// row i, `total` the sum of the selected scores (added in row order).
#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    pub perm: Permutation,
    pub total: f64,
}

/// Solves max_{sigma} sum_i scores[i * n + sigma(i)] over permutations.
/// Among maximizers (up to a relative tie tolerance of 1e-9) returns the
/// lexicographically smallest one.
pub fn linear_assignment(n: usize, scores: &[f64]) -> Result<Assignment> {
    if n == 0 {
        return Err(Error::InvalidParams("assignment needs n >= 1".into()));
    }
    if scores.len() != n * n {
        return Err(Error::DimensionMismatch(format!(
            "expected {} scores for n = {n}, got {}",
            n * n,
            scores.len()
        )));
    }
    let mut scale = 0.0f64;
    for &s in scores {
        if !s.is_finite() {
            return Err(Error::NonFinite(format!("assignment score {s}")));
        }
        scale = scale.max(s.abs());
    }

    // Minimize cost = -score. Index n plays the role of a virtual column
    // that temporarily holds the row being inserted.
    let cost = |i: usize, j: usize| -scores[i * n + j];
    let mut u = vec![0.0f64; n];
    let mut v = vec![0.0f64; n + 1];
    let mut row_of = vec![usize::MAX; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 0..n {
        row_of[n] = i;
        let mut j0 = n;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = usize::MAX;
            for j in 0..n {
                if !used[j] {
                    let cur = cost(i0, j) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == usize::MAX {
                break;
            }
        }
        // Flip the alternating path back to the virtual column.
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == n {
                break;
            }
        }
    }

    // Dual feasibility holds with equality on every optimal edge, so any
    // perfect matching inside the tight subgraph is a maximizer.
    let tol = 1e-9 * scale.max(1.0);
    let mut allowed: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut tight_edges = 0usize;
    for i in 0..n {
        for j in 0..n {
            if cost(i, j) - u[i] - v[j] <= tol {
                allowed[i].push(j);
                tight_edges += 1;
            }
        }
    }
    let images = if tight_edges == n {
        // Unique optimum: read it off the solver state.
        let mut img = vec![0usize; n];
        for j in 0..n {
            img[row_of[j]] = j;
        }
        img
    } else {
        lex_smallest_matching(n, &allowed)
    };
    let total = (0..n).map(|i| scores[i * n + images[i]]).sum();
    Ok(Assignment {
        perm: Permutation::from_images(images).expect("matching is a bijection"),
        total,
    })
}

/// Lexicographically smallest perfect matching of the bipartite graph given
/// by `allowed` (column lists per row, ascending). The graph is guaranteed
/// matchable because the solver's own matching lies inside it: fix rows in
/// order, taking the smallest column that leaves the rest matchable.
fn lex_smallest_matching(n: usize, allowed: &[Vec<usize>]) -> Vec<usize> {
    let mut images = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    for i in 0..n {
        let mut chosen = usize::MAX;
        for &j in &allowed[i] {
            if !taken[j] {
                taken[j] = true;
                if rows_matchable(i + 1, n, allowed, &taken) {
                    chosen = j;
                    break;
                }
                taken[j] = false;
            }
        }
        assert!(chosen != usize::MAX, "tight subgraph lost matchability");
        images[i] = chosen;
    }
    images
}

/// Whether rows `from..n` admit a perfect matching into columns not yet
/// taken (Kuhn's augmenting-path algorithm).
fn rows_matchable(from: usize, n: usize, allowed: &[Vec<usize>], taken: &[bool]) -> bool {
    let mut match_row = vec![usize::MAX; n];
    for i in from..n {
        let mut seen = vec![false; n];
        if !augment(i, allowed, taken, &mut seen, &mut match_row) {
            return false;
        }
    }
    true
}

fn augment(
    i: usize,
    allowed: &[Vec<usize>],
    taken: &[bool],
    seen: &mut [bool],
    match_row: &mut [usize],
) -> bool {
    for &j in &allowed[i] {
        if !taken[j] && !seen[j] {
            seen[j] = true;
            if match_row[j] == usize::MAX
                || augment(match_row[j], allowed, taken, seen, match_row)
            {
                match_row[j] = i;
                return true;
            }
        }
    }
    false
}
