use super::{chordal_distance, C64};
use crate::error::{Error, Result};

/// Result of pairing two root multisets: `perm[i]` is the index in `b`
/// matched to `a[i]`.
#[derive(Debug, Clone)]
pub struct RootMatching {
    pub perm: Vec<usize>,
    pub max_distance: f64,
    pub total_distance: f64,
}

/// Pairs two equal-length root multisets, minimizing the total chordal
/// distance on the Riemann sphere: greedy nearest assignment followed by
/// pairwise-swap improvement.
pub fn match_roots(a: &[C64], b: &[C64]) -> Result<RootMatching> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let n = a.len();
    let dist = |i: usize, j: usize| chordal_distance(a[i], b[j]);

    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for i in 0..n {
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for j in 0..n {
            if !used[j] && dist(i, j) < best_d {
                best_d = dist(i, j);
                best = j;
            }
        }
        perm[i] = best;
        used[best] = true;
    }

    // 2-opt passes until no pair swap lowers the total
    let mut improved = true;
    let mut guard = 0;
    while improved && guard < n * n + 10 {
        improved = false;
        guard += 1;
        for i in 0..n {
            for k in (i + 1)..n {
                let cur = dist(i, perm[i]) + dist(k, perm[k]);
                let swapped = dist(i, perm[k]) + dist(k, perm[i]);
                if swapped + 1e-18 < cur {
                    perm.swap(i, k);
                    improved = true;
                }
            }
        }
    }

    let mut max_distance = 0.0_f64;
    let mut total_distance = 0.0_f64;
    for i in 0..n {
        let d = dist(i, perm[i]);
        max_distance = max_distance.max(d);
        total_distance += d;
    }
    Ok(RootMatching {
        perm,
        max_distance,
        total_distance,
    })
}
