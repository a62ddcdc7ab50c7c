//! Expansion certificates `prod dmin >= c kappa^n` for a model's paths.

use rayon::prelude::*;

use super::{Expansion, MarkovModel};
use crate::error::{Error, Result};

/// Minimum mean weight over all cycles (Karp), or `None` for acyclic graphs.
fn min_mean_cycle(n: usize, edges: &[(usize, usize, f64)]) -> Option<f64> {
    // d[k][v]: least weight of a walk with exactly k edges ending at v
    let inf = f64::INFINITY;
    let mut d = vec![vec![inf; n]; n + 1];
    d[0].iter_mut().for_each(|x| *x = 0.0);
    for k in 1..=n {
        let (prev, cur) = d.split_at_mut(k);
        let prev = &prev[k - 1];
        let cur = &mut cur[0];
        for &(u, v, w) in edges {
            if prev[u] < inf {
                cur[v] = cur[v].min(prev[u] + w);
            }
        }
    }
    let mut best = inf;
    for v in 0..n {
        if d[n][v] == inf {
            continue;
        }
        let mut worst = f64::NEG_INFINITY;
        for k in 0..n {
            if d[k][v] < inf {
                worst = worst.max((d[n][v] - d[k][v]) / (n - k) as f64);
            }
        }
        best = best.min(worst);
    }
    (best < inf).then_some(best)
}

/// Least total weight of any path (possibly empty), by Bellman-Ford from a
/// virtual source joined to every state. Requires no negative cycles.
fn min_path_sum(n: usize, edges: &[(usize, usize, f64)]) -> f64 {
    let mut h = vec![0.0f64; n];
    for _ in 0..n {
        let mut changed = false;
        for &(u, v, w) in edges {
            if h[u] + w < h[v] {
                h[v] = h[u] + w;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    h.into_iter().fold(0.0, f64::min)
}

/// Least `sum log dmin` over closed walks of each length `1..=max_len`.
fn min_closed_walks(model: &MarkovModel, max_len: usize) -> Vec<f64> {
    let n = model.len();
    let out = model.out_edges();
    let per_start: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|s| {
            let mut best = vec![f64::INFINITY; max_len];
            let mut cur = vec![f64::INFINITY; n];
            cur[s] = 0.0;
            for len in 1..=max_len {
                let mut next = vec![f64::INFINITY; n];
                for v in 0..n {
                    if cur[v] == f64::INFINITY {
                        continue;
                    }
                    for &e in &out[v] {
                        let t = &model.transitions[e];
                        next[t.to] = next[t.to].min(cur[v] + t.log_min());
                    }
                }
                best[len - 1] = next[s];
                cur = next;
            }
            best
        })
        .collect();
    (0..max_len)
        .map(|k| per_start.iter().map(|b| b[k]).fold(f64::INFINITY, f64::min))
        .collect()
}

/// Certifies `prod dmin >= c kappa^n` on every path of length `n`.
///
/// `kappa` is the exponential of the minimum mean of `log dmin` over all
/// cycles, `c` absorbs the worst transient deficit. The bound is then
/// re-checked directly on closed walks of length up to `max_cycle_len`.
pub fn verify_hyperbolic(model: &MarkovModel, max_cycle_len: usize) -> Result<Expansion> {
    let n = model.len();
    let edges: Vec<(usize, usize, f64)> =
        model.transitions.iter().map(|t| (t.from, t.to, t.log_min())).collect();
    let mu = min_mean_cycle(n, &edges).ok_or(Error::EmptyModel)?;
    let kappa = mu.exp();
    if mu <= 0.0 {
        return Err(Error::NotExpanding { kappa });
    }
    let reduced: Vec<(usize, usize, f64)> = edges.iter().map(|&(u, v, w)| (u, v, w - mu)).collect();
    let log_c = min_path_sum(n, &reduced);
    let c = log_c.exp();
    for (k, &m) in min_closed_walks(model, max_cycle_len).iter().enumerate() {
        let len = (k + 1) as f64;
        if m < f64::INFINITY && m < log_c + len * mu - 1e-9 * (1.0 + m.abs()) {
            return Err(Error::NotExpanding { kappa: (m - log_c).exp().powf(1.0 / len) });
        }
    }
    Ok(Expansion { c, kappa })
}
