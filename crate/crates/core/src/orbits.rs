//! Periodic orbits of `f^n` and their absolute multipliers.
//!
//! Every symbolic word `w` of branch indices of length `n` defines the
//! polynomial `f_w = f_{w[n-1]} o ... o f_{w[0]}`; the periodic points with
//! itinerary `w` are the roots of `f_w(z) - z` whose orbit actually visits
//! the domains listed in `w`. Small systems are solved exhaustively through
//! the companion matrix; larger ones by Aberth iteration driven by the
//! iterated map itself, so no high-degree coefficients are ever formed.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::PointSet;
use crate::map_engine::MapSpec;
use crate::poly::Poly;
use crate::roots::{aberth, companion_roots, count_distinct, newton_polish};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicOrbit {
    /// Orbit points in iteration order, starting at the canonical point.
    pub points: Vec<Complex64>,
    pub period: usize,
    pub multiplier_abs: f64,
    pub word: Option<Vec<usize>>,
    /// Some orbit point lies on the forward critical orbit.
    pub post_critical: bool,
    /// The orbit passes through the critical point itself (superattracting cycle).
    pub critical: bool,
}

impl PeriodicOrbit {
    pub fn first(&self) -> Complex64 {
        self.points[0]
    }

    /// `log(multiplier_abs) / period`.
    pub fn lyapunov(&self) -> f64 {
        self.multiplier_abs.ln() / self.period as f64
    }

    pub fn word_string(&self) -> String {
        self.word
            .as_ref()
            .map(|w| w.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(""))
            .unwrap_or_default()
    }

    /// Same cycle up to `tol` (any rotation).
    pub fn same_cycle(&self, other: &PeriodicOrbit, tol: f64) -> bool {
        self.period == other.period && other.points.iter().any(|p| (p - self.first()).norm() <= tol)
    }
}

#[derive(Clone, Debug)]
pub struct OrbitSearch {
    /// Largest period accepted by [`find_periodic_with`].
    pub max_period: usize,
    /// Words whose polynomial degree is at most this use the companion matrix.
    pub companion_max_degree: usize,
    /// Number of critical-orbit points compared for the post-critical flag.
    pub post_critical_horizon: usize,
    pub post_critical_tol: f64,
    pub aberth_retries: usize,
}

impl Default for OrbitSearch {
    fn default() -> Self {
        OrbitSearch {
            max_period: 16,
            companion_max_degree: 64,
            post_critical_horizon: 64,
            post_critical_tol: 1e-8,
            aberth_retries: 3,
        }
    }
}

impl OrbitSearch {
    /// Default search with `max_period` scaled so that the critical degree
    /// raised to it stays at `2^16`.
    pub fn for_map(map: &MapSpec) -> Self {
        let d = map.critical_degree().max(2) as f64;
        OrbitSearch { max_period: (16.0 / d.log2()).floor().max(1.0) as usize, ..Default::default() }
    }
}

/// Newton step `F/F'` for `F(z) = f_w(z) - z`, with an asymptotic branch
/// once the orbit is far outside the Julia set.
fn word_step(map: &MapSpec, word: &[usize], z: Complex64) -> Complex64 {
    let mut w = z;
    let mut d = Complex64::new(1.0, 0.0);
    for (k, &b) in word.iter().enumerate() {
        if w.norm() > 1e60 {
            let mut r = w / d;
            for &rest in &word[k..] {
                r /= map.branches[rest].coeffs.degree() as f64;
            }
            return r;
        }
        let (v, dv) = map.eval_branch(b, w);
        d *= dv;
        w = v;
    }
    (w - z) / (d - 1.0)
}

fn word_poly(map: &MapSpec, word: &[usize]) -> Poly {
    let mut acc = Poly::identity();
    for &b in word {
        acc = map.branches[b].coeffs.compose(&acc);
    }
    acc.add(&Poly::linear(Complex64::new(-1.0, 0.0), Complex64::new(0.0, 0.0)))
}

fn root_radius(map: &MapSpec) -> f64 {
    map.branches
        .iter()
        .map(|b| b.domain.center().norm() + b.domain.circumradius())
        .fold(1.0, f64::max)
}

const DISTINCT_TOL: f64 = 1e-8;

/// All roots of `f_w(z) - z`, polished.
fn solve_word(map: &MapSpec, word: &[usize], search: &OrbitSearch) -> Result<Vec<Complex64>> {
    let degree = word
        .iter()
        .try_fold(1usize, |acc, &b| acc.checked_mul(map.branches[b].coeffs.degree()))
        .filter(|&d| d <= 1 << 17)
        .ok_or(Error::PeriodTooLarge { period: word.len(), max: search.max_period })?;
    let step = |z: Complex64| word_step(map, word, z);
    let polish = |roots: Vec<Complex64>| -> Vec<Complex64> {
        roots.into_iter().map(|r| newton_polish(r, step, 1e-15, 60)).collect()
    };
    let mut best = 0;
    if degree <= search.companion_max_degree {
        if let Some(r) = companion_roots(&word_poly(map, word)) {
            let r = polish(r);
            let k = count_distinct(&r, DISTINCT_TOL);
            if k == degree {
                return Ok(r);
            }
            best = k;
        }
    }
    let radius = root_radius(map);
    for attempt in 0..=search.aberth_retries {
        let phase = 0.4 + 0.7 * attempt as f64;
        let r = polish(aberth(degree, step, radius * (1.0 + 0.1 * attempt as f64), phase, 1000));
        let k = count_distinct(&r, DISTINCT_TOL);
        if k == degree {
            return Ok(r);
        }
        best = best.max(k);
    }
    Err(Error::SolverFailure { found: best, expected: degree })
}

fn all_words(branches: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(n)];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..branches).map(move |b| {
                    let mut v = w.clone();
                    v.push(b);
                    v
                })
            })
            .collect();
    }
    out
}

/// Roots of `f_w(z) - z` whose orbit follows the itinerary `w`.
fn itinerary_roots(map: &MapSpec, word: &[usize], roots: Vec<Complex64>) -> Vec<Complex64> {
    roots
        .into_iter()
        .filter(|&r| {
            let mut z = r;
            for &b in word {
                if map.branch_at(z) != Some(b) {
                    return false;
                }
                z = map.branches[b].coeffs.eval(z);
            }
            true
        })
        .collect()
}

fn rounded_key(z: Complex64) -> (i64, i64) {
    ((z.re * 1e8).round() as i64, (z.im * 1e8).round() as i64)
}

pub fn find_periodic(map: &MapSpec, period: usize, tol: f64) -> Result<Vec<PeriodicOrbit>> {
    find_periodic_with(map, period, tol, &OrbitSearch::for_map(map))
}

/// Primitive cycles of exact period `period`, sorted by canonical first point.
pub fn find_periodic_with(
    map: &MapSpec,
    period: usize,
    tol: f64,
    search: &OrbitSearch,
) -> Result<Vec<PeriodicOrbit>> {
    if period == 0 {
        return Err(Error::Empty("period must be positive"));
    }
    if period > search.max_period {
        return Err(Error::PeriodTooLarge { period, max: search.max_period });
    }
    let words = all_words(map.branches.len(), period);
    let solved: Vec<Result<(Vec<usize>, Vec<Complex64>)>> = words
        .par_iter()
        .map(|w| {
            let roots = solve_word(map, w, search)?;
            Ok((w.clone(), itinerary_roots(map, w, roots)))
        })
        .collect();
    let mut candidates = Vec::new();
    for s in solved {
        let (w, roots) = s?;
        for r in roots {
            candidates.push((w.clone(), r));
        }
    }

    let bound: usize = map.branches.iter().map(|b| b.degree as usize).sum::<usize>().pow(period as u32);
    if candidates.len() > bound {
        return Err(Error::SolverFailure { found: candidates.len(), expected: bound });
    }
    if candidates.len() < bound {
        log::warn!("period {period}: {} of at most {bound} periodic points found", candidates.len());
    }

    let crit_orbit = map.critical_orbit(search.post_critical_horizon).points;
    let divisors: Vec<usize> = (1..period).filter(|d| period % d == 0).collect();
    let mut seen = PointSet::new(1e-7);
    let mut orbits = Vec::new();
    for (word, r) in candidates {
        if seen.find(r).is_some() {
            continue;
        }
        let primitive = divisors.iter().all(|&d| {
            let mut z = r;
            for &b in &word[..d] {
                z = map.branches[b].coeffs.eval(z);
            }
            (z - r).norm() > tol * (1.0 + r.norm())
        });
        if !primitive {
            continue;
        }
        let mut points = vec![r];
        for k in 1..period {
            let prev = points[k - 1];
            let guess = map.branches[word[k - 1]].coeffs.eval(prev);
            let rotated: Vec<usize> = word[k..].iter().chain(&word[..k]).copied().collect();
            points.push(newton_polish(guess, |z| word_step(map, &rotated, z), 1e-15, 60));
        }
        let mut multiplier = 1.0;
        for (k, &p) in points.iter().enumerate() {
            multiplier *= map.eval_branch(word[k], p).1.norm();
        }
        for &p in &points {
            seen.insert(p);
        }
        let start = (0..period).min_by_key(|&k| rounded_key(points[k])).unwrap();
        points.rotate_left(start);
        let mut word = word;
        word.rotate_left(start);
        let near = |p: &Complex64, q: &Complex64| (p - q).norm() <= search.post_critical_tol;
        let critical = points.iter().any(|p| near(p, &map.critical_point));
        let post_critical = points.iter().any(|p| crit_orbit.iter().any(|q| near(p, q)));
        orbits.push(PeriodicOrbit {
            points,
            period,
            multiplier_abs: multiplier,
            word: Some(word),
            post_critical,
            critical,
        });
    }
    orbits.sort_by_key(|o| rounded_key(o.first()));
    Ok(orbits)
}

/// Periodic orbits of periods `1..=max_period`, without cycles through the
/// critical point, ordered by `(period, canonical point)`.
pub fn multiplier_spectrum(map: &MapSpec, max_period: usize) -> Result<Vec<PeriodicOrbit>> {
    if max_period == 0 {
        return Err(Error::Empty("max_period must be at least 1"));
    }
    let mut out = Vec::new();
    for n in 1..=max_period {
        out.extend(find_periodic(map, n, 1e-9)?.into_iter().filter(|o| !o.critical));
    }
    Ok(out)
}

/// Non-post-critical orbits in `(period, canonical point)` order; the
/// default anchor pool for the bridged subsystems.
pub fn anchor_candidates(map: &MapSpec, max_period: usize) -> Result<Vec<PeriodicOrbit>> {
    let mut out = Vec::new();
    for n in 1..=max_period {
        out.extend(find_periodic(map, n, 1e-9)?.into_iter().filter(|o| !o.post_critical && o.multiplier_abs > 1.0));
    }
    Ok(out)
}
