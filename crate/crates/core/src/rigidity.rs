//! Decision procedures built on periodic data: cohomology of potentials,
//! constant multipliers, invariant affine structure, and multiplier
//! preservation between two maps.
//!
//! Periodic data come from [`MarkovModel::word_log_multipliers`]: realized
//! orbit multipliers when the model carries its source map, geometric
//! midpoints of the derivative intervals otherwise.

use std::collections::{HashMap, HashSet};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map_engine::{DegenerateFlags, MapSpec};
use crate::markov::{BnConfig, BridgePlan, MarkovModel, PeriodicWord};
use crate::orbits::{anchor_candidates, PeriodicOrbit};
use crate::thermo::{pressure, PotentialSpec};

/// Default tolerance for data without discretization slack.
pub const EXACT_TOL: f64 = 1e-6;
const RIDGE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VerdictKind {
    Cohomologous,
    NotCohomologous,
    Linear { lambda: f64 },
    NonLinear,
    MultipliersPreserved,
    MultipliersDiverge,
}

impl VerdictKind {
    /// `cohomologous`, `linear` and `multipliers_preserved`.
    pub fn is_positive(&self) -> bool {
        matches!(self, VerdictKind::Cohomologous | VerdictKind::Linear { .. } | VerdictKind::MultipliersPreserved)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub word: String,
    pub period: usize,
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<Complex64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigidityVerdict {
    #[serde(flatten)]
    pub kind: VerdictKind,
    pub residual: f64,
    pub tolerance: f64,
    pub witness: Option<Witness>,
    pub tested_periods: (usize, usize),
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

fn require_hyperbolic(model: &MarkovModel) -> Result<()> {
    model.expansion()?;
    if !model.is_transitive() {
        return Err(Error::NonTransitive);
    }
    Ok(())
}

/// Primitive periodic words of period up to `max_period`; repeated words
/// carry no additional periodic data.
pub fn primitive_words(model: &MarkovModel, max_period: usize) -> Vec<PeriodicWord> {
    let mut w = model.periodic_words_upto(max_period);
    w.retain(|w| w.rotations == w.period());
    w
}

fn argmax<I: Iterator<Item = f64>>(it: I) -> Option<(usize, f64)> {
    it.enumerate().fold(None, |best, (i, v)| match best {
        Some((_, b)) if b >= v => best,
        _ => Some((i, v)),
    })
}

/// Checks `S_n phi - S_n psi = n (P(phi) - P(psi))` on all periodic words of
/// period up to `max_period`.
///
/// The residual is the larger of the worst deviation of the per-period mean
/// `(S_n phi - S_n psi) / n` from `P(phi) - P(psi)` and the spread of those
/// means across words.
pub fn livshitz_test(
    model: &MarkovModel,
    phi: &PotentialSpec,
    psi: &PotentialSpec,
    max_period: usize,
    tol: f64,
) -> Result<RigidityVerdict> {
    require_hyperbolic(model)?;
    let mid = |p: (f64, f64)| 0.5 * (p.0 + p.1);
    let dp = mid(pressure(model, phi, max_period)?) - mid(pressure(model, psi, max_period)?);
    let words = primitive_words(model, max_period);
    if words.is_empty() {
        return Err(Error::Empty("periodic words"));
    }
    let mut means = Vec::with_capacity(words.len());
    for w in &words {
        let a = phi.word_sum(model, w)?.1;
        let b = psi.word_sum(model, w)?.1;
        means.push((a - b) / w.period() as f64);
    }
    let (i_dev, dev) = argmax(means.iter().map(|m| (m - dp).abs())).unwrap();
    let (i_hi, hi) = argmax(means.iter().copied()).unwrap();
    let (i_lo, neg_lo) = argmax(means.iter().map(|m| -m)).unwrap();
    let spread = hi + neg_lo;
    let residual = dev.max(spread);
    let kind = if residual <= tol { VerdictKind::Cohomologous } else { VerdictKind::NotCohomologous };
    let witness = (!kind.is_positive()).then(|| {
        if spread >= dev {
            // the extreme word farther from the pressure difference
            let (w, other) = if (means[i_hi] - dp).abs() >= (means[i_lo] - dp).abs() {
                (i_hi, i_lo)
            } else {
                (i_lo, i_hi)
            };
            Witness {
                word: words[w].label(model),
                period: words[w].period(),
                values: vec![means[w], means[other]],
                points: Vec::new(),
            }
        } else {
            Witness {
                word: words[i_dev].label(model),
                period: words[i_dev].period(),
                values: vec![means[i_dev], dp],
                points: Vec::new(),
            }
        }
    });
    Ok(RigidityVerdict {
        kind,
        residual,
        tolerance: tol,
        witness,
        tested_periods: (1, max_period),
        notes: Vec::new(),
    })
}

/// Fits `lambda = exp(mean of log(m)/n)` and checks every entry against it.
pub fn constant_multiplier_test(spectrum: &[(usize, f64)], tol: f64) -> Result<RigidityVerdict> {
    constant_multiplier_impl(spectrum, tol, |i| (format!("entry {i}"), Vec::new()))
}

/// [`constant_multiplier_test`] on orbits, with orbit points in the witness.
pub fn constant_multiplier_orbits(orbits: &[PeriodicOrbit], tol: f64) -> Result<RigidityVerdict> {
    let spectrum: Vec<(usize, f64)> = orbits.iter().map(|o| (o.period, o.multiplier_abs)).collect();
    constant_multiplier_impl(&spectrum, tol, |i| {
        let o = &orbits[i];
        let z = o.first();
        (format!("period {} at {:.6}{:+.6}i", o.period, z.re, z.im), vec![z])
    })
}

fn constant_multiplier_impl<F>(spectrum: &[(usize, f64)], tol: f64, describe: F) -> Result<RigidityVerdict>
where
    F: Fn(usize) -> (String, Vec<Complex64>),
{
    if spectrum.is_empty() {
        return Err(Error::Empty("multiplier spectrum"));
    }
    let means: Vec<f64> = spectrum.iter().map(|&(n, m)| m.ln() / n as f64).collect();
    let log_lambda = means.iter().sum::<f64>() / means.len() as f64;
    let (i_dev, residual) = argmax(means.iter().map(|m| (m - log_lambda).abs())).unwrap();
    let periods = (
        spectrum.iter().map(|s| s.0).min().unwrap(),
        spectrum.iter().map(|s| s.0).max().unwrap(),
    );
    if residual <= tol {
        return Ok(RigidityVerdict {
            kind: VerdictKind::Linear { lambda: log_lambda.exp() },
            residual,
            tolerance: tol,
            witness: None,
            tested_periods: periods,
            notes: Vec::new(),
        });
    }
    // pair the worst entry with the entry farthest from it
    let (i_other, _) = argmax(means.iter().map(|m| (m - means[i_dev]).abs())).unwrap();
    let (word, mut points) = describe(i_dev);
    let (other_word, other_points) = describe(i_other);
    points.extend(other_points);
    Ok(RigidityVerdict {
        kind: VerdictKind::NonLinear,
        residual,
        tolerance: tol,
        witness: Some(Witness {
            word: format!("{word} vs {other_word}"),
            period: spectrum[i_dev].0,
            values: vec![means[i_dev], means[i_other]],
            points,
        }),
        tested_periods: periods,
        notes: Vec::new(),
    })
}

/// `(period, multiplier)` pairs of a model's periodic words.
pub fn model_spectrum(model: &MarkovModel, max_period: usize) -> Vec<(usize, f64)> {
    let words = primitive_words(model, max_period);
    model
        .word_log_multipliers(&words)
        .into_iter()
        .zip(&words)
        .filter_map(|(v, w)| v.map(|v| (w.period(), v.exp())))
        .collect()
}

/// Default tolerance: [`EXACT_TOL`] for realized or piecewise-linear data,
/// three times the largest propagated log-width otherwise.
pub fn default_tolerance(model: &MarkovModel, words: &[PeriodicWord]) -> f64 {
    if model.source.is_some() || model.is_piecewise_linear() {
        EXACT_TOL
    } else {
        3.0 * words.iter().map(|w| w.log_max - w.log_min).fold(0.0, f64::max).max(f64::MIN_POSITIVE)
    }
}

/// Least squares `min |A w - y|^2 + ridge |w|^2` for a sparse 0/count matrix
/// given row-wise as `(column, count)` lists.
fn least_squares(rows: &[Vec<(usize, f64)>], y: &[f64], cols: usize) -> Vec<f64> {
    if cols <= 800 {
        let mut ata = DMatrix::<f64>::zeros(cols, cols);
        let mut aty = DVector::<f64>::zeros(cols);
        for (row, &yi) in rows.iter().zip(y) {
            for &(i, a) in row {
                aty[i] += a * yi;
                for &(j, b) in row {
                    ata[(i, j)] += a * b;
                }
            }
        }
        for i in 0..cols {
            ata[(i, i)] += RIDGE;
        }
        if let Some(ch) = ata.clone().cholesky() {
            let mut w = ch.solve(&aty);
            // one refinement step against the normal equations
            let r = &aty - &ata * &w;
            w += ch.solve(&r);
            return w.iter().copied().collect();
        }
    }
    conjugate_gradient(rows, y, cols)
}

fn conjugate_gradient(rows: &[Vec<(usize, f64)>], y: &[f64], cols: usize) -> Vec<f64> {
    let apply = |w: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; cols];
        for row in rows {
            let s: f64 = row.iter().map(|&(j, a)| a * w[j]).sum();
            for &(j, a) in row {
                out[j] += a * s;
            }
        }
        for j in 0..cols {
            out[j] += RIDGE * w[j];
        }
        out
    };
    let mut b = vec![0.0; cols];
    for (row, &yi) in rows.iter().zip(y) {
        for &(j, a) in row {
            b[j] += a * yi;
        }
    }
    let mut w = vec![0.0; cols];
    let mut r = b.clone();
    let mut p = r.clone();
    let mut rr: f64 = r.iter().map(|v| v * v).sum();
    let b_norm = rr.sqrt().max(f64::MIN_POSITIVE);
    for _ in 0..10 * cols.max(10) {
        if rr.sqrt() <= 1e-15 * b_norm {
            break;
        }
        let ap = apply(&p);
        let alpha = rr / p.iter().zip(&ap).map(|(a, b)| a * b).sum::<f64>();
        for j in 0..cols {
            w[j] += alpha * p[j];
            r[j] -= alpha * ap[j];
        }
        let rr_new: f64 = r.iter().map(|v| v * v).sum();
        let beta = rr_new / rr;
        for j in 0..cols {
            p[j] = r[j] + beta * p[j];
        }
        rr = rr_new;
    }
    w
}

/// Fits one weight per transition so that cycle sums of the weights match
/// `log|Df^n|` on every periodic word of period up to `max_period`.
pub fn affine_structure_test(model: &MarkovModel, max_period: usize, tol: Option<f64>) -> Result<RigidityVerdict> {
    require_hyperbolic(model)?;
    let all_words = primitive_words(model, max_period);
    let values = model.word_log_multipliers(&all_words);
    let mut notes = Vec::new();
    let unrealized = values.iter().filter(|v| v.is_none()).count();
    if unrealized > 0 {
        notes.push(format!("{unrealized} of {} words did not realize as orbits", all_words.len()));
    }
    let (words, y): (Vec<&PeriodicWord>, Vec<f64>) =
        all_words.iter().zip(&values).filter_map(|(w, v)| v.map(|v| (w, v))).unzip();
    if words.is_empty() {
        return Err(Error::Empty("realized periodic words"));
    }
    let tol = tol.unwrap_or_else(|| default_tolerance(model, &all_words));

    let mut col_of: HashMap<usize, usize> = HashMap::new();
    let mut used_states = HashSet::new();
    let rows: Vec<Vec<(usize, f64)>> = words
        .iter()
        .map(|w| {
            let mut counts: HashMap<usize, f64> = HashMap::new();
            for &e in &w.edges {
                let next = col_of.len();
                let c = *col_of.entry(e).or_insert(next);
                *counts.entry(c).or_insert(0.0) += 1.0;
                used_states.insert(model.transitions[e].from);
            }
            let mut row: Vec<(usize, f64)> = counts.into_iter().collect();
            row.sort_unstable_by_key(|p| p.0);
            row
        })
        .collect();
    let cols = col_of.len();
    let cycle_dim = cols.saturating_sub(used_states.len()) + 1;
    if words.len() < cycle_dim {
        log::warn!("periodic words do not span the cycle space; increase max_period");
        notes.push(format!("underdetermined: {} words for cycle space of dimension {cycle_dim}", words.len()));
    }
    let w = least_squares(&rows, &y, cols);
    let fitted: Vec<f64> = rows.iter().map(|row| row.iter().map(|&(j, a)| a * w[j]).sum()).collect();
    let (i, residual) = argmax(fitted.iter().zip(&y).map(|(f, y)| (f - y).abs())).unwrap();
    let kind = if residual <= tol { VerdictKind::Cohomologous } else { VerdictKind::NonLinear };
    let witness = (!kind.is_positive()).then(|| Witness {
        word: words[i].label(model),
        period: words[i].period(),
        values: vec![fitted[i], y[i]],
        points: Vec::new(),
    });
    Ok(RigidityVerdict { kind, residual, tolerance: tol, witness, tested_periods: (1, max_period), notes })
}

fn parse_anchor_label(label: &str) -> Option<(usize, usize)> {
    let rest = label.strip_prefix('a')?;
    let (i, k) = rest.split_once('.')?;
    Some((i.parse().ok()?, k.parse().ok()?))
}

fn parse_bridge_label(label: &str) -> Option<(usize, usize, usize)> {
    let mut it = label.strip_prefix('b')?.split('.');
    let v = (it.next()?.parse().ok()?, it.next()?.parse().ok()?, it.next()?.parse().ok()?);
    it.next().is_none().then_some(v)
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

const MAX_CANDIDATES: usize = 4096;

/// Label-compatible candidate state maps `f -> g`: the identity on labels,
/// and for anchor/bridge models every permutation of equal-period anchors
/// combined with a rotation of each anchor orbit.
fn candidate_maps(f: &MarkovModel, g: &MarkovModel) -> Vec<Vec<usize>> {
    let by_label: HashMap<&str, usize> = g.states.iter().map(|s| (s.label.as_str(), s.id)).collect();
    let relabel = |map_label: &dyn Fn(&str) -> Option<String>| -> Option<Vec<usize>> {
        f.states.iter().map(|s| map_label(&s.label).and_then(|l| by_label.get(l.as_str()).copied())).collect()
    };
    let mut out = Vec::new();
    if let Some(m) = relabel(&|l: &str| Some(l.to_string())) {
        out.push(m);
    }
    let mut periods: Vec<usize> = Vec::new();
    for s in &f.states {
        if let Some((i, k)) = parse_anchor_label(&s.label) {
            if periods.len() <= i {
                periods.resize(i + 1, 0);
            }
            periods[i] = periods[i].max(k + 1);
        }
    }
    if periods.is_empty() {
        return out;
    }
    // group anchors by period and permute within groups
    let mut perms: Vec<Vec<usize>> = vec![(0..periods.len()).collect()];
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, &p) in periods.iter().enumerate() {
        groups.entry(p).or_default().push(i);
    }
    let mut group_list: Vec<Vec<usize>> = groups.into_values().collect();
    group_list.sort();
    for grp in group_list {
        let mut next = Vec::new();
        for base in &perms {
            for p in permutations(&grp) {
                let mut m = base.clone();
                for (a, b) in grp.iter().zip(&p) {
                    m[*a] = *b;
                }
                next.push(m);
            }
        }
        perms = next;
        if perms.len() > MAX_CANDIDATES {
            perms.truncate(MAX_CANDIDATES);
        }
    }
    let mut rotations: Vec<Vec<usize>> = vec![Vec::new()];
    for &p in &periods {
        rotations = rotations
            .into_iter()
            .flat_map(|r| {
                (0..p).map(move |k| {
                    let mut r = r.clone();
                    r.push(k);
                    r
                })
            })
            .take(MAX_CANDIDATES)
            .collect();
    }
    'outer: for pi in &perms {
        for rot in &rotations {
            let map_label = |l: &str| -> Option<String> {
                if let Some((i, k)) = parse_anchor_label(l) {
                    let n = periods[i];
                    return Some(format!("a{}.{}", pi[i], (k + rot[i]) % n));
                }
                if let Some((to, from, t)) = parse_bridge_label(l) {
                    return Some(format!("b{}.{}.{t}", pi[to], pi[from]));
                }
                Some(l.to_string())
            };
            if let Some(m) = relabel(&map_label) {
                out.push(m);
            }
            if out.len() >= MAX_CANDIDATES {
                break 'outer;
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Whether `map` sends the transitions of `f` bijectively onto those of `g`
/// with matching branch indices.
fn is_isomorphism(f: &MarkovModel, g: &MarkovModel, map: &[usize]) -> bool {
    if f.len() != g.len() || f.transitions.len() != g.transitions.len() {
        return false;
    }
    let mut seen = vec![false; g.len()];
    for &m in map {
        if seen[m] {
            return false;
        }
        seen[m] = true;
    }
    let ge: HashMap<(usize, usize), usize> = g.transitions.iter().map(|t| ((t.from, t.to), t.branch)).collect();
    f.transitions.iter().all(|t| ge.get(&(map[t.from], map[t.to])) == Some(&t.branch))
}

/// Label-compatible transition-graph isomorphisms from `f` to `g`.
pub fn graph_isomorphisms(f: &MarkovModel, g: &MarkovModel) -> Vec<Vec<usize>> {
    candidate_maps(f, g).into_iter().filter(|m| is_isomorphism(f, g, m)).collect()
}

/// Log multiplier of a closed state walk `states` in `model`.
fn walk_value(model: &MarkovModel, states: &[usize], edges: &HashMap<(usize, usize), usize>) -> Option<f64> {
    if model.source.is_some() {
        return model.realize_cycle(states).ok().map(|c| c.multiplier_abs.ln());
    }
    let n = states.len();
    (0..n)
        .map(|k| edges.get(&(states[k], states[(k + 1) % n])).map(|&e| model.transitions[e].log_mid()))
        .sum()
}

/// Compares per-period means of `log|Df^n|` on words matched through a
/// transition-graph isomorphism; the divergence is minimized over the
/// label-compatible isomorphisms.
pub fn pair_and_compare(
    f: &MarkovModel,
    g: &MarkovModel,
    max_period: usize,
    tol: Option<f64>,
) -> Result<RigidityVerdict> {
    let isos = graph_isomorphisms(f, g);
    if isos.is_empty() {
        return Err(Error::GraphMismatch);
    }
    let words = primitive_words(f, max_period);
    let vf = f.word_log_multipliers(&words);
    let g_edges = g.edge_index();
    let tol = tol.unwrap_or_else(|| {
        let wg = primitive_words(g, max_period.min(4));
        default_tolerance(f, &words).max(default_tolerance(g, &wg))
    });

    let mut best: Option<(f64, Option<(usize, f64, f64)>, usize)> = None;
    for (k, iso) in isos.iter().enumerate() {
        let mut worst: Option<(usize, f64, f64)> = None;
        let mut div = 0.0f64;
        for (i, w) in words.iter().enumerate() {
            let Some(a) = vf[i] else { continue };
            let mapped: Vec<usize> = w.states.iter().map(|&s| iso[s]).collect();
            let Some(b) = walk_value(g, &mapped, &g_edges) else { continue };
            let n = w.period() as f64;
            let d = ((a - b) / n).abs();
            if worst.is_none() || d > div {
                div = d;
                worst = Some((i, a / n, b / n));
            }
        }
        if best.as_ref().is_none_or(|(bd, _, _)| div < *bd) {
            best = Some((div, worst, k));
        }
    }
    let (residual, worst, _) = best.unwrap();
    let kind = if residual <= tol { VerdictKind::MultipliersPreserved } else { VerdictKind::MultipliersDiverge };
    let witness = (!kind.is_positive())
        .then(|| {
            worst.map(|(i, a, b)| Witness {
                word: words[i].label(f),
                period: words[i].period(),
                values: vec![a, b],
                points: Vec::new(),
            })
        })
        .flatten();
    Ok(RigidityVerdict {
        kind,
        residual,
        tolerance: tol,
        witness,
        tested_periods: (1, max_period),
        notes: Vec::new(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictConfig {
    pub anchor_count: usize,
    pub anchor_max_period: usize,
    /// Neighborhood radius as a fraction of the anchor set diameter.
    pub radius_fraction: f64,
    /// Critical-orbit guard as a fraction of the anchor set diameter.
    pub guard_fraction: f64,
    pub bridge_depth: usize,
    /// Longest periodic word used; chosen from the bridge lengths if absent.
    pub word_max_period: Option<usize>,
    pub max_cycle_len: usize,
    pub tol: Option<f64>,
}

impl Default for VerdictConfig {
    fn default() -> Self {
        VerdictConfig {
            anchor_count: 2,
            anchor_max_period: 3,
            radius_fraction: 0.02,
            guard_fraction: 0.02,
            bridge_depth: 40,
            word_max_period: None,
            max_cycle_len: 12,
            tol: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Certificate {
    ConformalConjugacyCriteriaMet,
    LinearStructureFound,
    MultipliersDiverge,
    GraphMismatch,
}

impl Certificate {
    pub fn exit_code(self) -> i32 {
        match self {
            Certificate::ConformalConjugacyCriteriaMet => 0,
            _ => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub certificate: Certificate,
    pub flags_f: DegenerateFlags,
    pub flags_g: DegenerateFlags,
    pub affine_f: Option<RigidityVerdict>,
    pub affine_g: Option<RigidityVerdict>,
    pub comparison: Option<RigidityVerdict>,
    /// `(to, from, length)` of every bridge, shared by both models.
    pub bridge_depths: Vec<(usize, usize, usize)>,
    pub word_max_period: usize,
    pub model_sizes: (usize, usize),
    pub note: String,
}

const TEICHMULLER_NOTE: &str = "positive multiplier divergence certifies positive Teichmuller distance; \
zero divergence is a necessary condition only";

/// Degenerate maps are rejected with the flag that failed.
fn check_degenerate(map: &MapSpec, which: &str) -> Result<DegenerateFlags> {
    let flags = map.classify_degenerate();
    let fail = |flag: &str| Err(Error::Degenerate { which: which.into(), flag: flag.into() });
    if flags.chebyshev && !flags.power_like {
        return fail("chebyshev");
    }
    if flags.power_like {
        return fail("power_like");
    }
    Ok(flags)
}

/// The first `count` admissible anchors in `(period, canonical point)` order.
pub fn select_anchors(map: &MapSpec, count: usize, max_period: usize) -> Result<Vec<PeriodicOrbit>> {
    let mut a = anchor_candidates(map, max_period)?;
    if a.len() < count {
        return Err(Error::Empty("not enough non post-critical repelling anchors"));
    }
    a.truncate(count);
    Ok(a)
}

fn diameter(anchors: &[PeriodicOrbit]) -> f64 {
    let pts: Vec<Complex64> = anchors.iter().flat_map(|a| a.points.iter().copied()).collect();
    let mut d = 0.0f64;
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            d = d.max((p - q).norm());
        }
    }
    if d > 0.0 {
        d
    } else {
        1.0
    }
}

/// Bridge construction settings scaled to the anchor set.
pub fn bn_config(anchors: &[PeriodicOrbit], cfg: &VerdictConfig) -> BnConfig {
    let diam = diameter(anchors);
    BnConfig {
        guard: cfg.guard_fraction * diam,
        max_depth: cfg.bridge_depth,
        ..BnConfig::new(cfg.radius_fraction * diam)
    }
}

/// Longest anchor round trip through two bridges, plus slack.
pub fn auto_word_period(plan: &BridgePlan) -> usize {
    let depths = plan.depths();
    let n = plan.anchors.len();
    let mut longest = plan.anchors.iter().map(|a| a.period).max().unwrap_or(1);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let trip = depths[&(i, j)] + depths[&(j, i)] + plan.anchors[i].period + plan.anchors[j].period;
                longest = longest.max(trip);
            }
        }
    }
    (longest + 2).clamp(4, 28)
}

/// Matched bridged models for `f` and `g`: bridges are lengthened where
/// needed so that both models share one transition graph.
pub fn matched_models(
    f: &MapSpec,
    g: &MapSpec,
    cfg: &VerdictConfig,
) -> Result<Option<((BridgePlan, MarkovModel), (BridgePlan, MarkovModel))>> {
    let af = select_anchors(f, cfg.anchor_count, cfg.anchor_max_period)?;
    let ag = select_anchors(g, cfg.anchor_count, cfg.anchor_max_period)?;
    let pf: Vec<usize> = af.iter().map(|a| a.period).collect();
    let pg: Vec<usize> = ag.iter().map(|a| a.period).collect();
    if pf != pg {
        return Ok(None);
    }
    let mut cf = bn_config(&af, cfg);
    let mut cg = bn_config(&ag, cfg);
    let mut bf = cf.build(f, &af)?;
    let mut bg = cg.build(g, &ag)?;
    let (df, dg) = (bf.0.depths(), bg.0.depths());
    if df != dg {
        let forced: HashMap<(usize, usize), usize> = df.iter().map(|(k, &d)| (*k, d.max(dg[k]))).collect();
        cf.forced_depths = forced.clone();
        cg.forced_depths = forced;
        match (cf.build(f, &af), cg.build(g, &ag)) {
            (Ok(x), Ok(y)) => {
                bf = x;
                bg = y;
            }
            (Err(Error::BridgeNotFound { .. }), _) | (_, Err(Error::BridgeNotFound { .. })) => return Ok(None),
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    }
    Ok(Some((bf, bg)))
}

/// Chains the criteria for a pair of maps: both bridged models without an
/// invariant affine structure, and multipliers preserved between them.
pub fn rigidity_verdict(f: &MapSpec, g: &MapSpec, cfg: &VerdictConfig) -> Result<VerdictReport> {
    let flags_f = check_degenerate(f, "f")?;
    let flags_g = check_degenerate(g, "g")?;
    let mut report = VerdictReport {
        certificate: Certificate::GraphMismatch,
        flags_f,
        flags_g,
        affine_f: None,
        affine_g: None,
        comparison: None,
        bridge_depths: Vec::new(),
        word_max_period: 0,
        model_sizes: (0, 0),
        note: TEICHMULLER_NOTE.into(),
    };
    let Some(((plan_f, mut mf), (_, mut mg))) = matched_models(f, g, cfg)? else {
        return Ok(report);
    };
    mf.certify(cfg.max_cycle_len)?;
    mg.certify(cfg.max_cycle_len)?;
    let mut depths: Vec<(usize, usize, usize)> = plan_f.bridges.iter().map(|b| (b.to, b.from, b.depth())).collect();
    depths.sort_unstable();
    report.bridge_depths = depths;
    report.model_sizes = (mf.len(), mg.len());
    let period = cfg.word_max_period.unwrap_or_else(|| auto_word_period(&plan_f));
    report.word_max_period = period;

    let affine_f = affine_structure_test(&mf, period, cfg.tol)?;
    let affine_g = affine_structure_test(&mg, period, cfg.tol)?;
    let comparison = match pair_and_compare(&mf, &mg, period, cfg.tol) {
        Ok(v) => Some(v),
        Err(Error::GraphMismatch) => None,
        Err(e) => return Err(e),
    };
    let nonlinear = affine_f.kind == VerdictKind::NonLinear && affine_g.kind == VerdictKind::NonLinear;
    report.certificate = match &comparison {
        None => Certificate::GraphMismatch,
        Some(c) if c.kind == VerdictKind::MultipliersDiverge => Certificate::MultipliersDiverge,
        Some(_) if !nonlinear => Certificate::LinearStructureFound,
        Some(_) => Certificate::ConformalConjugacyCriteriaMet,
    };
    report.affine_f = Some(affine_f);
    report.affine_g = Some(affine_g);
    report.comparison = comparison;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN2: f64 = std::f64::consts::LN_2;

    fn certified(mut m: MarkovModel) -> MarkovModel {
        m.certify(12).unwrap();
        m
    }

    #[test]
    fn livshitz_reflexive_and_witnessed() {
        let m = certified(MarkovModel::full_shift(&[2.0, 4.0]).unwrap());
        let phi = PotentialSpec::log_deriv(1.0);
        let v = livshitz_test(&m, &phi, &phi, 6, 1e-9).unwrap();
        assert_eq!(v.kind, VerdictKind::Cohomologous);
        assert_eq!(v.residual, 0.0);
        let v = livshitz_test(&m, &phi, &PotentialSpec::Constant { value: 0.0 }, 6, 1e-9).unwrap();
        assert_eq!(v.kind, VerdictKind::NotCohomologous);
        assert!(v.residual >= LN2 - 1e-9);
        let w = v.witness.unwrap();
        assert_eq!(w.period, 1);
    }

    #[test]
    fn explicit_coboundary_is_cohomologous() {
        let m = certified(MarkovModel::golden_mean(3.0).unwrap());
        let phi: Vec<f64> = vec![0.3, -1.2, 0.7];
        let s = [0.9, -0.4];
        let psi: Vec<f64> =
            m.transitions.iter().zip(&phi).map(|(t, p)| p + s[t.to] - s[t.from]).collect();
        let v = livshitz_test(
            &m,
            &PotentialSpec::EdgeWeights { w: phi },
            &PotentialSpec::EdgeWeights { w: psi },
            8,
            1e-9,
        )
        .unwrap();
        assert_eq!(v.kind, VerdictKind::Cohomologous, "{v:?}");
    }

    #[test]
    fn constant_multiplier_examples() {
        let sq: Vec<(usize, f64)> = (1..=4).map(|n| (n, 2f64.powi(n as i32))).collect();
        let v = constant_multiplier_test(&sq, 1e-8).unwrap();
        match v.kind {
            VerdictKind::Linear { lambda } => assert!((lambda - 2.0).abs() < 1e-12),
            _ => panic!("{v:?}"),
        }
        let v = constant_multiplier_test(&[(1, 4.0), (1, 2.0)], 1e-8).unwrap();
        assert_eq!(v.kind, VerdictKind::NonLinear);
        assert!(v.witness.is_some());
    }

    #[test]
    fn affine_structure_on_piecewise_linear_model() {
        let m = certified(MarkovModel::full_shift(&[2.0, 5.0]).unwrap());
        let v = affine_structure_test(&m, 6, None).unwrap();
        assert_eq!(v.kind, VerdictKind::Cohomologous);
        assert!(v.residual < 1e-9);
    }

    #[test]
    fn compare_examples() {
        let f = MarkovModel::full_shift(&[2.0, 4.0]).unwrap();
        let v = pair_and_compare(&f, &f, 6, None).unwrap();
        assert_eq!(v.kind, VerdictKind::MultipliersPreserved);
        assert_eq!(v.residual, 0.0);
        let g = MarkovModel::full_shift(&[2.0, 5.0]).unwrap();
        let v = pair_and_compare(&f, &g, 6, None).unwrap();
        assert_eq!(v.kind, VerdictKind::MultipliersDiverge);
        assert!((v.residual - (5.0f64 / 4.0).ln()).abs() < 1e-12);
        assert_eq!(v.witness.unwrap().word, "s1");
        let h = MarkovModel::golden_mean(2.0).unwrap();
        assert_eq!(pair_and_compare(&f, &h, 4, None), Err(Error::GraphMismatch));
    }

    #[test]
    fn verdict_json_shape() {
        let v = constant_multiplier_test(&[(1, 2.0), (2, 4.0)], 1e-8).unwrap();
        let j = serde_json::to_value(&v).unwrap();
        assert_eq!(j["kind"], "linear");
        assert!((j["lambda"].as_f64().unwrap() - 2.0).abs() < 1e-12);
        let back: RigidityVerdict = serde_json::from_value(j).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn chebyshev_is_rejected() {
        let f = MapSpec::quadratic(Complex64::new(-2.0, 0.0));
        let g = MapSpec::quadratic(Complex64::new(0.0, 1.0));
        let e = rigidity_verdict(&f, &g, &VerdictConfig::default()).unwrap_err();
        assert_eq!(e, Error::Degenerate { which: "f".into(), flag: "chebyshev".into() });
        let p = MapSpec::quadratic(Complex64::new(0.0, 0.0));
        let e = rigidity_verdict(&g, &p, &VerdictConfig::default()).unwrap_err();
        assert_eq!(e, Error::Degenerate { which: "g".into(), flag: "power_like".into() });
    }
}
