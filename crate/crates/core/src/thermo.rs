//! Pressure, entropy, Bowen dimension and the measure of maximal entropy on
//! a [`MarkovModel`].
//!
//! For potentials that are constant on transitions, pressure is the log of
//! the spectral radius of the weighted transition matrix `M[i][j] =
//! exp(phi(i -> j))`. Evaluating `phi` at the two ends of every derivative
//! interval gives two matrices whose radii bound the pressure of the true
//! potential from both sides. The periodic-orbit partition sum at a fixed
//! order, and its cycle expansion, are available separately as independent
//! estimates.

use serde::{Deserialize, Serialize};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::markov::{MarkovModel, PeriodicWord};
use crate::poly::Poly;
use crate::roots::companion_roots;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TabulatedWord {
    pub states: Vec<usize>,
    /// Birkhoff sum of the potential around the cycle.
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialSpec {
    /// `-t log|Df|`.
    LogDerivScaled { t: f64 },
    Constant { value: f64 },
    /// One value per transition, in transition order.
    EdgeWeights { w: Vec<f64> },
    /// Cycle sums on periodic words, keyed by least-rotation state sequence.
    Tabulated { values: Vec<TabulatedWord> },
}

impl PotentialSpec {
    pub fn log_deriv(t: f64) -> Self {
        PotentialSpec::LogDerivScaled { t }
    }

    fn check(&self, model: &MarkovModel) -> Result<()> {
        if let PotentialSpec::EdgeWeights { w } = self {
            if w.len() != model.transitions.len() {
                return Err(Error::PotentialMismatch(format!(
                    "{} edge weights for {} transitions",
                    w.len(),
                    model.transitions.len()
                )));
            }
        }
        Ok(())
    }

    /// `(lo, mid, hi)` of the potential on transition `e`.
    pub fn edge_values(&self, model: &MarkovModel, e: usize) -> Result<(f64, f64, f64)> {
        let tr = &model.transitions[e];
        match self {
            PotentialSpec::LogDerivScaled { t } => {
                let a = -t * tr.log_max();
                let b = -t * tr.log_min();
                Ok((a.min(b), -t * tr.log_mid(), a.max(b)))
            }
            PotentialSpec::Constant { value } => Ok((*value, *value, *value)),
            PotentialSpec::EdgeWeights { w } => {
                let v = *w.get(e).ok_or_else(|| Error::PotentialMismatch(format!("no weight for transition {e}")))?;
                Ok((v, v, v))
            }
            PotentialSpec::Tabulated { .. } => {
                Err(Error::PotentialMismatch("tabulated potentials have no edge values".into()))
            }
        }
    }

    /// `(lo, mid, hi)` of the Birkhoff sum around `word`.
    pub fn word_sum(&self, model: &MarkovModel, word: &PeriodicWord) -> Result<(f64, f64, f64)> {
        if let PotentialSpec::Tabulated { values } = self {
            return values
                .iter()
                .find(|v| v.states == word.states)
                .map(|v| (v.value, v.value, v.value))
                .ok_or_else(|| Error::PotentialMismatch(format!("no value for word {:?}", word.states)));
        }
        let mut acc = (0.0, 0.0, 0.0);
        for &e in &word.edges {
            let (a, b, c) = self.edge_values(model, e)?;
            acc = (acc.0 + a, acc.1 + b, acc.2 + c);
        }
        Ok(acc)
    }
}

/// Perron data of a nonnegative matrix given by weighted edges.
#[derive(Clone, Debug)]
pub struct Perron {
    pub rho: f64,
    /// Collatz-Wielandt enclosure of `rho`.
    pub bounds: (f64, f64),
    pub right: Vec<f64>,
}

const PERRON_RTOL: f64 = 1e-13;

/// Shifted power iteration on `M` restricted to the states `comp`, which must
/// form a strongly connected component. `edges` hold `(from, to, weight)`.
fn perron_component(n: usize, comp: &[usize], edges: &[(usize, usize, f64)], transpose: bool) -> Perron {
    let mut local = vec![usize::MAX; n];
    for (k, &s) in comp.iter().enumerate() {
        local[s] = k;
    }
    let sub: Vec<(usize, usize, f64)> = edges
        .iter()
        .filter(|&&(u, v, _)| local[u] != usize::MAX && local[v] != usize::MAX)
        .map(|&(u, v, w)| if transpose { (local[v], local[u], w) } else { (local[u], local[v], w) })
        .collect();
    let m = comp.len();
    if sub.is_empty() {
        return Perron { rho: 0.0, bounds: (0.0, 0.0), right: vec![1.0; m] };
    }
    let scale = sub.iter().map(|e| e.2).fold(0.0, f64::max);
    let mut x = vec![1.0 / m as f64; m];
    let mut est = (0.0, f64::INFINITY);
    // the shift keeps periodic components convergent; tying it to the
    // current estimate keeps it from dominating when rho is small
    let mut shift = 1.0;
    for _ in 0..500_000 {
        let mut y = vec![0.0; m];
        for &(u, v, w) in &sub {
            y[u] += w / scale * x[v];
        }
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..m {
            let r = y[i] / x[i];
            lo = lo.min(r);
            hi = hi.max(r);
        }
        est = (lo, hi);
        let norm: f64 = y.iter().zip(&x).map(|(a, b)| a + shift * b).sum();
        for i in 0..m {
            x[i] = (y[i] + shift * x[i]) / norm;
        }
        if lo > 0.0 {
            shift = 0.5 * (lo + hi);
        }
        if hi - lo <= PERRON_RTOL * hi {
            break;
        }
    }
    let (lo, hi) = (est.0 * scale, est.1 * scale);
    Perron { rho: 0.5 * (lo + hi), bounds: (lo, hi), right: x }
}

/// Spectral radius over all strongly connected components.
fn spectral_radius(model: &MarkovModel, weights: &[f64]) -> (f64, (f64, f64)) {
    let edges: Vec<(usize, usize, f64)> =
        model.transitions.iter().zip(weights).map(|(t, &w)| (t.from, t.to, w)).collect();
    let mut best = (0.0, (0.0, 0.0));
    for comp in model.components() {
        let p = perron_component(model.len(), &comp, &edges, false);
        if p.rho > best.0 {
            best = (p.rho, p.bounds);
        }
    }
    best
}

/// `log rho(M)` with `M` built from `exp(values)`, computed with a shift so
/// that large or small potentials neither overflow nor underflow.
fn log_radius(model: &MarkovModel, values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NEG_INFINITY;
    }
    let shift = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = values.iter().map(|v| (v - shift).exp()).collect();
    spectral_radius(model, &w).0.ln() + shift
}

/// Transfer-matrix pressure `(P_lower, P_upper)` of an edge-constant potential.
pub fn transfer_pressure(model: &MarkovModel, potential: &PotentialSpec) -> Result<(f64, f64)> {
    potential.check(model)?;
    let mut lo = Vec::with_capacity(model.transitions.len());
    let mut hi = Vec::with_capacity(model.transitions.len());
    for e in 0..model.transitions.len() {
        let (a, _, c) = potential.edge_values(model, e)?;
        lo.push(a);
        hi.push(c);
    }
    Ok((log_radius(model, &lo), log_radius(model, &hi)))
}

/// Two-sided pressure of `potential`.
///
/// Edge-constant potentials use the transfer matrix; tabulated potentials,
/// which are only known on cycles, use the cycle expansion at `order`.
pub fn pressure(model: &MarkovModel, potential: &PotentialSpec, order: usize) -> Result<(f64, f64)> {
    model.expansion()?;
    if order == 0 {
        return Err(Error::Empty("pressure order must be at least 1"));
    }
    match potential {
        PotentialSpec::Tabulated { .. } => cycle_pressure(model, potential, order),
        _ => transfer_pressure(model, potential),
    }
}

fn log_sum_exp(terms: impl Iterator<Item = (f64, f64)>) -> f64 {
    // (log weight, value): log sum weight * exp(value)
    let terms: Vec<f64> = terms.map(|(lw, v)| lw + v).collect();
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// Partition-sum pressure `(1/n) log sum_{closed walks} exp(S_n phi)` at
/// order `n`, with lower and upper sums from the edge intervals.
pub fn partition_pressure(model: &MarkovModel, potential: &PotentialSpec, order: usize) -> Result<(f64, f64)> {
    potential.check(model)?;
    let words = model.periodic_words(order);
    let mut lo = Vec::with_capacity(words.len());
    let mut hi = Vec::with_capacity(words.len());
    for w in &words {
        let (a, _, c) = potential.word_sum(model, w)?;
        let lw = (w.rotations as f64).ln();
        lo.push((lw, a));
        hi.push((lw, c));
    }
    let n = order as f64;
    Ok((log_sum_exp(lo.into_iter()) / n, log_sum_exp(hi.into_iter()) / n))
}

/// Log partition sums `log Z_k`, `k = 1..=order`, from the lower and upper
/// edge values.
fn log_traces(model: &MarkovModel, potential: &PotentialSpec, order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut lo = Vec::with_capacity(order);
    let mut hi = Vec::with_capacity(order);
    for k in 1..=order {
        let mut a = Vec::new();
        let mut c = Vec::new();
        for w in model.periodic_words(k) {
            let (x, _, z) = potential.word_sum(model, &w)?;
            let lw = (w.rotations as f64).ln();
            a.push((lw, x));
            c.push((lw, z));
        }
        lo.push(log_sum_exp(a.into_iter()));
        hi.push(log_sum_exp(c.into_iter()));
    }
    Ok((lo, hi))
}

/// Largest real root of the characteristic polynomial whose power sums are
/// `exp(log_traces)`, in log scale.
fn log_root_from_traces(log_traces: &[f64]) -> f64 {
    let k_max = log_traces.len();
    let sigma = log_traces
        .iter()
        .enumerate()
        .filter(|(_, t)| t.is_finite())
        .map(|(k, t)| t / (k + 1) as f64)
        .fold(f64::NEG_INFINITY, f64::max);
    if sigma == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    // power sums of M / e^sigma, then Newton's identities
    let p: Vec<f64> = log_traces.iter().enumerate().map(|(k, t)| (t - (k + 1) as f64 * sigma).exp()).collect();
    let mut e = vec![1.0];
    for k in 1..=k_max {
        let mut acc = 0.0;
        for i in 1..=k {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += sign * e[k - i] * p[i - 1];
        }
        e.push(acc / k as f64);
    }
    // x^K - e1 x^(K-1) + e2 x^(K-2) - ..., ascending coefficients
    let coeffs: Vec<Complex64> = (0..=k_max)
        .map(|j| {
            let k = k_max - j;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            Complex64::new(sign * e[k], 0.0)
        })
        .collect();
    let q = Poly::new(coeffs);
    let Some(roots) = companion_roots(&q) else { return f64::NAN };
    let real = roots
        .iter()
        .filter(|r| r.re > 0.0 && r.im.abs() <= 1e-6 * r.norm())
        .map(|r| r.re)
        .fold(f64::NAN, f64::max);
    let mut x = if real.is_nan() { roots.iter().map(|r| r.norm()).fold(0.0, f64::max) } else { real };
    // polish on the real line
    for _ in 0..8 {
        let (v, d) = q.eval_with_derivative(Complex64::new(x, 0.0));
        if d.re == 0.0 {
            break;
        }
        let step = v.re / d.re;
        x -= step;
        if step.abs() <= 1e-16 * x.abs() {
            break;
        }
    }
    x.ln() + sigma
}

/// Pressure from the partition sums of orders `1..=order` through the
/// truncated cycle expansion `det(I - zM) = exp(-sum_k z^k Z_k / k)`.
///
/// Exact, up to rounding, once `order` reaches the number of states.
pub fn cycle_pressure(model: &MarkovModel, potential: &PotentialSpec, order: usize) -> Result<(f64, f64)> {
    potential.check(model)?;
    if order == 0 {
        return Err(Error::Empty("pressure order must be at least 1"));
    }
    let (lo, hi) = log_traces(model, potential, order)?;
    Ok((log_root_from_traces(&lo), log_root_from_traces(&hi)))
}

/// Topological entropy, `log` of the spectral radius of the 0/1 matrix.
pub fn entropy(model: &MarkovModel) -> f64 {
    log_radius(model, &vec![0.0; model.transitions.len()])
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    // f(a) > 0 >= f(b)
    while b - a > tol {
        let m = 0.5 * (a + b);
        if f(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    (a, b)
}

/// Bracket around the zero of `t -> P(-t log|Df|)`.
///
/// The lower end comes from the lower pressure curve and the upper end from
/// the upper one, so the bracket also absorbs the derivative slack.
pub fn bowen_dimension(model: &MarkovModel, order: usize, tol: f64) -> Result<(f64, f64)> {
    let exp = model.expansion()?;
    let p = |t: f64| pressure(model, &PotentialSpec::log_deriv(t), order);
    let p0 = p(0.0)?.1;
    if p0 <= 1e-12 {
        return Err(Error::NoSignChange { p0 });
    }
    let mut t_hi = (model.len().max(2) as f64).ln() / exp.kappa.ln() + 1.0;
    for _ in 0..64 {
        if p(t_hi)?.1 < 0.0 {
            break;
        }
        t_hi *= 2.0;
    }
    if p(t_hi)?.1 >= 0.0 {
        return Err(Error::NoSignChange { p0 });
    }
    let lower = |t: f64| p(t).map(|v| v.0).unwrap_or(f64::NAN);
    let upper = |t: f64| p(t).map(|v| v.1).unwrap_or(f64::NAN);
    let (a, _) = bisect(lower, 0.0, t_hi, tol / 2.0);
    let (_, b) = bisect(upper, 0.0, t_hi, tol / 2.0);
    Ok((a, b))
}

/// Shannon-Parry measure of maximal entropy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxEntropy {
    /// Probability of each transition.
    pub edges: Vec<f64>,
    pub states: Vec<f64>,
    pub entropy: f64,
}

pub fn max_entropy_weights(model: &MarkovModel) -> Result<MaxEntropy> {
    if !model.is_transitive() {
        return Err(Error::NonTransitive);
    }
    let n = model.len();
    let all: Vec<usize> = (0..n).collect();
    let edges: Vec<(usize, usize, f64)> = model.transitions.iter().map(|t| (t.from, t.to, 1.0)).collect();
    let right = perron_component(n, &all, &edges, false);
    let left = perron_component(n, &all, &edges, true);
    let rho = right.rho;
    let (r, l) = (&right.right, &left.right);
    let norm: f64 = (0..n).map(|i| l[i] * r[i]).sum();
    let states: Vec<f64> = (0..n).map(|i| l[i] * r[i] / norm).collect();
    let edge_p: Vec<f64> = model.transitions.iter().map(|t| l[t.from] * r[t.to] / (rho * norm)).collect();
    Ok(MaxEntropy { edges: edge_p, states, entropy: rho.ln() })
}

/// `(chi_lower, chi_upper)` of `sum_e p_e log|Df|` for stationary edge weights.
pub fn lyapunov(model: &MarkovModel, weights: &[f64]) -> Result<(f64, f64)> {
    if weights.len() != model.transitions.len() {
        return Err(Error::PotentialMismatch("one weight per transition required".into()));
    }
    let mut flow = vec![0.0; model.len()];
    for (t, &p) in model.transitions.iter().zip(weights) {
        flow[t.from] -= p;
        flow[t.to] += p;
    }
    let total: f64 = weights.iter().sum();
    let defect = flow.iter().map(|f| f.abs()).fold((total - 1.0).abs(), f64::max);
    if defect > 1e-9 {
        return Err(Error::NotStationary(defect));
    }
    let lo = model.transitions.iter().zip(weights).map(|(t, p)| p * t.log_min()).sum();
    let hi = model.transitions.iter().zip(weights).map(|(t, p)| p * t.log_max()).sum();
    Ok((lo, hi))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PressureSample {
    pub t: f64,
    pub p_lower: f64,
    pub p_upper: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermoReport {
    pub pressure_samples: Vec<PressureSample>,
    pub entropy: f64,
    pub bowen_dim: (f64, f64),
    pub lyapunov_max_entropy: f64,
    pub lyapunov_interval: (f64, f64),
    pub hd_max_entropy: f64,
    pub hd_interval: (f64, f64),
    /// The intervals for `HD(m)` and the Bowen root overlap within `tol`.
    pub equality_case: bool,
    /// Sampled midpoints are non-increasing and discretely convex.
    pub pressure_shape_ok: bool,
    pub order: usize,
    pub tol: f64,
}

/// Samples of `(t, P_lower, P_upper)` on `steps` evenly spaced values in
/// `[t_min, t_max]`; a single step samples `t_min`.
pub fn pressure_curve(
    model: &MarkovModel,
    t_min: f64,
    t_max: f64,
    steps: usize,
    order: usize,
) -> Result<Vec<PressureSample>> {
    let steps = steps.max(1);
    (0..steps)
        .map(|k| {
            let t = if steps == 1 { t_min } else { t_min + (t_max - t_min) * k as f64 / (steps - 1) as f64 };
            let (p_lower, p_upper) = pressure(model, &PotentialSpec::log_deriv(t), order)?;
            Ok(PressureSample { t, p_lower, p_upper })
        })
        .collect()
}

/// Midpoints non-increasing and discretely convex, within `slack`.
pub fn pressure_shape_ok(samples: &[PressureSample], slack: f64) -> bool {
    let mid: Vec<f64> = samples.iter().map(|s| 0.5 * (s.p_lower + s.p_upper)).collect();
    let ts: Vec<f64> = samples.iter().map(|s| s.t).collect();
    let decreasing = mid.windows(2).all(|w| w[1] <= w[0] + slack);
    let convex = (1..mid.len().saturating_sub(1)).all(|k| {
        let (t0, t1, t2) = (ts[k - 1], ts[k], ts[k + 1]);
        let interp = mid[k - 1] + (mid[k + 1] - mid[k - 1]) * (t1 - t0) / (t2 - t0);
        mid[k] <= interp + slack
    });
    decreasing && convex
}

pub fn dimension_report(model: &MarkovModel, order: usize, tol: f64) -> Result<ThermoReport> {
    model.expansion()?;
    if !model.is_transitive() {
        return Err(Error::NonTransitive);
    }
    let bowen = bowen_dimension(model, order, tol)?;
    let t_max = (2.0 * bowen.1).max(1.0);
    let samples = pressure_curve(model, 0.0, t_max, 17, order)?;
    let me = max_entropy_weights(model)?;
    let h = entropy(model);
    let chi = lyapunov(model, &me.edges)?;
    let chi_mid = 0.5 * (chi.0 + chi.1);
    let hd = (h / chi.1, h / chi.0);
    let equality_case = hd.0 <= bowen.1 + tol && bowen.0 <= hd.1 + tol;
    Ok(ThermoReport {
        pressure_shape_ok: pressure_shape_ok(&samples, 1e-10),
        pressure_samples: samples,
        entropy: h,
        bowen_dim: bowen,
        lyapunov_max_entropy: chi_mid,
        lyapunov_interval: chi,
        hd_max_entropy: h / chi_mid,
        hd_interval: hd,
        equality_case,
        order,
        tol,
    })
}

/// Cycle sums of `potential` keyed by word, for tabulating.
pub fn tabulate(model: &MarkovModel, potential: &PotentialSpec, max_period: usize) -> Result<PotentialSpec> {
    let mut values = Vec::new();
    for w in model.periodic_words_upto(max_period) {
        values.push(TabulatedWord { value: potential.word_sum(model, &w)?.1, states: w.states });
    }
    Ok(PotentialSpec::Tabulated { values })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn certified(mut m: MarkovModel) -> MarkovModel {
        m.certify(12).unwrap();
        m
    }

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn full_shift_constant_pressure() {
        let m = certified(MarkovModel::full_shift(&[3.0, 3.0]).unwrap());
        let (lo, hi) = pressure(&m, &PotentialSpec::Constant { value: 0.0 }, 5).unwrap();
        assert!((lo - LN2).abs() < 1e-12 && (hi - LN2).abs() < 1e-12);
        let (lo, _) = partition_pressure(&m, &PotentialSpec::Constant { value: 0.0 }, 7).unwrap();
        assert!((lo - LN2).abs() < 1e-12);
    }

    #[test]
    fn linear_branch_pressure_closed_form() {
        let m = certified(MarkovModel::full_shift(&[3.0, 3.0]).unwrap());
        for s in [0.0, 0.3, 0.63, 1.0, 2.5] {
            let (lo, hi) = pressure(&m, &PotentialSpec::log_deriv(s), 4).unwrap();
            let exact = (2.0 * 3f64.powf(-s)).ln();
            assert!((lo - exact).abs() < 1e-11 && (hi - exact).abs() < 1e-11, "{s}");
        }
    }

    #[test]
    fn cycle_pressure_and_dimension() {
        let m = certified(MarkovModel::cycle(3, 2.0).unwrap());
        let (lo, _) = pressure(&m, &PotentialSpec::Constant { value: 0.0 }, 3).unwrap();
        assert!(lo.abs() < 1e-12);
        assert!(matches!(bowen_dimension(&m, 6, 1e-8), Err(Error::NoSignChange { .. })));
    }

    #[test]
    fn pressure_needs_certificate() {
        let m = MarkovModel::full_shift(&[3.0, 3.0]).unwrap();
        assert_eq!(pressure(&m, &PotentialSpec::log_deriv(1.0), 4), Err(Error::Unverified));
    }

    #[test]
    fn bowen_roots() {
        let m = certified(MarkovModel::full_shift(&[3.0, 3.0]).unwrap());
        let (a, b) = bowen_dimension(&m, 12, 1e-8).unwrap();
        let s = LN2 / 3f64.ln();
        assert!(a <= s && s <= b && b - a <= 1e-8);
        let m = certified(MarkovModel::full_shift(&[2.0, 4.0]).unwrap());
        let (a, b) = bowen_dimension(&m, 12, 1e-8).unwrap();
        let s = ((1.0 + 5f64.sqrt()) / 2.0).ln() / LN2;
        assert!(a <= s && s <= b);
    }

    #[test]
    fn entropy_examples() {
        assert!((entropy(&MarkovModel::full_shift(&[2.0, 2.0]).unwrap()) - LN2).abs() < 1e-12);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((entropy(&MarkovModel::golden_mean(2.0).unwrap()) - phi.ln()).abs() < 1e-12);
        assert!(entropy(&MarkovModel::cycle(5, 2.0).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn parry_measures() {
        let me = max_entropy_weights(&MarkovModel::full_shift(&[2.0, 2.0]).unwrap()).unwrap();
        assert!(me.edges.iter().all(|p| (p - 0.25).abs() < 1e-12));
        assert!(me.states.iter().all(|p| (p - 0.5).abs() < 1e-12));

        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let me = max_entropy_weights(&MarkovModel::golden_mean(2.0).unwrap()).unwrap();
        // left and right Perron vectors are both (phi, 1)
        let z = phi * phi + 1.0;
        assert!((me.states[0] - phi * phi / z).abs() < 1e-12);
        assert!((me.states[1] - 1.0 / z).abs() < 1e-12);

        let me = max_entropy_weights(&MarkovModel::cycle(4, 2.0).unwrap()).unwrap();
        assert!(me.edges.iter().all(|p| (p - 0.25).abs() < 1e-12));

        let two = MarkovModel::from_edges(2, &[(0, 0), (1, 1)], 2.0).unwrap();
        assert_eq!(max_entropy_weights(&two), Err(Error::NonTransitive));
    }

    #[test]
    fn lyapunov_examples() {
        let m = MarkovModel::full_shift(&[3.0, 3.0]).unwrap();
        let (lo, hi) = lyapunov(&m, &[0.25; 4]).unwrap();
        assert!((lo - 3f64.ln()).abs() < 1e-15 && (hi - lo).abs() < 1e-15);
        let m = MarkovModel::full_shift(&[2.0, 4.0]).unwrap();
        let (lo, _) = lyapunov(&m, &[0.25; 4]).unwrap();
        assert!((lo - 1.5 * LN2).abs() < 1e-15);
        assert!(matches!(lyapunov(&m, &[0.5, 0.5, 0.0, 0.0]), Err(Error::NotStationary(_))));
    }

    #[test]
    fn report_equality_cases() {
        let r = dimension_report(&certified(MarkovModel::full_shift(&[3.0, 3.0]).unwrap()), 12, 1e-7).unwrap();
        assert!(r.equality_case && r.pressure_shape_ok);
        assert!((r.hd_max_entropy - LN2 / 3f64.ln()).abs() < 1e-12);
        let r = dimension_report(&certified(MarkovModel::full_shift(&[2.0, 4.0]).unwrap()), 12, 1e-7).unwrap();
        assert!(!r.equality_case);
        assert!((r.hd_max_entropy - 2.0 / 3.0).abs() < 1e-12);
        assert!(r.bowen_dim.0 - r.hd_max_entropy > 0.02);
    }

    #[test]
    fn tabulated_matches_edge_potential() {
        let m = certified(MarkovModel::full_shift(&[2.0, 4.0]).unwrap());
        let phi = PotentialSpec::log_deriv(0.7);
        let tab = tabulate(&m, &phi, 8).unwrap();
        let a = pressure(&m, &phi, 8).unwrap();
        let b = pressure(&m, &tab, 8).unwrap();
        assert!((a.0 - b.0).abs() < 1e-10 && (a.1 - b.1).abs() < 1e-10, "{a:?} {b:?}");
    }

    #[test]
    fn cycle_expansion_is_exact_at_state_count() {
        let m = certified(MarkovModel::golden_mean(3.0).unwrap());
        let ent = entropy(&m);
        let golden = ((1.0 + 5f64.sqrt()) / 2.0).ln();
        assert!((ent - golden).abs() < 1e-12);
        let zero = PotentialSpec::Constant { value: 0.0 };
        for order in 2..=6 {
            let (lo, hi) = cycle_pressure(&m, &zero, order).unwrap();
            assert!((lo - ent).abs() < 1e-8 && (hi - ent).abs() < 1e-8, "{order}: {lo}");
        }
        // the raw partition sum is still off at low order
        let (raw, _) = partition_pressure(&m, &zero, 2).unwrap();
        assert!((raw - ent).abs() > 1e-3);
    }
}
