//! Subshifts of finite type carrying geometric branch data.
//!
//! A [`MarkovModel`] is a directed graph on cells with, for every
//! transition, the map branch realizing it and two-sided bounds on `|Df|`
//! over the source cell. Models come from the avoiding-set construction
//! ([`build_an`]), from anchor orbits joined by bridges ([`build_bn`]), or are
//! written down abstractly (full shifts, cycles) for analytic checks.

mod an;
mod bn;
mod hyperbolic;
mod realize;

use std::collections::{HashMap, HashSet};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map_engine::MapSpec;
use crate::region::Region;

pub use an::{build_an, AnConfig};
pub use bn::{build_bn, Bridge, BridgePlan, BnConfig};
pub use hyperbolic::verify_hyperbolic;
pub use realize::RealizedCycle;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub id: usize,
    #[serde(default)]
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<Region>,
    /// Representative point of the cell (orbit point or cell center).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Complex64>,
}

/// Serialized as `[from, to, branch, dmin, dmax]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "(usize, usize, usize, f64, f64)", into = "(usize, usize, usize, f64, f64)")]
pub struct Transition {
    pub from: usize,
    pub to: usize,
    pub branch: usize,
    pub dmin: f64,
    pub dmax: f64,
}

impl From<(usize, usize, usize, f64, f64)> for Transition {
    fn from((from, to, branch, dmin, dmax): (usize, usize, usize, f64, f64)) -> Self {
        Transition { from, to, branch, dmin, dmax }
    }
}

impl From<Transition> for (usize, usize, usize, f64, f64) {
    fn from(t: Transition) -> Self {
        (t.from, t.to, t.branch, t.dmin, t.dmax)
    }
}

impl Transition {
    pub fn log_min(&self) -> f64 {
        self.dmin.ln()
    }

    pub fn log_max(&self) -> f64 {
        self.dmax.ln()
    }

    /// Log of the geometric midpoint of the derivative interval.
    pub fn log_mid(&self) -> f64 {
        0.5 * (self.dmin.ln() + self.dmax.ln())
    }
}

/// `prod dmin >= c * kappa^n` along every admissible path of length `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Expansion {
    pub c: f64,
    pub kappa: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkovModel {
    pub states: Vec<State>,
    pub transitions: Vec<Transition>,
    #[serde(default)]
    pub expansion: Option<Expansion>,
    /// The map the cells live in; enables realization of cycles as true orbits.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<MapSpec>,
}

/// A closed walk up to rotation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicWord {
    /// States visited, in the lexicographically least rotation.
    pub states: Vec<usize>,
    /// Transition indices; `edges[k]` goes from `states[k]` to `states[k+1]`.
    pub edges: Vec<usize>,
    /// Number of distinct rotations, i.e. closed walks represented by this word.
    pub rotations: usize,
    pub log_min: f64,
    pub log_max: f64,
}

impl PeriodicWord {
    pub fn period(&self) -> usize {
        self.states.len()
    }

    pub fn log_mid(&self) -> f64 {
        0.5 * (self.log_min + self.log_max)
    }

    pub fn label(&self, model: &MarkovModel) -> String {
        self.states.iter().map(|&s| model.states[s].label.as_str()).collect::<Vec<_>>().join(" ")
    }
}

impl MarkovModel {
    /// Validated model without expansion certificate.
    pub fn new(states: Vec<State>, transitions: Vec<Transition>) -> Result<Self> {
        let m = MarkovModel { states, transitions, expansion: None, source: None };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(Error::InvalidModel(s));
        for (i, s) in self.states.iter().enumerate() {
            if s.id != i {
                return bad(format!("state {i} carries id {}", s.id));
            }
        }
        let n = self.states.len();
        let mut seen = HashSet::new();
        for (k, t) in self.transitions.iter().enumerate() {
            if t.from >= n || t.to >= n {
                return bad(format!("transition {k} references a missing state"));
            }
            if !seen.insert((t.from, t.to)) {
                return bad(format!("duplicate transition {} -> {}", t.from, t.to));
            }
            if !(t.dmin > 0.0) || !(t.dmin <= t.dmax) || !t.dmax.is_finite() {
                return bad(format!("transition {k} has derivative bounds [{}, {}]", t.dmin, t.dmax));
            }
        }
        if let Some(src) = &self.source {
            if self.transitions.iter().any(|t| t.branch >= src.branches.len()) {
                return bad("branch index out of range for the source map".into());
            }
        }
        Ok(())
    }

    fn abstract_states(n: usize) -> Vec<State> {
        (0..n).map(|i| State { id: i, label: format!("s{i}"), region: None, point: None }).collect()
    }

    /// Full shift on `derivs.len()` symbols; every edge out of state `i` has
    /// `|Df| = derivs[i]` and uses branch `i`.
    pub fn full_shift(derivs: &[f64]) -> Result<Self> {
        let k = derivs.len();
        let mut ts = Vec::with_capacity(k * k);
        for (i, &d) in derivs.iter().enumerate() {
            for j in 0..k {
                ts.push(Transition { from: i, to: j, branch: i, dmin: d, dmax: d });
            }
        }
        MarkovModel::new(Self::abstract_states(k), ts)
    }

    /// Full shift with derivative intervals `[lo, hi]` per state.
    pub fn full_shift_intervals(bounds: &[(f64, f64)]) -> Result<Self> {
        let k = bounds.len();
        let mut ts = Vec::with_capacity(k * k);
        for (i, &(lo, hi)) in bounds.iter().enumerate() {
            for j in 0..k {
                ts.push(Transition { from: i, to: j, branch: i, dmin: lo, dmax: hi });
            }
        }
        MarkovModel::new(Self::abstract_states(k), ts)
    }

    /// Golden-mean shift (word `11` forbidden) with constant derivative.
    pub fn golden_mean(deriv: f64) -> Result<Self> {
        let ts = [(0, 0), (0, 1), (1, 0)]
            .into_iter()
            .map(|(from, to)| Transition { from, to, branch: 0, dmin: deriv, dmax: deriv })
            .collect();
        MarkovModel::new(Self::abstract_states(2), ts)
    }

    /// A single cycle of length `n`.
    pub fn cycle(n: usize, deriv: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyModel);
        }
        let ts = (0..n)
            .map(|i| Transition { from: i, to: (i + 1) % n, branch: 0, dmin: deriv, dmax: deriv })
            .collect();
        MarkovModel::new(Self::abstract_states(n), ts)
    }

    /// Model on `n` abstract states with the given 0/1 adjacency pattern.
    pub fn from_edges(n: usize, edges: &[(usize, usize)], deriv: f64) -> Result<Self> {
        let ts = edges
            .iter()
            .map(|&(from, to)| Transition { from, to, branch: 0, dmin: deriv, dmax: deriv })
            .collect();
        MarkovModel::new(Self::abstract_states(n), ts)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Outgoing transition indices per state, in transition order.
    pub fn out_edges(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.len()];
        for (k, t) in self.transitions.iter().enumerate() {
            out[t.from].push(k);
        }
        out
    }

    pub fn edge_index(&self) -> HashMap<(usize, usize), usize> {
        self.transitions.iter().enumerate().map(|(k, t)| ((t.from, t.to), k)).collect()
    }

    /// Dense 0/1 transition matrix.
    pub fn matrix(&self) -> Vec<Vec<u8>> {
        let mut m = vec![vec![0u8; self.len()]; self.len()];
        for t in &self.transitions {
            m[t.from][t.to] = 1;
        }
        m
    }

    pub fn expansion(&self) -> Result<Expansion> {
        self.expansion.ok_or(Error::Unverified)
    }

    /// Largest `log(dmax/dmin)` over transitions.
    pub fn max_log_width(&self) -> f64 {
        self.transitions.iter().map(|t| t.log_max() - t.log_min()).fold(0.0, f64::max)
    }

    /// Whether every derivative interval is a single value.
    pub fn is_piecewise_linear(&self) -> bool {
        self.transitions.iter().all(|t| t.dmin == t.dmax)
    }

    /// Computes and stores the expansion certificate.
    pub fn certify(&mut self, max_cycle_len: usize) -> Result<Expansion> {
        let e = verify_hyperbolic(self, max_cycle_len)?;
        self.expansion = Some(e);
        Ok(e)
    }

    /// Repeatedly drops states without incoming or outgoing transitions.
    /// Surviving states keep their order and are renumbered.
    pub fn prune(&self) -> MarkovModel {
        let n = self.len();
        let mut alive = vec![true; n];
        loop {
            let mut ins = vec![0usize; n];
            let mut outs = vec![0usize; n];
            for t in &self.transitions {
                if alive[t.from] && alive[t.to] {
                    outs[t.from] += 1;
                    ins[t.to] += 1;
                }
            }
            let mut changed = false;
            for i in 0..n {
                if alive[i] && (ins[i] == 0 || outs[i] == 0) {
                    alive[i] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        self.restrict(&alive)
    }

    /// Sub-model on the states flagged in `keep`.
    pub fn restrict(&self, keep: &[bool]) -> MarkovModel {
        let mut new_id = vec![usize::MAX; self.len()];
        let mut states = Vec::new();
        for (i, s) in self.states.iter().enumerate() {
            if keep[i] {
                new_id[i] = states.len();
                states.push(State { id: states.len(), ..s.clone() });
            }
        }
        let transitions = self
            .transitions
            .iter()
            .filter(|t| keep[t.from] && keep[t.to])
            .map(|t| Transition { from: new_id[t.from], to: new_id[t.to], ..*t })
            .collect();
        MarkovModel { states, transitions, expansion: None, source: self.source.clone() }
    }

    /// Strongly connected components (Tarjan), each sorted, in order of
    /// their smallest state.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let out = self.out_edges();
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut comps = Vec::new();
        let mut counter = 0;
        for root in 0..n {
            if index[root] != usize::MAX {
                continue;
            }
            // iterative Tarjan: (node, next edge position)
            let mut call = vec![(root, 0usize)];
            index[root] = counter;
            low[root] = counter;
            counter += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some(&mut (v, ref mut pos)) = call.last_mut() {
                if *pos < out[v].len() {
                    let w = self.transitions[out[v][*pos]].to;
                    *pos += 1;
                    if index[w] == usize::MAX {
                        index[w] = counter;
                        low[w] = counter;
                        counter += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(u, _)) = call.last() {
                        low[u] = low[u].min(low[v]);
                    }
                    if low[v] == index[v] {
                        let mut comp = Vec::new();
                        loop {
                            let w = stack.pop().unwrap();
                            on_stack[w] = false;
                            comp.push(w);
                            if w == v {
                                break;
                            }
                        }
                        comp.sort_unstable();
                        comps.push(comp);
                    }
                }
            }
        }
        comps.sort_by_key(|c| c[0]);
        comps
    }

    /// Strong connectivity of the transition digraph.
    pub fn is_transitive(&self) -> bool {
        if self.is_empty() {
            return false;
        }
        let reach = |rev: bool| {
            let mut adj = vec![Vec::new(); self.len()];
            for t in &self.transitions {
                if rev {
                    adj[t.to].push(t.from);
                } else {
                    adj[t.from].push(t.to);
                }
            }
            let mut seen = vec![false; self.len()];
            let mut todo = vec![0];
            seen[0] = true;
            while let Some(v) = todo.pop() {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        todo.push(w);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        !self.transitions.is_empty() && reach(false) && reach(true)
    }

    /// Closed walks of length `n` up to rotation, ordered by state sequence.
    pub fn periodic_words(&self, n: usize) -> Vec<PeriodicWord> {
        if n == 0 {
            return Vec::new();
        }
        let out = self.out_edges();
        let starts: Vec<usize> = (0..self.len()).collect();
        let per_start: Vec<Vec<PeriodicWord>> =
            starts.par_iter().map(|&s| self.words_from(s, n, &out)).collect();
        per_start.into_iter().flatten().collect()
    }

    /// Words of every period in `1..=max_period`.
    pub fn periodic_words_upto(&self, max_period: usize) -> Vec<PeriodicWord> {
        (1..=max_period).flat_map(|n| self.periodic_words(n)).collect()
    }

    /// Closed walks from `s` through states `>= s` whose state sequence is
    /// its least rotation.
    fn words_from(&self, s: usize, n: usize, out: &[Vec<usize>]) -> Vec<PeriodicWord> {
        let mut found = Vec::new();
        let mut states = vec![s];
        let mut edges = Vec::with_capacity(n);
        // explicit DFS stack of edge positions
        let mut pos = vec![0usize];
        while let Some(p) = pos.last_mut() {
            let v = *states.last().unwrap();
            let depth = edges.len();
            if *p >= out[v].len() {
                pos.pop();
                states.pop();
                edges.pop();
                continue;
            }
            let e = out[v][*p];
            *p += 1;
            let w = self.transitions[e].to;
            if depth + 1 == n {
                if w == s {
                    edges.push(e);
                    if let Some(rot) = least_rotation_count(&states) {
                        let log_min = edges.iter().map(|&k| self.transitions[k].log_min()).sum();
                        let log_max = edges.iter().map(|&k| self.transitions[k].log_max()).sum();
                        found.push(PeriodicWord {
                            states: states.clone(),
                            edges: edges.clone(),
                            rotations: rot,
                            log_min,
                            log_max,
                        });
                    }
                    edges.pop();
                }
                continue;
            }
            if w < s {
                continue;
            }
            states.push(w);
            edges.push(e);
            pos.push(0);
        }
        found
    }

    /// Max distance from `points` to the union of state regions.
    pub fn density_gap(&self, points: &[Complex64]) -> f64 {
        let regions: Vec<&Region> = self.states.iter().filter_map(|s| s.region.as_ref()).collect();
        if regions.is_empty() {
            return f64::INFINITY;
        }
        points
            .par_iter()
            .map(|&z| regions.iter().map(|r| r.distance_to(z)).fold(f64::INFINITY, f64::min))
            .reduce(|| 0.0, f64::max)
    }

    /// Models are compared by their labelled edge sets.
    pub fn labelled_edges(&self) -> HashSet<(String, String)> {
        self.transitions
            .iter()
            .map(|t| (self.states[t.from].label.clone(), self.states[t.to].label.clone()))
            .collect()
    }

    /// Values of `log|Df^n|` per word: realized multipliers when the model has
    /// a source map and the word realizes, midpoint sums otherwise. Words that
    /// fail to realize are reported as `None`.
    pub fn word_log_multipliers(&self, words: &[PeriodicWord]) -> Vec<Option<f64>> {
        match &self.source {
            Some(map) => words
                .par_iter()
                .map(|w| realize::realize_cycle(map, self, &w.states).ok().map(|c| c.multiplier_abs.ln()))
                .collect(),
            None => words.iter().map(|w| Some(w.log_mid())).collect(),
        }
    }

    /// Realizes a closed state walk as a periodic orbit of the source map.
    pub fn realize_cycle(&self, states: &[usize]) -> Result<RealizedCycle> {
        let map = self.source.as_ref().ok_or_else(|| Error::InvalidModel("model has no source map".into()))?;
        realize::realize_cycle(map, self, states)
    }
}

/// Primitive period of `seq` if it is its own least rotation, else `None`.
fn least_rotation_count(seq: &[usize]) -> Option<usize> {
    let n = seq.len();
    let mut primitive = n;
    for r in 1..n {
        match (0..n).map(|k| seq[(k + r) % n]).cmp(seq.iter().copied()) {
            std::cmp::Ordering::Less => return None,
            std::cmp::Ordering::Equal => primitive = primitive.min(r),
            std::cmp::Ordering::Greater => {}
        }
    }
    Some(primitive)
}
