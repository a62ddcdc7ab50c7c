//! Anchor cycles joined by bridges: increasing transitive hyperbolic subsystems.
//!
//! Given anchor orbits `O(p_1), ..., O(p_n)`, a bridge into `p_i` from
//! `O(p_j)` is a backward orbit `y, f(y), ..., f^s(y) = p_i` with `y` close to
//! a point of `O(p_j)`. The resulting model has one state per anchor point
//! and per intermediate bridge point.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{MarkovModel, State, Transition};
use crate::error::{Error, Result};
use crate::grid::cell_of;
use crate::map_engine::MapSpec;
use crate::orbits::PeriodicOrbit;
use crate::region::Region;

#[derive(Clone, Debug)]
pub struct BnConfig {
    /// Radius of the discs around anchor and bridge points.
    pub neighborhood_radius: f64,
    /// Bridge points closer than this to the critical orbit are discarded.
    pub guard: f64,
    pub max_depth: usize,
    /// Backward levels larger than this are thinned and truncated.
    pub max_level: usize,
    pub post_critical_horizon: usize,
    /// Fixed bridge lengths per `(to, from)` pair, overriding first-hit search.
    pub forced_depths: HashMap<(usize, usize), usize>,
}

impl BnConfig {
    pub fn new(neighborhood_radius: f64) -> Self {
        BnConfig {
            neighborhood_radius,
            guard: neighborhood_radius,
            max_depth: 40,
            max_level: 1 << 16,
            post_critical_horizon: 64,
            forced_depths: HashMap::new(),
        }
    }

    pub fn build(&self, map: &MapSpec, anchors: &[PeriodicOrbit]) -> Result<(BridgePlan, MarkovModel)> {
        build_bn_with(map, anchors, self)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bridge {
    pub to: usize,
    pub from: usize,
    /// Index in `O(p_from)` of the point the bridge starts next to.
    pub entry: usize,
    /// `y, f(y), ..., p_to`.
    pub points: Vec<Complex64>,
}

impl Bridge {
    pub fn depth(&self) -> usize {
        self.points.len() - 1
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BridgePlan {
    pub anchors: Vec<PeriodicOrbit>,
    pub bridges: Vec<Bridge>,
    pub neighborhood_radius: f64,
}

impl BridgePlan {
    pub fn depths(&self) -> HashMap<(usize, usize), usize> {
        self.bridges.iter().map(|b| ((b.to, b.from), b.depth())).collect()
    }
}

pub fn build_bn(
    map: &MapSpec,
    anchors: &[PeriodicOrbit],
    neighborhood_radius: f64,
) -> Result<(BridgePlan, MarkovModel)> {
    build_bn_with(map, anchors, &BnConfig::new(neighborhood_radius))
}

fn check_anchors(anchors: &[PeriodicOrbit]) -> Result<()> {
    if anchors.is_empty() {
        return Err(Error::Empty("anchor list"));
    }
    for (i, a) in anchors.iter().enumerate() {
        if a.post_critical {
            return Err(Error::PostCriticalAnchor(i));
        }
        for (j, b) in anchors.iter().enumerate().take(i) {
            if a.same_cycle(b, 1e-9) {
                return Err(Error::DuplicateAnchor(j, i));
            }
        }
    }
    Ok(())
}

struct Node {
    z: Complex64,
    parent: usize,
}

fn find_bridge(
    map: &MapSpec,
    anchors: &[PeriodicOrbit],
    to: usize,
    from: usize,
    guard_points: &[Complex64],
    cfg: &BnConfig,
) -> Result<Bridge> {
    let r = cfg.neighborhood_radius;
    let target = &anchors[to];
    let source = &anchors[from].points;
    let forced = cfg.forced_depths.get(&(to, from)).copied();
    let max_depth = forced.unwrap_or(cfg.max_depth);
    let mut arena = vec![Node { z: target.first(), parent: usize::MAX }];
    let mut level: Vec<usize> = vec![0];
    for depth in 1..=max_depth {
        let mut next = Vec::new();
        for &id in &level {
            for (_, z) in map.preimages(arena[id].z) {
                if guard_points.iter().any(|g| (z - g).norm() <= cfg.guard) {
                    continue;
                }
                if target.points.iter().any(|p| (z - p).norm() <= 1e-9) {
                    continue;
                }
                arena.push(Node { z, parent: id });
                next.push(arena.len() - 1);
            }
        }
        if next.len() > cfg.max_level {
            let mut seen = std::collections::HashSet::new();
            next.retain(|&id| seen.insert(cell_of(arena[id].z, r / 4.0)));
            next.truncate(cfg.max_level);
        }
        if next.is_empty() {
            break;
        }
        if forced.is_none() || forced == Some(depth) {
            let mut best: Option<(f64, usize, usize)> = None;
            for &id in &next {
                for (m, q) in source.iter().enumerate() {
                    let d = (arena[id].z - q).norm();
                    if d <= r && best.is_none_or(|(bd, _, _)| d < bd) {
                        best = Some((d, id, m));
                    }
                }
            }
            if let Some((_, id, entry)) = best {
                let mut points = Vec::with_capacity(depth + 1);
                let mut cur = id;
                while cur != usize::MAX {
                    points.push(arena[cur].z);
                    cur = arena[cur].parent;
                }
                return Ok(Bridge { to, from, entry, points });
            }
        }
        level = next;
    }
    Err(Error::BridgeNotFound { from, to, depth: max_depth })
}

fn build_bn_with(
    map: &MapSpec,
    anchors: &[PeriodicOrbit],
    cfg: &BnConfig,
) -> Result<(BridgePlan, MarkovModel)> {
    check_anchors(anchors)?;
    if !(cfg.neighborhood_radius > 0.0) {
        return Err(Error::InvalidModel("neighborhood radius must be positive".into()));
    }
    let guard_points = map.critical_orbit(cfg.post_critical_horizon).points;
    let mut bridges = Vec::new();
    for to in 0..anchors.len() {
        for from in 0..anchors.len() {
            if to != from {
                bridges.push(find_bridge(map, anchors, to, from, &guard_points, cfg)?);
            }
        }
    }

    let r = cfg.neighborhood_radius;
    let mut states = Vec::new();
    let mut first_state = Vec::new();
    let push = |label: String, z: Complex64, states: &mut Vec<State>| {
        let id = states.len();
        states.push(State { id, label, region: Some(Region::disc(z, r)), point: Some(z) });
        id
    };
    for (i, a) in anchors.iter().enumerate() {
        first_state.push(states.len());
        for (k, &z) in a.points.iter().enumerate() {
            push(format!("a{i}.{k}"), z, &mut states);
        }
    }
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (i, a) in anchors.iter().enumerate() {
        let n = a.period;
        for k in 0..n {
            edges.push((first_state[i] + k, first_state[i] + (k + 1) % n));
        }
    }
    for b in &bridges {
        let mut prev = first_state[b.from] + b.entry;
        for (t, &z) in b.points.iter().enumerate().take(b.depth()).skip(1) {
            let id = push(format!("b{}.{}.{t}", b.to, b.from), z, &mut states);
            edges.push((prev, id));
            prev = id;
        }
        edges.push((prev, first_state[b.to]));
    }
    edges.sort_unstable();
    edges.dedup();

    let mut bounds = Vec::with_capacity(states.len());
    for s in &states {
        let z = s.point.unwrap();
        let branch = map
            .branch_at(z)
            .ok_or_else(|| Error::InvalidModel(format!("state {} lies outside the domain", s.label)))?;
        let (lo, hi) = map.branches[branch].coeffs.derivative().abs_bounds_on_disc(z, r);
        if !(lo > 0.0) {
            return Err(Error::InvalidModel(format!("disc around {} reaches a critical point", s.label)));
        }
        bounds.push((branch, lo, hi));
    }
    let transitions = edges
        .into_iter()
        .map(|(from, to)| {
            let (branch, dmin, dmax) = bounds[from];
            Transition { from, to, branch, dmin, dmax }
        })
        .collect();
    let model = MarkovModel { states, transitions, expansion: None, source: Some(map.clone()) };
    model.validate()?;
    let plan = BridgePlan { anchors: anchors.to_vec(), bridges, neighborhood_radius: r };
    Ok((plan, model))
}
