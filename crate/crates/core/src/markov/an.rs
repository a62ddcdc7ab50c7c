//! Grid models of the set of Julia points whose orbits avoid a critical disc.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use rayon::prelude::*;

use super::{MarkovModel, State, Transition};
use crate::error::{Error, Result};
use crate::grid::cell_of;
use crate::map_engine::MapSpec;
use crate::orbits::find_periodic;
use crate::region::Region;

#[derive(Clone, Debug)]
pub struct AnConfig {
    pub critical_radius: f64,
    pub cell_size: f64,
    /// Backward generations used to sample the Julia set.
    pub depth: usize,
    /// Sampling spacing as a fraction of the cell size.
    pub thin_fraction: f64,
}

impl AnConfig {
    pub fn new(critical_radius: f64, cell_size: f64, depth: usize) -> Self {
        AnConfig { critical_radius, cell_size, depth, thin_fraction: 0.125 }
    }

    pub fn build(&self, map: &MapSpec) -> Result<MarkovModel> {
        build_an_with(map, self)
    }
}

struct Cell {
    key: (i64, i64),
    region: Region,
    branch: usize,
    dmin: f64,
    dmax: f64,
    image: (Complex64, f64),
}

/// Most repelling fixed point; a Julia set point to seed backward sampling.
fn julia_seed(map: &MapSpec) -> Result<Complex64> {
    find_periodic(map, 1, 1e-9)?
        .into_iter()
        .filter(|o| o.multiplier_abs > 1.0)
        .max_by(|a, b| a.multiplier_abs.total_cmp(&b.multiplier_abs))
        .map(|o| o.first())
        .ok_or(Error::EmptyApprox)
}

pub fn build_an(map: &MapSpec, critical_radius: f64, cell_size: f64, depth: usize) -> Result<MarkovModel> {
    build_an_with(map, &AnConfig::new(critical_radius, cell_size, depth))
}

fn build_an_with(map: &MapSpec, cfg: &AnConfig) -> Result<MarkovModel> {
    if !(cfg.critical_radius > 0.0) || !(cfg.cell_size > 0.0) {
        return Err(Error::InvalidModel("critical radius and cell size must be positive".into()));
    }
    let h = cfg.cell_size;
    let thin = h * cfg.thin_fraction;
    let cloud = map.julia_preimages(julia_seed(map)?, cfg.depth, thin)?;

    let mut by_cell: BTreeMap<(i64, i64), (Complex64, Complex64)> = BTreeMap::new();
    for &z in &cloud.points {
        let e = by_cell.entry(cell_of(z, h)).or_insert((z, z));
        e.0 = Complex64::new(e.0.re.min(z.re), e.0.im.min(z.im));
        e.1 = Complex64::new(e.1.re.max(z.re), e.1.im.max(z.im));
    }
    let keyed: Vec<((i64, i64), (Complex64, Complex64))> = by_cell.into_iter().collect();
    let cp = map.critical_point;
    let cells: Vec<Cell> = keyed
        .par_iter()
        .filter_map(|&(key, (lo, hi))| {
            // sample bounding box, inflated by the sampling gap and clipped to the grid square
            let sq_lo = Complex64::new(key.0 as f64 * h, key.1 as f64 * h);
            let sq_hi = sq_lo + Complex64::new(h, h);
            let pad = Complex64::new(thin, thin);
            let a = lo - pad;
            let b = hi + pad;
            let region = Region::rect(
                Complex64::new(a.re.max(sq_lo.re), a.im.max(sq_lo.im)),
                Complex64::new(b.re.min(sq_hi.re), b.im.min(sq_hi.im)),
            );
            if region.meets_disc(cp, cfg.critical_radius) {
                return None;
            }
            let center = region.center();
            let rho = region.circumradius();
            let branch = map.branch_at(center).or_else(|| map.branch_at(lo))?;
            let p = &map.branches[branch].coeffs;
            let (dmin, dmax) = p.derivative().abs_bounds_on_disc(center, rho);
            if !(dmin > 0.0) {
                return None;
            }
            let image = (p.eval(center), p.image_radius_on_disc(center, rho));
            Some(Cell { key, region, branch, dmin, dmax, image })
        })
        .collect();

    let index: HashMap<(i64, i64), usize> = cells.iter().enumerate().map(|(i, c)| (c.key, i)).collect();
    let targets: Vec<Vec<usize>> = cells
        .par_iter()
        .map(|c| {
            let (w, s) = c.image;
            let (i0, j0) = cell_of(w - Complex64::new(s, s), h);
            let (i1, j1) = cell_of(w + Complex64::new(s, s), h);
            let mut out = Vec::new();
            for i in i0..=i1 {
                for j in j0..=j1 {
                    if let Some(&t) = index.get(&(i, j)) {
                        if cells[t].region.meets_disc(w, s) {
                            out.push(t);
                        }
                    }
                }
            }
            out.sort_unstable();
            out
        })
        .collect();

    let states = cells
        .iter()
        .enumerate()
        .map(|(i, c)| State {
            id: i,
            label: format!("c{},{}", c.key.0, c.key.1),
            region: Some(c.region.clone()),
            point: Some(c.region.center()),
        })
        .collect();
    let mut transitions = Vec::new();
    for (i, ts) in targets.iter().enumerate() {
        for &j in ts {
            let c = &cells[i];
            transitions.push(Transition { from: i, to: j, branch: c.branch, dmin: c.dmin, dmax: c.dmax });
        }
    }
    let raw = MarkovModel { states, transitions, expansion: None, source: Some(map.clone()) };
    let model = raw.prune();
    if model.is_empty() {
        return Err(Error::EmptyModel);
    }
    Ok(model)
}
