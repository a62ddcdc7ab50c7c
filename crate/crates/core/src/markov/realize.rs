//! Realization of closed symbolic walks as periodic orbits of the source map.

use num_complex::Complex64;

use super::MarkovModel;
use crate::error::{Error, Result};
use crate::map_engine::MapSpec;

#[derive(Clone, Debug, PartialEq)]
pub struct RealizedCycle {
    /// `points[k]` lies in (an inflation of) the cell of `states[k]`.
    pub points: Vec<Complex64>,
    pub multiplier_abs: f64,
}

fn anchor_point(model: &MarkovModel, s: usize) -> Result<Complex64> {
    let st = &model.states[s];
    st.point
        .or_else(|| st.region.as_ref().map(|r| r.center()))
        .ok_or_else(|| Error::InvalidModel(format!("state {s} has no location")))
}

fn cell_slack(model: &MarkovModel, s: usize) -> f64 {
    model.states[s].region.as_ref().map(|r| r.circumradius()).unwrap_or(0.0)
}

/// Pulls the cycle back along the walk, always choosing the preimage nearest
/// to the next cell's representative point, until the orbit closes.
pub(crate) fn realize_cycle(map: &MapSpec, model: &MarkovModel, states: &[usize]) -> Result<RealizedCycle> {
    let n = states.len();
    if n == 0 {
        return Err(Error::Empty("walk"));
    }
    let targets: Vec<Complex64> = states.iter().map(|&s| anchor_point(model, s)).collect::<Result<_>>()?;
    let nearest = |w: Complex64, target: Complex64| -> Option<Complex64> {
        map.preimages(w)
            .into_iter()
            .map(|(_, z)| z)
            .min_by(|a, b| (a - target).norm().total_cmp(&(b - target).norm()))
    };
    let fail = || Error::InvalidModel("walk does not realize as an orbit".into());
    let mut z = targets[0];
    let mut converged = false;
    for _ in 0..400 {
        let mut w = z;
        for k in (0..n).rev() {
            w = nearest(w, targets[k]).ok_or_else(fail)?;
        }
        let step = (w - z).norm();
        z = w;
        if step <= 1e-13 * (1.0 + z.norm()) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(fail());
    }
    let mut points = Vec::with_capacity(n);
    let mut multiplier = 1.0;
    let mut w = z;
    for _ in 0..n {
        points.push(w);
        let b = map.branch_at(w).ok_or_else(fail)?;
        let (v, d) = map.eval_branch(b, w);
        multiplier *= d.norm();
        w = v;
    }
    if (w - z).norm() > 1e-9 * (1.0 + z.norm()) {
        return Err(fail());
    }
    for (k, &p) in points.iter().enumerate() {
        let s = states[k];
        let inside = model.states[s]
            .region
            .as_ref()
            .map(|r| r.distance_to(p) <= cell_slack(model, s))
            .unwrap_or(true);
        if !inside {
            return Err(fail());
        }
    }
    Ok(RealizedCycle { points, multiplier_abs: multiplier })
}
