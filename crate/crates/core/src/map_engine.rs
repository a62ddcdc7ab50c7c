//! Generalized polynomial-like maps with a single critical point.
//!
//! A [`MapSpec`] is a finite family of disjoint branch domains, each carrying a
//! polynomial formula, mapping into a range region. Exactly one branch is a
//! branched covering of degree `d >= 2` with critical point `critical_point`;
//! the others are univalent.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{cell_of, lex_cmp, PointSet};
use crate::poly::Poly;
use crate::region::Region;
use crate::roots::companion_roots;

/// Tolerance for "`w` is a fixed point": `|f(w) - w| <= FIXED_TOL * (1 + |w|)`.
pub const FIXED_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub domain: Region,
    pub coeffs: Poly,
    /// Covering degree of the branch onto the range, not the polynomial degree.
    pub degree: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapSpec {
    pub branches: Vec<Branch>,
    pub critical_branch: usize,
    #[serde(default = "zero")]
    pub critical_point: Complex64,
    pub range: Region,
    /// Classical escape radius override; orbits with `|z|` above it count as escaped.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub escape_radius: Option<f64>,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriticalOrbit {
    /// `critical_point, f(critical_point), ...`, truncated at escape.
    pub points: Vec<Complex64>,
    pub escaped: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegenerateFlags {
    pub chebyshev: bool,
    pub power_like: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JuliaApprox {
    /// Every point survives `depth` iterations inside the branch domains.
    pub points: Vec<Complex64>,
    /// Survivors with at least one escaping grid neighbour; equals `points`
    /// for point clouds that do not come from a grid.
    pub boundary: Vec<Complex64>,
    pub depth: usize,
    pub escape_radius: f64,
    pub spacing: f64,
}

impl MapSpec {
    /// Validated constructor.
    pub fn new(
        branches: Vec<Branch>,
        critical_branch: usize,
        critical_point: Complex64,
        range: Region,
    ) -> Result<Self> {
        let m = MapSpec { branches, critical_branch, critical_point, range, escape_radius: None };
        m.validate()?;
        Ok(m)
    }

    /// `z^2 + c` on `disc(0, max(2, |c|) + 1/2)` with the classical escape radius.
    pub fn quadratic(c: Complex64) -> Self {
        let r = 2f64.max(c.norm());
        let dom = r + 0.5;
        MapSpec {
            branches: vec![Branch {
                domain: Region::disc(zero(), dom),
                coeffs: Poly::new(vec![c, zero(), Complex64::new(1.0, 0.0)]),
                degree: 2,
            }],
            critical_branch: 0,
            critical_point: zero(),
            range: Region::disc(zero(), dom * dom + c.norm() + 1.0),
            escape_radius: Some(r),
        }
    }

    /// A single-branch polynomial map whose critical branch is
    /// `coeffs[0] + coeffs[d] z^d`, on a disc beyond its escape radius.
    pub fn unicritical(c: Complex64, lead: Complex64, degree: u32) -> Self {
        let d = degree as usize;
        let mut coeffs = vec![zero(); d + 1];
        coeffs[0] = c;
        coeffs[d] = lead;
        // |z| > r gives |f(z)| >= 2|z|
        let a = lead.norm();
        let r = 1f64
            .max((4.0 / a).powf(1.0 / (d as f64 - 1.0)))
            .max((2.0 * c.norm() / a).powf(1.0 / d as f64));
        let dom = r + 0.5;
        MapSpec {
            branches: vec![Branch {
                domain: Region::disc(zero(), dom),
                coeffs: Poly::new(coeffs),
                degree,
            }],
            critical_branch: 0,
            critical_point: zero(),
            range: Region::disc(zero(), lead.norm() * dom.powi(degree as i32) + c.norm() + 1.0),
            escape_radius: Some(r),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(Error::InvalidMap(s));
        if self.branches.is_empty() {
            return bad("no branches".into());
        }
        if self.critical_branch >= self.branches.len() {
            return bad(format!("critical_branch {} out of range", self.critical_branch));
        }
        let multi: Vec<usize> = (0..self.branches.len()).filter(|&i| self.branches[i].degree >= 2).collect();
        if multi != [self.critical_branch] {
            return bad(format!(
                "exactly one branch (the critical one) must have degree >= 2, found {multi:?}"
            ));
        }
        for (i, b) in self.branches.iter().enumerate() {
            if b.degree == 0 {
                return bad(format!("branch {i} has degree 0"));
            }
            if b.coeffs.degree() < b.degree as usize {
                return bad(format!("branch {i}: formula degree below covering degree"));
            }
            if !b.domain.closure_inside(&self.range) {
                return bad(format!("branch {i}: domain closure not inside range"));
            }
            for (j, other) in self.branches.iter().enumerate().skip(i + 1) {
                if !b.domain.disjoint(&other.domain) {
                    return bad(format!("branch domains {i} and {j} overlap"));
                }
            }
        }
        let crit = &self.branches[self.critical_branch];
        let d = crit.degree as usize;
        if crit.coeffs.degree() != d {
            return bad("critical branch formula degree must equal its covering degree".into());
        }
        if !crit.domain.contains(self.critical_point) {
            return bad("critical point outside the critical branch domain".into());
        }
        let t = crit.coeffs.taylor_at(self.critical_point);
        let scale: f64 = t.iter().map(|c| c.norm()).sum();
        if t[1..d].iter().any(|c| c.norm() > 1e-9 * scale) {
            return bad(format!("derivative does not vanish to order {} at the critical point", d - 1));
        }
        Ok(())
    }

    pub fn is_connected_domain(&self) -> bool {
        self.branches.len() == 1
    }

    pub fn critical_degree(&self) -> u32 {
        self.branches[self.critical_branch].degree
    }

    /// Index of the branch whose domain contains `z`.
    pub fn branch_at(&self, z: Complex64) -> Option<usize> {
        if let Some(r) = self.escape_radius {
            if z.norm() > r {
                return None;
            }
        }
        self.branches.iter().position(|b| b.domain.contains(z))
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let b = self.branch_at(z).ok_or(Error::DomainMiss { re: z.re, im: z.im })?;
        Ok(self.branches[b].coeffs.eval(z))
    }

    /// One-step value and derivative on a known branch (no domain check).
    pub fn eval_branch(&self, branch: usize, z: Complex64) -> (Complex64, Complex64) {
        self.branches[branch].coeffs.eval_with_derivative(z)
    }

    /// `D(f^n)(z)` by the chain rule along the orbit.
    pub fn derivative(&self, z: Complex64, n: usize) -> Result<Complex64> {
        let mut w = z;
        let mut d = Complex64::new(1.0, 0.0);
        for _ in 0..n {
            let b = self.branch_at(w).ok_or(Error::DomainMiss { re: w.re, im: w.im })?;
            let (v, dv) = self.eval_branch(b, w);
            d *= dv;
            w = v;
        }
        Ok(d)
    }

    pub fn critical_orbit(&self, n: usize) -> CriticalOrbit {
        let mut points = vec![self.critical_point];
        let mut w = self.critical_point;
        for _ in 0..n {
            match self.eval(w) {
                Ok(v) => {
                    points.push(v);
                    w = v;
                }
                Err(_) => return CriticalOrbit { points, escaped: true },
            }
        }
        CriticalOrbit { points, escaped: false }
    }

    fn is_fixed(&self, w: Complex64) -> bool {
        match self.eval(w) {
            Ok(v) => (v - w).norm() <= FIXED_TOL * (1.0 + w.norm()),
            Err(_) => false,
        }
    }

    /// Chebyshev: connected domain and second critical iterate fixed.
    /// Power-like: first critical iterate already fixed.
    pub fn classify_degenerate(&self) -> DegenerateFlags {
        let orbit = self.critical_orbit(2);
        if orbit.escaped {
            return DegenerateFlags { chebyshev: false, power_like: false };
        }
        DegenerateFlags {
            chebyshev: self.is_connected_domain() && self.is_fixed(orbit.points[2]),
            power_like: self.is_fixed(orbit.points[1]),
        }
    }

    /// Conjugate `g = phi o f o phi^{-1}` with `phi(z) = a z + b`.
    pub fn affine_conjugate(&self, a: Complex64, b: Complex64) -> Result<MapSpec> {
        if a.norm() == 0.0 {
            return Err(Error::InvalidMap("conjugating map must be invertible".into()));
        }
        let inv = Poly::linear(a.inv(), -b / a);
        let phi = Poly::linear(a, b);
        let branches = self
            .branches
            .iter()
            .map(|br| {
                let domain = br.domain.affine_image(a, b).ok_or_else(|| {
                    Error::InvalidMap("rectangle domains only conjugate by real scalings".into())
                })?;
                Ok(Branch { domain, coeffs: phi.compose(&br.coeffs.compose(&inv)), degree: br.degree })
            })
            .collect::<Result<Vec<_>>>()?;
        let range = self
            .range
            .affine_image(a, b)
            .ok_or_else(|| Error::InvalidMap("rectangle range only conjugates by real scalings".into()))?;
        Ok(MapSpec {
            branches,
            critical_branch: self.critical_branch,
            critical_point: a * self.critical_point + b,
            range,
            // escape is measured from the origin, which only linear maps fix
            escape_radius: if b == Complex64::new(0.0, 0.0) { self.escape_radius.map(|r| r * a.norm()) } else { None },
        })
    }

    /// Preimages of `w` under each branch, restricted to that branch's domain.
    pub fn preimages(&self, w: Complex64) -> Vec<(usize, Complex64)> {
        let mut out = Vec::new();
        for (i, br) in self.branches.iter().enumerate() {
            for z in self.branch_inverse(i, w) {
                if br.domain.contains(z) {
                    out.push((i, z));
                }
            }
        }
        out
    }

    /// All solutions of `f_branch(z) = w`, ignoring domains.
    pub fn branch_inverse(&self, branch: usize, w: Complex64) -> Vec<Complex64> {
        let br = &self.branches[branch];
        let p = &br.coeffs;
        if p.degree() == 1 {
            let c = p.coeffs();
            return vec![(w - c[0]) / c[1]];
        }
        if branch == self.critical_branch {
            let d = br.degree as usize;
            let t = p.taylor_at(self.critical_point);
            let base = (w - t[0]) / t[d];
            let r = base.norm().powf(1.0 / d as f64);
            let th = base.arg() / d as f64;
            let tau = std::f64::consts::TAU;
            return (0..d)
                .map(|k| self.critical_point + Complex64::from_polar(r, th + tau * k as f64 / d as f64))
                .collect();
        }
        let mut shifted = p.coeffs().to_vec();
        shifted[0] -= w;
        let q = Poly::new(shifted);
        companion_roots(&q).unwrap_or_default()
    }

    /// Whether the orbit of `z` stays in the branch domains for `depth` steps.
    pub fn survives(&self, z: Complex64, depth: usize) -> bool {
        let mut w = z;
        for _ in 0..depth {
            match self.eval(w) {
                Ok(v) => w = v,
                Err(_) => return false,
            }
        }
        self.branch_at(w).is_some()
    }

    fn domain_bbox(&self) -> (Complex64, Complex64) {
        let mut lo = Complex64::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for b in &self.branches {
            let (a, c) = b.domain.bbox();
            lo = Complex64::new(lo.re.min(a.re), lo.im.min(a.im));
            hi = Complex64::new(hi.re.max(c.re), hi.im.max(c.im));
        }
        if let Some(r) = self.escape_radius {
            lo = Complex64::new(lo.re.max(-r), lo.im.max(-r));
            hi = Complex64::new(hi.re.min(r), hi.im.min(r));
        }
        (lo, hi)
    }

    /// Grid survivors of `depth` iterations on a `resolution x resolution`
    /// grid over the domain bounding box, plus their escape-contrast boundary.
    pub fn julia_approx(&self, depth: usize, resolution: usize) -> Result<JuliaApprox> {
        let n = resolution.max(2);
        let (lo, hi) = self.domain_bbox();
        let hx = (hi.re - lo.re) / (n - 1) as f64;
        let hy = (hi.im - lo.im) / (n - 1) as f64;
        let at = |i: usize, j: usize| Complex64::new(lo.re + i as f64 * hx, lo.im + j as f64 * hy);
        let alive: Vec<Vec<bool>> = (0..n)
            .into_par_iter()
            .map(|i| (0..n).map(|j| self.survives(at(i, j), depth)).collect())
            .collect();
        let mut points = Vec::new();
        let mut boundary = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if !alive[i][j] {
                    continue;
                }
                points.push(at(i, j));
                let edge = i == 0 || j == 0 || i == n - 1 || j == n - 1;
                if edge || !alive[i - 1][j] || !alive[i + 1][j] || !alive[i][j - 1] || !alive[i][j + 1] {
                    boundary.push(at(i, j));
                }
            }
        }
        if points.is_empty() {
            return Err(Error::EmptyApprox);
        }
        Ok(JuliaApprox {
            points,
            boundary,
            depth,
            escape_radius: self.escape_radius.unwrap_or_else(|| self.range.circumradius()),
            spacing: hx.max(hy),
        })
    }

    /// Backward-orbit approximation of the Julia set: all preimages of `seed`
    /// up to `depth` generations, thinned to one point per `thin`-cell.
    pub fn julia_preimages(&self, seed: Complex64, depth: usize, thin: f64) -> Result<JuliaApprox> {
        let mut seen = std::collections::HashSet::new();
        seen.insert(cell_of(seed, thin));
        let mut all = vec![seed];
        let mut level = vec![seed];
        for _ in 0..depth {
            let mut next = Vec::new();
            for &w in &level {
                for (_, z) in self.preimages(w) {
                    if seen.insert(cell_of(z, thin)) {
                        next.push(z);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            all.extend_from_slice(&next);
            level = next;
        }
        all.sort_by(lex_cmp);
        if all.is_empty() {
            return Err(Error::EmptyApprox);
        }
        Ok(JuliaApprox {
            boundary: all.clone(),
            points: all,
            depth,
            escape_radius: self.escape_radius.unwrap_or_else(|| self.range.circumradius()),
            spacing: thin,
        })
    }
}

impl JuliaApprox {
    /// Hausdorff distance from the boundary points to the curve given by the
    /// signed distance `dist`; used by diagnostics and tests.
    pub fn max_boundary_distance<F: Fn(Complex64) -> f64>(&self, dist: F) -> f64 {
        self.boundary.iter().map(|&z| dist(z).abs()).fold(0.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points deduplicated at `tol`.
    pub fn distinct(&self, tol: f64) -> usize {
        let mut s = PointSet::new(tol);
        self.points.iter().for_each(|&z| {
            s.insert(z);
        });
        s.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn two_disc_map() -> MapSpec {
        MapSpec::new(
            vec![
                Branch {
                    domain: Region::disc(c(0.0, 0.0), 1.0),
                    coeffs: Poly::new(vec![c(-1.0, 0.0), c(0.0, 0.0), c(4.0, 0.0)]),
                    degree: 2,
                },
                Branch {
                    domain: Region::disc(c(2.5, 0.0), 1.0),
                    coeffs: Poly::linear(c(4.0, 0.0), c(-10.0, 0.0)),
                    degree: 1,
                },
            ],
            0,
            c(0.0, 0.0),
            Region::disc(c(0.0, 0.0), 5.0),
        )
        .unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(MapSpec::quadratic(c(0.0, 0.0)).eval(c(2.0, 0.0)).unwrap(), c(4.0, 0.0));
        assert_eq!(MapSpec::quadratic(c(-2.0, 0.0)).eval(c(0.0, 0.0)).unwrap(), c(-2.0, 0.0));
        let m = two_disc_map();
        assert!(matches!(m.eval(c(1.25, 0.0)), Err(Error::DomainMiss { .. })));
        assert_eq!(m.eval(c(2.5, 0.0)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn derivative_examples() {
        let sq = MapSpec::quadratic(c(0.0, 0.0));
        assert_eq!(sq.derivative(c(1.0, 0.0), 1).unwrap(), c(2.0, 0.0));
        assert_eq!(sq.derivative(c(1.0, 0.0), 3).unwrap(), c(8.0, 0.0));
        let cheb = MapSpec::quadratic(c(-2.0, 0.0));
        assert_eq!(cheb.eval(c(-1.0, 0.0)).unwrap(), c(-1.0, 0.0));
        assert_eq!(cheb.derivative(c(-1.0, 0.0), 1).unwrap(), c(-2.0, 0.0));
        assert!(sq.derivative(c(2.4, 0.0), 3).is_err());
    }

    #[test]
    fn critical_orbit_examples() {
        let o = MapSpec::quadratic(c(-2.0, 0.0)).critical_orbit(3);
        assert_eq!(o.points, vec![c(0.0, 0.0), c(-2.0, 0.0), c(2.0, 0.0), c(2.0, 0.0)]);
        assert!(!o.escaped);
        let o = MapSpec::quadratic(c(0.0, 0.0)).critical_orbit(2);
        assert_eq!(o.points, vec![c(0.0, 0.0); 3]);
        let o = MapSpec::quadratic(c(0.0, 1.0)).critical_orbit(4);
        assert_eq!(o.points, vec![c(0.0, 0.0), c(0.0, 1.0), c(-1.0, 1.0), c(0.0, -1.0), c(-1.0, 1.0)]);
        let o = MapSpec::quadratic(c(1.0, 0.0)).critical_orbit(10);
        assert!(o.escaped);
    }

    #[test]
    fn degenerate_classification() {
        let f = |m: MapSpec| m.classify_degenerate();
        assert_eq!(f(MapSpec::quadratic(c(-2.0, 0.0))), DegenerateFlags { chebyshev: true, power_like: false });
        assert_eq!(f(MapSpec::quadratic(c(0.0, 1.0))), DegenerateFlags { chebyshev: false, power_like: false });
        assert_eq!(f(MapSpec::quadratic(c(0.0, 0.0))), DegenerateFlags { chebyshev: true, power_like: true });
        // disconnected domain is never Chebyshev
        assert!(!f(two_disc_map()).chebyshev);
    }

    #[test]
    fn classification_survives_affine_conjugation() {
        let cheb = MapSpec::quadratic(c(-2.0, 0.0));
        for (a, b) in [(c(2.0, 0.0), c(0.0, 0.0)), (c(0.5, 1.5), c(0.3, -0.2)), (c(-1.0, 0.0), c(1.0, 1.0))] {
            let g = cheb.affine_conjugate(a, b).unwrap();
            g.validate().unwrap();
            assert_eq!(g.classify_degenerate(), cheb.classify_degenerate());
        }
    }

    #[test]
    fn validation_rejects_bad_maps() {
        let mut m = two_disc_map();
        m.branches[1].degree = 2;
        assert!(m.validate().is_err());
        let mut m = two_disc_map();
        m.branches[1].domain = Region::disc(c(1.5, 0.0), 1.0);
        assert!(m.validate().is_err());
        let mut m = two_disc_map();
        m.branches[0].coeffs = Poly::new(vec![c(-1.0, 0.0), c(0.5, 0.0), c(4.0, 0.0)]);
        assert!(m.validate().is_err());
        let mut m = two_disc_map();
        m.range = Region::disc(c(0.0, 0.0), 3.0);
        assert!(m.validate().is_err());
    }

    #[test]
    fn preimages_invert_each_branch() {
        let m = two_disc_map();
        let w = c(0.3, 0.2);
        let pre = m.preimages(w);
        assert_eq!(pre.len(), 3);
        for (b, z) in pre {
            assert!(m.branches[b].domain.contains(z));
            assert!((m.eval(z).unwrap() - w).norm() < 1e-14);
        }
    }

    #[test]
    fn julia_of_z_squared_is_the_circle() {
        let j = MapSpec::quadratic(c(0.0, 0.0)).julia_approx(20, 1001).unwrap();
        assert!(j.max_boundary_distance(|z| z.norm() - 1.0) < 1e-2);
        // the boundary also comes close to every point of the circle
        for k in 0..64 {
            let p = Complex64::from_polar(1.0, k as f64 * std::f64::consts::TAU / 64.0);
            let d = j.boundary.iter().map(|z| (z - p).norm()).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-2);
        }
    }

    #[test]
    fn julia_of_chebyshev_is_the_segment() {
        let m = MapSpec::quadratic(c(-2.0, 0.0));
        let j = m.julia_approx(20, 1001).unwrap();
        assert!(j.max_boundary_distance(|z| z.im) <= 1e-2);
        assert!(j.boundary.iter().all(|z| z.re.abs() <= 2.0 + 1e-2));
        // an even grid misses the real axis altogether
        assert_eq!(m.julia_approx(20, 1000).unwrap_err(), Error::EmptyApprox);
    }

    #[test]
    fn depth_zero_keeps_every_domain_point() {
        let m = two_disc_map();
        let n = 41;
        let j = m.julia_approx(0, n).unwrap();
        let (lo, hi) = m.domain_bbox();
        let mut expected = 0;
        for i in 0..n {
            for k in 0..n {
                let z = Complex64::new(
                    lo.re + i as f64 * (hi.re - lo.re) / (n - 1) as f64,
                    lo.im + k as f64 * (hi.im - lo.im) / (n - 1) as f64,
                );
                if m.branch_at(z).is_some() {
                    expected += 1;
                }
            }
        }
        assert_eq!(j.len(), expected);
    }

    #[test]
    fn survivors_are_forward_invariant() {
        let m = MapSpec::quadratic(c(0.0, 1.0));
        let j = m.julia_approx(12, 301).unwrap();
        for &z in &j.points {
            assert!(m.survives(m.eval(z).unwrap(), 11));
        }
    }

    #[test]
    fn preimage_cloud_lies_near_circle() {
        let m = MapSpec::quadratic(c(0.0, 0.0));
        let j = m.julia_preimages(c(1.0, 0.0), 12, 0.01).unwrap();
        assert!(j.len() > 200);
        assert!(j.points.iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
    }
}
