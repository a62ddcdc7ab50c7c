//! Polynomial root finding: companion-matrix eigenvalues for explicit
//! coefficients, Aberth–Ehrlich simultaneous iteration when only a Newton
//! step `p/p'` is available, and Newton polishing.

use nalgebra::{linalg::Schur, DMatrix};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::grid::PointSet;
use crate::poly::Poly;

/// All roots of `p` as eigenvalues of its companion matrix, or `None` if the
/// Schur iteration does not converge.
pub fn companion_roots(p: &Poly) -> Option<Vec<Complex64>> {
    let n = p.degree();
    if n == 0 {
        return Some(Vec::new());
    }
    let lead = p.leading();
    let c = p.coeffs();
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        m[(i, n - 1)] = -c[i] / lead;
    }
    let schur = Schur::try_new(m, 1e-15, 10_000 * n)?;
    let (_, t) = schur.unpack();
    Some((0..n).map(|i| t[(i, i)]).collect())
}

/// Aberth–Ehrlich iteration for a polynomial of known `degree`.
///
/// `step(z)` must return the Newton correction `p(z)/p'(z)`. Initial guesses sit
/// on a circle of `radius` rotated by `phase`.
pub fn aberth<F>(degree: usize, step: F, radius: f64, phase: f64, max_iter: usize) -> Vec<Complex64>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    let tau = std::f64::consts::TAU;
    let mut z: Vec<Complex64> = (0..degree)
        .map(|k| Complex64::from_polar(radius, tau * k as f64 / degree as f64 + phase))
        .collect();
    let mut done = vec![false; degree];
    for _ in 0..max_iter {
        let snapshot = z.clone();
        let updates: Vec<Option<Complex64>> = (0..degree)
            .into_par_iter()
            .map(|i| {
                if done[i] {
                    return None;
                }
                let zi = snapshot[i];
                let ratio = step(zi);
                if !ratio.re.is_finite() || !ratio.im.is_finite() {
                    return Some(Complex64::new(0.0, 0.0));
                }
                let mut sum = Complex64::new(0.0, 0.0);
                for (j, &zj) in snapshot.iter().enumerate() {
                    if j != i {
                        sum += (zi - zj).inv();
                    }
                }
                let denom = Complex64::new(1.0, 0.0) - ratio * sum;
                let w = if denom.norm() > 0.0 { ratio / denom } else { ratio };
                Some(w)
            })
            .collect();
        let mut all_done = true;
        for (i, u) in updates.into_iter().enumerate() {
            if let Some(w) = u {
                z[i] -= w;
                if w.norm() <= 1e-14 * (1.0 + z[i].norm()) {
                    done[i] = true;
                } else {
                    all_done = false;
                }
            }
        }
        if all_done {
            break;
        }
    }
    z
}

/// Newton iteration from `z` until the step falls below `tol` (relative).
pub fn newton_polish<F>(mut z: Complex64, step: F, tol: f64, max_iter: usize) -> Complex64
where
    F: Fn(Complex64) -> Complex64,
{
    for _ in 0..max_iter {
        let w = step(z);
        if !w.re.is_finite() || !w.im.is_finite() {
            break;
        }
        z -= w;
        if w.norm() <= tol * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

/// Number of clusters of `roots` at separation `tol`.
pub fn count_distinct(roots: &[Complex64], tol: f64) -> usize {
    let mut set = PointSet::new(tol);
    for &r in roots {
        set.insert(r);
    }
    set.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn companion_finds_cube_roots_of_unity() {
        let p = Poly::from_real(&[-1.0, 0.0, 0.0, 1.0]);
        let mut roots = companion_roots(&p).unwrap();
        roots.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
        let tau = std::f64::consts::TAU;
        let expected = [
            Complex64::from_polar(1.0, -tau / 3.0),
            c(1.0, 0.0),
            Complex64::from_polar(1.0, tau / 3.0),
        ];
        for (r, e) in roots.iter().zip(expected) {
            assert!((r - e).norm() < 1e-12, "{r} vs {e}");
        }
    }

    #[test]
    fn aberth_matches_companion() {
        let p = Poly::new(vec![c(0.3, -1.0), c(0.0, 2.0), c(-1.0, 0.5), c(0.0, 0.0), c(1.0, 0.0)]);
        let step = |z: Complex64| {
            let (v, d) = p.eval_with_derivative(z);
            v / d
        };
        let a = aberth(p.degree(), step, 2.0, 0.4, 500);
        let b = companion_roots(&p).unwrap();
        assert_eq!(count_distinct(&a, 1e-8), 4);
        for r in &a {
            assert!(b.iter().any(|s| (r - s).norm() < 1e-9));
        }
    }
}
