use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Dense complex polynomial, coefficients in ascending powers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        Poly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// `z -> a z + b`.
    pub fn linear(a: Complex64, b: Complex64) -> Self {
        Poly::new(vec![b, a])
    }

    pub fn identity() -> Self {
        Poly::linear(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> Complex64 {
        *self.coeffs.last().unwrap()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Value and first derivative by a single Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let mut p = zero;
        let mut dp = zero;
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() == 1 {
            return Poly::new(vec![Complex64::new(0.0, 0.0)]);
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    /// Coefficients of `p(center + d)` as a polynomial in `d`.
    pub fn taylor_at(&self, center: Complex64) -> Vec<Complex64> {
        // repeated synthetic division
        let mut work = self.coeffs.clone();
        let n = work.len();
        for k in 0..n {
            for j in (k..n - 1).rev() {
                let next = work[j + 1];
                work[j] += center * next;
            }
        }
        work
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        Poly::new(
            (0..n)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or(zero)
                        + other.coeffs.get(k).copied().unwrap_or(zero)
                })
                .collect(),
        )
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, s: Complex64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// `self(inner(z))`.
    pub fn compose(&self, inner: &Poly) -> Poly {
        let mut acc = Poly::new(vec![self.leading()]);
        for &c in self.coeffs.iter().rev().skip(1) {
            acc = acc.mul(inner).add(&Poly::new(vec![c]));
        }
        acc
    }

    /// Bounds `(lo, hi)` on `|p|` over the closed disc `disc(center, radius)`,
    /// from the Taylor expansion at the center.
    pub fn abs_bounds_on_disc(&self, center: Complex64, radius: f64) -> (f64, f64) {
        let t = self.taylor_at(center);
        let head = t[0].norm();
        let mut tail = 0.0;
        let mut rk = 1.0;
        for c in t.iter().skip(1) {
            rk *= radius;
            tail += c.norm() * rk;
        }
        // absorb floating-point error of the expansion
        let slack = 1e-12 * (head + tail) + f64::MIN_POSITIVE;
        ((head - tail - slack).max(0.0), head + tail + slack)
    }

    /// Radius `s` with `p(disc(center, radius)) ⊂ disc(p(center), s)`.
    pub fn image_radius_on_disc(&self, center: Complex64, radius: f64) -> f64 {
        let t = self.taylor_at(center);
        let mut tail = 0.0;
        let mut rk = 1.0;
        for c in t.iter().skip(1) {
            rk *= radius;
            tail += c.norm() * rk;
        }
        tail * (1.0 + 1e-12)
    }
}
