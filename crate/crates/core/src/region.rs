//! Planar region descriptors: closed discs and axis-aligned rectangles.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Region {
    Disc { center: Complex64, radius: f64 },
    /// Opposite corners; the constructor normalises them to `[min, max]`.
    Rect { corners: [Complex64; 2] },
}

impl Region {
    pub fn disc(center: Complex64, radius: f64) -> Self {
        Region::Disc { center, radius }
    }

    pub fn rect(a: Complex64, b: Complex64) -> Self {
        let lo = Complex64::new(a.re.min(b.re), a.im.min(b.im));
        let hi = Complex64::new(a.re.max(b.re), a.im.max(b.im));
        Region::Rect { corners: [lo, hi] }
    }

    pub fn square(center: Complex64, side: f64) -> Self {
        let h = Complex64::new(side / 2.0, side / 2.0);
        Region::rect(center - h, center + h)
    }

    fn rect_bounds(corners: &[Complex64; 2]) -> (f64, f64, f64, f64) {
        let [a, b] = corners;
        (a.re.min(b.re), a.re.max(b.re), a.im.min(b.im), a.im.max(b.im))
    }

    pub fn contains(&self, z: Complex64) -> bool {
        match self {
            Region::Disc { center, radius } => (z - center).norm() <= *radius,
            Region::Rect { corners } => {
                let (x0, x1, y0, y1) = Self::rect_bounds(corners);
                z.re >= x0 && z.re <= x1 && z.im >= y0 && z.im <= y1
            }
        }
    }

    pub fn center(&self) -> Complex64 {
        match self {
            Region::Disc { center, .. } => *center,
            Region::Rect { corners } => (corners[0] + corners[1]) / 2.0,
        }
    }

    /// Radius of the smallest disc about [`Region::center`] containing the region.
    pub fn circumradius(&self) -> f64 {
        match self {
            Region::Disc { radius, .. } => *radius,
            Region::Rect { corners } => (corners[1] - corners[0]).norm() / 2.0,
        }
    }

    /// Bounding box as `(min, max)` corners.
    pub fn bbox(&self) -> (Complex64, Complex64) {
        match self {
            Region::Disc { center, radius } => (
                center - Complex64::new(*radius, *radius),
                center + Complex64::new(*radius, *radius),
            ),
            Region::Rect { corners } => {
                let (x0, x1, y0, y1) = Self::rect_bounds(corners);
                (Complex64::new(x0, y0), Complex64::new(x1, y1))
            }
        }
    }

    /// Euclidean distance from `z` to the region (zero inside).
    pub fn distance_to(&self, z: Complex64) -> f64 {
        match self {
            Region::Disc { center, radius } => ((z - center).norm() - radius).max(0.0),
            Region::Rect { corners } => {
                let (x0, x1, y0, y1) = Self::rect_bounds(corners);
                let dx = (x0 - z.re).max(0.0).max(z.re - x1);
                let dy = (y0 - z.im).max(0.0).max(z.im - y1);
                dx.hypot(dy)
            }
        }
    }

    /// Whether the closed region meets the closed disc `disc(center, radius)`.
    pub fn meets_disc(&self, center: Complex64, radius: f64) -> bool {
        self.distance_to(center) <= radius
    }

    /// Whether the closure of `self` lies in the interior of `outer`.
    pub fn closure_inside(&self, outer: &Region) -> bool {
        match outer {
            Region::Disc { center, radius } => {
                let far = match self {
                    Region::Disc { center: c, radius: r } => (c - center).norm() + r,
                    Region::Rect { corners } => {
                        let (x0, x1, y0, y1) = Self::rect_bounds(corners);
                        [
                            Complex64::new(x0, y0),
                            Complex64::new(x0, y1),
                            Complex64::new(x1, y0),
                            Complex64::new(x1, y1),
                        ]
                        .iter()
                        .map(|p| (p - center).norm())
                        .fold(0.0, f64::max)
                    }
                };
                far < *radius
            }
            Region::Rect { corners } => {
                let (x0, x1, y0, y1) = Self::rect_bounds(corners);
                let (lo, hi) = self.bbox();
                lo.re > x0 && hi.re < x1 && lo.im > y0 && hi.im < y1
            }
        }
    }

    /// Conservative disjointness test (exact for disc/disc, disc/rect and rect/rect).
    pub fn disjoint(&self, other: &Region) -> bool {
        match (self, other) {
            (Region::Disc { center: a, radius: r }, Region::Disc { center: b, radius: s }) => {
                (a - b).norm() > r + s
            }
            (Region::Disc { center, radius }, rect @ Region::Rect { .. })
            | (rect @ Region::Rect { .. }, Region::Disc { center, radius }) => {
                rect.distance_to(*center) > *radius
            }
            (Region::Rect { .. }, Region::Rect { .. }) => {
                let (a0, a1) = self.bbox();
                let (b0, b1) = other.bbox();
                a1.re < b0.re || b1.re < a0.re || a1.im < b0.im || b1.im < a0.im
            }
        }
    }

    /// Image under `z -> a z + b`. Rectangles are only closed under real `a`.
    pub fn affine_image(&self, a: Complex64, b: Complex64) -> Option<Region> {
        match self {
            Region::Disc { center, radius } => Some(Region::disc(a * center + b, a.norm() * radius)),
            Region::Rect { corners } => {
                if a.im != 0.0 {
                    return None;
                }
                Some(Region::rect(a * corners[0] + b, a * corners[1] + b))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn disc_and_rect_membership() {
        let d = Region::disc(c(0.0, 0.0), 1.0);
        assert!(d.contains(c(1.0, 0.0)));
        assert!(!d.contains(c(1.0, 0.1)));
        let r = Region::rect(c(1.0, 1.0), c(-1.0, 0.0));
        assert!(r.contains(c(0.0, 0.5)));
        assert!(!r.contains(c(0.0, -0.1)));
        assert_eq!(r.bbox(), (c(-1.0, 0.0), c(1.0, 1.0)));
    }

    #[test]
    fn distance_and_overlap() {
        let r = Region::square(c(0.0, 0.0), 2.0);
        assert_eq!(r.distance_to(c(0.5, 0.5)), 0.0);
        assert!((r.distance_to(c(4.0, 5.0)) - 5.0).abs() < 1e-15);
        assert!(r.meets_disc(c(2.0, 0.0), 1.0));
        assert!(!r.meets_disc(c(2.0, 2.0), 1.0));
        assert!(Region::disc(c(0.0, 0.0), 1.0).disjoint(&Region::disc(c(2.5, 0.0), 1.0)));
        assert!(!Region::disc(c(0.0, 0.0), 1.0).disjoint(&r));
    }

    #[test]
    fn closure_containment() {
        let outer = Region::disc(c(0.0, 0.0), 4.0);
        assert!(Region::disc(c(1.0, 0.0), 2.9).closure_inside(&outer));
        assert!(!Region::disc(c(1.0, 0.0), 3.0).closure_inside(&outer));
        assert!(Region::square(c(0.0, 0.0), 2.0).closure_inside(&outer));
    }
}
