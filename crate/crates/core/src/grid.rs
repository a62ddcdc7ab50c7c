//! Spatial hashing of complex points for tolerance-based deduplication.

use std::collections::HashMap;

use num_complex::Complex64;

pub(crate) fn cell_of(z: Complex64, h: f64) -> (i64, i64) {
    ((z.re / h).floor() as i64, (z.im / h).floor() as i64)
}

/// Set of points where membership means "within `tol` of a stored point".
pub(crate) struct PointSet {
    tol: f64,
    cells: HashMap<(i64, i64), Vec<usize>>,
    points: Vec<Complex64>,
}

impl PointSet {
    pub(crate) fn new(tol: f64) -> Self {
        PointSet { tol, cells: HashMap::new(), points: Vec::new() }
    }

    pub(crate) fn find(&self, z: Complex64) -> Option<usize> {
        let (i, j) = cell_of(z, self.tol);
        for di in -1..=1 {
            for dj in -1..=1 {
                if let Some(ids) = self.cells.get(&(i + di, j + dj)) {
                    for &id in ids {
                        if (self.points[id] - z).norm() <= self.tol {
                            return Some(id);
                        }
                    }
                }
            }
        }
        None
    }

    /// Inserts `z` unless an equivalent point is present; returns whether it was new.
    pub(crate) fn insert(&mut self, z: Complex64) -> bool {
        if self.find(z).is_some() {
            return false;
        }
        let id = self.points.len();
        self.points.push(z);
        self.cells.entry(cell_of(z, self.tol)).or_default().push(id);
        true
    }

    pub(crate) fn len(&self) -> usize {
        self.points.len()
    }
}

/// Lexicographic order on `(re, im)`.
pub(crate) fn lex_cmp(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}
