//! Spatial hash for merging points that agree within a tolerance.

use std::collections::HashMap;

use super::point::Point;

#[derive(Debug, Clone)]
pub struct PointIndex {
    cell: f64,
    tol: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
    points: Vec<Point>,
}

impl PointIndex {
    pub fn new(tol: f64) -> Self {
        Self {
            cell: 2.0 * tol,
            tol,
            buckets: HashMap::new(),
            points: Vec::new(),
        }
    }

    fn key(&self, p: Point) -> (i64, i64) {
        ((p.x / self.cell).floor() as i64, (p.y / self.cell).floor() as i64)
    }

    /// Indices of stored points within the tolerance of `p`.
    pub fn near(&self, p: Point) -> Vec<usize> {
        let (kx, ky) = self.key(p);
        let mut out = Vec::new();
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = self.buckets.get(&(kx + dx, ky + dy)) {
                    out.extend(ids.iter().copied().filter(|&i| self.points[i].dist(p) <= self.tol));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Index of the first stored point near `p`, inserting `p` if none.
    pub fn get_or_insert(&mut self, p: Point) -> (usize, bool) {
        if let Some(&i) = self.near(p).first() {
            return (i, false);
        }
        (self.insert(p), true)
    }

    /// Stores `p` unconditionally.
    pub fn insert(&mut self, p: Point) -> usize {
        let id = self.points.len();
        self.points.push(p);
        let k = self.key(p);
        self.buckets.entry(k).or_default().push(id);
        id
    }

    pub fn point(&self, id: usize) -> Point {
        self.points[id]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merges_within_tolerance_across_bucket_borders() {
        let mut idx = PointIndex::new(1e-6);
        let (a, fresh) = idx.get_or_insert(Point::new(2e-6 - 1e-9, 0.0));
        assert!(fresh);
        let (b, fresh) = idx.get_or_insert(Point::new(2e-6 + 1e-9, 0.0));
        assert!(!fresh);
        assert_eq!(a, b);
        let (c, fresh) = idx.get_or_insert(Point::new(5e-6, 0.0));
        assert!(fresh && c != a);
        assert_eq!(idx.len(), 2);
    }
}
