//! Uniform-grid broad phase over sphere ids. Each sphere is registered in
//! every cell its bounding box overlaps, so a query over a padded bounding
//! box can never miss a neighbor.

use std::collections::HashMap;

use thiserror::Error;

use super::Sphere;
use crate::vec3::Vec3;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("sphere (center {center:?}, radius {radius}) outside grid bounds")]
    OutOfBounds { center: [f64; 3], radius: f64 },
}

#[derive(Clone, Debug)]
pub struct SpatialGrid {
    cell_size: f64,
    min: Vec3,
    max: Vec3,
    cells: HashMap<(i64, i64, i64), Vec<u32>>,
}

impl SpatialGrid {
    /// `bounds` should already be expanded past the domain by the largest
    /// radius the caller expects to store.
    pub fn new(min: Vec3, max: Vec3, cell_size: f64) -> Self {
        assert!(cell_size > 0.0, "cell size must be positive");
        SpatialGrid { cell_size, min, max, cells: HashMap::new() }
    }

    fn cell_of(&self, x: f64) -> i64 {
        (x / self.cell_size).floor() as i64
    }

    fn cell_range(&self, lo: Vec3, hi: Vec3) -> impl Iterator<Item = (i64, i64, i64)> {
        let (x0, x1) = (self.cell_of(lo.x), self.cell_of(hi.x));
        let (y0, y1) = (self.cell_of(lo.y), self.cell_of(hi.y));
        let (z0, z1) = (self.cell_of(lo.z), self.cell_of(hi.z));
        (x0..=x1).flat_map(move |cx| {
            (y0..=y1).flat_map(move |cy| (z0..=z1).map(move |cz| (cx, cy, cz)))
        })
    }

    pub fn insert(&mut self, id: u32, s: &Sphere) -> Result<(), GridError> {
        let r = Vec3::new(s.radius, s.radius, s.radius);
        let lo = s.center - r;
        let hi = s.center + r;
        for axis in 0..3 {
            if lo[axis] < self.min[axis] || hi[axis] > self.max[axis] {
                return Err(GridError::OutOfBounds {
                    center: s.center.to_array(),
                    radius: s.radius,
                });
            }
        }
        for key in self.cell_range(lo, hi) {
            self.cells.entry(key).or_default().push(id);
        }
        Ok(())
    }

    /// Ids of every stored sphere whose gap to `s` could be at most `margin`
    /// (a superset: the check is bounding-box based). Sorted and deduplicated.
    pub fn query(&self, s: &Sphere, margin: f64) -> Vec<u32> {
        let pad = s.radius + margin.max(0.0);
        let r = Vec3::new(pad, pad, pad);
        let lo = s.center - r;
        let hi = s.center + r;
        let mut out = Vec::new();
        for key in self.cell_range(lo, hi) {
            if let Some(ids) = self.cells.get(&key) {
                out.extend_from_slice(ids);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::gap;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn test_grid() -> SpatialGrid {
        SpatialGrid::new(Vec3::new(-10.0, -10.0, -10.0), Vec3::new(110.0, 110.0, 110.0), 5.0)
    }

    #[test]
    fn empty_grid_query_is_empty() {
        let g = test_grid();
        let probe = Sphere::new(Vec3::new(50.0, 50.0, 50.0), 3.0);
        assert!(g.query(&probe, 10.0).is_empty());
    }

    #[test]
    fn inserted_sphere_is_found_by_itself() {
        let mut g = test_grid();
        let s = Sphere::new(Vec3::new(50.0, 50.0, 50.0), 3.0);
        g.insert(7, &s).unwrap();
        assert_eq!(g.query(&s, 0.0), vec![7]);
    }

    #[test]
    fn out_of_bounds_is_an_error() {
        let mut g = test_grid();
        let s = Sphere::new(Vec3::new(500.0, 50.0, 50.0), 3.0);
        assert!(matches!(g.insert(0, &s), Err(GridError::OutOfBounds { .. })));
    }

    /// Queries return a superset of the brute-force neighbor set.
    #[test]
    fn never_misses_a_brute_force_neighbor() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut g = test_grid();
        let mut spheres = Vec::new();
        for id in 0..1000u32 {
            let s = Sphere::new(
                Vec3::new(
                    rng.gen_range(0.0..100.0),
                    rng.gen_range(0.0..100.0),
                    rng.gen_range(0.0..100.0),
                ),
                rng.gen_range(0.5..4.0),
            );
            g.insert(id, &s).unwrap();
            spheres.push(s);
        }
        let margin = 1.5;
        for _ in 0..100 {
            let probe = Sphere::new(
                Vec3::new(
                    rng.gen_range(0.0..100.0),
                    rng.gen_range(0.0..100.0),
                    rng.gen_range(0.0..100.0),
                ),
                rng.gen_range(0.5..4.0),
            );
            let found = g.query(&probe, margin);
            for (id, s) in spheres.iter().enumerate() {
                if gap(&probe, s) <= margin {
                    assert!(
                        found.binary_search(&(id as u32)).is_ok(),
                        "grid missed neighbor {id}"
                    );
                }
            }
        }
    }
}
