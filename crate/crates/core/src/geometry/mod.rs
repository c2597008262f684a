//! Geometric kernel: the sphere type, contact predicates, the three-parent
//! placement solver and a uniform-grid spatial index.

mod grid;
mod trilateration;

pub use grid::{GridError, SpatialGrid};
pub use trilateration::{solve_contact_in_plane, solve_contact_position, TrilaterationError};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::vec3::Vec3;

/// Coordinate quantum, 2^-30 µm. Positions and radii are snapped to this grid
/// so the brick tiling transforms (mirror about a face plane, translation by
/// whole side lengths) are exact in f64 arithmetic: all values are integer
/// multiples of the quantum small enough that sums and differences round to
/// nothing.
pub const COORD_QUANTUM: f64 = 1.0 / (1u64 << 30) as f64;

/// Round a length onto the coordinate grid.
pub fn snap(x: f64) -> f64 {
    (x * (1u64 << 30) as f64).round() * COORD_QUANTUM
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sphere {
    pub center: Vec3,
    pub radius: f64,
}

impl Sphere {
    pub fn new(center: Vec3, radius: f64) -> Self {
        debug_assert!(radius > 0.0, "sphere radius must be positive");
        Sphere { center, radius }
    }

    pub fn volume(&self) -> f64 {
        std::f64::consts::FRAC_PI_3 * 4.0 * self.radius.powi(3)
    }
}

/// Signed surface separation: negative means overlap, zero tangency.
pub fn gap(a: &Sphere, b: &Sphere) -> f64 {
    a.center.dist(b.center) - (a.radius + b.radius)
}

/// Two spheres count as touching when their surfaces are within
/// `epsilon * mean_radius` of each other, on either side of tangency.
pub fn in_contact(a: &Sphere, b: &Sphere, params: &ContactParams) -> bool {
    gap(a, b).abs() <= params.contact_dist()
}

#[derive(Debug, Error, PartialEq)]
pub enum ContactParamsError {
    #[error("contact parameters must satisfy 0 <= epsilon <= delta <= 1, got epsilon={epsilon}, delta={delta}")]
    OutOfOrder { epsilon: f64, delta: f64 },
    #[error("mean radius must be positive, got {0}")]
    NonPositiveMeanRadius(f64),
}

/// Contact tolerance `epsilon`, parent-candidate tolerance `delta` and the
/// mean radius they scale against.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContactParams {
    pub epsilon: f64,
    pub delta: f64,
    pub mean_radius: f64,
}

impl ContactParams {
    pub fn new(epsilon: f64, delta: f64, mean_radius: f64) -> Result<Self, ContactParamsError> {
        if !(0.0 <= epsilon && epsilon <= delta && delta <= 1.0) {
            return Err(ContactParamsError::OutOfOrder { epsilon, delta });
        }
        if !(mean_radius > 0.0) {
            return Err(ContactParamsError::NonPositiveMeanRadius(mean_radius));
        }
        Ok(ContactParams { epsilon, delta, mean_radius })
    }

    /// Surface separation below which two spheres are in contact.
    pub fn contact_dist(&self) -> f64 {
        self.epsilon * self.mean_radius
    }

    /// Surface separation below which two spheres qualify as mutual parents.
    pub fn parent_dist(&self) -> f64 {
        self.delta * self.mean_radius
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(x: f64, y: f64, z: f64, r: f64) -> Sphere {
        Sphere::new(Vec3::new(x, y, z), r)
    }

    #[test]
    fn gap_examples() {
        // Identical unit spheres at the same center fully overlap.
        let a = sphere(0.0, 0.0, 0.0, 1.0);
        assert_eq!(gap(&a, &a), -2.0);
        // Unit spheres two apart are tangent.
        let b = sphere(2.0, 0.0, 0.0, 1.0);
        assert_eq!(gap(&a, &b), 0.0);
        // And 2.5 apart leave half a unit of clearance.
        let c = sphere(2.5, 0.0, 0.0, 1.0);
        assert_eq!(gap(&a, &c), 0.5);
    }

    #[test]
    fn gap_is_symmetric() {
        let a = sphere(0.3, -1.2, 4.0, 0.7);
        let b = sphere(5.1, 2.2, -0.4, 1.9);
        assert_eq!(gap(&a, &b), gap(&b, &a));
    }

    #[test]
    fn contact_threshold_scales_with_mean_radius() {
        let p = ContactParams::new(0.2, 0.5, 14.14).unwrap();
        let a = sphere(0.0, 0.0, 0.0, 1.0);
        // gap = 0 is always a contact
        assert!(in_contact(&a, &sphere(2.0, 0.0, 0.0, 1.0), &p));
        // gap = 2.0 <= 0.2 * 14.14 = 2.828
        assert!(in_contact(&a, &sphere(4.0, 0.0, 0.0, 1.0), &p));
        // but not at epsilon = 0.1 (threshold 1.414)
        let tight = ContactParams::new(0.1, 0.5, 14.14).unwrap();
        assert!(!in_contact(&a, &sphere(4.0, 0.0, 0.0, 1.0), &tight));
    }

    #[test]
    fn params_must_be_ordered() {
        assert!(ContactParams::new(0.5, 0.2, 10.0).is_err());
        assert!(ContactParams::new(-0.1, 0.5, 10.0).is_err());
        assert!(ContactParams::new(0.1, 1.5, 10.0).is_err());
        assert!(ContactParams::new(0.1, 0.5, 0.0).is_err());
        assert!(ContactParams::new(0.1, 0.5, 10.0).is_ok());
    }

    #[test]
    fn snapped_values_are_exact_under_tiling_arithmetic() {
        let l = snap(212.09371523);
        let x = snap(37.77215);
        // mirror about x = L, then about x = 0, lands back exactly
        let mirrored = l - x;
        assert_eq!(l - mirrored, x);
        // translation by multiples of L preserves differences exactly
        let y = snap(11.0312345);
        for k in 1..8 {
            let off = k as f64 * l;
            assert_eq!((off + x) - (off + y), x - y);
        }
    }
}
