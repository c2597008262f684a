//! Shared packing vocabulary: domain specification, the packing result
//! container, fill-goal accounting and boundary-list rules.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distributions::{DistributionError, RadiusDistribution, RngSeed};
use crate::geometry::{snap, ContactParams, ContactParamsError, Sphere};
use crate::vec3::Vec3;

/// Tolerance for "center lies exactly on a plane" decisions. Construction
/// puts such centers on the plane bit-exactly; the band only absorbs
/// read-back noise.
pub const PLANE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    M1,
    M2,
    Hemisphere,
}

impl Method {
    /// How spheres qualify for a face's boundary list.
    pub fn boundary_rule(self) -> Option<BoundaryRule> {
        match self {
            Method::M1 => Some(BoundaryRule::Tangent),
            Method::M2 => Some(BoundaryRule::Centered),
            Method::Hemisphere => None,
        }
    }

    /// How a boundary sphere's projected disk counts toward face coverage.
    pub fn face_area_mode(self) -> FaceAreaMode {
        match self {
            Method::M2 => FaceAreaMode::FullDisk,
            _ => FaceAreaMode::Clipped,
        }
    }
}

/// The six faces of an axis-aligned box, in output order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Face {
    XMin,
    YMin,
    ZMin,
    XMax,
    YMax,
    ZMax,
}

impl Face {
    pub const ALL: [Face; 6] =
        [Face::XMin, Face::YMin, Face::ZMin, Face::XMax, Face::YMax, Face::ZMax];

    pub fn axis(self) -> usize {
        match self {
            Face::XMin | Face::XMax => 0,
            Face::YMin | Face::YMax => 1,
            Face::ZMin | Face::ZMax => 2,
        }
    }

    pub fn is_min(self) -> bool {
        matches!(self, Face::XMin | Face::YMin | Face::ZMin)
    }

    pub fn index(self) -> usize {
        match self {
            Face::XMin => 0,
            Face::YMin => 1,
            Face::ZMin => 2,
            Face::XMax => 3,
            Face::YMax => 4,
            Face::ZMax => 5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Face::XMin => "xmin",
            Face::YMin => "ymin",
            Face::ZMin => "zmin",
            Face::XMax => "xmax",
            Face::YMax => "ymax",
            Face::ZMax => "zmax",
        }
    }

    pub fn plane_coord(self, dims: Vec3) -> f64 {
        if self.is_min() {
            0.0
        } else {
            dims[self.axis()]
        }
    }

    /// In-plane axes of this face, ascending.
    pub fn tangent_axes(self) -> (usize, usize) {
        match self.axis() {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        }
    }
}

/// Distance from a point to a face plane of the box `[0, dims]`, positive on
/// the interior side.
pub fn face_plane_distance(center: Vec3, face: Face, dims: Vec3) -> f64 {
    let c = center[face.axis()];
    if face.is_min() {
        c
    } else {
        dims[face.axis()] - c
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryRule {
    /// Sphere surface within the contact tolerance of the face plane.
    Tangent,
    /// Sphere center on the face plane itself.
    Centered,
}

impl BoundaryRule {
    pub fn qualifies(self, s: &Sphere, face: Face, dims: Vec3, contact_dist: f64) -> bool {
        let d = face_plane_distance(s.center, face, dims);
        match self {
            BoundaryRule::Tangent => d - s.radius <= contact_dist && d >= -PLANE_TOL,
            BoundaryRule::Centered => d.abs() <= PLANE_TOL,
        }
    }
}

/// Rebuild the six boundary index lists for the box `[0, dims]`.
pub fn build_boundary_lists(
    spheres: &[Sphere],
    dims: Vec3,
    rule: BoundaryRule,
    contact_dist: f64,
) -> [Vec<u32>; 6] {
    let mut lists: [Vec<u32>; 6] = Default::default();
    for (id, s) in spheres.iter().enumerate() {
        for face in Face::ALL {
            if rule.qualifies(s, face, dims, contact_dist) {
                lists[face.index()].push(id as u32);
            }
        }
    }
    lists
}

#[derive(Debug, Error, PartialEq)]
pub enum SpecError {
    #[error("brick side {axis} = {length} µm is too small; must exceed 4 x mean radius = {min} µm")]
    SideTooSmall { axis: usize, length: f64, min: f64 },
    #[error("{name} = {value} must lie in (0, 1]")]
    GoalOutOfRange { name: &'static str, value: f64 },
    #[error("brick numbers must all be at least 1")]
    ZeroBrickNumber,
    #[error("hemisphere radius {radius} µm exceeds half the smallest brick side ({limit} µm)")]
    HemisphereTooLarge { radius: f64, limit: f64 },
    #[error("hemisphere radii must be non-negative, got {0}")]
    NegativeHemisphereRadius(f64),
    #[error(transparent)]
    Contact(#[from] ContactParamsError),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
}

/// Everything a packer needs to fill and tile a brick domain.
#[derive(Clone, Debug)]
pub struct DomainSpec {
    pub brick_lengths: Vec3,
    pub brick_numbers: [u32; 3],
    pub face_goal: f64,
    pub body_goal: f64,
    pub contact: ContactParams,
    pub distribution: RadiusDistribution,
    pub seed: RngSeed,
}

impl DomainSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        brick_lengths: [f64; 3],
        brick_numbers: [u32; 3],
        face_goal: f64,
        body_goal: f64,
        epsilon: f64,
        delta: f64,
        distribution: RadiusDistribution,
        seed: RngSeed,
    ) -> Result<Self, SpecError> {
        let mean = distribution.mean();
        let contact = ContactParams::new(epsilon, delta, mean)?;
        for (name, value) in [("face_goal", face_goal), ("body_goal", body_goal)] {
            if !(value > 0.0 && value <= 1.0) {
                return Err(SpecError::GoalOutOfRange { name, value });
            }
        }
        if brick_numbers.iter().any(|&n| n == 0) {
            return Err(SpecError::ZeroBrickNumber);
        }
        // Snapped sides make the tiling transforms exact.
        let lengths =
            Vec3::new(snap(brick_lengths[0]), snap(brick_lengths[1]), snap(brick_lengths[2]));
        for axis in 0..3 {
            if lengths[axis] <= 4.0 * mean {
                return Err(SpecError::SideTooSmall { axis, length: lengths[axis], min: 4.0 * mean });
            }
        }
        Ok(DomainSpec {
            brick_lengths: lengths,
            brick_numbers,
            face_goal,
            body_goal,
            contact,
            distribution,
            seed,
        })
    }

    /// Total domain size: per-axis brick length times brick count.
    pub fn domain_lengths(&self) -> Vec3 {
        Vec3::new(
            self.brick_lengths.x * self.brick_numbers[0] as f64,
            self.brick_lengths.y * self.brick_numbers[1] as f64,
            self.brick_lengths.z * self.brick_numbers[2] as f64,
        )
    }

    pub fn brick_count(&self) -> u32 {
        self.brick_numbers.iter().product()
    }
}

/// Reference face coverage: projected disk over circumscribed square.
pub fn face_goal_reference() -> f64 {
    std::f64::consts::FRAC_PI_4
}

/// Reference body fill: sphere over circumscribed cube.
pub fn body_goal_reference() -> f64 {
    std::f64::consts::PI / 6.0
}

#[derive(Debug, Error, PartialEq)]
pub enum AccountingError {
    #[error("domain volume must be positive, got {0}")]
    NonPositiveVolume(f64),
}

/// Volume of `s` inside the box `[0, dims]`.
///
/// Handles the shapes the packers produce: spheres fully inside, spheres
/// protruding past one plane (spherical cap subtracted), and spheres centered
/// exactly on one or more orthogonal planes (binary fraction). Caps on
/// distinct planes are assumed not to intersect each other inside the sphere,
/// which holds because in-plane coordinates keep at least one radius of
/// clearance from the other faces.
pub fn sphere_box_volume(s: &Sphere, dims: Vec3) -> f64 {
    let full = s.volume();
    let r = s.radius;
    let mut centered = 0u32;
    let mut caps = 0.0;
    for face in Face::ALL {
        let d = face_plane_distance(s.center, face, dims);
        if d <= -r {
            return 0.0;
        }
        if d.abs() <= PLANE_TOL {
            centered += 1;
        } else if d < r {
            let h = r - d;
            caps += std::f64::consts::PI * h * h * (3.0 * r - h) / 3.0;
        }
    }
    (full - caps) / (1u32 << centered) as f64
}

/// Fraction of `domain_volume` filled by the spheres, counting clipped
/// volumes inside the box `[0, dims]` only.
pub fn achieved_body_fraction(
    spheres: &[Sphere],
    dims: Vec3,
    domain_volume: f64,
) -> Result<f64, AccountingError> {
    if !(domain_volume > 0.0) {
        return Err(AccountingError::NonPositiveVolume(domain_volume));
    }
    let total: f64 = spheres.iter().map(|s| sphere_box_volume(s, dims)).sum();
    Ok(total / domain_volume)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceAreaMode {
    /// Disk area intersected with the face rectangle.
    Clipped,
    /// Full disk, including parts past the rectangle edges.
    FullDisk,
}

/// Projected disk area of `s` on `face`. Clipping subtracts one circular
/// segment per protruded rectangle edge (disks in generated packings never
/// protrude past two edges at once).
pub fn projected_disk_area(s: &Sphere, face: Face, dims: Vec3, mode: FaceAreaMode) -> f64 {
    let r = s.radius;
    let full = std::f64::consts::PI * r * r;
    if mode == FaceAreaMode::FullDisk {
        return full;
    }
    let (u_axis, v_axis) = face.tangent_axes();
    let mut area = full;
    for (axis, limit) in [(u_axis, dims[u_axis]), (v_axis, dims[v_axis])] {
        let c = s.center[axis];
        for d in [c, limit - c] {
            if d <= -r {
                return 0.0;
            }
            if d < r {
                // circular segment beyond the edge
                area -= r * r * (d / r).acos() - d * (r * r - d * d).sqrt();
            }
        }
    }
    area.max(0.0)
}

/// Covered-area fraction of one face: summed projected disk areas of the
/// listed spheres over the face area (less `void_disk_area`, for faces
/// carrying a carved hemisphere).
pub fn face_fraction(
    spheres: &[Sphere],
    ids: &[u32],
    face: Face,
    dims: Vec3,
    mode: FaceAreaMode,
    void_disk_area: f64,
) -> f64 {
    let (u_axis, v_axis) = face.tangent_axes();
    let denom = dims[u_axis] * dims[v_axis] - void_disk_area;
    let sum: f64 = ids
        .iter()
        .map(|&id| projected_disk_area(&spheres[id as usize], face, dims, mode))
        .sum();
    sum / denom
}

/// Echo of the run parameters plus achieved results, serialized alongside
/// the sphere data.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PackingMeta {
    pub method: Method,
    pub distribution: RadiusDistribution,
    pub seed: u64,
    pub mean_radius: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub face_goal: f64,
    pub body_goal: f64,
    pub brick_lengths: [f64; 3],
    pub brick_numbers: [u32; 3],
    pub domain_lengths: [f64; 3],
    pub hemisphere_radii: Option<[f64; 2]>,
    pub unit_brick_spheres: u32,
    pub final_spheres: u32,
    pub goals_met: bool,
    pub achieved_body_fraction: f64,
    pub achieved_face_fractions: [f64; 6],
}

/// A packed domain: spheres, their contact graph, boundary index lists
/// (absent for hemisphere domains) and the run metadata.
#[derive(Clone, Debug)]
pub struct Packing {
    pub spheres: Vec<Sphere>,
    /// Unordered contact pairs stored as (i, j) with i < j, sorted.
    pub contacts: Vec<(u32, u32)>,
    pub boundary: Option<[Vec<u32>; 6]>,
    pub meta: PackingMeta,
}

impl Packing {
    pub fn domain_dims(&self) -> Vec3 {
        Vec3::from_array(self.meta.domain_lengths)
    }

    pub fn contact_params(&self) -> ContactParams {
        ContactParams::new(self.meta.epsilon, self.meta.delta, self.meta.mean_radius)
            .expect("metadata holds validated parameters")
    }

    /// Domain volume with any hemisphere voids carved out.
    pub fn domain_volume(&self) -> f64 {
        let d = self.domain_dims();
        let mut v = d.x * d.y * d.z;
        if let Some([h1, h2]) = self.meta.hemisphere_radii {
            v -= 2.0 * std::f64::consts::PI / 3.0 * (h1.powi(3) + h2.powi(3));
        }
        v
    }

    /// Recompute achieved body and face fractions from the sphere data.
    pub fn recompute_achieved(&mut self) {
        let dims = self.domain_dims();
        self.meta.achieved_body_fraction =
            achieved_body_fraction(&self.spheres, dims, self.domain_volume())
                .expect("validated domain has positive volume");
        // Domains without boundary lists (hemisphere) keep the fractions the
        // fill recorded against their carved face areas.
        if let Some(boundary) = &self.boundary {
            let mode = self.meta.method.face_area_mode();
            let mut fractions = [0.0; 6];
            for face in Face::ALL {
                fractions[face.index()] =
                    face_fraction(&self.spheres, &boundary[face.index()], face, dims, mode, 0.0);
            }
            self.meta.achieved_face_fractions = fractions;
        }
        self.meta.final_spheres = self.spheres.len() as u32;
    }
}

#[derive(Debug, Error)]
pub enum PackError {
    #[error("fill goals not reached: body {achieved_body:.4} (goal {body_goal}), worst face {achieved_face:.4} (goal {face_goal})")]
    GoalsNotReached {
        packing: Box<Packing>,
        achieved_body: f64,
        body_goal: f64,
        achieved_face: f64,
        face_goal: f64,
    },
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("brick violates the face symmetry required for copy tiling: {0}")]
    FaceSymmetry(String),
}

impl PackError {
    /// The packing carried by a goal-shortfall error.
    pub fn into_partial(self) -> Option<Packing> {
        match self {
            PackError::GoalsNotReached { packing, .. } => Some(*packing),
            _ => None,
        }
    }
}
