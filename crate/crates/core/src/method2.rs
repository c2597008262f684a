//! Second packing method: boundary sphere centers sit on the brick surface
//! itself. Corners carry equal spheres centered at the corner points, one
//! edge per axis is filled and replicated onto the three parallel edges,
//! one face per plane is filled and copied to its opposite, then the volume
//! fills as usual. Opposite faces end up identical, so a larger domain is
//! assembled by plain translation, merging the spheres that coincide on
//! shared faces.

use std::collections::{BTreeSet, HashMap};

use rand_chacha::ChaCha8Rng;

use crate::fill::{add_interface_contacts, finish_brick, BoundaryStyle, Filler};
use crate::geometry::Sphere;
use crate::packing::{
    build_boundary_lists, BoundaryRule, DomainSpec, Face, Method, PackError, Packing, PLANE_TOL,
};
use crate::vec3::Vec3;

/// Coincidence tolerances for merging shared-face spheres: translation is
/// exact arithmetic on grid coordinates, so these only absorb read-back
/// noise from foreign data.
const MERGE_CENTER_TOL: f64 = 1e-6;
const MERGE_RADIUS_REL_TOL: f64 = 1e-9;

/// Fill one unit brick. A goal shortfall comes back as
/// [`PackError::GoalsNotReached`] carrying the partial packing.
pub fn fill_unit_brick_m2(
    spec: &DomainSpec,
    rng: &mut ChaCha8Rng,
) -> Result<Packing, PackError> {
    let dims = spec.brick_lengths;
    let mut filler = Filler::new(
        dims,
        spec.contact,
        &spec.distribution,
        BoundaryStyle::OnBoundary,
        Method::M2.face_area_mode(),
        Vec::new(),
        [0.0; 6],
    );
    filler.place_corners();
    // one edge per axis, replicated onto the three parallel edges
    for axis in 0..3 {
        let (t1, t2) = transverse_axes(axis);
        let offsets = [
            Vec3::ZERO.with_axis(t1, dims[t1]),
            Vec3::ZERO.with_axis(t2, dims[t2]),
            Vec3::ZERO.with_axis(t1, dims[t1]).with_axis(t2, dims[t2]),
        ];
        filler.walk_edge(axis, [(t1, false), (t2, false)], &offsets, &spec.distribution, rng);
    }
    // one face per plane, copied onto the opposite face
    for face in [Face::XMin, Face::YMin, Face::ZMin] {
        let axis = face.axis();
        let opposite = Vec3::ZERO.with_axis(axis, dims[axis]);
        filler.fill_face(face, Some(opposite), spec.face_goal, &spec.distribution, rng);
    }
    let body_met = filler.fill_interior(spec.body_goal, &spec.distribution, rng);
    let faces_met = Face::ALL.iter().all(|&f| filler.face_fraction(f) >= spec.face_goal);
    finish_brick(
        filler,
        Method::M2,
        spec.distribution,
        spec.seed.0,
        spec.face_goal,
        spec.body_goal,
        None,
        body_met && faces_met,
    )
}

fn transverse_axes(axis: usize) -> (usize, usize) {
    match axis {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

/// Tile the brick by translation. Spheres coinciding on shared internal
/// faces (and edges and corners) collapse to a single sphere; contacts are
/// re-indexed and deduplicated, and near-face cross-brick contacts are
/// picked up by a slab pass over each internal interface.
pub fn tile_by_copy(brick: &Packing, brick_numbers: [u32; 3]) -> Result<Packing, PackError> {
    check_face_symmetry(brick)?;
    let lengths = Vec3::from_array(brick.meta.brick_lengths);
    let n_brick = brick.spheres.len();

    let mut spheres: Vec<Sphere> = Vec::new();
    let mut contacts: BTreeSet<(u32, u32)> = BTreeSet::new();
    let mut buckets: HashMap<(i64, i64, i64), Vec<u32>> = HashMap::new();
    let quantize = |c: Vec3| {
        (
            (c.x / MERGE_CENTER_TOL).round() as i64,
            (c.y / MERGE_CENTER_TOL).round() as i64,
            (c.z / MERGE_CENTER_TOL).round() as i64,
        )
    };

    let mut remap = vec![0u32; n_brick];
    for a in 0..brick_numbers[0] {
        for b in 0..brick_numbers[1] {
            for c in 0..brick_numbers[2] {
                let offset = Vec3::new(
                    a as f64 * lengths.x,
                    b as f64 * lengths.y,
                    c as f64 * lengths.z,
                );
                for (i, s) in brick.spheres.iter().enumerate() {
                    let cand = Sphere::new(s.center + offset, s.radius);
                    let key = quantize(cand.center);
                    let bucket = buckets.entry(key).or_default();
                    let found = bucket.iter().copied().find(|&id| {
                        let o = &spheres[id as usize];
                        o.center.dist(cand.center) <= MERGE_CENTER_TOL
                            && (o.radius - cand.radius).abs() <= MERGE_RADIUS_REL_TOL * o.radius
                    });
                    remap[i] = match found {
                        Some(id) => id,
                        None => {
                            let id = spheres.len() as u32;
                            spheres.push(cand);
                            bucket.push(id);
                            id
                        }
                    };
                }
                for &(i, j) in &brick.contacts {
                    let (p, q) = (remap[i as usize], remap[j as usize]);
                    if p != q {
                        contacts.insert((p.min(q), p.max(q)));
                    }
                }
            }
        }
    }

    let dims = Vec3::new(
        lengths.x * brick_numbers[0] as f64,
        lengths.y * brick_numbers[1] as f64,
        lengths.z * brick_numbers[2] as f64,
    );
    let contact_dist = brick.meta.epsilon * brick.meta.mean_radius;
    for axis in 0..3 {
        for k in 1..brick_numbers[axis] {
            add_interface_contacts(
                &spheres,
                &mut contacts,
                axis,
                k as f64 * lengths[axis],
                contact_dist,
            );
        }
    }

    let boundary = build_boundary_lists(&spheres, dims, BoundaryRule::Centered, contact_dist);
    let mut meta = brick.meta.clone();
    meta.brick_numbers = brick_numbers;
    meta.domain_lengths = dims.to_array();
    meta.unit_brick_spheres = n_brick as u32;
    let mut packing = Packing {
        spheres,
        contacts: contacts.into_iter().collect(),
        boundary: Some(boundary),
        meta,
    };
    packing.recompute_achieved();
    Ok(packing)
}

/// Copy tiling is only sound when each min face pattern translates exactly
/// onto its opposite face.
fn check_face_symmetry(brick: &Packing) -> Result<(), PackError> {
    let dims = brick.domain_dims();
    for axis in 0..3 {
        let mut min_set: Vec<([i64; 3], u64)> = Vec::new();
        let mut max_set: Vec<([i64; 3], u64)> = Vec::new();
        for s in &brick.spheres {
            let on_min = s.center[axis].abs() <= PLANE_TOL;
            let on_max = (s.center[axis] - dims[axis]).abs() <= PLANE_TOL;
            if !(on_min || on_max) {
                continue;
            }
            let translated = if on_min {
                s.center + Vec3::ZERO.with_axis(axis, dims[axis])
            } else {
                s.center
            };
            let key = (
                [
                    (translated.x / MERGE_CENTER_TOL).round() as i64,
                    (translated.y / MERGE_CENTER_TOL).round() as i64,
                    (translated.z / MERGE_CENTER_TOL).round() as i64,
                ],
                s.radius.to_bits(),
            );
            if on_min {
                min_set.push(key);
            }
            if on_max {
                max_set.push(key);
            }
        }
        min_set.sort_unstable();
        max_set.sort_unstable();
        if min_set != max_set {
            return Err(PackError::FaceSymmetry(format!(
                "axis {axis}: {} min-face vs {} max-face spheres do not translate onto each other",
                min_set.len(),
                max_set.len()
            )));
        }
    }
    Ok(())
}

/// Fill the unit brick and tile it per the spec. Goal shortfalls are
/// reported through `meta.goals_met` on the returned packing.
pub fn generate(spec: &DomainSpec) -> Result<Packing, PackError> {
    let mut rng = spec.seed.rng();
    let (brick, goals_met) = match fill_unit_brick_m2(spec, &mut rng) {
        Ok(p) => (p, true),
        Err(PackError::GoalsNotReached { packing, .. }) => (*packing, false),
        Err(e) => return Err(e),
    };
    let mut total = tile_by_copy(&brick, spec.brick_numbers)?;
    total.meta.goals_met = goals_met;
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{RadiusDistribution, RngSeed};
    use crate::validate::validate_packing;

    fn smoke_spec() -> DomainSpec {
        let dist = RadiusDistribution::gamma(7.0, 2.0).unwrap();
        let side = 8.0 * dist.mean();
        DomainSpec::new([side, side, side], [1, 1, 1], 0.7, 0.5, 0.1, 0.5, dist, RngSeed(3))
            .unwrap()
    }

    fn smoke_brick() -> Packing {
        let spec = smoke_spec();
        let mut rng = spec.seed.rng();
        match fill_unit_brick_m2(&spec, &mut rng) {
            Ok(p) => p,
            Err(PackError::GoalsNotReached { packing, .. }) => *packing,
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn brick_validates_clean() {
        let report = validate_packing(&smoke_brick());
        assert!(report.is_clean(), "{}", report.summary());
    }

    #[test]
    fn corner_spheres_sit_on_the_corners() {
        let brick = smoke_brick();
        let dims = brick.domain_dims();
        for s in &brick.spheres[..8] {
            for axis in 0..3 {
                let c = s.center[axis];
                assert!(c == 0.0 || c == dims[axis]);
            }
        }
    }

    #[test]
    fn face_sphere_centers_lie_exactly_on_their_planes() {
        let brick = smoke_brick();
        let dims = brick.domain_dims();
        let boundary = brick.boundary.as_ref().unwrap();
        for face in Face::ALL {
            for &id in &boundary[face.index()] {
                let s = &brick.spheres[id as usize];
                let c = s.center[face.axis()];
                let plane = face.plane_coord(dims);
                assert_eq!(c, plane, "sphere {id} not exactly on {}", face.name());
            }
            assert!(!boundary[face.index()].is_empty());
        }
    }

    #[test]
    fn opposite_faces_are_exact_translates() {
        let brick = smoke_brick();
        let dims = brick.domain_dims();
        let boundary = brick.boundary.as_ref().unwrap();
        for (min_face, max_face) in
            [(Face::XMin, Face::XMax), (Face::YMin, Face::YMax), (Face::ZMin, Face::ZMax)]
        {
            let axis = min_face.axis();
            let offset = Vec3::ZERO.with_axis(axis, dims[axis]);
            let mut translated: Vec<[u64; 4]> = boundary[min_face.index()]
                .iter()
                .map(|&id| {
                    let s = &brick.spheres[id as usize];
                    let c = s.center + offset;
                    [c.x.to_bits(), c.y.to_bits(), c.z.to_bits(), s.radius.to_bits()]
                })
                .collect();
            let mut opposite: Vec<[u64; 4]> = boundary[max_face.index()]
                .iter()
                .map(|&id| {
                    let s = &brick.spheres[id as usize];
                    [
                        s.center.x.to_bits(),
                        s.center.y.to_bits(),
                        s.center.z.to_bits(),
                        s.radius.to_bits(),
                    ]
                })
                .collect();
            translated.sort_unstable();
            opposite.sort_unstable();
            assert_eq!(translated, opposite, "{} pattern mismatch", min_face.name());
        }
    }

    #[test]
    fn four_parallel_edges_carry_congruent_chains() {
        let brick = smoke_brick();
        let dims = brick.domain_dims();
        // spheres centered on the x-axis edge lines, keyed by their (y, z)
        let mut chains: HashMap<(u64, u64), Vec<(u64, u64)>> = HashMap::new();
        for s in &brick.spheres {
            let on_y = s.center.y == 0.0 || s.center.y == dims.y;
            let on_z = s.center.z == 0.0 || s.center.z == dims.z;
            let interior_x = s.center.x > 0.0 && s.center.x < dims.x;
            if on_y && on_z && interior_x {
                chains
                    .entry((s.center.y.to_bits(), s.center.z.to_bits()))
                    .or_default()
                    .push((s.center.x.to_bits(), s.radius.to_bits()));
            }
        }
        assert_eq!(chains.len(), 4, "expected chains on all four x edges");
        let mut patterns: Vec<Vec<(u64, u64)>> = chains.into_values().collect();
        for p in &mut patterns {
            p.sort_unstable();
        }
        assert!(patterns.windows(2).all(|w| w[0] == w[1]), "edge chains differ");
    }

    #[test]
    fn merge_count_for_a_two_brick_row() {
        let brick = smoke_brick();
        let tiled = tile_by_copy(&brick, [2, 1, 1]).unwrap();
        let shared = brick.boundary.as_ref().unwrap()[Face::XMax.index()].len();
        assert_eq!(tiled.spheres.len(), 2 * brick.spheres.len() - shared);
        let report = validate_packing(&tiled);
        assert!(report.is_clean(), "{}", report.summary());
    }

    #[test]
    fn no_two_spheres_share_a_center_after_merging() {
        let brick = smoke_brick();
        let tiled = tile_by_copy(&brick, [2, 2, 1]).unwrap();
        let mut seen = std::collections::HashSet::new();
        for s in &tiled.spheres {
            assert!(
                seen.insert([s.center.x.to_bits(), s.center.y.to_bits(), s.center.z.to_bits()]),
                "duplicate center {:?}",
                s.center
            );
        }
    }

    #[test]
    fn tiled_boundary_is_translated_copies_of_the_brick_face() {
        let brick = smoke_brick();
        let tiled = tile_by_copy(&brick, [2, 2, 1]).unwrap();
        let dims = brick.domain_dims();
        let brick_zmin = &brick.boundary.as_ref().unwrap()[Face::ZMin.index()];
        let mut expected: Vec<[u64; 4]> = Vec::new();
        for a in 0..2u32 {
            for b in 0..2u32 {
                let off = Vec3::new(a as f64 * dims.x, b as f64 * dims.y, 0.0);
                for &id in brick_zmin {
                    let s = &brick.spheres[id as usize];
                    let c = s.center + off;
                    expected.push([c.x.to_bits(), c.y.to_bits(), c.z.to_bits(), s.radius.to_bits()]);
                }
            }
        }
        expected.sort_unstable();
        expected.dedup(); // shared edge/corner spheres coincide between copies
        let mut got: Vec<[u64; 4]> = tiled.boundary.as_ref().unwrap()[Face::ZMin.index()]
            .iter()
            .map(|&id| {
                let s = &tiled.spheres[id as usize];
                [s.center.x.to_bits(), s.center.y.to_bits(), s.center.z.to_bits(), s.radius.to_bits()]
            })
            .collect();
        got.sort_unstable();
        assert_eq!(expected, got);
    }

    #[test]
    fn interior_is_not_mirror_symmetric() {
        let brick = smoke_brick();
        let dims = brick.domain_dims();
        let interior: Vec<_> = brick
            .spheres
            .iter()
            .filter(|s| (0..3).all(|a| s.center[a] > 0.0 && s.center[a] < dims[a]))
            .collect();
        assert!(!interior.is_empty());
        let positions: std::collections::HashSet<[u64; 3]> = interior
            .iter()
            .map(|s| [s.center.x.to_bits(), s.center.y.to_bits(), s.center.z.to_bits()])
            .collect();
        let mirrored_differs = interior.iter().any(|s| {
            let m = [
                (dims.x - s.center.x).to_bits(),
                s.center.y.to_bits(),
                s.center.z.to_bits(),
            ];
            !positions.contains(&m)
        });
        assert!(mirrored_differs, "interior unexpectedly mirror symmetric");
    }

    #[test]
    fn asymmetric_brick_is_rejected_by_copy_tiling() {
        let mut brick = smoke_brick();
        // push one face sphere off its plane
        let id = brick.boundary.as_ref().unwrap()[Face::XMin.index()]
            .iter()
            .copied()
            .find(|&id| {
                let c = brick.spheres[id as usize].center;
                c.y > 0.0 && c.z > 0.0 // not shared with an edge
            })
            .unwrap();
        brick.spheres[id as usize].center.x += 0.5;
        assert!(matches!(
            tile_by_copy(&brick, [2, 1, 1]),
            Err(PackError::FaceSymmetry(_))
        ));
    }

    #[test]
    fn identity_tiling_reproduces_the_brick() {
        let brick = smoke_brick();
        let tiled = tile_by_copy(&brick, [1, 1, 1]).unwrap();
        assert_eq!(tiled.spheres, brick.spheres);
        assert_eq!(tiled.contacts, brick.contacts);
        assert_eq!(tiled.boundary, brick.boundary);
    }
}
