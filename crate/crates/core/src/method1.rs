//! First packing method: every sphere stays strictly inside the unit brick,
//! with boundary spheres tangent to the faces. Corners are seeded with
//! mean-radius spheres, each of the 12 edges carries its own random chain,
//! each of the 6 faces its own random tangent layer, then the volume fills
//! against parent triplets. Larger domains are assembled by reflecting the
//! brick about its face planes so face spheres touch their mirror images.

use std::collections::BTreeSet;

use rand_chacha::ChaCha8Rng;

use crate::fill::{add_interface_contacts, finish_brick, BoundaryStyle, Filler};
use crate::geometry::Sphere;
use crate::packing::{
    build_boundary_lists, BoundaryRule, DomainSpec, Face, Method, PackError, Packing,
};
use crate::vec3::Vec3;

/// Fill one unit brick. A goal shortfall comes back as
/// [`PackError::GoalsNotReached`] carrying the partial packing.
pub fn fill_unit_brick_m1(
    spec: &DomainSpec,
    rng: &mut ChaCha8Rng,
) -> Result<Packing, PackError> {
    let mut filler = Filler::new(
        spec.brick_lengths,
        spec.contact,
        &spec.distribution,
        BoundaryStyle::Inside,
        Method::M1.face_area_mode(),
        Vec::new(),
        [0.0; 6],
    );
    filler.place_corners();
    for axis in 0..3 {
        let (t1, t2) = transverse_axes(axis);
        for at_max1 in [false, true] {
            for at_max2 in [false, true] {
                filler.walk_edge(
                    axis,
                    [(t1, at_max1), (t2, at_max2)],
                    &[],
                    &spec.distribution,
                    rng,
                );
            }
        }
    }
    for face in Face::ALL {
        filler.fill_face(face, None, spec.face_goal, &spec.distribution, rng);
    }
    let body_met = filler.fill_interior(spec.body_goal, &spec.distribution, rng);
    let faces_met = Face::ALL.iter().all(|&f| filler.face_fraction(f) >= spec.face_goal);
    finish_brick(
        filler,
        Method::M1,
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

/// Mirror-tile the brick into an m x n x p domain. Brick (a, b, c) is the
/// source reflected a times in x, b in y, c in z; coordinates come from
/// symmetry transforms only, so every intra-brick gap is preserved
/// bit-exactly (all inputs live on the coordinate grid).
pub fn tile_by_reflection(brick: &Packing, brick_numbers: [u32; 3]) -> Packing {
    let lengths = Vec3::from_array(brick.meta.brick_lengths);
    let n_brick = brick.spheres.len() as u32;
    let count: u32 = brick_numbers.iter().product();
    let mut spheres = Vec::with_capacity((n_brick * count) as usize);
    let mut contacts: BTreeSet<(u32, u32)> = BTreeSet::new();
    for a in 0..brick_numbers[0] {
        for b in 0..brick_numbers[1] {
            for c in 0..brick_numbers[2] {
                let base = spheres.len() as u32;
                for s in &brick.spheres {
                    let center = Vec3::new(
                        reflect_coord(s.center.x, a, lengths.x),
                        reflect_coord(s.center.y, b, lengths.y),
                        reflect_coord(s.center.z, c, lengths.z),
                    );
                    spheres.push(Sphere::new(center, s.radius));
                }
                for &(i, j) in &brick.contacts {
                    contacts.insert((base + i, base + j));
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

    let boundary = build_boundary_lists(&spheres, dims, BoundaryRule::Tangent, contact_dist);
    let mut meta = brick.meta.clone();
    meta.brick_numbers = brick_numbers;
    meta.domain_lengths = dims.to_array();
    meta.unit_brick_spheres = n_brick;
    let mut packing = Packing {
        spheres,
        contacts: contacts.into_iter().collect(),
        boundary: Some(boundary),
        meta,
    };
    packing.recompute_achieved();
    packing
}

/// Coordinate of the image of `x` in brick index `k` along an axis of
/// length `len`: even indices translate, odd indices mirror.
fn reflect_coord(x: f64, k: u32, len: f64) -> f64 {
    if k % 2 == 0 {
        k as f64 * len + x
    } else {
        (k + 1) as f64 * len - x
    }
}

/// Fill the unit brick and tile it per the spec. Goal shortfalls are
/// reported through `meta.goals_met` on the returned packing.
pub fn generate(spec: &DomainSpec) -> Result<Packing, PackError> {
    let mut rng = spec.seed.rng();
    let (brick, goals_met) = match fill_unit_brick_m1(spec, &mut rng) {
        Ok(p) => (p, true),
        Err(PackError::GoalsNotReached { packing, .. }) => (*packing, false),
        Err(e) => return Err(e),
    };
    let mut total = tile_by_reflection(&brick, spec.brick_numbers);
    total.meta.goals_met = goals_met;
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{RadiusDistribution, RngSeed};
    use crate::geometry::gap;

    pub(crate) fn smoke_spec(numbers: [u32; 3]) -> DomainSpec {
        let dist = RadiusDistribution::weibull(15.7, 3.55).unwrap();
        let side = 8.0 * dist.mean();
        DomainSpec::new(
            [side, side, side],
            numbers,
            0.6,
            0.45,
            0.2,
            0.5,
            dist,
            RngSeed(0),
        )
        .unwrap()
    }

    fn smoke_brick() -> Packing {
        let spec = smoke_spec([1, 1, 1]);
        let mut rng = spec.seed.rng();
        fill_unit_brick_m1(&spec, &mut rng).expect("smoke goals are reachable")
    }

    #[test]
    fn corner_spheres_sit_exactly_at_their_offsets() {
        let brick = smoke_brick();
        let dims = brick.domain_dims();
        // the first 8 spheres are the corners; each coordinate equals the
        // radius offset from its corner exactly
        for s in &brick.spheres[..8] {
            for axis in 0..3 {
                let c = s.center[axis];
                assert!(c == s.radius || c == dims[axis] - s.radius);
            }
            assert!((s.radius - brick.meta.mean_radius).abs() < 1e-6);
        }
    }

    #[test]
    fn every_sphere_is_fully_inside_the_brick() {
        let brick = smoke_brick();
        let dims = brick.domain_dims();
        for s in &brick.spheres {
            for axis in 0..3 {
                assert!(s.center[axis] >= s.radius && s.center[axis] <= dims[axis] - s.radius);
            }
        }
    }

    #[test]
    fn goals_are_met_on_the_smoke_brick() {
        let brick = smoke_brick();
        assert!(brick.meta.goals_met);
        assert!(brick.meta.achieved_body_fraction >= 0.45);
        for f in brick.meta.achieved_face_fractions {
            assert!(f >= 0.6, "face fraction {f}");
        }
    }

    #[test]
    fn identity_tiling_reproduces_the_brick() {
        let brick = smoke_brick();
        let tiled = tile_by_reflection(&brick, [1, 1, 1]);
        assert_eq!(tiled.spheres, brick.spheres);
        assert_eq!(tiled.contacts, brick.contacts);
        assert_eq!(tiled.boundary, brick.boundary);
    }

    #[test]
    fn mirror_formula_for_odd_bricks() {
        // sphere at x in a brick of length L lands at 2L - x in brick 1
        let l = 100.0;
        assert_eq!(reflect_coord(37.5, 1, l), 2.0 * l - 37.5);
        assert_eq!(reflect_coord(37.5, 2, l), 2.0 * l + 37.5);
    }

    #[test]
    fn tiling_preserves_radii_and_gaps_exactly() {
        let brick = smoke_brick();
        let tiled = tile_by_reflection(&brick, [2, 2, 1]);
        let n = brick.spheres.len();
        assert_eq!(tiled.spheres.len(), 4 * n);
        for (i, s) in tiled.spheres.iter().enumerate() {
            assert_eq!(s.radius, brick.spheres[i % n].radius);
        }
        // isometry: image gaps equal source gaps bit-for-bit
        for image in 0..4 {
            let base = image * n;
            for i in (0..n).step_by(7) {
                for j in (i + 1..n).step_by(11) {
                    let src = gap(&brick.spheres[i], &brick.spheres[j]);
                    let img = gap(&tiled.spheres[base + i], &tiled.spheres[base + j]);
                    assert_eq!(src, img, "gap changed under reflection");
                }
            }
        }
    }

    #[test]
    fn face_spheres_gain_mirror_contacts() {
        let brick = smoke_brick();
        let spec = smoke_spec([2, 1, 1]);
        let tiled = tile_by_reflection(&brick, spec.brick_numbers);
        let n = brick.spheres.len() as u32;
        let dims = brick.domain_dims();
        let contact_dist = brick.meta.epsilon * brick.meta.mean_radius;
        let pairs: std::collections::HashSet<(u32, u32)> =
            tiled.contacts.iter().copied().collect();
        // spheres exactly tangent to the shared x-max plane touch their image
        let mut checked = 0;
        for (id, s) in brick.spheres.iter().enumerate() {
            if (dims.x - s.center.x - s.radius).abs() < 1e-9 {
                let image = n + id as u32;
                let key = (id as u32, image);
                assert!(pairs.contains(&key), "missing mirror contact for {id}");
                let g = gap(&tiled.spheres[id], &tiled.spheres[image as usize]);
                assert!(g.abs() <= contact_dist && g <= 0.0, "mirror gap {g}");
                checked += 1;
            }
        }
        assert!(checked > 3, "expected several exact face spheres, got {checked}");
    }
}
