//! Independent packing validator: an O(N^2) recheck of every invariant a
//! packing promises, sharing none of the packers' spatial-index machinery.

use std::collections::HashSet;

use crate::packing::{BoundaryRule, Face, Method, Packing};

/// One finding per violated invariant, grouped by kind.
#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    /// (i, j, gap): pair overlapped deeper than the contact tolerance
    pub deep_overlaps: Vec<(u32, u32, f64)>,
    /// (i, j, gap): recorded contact outside the tolerance band
    pub false_contacts: Vec<(u32, u32, f64)>,
    /// (i, j, gap): pair within tolerance but absent from the contact list
    pub missing_contacts: Vec<(u32, u32, f64)>,
    /// (face index, id): listed sphere that does not qualify for the face
    pub boundary_extra: Vec<(usize, u32)>,
    /// (face index, id): qualifying sphere missing from the face list
    pub boundary_missing: Vec<(usize, u32)>,
    /// (id, void index, penetration depth beyond tolerance)
    pub void_violations: Vec<(u32, usize, f64)>,
    /// (id, worst excursion): sphere outside its allowed region
    pub containment_violations: Vec<(u32, f64)>,
    /// malformed contact rows: self pairs, duplicates, unordered, bad ids
    pub format_errors: Vec<String>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.total() == 0
    }

    pub fn total(&self) -> usize {
        self.deep_overlaps.len()
            + self.false_contacts.len()
            + self.missing_contacts.len()
            + self.boundary_extra.len()
            + self.boundary_missing.len()
            + self.void_violations.len()
            + self.containment_violations.len()
            + self.format_errors.len()
    }

    pub fn summary(&self) -> String {
        if self.is_clean() {
            return "clean: no violations".to_string();
        }
        format!(
            "{} violations: {} deep overlaps, {} false contacts, {} missing contacts, \
             {} boundary extras, {} boundary missing, {} void violations, \
             {} containment violations, {} format errors",
            self.total(),
            self.deep_overlaps.len(),
            self.false_contacts.len(),
            self.missing_contacts.len(),
            self.boundary_extra.len(),
            self.boundary_missing.len(),
            self.void_violations.len(),
            self.containment_violations.len(),
            self.format_errors.len(),
        )
    }
}

/// Brute-force recheck of the packing against its metadata: pairwise
/// overlap/contact invariants, boundary lists, void exclusion and
/// containment. Distances are recomputed from scratch here.
pub fn validate_packing(p: &Packing) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = p.spheres.len();
    let tol = p.meta.epsilon * p.meta.mean_radius;
    let dims = p.domain_dims();

    let mut recorded: HashSet<(u32, u32)> = HashSet::with_capacity(p.contacts.len());
    let mut previous: Option<(u32, u32)> = None;
    for &(i, j) in &p.contacts {
        if i >= j {
            report.format_errors.push(format!("contact ({i}, {j}) is not ordered i < j"));
            continue;
        }
        if j as usize >= n {
            report.format_errors.push(format!("contact ({i}, {j}) references missing sphere"));
            continue;
        }
        if !recorded.insert((i, j)) {
            report.format_errors.push(format!("duplicate contact ({i}, {j})"));
        }
        if let Some(prev) = previous {
            if prev > (i, j) {
                report.format_errors.push(format!("contact list unsorted at ({i}, {j})"));
            }
        }
        previous = Some((i, j));
    }

    // Pairwise scan with locally recomputed distances.
    for i in 0..n {
        let a = &p.spheres[i];
        for j in (i + 1)..n {
            let b = &p.spheres[j];
            let dx = a.center.x - b.center.x;
            let dy = a.center.y - b.center.y;
            let dz = a.center.z - b.center.z;
            let gap = (dx * dx + dy * dy + dz * dz).sqrt() - (a.radius + b.radius);
            let key = (i as u32, j as u32);
            let is_contact = gap.abs() <= tol;
            if gap < -tol {
                report.deep_overlaps.push((key.0, key.1, gap));
            }
            match (is_contact, recorded.contains(&key)) {
                (true, false) => report.missing_contacts.push((key.0, key.1, gap)),
                (false, true) => report.false_contacts.push((key.0, key.1, gap)),
                _ => {}
            }
        }
    }

    // Boundary lists, under the method's own qualification rule.
    if let (Some(rule), Some(boundary)) = (p.meta.method.boundary_rule(), &p.boundary) {
        for face in Face::ALL {
            let listed: HashSet<u32> = boundary[face.index()].iter().copied().collect();
            for (id, s) in p.spheres.iter().enumerate() {
                let qualifies = rule.qualifies(s, face, dims, tol);
                let in_list = listed.contains(&(id as u32));
                if qualifies && !in_list {
                    report.boundary_missing.push((face.index(), id as u32));
                } else if !qualifies && in_list {
                    report.boundary_extra.push((face.index(), id as u32));
                }
            }
        }
    }

    // Hemisphere voids: tangency within tolerance allowed, deeper is not.
    if let Some(radii) = p.meta.hemisphere_radii {
        let centers = [
            [0.0, dims.y / 2.0, dims.z / 2.0],
            [dims.x, dims.y / 2.0, dims.z / 2.0],
        ];
        for (v, (&h, c)) in radii.iter().zip(centers.iter()).enumerate() {
            if h <= 0.0 {
                continue;
            }
            for (id, s) in p.spheres.iter().enumerate() {
                let dx = s.center.x - c[0];
                let dy = s.center.y - c[1];
                let dz = s.center.z - c[2];
                let dist = (dx * dx + dy * dy + dz * dz).sqrt();
                let deficit = (h + s.radius - tol) - dist;
                if deficit > 0.0 {
                    report.void_violations.push((id as u32, v, deficit));
                }
            }
        }
    }

    // Containment: strictly inside for tangent-style packings, centers
    // within the box when boundary spheres sit on the faces.
    let centered_style = p.meta.method == Method::M2;
    for (id, s) in p.spheres.iter().enumerate() {
        let mut worst: f64 = 0.0;
        for axis in 0..3 {
            let c = s.center[axis];
            let (lo, hi) = if centered_style {
                (0.0, dims[axis])
            } else {
                (s.radius, dims[axis] - s.radius)
            };
            worst = worst.max(lo - c).max(c - hi);
        }
        if worst > crate::packing::PLANE_TOL {
            report.containment_violations.push((id as u32, worst));
        }
    }
    let _ = BoundaryRule::Tangent; // rule comes from metadata above

    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{RadiusDistribution, RngSeed};
    use crate::method1::fill_unit_brick_m1;
    use crate::packing::DomainSpec;
    use crate::vec3::Vec3;

    fn smoke_brick() -> Packing {
        let dist = RadiusDistribution::weibull(15.7, 3.55).unwrap();
        let side = 8.0 * dist.mean();
        let spec = DomainSpec::new(
            [side, side, side],
            [1, 1, 1],
            0.6,
            0.45,
            0.2,
            0.5,
            dist,
            RngSeed(1),
        )
        .unwrap();
        let mut rng = spec.seed.rng();
        fill_unit_brick_m1(&spec, &mut rng).expect("smoke goals are reachable")
    }

    #[test]
    fn fresh_packing_validates_clean() {
        let report = validate_packing(&smoke_brick());
        assert!(report.is_clean(), "{}", report.summary());
    }

    #[test]
    fn deleting_a_contact_yields_one_missing_finding() {
        let mut p = smoke_brick();
        p.contacts.remove(p.contacts.len() / 2);
        let report = validate_packing(&p);
        assert_eq!(report.missing_contacts.len(), 1);
        assert_eq!(report.deep_overlaps.len(), 0);
    }

    #[test]
    fn moving_a_sphere_into_another_yields_an_overlap_finding() {
        let mut p = smoke_brick();
        // shove one interior sphere one micrometre toward its first contact
        let &(i, j) = p
            .contacts
            .iter()
            .find(|&&(i, j)| {
                let dims = p.domain_dims();
                let s = &p.spheres[i as usize];
                let t = &p.spheres[j as usize];
                let inside = |s: &crate::geometry::Sphere| {
                    (0..3).all(|a| {
                        s.center[a] > s.radius + 2.0 && s.center[a] < dims[a] - s.radius - 2.0
                    })
                };
                inside(s) && inside(t)
            })
            .expect("some interior contact exists");
        let toward =
            (p.spheres[j as usize].center - p.spheres[i as usize].center).normalized();
        let moved = p.spheres[i as usize].center + toward * (1.0 + p.meta.epsilon * p.meta.mean_radius);
        p.spheres[i as usize].center = Vec3::new(moved.x, moved.y, moved.z);
        let report = validate_packing(&p);
        assert!(!report.deep_overlaps.is_empty());
    }

    #[test]
    fn corrupting_a_boundary_list_is_detected() {
        let mut p = smoke_brick();
        let boundary = p.boundary.as_mut().unwrap();
        // claim an interior sphere touches the x-min face
        let victim = *boundary[3].last().unwrap();
        boundary[0].push(victim);
        let report = validate_packing(&p);
        assert!(report.boundary_extra.iter().any(|&(f, id)| f == 0 && id == victim));
    }

    #[test]
    fn malformed_contact_rows_are_reported() {
        let mut p = smoke_brick();
        p.contacts.push((5, 5));
        let report = validate_packing(&p);
        assert!(!report.format_errors.is_empty());
    }
}
