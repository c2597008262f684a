//! Placement solvers: the position of a new sphere mutually tangent to three
//! parent spheres (three-distance system), and the planar variant where one
//! sphere equation is replaced by a fixed coordinate.

use thiserror::Error;

use super::Sphere;
use crate::vec3::Vec3;

/// Discriminant within this fraction of the frame scale collapses the two
/// mirror roots into a single tangent solution.
const DISC_REL_TOL: f64 = 1e-9;

/// Parent configurations flatter than this (relative to their span) are
/// rejected as degenerate; the frame would amplify rounding beyond the
/// 1e-9 residual contract.
const COLLINEAR_REL_TOL: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum TrilaterationError {
    #[error("parent centers are coincident or collinear")]
    DegenerateParents,
}

/// Solve `|x - c_i| = new_radius + R_i` for the three parents.
///
/// Returns all real solutions: two generically (mirror pair across the
/// parents' plane, the positive side of `(p2-p1) x (p3-p1)` first), one at
/// tangency, none when the configuration is infeasible.
pub fn solve_contact_position(
    parents: &[Sphere; 3],
    new_radius: f64,
) -> Result<Vec<Vec3>, TrilaterationError> {
    let p1 = parents[0].center;
    let p2 = parents[1].center;
    let p3 = parents[2].center;
    let rho1 = parents[0].radius + new_radius;
    let rho2 = parents[1].radius + new_radius;
    let rho3 = parents[2].radius + new_radius;

    let p21 = p2 - p1;
    let p31 = p3 - p1;
    let d = p21.norm();
    let span = d.max(p31.norm()).max(rho1);
    if !(d > COLLINEAR_REL_TOL * span) {
        return Err(TrilaterationError::DegenerateParents);
    }
    let ex = p21 / d;
    let i = ex.dot(p31);
    let in_plane = p31 - ex * i;
    let j = in_plane.norm();
    if !(j > COLLINEAR_REL_TOL * span) {
        return Err(TrilaterationError::DegenerateParents);
    }
    let ey = in_plane / j;
    let ez = ex.cross(ey);

    // Local frame coordinates of the solution.
    let x = (d * d + rho1 * rho1 - rho2 * rho2) / (2.0 * d);
    let y = (rho1 * rho1 - rho3 * rho3 + i * i + j * j - 2.0 * i * x) / (2.0 * j);
    let z2 = rho1 * rho1 - x * x - y * y;

    let base = p1 + ex * x + ey * y;
    let tol = DISC_REL_TOL * rho1 * rho1;
    if z2 > tol {
        let z = z2.sqrt();
        Ok(vec![base + ez * z, base - ez * z])
    } else if z2 >= -tol {
        Ok(vec![base])
    } else {
        Ok(Vec::new())
    }
}

/// Solve for a new sphere in contact with two parents while its center is
/// pinned to `axis_coord` along `axis` (used for filling brick faces: the
/// pinned coordinate is either the face plane itself or one radius inside).
///
/// Returns 0..2 candidates; degenerate parent pairs yield no candidates.
pub fn solve_contact_in_plane(
    a: &Sphere,
    b: &Sphere,
    new_radius: f64,
    axis: usize,
    axis_coord: f64,
) -> Vec<Vec3> {
    // In-plane reach of each parent: the slice of its contact sphere cut by
    // the placement plane.
    let rho_a2 = {
        let rho = a.radius + new_radius;
        let h = a.center[axis] - axis_coord;
        rho * rho - h * h
    };
    let rho_b2 = {
        let rho = b.radius + new_radius;
        let h = b.center[axis] - axis_coord;
        rho * rho - h * h
    };
    if rho_a2 <= 0.0 || rho_b2 <= 0.0 {
        return Vec::new();
    }

    let (u_axis, v_axis) = match axis {
        0 => (1, 2),
        1 => (0, 2),
        2 => (0, 1),
        _ => panic!("axis out of range: {axis}"),
    };
    let au = a.center[u_axis];
    let av = a.center[v_axis];
    let du = b.center[u_axis] - au;
    let dv = b.center[v_axis] - av;
    let d2 = (du * du + dv * dv).sqrt();
    if !(d2 > COLLINEAR_REL_TOL * (rho_a2.sqrt() + d2)) {
        return Vec::new();
    }
    let x = (d2 * d2 + rho_a2 - rho_b2) / (2.0 * d2);
    let h2 = rho_a2 - x * x;

    let (eu, ev) = (du / d2, dv / d2);
    // CCW perpendicular; determines the deterministic candidate order.
    let (pu, pv) = (-ev, eu);
    let point = |t: f64| {
        Vec3::ZERO
            .with_axis(u_axis, au + eu * x + pu * t)
            .with_axis(v_axis, av + ev * x + pv * t)
            .with_axis(axis, axis_coord)
    };

    let tol = DISC_REL_TOL * rho_a2;
    if h2 > tol {
        let h = h2.sqrt();
        vec![point(h), point(-h)]
    } else if h2 >= -tol {
        vec![point(0.0)]
    } else {
        Vec::new()
    }
}
