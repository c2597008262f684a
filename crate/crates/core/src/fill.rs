//! Shared brick-fill machinery: the mutable fill state (spheres, grid,
//! contact graph, parent bookkeeping, goal accounting) and the corner /
//! edge / face / interior placement phases the packing methods compose.

use std::collections::{BTreeSet, HashSet};

use rand::Rng;

use crate::distributions::RadiusDistribution;
use crate::geometry::{
    gap, snap, solve_contact_in_plane, solve_contact_position, ContactParams, SpatialGrid, Sphere,
};
use crate::packing::{
    face_plane_distance, projected_disk_area, sphere_box_volume, BoundaryRule, Face, FaceAreaMode,
};
use crate::vec3::Vec3;

/// Consecutive rejected radius draws that end a fill phase.
pub const PHASE_FAILURE_CAP: u32 = 2000;
/// Consecutive rejected draws that end an edge walk. Kept small: at a
/// blocked chain end every draw small enough to squeeze in still succeeds,
/// and a patient budget floods the edge with micro-spheres, visibly skewing
/// the realized radius distribution.
const EDGE_RETRY_CAP: u32 = 50;
/// Hard safety bound on solver calls per drawn radius. Placement scans are
/// otherwise exhaustive over live anchors: a radius is discarded only once
/// it fits nowhere, which keeps the realized distribution close to the
/// drawn one.
const HARD_TRIPLET_CAP: u32 = 2_000_000;
/// Consecutive draws an anchor can fail to place before it retires. An
/// anchor failing this persistently is buried in a saturated region;
/// retiring it keeps the exhaustive scans affordable.
const ANCHOR_PRUNE_AT: u32 = 200;

/// Whether boundary spheres sit inside the brick tangent to its faces, or
/// with their centers on the faces/edges/corners themselves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryStyle {
    Inside,
    OnBoundary,
}

impl BoundaryStyle {
    fn rule(self) -> BoundaryRule {
        match self {
            BoundaryStyle::Inside => BoundaryRule::Tangent,
            BoundaryStyle::OnBoundary => BoundaryRule::Centered,
        }
    }
}

/// Draw a radius, snapped onto the coordinate grid (zero rounds are redrawn).
pub fn draw_radius<R: Rng>(dist: &RadiusDistribution, rng: &mut R) -> f64 {
    loop {
        let r = snap(dist.sample(rng));
        if r > 0.0 {
            return r;
        }
    }
}

pub struct Filler {
    pub spheres: Vec<Sphere>,
    pub contacts: BTreeSet<(u32, u32)>,
    grid: SpatialGrid,
    /// delta-neighbor ids per sphere, ascending (id order is placement order)
    neighbors: Vec<Vec<u32>>,
    anchor_fails: Vec<u32>,
    pub params: ContactParams,
    pub dims: Vec3,
    style: BoundaryStyle,
    face_mode: FaceAreaMode,
    /// exclusion volumes placements must stay outside of
    voids: Vec<Sphere>,
    /// area each carved void removes from its face, by face index
    face_void_areas: [f64; 6],
    domain_volume: f64,
    body_volume: f64,
    face_areas: [f64; 6],
    corner_radius: f64,
}

impl Filler {
    pub fn new(
        dims: Vec3,
        params: ContactParams,
        dist: &RadiusDistribution,
        style: BoundaryStyle,
        face_mode: FaceAreaMode,
        voids: Vec<Sphere>,
        face_void_areas: [f64; 6],
    ) -> Self {
        let cell = 2.0 * dist.quantile(0.999);
        // Pad the index bounds so protruding boundary spheres always fit.
        let pad = 0.5 * dims.x.max(dims.y).max(dims.z) + cell;
        let grid =
            SpatialGrid::new(Vec3::new(-pad, -pad, -pad), dims + Vec3::new(pad, pad, pad), cell);
        let mut domain_volume = dims.x * dims.y * dims.z;
        for v in &voids {
            domain_volume -= 2.0 * std::f64::consts::PI / 3.0 * v.radius.powi(3);
        }
        Filler {
            spheres: Vec::new(),
            contacts: BTreeSet::new(),
            grid,
            neighbors: Vec::new(),
            anchor_fails: Vec::new(),
            params,
            dims,
            style,
            face_mode,
            voids,
            face_void_areas,
            domain_volume,
            body_volume: 0.0,
            face_areas: [0.0; 6],
            corner_radius: snap(params.mean_radius),
        }
    }

    pub fn corner_radius(&self) -> f64 {
        self.corner_radius
    }

    pub fn body_fraction(&self) -> f64 {
        self.body_volume / self.domain_volume
    }

    pub fn face_fraction(&self, face: Face) -> f64 {
        let (u, v) = face.tangent_axes();
        let denom = self.dims[u] * self.dims[v] - self.face_void_areas[face.index()];
        self.face_areas[face.index()] / denom
    }

    pub fn face_fractions(&self) -> [f64; 6] {
        let mut out = [0.0; 6];
        for face in Face::ALL {
            out[face.index()] = self.face_fraction(face);
        }
        out
    }

    /// Fully inside the brick and clear of every void.
    fn contains_interior(&self, center: Vec3, radius: f64) -> bool {
        for axis in 0..3 {
            if center[axis] < radius || center[axis] > self.dims[axis] - radius {
                return false;
            }
        }
        self.voids_ok(center, radius)
    }

    /// Outside every void, tangency within the contact tolerance allowed.
    fn voids_ok(&self, center: Vec3, radius: f64) -> bool {
        let tol = self.params.contact_dist();
        self.voids.iter().all(|v| center.dist(v.center) >= v.radius + radius - tol)
    }

    /// No existing sphere overlapped deeper than the contact tolerance.
    fn overlap_ok(&self, s: &Sphere) -> bool {
        let limit = -self.params.contact_dist();
        self.grid.query(s, 0.0).iter().all(|&o| gap(s, &self.spheres[o as usize]) >= limit)
    }

    fn commit(&mut self, s: Sphere) -> u32 {
        let id = self.spheres.len() as u32;
        let parent_dist = self.params.parent_dist();
        let contact_dist = self.params.contact_dist();
        let mut nbrs = Vec::new();
        for o in self.grid.query(&s, parent_dist) {
            let g = gap(&s, &self.spheres[o as usize]);
            if g <= parent_dist {
                self.neighbors[o as usize].push(id);
                nbrs.push(o);
            }
            if g.abs() <= contact_dist {
                self.contacts.insert((o, id));
            }
        }
        self.grid.insert(id, &s).expect("committed spheres lie inside the padded grid bounds");
        self.spheres.push(s);
        self.neighbors.push(nbrs);
        self.anchor_fails.push(0);
        self.body_volume += sphere_box_volume(&s, self.dims);
        let rule = self.style.rule();
        for face in Face::ALL {
            if rule.qualifies(&s, face, self.dims, contact_dist) {
                self.face_areas[face.index()] +=
                    projected_disk_area(&s, face, self.dims, self.face_mode);
            }
        }
        id
    }

    /// Place one sphere of mean radius per brick corner. Corners blocked by a
    /// void (possible only for oversized voids) are skipped.
    pub fn place_corners(&mut self) {
        let rc = self.corner_radius;
        let offset = match self.style {
            BoundaryStyle::Inside => rc,
            BoundaryStyle::OnBoundary => 0.0,
        };
        for ix in 0..2 {
            for iy in 0..2 {
                for iz in 0..2 {
                    let coord = |i: usize, axis: usize| {
                        if i == 0 {
                            offset
                        } else {
                            self.dims[axis] - offset
                        }
                    };
                    let c = Vec3::new(coord(ix, 0), coord(iy, 1), coord(iz, 2));
                    let s = Sphere::new(c, rc);
                    if self.voids_ok(c, rc) && self.overlap_ok(&s) {
                        self.commit(s);
                    }
                }
            }
        }
    }

    /// Walk one edge with a chain of mutually tangent spheres. `walls` names
    /// the min/max side for the two transverse axes; `extra_offsets`
    /// replicates every accepted sphere onto parallel edges.
    pub fn walk_edge<R: Rng>(
        &mut self,
        axis: usize,
        walls: [(usize, bool); 2],
        extra_offsets: &[Vec3],
        dist: &RadiusDistribution,
        rng: &mut R,
    ) {
        let len = self.dims[axis];
        let rc = self.corner_radius;
        let dims = self.dims;
        let style = self.style;
        let transverse = move |r: f64, (t_axis, at_max): (usize, bool)| match style {
            BoundaryStyle::Inside => {
                if at_max {
                    dims[t_axis] - r
                } else {
                    r
                }
            }
            BoundaryStyle::OnBoundary => {
                if at_max {
                    dims[t_axis]
                } else {
                    0.0
                }
            }
        };
        let start_t = match self.style {
            BoundaryStyle::Inside => rc,
            BoundaryStyle::OnBoundary => 0.0,
        };
        let far_t = len - start_t;
        let far_corner = Sphere::new(
            Vec3::ZERO
                .with_axis(axis, far_t)
                .with_axis(walls[0].0, transverse(rc, walls[0]))
                .with_axis(walls[1].0, transverse(rc, walls[1])),
            rc,
        );

        let mut prev_t = start_t;
        let mut prev_r = rc;
        let mut fails = 0;
        while fails < EDGE_RETRY_CAP {
            let r = draw_radius(dist, rng);
            let step = match self.style {
                BoundaryStyle::Inside => {
                    // tangency with the previous chain sphere, both tangent
                    // to the two incident faces
                    let d1 = transverse(r, walls[0]) - transverse(prev_r, walls[0]);
                    let d2 = transverse(r, walls[1]) - transverse(prev_r, walls[1]);
                    let disc = (prev_r + r) * (prev_r + r) - d1 * d1 - d2 * d2;
                    if disc <= 0.0 {
                        fails += 1;
                        continue;
                    }
                    disc.sqrt()
                }
                BoundaryStyle::OnBoundary => prev_r + r,
            };
            let t = snap(prev_t + step);
            let center = Vec3::ZERO
                .with_axis(axis, t)
                .with_axis(walls[0].0, transverse(r, walls[0]))
                .with_axis(walls[1].0, transverse(r, walls[1]));
            let s = Sphere::new(center, r);
            let inside_along_axis = match self.style {
                BoundaryStyle::Inside => t <= len - r,
                BoundaryStyle::OnBoundary => t <= len,
            };
            let placeable = inside_along_axis
                && gap(&s, &far_corner) >= -self.params.contact_dist()
                && self.voids_ok(center, r)
                && self.overlap_ok(&s)
                && extra_offsets.iter().all(|&off| {
                    let inst = Sphere::new(center + off, r);
                    self.voids_ok(inst.center, r) && self.overlap_ok(&inst)
                });
            if placeable {
                self.commit(s);
                for &off in extra_offsets {
                    self.commit(Sphere::new(center + off, r));
                }
                prev_t = t;
                prev_r = r;
                fails = 0;
            } else {
                fails += 1;
            }
        }
    }

    /// Fill one face with spheres placed against pairs of nearby parents
    /// until its coverage goal is met or placements stop succeeding.
    /// `opposite_offset` replicates every accepted sphere onto the opposite
    /// face.
    pub fn fill_face<R: Rng>(
        &mut self,
        face: Face,
        opposite_offset: Option<Vec3>,
        goal: f64,
        dist: &RadiusDistribution,
        rng: &mut R,
    ) {
        let parent_dist = self.params.parent_dist();
        let mut cands: Vec<u32> = (0..self.spheres.len() as u32)
            .filter(|&id| {
                let s = &self.spheres[id as usize];
                face_plane_distance(s.center, face, self.dims) - s.radius <= parent_dist
            })
            .collect();
        let mut cand_set: HashSet<u32> = cands.iter().copied().collect();
        let mut local_fails = vec![0u32; self.spheres.len()];

        let mut fails = 0;
        while fails < PHASE_FAILURE_CAP && self.face_fraction(face) < goal {
            let r = draw_radius(dist, rng);
            match self.try_place_on_face(face, r, opposite_offset, &cands, &cand_set, &mut local_fails)
            {
                Some(id) => {
                    cands.push(id);
                    cand_set.insert(id);
                    fails = 0;
                }
                None => fails += 1,
            }
        }
    }

    fn try_place_on_face(
        &mut self,
        face: Face,
        r: f64,
        opposite_offset: Option<Vec3>,
        cands: &[u32],
        cand_set: &HashSet<u32>,
        local_fails: &mut Vec<u32>,
    ) -> Option<u32> {
        let axis = face.axis();
        let plane = face.plane_coord(self.dims);
        let axis_coord = match self.style {
            BoundaryStyle::Inside => {
                if face.is_min() {
                    plane + r
                } else {
                    plane - r
                }
            }
            BoundaryStyle::OnBoundary => plane,
        };
        let mut tried: u32 = 0;
        let mut visited: Vec<u32> = Vec::new();
        let mut winner: Option<(u32, Sphere)> = None;
        'anchors: for &a in cands.iter().rev() {
            if local_fails[a as usize] >= ANCHOR_PRUNE_AT {
                continue;
            }
            let sa = self.spheres[a as usize];
            for k in (0..self.neighbors[a as usize].len()).rev() {
                let b = self.neighbors[a as usize][k];
                if b >= a || !cand_set.contains(&b) {
                    continue;
                }
                tried += 1;
                if tried > HARD_TRIPLET_CAP {
                    break 'anchors;
                }
                let sb = self.spheres[b as usize];
                for pos in solve_contact_in_plane(&sa, &sb, r, axis, axis_coord) {
                    // the pinned coordinate is already on-grid; snap the rest
                    let c = Vec3::new(snap(pos.x), snap(pos.y), snap(pos.z));
                    if self.face_candidate_ok(c, r, axis) {
                        let s = Sphere::new(c, r);
                        let instances_ok = self.overlap_ok(&s)
                            && opposite_offset
                                .map_or(true, |off| self.overlap_ok(&Sphere::new(c + off, r)));
                        if instances_ok {
                            winner = Some((a, s));
                            break 'anchors;
                        }
                    }
                }
            }
            visited.push(a);
        }
        for a in visited {
            local_fails[a as usize] = local_fails[a as usize].saturating_add(1);
        }
        match winner {
            Some((a, s)) => {
                local_fails[a as usize] = 0;
                let id = self.commit(s);
                if let Some(off) = opposite_offset {
                    self.commit(Sphere::new(s.center + off, s.radius));
                }
                local_fails.resize(self.spheres.len(), 0);
                Some(id)
            }
            None => None,
        }
    }

    /// Containment for a face placement: the in-plane footprint must stay
    /// within the face rectangle, voids must be respected, and tangent-style
    /// placements stay inside along the pinned axis.
    fn face_candidate_ok(&self, c: Vec3, r: f64, pinned_axis: usize) -> bool {
        for axis in 0..3 {
            if axis == pinned_axis {
                continue;
            }
            if c[axis] < r || c[axis] > self.dims[axis] - r {
                return false;
            }
        }
        if self.style == BoundaryStyle::Inside
            && (c[pinned_axis] < r || c[pinned_axis] > self.dims[pinned_axis] - r)
        {
            return false;
        }
        self.voids_ok(c, r)
    }

    /// Ring spheres on a carved face, tangent to the face plane and to the
    /// void surface (the void acts as the second parent).
    pub fn fill_face_void_ring<R: Rng>(
        &mut self,
        face: Face,
        void: Sphere,
        dist: &RadiusDistribution,
        rng: &mut R,
    ) {
        let axis = face.axis();
        let plane = face.plane_coord(self.dims);
        let parent_dist = self.params.parent_dist();
        let mut cands: Vec<u32> = (0..self.spheres.len() as u32)
            .filter(|&id| {
                let s = &self.spheres[id as usize];
                face_plane_distance(s.center, face, self.dims) - s.radius <= parent_dist
            })
            .collect();
        let mut fails = 0;
        while fails < PHASE_FAILURE_CAP {
            let r = draw_radius(dist, rng);
            let axis_coord = if face.is_min() { plane + r } else { plane - r };
            let mut placed = None;
            let mut tried = 0;
            'outer: for &a in cands.iter().rev() {
                tried += 1;
                if tried > HARD_TRIPLET_CAP {
                    break;
                }
                let sa = self.spheres[a as usize];
                for pos in solve_contact_in_plane(&sa, &void, r, axis, axis_coord) {
                    let c = Vec3::new(snap(pos.x), snap(pos.y), snap(pos.z));
                    if self.face_candidate_ok(c, r, axis) {
                        let s = Sphere::new(c, r);
                        if self.overlap_ok(&s) {
                            placed = Some(self.commit(s));
                            break 'outer;
                        }
                    }
                }
            }
            match placed {
                Some(id) => {
                    cands.push(id);
                    fails = 0;
                }
                None => fails += 1,
            }
        }
    }

    /// Spheres tangent to a void surface, each against two parents already
    /// near the surface.
    pub fn fill_void_surface<R: Rng>(
        &mut self,
        void: Sphere,
        dist: &RadiusDistribution,
        rng: &mut R,
    ) {
        let parent_dist = self.params.parent_dist();
        let near_void =
            |s: &Sphere| s.center.dist(void.center) - void.radius - s.radius <= parent_dist;
        let mut cands: Vec<u32> = (0..self.spheres.len() as u32)
            .filter(|&id| near_void(&self.spheres[id as usize]))
            .collect();
        let mut cand_set: HashSet<u32> = cands.iter().copied().collect();
        let mut local_fails = vec![0u32; self.spheres.len()];

        let mut fails = 0;
        while fails < PHASE_FAILURE_CAP {
            let r = draw_radius(dist, rng);
            let mut tried: u32 = 0;
            let mut visited: Vec<u32> = Vec::new();
            let mut winner: Option<(u32, Sphere)> = None;
            'anchors: for &a in cands.iter().rev() {
                if local_fails[a as usize] >= ANCHOR_PRUNE_AT {
                    continue;
                }
                for k in (0..self.neighbors[a as usize].len()).rev() {
                    let b = self.neighbors[a as usize][k];
                    if b >= a || !cand_set.contains(&b) {
                        continue;
                    }
                    tried += 1;
                    if tried > HARD_TRIPLET_CAP {
                        break 'anchors;
                    }
                    let parents = [void, self.spheres[a as usize], self.spheres[b as usize]];
                    let Ok(positions) = solve_contact_position(&parents, r) else {
                        continue;
                    };
                    for pos in positions {
                        let c = Vec3::new(snap(pos.x), snap(pos.y), snap(pos.z));
                        if self.contains_interior(c, r) {
                            let s = Sphere::new(c, r);
                            if self.overlap_ok(&s) {
                                winner = Some((a, s));
                                break 'anchors;
                            }
                        }
                    }
                }
                visited.push(a);
            }
            for a in visited {
                local_fails[a as usize] = local_fails[a as usize].saturating_add(1);
            }
            match winner {
                Some((a, s)) => {
                    local_fails[a as usize] = 0;
                    let id = self.commit(s);
                    local_fails.resize(self.spheres.len(), 0);
                    cands.push(id);
                    cand_set.insert(id);
                    fails = 0;
                }
                None => fails += 1,
            }
        }
    }

    /// Fill the brick volume against parent triplets until the body goal is
    /// met. Returns whether it was.
    pub fn fill_interior<R: Rng>(
        &mut self,
        body_goal: f64,
        dist: &RadiusDistribution,
        rng: &mut R,
    ) -> bool {
        let mut fails = 0;
        while fails < PHASE_FAILURE_CAP {
            if self.body_fraction() >= body_goal {
                return true;
            }
            let r = draw_radius(dist, rng);
            if self.try_place_interior(r) {
                fails = 0;
            } else {
                fails += 1;
            }
        }
        self.body_fraction() >= body_goal
    }

    /// One interior placement attempt: run through parent triplets, most
    /// recently placed spheres first, and accept the first solver candidate
    /// that fits. Anchors whose pockets reject the radius age toward
    /// retirement; the winning anchor is refreshed.
    fn try_place_interior(&mut self, r: f64) -> bool {
        let mut tried: u32 = 0;
        let mut visited: Vec<usize> = Vec::new();
        let mut winner: Option<(usize, Sphere)> = None;
        'anchors: for a in (0..self.spheres.len()).rev() {
            if self.anchor_fails[a] >= ANCHOR_PRUNE_AT {
                continue;
            }
            if self.neighbors[a].len() < 2 {
                continue;
            }
            let n = self.neighbors[a].len();
            for i in (1..n).rev() {
                for j in (0..i).rev() {
                    let (b, c) = (self.neighbors[a][i] as usize, self.neighbors[a][j] as usize);
                    tried += 1;
                    if tried > HARD_TRIPLET_CAP {
                        break 'anchors;
                    }
                    let parents = [self.spheres[a], self.spheres[b], self.spheres[c]];
                    let Ok(positions) = solve_contact_position(&parents, r) else {
                        continue;
                    };
                    for pos in positions {
                        let center = Vec3::new(snap(pos.x), snap(pos.y), snap(pos.z));
                        if self.contains_interior(center, r) {
                            let s = Sphere::new(center, r);
                            if self.overlap_ok(&s) {
                                winner = Some((a, s));
                                break 'anchors;
                            }
                        }
                    }
                }
            }
            visited.push(a);
        }
        for a in visited {
            self.anchor_fails[a] = self.anchor_fails[a].saturating_add(1);
        }
        match winner {
            Some((a, s)) => {
                self.anchor_fails[a] = 0;
                self.commit(s);
                true
            }
            None => false,
        }
    }
}

/// Package a finished brick fill, honoring the partial-result contract:
/// goal shortfalls surface as an error still carrying the packing.
pub fn finish_brick(
    filler: Filler,
    method: crate::packing::Method,
    distribution: RadiusDistribution,
    seed: u64,
    face_goal: f64,
    body_goal: f64,
    hemisphere_radii: Option<[f64; 2]>,
    goals_met: bool,
) -> Result<crate::packing::Packing, crate::packing::PackError> {
    use crate::packing::{build_boundary_lists, PackError, Packing, PackingMeta};

    let boundary = method.boundary_rule().map(|rule| {
        build_boundary_lists(&filler.spheres, filler.dims, rule, filler.params.contact_dist())
    });
    let n = filler.spheres.len() as u32;
    let meta = PackingMeta {
        method,
        distribution,
        seed,
        mean_radius: filler.params.mean_radius,
        epsilon: filler.params.epsilon,
        delta: filler.params.delta,
        face_goal,
        body_goal,
        brick_lengths: filler.dims.to_array(),
        brick_numbers: [1, 1, 1],
        domain_lengths: filler.dims.to_array(),
        hemisphere_radii,
        unit_brick_spheres: n,
        final_spheres: n,
        goals_met,
        achieved_body_fraction: filler.body_fraction(),
        achieved_face_fractions: filler.face_fractions(),
    };
    let mut packing = Packing {
        spheres: filler.spheres,
        contacts: filler.contacts.into_iter().collect(),
        boundary,
        meta,
    };
    packing.recompute_achieved();
    if goals_met {
        Ok(packing)
    } else {
        let achieved_body = packing.meta.achieved_body_fraction;
        let achieved_face =
            packing.meta.achieved_face_fractions.iter().copied().fold(f64::INFINITY, f64::min);
        Err(PackError::GoalsNotReached {
            packing: Box::new(packing),
            achieved_body,
            body_goal,
            achieved_face,
            face_goal,
        })
    }
}

/// Record every contact pair whose members sit within a slab around an
/// interface plane. Used after tiling to pick up cross-brick contacts.
pub fn add_interface_contacts(
    spheres: &[Sphere],
    contacts: &mut BTreeSet<(u32, u32)>,
    axis: usize,
    plane: f64,
    contact_dist: f64,
) {
    let r_max = spheres.iter().map(|s| s.radius).fold(0.0, f64::max);
    let half_width = 2.0 * r_max + contact_dist;
    let slab: Vec<u32> = (0..spheres.len() as u32)
        .filter(|&id| (spheres[id as usize].center[axis] - plane).abs() <= half_width)
        .collect();
    for (k, &i) in slab.iter().enumerate() {
        for &j in &slab[k + 1..] {
            if gap(&spheres[i as usize], &spheres[j as usize]).abs() <= contact_dist {
                contacts.insert((i.min(j), i.max(j)));
            }
        }
    }
}
