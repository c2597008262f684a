//! Geometry-based random sphere packing of parallelepiped ("brick") domains,
//! plus a discrete thermal model of laser-induced particle bonding on the
//! resulting contact graph.
//!
//! Two packing methods are provided. The first keeps all spheres strictly
//! inside the unit brick (boundary spheres tangent to the faces) and tiles a
//! larger domain by mirror reflection, so boundary spheres touch their images.
//! The second centers boundary spheres on the brick faces and replicates edge
//! and face patterns, which makes opposite faces identical and lets the brick
//! tile a larger domain by plain translation with shared-face spheres merged.
//! A third fill handles a brick with two hemispherical voids carved out of
//! opposite faces.
//!
//! All lengths are micrometres throughout; there is no unit conversion layer.

pub mod bonding;
pub mod config;
pub mod distributions;
pub mod geometry;
pub mod hemisphere;
pub mod io;
pub mod method1;
pub mod method2;
pub mod packing;
pub mod validate;
pub mod vec3;

mod fill;

pub use geometry::{gap, in_contact, ContactParams, Sphere};
pub use packing::{DomainSpec, Method, Packing, PackingMeta};
pub use vec3::Vec3;
