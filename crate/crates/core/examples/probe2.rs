use packbed::distributions::{RadiusDistribution, RngSeed};
use packbed::method1;
use packbed::packing::{DomainSpec, PackError};

fn main() {
    let dist = RadiusDistribution::weibull(15.7, 3.55).unwrap();
    let rbar = dist.mean();
    let side = 15.0 * rbar;
    let spec = DomainSpec::new([side; 3], [1, 1, 1], 0.8, 0.55, 0.2, 0.5, dist, RngSeed(0)).unwrap();
    let mut rng = spec.seed.rng();
    let p = match method1::fill_unit_brick_m1(&spec, &mut rng) {
        Ok(p) => p,
        Err(PackError::GoalsNotReached { packing, .. }) => *packing,
        Err(e) => panic!("{e}"),
    };
    // phase boundaries: corners are ids 0..8; edges/faces/interior unknown.
    // classify by geometry instead: face-tangent (2+ walls), 1 wall, interior.
    let dims = p.domain_dims();
    let mut groups: [Vec<f64>; 4] = Default::default();
    for s in &p.spheres {
        let mut walls = 0;
        for axis in 0..3 {
            let d = (s.center[axis] - s.radius).min(dims[axis] - s.center[axis] - s.radius);
            if d.abs() < 1e-6 { walls += 1; }
        }
        groups[walls.min(3)].push(s.radius);
    }
    for (w, g) in groups.iter().enumerate() {
        if g.is_empty() { continue; }
        let mean: f64 = g.iter().sum::<f64>() / g.len() as f64;
        println!("walls={w}: n={} mean={:.3} ({:.3} of rbar)", g.len(), mean, mean / rbar);
    }
    // quartiles of interior
    let mut interior = groups[0].clone();
    interior.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q = |p: f64| interior[(p * (interior.len() - 1) as f64) as usize];
    println!("interior quartiles: {:.2} {:.2} {:.2}; analytic median {:.2}", q(0.25), q(0.5), q(0.75), dist.quantile(0.5));
}
