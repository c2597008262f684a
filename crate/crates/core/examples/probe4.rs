use packbed::distributions::{RadiusDistribution, RngSeed};
use packbed::method2;
use packbed::packing::{DomainSpec, PackError};
use packbed::validate::validate_packing;
use std::time::Instant;

fn main() {
    let gamma = RadiusDistribution::gamma(7.0, 2.0).unwrap();
    let weibull = RadiusDistribution::weibull(15.7, 3.55).unwrap();
    for (label, dist, mult) in [("30rbar gamma", gamma, 30.0), ("15rbar weibull", weibull, 15.0)] {
        let side = mult * dist.mean();
        let spec = DomainSpec::new([side; 3], [1, 1, 1], 1.0, 0.9, 0.1, 0.5, dist, RngSeed(0)).unwrap();
        let t0 = Instant::now();
        let mut rng = spec.seed.rng();
        let (p, met) = match method2::fill_unit_brick_m2(&spec, &mut rng) {
            Ok(p) => (p, true),
            Err(PackError::GoalsNotReached { packing, .. }) => (*packing, false),
            Err(e) => panic!("{e}"),
        };
        let mean_r: f64 = p.spheres.iter().map(|s| s.radius).sum::<f64>() / p.spheres.len() as f64;
        println!(
            "{label}: N={} goals_met={met} body={:.3} faces={:?} mean={:.2} ({:.1?})",
            p.spheres.len(), p.meta.achieved_body_fraction,
            p.meta.achieved_face_fractions.map(|f| (f * 100.0).round() / 100.0),
            mean_r, t0.elapsed()
        );
        let rep = validate_packing(&p);
        println!("  validate: {}", rep.summary());
    }
}
