use packbed::distributions::{RadiusDistribution, RngSeed};
use packbed::method1;
use packbed::packing::{DomainSpec, PackError};
use packbed::validate::validate_packing;
use std::time::Instant;

fn main() {
    let dist = RadiusDistribution::weibull(15.7, 3.55).unwrap();
    let rbar = dist.mean();
    for (label, mult) in [("15rbar", 15.0), ("30rbar", 30.0)] {
        let side = mult * rbar;
        let spec = DomainSpec::new([side; 3], [1, 1, 1], 0.8, 0.55, 0.2, 0.5, dist, RngSeed(0)).unwrap();
        let t0 = Instant::now();
        let mut rng = spec.seed.rng();
        let res = method1::fill_unit_brick_m1(&spec, &mut rng);
        let (p, met) = match res {
            Ok(p) => (p, true),
            Err(PackError::GoalsNotReached { packing, .. }) => (*packing, false),
            Err(e) => panic!("{e}"),
        };
        let dt = t0.elapsed();
        let mean_r: f64 = p.spheres.iter().map(|s| s.radius).sum::<f64>() / p.spheres.len() as f64;
        println!(
            "{label}: N={} goals_met={met} body={:.3} faces={:?} realized_mean={:.3} ({:.2?})",
            p.spheres.len(),
            p.meta.achieved_body_fraction,
            p.meta.achieved_face_fractions.map(|f| (f * 100.0).round() / 100.0),
            mean_r,
            dt
        );
        let t1 = Instant::now();
        let rep = validate_packing(&p);
        println!("  validate: {} ({:.2?})", rep.summary(), t1.elapsed());
    }
}
