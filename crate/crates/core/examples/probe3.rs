use packbed::distributions::{RadiusDistribution, RngSeed};
use packbed::method1;
use packbed::packing::{DomainSpec, PackError};

fn ks_stat(dist: &RadiusDistribution, radii: &mut Vec<f64>) -> f64 {
    radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = radii.len() as f64;
    let mut d = 0.0f64;
    for (i, r) in radii.iter().enumerate() {
        let c = dist.cdf(*r);
        d = d.max((c - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - c).abs());
    }
    d
}

fn main() {
    let dist = RadiusDistribution::weibull(15.7, 3.55).unwrap();
    let side = 30.0 * dist.mean();
    let spec = DomainSpec::new([side; 3], [1, 1, 1], 0.8, 0.55, 0.2, 0.5, dist, RngSeed(0)).unwrap();
    let mut rng = spec.seed.rng();
    let p = match method1::fill_unit_brick_m1(&spec, &mut rng) {
        Ok(p) => p,
        Err(PackError::GoalsNotReached { packing, .. }) => *packing,
        Err(e) => panic!("{e}"),
    };
    let mut radii: Vec<f64> = p.spheres.iter().map(|s| s.radius).collect();
    let d = ks_stat(&dist, &mut radii);
    let crit1 = 1.6276 / (radii.len() as f64).sqrt();
    let crit5 = 1.3581 / (radii.len() as f64).sqrt();
    println!("30rbar: N={} KS D={:.4} crit(1%)={:.4} crit(5%)={:.4} pass1%={}", radii.len(), d, crit1, crit5, d < crit1);
}
