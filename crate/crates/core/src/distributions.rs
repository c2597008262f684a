//! Radius distributions: sampling, density, analytic mean and quantiles for
//! the Weibull and Gamma families. Radii are micrometres.
//!
//! Sampling is deterministic under a seeded generator: Weibull by inverse
//! CDF, Gamma by Marsaglia-Tsang squeeze (with the boost transform below
//! shape 1), both drawing from the `Rng` passed in.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, gamma_lr, ln_gamma};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DistributionError {
    #[error("distribution parameters must be positive: scale={scale}, shape={shape}")]
    InvalidParameters { scale: f64, shape: f64 },
    #[error("density is undefined for negative radius {0}")]
    NegativeRadius(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistKind {
    Weibull,
    Gamma,
}

/// A radius distribution: `kind` plus its scale (µm) and dimensionless shape.
///
/// Anything providing {sample, pdf, mean} plugs into the packers the same
/// way; the two built-in kinds cover the powder models used here.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadiusDistribution {
    pub kind: DistKind,
    pub scale: f64,
    pub shape: f64,
}

impl RadiusDistribution {
    pub fn new(kind: DistKind, scale: f64, shape: f64) -> Result<Self, DistributionError> {
        if !(scale > 0.0 && scale.is_finite() && shape > 0.0 && shape.is_finite()) {
            return Err(DistributionError::InvalidParameters { scale, shape });
        }
        Ok(RadiusDistribution { kind, scale, shape })
    }

    pub fn weibull(scale: f64, shape: f64) -> Result<Self, DistributionError> {
        Self::new(DistKind::Weibull, scale, shape)
    }

    pub fn gamma(scale: f64, shape: f64) -> Result<Self, DistributionError> {
        Self::new(DistKind::Gamma, scale, shape)
    }

    /// Draw one radius; always strictly positive.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        loop {
            let r = match self.kind {
                DistKind::Weibull => {
                    // inverse CDF; 1 - u lies in (0, 1]
                    let u: f64 = rng.gen();
                    self.scale * (-(1.0 - u).ln()).powf(1.0 / self.shape)
                }
                DistKind::Gamma => self.scale * gamma_variate(rng, self.shape),
            };
            if r > 0.0 && r.is_finite() {
                return r;
            }
        }
    }

    /// Probability density at `r >= 0`.
    pub fn pdf(&self, r: f64) -> Result<f64, DistributionError> {
        if r < 0.0 {
            return Err(DistributionError::NegativeRadius(r));
        }
        let (scale, k) = (self.scale, self.shape);
        Ok(match self.kind {
            DistKind::Weibull => {
                if r == 0.0 {
                    match k {
                        k if k > 1.0 => 0.0,
                        k if k == 1.0 => 1.0 / scale,
                        _ => f64::INFINITY,
                    }
                } else {
                    let t = r / scale;
                    (k / scale) * t.powf(k - 1.0) * (-t.powf(k)).exp()
                }
            }
            DistKind::Gamma => {
                if r == 0.0 {
                    match k {
                        k if k > 1.0 => 0.0,
                        k if k == 1.0 => 1.0 / scale,
                        _ => f64::INFINITY,
                    }
                } else {
                    // exp-log form keeps large shapes finite
                    ((k - 1.0) * (r / scale).ln() - r / scale - ln_gamma(k)).exp() / scale
                }
            }
        })
    }

    /// Cumulative distribution at `r` (0 for negative arguments).
    pub fn cdf(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        match self.kind {
            DistKind::Weibull => 1.0 - (-(r / self.scale).powf(self.shape)).exp(),
            DistKind::Gamma => gamma_lr(self.shape, r / self.scale),
        }
    }

    /// Analytic mean radius.
    pub fn mean(&self) -> f64 {
        match self.kind {
            DistKind::Weibull => self.scale * gamma(1.0 + 1.0 / self.shape),
            DistKind::Gamma => self.shape * self.scale,
        }
    }

    /// Quantile `p` in [0, 1); Gamma falls back to bisection on the CDF.
    pub fn quantile(&self, p: f64) -> f64 {
        assert!((0.0..1.0).contains(&p), "quantile probability out of range");
        match self.kind {
            DistKind::Weibull => self.scale * (-(1.0 - p).ln()).powf(1.0 / self.shape),
            DistKind::Gamma => {
                let mut hi = self.mean().max(self.scale);
                while self.cdf(hi) < p {
                    hi *= 2.0;
                }
                let mut lo = 0.0;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if self.cdf(mid) < p {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    }
}

/// Unit-scale Gamma(shape) variate, Marsaglia-Tsang method.
fn gamma_variate<R: Rng + ?Sized>(rng: &mut R, shape: f64) -> f64 {
    if shape < 1.0 {
        // boost: Gamma(k) = Gamma(k+1) * U^(1/k)
        let u: f64 = rng.gen();
        return gamma_variate(rng, shape + 1.0) * u.powf(1.0 / shape);
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x = standard_normal(rng);
        let t = 1.0 + c * x;
        if t <= 0.0 {
            continue;
        }
        let v = t * t * t;
        let u: f64 = rng.gen();
        if u < 1.0 - 0.0331 * x.powi(4) {
            return d * v;
        }
        if u.ln() < 0.5 * x * x + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

/// One N(0,1) draw via Box-Muller (cosine branch only, for a simple
/// deterministic stream).
fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Seed for the deterministic sampling stream: identical seed and request
/// sequence reproduce identical samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}
