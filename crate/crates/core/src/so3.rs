//! Monte Carlo estimate of a word measure's density at the identity of SO(3).
//!
//! Rotations are unit quaternions; `q` and `-q` are the same rotation. The
//! estimator counts how often `w(t)` lands in the ball of rotation angle
//! `≤ ε` and divides by that ball's Haar measure.

use nalgebra::Matrix3;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::complex::{classify_surface, ComplexError};
use crate::word::Word;
use crate::zeta::so3_zeta;

/// Samples per independently seeded block.
pub const BLOCK_SIZE: u64 = 1 << 16;
pub const DEFAULT_SAMPLES: u64 = 1_000_000;
pub const DEFAULT_EPS: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum So3Error {
    #[error(transparent)]
    NotASurface(#[from] ComplexError),
    #[error("density at the identity diverges for euler characteristic {0}; need at most -2")]
    Divergent(i64),
    #[error("invalid estimator configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    w: f64,
    x: f64,
    y: f64,
    z: f64,
}

impl Rotation {
    pub const IDENTITY: Rotation = Rotation {
        w: 1.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    /// Normalizes `(w, x, y, z)`; `None` for the zero vector.
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Option<Rotation> {
        let norm = (w * w + x * x + y * y + z * z).sqrt();
        (norm > 0.0 && norm.is_finite()).then(|| Rotation {
            w: w / norm,
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    pub fn components(&self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn inverse(&self) -> Rotation {
        Rotation {
            w: self.w,
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    /// Hamilton product, `self` applied after `other`.
    pub fn compose(&self, o: &Rotation) -> Rotation {
        let (a, b) = (self, o);
        Rotation {
            w: a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            x: a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            y: a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            z: a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        }
    }

    pub fn to_matrix(&self) -> Matrix3<f64> {
        let Rotation { w, x, y, z } = *self;
        Matrix3::new(
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        )
    }
}

/// Uniform rotation: four standard normals normalized onto the 3-sphere.
pub fn haar_sample<R: Rng + ?Sized>(rng: &mut R) -> Rotation {
    loop {
        let [w, x, y, z]: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        if let Some(r) = Rotation::new(w, x, y, z) {
            return r;
        }
    }
}

/// Rotation angle in `[0, π]`.
pub fn rotation_angle(r: &Rotation) -> f64 {
    2.0 * r.w.abs().min(1.0).acos()
}

/// Haar measure of `{angle ≤ ε}`, which is also the CDF of the angle.
pub fn ball_haar_measure(eps: f64) -> f64 {
    (eps - eps.sin()) / std::f64::consts::PI
}

/// `w(t)` by quaternion products.
pub fn evaluate_rotation(w: &Word, tuple: &[Rotation]) -> Rotation {
    w.syllables().iter().fold(Rotation::IDENTITY, |acc, s| {
        let r = tuple[s.letter.index()];
        acc.compose(&if s.inverted { r.inverse() } else { r })
    })
}

/// `w(t)` by 3×3 rotation matrices.
pub fn evaluate_matrix(w: &Word, tuple: &[Matrix3<f64>]) -> Matrix3<f64> {
    w.syllables().iter().fold(Matrix3::identity(), |acc, s| {
        let m = tuple[s.letter.index()];
        acc * if s.inverted { m.transpose() } else { m }
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    samples: u64,
    eps: f64,
    seed: u64,
}

impl EstimatorConfig {
    pub fn new(samples: u64, eps: f64, seed: u64) -> Result<Self, So3Error> {
        if samples == 0 {
            return Err(So3Error::InvalidConfig("sample count must be positive".into()));
        }
        if !(eps > 0.0 && eps < std::f64::consts::PI) {
            return Err(So3Error::InvalidConfig(format!("ball radius {eps} outside (0, π)")));
        }
        Ok(EstimatorConfig { samples, eps, seed })
    }

    /// Default sample count and radius.
    pub fn with_seed(seed: u64) -> Self {
        EstimatorConfig {
            samples: DEFAULT_SAMPLES,
            eps: DEFAULT_EPS,
            seed,
        }
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub hits: u64,
    pub samples: u64,
}

/// Surface words with `κ ≤ -2` have a continuous density at the identity,
/// equal to `ζ_{SO(3)}(-κ)` since every irreducible of SO(3) is real.
pub fn density_target(w: &Word) -> Result<f64, So3Error> {
    let kappa = classify_surface(w)?.euler_characteristic();
    if kappa > -2 {
        return Err(So3Error::Divergent(kappa));
    }
    Ok(so3_zeta(-kappa as f64).expect("-κ ≥ 2"))
}

/// Block `b` of a run: ChaCha8 seeded from the run seed, on stream `b`.
pub fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// Ball-kernel estimate of the density of `μ_w` at the identity.
pub fn density_at_identity(w: &Word, cfg: &EstimatorConfig) -> Result<DensityEstimate, So3Error> {
    density_target(w)?;
    let n = w.arity();
    let blocks = cfg.samples.div_ceil(BLOCK_SIZE);
    let hits: u64 = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(cfg.seed, b);
            let size = BLOCK_SIZE.min(cfg.samples - b * BLOCK_SIZE);
            let mut tuple = vec![Rotation::IDENTITY; n];
            let mut hits = 0u64;
            for _ in 0..size {
                for r in tuple.iter_mut() {
                    *r = haar_sample(&mut rng);
                }
                if rotation_angle(&evaluate_rotation(w, &tuple)) <= cfg.eps {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let p = hits as f64 / cfg.samples as f64;
    let ball = ball_haar_measure(cfg.eps);
    Ok(DensityEstimate {
        estimate: p / ball,
        std_error: (p * (1.0 - p) / cfg.samples as f64).sqrt() / ball,
        hits,
        samples: cfg.samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::parse_word;
    use std::f64::consts::PI;

    #[test]
    fn angles() {
        assert_eq!(rotation_angle(&Rotation::IDENTITY), 0.0);
        let half = Rotation::new(0.0, 1.0, 0.0, 0.0).unwrap();
        assert!((rotation_angle(&half) - PI).abs() < 1e-15);
        let r = Rotation::new(0.3f64.cos(), 0.3f64.sin(), 0.0, 0.0).unwrap();
        assert!((rotation_angle(&r) - 0.6).abs() < 1e-12);
        let neg = Rotation::new(-0.3f64.cos(), -0.3f64.sin(), 0.0, 0.0).unwrap();
        assert!((rotation_angle(&neg) - 0.6).abs() < 1e-12);
        assert!(Rotation::new(0.0, 0.0, 0.0, 0.0).is_none());
    }

    #[test]
    fn ball_measure() {
        assert!((ball_haar_measure(PI) - 1.0).abs() < 1e-15);
        assert!((ball_haar_measure(PI / 2.0) - (PI / 2.0 - 1.0) / PI).abs() < 1e-15);
        let e = 1e-3;
        assert!((ball_haar_measure(e) / (e.powi(3) / (6.0 * PI)) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn matrix_route_agrees() {
        let w = parse_word("[a,b][c,d] a b'").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let t: Vec<Rotation> = (0..4).map(|_| haar_sample(&mut rng)).collect();
            let m: Vec<Matrix3<f64>> = t.iter().map(Rotation::to_matrix).collect();
            let q = evaluate_rotation(&w, &t).to_matrix();
            assert!((q - evaluate_matrix(&w, &m)).abs().max() < 1e-10);
            for r in &m {
                assert!((r.determinant() - 1.0).abs() < 1e-12);
                assert!((r * r.transpose() - Matrix3::identity()).abs().max() < 1e-12);
            }
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let a: Vec<Rotation> = (0..50).map({
            let mut rng = block_rng(3, 1);
            move |_| haar_sample(&mut rng)
        }).collect();
        let b: Vec<Rotation> = (0..50).map({
            let mut rng = block_rng(3, 1);
            move |_| haar_sample(&mut rng)
        }).collect();
        assert_eq!(a, b);
        let c = haar_sample(&mut block_rng(3, 2));
        assert_ne!(a[0], c);
        let w = parse_word("[a,b][c,d]").unwrap();
        let cfg = EstimatorConfig::new(100_000, 0.4, 9).unwrap();
        assert_eq!(density_at_identity(&w, &cfg).unwrap(), density_at_identity(&w, &cfg).unwrap());
    }

    #[test]
    fn refusals() {
        let cfg = EstimatorConfig::with_seed(1);
        assert_eq!(
            density_at_identity(&parse_word("[a,b]").unwrap(), &cfg),
            Err(So3Error::Divergent(0))
        );
        assert!(matches!(
            density_at_identity(&parse_word("a b c").unwrap(), &cfg),
            Err(So3Error::NotASurface(_))
        ));
        assert!(EstimatorConfig::new(0, 0.2, 1).is_err());
        assert!(EstimatorConfig::new(10, PI, 1).is_err());
        assert!(EstimatorConfig::new(10, 0.0, 1).is_err());
    }

    #[test]
    fn targets() {
        let g2 = parse_word("[a,b][c,d]").unwrap();
        assert!((density_target(&g2).unwrap() - PI * PI / 8.0).abs() < 1e-10);
        let g3 = parse_word("[a,b][c,d][e,f]").unwrap();
        assert!((density_target(&g3).unwrap() - 15.0 / 16.0 * PI.powi(4) / 90.0).abs() < 1e-10);
    }
}
