//! Multiplicative measurement noise with reproducible seeding.
//!
//! Each affected eigenvalue a is replaced by (1 + δ·(2u − 1))·a with u
//! drawn uniformly from the open interval (0, 1). The generator is
//! seeded inside the call, so the draw sequence is a pure function of
//! (cluster, spec): perturbing the two clusters of a measurement pair
//! with the same spec applies the same factor sequence to both.

use std::str::FromStr;

use num_complex::Complex64;
use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::inversion::MeasuredCluster;
use crate::spectral::Cluster;

#[derive(Debug, Error)]
pub enum NoiseError {
    #[error("relative noise level must lie in [0, 1), got {0}")]
    DeltaOutOfRange(f64),
    #[error("unknown noise mode {0:?} (expected all, interlaced, or single-draw)")]
    UnknownMode(String),
}

/// Which eigenvalues receive noise and how many draws are spent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseMode {
    /// One independent draw per root; a conjugate extra pair shares a
    /// single draw so it stays exactly conjugate.
    #[default]
    AllRoots,
    /// Only the N interlaced roots are perturbed.
    InterlacedOnly,
    /// One draw for the whole cluster.
    SingleDraw,
}

impl NoiseMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            NoiseMode::AllRoots => "all",
            NoiseMode::InterlacedOnly => "interlaced",
            NoiseMode::SingleDraw => "single-draw",
        }
    }
}

impl FromStr for NoiseMode {
    type Err = NoiseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" | "all-roots" => Ok(NoiseMode::AllRoots),
            "interlaced" | "interlaced-only" => Ok(NoiseMode::InterlacedOnly),
            "single-draw" | "single" => Ok(NoiseMode::SingleDraw),
            other => Err(NoiseError::UnknownMode(other.to_string())),
        }
    }
}

impl std::fmt::Display for NoiseMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Relative noise level δ ∈ [0, 1), seed, and application mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    delta: f64,
    seed: u64,
    mode: NoiseMode,
}

impl NoiseSpec {
    pub fn new(delta: f64, seed: u64, mode: NoiseMode) -> Result<Self, NoiseError> {
        if !(0.0..1.0).contains(&delta) {
            return Err(NoiseError::DeltaOutOfRange(delta));
        }
        Ok(NoiseSpec { delta, seed, mode })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn mode(&self) -> NoiseMode {
        self.mode
    }
}

/// Applies multiplicative noise to a computed cluster, yielding the
/// measured view of it.
///
/// Draw order is fixed: interlaced roots in stored (descending) order,
/// then the extra pair — one draw if it is a conjugate pair, one per
/// member (larger first) if it is real. The perturbed interlaced values
/// are re-sorted descending, since δ < 1 preserves signs but not
/// necessarily the ordering of nearby roots.
pub fn perturb_cluster(cluster: &Cluster, spec: &NoiseSpec) -> MeasuredCluster {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let delta = spec.delta;
    let mut draw = move || {
        let u: f64 = rng.sample(Open01);
        1.0 + delta * (2.0 * u - 1.0)
    };

    let shared = match spec.mode {
        NoiseMode::SingleDraw => Some(draw()),
        _ => None,
    };
    let mut next = move || match shared {
        Some(f) => f,
        None => draw(),
    };

    let mut interlaced: Vec<f64> = cluster.real_roots().iter().map(|&a| a * next()).collect();
    interlaced.sort_by(|a, b| b.partial_cmp(a).unwrap());

    let (z1, z2) = cluster.extra_roots();
    let extra = match spec.mode {
        NoiseMode::InterlacedOnly => (z1, z2),
        _ => {
            if z1.im == 0.0 {
                let a = z1.re * next();
                let b = z2.re * next();
                (Complex64::new(a.max(b), 0.0), Complex64::new(a.min(b), 0.0))
            } else {
                let f = next();
                (z1 * f, z2 * f)
            }
        }
    };

    MeasuredCluster::new(cluster.frequency(), interlaced, extra)
        .expect("noise below 100% keeps the cluster well-formed")
}
