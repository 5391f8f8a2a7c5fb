#![allow(dead_code)] // shared across test targets with different needs

//! Shared test support: an independent all-roots oracle (companion
//! matrix eigenvalues polished by Newton), an LU determinant oracle,
//! and seeded random model generators.

use ebm_spectral::polyutil::Polynomial;
use ebm_spectral::relaxation::EbmModel;
use ebm_spectral::spectral::AugmentedMatrix;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// All roots of `p` via the companion matrix of the monic normalization.
/// Schur on an unbalanced companion matrix is only good to ~‖C‖·ε, so
/// each eigenvalue is polished by complex Newton on the polynomial.
pub fn companion_roots(p: &Polynomial) -> Vec<Complex64> {
    let c = p.coefficients();
    let n = p.degree();
    assert!(n >= 1, "constant polynomial has no roots");
    let lead = c[n];
    let mut companion = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        companion[(i, n - 1)] = -c[i] / lead;
    }
    companion
        .complex_eigenvalues()
        .iter()
        .map(|z| newton_polish(c, Complex64::new(z.re, z.im)))
        .collect()
}

fn newton_polish(c: &[f64], mut z: Complex64) -> Complex64 {
    for _ in 0..60 {
        let mut value = Complex64::new(0.0, 0.0);
        let mut slope = Complex64::new(0.0, 0.0);
        for &coeff in c.iter().rev() {
            slope = slope * z + value;
            value = value * z + coeff;
        }
        if slope.norm() == 0.0 {
            break;
        }
        let step = value / slope;
        z -= step;
        if step.norm() <= 1e-15 * z.norm().max(1e-300) {
            break;
        }
    }
    z
}

/// Symmetric Hausdorff distance between two root multisets.
pub fn hausdorff(a: &[Complex64], b: &[Complex64]) -> f64 {
    let one_sided = |from: &[Complex64], to: &[Complex64]| {
        from.iter()
            .map(|x| {
                to.iter()
                    .map(|y| (x - y).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    one_sided(a, b).max(one_sided(b, a))
}

/// det(λI − A) through LU.
pub fn resolvent_determinant(a: &AugmentedMatrix, lambda: f64) -> f64 {
    let n = a.order();
    let m = DMatrix::from_fn(n, n, |i, j| {
        let diag = if i == j { lambda } else { 0.0 };
        diag - a.get(i, j)
    });
    m.determinant()
}

/// Regime-stratified random models: trial index 0, 1, 2 mod 3 yields
/// D = h, D > h, D < h. Rates live in [1, 50] with pairwise gaps of at
/// least 1, weights in [0.1, 5], D in [0.1, 10] where the regime permits.
pub fn random_models(count: usize, seed: u64, max_n: usize) -> Vec<EbmModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut models = Vec::with_capacity(count);
    for trial in 0..count {
        let n = rng.gen_range(1..=max_n);
        let rates = loop {
            let mut r: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..50.0)).collect();
            r.sort_by(|a, b| a.partial_cmp(b).unwrap());
            if n == 1 || r.windows(2).all(|w| w[1] - w[0] >= 1.0) {
                break r;
            }
        };
        let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..5.0)).collect();
        let h: f64 = weights.iter().zip(&rates).map(|(b, r)| b / r).sum();
        let d = match trial % 3 {
            0 => h,
            1 => (0..200)
                .map(|_| rng.gen_range(0.1..10.0))
                .find(|&c| c > h)
                .unwrap_or(h * 1.5),
            _ => (0..200)
                .map(|_| rng.gen_range(0.1..10.0))
                .find(|&c| c < h)
                .unwrap_or(h * 0.5),
        };
        models.push(EbmModel::new(d, weights, rates).expect("generated model is valid"));
    }
    models
}

/// The unit-weight ladder b_i = 1, r_i = 5i.
pub fn ladder_model(n: usize, d: f64) -> EbmModel {
    let rates: Vec<f64> = (1..=n).map(|i| 5.0 * i as f64).collect();
    EbmModel::new(d, vec![1.0; n], rates).expect("ladder model is valid")
}
