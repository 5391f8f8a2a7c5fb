//! Relaxation-kernel data model: stretched exponential, Prony series,
//! and the extended Burgers parameterization, with conversions between
//! them.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("{name} must be positive (got {value})")]
    NonPositive { name: &'static str, value: f64 },
    #[error("stretching exponent must lie in (0, 1), got {0}")]
    BetaOutOfRange(f64),
    #[error("rates must be strictly increasing (violated at index {0})")]
    RatesNotIncreasing(usize),
    #[error("{weights} weights paired with {rates} rates")]
    LengthMismatch { weights: usize, rates: usize },
    #[error("a relaxation model needs at least one term")]
    Empty,
    #[error("parameter {name} must be finite")]
    NonFinite { name: &'static str },
}

fn check_positive(name: &'static str, value: f64) -> Result<(), ModelError> {
    if !value.is_finite() {
        return Err(ModelError::NonFinite { name });
    }
    if value <= 0.0 {
        return Err(ModelError::NonPositive { name, value });
    }
    Ok(())
}

fn check_rates(r: &[f64]) -> Result<(), ModelError> {
    for (i, &ri) in r.iter().enumerate() {
        check_positive("rate", ri)?;
        if i > 0 && ri <= r[i - 1] {
            return Err(ModelError::RatesNotIncreasing(i));
        }
    }
    Ok(())
}

/// exp(−(t/τ)^β) with relaxation time τ > 0 and exponent β ∈ (0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StretchedExponential {
    tau: f64,
    beta: f64,
}

impl StretchedExponential {
    pub fn new(tau: f64, beta: f64) -> Result<Self, ModelError> {
        check_positive("tau", tau)?;
        if !(beta > 0.0 && beta < 1.0) {
            return Err(ModelError::BetaOutOfRange(beta));
        }
        Ok(StretchedExponential { tau, beta })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Value at t ≥ 0. The function itself is regular at t = 0 (it is 1);
    /// only its derivative is singular there.
    pub fn evaluate(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0);
        (-(t / self.tau).powf(self.beta)).exp()
    }
}

/// Finite exponential sum Σ s_i e^{−r_i t} with positive weights and
/// strictly increasing positive rates.
#[derive(Debug, Clone, PartialEq)]
pub struct PronySeries {
    s: Vec<f64>,
    r: Vec<f64>,
}

impl PronySeries {
    pub fn new(s: Vec<f64>, r: Vec<f64>) -> Result<Self, ModelError> {
        if s.is_empty() {
            return Err(ModelError::Empty);
        }
        if s.len() != r.len() {
            return Err(ModelError::LengthMismatch {
                weights: s.len(),
                rates: r.len(),
            });
        }
        for &si in &s {
            check_positive("weight", si)?;
        }
        check_rates(&r)?;
        Ok(PronySeries { s, r })
    }

    pub fn dimension(&self) -> usize {
        self.s.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.s
    }

    pub fn rates(&self) -> &[f64] {
        &self.r
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0);
        self.s
            .iter()
            .zip(&self.r)
            .map(|(s, r)| s * (-r * t).exp())
            .sum()
    }
}

/// Which side of the glassy threshold h = Σ b_i/r_i the modulus D sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    AboveH,
    Glassy,
    BelowH,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::AboveH => "D>h",
            Regime::Glassy => "D=h",
            Regime::BelowH => "D<h",
        })
    }
}

/// Extended Burgers model: unrelaxed modulus D, rate-scaled weights
/// b_i = s_i r_i, and the shared rate ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct EbmModel {
    d: f64,
    b: Vec<f64>,
    r: Vec<f64>,
}

impl EbmModel {
    pub fn new(d: f64, b: Vec<f64>, r: Vec<f64>) -> Result<Self, ModelError> {
        check_positive("D", d)?;
        if b.is_empty() {
            return Err(ModelError::Empty);
        }
        if b.len() != r.len() {
            return Err(ModelError::LengthMismatch {
                weights: b.len(),
                rates: r.len(),
            });
        }
        for &bi in &b {
            check_positive("weight", bi)?;
        }
        check_rates(&r)?;
        Ok(EbmModel { d, b, r })
    }

    /// D = Σ s_i, b_i = s_i r_i; rates carry over unchanged.
    pub fn from_prony(p: &PronySeries) -> Self {
        let d = p.weights().iter().sum();
        let b = p
            .weights()
            .iter()
            .zip(p.rates())
            .map(|(s, r)| s * r)
            .collect();
        EbmModel {
            d,
            b,
            r: p.rates().to_vec(),
        }
    }

    /// Inverts the weight scaling (s_i = b_i/r_i) and reports
    /// h = Σ b_i/r_i alongside. The round trip reproduces D only for
    /// glassy models, where D = h.
    pub fn to_prony(&self) -> (PronySeries, f64) {
        let s: Vec<f64> = self.b.iter().zip(&self.r).map(|(b, r)| b / r).collect();
        let h = s.iter().sum();
        (
            PronySeries {
                s,
                r: self.r.clone(),
            },
            h,
        )
    }

    /// h = Σ b_i/r_i together with the regime of D relative to h,
    /// decided at relative tolerance 1e-12.
    pub fn modulus_h(&self) -> (f64, Regime) {
        let h: f64 = self.b.iter().zip(&self.r).map(|(b, r)| b / r).sum();
        let tol = 1e-12 * self.d.max(h);
        let regime = if (self.d - h).abs() <= tol {
            Regime::Glassy
        } else if self.d > h {
            Regime::AboveH
        } else {
            Regime::BelowH
        };
        (h, regime)
    }

    /// Rescales every weight by 1/h so that the new model has h = 1.
    pub fn normalized_h(&self) -> Self {
        let (h, _) = self.modulus_h();
        EbmModel {
            d: self.d,
            b: self.b.iter().map(|b| b / h).collect(),
            r: self.r.clone(),
        }
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn weights(&self) -> &[f64] {
        &self.b
    }

    pub fn rates(&self) -> &[f64] {
        &self.r
    }

    pub fn dimension(&self) -> usize {
        self.b.len()
    }
}

/// Max pointwise gap between two relaxation curves over a uniform grid.
/// A degenerate interval collapses all samples onto one point.
fn grid_sup_difference<F, G>(f: F, g: G, t_lo: f64, t_hi: f64, n_samples: usize) -> f64
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    assert!(n_samples >= 2 && t_lo >= 0.0 && t_lo <= t_hi);
    let step = (t_hi - t_lo) / (n_samples - 1) as f64;
    (0..n_samples)
        .map(|i| {
            let t = t_lo + i as f64 * step;
            (f(t) - g(t)).abs()
        })
        .fold(0.0, f64::max)
}

/// Max |stretched − prony| over `n_samples` uniformly spaced times.
pub fn approximation_error(
    g: &StretchedExponential,
    p: &PronySeries,
    t_lo: f64,
    t_hi: f64,
    n_samples: usize,
) -> f64 {
    grid_sup_difference(|t| g.evaluate(t), |t| p.evaluate(t), t_lo, t_hi, n_samples)
}
