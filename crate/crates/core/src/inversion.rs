//! Parameter reconstruction from two measured eigenvalue clusters.
//!
//! The scaled difference of the two measured characteristic polynomials,
//! divided by λ², collapses to Π(λ+r_j) on exact data, so its roots are
//! the negated rates. Each gap between consecutive interlaced
//! eigenvalues brackets one of them; the last rate falls out of the
//! deflated coefficient form. Weights then follow from evaluating the
//! measured polynomial at −r_i, and the modulus from its value at 0.

use num_complex::Complex64;
use thiserror::Error;

use crate::polyutil::{bisect_root, Bracket, PolyError, Polynomial, BISECTION_MAX_ITER};
use crate::spectral::{order_extra_pair, Cluster, FrequencyIndex};

#[derive(Debug, Error)]
pub enum InversionError {
    #[error("need k1 < k2, got k1 = {k1}, k2 = {k2}")]
    FrequencyOrder { k1: u32, k2: u32 },
    #[error("cluster dimensions differ: {n1} vs {n2}")]
    DimensionMismatch { n1: usize, n2: usize },
    #[error("lambda = {lambda:e} is inside the guard band around zero")]
    NearZeroLambda { lambda: f64 },
    #[error("cluster has {found} roots, expected at least 3")]
    TooFewRoots { found: usize },
    #[error("interlaced roots must be real and strictly descending")]
    BadLabeling,
    #[error("cannot decide which two roots are the extra pair")]
    LabelingAmbiguous,
    #[error("non-real roots are not conjugate-paired")]
    ConjugacyViolation,
    #[error("no sign change for rate {j} on [{lo}, {hi}] after shrinking")]
    BracketFailure { j: usize, lo: f64, hi: f64 },
    #[error("recovered rate r_{j} = {value} is not positive and increasing")]
    NonPositiveRate { j: usize, value: f64 },
    #[error("rates {i} and {j} are too close to separate the weights")]
    DegenerateRates { i: usize, j: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A cluster as seen by a measurer: N+2 eigenvalues at a known frequency,
/// with N of them labeled as the interlaced (real, descending) set.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredCluster {
    k: FrequencyIndex,
    interlaced: Vec<f64>,
    extra: (Complex64, Complex64),
}

impl MeasuredCluster {
    /// Builds a cluster from pre-labeled parts.
    pub fn new(
        k: FrequencyIndex,
        interlaced: Vec<f64>,
        extra: (Complex64, Complex64),
    ) -> Result<Self, InversionError> {
        if interlaced.is_empty() {
            return Err(InversionError::TooFewRoots { found: 2 });
        }
        if !interlaced.windows(2).all(|w| w[0] > w[1]) {
            return Err(InversionError::BadLabeling);
        }
        if !interlaced.iter().all(|a| a.is_finite()) {
            return Err(InversionError::BadLabeling);
        }
        let (z1, z2) = extra;
        let extra = if z1.im == 0.0 && z2.im == 0.0 {
            order_extra_pair((z1, z2))
        } else {
            // symmetrize into an exact conjugate pair
            let gap = (z1 - z2.conj()).norm();
            if gap > 1e-9 * z1.norm().max(1.0) {
                return Err(InversionError::ConjugacyViolation);
            }
            let re = 0.5 * (z1.re + z2.re);
            let im = 0.5 * (z1.im.abs() + z2.im.abs());
            (Complex64::new(re, im), Complex64::new(re, -im))
        };
        Ok(MeasuredCluster {
            k,
            interlaced,
            extra,
        })
    }

    /// Labels a bare list of N+2 roots.
    ///
    /// Two non-real entries are the extra pair. If every root is real the
    /// extra pair is the closest-together pair that still leaves the
    /// largest root interlaced: a real extra pair arises from a conjugate
    /// pair collapsing onto the axis, so its members sit near each other
    /// and strictly below a_1.
    pub fn from_roots(k: FrequencyIndex, roots: &[Complex64]) -> Result<Self, InversionError> {
        if roots.len() < 3 {
            return Err(InversionError::TooFewRoots { found: roots.len() });
        }
        let complex: Vec<Complex64> = roots.iter().copied().filter(|z| z.im != 0.0).collect();
        let mut real: Vec<f64> = roots.iter().filter(|z| z.im == 0.0).map(|z| z.re).collect();
        real.sort_by(|a, b| b.partial_cmp(a).unwrap());
        match complex.len() {
            2 => MeasuredCluster::new(k, real, (complex[0], complex[1])),
            0 => {
                // candidates: pairs (u, v) with u > 0 so that a_1 stays labeled
                let mut best: Option<(f64, usize, usize)> = None;
                let mut tied = false;
                for u in 1..real.len() {
                    for v in (u + 1)..real.len() {
                        let gap = (real[u] - real[v]).abs();
                        match best {
                            Some((g, _, _)) if gap > g => {}
                            Some((g, _, _)) if gap == g => tied = true,
                            _ => {
                                best = Some((gap, u, v));
                                tied = false;
                            }
                        }
                    }
                }
                let (_, u, v) = best.ok_or(InversionError::LabelingAmbiguous)?;
                if tied {
                    return Err(InversionError::LabelingAmbiguous);
                }
                let extra = (Complex64::new(real[u], 0.0), Complex64::new(real[v], 0.0));
                let interlaced: Vec<f64> = real
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != u && i != v)
                    .map(|(_, &a)| a)
                    .collect();
                MeasuredCluster::new(k, interlaced, extra)
            }
            _ => Err(InversionError::ConjugacyViolation),
        }
    }

    pub fn from_cluster(cluster: &Cluster) -> Self {
        MeasuredCluster {
            k: cluster.frequency(),
            interlaced: cluster.real_roots().to_vec(),
            extra: cluster.extra_roots(),
        }
    }

    pub fn frequency(&self) -> FrequencyIndex {
        self.k
    }

    pub fn dimension(&self) -> usize {
        self.interlaced.len()
    }

    pub fn interlaced(&self) -> &[f64] {
        &self.interlaced
    }

    pub fn extra_roots(&self) -> (Complex64, Complex64) {
        self.extra
    }

    pub fn all_roots(&self) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = self
            .interlaced
            .iter()
            .map(|&a| Complex64::new(a, 0.0))
            .collect();
        out.push(self.extra.0);
        out.push(self.extra.1);
        out
    }

    /// Evaluates 1/(2k−1)² · Π(λ − a_j) in product form. The extra pair
    /// contributes a real quadratic factor, so the value is exactly real.
    pub fn charpoly_at(&self, lambda: f64) -> f64 {
        let mut value = self.k.leading_coefficient();
        for &a in &self.interlaced {
            value *= lambda - a;
        }
        let (z1, z2) = self.extra;
        if z1.im == 0.0 {
            value *= (lambda - z1.re) * (lambda - z2.re);
        } else {
            let d = lambda - z1.re;
            value *= d * d + z1.im * z1.im;
        }
        value
    }

    /// Expands the measured polynomial to coefficients.
    pub fn charpoly_coefficients(&self) -> Polynomial {
        Polynomial::from_roots(&self.all_roots(), self.k.leading_coefficient())
            .expect("measured cluster roots are conjugate-closed")
    }
}

impl From<&Cluster> for MeasuredCluster {
    fn from(cluster: &Cluster) -> Self {
        MeasuredCluster::from_cluster(cluster)
    }
}

/// Which cluster's interlaced roots supply the bisection brackets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BracketSource {
    /// The k2 cluster (closer to the large-k limit).
    #[default]
    HigherFrequency,
    /// The k1 cluster.
    LowerFrequency,
}

/// Rate recovery output with per-rate diagnostics.
#[derive(Debug, Clone)]
pub struct RateRecovery {
    pub rates: Vec<f64>,
    /// Bracket actually used for each bisected rate r_1 … r_{N−1}.
    pub brackets: Vec<(f64, f64)>,
    /// |Q(−r_j)| at the recovered roots, product form.
    pub q_residuals: Vec<f64>,
    /// Independent estimate of r_N from the λ^{N−1} coefficient.
    pub last_rate_vieta: f64,
}

/// Full reconstruction with stage diagnostics.
#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    pub r_inv: Vec<f64>,
    pub b_inv: Vec<f64>,
    pub d_inv: f64,
    /// Alternative modulus estimate Σ b_i/r_i; equals d_inv only for
    /// glassy data.
    pub d_inv_glassy: f64,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone)]
pub struct Diagnostics {
    pub rate_brackets: Vec<(f64, f64)>,
    pub q_residuals: Vec<f64>,
    pub last_rate_vieta: f64,
    /// Scaled consistency of the recovered model against the k2 data:
    /// max_j |P̂(a_j)| / ‖P̂‖(a_j) over the measured interlaced roots.
    pub charpoly_residual: f64,
}

fn check_pair(c1: &MeasuredCluster, c2: &MeasuredCluster) -> Result<(), InversionError> {
    if c1.frequency() >= c2.frequency() {
        return Err(InversionError::FrequencyOrder {
            k1: c1.frequency().get(),
            k2: c2.frequency().get(),
        });
    }
    if c1.dimension() != c2.dimension() {
        return Err(InversionError::DimensionMismatch {
            n1: c1.dimension(),
            n2: c2.dimension(),
        });
    }
    Ok(())
}

fn difference_scale(c1: &MeasuredCluster, c2: &MeasuredCluster) -> f64 {
    1.0 / (c1.frequency().leading_coefficient() - c2.frequency().leading_coefficient())
}

fn eval_q_raw(c1: &MeasuredCluster, c2: &MeasuredCluster, lambda: f64) -> f64 {
    difference_scale(c1, c2) * (c1.charpoly_at(lambda) - c2.charpoly_at(lambda)) / (lambda * lambda)
}

/// Guard radius below which eval_q refuses to divide by λ². The smallest
/// rate is unknown here, but interlacing pins r_1 < |a_2|, so a fraction
/// of |a_2| stays on the safe side of the target root.
fn lambda_guard(c2: &MeasuredCluster) -> f64 {
    if c2.dimension() >= 2 {
        1e-8 * c2.interlaced()[1].abs()
    } else {
        1e-8 * c2.interlaced()[0].abs().max(1.0)
    }
}

/// The scaled, λ²-normalized difference of the two measured polynomials;
/// equal to Π(λ+r_j) on exact data.
pub fn eval_q(
    c1: &MeasuredCluster,
    c2: &MeasuredCluster,
    lambda: f64,
) -> Result<f64, InversionError> {
    check_pair(c1, c2)?;
    if lambda.abs() < lambda_guard(c2) {
        return Err(InversionError::NearZeroLambda { lambda });
    }
    Ok(eval_q_raw(c1, c2, lambda))
}

/// Coefficient form of Q: expand both measured polynomials, subtract,
/// scale, and drop the two lowest coefficients (identically zero on
/// exact data; discarded regardless on noisy data).
fn q_polynomial(c1: &MeasuredCluster, c2: &MeasuredCluster) -> Polynomial {
    let p1 = c1.charpoly_coefficients();
    let p2 = c2.charpoly_coefficients();
    p1.sub(&p2).scaled(difference_scale(c1, c2)).shifted_down(2)
}

/// Endpoint shrink fraction and retry count for noisy brackets.
const BRACKET_SHRINK: f64 = 0.005;
const BRACKET_RETRIES: usize = 10;

fn bisect_with_shrink<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    j: usize,
    tol: f64,
) -> Result<(f64, (f64, f64)), InversionError> {
    let width = hi - lo;
    for attempt in 0..=BRACKET_RETRIES {
        let l = lo + attempt as f64 * BRACKET_SHRINK * width;
        let h = hi - attempt as f64 * BRACKET_SHRINK * width;
        if let Ok(bracket) = Bracket::from_fn(f, l, h) {
            let root = bisect_root(f, &bracket, tol, BISECTION_MAX_ITER)?;
            return Ok((root, (l, h)));
        }
    }
    Err(InversionError::BracketFailure { j, lo, hi })
}

/// Window growth schedule for the final-rate refinement.
const POLISH_START_FRACTION: f64 = 1e-6;
const POLISH_CAP_FRACTION: f64 = 0.2;

pub fn recover_rates(
    c1: &MeasuredCluster,
    c2: &MeasuredCluster,
    tol: f64,
) -> Result<Vec<f64>, InversionError> {
    recover_rates_with(c1, c2, tol, BracketSource::default()).map(|r| r.rates)
}

/// Rate recovery with an explicit bracket source.
///
/// For j = 2..N the product-form Q changes sign across (a_j, a_{j−1})
/// and bisection lands on −r_{j−1}. The remaining rate comes from the
/// coefficient form of Q, deflated by the found roots; its linear-factor
/// estimate is then tightened by one more product-form bisection inside
/// a window around it, which shields the result from forward error in
/// the deflation chain.
pub fn recover_rates_with(
    c1: &MeasuredCluster,
    c2: &MeasuredCluster,
    tol: f64,
    source: BracketSource,
) -> Result<RateRecovery, InversionError> {
    check_pair(c1, c2)?;
    let n = c1.dimension();
    let anchors = match source {
        BracketSource::HigherFrequency => c2.interlaced(),
        BracketSource::LowerFrequency => c1.interlaced(),
    };
    let q = |lambda: f64| eval_q_raw(c1, c2, lambda);

    let mut negated = Vec::with_capacity(n);
    let mut brackets = Vec::with_capacity(n.saturating_sub(1));
    let mut q_residuals = Vec::with_capacity(n.saturating_sub(1));
    for j in 2..=n {
        let lo = anchors[j - 1];
        let hi = anchors[j - 2];
        let (root, used) = bisect_with_shrink(&q, lo, hi, j - 1, tol)?;
        q_residuals.push(q(root).abs());
        brackets.push(used);
        negated.push(root);
    }

    // last rate from the coefficient form
    let q_poly = q_polynomial(c1, c2);
    let mut remaining = q_poly.clone();
    let mut by_magnitude = negated.clone();
    by_magnitude.sort_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap());
    for &root in &by_magnitude {
        let (quotient, _) = remaining.synthetic_division(root)?;
        remaining = quotient;
    }
    if remaining.degree() != 1 || remaining.coefficients()[1] == 0.0 {
        return Err(InversionError::NonPositiveRate {
            j: n,
            value: f64::NAN,
        });
    }
    let mut r_last = remaining.coefficients()[0] / remaining.coefficients()[1];

    // Vieta cross-check: the λ^{N-1} coefficient of monic Q is Σ r_j
    let coeffs = q_poly.coefficients();
    let e1 = coeffs[n - 1] / coeffs[n];
    let last_rate_vieta = e1 + negated.iter().sum::<f64>();

    if r_last > 0.0 {
        // refine against the product form; deflation forward error is the
        // accuracy bottleneck for large N
        let a_n = anchors[n - 1];
        let mut window = POLISH_START_FRACTION * r_last;
        while window <= POLISH_CAP_FRACTION * r_last {
            let lo = -r_last - window;
            let hi = (-r_last + window).min(a_n - f64::EPSILON * a_n.abs());
            if lo < hi {
                if let Ok(bracket) = Bracket::from_fn(q, lo, hi) {
                    r_last = -bisect_root(q, &bracket, tol, BISECTION_MAX_ITER)?;
                    break;
                }
            }
            window *= 4.0;
        }
    }

    // bracket j holds −r_{j−1}, so the bisected rates already ascend
    let mut rates: Vec<f64> = negated.iter().map(|x| -x).collect();
    if !(r_last > 0.0 && rates.last().is_none_or(|&prev| r_last > prev)) {
        return Err(InversionError::NonPositiveRate {
            j: n,
            value: r_last,
        });
    }
    rates.push(r_last);
    Ok(RateRecovery {
        rates,
        brackets,
        q_residuals,
        last_rate_vieta,
    })
}

/// Weights from the measured polynomial at the negated rates:
/// b_i = −P(−r_i) / Π_{j≠i}(r_j − r_i).
pub fn recover_weights(c2: &MeasuredCluster, rates: &[f64]) -> Result<Vec<f64>, InversionError> {
    let n = rates.len();
    let scale = rates.last().copied().unwrap_or(1.0);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        let mut denom = 1.0;
        for j in 0..n {
            if j == i {
                continue;
            }
            if (rates[j] - rates[i]).abs() <= 1e-12 * scale {
                return Err(InversionError::DegenerateRates { i, j });
            }
            denom *= rates[j] - rates[i];
        }
        weights.push(-c2.charpoly_at(-rates[i]) / denom);
    }
    Ok(weights)
}

/// Modulus from the characteristic equation at λ = 0:
/// D = [P(0) + Σ b_i Π_{j≠i} r_j] / Π r_j.
pub fn recover_d(c2: &MeasuredCluster, rates: &[f64], weights: &[f64]) -> f64 {
    recover_d_at(c2, rates, weights, 0.0)
}

/// Same recovery at an arbitrary λ ∉ {−r_i}; exact data gives the same D
/// for every admissible λ.
pub(crate) fn recover_d_at(
    c2: &MeasuredCluster,
    rates: &[f64],
    weights: &[f64],
    lambda: f64,
) -> f64 {
    let mut product = 1.0;
    for &r in rates {
        product *= lambda + r;
    }
    let mut sum = 0.0;
    for (i, &b) in weights.iter().enumerate() {
        let mut partial = 1.0;
        for (j, &r) in rates.iter().enumerate() {
            if j != i {
                partial *= lambda + r;
            }
        }
        sum += b * partial;
    }
    (c2.charpoly_at(lambda) + sum) / product
        - lambda * lambda * c2.frequency().leading_coefficient()
}

/// Glassy-route modulus Σ b_i/r_i; a valid D estimate when D = h.
pub fn recover_d_glassy(rates: &[f64], weights: &[f64]) -> f64 {
    weights.iter().zip(rates).map(|(b, r)| b / r).sum()
}

/// Full pipeline: rates, then weights, then modulus, with diagnostics.
pub fn invert(
    c1: &MeasuredCluster,
    c2: &MeasuredCluster,
    tol: f64,
) -> Result<ReconstructionResult, InversionError> {
    check_pair(c1, c2)?;
    let recovery = recover_rates_with(c1, c2, tol, BracketSource::default())?;
    let weights = recover_weights(c2, &recovery.rates)?;
    let d = recover_d(c2, &recovery.rates, &weights);
    let d_glassy = recover_d_glassy(&recovery.rates, &weights);

    let s = c2.frequency().leading_coefficient();
    let residual = c2
        .interlaced()
        .iter()
        .map(|&a| {
            let mut product = 1.0;
            let mut abs_product = 1.0;
            for &r in &recovery.rates {
                product *= a + r;
                abs_product *= a.abs() + r;
            }
            let mut sum = 0.0;
            let mut abs_sum = 0.0;
            for (i, &b) in weights.iter().enumerate() {
                let mut partial = 1.0;
                let mut abs_partial = 1.0;
                for (j, &r) in recovery.rates.iter().enumerate() {
                    if j != i {
                        partial *= a + r;
                        abs_partial *= a.abs() + r;
                    }
                }
                sum += b * partial;
                abs_sum += b.abs() * abs_partial;
            }
            let value = (d + a * a * s) * product - sum;
            let scale = (d.abs() + a * a * s) * abs_product + abs_sum;
            value.abs() / scale
        })
        .fold(0.0, f64::max);

    Ok(ReconstructionResult {
        r_inv: recovery.rates.clone(),
        b_inv: weights,
        d_inv: d,
        d_inv_glassy: d_glassy,
        diagnostics: Diagnostics {
            rate_brackets: recovery.brackets,
            q_residuals: recovery.q_residuals,
            last_rate_vieta: recovery.last_rate_vieta,
            charpoly_residual: residual,
        },
    })
}
