//! Forward clustered-eigenvalue solver.
//!
//! For a relaxation model and a spatial frequency index k, the modal
//! reduction of the augmented first-order system is an (N+2)×(N+2) real
//! matrix whose spectrum is the "cluster" at k. The N real eigenvalues
//! interlace the negated rates, which hands bisection a guaranteed
//! bracket for each; the remaining two are read off the deflated
//! quadratic.

use num_complex::Complex64;
use thiserror::Error;

use crate::polyutil::{bisect_root, Bracket, PolyError, Polynomial, BISECTION_MAX_ITER};
use crate::relaxation::EbmModel;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("frequency index must be at least 1, got {0}")]
    InvalidFrequency(u32),
    #[error("lambda = {lambda} collides with the pole at -r_{index}")]
    PoleCollision { index: usize, lambda: f64 },
    #[error("no sign change found for root {j} on [{lo}, {hi}]")]
    BracketFailure { j: usize, lo: f64, hi: f64 },
    #[error("residual {residual:e} after deflation exceeds {bound:e}")]
    DeflationResidual { residual: f64, bound: f64 },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Spatial frequency index k ≥ 1; the associated Laplacian eigenvalue is
/// η = −(2k−1)².
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct FrequencyIndex(u32);

impl FrequencyIndex {
    pub fn new(k: u32) -> Result<Self, SpectralError> {
        if k < 1 {
            return Err(SpectralError::InvalidFrequency(k));
        }
        Ok(FrequencyIndex(k))
    }

    pub fn get(&self) -> u32 {
        self.0
    }

    /// 2k − 1, the odd wavenumber.
    pub fn odd(&self) -> f64 {
        (2 * self.0 as u64 - 1) as f64
    }

    /// η = −(2k−1)².
    pub fn eta(&self) -> f64 {
        -self.odd() * self.odd()
    }

    /// 1/(2k−1)², the leading coefficient of the characteristic polynomial.
    pub fn leading_coefficient(&self) -> f64 {
        1.0 / (self.odd() * self.odd())
    }
}

impl std::fmt::Display for FrequencyIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One cluster of N+2 eigenvalues at a fixed frequency index.
///
/// `real_roots` holds the N interlaced eigenvalues in descending order;
/// `extra` is the remaining pair, either an exact conjugate pair
/// (positive imaginary part first) or two reals stored descending.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    k: FrequencyIndex,
    real_roots: Vec<f64>,
    extra: (Complex64, Complex64),
}

impl Cluster {
    pub(crate) fn from_parts(
        k: FrequencyIndex,
        real_roots: Vec<f64>,
        extra: (Complex64, Complex64),
    ) -> Self {
        debug_assert!(real_roots.windows(2).all(|w| w[0] > w[1]));
        Cluster {
            k,
            real_roots,
            extra: order_extra_pair(extra),
        }
    }

    pub fn frequency(&self) -> FrequencyIndex {
        self.k
    }

    pub fn dimension(&self) -> usize {
        self.real_roots.len()
    }

    /// The interlaced eigenvalues a_1 > a_2 > … > a_N.
    pub fn real_roots(&self) -> &[f64] {
        &self.real_roots
    }

    pub fn extra_roots(&self) -> (Complex64, Complex64) {
        self.extra
    }

    /// All N+2 eigenvalues, interlaced first.
    pub fn all_roots(&self) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = self
            .real_roots
            .iter()
            .map(|&a| Complex64::new(a, 0.0))
            .collect();
        out.push(self.extra.0);
        out.push(self.extra.1);
        out
    }
}

pub(crate) fn order_extra_pair(pair: (Complex64, Complex64)) -> (Complex64, Complex64) {
    let (a, b) = pair;
    if a.im == 0.0 && b.im == 0.0 {
        if a.re >= b.re {
            (a, b)
        } else {
            (b, a)
        }
    } else if a.im >= 0.0 {
        (a, b)
    } else {
        (b, a)
    }
}

/// Dense (N+2)×(N+2) matrix of the modal system at frequency k.
///
/// Layout (row-major, η = −(2k−1)²):
/// row 0: u' = v; row 1: v' = Dηu − Σ b_i w_i; row 2+i: w_i' = ηu − r_i w_i.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedMatrix {
    order: usize,
    entries: Vec<f64>,
}

impl AugmentedMatrix {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.order + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks(self.order)
    }

    pub fn nonzero_count(&self) -> usize {
        self.entries.iter().filter(|&&x| x != 0.0).count()
    }

    /// Max absolute row sum.
    pub fn infinity_norm(&self) -> f64 {
        self.rows()
            .map(|row| row.iter().map(|x| x.abs()).sum())
            .fold(0.0, f64::max)
    }

    pub fn apply_complex(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.order);
        self.rows()
            .map(|row| row.iter().zip(v).map(|(&a, &x)| a * x).sum::<Complex64>())
            .collect()
    }
}

/// Builds the modal matrix of the augmented system at frequency k.
pub fn build_augmented_matrix(m: &EbmModel, k: FrequencyIndex) -> AugmentedMatrix {
    let n = m.dimension();
    let order = n + 2;
    let eta = k.eta();
    let mut entries = vec![0.0; order * order];
    entries[1] = 1.0; // u' = v
    entries[order] = m.d() * eta;
    for (i, (&b, &r)) in m.weights().iter().zip(m.rates()).enumerate() {
        entries[order + 2 + i] = -b;
        entries[(2 + i) * order] = eta;
        entries[(2 + i) * order + 2 + i] = -r;
    }
    AugmentedMatrix { order, entries }
}

/// Characteristic polynomial of the modal system, expanded to
/// coefficients:
///
///   P(λ) = (D + λ²/(2k−1)²)·Π(λ+r_j) − Σ_i b_i Π_{j≠i}(λ+r_j)
///
/// Degree N+2 with leading coefficient exactly 1/(2k−1)².
pub fn characteristic_polynomial(m: &EbmModel, k: FrequencyIndex) -> Polynomial {
    let neg_rates: Vec<Complex64> = m.rates().iter().map(|&r| Complex64::new(-r, 0.0)).collect();
    let rate_product = Polynomial::from_roots(&neg_rates, 1.0).expect("real roots");
    let mut p = rate_product
        .scaled(m.d())
        .add(&rate_product.shifted_up(2).scaled(k.leading_coefficient()));
    for (i, &b) in m.weights().iter().enumerate() {
        let others: Vec<Complex64> = m
            .rates()
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &r)| Complex64::new(-r, 0.0))
            .collect();
        let partial = Polynomial::from_roots(&others, 1.0).expect("real roots");
        p = p.sub(&partial.scaled(b));
    }
    p
}

/// Evaluates the characteristic polynomial straight from the model,
/// without expanding coefficients. Near the interlaced roots this form
/// is far better conditioned than Horner on the expanded polynomial,
/// whose coefficients grow like products of the rates.
pub fn eval_characteristic(m: &EbmModel, k: FrequencyIndex, lambda: f64) -> f64 {
    let s = k.leading_coefficient();
    let mut product = 1.0;
    for &r in m.rates() {
        product *= lambda + r;
    }
    let mut sum = 0.0;
    for (i, &b) in m.weights().iter().enumerate() {
        let mut partial = 1.0;
        for (j, &r) in m.rates().iter().enumerate() {
            if j != i {
                partial *= lambda + r;
            }
        }
        sum += b * partial;
    }
    (m.d() + lambda * lambda * s) * product - sum
}

/// Modal eigenvector (1, λ, −(2k−1)²/(λ+r_1), …, −(2k−1)²/(λ+r_N)).
pub fn eigenvector(
    m: &EbmModel,
    k: FrequencyIndex,
    lambda: Complex64,
) -> Result<Vec<Complex64>, SpectralError> {
    let mut v = Vec::with_capacity(m.dimension() + 2);
    v.push(Complex64::new(1.0, 0.0));
    v.push(lambda);
    let wavenumber_sq = k.odd() * k.odd();
    for (i, &r) in m.rates().iter().enumerate() {
        let denom = lambda + r;
        if denom.norm() <= 1e-14 * r {
            return Err(SpectralError::PoleCollision {
                index: i + 1,
                lambda: lambda.re,
            });
        }
        v.push(-wavenumber_sq / denom);
    }
    Ok(v)
}

/// Σ b_i/(a+r_i) − D − a²/(2k−1)²; zero at every interlaced eigenvalue.
pub fn secular_residual(m: &EbmModel, k: FrequencyIndex, a: f64) -> Result<f64, SpectralError> {
    let mut sum = 0.0;
    for (i, (&b, &r)) in m.weights().iter().zip(m.rates()).enumerate() {
        let denom = a + r;
        if denom.abs() <= 1e-14 * r {
            return Err(SpectralError::PoleCollision {
                index: i + 1,
                lambda: a,
            });
        }
        sum += b / denom;
    }
    Ok(sum - m.d() - a * a * k.leading_coefficient())
}

/// Computes the full cluster at frequency k.
///
/// The N−1 lower interlaced roots are bisected on the rate gaps: P
/// alternates sign at the negated rates, so each open interval
/// (−r_j, −r_{j−1}) holds a root. Deflating them leaves a cubic holding
/// a_1 and the extra pair; a_1 is its rightmost real root (the extra
/// pair, when real, sits strictly below a_1), isolated through the
/// cubic's critical points and refined by direct-form bisection. The
/// extra pair then falls out of the remaining quadratic.
pub fn compute_cluster(
    m: &EbmModel,
    k: FrequencyIndex,
    tol: f64,
) -> Result<Cluster, SpectralError> {
    let n = m.dimension();
    let r = m.rates();
    let f = |x: f64| eval_characteristic(m, k, x);

    let min_gap = r
        .iter()
        .scan(0.0, |prev, &ri| {
            let gap = ri - *prev;
            *prev = ri;
            Some(gap)
        })
        .fold(f64::INFINITY, f64::min);
    let inset = 1e-9 * min_gap;

    let mut roots = Vec::with_capacity(n);
    for j in (2..=n).rev() {
        let lo = -r[j - 1] + inset;
        let hi = -r[j - 2] - inset;
        let bracket =
            Bracket::from_fn(f, lo, hi).map_err(|_| SpectralError::BracketFailure { j, lo, hi })?;
        roots.push(bisect_root(f, &bracket, tol, BISECTION_MAX_ITER)?);
    }

    // deflate the gap roots, smallest magnitude first, down to a cubic
    let p = characteristic_polynomial(m, k);
    let mut sorted = roots.clone();
    sorted.sort_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap());
    let mut cubic = p.clone();
    for &root in &sorted {
        let (q, _) = cubic.synthetic_division(root)?;
        cubic = q;
    }

    let a_1 = rightmost_real_root(m, k, &cubic, -r[0] + inset, tol)?;
    roots.push(a_1);

    // residual gate; the floor widens with a coarser bisection tolerance
    let residual_bound = |x: f64| (1e-10 + 10.0 * tol) * p.evaluate_abs(x.abs().max(1.0));
    for &root in &roots {
        let residual = p.evaluate(root).abs();
        let bound = residual_bound(root);
        if residual > bound {
            return Err(SpectralError::DeflationResidual { residual, bound });
        }
    }

    let (quadratic, _) = cubic.synthetic_division(a_1)?;
    let extra = quadratic.solve_quadratic()?;
    for z in [extra.0, extra.1] {
        let residual = p.evaluate_complex(z).norm();
        let bound = (1e-10 + 10.0 * tol) * p.evaluate_abs(z.norm().max(1.0));
        if residual > bound {
            return Err(SpectralError::DeflationResidual { residual, bound });
        }
    }

    roots.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let cluster = Cluster::from_parts(k, roots, extra);
    if !interlacing_holds(m, &cluster) {
        return Err(SpectralError::BracketFailure {
            j: 0,
            lo: -r[n - 1],
            hi: f64::INFINITY,
        });
    }
    Ok(cluster)
}

/// Rightmost real root of the residual cubic, which is a_1.
///
/// The cubic's critical points split the line into monotone pieces, so
/// the rightmost sign change can be pinned exactly: below the local
/// minimum when the cubic is still negative there, otherwise on the
/// first rising branch. The bracket is clipped at the guard just right
/// of −r_1 (a_1 lives above it) and the root is refined against the
/// direct evaluator, whose sign agrees with the cubic's on that range.
fn rightmost_real_root(
    m: &EbmModel,
    k: FrequencyIndex,
    cubic: &Polynomial,
    lower_guard: f64,
    tol: f64,
) -> Result<f64, SpectralError> {
    let c = cubic.coefficients();
    debug_assert_eq!(cubic.degree(), 3);
    let upper = 1.0 + c[0].abs().max(c[1].abs()).max(c[2].abs()) / c[3].abs();
    let g = |x: f64| cubic.evaluate(x);

    let derivative = Polynomial::new(vec![c[1], 2.0 * c[2], 3.0 * c[3]]);
    let (z1, z2) = derivative.solve_quadratic()?;
    let (mut lo, hi);
    if z1.im != 0.0 {
        // strictly increasing: the only real root
        lo = lower_guard;
        hi = upper;
    } else {
        let c_lo = z1.re.min(z2.re);
        let c_hi = z1.re.max(z2.re);
        let at_hi = g(c_hi);
        if at_hi < 0.0 {
            lo = c_hi;
            hi = upper;
        } else if at_hi == 0.0 {
            return Ok(c_hi);
        } else {
            // no crossing right of the local minimum; the root sits on
            // the first rising branch
            lo = lower_guard;
            hi = c_lo;
        }
    }
    lo = lo.max(lower_guard);
    if lo >= hi {
        return Err(SpectralError::BracketFailure { j: 1, lo, hi });
    }
    let f = |x: f64| eval_characteristic(m, k, x);
    if let Ok(bracket) = Bracket::from_fn(f, lo, hi) {
        return Ok(bisect_root(f, &bracket, tol, BISECTION_MAX_ITER)?);
    }
    // near-degenerate signs on the direct form: fall back to the cubic
    let bracket =
        Bracket::from_fn(g, lo, hi).map_err(|_| SpectralError::BracketFailure { j: 1, lo, hi })?;
    Ok(bisect_root(g, &bracket, tol, BISECTION_MAX_ITER)?)
}

/// Strict interlacing −r_N < a_N < −r_{N−1} < … < −r_1 < a_1.
pub fn interlacing_holds(m: &EbmModel, cluster: &Cluster) -> bool {
    let a = cluster.real_roots();
    let r = m.rates();
    if a.len() != r.len() {
        return false;
    }
    let n = r.len();
    for j in 0..n {
        // a_{j+1} ∈ (−r_{j+1}, −r_j), with −r_0 = +∞
        let upper = if j == 0 { f64::INFINITY } else { -r[j - 1] };
        if !(a[j] > -r[j] && a[j] < upper) {
            return false;
        }
    }
    true
}

/// Whether the extra pair sits where the localization lemma puts it:
/// complex with real part in ((−r_N−a_1)/2, (−r_1−a_1)/2), or real
/// inside (−r_N, a_1). A hair of slack absorbs round-off on the open
/// boundaries.
pub fn extra_pair_localized(m: &EbmModel, cluster: &Cluster) -> bool {
    let r = m.rates();
    let a1 = cluster.real_roots()[0];
    let r_n = r[r.len() - 1];
    let slack = 1e-9 * r_n.max(a1.abs());
    let (z1, z2) = cluster.extra_roots();
    let band = (0.5 * (-r_n - a1) - slack, 0.5 * (-r[0] - a1) + slack);
    [z1, z2].iter().all(|z| {
        if z.im == 0.0 {
            z.re > -r_n - slack && z.re < a1 + slack
        } else {
            z.re > band.0 && z.re < band.1
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relaxation::Regime;

    fn reference_model() -> EbmModel {
        EbmModel::new(1.0, vec![2.0], vec![2.0]).unwrap()
    }

    fn k(v: u32) -> FrequencyIndex {
        FrequencyIndex::new(v).unwrap()
    }

    fn default_model(n: usize, d: f64) -> EbmModel {
        let r: Vec<f64> = (1..=n).map(|i| 5.0 * i as f64).collect();
        EbmModel::new(d, vec![1.0; n], r).unwrap()
    }

    #[test]
    fn frequency_index_basics() {
        assert!(FrequencyIndex::new(0).is_err());
        assert_eq!(k(1).eta(), -1.0);
        assert_eq!(k(2).eta(), -9.0);
        assert_eq!(k(81).eta(), -(161.0 * 161.0));
    }

    #[test]
    fn charpoly_reference_cubic() {
        // (1 + λ²)(λ + 2) − 2 = λ³ + 2λ² + λ
        let p = characteristic_polynomial(&reference_model(), k(1));
        assert_eq!(p.coefficients(), &[0.0, 1.0, 2.0, 1.0]);
    }

    #[test]
    fn charpoly_at_negated_rate_drops_to_weight_term() {
        let m = default_model(4, 2.5);
        let p = characteristic_polynomial(&m, k(3));
        for (i, &ri) in m.rates().iter().enumerate() {
            let mut expected = -m.weights()[i];
            for (j, &rj) in m.rates().iter().enumerate() {
                if j != i {
                    expected *= -ri + rj;
                }
            }
            let got = p.evaluate(-ri);
            assert!(
                (got - expected).abs() <= 1e-12 * expected.abs(),
                "i={i}: {got} vs {expected}"
            );
            // sign alternation (−1)^i with 1-based i
            let sign = if (i + 1) % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(got.signum(), sign);
        }
    }

    #[test]
    fn charpoly_root_at_zero_iff_glassy() {
        let r = vec![5.0, 10.0];
        let h: f64 = 1.0 / 5.0 + 1.0 / 10.0;
        let m = EbmModel::new(h, vec![1.0, 1.0], r).unwrap();
        assert_eq!(m.modulus_h().1, Regime::Glassy);
        let p = characteristic_polynomial(&m, k(4));
        assert!(p.evaluate(0.0).abs() <= 1e-14 * p.evaluate_abs(1.0));
    }

    #[test]
    fn direct_and_expanded_charpoly_agree() {
        let m = default_model(5, 1.0);
        let p = characteristic_polynomial(&m, k(81));
        for i in 0..40 {
            let x = -27.0 + i as f64 * 1.5;
            let direct = eval_characteristic(&m, k(81), x);
            let expanded = p.evaluate(x);
            assert!((direct - expanded).abs() <= 1e-9 * p.evaluate_abs(x).max(1e-300));
        }
    }

    #[test]
    fn charpoly_leading_coefficient_is_exact() {
        let m = default_model(3, 0.7);
        for kv in [1, 2, 81, 501, 1001] {
            let p = characteristic_polynomial(&m, k(kv));
            assert_eq!(p.degree(), m.dimension() + 2);
            assert_eq!(p.leading_coefficient(), k(kv).leading_coefficient());
        }
    }

    #[test]
    fn augmented_matrix_reference_entries() {
        // N=1, D=1, b=2, r=2, k=1: v-row carries Dη and −b, w-row η and −r
        let m = reference_model();
        let a = build_augmented_matrix(&m, k(1));
        assert_eq!(a.order(), 3);
        let expected = [[0.0, 1.0, 0.0], [-1.0, 0.0, -2.0], [-1.0, 0.0, -2.0]];
        for (i, row) in expected.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert_eq!(a.get(i, j), v, "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn augmented_matrix_sparsity() {
        // 1 (u-row) + N+1 (v-row) + 2N (w-rows) nonzeros
        let m = default_model(2, 1.0);
        let a = build_augmented_matrix(&m, k(5));
        assert_eq!(a.nonzero_count(), 3 * 2 + 2);
    }

    #[test]
    fn eigenvector_components() {
        let m = reference_model();
        let v = eigenvector(&m, k(1), Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(
            v,
            vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(-0.5, 0.0)
            ]
        );

        let m = EbmModel::new(1.0, vec![1.0], vec![1.0]).unwrap();
        let v = eigenvector(&m, k(2), Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(v[2], Complex64::new(-4.5, 0.0));
    }

    #[test]
    fn eigenvector_rejects_pole() {
        let m = reference_model();
        let err = eigenvector(&m, k(1), Complex64::new(-2.0, 0.0)).unwrap_err();
        assert!(matches!(err, SpectralError::PoleCollision { index: 1, .. }));
    }

    #[test]
    fn eigenvector_residual_at_computed_eigenvalues() {
        let m = default_model(5, 1.0);
        let kk = k(81);
        let a = build_augmented_matrix(&m, kk);
        let cluster = compute_cluster(&m, kk, 1e-12).unwrap();
        for lambda in cluster.all_roots() {
            let v = eigenvector(&m, kk, lambda).unwrap();
            let av = a.apply_complex(&v);
            let v_norm = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let residual = av
                .iter()
                .zip(&v)
                .map(|(out, x)| (out - lambda * x).norm())
                .fold(0.0, f64::max);
            assert!(residual <= 1e-9 * a.infinity_norm() * v_norm);
        }
    }

    #[test]
    fn cluster_reference_roots() {
        // λ(λ+1)²: glassy zero root and the double root at −1. A double
        // root is only determined to ~√(residual), so the pair may come
        // back real or faintly complex.
        let cluster = compute_cluster(&reference_model(), k(1), 1e-12).unwrap();
        assert_eq!(cluster.dimension(), 1);
        assert!(cluster.real_roots()[0].abs() <= 1e-12);
        let (z1, z2) = cluster.extra_roots();
        assert!((z1 + 1.0).norm() <= 1e-5);
        assert!((z2 + 1.0).norm() <= 1e-5);
    }

    #[test]
    fn glassy_zero_root_for_every_k() {
        let r: Vec<f64> = (1..=5).map(|i| 5.0 * i as f64).collect();
        let h: f64 = r.iter().map(|ri| 1.0 / ri).sum();
        let m = EbmModel::new(h, vec![1.0; 5], r).unwrap();
        for kv in [1, 2, 17, 81, 501, 1001] {
            let cluster = compute_cluster(&m, k(kv), 1e-12).unwrap();
            assert!(
                cluster.real_roots()[0].abs() <= 1e-10,
                "k={kv}: a_1 = {}",
                cluster.real_roots()[0]
            );
        }
    }

    #[test]
    fn cluster_residuals_and_interlacing_default_five() {
        let m = default_model(5, 0.5);
        let kk = k(81);
        let p = characteristic_polynomial(&m, kk);
        let cluster = compute_cluster(&m, kk, 1e-12).unwrap();
        assert!(interlacing_holds(&m, &cluster));
        for z in cluster.all_roots() {
            let residual = p.evaluate_complex(z).norm();
            assert!(residual <= 1e-10 * p.evaluate_abs(z.norm().max(1.0)));
        }
    }

    #[test]
    fn secular_residual_values() {
        let m = reference_model();
        assert_eq!(secular_residual(&m, k(1), 0.0).unwrap(), 0.0);

        let m = default_model(5, 1.0);
        let kk = k(81);
        let cluster = compute_cluster(&m, kk, 1e-12).unwrap();
        let scale = m.d() + m.weights().iter().map(|b| b / m.rates()[0]).sum::<f64>();
        for &a in cluster.real_roots() {
            let res = secular_residual(&m, kk, a).unwrap();
            assert!(res.abs() <= 1e-8 * scale);
        }
    }

    #[test]
    fn secular_residual_rejects_pole() {
        let m = reference_model();
        assert!(matches!(
            secular_residual(&m, k(1), -2.0),
            Err(SpectralError::PoleCollision { .. })
        ));
    }

    #[test]
    fn a1_sign_tracks_regime() {
        let r: Vec<f64> = (1..=4).map(|i| 3.0 * i as f64).collect();
        let b = vec![1.0, 0.5, 2.0, 0.25];
        let h: f64 = b.iter().zip(&r).map(|(b, r)| b / r).sum();
        for (d, expect_sign) in [(h * 2.0, -1.0), (h, 0.0), (h * 0.5, 1.0)] {
            let m = EbmModel::new(d, b.clone(), r.clone()).unwrap();
            let cluster = compute_cluster(&m, k(81), 1e-12).unwrap();
            let a1 = cluster.real_roots()[0];
            if expect_sign == 0.0 {
                assert!(a1.abs() <= 1e-10);
            } else {
                assert_eq!(a1.signum(), expect_sign, "D = {d}");
            }
        }
    }

    #[test]
    fn extra_pair_localization_on_defaults() {
        for n in [5, 9] {
            for d in [0.5, 1.0, 5.0] {
                let m = default_model(n, d);
                for kv in [81, 501, 1001] {
                    let cluster = compute_cluster(&m, k(kv), 1e-12).unwrap();
                    assert!(extra_pair_localized(&m, &cluster), "N={n} D={d} k={kv}");
                }
            }
        }
    }
}
