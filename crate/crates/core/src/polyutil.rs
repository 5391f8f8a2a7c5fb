//! Dense real-coefficient polynomial arithmetic and bracketed scalar
//! root finding.
//!
//! Coefficients are stored in ascending degree order: `coefficients[j]`
//! multiplies `x^j`. Horner evaluation and synthetic division both walk
//! the vector once.

use num_complex::Complex64;
use thiserror::Error;

/// Relative tolerance for matching non-real roots into conjugate pairs.
pub const CONJUGATE_MATCH_RTOL: f64 = 1e-9;

/// Relative tolerance on `|p(root)|` accepted by [`Polynomial::deflate`].
pub const DEFLATION_RTOL: f64 = 1e-6;

/// Default bisection interval tolerance (absolute).
pub const BISECTION_TOL: f64 = 1e-12;

/// Default bisection iteration cap.
pub const BISECTION_MAX_ITER: usize = 200;

#[derive(Debug, Error)]
pub enum PolyError {
    #[error("root {root} has no conjugate partner within tolerance")]
    ConjugacyViolation { root: Complex64 },
    #[error("{root} is not a root: |p(root)| = {residual:e} exceeds {bound:e}")]
    NotARoot {
        root: f64,
        residual: f64,
        bound: f64,
    },
    #[error("expected a polynomial of degree {expected}, got degree {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("[{lo}, {hi}] is not a valid bracket")]
    InvalidBracket { lo: f64, hi: f64 },
    #[error("endpoints of [{lo}, {hi}] evaluate to the same sign")]
    SignAgreement { lo: f64, hi: f64 },
    #[error("function evaluated to a non-finite value at {x}")]
    NonFiniteEvaluation { x: f64 },
    #[error("bisection did not reach width {tol:e} in {max_iter} iterations (width {width:e})")]
    MaxIterExceeded {
        tol: f64,
        max_iter: usize,
        width: f64,
    },
}

/// Univariate polynomial with real coefficients, ascending degree order.
///
/// The representation is normalized: trailing zero coefficients are
/// trimmed, and the zero polynomial is exactly `[0.0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Builds a polynomial from ascending-order coefficients.
    ///
    /// Panics if any coefficient is non-finite.
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(
            coeffs.iter().all(|c| c.is_finite()),
            "polynomial coefficients must be finite"
        );
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: vec![0.0] }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs == [0.0]
    }

    pub fn leading_coefficient(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    /// Horner evaluation at a real point.
    pub fn evaluate(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Horner evaluation over complex arithmetic; agrees with
    /// [`Polynomial::evaluate`] on the real axis.
    pub fn evaluate_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Σ |c_j| |x|^j, the natural magnitude scale of an evaluation at x.
    pub fn evaluate_abs(&self, x: f64) -> f64 {
        let ax = x.abs();
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc: f64, &c| acc * ax + c.abs())
    }

    /// Expands `leading · Π (x − root_j)` to real coefficients.
    ///
    /// Non-real roots must occur in conjugate pairs; each pair is folded
    /// into a real quadratic factor before the real linear factors are
    /// multiplied in, so no imaginary round-off leaks into the result.
    pub fn from_roots(roots: &[Complex64], leading: f64) -> Result<Self, PolyError> {
        assert!(
            leading != 0.0 && leading.is_finite(),
            "invalid leading coefficient"
        );
        let mut result = vec![leading];
        let complex: Vec<Complex64> = roots.iter().copied().filter(|z| z.im != 0.0).collect();
        let mut used = vec![false; complex.len()];
        for i in 0..complex.len() {
            if used[i] {
                continue;
            }
            let z = complex[i];
            let mut partner = None;
            let mut best = f64::INFINITY;
            for (j, w) in complex.iter().enumerate().skip(i + 1) {
                if used[j] {
                    continue;
                }
                let gap = (z - w.conj()).norm();
                if gap < best {
                    best = gap;
                    partner = Some(j);
                }
            }
            let ok = partner.is_some() && best <= CONJUGATE_MATCH_RTOL * z.norm().max(1.0);
            if !ok {
                return Err(PolyError::ConjugacyViolation { root: z });
            }
            let j = partner.unwrap();
            used[i] = true;
            used[j] = true;
            let w = complex[j];
            // (x - z)(x - w) with w ≈ conj(z): real quadratic
            result = convolve(&result, &[(z * w).re, -(z + w).re, 1.0]);
        }
        for z in roots.iter().filter(|z| z.im == 0.0) {
            result = convolve(&result, &[-z.re, 1.0]);
        }
        Ok(Polynomial::new(result))
    }

    /// Synthetic division by `(x − root)` after checking that `root`
    /// is an (approximate) root.
    pub fn deflate(&self, root: f64) -> Result<Self, PolyError> {
        let residual = self.evaluate(root).abs();
        let bound = DEFLATION_RTOL * self.evaluate_abs(root);
        if residual > bound {
            return Err(PolyError::NotARoot {
                root,
                residual,
                bound,
            });
        }
        let (quotient, _) = self.synthetic_division(root)?;
        Ok(quotient)
    }

    /// Divides by `(x − root)`, returning quotient and remainder.
    pub(crate) fn synthetic_division(&self, root: f64) -> Result<(Self, f64), PolyError> {
        let n = self.degree();
        if n == 0 {
            return Err(PolyError::DegreeMismatch {
                expected: 1,
                found: 0,
            });
        }
        let mut quotient = vec![0.0; n];
        quotient[n - 1] = self.coeffs[n];
        for j in (1..n).rev() {
            quotient[j - 1] = self.coeffs[j] + root * quotient[j];
        }
        let remainder = self.coeffs[0] + root * quotient[0];
        Ok((Polynomial::new(quotient), remainder))
    }

    /// Both roots of a quadratic, via the cancellation-free formula.
    ///
    /// Real roots come back descending with zero imaginary part; a
    /// complex pair comes back as `(p + iq, p − iq)` with `q > 0`.
    pub fn solve_quadratic(&self) -> Result<(Complex64, Complex64), PolyError> {
        if self.degree() != 2 {
            return Err(PolyError::DegreeMismatch {
                expected: 2,
                found: self.degree(),
            });
        }
        let (c, b, a) = (self.coeffs[0], self.coeffs[1], self.coeffs[2]);
        let disc = b * b - 4.0 * a * c;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            // q = -(b + sign(b)·√disc)/2 avoids subtracting like signs
            let q = -0.5 * (b + sq.copysign(if b == 0.0 { 1.0 } else { b }));
            let (r1, r2) = if q == 0.0 {
                (0.0, -b / a)
            } else {
                (q / a, c / q)
            };
            let (hi, lo) = if r1 >= r2 { (r1, r2) } else { (r2, r1) };
            Ok((Complex64::new(hi, 0.0), Complex64::new(lo, 0.0)))
        } else {
            let re = -b / (2.0 * a);
            let im = (-disc).sqrt() / (2.0 * a.abs());
            Ok((Complex64::new(re, im), Complex64::new(re, -im)))
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Polynomial::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    /// Multiplies by `x^m`.
    pub fn shifted_up(&self, m: usize) -> Self {
        if self.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![0.0; m];
        coeffs.extend_from_slice(&self.coeffs);
        Polynomial::new(coeffs)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut coeffs = vec![0.0; self.coeffs.len().max(other.coeffs.len())];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        for (i, &c) in other.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        Polynomial::new(coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scaled(-1.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        Polynomial::new(convolve(&self.coeffs, &other.coeffs))
    }

    /// Drops the `m` lowest-order coefficients, i.e. divides by `x^m`
    /// discarding the (presumed negligible) low-order part.
    pub fn shifted_down(&self, m: usize) -> Self {
        if self.coeffs.len() <= m {
            return Polynomial::zero();
        }
        Polynomial::new(self.coeffs[m..].to_vec())
    }
}

fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// A sign-change interval: `f` has opposite (nonzero) signs at `lo` and `hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    lo: f64,
    hi: f64,
    f_lo_sign: i8,
    f_hi_sign: i8,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64, f_lo_sign: i8, f_hi_sign: i8) -> Result<Self, PolyError> {
        let signs_ok = (f_lo_sign == 1 || f_lo_sign == -1)
            && (f_hi_sign == 1 || f_hi_sign == -1)
            && f_lo_sign != f_hi_sign;
        if !(lo.is_finite() && hi.is_finite() && lo < hi && signs_ok) {
            return Err(PolyError::InvalidBracket { lo, hi });
        }
        Ok(Bracket {
            lo,
            hi,
            f_lo_sign,
            f_hi_sign,
        })
    }

    /// Evaluates `f` at both endpoints and requires a strict sign change.
    pub fn from_fn<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<Self, PolyError> {
        let (f_lo, f_hi) = (f(lo), f(hi));
        if !f_lo.is_finite() {
            return Err(PolyError::NonFiniteEvaluation { x: lo });
        }
        if !f_hi.is_finite() {
            return Err(PolyError::NonFiniteEvaluation { x: hi });
        }
        Bracket::new(lo, hi, sign_of(f_lo), sign_of(f_hi))
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

fn sign_of(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Bisection on a validated bracket.
///
/// Returns the midpoint of the final interval once its width is at most
/// `tol`; the result always lies strictly inside the initial bracket. An
/// exact zero hit returns early.
pub fn bisect_root<F: Fn(f64) -> f64>(
    f: F,
    bracket: &Bracket,
    tol: f64,
    max_iter: usize,
) -> Result<f64, PolyError> {
    assert!(tol > 0.0, "bisection tolerance must be positive");
    let (mut lo, mut hi) = (bracket.lo, bracket.hi);
    let f_lo = f(lo);
    let f_hi = f(hi);
    if !f_lo.is_finite() || !f_hi.is_finite() {
        return Err(PolyError::NonFiniteEvaluation {
            x: if f_lo.is_finite() { hi } else { lo },
        });
    }
    if sign_of(f_lo) == 0 || sign_of(f_lo) == sign_of(f_hi) {
        return Err(PolyError::SignAgreement { lo, hi });
    }
    let lo_positive = f_lo > 0.0;
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol {
            return Ok(mid);
        }
        if mid <= lo || mid >= hi {
            // adjacent floats: the interval cannot split further
            return Ok(mid);
        }
        let f_mid = f(mid);
        if !f_mid.is_finite() {
            return Err(PolyError::NonFiniteEvaluation { x: mid });
        }
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if hi - lo <= tol {
        Ok(0.5 * (lo + hi))
    } else {
        Err(PolyError::MaxIterExceeded {
            tol,
            max_iter,
            width: hi - lo,
        })
    }
}
