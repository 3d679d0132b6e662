//! Special functions entering the coarse-grained lower bounds: the radial
//! prolate spheroidal function R00, the Rényi envelope ε_α, the error
//! function, and the implicit K(t) appearing in the non-trivial variance
//! bound, together with the inverse of its companion function M(y).

use std::collections::HashMap;
use std::f64::consts::{E, PI};
use std::sync::Mutex;

use nalgebra::DMatrix;
use once_cell::sync::Lazy;

use crate::{Error, Result};

/// Error function, accurate to close to machine precision over the real line.
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Complementary error function; keeps relative accuracy in the tails where
/// `1 - erf(x)` would cancel.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Series branch is used up to this argument; beyond it the terminal
/// asymptotic `(2x/π) R00²(x,1) = 1 - 4√(πx) e^{-2x}` is already accurate to
/// ~1e-13 while the Legendre series starts losing digits to cancellation
/// (both numerator and denominator shrink like e^{-x}).
const SERIES_ASYMPTOTIC_SWITCH: f64 = 14.0;

/// Evaluator for the radial prolate spheroidal wave function of the first
/// kind `R00(x, 1)`.
///
/// The angular function is expanded in even Legendre polynomials; the
/// expansion coefficients solve a symmetric tridiagonal eigenproblem whose
/// lowest eigenvalue belongs to the (0,0) mode, and the radial value at unit
/// radial coordinate is assembled from the same coefficients and spherical
/// Bessel functions. Truncation grows adaptively until the trailing
/// coefficient is negligible.
pub struct ProlateEvaluator {
    truncation: usize,
    tolerance: f64,
    cache: Mutex<HashMap<i64, f64>>,
}

impl Default for ProlateEvaluator {
    fn default() -> Self {
        Self::new(16, 1e-14)
    }
}

static GLOBAL_EVALUATOR: Lazy<ProlateEvaluator> = Lazy::new(ProlateEvaluator::default);

impl ProlateEvaluator {
    pub fn new(truncation: usize, tolerance: f64) -> Self {
        ProlateEvaluator {
            truncation: truncation.max(16),
            tolerance,
            cache: Mutex::new(HashMap::new()),
        }
    }

    /// Shared process-wide evaluator.
    pub fn global() -> &'static ProlateEvaluator {
        &GLOBAL_EVALUATOR
    }

    /// `R00(x, 1)` for `x >= 0`.
    pub fn r00(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "r00 requires x >= 0, got {x}"
            )));
        }
        if x == 0.0 {
            return Ok(1.0);
        }
        if x > SERIES_ASYMPTOTIC_SWITCH {
            let lambda0 = 1.0 - 4.0 * (PI * x).sqrt() * (-2.0 * x).exp();
            return Ok((PI * lambda0 / (2.0 * x)).sqrt());
        }
        let key = (x / 1e-13).round() as i64;
        if let Some(v) = self.cache.lock().unwrap().get(&key) {
            return Ok(*v);
        }
        let n = self.terms_for(x);
        let v1 = r00_series(x, n)?;
        let v2 = r00_series(x, n + 16)?;
        if (v1 - v2).abs() > 1e-10 * v2.abs().max(1.0) {
            return Err(Error::Numeric(format!(
                "prolate series truncation levels disagree at x={x}: {v1} vs {v2}"
            )));
        }
        self.cache.lock().unwrap().insert(key, v2);
        Ok(v2)
    }

    /// `g(x) = R00²(x,1)/2`, the envelope term of ε_α.
    pub fn half_r00_squared(&self, x: f64) -> Result<f64> {
        Ok(0.5 * self.r00(x)?.powi(2))
    }

    fn terms_for(&self, x: f64) -> usize {
        let mut n = self.truncation.max((x.ceil() as usize) + 40);
        // grow until the trailing expansion coefficient is negligible
        loop {
            let (_, d) = prolate_lowest_mode(x, n);
            let dmax = d.iter().cloned().fold(0.0f64, |a, b| a.max(b.abs()));
            if d[n - 1].abs() < self.tolerance * dmax || n > 2048 {
                return n;
            }
            n += 16;
        }
    }

    /// Location of the crossover where `R00²(x,1)/2 = 1/e`, found by
    /// bisection on the monotone decreasing envelope.
    pub fn eps1_crossover(&self) -> Result<f64> {
        let target = 1.0 / E;
        let (mut lo, mut hi) = (1.0, 3.0);
        let f = |x: f64| -> Result<f64> { Ok(self.half_r00_squared(x)? - target) };
        if f(lo)? < 0.0 || f(hi)? > 0.0 {
            return Err(Error::BracketFailure {
                func: "eps1_crossover",
                target,
            });
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if f(mid)? > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Lowest angular prolate mode for spheroidal parameter `c`: returns the
/// eigenvalue and the even-order Legendre expansion coefficients d_{2k}.
fn prolate_lowest_mode(c: f64, nterms: usize) -> (f64, Vec<f64>) {
    let c2 = c * c;
    let mut alpha = vec![0.0; nterms];
    let mut beta = vec![0.0; nterms];
    let mut gamma = vec![0.0; nterms];
    for (k, ((a, b), g)) in alpha
        .iter_mut()
        .zip(beta.iter_mut())
        .zip(gamma.iter_mut())
        .enumerate()
    {
        let r = 2.0 * k as f64;
        *a = (r + 2.0) * (r + 1.0) * c2 / ((2.0 * r + 3.0) * (2.0 * r + 5.0));
        *b = r * (r + 1.0) + c2 * (2.0 * r * (r + 1.0) - 1.0) / ((2.0 * r - 1.0) * (2.0 * r + 3.0));
        *g = r * (r - 1.0) * c2 / ((2.0 * r - 3.0) * (2.0 * r - 1.0));
    }
    // similarity transform to a symmetric tridiagonal: off-diagonal
    // b_k = sqrt(alpha_k * gamma_{k+1}), eigenvector scales s_{k+1}/s_k =
    // sqrt(gamma_{k+1}/alpha_k).
    let mut m = DMatrix::<f64>::zeros(nterms, nterms);
    for k in 0..nterms {
        m[(k, k)] = beta[k];
        if k + 1 < nterms {
            let b = (alpha[k] * gamma[k + 1]).sqrt();
            m[(k, k + 1)] = b;
            m[(k + 1, k)] = b;
        }
    }
    let eig = m.symmetric_eigen();
    let mut idx = 0;
    for i in 1..nterms {
        if eig.eigenvalues[i] < eig.eigenvalues[idx] {
            idx = i;
        }
    }
    let v = eig.eigenvectors.column(idx);
    let mut d = vec![0.0; nterms];
    let mut s = 1.0;
    d[0] = v[0];
    for k in 0..nterms - 1 {
        s *= (gamma[k + 1] / alpha[k]).sqrt();
        d[k + 1] = v[k + 1] * s;
    }
    if d[0] < 0.0 {
        for x in d.iter_mut() {
            *x = -*x;
        }
    }
    (eig.eigenvalues[idx], d)
}

fn r00_series(c: f64, nterms: usize) -> Result<f64> {
    let (_, d) = prolate_lowest_mode(c, nterms);
    let j = spherical_bessel_even(c, 2 * (nterms - 1));
    let mut num = 0.0;
    let mut den = 0.0;
    for (k, dk) in d.iter().enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        num += sign * dk * j[k];
        den += dk;
    }
    if den.abs() < 1e-280 {
        return Err(Error::Numeric(format!(
            "prolate series denominator vanished at c={c}"
        )));
    }
    Ok(num / den)
}

/// Spherical Bessel functions j_r(x) for even r = 0, 2, ..., rmax, by Miller
/// downward recurrence normalized to j0 = sin(x)/x.
fn spherical_bessel_even(x: f64, rmax: usize) -> Vec<f64> {
    let start = rmax + 24 + (2.0 * (rmax as f64).sqrt()) as usize;
    let mut next = 0.0f64;
    let mut cur = 1e-280f64;
    let mut vals = vec![0.0; rmax + 2];
    for k in (0..=start).rev() {
        let prev = (2.0 * (k + 1) as f64 + 1.0) / x * cur - next;
        next = cur;
        cur = prev;
        if k <= rmax + 1 {
            vals[k] = cur;
        }
        if cur.abs() > 1e200 {
            let scale = 1e-200;
            cur *= scale;
            next *= scale;
            for v in vals.iter_mut() {
                *v *= scale;
            }
        }
    }
    let j0 = x.sin() / x;
    let scale = j0 / vals[0];
    (0..=rmax / 2).map(|k| vals[2 * k] * scale).collect()
}

/// The Rényi conjugacy constant `alpha^{1/(2-2alpha)} beta^{1/(2-2beta)}`
/// with `1/alpha + 1/beta = 2`, continuous on [1/2, 1] with value 1/2 at
/// alpha = 1/2 and 1/e in the alpha -> 1 limit.
pub fn renyi_conjugacy_constant(alpha: f64) -> Result<f64> {
    if !(0.5..=1.0).contains(&alpha) {
        return Err(Error::InvalidConjugateAlpha(alpha));
    }
    if (alpha - 1.0).abs() < 1e-12 {
        return Ok(1.0 / E);
    }
    if (alpha - 0.5).abs() < 1e-12 {
        return Ok(0.5);
    }
    let beta = alpha / (2.0 * alpha - 1.0);
    let log_c = alpha.ln() / (2.0 - 2.0 * alpha) + beta.ln() / (2.0 - 2.0 * beta);
    Ok(log_c.exp())
}

/// ε_α(x): the effective constant of the coarse-grained entropic bounds,
/// `min{alpha^{1/(2-2alpha)} beta^{1/(2-2beta)}, R00²(x,1)/2}`.
pub fn eps_alpha(alpha: f64, x: f64) -> Result<f64> {
    let c = renyi_conjugacy_constant(alpha)?;
    let g = ProlateEvaluator::global().half_r00_squared(x)?;
    Ok(c.min(g))
}

/// Schürmann's conjectured replacement for ε₁, `e^{-1} R00²(2x/e, 1)`.
/// Diagnostic only; not asserted as a theorem anywhere in the crate.
pub fn eps1_schurmann_conjecture(x: f64) -> Result<f64> {
    Ok(ProlateEvaluator::global().r00(2.0 * x / E)?.powi(2) / E)
}

/// M(y) = exp(-y/4) / (2 sqrt(pi y) erf(sqrt(y)/2)); strictly decreasing
/// from +inf at y -> 0 to 0 at y -> inf.
pub fn m_of_y(y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "M(y) requires y > 0, got {y}"
        )));
    }
    Ok((-y / 4.0).exp() / (2.0 * (PI * y).sqrt() * erf(y.sqrt() / 2.0)))
}

/// Inverse of [`m_of_y`], to relative accuracy ~1e-14, by exponential
/// bracketing followed by bisection.
pub fn m_inverse(t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "M inverse requires finite t > 0, got {t}"
        )));
    }
    let mut lo = 1e-8;
    let mut hi = 1.0;
    while m_of_y(hi)? > t {
        hi *= 2.0;
        if hi > 1e8 {
            return Err(Error::BracketFailure {
                func: "m_inverse",
                target: t,
            });
        }
    }
    while m_of_y(lo)? < t {
        lo *= 0.25;
        if lo < 1e-290 {
            return Err(Error::BracketFailure {
                func: "m_inverse",
                target: t,
            });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if m_of_y(mid)? > t {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= 1e-15 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// K(t) = exp(2 t M⁻¹(t)) / erf²(sqrt(M⁻¹(t))/2), the per-observable factor
/// of the non-trivial coarse-grained variance bound. K(0) = 1 and
/// Δ² K(σ²/Δ²) -> 2πe σ² as Δ -> 0.
pub fn k_of_t(t: f64) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "K(t) requires finite t >= 0, got {t}"
        )));
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    let y = m_inverse(t)?;
    let e = erf(y.sqrt() / 2.0);
    Ok((2.0 * t * y).exp() / (e * e))
}
