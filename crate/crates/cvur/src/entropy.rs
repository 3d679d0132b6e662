//! Differential and discrete Shannon/Rényi entropies, the exact
//! decomposition h[Q] = H[P] + h[D], and the Jensen inequality h[Q] >= h[P].

use std::f64::consts::{E, PI};

use crate::coarse_grain::{
    bin_probabilities, hf_moments, render_q, DiscreteDistribution, HistogramFunction, QDensity,
    StandardCg,
};
use crate::numeric::integrate_adaptive;
use crate::report::{UrKind, UrReport};
use crate::states::Marginal;
use crate::{Error, Result};

/// Rényi order α > 0; α = 1 selects the Shannon limit, `f64::INFINITY` the
/// min-entropy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenyiOrder(f64);

impl RenyiOrder {
    pub const SHANNON: RenyiOrder = RenyiOrder(1.0);

    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && !alpha.is_nan() {
            Ok(RenyiOrder(alpha))
        } else {
            Err(Error::InvalidOrder(alpha))
        }
    }

    pub fn alpha(&self) -> f64 {
        self.0
    }

    pub fn is_shannon(&self) -> bool {
        self.0 == 1.0
    }
}

/// Conjugate Rényi orders: 1/α + 1/β = 2 with 1/2 <= α <= 1 (so β ranges
/// from 1 up to infinity at α = 1/2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjugatePair {
    alpha: f64,
    beta: f64,
}

impl ConjugatePair {
    pub fn from_alpha(alpha: f64) -> Result<Self> {
        if !(0.5..=1.0).contains(&alpha) {
            return Err(Error::InvalidConjugateAlpha(alpha));
        }
        let beta = if alpha == 0.5 {
            f64::INFINITY
        } else {
            alpha / (2.0 * alpha - 1.0)
        };
        Ok(ConjugatePair { alpha, beta })
    }

    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(0.5..=1.0).contains(&alpha) {
            return Err(Error::InvalidConjugateAlpha(alpha));
        }
        let defect = if beta.is_infinite() {
            (1.0 / alpha - 2.0).abs()
        } else {
            (1.0 / alpha + 1.0 / beta - 2.0).abs()
        };
        if defect > 1e-12 {
            return Err(Error::InvalidConjugateAlpha(alpha));
        }
        Ok(ConjugatePair { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn is_shannon(&self) -> bool {
        self.alpha == 1.0
    }
}

/// Differential Rényi entropy h_α[P] = ln(∫P^α)/(1-α), with the Shannon
/// limit −∫P ln P at α = 1 (0·ln 0 := 0) and −ln sup P at α = ∞.
///
/// Gaussian marginals use closed forms; mixtures use adaptive quadrature on
/// their support; grid densities use midpoint sums (whose error for smooth
/// decaying integrands is far below the verdict tolerance).
pub fn differential_entropy(density: &Marginal, order: RenyiOrder) -> Result<f64> {
    let alpha = order.alpha();
    match density {
        Marginal::Gaussian { variance, .. } => Ok(gaussian_entropy(*variance, alpha)),
        Marginal::GaussianMixture(_) => {
            let (lo, hi) = density.range_hint();
            let tol = 1e-12;
            if alpha.is_infinite() {
                return Ok(-max_pdf(density, lo, hi).ln());
            }
            if order.is_shannon() {
                let h = integrate_adaptive(
                    |u| {
                        let p = density.pdf(u);
                        if p > 0.0 {
                            -p * p.ln()
                        } else {
                            0.0
                        }
                    },
                    lo,
                    hi,
                    tol,
                );
                Ok(h)
            } else {
                let int = integrate_adaptive(|u| density.pdf(u).powf(alpha), lo, hi, tol);
                Ok(int.ln() / (1.0 - alpha))
            }
        }
        Marginal::Grid(g) => {
            let dx = g.dx();
            if alpha.is_infinite() {
                let max = g.values().iter().cloned().fold(0.0f64, f64::max);
                return Ok(-max.ln());
            }
            if order.is_shannon() {
                let h: f64 = g
                    .values()
                    .iter()
                    .filter(|&&v| v > 0.0)
                    .map(|&v| -v * v.ln() * dx)
                    .sum();
                Ok(h)
            } else {
                let int: f64 = g.values().iter().map(|&v| v.powf(alpha) * dx).sum();
                Ok(int.ln() / (1.0 - alpha))
            }
        }
    }
}

fn gaussian_entropy(variance: f64, alpha: f64) -> f64 {
    if alpha.is_infinite() {
        return 0.5 * (2.0 * PI * variance).ln();
    }
    if alpha == 1.0 {
        return 0.5 * (2.0 * PI * E * variance).ln();
    }
    0.5 * (2.0 * PI * variance).ln() + alpha.ln() / (2.0 * (alpha - 1.0))
}

fn max_pdf(density: &Marginal, lo: f64, hi: f64) -> f64 {
    let n = 4096;
    let mut best = 0.0f64;
    for i in 0..=n {
        let u = lo + (hi - lo) * i as f64 / n as f64;
        best = best.max(density.pdf(u));
    }
    best
}

/// Differential Rényi entropy of a piecewise density Q, integrated bin by
/// bin (independent of the discrete + HF decomposition identity).
pub fn q_entropy(q: &QDensity, order: RenyiOrder) -> Result<f64> {
    let alpha = order.alpha();
    if alpha.is_infinite() {
        let max = q
            .bins()
            .map(|(c, _)| q.eval(c))
            .fold(0.0f64, f64::max);
        return Ok(-max.ln());
    }
    if order.is_shannon() {
        Ok(q.integrate_of_density(|v| if v > 0.0 { -v * v.ln() } else { 0.0 }))
    } else {
        let int = q.integrate_of_density(|v| v.powf(alpha));
        Ok(int.ln() / (1.0 - alpha))
    }
}

/// Discrete Rényi entropy H_α of the outcome distribution, on probabilities
/// renormalized by the coverage. Nonnegative, and at most the log of the
/// number of occupied outcomes.
pub fn discrete_entropy(dist: &DiscreteDistribution, order: RenyiOrder) -> Result<f64> {
    if dist.is_empty() || dist.coverage() <= 0.0 {
        return Err(Error::EmptyDistribution);
    }
    let alpha = order.alpha();
    let probs = dist.renormalized();
    if alpha.is_infinite() {
        let max = probs.iter().cloned().fold(0.0f64, f64::max);
        return Ok(-max.ln());
    }
    if order.is_shannon() {
        Ok(probs
            .iter()
            .filter(|&&p| p > 1e-300)
            .map(|&p| -p * p.ln())
            .sum())
    } else {
        let s: f64 = probs
            .iter()
            .filter(|&&p| p > 1e-300)
            .map(|&p| p.powf(alpha))
            .sum();
        Ok(s.ln() / (1.0 - alpha))
    }
}

/// Both sides of the exact decomposition h_α[Q] = H_α[P] + h_α[D]: the left
/// by direct quadrature on Q, the right from the discrete entropy plus the
/// histogram-function entropy. They agree to ~1e-8 for faithful coverage.
pub fn decompose_q_entropy(
    dist: &DiscreteDistribution,
    hf: &HistogramFunction,
    order: RenyiOrder,
) -> Result<(f64, f64)> {
    let q = render_q(dist, hf)?;
    let lhs = q_entropy(&q, order)?;
    let rhs = discrete_entropy(dist, order)? + hf_moments(hf, order.alpha())?.0;
    Ok((lhs, rhs))
}

/// Shannon gap h[Q_Δ] − h[P] for rectangular histogram functions, i.e.
/// `H[P_Δ] + ln Δ − h[P]`. Nonnegative by the convexity of x ln x.
///
/// Restricted to the Shannon order: the per-α Rényi analogue is not a
/// theorem, so exploratory diagnostics must query the two sides separately.
pub fn jensen_gap(density: &Marginal, cg: &StandardCg) -> Result<f64> {
    let dist = bin_probabilities(density, cg);
    let h_disc = discrete_entropy(&dist, RenyiOrder::SHANNON)?;
    let h_cont = differential_entropy(density, RenyiOrder::SHANNON)?;
    Ok(h_disc + cg.delta().ln() - h_cont)
}

/// The variance–entropy inequality `ln(2πe σ²) >= 2 h[P]`, saturated
/// exactly by Gaussian densities.
pub fn entropy_variance_bound(density: &Marginal) -> Result<UrReport> {
    let var = density.variance();
    if !var.is_finite() || var <= 0.0 {
        return Err(Error::Numeric(format!(
            "variance must be finite and positive, got {var}"
        )));
    }
    let lhs = (2.0 * PI * E * var).ln();
    let bound = 2.0 * differential_entropy(density, RenyiOrder::SHANNON)?;
    Ok(UrReport::evaluate(UrKind::EntropyVariance, lhs, bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{GridWavefunction, Marginal, MixtureComponent};
    use approx::assert_relative_eq;

    #[test]
    fn gaussian_shannon_entropy_closed_form() {
        for s2 in [0.3, 1.0, 4.7] {
            let m = Marginal::gaussian(0.4, s2).unwrap();
            let h = differential_entropy(&m, RenyiOrder::SHANNON).unwrap();
            assert_relative_eq!(h, 0.5 * (2.0 * PI * E * s2).ln(), epsilon = 1e-14);
        }
    }

    #[test]
    fn gaussian_renyi_alpha2() {
        // integral of the squared unit gaussian is 1/(2 sqrt(pi))
        let m = Marginal::gaussian(0.0, 1.0).unwrap();
        let h = differential_entropy(&m, RenyiOrder::new(2.0).unwrap()).unwrap();
        assert_relative_eq!(h, (2.0 * PI.sqrt()).ln(), epsilon = 1e-14);
    }

    #[test]
    fn uniform_density_entropy_is_ln_length() {
        let n = 4000;
        let len = 2.5;
        let g = crate::states::GridDensity::new(
            vec![1.0 / len; n],
            -len / 2.0 + len / (2.0 * n as f64),
            len / n as f64,
            1.0,
        )
        .unwrap();
        let m = Marginal::Grid(g);
        for alpha in [0.5, 1.0, 2.0, 3.5] {
            let h = differential_entropy(&m, RenyiOrder::new(alpha).unwrap()).unwrap();
            assert_relative_eq!(h, len.ln(), epsilon = 1e-9);
        }
    }

    #[test]
    fn grid_entropy_matches_closed_form_for_vacuum() {
        let hbar = 1.0;
        let psi = GridWavefunction::coherent(4096, 15.0, 0.0, 0.0, hbar).unwrap();
        let m = Marginal::Grid(psi.position_density());
        let h = differential_entropy(&m, RenyiOrder::SHANNON).unwrap();
        assert_relative_eq!(h, 0.5 * (2.0 * PI * E * hbar / 2.0).ln(), epsilon = 1e-9);
    }

    #[test]
    fn discrete_entropy_cases() {
        use crate::coarse_grain::{bin_probabilities, StandardCg};
        // deterministic
        let cg = StandardCg::new(100.0, 0.0, 0, 0).unwrap();
        let d = bin_probabilities(&Marginal::gaussian(0.0, 1.0).unwrap(), &cg);
        assert!(discrete_entropy(&d, RenyiOrder::SHANNON).unwrap() < 1e-12);
        // uniform over d outcomes: ln d at every order
        let pcg = crate::coarse_grain::PeriodicCg::from_outcomes(0.23, 5, 0.0).unwrap();
        let n = 5000;
        let period = 5.0 * 0.23;
        let g = crate::states::GridDensity::new(
            vec![1.0 / period; n],
            period / (2.0 * n as f64),
            period / n as f64,
            1.0,
        )
        .unwrap();
        let d = crate::coarse_grain::pcg_probabilities(&Marginal::Grid(g), &pcg);
        for alpha in [0.6, 1.0, 2.0] {
            let h = discrete_entropy(&d, RenyiOrder::new(alpha).unwrap()).unwrap();
            assert_relative_eq!(h, 5.0f64.ln(), epsilon = 1e-7);
        }
    }

    #[test]
    fn discrete_renyi_direct_sum() {
        // p = (3/4, 1/4), alpha = 2 -> ln(8/5)
        let cg = StandardCg::new(1.0, 0.0, 0, 1).unwrap();
        // build via a mixture arranged to put 3/4 and 1/4 into the two bins
        let m = Marginal::mixture(vec![
            MixtureComponent {
                weight: 0.75,
                mean: 0.0,
                variance: 1e-8,
            },
            MixtureComponent {
                weight: 0.25,
                mean: 1.0,
                variance: 1e-8,
            },
        ])
        .unwrap();
        let d = bin_probabilities(&m, &cg);
        let h = discrete_entropy(&d, RenyiOrder::new(2.0).unwrap()).unwrap();
        assert_relative_eq!(h, (8.0f64 / 5.0).ln(), epsilon = 1e-9);
    }

    #[test]
    fn decomposition_identity_simple_cases() {
        // p_0 = 1, rectangular width 1: both sides 0
        let cg = StandardCg::new(1.0, 0.0, 0, 0).unwrap();
        let d = bin_probabilities(&Marginal::gaussian(0.0, 1e-4).unwrap(), &cg);
        let hf = HistogramFunction::rectangular(1.0).unwrap();
        let (l, r) = decompose_q_entropy(&d, &hf, RenyiOrder::SHANNON).unwrap();
        assert!(l.abs() < 1e-9 && r.abs() < 1e-9);

        // uniform over 4 bins of width 1/2: both sides ln 4 + ln 1/2
        let n = 4000;
        let g = crate::states::GridDensity::new(
            vec![0.5; n],
            -1.0 + 1.0 / n as f64,
            2.0 / n as f64,
            1.0,
        )
        .unwrap();
        let cg = StandardCg::new(0.5, -0.75, 0, 3).unwrap();
        let d = bin_probabilities(&Marginal::Grid(g), &cg);
        let hf = HistogramFunction::rectangular(0.5).unwrap();
        let (l, r) = decompose_q_entropy(&d, &hf, RenyiOrder::SHANNON).unwrap();
        let want = 4.0f64.ln() + 0.5f64.ln();
        assert_relative_eq!(l, want, epsilon = 1e-7);
        assert_relative_eq!(r, want, epsilon = 1e-7);
    }

    #[test]
    fn decomposition_identity_binned_vacuum_alpha_07() {
        let m = Marginal::gaussian(0.0, 0.5).unwrap();
        let cg = StandardCg::centered_on(&m, 0.37).unwrap();
        let d = bin_probabilities(&m, &cg);
        for hf in [
            HistogramFunction::rectangular(0.37).unwrap(),
            HistogramFunction::gaussian_optimal(0.37, 0.37 * 0.37 / 40.0).unwrap(),
        ] {
            let (l, r) = decompose_q_entropy(&d, &hf, RenyiOrder::new(0.7).unwrap()).unwrap();
            assert!((l - r).abs() < 1e-8, "lhs {l} rhs {r}");
        }
    }

    #[test]
    fn jensen_gap_cases() {
        // bins aligned with a uniform density: Q = P, gap 0
        let n = 4096;
        let g = crate::states::GridDensity::new(
            vec![1.0; n],
            0.5 / n as f64,
            1.0 / n as f64,
            1.0,
        )
        .unwrap();
        let m = Marginal::Grid(g);
        let cg = StandardCg::new(0.25, 0.125, 0, 3).unwrap();
        let gap = jensen_gap(&m, &cg).unwrap();
        assert!(gap.abs() < 1e-9, "gap {gap}");

        // vacuum with huge bins: strictly positive gap
        let vac = Marginal::gaussian(0.0, 0.5).unwrap();
        let cg = StandardCg::centered_on(&vac, 5.0 * 0.5f64.sqrt()).unwrap();
        assert!(jensen_gap(&vac, &cg).unwrap() > 0.1);

        // fine bins: gap below 1e-3
        let cg = StandardCg::centered_on(&vac, 0.5f64.sqrt() / 50.0).unwrap();
        let gap = jensen_gap(&vac, &cg).unwrap();
        assert!(gap >= -1e-12 && gap < 1e-3, "gap {gap}");
    }

    #[test]
    fn entropy_variance_relation() {
        // gaussian saturates
        let g = Marginal::gaussian(1.0, 2.3).unwrap();
        let rep = entropy_variance_bound(&g).unwrap();
        assert!(rep.margin.abs() < 1e-12);

        // uniform on length L: ln(2 pi e L^2/12) > 2 ln L
        let n = 8192;
        let len = 3.0;
        let u = crate::states::GridDensity::new(
            vec![1.0 / len; n],
            -len / 2.0 + len / (2.0 * n as f64),
            len / n as f64,
            1.0,
        )
        .unwrap();
        let rep = entropy_variance_bound(&Marginal::Grid(u)).unwrap();
        assert!(rep.margin > 0.1);
        assert_relative_eq!(
            rep.lhs,
            (2.0 * PI * E * len * len / 12.0).ln(),
            epsilon = 1e-6
        );

        // two-component mixture: strict inequality
        let mix = Marginal::mixture(vec![
            MixtureComponent {
                weight: 0.5,
                mean: -2.0,
                variance: 0.5,
            },
            MixtureComponent {
                weight: 0.5,
                mean: 2.0,
                variance: 0.5,
            },
        ])
        .unwrap();
        let rep = entropy_variance_bound(&mix).unwrap();
        assert!(rep.margin > 1e-3);
    }

    #[test]
    fn renyi_alpha_continuity_near_shannon() {
        let psi = GridWavefunction::coherent(2048, 14.0, 0.4, -0.3, 1.0).unwrap();
        let m = Marginal::Grid(psi.position_density());
        let h1 = differential_entropy(&m, RenyiOrder::SHANNON).unwrap();
        for alpha in [1.0 - 1e-3, 1.0 + 1e-3] {
            let h = differential_entropy(&m, RenyiOrder::new(alpha).unwrap()).unwrap();
            assert!((h - h1).abs() < 1e-2, "alpha {alpha}: {h} vs {h1}");
        }
    }

    #[test]
    fn conjugate_pair_construction() {
        let p = ConjugatePair::from_alpha(0.75).unwrap();
        assert_relative_eq!(1.0 / p.alpha() + 1.0 / p.beta(), 2.0, epsilon = 1e-15);
        assert!(ConjugatePair::from_alpha(0.3).is_err());
        assert!(ConjugatePair::new(0.75, 1.5).is_ok());
        assert!(ConjugatePair::new(0.75, 2.0).is_err());
        let edge = ConjugatePair::from_alpha(0.5).unwrap();
        assert!(edge.beta().is_infinite());
    }
}
