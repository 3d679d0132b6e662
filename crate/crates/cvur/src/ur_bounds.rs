//! Evaluators for the uncertainty relations: variance product and sum,
//! Schrödinger's strengthening, Shannon and Rényi entropic bounds, their
//! coarse-grained refinements, and the discrete Deutsch / Maassen–Uffink
//! bounds.

use std::f64::consts::{E, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::coarse_grain::{hf_moments, DiscreteDistribution, HistogramFunction};
use crate::entropy::{discrete_entropy, ConjugatePair, RenyiOrder};
use crate::report::{UrKind, UrReport};
use crate::special_fn::{eps_alpha, k_of_t, renyi_conjugacy_constant};
use crate::states::{GaussianState, QuadraturePair};
use crate::{Error, Result};

/// A coarse-grained measurement pair: bin widths Δ (for u) and δ (for v)
/// over a quadrature pair, with the joint coarse-graining parameter
/// Γ = Δδ/(ħ|γ|).
#[derive(Debug, Clone)]
pub struct CgPair {
    delta: f64,
    small_delta: f64,
    pair: QuadraturePair,
    hbar: f64,
}

impl CgPair {
    pub fn new(delta: f64, small_delta: f64, pair: QuadraturePair, hbar: f64) -> Result<Self> {
        if !(delta > 0.0) || !(small_delta > 0.0) {
            return Err(Error::InvalidParameter(
                "bin widths must be positive".into(),
            ));
        }
        if !(hbar > 0.0) {
            return Err(Error::InvalidParameter("hbar must be positive".into()));
        }
        if pair.gamma() == 0.0 {
            return Err(Error::InvalidParameter(
                "coarse-grained UR pair needs a nonzero commutator".into(),
            ));
        }
        Ok(CgPair {
            delta,
            small_delta,
            pair,
            hbar,
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn small_delta(&self) -> f64 {
        self.small_delta
    }

    pub fn pair(&self) -> &QuadraturePair {
        &self.pair
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Γ = Δδ/(ħ|γ|).
    pub fn gamma_capital(&self) -> f64 {
        self.delta * self.small_delta / (self.hbar * self.pair.gamma().abs())
    }
}

/// Variance-product (Heisenberg) relation: σ²_u σ²_v >= ħ²γ²/4.
pub fn heisenberg_ur(var_u: f64, var_v: f64, gamma: f64, hbar: f64) -> UrReport {
    UrReport::evaluate(
        UrKind::Heisenberg,
        var_u * var_v,
        hbar * hbar * gamma * gamma / 4.0,
    )
}

/// Linear relation σ²_u + σ²_v >= ħ|γ|; weaker than the product form.
pub fn linear_ur(var_u: f64, var_v: f64, gamma: f64, hbar: f64) -> UrReport {
    UrReport::evaluate(UrKind::Linear, var_u + var_v, hbar * gamma.abs())
}

/// Schrödinger's strengthened bound for one mode of a Gaussian state:
/// σ²_x σ²_p >= ħ²/4 + V_xp² (the covariance supplies the symmetrized
/// cross moment).
pub fn schrodinger_ur(state: &GaussianState, mode: usize) -> Result<UrReport> {
    let m = state.mode_cov(mode)?;
    let hbar = state.hbar();
    let lhs = m[(0, 0)] * m[(1, 1)];
    let bound = hbar * hbar / 4.0 + m[(0, 1)] * m[(0, 1)];
    Ok(UrReport::evaluate(UrKind::Schrodinger, lhs, bound))
}

/// Shannon-entropy relation h[P_u] + h[P_v] >= ln(πeħ|γ|), valid for
/// arbitrary linear quadrature combinations.
pub fn shannon_ur(h_u: f64, h_v: f64, gamma: f64, hbar: f64) -> UrReport {
    if gamma == 0.0 {
        return UrReport::evaluate(UrKind::Shannon, h_u + h_v, f64::NEG_INFINITY)
            .trivially_satisfied()
            .with_annotation("commuting pair: no entropic bound");
    }
    UrReport::evaluate(UrKind::Shannon, h_u + h_v, (PI * E * hbar * gamma.abs()).ln())
}

/// Rényi-entropy relation for conjugate orders, proven for canonically
/// conjugate pairs (including fractional-Fourier-connected quadratures);
/// refuses pairs not declared conjugate.
pub fn renyi_ur(
    h_alpha_u: f64,
    h_beta_v: f64,
    conj: &ConjugatePair,
    pair: &QuadraturePair,
    hbar: f64,
) -> Result<UrReport> {
    if !pair.is_cco() {
        return Err(Error::NotCco(
            "the Rényi entropic bound is proven only for Fourier-connected pairs".into(),
        ));
    }
    let c = renyi_conjugacy_constant(conj.alpha())?;
    let bound = (PI * hbar * pair.gamma().abs() / c).ln();
    Ok(UrReport::evaluate(UrKind::Renyi, h_alpha_u + h_beta_v, bound))
}

/// Both reports produced by the coarse-grained entropic evaluator: the
/// prolate-envelope bound (nontrivial at every Γ) and the fixed-constant
/// variant it subsumes, which goes vacuous at large Γ.
#[derive(Debug, Clone)]
pub struct CgEntropicReports {
    pub cgrur: UrReport,
    pub bialy: UrReport,
}

/// Coarse-grained entropic relation on the discrete outcome entropies:
/// `H_α[P_Δ] + H_β[P_δ] >= ln(π / (ε_α(Γ/4) Γ))`.
///
/// Scope: for α ≠ 1 the pair must be canonically conjugate. For α = 1 with
/// rectangular histogram functions the bound extends to arbitrary linear
/// combinations (with ε₁ capped at 1/e in that case, which is where the
/// general-pair proof lives).
pub fn cg_entropic_ur(
    dist_u: &DiscreteDistribution,
    dist_v: &DiscreteDistribution,
    cgp: &CgPair,
    conj: &ConjugatePair,
    hf_u: &HistogramFunction,
    hf_v: &HistogramFunction,
) -> Result<CgEntropicReports> {
    check_hf_widths(cgp, hf_u, hf_v)?;
    let cco = cgp.pair().is_cco();
    if !conj.is_shannon() && !cco {
        return Err(Error::NotCco(
            "conjugate-order coarse-grained bounds need a canonically conjugate pair".into(),
        ));
    }
    if conj.is_shannon() && !cco && !(hf_u.is_rectangular() && hf_v.is_rectangular()) {
        return Err(Error::NotCco(
            "general (non-conjugate) pairs are covered only with rectangular histogram functions"
                .into(),
        ));
    }
    let gamma_cap = cgp.gamma_capital();
    let alpha = conj.alpha();
    let h_u = discrete_entropy(dist_u, RenyiOrder::new(alpha)?)?;
    let h_v = discrete_entropy(dist_v, RenyiOrder::new(conj.beta())?)?;
    let lhs = h_u + h_v;

    let c_alpha = renyi_conjugacy_constant(alpha)?;
    let eps = if cco {
        eps_alpha(alpha, gamma_cap / 4.0)?
    } else {
        // general pairs: only the fixed-constant regime is proven
        c_alpha
    };
    let bound = (PI / (eps * gamma_cap)).ln();
    let mut cgrur = UrReport::evaluate(UrKind::CgEntropic, lhs, bound);
    cgrur = cgrur.with_annotation(if cco {
        "pair: canonically conjugate"
    } else {
        "pair: general linear combination (Shannon, rectangular HF)"
    });
    if !dist_u.is_faithful() || !dist_v.is_faithful() {
        cgrur = cgrur.with_annotation(format!(
            "unfaithful coverage: u {:.9}, v {:.9}",
            dist_u.coverage(),
            dist_v.coverage()
        ));
    }

    let bialy_bound = (PI / (c_alpha * gamma_cap)).ln();
    let mut bialy = UrReport::evaluate(UrKind::CgEntropicBialy, lhs, bialy_bound);
    if bialy_bound < 0.0 {
        bialy = bialy
            .trivially_satisfied()
            .with_annotation("negative bound: discrete entropies are nonnegative");
    }
    Ok(CgEntropicReports { cgrur, bialy })
}

/// Coarse-grained variance relation
/// `(σ²_{P_Δ} + σ²_{D_Δ})(σ²_{P_δ} + σ²_{D_δ}) >= (ħγ/2)² e^{2(h[D_Δ]-lnΔ + h[D_δ]-lnδ - 1)} / ε₁²(Γ/4)`,
/// which for rectangular histogram functions in the small-Γ regime is the
/// Heisenberg bound ħ²γ²/4 with the Δ²/12 additive corrections.
///
/// Flagged vacuous when Γ >= πe, where the histogram-function variances
/// alone already satisfy it.
pub fn cg_variance_ur(
    var_u_disc: f64,
    var_v_disc: f64,
    cgp: &CgPair,
    hf_u: &HistogramFunction,
    hf_v: &HistogramFunction,
) -> Result<UrReport> {
    check_hf_widths(cgp, hf_u, hf_v)?;
    let (h_u, var_hf_u) = hf_moments(hf_u, 1.0)?;
    let (h_v, var_hf_v) = hf_moments(hf_v, 1.0)?;
    let lhs = (var_u_disc + var_hf_u) * (var_v_disc + var_hf_v);
    let gamma = cgp.pair().gamma();
    let hbar = cgp.hbar();
    let gamma_cap = cgp.gamma_capital();
    let eps1 = eps_alpha(1.0, gamma_cap / 4.0)?;
    let exponent = 2.0 * (h_u - cgp.delta().ln() + h_v - cgp.small_delta().ln() - 1.0);
    let bound = hbar * hbar * gamma * gamma / 4.0 * exponent.exp() / (eps1 * eps1);
    let mut rep = UrReport::evaluate(UrKind::CgVariance, lhs, bound);
    if gamma_cap >= PI * E {
        rep = rep.trivially_satisfied().with_annotation(format!(
            "vacuous regime: gamma_capital = {gamma_cap:.6} >= pi*e"
        ));
    }
    if !cgp.pair().is_cco() {
        rep = rep.with_annotation("pair: general linear combination (rectangular HF route)");
    }
    Ok(rep)
}

/// The non-trivial coarse-grained variance relation
/// `K(σ²_Δ/Δ²) K(σ²_δ/δ²) >= π²/(Γ² ε₁²(Γ/4))`, whose bound exceeds one for
/// every finite Γ: simultaneous localization of both discretized
/// observables stays forbidden at arbitrarily coarse graining.
///
/// The discrete variances must be measured with the central bin at the
/// distribution mean.
pub fn cg_k_ur(var_u_disc: f64, var_v_disc: f64, cgp: &CgPair) -> Result<UrReport> {
    if !cgp.pair().is_cco() {
        return Err(Error::NotCco(
            "the K-function bound is proven for canonically conjugate pairs".into(),
        ));
    }
    let lhs = k_of_t(var_u_disc / cgp.delta().powi(2))?
        * k_of_t(var_v_disc / cgp.small_delta().powi(2))?;
    let gamma_cap = cgp.gamma_capital();
    let eps1 = eps_alpha(1.0, gamma_cap / 4.0)?;
    let bound = PI * PI / (gamma_cap * gamma_cap * eps1 * eps1);
    Ok(UrReport::evaluate(UrKind::CgK, lhs, bound)
        .with_annotation("central bin at the distribution mean"))
}

fn check_hf_widths(cgp: &CgPair, hf_u: &HistogramFunction, hf_v: &HistogramFunction) -> Result<()> {
    if (hf_u.width() - cgp.delta()).abs() > 1e-12 * cgp.delta() {
        return Err(Error::WidthMismatch {
            hf: hf_u.width(),
            cg: cgp.delta(),
        });
    }
    if (hf_v.width() - cgp.small_delta()).abs() > 1e-12 * cgp.small_delta() {
        return Err(Error::WidthMismatch {
            hf: hf_v.width(),
            cg: cgp.small_delta(),
        });
    }
    Ok(())
}

/// Deutsch and Maassen–Uffink lower bounds for a d-dimensional pair of
/// observables whose eigenbases are related by the unitary `u`:
/// `c₁ = max |U_ij|²`, MU bound `-ln c₁`, Deutsch bound `-2 ln((1+√c₁)/2)`.
///
/// The MU bound applies to conjugate Rényi orders (including Shannon);
/// Deutsch's bound never exceeds it.
pub fn discrete_mu_bounds(u: &DMatrix<Complex64>) -> Result<(f64, f64)> {
    if u.nrows() != u.ncols() {
        return Err(Error::DimensionMismatch(u.nrows(), u.ncols()));
    }
    let n = u.nrows();
    let gram = u.adjoint() * u;
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let want = if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
            dev = dev.max((gram[(i, j)] - want).norm());
        }
    }
    if dev > 1e-10 {
        return Err(Error::NotUnitary(dev));
    }
    let c1 = u.iter().map(|z| z.norm_sqr()).fold(0.0f64, f64::max);
    let mu = -c1.ln();
    let deutsch = -2.0 * ((1.0 + c1.sqrt()) / 2.0).ln();
    Ok((deutsch, mu))
}
