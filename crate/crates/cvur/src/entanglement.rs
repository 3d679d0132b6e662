//! PPT-based entanglement witnesses on two-mode states.
//!
//! Partial transposition of the second mode acts on phase space as a
//! momentum reflection p₂ → −p₂. Uncertainty functionals of the transposed
//! state are measurable on the actual state by swapping the sign of the v
//! combination, so a violation of any uncertainty relation by those measured
//! statistics certifies entanglement. The coarse-grained variants use the
//! corrected bounds; applying the continuous bounds to binned data instead
//! produces false positives on separable states.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::coarse_grain::{bin_probabilities, discrete_variance, HistogramFunction, StandardCg};
use crate::entropy::ConjugatePair;
use crate::report::{UrKind, UrReport};
use crate::states::{
    commutator_gamma, GaussianState, GridDensity, Marginal, ModeSystem, QuadratureCoeffs,
    QuadraturePair,
};
use crate::ur_bounds::{cg_entropic_ur, cg_variance_ur, CgPair};
use crate::{Error, Result};

/// Momentum reflection of mode 2: cov → ΛVΛ and mean p₂ → −p₂ with
/// Λ = diag(1, 1, 1, −1) in (x₁, x₂, p₁, p₂) ordering. The output is a
/// valid covariance matrix but not necessarily a bona fide one.
pub fn ppt_transform(state: &GaussianState) -> Result<GaussianState> {
    if state.n_modes() != 2 {
        return Err(Error::BadModeIndex(2, state.n_modes()));
    }
    let mut cov = state.cov().clone();
    for i in 0..4 {
        cov[(i, 3)] = -cov[(i, 3)];
        cov[(3, i)] = -cov[(3, i)];
    }
    let mut mean = state.mean().clone();
    mean[3] = -mean[3];
    GaussianState::new(mean, cov, state.system())
}

/// Two-mode squeezed vacuum: diagonal blocks (ħ/2)cosh(2r)·I, x-x block
/// +(ħ/2)sinh(2r), p-p block −(ħ/2)sinh(2r). r = 0 is the product vacuum.
pub fn two_mode_squeezed(r: f64, hbar: f64) -> Result<GaussianState> {
    let system = ModeSystem::new(2, hbar)?;
    let ch = hbar / 2.0 * (2.0 * r).cosh();
    let sh = hbar / 2.0 * (2.0 * r).sinh();
    let cov = DMatrix::from_row_slice(
        4,
        4,
        &[
            ch, sh, 0.0, 0.0, //
            sh, ch, 0.0, 0.0, //
            0.0, 0.0, ch, -sh, //
            0.0, 0.0, -sh, ch,
        ],
    );
    GaussianState::new(DVector::zeros(4), cov, system)
}

/// Global operators û± = û₁ ± û₂ and v̂± = v̂₁ ± v̂₂ built from one
/// single-mode pair (û, v̂). Same-sign pairs commute to 2iħγ₁; mixed-sign
/// pairs commute — which is exactly what the PPT witness measures.
#[derive(Debug, Clone)]
pub struct GlobalOperatorPair {
    pub u_plus: QuadratureCoeffs,
    pub u_minus: QuadratureCoeffs,
    pub v_plus: QuadratureCoeffs,
    pub v_minus: QuadratureCoeffs,
    gamma1: f64,
}

impl GlobalOperatorPair {
    /// `du`, `dv` are single-mode coefficient pairs (a, a′) and (b, b′).
    pub fn from_single_mode(du: [f64; 2], dv: [f64; 2]) -> Result<Self> {
        let gamma1 = du[0] * dv[1] - du[1] * dv[0];
        if gamma1 == 0.0 {
            return Err(Error::InvalidParameter(
                "single-mode pair must have nonzero commutator".into(),
            ));
        }
        let build = |c: [f64; 2], sign: f64| {
            QuadratureCoeffs::new(vec![c[0], sign * c[0], c[1], sign * c[1]])
        };
        let pair = GlobalOperatorPair {
            u_plus: build(du, 1.0)?,
            u_minus: build(du, -1.0)?,
            v_plus: build(dv, 1.0)?,
            v_minus: build(dv, -1.0)?,
            gamma1,
        };
        debug_assert!(
            (commutator_gamma(&pair.u_plus, &pair.v_plus).unwrap() - 2.0 * gamma1).abs() < 1e-12
        );
        debug_assert!(commutator_gamma(&pair.u_plus, &pair.v_minus).unwrap().abs() < 1e-12);
        Ok(pair)
    }

    /// û = x̂, v̂ = p̂ (γ₁ = 1).
    pub fn canonical() -> Self {
        Self::from_single_mode([1.0, 0.0], [0.0, 1.0]).expect("canonical pair is valid")
    }

    pub fn gamma1(&self) -> f64 {
        self.gamma1
    }

    /// The same-sign pair (û₊, v̂₊) as a declared-conjugate quadrature pair
    /// with γ = 2γ₁. In the rotated mode basis this is a scaled canonical
    /// pair of one collective mode, hence genuinely Fourier-connected.
    pub fn same_sign_pair(&self) -> QuadraturePair {
        QuadraturePair::new(self.u_plus.clone(), self.v_plus.clone(), true)
            .expect("same-sign global pair is conjugate")
    }
}

/// Which commuting mixed-sign combination the witness measures on the
/// actual state; it equals the same-sign combination on the transposed
/// state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixedSign {
    /// (û₊, v̂₋)
    PlusMinus,
    /// (û₋, v̂₊)
    MinusPlus,
}

/// Anything that can produce marginal distributions of two-mode quadrature
/// combinations: Gaussian states in closed form, grid states numerically.
pub trait TwoModeMarginals {
    fn hbar(&self) -> f64;
    fn quadrature_marginal(&self, d: &QuadratureCoeffs) -> Result<Marginal>;
}

impl TwoModeMarginals for GaussianState {
    fn hbar(&self) -> f64 {
        GaussianState::hbar(self)
    }

    fn quadrature_marginal(&self, d: &QuadratureCoeffs) -> Result<Marginal> {
        if self.n_modes() != 2 {
            return Err(Error::BadModeIndex(2, self.n_modes()));
        }
        self.marginal(d)
    }
}

fn witness_coeffs(gp: &GlobalOperatorPair, mixed: MixedSign) -> (&QuadratureCoeffs, &QuadratureCoeffs) {
    match mixed {
        MixedSign::PlusMinus => (&gp.u_plus, &gp.v_minus),
        MixedSign::MinusPlus => (&gp.u_minus, &gp.v_plus),
    }
}

fn ensure_commuting(gp: &GlobalOperatorPair, mixed: MixedSign) -> Result<()> {
    let (du, dv) = witness_coeffs(gp, mixed);
    let g = commutator_gamma(du, dv)?;
    if g.abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "witness pair must commute on the actual state, got gamma = {g}"
        )));
    }
    Ok(())
}

/// Variance-based PPT witness.
///
/// Without coarse graining, evaluates the variance-product relation on the
/// measured mixed-sign marginals against the transposed-state bound
/// (ħ·2γ₁)²/4; with `cg = Some((Δ, δ))` it bins each marginal (central bin
/// at the distribution mean) and evaluates the corrected coarse-grained
/// bound with the Δ²/12 additive terms. A `Violated` verdict certifies
/// entanglement.
pub fn witness_variance<S: TwoModeMarginals>(
    state: &S,
    gp: &GlobalOperatorPair,
    mixed: MixedSign,
    cg: Option<(f64, f64)>,
) -> Result<UrReport> {
    ensure_commuting(gp, mixed)?;
    let (du, dv) = witness_coeffs(gp, mixed);
    let mu = state.quadrature_marginal(du)?;
    let mv = state.quadrature_marginal(dv)?;
    let hbar = state.hbar();
    let gamma_eff = 2.0 * gp.gamma1();

    let mut rep = match cg {
        None => {
            let lhs = mu.variance() * mv.variance();
            let bound = hbar * hbar * gamma_eff * gamma_eff / 4.0;
            UrReport::evaluate(UrKind::WitnessVariance, lhs, bound)
                .with_annotation("continuous variances")
        }
        Some((delta, small_delta)) => {
            let du_dist = bin_probabilities(&mu, &StandardCg::centered_on(&mu, delta)?);
            let dv_dist = bin_probabilities(&mv, &StandardCg::centered_on(&mv, small_delta)?);
            let cgp = CgPair::new(delta, small_delta, gp.same_sign_pair(), hbar)?;
            let hf_u = HistogramFunction::rectangular(delta)?;
            let hf_v = HistogramFunction::rectangular(small_delta)?;
            let mut r = cg_variance_ur(
                discrete_variance(&du_dist)?,
                discrete_variance(&dv_dist)?,
                &cgp,
                &hf_u,
                &hf_v,
            )?;
            r.kind = UrKind::WitnessVariance;
            // the witness verdict is binary; the vacuous-regime note stays
            // in the annotations
            if r.verdict == crate::Verdict::TriviallySatisfied {
                r.verdict = crate::Verdict::Satisfied;
            }
            r.with_annotation(format!("coarse-grained: delta={delta}, small_delta={small_delta}"))
        }
    };
    rep = rep.with_annotation("violation implies entanglement of the untransposed state");
    Ok(rep)
}

/// The uncorrected criterion: continuous variance bound applied to binned
/// variances. Kept as a named evaluator because it demonstrably false-flags
/// separable states once the bins are coarse; never use it as a witness.
pub fn witness_variance_naive_binned<S: TwoModeMarginals>(
    state: &S,
    gp: &GlobalOperatorPair,
    mixed: MixedSign,
    delta: f64,
    small_delta: f64,
) -> Result<UrReport> {
    ensure_commuting(gp, mixed)?;
    let (du, dv) = witness_coeffs(gp, mixed);
    let mu = state.quadrature_marginal(du)?;
    let mv = state.quadrature_marginal(dv)?;
    let hbar = state.hbar();
    let gamma_eff = 2.0 * gp.gamma1();
    let du_dist = bin_probabilities(&mu, &StandardCg::centered_on(&mu, delta)?);
    let dv_dist = bin_probabilities(&mv, &StandardCg::centered_on(&mv, small_delta)?);
    let lhs = discrete_variance(&du_dist)? * discrete_variance(&dv_dist)?;
    let bound = hbar * hbar * gamma_eff * gamma_eff / 4.0;
    Ok(
        UrReport::evaluate(UrKind::WitnessVarianceNaive, lhs, bound).with_annotation(
            "continuous bound on binned variances: verdicts are unreliable by construction",
        ),
    )
}

/// Entropic PPT witness on coarse-grained marginals: Shannon discrete
/// entropies of the binned mixed-sign distributions against the
/// coarse-grained entropic bound at Γ = Δδ/(2ħ|γ₁|). Violation certifies
/// entanglement; the report also carries the corrected variance margin for
/// comparison.
pub fn witness_entropy<S: TwoModeMarginals>(
    state: &S,
    gp: &GlobalOperatorPair,
    mixed: MixedSign,
    delta: f64,
    small_delta: f64,
) -> Result<UrReport> {
    ensure_commuting(gp, mixed)?;
    let (du, dv) = witness_coeffs(gp, mixed);
    let mu = state.quadrature_marginal(du)?;
    let mv = state.quadrature_marginal(dv)?;
    let hbar = state.hbar();
    let du_dist = bin_probabilities(&mu, &StandardCg::centered_on(&mu, delta)?);
    let dv_dist = bin_probabilities(&mv, &StandardCg::centered_on(&mv, small_delta)?);
    let cgp = CgPair::new(delta, small_delta, gp.same_sign_pair(), hbar)?;
    let conj = ConjugatePair::from_alpha(1.0)?;
    let hf_u = HistogramFunction::rectangular(delta)?;
    let hf_v = HistogramFunction::rectangular(small_delta)?;
    let reps = cg_entropic_ur(&du_dist, &dv_dist, &cgp, &conj, &hf_u, &hf_v)?;
    let mut rep = reps.cgrur;
    rep.kind = UrKind::WitnessEntropy;

    let var_rep = cg_variance_ur(
        discrete_variance(&du_dist)?,
        discrete_variance(&dv_dist)?,
        &cgp,
        &hf_u,
        &hf_v,
    )?;
    rep = rep
        .with_annotation(format!("variance-criterion margin: {:.6e}", var_rep.margin))
        .with_annotation("violation implies entanglement of the untransposed state");
    Ok(rep)
}

/// Two-mode pure state sampled on a uniform 2-D grid, for witness
/// evaluation on non-Gaussian wavefunctions. Marginals of pure-position or
/// pure-momentum combinations are computed by line integration across the
/// (possibly Fourier-transformed) density.
#[derive(Debug, Clone)]
pub struct TwoModeGrid {
    psi: Vec<Complex64>,
    n1: usize,
    n2: usize,
    x10: f64,
    dx1: f64,
    x20: f64,
    dx2: f64,
    hbar: f64,
}

impl TwoModeGrid {
    pub fn from_fn(
        n: usize,
        half_width1: f64,
        half_width2: f64,
        hbar: f64,
        f: impl Fn(f64, f64) -> Complex64,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter("grid needs n >= 2".into()));
        }
        let dx1 = 2.0 * half_width1 / n as f64;
        let dx2 = 2.0 * half_width2 / n as f64;
        let x10 = -((n / 2) as f64) * dx1;
        let x20 = -((n / 2) as f64) * dx2;
        let mut psi = Vec::with_capacity(n * n);
        for i1 in 0..n {
            let x1 = x10 + i1 as f64 * dx1;
            for i2 in 0..n {
                psi.push(f(x1, x20 + i2 as f64 * dx2));
            }
        }
        let total: f64 = psi.iter().map(|c| c.norm_sqr()).sum::<f64>() * dx1 * dx2;
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::NotNormalized(total));
        }
        let scale = 1.0 / total.sqrt();
        for c in psi.iter_mut() {
            *c *= scale;
        }
        Ok(TwoModeGrid {
            psi,
            n1: n,
            n2: n,
            x10,
            dx1,
            x20,
            dx2,
            hbar,
        })
    }

    /// Product state ψ₁(x₁)ψ₂(x₂) from two single-mode wavefunctions.
    pub fn product(a: &crate::states::GridWavefunction, b: &crate::states::GridWavefunction) -> Result<Self> {
        if (a.hbar() - b.hbar()).abs() > 1e-12 {
            return Err(Error::InvalidParameter("hbar mismatch".into()));
        }
        let n1 = a.len();
        let n2 = b.len();
        let mut psi = Vec::with_capacity(n1 * n2);
        for s1 in a.samples() {
            for s2 in b.samples() {
                psi.push(s1 * s2);
            }
        }
        Ok(TwoModeGrid {
            psi,
            n1,
            n2,
            x10: a.x0(),
            dx1: a.dx(),
            x20: b.x0(),
            dx2: b.dx(),
            hbar: a.hbar(),
        })
    }

    fn density(&self) -> Vec<f64> {
        self.psi.iter().map(|c| c.norm_sqr()).collect()
    }

    /// 2-D momentum representation via the centered unitary transform along
    /// each axis.
    fn momentum_rep(&self) -> TwoModeGrid {
        let mut out = self.clone();
        // axis 2 (contiguous rows)
        let mut p20 = 0.0;
        let mut dp2 = 0.0;
        for i1 in 0..self.n1 {
            let row = &out.psi[i1 * self.n2..(i1 + 1) * self.n2];
            let (t, p0, dp) = crate::states::centered_ft_1d(row, self.x20, self.dx2, self.hbar);
            out.psi[i1 * self.n2..(i1 + 1) * self.n2].copy_from_slice(&t);
            p20 = p0;
            dp2 = dp;
        }
        // axis 1 (strided columns)
        let mut col = vec![Complex64::new(0.0, 0.0); self.n1];
        let mut p10 = 0.0;
        let mut dp1 = 0.0;
        for i2 in 0..self.n2 {
            for i1 in 0..self.n1 {
                col[i1] = out.psi[i1 * self.n2 + i2];
            }
            let (t, p0, dp) = crate::states::centered_ft_1d(&col, self.x10, self.dx1, self.hbar);
            for i1 in 0..self.n1 {
                out.psi[i1 * self.n2 + i2] = t[i1];
            }
            p10 = p0;
            dp1 = dp;
        }
        out.x10 = p10;
        out.dx1 = dp1;
        out.x20 = p20;
        out.dx2 = dp2;
        out
    }

    /// Density of u = a₁·q₁ + a₂·q₂ over a 2-D density by line integration
    /// along the transverse direction, with linear interpolation along
    /// axis 1.
    fn projection(density: &[f64], n1: usize, n2: usize, g10: f64, dg1: f64, g20: f64, dg2: f64, a1: f64, a2: f64, hbar: f64) -> GridDensity {
        let corners = [
            a1 * g10 + a2 * g20,
            a1 * (g10 + (n1 - 1) as f64 * dg1) + a2 * g20,
            a1 * g10 + a2 * (g20 + (n2 - 1) as f64 * dg2),
            a1 * (g10 + (n1 - 1) as f64 * dg1) + a2 * (g20 + (n2 - 1) as f64 * dg2),
        ];
        let umin = corners.iter().cloned().fold(f64::MAX, f64::min);
        let umax = corners.iter().cloned().fold(f64::MIN, f64::max);
        let n_out = 2048usize;
        let du = (umax - umin) / (n_out - 1) as f64;
        let mut values = vec![0.0; n_out];
        // integrate over x2 at fixed u: x1 = (u - a2 x2)/a1
        for (j, v) in values.iter_mut().enumerate() {
            let u = umin + j as f64 * du;
            let mut acc = 0.0;
            for i2 in 0..n2 {
                let x2 = g20 + i2 as f64 * dg2;
                let t = (u - a2 * x2) / a1;
                let s = (t - g10) / dg1;
                if s < 0.0 || s > (n1 - 1) as f64 {
                    continue;
                }
                let i = (s.floor() as usize).min(n1 - 2);
                let frac = s - i as f64;
                let row0 = density[i * n2 + i2];
                let row1 = density[(i + 1) * n2 + i2];
                acc += row0 * (1.0 - frac) + row1 * frac;
            }
            *v = acc * dg2 / a1.abs();
        }
        let total: f64 = values.iter().sum::<f64>() * du;
        if total > 0.0 {
            for v in values.iter_mut() {
                *v /= total;
            }
        }
        GridDensity::from_values_unchecked(values, umin, du, hbar)
    }
}

impl TwoModeMarginals for TwoModeGrid {
    fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Supports pure-position combinations (a₁, a₂, 0, 0) and pure-momentum
    /// combinations (0, 0, b₁, b₂); mixed combinations would need a joint
    /// fractional transform and are out of scope for grid states.
    fn quadrature_marginal(&self, d: &QuadratureCoeffs) -> Result<Marginal> {
        if d.dim() != 4 {
            return Err(Error::DimensionMismatch(d.dim(), 4));
        }
        let v = d.as_vector();
        let (a1, a2, b1, b2) = (v[0], v[1], v[2], v[3]);
        let pos = a1 != 0.0 || a2 != 0.0;
        let mom = b1 != 0.0 || b2 != 0.0;
        if pos && mom {
            return Err(Error::InvalidParameter(
                "grid marginals support pure-position or pure-momentum combinations only".into(),
            ));
        }
        let g = if pos {
            let dens = self.density();
            if a1 == 0.0 {
                // swap roles: integrate over x1
                Self::projection(
                    &transpose(&dens, self.n1, self.n2),
                    self.n2,
                    self.n1,
                    self.x20,
                    self.dx2,
                    self.x10,
                    self.dx1,
                    a2,
                    a1,
                    self.hbar,
                )
            } else {
                Self::projection(
                    &dens, self.n1, self.n2, self.x10, self.dx1, self.x20, self.dx2, a1, a2,
                    self.hbar,
                )
            }
        } else {
            let mrep = self.momentum_rep();
            let dens = mrep.density();
            if b1 == 0.0 {
                Self::projection(
                    &transpose(&dens, mrep.n1, mrep.n2),
                    mrep.n2,
                    mrep.n1,
                    mrep.x20,
                    mrep.dx2,
                    mrep.x10,
                    mrep.dx1,
                    b2,
                    b1,
                    self.hbar,
                )
            } else {
                Self::projection(
                    &dens, mrep.n1, mrep.n2, mrep.x10, mrep.dx1, mrep.x20, mrep.dx2, b1, b2,
                    self.hbar,
                )
            }
        };
        Ok(Marginal::Grid(g))
    }
}

fn transpose(data: &[f64], n1: usize, n2: usize) -> Vec<f64> {
    let mut out = vec![0.0; data.len()];
    for i1 in 0..n1 {
        for i2 in 0..n2 {
            out[i2 * n1 + i1] = data[i1 * n2 + i2];
        }
    }
    out
}
