//! Continuous-variable quantum states and their quadrature marginals.
//!
//! Two state representations are first-class: [`GridWavefunction`] (sampled
//! pure states on a uniform grid) and [`GaussianState`] (mean vector and
//! covariance matrix, with closed-form marginals). Phase-space vectors use
//! the (q, p) block ordering `x = (x_1..x_n, p_1..p_n)`.

mod grid;

pub(crate) use grid::centered_ft_1d;
pub use grid::{GridDensity, GridWavefunction};

use nalgebra::{DMatrix, DVector};

use crate::report::{UrKind, UrReport};
use crate::{Error, Result};

/// A system of `n_modes` bosonic modes with an effective Planck constant.
///
/// The value of ħ depends on the physical platform (mechanical motion,
/// field quadratures, paraxial optics), so it stays a runtime parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSystem {
    n_modes: usize,
    hbar: f64,
}

impl ModeSystem {
    pub fn new(n_modes: usize, hbar: f64) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::InvalidParameter("n_modes must be >= 1".into()));
        }
        if !(hbar > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "hbar must be positive, got {hbar}"
            )));
        }
        Ok(ModeSystem { n_modes, hbar })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// The symplectic form J in (q, p) block ordering.
    pub fn symplectic_form(&self) -> DMatrix<f64> {
        symplectic_form(self.n_modes)
    }
}

pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let n = n_modes;
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = -1.0;
    }
    j
}

/// Real coefficient vector d defining the quadrature combination u = dᵀ x̂.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureCoeffs {
    d: DVector<f64>,
}

impl QuadratureCoeffs {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() < 2 || coeffs.len() % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "coefficient vector must have even length >= 2, got {}",
                coeffs.len()
            )));
        }
        let d = DVector::from_vec(coeffs);
        if d.norm() == 0.0 {
            return Err(Error::InvalidParameter(
                "coefficient vector must be nonzero".into(),
            ));
        }
        Ok(QuadratureCoeffs { d })
    }

    /// Position quadrature of one mode in an `n_modes` system.
    pub fn position(mode: usize, n_modes: usize) -> Result<Self> {
        Self::unit(mode, n_modes)
    }

    /// Momentum quadrature of one mode in an `n_modes` system.
    pub fn momentum(mode: usize, n_modes: usize) -> Result<Self> {
        Self::unit(n_modes + mode, n_modes)
    }

    fn unit(index: usize, n_modes: usize) -> Result<Self> {
        if index >= 2 * n_modes {
            return Err(Error::BadModeIndex(index % n_modes.max(1), n_modes));
        }
        let mut v = vec![0.0; 2 * n_modes];
        v[index] = 1.0;
        Self::new(v)
    }

    /// Rotated quadrature cos(theta) x̂ + sin(theta) p̂ of a single mode.
    pub fn rotated(theta: f64) -> Self {
        QuadratureCoeffs {
            d: DVector::from_vec(vec![theta.cos(), theta.sin()]),
        }
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.d
    }

    pub fn dim(&self) -> usize {
        self.d.len()
    }
}

/// dᵀ J d′ — the scalar γ of the canonical commutation relation
/// `[u, v] = iħγ`.
pub fn commutator_gamma(du: &QuadratureCoeffs, dv: &QuadratureCoeffs) -> Result<f64> {
    if du.dim() != dv.dim() {
        return Err(Error::DimensionMismatch(du.dim(), dv.dim()));
    }
    let n = du.dim() / 2;
    let (a, ap) = (du.d.rows(0, n), du.d.rows(n, n));
    let (b, bp) = (dv.d.rows(0, n), dv.d.rows(n, n));
    Ok(a.dot(&bp) - ap.dot(&b))
}

/// A pair of quadrature combinations with its commutator scalar and the
/// declared canonical-conjugacy flag.
///
/// Commutation alone does not imply Fourier conjugacy (x and x+p commute
/// to the same iħ as x and p but are not a Fourier pair), so `is_cco` is a
/// declaration by the constructor, never inferred from γ.
#[derive(Debug, Clone)]
pub struct QuadraturePair {
    pub du: QuadratureCoeffs,
    pub dv: QuadratureCoeffs,
    gamma: f64,
    is_cco: bool,
}

impl QuadraturePair {
    pub fn new(du: QuadratureCoeffs, dv: QuadratureCoeffs, is_cco: bool) -> Result<Self> {
        let gamma = commutator_gamma(&du, &dv)?;
        if is_cco && gamma == 0.0 {
            return Err(Error::NotCco(
                "a canonically conjugate pair must have nonzero commutator".into(),
            ));
        }
        Ok(QuadraturePair {
            du,
            dv,
            gamma,
            is_cco,
        })
    }

    /// The canonical pair (x̂, p̂) of one mode, γ = 1.
    pub fn canonical(mode: usize, n_modes: usize) -> Result<Self> {
        Self::new(
            QuadratureCoeffs::position(mode, n_modes)?,
            QuadratureCoeffs::momentum(mode, n_modes)?,
            true,
        )
    }

    /// Single-mode rotated pair (x̂_θ, x̂_{θ+π/2}), connected by a fractional
    /// Fourier transform; γ = 1.
    pub fn rotated(theta: f64) -> Self {
        QuadraturePair::new(
            QuadratureCoeffs::rotated(theta),
            QuadratureCoeffs::rotated(theta + std::f64::consts::FRAC_PI_2),
            true,
        )
        .expect("rotated pair has unit commutator")
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn is_cco(&self) -> bool {
        self.is_cco
    }
}

/// Gaussian state: mean vector ⟨x̂⟩ and covariance matrix V.
#[derive(Debug, Clone)]
pub struct GaussianState {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
    system: ModeSystem,
}

impl GaussianState {
    /// Validates symmetry (to 1e-12 relative to the largest entry) and
    /// positive definiteness. Bona fide status is a separate check: states
    /// violating the uncertainty principle are representable on purpose.
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>, system: ModeSystem) -> Result<Self> {
        let dim = 2 * system.n_modes();
        if mean.len() != dim {
            return Err(Error::DimensionMismatch(mean.len(), dim));
        }
        if cov.nrows() != dim || cov.ncols() != dim {
            return Err(Error::DimensionMismatch(cov.nrows(), dim));
        }
        let scale = cov.amax().max(1e-300);
        let asym = (&cov - cov.transpose()).amax();
        if asym > 1e-12 * scale.max(1.0) {
            return Err(Error::AsymmetricCovariance(asym));
        }
        let sym = 0.5 * (&cov + cov.transpose());
        if sym.clone().cholesky().is_none() {
            return Err(Error::InvalidParameter(
                "covariance matrix must be positive definite".into(),
            ));
        }
        Ok(GaussianState {
            mean,
            cov: sym,
            system,
        })
    }

    pub fn vacuum(n_modes: usize, hbar: f64) -> Result<Self> {
        let system = ModeSystem::new(n_modes, hbar)?;
        let dim = 2 * n_modes;
        Ok(GaussianState {
            mean: DVector::zeros(dim),
            cov: DMatrix::identity(dim, dim) * (hbar / 2.0),
            system,
        })
    }

    /// Single-mode squeezed vacuum, V = diag(ħe^{-2r}/2, ħe^{2r}/2).
    pub fn squeezed(r: f64, hbar: f64) -> Result<Self> {
        let system = ModeSystem::new(1, hbar)?;
        let cov = DMatrix::from_diagonal(&DVector::from_vec(vec![
            hbar * (-2.0 * r).exp() / 2.0,
            hbar * (2.0 * r).exp() / 2.0,
        ]));
        Ok(GaussianState {
            mean: DVector::zeros(2),
            cov,
            system,
        })
    }

    /// Isotropic covariance c·I; `c = hbar` gives the thermal example used
    /// in the bona fide tests, `c = hbar/4` a non-physical matrix.
    pub fn isotropic(n_modes: usize, c: f64, hbar: f64) -> Result<Self> {
        let system = ModeSystem::new(n_modes, hbar)?;
        let dim = 2 * n_modes;
        GaussianState::new(
            DVector::zeros(dim),
            DMatrix::identity(dim, dim) * c,
            system,
        )
    }

    pub fn with_mean(mut self, mean: DVector<f64>) -> Result<Self> {
        if mean.len() != self.cov.nrows() {
            return Err(Error::DimensionMismatch(mean.len(), self.cov.nrows()));
        }
        self.mean = mean;
        Ok(self)
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn system(&self) -> ModeSystem {
        self.system
    }

    pub fn hbar(&self) -> f64 {
        self.system.hbar()
    }

    pub fn n_modes(&self) -> usize {
        self.system.n_modes()
    }

    /// Mean and variance of the marginal of u = dᵀ x̂: `(dᵀ⟨x̂⟩, dᵀVd)`.
    pub fn marginal_moments(&self, d: &QuadratureCoeffs) -> Result<(f64, f64)> {
        if d.dim() != self.mean.len() {
            return Err(Error::DimensionMismatch(d.dim(), self.mean.len()));
        }
        let v = d.as_vector();
        let mean = v.dot(&self.mean);
        let var = (v.transpose() * &self.cov * v)[(0, 0)];
        Ok((mean, var))
    }

    /// The marginal distribution itself, which is Gaussian.
    pub fn marginal(&self, d: &QuadratureCoeffs) -> Result<Marginal> {
        let (mean, variance) = self.marginal_moments(d)?;
        Ok(Marginal::Gaussian { mean, variance })
    }

    /// 2x2 covariance of one mode: rows/cols (x_i, p_i).
    pub fn mode_cov(&self, mode: usize) -> Result<DMatrix<f64>> {
        let n = self.n_modes();
        if mode >= n {
            return Err(Error::BadModeIndex(mode, n));
        }
        let (xi, pi) = (mode, n + mode);
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 0)] = self.cov[(xi, xi)];
        m[(0, 1)] = self.cov[(xi, pi)];
        m[(1, 0)] = self.cov[(pi, xi)];
        m[(1, 1)] = self.cov[(pi, pi)];
        Ok(m)
    }

    /// Bona fide check: every eigenvalue of the Hermitian matrix
    /// `V + i(ħ/2)J` must be nonnegative. The margin is the smallest
    /// eigenvalue.
    ///
    /// The complex Hermitian eigenproblem is solved through its real
    /// symmetric embedding `[[V, -B], [B, V]]` with `B = (ħ/2)J`, which
    /// carries the same spectrum (doubled).
    pub fn bona_fide_check(&self) -> UrReport {
        let dim = self.cov.nrows();
        let b = self.system.symplectic_form() * (self.hbar() / 2.0);
        let mut emb = DMatrix::zeros(2 * dim, 2 * dim);
        emb.view_mut((0, 0), (dim, dim)).copy_from(&self.cov);
        emb.view_mut((dim, dim), (dim, dim)).copy_from(&self.cov);
        emb.view_mut((0, dim), (dim, dim)).copy_from(&(-&b));
        emb.view_mut((dim, 0), (dim, dim)).copy_from(&b);
        let eig = emb.symmetric_eigen();
        let min_eig = eig.eigenvalues.iter().cloned().fold(f64::MAX, f64::min);
        UrReport::evaluate(UrKind::BonaFide, min_eig, 0.0)
            .with_annotation("lhs is the smallest eigenvalue of V + i(hbar/2)J")
    }

    pub fn is_bona_fide(&self) -> bool {
        !self.bona_fide_check().is_violated()
    }

    /// One-mode determinant form of the uncertainty principle:
    /// `sqrt(det V_mode) >= ħ/2`.
    pub fn det_cov_check(&self, mode: usize) -> Result<UrReport> {
        let m = self.mode_cov(mode)?;
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        let lhs = det.max(0.0).sqrt();
        Ok(UrReport::evaluate(UrKind::DetCov, lhs, self.hbar() / 2.0))
    }
}

/// One-dimensional marginal probability density in a form that downstream
/// binning and entropy evaluation can exploit: exact Gaussians (and mixtures
/// of them) get closed-form treatment, grid densities get quadrature.
#[derive(Debug, Clone)]
pub enum Marginal {
    Gaussian { mean: f64, variance: f64 },
    GaussianMixture(Vec<MixtureComponent>),
    Grid(GridDensity),
}

/// Weighted Gaussian component of a mixture marginal.
#[derive(Debug, Clone, Copy)]
pub struct MixtureComponent {
    pub weight: f64,
    pub mean: f64,
    pub variance: f64,
}

impl Marginal {
    pub fn gaussian(mean: f64, variance: f64) -> Result<Self> {
        if !(variance > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "variance must be positive, got {variance}"
            )));
        }
        Ok(Marginal::Gaussian { mean, variance })
    }

    pub fn mixture(components: Vec<MixtureComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized(total));
        }
        for c in &components {
            if !(c.weight >= 0.0) || !(c.variance > 0.0) {
                return Err(Error::InvalidParameter(
                    "mixture weights must be >= 0 and variances > 0".into(),
                ));
            }
        }
        Ok(Marginal::GaussianMixture(components))
    }

    pub fn mean(&self) -> f64 {
        match self {
            Marginal::Gaussian { mean, .. } => *mean,
            Marginal::GaussianMixture(cs) => cs.iter().map(|c| c.weight * c.mean).sum(),
            Marginal::Grid(g) => g.mean(),
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            Marginal::Gaussian { variance, .. } => *variance,
            Marginal::GaussianMixture(cs) => {
                let m = self.mean();
                cs.iter()
                    .map(|c| c.weight * (c.variance + (c.mean - m).powi(2)))
                    .sum()
            }
            Marginal::Grid(g) => g.variance(),
        }
    }

    /// Probability mass on the interval (a, b].
    pub fn mass_in(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        match self {
            Marginal::Gaussian { mean, variance } => gaussian_mass(*mean, *variance, a, b),
            Marginal::GaussianMixture(cs) => cs
                .iter()
                .map(|c| c.weight * gaussian_mass(c.mean, c.variance, a, b))
                .sum(),
            Marginal::Grid(g) => g.integrate(a, b),
        }
    }

    pub fn pdf(&self, u: f64) -> f64 {
        match self {
            Marginal::Gaussian { mean, variance } => gaussian_pdf(*mean, *variance, u),
            Marginal::GaussianMixture(cs) => cs
                .iter()
                .map(|c| c.weight * gaussian_pdf(c.mean, c.variance, u))
                .sum(),
            Marginal::Grid(g) => g.pdf(u),
        }
    }

    /// Interval outside which the remaining mass is negligible (< ~1e-22
    /// for Gaussian forms; exactly zero for grids).
    pub fn range_hint(&self) -> (f64, f64) {
        match self {
            Marginal::Gaussian { mean, variance } => {
                let s = variance.sqrt();
                (mean - 10.0 * s, mean + 10.0 * s)
            }
            Marginal::GaussianMixture(cs) => {
                let lo = cs
                    .iter()
                    .map(|c| c.mean - 10.0 * c.variance.sqrt())
                    .fold(f64::MAX, f64::min);
                let hi = cs
                    .iter()
                    .map(|c| c.mean + 10.0 * c.variance.sqrt())
                    .fold(f64::MIN, f64::max);
                (lo, hi)
            }
            Marginal::Grid(g) => g.support(),
        }
    }
}

fn gaussian_pdf(mean: f64, variance: f64, u: f64) -> f64 {
    let z = u - mean;
    (-z * z / (2.0 * variance)).exp() / (2.0 * std::f64::consts::PI * variance).sqrt()
}

/// Gaussian mass on (a, b] using the complementary error function in the
/// tails so narrow far-out bins keep relative accuracy and never go
/// negative from cancellation.
fn gaussian_mass(mean: f64, variance: f64, a: f64, b: f64) -> f64 {
    let s = (2.0 * variance).sqrt();
    let za = (a - mean) / s;
    let zb = (b - mean) / s;
    let m = if za >= 0.0 {
        0.5 * (crate::special_fn::erfc(za) - crate::special_fn::erfc(zb))
    } else if zb <= 0.0 {
        0.5 * (crate::special_fn::erfc(-zb) - crate::special_fn::erfc(-za))
    } else {
        0.5 * (crate::special_fn::erf(zb) + crate::special_fn::erf(-za))
    };
    m.max(0.0)
}
