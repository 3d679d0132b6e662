//! Seeded random state and pair generators for property sweeps and the
//! acceptance suite: bona fide Gaussian covariances from random symplectic
//! transforms, separable two-mode states, Fock superpositions, and
//! conjugate quadrature pairs.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::states::{symplectic_form, GaussianState, GridWavefunction, ModeSystem, QuadratureCoeffs, QuadraturePair};
use crate::Result;

fn normal(rng: &mut impl Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Matrix exponential by scaling-and-squaring on a Taylor series; fine for
/// the small well-scaled generators used here.
pub fn matrix_exp(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let norm = m.amax();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = m / 2f64.powi(squarings as i32);
    let mut term = DMatrix::identity(n, n);
    let mut sum = DMatrix::identity(n, n);
    for k in 1..30 {
        term = &term * &scaled / k as f64;
        sum += &term;
        if term.amax() < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * sum.clone();
    }
    sum
}

/// Random symplectic matrix exp(J K) with K symmetric, entries ~ N(0, scale²).
pub fn random_symplectic(rng: &mut impl Rng, n_modes: usize, scale: f64) -> DMatrix<f64> {
    let dim = 2 * n_modes;
    let mut k = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..=i {
            let v = scale * normal(rng);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    matrix_exp(&(symplectic_form(n_modes) * k))
}

/// Random bona fide Gaussian state: V = S·diag(ν)·Sᵀ with symplectic S and
/// thermal symplectic eigenvalues ν_j >= ħ/2, plus a random mean.
pub fn random_bona_fide_gaussian(
    rng: &mut impl Rng,
    n_modes: usize,
    hbar: f64,
) -> Result<GaussianState> {
    let system = ModeSystem::new(n_modes, hbar)?;
    let s = random_symplectic(rng, n_modes, 0.4);
    let mut nus = Vec::with_capacity(n_modes);
    for _ in 0..n_modes {
        // mostly pure (nu = hbar/2), sometimes thermal
        let extra: f64 = if rng.random::<f64>() < 0.5 {
            0.0
        } else {
            rng.random::<f64>() * 1.5
        };
        nus.push(hbar / 2.0 * (1.0 + extra));
    }
    let mut d = DVector::zeros(2 * n_modes);
    for j in 0..n_modes {
        d[j] = nus[j];
        d[n_modes + j] = nus[j];
    }
    let cov = &s * DMatrix::from_diagonal(&d) * s.transpose();
    let mean = DVector::from_fn(2 * n_modes, |_, _| normal(rng) * hbar.sqrt());
    GaussianState::new(mean, cov, system)
}

/// Random separable two-mode Gaussian: a product of bona fide single-mode
/// covariances plus positive semidefinite classical correlations (the
/// covariance of a random ensemble of correlated displacements), which
/// keeps the state a mixture of displaced products.
pub fn random_separable_two_mode(rng: &mut impl Rng, hbar: f64) -> Result<GaussianState> {
    let system = ModeSystem::new(2, hbar)?;
    let mut cov = DMatrix::zeros(4, 4);
    for mode in 0..2 {
        let s = random_symplectic(rng, 1, 0.4);
        let nu = hbar / 2.0 * (1.0 + rng.random::<f64>());
        let v = &s * DMatrix::from_diagonal_element(2, 2, nu) * s.transpose();
        // embed (x_m, p_m) block into (x1, x2, p1, p2) ordering
        let idx = [mode, 2 + mode];
        for a in 0..2 {
            for b in 0..2 {
                cov[(idx[a], idx[b])] = v[(a, b)];
            }
        }
    }
    // classical correlations: Y = A Aᵀ, scaled
    let a = DMatrix::from_fn(4, 2, |_, _| normal(rng) * 0.6 * hbar.sqrt());
    cov += &a * a.transpose();
    let mean = DVector::from_fn(4, |_, _| normal(rng) * hbar.sqrt());
    GaussianState::new(mean, cov, system)
}

/// Random superposition of the lowest `max_n + 1` Fock states on a grid.
pub fn random_fock_superposition(
    rng: &mut impl Rng,
    max_n: usize,
    grid_n: usize,
    hbar: f64,
) -> Result<GridWavefunction> {
    let amps: Vec<Complex64> = (0..=max_n)
        .map(|_| Complex64::new(normal(rng), normal(rng)))
        .collect();
    GridWavefunction::fock_superposition(&amps, grid_n, hbar)
}

/// Random canonically conjugate pair: rows 1 and n+1 of a random symplectic
/// matrix define quadratures with γ = 1 that are Fourier-connected (they
/// are the canonical pair of the transformed mode system); optional scaling
/// spreads γ over a range while preserving conjugacy.
pub fn random_cco_pair(rng: &mut impl Rng, n_modes: usize) -> Result<QuadraturePair> {
    let s = random_symplectic(rng, n_modes, 0.4);
    let scale_u = 0.5 + rng.random::<f64>() * 1.5;
    let scale_v = 0.5 + rng.random::<f64>() * 1.5;
    let du: Vec<f64> = (0..2 * n_modes).map(|j| s[(0, j)] * scale_u).collect();
    let dv: Vec<f64> = (0..2 * n_modes).map(|j| s[(n_modes, j)] * scale_v).collect();
    QuadraturePair::new(QuadratureCoeffs::new(du)?, QuadratureCoeffs::new(dv)?, true)
}

/// Random pair of arbitrary (generally non-conjugate) linear combinations.
pub fn random_general_pair(rng: &mut impl Rng, n_modes: usize) -> Result<QuadraturePair> {
    loop {
        let du: Vec<f64> = (0..2 * n_modes).map(|_| normal(rng)).collect();
        let dv: Vec<f64> = (0..2 * n_modes).map(|_| normal(rng)).collect();
        let du = QuadratureCoeffs::new(du)?;
        let dv = QuadratureCoeffs::new(dv)?;
        let pair = QuadraturePair::new(du, dv, false)?;
        if pair.gamma().abs() > 0.05 {
            return Ok(pair);
        }
    }
}
