//! Scenario configuration schema: states, pairs, coarse grainings, UR kind
//! lists, sweep grids, and output paths. A config round-trips through JSON.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use cvur::states::{
    GaussianState, GridDensity, GridWavefunction, Marginal, ModeSystem, QuadratureCoeffs,
    QuadraturePair,
};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateSpec {
    /// Mean vector and covariance matrix in (q.., p..) ordering.
    Gaussian {
        mean: Vec<f64>,
        cov: Vec<Vec<f64>>,
        hbar: f64,
    },
    /// Wavefunction samples from a CSV file with rows `x, re, im`.
    Grid { csv: PathBuf, hbar: f64 },
    /// Superposition of the lowest Fock states; amplitudes as [re, im].
    FockSuperposition {
        amplitudes: Vec<[f64; 2]>,
        hbar: f64,
        #[serde(default = "default_grid_n")]
        grid_n: usize,
    },
    TwoModeSqueezed { r: f64, hbar: f64 },
}

fn default_grid_n() -> usize {
    4096
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum PairSpec {
    /// x̂ and p̂ of the first mode.
    #[default]
    Canonical,
    /// Explicit coefficient vectors; `cco` declares Fourier conjugacy.
    Custom {
        du: Vec<f64>,
        dv: Vec<f64>,
        cco: bool,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum CgSpec {
    Standard { delta: f64, u_cen: Option<f64> },
    Periodic { s: f64, t: f64, u_cen: f64 },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum UrKindSpec {
    Heisenberg,
    Linear,
    Schrodinger,
    Shannon,
    Renyi,
    CgEntropic,
    CgVariance,
    CgK,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SweepSpec {
    pub delta_min: f64,
    pub delta_max: f64,
    pub steps: usize,
    /// small_delta = aspect * delta at every sweep point.
    #[serde(default = "default_aspect")]
    pub aspect: f64,
}

fn default_aspect() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OutputSpec {
    /// UR report stream, one JSON object per line.
    pub reports: Option<String>,
    /// Sweep table CSV.
    pub scan: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ScenarioConfig {
    pub state: StateSpec,
    #[serde(default)]
    pub pair: PairSpec,
    /// Rényi order for entropic relations (conjugate order is implied).
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub ur_kinds: Vec<UrKindSpec>,
    #[serde(default)]
    pub coarse_graining: Option<CgSpec>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub seed: u64,
    pub outputs: OutputSpec,
}

fn default_alpha() -> f64 {
    1.0
}

impl ScenarioConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: ScenarioConfig = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        Ok(cfg)
    }
}

/// A state loaded into evaluable form.
pub enum LoadedState {
    Gaussian(GaussianState),
    Grid(GridWavefunction),
}

impl LoadedState {
    pub fn hbar(&self) -> f64 {
        match self {
            LoadedState::Gaussian(g) => g.hbar(),
            LoadedState::Grid(g) => g.hbar(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            LoadedState::Gaussian(g) => 2 * g.n_modes(),
            LoadedState::Grid(_) => 2,
        }
    }

    /// Marginal distribution of the quadrature combination d.
    ///
    /// Grid states realize an arbitrary single-mode combination
    /// a·x̂ + a′·p̂ as the scaled rotated quadrature r·x̂_θ with
    /// r = hypot(a, a′), θ = atan2(a′, a), via the fractional transform.
    pub fn marginal(&self, d: &QuadratureCoeffs) -> Result<Marginal> {
        match self {
            LoadedState::Gaussian(g) => Ok(g.marginal(d)?),
            LoadedState::Grid(psi) => {
                let v = d.as_vector();
                if v.len() != 2 {
                    bail!("grid states are single-mode; got {} coefficients", v.len());
                }
                let (a, ap) = (v[0], v[1]);
                let r = a.hypot(ap);
                let theta = ap.atan2(a);
                let rotated = psi.frft(theta).position_density();
                let scaled = GridDensity::new(
                    rotated.values().iter().map(|x| x / r).collect(),
                    rotated.x0() * r,
                    rotated.dx() * r,
                    psi.hbar(),
                )?;
                Ok(Marginal::Grid(scaled))
            }
        }
    }
}

pub fn load_state(spec: &StateSpec, base_dir: &Path) -> Result<LoadedState> {
    match spec {
        StateSpec::Gaussian { mean, cov, hbar } => {
            let dim = mean.len();
            if dim % 2 != 0 || dim == 0 {
                bail!("gaussian mean must have even positive length, got {dim}");
            }
            if cov.len() != dim || cov.iter().any(|row| row.len() != dim) {
                bail!("covariance must be {dim}x{dim}");
            }
            let flat: Vec<f64> = cov.iter().flatten().cloned().collect();
            let state = GaussianState::new(
                DVector::from_vec(mean.clone()),
                DMatrix::from_row_slice(dim, dim, &flat),
                ModeSystem::new(dim / 2, *hbar)?,
            )?;
            Ok(LoadedState::Gaussian(state))
        }
        StateSpec::Grid { csv, hbar } => {
            let path = if csv.is_absolute() {
                csv.clone()
            } else {
                base_dir.join(csv)
            };
            Ok(LoadedState::Grid(load_wavefunction_csv(&path, *hbar)?))
        }
        StateSpec::FockSuperposition {
            amplitudes,
            hbar,
            grid_n,
        } => {
            let amps: Vec<Complex64> = amplitudes
                .iter()
                .map(|[re, im]| Complex64::new(*re, *im))
                .collect();
            Ok(LoadedState::Grid(GridWavefunction::fock_superposition(
                &amps, *grid_n, *hbar,
            )?))
        }
        StateSpec::TwoModeSqueezed { r, hbar } => Ok(LoadedState::Gaussian(
            cvur::entanglement::two_mode_squeezed(*r, *hbar)?,
        )),
    }
}

/// Reads a wavefunction from CSV rows `x, re, im` (an optional header line
/// is skipped); samples are renormalized on load.
pub fn load_wavefunction_csv(path: &Path, hbar: f64) -> Result<GridWavefunction> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading wavefunction {}", path.display()))?;
    let mut xs = Vec::new();
    let mut samples = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            bail!("{}:{}: expected 3 columns (x, re, im)", path.display(), i + 1);
        }
        match (
            fields[0].parse::<f64>(),
            fields[1].parse::<f64>(),
            fields[2].parse::<f64>(),
        ) {
            (Ok(x), Ok(re), Ok(im)) => {
                xs.push(x);
                samples.push(Complex64::new(re, im));
            }
            _ if i == 0 => continue, // header
            _ => bail!("{}:{}: unparsable numeric row", path.display(), i + 1),
        }
    }
    if xs.len() < 2 {
        bail!("{}: need at least 2 samples", path.display());
    }
    let dx = xs[1] - xs[0];
    // NaN-rejecting comparison
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(dx > 0.0) {
        bail!("{}: x column must be strictly increasing", path.display());
    }
    for w in xs.windows(2) {
        if ((w[1] - w[0]) - dx).abs() > 1e-9 * dx {
            bail!("{}: grid spacing must be uniform", path.display());
        }
    }
    Ok(GridWavefunction::new_normalized(samples, xs[0], dx, hbar)?)
}

pub fn build_pair(spec: &PairSpec, dim: usize) -> Result<QuadraturePair> {
    match spec {
        PairSpec::Canonical => Ok(QuadraturePair::canonical(0, dim / 2)?),
        PairSpec::Custom { du, dv, cco } => {
            if du.len() != dim || dv.len() != dim {
                bail!(
                    "pair coefficients must have length {dim}, got {} and {}",
                    du.len(),
                    dv.len()
                );
            }
            Ok(QuadraturePair::new(
                QuadratureCoeffs::new(du.clone())?,
                QuadratureCoeffs::new(dv.clone())?,
                *cco,
            )?)
        }
    }
}
