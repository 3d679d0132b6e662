//! Coarse graining of continuous marginal distributions: standard (adjacent
//! width-Δ bins) and periodic (bins of width s repeating with period T = d·s,
//! outcomes identified mod T), plus the histogram functions used to lift a
//! discrete distribution back to a piecewise continuous density Q.

use crate::numeric::integrate_segmented;
use crate::states::Marginal;
use crate::{Error, Result, FAITHFUL_COVERAGE};

/// Standard coarse graining: bins `(u_cen + (k-1/2)Δ, u_cen + (k+1/2)Δ]`
/// for k in the probed index interval.
#[derive(Debug, Clone)]
pub struct StandardCg {
    delta: f64,
    u_cen: f64,
    k_min: i64,
    k_max: i64,
}

impl StandardCg {
    pub fn new(delta: f64, u_cen: f64, k_min: i64, k_max: i64) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "bin width must be positive, got {delta}"
            )));
        }
        if k_min > k_max {
            return Err(Error::InvalidParameter(
                "empty coarse-graining index range".into(),
            ));
        }
        Ok(StandardCg {
            delta,
            u_cen,
            k_min,
            k_max,
        })
    }

    /// Index range just covering `[lo, hi]` around the given central bin.
    pub fn covering(delta: f64, u_cen: f64, lo: f64, hi: f64) -> Result<Self> {
        let k_min = ((lo - u_cen) / delta - 0.5).floor() as i64;
        let k_max = ((hi - u_cen) / delta + 0.5).ceil() as i64;
        StandardCg::new(delta, u_cen, k_min, k_max)
    }

    /// Central bin placed at the distribution mean (the recommended
    /// positioning; borderline settings like `u_cen = Δ/2` behave badly in
    /// the infinite-coarse-graining limit), index range covering the
    /// distribution's support hint.
    pub fn centered_on(density: &Marginal, delta: f64) -> Result<Self> {
        let (lo, hi) = density.range_hint();
        StandardCg::covering(delta, density.mean(), lo, hi)
    }

    /// Bin edges aligned with the cells of a grid density: `delta` spans
    /// `cells_per_bin` grid cells and edges coincide with cell boundaries.
    pub fn aligned_to_grid(
        grid: &crate::states::GridDensity,
        cells_per_bin: usize,
    ) -> Result<Self> {
        if cells_per_bin == 0 {
            return Err(Error::InvalidParameter("cells_per_bin must be > 0".into()));
        }
        let delta = cells_per_bin as f64 * grid.dx();
        // place the central-bin left edge on the cell boundary nearest the mean
        let (lo, hi) = grid.support();
        let j = ((grid.mean() - lo) / grid.dx()).floor();
        let u_cen = lo + j * grid.dx() + 0.5 * delta;
        StandardCg::covering(delta, u_cen, lo, hi)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn u_cen(&self) -> f64 {
        self.u_cen
    }

    pub fn k_range(&self) -> (i64, i64) {
        (self.k_min, self.k_max)
    }

    pub fn with_k_range(mut self, k_min: i64, k_max: i64) -> Result<Self> {
        if k_min > k_max {
            return Err(Error::InvalidParameter(
                "empty coarse-graining index range".into(),
            ));
        }
        self.k_min = k_min;
        self.k_max = k_max;
        Ok(self)
    }

    /// Outcome value of bin k (its center).
    pub fn outcome(&self, k: i64) -> f64 {
        self.u_cen + k as f64 * self.delta
    }

    /// Detection window of bin k as the half-open interval (a, b].
    pub fn bin_interval(&self, k: i64) -> (f64, f64) {
        (
            self.u_cen + (k as f64 - 0.5) * self.delta,
            self.u_cen + (k as f64 + 0.5) * self.delta,
        )
    }

    /// Refines each bin into two halves (Δ/2 with twice the indices).
    pub fn halved(&self) -> StandardCg {
        StandardCg {
            delta: 0.5 * self.delta,
            u_cen: self.u_cen - 0.25 * self.delta,
            k_min: 2 * self.k_min,
            k_max: 2 * self.k_max + 1,
        }
    }
}

/// Periodic coarse graining: d outcomes, bins of width s arranged with
/// period T = d·s; a detection in any bin congruent mod T yields the same
/// outcome label k in 0..d.
#[derive(Debug, Clone)]
pub struct PeriodicCg {
    s: f64,
    t: f64,
    u_cen: f64,
    d: u32,
}

impl PeriodicCg {
    pub fn new(s: f64, t: f64, u_cen: f64) -> Result<Self> {
        if !(s > 0.0) || !(t > 0.0) {
            return Err(Error::InvalidParameter(
                "periodic coarse graining needs s > 0 and T > 0".into(),
            ));
        }
        let d = (t / s).round();
        if d < 2.0 || (t - d * s).abs() > 1e-12 * t {
            return Err(Error::InvalidParameter(format!(
                "period T must equal d*s for integer d >= 2 (T = {t}, s = {s})"
            )));
        }
        Ok(PeriodicCg {
            s,
            t,
            u_cen,
            d: d as u32,
        })
    }

    pub fn from_outcomes(s: f64, d: u32, u_cen: f64) -> Result<Self> {
        PeriodicCg::new(s, s * d as f64, u_cen)
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn period(&self) -> f64 {
        self.t
    }

    pub fn u_cen(&self) -> f64 {
        self.u_cen
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// The n-th bin of outcome k: `[u_cen + k s + n T, u_cen + (k+1) s + n T)`.
    pub fn bin_interval(&self, k: u32, n: i64) -> (f64, f64) {
        let a = self.u_cen + k as f64 * self.s + n as f64 * self.t;
        (a, a + self.s)
    }
}

/// Outcome labels of a discrete distribution: real bin centers for standard
/// coarse graining, cyclic indices 0..d for periodic.
#[derive(Debug, Clone)]
pub enum OutcomeLabels {
    Standard { u_cen: f64, delta: f64, k_min: i64 },
    Periodic { d: u32 },
}

/// Discrete outcome distribution produced by a coarse-grained measurement.
///
/// `coverage` is the total captured probability; a distribution is a
/// faithful image of the underlying density only when coverage is close to
/// one, which downstream evaluators annotate rather than enforce.
#[derive(Debug, Clone)]
pub struct DiscreteDistribution {
    probs: Vec<f64>,
    labels: OutcomeLabels,
    coverage: f64,
}

impl DiscreteDistribution {
    fn new(probs: Vec<f64>, labels: OutcomeLabels) -> Self {
        let coverage: f64 = probs.iter().sum();
        debug_assert!(coverage <= 1.0 + 1e-12, "coverage {coverage} > 1");
        debug_assert!(probs.iter().all(|&p| p >= 0.0));
        DiscreteDistribution {
            probs,
            labels,
            coverage,
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn labels(&self) -> &OutcomeLabels {
        &self.labels
    }

    pub fn coverage(&self) -> f64 {
        self.coverage
    }

    pub fn is_faithful(&self) -> bool {
        self.coverage >= FAITHFUL_COVERAGE
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Probabilities renormalized by the coverage.
    pub fn renormalized(&self) -> Vec<f64> {
        self.probs.iter().map(|p| p / self.coverage).collect()
    }

    /// Real outcome value of entry i, when labels are metric.
    pub fn outcome_value(&self, i: usize) -> Result<f64> {
        match &self.labels {
            OutcomeLabels::Standard {
                u_cen,
                delta,
                k_min,
            } => Ok(u_cen + (k_min + i as i64) as f64 * delta),
            OutcomeLabels::Periodic { .. } => Err(Error::PeriodicLabels),
        }
    }

    /// Standard-CG bin width, when labels are metric.
    pub fn bin_width(&self) -> Result<f64> {
        match &self.labels {
            OutcomeLabels::Standard { delta, .. } => Ok(*delta),
            OutcomeLabels::Periodic { .. } => Err(Error::PeriodicLabels),
        }
    }

    /// Two-column CSV (outcome, probability).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("outcome,probability\n");
        for (i, p) in self.probs.iter().enumerate() {
            match &self.labels {
                OutcomeLabels::Standard { .. } => {
                    let u = self.outcome_value(i).expect("standard labels");
                    out.push_str(&format!("{u},{p}\n"));
                }
                OutcomeLabels::Periodic { .. } => out.push_str(&format!("{i},{p}\n")),
            }
        }
        out
    }
}

/// Integrates the density over every bin of the standard coarse graining.
pub fn bin_probabilities(density: &Marginal, cg: &StandardCg) -> DiscreteDistribution {
    let (k_min, k_max) = cg.k_range();
    let probs = (k_min..=k_max)
        .map(|k| {
            let (a, b) = cg.bin_interval(k);
            density.mass_in(a, b)
        })
        .collect();
    DiscreteDistribution::new(
        probs,
        OutcomeLabels::Standard {
            u_cen: cg.u_cen(),
            delta: cg.delta(),
            k_min,
        },
    )
}

/// Aggregates the density into the d periodic outcomes, summing congruent
/// bins over periods until the residual mass per flank drops below 1e-12.
pub fn pcg_probabilities(density: &Marginal, pcg: &PeriodicCg) -> DiscreteDistribution {
    let d = pcg.d() as usize;
    let mut probs = vec![0.0; d];
    let (lo, hi) = density.range_hint();
    let t = pcg.period();
    let center_n = ((density.mean() - pcg.u_cen()) / t).floor() as i64;
    let n_lo = ((lo - pcg.u_cen()) / t).floor() as i64 - 1;
    let n_hi = ((hi - pcg.u_cen()) / t).ceil() as i64 + 1;

    let mut add_period = |n: i64| -> f64 {
        let mut block = 0.0;
        for (k, pk) in probs.iter_mut().enumerate() {
            let (a, b) = pcg.bin_interval(k as u32, n);
            let m = density.mass_in(a, b);
            *pk += m;
            block += m;
        }
        block
    };

    add_period(center_n);
    for side in [1i64, -1] {
        let mut i = 1;
        loop {
            let n = center_n + side * i;
            if side > 0 && n > n_hi || side < 0 && n < n_lo {
                break;
            }
            let block = add_period(n);
            if block < 1e-12 && i > 1 {
                break;
            }
            i += 1;
        }
    }
    DiscreteDistribution::new(probs, OutcomeLabels::Periodic { d: pcg.d() })
}

/// Per-bin density shape used to lift discrete probabilities back to a
/// piecewise continuous function. Normalized to one on a single bin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HistogramFunction {
    /// Constant 1/Δ across the bin.
    Rectangular { width: f64 },
    /// Gaussian of variance `inner_variance` truncated to the central bin
    /// and renormalized — the entropy-maximizing shape at fixed variance.
    GaussianOptimal { width: f64, inner_variance: f64 },
}

impl HistogramFunction {
    pub fn rectangular(width: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::InvalidParameter("HF width must be positive".into()));
        }
        Ok(HistogramFunction::Rectangular { width })
    }

    pub fn gaussian_optimal(width: f64, inner_variance: f64) -> Result<Self> {
        if !(width > 0.0) || !(inner_variance > 0.0) {
            return Err(Error::InvalidParameter(
                "HF width and inner variance must be positive".into(),
            ));
        }
        Ok(HistogramFunction::GaussianOptimal {
            width,
            inner_variance,
        })
    }

    pub fn width(&self) -> f64 {
        match self {
            HistogramFunction::Rectangular { width } => *width,
            HistogramFunction::GaussianOptimal { width, .. } => *width,
        }
    }

    pub fn is_rectangular(&self) -> bool {
        matches!(self, HistogramFunction::Rectangular { .. })
    }

    /// D(u, u_k) as a function of the offset from the bin center; zero
    /// outside (-Δ/2, Δ/2].
    pub fn eval(&self, offset: f64) -> f64 {
        let w = self.width();
        if offset <= -0.5 * w || offset > 0.5 * w {
            return 0.0;
        }
        match self {
            HistogramFunction::Rectangular { width } => 1.0 / width,
            HistogramFunction::GaussianOptimal {
                width,
                inner_variance,
            } => {
                let z = (-offset * offset / (2.0 * inner_variance)).exp();
                let norm = (2.0 * std::f64::consts::PI * inner_variance).sqrt()
                    * crate::special_fn::erf(width / (2.0 * (2.0 * inner_variance).sqrt()));
                z / norm
            }
        }
    }

    /// Integration segment size resolving the HF's sharpest feature.
    fn quadrature_scale(&self) -> f64 {
        match self {
            HistogramFunction::Rectangular { width } => *width,
            HistogramFunction::GaussianOptimal {
                width,
                inner_variance,
            } => (inner_variance.sqrt() * 0.5).min(*width),
        }
    }
}

/// Rényi entropy and variance of a histogram function.
///
/// Rectangular HFs have entropy ln Δ for every order and variance Δ²/12 in
/// closed form; other shapes are integrated numerically.
pub fn hf_moments(hf: &HistogramFunction, alpha: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidOrder(alpha));
    }
    match hf {
        HistogramFunction::Rectangular { width } => Ok((width.ln(), width * width / 12.0)),
        HistogramFunction::GaussianOptimal { width, .. } => {
            let half = 0.5 * width;
            let seg = hf.quadrature_scale();
            let entropy = if (alpha - 1.0).abs() < 1e-12 {
                integrate_segmented(
                    |u| {
                        let d = hf.eval(u);
                        if d > 0.0 {
                            -d * d.ln()
                        } else {
                            0.0
                        }
                    },
                    -half,
                    half,
                    seg,
                )
            } else {
                let int =
                    integrate_segmented(|u| hf.eval(u).powf(alpha), -half, half, seg);
                int.ln() / (1.0 - alpha)
            };
            let variance = integrate_segmented(|u| u * u * hf.eval(u), -half, half, seg);
            Ok((entropy, variance))
        }
    }
}

/// Piecewise continuous density Q(u) = Σ_k p_k D(u, u_k) built from a
/// standard-coarse-grained distribution and a histogram function.
///
/// Q integrates to the distribution's coverage; entropy and moment
/// integrals run bin by bin with quadrature resolving the HF shape.
#[derive(Debug, Clone)]
pub struct QDensity {
    probs: Vec<f64>,
    centers: Vec<f64>,
    hf: HistogramFunction,
    coverage: f64,
}

impl QDensity {
    pub fn hf(&self) -> &HistogramFunction {
        &self.hf
    }

    pub fn coverage(&self) -> f64 {
        self.coverage
    }

    pub fn bins(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.centers.iter().cloned().zip(self.probs.iter().cloned())
    }

    pub fn eval(&self, u: f64) -> f64 {
        let delta = self.hf.width();
        let first = self.centers[0];
        let idx = ((u - first) / delta).round() as i64;
        if idx < 0 || idx as usize >= self.centers.len() {
            return 0.0;
        }
        let k = idx as usize;
        self.probs[k] * self.hf.eval(u - self.centers[k])
    }

    /// Σ_k ∫_bin f(Q(u)) du with per-bin segmentation.
    pub fn integrate_of_density<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let half = 0.5 * self.hf.width();
        let seg = self.hf.quadrature_scale();
        let mut acc = 0.0;
        for (c, p) in self.bins() {
            if p == 0.0 {
                // Q vanishes on this bin; integrand assumed to vanish at 0
                continue;
            }
            acc += integrate_segmented(
                |u| f(p * self.hf.eval(u - c)),
                c - half,
                c + half,
                seg,
            );
        }
        acc
    }

    /// Mean and variance of Q by direct quadrature (independent of the
    /// discrete + HF moment decomposition).
    pub fn moments_numeric(&self) -> (f64, f64) {
        let half = 0.5 * self.hf.width();
        let seg = self.hf.quadrature_scale();
        let mut m0 = 0.0;
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for (c, p) in self.bins() {
            if p == 0.0 {
                continue;
            }
            m0 += p;
            m1 += integrate_segmented(|u| u * p * self.hf.eval(u - c), c - half, c + half, seg);
            m2 +=
                integrate_segmented(|u| u * u * p * self.hf.eval(u - c), c - half, c + half, seg);
        }
        let mean = m1 / m0;
        (mean, m2 / m0 - mean * mean)
    }

    /// L1 distance ∫|Q - P| du to a reference marginal, over the union of
    /// the Q bins plus the reference's own support hint.
    pub fn l1_distance(&self, reference: &Marginal) -> f64 {
        let half = 0.5 * self.hf.width();
        let seg = self.hf.quadrature_scale().min(
            (reference.range_hint().1 - reference.range_hint().0) / 512.0,
        );
        let mut acc = 0.0;
        let (mut lo, mut hi) = (f64::MAX, f64::MIN);
        for (c, p) in self.bins() {
            acc += integrate_segmented(
                |u| (p * self.hf.eval(u - c) - reference.pdf(u)).abs(),
                c - half,
                c + half,
                seg,
            );
            lo = lo.min(c - half);
            hi = hi.max(c + half);
        }
        // reference mass escaping the binned range
        let (rlo, rhi) = reference.range_hint();
        if rlo < lo {
            acc += integrate_segmented(|u| reference.pdf(u), rlo, lo, (lo - rlo) / 64.0);
        }
        if rhi > hi {
            acc += integrate_segmented(|u| reference.pdf(u), hi, rhi, (rhi - hi) / 64.0);
        }
        acc
    }

    /// Samples Q onto a uniform grid with `per_bin` cells per bin.
    pub fn to_grid(&self, per_bin: usize, hbar: f64) -> crate::states::GridDensity {
        let delta = self.hf.width();
        let dx = delta / per_bin as f64;
        let lo = self.centers[0] - 0.5 * delta;
        let n = self.centers.len() * per_bin;
        let values = (0..n)
            .map(|i| self.eval(lo + (i as f64 + 0.5) * dx))
            .collect();
        crate::states::GridDensity::from_values_unchecked(values, lo + 0.5 * dx, dx, hbar)
    }
}

/// Lifts a standard-CG distribution to the piecewise density Q.
pub fn render_q(dist: &DiscreteDistribution, hf: &HistogramFunction) -> Result<QDensity> {
    let delta = dist.bin_width()?;
    if (hf.width() - delta).abs() > 1e-12 * delta {
        return Err(Error::WidthMismatch {
            hf: hf.width(),
            cg: delta,
        });
    }
    let centers = (0..dist.len())
        .map(|i| dist.outcome_value(i))
        .collect::<Result<Vec<_>>>()?;
    Ok(QDensity {
        probs: dist.probs().to_vec(),
        centers,
        hf: *hf,
        coverage: dist.coverage(),
    })
}

/// Variance of the discrete outcome distribution (standard labels only),
/// using coverage-renormalized probabilities.
pub fn discrete_variance(dist: &DiscreteDistribution) -> Result<f64> {
    if dist.is_empty() || dist.coverage() <= 0.0 {
        return Err(Error::EmptyDistribution);
    }
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    for (i, p) in dist.renormalized().iter().enumerate() {
        let u = dist.outcome_value(i)?;
        m1 += u * p;
        m2 += u * u * p;
    }
    Ok((m2 - m1 * m1).max(0.0))
}
