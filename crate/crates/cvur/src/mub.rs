//! Mutual unbiasedness of periodic coarse grainings: the exact rational
//! certification condition on the periods, and numeric probes that localize
//! a state in one coarse-grained observable and check uniformity of the
//! conjugate outcomes.

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::coarse_grain::{pcg_probabilities, PeriodicCg};
use crate::states::{GridWavefunction, Marginal};
use crate::{Error, Result, FAITHFUL_COVERAGE};

/// Certification outcome for a pair of periodic coarse grainings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MubStatus {
    /// `T_u T_v/(2πħ) = d/m` with m coprime to d: localization in either
    /// observable forces the uniform distribution on the other.
    Unbiased { m: u64 },
    /// `m ≡ 0 (mod d)`: the projector sets commute and joint eigenstates
    /// exist.
    Commuting { m: u64 },
    Biased,
}

/// Result of [`mub_condition`]: status plus the dimensionless period product.
#[derive(Debug, Clone, Copy)]
pub struct MubVerdict {
    pub status: MubStatus,
    pub d: u32,
    /// `T_u T_v / (2πħ)`.
    pub product: f64,
}

impl MubVerdict {
    pub fn is_unbiased(&self) -> bool {
        matches!(self.status, MubStatus::Unbiased { .. })
    }
}

/// Best rational approximation p/q of `x` with q <= cap, by continued
/// fractions.
fn rational_approx(x: f64, cap: u64) -> (u64, u64) {
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut frac = x;
    for _ in 0..64 {
        let a = frac.floor();
        if a < 0.0 || a > u64::MAX as f64 {
            break;
        }
        let a = a as u64;
        let p2 = a.saturating_mul(p1).saturating_add(p0);
        let q2 = a.saturating_mul(q1).saturating_add(q0);
        if q2 > cap {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let rem = frac - a as f64;
        if rem.abs() < 1e-15 * x.max(1.0) {
            break;
        }
        frac = 1.0 / rem;
    }
    (p1, q1)
}

/// Tests the single unbiasedness condition on the periods:
/// `T_u T_v/(2πħ) = d/m` for a natural number m such that no n in 1..d
/// makes mn/d an integer. `m ≡ 0 (mod d)` marks the commuting family
/// instead. Floating-point inputs map to the exact arithmetic condition by
/// continued-fraction matching (denominator cap 10⁶, relative 1e-12).
pub fn mub_condition(tu: f64, tv: f64, d: u32, hbar: f64) -> Result<MubVerdict> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!(
            "periodic coarse graining needs d >= 2, got {d}"
        )));
    }
    if !(tu > 0.0) || !(tv > 0.0) || !(hbar > 0.0) {
        return Err(Error::InvalidParameter(
            "periods and hbar must be positive".into(),
        ));
    }
    let product = tu * tv / (2.0 * std::f64::consts::PI * hbar);
    let (num, den) = rational_approx(product, 1_000_000);
    let status = if den == 0 || (product - num as f64 / den as f64).abs() > 1e-12 * product {
        MubStatus::Biased
    } else {
        // product = num/den must equal d/m: m = d*den/num for integer m
        let dd = d as u64 * den;
        if num == 0 || dd % num != 0 {
            MubStatus::Biased
        } else {
            let m = dd / num;
            if m % d as u64 == 0 {
                MubStatus::Commuting { m }
            } else {
                let mut ok = true;
                for n in 1..d as u64 {
                    if (m * n) % d as u64 == 0 {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    MubStatus::Unbiased { m }
                } else {
                    MubStatus::Biased
                }
            }
        }
    };
    Ok(MubVerdict { status, d, product })
}

/// Checks that the four equivalent phrasings of the unbiasedness condition
/// (on T_uT_v, T_us_v, s_uT_v, s_us_v) are mutually consistent for these
/// widths and periods, given T = d·s on both sides.
pub fn alternative_forms_check(
    su: f64,
    tu: f64,
    sv: f64,
    tv: f64,
    d: u32,
    hbar: f64,
) -> Result<bool> {
    if d < 2 {
        return Err(Error::InvalidParameter("d must be >= 2".into()));
    }
    let rel = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
    if !rel(tu, d as f64 * su) || !rel(tv, d as f64 * sv) {
        return Ok(false);
    }
    let two_pi_hbar = 2.0 * std::f64::consts::PI * hbar;
    let m_a = two_pi_hbar * d as f64 / (tu * tv);
    let m_b = two_pi_hbar / (tu * sv);
    let m_c = two_pi_hbar / (su * tv);
    let m_d = two_pi_hbar / (d as f64 * su * sv);
    Ok(rel(m_a, m_b) && rel(m_a, m_c) && rel(m_a, m_d))
}

/// Probe grid resolution: 16 samples per bin keeps both the bin integrals
/// and the conjugate-domain envelope well resolved at N = 4096.
const SAMPLES_PER_BIN: f64 = 16.0;
const PROBE_GRID: usize = 4096;

/// A normalized superposition of narrow Gaussians centered in `copies`
/// consecutive period-translated bins of outcome `k0`, with the given
/// complex amplitudes. Its coarse-grained distribution puts (1 - <1e-6) of
/// the probability on outcome k0; the many normalizable states of this form
/// realize the degeneracy of "localized" probes.
pub fn localized_probe_with_amplitudes(
    pcg: &PeriodicCg,
    k0: u32,
    inner_width: f64,
    amplitudes: &[Complex64],
    hbar: f64,
) -> Result<GridWavefunction> {
    if k0 >= pcg.d() {
        return Err(Error::InvalidParameter(format!(
            "outcome {k0} out of range for d = {}",
            pcg.d()
        )));
    }
    if !(inner_width > 0.0) || inner_width > pcg.s() / 4.0 {
        return Err(Error::InvalidParameter(format!(
            "probe width must lie in (0, s/4]; got {inner_width} for s = {}",
            pcg.s()
        )));
    }
    let copies = amplitudes.len();
    if copies == 0 {
        return Err(Error::EmptyDistribution);
    }
    let dx = pcg.s() / SAMPLES_PER_BIN;
    let half_width = PROBE_GRID as f64 * dx / 2.0;
    let span = copies as f64 * pcg.period() / 2.0 + 10.0 * pcg.s();
    if span > half_width {
        return Err(Error::InvalidParameter(format!(
            "{copies} copies with period {} exceed the probe grid window",
            pcg.period()
        )));
    }
    // lump centers: middle of the k0 bin in `copies` consecutive periods
    let base = pcg.u_cen() + (k0 as f64 + 0.5) * pcg.s();
    let centers: Vec<f64> = (0..copies)
        .map(|i| base + (i as i64 - copies as i64 / 2) as f64 * pcg.period())
        .collect();
    let mid = 0.5 * (centers[0] + centers[copies - 1]);
    // inner_width is the standard deviation of each lump's |psi|^2
    let four_s2 = 4.0 * inner_width * inner_width;
    GridWavefunction::from_fn(PROBE_GRID, mid, half_width, hbar, |x| {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, a) in centers.iter().zip(amplitudes) {
            acc += a * (-(x - c).powi(2) / four_s2).exp();
        }
        acc
    })
}

/// Uniform-amplitude probe localized in outcome `k0`.
pub fn localized_probe_state(
    pcg: &PeriodicCg,
    k0: u32,
    inner_width: f64,
    copies: usize,
    hbar: f64,
) -> Result<GridWavefunction> {
    let amps = vec![Complex64::new(1.0, 0.0); copies];
    localized_probe_with_amplitudes(pcg, k0, inner_width, &amps, hbar)
}

/// Numerically tests mutual unbiasedness of a pair of periodic coarse
/// grainings on conjugate variables: over probe states localized in each
/// u-outcome (and symmetrically in each v-outcome), returns the worst
/// deviation `max |p - 1/d|` of the conjugate outcome distribution from
/// uniform.
///
/// Probe set per outcome: `trials` random-amplitude probes with 3 copies
/// plus one uniform probe with 8 copies. Deterministic under a fixed seed.
pub fn unbiasedness_test(
    pcg_u: &PeriodicCg,
    pcg_v: &PeriodicCg,
    trials: usize,
    hbar: f64,
    seed: u64,
) -> Result<f64> {
    if pcg_u.d() != pcg_v.d() {
        return Err(Error::DimensionMismatch(
            pcg_u.d() as usize,
            pcg_v.d() as usize,
        ));
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let d = pcg_u.d();
    let mut worst = 0.0f64;

    let mut run_side = |pcg_a: &PeriodicCg,
                        pcg_b: &PeriodicCg,
                        to_conjugate: &dyn Fn(&GridWavefunction) -> GridWavefunction,
                        rng: &mut StdRng|
     -> Result<()> {
        for k0 in 0..d {
            let mut probes: Vec<GridWavefunction> = Vec::with_capacity(trials + 1);
            for _ in 0..trials {
                let amps: Vec<Complex64> = (0..3)
                    .map(|_| {
                        Complex64::new(
                            rng.random::<f64>() * 2.0 - 1.0,
                            rng.random::<f64>() * 2.0 - 1.0,
                        )
                    })
                    .collect();
                probes.push(localized_probe_with_amplitudes(
                    pcg_a,
                    k0,
                    pcg_a.s() / 10.0,
                    &amps,
                    hbar,
                )?);
            }
            probes.push(localized_probe_state(pcg_a, k0, pcg_a.s() / 10.0, 8, hbar)?);
            for probe in &probes {
                let conj = to_conjugate(probe);
                let density = conj.position_density();
                if density.total_mass() < FAITHFUL_COVERAGE {
                    return Err(Error::UnfaithfulCoverage(density.total_mass()));
                }
                let dist = pcg_probabilities(&Marginal::Grid(density), pcg_b);
                for p in dist.probs() {
                    worst = worst.max((p - 1.0 / d as f64).abs());
                }
            }
        }
        Ok(())
    };

    // u-localized probes, measured in v
    run_side(pcg_u, pcg_v, &|psi| psi.conjugate(), &mut rng)?;
    // v-localized probes (built in the momentum representation), measured in
    // u: the position wavefunction is the inverse transform
    run_side(pcg_v, pcg_u, &|phi| phi.parity().conjugate(), &mut rng)?;
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn certified_pair(d: u32, m: u64, hbar: f64, su: f64) -> (PeriodicCg, PeriodicCg) {
        let tu = d as f64 * su;
        let tv = 2.0 * PI * hbar * d as f64 / (m as f64 * tu);
        (
            PeriodicCg::from_outcomes(su, d, 0.0).unwrap(),
            PeriodicCg::new(tv / d as f64, tv, 0.0).unwrap(),
        )
    }

    #[test]
    fn condition_m1_certifies_every_d() {
        let hbar = 0.7;
        for d in 2..=8u32 {
            let tu = 1.3;
            let tv = 2.0 * PI * hbar * d as f64 / tu;
            let v = mub_condition(tu, tv, d, hbar).unwrap();
            assert_eq!(v.status, MubStatus::Unbiased { m: 1 }, "d={d}");
        }
    }

    #[test]
    fn d4_and_d5_tables() {
        let hbar = 1.0;
        let tu = 2.0;
        for (d, ok_ms) in [(4u32, vec![1u64, 3]), (5, vec![1, 2, 3, 4])] {
            for m in 1..=(d as u64) {
                let tv = 2.0 * PI * hbar * d as f64 / (m as f64 * tu);
                let v = mub_condition(tu, tv, d, hbar).unwrap();
                if m == d as u64 {
                    assert!(matches!(v.status, MubStatus::Commuting { .. }), "d={d} m={m}");
                } else if ok_ms.contains(&m) {
                    assert_eq!(v.status, MubStatus::Unbiased { m }, "d={d} m={m}");
                } else {
                    assert_eq!(v.status, MubStatus::Biased, "d={d} m={m}");
                }
            }
        }
    }

    #[test]
    fn condition_symmetric_and_scale_invariant() {
        let hbar = 1.0;
        let (tu, tv, d) = (1.7, 2.0 * PI * 3.0 / 1.7, 3u32);
        let a = mub_condition(tu, tv, d, hbar).unwrap();
        let b = mub_condition(tv, tu, d, hbar).unwrap();
        assert_eq!(a.status, b.status);
        for lam in [0.3, 2.0, 11.0] {
            let c = mub_condition(tu * lam, tv / lam, d, hbar).unwrap();
            assert_eq!(a.status, c.status);
        }
    }

    #[test]
    fn irrational_product_is_biased() {
        let hbar = 1.0;
        let v = mub_condition(1.0, 1.0, 3, hbar).unwrap();
        assert_eq!(v.status, MubStatus::Biased);
    }

    #[test]
    fn alternative_forms() {
        let hbar = 1.0;
        let d = 3u32;
        let su = 0.9;
        let tu = d as f64 * su;
        let tv = 2.0 * PI * hbar * d as f64 / tu; // m = 1
        let sv = tv / d as f64;
        assert!(alternative_forms_check(su, tu, sv, tv, d, hbar).unwrap());
        // inconsistent s (T != d s) fails
        assert!(!alternative_forms_check(su * 1.01, tu, sv, tv, d, hbar).unwrap());
        // random valid tuple: the four forms are algebraically identical
        let su = 0.37;
        let tu = d as f64 * su;
        let m = 2.0;
        let tv = 2.0 * PI * hbar * d as f64 / (m * tu);
        assert!(alternative_forms_check(su, tu, tv / d as f64, tv, d, hbar).unwrap());
    }

    #[test]
    fn probe_localizes_to_one_outcome() {
        let hbar = 1.0;
        let (pcg_u, _) = certified_pair(3, 1, hbar, 1.0);
        for copies in [1usize, 5] {
            let probe = localized_probe_state(&pcg_u, 1, pcg_u.s() / 10.0, copies, hbar).unwrap();
            let dist = pcg_probabilities(&Marginal::Grid(probe.position_density()), &pcg_u);
            assert!(
                dist.probs()[1] >= 1.0 - 1e-6,
                "copies={copies}: p = {:?}",
                dist.probs()
            );
        }
        // width above s/4 is rejected
        assert!(localized_probe_state(&pcg_u, 1, pcg_u.s() / 2.0, 1, hbar).is_err());
    }

    #[test]
    fn unbiasedness_certified_d2() {
        let hbar = 1.0;
        let (u, v) = certified_pair(2, 1, hbar, 1.0);
        let dev = unbiasedness_test(&u, &v, 3, hbar, 11).unwrap();
        assert!(dev < 1e-3, "deviation {dev}");
    }

    #[test]
    fn standard_cg_is_biased_in_both_variables() {
        // the standard (non-periodic) design corresponds to a single huge
        // period; localization in one bin decays smoothly in the conjugate
        // domain, which is biased. Emulate with a biased PCG pair (d=4, m=2).
        let hbar = 1.0;
        let (u, v) = certified_pair(4, 2, hbar, 1.0);
        assert_eq!(
            mub_condition(u.period(), v.period(), 4, hbar)
                .unwrap()
                .status,
            MubStatus::Biased
        );
        let dev = unbiasedness_test(&u, &v, 3, hbar, 5).unwrap();
        assert!(dev > 1e-2, "deviation {dev}");
    }

    #[test]
    fn commuting_configuration_has_joint_near_eigenstate() {
        let hbar = 1.0;
        let d = 3u32;
        let (u, mut v) = certified_pair(d, d as u64, hbar, 1.0);
        // shift the conjugate binning half a bin so the momentum comb sits
        // mid-bin rather than on bin edges
        v = PeriodicCg::new(v.s(), v.period(), -0.5 * v.s()).unwrap();
        let probe = localized_probe_state(&u, 0, u.s() / 10.0, 16, hbar).unwrap();
        let dist = pcg_probabilities(&Marginal::Grid(probe.momentum_density()), &v);
        let dev = dist
            .probs()
            .iter()
            .map(|p| (p - 1.0 / d as f64).abs())
            .fold(0.0f64, f64::max);
        let expect = 1.0 - 1.0 / d as f64;
        assert!(
            (dev - expect).abs() < 0.1,
            "deviation {dev}, expected about {expect}"
        );
    }
}
