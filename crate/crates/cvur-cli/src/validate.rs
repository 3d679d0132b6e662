//! The `validate` subcommand: a fast smoke subset of the property suites.
//! Prints one line per check; any failure aborts with a nonzero exit.

use anyhow::{ensure, Result};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use cvur::coarse_grain::{bin_probabilities, HistogramFunction, StandardCg};
use cvur::entanglement::{witness_entropy, witness_variance, GlobalOperatorPair, MixedSign};
use cvur::entropy::{
    decompose_q_entropy, differential_entropy, jensen_gap, ConjugatePair, RenyiOrder,
};
use cvur::generators::{random_bona_fide_gaussian, random_cco_pair, random_separable_two_mode};
use cvur::special_fn::{k_of_t, ProlateEvaluator};
use cvur::states::{GaussianState, Marginal, QuadraturePair};
use cvur::ur_bounds::{cg_entropic_ur, heisenberg_ur, shannon_ur, CgPair};

fn check(name: &str, detail: impl std::fmt::Display) {
    println!("validate: {name:<38} ok ({detail})");
}

pub fn run(seed: u64) -> Result<()> {
    let hbar = 1.0;

    // vacuum saturation
    let vac = GaussianState::vacuum(1, hbar)?;
    let pair = QuadraturePair::canonical(0, 1)?;
    let (_, vu) = vac.marginal_moments(&pair.du)?;
    let (_, vv) = vac.marginal_moments(&pair.dv)?;
    let rep = heisenberg_ur(vu, vv, pair.gamma(), hbar);
    ensure!(rep.margin.abs() < 1e-10, "vacuum Heisenberg margin");
    let h = differential_entropy(&Marginal::gaussian(0.0, hbar / 2.0)?, RenyiOrder::SHANNON)?;
    let srep = shannon_ur(h, h, 1.0, hbar);
    ensure!(srep.margin.abs() < 1e-9, "vacuum Shannon margin");
    check("vacuum saturation", format!("margins {:.1e}", rep.margin));

    // decomposition identity
    let mut rng = StdRng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let m = Marginal::gaussian(rng.random::<f64>() - 0.5, 0.3 + rng.random::<f64>())?;
        let delta = m.variance().sqrt() * (0.3 + rng.random::<f64>());
        let dist = bin_probabilities(&m, &StandardCg::centered_on(&m, delta)?);
        let hf = HistogramFunction::rectangular(delta)?;
        let (l, r) = decompose_q_entropy(&dist, &hf, RenyiOrder::new(0.7)?)?;
        ensure!((l - r).abs() < 1e-8, "decomposition identity");
        worst = worst.max((l - r).abs());
    }
    check("entropy decomposition identity", format!("worst {worst:.1e}"));

    // Jensen gap nonnegative
    let mut min_gap = f64::MAX;
    for _ in 0..10 {
        let m = Marginal::gaussian(rng.random::<f64>(), 0.2 + rng.random::<f64>())?;
        let delta = m.variance().sqrt() * (0.1 + 2.0 * rng.random::<f64>());
        let gap = jensen_gap(&m, &StandardCg::centered_on(&m, delta)?)?;
        ensure!(gap >= -1e-9, "jensen gap");
        min_gap = min_gap.min(gap);
    }
    check("jensen inequality", format!("min gap {min_gap:.1e}"));

    // coarse-grained entropic UR sweep
    let mut min_margin = f64::MAX;
    for _ in 0..200 {
        let st = random_bona_fide_gaussian(&mut rng, 1, hbar)?;
        let p = random_cco_pair(&mut rng, 1)?;
        let gamma_cap = 10f64.powf(-2.0 + 4.0 * rng.random::<f64>());
        let d = (gamma_cap * hbar * p.gamma().abs()).sqrt();
        let mu = st.marginal(&p.du)?;
        let mv = st.marginal(&p.dv)?;
        let cgp = CgPair::new(d, d, p, hbar)?;
        let du = bin_probabilities(&mu, &StandardCg::centered_on(&mu, d)?);
        let dv = bin_probabilities(&mv, &StandardCg::centered_on(&mv, d)?);
        let hf = HistogramFunction::rectangular(d)?;
        let reps = cg_entropic_ur(&du, &dv, &cgp, &ConjugatePair::from_alpha(1.0)?, &hf, &hf)?;
        ensure!(reps.cgrur.margin >= -1e-9, "cg entropic UR");
        min_margin = min_margin.min(reps.cgrur.margin);
    }
    check("cg entropic UR (200 draws)", format!("min margin {min_margin:.1e}"));

    // special functions
    let ev = ProlateEvaluator::global();
    let x = ev.eps1_crossover()?;
    ensure!((x - 1.79).abs() < 0.05, "eps1 crossover");
    ensure!((k_of_t(1e-6)? - 1.0).abs() < 1e-3, "K(0) limit");
    check("special functions", format!("crossover {x:.4}, K(1e-6) ok"));

    // witness soundness
    let gp = GlobalOperatorPair::canonical();
    for _ in 0..50 {
        let st = random_separable_two_mode(&mut rng, hbar)?;
        let d1 = hbar.sqrt() * (0.2 + 5.0 * rng.random::<f64>());
        let v = witness_variance(&st, &gp, MixedSign::MinusPlus, Some((d1, d1)))?;
        let e = witness_entropy(&st, &gp, MixedSign::MinusPlus, d1, d1)?;
        ensure!(!v.is_violated() && !e.is_violated(), "separable false flag");
    }
    check("witness soundness (50 separable)", "0 false flags");

    println!("validate: all checks passed");
    Ok(())
}
