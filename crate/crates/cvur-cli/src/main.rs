//! Batch front-end: scenario configs in, JSONL report streams and CSV plot
//! data out. UR violations are data, not errors; the exit code is nonzero
//! only for internal failures (bad config, numeric breakdown, I/O).

mod config;
mod scenario;
mod validate;

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use config::{load_state, LoadedState, ScenarioConfig};
use cvur::coarse_grain::PeriodicCg;
use cvur::entanglement::{
    witness_entropy, witness_variance, witness_variance_naive_binned, GlobalOperatorPair,
    MixedSign,
};
use cvur::mub::{mub_condition, unbiasedness_test, MubStatus};
use cvur::special_fn::ProlateEvaluator;

#[derive(Parser)]
#[command(
    name = "cvur",
    about = "Coarse-grained uncertainty relations for continuous-variable quantum states",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep bin widths logarithmically and emit UR reports and CSV curves.
    UrScan {
        /// Scenario config (JSON) with a `sweep` section.
        #[arg(long)]
        config: PathBuf,
        /// Output directory for the configured artifacts.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Certify mutual unbiasedness of a periodic coarse-graining pair.
    MubCheck {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        tu: f64,
        #[arg(long)]
        tv: f64,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
        /// Also run the numeric probe test and print the deviation.
        #[arg(long)]
        numeric: bool,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Evaluate a PPT entanglement witness on a two-mode state.
    Entangle {
        /// Path to a state spec JSON (gaussian or two_mode_squeezed).
        #[arg(long)]
        state: PathBuf,
        /// variance | entropy | naive-variance
        #[arg(long)]
        criterion: String,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        small_delta: f64,
        /// Mixed-sign combination measured on the state.
        #[arg(long, default_value = "minus-plus")]
        mixed: String,
        /// Write the report JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate R00(x,1) and its envelope combinations as CSV.
    R00Table {
        #[arg(long)]
        min: f64,
        #[arg(long)]
        max: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a bundled scenario or a custom config end to end.
    Scenario {
        /// vacuum_saturation | false_positive | bound_vs_gamma
        #[arg(long, conflicts_with = "config")]
        name: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the property-suite smoke set; nonzero exit on any failure.
    Validate {
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

fn main() {
    if let Err(err) = run() {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::UrScan { config, out, seed } => {
            let mut cfg = ScenarioConfig::from_path(&config)?;
            if cfg.sweep.is_none() {
                bail!("ur-scan needs a `sweep` section in the config");
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let base = config.parent().unwrap_or(std::path::Path::new("."));
            let arts = scenario::run_scenario(&cfg, base)?;
            scenario::write_artifacts(&arts, &cfg.outputs, &out)?;
            println!(
                "ur-scan: {} reports written to {}",
                arts.reports.len(),
                out.display()
            );
            Ok(())
        }
        Command::MubCheck {
            d,
            tu,
            tv,
            hbar,
            numeric,
            trials,
            seed,
        } => {
            let verdict = mub_condition(tu, tv, d, hbar)?;
            let label = match verdict.status {
                MubStatus::Unbiased { m } => format!("unbiased (m = {m})"),
                MubStatus::Commuting { m } => format!("commuting (m = {m} ≡ 0 mod d)"),
                MubStatus::Biased => "biased".to_string(),
            };
            println!(
                "mub-check: d = {d}, Tu·Tv/(2πħ) = {:.12}, verdict: {label}",
                verdict.product
            );
            if numeric {
                let pcg_u = PeriodicCg::new(tu / d as f64, tu, 0.0)?;
                let pcg_v = PeriodicCg::new(tv / d as f64, tv, 0.0)?;
                let dev = unbiasedness_test(&pcg_u, &pcg_v, trials, hbar, seed)?;
                println!("numeric probe deviation max|p - 1/d| = {dev:.6e}");
            }
            Ok(())
        }
        Command::Entangle {
            state,
            criterion,
            delta,
            small_delta,
            mixed,
            out,
        } => {
            let text = std::fs::read_to_string(&state)
                .with_context(|| format!("reading state spec {}", state.display()))?;
            let spec: config::StateSpec = serde_json::from_str(&text)?;
            let base = state.parent().unwrap_or(std::path::Path::new("."));
            let loaded = load_state(&spec, base)?;
            let LoadedState::Gaussian(g) = loaded else {
                bail!("entangle needs a two-mode Gaussian state spec");
            };
            let mixed = match mixed.as_str() {
                "plus-minus" => MixedSign::PlusMinus,
                "minus-plus" => MixedSign::MinusPlus,
                other => bail!("unknown mixed-sign combination `{other}`"),
            };
            let gp = GlobalOperatorPair::canonical();
            let report = match criterion.as_str() {
                "variance" => witness_variance(&g, &gp, mixed, Some((delta, small_delta)))?,
                "entropy" => witness_entropy(&g, &gp, mixed, delta, small_delta)?,
                "naive-variance" => {
                    witness_variance_naive_binned(&g, &gp, mixed, delta, small_delta)?
                }
                other => bail!("unknown criterion `{other}`"),
            };
            let line = report.to_json_line();
            match out {
                Some(path) => std::fs::write(path, format!("{line}\n"))?,
                None => println!("{line}"),
            }
            Ok(())
        }
        Command::R00Table {
            min,
            max,
            steps,
            out,
        } => {
            #[allow(clippy::neg_cmp_op_on_partial_ord)]
            if !(min >= 0.0) || max <= min || steps < 2 {
                bail!("need 0 <= min < max and steps >= 2");
            }
            let ev = ProlateEvaluator::global();
            let mut csv = String::from("x,r00,half_r00_sq,asymptotic_ratio\n");
            for i in 0..steps {
                let x = min + (max - min) * i as f64 / (steps - 1) as f64;
                let r = ev.r00(x)?;
                use std::fmt::Write as _;
                writeln!(
                    csv,
                    "{x},{r},{},{}",
                    0.5 * r * r,
                    2.0 * x / std::f64::consts::PI * r * r
                )?;
            }
            match out {
                Some(path) => std::fs::write(path, csv)?,
                None => print!("{csv}"),
            }
            Ok(())
        }
        Command::Scenario {
            name,
            config,
            out,
            seed,
        } => {
            match (name, config) {
                (Some(name), None) => match name.as_str() {
                    "false_positive" => {
                        let reports = scenario::false_positive_scenario()?;
                        let arts = scenario::ScenarioArtifacts {
                            reports,
                            scan_csv: None,
                        };
                        let outputs = config::OutputSpec {
                            reports: Some("reports.jsonl".into()),
                            scan: None,
                        };
                        scenario::write_artifacts(&arts, &outputs, &out)?;
                        for r in &arts.reports {
                            println!("{}", r.to_json_line());
                        }
                        Ok(())
                    }
                    "bound_vs_gamma" => {
                        let csv = scenario::bound_vs_gamma_csv(1e-3, 1e3, 241)?;
                        std::fs::create_dir_all(&out)?;
                        std::fs::write(out.join("bound_vs_gamma.csv"), &csv)?;
                        println!(
                            "bound_vs_gamma: 241 points written to {}",
                            out.join("bound_vs_gamma.csv").display()
                        );
                        Ok(())
                    }
                    other => {
                        let mut cfg = scenario::bundled_config(other)?;
                        if let Some(s) = seed {
                            cfg.seed = s;
                        }
                        let arts = scenario::run_scenario(&cfg, std::path::Path::new("."))?;
                        scenario::write_artifacts(&arts, &cfg.outputs, &out)?;
                        for r in &arts.reports {
                            println!("{}", r.to_json_line());
                        }
                        Ok(())
                    }
                },
                (None, Some(path)) => {
                    let mut cfg = ScenarioConfig::from_path(&path)?;
                    if let Some(s) = seed {
                        cfg.seed = s;
                    }
                    let base = path.parent().unwrap_or(std::path::Path::new("."));
                    let arts = scenario::run_scenario(&cfg, base)?;
                    scenario::write_artifacts(&arts, &cfg.outputs, &out)?;
                    println!(
                        "scenario: {} reports written to {}",
                        arts.reports.len(),
                        out.display()
                    );
                    Ok(())
                }
                _ => bail!("provide exactly one of --name or --config"),
            }
        }
        Command::Validate { seed } => validate::run(seed),
    }
}
