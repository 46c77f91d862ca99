//! `tabdev` command-line front end.
//!
//! Subcommands: `test-one`, `test-two`, `simulate`, `power-curve`, `dist`,
//! `sde-check`. Every command prints a result JSON document on stdout
//! (pretty by default, compact with `--json`) and, when `--out DIR` is given,
//! writes CSV artifacts plus a `manifest.json` sidecar recording the command,
//! configuration hash, seed and output files. Exit codes: 0 success, 1
//! runtime or statistical-degeneracy error, 2 usage error.
//!
//! `TABDEV_THREADS` caps the worker count for simulation commands (0 or
//! unset = automatic).

use clap::{Args, Parser, Subcommand};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

use tabdev::bandit::{bandit_tail_prob, BanditParams};
use tabdev::csv::{parse_csv, parse_vector_csv};
use tabdev::error::{Error, Result};
use tabdev::ks::ks_statistic;
use tabdev::manifest::RunManifest;
use tabdev::matrix::{Matrix, SampleMatrix};
use tabdev::power::{power_curve, PopulationSpec, SampleSizes};
use tabdev::sde::{endpoint_law_cdf, simulate_endpoints};
use tabdev::sim::{
    empirical_rejection_rate, GridResult, MuSpec, NoiseKind, SigmaSpec, SimulationConfig, TestMode,
};
use tabdev::tab::{one_sample_deviation_test, OneSampleConfig, TabTrajectory};
use tabdev::two_sample::{two_sample_deviation_test, TwoSampleConfig};

#[derive(Parser)]
#[command(
    name = "tabdev",
    version,
    about = "High-dimensional mean deviation tests via a two-armed bandit statistic"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// Seed for anything randomized; auto-generated (and recorded) if omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for CSV artifacts and the manifest sidecar.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Compact single-line JSON on stdout instead of pretty-printed.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// One-sample deviation test of ||mu - mu0|| > d0 on a CSV dataset.
    TestOne {
        /// Input CSV, rows = observations.
        #[arg(long)]
        data: PathBuf,
        /// Skip the first line of the CSV.
        #[arg(long)]
        has_header: bool,
        /// Deviation radius d0 > 0.
        #[arg(long)]
        d0: f64,
        /// Two-sided significance level.
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Head fraction T1/T.
        #[arg(long, default_value_t = 0.5)]
        split_fraction: f64,
        /// Reference mean: "zeros" or a path via --mu0-file.
        #[arg(long, default_value = "zeros")]
        mu0: String,
        /// Single-row CSV holding the reference mean.
        #[arg(long)]
        mu0_file: Option<PathBuf>,
        /// Shuffle rows (seeded) before splitting; for time-ordered data.
        #[arg(long, requires = "seed")]
        shuffle: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Two-sample deviation test of ||mu1 - mu2|| > d0 on two CSV datasets.
    TestTwo {
        /// Group-1 CSV.
        #[arg(long)]
        data_x: PathBuf,
        /// Group-2 CSV.
        #[arg(long)]
        data_z: PathBuf,
        /// Skip the first line of both CSVs.
        #[arg(long)]
        has_header: bool,
        /// Deviation radius d0 > 0.
        #[arg(long)]
        d0: f64,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// TAB-phase length N0 (default: a third of the smaller group).
        #[arg(long)]
        n0: Option<usize>,
        /// Shuffle each group (seeded) before splitting and pairing.
        #[arg(long, requires = "seed")]
        shuffle: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Monte Carlo grid of empirical rejection rates.
    Simulate(SimulateArgs),
    /// Predicted rejection probabilities over a d0 grid.
    PowerCurve {
        /// Dimension n.
        #[arg(long)]
        n: usize,
        /// One-sample head size T1.
        #[arg(long)]
        t1: Option<usize>,
        /// One-sample TAB length T2.
        #[arg(long)]
        t2: Option<usize>,
        /// Two-sample head size m1.
        #[arg(long)]
        m1: Option<usize>,
        /// Two-sample head size m2.
        #[arg(long)]
        m2: Option<usize>,
        /// Two-sample TAB length N0.
        #[arg(long)]
        n0: Option<usize>,
        /// Grid "lo:hi:step" or comma-separated values.
        #[arg(long)]
        d0_grid: String,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// ||mu||: mean is mu_norm * n^{-1/2} * (1,..,1).
        #[arg(long, default_value_t = 1.0)]
        mu_norm: f64,
        /// Covariance family: "ar1" or "identity".
        #[arg(long, default_value = "ar1")]
        sigma: String,
        #[arg(long, default_value_t = 0.5)]
        rho: f64,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Bandit distribution B(kappa): pdf/cdf/quantile/tail/samples/tables.
    #[command(allow_negative_numbers = true)]
    Dist {
        #[arg(long)]
        kappa: f64,
        /// Evaluate the density at x.
        #[arg(long, group = "op")]
        pdf: Option<f64>,
        /// Evaluate the CDF at x.
        #[arg(long, group = "op")]
        cdf: Option<f64>,
        /// Evaluate the quantile at q in (0,1).
        #[arg(long, group = "op")]
        quantile: Option<f64>,
        /// Tail probability P(|B(-kappa)| > z).
        #[arg(long, group = "op")]
        tail: Option<f64>,
        /// Draw this many inverse-CDF samples (seeded).
        #[arg(long, group = "op")]
        sample: Option<usize>,
        /// Tabulate (x, pdf, cdf) over "lo:hi:step".
        #[arg(long, group = "op", allow_hyphen_values = true)]
        table: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Euler-Maruyama endpoint law vs the closed-form density (KS distance).
    SdeCheck {
        /// Drift magnitude of dY = alpha*sign(Y) ds + beta dB.
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        x0: f64,
        #[arg(long, default_value_t = 2000)]
        steps: usize,
        #[arg(long, default_value_t = 20000)]
        paths: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Args, Debug, Clone)]
struct SimulateArgs {
    /// Named design; "table1" is the AR(1), ||mu||=1, halves-split grid.
    #[arg(long)]
    preset: Option<String>,
    /// Cells "(n,t),(n,t),..."; overrides the preset cell list.
    #[arg(long)]
    cells: Option<String>,
    /// Custom single cell: dimension n (with --t).
    #[arg(long)]
    n: Option<usize>,
    /// Custom single cell: sample size T (with --n).
    #[arg(long)]
    t: Option<usize>,
    /// Grid "lo:hi:step" or comma-separated values.
    #[arg(long)]
    d0_grid: Option<String>,
    /// Replications per cell.
    #[arg(long)]
    reps: Option<usize>,
    /// Noise law: gaussian | rademacher.
    #[arg(long)]
    noise: Option<String>,
    /// Test to run: one-sample | two-sample.
    #[arg(long)]
    mode: Option<String>,
    /// Two-sample group size M1.
    #[arg(long)]
    m1: Option<usize>,
    /// Two-sample group size M2.
    #[arg(long)]
    m2: Option<usize>,
    /// Two-sample TAB-phase length N0.
    #[arg(long)]
    n0: Option<usize>,
    /// AR(1) correlation.
    #[arg(long)]
    rho: Option<f64>,
    /// Covariance family: ar1 | identity.
    #[arg(long)]
    sigma: Option<String>,
    /// Mean family: unit (||mu||=1) | zero.
    #[arg(long)]
    mu: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    split_fraction: Option<f64>,
    /// Include the full 8-row grid (slow) instead of the desk-scale cells.
    #[arg(long)]
    full_grid: bool,
    /// TOML file with the same keys as the flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
}

/// Keys accepted in `--config` TOML files (flat key = value pairs).
#[derive(Debug, Default, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct SimFileConfig {
    preset: Option<String>,
    cells: Option<String>,
    n: Option<usize>,
    t: Option<usize>,
    d0_grid: Option<String>,
    reps: Option<usize>,
    seed: Option<u64>,
    noise: Option<String>,
    mode: Option<String>,
    m1: Option<usize>,
    m2: Option<usize>,
    n0: Option<usize>,
    rho: Option<f64>,
    sigma: Option<String>,
    mu: Option<String>,
    alpha: Option<f64>,
    split_fraction: Option<f64>,
    full_grid: Option<bool>,
}

fn main() {
    configure_threads();
    let cli = Cli::parse();
    if let Err(e) = run(cli.command) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

fn configure_threads() {
    if let Ok(raw) = std::env::var("TABDEV_THREADS") {
        if let Ok(k) = raw.trim().parse::<usize>() {
            if k > 0 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(k)
                    .build_global();
            }
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::TestOne {
            data,
            has_header,
            d0,
            alpha,
            split_fraction,
            mu0,
            mu0_file,
            shuffle,
            common,
        } => {
            let mut matrix = parse_csv(&data, has_header)?;
            let mu0_vec = match (mu0.as_str(), &mu0_file) {
                (_, Some(path)) => Some(parse_vector_csv(path)?),
                ("zeros", None) => None,
                (other, None) => {
                    return Err(Error::Config(format!(
                        "unknown --mu0 value {other:?}; use \"zeros\" or --mu0-file"
                    )))
                }
            };
            if shuffle {
                matrix = shuffled(&matrix, common.seed.unwrap());
            }
            let cfg = OneSampleConfig {
                d0,
                mu0: mu0_vec,
                alpha,
                split_fraction,
            };
            let (result, trajectory) = one_sample_deviation_test(&matrix, &cfg)?;
            let t2 = trajectory.targets.len();
            let t1 = matrix.rows() - t2;
            let output = json!({
                "schema": 1,
                "command": "test-one",
                "statistic": result.statistic,
                "p_value": result.p_value,
                "reject": result.reject_h0,
                "critical_value": result.critical_value,
                "d0": d0,
                "alpha": alpha,
                "n": matrix.cols(),
                "t1": t1,
                "t2": t2,
                "tau_hat": trajectory.nuisance.tau_hat,
                "sigma2_hat": trajectory.nuisance.sigma2_hat,
                "shuffled": shuffle,
                "seed": common.seed,
            });
            emit(&output, &common)?;
            write_artifacts(
                &common,
                &output,
                vec![("trajectory.csv".to_string(), trajectory_csv(&trajectory))],
            )
        }
        Command::TestTwo {
            data_x,
            data_z,
            has_header,
            d0,
            alpha,
            n0,
            shuffle,
            common,
        } => {
            let mut x = parse_csv(&data_x, has_header)?;
            let mut z = parse_csv(&data_z, has_header)?;
            if shuffle {
                let seed = common.seed.unwrap();
                x = shuffled(&x, seed);
                z = shuffled(&z, seed.wrapping_add(1));
            }
            let n0 = n0.unwrap_or_else(|| TwoSampleConfig::default_n0(x.rows(), z.rows()));
            let cfg = TwoSampleConfig::new(d0, alpha, n0);
            let (result, trajectory) = two_sample_deviation_test(&x, &z, &cfg)?;
            let output = json!({
                "schema": 1,
                "command": "test-two",
                "statistic": result.statistic,
                "p_value": result.p_value,
                "reject": result.reject_h0,
                "critical_value": result.critical_value,
                "d0": d0,
                "alpha": alpha,
                "n": x.cols(),
                "m1": x.rows() - n0,
                "m2": z.rows() - n0,
                "n0": n0,
                "tau_hat": trajectory.nuisance.tau_hat,
                "sigma2_hat": trajectory.nuisance.sigma2_hat,
                "shuffled": shuffle,
                "seed": common.seed,
            });
            emit(&output, &common)?;
            write_artifacts(
                &common,
                &output,
                vec![("trajectory.csv".to_string(), trajectory_csv(&trajectory))],
            )
        }
        Command::Simulate(args) => cmd_simulate(args),
        Command::PowerCurve {
            n,
            t1,
            t2,
            m1,
            m2,
            n0,
            d0_grid,
            alpha,
            mu_norm,
            sigma,
            rho,
            common,
        } => {
            let grid = parse_grid(&d0_grid)?;
            let mu = if mu_norm == 0.0 {
                vec![0.0; n]
            } else {
                vec![mu_norm / (n as f64).sqrt(); n]
            };
            let sigma = build_sigma(&sigma, rho, n)?;
            let (pop, sizes) = match (t1, t2, m1, m2, n0) {
                (Some(t1), Some(t2), None, None, None) => (
                    PopulationSpec::new(mu, sigma)?,
                    SampleSizes::OneSample { t1, t2 },
                ),
                (None, None, Some(m1), Some(m2), Some(n0)) => (
                    PopulationSpec::two_sample(mu, sigma.clone(), vec![0.0; n], sigma)?,
                    SampleSizes::TwoSample { m1, m2, n0 },
                ),
                _ => {
                    return Err(Error::Config(
                        "give either --t1/--t2 (one-sample) or --m1/--m2/--n0 (two-sample)"
                            .to_string(),
                    ))
                }
            };
            let rows = power_curve(&pop, &grid, sizes, alpha)?;
            let output = json!({
                "schema": 1,
                "command": "power-curve",
                "alpha": alpha,
                "n": n,
                "rows": rows,
            });
            emit(&output, &common)?;
            let mut csv = String::from("d0,kappa,predicted_power\n");
            for r in &rows {
                csv.push_str(&format!("{},{},{}\n", r.d0, r.kappa, r.predicted_power));
            }
            write_artifacts(&common, &output, vec![("power_curve.csv".to_string(), csv)])
        }
        Command::Dist {
            kappa,
            pdf,
            cdf,
            quantile,
            tail,
            sample,
            table,
            common,
        } => cmd_dist(kappa, pdf, cdf, quantile, tail, sample, table, common),
        Command::SdeCheck {
            alpha,
            beta,
            x0,
            steps,
            paths,
            common,
        } => {
            let seed = resolve_seed(common.seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let endpoints = simulate_endpoints(alpha, beta, x0, steps, paths, &mut rng)?;
            let law = endpoint_law_cdf(alpha, beta, x0, 40_001)?;
            let ks = ks_statistic(&endpoints, |x| law.eval(x));
            let output = json!({
                "schema": 1,
                "command": "sde-check",
                "alpha": alpha,
                "beta": beta,
                "x0": x0,
                "steps": steps,
                "paths": paths,
                "seed": seed,
                "ks_distance": ks,
                "law_mass": law.total_mass(),
            });
            emit(&output, &common)?;
            let mut csv = String::from("endpoint\n");
            for y in &endpoints {
                csv.push_str(&format!("{y}\n"));
            }
            write_artifacts(&common, &output, vec![("endpoints.csv".to_string(), csv)])
        }
    }
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let file: SimFileConfig = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            toml::from_str(&text)
                .map_err(|e| Error::Config(format!("bad config file {}: {e}", path.display())))?
        }
        None => SimFileConfig::default(),
    };
    // Flags take precedence over config-file values.
    let preset = args.preset.or(file.preset);
    let cells_raw = args.cells.or(file.cells);
    let n = args.n.or(file.n);
    let t = args.t.or(file.t);
    let d0_grid_raw = args.d0_grid.or(file.d0_grid);
    let reps = args.reps.or(file.reps).unwrap_or(200);
    let seed = resolve_seed(args.common.seed.or(file.seed));
    let noise_raw = args
        .noise
        .or(file.noise)
        .unwrap_or_else(|| "gaussian".to_string());
    let mode_raw = args
        .mode
        .or(file.mode)
        .unwrap_or_else(|| "one-sample".to_string());
    let rho = args.rho.or(file.rho).unwrap_or(0.5);
    let sigma_raw = args
        .sigma
        .or(file.sigma)
        .unwrap_or_else(|| "ar1".to_string());
    let mu_raw = args.mu.or(file.mu).unwrap_or_else(|| "unit".to_string());
    let alpha = args.alpha.or(file.alpha).unwrap_or(0.05);
    let split_fraction = args.split_fraction.or(file.split_fraction).unwrap_or(0.5);
    let full_grid = args.full_grid || file.full_grid.unwrap_or(false);
    let (m1, m2, n0) = (
        args.m1.or(file.m1),
        args.m2.or(file.m2),
        args.n0.or(file.n0),
    );

    let cells: Vec<(usize, usize)> = if let Some(raw) = &cells_raw {
        parse_cells(raw)?
    } else if let (Some(n), Some(t)) = (n, t) {
        vec![(n, t)]
    } else {
        match preset.as_deref() {
            Some("table1") | None => {
                let mut cells = vec![(100, 200), (200, 400)];
                if full_grid {
                    cells.extend([
                        (400, 800),
                        (600, 1200),
                        (100, 150),
                        (200, 300),
                        (400, 600),
                        (600, 900),
                    ]);
                }
                cells
            }
            Some(other) => {
                return Err(Error::Config(format!("unknown preset {other:?}")));
            }
        }
    };

    let d0_values = match &d0_grid_raw {
        Some(raw) => parse_grid(raw)?,
        None => (0..11).map(|i| 0.5 + 0.1 * i as f64).collect(),
    };

    let noise = match noise_raw.as_str() {
        "gaussian" => NoiseKind::Gaussian,
        "rademacher" => NoiseKind::Rademacher,
        other => return Err(Error::Config(format!("unknown noise {other:?}"))),
    };
    let mu_spec = match mu_raw.as_str() {
        "unit" => MuSpec::UniformUnitNorm,
        "zero" => MuSpec::Zero,
        other => return Err(Error::Config(format!("unknown mu spec {other:?}"))),
    };
    let sigma_spec = match sigma_raw.as_str() {
        "ar1" => SigmaSpec::Ar1 { rho },
        "identity" => SigmaSpec::Identity,
        other => return Err(Error::Config(format!("unknown sigma spec {other:?}"))),
    };
    let mode = match mode_raw.as_str() {
        "one-sample" | "one_sample" => TestMode::OneSample,
        "two-sample" | "two_sample" => {
            let (m1, m2) = match (m1, m2) {
                (Some(a), Some(b)) => (a, b),
                _ => {
                    return Err(Error::Config(
                        "two-sample mode needs --m1 and --m2".to_string(),
                    ))
                }
            };
            let n0 = n0.unwrap_or_else(|| TwoSampleConfig::default_n0(m1, m2));
            TestMode::TwoSample { n0, m1, m2 }
        }
        other => return Err(Error::Config(format!("unknown mode {other:?}"))),
    };

    let mut combined = GridResult { rows: Vec::new() };
    for &(n, t) in &cells {
        let cfg = SimulationConfig {
            n,
            t,
            d0_values: d0_values.clone(),
            replications: reps,
            seed,
            mu_spec: mu_spec.clone(),
            sigma_spec: sigma_spec.clone(),
            noise,
            mode,
            split_fraction,
        };
        combined.extend(empirical_rejection_rate(&cfg, alpha)?);
    }

    let output = json!({
        "schema": 1,
        "command": "simulate",
        "seed": seed,
        "alpha": alpha,
        "replications": reps,
        "noise": noise_raw,
        "mode": mode_raw,
        "cells": cells.iter().map(|(n, t)| json!([n, t])).collect::<Vec<_>>(),
        "d0_values": d0_values,
        "rows": combined.rows,
    });
    emit(&output, &args.common)?;
    write_artifacts(
        &args.common,
        &output,
        vec![("results.csv".to_string(), combined.to_csv())],
    )
}

#[allow(clippy::too_many_arguments)]
fn cmd_dist(
    kappa: f64,
    pdf: Option<f64>,
    cdf: Option<f64>,
    quantile: Option<f64>,
    tail: Option<f64>,
    sample: Option<usize>,
    table: Option<String>,
    common: CommonArgs,
) -> Result<()> {
    let params = BanditParams::new(kappa)?;
    let base = |op: &str, arg: Value, value: Value| {
        json!({
            "schema": 1,
            "command": "dist",
            "kappa": kappa,
            "op": op,
            "arg": arg,
            "value": value,
        })
    };
    if let Some(x) = pdf {
        let output = base("pdf", json!(x), json!(params.pdf(x)?));
        emit(&output, &common)?;
        return write_artifacts(&common, &output, vec![]);
    }
    if let Some(x) = cdf {
        let output = base("cdf", json!(x), json!(params.cdf(x)?));
        emit(&output, &common)?;
        return write_artifacts(&common, &output, vec![]);
    }
    if let Some(q) = quantile {
        let output = base("quantile", json!(q), json!(params.quantile(q)?));
        emit(&output, &common)?;
        return write_artifacts(&common, &output, vec![]);
    }
    if let Some(z) = tail {
        let output = base("tail", json!(z), json!(bandit_tail_prob(kappa, z)?));
        emit(&output, &common)?;
        return write_artifacts(&common, &output, vec![]);
    }
    if let Some(count) = sample {
        let seed = resolve_seed(common.seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs = params.sample(&mut rng, count)?;
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let mut output = base("sample", json!(count), json!(mean));
        output["seed"] = json!(seed);
        output["mean"] = json!(mean);
        if common.out.is_none() {
            output["samples"] = json!(xs);
        }
        emit(&output, &common)?;
        let mut csv = String::from("sample\n");
        for x in &xs {
            csv.push_str(&format!("{x}\n"));
        }
        return write_artifacts(&common, &output, vec![("samples.csv".to_string(), csv)]);
    }
    if let Some(spec) = table {
        let xs = parse_grid_allow_negative(&spec)?;
        let rows: Result<Vec<Value>> = xs
            .iter()
            .map(|&x| Ok(json!({"x": x, "pdf": params.pdf(x)?, "cdf": params.cdf(x)?})))
            .collect();
        let rows = rows?;
        let output = json!({
            "schema": 1,
            "command": "dist",
            "kappa": kappa,
            "op": "table",
            "rows": rows,
        });
        emit(&output, &common)?;
        let mut csv = String::from("x,pdf,cdf\n");
        for &x in &xs {
            csv.push_str(&format!("{},{},{}\n", x, params.pdf(x)?, params.cdf(x)?));
        }
        return write_artifacts(&common, &output, vec![("dist_table.csv".to_string(), csv)]);
    }
    Err(Error::Config(
        "dist needs one of --pdf, --cdf, --quantile, --tail, --sample, --table".to_string(),
    ))
}

fn build_sigma(kind: &str, rho: f64, n: usize) -> Result<Matrix> {
    match kind {
        "ar1" => tabdev::sim::ar1_covariance(n, rho),
        "identity" => Ok(Matrix::identity(n)),
        other => Err(Error::Config(format!("unknown sigma family {other:?}"))),
    }
}

fn shuffled(m: &SampleMatrix, seed: u64) -> SampleMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..m.rows()).collect();
    perm.shuffle(&mut rng);
    m.permute_rows(&perm)
        .expect("permutation is valid by construction")
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(rand::random)
}

/// "lo:hi:step" (inclusive, positive step) or "v1,v2,...".
fn parse_grid(raw: &str) -> Result<Vec<f64>> {
    let values = parse_grid_allow_negative(raw)?;
    for &v in &values {
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::Config(format!("grid values must be > 0, got {v}")));
        }
    }
    Ok(values)
}

fn parse_grid_allow_negative(raw: &str) -> Result<Vec<f64>> {
    let bad = |msg: &str| Error::Config(format!("cannot parse grid {raw:?}: {msg}"));
    if raw.contains(':') {
        let parts: Vec<&str> = raw.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected lo:hi:step"));
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad("bad lo"))?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad("bad hi"))?;
        let step: f64 = parts[2].trim().parse().map_err(|_| bad("bad step"))?;
        if !step.is_finite() || step <= 0.0 || hi < lo {
            return Err(bad("need hi >= lo and step > 0"));
        }
        let count = ((hi - lo) / step).round() as usize + 1;
        return Ok((0..count).map(|i| lo + step * i as f64).collect());
    }
    raw.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad("bad value")))
        .collect()
}

/// "(100,200),(200,400)" -> [(100, 200), (200, 400)].
fn parse_cells(raw: &str) -> Result<Vec<(usize, usize)>> {
    let bad = || {
        Error::Config(format!(
            "cannot parse cells {raw:?}; expected \"(n,t),(n,t)\""
        ))
    };
    let mut cells = Vec::new();
    let mut rest = raw.trim();
    while !rest.is_empty() {
        rest = rest.trim_start_matches(|c: char| c == ',' || c.is_whitespace());
        if rest.is_empty() {
            break;
        }
        if !rest.starts_with('(') {
            return Err(bad());
        }
        let close = rest.find(')').ok_or_else(bad)?;
        let inner = &rest[1..close];
        let mut nums = inner.split(',');
        let n: usize = nums
            .next()
            .ok_or_else(bad)?
            .trim()
            .parse()
            .map_err(|_| bad())?;
        let t: usize = nums
            .next()
            .ok_or_else(bad)?
            .trim()
            .parse()
            .map_err(|_| bad())?;
        if nums.next().is_some() {
            return Err(bad());
        }
        cells.push((n, t));
        rest = &rest[close + 1..];
    }
    if cells.is_empty() {
        return Err(bad());
    }
    Ok(cells)
}

fn trajectory_csv(traj: &TabTrajectory) -> String {
    let mut out = String::from("t,theta,target,partial\n");
    for (i, ((&theta, &target), &partial)) in traj
        .thetas
        .iter()
        .zip(&traj.targets)
        .zip(&traj.partials)
        .enumerate()
    {
        out.push_str(&format!("{},{},{},{}\n", i + 1, theta, target, partial));
    }
    out
}

fn emit(output: &Value, common: &CommonArgs) -> Result<()> {
    let text = if common.json {
        output.to_string()
    } else {
        serde_json::to_string_pretty(output).expect("JSON serialization cannot fail")
    };
    println!("{text}");
    Ok(())
}

/// Writes the artifacts plus a manifest sidecar into `--out` (no-op without
/// `--out`).
fn write_artifacts(
    common: &CommonArgs,
    config_echo: &Value,
    files: Vec<(String, String)>,
) -> Result<()> {
    let Some(dir) = &common.out else {
        return Ok(());
    };
    std::fs::create_dir_all(dir)?;
    let mut outputs = Vec::new();
    for (name, content) in &files {
        std::fs::write(dir.join(name), content)?;
        outputs.push(name.clone());
    }
    let seed = config_echo.get("seed").and_then(Value::as_u64);
    let manifest = RunManifest::new(std::env::args().collect(), config_echo, seed, outputs);
    let path: &Path = dir.as_ref();
    std::fs::write(
        path.join("manifest.json"),
        serde_json::to_string_pretty(&manifest).expect("JSON serialization cannot fail"),
    )?;
    Ok(())
}
