//! `itemnet fit`: run the spike-and-slab sampler on a response CSV.
//!
//! Writes to the output directory:
//!
//! * `manifest.json` — command, resolved sampler configuration, seed, and
//!   tool version; enough to reproduce the run exactly.
//! * `chain.jsonl` — every stored state, checkpointed during the run.
//! * `estimate.json` — posterior means, inclusion probabilities, and the
//!   signed adjacency.
//! * `edges.csv` — one row per item pair with weight, inclusion
//!   probability, and sign.
//! * `mcse.json` — convergence report: batch-means standard errors and
//!   acceptance rates.

use std::path::PathBuf;
use std::time::Instant;

use anyhow::Result;
use itemnet::inner::AuxChainConfig;
use itemnet::model::num_params;
use itemnet::sampler::{
    chain_coordinate_mcse, posterior_summary, run_chain, run_chain_exact, write_chain_file,
};
use itemnet::Config;
use serde::Serialize;

use crate::commands::{
    coordinate_label, ensure_dir, sweep_count, write_json, Manifest, ProposalArg,
};
use crate::data;

#[derive(clap::Args, Debug)]
pub struct FitArgs {
    /// CSV of 0/1 responses, one respondent per row (optional header of
    /// item names).
    #[arg(long)]
    pub input: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub output: PathBuf,
    /// Master seed; all randomness in the run derives from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Outer iterations, burn-in included.
    #[arg(long, default_value_t = 10_000)]
    pub iterations: usize,
    /// Leading iterations that are not stored.
    #[arg(long, default_value_t = 2_000)]
    pub burn_in: usize,
    /// Gibbs sweeps per auxiliary draw (0 = one sweep per respondent).
    #[arg(long, default_value_t = 0)]
    pub aux_sweeps: usize,
    /// Per-coordinate Monte Carlo standard error treated as converged.
    #[arg(long, default_value_t = 0.03)]
    pub mcse_target: f64,
    /// Stop before --iterations once every coordinate MCSE reaches the
    /// target.
    #[arg(long)]
    pub adaptive_stop: bool,
    /// Use exact likelihood ratios from pattern enumeration instead of
    /// auxiliary draws (small item counts only).
    #[arg(long)]
    pub exact: bool,
    /// Coordinate-proposal shape.
    #[arg(long, value_enum, default_value_t = ProposalArg::RandomWalk)]
    pub proposal: ProposalArg,
    /// Keep every main effect in the model; selection acts on interactions
    /// only.
    #[arg(long)]
    pub fixed_main_effects: bool,
    /// Flush the chain file every this many stored states (0 = write once
    /// at the end).
    #[arg(long, default_value_t = 500)]
    pub checkpoint_every: usize,
}

/// Convergence report written next to the estimate.
#[derive(Serialize)]
struct McseReport {
    iterations_run: usize,
    stopped_early: bool,
    stored_states: usize,
    mcse_target: f64,
    /// Coordinate labels aligned with the per-coordinate arrays.
    labels: Vec<String>,
    /// Batch-means MCSE per coordinate, then for sigma2 and omega; null
    /// when the chain is too short to estimate.
    theta_mcse: Option<Vec<f64>>,
    sigma2_mcse: Option<f64>,
    omega_mcse: Option<f64>,
    theta_acceptance: Vec<f64>,
    sigma2_acceptance: f64,
    omega_acceptance: f64,
    seconds: f64,
}

pub fn run(args: FitArgs, threads: usize) -> Result<u8> {
    let (x, names) = data::read_matrix_csv(&args.input)?;
    let names = names.unwrap_or_else(|| data::default_names(x.p()));
    ensure_dir(&args.output)?;
    let chain_path = args.output.join("chain.jsonl");

    let cfg = Config {
        iterations: args.iterations,
        burn_in: args.burn_in,
        theta_proposal: args.proposal.into(),
        aux: AuxChainConfig {
            sweeps: sweep_count(args.aux_sweeps),
            ..AuxChainConfig::default()
        },
        seed: args.seed,
        mcse_target: args.mcse_target,
        adaptive_stop: args.adaptive_stop,
        select_beta: !args.fixed_main_effects,
        checkpoint_every: args.checkpoint_every,
        checkpoint_path: (args.checkpoint_every > 0).then(|| chain_path.clone()),
        ..Config::default()
    };

    let manifest = Manifest::new("fit", args.seed, threads, cfg.clone()).with_data(
        Some(&args.input),
        x.n(),
        x.p(),
    );
    write_json(&args.output.join("manifest.json"), &manifest)?;

    let (n, p, q) = (x.n(), x.p(), num_params(x.p()));
    println!("fit: n={n} p={p} q={q}");

    let start = Instant::now();
    let run = if args.exact {
        run_chain_exact(&x, &cfg)?
    } else {
        run_chain(&x, &cfg)?
    };
    let seconds = start.elapsed().as_secs_f64();
    if args.checkpoint_every == 0 {
        write_chain_file(&chain_path, x.p(), &run.records)?;
    }

    let estimate = posterior_summary(&run.records)?;
    write_json(&args.output.join("estimate.json"), &estimate)?;

    let mut edges = csv::Writer::from_path(args.output.join("edges.csv"))?;
    edges.write_record(["item_a", "item_b", "weight", "pip", "sign"])?;
    for i in p..q {
        let (j, k) = estimate.theta_hat.coordinate_items(i);
        edges.write_record([
            names[j].as_str(),
            names[k].as_str(),
            &format!("{}", estimate.theta_hat.get(i)),
            &format!("{}", estimate.pip[i]),
            &format!("{}", estimate.signed_adjacency.get(j, k)),
        ])?;
    }
    edges.flush()?;

    let labels: Vec<String> = (0..q).map(|i| coordinate_label(p, i, &names)).collect();
    let mcse = chain_coordinate_mcse(&run.records).ok();
    let report = McseReport {
        iterations_run: run.iterations_run,
        stopped_early: run.stopped_early,
        stored_states: run.records.len(),
        mcse_target: args.mcse_target,
        labels,
        theta_mcse: mcse.as_ref().map(|m| m[..q].to_vec()),
        sigma2_mcse: mcse.as_ref().map(|m| m[q]),
        omega_mcse: mcse.as_ref().map(|m| m[q + 1]),
        theta_acceptance: run.theta_acceptance.clone(),
        sigma2_acceptance: run.sigma2_acceptance,
        omega_acceptance: run.omega_acceptance,
        seconds,
    };
    write_json(&args.output.join("mcse.json"), &report)?;

    println!(
        "fit: {} stored states in {:.1}s ({} of {} iterations{}), {} edges kept",
        run.records.len(),
        seconds,
        run.iterations_run,
        args.iterations,
        if run.stopped_early {
            ", stopped early"
        } else {
            ""
        },
        estimate.signed_adjacency.edge_count(),
    );
    println!("fit: results in {}", args.output.display());
    Ok(0)
}
