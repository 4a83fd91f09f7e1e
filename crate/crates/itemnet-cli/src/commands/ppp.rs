//! `itemnet ppp`: predictive p-values for a fitted model against the data
//! it was fitted to.
//!
//! Two routes: `--chain <fit dir>` thins the stored posterior states and
//! simulates one dataset per retained state (posterior predictive);
//! `--elasso` fits the pseudolikelihood baseline and simulates every
//! dataset from its single point estimate. Each sufficient statistic gets
//! the share of simulated datasets whose statistic strictly exceeds the
//! observed one; values near 0 or 1 flag statistics the model cannot
//! reproduce.

use std::path::PathBuf;

use anyhow::{bail, Result};
use itemnet::diagnostics::{
    point_predictive_pvalues, posterior_predictive_pvalues, pvalue_rmse, PppConfig,
};
use itemnet::model::num_params;
use itemnet::pseudolikelihood::{fit_elasso, ElassoConfig};
use itemnet::sampler::read_chain_file;
use itemnet::Record;
use serde::Serialize;

use crate::commands::{
    coordinate_label, ensure_dir, sweep_count, write_json, Manifest, ModeArg, RuleArg,
};
use crate::data;

#[derive(clap::Args, Debug)]
pub struct PppArgs {
    /// CSV the model was fitted to.
    #[arg(long)]
    pub input: PathBuf,
    /// Fit output directory (or a chain.jsonl path): check the stored
    /// posterior states.
    #[arg(long, conflicts_with = "elasso")]
    pub chain: Option<PathBuf>,
    /// Fit the pseudolikelihood baseline here and check its point estimate.
    #[arg(long)]
    pub elasso: bool,
    /// Output directory.
    #[arg(long)]
    pub output: PathBuf,
    /// Seed for the predictive simulations.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Simulated datasets.
    #[arg(long, default_value_t = 1000)]
    pub num_draws: usize,
    /// Gibbs sweeps per simulated dataset (0 = one sweep per respondent;
    /// ignored on the exact route).
    #[arg(long, default_value_t = 0)]
    pub sim_sweeps: usize,
    /// Simulation route.
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    pub mode: ModeArg,
    /// EBIC sparsity weight for the baseline fit (with --elasso).
    #[arg(long, default_value_t = 0.25)]
    pub ebic_gamma: f64,
    /// Edge rule for the baseline fit (with --elasso).
    #[arg(long, value_enum, default_value_t = RuleArg::And)]
    pub rule: RuleArg,
}

#[derive(Serialize)]
struct PppReport {
    /// "posterior" (chain route) or "point" (baseline route).
    route: &'static str,
    num_draws: usize,
    /// Posterior states backing the draws (equals num_draws on the point
    /// route).
    states_used: usize,
    labels: Vec<String>,
    pvalues: Vec<f64>,
    /// Root mean square deviation of the p-values from one half.
    rmse_to_half: f64,
}

#[derive(Serialize)]
struct PppManifestConfig {
    ppp: PppConfig,
    route: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    chain: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    elasso: Option<ElassoConfig<f64>>,
}

pub fn run(args: PppArgs, threads: usize) -> Result<u8> {
    let (x, names) = data::read_matrix_csv(&args.input)?;
    let names = names.unwrap_or_else(|| data::default_names(x.p()));
    let (p, q) = (x.p(), num_params(x.p()));

    let cfg = PppConfig {
        num_draws: args.num_draws,
        sim_sweeps: sweep_count(args.sim_sweeps),
        mode: args.mode.into(),
        seed: args.seed,
        ..PppConfig::default()
    };

    let (route, states_used, pvalues, elasso_cfg, chain_path) = match (&args.chain, args.elasso) {
        (Some(chain), false) => {
            let path = if chain.is_dir() {
                chain.join("chain.jsonl")
            } else {
                chain.clone()
            };
            let (header, records): (_, Vec<Record>) = read_chain_file(&path)?;
            if header.p != x.p() {
                bail!(
                    "chain stores {} items, data has {}; was this chain fitted to other data?",
                    header.p,
                    x.p()
                );
            }
            let pvalues = posterior_predictive_pvalues(&records, &x, &cfg)?;
            let used = records.len().min(args.num_draws);
            ("posterior", used, pvalues, None, Some(path))
        }
        (None, true) => {
            let elasso_cfg = ElassoConfig {
                ebic_gamma: args.ebic_gamma,
                rule: args.rule.into(),
                ..ElassoConfig::default()
            };
            let fit = fit_elasso(&x, &elasso_cfg)?;
            let pvalues = point_predictive_pvalues(&fit.estimate.theta_hat, &x, &cfg)?;
            ("point", args.num_draws, pvalues, Some(elasso_cfg), None)
        }
        (None, false) => bail!("pass --chain <fit dir> for the posterior route or --elasso"),
        (Some(_), true) => unreachable!("clap rejects --chain with --elasso"),
    };

    ensure_dir(&args.output)?;
    let labels: Vec<String> = (0..q).map(|i| coordinate_label(p, i, &names)).collect();
    let rmse = pvalue_rmse(std::slice::from_ref(&pvalues))?;

    let report = PppReport {
        route,
        num_draws: args.num_draws,
        states_used,
        labels: labels.clone(),
        pvalues: pvalues.clone(),
        rmse_to_half: rmse,
    };
    write_json(&args.output.join("pvalues.json"), &report)?;

    let mut csv = csv::Writer::from_path(args.output.join("pvalues.csv"))?;
    csv.write_record(["coordinate", "label", "pvalue"])?;
    for (i, (label, pv)) in labels.iter().zip(&pvalues).enumerate() {
        csv.write_record([&i.to_string(), label, &format!("{pv}")])?;
    }
    csv.flush()?;

    let config = PppManifestConfig {
        ppp: cfg,
        route,
        chain: chain_path.map(|path| path.display().to_string()),
        elasso: elasso_cfg,
    };
    let manifest =
        Manifest::new("ppp", args.seed, threads, config).with_data(Some(&args.input), x.n(), x.p());
    write_json(&args.output.join("manifest.json"), &manifest)?;

    println!(
        "ppp: {route} route, {} draws over {} statistics, p-value RMSE to 1/2 = {rmse:.4}",
        args.num_draws, q
    );
    println!("ppp: results in {}", args.output.display());
    Ok(0)
}
