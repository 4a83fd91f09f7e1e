//! `itemnet compare`: the Bayesian fit against the pseudolikelihood
//! baseline on the same data.
//!
//! Per replicate both estimators are fitted, predictive p-values are
//! computed for each (posterior route for the Bayesian fit, point route
//! for the baseline), and the table gets one row with the p-value RMSE of
//! each method (distance from the ideal 1/2; lower means the fitted model
//! reproduces the data better). Without `--input` the replicates are drawn
//! from the synthetic design, and each row also reports the signed
//! adjacency RMSE against the known truth.

use std::path::PathBuf;

use anyhow::{bail, Result};
use itemnet::diagnostics::{
    adjacency_rmse, point_predictive_pvalues, posterior_predictive_pvalues, pvalue_rmse, PppConfig,
};
use itemnet::inner::AuxChainConfig;
use itemnet::pseudolikelihood::{fit_elasso, ElassoConfig};
use itemnet::rng::derive_seed;
use itemnet::sampler::posterior_summary;
use itemnet::simulation::generate_dataset;
use itemnet::{Config, Design};
use serde::Serialize;

use crate::commands::{
    ensure_dir, sweep_count, write_json, DesignArgs, Manifest, ModeArg, RuleArg,
};
use crate::data;

#[derive(clap::Args, Debug)]
pub struct CompareArgs {
    /// Observed data CSV; when omitted, replicates are generated from the
    /// design flags.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub output: PathBuf,
    /// Master seed; data, chains, and predictive checks draw derived
    /// streams per replicate.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comparison replicates.
    #[arg(long, default_value_t = 1)]
    pub replicates: usize,
    #[command(flatten)]
    pub design: DesignArgs,
    /// Outer iterations per Bayesian fit, burn-in included.
    #[arg(long, default_value_t = 2_000)]
    pub iterations: usize,
    /// Leading iterations that are not stored.
    #[arg(long, default_value_t = 500)]
    pub burn_in: usize,
    /// Gibbs sweeps per auxiliary draw (0 = one sweep per respondent).
    #[arg(long, default_value_t = 0)]
    pub aux_sweeps: usize,
    /// Per-coordinate Monte Carlo standard error treated as converged.
    #[arg(long, default_value_t = 0.03)]
    pub mcse_target: f64,
    /// Stop a fit early once every coordinate MCSE reaches the target.
    #[arg(long)]
    pub adaptive_stop: bool,
    /// Simulated datasets per predictive check.
    #[arg(long, default_value_t = 500)]
    pub num_draws: usize,
    /// Gibbs sweeps per simulated dataset (0 = one sweep per respondent).
    #[arg(long, default_value_t = 0)]
    pub sim_sweeps: usize,
    /// Predictive-simulation route.
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    pub mode: ModeArg,
    /// EBIC sparsity weight for the baseline.
    #[arg(long, default_value_t = 0.25)]
    pub ebic_gamma: f64,
    /// Edge rule for the baseline.
    #[arg(long, value_enum, default_value_t = RuleArg::And)]
    pub rule: RuleArg,
}

#[derive(Serialize, Clone)]
struct CompareRow {
    setting: String,
    replicate: usize,
    /// P-value RMSE from 1/2 for the baseline point predictive check.
    elasso_pvalue_rmse: f64,
    /// P-value RMSE from 1/2 for the posterior predictive check.
    bayes_pvalue_rmse: f64,
    /// Signed-adjacency RMSE against the design truth (design mode only).
    #[serde(skip_serializing_if = "Option::is_none")]
    elasso_adjacency_rmse: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bayes_adjacency_rmse: Option<f64>,
    elasso_edges: usize,
    bayes_edges: usize,
}

#[derive(Serialize)]
struct CompareConfig {
    replicates: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    design: Option<Design>,
    sampler: Config,
    ppp: PppConfig,
    elasso: ElassoConfig<f64>,
}

pub fn run(args: CompareArgs, threads: usize) -> Result<u8> {
    if args.replicates == 0 {
        bail!("need at least one replicate");
    }
    ensure_dir(&args.output)?;

    // Resolved once for the manifest; per replicate only the seeds move.
    let sampler_base = Config {
        iterations: args.iterations,
        burn_in: args.burn_in,
        aux: AuxChainConfig {
            sweeps: sweep_count(args.aux_sweeps),
            ..AuxChainConfig::default()
        },
        mcse_target: args.mcse_target,
        adaptive_stop: args.adaptive_stop,
        seed: args.seed,
        ..Config::default()
    };
    let ppp_base = PppConfig {
        num_draws: args.num_draws,
        sim_sweeps: sweep_count(args.sim_sweeps),
        mode: args.mode.into(),
        seed: args.seed,
        ..PppConfig::default()
    };
    let elasso_cfg = ElassoConfig {
        ebic_gamma: args.ebic_gamma,
        rule: args.rule.into(),
        ..ElassoConfig::default()
    };

    let input_data = match &args.input {
        Some(path) => {
            let (x, _) = data::read_matrix_csv(path)?;
            Some(x)
        }
        None => None,
    };
    let design = match &args.input {
        Some(_) => None,
        None => {
            let design = args.design.to_design(args.seed)?;
            design.validate().map_err(anyhow::Error::from)?;
            Some(design)
        }
    };
    let setting = match (&args.input, &design) {
        (Some(path), _) => path.display().to_string(),
        (None, Some(d)) => format!(
            "n={} p={} p11={} p12={} p21={} p22={} rho={}",
            d.n, d.p, d.p11, d.p12, d.p21, d.p22, d.rho
        ),
        (None, None) => unreachable!(),
    };

    let mut rows: Vec<CompareRow> = Vec::with_capacity(args.replicates);
    for rep in 1..=args.replicates {
        let (x, truth) = match (&input_data, &design) {
            (Some(x), _) => (x.clone(), None),
            (None, Some(d)) => {
                let rep_design = Design {
                    seed: derive_seed(args.seed, 1000 + rep as u64),
                    ..d.clone()
                };
                let (x, truth) = generate_dataset(&rep_design)?;
                (x, Some(truth))
            }
            (None, None) => unreachable!(),
        };

        let chain_cfg = Config {
            seed: derive_seed(args.seed, 2000 + rep as u64),
            ..sampler_base.clone()
        };
        let chain = itemnet::sampler::run_chain(&x, &chain_cfg)?;
        let bayes = posterior_summary(&chain.records)?;
        let bayes_pvals = posterior_predictive_pvalues(
            &chain.records,
            &x,
            &PppConfig {
                seed: derive_seed(args.seed, 3000 + rep as u64),
                ..ppp_base
            },
        )?;
        let bayes_pvalue_rmse = pvalue_rmse(&[bayes_pvals])?;

        let elasso = fit_elasso(&x, &elasso_cfg)?;
        let elasso_pvals = point_predictive_pvalues(
            &elasso.estimate.theta_hat,
            &x,
            &PppConfig {
                seed: derive_seed(args.seed, 4000 + rep as u64),
                ..ppp_base
            },
        )?;
        let elasso_pvalue_rmse = pvalue_rmse(&[elasso_pvals])?;

        let (elasso_adjacency_rmse, bayes_adjacency_rmse) = match &truth {
            Some(truth) => (
                Some(adjacency_rmse(
                    elasso.estimate.signed_adjacency.entries(),
                    truth.adjacency.entries(),
                )?),
                Some(adjacency_rmse(
                    bayes.signed_adjacency.entries(),
                    truth.adjacency.entries(),
                )?),
            ),
            None => (None, None),
        };

        let row = CompareRow {
            setting: setting.clone(),
            replicate: rep,
            elasso_pvalue_rmse,
            bayes_pvalue_rmse,
            elasso_adjacency_rmse,
            bayes_adjacency_rmse,
            elasso_edges: elasso.estimate.signed_adjacency.edge_count(),
            bayes_edges: bayes.signed_adjacency.edge_count(),
        };
        println!(
            "compare: replicate {rep}: elasso pvalue RMSE {:.4}, bayes pvalue RMSE {:.4}{}",
            row.elasso_pvalue_rmse,
            row.bayes_pvalue_rmse,
            match (row.elasso_adjacency_rmse, row.bayes_adjacency_rmse) {
                (Some(e), Some(b)) => format!(", adjacency RMSE elasso {e:.4} vs bayes {b:.4}"),
                _ => String::new(),
            }
        );
        rows.push(row);
    }

    write_json(&args.output.join("table.json"), &rows)?;
    let mut table = csv::Writer::from_path(args.output.join("table.csv"))?;
    table.write_record([
        "setting",
        "replicate",
        "elasso_pvalue_rmse",
        "bayes_pvalue_rmse",
        "elasso_adjacency_rmse",
        "bayes_adjacency_rmse",
        "elasso_edges",
        "bayes_edges",
    ])?;
    let opt = |v: Option<f64>| v.map(|v| format!("{v}")).unwrap_or_default();
    for row in &rows {
        table.write_record([
            row.setting.as_str(),
            &row.replicate.to_string(),
            &format!("{}", row.elasso_pvalue_rmse),
            &format!("{}", row.bayes_pvalue_rmse),
            &opt(row.elasso_adjacency_rmse),
            &opt(row.bayes_adjacency_rmse),
            &row.elasso_edges.to_string(),
            &row.bayes_edges.to_string(),
        ])?;
    }
    table.flush()?;

    let config = CompareConfig {
        replicates: args.replicates,
        design,
        sampler: sampler_base,
        ppp: ppp_base,
        elasso: elasso_cfg,
    };
    let mut manifest = Manifest::new("compare", args.seed, threads, config);
    manifest.input = args.input.as_ref().map(|path| path.display().to_string());
    write_json(&args.output.join("manifest.json"), &manifest)?;

    let count = rows.len() as f64;
    let mean_e: f64 = rows.iter().map(|r| r.elasso_pvalue_rmse).sum::<f64>() / count;
    let mean_b: f64 = rows.iter().map(|r| r.bayes_pvalue_rmse).sum::<f64>() / count;
    let bayes_wins = rows
        .iter()
        .filter(|r| r.bayes_pvalue_rmse < r.elasso_pvalue_rmse)
        .count();
    println!(
        "compare: mean pvalue RMSE elasso {mean_e:.4} vs bayes {mean_b:.4} \
         (bayes lower in {bayes_wins} of {} replicates; lower is better)",
        rows.len()
    );
    println!("compare: results in {}", args.output.display());
    Ok(0)
}
