//! `itemnet oracle-check`: verify the auxiliary-data sampler against the
//! exact-likelihood sampler on a small synthetic instance.
//!
//! A true parameter vector is drawn (all zeros at the default
//! `--theta-scale 0`), data are sampled exactly from it, and two chains run
//! on the same data: the auxiliary-data route and the enumeration-backed
//! exact route. Both target the same posterior, so every coordinate's
//! posterior means must agree within Monte Carlo error. A coordinate passes
//! when the mean gap is at most `tolerance` times the combined batch-means
//! MCSE of the two chains plus `floor`; any failure exits with code 3.

use std::path::PathBuf;

use anyhow::{bail, Result};
use itemnet::inner::{sample_exact_rows, AuxChainConfig};
use itemnet::model::num_params;
use itemnet::rng::{derive_seed, substream};
use itemnet::sampler::{chain_coordinate_mcse, run_chain, run_chain_exact};
use itemnet::scalar::Scalar;
use itemnet::{Config, Params, Record};
use serde::Serialize;

use crate::commands::{ensure_dir, sweep_count, write_json, Manifest};
use crate::data;

/// Exit code for a tolerance failure.
const EXIT_TOLERANCE: u8 = 3;

#[derive(clap::Args, Debug)]
pub struct OracleCheckArgs {
    /// Items in the check instance (2 to 4; the exact chain enumerates all
    /// response patterns, so the instance must stay small).
    #[arg(long, default_value_t = 3)]
    pub items: usize,
    /// Respondents in the synthetic instance.
    #[arg(long, default_value_t = 60)]
    pub n: usize,
    /// Master seed for truth, data, and both chains.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Outer iterations per chain, burn-in included.
    #[arg(long, default_value_t = 6_000)]
    pub iterations: usize,
    /// Leading iterations that are not stored.
    #[arg(long, default_value_t = 1_500)]
    pub burn_in: usize,
    /// Gibbs sweeps per auxiliary draw (0 = one sweep per respondent).
    #[arg(long, default_value_t = 0)]
    pub aux_sweeps: usize,
    /// Scale of the true parameters: each coordinate is scale times a
    /// standard normal draw; 0 keeps the null truth.
    #[arg(long, default_value_t = 0.0)]
    pub theta_scale: f64,
    /// Allowed posterior-mean gap per coordinate, as a multiple of the
    /// combined MCSE of the two chains.
    #[arg(long, default_value_t = 3.0)]
    pub tolerance: f64,
    /// Absolute slack added to every coordinate's allowance.
    #[arg(long, default_value_t = 0.02)]
    pub floor: f64,
    /// Directory for the comparison report and the instance data
    /// (optional; the check itself prints to stdout).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Serialize)]
struct CoordinateCheck {
    coordinate: usize,
    label: String,
    truth: f64,
    mean_aux: f64,
    mean_exact: f64,
    gap: f64,
    allowance: f64,
    pass: bool,
}

#[derive(Serialize)]
struct OracleReport {
    items: usize,
    n: usize,
    coordinates: Vec<CoordinateCheck>,
    worst_ratio: f64,
    pass: bool,
}

fn coordinate_means(records: &[Record], q: usize) -> Vec<f64> {
    let mut means = vec![0.0; q];
    for record in records {
        for (i, mean) in means.iter_mut().enumerate() {
            *mean += record.theta.get(i);
        }
    }
    for mean in &mut means {
        *mean /= records.len() as f64;
    }
    means
}

// Negated comparison so that a NaN tolerance fails validation too.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn run(args: OracleCheckArgs, threads: usize) -> Result<u8> {
    if !(2..=4).contains(&args.items) {
        bail!(
            "--items {} is outside 2..=4; the check enumerates all response patterns twice \
             per proposal, so it only runs on small instances",
            args.items
        );
    }
    if args.n < 4 {
        bail!(
            "--n {} gives too little data to define a posterior worth checking",
            args.n
        );
    }
    if !(args.tolerance > 0.0) {
        bail!("--tolerance must be positive");
    }
    if args.floor < 0.0 {
        bail!("--floor must be nonnegative");
    }

    let q = num_params(args.items);
    let truth = if args.theta_scale == 0.0 {
        Params::zeros(args.items)
    } else {
        let mut rng = substream(args.seed, 1);
        let values: Vec<f64> = (0..q)
            .map(|_| args.theta_scale * f64::std_normal(&mut rng))
            .collect();
        Params::from_flat(args.items, values)?
    };
    let x = sample_exact_rows(&truth, args.n, derive_seed(args.seed, 2))?;

    let base = Config {
        iterations: args.iterations,
        burn_in: args.burn_in,
        aux: AuxChainConfig {
            sweeps: sweep_count(args.aux_sweeps),
            ..AuxChainConfig::default()
        },
        ..Config::default()
    };
    let aux_run = run_chain(
        &x,
        &Config {
            seed: derive_seed(args.seed, 3),
            ..base.clone()
        },
    )?;
    let exact_run = run_chain_exact(
        &x,
        &Config {
            seed: derive_seed(args.seed, 4),
            ..base.clone()
        },
    )?;

    let mean_aux = coordinate_means(&aux_run.records, q);
    let mean_exact = coordinate_means(&exact_run.records, q);
    let mcse_aux = chain_coordinate_mcse(&aux_run.records)?;
    let mcse_exact = chain_coordinate_mcse(&exact_run.records)?;

    let names = data::default_names(args.items);
    let mut coordinates = Vec::with_capacity(q);
    let mut worst_ratio = 0.0f64;
    for i in 0..q {
        let gap = (mean_aux[i] - mean_exact[i]).abs();
        let combined = (mcse_aux[i] * mcse_aux[i] + mcse_exact[i] * mcse_exact[i]).sqrt();
        let allowance = args.tolerance * combined + args.floor;
        worst_ratio = worst_ratio.max(gap / allowance);
        coordinates.push(CoordinateCheck {
            coordinate: i,
            label: crate::commands::coordinate_label(args.items, i, &names),
            truth: truth.get(i),
            mean_aux: mean_aux[i],
            mean_exact: mean_exact[i],
            gap,
            allowance,
            pass: gap <= allowance,
        });
    }
    let pass = coordinates.iter().all(|c| c.pass);

    for check in &coordinates {
        println!(
            "oracle-check: {:>12}  aux {:+.4}  exact {:+.4}  gap {:.4} <= {:.4}  {}",
            check.label,
            check.mean_aux,
            check.mean_exact,
            check.gap,
            check.allowance,
            if check.pass { "ok" } else { "FAIL" }
        );
    }
    println!(
        "oracle-check: {} ({} coordinates, worst gap at {:.2} of its allowance)",
        if pass { "PASS" } else { "FAIL" },
        q,
        worst_ratio
    );

    if let Some(dir) = &args.output {
        ensure_dir(dir)?;
        data::write_matrix_csv(&dir.join("data.csv"), &x, None)?;
        let report = OracleReport {
            items: args.items,
            n: args.n,
            coordinates,
            worst_ratio,
            pass,
        };
        write_json(&dir.join("report.json"), &report)?;
        #[derive(Serialize)]
        struct OracleConfig {
            sampler: Config,
            theta_scale: f64,
            tolerance: f64,
            floor: f64,
            truth: Params,
        }
        let manifest = Manifest::new(
            "oracle-check",
            args.seed,
            threads,
            OracleConfig {
                sampler: base,
                theta_scale: args.theta_scale,
                tolerance: args.tolerance,
                floor: args.floor,
                truth,
            },
        )
        .with_data(None, args.n, args.items);
        write_json(&dir.join("manifest.json"), &manifest)?;
        println!("oracle-check: report in {}", dir.display());
    }

    Ok(if pass { 0 } else { EXIT_TOLERANCE })
}
