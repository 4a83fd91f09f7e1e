//! `itemnet simulate`: generate synthetic response datasets with a known
//! signed network.
//!
//! Each replicate gets its own derived seed and writes a `data_R.csv`
//! response matrix plus a `truth_R.json` with the latent classes, item
//! groups, and true signed adjacency. The manifest records every replicate
//! seed.

use std::path::PathBuf;

use anyhow::{bail, Result};
use itemnet::rng::derive_seed;
use itemnet::simulation::generate_dataset;
use itemnet::Design;
use serde::Serialize;

use crate::commands::{ensure_dir, write_json, DesignArgs, Manifest};
use crate::data;

#[derive(clap::Args, Debug)]
pub struct SimulateArgs {
    /// Output directory.
    #[arg(long)]
    pub output: PathBuf,
    /// Master seed; replicate r draws from a seed derived as stream r.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Datasets to generate.
    #[arg(long, default_value_t = 1)]
    pub replicates: usize,
    #[command(flatten)]
    pub design: DesignArgs,
}

#[derive(Serialize)]
struct SimulateConfig {
    replicates: usize,
    /// Seed used by replicate r (1-based): `replicate_seeds[r - 1]`.
    replicate_seeds: Vec<u64>,
    /// The design with the master seed; each replicate reruns it with its
    /// own seed from `replicate_seeds`.
    design: Design,
}

pub fn run(args: SimulateArgs, threads: usize) -> Result<u8> {
    if args.replicates == 0 {
        bail!("need at least one replicate");
    }
    // Validate the design before creating any output.
    let design = args.design.to_design(args.seed)?;
    design.validate().map_err(anyhow::Error::from)?;
    ensure_dir(&args.output)?;

    let mut replicate_seeds = Vec::with_capacity(args.replicates);
    for rep in 1..=args.replicates {
        let rep_seed = derive_seed(args.seed, rep as u64);
        let rep_design = Design {
            seed: rep_seed,
            ..design.clone()
        };
        let (x, truth) = generate_dataset(&rep_design)?;
        let data_path = args.output.join(format!("data_{rep}.csv"));
        data::write_matrix_csv(&data_path, &x, None)?;
        write_json(&args.output.join(format!("truth_{rep}.json")), &truth)?;
        replicate_seeds.push(rep_seed);
        println!(
            "simulate: replicate {rep} (seed {rep_seed}) -> {} ({} x {})",
            data_path.display(),
            x.n(),
            x.p()
        );
    }

    let config = SimulateConfig {
        replicates: args.replicates,
        replicate_seeds,
        design: design.clone(),
    };
    let manifest =
        Manifest::new("simulate", args.seed, threads, config).with_data(None, design.n, design.p);
    write_json(&args.output.join("manifest.json"), &manifest)?;
    Ok(0)
}
