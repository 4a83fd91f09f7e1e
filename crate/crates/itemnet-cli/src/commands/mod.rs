pub mod compare;
pub mod fit;
pub mod oracle_check;
pub mod ppp;
pub mod simulate;

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use itemnet::inner::SweepCount;
use itemnet::pseudolikelihood::EdgeRule;
use itemnet::sampler::ThetaProposal;
use itemnet::Design;
use serde::Serialize;

/// Coordinate-proposal shape, as a flag value.
#[derive(clap::ValueEnum, Clone, Copy, Debug)]
pub enum ProposalArg {
    /// Normal step centered at the current value.
    RandomWalk,
    /// Normal draw centered at zero with a proposal-density correction.
    Independent,
}

impl From<ProposalArg> for ThetaProposal {
    fn from(arg: ProposalArg) -> Self {
        match arg {
            ProposalArg::RandomWalk => ThetaProposal::RandomWalk,
            ProposalArg::Independent => ThetaProposal::IndependentNormal,
        }
    }
}

/// Edge symmetrization rule for the pseudolikelihood baseline.
#[derive(clap::ValueEnum, Clone, Copy, Debug)]
pub enum RuleArg {
    /// Keep an edge only when both directed coefficients are nonzero.
    And,
    /// Keep an edge when either directed coefficient is nonzero.
    Or,
}

impl From<RuleArg> for EdgeRule {
    fn from(arg: RuleArg) -> Self {
        match arg {
            RuleArg::And => EdgeRule::And,
            RuleArg::Or => EdgeRule::Or,
        }
    }
}

/// Predictive-simulation route, as a flag value.
#[derive(clap::ValueEnum, Clone, Copy, Debug)]
pub enum ModeArg {
    /// Exact pattern enumeration when the item count allows it, Gibbs
    /// sweeps otherwise.
    Auto,
    Exact,
    Sweeps,
}

impl From<ModeArg> for itemnet::diagnostics::PppMode {
    fn from(arg: ModeArg) -> Self {
        match arg {
            ModeArg::Auto => itemnet::diagnostics::PppMode::Auto,
            ModeArg::Exact => itemnet::diagnostics::PppMode::Exact,
            ModeArg::Sweeps => itemnet::diagnostics::PppMode::Sweeps,
        }
    }
}

/// Flag convention shared by every sweep-count option: 0 means one sweep
/// per respondent, anything else is a fixed count.
pub fn sweep_count(flag: usize) -> SweepCount {
    if flag == 0 {
        SweepCount::SampleSize
    } else {
        SweepCount::Fixed(flag)
    }
}

/// Synthetic-design flags shared by `simulate` and `compare`.
#[derive(clap::Args, Clone, Debug)]
pub struct DesignArgs {
    /// Respondents per dataset.
    #[arg(long, default_value_t = 300)]
    pub n: usize,
    /// Items; must split into equal groups.
    #[arg(long, default_value_t = 24)]
    pub items: usize,
    /// Item groups.
    #[arg(long, default_value_t = 6)]
    pub groups: usize,
    /// Latent respondent classes.
    #[arg(long, default_value_t = 3)]
    pub classes: usize,
    /// Group indices each class treats as inside, as JSON (for example
    /// "[[0,1],[4,5],[2,3]]", the default for 3 classes over 6 groups).
    #[arg(long)]
    pub inside_groups: Option<String>,
    /// Probability an intended-inside group behaves as inside.
    #[arg(long, default_value_t = 0.7)]
    pub p11: f64,
    /// Success rate on a group's first item when the group is inside.
    #[arg(long, default_value_t = 0.7)]
    pub p12: f64,
    /// Probability an intended-outside group behaves as outside.
    #[arg(long, default_value_t = 0.5)]
    pub p21: f64,
    /// Success rate on a group's first item when the group is outside.
    #[arg(long, default_value_t = 0.5)]
    pub p22: f64,
    /// Success rate on an item whose predecessor in the group succeeded.
    #[arg(long, default_value_t = 0.8)]
    pub rho: f64,
    /// Success rate applied after a predecessor failure (every item).
    #[arg(long, default_value_t = 0.5)]
    pub base_easiness: f64,
}

impl DesignArgs {
    pub fn to_design(&self, seed: u64) -> Result<Design> {
        let class_to_inside_groups = match &self.inside_groups {
            Some(text) => serde_json::from_str(text)
                .context("--inside-groups must be JSON like [[0,1],[4,5],[2,3]]")?,
            None if self.classes == 3 && self.groups == 6 => {
                Design::default().class_to_inside_groups
            }
            None => bail!(
                "--inside-groups is required when --classes/--groups differ from the \
                 3-class, 6-group default"
            ),
        };
        Ok(Design {
            n: self.n,
            p: self.items,
            g: self.groups,
            classes: self.classes,
            class_to_inside_groups,
            p11: self.p11,
            p12: self.p12,
            p21: self.p21,
            p22: self.p22,
            rho: self.rho,
            base_easiness: vec![self.base_easiness; self.items],
            seed,
        })
    }
}

/// Run provenance written next to every command's outputs. The recorded
/// configuration is fully resolved (defaults filled in), so replaying the
/// same command with these values reproduces the run exactly.
#[derive(Serialize)]
pub struct Manifest<C: Serialize> {
    pub command: String,
    /// Tool version that produced the run.
    pub version: String,
    /// Chain file format version written or read by the run.
    pub chain_format_version: u32,
    /// Master seed; all randomness in the run derives from it.
    pub seed: u64,
    /// Requested worker threads (0 = all available cores).
    pub threads: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    /// Coordinate count `p + p(p-1)/2`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    pub config: C,
}

impl<C: Serialize> Manifest<C> {
    pub fn new(command: &str, seed: u64, threads: usize, config: C) -> Self {
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            chain_format_version: itemnet::sampler::CHAIN_VERSION,
            seed,
            threads,
            input: None,
            n: None,
            p: None,
            q: None,
            config,
        }
    }

    pub fn with_data(mut self, input: Option<&Path>, n: usize, p: usize) -> Self {
        self.input = input.map(|path| path.display().to_string());
        self.n = Some(n);
        self.p = Some(p);
        self.q = Some(itemnet::model::num_params(p));
        self
    }
}

/// Create `dir` (and parents) if needed.
pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))
}

/// Write a value as pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// Label of flat coordinate `i`: the item name for a main effect, the item
/// pair for an interaction.
pub fn coordinate_label(p: usize, i: usize, names: &[String]) -> String {
    if i < p {
        names[i].clone()
    } else {
        let (j, k) = itemnet::model::pair_from_index(p, i - p);
        format!("{}:{}", names[j], names[k])
    }
}
