//! Spike-and-slab edge selection by double Metropolis-Hastings.
//!
//! The item network likelihood has an intractable normalizing constant, so
//! an ordinary Metropolis-Hastings ratio for a parameter update cannot be
//! evaluated. The double Metropolis-Hastings step sidesteps this: to update
//! coordinate `i` from value `t` to a proposal `t'`, draw an auxiliary data
//! set `y` by running a short Gibbs chain at the proposed parameters,
//! started at the observed data `x`. The auxiliary draw's own intractable
//! constant cancels the likelihood's, leaving the computable ratio
//!
//! ```text
//! log alpha = (t' - t) * (T_i(x) - T_i(y)) + log prior(t') - log prior(t)
//! ```
//!
//! where `T_i` is coordinate `i`'s sufficient statistic. No partition
//! function is ever evaluated on this route.
//!
//! Each coordinate carries a spike-and-slab prior: an inclusion bit
//! `lambda_i` selects between a slab normal with variance `omega^2 sigma2`
//! (the coordinate is in the network) and a spike normal with variance
//! `sigma2` (effectively excluded). The bits, the base variance `sigma2`,
//! and the slab multiplier `omega` are all sampled, so a chain delivers
//! posterior inclusion probabilities alongside parameter draws.
//!
//! One outer iteration sweeps every coordinate (Metropolis step on the
//! value, then a Bernoulli refresh of its inclusion bit), then updates
//! `sigma2` and `omega` by random-walk Metropolis on their full
//! conditionals. [`run_chain`] uses the auxiliary-data route; the
//! enumeration-backed [`run_chain_exact`] evaluates the true likelihood
//! ratio and exists as a ground-truth reference for small item counts.

mod chain_io;

pub use chain_io::{
    read_chain_file, write_chain_file, ChainFileHeader, ChainWriter, CHAIN_FORMAT, CHAIN_VERSION,
};

use std::path::PathBuf;

use rand::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::adjacency::SignedAdjacency;
use crate::diagnostics::batch_means_mcse;
use crate::inner::{sweep_cells, AuxChainConfig};
use crate::model::{
    coordinate_items, coordinate_statistic, log_partition_exact_bounded, num_params,
    pair_stat_cells, ItemResponseMatrix, ParamVector, RowModel, ENUMERATION_BOUND,
};
use crate::rng::ChainRng;
use crate::scalar::{logistic, normal_logpdf0, Scalar};
use crate::{Error, Result};

/// Support of the base variance `sigma2`: the reciprocal of a uniform draw
/// on [4, 100].
pub const SIGMA2_MIN: f64 = 0.01;
pub const SIGMA2_MAX: f64 = 0.25;
/// The slab multiplier `omega` is 1 plus an exponential with this rate.
pub const OMEGA_RATE: f64 = 0.01;

/// Inclusion bits and prior scales of the spike-and-slab layer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionState<F> {
    /// One inclusion bit per coordinate; 1 selects the slab.
    pub lambda: Vec<u8>,
    /// Base (spike) variance, in `[SIGMA2_MIN, SIGMA2_MAX]`.
    pub sigma2: F,
    /// Slab standard-deviation multiplier, at least 1.
    pub omega: F,
}

impl<F: Scalar> SelectionState<F> {
    /// Everything included, the starting state of a chain.
    pub fn all_included(q: usize, sigma2: F, omega: F) -> Self {
        Self {
            lambda: vec![1; q],
            sigma2,
            omega,
        }
    }

    pub fn validate(&self, q: usize) -> Result<()> {
        if self.lambda.len() != q {
            return Err(Error::DimensionMismatch(format!(
                "{} inclusion bits for {q} coordinates",
                self.lambda.len()
            )));
        }
        if self.lambda.iter().any(|&b| b > 1) {
            return Err(Error::InvalidData("inclusion bits must be 0 or 1".into()));
        }
        if !(self.sigma2 >= F::c(SIGMA2_MIN) && self.sigma2 <= F::c(SIGMA2_MAX)) {
            return Err(Error::InvalidConfig(format!(
                "sigma2 = {} outside [{SIGMA2_MIN}, {SIGMA2_MAX}]",
                self.sigma2
            )));
        }
        if !(self.omega >= F::one() && self.omega.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "omega = {} must be a finite value >= 1",
                self.omega
            )));
        }
        Ok(())
    }
}

/// One stored state of the outer chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainRecord<F> {
    /// Outer iteration index (burn-in iterations are not stored).
    pub iter: usize,
    pub theta: ParamVector<F>,
    pub selection: SelectionState<F>,
}

/// Shape of the coordinate proposal in the outer chain.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThetaProposal {
    /// Normal step centered at the current value (symmetric, no proposal
    /// correction).
    #[default]
    RandomWalk,
    /// Normal draw centered at zero, ignoring the current value; the
    /// acceptance ratio then carries the proposal-density correction.
    IndependentNormal,
}

/// Outer sampler configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig<F> {
    /// Total outer iterations, burn-in included.
    pub iterations: usize,
    /// Leading iterations that are not stored.
    pub burn_in: usize,
    /// Random-walk scale for coordinate proposals.
    pub proposal_sd_theta: F,
    /// Coordinate proposal shape.
    pub theta_proposal: ThetaProposal,
    /// Random-walk scale for the `sigma2` update.
    pub proposal_sd_sigma2: F,
    /// Random-walk scale for the `omega` update.
    pub proposal_sd_omega: F,
    /// Auxiliary-run shape. The `init` and `seed` fields only matter for
    /// standalone auxiliary draws; inside a chain every proposal derives a
    /// fresh auxiliary seed from the chain seed and starts at the data.
    pub aux: AuxChainConfig,
    pub seed: u64,
    /// Per-coordinate Monte Carlo standard error considered small enough.
    pub mcse_target: F,
    /// Stop before `iterations` once every coordinate's MCSE is at or below
    /// `mcse_target` (checked every `mcse_check_every` stored states).
    pub adaptive_stop: bool,
    pub mcse_check_every: usize,
    /// Tune proposal scales during burn-in from windowed acceptance rates;
    /// scales freeze at the end of burn-in.
    pub adapt_proposals: bool,
    /// When false, main effects keep inclusion bits pinned to 1 and only
    /// interactions undergo selection.
    pub select_beta: bool,
    /// Write stored records to `checkpoint_path` every this many states
    /// (0 disables checkpointing).
    pub checkpoint_every: usize,
    pub checkpoint_path: Option<PathBuf>,
    /// Guard against accidental huge allocations: refuse to run when the
    /// coordinate count exceeds this.
    pub max_params: usize,
}

impl<F: Scalar> Default for SamplerConfig<F> {
    fn default() -> Self {
        Self {
            iterations: 10_000,
            burn_in: 2_000,
            proposal_sd_theta: F::c(0.2),
            theta_proposal: ThetaProposal::default(),
            proposal_sd_sigma2: F::c(0.02),
            proposal_sd_omega: F::c(0.5),
            aux: AuxChainConfig::default(),
            seed: 0,
            mcse_target: F::c(0.03),
            adaptive_stop: false,
            mcse_check_every: 500,
            adapt_proposals: true,
            select_beta: true,
            checkpoint_every: 0,
            checkpoint_path: None,
            max_params: 50_000,
        }
    }
}

impl<F: Scalar> SamplerConfig<F> {
    // Negated comparisons so that NaN values fail validation too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidConfig("iterations must be positive".into()));
        }
        if self.burn_in >= self.iterations {
            return Err(Error::InvalidConfig(format!(
                "burn-in {} leaves no stored iterations out of {}",
                self.burn_in, self.iterations
            )));
        }
        for (name, sd) in [
            ("proposal_sd_theta", self.proposal_sd_theta),
            ("proposal_sd_sigma2", self.proposal_sd_sigma2),
            ("proposal_sd_omega", self.proposal_sd_omega),
        ] {
            if !(sd > F::zero() && sd.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "{name} = {sd} must be a positive finite value"
                )));
            }
        }
        if !(self.mcse_target > F::zero()) {
            return Err(Error::InvalidConfig("mcse_target must be positive".into()));
        }
        if self.mcse_check_every == 0 {
            return Err(Error::InvalidConfig(
                "mcse_check_every must be positive".into(),
            ));
        }
        if self.checkpoint_every > 0 && self.checkpoint_path.is_none() {
            return Err(Error::InvalidConfig(
                "checkpoint_every is set but checkpoint_path is not".into(),
            ));
        }
        Ok(())
    }
}

/// log prior density of one coordinate value under its current inclusion
/// bit: slab `N(0, omega^2 sigma2)` when included, spike `N(0, sigma2)`
/// when excluded.
pub fn spike_slab_log_prior<F: Scalar>(theta_i: F, lambda_i: u8, sigma2: F, omega: F) -> F {
    let variance = if lambda_i == 1 {
        omega * omega * sigma2
    } else {
        sigma2
    };
    normal_logpdf0(theta_i, variance)
}

/// Posterior probability that a coordinate's inclusion bit is 1 given its
/// value and the prior scales, under a fair prior on the bit:
///
/// ```text
/// P(lambda = 1 | t) = logistic( t^2/(2 sigma2) (1 - 1/omega^2) - ln omega )
/// ```
pub fn lambda_inclusion_probability<F: Scalar>(theta_i: F, sigma2: F, omega: F) -> F {
    let w2 = omega * omega;
    let log_ratio = theta_i * theta_i / (F::c(2.0) * sigma2) * (F::one() - w2.recip()) - omega.ln();
    logistic(log_ratio)
}

/// log density (up to a constant) of the base-variance prior, the
/// reciprocal of a uniform on [4, 100]: proportional to `sigma2^-2` on
/// `[SIGMA2_MIN, SIGMA2_MAX]`.
pub fn log_sigma2_prior<F: Scalar>(sigma2: F) -> F {
    if sigma2 < F::c(SIGMA2_MIN) || sigma2 > F::c(SIGMA2_MAX) {
        F::neg_infinity()
    } else {
        -F::c(2.0) * sigma2.ln()
    }
}

/// log density (up to a constant) of the slab-multiplier prior, 1 plus an
/// exponential with rate [`OMEGA_RATE`].
pub fn log_omega_prior<F: Scalar>(omega: F) -> F {
    if omega < F::one() {
        F::neg_infinity()
    } else {
        -F::c(OMEGA_RATE) * (omega - F::one())
    }
}

/// Sum of coordinate log prior densities under the current inclusion bits.
pub fn selection_log_prior<F: Scalar>(theta: &ParamVector<F>, state: &SelectionState<F>) -> F {
    let mut acc = F::zero();
    for (i, &v) in theta.as_slice().iter().enumerate() {
        acc += spike_slab_log_prior(v, state.lambda[i], state.sigma2, state.omega);
    }
    acc
}

/// Draw a coordinate proposal and the log proposal-density correction it
/// contributes to the acceptance ratio (zero for the symmetric walk).
fn propose_coordinate<F: Scalar>(
    current: F,
    sd: F,
    kind: ThetaProposal,
    rng: &mut ChainRng,
) -> (F, F) {
    let z = F::std_normal(rng);
    match kind {
        ThetaProposal::RandomWalk => (current + z * sd, F::zero()),
        ThetaProposal::IndependentNormal => {
            let proposal = z * sd;
            let variance = sd * sd;
            (
                proposal,
                normal_logpdf0(current, variance) - normal_logpdf0(proposal, variance),
            )
        }
    }
}

/// One double Metropolis-Hastings step on flat coordinate `i`.
///
/// `row_model` must mirror `current`; on return it mirrors the returned
/// value. Consumes one normal, one `u64`, and one uniform from `rng`.
#[allow(clippy::too_many_arguments)]
fn dmh_coordinate_step<F: Scalar>(
    x_cells: &[u8],
    p: usize,
    i: usize,
    t_x_i: F,
    current: F,
    lambda_i: u8,
    sigma2: F,
    omega: F,
    sd: F,
    kind: ThetaProposal,
    sweeps: usize,
    row_model: &mut RowModel<F>,
    y_cells: &mut Vec<u8>,
    rng: &mut ChainRng,
) -> (F, bool) {
    let (proposal, log_proposal_diff) = propose_coordinate(current, sd, kind, rng);
    let aux_seed = rng.next_u64();

    y_cells.clear();
    y_cells.extend_from_slice(x_cells);
    row_model.set_coordinate(p, i, proposal);
    sweep_cells(y_cells, row_model, sweeps, aux_seed);

    let (j, k) = coordinate_items(p, i);
    let t_y = F::from_u64(pair_stat_cells(y_cells, p, j, k)).expect("count fits in scalar");

    let log_prior_diff = spike_slab_log_prior(proposal, lambda_i, sigma2, omega)
        - spike_slab_log_prior(current, lambda_i, sigma2, omega);
    let log_alpha = (proposal - current) * (t_x_i - t_y) + log_prior_diff + log_proposal_diff;

    if F::uniform01(rng).ln() < log_alpha {
        (proposal, true)
    } else {
        row_model.set_coordinate(p, i, current);
        (current, false)
    }
}

/// Double Metropolis-Hastings update of flat coordinate `i` against observed
/// data `x`, returning the new coordinate value and whether the proposal was
/// accepted.
pub fn dmh_update_coordinate<F: Scalar>(
    i: usize,
    state: &ChainRecord<F>,
    x: &ItemResponseMatrix,
    cfg: &SamplerConfig<F>,
    rng: &mut ChainRng,
) -> Result<(F, bool)> {
    cfg.validate()?;
    let q = num_params(x.p());
    if state.theta.p() != x.p() {
        return Err(Error::DimensionMismatch(format!(
            "parameters cover {} items, data has {}",
            state.theta.p(),
            x.p()
        )));
    }
    state.selection.validate(q)?;
    if i >= q {
        return Err(Error::DimensionMismatch(format!(
            "coordinate {i} out of range for q = {q}"
        )));
    }
    let sweeps = cfg.aux.sweeps.resolve(x.n())?;
    let mut row_model = RowModel::from_params(&state.theta);
    let mut y_cells = Vec::new();
    let t_x_i = F::from_u64(coordinate_statistic(x, i)).expect("count fits in scalar");
    Ok(dmh_coordinate_step(
        x.cells(),
        x.p(),
        i,
        t_x_i,
        state.theta.get(i),
        state.selection.lambda[i],
        state.selection.sigma2,
        state.selection.omega,
        cfg.proposal_sd_theta,
        cfg.theta_proposal,
        sweeps,
        &mut row_model,
        &mut y_cells,
        rng,
    ))
}

/// Bernoulli refresh of inclusion bit `i` from its full conditional given
/// the coordinate value and prior scales.
pub fn update_lambda_coordinate<F: Scalar>(
    i: usize,
    theta_i: F,
    state: &SelectionState<F>,
    rng: &mut ChainRng,
) -> u8 {
    debug_assert!(i < state.lambda.len());
    let prob = lambda_inclusion_probability(theta_i, state.sigma2, state.omega);
    u8::from(F::uniform01(rng) < prob)
}

/// Random-walk Metropolis step on `sigma2`; proposals outside the prior
/// support are rejected without consuming the acceptance uniform.
fn sigma2_step<F: Scalar>(
    theta: &ParamVector<F>,
    state: &SelectionState<F>,
    sd: F,
    rng: &mut ChainRng,
) -> (F, bool) {
    let current = state.sigma2;
    let proposal = current + F::std_normal(rng) * sd;
    if proposal < F::c(SIGMA2_MIN) || proposal > F::c(SIGMA2_MAX) {
        return (current, false);
    }
    let mut log_alpha = log_sigma2_prior(proposal) - log_sigma2_prior(current);
    for (i, &v) in theta.as_slice().iter().enumerate() {
        log_alpha += spike_slab_log_prior(v, state.lambda[i], proposal, state.omega)
            - spike_slab_log_prior(v, state.lambda[i], current, state.omega);
    }
    if F::uniform01(rng).ln() < log_alpha {
        (proposal, true)
    } else {
        (current, false)
    }
}

/// Random-walk Metropolis step on `omega`; proposals below 1 are rejected
/// without consuming the acceptance uniform.
fn omega_step<F: Scalar>(
    theta: &ParamVector<F>,
    state: &SelectionState<F>,
    sd: F,
    rng: &mut ChainRng,
) -> (F, bool) {
    let current = state.omega;
    let proposal = current + F::std_normal(rng) * sd;
    if proposal < F::one() {
        return (current, false);
    }
    let mut log_alpha = log_omega_prior(proposal) - log_omega_prior(current);
    for (i, &v) in theta.as_slice().iter().enumerate() {
        log_alpha += spike_slab_log_prior(v, state.lambda[i], state.sigma2, proposal)
            - spike_slab_log_prior(v, state.lambda[i], state.sigma2, current);
    }
    if F::uniform01(rng).ln() < log_alpha {
        (proposal, true)
    } else {
        (current, false)
    }
}

/// Random-walk Metropolis update of the base variance against its full
/// conditional, returning the new value.
pub fn update_sigma2<F: Scalar>(
    state: &SelectionState<F>,
    theta: &ParamVector<F>,
    cfg: &SamplerConfig<F>,
    rng: &mut ChainRng,
) -> F {
    sigma2_step(theta, state, cfg.proposal_sd_sigma2, rng).0
}

/// Random-walk Metropolis update of the slab multiplier against its full
/// conditional, returning the new value.
pub fn update_omega<F: Scalar>(
    state: &SelectionState<F>,
    theta: &ParamVector<F>,
    cfg: &SamplerConfig<F>,
    rng: &mut ChainRng,
) -> F {
    omega_step(theta, state, cfg.proposal_sd_omega, rng).0
}

/// Windowed acceptance-rate tuner for one random-walk scale.
#[derive(Clone, Debug)]
struct AdaptiveSd<F> {
    sd: F,
    proposed: u32,
    accepted: u32,
}

impl<F: Scalar> AdaptiveSd<F> {
    const WINDOW: u32 = 50;

    fn new(sd: F) -> Self {
        Self {
            sd,
            proposed: 0,
            accepted: 0,
        }
    }

    fn record(&mut self, accepted: bool) {
        self.proposed += 1;
        self.accepted += u32::from(accepted);
        if self.proposed == Self::WINDOW {
            let rate = self.accepted as f64 / self.proposed as f64;
            if rate < 0.15 {
                self.sd *= F::c(0.7);
            } else if rate > 0.5 {
                self.sd *= F::c(1.4);
            }
            self.sd = self.sd.max(F::c(1e-4)).min(F::c(50.0));
            self.proposed = 0;
            self.accepted = 0;
        }
    }
}

/// Everything a finished run reports besides the records themselves.
#[derive(Clone, Debug)]
pub struct ChainRun<F> {
    /// Post burn-in states in iteration order.
    pub records: Vec<ChainRecord<F>>,
    /// Outer iterations actually executed (burn-in included).
    pub iterations_run: usize,
    /// True when the MCSE stopping rule ended the run before `iterations`.
    pub stopped_early: bool,
    /// Post burn-in acceptance rate per coordinate.
    pub theta_acceptance: Vec<F>,
    pub sigma2_acceptance: F,
    pub omega_acceptance: F,
    /// Batch-means MCSE per coordinate, then `sigma2`, then `omega`;
    /// `None` when too few states were stored.
    pub mcse: Option<Vec<F>>,
}

/// Batch-means MCSE of every chain coordinate: the `q` parameter
/// coordinates in flat order, then `sigma2`, then `omega`.
pub fn chain_coordinate_mcse<F: Scalar>(records: &[ChainRecord<F>]) -> Result<Vec<F>> {
    if records.is_empty() {
        return Err(Error::SeriesTooShort { need: 4, got: 0 });
    }
    let q = records[0].theta.len();
    let mut series = Vec::with_capacity(records.len());
    let mut out = Vec::with_capacity(q + 2);
    for i in 0..q {
        series.clear();
        series.extend(records.iter().map(|r| r.theta.get(i)));
        out.push(batch_means_mcse(&series)?);
    }
    series.clear();
    series.extend(records.iter().map(|r| r.selection.sigma2));
    out.push(batch_means_mcse(&series)?);
    series.clear();
    series.extend(records.iter().map(|r| r.selection.omega));
    out.push(batch_means_mcse(&series)?);
    Ok(out)
}

/// Likelihood-ratio route of a run.
enum Route {
    /// Double Metropolis-Hastings with this many auxiliary sweeps.
    Auxiliary { sweeps: usize },
    /// Exact enumeration of the partition function (small item counts).
    Exact,
}

struct Runner<'a, F: Scalar> {
    x: &'a ItemResponseMatrix,
    cfg: &'a SamplerConfig<F>,
    route: Route,
    q: usize,
    theta: ParamVector<F>,
    state: SelectionState<F>,
    row_model: RowModel<F>,
    /// Observed sufficient statistic per coordinate.
    t_x: Vec<F>,
    y_cells: Vec<u8>,
    rng: ChainRng,
    sd_theta: Vec<AdaptiveSd<F>>,
    sd_sigma2: AdaptiveSd<F>,
    sd_omega: AdaptiveSd<F>,
    /// Cached per-row log partition at the current parameters (exact route).
    log_zrow: F,
    theta_accepts: Vec<u64>,
    sigma2_accepts: u64,
    omega_accepts: u64,
    kept_iterations: u64,
}

impl<'a, F: Scalar> Runner<'a, F> {
    fn new(x: &'a ItemResponseMatrix, cfg: &'a SamplerConfig<F>, route: Route) -> Result<Self> {
        cfg.validate()?;
        let p = x.p();
        let q = num_params(p);
        if q > cfg.max_params {
            return Err(Error::InvalidConfig(format!(
                "{p} items give q = {q} coordinates, above the configured max_params = {}; \
                 raise SamplerConfig.max_params if a chain of this size is intended",
                cfg.max_params
            )));
        }
        if let Route::Exact = route {
            if p > ENUMERATION_BOUND {
                return Err(Error::EnumerationBound {
                    items: p,
                    bound: ENUMERATION_BOUND,
                });
            }
        }
        if let Route::Auxiliary { sweeps } = route {
            debug_assert!(sweeps >= 1);
        }

        let mut rng = ChainRng::seed_from_u64(cfg.seed);
        // Start dispersed: coordinates uniform on (-5, 5), scales from their
        // priors, every coordinate included.
        let mut theta = ParamVector::zeros(p);
        for i in 0..q {
            theta.set(i, F::uniform01(&mut rng) * F::c(10.0) - F::c(5.0));
        }
        let sigma2 = (F::c(4.0) + F::uniform01(&mut rng) * F::c(96.0)).recip();
        let omega = F::one() - (F::one() - F::uniform01(&mut rng)).ln() / F::c(OMEGA_RATE);
        let state = SelectionState::all_included(q, sigma2, omega);

        let row_model = RowModel::from_params(&theta);
        let t_x: Vec<F> = (0..q)
            .map(|i| F::from_u64(coordinate_statistic(x, i)).expect("count fits in scalar"))
            .collect();
        let log_zrow = match route {
            Route::Exact => log_partition_exact_bounded(&theta, 1, ENUMERATION_BOUND)?,
            Route::Auxiliary { .. } => F::zero(),
        };

        Ok(Self {
            x,
            cfg,
            route,
            q,
            theta,
            state,
            row_model,
            t_x,
            y_cells: Vec::with_capacity(x.cells().len()),
            rng,
            sd_theta: vec![AdaptiveSd::new(cfg.proposal_sd_theta); q],
            sd_sigma2: AdaptiveSd::new(cfg.proposal_sd_sigma2),
            sd_omega: AdaptiveSd::new(cfg.proposal_sd_omega),
            log_zrow,
            theta_accepts: vec![0; q],
            sigma2_accepts: 0,
            omega_accepts: 0,
            kept_iterations: 0,
        })
    }

    fn theta_step(&mut self, i: usize) -> bool {
        let current = self.theta.get(i);
        let sd = self.sd_theta[i].sd;
        match self.route {
            Route::Auxiliary { sweeps } => {
                let (value, accepted) = dmh_coordinate_step(
                    self.x.cells(),
                    self.x.p(),
                    i,
                    self.t_x[i],
                    current,
                    self.state.lambda[i],
                    self.state.sigma2,
                    self.state.omega,
                    sd,
                    self.cfg.theta_proposal,
                    sweeps,
                    &mut self.row_model,
                    &mut self.y_cells,
                    &mut self.rng,
                );
                self.theta.set(i, value);
                accepted
            }
            Route::Exact => {
                let (proposal, log_proposal_diff) =
                    propose_coordinate(current, sd, self.cfg.theta_proposal, &mut self.rng);
                self.theta.set(i, proposal);
                let log_zrow_new = log_partition_exact_bounded(&self.theta, 1, ENUMERATION_BOUND)
                    .expect("bound checked at construction");
                let n = F::from_usize(self.x.n()).expect("row count fits in scalar");
                let log_prior_diff = spike_slab_log_prior(
                    proposal,
                    self.state.lambda[i],
                    self.state.sigma2,
                    self.state.omega,
                ) - spike_slab_log_prior(
                    current,
                    self.state.lambda[i],
                    self.state.sigma2,
                    self.state.omega,
                );
                let log_alpha = (proposal - current) * self.t_x[i]
                    - n * (log_zrow_new - self.log_zrow)
                    + log_prior_diff
                    + log_proposal_diff;
                if F::uniform01(&mut self.rng).ln() < log_alpha {
                    self.log_zrow = log_zrow_new;
                    true
                } else {
                    self.theta.set(i, current);
                    false
                }
            }
        }
    }

    fn lambda_step(&mut self, i: usize) {
        if i < self.x.p() && !self.cfg.select_beta {
            return;
        }
        let prob =
            lambda_inclusion_probability(self.theta.get(i), self.state.sigma2, self.state.omega);
        self.state.lambda[i] = u8::from(F::uniform01(&mut self.rng) < prob);
    }

    fn run(mut self) -> Result<ChainRun<F>> {
        let cfg = self.cfg;
        let mut records: Vec<ChainRecord<F>> = Vec::new();
        let mut writer = match (&cfg.checkpoint_path, cfg.checkpoint_every) {
            (Some(path), every) if every > 0 => Some(ChainWriter::create(path, self.x.p())?),
            _ => None,
        };

        let mut iterations_run = cfg.iterations;
        let mut stopped_early = false;
        for t in 0..cfg.iterations {
            let burning = t < cfg.burn_in;
            for i in 0..self.q {
                let accepted = self.theta_step(i);
                if burning {
                    if cfg.adapt_proposals {
                        self.sd_theta[i].record(accepted);
                    }
                } else {
                    self.theta_accepts[i] += u64::from(accepted);
                }
                self.lambda_step(i);
            }

            let (sigma2, s_accepted) =
                sigma2_step(&self.theta, &self.state, self.sd_sigma2.sd, &mut self.rng);
            self.state.sigma2 = sigma2;
            let (omega, w_accepted) =
                omega_step(&self.theta, &self.state, self.sd_omega.sd, &mut self.rng);
            self.state.omega = omega;
            if burning {
                if cfg.adapt_proposals {
                    self.sd_sigma2.record(s_accepted);
                    self.sd_omega.record(w_accepted);
                }
            } else {
                self.sigma2_accepts += u64::from(s_accepted);
                self.omega_accepts += u64::from(w_accepted);
                self.kept_iterations += 1;
            }

            if !burning {
                records.push(ChainRecord {
                    iter: t,
                    theta: self.theta.clone(),
                    selection: self.state.clone(),
                });
                if let Some(w) = writer.as_mut() {
                    w.append(records.last().expect("just pushed"))?;
                    if records.len().is_multiple_of(cfg.checkpoint_every) {
                        w.flush()?;
                    }
                }
                if records.len() >= 16 && records.len().is_multiple_of(cfg.mcse_check_every) {
                    let mcse = chain_coordinate_mcse(&records)?;
                    // The stopping rule covers the q parameter coordinates;
                    // sigma2 and omega are prior scales on their own (much
                    // larger) scale and are reported, not targeted.
                    let worst = mcse[..self.q].iter().copied().fold(F::zero(), F::max);
                    log::info!(
                        "iteration {} of {}: {} stored states, largest coordinate MCSE {worst} (target {})",
                        t + 1,
                        cfg.iterations,
                        records.len(),
                        cfg.mcse_target
                    );
                    if cfg.adaptive_stop && worst <= cfg.mcse_target {
                        log::info!(
                            "stopping at iteration {t}: all {} coordinate MCSEs at or below {}",
                            self.q,
                            cfg.mcse_target
                        );
                        iterations_run = t + 1;
                        stopped_early = true;
                        break;
                    }
                }
            }
        }
        if let Some(w) = writer.as_mut() {
            w.flush()?;
        }

        let kept = self.kept_iterations.max(1);
        let rate =
            |accepts: u64| F::from_u64(accepts).expect("fits") / F::from_u64(kept).expect("fits");
        let mcse = if records.len() >= 4 {
            Some(chain_coordinate_mcse(&records)?)
        } else {
            None
        };
        Ok(ChainRun {
            iterations_run,
            stopped_early,
            theta_acceptance: self.theta_accepts.iter().map(|&a| rate(a)).collect(),
            sigma2_acceptance: rate(self.sigma2_accepts),
            omega_acceptance: rate(self.omega_accepts),
            mcse,
            records,
        })
    }
}

/// Run the spike-and-slab double Metropolis-Hastings chain on a response
/// matrix. All randomness flows from `cfg.seed`, so equal inputs give
/// byte-identical output.
pub fn run_chain<F: Scalar>(x: &ItemResponseMatrix, cfg: &SamplerConfig<F>) -> Result<ChainRun<F>> {
    let sweeps = cfg.aux.sweeps.resolve(x.n())?;
    Runner::new(x, cfg, Route::Auxiliary { sweeps })?.run()
}

/// Run the same outer chain with exact likelihood ratios from the
/// enumerated partition function. Only available within the enumeration
/// bound; serves as the ground truth the auxiliary-data route is checked
/// against.
pub fn run_chain_exact<F: Scalar>(
    x: &ItemResponseMatrix,
    cfg: &SamplerConfig<F>,
) -> Result<ChainRun<F>> {
    Runner::new(x, cfg, Route::Exact)?.run()
}

/// Posterior network estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkEstimate<F> {
    /// Posterior means, with coordinates whose inclusion probability falls
    /// below one half zeroed out.
    pub theta_hat: ParamVector<F>,
    /// Posterior inclusion probability per coordinate.
    pub pip: Vec<F>,
    /// Sign pattern of the thresholded interaction estimates.
    pub signed_adjacency: SignedAdjacency,
}

/// Summarize stored records into a network estimate: coordinate-wise
/// posterior means and inclusion probabilities, with means zeroed where the
/// inclusion probability is strictly below one half, and the signed
/// adjacency read off the surviving interactions.
pub fn posterior_summary<F: Scalar>(records: &[ChainRecord<F>]) -> Result<NetworkEstimate<F>> {
    let first = records
        .first()
        .ok_or(Error::SeriesTooShort { need: 1, got: 0 })?;
    let p = first.theta.p();
    let q = first.theta.len();
    for r in records {
        if r.theta.p() != p || r.selection.lambda.len() != q {
            return Err(Error::DimensionMismatch(
                "records in a chain must share one parameter layout".into(),
            ));
        }
    }
    let len = F::from_usize(records.len()).expect("record count fits in scalar");
    let mut theta_hat = ParamVector::zeros(p);
    let mut pip = vec![F::zero(); q];
    for i in 0..q {
        let mut mean = F::zero();
        let mut included = F::zero();
        for r in records {
            mean += r.theta.get(i);
            included += F::from_u8(r.selection.lambda[i]).expect("bit fits in scalar");
        }
        mean /= len;
        included /= len;
        pip[i] = included;
        theta_hat.set(
            i,
            if included < F::c(0.5) {
                F::zero()
            } else {
                mean
            },
        );
    }
    let signed_adjacency = SignedAdjacency::from_gamma_signs(p, theta_hat.gamma())?;
    Ok(NetworkEstimate {
        theta_hat,
        pip,
        signed_adjacency,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inner::{sample_exact_rows, SweepCount};
    use crate::model::{sufficient_statistics, unnormalized_log_density};
    use approx::assert_relative_eq;

    fn normal_pdf0(x: f64, var: f64) -> f64 {
        (-x * x / (2.0 * var)).exp() / (std::f64::consts::TAU * var).sqrt()
    }

    #[test]
    fn inclusion_probability_matches_density_ratio() {
        // Oracle: evaluate both mixture component densities directly.
        for &(t, s2, w) in &[
            (0.0, 0.04, 3.0),
            (0.8, 0.1, 5.0),
            (-1.7, 0.25, 2.0),
            (0.3, 0.01, 50.0),
        ] {
            let slab = normal_pdf0(t, w * w * s2);
            let spike = normal_pdf0(t, s2);
            let expected = slab / (slab + spike);
            let got = lambda_inclusion_probability(t, s2, w);
            assert_relative_eq!(got, expected, epsilon = 1e-12);
        }
        // At t = 0 the ratio collapses to 1 / (1 + omega).
        for &w in &[1.5, 4.0, 100.0] {
            assert_relative_eq!(
                lambda_inclusion_probability(0.0, 0.1, w),
                1.0 / (1.0 + w),
                epsilon = 1e-12
            );
        }
        // Symmetric in the sign of t, increasing in |t|.
        assert_eq!(
            lambda_inclusion_probability(0.9, 0.1, 4.0),
            lambda_inclusion_probability(-0.9, 0.1, 4.0)
        );
        assert!(
            lambda_inclusion_probability(1.5, 0.1, 4.0)
                > lambda_inclusion_probability(0.5, 0.1, 4.0)
        );
    }

    #[test]
    fn spike_slab_prior_selects_component() {
        let (t, s2, w) = (0.6, 0.09, 4.0);
        assert_relative_eq!(
            spike_slab_log_prior(t, 1, s2, w),
            normal_pdf0(t, w * w * s2).ln(),
            epsilon = 1e-12
        );
        assert_relative_eq!(
            spike_slab_log_prior(t, 0, s2, w),
            normal_pdf0(t, s2).ln(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn scale_priors_enforce_support() {
        assert_eq!(log_sigma2_prior(0.009), f64::NEG_INFINITY);
        assert_eq!(log_sigma2_prior(0.251), f64::NEG_INFINITY);
        // Within support the density is proportional to sigma2^-2.
        let ratio = log_sigma2_prior(0.02) - log_sigma2_prior(0.2);
        assert_relative_eq!(ratio, -2.0 * (0.02f64 / 0.2).ln(), epsilon = 1e-12);

        assert_eq!(log_omega_prior(0.999), f64::NEG_INFINITY);
        let ratio = log_omega_prior(7.0) - log_omega_prior(3.0);
        assert_relative_eq!(ratio, -OMEGA_RATE * 4.0, epsilon = 1e-12);
    }

    // Simpson integration on a uniform grid; panics on odd interval counts.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
        assert!(intervals.is_multiple_of(2));
        let h = (b - a) / intervals as f64;
        let mut acc = f(a) + f(b);
        for i in 1..intervals {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(a + i as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn sigma2_update_targets_its_full_conditional() {
        // Oracle: posterior E[sigma2 | theta, lambda, omega] by quadrature
        // of N(t; 0, v(sigma2)) * sigma2^-2 over the support.
        let theta = ParamVector::from_parts(vec![0.9, -0.4], vec![0.2]).unwrap();
        let state = SelectionState {
            lambda: vec![1, 0, 1],
            sigma2: 0.1,
            omega: 4.0,
        };
        let density = |s2: f64| {
            let mut d = s2.powi(-2);
            for (i, &t) in theta.as_slice().iter().enumerate() {
                let var = if state.lambda[i] == 1 { 16.0 * s2 } else { s2 };
                d *= normal_pdf0(t, var);
            }
            d
        };
        let z = simpson(density, SIGMA2_MIN, SIGMA2_MAX, 4000);
        let expected = simpson(|s| s * density(s), SIGMA2_MIN, SIGMA2_MAX, 4000) / z;

        let mut rng = ChainRng::seed_from_u64(5);
        let mut s = state.clone();
        let mut sum = 0.0;
        let iters = 200_000;
        for _ in 0..iters {
            let (next, _) = sigma2_step(&theta, &s, 0.05, &mut rng);
            s.sigma2 = next;
            sum += next;
        }
        let mean = sum / iters as f64;
        assert!(
            (mean - expected).abs() < 0.002,
            "chain mean {mean}, quadrature {expected}"
        );
    }

    #[test]
    fn omega_update_targets_its_full_conditional() {
        // Oracle: posterior E[omega | theta, lambda, sigma2] by quadrature.
        // Only slab coordinates involve omega; spike terms cancel, but the
        // oracle keeps them for fidelity to the sampled conditional.
        let theta = ParamVector::from_parts(vec![1.1, 0.3], vec![-0.8]).unwrap();
        let lambda = [1u8, 0, 1];
        let sigma2 = 0.05;
        let density = |w: f64| {
            let mut d = (-OMEGA_RATE * (w - 1.0)).exp();
            for (i, &t) in theta.as_slice().iter().enumerate() {
                let var = if lambda[i] == 1 {
                    w * w * sigma2
                } else {
                    sigma2
                };
                d *= normal_pdf0(t, var);
            }
            d
        };
        // The integrand decays like w^-2 e^{-w/100}; [1, 4000] captures the
        // mass far beyond the quadrature tolerance used here.
        let z = simpson(density, 1.0, 4000.0, 400_000);
        let expected = simpson(|w| w * density(w), 1.0, 4000.0, 400_000) / z;

        let mut rng = ChainRng::seed_from_u64(6);
        let mut s = SelectionState {
            lambda: lambda.to_vec(),
            sigma2,
            omega: 5.0,
        };
        let mut sum = 0.0;
        let iters = 400_000;
        for _ in 0..iters {
            let (next, _) = omega_step(&theta, &s, 4.0, &mut rng);
            s.omega = next;
            sum += next;
        }
        let mean = sum / iters as f64;
        assert!(
            (mean - expected).abs() < 0.12 * expected,
            "chain mean {mean}, quadrature {expected}"
        );
    }

    #[test]
    fn coordinate_ratio_equals_full_likelihood_ratio() {
        // The auxiliary-route acceptance ratio uses only coordinate i's
        // statistic. Oracle: evaluate the full likelihood ratio with
        // explicit partition functions for both data sets.
        let p = 3;
        let mut rng = ChainRng::seed_from_u64(8);
        for trial in 0..50 {
            let mut theta = ParamVector::<f64>::zeros(p);
            for i in 0..theta.len() {
                theta.set(i, f64::uniform01(&mut rng) * 2.0 - 1.0);
            }
            let x = sample_exact_rows(&theta, 20, 100 + trial).unwrap();
            let y = sample_exact_rows(&theta, 20, 200 + trial).unwrap();
            let sx = sufficient_statistics(&x);
            let sy = sufficient_statistics(&y);
            let i = (trial % theta.len() as u64) as usize;
            let delta = f64::uniform01(&mut rng) * 2.0 - 1.0;
            let mut theta_new = theta.clone();
            theta_new.set(i, theta.get(i) + delta);

            let coordinate = delta * (sx.get(i) as f64 - sy.get(i) as f64);

            let log_f = |stats, th: &ParamVector<f64>| {
                unnormalized_log_density(stats, th).unwrap() - log_partition_exact(th, 20).unwrap()
            };
            let full = log_f(&sx, &theta_new) + log_f(&sy, &theta)
                - log_f(&sx, &theta)
                - log_f(&sy, &theta_new);
            assert!(
                (coordinate - full).abs() < 1e-10,
                "trial {trial}: coordinate {coordinate}, full {full}"
            );
        }
    }

    use crate::model::log_partition_exact;

    fn toy_config(iterations: usize, burn_in: usize, seed: u64) -> SamplerConfig<f64> {
        SamplerConfig {
            iterations,
            burn_in,
            aux: AuxChainConfig {
                sweeps: SweepCount::Fixed(10),
                ..AuxChainConfig::default()
            },
            seed,
            ..SamplerConfig::default()
        }
    }

    #[test]
    fn chains_are_reproducible_by_seed() {
        let theta = ParamVector::from_parts(vec![0.4, -0.2, 0.0], vec![0.9, 0.0, -0.7]).unwrap();
        let x = sample_exact_rows(&theta, 40, 3).unwrap();
        let cfg = toy_config(60, 20, 11);
        let a = run_chain(&x, &cfg).unwrap();
        let b = run_chain(&x, &cfg).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a.iterations_run, 60);
        assert!(!a.stopped_early);
        let c = run_chain(&x, &toy_config(60, 20, 12)).unwrap();
        assert_ne!(a.records, c.records);
    }

    #[test]
    fn stored_records_cover_post_burn_iterations() {
        let theta = ParamVector::<f64>::zeros(2);
        let x = sample_exact_rows(&theta, 25, 4).unwrap();
        let cfg = toy_config(30, 10, 5);
        let run = run_chain(&x, &cfg).unwrap();
        assert_eq!(run.records.len(), 20);
        assert_eq!(run.records[0].iter, 10);
        assert_eq!(run.records.last().unwrap().iter, 29);
        assert_eq!(run.theta_acceptance.len(), 3);
        for &r in &run.theta_acceptance {
            assert!((0.0..=1.0).contains(&r));
        }
        for record in &run.records {
            assert!(record.selection.sigma2 >= SIGMA2_MIN - 1e-12);
            assert!(record.selection.sigma2 <= SIGMA2_MAX + 1e-12);
            assert!(record.selection.omega >= 1.0);
        }
    }

    #[test]
    fn beta_selection_can_be_pinned() {
        let theta = ParamVector::<f64>::zeros(3);
        let x = sample_exact_rows(&theta, 30, 9).unwrap();
        let mut cfg = toy_config(40, 10, 7);
        cfg.select_beta = false;
        let run = run_chain(&x, &cfg).unwrap();
        for record in &run.records {
            assert_eq!(&record.selection.lambda[..3], &[1, 1, 1]);
        }
        // Interactions still toggle somewhere along the chain.
        let toggles = run
            .records
            .iter()
            .any(|r| r.selection.lambda[3..].contains(&0));
        assert!(toggles);
    }

    #[test]
    fn exact_route_rejects_large_item_sets() {
        let x = crate::inner::random_matrix(5, 21, 0).unwrap();
        let cfg = toy_config(10, 2, 0);
        assert!(matches!(
            run_chain_exact(&x, &cfg),
            Err(Error::EnumerationBound { .. })
        ));
    }

    #[test]
    fn config_validation_catches_misuse() {
        let base = SamplerConfig::<f64>::default();
        let cfg = SamplerConfig {
            burn_in: base.iterations,
            ..base.clone()
        };
        assert!(cfg.validate().is_err());
        let cfg = SamplerConfig {
            proposal_sd_theta: 0.0,
            ..base.clone()
        };
        assert!(cfg.validate().is_err());
        let cfg = SamplerConfig {
            checkpoint_every: 10,
            ..base.clone()
        };
        assert!(cfg.validate().is_err());
        let x = crate::inner::random_matrix(5, 40, 0).unwrap();
        let cfg = SamplerConfig {
            max_params: 100,
            ..base
        };
        assert!(matches!(run_chain(&x, &cfg), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn dmh_and_exact_chains_agree_on_a_small_posterior() {
        // Both routes target (approximately) the same posterior; with a
        // modest data set their coordinate means should agree loosely. The
        // tight-tolerance comparison lives in the acceptance suite.
        let truth = ParamVector::from_parts(vec![0.8, -0.8], vec![1.2]).unwrap();
        let x = sample_exact_rows(&truth, 60, 17).unwrap();
        let mut cfg = toy_config(4000, 1000, 19);
        cfg.aux.sweeps = SweepCount::SampleSize;
        let dmh = run_chain(&x, &cfg).unwrap();
        let exact = run_chain_exact(&x, &cfg).unwrap();
        let sum_dmh = posterior_summary(&dmh.records).unwrap();
        let sum_exact = posterior_summary(&exact.records).unwrap();
        for i in 0..3 {
            let a: f64 =
                dmh.records.iter().map(|r| r.theta.get(i)).sum::<f64>() / dmh.records.len() as f64;
            let b: f64 = exact.records.iter().map(|r| r.theta.get(i)).sum::<f64>()
                / exact.records.len() as f64;
            assert!(
                (a - b).abs() < 0.35,
                "coordinate {i}: auxiliary route mean {a}, exact route mean {b}"
            );
        }
        // Inclusion probabilities agree on scale as well.
        for i in 0..3 {
            assert!(
                (sum_dmh.pip[i] - sum_exact.pip[i]).abs() < 0.3,
                "coordinate {i}: pips {} vs {}",
                sum_dmh.pip[i],
                sum_exact.pip[i]
            );
        }
    }

    #[test]
    fn independent_proposal_targets_the_same_posterior() {
        // The independence proposal needs a proposal-density correction in
        // the acceptance ratio; without it the chain's stationary law would
        // be tilted toward the proposal's center. Both proposal shapes must
        // therefore reproduce the same posterior means on the exact route.
        let truth = ParamVector::from_parts(vec![0.8, -0.6], vec![1.0]).unwrap();
        let x = sample_exact_rows(&truth, 70, 29).unwrap();
        let mut walk_cfg = toy_config(12_000, 2_000, 31);
        walk_cfg.adapt_proposals = false;
        let mut ind_cfg = walk_cfg.clone();
        ind_cfg.theta_proposal = ThetaProposal::IndependentNormal;
        ind_cfg.proposal_sd_theta = 0.6;
        let walk = run_chain_exact(&x, &walk_cfg).unwrap();
        let ind = run_chain_exact(&x, &ind_cfg).unwrap();
        for i in 0..3 {
            let a: f64 = walk.records.iter().map(|r| r.theta.get(i)).sum::<f64>()
                / walk.records.len() as f64;
            let b: f64 =
                ind.records.iter().map(|r| r.theta.get(i)).sum::<f64>() / ind.records.len() as f64;
            assert!(
                (a - b).abs() < 0.12,
                "coordinate {i}: walk mean {a}, independent mean {b}"
            );
        }
    }

    #[test]
    fn standalone_updates_validate_inputs() {
        let x = crate::inner::random_matrix(10, 3, 1).unwrap();
        let record = ChainRecord {
            iter: 0,
            theta: ParamVector::<f64>::zeros(3),
            selection: SelectionState::all_included(6, 0.1, 4.0),
        };
        let cfg = SamplerConfig::<f64>::default();
        let mut rng = ChainRng::seed_from_u64(0);
        assert!(dmh_update_coordinate(6, &record, &x, &cfg, &mut rng).is_err());
        let bad = ChainRecord {
            theta: ParamVector::<f64>::zeros(4),
            ..record.clone()
        };
        assert!(dmh_update_coordinate(0, &bad, &x, &cfg, &mut rng).is_err());
        let (value, accepted) = dmh_update_coordinate(0, &record, &x, &cfg, &mut rng).unwrap();
        if !accepted {
            assert_eq!(value, 0.0);
        }
    }

    #[test]
    fn posterior_summary_thresholds_on_inclusion() {
        // Four records over p = 2 (q = 3), hand-built:
        //   coordinate 0: always included, mean 0.5
        //   coordinate 1: included half the time (pip = 0.5, kept)
        //   coordinate 2: included once (pip = 0.25, zeroed)
        let make = |t0: f64, t1: f64, t2: f64, l: [u8; 3]| ChainRecord {
            iter: 0,
            theta: ParamVector::from_parts(vec![t0, t1], vec![t2]).unwrap(),
            selection: SelectionState {
                lambda: l.to_vec(),
                sigma2: 0.1,
                omega: 4.0,
            },
        };
        let records = vec![
            make(0.2, -1.0, -0.5, [1, 1, 1]),
            make(0.4, -1.2, 0.1, [1, 0, 0]),
            make(0.6, -0.8, 0.2, [1, 1, 0]),
            make(0.8, -1.0, 0.3, [1, 0, 0]),
        ];
        let est = posterior_summary(&records).unwrap();
        assert_relative_eq!(est.pip[0], 1.0);
        assert_relative_eq!(est.pip[1], 0.5);
        assert_relative_eq!(est.pip[2], 0.25);
        assert_relative_eq!(est.theta_hat.get(0), 0.5, epsilon = 1e-12);
        assert_relative_eq!(est.theta_hat.get(1), -1.0, epsilon = 1e-12);
        assert_eq!(est.theta_hat.get(2), 0.0);
        // gamma_01 was zeroed, so the adjacency is empty.
        assert_eq!(est.signed_adjacency.get(0, 1), 0);

        assert!(posterior_summary::<f64>(&[]).is_err());
    }

    #[test]
    fn checkpointing_writes_a_readable_chain() {
        let dir = std::env::temp_dir().join("itemnet-sampler-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("checkpoint.jsonl");
        let theta = ParamVector::<f64>::zeros(2);
        let x = sample_exact_rows(&theta, 20, 21).unwrap();
        let mut cfg = toy_config(25, 5, 23);
        cfg.checkpoint_every = 7;
        cfg.checkpoint_path = Some(path.clone());
        let run = run_chain(&x, &cfg).unwrap();
        let (header, stored) = read_chain_file::<f64>(&path).unwrap();
        assert_eq!(header.p, 2);
        assert_eq!(stored, run.records);
        std::fs::remove_file(&path).unwrap();
    }
}
