//! Convergence and model-fit assessment.
//!
//! * [`batch_means_mcse`]: Monte Carlo standard error of a chain mean by
//!   the batch-means method.
//! * [`posterior_predictive_pvalues`] / [`point_predictive_pvalues`]: per
//!   sufficient statistic, the share of datasets simulated from sampled (or
//!   fixed) parameters whose statistic strictly exceeds the observed one.
//!   Values near 0 or 1 flag statistics the fitted model cannot reproduce.
//! * [`adjacency_rmse`] / [`pvalue_rmse`]: the error summaries used to
//!   compare estimators, implemented exactly as defined (adjacency error
//!   averages over all ordered pairs, diagonal included).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::inner::{random_matrix, sample_exact_rows_bounded, sweep_cells, SweepCount};
use crate::model::{
    sufficient_statistics, ItemResponseMatrix, ParamVector, RowModel, ENUMERATION_BOUND,
};
use crate::rng::derive_seed;
use crate::sampler::ChainRecord;
use crate::scalar::Scalar;
use crate::{Error, Result};

/// Configuration of a posterior (or point) predictive check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PppConfig {
    /// Number of simulated datasets (thinned evenly from the records).
    pub num_draws: usize,
    /// Gibbs sweeps per simulated dataset on the sweep route.
    pub sim_sweeps: SweepCount,
    /// Simulation route; `Auto` uses exact pattern enumeration when the
    /// item count allows it and Gibbs sweeps otherwise.
    pub mode: PppMode,
    pub seed: u64,
    /// Largest item count for the exact route.
    pub enumeration_bound: usize,
}

impl Default for PppConfig {
    fn default() -> Self {
        Self {
            num_draws: 1000,
            sim_sweeps: SweepCount::SampleSize,
            mode: PppMode::Auto,
            seed: 0,
            enumeration_bound: ENUMERATION_BOUND,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PppMode {
    Auto,
    Exact,
    Sweeps,
}

impl PppConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_draws == 0 {
            return Err(Error::InvalidConfig("num_draws must be positive".into()));
        }
        if matches!(self.sim_sweeps, SweepCount::Fixed(0)) {
            return Err(Error::InvalidConfig("sim_sweeps must be positive".into()));
        }
        Ok(())
    }

    fn use_exact(&self, p: usize) -> Result<bool> {
        match self.mode {
            PppMode::Auto => Ok(p <= self.enumeration_bound),
            PppMode::Sweeps => Ok(false),
            PppMode::Exact => {
                if p > self.enumeration_bound {
                    Err(Error::EnumerationBound {
                        items: p,
                        bound: self.enumeration_bound,
                    })
                } else {
                    Ok(true)
                }
            }
        }
    }
}

/// Monte Carlo standard error of the series mean by batch means: the series
/// is cut into `floor(sqrt(L))` equal batches (trailing remainder dropped)
/// and the batch-mean standard deviation is scaled by the square root of
/// the batch count.
pub fn batch_means_mcse<F: Scalar>(series: &[F]) -> Result<F> {
    let len = series.len();
    if len < 4 {
        return Err(Error::SeriesTooShort { need: 4, got: len });
    }
    let batches = (len as f64).sqrt().floor() as usize;
    let batch_size = len / batches;
    let used = batches * batch_size;
    let mut means = Vec::with_capacity(batches);
    for b in 0..batches {
        let mut acc = F::zero();
        for &v in &series[b * batch_size..(b + 1) * batch_size] {
            acc += v;
        }
        means.push(acc / F::from_usize(batch_size).expect("batch size fits in scalar"));
    }
    debug_assert_eq!(used, batches * batch_size);
    let b_count = F::from_usize(batches).expect("batch count fits in scalar");
    let grand = means.iter().copied().sum::<F>() / b_count;
    let mut var = F::zero();
    for &m in &means {
        let d = m - grand;
        var += d * d;
    }
    var /= b_count - F::one();
    Ok((var / b_count).sqrt())
}

/// Evenly spaced indices into a series of length `len`, first and last
/// preserved. `draws >= len` keeps everything.
fn thin_indices(len: usize, draws: usize) -> Vec<usize> {
    debug_assert!(len >= 1 && draws >= 1);
    if draws >= len {
        return (0..len).collect();
    }
    if draws == 1 {
        return vec![len - 1];
    }
    (0..draws)
        .map(|t| (t as f64 * (len - 1) as f64 / (draws - 1) as f64).round() as usize)
        .collect()
}

/// The shared simulate-and-compare core of both predictive routes.
fn predictive_pvalues<F: Scalar>(
    thetas: &[&ParamVector<F>],
    x: &ItemResponseMatrix,
    cfg: &PppConfig,
) -> Result<Vec<F>> {
    let p = x.p();
    let n = x.n();
    let exact = cfg.use_exact(p)?;
    let sweeps = cfg.sim_sweeps.resolve(n)?;
    let stats_x = sufficient_statistics(x);
    let q = thetas[0].len();

    let exceed: Vec<u64> = thetas
        .par_iter()
        .enumerate()
        .map(|(t, theta)| {
            let draw_seed = derive_seed(cfg.seed, t as u64);
            let y = if exact {
                sample_exact_rows_bounded(theta, n, draw_seed, cfg.enumeration_bound)
                    .expect("bound checked before the draw loop")
            } else {
                let mut y = random_matrix(n, p, derive_seed(draw_seed, 0))
                    .expect("shape validated by the observed matrix");
                let model = RowModel::from_params(theta);
                sweep_cells(y.cells_mut(), &model, sweeps, derive_seed(draw_seed, 1));
                y
            };
            let stats_y = sufficient_statistics(&y);
            (0..q)
                .map(|i| u64::from(stats_y.get(i) > stats_x.get(i)))
                .collect::<Vec<u64>>()
        })
        .reduce(
            || vec![0u64; q],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );

    let draws = F::from_usize(thetas.len()).expect("draw count fits in scalar");
    Ok(exceed
        .into_iter()
        .map(|c| F::from_u64(c).expect("count fits in scalar") / draws)
        .collect())
}

/// Posterior predictive p-value per sufficient statistic: thin the records
/// to `cfg.num_draws` evenly spaced states, simulate one dataset per
/// retained state, and report the share whose statistic strictly exceeds
/// the observed one (ties count as non-exceedance).
pub fn posterior_predictive_pvalues<F: Scalar>(
    records: &[ChainRecord<F>],
    x: &ItemResponseMatrix,
    cfg: &PppConfig,
) -> Result<Vec<F>> {
    cfg.validate()?;
    let first = records
        .first()
        .ok_or(Error::SeriesTooShort { need: 1, got: 0 })?;
    if first.theta.p() != x.p() {
        return Err(Error::DimensionMismatch(format!(
            "records cover {} items, data has {}",
            first.theta.p(),
            x.p()
        )));
    }
    if records.len() < cfg.num_draws {
        log::warn!(
            "{} records for {} requested draws; using every record once",
            records.len(),
            cfg.num_draws
        );
    }
    let indices = thin_indices(records.len(), cfg.num_draws);
    let thetas: Vec<&ParamVector<F>> = indices.iter().map(|&i| &records[i].theta).collect();
    predictive_pvalues(&thetas, x, cfg)
}

/// Predictive p-values at a single parameter vector: every draw simulates
/// from the same point estimate.
pub fn point_predictive_pvalues<F: Scalar>(
    theta: &ParamVector<F>,
    x: &ItemResponseMatrix,
    cfg: &PppConfig,
) -> Result<Vec<F>> {
    cfg.validate()?;
    if theta.p() != x.p() {
        return Err(Error::DimensionMismatch(format!(
            "parameters cover {} items, data has {}",
            theta.p(),
            x.p()
        )));
    }
    let thetas: Vec<&ParamVector<F>> = std::iter::repeat_n(theta, cfg.num_draws).collect();
    predictive_pvalues(&thetas, x, cfg)
}

/// Root mean square difference between two equally sized entry buffers,
/// averaging over every position (for adjacency matrices: all `p * p`
/// ordered pairs, diagonal included).
pub fn adjacency_rmse(estimate: &[i8], truth: &[i8]) -> Result<f64> {
    if estimate.is_empty() {
        return Err(Error::InvalidData("empty adjacency".into()));
    }
    if estimate.len() != truth.len() {
        return Err(Error::DimensionMismatch(format!(
            "estimate has {} entries, truth has {}",
            estimate.len(),
            truth.len()
        )));
    }
    let sum: f64 = estimate
        .iter()
        .zip(truth)
        .map(|(&a, &b)| {
            let d = (a - b) as f64;
            d * d
        })
        .sum();
    Ok((sum / estimate.len() as f64).sqrt())
}

/// Root mean square deviation of predictive p-values from one half, over a
/// stack of replicate p-value vectors.
pub fn pvalue_rmse<F: Scalar>(pvals: &[Vec<F>]) -> Result<F> {
    if pvals.is_empty() || pvals[0].is_empty() {
        return Err(Error::InvalidData("empty p-value matrix".into()));
    }
    let width = pvals[0].len();
    let mut acc = F::zero();
    for row in pvals {
        if row.len() != width {
            return Err(Error::DimensionMismatch(
                "replicate p-value vectors must share one length".into(),
            ));
        }
        for &v in row {
            let d = v - F::c(0.5);
            acc += d * d;
        }
    }
    let count = F::from_usize(pvals.len() * width).expect("cell count fits in scalar");
    Ok((acc / count).sqrt())
}
