//! Binary item-response data and the pairwise item network model.
//!
//! A response matrix `x` holds `n` respondents by `p` binary items. The
//! network model gives a response row `z` in `{0,1}^p` unnormalized weight
//!
//! ```text
//! exp( sum_j beta_j z_j + sum_{j<k} gamma_jk z_j z_k )
//! ```
//!
//! with main effects `beta` and pairwise interactions `gamma`. Rows are
//! independent, so the full-data log density is linear in the sufficient
//! statistics (per-item counts and per-pair co-occurrence counts) and the
//! log partition function is `n` times the single-row log sum over all
//! `2^p` patterns. Enumeration of that sum is exact and fast for small `p`
//! and is gated by [`ENUMERATION_BOUND`] by default.
//!
//! Parameters are stored flat: coordinates `0..p` are `beta`, coordinates
//! `p..p + p(p-1)/2` are `gamma` in lexicographic pair order `(0,1), (0,2),
//! ..., (p-2,p-1)`.

use serde::{Deserialize, Serialize};

use crate::scalar::{log_sum_exp, logistic, Scalar};
use crate::{Error, Result};

/// Largest item count for which the exact-enumeration routines run by
/// default: `2^20` patterns is about a million weights, still sub-second.
pub const ENUMERATION_BOUND: usize = 20;

/// Number of model parameters for `p` items: `p` main effects plus one
/// interaction per unordered item pair.
pub fn num_params(p: usize) -> usize {
    p + p * (p - 1) / 2
}

/// Position of interaction `(j, k)`, `j < k`, within the gamma block.
///
/// Pairs are ordered lexicographically, so the gamma block reads
/// `(0,1), (0,2), ..., (0,p-1), (1,2), ..., (p-2,p-1)`.
pub fn pair_index(p: usize, j: usize, k: usize) -> usize {
    debug_assert!(j < k && k < p, "pair index needs j < k < p");
    j * p - j * (j + 1) / 2 + (k - j - 1)
}

/// Inverse of [`pair_index`]: the `(j, k)` pair, `j < k`, at a gamma-block
/// position.
pub fn pair_from_index(p: usize, mut idx: usize) -> (usize, usize) {
    debug_assert!(idx < p * (p - 1) / 2, "pair position out of range");
    let mut j = 0;
    loop {
        let row_len = p - j - 1;
        if idx < row_len {
            return (j, j + 1 + idx);
        }
        idx -= row_len;
        j += 1;
    }
}

/// An `n` by `p` matrix of binary item responses, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemResponseMatrix {
    n: usize,
    p: usize,
    cells: Vec<u8>,
}

impl ItemResponseMatrix {
    /// Build from a flat row-major cell buffer. Every cell must be 0 or 1,
    /// with at least one respondent and at least two items.
    pub fn from_flat(n: usize, p: usize, cells: Vec<u8>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidData("need at least one respondent".into()));
        }
        if p < 2 {
            return Err(Error::InvalidData(
                "need at least two items to define a network".into(),
            ));
        }
        if cells.len() != n * p {
            return Err(Error::DimensionMismatch(format!(
                "expected {n} x {p} = {} cells, got {}",
                n * p,
                cells.len()
            )));
        }
        if let Some(pos) = cells.iter().position(|&c| c > 1) {
            return Err(Error::InvalidData(format!(
                "cell at row {}, column {} is {}, expected 0 or 1",
                pos / p,
                pos % p,
                cells[pos]
            )));
        }
        Ok(Self { n, p, cells })
    }

    /// Build from per-respondent rows, which must all have equal length.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidData("need at least one respondent".into()));
        }
        let p = rows[0].len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != p {
                return Err(Error::InvalidData(format!(
                    "row {} has {} items but row 0 has {p}",
                    i,
                    row.len()
                )));
            }
        }
        let mut cells = Vec::with_capacity(rows.len() * p);
        for row in rows {
            cells.extend_from_slice(row);
        }
        Self::from_flat(rows.len(), p, cells)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.cells[i * self.p + j]
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.cells[i * self.p..(i + 1) * self.p]
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub(crate) fn cells_mut(&mut self) -> &mut [u8] {
        &mut self.cells
    }
}

/// Flat parameter vector for a `p`-item network: `p` main effects followed
/// by `p(p-1)/2` interactions in lexicographic pair order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamVector<F> {
    p: usize,
    values: Vec<F>,
}

impl<F: Scalar> ParamVector<F> {
    /// All-zero parameters for `p` items.
    pub fn zeros(p: usize) -> Self {
        Self {
            p,
            values: vec![F::zero(); num_params(p)],
        }
    }

    /// Assemble from separate main-effect and interaction blocks.
    pub fn from_parts(beta: Vec<F>, gamma: Vec<F>) -> Result<Self> {
        let p = beta.len();
        if gamma.len() != p * (p - 1) / 2 {
            return Err(Error::DimensionMismatch(format!(
                "{} main effects need {} interactions, got {}",
                p,
                p * (p - 1) / 2,
                gamma.len()
            )));
        }
        let mut values = beta;
        values.extend(gamma);
        Ok(Self { p, values })
    }

    /// Reassemble from a flat coordinate vector of length `num_params(p)`.
    pub fn from_flat(p: usize, values: Vec<F>) -> Result<Self> {
        if values.len() != num_params(p) {
            return Err(Error::DimensionMismatch(format!(
                "{} items need {} coordinates, got {}",
                p,
                num_params(p),
                values.len()
            )));
        }
        Ok(Self { p, values })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Total coordinate count `p + p(p-1)/2`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize) -> F {
        self.values[i]
    }

    pub fn set(&mut self, i: usize, value: F) {
        self.values[i] = value;
    }

    /// Main-effect block, length `p`.
    pub fn beta(&self) -> &[F] {
        &self.values[..self.p]
    }

    /// Interaction block in lexicographic pair order, length `p(p-1)/2`.
    pub fn gamma(&self) -> &[F] {
        &self.values[self.p..]
    }

    /// Interaction weight between two distinct items, in either order.
    pub fn gamma_between(&self, j: usize, k: usize) -> F {
        let (a, b) = if j < k { (j, k) } else { (k, j) };
        self.values[self.p + pair_index(self.p, a, b)]
    }

    pub fn as_slice(&self) -> &[F] {
        &self.values
    }

    /// The items covered by flat coordinate `i`: a main-effect coordinate
    /// yields `(j, j)`, an interaction coordinate its pair `(j, k)`.
    pub fn coordinate_items(&self, i: usize) -> (usize, usize) {
        coordinate_items(self.p, i)
    }
}

/// Sufficient statistics of a response matrix: per-item response counts and
/// per-pair co-occurrence counts, in the same coordinate order as
/// [`ParamVector`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuffStats {
    p: usize,
    n: usize,
    item_counts: Vec<u64>,
    pair_counts: Vec<u64>,
}

impl SuffStats {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Count for flat coordinate `i` (item count below `p`, pair count
    /// above).
    pub fn get(&self, i: usize) -> u64 {
        if i < self.p {
            self.item_counts[i]
        } else {
            self.pair_counts[i - self.p]
        }
    }

    pub fn item_counts(&self) -> &[u64] {
        &self.item_counts
    }

    pub fn pair_counts(&self) -> &[u64] {
        &self.pair_counts
    }

    /// All counts as scalars, in flat coordinate order.
    pub fn to_vec<F: Scalar>(&self) -> Vec<F> {
        self.item_counts
            .iter()
            .chain(self.pair_counts.iter())
            .map(|&c| F::from_u64(c).expect("count fits in scalar"))
            .collect()
    }
}

/// The items covered by flat coordinate `i` of a `p`-item parameter vector:
/// `(j, j)` for a main effect, the pair `(j, k)` for an interaction.
pub fn coordinate_items(p: usize, i: usize) -> (usize, usize) {
    if i < p {
        (i, i)
    } else {
        pair_from_index(p, i - p)
    }
}

/// Count of rows in a flat cell buffer with items `j` and `k` both 1;
/// `j == k` counts a single item.
pub(crate) fn pair_stat_cells(cells: &[u8], p: usize, j: usize, k: usize) -> u64 {
    cells
        .chunks_exact(p)
        .filter(|row| row[j] == 1 && row[k] == 1)
        .count() as u64
}

/// Sufficient statistic of flat coordinate `i`: the item count for a main
/// effect, the co-occurrence count for an interaction.
pub fn coordinate_statistic(x: &ItemResponseMatrix, i: usize) -> u64 {
    let (j, k) = coordinate_items(x.p(), i);
    pair_stat_cells(x.cells(), x.p(), j, k)
}

/// Per-item and per-pair counts of a response matrix.
///
/// `item_counts[j]` is the number of respondents with item `j` equal to 1;
/// `pair_counts[pair_index(p, j, k)]` counts respondents with both `j` and
/// `k` equal to 1.
pub fn sufficient_statistics(x: &ItemResponseMatrix) -> SuffStats {
    let p = x.p();
    let mut item_counts = vec![0u64; p];
    let mut pair_counts = vec![0u64; p * (p - 1) / 2];
    for i in 0..x.n() {
        let row = x.row(i);
        for j in 0..p {
            if row[j] == 1 {
                item_counts[j] += 1;
                let base = j * p - j * (j + 1) / 2;
                for k in (j + 1)..p {
                    // pair_index(p, j, k) = base + (k - j - 1)
                    pair_counts[base + k - j - 1] += row[k] as u64;
                }
            }
        }
    }
    SuffStats {
        p,
        n: x.n(),
        item_counts,
        pair_counts,
    }
}

/// Inner product of parameters with sufficient statistics: the log of the
/// unnormalized full-data density.
pub fn unnormalized_log_density<F: Scalar>(stats: &SuffStats, theta: &ParamVector<F>) -> Result<F> {
    if stats.p() != theta.p() {
        return Err(Error::DimensionMismatch(format!(
            "statistics cover {} items, parameters cover {}",
            stats.p(),
            theta.p()
        )));
    }
    let mut acc = F::zero();
    for (i, &v) in theta.as_slice().iter().enumerate() {
        acc += v * F::from_u64(stats.get(i)).expect("count fits in scalar");
    }
    Ok(acc)
}

/// Log weight of every single-row response pattern, indexed by the bit mask
/// with item `j` stored in bit `j`. Length `2^p`.
pub fn enumerate_row_log_weights<F: Scalar>(theta: &ParamVector<F>) -> Result<Vec<F>> {
    enumerate_row_log_weights_bounded(theta, ENUMERATION_BOUND)
}

/// As [`enumerate_row_log_weights`] with an explicit item-count bound.
pub fn enumerate_row_log_weights_bounded<F: Scalar>(
    theta: &ParamVector<F>,
    bound: usize,
) -> Result<Vec<F>> {
    let p = theta.p();
    if p > bound {
        return Err(Error::EnumerationBound { items: p, bound });
    }
    let beta = theta.beta();
    let states = 1usize << p;
    let mut weights = Vec::with_capacity(states);
    for state in 0..states as u64 {
        let mut w = F::zero();
        let mut bits = state;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            w += beta[j];
            let mut rest = bits;
            while rest != 0 {
                let k = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                w += theta.gamma_between(j, k);
            }
        }
        weights.push(w);
    }
    Ok(weights)
}

/// Exact log partition function for `n` independent rows: `n` times the
/// log-sum-exp over all `2^p` single-row pattern weights.
///
/// Errors above [`ENUMERATION_BOUND`] items; see
/// [`log_partition_exact_bounded`] to override.
pub fn log_partition_exact<F: Scalar>(theta: &ParamVector<F>, n: usize) -> Result<F> {
    log_partition_exact_bounded(theta, n, ENUMERATION_BOUND)
}

/// As [`log_partition_exact`] with an explicit item-count bound.
pub fn log_partition_exact_bounded<F: Scalar>(
    theta: &ParamVector<F>,
    n: usize,
    bound: usize,
) -> Result<F> {
    let weights = enumerate_row_log_weights_bounded(theta, bound)?;
    Ok(F::from_usize(n).expect("row count fits in scalar") * log_sum_exp(&weights))
}

/// Conditional probability that item `j` of a row equals 1 given the other
/// items of that row: `logistic(beta_j + sum_{k != j} gamma_jk row_k)`.
pub fn row_conditional_prob<F: Scalar>(theta: &ParamVector<F>, row: &[u8], j: usize) -> Result<F> {
    let p = theta.p();
    if row.len() != p {
        return Err(Error::DimensionMismatch(format!(
            "row has {} items, parameters cover {p}",
            row.len()
        )));
    }
    if j >= p {
        return Err(Error::DimensionMismatch(format!(
            "item {j} out of range for {p} items"
        )));
    }
    let mut field = theta.beta()[j];
    for k in 0..p {
        if k != j && row[k] == 1 {
            field += theta.gamma_between(j, k);
        }
    }
    Ok(logistic(field))
}

/// Dense per-row view of a parameter vector, for the samplers' hot loops.
///
/// Stores `beta` plus a full `p` by `p` symmetric interaction matrix with a
/// zero diagonal, so the local field of one item is a contiguous dot product
/// and a single-coordinate parameter change is an `O(p)` refresh.
#[derive(Clone, Debug)]
pub struct RowModel<F> {
    p: usize,
    beta: Vec<F>,
    /// Row-major `p` by `p`, symmetric, zero diagonal.
    gamma: Vec<F>,
}

impl<F: Scalar> RowModel<F> {
    pub fn from_params(theta: &ParamVector<F>) -> Self {
        let p = theta.p();
        let mut gamma = vec![F::zero(); p * p];
        for j in 0..p {
            for k in (j + 1)..p {
                let g = theta.gamma_between(j, k);
                gamma[j * p + k] = g;
                gamma[k * p + j] = g;
            }
        }
        Self {
            p,
            beta: theta.beta().to_vec(),
            gamma,
        }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Interaction weights of item `j` against every item; entry `j` is 0.
    pub fn gamma_row(&self, j: usize) -> &[F] {
        &self.gamma[j * self.p..(j + 1) * self.p]
    }

    pub fn beta(&self) -> &[F] {
        &self.beta
    }

    /// Overwrite one flat coordinate (main effect or interaction), keeping
    /// the dense mirror consistent.
    pub fn set_coordinate(&mut self, theta_p: usize, i: usize, value: F) {
        debug_assert_eq!(theta_p, self.p);
        if i < self.p {
            self.beta[i] = value;
        } else {
            let (j, k) = pair_from_index(self.p, i - self.p);
            self.gamma[j * self.p + k] = value;
            self.gamma[k * self.p + j] = value;
        }
    }

    /// Local field of item `j` within a row: `beta_j + sum_k gamma_jk row_k`.
    pub fn local_field(&self, row: &[u8], j: usize) -> F {
        let mut field = self.beta[j];
        let grow = self.gamma_row(j);
        for k in 0..self.p {
            if row[k] == 1 {
                field += grow[k];
            }
        }
        field
    }

    /// Local fields of every item in a row, written into `fields`.
    pub fn local_fields_into(&self, row: &[u8], fields: &mut [F]) {
        debug_assert_eq!(fields.len(), self.p);
        fields.copy_from_slice(&self.beta);
        for k in 0..self.p {
            if row[k] == 1 {
                let gcol = self.gamma_row(k);
                for (f, &g) in fields.iter_mut().zip(gcol) {
                    *f += g;
                }
            }
        }
    }
}
