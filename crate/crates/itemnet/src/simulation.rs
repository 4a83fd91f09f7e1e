//! Synthetic item-response data with planted group structure.
//!
//! Items are partitioned into equally sized groups and respondents into
//! equally sized latent classes. Each class designates some groups as
//! "inside" (its respondents engage with them); the remaining groups are
//! "outside". Response generation walks each respondent's groups in order:
//! a per-group status draw decides whether the group behaves as inside or
//! outside for that respondent, the group's first item succeeds with the
//! inside or outside success rate accordingly, and each later item chains
//! on its predecessor (probability `rho` after a success, the item's base
//! easiness after a failure). The draw count per respondent and group is
//! fixed regardless of outcomes, so designs differing in one probability
//! stay coupled under a common seed.

use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::adjacency::SignedAdjacency;
use crate::model::ItemResponseMatrix;
use crate::rng::ChainRng;
use crate::scalar::Scalar;
use crate::{Error, Result};

/// Design of one synthetic dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimDesign<F> {
    /// Respondents; must be divisible by `classes`.
    pub n: usize,
    /// Items; must be divisible by `g`.
    pub p: usize,
    /// Item groups, each of size `p / g`.
    pub g: usize,
    /// Latent respondent classes, each of size `n / classes`.
    pub classes: usize,
    /// Group indices each class treats as inside.
    pub class_to_inside_groups: Vec<Vec<usize>>,
    /// Probability an intended-inside group behaves as inside.
    pub p11: F,
    /// Success rate on a group's first item when the group is inside.
    pub p12: F,
    /// Probability an intended-outside group behaves as outside.
    pub p21: F,
    /// Success rate on a group's first item when the group is outside.
    pub p22: F,
    /// Success rate on an item whose predecessor in the group succeeded.
    pub rho: F,
    /// Per-item success rate applied after a predecessor failure.
    pub base_easiness: Vec<F>,
    pub seed: u64,
}

impl<F: Scalar> Default for SimDesign<F> {
    fn default() -> Self {
        Self {
            n: 300,
            p: 24,
            g: 6,
            classes: 3,
            class_to_inside_groups: vec![vec![0, 1], vec![4, 5], vec![2, 3]],
            p11: F::c(0.7),
            p12: F::c(0.7),
            p21: F::c(0.5),
            p22: F::c(0.5),
            rho: F::c(0.8),
            base_easiness: vec![F::c(0.5); 24],
            seed: 0,
        }
    }
}

/// What the generator knows and an estimator is judged against.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimTruth {
    /// Latent class per respondent.
    pub class_of: Vec<usize>,
    /// Group per item.
    pub group_of: Vec<usize>,
    /// Signed adjacency implied by the group and class design.
    pub adjacency: SignedAdjacency,
}

impl<F: Scalar> SimDesign<F> {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.p < 2 {
            return bad("need at least two items".into());
        }
        if self.g == 0 || !self.p.is_multiple_of(self.g) {
            return bad(format!(
                "{} items cannot split into {} equal groups",
                self.p, self.g
            ));
        }
        if self.classes == 0 || !self.n.is_multiple_of(self.classes) {
            return bad(format!(
                "{} respondents cannot split into {} equal classes",
                self.n, self.classes
            ));
        }
        if self.class_to_inside_groups.len() != self.classes {
            return bad(format!(
                "inside-group map covers {} classes, design has {}",
                self.class_to_inside_groups.len(),
                self.classes
            ));
        }
        for (c, groups) in self.class_to_inside_groups.iter().enumerate() {
            for &gi in groups {
                if gi >= self.g {
                    return bad(format!(
                        "class {c} names group {gi}, but only {} exist",
                        self.g
                    ));
                }
            }
        }
        let unit = |v: F| v >= F::zero() && v <= F::one();
        for (name, v) in [
            ("p11", self.p11),
            ("p12", self.p12),
            ("p21", self.p21),
            ("p22", self.p22),
            ("rho", self.rho),
        ] {
            if !unit(v) {
                return bad(format!("{name} = {v} is outside [0, 1]"));
            }
        }
        if self.p21 > self.p11 {
            return bad(format!(
                "outside-status rate p21 = {} exceeds inside-status rate p11 = {}",
                self.p21, self.p11
            ));
        }
        if self.p22 > self.p12 {
            return bad(format!(
                "outside success rate p22 = {} exceeds inside success rate p12 = {}",
                self.p22, self.p12
            ));
        }
        if self.base_easiness.len() != self.p {
            return bad(format!(
                "base_easiness lists {} items, design has {}",
                self.base_easiness.len(),
                self.p
            ));
        }
        if let Some(v) = self.base_easiness.iter().find(|v| !unit(**v)) {
            return bad(format!("base easiness {v} is outside [0, 1]"));
        }
        Ok(())
    }

    /// Group of item `j`: items are grouped in index order.
    pub fn group_of_item(&self, j: usize) -> usize {
        j / (self.p / self.g)
    }

    /// Class of respondent `r`: respondents are classed in index order.
    pub fn class_of_respondent(&self, r: usize) -> usize {
        r / (self.n / self.classes)
    }
}

/// Generate one dataset plus the truth it was built from. Deterministic in
/// the design (including its seed).
pub fn generate_dataset<F: Scalar>(
    design: &SimDesign<F>,
) -> Result<(ItemResponseMatrix, SimTruth)> {
    design.validate()?;
    let group_size = design.p / design.g;
    let mut rng = ChainRng::seed_from_u64(design.seed);
    let mut cells = vec![0u8; design.n * design.p];

    for r in 0..design.n {
        let class = design.class_of_respondent(r);
        let inside = &design.class_to_inside_groups[class];
        let row = &mut cells[r * design.p..(r + 1) * design.p];
        for group in 0..design.g {
            let status_draw = F::uniform01(&mut rng);
            let effective_inside = if inside.contains(&group) {
                status_draw < design.p11
            } else {
                // Intended-outside groups behave as outside with
                // probability p21, otherwise as inside.
                status_draw >= design.p21
            };
            let first_rate = if effective_inside {
                design.p12
            } else {
                design.p22
            };
            let mut prev_correct = false;
            for offset in 0..group_size {
                let j = group * group_size + offset;
                let rate = if offset == 0 {
                    first_rate
                } else if prev_correct {
                    design.rho
                } else {
                    design.base_easiness[j]
                };
                let correct = F::uniform01(&mut rng) < rate;
                row[j] = u8::from(correct);
                prev_correct = correct;
            }
        }
    }

    let truth = SimTruth {
        class_of: (0..design.n)
            .map(|r| design.class_of_respondent(r))
            .collect(),
        group_of: (0..design.p).map(|j| design.group_of_item(j)).collect(),
        adjacency: true_signed_adjacency(design)?,
    };
    Ok((
        ItemResponseMatrix::from_flat(design.n, design.p, cells)?,
        truth,
    ))
}

/// The signed item adjacency a design implies: `+1` between items of one
/// group, or of two groups some class treats as jointly inside; `-1` when
/// every class involving either group splits the pair (one inside, one
/// outside); `0` when no class involves either group.
pub fn true_signed_adjacency<F: Scalar>(design: &SimDesign<F>) -> Result<SignedAdjacency> {
    design.validate()?;
    let mut adj = SignedAdjacency::empty(design.p);
    for j in 0..design.p {
        for k in (j + 1)..design.p {
            let gj = design.group_of_item(j);
            let gk = design.group_of_item(k);
            let sign = if gj == gk {
                1
            } else {
                let both = design
                    .class_to_inside_groups
                    .iter()
                    .any(|ins| ins.contains(&gj) && ins.contains(&gk));
                if both {
                    1
                } else {
                    let involved: Vec<_> = design
                        .class_to_inside_groups
                        .iter()
                        .filter(|ins| ins.contains(&gj) || ins.contains(&gk))
                        .collect();
                    let split = !involved.is_empty()
                        && involved
                            .iter()
                            .all(|ins| ins.contains(&gj) != ins.contains(&gk));
                    if split {
                        -1
                    } else {
                        0
                    }
                }
            };
            if sign != 0 {
                adj.set(j, k, sign);
            }
        }
    }
    Ok(adj)
}
