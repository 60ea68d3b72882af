use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::choice::{ChoiceFunction, ChoiceTable};
use crate::compose::{compose_tables, exclusion_blocks};
use crate::error::{Error, Result};
use crate::exclusion::ExclusionFunction;
use crate::families::{rng, Domain};
use crate::partition::EquivalencePartition;

use super::{table_violation, Property, Violation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Every pair from the two enumerated families.
    Exhaustive,
    /// `count` pairs, each drawn independently from the two classes.
    Sampled { seed: u64, count: usize },
}

#[derive(Clone, Debug)]
pub struct PreservationConfig {
    pub mode: Mode,
    /// Needed for the MTO1 property and the many-to-one input class.
    pub partition: Option<EquivalencePartition>,
    /// Failures retained in full; the rest are only counted.
    pub max_failures: usize,
    pub max_pairs: usize,
    /// Draws per class when a non-enumerable class is used exhaustively.
    pub fallback_count: usize,
}

impl PreservationConfig {
    pub fn new(mode: Mode) -> Self {
        PreservationConfig {
            mode,
            partition: None,
            max_failures: 8,
            max_pairs: 4_000_000,
            fallback_count: 60,
        }
    }

    pub fn exhaustive() -> Self {
        Self::new(Mode::Exhaustive)
    }

    pub fn sampled(seed: u64, count: usize) -> Self {
        Self::new(Mode::Sampled { seed, count })
    }

    pub fn with_partition(mut self, p: EquivalencePartition) -> Self {
        self.partition = Some(p);
        self
    }
}

/// A pair of inputs whose composition breaks the property.
#[derive(Clone, Debug)]
pub struct PairFailure {
    pub pair_index: usize,
    pub c1: ChoiceFunction,
    pub c2: ChoiceFunction,
    pub violation: Violation,
}

#[derive(Clone, Debug)]
pub struct PreservationReport {
    pub property: Property,
    pub left: Domain,
    pub right: Domain,
    pub mode: Mode,
    pub pairs_checked: usize,
    pub failure_count: usize,
    /// The first failures in pair order.
    pub failures: Vec<PairFailure>,
}

impl PreservationReport {
    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }
}

/// Violation of `property` by `L_E(C1, C2)`, if any.
pub fn pair_violation(
    c1: &ChoiceFunction,
    c2: &ChoiceFunction,
    e: &ExclusionFunction,
    property: Property,
    partition: Option<&EquivalencePartition>,
) -> Result<Option<Violation>> {
    let composed = compose_tables(&c1.tabulate()?, &c2.tabulate()?, &exclusion_blocks(e))?;
    table_violation(&composed, property, partition)
}

pub(crate) struct PairSource {
    pub left: Vec<(ChoiceFunction, ChoiceTable)>,
    pub right: Vec<(ChoiceFunction, ChoiceTable)>,
    /// Sampled pairs index both lists at the same position.
    pub zipped: bool,
}

impl PairSource {
    pub fn build(
        e: &ExclusionFunction,
        left: Domain,
        right: Domain,
        cfg: &PreservationConfig,
    ) -> Result<Self> {
        let ground = e.ground();
        let partition = cfg.partition.as_ref();
        let tab = |fs: Vec<ChoiceFunction>| -> Result<Vec<(ChoiceFunction, ChoiceTable)>> {
            fs.into_iter()
                .map(|c| {
                    let t = c.tabulate()?;
                    Ok((c, t))
                })
                .collect()
        };
        match cfg.mode {
            Mode::Exhaustive => {
                let l = tab(left.enumerate(ground, partition, cfg.fallback_count)?)?;
                let r = tab(right.enumerate(ground, partition, cfg.fallback_count)?)?;
                let pairs = l.len().saturating_mul(r.len());
                if pairs > cfg.max_pairs {
                    return Err(Error::BudgetExceeded(format!(
                        "{pairs} pairs exceed the cap of {}",
                        cfg.max_pairs
                    )));
                }
                Ok(PairSource {
                    left: l,
                    right: r,
                    zipped: false,
                })
            }
            Mode::Sampled { seed, count } => {
                if count > cfg.max_pairs {
                    return Err(Error::BudgetExceeded(format!(
                        "{count} pairs exceed the cap of {}",
                        cfg.max_pairs
                    )));
                }
                let mut r = rng(seed);
                let mut ls = Vec::with_capacity(count);
                let mut rs = Vec::with_capacity(count);
                for _ in 0..count {
                    ls.push(left.sample(ground, partition, &mut r)?);
                    rs.push(right.sample(ground, partition, &mut r)?);
                }
                Ok(PairSource {
                    left: tab(ls)?,
                    right: tab(rs)?,
                    zipped: true,
                })
            }
        }
    }

    pub fn len(&self) -> usize {
        if self.zipped {
            self.left.len()
        } else {
            self.left.len() * self.right.len()
        }
    }

    pub fn get(&self, k: usize) -> (&(ChoiceFunction, ChoiceTable), &(ChoiceFunction, ChoiceTable)) {
        if self.zipped {
            (&self.left[k], &self.right[k])
        } else {
            let m = self.right.len();
            (&self.left[k / m], &self.right[k % m])
        }
    }
}

/// Checks that `L_E(C1, C2)` has `property` for every pair of inputs drawn
/// from the two classes.
pub fn verify_preservation(
    e: &ExclusionFunction,
    property: Property,
    left: Domain,
    right: Domain,
    cfg: &PreservationConfig,
) -> Result<PreservationReport> {
    let source = PairSource::build(e, left, right, cfg)?;
    let blocks = exclusion_blocks(e);
    let partition = cfg.partition.as_ref();
    let found: Vec<(usize, Violation)> = (0..source.len())
        .into_par_iter()
        .map(|k| {
            let ((_, t1), (_, t2)) = source.get(k);
            let composed = compose_tables(t1, t2, &blocks)?;
            Ok(table_violation(&composed, property, partition)?.map(|v| (k, v)))
        })
        .filter_map(|r: Result<Option<(usize, Violation)>>| r.transpose())
        .collect::<Result<_>>()?;
    let failures = found
        .iter()
        .take(cfg.max_failures)
        .map(|(k, v)| {
            let ((c1, _), (c2, _)) = source.get(*k);
            PairFailure {
                pair_index: *k,
                c1: c1.clone(),
                c2: c2.clone(),
                violation: v.clone(),
            }
        })
        .collect();
    Ok(PreservationReport {
        property,
        left,
        right,
        mode: cfg.mode,
        pairs_checked: source.len(),
        failure_count: found.len(),
        failures,
    })
}
