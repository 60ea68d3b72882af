//! Constructors, enumerators and samplers for the choice and exclusion classes.
//!
//! All randomness flows through [`rng`], a ChaCha8 stream keyed by a `u64`
//! seed, so every sampled family is reproducible from its seed alone.

use std::collections::HashSet;
use std::ops::RangeInclusive;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::choice::{ChoiceFunction, ChoiceTable};
use crate::error::{Error, Result};
use crate::exclusion::ExclusionFunction;
use crate::order::LinearOrder;
use crate::partition::EquivalencePartition;
use crate::set::{GroundSet, ItemSet};
use crate::tlcr::{Threshold, TlcrParams};

/// Default cap on the number of `(order, quota)` candidates enumerated.
pub const ENUMERATION_CAP: usize = 200_000;

/// Largest ground set accepted by [`sample_consistent`].
pub const MAX_CONSISTENT_ITEMS: usize = 4;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn make_responsive(ground: &GroundSet, order: LinearOrder, quota: usize) -> Result<ChoiceFunction> {
    ChoiceFunction::responsive(ground, order, quota)
}

pub fn make_union_of_orders(ground: &GroundSet, orders: Vec<LinearOrder>) -> Result<ChoiceFunction> {
    ChoiceFunction::union_of_orders(ground, orders)
}

pub fn make_tlcr(ground: &GroundSet, params: TlcrParams) -> Result<ExclusionFunction> {
    ExclusionFunction::tlcr(ground, params)
}

/// A path independent `C` with `C(Z ∪ Z′ ∪ W) = Z` and `C(Z′ ∪ W) = Z′` for
/// any `W` disjoint from `Z ∪ Z′`, given `|Z′| > |Z|` and `Z ⊄ Z′`.
///
/// `C` is the union of `|Z′|` orders, each accepting at most two items.
/// With `z_1..z_l` listing `Z ∩ Z′` followed by `z_{l+1}..z_m` listing
/// `Z ∖ Z′`, and `z′_{l+1}..z′_t` listing `Z′ ∖ Z`, order `i` accepts
/// `{z_i}` for `i ≤ l`, `z_i ≻ z′_i` for `l < i < m`, and `z_m ≻ z′_i` for
/// `i ≥ m`.
pub fn make_footnote_union(ground: &GroundSet, z: ItemSet, z_prime: ItemSet) -> Result<ChoiceFunction> {
    ground.check(z | z_prime)?;
    if z_prime.len() <= z.len() || z.is_subset_of(z_prime) {
        return Err(Error::InvalidParams(format!(
            "need |Z'| > |Z| and Z not inside Z', got Z = {z}, Z' = {z_prime}"
        )));
    }
    let n = ground.size();
    let zs: Vec<usize> = (z & z_prime).iter().chain((z - z_prime).iter()).collect();
    let extra: Vec<usize> = (z_prime - z).to_vec();
    let (l, m, t) = ((z & z_prime).len(), zs.len(), z_prime.len());
    let orders = (1..=t)
        .map(|i| {
            let accept = if i <= l {
                vec![zs[i - 1]]
            } else if i < m {
                vec![zs[i - 1], extra[i - l - 1]]
            } else {
                vec![zs[m - 1], extra[i - l - 1]]
            };
            LinearOrder::from_acceptable(&accept, n)
        })
        .collect::<Result<Vec<_>>>()?;
    ChoiceFunction::union_of_orders(ground, orders)
}

/// Every distinct responsive function whose acceptable items lie in
/// `restrict_acceptable` (all items when `None`), for quotas in `quotas`.
///
/// Candidates are visited by acceptable-set size, then permutation in
/// lexicographic order, then quota; a candidate is kept only if its table has
/// not been seen before.
pub fn enumerate_responsive(
    ground: &GroundSet,
    restrict_acceptable: Option<ItemSet>,
    quotas: RangeInclusive<usize>,
    cap: usize,
) -> Result<Vec<ChoiceFunction>> {
    let n = ground.size();
    let pool: Vec<usize> = restrict_acceptable.unwrap_or(ground.full()).iter().collect();
    ground.check(ItemSet::from_items(pool.iter().copied()))?;
    let quotas: Vec<usize> = quotas.filter(|&q| q <= n).collect();

    let mut perms = 0usize;
    let mut falling = 1usize;
    for k in 0..=pool.len() {
        perms = perms.saturating_add(falling);
        falling = falling.saturating_mul(pool.len() - k);
    }
    let count = perms.saturating_mul(quotas.len());
    if count > cap {
        return Err(Error::EnumerationCapExceeded { count, cap });
    }

    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for k in 0..=pool.len() {
        for acceptable in pool.iter().copied().permutations(k) {
            let order = LinearOrder::from_acceptable(&acceptable, n)?;
            for &q in &quotas {
                let c = ChoiceFunction::responsive(ground, order.clone(), q)?;
                if seen.insert(c.tabulate()?) {
                    out.push(c);
                }
            }
        }
    }
    Ok(out)
}

/// A uniformly shuffled order with each item acceptable with probability `p`.
pub fn random_order<R: Rng>(n: usize, p_acceptable: f64, rng: &mut R) -> LinearOrder {
    let mut items: Vec<usize> = (0..n).collect();
    items.shuffle(rng);
    let acceptable: Vec<usize> = items
        .into_iter()
        .filter(|_| rng.gen_bool(p_acceptable))
        .collect();
    LinearOrder::from_acceptable(&acceptable, n).expect("shuffled items form a permutation")
}

pub fn random_responsive<R: Rng>(ground: &GroundSet, rng: &mut R) -> ChoiceFunction {
    let n = ground.size();
    let order = random_order(n, 0.8, rng);
    let quota = rng.gen_range(0..=n);
    ChoiceFunction::responsive(ground, order, quota).expect("valid responsive parameters")
}

pub fn random_sv_responsive<R: Rng>(ground: &GroundSet, rng: &mut R) -> ChoiceFunction {
    let order = random_order(ground.size(), 0.8, rng);
    ChoiceFunction::responsive(ground, order, 1).expect("valid responsive parameters")
}

/// A union of one to three random orders.
pub fn random_union_of_orders<R: Rng>(ground: &GroundSet, rng: &mut R) -> ChoiceFunction {
    let k = rng.gen_range(1..=3);
    let orders = (0..k).map(|_| random_order(ground.size(), 0.8, rng)).collect();
    ChoiceFunction::union_of_orders(ground, orders).expect("orders sized to ground")
}

pub fn random_mto1_responsive<R: Rng>(
    ground: &GroundSet,
    partition: &EquivalencePartition,
    rng: &mut R,
) -> ChoiceFunction {
    let n = ground.size();
    let order = random_order(n, 0.8, rng);
    let quota = rng.gen_range(0..=partition.blocks().len());
    ChoiceFunction::mto1_responsive(ground, order, quota, partition.clone())
        .expect("valid many-to-one parameters")
}

/// Draws a consistent table choice function.
///
/// Entries are filled in order of increasing input size; each entry is a
/// uniformly drawn subset, redrawn until it agrees with every smaller input
/// it must match (`C(Y) ⊆ Y' ⊂ Y` forces `C(Y') = C(Y)`).
pub fn sample_consistent(ground: &GroundSet, seed: u64) -> Result<ChoiceFunction> {
    sample_consistent_with_budget(ground, seed, 1 << 16)
}

pub fn sample_consistent_with_budget(
    ground: &GroundSet,
    seed: u64,
    budget: usize,
) -> Result<ChoiceFunction> {
    let n = ground.size();
    if n > MAX_CONSISTENT_ITEMS {
        return Err(Error::InvalidParams(format!(
            "consistent sampling supports at most {MAX_CONSISTENT_ITEMS} items, got {n}"
        )));
    }
    let mut rng = rng(seed);
    let mut out = vec![0u32; 1 << n];
    let mut draws = 0usize;
    for y in ground.all_subsets() {
        loop {
            draws += 1;
            if draws > budget {
                return Err(Error::SamplingBudgetExceeded(budget));
            }
            let c = ItemSet::from_bits(rng.gen::<u32>()) & y;
            let coherent = y
                .subsets()
                .filter(|&mid| mid != y && c.is_subset_of(mid))
                .all(|mid| out[mid.bits() as usize] == c.bits());
            if coherent {
                out[y.bits() as usize] = c.bits();
                break;
            }
        }
    }
    Ok(ChoiceFunction::from_table(ground, &ChoiceTable::from_raw(n, out)?))
}

/// Random valid threshold-linear parameters.
pub fn random_tlcr_params<R: Rng>(ground: &GroundSet, rng: &mut R) -> TlcrParams {
    let n = ground.size();
    let t = match rng.gen_range(0..=n + 2) {
        x if x > n => Threshold::Infinite,
        x => Threshold::Finite(x),
    };
    if t == Threshold::Finite(0) {
        return TlcrParams::new(t, ItemSet::EMPTY, Vec::new());
    }
    let base: ItemSet = (0..n).filter(|_| rng.gen_bool(0.25)).collect();
    let free = ground.full() - base;
    let levels = match t {
        Threshold::Finite(t) => (t - 1).min(n),
        Threshold::Infinite => n,
    };
    let mut cur = ItemSet::EMPTY;
    let reuse = (0..levels)
        .map(|_| {
            cur = cur | free.iter().filter(|_| rng.gen_bool(0.2)).collect::<ItemSet>();
            cur
        })
        .collect();
    TlcrParams::new(t, base, reuse).normalized()
}

/// Classes of input choice functions used by preservation checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    /// Responsive functions, any quota.
    Res,
    /// Responsive functions with quota one.
    SvRes,
    /// Path independent functions given as unions of linear orders.
    PiGen,
    /// Sampled consistent tables.
    ConSampled,
    /// Many-to-one responsive functions over a partition.
    Mto1Res,
}

impl Domain {
    pub fn name(self) -> &'static str {
        match self {
            Domain::Res => "res",
            Domain::SvRes => "sv-res",
            Domain::PiGen => "pi-gen",
            Domain::ConSampled => "con-sampled",
            Domain::Mto1Res => "mto1-res",
        }
    }

    /// Every member when the class is enumerable at this size.
    ///
    /// For `PiGen` this is the single-valued responsive functions together
    /// with every union of two of their orders. `ConSampled` has no
    /// exhaustive form and yields `count` seeded draws instead.
    pub fn enumerate(
        self,
        ground: &GroundSet,
        partition: Option<&EquivalencePartition>,
        fallback_count: usize,
    ) -> Result<Vec<ChoiceFunction>> {
        let n = ground.size();
        match self {
            Domain::Res => enumerate_responsive(ground, None, 0..=n, ENUMERATION_CAP),
            Domain::SvRes => enumerate_responsive(ground, None, 1..=1, ENUMERATION_CAP),
            Domain::PiGen => {
                let sv = enumerate_responsive(ground, None, 1..=1, ENUMERATION_CAP)?;
                let orders: Vec<LinearOrder> = sv
                    .iter()
                    .map(|c| match c.rule() {
                        crate::choice::ChoiceRule::Responsive { order, .. } => order.clone(),
                        _ => unreachable!("enumerate_responsive yields responsive rules"),
                    })
                    .collect();
                let pairs = orders.len() * orders.len().saturating_sub(1) / 2;
                if pairs > ENUMERATION_CAP {
                    return Err(Error::EnumerationCapExceeded {
                        count: pairs,
                        cap: ENUMERATION_CAP,
                    });
                }
                let mut seen: HashSet<ChoiceTable> = HashSet::new();
                let mut out = Vec::new();
                for c in sv {
                    if seen.insert(c.tabulate()?) {
                        out.push(c);
                    }
                }
                for (a, b) in orders.iter().tuple_combinations() {
                    let c = ChoiceFunction::union_of_orders(ground, vec![a.clone(), b.clone()])?;
                    if seen.insert(c.tabulate()?) {
                        out.push(c);
                    }
                }
                Ok(out)
            }
            Domain::ConSampled => (0..fallback_count as u64)
                .map(|s| sample_consistent(ground, s))
                .collect(),
            Domain::Mto1Res => {
                let p = partition.ok_or(Error::MissingPartition)?;
                let mut seen = HashSet::new();
                let mut out = Vec::new();
                let pool: Vec<usize> = (0..n).collect();
                let mut count = 0usize;
                for k in 0..=n {
                    for acceptable in pool.iter().copied().permutations(k) {
                        let order = LinearOrder::from_acceptable(&acceptable, n)?;
                        for q in 0..=p.blocks().len() {
                            count += 1;
                            if count > ENUMERATION_CAP {
                                return Err(Error::EnumerationCapExceeded {
                                    count,
                                    cap: ENUMERATION_CAP,
                                });
                            }
                            let c = ChoiceFunction::mto1_responsive(ground, order.clone(), q, p.clone())?;
                            if seen.insert(c.tabulate()?) {
                                out.push(c);
                            }
                        }
                    }
                }
                Ok(out)
            }
        }
    }

    /// One random member.
    pub fn sample<R: Rng>(
        self,
        ground: &GroundSet,
        partition: Option<&EquivalencePartition>,
        rng: &mut R,
    ) -> Result<ChoiceFunction> {
        Ok(match self {
            Domain::Res => random_responsive(ground, rng),
            Domain::SvRes => random_sv_responsive(ground, rng),
            Domain::PiGen => random_union_of_orders(ground, rng),
            Domain::ConSampled => sample_consistent(ground, rng.gen())?,
            Domain::Mto1Res => {
                random_mto1_responsive(ground, partition.ok_or(Error::MissingPartition)?, rng)
            }
        })
    }
}

impl std::str::FromStr for Domain {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "res" => Domain::Res,
            "sv-res" => Domain::SvRes,
            "pi-gen" | "pi" => Domain::PiGen,
            "con-sampled" | "con" => Domain::ConSampled,
            "mto1-res" | "mto1" => Domain::Mto1Res,
            other => return Err(Error::InvalidParams(format!("unknown domain {other:?}"))),
        })
    }
}
