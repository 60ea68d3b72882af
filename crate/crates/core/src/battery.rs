//! Fixed and seeded instance batteries shared by tests, benches and the CLI.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::choice::ChoiceFunction;
use crate::error::Result;
use crate::exclusion::ExclusionFunction;
use crate::families::{random_order, rng};
use crate::partition::EquivalencePartition;
use crate::props::Condition;
use crate::set::{GroundSet, ItemSet, SetValue};
use crate::tlcr::{Threshold, TlcrParams};

/// An exclusion table breaking exactly `condition` among the six classifier
/// conditions.
#[derive(Clone, Debug)]
pub struct BatteryEntry {
    pub name: &'static str,
    pub condition: Condition,
    pub exclusion: ExclusionFunction,
}

/// Ground size of [`condition_battery`].
pub const BATTERY_ITEMS: usize = 5;

type Rule = fn(ItemSet, ItemSet) -> SetValue;

/// One table per classifier condition, on five items with two of headroom.
pub fn condition_battery() -> Vec<BatteryEntry> {
    let g = GroundSet::new(BATTERY_ITEMS).expect("valid size");
    let ab = ItemSet::from_items([0, 1]);
    let entries: [(&'static str, Condition, Rule); 6] = [
        ("singletons-top", Condition::GMonotone, |z, _| {
            if z.len() == 1 { SetValue::Top } else { SetValue::Finite(z) }
        }),
        ("pair-adds-c", Condition::AllOrNothing, |z, ab| {
            SetValue::Finite(if ab.is_subset_of(z) { z.with(2) } else { z })
        }),
        ("a-pairs-top", Condition::Cardinal, |z, _| {
            if z.contains(0) && z.len() >= 2 { SetValue::Top } else { SetValue::Finite(z) }
        }),
        ("a-reused-alone", Condition::RMonotone, |z, _| {
            SetValue::Finite(if z.len() == 1 { z.without(0) } else { z })
        }),
        ("a-reused-with-b", Condition::RCardinalLinear, |z, ab| {
            SetValue::Finite(if ab.is_subset_of(z) { z.without(0) } else { z })
        }),
        ("a-flips", Condition::KDisjoint, |z, _| {
            SetValue::Finite(if z.contains(0) { z.without(0) } else { z.with(0) })
        }),
    ];
    entries
        .into_iter()
        .map(|(name, condition, f)| BatteryEntry {
            name,
            condition,
            exclusion: ExclusionFunction::from_fn(&g, |z| f(z, ab)),
        })
        .collect()
}

/// A hypothesis-satisfying instance of the completion-preservation lemma.
///
/// `C_i` are many-to-one responsive and `C̄_i` responsive with the same
/// order and quota, so `C̄_i` is path independent and completes `C_i`.
#[derive(Clone, Debug)]
pub struct LemmaInstance {
    pub seed: u64,
    pub partition: EquivalencePartition,
    pub params: TlcrParams,
    pub exclusion: ExclusionFunction,
    pub c1: ChoiceFunction,
    pub c2: ChoiceFunction,
    pub c1bar: ChoiceFunction,
    pub c2bar: ChoiceFunction,
}

/// Random partition of `n` items into exactly `blocks` non-empty classes.
pub fn random_partition<R: Rng>(n: usize, blocks: usize, rng: &mut R) -> EquivalencePartition {
    assert!(1 <= blocks && blocks <= n, "need 1 <= blocks <= n");
    let mut items: Vec<usize> = (0..n).collect();
    items.shuffle(rng);
    let mut sets = vec![ItemSet::EMPTY; blocks];
    for (i, &x) in items.iter().enumerate() {
        let b = if i < blocks { i } else { rng.gen_range(0..blocks) };
        sets[b] = sets[b].with(x);
    }
    EquivalencePartition::new(sets).expect("blocks cover the items")
}

/// Draws parameters whose feasible-set exclusion is equivalence-excluding:
/// once singletons lie below the threshold, every class with two or more
/// items must sit inside `K`.
fn lemma_params<R: Rng>(g: &GroundSet, p: &EquivalencePartition, rng: &mut R) -> TlcrParams {
    let n = g.size();
    let t = match rng.gen_range(0..5) {
        0 => Threshold::Finite(1),
        1 => Threshold::Finite(2),
        2 => Threshold::Finite(3),
        _ => Threshold::Infinite,
    };
    let mut base = ItemSet::EMPTY;
    if t != Threshold::Finite(1) {
        for b in p.blocks().iter().filter(|b| b.len() > 1) {
            base = base | *b;
        }
    }
    for x in 0..n {
        if rng.gen_bool(0.2) {
            base = base.with(x);
        }
    }
    let free = g.full() - base;
    let levels = match t {
        Threshold::Finite(t) => t.saturating_sub(1),
        Threshold::Infinite => n,
    };
    let mut reuse = Vec::new();
    let mut cur = ItemSet::EMPTY;
    for _ in 0..levels.min(n) {
        for x in free.iter() {
            if rng.gen_bool(0.25) {
                cur = cur.with(x);
            }
        }
        reuse.push(cur);
    }
    TlcrParams::new(t, base, reuse).normalized()
}

/// Many-to-one threshold-linear on feasible sets with the given parameters;
/// infeasible sets get arbitrary values.
fn lemma_exclusion<R: Rng>(
    g: &GroundSet,
    p: &EquivalencePartition,
    params: &TlcrParams,
    rng: &mut R,
) -> ExclusionFunction {
    let full = g.full();
    let mut noise: Vec<SetValue> = (0..g.powerset_len())
        .map(|_| {
            if rng.gen_bool(0.3) {
                SetValue::Top
            } else {
                SetValue::Finite(ItemSet::from_bits(rng.gen::<u32>()) & full)
            }
        })
        .collect();
    ExclusionFunction::from_fn(g, |z| {
        if p.is_feasible(z) {
            if params.t.admits(z.len()) {
                SetValue::Finite((z - params.reuse_at(z.len())) | params.base)
            } else {
                SetValue::Top
            }
        } else {
            std::mem::replace(&mut noise[z.bits() as usize], SetValue::Top)
        }
    })
}

/// Seeded lemma instance on `n` items split into `blocks` classes.
pub fn lemma_instance(n: usize, blocks: usize, seed: u64) -> Result<LemmaInstance> {
    let g = GroundSet::new(n)?;
    let mut r = rng(seed);
    let partition = random_partition(n, blocks, &mut r);
    let params = lemma_params(&g, &partition, &mut r);
    let exclusion = lemma_exclusion(&g, &partition, &params, &mut r);
    let mut pair = || -> Result<(ChoiceFunction, ChoiceFunction)> {
        let order = random_order(n, 0.8, &mut r);
        let q = r.gen_range(0..=n);
        Ok((
            ChoiceFunction::mto1_responsive(&g, order.clone(), q, partition.clone())?,
            ChoiceFunction::responsive(&g, order, q)?,
        ))
    };
    let (c1, c1bar) = pair()?;
    let (c2, c2bar) = pair()?;
    Ok(LemmaInstance { seed, partition, params, exclusion, c1, c2, c1bar, c2bar })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contracts::{classify_mto1_tlcr, completes, is_equivalence_excluding};
    use crate::props::classify_tlcr;

    #[test]
    fn each_entry_breaks_one_condition() {
        for entry in condition_battery() {
            let c = classify_tlcr(&entry.exclusion).unwrap();
            assert_eq!(c.failed_conditions, vec![entry.condition], "{}", entry.name);
        }
    }

    #[test]
    fn lemma_instances_meet_hypotheses() {
        for seed in 0..10 {
            let inst = lemma_instance(6, 3, seed).unwrap();
            let p = &inst.partition;
            assert_eq!(p.blocks().len(), 3);
            assert!(is_equivalence_excluding(&inst.exclusion, p).unwrap(), "seed {seed}");
            let class = classify_mto1_tlcr(&inst.exclusion, p).unwrap();
            assert!(class.is_tlcr, "seed {seed}: {:?}", class.failed_conditions);
            assert!(completes(&inst.c1bar, &inst.c1, p).unwrap());
            assert!(completes(&inst.c2bar, &inst.c2, p).unwrap());
        }
    }
}
