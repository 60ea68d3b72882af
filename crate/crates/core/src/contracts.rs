//! Equivalence classes of contracts: feasibility, many-to-one checks,
//! completions, and the completion-preserving composition.
//!
//! Quantifiers over "feasible `Z`" range over feasible sets that leave the
//! headroom free, matching the classifier.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::choice::{ChoiceFunction, ChoiceTable};
use crate::compose::lex_compose;
use crate::error::{Error, Result};
use crate::exclusion::ExclusionFunction;
use crate::partition::EquivalencePartition;
use crate::props::{check_choice, classify_on, Property, TlcrClassification};
use crate::set::{GroundSet, ItemSet, SetValue};
use crate::tlcr::TlcrParams;

/// Largest ground set on which completion search runs.
pub const MAX_COMPLETION_ITEMS: usize = 5;

/// Search nodes allowed per completion search.
pub const COMPLETION_NODE_BUDGET: usize = 20_000_000;

pub fn is_feasible(z: ItemSet, p: &EquivalencePartition) -> bool {
    p.is_feasible(z)
}

fn feasible_sets(g: &GroundSet, p: &EquivalencePartition) -> Vec<ItemSet> {
    g.tested_subsets().into_iter().filter(|&z| p.is_feasible(z)).collect()
}

fn check_partition(g: &GroundSet, p: &EquivalencePartition) -> Result<()> {
    if g.size() != p.size() {
        return Err(Error::GroundMismatch { left: g.size(), right: p.size() });
    }
    Ok(())
}

/// `cbar` agrees with `c` wherever `cbar` chooses a feasible set.
pub fn completes(cbar: &ChoiceFunction, c: &ChoiceFunction, p: &EquivalencePartition) -> Result<bool> {
    cbar.ground().same_size(c.ground())?;
    check_partition(c.ground(), p)?;
    let (tb, tc) = (cbar.tabulate()?, c.tabulate()?);
    Ok(table_completes(&tb, &tc, p))
}

fn table_completes(cbar: &ChoiceTable, c: &ChoiceTable, p: &EquivalencePartition) -> bool {
    (0..1u32 << c.n()).map(ItemSet::from_bits).all(|y| {
        let v = cbar.get(y);
        !p.is_feasible(v) || v == c.get(y)
    })
}

/// A many-to-one choice function with one of its completions.
#[derive(Clone, Debug)]
pub struct CompletionPair {
    pub base: ChoiceFunction,
    pub completion: ChoiceFunction,
}

impl CompletionPair {
    pub fn new(base: ChoiceFunction, completion: ChoiceFunction, p: &EquivalencePartition) -> Result<Self> {
        if !completes(&completion, &base, p)? {
            return Err(Error::PreconditionFailed("completion disagrees on a feasible output".into()));
        }
        Ok(CompletionPair { base, completion })
    }
}

/// `Z ∪ E(Z) ⊇ I_Z` for every feasible `Z`.
pub fn is_equivalence_excluding(e: &ExclusionFunction, p: &EquivalencePartition) -> Result<bool> {
    let g = e.ground();
    check_partition(g, p)?;
    for z in feasible_sets(g, p) {
        if !e.gross(z)?.contains_set(p.closure(z)) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DilationCondition {
    /// Feasible `Z ⊆ Z′` implies `G(Z) ⊆ G(Z′)`.
    Mto1Monotone,
    /// With two non-equivalent items outside `I_Z ∪ K`, `G(Z)` is `I_Z ∪ K`
    /// or everything; otherwise `G(Z) ⊇ I_Z ∪ K`.
    WeakAon,
}

/// First feasible `Z` (and `Z′` for monotonicity) where the gross
/// exclusion breaks `cond`.
pub fn equiv_dilation_violation(
    e: &ExclusionFunction,
    p: &EquivalencePartition,
    cond: DilationCondition,
) -> Result<Option<(ItemSet, Option<ItemSet>)>> {
    let g = e.ground();
    check_partition(g, p)?;
    let sets = feasible_sets(g, p);
    let gross: Vec<SetValue> = sets.iter().map(|&z| e.gross(z)).collect::<Result<_>>()?;
    match cond {
        DilationCondition::Mto1Monotone => {
            for (i, &z) in sets.iter().enumerate() {
                for (j, &z2) in sets.iter().enumerate() {
                    if z != z2 && z.is_subset_of(z2) && !gross[i].is_subset_of(gross[j]) {
                        return Ok(Some((z, Some(z2))));
                    }
                }
            }
            Ok(None)
        }
        DilationCondition::WeakAon => {
            let full = g.full();
            let k = match e.base()? {
                SetValue::Finite(k) => k,
                SetValue::Top => full,
            };
            for (i, &z) in sets.iter().enumerate() {
                let floor = p.closure(z) | k;
                let outside = full - floor;
                let split = outside.iter().any(|x| outside.iter().any(|y| !p.equivalent(x, y)));
                let ok = match gross[i] {
                    SetValue::Top => true,
                    SetValue::Finite(d) if split => d == floor || d == full,
                    SetValue::Finite(d) => floor.is_subset_of(d),
                };
                if !ok {
                    return Ok(Some((z, None)));
                }
            }
            Ok(None)
        }
    }
}

pub fn check_equiv_dilation(e: &ExclusionFunction, p: &EquivalencePartition, cond: DilationCondition) -> Result<bool> {
    Ok(equiv_dilation_violation(e, p, cond)?.is_none())
}

/// The classifier with every quantifier restricted to feasible sets.
pub fn classify_mto1_tlcr(e: &ExclusionFunction, p: &EquivalencePartition) -> Result<TlcrClassification> {
    check_partition(e.ground(), p)?;
    classify_on(e, |z| p.is_feasible(z))
}

/// The threshold-linear exclusion on all sets with the given parameters.
pub fn build_overline_e(ground: &GroundSet, params: TlcrParams) -> Result<ExclusionFunction> {
    ExclusionFunction::tlcr(ground, params)
}

/// Checks the hypotheses, then whether composing the completions under the
/// full-domain exclusion completes the composition of the originals.
pub fn verify_lemma_mto1(
    c1: &ChoiceFunction,
    c2: &ChoiceFunction,
    c1bar: &ChoiceFunction,
    c2bar: &ChoiceFunction,
    e: &ExclusionFunction,
    p: &EquivalencePartition,
) -> Result<bool> {
    if !is_equivalence_excluding(e, p)? {
        return Err(Error::PreconditionFailed("E is not equivalence-excluding".into()));
    }
    let class = classify_mto1_tlcr(e, p)?;
    let Some(params) = class.params else {
        return Err(Error::PreconditionFailed(
            "E is not many-to-one threshold-linear with cardinal reuse".into(),
        ));
    };
    if !completes(c1bar, c1, p)? {
        return Err(Error::PreconditionFailed("C1bar does not complete C1".into()));
    }
    if !completes(c2bar, c2, p)? {
        return Err(Error::PreconditionFailed("C2bar does not complete C2".into()));
    }
    if !check_choice(c2bar, Property::Con)?.holds {
        return Err(Error::PreconditionFailed("C2bar is not consistent (consistency)".into()));
    }
    let ebar = build_overline_e(e.ground(), params)?;
    let composed = lex_compose(c1, c2, e)?;
    let composed_bar = lex_compose(c1bar, c2bar, &ebar)?;
    completes(&composed_bar, &composed, p)
}

/// A path independent completion of `c`, or `None` when none exists.
///
/// A completion may replace `c(Y)` only by an infeasible subset of `Y`, and
/// must keep `c(Y)` where that is feasible. Sets are assigned in increasing
/// bit order, so every subset of `Y` is fixed before `Y`; each assignment is
/// checked for substitutes and consistency against all of them, which makes
/// the final table path independent.
pub fn find_pi_completion(c: &ChoiceFunction, p: &EquivalencePartition) -> Result<Option<ChoiceFunction>> {
    let g = c.ground();
    check_partition(g, p)?;
    let n = g.size();
    if n > MAX_COMPLETION_ITEMS {
        return Err(Error::BudgetExceeded(format!(
            "completion search supports at most {MAX_COMPLETION_ITEMS} items, got {n}"
        )));
    }
    let t = c.tabulate()?;
    let len = 1usize << n;
    let candidates: Vec<Vec<u32>> = (0..len as u32)
        .map(|y| {
            let y = ItemSet::from_bits(y);
            let own = t.get(y);
            let mut v = Vec::new();
            if p.is_feasible(own) {
                v.push(own.bits());
            }
            v.extend(
                y.subsets()
                    .filter(|&s| !p.is_feasible(s))
                    .map(|s| s.bits()),
            );
            // Keep `C(Y)` first when it is itself infeasible.
            if let Some(pos) = v.iter().position(|&b| b == own.bits()) {
                v[..=pos].rotate_right(1);
            }
            v
        })
        .collect();

    let mut out = vec![0u32; len];
    let mut budget = COMPLETION_NODE_BUDGET;
    if search(0, &candidates, &mut out, &mut budget)? {
        let table = ChoiceTable::from_raw(n, out)?;
        return Ok(Some(ChoiceFunction::from_table(g, &table)));
    }
    Ok(None)
}

fn search(y: usize, cand: &[Vec<u32>], out: &mut [u32], budget: &mut usize) -> Result<bool> {
    if y == cand.len() {
        return Ok(true);
    }
    for &v in &cand[y] {
        if *budget == 0 {
            return Err(Error::BudgetExceeded("completion search node budget exhausted".into()));
        }
        *budget -= 1;
        if compatible(y as u32, v, out) {
            out[y] = v;
            if search(y + 1, cand, out, budget)? {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Substitutes and consistency between `Y ↦ v` and every proper subset.
fn compatible(y: u32, v: u32, out: &[u32]) -> bool {
    let mut s = y;
    while s != 0 {
        s = (s - 1) & y;
        let cs = out[s as usize];
        // Rejected from the subset, chosen from the superset.
        if (s & !cs) & v != 0 {
            return false;
        }
        if v & !s == 0 && cs != v {
            return false;
        }
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Example6Variant {
    /// All three branches as stated, so `E(∅) = X ∖ {a}`.
    Literal,
    /// `E(∅) = ∅`; every other feasible set as stated.
    EmptyBase,
}

/// The exclusion built from `a ∼ c ≁ b` with `I_a = {a, c}`.
#[derive(Clone, Debug)]
pub struct Example6 {
    pub exclusion: ExclusionFunction,
    pub partition: EquivalencePartition,
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub variant: Example6Variant,
}

/// Builds the exclusion over `ground` with partition `p`, which must put
/// `a` and `c` alone in one class and `b` in another.
///
/// Infeasible sets are mapped to the universe; only feasible sets can be
/// chosen by a many-to-one first input.
pub fn build_example6(
    ground: &GroundSet,
    p: &EquivalencePartition,
    (a, b, c): (usize, usize, usize),
    variant: Example6Variant,
) -> Result<Example6> {
    check_partition(ground, p)?;
    let n = ground.size();
    if a >= n || b >= n || c >= n {
        return Err(Error::ShapeMismatch(format!("items {a}, {b}, {c} outside {n} items")));
    }
    let ia = ItemSet::singleton(a).with(c);
    if a == c || p.class(a) != ia || p.equivalent(a, b) {
        return Err(Error::ShapeMismatch("the partition must have I_a = {a, c} with b outside".into()));
    }
    let full = ground.full();
    let exclusion = ExclusionFunction::from_fn(ground, |z| {
        if !p.is_feasible(z) {
            return SetValue::Top;
        }
        if z.is_empty() && variant == Example6Variant::EmptyBase {
            return SetValue::EMPTY;
        }
        let iz = p.closure(z);
        if ia.is_disjoint(iz) {
            SetValue::Finite(full.without(a))
        } else if iz == ia {
            SetValue::Finite(ia)
        } else {
            SetValue::Top
        }
    });
    Ok(Example6 { exclusion, partition: p.clone(), a, b, c, variant })
}

impl Example6 {
    /// The three-branch function: `C` away from `{a, c}`; at `{a, c}` it
    /// chooses both when `a ∈ C(X)` and `C({a, c}) = {c}`, and `C({a, c})`
    /// otherwise.
    pub fn completion(&self, composed: &ChoiceFunction) -> Result<ChoiceFunction> {
        let g = composed.ground();
        let ac = ItemSet::singleton(self.a).with(self.c);
        let both = composed.eval(g.full())?.contains(self.a) && composed.eval(ac)? == ItemSet::singleton(self.c);
        let mut map = BTreeMap::new();
        for y in g.all_subsets() {
            let v = if y == ac && both { ac } else { composed.eval(y)? };
            map.insert(y, v);
        }
        ChoiceFunction::table(g, map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::LinearOrder;

    fn s(items: &[usize]) -> ItemSet {
        ItemSet::from_items(items.iter().copied())
    }

    fn part_ac_b() -> EquivalencePartition {
        EquivalencePartition::new(vec![s(&[0, 2]), s(&[1])]).unwrap()
    }

    #[test]
    fn feasibility() {
        let p = part_ac_b();
        assert!(is_feasible(s(&[0, 1]), &p));
        assert!(!is_feasible(s(&[0, 2]), &p));
        assert!(is_feasible(ItemSet::EMPTY, &p));
    }

    #[test]
    fn equivalence_excluding_examples() {
        let g = GroundSet::with_headroom(3, 0).unwrap();
        let p = part_ac_b();
        assert!(is_equivalence_excluding(&ExclusionFunction::underline_equiv(&g, p.clone()).unwrap(), &p).unwrap());
        assert!(!is_equivalence_excluding(&ExclusionFunction::identity(&g), &p).unwrap());
        let ex = build_example6(&g, &p, (0, 1, 2), Example6Variant::Literal).unwrap();
        assert!(is_equivalence_excluding(&ex.exclusion, &p).unwrap());
    }

    #[test]
    fn example6_branches() {
        let g = GroundSet::with_headroom(3, 0).unwrap();
        let p = part_ac_b();
        let e = build_example6(&g, &p, (0, 1, 2), Example6Variant::Literal).unwrap().exclusion;
        assert_eq!(e.eval(ItemSet::EMPTY).unwrap(), SetValue::Finite(s(&[1, 2])));
        assert_eq!(e.eval(s(&[0])).unwrap(), SetValue::Finite(s(&[0, 2])));
        assert_eq!(e.eval(s(&[0, 1])).unwrap(), SetValue::Top);
        let e = build_example6(&g, &p, (0, 1, 2), Example6Variant::EmptyBase).unwrap().exclusion;
        assert_eq!(e.eval(ItemSet::EMPTY).unwrap(), SetValue::EMPTY);
        assert!(check_equiv_dilation(&e, &p, DilationCondition::WeakAon).unwrap());
        assert!(check_equiv_dilation(&e, &p, DilationCondition::Mto1Monotone).unwrap());
    }

    #[test]
    fn self_completion_and_search() {
        let g = GroundSet::new(4).unwrap();
        let p = EquivalencePartition::new(vec![s(&[0, 1]), s(&[2, 3])]).unwrap();
        let c = ChoiceFunction::mto1_responsive(&g, LinearOrder::from_acceptable(&[0, 1, 2, 3], 4).unwrap(), 2, p.clone())
            .unwrap();
        assert!(completes(&c, &c, &p).unwrap());
        let found = find_pi_completion(&c, &p).unwrap().expect("completable");
        assert!(completes(&found, &c, &p).unwrap());
        assert!(check_choice(&found, Property::Pi).unwrap().holds);
    }

    #[test]
    fn infeasible_output_is_unconstrained() {
        let g = GroundSet::with_headroom(3, 0).unwrap();
        let p = part_ac_b();
        let c = ChoiceFunction::from_fn(&g, |y| if y == s(&[0, 2]) { s(&[2]) } else { y });
        let cbar = ChoiceFunction::from_fn(&g, |y| y);
        assert!(completes(&cbar, &c, &p).unwrap());
    }

    #[test]
    fn lemma_rejects_inconsistent_second_completion() {
        let g = GroundSet::with_headroom(4, 0).unwrap();
        let p = EquivalencePartition::new(vec![s(&[0, 1]), s(&[2, 3])]).unwrap();
        let e = ExclusionFunction::capacity(&g, 1);
        let c = ChoiceFunction::empty(&g);
        // Choosing {0,1} from {0,1} and nothing from {0,1,2}: infeasible
        // where it deviates, so it completes the empty function, but breaks
        // consistency.
        let bad = ChoiceFunction::from_fn(&g, |y| if y == s(&[0, 1]) { y } else { ItemSet::EMPTY });
        let err = verify_lemma_mto1(&c, &c, &c, &bad, &e, &p);
        assert!(matches!(&err, Err(Error::PreconditionFailed(m)) if m.contains("consistency")), "{err:?}");
    }
}
