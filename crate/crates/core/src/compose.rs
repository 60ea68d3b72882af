//! Lexicographic composition and its nested forms.
//!
//! `lex_compose(C1, C2, E)` chooses `C1(Y) ∪ C2(Y ∖ E(C1(Y)))`. Subtracting
//! the universe leaves nothing, so `E = TOP` blocks the second chooser.

use std::sync::Arc;

use crate::choice::{ChoiceFunction, ChoiceRule, ChoiceTable, LexRule, ProcedureKind, ProcedureRule};
use crate::error::{Error, Result};
use crate::exclusion::ExclusionFunction;
use crate::set::{GroundSet, ItemSet};
use crate::tlcr::{Threshold, TlcrParams};

pub fn lex_compose(
    c1: &ChoiceFunction,
    c2: &ChoiceFunction,
    e: &ExclusionFunction,
) -> Result<ChoiceFunction> {
    c1.ground().same_size(c2.ground())?;
    c1.ground().same_size(e.ground())?;
    Ok(ChoiceFunction::from_rule(
        c1.ground(),
        ChoiceRule::Lex(Arc::new(LexRule {
            first: c1.clone(),
            second: c2.clone(),
            exclusion: e.clone(),
        })),
    ))
}

#[derive(Clone, Debug)]
pub enum CompositionTree {
    Leaf(ChoiceFunction),
    Node {
        left: Box<CompositionTree>,
        right: Box<CompositionTree>,
        label: ExclusionFunction,
    },
}

impl CompositionTree {
    pub fn node(left: CompositionTree, right: CompositionTree, label: ExclusionFunction) -> Self {
        CompositionTree::Node {
            left: Box::new(left),
            right: Box::new(right),
            label,
        }
    }

    pub fn leaves(&self) -> usize {
        match self {
            CompositionTree::Leaf(_) => 1,
            CompositionTree::Node { left, right, .. } => left.leaves() + right.leaves(),
        }
    }

    pub fn eval(&self) -> Result<ChoiceFunction> {
        eval_tree(self)
    }
}

pub fn eval_tree(tree: &CompositionTree) -> Result<ChoiceFunction> {
    match tree {
        CompositionTree::Leaf(c) => Ok(c.clone()),
        CompositionTree::Node { left, right, label } => {
            lex_compose(&eval_tree(left)?, &eval_tree(right)?, label)
        }
    }
}

fn check_arity(choices: &[ChoiceFunction], exclusions: &[ExclusionFunction]) -> Result<()> {
    if choices.is_empty() || exclusions.len() + 1 != choices.len() {
        return Err(Error::ArityMismatch {
            choices: choices.len(),
            expected: choices.len().saturating_sub(1),
            got: exclusions.len(),
        });
    }
    Ok(())
}

/// `L_{E1}(C1, L_{E2}(C2, …))`, a right-nested tree.
pub fn fold_left_tree(
    choices: &[ChoiceFunction],
    exclusions: &[ExclusionFunction],
) -> Result<CompositionTree> {
    check_arity(choices, exclusions)?;
    let mut acc = CompositionTree::Leaf(choices[choices.len() - 1].clone());
    for (c, e) in choices.iter().rev().skip(1).zip(exclusions.iter().rev()) {
        acc = CompositionTree::node(CompositionTree::Leaf(c.clone()), acc, e.clone());
    }
    Ok(acc)
}

/// `L_{E_{m-1}}(…L_{E1}(C1, C2)…, Cm)`, a left-nested tree.
pub fn fold_right_tree(
    choices: &[ChoiceFunction],
    exclusions: &[ExclusionFunction],
) -> Result<CompositionTree> {
    check_arity(choices, exclusions)?;
    let mut acc = CompositionTree::Leaf(choices[0].clone());
    for (c, e) in choices.iter().skip(1).zip(exclusions) {
        acc = CompositionTree::node(acc, CompositionTree::Leaf(c.clone()), e.clone());
    }
    Ok(acc)
}

pub fn fold_left(choices: &[ChoiceFunction], exclusions: &[ExclusionFunction]) -> Result<ChoiceFunction> {
    eval_tree(&fold_left_tree(choices, exclusions)?)
}

pub fn fold_right(choices: &[ChoiceFunction], exclusions: &[ExclusionFunction]) -> Result<ChoiceFunction> {
    eval_tree(&fold_right_tree(choices, exclusions)?)
}

fn procedure(kind: ProcedureKind, choices: &[ChoiceFunction], quota: usize) -> Result<ChoiceFunction> {
    let first = choices.first().ok_or(Error::ArityMismatch {
        choices: 0,
        expected: 0,
        got: 0,
    })?;
    for c in choices {
        first.ground().same_size(c.ground())?;
    }
    Ok(ChoiceFunction::from_rule(
        first.ground(),
        ChoiceRule::Procedure(Arc::new(ProcedureRule {
            kind,
            components: choices.to_vec(),
            quota,
        })),
    ))
}

/// Each chooser in turn picks freely from what is left while the prior
/// choosers picked fewer than `n` items in total, and picks nothing after.
pub fn procedure_aggregate_quota(choices: &[ChoiceFunction], n: usize) -> Result<ChoiceFunction> {
    procedure(ProcedureKind::AggregateQuota, choices, n)
}

/// Each chooser in turn picks freely from what is left while every prior
/// chooser individually picked fewer than `n` items, and picks nothing after.
pub fn procedure_individual_quota(choices: &[ChoiceFunction], n: usize) -> Result<ChoiceFunction> {
    procedure(ProcedureKind::IndividualQuota, choices, n)
}

/// The capacity-style label `t = n`, `K = ∅`, no reuse.
pub fn capacity_label(ground: &GroundSet, n: usize) -> ExclusionFunction {
    ExclusionFunction::tlcr(ground, TlcrParams::capacity(n)).expect("capacity params are valid")
}

/// Right composition under `E(Z) = Z` for `|Z| ≤ k` and the universe beyond.
pub fn build_soft_quota_tree(choices: &[ChoiceFunction], k: usize) -> Result<CompositionTree> {
    let first = choices.first().ok_or(Error::ArityMismatch {
        choices: 0,
        expected: 0,
        got: 0,
    })?;
    let label = capacity_label(first.ground(), k + 1);
    fold_right_tree(choices, &vec![label; choices.len() - 1])
}

/// Right composition where the `j`-th chooser may not take items whose
/// reserve level is below `j`.
///
/// An item's level is the largest `j` with `x ∈ X_j`; items outside `X_1`
/// are unrestricted. The node adding chooser `j` carries the label
/// `Z ↦ Z ∪ (X_1 ∖ X_j)`, a threshold-linear exclusion with `t = ∞`,
/// `K = X_1 ∖ X_j` and no reuse.
pub fn build_nested_reserves(
    choices: &[ChoiceFunction],
    reserves: &[ItemSet],
) -> Result<CompositionTree> {
    let first = choices.first().ok_or(Error::ArityMismatch {
        choices: 0,
        expected: 0,
        got: 0,
    })?;
    if reserves.len() != choices.len() {
        return Err(Error::ArityMismatch {
            choices: choices.len(),
            expected: choices.len(),
            got: reserves.len(),
        });
    }
    let ground = first.ground();
    for r in reserves {
        ground.check(*r)?;
    }
    if let Some(j) = (1..reserves.len()).find(|&j| !reserves[j].is_subset_of(reserves[j - 1])) {
        return Err(Error::NestingViolation(j));
    }
    let labels = reserves[1..]
        .iter()
        .map(|&xj| {
            let params = TlcrParams::new(Threshold::Infinite, reserves[0] - xj, Vec::new());
            ExclusionFunction::tlcr(ground, params)
        })
        .collect::<Result<Vec<_>>>()?;
    fold_right_tree(choices, &labels)
}

/// Dense table of `L_E(C1, C2)` from the tables of its inputs.
///
/// `blocks[z]` must hold the mask removed from the input after `C1` picks
/// `z`; see [`exclusion_blocks`].
pub fn compose_tables(t1: &ChoiceTable, t2: &ChoiceTable, blocks: &[u32]) -> Result<ChoiceTable> {
    let n = t1.n();
    let out = (0..1u32 << n)
        .map(|y| {
            let z = t1.get(ItemSet::from_bits(y)).bits();
            match blocks[z as usize] {
                MISSING => Err(Error::MissingTableEntry(ItemSet::from_bits(z))),
                b => Ok(z | t2.get(ItemSet::from_bits(y & !b)).bits()),
            }
        })
        .collect::<Result<Vec<u32>>>()?;
    ChoiceTable::from_raw(n, out)
}

const MISSING: u32 = u32::MAX;

/// For every `Z`, the bits removed from the input by `E(Z)`; `TOP` removes all.
/// Entries absent from a table rule are marked and raise on use.
pub fn exclusion_blocks(e: &ExclusionFunction) -> Vec<u32> {
    let full = e.ground().full();
    (0..1u32 << e.ground().size())
        .map(|z| match e.eval(ItemSet::from_bits(z)) {
            Ok(v) => match v.finite() {
                Some(s) => s.bits(),
                None => full.bits(),
            },
            Err(_) => MISSING,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::LinearOrder;

    fn s(items: &[usize]) -> ItemSet {
        ItemSet::from_items(items.iter().copied())
    }

    fn resp(g: &GroundSet, acc: &[usize], q: usize) -> ChoiceFunction {
        ChoiceFunction::responsive(g, LinearOrder::from_acceptable(acc, g.size()).unwrap(), q).unwrap()
    }

    #[test]
    fn lex_examples() {
        let g = GroundSet::new(3).unwrap();
        let c1 = resp(&g, &[0, 1, 2], 1);
        let c2 = resp(&g, &[1, 2], 1);
        let id = lex_compose(&c1, &c2, &ExclusionFunction::identity(&g)).unwrap();
        assert_eq!(id.eval(s(&[0, 1, 2])).unwrap(), s(&[0, 1]));
        let cap = lex_compose(&c1, &c2, &ExclusionFunction::capacity(&g, 1)).unwrap();
        assert_eq!(cap.eval(s(&[0, 1, 2])).unwrap(), s(&[0]));
    }

    #[test]
    fn tabulated_matches_pointwise() {
        let g = GroundSet::new(4).unwrap();
        let c1 = resp(&g, &[2, 0], 1);
        let c2 = resp(&g, &[0, 1, 3], 2);
        let e = ExclusionFunction::capacity(&g, 2);
        let lazy = lex_compose(&c1, &c2, &e).unwrap();
        let dense = compose_tables(&c1.tabulate().unwrap(), &c2.tabulate().unwrap(), &exclusion_blocks(&e)).unwrap();
        for y in g.all_subsets() {
            assert_eq!(lazy.eval(y).unwrap(), dense.get(y));
        }
    }

    #[test]
    fn arity_and_nesting_errors() {
        let g = GroundSet::new(3).unwrap();
        let c = resp(&g, &[0], 1);
        assert!(matches!(
            fold_left(&[c.clone(), c.clone()], &[]),
            Err(Error::ArityMismatch { .. })
        ));
        assert_eq!(fold_left(std::slice::from_ref(&c), &[]).unwrap().eval(s(&[0])).unwrap(), s(&[0]));
        assert!(matches!(
            build_nested_reserves(&[c.clone(), c], &[s(&[0]), s(&[1])]),
            Err(Error::NestingViolation(1))
        ));
    }
}
