use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exclusion::ExclusionFunction;
use crate::order::LinearOrder;
use crate::partition::EquivalencePartition;
use crate::set::{GroundSet, ItemSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProcedureKind {
    /// A chooser may act while the running total of prior picks is below `N`.
    AggregateQuota,
    /// A chooser may act while every prior chooser individually picked fewer than `N`.
    IndividualQuota,
}

#[derive(Clone, Debug)]
pub struct LexRule {
    pub first: ChoiceFunction,
    pub second: ChoiceFunction,
    pub exclusion: ExclusionFunction,
}

#[derive(Clone, Debug)]
pub struct ProcedureRule {
    pub kind: ProcedureKind,
    pub components: Vec<ChoiceFunction>,
    pub quota: usize,
}

#[derive(Clone, Debug)]
pub enum ChoiceRule {
    Responsive {
        order: LinearOrder,
        quota: usize,
    },
    UnionOfOrders(Vec<LinearOrder>),
    Table(Arc<BTreeMap<ItemSet, ItemSet>>),
    Mto1Responsive {
        order: LinearOrder,
        quota: usize,
        partition: EquivalencePartition,
    },
    Lex(Arc<LexRule>),
    Procedure(Arc<ProcedureRule>),
}

/// A contraction on the subsets of a ground set.
#[derive(Clone, Debug)]
pub struct ChoiceFunction {
    ground: GroundSet,
    rule: ChoiceRule,
}

impl ChoiceFunction {
    pub fn responsive(ground: &GroundSet, order: LinearOrder, quota: usize) -> Result<Self> {
        check_order(ground, &order)?;
        if quota > ground.size() {
            return Err(Error::InvalidParams(format!(
                "quota {quota} exceeds ground size {}",
                ground.size()
            )));
        }
        Ok(Self::from_rule(ground, ChoiceRule::Responsive { order, quota }))
    }

    pub fn union_of_orders(ground: &GroundSet, orders: Vec<LinearOrder>) -> Result<Self> {
        for o in &orders {
            check_order(ground, o)?;
        }
        Ok(Self::from_rule(ground, ChoiceRule::UnionOfOrders(orders)))
    }

    pub fn mto1_responsive(
        ground: &GroundSet,
        order: LinearOrder,
        quota: usize,
        partition: EquivalencePartition,
    ) -> Result<Self> {
        check_order(ground, &order)?;
        if partition.size() != ground.size() {
            return Err(Error::GroundMismatch {
                left: ground.size(),
                right: partition.size(),
            });
        }
        Ok(Self::from_rule(
            ground,
            ChoiceRule::Mto1Responsive {
                order,
                quota,
                partition,
            },
        ))
    }

    /// A table rule. Entries must be contractions; absent entries fail at evaluation.
    pub fn table(ground: &GroundSet, map: BTreeMap<ItemSet, ItemSet>) -> Result<Self> {
        for (&y, &c) in &map {
            ground.check(y)?;
            if !c.is_subset_of(y) {
                return Err(Error::InvalidParams(format!(
                    "table maps {y} to {c}, which is not a subset"
                )));
            }
        }
        Ok(Self::from_rule(ground, ChoiceRule::Table(Arc::new(map))))
    }

    /// Tabulates `f` over every subset; outputs are intersected with the input.
    pub fn from_fn(ground: &GroundSet, mut f: impl FnMut(ItemSet) -> ItemSet) -> Self {
        let map = ground
            .full()
            .subsets()
            .map(|y| (y, f(y) & y))
            .collect();
        Self::from_rule(ground, ChoiceRule::Table(Arc::new(map)))
    }

    pub fn from_table(ground: &GroundSet, table: &ChoiceTable) -> Self {
        Self::from_fn(ground, |y| table.get(y))
    }

    /// The constant-∅ function.
    pub fn empty(ground: &GroundSet) -> Self {
        Self::from_rule(ground, ChoiceRule::UnionOfOrders(Vec::new()))
    }

    pub(crate) fn from_rule(ground: &GroundSet, rule: ChoiceRule) -> Self {
        ChoiceFunction {
            ground: ground.clone(),
            rule,
        }
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn rule(&self) -> &ChoiceRule {
        &self.rule
    }

    pub fn eval(&self, y: ItemSet) -> Result<ItemSet> {
        self.ground.check(y)?;
        self.eval_in(y)
    }

    fn eval_in(&self, y: ItemSet) -> Result<ItemSet> {
        match &self.rule {
            ChoiceRule::Responsive { order, quota } => Ok(order.top(y, *quota)),
            ChoiceRule::UnionOfOrders(orders) => {
                Ok(orders.iter().filter_map(|o| o.best_in(y)).collect())
            }
            ChoiceRule::Table(map) => map.get(&y).copied().ok_or(Error::MissingTableEntry(y)),
            ChoiceRule::Mto1Responsive {
                order,
                quota,
                partition,
            } => Ok(mto1_greedy(order, *quota, partition, y)),
            ChoiceRule::Lex(l) => {
                let z = l.first.eval_in(y)?;
                let rest = l.exclusion.eval(z)?.remove_from(y);
                Ok(z | l.second.eval_in(rest)?)
            }
            ChoiceRule::Procedure(p) => {
                let mut chosen = ItemSet::EMPTY;
                let mut open = true;
                for c in &p.components {
                    let gate = match p.kind {
                        ProcedureKind::AggregateQuota => chosen.len() < p.quota,
                        ProcedureKind::IndividualQuota => open,
                    };
                    if !gate {
                        break;
                    }
                    let pick = c.eval_in(y - chosen)?;
                    open &= pick.len() < p.quota;
                    chosen = chosen | pick;
                }
                Ok(chosen)
            }
        }
    }

    /// Dense evaluation over every subset of the ground set.
    pub fn tabulate(&self) -> Result<ChoiceTable> {
        let n = self.ground.size();
        let out = match &self.rule {
            ChoiceRule::Lex(l) => {
                let t1 = l.first.tabulate()?;
                let t2 = l.second.tabulate()?;
                let mut out = vec![0u32; 1 << n];
                for (y, slot) in out.iter_mut().enumerate() {
                    let y = ItemSet::from_bits(y as u32);
                    let z = t1.get(y);
                    let rest = l.exclusion.eval(z)?.remove_from(y);
                    *slot = (z | t2.get(rest)).bits();
                }
                out
            }
            _ => (0..1u32 << n)
                .map(|y| self.eval_in(ItemSet::from_bits(y)).map(ItemSet::bits))
                .collect::<Result<_>>()?,
        };
        Ok(ChoiceTable { n, out })
    }

    /// Human-readable rule name.
    pub fn kind(&self) -> &'static str {
        match self.rule {
            ChoiceRule::Responsive { .. } => "responsive",
            ChoiceRule::UnionOfOrders(_) => "union-of-orders",
            ChoiceRule::Table(_) => "table",
            ChoiceRule::Mto1Responsive { .. } => "mto1-responsive",
            ChoiceRule::Lex(_) => "lex",
            ChoiceRule::Procedure(_) => "procedure",
        }
    }
}

fn check_order(ground: &GroundSet, order: &LinearOrder) -> Result<()> {
    if order.size() == ground.size() {
        Ok(())
    } else {
        Err(Error::InvalidOrder(format!(
            "order ranks {} items, ground has {}",
            order.size(),
            ground.size()
        )))
    }
}

fn mto1_greedy(
    order: &LinearOrder,
    quota: usize,
    partition: &EquivalencePartition,
    y: ItemSet,
) -> ItemSet {
    let mut chosen = ItemSet::EMPTY;
    let mut occupied = ItemSet::EMPTY;
    for i in order.acceptable() {
        if chosen.len() == quota {
            break;
        }
        if y.contains(i) && !occupied.contains(i) {
            chosen = chosen.with(i);
            occupied = occupied | partition.class(i);
        }
    }
    chosen
}

/// A choice function evaluated on all `2^n` subsets.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ChoiceTable {
    n: usize,
    out: Vec<u32>,
}

impl ChoiceTable {
    /// `out[y]` is the choice from the subset with bit pattern `y`.
    pub fn from_raw(n: usize, out: Vec<u32>) -> Result<Self> {
        if out.len() != 1 << n {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a ground set of {n} items",
                out.len()
            )));
        }
        if let Some(y) = (0..out.len()).find(|&y| out[y] & !(y as u32) != 0) {
            return Err(Error::InvalidParams(format!(
                "entry {} is not a contraction",
                ItemSet::from_bits(y as u32)
            )));
        }
        Ok(ChoiceTable { n, out })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, y: ItemSet) -> ItemSet {
        ItemSet::from_bits(self.out[y.bits() as usize])
    }

    pub fn raw(&self) -> &[u32] {
        &self.out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g3() -> GroundSet {
        GroundSet::new(3).unwrap()
    }

    fn set(items: &[usize]) -> ItemSet {
        ItemSet::from_items(items.iter().copied())
    }

    #[test]
    fn responsive_examples() {
        let abc = LinearOrder::from_acceptable(&[0, 1, 2], 3).unwrap();
        let c = ChoiceFunction::responsive(&g3(), abc, 2).unwrap();
        assert_eq!(c.eval(set(&[0, 1, 2])).unwrap(), set(&[0, 1]));

        let a_only = LinearOrder::new(vec![Some(0), None, Some(1), Some(2)]).unwrap();
        let c = ChoiceFunction::responsive(&g3(), a_only, 2).unwrap();
        assert_eq!(c.eval(set(&[1])).unwrap(), ItemSet::EMPTY);
    }

    #[test]
    fn union_of_orders_example() {
        let ab = LinearOrder::from_acceptable(&[0, 1], 3).unwrap();
        let ba = LinearOrder::from_acceptable(&[1, 0], 3).unwrap();
        let c = ChoiceFunction::union_of_orders(&g3(), vec![ab, ba]).unwrap();
        assert_eq!(c.eval(set(&[0, 1])).unwrap(), set(&[0, 1]));
    }

    #[test]
    fn mto1_skips_occupied_classes() {
        let p = EquivalencePartition::new(vec![set(&[0, 2]), set(&[1])]).unwrap();
        let o = LinearOrder::from_acceptable(&[0, 2, 1], 3).unwrap();
        let c = ChoiceFunction::mto1_responsive(&g3(), o, 2, p).unwrap();
        assert_eq!(c.eval(set(&[0, 1, 2])).unwrap(), set(&[0, 1]));
    }

    #[test]
    fn table_errors() {
        let mut m = BTreeMap::new();
        m.insert(set(&[0]), set(&[0]));
        let c = ChoiceFunction::table(&g3(), m).unwrap();
        assert_eq!(c.eval(set(&[1])), Err(Error::MissingTableEntry(set(&[1]))));
        assert!(matches!(c.eval(set(&[3])), Err(Error::Domain { .. })));
        let mut bad = BTreeMap::new();
        bad.insert(set(&[0]), set(&[1]));
        assert!(ChoiceFunction::table(&g3(), bad).is_err());
    }
}
