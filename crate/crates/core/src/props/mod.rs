//! Exhaustive property checkers for choice functions and condition checkers
//! for exclusion functions.
//!
//! Every quantifier is evaluated over subsets in scan order (cardinality,
//! then lexicographic), and the first violation in that order is reported.
//! Parallel loops reduce with `find_map_first`, so witnesses do not depend on
//! thread scheduling.

mod classify;
mod preservation;
mod safety;

use std::fmt;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::choice::{ChoiceFunction, ChoiceRule, ChoiceTable};
use crate::error::{Error, Result};
use crate::partition::EquivalencePartition;
use crate::set::{subsets_in_scan_order, ItemSet, MAX_ITEMS};

pub use classify::{classify_on, classify_tlcr, Condition, ConditionViolation, TlcrClassification};
pub(crate) use preservation::PairSource;
pub use preservation::{
    pair_violation, verify_preservation, Mode, PairFailure, PreservationConfig, PreservationReport,
};
pub use safety::{
    check_domain_safety, check_singleton_profile, check_sm_safety, check_sv_sm_profile,
    singleton_profile, sm_safety_truncation_sensitive, SafetyDomain, SingletonProfile, SvSide,
};

/// Largest ground set on which choice properties are checked exhaustively.
pub const MAX_EXHAUSTIVE_ITEMS: usize = 12;

/// Parallel loops kick in from this size; smaller tables are cheaper serially.
const PARALLEL_FROM: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Property {
    Pi,
    Sub,
    Con,
    Sm,
    Mto1,
}

impl Property {
    pub const ALL: [Property; 5] = [Property::Pi, Property::Sub, Property::Con, Property::Sm, Property::Mto1];

    pub fn name(self) -> &'static str {
        match self {
            Property::Pi => "PI",
            Property::Sub => "SUB",
            Property::Con => "CON",
            Property::Sm => "SM",
            Property::Mto1 => "MTO1",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Property {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Property::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParams(format!("unknown property {s:?}")))
    }
}

/// A falsifying instance of a choice property.
///
/// For SUB, CON and SM, `y_small ⊆ y_big`. For PI the pair is the two halves
/// of the split input. For MTO1 both fields hold the offending input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub y_small: ItemSet,
    pub y_big: ItemSet,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyVerdict {
    pub property: Property,
    pub holds: bool,
    pub witness: Option<Violation>,
}

impl PropertyVerdict {
    fn from_violation(property: Property, v: Option<Violation>) -> Self {
        PropertyVerdict {
            property,
            holds: v.is_none(),
            witness: v,
        }
    }
}

fn scan(n: usize) -> &'static [ItemSet] {
    static CACHE: [OnceLock<Vec<ItemSet>>; MAX_ITEMS + 1] = [const { OnceLock::new() }; MAX_ITEMS + 1];
    CACHE[n].get_or_init(|| subsets_in_scan_order(n, n))
}

fn first_over<F>(n: usize, f: F) -> Option<Violation>
where
    F: Fn(usize, ItemSet) -> Option<Violation> + Sync,
{
    let order = scan(n);
    if n >= PARALLEL_FROM {
        order.par_iter().enumerate().find_map_first(|(i, &y)| f(i, y))
    } else {
        order.iter().enumerate().find_map(|(i, &y)| f(i, y))
    }
}

/// First violation of `property` by a tabulated choice function.
pub fn table_violation(
    t: &ChoiceTable,
    property: Property,
    partition: Option<&EquivalencePartition>,
) -> Result<Option<Violation>> {
    let n = t.n();
    if n > MAX_EXHAUSTIVE_ITEMS {
        return Err(Error::BudgetExceeded(format!(
            "exhaustive checks support at most {MAX_EXHAUSTIVE_ITEMS} items, got {n}"
        )));
    }
    let order = scan(n);
    Ok(match property {
        Property::Pi => first_over(n, |i, y| {
            order[i..].iter().find_map(|&y2| {
                let lhs = t.get(y | y2);
                let rhs = t.get(t.get(y) | t.get(y2));
                (lhs != rhs).then(|| Violation {
                    y_small: y,
                    y_big: y2,
                    detail: format!("C(Y∪Y')={lhs} but C(C(Y)∪C(Y'))={rhs}"),
                })
            })
        }),
        Property::Sub => first_over(n, |_, y| {
            let rejected = y - t.get(y);
            order.iter().find_map(|&y2| {
                let back = rejected & t.get(y2);
                (y != y2 && y.is_subset_of(y2) && !back.is_empty()).then(|| Violation {
                    y_small: y,
                    y_big: y2,
                    detail: format!("{back} rejected from Y but chosen from Y'"),
                })
            })
        }),
        Property::Con => first_over(n, |_, y| {
            let cy = t.get(y);
            order.iter().find_map(|&y2| {
                let c2 = t.get(y2);
                (y != y2 && y.is_subset_of(y2) && c2.is_subset_of(y) && cy != c2).then(|| Violation {
                    y_small: y,
                    y_big: y2,
                    detail: format!("C(Y')={c2} ⊆ Y ⊆ Y' but C(Y)={cy}"),
                })
            })
        }),
        Property::Sm => first_over(n, |_, y| {
            let k = t.get(y).len();
            order.iter().find_map(|&y2| {
                let k2 = t.get(y2).len();
                (y.is_subset_of(y2) && k > k2).then(|| Violation {
                    y_small: y,
                    y_big: y2,
                    detail: format!("|C(Y)|={k} > |C(Y')|={k2}"),
                })
            })
        }),
        Property::Mto1 => {
            let p = partition.ok_or(Error::MissingPartition)?;
            if p.size() != n {
                return Err(Error::GroundMismatch { left: n, right: p.size() });
            }
            first_over(n, |_, y| {
                let c = t.get(y);
                (!p.is_feasible(c)).then(|| {
                    let pair: Vec<usize> = p
                        .blocks()
                        .iter()
                        .map(|b| *b & c)
                        .find(|hit| hit.len() > 1)
                        .map(|hit| hit.iter().take(2).collect())
                        .unwrap_or_default();
                    Violation {
                        y_small: y,
                        y_big: y,
                        detail: format!("chosen items {pair:?} are equivalent"),
                    }
                })
            })
        }
    })
}

pub fn check_table(
    t: &ChoiceTable,
    property: Property,
    partition: Option<&EquivalencePartition>,
) -> Result<PropertyVerdict> {
    Ok(PropertyVerdict::from_violation(property, table_violation(t, property, partition)?))
}

/// Checks `property` over every subset. MTO1 uses the partition carried by a
/// many-to-one rule; use [`check_choice_with`] to supply one explicitly.
pub fn check_choice(c: &ChoiceFunction, property: Property) -> Result<PropertyVerdict> {
    let partition = match c.rule() {
        ChoiceRule::Mto1Responsive { partition, .. } => Some(partition),
        _ => None,
    };
    check_choice_with(c, property, partition)
}

pub fn check_choice_with(
    c: &ChoiceFunction,
    property: Property,
    partition: Option<&EquivalencePartition>,
) -> Result<PropertyVerdict> {
    if c.ground().size() > MAX_EXHAUSTIVE_ITEMS {
        return Err(Error::BudgetExceeded(format!(
            "exhaustive checks support at most {MAX_EXHAUSTIVE_ITEMS} items, got {}",
            c.ground().size()
        )));
    }
    check_table(&c.tabulate()?, property, partition)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::LinearOrder;
    use crate::set::GroundSet;
    use std::collections::BTreeMap;

    fn s(items: &[usize]) -> ItemSet {
        ItemSet::from_items(items.iter().copied())
    }

    fn table(g: &GroundSet, entries: &[(&[usize], &[usize])]) -> ChoiceFunction {
        let mut m: BTreeMap<ItemSet, ItemSet> = g.all_subsets().into_iter().map(|y| (y, y)).collect();
        for (y, c) in entries {
            m.insert(s(y), s(c));
        }
        ChoiceFunction::table(g, m).unwrap()
    }

    #[test]
    fn responsive_is_pi() {
        let g = GroundSet::new(3).unwrap();
        let c = ChoiceFunction::responsive(&g, LinearOrder::from_acceptable(&[0, 1, 2], 3).unwrap(), 2).unwrap();
        assert!(check_choice(&c, Property::Pi).unwrap().holds);
    }

    #[test]
    fn con_witness() {
        let g = GroundSet::new(2).unwrap();
        let c = table(&g, &[(&[0, 1], &[1]), (&[1], &[])]);
        let v = check_choice(&c, Property::Con).unwrap();
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert_eq!((w.y_small, w.y_big), (s(&[1]), s(&[0, 1])));
    }

    #[test]
    fn sm_witness() {
        let g = GroundSet::new(2).unwrap();
        let c = table(&g, &[(&[0], &[0]), (&[0, 1], &[])]);
        let w = check_choice(&c, Property::Sm).unwrap().witness.unwrap();
        assert_eq!((w.y_small, w.y_big), (s(&[0]), s(&[0, 1])));
    }

    #[test]
    fn mto1_needs_partition() {
        let g = GroundSet::new(2).unwrap();
        let c = table(&g, &[]);
        assert_eq!(check_choice(&c, Property::Mto1), Err(Error::MissingPartition));
        let p = EquivalencePartition::new(vec![s(&[0, 1])]).unwrap();
        assert!(!check_choice_with(&c, Property::Mto1, Some(&p)).unwrap().holds);
    }
}
