use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::partition::EquivalencePartition;
use crate::set::{GroundSet, ItemSet, SetValue};
use crate::tlcr::TlcrParams;

#[derive(Clone, Debug)]
pub enum ExclusionRule {
    Identity,
    Empty,
    /// `Z` below `N` chosen items, the universe from `N` on.
    Capacity(usize),
    Tlcr(TlcrParams),
    /// `Z ↦ I_Z`.
    UnderlineEquiv(EquivalencePartition),
    Table(Arc<BTreeMap<ItemSet, SetValue>>),
}

/// A map from chosen sets to the items barred from the next chooser.
#[derive(Clone, Debug)]
pub struct ExclusionFunction {
    ground: GroundSet,
    rule: ExclusionRule,
}

/// Gross exclusion, reuse and domain membership of one set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Decomposition {
    /// `G(Z) = E(Z) ∪ Z`.
    pub gross: SetValue,
    /// `R(Z) = Z ∖ E(Z)`.
    pub reuse: ItemSet,
    /// Whether `Z ∈ Dom(R)`, i.e. `G(Z)` is finite.
    pub in_domain: bool,
}

impl ExclusionFunction {
    pub fn identity(ground: &GroundSet) -> Self {
        Self::from_rule(ground, ExclusionRule::Identity)
    }

    pub fn empty(ground: &GroundSet) -> Self {
        Self::from_rule(ground, ExclusionRule::Empty)
    }

    pub fn capacity(ground: &GroundSet, n: usize) -> Self {
        Self::from_rule(ground, ExclusionRule::Capacity(n))
    }

    pub fn tlcr(ground: &GroundSet, params: TlcrParams) -> Result<Self> {
        params.validate(ground)?;
        Ok(Self::from_rule(ground, ExclusionRule::Tlcr(params)))
    }

    pub fn underline_equiv(ground: &GroundSet, partition: EquivalencePartition) -> Result<Self> {
        if partition.size() != ground.size() {
            return Err(Error::GroundMismatch {
                left: ground.size(),
                right: partition.size(),
            });
        }
        Ok(Self::from_rule(ground, ExclusionRule::UnderlineEquiv(partition)))
    }

    pub fn table(ground: &GroundSet, map: BTreeMap<ItemSet, SetValue>) -> Result<Self> {
        for (&z, v) in &map {
            ground.check(z)?;
            if let SetValue::Finite(s) = v {
                ground.check(*s)?;
            }
        }
        Ok(Self::from_rule(ground, ExclusionRule::Table(Arc::new(map))))
    }

    /// Tabulates `f` over every subset.
    pub fn from_fn(ground: &GroundSet, mut f: impl FnMut(ItemSet) -> SetValue) -> Self {
        let full = ground.full();
        let map = full
            .subsets()
            .map(|z| {
                let v = match f(z) {
                    SetValue::Finite(s) => SetValue::Finite(s & full),
                    SetValue::Top => SetValue::Top,
                };
                (z, v)
            })
            .collect();
        Self::from_rule(ground, ExclusionRule::Table(Arc::new(map)))
    }

    fn from_rule(ground: &GroundSet, rule: ExclusionRule) -> Self {
        ExclusionFunction {
            ground: ground.clone(),
            rule,
        }
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn rule(&self) -> &ExclusionRule {
        &self.rule
    }

    pub fn eval(&self, z: ItemSet) -> Result<SetValue> {
        self.ground.check(z)?;
        Ok(match &self.rule {
            ExclusionRule::Identity => SetValue::Finite(z),
            ExclusionRule::Empty => SetValue::EMPTY,
            ExclusionRule::Capacity(n) => {
                if z.len() < *n {
                    SetValue::Finite(z)
                } else {
                    SetValue::Top
                }
            }
            ExclusionRule::Tlcr(p) => {
                if p.t.admits(z.len()) {
                    SetValue::Finite((z - p.reuse_at(z.len())) | p.base)
                } else {
                    SetValue::Top
                }
            }
            ExclusionRule::UnderlineEquiv(p) => SetValue::Finite(p.closure(z)),
            ExclusionRule::Table(map) => {
                return map.get(&z).copied().ok_or(Error::MissingTableEntry(z))
            }
        })
    }

    /// `K = E(∅)`.
    pub fn base(&self) -> Result<SetValue> {
        self.eval(ItemSet::EMPTY)
    }

    pub fn gross(&self, z: ItemSet) -> Result<SetValue> {
        Ok(self.eval(z)?.union(z))
    }

    pub fn reuse(&self, z: ItemSet) -> Result<ItemSet> {
        Ok(match self.eval(z)? {
            SetValue::Finite(e) => z - e,
            SetValue::Top => ItemSet::EMPTY,
        })
    }

    pub fn in_domain(&self, z: ItemSet) -> Result<bool> {
        Ok(!self.gross(z)?.is_top())
    }

    pub fn decompose(&self, z: ItemSet) -> Result<Decomposition> {
        let e = self.eval(z)?;
        let gross = e.union(z);
        Ok(Decomposition {
            gross,
            reuse: match e {
                SetValue::Finite(e) => z - e,
                SetValue::Top => ItemSet::EMPTY,
            },
            in_domain: !gross.is_top(),
        })
    }

    pub fn kind(&self) -> &'static str {
        match self.rule {
            ExclusionRule::Identity => "identity",
            ExclusionRule::Empty => "empty",
            ExclusionRule::Capacity(_) => "capacity",
            ExclusionRule::Tlcr(_) => "tlcr",
            ExclusionRule::UnderlineEquiv(_) => "underline-equiv",
            ExclusionRule::Table(_) => "table",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tlcr::Threshold;

    fn s(items: &[usize]) -> ItemSet {
        ItemSet::from_items(items.iter().copied())
    }

    #[test]
    fn canonical_rules() {
        let g = GroundSet::new(4).unwrap();
        let cap = ExclusionFunction::capacity(&g, 1);
        assert_eq!(cap.eval(ItemSet::EMPTY).unwrap(), SetValue::EMPTY);
        assert_eq!(cap.eval(s(&[0])).unwrap(), SetValue::Top);

        let p = TlcrParams::new(Threshold::Finite(3), s(&[3]), vec![s(&[]), s(&[0])]);
        let e = ExclusionFunction::tlcr(&g, p).unwrap();
        assert_eq!(e.eval(s(&[0, 1])).unwrap(), SetValue::Finite(s(&[1, 3])));
    }

    #[test]
    fn decomposition_examples() {
        let g = GroundSet::new(3).unwrap();
        let ab = s(&[0, 1]);
        let d = ExclusionFunction::identity(&g).decompose(ab).unwrap();
        assert_eq!((d.gross, d.reuse, d.in_domain), (SetValue::Finite(ab), ItemSet::EMPTY, true));
        let d = ExclusionFunction::empty(&g).decompose(ab).unwrap();
        assert_eq!((d.gross, d.reuse, d.in_domain), (SetValue::Finite(ab), ab, true));
        let d = ExclusionFunction::capacity(&g, 1).decompose(s(&[0])).unwrap();
        assert_eq!((d.gross, d.reuse, d.in_domain), (SetValue::Top, ItemSet::EMPTY, false));
    }
}
