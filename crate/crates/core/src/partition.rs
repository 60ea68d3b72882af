use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::set::ItemSet;

/// An equivalence relation on the ground set, stored as its blocks.
///
/// Two items are equivalent when they are contracts of the same agent. A set
/// is feasible when it holds at most one item per block.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<ItemSet>", into = "Vec<ItemSet>")]
pub struct EquivalencePartition {
    blocks: Vec<ItemSet>,
    class_of: Vec<u32>,
}

impl EquivalencePartition {
    /// Blocks must be non-empty, disjoint and cover `0..n` for some `n`.
    pub fn new(blocks: Vec<ItemSet>) -> Result<Self> {
        let mut covered = ItemSet::EMPTY;
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            if !b.is_disjoint(covered) {
                return Err(Error::InvalidPartition(format!("block {b} overlaps another")));
            }
            covered = covered | *b;
        }
        let n = covered.len();
        if covered != ItemSet::full(n) {
            return Err(Error::InvalidPartition(format!(
                "blocks cover {covered}, not 0..{n}"
            )));
        }
        let mut class_of = vec![0u32; n];
        for b in &blocks {
            for i in b.iter() {
                class_of[i] = b.bits();
            }
        }
        Ok(EquivalencePartition { blocks, class_of })
    }

    /// The identity relation on `0..n`.
    pub fn singletons(n: usize) -> Self {
        Self::new((0..n).map(ItemSet::singleton).collect()).expect("singletons partition")
    }

    pub fn blocks(&self) -> &[ItemSet] {
        &self.blocks
    }

    pub fn size(&self) -> usize {
        self.class_of.len()
    }

    /// `I_x`.
    #[inline]
    pub fn class(&self, x: usize) -> ItemSet {
        ItemSet::from_bits(self.class_of[x])
    }

    /// `I_Z`, the union of the classes meeting `z`.
    #[inline]
    pub fn closure(&self, z: ItemSet) -> ItemSet {
        z.iter().fold(ItemSet::EMPTY, |acc, x| acc | self.class(x))
    }

    #[inline]
    pub fn equivalent(&self, x: usize, y: usize) -> bool {
        self.class_of[x] == self.class_of[y]
    }

    #[inline]
    pub fn is_feasible(&self, z: ItemSet) -> bool {
        self.blocks.iter().all(|b| (*b & z).len() <= 1)
    }

    pub fn is_trivial(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 1)
    }
}

impl TryFrom<Vec<ItemSet>> for EquivalencePartition {
    type Error = Error;
    fn try_from(v: Vec<ItemSet>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<EquivalencePartition> for Vec<ItemSet> {
    fn from(p: EquivalencePartition) -> Self {
        p.blocks
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_and_feasibility() {
        let p = EquivalencePartition::new(vec![
            ItemSet::from_items([0, 2]),
            ItemSet::singleton(1),
        ])
        .unwrap();
        assert!(p.is_feasible(ItemSet::from_items([0, 1])));
        assert!(!p.is_feasible(ItemSet::from_items([0, 2])));
        assert!(p.is_feasible(ItemSet::EMPTY));
        assert_eq!(p.closure(ItemSet::singleton(0)), ItemSet::from_items([0, 2]));
        assert!(EquivalencePartition::new(vec![ItemSet::singleton(1)]).is_err());
    }
}
