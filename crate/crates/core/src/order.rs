use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::set::ItemSet;

/// A linear order over the items plus the `∅` marker.
///
/// Serialized as an array of item indices with a single `null` standing for
/// `∅`. Items ranked below the marker are unacceptable.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Option<usize>>", into = "Vec<Option<usize>>")]
pub struct LinearOrder {
    ranking: Vec<Option<usize>>,
    cutoff: usize,
}

impl LinearOrder {
    /// Validates that `ranking` is a permutation of `0..m` plus one marker.
    pub fn new(ranking: Vec<Option<usize>>) -> Result<Self> {
        let m = ranking.len().saturating_sub(1);
        let markers = ranking.iter().filter(|r| r.is_none()).count();
        if markers != 1 {
            return Err(Error::InvalidOrder(format!(
                "expected exactly one null marker, found {markers}"
            )));
        }
        let mut seen = vec![false; m];
        for &i in ranking.iter().flatten() {
            if i >= m || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidOrder(format!(
                    "ranking is not a permutation of 0..{m}: item {i}"
                )));
            }
        }
        let cutoff = ranking.iter().position(Option::is_none).unwrap_or(0);
        Ok(LinearOrder { ranking, cutoff })
    }

    /// `acceptable` in rank order, then `∅`, then the remaining items ascending.
    pub fn from_acceptable(acceptable: &[usize], n: usize) -> Result<Self> {
        let acc = ItemSet::from_items(acceptable.iter().copied());
        let mut ranking: Vec<Option<usize>> = acceptable.iter().map(|&i| Some(i)).collect();
        ranking.push(None);
        ranking.extend((0..n).filter(|&i| !acc.contains(i)).map(Some));
        Self::new(ranking)
    }

    /// Number of items ranked.
    pub fn size(&self) -> usize {
        self.ranking.len() - 1
    }

    pub fn ranking(&self) -> &[Option<usize>] {
        &self.ranking
    }

    /// Acceptable items, best first.
    pub fn acceptable(&self) -> impl Iterator<Item = usize> + '_ {
        self.ranking[..self.cutoff].iter().map(|r| r.unwrap())
    }

    pub fn acceptable_set(&self) -> ItemSet {
        self.acceptable().collect()
    }

    pub fn best_in(&self, y: ItemSet) -> Option<usize> {
        self.acceptable().find(|&i| y.contains(i))
    }

    /// The `quota` best acceptable members of `y`.
    pub fn top(&self, y: ItemSet, quota: usize) -> ItemSet {
        self.acceptable()
            .filter(|&i| y.contains(i))
            .take(quota)
            .collect()
    }
}

impl TryFrom<Vec<Option<usize>>> for LinearOrder {
    type Error = Error;
    fn try_from(v: Vec<Option<usize>>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<LinearOrder> for Vec<Option<usize>> {
    fn from(o: LinearOrder) -> Self {
        o.ranking
    }
}

impl fmt::Debug for LinearOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, r) in self.ranking.iter().enumerate() {
            if k > 0 {
                f.write_str("≻")?;
            }
            match r {
                Some(i) => write!(f, "{i}")?,
                None => f.write_str("∅")?,
            }
        }
        Ok(())
    }
}
