use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::set::{GroundSet, ItemSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Threshold {
    Finite(usize),
    Infinite,
}

impl Threshold {
    /// Whether a set of size `len` lies strictly below the threshold.
    #[inline]
    pub fn admits(self, len: usize) -> bool {
        match self {
            Threshold::Finite(t) => len < t,
            Threshold::Infinite => true,
        }
    }

    pub fn finite(self) -> Option<usize> {
        match self {
            Threshold::Finite(t) => Some(t),
            Threshold::Infinite => None,
        }
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Finite(t) => write!(f, "{t}"),
            Threshold::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Threshold {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Threshold::Finite(t) => s.serialize_u64(*t as u64),
            Threshold::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Threshold {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Threshold;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a non-negative integer or \"inf\"")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Threshold, E> {
                Ok(Threshold::Finite(v as usize))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Threshold, E> {
                usize::try_from(v)
                    .map(Threshold::Finite)
                    .map_err(|_| E::custom("threshold must be non-negative"))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Threshold, E> {
                match v {
                    "inf" => Ok(Threshold::Infinite),
                    _ => Err(E::custom(format!("expected \"inf\", found {v:?}"))),
                }
            }
        }
        d.deserialize_any(V)
    }
}

/// Parameters of a threshold-linear exclusion with cardinal reuse.
///
/// For `|Z| < t` the exclusion is `(Z ∖ T^{|Z|}) ∪ K`, otherwise the universe.
/// `reuse[i]` holds `T^{i+1}`; `T^0 = ∅`, and indices past the end of the list
/// repeat its last entry.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TlcrParams {
    pub t: Threshold,
    #[serde(rename = "K")]
    pub base: ItemSet,
    #[serde(rename = "T")]
    pub reuse: Vec<ItemSet>,
}

impl TlcrParams {
    pub fn new(t: Threshold, base: ItemSet, reuse: Vec<ItemSet>) -> Self {
        TlcrParams { t, base, reuse }
    }

    /// `t = ∞`, `K = ∅`, no reuse: the identity exclusion.
    pub fn identity() -> Self {
        Self::new(Threshold::Infinite, ItemSet::EMPTY, Vec::new())
    }

    /// `t = N`, `K = ∅`, no reuse: a capacity of `N`.
    pub fn capacity(n: usize) -> Self {
        Self::new(Threshold::Finite(n), ItemSet::EMPTY, Vec::new())
    }

    /// `T^n`.
    #[inline]
    pub fn reuse_at(&self, n: usize) -> ItemSet {
        if n == 0 || self.reuse.is_empty() {
            ItemSet::EMPTY
        } else {
            self.reuse[(n - 1).min(self.reuse.len() - 1)]
        }
    }

    pub fn validate(&self, ground: &GroundSet) -> Result<()> {
        ground
            .check(self.base)
            .map_err(|_| Error::InvalidParams(format!("K = {} exceeds the ground set", self.base)))?;
        if self.t == Threshold::Finite(0) && !self.reuse.is_empty() {
            return Err(Error::InvalidParams("t = 0 admits no reuse sets".into()));
        }
        if self.reuse.len() > ground.size() {
            return Err(Error::InvalidParams(format!(
                "{} reuse sets for a ground set of {} items",
                self.reuse.len(),
                ground.size()
            )));
        }
        let mut prev = ItemSet::EMPTY;
        for (i, &tn) in self.reuse.iter().enumerate() {
            if !ground.contains(tn) {
                return Err(Error::InvalidParams(format!("T^{} exceeds the ground set", i + 1)));
            }
            if !prev.is_subset_of(tn) {
                return Err(Error::InvalidParams(format!(
                    "reuse sets not nested: T^{} ⊄ T^{}",
                    i,
                    i + 1
                )));
            }
            prev = tn;
        }
        if !prev.is_disjoint(self.base) {
            return Err(Error::InvalidParams(format!(
                "reuse sets meet K in {}",
                prev & self.base
            )));
        }
        Ok(())
    }

    /// Drops trailing entries that merely repeat their predecessor.
    pub fn normalized(mut self) -> Self {
        while self.reuse.len() >= 2 && self.reuse[self.reuse.len() - 1] == self.reuse[self.reuse.len() - 2] {
            self.reuse.pop();
        }
        if self.reuse.len() == 1 && self.reuse[0].is_empty() {
            self.reuse.clear();
        }
        self
    }
}

impl fmt::Display for TlcrParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t={}, K={}, T=[", self.t, self.base)?;
        for (i, s) in self.reuse.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str("]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g() -> GroundSet {
        GroundSet::new(5).unwrap()
    }

    #[test]
    fn validation() {
        let s = |items: &[usize]| ItemSet::from_items(items.iter().copied());
        assert!(TlcrParams::new(Threshold::Finite(0), s(&[]), vec![s(&[1])]).validate(&g()).is_err());
        assert!(TlcrParams::new(Threshold::Infinite, s(&[]), vec![s(&[1]), s(&[2])]).validate(&g()).is_err());
        assert!(TlcrParams::new(Threshold::Infinite, s(&[1]), vec![s(&[1])]).validate(&g()).is_err());
        assert!(TlcrParams::new(Threshold::Infinite, s(&[0]), vec![s(&[]), s(&[1])]).validate(&g()).is_ok());
    }

    #[test]
    fn reuse_repeats_last() {
        let p = TlcrParams::new(Threshold::Infinite, ItemSet::EMPTY, vec![ItemSet::EMPTY, ItemSet::singleton(0)]);
        assert_eq!(p.reuse_at(0), ItemSet::EMPTY);
        assert_eq!(p.reuse_at(1), ItemSet::EMPTY);
        assert_eq!(p.reuse_at(7), ItemSet::singleton(0));
    }

    #[test]
    fn serde_threshold() {
        let p: TlcrParams = serde_json::from_str(r#"{"t":"inf","K":[],"T":[]}"#).unwrap();
        assert_eq!(p, TlcrParams::identity());
        let p: TlcrParams = serde_json::from_str(r#"{"t":3,"K":[4],"T":[[],[0]]}"#).unwrap();
        assert_eq!(p.t, Threshold::Finite(3));
        assert_eq!(serde_json::to_string(&p).unwrap(), r#"{"t":3,"K":[4],"T":[[],[0]]}"#);
    }
}
