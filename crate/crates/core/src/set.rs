//! Ground-set arithmetic.
//!
//! Items are the integers `0..n`. A finite subset is an [`ItemSet`] bitmask, and
//! the codomain of a set function is [`SetValue`], which adds the [`SetValue::Top`]
//! marker for the whole universe. The universe being modelled is infinite, so a
//! finite value equal to the full ground set is still distinct from `Top`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{BitAnd, BitOr, Sub};
use std::sync::Arc;

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported ground set. Tables are dense over `2^n` subsets.
pub const MAX_ITEMS: usize = 20;

pub const DEFAULT_HEADROOM: usize = 2;

#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ItemSet(u32);

impl ItemSet {
    pub const EMPTY: ItemSet = ItemSet(0);

    #[inline]
    pub const fn from_bits(bits: u32) -> Self {
        ItemSet(bits)
    }

    #[inline]
    pub const fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub const fn singleton(item: usize) -> Self {
        ItemSet(1 << item)
    }

    /// The set `{0, .., n-1}`.
    #[inline]
    pub const fn full(n: usize) -> Self {
        if n >= 32 {
            ItemSet(u32::MAX)
        } else {
            ItemSet((1u32 << n) - 1)
        }
    }

    pub fn from_items<I: IntoIterator<Item = usize>>(items: I) -> Self {
        items.into_iter().fold(ItemSet::EMPTY, |s, i| s.with(i))
    }

    #[inline]
    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub const fn contains(self, item: usize) -> bool {
        item < 32 && self.0 & (1 << item) != 0
    }

    #[inline]
    pub const fn with(self, item: usize) -> Self {
        ItemSet(self.0 | (1 << item))
    }

    #[inline]
    pub const fn without(self, item: usize) -> Self {
        ItemSet(self.0 & !(1 << item))
    }

    #[inline]
    pub const fn union(self, other: Self) -> Self {
        ItemSet(self.0 | other.0)
    }

    #[inline]
    pub const fn inter(self, other: Self) -> Self {
        ItemSet(self.0 & other.0)
    }

    #[inline]
    pub const fn minus(self, other: Self) -> Self {
        ItemSet(self.0 & !other.0)
    }

    #[inline]
    pub const fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub const fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    /// Smallest member.
    #[inline]
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> Items {
        Items(self.0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Every subset of `self`, ascending by bit pattern.
    pub fn subsets(self) -> impl Iterator<Item = ItemSet> {
        let mask = self.0;
        let mut next = Some(0u32);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == mask {
                None
            } else {
                Some(cur.wrapping_sub(mask) & mask)
            };
            Some(ItemSet(cur))
        })
    }

    /// Scan order: by cardinality, then lexicographically by sorted members.
    pub fn scan_cmp(self, other: Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            let diff = self.0 ^ other.0;
            if diff == 0 {
                Ordering::Equal
            } else if self.0 & (diff & diff.wrapping_neg()) != 0 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

/// All subsets of `{0..n}` with at most `max_len` members, in scan order.
pub fn subsets_in_scan_order(n: usize, max_len: usize) -> Vec<ItemSet> {
    let mut out: Vec<ItemSet> = ItemSet::full(n)
        .subsets()
        .filter(|s| s.len() <= max_len)
        .collect();
    out.sort_by(|a, b| a.scan_cmp(*b));
    out
}

pub struct Items(u32);

impl Iterator for Items {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Items {}

impl FromIterator<usize> for ItemSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        ItemSet::from_items(iter)
    }
}

impl BitOr for ItemSet {
    type Output = ItemSet;
    fn bitor(self, rhs: Self) -> Self {
        self.union(rhs)
    }
}

impl BitAnd for ItemSet {
    type Output = ItemSet;
    fn bitand(self, rhs: Self) -> Self {
        self.inter(rhs)
    }
}

impl Sub for ItemSet {
    type Output = ItemSet;
    fn sub(self, rhs: Self) -> Self {
        self.minus(rhs)
    }
}

impl fmt::Debug for ItemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ItemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for ItemSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.len()))?;
        for i in self.iter() {
            seq.serialize_element(&i)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for ItemSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        d.deserialize_seq(ItemSetVisitor)
    }
}

struct ItemSetVisitor;

impl<'de> Visitor<'de> for ItemSetVisitor {
    type Value = ItemSet;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "an array of distinct item indices below {MAX_ITEMS}")
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<ItemSet, A::Error> {
        let mut set = ItemSet::EMPTY;
        while let Some(i) = seq.next_element::<usize>()? {
            if i >= MAX_ITEMS {
                return Err(de::Error::custom(format!("item {i} out of range")));
            }
            if set.contains(i) {
                return Err(de::Error::custom(format!("item {i} listed twice")));
            }
            set = set.with(i);
        }
        Ok(set)
    }
}

/// Value of a set function: a finite set or the whole universe.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum SetValue {
    Finite(ItemSet),
    Top,
}

impl SetValue {
    pub const EMPTY: SetValue = SetValue::Finite(ItemSet::EMPTY);

    #[inline]
    pub fn is_top(self) -> bool {
        matches!(self, SetValue::Top)
    }

    #[inline]
    pub fn finite(self) -> Option<ItemSet> {
        match self {
            SetValue::Finite(s) => Some(s),
            SetValue::Top => None,
        }
    }

    /// Union with a finite set; `Top` absorbs.
    #[inline]
    pub fn union(self, z: ItemSet) -> SetValue {
        match self {
            SetValue::Finite(s) => SetValue::Finite(s | z),
            SetValue::Top => SetValue::Top,
        }
    }

    /// `y ∖ self`; removing `Top` leaves nothing.
    #[inline]
    pub fn remove_from(self, y: ItemSet) -> ItemSet {
        match self {
            SetValue::Finite(s) => y - s,
            SetValue::Top => ItemSet::EMPTY,
        }
    }

    #[inline]
    pub fn contains_set(self, z: ItemSet) -> bool {
        match self {
            SetValue::Finite(s) => z.is_subset_of(s),
            SetValue::Top => true,
        }
    }

    /// Inclusion in the lattice where `Top` is the maximum.
    #[inline]
    pub fn is_subset_of(self, other: SetValue) -> bool {
        match (self, other) {
            (_, SetValue::Top) => true,
            (SetValue::Top, SetValue::Finite(_)) => false,
            (SetValue::Finite(a), SetValue::Finite(b)) => a.is_subset_of(b),
        }
    }
}

impl From<ItemSet> for SetValue {
    fn from(s: ItemSet) -> Self {
        SetValue::Finite(s)
    }
}

impl fmt::Display for SetValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetValue::Finite(s) => write!(f, "{s}"),
            SetValue::Top => f.write_str("TOP"),
        }
    }
}

impl Serialize for SetValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SetValue::Finite(set) => set.serialize(s),
            SetValue::Top => s.serialize_str("TOP"),
        }
    }
}

impl<'de> Deserialize<'de> for SetValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = SetValue;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an array of item indices or the string \"TOP\"")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<SetValue, E> {
                if v == "TOP" {
                    Ok(SetValue::Top)
                } else {
                    Err(E::custom(format!("expected \"TOP\", found {v:?}")))
                }
            }
            fn visit_seq<A: SeqAccess<'de>>(
                self,
                seq: A,
            ) -> std::result::Result<SetValue, A::Error> {
                ItemSetVisitor.visit_seq(seq).map(SetValue::Finite)
            }
        }
        d.deserialize_any(V)
    }
}

/// A finite truncation of the item universe.
///
/// `headroom` is the number of items that verification routines keep free so
/// that constructions needing fresh items outside `Z ∪ K` remain available.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundSet {
    size: usize,
    labels: Option<Arc<[String]>>,
    headroom: usize,
}

impl GroundSet {
    pub fn new(size: usize) -> Result<Self> {
        Self::with_headroom(size, DEFAULT_HEADROOM.min(size.saturating_sub(1)))
    }

    pub fn with_headroom(size: usize, headroom: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidGround("size must be at least 1".into()));
        }
        if size > MAX_ITEMS {
            return Err(Error::InvalidGround(format!(
                "size {size} exceeds the supported maximum of {MAX_ITEMS}"
            )));
        }
        if headroom >= size {
            return Err(Error::InvalidGround(format!(
                "headroom {headroom} must be smaller than size {size}"
            )));
        }
        Ok(GroundSet {
            size,
            labels: None,
            headroom,
        })
    }

    pub fn labelled<S: Into<String>>(
        labels: impl IntoIterator<Item = S>,
        headroom: usize,
    ) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let mut g = Self::with_headroom(labels.len(), headroom)?;
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::InvalidGround(format!("duplicate label {l:?}")));
            }
        }
        g.labels = Some(labels.into());
        Ok(g)
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn headroom(&self) -> usize {
        self.headroom
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    #[inline]
    pub fn full(&self) -> ItemSet {
        ItemSet::full(self.size)
    }

    /// Number of subsets, `2^n`.
    #[inline]
    pub fn powerset_len(&self) -> usize {
        1 << self.size
    }

    /// Largest set size on which exclusion conditions are tested.
    #[inline]
    pub fn tested_len(&self) -> usize {
        self.size - self.headroom
    }

    #[inline]
    pub fn contains(&self, z: ItemSet) -> bool {
        z.is_subset_of(self.full())
    }

    pub fn check(&self, z: ItemSet) -> Result<()> {
        if self.contains(z) {
            Ok(())
        } else {
            Err(Error::Domain {
                set: z,
                size: self.size,
            })
        }
    }

    pub fn same_size(&self, other: &GroundSet) -> Result<()> {
        if self.size == other.size {
            Ok(())
        } else {
            Err(Error::GroundMismatch {
                left: self.size,
                right: other.size,
            })
        }
    }

    pub fn label(&self, item: usize) -> String {
        match &self.labels {
            Some(l) => l[item].clone(),
            None => item.to_string(),
        }
    }

    pub fn item_by_label(&self, label: &str) -> Option<usize> {
        match &self.labels {
            Some(l) => l.iter().position(|x| x == label),
            None => label.parse().ok().filter(|&i| i < self.size),
        }
    }

    pub fn format_set(&self, z: ItemSet) -> String {
        let parts: Vec<String> = z.iter().map(|i| self.label(i)).collect();
        format!("{{{}}}", parts.join(","))
    }

    /// Subsets within the headroom-restricted range, in scan order.
    pub fn tested_subsets(&self) -> Vec<ItemSet> {
        subsets_in_scan_order(self.size, self.tested_len())
    }

    pub fn all_subsets(&self) -> Vec<ItemSet> {
        subsets_in_scan_order(self.size, self.size)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_order_is_cardinality_then_lex() {
        let order = subsets_in_scan_order(3, 3);
        let rendered: Vec<String> = order.iter().map(|s| s.to_string()).collect();
        assert_eq!(
            rendered,
            ["{}", "{0}", "{1}", "{2}", "{0,1}", "{0,2}", "{1,2}", "{0,1,2}"]
        );
    }

    #[test]
    fn top_is_not_the_full_ground() {
        let g = GroundSet::new(3).unwrap();
        assert_ne!(SetValue::Finite(g.full()), SetValue::Top);
        assert_eq!(SetValue::Top.union(g.full()), SetValue::Top);
        assert_eq!(SetValue::Top.remove_from(g.full()), ItemSet::EMPTY);
    }

    #[test]
    fn ground_invariants() {
        assert!(GroundSet::new(0).is_err());
        assert!(GroundSet::with_headroom(3, 3).is_err());
        assert!(GroundSet::labelled(["a", "a"], 0).is_err());
        let g = GroundSet::labelled(["a", "b", "c"], 1).unwrap();
        assert_eq!(g.item_by_label("c"), Some(2));
        assert_eq!(g.format_set(ItemSet::from_items([0, 2])), "{a,c}");
    }

    #[test]
    fn serde_shapes() {
        let v: SetValue = serde_json::from_str("\"TOP\"").unwrap();
        assert!(v.is_top());
        let v: SetValue = serde_json::from_str("[2,0]").unwrap();
        assert_eq!(serde_json::to_string(&v).unwrap(), "[0,2]");
        assert!(serde_json::from_str::<ItemSet>("[1,1]").is_err());
    }
}
