use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exclusion::ExclusionFunction;
use crate::set::{ItemSet, SetValue};
use crate::tlcr::{Threshold, TlcrParams};

/// The defining conditions of a threshold-linear exclusion with cardinal reuse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Condition {
    #[serde(rename = "G-monotone")]
    GMonotone,
    #[serde(rename = "all-or-nothing")]
    AllOrNothing,
    #[serde(rename = "cardinal")]
    Cardinal,
    #[serde(rename = "R-monotone-on-dom")]
    RMonotone,
    #[serde(rename = "R-cardinal-linear-on-dom")]
    RCardinalLinear,
    #[serde(rename = "K-disjoint")]
    KDisjoint,
}

impl Condition {
    pub const ALL: [Condition; 6] = [
        Condition::GMonotone,
        Condition::AllOrNothing,
        Condition::Cardinal,
        Condition::RMonotone,
        Condition::RCardinalLinear,
        Condition::KDisjoint,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Condition::GMonotone => "G-monotone",
            Condition::AllOrNothing => "all-or-nothing",
            Condition::Cardinal => "cardinal",
            Condition::RMonotone => "R-monotone-on-dom",
            Condition::RCardinalLinear => "R-cardinal-linear-on-dom",
            Condition::KDisjoint => "K-disjoint",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// First instance, in scan order, where a condition fails.
///
/// Pair conditions fill `z_prime`; conditions about a single item fill `item`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionViolation {
    pub condition: Condition,
    pub z: ItemSet,
    pub z_prime: Option<ItemSet>,
    pub item: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TlcrClassification {
    pub is_tlcr: bool,
    pub params: Option<TlcrParams>,
    pub failed_conditions: Vec<Condition>,
    pub violations: Vec<ConditionViolation>,
    /// No `TOP` value occurred in the tested range, so `t = ∞` is only
    /// established up to the largest tested size.
    pub finite_scale_threshold: bool,
    /// Largest `n` for which `T^n` was observed; later levels are
    /// unconstrained at this scale.
    pub observed_levels: usize,
    /// Largest set size tested.
    pub tested_len: usize,
}

impl TlcrClassification {
    pub fn violation(&self, c: Condition) -> Option<&ConditionViolation> {
        self.violations.iter().find(|v| v.condition == c)
    }
}

/// Tests every condition over the subsets that leave the headroom free.
pub fn classify_tlcr(e: &ExclusionFunction) -> Result<TlcrClassification> {
    classify_on(e, |_| true)
}

/// Tests every condition over the headroom-restricted subsets accepted by `keep`.
///
/// `keep` must be closed under subsets and accept `∅`.
pub fn classify_on(e: &ExclusionFunction, keep: impl Fn(ItemSet) -> bool) -> Result<TlcrClassification> {
    let ground = e.ground();
    let sets: Vec<ItemSet> = ground.tested_subsets().into_iter().filter(|&z| keep(z)).collect();
    let mut value = vec![None; ground.powerset_len()];
    for &z in &sets {
        value[z.bits() as usize] = Some(e.eval(z)?);
    }
    let ev = |z: ItemSet| value[z.bits() as usize].expect("tested set evaluated");
    let gross = |z: ItemSet| ev(z).union(z);
    let reuse = |z: ItemSet| match ev(z) {
        SetValue::Finite(v) => z - v,
        SetValue::Top => ItemSet::EMPTY,
    };
    let in_dom = |z: ItemSet| !gross(z).is_top();
    let k = ev(ItemSet::EMPTY);

    let pairs = || {
        sets.iter()
            .flat_map(|&z| sets.iter().map(move |&z2| (z, z2)))
    };
    let mut violations = Vec::new();

    if let Some((z, z2)) =
        pairs().find(|&(z, z2)| z != z2 && z.is_subset_of(z2) && !gross(z).is_subset_of(gross(z2)))
    {
        violations.push(pair(Condition::GMonotone, z, z2));
    }

    if let Some(&z) = sets.iter().find(|&&z| {
        let g = gross(z);
        g != k.union(z) && !g.is_top()
    }) {
        violations.push(single(Condition::AllOrNothing, z));
    }

    if !k.is_top() {
        if let Some((z, z2)) = pairs()
            .find(|&(z, z2)| z.len() == z2.len() && gross(z).is_top() && !gross(z2).is_top())
        {
            violations.push(pair(Condition::Cardinal, z, z2));
        }
    }

    if let Some((z, z2)) = pairs().find(|&(z, z2)| {
        z != z2 && z.is_subset_of(z2) && in_dom(z) && in_dom(z2) && !reuse(z).is_subset_of(reuse(z2))
    }) {
        violations.push(pair(Condition::RMonotone, z, z2));
    }

    if let Some((z, z2, x)) = pairs().find_map(|(z, z2)| {
        if z.len() != z2.len() || !in_dom(z) || !in_dom(z2) {
            return None;
        }
        let x = (reuse(z) & z2) - reuse(z2);
        x.first().map(|x| (z, z2, x))
    }) {
        violations.push(ConditionViolation {
            condition: Condition::RCardinalLinear,
            z,
            z_prime: Some(z2),
            item: Some(x),
        });
    }

    if let SetValue::Finite(kset) = k {
        if let Some(&z) = sets.iter().find(|&&z| in_dom(z) && !(reuse(z) & kset).is_empty()) {
            violations.push(ConditionViolation {
                condition: Condition::KDisjoint,
                z,
                z_prime: None,
                item: (reuse(z) & kset).first(),
            });
        }
    }

    let tested_len = ground.tested_len();
    let mut failed: Vec<Condition> = violations.iter().map(|v| v.condition).collect();
    failed.sort();
    if !failed.is_empty() {
        return Ok(TlcrClassification {
            is_tlcr: false,
            params: None,
            failed_conditions: failed,
            violations,
            finite_scale_threshold: false,
            observed_levels: 0,
            tested_len,
        });
    }

    let first_top = sets.iter().filter(|&&z| gross(z).is_top()).map(|z| z.len()).min();
    let t = match first_top {
        Some(t) => Threshold::Finite(t),
        None => Threshold::Infinite,
    };
    let base = k.finite().unwrap_or(ItemSet::EMPTY);
    let top_level = match t {
        Threshold::Finite(t) => t.saturating_sub(1).min(tested_len),
        Threshold::Infinite => tested_len,
    };
    let mut cur = ItemSet::EMPTY;
    let mut reuse_sets = Vec::with_capacity(top_level);
    for level in 1..=top_level {
        for &z in sets.iter().filter(|z| z.len() == level && in_dom(**z)) {
            cur = cur | reuse(z);
        }
        reuse_sets.push(cur);
    }
    let params = TlcrParams::new(t, if t == Threshold::Finite(0) { ItemSet::EMPTY } else { base }, reuse_sets)
        .normalized();
    let rebuilt = ExclusionFunction::tlcr(ground, params.clone())?;
    for &z in &sets {
        let (want, got) = (ev(z), rebuilt.eval(z)?);
        let same = match (want, got) {
            (SetValue::Finite(a), SetValue::Finite(b)) => a == b,
            _ => want.union(z).is_top() && got.union(z).is_top(),
        };
        if !same {
            return Err(Error::InvalidParams(format!(
                "extracted parameters ({params}) give {got} at {z}, expected {want}"
            )));
        }
    }
    Ok(TlcrClassification {
        is_tlcr: true,
        params: Some(params),
        failed_conditions: Vec::new(),
        violations: Vec::new(),
        finite_scale_threshold: first_top.is_none(),
        observed_levels: top_level,
        tested_len,
    })
}

fn pair(condition: Condition, z: ItemSet, z2: ItemSet) -> ConditionViolation {
    ConditionViolation {
        condition,
        z,
        z_prime: Some(z2),
        item: None,
    }
}

fn single(condition: Condition, z: ItemSet) -> ConditionViolation {
    ConditionViolation {
        condition,
        z,
        z_prime: None,
        item: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::set::GroundSet;
    #[test]
    fn identity_and_empty() {
        let g = GroundSet::new(5).unwrap();
        let c = classify_tlcr(&ExclusionFunction::identity(&g)).unwrap();
        assert!(c.is_tlcr);
        assert_eq!(c.params.unwrap(), TlcrParams::identity());
        assert!(c.finite_scale_threshold);

        let c = classify_tlcr(&ExclusionFunction::empty(&g)).unwrap();
        let p = c.params.unwrap();
        assert_eq!((p.t, p.base), (Threshold::Infinite, ItemSet::EMPTY));
        assert_eq!(p.reuse_at(1), g.full());
    }

    #[test]
    fn single_failure_aon() {
        // E({a}) = {b}, extended monotonically so that only all-or-nothing fails.
        let g = GroundSet::new(5).unwrap();
        let e = ExclusionFunction::from_fn(&g, |z| {
            SetValue::Finite(if z.contains(0) { z.with(1) } else { z })
        });
        let c = classify_tlcr(&e).unwrap();
        assert_eq!(c.failed_conditions, vec![Condition::AllOrNothing]);
    }
}
