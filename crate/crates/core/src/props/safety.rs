use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exclusion::ExclusionFunction;
use crate::set::{GroundSet, ItemSet, SetValue};
use crate::tlcr::{Threshold, TlcrParams};

use super::classify::classify_tlcr;

/// Input classes for which [`check_domain_safety`] decides preservation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SafetyDomain {
    Res,
    Pi,
    /// Substitutable inputs. The stated condition is a remark without proof.
    Sub,
}

/// Arithmetic test on the parameters of a threshold-linear exclusion.
///
/// - `Res`: every valid parameter set.
/// - `Pi`: `t ∈ {0, 1, ∞}` and `T² = T³ = …`.
/// - `Sub`: `t = ∞` and `T¹ = T² = …`.
pub fn check_domain_safety(params: &TlcrParams, domain: SafetyDomain) -> bool {
    let levels = params.reuse.len();
    let constant_from = |start: usize| (start..=levels.max(start)).all(|n| params.reuse_at(n) == params.reuse_at(start));
    match domain {
        SafetyDomain::Res => true,
        SafetyDomain::Pi => match params.t {
            Threshold::Finite(t) => t <= 1,
            Threshold::Infinite => constant_from(2),
        },
        SafetyDomain::Sub => params.t == Threshold::Infinite && constant_from(1),
    }
}

/// Whether preserving substitutes and size monotonicity is guaranteed:
/// `|X ∖ K| ≤ 1`, or `t = ∞` with no reuse at any level.
///
/// With `t = 0` the exclusion is the universe everywhere, so `K` is the whole
/// universe and the first disjunct holds.
pub fn check_sm_safety(params: &TlcrParams, ground: &GroundSet) -> bool {
    if params.t == Threshold::Finite(0) {
        return true;
    }
    let outside = (ground.full() - params.base).len();
    outside <= 1 || (params.t == Threshold::Infinite && params.reuse.iter().all(|t| t.is_empty()))
}

/// Whether [`check_sm_safety`] rests on `|X ∖ K| ≤ 1` holding only because
/// the ground set is finite: the headroom items would otherwise lie outside `K`.
pub fn sm_safety_truncation_sensitive(params: &TlcrParams, ground: &GroundSet) -> bool {
    let outside = (ground.full() - params.base).len();
    params.t != Threshold::Finite(0)
        && outside <= 1
        && ground.headroom() > 0
        && !(params.t == Threshold::Infinite && params.reuse.iter().all(|t| t.is_empty()))
}

/// Behaviour of an exclusion on `∅` and the singletons.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SingletonProfile {
    /// Every singleton is mapped to the universe.
    AllTop,
    /// `E({x}) = K` for `x ∈ T` and `K ∪ {x}` otherwise, with `T ⊆ X ∖ K`.
    Linear { base: ItemSet, reuse: ItemSet },
    /// The first singleton matching neither shape.
    Broken(usize),
}

pub fn singleton_profile(e: &ExclusionFunction) -> Result<SingletonProfile> {
    let n = e.ground().size();
    let mut all_top = true;
    for x in 0..n {
        all_top &= e.gross(ItemSet::singleton(x))?.is_top();
    }
    if all_top {
        return Ok(SingletonProfile::AllTop);
    }
    let k = match e.base()? {
        SetValue::Finite(k) => k,
        SetValue::Top => return Ok(SingletonProfile::Broken(0)),
    };
    let mut t = ItemSet::EMPTY;
    for x in 0..n {
        match e.eval(ItemSet::singleton(x))? {
            SetValue::Finite(v) if v == k && !k.contains(x) => t = t.with(x),
            SetValue::Finite(v) if v == k.with(x) => {}
            _ => return Ok(SingletonProfile::Broken(x)),
        }
    }
    Ok(SingletonProfile::Linear { base: k, reuse: t })
}

/// On `∅` and singletons, `E` agrees with some threshold-linear exclusion:
/// either every singleton is mapped to the universe, or there is `T ⊆ X ∖ K`
/// with `E({x}) = K` for `x ∈ T` and `E({x}) = K ∪ {x}` otherwise.
pub fn check_singleton_profile(e: &ExclusionFunction) -> Result<bool> {
    Ok(!matches!(singleton_profile(e)?, SingletonProfile::Broken(_)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SvSide {
    /// Single-valued responsive first, substitutable size-monotone second.
    SvFirst,
    /// Substitutable size-monotone first, single-valued responsive second.
    SvSecond,
}

/// Profile conditions for preserving substitutes and size monotonicity when
/// one input is single-valued responsive.
///
/// - `SvFirst`: the singleton profile holds and, when `|X ∖ K| > 1`, `T = ∅`.
/// - `SvSecond`: `E` is threshold-linear and, when `|X ∖ K| > 1`, `T^l = ∅`
///   for every `l < t`.
pub fn check_sv_sm_profile(e: &ExclusionFunction, side: SvSide) -> Result<bool> {
    let ground = e.ground();
    let wide = |k: ItemSet| (ground.full() - k).len() > 1;
    match side {
        SvSide::SvFirst => Ok(match singleton_profile(e)? {
            SingletonProfile::Broken(_) => false,
            SingletonProfile::AllTop => true,
            SingletonProfile::Linear { base, reuse } => !wide(base) || reuse.is_empty(),
        }),
        SvSide::SvSecond => {
            let c = classify_tlcr(e)?;
            Ok(match c.params {
                None => false,
                Some(p) if p.t == Threshold::Finite(0) => true,
                Some(p) => !wide(p.base) || p.reuse.iter().all(|t| t.is_empty()),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(items: &[usize]) -> ItemSet {
        ItemSet::from_items(items.iter().copied())
    }

    #[test]
    fn domain_safety_examples() {
        let g = GroundSet::new(5).unwrap();
        let cap2 = TlcrParams::capacity(2);
        assert!(check_domain_safety(&cap2, SafetyDomain::Res));
        assert!(!check_domain_safety(&cap2, SafetyDomain::Pi));
        let empty = TlcrParams::new(Threshold::Infinite, ItemSet::EMPTY, vec![g.full()]);
        assert!(check_domain_safety(&empty, SafetyDomain::Pi));
        let step = TlcrParams::new(Threshold::Infinite, ItemSet::EMPTY, vec![s(&[]), s(&[0])]);
        assert!(check_domain_safety(&step, SafetyDomain::Pi));
        assert!(!check_domain_safety(&step, SafetyDomain::Sub));
        let late = TlcrParams::new(Threshold::Infinite, ItemSet::EMPTY, vec![s(&[]), s(&[0]), s(&[0, 1])]);
        assert!(!check_domain_safety(&late, SafetyDomain::Pi));
    }

    #[test]
    fn sm_safety_examples() {
        let g = GroundSet::new(4).unwrap();
        let k = TlcrParams::new(Threshold::Finite(3), g.full().without(0), vec![]);
        assert!(check_sm_safety(&k, &g));
        assert!(sm_safety_truncation_sensitive(&k, &g));
        assert!(check_sm_safety(&TlcrParams::identity(), &g));
        assert!(!check_sm_safety(&TlcrParams::capacity(3), &g));
    }

    #[test]
    fn profiles() {
        let g = GroundSet::new(4).unwrap();
        assert!(check_singleton_profile(&ExclusionFunction::identity(&g)).unwrap());
        assert!(check_singleton_profile(&ExclusionFunction::capacity(&g, 1)).unwrap());
        let bad = ExclusionFunction::from_fn(&g, |z| {
            SetValue::Finite(if z == s(&[0]) { s(&[1]) } else { z })
        });
        assert!(!check_singleton_profile(&bad).unwrap());

        assert!(check_sv_sm_profile(&ExclusionFunction::identity(&g), SvSide::SvFirst).unwrap());
        let reuse_a = TlcrParams::new(Threshold::Infinite, ItemSet::EMPTY, vec![s(&[0])]);
        let e = ExclusionFunction::tlcr(&g, reuse_a).unwrap();
        assert!(!check_sv_sm_profile(&e, SvSide::SvSecond).unwrap());
        let narrow = TlcrParams::new(Threshold::Infinite, g.full().without(0), vec![s(&[0])]);
        let e = ExclusionFunction::tlcr(&g, narrow).unwrap();
        assert!(check_sv_sm_profile(&e, SvSide::SvFirst).unwrap());
        assert!(check_sv_sm_profile(&e, SvSide::SvSecond).unwrap());
    }
}
