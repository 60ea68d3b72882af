//! Counterexamples to preservation, built from the necessity arguments and
//! found independently by brute force.
//!
//! Every construction enumerates its candidate instances in scan order,
//! picks the smallest qualifying items, and returns the first candidate whose
//! composition actually exhibits the violation. A returned [`Witness`] has
//! always been replayed against the exclusion it was built for.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::choice::ChoiceFunction;
use crate::compose::{compose_tables, exclusion_blocks, fold_left, fold_right, lex_compose};
use crate::compose::{capacity_label, procedure_aggregate_quota, procedure_individual_quota};
use crate::contracts::{
    check_equiv_dilation, find_pi_completion, is_equivalence_excluding, DilationCondition, MAX_COMPLETION_ITEMS,
};
use crate::error::{Error, Result};
use crate::exclusion::ExclusionFunction;
use crate::families::make_footnote_union;
use crate::order::LinearOrder;
use crate::partition::EquivalencePartition;
use crate::props::{
    check_choice_with, check_singleton_profile, check_sm_safety, classify_tlcr,
    table_violation, Condition, PreservationConfig, Property, TlcrClassification,
    MAX_EXHAUSTIVE_ITEMS,
};
use crate::props::{check_domain_safety, SafetyDomain};
use crate::families::Domain;
use crate::set::{GroundSet, ItemSet, SetValue};
use crate::tlcr::{Threshold, TlcrParams};

/// The failing hypothesis a construction targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum WitnessCondition {
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
    /// Dispatches to one of the two constructions below.
    #[serde(rename = "pi-domain")]
    PiDomain,
    /// `1 < t < ∞`.
    #[serde(rename = "pi-finite-t")]
    PiFiniteThreshold,
    /// `t = ∞` and `T^l ≠ T^{l+1}` for some `l ≥ 2`.
    #[serde(rename = "pi-reuse-step")]
    PiReuseStep,
    /// Dispatches to one of the two constructions below.
    #[serde(rename = "sm")]
    Sm,
    /// `|X ∖ K| > 1` and `T^n ≠ ∅` for some `n < t`.
    #[serde(rename = "sm-reuse")]
    SmReuse,
    /// `|X ∖ K| > 1` and `t < ∞`.
    #[serde(rename = "sm-finite-t")]
    SmFiniteThreshold,
    /// On `∅` and singletons `E` agrees with no threshold-linear exclusion.
    #[serde(rename = "sv-singleton")]
    SvSingleton,
    /// `|X ∖ K| > 1` and some singleton is reused.
    #[serde(rename = "sv-sm-reuse")]
    SvSmReuse,
    #[serde(rename = "equivalence-excluding")]
    EquivalenceExcluding,
    #[serde(rename = "mto1-monotone")]
    Mto1Monotone,
    #[serde(rename = "weak-all-or-nothing")]
    WeakAllOrNothing,
}

impl WitnessCondition {
    pub const ALL: [WitnessCondition; 17] = [
        WitnessCondition::GMonotone,
        WitnessCondition::AllOrNothing,
        WitnessCondition::Cardinal,
        WitnessCondition::RMonotone,
        WitnessCondition::RCardinalLinear,
        WitnessCondition::KDisjoint,
        WitnessCondition::PiDomain,
        WitnessCondition::PiFiniteThreshold,
        WitnessCondition::PiReuseStep,
        WitnessCondition::Sm,
        WitnessCondition::SmReuse,
        WitnessCondition::SmFiniteThreshold,
        WitnessCondition::SvSingleton,
        WitnessCondition::SvSmReuse,
        WitnessCondition::EquivalenceExcluding,
        WitnessCondition::Mto1Monotone,
        WitnessCondition::WeakAllOrNothing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WitnessCondition::GMonotone => "G-monotone",
            WitnessCondition::AllOrNothing => "all-or-nothing",
            WitnessCondition::Cardinal => "cardinal",
            WitnessCondition::RMonotone => "R-monotone-on-dom",
            WitnessCondition::RCardinalLinear => "R-cardinal-linear-on-dom",
            WitnessCondition::KDisjoint => "K-disjoint",
            WitnessCondition::PiDomain => "pi-domain",
            WitnessCondition::PiFiniteThreshold => "pi-finite-t",
            WitnessCondition::PiReuseStep => "pi-reuse-step",
            WitnessCondition::Sm => "sm",
            WitnessCondition::SmReuse => "sm-reuse",
            WitnessCondition::SmFiniteThreshold => "sm-finite-t",
            WitnessCondition::SvSingleton => "sv-singleton",
            WitnessCondition::SvSmReuse => "sv-sm-reuse",
            WitnessCondition::EquivalenceExcluding => "equivalence-excluding",
            WitnessCondition::Mto1Monotone => "mto1-monotone",
            WitnessCondition::WeakAllOrNothing => "weak-all-or-nothing",
        }
    }

    /// Whether the construction needs an equivalence partition.
    pub fn needs_partition(self) -> bool {
        matches!(
            self,
            WitnessCondition::EquivalenceExcluding
                | WitnessCondition::Mto1Monotone
                | WitnessCondition::WeakAllOrNothing
        )
    }
}

impl From<Condition> for WitnessCondition {
    fn from(c: Condition) -> Self {
        match c {
            Condition::GMonotone => WitnessCondition::GMonotone,
            Condition::AllOrNothing => WitnessCondition::AllOrNothing,
            Condition::Cardinal => WitnessCondition::Cardinal,
            Condition::RMonotone => WitnessCondition::RMonotone,
            Condition::RCardinalLinear => WitnessCondition::RCardinalLinear,
            Condition::KDisjoint => WitnessCondition::KDisjoint,
        }
    }
}

impl fmt::Display for WitnessCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for WitnessCondition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        WitnessCondition::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParams(format!("unknown condition {s:?}")))
    }
}

/// What the composed function fails.
///
/// `Sub` instances are also path independence failures; `PiCompletion` means
/// no path independent completion of the composition exists.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Breach {
    #[serde(rename = "PI")]
    Pi,
    #[serde(rename = "SUB")]
    Sub,
    #[serde(rename = "CON")]
    Con,
    #[serde(rename = "SM")]
    Sm,
    #[serde(rename = "MTO1")]
    Mto1,
    #[serde(rename = "PI-COMPLETION")]
    PiCompletion,
}

impl Breach {
    pub fn property(self) -> Option<Property> {
        match self {
            Breach::Pi => Some(Property::Pi),
            Breach::Sub => Some(Property::Sub),
            Breach::Con => Some(Property::Con),
            Breach::Sm => Some(Property::Sm),
            Breach::Mto1 => Some(Property::Mto1),
            Breach::PiCompletion => None,
        }
    }
}

impl From<Property> for Breach {
    fn from(p: Property) -> Self {
        match p {
            Property::Pi => Breach::Pi,
            Property::Sub => Breach::Sub,
            Property::Con => Breach::Con,
            Property::Sm => Breach::Sm,
            Property::Mto1 => Breach::Mto1,
        }
    }
}

/// Two inputs whose composition under some `E` breaks a property at
/// `(y_small, y_big)`.
///
/// For `Sub`, `Sm` and `PiCompletion`, `y_small ⊆ y_big` and some item of
/// `y_small` is chosen from `y_big` but not from `y_small` (or the choice
/// shrinks, for `Sm`). For `Pi` the sets are the two halves of the split
/// input; for `Mto1` both hold the input with an infeasible choice.
#[derive(Clone, Debug)]
pub struct Witness {
    /// `None` for witnesses found by search.
    pub condition: Option<WitnessCondition>,
    pub c1: ChoiceFunction,
    pub c2: ChoiceFunction,
    pub y_small: ItemSet,
    pub y_big: ItemSet,
    pub breach: Breach,
    pub partition: Option<EquivalencePartition>,
    pub narrative: String,
}

impl Witness {
    pub fn composed(&self, e: &ExclusionFunction) -> Result<ChoiceFunction> {
        lex_compose(&self.c1, &self.c2, e)
    }

    /// Whether the composition misbehaves at the recorded sets.
    pub fn reproduces(&self, e: &ExclusionFunction) -> Result<bool> {
        let c = self.composed(e)?;
        let (ys, yb) = (self.y_small, self.y_big);
        let (cs, cb) = (c.eval(ys)?, c.eval(yb)?);
        let nested = ys.is_subset_of(yb);
        Ok(match self.breach {
            Breach::Pi => c.eval(ys | yb)? != c.eval(cs | cb)?,
            Breach::Sub => nested && !((ys - cs) & cb).is_empty(),
            Breach::Con => nested && ys != yb && cb.is_subset_of(ys) && cs != cb,
            Breach::Sm => nested && cs.len() > cb.len(),
            Breach::Mto1 => match &self.partition {
                Some(p) => !p.is_feasible(cb),
                None => false,
            },
            Breach::PiCompletion => match &self.partition {
                Some(p) => {
                    let pattern = nested && !((ys - cs) & cb).is_empty() && p.is_feasible(cb);
                    pattern && {
                        if c.ground().size() > MAX_COMPLETION_ITEMS {
                            return Err(Error::BudgetExceeded(format!(
                                "completion search supports at most {MAX_COMPLETION_ITEMS} items"
                            )));
                        }
                        find_pi_completion(&c, p)?.is_none()
                    }
                }
                None => false,
            },
        })
    }

    /// Replays the witness: the recorded sets must exhibit the breach and,
    /// for plain properties, the exhaustive checker must reject the
    /// composition as well.
    pub fn validate(&self, e: &ExclusionFunction) -> Result<()> {
        if !self.reproduces(e)? {
            return Err(Error::WitnessInvalid(format!(
                "{} not reproduced at {} / {}",
                self.breach_name(),
                self.y_small,
                self.y_big
            )));
        }
        if let Some(p) = self.breach.property() {
            let c = self.composed(e)?;
            if c.ground().size() <= MAX_EXHAUSTIVE_ITEMS {
                if check_choice_with(&c, p, self.partition.as_ref())?.holds {
                    return Err(Error::WitnessInvalid(format!("checker accepts {p}")));
                }
                if matches!(self.breach, Breach::Sub | Breach::Con)
                    && check_choice_with(&c, Property::Pi, None)?.holds
                {
                    return Err(Error::WitnessInvalid("checker accepts PI".into()));
                }
            }
        }
        Ok(())
    }

    fn breach_name(&self) -> &'static str {
        match self.breach {
            Breach::Pi => "PI",
            Breach::Sub => "SUB",
            Breach::Con => "CON",
            Breach::Sm => "SM",
            Breach::Mto1 => "MTO1",
            Breach::PiCompletion => "PI-COMPLETION",
        }
    }
}

/// Step-by-step evaluation of `L_E(C1, C2)` at `y`.
pub fn trace(c1: &ChoiceFunction, c2: &ChoiceFunction, e: &ExclusionFunction, y: ItemSet) -> Result<String> {
    let g = c1.ground();
    let z = c1.eval(y)?;
    let ez = e.eval(z)?;
    let rest = ez.remove_from(y);
    let w = c2.eval(rest)?;
    let ez_s = match ez {
        SetValue::Top => "TOP".to_string(),
        SetValue::Finite(s) => g.format_set(s),
    };
    Ok(format!(
        "at {}: C1 picks {}, E = {}, C2 picks {} from {}, result {}",
        g.format_set(y),
        g.format_set(z),
        ez_s,
        g.format_set(w),
        g.format_set(rest),
        g.format_set(z | w)
    ))
}

struct Ctx<'a> {
    e: &'a ExclusionFunction,
    g: &'a GroundSet,
    n: usize,
    full: ItemSet,
    tested: Vec<ItemSet>,
    all: Vec<ItemSet>,
    value: Vec<SetValue>,
    /// Candidates rejected for lack of fresh items.
    starved: usize,
}

impl<'a> Ctx<'a> {
    fn new(e: &'a ExclusionFunction) -> Result<Self> {
        let g = e.ground();
        let value = (0..g.powerset_len() as u32)
            .map(|z| e.eval(ItemSet::from_bits(z)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Ctx {
            e,
            g,
            n: g.size(),
            full: g.full(),
            tested: g.tested_subsets(),
            all: g.all_subsets(),
            value,
            starved: 0,
        })
    }

    fn ev(&self, z: ItemSet) -> SetValue {
        self.value[z.bits() as usize]
    }

    fn gross(&self, z: ItemSet) -> SetValue {
        self.ev(z).union(z)
    }

    fn in_dom(&self, z: ItemSet) -> bool {
        !self.gross(z).is_top()
    }

    fn reuse(&self, z: ItemSet) -> ItemSet {
        match self.ev(z) {
            SetValue::Finite(v) => z - v,
            SetValue::Top => ItemSet::EMPTY,
        }
    }

    fn base(&self) -> SetValue {
        self.ev(ItemSet::EMPTY)
    }

    fn k(&self) -> ItemSet {
        self.base().finite().unwrap_or(self.full)
    }

    /// Items of the ground set outside `g`; a `TOP` value leaves none.
    fn outside(&self, g: SetValue) -> ItemSet {
        match g {
            SetValue::Finite(s) => self.full - s,
            SetValue::Top => ItemSet::EMPTY,
        }
    }

    fn fresh(&mut self, pool: ItemSet) -> Option<usize> {
        let x = pool.first();
        if x.is_none() {
            self.starved += 1;
        }
        x
    }

    fn resp(&self, acceptable: &[usize], quota: usize) -> Result<ChoiceFunction> {
        ChoiceFunction::responsive(self.g, LinearOrder::from_acceptable(acceptable, self.n)?, quota)
    }

    fn mto1(&self, acceptable: &[usize], quota: usize, p: &EquivalencePartition) -> Result<ChoiceFunction> {
        ChoiceFunction::mto1_responsive(self.g, LinearOrder::from_acceptable(acceptable, self.n)?, quota, p.clone())
    }

    #[allow(clippy::too_many_arguments)]
    fn witness(
        &self,
        condition: WitnessCondition,
        c1: ChoiceFunction,
        c2: ChoiceFunction,
        y_small: ItemSet,
        y_big: ItemSet,
        breach: Breach,
        partition: Option<&EquivalencePartition>,
        premise: String,
    ) -> Result<Witness> {
        let narrative = format!(
            "{premise}; {}; {}",
            trace(&c1, &c2, self.e, y_small)?,
            trace(&c1, &c2, self.e, y_big)?
        );
        Ok(Witness {
            condition: Some(condition),
            c1,
            c2,
            y_small,
            y_big,
            breach,
            partition: partition.cloned(),
            narrative,
        })
    }

    fn fmt(&self, z: ItemSet) -> String {
        self.g.format_set(z)
    }

    fn fmt_v(&self, v: SetValue) -> String {
        match v {
            SetValue::Top => "TOP".into(),
            SetValue::Finite(s) => self.fmt(s),
        }
    }
}

/// `Z′` first, then `Z ∖ Z′`, each ascending.
fn preferring(z_first: ItemSet, z_rest: ItemSet) -> Vec<usize> {
    z_first.iter().chain((z_rest - z_first).iter()).collect()
}

fn items(z: ItemSet) -> Vec<usize> {
    z.to_vec()
}

/// Builds the construction for `condition`. Equivalence-based conditions
/// need `partition`.
pub fn synthesize(e: &ExclusionFunction, condition: WitnessCondition) -> Result<Witness> {
    synthesize_with(e, condition, None)
}

pub fn synthesize_with(
    e: &ExclusionFunction,
    condition: WitnessCondition,
    partition: Option<&EquivalencePartition>,
) -> Result<Witness> {
    let mut cx = Ctx::new(e)?;
    let found = match condition {
        WitnessCondition::GMonotone
        | WitnessCondition::AllOrNothing
        | WitnessCondition::Cardinal
        | WitnessCondition::RMonotone
        | WitnessCondition::RCardinalLinear
        | WitnessCondition::KDisjoint => {
            let cond = theorem_condition(condition);
            let class = classify_tlcr(e)?;
            if class.violation(cond).is_none() {
                return Err(not_violated(condition));
            }
            match cond {
                Condition::GMonotone => g_monotone(&mut cx)?,
                Condition::AllOrNothing => all_or_nothing(&mut cx)?,
                Condition::Cardinal => cardinal(&mut cx)?,
                Condition::RMonotone => r_monotone(&mut cx)?,
                Condition::RCardinalLinear => r_cardinal_linear(&mut cx)?,
                Condition::KDisjoint => k_disjoint(&mut cx)?,
            }
        }
        WitnessCondition::PiDomain => {
            let params = tlcr_params(e)?;
            if check_domain_safety(&params, SafetyDomain::Pi) {
                return Err(not_violated(condition));
            }
            match params.t {
                Threshold::Finite(_) => pi_finite_threshold(&mut cx, &params)?,
                Threshold::Infinite => pi_reuse_step(&mut cx, &params)?,
            }
        }
        WitnessCondition::PiFiniteThreshold => {
            let params = tlcr_params(e)?;
            match params.t {
                Threshold::Finite(t) if t > 1 => pi_finite_threshold(&mut cx, &params)?,
                _ => return Err(not_violated(condition)),
            }
        }
        WitnessCondition::PiReuseStep => {
            let params = tlcr_params(e)?;
            if params.t != Threshold::Infinite || check_domain_safety(&params, SafetyDomain::Pi) {
                return Err(not_violated(condition));
            }
            pi_reuse_step(&mut cx, &params)?
        }
        WitnessCondition::Sm | WitnessCondition::SmReuse | WitnessCondition::SmFiniteThreshold => {
            let params = tlcr_params(e)?;
            if check_sm_safety(&params, cx.g) {
                return Err(not_violated(condition));
            }
            let reused = reuse_below_t(&params, cx.n).is_some();
            match condition {
                WitnessCondition::SmReuse if !reused => return Err(not_violated(condition)),
                WitnessCondition::SmFiniteThreshold if params.t == Threshold::Infinite => {
                    return Err(not_violated(condition))
                }
                WitnessCondition::SmFiniteThreshold => sm_finite_threshold(&mut cx, &params)?,
                _ if reused => sm_reuse(&mut cx, &params)?,
                _ => sm_finite_threshold(&mut cx, &params)?,
            }
        }
        WitnessCondition::SvSingleton => {
            if check_singleton_profile(e)? {
                return Err(not_violated(condition));
            }
            sv_singleton(&mut cx)?
        }
        WitnessCondition::SvSmReuse => sv_sm_reuse(&mut cx)?,
        WitnessCondition::EquivalenceExcluding
        | WitnessCondition::Mto1Monotone
        | WitnessCondition::WeakAllOrNothing => {
            let p = partition.ok_or(Error::MissingPartition)?;
            if p.size() != cx.n {
                return Err(Error::GroundMismatch { left: cx.n, right: p.size() });
            }
            match condition {
                WitnessCondition::EquivalenceExcluding => {
                    if is_equivalence_excluding(e, p)? {
                        return Err(not_violated(condition));
                    }
                    equivalence_excluding(&mut cx, p)?
                }
                WitnessCondition::Mto1Monotone => mto1_monotone(&mut cx, p)?,
                // A gross exclusion missing part of `I_Z ∪ K` fails weak
                // all-or-nothingness through non-monotonicity.
                _ => match weak_all_or_nothing(&mut cx, p)? {
                    None if !check_equiv_dilation(e, p, DilationCondition::Mto1Monotone)? => {
                        mto1_monotone(&mut cx, p)?
                    }
                    found => found,
                },
            }
        }
    };
    match found {
        Some(w) => {
            w.validate(e)?;
            Ok(w)
        }
        None if cx.starved > 0 => Err(Error::InsufficientHeadroom {
            needed: 1,
            available: 0,
        }),
        None => Err(Error::WitnessInvalid(format!(
            "no {condition} construction reproduces a violation"
        ))),
    }
}

/// Tries the construction of every failed classifier condition in turn and
/// returns the first witness.
pub fn synthesize_any(e: &ExclusionFunction) -> Result<Witness> {
    let class = classify_tlcr(e)?;
    if class.is_tlcr {
        return Err(Error::ConditionNotViolated("threshold-linear with cardinal reuse".into()));
    }
    let mut last = None;
    for c in &class.failed_conditions {
        match synthesize(e, (*c).into()) {
            Ok(w) => return Ok(w),
            Err(err) => last = Some(err),
        }
    }
    Err(last.unwrap_or_else(|| Error::WitnessInvalid("no failed condition".into())))
}

fn theorem_condition(c: WitnessCondition) -> Condition {
    match c {
        WitnessCondition::GMonotone => Condition::GMonotone,
        WitnessCondition::AllOrNothing => Condition::AllOrNothing,
        WitnessCondition::Cardinal => Condition::Cardinal,
        WitnessCondition::RMonotone => Condition::RMonotone,
        WitnessCondition::RCardinalLinear => Condition::RCardinalLinear,
        _ => Condition::KDisjoint,
    }
}

fn not_violated(c: WitnessCondition) -> Error {
    Error::ConditionNotViolated(c.name().to_string())
}

fn tlcr_params(e: &ExclusionFunction) -> Result<TlcrParams> {
    let TlcrClassification { params, failed_conditions, .. } = classify_tlcr(e)?;
    params.ok_or_else(|| {
        let names: Vec<&str> = failed_conditions.iter().map(|c| c.name()).collect();
        Error::PreconditionFailed(format!(
            "not threshold-linear with cardinal reuse (fails {}); use a classifier condition",
            names.join(", ")
        ))
    })
}

/// Smallest `n` with `1 ≤ n < t` and `T^n ≠ ∅`.
fn reuse_below_t(p: &TlcrParams, size: usize) -> Option<usize> {
    (1..=size.max(p.reuse.len()))
        .take_while(|&n| p.t.admits(n))
        .find(|&n| !p.reuse_at(n).is_empty())
}

// Every construction below returns `Ok(None)` when no candidate reproduces.

fn first_reproducing(
    cx: &Ctx,
    candidate: Result<Option<Witness>>,
) -> Result<Option<Witness>> {
    match candidate? {
        Some(w) if w.reproduces(cx.e)? => Ok(Some(w)),
        _ => Ok(None),
    }
}

fn g_monotone(cx: &mut Ctx) -> Result<Option<Witness>> {
    let tested = cx.tested.clone();
    for &z in &tested {
        for &z2 in &tested {
            if z == z2 || !z.is_subset_of(z2) || cx.gross(z).is_subset_of(cx.gross(z2)) {
                continue;
            }
            let g2 = cx.gross(z2).finite().expect("a TOP superset contains everything");
            let pool = match cx.gross(z) {
                SetValue::Finite(g1) => g1 - g2,
                SetValue::Top => cx.full - g2,
            };
            let Some(a) = cx.fresh(pool) else { continue };
            let premise = format!(
                "G({}) = {} is not inside G({}) = {}; a = {}",
                cx.fmt(z),
                cx.fmt_v(cx.gross(z)),
                cx.fmt(z2),
                cx.fmt_v(cx.gross(z2)),
                cx.g.label(a)
            );
            let w = cx.witness(
                WitnessCondition::GMonotone,
                cx.resp(&items(z2), z2.len())?,
                cx.resp(&[a], 1)?,
                z.with(a),
                z2.with(a),
                Breach::Sub,
                None,
                premise,
            );
            if let Some(w) = first_reproducing(cx, w.map(Some))? {
                return Ok(Some(w));
            }
        }
    }
    Ok(None)
}

fn all_or_nothing(cx: &mut Ctx) -> Result<Option<Witness>> {
    let k = cx.k();
    let tested = cx.tested.clone();
    for &z in &tested {
        let SetValue::Finite(g) = cx.gross(z) else { continue };
        if g == z | k || z.is_empty() {
            continue;
        }
        let b = z.first().expect("non-empty");
        let Some(c) = cx.fresh(g - (z | k)) else { continue };
        let Some(a) = cx.fresh(cx.full - g) else { continue };
        let yb = z.with(a).with(c);
        let premise = format!(
            "G({}) = {} lies strictly between Z ∪ K and the universe; a = {}, b = {}, c = {}",
            cx.fmt(z),
            cx.fmt(g),
            cx.g.label(a),
            cx.g.label(b),
            cx.g.label(c)
        );
        let w = cx.witness(
            WitnessCondition::AllOrNothing,
            cx.resp(&items(z), z.len())?,
            cx.resp(&[c, a], 1)?,
            yb.without(b),
            yb,
            Breach::Sub,
            None,
            premise,
        );
        if let Some(w) = first_reproducing(cx, w.map(Some))? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// `C1` ranks `Z′` above `Z ∖ Z′` with quota `|Z|`, so it picks `Z′` from
/// `Z ∪ Z′ ∪ {a}` and `Z` from `Z ∪ {a}`.
fn cardinal_case1(cx: &mut Ctx, z: ItemSet, z2: ItemSet) -> Result<Option<Witness>> {
    let k = cx.k();
    if z.len() != z2.len() || !cx.gross(z).is_top() || !cx.in_dom(z2) {
        return Ok(None);
    }
    let Some(a) = cx.fresh(cx.full - (z | z2 | k)) else { return Ok(None) };
    let premise = format!(
        "|{}| = |{}| but only the first has G = TOP; a = {}",
        cx.fmt(z),
        cx.fmt(z2),
        cx.g.label(a)
    );
    let w = cx.witness(
        WitnessCondition::Cardinal,
        cx.resp(&preferring(z2, z), z.len())?,
        cx.resp(&[a], 1)?,
        z.with(a),
        (z | z2).with(a),
        Breach::Sub,
        None,
        premise,
    );
    first_reproducing(cx, w.map(Some))
}

fn cardinal(cx: &mut Ctx) -> Result<Option<Witness>> {
    let k = cx.k();
    let tested = cx.tested.clone();
    for &z in &tested {
        for &z2 in &tested {
            if let Some(w) = cardinal_case1(cx, z, z2)? {
                return Ok(Some(w));
            }
        }
    }
    // No fresh item outside `Z ∪ Z′ ∪ K`: route through `Z″ = Z′ ∖ {a} ∪ {b}`.
    for &z in &tested {
        for &z2 in &tested {
            if z.len() != z2.len() || !cx.gross(z).is_top() || !cx.in_dom(z2) || (z | k) == cx.full {
                continue;
            }
            for a in (z2 - (z | k)).iter() {
                for b in (cx.full - z.with(a)).iter() {
                    let z3 = z2.without(a).with(b);
                    if z3.len() != z2.len() {
                        continue;
                    }
                    if let Some(w) = cardinal_case1(cx, z, z3)? {
                        return Ok(Some(w));
                    }
                    if let Some(w) = cardinal_case1(cx, z3, z2)? {
                        return Ok(Some(w));
                    }
                }
            }
        }
    }
    Ok(None)
}

fn r_monotone(cx: &mut Ctx) -> Result<Option<Witness>> {
    let tested = cx.tested.clone();
    for &z in &tested {
        for &z2 in &tested {
            if z == z2 || !z.is_subset_of(z2) || !cx.in_dom(z) || !cx.in_dom(z2) {
                continue;
            }
            let Some(a) = (cx.reuse(z) - cx.reuse(z2)).first() else { continue };
            let Some(b) = cx.fresh(cx.outside(cx.gross(z2))) else { continue };
            let premise = format!(
                "{} is reused after {} but not after {}; b = {}",
                cx.g.label(a),
                cx.fmt(z),
                cx.fmt(z2),
                cx.g.label(b)
            );
            let w = cx.witness(
                WitnessCondition::RMonotone,
                cx.resp(&items(z2), z2.len())?,
                cx.resp(&[a, b], 1)?,
                z.with(b),
                z2.with(b),
                Breach::Sub,
                None,
                premise,
            );
            if let Some(w) = first_reproducing(cx, w.map(Some))? {
                return Ok(Some(w));
            }
        }
    }
    Ok(None)
}

fn r_cardinal_case1(cx: &mut Ctx, z: ItemSet, z2: ItemSet) -> Result<Option<Witness>> {
    let k = cx.k();
    if z.len() != z2.len() || !cx.in_dom(z) || !cx.in_dom(z2) {
        return Ok(None);
    }
    let Some(a) = ((cx.reuse(z) & z2) - cx.reuse(z2)).first() else { return Ok(None) };
    let Some(b) = cx.fresh(cx.full - (k | z | z2)) else { return Ok(None) };
    let premise = format!(
        "{} is reused after {} but not after {} of equal size; b = {}",
        cx.g.label(a),
        cx.fmt(z),
        cx.fmt(z2),
        cx.g.label(b)
    );
    let w = cx.witness(
        WitnessCondition::RCardinalLinear,
        cx.resp(&preferring(z2, z), z.len())?,
        cx.resp(&[a, b], 1)?,
        z.with(b),
        (z | z2).with(b),
        Breach::Sub,
        None,
        premise,
    );
    first_reproducing(cx, w.map(Some))
}

fn r_cardinal_linear(cx: &mut Ctx) -> Result<Option<Witness>> {
    let k = cx.k();
    let tested = cx.tested.clone();
    for &z in &tested {
        for &z2 in &tested {
            if let Some(w) = r_cardinal_case1(cx, z, z2)? {
                return Ok(Some(w));
            }
        }
    }
    // `K ∪ Z ∪ Z′` covers the ground set: swap some `c ∈ Z′ ∖ (Z ∪ K)` for a
    // `b` outside `Z ∪ Z′` and split the pair in two.
    for &z in &tested {
        for &z2 in &tested {
            if z.len() != z2.len() || !cx.in_dom(z) || !cx.in_dom(z2) {
                continue;
            }
            if ((cx.reuse(z) & z2) - cx.reuse(z2)).is_empty() {
                continue;
            }
            for b in (cx.full - (z | z2)).iter() {
                for c in (z2 - (z | k)).iter() {
                    let z3 = z2.without(c).with(b);
                    if let Some(w) = r_cardinal_case1(cx, z, z3)? {
                        return Ok(Some(w));
                    }
                    if let Some(w) = r_cardinal_case1(cx, z3, z2)? {
                        return Ok(Some(w));
                    }
                }
            }
        }
    }
    Ok(None)
}

fn k_disjoint(cx: &mut Ctx) -> Result<Option<Witness>> {
    let k = cx.k();
    let tested = cx.tested.clone();
    for &z in &tested {
        if !cx.in_dom(z) {
            continue;
        }
        let Some(a) = (cx.reuse(z) & k).first() else { continue };
        let Some(b) = cx.fresh(cx.full - (z | k)) else { continue };
        for &z2 in &tested {
            if z2.len() != z.len() || z2 == z || z2.contains(a) || z2.contains(b) {
                continue;
            }
            let premise = format!(
                "{} ∈ K is reused after {}; b = {}, Z' = {}",
                cx.g.label(a),
                cx.fmt(z),
                cx.g.label(b),
                cx.fmt(z2)
            );
            let w = cx.witness(
                WitnessCondition::KDisjoint,
                cx.resp(&preferring(z2, z), z.len())?,
                cx.resp(&[a, b], 1)?,
                z.with(b),
                (z | z2).with(b),
                Breach::Sub,
                None,
                premise,
            );
            if let Some(w) = first_reproducing(cx, w.map(Some))? {
                return Ok(Some(w));
            }
        }
    }
    Ok(None)
}

/// `C1` is a union of orders choosing `Z` from `Z ∪ Z′ ∪ {a}` and `Z′` from
/// `Z′ ∪ {a}` with `|Z′| = t`, so `C2` may add `a` only in the larger input.
fn pi_finite_threshold(cx: &mut Ctx, p: &TlcrParams) -> Result<Option<Witness>> {
    let Threshold::Finite(t) = p.t else { return Ok(None) };
    if t <= 1 {
        return Ok(None);
    }
    let k = p.base;
    let tested = cx.tested.clone();
    let all = cx.all.clone();
    for &z in &tested {
        if z.is_empty() || z.len() >= t || !cx.in_dom(z) {
            continue;
        }
        for &z2 in all.iter().filter(|s| s.len() == t) {
            if z.is_subset_of(z2) {
                continue;
            }
            let Some(a) = cx.fresh(cx.full - (z | z2 | k)) else { continue };
            let premise = format!(
                "t = {t}: |{}| < t = |{}|; a = {}",
                cx.fmt(z),
                cx.fmt(z2),
                cx.g.label(a)
            );
            let w = cx.witness(
                WitnessCondition::PiFiniteThreshold,
                make_footnote_union(cx.g, z, z2)?,
                cx.resp(&[a], 1)?,
                z2.with(a),
                (z | z2).with(a),
                Breach::Sub,
                None,
                premise,
            );
            if let Some(w) = first_reproducing(cx, w.map(Some))? {
                return Ok(Some(w));
            }
        }
    }
    Ok(None)
}

fn pi_reuse_step(cx: &mut Ctx, p: &TlcrParams) -> Result<Option<Witness>> {
    let k = p.base;
    let all = cx.all.clone();
    for l in 2..cx.n {
        let (tl, tl1) = (p.reuse_at(l), p.reuse_at(l + 1));
        for a in (tl1 - tl).iter() {
            for &z in all.iter().filter(|s| s.len() == l && s.contains(a)) {
                for &z2 in all.iter().filter(|s| s.len() == l + 1 && s.contains(a)) {
                    if z.is_subset_of(z2) {
                        continue;
                    }
                    let Some(b) = cx.fresh(cx.full - (z | z2 | k)) else { continue };
                    let premise = format!(
                        "{} ∈ T^{} but not T^{}; Z = {}, Z' = {}, b = {}",
                        cx.g.label(a),
                        l + 1,
                        l,
                        cx.fmt(z),
                        cx.fmt(z2),
                        cx.g.label(b)
                    );
                    let w = cx.witness(
                        WitnessCondition::PiReuseStep,
                        make_footnote_union(cx.g, z, z2)?,
                        cx.resp(&[a, b], 1)?,
                        z2.with(b),
                        (z | z2).with(b),
                        Breach::Sub,
                        None,
                        premise,
                    );
                    if let Some(w) = first_reproducing(cx, w.map(Some))? {
                        return Ok(Some(w));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// With `a ∈ T^n`, `C1` swaps its lowest pick `c` for `a` once `a` is
/// available; `a` is then reused by `C2` in place of `b`, so the choice
/// shrinks by one.
fn sm_reuse(cx: &mut Ctx, p: &TlcrParams) -> Result<Option<Witness>> {
    let k = p.base;
    let all = cx.all.clone();
    for n in (1..cx.n).take_while(|&n| p.t.admits(n)) {
        for a in p.reuse_at(n).iter() {
            for b in (cx.full - k.with(a)).iter() {
                for &z in all.iter().filter(|s| s.len() == n && !s.contains(a) && !s.contains(b)) {
                    let c = z.first().expect("n ≥ 1");
                    let mut order = vec![a];
                    order.extend(z.without(c).iter());
                    order.push(c);
                    let premise = format!(
                        "{} ∈ T^{n} with |X ∖ K| > 1; b = {}, Z = {}, c = {}",
                        cx.g.label(a),
                        cx.g.label(b),
                        cx.fmt(z),
                        cx.g.label(c)
                    );
                    let w = cx.witness(
                        WitnessCondition::SmReuse,
                        cx.resp(&order, n)?,
                        cx.resp(&[a, b], 1)?,
                        z.with(b),
                        z.with(a).with(b),
                        Breach::Sm,
                        None,
                        premise,
                    );
                    if let Some(w) = first_reproducing(cx, w.map(Some))? {
                        return Ok(Some(w));
                    }
                }
            }
        }
    }
    Ok(None)
}

fn sm_finite_threshold(cx: &mut Ctx, p: &TlcrParams) -> Result<Option<Witness>> {
    let Threshold::Finite(t) = p.t else { return Ok(None) };
    let outside = cx.full - p.base;
    let all = cx.all.clone();
    for (a, b) in outside.iter().flat_map(|a| outside.iter().filter(move |&b| b > a).map(move |b| (a, b))) {
        for &z in all.iter().filter(|s| s.len() == t && !s.contains(a) && !s.contains(b)) {
            let Some(c) = z.first() else { continue };
            let ab = ItemSet::singleton(a).with(b);
            let premise = format!(
                "t = {t} is finite with |X ∖ K| > 1; a = {}, b = {}, Z = {}, c = {}",
                cx.g.label(a),
                cx.g.label(b),
                cx.fmt(z),
                cx.g.label(c)
            );
            let w = cx.witness(
                WitnessCondition::SmFiniteThreshold,
                cx.resp(&items(z), t)?,
                cx.resp(&[a, b], 2)?,
                z.without(c) | ab,
                z | ab,
                Breach::Sm,
                None,
                premise,
            );
            if let Some(w) = first_reproducing(cx, w.map(Some))? {
                return Ok(Some(w));
            }
        }
    }
    cx.starved += 1;
    Ok(None)
}

/// The four steps of the singleton argument, each with single-valued inputs.
fn sv_singleton(cx: &mut Ctx) -> Result<Option<Witness>> {
    let SetValue::Finite(k) = cx.base() else {
        // A `TOP` base maps every singleton to the universe; nothing to break.
        return Ok(None);
    };
    let n = cx.n;
    let single = |x: usize| ItemSet::singleton(x);
    let cond = WitnessCondition::SvSingleton;

    // Step 1: some b ∈ K escapes E({a}).
    for a in 0..n {
        let SetValue::Finite(ea) = cx.ev(single(a)) else { continue };
        for b in (k - ea).iter().filter(|&b| b != a) {
            let premise = format!("{} ∈ K but not in E({{{}}})", cx.g.label(b), cx.g.label(a));
            let w = cx.witness(
                cond,
                cx.resp(&[a], 1)?,
                cx.resp(&[b], 1)?,
                single(b),
                single(a).with(b),
                Breach::Sub,
                None,
                premise,
            );
            if let Some(w) = first_reproducing(cx, w.map(Some))? {
                return Ok(Some(w));
            }
        }
    }
    // Step 2: G({a}) is neither TOP nor {a} ∪ K.
    for a in 0..n {
        let SetValue::Finite(ga) = cx.gross(single(a)) else { continue };
        for b in (ga - k.with(a)).iter() {
            for c in (cx.full - ga).iter() {
                let premise = format!(
                    "G({{{}}}) = {} adds {}; c = {}",
                    cx.g.label(a),
                    cx.fmt(ga),
                    cx.g.label(b),
                    cx.g.label(c)
                );
                let w = cx.witness(
                    cond,
                    cx.resp(&[a], 1)?,
                    cx.resp(&[b, c], 1)?,
                    single(b).with(c),
                    single(a).with(b).with(c),
                    Breach::Sub,
                    None,
                    premise,
                );
                if let Some(w) = first_reproducing(cx, w.map(Some))? {
                    return Ok(Some(w));
                }
            }
        }
    }
    // Step 3: G({a}) finite but G({b}) = TOP.
    for a in (0..n).filter(|&a| cx.in_dom(single(a))) {
        for b in (0..n).filter(|&b| !cx.in_dom(single(b))) {
            for c in (cx.full - k.with(a).with(b)).iter() {
                let premise = format!(
                    "G({{{}}}) is finite but G({{{}}}) = TOP; c = {}",
                    cx.g.label(a),
                    cx.g.label(b),
                    cx.g.label(c)
                );
                let w = cx.witness(
                    cond,
                    cx.resp(&[a, b], 1)?,
                    cx.resp(&[c], 1)?,
                    single(b).with(c),
                    single(a).with(b).with(c),
                    Breach::Sub,
                    None,
                    premise,
                );
                if let Some(w) = first_reproducing(cx, w.map(Some))? {
                    return Ok(Some(w));
                }
            }
        }
    }
    // Step 4: some a ∈ K is not excluded after {a}.
    for a in k.iter() {
        if cx.ev(single(a)).contains_set(single(a)) {
            continue;
        }
        for b in (cx.full - k).iter().filter(|&b| cx.in_dom(single(b))) {
            for c in (cx.full - k.with(a).with(b)).iter() {
                let premise = format!(
                    "{} ∈ K is reused after {{{}}}; b = {}, c = {}",
                    cx.g.label(a),
                    cx.g.label(a),
                    cx.g.label(b),
                    cx.g.label(c)
                );
                let w = cx.witness(
                    cond,
                    cx.resp(&[b, a], 1)?,
                    cx.resp(&[a, c], 1)?,
                    single(a).with(c),
                    single(a).with(b).with(c),
                    Breach::Sub,
                    None,
                    premise,
                );
                if let Some(w) = first_reproducing(cx, w.map(Some))? {
                    return Ok(Some(w));
                }
            }
        }
    }
    cx.starved += 1;
    Ok(None)
}

fn sv_sm_reuse(cx: &mut Ctx) -> Result<Option<Witness>> {
    let k = match crate::props::singleton_profile(cx.e)? {
        crate::props::SingletonProfile::Linear { base, reuse } if (cx.full - base).len() > 1 && !reuse.is_empty() => {
            base
        }
        _ => return Err(not_violated(WitnessCondition::SvSmReuse)),
    };
    let n = cx.n;
    for a in (0..n).filter(|&a| !cx.ev(ItemSet::singleton(a)).contains_set(ItemSet::singleton(a))) {
        for b in (cx.full - k.with(a)).iter() {
            for c in (0..n).filter(|&c| c != a && c != b) {
                let premise = format!(
                    "{{{}}} is reused with |X ∖ K| > 1; b = {}, c = {}",
                    cx.g.label(a),
                    cx.g.label(b),
                    cx.g.label(c)
                );
                let abc = ItemSet::from_items([a, b, c]);
                let w = cx.witness(
                    WitnessCondition::SvSmReuse,
                    cx.resp(&[a, c], 1)?,
                    cx.resp(&[a, b], 1)?,
                    abc.without(a),
                    abc,
                    Breach::Sm,
                    None,
                    premise,
                );
                if let Some(w) = first_reproducing(cx, w.map(Some))? {
                    return Ok(Some(w));
                }
            }
        }
    }
    cx.starved += 1;
    Ok(None)
}

fn feasible_tested(cx: &Ctx, p: &EquivalencePartition) -> Vec<ItemSet> {
    cx.tested.iter().copied().filter(|&z| p.is_feasible(z)).collect()
}

fn equivalence_excluding(cx: &mut Ctx, p: &EquivalencePartition) -> Result<Option<Witness>> {
    for z in feasible_tested(cx, p) {
        let covered = cx.gross(z);
        for y in (p.closure(z) - z).iter().filter(|&y| !covered.contains_set(ItemSet::singleton(y))) {
            let premise = format!(
                "{} is equivalent to a member of {} but not excluded",
                cx.g.label(y),
                cx.fmt(z)
            );
            let w = cx.witness(
                WitnessCondition::EquivalenceExcluding,
                cx.mto1(&items(z), z.len(), p)?,
                cx.mto1(&[y], 1, p)?,
                z.with(y),
                z.with(y),
                Breach::Mto1,
                Some(p),
                premise,
            );
            if let Some(w) = first_reproducing(cx, w.map(Some))? {
                return Ok(Some(w));
            }
        }
    }
    Ok(None)
}

fn check_completion_size(cx: &Ctx) -> Result<()> {
    if cx.n > MAX_COMPLETION_ITEMS {
        return Err(Error::BudgetExceeded(format!(
            "completion witnesses are validated on at most {MAX_COMPLETION_ITEMS} items"
        )));
    }
    Ok(())
}

fn mto1_monotone(cx: &mut Ctx, p: &EquivalencePartition) -> Result<Option<Witness>> {
    check_completion_size(cx)?;
    if check_equiv_dilation(cx.e, p, DilationCondition::Mto1Monotone)? {
        return Err(not_violated(WitnessCondition::Mto1Monotone));
    }
    let feasible = feasible_tested(cx, p);
    for &z in &feasible {
        for &z2 in &feasible {
            if z == z2 || !z.is_subset_of(z2) {
                continue;
            }
            let lhs = cx.gross(z).union(p.closure(z));
            let rhs = cx.gross(z2).union(p.closure(z2));
            let pool = match (lhs, rhs) {
                (_, SetValue::Top) => continue,
                (SetValue::Top, SetValue::Finite(r)) => cx.full - r,
                (SetValue::Finite(l), SetValue::Finite(r)) => l - r,
            };
            let Some(a) = cx.fresh(pool) else { continue };
            let premise = format!(
                "{} is excluded after {} but not after {}",
                cx.g.label(a),
                cx.fmt(z),
                cx.fmt(z2)
            );
            let w = cx.witness(
                WitnessCondition::Mto1Monotone,
                cx.mto1(&items(z2), z2.len(), p)?,
                cx.mto1(&[a], 1, p)?,
                z.with(a),
                z2.with(a),
                Breach::PiCompletion,
                Some(p),
                premise,
            );
            if let Some(w) = first_reproducing(cx, w.map(Some))? {
                return Ok(Some(w));
            }
        }
    }
    Ok(None)
}

fn weak_all_or_nothing(cx: &mut Ctx, p: &EquivalencePartition) -> Result<Option<Witness>> {
    check_completion_size(cx)?;
    if check_equiv_dilation(cx.e, p, DilationCondition::WeakAon)? {
        return Err(not_violated(WitnessCondition::WeakAllOrNothing));
    }
    let k = cx.k();
    for z in feasible_tested(cx, p) {
        let SetValue::Finite(g) = cx.gross(z) else { continue };
        let floor = p.closure(z) | k;
        if z.is_empty() || g == floor || !floor.is_subset_of(g) {
            continue;
        }
        let b = z.first().expect("non-empty");
        for c in (g - floor).iter() {
            for a in (cx.full - g).iter().filter(|&a| !p.equivalent(a, c)) {
                let yb = z.with(a).with(c);
                let premise = format!(
                    "G({}) = {} lies strictly between I_Z ∪ K and the universe; a = {}, b = {}, c = {}",
                    cx.fmt(z),
                    cx.fmt(g),
                    cx.g.label(a),
                    cx.g.label(b),
                    cx.g.label(c)
                );
                let w = cx.witness(
                    WitnessCondition::WeakAllOrNothing,
                    cx.mto1(&items(z), z.len(), p)?,
                    cx.mto1(&[c, a], 1, p)?,
                    yb.without(b),
                    yb,
                    Breach::PiCompletion,
                    Some(p),
                    premise,
                );
                if let Some(w) = first_reproducing(cx, w.map(Some))? {
                    return Ok(Some(w));
                }
            }
        }
    }
    Ok(None)
}

/// First failing pair of inputs in pair order, or `None` when every pair
/// preserves `property`.
pub fn brute_search(
    e: &ExclusionFunction,
    property: Property,
    left: Domain,
    right: Domain,
    cfg: &PreservationConfig,
) -> Result<Option<Witness>> {
    let source = crate::props::PairSource::build(e, left, right, cfg)?;
    let blocks = exclusion_blocks(e);
    let partition = cfg.partition.as_ref();
    let hit = (0..source.len())
        .into_par_iter()
        .map(|k| {
            let ((_, t1), (_, t2)) = source.get(k);
            let composed = compose_tables(t1, t2, &blocks)?;
            Ok(table_violation(&composed, property, partition)?.map(|v| (k, v)))
        })
        .find_map_first(|r: Result<Option<_>>| r.transpose());
    let Some(found) = hit else { return Ok(None) };
    let (k, v) = found?;
    let ((c1, _), (c2, _)) = source.get(k);
    let (ys, yb) = match property {
        Property::Mto1 => (v.y_small, v.y_small),
        _ => (v.y_small, v.y_big),
    };
    let narrative = format!(
        "pair {k} of {} ({} x {}): {}; {}; {}",
        source.len(),
        left.name(),
        right.name(),
        v.detail,
        trace(c1, c2, e, ys)?,
        trace(c1, c2, e, yb)?
    );
    let w = Witness {
        condition: None,
        c1: c1.clone(),
        c2: c2.clone(),
        y_small: ys,
        y_big: yb,
        breach: property.into(),
        partition: cfg.partition.clone(),
        narrative,
    };
    w.validate(e)?;
    Ok(Some(w))
}

/// Instance separating the quota procedures from the opposite fold.
#[derive(Clone, Debug)]
pub struct ProcedureWitness {
    pub quota: usize,
    pub components: Vec<ChoiceFunction>,
    /// Same final chooser, but the first chooser takes `Z1 ∪ Z2` alone. A
    /// right composition sees the same accumulated set `Z1 ∪ Z2` in both
    /// instances, while the individual quota admits `z3` only in the first.
    pub merged: Vec<ChoiceFunction>,
    pub y: ItemSet,
    pub aggregate: ItemSet,
    pub individual: ItemSet,
    pub fold_left: ItemSet,
    pub fold_right: ItemSet,
}

impl ProcedureWitness {
    /// Aggregate quota agrees with right composition and not with left
    /// composition; individual quota the other way round.
    pub fn separates(&self) -> bool {
        self.aggregate == self.fold_right
            && self.individual == self.fold_left
            && self.aggregate != self.fold_left
            && self.individual != self.fold_right
    }
}

/// Disjoint `Z1`, `Z2` with `|Z1|, |Z2| < N < |Z1| + |Z2|` and a further
/// item `z3`; `C1` picks `Z1`, `C2` picks `Z2` and `C3` picks `z3` from the
/// full input, and every label is the capacity `N`.
pub fn procedure_witness(ground: &GroundSet, quota: usize) -> Result<ProcedureWitness> {
    if quota < 3 {
        return Err(Error::PreconditionFailed(format!(
            "quota {quota} admits no Z1, Z2 below it whose union exceeds it"
        )));
    }
    let need = 2 * (quota - 1) + 1;
    if ground.size() < need {
        return Err(Error::InsufficientHeadroom {
            needed: need,
            available: ground.size(),
        });
    }
    let n = ground.size();
    let z1: Vec<usize> = (0..quota - 1).collect();
    let z2: Vec<usize> = (quota - 1..2 * (quota - 1)).collect();
    let z3 = 2 * (quota - 1);
    let resp = |acc: &[usize]| ChoiceFunction::responsive(ground, LinearOrder::from_acceptable(acc, n)?, acc.len());
    let components = vec![resp(&z1)?, resp(&z2)?, resp(&[z3])?];
    let both: Vec<usize> = z1.iter().chain(&z2).copied().collect();
    let merged = vec![resp(&both)?, resp(&z2)?, resp(&[z3])?];
    let labels = vec![capacity_label(ground, quota); 2];
    let y = ItemSet::full(need);
    Ok(ProcedureWitness {
        quota,
        y,
        aggregate: procedure_aggregate_quota(&components, quota)?.eval(y)?,
        individual: procedure_individual_quota(&components, quota)?.eval(y)?,
        fold_left: fold_left(&components, &labels)?.eval(y)?,
        fold_right: fold_right(&components, &labels)?.eval(y)?,
        components,
        merged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tlcr::TlcrParams;

    fn s(items: &[usize]) -> ItemSet {
        ItemSet::from_items(items.iter().copied())
    }

    #[test]
    fn aon_example_matches_construction() {
        let g = GroundSet::new(5).unwrap();
        let e = ExclusionFunction::from_fn(&g, |z| {
            SetValue::Finite(if s(&[0, 1]).is_subset_of(z) { z.with(2) } else { z })
        });
        let w = synthesize(&e, WitnessCondition::AllOrNothing).unwrap();
        assert_eq!(w.y_big, s(&[0, 1, 2, 3]));
        assert_eq!(w.y_small, s(&[1, 2, 3]));
        let c = w.composed(&e).unwrap();
        assert!(c.eval(w.y_big).unwrap().contains(3));
        assert!(!c.eval(w.y_small).unwrap().contains(3));
    }

    #[test]
    fn capacity_two_pi_witness() {
        let g = GroundSet::new(5).unwrap();
        let e = ExclusionFunction::tlcr(&g, TlcrParams::capacity(2)).unwrap();
        let w = synthesize(&e, WitnessCondition::PiDomain).unwrap();
        assert_eq!(w.condition, Some(WitnessCondition::PiFiniteThreshold));
        assert!(matches!(w.c1.rule(), crate::choice::ChoiceRule::UnionOfOrders(o) if o.len() == 2));
    }

    #[test]
    fn identity_violates_nothing() {
        let g = GroundSet::new(5).unwrap();
        let e = ExclusionFunction::identity(&g);
        for c in Condition::ALL {
            assert!(matches!(synthesize(&e, c.into()), Err(Error::ConditionNotViolated(_))));
        }
    }

    #[test]
    fn claim_instance() {
        let g = GroundSet::new(5).unwrap();
        let w = procedure_witness(&g, 3).unwrap();
        assert_eq!(w.fold_left, s(&[0, 1, 2, 3, 4]));
        assert_eq!(w.fold_right, s(&[0, 1, 2, 3]));
        assert!(w.separates());
    }
}
