//! Theorem batteries for `verify`.
//!
//! Each exclusion is judged against the prediction of the named result:
//! when its condition holds, the composition must preserve the property over
//! the stated input classes; when it fails, a validated counterexample must
//! exist. A result passes when the prediction is confirmed.

use lexichoice_core::battery::lemma_instance;
use lexichoice_core::compose::{capacity_label, fold_left, fold_right, lex_compose, procedure_aggregate_quota, procedure_individual_quota};
use lexichoice_core::contracts::{build_overline_e, verify_lemma_mto1};
use lexichoice_core::families::{random_responsive, rng};
use lexichoice_core::props::{
    check_choice, check_domain_safety, check_singleton_profile, check_sm_safety, check_sv_sm_profile, classify_tlcr,
    sm_safety_truncation_sensitive, verify_preservation, PreservationConfig, SafetyDomain, SvSide,
    TlcrClassification,
};
use lexichoice_core::witness::{brute_search, procedure_witness, synthesize, synthesize_any};
use lexichoice_core::{Domain, EquivalencePartition, Error, ExclusionFunction, Property, Witness, WitnessCondition};
use serde_json::json;

use crate::report::{Record, Sampling, TaskResult};
use crate::spec::{exclusion_table_def, Diagnostic, ExclusionDef, Expect, Loaded, Theorem};

pub struct Settings {
    pub seed: u64,
    pub sampling: Sampling,
}

impl Settings {
    fn config(&self) -> PreservationConfig {
        match self.sampling {
            Sampling::Exhaustive => PreservationConfig::exhaustive(),
            Sampling::Samples(k) => PreservationConfig::sampled(self.seed, k),
        }
    }

    fn count(&self, default: usize) -> usize {
        match self.sampling {
            Sampling::Exhaustive => default,
            Sampling::Samples(k) => k,
        }
    }
}

type Res<T> = Result<T, Diagnostic>;

struct Target<'a> {
    name: &'a str,
    partition: Option<&'a EquivalencePartition>,
    e: &'a ExclusionFunction,
    def: &'a ExclusionDef,
}

pub fn run(spec: &Loaded, theorem: Theorem, names: Option<&[String]>, s: &Settings) -> Res<Vec<TaskResult>> {
    let key = theorem.name();
    let wrap = |e: Error| spec.diag_at(key, format!("{key}: {e}"));
    match theorem {
        Theorem::ClaimLr => return claim_lr(spec, s).map(|r| vec![r]).map_err(wrap),
        Theorem::LemmaMto1 => return lemma(spec, s).map(|r| vec![r]).map_err(wrap),
        _ => {}
    }
    let names: Vec<String> = match names {
        Some(n) => n.to_vec(),
        None => spec.exclusions.keys().cloned().collect(),
    };
    let mut out = Vec::new();
    for name in &names {
        let t = Target { name, partition: spec.partition.as_ref(), e: spec.exclusion(name)?, def: spec.exclusion_def(name)? };
        let wrap = |e: Error| spec.diag_at(name, format!("{key} on {name}: {e}"));
        let r = match theorem {
            Theorem::Thm1 => thm1(&t, s),
            Theorem::PropPi => prop_pi(&t, s),
            Theorem::PropSm => prop_sm(&t, s),
            Theorem::SvSub => sv_sub(&t, s),
            Theorem::SubSv => sub_sv(&t, s),
            Theorem::SvSubsm => sv_subsm(&t, s),
            Theorem::SubsmSv => subsm_sv(&t, s),
            Theorem::RemarkCon => remark_con(&t, s),
            Theorem::ClaimLr | Theorem::LemmaMto1 => unreachable!("handled above"),
        }
        .map_err(wrap)?;
        out.push(r);
    }
    Ok(out)
}

fn verdict(task: Theorem, t: &Target, pass: bool, summary: String) -> TaskResult {
    let v = if pass { Expect::Pass } else { Expect::Fail };
    TaskResult::new(&format!("verify:{}", task.name()), Some(t.name), v, Expect::Pass, summary)
}

fn class_caveats(c: &TlcrClassification) -> Vec<String> {
    let mut out = Vec::new();
    if c.is_tlcr && c.finite_scale_threshold {
        out.push(format!("t = inf established only for sets of size <= {}", c.tested_len));
    }
    if c.is_tlcr && c.observed_levels < c.tested_len {
        out.push(format!("T^n unconstrained at this scale for n > {}", c.observed_levels));
    }
    out
}

/// Every listed property must survive over `left × right`.
fn preserved(
    task: Theorem,
    t: &Target,
    s: &Settings,
    props: &[Property],
    left: Domain,
    right: Domain,
    why: &str,
) -> Result<TaskResult, Error> {
    let cfg = s.config();
    let mut records = Vec::new();
    let mut pairs = Vec::new();
    let mut failures = 0;
    for &p in props {
        let report = verify_preservation(t.e, p, left, right, &cfg)?;
        failures += report.failure_count;
        pairs.push(json!({"property": p, "pairs": report.pairs_checked, "failures": report.failure_count}));
        records.extend(report.failures.iter().map(|f| Record::from_pair(f, p, t.def, t.e.ground(), t.partition)));
    }
    let names: Vec<&str> = props.iter().map(|p| p.name()).collect();
    let summary = format!(
        "{why}; {} preserved over {}×{}: {} failing pairs",
        names.join("+"),
        left.name(),
        right.name(),
        failures
    );
    let mut r = verdict(task, t, failures == 0, summary).with_data(json!({"prediction": "preserved", "checks": pairs}));
    r.records = records;
    Ok(r)
}

/// A counterexample must exist: from the constructions in order, then from
/// exhaustive search over `left × right` for `property`.
#[allow(clippy::too_many_arguments)]
fn broken(
    task: Theorem,
    t: &Target,
    s: &Settings,
    why: &str,
    constructions: &[&dyn Fn() -> Result<Witness, Error>],
    property: Property,
    left: Domain,
    right: Domain,
) -> Result<TaskResult, Error> {
    let mut caveats = Vec::new();
    let mut found = None;
    for make in constructions {
        match make() {
            Ok(w) => {
                found = Some(w);
                break;
            }
            Err(e @ (Error::InsufficientHeadroom { .. } | Error::WitnessInvalid(_))) => {
                caveats.push(format!("construction unavailable: {e}"));
            }
            Err(Error::ConditionNotViolated(_)) => {}
            Err(e) => return Err(e),
        }
    }
    if found.is_none() {
        found = brute_search(t.e, property, left, right, &s.config())?;
        if found.is_some() {
            caveats.push(format!("witness found by search over {}×{}", left.name(), right.name()));
        }
    }
    let pass = found.is_some();
    let summary = match &found {
        Some(w) => format!(
            "{why}; {} broken: {}",
            w.condition.map_or("property".to_string(), |c| c.name().to_string()),
            w.narrative.lines().next().unwrap_or_default()
        ),
        None => format!("{why}; no counterexample found at this scale"),
    };
    let mut r = verdict(task, t, pass, summary).with_data(json!({"prediction": "broken"}));
    r.records = found.iter().map(|w| Record::from_witness(w, t.def, t.e.ground(), t.partition)).collect();
    r.caveats = caveats;
    Ok(r)
}

fn thm1(t: &Target, s: &Settings) -> Result<TaskResult, Error> {
    let class = classify_tlcr(t.e)?;
    let mut r = if class.is_tlcr {
        let params = class.params.as_ref().expect("tlcr has params");
        let why = format!("threshold-linear ({params})");
        preserved(Theorem::Thm1, t, s, &[Property::Pi], Domain::Res, Domain::Res, &why)?
    } else {
        let why = format!("not threshold-linear ({})", failed_names(&class));
        broken(Theorem::Thm1, t, s, &why, &[&|| synthesize_any(t.e)], Property::Pi, Domain::Res, Domain::Res)?
    };
    r.caveats.extend(class_caveats(&class));
    Ok(r)
}

fn failed_names(c: &TlcrClassification) -> String {
    c.failed_conditions.iter().map(|c| c.name()).collect::<Vec<_>>().join(", ")
}

fn prop_pi(t: &Target, s: &Settings) -> Result<TaskResult, Error> {
    let class = classify_tlcr(t.e)?;
    let task = Theorem::PropPi;
    let mut r = match &class.params {
        None => {
            let why = format!("not threshold-linear ({})", failed_names(&class));
            broken(task, t, s, &why, &[&|| synthesize_any(t.e)], Property::Pi, Domain::PiGen, Domain::SvRes)?
        }
        Some(p) if check_domain_safety(p, SafetyDomain::Pi) => {
            preserved(task, t, s, &[Property::Pi], Domain::PiGen, Domain::PiGen, &format!("PI-safe ({p})"))?
        }
        Some(p) => broken(
            task,
            t,
            s,
            &format!("not PI-safe ({p})"),
            &[&|| synthesize(t.e, WitnessCondition::PiDomain)],
            Property::Pi,
            Domain::PiGen,
            Domain::SvRes,
        )?,
    };
    r.caveats.extend(class_caveats(&class));
    Ok(r)
}

fn prop_sm(t: &Target, s: &Settings) -> Result<TaskResult, Error> {
    let class = classify_tlcr(t.e)?;
    let task = Theorem::PropSm;
    let g = t.e.ground();
    let mut r = match &class.params {
        None => {
            let why = format!("not threshold-linear ({})", failed_names(&class));
            broken(task, t, s, &why, &[&|| synthesize_any(t.e)], Property::Sub, Domain::Res, Domain::Res)?
        }
        Some(p) if check_sm_safety(p, g) => {
            let mut r = preserved(
                task,
                t,
                s,
                &[Property::Sub, Property::Sm],
                Domain::Res,
                Domain::Res,
                &format!("SM-safe ({p})"),
            )?;
            if sm_safety_truncation_sensitive(p, g) {
                r.caveats.push("|X∖K| <= 1 only because the ground set is truncated".into());
            }
            r
        }
        Some(p) => broken(
            task,
            t,
            s,
            &format!("not SM-safe ({p})"),
            &[&|| synthesize(t.e, WitnessCondition::Sm)],
            Property::Sm,
            Domain::Res,
            Domain::Res,
        )?,
    };
    r.caveats.extend(class_caveats(&class));
    Ok(r)
}

fn sv_sub(t: &Target, s: &Settings) -> Result<TaskResult, Error> {
    let task = Theorem::SvSub;
    if check_singleton_profile(t.e)? {
        preserved(task, t, s, &[Property::Pi], Domain::SvRes, Domain::PiGen, "singleton profile is threshold-linear")
    } else {
        broken(
            task,
            t,
            s,
            "singleton profile is not threshold-linear",
            &[&|| synthesize(t.e, WitnessCondition::SvSingleton)],
            Property::Pi,
            Domain::SvRes,
            Domain::PiGen,
        )
    }
}

fn sub_sv(t: &Target, s: &Settings) -> Result<TaskResult, Error> {
    let class = classify_tlcr(t.e)?;
    let task = Theorem::SubSv;
    let mut r = match &class.params {
        Some(p) if check_domain_safety(p, SafetyDomain::Pi) => {
            preserved(task, t, s, &[Property::Pi], Domain::PiGen, Domain::SvRes, &format!("PI-safe ({p})"))?
        }
        _ => broken(
            task,
            t,
            s,
            "not threshold-linear with t in {0, 1, inf} and stationary reuse",
            &[&|| synthesize_any(t.e), &|| synthesize(t.e, WitnessCondition::PiDomain)],
            Property::Pi,
            Domain::PiGen,
            Domain::SvRes,
        )?,
    };
    r.caveats.extend(class_caveats(&class));
    Ok(r)
}

fn sv_subsm(t: &Target, s: &Settings) -> Result<TaskResult, Error> {
    let task = Theorem::SvSubsm;
    if check_sv_sm_profile(t.e, SvSide::SvFirst)? {
        preserved(
            task,
            t,
            s,
            &[Property::Pi, Property::Sm],
            Domain::SvRes,
            Domain::Res,
            "singleton profile threshold-linear without reuse",
        )
    } else {
        broken(
            task,
            t,
            s,
            "singleton profile fails or reuses items",
            &[
                &|| synthesize(t.e, WitnessCondition::SvSingleton),
                &|| synthesize(t.e, WitnessCondition::SvSmReuse),
            ],
            Property::Sm,
            Domain::SvRes,
            Domain::Res,
        )
    }
}

fn subsm_sv(t: &Target, s: &Settings) -> Result<TaskResult, Error> {
    let task = Theorem::SubsmSv;
    if check_sv_sm_profile(t.e, SvSide::SvSecond)? {
        preserved(
            task,
            t,
            s,
            &[Property::Pi, Property::Sm],
            Domain::Res,
            Domain::SvRes,
            "threshold-linear without reuse",
        )
    } else {
        broken(
            task,
            t,
            s,
            "not threshold-linear, or reuses items with |X∖K| > 1",
            &[
                &|| synthesize_any(t.e),
                &|| synthesize(t.e, WitnessCondition::Sm),
                &|| synthesize(t.e, WitnessCondition::SvSmReuse),
            ],
            Property::Sm,
            Domain::Res,
            Domain::SvRes,
        )
    }
}

fn remark_con(t: &Target, s: &Settings) -> Result<TaskResult, Error> {
    let mut cfg = s.config();
    cfg.fallback_count = s.count(60);
    let report = verify_preservation(t.e, Property::Con, Domain::ConSampled, Domain::ConSampled, &cfg)?;
    let pass = report.passed();
    let summary = format!(
        "consistency preserved over sampled consistent inputs: {} of {} pairs fail",
        report.failure_count, report.pairs_checked
    );
    let mut r = verdict(Theorem::RemarkCon, t, pass, summary)
        .with_data(json!({"pairs": report.pairs_checked, "failures": report.failure_count}));
    r.records = report
        .failures
        .iter()
        .map(|f| Record::from_pair(f, Property::Con, t.def, t.e.ground(), t.partition))
        .collect();
    Ok(r)
}

/// Quota procedures against folds under capacity labels, on seeded
/// responsive components, plus the separating instance.
fn claim_lr(spec: &Loaded, s: &Settings) -> Result<TaskResult, Error> {
    let g = &spec.ground;
    let n = g.size();
    let mut r = rng(s.seed);
    let instances = s.count(20);
    let (mut agree_right, mut agree_left, mut total) = (0usize, 0usize, 0usize);
    for _ in 0..instances {
        let comps: Vec<_> = (0..3).map(|_| random_responsive(g, &mut r)).collect();
        for quota in 1..=n {
            let labels = vec![capacity_label(g, quota); comps.len() - 1];
            let p1 = procedure_aggregate_quota(&comps, quota)?.tabulate()?;
            let p2 = procedure_individual_quota(&comps, quota)?.tabulate()?;
            agree_right += usize::from(fold_right(&comps, &labels)?.tabulate()? == p1);
            agree_left += usize::from(fold_left(&comps, &labels)?.tabulate()? == p2);
            total += 1;
        }
    }
    let sep = procedure_witness(g, 3);
    let separates = match &sep {
        Ok(w) => Some(w.separates()),
        Err(Error::InsufficientHeadroom { .. }) => None,
        Err(e) => return Err(e.clone()),
    };
    let pass = agree_right == total && agree_left == total && separates != Some(false);
    let summary = format!(
        "aggregate quota = right fold on {agree_right}/{total}, individual quota = left fold on {agree_left}/{total}; separating instance {}",
        match separates {
            Some(true) => "confirmed",
            Some(false) => "NOT confirmed",
            None => "needs at least 5 items",
        }
    );
    let v = if pass { Expect::Pass } else { Expect::Fail };
    let mut res = TaskResult::new("verify:claim-lr", None, v, Expect::Pass, summary);
    if let Ok(w) = sep {
        res.data = json!({
            "instances": total,
            "separating": {"input": w.y, "aggregate": w.aggregate, "individual": w.individual,
                           "fold_left": w.fold_left, "fold_right": w.fold_right}
        });
    } else {
        res.caveats.push("separating instance skipped: ground has fewer than 5 items".into());
    }
    Ok(res)
}

fn lemma(spec: &Loaded, s: &Settings) -> Result<TaskResult, Error> {
    let n = spec.ground.size();
    let blocks = spec.partition.as_ref().map_or(3.min(n), |p| p.blocks().len());
    let count = s.count(50);
    let (mut holds, mut pi) = (0, 0);
    let mut failed = Vec::new();
    for k in 0..count as u64 {
        let seed = s.seed.wrapping_add(k);
        let inst = lemma_instance(n, blocks, seed)?;
        let ok = verify_lemma_mto1(&inst.c1, &inst.c2, &inst.c1bar, &inst.c2bar, &inst.exclusion, &inst.partition)?;
        let ebar = build_overline_e(inst.exclusion.ground(), inst.params.clone())?;
        let composed = lex_compose(&inst.c1bar, &inst.c2bar, &ebar)?;
        let is_pi = check_choice(&composed, Property::Pi)?.holds;
        holds += usize::from(ok);
        pi += usize::from(is_pi);
        if !(ok && is_pi) {
            failed.push(json!({"seed": seed, "params": inst.params, "exclusion": exclusion_table_def(&inst.exclusion)}));
        }
    }
    let pass = holds == count && pi == count;
    let summary = format!("{holds}/{count} instances complete the composition; {pi}/{count} composed completions are PI");
    let v = if pass { Expect::Pass } else { Expect::Fail };
    Ok(TaskResult::new("verify:lemma-mto1", None, v, Expect::Pass, summary)
        .with_data(json!({"items": n, "blocks": blocks, "instances": count, "failed": failed})))
}
