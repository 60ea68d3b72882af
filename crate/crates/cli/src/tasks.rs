//! Single-task runners. Each returns results or a located diagnostic.

use lexichoice_core::contracts::verify_lemma_mto1;
use lexichoice_core::props::{check_choice_with, classify_tlcr};
use lexichoice_core::witness::{synthesize_with, trace};
use lexichoice_core::{CompositionTree, Error, ItemSet, Property, WitnessCondition};
use serde_json::json;

use crate::report::{Record, TaskResult};
use crate::spec::{choice_def, Diagnostic, Expect, Loaded, TaskDef};
use crate::theorems::{self, Settings};
use crate::tree;

type Res<T> = Result<T, Diagnostic>;

pub fn run(spec: &Loaded, task: &TaskDef, s: &Settings) -> Res<Vec<TaskResult>> {
    match task {
        TaskDef::Classify { name, expect } => classify(spec, name, *expect).map(|r| vec![r]),
        TaskDef::Check { name, prop, expect } => check(spec, name, *prop, *expect).map(|r| vec![r]),
        TaskDef::Compose { tree, eval } => compose(spec, tree, *eval).map(|r| vec![r]),
        TaskDef::Verify { theorem, names } => theorems::run(spec, *theorem, names.as_deref(), s),
        TaskDef::Witness { name, condition } => witness(spec, name, *condition).map(|r| vec![r]),
        TaskDef::Lemma { exclusion, c1, c2, c1bar, c2bar } => {
            lemma(spec, exclusion, [c1, c2, c1bar, c2bar]).map(|r| vec![r])
        }
    }
}

fn core_err(spec: &Loaded, key: &str, e: Error) -> Diagnostic {
    spec.diag_at(key, format!("{key}: {e}"))
}

/// Without an expectation the classification is informational and always ok.
pub fn classify(spec: &Loaded, name: &str, expect: Option<Expect>) -> Res<TaskResult> {
    let e = spec.exclusion(name)?;
    let class = classify_tlcr(e).map_err(|err| core_err(spec, name, err))?;
    let verdict = if class.is_tlcr { Expect::Pass } else { Expect::Fail };
    let summary = match &class.params {
        Some(p) => format!("threshold-linear with cardinal reuse: {p}"),
        None => {
            let failed: Vec<_> = class.failed_conditions.iter().map(|c| c.name()).collect();
            format!("not threshold-linear: fails {}", failed.join(", "))
        }
    };
    let mut r = TaskResult::new("classify", Some(name), verdict, expect.unwrap_or(verdict), summary)
        .with_data(serde_json::to_value(&class).expect("classification serializes"));
    if class.is_tlcr && class.finite_scale_threshold {
        r.caveats.push(format!("t = inf established only for sets of size <= {}", class.tested_len));
    }
    if class.is_tlcr && class.observed_levels < class.tested_len {
        r.caveats.push(format!("T^n unconstrained at this scale for n > {}", class.observed_levels));
    }
    let g = e.ground();
    if g.headroom() > 0 {
        r.caveats.push(format!(
            "sets larger than {} items are outside the tested scale (headroom {})",
            g.tested_len(),
            g.headroom()
        ));
    }
    Ok(r)
}

pub fn check(spec: &Loaded, name: &str, prop: Property, expect: Option<Expect>) -> Res<TaskResult> {
    let c = spec.choice(name)?;
    let partition = if prop == Property::Mto1 { Some(spec.partition(name)?) } else { spec.partition.as_ref() };
    let verdict = check_choice_with(c, prop, partition).map_err(|e| core_err(spec, name, e))?;
    let v = if verdict.holds { Expect::Pass } else { Expect::Fail };
    let summary = match &verdict.witness {
        None => format!("{} holds", prop.name()),
        Some(w) => format!("{} fails: {}", prop.name(), w.detail),
    };
    let mut r = TaskResult::new("check", Some(name), v, expect.unwrap_or(Expect::Pass), summary);
    if let Some(w) = &verdict.witness {
        r.records.push(Record::from_violation(choice_def(c), prop, w, &spec.ground, spec.partition.as_ref()));
    }
    Ok(r)
}

pub fn compose(spec: &Loaded, src: &str, eval: Option<ItemSet>) -> Res<TaskResult> {
    let diag = |m: String| spec.diag_at("tree", m);
    let expr = tree::parse(src).map_err(diag)?;
    let t = tree::build(&expr, spec).map_err(diag)?;
    let c = t.eval().map_err(|e| diag(e.to_string()))?;
    let g = &spec.ground;
    let data = match eval {
        Some(y) => {
            g.check(y).map_err(|e| diag(e.to_string()))?;
            let out = c.eval(y).map_err(|e| diag(e.to_string()))?;
            let steps = match &t {
                CompositionTree::Node { left, right, label } => {
                    let (l, r) = (left.eval(), right.eval());
                    let (l, r) = (l.map_err(|e| diag(e.to_string()))?, r.map_err(|e| diag(e.to_string()))?);
                    Some(trace(&l, &r, label, y).map_err(|e| diag(e.to_string()))?)
                }
                CompositionTree::Leaf(_) => None,
            };
            json!({"input": y, "output": out, "trace": steps})
        }
        None => {
            let table = c.tabulate().map_err(|e| diag(e.to_string()))?;
            let rows: Vec<_> = g.all_subsets().into_iter().map(|y| json!([y, table.get(y)])).collect();
            json!({"table": rows})
        }
    };
    let summary = match eval {
        Some(y) => format!("{src} at {}", g.format_set(y)),
        None => format!("{src} tabulated on {} inputs", 1usize << g.size()),
    };
    Ok(TaskResult::new("compose", Some(src), Expect::Pass, Expect::Pass, summary).with_data(data))
}

pub fn witness(spec: &Loaded, name: &str, condition: WitnessCondition) -> Res<TaskResult> {
    let e = spec.exclusion(name)?;
    let def = spec.exclusion_def(name)?;
    let p = spec.partition.as_ref();
    let w = synthesize_with(e, condition, p).map_err(|err| core_err(spec, name, err))?;
    let summary = w.narrative.lines().next().unwrap_or_default().to_string();
    let mut r = TaskResult::new("witness", Some(name), Expect::Pass, Expect::Pass, summary);
    r.records.push(Record::from_witness(&w, def, e.ground(), p));
    Ok(r)
}

pub fn lemma(spec: &Loaded, exclusion: &str, names: [&String; 4]) -> Res<TaskResult> {
    let e = spec.exclusion(exclusion)?;
    let p = spec.partition("lemma")?;
    let [c1, c2, c1bar, c2bar] = names.map(|n| spec.choice(n));
    let holds = verify_lemma_mto1(c1?, c2?, c1bar?, c2bar?, e, p).map_err(|err| core_err(spec, exclusion, err))?;
    let v = if holds { Expect::Pass } else { Expect::Fail };
    let summary = if holds {
        "the composition of the completions completes the composition".to_string()
    } else {
        "the composition of the completions does not complete the composition".to_string()
    };
    Ok(TaskResult::new("lemma", Some(exclusion), v, Expect::Pass, summary))
}
