//! Reports: per-task verdicts with replayable failure records.

use lexichoice_core::props::{check_choice_with, PairFailure, Violation};
use lexichoice_core::{
    Breach, EquivalencePartition, GroundSet, ItemSet, Property, Witness, WitnessCondition,
};
use serde::{Deserialize, Serialize};

use crate::spec::{build_choice, build_exclusion, choice_def, ChoiceDef, ExclusionDef, Expect};

pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub tool: String,
    pub tool_version: String,
    pub report_version: u32,
    pub spec: String,
    pub seed: u64,
    pub sampling: Sampling,
    pub ok: bool,
    pub results: Vec<TaskResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampling {
    Exhaustive,
    Samples(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskResult {
    pub task: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    pub verdict: Expect,
    pub expected: Expect,
    pub ok: bool,
    pub summary: String,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub data: serde_json::Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub records: Vec<Record>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub caveats: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

impl TaskResult {
    pub fn new(task: &str, target: Option<&str>, verdict: Expect, expected: Expect, summary: impl Into<String>) -> Self {
        TaskResult {
            task: task.into(),
            target: target.map(Into::into),
            verdict,
            expected,
            ok: verdict == expected,
            summary: summary.into(),
            data: serde_json::Value::Null,
            records: Vec::new(),
            caveats: Vec::new(),
            timing_ms: None,
        }
    }

    pub fn with_data(mut self, data: serde_json::Value) -> Self {
        self.data = data;
        self
    }
}

/// Enough to rebuild and re-check a failure without the originating spec.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Record {
    /// `L_E(C1, C2)` misbehaves at `(y_small, y_big)`.
    Composition {
        ground_size: usize,
        headroom: usize,
        exclusion: ExclusionDef,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        partition: Option<Vec<ItemSet>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        condition: Option<WitnessCondition>,
        breach: Breach,
        c1: ChoiceDef,
        c2: ChoiceDef,
        y_small: ItemSet,
        y_big: ItemSet,
        narrative: String,
    },
    /// A single choice function fails `property` at `(y_small, y_big)`.
    Choice {
        ground_size: usize,
        headroom: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        partition: Option<Vec<ItemSet>>,
        function: ChoiceDef,
        property: Property,
        y_small: ItemSet,
        y_big: ItemSet,
        detail: String,
    },
}

fn blocks(p: Option<&EquivalencePartition>) -> Option<Vec<ItemSet>> {
    p.map(|p| p.blocks().to_vec())
}

impl Record {
    /// `partition` is used when the witness carries none of its own.
    pub fn from_witness(
        w: &Witness,
        exclusion: &ExclusionDef,
        ground: &GroundSet,
        partition: Option<&EquivalencePartition>,
    ) -> Self {
        Record::Composition {
            ground_size: ground.size(),
            headroom: ground.headroom(),
            exclusion: exclusion.clone(),
            partition: blocks(w.partition.as_ref().or(partition)),
            condition: w.condition,
            breach: w.breach,
            c1: choice_def(&w.c1),
            c2: choice_def(&w.c2),
            y_small: w.y_small,
            y_big: w.y_big,
            narrative: w.narrative.clone(),
        }
    }

    pub fn from_pair(
        f: &PairFailure,
        property: Property,
        exclusion: &ExclusionDef,
        ground: &GroundSet,
        partition: Option<&EquivalencePartition>,
    ) -> Self {
        Record::Composition {
            ground_size: ground.size(),
            headroom: ground.headroom(),
            exclusion: exclusion.clone(),
            partition: blocks(partition),
            condition: None,
            breach: property.into(),
            c1: choice_def(&f.c1),
            c2: choice_def(&f.c2),
            y_small: f.violation.y_small,
            y_big: f.violation.y_big,
            narrative: f.violation.detail.clone(),
        }
    }

    pub fn from_violation(
        function: ChoiceDef,
        property: Property,
        v: &Violation,
        ground: &GroundSet,
        partition: Option<&EquivalencePartition>,
    ) -> Self {
        Record::Choice {
            ground_size: ground.size(),
            headroom: ground.headroom(),
            partition: blocks(partition),
            function,
            property,
            y_small: v.y_small,
            y_big: v.y_big,
            detail: v.detail.clone(),
        }
    }

    /// Rebuilds the record and checks that the failure still occurs.
    pub fn replay(&self) -> Result<bool, String> {
        match self {
            Record::Composition {
                ground_size,
                headroom,
                exclusion,
                partition,
                condition,
                breach,
                c1,
                c2,
                y_small,
                y_big,
                narrative,
            } => {
                let g = GroundSet::with_headroom(*ground_size, *headroom).map_err(|e| e.to_string())?;
                let p = rebuild_partition(partition)?;
                let e = build_exclusion(&g, p.as_ref(), exclusion)?;
                let w = Witness {
                    condition: *condition,
                    c1: build_choice(&g, p.as_ref(), c1)?,
                    c2: build_choice(&g, p.as_ref(), c2)?,
                    y_small: *y_small,
                    y_big: *y_big,
                    breach: *breach,
                    partition: p,
                    narrative: narrative.clone(),
                };
                w.reproduces(&e).map_err(|e| e.to_string())
            }
            Record::Choice {
                ground_size,
                headroom,
                partition,
                function,
                property,
                y_small,
                y_big,
                ..
            } => {
                let g = GroundSet::with_headroom(*ground_size, *headroom).map_err(|e| e.to_string())?;
                let p = rebuild_partition(partition)?;
                let c = build_choice(&g, p.as_ref(), function)?;
                let verdict = check_choice_with(&c, *property, p.as_ref()).map_err(|e| e.to_string())?;
                Ok(verdict.witness.is_some_and(|v| v.y_small == *y_small && v.y_big == *y_big))
            }
        }
    }
}

fn rebuild_partition(blocks: &Option<Vec<ItemSet>>) -> Result<Option<EquivalencePartition>, String> {
    blocks
        .as_ref()
        .map(|b| EquivalencePartition::new(b.clone()).map_err(|e| e.to_string()))
        .transpose()
}
