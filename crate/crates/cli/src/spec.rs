//! Spec files: ground set, optional partition, named functions and tasks.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use lexichoice_core::{
    ChoiceFunction, ChoiceRule, EquivalencePartition, ExclusionFunction, GroundSet, ItemSet, LinearOrder, Property,
    SetValue, Threshold, TlcrParams, WitnessCondition,
};
use serde::{Deserialize, Serialize};

pub const SPEC_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    #[serde(default = "default_version")]
    pub version: u32,
    pub ground: GroundDef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<ItemSet>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub choices: BTreeMap<String, ChoiceDef>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub exclusions: BTreeMap<String, ExclusionDef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tasks: Vec<TaskDef>,
}

fn default_version() -> u32 {
    SPEC_VERSION
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundDef {
    pub size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub headroom: Option<usize>,
}

/// A choice function. Orders are full rankings with one `null` marking `∅`;
/// `acceptable` lists only the acceptable items, best first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ChoiceDef {
    Responsive {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        order: Option<LinearOrder>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        acceptable: Option<Vec<usize>>,
        quota: usize,
    },
    UnionOfOrders {
        orders: Vec<Vec<usize>>,
    },
    Mto1Responsive {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        order: Option<LinearOrder>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        acceptable: Option<Vec<usize>>,
        quota: usize,
    },
    /// `[input, output]` pairs covering every subset.
    Table {
        entries: Vec<(ItemSet, ItemSet)>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ExclusionDef {
    Identity,
    Empty,
    Capacity {
        n: usize,
    },
    Tlcr {
        t: Threshold,
        #[serde(rename = "K", default)]
        base: ItemSet,
        #[serde(rename = "T", default)]
        reuse: Vec<ItemSet>,
    },
    UnderlineEquiv,
    /// `[input, value]` pairs; subsets without an entry take `default`.
    Table {
        entries: Vec<(ItemSet, SetValue)>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        default: Option<TableDefault>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableDefault {
    Identity,
    Empty,
    #[serde(rename = "TOP")]
    Top,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expect {
    Pass,
    Fail,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    Thm1,
    PropPi,
    PropSm,
    SvSub,
    SubSv,
    SvSubsm,
    SubsmSv,
    RemarkCon,
    ClaimLr,
    LemmaMto1,
}

impl Theorem {
    pub const ALL: [Theorem; 10] = [
        Theorem::Thm1,
        Theorem::PropPi,
        Theorem::PropSm,
        Theorem::SvSub,
        Theorem::SubSv,
        Theorem::SvSubsm,
        Theorem::SubsmSv,
        Theorem::RemarkCon,
        Theorem::ClaimLr,
        Theorem::LemmaMto1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Theorem::Thm1 => "thm1",
            Theorem::PropPi => "prop-pi",
            Theorem::PropSm => "prop-sm",
            Theorem::SvSub => "sv-sub",
            Theorem::SubSv => "sub-sv",
            Theorem::SvSubsm => "sv-subsm",
            Theorem::SubsmSv => "subsm-sv",
            Theorem::RemarkCon => "remark-con",
            Theorem::ClaimLr => "claim-lr",
            Theorem::LemmaMto1 => "lemma-mto1",
        }
    }
}

impl std::str::FromStr for Theorem {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Theorem::ALL.iter().map(|t| t.name()).collect();
                format!("unknown theorem {s:?}; expected one of {}", names.join(", "))
            })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TaskDef {
    Classify {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<Expect>,
    },
    Check {
        name: String,
        prop: Property,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<Expect>,
    },
    Compose {
        tree: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eval: Option<ItemSet>,
    },
    Verify {
        theorem: Theorem,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        names: Option<Vec<String>>,
    },
    Witness {
        name: String,
        condition: WitnessCondition,
    },
    Lemma {
        exclusion: String,
        c1: String,
        c2: String,
        c1bar: String,
        c2bar: String,
    },
}

/// A failure to read or resolve a spec, located in its file when possible.
#[derive(Debug)]
pub struct Diagnostic {
    pub file: PathBuf,
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl Diagnostic {
    pub fn plain(file: &Path, message: impl Into<String>) -> Self {
        Diagnostic { file: file.to_path_buf(), line: None, column: None, message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.file.display())?;
        if let Some(l) = self.line {
            write!(f, ":{l}")?;
            if let Some(c) = self.column {
                write!(f, ":{c}")?;
            }
        }
        write!(f, ": {}", self.message)
    }
}

/// A parsed spec with every named function built.
#[derive(Debug)]
pub struct Loaded {
    pub path: PathBuf,
    pub text: String,
    pub spec: SpecFile,
    pub ground: GroundSet,
    pub partition: Option<EquivalencePartition>,
    pub choices: BTreeMap<String, ChoiceFunction>,
    pub exclusions: BTreeMap<String, ExclusionFunction>,
}

impl Loaded {
    /// Diagnostic pointing at the first line that mentions `"key"`.
    pub fn diag_at(&self, key: &str, message: impl Into<String>) -> Diagnostic {
        locate(&self.path, &self.text, key, message.into())
    }

    pub fn choice(&self, name: &str) -> Result<&ChoiceFunction, Diagnostic> {
        self.choices
            .get(name)
            .ok_or_else(|| self.diag_at(name, format!("no choice function named {name:?}")))
    }

    pub fn exclusion(&self, name: &str) -> Result<&ExclusionFunction, Diagnostic> {
        self.exclusions
            .get(name)
            .ok_or_else(|| self.diag_at(name, format!("no exclusion function named {name:?}")))
    }

    pub fn exclusion_def(&self, name: &str) -> Result<&ExclusionDef, Diagnostic> {
        self.spec
            .exclusions
            .get(name)
            .ok_or_else(|| self.diag_at(name, format!("no exclusion function named {name:?}")))
    }

    pub fn partition(&self, what: &str) -> Result<&EquivalencePartition, Diagnostic> {
        self.partition
            .as_ref()
            .ok_or_else(|| self.diag_at("ground", format!("{what} needs a \"partition\"")))
    }

    /// Items given as indices or ground labels, comma separated, optionally
    /// in brackets or braces.
    pub fn parse_set(&self, text: &str) -> Result<ItemSet, String> {
        parse_set(&self.ground, text)
    }
}

pub fn parse_set(ground: &GroundSet, text: &str) -> Result<ItemSet, String> {
    let inner = text.trim().trim_start_matches(['[', '{']).trim_end_matches([']', '}']);
    let mut set = ItemSet::EMPTY;
    for tok in inner.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let tok = tok.trim_matches('"');
        let item = ground
            .item_by_label(tok)
            .or_else(|| tok.parse().ok().filter(|&i| i < ground.size()))
            .ok_or_else(|| format!("unknown item {tok:?}"))?;
        set = set.with(item);
    }
    Ok(set)
}

fn locate(path: &Path, text: &str, key: &str, message: String) -> Diagnostic {
    let quoted = format!("\"{key}\"");
    let line = text.lines().position(|l| l.contains(&quoted)).map(|i| i + 1);
    Diagnostic {
        file: path.to_path_buf(),
        line,
        column: None,
        message,
    }
}

pub fn load(path: &Path) -> Result<Loaded, Diagnostic> {
    let text = std::fs::read_to_string(path).map_err(|e| Diagnostic {
        file: path.to_path_buf(),
        line: None,
        column: None,
        message: format!("cannot read: {e}"),
    })?;
    let spec: SpecFile = serde_json::from_str(&text).map_err(|e| Diagnostic {
        file: path.to_path_buf(),
        line: Some(e.line()),
        column: Some(e.column()),
        message: e.to_string(),
    })?;
    build(path, text, spec)
}

fn build(path: &Path, text: String, spec: SpecFile) -> Result<Loaded, Diagnostic> {
    let at = |key: &str, msg: String| locate(path, &text, key, msg);
    if spec.version != SPEC_VERSION {
        return Err(at("version", format!("unsupported spec version {}", spec.version)));
    }
    let g = &spec.ground;
    let headroom = g.headroom.unwrap_or_else(|| {
        lexichoice_core::set::DEFAULT_HEADROOM.min(g.size.saturating_sub(1))
    });
    let ground = match &g.labels {
        Some(labels) if labels.len() != g.size => {
            return Err(at("labels", format!("{} labels for {} items", labels.len(), g.size)))
        }
        Some(labels) => GroundSet::labelled(labels.iter().cloned(), headroom),
        None => GroundSet::with_headroom(g.size, headroom),
    }
    .map_err(|e| at("ground", e.to_string()))?;

    let partition = match &spec.partition {
        None => None,
        Some(blocks) => {
            let p = EquivalencePartition::new(blocks.clone()).map_err(|e| at("partition", e.to_string()))?;
            if p.size() != ground.size() {
                return Err(at(
                    "partition",
                    format!("partition covers {} items, ground has {}", p.size(), ground.size()),
                ));
            }
            Some(p)
        }
    };

    let mut choices = BTreeMap::new();
    for (name, def) in &spec.choices {
        if spec.exclusions.contains_key(name) {
            return Err(at(name, format!("{name:?} names both a choice and an exclusion function")));
        }
        let c = build_choice(&ground, partition.as_ref(), def).map_err(|m| at(name, format!("{name}: {m}")))?;
        choices.insert(name.clone(), c);
    }
    let mut exclusions = BTreeMap::new();
    for (name, def) in &spec.exclusions {
        let e = build_exclusion(&ground, partition.as_ref(), def).map_err(|m| at(name, format!("{name}: {m}")))?;
        exclusions.insert(name.clone(), e);
    }
    let loaded = Loaded {
        path: path.to_path_buf(),
        text,
        spec,
        ground,
        partition,
        choices,
        exclusions,
    };
    check_task_names(&loaded)?;
    Ok(loaded)
}

fn check_task_names(l: &Loaded) -> Result<(), Diagnostic> {
    for task in &l.spec.tasks {
        match task {
            TaskDef::Classify { name, .. } | TaskDef::Witness { name, .. } => {
                l.exclusion(name)?;
            }
            TaskDef::Check { name, .. } => {
                l.choice(name)?;
            }
            TaskDef::Verify { names: Some(names), .. } => {
                for n in names {
                    l.exclusion(n)?;
                }
            }
            TaskDef::Lemma { exclusion, c1, c2, c1bar, c2bar } => {
                l.exclusion(exclusion)?;
                for n in [c1, c2, c1bar, c2bar] {
                    l.choice(n)?;
                }
            }
            TaskDef::Verify { names: None, .. } | TaskDef::Compose { .. } => {}
        }
    }
    Ok(())
}

fn order_from(order: &Option<LinearOrder>, acceptable: &Option<Vec<usize>>, n: usize) -> Result<LinearOrder, String> {
    match (order, acceptable) {
        (Some(o), None) => Ok(o.clone()),
        (None, Some(acc)) => LinearOrder::from_acceptable(acc, n).map_err(|e| e.to_string()),
        _ => Err("give exactly one of \"order\" and \"acceptable\"".into()),
    }
}

pub fn build_choice(
    ground: &GroundSet,
    partition: Option<&EquivalencePartition>,
    def: &ChoiceDef,
) -> Result<ChoiceFunction, String> {
    let n = ground.size();
    let built = match def {
        ChoiceDef::Responsive { order, acceptable, quota } => {
            ChoiceFunction::responsive(ground, order_from(order, acceptable, n)?, *quota)
        }
        ChoiceDef::UnionOfOrders { orders } => {
            let orders = orders
                .iter()
                .map(|acc| LinearOrder::from_acceptable(acc, n))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?;
            ChoiceFunction::union_of_orders(ground, orders)
        }
        ChoiceDef::Mto1Responsive { order, acceptable, quota } => {
            let p = partition.ok_or("many-to-one responsive choice needs a \"partition\"")?;
            ChoiceFunction::mto1_responsive(ground, order_from(order, acceptable, n)?, *quota, p.clone())
        }
        ChoiceDef::Table { entries } => {
            let mut map = BTreeMap::new();
            for &(y, c) in entries {
                if map.insert(y, c).is_some() {
                    return Err(format!("duplicate entry for {}", ground.format_set(y)));
                }
            }
            if let Some(y) = ground.all_subsets().into_iter().find(|y| !map.contains_key(y)) {
                return Err(format!("table has no entry for {}", ground.format_set(y)));
            }
            ChoiceFunction::table(ground, map)
        }
    };
    built.map_err(|e| e.to_string())
}

pub fn build_exclusion(
    ground: &GroundSet,
    partition: Option<&EquivalencePartition>,
    def: &ExclusionDef,
) -> Result<ExclusionFunction, String> {
    let built = match def {
        ExclusionDef::Identity => Ok(ExclusionFunction::identity(ground)),
        ExclusionDef::Empty => Ok(ExclusionFunction::empty(ground)),
        ExclusionDef::Capacity { n } => Ok(ExclusionFunction::capacity(ground, *n)),
        ExclusionDef::Tlcr { t, base, reuse } => {
            ExclusionFunction::tlcr(ground, TlcrParams::new(*t, *base, reuse.clone()))
        }
        ExclusionDef::UnderlineEquiv => {
            let p = partition.ok_or("underline-equiv needs a \"partition\"")?;
            ExclusionFunction::underline_equiv(ground, p.clone())
        }
        ExclusionDef::Table { entries, default } => {
            let mut map = BTreeMap::new();
            for &(z, v) in entries {
                if map.insert(z, v).is_some() {
                    return Err(format!("duplicate entry for {}", ground.format_set(z)));
                }
            }
            for z in ground.all_subsets() {
                if map.contains_key(&z) {
                    continue;
                }
                let v = match default {
                    Some(TableDefault::Identity) => SetValue::Finite(z),
                    Some(TableDefault::Empty) => SetValue::EMPTY,
                    Some(TableDefault::Top) => SetValue::Top,
                    None if z.len() > ground.tested_len() => continue,
                    None => return Err(format!("table has no entry for {}", ground.format_set(z))),
                };
                map.insert(z, v);
            }
            ExclusionFunction::table(ground, map)
        }
    };
    built.map_err(|e| e.to_string())
}

/// The most specific definition reproducing `c`.
pub fn choice_def(c: &ChoiceFunction) -> ChoiceDef {
    match c.rule() {
        ChoiceRule::Responsive { order, quota } => ChoiceDef::Responsive {
            order: Some(order.clone()),
            acceptable: None,
            quota: *quota,
        },
        ChoiceRule::UnionOfOrders(orders) => ChoiceDef::UnionOfOrders {
            orders: orders.iter().map(|o| o.acceptable().collect()).collect(),
        },
        ChoiceRule::Mto1Responsive { order, quota, .. } => ChoiceDef::Mto1Responsive {
            order: Some(order.clone()),
            acceptable: None,
            quota: *quota,
        },
        _ => {
            let table = c.tabulate().expect("ground within table limits");
            ChoiceDef::Table {
                entries: c.ground().all_subsets().into_iter().map(|y| (y, table.get(y))).collect(),
            }
        }
    }
}

/// A full table for `e` over every subset.
pub fn exclusion_table_def(e: &ExclusionFunction) -> ExclusionDef {
    let entries = e
        .ground()
        .all_subsets()
        .into_iter()
        .filter_map(|z| e.eval(z).ok().map(|v| (z, v)))
        .collect();
    ExclusionDef::Table { entries, default: None }
}
