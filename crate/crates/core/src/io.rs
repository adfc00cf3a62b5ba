//! File formats: JSON documents for variables, rule bases, datasets and
//! plans; CSV for datasets and surveys; plain text for fault models.
//!
//! Every loader validates what it reads, so nothing downstream sees an
//! object that breaks its invariants.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::elicitation::{validate_partition, RatingSample, Survey};
use crate::error::{Error, Result};
use crate::eval::FaultModel;
use crate::fuzzy::{FuzzyTerm, LinguisticVariable, MembershipFunction, Shape, Universe};
use crate::inference::{Clause, FuzzyRule, RuleBase};
use crate::tcp::{Dataset, ExecutionPlan, PlanStep, ScheduleMode, StepReason, TestCase};

pub const DATASET_VERSION: u32 = 1;
pub const PLAN_VERSION: u32 = 1;

/// CSV dataset columns, in order.
pub const DATASET_CSV_HEADER: [&str; 6] = [
    "id",
    "name",
    "exec_time",
    "failure_rate",
    "prerequisites",
    "recently_updated",
];

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn from_json<'de, T: Deserialize<'de>>(text: &'de str, path: &Path) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::parse(path, e.to_string()))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents always serialize");
    s.push('\n');
    s
}

// ---------------------------------------------------------------------------
// Linguistic variables

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ShapeTag {
    Triangular,
    Trapezoidal,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    label: String,
    shape: ShapeTag,
    params: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VariableDoc {
    name: String,
    #[serde(default)]
    unit: String,
    universe: [f64; 2],
    terms: Vec<TermDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum VariablesDoc {
    One(VariableDoc),
    Many(Vec<VariableDoc>),
}

impl VariableDoc {
    fn into_variable(self) -> Result<LinguisticVariable> {
        let universe = Universe::new(self.universe[0], self.universe[1])?;
        let terms = self
            .terms
            .into_iter()
            .map(|t| {
                let shape = match t.shape {
                    ShapeTag::Triangular => Shape::Triangular,
                    ShapeTag::Trapezoidal => Shape::Trapezoidal,
                };
                Ok(FuzzyTerm::new(t.label, MembershipFunction::from_params(shape, &t.params)?))
            })
            .collect::<Result<Vec<_>>>()?;
        LinguisticVariable::new(self.name, self.unit, universe, terms)
    }

    fn from_variable(v: &LinguisticVariable) -> Self {
        Self {
            name: v.name().to_string(),
            unit: v.unit().to_string(),
            universe: [v.universe().lo(), v.universe().hi()],
            terms: v
                .terms()
                .iter()
                .map(|t| TermDoc {
                    label: t.label.clone(),
                    shape: match t.mf.shape() {
                        Shape::Triangular => ShapeTag::Triangular,
                        Shape::Trapezoidal => ShapeTag::Trapezoidal,
                    },
                    params: t.mf.params(),
                })
                .collect(),
        }
    }
}

/// Parses one variable document or an array of them. Only structural
/// invariants are checked; see [`parse_variables`] for the validating form.
pub fn parse_variables_unchecked(text: &str, path: &Path) -> Result<Vec<LinguisticVariable>> {
    let docs = match from_json::<VariablesDoc>(text, path) {
        Ok(VariablesDoc::One(doc)) => vec![doc],
        Ok(VariablesDoc::Many(docs)) => docs,
        // The untagged error hides the position; retry each shape for it.
        Err(_) => match text.trim_start().starts_with('[') {
            true => from_json::<Vec<VariableDoc>>(text, path)?,
            false => vec![from_json::<VariableDoc>(text, path)?],
        },
    };
    docs.into_iter()
        .map(|d| d.into_variable().map_err(|e| Error::parse(path, e.to_string())))
        .collect()
}

/// Parses variables and rejects any partition with validation findings.
pub fn parse_variables(text: &str, path: &Path) -> Result<Vec<LinguisticVariable>> {
    let variables = parse_variables_unchecked(text, path)?;
    for v in &variables {
        let findings = validate_partition(v);
        if !findings.is_empty() {
            let list = findings.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("; ");
            return Err(Error::parse(path, format!("variable `{}`: {list}", v.name())));
        }
    }
    Ok(variables)
}

pub fn load_variables(path: &Path) -> Result<Vec<LinguisticVariable>> {
    parse_variables(&read(path)?, path)
}

pub fn load_variables_unchecked(path: &Path) -> Result<Vec<LinguisticVariable>> {
    parse_variables_unchecked(&read(path)?, path)
}

pub fn variable_to_json(variable: &LinguisticVariable) -> String {
    to_json(&VariableDoc::from_variable(variable))
}

pub fn variables_to_json(variables: &[LinguisticVariable]) -> String {
    let docs: Vec<_> = variables.iter().map(VariableDoc::from_variable).collect();
    to_json(&docs)
}

// ---------------------------------------------------------------------------
// Rule base

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClauseDoc {
    var: String,
    term: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<usize>,
    #[serde(rename = "if")]
    antecedents: Vec<ClauseDoc>,
    #[serde(rename = "then")]
    consequent: ClauseDoc,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleBaseDoc {
    rules: Vec<RuleDoc>,
}

/// Rules without an explicit `id` are numbered by position, from 1.
pub fn parse_rules(text: &str, path: &Path) -> Result<RuleBase> {
    let doc: RuleBaseDoc = from_json(text, path)?;
    let rules = doc
        .rules
        .into_iter()
        .enumerate()
        .map(|(i, r)| FuzzyRule {
            id: r.id.unwrap_or(i + 1),
            antecedents: r
                .antecedents
                .into_iter()
                .map(|c| Clause::new(c.var, c.term))
                .collect(),
            consequent: Clause::new(r.consequent.var, r.consequent.term),
        })
        .collect();
    RuleBase::new(rules).map_err(|e| Error::parse(path, e.to_string()))
}

pub fn load_rules(path: &Path) -> Result<RuleBase> {
    parse_rules(&read(path)?, path)
}

pub fn rules_to_json(rules: &RuleBase) -> String {
    let clause = |c: &Clause| ClauseDoc {
        var: c.var.clone(),
        term: c.term.clone(),
    };
    to_json(&RuleBaseDoc {
        rules: rules
            .rules()
            .iter()
            .map(|r| RuleDoc {
                id: Some(r.id),
                antecedents: r.antecedents.iter().map(clause).collect(),
                consequent: clause(&r.consequent),
            })
            .collect(),
    })
}

// ---------------------------------------------------------------------------
// Datasets

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TestDoc {
    id: u32,
    name: String,
    exec_time: f64,
    failure_rate: f64,
    #[serde(default)]
    prerequisites: Vec<Vec<u32>>,
    #[serde(default)]
    recently_updated: bool,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatasetDoc {
    version: u32,
    tests: Vec<TestDoc>,
}

pub fn parse_dataset(text: &str, path: &Path) -> Result<Dataset> {
    let doc: DatasetDoc = from_json(text, path)?;
    if doc.version != DATASET_VERSION {
        return Err(Error::parse(path, format!("unsupported dataset version {}", doc.version)));
    }
    Dataset::new(
        doc.tests
            .into_iter()
            .map(|t| TestCase {
                id: t.id,
                name: t.name,
                exec_time: t.exec_time,
                failure_rate: t.failure_rate,
                prerequisites: t.prerequisites,
                recently_updated: t.recently_updated,
            })
            .collect(),
    )
}

pub fn load_dataset(path: &Path) -> Result<Dataset> {
    parse_dataset(&read(path)?, path)
}

pub fn dataset_to_json(dataset: &Dataset) -> String {
    to_json(&DatasetDoc {
        version: DATASET_VERSION,
        tests: dataset
            .tests()
            .iter()
            .map(|t| TestDoc {
                id: t.id,
                name: t.name.clone(),
                exec_time: t.exec_time,
                failure_rate: t.failure_rate,
                prerequisites: t.prerequisites.clone(),
                recently_updated: t.recently_updated,
            })
            .collect(),
    })
}

/// Drops blanks between a delimiter and an opening quote so that rows typed
/// as `12, Cart Update, 20, 11, "10, 11", false` parse as quoted fields.
fn tidy_csv(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut quoted = false;
    let mut pending = String::new();
    let mut after_delim = false;
    for ch in text.chars() {
        match ch {
            '"' => {
                if !(after_delim && !quoted) {
                    out.push_str(&pending);
                }
                pending.clear();
                quoted = !quoted;
                after_delim = false;
                out.push(ch);
            }
            ' ' | '\t' if after_delim && !quoted => pending.push(ch),
            _ => {
                out.push_str(&pending);
                pending.clear();
                after_delim = !quoted && ch == ',';
                out.push(ch);
            }
        }
    }
    out.push_str(&pending);
    out
}

/// `1 / 2` is one OR-group, `10, 11` two AND-ed groups, empty means none.
pub fn parse_prerequisites(cell: &str) -> std::result::Result<Vec<Vec<u32>>, String> {
    let cell = cell.trim();
    if cell.is_empty() {
        return Ok(Vec::new());
    }
    cell.split(',')
        .map(|group| {
            group
                .split('/')
                .map(|id| {
                    let id = id.trim();
                    id.parse::<u32>()
                        .map_err(|_| format!("bad prerequisite id `{id}`"))
                })
                .collect()
        })
        .collect()
}

pub fn format_prerequisites(groups: &[Vec<u32>]) -> String {
    groups
        .iter()
        .map(|g| g.iter().map(u32::to_string).collect::<Vec<_>>().join(" / "))
        .collect::<Vec<_>>()
        .join(", ")
}

fn parse_bool(cell: &str) -> Option<bool> {
    match cell.trim().to_ascii_lowercase().as_str() {
        "true" => Some(true),
        "false" => Some(false),
        _ => None,
    }
}

pub fn parse_csv_dataset(text: &str, path: &Path) -> Result<Dataset> {
    let tidy = tidy_csv(text);
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(tidy.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| Error::parse(path, e.to_string()))?
        .clone();
    let names: Vec<&str> = header.iter().collect();
    if names != DATASET_CSV_HEADER {
        return Err(Error::parse(
            path,
            format!("header must be `{}`, found `{}`", DATASET_CSV_HEADER.join(","), names.join(",")),
        ));
    }
    let mut tests = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| Error::parse(path, format!("row {row}: {e}")))?;
        let bad = |column: &str, value: &str| Error::parse(path, format!("row {row}: bad {column} `{value}`"));
        let field = |k: usize| record.get(k).unwrap_or("");
        let number = |k: usize| -> Result<f64> {
            field(k)
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| bad(DATASET_CSV_HEADER[k], field(k)))
        };
        tests.push(TestCase {
            id: field(0).parse().map_err(|_| bad("id", field(0)))?,
            name: field(1).to_string(),
            exec_time: number(2)?,
            failure_rate: number(3)?,
            prerequisites: parse_prerequisites(field(4))
                .map_err(|m| Error::parse(path, format!("row {row}: {m}")))?,
            recently_updated: parse_bool(field(5)).ok_or_else(|| bad("recently_updated", field(5)))?,
        });
    }
    Dataset::new(tests)
}

pub fn load_csv_dataset(path: &Path) -> Result<Dataset> {
    parse_csv_dataset(&read(path)?, path)
}

/// Picks the CSV or JSON loader from the file extension.
pub fn load_dataset_any(path: &Path) -> Result<Dataset> {
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        load_csv_dataset(path)
    } else {
        load_dataset(path)
    }
}

pub fn dataset_to_csv(dataset: &Dataset) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(DATASET_CSV_HEADER).expect("in-memory write");
    for t in dataset.tests() {
        writer
            .write_record([
                t.id.to_string(),
                t.name.clone(),
                t.exec_time.to_string(),
                t.failure_rate.to_string(),
                format_prerequisites(&t.prerequisites),
                t.recently_updated.to_string(),
            ])
            .expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

// ---------------------------------------------------------------------------
// Surveys

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SurveyRow {
    expert: String,
    value: f64,
    term: String,
}

/// Reads `expert,value,term` rows. Name, unit, universe and term order come
/// from `template`.
pub fn parse_survey_csv(text: &str, path: &Path, template: &LinguisticVariable) -> Result<Survey> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut samples = Vec::new();
    for (i, row) in reader.deserialize::<SurveyRow>().enumerate() {
        let row = row.map_err(|e| Error::parse(path, format!("row {}: {e}", i + 1)))?;
        samples.push(RatingSample {
            expert: row.expert,
            value: row.value,
            term: row.term,
        });
    }
    Ok(Survey {
        variable: template.name().to_string(),
        unit: template.unit().to_string(),
        universe: template.universe(),
        terms: template.terms().iter().map(|t| t.label.clone()).collect(),
        samples,
    })
}

pub fn load_survey_csv(path: &Path, template: &LinguisticVariable) -> Result<Survey> {
    parse_survey_csv(&read(path)?, path, template)
}

// ---------------------------------------------------------------------------
// Fault models

/// Test ids separated by whitespace or commas; `#` starts a comment.
pub fn parse_fault_model(text: &str, path: &Path, dataset: &Dataset) -> Result<FaultModel> {
    let mut ids = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        for token in line.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            let id = token
                .parse::<u32>()
                .map_err(|_| Error::parse(path, format!("line {}: bad test id `{token}`", n + 1)))?;
            ids.push(id);
        }
    }
    FaultModel::new(ids, dataset)
}

pub fn load_fault_model(path: &Path, dataset: &Dataset) -> Result<FaultModel> {
    parse_fault_model(&read(path)?, path, dataset)
}

pub fn fault_model_to_text(faults: &FaultModel) -> String {
    faults.ids().iter().map(|id| format!("{id}\n")).collect()
}

// ---------------------------------------------------------------------------
// Plans

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepDoc {
    id: u32,
    reason: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exec_time: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cumulative_time: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanDoc {
    version: u32,
    mode: String,
    steps: Vec<StepDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    total_time: Option<f64>,
}

/// Plan export with names, per-step and cumulative times.
pub fn plan_to_json(plan: &ExecutionPlan, dataset: &Dataset) -> String {
    let mut elapsed = 0.0;
    let steps = plan
        .steps
        .iter()
        .map(|s| {
            let test = dataset.get(s.id);
            let exec_time = test.map(|t| t.exec_time);
            elapsed += exec_time.unwrap_or(0.0);
            StepDoc {
                id: s.id,
                reason: s.reason.as_str().to_string(),
                name: test.map(|t| t.name.clone()),
                exec_time,
                cumulative_time: Some(elapsed),
            }
        })
        .collect();
    to_json(&PlanDoc {
        version: PLAN_VERSION,
        mode: plan.mode.as_str().to_string(),
        steps,
        total_time: Some(elapsed),
    })
}

pub fn parse_plan(text: &str, path: &Path) -> Result<ExecutionPlan> {
    let doc: PlanDoc = from_json(text, path)?;
    if doc.version != PLAN_VERSION {
        return Err(Error::parse(path, format!("unsupported plan version {}", doc.version)));
    }
    let mode: ScheduleMode = doc.mode.parse().map_err(|m: String| Error::parse(path, m))?;
    let steps = doc
        .steps
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            let reason = match s.reason.as_str() {
                "ranked" => StepReason::Ranked,
                "prerequisite" => StepReason::PrerequisiteInsertion,
                other => {
                    return Err(Error::parse(path, format!("step {}: unknown reason `{other}`", i + 1)))
                }
            };
            Ok(PlanStep { id: s.id, reason })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExecutionPlan { mode, steps })
}

pub fn load_plan(path: &Path) -> Result<ExecutionPlan> {
    parse_plan(&read(path)?, path)
}

/// Plain-text plan listing with cumulative time.
pub fn plan_to_text(plan: &ExecutionPlan, dataset: &Dataset) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    let _ = writeln!(out, "{:>4}  {:>4}  {:<22} {:>8} {:>10}  reason", "step", "id", "name", "time", "cumulative");
    let mut elapsed = 0.0;
    for (i, s) in plan.steps.iter().enumerate() {
        let (name, t) = dataset
            .get(s.id)
            .map(|t| (t.name.as_str(), t.exec_time))
            .unwrap_or(("?", 0.0));
        elapsed += t;
        let _ = writeln!(
            out,
            "{:>4}  {:>4}  {:<22} {:>8} {:>10}  {}",
            i + 1,
            s.id,
            name,
            t,
            elapsed,
            s.reason.as_str()
        );
    }
    let _ = writeln!(out, "mode {}: {} executions, {} seconds", plan.mode, plan.steps.len(), elapsed);
    out
}
