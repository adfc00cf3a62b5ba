//! Simulated execution of a plan against a declared set of faulty tests.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tcp::{Dataset, ExecutionPlan};

/// Tests that fail whenever they run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FaultModel {
    faulty_ids: BTreeSet<u32>,
}

impl FaultModel {
    pub fn new(ids: impl IntoIterator<Item = u32>, dataset: &Dataset) -> Result<Self> {
        let faulty_ids: BTreeSet<u32> = ids.into_iter().collect();
        if let Some(&bad) = faulty_ids.iter().find(|id| dataset.get(**id).is_none()) {
            return Err(Error::UnknownFault(bad));
        }
        Ok(Self { faulty_ids })
    }

    pub fn ids(&self) -> &BTreeSet<u32> {
        &self.faulty_ids
    }

    pub fn len(&self) -> usize {
        self.faulty_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faulty_ids.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub label: String,
    pub executed: usize,
    pub total_time: f64,
    pub failures_found: usize,
    /// Cumulative time when the last fault was found; `total_time` when some
    /// fault was never reached, zero when there are no faults.
    pub time_to_all_failures: f64,
}

/// Walks the plan, counting each faulty test once, on its first run.
pub fn simulate(
    label: impl Into<String>,
    plan: &ExecutionPlan,
    dataset: &Dataset,
    faults: &FaultModel,
) -> Result<EvaluationReport> {
    if let Some(&bad) = faults.ids().iter().find(|id| dataset.get(**id).is_none()) {
        return Err(Error::UnknownFault(bad));
    }
    let mut found = HashSet::new();
    let mut elapsed = 0.0;
    let mut time_to_all = if faults.is_empty() { Some(0.0) } else { None };
    for step in &plan.steps {
        let test = dataset
            .get(step.id)
            .ok_or_else(|| Error::InvalidPlan(format!("plan runs unknown test {}", step.id)))?;
        elapsed += test.exec_time;
        if faults.ids().contains(&step.id) && found.insert(step.id) && found.len() == faults.len() {
            time_to_all = Some(elapsed);
        }
    }
    Ok(EvaluationReport {
        label: label.into(),
        executed: plan.steps.len(),
        total_time: elapsed,
        failures_found: found.len(),
        time_to_all_failures: time_to_all.unwrap_or(elapsed),
    })
}

/// Side-by-side table, one column per report in input order.
pub fn compare(reports: &[EvaluationReport]) -> String {
    type Cell = fn(&EvaluationReport) -> String;
    let rows: [(&str, Cell); 4] = [
        ("Executed tests", |r| r.executed.to_string()),
        ("Spent time (total)", |r| format!("{} sec", trim(r.total_time))),
        ("Failures found", |r| r.failures_found.to_string()),
        ("Time to all failures", |r| format!("{} sec", trim(r.time_to_all_failures))),
    ];
    let label_width = rows.iter().map(|(l, _)| l.len()).max().unwrap_or(0);
    let widths: Vec<usize> = reports
        .iter()
        .map(|r| {
            rows.iter()
                .map(|(_, f)| f(r).len())
                .chain(std::iter::once(r.label.len()))
                .max()
                .unwrap_or(0)
        })
        .collect();

    let mut out = String::new();
    let _ = write!(out, "{:label_width$}", "");
    for (r, w) in reports.iter().zip(&widths) {
        let _ = write!(out, " | {:>w$}", r.label);
    }
    out.push('\n');
    let _ = write!(out, "{}", "-".repeat(label_width));
    for w in &widths {
        let _ = write!(out, "-+-{}", "-".repeat(*w));
    }
    out.push('\n');
    for (name, f) in &rows {
        let _ = write!(out, "{name:label_width$}");
        for (r, w) in reports.iter().zip(&widths) {
            let _ = write!(out, " | {:>w$}", f(r));
        }
        out.push('\n');
    }
    out
}

fn trim(x: f64) -> String {
    if x.fract() == 0.0 {
        format!("{x:.0}")
    } else {
        format!("{x:.2}")
    }
}
