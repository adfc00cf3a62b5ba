//! Test case prioritization: fuzzy scoring of each test from its execution
//! time and failure rate, one-level promotion of recently updated tests, and
//! a prerequisite-respecting execution plan.

use std::cmp::Reverse;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fuzzy::{centroid, LinguisticVariable};
use crate::inference::Engine;

pub const EXECUTION_TIME: &str = "ExecutionTime";
pub const FAILURE_RATE: &str = "FailureRate";

/// Scores closer than this are ranked as equal.
pub const SCORE_QUANTUM: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct TestCase {
    pub id: u32,
    pub name: String,
    /// Seconds.
    pub exec_time: f64,
    /// Percent, 0 to 100.
    pub failure_rate: f64,
    /// AND across groups, OR within a group.
    pub prerequisites: Vec<Vec<u32>>,
    pub recently_updated: bool,
}

/// A validated, non-empty set of test cases whose prerequisites resolve
/// without cycles.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    tests: Vec<TestCase>,
    index: HashMap<u32, usize>,
}

impl Dataset {
    pub fn new(tests: Vec<TestCase>) -> Result<Self> {
        if tests.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut index = HashMap::with_capacity(tests.len());
        for (i, t) in tests.iter().enumerate() {
            if t.id == 0 {
                return Err(invalid(t.id, "id must be positive"));
            }
            if index.insert(t.id, i).is_some() {
                return Err(Error::DuplicateTestId(t.id));
            }
            if !(t.exec_time.is_finite() && t.exec_time >= 0.0) {
                return Err(invalid(t.id, format!("execution time {} is not a nonnegative number", t.exec_time)));
            }
            if !(0.0..=100.0).contains(&t.failure_rate) {
                return Err(invalid(t.id, format!("failure rate {} is outside [0, 100]", t.failure_rate)));
            }
        }
        for t in &tests {
            for group in &t.prerequisites {
                if group.is_empty() {
                    return Err(invalid(t.id, "empty prerequisite group"));
                }
                for p in group {
                    if *p == t.id {
                        return Err(invalid(t.id, "lists itself as a prerequisite"));
                    }
                    if !index.contains_key(p) {
                        return Err(invalid(t.id, format!("unknown prerequisite {p}")));
                    }
                }
            }
        }
        let dataset = Self { tests, index };
        dataset.resolution_levels()?;
        Ok(dataset)
    }

    pub fn tests(&self) -> &[TestCase] {
        &self.tests
    }

    pub fn len(&self) -> usize {
        self.tests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tests.is_empty()
    }

    pub fn get(&self, id: u32) -> Option<&TestCase> {
        self.index.get(&id).map(|&i| &self.tests[i])
    }

    pub fn ids(&self) -> Vec<u32> {
        self.tests.iter().map(|t| t.id).collect()
    }

    /// Every test reachable through prerequisite edges from `id` (all
    /// members of every OR-group), excluding `id` itself.
    pub fn prerequisite_closure(&self, id: u32) -> BTreeSet<u32> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![id];
        while let Some(cur) = stack.pop() {
            if let Some(t) = self.get(cur) {
                for p in t.prerequisites.iter().flatten() {
                    if *p != id && seen.insert(*p) {
                        stack.push(*p);
                    }
                }
            }
        }
        seen
    }

    /// Round in which each test becomes runnable when tests are admitted
    /// only once every prerequisite group has an admitted member. A test
    /// never admitted sits on or behind a cycle.
    fn resolution_levels(&self) -> Result<HashMap<u32, usize>> {
        let mut level: HashMap<u32, usize> = HashMap::with_capacity(self.tests.len());
        let mut round = 0;
        loop {
            let ready: Vec<u32> = self
                .tests
                .iter()
                .filter(|t| !level.contains_key(&t.id))
                .filter(|t| {
                    t.prerequisites
                        .iter()
                        .all(|g| g.iter().any(|p| level.contains_key(p)))
                })
                .map(|t| t.id)
                .collect();
            if ready.is_empty() {
                break;
            }
            for id in ready {
                level.insert(id, round);
            }
            round += 1;
        }
        if level.len() == self.tests.len() {
            return Ok(level);
        }

        // Each stuck test has a group made only of stuck tests; walking
        // those edges must revisit a test.
        let stuck = |id: &u32| !level.contains_key(id);
        let start = self.ids().into_iter().filter(stuck).min().expect("some test is stuck");
        let mut path = vec![start];
        loop {
            let cur = *path.last().unwrap();
            let next = self
                .get(cur)
                .unwrap()
                .prerequisites
                .iter()
                .find(|g| g.iter().all(stuck))
                .and_then(|g| g.iter().copied().min())
                .expect("stuck test has a stuck group");
            if let Some(pos) = path.iter().position(|&p| p == next) {
                let mut cycle = path[pos..].to_vec();
                cycle.push(next);
                return Err(Error::PrerequisiteCycle(cycle));
            }
            path.push(next);
        }
    }
}

fn invalid(id: u32, reason: impl Into<String>) -> Error {
    Error::InvalidTest {
        id,
        reason: reason.into(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PrioritizedTest {
    pub id: u32,
    /// Crisp inference output.
    pub raw_score: f64,
    /// Output term with the largest membership at `raw_score`.
    pub level: String,
    pub promoted: bool,
    pub final_level: String,
    pub final_score: f64,
}

/// Scores one test case with the engine and applies promotion.
pub fn score(test: &TestCase, engine: &Engine) -> Result<PrioritizedTest> {
    let raw_score = engine.evaluate(&[
        (EXECUTION_TIME, test.exec_time),
        (FAILURE_RATE, test.failure_rate),
    ])?;
    let output = engine.output();
    let level = output.dominant_term(raw_score).label.clone();
    let (final_score, final_level) = promote(
        output,
        raw_score,
        &level,
        test.recently_updated,
        engine.resolution(),
    )?;
    Ok(PrioritizedTest {
        id: test.id,
        raw_score,
        level,
        promoted: test.recently_updated,
        final_level,
        final_score,
    })
}

/// Raises an updated test to the next output term: the score becomes at
/// least that term's centroid. The top term saturates.
pub fn promote(
    output: &LinguisticVariable,
    raw_score: f64,
    level: &str,
    updated: bool,
    resolution: usize,
) -> Result<(f64, String)> {
    let rank = output.rank_of(level).ok_or_else(|| Error::UnknownTerm {
        var: output.name().to_string(),
        term: level.to_string(),
    })?;
    if !updated {
        return Ok((raw_score, level.to_string()));
    }
    match output.terms().get(rank + 1) {
        None => Ok((raw_score, level.to_string())),
        Some(next) => {
            let curve = output.curve(&next.label).expect("term exists");
            let target = centroid(&curve, resolution)?;
            Ok((raw_score.max(target), next.label.clone()))
        }
    }
}

fn quantize(score: f64) -> i64 {
    (score / SCORE_QUANTUM).round() as i64
}

/// Scores every test and sorts by final score (descending), then raw score
/// (descending), then promoted before unpromoted, then id (ascending).
pub fn prioritize(tests: &[TestCase], engine: &Engine) -> Result<Vec<PrioritizedTest>> {
    if tests.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut seen = HashSet::new();
    for t in tests {
        if !seen.insert(t.id) {
            return Err(Error::DuplicateTestId(t.id));
        }
    }
    let mut ranked = tests
        .iter()
        .map(|t| score(t, engine))
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by_key(|p| {
        (
            Reverse(quantize(p.final_score)),
            Reverse(quantize(p.raw_score)),
            !p.promoted,
            p.id,
        )
    });
    Ok(ranked)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum ScheduleMode {
    /// An executed prerequisite stays satisfied for the rest of the run.
    #[default]
    RunOnce,
    /// A prerequisite is satisfied only if nothing outside the dependent's
    /// prerequisite closure ran since; otherwise the chain is re-run.
    FreshChain,
}

impl ScheduleMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ScheduleMode::RunOnce => "run-once",
            ScheduleMode::FreshChain => "fresh-chain",
        }
    }
}

impl fmt::Display for ScheduleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScheduleMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "run-once" => Ok(ScheduleMode::RunOnce),
            "fresh-chain" => Ok(ScheduleMode::FreshChain),
            other => Err(format!("unknown mode `{other}` (expected run-once or fresh-chain)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StepReason {
    Ranked,
    PrerequisiteInsertion,
}

impl StepReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StepReason::Ranked => "ranked",
            StepReason::PrerequisiteInsertion => "prerequisite",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlanStep {
    pub id: u32,
    pub reason: StepReason,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExecutionPlan {
    pub mode: ScheduleMode,
    pub steps: Vec<PlanStep>,
}

impl ExecutionPlan {
    pub fn ids(&self) -> Vec<u32> {
        self.steps.iter().map(|s| s.id).collect()
    }
}

/// Builds an execution plan from a ranking. Within an OR-group an already
/// executed member is preferred, then the member with the highest final
/// score.
pub fn schedule(ranked: &[PrioritizedTest], dataset: &Dataset, mode: ScheduleMode) -> Result<ExecutionPlan> {
    let order: Vec<u32> = ranked.iter().map(|p| p.id).collect();
    let preference: HashMap<u32, f64> = ranked.iter().map(|p| (p.id, p.final_score)).collect();
    schedule_order(&order, dataset, mode, &preference)
}

/// Schedules an arbitrary order of test ids (for example the dataset's own
/// order as an unsorted baseline). OR-groups prefer the member that appears
/// earliest in `order`.
pub fn schedule_in_order(order: &[u32], dataset: &Dataset, mode: ScheduleMode) -> Result<ExecutionPlan> {
    let n = order.len() as f64;
    let preference: HashMap<u32, f64> = order
        .iter()
        .enumerate()
        .map(|(i, &id)| (id, n - i as f64))
        .collect();
    schedule_order(order, dataset, mode, &preference)
}

fn schedule_order(
    order: &[u32],
    dataset: &Dataset,
    mode: ScheduleMode,
    preference: &HashMap<u32, f64>,
) -> Result<ExecutionPlan> {
    let mut seen = HashSet::new();
    for id in order {
        if dataset.get(*id).is_none() {
            return Err(Error::InvalidPlan(format!("ranked id {id} is not in the dataset")));
        }
        if !seen.insert(*id) {
            return Err(Error::InvalidPlan(format!("ranked id {id} appears twice")));
        }
    }
    if seen.len() != dataset.len() {
        return Err(Error::InvalidPlan("ranking does not cover the whole dataset".into()));
    }

    let mut scheduler = Scheduler {
        dataset,
        mode,
        levels: dataset.resolution_levels()?,
        closures: HashMap::new(),
        preference,
        steps: Vec::with_capacity(dataset.len()),
        last_run: HashMap::new(),
    };
    for &id in order {
        if !scheduler.last_run.contains_key(&id) {
            scheduler.ensure(id, StepReason::Ranked, &mut Vec::new())?;
        }
    }
    Ok(ExecutionPlan {
        mode,
        steps: scheduler.steps,
    })
}

struct Scheduler<'a> {
    dataset: &'a Dataset,
    mode: ScheduleMode,
    levels: HashMap<u32, usize>,
    closures: HashMap<u32, BTreeSet<u32>>,
    preference: &'a HashMap<u32, f64>,
    steps: Vec<PlanStep>,
    last_run: HashMap<u32, usize>,
}

impl Scheduler<'_> {
    fn closure(&mut self, id: u32) -> &BTreeSet<u32> {
        let dataset = self.dataset;
        self.closures
            .entry(id)
            .or_insert_with(|| dataset.prerequisite_closure(id))
    }

    fn satisfied(&mut self, member: u32, dependent: u32) -> bool {
        let Some(&at) = self.last_run.get(&member) else {
            return false;
        };
        match self.mode {
            ScheduleMode::RunOnce => true,
            ScheduleMode::FreshChain => {
                let later: Vec<u32> = self.steps[at + 1..].iter().map(|s| s.id).collect();
                let closure = self.closure(dependent);
                later.iter().all(|id| closure.contains(id))
            }
        }
    }

    fn ensure(&mut self, id: u32, reason: StepReason, stack: &mut Vec<u32>) -> Result<()> {
        if let Some(pos) = stack.iter().position(|&s| s == id) {
            let mut cycle = stack[pos..].to_vec();
            cycle.push(id);
            return Err(Error::PrerequisiteCycle(cycle));
        }
        stack.push(id);
        let test = self.dataset.get(id).expect("id validated");
        let level = self.levels[&id];
        for group in &test.prerequisites {
            if group.iter().any(|&m| self.satisfied(m, id)) {
                continue;
            }
            let choice = group
                .iter()
                .copied()
                .filter(|m| self.levels[m] < level)
                .max_by(|a, b| {
                    let ran = |m: &u32| self.last_run.contains_key(m);
                    let pref = |m: &u32| self.preference.get(m).copied().unwrap_or(f64::NEG_INFINITY);
                    ran(a)
                        .cmp(&ran(b))
                        .then(quantize(pref(a)).cmp(&quantize(pref(b))))
                        .then(b.cmp(a))
                })
                .expect("every group has a member resolvable before the test");
            self.ensure(choice, StepReason::PrerequisiteInsertion, stack)?;
        }
        self.last_run.insert(id, self.steps.len());
        self.steps.push(PlanStep { id, reason });
        stack.pop();
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanStats {
    pub executed: usize,
    pub total_time: f64,
}

pub fn plan_stats(plan: &ExecutionPlan, dataset: &Dataset) -> PlanStats {
    PlanStats {
        executed: plan.steps.len(),
        total_time: plan
            .steps
            .iter()
            .filter_map(|s| dataset.get(s.id))
            .map(|t| t.exec_time)
            .sum(),
    }
}

/// Replays a plan and checks every prerequisite group under the plan's
/// mode, plus completeness (and uniqueness for run-once plans).
pub fn verify_plan(plan: &ExecutionPlan, dataset: &Dataset) -> Result<()> {
    let mut last_run: HashMap<u32, usize> = HashMap::new();
    for (i, step) in plan.steps.iter().enumerate() {
        let test = dataset
            .get(step.id)
            .ok_or_else(|| Error::InvalidPlan(format!("step {} runs unknown test {}", i + 1, step.id)))?;
        if plan.mode == ScheduleMode::RunOnce && last_run.contains_key(&step.id) {
            return Err(Error::InvalidPlan(format!("test {} runs twice", step.id)));
        }
        let closure = match plan.mode {
            ScheduleMode::RunOnce => BTreeSet::new(),
            ScheduleMode::FreshChain => dataset.prerequisite_closure(step.id),
        };
        for group in &test.prerequisites {
            let ok = group.iter().any(|m| match last_run.get(m) {
                None => false,
                Some(&at) => match plan.mode {
                    ScheduleMode::RunOnce => true,
                    ScheduleMode::FreshChain => {
                        plan.steps[at + 1..i].iter().all(|s| closure.contains(&s.id))
                    }
                },
            });
            if !ok {
                return Err(Error::InvalidPlan(format!(
                    "step {} (test {}) runs before prerequisite group {group:?} is satisfied",
                    i + 1,
                    step.id
                )));
            }
        }
        last_run.insert(step.id, i);
    }
    if let Some(missing) = dataset.ids().into_iter().find(|id| !last_run.contains_key(id)) {
        return Err(Error::InvalidPlan(format!("test {missing} never runs")));
    }
    Ok(())
}
