//! Mamdani rule evaluation: fuzzify the crisp inputs, fire each rule at the
//! minimum of its antecedent degrees, clip its consequent at that height,
//! aggregate by pointwise maximum and defuzzify by centroid.

use std::collections::HashSet;
use std::fmt::Write as _;

use log::warn;

use crate::error::{Error, Result};
use crate::fuzzy::{centroid_of_samples, LinguisticVariable};

pub const DEFAULT_RESOLUTION: usize = 1000;

/// `variable is term`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause {
    pub var: String,
    pub term: String,
}

impl Clause {
    pub fn new(var: impl Into<String>, term: impl Into<String>) -> Self {
        Self {
            var: var.into(),
            term: term.into(),
        }
    }
}

/// `IF a1 AND a2 ... THEN consequent`.
#[derive(Clone, Debug, PartialEq)]
pub struct FuzzyRule {
    /// 1-based number used in traces and error messages.
    pub id: usize,
    pub antecedents: Vec<Clause>,
    pub consequent: Clause,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RuleBase {
    rules: Vec<FuzzyRule>,
}

impl RuleBase {
    pub fn new(rules: Vec<FuzzyRule>) -> Result<Self> {
        let mut ids = HashSet::new();
        let mut conditions = HashSet::new();
        for rule in &rules {
            if !ids.insert(rule.id) {
                return Err(Error::InvalidRule {
                    rule: rule.id,
                    reason: "duplicate rule id".into(),
                });
            }
            if rule.antecedents.is_empty() {
                return Err(Error::InvalidRule {
                    rule: rule.id,
                    reason: "no antecedents".into(),
                });
            }
            let mut key = rule.antecedents.clone();
            key.sort();
            key.dedup();
            if !conditions.insert(key) {
                return Err(Error::InvalidRule {
                    rule: rule.id,
                    reason: "antecedents duplicate an earlier rule".into(),
                });
            }
        }
        Ok(Self { rules })
    }

    pub fn rules(&self) -> &[FuzzyRule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn get(&self, id: usize) -> Option<&FuzzyRule> {
        self.rules.iter().find(|r| r.id == id)
    }
}

/// Degrees of one crisp input in every term of its variable.
#[derive(Clone, Debug, PartialEq)]
pub struct Fuzzified {
    pub variable: String,
    /// Value actually used, after clamping to the universe.
    pub input: f64,
    pub clamped: bool,
    pub degrees: Vec<(String, f64)>,
}

impl Fuzzified {
    pub fn degree(&self, term: &str) -> Option<f64> {
        self.degrees
            .iter()
            .find(|(label, _)| label == term)
            .map(|&(_, d)| d)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiredRule {
    pub rule_id: usize,
    pub activation: f64,
    pub consequent: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InferenceTrace {
    pub output_variable: String,
    pub fuzzified: Vec<Fuzzified>,
    /// Rules with nonzero activation, in rule-base order.
    pub fired: Vec<FiredRule>,
    /// Aggregated output membership at the centroid sample points.
    pub aggregate: Vec<(f64, f64)>,
    pub crisp_output: f64,
}

/// Converts a crisp value into per-term degrees. Values outside the universe
/// are clamped onto it.
pub fn fuzzify(variable: &LinguisticVariable, x: f64) -> Result<Fuzzified> {
    if !x.is_finite() {
        return Err(Error::InvalidInput(x));
    }
    let universe = variable.universe();
    let input = universe.clamp(x);
    let clamped = input != x;
    if clamped {
        warn!(
            "{} = {x} lies outside [{}, {}]; clamped to {input}",
            variable.name(),
            universe.lo(),
            universe.hi()
        );
    }
    Ok(Fuzzified {
        variable: variable.name().to_string(),
        input,
        clamped,
        degrees: variable.degrees(input),
    })
}

/// Conjunction of the rule's antecedent degrees (minimum).
pub fn activation(rule: &FuzzyRule, fuzzified: &[Fuzzified]) -> Result<f64> {
    let mut degree = 1.0_f64;
    for clause in &rule.antecedents {
        let d = fuzzified
            .iter()
            .find(|f| f.variable == clause.var)
            .and_then(|f| f.degree(&clause.term))
            .ok_or_else(|| Error::UnknownAntecedent {
                var: clause.var.clone(),
                term: clause.term.clone(),
            })?;
        degree = degree.min(d);
    }
    Ok(degree)
}

/// Input variables, one output variable and the rules linking them.
/// Immutable once built; safe to share across threads.
#[derive(Clone, Debug)]
pub struct Engine {
    inputs: Vec<LinguisticVariable>,
    output: LinguisticVariable,
    rules: RuleBase,
    resolution: usize,
}

impl Engine {
    /// `variables` must contain every variable the rules mention; the
    /// output variable is the one named by the consequents.
    pub fn new(
        variables: Vec<LinguisticVariable>,
        rules: RuleBase,
        resolution: usize,
    ) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::InvalidResolution(resolution));
        }
        let Some(first) = rules.rules().first() else {
            return Err(Error::InvalidRule {
                rule: 0,
                reason: "rule base is empty".into(),
            });
        };
        let output_name = first.consequent.var.clone();
        let find = |name: &str| variables.iter().find(|v| v.name() == name);

        for rule in rules.rules() {
            if rule.consequent.var != output_name {
                return Err(Error::InvalidRule {
                    rule: rule.id,
                    reason: format!(
                        "consequent variable `{}` differs from `{output_name}`",
                        rule.consequent.var
                    ),
                });
            }
            let out = find(&output_name).ok_or_else(|| Error::UnknownVariable(output_name.clone()))?;
            if out.term(&rule.consequent.term).is_none() {
                return Err(Error::UnknownTerm {
                    var: output_name.clone(),
                    term: rule.consequent.term.clone(),
                });
            }
            for clause in &rule.antecedents {
                let known = clause.var != output_name
                    && find(&clause.var).is_some_and(|v| v.term(&clause.term).is_some());
                if !known {
                    return Err(Error::UnknownAntecedent {
                        var: clause.var.clone(),
                        term: clause.term.clone(),
                    });
                }
            }
        }

        let mut output = None;
        let mut inputs = Vec::new();
        for var in variables {
            if var.name() == output_name {
                output = Some(var);
            } else if !inputs.iter().any(|v: &LinguisticVariable| v.name() == var.name()) {
                inputs.push(var);
            } else {
                return Err(Error::InvalidVariable {
                    name: var.name().to_string(),
                    reason: "declared twice".into(),
                });
            }
        }
        let output = output.ok_or(Error::UnknownVariable(output_name))?;
        Ok(Self {
            inputs,
            output,
            rules,
            resolution,
        })
    }

    pub fn inputs(&self) -> &[LinguisticVariable] {
        &self.inputs
    }

    pub fn output(&self) -> &LinguisticVariable {
        &self.output
    }

    pub fn rules(&self) -> &RuleBase {
        &self.rules
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn with_resolution(mut self, resolution: usize) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::InvalidResolution(resolution));
        }
        self.resolution = resolution;
        Ok(self)
    }

    pub fn variable(&self, name: &str) -> Option<&LinguisticVariable> {
        self.inputs
            .iter()
            .chain(std::iter::once(&self.output))
            .find(|v| v.name() == name)
    }

    /// Runs the full pipeline for one set of crisp inputs.
    pub fn infer(&self, inputs: &[(&str, f64)]) -> Result<InferenceTrace> {
        let mut fuzzified = Vec::with_capacity(self.inputs.len());
        for var in &self.inputs {
            let referenced = self
                .rules
                .rules()
                .iter()
                .any(|r| r.antecedents.iter().any(|c| c.var == var.name()));
            match inputs.iter().find(|(name, _)| *name == var.name()) {
                Some(&(_, x)) => fuzzified.push(fuzzify(var, x)?),
                None if referenced => return Err(Error::MissingInput(var.name().to_string())),
                None => {}
            }
        }

        let mut fired = Vec::new();
        for rule in self.rules.rules() {
            let act = activation(rule, &fuzzified)?;
            if act > 0.0 {
                fired.push(FiredRule {
                    rule_id: rule.id,
                    activation: act,
                    consequent: rule.consequent.term.clone(),
                });
            }
        }
        if fired.is_empty() {
            return Err(Error::EmptyAggregate);
        }

        let clipped: Vec<_> = fired
            .iter()
            .map(|f| {
                let term = self.output.term(&f.consequent).expect("checked at construction");
                (term.mf, f.activation)
            })
            .collect();
        let universe = self.output.universe();
        let step = universe.width() / self.resolution as f64;
        let aggregate: Vec<(f64, f64)> = (0..self.resolution)
            .map(|i| {
                let x = universe.lo() + (i as f64 + 0.5) * step;
                let mu = clipped
                    .iter()
                    .map(|(mf, h)| mf.degree(x).min(*h))
                    .fold(0.0, f64::max);
                (x, mu)
            })
            .collect();
        let crisp_output = centroid_of_samples(&aggregate)?;

        Ok(InferenceTrace {
            output_variable: self.output.name().to_string(),
            fuzzified,
            fired,
            aggregate,
            crisp_output,
        })
    }

    /// Crisp output only.
    pub fn evaluate(&self, inputs: &[(&str, f64)]) -> Result<f64> {
        self.infer(inputs).map(|t| t.crisp_output)
    }
}

/// Plain-text walkthrough of an inference.
pub fn explain(trace: &InferenceTrace, rules: &RuleBase) -> String {
    let mut out = String::new();
    out.push_str("Fuzzification\n");
    for f in &trace.fuzzified {
        let note = if f.clamped { " (clamped)" } else { "" };
        let _ = writeln!(out, "  {} = {}{note}", f.variable, fmt_num(f.input));
        for (label, d) in &f.degrees {
            let _ = writeln!(out, "    {label:<10} {}", fmt_num(*d));
        }
    }
    out.push_str("Fired rules\n");
    for f in &trace.fired {
        let condition = rules
            .get(f.rule_id)
            .map(|r| {
                r.antecedents
                    .iter()
                    .map(|c| format!("{} is {}", c.var, c.term))
                    .collect::<Vec<_>>()
                    .join(" AND ")
            })
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "  Rule {:>2}: IF {condition} THEN {} is {}  (activation {}, clip at {})",
            f.rule_id,
            trace.output_variable,
            f.consequent,
            fmt_num(f.activation),
            fmt_num(f.activation)
        );
    }
    let _ = writeln!(
        out,
        "Aggregation: max over {} clipped consequent(s), {} samples",
        trace.fired.len(),
        trace.aggregate.len()
    );
    let _ = writeln!(
        out,
        "Centroid: {} = {:.2}",
        trace.output_variable, trace.crisp_output
    );
    out
}

/// Aggregate samples as two-column CSV with an `x,mu` header.
pub fn plot_csv(trace: &InferenceTrace) -> String {
    let mut out = String::from("x,mu\n");
    for (x, mu) in &trace.aggregate {
        let _ = writeln!(out, "{x},{mu}");
    }
    out
}

fn fmt_num(x: f64) -> String {
    let s = format!("{x:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}
