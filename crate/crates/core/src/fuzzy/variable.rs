use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::fuzzy::curve::MembershipCurve;
use crate::fuzzy::membership::MembershipFunction;

/// Closed interval of admissible crisp values, `lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Universe {
    lo: f64,
    hi: f64,
}

impl Universe {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_finite() && hi.is_finite() && lo < hi {
            Ok(Self { lo, hi })
        } else {
            Err(Error::InvalidUniverse { lo, hi })
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FuzzyTerm {
    pub label: String,
    pub mf: MembershipFunction,
}

impl FuzzyTerm {
    pub fn new(label: impl Into<String>, mf: MembershipFunction) -> Self {
        Self {
            label: label.into(),
            mf,
        }
    }
}

/// A named universe carrying an ordered list of labeled fuzzy terms, lowest
/// rank first.
///
/// Construction checks the structural invariants (non-empty unique labels,
/// supports inside the universe). Semantic checks such as coverage and term
/// ordering are reported by [`crate::elicitation::validate_partition`].
#[derive(Clone, Debug, PartialEq)]
pub struct LinguisticVariable {
    name: String,
    unit: String,
    universe: Universe,
    terms: Vec<FuzzyTerm>,
}

impl LinguisticVariable {
    pub fn new(
        name: impl Into<String>,
        unit: impl Into<String>,
        universe: Universe,
        terms: Vec<FuzzyTerm>,
    ) -> Result<Self> {
        let name = name.into();
        let invalid = |reason: String| Error::InvalidVariable {
            name: name.clone(),
            reason,
        };
        if name.trim().is_empty() {
            return Err(invalid("name is empty".into()));
        }
        if terms.is_empty() {
            return Err(invalid("no terms".into()));
        }
        let mut seen = HashSet::new();
        for term in &terms {
            if term.label.trim().is_empty() {
                return Err(invalid("empty term label".into()));
            }
            if !seen.insert(term.label.as_str()) {
                return Err(invalid(format!("duplicate term label `{}`", term.label)));
            }
            let (a, d) = term.mf.support();
            if !universe.contains(a) || !universe.contains(d) {
                return Err(invalid(format!(
                    "term `{}` support [{a}, {d}] leaves the universe [{}, {}]",
                    term.label,
                    universe.lo(),
                    universe.hi()
                )));
            }
        }
        Ok(Self {
            name,
            unit: unit.into(),
            universe,
            terms,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn unit(&self) -> &str {
        &self.unit
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn terms(&self) -> &[FuzzyTerm] {
        &self.terms
    }

    pub fn term(&self, label: &str) -> Option<&FuzzyTerm> {
        self.terms.iter().find(|t| t.label == label)
    }

    /// Rank of a term (0 = lowest).
    pub fn rank_of(&self, label: &str) -> Option<usize> {
        self.terms.iter().position(|t| t.label == label)
    }

    pub fn curve(&self, label: &str) -> Option<MembershipCurve> {
        self.term(label)
            .map(|t| MembershipCurve::from_function(&t.mf, self.universe))
    }

    /// Membership of `x` in every term, in term order. `x` must already lie
    /// in the universe.
    pub(crate) fn degrees(&self, x: f64) -> Vec<(String, f64)> {
        self.terms
            .iter()
            .map(|t| (t.label.clone(), t.mf.degree(x)))
            .collect()
    }

    /// Term with the largest membership at `x`; ties go to the higher rank.
    pub fn dominant_term(&self, x: f64) -> &FuzzyTerm {
        let mut best = &self.terms[0];
        let mut best_degree = best.mf.degree(x);
        for term in &self.terms[1..] {
            let d = term.mf.degree(x);
            if d >= best_degree {
                best = term;
                best_degree = d;
            }
        }
        best
    }
}
