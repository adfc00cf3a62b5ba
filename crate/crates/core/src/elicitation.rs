//! Direct Rating elicitation: experts sort sample values into linguistic
//! categories and each category becomes a triangular or trapezoidal term.
//!
//! Per term, the core spans the 25th to 75th percentile of its ratings. The
//! transition between neighbouring terms is the band where the experts'
//! ratings of the two terms overlap; when they do not overlap, each support
//! reaches the neighbour's core edge instead. The first term is shouldered
//! to the lower bound of the universe and the last term to the upper bound.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::fuzzy::{FuzzyTerm, LinguisticVariable, MembershipFunction, Universe};

#[derive(Clone, Debug, PartialEq)]
pub struct RatingSample {
    pub expert: String,
    pub value: f64,
    pub term: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Survey {
    pub variable: String,
    pub unit: String,
    pub universe: Universe,
    /// Term labels from lowest to highest rank.
    pub terms: Vec<String>,
    pub samples: Vec<RatingSample>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Finding {
    CoverageGap { from: f64, to: f64 },
    OrderViolation { lower: String, upper: String },
    NoOverlap { lower: String, upper: String },
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finding::CoverageGap { from, to } => write!(f, "coverage gap: no term covers [{from}, {to}]"),
            Finding::OrderViolation { lower, upper } => {
                write!(f, "order violation: `{upper}` peaks before `{lower}`")
            }
            Finding::NoOverlap { lower, upper } => {
                write!(f, "no overlap between adjacent terms `{lower}` and `{upper}`")
            }
        }
    }
}

/// Linear interpolation between order statistics of sorted `xs`, with `p`
/// a fraction in `[0, 1]` (values outside are clamped).
///
/// # Panics
///
/// If `xs` is empty.
pub fn percentile(xs: &[f64], p: f64) -> f64 {
    assert!(!xs.is_empty(), "percentile of an empty sample");
    let pos = p.clamp(0.0, 1.0) * (xs.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    match xs.get(i + 1) {
        Some(next) => xs[i] + frac * (next - xs[i]),
        None => xs[i],
    }
}

struct TermStats {
    min: f64,
    q25: f64,
    median: f64,
    q75: f64,
    max: f64,
}

fn term_stats(survey: &Survey) -> Result<Vec<TermStats>> {
    let labels: HashSet<&str> = survey.terms.iter().map(String::as_str).collect();
    if survey.terms.is_empty() {
        return Err(Error::InconsistentSurvey("no terms".into()));
    }
    if labels.len() != survey.terms.len() {
        return Err(Error::InconsistentSurvey("duplicate term labels".into()));
    }
    for s in &survey.samples {
        if !labels.contains(s.term.as_str()) {
            return Err(Error::InconsistentSurvey(format!(
                "expert `{}` chose unknown term `{}`",
                s.expert, s.term
            )));
        }
        if !s.value.is_finite() || !survey.universe.contains(s.value) {
            return Err(Error::InconsistentSurvey(format!(
                "value {} from expert `{}` lies outside the universe",
                s.value, s.expert
            )));
        }
    }
    let mut stats = Vec::with_capacity(survey.terms.len());
    for label in &survey.terms {
        let mut xs: Vec<f64> = survey
            .samples
            .iter()
            .filter(|s| &s.term == label)
            .map(|s| s.value)
            .collect();
        if xs.is_empty() {
            return Err(Error::InconsistentSurvey(format!("term `{label}` has no samples")));
        }
        xs.sort_by(f64::total_cmp);
        stats.push(TermStats {
            min: xs[0],
            q25: percentile(&xs, 0.25),
            median: percentile(&xs, 0.5),
            q75: percentile(&xs, 0.75),
            max: xs[xs.len() - 1],
        });
    }
    for (i, w) in stats.windows(2).enumerate() {
        if w[0].median >= w[1].median {
            return Err(Error::InconsistentSurvey(format!(
                "median of `{}` ({}) is not below median of `{}` ({})",
                survey.terms[i],
                w[0].median,
                survey.terms[i + 1],
                w[1].median
            )));
        }
    }
    Ok(stats)
}

/// Fits one term per category and returns the resulting partition, which
/// always passes [`validate_partition`].
pub fn build_partition(survey: &Survey) -> Result<LinguisticVariable> {
    let stats = term_stats(survey)?;
    let (lo, hi) = (survey.universe.lo(), survey.universe.hi());
    let n = stats.len();

    let mut knots: Vec<[f64; 4]> = stats.iter().map(|s| [s.min, s.q25, s.q75, s.max]).collect();
    knots[0][0] = lo;
    knots[0][1] = lo;
    knots[n - 1][2] = hi;
    knots[n - 1][3] = hi;
    for k in 0..n - 1 {
        let (left, right) = (&stats[k], &stats[k + 1]);
        let (d, a) = if left.max > right.min {
            (left.max, right.min)
        } else {
            (knots[k + 1][1], knots[k][2])
        };
        knots[k][3] = d.max(knots[k][2]);
        knots[k + 1][0] = a.min(knots[k + 1][1]);
    }

    let step = survey.universe.width() / 200.0;
    for _ in 0..=200 {
        let variable = assemble(survey, &knots)?;
        let findings = validate_partition(&variable);
        if findings.is_empty() {
            return Ok(variable);
        }
        if findings.iter().any(|f| matches!(f, Finding::OrderViolation { .. })) {
            return Err(Error::InconsistentSurvey(findings[0].to_string()));
        }
        for k in &mut knots {
            k[0] = (k[0] - step).max(lo);
            k[3] = (k[3] + step).min(hi);
        }
    }
    Err(Error::InconsistentSurvey("could not reach full coverage".into()))
}

fn assemble(survey: &Survey, knots: &[[f64; 4]]) -> Result<LinguisticVariable> {
    let terms = survey
        .terms
        .iter()
        .zip(knots)
        .map(|(label, &[a, b, c, d])| {
            let mf = if b == c {
                MembershipFunction::triangular(a, b, d)?
            } else {
                MembershipFunction::trapezoidal(a, b, c, d)?
            };
            Ok(FuzzyTerm::new(label.clone(), mf))
        })
        .collect::<Result<Vec<_>>>()?;
    LinguisticVariable::new(survey.variable.clone(), survey.unit.clone(), survey.universe, terms)
}

/// Checks coverage of the universe, rank order of term peaks and overlap
/// of adjacent terms. An empty list means the partition is sound.
///
/// Memberships are linear between the union of all breakpoints, so testing
/// every breakpoint and the midpoint between consecutive breakpoints is exact.
pub fn validate_partition(variable: &LinguisticVariable) -> Vec<Finding> {
    let mut findings = Vec::new();
    let universe = variable.universe();
    let terms = variable.terms();

    let probes = probe_points(universe, terms.iter());
    let mut gap: Option<(f64, f64)> = None;
    for &x in &probes {
        let covered = terms.iter().any(|t| t.mf.degree(x) > 0.0);
        gap = match (covered, gap) {
            (false, None) => Some((x, x)),
            (false, Some((from, _))) => Some((from, x)),
            (true, Some((from, to))) => {
                findings.push(Finding::CoverageGap { from, to });
                None
            }
            (true, None) => None,
        };
    }
    if let Some((from, to)) = gap {
        findings.push(Finding::CoverageGap { from, to });
    }

    for w in terms.windows(2) {
        if w[1].mf.peak() < w[0].mf.peak() {
            findings.push(Finding::OrderViolation {
                lower: w[0].label.clone(),
                upper: w[1].label.clone(),
            });
        }
    }

    for w in terms.windows(2) {
        let overlaps = probe_points(universe, w.iter())
            .into_iter()
            .any(|x| w[0].mf.degree(x) > 0.0 && w[1].mf.degree(x) > 0.0);
        if !overlaps {
            findings.push(Finding::NoOverlap {
                lower: w[0].label.clone(),
                upper: w[1].label.clone(),
            });
        }
    }
    findings
}

fn probe_points<'a>(universe: Universe, terms: impl Iterator<Item = &'a FuzzyTerm>) -> Vec<f64> {
    let mut xs = vec![universe.lo(), universe.hi()];
    for t in terms {
        xs.extend(t.mf.knots().into_iter().filter(|x| universe.contains(*x)));
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mids: Vec<f64> = xs.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    xs.extend(mids);
    xs.sort_by(f64::total_cmp);
    xs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::defaults;

    fn survey(universe: (f64, f64), ratings: &[(&str, &[f64])]) -> Survey {
        Survey {
            variable: "ExecutionTime".into(),
            unit: "s".into(),
            universe: Universe::new(universe.0, universe.1).unwrap(),
            terms: ratings.iter().map(|(t, _)| t.to_string()).collect(),
            samples: ratings
                .iter()
                .flat_map(|(t, vs)| {
                    vs.iter().enumerate().map(move |(i, &v)| RatingSample {
                        expert: format!("e{}", i % 3),
                        value: v,
                        term: t.to_string(),
                    })
                })
                .collect(),
        }
    }

    #[test]
    fn percentile_interpolates() {
        let xs = [5.0, 8.0, 10.0, 12.0];
        assert_eq!(percentile(&xs, 0.25), 7.25);
        assert_eq!(percentile(&xs, 0.75), 10.5);
        assert_eq!(percentile(&[3.0], 0.75), 3.0);
    }

    #[test]
    fn short_term_is_left_shouldered() {
        let s = survey(
            (0.0, 120.0),
            &[("Short", &[5.0, 8.0, 10.0, 12.0]), ("Medium", &[25.0, 25.0, 25.0])],
        );
        let var = build_partition(&s).unwrap();
        assert_eq!(var.terms()[0].mf.knots(), [0.0, 0.0, 10.5, 25.0]);
        assert_eq!(var.terms()[1].mf.params(), vec![10.5, 25.0, 120.0, 120.0]);
    }

    #[test]
    fn unanimous_ratings_give_peaked_triangles() {
        let s = survey(
            (0.0, 100.0),
            &[("A", &[10.0; 3]), ("B", &[40.0; 3]), ("C", &[60.0; 3]), ("D", &[90.0; 3])],
        );
        let var = build_partition(&s).unwrap();
        for (term, v) in var.terms()[1..3].iter().zip([40.0, 60.0]) {
            assert_eq!(term.mf.shape(), crate::fuzzy::Shape::Triangular);
            assert_eq!(term.mf.core(), (v, v));
        }
        assert!(validate_partition(&var).is_empty());
    }

    #[test]
    fn inconsistent_surveys_rejected() {
        let s = survey((0.0, 100.0), &[("Low", &[50.0]), ("High", &[10.0])]);
        assert!(matches!(build_partition(&s), Err(Error::InconsistentSurvey(_))));
        let mut s = survey((0.0, 100.0), &[("Low", &[5.0]), ("High", &[50.0])]);
        s.terms.push("Extreme".into());
        assert!(matches!(build_partition(&s), Err(Error::InconsistentSurvey(m)) if m.contains("no samples")));
        let s = survey((0.0, 100.0), &[("Low", &[5.0]), ("High", &[150.0])]);
        assert!(build_partition(&s).is_err());
    }

    #[test]
    fn default_partitions_are_clean() {
        let engine = defaults::engine();
        for v in engine.inputs().iter().chain(std::iter::once(engine.output())) {
            assert!(validate_partition(v).is_empty(), "{}", v.name());
        }
    }

    fn var(terms: &[(&str, [f64; 3])]) -> LinguisticVariable {
        LinguisticVariable::new(
            "v",
            "",
            Universe::new(0.0, 50.0).unwrap(),
            terms
                .iter()
                .map(|(l, [a, b, c])| FuzzyTerm::new(*l, MembershipFunction::triangular(*a, *b, *c).unwrap()))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn gap_is_reported() {
        let v = var(&[("Lo", [0.0, 0.0, 20.0]), ("Hi", [25.0, 50.0, 50.0])]);
        let findings = validate_partition(&v);
        assert!(findings.iter().any(|f| matches!(f, Finding::CoverageGap { from, to } if *from == 20.0 && *to == 25.0)));
        assert!(findings.iter().any(|f| f.to_string().contains("coverage gap")));
        assert!(findings.iter().any(|f| matches!(f, Finding::NoOverlap { .. })));
    }

    #[test]
    fn order_violation_is_reported() {
        let v = var(&[("Lo", [0.0, 40.0, 50.0]), ("Hi", [0.0, 0.0, 45.0])]);
        let findings = validate_partition(&v);
        assert!(findings.iter().any(|f| f.to_string().contains("order violation")));
    }

    #[test]
    fn touching_supports_leave_a_point_gap() {
        let v = var(&[("Lo", [0.0, 0.0, 25.0]), ("Hi", [25.0, 50.0, 50.0])]);
        let findings = validate_partition(&v);
        assert!(findings.contains(&Finding::CoverageGap { from: 25.0, to: 25.0 }));
    }
}
