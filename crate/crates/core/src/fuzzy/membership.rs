use std::fmt;

use crate::error::{Error, Result};

/// Shape tag of a piecewise-linear membership function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Shape {
    Triangular,
    Trapezoidal,
}

impl Shape {
    pub fn as_str(self) -> &'static str {
        match self {
            Shape::Triangular => "triangular",
            Shape::Trapezoidal => "trapezoidal",
        }
    }
}

/// Triangular `(a, b, c)` or trapezoidal `(a, b, c, d)` membership function.
///
/// Internally every shape is held as a trapezoid `a <= b <= c <= d`; a
/// triangle has a single-point core `b == c`. Equal neighbouring parameters
/// are allowed and produce vertical edges (shoulders), which keeps the
/// function upper semicontinuous so every alpha-cut is a closed interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MembershipFunction {
    shape: Shape,
    knots: [f64; 4],
}

impl MembershipFunction {
    pub fn triangular(a: f64, b: f64, c: f64) -> Result<Self> {
        check_knots(Shape::Triangular, &[a, b, c])?;
        Ok(Self {
            shape: Shape::Triangular,
            knots: [a, b, b, c],
        })
    }

    pub fn trapezoidal(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        check_knots(Shape::Trapezoidal, &[a, b, c, d])?;
        Ok(Self {
            shape: Shape::Trapezoidal,
            knots: [a, b, c, d],
        })
    }

    /// Builds a function from a shape tag and its parameter array.
    pub fn from_params(shape: Shape, params: &[f64]) -> Result<Self> {
        match (shape, params) {
            (Shape::Triangular, &[a, b, c]) => Self::triangular(a, b, c),
            (Shape::Trapezoidal, &[a, b, c, d]) => Self::trapezoidal(a, b, c, d),
            _ => Err(Error::InvalidShape {
                shape: shape.as_str(),
                params: params.to_vec(),
                reason: "wrong number of parameters",
            }),
        }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    /// Parameters in the form they were declared (3 for triangles, 4 for trapezoids).
    pub fn params(&self) -> Vec<f64> {
        let [a, b, c, d] = self.knots;
        match self.shape {
            Shape::Triangular => vec![a, b, d],
            Shape::Trapezoidal => vec![a, b, c, d],
        }
    }

    /// `[a, b, c, d]` with `b == c` for triangles.
    pub fn knots(&self) -> [f64; 4] {
        self.knots
    }

    /// Closed support `[a, d]`.
    pub fn support(&self) -> (f64, f64) {
        (self.knots[0], self.knots[3])
    }

    /// Closed core `[b, c]`, where membership is exactly one.
    pub fn core(&self) -> (f64, f64) {
        (self.knots[1], self.knots[2])
    }

    /// Midpoint of the core.
    pub fn peak(&self) -> f64 {
        0.5 * (self.knots[1] + self.knots[2])
    }

    /// Degree of membership of `x`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::InvalidInput(x));
        }
        Ok(self.degree(x))
    }

    /// Unchecked evaluation; callers guarantee `x` is finite.
    pub(crate) fn degree(&self, x: f64) -> f64 {
        let [a, b, c, d] = self.knots;
        if x < a || x > d {
            0.0
        } else if x >= b && x <= c {
            1.0
        } else if x < b {
            ((x - a) / (b - a)).clamp(0.0, 1.0)
        } else {
            ((d - x) / (d - c)).clamp(0.0, 1.0)
        }
    }

    /// `{x : mu(x) >= alpha}` in closed form.
    pub fn alpha_cut(&self, alpha: f64) -> Result<AlphaCut> {
        check_alpha(alpha)?;
        let [a, b, c, d] = self.knots;
        let lo = if a == b { a } else { a + alpha * (b - a) };
        let hi = if c == d { d } else { d - alpha * (d - c) };
        Ok(AlphaCut::from_sorted(vec![Interval::new(lo, hi)]))
    }
}

impl fmt::Display for MembershipFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params = self
            .params()
            .iter()
            .map(|p| format!("{p}"))
            .collect::<Vec<_>>()
            .join(", ");
        let name = match self.shape {
            Shape::Triangular => "Triangular",
            Shape::Trapezoidal => "Trapezoidal",
        };
        write!(f, "{name}({params})")
    }
}

fn check_knots(shape: Shape, params: &[f64]) -> Result<()> {
    let fail = |reason| Error::InvalidShape {
        shape: shape.as_str(),
        params: params.to_vec(),
        reason,
    };
    if params.iter().any(|p| !p.is_finite()) {
        return Err(fail("parameters must be finite"));
    }
    if params.windows(2).any(|w| w[0] > w[1]) {
        return Err(fail("parameters must be nondecreasing"));
    }
    Ok(())
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::AlphaOutOfRange(alpha))
    }
}

/// Closed real interval `[lo, hi]`, possibly a single point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "interval [{lo}, {hi}] is reversed");
        Self { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// A crisp set given as sorted, pairwise-disjoint closed intervals.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AlphaCut {
    intervals: Vec<Interval>,
}

impl AlphaCut {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Normalizes arbitrary closed intervals: sorts them and merges any that
    /// overlap or touch.
    pub fn from_intervals(mut intervals: Vec<Interval>) -> Self {
        intervals.sort_by(|x, y| x.lo.total_cmp(&y.lo).then(x.hi.total_cmp(&y.hi)));
        Self::from_sorted(intervals)
    }

    fn from_sorted(intervals: Vec<Interval>) -> Self {
        let mut merged: Vec<Interval> = Vec::with_capacity(intervals.len());
        for iv in intervals {
            match merged.last_mut() {
                Some(last) if iv.lo <= last.hi => last.hi = last.hi.max(iv.hi),
                _ => merged.push(iv),
            }
        }
        Self { intervals: merged }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|iv| iv.contains(x))
    }

    pub fn union(&self, other: &AlphaCut) -> AlphaCut {
        let mut all = self.intervals.clone();
        all.extend_from_slice(&other.intervals);
        AlphaCut::from_intervals(all)
    }

    pub fn intersection(&self, other: &AlphaCut) -> AlphaCut {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.intervals.len() && j < other.intervals.len() {
            let (x, y) = (self.intervals[i], other.intervals[j]);
            let lo = x.lo.max(y.lo);
            let hi = x.hi.min(y.hi);
            if lo <= hi {
                out.push(Interval::new(lo, hi));
            }
            if x.hi < y.hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        AlphaCut::from_sorted(out)
    }

    /// `self ⊆ other`.
    pub fn is_subset_of(&self, other: &AlphaCut) -> bool {
        self.intervals.iter().all(|iv| {
            other
                .intervals
                .iter()
                .any(|o| o.lo <= iv.lo && iv.hi <= o.hi)
        })
    }

    /// Endpoint-wise comparison with an absolute tolerance.
    pub fn approx_eq(&self, other: &AlphaCut, tol: f64) -> bool {
        self.intervals.len() == other.intervals.len()
            && self
                .intervals
                .iter()
                .zip(&other.intervals)
                .all(|(x, y)| (x.lo - y.lo).abs() <= tol && (x.hi - y.hi).abs() <= tol)
    }
}
