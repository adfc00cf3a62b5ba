use crate::error::{Error, Result};
use crate::fuzzy::membership::{check_alpha, AlphaCut, Interval, MembershipFunction};
use crate::fuzzy::variable::Universe;

/// Slack for level comparisons on computed crossing points.
const LEVEL_EPS: f64 = 1e-12;

/// Piecewise-linear membership-valued function over a universe.
///
/// Points are sorted by `x`; several points may share an `x`, in which case
/// the first carries the left limit, the last the right limit, and the value
/// at `x` is the largest of them. Outside the first and last point the
/// function is zero.
#[derive(Clone, Debug, PartialEq)]
pub struct MembershipCurve {
    universe: Universe,
    points: Vec<(f64, f64)>,
}

impl MembershipCurve {
    /// The empty fuzzy set (zero everywhere).
    pub fn empty(universe: Universe) -> Self {
        Self {
            universe,
            points: Vec::new(),
        }
    }

    pub fn from_function(mf: &MembershipFunction, universe: Universe) -> Self {
        let [a, b, c, d] = mf.knots();
        let mut curve = Self::empty(universe);
        for p in [(a, 0.0), (b, 1.0), (c, 1.0), (d, 0.0)] {
            curve.push(p);
        }
        curve
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    fn push(&mut self, p: (f64, f64)) {
        if self.points.last() != Some(&p) {
            self.points.push(p);
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::InvalidInput(x));
        }
        Ok(self.value_at(x))
    }

    pub(crate) fn value_at(&self, x: f64) -> f64 {
        let pts = &self.points;
        let Some((first, last)) = pts.first().zip(pts.last()) else {
            return 0.0;
        };
        if x < first.0 || x > last.0 {
            return 0.0;
        }
        let j = pts.partition_point(|p| p.0 < x);
        if pts[j].0 == x {
            pts[j..]
                .iter()
                .take_while(|p| p.0 == x)
                .map(|p| p.1)
                .fold(0.0, f64::max)
        } else {
            lerp(pts[j - 1], pts[j], x)
        }
    }

    fn left_limit(&self, x: f64) -> f64 {
        let pts = &self.points;
        let j = pts.partition_point(|p| p.0 < x);
        if j == 0 || j == pts.len() {
            0.0
        } else if pts[j].0 == x {
            pts[j].1
        } else {
            lerp(pts[j - 1], pts[j], x)
        }
    }

    fn right_limit(&self, x: f64) -> f64 {
        let pts = &self.points;
        let k = pts.partition_point(|p| p.0 <= x);
        if k == 0 || k == pts.len() {
            0.0
        } else if pts[k - 1].0 == x {
            pts[k - 1].1
        } else {
            lerp(pts[k - 1], pts[k], x)
        }
    }

    /// Pointwise maximum.
    pub fn union(&self, other: &MembershipCurve) -> Result<MembershipCurve> {
        self.combine(other, f64::max)
    }

    /// Pointwise minimum.
    pub fn intersection(&self, other: &MembershipCurve) -> Result<MembershipCurve> {
        self.combine(other, f64::min)
    }

    fn combine(&self, other: &MembershipCurve, op: fn(f64, f64) -> f64) -> Result<MembershipCurve> {
        if self.universe != other.universe {
            let (u, v) = (self.universe, other.universe);
            return Err(Error::UniverseMismatch(u.lo(), u.hi(), v.lo(), v.hi()));
        }
        let mut xs: Vec<f64> = self
            .points
            .iter()
            .chain(&other.points)
            .map(|p| p.0)
            .collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();

        let mut out = MembershipCurve::empty(self.universe);
        for (i, &x) in xs.iter().enumerate() {
            let fr = self.right_limit(x);
            let gr = other.right_limit(x);
            out.push((x, op(self.left_limit(x), other.left_limit(x))));
            out.push((x, op(self.value_at(x), other.value_at(x))));
            out.push((x, op(fr, gr)));

            // Both operands are linear on (x, next); insert their crossing.
            if let Some(&next) = xs.get(i + 1) {
                let fl = self.left_limit(next);
                let d0 = fr - gr;
                let d1 = fl - other.left_limit(next);
                if (d0 > 0.0 && d1 < 0.0) || (d0 < 0.0 && d1 > 0.0) {
                    let t = d0 / (d0 - d1);
                    out.push((x + t * (next - x), fr + t * (fl - fr)));
                }
            }
        }
        Ok(out)
    }

    /// `x ↦ min(mu(x), height)`: the clipped consequent of a fired rule.
    pub fn clip(&self, height: f64) -> Result<MembershipCurve> {
        if !(0.0..=1.0).contains(&height) {
            return Err(Error::InvalidClipHeight(height));
        }
        let mut out = MembershipCurve::empty(self.universe);
        for (i, &(x, y)) in self.points.iter().enumerate() {
            out.push((x, y.min(height)));
            if let Some(&(nx, ny)) = self.points.get(i + 1) {
                let crosses = (y < height && height < ny) || (y > height && height > ny);
                if crosses && nx > x {
                    let t = (height - y) / (ny - y);
                    out.push((x + t * (nx - x), height));
                }
            }
        }
        Ok(out)
    }

    /// `{x : mu(x) >= alpha}`, computed segment by segment.
    pub fn alpha_cut(&self, alpha: f64) -> Result<AlphaCut> {
        check_alpha(alpha)?;
        let reaches = |y: f64| y >= alpha - LEVEL_EPS;
        let mut intervals = Vec::new();
        for &(x, y) in &self.points {
            if reaches(y) {
                intervals.push(Interval::new(x, x));
            }
        }
        for w in self.points.windows(2) {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            if x1 <= x0 {
                continue;
            }
            match (reaches(y0), reaches(y1)) {
                (true, true) => intervals.push(Interval::new(x0, x1)),
                (false, false) => {}
                (up, _) => {
                    let cross = (x0 + (alpha - y0) / (y1 - y0) * (x1 - x0)).clamp(x0, x1);
                    intervals.push(if up {
                        Interval::new(x0, cross)
                    } else {
                        Interval::new(cross, x1)
                    });
                }
            }
        }
        Ok(AlphaCut::from_intervals(intervals))
    }

    /// Smallest closed interval outside of which the function is zero, or
    /// `None` for the empty set.
    pub fn support(&self) -> Option<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &(x, y) in &self.points {
            if y > 0.0 {
                lo = lo.min(x);
                hi = hi.max(x);
            }
        }
        for w in self.points.windows(2) {
            if w[0].1 > 0.0 || w[1].1 > 0.0 {
                lo = lo.min(w[0].0);
                hi = hi.max(w[1].0);
            }
        }
        (lo <= hi).then_some((lo, hi))
    }

    /// Values at the midpoints of `resolution` equal sub-intervals of the
    /// universe, in increasing `x`.
    pub fn sample(&self, resolution: usize) -> Result<Vec<(f64, f64)>> {
        if resolution < 2 {
            return Err(Error::InvalidResolution(resolution));
        }
        let (lo, hi) = (self.universe.lo(), self.universe.hi());
        let step = (hi - lo) / resolution as f64;
        Ok((0..resolution)
            .map(|i| {
                let x = lo + (i as f64 + 0.5) * step;
                (x, self.value_at(x))
            })
            .collect())
    }
}

/// Area centroid of `f` over its universe by the midpoint rule.
pub fn centroid(f: &MembershipCurve, resolution: usize) -> Result<f64> {
    centroid_of_samples(&f.sample(resolution)?)
}

/// Centroid of equally spaced midpoint samples `(x, mu)`.
pub fn centroid_of_samples(samples: &[(f64, f64)]) -> Result<f64> {
    let (moment, area) = samples
        .iter()
        .fold((0.0, 0.0), |(m, a), &(x, mu)| (m + x * mu, a + mu));
    if area <= 0.0 {
        return Err(Error::EmptyAggregate);
    }
    Ok(moment / area)
}

fn lerp((x0, y0): (f64, f64), (x1, y1): (f64, f64), x: f64) -> f64 {
    y0 + (x - x0) / (x1 - x0) * (y1 - y0)
}
