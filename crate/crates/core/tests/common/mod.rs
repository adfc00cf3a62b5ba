//! Oracles shared by the integration tests. Nothing here calls into the
//! library's membership, aggregation or integration code.

#![allow(dead_code)]

/// Trapezoid membership `[a, b, c, d]` evaluated from first principles.
pub fn trapezoid(k: [f64; 4], x: f64) -> f64 {
    let [a, b, c, d] = k;
    if x < a || x > d {
        0.0
    } else if x >= b && x <= c {
        1.0
    } else if x < b {
        (x - a) / (b - a)
    } else {
        (d - x) / (d - c)
    }
}

/// Centroid of `f` on `[lo, hi]` by the composite trapezoid rule with `n`
/// sub-intervals.
pub fn trapezoid_centroid(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let h = (hi - lo) / n as f64;
    let mut moment = 0.0;
    let mut area = 0.0;
    for i in 0..=n {
        let x = lo + i as f64 * h;
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        let y = f(x);
        moment += w * x * y;
        area += w * y;
    }
    moment / area
}

/// Default output partition, written out independently of the data file.
pub const PRIORITY: [(&str, [f64; 4]); 5] = [
    ("VeryLow", [0.0, 0.0, 10.0, 25.0]),
    ("Low", [10.0, 25.0, 25.0, 40.0]),
    ("Medium", [30.0, 50.0, 50.0, 70.0]),
    ("High", [60.0, 75.0, 75.0, 90.0]),
    ("VeryHigh", [80.0, 90.0, 100.0, 100.0]),
];

pub fn priority_knots(label: &str) -> [f64; 4] {
    PRIORITY.iter().find(|(l, _)| *l == label).unwrap().1
}

/// The expert rule base: (execution time, failure rate, priority).
pub const EXPERT_RULES: [(&str, &str, &str); 20] = [
    ("High", "VeryLow", "VeryLow"),
    ("VeryHigh", "VeryLow", "VeryLow"),
    ("Short", "VeryLow", "Low"),
    ("Medium", "VeryLow", "Low"),
    ("High", "Low", "Low"),
    ("VeryHigh", "Low", "Low"),
    ("High", "Medium", "Low"),
    ("VeryHigh", "Medium", "Low"),
    ("Short", "Low", "Medium"),
    ("Medium", "Low", "Medium"),
    ("Short", "Medium", "Medium"),
    ("Medium", "Medium", "Medium"),
    ("High", "High", "Medium"),
    ("VeryHigh", "High", "Medium"),
    ("Short", "High", "High"),
    ("Medium", "High", "High"),
    ("High", "VeryHigh", "High"),
    ("VeryHigh", "VeryHigh", "High"),
    ("Short", "VeryHigh", "VeryHigh"),
    ("Medium", "VeryHigh", "VeryHigh"),
];

pub const EXEC_TERMS: [&str; 4] = ["Short", "Medium", "High", "VeryHigh"];
pub const RATE_TERMS: [&str; 5] = ["VeryLow", "Low", "Medium", "High", "VeryHigh"];
