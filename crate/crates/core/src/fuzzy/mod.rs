//! Fuzzy sets over a real universe: piecewise-linear membership functions,
//! linguistic variables, alpha-cuts and pointwise min/max set operations.

mod curve;
mod membership;
mod variable;

pub use curve::{centroid, centroid_of_samples, MembershipCurve};
pub use membership::{AlphaCut, Interval, MembershipFunction, Shape};
pub use variable::{FuzzyTerm, LinguisticVariable, Universe};

/// `x ↦ max(f(x), g(x))`.
pub fn pointwise_union(f: &MembershipCurve, g: &MembershipCurve) -> crate::Result<MembershipCurve> {
    f.union(g)
}

/// `x ↦ min(f(x), g(x))`.
pub fn pointwise_intersection(
    f: &MembershipCurve,
    g: &MembershipCurve,
) -> crate::Result<MembershipCurve> {
    f.intersection(g)
}

/// Clips a membership function at `height` over `universe`.
pub fn clip(
    mf: &MembershipFunction,
    universe: Universe,
    height: f64,
) -> crate::Result<MembershipCurve> {
    MembershipCurve::from_function(mf, universe).clip(height)
}
