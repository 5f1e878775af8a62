//! Floating-point scalar abstraction for the analytic layer.

use num_traits::Float;

/// Floating point scalar: f32 or f64.
///
/// The analytic layer (payoff matrices, thresholds, classification, cp
/// tuning) is generic over this trait; the simulation layer instantiates
/// it at `f64`.
pub trait Scalar: Float + std::fmt::Debug + std::fmt::Display {
    /// Relative tolerance under which two payoff entries count as tied.
    fn tie_tolerance() -> Self;
}

impl Scalar for f32 {
    fn tie_tolerance() -> Self {
        1e-9
    }
}

impl Scalar for f64 {
    fn tie_tolerance() -> Self {
        1e-9
    }
}

/// `true` when `a` and `b` are equal up to the tie tolerance, relative to
/// the larger magnitude (but never tighter than absolute).
pub fn ties<S: Scalar>(a: S, b: S) -> bool {
    let scale = S::one().max(a.abs()).max(b.abs());
    (a - b).abs() <= S::tie_tolerance() * scale
}
