//! Default tolerances and contour parameters.
//!
//! Everything here can be overridden per call through the respective
//! operation arguments; these are the values the test suites pin.

/// Residual for "this point lies on the curve" checks.
pub const ON_CURVE: f64 = 1e-10;

/// Residual for continuation seeds and lifted start fibers.
pub const FIBER_SEED: f64 = 1e-12;

/// Absolute quadrature target for a single contour integral.
pub const QUADRATURE: f64 = 1e-11;

/// A-periods of a normalized differential must re-integrate below this.
pub const A_PERIOD: f64 = 1e-9;

/// Max imaginary part of prefactored period entries on real-form points.
pub const REALNESS: f64 = 1e-8;

/// Residual threshold promoted to a hard error in the invariant
/// decomposition solve.
pub const DECOMPOSITION: f64 = 1e-7;

/// Pairwise-distinct guard for numerator roots.
pub const ZETA_SEPARATION: f64 = 1e-9;

/// Default rationality tolerance for the search pipeline.
pub const RATIONAL: f64 = 1e-9;

/// Default maximum denominator for rational projection.
pub const MAX_DENOMINATOR: i64 = 50;

/// Newton chart residual for convergence.
pub const NEWTON: f64 = 1e-10;

/// Newton iteration cap.
pub const NEWTON_MAX_ITER: usize = 60;

/// Clearance factor: the default δ is this times the minimal branch
/// separation.
pub const CLEARANCE_FACTOR: f64 = 0.1;

/// Cap radius of an a-cycle stadium, in units of δ.
pub const A_RADIUS_DELTAS: f64 = 3.0;

/// Cap radius of a b-cycle stadium, in units of δ.
pub const B_RADIUS_DELTAS: f64 = 2.0;

/// Keyhole radius of the open curves around their enclosed branch point,
/// in units of δ.
pub const C_RADIUS_DELTAS: f64 = 2.0;

/// Fiber tracking: max change of arg P(z) between consecutive nodes.
pub const TRACK_ARG_P: f64 = std::f64::consts::FRAC_PI_3;

/// Fiber tracking: max change of arg(z - b) for the nearest branch point.
pub const TRACK_ARG_NEAREST: f64 = std::f64::consts::FRAC_PI_6;

/// Default finite-difference step scale (times the local coordinate scale).
pub const FD_STEP: f64 = 1e-5;
