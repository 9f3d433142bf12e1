use thiserror::Error;

/// Failure modes across the pipeline.
///
/// Variants are grouped by the stage that raises them; the names mirror the
/// structured rejection codes used in the CLI output.
#[derive(Debug, Clone, Error)]
pub enum Error {
    // ---- moduli validation ----
    /// Branch values collide with each other or with ±2.
    #[error("REJECT_COLLISION: {0}")]
    RejectCollision(String),
    /// R outside the admissible range (2, ∞).
    #[error("REJECT_RANGE: R = {0} must lie in (2, inf)")]
    RejectRange(f64),
    /// Real-form conjugate pairing broken.
    #[error("REJECT_CONJUGACY: {0}")]
    RejectConjugacy(String),
    /// A branch value of the spectral model lands on the unit circle.
    #[error("UNIT_MODULUS: |alpha| = 1 for lambda = {0}")]
    UnitModulus(num_complex::Complex64),
    /// Sample point does not satisfy the curve equation.
    #[error("OFF_CURVE: residual {0:.3e} exceeds tolerance")]
    OffCurve(f64),

    // ---- contour construction ----
    /// Requested clearance cannot be honored.
    #[error("CLEARANCE: {0}")]
    Clearance(String),
    /// Branch configuration too degenerate for the canonical contours.
    #[error("DEGENERATE: {0}")]
    Degenerate(String),
    /// Circle radius does not enclose all finite branch points.
    #[error("TOO_SMALL: radius {radius} does not enclose branch point at |z| = {required}")]
    TooSmall { radius: f64, required: f64 },

    // ---- analytic continuation / quadrature ----
    /// Path passes too close to a branch point mid-flight.
    #[error("NEAR_BRANCH: distance {0:.3e} to a branch point on the path interior")]
    NearBranch(f64),
    /// Continuation seed violates the curve equation.
    #[error("SEED_OFF_CURVE: residual {0:.3e}")]
    SeedOffCurve(f64),
    /// Adaptive refinement exhausted its budget.
    #[error("NO_CONVERGENCE: {0}")]
    NoConvergence(String),
    /// Numerator degree incompatible with the second-kind normalization.
    #[error("WRONG_DEGREE: numerator degree {got}, expected {expected}")]
    WrongDegree { got: usize, expected: usize },

    // ---- period normalization / invariants ----
    /// Linear system for the differential coefficients is singular.
    #[error("SINGULAR_SYSTEM: {0}")]
    SingularSystem(String),
    /// Repeated numerator root; the pole basis degenerates.
    #[error("REPEATED_ZETA: min separation {0:.3e}")]
    RepeatedZeta(f64),
    /// Decomposition basis is rank deficient.
    #[error("RANK_DEFICIENT: residual {residual:.3e} with condition number {condition:.3e}")]
    RankDeficient { residual: f64, condition: f64 },
    /// A Möbius iterate hit the pole of the transformation.
    #[error("MOBIUS_POLE: iterate {k} lies within {dist:.3e} of the pole")]
    MobiusPole { k: usize, dist: f64 },
    /// T_p collapses when D_+ = D_-.
    #[error("DEGENERATE_MOBIUS: D_+ - D_- = {0:.3e}")]
    DegenerateMobius(f64),

    // ---- finite differences ----
    /// Richardson levels disagree; step size has hit cancellation.
    #[error("STEP_TOO_SMALL: Richardson disagreement {0:.3e}")]
    StepTooSmall(f64),

    // ---- search ----
    /// Rational projection of the zero vector.
    #[error("ZERO_VECTOR")]
    ZeroVector,
    /// Newton cannot decrease the chart residual.
    #[error("NO_PROGRESS: residual {0:.3e}")]
    NoProgress(f64),
    /// Line search cannot keep the iterate inside the moduli space.
    #[error("LEFT_MODULI: {0}")]
    LeftModuli(String),
    /// Newton iteration budget exhausted.
    #[error("MAX_ITER: residual {0:.3e} after the iteration cap")]
    MaxIter(f64),
    /// Period ratios are not rational within tolerance.
    #[error("NOT_RATIONAL: best distance {0:.3e}")]
    NotRational(f64),
    /// Integer periods exceed the configured bound.
    #[error("OVERFLOW: integer entry {0} exceeds the configured maximum")]
    Overflow(i64),

    // ---- io / records ----
    /// Record syntax or field error.
    #[error("PARSE: {0}")]
    Parse(String),
}
