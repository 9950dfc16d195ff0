use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// d/dG of the Euler integral or the potential diverges at |G| = 1.
    #[error("derivative singular at |G| = 1 (G = {g_mom})")]
    SingularDerivative { g_mom: f64 },

    /// Trapezoid refinement hit the node cap before reaching the requested
    /// tolerance; carries the last estimate and the achieved relative change.
    #[error("quadrature did not converge: estimate {estimate}, achieved {achieved:.3e} (wanted {wanted:.3e})")]
    QuadratureNoConvergence {
        estimate: f64,
        achieved: f64,
        wanted: f64,
    },

    /// Radicand of the energy reduction was negative.
    #[error("forbidden region: radicand {radicand:.6e} < 0")]
    ForbiddenRegion { radicand: f64 },

    /// State too close to the singular branch S0 for trustworthy evaluation.
    #[error("too close to the singular set S0: gap {gap:.3e} at r = {r}")]
    NearSingularSet { gap: f64, r: f64 },

    /// Kepler sub-problem not elliptic (non-negative two-body energy).
    #[error("not elliptic: Kepler energy {energy} >= 0")]
    NotElliptic { energy: f64 },

    /// Perihelion direction undefined for a circular inner ellipse.
    #[error("perihelion undefined: eccentricity {ecc:.3e} too small")]
    PerihelionUndefined { ecc: f64 },

    /// Evaluation on the collision set of the full problem.
    #[error("collision: {0}")]
    Collision(String),

    /// G outside (0, Lambda): the reduced coordinates are singular there.
    #[error("coordinate singularity: G = {g_mom} not inside (0, {lambda})")]
    CoordinateSingularity { g_mom: f64, lambda: f64 },

    /// Adaptive step size underflowed; the problem looks stiff or singular.
    #[error("step size underflow at t = {t} (h = {h:.3e})")]
    StepUnderflow { t: f64, h: f64 },

    /// Vector field failed during integration; a partial trajectory may exist.
    #[error("field evaluation failed at t = {t}: {source}")]
    FieldFailure {
        t: f64,
        #[source]
        source: Box<Error>,
    },

    /// No section crossing within the configured time horizon.
    #[error("no return within max_time = {max_time}")]
    ReturnTimeout { max_time: f64 },

    /// Newton iteration failed; carries the residual trace.
    #[error("Newton did not converge after {iterations} iterations (residuals {trace:?})")]
    NewtonNoConvergence { iterations: usize, trace: Vec<f64> },

    /// Degenerate geometric input (zero tangent, dependent directions, ...).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Covering-relation verification aborted because the map failed at a sample.
    #[error("covering verification aborted at sample {sample:?}: {source}")]
    CoveringAborted {
        sample: [f64; 2],
        #[source]
        source: Box<Error>,
    },

    /// A symbol chain requires a covering relation that was not verified.
    #[error("unsatisfiable word: missing relation {from} => {to}")]
    MissingRelation { from: String, to: String },

    /// Subdivision search exhausted without locating a periodic witness.
    #[error("witness not found: search exhausted below box size {box_size:.3e}")]
    WitnessNotFound { box_size: f64 },

    /// Level set empty for the requested parameters.
    #[error("empty set: {0}")]
    EmptySet(String),

    /// Configuration file error with a line number.
    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    /// Filesystem error while exporting results.
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
