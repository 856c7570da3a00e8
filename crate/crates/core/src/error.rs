//! Error taxonomy shared by all modules.

use thiserror::Error;

/// Errors produced by the numerical core.
///
/// Frequencies are reported as `f64` regardless of the working scalar so the
/// error type does not need a type parameter.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Evaluation requested too close to a permittivity pole (or to ω = 0
    /// while an inverse-square perturbation is active).
    #[error("frequency {omega} is within the pole exclusion zone (|1 - beta*omega^2| or |omega| <= {eta})")]
    PoleProximity { omega: f64, eta: f64 },

    /// σ exceeds the largest structural perturbation the cells admit.
    #[error("sigma = {sigma} exceeds the admissible bound {bound}")]
    SigmaOutOfRange { sigma: f64, bound: f64 },

    /// Geometry that violates a `UnitCell` invariant.
    #[error("invalid unit cell: {0}")]
    InvalidCell(String),

    /// Eigen-decomposition requested where |trace| <= 2: the Floquet
    /// multipliers sit on the unit circle and no decaying direction exists.
    #[error("|trace| = {trace_abs} <= 2: frequency lies inside a spectral band")]
    InsideBand { trace_abs: f64 },

    /// A scan window could not be split around a permittivity pole.
    #[error("scan window [{lo}, {hi}] collapses onto a permittivity pole")]
    WindowAtPole { lo: f64, hi: f64 },

    /// Band-edge pairing failed; the scan resolution likely missed a band.
    #[error("unpaired band edge near omega = {omega}; raise n_scan above {n_scan}")]
    UnpairedEdge { omega: f64, n_scan: usize },

    /// (κ, ω) does not satisfy the dispersion relation.
    #[error("(kappa, omega) = ({kappa}, {omega}) is off the band: |2cos(kappa) - f(omega)| = {residual}")]
    NotOnBand { kappa: f64, omega: f64, residual: f64 },

    /// Band edge with a two-dimensional eigenspace (gap closed), or an edge
    /// mode requested through the interior-mode constructor.
    #[error("degenerate band edge at omega = {omega}")]
    DegenerateEdge { omega: f64 },

    /// Neither or both of u(0), u'(0) vanish: the cell is not mirror
    /// symmetric or the mode is numerically unusable.
    #[error("ambiguous edge-mode symmetry: |u(0)| = {u0}, |u'(0)| = {du0} (sup-normalised)")]
    AmbiguousSymmetry { u0: f64, du0: f64 },

    /// Wilson loop did not stabilise under κ-grid refinement.
    #[error("Zak phase non-convergent: doubling the kappa grid moved theta by {delta}")]
    NonConvergent { delta: f64 },

    /// More than one sign change of the interface determinant in a gap where
    /// the bulk indices promise uniqueness.
    #[error("{count} sign changes of the interface determinant in [{lo}, {hi}]; expected one")]
    MultipleRoots { count: usize, lo: f64, hi: f64 },

    /// Interface root too close to a gap edge to be trusted.
    #[error("interface root {omega} lies within the edge exclusion zone of [{lo}, {hi}]")]
    RootAtEdge { omega: f64, lo: f64, hi: f64 },

    /// Surface impedances need a species-1 layer on both sides of x0.
    #[error("cell {label} does not present a species-1 layer at the interface")]
    NonUnitTerminal { label: String },

    /// Convergence report requested without a parameter-zero baseline.
    #[error("convergence check needs a baseline record at parameter 0")]
    MissingBaseline,

    /// Eigenvalue count jumped by more than one inside a refinement bracket.
    #[error("eigenvalue branches cross near omega = {omega}; re-bracket with a finer scan")]
    BranchCrossing { omega: f64 },

    /// Catch-all for invalid arguments to a driver routine.
    #[error("{0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
