//! Numerical tolerances, overridable as a group.

use crate::real::Real;

/// Tolerance bundle threaded through the drivers.
///
/// The defaults are deliberate choices, not guesses:
///
/// * `eta_pole` — pole exclusion measured in the relative quantity
///   `|1 - beta*omega^2|`; we refuse evaluation instead of returning huge
///   permittivities silently.
/// * `eta_edge` — margin on `|trace| - 2` below which a frequency counts as a
///   band edge and the gap eigen-decomposition is refused.
/// * `root_rel` — relative half-width at which bisections stop.
/// * `edge_residual` — allowed `|f(omega) -/+ 2|` at a refined band edge.
/// * `floquet` — allowed residual of the Floquet condition on a Bloch mode.
/// * `sym` — vanishing threshold for u(0) or u'(0) relative to the sup norm.
/// * `zak_class` — distance (in radians) within which a Zak phase classifies
///   to 0 or π.
/// * `w_residual` — |W| accepted at an interface root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<R: Real> {
    pub eta_pole: R,
    pub eta_edge: R,
    pub root_rel: R,
    pub edge_residual: R,
    pub floquet: R,
    pub sym: R,
    pub zak_class: R,
    pub w_residual: R,
}

impl<R: Real> Default for Tolerances<R> {
    fn default() -> Self {
        Self {
            eta_pole: R::lit(1e-6),
            eta_edge: R::lit(1e-9),
            root_rel: R::lit(1e-12),
            edge_residual: R::lit(1e-8),
            floquet: R::lit(1e-8),
            sym: R::lit(1e-6),
            zak_class: R::lit(1e-2) * R::PI(),
            w_residual: R::lit(1e-10),
        }
    }
}
