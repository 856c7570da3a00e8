//! Bloch band structure, Zak phases and topologically protected interface
//! modes of one-dimensional layered media with real, frequency-dispersive
//! permittivity.
//!
//! The library analyses structures made of two semi-infinite periodic
//! materials glued at `x0 = 0`. It locates spectral bands and band gaps from
//! the trace of the unit-cell transfer matrix, classifies band-edge mode
//! symmetries, computes bulk indices and Zak phases, finds the gap frequency
//! at which the two surface impedances cancel (the interface mode), and
//! tracks everything under permittivity and symmetry perturbations. An
//! independent finite-difference solver cross-validates the transfer-matrix
//! path.
//!
//! The numerical core is generic over the scalar type ([`Real`]); concrete
//! `f64` aliases are exported at the crate root. Tolerances are calibrated
//! for `f64`.

pub mod bracket;
pub mod error;
pub mod interface;
pub mod materials;
pub mod modes;
pub mod oracle;
pub mod perturb;
pub mod real;
pub mod spectrum;
pub mod tol;
pub mod xfer;

pub use error::{Error, Result};
pub use real::Real;
pub use tol::Tolerances;

/// `f64` aliases for the main domain types.
pub type PermittivityModel64 = materials::PermittivityModel<f64>;
pub type UnitCell64 = materials::UnitCell<f64>;
pub type Structure64 = materials::Structure<f64>;
pub type TransferMatrix64 = xfer::TransferMatrix<f64>;
pub type Band64 = spectrum::Band<f64>;
pub type BandGap64 = spectrum::BandGap<f64>;
pub type GapIntersection64 = spectrum::GapIntersection<f64>;
pub type BlochMode64 = modes::BlochMode<f64>;
pub type ZakPhase64 = modes::ZakPhase<f64>;
pub type InterfaceMode64 = interface::InterfaceMode<f64>;
pub type SweepRecord64 = perturb::SweepRecord<f64>;
pub type Tolerances64 = tol::Tolerances<f64>;
