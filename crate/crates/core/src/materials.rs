//! Dispersive permittivity models and layered unit-cell geometry.
//!
//! A structure is two semi-infinite periodic media glued at `x0 = 0`:
//! material A fills `x < 0`, material B fills `x > 0`. Both are built by
//! repeating a unit cell of total length 1 whose layers alternate between two
//! material species. The permittivity of each species is a real Lorentz-pole
//! model, optionally perturbed by `delta * f(omega)` with
//! `f = -1/omega^2` or `f = +1/omega^2`.
//!
//! # Layer-list orientation
//!
//! Layer lists enumerate the cell **walking away from the interface**: the
//! first entry of `cell_b` touches `x0` from the right, and the first entry
//! of `cell_a` touches `x0` from the left. Physically, a B cell on `[n, n+1]`
//! carries its list left-to-right, while an A cell on `[-n-1, -n]` carries
//! its list right-to-left (i.e. the reversed list read left-to-right). For
//! mirror-symmetric cells the two readings coincide; the distinction only
//! matters once the σ-perturbation breaks the palindrome.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::real::Real;
use crate::tol::Tolerances;

/// Which of the two species a layer is made of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Species {
    One,
    Two,
}

impl Species {
    pub fn index(self) -> u8 {
        match self {
            Species::One => 1,
            Species::Two => 2,
        }
    }

    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1 => Ok(Species::One),
            2 => Ok(Species::Two),
            _ => Err(Error::InvalidInput(format!("species index {i} not in {{1, 2}}"))),
        }
    }
}

/// Frequency shape of the optional permittivity perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum PertKind {
    #[default]
    None,
    /// `f(omega) = -1/omega^2`; respects the monotonicity assumption.
    InverseSqDecreasing,
    /// `f(omega) = +1/omega^2`; violates the monotonicity assumption for
    /// large enough `delta`.
    InverseSqIncreasing,
}

impl PertKind {
    fn f<R: Real>(self, omega: R) -> R {
        match self {
            PertKind::None => R::zero(),
            PertKind::InverseSqDecreasing => -(omega * omega).recip(),
            PertKind::InverseSqIncreasing => (omega * omega).recip(),
        }
    }

    fn f_prime<R: Real>(self, omega: R) -> R {
        let two = R::lit(2.0);
        match self {
            PertKind::None => R::zero(),
            PertKind::InverseSqDecreasing => two / (omega * omega * omega),
            PertKind::InverseSqIncreasing => -two / (omega * omega * omega),
        }
    }
}

/// Real dispersive permittivity `eps0 + alpha/(1 - beta*omega^2) + delta*f(omega)`.
///
/// For `beta > 0` the model has a pole at `omega_p = 1/sqrt(beta)`; evaluation
/// near the pole (and near `omega = 0` while a perturbation is active) is
/// refused rather than returning huge values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PermittivityModel<R: Real> {
    pub eps0: R,
    pub alpha: R,
    pub beta: R,
    pub pert_kind: PertKind,
    pub pert_delta: R,
}

impl<R: Real> PermittivityModel<R> {
    pub fn new(eps0: R, alpha: R, beta: R) -> Self {
        Self {
            eps0,
            alpha,
            beta,
            pert_kind: PertKind::None,
            pert_delta: R::zero(),
        }
    }

    pub fn with_perturbation(mut self, kind: PertKind, delta: R) -> Self {
        self.pert_kind = kind;
        self.pert_delta = delta;
        self
    }

    /// Constant (non-dispersive) permittivity.
    pub fn constant(eps: R) -> Self {
        Self::new(eps, R::zero(), R::zero())
    }

    /// Positive pole frequency `1/sqrt(beta)`, if the model has one.
    pub fn pole(&self) -> Option<R> {
        (self.beta > R::zero()).then(|| self.beta.sqrt().recip())
    }

    fn guard(&self, omega: R, eta_pole: R) -> Result<R> {
        let denom = R::one() - self.beta * omega * omega;
        if denom.abs() <= eta_pole {
            return Err(Error::PoleProximity {
                omega: omega.to_f64().unwrap_or(f64::NAN),
                eta: eta_pole.to_f64().unwrap_or(f64::NAN),
            });
        }
        if self.pert_kind != PertKind::None && omega.abs() <= eta_pole {
            return Err(Error::PoleProximity {
                omega: omega.to_f64().unwrap_or(f64::NAN),
                eta: eta_pole.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(denom)
    }

    /// Evaluate `eps(omega)` with the default pole exclusion.
    pub fn eval(&self, omega: R) -> Result<R> {
        self.eval_with(omega, Tolerances::default().eta_pole)
    }

    pub fn eval_with(&self, omega: R, eta_pole: R) -> Result<R> {
        let denom = self.guard(omega, eta_pole)?;
        Ok(self.eps0 + self.alpha / denom + self.pert_delta * self.pert_kind.f(omega))
    }

    /// Analytic `d eps / d omega`, including the perturbation term.
    pub fn derivative(&self, omega: R) -> Result<R> {
        self.derivative_with(omega, Tolerances::default().eta_pole)
    }

    pub fn derivative_with(&self, omega: R, eta_pole: R) -> Result<R> {
        let denom = self.guard(omega, eta_pole)?;
        let two = R::lit(2.0);
        let core = two * self.alpha * self.beta * omega / (denom * denom);
        Ok(core + self.pert_delta * self.pert_kind.f_prime(omega))
    }
}

/// One homogeneous layer of a unit cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Layer<R: Real> {
    pub len: R,
    pub species: Species,
}

impl<R: Real> Layer<R> {
    pub fn new(len: R, species: Species) -> Self {
        Self { len, species }
    }
}

/// Tolerance on the total cell length and on palindrome comparisons.
fn cell_len_tol<R: Real>() -> R {
    R::lit(1e-12)
}

/// A periodic unit cell: an ordered layer list of total length 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitCell<R: Real> {
    layers: Vec<Layer<R>>,
    pub label: String,
}

impl<R: Real> UnitCell<R> {
    pub fn new(label: impl Into<String>, layers: Vec<Layer<R>>) -> Result<Self> {
        let label = label.into();
        if layers.is_empty() {
            return Err(Error::InvalidCell(format!("cell {label}: no layers")));
        }
        for (i, l) in layers.iter().enumerate() {
            if !(l.len > R::zero()) {
                return Err(Error::InvalidCell(format!(
                    "cell {label}: layer {i} has non-positive length {}",
                    l.len
                )));
            }
        }
        let total: R = layers.iter().fold(R::zero(), |s, l| s + l.len);
        if (total - R::one()).abs() > cell_len_tol() {
            return Err(Error::InvalidCell(format!(
                "cell {label}: layer lengths sum to {total}, expected 1"
            )));
        }
        Ok(Self { layers, label })
    }

    /// Convenience constructor from `(length, species_index)` pairs.
    pub fn from_pairs(label: impl Into<String>, pairs: &[(R, u8)]) -> Result<Self> {
        let layers = pairs
            .iter()
            .map(|&(len, s)| Ok(Layer::new(len, Species::from_index(s)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(label, layers)
    }

    pub fn layers(&self) -> &[Layer<R>] {
        &self.layers
    }

    /// The same cell traversed in the opposite direction.
    pub fn reversed(&self) -> Self {
        let mut layers = self.layers.clone();
        layers.reverse();
        Self {
            layers,
            label: self.label.clone(),
        }
    }

    /// Palindrome test: the reversed (length, species) list equals the
    /// original, lengths within 1e-12.
    pub fn is_mirror_symmetric(&self) -> bool {
        let n = self.layers.len();
        let tol = cell_len_tol::<R>();
        (0..n).all(|i| {
            let a = &self.layers[i];
            let b = &self.layers[n - 1 - i];
            a.species == b.species && (a.len - b.len).abs() <= tol
        })
    }

    /// Species of the layer adjacent to the interface.
    pub fn terminal_species(&self) -> Species {
        self.layers[0].species
    }

    /// Indices (into the layer list) of the species-1 layers.
    fn species1_indices(&self) -> Vec<usize> {
        self.layers
            .iter()
            .enumerate()
            .filter(|(_, l)| l.species == Species::One)
            .map(|(i, _)| i)
            .collect()
    }
}

/// The glued two-material structure. A fills `x < 0`, B fills `x > 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Structure<R: Real> {
    pub cell_a: UnitCell<R>,
    pub cell_b: UnitCell<R>,
    pub eps1: PermittivityModel<R>,
    pub eps2: PermittivityModel<R>,
    pub mu0: R,
}

/// One material of the structure: its unit cell plus the shared species
/// models. This is the unit the spectral machinery operates on.
#[derive(Debug, Clone, Copy)]
pub struct MaterialView<'a, R: Real> {
    pub cell: &'a UnitCell<R>,
    pub eps1: &'a PermittivityModel<R>,
    pub eps2: &'a PermittivityModel<R>,
    pub mu0: R,
}

impl<'a, R: Real> MaterialView<'a, R> {
    pub fn eps_of(&self, species: Species, omega: R, eta_pole: R) -> Result<R> {
        match species {
            Species::One => self.eps1.eval_with(omega, eta_pole),
            Species::Two => self.eps2.eval_with(omega, eta_pole),
        }
    }

    /// Positive frequencies at which evaluation is refused: species poles,
    /// plus `omega = 0` when a perturbation is active.
    pub fn poles(&self) -> Vec<R> {
        let mut out = Vec::new();
        if self.eps1.pert_kind != PertKind::None || self.eps2.pert_kind != PertKind::None {
            out.push(R::zero());
        }
        out.extend(self.eps1.pole());
        out.extend(self.eps2.pole());
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out.dedup();
        out
    }
}

impl<R: Real> Structure<R> {
    pub fn new(
        cell_a: UnitCell<R>,
        cell_b: UnitCell<R>,
        eps1: PermittivityModel<R>,
        eps2: PermittivityModel<R>,
        mu0: R,
    ) -> Result<Self> {
        if !(mu0 > R::zero()) {
            return Err(Error::InvalidInput(format!("mu0 = {mu0} must be positive")));
        }
        Ok(Self {
            cell_a,
            cell_b,
            eps1,
            eps2,
            mu0,
        })
    }

    pub fn material_a(&self) -> MaterialView<'_, R> {
        MaterialView {
            cell: &self.cell_a,
            eps1: &self.eps1,
            eps2: &self.eps2,
            mu0: self.mu0,
        }
    }

    pub fn material_b(&self) -> MaterialView<'_, R> {
        MaterialView {
            cell: &self.cell_b,
            eps1: &self.eps1,
            eps2: &self.eps2,
            mu0: self.mu0,
        }
    }

    /// Apply an inverse-square perturbation of magnitude `delta` to both
    /// species models (`f1 = f2`).
    pub fn with_perturbation(&self, kind: PertKind, delta: R) -> Self {
        let mut s = self.clone();
        s.eps1 = s.eps1.with_perturbation(kind, delta);
        s.eps2 = s.eps2.with_perturbation(kind, delta);
        s
    }

    /// Largest admissible σ: the two layers that shrink must keep
    /// non-negative length. In A the middle species-1 layer shrinks; in B the
    /// interface-adjacent species-1 layer shrinks.
    pub fn sigma_max(&self) -> Result<R> {
        let (_, a_mid, _) = sigma_slots(&self.cell_a)?;
        let (b_first, _, _) = sigma_slots(&self.cell_b)?;
        Ok(self.cell_a.layers[a_mid]
            .len
            .min(self.cell_b.layers[b_first].len))
    }

    /// Symmetry-breaking perturbation: grow A's outermost species-1 layer by
    /// σ and shrink its middle one; shrink B's interface-adjacent species-1
    /// layer by σ and grow its middle one. Cell lengths stay 1; layers that
    /// shrink to zero are dropped.
    pub fn apply_sigma_perturbation(&self, sigma: R) -> Result<Self> {
        if sigma < R::zero() {
            return Err(Error::SigmaOutOfRange {
                sigma: sigma.to_f64().unwrap_or(f64::NAN),
                bound: 0.0,
            });
        }
        if sigma == R::zero() {
            return Ok(self.clone());
        }
        let bound = self.sigma_max()?;
        if sigma > bound + cell_len_tol() {
            return Err(Error::SigmaOutOfRange {
                sigma: sigma.to_f64().unwrap_or(f64::NAN),
                bound: bound.to_f64().unwrap_or(f64::NAN),
            });
        }

        let (_, a_mid, a_last) = sigma_slots(&self.cell_a)?;
        let (b_first, b_mid, _) = sigma_slots(&self.cell_b)?;

        let mut s = self.clone();
        adjust(&mut s.cell_a, a_mid, -sigma);
        adjust(&mut s.cell_a, a_last, sigma);
        adjust(&mut s.cell_b, b_first, -sigma);
        adjust(&mut s.cell_b, b_mid, sigma);
        normalise(&mut s.cell_a);
        normalise(&mut s.cell_b);
        Ok(s)
    }
}

/// Layer indices of the first, middle and last species-1 layer of a cell.
/// With K species-1 layers the middle one is number ⌊(K+1)/2⌋ (1-based).
fn sigma_slots<R: Real>(cell: &UnitCell<R>) -> Result<(usize, usize, usize)> {
    let s1 = cell.species1_indices();
    let k = s1.len();
    if k < 2 {
        return Err(Error::InvalidCell(format!(
            "cell {}: σ-perturbation needs at least two species-1 layers",
            cell.label
        )));
    }
    let mid = (k + 1) / 2 - 1;
    Ok((s1[0], s1[mid], s1[k - 1]))
}

fn adjust<R: Real>(cell: &mut UnitCell<R>, idx: usize, delta: R) {
    cell.layers[idx].len = cell.layers[idx].len + delta;
}

/// Drop zero-length layers and rescale so the lengths sum to exactly 1.
fn normalise<R: Real>(cell: &mut UnitCell<R>) {
    cell.layers.retain(|l| l.len > cell_len_tol());
    let total: R = cell.layers.iter().fold(R::zero(), |s, l| s + l.len);
    for l in &mut cell.layers {
        l.len = l.len / total;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn drude() -> PermittivityModel<f64> {
        PermittivityModel::new(1.0, 2.0, 1.0)
    }

    /// The A/B cells used throughout: theta1 = 0.1, theta2 = 0.15, mu = 0.25.
    pub(crate) fn cell_a() -> UnitCell<f64> {
        UnitCell::from_pairs("A", &[(0.1, 1), (0.25, 2), (0.3, 1), (0.25, 2), (0.1, 1)]).unwrap()
    }

    pub(crate) fn cell_b() -> UnitCell<f64> {
        UnitCell::from_pairs("B", &[(0.15, 1), (0.25, 2), (0.2, 1), (0.25, 2), (0.15, 1)]).unwrap()
    }

    fn fig_structure() -> Structure<f64> {
        Structure::new(
            cell_a(),
            cell_b(),
            drude(),
            PermittivityModel::new(1.0, 1.0, 0.5),
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn eval_at_zero_is_eps0_plus_alpha() {
        assert_eq!(drude().eval(0.0).unwrap(), 3.0);
    }

    #[test]
    fn eval_beyond_pole_goes_negative() {
        let e = drude().eval(2f64.sqrt()).unwrap();
        assert_relative_eq!(e, -1.0, max_relative = 1e-12);
    }

    #[test]
    fn eval_at_pole_is_refused() {
        assert!(matches!(
            drude().eval(1.0),
            Err(Error::PoleProximity { .. })
        ));
        // Just outside the exclusion zone evaluation succeeds.
        assert!(drude().eval(1.0 + 1e-3).is_ok());
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(drude().derivative(0.0).unwrap(), 0.0);
        assert_relative_eq!(drude().derivative(2.0).unwrap(), 8.0 / 9.0, max_relative = 1e-14);
    }

    #[test]
    fn perturbed_derivative_at_pole_refused() {
        let m = drude().with_perturbation(PertKind::InverseSqIncreasing, 0.5);
        assert!(matches!(m.derivative(1.0), Err(Error::PoleProximity { .. })));
    }

    #[test]
    fn perturbation_guard_near_zero() {
        let m = drude().with_perturbation(PertKind::InverseSqDecreasing, 0.1);
        assert!(matches!(m.eval(1e-7), Err(Error::PoleProximity { .. })));
        assert!(m.eval(1e-3).is_ok());
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let models = [
            drude(),
            PermittivityModel::new(2.0, 0.5, 0.25),
            drude().with_perturbation(PertKind::InverseSqDecreasing, 0.3),
            drude().with_perturbation(PertKind::InverseSqIncreasing, 0.05),
        ];
        for m in models {
            for &omega in &[0.2, 0.5, 0.9, 1.5, 3.0] {
                if m.eval(omega).is_err() {
                    continue;
                }
                let h = 1e-6 * omega.max(1.0);
                let fd = (m.eval(omega + h).unwrap() - m.eval(omega - h).unwrap()) / (2.0 * h);
                let an = m.derivative(omega).unwrap();
                assert_relative_eq!(an, fd, max_relative = 1e-6, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn monotone_for_unperturbed_models() {
        let m = drude();
        for i in 1..400 {
            let omega = i as f64 * 0.01;
            if let Ok(d) = m.derivative(omega) {
                assert!(d >= 0.0, "d eps/d omega < 0 at omega = {omega}");
            }
        }
    }

    #[test]
    fn mirror_symmetry_examples() {
        assert!(cell_a().is_mirror_symmetric());
        let asym = UnitCell::from_pairs("x", &[(0.5, 1), (0.5, 2)]).unwrap();
        assert!(!asym.is_mirror_symmetric());
        let single = UnitCell::from_pairs("y", &[(1.0, 1)]).unwrap();
        assert!(single.is_mirror_symmetric());
    }

    #[test]
    fn cell_validation() {
        assert!(UnitCell::<f64>::from_pairs("bad", &[(0.4, 1), (0.4, 2)]).is_err());
        assert!(UnitCell::<f64>::from_pairs("bad", &[(1.2, 1), (-0.2, 2)]).is_err());
        assert!(UnitCell::<f64>::from_pairs("ok", &[(0.5 + 1e-13, 1), (0.5, 2)]).is_ok());
    }

    #[test]
    fn sigma_zero_is_identity() {
        let s = fig_structure();
        let p = s.apply_sigma_perturbation(0.0).unwrap();
        assert_eq!(s, p);
    }

    #[test]
    fn sigma_bookkeeping_at_0_05() {
        let s = fig_structure();
        let p = s.apply_sigma_perturbation(0.05).unwrap();
        let a: Vec<f64> = p.cell_a.layers().iter().map(|l| l.len).collect();
        let b: Vec<f64> = p.cell_b.layers().iter().map(|l| l.len).collect();
        for (got, want) in a.iter().zip([0.1, 0.25, 0.25, 0.25, 0.15]) {
            assert_relative_eq!(got, &want, epsilon = 1e-14);
        }
        for (got, want) in b.iter().zip([0.10, 0.25, 0.25, 0.25, 0.15]) {
            assert_relative_eq!(got, &want, epsilon = 1e-14);
        }
        let sum_a: f64 = a.iter().sum();
        let sum_b: f64 = b.iter().sum();
        assert!((sum_a - 1.0).abs() < 1e-14);
        assert!((sum_b - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sigma_bound() {
        let s = fig_structure();
        assert_relative_eq!(s.sigma_max().unwrap(), 0.15, epsilon = 1e-15);
        assert!(matches!(
            s.apply_sigma_perturbation(0.2),
            Err(Error::SigmaOutOfRange { .. })
        ));
    }

    #[test]
    fn sigma_at_bound_drops_empty_layer() {
        let s = fig_structure();
        let p = s.apply_sigma_perturbation(0.15).unwrap();
        assert_eq!(p.cell_b.layers().len(), 4);
        assert_eq!(p.cell_b.terminal_species(), Species::Two);
        let sum: f64 = p.cell_b.layers().iter().map(|l| l.len).sum();
        assert!((sum - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sigma_breaks_mirror_symmetry_and_keeps_species2() {
        let s = fig_structure();
        let p = s.apply_sigma_perturbation(0.03).unwrap();
        assert!(!p.cell_a.is_mirror_symmetric());
        assert!(!p.cell_b.is_mirror_symmetric());
        for cell in [&p.cell_a, &p.cell_b] {
            let mut two: Vec<f64> = cell
                .layers()
                .iter()
                .filter(|l| l.species == Species::Two)
                .map(|l| l.len)
                .collect();
            two.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert_eq!(two, vec![0.25, 0.25]);
        }
        let sum: f64 = p.cell_a.layers().iter().map(|l| l.len).sum();
        assert!((sum - 1.0).abs() < 1e-14);
    }

    #[test]
    fn single_precision_smoke() {
        let m = PermittivityModel::<f32>::new(1.0, 2.0, 1.0);
        assert!((m.eval(0.0).unwrap() - 3.0).abs() < 1e-6);
    }
}
