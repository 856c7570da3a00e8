//! Bloch eigenmodes, band-edge symmetry, bulk indices and Zak phases.
//!
//! Modes are reconstructed from the cell transfer matrix: the Floquet
//! eigenvector at `(kappa, omega)` seeds a propagation through partial
//! segment matrices, sampled on a uniform grid over one cell and normalised
//! under the `mu0`-weighted L2 inner product. Derivative samples are
//! right-limits (the derivative jumps at species boundaries where the flux
//! `(1/eps) u'` is the continuous quantity).
//!
//! The Zak phase is evaluated as a discrete Wilson loop of mode overlaps
//! around the Brillouin zone, which is gauge invariant by construction and
//! preserves the mod-2π quantisation the continuum Berry integral has for
//! mirror-symmetric cells.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::materials::MaterialView;
use crate::real::Real;
use crate::spectrum::{solve_omega_on_band, Band, BandGap, EdgeKappa};
use crate::tol::Tolerances;
use crate::xfer::{cell_transfer_matrix, discriminant, junction_matrix, segment_matrix, TransferMatrix};

/// One Bloch mode sampled over the unit cell.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochMode<R: Real> {
    pub kappa: R,
    pub omega: R,
    pub mu0: R,
    /// Uniform grid over [0, 1], endpoints included.
    pub grid: Vec<R>,
    pub u: Vec<Complex<R>>,
    pub du: Vec<Complex<R>>,
    /// mu0-weighted L2 norm after normalisation (1 by construction).
    pub norm: R,
}

impl<R: Real> BlochMode<R> {
    pub fn sup_u(&self) -> R {
        self.u.iter().fold(R::zero(), |m, z| m.max(z.norm()))
    }

    pub fn sup_du(&self) -> R {
        self.du.iter().fold(R::zero(), |m, z| m.max(z.norm()))
    }

    /// Multiply the mode by a unit phase (gauge change).
    pub fn with_phase(mut self, phase: Complex<R>) -> Self {
        for z in &mut self.u {
            *z = *z * phase;
        }
        for z in &mut self.du {
            *z = *z * phase;
        }
        self
    }
}

/// mu0-weighted trapezoidal inner product `<a, b> = ∫ mu0 a conj(b) dx`.
pub fn overlap<R: Real>(a: &BlochMode<R>, b: &BlochMode<R>) -> Complex<R> {
    let n = a.u.len();
    assert_eq!(n, b.u.len(), "modes sampled on different grids");
    let h = (a.grid[n - 1] - a.grid[0]) / R::from_usize_(n - 1);
    let mut acc = Complex::new(R::zero(), R::zero());
    for j in 0..n {
        let w = if j == 0 || j == n - 1 { R::lit(0.5) } else { R::one() };
        acc = acc + (a.u[j] * b.u[j].conj()).scale(w);
    }
    acc.scale(a.mu0 * h)
}

/// Walk the cell and sample `(u, u')` at `n_grid + 1` uniform points, given
/// the state at the cell's left boundary (referenced to the first layer's
/// medium).
fn sample_state<R: Real>(
    mat: &MaterialView<'_, R>,
    omega: R,
    seed: [Complex<R>; 2],
    n_grid: usize,
    tol: &Tolerances<R>,
) -> Result<(Vec<R>, Vec<Complex<R>>, Vec<Complex<R>>)> {
    let layers = mat.cell.layers();
    let n_layers = layers.len();
    let mut eps = Vec::with_capacity(n_layers);
    for l in layers {
        eps.push(mat.eps_of(l.species, omega, tol.eta_pole)?);
    }
    // Layer start positions and the state at each start.
    let mut starts = Vec::with_capacity(n_layers + 1);
    let mut acc = R::zero();
    for l in layers {
        starts.push(acc);
        acc = acc + l.len;
    }
    starts.push(acc); // ~1

    let mut states = Vec::with_capacity(n_layers + 1);
    states.push(seed);
    for k in 0..n_layers {
        let t = segment_matrix(layers[k].len, eps[k], omega, mat.mu0);
        let mut s = t.apply_complex(states[k]);
        let eps_next = eps[(k + 1) % n_layers];
        if eps_next != eps[k] {
            s = junction_matrix(eps[k], eps_next).apply_complex(s);
        }
        states.push(s);
    }

    let n = n_grid.max(8);
    let mut grid = Vec::with_capacity(n + 1);
    let mut u = Vec::with_capacity(n + 1);
    let mut du = Vec::with_capacity(n + 1);
    let mut k = 0usize;
    for j in 0..=n {
        let x = R::from_usize_(j) / R::from_usize_(n);
        while k + 1 < n_layers && x >= starts[k + 1] - R::lit(1e-15) {
            k += 1;
        }
        let state = if j == n {
            states[n_layers]
        } else {
            let t = segment_matrix(x - starts[k], eps[k], omega, mat.mu0);
            t.apply_complex(states[k])
        };
        grid.push(x);
        u.push(state[0]);
        du.push(state[1]);
    }
    Ok((grid, u, du))
}

fn normalise_mode<R: Real>(mode: &mut BlochMode<R>) {
    let n = mode.u.len();
    let h = R::one() / R::from_usize_(n - 1);
    let mut acc = R::zero();
    for j in 0..n {
        let w = if j == 0 || j == n - 1 { R::lit(0.5) } else { R::one() };
        acc = acc + mode.u[j].norm_sqr() * w;
    }
    let norm = (mode.mu0 * h * acc).sqrt();
    let inv = norm.recip();
    for z in &mut mode.u {
        *z = z.scale(inv);
    }
    for z in &mut mode.du {
        *z = z.scale(inv);
    }
    mode.norm = R::one();
}

/// Bloch mode strictly inside a band (`kappa` away from 0 and ±π).
pub fn bloch_mode<R: Real>(
    mat: &MaterialView<'_, R>,
    kappa: R,
    omega: R,
    n_grid: usize,
    tol: &Tolerances<R>,
) -> Result<BlochMode<R>> {
    let f = discriminant(mat, omega, tol)?;
    let residual = (R::lit(2.0) * kappa.cos() - f).abs();
    if residual > tol.edge_residual {
        return Err(Error::NotOnBand {
            kappa: kappa.to_f64().unwrap_or(f64::NAN),
            omega: omega.to_f64().unwrap_or(f64::NAN),
            residual: residual.to_f64().unwrap_or(f64::NAN),
        });
    }
    if kappa.sin().abs() < R::lit(1e-9) {
        // Multiplier ±1: the matrix is a Jordan block (or ±I) at a band
        // edge; the real constructor below owns that case.
        return Err(Error::DegenerateEdge {
            omega: omega.to_f64().unwrap_or(f64::NAN),
        });
    }
    let t = cell_transfer_matrix(mat, omega, tol)?;
    // Eigenvector for e^{i kappa}: columns of (T - e^{-i kappa} I) span it.
    let other = Complex::new(kappa.cos(), -kappa.sin());
    let c1 = [Complex::new(t.m11, R::zero()) - other, Complex::new(t.m21, R::zero())];
    let c2 = [Complex::new(t.m12, R::zero()), Complex::new(t.m22, R::zero()) - other];
    let n1 = c1[0].norm_sqr() + c1[1].norm_sqr();
    let n2 = c2[0].norm_sqr() + c2[1].norm_sqr();
    let seed = if n1 >= n2 { c1 } else { c2 };
    let (grid, u, du) = sample_state(mat, omega, seed, n_grid, tol)?;
    let mut mode = BlochMode {
        kappa,
        omega,
        mu0: mat.mu0,
        grid,
        u,
        du,
        norm: R::zero(),
    };
    normalise_mode(&mut mode);
    Ok(mode)
}

/// Real (anti)periodic mode at a band edge: multiplier +1 at kappa = 0 and
/// -1 at kappa = π. Sign convention: the largest-|u| sample is positive.
pub fn edge_mode<R: Real>(
    mat: &MaterialView<'_, R>,
    edge: EdgeKappa,
    omega: R,
    n_grid: usize,
    tol: &Tolerances<R>,
) -> Result<BlochMode<R>> {
    let f = discriminant(mat, omega, tol)?;
    let mu = match edge {
        EdgeKappa::Zero => R::one(),
        EdgeKappa::Pi => -R::one(),
    };
    if (f - R::lit(2.0) * mu).abs() > tol.edge_residual {
        return Err(Error::NotOnBand {
            kappa: edge.value::<R>().to_f64().unwrap_or(f64::NAN),
            omega: omega.to_f64().unwrap_or(f64::NAN),
            residual: (f - R::lit(2.0) * mu).abs().to_f64().unwrap_or(f64::NAN),
        });
    }
    let t = cell_transfer_matrix(mat, omega, tol)?;
    let m = TransferMatrix {
        m11: t.m11 - mu,
        m12: t.m12,
        m21: t.m21,
        m22: t.m22 - mu,
    };
    let scale = t.m11.abs().max(t.m12.abs()).max(t.m21.abs()).max(t.m22.abs());
    let mnorm = m.m11.abs().max(m.m12.abs()).max(m.m21.abs()).max(m.m22.abs());
    if mnorm <= R::lit(1e-9) * (R::one() + scale) {
        // T = ±I: every direction is an eigenvector, the gap is closed.
        return Err(Error::DegenerateEdge {
            omega: omega.to_f64().unwrap_or(f64::NAN),
        });
    }
    // Kernel of the rank-1 matrix M: orthogonal to both rows.
    let r1 = [m.m12, -m.m11];
    let r2 = [m.m22, -m.m21];
    let v = if r1[0] * r1[0] + r1[1] * r1[1] >= r2[0] * r2[0] + r2[1] * r2[1] {
        r1
    } else {
        r2
    };
    let seed = [Complex::new(v[0], R::zero()), Complex::new(v[1], R::zero())];
    let (grid, u, du) = sample_state(mat, omega, seed, n_grid, tol)?;
    let mut mode = BlochMode {
        kappa: edge.value(),
        omega,
        mu0: mat.mu0,
        grid,
        u,
        du,
        norm: R::zero(),
    };
    normalise_mode(&mut mode);
    // Fix the overall sign from the largest-|u| sample.
    let mut best = 0usize;
    let mut best_mag = R::zero();
    for (j, z) in mode.u.iter().enumerate() {
        if z.norm() > best_mag {
            best_mag = z.norm();
            best = j;
        }
    }
    if mode.u[best].re < R::zero() {
        mode = mode.with_phase(Complex::new(-R::one(), R::zero()));
    }
    Ok(mode)
}

/// Residual of the Floquet condition: propagate `(u(0), u'(0))` through the
/// full cell and compare with `e^{i kappa} (u(0), u'(0))`.
pub fn floquet_residual<R: Real>(
    mat: &MaterialView<'_, R>,
    mode: &BlochMode<R>,
    tol: &Tolerances<R>,
) -> Result<R> {
    let t = cell_transfer_matrix(mat, mode.omega, tol)?;
    let start = [mode.u[0], mode.du[0]];
    let prop = t.apply_complex(start);
    let phase = Complex::new(mode.kappa.cos(), mode.kappa.sin());
    let expect = [start[0] * phase, start[1] * phase];
    let num = ((prop[0] - expect[0]).norm_sqr() + (prop[1] - expect[1]).norm_sqr()).sqrt();
    let den = (start[0].norm_sqr() + start[1].norm_sqr()).sqrt();
    Ok(num / den)
}

/// Mirror parity of a band-edge mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Parity {
    Symmetric,
    Antisymmetric,
}

/// Outcome of the edge-mode symmetry classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeSymmetry<R: Real> {
    pub kappa_edge: EdgeKappa,
    pub classification: Parity,
    pub u_at_0: R,
    pub du_at_0: R,
}

/// Classify a band-edge mode of a mirror-symmetric cell as symmetric or
/// antisymmetric about the cell centre.
///
/// Exactly one of `u(0)`, `u'(0)` vanishes at an edge. Which one maps to
/// which parity depends on the edge: at kappa = 0 a symmetric mode has
/// `u'(0) = 0`, while at kappa = π (antiperiodic) a symmetric mode has
/// `u(0) = 0`. The verdict is cross-checked against a direct reflection test
/// on the samples.
pub fn classify_edge_symmetry<R: Real>(
    mode: &BlochMode<R>,
    tol: &Tolerances<R>,
) -> Result<EdgeSymmetry<R>> {
    let edge = if mode.kappa.abs() < R::lit(0.5) {
        EdgeKappa::Zero
    } else {
        EdgeKappa::Pi
    };
    let sup_u = mode.sup_u();
    let sup_du = mode.sup_du();
    let u0 = mode.u[0].norm();
    let du0 = mode.du[0].norm();
    let u_vanishes = u0 < tol.sym * sup_u;
    let du_vanishes = du0 < tol.sym * sup_du;
    if u_vanishes == du_vanishes {
        return Err(Error::AmbiguousSymmetry {
            u0: (u0 / sup_u).to_f64().unwrap_or(f64::NAN),
            du0: (du0 / sup_du).to_f64().unwrap_or(f64::NAN),
        });
    }
    let classification = match (edge, u_vanishes) {
        (EdgeKappa::Zero, false) => Parity::Symmetric,
        (EdgeKappa::Zero, true) => Parity::Antisymmetric,
        (EdgeKappa::Pi, true) => Parity::Symmetric,
        (EdgeKappa::Pi, false) => Parity::Antisymmetric,
    };
    // Independent check: u(x) = ± u(1 - x) on the samples.
    let s = match classification {
        Parity::Symmetric => R::one(),
        Parity::Antisymmetric => -R::one(),
    };
    let n = mode.u.len();
    let mut worst = R::zero();
    for j in 0..n {
        let d = (mode.u[j] - mode.u[n - 1 - j].scale(s)).norm();
        worst = worst.max(d);
    }
    if worst > tol.sym * sup_u {
        return Err(Error::AmbiguousSymmetry {
            u0: (u0 / sup_u).to_f64().unwrap_or(f64::NAN),
            du0: (worst / sup_u).to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(EdgeSymmetry {
        kappa_edge: edge,
        classification,
        u_at_0: u0,
        du_at_0: du0,
    })
}

/// Bulk topological index of a gap: +1 if the mode at the gap's lower edge
/// is symmetric, -1 if antisymmetric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BulkIndex {
    pub gap_index: usize,
    pub value: i8,
}

pub fn bulk_index<R: Real>(
    gap: &BandGap<R>,
    lower_edge_mode: &BlochMode<R>,
    tol: &Tolerances<R>,
) -> Result<BulkIndex> {
    let sym = classify_edge_symmetry(lower_edge_mode, tol)?;
    let value = match sym.classification {
        Parity::Symmetric => 1,
        Parity::Antisymmetric => -1,
    };
    Ok(BulkIndex {
        gap_index: gap.index,
        value,
    })
}

/// Quantised Zak phase of a band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZakPhase<R: Real> {
    pub band_index: usize,
    /// Wilson-loop phase reduced to [0, 2π).
    pub theta: R,
    /// Nearest quantised value: 0 or π.
    pub classified: R,
    /// Circular distance from `theta` to `classified`.
    pub residual: R,
}

/// Build the Bloch modes of `band` on a midpoint grid over the Brillouin
/// zone: `kappa_j = -π + 2π (j + 1/2) / n_seg` for an even number of
/// segments `n_seg`. The offset keeps every `kappa_j` away from 0 and ±π,
/// where the cell matrix is non-diagonalisable (or, for a closed gap,
/// degenerate) and the mode family can be discontinuous.
fn brillouin_modes<R: Real>(
    mat: &MaterialView<'_, R>,
    band: &Band<R>,
    n_points: usize,
    n_grid: usize,
    tol: &Tolerances<R>,
) -> Result<Vec<BlochMode<R>>> {
    let mut n_seg = n_points.saturating_sub(1).max(8);
    if n_seg % 2 == 1 {
        n_seg += 1;
    }
    let pi = R::PI();
    let modes: Vec<Result<BlochMode<R>>> = (0..n_seg)
        .into_par_iter()
        .map(|j| {
            let frac = (R::from_usize_(j) + R::lit(0.5)) / R::from_usize_(n_seg);
            let kappa = -pi + R::lit(2.0) * pi * frac;
            let omega = solve_omega_on_band(mat, band, kappa.abs(), tol)?;
            bloch_mode(mat, kappa, omega, n_grid, tol)
        })
        .collect();
    modes.into_iter().collect()
}

/// Wilson-loop phase of an ordered closed chain of modes (the overlap chain
/// is closed with the first mode). Returns the phase reduced to [0, 2π).
pub fn wilson_loop_theta<R: Real>(modes: &[BlochMode<R>]) -> R {
    let n = modes.len();
    let mut theta = R::zero();
    for j in 0..n {
        let a = &modes[j];
        let b = &modes[(j + 1) % n];
        let ov = overlap(a, b);
        theta = theta - ov.arg();
    }
    let two_pi = R::lit(2.0) * R::PI();
    let mut t = theta % two_pi;
    if t < R::zero() {
        t = t + two_pi;
    }
    t
}

fn circular_distance<R: Real>(a: R, b: R) -> R {
    let two_pi = R::lit(2.0) * R::PI();
    let mut d = (a - b).abs() % two_pi;
    if d > R::PI() {
        d = two_pi - d;
    }
    d
}

/// Zak phase of a completely resolved band, with a built-in κ-grid
/// convergence check (the grid is doubled and the two phases compared).
pub fn zak_phase<R: Real>(
    mat: &MaterialView<'_, R>,
    band: &Band<R>,
    n_kappa: usize,
    n_grid: usize,
    tol: &Tolerances<R>,
) -> Result<ZakPhase<R>> {
    if !band.is_complete() {
        return Err(Error::InvalidInput(format!(
            "band {} is clipped by the scan window; the Wilson loop needs both edges",
            band.index
        )));
    }
    let n_kappa = n_kappa.max(9);
    let coarse = wilson_loop_theta(&brillouin_modes(mat, band, n_kappa, n_grid, tol)?);
    let fine_points = 2 * (n_kappa - 1) + 1;
    let fine = wilson_loop_theta(&brillouin_modes(mat, band, fine_points, n_grid, tol)?);
    let drift = circular_distance(coarse, fine);
    if drift > R::lit(1e-3) {
        return Err(Error::NonConvergent {
            delta: drift.to_f64().unwrap_or(f64::NAN),
        });
    }
    let theta = fine;
    let pi = R::PI();
    let (classified, residual) = {
        let d0 = circular_distance(theta, R::zero());
        let dpi = circular_distance(theta, pi);
        if d0 <= dpi {
            (R::zero(), d0)
        } else {
            (pi, dpi)
        }
    };
    Ok(ZakPhase {
        band_index: band.index,
        theta,
        classified,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::{PermittivityModel, Structure, UnitCell};
    use crate::spectrum::{band_gaps, scan_bands};
    use approx::assert_relative_eq;

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    fn homogeneous() -> Structure<f64> {
        Structure::new(
            UnitCell::from_pairs("A", &[(1.0, 1)]).unwrap(),
            UnitCell::from_pairs("B", &[(1.0, 1)]).unwrap(),
            PermittivityModel::constant(1.0),
            PermittivityModel::constant(1.0),
            1.0,
        )
        .unwrap()
    }

    fn fig_structure() -> Structure<f64> {
        Structure::new(
            UnitCell::from_pairs("A", &[(0.1, 1), (0.25, 2), (0.3, 1), (0.25, 2), (0.1, 1)])
                .unwrap(),
            UnitCell::from_pairs("B", &[(0.15, 1), (0.25, 2), (0.2, 1), (0.25, 2), (0.15, 1)])
                .unwrap(),
            PermittivityModel::new(1.0, 2.0, 1.0),
            PermittivityModel::new(1.0, 1.0, 0.5),
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn homogeneous_mode_is_a_plane_wave() {
        let s = homogeneous();
        let m = bloch_mode(&s.material_a(), 1.0, 1.0, 256, &tol()).unwrap();
        // u(x) should be proportional to e^{ix}; divide out the phase at 0.
        let scale = m.u[0];
        for (j, &x) in m.grid.iter().enumerate() {
            let expect = Complex::new(x.cos(), x.sin()) * scale;
            assert!((m.u[j] - expect).norm() < 1e-9);
        }
        // Unit norm under the mu0 inner product; |u| = 1 everywhere.
        assert_relative_eq!(m.u[0].norm(), 1.0, max_relative = 1e-9);
    }

    #[test]
    fn floquet_residual_is_small() {
        let s = fig_structure();
        let mat = s.material_a();
        let bands = scan_bands(&mat, (0.0, 0.99), 4000, 16, &tol()).unwrap();
        let band = &bands[0];
        for frac in [0.25, 0.5, 0.75] {
            let kappa = std::f64::consts::PI * frac;
            let omega = solve_omega_on_band(&mat, band, kappa, &tol()).unwrap();
            let m = bloch_mode(&mat, kappa, omega, 512, &tol()).unwrap();
            assert!(floquet_residual(&mat, &m, &tol()).unwrap() < 1e-8);
        }
    }

    #[test]
    fn edge_modes_are_real_with_unit_multiplier() {
        let s = fig_structure();
        let mat = s.material_a();
        let bands = scan_bands(&mat, (0.0, 0.99), 4000, 16, &tol()).unwrap();
        let band = &bands[0];
        let omega_pi = band.omega_at_kappa_pi().unwrap();
        let m = edge_mode(&mat, EdgeKappa::Pi, omega_pi, 512, &tol()).unwrap();
        assert!(m.u.iter().all(|z| z.im == 0.0));
        assert!(floquet_residual(&mat, &m, &tol()).unwrap() < 1e-6);
        // Exactly one of u(0), u'(0) vanishes after normalisation.
        let u0 = m.u[0].norm() / m.sup_u();
        let du0 = m.du[0].norm() / m.sup_du();
        assert!(
            (u0 < 1e-6) != (du0 < 1e-6),
            "u0 = {u0:.2e}, du0 = {du0:.2e}"
        );
    }

    #[test]
    fn interior_constructor_rejects_edges() {
        let s = fig_structure();
        let mat = s.material_a();
        let bands = scan_bands(&mat, (0.0, 0.99), 4000, 16, &tol()).unwrap();
        let omega_pi = bands[0].omega_at_kappa_pi().unwrap();
        assert!(matches!(
            bloch_mode(&mat, std::f64::consts::PI, omega_pi, 128, &tol()),
            Err(Error::DegenerateEdge { .. })
        ));
        assert!(matches!(
            bloch_mode(&mat, 1.0, omega_pi, 128, &tol()),
            Err(Error::NotOnBand { .. })
        ));
    }

    #[test]
    fn edge_symmetry_dichotomy_on_fixture() {
        let s = fig_structure();
        for mat in [s.material_a(), s.material_b()] {
            let bands = scan_bands(&mat, (0.0, 0.99), 4000, 16, &tol()).unwrap();
            let report = band_gaps(&bands);
            for gap in &report.gaps {
                let edge = gap.edge_kappa;
                let m = edge_mode(&mat, edge, gap.lower, 1024, &tol()).unwrap();
                let sym = classify_edge_symmetry(&m, &tol()).unwrap();
                assert_eq!(sym.kappa_edge, edge);
            }
        }
    }

    #[test]
    fn sigma_perturbed_edge_mode_is_ambiguous() {
        let s = fig_structure().apply_sigma_perturbation(0.03).unwrap();
        let mat = s.material_a();
        let bands = scan_bands(&mat, (0.0, 0.99), 4000, 16, &tol()).unwrap();
        let report = band_gaps(&bands);
        let gap = &report.gaps[0];
        let m = edge_mode(&mat, gap.edge_kappa, gap.lower, 1024, &tol()).unwrap();
        assert!(matches!(
            classify_edge_symmetry(&m, &tol()),
            Err(Error::AmbiguousSymmetry { .. })
        ));
    }

    #[test]
    fn wilson_loop_is_gauge_invariant() {
        let s = fig_structure();
        let mat = s.material_a();
        let bands = scan_bands(&mat, (0.0, 0.99), 4000, 16, &tol()).unwrap();
        let modes = brillouin_modes(&mat, &bands[0], 41, 256, &tol()).unwrap();
        let theta = wilson_loop_theta(&modes);
        // Multiply every mode by a deterministic pseudo-random phase.
        let mut state = 0x9e3779b97f4a7c15u64;
        let noisy: Vec<_> = modes
            .iter()
            .map(|m| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let phi = (state >> 11) as f64 / (1u64 << 53) as f64 * std::f64::consts::TAU;
                m.clone().with_phase(Complex::new(phi.cos(), phi.sin()))
            })
            .collect();
        let theta_noisy = wilson_loop_theta(&noisy);
        assert!(circular_distance(theta, theta_noisy) < 1e-10);
    }

    #[test]
    fn phase_redefinition_shifts_by_full_turns() {
        let s = fig_structure();
        let mat = s.material_a();
        let bands = scan_bands(&mat, (0.0, 0.99), 4000, 16, &tol()).unwrap();
        let modes = brillouin_modes(&mat, &bands[0], 41, 256, &tol()).unwrap();
        let theta = wilson_loop_theta(&modes);
        let zeta = 2i32;
        let twisted: Vec<_> = modes
            .iter()
            .map(|m| {
                let phi = zeta as f64 * m.kappa;
                m.clone().with_phase(Complex::new(phi.cos(), phi.sin()))
            })
            .collect();
        let theta_twisted = wilson_loop_theta(&twisted);
        assert!(circular_distance(theta, theta_twisted) < 1e-9);
    }

    #[test]
    fn homogeneous_zak_phase_is_trivial() {
        let s = homogeneous();
        let mat = s.material_a();
        // The window must contain one full folded band, [pi, 2 pi].
        let bands = scan_bands(&mat, (0.1, 7.0), 3000, 16, &tol()).unwrap();
        let full: Vec<_> = bands.iter().filter(|b| b.is_complete()).collect();
        assert!(!full.is_empty());
        let z = zak_phase(&mat, full[0], 101, 512, &tol()).unwrap();
        assert_eq!(z.classified, 0.0);
        assert!(z.residual < 1e-2 * std::f64::consts::PI);
    }

    #[test]
    fn fixture_zak_phases_quantise() {
        let s = fig_structure();
        for mat in [s.material_a(), s.material_b()] {
            let bands = scan_bands(&mat, (0.0, 0.99), 4000, 16, &tol()).unwrap();
            let z = zak_phase(&mat, &bands[0], 201, 512, &tol()).unwrap();
            assert!(
                z.residual < 1e-2 * std::f64::consts::PI,
                "band 1 of {} has residual {}",
                bands[0].material,
                z.residual
            );
        }
    }
}
