//! Independent finite-difference reference solver.
//!
//! Used exclusively for cross-validation: it never touches the transfer
//! matrix machinery. The operator `-(1/mu0) d/dx((1/eps) du/dx)` is
//! discretised in flux form on a grid aligned with the layer boundaries
//! (each layer gets `ceil(len * N)` intervals), which preserves the
//! continuity of `(1/eps) u'` at material jumps discretely. The matrix is a
//! Hermitian tridiagonal with a Bloch-phase corner for the periodic problem,
//! or a real symmetric tridiagonal for the clamped finite structure.
//!
//! The dispersive eigenproblem `L(omega) u = omega^2 u` is nonlinear in
//! `omega`. Since `d eps/d omega >= 0` makes every eigenvalue branch
//! `lambda_j(omega)` non-increasing while `omega^2` increases, the count
//! `nu(omega) = #{lambda_j(omega) < omega^2}` is a non-decreasing integer
//! function whose unit jumps are exactly the self-consistent roots. Roots
//! are therefore located by recursive bisection on `nu`, which is immune to
//! eigenvalue-branch bookkeeping; a jump of two or more that refuses to
//! split is reported as a branch crossing.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::materials::{MaterialView, Species, Structure};
use crate::real::Real;
use crate::tol::Tolerances;

/// How to place grid nodes relative to the layer boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridSpec {
    /// Nodes at every layer boundary; faces never straddle a jump.
    Aligned,
    /// Uniform grid regardless of the layers; face coefficients use the
    /// exact integral of eps over each face interval.
    Uniform,
}

/// Geometry of the discretisation, independent of frequency.
#[derive(Debug, Clone)]
struct OracleGrid<R: Real> {
    /// Face data: width plus the lengths covered by each species.
    faces: Vec<Face<R>>,
    /// Node weights (dual-cell widths).
    w: Vec<R>,
    /// Node coordinates.
    x: Vec<R>,
    cyclic: bool,
}

#[derive(Debug, Clone, Copy)]
struct Face<R: Real> {
    h: R,
    len1: R,
    len2: R,
}

impl<R: Real> Face<R> {
    /// Flux coefficient `a/h` with `a = h / ∫ eps dx` over the face.
    fn coeff(&self, eps1: R, eps2: R) -> R {
        let integral = self.len1 * eps1 + self.len2 * eps2;
        R::one() / integral
    }
}

/// Piecewise-constant layout: (start, end, species).
fn layout_of_layers<R: Real>(layers: &[(R, Species)], x0: R) -> Vec<(R, R, Species)> {
    let mut out = Vec::with_capacity(layers.len());
    let mut x = x0;
    for &(len, s) in layers {
        out.push((x, x + len, s));
        x = x + len;
    }
    out
}

/// Species lengths covered by `[a, b]` within the layout.
fn species_cover<R: Real>(layout: &[(R, R, Species)], a: R, b: R) -> (R, R) {
    let mut l1 = R::zero();
    let mut l2 = R::zero();
    for &(s, e, sp) in layout {
        let lo = a.max(s);
        let hi = b.min(e);
        if hi > lo {
            match sp {
                Species::One => l1 = l1 + (hi - lo),
                Species::Two => l2 = l2 + (hi - lo),
            }
        }
    }
    (l1, l2)
}

impl<R: Real> OracleGrid<R> {
    /// Grid over the layout; `n_per_unit` target intervals per unit length.
    fn build(layout: &[(R, R, Species)], n_per_unit: usize, spec: GridSpec, cyclic: bool) -> Self {
        let x_start = layout[0].0;
        let x_end = layout.last().unwrap().1;
        let total = x_end - x_start;
        let mut nodes = vec![x_start];
        match spec {
            GridSpec::Aligned => {
                for &(s, e, _) in layout {
                    let len = e - s;
                    let n_sub = (len * R::from_usize_(n_per_unit))
                        .ceil()
                        .to_usize()
                        .unwrap_or(1)
                        .max(1);
                    for j in 1..=n_sub {
                        nodes.push(s + len * R::from_usize_(j) / R::from_usize_(n_sub));
                    }
                }
            }
            GridSpec::Uniform => {
                let n_sub = (total * R::from_usize_(n_per_unit))
                    .ceil()
                    .to_usize()
                    .unwrap_or(1)
                    .max(2);
                for j in 1..=n_sub {
                    nodes.push(x_start + total * R::from_usize_(j) / R::from_usize_(n_sub));
                }
            }
        }
        let n_faces = nodes.len() - 1;
        let mut faces = Vec::with_capacity(n_faces);
        for i in 0..n_faces {
            let (a, b) = (nodes[i], nodes[i + 1]);
            let (l1, l2) = species_cover(layout, a, b);
            faces.push(Face {
                h: b - a,
                len1: l1,
                len2: l2,
            });
        }
        if cyclic {
            // Unknowns: nodes 0 .. n_faces-1 (the last node is the first of
            // the next period). Face i couples node i to node i+1 mod M.
            let m = n_faces;
            let mut w = Vec::with_capacity(m);
            for i in 0..m {
                let prev = if i == 0 { m - 1 } else { i - 1 };
                w.push((faces[prev].h + faces[i].h) * R::lit(0.5));
            }
            let x = nodes[..m].to_vec();
            Self {
                faces,
                w,
                x,
                cyclic: true,
            }
        } else {
            // Dirichlet: unknowns are the interior nodes 1 .. len-2.
            let m = nodes.len() - 2;
            let mut w = Vec::with_capacity(m);
            for i in 1..=m {
                w.push((faces[i - 1].h + faces[i].h) * R::lit(0.5));
            }
            let x = nodes[1..=m].to_vec();
            Self {
                faces,
                w,
                x,
                cyclic: false,
            }
        }
    }

    fn size(&self) -> usize {
        self.x.len()
    }
}

/// The assembled operator at one probe frequency.
#[derive(Debug, Clone)]
pub struct DiscreteOperator<R: Real> {
    pub kappa: R,
    pub omega_probe: R,
    mu0: R,
    grid: OracleGrid<R>,
    /// Flux coefficients `a/h` per face at the probe frequency.
    cflux: Vec<R>,
}

impl<R: Real> DiscreteOperator<R> {
    fn assemble(
        grid: &OracleGrid<R>,
        kappa: R,
        omega: R,
        eps1: R,
        eps2: R,
        mu0: R,
    ) -> Self {
        let cflux = grid.faces.iter().map(|f| f.coeff(eps1, eps2)).collect();
        Self {
            kappa,
            omega_probe: omega,
            mu0,
            grid: grid.clone(),
            cflux,
        }
    }

    /// Bloch operator of one unit cell.
    pub fn assemble_bloch(
        mat: &MaterialView<'_, R>,
        kappa: R,
        omega: R,
        n: usize,
        spec: GridSpec,
        tol: &Tolerances<R>,
    ) -> Result<Self> {
        let layers: Vec<(R, Species)> = mat
            .cell
            .layers()
            .iter()
            .map(|l| (l.len, l.species))
            .collect();
        let layout = layout_of_layers(&layers, R::zero());
        let grid = OracleGrid::build(&layout, n, spec, true);
        let eps1 = mat.eps1.eval_with(omega, tol.eta_pole)?;
        let eps2 = mat.eps2.eval_with(omega, tol.eta_pole)?;
        Ok(Self::assemble(&grid, kappa, omega, eps1, eps2, mat.mu0))
    }

    pub fn size(&self) -> usize {
        self.grid.size()
    }

    pub fn node_positions(&self) -> &[R] {
        &self.grid.x
    }

    /// Apply the raw (non-symmetrised) operator to a complex vector, using
    /// the Bloch-twisted wraparound. This is the reference arithmetic the
    /// Hermiticity check exercises.
    pub fn apply_raw(&self, v: &[Complex<R>]) -> Vec<Complex<R>> {
        let m = self.grid.size();
        assert_eq!(v.len(), m);
        let zero = Complex::new(R::zero(), R::zero());
        let phase = Complex::new(self.kappa.cos(), self.kappa.sin());
        let mut out = vec![zero; m];
        for i in 0..m {
            // Left/right neighbours and face coefficients. On the cyclic
            // grid face i couples node i to node i+1 (face m-1 wraps with
            // the Bloch phase); on the Dirichlet grid unknown i sits between
            // faces i and i+1 and the boundary values vanish.
            let (c_left, left, c_right, right) = if self.grid.cyclic {
                let left = if i > 0 { v[i - 1] } else { v[m - 1] * phase.conj() };
                let right = if i + 1 < m { v[i + 1] } else { v[0] * phase };
                let c_left = if i > 0 { self.cflux[i - 1] } else { self.cflux[m - 1] };
                (c_left, left, self.cflux[i], right)
            } else {
                let left = if i > 0 { v[i - 1] } else { zero };
                let right = if i + 1 < m { v[i + 1] } else { zero };
                (self.cflux[i], left, self.cflux[i + 1], right)
            };
            let flux_right = (right - v[i]).scale(c_right);
            let flux_left = (v[i] - left).scale(c_left);
            out[i] = (flux_left - flux_right).scale((self.mu0 * self.grid.w[i]).recip());
        }
        out
    }

    /// Weighted inner product `<a, b> = sum mu0 w_i a_i conj(b_i)`.
    pub fn inner(&self, a: &[Complex<R>], b: &[Complex<R>]) -> Complex<R> {
        let mut acc = Complex::new(R::zero(), R::zero());
        for i in 0..a.len() {
            acc = acc + (a[i] * b[i].conj()).scale(self.mu0 * self.grid.w[i]);
        }
        acc
    }

    /// Symmetrised Hermitian tridiagonal (plus Bloch corner) similar to the
    /// raw operator.
    fn to_tridiag(&self) -> HermitianCyclic<R> {
        let m = self.grid.size();
        let mu0 = self.mu0;
        let w = &self.grid.w;
        let mut diag = Vec::with_capacity(m);
        let mut off = Vec::with_capacity(m.saturating_sub(1));
        if self.grid.cyclic {
            for i in 0..m {
                let prev = if i == 0 { m - 1 } else { i - 1 };
                diag.push((self.cflux[prev] + self.cflux[i]) / (mu0 * w[i]));
            }
            for i in 0..m - 1 {
                off.push(Complex::new(
                    -self.cflux[i] / (mu0 * (w[i] * w[i + 1]).sqrt()),
                    R::zero(),
                ));
            }
            let c = -self.cflux[m - 1] / (mu0 * (w[m - 1] * w[0]).sqrt());
            let corner = Complex::new(c * self.kappa.cos(), c * self.kappa.sin());
            HermitianCyclic { diag, off, corner }
        } else {
            for i in 0..m {
                diag.push((self.cflux[i] + self.cflux[i + 1]) / (mu0 * w[i]));
            }
            for i in 0..m - 1 {
                off.push(Complex::new(
                    -self.cflux[i + 1] / (mu0 * (w[i] * w[i + 1]).sqrt()),
                    R::zero(),
                ));
            }
            HermitianCyclic {
                diag,
                off,
                corner: Complex::new(R::zero(), R::zero()),
            }
        }
    }

    /// j-th smallest eigenvalue (0-based) of the operator at the probe
    /// frequency.
    pub fn eigenvalue(&self, j: usize) -> R {
        let t = self.to_tridiag();
        t.eigenvalue_by_index(j)
    }

    /// Number of eigenvalues strictly below `t`.
    pub fn count_below(&self, t: R) -> usize {
        self.to_tridiag().neg_count(t)
    }

    /// Eigenvector for the eigenvalue nearest `lambda` (inverse iteration).
    pub fn eigenvector_near(&self, lambda: R) -> Vec<Complex<R>> {
        let t = self.to_tridiag();
        let mut v = t.inverse_iteration(lambda);
        // Undo the symmetrisation scaling: u_i = (w_i)^{-1/2} y_i.
        for (i, z) in v.iter_mut().enumerate() {
            *z = z.scale(self.grid.w[i].sqrt().recip());
        }
        // Normalise under the weighted inner product.
        let n = self.inner(&v, &v).re.sqrt();
        for z in &mut v {
            *z = z.scale(n.recip());
        }
        v
    }
}

/// Hermitian matrix: real diagonal, complex sub/super diagonal, and a
/// Bloch corner linking the last node to the first.
struct HermitianCyclic<R: Real> {
    diag: Vec<R>,
    off: Vec<Complex<R>>,
    corner: Complex<R>,
}

impl<R: Real> HermitianCyclic<R> {
    /// Inertia count: eigenvalues strictly below `t`, via a bordered LDL*
    /// elimination whose pivot signs obey Sylvester's law.
    fn neg_count(&self, t: R) -> usize {
        let m = self.diag.len();
        assert!(m >= 3);
        let scale = self
            .diag
            .iter()
            .fold(R::zero(), |s, d| s.max(d.abs()))
            .max(self.off.iter().fold(R::zero(), |s, e| s.max(e.norm())))
            .max(self.corner.norm())
            .max(t.abs());
        let tiny = scale * R::epsilon() * R::lit(1e-8) + R::min_positive_value();
        let mut count = 0usize;
        let mut cur = self.diag[0] - t;
        let mut g = self.corner.conj(); // coupling of chain node to last node
        let mut border = self.diag[m - 1] - t;
        for i in 0..m - 1 {
            let mut p = cur;
            if p.abs() < tiny {
                p = -tiny;
            }
            if p < R::zero() {
                count += 1;
            }
            if i < m - 2 {
                let e = self.off[i];
                cur = (self.diag[i + 1] - t) - e.norm_sqr() / p;
                border = border - g.norm_sqr() / p;
                g = -(e.conj() * g).scale(p.recip());
            } else {
                let h = self.off[m - 2] + g;
                border = border - h.norm_sqr() / p;
            }
        }
        if border < R::zero() {
            count += 1;
        }
        count
    }

    /// Gershgorin bounds on the spectrum.
    fn bounds(&self) -> (R, R) {
        let m = self.diag.len();
        let mut lo = R::infinity();
        let mut hi = R::neg_infinity();
        for i in 0..m {
            let mut r = R::zero();
            if i > 0 {
                r = r + self.off[i - 1].norm();
            }
            if i < m - 1 {
                r = r + self.off[i].norm();
            }
            if i == 0 || i == m - 1 {
                r = r + self.corner.norm();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// j-th smallest eigenvalue (0-based) by count bisection.
    fn eigenvalue_by_index(&self, j: usize) -> R {
        let (mut lo, mut hi) = self.bounds();
        for _ in 0..200 {
            let mid = (lo + hi) * R::lit(0.5);
            if hi - lo <= R::epsilon() * R::lit(8.0) * R::one().max(mid.abs()) {
                break;
            }
            if self.neg_count(mid) > j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        (lo + hi) * R::lit(0.5)
    }

    /// Inverse iteration for the eigenvector nearest `lambda`. Cyclic solves
    /// go through Sherman-Morrison over a tridiagonal LU.
    fn inverse_iteration(&self, lambda: R) -> Vec<Complex<R>> {
        let m = self.diag.len();
        // Small relative shift keeps the solve finite at an exact eigenvalue.
        let shift = lambda + lambda.abs().max(R::one()) * R::lit(1e-11);
        let mut v: Vec<Complex<R>> = (0..m)
            .map(|i| {
                let x = R::from_usize_(i) / R::from_usize_(m);
                Complex::new((x * R::lit(12.9898)).sin(), (x * R::lit(78.233)).cos())
            })
            .collect();
        for _ in 0..4 {
            v = self.solve_shifted(shift, &v);
            let norm = v.iter().fold(R::zero(), |s, z| s + z.norm_sqr()).sqrt();
            for z in &mut v {
                *z = z.scale(norm.recip());
            }
        }
        v
    }

    /// Solve (H - shift I) x = b.
    fn solve_shifted(&self, shift: R, b: &[Complex<R>]) -> Vec<Complex<R>> {
        let m = self.diag.len();
        let zero = Complex::new(R::zero(), R::zero());
        if self.corner.norm() == R::zero() {
            return self.solve_tridiag(shift, b, zero, zero);
        }
        // Sherman-Morrison: H - shift = T' + u v^T with
        // u = (gamma, 0, ..., corner)^T, v = (1, 0, ..., conj(corner)/gamma)^T.
        let gamma = Complex::new(-(self.diag[0] - shift), R::zero());
        let u0 = gamma;
        let um = self.corner;
        let v0 = Complex::new(R::one(), R::zero());
        let vm = self.corner.conj() / gamma;
        // T' adjustments to first and last diagonal entries.
        let d0_adj = -gamma;
        let dm_adj = -(um * vm);
        let y = self.solve_tridiag_adj(shift, b, d0_adj, dm_adj);
        let mut ucol = vec![zero; m];
        ucol[0] = u0;
        ucol[m - 1] = um;
        let z = self.solve_tridiag_adj(shift, &ucol, d0_adj, dm_adj);
        let vy = y[0] * v0 + y[m - 1] * vm;
        let vz = z[0] * v0 + z[m - 1] * vm;
        let factor = vy / (Complex::new(R::one(), R::zero()) + vz);
        (0..m).map(|i| y[i] - z[i] * factor).collect()
    }

    fn solve_tridiag(
        &self,
        shift: R,
        b: &[Complex<R>],
        d0_adj: Complex<R>,
        dm_adj: Complex<R>,
    ) -> Vec<Complex<R>> {
        self.solve_tridiag_adj(shift, b, d0_adj, dm_adj)
    }

    /// Thomas solve of the tridiagonal part with diagonal adjustments at the
    /// ends (used by the Sherman-Morrison splitting).
    fn solve_tridiag_adj(
        &self,
        shift: R,
        b: &[Complex<R>],
        d0_adj: Complex<R>,
        dm_adj: Complex<R>,
    ) -> Vec<Complex<R>> {
        let m = self.diag.len();
        let mut c_prime = vec![Complex::new(R::zero(), R::zero()); m];
        let mut d_prime = vec![Complex::new(R::zero(), R::zero()); m];
        let dval = |i: usize| {
            let mut d = Complex::new(self.diag[i] - shift, R::zero());
            if i == 0 {
                d = d + d0_adj;
            }
            if i == m - 1 {
                d = d + dm_adj;
            }
            d
        };
        let tiny = Complex::new(R::min_positive_value() * R::lit(1e10), R::zero());
        let mut denom = dval(0);
        if denom.norm() == R::zero() {
            denom = tiny;
        }
        c_prime[0] = self.off[0] / denom;
        d_prime[0] = b[0] / denom;
        for i in 1..m {
            let lower = self.off[i - 1].conj();
            let mut den = dval(i) - lower * c_prime[i - 1];
            if den.norm() == R::zero() {
                den = tiny;
            }
            if i < m - 1 {
                c_prime[i] = self.off[i] / den;
            }
            d_prime[i] = (b[i] - lower * d_prime[i - 1]) / den;
        }
        let mut x = vec![Complex::new(R::zero(), R::zero()); m];
        x[m - 1] = d_prime[m - 1];
        for i in (0..m - 1).rev() {
            x[i] = d_prime[i] - c_prime[i] * x[i + 1];
        }
        x
    }
}

/// Count of operator eigenvalues below `omega^2` at probe frequency `omega`.
fn nu_bloch<R: Real>(
    mat: &MaterialView<'_, R>,
    grid: &OracleGrid<R>,
    kappa: R,
    omega: R,
    tol: &Tolerances<R>,
) -> Result<usize> {
    let eps1 = mat.eps1.eval_with(omega, tol.eta_pole)?;
    let eps2 = mat.eps2.eval_with(omega, tol.eta_pole)?;
    let op = DiscreteOperator::assemble(grid, kappa, omega, eps1, eps2, mat.mu0);
    Ok(op.count_below(omega * omega))
}

/// Locate every unit jump of the monotone integer function `nu` in
/// `[lo, hi]` by recursive bisection.
fn refine_jumps<R: Real, F: FnMut(R) -> Result<usize>>(
    nu: &mut F,
    lo: R,
    lo_count: usize,
    hi: R,
    hi_count: usize,
    rel_tol: R,
    out: &mut Vec<R>,
) -> Result<()> {
    if hi_count <= lo_count {
        return Ok(());
    }
    let mid = (lo + hi) * R::lit(0.5);
    if hi - lo <= rel_tol * R::one().max(mid.abs()) {
        if hi_count - lo_count == 1 {
            out.push(mid);
            return Ok(());
        }
        return Err(Error::BranchCrossing {
            omega: mid.to_f64().unwrap_or(f64::NAN),
        });
    }
    let mid_count = nu(mid)?;
    refine_jumps(nu, lo, lo_count, mid, mid_count, rel_tol, out)?;
    refine_jumps(nu, mid, mid_count, hi, hi_count, rel_tol, out)
}

/// Self-consistent Bloch eigenfrequencies of one material at quasimomentum
/// `kappa` inside `omega_window`, on an aligned grid with `n` intervals per
/// unit length.
pub fn oracle_band_frequencies<R: Real>(
    mat: &MaterialView<'_, R>,
    kappa: R,
    omega_window: (R, R),
    n: usize,
    tol: &Tolerances<R>,
) -> Result<Vec<R>> {
    oracle_band_frequencies_with(mat, kappa, omega_window, n, GridSpec::Aligned, tol)
}

pub fn oracle_band_frequencies_with<R: Real>(
    mat: &MaterialView<'_, R>,
    kappa: R,
    omega_window: (R, R),
    n: usize,
    spec: GridSpec,
    tol: &Tolerances<R>,
) -> Result<Vec<R>> {
    let layers: Vec<(R, Species)> = mat
        .cell
        .layers()
        .iter()
        .map(|l| (l.len, l.species))
        .collect();
    let layout = layout_of_layers(&layers, R::zero());
    let grid = OracleGrid::build(&layout, n, spec, true);
    let mut roots = Vec::new();
    for (lo, hi) in crate::spectrum::split_window_for(mat, omega_window.0, omega_window.1, tol)? {
        let mut nu = |omega: R| nu_bloch(mat, &grid, kappa, omega, tol);
        let c_lo = nu(lo)?;
        let c_hi = nu(hi)?;
        refine_jumps(&mut nu, lo, c_lo, hi, c_hi, tol.root_rel, &mut roots)?;
    }
    Ok(roots)
}

/// Bloch eigenvector at a self-consistent `(kappa, omega)` point, sampled on
/// the aligned grid. Returns node positions and the normalised field.
pub fn oracle_bloch_mode<R: Real>(
    mat: &MaterialView<'_, R>,
    kappa: R,
    omega: R,
    n: usize,
    tol: &Tolerances<R>,
) -> Result<(Vec<R>, Vec<Complex<R>>)> {
    let op = {
        DiscreteOperator::assemble_bloch(mat, kappa, omega, n, GridSpec::Aligned, tol)?
    };
    let v = op.eigenvector_near(omega * omega);
    Ok((op.node_positions().to_vec(), v))
}

/// Half-width (in cells) of the window the localisation score integrates
/// over. Three cells per side keeps interface modes with per-cell decay
/// factors up to ~0.85 above the 0.5 threshold, while extended states over
/// many tens of cells score far lower.
fn score_window<R: Real>() -> R {
    R::lit(3.0)
}

/// Spectrum of a clamped finite structure of `2 n_cells_per_side` cells with
/// the interface at `x = 0`, restricted to `omega_window`. Returns each
/// self-consistent frequency with its localisation score: the fraction of
/// weighted mode power within three cells of the interface.
pub fn oracle_finite_interface<R: Real>(
    structure: &Structure<R>,
    n_cells_per_side: usize,
    omega_window: (R, R),
    n_per_cell: usize,
    tol: &Tolerances<R>,
) -> Result<Vec<(R, R)>> {
    let layout = finite_layout(structure, n_cells_per_side);
    let grid = OracleGrid::build(&layout, n_per_cell, GridSpec::Aligned, false);
    let mat = structure.material_a(); // species models are shared
    let mut roots = Vec::new();
    for (lo, hi) in
        crate::spectrum::split_window_for(&mat, omega_window.0, omega_window.1, tol)?
    {
        let mut nu = |omega: R| -> Result<usize> {
            let eps1 = structure.eps1.eval_with(omega, tol.eta_pole)?;
            let eps2 = structure.eps2.eval_with(omega, tol.eta_pole)?;
            let op = DiscreteOperator::assemble(&grid, R::zero(), omega, eps1, eps2, structure.mu0);
            Ok(op.count_below(omega * omega))
        };
        let c_lo = nu(lo)?;
        let c_hi = nu(hi)?;
        refine_jumps(&mut nu, lo, c_lo, hi, c_hi, tol.root_rel, &mut roots)?;
    }
    let mut out = Vec::with_capacity(roots.len());
    for omega in roots {
        let eps1 = structure.eps1.eval_with(omega, tol.eta_pole)?;
        let eps2 = structure.eps2.eval_with(omega, tol.eta_pole)?;
        let op = DiscreteOperator::assemble(&grid, R::zero(), omega, eps1, eps2, structure.mu0);
        let v = op.eigenvector_near(omega * omega);
        let mut core = R::zero();
        let mut total = R::zero();
        for (i, &x) in op.node_positions().iter().enumerate() {
            let p = v[i].norm_sqr() * grid.w[i];
            total = total + p;
            if x.abs() <= score_window() {
                core = core + p;
            }
        }
        out.push((omega, core / total));
    }
    Ok(out)
}

/// Explicit layer sequence of the truncated structure on
/// `[-n_cells, +n_cells]`: A cells carry their outward-stored lists reversed
/// (their lists walk away from the interface), B cells carry theirs as
/// stored.
pub fn finite_layout<R: Real>(
    structure: &Structure<R>,
    n_cells_per_side: usize,
) -> Vec<(R, R, Species)> {
    let mut layers: Vec<(R, Species)> = Vec::new();
    let a_rev = structure.cell_a.reversed();
    for _ in 0..n_cells_per_side {
        for l in a_rev.layers() {
            layers.push((l.len, l.species));
        }
    }
    for _ in 0..n_cells_per_side {
        for l in structure.cell_b.layers() {
            layers.push((l.len, l.species));
        }
    }
    layout_of_layers(&layers, -R::from_usize_(n_cells_per_side))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::{PermittivityModel, UnitCell};
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
    fn plane_wave_dispersion() {
        let s = homogeneous();
        let roots =
            oracle_band_frequencies(&s.material_a(), 1.0, (0.5, 1.5), 800, &tol()).unwrap();
        assert!(!roots.is_empty());
        // omega = kappa for the lowest branch; O(N^-2) accuracy.
        assert_relative_eq!(roots[0], 1.0, epsilon = 1e-4);
    }

    #[test]
    fn hermitian_under_weighted_inner_product() {
        let s = fig_structure();
        let op = DiscreteOperator::assemble_bloch(
            &s.material_a(),
            0.7,
            0.5,
            300,
            GridSpec::Aligned,
            &tol(),
        )
        .unwrap();
        let m = op.size();
        let a: Vec<_> = (0..m)
            .map(|i| Complex::new((i as f64 * 0.1).sin(), (i as f64 * 0.07).cos()))
            .collect();
        let b: Vec<_> = (0..m)
            .map(|i| Complex::new((i as f64 * 0.13).cos(), (i as f64 * 0.05).sin()))
            .collect();
        let la = op.apply_raw(&a);
        let lb = op.apply_raw(&b);
        let lhs = op.inner(&la, &b);
        let rhs = op.inner(&a, &lb);
        assert!(
            (lhs - rhs).norm() < 1e-10 * lhs.norm().max(1.0),
            "defect {:e}",
            (lhs - rhs).norm()
        );
    }

    #[test]
    fn grid_convergence_is_second_order() {
        let s = fig_structure();
        let mat = s.material_a();
        let kappa = std::f64::consts::FRAC_PI_2;
        let root = |n: usize| {
            oracle_band_frequencies(&mat, kappa, (0.1, 0.9), n, &tol()).unwrap()[0]
        };
        let r1 = root(250);
        let r2 = root(500);
        let r3 = root(1000);
        let c0 = (r2 - r1).abs();
        let c1 = (r3 - r2).abs();
        assert!(c1 < c0, "changes should shrink: {c0:e} -> {c1:e}");
        assert!(c1 < 4.0 * c0);
    }

    #[test]
    fn aligned_and_uniform_grids_agree() {
        let s = fig_structure();
        let mat = s.material_a();
        let kappa = 1.0;
        let window = (0.1, 0.9);
        let root =
            |n: usize, spec| oracle_band_frequencies_with(&mat, kappa, window, n, spec, &tol()).unwrap()[0];
        let reference = root(4000, GridSpec::Aligned);
        let uniform_coarse = root(600, GridSpec::Uniform);
        let uniform_fine = root(2400, GridSpec::Uniform);
        assert!(
            (uniform_coarse - reference).abs() < 5e-3,
            "coarse uniform {uniform_coarse} vs reference {reference}"
        );
        // The unaligned grid converges to the same root, if more slowly.
        assert!((uniform_fine - reference).abs() < (uniform_coarse - reference).abs());
    }

    #[test]
    fn no_interface_control_has_no_localised_root() {
        let s = fig_structure();
        let aa = Structure::new(
            s.cell_a.clone(),
            s.cell_a.clone(),
            s.eps1,
            s.eps2,
            s.mu0,
        )
        .unwrap();
        // Use a window inside material A's first gap; computed loosely here
        // via the oracle itself at the two band-edge kappas.
        let top_band1 =
            oracle_band_frequencies(&aa.material_a(), std::f64::consts::PI, (0.5, 0.99), 400, &tol())
                .unwrap();
        assert!(top_band1.len() >= 2);
        let (lo, hi) = (top_band1[0] * 1.001, top_band1[1] * 0.999);
        let roots = oracle_finite_interface(&aa, 8, (lo, hi), 60, &tol()).unwrap();
        for (omega, score) in roots {
            assert!(
                score < 0.3,
                "unexpected localised root at {omega} (score {score})"
            );
        }
    }
}
