//! Band location from the discriminant `f(omega)`.
//!
//! A frequency lies in a spectral band of a periodic material exactly when
//! `|f(omega)| <= 2`, where `f` is the trace of the unit-cell matrix, and the
//! quasimomentum on the band follows from `2 cos(kappa) = f(omega)`. Band
//! edges are the crossings `f = +2` (kappa = 0) and `f = -2` (kappa = pi).
//!
//! Scanning is uniform-grid bracketing plus bisection, with two refinements:
//! the window is split around permittivity poles, and grid-local extrema of
//! `f -/+ 2` are re-examined so that double crossings inside one scan step
//! (narrow gaps) and tangencies (closed gaps) are still resolved.

use serde::Serialize;

use crate::bracket::bisect;
use crate::error::{Error, Result};
use crate::materials::MaterialView;
use crate::real::Real;
use crate::tol::Tolerances;
use crate::xfer::discriminant;

/// Which kappa a band edge sits at, or whether the scan window clipped it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EdgeKind {
    /// `f = +2`: periodic edge.
    Kappa0,
    /// `f = -2`: antiperiodic edge.
    KappaPi,
    /// The window boundary cut through this band; the true edge is outside.
    Clipped,
}

/// Band-edge quasimomentum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EdgeKappa {
    Zero,
    Pi,
}

impl EdgeKappa {
    pub fn value<R: Real>(self) -> R {
        match self {
            EdgeKappa::Zero => R::zero(),
            EdgeKappa::Pi => R::PI(),
        }
    }
}

/// One spectral band resolved inside the scan window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Band<R: Real> {
    /// 1-based order of appearance within the window.
    pub index: usize,
    pub material: String,
    pub omega_lo: R,
    pub omega_hi: R,
    pub lo_kind: EdgeKind,
    pub hi_kind: EdgeKind,
    /// `(kappa, omega)` samples, ascending in kappa, over the part of the
    /// reduced Brillouin zone the window resolves.
    pub samples: Vec<(R, R)>,
}

impl<R: Real> Band<R> {
    pub fn omega_at_kappa0(&self) -> Option<R> {
        match (self.lo_kind, self.hi_kind) {
            (EdgeKind::Kappa0, _) => Some(self.omega_lo),
            (_, EdgeKind::Kappa0) => Some(self.omega_hi),
            _ => None,
        }
    }

    pub fn omega_at_kappa_pi(&self) -> Option<R> {
        match (self.lo_kind, self.hi_kind) {
            (EdgeKind::KappaPi, _) => Some(self.omega_lo),
            (_, EdgeKind::KappaPi) => Some(self.omega_hi),
            _ => None,
        }
    }

    pub fn is_complete(&self) -> bool {
        self.lo_kind != EdgeKind::Clipped && self.hi_kind != EdgeKind::Clipped
    }
}

/// A band gap of a single material.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandGap<R: Real> {
    /// Gap index n: the gap sits between band n and band n+1.
    pub index: usize,
    pub material: String,
    /// Top of band n.
    pub lower: R,
    /// Bottom of band n+1.
    pub upper: R,
    /// Both gap edges sit at the same quasimomentum.
    pub edge_kappa: EdgeKappa,
}

/// Gaps plus the locations of exactly-touching bands that were dropped.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandGapReport<R: Real> {
    pub gaps: Vec<BandGap<R>>,
    pub degenerate_touch_points: Vec<R>,
}

/// Which material contributes an edge of a gap intersection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    A,
    B,
}

/// Nonempty intersection of an A gap with a B gap.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapIntersection<R: Real> {
    pub lower: R,
    pub upper: R,
    pub lower_from: Side,
    pub upper_from: Side,
    pub gap_a: BandGap<R>,
    pub gap_b: BandGap<R>,
}

impl<R: Real> GapIntersection<R> {
    pub fn width(&self) -> R {
        self.upper - self.lower
    }
}

fn two<R: Real>() -> R {
    R::lit(2.0)
}

/// Split `[lo, hi]` into sub-windows that stay clear of the material's
/// pole-exclusion zones.
pub(crate) fn split_window_for<R: Real>(
    mat: &MaterialView<'_, R>,
    lo: R,
    hi: R,
    tol: &Tolerances<R>,
) -> Result<Vec<(R, R)>> {
    // Exclusion half-widths: |1 - beta*omega^2| <= eta around a Lorentz pole
    // maps to roughly omega_p * eta/2 in frequency; around omega = 0 it is
    // eta itself.
    let mut cuts: Vec<(R, R)> = Vec::new();
    for p in mat.poles() {
        let half = if p == R::zero() {
            tol.eta_pole
        } else {
            p * tol.eta_pole
        };
        cuts.push((p - half, p + half));
    }
    let mut windows = vec![(lo, hi)];
    for (cl, ch) in cuts {
        let mut next = Vec::new();
        for (a, b) in windows {
            if ch <= a || cl >= b {
                next.push((a, b));
            } else {
                if cl > a {
                    next.push((a, cl));
                }
                if ch < b {
                    next.push((ch, b));
                }
            }
        }
        windows = next;
    }
    windows.retain(|&(a, b)| b > a);
    if windows.is_empty() {
        return Err(Error::WindowAtPole {
            lo: lo.to_f64().unwrap_or(f64::NAN),
            hi: hi.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(windows)
}

/// Golden-section refinement of an interior extremum of `f` on `[a, b]`.
fn refine_extremum<R: Real, F: FnMut(R) -> R>(mut f: F, a: R, b: R, maximise: bool) -> (R, R) {
    let sign = if maximise { -R::one() } else { R::one() };
    let inv_phi = R::lit(0.618_033_988_749_894_9);
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - (hi - lo) * inv_phi;
    let mut x2 = lo + (hi - lo) * inv_phi;
    let mut f1 = sign * f(x1);
    let mut f2 = sign * f(x2);
    for _ in 0..90 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - (hi - lo) * inv_phi;
            f1 = sign * f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + (hi - lo) * inv_phi;
            f2 = sign * f(x2);
        }
        if hi - lo <= R::lit(1e-14) * R::one().max(hi.abs()) {
            break;
        }
    }
    let x = (lo + hi) * R::lit(0.5);
    let fx = f(x);
    (x, fx)
}

/// How two bands meet at a detected split point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Meeting {
    /// Genuine crossing of the ±2 level (ordinary band edge).
    Crossing(EdgeKind),
    /// `|f| = 2` touched without crossing: a closed (zero-width) gap.
    Tangent(EdgeKind),
    /// `f` turned around close to the level but the scan cannot resolve
    /// whether the gap is open; both abutting bands end unresolved.
    Unresolved,
}

#[derive(Debug, Clone, Copy)]
struct EdgeEvent<R: Real> {
    omega: R,
    meeting: Meeting,
}

/// Threshold on `|f -/+ 2|` below which a same-side extremum counts as an
/// exact tangency (closed gap).
fn eta_touch<R: Real>() -> R {
    R::lit(1e-9)
}

/// Threshold below which a same-side extremum is treated as an unresolved
/// near-degeneracy and the band is split with clipped ends.
fn eta_split<R: Real>() -> R {
    R::lit(1e-4)
}

/// Locate every `f = +/-2` crossing, tangency and near-degenerate turning
/// point inside one pole-free sub-window.
fn find_edges<R: Real>(
    mat: &MaterialView<'_, R>,
    lo: R,
    hi: R,
    n_scan: usize,
    tol: &Tolerances<R>,
) -> Result<Vec<EdgeEvent<R>>> {
    let n = n_scan.max(16);
    let h = (hi - lo) / R::from_usize_(n - 1);
    let mut omegas = Vec::with_capacity(n);
    let mut fvals = Vec::with_capacity(n);
    for i in 0..n {
        let w = if i == n - 1 { hi } else { lo + h * R::from_usize_(i) };
        omegas.push(w);
        fvals.push(discriminant(mat, w, tol)?);
    }

    let mut events: Vec<EdgeEvent<R>> = Vec::new();

    for (kind, level) in [(EdgeKind::Kappa0, two::<R>()), (EdgeKind::KappaPi, -two::<R>())] {
        let g = |w: R| discriminant(mat, w, tol).unwrap_or(R::nan()) - level;
        // Plain sign-change brackets.
        for i in 1..n {
            let ga = fvals[i - 1] - level;
            let gb = fvals[i] - level;
            if ga == R::zero() {
                events.push(EdgeEvent {
                    omega: omegas[i - 1],
                    meeting: Meeting::Crossing(kind),
                });
            } else if (ga > R::zero()) != (gb > R::zero()) {
                let root = bisect(g, omegas[i - 1], omegas[i], ga, gb, tol.root_rel * R::lit(1e-2));
                events.push(EdgeEvent {
                    omega: root,
                    meeting: Meeting::Crossing(kind),
                });
            }
        }
        if fvals[n - 1] - level == R::zero() {
            events.push(EdgeEvent {
                omega: omegas[n - 1],
                meeting: Meeting::Crossing(kind),
            });
        }
        // Same-side grid-local minima of |g|: a double crossing inside one
        // step, a tangency, or a near-degenerate turning point.
        for i in 1..n - 1 {
            let g_prev = fvals[i - 1] - level;
            let g_here = fvals[i] - level;
            let g_next = fvals[i + 1] - level;
            let same_side = (g_prev > R::zero()) == (g_here > R::zero())
                && (g_here > R::zero()) == (g_next > R::zero());
            let local_min_mag = g_here.abs() <= g_prev.abs()
                && g_here.abs() <= g_next.abs()
                && (g_here.abs() < g_prev.abs() || g_here.abs() < g_next.abs());
            if !(same_side && local_min_mag) || g_here == R::zero() {
                continue;
            }
            let maximise = g_here < R::zero();
            let (we, _) = refine_extremum(g, omegas[i - 1], omegas[i + 1], maximise);
            let ge = discriminant(mat, we, tol)? - level;
            if (ge > R::zero()) != (g_here > R::zero()) && ge != R::zero() {
                // Crossed the level twice between the grid points.
                let r1 = bisect(g, omegas[i - 1], we, g_prev, ge, tol.root_rel * R::lit(1e-2));
                let r2 = bisect(g, we, omegas[i + 1], ge, g_next, tol.root_rel * R::lit(1e-2));
                events.push(EdgeEvent {
                    omega: r1,
                    meeting: Meeting::Crossing(kind),
                });
                events.push(EdgeEvent {
                    omega: r2,
                    meeting: Meeting::Crossing(kind),
                });
            } else if ge.abs() <= eta_touch() {
                events.push(EdgeEvent {
                    omega: we,
                    meeting: Meeting::Tangent(kind),
                });
            } else if ge.abs() <= eta_split() {
                events.push(EdgeEvent {
                    omega: we,
                    meeting: Meeting::Unresolved,
                });
            }
        }
    }

    events.sort_by(|a, b| a.omega.partial_cmp(&b.omega).unwrap());
    // Merge duplicate detections of the same point.
    let mut merged: Vec<EdgeEvent<R>> = Vec::new();
    for e in events {
        if let Some(last) = merged.last() {
            if (e.omega - last.omega).abs() <= R::lit(1e-9) * R::one().max(e.omega.abs()) {
                continue;
            }
        }
        merged.push(e);
    }
    Ok(merged)
}

/// Scan `f` over the window and build the list of bands, clipped ones
/// included. Edges are refined to `root_rel`; each band carries `n_kappa`
/// dispersion samples.
pub fn scan_bands<R: Real>(
    mat: &MaterialView<'_, R>,
    omega_window: (R, R),
    n_scan: usize,
    n_kappa: usize,
    tol: &Tolerances<R>,
) -> Result<Vec<Band<R>>> {
    let (lo, hi) = omega_window;
    if !(hi > lo) {
        return Err(Error::InvalidInput(format!(
            "empty scan window [{lo}, {hi}]"
        )));
    }
    let mut bands = Vec::new();
    for (wlo, whi) in split_window_for(mat, lo, hi, tol)? {
        let events = find_edges(mat, wlo, whi, n_scan, tol)?;
        // Partition cuts: each carries the edge kind for the band below and
        // for the band above the cut.
        let mut cuts: Vec<(R, EdgeKind, EdgeKind)> =
            vec![(wlo, EdgeKind::Clipped, EdgeKind::Clipped)];
        for e in &events {
            let (below, above) = match e.meeting {
                Meeting::Crossing(k) | Meeting::Tangent(k) => (k, k),
                Meeting::Unresolved => (EdgeKind::Clipped, EdgeKind::Clipped),
            };
            cuts.push((e.omega, below, above));
        }
        cuts.push((whi, EdgeKind::Clipped, EdgeKind::Clipped));

        for w in cuts.windows(2) {
            let (a, _, a_kind) = w[0];
            let (b, b_kind, _) = w[1];
            if b <= a {
                continue;
            }
            let fmid = discriminant(mat, (a + b) * R::lit(0.5), tol)?;
            if fmid.abs() >= two() {
                continue; // gap interval
            }
            build_band_healed(
                mat, a, a_kind, b, b_kind, n_kappa, n_scan, 0, tol, &mut bands,
            )?;
        }
    }
    for (i, b) in bands.iter_mut().enumerate() {
        b.index = i + 1;
    }
    Ok(bands)
}

/// Build the band on `[a, b]`, splitting recursively at interior turning
/// points of `f` (which signal unresolved degeneracies the scan missed).
#[allow(clippy::too_many_arguments)]
fn build_band_healed<R: Real>(
    mat: &MaterialView<'_, R>,
    a: R,
    a_kind: EdgeKind,
    b: R,
    b_kind: EdgeKind,
    n_kappa: usize,
    n_scan: usize,
    depth: usize,
    tol: &Tolerances<R>,
    out: &mut Vec<Band<R>>,
) -> Result<()> {
    let n_check = 65;
    let mut prev = discriminant(mat, a, tol)?;
    let f_b = discriminant(mat, b, tol)?;
    let rising = f_b > prev;
    let slack = R::lit(1e-11);
    let mut turn: Option<(R, R)> = None;
    let mut x_prev = a;
    for i in 1..n_check {
        let x = a + (b - a) * R::from_usize_(i) / R::from_usize_(n_check - 1);
        let f = discriminant(mat, x, tol)?;
        let against = if rising { f < prev - slack } else { f > prev + slack };
        if against {
            turn = Some((x_prev, x));
            break;
        }
        x_prev = x;
        prev = f;
    }
    if let Some((ta, tb)) = turn {
        if depth >= 6 {
            return Err(Error::UnpairedEdge {
                omega: ((a + b) * R::lit(0.5)).to_f64().unwrap_or(f64::NAN),
                n_scan,
            });
        }
        // Refine the turning point over a widened bracket and classify it.
        let lo = (ta - (tb - ta)).max(a);
        let hi = (tb + (tb - ta)).min(b);
        let (we, fe) = refine_extremum(
            |w| discriminant(mat, w, tol).unwrap_or(R::nan()),
            lo,
            hi,
            !rising,
        );
        let kind = if (fe - two::<R>()).abs() <= tol.edge_residual {
            EdgeKind::Kappa0
        } else if (fe + two::<R>()).abs() <= tol.edge_residual {
            EdgeKind::KappaPi
        } else {
            EdgeKind::Clipped
        };
        build_band_healed(mat, a, a_kind, we, kind, n_kappa, n_scan, depth + 1, tol, out)?;
        build_band_healed(mat, we, kind, b, b_kind, n_kappa, n_scan, depth + 1, tol, out)?;
        return Ok(());
    }
    let band = build_band(mat, 0, a, a_kind, b, b_kind, n_kappa, n_scan, tol)?;
    out.push(band);
    Ok(())
}

fn kappa_of<R: Real>(f: R) -> R {
    (f * R::lit(0.5)).max(-R::one()).min(R::one()).acos()
}

#[allow(clippy::too_many_arguments)]
fn build_band<R: Real>(
    mat: &MaterialView<'_, R>,
    index: usize,
    omega_lo: R,
    lo_kind: EdgeKind,
    omega_hi: R,
    hi_kind: EdgeKind,
    n_kappa: usize,
    n_scan: usize,
    tol: &Tolerances<R>,
) -> Result<Band<R>> {
    let f_lo = discriminant(mat, omega_lo, tol)?;
    let f_hi = discriminant(mat, omega_hi, tol)?;
    let kappa_lo = kappa_of(f_lo);
    let kappa_hi = kappa_of(f_hi);
    let (kappa_min, kappa_max) = if kappa_lo <= kappa_hi {
        (kappa_lo, kappa_hi)
    } else {
        (kappa_hi, kappa_lo)
    };
    let n_kappa = n_kappa.max(2);
    let mut samples = Vec::with_capacity(n_kappa);
    for j in 0..n_kappa {
        let frac = R::from_usize_(j) / R::from_usize_(n_kappa - 1);
        let kappa = kappa_min + (kappa_max - kappa_min) * frac;
        let target = two::<R>() * kappa.cos();
        // The grid endpoints coincide with the band endpoints by
        // construction; interior targets are strictly bracketed when f is
        // monotone on the band, and a failed bracket means the scan missed
        // a degeneracy.
        let omega = if j == 0 || j == n_kappa - 1 {
            if kappa == kappa_lo {
                omega_lo
            } else {
                omega_hi
            }
        } else {
            let ga = f_lo - target;
            let gb = f_hi - target;
            if ga != R::zero() && gb != R::zero() && (ga > R::zero()) == (gb > R::zero()) {
                return Err(Error::UnpairedEdge {
                    omega: ((omega_lo + omega_hi) * R::lit(0.5)).to_f64().unwrap_or(f64::NAN),
                    n_scan,
                });
            }
            // Tighter than the edge tolerance: the discriminant is steep
            // near permittivity poles and the samples must satisfy the
            // dispersion relation to 1e-9 in f, not just 1e-12 in omega.
            bisect(
                |w| discriminant(mat, w, tol).unwrap_or(R::nan()) - target,
                omega_lo,
                omega_hi,
                ga,
                gb,
                tol.root_rel * R::lit(1e-2),
            )
        };
        samples.push((kappa, omega));
    }
    Ok(Band {
        index,
        material: mat.cell.label.clone(),
        omega_lo,
        omega_hi,
        lo_kind,
        hi_kind,
        samples,
    })
}

/// Frequency on `band` at quasimomentum `kappa` (bisection on the
/// dispersion relation).
pub fn solve_omega_on_band<R: Real>(
    mat: &MaterialView<'_, R>,
    band: &Band<R>,
    kappa: R,
    tol: &Tolerances<R>,
) -> Result<R> {
    let target = two::<R>() * kappa.abs().cos();
    let f_lo = discriminant(mat, band.omega_lo, tol)?;
    let f_hi = discriminant(mat, band.omega_hi, tol)?;
    let ga = f_lo - target;
    let gb = f_hi - target;
    if ga == R::zero() {
        return Ok(band.omega_lo);
    }
    if gb == R::zero() {
        return Ok(band.omega_hi);
    }
    if (ga > R::zero()) == (gb > R::zero()) {
        return Err(Error::NotOnBand {
            kappa: kappa.to_f64().unwrap_or(f64::NAN),
            omega: f64::NAN,
            residual: ga.abs().min(gb.abs()).to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(bisect(
        |w| discriminant(mat, w, tol).unwrap_or(R::nan()) - target,
        band.omega_lo,
        band.omega_hi,
        ga,
        gb,
        tol.root_rel,
    ))
}

/// Pair consecutive completely-resolved band edges into gaps. Touching bands
/// (zero width) are reported separately, not as gaps.
pub fn band_gaps<R: Real>(bands: &[Band<R>]) -> BandGapReport<R> {
    let mut gaps = Vec::new();
    let mut degenerate = Vec::new();
    for pair in bands.windows(2) {
        let below = &pair[0];
        let above = &pair[1];
        if below.hi_kind == EdgeKind::Clipped || above.lo_kind == EdgeKind::Clipped {
            continue;
        }
        let width = above.omega_lo - below.omega_hi;
        if width <= R::lit(1e-11) * R::one().max(below.omega_hi.abs()) {
            degenerate.push(below.omega_hi);
            continue;
        }
        let edge_kappa = match below.hi_kind {
            EdgeKind::Kappa0 => EdgeKappa::Zero,
            EdgeKind::KappaPi => EdgeKappa::Pi,
            EdgeKind::Clipped => unreachable!(),
        };
        gaps.push(BandGap {
            index: below.index,
            material: below.material.clone(),
            lower: below.omega_hi,
            upper: above.omega_lo,
            edge_kappa,
        });
    }
    BandGapReport {
        gaps,
        degenerate_touch_points: degenerate,
    }
}

/// All pairwise nonempty intersections of A gaps with B gaps, ordered by
/// lower edge.
pub fn intersect_gaps<R: Real>(
    gaps_a: &[BandGap<R>],
    gaps_b: &[BandGap<R>],
) -> Vec<GapIntersection<R>> {
    let mut out = Vec::new();
    for ga in gaps_a {
        for gb in gaps_b {
            let (lower, lower_from) = if ga.lower >= gb.lower {
                (ga.lower, Side::A)
            } else {
                (gb.lower, Side::B)
            };
            let (upper, upper_from) = if ga.upper <= gb.upper {
                (ga.upper, Side::A)
            } else {
                (gb.upper, Side::B)
            };
            if upper > lower {
                out.push(GapIntersection {
                    lower,
                    upper,
                    lower_from,
                    upper_from,
                    gap_a: ga.clone(),
                    gap_b: gb.clone(),
                });
            }
        }
    }
    out.sort_by(|x, y| x.lower.partial_cmp(&y.lower).unwrap());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::{PermittivityModel, Structure, UnitCell};

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

    pub(crate) fn fig_structure() -> Structure<f64> {
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
    fn homogeneous_window_has_no_gaps() {
        let s = homogeneous();
        let bands = scan_bands(&s.material_a(), (0.1, 6.0), 3000, 16, &tol()).unwrap();
        assert!(bands.len() >= 2, "expected the folded bands, got {}", bands.len());
        let report = band_gaps(&bands);
        assert!(report.gaps.is_empty());
        assert!(!report.degenerate_touch_points.is_empty());
        // Bands tile the window: consecutive bands share their touch point.
        for pair in bands.windows(2) {
            assert!((pair[1].omega_lo - pair[0].omega_hi).abs() < 1e-6);
        }
    }

    #[test]
    fn fixture_first_bands_and_gap() {
        let s = fig_structure();
        let bands = scan_bands(&s.material_a(), (0.0, 0.99), 4000, 32, &tol()).unwrap();
        assert!(bands.len() >= 2);
        let b1 = &bands[0];
        assert_eq!(b1.lo_kind, EdgeKind::Kappa0);
        assert!(b1.omega_lo.abs() < 1e-9, "band 1 starts at omega = 0");
        assert_eq!(b1.hi_kind, EdgeKind::KappaPi);
        // Edges satisfy |f -/+ 2| below tolerance.
        for b in &bands {
            for (omega, kind) in [(b.omega_lo, b.lo_kind), (b.omega_hi, b.hi_kind)] {
                let f = discriminant(&s.material_a(), omega, &tol()).unwrap();
                match kind {
                    EdgeKind::Kappa0 => assert!((f - 2.0).abs() < 1e-8),
                    EdgeKind::KappaPi => assert!((f + 2.0).abs() < 1e-8),
                    EdgeKind::Clipped => {}
                }
            }
        }
        let report = band_gaps(&bands);
        assert!(!report.gaps.is_empty(), "fixture material A has a gap below the pole");
        assert_eq!(report.gaps[0].edge_kappa, EdgeKappa::Pi);
    }

    #[test]
    fn dispersion_samples_satisfy_relation_and_monotonicity() {
        let s = fig_structure();
        for mat in [s.material_a(), s.material_b()] {
            let bands = scan_bands(&mat, (0.0, 0.99), 4000, 64, &tol()).unwrap();
            for b in &bands {
                for &(kappa, omega) in &b.samples {
                    let f = discriminant(&mat, omega, &tol()).unwrap();
                    assert!(
                        (2.0 * kappa.cos() - f).abs() < 1e-9,
                        "dispersion residual too large on band {}",
                        b.index
                    );
                }
                let inc = b.samples.windows(2).all(|w| w[1].1 > w[0].1);
                let dec = b.samples.windows(2).all(|w| w[1].1 < w[0].1);
                assert!(inc || dec, "band {} not monotone in kappa", b.index);
            }
        }
    }

    #[test]
    fn window_straddling_pole_is_split() {
        let s = fig_structure();
        // Pole of eps1 at omega = 1 sits inside the window.
        let bands = scan_bands(&s.material_a(), (0.9, 1.1), 2000, 8, &tol()).unwrap();
        for b in &bands {
            assert!((b.omega_lo - 1.0).abs() > 1e-7 || (b.omega_hi - 1.0).abs() > 1e-7);
        }
        // Both halves were visited: some band content below and above.
        assert!(bands.iter().any(|b| b.omega_hi < 1.0));
    }

    #[test]
    fn gap_pairing_examples() {
        let mk = |idx: usize, lo: f64, hi: f64, lo_kind, hi_kind| Band {
            index: idx,
            material: "A".to_string(),
            omega_lo: lo,
            omega_hi: hi,
            lo_kind,
            hi_kind,
            samples: vec![],
        };
        let bands = vec![
            mk(1, 1.0, 2.0, EdgeKind::Kappa0, EdgeKind::KappaPi),
            mk(2, 2.5, 3.0, EdgeKind::KappaPi, EdgeKind::Kappa0),
        ];
        let report = band_gaps(&bands);
        assert_eq!(report.gaps.len(), 1);
        assert_eq!(report.gaps[0].lower, 2.0);
        assert_eq!(report.gaps[0].upper, 2.5);
        assert_eq!(report.gaps[0].index, 1);

        let touching = vec![
            mk(1, 1.0, 2.0, EdgeKind::Kappa0, EdgeKind::KappaPi),
            mk(2, 2.0, 3.0, EdgeKind::KappaPi, EdgeKind::Kappa0),
        ];
        let report = band_gaps(&touching);
        assert!(report.gaps.is_empty());
        assert_eq!(report.degenerate_touch_points, vec![2.0]);
    }

    #[test]
    fn intersection_examples() {
        let gap = |lo: f64, hi: f64, mat: &str| BandGap {
            index: 1,
            material: mat.to_string(),
            lower: lo,
            upper: hi,
            edge_kappa: EdgeKappa::Pi,
        };
        let i = intersect_gaps(&[gap(2.0, 2.5, "A")], &[gap(2.2, 2.7, "B")]);
        assert_eq!(i.len(), 1);
        assert_eq!(i[0].lower, 2.2);
        assert_eq!(i[0].upper, 2.5);
        assert_eq!(i[0].lower_from, Side::B);
        assert_eq!(i[0].upper_from, Side::A);

        assert!(intersect_gaps(&[gap(2.0, 2.1, "A")], &[gap(2.2, 2.3, "B")]).is_empty());

        let same = intersect_gaps(&[gap(2.0, 2.5, "A")], &[gap(2.0, 2.5, "B")]);
        assert_eq!(same[0].lower, 2.0);
        assert_eq!(same[0].upper, 2.5);
    }
}
