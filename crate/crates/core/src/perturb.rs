//! Perturbation sweeps: permittivity (δ) and symmetry (σ).
//!
//! Each sweep point rebuilds the structure, rescans the bands, follows the
//! tracked gap by interval overlap with the previous step, and re-runs the
//! interface-mode search. Per-point failures are captured in the records;
//! the sweep itself never aborts. A step whose gap no longer overlaps the
//! tracked interval terminates tracking with a `gap lost` record.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interface::{find_interface_mode, InterfaceMode, InterfaceOptions, InterfaceSearch};
use crate::materials::{PertKind, Structure};
use crate::real::Real;
use crate::spectrum::{band_gaps, intersect_gaps, scan_bands, GapIntersection};
use crate::tol::Tolerances;

/// Outcome of one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord<R: Real> {
    /// Parameter value (δ or σ).
    pub param: R,
    pub gap_lower: Option<R>,
    pub gap_upper: Option<R>,
    pub omega_m: Option<R>,
    pub mode_found: bool,
    pub residual_determinant: Option<R>,
    /// All determinant roots found (more than one only for asymmetric cells).
    pub candidates: Vec<R>,
    /// Whether `d eps~/d omega >= 0` held for both species across the gap.
    pub eps_monotone: Option<bool>,
    pub error: Option<String>,
    /// Full mode data for convergence analysis (lattice profile included).
    #[serde(skip)]
    pub mode: Option<InterfaceMode<R>>,
}

impl<R: Real> SweepRecord<R> {
    fn failed(param: R, error: String) -> Self {
        Self {
            param,
            gap_lower: None,
            gap_upper: None,
            omega_m: None,
            mode_found: false,
            residual_determinant: None,
            candidates: Vec::new(),
            eps_monotone: None,
            error: Some(error),
            mode: None,
        }
    }
}

/// Sweep configuration shared by both parameter kinds.
#[derive(Debug, Clone, Copy)]
pub struct SweepOptions<R: Real> {
    pub omega_window: (R, R),
    pub n_scan: usize,
    pub interface: InterfaceOptions,
}

impl<R: Real> SweepOptions<R> {
    pub fn new(omega_window: (R, R)) -> Self {
        Self {
            omega_window,
            n_scan: 4000,
            interface: InterfaceOptions::default(),
        }
    }
}

/// Default δ grid: 0 followed by 33 log-spaced points in [1e-5, 1].
pub fn default_delta_grid<R: Real>() -> Vec<R> {
    let mut grid = vec![R::zero()];
    let n = 33;
    for i in 0..n {
        let expo = -5.0 + 5.0 * i as f64 / (n - 1) as f64;
        grid.push(R::lit(10f64.powf(expo)));
    }
    grid
}

/// Default σ grid: 31 linear points in [0, sigma_max].
pub fn default_sigma_grid<R: Real>(sigma_max: R) -> Vec<R> {
    (0..31)
        .map(|i| sigma_max * R::from_usize_(i) / R::lit(30.0))
        .collect()
}

/// Gap data and interface search for one concrete structure.
fn analyse_point<R: Real>(
    structure: &Structure<R>,
    param: R,
    track: Option<(R, R)>,
    gap_index: usize,
    opts: &SweepOptions<R>,
    tol: &Tolerances<R>,
) -> SweepRecord<R> {
    let (lo, hi) = opts.omega_window;
    let lo = lo.max(R::lit(1e-3));
    let run = || -> Result<(GapIntersection<R>, SweepRecord<R>)> {
        let bands_a = scan_bands(&structure.material_a(), (lo, hi), opts.n_scan, 16, tol)?;
        let bands_b = scan_bands(&structure.material_b(), (lo, hi), opts.n_scan, 16, tol)?;
        let gaps_a = band_gaps(&bands_a).gaps;
        let gaps_b = band_gaps(&bands_b).gaps;
        let inters = intersect_gaps(&gaps_a, &gaps_b);
        let gap = match track {
            None => inters
                .get(gap_index.saturating_sub(1))
                .cloned()
                .ok_or_else(|| {
                    Error::InvalidInput(format!(
                        "gap intersection {gap_index} not present in window"
                    ))
                })?,
            Some((tlo, thi)) => {
                let mut best: Option<(R, GapIntersection<R>)> = None;
                for g in &inters {
                    let overlap = g.upper.min(thi) - g.lower.max(tlo);
                    if overlap > R::zero() {
                        match &best {
                            Some((b, _)) if *b >= overlap => {}
                            _ => best = Some((overlap, g.clone())),
                        }
                    }
                }
                best.map(|(_, g)| g).ok_or_else(|| {
                    Error::InvalidInput("gap lost: no overlapping intersection".into())
                })?
            }
        };

        let eps_monotone = eps_monotone_on(structure, gap.lower, gap.upper, tol);

        let mut record = SweepRecord {
            param,
            gap_lower: Some(gap.lower),
            gap_upper: Some(gap.upper),
            omega_m: None,
            mode_found: false,
            residual_determinant: None,
            candidates: Vec::new(),
            eps_monotone: Some(eps_monotone),
            error: None,
            mode: None,
        };
        match find_interface_mode(structure, &gap, &opts.interface, tol) {
            Ok(InterfaceSearch::Unique(mode)) => {
                record.omega_m = Some(mode.omega_m);
                record.mode_found = true;
                record.residual_determinant = Some(mode.residual_determinant);
                record.candidates = vec![mode.omega_m];
                record.mode = Some(mode);
            }
            Ok(InterfaceSearch::NoMode { index_sum }) => {
                record.error = Some(format!("no mode: bulk index sum {index_sum}"));
            }
            Ok(InterfaceSearch::Candidates(modes)) => {
                record.candidates = modes.iter().map(|m| m.omega_m).collect();
                // Track the candidate closest to the previous frequency.
                let target = track
                    .map(|(a, b)| (a + b) * R::lit(0.5))
                    .unwrap_or((gap.lower + gap.upper) * R::lit(0.5));
                let best = modes.into_iter().min_by(|x, y| {
                    (x.omega_m - target)
                        .abs()
                        .partial_cmp(&(y.omega_m - target).abs())
                        .unwrap()
                });
                if let Some(mode) = best {
                    record.omega_m = Some(mode.omega_m);
                    record.mode_found = true;
                    record.residual_determinant = Some(mode.residual_determinant);
                    record.mode = Some(mode);
                }
            }
            Err(e) => record.error = Some(e.to_string()),
        }
        Ok((gap, record))
    };
    match run() {
        Ok((_, record)) => record,
        Err(e) => SweepRecord::failed(param, e.to_string()),
    }
}

fn eps_monotone_on<R: Real>(structure: &Structure<R>, lo: R, hi: R, tol: &Tolerances<R>) -> bool {
    let n = 32;
    for i in 0..n {
        let omega = lo + (hi - lo) * R::from_usize_(i) / R::from_usize_(n - 1);
        for model in [&structure.eps1, &structure.eps2] {
            match model.derivative_with(omega, tol.eta_pole) {
                Ok(d) => {
                    if d < -R::lit(1e-12) {
                        return false;
                    }
                }
                Err(_) => return false,
            }
        }
    }
    true
}

/// δ sweep: rebuild the materials with `eps + delta * f` and re-run the gap
/// and interface analysis for every grid value. The tracked frequency for a
/// record is measured against the previous record's gap (interval overlap).
pub fn sweep_delta<R: Real>(
    structure: &Structure<R>,
    gap_index: usize,
    kind: PertKind,
    delta_grid: &[R],
    opts: &SweepOptions<R>,
    tol: &Tolerances<R>,
) -> Result<Vec<SweepRecord<R>>> {
    if delta_grid.is_empty() {
        return Err(Error::InvalidInput("empty delta grid".into()));
    }
    if kind == PertKind::None {
        return Err(Error::InvalidInput(
            "delta sweep needs an inverse-square perturbation kind".into(),
        ));
    }
    let mut sorted = delta_grid.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if sorted[0] < R::zero() {
        return Err(Error::InvalidInput("delta grid must start at 0".into()));
    }
    // Sweep points are independent once the tracked interval is known; the
    // gap moves slowly, so each point is tracked against the unperturbed
    // interval first and re-tracked sequentially if that fails.
    let structures: Vec<(R, Structure<R>)> = sorted
        .iter()
        .map(|&d| {
            let s = if d == R::zero() {
                structure.clone()
            } else {
                structure.with_perturbation(kind, d)
            };
            (d, s)
        })
        .collect();

    let mut records = Vec::with_capacity(sorted.len());
    let mut track: Option<(R, R)> = None;
    let mut lost = false;
    for (d, s) in &structures {
        if lost {
            records.push(SweepRecord::failed(*d, "gap lost earlier in sweep".into()));
            continue;
        }
        let record = analyse_point(s, *d, track, gap_index, opts, tol);
        if let (Some(lo), Some(hi)) = (record.gap_lower, record.gap_upper) {
            track = Some((lo, hi));
        } else if record.error.as_deref().is_some_and(|e| e.contains("gap lost")) {
            lost = true;
        }
        records.push(record);
    }
    Ok(records)
}

/// σ sweep: apply the symmetry-breaking perturbation for every grid value.
/// Asymmetric cells void the uniqueness theorem, so every determinant root
/// is recorded as a candidate.
pub fn sweep_sigma<R: Real>(
    structure: &Structure<R>,
    gap_index: usize,
    sigma_grid: &[R],
    opts: &SweepOptions<R>,
    tol: &Tolerances<R>,
) -> Result<Vec<SweepRecord<R>>> {
    if sigma_grid.is_empty() {
        return Err(Error::InvalidInput("empty sigma grid".into()));
    }
    let mut sorted = sigma_grid.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let prepared: Vec<(R, Result<Structure<R>>)> = sorted
        .par_iter()
        .map(|&sig| (sig, structure.apply_sigma_perturbation(sig)))
        .collect();

    // Unlike the δ sweep, σ can drive the tracked gap through an exact
    // closing (the two cells become half-period-shifted copies of one
    // crystal and the κ = π gaps pinch shut at σ = θ2 - θ1). The gap reopens
    // beyond the degeneracy, so a lost step keeps the previous interval
    // alive instead of terminating the sweep.
    let mut records = Vec::with_capacity(sorted.len());
    let mut track: Option<(R, R)> = None;
    for (sig, s) in prepared {
        let record = match s {
            Ok(s) => analyse_point(&s, sig, track, gap_index, opts, tol),
            Err(e) => SweepRecord::failed(sig, e.to_string()),
        };
        if let (Some(lo), Some(hi)) = (record.gap_lower, record.gap_upper) {
            track = Some((lo, hi));
        }
        records.push(record);
    }
    Ok(records)
}

/// Convergence report against the unperturbed mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceReport<R: Real> {
    pub p_small: R,
    /// max over records with param <= p_small of |omega_m(p) - omega_m(0)| /
    /// max(1, |omega_m(0)|).
    pub max_omega_dev: R,
    /// sup-norm profile distance after common normalisation.
    pub max_profile_dist: R,
    pub converged: bool,
}

/// Compare small-parameter records against the unperturbed baseline. If
/// `baseline` is `None` the record at parameter 0 is used.
pub fn converge_check<R: Real>(
    records: &[SweepRecord<R>],
    baseline: Option<&InterfaceMode<R>>,
    p_small: R,
) -> Result<ConvergenceReport<R>> {
    let base = match baseline {
        Some(b) => b,
        None => records
            .iter()
            .find(|r| r.param == R::zero())
            .and_then(|r| r.mode.as_ref())
            .ok_or(Error::MissingBaseline)?,
    };
    let base_profile = normalised_profile(base);
    let mut max_omega_dev = R::zero();
    let mut max_profile_dist = R::zero();
    for r in records {
        if r.param > p_small || r.param == R::zero() {
            continue;
        }
        let Some(mode) = &r.mode else { continue };
        let dev = (mode.omega_m - base.omega_m).abs() / R::one().max(base.omega_m.abs());
        max_omega_dev = max_omega_dev.max(dev);
        let prof = normalised_profile(mode);
        let n = prof.len().min(base_profile.len());
        for i in 0..n {
            max_profile_dist = max_profile_dist.max((prof[i] - base_profile[i]).abs());
        }
    }
    let converged = max_omega_dev <= R::lit(1e-4) && max_profile_dist <= R::lit(1e-3);
    Ok(ConvergenceReport {
        p_small,
        max_omega_dev,
        max_profile_dist,
        converged,
    })
}

/// Lattice `u` values scaled so the largest magnitude is 1 and its sign is
/// positive.
fn normalised_profile<R: Real>(mode: &InterfaceMode<R>) -> Vec<R> {
    let mut best = R::zero();
    for p in &mode.profile {
        if p.u.abs() > best.abs() {
            best = p.u;
        }
    }
    let scale = if best == R::zero() { R::one() } else { best.recip() };
    mode.profile.iter().map(|p| p.u * scale).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interface::InterfaceSearch;
    use crate::materials::{PermittivityModel, UnitCell};
    use crate::spectrum::{band_gaps, intersect_gaps, scan_bands};

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
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

    /// Same geometry, species poles at 2 and 2*sqrt(2); the first gap sits
    /// near omega = 1.8 where the inverse-square perturbations reproduce the
    /// textbook widening/narrowing of the gap.
    fn sweep_structure() -> Structure<f64> {
        Structure::new(
            UnitCell::from_pairs("A", &[(0.1, 1), (0.25, 2), (0.3, 1), (0.25, 2), (0.1, 1)])
                .unwrap(),
            UnitCell::from_pairs("B", &[(0.15, 1), (0.25, 2), (0.2, 1), (0.25, 2), (0.15, 1)])
                .unwrap(),
            PermittivityModel::new(1.0, 2.0, 0.25),
            PermittivityModel::new(1.0, 1.0, 0.125),
            1.0,
        )
        .unwrap()
    }

    fn opts(hi: f64) -> SweepOptions<f64> {
        let mut o = SweepOptions::new((0.0, hi));
        o.n_scan = 6000;
        o
    }

    #[test]
    fn delta_zero_record_matches_direct_search() {
        let s = fig_structure();
        let records =
            sweep_delta(&s, 1, PertKind::InverseSqDecreasing, &[0.0], &opts(0.995), &tol())
                .unwrap();
        assert_eq!(records.len(), 1);
        let r = &records[0];
        assert!(r.mode_found);

        // Direct search over the same clamped window.
        let ba = scan_bands(&s.material_a(), (1e-3, 0.995), 6000, 16, &tol()).unwrap();
        let bb = scan_bands(&s.material_b(), (1e-3, 0.995), 6000, 16, &tol()).unwrap();
        let gaps = intersect_gaps(&band_gaps(&ba).gaps, &band_gaps(&bb).gaps);
        let search = crate::interface::find_interface_mode(
            &s,
            &gaps[0],
            &InterfaceOptions::default(),
            &tol(),
        )
        .unwrap();
        let InterfaceSearch::Unique(mode) = search else {
            panic!("expected unique mode");
        };
        assert_eq!(r.omega_m, Some(mode.omega_m));
        assert_eq!(r.gap_lower, Some(gaps[0].lower));
        assert_eq!(r.gap_upper, Some(gaps[0].upper));
    }

    #[test]
    fn delta_trends_follow_the_perturbation_sign() {
        let s = sweep_structure();
        let grid = [0.0, 1e-3, 1e-2, 0.1, 0.3, 0.6];
        let widen = sweep_delta(&s, 1, PertKind::InverseSqDecreasing, &grid, &opts(1.99), &tol())
            .unwrap();
        for pair in widen.windows(2) {
            let w0 = pair[0].gap_upper.unwrap() - pair[0].gap_lower.unwrap();
            let w1 = pair[1].gap_upper.unwrap() - pair[1].gap_lower.unwrap();
            assert!(w1 >= w0 - 1e-9, "gap width shrank under f = -1/w^2");
            assert!(pair[1].omega_m.unwrap() > pair[0].omega_m.unwrap() - 1e-12);
        }
        let narrow = sweep_delta(&s, 1, PertKind::InverseSqIncreasing, &grid, &opts(1.99), &tol())
            .unwrap();
        let w_first = narrow[1].gap_upper.unwrap() - narrow[1].gap_lower.unwrap();
        let w_last = narrow.last().unwrap().gap_upper.unwrap()
            - narrow.last().unwrap().gap_lower.unwrap();
        assert!(w_last < w_first, "gap width should shrink under f = +1/w^2");
    }

    #[test]
    fn monotonicity_annotation_flips_for_large_disrespecting_delta() {
        let s = fig_structure();
        // Gradual grid: the gap drifts downward and tracking follows it.
        let grid = [0.0, 0.5, 1.0, 1.5, 2.0];
        let records =
            sweep_delta(&s, 1, PertKind::InverseSqIncreasing, &grid, &opts(0.995), &tol())
                .unwrap();
        assert_eq!(records[0].eps_monotone, Some(true));
        let last = records.last().unwrap();
        assert_eq!(last.eps_monotone, Some(false));
        // The record is still produced; only the theorem's hypothesis lapses.
        assert!(last.mode_found);
    }

    #[test]
    fn sigma_sweep_continuity_and_reopening() {
        let s = fig_structure();
        let grid = [0.0, 1e-4, 5e-3, 3e-2, 6e-2, 0.12];
        let records = sweep_sigma(&s, 1, &grid, &opts(0.995), &tol()).unwrap();
        assert!(records.iter().all(|r| r.mode_found));
        let base = records[0].omega_m.unwrap();
        let at_tiny = records[1].omega_m.unwrap();
        assert!((at_tiny - base).abs() < 1e-4 * base);
        for r in &records {
            assert!(r.omega_m.unwrap() > r.gap_lower.unwrap());
            assert!(r.omega_m.unwrap() < r.gap_upper.unwrap());
        }
    }

    #[test]
    fn convergence_report() {
        let s = fig_structure();
        let records = sweep_delta(
            &s,
            1,
            PertKind::InverseSqDecreasing,
            &[0.0, 1e-4],
            &opts(0.995),
            &tol(),
        )
        .unwrap();
        let report = converge_check(&records, None, 1e-4).unwrap();
        assert!(report.converged, "omega dev {:e} profile {:e}", report.max_omega_dev, report.max_profile_dist);
        assert!(report.max_omega_dev < 1e-4);
        assert!(report.max_profile_dist < 1e-3);

        // Degenerate single-record input: zero distances.
        let single = &records[..1];
        let report = converge_check(single, None, 1e-4).unwrap();
        assert_eq!(report.max_omega_dev, 0.0);
        assert_eq!(report.max_profile_dist, 0.0);

        // No baseline at parameter zero.
        let tail = &records[1..];
        assert!(matches!(
            converge_check(tail, None, 1e-4),
            Err(Error::MissingBaseline)
        ));
    }
}
