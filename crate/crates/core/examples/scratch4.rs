//! Sweep and oracle-interface exploration (not part of the API).

use bloch1d::interface::{find_interface_mode, InterfaceOptions, InterfaceSearch};
use bloch1d::materials::{PermittivityModel, PertKind, Structure, UnitCell};
use bloch1d::oracle::oracle_finite_interface;
use bloch1d::perturb::{default_sigma_grid, sweep_delta, sweep_sigma, SweepOptions};
use bloch1d::spectrum::{band_gaps, intersect_gaps, scan_bands};
use bloch1d::tol::Tolerances;

fn fig_structure() -> Structure<f64> {
    Structure::new(
        UnitCell::from_pairs("A", &[(0.1, 1), (0.25, 2), (0.3, 1), (0.25, 2), (0.1, 1)]).unwrap(),
        UnitCell::from_pairs("B", &[(0.15, 1), (0.25, 2), (0.2, 1), (0.25, 2), (0.15, 1)]).unwrap(),
        PermittivityModel::new(1.0, 2.0, 1.0),
        PermittivityModel::new(1.0, 1.0, 0.5),
        1.0,
    )
    .unwrap()
}

fn main() {
    let tol = Tolerances::default();
    let s = fig_structure();

    // Baseline mode and oracle cross-check.
    let ba = scan_bands(&s.material_a(), (0.0, 0.995), 6000, 16, &tol).unwrap();
    let bb = scan_bands(&s.material_b(), (0.0, 0.995), 6000, 16, &tol).unwrap();
    let inters = intersect_gaps(&band_gaps(&ba).gaps, &band_gaps(&bb).gaps);
    let opts = InterfaceOptions::default();
    let gap = &inters[0];
    let InterfaceSearch::Unique(mode) = find_interface_mode(&s, gap, &opts, &tol).unwrap() else {
        panic!("expected unique mode");
    };
    println!("omega_m = {:.10}", mode.omega_m);

    // Decay fit over cells 3..10 on each side.
    let fit = |pts: Vec<(f64, f64)>| {
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    };
    let right: Vec<(f64, f64)> = mode
        .profile
        .iter()
        .filter(|p| (3..=10).contains(&p.cell))
        .map(|p| (p.cell as f64, p.u.abs().ln()))
        .collect();
    let left: Vec<(f64, f64)> = mode
        .profile
        .iter()
        .filter(|p| (-10..=-3).contains(&p.cell))
        .map(|p| (-p.cell as f64, p.u.abs().ln()))
        .collect();
    println!(
        "decay fit right {:.6} vs ln lambda_b {:.6}; left {:.6} vs ln lambda_a {:.6}",
        fit(right),
        mode.decay_b.ln(),
        fit(left),
        mode.decay_a.ln()
    );

    // Oracle finite interface: 20+20 cells, window strictly inside the gap.
    let pad = 0.1 * (gap.upper - gap.lower);
    let window = (gap.lower + pad, gap.upper - pad);
    let t0 = std::time::Instant::now();
    let roots = oracle_finite_interface(&s, 20, window, 50, &tol).unwrap();
    println!("oracle finite roots in {:?}:", t0.elapsed());
    for (w, score) in &roots {
        println!("  omega {w:.8} score {score:.4} (rel dev {:+.2e})", (w - mode.omega_m) / mode.omega_m);
    }

    // Sigma sweep on the first common gap.
    let mut sw_opts = SweepOptions::new((0.0, 0.995));
    sw_opts.n_scan = 6000;
    let grid = default_sigma_grid(0.15);
    let t0 = std::time::Instant::now();
    let records = sweep_sigma(&s, 1, &grid, &sw_opts, &tol).unwrap();
    println!("sigma sweep in {:?}:", t0.elapsed());
    for r in &records {
        println!(
            "  sigma {:.4} gap [{:?},{:?}] omega_m {:?} found {} ncand {} err {:?}",
            r.param,
            r.gap_lower.map(|x| format!("{x:.6}")),
            r.gap_upper.map(|x| format!("{x:.6}")),
            r.omega_m.map(|x| format!("{x:.8}")),
            r.mode_found,
            r.candidates.len(),
            r.error
        );
    }

    // Delta sweeps, both kinds, small grid.
    for kind in [PertKind::InverseSqDecreasing, PertKind::InverseSqIncreasing] {
        let grid: Vec<f64> = vec![0.0, 1e-4, 1e-3, 1e-2, 0.05, 0.1, 0.2, 0.4, 0.7, 1.0];
        let t0 = std::time::Instant::now();
        let records = sweep_delta(&s, 1, kind, &grid, &sw_opts, &tol).unwrap();
        println!("delta sweep {kind:?} in {:?}:", t0.elapsed());
        for r in &records {
            println!(
                "  delta {:.1e} gap [{:?},{:?}] width {:?} omega_m {:?} mono {:?} err {:?}",
                r.param,
                r.gap_lower.map(|x| format!("{x:.6}")),
                r.gap_upper.map(|x| format!("{x:.6}")),
                r.gap_lower.zip(r.gap_upper).map(|(a, b)| format!("{:.6}", b - a)),
                r.omega_m.map(|x| format!("{x:.8}")),
                r.eps_monotone,
                r.error
            );
        }
    }
}
