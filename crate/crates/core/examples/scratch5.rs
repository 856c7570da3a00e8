//! Delta-sweep trend exploration across candidate parameter sets.

use bloch1d::materials::{PermittivityModel, PertKind, Structure, UnitCell};
use bloch1d::perturb::{sweep_delta, SweepOptions};
use bloch1d::tol::Tolerances;

fn structure(a1: f64, b1: f64, a2: f64, b2: f64) -> Structure<f64> {
    Structure::new(
        UnitCell::from_pairs("A", &[(0.1, 1), (0.25, 2), (0.3, 1), (0.25, 2), (0.1, 1)]).unwrap(),
        UnitCell::from_pairs("B", &[(0.15, 1), (0.25, 2), (0.2, 1), (0.25, 2), (0.15, 1)]).unwrap(),
        PermittivityModel::new(1.0, a1, b1),
        PermittivityModel::new(1.0, a2, b2),
        1.0,
    )
    .unwrap()
}

fn main() {
    let tol = Tolerances::default();
    let candidates: [(f64, f64, f64, f64, f64); 5] = [
        (2.0, 1.0, 1.0, 0.5, 0.995), // pinned fixture
        (2.0, 1.0, 0.0, 0.0, 0.995), // constant species 2
        (2.0, 1.0, 1.0, 0.25, 0.995),
        (2.0, 0.25, 1.0, 0.125, 1.99), // poles at 2 and 2.83
        (4.0, 1.0, 2.0, 0.5, 0.995),
    ];
    for (a1, b1, a2, b2, whi) in candidates {
        println!("=== alpha1 {a1} beta1 {b1} alpha2 {a2} beta2 {b2}");
        let s = structure(a1, b1, a2, b2);
        let mut opts = SweepOptions::new((0.0, whi));
        opts.n_scan = 6000;
        for kind in [PertKind::InverseSqDecreasing, PertKind::InverseSqIncreasing] {
            let grid: Vec<f64> = vec![0.0, 1e-3, 1e-2, 0.1, 0.3, 0.6, 1.0, 2.0, 4.0, 8.0];
            match sweep_delta(&s, 1, kind, &grid, &opts, &tol) {
                Ok(records) => {
                    print!("  {kind:?}: ");
                    for r in &records {
                        match (r.gap_lower, r.gap_upper, r.omega_m) {
                            (Some(lo), Some(hi), Some(om)) => {
                                let margin = (om - lo).min(hi - om) / (hi - lo);
                                print!("[d{:.0e} w{:.5} m{:.2}] ", r.param, hi - lo, margin)
                            }
                            (Some(lo), Some(hi), None) => {
                                print!("[d{:.0e} w{:.5} nomode] ", r.param, hi - lo)
                            }
                            _ => print!("[d{:.0e} lost] ", r.param),
                        }
                    }
                    println!();
                }
                Err(e) => println!("  {kind:?}: error {e}"),
            }
        }
    }
}
