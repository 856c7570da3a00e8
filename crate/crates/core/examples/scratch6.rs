use bloch1d::interface::{find_interface_mode, InterfaceOptions, InterfaceSearch};
use bloch1d::materials::{PermittivityModel, PertKind, Structure, UnitCell};
use bloch1d::perturb::{sweep_delta, SweepOptions};
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
    let s = fig_structure().apply_sigma_perturbation(0.03).unwrap();
    let ba = scan_bands(&s.material_a(), (0.0, 0.995), 6000, 16, &tol).unwrap();
    let bb = scan_bands(&s.material_b(), (0.0, 0.995), 6000, 16, &tol).unwrap();
    let gaps = intersect_gaps(&band_gaps(&ba).gaps, &band_gaps(&bb).gaps);
    let opts = InterfaceOptions::default();
    match find_interface_mode(&s, &gaps[0], &opts, &tol).unwrap() {
        InterfaceSearch::Candidates(c) => {
            for m in &c {
                println!("cand omega {:.12} |W| {:.3e}", m.omega_m, m.residual_determinant);
            }
        }
        other => println!("{other:?}"),
    }

    let s = fig_structure();
    let mut o = SweepOptions::new((0.0, 0.995));
    o.n_scan = 6000;
    let recs = sweep_delta(&s, 1, PertKind::InverseSqIncreasing, &[0.0, 2.0], &o, &tol).unwrap();
    for r in &recs {
        println!("delta {} found {} mono {:?} err {:?}", r.param, r.mode_found, r.eps_monotone, r.error);
    }
}
