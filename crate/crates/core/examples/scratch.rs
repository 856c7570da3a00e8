//! Ad-hoc exploration of the fixture's band layout (not part of the API).

use bloch1d::materials::{PermittivityModel, Structure, UnitCell};
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
    for sigma in [0.0, 0.02, 0.04, 0.05, 0.06, 0.10, 0.149, 0.15] {
        let sp = s.apply_sigma_perturbation(sigma).unwrap();
        println!("=== sigma = {sigma}");
        for (name, mat) in [("A", sp.material_a()), ("B", sp.material_b())] {
            match scan_bands(&mat, (0.0, 0.995), 6000, 8, &tol) {
                Ok(bands) => {
                    let gr = band_gaps(&bands);
                    print!("  {name}: bands ");
                    for b in &bands {
                        print!("[{:.4},{:.4}{:?}/{:?}] ", b.omega_lo, b.omega_hi, b.lo_kind, b.hi_kind);
                    }
                    print!("| gaps ");
                    for g in &gr.gaps {
                        print!("#{} [{:.5},{:.5}]({:?}) ", g.index, g.lower, g.upper, g.edge_kappa);
                    }
                    println!("| degen {:?}", gr.degenerate_touch_points);
                }
                Err(e) => println!("  {name}: scan error: {e}"),
            }
        }
        let ba = scan_bands(&sp.material_a(), (0.0, 0.995), 6000, 8, &tol);
        let bb = scan_bands(&sp.material_b(), (0.0, 0.995), 6000, 8, &tol);
        if let (Ok(ba), Ok(bb)) = (ba, bb) {
            let ga = band_gaps(&ba).gaps;
            let gb = band_gaps(&bb).gaps;
            for i in intersect_gaps(&ga, &gb) {
                println!(
                    "  common: [{:.5},{:.5}] width {:.5} (A#{} {:?}, B#{})",
                    i.lower,
                    i.upper,
                    i.width(),
                    i.gap_a.index,
                    i.gap_a.edge_kappa,
                    i.gap_b.index
                );
            }
        }
    }
}
