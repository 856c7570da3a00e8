//! Debugging band-edge detection corner cases (not part of the API).

use bloch1d::materials::{PermittivityModel, Structure, UnitCell};
use bloch1d::spectrum::scan_bands;
use bloch1d::tol::Tolerances;
use bloch1d::xfer::discriminant;

fn main() {
    let tol = Tolerances::default();
    let h = Structure::new(
        UnitCell::from_pairs("A", &[(1.0, 1)]).unwrap(),
        UnitCell::from_pairs("B", &[(1.0, 1)]).unwrap(),
        PermittivityModel::constant(1.0),
        PermittivityModel::constant(1.0),
        1.0,
    )
    .unwrap();
    // Reproduce the grid neighbourhood of 2*pi in a 3000-point scan of
    // [0.1, 6.0] and print the |f - 2| pattern.
    let (lo, hi, n) = (0.1f64, 6.0f64, 3000usize);
    let step = (hi - lo) / (n - 1) as f64;
    let i2pi = ((2.0 * std::f64::consts::PI - lo) / step).round() as usize;
    for i in i2pi.saturating_sub(3)..=(i2pi + 3) {
        let w = lo + step * i as f64;
        let f = discriminant(&h.material_a(), w, &tol).unwrap();
        println!("i {i} w {w:.8} g+ {:+.6e}", f - 2.0);
    }
    let bands = scan_bands(&h.material_a(), (0.1, 6.0), 3000, 8, &tol).unwrap();
    for b in &bands {
        println!(
            "band #{} [{:.6},{:.6}] {:?}/{:?}",
            b.index, b.omega_lo, b.omega_hi, b.lo_kind, b.hi_kind
        );
    }

    // Fixture material A near the pole: where does the unpaired edge
    // diagnosis come from in [0.9, 1.1]?
    let s = Structure::new(
        UnitCell::from_pairs("A", &[(0.1, 1), (0.25, 2), (0.3, 1), (0.25, 2), (0.1, 1)]).unwrap(),
        UnitCell::from_pairs("B", &[(0.15, 1), (0.25, 2), (0.2, 1), (0.25, 2), (0.15, 1)]).unwrap(),
        PermittivityModel::new(1.0, 2.0, 1.0),
        PermittivityModel::new(1.0, 1.0, 0.5),
        1.0,
    )
    .unwrap();
    for i in 0..40 {
        let w = 0.9 + 0.1 * i as f64 / 39.0;
        match discriminant(&s.material_a(), w, &tol) {
            Ok(f) => println!("w {w:.5} f {f:+.4e}"),
            Err(e) => println!("w {w:.5} err {e}"),
        }
    }
    match scan_bands(&s.material_a(), (0.9, 1.1), 2000, 8, &tol) {
        Ok(bands) => {
            for b in &bands {
                println!(
                    "pole-window band #{} [{:.9},{:.9}] {:?}/{:?}",
                    b.index, b.omega_lo, b.omega_hi, b.lo_kind, b.hi_kind
                );
            }
        }
        Err(e) => println!("pole-window error: {e}"),
    }
}
