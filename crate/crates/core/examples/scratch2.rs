//! Interface-mode exploration on the fixture (not part of the API).

use bloch1d::interface::{find_interface_mode, InterfaceOptions, InterfaceSearch};
use bloch1d::materials::{PermittivityModel, Structure, UnitCell};
use bloch1d::modes::{bulk_index, edge_mode, zak_phase};
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

    // Homogeneous tangency check.
    let h = Structure::new(
        UnitCell::from_pairs("A", &[(1.0, 1)]).unwrap(),
        UnitCell::from_pairs("B", &[(1.0, 1)]).unwrap(),
        PermittivityModel::constant(1.0),
        PermittivityModel::constant(1.0),
        1.0,
    )
    .unwrap();
    let bands = scan_bands(&h.material_a(), (0.1, 6.0), 3000, 8, &tol).unwrap();
    println!("homogeneous bands:");
    for b in &bands {
        println!(
            "  #{} [{:.6},{:.6}] {:?}/{:?}",
            b.index, b.omega_lo, b.omega_hi, b.lo_kind, b.hi_kind
        );
    }

    // Fixture: indices, zak phases, interface modes for gaps 1 and 2.
    let s = fig_structure();
    let ba = scan_bands(&s.material_a(), (0.0, 0.995), 6000, 16, &tol).unwrap();
    let bb = scan_bands(&s.material_b(), (0.0, 0.995), 6000, 16, &tol).unwrap();
    let ga = band_gaps(&ba).gaps;
    let gb = band_gaps(&bb).gaps;
    for (mat, bands, gaps, name) in [
        (s.material_a(), &ba, &ga, "A"),
        (s.material_b(), &bb, &gb, "B"),
    ] {
        for gap in gaps.iter() {
            let m = edge_mode(&mat, gap.edge_kappa, gap.lower, 1024, &tol).unwrap();
            match bulk_index(gap, &m, &tol) {
                Ok(j) => println!("{name} gap {} index {:+}", gap.index, j.value),
                Err(e) => println!("{name} gap {} index error: {e}", gap.index),
            }
        }
        for b in bands.iter().take(2) {
            match zak_phase(&mat, b, 201, 512, &tol) {
                Ok(z) => println!(
                    "{name} band {} zak theta {:.6} -> {:.4} (res {:.2e})",
                    b.index, z.theta, z.classified, z.residual
                ),
                Err(e) => println!("{name} band {} zak error: {e}", b.index),
            }
        }
    }

    let inters = intersect_gaps(&ga, &gb);
    let opts = InterfaceOptions::default();
    for gi in &inters {
        match find_interface_mode(&s, gi, &opts, &tol) {
            Ok(InterfaceSearch::Unique(m)) => {
                println!(
                    "gap [{:.5},{:.5}]: omega_m {:.8}, |W| {:.2e}, decay A {:.4} B {:.4}, Zres {:?}",
                    gi.lower, gi.upper, m.omega_m, m.residual_determinant, m.decay_a, m.decay_b,
                    m.residual_impedance
                );
                for p in m.profile.iter().filter(|p| p.cell.abs() <= 3) {
                    println!("   n {:+} u {:+.6e} du {:+.6e}", p.cell, p.u, p.du);
                }
            }
            Ok(InterfaceSearch::NoMode { index_sum }) => {
                println!("gap [{:.5},{:.5}]: no mode (sum {index_sum})", gi.lower, gi.upper)
            }
            Ok(InterfaceSearch::Candidates(c)) => {
                println!("gap [{:.5},{:.5}]: {} candidates", gi.lower, gi.upper, c.len())
            }
            Err(e) => println!("gap [{:.5},{:.5}]: error {e}", gi.lower, gi.upper),
        }
    }
}
