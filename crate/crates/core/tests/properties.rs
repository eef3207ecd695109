use std::f64::consts::PI;

use ladder_spectra::fem::{
    assemble_bloch_pencil, build_cell_mesh, cell_eigenvalues, SolverSettings,
};
use ladder_spectra::graph::{
    build_eigenfunction, capital_f, discrete_eigenvalues, g_raw, gaps, theta_root_certificate,
};
use ladder_spectra::report::fmt_num;
use ladder_spectra::{LadderParams, LengthSpec, SymmetryClass};
use proptest::prelude::*;

fn class() -> impl Strategy<Value = SymmetryClass> {
    prop_oneof![
        Just(SymmetryClass::Symmetric),
        Just(SymmetryClass::Antisymmetric)
    ]
}

fn off_poles(w: f64, l: f64) -> bool {
    [(w * l / 2.0).sin(), (w * l / 2.0).cos(), w.sin()]
        .iter()
        .all(|x| x.abs() > 1e-6)
}

#[test]
fn first_gap_edges_sit_on_g_equals_plus_minus_one() {
    let gap = gaps(2.0, SymmetryClass::Symmetric, 4.0).unwrap()[0];
    let gb = g_raw(gap.omega_b, 2.0, SymmetryClass::Symmetric);
    let gt = g_raw(gap.omega_t, 2.0, SymmetryClass::Symmetric);
    assert!((gb - 1.0).abs() < 1e-9, "g(ω_b) = {gb}");
    assert!((gt + 1.0).abs() < 1e-9, "g(ω_t) = {gt}");
    assert!(((gap.omega_b.cos()) - 1.0 / 3.0).abs() < 1e-12);
}

proptest! {
    #[test]
    fn membership_matches_theta_root(w in 0.01f64..6.0 * PI, l in 0.3f64..9.0, c in class()) {
        prop_assume!(off_poles(w, l));
        let member = g_raw(w, l, c).abs() <= 1.0;
        prop_assert_eq!(member, theta_root_certificate(w, l, c, 1e-10).is_some());
    }

    #[test]
    fn defect_roots_solve_f_equals_mu(l in 0.5f64..8.0, mu in 0.05f64..0.95, k in 0usize..3, c in class()) {
        let gs = gaps(l, c, 6.0 * PI).unwrap();
        prop_assume!(gs.len() > k + 1);
        for ev in discrete_eigenvalues(l, mu, c, &gs[k]) {
            prop_assert!(gs[k].contains(ev.omega));
            let f = capital_f(ev.omega, l, c).unwrap();
            prop_assert!((f - mu).abs() < 1e-7, "F = {f}, μ = {mu}");
            let u = build_eigenfunction(&ev).unwrap();
            prop_assert!(u.r.abs() < 1.0);
            for j in 0..6 {
                let scale = 1.0 + u.vertex_value(j).abs() * ev.omega;
                prop_assert!(u.kirchhoff_residual(j).abs() < 1e-7 * scale);
            }
        }
    }

    #[test]
    fn printed_numbers_parse_back(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn bloch_pencils_are_hermitian_and_nonnegative(theta in 0.0f64..=PI, eps in 0.1f64..0.25, c in class()) {
        let p = LadderParams::new(LengthSpec::integer(2), eps, 1.0).unwrap();
        let mesh = build_cell_mesh(&p, c, eps / 3.0).unwrap();
        let pencil = assemble_bloch_pencil(&mesh, theta).unwrap();
        prop_assert!(pencil.k.hermitian_defect() < 1e-12);
        prop_assert!(pencil.m.hermitian_defect() < 1e-12);
        let vals = cell_eigenvalues(&mesh, theta, 3, &SolverSettings::default()).unwrap();
        prop_assert!(vals.iter().all(|&v| v >= -1e-10), "{vals:?}");
    }
}
