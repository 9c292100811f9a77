//! Closed-form circuit derivations, cancellation search, potential-landscape
//! analysis, nonperturbative cross-checks, and crosstalk estimates.

use hqc_core::coupler::{
    crosstalk_estimate, derive_couplings, find_cancellation, numeric_validate,
    potential_minimum_check, resonator_mediated_j, sweep_alpha, to_mhz, total_potential,
    CircuitParams, DEFAULT_E_C_BARE_MHZ,
};
use hqc_core::error::Error;
use proptest::prelude::*;

fn at_cancellation() -> (CircuitParams, f64) {
    let mut p = CircuitParams::reference_design();
    let alpha_star = find_cancellation(&p).unwrap().alpha_star;
    p.alpha = alpha_star;
    (p, alpha_star)
}

#[test]
fn cancellation_point_matches_reference() {
    let root = find_cancellation(&CircuitParams::reference_design()).unwrap();
    assert!((root.alpha_star - 0.04323282).abs() < 2e-6, "alpha* {}", root.alpha_star);
    assert!((root.alpha_star - 0.043).abs() < 0.002);
    assert!(root.j_hop_residual.abs() < 1e-9);

    let c = &root.at_root;
    assert!((c.j_cap - 0.249450).abs() < 2e-6);
    assert!((c.j_ind + 1.103127).abs() < 2e-6);
    assert!((c.j_nonlin - 0.853676).abs() < 2e-6);
    assert!((c.delta - 0.85185356).abs() < 1e-6, "cross-Kerr {}", c.delta);
    assert!((c.e_l1 - 86.8794).abs() < 1e-3);
    assert!((c.omega1 - 26.098551).abs() < 1e-5);
    assert!((c.omega2 - 22.898349).abs() < 1e-5);
    assert!((c.dressed1 - 24.396524).abs() < 1e-5);
    assert!((c.dressed2 - 21.107774).abs() < 1e-5);

    let mhz = to_mhz(c.delta, DEFAULT_E_C_BARE_MHZ);
    assert!((mhz - 170.371).abs() < 0.01, "cross-Kerr {mhz} MHz");
}

#[test]
fn closed_forms_match_hand_arithmetic() {
    // Reference design at alpha = 0.043. The capacitance inverse is exact
    // rational: C_c = 1/48, E_C = 49/50, E_cap = 1/50.
    let p = CircuitParams::reference_design();
    assert!((p.c_coupling() - 1.0 / 48.0).abs() < 1e-15);
    let c = derive_couplings(&p).unwrap();
    assert!((c.e_c1 - 0.98).abs() < 1e-12);
    assert!((c.e_c2 - 0.98).abs() < 1e-12);
    assert!((c.e_cap - 0.02).abs() < 1e-12);

    // Quadratic and quartic coupler scales by hand: 1200*0.043 = 51.6.
    assert!((c.e_ind - (51.6 + 255.0 - 300.0)).abs() < 1e-9);
    assert!((c.e_kerr - (51.6 - 1200.0 / 64.0)).abs() < 1e-9);
    assert!((c.e_l1 - 86.6).abs() < 1e-9);
    assert!((c.e_l2 - 66.6).abs() < 1e-9);

    let x = 2.0 * 0.98 / 86.6;
    let y = 2.0 * 0.98 / 66.6;
    assert!((c.x - x).abs() < 1e-12);
    assert!((c.delta - (51.6 - 18.75) * (x * y).sqrt()).abs() < 1e-9);
    assert!((c.delta - 0.84780385).abs() < 1e-7);
    assert!((c.omega1 - (8.0f64 * 0.98 * 86.6).sqrt()).abs() < 1e-9);
    assert!((c.anharm1 + (80.0 + 32.85) * 0.98 / 86.6).abs() < 1e-9);
    assert!((c.dressed1 - (c.omega1 + c.anharm1 - c.delta / 2.0)).abs() < 1e-12);
    assert!((c.j_hop - (c.j_cap + c.j_ind + c.j_nonlin)).abs() < 1e-12);
    assert!(c.warnings.is_empty());
}

#[test]
fn sweep_csv_is_identical_across_thread_pools() {
    let p = CircuitParams::reference_design();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| sweep_alpha(&p, (0.01, 0.08), 200).unwrap().to_csv())
    };
    let single = run(1);
    let multi = run(4);
    assert_eq!(single, multi);
    assert!(single.starts_with("alpha,J_cap,J_ind,J_nonlin,J_hop,Delta,delta1,delta2\r\n"));
    assert_eq!(single.lines().count(), 201);
}

#[test]
fn sweep_filters_rows_the_closed_forms_reject() {
    // A softer shunt makes E_L2 nonpositive below alpha = 7/60: those rows
    // carry errors and stay out of the CSV.
    let mut p = CircuitParams::reference_design();
    p.e_l = 100.0;
    let sweep = sweep_alpha(&p, (0.05, 0.15), 11).unwrap();
    assert_eq!(sweep.rows.len(), 11);
    let bad: Vec<&_> = sweep.rows.iter().filter(|r| r.result.is_none()).collect();
    assert_eq!(bad.len(), 7);
    assert!(bad.iter().all(|r| r.error.as_deref().unwrap_or("").contains("inductive")));
    assert_eq!(sweep.to_csv().lines().count(), 1 + 4);

    assert!(matches!(
        sweep_alpha(&p, (0.1, 0.1), 5),
        Err(Error::InvalidArgument(_))
    ));
    assert!(matches!(
        sweep_alpha(&p, (0.01, 0.08), 1),
        Err(Error::InvalidArgument(_))
    ));
}

#[test]
fn cancellation_requires_a_sign_change() {
    // Without the array branch J_hop does not depend on alpha, so no root.
    let mut p = CircuitParams::reference_design();
    p.e_j = 0.0;
    assert!(matches!(find_cancellation(&p), Err(Error::NotFound(_))));
}

#[test]
fn design_validation_catches_hard_violations() {
    let base = CircuitParams::reference_design();
    let mut p = base.clone();
    p.e_j1 = 0.0;
    assert!(matches!(p.validate(), Err(Error::InvalidArgument(_))));
    p = base.clone();
    p.c_j2 = 0.0;
    assert!(matches!(p.validate(), Err(Error::InvalidArgument(_))));
    p = base.clone();
    p.c_a = -0.1;
    assert!(matches!(p.validate(), Err(Error::InvalidArgument(_))));
    p = base.clone();
    p.n_j = 0;
    assert!(matches!(p.validate(), Err(Error::InvalidArgument(_))));
    p = base.clone();
    p.alpha = f64::NAN;
    assert!(matches!(p.validate(), Err(Error::InvalidArgument(_))));

    // Soft array junctions collapse the stiffness budget.
    p = base.clone();
    p.e_j = 100.0;
    p.c_a = 0.1;
    assert!(matches!(p.validate(), Err(Error::UnphysicalDesign(_))));

    // A strongly negative net inductance breaks the mode expansion.
    p = base.clone();
    p.e_l = 100.0;
    p.alpha = 0.05;
    assert!(matches!(derive_couplings(&p), Err(Error::UnphysicalDesign(_))));
}

#[test]
fn design_validation_warns_on_soft_issues() {
    let mut p = CircuitParams::reference_design();
    p.phi_ext = 3.0 * std::f64::consts::PI;
    let warnings = p.validate().unwrap();
    assert_eq!(warnings.len(), 1);
    assert!(warnings[0].contains("phi_ext"));

    // Driving a mode out of the transmon regime is allowed but flagged.
    let mut q = CircuitParams::reference_design();
    q.e_j1 = 10.0;
    let c = derive_couplings(&q).unwrap();
    assert!(c.warnings.iter().any(|w| w.contains("transmon")));
}

#[test]
fn operating_point_is_a_false_vacuum() {
    let (p, alpha_star) = at_cancellation();
    let rep = potential_minimum_check(&p, 96).unwrap();

    // The bias phi_ext = N_J*pi makes the origin exactly stationary, at
    // U(0,0) = N_J*E_J − E_J1 − E_J2 − alpha*E_J.
    assert!(rep.origin.0.abs() < 1e-9 && rep.origin.1.abs() < 1e-9);
    let expect = 4800.0 - 140.0 - alpha_star * 1200.0;
    assert!((rep.origin_value - expect).abs() < 1e-9);

    // Hessian against the analytic curvature k = E_L + alpha*E_J − E_J/N_J.
    let k = 255.0 + alpha_star * 1200.0 - 300.0;
    assert!((rep.hessian[0][0] - (80.0 + k)).abs() < 1e-3);
    assert!((rep.hessian[1][1] - (60.0 + k)).abs() < 1e-3);
    assert!((rep.hessian[0][1] + k).abs() < 1e-3);
    assert!((rep.hessian[1][0] + k).abs() < 1e-3);
    assert!(rep.hessian_eigenvalues.0 > 0.0);
    assert!(rep.locally_stable);

    // A deeper basin exists at large coupler excursion: the operating point
    // is metastable. The potential is even, so the minimum comes in a
    // symmetric pair.
    assert!(rep.metastable);
    assert!((rep.global_value - 4568.08).abs() < 0.02, "global {}", rep.global_value);
    assert!((rep.global.0.abs() - 0.628).abs() < 5e-3);
    assert!((rep.global.1.abs() - 5.381).abs() < 5e-3);
    assert!(rep.global.0 * rep.global.1 > 0.0);
    assert!(rep.global_value < rep.origin_value);

    assert!(matches!(
        potential_minimum_check(&p, 8),
        Err(Error::InvalidArgument(_))
    ));
}

#[test]
fn potential_is_even_and_shift_symmetric() {
    let (p, _) = at_cancellation();
    let two_pi = 2.0 * std::f64::consts::PI;
    for (a, b) in [(0.3, -1.2), (2.0, 0.7), (-0.63, -5.38)] {
        let u = total_potential(&p, a, b);
        assert!((u - total_potential(&p, -a, -b)).abs() < 1e-9);
        assert!((u - total_potential(&p, a + two_pi, b + two_pi)).abs() < 1e-8);
    }
}

#[test]
fn numeric_diagonalization_confirms_closed_form_regime() {
    let (p, _) = at_cancellation();
    let v = numeric_validate(&p, 10).unwrap();
    assert!((v.delta_numeric - 0.918515).abs() < 2e-6, "Delta {}", v.delta_numeric);
    assert!((v.delta_numeric_doubled - 0.918349).abs() < 2e-6);
    assert!(v.relative_shift < 0.01, "doubling moved {:.3}%", 100.0 * v.relative_shift);
    assert!((v.relative_shift - 1.81e-4).abs() < 3e-5);
    assert!((v.relative_deviation - 0.0783).abs() < 1e-3);
    assert!(v.relative_deviation < 0.25);
    assert!((v.j_numeric + 0.081665).abs() < 2e-6, "J {}", v.j_numeric);
    assert!(v.overlaps[0] > 0.999);
    assert!(v.overlaps[1] > 0.998);
    assert!(v.overlaps[2] > 0.998);
    assert!(v.overlaps[3] > 0.96);
    assert!(v.warnings.is_empty());
}

#[test]
fn numeric_diagonalization_of_decoupled_circuit_is_inert() {
    let mut p = CircuitParams::reference_design();
    p.alpha = 0.0;
    p.e_j = 0.0;
    p.e_l = 0.0;
    p.c_a = 0.0;
    let v = numeric_validate(&p, 10).unwrap();
    assert!(v.delta_numeric.abs() < 1e-10, "Delta {}", v.delta_numeric);
    assert!(v.j_numeric.abs() < 1e-20, "J {}", v.j_numeric);
    assert_eq!(v.delta_closed_form, 0.0);
}

#[test]
fn numeric_diagonalization_gates_on_convergence() {
    let (p, _) = at_cancellation();
    assert!(matches!(numeric_validate(&p, 4), Err(Error::IncreaseLevels(_))));
    assert!(matches!(numeric_validate(&p, 3), Err(Error::InvalidArgument(_))));
    assert!(matches!(numeric_validate(&p, 41), Err(Error::InvalidArgument(_))));
}

#[test]
fn stray_next_neighbor_coupling_is_small() {
    let (p, _) = at_cancellation();
    let ct = crosstalk_estimate(&p).unwrap();
    assert!((ct.e_cap_13 - 1.0 / 2499.0).abs() < 1e-12);
    assert!((ct.j_crosstalk / 0.0053284 - 1.0).abs() < 1e-4, "J13 {}", ct.j_crosstalk);
    assert!(ct.j_crosstalk > 0.002 && ct.j_crosstalk < 0.006);
    assert!(ct.x1 > 0.0);
}

#[test]
fn resonator_mediated_coupling_closed_form() {
    let j = resonator_mediated_j(0.1, 25.0, -1.0, 30.0).unwrap();
    let expect = 0.01 * (1.0 / -5.0 - 1.0 / -6.0);
    assert!((j - expect).abs() < 1e-15);
    assert!(matches!(
        resonator_mediated_j(0.1, 25.0, -1.0, 25.0),
        Err(Error::InvalidArgument(_))
    ));
    assert!(matches!(
        resonator_mediated_j(0.1, 25.0, -1.0, 24.0),
        Err(Error::InvalidArgument(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn derived_quantities_stay_consistent(
        e_j1 in 40.0f64..120.0,
        e_j2 in 40.0f64..120.0,
        alpha in 0.01f64..0.2,
    ) {
        let mut p = CircuitParams::reference_design();
        p.e_j1 = e_j1;
        p.e_j2 = e_j2;
        p.alpha = alpha;
        let c = derive_couplings(&p).unwrap();
        prop_assert!(c.x > 0.0 && c.y > 0.0);
        prop_assert!(c.e_c1 > 0.0 && c.e_cap > 0.0);
        prop_assert!((c.j_hop - (c.j_cap + c.j_ind + c.j_nonlin)).abs() < 1e-12);
        prop_assert!((c.dressed1 - (c.omega1 + c.anharm1 - c.delta / 2.0)).abs() < 1e-12);
        prop_assert!((c.dressed2 - (c.omega2 + c.anharm2 - c.delta / 2.0)).abs() < 1e-12);
        prop_assert!(c.omega1 > 0.0 && c.omega2 > 0.0);
    }

    #[test]
    fn cancellation_root_really_cancels(
        e_j1 in 60.0f64..100.0,
        e_l in 200.0f64..300.0,
    ) {
        let mut p = CircuitParams::reference_design();
        p.e_j1 = e_j1;
        p.e_l = e_l;
        if let Ok(root) = find_cancellation(&p) {
            prop_assert!(root.alpha_star > 0.0 && root.alpha_star < 0.25);
            let scale = root.at_root.j_cap.abs()
                + root.at_root.j_ind.abs()
                + root.at_root.j_nonlin.abs();
            prop_assert!(root.j_hop_residual.abs() <= 1e-8 * (scale + 1.0));
        }
    }
}
