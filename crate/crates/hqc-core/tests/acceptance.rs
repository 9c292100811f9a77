//! Full acceptance gate. One check per shipping criterion, each printing a
//! single PASS or FAIL line (run with `--nocapture` to see the PASS lines;
//! FAIL output always surfaces).
//!
//! Two checks fail by design and document real discrepancies instead of
//! loosening their bands:
//! - A08: the cross-Kerr at the cancellation point is 0.8519 E_C, 0.2%
//!   above the required [0.75, 0.85] window, while every neighbouring
//!   requirement (alpha*, C_c/C_J, the MHz conversion) passes. The window
//!   is mis-centred relative to its own MHz companion (0.8519*200 MHz =
//!   170.4 MHz sits comfortably inside 160 MHz +/- 10%).
//! - A11: the end-to-end transfer maximum of the 1000-site uniform chain is
//!   0.0703 (global over Jt <= 50000, peak at Jt = 504.5), below the
//!   required 0.1 +/- 0.02. The companion check (analytic propagator vs
//!   direct evolution to 1e-9) passes, so the number itself is trustworthy.

mod common;

use hqc_core::coupler::{
    crosstalk_estimate, find_cancellation, numeric_validate, to_mhz, CircuitParams,
    DEFAULT_E_C_BARE_MHZ,
};
use hqc_core::dynamics::{self, TimeSeries};
use hqc_core::error::Result;
use hqc_core::gadgets::{
    check_backward_necessity, fit_error_exponent, long_time_average, run_cnot, toffoli_effective,
    verify_toffoli_truth_table,
};
use hqc_core::gatesynth::{verify_cz_from_h_cnot, verify_toffoli_synthesis, verify_v_squared};
use hqc_core::hamiltonian::{
    add_onsite, build_h_valid, build_v_hop, enumerate_basis, DisorderSpec, DisorderTarget,
    SparseOperator, StateSpace,
};
use hqc_core::lattice::build_rotated;
use hqc_core::walk::{
    fast_cnot_check, fit_decay_rate, lindblad_loss, peres_transfer_fidelity, snake_walk,
    success_probability, walk_hamiltonian, LindbladSpec,
};
use nalgebra::Complex;

type Complex64 = Complex<f64>;

fn report(id: u32, pass: bool, detail: &str) {
    println!("A{id:02} {} - {detail}", if pass { "PASS" } else { "FAIL" });
}

/// Rotated-lattice setup shared by the transport checks: position-only
/// basis, H = validity + hopping at strength j (Delta = 1).
fn transport(n: u32, j: f64) -> (StateSpace, SparseOperator, Vec<Complex64>) {
    let lat = build_rotated(n).unwrap();
    let space = enumerate_basis(&lat, true).unwrap();
    let h = build_h_valid(&space, 1.0)
        .unwrap()
        .add(&build_v_hop(&space, j, None).unwrap())
        .unwrap();
    let zeros = vec![0u16; space.n_tracks()];
    let psi0 = space.basis_state(&zeros, None).unwrap();
    (space, h, psi0)
}

fn observe_series(
    h: &SparseOperator,
    psi0: &[Complex64],
    times: &[f64],
    mut f: impl FnMut(&[Complex64]) -> f64,
) -> Vec<f64> {
    let mut values = vec![0.0; times.len()];
    dynamics::evolve_observe(h, psi0, times, |k, _, psi| values[k] = f(psi)).unwrap();
    values
}

#[test]
fn a01_wavefront_velocity() {
    let started = std::time::Instant::now();
    let j = 1.0 / 50.0;
    let (space, h, psi0) = transport(6, j);
    let times = dynamics::time_grid(0.0, 3.0 / j, 200).unwrap();
    let values = observe_series(&h, &psi0, &times, |psi| {
        dynamics::measure_central_position(psi, &space).unwrap()
    });
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (k, &t) in times.iter().enumerate() {
        let jt = t * j;
        if (0.5..=3.0).contains(&jt) {
            xs.push(jt);
            ys.push(values[k]);
        }
    }
    let (slope, _) = dynamics::linear_fit(&xs, &ys).unwrap();
    let elapsed = started.elapsed();
    let pass = (slope - 0.6).abs() < 0.1 && elapsed.as_secs() < 120;
    report(
        1,
        pass,
        &format!("N=6 wavefront slope {slope:.4} (band 0.6 +/- 0.1) in {elapsed:.1?}"),
    );
    assert!(pass, "slope {slope} or runtime {elapsed:?} out of range");
}

#[test]
fn a02_disconnect_scaling() {
    let j = 0.1;
    let mut finals = Vec::new();
    for n in 3..=6u32 {
        let (space, h, psi0) = transport(n, j);
        let times = dynamics::time_grid(0.0, 20.0 / j, 300).unwrap();
        let values = observe_series(&h, &psi0, &times, |psi| {
            dynamics::measure_disconnect(psi, &space).unwrap()
        });
        let avg = dynamics::time_average(&TimeSeries::new(times, values).unwrap()).unwrap();
        finals.push(avg.last_value());
    }
    let xs: Vec<f64> = (3..=6).map(f64::from).collect();
    let (slope, intercept) = dynamics::linear_fit(&xs, &finals).unwrap();
    let r2 = dynamics::r_squared(&xs, &finals, slope, intercept);
    let pass = slope > 0.0 && r2 > 0.9;
    report(
        2,
        pass,
        &format!("steady disconnect vs N: slope {slope:.4}, R^2 {r2:.5} (need > 0.9, positive)"),
    );
    assert!(pass, "slope {slope}, R^2 {r2}");
}

#[test]
fn a03_error_exponent() {
    let ratios = [1.0 / 20.0, 1.0 / 15.0, 1.0 / 10.0, 1.0 / 8.0];
    let fit = |jt: f64| fit_error_exponent(&ratios, jt).unwrap().exponent;
    let (e2, e3, e4) = (fit(2.0), fit(3.0), fit(4.0));
    let pass = (e3 - 4.0).abs() < 0.5 && (e2 - e3).abs() < 0.5 && (e4 - e3).abs() < 0.5;
    report(
        3,
        pass,
        &format!("leakage exponent {e3:.3} at Jt=3 (4 +/- 0.5); Jt=2/4 give {e2:.3}/{e4:.3}"),
    );
    assert!(pass, "exponents {e2}/{e3}/{e4}");
}

#[test]
fn a04_cnot_snapshot() {
    let res = run_cnot(0.1, (1, 0), (0.0, 8.0)).unwrap();
    let pass =
        (res.peak_time - 3.0).abs() <= 1.0 && res.peak_error <= 0.02 && res.peak_success > 0.8;
    report(
        4,
        pass,
        &format!(
            "success peak {:.4} at Jt={:.3} (3 +/- 1), error there {:.2e} (<= 0.02)",
            res.peak_success, res.peak_time, res.peak_error
        ),
    );
    assert!(pass, "peak {} at {}, error {}", res.peak_success, res.peak_time, res.peak_error);
}

#[test]
fn a05_long_time_symmetry() {
    let rep = long_time_average(0.1, 500.0).unwrap();
    let pass = rep.relative_difference < 0.15;
    report(
        5,
        pass,
        &format!(
            "Jt=500 averages: success {:.4}, error {:.4}, relative gap {:.3} (< 0.15)",
            rep.mean_success, rep.mean_error, rep.relative_difference
        ),
    );
    assert!(pass, "relative gap {}", rep.relative_difference);
}

#[test]
fn a06_localization() {
    let j = 0.1;
    let lat = build_rotated(4).unwrap();
    let space = enumerate_basis(&lat, true).unwrap();
    let h_valid = build_h_valid(&space, 1.0).unwrap();
    let times = dynamics::time_grid(0.0, 8.0 / j, 400).unwrap();
    let zeros = vec![0u16; space.n_tracks()];

    let run_r = |h: &SparseOperator| -> Vec<f64> {
        let psi0 = space.basis_state(&zeros, None).unwrap();
        observe_series(h, &psi0, &times, |psi| {
            dynamics::measure_central_position(psi, &space).unwrap()
        })
    };
    let to_jt = |values: Vec<f64>| -> TimeSeries {
        TimeSeries::new(times.iter().map(|t| t * j).collect(), values).unwrap()
    };

    let clean = to_jt(run_r(&h_valid.add(&build_v_hop(&space, j, None).unwrap()).unwrap()));
    let clean_cross = dynamics::crossing_time(&clean, 2.3).unwrap();

    let ensemble = |sigma: f64| -> TimeSeries {
        let spec =
            DisorderSpec { target: DisorderTarget::OnSite, mean: 0.0, sigma, seed: 7, runs: 50 };
        dynamics::ensemble_run(&spec, &times, |r| {
            let draws = spec.draw_onsite(&lat, r)?;
            let h = h_valid
                .add(&build_v_hop(&space, j, None)?)?
                .add(&add_onsite(&space, &draws)?)?;
            Ok(run_r(&h))
        })
        .unwrap()
    };

    let weak = to_jt(ensemble(0.1 * j).values);
    let weak_cross = dynamics::crossing_time(&weak, 2.3).unwrap();
    let cross_diff = (weak_cross - clean_cross).abs() / clean_cross;

    let strong = ensemble(10.0 * j);
    let half = strong.values.len() / 2;
    let late_mean: f64 =
        strong.values[half..].iter().sum::<f64>() / (strong.values.len() - half) as f64;

    let pass = cross_diff < 0.20 && late_mean < 2.0;
    report(
        6,
        pass,
        &format!(
            "sigma=0.1J crossing Jt {weak_cross:.3} vs clean {clean_cross:.3} ({:.1}% < 20%); \
             sigma=10J late mean R {late_mean:.3} (< 2.0)",
            100.0 * cross_diff
        ),
    );
    assert!(pass, "crossing diff {cross_diff}, late mean {late_mean}");
}

#[test]
fn a07_toffoli_logic() {
    // Projection against the independently tabulated reference.
    let eff = toffoli_effective(1.0).unwrap();
    let (valid, block) = common::project_ground(&common::toffoli_hand_built(1.0, 1.0, None));
    let to_ref = common::ordinal_to_reference();
    let dense = eff.op.to_dense();
    let mut worst = 0.0f64;
    for (i, &mi) in eff.members.iter().enumerate() {
        let vi = valid.binary_search(&to_ref[&mi]).unwrap();
        for (j, &mj) in eff.members.iter().enumerate() {
            let vj = valid.binary_search(&to_ref[&mj]).unwrap();
            worst = worst.max((dense[(i, j)] - block[vi][vj]).abs());
        }
    }
    let project_ok = worst <= 1e-12 && eff.members.len() == valid.len();

    let table = verify_toffoli_truth_table(1.0 / 20.0).unwrap();
    let max_ratio = table
        .inputs
        .iter()
        .map(|i| i.error_ratio)
        .fold(0.0, f64::max);

    let back = check_backward_necessity().unwrap();
    let back_ok = back.element_dropped == [0.0; 2]
        && back.max_other_change == 0.0
        && back.element_full.iter().all(|&e| (e + 1.0).abs() < 1e-12);

    let pass = project_ok && table.all_within_tolerance && back_ok;
    report(
        7,
        pass,
        &format!(
            "projection vs hand-built worst {worst:.2e} (<= 1e-12); truth-table worst \
             error/success {max_ratio:.4} (< 0.05 on all 8 inputs); backward hop removal exact"
        ),
    );
    assert!(pass, "projection {project_ok}, table {}, backward {back_ok}", table.all_within_tolerance);
}

#[test]
fn a08_coupler_design_point() {
    let p = CircuitParams::reference_design();
    let root = find_cancellation(&p).unwrap();
    let alpha = root.alpha_star;
    let delta = root.at_root.delta;
    let cc_ratio = p.c_coupling() / p.c_j1;
    let mhz = to_mhz(delta, DEFAULT_E_C_BARE_MHZ);

    let alpha_ok = (alpha - 0.043).abs() <= 0.002;
    let delta_ok = (delta - 0.80).abs() <= 0.05;
    let cc_ok = (cc_ratio - 1.0 / 48.0).abs() <= 0.15 / 48.0;
    let mhz_ok = (mhz - 160.0).abs() <= 16.0;

    let pass = alpha_ok && delta_ok && cc_ok && mhz_ok;
    report(
        8,
        pass,
        &format!(
            "alpha* {alpha:.6} ({}), Delta(alpha*) {delta:.4} in [0.75, 0.85] ({}), \
             C_c/C_J 1/48 ({}), {mhz:.1} MHz in 160 +/- 10% ({})",
            ok(alpha_ok),
            ok(delta_ok),
            ok(cc_ok),
            ok(mhz_ok)
        ),
    );
    assert!(
        pass,
        "cross-Kerr at the cancellation point is {delta:.6} E_C, 0.2% above the required \
         [0.75, 0.85] window; the closed forms place it at 0.851854 with no free parameter, \
         and the companion MHz requirement ({mhz:.1} MHz in 160 +/- 10%) accepts the same \
         number, so the window itself is mis-centred"
    );
}

fn ok(b: bool) -> &'static str {
    if b { "ok" } else { "FAIL" }
}

#[test]
fn a09_crosstalk() {
    let mut p = CircuitParams::reference_design();
    p.alpha = find_cancellation(&p).unwrap().alpha_star;
    let ct = crosstalk_estimate(&p).unwrap();
    let pass = (ct.j_crosstalk - 0.004).abs() <= 0.002;
    report(
        9,
        pass,
        &format!("next-neighbour J {:.5} E_C (0.004 +/- 50%)", ct.j_crosstalk),
    );
    assert!(pass, "J_xtalk {}", ct.j_crosstalk);
}

#[test]
fn a10_numeric_oracle() {
    let mut p = CircuitParams::reference_design();
    p.alpha = find_cancellation(&p).unwrap().alpha_star;
    let v = numeric_validate(&p, 10).unwrap();
    let pass = v.relative_deviation < 0.25 && v.relative_shift < 0.01;
    report(
        10,
        pass,
        &format!(
            "two-mode diagonalization: Delta {:.6} vs closed form {:.6} ({:.1}% < 25%), \
             doubling shift {:.3}% (< 1%)",
            v.delta_numeric,
            v.delta_closed_form,
            100.0 * v.relative_deviation,
            100.0 * v.relative_shift
        ),
    );
    assert!(pass, "deviation {}, shift {}", v.relative_deviation, v.relative_shift);
}

#[test]
fn a11_walk_results() {
    // Long-chain transfer maximum on the survey grid (the peak is global:
    // extending the window to Jt = 50000 finds nothing higher).
    let times = dynamics::time_grid(0.0, 1500.0, 6001).unwrap();
    let series = success_probability(1000, &times).unwrap();
    let (mut pk, mut pk_t) = (0.0f64, 0.0f64);
    for (&t, &v) in series.times.iter().zip(&series.values) {
        if v > pk {
            pk = v;
            pk_t = t;
        }
    }
    let peak_ok = (pk - 0.1).abs() <= 0.02;

    // Analytic propagator against direct evolution.
    let mut worst = 0.0f64;
    for l in [20usize, 100] {
        let grid = dynamics::time_grid(0.5, 60.0, 40).unwrap();
        let analytic = success_probability(l, &grid).unwrap();
        let h = walk_hamiltonian(l, 1.0).unwrap();
        let mut psi0 = vec![Complex64::new(0.0, 0.0); l];
        psi0[0] = Complex64::new(1.0, 0.0);
        dynamics::evolve_observe_with(&h, &psi0, &grid, 30, 1e-12, |k, _, psi| {
            worst = worst.max((psi[l - 1].norm_sqr() - analytic.values[k]).abs());
        })
        .unwrap();
    }
    let agree_ok = worst <= 1e-9;

    let pass = peak_ok && agree_ok;
    report(
        11,
        pass,
        &format!(
            "L=1000 transfer max {pk:.4} at Jt={pk_t:.1} vs required 0.1 +/- 0.02 ({}); \
             analytic vs evolution worst {worst:.1e} <= 1e-9 ({})",
            ok(peak_ok),
            ok(agree_ok)
        ),
    );
    assert!(
        pass,
        "the 1000-site end-to-end maximum is {pk:.4} (first passage at Jt = {pk_t:.1}, \
         global over Jt <= 50000), below the required 0.1 +/- 0.02; the propagator itself \
         is verified against direct evolution to {worst:.1e}, so the discrepancy is in the \
         required number, not the dynamics"
    );
}

#[test]
fn a12_engineered_transfer() {
    let mut worst = 1.0f64;
    for l in [2usize, 8, 16, 64] {
        worst = worst.min(peres_transfer_fidelity(l, 1.0).unwrap());
    }
    let pass = worst > 1.0 - 1e-9;
    report(
        12,
        pass,
        &format!("engineered-chain fidelity at t=pi/J >= {worst:.12} for L in {{2,8,16,64}}"),
    );
    assert!(pass, "worst fidelity {worst}");
}

#[test]
fn a13_loss_rate_is_length_independent() {
    let gamma = 0.05;
    let mut detail = String::new();
    let mut pass = true;
    for len in [4usize, 16] {
        let spec = LindbladSpec { len, j: 1.0, gamma };
        let times = dynamics::time_grid(0.5, 40.0, 30).unwrap();
        let rate = fit_decay_rate(&lindblad_loss(&spec, &times).unwrap()).unwrap();
        pass &= (rate / gamma - 1.0).abs() < 0.01;
        detail.push_str(&format!("L={len}: rate {rate:.6}; "));
    }
    report(13, pass, &format!("{detail}gamma {gamma} (within 1%)"));
    assert!(pass, "{detail}");
}

#[test]
fn a14_snake_equivalence_and_fast_cnot() {
    let mut tri_ok = true;
    for n in 1..=4u32 {
        for m in 2..=4u32 {
            let walk = snake_walk(n, m, 1.0).unwrap();
            let len = (n * (m - 1) + 1) as usize;
            tri_ok &= walk.len == len;
            for r in 0..len {
                for c in 0..len {
                    let expect = if r.abs_diff(c) == 1 { -1.0 } else { 0.0 };
                    tri_ok &= walk.matrix[(r, c)] == expect;
                }
            }
        }
    }

    let rep = fast_cnot_check(0.1).unwrap();
    let sectors_ok = rep.sector_counts.iter().all(|&c| c == rep.walk_len + 1);
    let mut pk_lo = 1.0f64;
    let mut err_hi = 0.0f64;
    for inp in &rep.inputs {
        pk_lo = pk_lo.min(inp.peak_success);
        err_hi = err_hi.max(inp.peak_error);
    }
    let table_ok = rep.inputs.len() == 4 && pk_lo > 0.8 && err_hi < 0.01;

    let pass = tri_ok && sectors_ok && table_ok;
    report(
        14,
        pass,
        &format!(
            "snake walks tridiagonal exactly for N,M <= 4; fast CNOT: 4 inputs peak >= \
             {pk_lo:.4}, peak error <= {err_hi:.2e}, sector size {} = L+1",
            rep.walk_len + 1
        ),
    );
    assert!(pass, "tridiagonal {tri_ok}, sectors {sectors_ok}, table {table_ok}");
}

#[test]
fn a15_gate_synthesis() {
    let v = verify_v_squared();
    let cz = verify_cz_from_h_cnot();
    let tof = verify_toffoli_synthesis();
    let pass = v.pass && cz.pass && tof.pass;
    report(
        15,
        pass,
        &format!(
            "(ZH)^2 = iY dev {:.1e} (<= 1e-14); CZ assembly dev {:.1e} (<= 1e-14); \
             ancilla Toffoli dev {:.1e} (<= 1e-12)",
            v.max_deviation, cz.max_deviation, tof.max_deviation
        ),
    );
    assert!(pass, "{} / {} / {}", v.detail, cz.detail, tof.detail);
}

#[test]
fn a16_infrastructure_invariants() {
    // Norm conservation over a long dense-grid evolution.
    let (_, h, psi0) = transport(3, 0.1);
    let times = dynamics::time_grid(1.0, 100.0, 60).unwrap();
    let mut norm_drift = 0.0f64;
    dynamics::evolve_observe(&h, &psi0, &times, |_, _, psi| {
        let n: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        norm_drift = norm_drift.max((n - 1.0).abs());
    })
    .unwrap();
    let norm_ok = norm_drift <= 1e-9;

    // Krylov against the dense-eigenbasis oracle at dim 512.
    let l = 512;
    let h = walk_hamiltonian(l, 1.0).unwrap();
    let mut psi0 = vec![Complex64::new(0.0, 0.0); l];
    psi0[0] = Complex64::new(1.0, 0.0);
    let grid = dynamics::time_grid(5.0, 40.0, 8).unwrap();
    let dense = dynamics::evolve_dense(&h, &psi0, &grid).unwrap();
    let mut krylov_dev = 0.0f64;
    dynamics::evolve_observe(&h, &psi0, &grid, |k, _, psi| {
        for (a, b) in psi.iter().zip(&dense[k]) {
            krylov_dev = krylov_dev.max((a - b).norm());
        }
    })
    .unwrap();
    let krylov_ok = krylov_dev <= 1e-8;

    // Byte-identical ensemble CSV under different thread counts.
    let lat = build_rotated(3).unwrap();
    let space = enumerate_basis(&lat, true).unwrap();
    let spec = DisorderSpec {
        target: DisorderTarget::OnSite,
        mean: 0.0,
        sigma: 0.05,
        seed: 42,
        runs: 12,
    };
    let times = dynamics::time_grid(0.0, 50.0, 40).unwrap();
    let job = || -> Result<String> {
        let h_valid = build_h_valid(&space, 1.0)?;
        let series = dynamics::ensemble_run(&spec, &times, |r| {
            let draws = spec.draw_onsite(&lat, r)?;
            let h = h_valid
                .add(&build_v_hop(&space, 0.1, None)?)?
                .add(&add_onsite(&space, &draws)?)?;
            let psi0 = space.basis_state(&[0; 5], None)?;
            let mut values = vec![0.0; times.len()];
            dynamics::evolve_observe(&h, &psi0, &times, |k, _, psi| {
                values[k] = dynamics::measure_central_position(psi, &space).unwrap();
            })?;
            Ok(values)
        })?;
        Ok(series.to_csv())
    };
    let csv_single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(job)
        .unwrap();
    let csv_multi = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap()
        .install(job)
        .unwrap();
    let csv_ok = csv_single == csv_multi;

    let pass = norm_ok && krylov_ok && csv_ok;
    report(
        16,
        pass,
        &format!(
            "norm drift {norm_drift:.1e} (<= 1e-9); Krylov vs dense at dim 512 {krylov_dev:.1e} \
             (<= 1e-8); ensemble CSV byte-identical across 1 and 4 threads ({})",
            ok(csv_ok)
        ),
    );
    assert!(pass, "norm {norm_ok}, krylov {krylov_ok}, csv {csv_ok}");
}
