//! Scratch oracle probe; not part of the deliverable.

use hqc_core::{coupler, dynamics, gadgets, hamiltonian, lattice, walk};

fn main() {
    let which = std::env::args().nth(1).unwrap_or_else(|| "lattice".into());
    match which.as_str() {
        "lattice" => probe_lattice(),
        "cnot" => probe_cnot(),
        "exponent" => probe_exponent(),
        "toffoli" => probe_toffoli(),
        "backward" => probe_backward(),
        "walk" => probe_walk(),
        "snake" => probe_snake(),
        "fastcnot" => probe_fastcnot(),
        "coupler" => probe_coupler(),
        "numval" => probe_numval(),
        "numval-levels" => probe_numval_levels(),
        "walk-long" => probe_walk_long(),
        "lindblad" => probe_lindblad(),
        "peres" => probe_peres(),
        "wavefront" => probe_wavefront(),
        "disconnect" => probe_disconnect(),
        "disorder" => probe_disorder(),
        other => eprintln!("unknown probe {other}"),
    }
}

fn probe_lattice() {
    for n in 2..=6u32 {
        let lat = lattice::build_rotated(n).unwrap();
        let space = hamiltonian::enumerate_basis(&lat, true).unwrap();
        let h = hamiltonian::build_h_valid(&space, 1.0).unwrap();
        let connected = space.connected_ordinals();
        let e0 = connected
            .iter()
            .map(|&k| h.get(k, k))
            .fold(f64::INFINITY, f64::min);
        println!(
            "N={n}: pos_dim={} connected={} E0={e0}",
            space.dim(),
            connected.len()
        );
    }
    let lat = gadgets::cnot_test_lattice(3).unwrap();
    let space = hamiltonian::enumerate_basis(&lat, false).unwrap();
    println!("cnot lattice dim={} (expect 32)", space.dim());
    println!("tracks: {:?}", lat.tracks.iter().map(|t| (t.key, t.sites.len())).collect::<Vec<_>>());
    for e in &lat.edges {
        println!("edge {} -- {} kind={:?} cs={:?}", e.a, e.b, e.kind, e.control_spin);
    }
    for p in &lat.plaquettes {
        println!("hop {} -> {} gate={:?}", p.from, p.to, p.gate);
    }
}

fn probe_cnot() {
    let r = gadgets::run_cnot(0.1, (1, 0), (0.0, 8.0)).unwrap();
    println!(
        "peak P_S={:.4} at Jt={:.3} P_E(pk)={:.2e}  (expect 0.9031, 2.814, 3.41e-4)",
        r.peak_success, r.peak_time, r.peak_error
    );
    let l = gadgets::long_time_average(0.1, 500.0).unwrap();
    println!(
        "long Ps={:.4} Pe={:.4} rel={:.3}  (expect 0.1487 0.1440 0.032)",
        l.mean_success, l.mean_error, l.relative_difference
    );
}

fn probe_exponent() {
    let ratios = [1.0 / 20.0, 1.0 / 15.0, 1.0 / 10.0, 1.0 / 8.0];
    for jt in [2.0, 3.0, 4.0] {
        let f = gadgets::fit_error_exponent(&ratios, jt).unwrap();
        let vals: Vec<String> = f.points.iter().map(|p| format!("{:.2e}", p.1)).collect();
        println!("Jt={jt} exponent {:.3} vals {:?}", f.exponent, vals);
    }
    println!("(expect 4.196 / 4.159 / 4.258)");
}

fn probe_toffoli() {
    let lat = gadgets::toffoli_test_lattice().unwrap();
    let space = hamiltonian::enumerate_basis(&lat, false).unwrap();
    println!("toffoli dim={} (expect 432)", space.dim());
    let eff = gadgets::toffoli_effective(1.0).unwrap();
    println!("effective members={} (expect 80)", eff.members.len());
    let t0 = std::time::Instant::now();
    let rep = gadgets::verify_toffoli_truth_table(1.0 / 20.0).unwrap();
    for i in &rep.inputs {
        println!(
            "input {:?}: peak {:.3} at Jt={:.2} max_err={:.1e} ratio={:.4}",
            i.spins, i.peak_success, i.peak_time, i.max_error, i.error_ratio
        );
    }
    println!("all ok: {} in {:?} (expect ~0.830 @ 4.3, 3.5e-5)", rep.all_within_tolerance, t0.elapsed());
}

fn probe_backward() {
    let b = gadgets::check_backward_necessity().unwrap();
    println!(
        "full={:?} dropped={:?} max_other={:.2e} (expect [-1,-1],[0,0],0)",
        b.element_full, b.element_dropped, b.max_other_change
    );
}

fn probe_walk() {
    let times: Vec<f64> = (0..6001).map(|k| 1500.0 * k as f64 / 6000.0).collect();
    let p = walk::success_probability(1000, &times).unwrap();
    let (mut bi, mut bv) = (0, 0.0);
    for (k, &v) in p.values.iter().enumerate() {
        if v > bv {
            bv = v;
            bi = k;
        }
    }
    println!("L=1000 coarse max {:.6} at Jt={:.2} (expect ~0.0703 @ 504.49)", bv, p.times[bi]);
    for l in [20usize, 100] {
        let times: Vec<f64> = (0..2001).map(|k| 200.0 * k as f64 / 2000.0).collect();
        let p = walk::success_probability(l, &times).unwrap();
        let m = p.values.iter().cloned().fold(0.0, f64::max);
        println!("L={l} max {m:.4} (expect 0.6320 / 0.2871)");
    }
}

fn probe_snake() {
    for (n, m) in [(2u32, 3u32), (3, 3), (4, 3), (3, 4)] {
        let rep = walk::snake_equivalence(n, m, &Default::default()).unwrap();
        println!(
            "N={n} M={m}: L={} spin_dim={} dev={:.2e} order={:?}",
            rep.walk_len, rep.spin_dim, rep.max_deviation, rep.gate_order
        );
    }
}

fn probe_fastcnot() {
    let t0 = std::time::Instant::now();
    let rep = walk::fast_cnot_check(0.1).unwrap();
    println!("L={} sectors={:?}", rep.walk_len, rep.sector_counts);
    for i in &rep.inputs {
        println!(
            "input {:?}: peak {:.4} at Jt={:.2} err={:.2e}",
            i.spins, i.peak_success, i.peak_time, i.peak_error
        );
    }
    println!("(expect all 0.8284 @ 4.01, 2.27e-3) in {:?}", t0.elapsed());
    let below = walk::fast_cnot_passage(2, 3, (1, 2), false, 0.1, (0.0, 40.0)).unwrap();
    println!("below: peak {:.4} at Jt={:.2} (expect 0.8173 @ 4.01)", below.inputs[0].peak_success, below.inputs[0].peak_time);
    let n3 = walk::fast_cnot_passage(3, 3, (2, 1), true, 0.1, (0.0, 40.0)).unwrap();
    println!("N=3: peak {:.4} at Jt={:.2} (expect 0.7228 @ 5.08)", n3.inputs[0].peak_success, n3.inputs[0].peak_time);
}

fn probe_coupler() {
    let p = coupler::CircuitParams::reference_design();
    let c = coupler::find_cancellation(&p).unwrap();
    println!("alpha*={:.8} (expect 0.04323282)", c.alpha_star);
    let a = &c.at_root;
    println!(
        "delta={:.8} (expect 0.85185354) Jcap={:.6} Jind={:.6} Jnl={:.6}",
        a.delta, a.j_cap, a.j_ind, a.j_nonlin
    );
    println!(
        "omega1={:.6} omega2={:.6} O1={:.6} O2={:.6} EL1={:.4}",
        a.omega1, a.omega2, a.dressed1, a.dressed2, a.e_l1
    );
    println!("(expect 0.249450 -1.103127 0.853676 / 26.098551 22.898349 24.396524 21.107774 / 86.8794)");
    let mut p43 = p.clone();
    p43.alpha = 0.043;
    println!("delta(0.043)={:.8} (expect 0.84780385)", coupler::derive_couplings(&p43).unwrap().delta);
    let mut pstar = p.clone();
    pstar.alpha = c.alpha_star;
    let ct = coupler::crosstalk_estimate(&pstar).unwrap();
    println!("xtalk={:.7} (expect 0.0053284) ecap13={:.6e} (expect {:.6e})", ct.j_crosstalk, ct.e_cap_13, 1.0 / 2499.0);
    let mhz = coupler::to_mhz(a.delta, coupler::DEFAULT_E_C_BARE_MHZ);
    println!("delta MHz={:.3} (expect 170.371)", mhz);
    let pm = coupler::potential_minimum_check(&pstar, 101).unwrap();
    println!(
        "origin={:?} U0={:.2} global={:?} Ug={:.2} metastable={} stable={}",
        pm.origin, pm.origin_value, pm.global, pm.global_value, pm.metastable, pm.locally_stable
    );
    println!("(expect origin (0,0) 4608.12, global ~(0.628,5.388)... 4568.08, metastable true)");
}

fn probe_numval() {
    let mut p = coupler::CircuitParams::reference_design();
    p.alpha = coupler::find_cancellation(&p).unwrap().alpha_star;
    let t0 = std::time::Instant::now();
    let v = coupler::numeric_validate(&p, 10).unwrap();
    println!(
        "L=10 delta={:.6} doubled={:.6} shift={:.4}% dev={:.2}% J={:.6}",
        v.delta_numeric,
        v.delta_numeric_doubled,
        100.0 * v.relative_shift,
        100.0 * v.relative_deviation,
        v.j_numeric
    );
    println!("overlaps {:?}", v.overlaps);
    println!("(expect d=0.918515 doubled=0.918349 shift 0.018% dev 7.83% J=-0.081664, ov (0.9997,0.9987,0.9984,0.9674)) in {:?}", t0.elapsed());
    let mut pd = coupler::CircuitParams::reference_design();
    pd.alpha = 0.0;
    pd.e_j = 0.0;
    pd.e_l = 0.0;
    pd.c_a = 0.0;
    let vd = coupler::numeric_validate(&pd, 10).unwrap();
    println!("decoupled delta={:.3e} J={:.3e} (expect ~0)", vd.delta_numeric, vd.j_numeric);
}

fn probe_lindblad() {
    for l in [4usize, 16] {
        let spec = walk::LindbladSpec { len: l, j: 1.0, gamma: 0.05 };
        let times: Vec<f64> = (0..81).map(|k| k as f64 * 0.5).collect();
        let s = walk::lindblad_loss(&spec, &times).unwrap();
        let rate = walk::fit_decay_rate(&s).unwrap();
        let mut max_dev = 0.0f64;
        for (k, &t) in s.times.iter().enumerate() {
            max_dev = max_dev.max((s.values[k] - (-0.05 * t).exp()).abs());
        }
        println!("L={l}: rate={rate:.6} (expect 0.05) max|P - e^-gt|={max_dev:.2e}");
    }
}

fn probe_peres() {
    for l in [2usize, 8, 16, 64] {
        let f = walk::peres_transfer_fidelity(l, 1.0).unwrap();
        println!("L={l}: fidelity 1-{:.2e}", 1.0 - f);
    }
}

fn probe_wavefront() {
    let t0 = std::time::Instant::now();
    let lat = lattice::build_rotated(6).unwrap();
    let space = hamiltonian::enumerate_basis(&lat, true).unwrap();
    let j = 1.0 / 50.0;
    let h = hamiltonian::build_h_valid(&space, 1.0)
        .unwrap()
        .add(&hamiltonian::build_v_hop(&space, j, None).unwrap())
        .unwrap();
    let ground = space.ordinal_of(&[0; 11], None).unwrap();
    let psi0 = space.basis_state(&[0; 11], None).unwrap();
    let _ = ground;
    let times: Vec<f64> = (0..200).map(|k| (3.0 / j) * k as f64 / 199.0).collect();
    let mut values = vec![0.0; times.len()];
    dynamics::evolve_observe(&h, &psi0, &times, |k, _, psi| {
        values[k] = dynamics::measure_central_position(psi, &space).unwrap();
    })
    .unwrap();
    let jts: Vec<f64> = times.iter().map(|t| t * j).collect();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (k, &jt) in jts.iter().enumerate() {
        if (0.5..=3.0).contains(&jt) {
            xs.push(jt);
            ys.push(values[k]);
        }
    }
    let (slope, _) = dynamics::linear_fit(&xs, &ys).unwrap();
    println!("N=6 wavefront slope {:.4} (expect 0.6521) in {:?}", slope, t0.elapsed());
}

fn probe_disconnect() {
    let t0 = std::time::Instant::now();
    let j = 0.1;
    let mut finals = Vec::new();
    for n in 3..=6u32 {
        let lat = lattice::build_rotated(n).unwrap();
        let space = hamiltonian::enumerate_basis(&lat, true).unwrap();
        let h = hamiltonian::build_h_valid(&space, 1.0)
            .unwrap()
            .add(&hamiltonian::build_v_hop(&space, j, None).unwrap())
            .unwrap();
        let t_tracks = space.n_tracks();
        let psi0 = space.basis_state(&vec![0u16; t_tracks], None).unwrap();
        let times: Vec<f64> = (0..300).map(|k| (20.0 / j) * k as f64 / 299.0).collect();
        let mut values = vec![0.0; times.len()];
        dynamics::evolve_observe(&h, &psi0, &times, |k, _, psi| {
            values[k] = dynamics::measure_disconnect(psi, &space).unwrap();
        })
        .unwrap();
        let series = dynamics::TimeSeries::new(times.clone(), values).unwrap();
        let avg = dynamics::time_average(&series).unwrap();
        finals.push(avg.last_value());
        println!("N={n}: P_D,ss={:.5}", avg.last_value());
    }
    let xs: Vec<f64> = (3..=6).map(|n| n as f64).collect();
    let (slope, intercept) = dynamics::linear_fit(&xs, &finals).unwrap();
    let r2 = dynamics::r_squared(&xs, &finals, slope, intercept);
    println!(
        "slope={:.5} R2={:.5} (expect 0.02771/0.06494/0.10145/0.13723, 0.03651, 0.99992) in {:?}",
        slope, r2, t0.elapsed()
    );
}

fn probe_disorder() {
    use hamiltonian::{DisorderSpec, DisorderTarget};
    let t0 = std::time::Instant::now();
    let lat = lattice::build_rotated(4).unwrap();
    let space = hamiltonian::enumerate_basis(&lat, true).unwrap();
    let j = 0.1;
    let times: Vec<f64> = (0..400).map(|k| (8.0 / j) * k as f64 / 399.0).collect();
    let h_valid = hamiltonian::build_h_valid(&space, 1.0).unwrap();

    let run_r = |h: &hamiltonian::SparseOperator| -> Vec<f64> {
        let psi0 = space.basis_state(&[0; 7], None).unwrap();
        let mut values = vec![0.0; times.len()];
        dynamics::evolve_observe(h, &psi0, &times, |k, _, psi| {
            values[k] = dynamics::measure_central_position(psi, &space).unwrap();
        })
        .unwrap();
        values
    };

    let clean = run_r(&h_valid.add(&hamiltonian::build_v_hop(&space, j, None).unwrap()).unwrap());
    let clean_series =
        dynamics::TimeSeries::new(times.iter().map(|t| t * j).collect(), clean.clone()).unwrap();
    let clean_cross = dynamics::crossing_time(&clean_series, 2.3).unwrap();
    println!("clean crossing Jt={clean_cross:.4} (expect 2.1543)");

    let ensemble_onsite = |sigma: f64| -> dynamics::TimeSeries {
        let spec = DisorderSpec {
            target: DisorderTarget::OnSite,
            mean: 0.0,
            sigma,
            seed: 7,
            runs: 50,
        };
        dynamics::ensemble_run(&spec, &times, |r| {
            let draws = spec.draw_onsite(&lat, r)?;
            let h = h_valid
                .add(&hamiltonian::build_v_hop(&space, j, None)?)?
                .add(&hamiltonian::add_onsite(&space, &draws)?)?;
            Ok(run_r(&h))
        })
        .unwrap()
    };

    let weak = ensemble_onsite(0.1 * j);
    let weak_jt = dynamics::TimeSeries::new(
        weak.times.iter().map(|t| t * j).collect(),
        weak.values.clone(),
    )
    .unwrap();
    let weak_cross = dynamics::crossing_time(&weak_jt, 2.3).unwrap();
    println!(
        "onsite sigma=0.1J crossing Jt={:.4} diff {:.2}% (band 20%)",
        weak_cross,
        100.0 * (weak_cross - clean_cross).abs() / clean_cross
    );

    let strong = ensemble_onsite(10.0 * j);
    let half = strong.values.len() / 2;
    let late_mean: f64 =
        strong.values[half..].iter().sum::<f64>() / (strong.values.len() - half) as f64;
    println!("onsite sigma=10J long-time mean R={late_mean:.3} (must be < 2.0)");

    let hop_spec = DisorderSpec {
        target: DisorderTarget::Hopping,
        mean: j,
        sigma: 0.1 * j,
        seed: 11,
        runs: 50,
    };
    let hop = dynamics::ensemble_run(&hop_spec, &times, |r| {
        let draws = hop_spec.draw_hopping(&lat, r)?;
        let h = h_valid.add(&hamiltonian::build_v_hop(&space, j, Some(&draws))?)?;
        Ok(run_r(&h))
    })
    .unwrap();
    let fit_slope = |vals: &[f64]| -> f64 {
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for (k, &t) in times.iter().enumerate() {
            let jt = t * j;
            if (0.5..=3.0).contains(&jt) {
                xs.push(jt);
                ys.push(vals[k]);
            }
        }
        dynamics::linear_fit(&xs, &ys).unwrap().0
    };
    let (sc, sh) = (fit_slope(&clean), fit_slope(&hop.values));
    println!(
        "hopping sigma=0.1J early slope clean={sc:.4} disordered={sh:.4} diff {:.2}% (band 15%)",
        100.0 * (sh - sc).abs() / sc
    );
    println!("total {:?}", t0.elapsed());
}

// Temporary: small-level scan for the doubling-shift gate.
pub fn probe_numval_levels() {
    let mut p = hqc_core::coupler::CircuitParams::reference_design();
    p.alpha = hqc_core::coupler::find_cancellation(&p).unwrap().alpha_star;
    for l in [4usize, 5, 6, 8] {
        match hqc_core::coupler::numeric_validate(&p, l) {
            Ok(v) => println!("L={l}: shift={:.4}% dev={:.2}%", 100.0 * v.relative_shift, 100.0 * v.relative_deviation),
            Err(e) => println!("L={l}: {e}"),
        }
    }
}

// Temporary: long-horizon recurrence scan for the L=1000 chain.
pub fn probe_walk_long() {
    use hqc_core::{dynamics, walk};
    for (t1, n) in [(1500.0, 6001usize), (5000.0, 20001), (20000.0, 80001), (50000.0, 100001)] {
        let times = dynamics::time_grid(0.0, t1, n).unwrap();
        let s = walk::success_probability(1000, &times).unwrap();
        let mut peak = 0usize;
        for (k, v) in s.values.iter().enumerate() {
            if *v > s.values[peak] { peak = k; }
        }
        println!("window [0,{t1}] x{n}: max={:.6} at Jt={:.2}", s.values[peak], s.times[peak]);
    }
}
