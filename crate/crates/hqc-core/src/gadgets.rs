//! Controlled-gate gadget experiments on small rotated test lattices.
//!
//! The CNOT gadget splits one target-track site into a spin-labeled pair and
//! conditions passage through the pair on the control particle's spin via
//! spin-selective edges; the entry hop into the spin-1 branch carries an X
//! gate. The Toffoli gadget chains two such splits so the X hop is reachable
//! only when both control particles carry spin 1.
//!
//! Test lattices keep only the tracks that participate, which shortens the
//! effective walk and raises the passage peak without changing the gate
//! logic.

use num_complex::Complex64;

use crate::dynamics::{self, time_grid};
use crate::error::{Error, Result};
use crate::hamiltonian::{enumerate_basis, build_h_valid, build_v_hop, EffectiveOperator,
                         project_effective, SparseOperator, StateSpace};
use crate::lattice::{build_rotated, insert_cnot_region, insert_toffoli_region, restrict_tracks,
                     LatticeSpec, Site};

/// Values of a time-averaged error probability below this are treated as
/// numerically zero and excluded from log-log fits.
pub const ERROR_FLOOR: f64 = 1e-14;

/// Largest hopping ratio for which the perturbative gadget analysis applies.
pub const MAX_J_OVER_DELTA: f64 = 0.25;

/// Passage observables for one gadget run on a Jt grid.
#[derive(Debug, Clone)]
pub struct PassageResult {
    /// Dimensionless times Jt.
    pub times: Vec<f64>,
    /// Probability of the full string at the far end with the correct spins.
    pub p_success: Vec<f64>,
    /// Probability of the full string at the far end with any wrong spins.
    pub p_error: Vec<f64>,
    /// Jt of the global success maximum (earliest grid point on ties).
    pub peak_time: f64,
    pub peak_success: f64,
    /// Error probability at the success peak.
    pub peak_error: f64,
    /// Largest error probability anywhere on the grid.
    pub max_error: f64,
}

/// Time-averaged success and error probabilities at a long horizon.
#[derive(Debug, Clone, Copy)]
pub struct LongTimeReport {
    pub horizon: f64,
    pub mean_success: f64,
    pub mean_error: f64,
    /// |mean_success − mean_error| / max(mean_success, mean_error).
    pub relative_difference: f64,
}

/// Least-squares fit of log(value) against log(ratio).
#[derive(Debug, Clone)]
pub struct ExponentFit {
    pub exponent: f64,
    pub intercept: f64,
    /// (ratio, fitted value) pairs that entered the fit.
    pub points: Vec<(f64, f64)>,
    /// Ratios whose value fell below [`ERROR_FLOOR`].
    pub excluded: Vec<f64>,
    pub warnings: Vec<String>,
}

/// One spin input of the Toffoli truth table.
#[derive(Debug, Clone, Copy)]
pub struct ToffoliInputResult {
    /// (control 1, target, control 2) input spins.
    pub spins: (u8, u8, u8),
    pub peak_time: f64,
    pub peak_success: f64,
    pub max_error: f64,
    /// max_error / peak_success.
    pub error_ratio: f64,
}

#[derive(Debug, Clone)]
pub struct ToffoliReport {
    pub inputs: Vec<ToffoliInputResult>,
    /// True when every input keeps max_error below 5% of its success peak.
    pub all_within_tolerance: bool,
}

/// Effect of removing the identity hop (2,2;0)→(3,3;1) on the effective
/// Hamiltonian, per control-spin context.
#[derive(Debug, Clone)]
pub struct BackwardReport {
    /// ⟨S2,1|H_eff|S1,0⟩ in the (s1=0, s2=1) context, target spin 0 and 1.
    pub element_full: [f64; 2],
    pub element_dropped: [f64; 2],
    /// Largest change anywhere else in the effective matrix.
    pub max_other_change: f64,
}

/// CNOT test lattice: rotated n×n keeping only the target (d=0) and control
/// (d=1) tracks, split inserted at (2,2). n = 3 gives the shortest passage
/// (two control and four target positions).
pub fn cnot_test_lattice(n: u32) -> Result<LatticeSpec> {
    if n < 3 {
        return Err(Error::invalid("CNOT test lattice needs n >= 3"));
    }
    let spec = restrict_tracks(&build_rotated(n)?, &[0, 1])?;
    insert_cnot_region(&spec, Site::new(2, 2))
}

struct Passage {
    h: SparseOperator,
    psi0: Vec<Complex64>,
    success: usize,
    finals: Vec<usize>,
}

impl Passage {
    /// Runs the passage over `points` grid times spanning the Jt window.
    fn run(&self, j: f64, window: (f64, f64), points: usize) -> Result<PassageResult> {
        let jt = time_grid(window.0, window.1, points)?;
        if window.0 < 0.0 {
            return Err(Error::invalid("window must start at Jt >= 0"));
        }
        let times: Vec<f64> = jt.iter().map(|t| t / j).collect();
        let mut p_success = vec![0.0; points];
        let mut p_error = vec![0.0; points];
        dynamics::evolve_observe(&self.h, &self.psi0, &times, |k, _, psi| {
            let ok = psi[self.success].norm_sqr();
            let all: f64 = self.finals.iter().map(|&f| psi[f].norm_sqr()).sum();
            p_success[k] = ok;
            p_error[k] = (all - ok).max(0.0);
        })?;
        let mut peak = 0usize;
        for (k, v) in p_success.iter().enumerate() {
            if *v > p_success[peak] {
                peak = k;
            }
        }
        let max_error = p_error.iter().cloned().fold(0.0f64, f64::max);
        Ok(PassageResult {
            peak_time: jt[peak],
            peak_success: p_success[peak],
            peak_error: p_error[peak],
            max_error,
            times: jt,
            p_success,
            p_error,
        })
    }
}

fn check_ratio(j_over_delta: f64) -> Result<()> {
    if !(j_over_delta > 0.0 && j_over_delta <= MAX_J_OVER_DELTA) {
        return Err(Error::invalid(format!(
            "J/Delta must lie in (0, {MAX_J_OVER_DELTA}]"
        )));
    }
    Ok(())
}

fn check_spin(s: u8) -> Result<()> {
    if s > 1 {
        return Err(Error::invalid("spins must be 0 or 1"));
    }
    Ok(())
}

/// Builds the passage setup for the CNOT test lattice. Track order in
/// position and spin arrays is ascending by key: index 0 = target (d = 0),
/// index 1 = control (d = 1).
fn cnot_passage(j: f64, control: u8, target: u8) -> Result<(StateSpace, Passage)> {
    let lat = cnot_test_lattice(3)?;
    let space = enumerate_basis(&lat, false)?;
    let h = build_h_valid(&space, 1.0)?.add(&build_v_hop(&space, j, None)?)?;
    let psi0 = space.basis_state(&[0, 0], Some(&[target, control]))?;
    let success = space.ordinal_of(&[3, 1], Some(&[target ^ control, control]))?;
    let mut finals = Vec::with_capacity(4);
    for st in 0..2u8 {
        for sc in 0..2u8 {
            finals.push(space.ordinal_of(&[3, 1], Some(&[st, sc]))?);
        }
    }
    Ok((space, Passage { h, psi0, success, finals }))
}

/// Sends the string through the CNOT gadget with the given (control, target)
/// input spins and returns passage observables on an 800-point Jt grid over
/// `window`. Success means the full string reaches the far end with the
/// target spin flipped exactly when the control spin is 1.
pub fn run_cnot(
    j_over_delta: f64,
    input_spins: (u8, u8),
    window: (f64, f64),
) -> Result<PassageResult> {
    check_ratio(j_over_delta)?;
    check_spin(input_spins.0)?;
    check_spin(input_spins.1)?;
    let (_, passage) = cnot_passage(j_over_delta, input_spins.0, input_spins.1)?;
    passage.run(j_over_delta, window, 800)
}

/// Time-averaged success and error probabilities for input (1, 0) at the
/// given Jt horizon, on a 4000-point grid. At long times both observables
/// equilibrate toward the inverse effective walk length.
pub fn long_time_average(j_over_delta: f64, horizon: f64) -> Result<LongTimeReport> {
    check_ratio(j_over_delta)?;
    if !(horizon > 0.0) {
        return Err(Error::invalid("horizon must be positive"));
    }
    let (_, passage) = cnot_passage(j_over_delta, 1, 0)?;
    let res = passage.run(j_over_delta, (0.0, horizon), 4000)?;
    let ps = dynamics::time_average(&dynamics::TimeSeries::new(res.times.clone(), res.p_success)?)?;
    let pe = dynamics::time_average(&dynamics::TimeSeries::new(res.times, res.p_error)?)?;
    let (s, e) = (ps.last_value(), pe.last_value());
    Ok(LongTimeReport {
        horizon,
        mean_success: s,
        mean_error: e,
        relative_difference: (s - e).abs() / s.max(e).max(f64::MIN_POSITIVE),
    })
}

/// Least-squares slope of ln(value) against ln(ratio) over caller-supplied
/// points. Values at or below [`ERROR_FLOOR`] are excluded with a warning;
/// fewer than two surviving points is a numeric failure.
pub fn fit_error_exponent_from(points: &[(f64, f64)]) -> Result<ExponentFit> {
    let mut kept = Vec::new();
    let mut excluded = Vec::new();
    let mut warnings = Vec::new();
    for &(r, v) in points {
        if !(r > 0.0) || !v.is_finite() {
            return Err(Error::invalid("ratios must be positive and values finite"));
        }
        if v <= ERROR_FLOOR {
            warnings.push(format!(
                "excluded ratio {r}: value {v:.3e} at numeric floor"
            ));
            excluded.push(r);
        } else {
            kept.push((r, v));
        }
    }
    if kept.len() < 2 {
        return Err(Error::NumericFailure(
            "fewer than two error values above the numeric floor".into(),
        ));
    }
    let xs: Vec<f64> = kept.iter().map(|(r, _)| r.ln()).collect();
    let ys: Vec<f64> = kept.iter().map(|(_, v)| v.ln()).collect();
    let (slope, intercept) = dynamics::linear_fit(&xs, &ys)?;
    Ok(ExponentFit {
        exponent: slope,
        intercept,
        points: kept,
        excluded,
        warnings,
    })
}

/// Fits the leakage exponent: for each hopping ratio, runs the CNOT passage
/// with input (0, 0), time-averages the error probability, samples it at
/// `jt_eval` (linear interpolation), and fits ln P̄_E against ln(J/Δ). The
/// perturbative prediction is a slope of 4.
pub fn fit_error_exponent(ratios: &[f64], jt_eval: f64) -> Result<ExponentFit> {
    if ratios.len() < 3 {
        return Err(Error::invalid("need at least three ratios"));
    }
    if !(jt_eval > 0.0) {
        return Err(Error::invalid("jt_eval must be positive"));
    }
    for &r in ratios {
        check_ratio(r)?;
    }
    let window_end = (jt_eval + 0.5).max(4.5);
    let mut points = Vec::with_capacity(ratios.len());
    for &r in ratios {
        let (_, passage) = cnot_passage(r, 0, 0)?;
        let res = passage.run(r, (0.0, window_end), 600)?;
        let pe_bar =
            dynamics::time_average(&dynamics::TimeSeries::new(res.times.clone(), res.p_error)?)?;
        let v = dynamics::interp_linear(&pe_bar.times, &pe_bar.values, jt_eval)?;
        points.push((r, v));
    }
    fit_error_exponent_from(&points)
}

/// Toffoli test lattice: rotated 4×4 keeping tracks d ∈ {−1, 0, 1}, double
/// split inserted at (2,2) (splits at (2,2) and (3,3)).
pub fn toffoli_test_lattice() -> Result<LatticeSpec> {
    let spec = restrict_tracks(&build_rotated(4)?, &[-1, 0, 1])?;
    insert_toffoli_region(&spec, Site::new(2, 2))
}

fn toffoli_space_and_h(j: f64, lat: &LatticeSpec) -> Result<(StateSpace, SparseOperator)> {
    let space = enumerate_basis(lat, false)?;
    let h = build_h_valid(&space, 1.0)?.add(&build_v_hop(&space, j, None)?)?;
    Ok((space, h))
}

/// Projects the Toffoli test Hamiltonian onto its ground (valid) subspace.
/// The projection is structural, so any positive J is accepted here; the
/// passage-regime bound only applies to dynamics runs.
pub fn toffoli_effective(j_over_delta: f64) -> Result<EffectiveOperator> {
    if !(j_over_delta > 0.0 && j_over_delta.is_finite()) {
        return Err(Error::invalid("J/Delta must be positive and finite"));
    }
    let lat = toffoli_test_lattice()?;
    let (space, h) = toffoli_space_and_h(j_over_delta, &lat)?;
    project_effective(&h, &space)
}

/// Runs all eight spin inputs through the Toffoli gadget over Jt ∈ [0, 8]
/// (600 points). Success means the string crosses with the target spin
/// flipped exactly when both controls carry spin 1.
pub fn verify_toffoli_truth_table(j_over_delta: f64) -> Result<ToffoliReport> {
    check_ratio(j_over_delta)?;
    let lat = toffoli_test_lattice()?;
    let (space, h) = toffoli_space_and_h(j_over_delta, &lat)?;
    // Track order ascending by key: index 0 = c2 (d = −1), 1 = target
    // (d = 0), 2 = c1 (d = 1).
    let mut inputs = Vec::with_capacity(8);
    let mut all_ok = true;
    for word in 0..8u8 {
        let (s1, s, s2) = (word >> 2 & 1, word >> 1 & 1, word & 1);
        let psi0 = space.basis_state(&[0, 0, 0], Some(&[s2, s, s1]))?;
        let s_out = s ^ (s1 & s2);
        let success = space.ordinal_of(&[2, 5, 2], Some(&[s2, s_out, s1]))?;
        let mut finals = Vec::with_capacity(8);
        for w in 0..8u8 {
            finals.push(space.ordinal_of(&[2, 5, 2], Some(&[w >> 2 & 1, w >> 1 & 1, w & 1]))?);
        }
        let passage = Passage { h: h.clone(), psi0, success, finals };
        let res = passage.run(j_over_delta, (0.0, 8.0), 600)?;
        let ratio = res.max_error / res.peak_success.max(f64::MIN_POSITIVE);
        all_ok &= ratio < 0.05;
        inputs.push(ToffoliInputResult {
            spins: (s1, s, s2),
            peak_time: res.peak_time,
            peak_success: res.peak_success,
            max_error: res.max_error,
            error_ratio: ratio,
        });
    }
    Ok(ToffoliReport { inputs, all_within_tolerance: all_ok })
}

/// Demonstrates that the backward identity hop (2,2;0)→(3,3;1) is load-
/// bearing: removing it zeroes exactly the effective matrix element that
/// routes the (s1=0, s2=1) context through the second split, and changes
/// nothing else. Run at J = Δ = 1 so the element reads −1 directly.
pub fn check_backward_necessity() -> Result<BackwardReport> {
    let lat = toffoli_test_lattice()?;
    let dropped_from = Site::split_site(2, 2, 0);
    let dropped_to = Site::split_site(3, 3, 1);
    let mut lat_dropped = lat.clone();
    let before = lat_dropped.plaquettes.len();
    lat_dropped
        .plaquettes
        .retain(|p| !(p.from == dropped_from && p.to == dropped_to));
    if lat_dropped.plaquettes.len() + 1 != before {
        return Err(Error::internal("expected exactly one (2,2;0)->(3,3;1) hop record"));
    }

    let (space, h_full) = toffoli_space_and_h(1.0, &lat)?;
    let (space_d, h_drop) = toffoli_space_and_h(1.0, &lat_dropped)?;
    let eff_full = project_effective(&h_full, &space)?;
    let eff_drop = project_effective(&h_drop, &space_d)?;
    if eff_full.members != eff_drop.members {
        return Err(Error::internal("valid subspace changed when dropping a hop"));
    }

    // Context ordinals: c1 at (3,2), c2 at (2,3), target transiting the
    // splits, control spins s1 = 0 (c1) and s2 = 1 (c2).
    let mut element_full = [0.0; 2];
    let mut element_dropped = [0.0; 2];
    let mut context = Vec::new();
    for s in 0..2u8 {
        let row = space.ordinal_of(&[1, 4, 1], Some(&[1, s, 0]))?;
        let col = space.ordinal_of(&[1, 1, 1], Some(&[1, s, 0]))?;
        element_full[s as usize] = effective_element(&eff_full, row, col)?;
        element_dropped[s as usize] = effective_element(&eff_drop, row, col)?;
        context.push((row, col));
        context.push((col, row));
    }

    let index_of: std::collections::HashMap<usize, usize> = eff_full
        .members
        .iter()
        .enumerate()
        .map(|(i, &o)| (o, i))
        .collect();
    let context_idx: Vec<(usize, usize)> = context
        .iter()
        .map(|&(r, c)| (index_of[&r], index_of[&c]))
        .collect();
    let full = eff_full.op.to_dense();
    let drop = eff_drop.op.to_dense();
    let mut max_other = 0.0f64;
    for r in 0..full.nrows() {
        for c in 0..full.ncols() {
            if context_idx.contains(&(r, c)) {
                continue;
            }
            max_other = max_other.max((full[(r, c)] - drop[(r, c)]).abs());
        }
    }
    Ok(BackwardReport { element_full, element_dropped, max_other_change: max_other })
}

fn effective_element(eff: &EffectiveOperator, row_ordinal: usize, col_ordinal: usize) -> Result<f64> {
    let find = |o: usize| {
        eff.members
            .binary_search(&o)
            .map_err(|_| Error::internal("context ordinal not in valid subspace"))
    };
    Ok(eff.op.get(find(row_ordinal)?, find(col_ordinal)?))
}
