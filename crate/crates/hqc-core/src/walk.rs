//! Forward-walk reductions: chain spectra, snake-lattice equivalence, the
//! fast CNOT gadget, engineered perfect transfer, and photon-loss decay.
//!
//! A valid snake string is rigid: exactly one particle can advance at a
//! time, so the string's joint motion is a continuous quantum walk on a
//! chain of L = N(M−1)+1 configurations, visiting the orange gates column
//! by column in boustrophedon order.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{self, TimeSeries};
use crate::error::{Error, Result};
use crate::hamiltonian::{build_h_valid, build_v_hop, enumerate_basis, project_effective,
                         SparseOperator, StateSpace};
use crate::lattice::{build_snake, insert_fast_cnot_region, with_snake_gates, Gate2, Site};

const MAX_WALK_LEN: usize = 5_000_000;

/// Chain eigenvalues ω̃_l = −2 cos(πl/(L+1)), l = 1..L, in units of J.
pub fn walk_spectrum(l: usize) -> Result<Vec<f64>> {
    if l == 0 || l > MAX_WALK_LEN {
        return Err(Error::invalid("walk length must lie in 1..=5e6"));
    }
    let lp1 = (l + 1) as f64;
    Ok((1..=l)
        .map(|k| -2.0 * (std::f64::consts::PI * k as f64 / lp1).cos())
        .collect())
}

/// Uniform-chain Hamiltonian: L sites, hops −j between neighbors.
pub fn walk_hamiltonian(l: usize, j: f64) -> Result<SparseOperator> {
    if l == 0 || l > MAX_WALK_LEN {
        return Err(Error::invalid("walk length must lie in 1..=5e6"));
    }
    let mut triplets = Vec::with_capacity(2 * l.saturating_sub(1));
    for k in 0..l.saturating_sub(1) {
        triplets.push((k, k + 1, -j));
        triplets.push((k + 1, k, -j));
    }
    SparseOperator::from_triplets(l, triplets)
}

/// End-to-end transfer probability P_L(t) = |⟨L|e^{−iHt}|1⟩|² on the uniform
/// chain, evaluated analytically from the sine eigenbasis. Times are in
/// units of 1/J.
pub fn success_probability(l: usize, times: &[f64]) -> Result<TimeSeries> {
    if times.is_empty() {
        return Err(Error::invalid("empty time grid"));
    }
    let spectrum = walk_spectrum(l)?;
    let lp1 = (l + 1) as f64;
    let pi = std::f64::consts::PI;
    // a_l = sin(πl/(L+1))·sin(πlL/(L+1)); amplitude = (2/(L+1)) Σ a_l e^{−iω̃t}.
    let weights: Vec<f64> = (1..=l)
        .map(|k| {
            let x = pi * k as f64 / lp1;
            (x).sin() * (x * l as f64).sin()
        })
        .collect();
    let mut values = Vec::with_capacity(times.len());
    for &t in times {
        let mut amp = Complex64::ZERO;
        for (w, om) in weights.iter().zip(&spectrum) {
            amp += Complex64::from_polar(*w, -om * t);
        }
        amp *= 2.0 / lp1;
        values.push(amp.norm_sqr());
    }
    TimeSeries::new(times.to_vec(), values)
}

/// Engineered couplings J_k = (J/2)·√(k(L−k)), k = 1..L−1, which transfer
/// site 1 to site L with unit fidelity at t = π/J.
pub fn peres_couplings(l: usize, j: f64) -> Result<Vec<f64>> {
    if l < 2 || l > MAX_WALK_LEN {
        return Err(Error::invalid("engineered chain needs 2 <= L <= 5e6"));
    }
    if !(j > 0.0) {
        return Err(Error::invalid("J must be positive"));
    }
    Ok((1..l)
        .map(|k| 0.5 * j * ((k * (l - k)) as f64).sqrt())
        .collect())
}

/// Chain Hamiltonian with the engineered couplings.
pub fn peres_hamiltonian(l: usize, j: f64) -> Result<SparseOperator> {
    let ks = peres_couplings(l, j)?;
    let mut triplets = Vec::with_capacity(2 * ks.len());
    for (k, jk) in ks.iter().enumerate() {
        triplets.push((k, k + 1, -jk));
        triplets.push((k + 1, k, -jk));
    }
    SparseOperator::from_triplets(l, triplets)
}

/// |⟨L|e^{−iH·π/J}|1⟩|² for the engineered chain (dense eigenbasis).
pub fn peres_transfer_fidelity(l: usize, j: f64) -> Result<f64> {
    const DENSE_CAP: usize = 2048;
    if l > DENSE_CAP {
        return Err(Error::TooLarge(format!(
            "transfer fidelity check capped at L = {DENSE_CAP}"
        )));
    }
    let h = peres_hamiltonian(l, j)?;
    let mut psi0 = vec![Complex64::ZERO; l];
    psi0[0] = Complex64::ONE;
    let t = std::f64::consts::PI / j;
    let states = dynamics::evolve_dense(&h, &psi0, &[t])?;
    Ok(states[0][l - 1].norm_sqr())
}

/// Projected snake-string walk: the valid configurations ordered by total
/// progress k = Σ(cᵢ − 1), the position-space Hamiltonian restricted to
/// them, and the (track, column) gate visited at each step.
#[derive(Debug, Clone)]
pub struct SnakeWalk {
    /// Number of valid string configurations, N(M−1)+1.
    pub len: usize,
    /// Projected Hamiltonian in walk order (tridiagonal −j for a uniform
    /// snake).
    pub matrix: DMatrix<f64>,
    /// Orange gate (track, source column) applied by step k→k+1, 1-based.
    pub gate_order: Vec<(u32, u32)>,
    /// Track positions (0-based) of each configuration in walk order.
    pub configs: Vec<Vec<u16>>,
}

fn walk_order(space: &StateSpace) -> Result<(Vec<usize>, Vec<Vec<u16>>, Vec<(u32, u32)>)> {
    let t = space.n_tracks();
    let mut members: Vec<(usize, usize, Vec<u16>)> = Vec::new();
    let mut positions = vec![0u16; t];
    for &o in space.connected_ordinals() {
        space.positions_of(o, &mut positions);
        let k: usize = positions.iter().map(|&p| p as usize).sum();
        members.push((k, o, positions.clone()));
    }
    members.sort();
    for w in members.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::internal("walk progress index is not unique"));
        }
    }
    let mut order = Vec::with_capacity(members.len());
    let mut configs = Vec::with_capacity(members.len());
    let mut gates = Vec::with_capacity(members.len().saturating_sub(1));
    for (idx, (_, o, pos)) in members.iter().enumerate() {
        if idx > 0 {
            let prev: &Vec<u16> = &configs[idx - 1];
            let moved: Vec<usize> = (0..t).filter(|&i| prev[i] != pos[i]).collect();
            if moved.len() != 1 || pos[moved[0]] != prev[moved[0]] + 1 {
                return Err(Error::internal("walk steps must advance one track by one"));
            }
            // Track index i is row i+1; source column is position+1 (1-based).
            gates.push((moved[0] as u32 + 1, prev[moved[0]] as u32 + 1));
        }
        order.push(*o);
        configs.push(pos.clone());
    }
    Ok((order, configs, gates))
}

/// Builds the position-only snake walk for an N×M snake at hop strength j.
pub fn snake_walk(n: u32, m: u32, j: f64) -> Result<SnakeWalk> {
    let lat = build_snake(n, m)?;
    let space = enumerate_basis(&lat, true)?;
    let h = build_h_valid(&space, 1.0)?.add(&build_v_hop(&space, j, None)?)?;
    let eff = project_effective(&h, &space)?;
    let (order, configs, gate_order) = walk_order(&space)?;
    if order.len() != eff.members.len() {
        return Err(Error::internal("connected set and projection disagree"));
    }
    let index_of: HashMap<usize, usize> = eff
        .members
        .iter()
        .enumerate()
        .map(|(i, &o)| (o, i))
        .collect();
    let len = order.len();
    let dense = eff.op.to_dense();
    let mut matrix = DMatrix::zeros(len, len);
    for (r, &or) in order.iter().enumerate() {
        for (c, &oc) in order.iter().enumerate() {
            matrix[(r, c)] = dense[(index_of[&or], index_of[&oc])];
        }
    }
    Ok(SnakeWalk { len, matrix, gate_order, configs })
}

/// Comparison between the spin-resolved projected snake Hamiltonian and the
/// forward-walk Hamiltonian −J Σ U_k ⊗ |k+1⟩⟨k| + h.c. built from the same
/// gate order.
#[derive(Debug, Clone)]
pub struct SnakeEquivalenceReport {
    pub walk_len: usize,
    pub spin_dim: usize,
    pub max_deviation: f64,
    pub gate_order: Vec<(u32, u32)>,
}

/// Projects the spinful N×M snake Hamiltonian (J = 1, Δ = 1) onto its valid
/// subspace and compares it entrywise against the forward-walk form. `gates`
/// maps (track, source column), 1-based, to the unitary applied by that
/// orange hop; unlisted hops are identities.
pub fn snake_equivalence(
    n: u32,
    m: u32,
    gates: &HashMap<(u32, u32), Gate2>,
) -> Result<SnakeEquivalenceReport> {
    let plain = snake_walk(n, m, 1.0)?;
    let lat = with_snake_gates(&build_snake(n, m)?, gates)?;
    let space = enumerate_basis(&lat, false)?;
    let h = build_h_valid(&space, 1.0)?.add(&build_v_hop(&space, 1.0, None)?)?;
    let eff = project_effective(&h, &space)?;

    let t = space.n_tracks();
    let spin_dim = 1usize << t;
    let len = plain.len;
    if eff.members.len() != len * spin_dim {
        return Err(Error::internal("spinful valid subspace has unexpected size"));
    }

    // Forward-walk matrix in (config, spin word) order.
    let dim = len * spin_dim;
    let mut hf = DMatrix::<f64>::zeros(dim, dim);
    for (step, &(track, col)) in plain.gate_order.iter().enumerate() {
        let u = gates.get(&(track, col)).copied().unwrap_or(crate::lattice::GATE_I);
        let ti = (track - 1) as usize;
        let bit = t - 1 - ti;
        for w in 0..spin_dim {
            let s_in = (w >> bit) & 1;
            for s_out in 0..2usize {
                let amp = u[s_out][s_in];
                if amp == 0.0 {
                    continue;
                }
                let w_out = (w & !(1 << bit)) | (s_out << bit);
                let r = (step + 1) * spin_dim + w_out;
                let c = step * spin_dim + w;
                hf[(r, c)] += -amp;
                hf[(c, r)] += -amp;
            }
        }
    }

    // Permute the projected operator into the same (config, spin) order.
    let index_of: HashMap<usize, usize> = eff
        .members
        .iter()
        .enumerate()
        .map(|(i, &o)| (o, i))
        .collect();
    let dense = eff.op.to_dense();
    let mut perm = Vec::with_capacity(dim);
    for cfg in &plain.configs {
        for w in 0..spin_dim {
            let mut spins = vec![0u8; t];
            for (ti, s) in spins.iter_mut().enumerate() {
                *s = ((w >> (t - 1 - ti)) & 1) as u8;
            }
            let o = space.ordinal_of(cfg, Some(&spins))?;
            perm.push(*index_of
                .get(&o)
                .ok_or_else(|| Error::internal("valid config missing from projection"))?);
        }
    }
    let mut max_dev = 0.0f64;
    for r in 0..dim {
        for c in 0..dim {
            max_dev = max_dev.max((dense[(perm[r], perm[c])] - hf[(r, c)]).abs());
        }
    }
    Ok(SnakeEquivalenceReport {
        walk_len: len,
        spin_dim,
        max_deviation: max_dev,
        gate_order: plain.gate_order,
    })
}

/// One spin input of the fast CNOT check.
#[derive(Debug, Clone)]
pub struct FastCnotInput {
    /// Input spins by track (row 1 first).
    pub spins: Vec<u8>,
    pub peak_time: f64,
    pub peak_success: f64,
    /// Error probability at the success peak.
    pub peak_error: f64,
}

#[derive(Debug, Clone)]
pub struct FastCnotReport {
    /// Unmodified walk length L = N(M−1)+1.
    pub walk_len: usize,
    /// Valid position configurations per spin word (expect L+1 each).
    pub sector_counts: Vec<usize>,
    pub inputs: Vec<FastCnotInput>,
}

/// Runs every spin input through a fast CNOT inserted on the target hop
/// (row `target.0`, column `target.1` → `target.1`+1) of an N×M snake and
/// counts valid configurations per control-spin sector. The split pair adds
/// exactly one transit configuration per sector, so each sector holds L+1.
pub fn fast_cnot_passage(
    n: u32,
    m: u32,
    target: (u32, u32),
    control_above: bool,
    j_over_delta: f64,
    window: (f64, f64),
) -> Result<FastCnotReport> {
    if !(j_over_delta > 0.0 && j_over_delta <= 0.25) {
        return Err(Error::invalid("J/Delta must lie in (0, 0.25]"));
    }
    let lat = insert_fast_cnot_region(
        &build_snake(n, m)?,
        Site::new(target.0 as i32, target.1 as i32),
        control_above,
    )?;
    let space = enumerate_basis(&lat, false)?;
    let j = j_over_delta;
    let h = build_h_valid(&space, 1.0)?.add(&build_v_hop(&space, j, None)?)?;

    let t = space.n_tracks();
    let spin_dim = 1usize << t;
    let mut sector_counts = vec![0usize; spin_dim];
    for &o in space.connected_ordinals() {
        sector_counts[space.spin_word_of(o) as usize] += 1;
    }

    let target_track = (target.0 - 1) as usize;
    let control_track = if control_above { target_track - 1 } else { target_track + 1 };
    let mut lens = vec![0u16; t];
    for (ti, len) in lens.iter_mut().enumerate() {
        *len = (m + if ti == target_track { 2 } else { 0 }) as u16;
    }
    let finals: Vec<u16> = lens.iter().map(|&l| l - 1).collect();

    let jt = dynamics::time_grid(window.0, window.1, 600)?;
    let times: Vec<f64> = jt.iter().map(|x| x / j).collect();
    let mut inputs = Vec::with_capacity(spin_dim);
    for w in 0..spin_dim {
        let mut spins = vec![0u8; t];
        for (ti, s) in spins.iter_mut().enumerate() {
            *s = ((w >> (t - 1 - ti)) & 1) as u8;
        }
        let psi0 = space.basis_state(&vec![0u16; t], Some(&spins))?;
        let mut s_ok = spins.clone();
        s_ok[target_track] ^= spins[control_track];
        let success = space.ordinal_of(&finals, Some(&s_ok))?;
        let mut all = Vec::with_capacity(spin_dim);
        for w2 in 0..spin_dim {
            let mut s2 = vec![0u8; t];
            for (ti, s) in s2.iter_mut().enumerate() {
                *s = ((w2 >> (t - 1 - ti)) & 1) as u8;
            }
            all.push(space.ordinal_of(&finals, Some(&s2))?);
        }
        let mut ps = vec![0.0; times.len()];
        let mut pe = vec![0.0; times.len()];
        dynamics::evolve_observe(&h, &psi0, &times, |k, _, psi| {
            let ok = psi[success].norm_sqr();
            let tot: f64 = all.iter().map(|&f| psi[f].norm_sqr()).sum();
            ps[k] = ok;
            pe[k] = (tot - ok).max(0.0);
        })?;
        let mut peak = 0usize;
        for (k, v) in ps.iter().enumerate() {
            if *v > ps[peak] {
                peak = k;
            }
        }
        inputs.push(FastCnotInput {
            spins,
            peak_time: jt[peak],
            peak_success: ps[peak],
            peak_error: pe[peak],
        });
    }
    Ok(FastCnotReport {
        walk_len: (n * (m - 1) + 1) as usize,
        sector_counts,
        inputs,
    })
}

/// Canonical fast CNOT check: 2×3 snake, control on row 1, target hop on
/// row 2 from column 1, all four spin inputs over Jt ∈ [0, 40].
pub fn fast_cnot_check(j_over_delta: f64) -> Result<FastCnotReport> {
    fast_cnot_passage(2, 3, (2, 1), true, j_over_delta, (0.0, 40.0))
}

/// Photon-loss model for the L-site uniform chain: every site decays into a
/// shared vacuum at rate gamma.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LindbladSpec {
    pub len: usize,
    pub j: f64,
    pub gamma: f64,
}

impl LindbladSpec {
    pub fn validate(&self) -> Result<()> {
        if self.len == 0 || self.len > 4096 {
            return Err(Error::invalid("chain length must lie in 1..=4096"));
        }
        if !(self.j > 0.0) || !(self.gamma >= 0.0) {
            return Err(Error::invalid("need j > 0 and gamma >= 0"));
        }
        Ok(())
    }
}

/// dρ/dt for ρ on the chain+vacuum space (vacuum is the last index):
/// −i[H,ρ] + γ(Σ_k ρ_kk)|v⟩⟨v| − (γ/2)(Pρ + ρP) with P the chain projector.
fn lindblad_rhs(spec: &LindbladSpec, rho: &DMatrix<Complex64>, out: &mut DMatrix<Complex64>) {
    let l = spec.len;
    let d = l + 1;
    let j = Complex64::new(0.0, spec.j); // −i·(−J) = +iJ
    out.fill(Complex64::ZERO);
    // −i[H,ρ]: H has −J on chain off-diagonals, vacuum decoupled.
    for r in 0..d {
        for c in 0..d {
            let mut v = Complex64::ZERO;
            if r < l {
                if r > 0 {
                    v += j * rho[(r - 1, c)];
                }
                if r + 1 < l {
                    v += j * rho[(r + 1, c)];
                }
            }
            if c < l {
                if c > 0 {
                    v -= j * rho[(r, c - 1)];
                }
                if c + 1 < l {
                    v -= j * rho[(r, c + 1)];
                }
            }
            out[(r, c)] = v;
        }
    }
    let g = spec.gamma;
    if g > 0.0 {
        let mut pop = Complex64::ZERO;
        for k in 0..l {
            pop += rho[(k, k)];
        }
        out[(l, l)] += g * pop;
        for r in 0..d {
            for c in 0..d {
                let chain_weight = (r < l) as u8 + (c < l) as u8;
                if chain_weight > 0 {
                    out[(r, c)] -= 0.5 * g * chain_weight as f64 * rho[(r, c)];
                }
            }
        }
    }
}

/// Dormand-Prince 5(4) coefficients.
const DP_A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B5: [f64; 7] = [
    35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0,
];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0,
    -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0,
];

/// Evolves ρ(0) = |1⟩⟨1| under the loss model and returns the chain survival
/// probability Tr(Pρ) on the given physical time grid. The dissipator only
/// moves population out of the chain, so survival is exactly e^{−γt},
/// independent of L; the integrator must reproduce that.
pub fn lindblad_loss(spec: &LindbladSpec, times: &[f64]) -> Result<TimeSeries> {
    spec.validate()?;
    if times.is_empty() || times[0] < 0.0 || times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("times must be nonnegative and strictly increasing"));
    }
    const ATOL: f64 = 1e-10;
    const RTOL: f64 = 1e-10;
    const MAX_STEPS: usize = 2_000_000;
    const MAX_REJECTS: usize = 80;

    let d = spec.len + 1;
    let mut rho = DMatrix::<Complex64>::zeros(d, d);
    rho[(0, 0)] = Complex64::ONE;
    let mut t = 0.0f64;
    let mut out = Vec::with_capacity(times.len());
    let scale = spec.j.abs().max(spec.gamma).max(1e-12);
    let mut h = (0.1 / scale).min(times.last().expect("nonempty").max(1e-12));

    let survival = |rho: &DMatrix<Complex64>| -> f64 {
        (0..spec.len).map(|k| rho[(k, k)].re).sum::<f64>().clamp(0.0, 1.0)
    };

    let mut k = [
        DMatrix::<Complex64>::zeros(d, d),
        DMatrix::zeros(d, d),
        DMatrix::zeros(d, d),
        DMatrix::zeros(d, d),
        DMatrix::zeros(d, d),
        DMatrix::zeros(d, d),
        DMatrix::zeros(d, d),
    ];
    let mut stage = DMatrix::<Complex64>::zeros(d, d);
    let mut steps = 0usize;

    for &target in times {
        if target == 0.0 {
            out.push(survival(&rho));
            continue;
        }
        while t < target - 1e-14 * target.max(1.0) {
            let mut rejects = 0usize;
            loop {
                steps += 1;
                if steps > MAX_STEPS {
                    return Err(Error::NumericFailure("step budget exhausted".into()));
                }
                let hs = h.min(target - t);
                lindblad_rhs(spec, &rho, &mut k[0]);
                for s in 1..7 {
                    stage.copy_from(&rho);
                    for (i, ki) in k.iter().take(s).enumerate() {
                        let a = DP_A[s - 1][i];
                        if a != 0.0 {
                            stage.zip_apply(ki, |x, y| *x += y * Complex64::from(a * hs));
                        }
                    }
                    let (_, tail) = k.split_at_mut(s);
                    lindblad_rhs(spec, &stage, &mut tail[0]);
                }
                // Fifth-order solution and embedded error.
                let mut y5 = rho.clone();
                let mut err = 0.0f64;
                for r in 0..d {
                    for c in 0..d {
                        let mut acc5 = Complex64::ZERO;
                        let mut acc4 = Complex64::ZERO;
                        for s in 0..7 {
                            acc5 += k[s][(r, c)] * Complex64::from(DP_B5[s]);
                            acc4 += k[s][(r, c)] * Complex64::from(DP_B4[s]);
                        }
                        let v5 = rho[(r, c)] + acc5 * Complex64::from(hs);
                        let v4 = rho[(r, c)] + acc4 * Complex64::from(hs);
                        y5[(r, c)] = v5;
                        let tol = ATOL + RTOL * v5.norm().max(rho[(r, c)].norm());
                        err = err.max((v5 - v4).norm() / tol);
                    }
                }
                if err <= 1.0 {
                    rho = y5;
                    t += hs;
                    let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                    h = (hs * grow).min(10.0 / scale);
                    break;
                }
                rejects += 1;
                if rejects > MAX_REJECTS {
                    return Err(Error::NumericFailure(
                        "step size control failed to converge".into(),
                    ));
                }
                h = hs * (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            }
        }
        out.push(survival(&rho));
    }
    TimeSeries::new(times.to_vec(), out)
}

/// Decay rate fitted from −ln(survival) against time by least squares.
/// Points at or below the numeric floor are skipped.
pub fn fit_decay_rate(series: &TimeSeries) -> Result<f64> {
    series.validate()?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&t, &v) in series.times.iter().zip(&series.values) {
        if v > 1e-12 {
            xs.push(t);
            ys.push(-v.ln());
        }
    }
    let (slope, _) = dynamics::linear_fit(&xs, &ys)?;
    Ok(slope)
}
