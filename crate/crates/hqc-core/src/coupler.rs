//! Superconducting implementation: two transmon-like modes bridged by a
//! flux-biased junction-array coupler.
//!
//! All energies are in units of the bare single-qubit charging energy
//! E_C^bare = e²/(2C_J), capacitances in units of C_J, and ħ = 1. At the
//! bias point φ_ext = N_J·π the array contributes a negative quadratic term,
//! so the coupler's net inductive energy E_ind = αE_J + E_L − E_J/N_J and
//! Kerr scale E_Kerr = αE_J − E_J/N_J³ both cross zero near small α; tuning
//! α balances capacitive, inductive, and nonlinear hopping into a
//! cancellation while the cross-Kerr Δ stays finite.

use nalgebra::{DMatrix, Matrix3, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io;

/// Conversion used for reporting: E_C^bare/h in MHz.
pub const DEFAULT_E_C_BARE_MHZ: f64 = 200.0;

/// Minimum E_J·c_a product keeping array phase slips negligible.
pub const MIN_ARRAY_STIFFNESS: f64 = 50.0;

/// Circuit parameters. Energies in units of E_C^bare, capacitances in units
/// of C_J, flux in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    /// Qubit junction energies.
    pub e_j1: f64,
    pub e_j2: f64,
    /// Coupler junction energy scale (αE_J small junction, E_J/N_J per
    /// array junction).
    pub e_j: f64,
    /// Small-junction ratio.
    pub alpha: f64,
    /// Junctions in the array.
    pub n_j: u32,
    /// Shunt inductor energy.
    pub e_l: f64,
    /// Qubit shunt capacitances.
    pub c_j1: f64,
    pub c_j2: f64,
    /// Array series capacitance and direct bridge capacitance.
    pub c_a: f64,
    pub c_b: f64,
    /// External flux through the coupler loop.
    pub phi_ext: f64,
}

impl CircuitParams {
    /// The worked design point: E_J1 = 80, E_J2 = 60, E_J = 1200, α = 0.043,
    /// N_J = 4, E_L = 255, C_a = C_J/12, C_b = 0, biased at φ_ext = N_J·π.
    pub fn reference_design() -> Self {
        CircuitParams {
            e_j1: 80.0,
            e_j2: 60.0,
            e_j: 1200.0,
            alpha: 0.043,
            n_j: 4,
            e_l: 255.0,
            c_j1: 1.0,
            c_j2: 1.0,
            c_a: 1.0 / 12.0,
            c_b: 0.0,
            phi_ext: 4.0 * std::f64::consts::PI,
        }
    }

    /// Effective coupling capacitance C_c = C_a/N_J + C_b.
    pub fn c_coupling(&self) -> f64 {
        self.c_a / self.n_j as f64 + self.c_b
    }

    /// Checks physical plausibility. Returns warnings for soft issues; hard
    /// violations are errors.
    pub fn validate(&self) -> Result<Vec<String>> {
        if !(self.e_j1 > 0.0 && self.e_j2 > 0.0) {
            return Err(Error::invalid("qubit junction energies must be positive"));
        }
        if !(self.c_j1 > 0.0 && self.c_j2 > 0.0) {
            return Err(Error::invalid("qubit capacitances must be positive"));
        }
        if self.e_j < 0.0 || self.e_l < 0.0 || self.c_a < 0.0 || self.c_b < 0.0 {
            return Err(Error::invalid("coupler energies and capacitances must be nonnegative"));
        }
        if self.n_j < 1 {
            return Err(Error::invalid("array needs at least one junction"));
        }
        if !(self.alpha.is_finite() && self.phi_ext.is_finite()) {
            return Err(Error::invalid("alpha and phi_ext must be finite"));
        }
        if self.e_j > 0.0 && self.c_a > 0.0 && self.e_j * self.c_a < MIN_ARRAY_STIFFNESS {
            return Err(Error::UnphysicalDesign(format!(
                "array junctions too soft: E_J*C_a/C_J = {:.1} < {MIN_ARRAY_STIFFNESS}",
                self.e_j * self.c_a
            )));
        }
        let mut warnings = Vec::new();
        let bias = self.phi_ext / std::f64::consts::PI;
        if (bias - self.n_j as f64).abs() > 1e-9 {
            warnings.push(format!(
                "phi_ext = {bias:.4}*pi differs from the N_J*pi bias the closed forms assume"
            ));
        }
        Ok(warnings)
    }
}

/// Closed-form mode and coupling energies at fixed circuit parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingResult {
    /// Loaded charging energies and capacitive coupling from the inverse
    /// capacitance matrix.
    pub e_c1: f64,
    pub e_c2: f64,
    pub e_cap: f64,
    /// Coupler expansion: net quadratic and quartic scales.
    pub e_ind: f64,
    pub e_kerr: f64,
    /// Per-mode inductive and Kerr energies.
    pub e_l1: f64,
    pub e_l2: f64,
    pub e_k1: f64,
    pub e_k2: f64,
    /// Impedance parameters x = 2E_C1/E_L1, y = 2E_C2/E_L2.
    pub x: f64,
    pub y: f64,
    /// Hopping contributions and their sum.
    pub j_cap: f64,
    pub j_ind: f64,
    pub j_nonlin: f64,
    pub j_hop: f64,
    /// Cross-Kerr interaction.
    pub delta: f64,
    /// Bare mode frequencies, anharmonicities, and dressed frequencies
    /// Ω_m = ω_m + δ_m − Δ/2.
    pub omega1: f64,
    pub omega2: f64,
    pub anharm1: f64,
    pub anharm2: f64,
    pub dressed1: f64,
    pub dressed2: f64,
    pub warnings: Vec<String>,
}

fn inverse_2x2(p: &CircuitParams) -> Result<(f64, f64, f64)> {
    let cc = p.c_coupling();
    let (a, d) = (p.c_j1 + cc, p.c_j2 + cc);
    let det = a * d - cc * cc;
    if det <= 0.0 {
        return Err(Error::UnphysicalDesign("capacitance matrix is singular".into()));
    }
    // E_C row scale: E_C^bare picks up C_J * (C^-1)_mm.
    Ok((d / det, a / det, cc / det))
}

/// Derives every closed-form quantity for the two-mode circuit.
pub fn derive_couplings(p: &CircuitParams) -> Result<CouplingResult> {
    let mut warnings = p.validate()?;
    let (e_c1, e_c2, e_cap) = inverse_2x2(p)?;
    let nj = p.n_j as f64;
    let e_ind = p.e_j * p.alpha + p.e_l - p.e_j / nj;
    let e_kerr = p.e_j * p.alpha - p.e_j / (nj * nj * nj);
    let e_l1 = p.e_j1 + e_ind;
    let e_l2 = p.e_j2 + e_ind;
    if e_l1 <= 0.0 || e_l2 <= 0.0 {
        return Err(Error::UnphysicalDesign(
            "net inductive energy is nonpositive; the mode expansion breaks down".into(),
        ));
    }
    let e_k1 = p.e_j1 + e_kerr;
    let e_k2 = p.e_j2 + e_kerr;
    for (tag, ej, ec) in [("1", p.e_j1, e_c1), ("2", p.e_j2, e_c2)] {
        if ej / ec < 20.0 {
            warnings.push(format!(
                "mode {tag}: E_J/E_C = {:.1} leaves the transmon regime",
                ej / ec
            ));
        }
    }
    let x = 2.0 * e_c1 / e_l1;
    let y = 2.0 * e_c2 / e_l2;
    let quarter = (x * y).powf(0.25);
    let j_cap = 2.0 * e_cap / quarter;
    let j_ind = -e_ind * quarter;
    let j_nonlin = 0.5 * e_kerr * quarter * (x.sqrt() + y.sqrt());
    let j_hop = j_cap + j_ind + j_nonlin;
    let delta = e_kerr * (x * y).sqrt();
    let omega1 = (8.0 * e_c1 * e_l1).sqrt();
    let omega2 = (8.0 * e_c2 * e_l2).sqrt();
    let anharm1 = -e_k1 * e_c1 / e_l1;
    let anharm2 = -e_k2 * e_c2 / e_l2;
    Ok(CouplingResult {
        e_c1,
        e_c2,
        e_cap,
        e_ind,
        e_kerr,
        e_l1,
        e_l2,
        e_k1,
        e_k2,
        x,
        y,
        j_cap,
        j_ind,
        j_nonlin,
        j_hop,
        delta,
        omega1,
        omega2,
        anharm1,
        anharm2,
        dressed1: omega1 + anharm1 - delta / 2.0,
        dressed2: omega2 + anharm2 - delta / 2.0,
        warnings,
    })
}

/// Converts an energy in units of E_C^bare to MHz.
pub fn to_mhz(value: f64, e_c_bare_mhz: f64) -> f64 {
    value * e_c_bare_mhz
}

/// One sweep sample; `result` is None when the closed forms reject the
/// parameter point (for example a nonpositive net inductance).
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub alpha: f64,
    pub result: Option<CouplingResult>,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// CSV document with one row per valid sample. Rows come out in alpha
    /// order regardless of how many threads computed them.
    pub fn to_csv(&self) -> String {
        io::csv_document(
            &["alpha", "J_cap", "J_ind", "J_nonlin", "J_hop", "Delta", "delta1", "delta2"],
            self.rows.iter().filter_map(|r| {
                r.result.as_ref().map(|c| {
                    vec![r.alpha, c.j_cap, c.j_ind, c.j_nonlin, c.j_hop, c.delta,
                         c.anharm1, c.anharm2]
                })
            }),
        )
    }
}

/// Sweeps the small-junction ratio over `samples` evenly spaced values in
/// `alpha_range` (inclusive), deriving the closed forms at each point.
pub fn sweep_alpha(
    p: &CircuitParams,
    alpha_range: (f64, f64),
    samples: usize,
) -> Result<SweepResult> {
    if samples < 2 || !(alpha_range.1 > alpha_range.0) {
        return Err(Error::invalid("sweep needs an increasing range and >= 2 samples"));
    }
    let rows: Vec<SweepRow> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let alpha = alpha_range.0
                + (alpha_range.1 - alpha_range.0) * k as f64 / (samples - 1) as f64;
            let mut pk = p.clone();
            pk.alpha = alpha;
            match derive_couplings(&pk) {
                Ok(result) => SweepRow { alpha, result: Some(result), error: None },
                Err(e) => SweepRow { alpha, result: None, error: Some(e.to_string()) },
            }
        })
        .collect();
    Ok(SweepResult { rows })
}

/// Root of J_hop(α).
#[derive(Debug, Clone)]
pub struct CancellationResult {
    pub alpha_star: f64,
    pub j_hop_residual: f64,
    /// Full closed-form set evaluated at the root.
    pub at_root: CouplingResult,
}

/// Finds the hopping cancellation point by scanning J_hop(α) for a sign
/// change over (0, 1/N_J) and bisecting it to machine precision.
pub fn find_cancellation(p: &CircuitParams) -> Result<CancellationResult> {
    let eval = |alpha: f64| -> Option<f64> {
        let mut pk = p.clone();
        pk.alpha = alpha;
        derive_couplings(&pk).ok().map(|c| c.j_hop)
    };
    const SAMPLES: usize = 512;
    let hi = 1.0 / p.n_j.max(1) as f64;
    let lo = 1e-6;
    let mut prev: Option<(f64, f64)> = None;
    let mut bracket = None;
    for k in 0..=SAMPLES {
        let a = lo + (hi - lo) * k as f64 / SAMPLES as f64;
        let Some(v) = eval(a) else {
            prev = None;
            continue;
        };
        if let Some((pa, pv)) = prev {
            if pv == 0.0 {
                bracket = Some((pa, pa));
                break;
            }
            if pv.signum() != v.signum() {
                bracket = Some((pa, a));
                break;
            }
        }
        prev = Some((a, v));
    }
    let Some((mut a, mut b)) = bracket else {
        return Err(Error::NotFound(
            "J_hop does not change sign over the scanned alpha range".into(),
        ));
    };
    if a != b {
        let mut fa = eval(a).ok_or_else(|| Error::internal("bracket endpoint failed"))?;
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            let fm = eval(mid).ok_or_else(|| Error::internal("bisection point failed"))?;
            if fm == 0.0 || (b - a) < 1e-15 {
                a = mid;
                b = mid;
                break;
            }
            if fa.signum() != fm.signum() {
                b = mid;
            } else {
                a = mid;
                fa = fm;
            }
        }
    }
    let alpha_star = 0.5 * (a + b);
    let mut pk = p.clone();
    pk.alpha = alpha_star;
    let at_root = derive_couplings(&pk)?;
    Ok(CancellationResult { alpha_star, j_hop_residual: at_root.j_hop, at_root })
}

/// Static potential across the coupler degree of freedom:
/// U_c(φ) = E_L/2·φ² − αE_J·cos φ − N_J·E_J·cos((φ+φ_ext)/N_J).
pub fn coupler_potential(p: &CircuitParams, phi: f64) -> f64 {
    let nj = p.n_j as f64;
    0.5 * p.e_l * phi * phi - p.alpha * p.e_j * phi.cos()
        - nj * p.e_j * ((phi + p.phi_ext) / nj).cos()
}

/// Joint junction potential U(φ₁, φ₂) = −E_J1 cos φ₁ − E_J2 cos φ₂ +
/// U_c(φ₁−φ₂).
pub fn total_potential(p: &CircuitParams, phi1: f64, phi2: f64) -> f64 {
    -p.e_j1 * phi1.cos() - p.e_j2 * phi2.cos() + coupler_potential(p, phi1 - phi2)
}

/// Minimum structure of the joint potential.
#[derive(Debug, Clone)]
pub struct MinimumReport {
    /// Stationary point polished from the origin.
    pub origin: (f64, f64),
    pub origin_value: f64,
    /// Finite-difference Hessian at the origin point, row-major.
    pub hessian: [[f64; 2]; 2],
    pub hessian_eigenvalues: (f64, f64),
    /// True when both Hessian eigenvalues are positive.
    pub locally_stable: bool,
    /// Lowest grid point after modding out joint 2π shifts, polished.
    pub global: (f64, f64),
    pub global_value: f64,
    /// True when a lower basin than the origin's exists: the operating
    /// point is a false vacuum of the extended-phase potential.
    pub metastable: bool,
}

fn polish_minimum(p: &CircuitParams, start: (f64, f64)) -> (f64, f64) {
    // Newton iterations with central differences; falls back to the start
    // when the local Hessian is not positive definite.
    let (mut x, mut y) = start;
    let h = 1e-4;
    for _ in 0..60 {
        let f = |a: f64, b: f64| total_potential(p, a, b);
        let gx = (f(x + h, y) - f(x - h, y)) / (2.0 * h);
        let gy = (f(x, y + h) - f(x, y - h)) / (2.0 * h);
        let hxx = (f(x + h, y) - 2.0 * f(x, y) + f(x - h, y)) / (h * h);
        let hyy = (f(x, y + h) - 2.0 * f(x, y) + f(x, y - h)) / (h * h);
        let hxy = (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h))
            / (4.0 * h * h);
        let det = hxx * hyy - hxy * hxy;
        if det <= 0.0 || hxx <= 0.0 {
            break;
        }
        let dx = (hyy * gx - hxy * gy) / det;
        let dy = (hxx * gy - hxy * gx) / det;
        x -= dx;
        y -= dy;
        if dx.abs().max(dy.abs()) < 1e-12 {
            break;
        }
    }
    (x, y)
}

/// Scans U(φ₁, φ₂) over [−2π, 2π]² on a grid×grid mesh, polishes the origin
/// stationary point and the global grid minimum, and reports metastability.
/// Joint shifts (φ₁, φ₂) → (φ₁+2πk, φ₂+2πk) leave U invariant and are
/// modded out before comparing basins.
pub fn potential_minimum_check(p: &CircuitParams, grid: usize) -> Result<MinimumReport> {
    p.validate()?;
    if grid < 16 {
        return Err(Error::invalid("grid must be at least 16 points per axis"));
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let origin = polish_minimum(p, (0.0, 0.0));
    let origin_value = total_potential(p, origin.0, origin.1);

    let h = 1e-3;
    let f = |a: f64, b: f64| total_potential(p, a, b);
    let (x, y) = origin;
    let hxx = (f(x + h, y) - 2.0 * f(x, y) + f(x - h, y)) / (h * h);
    let hyy = (f(x, y + h) - 2.0 * f(x, y) + f(x, y - h)) / (h * h);
    let hxy =
        (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4.0 * h * h);
    let tr = hxx + hyy;
    let disc = ((hxx - hyy) * (hxx - hyy) + 4.0 * hxy * hxy).sqrt();
    let eigs = (0.5 * (tr - disc), 0.5 * (tr + disc));

    let mut best = (0.0f64, 0.0f64, f64::INFINITY);
    for i in 0..grid {
        let a = -two_pi + 2.0 * two_pi * i as f64 / (grid - 1) as f64;
        for jx in 0..grid {
            let b = -two_pi + 2.0 * two_pi * jx as f64 / (grid - 1) as f64;
            let v = f(a, b);
            if v < best.2 {
                best = (a, b, v);
            }
        }
    }
    let global = polish_minimum(p, (best.0, best.1));
    let global_value = f(global.0, global.1);

    // Mod out joint 2π shifts before deciding whether the global basin is
    // distinct from the origin's.
    let shift = ((global.0 - origin.0) / two_pi).round();
    let folded = (global.0 - shift * two_pi, global.1 - shift * two_pi);
    let same_basin = (folded.0 - origin.0).abs() < 1e-6 && (folded.1 - origin.1).abs() < 1e-6;
    let scale = 1.0 + origin_value.abs();
    let metastable = !same_basin && global_value < origin_value - 1e-9 * scale;

    Ok(MinimumReport {
        origin,
        origin_value,
        hessian: [[hxx, hxy], [hxy, hyy]],
        hessian_eigenvalues: eigs,
        locally_stable: eigs.0 > 0.0,
        global,
        global_value,
        metastable,
    })
}

/// Numeric cross-check of the closed-form cross-Kerr.
#[derive(Debug, Clone)]
pub struct NumericValidation {
    pub n_levels: usize,
    /// Δ from the two-mode diagonalization at n and 2n levels.
    pub delta_numeric: f64,
    pub delta_numeric_doubled: f64,
    pub relative_shift: f64,
    pub delta_closed_form: f64,
    pub relative_deviation: f64,
    /// Bare transfer element ⟨e g|H|g e⟩ in the product eigenbasis.
    pub j_numeric: f64,
    /// Identification overlaps for |00⟩, |10⟩, |01⟩, |11⟩.
    pub overlaps: [f64; 4],
    pub warnings: Vec<String>,
}

struct ModeOps {
    phi: DMatrix<f64>,
    /// n = i·nr with nr real antisymmetric; stored as nr.
    nr: DMatrix<f64>,
}

fn mode_ops(e_c: f64, e_l: f64, levels: usize) -> ModeOps {
    let mut a = DMatrix::<f64>::zeros(levels, levels);
    for k in 1..levels {
        a[(k - 1, k)] = (k as f64).sqrt();
    }
    let ad = a.transpose();
    let phi_zpf = (2.0 * e_c / e_l).powf(0.25);
    let n_zpf = 0.5 * (e_l / (2.0 * e_c)).powf(0.25);
    ModeOps { phi: (&a + &ad) * phi_zpf, nr: (&ad - &a) * n_zpf }
}

/// cos(scale·φ̂) and sin(scale·φ̂) via the eigendecomposition of φ̂.
fn trig(phi: &DMatrix<f64>, scale: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(phi.clone());
    let v = &eig.eigenvectors;
    let mut c = DMatrix::<f64>::zeros(phi.nrows(), phi.ncols());
    let mut s = DMatrix::<f64>::zeros(phi.nrows(), phi.ncols());
    for (k, lam) in eig.eigenvalues.iter().enumerate() {
        let col = v.column(k);
        let (cl, sl) = ((lam * scale).cos(), (lam * scale).sin());
        for r in 0..phi.nrows() {
            for q in 0..phi.ncols() {
                c[(r, q)] += cl * col[r] * col[q];
                s[(r, q)] += sl * col[r] * col[q];
            }
        }
    }
    (c, s)
}

/// Single-mode eigenbasis used to label the two-mode spectrum: the mode's
/// own junction cosine plus the coupler's quadratic load, gauge-fixed so
/// each eigenvector's dominant harmonic component is positive.
fn single_mode_basis(e_c: f64, e_jm: f64, e_ind: f64, levels: usize) -> DMatrix<f64> {
    let ops = mode_ops(e_c, e_jm + e_ind, levels);
    let (c, _) = trig(&ops.phi, 1.0);
    let hm = -(&ops.nr * &ops.nr) * (4.0 * e_c) - c * e_jm
        + (&ops.phi * &ops.phi) * (0.5 * e_ind);
    let hm = (&hm + hm.transpose()) * 0.5;
    let eig = SymmetricEigen::new(hm);
    let mut order: Vec<usize> = (0..levels).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .expect("finite eigenvalues")
    });
    let mut v = DMatrix::<f64>::zeros(levels, levels);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).clone_owned();
        if col[dst] < 0.0 {
            col.neg_mut();
        }
        v.set_column(dst, &col);
    }
    v
}

fn two_mode_delta(p: &CircuitParams, levels: usize) -> Result<(f64, f64, [f64; 4])> {
    let (e_c1, e_c2, e_cap) = inverse_2x2(p)?;
    let nj = p.n_j as f64;
    let e_ind = p.e_j * p.alpha + p.e_l - p.e_j / nj;
    let e_l1 = p.e_j1 + e_ind;
    let e_l2 = p.e_j2 + e_ind;
    if e_l1 <= 0.0 || e_l2 <= 0.0 {
        return Err(Error::UnphysicalDesign(
            "net inductive energy is nonpositive; no harmonic basis exists".into(),
        ));
    }
    let m1 = mode_ops(e_c1, e_l1, levels);
    let m2 = mode_ops(e_c2, e_l2, levels);
    let (c1, s1) = trig(&m1.phi, 1.0);
    let (c2, s2) = trig(&m2.phi, 1.0);
    let eye = DMatrix::<f64>::identity(levels, levels);

    let n1n1 = &m1.nr * &m1.nr;
    let n2n2 = &m2.nr * &m2.nr;
    let p1p1 = &m1.phi * &m1.phi;
    let p2p2 = &m2.phi * &m2.phi;

    // n = i·nr, so n² = −nr·nr and n₁n₂ = −nr₁⊗nr₂.
    let mut h = n1n1.kronecker(&eye) * (-4.0 * e_c1)
        + eye.kronecker(&n2n2) * (-4.0 * e_c2)
        + m1.nr.kronecker(&m2.nr) * (-8.0 * e_cap)
        + c1.kronecker(&eye) * (-p.e_j1)
        + eye.kronecker(&c2) * (-p.e_j2)
        + (p1p1.kronecker(&eye) + eye.kronecker(&p2p2)) * (0.5 * p.e_l)
        + m1.phi.kronecker(&m2.phi) * (-p.e_l)
        + (c1.kronecker(&c2) + s1.kronecker(&s2)) * (-p.alpha * p.e_j);
    if p.e_j > 0.0 {
        // Array branch at φ_ext = N_J·π: +N_J·E_J·cos((φ₁−φ₂)/N_J). Other
        // biases shift the argument.
        let bias = p.phi_ext / nj;
        let (c1q, s1q) = trig(&m1.phi, 1.0 / nj);
        let (c2q, s2q) = trig(&m2.phi, 1.0 / nj);
        // cos((φ₁−φ₂)/N_J + bias) = cos(bias)(C₁C₂+S₁S₂) − sin(bias)(S₁C₂−C₁S₂).
        let cc = c1q.kronecker(&c2q) + s1q.kronecker(&s2q);
        let ss = s1q.kronecker(&c2q) - c1q.kronecker(&s2q);
        h += (cc * bias.cos() - ss * bias.sin()) * (-nj * p.e_j);
    }
    let h = (&h + h.transpose()) * 0.5;

    let eig = SymmetricEigen::new(h.clone());
    let v1 = single_mode_basis(e_c1, p.e_j1, e_ind, levels);
    let v2 = single_mode_basis(e_c2, p.e_j2, e_ind, levels);
    let product = |k1: usize, k2: usize| -> nalgebra::DVector<f64> {
        let a = v1.column(k1).clone_owned();
        let b = v2.column(k2).clone_owned();
        a.kronecker(&b)
    };
    let find = |k1: usize, k2: usize| -> (f64, f64) {
        let r = product(k1, k2);
        let mut best = (0usize, 0.0f64);
        for k in 0..eig.eigenvalues.len() {
            let ov = eig.eigenvectors.column(k).dot(&r).abs();
            if ov > best.1 {
                best = (k, ov);
            }
        }
        (eig.eigenvalues[best.0], best.1)
    };
    let (e00, o00) = find(0, 0);
    let (e10, o10) = find(1, 0);
    let (e01, o01) = find(0, 1);
    let (e11, o11) = find(1, 1);
    let delta = -(e11 - e10 - e01 + e00);
    let r10 = product(1, 0);
    let r01 = product(0, 1);
    let j_num = (r10.transpose() * &h * r01)[(0, 0)];
    Ok((delta, j_num, [o00, o10, o01, o11]))
}

/// Diagonalizes the full two-mode circuit (junction cosines kept whole, the
/// array branch included nonperturbatively) in a product harmonic basis of
/// `n_levels` per mode, labels states by overlap with the uncoupled mode
/// eigenstates, and compares the resulting cross-Kerr against the closed
/// form. Doubling the basis must move Δ by less than 1%, otherwise the
/// truncation is too small and the call fails with IncreaseLevels.
pub fn numeric_validate(p: &CircuitParams, n_levels: usize) -> Result<NumericValidation> {
    p.validate()?;
    if !(4..=40).contains(&n_levels) {
        return Err(Error::invalid("n_levels must lie in 4..=40"));
    }
    let (d1, j_num, overlaps) = two_mode_delta(p, n_levels)?;
    let (d2, _, _) = two_mode_delta(p, 2 * n_levels)?;
    // Absolute floor so a decoupled circuit's numerically-zero cross-Kerr
    // does not trip the convergence check on roundoff noise.
    let shift = (d2 - d1).abs() / d1.abs().max(1e-9);
    if shift > 0.01 {
        return Err(Error::IncreaseLevels(format!(
            "cross-Kerr moved {:.2}% when doubling the basis; raise n_levels",
            100.0 * shift
        )));
    }
    let closed = derive_couplings(p)?;
    let mut warnings = Vec::new();
    if overlaps.iter().any(|&o| o < 0.8) {
        warnings.push(format!(
            "state identification is soft (min overlap {:.3})",
            overlaps.iter().cloned().fold(f64::INFINITY, f64::min)
        ));
    }
    Ok(NumericValidation {
        n_levels,
        delta_numeric: d1,
        delta_numeric_doubled: d2,
        relative_shift: shift,
        delta_closed_form: closed.delta,
        relative_deviation: (d1 - closed.delta).abs() / closed.delta.abs().max(f64::MIN_POSITIVE),
        j_numeric: j_num,
        overlaps,
        warnings,
    })
}

/// Next-nearest-neighbor coupling estimate for a three-qubit chain.
#[derive(Debug, Clone)]
pub struct CrosstalkResult {
    /// (C⁻¹)₁₃ of the three-node capacitance matrix.
    pub e_cap_13: f64,
    /// End-mode impedance parameter.
    pub x1: f64,
    pub j_crosstalk: f64,
}

/// Estimates the stray 1↔3 hopping in a chain of three qubits joined by two
/// couplers: ends carry C_J1 plus one coupler load, the middle qubit C_J2
/// plus two. J_xtalk = 2(C⁻¹)₁₃/(x₁x₃)^(1/4) with x₃ = x₁ by symmetry.
pub fn crosstalk_estimate(p: &CircuitParams) -> Result<CrosstalkResult> {
    p.validate()?;
    let cc = p.c_coupling();
    let c3 = Matrix3::new(
        p.c_j1 + cc, -cc, 0.0,
        -cc, p.c_j2 + 2.0 * cc, -cc,
        0.0, -cc, p.c_j1 + cc,
    );
    let inv = c3
        .try_inverse()
        .ok_or_else(|| Error::invalid("three-node capacitance matrix is singular"))?;
    let e_cap_13 = inv[(0, 2)];
    let couplings = derive_couplings(p)?;
    let x1 = 2.0 * inv[(0, 0)] / couplings.e_l1;
    if x1 <= 0.0 {
        return Err(Error::UnphysicalDesign("end mode has nonpositive impedance".into()));
    }
    Ok(CrosstalkResult {
        e_cap_13,
        x1,
        j_crosstalk: 2.0 * e_cap_13 / x1.sqrt(),
    })
}

/// Exchange coupling mediated by a far-detuned resonator:
/// J = g²·[1/(Ω−ω_r) − 1/(Ω+δ−ω_r)].
pub fn resonator_mediated_j(g_res: f64, omega: f64, anharm: f64, omega_res: f64) -> Result<f64> {
    let d1 = omega - omega_res;
    let d2 = omega + anharm - omega_res;
    if d1.abs() < 1e-9 || d2.abs() < 1e-9 {
        return Err(Error::invalid("resonator is resonant with a qubit transition"));
    }
    Ok(g_res * g_res * (1.0 / d1 - 1.0 / d2))
}
