//! Dense gate algebra verifying the universality constructions.
//!
//! The lattice model only ever applies real orthogonal single-qubit gates, so
//! universality rests on three circuit identities: the real gate V = ZH
//! squares to iY, CZ is conjugated out of CNOT by Hadamards, and a Toffoli
//! assembles from CNOT plus a controlled-controlled-iY pair acting on an
//! ancilla prepared in |0⟩. Everything here is small dense complex matrix
//! arithmetic; the checks are exact up to floating-point roundoff.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix used for gate algebra.
pub type CMat = DMatrix<Complex64>;

/// Unitarity tolerance for every emitted gate.
pub const UNITARY_TOL: f64 = 1e-12;

fn cr(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// A unitary gate matrix on one or more qubits.
#[derive(Debug, Clone)]
pub struct GateMatrix {
    mat: CMat,
}

impl GateMatrix {
    /// Wraps a matrix, checking that the dimension is a power of two and the
    /// matrix is unitary to [`UNITARY_TOL`].
    pub fn new(mat: CMat) -> Result<Self> {
        let n = mat.nrows();
        if n == 0 || mat.ncols() != n || !n.is_power_of_two() {
            return Err(Error::invalid(format!(
                "gate matrix must be square with power-of-two dimension, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let dev = unitarity_deviation(&mat);
        if dev > UNITARY_TOL {
            return Err(Error::invalid(format!(
                "gate matrix is not unitary: max |U†U - I| = {dev:.3e}"
            )));
        }
        Ok(GateMatrix { mat })
    }

    /// Matrix dimension (2^qubits).
    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// Borrows the underlying matrix.
    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    /// Largest imaginary part over all entries; 0 for real-valued gates.
    pub fn max_imag(&self) -> f64 {
        self.mat.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// Converts a single-qubit real gate to the 2x2 array form used by
    /// lattice plaquettes. Fails if the gate is not 2x2 real.
    pub fn as_real2(&self) -> Result<[[f64; 2]; 2]> {
        if self.dim() != 2 {
            return Err(Error::invalid("expected a single-qubit gate"));
        }
        if self.max_imag() > UNITARY_TOL {
            return Err(Error::invalid("gate has complex entries"));
        }
        Ok([
            [self.mat[(0, 0)].re, self.mat[(0, 1)].re],
            [self.mat[(1, 0)].re, self.mat[(1, 1)].re],
        ])
    }
}

/// Max-entry deviation of U†U from the identity.
pub fn unitarity_deviation(mat: &CMat) -> f64 {
    let n = mat.nrows();
    let prod = mat.adjoint() * mat;
    let mut dev: f64 = 0.0;
    for r in 0..n {
        for c in 0..n {
            let expect = if r == c { cr(1.0) } else { cr(0.0) };
            dev = dev.max((prod[(r, c)] - expect).norm());
        }
    }
    dev
}

/// Max-entry absolute difference between two matrices.
pub fn max_deviation(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in max_deviation");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Real rotation gate [[cos θ, sin θ], [−sin θ, cos θ]].
///
/// θ=0 gives the identity and θ=π/2 gives iY = [[0,1],[−1,0]]; these are the
/// single-qubit gates the hopping plaquettes can apply.
pub fn rotation(theta: f64) -> GateMatrix {
    let (s, c) = theta.sin_cos();
    let mat = CMat::from_row_slice(2, 2, &[cr(c), cr(s), cr(-s), cr(c)]);
    GateMatrix::new(mat).expect("rotation matrices are orthogonal")
}

/// 2x2 identity.
pub fn identity_gate() -> GateMatrix {
    GateMatrix::new(CMat::identity(2, 2)).expect("identity is unitary")
}

/// Pauli X.
pub fn x_gate() -> GateMatrix {
    let m = CMat::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(1.0), cr(0.0)]);
    GateMatrix::new(m).expect("X is unitary")
}

/// Pauli Z.
pub fn z_gate() -> GateMatrix {
    let m = CMat::from_row_slice(2, 2, &[cr(1.0), cr(0.0), cr(0.0), cr(-1.0)]);
    GateMatrix::new(m).expect("Z is unitary")
}

/// Hadamard.
pub fn hadamard_gate() -> GateMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let m = CMat::from_row_slice(2, 2, &[cr(h), cr(h), cr(h), cr(-h)]);
    GateMatrix::new(m).expect("H is unitary")
}

/// iY = [[0, 1], [−1, 0]], the square of V = ZH.
pub fn iy_gate() -> GateMatrix {
    rotation(std::f64::consts::FRAC_PI_2)
}

/// Embeds a single-qubit gate on qubit `target` of an `n`-qubit register.
/// Qubit 0 is the most significant bit of the basis index.
fn embed_1q(u: &CMat, target: usize, n: usize) -> CMat {
    controlled_1q(u, None, target, n)
}

/// Controlled single-qubit gate: applies `u` on `target` when `control` (if
/// any) is |1⟩. Qubit 0 is the most significant bit.
fn controlled_1q(u: &CMat, control: Option<usize>, target: usize, n: usize) -> CMat {
    assert!(target < n, "target qubit out of range");
    if let Some(c) = control {
        assert!(c < n && c != target, "bad control qubit");
    }
    let dim = 1usize << n;
    let tbit = 1usize << (n - 1 - target);
    let mut out = CMat::zeros(dim, dim);
    for col in 0..dim {
        let active = match control {
            Some(c) => col & (1usize << (n - 1 - c)) != 0,
            None => true,
        };
        if !active {
            out[(col, col)] = cr(1.0);
            continue;
        }
        let t_in = usize::from(col & tbit != 0);
        for t_out in 0..2usize {
            let amp = u[(t_out, t_in)];
            if amp.norm() == 0.0 {
                continue;
            }
            let row = (col & !tbit) | if t_out == 1 { tbit } else { 0 };
            out[(row, col)] += amp;
        }
    }
    out
}

/// CNOT with the given control and target qubits on an `n`-qubit register.
fn cnot(control: usize, target: usize, n: usize) -> CMat {
    controlled_1q(x_gate().matrix(), Some(control), target, n)
}

/// CZ between two qubits on an `n`-qubit register.
fn cz(control: usize, target: usize, n: usize) -> CMat {
    controlled_1q(z_gate().matrix(), Some(control), target, n)
}

/// Outcome of a circuit-identity verification.
#[derive(Debug, Clone)]
pub struct SynthReport {
    /// Whether the identity held within its tolerance.
    pub pass: bool,
    /// Largest entrywise deviation between assembled and target matrices.
    pub max_deviation: f64,
    /// Tolerance the deviation was compared against.
    pub tolerance: f64,
    /// Human-readable description of what was checked.
    pub detail: String,
}

/// Verifies (ZH)² = iY and that V = ZH is real-valued.
pub fn verify_v_squared() -> SynthReport {
    let v = z_gate().matrix() * hadamard_gate().matrix();
    let v2 = &v * &v;
    let dev = max_deviation(&v2, iy_gate().matrix());
    let imag = v.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let tol = 1e-14;
    SynthReport {
        pass: dev <= tol && imag <= tol,
        max_deviation: dev.max(imag),
        tolerance: tol,
        detail: "V = ZH is real and V^2 = iY".to_string(),
    }
}

/// Verifies (I⊗H)·CNOT·(I⊗H) = CZ on two qubits.
pub fn verify_cz_from_h_cnot() -> SynthReport {
    let h1 = embed_1q(hadamard_gate().matrix(), 1, 2);
    let assembled = &h1 * cnot(0, 1, 2) * &h1;
    let dev = max_deviation(&assembled, &cz(0, 1, 2));
    let tol = 1e-14;
    SynthReport {
        pass: dev <= tol,
        max_deviation: dev,
        tolerance: tol,
        detail: "(I x H) CNOT (I x H) = CZ".to_string(),
    }
}

/// Controlled-V with V = ZH, as CZ followed by controlled-H.
fn controlled_v(control: usize, target: usize, n: usize) -> CMat {
    // V = Z·H applies H first, so the matrix product is CZ · CH.
    cz(control, target, n) * controlled_1q(hadamard_gate().matrix(), Some(control), target, n)
}

/// Controlled-V† with V† = HZ.
fn controlled_v_dag(control: usize, target: usize, n: usize) -> CMat {
    controlled_1q(hadamard_gate().matrix(), Some(control), target, n) * cz(control, target, n)
}

/// Controlled-controlled-iY on (c1, c2 → t) via the standard five-gate
/// controlled-controlled-U pattern with V² = iY:
/// CV(c1→t) · CNOT(c1→c2) · CV†(c2→t) · CNOT(c1→c2) · CV(c2→t).
fn cc_iy(c1: usize, c2: usize, t: usize, n: usize) -> CMat {
    controlled_v(c1, t, n)
        * cnot(c1, c2, n)
        * controlled_v_dag(c2, t, n)
        * cnot(c1, c2, n)
        * controlled_v(c2, t, n)
}

/// Verifies the ancilla-assisted Toffoli synthesis.
///
/// Register order (c1, c2, t, a) with the ancilla last. The circuit is
/// CC-iY(c1,c2→a), then CNOT(a→t), then CC-iY†(c1,c2→a); the two iY phases
/// cancel, the ancilla returns to |0⟩, and the restriction to the a=|0⟩
/// block equals the 8x8 Toffoli.
pub fn verify_toffoli_synthesis() -> SynthReport {
    let n = 4;
    let dim = 1usize << n;
    let cc = cc_iy(0, 1, 3, n);
    let circuit = cc.adjoint() * cnot(3, 2, n) * &cc;

    // Toffoli on (c1, c2 → t), 8x8: flip t where both controls are set.
    let mut toffoli = CMat::zeros(8, 8);
    for col in 0..8usize {
        let c1 = col & 0b100 != 0;
        let c2 = col & 0b010 != 0;
        let row = if c1 && c2 { col ^ 0b001 } else { col };
        toffoli[(row, col)] = cr(1.0);
    }

    // Restriction to the ancilla-|0⟩ block: ancilla is the least significant
    // bit, so block rows/cols are the even indices.
    let mut block = CMat::zeros(8, 8);
    let mut leakage: f64 = 0.0;
    for r in 0..8 {
        for c in 0..8 {
            block[(r, c)] = circuit[(2 * r, 2 * c)];
            leakage = leakage.max(circuit[(2 * r + 1, 2 * c)].norm());
        }
    }
    let dev = max_deviation(&block, &toffoli).max(leakage);
    let tol = 1e-12;
    let unitary_dev = unitarity_deviation(&circuit);
    SynthReport {
        pass: dev <= tol && unitary_dev <= tol,
        max_deviation: dev,
        tolerance: tol,
        detail: format!(
            "4-qubit circuit ({dim}x{dim}) restricted to ancilla |0> equals Toffoli; \
             ancilla leakage {leakage:.2e}"
        ),
    }
}
