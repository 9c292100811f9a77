//! Time evolution and observables.
//!
//! Evolution uses short-iterate Lanczos (Krylov) propagation with full
//! reorthogonalization: a subspace built from the current state is valid for
//! any step length, so each accepted window is evaluated at every grid time
//! it covers and the step is halved (no rebuild) until the standard residual
//! estimate β_m·|[e^{−iT τ}]_{m,1}| is below tolerance. The projected
//! propagator is exactly unitary on the subspace, so norm drift stays at the
//! reorthogonalization floor.
//!
//! All experiments report dimensionless times Jt; callers convert with their
//! own J before passing a grid in physical units of 1/energy.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hamiltonian::{DisorderSpec, SparseOperator, StateSpace};
use crate::io;

/// Default Krylov subspace dimension.
pub const DEFAULT_KRYLOV_DIM: usize = 30;

/// Default per-step truncation tolerance.
pub const DEFAULT_KRYLOV_TOL: f64 = 1e-10;

/// Input-state normalization tolerance.
const NORM_TOL: f64 = 1e-8;

/// A sampled observable over a time grid, optionally with ensemble std.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub std: Option<Vec<f64>>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let s = TimeSeries { times, values, std: None };
        s.validate()?;
        Ok(s)
    }

    pub fn with_std(times: Vec<f64>, values: Vec<f64>, std: Vec<f64>) -> Result<Self> {
        let s = TimeSeries { times, values, std: Some(std) };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.times.is_empty() {
            return Err(Error::invalid("time series is empty"));
        }
        if self.times.len() != self.values.len() {
            return Err(Error::invalid("times and values lengths differ"));
        }
        if let Some(s) = &self.std {
            if s.len() != self.times.len() {
                return Err(Error::invalid("std length differs"));
            }
            if s.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(Error::invalid("std values must be finite and nonnegative"));
            }
        }
        if self.times.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("times must be finite"));
        }
        if self.times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("times must be strictly increasing"));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("values must be finite"));
        }
        Ok(())
    }

    /// CSV document: header `time,value[,std]`, 12 significant digits.
    pub fn to_csv(&self) -> String {
        match &self.std {
            None => io::csv_document(
                &["time", "value"],
                self.times
                    .iter()
                    .zip(&self.values)
                    .map(|(&t, &v)| vec![t, v]),
            ),
            Some(s) => io::csv_document(
                &["time", "value", "std"],
                self.times
                    .iter()
                    .zip(&self.values)
                    .zip(s)
                    .map(|((&t, &v), &d)| vec![t, v, d]),
            ),
        }
    }

    /// Value at the last grid point.
    pub fn last_value(&self) -> f64 {
        *self.values.last().expect("validated series is nonempty")
    }
}

/// Uniform grid of `points` times over [t0, t1].
pub fn time_grid(t0: f64, t1: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 || !(t1 > t0) {
        return Err(Error::invalid("grid needs t1 > t0 and at least 2 points"));
    }
    Ok((0..points)
        .map(|k| t0 + (t1 - t0) * k as f64 / (points - 1) as f64)
        .collect())
}

/// Running time average (1/t)∫₀ᵗ f dt′ by the trapezoidal rule; the first
/// point carries the first raw value.
pub fn time_average(series: &TimeSeries) -> Result<TimeSeries> {
    series.validate()?;
    let t = &series.times;
    let v = &series.values;
    let mut integral = 0.0;
    let mut out = Vec::with_capacity(v.len());
    out.push(v[0]);
    for k in 1..v.len() {
        integral += 0.5 * (v[k] + v[k - 1]) * (t[k] - t[k - 1]);
        out.push(integral / (t[k] - t[0]));
    }
    TimeSeries::new(t.clone(), out)
}

/// Ordinary least squares y ≈ slope·x + intercept.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::invalid("linear fit needs two or more (x, y) pairs"));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::invalid("linear fit inputs must be finite"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("linear fit x values are all equal"));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// First time the series reaches `level`, linearly interpolated between the
/// bracketing grid points. None when the series never reaches it.
pub fn crossing_time(series: &TimeSeries, level: f64) -> Option<f64> {
    let (t, v) = (&series.times, &series.values);
    if v[0] >= level {
        return Some(t[0]);
    }
    for k in 1..v.len() {
        if v[k] >= level {
            let f = (level - v[k - 1]) / (v[k] - v[k - 1]);
            return Some(t[k - 1] + f * (t[k] - t[k - 1]));
        }
    }
    None
}

/// Coefficient of determination for y ≈ slope·x + intercept.
pub fn r_squared(xs: &[f64], ys: &[f64], slope: f64, intercept: f64) -> f64 {
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (slope * x + intercept);
            e * e
        })
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if ss_tot == 0.0 {
        return 1.0;
    }
    1.0 - ss_res / ss_tot
}

/// Linear interpolation on a strictly increasing grid; `x` must lie inside.
pub fn interp_linear(xs: &[f64], ys: &[f64], x: f64) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::invalid("interpolation needs two or more points"));
    }
    if x < xs[0] || x > *xs.last().expect("nonempty") {
        return Err(Error::invalid("interpolation point outside the grid"));
    }
    let hi = xs.partition_point(|&g| g < x).max(1).min(xs.len() - 1);
    let lo = hi - 1;
    let w = (x - xs[lo]) / (xs[hi] - xs[lo]);
    Ok(ys[lo] + w * (ys[hi] - ys[lo]))
}

/// ‖ψ‖₂.
pub fn norm(psi: &[Complex64]) -> f64 {
    psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// ⟨ψ|H|ψ⟩ (real for Hermitian H).
pub fn expectation(h: &SparseOperator, psi: &[Complex64]) -> f64 {
    let hpsi = h.matvec(psi);
    psi.iter()
        .zip(&hpsi)
        .map(|(a, b)| (a.conj() * b).re)
        .sum()
}

struct KrylovSubspace {
    /// Orthonormal Lanczos basis vectors, m_eff of them.
    basis: Vec<Vec<Complex64>>,
    /// Eigendecomposition of the projected tridiagonal matrix.
    eigvals: DVector<f64>,
    eigvecs: DMatrix<f64>,
    /// β_m that would extend the subspace; 0 on happy breakdown.
    residual_beta: f64,
}

impl KrylovSubspace {
    fn build(h: &SparseOperator, psi: &[Complex64], m: usize) -> Self {
        let dim = psi.len();
        let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m);
        let mut alpha = Vec::with_capacity(m);
        let mut beta = Vec::with_capacity(m);
        basis.push(psi.to_vec());
        let mut w = vec![Complex64::ZERO; dim];
        let mut residual_beta = 0.0;
        for jx in 0..m {
            h.matvec_into(&basis[jx], &mut w);
            let a: f64 = basis[jx]
                .iter()
                .zip(&w)
                .map(|(v, x)| (v.conj() * x).re)
                .sum();
            alpha.push(a);
            for (wi, vi) in w.iter_mut().zip(&basis[jx]) {
                *wi -= vi * a;
            }
            if jx > 0 {
                let b = beta[jx - 1];
                for (wi, vi) in w.iter_mut().zip(&basis[jx - 1]) {
                    *wi -= vi * b;
                }
            }
            // Full reorthogonalization keeps the basis orthonormal to
            // machine precision; one pass suffices after the explicit
            // three-term recurrence subtraction.
            for v in &basis {
                let overlap: Complex64 = v.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                for (wi, vi) in w.iter_mut().zip(v) {
                    *wi -= vi * overlap;
                }
            }
            let b = norm(&w);
            // Happy breakdown: the Krylov space is invariant and the
            // projected propagator is exact for any step.
            if b < 1e-13 {
                residual_beta = 0.0;
                break;
            }
            if jx + 1 == m {
                residual_beta = b;
                break;
            }
            beta.push(b);
            let mut next = w.clone();
            let inv = 1.0 / b;
            for x in &mut next {
                *x *= inv;
            }
            basis.push(next);
        }
        let m_eff = basis.len();
        let mut t = DMatrix::zeros(m_eff, m_eff);
        for k in 0..m_eff {
            t[(k, k)] = alpha[k];
            if k + 1 < m_eff {
                t[(k, k + 1)] = beta[k];
                t[(k + 1, k)] = beta[k];
            }
        }
        let eig = SymmetricEigen::new(t);
        KrylovSubspace {
            basis,
            eigvals: eig.eigenvalues,
            eigvecs: eig.eigenvectors,
            residual_beta,
        }
    }

    fn m_eff(&self) -> usize {
        self.basis.len()
    }

    /// u(τ) = e^{−iTτ}·e₁ in subspace coordinates.
    fn propagate_coeffs(&self, tau: f64) -> Vec<Complex64> {
        let m = self.m_eff();
        let mut u = vec![Complex64::ZERO; m];
        for l in 0..m {
            let phase = Complex64::from_polar(1.0, -self.eigvals[l] * tau);
            let weight = self.eigvecs[(0, l)];
            for k in 0..m {
                u[k] += phase * (weight * self.eigvecs[(k, l)]);
            }
        }
        u
    }

    /// Standard truncation-error estimate for a step of length τ.
    fn error_estimate(&self, tau: f64) -> f64 {
        if self.residual_beta == 0.0 {
            return 0.0;
        }
        let u = self.propagate_coeffs(tau);
        self.residual_beta * u[self.m_eff() - 1].norm()
    }

    /// ψ(τ) in the full space.
    fn state_at(&self, tau: f64) -> Vec<Complex64> {
        let u = self.propagate_coeffs(tau);
        let dim = self.basis[0].len();
        let mut out = vec![Complex64::ZERO; dim];
        for (k, v) in self.basis.iter().enumerate() {
            let c = u[k];
            if c.norm() == 0.0 {
                continue;
            }
            for (o, x) in out.iter_mut().zip(v) {
                *o += x * c;
            }
        }
        out
    }
}

/// Evolves ψ0 under e^{−iHt}, streaming each grid state into `observe`
/// (called in grid order with (index, time, state)). Memory stays at a few
/// state vectors regardless of grid length.
pub fn evolve_observe<F>(
    h: &SparseOperator,
    psi0: &[Complex64],
    times: &[f64],
    observe: F,
) -> Result<()>
where
    F: FnMut(usize, f64, &[Complex64]),
{
    evolve_observe_with(h, psi0, times, DEFAULT_KRYLOV_DIM, DEFAULT_KRYLOV_TOL, observe)
}

/// [`evolve_observe`] with explicit Krylov dimension and per-step tolerance.
pub fn evolve_observe_with<F>(
    h: &SparseOperator,
    psi0: &[Complex64],
    times: &[f64],
    krylov_dim: usize,
    step_tol: f64,
    mut observe: F,
) -> Result<()>
where
    F: FnMut(usize, f64, &[Complex64]),
{
    if krylov_dim < 2 || !(step_tol > 0.0) {
        return Err(Error::invalid("need krylov_dim >= 2 and a positive tolerance"));
    }
    if h.dim() != psi0.len() {
        return Err(Error::invalid("state length does not match operator"));
    }
    if times.is_empty() {
        return Err(Error::invalid("empty time grid"));
    }
    if times.windows(2).any(|w| w[0] >= w[1]) || times[0] < 0.0 {
        return Err(Error::invalid("times must be nonnegative and strictly increasing"));
    }
    if (norm(psi0) - 1.0).abs() > NORM_TOL {
        return Err(Error::invalid("input state is not normalized"));
    }

    let h_norm = h.one_norm();
    if h_norm == 0.0 {
        for (k, &t) in times.iter().enumerate() {
            observe(k, t, psi0);
        }
        return Ok(());
    }

    let mut psi = psi0.to_vec();
    let mut t_cur = 0.0f64;
    let mut next = 0usize;
    if times[0] == 0.0 {
        observe(0, 0.0, &psi);
        next = 1;
    }
    let t_end = *times.last().expect("nonempty");
    // Initial step sized so ‖H‖·h is comfortable for the subspace dimension.
    let mut h_guess = (krylov_dim as f64 * 0.5 / h_norm).min(t_end.max(1e-30));
    while next < times.len() {
        let sub = KrylovSubspace::build(h, &psi, krylov_dim);
        let mut step = h_guess.min(t_end - t_cur);
        let mut halvings = 0;
        while sub.error_estimate(step) > step_tol {
            step *= 0.5;
            halvings += 1;
            if halvings > 60 {
                return Err(Error::NumericFailure(
                    "Krylov step underflow; Hamiltonian may be ill-conditioned".into(),
                ));
            }
        }
        let t_next = t_cur + step;
        while next < times.len() && times[next] <= t_next + 1e-12 * t_end.max(1.0) {
            let state = sub.state_at(times[next] - t_cur);
            observe(next, times[next], &state);
            next += 1;
        }
        if next >= times.len() {
            break;
        }
        psi = sub.state_at(step);
        t_cur = t_next;
        h_guess = if halvings == 0 { step * 1.5 } else { step };
    }
    Ok(())
}

/// Evolves and collects the full state at every grid time. Prefer
/// [`evolve_observe`] for long grids on large spaces.
pub fn evolve(
    h: &SparseOperator,
    psi0: &[Complex64],
    times: &[f64],
) -> Result<Vec<Vec<Complex64>>> {
    let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(times.len());
    evolve_observe(h, psi0, times, |_, _, psi| out.push(psi.to_vec()))?;
    Ok(out)
}

/// Dense eigendecomposition oracle for e^{−iHt}ψ0; dimension-limited, used
/// to cross-check the Krylov propagator.
pub fn evolve_dense(
    h: &SparseOperator,
    psi0: &[Complex64],
    times: &[f64],
) -> Result<Vec<Vec<Complex64>>> {
    const DENSE_CAP: usize = 2048;
    if h.dim() > DENSE_CAP {
        return Err(Error::TooLarge(format!(
            "dense oracle capped at dimension {DENSE_CAP}"
        )));
    }
    if h.dim() != psi0.len() {
        return Err(Error::invalid("state length does not match operator"));
    }
    let eig = SymmetricEigen::new(h.to_dense());
    let dim = h.dim();
    // c = Vᵀ ψ0.
    let mut c = vec![Complex64::ZERO; dim];
    for l in 0..dim {
        let mut acc = Complex64::ZERO;
        for k in 0..dim {
            acc += psi0[k] * eig.eigenvectors[(k, l)];
        }
        c[l] = acc;
    }
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let mut psi = vec![Complex64::ZERO; dim];
        for l in 0..dim {
            let phase = Complex64::from_polar(1.0, -eig.eigenvalues[l] * t) * c[l];
            if phase.norm() == 0.0 {
                continue;
            }
            for k in 0..dim {
                psi[k] += phase * eig.eigenvectors[(k, l)];
            }
        }
        out.push(psi);
    }
    Ok(out)
}

/// P_D = 1 − Σ_connected |⟨c|ψ⟩|²: probability the string is disconnected.
pub fn measure_disconnect(psi: &[Complex64], space: &StateSpace) -> Result<f64> {
    if psi.len() != space.dim() {
        return Err(Error::invalid("state length does not match space"));
    }
    let connected: f64 = space
        .connected_ordinals()
        .iter()
        .map(|&o| psi[o].norm_sqr())
        .sum();
    Ok((1.0 - connected).clamp(0.0, 1.0))
}

/// ⟨R⟩ = Σ_p (p+1)·P(central-track particle at position p), the average
/// position of the central-track particle with sites labeled 1..N from the
/// left.
pub fn measure_central_position(psi: &[Complex64], space: &StateSpace) -> Result<f64> {
    if psi.len() != space.dim() {
        return Err(Error::invalid("state length does not match space"));
    }
    let crate::lattice::Shape::Rotated { .. } = space.lattice().shape else {
        return Err(Error::invalid("central position applies to rotated lattices"));
    };
    let central = space
        .lattice()
        .track_index(0)
        .ok_or_else(|| Error::invalid("lattice has no central track"))?;
    let t = space.n_tracks();
    let mut positions = vec![0u16; t];
    let mut r = 0.0;
    for (ord, amp) in psi.iter().enumerate() {
        let p = amp.norm_sqr();
        if p == 0.0 {
            continue;
        }
        space.positions_of(ord, &mut positions);
        r += (positions[central] as f64 + 1.0) * p;
    }
    Ok(r)
}

/// Runs `runs` disorder realizations in parallel and aggregates mean and
/// per-time population standard deviation. `run_values(r)` must return the
/// observable on the shared time grid for realization r; determinism comes
/// from indexed substreams, and the reduction is ordered by run index so
/// results are independent of the parallel schedule.
pub fn ensemble_run<F>(spec: &DisorderSpec, times: &[f64], run_values: F) -> Result<TimeSeries>
where
    F: Fn(u32) -> Result<Vec<f64>> + Sync,
{
    if spec.runs < 1 {
        return Err(Error::invalid("ensemble needs at least one run"));
    }
    if times.is_empty() {
        return Err(Error::invalid("empty time grid"));
    }
    let all: Vec<Vec<f64>> = (0..spec.runs)
        .into_par_iter()
        .map(|r| {
            let v = run_values(r)?;
            if v.len() != times.len() {
                return Err(Error::internal("run returned wrong grid length"));
            }
            Ok(v)
        })
        .collect::<Result<_>>()?;
    let n = spec.runs as f64;
    let mut mean = vec![0.0f64; times.len()];
    for run in &all {
        for (m, v) in mean.iter_mut().zip(run) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    let mut std = vec![0.0f64; times.len()];
    for run in &all {
        for ((s, v), m) in std.iter_mut().zip(run).zip(&mean) {
            *s += (v - m) * (v - m);
        }
    }
    for s in &mut std {
        *s = (*s / n).sqrt();
    }
    TimeSeries::with_std(times.to_vec(), mean, std)
}
