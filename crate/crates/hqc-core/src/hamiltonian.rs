//! Basis enumeration and sparse Hamiltonian assembly.
//!
//! A configuration places one particle on each track and, unless the basis
//! is spin-factored, gives each particle a spin in {0,1}. The basis ordering
//! is lexicographic and documented, so serialized operators are
//! bit-reproducible: ordinal = position_rank · 2^T + spin_word, where
//! position_rank runs mixed-radix over the per-track site indices with track
//! 0 most significant, and spin_word holds track 0's spin in its most
//! significant bit.
//!
//! H_valid is diagonal: each satisfied attractive edge contributes
//! −Δ·strength_scale, so connected strings span the ground space with all
//! edges satisfied. V_hop is strictly off-diagonal: each plaquette record
//! moves one particle and applies its gate to that particle's spin, with the
//! Hermitian conjugate added automatically.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{EdgeKind, Gate2, LatticeSpec, Site};

/// Default cap on basis dimension; larger requests are a too-large error.
pub const DEFAULT_DIM_CAP: usize = 20_000_000;

/// Degeneracy tolerance when collecting the H_valid ground space.
const GROUND_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
struct CompiledEdge {
    /// Conditioning endpoint (track, position); carries the spin condition
    /// for spin-selective edges.
    ta: usize,
    pa: u16,
    tb: usize,
    pb: u16,
    control_spin: Option<u8>,
    scale: f64,
}

#[derive(Debug, Clone, Copy)]
struct CompiledHop {
    track: usize,
    p_from: u16,
    p_to: u16,
    gate: Gate2,
}

/// Enumerated one-particle-per-track basis over a lattice.
#[derive(Debug)]
pub struct StateSpace {
    lattice: LatticeSpec,
    spin_factored: bool,
    dim: usize,
    track_lens: Vec<u16>,
    /// Mixed-radix strides for the position rank; track 0 most significant.
    pos_strides: Vec<usize>,
    spin_dim: usize,
    site_lookup: HashMap<Site, (usize, u16)>,
    edges: Vec<CompiledEdge>,
    hops: Vec<CompiledHop>,
    connected: OnceLock<Vec<usize>>,
}

/// Enumerates the basis with the default dimension cap.
pub fn enumerate_basis(lattice: &LatticeSpec, spin_factored: bool) -> Result<StateSpace> {
    enumerate_basis_capped(lattice, spin_factored, DEFAULT_DIM_CAP)
}

/// Enumerates the basis, failing with too-large above `dim_cap`.
pub fn enumerate_basis_capped(
    lattice: &LatticeSpec,
    spin_factored: bool,
    dim_cap: usize,
) -> Result<StateSpace> {
    lattice.validate()?;
    let n_tracks = lattice.tracks.len();
    if n_tracks == 0 {
        return Err(Error::invalid("lattice has no tracks"));
    }
    let mut site_lookup = HashMap::new();
    let mut track_lens = Vec::with_capacity(n_tracks);
    for (t, track) in lattice.tracks.iter().enumerate() {
        if track.sites.is_empty() {
            return Err(Error::invalid(format!("track {} has no sites", track.key)));
        }
        if track.sites.len() > u16::MAX as usize {
            return Err(Error::TooLarge("track longer than 65535 sites".into()));
        }
        for (p, s) in track.sites.iter().enumerate() {
            site_lookup.insert(*s, (t, p as u16));
        }
        track_lens.push(track.sites.len() as u16);
    }
    let spin_dim = if spin_factored {
        1
    } else {
        if n_tracks >= usize::BITS as usize {
            return Err(Error::TooLarge("too many tracks for spin words".into()));
        }
        1usize << n_tracks
    };
    // Strides with track 0 most significant: stride_t = prod of lengths of
    // tracks after t.
    let mut pos_strides = vec![1usize; n_tracks];
    for t in (0..n_tracks.saturating_sub(1)).rev() {
        pos_strides[t] = pos_strides[t + 1]
            .checked_mul(track_lens[t + 1] as usize)
            .ok_or_else(|| Error::TooLarge("position rank overflows".into()))?;
    }
    let mut dim = spin_dim;
    for len in &track_lens {
        dim = dim
            .checked_mul(*len as usize)
            .ok_or_else(|| Error::TooLarge("dimension overflows".into()))?;
    }
    if dim > dim_cap {
        return Err(Error::TooLarge(format!(
            "basis dimension {dim} exceeds cap {dim_cap}"
        )));
    }

    let mut edges = Vec::with_capacity(lattice.edges.len());
    for e in &lattice.edges {
        let (ta, pa) = site_lookup[&e.a];
        let (tb, pb) = site_lookup[&e.b];
        if ta == tb {
            return Err(Error::invalid(format!(
                "edge {} - {} joins sites on one track",
                e.a, e.b
            )));
        }
        if spin_factored && e.kind == EdgeKind::SpinSelective {
            return Err(Error::invalid(
                "spin-selective edges need a spinful basis (spin_factored = false)",
            ));
        }
        edges.push(CompiledEdge {
            ta,
            pa,
            tb,
            pb,
            control_spin: match e.kind {
                EdgeKind::Standard => None,
                EdgeKind::SpinSelective => e.control_spin,
            },
            scale: e.strength_scale,
        });
    }
    let mut hops = Vec::with_capacity(lattice.plaquettes.len());
    for p in &lattice.plaquettes {
        let (tf, pf) = site_lookup[&p.from];
        let (tt, pt) = site_lookup[&p.to];
        if tf != tt {
            return Err(Error::internal("plaquette crosses tracks"));
        }
        hops.push(CompiledHop { track: tf, p_from: pf, p_to: pt, gate: p.gate });
    }
    Ok(StateSpace {
        lattice: lattice.clone(),
        spin_factored,
        dim,
        track_lens,
        pos_strides,
        spin_dim,
        site_lookup,
        edges,
        hops,
        connected: OnceLock::new(),
    })
}

impl StateSpace {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spin_factored(&self) -> bool {
        self.spin_factored
    }

    pub fn n_tracks(&self) -> usize {
        self.track_lens.len()
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    /// (track, in-track position) of a site.
    pub fn locate(&self, s: &Site) -> Option<(usize, u16)> {
        self.site_lookup.get(s).copied()
    }

    /// Decodes the per-track positions of an ordinal into `out`.
    pub fn positions_of(&self, ordinal: usize, out: &mut [u16]) {
        debug_assert_eq!(out.len(), self.n_tracks());
        let mut rank = ordinal / self.spin_dim;
        for t in 0..self.n_tracks() {
            out[t] = (rank / self.pos_strides[t]) as u16;
            rank %= self.pos_strides[t];
        }
    }

    /// Spin word of an ordinal; track t's spin sits in bit (T−1−t).
    pub fn spin_word_of(&self, ordinal: usize) -> usize {
        ordinal % self.spin_dim
    }

    /// Spin of track `t` in `spin_word`.
    pub fn spin_of(&self, spin_word: usize, t: usize) -> u8 {
        ((spin_word >> (self.n_tracks() - 1 - t)) & 1) as u8
    }

    /// Ordinal of a configuration given per-track positions and spins
    /// (spins required unless spin-factored).
    pub fn ordinal_of(&self, positions: &[u16], spins: Option<&[u8]>) -> Result<usize> {
        if positions.len() != self.n_tracks() {
            return Err(Error::invalid("wrong number of track positions"));
        }
        let mut rank = 0usize;
        for (t, &p) in positions.iter().enumerate() {
            if p >= self.track_lens[t] {
                return Err(Error::invalid(format!(
                    "position {p} out of range on track {t}"
                )));
            }
            rank += p as usize * self.pos_strides[t];
        }
        let word = match (self.spin_factored, spins) {
            (true, None) => 0,
            (true, Some(_)) => {
                return Err(Error::invalid("spin-factored basis takes no spins"));
            }
            (false, Some(sp)) => {
                if sp.len() != self.n_tracks() {
                    return Err(Error::invalid("wrong number of spins"));
                }
                let mut w = 0usize;
                for (t, &s) in sp.iter().enumerate() {
                    if s > 1 {
                        return Err(Error::invalid("spins are 0 or 1"));
                    }
                    w |= (s as usize) << (self.n_tracks() - 1 - t);
                }
                w
            }
            (false, None) => {
                return Err(Error::invalid("spinful basis needs spins"));
            }
        };
        Ok(rank * self.spin_dim + word)
    }

    /// One-hot basis state for a configuration.
    pub fn basis_state(
        &self,
        positions: &[u16],
        spins: Option<&[u8]>,
    ) -> Result<Vec<Complex64>> {
        let ord = self.ordinal_of(positions, spins)?;
        let mut v = vec![Complex64::ZERO; self.dim];
        v[ord] = Complex64::ONE;
        Ok(v)
    }

    /// Attractive-edge energy of an ordinal at Δ = 1 (sum of satisfied
    /// −strength_scale contributions).
    fn edge_energy(&self, positions: &[u16], spin_word: usize) -> f64 {
        let mut e = 0.0;
        for edge in &self.edges {
            if positions[edge.ta] != edge.pa || positions[edge.tb] != edge.pb {
                continue;
            }
            if let Some(cs) = edge.control_spin {
                if self.spin_of(spin_word, edge.ta) != cs {
                    continue;
                }
            }
            e -= edge.scale;
        }
        e
    }

    /// Ordinals of the connected strings: configurations whose edge energy
    /// attains the global minimum (computed once, cached).
    pub fn connected_ordinals(&self) -> &[usize] {
        self.connected.get_or_init(|| {
            let t = self.n_tracks();
            let mut positions = vec![0u16; t];
            let mut energies = Vec::with_capacity(self.dim);
            let mut min_e = f64::INFINITY;
            for ord in 0..self.dim {
                self.positions_of(ord, &mut positions);
                let e = self.edge_energy(&positions, self.spin_word_of(ord));
                min_e = min_e.min(e);
                energies.push(e);
            }
            energies
                .iter()
                .enumerate()
                .filter(|(_, &e)| e <= min_e + GROUND_TOL)
                .map(|(ord, _)| ord)
                .collect()
        })
    }
}

/// Hermitian sparse matrix in CSR form over a [`StateSpace`] basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    col: Vec<u32>,
    val: Vec<f64>,
}

impl SparseOperator {
    /// Builds from (row, col, value) triplets, coalescing duplicates and
    /// dropping exact zeros.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, f64)>) -> Result<Self> {
        if dim > u32::MAX as usize {
            return Err(Error::TooLarge("dimension exceeds u32 column index".into()));
        }
        for &(r, c, _) in &triplets {
            if r >= dim || c >= dim {
                return Err(Error::invalid("triplet index out of range"));
            }
        }
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        // Coalesce duplicates in place, then drop exact zeros.
        let mut merged: Vec<(usize, u32, f64)> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            match merged.last_mut() {
                Some((lr, lc, lv)) if *lr == r && *lc == c as u32 => *lv += v,
                _ => merged.push((r, c as u32, v)),
            }
        }
        merged.retain(|&(_, _, v)| v != 0.0);
        let mut row_ptr = vec![0usize; dim + 1];
        let mut col = Vec::with_capacity(merged.len());
        let mut val = Vec::with_capacity(merged.len());
        for (r, c, v) in merged {
            row_ptr[r + 1] += 1;
            col.push(c);
            val.push(v);
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(SparseOperator { dim, row_ptr, col, val })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.val.len()
    }

    /// y = H·x (complex vector, real symmetric matrix). Single-threaded by
    /// design so results are bitwise independent of thread count.
    pub fn matvec_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        for r in 0..self.dim {
            let mut acc = Complex64::ZERO;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += x[self.col[k] as usize] * self.val[k];
            }
            y[r] = acc;
        }
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::ZERO; self.dim];
        self.matvec_into(x, &mut y);
        y
    }

    /// Max absolute row sum (operator ∞-norm bound).
    pub fn one_norm(&self) -> f64 {
        (0..self.dim)
            .map(|r| {
                self.row_ptr[r]..self.row_ptr[r + 1]
            })
            .map(|range| range.map(|k| self.val[k].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Diagonal entries.
    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.dim];
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.col[k] as usize == r {
                    d[r] += self.val[k];
                }
            }
        }
        d
    }

    /// Entry (r, c); zero when absent.
    pub fn get(&self, r: usize, c: usize) -> f64 {
        let mut v = 0.0;
        for k in self.row_ptr[r]..self.row_ptr[r + 1] {
            if self.col[k] as usize == c {
                v += self.val[k];
            }
        }
        v
    }

    /// Sum of operators over the same space.
    pub fn add(&self, other: &SparseOperator) -> Result<SparseOperator> {
        if self.dim != other.dim {
            return Err(Error::invalid("operator dimensions differ"));
        }
        let mut triplets = Vec::with_capacity(self.nnz() + other.nnz());
        for op in [self, other] {
            for r in 0..op.dim {
                for k in op.row_ptr[r]..op.row_ptr[r + 1] {
                    triplets.push((r, op.col[k] as usize, op.val[k]));
                }
            }
        }
        SparseOperator::from_triplets(self.dim, triplets)
    }

    /// Largest asymmetry |H[r,c] − H[c,r]|; 0 for exactly Hermitian storage.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.col[k] as usize;
                dev = dev.max((self.val[k] - self.get(c, r)).abs());
            }
        }
        dev
    }

    /// Dense copy for small-dimension oracles.
    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.col[k] as usize)] += self.val[k];
            }
        }
        m
    }

    /// Coordinate-triplet CSV (`row,col,value`) for external cross-checking.
    pub fn to_triplet_csv(&self) -> String {
        let mut out = String::from("row,col,value\r\n");
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                out.push_str(&format!(
                    "{},{},{}\r\n",
                    r,
                    self.col[k],
                    crate::io::format_sig(self.val[k], crate::io::CSV_SIG_DIGITS)
                ));
            }
        }
        out
    }

    /// Iterates stored entries as (row, col, value).
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1])
                .map(move |k| (r, self.col[k] as usize, self.val[k]))
        })
    }

    /// Iterates the stored entries of one row as (col, value).
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (self.col[k] as usize, self.val[k]))
    }
}

/// Builds the diagonal attractive-edge Hamiltonian with strength `delta`.
pub fn build_h_valid(space: &StateSpace, delta: f64) -> Result<SparseOperator> {
    if delta <= 0.0 {
        return Err(Error::invalid("delta must be positive"));
    }
    let t = space.n_tracks();
    let mut positions = vec![0u16; t];
    let mut triplets = Vec::with_capacity(space.dim());
    for ord in 0..space.dim() {
        space.positions_of(ord, &mut positions);
        let e = space.edge_energy(&positions, space.spin_word_of(ord)) * delta;
        if e != 0.0 {
            triplets.push((ord, ord, e));
        }
    }
    SparseOperator::from_triplets(space.dim(), triplets)
}

/// Builds the hopping Hamiltonian with uniform strength `j`, or per-plaquette
/// strengths from a disorder draw (one value per plaquette record, in
/// lattice plaquette order). Matrix elements: hopping from `from` to `to`
/// with mover spin s→s′ contributes −J_p·gate[s′][s]; Hermitian conjugates
/// are added automatically.
pub fn build_v_hop(
    space: &StateSpace,
    j: f64,
    disorder: Option<&[f64]>,
) -> Result<SparseOperator> {
    if let Some(d) = disorder {
        if d.len() != space.hops.len() {
            return Err(Error::invalid(format!(
                "disorder draw has {} values for {} plaquettes",
                d.len(),
                space.hops.len()
            )));
        }
    }
    let t = space.n_tracks();
    let mut triplets = Vec::new();
    for (hop_idx, hop) in space.hops.iter().enumerate() {
        let jp = disorder.map_or(j, |d| d[hop_idx]);
        if space.spin_factored() {
            let g = &hop.gate;
            let is_identity = g[0][0] == 1.0 && g[1][1] == 1.0 && g[0][1] == 0.0 && g[1][0] == 0.0;
            if !is_identity {
                return Err(Error::invalid(
                    "spin-factored basis supports identity gates only",
                ));
            }
        }
        // Enumerate configurations with the mover at hop.p_from.
        let stride = space.pos_strides[hop.track];
        let len = space.track_lens[hop.track] as usize;
        let outer = space.dim() / (len * space.spin_dim);
        for o in 0..outer {
            // Ordinal with mover position 0: expand o over the other tracks.
            let high = o / stride;
            let low = o % stride;
            let base = (high * len * stride + low) * space.spin_dim;
            let from_rank = base + hop.p_from as usize * stride * space.spin_dim;
            let to_rank = base + hop.p_to as usize * stride * space.spin_dim;
            if space.spin_factored() {
                triplets.push((to_rank, from_rank, -jp));
                triplets.push((from_rank, to_rank, -jp));
                continue;
            }
            let mover_bit = 1usize << (t - 1 - hop.track);
            for word in 0..space.spin_dim {
                let s_in = usize::from(word & mover_bit != 0);
                for s_out in 0..2usize {
                    let amp = hop.gate[s_out][s_in];
                    if amp == 0.0 {
                        continue;
                    }
                    let word_out = (word & !mover_bit) | if s_out == 1 { mover_bit } else { 0 };
                    triplets.push((to_rank + word_out, from_rank + word, -jp * amp));
                    triplets.push((from_rank + word, to_rank + word_out, -jp * amp));
                }
            }
        }
    }
    SparseOperator::from_triplets(space.dim(), triplets)
}

/// Builds the diagonal on-site energy operator Σ ω_site·n[site].
pub fn add_onsite(space: &StateSpace, energies: &HashMap<Site, f64>) -> Result<SparseOperator> {
    let mut per_track_pos: Vec<Vec<f64>> = space
        .track_lens
        .iter()
        .map(|&l| vec![0.0; l as usize])
        .collect();
    for (site, w) in energies {
        let (t, p) = space
            .locate(site)
            .ok_or_else(|| Error::invalid(format!("unknown site {site}")))?;
        per_track_pos[t][p as usize] += *w;
    }
    let t = space.n_tracks();
    let mut positions = vec![0u16; t];
    let mut triplets = Vec::new();
    for ord in 0..space.dim() {
        space.positions_of(ord, &mut positions);
        let e: f64 = positions
            .iter()
            .enumerate()
            .map(|(tr, &p)| per_track_pos[tr][p as usize])
            .sum();
        if e != 0.0 {
            triplets.push((ord, ord, e));
        }
    }
    SparseOperator::from_triplets(space.dim(), triplets)
}

/// Effective Hamiltonian after projecting onto the ground space of the
/// diagonal part.
#[derive(Debug, Clone)]
pub struct EffectiveOperator {
    /// The projected operator, re-indexed over `members`, with the constant
    /// ground energy removed from the diagonal.
    pub op: SparseOperator,
    /// Ordinals (in the full space) spanning the ground space, ascending.
    pub members: Vec<usize>,
    /// Ground energy E₀ that was subtracted.
    pub e0: f64,
}

/// Projects `h_full` onto the ground space of its diagonal part (the valid
/// strings) and re-indexes: effective[r,c] = H[m_r, m_c] − E₀·δ_rc. This is
/// the lowest-order effective Hamiltonian for J ≪ Δ.
pub fn project_effective(h_full: &SparseOperator, space: &StateSpace) -> Result<EffectiveOperator> {
    if h_full.dim() != space.dim() {
        return Err(Error::invalid("operator does not match the state space"));
    }
    let diag = h_full.diagonal();
    let e0 = diag.iter().copied().fold(f64::INFINITY, f64::min);
    if !e0.is_finite() {
        return Err(Error::internal("no finite diagonal entries"));
    }
    let tol = GROUND_TOL * (1.0 + e0.abs());
    let members: Vec<usize> = (0..space.dim()).filter(|&i| diag[i] <= e0 + tol).collect();
    if members.is_empty() {
        return Err(Error::internal("ground space identification failed"));
    }
    let mut index_of = HashMap::with_capacity(members.len());
    for (new, &ord) in members.iter().enumerate() {
        index_of.insert(ord, new);
    }
    let mut triplets = Vec::new();
    for (new_r, &ord) in members.iter().enumerate() {
        for (c, v) in h_full.row(ord) {
            if let Some(&new_c) = index_of.get(&c) {
                let v = if new_r == new_c { v - e0 } else { v };
                if v != 0.0 {
                    triplets.push((new_r, new_c, v));
                }
            }
        }
    }
    let op = SparseOperator::from_triplets(members.len(), triplets)?;
    Ok(EffectiveOperator { op, members, e0 })
}

/// What the disorder applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DisorderTarget {
    /// Per-plaquette hopping strengths J_p ~ Normal(mean, sigma).
    Hopping,
    /// Per-site energies ω ~ Normal(mean, sigma).
    OnSite,
}

/// Reproducible Gaussian disorder: run `r` draws from an independent
/// substream of the master seed, so ensembles are identical under any
/// parallel schedule.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DisorderSpec {
    pub target: DisorderTarget,
    pub mean: f64,
    pub sigma: f64,
    pub seed: u64,
    pub runs: u32,
}

impl DisorderSpec {
    fn rng(&self, run: u32) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(run as u64);
        rng
    }

    fn normal(&self) -> Result<Normal<f64>> {
        Normal::new(self.mean, self.sigma)
            .map_err(|e| Error::invalid(format!("bad disorder parameters: {e}")))
    }

    /// Per-plaquette hopping strengths for one run, in lattice plaquette
    /// order.
    pub fn draw_hopping(&self, lattice: &LatticeSpec, run: u32) -> Result<Vec<f64>> {
        if self.target != DisorderTarget::Hopping {
            return Err(Error::invalid("disorder target is not hopping"));
        }
        let normal = self.normal()?;
        let mut rng = self.rng(run);
        Ok((0..lattice.plaquettes.len())
            .map(|_| normal.sample(&mut rng))
            .collect())
    }

    /// Per-site energies for one run, drawn in lattice site order.
    pub fn draw_onsite(&self, lattice: &LatticeSpec, run: u32) -> Result<HashMap<Site, f64>> {
        if self.target != DisorderTarget::OnSite {
            return Err(Error::invalid("disorder target is not on-site"));
        }
        let normal = self.normal()?;
        let mut rng = self.rng(run);
        Ok(lattice
            .sites
            .iter()
            .map(|s| (*s, normal.sample(&mut rng)))
            .collect())
    }
}
