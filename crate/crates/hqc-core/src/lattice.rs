//! Lattice geometries as pure data.
//!
//! Two shapes exist. The rotated N×N lattice hosts one particle per diagonal
//! track d = i−j; attractive standard edges join diagonal neighbor pairs and
//! identity-gate plaquettes advance a particle (i,j) → (i+1,j+1) within its
//! track. The snake lattice hosts one particle per row; vertical plus
//! alternating-diagonal attractive edges force all particles into the same
//! column up to the snake offset, and horizontal plaquettes carry per-edge
//! gates.
//!
//! Gadget regions (CNOT, Toffoli, fast CNOT) replace or augment sites with
//! split-sites (i,j,k), k ∈ {0,1}, reached through spin-selective edges so a
//! control particle's spin routes the target particle. Spin routing is
//! materialized as concrete per-branch edge and plaquette records rather
//! than symbolic maps, so Hamiltonian assembly needs no special cases.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 2×2 real orthogonal gate, row-major: `gate[s_out][s_in]`.
pub type Gate2 = [[f64; 2]; 2];

/// Identity gate.
pub const GATE_I: Gate2 = [[1.0, 0.0], [0.0, 1.0]];

/// Pauli-X gate.
pub const GATE_X: Gate2 = [[0.0, 1.0], [1.0, 0.0]];

/// Orthogonality tolerance for plaquette gates.
pub const GATE_ORTHO_TOL: f64 = 1e-12;

/// Max-entry deviation of UᵀU from the identity.
pub fn gate_orthogonality_deviation(g: &Gate2) -> f64 {
    let mut dev: f64 = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            let dot = g[0][r] * g[0][c] + g[1][r] * g[1][c];
            let expect = if r == c { 1.0 } else { 0.0 };
            dev = dev.max((dot - expect).abs());
        }
    }
    dev
}

fn check_gate(g: &Gate2) -> Result<()> {
    let dev = gate_orthogonality_deviation(g);
    if dev > GATE_ORTHO_TOL {
        return Err(Error::invalid(format!(
            "plaquette gate is not orthogonal: max |UtU - I| = {dev:.3e}"
        )));
    }
    Ok(())
}

/// A lattice site.
///
/// Ordinary sites are (i, j). Gadget split-sites carry `split` = k ∈ {0,1}.
/// Fast-CNOT split-sites additionally set `half_step`, meaning the site sits
/// at column j + 1/2; keeping the half offset as a flag preserves integer
/// coordinates everywhere else.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct Site {
    pub i: i32,
    pub j: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<u8>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub half_step: bool,
}

impl Site {
    /// Ordinary site (i, j).
    pub const fn new(i: i32, j: i32) -> Self {
        Site { i, j, split: None, half_step: false }
    }

    /// Split-site (i, j, k).
    pub const fn split_site(i: i32, j: i32, k: u8) -> Self {
        Site { i, j, split: Some(k), half_step: false }
    }

    /// Fast-CNOT split-site at column j + 1/2.
    pub const fn half_split_site(i: i32, j: i32, k: u8) -> Self {
        Site { i, j, split: Some(k), half_step: true }
    }

    /// Same (i, j, half_step) position, ignoring the split index.
    pub fn same_position(&self, other: &Site) -> bool {
        self.i == other.i && self.j == other.j && self.half_step == other.half_step
    }
}

impl std::fmt::Display for Site {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.split, self.half_step) {
            (None, false) => write!(f, "({},{})", self.i, self.j),
            (Some(k), false) => write!(f, "({},{};{k})", self.i, self.j),
            (Some(k), true) => write!(f, "({},{}+1/2;{k})", self.i, self.j),
            (None, true) => write!(f, "({},{}+1/2)", self.i, self.j),
        }
    }
}

/// Attractive-edge kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeKind {
    /// Satisfied when both endpoints are occupied, any spins.
    Standard,
    /// Satisfied when `a` is occupied by a particle with spin `control_spin`
    /// and `b` (a split-site) is occupied.
    SpinSelective,
}

/// One attractive edge contributing −Δ·strength_scale when satisfied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: Site,
    pub b: Site,
    pub kind: EdgeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control_spin: Option<u8>,
    #[serde(default = "default_scale")]
    pub strength_scale: f64,
}

fn default_scale() -> f64 {
    1.0
}

impl Edge {
    pub fn standard(a: Site, b: Site) -> Self {
        Edge { a, b, kind: EdgeKind::Standard, control_spin: None, strength_scale: 1.0 }
    }

    /// Spin-selective edge: `a` is the conditioning (control-track) site,
    /// `b` the split-site.
    pub fn spin_selective(a: Site, b: Site, control_spin: u8) -> Self {
        Edge {
            a,
            b,
            kind: EdgeKind::SpinSelective,
            control_spin: Some(control_spin),
            strength_scale: 1.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.a == self.b {
            return Err(Error::invalid(format!("edge endpoints coincide: {}", self.a)));
        }
        if self.strength_scale <= 0.0 {
            return Err(Error::invalid("edge strength_scale must be > 0"));
        }
        match self.kind {
            EdgeKind::Standard => {
                if self.control_spin.is_some() {
                    return Err(Error::invalid("standard edge must not carry control_spin"));
                }
            }
            EdgeKind::SpinSelective => {
                let s = self
                    .control_spin
                    .ok_or_else(|| Error::invalid("spin-selective edge needs control_spin"))?;
                if s > 1 {
                    return Err(Error::invalid("control_spin must be 0 or 1"));
                }
            }
        }
        Ok(())
    }
}

/// One directed hopping record `from` → `to` applying `gate` to the mover's
/// spin. The Hermitian conjugate (backward hop with the transposed gate) is
/// implied; builders emit each geometric hop exactly once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plaquette {
    pub from: Site,
    pub to: Site,
    pub gate: Gate2,
}

impl Plaquette {
    pub fn new(from: Site, to: Site, gate: Gate2) -> Result<Self> {
        check_gate(&gate)?;
        if from == to {
            return Err(Error::invalid("plaquette endpoints coincide"));
        }
        Ok(Plaquette { from, to, gate })
    }
}

/// Lattice shape tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Shape {
    Rotated { n: u32 },
    Snake { n: u32, m: u32 },
}

/// Kind of an inserted gadget region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GadgetKind {
    Cnot,
    Toffoli,
    FastCnot,
}

/// Descriptor of one inserted gadget: its anchor and every site whose edges
/// or hops the insertion touched (used for overlap detection).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GadgetRegion {
    pub kind: GadgetKind,
    pub anchor: Site,
    pub sites: Vec<Site>,
}

/// One track: the set of sites a single particle may occupy, ordered along
/// the direction of motion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Track {
    /// Track key: d = i−j for rotated lattices, row i for snake lattices.
    pub key: i32,
    pub sites: Vec<Site>,
}

/// Complete lattice geometry. Immutable after construction; gadget insertion
/// returns a new spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub shape: Shape,
    pub sites: Vec<Site>,
    pub edges: Vec<Edge>,
    pub plaquettes: Vec<Plaquette>,
    pub tracks: Vec<Track>,
    pub gadget_regions: Vec<GadgetRegion>,
    /// Set when the lattice was cut down to a subset of tracks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restricted_tracks: Option<Vec<i32>>,
}

impl LatticeSpec {
    /// Track key of a site under this lattice's shape.
    pub fn track_key(&self, s: &Site) -> i32 {
        match self.shape {
            Shape::Rotated { .. } => s.i - s.j,
            Shape::Snake { .. } => s.i,
        }
    }

    pub fn has_site(&self, s: &Site) -> bool {
        self.sites.contains(s)
    }

    /// Index into `tracks` for a key, if present.
    pub fn track_index(&self, key: i32) -> Option<usize> {
        self.tracks.iter().position(|t| t.key == key)
    }

    /// Serializes to a JSON document (schema in docs/lattice-schema.md).
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("lattice specs serialize")
    }

    /// Parses a JSON document and validates the result.
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: LatticeSpec = serde_json::from_str(text)
            .map_err(|e| Error::invalid(format!("lattice JSON parse error: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Structural validation: site uniqueness, edge/plaquette endpoints
    /// present, gates orthogonal, tracks partition the sites.
    pub fn validate(&self) -> Result<()> {
        let site_set: BTreeSet<&Site> = self.sites.iter().collect();
        if site_set.len() != self.sites.len() {
            return Err(Error::invalid("duplicate sites in lattice"));
        }
        for e in &self.edges {
            e.validate()?;
            for s in [&e.a, &e.b] {
                if !site_set.contains(s) {
                    return Err(Error::invalid(format!("edge endpoint {s} not a lattice site")));
                }
            }
        }
        let mut tracked = 0usize;
        for t in &self.tracks {
            for s in &t.sites {
                if !site_set.contains(s) {
                    return Err(Error::invalid(format!("track site {s} not a lattice site")));
                }
                if self.track_key(s) != t.key {
                    return Err(Error::invalid(format!(
                        "site {s} stored under track {} but keys to {}",
                        t.key,
                        self.track_key(s)
                    )));
                }
            }
            tracked += t.sites.len();
        }
        if tracked != self.sites.len() {
            return Err(Error::invalid("tracks do not partition the sites"));
        }
        for p in &self.plaquettes {
            check_gate(&p.gate)?;
            for s in [&p.from, &p.to] {
                if !site_set.contains(s) {
                    return Err(Error::invalid(format!(
                        "plaquette endpoint {s} not a lattice site"
                    )));
                }
            }
            if self.track_key(&p.from) != self.track_key(&p.to) {
                return Err(Error::invalid(format!(
                    "plaquette {} -> {} crosses tracks",
                    p.from, p.to
                )));
            }
        }
        Ok(())
    }

    fn remove_site(&mut self, s: &Site) {
        self.sites.retain(|x| x != s);
        self.edges.retain(|e| e.a != *s && e.b != *s);
        self.plaquettes.retain(|p| p.from != *s && p.to != *s);
        for t in &mut self.tracks {
            t.sites.retain(|x| x != s);
        }
    }

    /// Inserts `new` into its track keeping in-track ordering (derived Ord on
    /// Site orders by i, then j, then split, then half_step, which matches
    /// the direction of motion on both shapes).
    fn add_site(&mut self, new: Site) -> Result<()> {
        if self.has_site(&new) {
            return Err(Error::conflict(format!("site {new} already present")));
        }
        let key = self.track_key(&new);
        let idx = self
            .track_index(key)
            .ok_or_else(|| Error::conflict(format!("no track {key} for site {new}")))?;
        self.sites.push(new);
        self.sites.sort();
        let track = &mut self.tracks[idx];
        track.sites.push(new);
        track.sites.sort();
        Ok(())
    }

    fn check_region_overlap(&self, sites: &[Site]) -> Result<()> {
        for region in &self.gadget_regions {
            for s in sites {
                if region.sites.iter().any(|r| r.same_position(s)) {
                    return Err(Error::conflict(format!(
                        "gadget region would overlap existing {:?} region at {}",
                        region.kind, region.anchor
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Builds the full rotated N×N lattice: standard edges on all diagonal
/// neighbor pairs, identity gates on all (N−1)² plaquettes, 2N−1 tracks.
pub fn build_rotated(n: u32) -> Result<LatticeSpec> {
    if n < 2 {
        return Err(Error::invalid("rotated lattice needs N >= 2"));
    }
    let n = n as i32;
    let mut sites = Vec::new();
    let mut edges = Vec::new();
    let mut plaquettes = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            sites.push(Site::new(i, j));
            if i < n {
                edges.push(Edge::standard(Site::new(i, j), Site::new(i + 1, j)));
            }
            if j < n {
                edges.push(Edge::standard(Site::new(i, j), Site::new(i, j + 1)));
            }
            if i < n && j < n {
                plaquettes.push(
                    Plaquette::new(Site::new(i, j), Site::new(i + 1, j + 1), GATE_I)
                        .expect("identity gate is orthogonal"),
                );
            }
        }
    }
    let mut tracks = Vec::new();
    for d in -(n - 1)..=(n - 1) {
        let mut ts: Vec<Site> = sites.iter().copied().filter(|s| s.i - s.j == d).collect();
        ts.sort();
        tracks.push(Track { key: d, sites: ts });
    }
    let spec = LatticeSpec {
        shape: Shape::Rotated { n: n as u32 },
        sites,
        edges,
        plaquettes,
        tracks,
        gadget_regions: Vec::new(),
        restricted_tracks: None,
    };
    debug_assert!(spec.validate().is_ok());
    Ok(spec)
}

/// Builds the snake lattice: N horizontal tracks of M sites, vertical
/// attractive edges in every column, diagonal attractive edges alternating
/// with column parity (odd columns connect (i+1,j)–(i,j+1), even columns
/// (i,j)–(i+1,j+1)), and horizontal hopping plaquettes with identity gates.
pub fn build_snake(n: u32, m: u32) -> Result<LatticeSpec> {
    if n < 1 || m < 2 {
        return Err(Error::invalid("snake lattice needs N >= 1 and M >= 2"));
    }
    let (n, m) = (n as i32, m as i32);
    let mut sites = Vec::new();
    let mut edges = Vec::new();
    let mut plaquettes = Vec::new();
    for i in 1..=n {
        for j in 1..=m {
            sites.push(Site::new(i, j));
            if j < m {
                plaquettes.push(
                    Plaquette::new(Site::new(i, j), Site::new(i, j + 1), GATE_I)
                        .expect("identity gate is orthogonal"),
                );
            }
        }
    }
    for j in 1..=m {
        for i in 1..n {
            edges.push(Edge::standard(Site::new(i, j), Site::new(i + 1, j)));
        }
        if j < m {
            for i in 1..n {
                if j % 2 == 1 {
                    edges.push(Edge::standard(Site::new(i + 1, j), Site::new(i, j + 1)));
                } else {
                    edges.push(Edge::standard(Site::new(i, j), Site::new(i + 1, j + 1)));
                }
            }
        }
    }
    let mut tracks = Vec::new();
    for i in 1..=n {
        let mut ts: Vec<Site> = sites.iter().copied().filter(|s| s.i == i).collect();
        ts.sort();
        tracks.push(Track { key: i, sites: ts });
    }
    let spec = LatticeSpec {
        shape: Shape::Snake { n: n as u32, m: m as u32 },
        sites,
        edges,
        plaquettes,
        tracks,
        gadget_regions: Vec::new(),
        restricted_tracks: None,
    };
    debug_assert!(spec.validate().is_ok());
    Ok(spec)
}

/// Replaces the gates of snake hopping plaquettes. Keys are (track row i,
/// source column j) for the hop (i,j) → (i,j+1); unlisted hops keep their
/// current gate.
pub fn with_snake_gates(
    spec: &LatticeSpec,
    gates: &std::collections::HashMap<(u32, u32), Gate2>,
) -> Result<LatticeSpec> {
    let Shape::Snake { n, m } = spec.shape else {
        return Err(Error::invalid("gate assignment applies to snake lattices"));
    };
    let mut out = spec.clone();
    for (&(i, j), gate) in gates {
        check_gate(gate)?;
        if i < 1 || i > n || j < 1 || j >= m {
            return Err(Error::invalid(format!(
                "gate key ({i},{j}) outside snake hop range"
            )));
        }
        let from = Site::new(i as i32, j as i32);
        let to = Site::new(i as i32, j as i32 + 1);
        let hop = out
            .plaquettes
            .iter_mut()
            .find(|p| p.from == from && p.to == to)
            .ok_or_else(|| Error::invalid(format!("no hop {from} -> {to}")))?;
        hop.gate = *gate;
    }
    Ok(out)
}

/// Restricts a lattice to the tracks whose keys are listed, dropping all
/// other sites and every edge/plaquette touching them. Used to build the
/// minimal gadget test lattices (for example the spectator-removed 2-track
/// CNOT lattice).
pub fn restrict_tracks(spec: &LatticeSpec, keep: &[i32]) -> Result<LatticeSpec> {
    if keep.is_empty() {
        return Err(Error::invalid("track restriction must keep at least one track"));
    }
    for k in keep {
        if spec.track_index(*k).is_none() {
            return Err(Error::invalid(format!("no track with key {k}")));
        }
    }
    let keep_set: BTreeSet<i32> = keep.iter().copied().collect();
    let mut out = spec.clone();
    out.tracks.retain(|t| keep_set.contains(&t.key));
    out.sites.retain(|s| keep_set.contains(&spec.track_key(s)));
    let site_set: BTreeSet<Site> = out.sites.iter().copied().collect();
    out.edges.retain(|e| site_set.contains(&e.a) && site_set.contains(&e.b));
    out.plaquettes
        .retain(|p| site_set.contains(&p.from) && site_set.contains(&p.to));
    out.gadget_regions
        .retain(|g| g.sites.iter().any(|s| site_set.contains(s)));
    out.restricted_tracks = Some(keep_set.into_iter().collect());
    out.validate()?;
    Ok(out)
}

/// Inserts a CNOT gadget at `anchor` on a rotated lattice.
///
/// The anchor site (i,j) on the target track is replaced by split-sites
/// (i,j,0) and (i,j,1). The two control-track neighbors (i,j−1) and (i+1,j)
/// connect to each split k through spin-selective edges requiring control
/// spin k; the spectator-track neighbors (i−1,j) and (i,j+1), when present,
/// connect to both splits through standard edges. The entry hop applies X on
/// the k=1 branch and I on the k=0 branch; both exit hops apply I.
///
/// Preconditions: the in-track predecessor (i−1,j−1), successor (i+1,j+1),
/// and both control-track neighbors must exist; missing ones (anchor on a
/// lattice boundary) are a conflict. Spectator neighbors are optional so the
/// spectator-removed test lattice stays constructible.
pub fn insert_cnot_region(spec: &LatticeSpec, anchor: Site) -> Result<LatticeSpec> {
    let Shape::Rotated { .. } = spec.shape else {
        return Err(Error::invalid("CNOT gadget applies to rotated lattices"));
    };
    if anchor.split.is_some() || anchor.half_step {
        return Err(Error::invalid("anchor must be an ordinary site"));
    }
    if !spec.has_site(&anchor) {
        return Err(Error::NotFound(format!("anchor {anchor} is not a lattice site")));
    }
    let (i, j) = (anchor.i, anchor.j);
    let pred = Site::new(i - 1, j - 1);
    let succ = Site::new(i + 1, j + 1);
    let ctrl = [Site::new(i, j - 1), Site::new(i + 1, j)];
    let spect = [Site::new(i - 1, j), Site::new(i, j + 1)];
    for s in [pred, succ, ctrl[0], ctrl[1]] {
        if !spec.has_site(&s) {
            return Err(Error::conflict(format!(
                "CNOT anchor {anchor} needs neighbor {s} inside the lattice"
            )));
        }
    }
    let splits = [Site::split_site(i, j, 0), Site::split_site(i, j, 1)];
    let mut region_sites = vec![anchor, pred, succ, ctrl[0], ctrl[1]];
    region_sites.extend(spect.iter().copied().filter(|s| spec.has_site(s)));
    spec.check_region_overlap(&region_sites)?;
    let mut region_record = region_sites.clone();
    region_record.extend_from_slice(&splits);

    let mut out = spec.clone();
    out.remove_site(&anchor);
    for s in splits {
        out.add_site(s)?;
    }
    for split in splits {
        let k = split.split.expect("split-site");
        for c in ctrl {
            out.edges.push(Edge::spin_selective(c, split, k));
        }
        for sp in spect.iter().filter(|s| spec.has_site(s)) {
            out.edges.push(Edge::standard(*sp, split));
        }
        // Exit hop: identity on both branches.
        out.plaquettes
            .push(Plaquette::new(split, succ, GATE_I).expect("identity gate"));
    }
    // Entry hops: routed by split index, X on the k=1 branch.
    out.plaquettes
        .push(Plaquette::new(pred, splits[0], GATE_I).expect("identity gate"));
    out.plaquettes
        .push(Plaquette::new(pred, splits[1], GATE_X).expect("X gate"));
    out.gadget_regions.push(GadgetRegion {
        kind: GadgetKind::Cnot,
        anchor,
        sites: region_record,
    });
    out.validate()?;
    Ok(out)
}

/// Inserts a Toffoli gadget anchored at `anchor` = first split position (i,j)
/// on a rotated lattice; the second split pair sits at (i+1,j+1).
///
/// Control track 1 (key d+1) conditions the first splits through
/// spin-selective edges at (i,j−1) and (i+1,j); control track 2 (key d−1)
/// conditions the second splits at (i,j+1) and (i+1,j+2). The crossed
/// neighbors connect through standard edges, so each control interacts with
/// exactly one split pair. The middle hop carries X only on the
/// k=1 → k′=1 branch; all other hops are identities, including the diagonal
/// (k=0) → (k′=1) record whose necessity `gadgets::check_backward_necessity`
/// demonstrates.
pub fn insert_toffoli_region(spec: &LatticeSpec, anchor: Site) -> Result<LatticeSpec> {
    let Shape::Rotated { .. } = spec.shape else {
        return Err(Error::invalid("Toffoli gadget applies to rotated lattices"));
    };
    if anchor.split.is_some() || anchor.half_step {
        return Err(Error::invalid("anchor must be an ordinary site"));
    }
    if !spec.has_site(&anchor) {
        return Err(Error::NotFound(format!("anchor {anchor} is not a lattice site")));
    }
    let (i, j) = (anchor.i, anchor.j);
    let second = Site::new(i + 1, j + 1);
    let pred = Site::new(i - 1, j - 1);
    let succ = Site::new(i + 2, j + 2);
    // Control track 1 (above, d+1) and control track 2 (below, d−1).
    let c1 = [Site::new(i, j - 1), Site::new(i + 1, j), Site::new(i + 2, j + 1)];
    let c2 = [Site::new(i - 1, j), Site::new(i, j + 1), Site::new(i + 1, j + 2)];
    for s in [anchor, second, pred, succ, c1[0], c1[1], c1[2], c2[0], c2[1], c2[2]] {
        if !spec.has_site(&s) {
            return Err(Error::conflict(format!(
                "Toffoli anchor {anchor} needs site {s} inside the lattice"
            )));
        }
    }
    let s1 = [Site::split_site(i, j, 0), Site::split_site(i, j, 1)];
    let s2 = [Site::split_site(i + 1, j + 1, 0), Site::split_site(i + 1, j + 1, 1)];
    let region_sites = vec![
        anchor, second, pred, succ, c1[0], c1[1], c1[2], c2[0], c2[1], c2[2],
    ];
    spec.check_region_overlap(&region_sites)?;
    let mut region_record = region_sites.clone();
    region_record.extend_from_slice(&s1);
    region_record.extend_from_slice(&s2);

    let mut out = spec.clone();
    out.remove_site(&anchor);
    out.remove_site(&second);
    for s in s1.iter().chain(s2.iter()) {
        out.add_site(*s)?;
    }
    for k in 0..2usize {
        // First splits: spin-selective from control track 1, standard from
        // control track 2.
        out.edges.push(Edge::spin_selective(c1[0], s1[k], k as u8));
        out.edges.push(Edge::spin_selective(c1[1], s1[k], k as u8));
        out.edges.push(Edge::standard(c2[0], s1[k]));
        out.edges.push(Edge::standard(c2[1], s1[k]));
        // Second splits: spin-selective from control track 2, standard from
        // control track 1.
        out.edges.push(Edge::spin_selective(c2[1], s2[k], k as u8));
        out.edges.push(Edge::spin_selective(c2[2], s2[k], k as u8));
        out.edges.push(Edge::standard(c1[1], s2[k]));
        out.edges.push(Edge::standard(c1[2], s2[k]));
    }
    for k in 0..2usize {
        out.plaquettes
            .push(Plaquette::new(pred, s1[k], GATE_I).expect("identity gate"));
        for kp in 0..2usize {
            let gate = if k == 1 && kp == 1 { GATE_X } else { GATE_I };
            out.plaquettes
                .push(Plaquette::new(s1[k], s2[kp], gate).expect("orthogonal gate"));
        }
        out.plaquettes
            .push(Plaquette::new(s2[k], succ, GATE_I).expect("identity gate"));
    }
    out.gadget_regions.push(GadgetRegion {
        kind: GadgetKind::Toffoli,
        anchor,
        sites: region_record,
    });
    out.validate()?;
    Ok(out)
}

/// Inserts a fast-CNOT gadget on a snake lattice.
///
/// `target` = (i,j) names the target-track hop (i,j) → (i,j+1) to intercept;
/// `control_above` picks the control track i−1 (true) or i+1 (false). A
/// split pair at column j+1/2 replaces the direct hop: (i,j) → split_k
/// applies X^k, split_k → (i,j+1) applies I. Each split k attracts the
/// control site at column j+1 through a spin-selective edge (control spin k)
/// and, when a track beyond the control exists on the opposite side, the
/// opposite-track site at column j through a standard edge, so split
/// occupancy keeps the string energy at the ground value.
///
/// Snake execution order fixes a parity constraint: odd columns execute top
/// to bottom, so a control above the target has already advanced to column
/// j+1 when the target moves only if j is odd; a control below requires j
/// even. Violations are conflicts.
pub fn insert_fast_cnot_region(
    spec: &LatticeSpec,
    target: Site,
    control_above: bool,
) -> Result<LatticeSpec> {
    let Shape::Snake { n, m } = spec.shape else {
        return Err(Error::invalid("fast CNOT applies to snake lattices"));
    };
    if target.split.is_some() || target.half_step {
        return Err(Error::invalid("target must be an ordinary site"));
    }
    let (i, j) = (target.i, target.j);
    if i < 1 || i > n as i32 || j < 1 || j >= m as i32 {
        return Err(Error::conflict(format!("target hop {target} outside the lattice")));
    }
    let ic = if control_above { i - 1 } else { i + 1 };
    if ic < 1 || ic > n as i32 {
        return Err(Error::conflict(format!(
            "control track {ic} outside the lattice"
        )));
    }
    if control_above != (j % 2 == 1) {
        return Err(Error::conflict(format!(
            "fast CNOT at column {j} needs the control {} the target \
             (snake execution order: control must move first)",
            if j % 2 == 1 { "above" } else { "below" }
        )));
    }
    let next = Site::new(i, j + 1);
    let control = Site::new(ic, j + 1);
    // Opposite-side neighbor track (mirror of the control), if any.
    let io = 2 * i - ic;
    let opposite = (io >= 1 && io <= n as i32).then(|| Site::new(io, j));
    let splits = [Site::half_split_site(i, j, 0), Site::half_split_site(i, j, 1)];
    let mut region_sites = vec![target, next, control];
    region_sites.extend(opposite);
    spec.check_region_overlap(&region_sites)?;
    let mut region_record = region_sites.clone();
    region_record.extend_from_slice(&splits);

    let mut out = spec.clone();
    // The intercepted direct hop is replaced by the two-stage routed hops.
    let before = out.plaquettes.len();
    out.plaquettes.retain(|p| !(p.from == target && p.to == next));
    if out.plaquettes.len() != before - 1 {
        return Err(Error::internal("expected exactly one direct hop to replace"));
    }
    for s in splits {
        out.add_site(s)?;
    }
    for (k, split) in splits.iter().enumerate() {
        out.edges.push(Edge::spin_selective(control, *split, k as u8));
        if let Some(op) = opposite {
            out.edges.push(Edge::standard(op, *split));
        }
        let entry_gate = if k == 1 { GATE_X } else { GATE_I };
        out.plaquettes
            .push(Plaquette::new(target, *split, entry_gate).expect("orthogonal gate"));
        out.plaquettes
            .push(Plaquette::new(*split, next, GATE_I).expect("identity gate"));
    }
    out.gadget_regions.push(GadgetRegion {
        kind: GadgetKind::FastCnot,
        anchor: target,
        sites: region_record,
    });
    out.validate()?;
    Ok(out)
}
