//! Shared reference constructions for integration tests.
//!
//! The three-track controlled-controlled-NOT test Hamiltonian is rebuilt
//! here from explicit adjacency tables, fully independent of the lattice
//! compiler, so the two constructions can be compared entry for entry.

/// Target-track position labels.
pub const T0: usize = 0;
pub const S10: usize = 1;
pub const S11: usize = 2;
pub const S20: usize = 3;
pub const S21: usize = 4;
pub const T3: usize = 5;

pub const N_C1: usize = 3;
pub const N_T: usize = 6;
pub const N_C2: usize = 3;
pub const TOFFOLI_DIM: usize = N_C1 * N_T * N_C2 * 8;

/// Index packing (c1, t, c2, s1, s, s2): position-major, spins s1 s s2 from
/// most to least significant bit.
pub fn toffoli_idx(c1: usize, t: usize, c2: usize, s1: usize, s: usize, s2: usize) -> usize {
    (((c1 * N_T + t) * N_C2 + c2) * 8) + (s1 * 4 + s * 2 + s2)
}

#[derive(Clone, Copy, PartialEq)]
enum EdgeKind {
    Std,
    Sel(usize),
}

/// First-control-to-target attractive edges as (c1 position, target
/// position, kind). Selective edges require the first control's spin to
/// match the split index.
const C1_T: &[(usize, usize, EdgeKind)] = &[
    (0, T0, EdgeKind::Std),
    (0, S10, EdgeKind::Sel(0)),
    (0, S11, EdgeKind::Sel(1)),
    (1, S10, EdgeKind::Sel(0)),
    (1, S11, EdgeKind::Sel(1)),
    (1, S20, EdgeKind::Std),
    (1, S21, EdgeKind::Std),
    (2, S20, EdgeKind::Std),
    (2, S21, EdgeKind::Std),
    (2, T3, EdgeKind::Std),
];

/// Target-to-second-control edges; selective ones condition on the second
/// control's spin.
const T_C2: &[(usize, usize, EdgeKind)] = &[
    (T0, 0, EdgeKind::Std),
    (S10, 0, EdgeKind::Std),
    (S11, 0, EdgeKind::Std),
    (S10, 1, EdgeKind::Std),
    (S11, 1, EdgeKind::Std),
    (S20, 1, EdgeKind::Sel(0)),
    (S21, 1, EdgeKind::Sel(1)),
    (S20, 2, EdgeKind::Sel(0)),
    (S21, 2, EdgeKind::Sel(1)),
    (T3, 2, EdgeKind::Std),
];

/// Target hops as (from, to, flips target spin).
pub const HOPS_T: &[(usize, usize, bool)] = &[
    (T0, S10, false),
    (T0, S11, false),
    (S10, S20, false),
    (S11, S20, false),
    (S10, S21, false),
    (S11, S21, true),
    (S20, T3, false),
    (S21, T3, false),
];

fn edge_energy(c1: usize, t: usize, c2: usize, s1: usize, s2: usize, delta: f64) -> f64 {
    let mut e = 0.0;
    for &(pc1, pt, kind) in C1_T {
        let sat = match kind {
            EdgeKind::Std => true,
            EdgeKind::Sel(sp) => s1 == sp,
        };
        if c1 == pc1 && t == pt && sat {
            e -= delta;
        }
    }
    for &(pt, pc2, kind) in T_C2 {
        let sat = match kind {
            EdgeKind::Std => true,
            EdgeKind::Sel(sp) => s2 == sp,
        };
        if t == pt && c2 == pc2 && sat {
            e -= delta;
        }
    }
    e
}

/// Dense reference Hamiltonian. `drop` removes one directed target hop
/// (given as (from, to)) from the table before building.
pub fn toffoli_hand_built(j: f64, delta: f64, drop: Option<(usize, usize)>) -> Vec<Vec<f64>> {
    let mut h = vec![vec![0.0f64; TOFFOLI_DIM]; TOFFOLI_DIM];
    for c1 in 0..N_C1 {
        for t in 0..N_T {
            for c2 in 0..N_C2 {
                for sp in 0..8 {
                    let (s1, s, s2) = (sp >> 2 & 1, sp >> 1 & 1, sp & 1);
                    let i = toffoli_idx(c1, t, c2, s1, s, s2);
                    h[i][i] = edge_energy(c1, t, c2, s1, s2, delta);
                }
            }
        }
    }
    let add_hop = |h: &mut Vec<Vec<f64>>, a: usize, b: usize| {
        h[a][b] -= j;
        h[b][a] -= j;
    };
    for (a, b) in [(0, 1), (1, 2)] {
        for t in 0..N_T {
            for c2 in 0..N_C2 {
                for sp in 0..8 {
                    let (s1, s, s2) = (sp >> 2 & 1, sp >> 1 & 1, sp & 1);
                    add_hop(&mut h, toffoli_idx(b, t, c2, s1, s, s2), toffoli_idx(a, t, c2, s1, s, s2));
                }
            }
        }
    }
    for (a, b) in [(0, 1), (1, 2)] {
        for c1 in 0..N_C1 {
            for t in 0..N_T {
                for sp in 0..8 {
                    let (s1, s, s2) = (sp >> 2 & 1, sp >> 1 & 1, sp & 1);
                    add_hop(&mut h, toffoli_idx(c1, t, b, s1, s, s2), toffoli_idx(c1, t, a, s1, s, s2));
                }
            }
        }
    }
    for &(a, b, flips) in HOPS_T {
        if drop == Some((a, b)) {
            continue;
        }
        for c1 in 0..N_C1 {
            for c2 in 0..N_C2 {
                for sp in 0..8 {
                    let (s1, s, s2) = (sp >> 2 & 1, sp >> 1 & 1, sp & 1);
                    let s_out = if flips { s ^ 1 } else { s };
                    add_hop(&mut h, toffoli_idx(c1, b, c2, s1, s_out, s2), toffoli_idx(c1, a, c2, s1, s, s2));
                }
            }
        }
    }
    h
}

/// Ground-subspace projection of a dense matrix: indices whose diagonal sits
/// at the minimum (within 1e-9), and the shifted block H − E0·I.
pub fn project_ground(h: &[Vec<f64>]) -> (Vec<usize>, Vec<Vec<f64>>) {
    let e0 = h
        .iter()
        .enumerate()
        .map(|(k, row)| row[k])
        .fold(f64::INFINITY, f64::min);
    let valid: Vec<usize> = (0..h.len()).filter(|&k| (h[k][k] - e0).abs() < 1e-9).collect();
    let block: Vec<Vec<f64>> = valid
        .iter()
        .map(|&r| {
            valid
                .iter()
                .map(|&c| h[r][c] - if r == c { e0 } else { 0.0 })
                .collect()
        })
        .collect();
    (valid, block)
}

/// Maps every ordinal of the compiled three-track space to the reference
/// index packing (position-major (c1, t, c2), spins s1 s s2). Track order in
/// the compiled space ascends by key: c2 (d = −1), target (d = 0), c1
/// (d = 1).
pub fn ordinal_to_reference() -> std::collections::HashMap<usize, usize> {
    let lat = hqc_core::gadgets::toffoli_test_lattice().unwrap();
    let space = hqc_core::hamiltonian::enumerate_basis(&lat, false).unwrap();
    assert_eq!(space.dim(), TOFFOLI_DIM);
    let mut map = std::collections::HashMap::with_capacity(TOFFOLI_DIM);
    for c1 in 0..N_C1 {
        for t in 0..N_T {
            for c2 in 0..N_C2 {
                for sp in 0..8usize {
                    let (s1, s, s2) = (sp >> 2 & 1, sp >> 1 & 1, sp & 1);
                    let ord = space
                        .ordinal_of(
                            &[c2 as u16, t as u16, c1 as u16],
                            Some(&[s2 as u8, s as u8, s1 as u8]),
                        )
                        .unwrap();
                    map.insert(ord, toffoli_idx(c1, t, c2, s1, s, s2));
                }
            }
        }
    }
    assert_eq!(map.len(), TOFFOLI_DIM);
    map
}
