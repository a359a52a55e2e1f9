#![allow(dead_code)]

use phasepoly::verify::ssa_form;
use phasepoly::{Angle, Circuit, Gate, PhaseBlock};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::collections::{HashMap, VecDeque};

pub const SMALL_BLOCK: &str = "OPENQASM 2.0;
include \"qelib1.inc\";
qreg q[3];
rz(pi/4) q[0];
cx q[1],q[0];
rz(pi/2) q[0];
cx q[1],q[2];
rz(pi/4) q[2];
cx q[1],q[0];
rz(-pi/4) q[0];
cx q[0],q[2];
cx q[2],q[1];
";

/// Blocks 1 and 3 both hold `q0⊕q2` and `q0⊕q2⊕q3`; block 2 holds `q1⊕q3`.
pub const SHARED_BLOCKS: &str = "qreg q[4];
cx q[0],q[2]; rz(pi/4) q[2]; cx q[2],q[3]; rz(pi/4) q[3]; cx q[2],q[3]; cx q[0],q[2];
h q[3];
cx q[1],q[3]; rz(pi/4) q[3]; cx q[1],q[3];
h q[3];
cx q[3],q[2]; cx q[0],q[2]; rz(pi/4) q[2]; cx q[3],q[2]; rz(pi/4) q[2]; cx q[0],q[2];
";

pub const TOFFOLI: &str = "qreg q[3]; ccx q[0],q[1],q[2];";

/// Parity `q0⊕q1⊕q2` computed through a CNOT between the line's ends.
pub const NONADJ_PARITY: &str = "qreg q[4]; cx q[1],q[2]; cx q[0],q[2]; rz(pi/4) q[2]; cx q[0],q[2]; cx q[1],q[2];";

pub fn pi4(k: i64) -> Angle {
    Angle::pi_frac(k, 4)
}

/// Random circuit over cx, rz, h and x with `n` qubits and `len` gates.
pub fn random_circuit(rng: &mut StdRng, n: usize, len: usize) -> Circuit {
    let mut gates = Vec::with_capacity(len);
    for _ in 0..len {
        let q = rng.gen_range(0..n);
        let g = match rng.gen_range(0..10) {
            0..=3 => {
                let mut t = rng.gen_range(0..n - 1);
                if t >= q {
                    t += 1;
                }
                Gate::cnot(q, t)
            }
            4..=6 => Gate::rz(q, pi4(rng.gen_range(1..8))),
            7 => Gate::H(q),
            8 => Gate::X(q),
            _ => Gate::rz(q, Angle::from_radians(rng.gen_range(0.1..3.0))),
        };
        gates.push(g);
    }
    Circuit::with_gates(n, gates)
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Whether `gates` realise `block` exactly: same phase terms, same values at
/// every barrier, same outputs.
pub fn block_matches(block: &PhaseBlock, gates: &[Gate], wires: usize) -> bool {
    let labels: Vec<usize> = (0..wires).collect();
    let mut src = Vec::new();
    for (s, stage) in block.stages.iter().enumerate() {
        src.extend(stage.iter().cloned());
        if let Some(b) = block.boundaries.get(s) {
            src.extend(b.gates.iter().cloned());
        }
    }
    ssa_form(&src, &labels, false).eq_up_to_phase(&ssa_form(gates, &labels, false))
}

/// Circuit holding one phase term per parity, each computed onto the
/// parity's highest qubit with a CNOT ladder and uncomputed again.
pub fn term_circuit(n: usize, terms: &[(u32, Angle)]) -> Circuit {
    let mut gates = Vec::new();
    for &(mask, a) in terms {
        let top = 31 - mask.leading_zeros() as usize;
        let others: Vec<usize> = (0..top).filter(|&q| mask >> q & 1 == 1).collect();
        for &q in &others {
            gates.push(Gate::cnot(q, top));
        }
        gates.push(Gate::rz(top, a));
        for &q in others.iter().rev() {
            gates.push(Gate::cnot(q, top));
        }
    }
    Circuit::with_gates(n, gates)
}

/// Fewest CNOTs realising every parity in `terms` (bit masks over `n`
/// qubits) and returning to the identity map, by breadth-first search over
/// (wire contents, terms already exposed).
pub fn bfs_min_cnots(n: usize, terms: &[u32]) -> usize {
    bfs_min_cnots_on(n, terms, &all_pairs(n))
}

pub fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for c in 0..n {
        for t in 0..n {
            if c != t {
                v.push((c, t));
            }
        }
    }
    v
}

/// As [`bfs_min_cnots`], with CNOTs restricted to `moves`.
pub fn bfs_min_cnots_on(n: usize, terms: &[u32], moves: &[(usize, usize)]) -> usize {
    let exposed = |rows: &[u32], done: u32| -> u32 {
        let mut d = done;
        for (i, t) in terms.iter().enumerate() {
            if rows.contains(t) {
                d |= 1 << i;
            }
        }
        d
    };
    let start: Vec<u32> = (0..n).map(|q| 1u32 << q).collect();
    let full = (1u32 << terms.len()) - 1;
    let d0 = exposed(&start, 0);
    let mut seen: HashMap<(Vec<u32>, u32), usize> = HashMap::new();
    let mut queue = VecDeque::new();
    seen.insert((start.clone(), d0), 0);
    queue.push_back((start.clone(), d0));
    while let Some((rows, done)) = queue.pop_front() {
        let dist = seen[&(rows.clone(), done)];
        if done == full && rows == start {
            return dist;
        }
        for &(c, t) in moves {
            let mut r = rows.clone();
            r[t] ^= r[c];
            let d = exposed(&r, done);
            if let std::collections::hash_map::Entry::Vacant(e) = seen.entry((r.clone(), d)) {
                e.insert(dist + 1);
                queue.push_back((r, d));
            }
        }
    }
    unreachable!("the identity is always reachable")
}

/// Unordered pairs of graph nodes turned into directed CNOT moves.
pub fn directed(edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    edges.iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect()
}

pub fn rz_count(gates: &[Gate]) -> usize {
    gates.iter().filter(|g| matches!(g, Gate::Rz { .. })).count()
}

pub fn cnot_count(gates: &[Gate]) -> usize {
    gates.iter().filter(|g| matches!(g, Gate::Cnot { .. })).count()
}

/// Fewest CNOTs taking wires holding `from` to wires holding `to`
/// (parities as bit masks), by breadth-first search.
pub fn bfs_linear_distance(from: &[u32], to: &[u32]) -> usize {
    let n = from.len();
    let mut seen: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    seen.insert(from.to_vec(), 0);
    queue.push_back(from.to_vec());
    while let Some(rows) = queue.pop_front() {
        let d = seen[&rows];
        if rows == to {
            return d;
        }
        for (c, t) in all_pairs(n) {
            let mut r = rows.clone();
            r[t] ^= r[c];
            if !seen.contains_key(&r) {
                seen.insert(r.clone(), d + 1);
                queue.push_back(r);
            }
        }
    }
    usize::MAX
}

/// Fewest CNOTs from the identity to wires holding `outputs`, exposing every
/// parity of `terms` on some wire along the way.
pub fn bfs_min_cnots_to(n: usize, terms: &[u32], outputs: &[u32]) -> usize {
    let exposed = |rows: &[u32], done: u32| -> u32 {
        let mut d = done;
        for (i, t) in terms.iter().enumerate() {
            if rows.contains(t) {
                d |= 1 << i;
            }
        }
        d
    };
    let start: Vec<u32> = (0..n).map(|q| 1u32 << q).collect();
    let full = (1u32 << terms.len()) - 1;
    let mut seen: HashMap<(Vec<u32>, u32), usize> = HashMap::new();
    let mut queue = VecDeque::new();
    let d0 = exposed(&start, 0);
    seen.insert((start.clone(), d0), 0);
    queue.push_back((start, d0));
    while let Some((rows, done)) = queue.pop_front() {
        let dist = seen[&(rows.clone(), done)];
        if done == full && rows == outputs {
            return dist;
        }
        for (c, t) in all_pairs(n) {
            let mut r = rows.clone();
            r[t] ^= r[c];
            let d = exposed(&r, done);
            if let std::collections::hash_map::Entry::Vacant(e) = seen.entry((r.clone(), d)) {
                e.insert(dist + 1);
                queue.push_back((r, d));
            }
        }
    }
    usize::MAX
}
