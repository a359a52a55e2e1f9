//! Phase-polynomial blocks: partitioning, SSA renaming and merging.

use crate::angle::Angle;
use crate::bits::{BitMatrix, BitVec};
use crate::circuit::{Circuit, Gate};
use std::collections::{BTreeMap, BTreeSet};

/// One version of an original qubit; the version bumps at every barrier gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SsaQubit {
    pub original: usize,
    pub version: u32,
}

/// `parity ⊕ constant` over a block's SSA variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineParity {
    pub parity: BitVec,
    pub constant: bool,
}

impl AffineParity {
    fn var(nvars: usize, v: usize) -> Self {
        AffineParity { parity: BitVec::unit(nvars, v), constant: false }
    }

    fn xor_assign(&mut self, other: &AffineParity) {
        self.parity.xor_assign(&other.parity);
        self.constant ^= other.constant;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseTerm {
    pub parity: BitVec,
    pub angle: Angle,
}

/// Barrier gates fired inside a merged block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Boundary {
    pub gates: Vec<Gate>,
    /// Rows touched by `gates`, ascending.
    pub rows: Vec<usize>,
    /// Value each touched row must hold just before `gates`.
    pub requirements: Vec<AffineParity>,
    /// Variable created for each touched row just after `gates`.
    pub fresh: Vec<usize>,
}

/// A (possibly merged) phase-polynomial region in SSA form.
///
/// Row `i` is original qubit `qubits[i]`; variables `0..qubits.len()` are the
/// version-0 inputs of the rows, later variables are created at boundaries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseBlock {
    pub qubits: Vec<usize>,
    pub vars: Vec<SsaQubit>,
    pub terms: Vec<PhaseTerm>,
    pub boundaries: Vec<Boundary>,
    pub outputs: Vec<AffineParity>,
    pub global_phase: Angle,
    /// Source phase gates of each stage, original qubit indices.
    pub stages: Vec<Vec<Gate>>,
    /// Non-phase gates that terminate the block.
    pub barrier_gates: Vec<Gate>,
}

struct Sim {
    vals: Vec<AffineParity>,
    terms: BTreeMap<BitVec, Angle>,
    global: Angle,
}

impl Sim {
    fn apply(&mut self, row_of: &BTreeMap<usize, usize>, g: &Gate) {
        let r = |q: &usize| row_of[q];
        match g {
            Gate::Cnot { control, target } => {
                let c = self.vals[r(control)].clone();
                self.vals[r(target)].xor_assign(&c);
            }
            Gate::X(q) => {
                let v = &mut self.vals[r(q)];
                v.constant = !v.constant;
            }
            Gate::Swap(a, b) => self.vals.swap(r(a), r(b)),
            Gate::Rz { qubit, angle } => {
                let v = &self.vals[r(qubit)];
                let (p, a) = if v.constant { (v.parity.clone(), -*angle) } else { (v.parity.clone(), *angle) };
                if v.constant {
                    self.global = self.global + *angle;
                }
                let e = self.terms.entry(p).or_insert(Angle::ZERO);
                *e = *e + a;
            }
            _ => panic!("non-phase gate inside a phase stage"),
        }
    }
}

impl PhaseBlock {
    /// Builds a block from its stages, the barrier groups between them and
    /// its trailing barrier gates.
    pub fn build(stages: Vec<Vec<Gate>>, inner: Vec<Vec<Gate>>, barrier_gates: Vec<Gate>) -> PhaseBlock {
        assert_eq!(inner.len() + 1, stages.len().max(1));
        let mut qs = BTreeSet::new();
        for g in stages.iter().flatten().chain(inner.iter().flatten()) {
            qs.extend(g.qubits());
        }
        let qubits: Vec<usize> = qs.into_iter().collect();
        let m = qubits.len();
        let row_of: BTreeMap<usize, usize> = qubits.iter().enumerate().map(|(i, &q)| (q, i)).collect();

        let mut vars: Vec<SsaQubit> = qubits.iter().map(|&q| SsaQubit { original: q, version: 0 }).collect();
        let mut touched = Vec::new();
        let mut version = vec![0u32; m];
        for group in &inner {
            let rows: BTreeSet<usize> = group.iter().flat_map(|g| g.qubits()).map(|q| row_of[&q]).collect();
            let rows: Vec<usize> = rows.into_iter().collect();
            let mut fresh = Vec::new();
            for &r in &rows {
                version[r] += 1;
                fresh.push(vars.len());
                vars.push(SsaQubit { original: qubits[r], version: version[r] });
            }
            touched.push((rows, fresh));
        }
        let nvars = vars.len();

        let mut sim = Sim { vals: (0..m).map(|i| AffineParity::var(nvars, i)).collect(), terms: BTreeMap::new(), global: Angle::ZERO };
        let mut boundaries = Vec::new();
        for (s, stage) in stages.iter().enumerate() {
            for g in stage {
                sim.apply(&row_of, g);
            }
            if s < inner.len() {
                let (rows, fresh) = touched[s].clone();
                let requirements = rows.iter().map(|&r| sim.vals[r].clone()).collect();
                for (&r, &v) in rows.iter().zip(&fresh) {
                    sim.vals[r] = AffineParity::var(nvars, v);
                }
                boundaries.push(Boundary { gates: inner[s].clone(), rows, requirements, fresh });
            }
        }
        let terms = sim.terms.into_iter().filter(|(_, a)| !a.is_zero()).map(|(parity, angle)| PhaseTerm { parity, angle }).collect();
        PhaseBlock { qubits, vars, terms, boundaries, outputs: sim.vals, global_phase: sim.global, stages, barrier_gates }
    }

    pub fn rows(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_merged(&self) -> bool {
        !self.boundaries.is_empty()
    }

    pub fn stage_count(&self) -> usize {
        self.boundaries.len() + 1
    }

    /// Output linear map as a matrix: row `i` is the parity held by row `i`.
    pub fn output_matrix(&self) -> BitMatrix {
        BitMatrix { rows: self.outputs.iter().map(|o| o.parity.clone()).collect(), cols: self.vars.len() }
    }

    pub fn output_affine(&self) -> Vec<bool> {
        self.outputs.iter().map(|o| o.constant).collect()
    }

    /// The original gate sequence of the block, barriers between stages included.
    pub fn source_gates(&self) -> Vec<Gate> {
        let mut out = Vec::new();
        for (s, stage) in self.stages.iter().enumerate() {
            out.extend(stage.iter().cloned());
            if let Some(b) = self.boundaries.get(s) {
                out.extend(b.gates.iter().cloned());
            }
        }
        out
    }

    /// The source gates with each parity rotated once, at its first occurrence,
    /// by the merged angle. Zero-sum parities disappear.
    pub fn rotation_merged(&self) -> Vec<Gate> {
        let merged: BTreeMap<&BitVec, Angle> = self.terms.iter().map(|t| (&t.parity, t.angle)).collect();
        let row_of: BTreeMap<usize, usize> = self.qubits.iter().enumerate().map(|(i, &q)| (q, i)).collect();
        let nvars = self.vars.len();
        let mut sim = Sim { vals: (0..self.rows()).map(|i| AffineParity::var(nvars, i)).collect(), terms: BTreeMap::new(), global: Angle::ZERO };
        let mut done = BTreeSet::new();
        let mut out = Vec::new();
        for (s, stage) in self.stages.iter().enumerate() {
            for g in stage {
                if let Gate::Rz { qubit, .. } = g {
                    let v = sim.vals[row_of[qubit]].clone();
                    if done.insert(v.parity.clone()) {
                        if let Some(&a) = merged.get(&v.parity) {
                            out.push(Gate::rz(*qubit, if v.constant { -a } else { a }));
                        }
                    }
                } else {
                    out.push(g.clone());
                }
                sim.apply(&row_of, g);
            }
            if let Some(b) = self.boundaries.get(s) {
                out.extend(b.gates.iter().cloned());
                for (&r, &v) in b.rows.iter().zip(&b.fresh) {
                    sim.vals[r] = AffineParity::var(nvars, v);
                }
            }
        }
        out
    }
}

/// A circuit split into phase blocks; `prefix` holds barrier gates that
/// precede the first block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub qubit_count: usize,
    pub prefix: Vec<Gate>,
    pub blocks: Vec<PhaseBlock>,
}

impl Partition {
    /// Reassembles the circuit from per-block gate lists.
    pub fn stitch(&self, bodies: &[Vec<Gate>]) -> Circuit {
        let mut gates = self.prefix.clone();
        for (b, body) in self.blocks.iter().zip(bodies) {
            gates.extend(body.iter().cloned());
            gates.extend(b.barrier_gates.iter().cloned());
        }
        Circuit::with_gates(self.qubit_count, gates)
    }

    /// Replay of every block's source gates.
    pub fn replay(&self) -> Circuit {
        let bodies: Vec<Vec<Gate>> = self.blocks.iter().map(PhaseBlock::source_gates).collect();
        self.stitch(&bodies)
    }
}

/// Greedy partition into maximal commuting-front phase blocks.
///
/// Each round collects every phase gate whose qubits have not yet met a
/// non-phase gate, then every non-phase gate that is now at the front.
pub fn partition(c: &Circuit) -> Partition {
    let mut rest: Vec<Gate> = c.gates.clone();
    let mut prefix = Vec::new();
    let mut blocks: Vec<PhaseBlock> = Vec::new();
    while !rest.is_empty() {
        let mut closed = vec![false; c.qubit_count];
        let mut body = Vec::new();
        let mut left = Vec::new();
        for g in rest.drain(..) {
            let qs = g.qubits();
            if g.is_phase_gate() && qs.iter().all(|&q| !closed[q]) {
                body.push(g);
            } else {
                for q in qs {
                    closed[q] = true;
                }
                left.push(g);
            }
        }
        let mut blocked = vec![false; c.qubit_count];
        let mut barriers = Vec::new();
        for g in left {
            let qs = g.qubits();
            if !g.is_phase_gate() && qs.iter().all(|&q| !blocked[q]) {
                barriers.push(g);
            } else {
                for q in qs {
                    blocked[q] = true;
                }
                rest.push(g);
            }
        }
        if body.is_empty() {
            match blocks.last_mut() {
                Some(b) => b.barrier_gates.extend(barriers),
                None => prefix.extend(barriers),
            }
        } else {
            blocks.push(PhaseBlock::build(vec![body], vec![], barriers));
        }
    }
    Partition { qubit_count: c.qubit_count, prefix, blocks }
}

/// Fuses consecutive runs of up to `group_size` unmerged blocks.
pub fn merge_blocks(blocks: &[PhaseBlock], group_size: usize) -> Vec<PhaseBlock> {
    assert!(group_size >= 1);
    blocks
        .chunks(group_size)
        .map(|chunk| {
            if chunk.len() == 1 {
                return chunk[0].clone();
            }
            let stages: Vec<Vec<Gate>> = chunk.iter().flat_map(|b| b.stages.iter().cloned()).collect();
            let inner: Vec<Vec<Gate>> = chunk[..chunk.len() - 1].iter().map(|b| b.barrier_gates.clone()).collect();
            let trailing = chunk[chunk.len() - 1].barrier_gates.clone();
            assert!(chunk.iter().all(|b| !b.is_merged()), "only unmerged blocks can be fused");
            PhaseBlock::build(stages, inner, trailing)
        })
        .collect()
}

/// Rotation merging over the whole circuit.
///
/// Qubits entering a non-phase gate carry a fresh variable afterwards, so a
/// parity is matched across blocks whenever it survives the barriers.
pub fn rotation_merge(c: &Circuit) -> Circuit {
    let p = partition(c);
    let merged = Partition { qubit_count: p.qubit_count, prefix: p.prefix.clone(), blocks: merge_blocks(&p.blocks, p.blocks.len().max(1)) };
    let bodies: Vec<Vec<Gate>> = merged.blocks.iter().map(PhaseBlock::rotation_merged).collect();
    let mut out = merged.stitch(&bodies);
    out.name = c.name.clone();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qasm::parse_qasm;

    #[test]
    fn only_hadamards_give_no_blocks() {
        let c = parse_qasm("qreg q[2]; h q[0]; h q[1]; h q[0];").unwrap();
        let p = partition(&c);
        assert!(p.blocks.is_empty());
        assert_eq!(p.prefix.len(), 3);
    }

    #[test]
    fn affine_rotation_negates_and_tracks_phase() {
        let c = parse_qasm("qreg q[1]; x q[0]; t q[0]; x q[0];").unwrap();
        let p = partition(&c);
        let b = &p.blocks[0];
        assert_eq!(b.terms, vec![PhaseTerm { parity: BitVec::unit(1, 0), angle: Angle::pi_frac(-1, 4) }]);
        assert_eq!(b.global_phase, Angle::pi_frac(1, 4));
        assert!(!b.outputs[0].constant);
    }

    #[test]
    fn group_size_one_is_identity() {
        let c = parse_qasm("qreg q[2]; cx q[0],q[1]; t q[1]; h q[1]; cx q[0],q[1]; t q[1];").unwrap();
        let p = partition(&c);
        assert_eq!(merge_blocks(&p.blocks, 1), p.blocks);
        let merged = merge_blocks(&p.blocks, 2);
        assert_eq!(merged.len(), 1);
        assert_eq!(merged[0].vars.len(), 3);
        assert_eq!(merged[0].terms.len(), 2);
    }
}
