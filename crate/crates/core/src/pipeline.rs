//! Whole-circuit optimization: partition, synthesize, stitch.

use crate::circuit::{Circuit, Gate};
use crate::engine::{synthesize, BlockStats, BlockSynthesis, EngineConfig, HwContext};
use crate::hardware::coupling::{CouplingGraph, Mapping};
use crate::ir::{merge_blocks, partition, rotation_merge, PhaseBlock};
use crate::verify::{ssa_form, unitary_equal, VerifyError};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("circuit has {qubits} qubits but the coupling graph only {nodes}")]
    TooManyQubits { qubits: usize, nodes: usize },
}

/// A synthesized block next to the gates that replaced it.
#[derive(Clone, Debug)]
pub struct BlockRecord {
    pub block: PhaseBlock,
    /// Replacement gates, including the block's inner barrier gates.
    pub gates: Vec<Gate>,
    /// Placement at the start of the block, hardware mode only.
    pub initial: Option<Mapping>,
}

impl BlockRecord {
    /// Whether `gates` realise the block on a `wires`-wire register: the same
    /// phase terms, barrier inputs and outputs in SSA form. In hardware mode
    /// SWAPs carry logical labels along.
    pub fn matches_source(&self, wires: usize) -> bool {
        let mut src = Vec::new();
        for (s, stage) in self.block.stages.iter().enumerate() {
            src.extend(stage.iter().cloned());
            if let Some(b) = self.block.boundaries.get(s) {
                src.extend(b.gates.iter().cloned());
            }
        }
        let identity: Vec<usize> = (0..wires).collect();
        let want = ssa_form(&src, &identity, false);
        let got = match &self.initial {
            None => ssa_form(&self.gates, &identity, false),
            Some(m) => ssa_form(&self.gates, &(0..wires).map(|p| m.logical(p)).collect::<Vec<_>>(), true),
        };
        want.eq_up_to_phase(&got)
    }
}

/// Result of [`optimize_circuit`].
#[derive(Clone, Debug)]
pub struct Optimized {
    pub circuit: Circuit,
    pub blocks: Vec<BlockStats>,
    pub records: Vec<BlockRecord>,
}

impl Optimized {
    pub fn timed_out(&self) -> bool {
        self.blocks.iter().any(|b| b.timed_out)
    }
}

/// One synthesized unit: either a single block or a merged run of blocks.
struct Unit {
    gates: Vec<Gate>,
    trailing: Vec<Gate>,
    stats: Vec<BlockStats>,
    records: Vec<BlockRecord>,
    cnots: usize,
    map: Option<Mapping>,
}

impl Unit {
    fn total(&self) -> usize {
        self.gates.len()
    }
}

fn single(b: &PhaseBlock, s: BlockSynthesis, initial: Option<Mapping>) -> Unit {
    let cnots = s.weighted_cnot();
    let record = BlockRecord { block: b.clone(), gates: s.gates.clone(), initial };
    Unit { gates: s.gates, trailing: b.barrier_gates.clone(), stats: vec![s.stats], records: vec![record], cnots, map: s.final_mapping }
}

/// Concatenates the units of a chunk, keeping inner barrier gates inline.
fn concat(units: Vec<Unit>) -> Unit {
    let mut out = Unit { gates: Vec::new(), trailing: Vec::new(), stats: Vec::new(), records: Vec::new(), cnots: 0, map: None };
    let n = units.len();
    for (i, u) in units.into_iter().enumerate() {
        out.gates.extend(u.gates);
        if i + 1 < n {
            out.gates.extend(u.trailing);
        } else {
            out.trailing = u.trailing;
        }
        out.stats.extend(u.stats);
        out.records.extend(u.records);
        out.cnots += u.cnots;
        out.map = u.map;
    }
    out
}

/// Keeps the merged unit when it is lexicographically better on (CNOTs, gates).
fn pick(separate: Unit, merged: Unit) -> Unit {
    if (merged.cnots, merged.total()) < (separate.cnots, separate.total()) {
        merged
    } else {
        separate
    }
}

/// Re-synthesizes every phase block of `c` after whole-circuit rotation merging.
///
/// Blocks are first synthesized one at a time; with `group_size > 1`, runs of
/// `group_size` consecutive blocks are then merged and re-synthesized with the
/// single-block CNOT total as a pruning bound, and the better version is kept.
pub fn optimize_circuit(c: &Circuit, group_size: usize, cfg: &EngineConfig) -> Optimized {
    let p = partition(&rotation_merge(c));
    let firsts: Vec<BlockSynthesis> = p.blocks.par_iter().map(|b| synthesize(b, cfg, None, None)).collect();
    let mut singles: Vec<Option<Unit>> = p.blocks.iter().zip(firsts).map(|(b, s)| Some(single(b, s, None))).collect();
    let k = group_size.max(1);
    let chunks: Vec<(usize, usize)> = (0..p.blocks.len()).step_by(k).map(|s| (s, (s + k).min(p.blocks.len()))).collect();
    let merged: Vec<Option<(PhaseBlock, BlockSynthesis)>> = chunks
        .par_iter()
        .map(|&(s, e)| {
            if e - s < 2 {
                return None;
            }
            let bound: usize = singles_bound(&singles[s..e]);
            let mb = merge_blocks(&p.blocks[s..e], e - s).pop().expect("one merged block");
            let r = synthesize(&mb, cfg, None, Some(bound as u32));
            Some((mb, r))
        })
        .collect();
    let mut units = Vec::new();
    for (&(s, e), m) in chunks.iter().zip(merged) {
        let sep = concat(singles[s..e].iter_mut().map(|u| u.take().expect("unit")).collect());
        units.push(match m {
            Some((mb, r)) => pick(sep, single(&mb, r, None)),
            None => sep,
        });
    }
    let mut gates = p.prefix.clone();
    let mut blocks = Vec::new();
    let mut records = Vec::new();
    for u in units {
        gates.extend(u.gates);
        gates.extend(u.trailing);
        blocks.extend(u.stats);
        records.extend(u.records);
    }
    Optimized { circuit: Circuit { name: c.name.clone(), qubit_count: c.qubit_count, gates }, blocks, records }
}

fn singles_bound(units: &[Option<Unit>]) -> usize {
    units.iter().map(|u| u.as_ref().map_or(0, |u| u.cnots)).sum()
}

/// Result of [`hw_optimize`].
#[derive(Clone, Debug)]
pub struct HwOptimized {
    /// Physical circuit over the graph's nodes.
    pub circuit: Circuit,
    /// Logical-to-physical mapping at the start of `circuit`.
    pub initial_mapping: Mapping,
    /// Logical-to-physical mapping at the end of `circuit`.
    pub final_mapping: Mapping,
    pub blocks: Vec<BlockStats>,
    pub records: Vec<BlockRecord>,
}

impl HwOptimized {
    pub fn timed_out(&self) -> bool {
        self.blocks.iter().any(|b| b.timed_out)
    }

    /// Unitary check against the logical `original`, placed by the initial
    /// mapping and read out through the final one.
    pub fn verify(&self, original: &Circuit, tol: f64) -> Result<bool, VerifyError> {
        let n = self.circuit.qubit_count;
        let init = self.initial_mapping.l2p();
        let placed = Circuit { qubit_count: n, ..original.clone() }.relabeled(init, n);
        let mut perm = vec![0; n];
        for (q, &p) in init.iter().enumerate() {
            perm[p] = self.final_mapping.phys(q);
        }
        unitary_equal(&placed, &self.circuit.decompose_swaps(), Some(&perm), tol)
    }
}

/// One hardware-aware pass starting from `init`.
fn hw_pass(c: &Circuit, graph: &CouplingGraph, init: &Mapping, group_size: usize, cfg: &EngineConfig) -> HwOptimized {
    let p = partition(&rotation_merge(c));
    let mut map = init.clone();
    let mapped = |map: &Mapping, gs: &[Gate]| -> Vec<Gate> { gs.iter().map(|g| g.relabel(|q| map.phys(q))).collect() };
    let mut gates = mapped(&map, &p.prefix);
    let mut blocks = Vec::new();
    let mut records = Vec::new();
    let k = group_size.max(1);
    let mut s = 0;
    while s < p.blocks.len() {
        let e = (s + k).min(p.blocks.len());
        let start_map = map.clone();
        let mut seps = Vec::new();
        for b in &p.blocks[s..e] {
            let hw = HwContext { graph, initial: map.clone(), allow_swaps: true };
            let mut u = single(b, synthesize(b, cfg, Some(hw), None), Some(map.clone()));
            map = u.map.clone().expect("hardware mapping");
            u.trailing = mapped(&map, &u.trailing);
            seps.push(u);
        }
        let mut unit = concat(seps);
        if e - s >= 2 {
            let mb = merge_blocks(&p.blocks[s..e], e - s).pop().expect("one merged block");
            let hw = HwContext { graph, initial: start_map.clone(), allow_swaps: true };
            let r = synthesize(&mb, cfg, Some(hw), Some(unit.cnots as u32));
            let mut mu = single(&mb, r, Some(start_map));
            let mmap = mu.map.clone().expect("hardware mapping");
            mu.trailing = mapped(&mmap, &mu.trailing);
            unit = pick(unit, mu);
            map = unit.map.clone().expect("hardware mapping");
        }
        gates.extend(unit.gates);
        gates.extend(unit.trailing);
        blocks.extend(unit.stats);
        records.extend(unit.records);
        s = e;
    }
    HwOptimized {
        circuit: Circuit { name: c.name.clone(), qubit_count: graph.node_count(), gates },
        initial_mapping: init.clone(),
        final_mapping: map,
        blocks,
        records,
    }
}

/// Number of backward/forward refinement round trips after the first pass.
pub const MAPPING_ROUND_TRIPS: usize = 3;

/// Coupling-aware optimization with reverse-pass initial-mapping refinement.
///
/// The first pass starts from the identity mapping. Each round trip runs the
/// inverted circuit from the last final mapping, then the circuit again from
/// the mapping the backward pass ends in. The forward pass with the lowest
/// weighted CNOT count (ties: total gates, then earliest) is returned.
pub fn hw_optimize(c: &Circuit, graph: &CouplingGraph, group_size: usize, cfg: &EngineConfig) -> Result<HwOptimized, PipelineError> {
    let n = graph.node_count();
    if c.qubit_count > n {
        return Err(PipelineError::TooManyQubits { qubits: c.qubit_count, nodes: n });
    }
    let padded = Circuit { name: c.name.clone(), qubit_count: n, gates: c.gates.clone() };
    let inverse = padded.inverse();
    let score = |r: &HwOptimized| {
        let k = r.circuit.counts();
        (k.weighted_cnot(), k.total)
    };
    let mut best = hw_pass(&padded, graph, &Mapping::identity(n), group_size, cfg);
    let mut last = best.final_mapping.clone();
    for _ in 0..MAPPING_ROUND_TRIPS {
        let back = hw_pass(&inverse, graph, &last, group_size, cfg);
        let fwd = hw_pass(&padded, graph, &back.final_mapping, group_size, cfg);
        last = fwd.final_mapping.clone();
        if score(&fwd) < score(&best) {
            best = fwd;
        }
    }
    Ok(best)
}
