//! Best-first synthesis of phase blocks over the joint parity matrix.
//!
//! One search serves both the logical engine and the coupling-aware engine;
//! the latter only differs in which CNOTs are legal, in its cost terms and
//! in carrying a qubit mapping per node.

use crate::bits::{Basis, BitMatrix, BitVec};
use crate::circuit::Gate;
use crate::hardware::coupling::{CouplingGraph, Mapping};
use crate::ir::PhaseBlock;
use crate::parity::{gaussian_elimination, JointParityMatrix};
use crate::search::BoundedQueue;
use crate::Cost;
use num_traits::Zero;
use serde::Serialize;
use std::cell::RefCell;
use std::collections::HashMap;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::rc::Rc;
use std::time::{Duration, Instant};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngineConfig {
    pub queue_capacity: usize,
    pub solution_count: usize,
    pub per_block_timeout: Duration,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { queue_capacity: 10_000, solution_count: 10_000, per_block_timeout: Duration::from_secs(400) }
    }
}

/// Per-block search report.
#[derive(Clone, Debug, Default, Serialize, PartialEq)]
pub struct BlockStats {
    pub qubits: usize,
    pub terms: usize,
    pub stages: usize,
    pub nodes_expanded: u64,
    pub nodes_dropped: u64,
    pub solutions: u64,
    pub wall_time_s: f64,
    pub timed_out: bool,
    pub used_fallback: bool,
    pub cnots: usize,
    pub swaps: usize,
    pub gates: usize,
}

/// Synthesized gates of one block.
#[derive(Clone, Debug)]
pub struct BlockSynthesis {
    pub gates: Vec<Gate>,
    pub stats: BlockStats,
    /// Mapping after the block (hardware mode only).
    pub final_mapping: Option<Mapping>,
}

impl BlockSynthesis {
    /// CNOTs plus three per SWAP.
    pub fn weighted_cnot(&self) -> usize {
        self.stats.cnots + 3 * self.stats.swaps
    }
}

/// Coupling constraints for the hardware engine.
#[derive(Clone, Debug)]
pub struct HwContext<'g> {
    pub graph: &'g CouplingGraph,
    pub initial: Mapping,
    /// Routing SWAPs may be inserted.
    pub allow_swaps: bool,
}

/// Ordered row pairs whose CNOT lowers the weight of some listed column.
pub fn active_row_pairs(m: &JointParityMatrix, active: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..m.rows() {
        for j in 0..m.rows() {
            if i != j && active.iter().any(|&c| m.get(i, c) && m.get(j, c)) {
                out.push((i, j));
            }
        }
    }
    out
}

struct Link {
    gate: Gate,
    prev: Option<Rc<Link>>,
}

#[derive(Clone)]
struct Node {
    m: JointParityMatrix,
    stage: usize,
    active: Vec<u64>,
    map: Option<Mapping>,
    g: u32,
    cnots: u32,
    swaps: u32,
    ngates: u32,
    tail: Option<Rc<Link>>,
}

impl Node {
    fn emit(&mut self, gate: Gate) {
        match gate {
            Gate::Cnot { .. } => {
                self.cnots += 1;
                self.g += 1;
            }
            Gate::Swap(..) => {
                self.swaps += 1;
                self.g += 3;
            }
            _ => {}
        }
        self.ngates += 1;
        self.tail = Some(Rc::new(Link { gate, prev: self.tail.take() }));
    }

    fn gates(&self) -> Vec<Gate> {
        let mut out = Vec::with_capacity(self.ngates as usize);
        let mut cur = self.tail.as_ref();
        while let Some(l) = cur {
            out.push(l.gate.clone());
            cur = l.prev.as_ref();
        }
        out.reverse();
        out
    }

    fn state_hash(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.stage.hash(&mut h);
        self.m.raw_bits().hash(&mut h);
        self.m.live_mask().hash(&mut h);
        self.active.hash(&mut h);
        if let Some(map) = &self.map {
            map.l2p().hash(&mut h);
        }
        h.finish()
    }
}

struct Solution {
    gates: Vec<Gate>,
    g: u32,
    cnots: u32,
    swaps: u32,
    map: Option<Mapping>,
}

struct Group {
    rows: Vec<usize>,
    req_cols: Vec<usize>,
    affine: Vec<bool>,
    gates: Vec<Gate>,
    fresh: Vec<(usize, usize)>,
}

type Key = (Cost, Cost, Cost, i64);

struct Searcher<'a> {
    block: &'a PhaseBlock,
    rows: usize,
    words: usize,
    future: Vec<Vec<usize>>,
    avail: Vec<Vec<u64>>,
    out_mask: Vec<u64>,
    groups: Vec<Group>,
    hw: Option<HwContext<'a>>,
    ge_memo: RefCell<HashMap<BitMatrix, GeSeq>>,
    wd_memo: RefCell<HashMap<Vec<bool>, Rc<Vec<u32>>>>,
}

type GeSeq = Rc<Vec<(usize, usize)>>;

fn mask_has(mask: &[u64], c: usize) -> bool {
    (mask[c / 64] >> (c % 64)) & 1 == 1
}

fn ones(mask: &[u64]) -> impl Iterator<Item = usize> + '_ {
    mask.iter().enumerate().flat_map(|(wi, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + t)
            }
        })
    })
}

impl<'a> Searcher<'a> {
    fn new(block: &'a PhaseBlock, hw: Option<HwContext<'a>>) -> (Self, JointParityMatrix) {
        let m = block.rows();
        let nvars = block.vars.len();
        let mut var_origin = vec![None; nvars];
        for (s, b) in block.boundaries.iter().enumerate() {
            for (&r, &v) in b.rows.iter().zip(&b.fresh) {
                var_origin[v] = Some((s, r));
            }
        }
        let mut items: Vec<&BitVec> = block.terms.iter().map(|t| &t.parity).collect();
        for b in &block.boundaries {
            items.extend(b.requirements.iter().map(|r| &r.parity));
        }
        items.extend(block.outputs.iter().map(|o| &o.parity));

        let split = |p: &BitVec| {
            let mut old = BitVec::zeros(m);
            let mut fut = Vec::new();
            for v in p.iter_ones() {
                match var_origin[v] {
                    None => old.set(v, true),
                    Some((s, r)) => fut.push((s, r)),
                }
            }
            (old, fut)
        };
        let t = block.terms.len();
        let nreq: usize = block.boundaries.iter().map(|b| b.rows.len()).sum();
        let mut phase = Vec::new();
        let mut aux = Vec::new();
        let mut outs = Vec::new();
        let mut futs = Vec::new();
        for (c, p) in items.iter().enumerate() {
            let (old, fut) = split(p);
            futs.push(fut);
            if c < t {
                phase.push((old, block.terms[c].angle));
            } else if c < t + nreq {
                aux.push(old);
            } else {
                outs.push(old);
            }
        }
        let jm = JointParityMatrix::with_aux(m, &phase, &aux, &outs);
        let words = jm.words();
        let stages = block.stage_count();

        let mut groups: Vec<Group> = Vec::new();
        let mut col = t;
        for b in &block.boundaries {
            let req_cols: Vec<usize> = (col..col + b.rows.len()).collect();
            col += b.rows.len();
            groups.push(Group {
                rows: b.rows.clone(),
                req_cols,
                affine: b.requirements.iter().map(|r| r.constant).collect(),
                gates: b.gates.clone(),
                fresh: Vec::new(),
            });
        }
        for (c, fut) in futs.iter().enumerate() {
            for &(s, r) in fut {
                groups[s].fresh.push((c, r));
            }
        }
        // Column c becomes available once every group it depends on has fired.
        let future: Vec<Vec<usize>> = futs.iter().map(|f| f.iter().map(|&(s, _)| s + 1).collect()).collect();
        let avail = (0..stages)
            .map(|st| {
                let mut mask = vec![0u64; words];
                for c in 0..t {
                    if future[c].iter().all(|&s| s <= st) {
                        mask[c / 64] |= 1 << (c % 64);
                    }
                }
                mask
            })
            .collect();
        let mut out_mask = vec![0u64; words];
        for q in 0..m {
            let c = jm.output_col(q);
            out_mask[c / 64] |= 1 << (c % 64);
        }
        let s = Searcher {
            block,
            rows: m,
            words,
            future,
            avail,
            out_mask,
            groups,
            hw,
            ge_memo: RefCell::new(HashMap::new()),
            wd_memo: RefCell::new(HashMap::new()),
        };
        (s, jm)
    }

    fn last_stage(&self) -> usize {
        self.groups.len()
    }

    fn phys(&self, node: &Node, row: usize) -> usize {
        let q = self.block.qubits[row];
        node.map.as_ref().map_or(q, |m| m.phys(q))
    }

    fn adjacent(&self, node: &Node, i: usize, j: usize) -> bool {
        match &self.hw {
            None => true,
            Some(hw) => hw.graph.is_adjacent(self.phys(node, i), self.phys(node, j)),
        }
    }

    fn root(&self, m: JointParityMatrix) -> Node {
        let mut n = Node {
            m,
            stage: 0,
            active: vec![0; self.words],
            map: self.hw.as_ref().map(|h| h.initial.clone()),
            g: 0,
            cnots: 0,
            swaps: 0,
            ngates: 0,
            tail: None,
        };
        self.complete(&mut n);
        self.reset_active(&mut n);
        n
    }

    fn available_live(&self, node: &Node) -> Vec<u64> {
        self.avail[node.stage].iter().zip(node.m.live_mask()).map(|(a, l)| a & l).collect()
    }

    fn reset_active(&self, node: &mut Node) {
        node.active = self.available_live(node);
    }

    /// Emits Rz for every available weight-one phase column.
    fn complete(&self, node: &mut Node) -> bool {
        let (o, t) = node.m.weight_masks();
        let avail = self.available_live(node);
        let mask: Vec<u64> = (0..self.words).map(|k| o[k] & !t[k] & avail[k]).collect();
        let cols: Vec<usize> = ones(&mask).collect();
        for &c in &cols {
            let row = (0..self.rows).find(|&r| node.m.get(r, c)).expect("weight-one column");
            let p = self.phys(node, row);
            node.emit(Gate::rz(p, node.m.angle(c)));
            node.m.kill_column(c);
        }
        !cols.is_empty()
    }

    fn ge(&self, mat: &BitMatrix) -> GeSeq {
        if let Some(v) = self.ge_memo.borrow().get(mat) {
            return v.clone();
        }
        let ops = Rc::new(gaussian_elimination(mat).expect("invertible target"));
        self.ge_memo.borrow_mut().insert(mat.clone(), ops.clone());
        ops
    }

    fn wtable(&self, active: Vec<bool>) -> Rc<Vec<u32>> {
        if let Some(v) = self.wd_memo.borrow().get(&active) {
            return v.clone();
        }
        let hw = self.hw.as_ref().expect("hardware mode");
        let t = Rc::new(hw.graph.weighted_table(&active));
        self.wd_memo.borrow_mut().insert(active, t.clone());
        t
    }

    fn active_flags(&self, phys: &[usize]) -> Vec<bool> {
        let n = self.hw.as_ref().map_or(0, |h| h.graph.node_count());
        let mut a = vec![false; n];
        for &p in phys {
            a[p] = true;
        }
        a
    }

    /// Normalized pairwise weighted distance of a column's active qubits.
    fn column_cost(&self, phys: &[usize]) -> Cost {
        let k = phys.len();
        if k < 2 {
            return Cost::from_integer(k as i64);
        }
        let n = self.hw.as_ref().map_or(0, |h| h.graph.node_count());
        let t = self.wtable(self.active_flags(phys));
        let mut sum = 0i64;
        for (x, &a) in phys.iter().enumerate() {
            for &b in &phys[x + 1..] {
                sum += 2 * t[a * n + b] as i64;
            }
        }
        Cost::new(sum, k as i64 - 1)
    }

    /// Minimum pairwise weighted distance of a column's active qubits.
    fn column_min(&self, phys: &[usize]) -> u32 {
        let n = self.hw.as_ref().map_or(0, |h| h.graph.node_count());
        let t = self.wtable(self.active_flags(phys));
        let mut best = u32::MAX;
        for (x, &a) in phys.iter().enumerate() {
            for &b in &phys[x + 1..] {
                best = best.min(t[a * n + b]);
            }
        }
        best
    }

    fn column_phys(&self, node: &Node, c: usize) -> Vec<usize> {
        (0..self.rows).filter(|&r| node.m.get(r, c)).map(|r| self.phys(node, r)).collect()
    }

    fn h1(&self, node: &Node) -> Cost {
        let mut total = Cost::zero();
        let mut plain = 0i64;
        for c in node.m.phase_columns() {
            let later = self.future[c].iter().filter(|&&s| s > node.stage).count() as i64;
            if self.hw.is_some() && later == 0 && mask_has(&self.avail[node.stage], c) {
                total += self.column_cost(&self.column_phys(node, c));
            } else {
                plain += node.m.column_weight(c) as i64 + later;
            }
        }
        total + Cost::from_integer(plain)
    }

    fn h2(&self, node: &Node) -> Cost {
        let target = if node.stage == self.last_stage() { Some(node.m.output_matrix()) } else { self.fire_target(node, false) };
        let Some(target) = target else {
            return Cost::from_integer(1 << 20);
        };
        let ops = self.ge(&target);
        match &self.hw {
            None => Cost::from_integer(ops.len() as i64),
            Some(hw) => {
                let n = hw.graph.node_count();
                let phys: Vec<usize> = (0..self.rows).map(|r| self.phys(node, r)).collect();
                let t = self.wtable(self.active_flags(&phys));
                Cost::from_integer(ops.iter().map(|&(c, tg)| t[phys[c] * n + phys[tg]] as i64).sum())
            }
        }
    }

    fn key(&self, node: &Node) -> Key {
        let h1 = self.h1(node);
        let h2 = self.h2(node);
        let g = Cost::from_integer(node.g as i64);
        (g + h1 + h2, h1, h2, -(node.g as i64))
    }

    /// The linear map to apply before firing the next barrier group: row
    /// `q` of the group must hold its requirement, every other pending
    /// column must end up off the group's rows.
    ///
    /// With `strict` unset, available phase columns that block the firing
    /// are left out.
    fn fire_target(&self, node: &Node, strict: bool) -> Option<BitMatrix> {
        let grp = &self.groups[node.stage];
        let m = self.rows;
        let mut in_f = vec![false; m];
        for &q in &grp.rows {
            in_f[q] = true;
        }
        let mut es = Basis::new(m);
        let mut esr = Basis::new(m);
        let reqs: Vec<BitVec> = grp.req_cols.iter().map(|&c| node.m.column(c)).collect();
        for r in &reqs {
            if !esr.insert(r) {
                return None;
            }
        }
        let own: Vec<usize> = grp.req_cols.clone();
        let avail = &self.avail[node.stage];
        let live = node.m.live_mask();
        let total_cols = node.m.phase_width() + node.m.aux_width() + m;
        let mut order: Vec<usize> = (node.m.phase_width()..total_cols).filter(|c| mask_has(live, *c) && !own.contains(c)).collect();
        order.extend((0..node.m.phase_width()).filter(|&c| mask_has(live, c) && !mask_has(avail, c)));
        let optional_from = order.len();
        order.extend((0..node.m.phase_width()).filter(|&c| mask_has(live, c) && mask_has(avail, c)));

        let mut s_vecs = Vec::new();
        for (idx, &c) in order.iter().enumerate() {
            let v = node.m.column(c);
            if v.is_zero() || es.contains(&v) {
                continue;
            }
            if esr.contains(&v) {
                if strict || idx < optional_from {
                    return None;
                }
                continue;
            }
            es.insert(&v);
            esr.insert(&v);
            s_vecs.push(v);
        }

        // Reduced echelon form of the span, pivots preferably off the group rows.
        let mut basis: Vec<(usize, BitVec)> = Vec::new();
        for mut v in s_vecs {
            for (p, b) in &basis {
                if v.get(*p) {
                    v.xor_assign(b);
                }
            }
            let p = v.iter_ones().find(|&k| !in_f[k]).or_else(|| v.first_one()).expect("independent vector");
            for (_, b) in basis.iter_mut() {
                if b.get(p) {
                    b.xor_assign(&v);
                }
            }
            basis.push((p, v));
        }

        let mut cols: Vec<Option<BitVec>> = vec![None; m];
        for (&q, r) in grp.rows.iter().zip(reqs) {
            cols[q] = Some(r);
        }
        let mut spill = Vec::new();
        for (p, v) in basis {
            if !in_f[p] && cols[p].is_none() {
                cols[p] = Some(v);
            } else {
                spill.push(v);
            }
        }
        for v in spill {
            let k = v
                .iter_ones()
                .find(|&k| !in_f[k] && cols[k].is_none())
                .or_else(|| (0..m).find(|&k| !in_f[k] && cols[k].is_none()))?;
            cols[k] = Some(v);
        }
        for (k, col) in cols.iter_mut().enumerate() {
            if col.is_none() {
                let e = BitVec::unit(m, k);
                if esr.insert(&e) {
                    *col = Some(e);
                }
            }
        }
        for col in cols.iter_mut().filter(|c| c.is_none()) {
            let e = (0..m).map(|j| BitVec::unit(m, j)).find(|e| !esr.contains(e))?;
            esr.insert(&e);
            *col = Some(e);
        }
        let cols: Vec<BitVec> = cols.into_iter().map(|c| c.expect("filled")).collect();
        Some(BitMatrix::from_columns(m, &cols))
    }

    /// Applies row operations, inserting routing SWAPs when not adjacent.
    fn apply_ops(&self, node: &mut Node, ops: &[(usize, usize)]) -> bool {
        for &(c, t) in ops {
            if let Some(hw) = &self.hw {
                loop {
                    let (pc, pt) = (self.phys(node, c), self.phys(node, t));
                    if hw.graph.is_adjacent(pc, pt) {
                        break;
                    }
                    if !hw.allow_swaps {
                        return false;
                    }
                    let next = hw.graph.shortest_path(pc, pt)[1];
                    node.map.as_mut().expect("mapping").swap_physical(pc, next);
                    node.emit(Gate::Swap(pc, next));
                }
            }
            let (pc, pt) = (self.phys(node, c), self.phys(node, t));
            node.m.apply_cnot(c, t).expect("distinct rows");
            node.emit(Gate::cnot(pc, pt));
        }
        true
    }

    fn emit_mapped(&self, node: &mut Node, g: &Gate) {
        let gate = match &node.map {
            Some(map) => g.relabel(|q| map.phys(q)),
            None => g.clone(),
        };
        node.emit(gate);
    }

    fn fire(&self, node: &Node) -> Option<Node> {
        let target = self.fire_target(node, true)?;
        let ops = self.ge(&target);
        let mut child = node.clone();
        if !self.apply_ops(&mut child, &ops) {
            return None;
        }
        let grp = &self.groups[node.stage];
        for (i, &q) in grp.rows.iter().enumerate() {
            debug_assert_eq!(child.m.column(grp.req_cols[i]), BitVec::unit(self.rows, q));
            if grp.affine[i] {
                let qq = self.block.qubits[q];
                self.emit_mapped(&mut child, &Gate::X(qq));
            }
        }
        for g in &grp.gates {
            self.emit_mapped(&mut child, g);
        }
        for &c in &grp.req_cols {
            child.m.kill_column(c);
        }
        for &(c, r) in &grp.fresh {
            if child.m.is_live(c) {
                child.m.set(r, c, true);
            }
        }
        child.stage += 1;
        self.complete(&mut child);
        self.reset_active(&mut child);
        Some(child)
    }

    fn cnot_child(&self, node: &Node, i: usize, j: usize, active: Option<Vec<u64>>) -> Node {
        let mut child = node.clone();
        let reduced: Vec<u64> = (0..self.words).map(|k| node.m.row_words(i)[k] & node.m.row_words(j)[k] & node.active[k]).collect();
        let (pi, pj) = (self.phys(node, i), self.phys(node, j));
        child.m.apply_cnot(i, j).expect("distinct rows");
        child.emit(Gate::cnot(pi, pj));
        let completed = self.complete(&mut child);
        let focus: Vec<u64> = match active {
            Some(a) => a,
            None => reduced,
        };
        let focus: Vec<u64> = focus.iter().zip(child.m.live_mask()).map(|(a, l)| a & l).collect();
        if completed || focus.iter().all(|&w| w == 0) {
            self.reset_active(&mut child);
        } else {
            child.active = focus;
        }
        child
    }

    fn overlaps(&self, node: &Node, i: usize, j: usize, mask: &[u64]) -> bool {
        (0..self.words).any(|k| node.m.row_words(i)[k] & node.m.row_words(j)[k] & mask[k] != 0)
    }

    fn expand(&self, node: &Node) -> Vec<Node> {
        let mut out = Vec::new();
        for i in 0..self.rows {
            for j in 0..self.rows {
                if i != j && self.overlaps(node, i, j, &node.active) && self.adjacent(node, i, j) {
                    out.push(self.cnot_child(node, i, j, None));
                }
            }
        }
        if let Some(hw) = &self.hw {
            let a_empty = out.is_empty();
            out.extend(self.case_b(node));
            if a_empty && hw.allow_swaps {
                out.extend(self.case_c(node, hw));
            }
        }
        if node.stage < self.last_stage() {
            out.extend(self.fire(node));
        }
        out
    }

    /// Adjacent CNOTs that shrink some active column's distance cost; best four.
    fn case_b(&self, node: &Node) -> Vec<Node> {
        let active: Vec<usize> = ones(&node.active).collect();
        let mut cands: Vec<(Cost, usize, usize, Vec<u64>)> = Vec::new();
        for i in 0..self.rows {
            for j in 0..self.rows {
                if i == j || !self.adjacent(node, i, j) || self.overlaps(node, i, j, &node.active) {
                    continue;
                }
                let mut best = Cost::zero();
                let mut improved = vec![0u64; self.words];
                for &c in &active {
                    if !node.m.get(j, c) {
                        continue;
                    }
                    let before = self.column_phys(node, c);
                    let mut after = before.clone();
                    after.push(self.phys(node, i));
                    let gain = self.column_cost(&before) - self.column_cost(&after);
                    if gain > Cost::zero() {
                        improved[c / 64] |= 1 << (c % 64);
                        if gain > best {
                            best = gain;
                        }
                    }
                }
                if best > Cost::zero() {
                    cands.push((best, i, j, improved));
                }
            }
        }
        cands.sort_by(|a, b| b.0.cmp(&a.0).then((a.1, a.2).cmp(&(b.1, b.2))));
        cands.truncate(4);
        cands.into_iter().map(|(_, i, j, imp)| self.cnot_child(node, i, j, Some(imp))).collect()
    }

    /// SWAPs on coupling edges that bring some active column's qubits closer.
    fn case_c(&self, node: &Node, hw: &HwContext) -> Vec<Node> {
        let rows_phys: Vec<usize> = (0..self.rows).map(|r| self.phys(node, r)).collect();
        let active: Vec<usize> = ones(&node.active).collect();
        let before: Vec<u32> = active.iter().map(|&c| self.column_min(&self.column_phys(node, c))).collect();
        let mut out = Vec::new();
        for (u, v) in hw.graph.edges() {
            if !rows_phys.contains(&u) && !rows_phys.contains(&v) {
                continue;
            }
            let mut child = node.clone();
            child.map.as_mut().expect("mapping").swap_physical(u, v);
            let better = active.iter().zip(&before).any(|(&c, &b)| self.column_min(&self.column_phys(&child, c)) < b);
            if better {
                child.emit(Gate::Swap(u, v));
                out.push(child);
            }
        }
        out
    }

    fn is_goal(&self, node: &Node) -> bool {
        node.stage == self.last_stage() && node.m.phase_columns().is_empty()
    }

    /// Finishes a goal node. In hardware mode a non-adjacent finish may
    /// also yield linear continuation nodes.
    fn finish(&self, node: &Node) -> (Option<Solution>, Vec<Node>) {
        let ops = self.ge(&node.m.output_matrix());
        let adjacent = match &self.hw {
            None => true,
            Some(_) => ops.iter().all(|&(c, t)| self.adjacent(node, c, t)),
        };
        let mut conts = Vec::new();
        let sol = if adjacent || self.hw.as_ref().is_some_and(|h| h.allow_swaps) {
            let mut done = node.clone();
            self.apply_ops(&mut done, &ops);
            for (r, o) in self.block.outputs.iter().enumerate() {
                if o.constant {
                    self.emit_mapped(&mut done, &Gate::X(self.block.qubits[r]));
                }
            }
            debug_assert!(done.m.output_matrix().is_identity());
            Some(Solution { gates: done.gates(), g: done.g, cnots: done.cnots, swaps: done.swaps, map: done.map })
        } else {
            None
        };
        if !adjacent {
            for i in 0..self.rows {
                for j in 0..self.rows {
                    if i != j && self.adjacent(node, i, j) && self.overlaps(node, i, j, &self.out_mask) {
                        let mut child = node.clone();
                        let (pi, pj) = (self.phys(node, i), self.phys(node, j));
                        child.m.apply_cnot(i, j).expect("distinct rows");
                        child.emit(Gate::cnot(pi, pj));
                        conts.push(child);
                    }
                }
            }
        }
        (sol, conts)
    }
}

/// Search for one block. Returns the best solution found, if any.
fn run_search(block: &PhaseBlock, cfg: &EngineConfig, hw: Option<HwContext>, bound: Option<u32>, stats: &mut BlockStats) -> Option<Solution> {
    let start = Instant::now();
    let (s, jm) = Searcher::new(block, hw);
    let root = s.root(jm);
    let mut queue: BoundedQueue<Key, Node> = BoundedQueue::new(cfg.queue_capacity);
    let mut seen: HashMap<u64, u32> = HashMap::new();
    seen.insert(root.state_hash(), root.g);
    queue.push(s.key(&root), root);
    let mut best: Option<Solution> = None;
    let mut pops = 0u64;
    let within = |g: u32| bound.is_none_or(|b| g <= b);
    let mut push = |queue: &mut BoundedQueue<Key, Node>, child: Node| {
        if !within(child.g) {
            return;
        }
        let h = child.state_hash();
        match seen.get(&h) {
            Some(&g0) if g0 <= child.g => {}
            _ => {
                seen.insert(h, child.g);
                let k = s.key(&child);
                queue.push(k, child);
            }
        }
    };
    while let Some((_, node)) = queue.pop() {
        pops += 1;
        if pops.is_multiple_of(64) && start.elapsed() > cfg.per_block_timeout {
            stats.timed_out = true;
            break;
        }
        if s.is_goal(&node) {
            let (sol, conts) = s.finish(&node);
            if let Some(sol) = sol {
                if within(sol.g) {
                    stats.solutions += 1;
                    let total = sol.gates.len();
                    let better = match &best {
                        None => true,
                        Some(b) => (sol.g, total) < (b.g, b.gates.len()),
                    };
                    if better {
                        best = Some(sol);
                    }
                    if stats.solutions as usize >= cfg.solution_count {
                        break;
                    }
                }
            }
            for c in conts {
                push(&mut queue, c);
            }
            continue;
        }
        stats.nodes_expanded += 1;
        for child in s.expand(&node) {
            push(&mut queue, child);
        }
    }
    stats.nodes_dropped = queue.dropped() as u64;
    best
}

/// Rotation-merged replay, routed with SWAPs in hardware mode.
fn fallback(block: &PhaseBlock, hw: Option<&HwContext>) -> Solution {
    let gates = block.rotation_merged();
    let Some(hw) = hw else {
        let cnots = gates.iter().filter(|g| matches!(g, Gate::Cnot { .. })).count() as u32;
        let swaps = gates.iter().filter(|g| matches!(g, Gate::Swap(..))).count() as u32;
        return Solution { gates, g: cnots + 3 * swaps, cnots, swaps, map: None };
    };
    let mut map = hw.initial.clone();
    let mut out = Vec::new();
    let (mut cnots, mut swaps) = (0u32, 0u32);
    for g in gates {
        match g {
            Gate::Cnot { control, target } => {
                loop {
                    let (pc, pt) = (map.phys(control), map.phys(target));
                    if hw.graph.is_adjacent(pc, pt) {
                        break;
                    }
                    let next = hw.graph.shortest_path(pc, pt)[1];
                    map.swap_physical(pc, next);
                    out.push(Gate::Swap(pc, next));
                    swaps += 1;
                }
                out.push(Gate::cnot(map.phys(control), map.phys(target)));
                cnots += 1;
            }
            Gate::Swap(a, b) => {
                let (pa, pb) = (map.phys(a), map.phys(b));
                let (la, lb) = (map.logical(pa), map.logical(pb));
                let mut l2p = map.l2p().to_vec();
                l2p.swap(la, lb);
                map = Mapping::from_l2p(l2p);
            }
            g => out.push(g.relabel(|q| map.phys(q))),
        }
    }
    Solution { gates: out, g: cnots + 3 * swaps, cnots, swaps, map: Some(map) }
}

/// Searches one block and falls back to the rotation-merged replay unless
/// the search result is at least as good on both CNOT and total gate count.
pub(crate) fn synthesize(block: &PhaseBlock, cfg: &EngineConfig, hw: Option<HwContext>, bound: Option<u32>) -> BlockSynthesis {
    let start = Instant::now();
    let mut stats = BlockStats { qubits: block.rows(), terms: block.terms.len(), stages: block.stage_count(), ..Default::default() };
    let fb = fallback(block, hw.as_ref());
    let found = run_search(block, cfg, hw, bound, &mut stats);
    let chosen = match found {
        Some(c) if c.g <= fb.g && c.gates.len() <= fb.gates.len() => c,
        _ => {
            stats.used_fallback = true;
            fb
        }
    };
    stats.cnots = chosen.cnots as usize;
    stats.swaps = chosen.swaps as usize;
    stats.gates = chosen.gates.len();
    stats.wall_time_s = start.elapsed().as_secs_f64();
    BlockSynthesis { gates: chosen.gates, stats, final_mapping: chosen.map }
}

/// Synthesizes one block for all-to-all connectivity.
pub fn synthesize_block(block: &PhaseBlock, cfg: &EngineConfig) -> BlockSynthesis {
    synthesize(block, cfg, None, None)
}

/// Plain search without the fallback guard.
pub(crate) fn search_only(block: &PhaseBlock, cfg: &EngineConfig, hw: Option<HwContext>) -> (Option<Vec<Gate>>, BlockStats) {
    let start = Instant::now();
    let mut stats = BlockStats { qubits: block.rows(), terms: block.terms.len(), stages: block.stage_count(), ..Default::default() };
    let found = run_search(block, cfg, hw, None, &mut stats);
    if let Some(s) = &found {
        stats.cnots = s.cnots as usize;
        stats.swaps = s.swaps as usize;
        stats.gates = s.gates.len();
    }
    stats.wall_time_s = start.elapsed().as_secs_f64();
    (found.map(|s| s.gates), stats)
}
