//! Connectivity-constrained templates for recurring blocks.

use super::coupling::{CouplingGraph, Mapping};
use crate::circuit::Gate;
use crate::engine::{search_only, EngineConfig, HwContext};
use crate::ir::PhaseBlock;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemplateError {
    #[error("line must list exactly the block's qubits")]
    BadLine,
    #[error("no adjacent-only solution found within the budget")]
    Timeout,
}

/// Re-synthesizes `block` using CNOTs between neighbours of `line` only,
/// without SWAPs. `line` lists the block's qubits in path order.
pub fn linear_template(block: &PhaseBlock, line: &[usize], cfg: &EngineConfig) -> Result<Vec<Gate>, TemplateError> {
    let mut sorted = line.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted != block.qubits || sorted.len() != line.len() {
        return Err(TemplateError::BadLine);
    }
    let pos = |q: usize| line.iter().position(|&l| l == q).expect("qubit on line");
    let relabel = |gs: &[Gate]| -> Vec<Gate> { gs.iter().map(|g| g.relabel(pos)).collect() };
    let stages = block.stages.iter().map(|s| relabel(s)).collect();
    let inner = block.boundaries.iter().map(|b| relabel(&b.gates)).collect();
    let local = PhaseBlock::build(stages, inner, Vec::new());
    let graph = CouplingGraph::line(line.len());
    let hw = HwContext { graph: &graph, initial: Mapping::identity(line.len()), allow_swaps: false };
    let (found, _) = search_only(&local, cfg, Some(hw));
    let gates = found.ok_or(TemplateError::Timeout)?;
    Ok(gates.iter().map(|g| g.relabel(|p| line[p])).collect())
}
