mod common;

use common::*;
use phasepoly::{partition, synthesize_block, EngineConfig};

/// Every set of 1 to 3 distinct non-zero parities over 3 qubits.
fn term_sets() -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for a in 1..8u32 {
        out.push(vec![a]);
        for b in a + 1..8 {
            out.push(vec![a, b]);
            for c in b + 1..8 {
                out.push(vec![a, b, c]);
            }
        }
    }
    out
}

fn engine_cnots(terms: &[u32]) -> usize {
    let spec: Vec<_> = terms.iter().map(|&m| (m, pi4(1))).collect();
    let c = term_circuit(3, &spec);
    let p = partition(&c);
    assert_eq!(p.blocks.len(), 1);
    let block = &p.blocks[0];
    let r = synthesize_block(block, &EngineConfig::default());
    assert!(block_matches(block, &r.gates, 3));
    cnot_count(&r.gates)
}

#[test]
fn enumeration_has_63_instances() {
    assert_eq!(term_sets().len(), 63);
}

#[test]
fn bfs_minima_are_frozen() {
    let mut hist = [0usize; 8];
    for t in term_sets() {
        hist[bfs_min_cnots(3, &t)] += 1;
    }
    assert_eq!(hist, [7, 0, 21, 0, 34, 1, 0, 0]);
}

#[test]
fn engine_matches_bfs_on_micro_blocks() {
    let mut exact = 0;
    let sets = term_sets();
    for t in &sets {
        let best = bfs_min_cnots(3, t);
        let got = engine_cnots(t);
        assert!(got <= best + 1, "{t:?}: engine {got}, optimum {best}");
        if got == best {
            exact += 1;
        }
    }
    assert!(exact * 100 >= sets.len() * 95, "{exact}/{}", sets.len());
}
