mod common;

use common::*;
use phasepoly::verify::connectivity_violations;
use phasepoly::{hw_optimize, linear_template, optimize_circuit, parse_qasm, partition, unitary_equal, Circuit, CouplingGraph, EngineConfig, Gate};

fn quick() -> EngineConfig {
    EngineConfig { solution_count: 500, ..EngineConfig::default() }
}

#[test]
fn complete_graph_matches_logical_counts() {
    for src in [TOFFOLI, NONADJ_PARITY, "qreg q[3]; cx q[0],q[2]; rz(pi/4) q[2]; cx q[1],q[0]; rz(pi/2) q[0]; h q[1]; cx q[2],q[1];"] {
        let c = parse_qasm(src).unwrap();
        let g = CouplingGraph::complete(c.qubit_count);
        let cfg = EngineConfig::default();
        let hw = hw_optimize(&c, &g, 1, &cfg).unwrap();
        let lo = optimize_circuit(&c, 1, &cfg);
        assert_eq!(hw.circuit.counts(), lo.circuit.counts(), "{src}");
        assert!(hw.verify(&c, 1e-9).unwrap());
    }
}

#[test]
fn nonadj_source_needs_routing() {
    let c = parse_qasm(NONADJ_PARITY).unwrap();
    let g = CouplingGraph::line(4);
    assert_eq!(connectivity_violations(&c, &g), vec![1, 3]);
}

#[test]
fn nonadj_adjacent_optimum_is_four_by_bfs() {
    let moves = directed(&[(0, 1), (1, 2), (2, 3)]);
    assert_eq!(bfs_min_cnots_on(4, &[0b0111], &moves), 4);
    assert_eq!(bfs_min_cnots(4, &[0b0111]), 4);
}

#[test]
fn nonadj_compiles_without_swaps() {
    let c = parse_qasm(NONADJ_PARITY).unwrap();
    let g = CouplingGraph::line(4);
    let r = hw_optimize(&c, &g, 1, &EngineConfig::default()).unwrap();
    let k = r.circuit.counts();
    assert_eq!((k.cnot, k.swap), (4, 0));
    assert!(connectivity_violations(&r.circuit, &g).is_empty());
    assert!(r.verify(&c, 1e-9).unwrap());
}

fn toffoli_on_line(line: &[usize]) -> Circuit {
    let c = parse_qasm(TOFFOLI).unwrap();
    let p = partition(&c);
    assert_eq!(p.blocks.len(), 1);
    let body = linear_template(&p.blocks[0], line, &EngineConfig::default()).unwrap();
    let mut gates = p.prefix.clone();
    gates.extend(body);
    gates.extend(p.blocks[0].barrier_gates.iter().cloned());
    Circuit::with_gates(3, gates)
}

#[test]
fn linear_toffoli_uses_eight_adjacent_cnots() {
    let ccx = parse_qasm(TOFFOLI).unwrap();
    let line = [0, 2, 1];
    let t = toffoli_on_line(&line);
    let pos = |q: usize| line.iter().position(|&l| l == q).unwrap();
    for g in &t.gates {
        if let Gate::Cnot { control, target } = g {
            assert_eq!(pos(*control).abs_diff(pos(*target)), 1, "{g:?}");
        }
    }
    assert!(cnot_count(&t.gates) <= 8);
    assert!(unitary_equal(&ccx, &t, None, 1e-9).unwrap());
}

#[test]
fn linear_toffoli_every_order() {
    let ccx = parse_qasm(TOFFOLI).unwrap();
    for line in [[0, 1, 2], [1, 0, 2], [0, 2, 1]] {
        let t = toffoli_on_line(&line);
        assert!(cnot_count(&t.gates) <= 8, "{line:?}: {}", cnot_count(&t.gates));
        assert!(unitary_equal(&ccx, &t, None, 1e-9).unwrap());
    }
}

#[test]
fn random_circuits_pass_the_audit() {
    let mut r = rng(11);
    let graphs = [CouplingGraph::line(5), CouplingGraph::grid(2, 3)];
    for i in 0..12 {
        let g = &graphs[i % 2];
        let n = 3 + i % 3;
        let c = random_circuit(&mut r, n, 25);
        let out = hw_optimize(&c, g, 1, &quick()).unwrap();
        assert!(connectivity_violations(&out.circuit, g).is_empty());
        assert!(out.verify(&c, 1e-9).unwrap());
    }
}
