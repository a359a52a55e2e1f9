//! Reported metrics and benchmark tables.

use crate::circuit::Circuit;
use crate::engine::BlockStats;
use crate::engine::EngineConfig;
use crate::pipeline::optimize_circuit;
use crate::qasm::{emit_qasm, parse_qasm, QasmError};
use crate::verify::{unitary_equal, MAX_DENSE_QUBITS};
use rayon::prelude::*;
use std::time::Instant;
use serde::Serialize;
use std::fmt::Write;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Metrics {
    pub schema: u32,
    pub circuit: String,
    pub qubits: usize,
    pub total_gates: usize,
    pub cnot_count: usize,
    pub rz_count: usize,
    pub swap_count: usize,
    pub weighted_cnot: usize,
    pub wall_time_s: f64,
    pub verified: Option<bool>,
    /// Logical-to-physical placement, hardware mode only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_mapping: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_mapping: Option<Vec<usize>>,
    pub blocks: Vec<BlockStats>,
}

impl Metrics {
    /// Counts taken from an emitted QASM text, re-parsed.
    pub fn from_emitted(name: &str, qasm: &str, wall_time_s: f64, verified: Option<bool>, blocks: Vec<BlockStats>) -> Result<Self, QasmError> {
        let c = parse_qasm(qasm)?;
        Ok(Self::from_circuit(name, &c, wall_time_s, verified, blocks))
    }

    pub fn from_circuit(name: &str, c: &Circuit, wall_time_s: f64, verified: Option<bool>, blocks: Vec<BlockStats>) -> Self {
        let k = c.counts();
        Metrics {
            schema: SCHEMA_VERSION,
            circuit: name.to_string(),
            qubits: c.qubit_count,
            total_gates: k.total,
            cnot_count: k.cnot,
            rz_count: k.rz,
            swap_count: k.swap,
            weighted_cnot: k.weighted_cnot(),
            wall_time_s,
            verified,
            initial_mapping: None,
            final_mapping: None,
            blocks,
        }
    }
}

/// One line of a benchmark report.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub circuit: String,
    pub qubits: usize,
    pub orig_gates: usize,
    pub orig_cx: usize,
    pub opt_gates: usize,
    pub opt_cx: usize,
    pub verified: Option<bool>,
    pub time_s: f64,
}

/// Optimizes every circuit in parallel and reports counts re-parsed from the
/// emitted QASM. `verify` runs the unitary check on circuits of at most
/// [`MAX_DENSE_QUBITS`] qubits.
pub fn run_bench(circuits: &[Circuit], group_size: usize, cfg: &EngineConfig, verify: bool) -> Vec<BenchRow> {
    circuits
        .par_iter()
        .map(|c| {
            let t = Instant::now();
            let r = optimize_circuit(c, group_size, cfg);
            let time_s = t.elapsed().as_secs_f64();
            let emitted = parse_qasm(&emit_qasm(&r.circuit, false)).expect("emitted QASM parses");
            let verified = (verify && c.qubit_count <= MAX_DENSE_QUBITS).then(|| unitary_equal(c, &emitted, None, 1e-9).unwrap_or(false));
            let (o, n) = (c.counts(), emitted.counts());
            BenchRow { circuit: c.name.clone(), qubits: c.qubit_count, orig_gates: o.total, orig_cx: o.cnot, opt_gates: n.total, opt_cx: n.cnot, verified, time_s }
        })
        .collect()
}

/// Percentage reduction from `orig` to `opt`.
pub fn reduction_pct(orig: usize, opt: usize) -> f64 {
    if orig == 0 {
        0.0
    } else {
        100.0 * (orig as f64 - opt as f64) / orig as f64
    }
}

/// Reduction of the geometric mean of the `opt/orig` ratios, in percent.
pub fn geomean_reduction_pct(pairs: &[(usize, usize)]) -> f64 {
    let ratios: Vec<f64> = pairs.iter().filter(|(o, _)| *o > 0).map(|&(o, n)| n as f64 / o as f64).collect();
    if ratios.is_empty() {
        return 0.0;
    }
    let mean_ln = ratios.iter().map(|r| r.max(f64::MIN_POSITIVE).ln()).sum::<f64>() / ratios.len() as f64;
    100.0 * (1.0 - mean_ln.exp())
}

pub const CSV_HEADER: &str = "circuit,qubits,orig_gates,orig_cx,opt_gates,opt_cx,gate_red_pct,cx_red_pct,verified,time_s";

/// CSV with a trailing geometric-mean row when there is at least one row.
pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut s = String::new();
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let v = r.verified.map_or("n/a".to_string(), |b| b.to_string());
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{:.2},{:.2},{},{:.3}",
            r.circuit,
            r.qubits,
            r.orig_gates,
            r.orig_cx,
            r.opt_gates,
            r.opt_cx,
            reduction_pct(r.orig_gates, r.opt_gates),
            reduction_pct(r.orig_cx, r.opt_cx),
            v,
            r.time_s
        );
    }
    if !rows.is_empty() {
        let g: Vec<_> = rows.iter().map(|r| (r.orig_gates, r.opt_gates)).collect();
        let c: Vec<_> = rows.iter().map(|r| (r.orig_cx, r.opt_cx)).collect();
        let t: f64 = rows.iter().map(|r| r.time_s).sum();
        let _ = writeln!(s, "geomean,,,,,,{:.2},{:.2},,{:.3}", geomean_reduction_pct(&g), geomean_reduction_pct(&c), t);
    }
    s
}

/// Fixed-width table for terminals.
pub fn bench_table(rows: &[BenchRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<16} {:>3} {:>7} {:>6} {:>7} {:>6} {:>8} {:>8} {:>8} {:>8}", "circuit", "n", "gates", "cx", "opt", "opt_cx", "gate%", "cx%", "verified", "time_s");
    for r in rows {
        let v = r.verified.map_or("n/a".to_string(), |b| b.to_string());
        let _ = writeln!(
            s,
            "{:<16} {:>3} {:>7} {:>6} {:>7} {:>6} {:>8.2} {:>8.2} {:>8} {:>8.2}",
            r.circuit,
            r.qubits,
            r.orig_gates,
            r.orig_cx,
            r.opt_gates,
            r.opt_cx,
            reduction_pct(r.orig_gates, r.opt_gates),
            reduction_pct(r.orig_cx, r.opt_cx),
            v,
            r.time_s
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_matches_published_percentage() {
        assert!((reduction_pct(45, 35) - 22.22).abs() < 0.01);
    }

    #[test]
    fn empty_report_is_header_only() {
        assert_eq!(bench_csv(&[]), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn geomean_of_equal_ratios() {
        assert!((geomean_reduction_pct(&[(10, 5), (20, 10)]) - 50.0).abs() < 1e-9);
    }
}
