//! Phase-polynomial resynthesis of `{CNOT, Rz}` regions in quantum circuits.
//!
//! A circuit is cut into phase-polynomial blocks at non-phase gates, each
//! block is turned into a joint parity matrix and re-synthesized by a
//! capacity-bounded best-first search, and the blocks are stitched back
//! together. An optional coupling graph restricts CNOTs to adjacent
//! physical qubits.

pub mod angle;
pub mod bits;
pub mod circuit;
pub mod engine;
pub mod hardware;
pub mod ir;
pub mod metrics;
pub mod parity;
pub mod pipeline;
pub mod qasm;
pub mod search;
pub mod suite;
pub mod verify;

pub use angle::Angle;
pub use bits::{BitMatrix, BitVec};
pub use circuit::{Circuit, Gate, GateCounts};
pub use engine::{synthesize_block, BlockStats, BlockSynthesis, EngineConfig};
pub use hardware::{linear_template, CouplingGraph, Mapping};
pub use ir::{merge_blocks, partition, rotation_merge, PhaseBlock};
pub use parity::JointParityMatrix;
pub use pipeline::{hw_optimize, optimize_circuit, BlockRecord, HwOptimized, Optimized};
pub use qasm::{emit_qasm, parse_qasm, QasmError};
pub use verify::{canonical_form, unitary_equal, CanonicalForm};

/// Exact search cost; hardware distances are normalized by column size.
pub type Cost = num_rational::Ratio<i64>;

/// Dense unitary in double precision.
pub type Unitary64 = verify::DenseUnitary<f64>;
/// Dense unitary in single precision.
pub type Unitary32 = verify::DenseUnitary<f32>;
