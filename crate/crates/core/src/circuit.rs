//! Gate and circuit types.

use crate::angle::Angle;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    Cnot { control: usize, target: usize },
    Rz { qubit: usize, angle: Angle },
    H(usize),
    X(usize),
    Swap(usize, usize),
    Other1q { name: String, qubit: usize },
}

impl Gate {
    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::Cnot { control, target }
    }

    pub fn rz(qubit: usize, angle: Angle) -> Self {
        Gate::Rz { qubit, angle }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Swap(a, b) => vec![*a, *b],
            Gate::Rz { qubit, .. } | Gate::Other1q { qubit, .. } => vec![*qubit],
            Gate::H(q) | Gate::X(q) => vec![*q],
        }
    }

    /// CNOT, Rz, X and SWAP are kept inside phase-polynomial blocks.
    pub fn is_phase_gate(&self) -> bool {
        matches!(self, Gate::Cnot { .. } | Gate::Rz { .. } | Gate::X(_) | Gate::Swap(..))
    }

    /// The same gate with every qubit index passed through `f`.
    pub fn relabel(&self, f: impl Fn(usize) -> usize) -> Gate {
        match self {
            Gate::Cnot { control, target } => Gate::cnot(f(*control), f(*target)),
            Gate::Rz { qubit, angle } => Gate::rz(f(*qubit), *angle),
            Gate::H(q) => Gate::H(f(*q)),
            Gate::X(q) => Gate::X(f(*q)),
            Gate::Swap(a, b) => Gate::Swap(f(*a), f(*b)),
            Gate::Other1q { name, qubit } => Gate::Other1q { name: name.clone(), qubit: f(*qubit) },
        }
    }

    /// The adjoint gate.
    pub fn inverse(&self) -> Gate {
        match self {
            Gate::Rz { qubit, angle } => Gate::rz(*qubit, -*angle),
            Gate::Other1q { name, qubit } => {
                let name = match name.as_str() {
                    n if n.ends_with("dg") => n.trim_end_matches("dg").to_string(),
                    n => format!("{n}dg"),
                };
                Gate::Other1q { name, qubit: *qubit }
            }
            g => g.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Circuit {
    pub name: String,
    pub qubit_count: usize,
    pub gates: Vec<Gate>,
}

/// Gate tallies of a circuit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GateCounts {
    pub total: usize,
    pub cnot: usize,
    pub rz: usize,
    pub swap: usize,
}

impl GateCounts {
    /// CNOTs plus three per SWAP.
    pub fn weighted_cnot(&self) -> usize {
        self.cnot + 3 * self.swap
    }
}

impl Circuit {
    pub fn new(qubit_count: usize) -> Self {
        Circuit { name: String::new(), qubit_count, gates: Vec::new() }
    }

    pub fn with_gates(qubit_count: usize, gates: Vec<Gate>) -> Self {
        Circuit { name: String::new(), qubit_count, gates }
    }

    pub fn counts(&self) -> GateCounts {
        let mut c = GateCounts { total: self.gates.len(), ..Default::default() };
        for g in &self.gates {
            match g {
                Gate::Cnot { .. } => c.cnot += 1,
                Gate::Rz { .. } => c.rz += 1,
                Gate::Swap(..) => c.swap += 1,
                _ => {}
            }
        }
        c
    }

    /// The adjoint circuit: reversed order, each gate inverted.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            name: self.name.clone(),
            qubit_count: self.qubit_count,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    /// Relabels qubit `q` to `perm[q]` on a register of `qubit_count` qubits.
    pub fn relabeled(&self, perm: &[usize], qubit_count: usize) -> Circuit {
        Circuit {
            name: self.name.clone(),
            qubit_count,
            gates: self.gates.iter().map(|g| g.relabel(|q| perm[q])).collect(),
        }
    }

    /// Replaces every SWAP by three CNOTs.
    pub fn decompose_swaps(&self) -> Circuit {
        let mut gates = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            match g {
                Gate::Swap(a, b) => {
                    gates.push(Gate::cnot(*a, *b));
                    gates.push(Gate::cnot(*b, *a));
                    gates.push(Gate::cnot(*a, *b));
                }
                g => gates.push(g.clone()),
            }
        }
        Circuit { name: self.name.clone(), qubit_count: self.qubit_count, gates }
    }
}
