//! Equivalence oracles: phase-polynomial canonical forms and dense unitaries.
//!
//! Nothing here shares code with the synthesis path.

use crate::angle::Angle;
use crate::bits::{BitMatrix, BitVec};
use crate::circuit::{Circuit, Gate};
use num_complex::Complex;
use num_traits::{Float, FromPrimitive};
use std::collections::BTreeMap;
use std::fmt::Debug;
use thiserror::Error;

/// Largest register the dense simulator accepts.
pub const MAX_DENSE_QUBITS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("gate {index} ({gate}) is not a phase-polynomial gate")]
    NonPhasePolyGate { index: usize, gate: String },
    #[error("{0} qubits exceed the dense simulation limit")]
    TooLarge(usize),
    #[error("qubit counts differ ({0} vs {1})")]
    Mismatch(usize, usize),
}

/// Sum-over-paths description of a `{CNOT, Rz, X, SWAP}` circuit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    /// Sorted by parity; no zero angles, no repeated parities.
    pub terms: Vec<(BitVec, Angle)>,
    /// Row `q` is the input parity that qubit `q` ends up holding.
    pub output_map: BitMatrix,
    pub affine: BitVec,
    pub global_phase: Angle,
}

impl CanonicalForm {
    pub fn eq_up_to_phase(&self, other: &CanonicalForm) -> bool {
        self.terms.len() == other.terms.len()
            && self.terms.iter().zip(&other.terms).all(|(a, b)| a.0 == b.0 && a.1.approx_eq(&b.1))
            && self.output_map == other.output_map
            && self.affine == other.affine
    }
}

fn gate_name(g: &Gate) -> String {
    match g {
        Gate::Cnot { .. } => "cx".into(),
        Gate::Rz { .. } => "rz".into(),
        Gate::H(_) => "h".into(),
        Gate::X(_) => "x".into(),
        Gate::Swap(..) => "swap".into(),
        Gate::Other1q { name, .. } => name.clone(),
    }
}

/// Forward simulation of parities and affine constants.
pub fn canonical_form(c: &Circuit) -> Result<CanonicalForm, VerifyError> {
    let n = c.qubit_count;
    let mut par: Vec<BitVec> = (0..n).map(|q| BitVec::unit(n, q)).collect();
    let mut aff = vec![false; n];
    let mut terms: BTreeMap<BitVec, Angle> = BTreeMap::new();
    let mut global = Angle::ZERO;
    for (index, g) in c.gates.iter().enumerate() {
        match g {
            Gate::Cnot { control, target } => {
                let p = par[*control].clone();
                par[*target].xor_assign(&p);
                aff[*target] ^= aff[*control];
            }
            Gate::X(q) => aff[*q] ^= true,
            Gate::Swap(a, b) => {
                par.swap(*a, *b);
                aff.swap(*a, *b);
            }
            Gate::Rz { qubit, angle } => {
                let a = if aff[*qubit] {
                    global = global + *angle;
                    -*angle
                } else {
                    *angle
                };
                let e = terms.entry(par[*qubit].clone()).or_insert(Angle::ZERO);
                *e = *e + a;
            }
            _ => return Err(VerifyError::NonPhasePolyGate { index, gate: gate_name(g) }),
        }
    }
    Ok(CanonicalForm {
        terms: terms.into_iter().filter(|(_, a)| !a.is_zero()).collect(),
        output_map: BitMatrix { rows: par, cols: n },
        affine: BitVec::from_bools(&aff),
        global_phase: global,
    })
}

/// A variable of the SSA form: (logical qubit, version).
pub type SsaVar = (usize, u32);

/// An affine value over SSA variables: sorted variables plus a constant.
pub type SsaValue = (Vec<SsaVar>, bool);

/// Canonical form of a circuit whose non-phase gates are opaque barriers.
///
/// Every barrier records the value its qubit held and gives the qubit a
/// fresh variable. Outputs and barriers are indexed by logical qubit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SsaForm {
    pub terms: Vec<(Vec<SsaVar>, Angle)>,
    pub barriers: Vec<(String, usize, SsaValue)>,
    pub outputs: Vec<SsaValue>,
    pub global_phase: Angle,
}

impl SsaForm {
    pub fn eq_up_to_phase(&self, other: &SsaForm) -> bool {
        self.terms.len() == other.terms.len()
            && self.terms.iter().zip(&other.terms).all(|(a, b)| a.0 == b.0 && a.1.approx_eq(&b.1))
            && self.barriers == other.barriers
            && self.outputs == other.outputs
    }
}

fn xor_into(dst: &mut Vec<SsaVar>, src: &[SsaVar]) {
    let mut out = Vec::with_capacity(dst.len() + src.len());
    let (mut i, mut j) = (0, 0);
    while i < dst.len() || j < src.len() {
        match (dst.get(i), src.get(j)) {
            (Some(a), Some(b)) if a == b => {
                i += 1;
                j += 1;
            }
            (Some(a), Some(b)) if a < b => {
                out.push(*a);
                i += 1;
            }
            (Some(_), Some(b)) | (None, Some(b)) => {
                out.push(*b);
                j += 1;
            }
            (Some(a), None) => {
                out.push(*a);
                i += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    *dst = out;
}

/// SSA form of `gates` acting on `wires` wires.
///
/// `labels[w]` is the logical qubit initially on wire `w`. With
/// `swaps_move_labels`, a SWAP carries the logical identities along
/// (a routing SWAP); otherwise it is an ordinary linear gate.
pub fn ssa_form(gates: &[Gate], labels: &[usize], swaps_move_labels: bool) -> SsaForm {
    let wires = labels.len();
    let mut label = labels.to_vec();
    let mut val: Vec<SsaValue> = (0..wires).map(|w| (vec![(label[w], 0)], false)).collect();
    let mut version: BTreeMap<usize, u32> = BTreeMap::new();
    let mut terms: BTreeMap<Vec<SsaVar>, Angle> = BTreeMap::new();
    let mut barriers = Vec::new();
    let mut global = Angle::ZERO;
    for g in gates {
        match g {
            Gate::Cnot { control, target } => {
                let (p, a) = val[*control].clone();
                xor_into(&mut val[*target].0, &p);
                val[*target].1 ^= a;
            }
            Gate::X(q) => val[*q].1 ^= true,
            Gate::Swap(a, b) => {
                val.swap(*a, *b);
                if swaps_move_labels {
                    label.swap(*a, *b);
                }
            }
            Gate::Rz { qubit, angle } => {
                let (p, aff) = &val[*qubit];
                let a = if *aff {
                    global = global + *angle;
                    -*angle
                } else {
                    *angle
                };
                let e = terms.entry(p.clone()).or_insert(Angle::ZERO);
                *e = *e + a;
            }
            Gate::H(q) | Gate::Other1q { qubit: q, .. } => {
                let l = label[*q];
                barriers.push((gate_name(g), l, val[*q].clone()));
                let v = version.entry(l).or_insert(0);
                *v += 1;
                val[*q] = (vec![(l, *v)], false);
            }
        }
    }
    let mut outputs = vec![(Vec::new(), false); wires];
    for w in 0..wires {
        outputs[label[w]] = val[w].clone();
    }
    SsaForm {
        terms: terms.into_iter().filter(|(_, a)| !a.is_zero()).collect(),
        barriers,
        outputs,
        global_phase: global,
    }
}

/// Scalar type accepted by the dense simulator.
pub trait Real: Float + FromPrimitive + Debug + Send + Sync + 'static {}

impl Real for f32 {}
impl Real for f64 {}

/// Dense `2ⁿ × 2ⁿ` matrix, column-major. Qubit `q` is bit `q` of a basis index.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseUnitary<T: Real> {
    pub qubits: usize,
    pub data: Vec<Complex<T>>,
}

fn phase<T: Real>(a: &Angle) -> Complex<T> {
    let x = T::from_f64(a.radians()).expect("representable angle");
    Complex::new(x.cos(), x.sin())
}

impl<T: Real> DenseUnitary<T> {
    pub fn identity(qubits: usize) -> Self {
        let d = 1usize << qubits;
        let mut data = vec![Complex::new(T::zero(), T::zero()); d * d];
        for i in 0..d {
            data[i * d + i] = Complex::new(T::one(), T::zero());
        }
        DenseUnitary { qubits, data }
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.data[col * self.dim() + row]
    }

    /// Left-multiplies by `g`. Rz is `diag(1, e^{iθ})`.
    pub fn apply(&mut self, g: &Gate) {
        let d = self.dim();
        for col in self.data.chunks_mut(d) {
            match g {
                Gate::Cnot { control, target } => {
                    let (c, t) = (1 << control, 1 << target);
                    for i in 0..d {
                        if i & c != 0 && i & t == 0 {
                            col.swap(i, i | t);
                        }
                    }
                }
                Gate::Swap(a, b) => {
                    let (a, b) = (1 << a, 1 << b);
                    for i in 0..d {
                        if i & a != 0 && i & b == 0 {
                            col.swap(i, (i & !a) | b);
                        }
                    }
                }
                Gate::X(q) => {
                    let m = 1 << q;
                    for i in 0..d {
                        if i & m == 0 {
                            col.swap(i, i | m);
                        }
                    }
                }
                Gate::Rz { qubit, angle } => {
                    let m = 1 << qubit;
                    let p = phase::<T>(angle);
                    for (i, v) in col.iter_mut().enumerate() {
                        if i & m != 0 {
                            *v = *v * p;
                        }
                    }
                }
                Gate::H(q) => {
                    let m = 1 << q;
                    let s = T::from_f64(std::f64::consts::FRAC_1_SQRT_2).expect("representable");
                    for i in 0..d {
                        if i & m == 0 {
                            let (a, b) = (col[i], col[i | m]);
                            col[i] = (a + b) * s;
                            col[i | m] = (a - b) * s;
                        }
                    }
                }
                Gate::Other1q { name, qubit } => {
                    let m = 1 << qubit;
                    let p = match name.as_str() {
                        "t" => Some(Angle::pi_frac(1, 4)),
                        "tdg" => Some(Angle::pi_frac(-1, 4)),
                        "s" => Some(Angle::pi_frac(1, 2)),
                        "sdg" => Some(Angle::pi_frac(-1, 2)),
                        "z" => Some(Angle::pi_frac(1, 1)),
                        _ => None,
                    }
                    .unwrap_or_else(|| panic!("no matrix for gate `{name}`"));
                    let p = phase::<T>(&p);
                    for (i, v) in col.iter_mut().enumerate() {
                        if i & m != 0 {
                            *v = *v * p;
                        }
                    }
                }
            }
        }
    }

    pub fn of_circuit(c: &Circuit) -> Result<Self, VerifyError> {
        if c.qubit_count > MAX_DENSE_QUBITS {
            return Err(VerifyError::TooLarge(c.qubit_count));
        }
        let mut u = Self::identity(c.qubit_count);
        for g in &c.gates {
            u.apply(g);
        }
        Ok(u)
    }

    /// The matrix with output qubit `perm[q]` moved back to position `q`.
    pub fn permute_outputs(&self, perm: &[usize]) -> Self {
        let d = self.dim();
        let mut out = self.clone();
        for x in 0..d {
            let mut y = 0;
            for (q, &p) in perm.iter().enumerate() {
                if x >> p & 1 == 1 {
                    y |= 1 << q;
                }
            }
            for col in 0..d {
                out.data[col * d + y] = self.data[col * d + x];
            }
        }
        out
    }

    /// Max-norm distance after aligning global phase on the largest entry of `self`.
    pub fn distance_up_to_phase(&self, other: &Self) -> T {
        let (idx, _) = self
            .data
            .iter()
            .enumerate()
            .fold((0, T::zero()), |(bi, bn), (i, z)| if z.norm() > bn { (i, z.norm()) } else { (bi, bn) });
        let a = self.data[idx];
        let b = other.data[idx];
        if b.norm() <= T::epsilon() {
            return T::infinity();
        }
        let ratio = b / a;
        let ph = ratio / ratio.norm();
        self.data.iter().zip(&other.data).map(|(x, y)| (*x * ph - *y).norm()).fold(T::zero(), T::max)
    }
}

/// Whether `a` and `b` implement the same unitary up to global phase.
///
/// With `perm`, qubit `q` of `a` is compared against qubit `perm[q]` of `b`'s output.
pub fn unitary_equal_with<T: Real>(a: &Circuit, b: &Circuit, perm: Option<&[usize]>, tol: T) -> Result<bool, VerifyError> {
    if a.qubit_count != b.qubit_count {
        return Err(VerifyError::Mismatch(a.qubit_count, b.qubit_count));
    }
    let ua = DenseUnitary::<T>::of_circuit(a)?;
    let mut ub = DenseUnitary::<T>::of_circuit(b)?;
    if let Some(p) = perm {
        ub = ub.permute_outputs(p);
    }
    Ok(ua.distance_up_to_phase(&ub) < tol)
}

/// [`unitary_equal_with`] in double precision.
pub fn unitary_equal(a: &Circuit, b: &Circuit, perm: Option<&[usize]>, tol: f64) -> Result<bool, VerifyError> {
    unitary_equal_with::<f64>(a, b, perm, tol)
}

/// Two-qubit gates that do not sit on a coupling edge.
pub fn connectivity_violations(c: &Circuit, graph: &crate::hardware::CouplingGraph) -> Vec<usize> {
    c.gates
        .iter()
        .enumerate()
        .filter(|(_, g)| match g {
            Gate::Cnot { control: a, target: b } | Gate::Swap(a, b) => !graph.is_adjacent(*a, *b),
            _ => false,
        })
        .map(|(i, _)| i)
        .collect()
}
