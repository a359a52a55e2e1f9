//! OpenQASM 2.0 subset reader and writer.

use crate::angle::Angle;
use crate::circuit::{Circuit, Gate};
use num_rational::Rational64;
use num_traits::Zero;
use std::fmt::Write;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QasmError {
    #[error("line {line}: unsupported gate or statement `{name}`")]
    UnsupportedGate { name: String, line: usize },
    #[error("line {line}: syntax error: {message}")]
    SyntaxError { line: usize, message: String },
    #[error("line {line}: only one quantum register is supported")]
    MultipleRegisters { line: usize },
}

fn syntax(line: usize, message: impl Into<String>) -> QasmError {
    QasmError::SyntaxError { line, message: message.into() }
}

/// Splits the source into `;`-terminated statements tagged with their starting line.
fn statements(text: &str) -> Result<Vec<(usize, String)>, QasmError> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut start = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let code = raw.split("//").next().unwrap_or("");
        for ch in code.chars() {
            if cur.trim().is_empty() && !ch.is_whitespace() {
                start = line;
            }
            if ch == ';' {
                out.push((start, cur.trim().to_string()));
                cur.clear();
            } else {
                cur.push(ch);
            }
        }
        cur.push(' ');
    }
    if !cur.trim().is_empty() {
        return Err(syntax(start, "missing `;`"));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug)]
enum Val {
    Rat(Rational64),
    Pi(Rational64),
    Real(f64),
}

impl Val {
    fn real(self) -> f64 {
        match self {
            Val::Rat(r) => *r.numer() as f64 / *r.denom() as f64,
            Val::Pi(r) => *r.numer() as f64 / *r.denom() as f64 * std::f64::consts::PI,
            Val::Real(x) => x,
        }
    }
}

struct ExprParser<'a> {
    s: &'a [u8],
    pos: usize,
    line: usize,
}

impl ExprParser<'_> {
    fn peek(&mut self) -> Option<u8> {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.s.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Val, QasmError> {
        let mut v = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            let rhs = if op == b'-' { neg(rhs) } else { rhs };
            v = match (v, rhs) {
                (Val::Rat(a), Val::Rat(b)) => Val::Rat(a + b),
                (Val::Pi(a), Val::Pi(b)) => Val::Pi(a + b),
                (a, b) => Val::Real(a.real() + b.real()),
            };
        }
        Ok(v)
    }

    fn term(&mut self) -> Result<Val, QasmError> {
        let mut v = self.unary()?;
        while let Some(op @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            v = if op == b'*' {
                match (v, rhs) {
                    (Val::Rat(a), Val::Rat(b)) => Val::Rat(a * b),
                    (Val::Rat(a), Val::Pi(b)) | (Val::Pi(b), Val::Rat(a)) => Val::Pi(a * b),
                    (a, b) => Val::Real(a.real() * b.real()),
                }
            } else {
                match (v, rhs) {
                    (_, Val::Rat(b)) if b.is_zero() => return Err(syntax(self.line, "division by zero")),
                    (Val::Rat(a), Val::Rat(b)) => Val::Rat(a / b),
                    (Val::Pi(a), Val::Rat(b)) => Val::Pi(a / b),
                    (a, b) => Val::Real(a.real() / b.real()),
                }
            };
        }
        Ok(v)
    }

    fn unary(&mut self) -> Result<Val, QasmError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(neg(self.unary()?))
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(syntax(self.line, "unbalanced parenthesis in angle"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                match &self.s[start..self.pos] {
                    b"pi" => Ok(Val::Pi(Rational64::from_integer(1))),
                    other => Err(syntax(self.line, format!("unknown identifier `{}` in angle", String::from_utf8_lossy(other)))),
                }
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                let mut is_float = false;
                while self.pos < self.s.len() {
                    let c = self.s[self.pos];
                    if c.is_ascii_digit() {
                        self.pos += 1;
                    } else if c == b'.' {
                        is_float = true;
                        self.pos += 1;
                    } else if (c == b'e' || c == b'E') && self.pos > start {
                        is_float = true;
                        self.pos += 1;
                        if self.pos < self.s.len() && (self.s[self.pos] == b'-' || self.s[self.pos] == b'+') {
                            self.pos += 1;
                        }
                    } else {
                        break;
                    }
                }
                let text = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
                if is_float {
                    text.parse::<f64>().map(Val::Real).map_err(|_| syntax(self.line, format!("bad number `{text}`")))
                } else {
                    text.parse::<i64>()
                        .map(|n| Val::Rat(Rational64::from_integer(n)))
                        .map_err(|_| syntax(self.line, format!("bad integer `{text}`")))
                }
            }
            _ => Err(syntax(self.line, "malformed angle expression")),
        }
    }
}

fn neg(v: Val) -> Val {
    match v {
        Val::Rat(r) => Val::Rat(-r),
        Val::Pi(r) => Val::Pi(-r),
        Val::Real(x) => Val::Real(-x),
    }
}

/// Parses an angle expression such as `-3*pi/4` or `0.125`.
pub fn parse_angle(text: &str, line: usize) -> Result<Angle, QasmError> {
    let mut p = ExprParser { s: text.as_bytes(), pos: 0, line };
    let v = p.expr()?;
    if p.peek().is_some() {
        return Err(syntax(line, format!("trailing characters in angle `{text}`")));
    }
    Ok(match v {
        Val::Pi(r) => Angle::from_pi_ratio(r),
        Val::Rat(r) if r.is_zero() => Angle::ZERO,
        v => {
            let x = v.real();
            if !x.is_finite() {
                return Err(syntax(line, "angle is not finite"));
            }
            Angle::from_radians(x)
        }
    })
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_') && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parses `name[idx]` and returns `(name, idx)`.
fn parse_indexed(s: &str, line: usize) -> Result<(String, usize), QasmError> {
    let s = s.trim();
    let open = s.find('[').ok_or_else(|| syntax(line, format!("expected indexed qubit, found `{s}`")))?;
    if !s.ends_with(']') {
        return Err(syntax(line, format!("expected `]` in `{s}`")));
    }
    let name = s[..open].trim();
    if !is_ident(name) {
        return Err(syntax(line, format!("bad register name `{name}`")));
    }
    let idx = s[open + 1..s.len() - 1].trim().parse::<usize>().map_err(|_| syntax(line, format!("bad index in `{s}`")))?;
    Ok((name.to_string(), idx))
}

/// Toffoli on (a, b; target c) as the standard 15-gate Clifford+T network.
pub fn ccx_gates(a: usize, b: usize, c: usize) -> Vec<Gate> {
    let t = Angle::pi_frac(1, 4);
    let tdg = Angle::pi_frac(-1, 4);
    vec![
        Gate::H(c),
        Gate::cnot(b, c),
        Gate::rz(c, tdg),
        Gate::cnot(a, c),
        Gate::rz(c, t),
        Gate::cnot(b, c),
        Gate::rz(c, tdg),
        Gate::cnot(a, c),
        Gate::rz(b, t),
        Gate::rz(c, t),
        Gate::H(c),
        Gate::cnot(a, b),
        Gate::rz(a, t),
        Gate::rz(b, tdg),
        Gate::cnot(a, b),
    ]
}

/// Parses the supported OpenQASM 2.0 subset.
pub fn parse_qasm(text: &str) -> Result<Circuit, QasmError> {
    let mut reg: Option<(String, usize)> = None;
    let mut gates = Vec::new();
    for (line, stmt) in statements(text)? {
        if stmt.is_empty() {
            continue;
        }
        let (head, rest) = match stmt.find(|c: char| c.is_whitespace() || c == '(') {
            Some(i) => (&stmt[..i], stmt[i..].trim()),
            None => (stmt.as_str(), ""),
        };
        match head {
            "OPENQASM" | "include" | "barrier" => continue,
            "qreg" => {
                if reg.is_some() {
                    return Err(QasmError::MultipleRegisters { line });
                }
                reg = Some(parse_indexed(rest, line)?);
                continue;
            }
            "creg" | "measure" | "reset" | "if" | "gate" | "opaque" => {
                return Err(QasmError::UnsupportedGate { name: head.to_string(), line });
            }
            _ => {}
        }
        if !is_ident(head) {
            return Err(syntax(line, format!("unexpected `{stmt}`")));
        }
        let (param, args) = if let Some(stripped) = rest.strip_prefix('(') {
            let close = stripped.find(')').ok_or_else(|| syntax(line, "missing `)`"))?;
            (Some(&stripped[..close]), stripped[close + 1..].trim())
        } else {
            (None, rest)
        };
        let name = head.to_ascii_lowercase();
        let arity = match name.as_str() {
            "cx" | "swap" => 2,
            "ccx" => 3,
            "rz" | "h" | "x" | "t" | "tdg" | "s" | "sdg" | "z" => 1,
            _ => return Err(QasmError::UnsupportedGate { name: head.to_string(), line }),
        };
        if (name == "rz") != param.is_some() {
            return Err(syntax(line, format!("wrong parameter list for `{head}`")));
        }
        let (rname, size) = reg.as_ref().ok_or_else(|| syntax(line, "gate before `qreg`"))?;
        let mut qs = Vec::with_capacity(arity);
        for a in args.split(',') {
            let (n, idx) = parse_indexed(a, line)?;
            if &n != rname {
                return Err(syntax(line, format!("unknown register `{n}`")));
            }
            if idx >= *size {
                return Err(syntax(line, format!("index {idx} out of range for `{n}[{size}]`")));
            }
            qs.push(idx);
        }
        if qs.len() != arity {
            return Err(syntax(line, format!("`{head}` expects {arity} qubit(s)")));
        }
        for i in 0..qs.len() {
            if qs[i + 1..].contains(&qs[i]) {
                return Err(syntax(line, format!("repeated qubit in `{head}`")));
            }
        }
        let q = qs[0];
        match name.as_str() {
            "cx" => gates.push(Gate::cnot(qs[0], qs[1])),
            "swap" => gates.push(Gate::Swap(qs[0], qs[1])),
            "ccx" => gates.extend(ccx_gates(qs[0], qs[1], qs[2])),
            "rz" => gates.push(Gate::rz(q, parse_angle(param.unwrap_or(""), line)?)),
            "h" => gates.push(Gate::H(q)),
            "x" => gates.push(Gate::X(q)),
            "t" => gates.push(Gate::rz(q, Angle::pi_frac(1, 4))),
            "tdg" => gates.push(Gate::rz(q, Angle::pi_frac(-1, 4))),
            "s" => gates.push(Gate::rz(q, Angle::pi_frac(1, 2))),
            "sdg" => gates.push(Gate::rz(q, Angle::pi_frac(-1, 2))),
            "z" => gates.push(Gate::rz(q, Angle::pi_frac(1, 1))),
            _ => unreachable!(),
        }
    }
    let qubit_count = reg.map(|r| r.1).unwrap_or(0);
    Ok(Circuit { name: String::new(), qubit_count, gates })
}

/// Writes the circuit as OpenQASM 2.0 over a single register `q`.
pub fn emit_qasm(c: &Circuit, decompose_swap: bool) -> String {
    let mut s = String::new();
    s.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let _ = writeln!(s, "qreg q[{}];", c.qubit_count);
    for g in &c.gates {
        let _ = match g {
            Gate::Cnot { control, target } => writeln!(s, "cx q[{control}],q[{target}];"),
            Gate::Rz { qubit, angle } => writeln!(s, "rz({}) q[{qubit}];", angle.to_qasm()),
            Gate::H(q) => writeln!(s, "h q[{q}];"),
            Gate::X(q) => writeln!(s, "x q[{q}];"),
            Gate::Swap(a, b) if decompose_swap => writeln!(s, "cx q[{a}],q[{b}];\ncx q[{b}],q[{a}];\ncx q[{a}],q[{b}];"),
            Gate::Swap(a, b) => writeln!(s, "swap q[{a}],q[{b}];"),
            Gate::Other1q { name, qubit } => writeln!(s, "{name} q[{qubit}];"),
        };
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn desugars_named_phase_gates() {
        let c = parse_qasm("qreg q[2]; t q[0]; cx q[0],q[1];").unwrap();
        assert_eq!(c.qubit_count, 2);
        assert_eq!(c.gates, vec![Gate::rz(0, Angle::pi_frac(1, 4)), Gate::cnot(0, 1)]);
    }

    #[test]
    fn toffoli_expands_to_fifteen_gates() {
        let c = parse_qasm("qreg q[3]; ccx q[0],q[1],q[2];").unwrap();
        let n = c.counts();
        assert_eq!((n.total, n.cnot, n.rz), (15, 6, 7));
    }

    #[test]
    fn empty_body() {
        let c = parse_qasm("qreg q[1];").unwrap();
        assert_eq!(c, Circuit::new(1));
    }

    #[test]
    fn angle_grammar() {
        assert_eq!(parse_angle("pi", 1).unwrap(), Angle::pi_frac(1, 1));
        assert_eq!(parse_angle("-pi/4", 1).unwrap(), Angle::pi_frac(7, 4));
        assert_eq!(parse_angle("3*pi/4", 1).unwrap(), Angle::pi_frac(3, 4));
        assert_eq!(parse_angle("0", 1).unwrap(), Angle::ZERO);
        assert!(matches!(parse_angle("0.5", 1).unwrap(), Angle::Float(x) if x == 0.5));
    }

    #[test]
    fn errors_carry_lines() {
        let e = parse_qasm("OPENQASM 2.0;\nqreg q[2];\nmeasure q[0] -> c[0];").unwrap_err();
        assert_eq!(e, QasmError::UnsupportedGate { name: "measure".into(), line: 3 });
        let e = parse_qasm("qreg q[2];\nqreg r[2];").unwrap_err();
        assert_eq!(e, QasmError::MultipleRegisters { line: 2 });
        let e = parse_qasm("qreg q[2];\ncx q[0],q[5];").unwrap_err();
        assert!(matches!(e, QasmError::SyntaxError { line: 2, .. }));
        let e = parse_qasm("qreg q[2];\nu3(0,0,0) q[0];").unwrap_err();
        assert!(matches!(e, QasmError::UnsupportedGate { line: 2, .. }));
    }

    #[test]
    fn barriers_and_comments_dropped() {
        let c = parse_qasm("// hello\nqreg q[2];\nbarrier q[0],q[1];\nh q[1]; // trailing\n").unwrap();
        assert_eq!(c.gates, vec![Gate::H(1)]);
    }

    #[test]
    fn swap_decomposition() {
        let c = Circuit::with_gates(2, vec![Gate::Swap(0, 1)]);
        let text = emit_qasm(&c, true);
        assert_eq!(text.matches("cx ").count(), 3);
        assert!(emit_qasm(&Circuit::with_gates(1, vec![Gate::rz(0, Angle::pi_frac(1, 2))]), false).contains("rz(pi/2) q[0];"));
    }
}
