//! Line-oriented circuit text format.
//!
//! ```text
//! qubits 3
//! cbits 3
//! scheme teleport
//! INIT 0 1.2 0.4 0
//! H 1
//! CNOT 1 2
//! MEASURE 1 c1
//! IF X 2 c1 1
//! DISENTANGLE 2 1.2 0.4 0
//! ```
//!
//! `#` starts a comment. Angles are written with full round-trip precision.

use std::fmt::Write as _;

use crate::error::{Error, Result};

use super::{Circuit, CircuitOp, Gate, OpRole, Scheme};

fn angles(g: &Gate) -> Option<(f64, f64, f64)> {
    match *g {
        Gate::U { theta, phi, lam } | Gate::Udg { theta, phi, lam } => Some((theta, phi, lam)),
        _ => None,
    }
}

fn gate_text(gate: &Gate, sites: &[usize]) -> String {
    let mut s = gate.name().to_string();
    for q in sites {
        let _ = write!(s, " {q}");
    }
    if let Some((t, p, l)) = angles(gate) {
        let _ = write!(s, " {t:?} {p:?} {l:?}");
    }
    s
}

pub fn write_circuit(c: &Circuit) -> String {
    let mut out = format!("qubits {}\ncbits {}\nscheme {}\n", c.n_qubits(), c.n_cbits(), c.scheme());
    for op in c.ops() {
        let line = match op {
            CircuitOp::Unitary { gate, sites, role: OpRole::Body } => gate_text(gate, sites),
            CircuitOp::Unitary { gate, sites, role } => {
                let (t, p, l) = angles(gate).unwrap_or((0.0, 0.0, 0.0));
                let tag = if *role == OpRole::Init { "INIT" } else { "DISENTANGLE" };
                format!("{tag} {} {t:?} {p:?} {l:?}", sites[0])
            }
            CircuitOp::Measure { site, cbit } => format!("MEASURE {site} c{cbit}"),
            CircuitOp::Conditional { gate, site, cbit, trigger } => {
                format!("IF {} c{cbit} {trigger}", gate_text(gate, &[*site]))
            }
        };
        out.push_str(&line);
        out.push('\n');
    }
    out
}

struct Tokens<'a> {
    line: usize,
    iter: std::str::SplitWhitespace<'a>,
}

impl<'a> Tokens<'a> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { line: self.line, msg: msg.into() }
    }

    fn word(&mut self, what: &str) -> Result<&'a str> {
        self.iter.next().ok_or_else(|| self.err(format!("missing {what}")))
    }

    fn usize(&mut self, what: &str) -> Result<usize> {
        let w = self.word(what)?;
        w.parse().map_err(|_| self.err(format!("bad {what} '{w}'")))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        let w = self.word(what)?;
        w.parse().map_err(|_| self.err(format!("bad {what} '{w}'")))
    }

    fn cbit(&mut self) -> Result<usize> {
        let w = self.word("classical bit")?;
        w.strip_prefix('c')
            .and_then(|d| d.parse().ok())
            .ok_or_else(|| self.err(format!("bad classical bit '{w}'")))
    }

    fn finish(&mut self) -> Result<()> {
        match self.iter.next() {
            Some(extra) => Err(self.err(format!("unexpected token '{extra}'"))),
            None => Ok(()),
        }
    }

    fn gate(&mut self, name: &str) -> Result<(Gate, Vec<usize>)> {
        let one = |t: &mut Self| t.usize("site").map(|s| vec![s]);
        Ok(match name {
            "X" => (Gate::X, one(self)?),
            "Y" => (Gate::Y, one(self)?),
            "Z" => (Gate::Z, one(self)?),
            "H" => (Gate::H, one(self)?),
            "CNOT" | "CX" => (Gate::Cnot, vec![self.usize("control")?, self.usize("target")?]),
            "CZ" => (Gate::Cz, vec![self.usize("site")?, self.usize("site")?]),
            "U" | "UDG" => {
                let site = self.usize("site")?;
                let (theta, phi, lam) = (self.f64("theta")?, self.f64("phi")?, self.f64("lambda")?);
                let g = if name == "U" { Gate::U { theta, phi, lam } } else { Gate::Udg { theta, phi, lam } };
                (g, vec![site])
            }
            other => return Err(self.err(format!("unknown gate '{other}'"))),
        })
    }
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let (mut n_qubits, mut n_cbits, mut scheme) = (None, None, Scheme::Custom);
    let mut ops = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut t = Tokens { line: i + 1, iter: body.split_whitespace() };
        let head = t.word("keyword")?;
        match head.to_ascii_uppercase().as_str() {
            "QUBITS" => n_qubits = Some(t.usize("qubit count")?),
            "CBITS" => n_cbits = Some(t.usize("cbit count")?),
            "SCHEME" => scheme = t.word("scheme")?.parse().map_err(|e: Error| t.err(e.to_string()))?,
            "MEASURE" => ops.push(CircuitOp::Measure { site: t.usize("site")?, cbit: t.cbit()? }),
            "INIT" | "DISENTANGLE" => {
                let site = t.usize("site")?;
                let (theta, phi, lam) = (t.f64("theta")?, t.f64("phi")?, t.f64("lambda")?);
                let (gate, role) = if head.eq_ignore_ascii_case("INIT") {
                    (Gate::U { theta, phi, lam }, OpRole::Init)
                } else {
                    (Gate::Udg { theta, phi, lam }, OpRole::Disentangler)
                };
                ops.push(CircuitOp::Unitary { gate, sites: vec![site], role });
            }
            "IF" => {
                let name = t.word("gate")?.to_ascii_uppercase();
                let (gate, sites) = t.gate(&name)?;
                if sites.len() != 1 {
                    return Err(t.err("conditional gates act on one qubit"));
                }
                let cbit = t.cbit()?;
                let trigger = t.usize("trigger")?;
                if trigger > 1 {
                    return Err(t.err(format!("trigger must be 0 or 1, got {trigger}")));
                }
                ops.push(CircuitOp::Conditional { gate, site: sites[0], cbit, trigger: trigger as u8 });
            }
            name => {
                let (gate, sites) = t.gate(name)?;
                ops.push(CircuitOp::Unitary { gate, sites, role: OpRole::Body });
            }
        }
        t.finish()?;
    }
    let n_qubits = n_qubits.ok_or(Error::Parse { line: 0, msg: "missing 'qubits' header".into() })?;
    Circuit::from_ops(n_qubits, n_cbits.unwrap_or(n_qubits), scheme, ops)
}
