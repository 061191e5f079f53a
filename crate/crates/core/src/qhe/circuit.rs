use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{Gate, PureState};

/// Gate list over `{H, P, T, CNOT}` on `n` qubits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliffordTCircuit {
    pub n: usize,
    pub gates: Vec<Gate>,
}

impl CliffordTCircuit {
    pub fn new(n: usize, gates: Vec<Gate>) -> Result<Self> {
        if n == 0 {
            return Err(Error::QubitCount(0));
        }
        for g in &gates {
            if !matches!(g, Gate::H(_) | Gate::P(_) | Gate::T(_) | Gate::Cnot { .. }) {
                return Err(Error::CircuitInput(format!("{g:?} is not in the H, P, T, CNOT set")));
            }
            let t = g.targets();
            if let Some(&q) = t.iter().find(|&&q| q >= n) {
                return Err(Error::QubitOutOfRange { qubit: q, num_qubits: n });
            }
            if t.len() == 2 && t[0] == t[1] {
                return Err(Error::DuplicateTargets(t));
            }
        }
        Ok(Self { n, gates })
    }

    /// One gate per line: `H q`, `P q`, `T q`, `CNOT c t`. Blank lines and
    /// `#` comments are ignored. An optional `qubits N` line fixes the width,
    /// which otherwise is one more than the largest index used.
    pub fn parse(text: &str) -> Result<Self> {
        let mut gates = Vec::new();
        let mut declared = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let bad = |msg: String| Error::MalformedCircuit { line, msg };
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let tok: Vec<&str> = body.split_whitespace().collect();
            let index = |s: &str| s.parse::<usize>().map_err(|_| bad(format!("bad qubit index {s}")));
            let op = tok[0].to_ascii_uppercase();
            let g = match (op.as_str(), &tok[1..]) {
                ("QUBITS", [n]) => {
                    if declared.is_some() || !gates.is_empty() {
                        return Err(bad("`qubits` must come first and only once".into()));
                    }
                    declared = Some(n.parse::<usize>().map_err(|_| bad(format!("bad width {n}")))?);
                    continue;
                }
                ("H", [q]) => Gate::H(index(q)?),
                ("P", [q]) => Gate::P(index(q)?),
                ("T", [q]) => Gate::T(index(q)?),
                ("CNOT", [c, t]) => Gate::Cnot {
                    control: index(c)?,
                    target: index(t)?,
                },
                ("H" | "P" | "T" | "CNOT" | "QUBITS", _) => {
                    return Err(bad(format!("wrong operand count for {}", tok[0])))
                }
                _ => return Err(bad(format!("unknown gate {}", tok[0]))),
            };
            if let Gate::Cnot { control, target } = g {
                if control == target {
                    return Err(bad("CNOT control equals target".into()));
                }
            }
            gates.push(g);
        }
        let used = gates.iter().flat_map(|g| g.targets()).max().map_or(0, |q| q + 1);
        let n = match declared {
            Some(n) if n < used => {
                return Err(Error::CircuitInput(format!("declared {n} qubits but index {} used", used - 1)))
            }
            Some(n) => n,
            None => used.max(1),
        };
        Self::new(n, gates)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("qubits {}\n", self.n);
        for g in &self.gates {
            match *g {
                Gate::H(q) => s += &format!("H {q}\n"),
                Gate::P(q) => s += &format!("P {q}\n"),
                Gate::T(q) => s += &format!("T {q}\n"),
                Gate::Cnot { control, target } => s += &format!("CNOT {control} {target}\n"),
                _ => unreachable!("validated on construction"),
            }
        }
        s
    }

    pub fn t_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::T(_))).count()
    }

    /// The circuit applied directly to `input`.
    pub fn simulate(&self, input: &PureState) -> Result<PureState> {
        if input.num_qubits() != self.n {
            return Err(Error::DimensionMismatch {
                left: input.num_qubits(),
                right: self.n,
            });
        }
        let mut s = input.clone();
        s.apply_all(&self.gates)?;
        Ok(s)
    }

    /// `t_count` T gates, each preceded by up to `cliffords` random
    /// Clifford gates, plus a trailing Clifford layer.
    pub fn random<R: Rng + ?Sized>(n: usize, t_count: usize, cliffords: usize, rng: &mut R) -> Result<Self> {
        let mut gates = Vec::new();
        let layer = |gates: &mut Vec<Gate>, rng: &mut R| {
            for _ in 0..rng.random_range(0..=cliffords) {
                let q = rng.random_range(0..n);
                let kinds = if n > 1 { 3 } else { 2 };
                gates.push(match rng.random_range(0..kinds) {
                    0 => Gate::H(q),
                    1 => Gate::P(q),
                    _ => {
                        let t = (q + rng.random_range(1..n)) % n;
                        Gate::Cnot { control: q, target: t }
                    }
                });
            }
        };
        for _ in 0..t_count {
            layer(&mut gates, rng);
            gates.push(Gate::T(rng.random_range(0..n.max(1))));
        }
        layer(&mut gates, rng);
        Self::new(n, gates)
    }
}
