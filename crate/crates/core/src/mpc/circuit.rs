use std::collections::HashMap;
use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::and::{AndRecord, TablePool};
use crate::error::{Error, Result};
use crate::protocols::Party;

/// Who holds an input wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Owner {
    Alice,
    Bob,
    /// Fixed to 1 and known to both parties.
    Const1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Recipient {
    Alice,
    Bob,
    Both,
}

impl Recipient {
    pub fn receives(self, p: Party) -> bool {
        matches!((self, p), (Recipient::Both, _) | (Recipient::Alice, Party::Alice) | (Recipient::Bob, Party::Bob))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GateOp {
    And,
    Xor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub op: GateOp,
    pub out: usize,
    pub in1: usize,
    pub in2: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BooleanCircuit {
    /// Wire names, indexed by wire number. Inputs come first.
    pub names: Vec<String>,
    pub inputs: Vec<(usize, Owner)>,
    /// Gates in evaluation order.
    pub gates: Vec<Gate>,
    pub outputs: Vec<(usize, Recipient)>,
}

fn parse_owner(s: &str) -> Option<Owner> {
    match s.to_ascii_lowercase().as_str() {
        "alice" | "a" => Some(Owner::Alice),
        "bob" | "b" => Some(Owner::Bob),
        "const1" | "one" => Some(Owner::Const1),
        _ => None,
    }
}

fn parse_recipient(s: &str) -> Option<Recipient> {
    match s.to_ascii_lowercase().as_str() {
        "alice" | "a" => Some(Recipient::Alice),
        "bob" | "b" => Some(Recipient::Bob),
        "both" => Some(Recipient::Both),
        _ => None,
    }
}

impl BooleanCircuit {
    /// Parses the netlist format. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = BooleanCircuit {
            names: Vec::new(),
            inputs: Vec::new(),
            gates: Vec::new(),
            outputs: Vec::new(),
        };
        let mut index: HashMap<String, usize> = HashMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let bad = |msg: String| Error::MalformedCircuit { line, msg };
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let tok: Vec<&str> = body.split_whitespace().collect();
            let lookup = |name: &str| index.get(name).copied().ok_or_else(|| bad(format!("undefined wire {name}")));
            match tok[0].to_ascii_uppercase().as_str() {
                "WIRE" => {
                    let [_, id, owner] = tok[..] else {
                        return Err(bad("expected `wire <id> <owner>`".into()));
                    };
                    if !c.gates.is_empty() {
                        return Err(bad("input wires must precede gates".into()));
                    }
                    let owner = parse_owner(owner).ok_or_else(|| bad(format!("unknown owner {owner}")))?;
                    if index.contains_key(id) {
                        return Err(bad(format!("wire {id} defined twice")));
                    }
                    index.insert(id.to_string(), c.names.len());
                    c.inputs.push((c.names.len(), owner));
                    c.names.push(id.to_string());
                }
                op @ ("AND" | "XOR") => {
                    let [_, out, a, b] = tok[..] else {
                        return Err(bad(format!("expected `{op} <out> <in1> <in2>`")));
                    };
                    let (in1, in2) = (lookup(a)?, lookup(b)?);
                    if index.contains_key(out) {
                        return Err(bad(format!("wire {out} defined twice")));
                    }
                    let id = c.names.len();
                    index.insert(out.to_string(), id);
                    c.names.push(out.to_string());
                    let op = if op == "AND" { GateOp::And } else { GateOp::Xor };
                    c.gates.push(Gate { op, out: id, in1, in2 });
                }
                "OUT" => {
                    let [_, id, who] = tok[..] else {
                        return Err(bad("expected `OUT <id> <recipient>`".into()));
                    };
                    let w = lookup(id)?;
                    let r = parse_recipient(who).ok_or_else(|| bad(format!("unknown recipient {who}")))?;
                    c.outputs.push((w, r));
                }
                other => return Err(bad(format!("unknown directive {other}"))),
            }
        }
        if c.outputs.is_empty() {
            return Err(Error::MalformedCircuit {
                line: text.lines().count(),
                msg: "no OUT lines".into(),
            });
        }
        Ok(c)
    }

    pub fn to_netlist(&self) -> String {
        let mut s = String::new();
        for &(w, o) in &self.inputs {
            let o = match o {
                Owner::Alice => "alice",
                Owner::Bob => "bob",
                Owner::Const1 => "const1",
            };
            let _ = writeln!(s, "wire {} {o}", self.names[w]);
        }
        for g in &self.gates {
            let op = if g.op == GateOp::And { "AND" } else { "XOR" };
            let _ = writeln!(s, "{op} {} {} {}", self.names[g.out], self.names[g.in1], self.names[g.in2]);
        }
        for &(w, r) in &self.outputs {
            let r = match r {
                Recipient::Alice => "alice",
                Recipient::Bob => "bob",
                Recipient::Both => "both",
            };
            let _ = writeln!(s, "OUT {} {r}", self.names[w]);
        }
        s
    }

    pub fn input_count(&self, owner: Owner) -> usize {
        self.inputs.iter().filter(|(_, o)| *o == owner).count()
    }

    fn assign_inputs(&self, alice: &[bool], bob: &[bool]) -> Result<Vec<bool>> {
        for (who, got, owner) in [("Alice", alice.len(), Owner::Alice), ("Bob", bob.len(), Owner::Bob)] {
            let want = self.input_count(owner);
            if got != want {
                return Err(Error::CircuitInput(format!("{who} has {want} input wires, got {got} bits")));
            }
        }
        let mut v = vec![false; self.names.len()];
        let (mut ia, mut ib) = (alice.iter(), bob.iter());
        for &(w, o) in &self.inputs {
            v[w] = match o {
                Owner::Alice => *ia.next().expect("counted"),
                Owner::Bob => *ib.next().expect("counted"),
                Owner::Const1 => true,
            };
        }
        Ok(v)
    }

    /// Plain evaluation; outputs in `OUT` order.
    pub fn evaluate(&self, alice: &[bool], bob: &[bool]) -> Result<Vec<bool>> {
        let mut v = self.assign_inputs(alice, bob)?;
        for g in &self.gates {
            v[g.out] = match g.op {
                GateOp::And => v[g.in1] & v[g.in2],
                GateOp::Xor => v[g.in1] ^ v[g.in2],
            };
        }
        Ok(self.outputs.iter().map(|&(w, _)| v[w]).collect())
    }
}

/// How a wire's value is held during secure evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WireKind {
    Alice,
    Bob,
    Distributed,
    /// A constant known to both (Bob's share carries it).
    Public(bool),
}

impl WireKind {
    fn alice_share(self) -> bool {
        matches!(self, WireKind::Alice | WireKind::Distributed)
    }

    fn bob_share(self) -> bool {
        !matches!(self, WireKind::Alice)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Term {
    Share(usize),
    /// Local AND of the party's own shares of two wires.
    And(usize, usize),
}

/// One gate after decomposition. Alice's output share is `const_a` XOR her
/// terms XOR her nonlocal-AND shares; Bob's likewise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub out: usize,
    pub kind: WireKind,
    pub terms_a: Vec<Term>,
    pub terms_b: Vec<Term>,
    pub const_a: bool,
    pub const_b: bool,
    /// `(u, v)`: nonlocal AND of Alice's share of `u` and Bob's share of `v`.
    pub nonlocal: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompiledPlan {
    pub circuit: BooleanCircuit,
    pub kinds: Vec<WireKind>,
    pub steps: Vec<Step>,
    pub local_ands: usize,
    /// Number of one-time tables the evaluation consumes.
    pub table_budget: usize,
}

fn shares_of(w: usize, k: WireKind) -> (Vec<Term>, Vec<Term>) {
    let a = if k.alice_share() { vec![Term::Share(w)] } else { vec![] };
    let b = if k.bob_share() { vec![Term::Share(w)] } else { vec![] };
    (a, b)
}

fn compile_gate(g: &Gate, k1: WireKind, k2: WireKind) -> Step {
    use WireKind::*;
    let mut s = Step {
        out: g.out,
        kind: Distributed,
        terms_a: vec![],
        terms_b: vec![],
        const_a: false,
        const_b: false,
        nonlocal: vec![],
    };
    let (i1, i2) = (g.in1, g.in2);
    match g.op {
        GateOp::Xor => match (k1, k2) {
            (Public(p), Public(q)) => {
                s.kind = Public(p ^ q);
                s.const_b = p ^ q;
            }
            (Public(p), k) | (k, Public(p)) => {
                let other = if matches!(k1, Public(_)) { i2 } else { i1 };
                (s.terms_a, s.terms_b) = shares_of(other, k);
                s.kind = k;
                if k == Alice {
                    s.const_a = p;
                } else {
                    s.const_b = p;
                }
            }
            _ => {
                let (a1, b1) = shares_of(i1, k1);
                let (a2, b2) = shares_of(i2, k2);
                s.terms_a = [a1, a2].concat();
                s.terms_b = [b1, b2].concat();
                s.kind = match (k1, k2) {
                    (Alice, Alice) => Alice,
                    (Bob, Bob) => Bob,
                    _ => Distributed,
                };
            }
        },
        GateOp::And => match (k1, k2) {
            (Public(p), Public(q)) => {
                s.kind = Public(p & q);
                s.const_b = p & q;
            }
            (Public(p), k) | (k, Public(p)) => {
                let other = if matches!(k1, Public(_)) { i2 } else { i1 };
                if p {
                    (s.terms_a, s.terms_b) = shares_of(other, k);
                    s.kind = k;
                } else {
                    s.kind = Public(false);
                }
            }
            (Alice, Alice) => {
                s.kind = Alice;
                s.terms_a.push(Term::And(i1, i2));
            }
            (Bob, Bob) => {
                s.kind = Bob;
                s.terms_b.push(Term::And(i1, i2));
            }
            (Alice, Bob) => s.nonlocal.push((i1, i2)),
            (Bob, Alice) => s.nonlocal.push((i2, i1)),
            (Distributed, Alice) | (Alice, Distributed) => {
                let (d, a) = if k1 == Distributed { (i1, i2) } else { (i2, i1) };
                s.terms_a.push(Term::And(d, a));
                s.nonlocal.push((a, d));
            }
            (Distributed, Bob) | (Bob, Distributed) => {
                let (d, b) = if k1 == Distributed { (i1, i2) } else { (i2, i1) };
                s.terms_b.push(Term::And(d, b));
                s.nonlocal.push((d, b));
            }
            (Distributed, Distributed) => {
                s.terms_a.push(Term::And(i1, i2));
                s.terms_b.push(Term::And(i1, i2));
                s.nonlocal.push((i1, i2));
                s.nonlocal.push((i2, i1));
            }
        },
    }
    s
}

/// Decomposes every gate into local operations and nonlocal ANDs.
pub fn compile_circuit(c: &BooleanCircuit) -> CompiledPlan {
    let mut kinds = vec![WireKind::Public(false); c.names.len()];
    for &(w, o) in &c.inputs {
        kinds[w] = match o {
            Owner::Alice => WireKind::Alice,
            Owner::Bob => WireKind::Bob,
            Owner::Const1 => WireKind::Public(true),
        };
    }
    let mut steps = Vec::with_capacity(c.gates.len());
    for g in &c.gates {
        let s = compile_gate(g, kinds[g.in1], kinds[g.in2]);
        kinds[g.out] = s.kind;
        steps.push(s);
    }
    let count = |f: fn(&Step) -> usize| steps.iter().map(f).sum();
    let local_ands = count(|s| {
        s.terms_a.iter().chain(&s.terms_b).filter(|t| matches!(t, Term::And(..))).count()
    });
    let table_budget = count(|s| s.nonlocal.len());
    CompiledPlan {
        circuit: c.clone(),
        kinds,
        steps,
        local_ands,
        table_budget,
    }
}

/// A classical message in the main computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub from: Party,
    pub bit: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitRun {
    /// `(value as seen by each recipient)` in `OUT` order.
    pub outputs: Vec<bool>,
    pub ands: Vec<AndRecord>,
    /// Output-share messages, in `OUT` order.
    pub reveals: Vec<Message>,
    pub tables_used: usize,
}

impl CircuitRun {
    /// Everything Alice received during the run.
    pub fn alice_received(&self) -> Vec<bool> {
        self.ands
            .iter()
            .map(|r| r.b_msg)
            .chain(self.reveals.iter().filter(|m| m.from == Party::Bob).map(|m| m.bit))
            .collect()
    }

    pub fn bob_received(&self) -> Vec<bool> {
        self.ands
            .iter()
            .map(|r| r.a_msg)
            .chain(self.reveals.iter().filter(|m| m.from == Party::Alice).map(|m| m.bit))
            .collect()
    }
}

/// Runs the plan with tables drawn from `pool` in plan order.
pub fn eval_circuit(plan: &CompiledPlan, alice: &[bool], bob: &[bool], pool: &mut TablePool) -> Result<CircuitRun> {
    let c = &plan.circuit;
    let inputs = c.assign_inputs(alice, bob)?;
    pool.require(plan.table_budget)?;
    let n = c.names.len();
    let (mut sa, mut sb) = (vec![false; n], vec![false; n]);
    for &(w, _) in &c.inputs {
        match plan.kinds[w] {
            WireKind::Alice => sa[w] = inputs[w],
            _ => sb[w] = inputs[w],
        }
    }
    let fold = |terms: &[Term], sh: &[bool]| {
        terms.iter().fold(false, |acc, t| {
            acc ^ match *t {
                Term::Share(w) => sh[w],
                Term::And(u, v) => sh[u] & sh[v],
            }
        })
    };
    let mut ands = Vec::with_capacity(plan.table_budget);
    for s in &plan.steps {
        let mut a = s.const_a ^ fold(&s.terms_a, &sa);
        let mut b = s.const_b ^ fold(&s.terms_b, &sb);
        for &(u, v) in &s.nonlocal {
            let r = pool.and(sa[u], sb[v])?;
            a ^= r.out.share_a;
            b ^= r.out.share_b;
            ands.push(r);
        }
        sa[s.out] = a;
        sb[s.out] = b;
    }
    let mut outputs = Vec::with_capacity(c.outputs.len());
    let mut reveals = Vec::new();
    for &(w, r) in &c.outputs {
        if r.receives(Party::Alice) {
            reveals.push(Message { from: Party::Bob, bit: sb[w] });
        }
        if r.receives(Party::Bob) {
            reveals.push(Message { from: Party::Alice, bit: sa[w] });
        }
        outputs.push(sa[w] ^ sb[w]);
    }
    Ok(CircuitRun {
        outputs,
        tables_used: ands.len(),
        ands,
        reveals,
    })
}

/// Random circuit with the given input counts and gate count; every gate
/// reads two earlier wires, and the last gate plus one random wire are
/// output to random recipients.
pub fn random_circuit<R: Rng + ?Sized>(n_alice: usize, n_bob: usize, const1: bool, gates: usize, rng: &mut R) -> BooleanCircuit {
    let mut c = BooleanCircuit {
        names: Vec::new(),
        inputs: Vec::new(),
        gates: Vec::new(),
        outputs: Vec::new(),
    };
    let owners = std::iter::repeat_n(Owner::Alice, n_alice)
        .chain(std::iter::repeat_n(Owner::Bob, n_bob))
        .chain(const1.then_some(Owner::Const1));
    for (i, o) in owners.enumerate() {
        c.names.push(format!("i{i}"));
        c.inputs.push((i, o));
    }
    for g in 0..gates {
        let n = c.names.len();
        let op = if rng.random() { GateOp::And } else { GateOp::Xor };
        c.names.push(format!("g{g}"));
        c.gates.push(Gate {
            op,
            out: n,
            in1: rng.random_range(0..n),
            in2: rng.random_range(0..n),
        });
    }
    let recipients = [Recipient::Alice, Recipient::Bob, Recipient::Both];
    let last = c.names.len() - 1;
    c.outputs.push((last, recipients[rng.random_range(0..3)]));
    c.outputs.push((rng.random_range(0..last + 1), recipients[rng.random_range(0..3)]));
    c
}
