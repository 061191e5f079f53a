use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::circuit::CliffordTCircuit;
use super::gadget::{garden_hose, BellBits, GadgetResources};
use super::ledger::{key_update, AffineForm, MaskLedger};
use crate::error::{Error, Result};
use crate::kernel::{teleport_withheld, Correction, Gate, PureState, RevealPolicy};
use crate::mpc::{eval_linear_poly, DistributedBit, LinearPoly, TablePool};
use crate::protocols::Party;

/// Tables consumed by a run: one per variable for each T-gate polynomial,
/// then `2n` final polynomials over all `2n + 4R` variables.
pub fn table_count(n: usize, t_count: usize) -> usize {
    (0..t_count).map(|r| 2 * n + 4 * r).sum::<usize>() + 2 * n * (2 * n + 4 * t_count)
}

/// `(2n + 4R)(R + 2n)`: every one of the `R + 2n` polynomials at full width.
pub fn table_bound(n: usize, t_count: usize) -> usize {
    (2 * n + 4 * t_count) * (t_count + 2 * n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PolyPurpose {
    TCorrection { round: usize, qubit: usize },
    FinalX { qubit: usize },
    FinalZ { qubit: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyRecord {
    pub purpose: PolyPurpose,
    /// Bob's coefficients.
    pub form: AffineForm,
    /// Width of the evaluated polynomial (tables consumed).
    pub width: usize,
    pub out: DistributedBit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mask {
    /// Input bit of the named table.
    Table { id: u64 },
    /// Sender's share of a final polynomial.
    PolyShare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QheMessage {
    pub from: Party,
    pub bit: bool,
    pub mask: Mask,
}

/// What Bob knows after one T-gate round, besides the circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BobRound {
    pub qubit: usize,
    pub share: bool,
    pub bob_in: BellBits,
    pub bob_out: BellBits,
    /// Ids of Alice's four new variables, slot by slot as `u, v`.
    pub alice_vars: [usize; 4],
}

/// Bob's mask rewrite after a T gate and its gadget. Uses only his own
/// data and the variable ids.
pub fn absorb_t_round(ledger: &mut MaskLedger, round: &BobRound) -> Result<()> {
    let q = round.qubit;
    if q >= ledger.num_qubits() {
        return Err(Error::QubitOutOfRange {
            qubit: q,
            num_qubits: ledger.num_qubits(),
        });
    }
    let m = &mut ledger.masks[q];
    // T X^x Z^z = P^x X^x Z^z T up to phase, so only the gadget changes masks
    let x = m.x.clone();
    let slot = round.share as usize * 2;
    let (au, av) = (round.alice_vars[slot], round.alice_vars[slot + 1]);
    m.x.flip(round.bob_in.v ^ round.bob_out.v);
    m.x.xor_assign(&AffineForm::var(av));
    m.z.flip(round.bob_in.u ^ round.bob_out.u);
    m.z.xor_assign(&AffineForm::var(au));
    if round.bob_in.v {
        m.z.xor_assign(&x);
    }
    Ok(())
}

/// One interactive evaluation. Bob holds the data register and the mask
/// ledger; Alice holds the variable values.
#[derive(Debug, Clone)]
pub struct Session {
    bob_state: PureState,
    ledger: MaskLedger,
    alice_values: Vec<bool>,
    polys: Vec<PolyRecord>,
    transcript: Vec<QheMessage>,
    rounds: Vec<BobRound>,
    tables_used: usize,
}

impl Session {
    /// Alice teleports `input` to Bob and keeps every correction bit.
    pub fn start<R: Rng + ?Sized>(input: &PureState, rng: &mut R) -> Result<Self> {
        let n = input.num_qubits();
        let qubits: Vec<usize> = (0..n).collect();
        let t = teleport_withheld(input, &qubits, n, RevealPolicy::Nothing, rng)?;
        Ok(Self {
            bob_state: t.state,
            ledger: MaskLedger::after_teleport(n),
            alice_values: t.corrections.iter().flat_map(|c| [c.x, c.z]).collect(),
            polys: Vec::new(),
            transcript: Vec::new(),
            rounds: Vec::new(),
            tables_used: 0,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.ledger.num_qubits()
    }

    pub fn bob_state(&self) -> &PureState {
        &self.bob_state
    }

    pub fn ledger(&self) -> &MaskLedger {
        &self.ledger
    }

    pub fn alice_values(&self) -> &[bool] {
        &self.alice_values
    }

    pub fn rounds(&self) -> &[BobRound] {
        &self.rounds
    }

    /// Bob's register with the masks removed; equals the true intermediate
    /// state up to phase.
    pub fn unmasked(&self) -> Result<PureState> {
        let mut s = self.bob_state.clone();
        for (q, (x, z)) in self.ledger.evaluate(&self.alice_values)?.into_iter().enumerate() {
            Correction::new(x, z).undo(&mut s, q)?;
        }
        Ok(s)
    }

    fn evaluate(&mut self, purpose: PolyPurpose, form: AffineForm, pool: &mut TablePool) -> Result<DistributedBit> {
        // every variable is a term, so the width reveals nothing about `form`
        let alice_vars = self.ledger.variables_of(Party::Alice);
        if let Some(v) = form.support.iter().find(|&&v| self.ledger.owners[v] != Party::Alice) {
            return Err(Error::InvalidArgument(format!("variable {v} has no Alice-side value")));
        }
        let a: Vec<bool> = alice_vars.iter().map(|&v| self.alice_values[v]).collect();
        let b: Vec<bool> = alice_vars.iter().map(|v| form.support.contains(v)).collect();
        let c = form.constant;
        let run = eval_linear_poly(&LinearPoly::new(c, a, b)?, pool)?;
        for and in &run.ands {
            self.transcript.push(QheMessage {
                from: Party::Alice,
                bit: and.a_msg,
                mask: Mask::Table { id: and.table },
            });
            self.transcript.push(QheMessage {
                from: Party::Bob,
                bit: and.b_msg,
                mask: Mask::Table { id: and.table },
            });
        }
        self.tables_used += run.ands.len();
        self.polys.push(PolyRecord {
            purpose,
            form,
            width: run.ands.len(),
            out: run.out,
        });
        Ok(run.out)
    }

    /// Bob applies `gate`; a T gate triggers a correction round.
    pub fn apply<R: Rng + ?Sized>(&mut self, gate: Gate, pool: &mut TablePool, rng: &mut R) -> Result<()> {
        match gate {
            Gate::T(q) => self.t_gate_step(q, pool, rng),
            g => {
                self.ledger = key_update(&self.ledger, g)?;
                self.bob_state.apply(g)
            }
        }
    }

    /// T on `qubit`, then the shared evaluation of its X mask and a gadget
    /// that removes the resulting `P`.
    pub fn t_gate_step<R: Rng + ?Sized>(&mut self, qubit: usize, pool: &mut TablePool, rng: &mut R) -> Result<()> {
        if qubit >= self.num_qubits() {
            return Err(Error::QubitOutOfRange {
                qubit,
                num_qubits: self.num_qubits(),
            });
        }
        pool.require(self.ledger.num_variables())?;
        self.bob_state.apply(Gate::T(qubit))?;
        let form = self.ledger.masks[qubit].x.clone();
        let round = self.rounds.len();
        let out = self.evaluate(PolyPurpose::TCorrection { round, qubit }, form, pool)?;
        let mut resources = GadgetResources::fresh(round as u64);
        let g = garden_hose(out.share_a, out.share_b, &mut resources, &mut self.bob_state, qubit, rng)?;
        let mut alice_vars = [0; 4];
        for (k, bits) in g.alice.iter().enumerate() {
            for (j, bit) in [bits.u, bits.v].into_iter().enumerate() {
                alice_vars[2 * k + j] = self.ledger.new_variable(Party::Alice);
                self.alice_values.push(bit);
            }
        }
        let record = BobRound {
            qubit,
            share: out.share_b,
            bob_in: g.bob_in,
            bob_out: g.bob_out,
            alice_vars,
        };
        absorb_t_round(&mut self.ledger, &record)?;
        self.rounds.push(record);
        Ok(())
    }

    /// Final polynomials, then Bob teleports the register back with his
    /// correction bits masked by his shares.
    pub fn finish<R: Rng + ?Sized>(mut self, pool: &mut TablePool, rng: &mut R) -> Result<QheRun> {
        let n = self.num_qubits();
        pool.require(2 * n * self.ledger.num_variables())?;
        let mut shares = Vec::with_capacity(n);
        for q in 0..n {
            let mx = self.ledger.masks[q].x.clone();
            let mz = self.ledger.masks[q].z.clone();
            let x = self.evaluate(PolyPurpose::FinalX { qubit: q }, mx, pool)?;
            let z = self.evaluate(PolyPurpose::FinalZ { qubit: q }, mz, pool)?;
            shares.push((x, z));
        }
        let qubits: Vec<usize> = (0..n).collect();
        let t = teleport_withheld(&self.bob_state, &qubits, n, RevealPolicy::Nothing, rng)?;
        let mut output = t.state;
        for (q, (c, (x, z))) in t.corrections.iter().zip(&shares).enumerate() {
            let sent = (c.x ^ x.share_b, c.z ^ z.share_b);
            for bit in [sent.0, sent.1] {
                self.transcript.push(QheMessage {
                    from: Party::Bob,
                    bit,
                    mask: Mask::PolyShare,
                });
            }
            Correction::new(sent.0 ^ x.share_a, sent.1 ^ z.share_a).undo(&mut output, q)?;
        }
        Ok(QheRun {
            output,
            tables_used: self.tables_used,
            variables: self.ledger.num_variables(),
            t_count: self.rounds.len(),
            polynomials: self.polys,
            transcript: self.transcript,
            bob_rounds: self.rounds,
        })
    }
}

#[derive(Debug, Clone)]
pub struct QheRun {
    pub output: PureState,
    pub tables_used: usize,
    pub variables: usize,
    pub t_count: usize,
    pub polynomials: Vec<PolyRecord>,
    pub transcript: Vec<QheMessage>,
    pub bob_rounds: Vec<BobRound>,
}

impl QheRun {
    /// Every bit Bob receives must hide behind the input bit of a table
    /// used for nothing else.
    pub fn audit_bob_view(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for (i, m) in self.transcript.iter().enumerate().filter(|(_, m)| m.from == Party::Alice) {
            match m.mask {
                Mask::Table { id } if seen.insert(id) => {}
                Mask::Table { id } => {
                    return Err(Error::InvalidArgument(format!("message {i} reuses table {id}")))
                }
                Mask::PolyShare => {
                    return Err(Error::InvalidArgument(format!("message {i} to Bob is not table-masked")))
                }
            }
        }
        Ok(())
    }
}

/// Evaluates `circuit` on Alice's `input` with Bob performing every gate.
pub fn run_scheme1<R: Rng + ?Sized>(
    circuit: &CliffordTCircuit,
    input: &PureState,
    pool: &mut TablePool,
    rng: &mut R,
) -> Result<QheRun> {
    if input.num_qubits() != circuit.n {
        return Err(Error::DimensionMismatch {
            left: input.num_qubits(),
            right: circuit.n,
        });
    }
    pool.require(table_count(circuit.n, circuit.t_count()))?;
    let mut session = Session::start(input, rng)?;
    for &g in &circuit.gates {
        session.apply(g, pool, rng)?;
    }
    session.finish(pool, rng)
}

/// Bob's coefficients for every polynomial of a run, recomputed from the
/// circuit and his own records alone.
pub fn replay_bob_forms(circuit: &CliffordTCircuit, rounds: &[BobRound]) -> Result<Vec<AffineForm>> {
    let mut ledger = MaskLedger::after_teleport(circuit.n);
    let mut forms = Vec::new();
    let mut rounds = rounds.iter();
    for &g in &circuit.gates {
        match g {
            Gate::T(q) => {
                forms.push(ledger.masks[q].x.clone());
                let r = rounds
                    .next()
                    .ok_or_else(|| Error::InvalidArgument("fewer rounds than T gates".into()))?;
                for _ in 0..4 {
                    ledger.new_variable(Party::Alice);
                }
                absorb_t_round(&mut ledger, r)?;
            }
            g => ledger = key_update(&ledger, g)?,
        }
    }
    for m in &ledger.masks {
        forms.push(m.x.clone());
        forms.push(m.z.clone());
    }
    Ok(forms)
}
