//! Teleportation with the sender's Pauli corrections kept private.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Gate, PureState};
use crate::error::{Error, Result};

/// Pauli byproduct `X^x Z^z` left on a teleported qubit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Correction {
    pub x: bool,
    pub z: bool,
}

impl Correction {
    pub fn new(x: bool, z: bool) -> Self {
        Self { x, z }
    }

    pub fn all() -> [Correction; 4] {
        [
            Correction::new(false, false),
            Correction::new(false, true),
            Correction::new(true, false),
            Correction::new(true, true),
        ]
    }

    /// Applies `X^x Z^z` (Z first) to `qubit`.
    pub fn apply(self, state: &mut PureState, qubit: usize) -> Result<()> {
        if self.z {
            state.apply(Gate::Z(qubit))?;
        }
        if self.x {
            state.apply(Gate::X(qubit))?;
        }
        Ok(())
    }

    /// Undoes [`Correction::apply`] up to global phase.
    pub fn undo(self, state: &mut PureState, qubit: usize) -> Result<()> {
        if self.x {
            state.apply(Gate::X(qubit))?;
        }
        if self.z {
            state.apply(Gate::Z(qubit))?;
        }
        Ok(())
    }
}

/// Which functions of the correction bits the sender discloses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RevealPolicy {
    /// Every bit, in order `x0, z0, x1, z1, ...`.
    All,
    Nothing,
    /// The XOR of all correction bits.
    XorAll,
}

impl RevealPolicy {
    pub fn reveal(self, corrections: &[Correction]) -> Vec<bool> {
        match self {
            RevealPolicy::All => corrections.iter().flat_map(|c| [c.x, c.z]).collect(),
            RevealPolicy::Nothing => Vec::new(),
            RevealPolicy::XorAll => {
                vec![corrections.iter().fold(false, |acc, c| acc ^ c.x ^ c.z)]
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Teleported {
    /// Register after teleportation; teleported qubits keep their indices.
    pub state: PureState,
    pub corrections: Vec<Correction>,
    pub revealed: Vec<bool>,
}

impl Teleported {
    /// The input state recovered by applying every correction.
    pub fn corrected(&self, qubits: &[usize]) -> Result<PureState> {
        let mut s = self.state.clone();
        for (q, c) in qubits.iter().zip(&self.corrections) {
            c.undo(&mut s, *q)?;
        }
        Ok(s)
    }
}

/// Teleports each listed qubit through its own EPR pair. Pairs are brought
/// in one at a time, so the register may hold up to four qubits.
pub fn teleport_withheld<R: Rng + ?Sized>(
    state: &PureState,
    qubits: &[usize],
    epr_pairs: usize,
    policy: RevealPolicy,
    rng: &mut R,
) -> Result<Teleported> {
    check_resources(qubits, epr_pairs)?;
    let mut s = state.clone();
    let mut corrections = Vec::with_capacity(qubits.len());
    for &q in qubits {
        s.check_qubit(q)?;
        let n = s.num_qubits();
        s = s.tensor(&PureState::epr())?;
        let (mu, mv) = s.bell_measure(q, n, rng)?;
        // the receiver half sits last after the two measured qubits vanish
        s.move_qubit(n - 1, q)?;
        corrections.push(Correction::new(mv, mu));
    }
    let revealed = policy.reveal(&corrections);
    Ok(Teleported {
        state: s,
        corrections,
        revealed,
    })
}

/// Forced-outcome teleportation. Returns the post-teleport register and the
/// probability of the requested outcome pattern.
pub fn teleport_branch(
    state: &PureState,
    qubits: &[usize],
    corrections: &[Correction],
) -> Result<(PureState, f64)> {
    check_resources(qubits, corrections.len())?;
    let mut s = state.clone();
    let mut prob = 1.0;
    for (&q, c) in qubits.iter().zip(corrections) {
        s.check_qubit(q)?;
        let n = s.num_qubits();
        s = s.tensor(&PureState::epr())?;
        let p = s
            .bell_project(q, n, (c.z, c.x))?
            .ok_or_else(|| Error::InvalidState("zero-probability Bell outcome".into()))?;
        prob *= p;
        s.move_qubit(n - 1, q)?;
    }
    Ok((s, prob))
}

fn check_resources(qubits: &[usize], pairs: usize) -> Result<()> {
    if pairs < qubits.len() {
        return Err(Error::InsufficientResources {
            what: "EPR pairs",
            needed: qubits.len(),
            available: pairs,
        });
    }
    Ok(())
}
