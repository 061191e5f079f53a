//! Garden-hose gadget: applies `P†` to a qubit iff `p ⊕ q = 1`, where `p`
//! is Alice's bit and `q` is Bob's, leaving only a Pauli byproduct.
//!
//! Layout: four EPR pairs `(B_k, A_k)` with `B_k` on Bob's side, and a pair
//! `(E, O)` held by Bob. Bob teleports the input through `B_q`, so it lands
//! on Alice's `A_q`. Alice always Bell-measures `(A_0, A_2)` and
//! `(A_1, A_3)`, first applying `P†` to `A_1` when `p = 0` or to `A_0` when
//! `p = 1`. Bob then Bell-measures `(B_{2+q}, E)`, which swaps the state
//! onto `O`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{Correction, Gate, PureState};

/// Ideal EPR pairs for one gadget use.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetResources {
    pub id: u64,
    consumed: bool,
}

impl GadgetResources {
    pub const EPR_PAIRS: usize = 5;

    pub fn fresh(id: u64) -> Self {
        Self { id, consumed: false }
    }

    pub fn is_consumed(&self) -> bool {
        self.consumed
    }
}

/// Outcome `(m_u, m_v)` of a Bell measurement on `(u, v)`; the teleported
/// state picks up `X^{m_v} Z^{m_u}`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BellBits {
    pub u: bool,
    pub v: bool,
}

impl BellBits {
    fn pauli(self) -> Correction {
        Correction::new(self.v, self.u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetOutcome {
    pub p: bool,
    pub q: bool,
    /// Alice's two measurements, on `(A_0, A_2)` and `(A_1, A_3)`.
    pub alice: [BellBits; 2],
    /// Bob's measurement on (input, `B_q`).
    pub bob_in: BellBits,
    /// Bob's measurement on (`B_{2+q}`, `E`).
    pub bob_out: BellBits,
    /// Output equals `X^x Z^z P†^{p⊕q}` applied to the input.
    pub pauli: Correction,
}

impl GadgetOutcome {
    pub fn applied_pdag(&self) -> bool {
        self.p ^ self.q
    }
}

/// Byproduct `X^x Z^z` of a gadget with the given outcomes; Alice's slot
/// `q` is the one on the path.
pub fn gadget_pauli(p: bool, q: bool, alice: [BellBits; 2], bob_in: BellBits, bob_out: BellBits) -> Correction {
    let a = alice[q as usize];
    let (i, m, o) = (bob_in.pauli(), a.pauli(), bob_out.pauli());
    // moving X^i.x past P† adds Z^{i.x}
    Correction::new(i.x ^ m.x ^ o.x, i.z ^ m.z ^ o.z ^ ((p ^ q) & i.x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Data(usize),
    B(usize),
    A(usize),
    E,
    O,
}

struct Register {
    state: PureState,
    labels: Vec<Slot>,
}

impl Register {
    fn pos(&self, s: Slot) -> usize {
        self.labels.iter().position(|&l| l == s).expect("slot present")
    }

    fn add_pair(&mut self, a: Slot, b: Slot) -> Result<()> {
        self.state = self.state.tensor(&PureState::epr())?;
        self.labels.extend([a, b]);
        Ok(())
    }

    fn bell<R: Rng + ?Sized>(&mut self, u: Slot, v: Slot, rng: &mut R) -> Result<BellBits> {
        let (pu, pv) = (self.pos(u), self.pos(v));
        let (mu, mv) = self.state.bell_measure(pu, pv, rng)?;
        self.labels.retain(|&l| l != u && l != v);
        Ok(BellBits { u: mu, v: mv })
    }
}

/// Runs the gadget on `qubit` of `state`, which is replaced in place by
/// the output qubit `O`.
pub fn garden_hose<R: Rng + ?Sized>(
    p: bool,
    q: bool,
    resources: &mut GadgetResources,
    state: &mut PureState,
    qubit: usize,
    rng: &mut R,
) -> Result<GadgetOutcome> {
    if resources.consumed {
        return Err(Error::ResourceReuse);
    }
    state.check_qubit(qubit)?;
    resources.consumed = true;
    let n = state.num_qubits();
    let (qi, p_slot) = (q as usize, !p as usize);
    let mut path = Register {
        state: state.clone(),
        labels: (0..n).map(Slot::Data).collect(),
    };
    // pairs are created when first touched, which keeps the register small
    path.add_pair(Slot::B(qi), Slot::A(qi))?;
    let bob_in = path.bell(Slot::Data(qubit), Slot::B(qi), rng)?;
    path.add_pair(Slot::B(2 + qi), Slot::A(2 + qi))?;
    if p_slot == qi {
        let at = path.pos(Slot::A(qi));
        path.state.apply(Gate::Pdag(at))?;
    }
    let on_path = path.bell(Slot::A(qi), Slot::A(2 + qi), rng)?;
    path.add_pair(Slot::E, Slot::O)?;
    let bob_out = path.bell(Slot::B(2 + qi), Slot::E, rng)?;

    // Alice's other slot never meets the data; Bob leaves its halves alone
    let other = 1 - qi;
    let mut side = Register {
        state: PureState::epr(),
        labels: vec![Slot::B(other), Slot::A(other)],
    };
    side.add_pair(Slot::B(2 + other), Slot::A(2 + other))?;
    if p_slot == other {
        let at = side.pos(Slot::A(other));
        side.state.apply(Gate::Pdag(at))?;
    }
    let off_path = side.bell(Slot::A(other), Slot::A(2 + other), rng)?;

    let mut alice = [on_path; 2];
    alice[other] = off_path;
    let out = path.pos(Slot::O);
    path.state.move_qubit(out, qubit)?;
    debug_assert_eq!(path.state.num_qubits(), n);
    *state = path.state;
    Ok(GadgetOutcome {
        p,
        q,
        alice,
        bob_in,
        bob_out,
        pauli: gadget_pauli(p, q, alice, bob_in, bob_out),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::random::haar_state;
    use crate::kernel::Basis;
    use crate::seed::stream_rng;

    const BITS: [(bool, bool); 4] = [(false, false), (false, true), (true, false), (true, true)];

    /// `X^x Z^z P†^s` on qubit 1 of `reference`.
    fn expected(reference: &PureState, s: bool, pauli: Correction) -> PureState {
        let mut e = reference.clone();
        if s {
            e.apply(Gate::Pdag(1)).unwrap();
        }
        pauli.apply(&mut e, 1).unwrap();
        e
    }

    #[test]
    fn channel_matches_on_entangled_inputs() {
        let mut rng = stream_rng(1, 0);
        for (p, q) in BITS {
            for trial in 0..20 {
                // qubit 0 is an untouched reference, so this checks the channel
                let psi = haar_state(2, &mut rng);
                let mut s = psi.clone();
                let mut res = GadgetResources::fresh(trial);
                let out = garden_hose(p, q, &mut res, &mut s, 1, &mut rng).unwrap();
                let f = s.fidelity(&expected(&psi, p ^ q, out.pauli)).unwrap();
                assert!(f > 1.0 - 1e-9, "p={p} q={q} f={f}");
            }
        }
    }

    #[test]
    fn basis_inputs() {
        let mut rng = stream_rng(2, 0);
        for (p, q) in BITS {
            for bits in BITS {
                let psi = PureState::product(&[bits.0, bits.1], &[Basis::Z, Basis::X]).unwrap();
                let mut s = psi.clone();
                let out = garden_hose(p, q, &mut GadgetResources::fresh(0), &mut s, 1, &mut rng).unwrap();
                assert!(s.fidelity(&expected(&psi, p ^ q, out.pauli)).unwrap() > 1.0 - 1e-9);
            }
        }
    }

    #[test]
    fn zero_controls_give_pauli_only() {
        let mut rng = stream_rng(3, 0);
        let psi = haar_state(1, &mut rng);
        let mut s = psi.clone();
        let out = garden_hose(false, false, &mut GadgetResources::fresh(0), &mut s, 0, &mut rng).unwrap();
        assert!(!out.applied_pdag());
        out.pauli.undo(&mut s, 0).unwrap();
        assert!(s.fidelity(&psi).unwrap() > 1.0 - 1e-9);
    }

    #[test]
    fn resources_single_use() {
        let mut rng = stream_rng(4, 0);
        let mut s = haar_state(1, &mut rng);
        let mut res = GadgetResources::fresh(7);
        garden_hose(true, false, &mut res, &mut s, 0, &mut rng).unwrap();
        assert!(res.is_consumed());
        assert_eq!(
            garden_hose(true, false, &mut res, &mut s, 0, &mut rng).unwrap_err(),
            Error::ResourceReuse
        );
    }

    #[test]
    fn other_qubits_untouched() {
        let mut rng = stream_rng(5, 0);
        let psi = haar_state(3, &mut rng);
        let mut s = psi.clone();
        let out = garden_hose(true, true, &mut GadgetResources::fresh(0), &mut s, 2, &mut rng).unwrap();
        out.pauli.undo(&mut s, 2).unwrap();
        assert!(s.fidelity(&psi).unwrap() > 1.0 - 1e-9);
    }

    #[test]
    fn two_gadgets_compose() {
        let mut rng = stream_rng(6, 0);
        for (p1, q1) in BITS {
            for (p2, q2) in BITS {
                let psi = haar_state(2, &mut rng);
                let mut s = psi.clone();
                let g1 = garden_hose(p1, q1, &mut GadgetResources::fresh(0), &mut s, 1, &mut rng).unwrap();
                let g2 = garden_hose(p2, q2, &mut GadgetResources::fresh(1), &mut s, 1, &mut rng).unwrap();
                let (s1, s2) = (p1 ^ q1, p2 ^ q2);
                let (a1, b1) = (g1.pauli.x, g1.pauli.z);
                let (a2, b2) = (g2.pauli.x, g2.pauli.z);
                // X^a2 Z^b2 P†^s2 X^a1 Z^b1 P†^s1, with P†P† = Z
                let tracked = Correction::new(a1 ^ a2, b1 ^ b2 ^ (s2 & a1) ^ (s1 & s2));
                let f = s.fidelity(&expected(&psi, s1 ^ s2, tracked)).unwrap();
                assert!(f > 1.0 - 1e-9, "{p1} {q1} {p2} {q2}: {f}");
            }
        }
    }
}
