use std::collections::BTreeSet;
use std::ops::BitXor;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::Gate;
use crate::protocols::Party;

/// `constant ⊕ Σ_{v ∈ support} v` over GF(2).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineForm {
    pub constant: bool,
    pub support: BTreeSet<usize>,
}

impl AffineForm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(bit: bool) -> Self {
        Self {
            constant: bit,
            support: BTreeSet::new(),
        }
    }

    pub fn var(id: usize) -> Self {
        Self {
            constant: false,
            support: BTreeSet::from([id]),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.support.is_empty()
    }

    /// Value under `values[id]`; panics on ids outside `values`.
    pub fn evaluate(&self, values: &[bool]) -> bool {
        self.support.iter().fold(self.constant, |acc, &v| acc ^ values[v])
    }

    pub fn xor_assign(&mut self, other: &AffineForm) {
        self.constant ^= other.constant;
        self.support = self.support.symmetric_difference(&other.support).copied().collect();
    }

    pub fn flip(&mut self, bit: bool) {
        self.constant ^= bit;
    }
}

impl BitXor for &AffineForm {
    type Output = AffineForm;

    fn bitxor(self, rhs: &AffineForm) -> AffineForm {
        let mut out = self.clone();
        out.xor_assign(rhs);
        out
    }
}

/// Pauli mask `X^x Z^z` on one data qubit.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QubitMask {
    pub x: AffineForm,
    pub z: AffineForm,
}

/// Symbolic Pauli masks on Bob's data qubits plus the variable registry.
///
/// Bob's physical register equals `⊗_q X^{x_q} Z^{z_q}` applied to the true
/// intermediate state, up to global phase, once the variables take their
/// values. The ledger itself never holds values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskLedger {
    pub masks: Vec<QubitMask>,
    /// Owner of variable `id`.
    pub owners: Vec<Party>,
}

impl MaskLedger {
    /// Masks after Alice teleports `n` qubits: qubit `q` carries
    /// `X^{v_{2q}} Z^{v_{2q+1}}`, all variables hers.
    pub fn after_teleport(n: usize) -> Self {
        Self {
            masks: (0..n)
                .map(|q| QubitMask {
                    x: AffineForm::var(2 * q),
                    z: AffineForm::var(2 * q + 1),
                })
                .collect(),
            owners: vec![Party::Alice; 2 * n],
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.masks.len()
    }

    pub fn num_variables(&self) -> usize {
        self.owners.len()
    }

    pub fn variables_of(&self, party: Party) -> Vec<usize> {
        (0..self.owners.len()).filter(|&v| self.owners[v] == party).collect()
    }

    pub fn new_variable(&mut self, owner: Party) -> usize {
        self.owners.push(owner);
        self.owners.len() - 1
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q < self.masks.len() {
            Ok(())
        } else {
            Err(Error::QubitOutOfRange {
                qubit: q,
                num_qubits: self.masks.len(),
            })
        }
    }

    /// Mask bits `(x, z)` per qubit under the given variable values.
    pub fn evaluate(&self, values: &[bool]) -> Result<Vec<(bool, bool)>> {
        if values.len() != self.owners.len() {
            return Err(Error::DimensionMismatch {
                left: values.len(),
                right: self.owners.len(),
            });
        }
        Ok(self
            .masks
            .iter()
            .map(|m| (m.x.evaluate(values), m.z.evaluate(values)))
            .collect())
    }
}

/// Rewrites the masks for Bob applying a Clifford gate, dropping phases.
pub fn key_update(ledger: &MaskLedger, gate: Gate) -> Result<MaskLedger> {
    let mut out = ledger.clone();
    for q in gate.targets() {
        out.check_qubit(q)?;
    }
    match gate {
        Gate::H(q) => {
            let m = &mut out.masks[q];
            std::mem::swap(&mut m.x, &mut m.z);
        }
        Gate::P(q) | Gate::Pdag(q) => {
            let m = &mut out.masks[q];
            let x = m.x.clone();
            m.z.xor_assign(&x);
        }
        Gate::X(_) | Gate::Y(_) | Gate::Z(_) => {}
        Gate::Cnot { control, target } => {
            if control == target {
                return Err(Error::DuplicateTargets(vec![control, target]));
            }
            let xc = out.masks[control].x.clone();
            let zt = out.masks[target].z.clone();
            out.masks[target].x.xor_assign(&xc);
            out.masks[control].z.xor_assign(&zt);
        }
        Gate::T(_) | Gate::Tdag(_) => return Err(Error::TGateInKeyUpdate),
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::random::haar_state;
    use crate::kernel::{Correction, PureState};
    use crate::seed::stream_rng;

    #[test]
    fn forms_cancel() {
        let a = &AffineForm::var(1) ^ &AffineForm::var(2);
        let b = &a ^ &AffineForm::var(1);
        assert_eq!(b, AffineForm::var(2));
        let mut c = &b ^ &b;
        assert_eq!(c, AffineForm::zero());
        c.flip(true);
        assert!(c.evaluate(&[]));
    }

    #[test]
    fn hadamard_swaps() {
        let mut l = MaskLedger::after_teleport(1);
        l.masks[0].z = AffineForm::zero();
        let out = key_update(&l, Gate::H(0)).unwrap();
        assert_eq!(out.masks[0].x, AffineForm::zero());
        assert_eq!(out.masks[0].z, AffineForm::var(0));
    }

    #[test]
    fn cnot_spreads() {
        let mut l = MaskLedger::after_teleport(2);
        l.masks[0].z = AffineForm::zero();
        l.masks[1].x = AffineForm::zero();
        let out = key_update(&l, Gate::Cnot { control: 0, target: 1 }).unwrap();
        let (v1, v2) = (AffineForm::var(0), AffineForm::var(3));
        assert_eq!(out.masks[0], QubitMask { x: v1.clone(), z: v2.clone() });
        assert_eq!(out.masks[1], QubitMask { x: v1, z: v2 });
    }

    #[test]
    fn t_rejected() {
        let l = MaskLedger::after_teleport(1);
        assert_eq!(key_update(&l, Gate::T(0)), Err(Error::TGateInKeyUpdate));
    }

    #[test]
    fn t_conjugates_x_to_px() {
        use crate::kernel::GateKind;
        let (t, x, p) = (GateKind::T.matrix(), GateKind::X.matrix(), GateKind::P.matrix());
        let lhs = &t * &x * t.adjoint();
        let phase = crate::kernel::C64::from_polar(1.0, -std::f64::consts::FRAC_PI_4);
        let rhs = (&p * &x).map(|v| v * phase);
        assert!((lhs - rhs).norm() < 1e-12);
    }

    fn masked(state: &PureState, bits: &[(bool, bool)]) -> PureState {
        let mut s = state.clone();
        for (q, &(x, z)) in bits.iter().enumerate() {
            Correction::new(x, z).apply(&mut s, q).unwrap();
        }
        s
    }

    #[test]
    fn update_commutes_with_gate() {
        let mut rng = stream_rng(9, 0);
        let gates = [
            Gate::H(0),
            Gate::H(1),
            Gate::P(0),
            Gate::P(1),
            Gate::Cnot { control: 0, target: 1 },
            Gate::Cnot { control: 1, target: 0 },
        ];
        let ledger = MaskLedger::after_teleport(2);
        for values in 0..16u32 {
            let vals: Vec<bool> = (0..4).map(|i| values >> i & 1 == 1).collect();
            for g in gates {
                let psi = haar_state(2, &mut rng);
                let mut lhs = masked(&psi, &ledger.evaluate(&vals).unwrap());
                lhs.apply(g).unwrap();
                let mut truth = psi.clone();
                truth.apply(g).unwrap();
                let rhs = masked(&truth, &key_update(&ledger, g).unwrap().evaluate(&vals).unwrap());
                assert!(lhs.fidelity(&rhs).unwrap() > 1.0 - 1e-12, "{g:?} {vals:?}");
            }
        }
    }
}
