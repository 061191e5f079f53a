use serde::{Deserialize, Serialize};

use super::{Party, ProtocolKind};
use crate::error::{Error, Result};
use crate::kernel::{c, Basis, PureState};

/// Bob-side variable a cheating Alice tries to learn in Protocol 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    /// Bob's input bit.
    Y,
    /// Bob's output bit `r = h1 ⊕ h2`.
    R,
    /// `y ⊕ r`.
    Yr,
}

impl Target {
    pub const ALL: [Target; 3] = [Target::Y, Target::R, Target::Yr];

    /// Value of the target for Bob's branch `(y, h1, h2)`.
    pub fn value(self, y: bool, h1: bool, h2: bool) -> bool {
        match self {
            Target::Y => y,
            Target::R => h1 ^ h2,
            Target::Yr => y ^ h1 ^ h2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Target::Y => "y",
            Target::R => "r",
            Target::Yr => "y^r",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StrategyKind {
    Honest,
    /// Follows the protocol and only writes notes about what it already
    /// holds; never draws extra randomness.
    HonestButCurious,
    /// Bob in Protocol 1 measures the received qubits in the listed bases
    /// and guesses `x` from the first outcome.
    FixedMeasurement { bases: Vec<Basis> },
    /// Alice in Protocol 1 sends the first two qubits of `state` (the rest
    /// are her ancilla) and later measures everything to guess `y`.
    EntangledInput { state: PureState },
    /// Alice in Protocol 1: like `EntangledInput` with a chosen target.
    /// Bob in Protocol 2: sends `state` in place of his honest preparation;
    /// a two-qubit `state` is followed by his random `|i3 i4>`.
    CustomSigma { state: PureState, target: Target },
    /// Alice in Protocol 2 measures the received state jointly with `w` to
    /// guess `y` optimally.
    Distinguisher,
    /// Alice in Protocol 11 keeps only the listed outcome patterns of her
    /// first two EPR halves and declares the other instances failed.
    DeclareFailure { keep: Vec<[bool; 2]> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdversaryStrategy {
    pub role: Party,
    pub kind: StrategyKind,
}

impl AdversaryStrategy {
    pub fn honest(role: Party) -> Self {
        Self {
            role,
            kind: StrategyKind::Honest,
        }
    }

    pub fn curious(role: Party) -> Self {
        Self {
            role,
            kind: StrategyKind::HonestButCurious,
        }
    }

    /// Bob's Z⊗X measurement on the received Protocol 1 state.
    pub fn bob_fixed_zx() -> Self {
        Self {
            role: Party::Bob,
            kind: StrategyKind::FixedMeasurement {
                bases: vec![Basis::Z, Basis::X],
            },
        }
    }

    /// Alice sends `(|00> + |01> + |10> - |11>)/2` in Protocol 1, which lets
    /// her read off `y` exactly.
    pub fn alice_entangled() -> Self {
        Self {
            role: Party::Alice,
            kind: StrategyKind::EntangledInput {
                state: cheat_state(),
            },
        }
    }

    /// Bob in Protocol 2 sends `|0>|+>|i3 i4>`, which fixes Alice's `x`.
    pub fn bob_forced_x() -> Self {
        let state = PureState::product(&[false, false], &[Basis::Z, Basis::X]).expect("2 qubits");
        Self {
            role: Party::Bob,
            kind: StrategyKind::CustomSigma {
                state,
                target: Target::Y,
            },
        }
    }

    pub fn alice_distinguisher() -> Self {
        Self {
            role: Party::Alice,
            kind: StrategyKind::Distinguisher,
        }
    }

    pub fn declare_failure(keep: Vec<[bool; 2]>) -> Self {
        Self {
            role: Party::Alice,
            kind: StrategyKind::DeclareFailure { keep },
        }
    }

    pub fn is_honest(&self) -> bool {
        matches!(self.kind, StrategyKind::Honest | StrategyKind::HonestButCurious)
    }

    pub fn is_curious(&self) -> bool {
        matches!(self.kind, StrategyKind::HonestButCurious)
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            StrategyKind::Honest => "honest",
            StrategyKind::HonestButCurious => "honest_but_curious",
            StrategyKind::FixedMeasurement { .. } => "fixed_measurement",
            StrategyKind::EntangledInput { .. } => "entangled_input",
            StrategyKind::CustomSigma { .. } => "custom_sigma",
            StrategyKind::Distinguisher => "distinguisher",
            StrategyKind::DeclareFailure { .. } => "declare_failure",
        }
    }

    /// Checks that the strategy is meaningful for `role` in `protocol`.
    pub fn validate(&self, protocol: ProtocolKind, role: Party) -> Result<()> {
        if self.role != role {
            return Err(Error::Strategy(format!(
                "{:?} strategy supplied for {:?}",
                self.role, role
            )));
        }
        let fail = |why: &str| Err(Error::Strategy(format!("{} {why}", self.name())));
        match (&self.kind, protocol, role) {
            (StrategyKind::Honest | StrategyKind::HonestButCurious, _, _) => Ok(()),
            (StrategyKind::FixedMeasurement { bases }, ProtocolKind::Nland, Party::Bob) => {
                if bases.len() == 2 {
                    Ok(())
                } else {
                    fail("needs one basis per received qubit (2)")
                }
            }
            (
                StrategyKind::EntangledInput { state } | StrategyKind::CustomSigma { state, .. },
                ProtocolKind::Nland,
                Party::Alice,
            ) => {
                if (2..=4).contains(&state.num_qubits()) {
                    Ok(())
                } else {
                    fail("needs 2 system qubits plus at most 2 ancilla")
                }
            }
            (StrategyKind::CustomSigma { state, .. }, ProtocolKind::Nland3, Party::Bob) => {
                if matches!(state.num_qubits(), 2 | 4) {
                    Ok(())
                } else {
                    fail("needs a 2- or 4-qubit state")
                }
            }
            (StrategyKind::Distinguisher, ProtocolKind::Nland3, Party::Alice) => Ok(()),
            (StrategyKind::DeclareFailure { keep }, ProtocolKind::Nland2, Party::Alice) => {
                if keep.is_empty() {
                    fail("keeps no outcome pattern")
                } else {
                    Ok(())
                }
            }
            _ => fail(&format!("is not defined for {role:?} in {}", protocol.name())),
        }
    }
}

/// `(|00> + |01> + |10> - |11>)/2`.
pub fn cheat_state() -> PureState {
    PureState::from_amplitudes(vec![c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(-0.5, 0.0)])
        .expect("normalized")
}
