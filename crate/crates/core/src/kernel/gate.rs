use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{c, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    X,
    Y,
    Z,
    H,
    P,
    Pdag,
    T,
    Tdag,
    Cnot,
}

impl GateKind {
    pub const ALL: [GateKind; 9] = [
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::H,
        GateKind::P,
        GateKind::Pdag,
        GateKind::T,
        GateKind::Tdag,
        GateKind::Cnot,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::Cnot => 2,
            _ => 1,
        }
    }

    /// Unitary matrix. Single-qubit kinds give 2x2; CNOT gives the 4x4
    /// matrix on `|control, target>`.
    pub fn matrix(self) -> DMatrix<C64> {
        if self == GateKind::Cnot {
            let mut m = DMatrix::zeros(4, 4);
            m[(0, 0)] = c(1.0, 0.0);
            m[(1, 1)] = c(1.0, 0.0);
            m[(2, 3)] = c(1.0, 0.0);
            m[(3, 2)] = c(1.0, 0.0);
            return m;
        }
        let u = self.single_qubit().expect("single-qubit kind");
        DMatrix::from_fn(2, 2, |i, j| u[i][j])
    }

    pub(crate) fn single_qubit(self) -> Option<[[C64; 2]; 2]> {
        let o = c(0.0, 0.0);
        let l = c(1.0, 0.0);
        let s = FRAC_1_SQRT_2;
        Some(match self {
            GateKind::X => [[o, l], [l, o]],
            GateKind::Y => [[o, c(0.0, -1.0)], [c(0.0, 1.0), o]],
            GateKind::Z => [[l, o], [o, c(-1.0, 0.0)]],
            GateKind::H => [[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]],
            GateKind::P => [[l, o], [o, c(0.0, 1.0)]],
            GateKind::Pdag => [[l, o], [o, c(0.0, -1.0)]],
            GateKind::T => [[l, o], [o, c(s, s)]],
            GateKind::Tdag => [[l, o], [o, c(s, -s)]],
            GateKind::Cnot => return None,
        })
    }
}

/// A gate with its target qubits. CNOT is `Cnot { control, target }`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    X(usize),
    Y(usize),
    Z(usize),
    H(usize),
    P(usize),
    Pdag(usize),
    T(usize),
    Tdag(usize),
    Cnot { control: usize, target: usize },
}

impl Gate {
    pub fn new(kind: GateKind, targets: &[usize]) -> Option<Gate> {
        if targets.len() != kind.arity() {
            return None;
        }
        let q = targets[0];
        Some(match kind {
            GateKind::X => Gate::X(q),
            GateKind::Y => Gate::Y(q),
            GateKind::Z => Gate::Z(q),
            GateKind::H => Gate::H(q),
            GateKind::P => Gate::P(q),
            GateKind::Pdag => Gate::Pdag(q),
            GateKind::T => Gate::T(q),
            GateKind::Tdag => Gate::Tdag(q),
            GateKind::Cnot => Gate::Cnot {
                control: q,
                target: targets[1],
            },
        })
    }

    pub fn kind(&self) -> GateKind {
        match self {
            Gate::X(_) => GateKind::X,
            Gate::Y(_) => GateKind::Y,
            Gate::Z(_) => GateKind::Z,
            Gate::H(_) => GateKind::H,
            Gate::P(_) => GateKind::P,
            Gate::Pdag(_) => GateKind::Pdag,
            Gate::T(_) => GateKind::T,
            Gate::Tdag(_) => GateKind::Tdag,
            Gate::Cnot { .. } => GateKind::Cnot,
        }
    }

    pub fn targets(&self) -> Vec<usize> {
        match *self {
            Gate::X(q)
            | Gate::Y(q)
            | Gate::Z(q)
            | Gate::H(q)
            | Gate::P(q)
            | Gate::Pdag(q)
            | Gate::T(q)
            | Gate::Tdag(q) => vec![q],
            Gate::Cnot { control, target } => vec![control, target],
        }
    }

    pub fn matrix(&self) -> DMatrix<C64> {
        self.kind().matrix()
    }
}
