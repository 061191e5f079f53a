//! Two-message protocol: Alice encodes `x` in one of two conjugate bases,
//! Bob applies a `y`-controlled CNOT plus random masks and returns the
//! qubits.

use rand::Rng;

use super::adversary::{AdversaryStrategy, StrategyKind, Target};
use super::noise::{apply_channel_noise, NoiseModel};
use super::transcript::{Failure, Guess, NlandTranscript, ProtocolKind, RunResult, StateSnapshot};
use super::{OneTimeTable, Party};
use crate::error::Result;
use crate::kernel::linalg::CMatrix;
use crate::kernel::{helstrom, Basis, DensityMatrix, Gate, PureState};

/// Every private bit of one honest run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NlandCoins {
    pub x: bool,
    pub s: bool,
    pub t: bool,
    pub y: bool,
    pub h1: bool,
    pub h2: bool,
    pub p: bool,
}

impl NlandCoins {
    pub fn draw<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self {
            x: rng.random(),
            s: rng.random(),
            t: rng.random(),
            y: rng.random(),
            h1: rng.random(),
            h2: rng.random(),
            p: rng.random(),
        }
    }

    /// All 128 assignments.
    pub fn all() -> impl Iterator<Item = NlandCoins> {
        (0..128u8).map(|b| NlandCoins {
            x: b & 1 != 0,
            s: b & 2 != 0,
            t: b & 4 != 0,
            y: b & 8 != 0,
            h1: b & 16 != 0,
            h2: b & 32 != 0,
            p: b & 64 != 0,
        })
    }
}

/// Alice's honest two-qubit encoding: `|x>|t>` for `s = 0`, and the X-basis
/// states labelled `t` and `x` for `s = 1`.
pub fn alice_encoding(x: bool, s: bool, t: bool) -> PureState {
    let basis = Basis::from_bit(s);
    let bits = if s { [t, x] } else { [x, t] };
    PureState::product(&bits, &[basis, basis]).expect("2 qubits")
}

/// Bob's operations on the two received qubits (qubits 0 and 1).
pub fn bob_gates(y: bool, h1: bool, h2: bool, p: bool) -> Vec<Gate> {
    let mut gates = Vec::with_capacity(5);
    if !y {
        gates.push(Gate::Cnot {
            control: 0,
            target: 1,
        });
    }
    if h1 {
        gates.push(Gate::Y(0));
    }
    if h2 {
        gates.push(Gate::Y(1));
    }
    if p {
        gates.push(Gate::Z(0));
        gates.push(Gate::Z(1));
    }
    gates
}

/// Alice's returned state for each of Bob's 16 branches `(y, h1, h2, p)`,
/// in that bit order (y most significant).
pub fn returned_branches(sent: &PureState) -> Result<Vec<((bool, bool, bool, bool), PureState)>> {
    let mut out = Vec::with_capacity(16);
    for b in 0..16u8 {
        let key = (b & 8 != 0, b & 4 != 0, b & 2 != 0, b & 1 != 0);
        let mut s = sent.clone();
        s.apply_all(&bob_gates(key.0, key.1, key.2, key.3))?;
        out.push((key, s));
    }
    Ok(out)
}

/// Helstrom measurement for `target` on the returned register, computed
/// from Alice's own prepared state.
pub fn target_projector(sent: &PureState, target: Target) -> Result<CMatrix> {
    let mut groups: [Vec<DensityMatrix>; 2] = [Vec::new(), Vec::new()];
    for ((y, h1, h2, _), s) in returned_branches(sent)? {
        groups[target.value(y, h1, h2) as usize].push(s.density());
    }
    let avg = |g: &[DensityMatrix]| {
        let parts: Vec<_> = g.iter().map(|d| (1.0 / g.len() as f64, d)).collect();
        DensityMatrix::mixture(&parts)
    };
    let (proj, _) = helstrom(&avg(&groups[0])?, 0.5, &avg(&groups[1])?, 0.5)?;
    Ok(proj)
}

pub fn run_nland<R: Rng + ?Sized>(
    alice: &AdversaryStrategy,
    bob: &AdversaryStrategy,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<RunResult> {
    alice.validate(ProtocolKind::Nland, Party::Alice)?;
    bob.validate(ProtocolKind::Nland, Party::Bob)?;
    noise.validate()?;
    let coins = NlandCoins::draw(rng);
    run_nland_with(coins, alice, bob, noise, rng)
}

/// Runs with fixed private bits; `rng` drives only measurements, noise and
/// the cheating parties' extra choices.
pub fn run_nland_with<R: Rng + ?Sized>(
    coins: NlandCoins,
    alice: &AdversaryStrategy,
    bob: &AdversaryStrategy,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<RunResult> {
    let NlandCoins { x, s, t, y, h1, h2, p } = coins;
    let f = h1 ^ h2;
    let mut tr = NlandTranscript::new(ProtocolKind::Nland, y, s);
    tr.t = Some(t);
    tr.h1 = Some(h1);
    tr.h2 = Some(h2);
    tr.p = Some(p);
    tr.h = Some(f);
    if noise.lost(rng) {
        return Ok(RunResult::failed(tr, Failure::Lost));
    }

    let (mut reg, cheat) = match &alice.kind {
        StrategyKind::EntangledInput { state } => (state.clone(), Some(Target::Y)),
        StrategyKind::CustomSigma { state, target } => (state.clone(), Some(*target)),
        _ => (alice_encoding(x, s, t), None),
    };
    let prepared = reg.clone();
    tr.sent_states.push(StateSnapshot::new("alice_to_bob", &reg));
    apply_channel_noise(&mut reg, &[0, 1], noise, rng)?;

    if let StrategyKind::FixedMeasurement { bases } = &bob.kind {
        let first = reg.measure(0, bases[0], rng)?;
        reg.measure(1, bases[1], rng)?;
        tr.guesses.push(Guess {
            by: Party::Bob,
            variable: "x",
            value: first,
            truth: x,
        });
    }
    reg.apply_all(&bob_gates(y, h1, h2, p))?;
    tr.sent_states.push(StateSnapshot::new("bob_to_alice", &reg));
    apply_channel_noise(&mut reg, &[0, 1], noise, rng)?;
    if bob.is_curious() {
        tr.notes.push(format!("bob: y={} h={}", y as u8, f as u8));
    }

    let (x_out, e) = match cheat {
        Some(target) => {
            let proj = target_projector(&prepared, target)?;
            let p1 = reg.density().expectation(&proj)?;
            let guess = rng.random::<f64>() < p1;
            tr.guesses.push(Guess {
                by: Party::Alice,
                variable: target.name(),
                value: guess,
                truth: target.value(y, h1, h2),
            });
            // nothing consistent is left to measure; x and e are made up
            (rng.random::<bool>(), rng.random::<bool>())
        }
        None => {
            let basis = Basis::from_bit(s);
            let o1 = reg.measure(0, basis, rng)?;
            let o2 = reg.measure(1, basis, rng)?;
            tr.outcomes = vec![o1, o2];
            if alice.is_curious() {
                tr.notes.push(format!("alice: o1={} o2={}", o1 as u8, o2 as u8));
            }
            (x, o1 ^ o2 ^ t)
        }
    };
    tr.x = Some(x_out);
    Ok(RunResult::done(OneTimeTable::new(0, x_out, y, e, f), tr))
}
