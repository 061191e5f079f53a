//! One-message protocol: Bob prepares four qubits from random bits and his
//! input, and sends them with the parity bit `w`.

use std::sync::OnceLock;

use rand::Rng;

use super::adversary::{AdversaryStrategy, StrategyKind};
use super::noise::{apply_channel_noise, NoiseModel};
use super::transcript::{Failure, Guess, NlandTranscript, ProtocolKind, RunResult, StateSnapshot};
use super::{OneTimeTable, Party};
use crate::error::Result;
use crate::kernel::linalg::CMatrix;
use crate::kernel::{helstrom, Basis, DensityMatrix, Gate, PureState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Nland3Coins {
    pub i: [bool; 4],
    pub y: bool,
    pub s: bool,
}

impl Nland3Coins {
    pub fn draw<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self {
            i: [rng.random(), rng.random(), rng.random(), rng.random()],
            y: rng.random(),
            s: rng.random(),
        }
    }

    /// All 64 assignments.
    pub fn all() -> impl Iterator<Item = Nland3Coins> {
        (0..64u8).map(|b| Nland3Coins {
            i: [b & 1 != 0, b & 2 != 0, b & 4 != 0, b & 8 != 0],
            y: b & 16 != 0,
            s: b & 32 != 0,
        })
    }

    pub fn w(&self) -> bool {
        self.i.iter().fold(false, |acc, b| acc ^ b)
    }
}

/// The entangling layer applied after the first two qubits are prepared.
fn bob_layer(y: bool) -> Vec<Gate> {
    let mut gates = vec![
        Gate::Cnot {
            control: 0,
            target: 2,
        },
        Gate::Cnot {
            control: 1,
            target: 3,
        },
    ];
    if !y {
        gates.push(Gate::Cnot {
            control: 0,
            target: 1,
        });
    }
    gates
}

/// Honest Bob's four-qubit state.
pub fn bob_state(i: [bool; 4], y: bool) -> PureState {
    let mut s = PureState::from_bits(&i).expect("4 qubits");
    s.apply(Gate::H(0)).expect("valid");
    s.apply(Gate::H(1)).expect("valid");
    s.apply_all(&bob_layer(y)).expect("valid");
    s
}

/// Alice's table bits from her four outcomes.
pub fn alice_output(outcomes: &[bool], s: bool, w: bool) -> (bool, bool) {
    let xi = s as usize;
    let g = outcomes
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != xi)
        .fold(false, |acc, (_, o)| acc ^ o);
    (outcomes[xi], g ^ (s & w))
}

/// Helstrom projectors (guess `y = 1`) for each value of `w`, with the
/// resulting overall success probability.
pub fn y_distinguisher() -> &'static ([CMatrix; 2], f64) {
    static CACHE: OnceLock<([CMatrix; 2], f64)> = OnceLock::new();
    CACHE.get_or_init(|| {
        let mut success = 0.0;
        let projs = [false, true].map(|w| {
            let avg = |y: bool| {
                let states: Vec<DensityMatrix> = Nland3Coins::all()
                    .filter(|c| !c.s && c.y == y && c.w() == w)
                    .map(|c| bob_state(c.i, y).density())
                    .collect();
                let parts: Vec<_> = states.iter().map(|d| (1.0 / states.len() as f64, d)).collect();
                DensityMatrix::mixture(&parts).expect("same size")
            };
            let (proj, p) = helstrom(&avg(false), 0.25, &avg(true), 0.25).expect("same size");
            success += p;
            proj
        });
        (projs, success)
    })
}

pub fn run_nland3<R: Rng + ?Sized>(
    alice: &AdversaryStrategy,
    bob: &AdversaryStrategy,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<RunResult> {
    alice.validate(ProtocolKind::Nland3, Party::Alice)?;
    bob.validate(ProtocolKind::Nland3, Party::Bob)?;
    noise.validate()?;
    let coins = Nland3Coins::draw(rng);
    run_nland3_with(coins, alice, bob, noise, rng)
}

pub fn run_nland3_with<R: Rng + ?Sized>(
    coins: Nland3Coins,
    alice: &AdversaryStrategy,
    bob: &AdversaryStrategy,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<RunResult> {
    let Nland3Coins { i, y, s } = coins;
    let w = coins.w();
    let f = i[2] ^ i[3];
    let mut tr = NlandTranscript::new(ProtocolKind::Nland3, y, s);
    tr.i = Some(i);
    tr.w = Some(w);
    tr.h = Some(f);
    if noise.lost(rng) {
        return Ok(RunResult::failed(tr, Failure::Lost));
    }

    let mut reg = match &bob.kind {
        StrategyKind::CustomSigma { state, .. } if state.num_qubits() == 2 => {
            state.tensor(&PureState::from_bits(&i[2..])?)?
        }
        StrategyKind::CustomSigma { state, .. } => state.clone(),
        _ => bob_state(i, y),
    };
    tr.sent_states.push(StateSnapshot::new("bob_to_alice", &reg));
    apply_channel_noise(&mut reg, &[0, 1, 2, 3], noise, rng)?;
    if bob.is_curious() {
        tr.notes.push(format!("bob: y={} w={}", y as u8, w as u8));
    }

    let (x, e) = if matches!(alice.kind, StrategyKind::Distinguisher) {
        let (projs, _) = y_distinguisher();
        let p1 = reg.density().expectation(&projs[w as usize])?;
        let guess = rng.random::<f64>() < p1;
        tr.guesses.push(Guess {
            by: Party::Alice,
            variable: "y",
            value: guess,
            truth: y,
        });
        (rng.random::<bool>(), rng.random::<bool>())
    } else {
        let basis = Basis::from_bit(s);
        let mut outcomes = Vec::with_capacity(4);
        for q in 0..4 {
            outcomes.push(reg.measure(q, basis, rng)?);
        }
        let out = alice_output(&outcomes, s, w);
        if alice.is_curious() {
            tr.notes.push(format!("alice: w={}", w as u8));
        }
        tr.outcomes = outcomes;
        out
    };
    tr.x = Some(x);
    Ok(RunResult::done(OneTimeTable::new(0, x, y, e, f), tr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::index_to_bits;
    use crate::seed::stream_rng;

    #[test]
    fn exhaustive_over_coins_and_outcomes() {
        let mut cases = 0;
        for coins in Nland3Coins::all() {
            let state = bob_state(coins.i, coins.y);
            let basis = Basis::from_bit(coins.s);
            let dist = state.outcome_distribution(&[basis; 4]).unwrap();
            for (idx, p) in dist.iter().enumerate() {
                if *p > 1e-12 {
                    let outcomes = index_to_bits(idx, 4);
                    let (x, e) = alice_output(&outcomes, coins.s, coins.w());
                    let t = OneTimeTable::new(0, x, coins.y, e, coins.i[2] ^ coins.i[3]);
                    assert!(t.is_correct(), "{coins:?} {outcomes:?}");
                }
            }
            cases += 1;
        }
        assert_eq!(cases, 64);
    }

    #[test]
    fn honest_runs_are_correct() {
        let a = AdversaryStrategy::honest(Party::Alice);
        let b = AdversaryStrategy::honest(Party::Bob);
        for k in 0..2000 {
            let run = run_nland3(&a, &b, &NoiseModel::NONE, &mut stream_rng(50, k)).unwrap();
            assert!(run.table.unwrap().is_correct());
        }
    }

    #[test]
    fn distinguisher_success_is_three_quarters() {
        let (_, success) = y_distinguisher();
        assert!((success - 0.75).abs() < 1e-9, "{success}");
    }

    #[test]
    fn forced_x_cheat_fixes_x_and_randomizes_table() {
        let a = AdversaryStrategy::honest(Party::Alice);
        let b = AdversaryStrategy::bob_forced_x();
        let n = 4000;
        let mut correct = 0;
        for k in 0..n {
            let run = run_nland3(&a, &b, &NoiseModel::NONE, &mut stream_rng(51, k)).unwrap();
            let t = run.table.unwrap();
            assert!(!t.x);
            correct += t.is_correct() as u32;
        }
        let rate = correct as f64 / n as f64;
        assert!((rate - 0.5).abs() < 0.03, "{rate}");
    }
}
