//! Entanglement-based protocol: Alice measures her halves of four EPR
//! pairs, Bob teleports his first two halves back while disclosing only the
//! parity of the corrections.
//!
//! Simulation order differs from wall-clock order (Alice's first two
//! measurements happen before Bob's operations) but the operations act on
//! disjoint qubits and commute, so outcome statistics are unchanged. The
//! register never exceeds four qubits.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::adversary::{AdversaryStrategy, StrategyKind};
use super::nland3::alice_output;
use super::noise::{apply_channel_noise, NoiseModel};
use super::transcript::{Failure, NlandTranscript, ProtocolKind, RunResult, StateSnapshot};
use super::{OneTimeTable, Party};
use crate::error::{Error, Result};
use crate::kernel::{teleport_withheld, Basis, Gate, PureState, RevealPolicy};
use crate::seed::stream_rng;

/// Default z-score above which Bob's source monitor flags an instance set.
pub const DEFAULT_MONITOR_THRESHOLD: f64 = 4.0;

pub fn run_nland2<R: Rng + ?Sized>(
    alice: &AdversaryStrategy,
    bob: &AdversaryStrategy,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<RunResult> {
    alice.validate(ProtocolKind::Nland2, Party::Alice)?;
    bob.validate(ProtocolKind::Nland2, Party::Bob)?;
    noise.validate()?;
    let s = rng.random();
    let y = rng.random();
    run_nland2_with(s, y, alice, bob, noise, rng)
}

/// Two EPR pairs as `[A1, B1, A2, B2]`.
fn two_pairs() -> PureState {
    PureState::epr().tensor(&PureState::epr()).expect("4 qubits")
}

/// Alice measures her halves of the first two pairs in basis `s`; returns
/// Bob's remaining `[B1, B2]` and her outcomes.
fn alice_first_half<R: Rng + ?Sized>(
    s: bool,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<(PureState, [bool; 2])> {
    let mut reg = two_pairs();
    apply_channel_noise(&mut reg, &[0, 2], noise, rng)?;
    let basis = Basis::from_bit(s);
    let o1 = reg.measure_discard(0, basis, rng)?;
    let o2 = reg.measure_discard(1, basis, rng)?;
    Ok((reg, [o1, o2]))
}

pub fn run_nland2_with<R: Rng + ?Sized>(
    s: bool,
    y: bool,
    alice: &AdversaryStrategy,
    bob: &AdversaryStrategy,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<RunResult> {
    let mut tr = NlandTranscript::new(ProtocolKind::Nland2, y, s);
    if noise.lost(rng) {
        return Ok(RunResult::failed(tr, Failure::Lost));
    }
    let (mut reg, first) = alice_first_half(s, noise, rng)?;
    tr.outcomes = first.to_vec();
    if let StrategyKind::DeclareFailure { keep } = &alice.kind {
        if !keep.contains(&first) {
            return Ok(RunResult::failed(tr, Failure::Declared(Party::Alice)));
        }
    }

    if !y {
        reg.apply(Gate::Cnot {
            control: 0,
            target: 1,
        })?;
    }
    tr.sent_states.push(StateSnapshot::new("bob_before_teleport", &reg));
    let tele = teleport_withheld(&reg, &[0, 1], 2, RevealPolicy::XorAll, rng)?;
    let w = tele.revealed[0];
    let f = tele.corrections[0].x ^ tele.corrections[1].x;
    let mut received = tele.state;
    apply_channel_noise(&mut received, &[0, 1], noise, rng)?;
    tr.w = Some(w);
    tr.h = Some(f);
    tr.corrections = Some(tele.corrections);
    if bob.is_curious() {
        tr.notes.push(format!("bob: y={} f={}", y as u8, f as u8));
    }

    let basis = Basis::from_bit(s);
    let o3 = received.measure(0, basis, rng)?;
    let o4 = received.measure(1, basis, rng)?;
    tr.outcomes.extend([o3, o4]);
    let (x, e) = alice_output(&tr.outcomes, s, w);
    if alice.is_curious() {
        tr.notes.push(format!("alice: w={}", w as u8));
    }
    tr.x = Some(x);
    Ok(RunResult::done(OneTimeTable::new(0, x, y, e, f), tr))
}

/// Bob's statistical check of the entanglement source against selective
/// failure declarations. On a surviving instance he measures his first two
/// halves both in Z or both in X (his choice, at random) and tallies the
/// outcome parity. An honest source gives uniform parities in both bases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceMonitor {
    pub instances: usize,
    pub surviving: usize,
    /// `parity_counts[basis][parity]`, basis 0 = Z, 1 = X.
    pub parity_counts: [[u64; 2]; 2],
    /// `max_b |2 n0/N_b - 1| sqrt(N_b)`.
    pub z_score: f64,
    pub threshold: f64,
    pub flagged: bool,
}

pub fn monitor_source(
    alice: &AdversaryStrategy,
    instances: usize,
    threshold: f64,
    seed: u64,
) -> Result<SourceMonitor> {
    alice.validate(ProtocolKind::Nland2, Party::Alice)?;
    if !(threshold > 0.0) {
        return Err(Error::InvalidArgument(format!("threshold {threshold}")));
    }
    let tallies: Vec<Option<(usize, bool)>> = (0..instances as u64)
        .into_par_iter()
        .map(|i| -> Result<Option<(usize, bool)>> {
            let mut rng = stream_rng(seed, i);
            let s = rng.random();
            let (mut reg, first) = alice_first_half(s, &NoiseModel::NONE, &mut rng)?;
            if let StrategyKind::DeclareFailure { keep } = &alice.kind {
                if !keep.contains(&first) {
                    return Ok(None);
                }
            }
            let b: bool = rng.random();
            let basis = Basis::from_bit(b);
            let m1 = reg.measure(0, basis, &mut rng)?;
            let m2 = reg.measure(1, basis, &mut rng)?;
            Ok(Some((b as usize, m1 ^ m2)))
        })
        .collect::<Result<_>>()?;
    let mut counts = [[0u64; 2]; 2];
    for (b, parity) in tallies.iter().flatten() {
        counts[*b][*parity as usize] += 1;
    }
    let z_score = counts
        .iter()
        .map(|c| {
            let n = (c[0] + c[1]) as f64;
            if n == 0.0 {
                0.0
            } else {
                (2.0 * c[0] as f64 / n - 1.0).abs() * n.sqrt()
            }
        })
        .fold(0.0, f64::max);
    Ok(SourceMonitor {
        instances,
        surviving: tallies.iter().flatten().count(),
        parity_counts: counts,
        z_score,
        threshold,
        flagged: z_score > threshold,
    })
}
