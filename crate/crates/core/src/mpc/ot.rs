use serde::{Deserialize, Serialize};

use super::and::{eval_linear_poly, AndRecord, LinearPoly, TablePool};
use crate::error::{Error, Result};
use crate::protocols::OneTimeTable;
use crate::seed::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OtRun {
    /// `m_b`, Bob's output.
    pub output: bool,
    pub and: AndRecord,
    /// `m0 ⊕ g`, Alice's final message.
    pub masked_m0: bool,
}

impl OtRun {
    /// Bits Alice receives: only Bob's AND message.
    pub fn alice_transcript(&self) -> [bool; 1] {
        [self.and.b_msg]
    }

    pub fn bob_transcript(&self) -> [bool; 2] {
        [self.and.a_msg, self.masked_m0]
    }
}

/// 1-out-of-2 OT from one table: `z = (m0 ⊕ m1)·b` with Alice's share `g`
/// and Bob's `h`; Alice sends `m0 ⊕ g` and Bob outputs `m0 ⊕ g ⊕ h`.
pub fn ot_1of2(m0: bool, m1: bool, b: bool, pool: &mut TablePool) -> Result<OtRun> {
    let run = eval_linear_poly(&LinearPoly::new(false, vec![m0 ^ m1], vec![b])?, pool)?;
    let g = run.out.share_a;
    let masked_m0 = m0 ^ g;
    Ok(OtRun {
        output: masked_m0 ^ run.out.share_b,
        and: run.ands[0],
        masked_m0,
    })
}

/// After the commit phase: Alice holds her shares, Bob his inputs, his
/// shares and Alice's masked inputs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitmentState {
    pub m: usize,
    pub b: bool,
    pub bob_inputs: Vec<bool>,
    pub alice_shares: Vec<bool>,
    pub bob_shares: Vec<bool>,
    /// `b ⊕ x_j`, seen by Bob.
    pub alice_msgs: Vec<bool>,
}

impl CommitmentState {
    /// The reveal strings Bob accepts as `0` and as `1`.
    pub fn accepted_reveals(&self) -> [Vec<bool>; 2] {
        [false, true].map(|v| {
            self.bob_shares
                .iter()
                .zip(&self.bob_inputs)
                .map(|(s, y)| s ^ (v & y))
                .collect()
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RevealDecision {
    Bit(bool),
    CheatDetected,
}

/// Commit phase: `m` nonlocal ANDs with Alice's input always `b`.
pub fn bit_commit(b: bool, bob_inputs: &[bool], pool: &mut TablePool) -> Result<CommitmentState> {
    if !bob_inputs.iter().any(|&y| y) {
        return Err(Error::ZeroCommitmentInput);
    }
    pool.require(bob_inputs.len())?;
    let mut st = CommitmentState {
        m: bob_inputs.len(),
        b,
        bob_inputs: bob_inputs.to_vec(),
        alice_shares: Vec::with_capacity(bob_inputs.len()),
        bob_shares: Vec::with_capacity(bob_inputs.len()),
        alice_msgs: Vec::with_capacity(bob_inputs.len()),
    };
    for &y in bob_inputs {
        let r = pool.and(b, y)?;
        st.alice_shares.push(r.out.share_a);
        st.bob_shares.push(r.out.share_b);
        st.alice_msgs.push(r.a_msg);
    }
    Ok(st)
}

/// Bob recombines the revealed shares and checks them against `b·y`.
pub fn bit_reveal(state: &CommitmentState, revealed: &[bool]) -> Result<RevealDecision> {
    if revealed.len() != state.m {
        return Err(Error::RevealLength {
            expected: state.m,
            got: revealed.len(),
        });
    }
    let [zero, one] = state.accepted_reveals();
    Ok(if revealed == zero {
        RevealDecision::Bit(false)
    } else if revealed == one {
        RevealDecision::Bit(true)
    } else {
        RevealDecision::CheatDetected
    })
}

/// Equivocation by exhaustive enumeration: for every flip pattern `d`
/// Alice might XOR into her honest reveal, the fraction of Bob's nonzero
/// inputs for which Bob accepts `1 − b`. Index `d` reads bit `j` as
/// instance `j`. Every instance runs on fresh correct tables.
pub fn equivocation_rates(m: usize, b: bool, seed: u64) -> Result<Vec<f64>> {
    if !(1..=16).contains(&m) {
        return Err(Error::InvalidArgument(format!("m = {m} outside 1..=16")));
    }
    let bits = |v: u32| (0..m).map(|j| v >> j & 1 == 1).collect::<Vec<bool>>();
    let nonzero = (1u32 << m) - 1;
    let mut rates = Vec::with_capacity(1 << m);
    for d in 0..1u32 << m {
        let mut wins = 0;
        for y in 1..=nonzero {
            let mut rng = stream_rng(seed, (d as u64) << 32 | y as u64);
            let tables = (0..m as u64).map(|i| OneTimeTable::random_correct(i, &mut rng)).collect();
            let st = bit_commit(b, &bits(y), &mut TablePool::new(tables)?)?;
            let forged: Vec<bool> = st.alice_shares.iter().zip(bits(d)).map(|(s, f)| s ^ f).collect();
            wins += (bit_reveal(&st, &forged)? == RevealDecision::Bit(!b)) as usize;
        }
        rates.push(wins as f64 / nonzero as f64);
    }
    Ok(rates)
}
