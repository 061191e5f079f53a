use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocols::OneTimeTable;
use crate::seed::{child_seed, stream_rng};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorReduceSpec {
    pub target: u64,
    pub aux: Vec<u64>,
}

/// What Alice sends for each auxiliary table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AliceBehavior {
    /// `a0 ⊕ aj` and `e0 ⊕ ej`.
    Honest,
    /// Ignores her tables: guesses `b0, f0` and each `fj`, and sends a
    /// random `α` with `ε = α·b0' ⊕ f0' ⊕ fj'`, which passes a check only
    /// when the guesses are right.
    GuessingAttack,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReduceDecision {
    pub target: u64,
    pub accepted: bool,
    /// Auxiliary tables with `bj = b0` (the only ones Bob can check).
    pub checks: usize,
    pub mismatches: usize,
}

pub fn error_reduce(tables: &[OneTimeTable], spec: &ErrorReduceSpec) -> Result<ReduceDecision> {
    // the honest path draws no randomness
    error_reduce_with(tables, spec, AliceBehavior::Honest, &mut stream_rng(0, 0))
}

pub fn error_reduce_with<R: Rng + ?Sized>(
    tables: &[OneTimeTable],
    spec: &ErrorReduceSpec,
    alice: AliceBehavior,
    rng: &mut R,
) -> Result<ReduceDecision> {
    let by_id: HashMap<u64, &OneTimeTable> = tables.iter().map(|t| (t.id, t)).collect();
    let lookup = |id: &u64| {
        by_id
            .get(id)
            .copied()
            .ok_or_else(|| Error::TableSelection(format!("unknown table id {id}")))
    };
    let target = lookup(&spec.target)?;
    let mut seen = HashSet::new();
    for id in &spec.aux {
        if *id == spec.target {
            return Err(Error::TableSelection(format!("target {id} listed as auxiliary")));
        }
        if !seen.insert(*id) {
            return Err(Error::TableSelection(format!("auxiliary {id} listed twice")));
        }
    }
    let guesses = match alice {
        AliceBehavior::Honest => None,
        AliceBehavior::GuessingAttack => Some((rng.random::<bool>(), rng.random::<bool>())),
    };
    let mut checks = 0;
    let mut mismatches = 0;
    for id in &spec.aux {
        let aux = lookup(id)?;
        let (alpha, eps) = match guesses {
            None => (target.x ^ aux.x, target.e ^ aux.e),
            Some((b0, f0)) => {
                let alpha: bool = rng.random();
                let fj: bool = rng.random();
                (alpha, (alpha & b0) ^ f0 ^ fj)
            }
        };
        if aux.y == target.y {
            checks += 1;
            if (alpha & target.y) != (eps ^ target.f ^ aux.f) {
                mismatches += 1;
            }
        }
    }
    Ok(ReduceDecision {
        target: target.id,
        accepted: mismatches == 0,
        checks,
        mismatches,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReduceReport {
    pub q: usize,
    pub accepted: Vec<OneTimeTable>,
    pub rejected: usize,
    pub aux_used: usize,
    /// Fraction of accepted targets that are wrong.
    pub residual_error_rate: f64,
}

/// Repeatedly draws a target and `q` fresh auxiliary tables from the pool
/// (each table is used once) until fewer than `q + 1` remain.
pub fn reduce_batch(tables: &[OneTimeTable], q: usize, seed: u64) -> Result<ReduceReport> {
    let mut rng = stream_rng(seed, 0);
    let mut order: Vec<&OneTimeTable> = tables.iter().collect();
    order.shuffle(&mut rng);
    let mut accepted = Vec::new();
    let mut rejected = 0;
    let mut aux_used = 0;
    for chunk in order.chunks_exact(q + 1) {
        let spec = ErrorReduceSpec {
            target: chunk[0].id,
            aux: chunk[1..].iter().map(|t| t.id).collect(),
        };
        let local: Vec<OneTimeTable> = chunk.iter().map(|t| **t).collect();
        let d = error_reduce(&local, &spec)?;
        aux_used += q;
        if d.accepted {
            accepted.push(*chunk[0]);
        } else {
            rejected += 1;
        }
    }
    let wrong = accepted.iter().filter(|t| !t.is_correct()).count();
    Ok(ReduceReport {
        q,
        residual_error_rate: if accepted.is_empty() { 0.0 } else { wrong as f64 / accepted.len() as f64 },
        accepted,
        rejected,
        aux_used,
    })
}

/// Correct random tables with each `e` flipped independently with
/// probability `rate`.
pub fn noisy_tables<R: Rng + ?Sized>(n: usize, rate: f64, rng: &mut R) -> Vec<OneTimeTable> {
    (0..n as u64)
        .map(|id| {
            let mut t = OneTimeTable::random_correct(id, rng);
            if rng.random::<f64>() < rate {
                t.e ^= true;
            }
            t
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub q: usize,
    pub value: f64,
    pub trials: usize,
}

/// Residual error rate of accepted targets versus `q`, pooled over trials
/// of `pool` tables with injected error rate `rate`.
pub fn residual_curve(rate: f64, qs: &[usize], pool: usize, trials: usize, seed: u64) -> Result<Vec<CurvePoint>> {
    qs.iter()
        .map(|&q| {
            let reports: Vec<ReduceReport> = (0..trials as u64)
                .into_par_iter()
                .map(|t| {
                    let s = child_seed(child_seed(seed, q as u64), t);
                    let tables = noisy_tables(pool, rate, &mut stream_rng(s, 0));
                    reduce_batch(&tables, q, child_seed(s, 1))
                })
                .collect::<Result<_>>()?;
            let accepted: usize = reports.iter().map(|r| r.accepted.len()).sum();
            let wrong: usize = reports
                .iter()
                .map(|r| r.accepted.iter().filter(|t| !t.is_correct()).count())
                .sum();
            Ok(CurvePoint {
                q,
                value: if accepted == 0 { 0.0 } else { wrong as f64 / accepted as f64 },
                trials,
            })
        })
        .collect()
}

/// Probability that Bob rejects a guessing-attack target, versus `q`.
pub fn detection_curve(qs: &[usize], trials: usize, seed: u64) -> Result<Vec<CurvePoint>> {
    qs.iter()
        .map(|&q| {
            let rejected = (0..trials as u64)
                .into_par_iter()
                .map(|t| {
                    let mut rng = stream_rng(child_seed(seed, q as u64), t);
                    let tables: Vec<OneTimeTable> =
                        (0..=q as u64).map(|id| OneTimeTable::random_correct(id, &mut rng)).collect();
                    let spec = ErrorReduceSpec {
                        target: 0,
                        aux: (1..=q as u64).collect(),
                    };
                    error_reduce_with(&tables, &spec, AliceBehavior::GuessingAttack, &mut rng)
                        .map(|d| !d.accepted as usize)
                })
                .sum::<Result<usize>>()?;
            Ok(CurvePoint {
                q,
                value: rejected as f64 / trials as f64,
                trials,
            })
        })
        .collect()
}
