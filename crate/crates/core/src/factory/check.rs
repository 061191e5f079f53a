use std::collections::BTreeSet;

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocols::{OneTimeTable, Party};
use crate::seed::{child_seed, stream_rng};

/// Check counts, abort threshold and sampling seed.
///
/// One-sided checking (Bob only) uses `k_b`; two-sided checking uses both
/// counts and both thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    pub k_a: usize,
    pub k_b: usize,
    pub threshold_a: usize,
    pub threshold_b: usize,
    pub seed: u64,
}

impl CheckConfig {
    pub fn one_sided(k: usize, threshold: usize, seed: u64) -> Self {
        Self {
            k_a: 0,
            k_b: k,
            threshold_a: 0,
            threshold_b: threshold,
            seed,
        }
    }

    pub fn two_sided(k_a: usize, k_b: usize, threshold: usize, seed: u64) -> Self {
        Self {
            k_a,
            k_b,
            threshold_a: threshold,
            threshold_b: threshold,
            seed,
        }
    }
}

/// Abort threshold allowing twice the expected number of failures among
/// `k` checks when each honest table is wrong with probability
/// `table_error_rate`; 0 in the noiseless case.
pub fn default_threshold(table_error_rate: f64, k: usize) -> usize {
    (2.0 * table_error_rate * k as f64).ceil() as usize
}

/// Wilson score interval for `failures` out of `n` at ~95% confidence.
pub fn wilson_interval(failures: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let n = n as f64;
    let p = failures as f64 / n;
    let denom = 1.0 + z * z / n;
    let center = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// One party's checks within a batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartyCheck {
    pub checker: Party,
    /// Checked table ids in the order they were chosen.
    pub checked: Vec<u64>,
    pub failures: usize,
    pub threshold: usize,
    /// `failures / checked.len()`.
    pub estimate: f64,
    pub interval: (f64, f64),
}

impl PartyCheck {
    pub fn aborts(&self) -> bool {
        self.failures > self.threshold
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchOutcome {
    /// Unrevealed tables, in batch order; empty on abort.
    pub passed: Vec<OneTimeTable>,
    pub aborted: bool,
    /// Party that aborted (Bob's checks come first on a tie).
    pub initiator: Option<Party>,
    pub checks: Vec<PartyCheck>,
    /// Total failures over all checks.
    pub failures: usize,
    /// Pooled failure rate estimate.
    pub estimate: f64,
    pub interval: (f64, f64),
}

fn choose(m: usize, k: usize, seed: u64, stream: u64) -> Vec<usize> {
    let mut rng = stream_rng(seed, stream);
    sample(&mut rng, m, k).into_vec()
}

fn party_check(batch: &[OneTimeTable], checker: Party, picks: &[usize], threshold: usize) -> PartyCheck {
    let failures = picks.iter().filter(|&&j| !batch[j].is_correct()).count();
    let n = picks.len();
    PartyCheck {
        checker,
        checked: picks.iter().map(|&j| batch[j].id).collect(),
        failures,
        threshold,
        estimate: if n == 0 { 0.0 } else { failures as f64 / n as f64 },
        interval: wilson_interval(failures, n),
    }
}

fn outcome(batch: &[OneTimeTable], checks: Vec<PartyCheck>, revealed: &BTreeSet<usize>) -> BatchOutcome {
    let failures = checks.iter().map(|c| c.failures).sum();
    let n: usize = checks.iter().map(|c| c.checked.len()).sum();
    let initiator = checks.iter().find(|c| c.aborts()).map(|c| c.checker);
    let aborted = initiator.is_some();
    let passed = if aborted {
        Vec::new()
    } else {
        batch
            .iter()
            .enumerate()
            .filter(|(j, _)| !revealed.contains(j))
            .map(|(_, t)| *t)
            .collect()
    };
    BatchOutcome {
        passed,
        aborted,
        initiator,
        checks,
        failures,
        estimate: if n == 0 { 0.0 } else { failures as f64 / n as f64 },
        interval: wilson_interval(failures, n),
    }
}

/// Bob picks `k_b` tables without replacement, Alice reveals `(a, e)` for
/// them, and Bob aborts if more than `threshold_b` fail.
pub fn check_onesided(batch: &[OneTimeTable], cfg: &CheckConfig) -> Result<BatchOutcome> {
    let m = batch.len();
    if cfg.k_b > m {
        return Err(Error::CheckConfig(format!("K = {} exceeds batch size {m}", cfg.k_b)));
    }
    let picks = choose(m, cfg.k_b, cfg.seed, 0);
    let check = party_check(batch, Party::Bob, &picks, cfg.threshold_b);
    Ok(outcome(batch, vec![check], &picks.into_iter().collect()))
}

/// Both parties pick independently (their sets may overlap); survivors are
/// the tables nobody revealed.
pub fn check_twosided(batch: &[OneTimeTable], cfg: &CheckConfig) -> Result<BatchOutcome> {
    let m = batch.len();
    for (who, k) in [("K_A", cfg.k_a), ("K_B", cfg.k_b)] {
        if k > m {
            return Err(Error::CheckConfig(format!("{who} = {k} exceeds batch size {m}")));
        }
    }
    let bob = choose(m, cfg.k_b, cfg.seed, 0);
    let alice = choose(m, cfg.k_a, child_seed(cfg.seed, 1), 0);
    let checks = vec![
        party_check(batch, Party::Bob, &bob, cfg.threshold_b),
        party_check(batch, Party::Alice, &alice, cfg.threshold_a),
    ];
    let revealed = bob.into_iter().chain(alice).collect();
    Ok(outcome(batch, checks, &revealed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::stream_rng;

    fn correct_batch(m: usize, seed: u64) -> Vec<OneTimeTable> {
        let mut rng = stream_rng(seed, 0);
        (0..m as u64).map(|i| OneTimeTable::random_correct(i, &mut rng)).collect()
    }

    #[test]
    fn honest_one_sided() {
        let batch = correct_batch(100, 1);
        let out = check_onesided(&batch, &CheckConfig::one_sided(50, 0, 2)).unwrap();
        assert!(!out.aborted);
        assert_eq!(out.failures, 0);
        assert_eq!(out.passed.len(), 50);
        let checked: BTreeSet<u64> = out.checks[0].checked.iter().copied().collect();
        assert_eq!(checked.len(), 50);
        assert!(out.passed.iter().all(|t| !checked.contains(&t.id)));
    }

    #[test]
    fn two_sided_overlap() {
        let batch = correct_batch(100, 3);
        let out = check_twosided(&batch, &CheckConfig::two_sided(25, 25, 0, 4)).unwrap();
        assert!(out.passed.len() >= 50);
        let out = check_twosided(&batch, &CheckConfig::two_sided(70, 60, 0, 5)).unwrap();
        let union: BTreeSet<u64> = out.checks.iter().flat_map(|c| c.checked.iter().copied()).collect();
        assert_eq!(out.passed.len(), 100 - union.len());
    }

    #[test]
    fn abort_empties_survivors() {
        let mut batch = correct_batch(20, 6);
        for t in &mut batch {
            t.e ^= true;
        }
        let out = check_onesided(&batch, &CheckConfig::one_sided(5, 2, 7)).unwrap();
        assert!(out.aborted);
        assert_eq!(out.initiator, Some(Party::Bob));
        assert!(out.passed.is_empty());
    }

    #[test]
    fn rejects_oversized_checks() {
        let batch = correct_batch(10, 8);
        assert!(check_onesided(&batch, &CheckConfig::one_sided(11, 0, 0)).is_err());
    }

    #[test]
    fn wilson_contains_estimate() {
        let (lo, hi) = wilson_interval(8, 100);
        assert!(lo < 0.08 && 0.08 < hi);
        assert_eq!(wilson_interval(0, 0), (0.0, 1.0));
    }
}
