//! Checking, combining and error-reducing batches of generated tables.

mod check;
mod combine;
mod reduce;

pub use check::{
    check_onesided, check_twosided, default_threshold, wilson_interval, BatchOutcome, CheckConfig, PartyCheck,
};
pub use combine::{combine_tables, CombineSpec};
pub use reduce::{
    detection_curve, error_reduce, error_reduce_with, noisy_tables, reduce_batch, residual_curve, AliceBehavior,
    CurvePoint, ErrorReduceSpec, ReduceDecision, ReduceReport,
};

use crate::error::Result;
use crate::protocols::{generate_batch, BatchSpec};
use crate::seed::child_seed;

/// Which checking protocol to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    OneSided,
    TwoSided,
}

/// Result of generate-then-check with restarts.
#[derive(Debug, Clone)]
pub struct CheckedBatch {
    pub outcome: BatchOutcome,
    /// Number of fresh batches drawn after aborts.
    pub restarts: usize,
}

/// Generates a batch and checks it; on abort draws a fresh batch from a
/// child seed, up to `max_restarts` times. The last outcome is returned,
/// aborted or not.
pub fn generate_and_check(spec: &BatchSpec, mode: CheckMode, cfg: &CheckConfig, max_restarts: usize) -> Result<CheckedBatch> {
    let mut restarts = 0;
    loop {
        let seed = if restarts == 0 { spec.seed } else { child_seed(spec.seed, 1000 + restarts as u64) };
        let batch = generate_batch(&BatchSpec { seed, ..spec.clone() })?;
        let check_cfg = CheckConfig {
            seed: child_seed(cfg.seed, restarts as u64),
            ..*cfg
        };
        let outcome = match mode {
            CheckMode::OneSided => check_onesided(&batch.tables, &check_cfg)?,
            CheckMode::TwoSided => check_twosided(&batch.tables, &check_cfg)?,
        };
        if !outcome.aborted || restarts >= max_restarts {
            return Ok(CheckedBatch { outcome, restarts });
        }
        restarts += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::{AdversaryStrategy, NoiseModel, ProtocolKind};

    #[test]
    fn cheating_alice_is_caught() {
        let spec = BatchSpec {
            alice: AdversaryStrategy::alice_entangled(),
            alice_fraction: 0.2,
            ..BatchSpec::honest(ProtocolKind::Nland, 200, 0)
        };
        let aborts = (0..100u64)
            .filter(|&t| {
                let batch = generate_batch(&BatchSpec { seed: child_seed(11, t), ..spec.clone() }).unwrap();
                check_onesided(&batch.tables, &CheckConfig::one_sided(100, 0, t)).unwrap().aborted
            })
            .count();
        assert!(aborts >= 99, "{aborts}");
    }

    #[test]
    fn cheating_bob_is_caught_by_alice() {
        let spec = BatchSpec {
            bob: AdversaryStrategy::bob_fixed_zx(),
            bob_fraction: 0.3,
            ..BatchSpec::honest(ProtocolKind::Nland, 200, 0)
        };
        let mut alice_aborts = 0;
        for t in 0..50u64 {
            let batch = generate_batch(&BatchSpec { seed: child_seed(12, t), ..spec.clone() }).unwrap();
            let out = check_twosided(&batch.tables, &CheckConfig::two_sided(80, 0, 0, t)).unwrap();
            alice_aborts += (out.initiator == Some(crate::protocols::Party::Alice)) as usize;
        }
        assert!(alice_aborts >= 49, "{alice_aborts}");
    }

    #[test]
    fn noisy_estimate_is_consistent() {
        let spec = BatchSpec {
            noise: NoiseModel::new(0.05, 0.0).unwrap(),
            ..BatchSpec::honest(ProtocolKind::Nland, 2000, 13)
        };
        let batch = generate_batch(&spec).unwrap();
        let truth = batch.error_count() as f64 / batch.tables.len() as f64;
        let out = check_onesided(&batch.tables, &CheckConfig::one_sided(1000, 1000, 14)).unwrap();
        assert!(!out.aborted);
        let (lo, hi) = out.interval;
        assert!(lo < truth && truth < hi, "{truth} not in {:?}", out.interval);
        // honest noisy batches pass at the calibrated threshold
        let k = 100;
        let passes = (0..40u64)
            .filter(|&t| {
                let cfg = CheckConfig::one_sided(k, default_threshold(0.08, k), t);
                !check_onesided(&batch.tables, &cfg).unwrap().aborted
            })
            .count();
        assert!(passes >= 38, "{passes}");
    }

    #[test]
    fn restart_recovers_after_abort() {
        let spec = BatchSpec::honest(ProtocolKind::Nland3, 50, 2);
        let out = generate_and_check(&spec, CheckMode::TwoSided, &CheckConfig::two_sided(10, 10, 0, 3), 2).unwrap();
        assert_eq!(out.restarts, 0);
        assert!(!out.outcome.aborted);
    }
}
