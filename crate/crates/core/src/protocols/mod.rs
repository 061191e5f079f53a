//! One-time-table generation protocols with pluggable adversaries and
//! channel noise.

pub mod adversary;
mod batch;
pub mod nland;
pub mod nland2;
pub mod nland3;
mod noise;
mod table;
mod transcript;

use rand::Rng;

pub use adversary::{AdversaryStrategy, StrategyKind, Target};
pub use batch::{generate_batch, Batch, BatchSpec};
pub use nland::run_nland;
pub use nland2::{monitor_source, run_nland2, SourceMonitor, DEFAULT_MONITOR_THRESHOLD};
pub use nland3::run_nland3;
pub use noise::{apply_channel_noise, NoiseModel};
pub use table::{AliceView, BobView, OneTimeTable, Party};
pub use transcript::{Failure, Guess, NlandTranscript, ProtocolKind, RunResult, StateSnapshot};

use crate::error::Result;

/// Runs one instance of `protocol`.
pub fn run_protocol<R: Rng + ?Sized>(
    protocol: ProtocolKind,
    alice: &AdversaryStrategy,
    bob: &AdversaryStrategy,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<RunResult> {
    match protocol {
        ProtocolKind::Nland => run_nland(alice, bob, noise, rng),
        ProtocolKind::Nland3 => run_nland3(alice, bob, noise, rng),
        ProtocolKind::Nland2 => run_nland2(alice, bob, noise, rng),
    }
}
