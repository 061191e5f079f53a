use rand::Rng;
use rayon::prelude::*;

use super::adversary::AdversaryStrategy;
use super::noise::NoiseModel;
use super::transcript::{NlandTranscript, ProtocolKind, RunResult};
use super::{run_protocol, AliceView, BobView, OneTimeTable, Party};
use crate::error::{Error, Result};
use crate::seed::{child_seed, stream_rng};

/// Parameters for generating many tables.
///
/// Instance `i` runs on stream `i` of `seed`. Whether a party deviates on
/// that instance is drawn from a separate stream, so the honest instances
/// of a partly cheating batch match a fully honest batch bit for bit.
#[derive(Debug, Clone)]
pub struct BatchSpec {
    pub protocol: ProtocolKind,
    pub alice: AdversaryStrategy,
    pub bob: AdversaryStrategy,
    /// Fraction of instances on which `alice` is used (honest otherwise).
    pub alice_fraction: f64,
    pub bob_fraction: f64,
    pub noise: NoiseModel,
    pub size: usize,
    pub seed: u64,
}

impl BatchSpec {
    pub fn honest(protocol: ProtocolKind, size: usize, seed: u64) -> Self {
        Self {
            protocol,
            alice: AdversaryStrategy::honest(Party::Alice),
            bob: AdversaryStrategy::honest(Party::Bob),
            alice_fraction: 1.0,
            bob_fraction: 1.0,
            noise: NoiseModel::NONE,
            size,
            seed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Batch {
    pub protocol: ProtocolKind,
    pub seed: u64,
    /// Tables of the instances that did not fail, ordered by id.
    pub tables: Vec<OneTimeTable>,
    pub transcripts: Vec<NlandTranscript>,
    pub failed: Vec<u64>,
    /// Ids of instances on which a party deviated.
    pub cheated: Vec<u64>,
}

impl Batch {
    pub fn from_tables(tables: Vec<OneTimeTable>) -> Self {
        Self {
            protocol: ProtocolKind::Nland,
            seed: 0,
            tables,
            transcripts: Vec::new(),
            failed: Vec::new(),
            cheated: Vec::new(),
        }
    }

    pub fn alice_views(&self) -> Vec<AliceView> {
        self.tables.iter().map(OneTimeTable::alice_view).collect()
    }

    pub fn bob_views(&self) -> Vec<BobView> {
        self.tables.iter().map(OneTimeTable::bob_view).collect()
    }

    pub fn error_count(&self) -> usize {
        self.tables.iter().filter(|t| !t.is_correct()).count()
    }
}

pub fn generate_batch(spec: &BatchSpec) -> Result<Batch> {
    for (name, value) in [("alice_fraction", spec.alice_fraction), ("bob_fraction", spec.bob_fraction)] {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidProbability { name, value });
        }
    }
    let honest_a = AdversaryStrategy::honest(Party::Alice);
    let honest_b = AdversaryStrategy::honest(Party::Bob);
    let choice_seed = child_seed(spec.seed, 1);
    let runs: Vec<(RunResult, bool)> = (0..spec.size as u64)
        .into_par_iter()
        .map(|i| {
            let mut pick = stream_rng(choice_seed, i);
            let use_a = pick.random::<f64>() < spec.alice_fraction;
            let use_b = pick.random::<f64>() < spec.bob_fraction;
            let a = if use_a { &spec.alice } else { &honest_a };
            let b = if use_b { &spec.bob } else { &honest_b };
            let cheated = !a.is_honest() || !b.is_honest();
            let mut rng = stream_rng(spec.seed, i);
            run_protocol(spec.protocol, a, b, &spec.noise, &mut rng).map(|r| (r.with_id(i), cheated))
        })
        .collect::<Result<_>>()?;
    let mut batch = Batch {
        protocol: spec.protocol,
        seed: spec.seed,
        tables: Vec::with_capacity(spec.size),
        transcripts: Vec::with_capacity(spec.size),
        failed: Vec::new(),
        cheated: Vec::new(),
    };
    for (run, cheated) in runs {
        let id = run.transcript.id;
        if cheated {
            batch.cheated.push(id);
        }
        match run.table {
            Some(t) => batch.tables.push(t),
            None => batch.failed.push(id),
        }
        batch.transcripts.push(run.transcript);
    }
    Ok(batch)
}
