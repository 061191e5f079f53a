use serde::{Deserialize, Serialize};

use super::{OneTimeTable, Party};
use crate::kernel::{Correction, PureState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolKind {
    /// Two-message protocol: Alice sends two qubits, Bob returns them.
    Nland,
    /// One-message protocol: Bob sends four qubits and a bit.
    Nland3,
    /// Entanglement-based protocol with withheld teleportation corrections.
    Nland2,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 3] = [ProtocolKind::Nland, ProtocolKind::Nland3, ProtocolKind::Nland2];

    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::Nland => "nland",
            ProtocolKind::Nland3 => "nland3",
            ProtocolKind::Nland2 => "nland2",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == s)
    }
}

/// Why an instance produced no table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Failure {
    /// Channel loss, announced to both parties.
    Lost,
    /// A party declared the instance failed.
    Declared(Party),
}

/// Amplitudes of a state that crossed the channel, as `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSnapshot {
    pub label: String,
    pub amplitudes: Vec<[f64; 2]>,
}

impl StateSnapshot {
    pub fn new(label: &str, state: &PureState) -> Self {
        Self {
            label: label.to_string(),
            amplitudes: state.amplitudes().iter().map(|a| [a.re, a.im]).collect(),
        }
    }
}

/// A cheating party's guess about the other side's data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Guess {
    pub by: Party,
    pub variable: &'static str,
    pub value: bool,
    pub truth: bool,
}

impl Guess {
    pub fn correct(&self) -> bool {
        self.value == self.truth
    }
}

/// Full simulator-side record of one protocol run. Fields a protocol does
/// not define stay `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NlandTranscript {
    pub protocol: ProtocolKind,
    pub id: u64,
    pub x: Option<bool>,
    pub y: bool,
    pub s: bool,
    pub t: Option<bool>,
    pub h1: Option<bool>,
    pub h2: Option<bool>,
    pub p: Option<bool>,
    pub h: Option<bool>,
    /// Bob's preparation bits in Protocol 2.
    pub i: Option<[bool; 4]>,
    pub w: Option<bool>,
    pub corrections: Option<Vec<Correction>>,
    /// Alice's measurement outcomes, in qubit order.
    pub outcomes: Vec<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub sent_states: Vec<StateSnapshot>,
    pub aborted: bool,
    pub failure: Option<Failure>,
    #[serde(skip_serializing_if = "Vec::is_empty", default, skip_deserializing)]
    pub guesses: Vec<Guess>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

impl NlandTranscript {
    pub(crate) fn new(protocol: ProtocolKind, y: bool, s: bool) -> Self {
        Self {
            protocol,
            id: 0,
            x: None,
            y,
            s,
            t: None,
            h1: None,
            h2: None,
            p: None,
            h: None,
            i: None,
            w: None,
            corrections: None,
            outcomes: Vec::new(),
            sent_states: Vec::new(),
            aborted: false,
            failure: None,
            guesses: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Copy with the honest-but-curious notes removed.
    pub fn without_notes(&self) -> Self {
        Self {
            notes: Vec::new(),
            ..self.clone()
        }
    }
}

/// Result of a single protocol run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub table: Option<OneTimeTable>,
    pub transcript: NlandTranscript,
}

impl RunResult {
    pub(crate) fn failed(mut transcript: NlandTranscript, why: Failure) -> Self {
        transcript.aborted = true;
        transcript.failure = Some(why);
        Self {
            table: None,
            transcript,
        }
    }

    pub(crate) fn done(table: OneTimeTable, transcript: NlandTranscript) -> Self {
        Self {
            table: Some(table),
            transcript,
        }
    }

    pub fn with_id(mut self, id: u64) -> Self {
        self.transcript.id = id;
        if let Some(t) = &mut self.table {
            t.id = id;
        }
        self
    }

    pub fn guess(&self, by: Party) -> Option<Guess> {
        self.transcript.guesses.iter().copied().find(|g| g.by == by)
    }
}
