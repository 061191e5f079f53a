//! Two-party classical computation on top of one-time tables.

mod and;
mod circuit;
mod nsbox;
mod ot;

pub use and::{and_with_table, eval_linear_poly, nonlocal_and, AndRecord, DistributedBit, LinearPoly, PolyRun, SpentLedger, TablePool};
pub use circuit::{
    compile_circuit, eval_circuit, random_circuit, BooleanCircuit, CircuitRun, CompiledPlan, Gate, GateOp, Message, Owner,
    Recipient, Step, Term, WireKind,
};
pub use nsbox::{ns_box_sample, ns_flip_probability, NsMode, NsSample};
pub use ot::{bit_commit, bit_reveal, equivocation_rates, ot_1of2, CommitmentState, OtRun, RevealDecision};
