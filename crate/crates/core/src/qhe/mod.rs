//! Interactive homomorphic evaluation of Clifford+T circuits on Alice's
//! qubits, with Bob's P† corrections decided by linear polynomials that
//! are evaluated on one-time tables.

mod circuit;
mod gadget;
mod ledger;
mod scheme;

pub use circuit::CliffordTCircuit;
pub use gadget::{gadget_pauli, garden_hose, BellBits, GadgetOutcome, GadgetResources};
pub use ledger::{key_update, AffineForm, MaskLedger, QubitMask};
pub use scheme::{
    absorb_t_round, replay_bob_forms, run_scheme1, table_bound, table_count, BobRound, Mask, PolyPurpose, PolyRecord,
    QheMessage, QheRun, Session,
};
