//! Numerical checks of what a cheating party can learn from one instance
//! of Protocol 1.

mod ensembles;
mod leakage;
mod measure;
mod scan;
mod suite;

pub use ensembles::{alice_view_ensembles, tradeoff_point, SigmaA, TradeoffPoint, ViewEnsembles};
pub use leakage::{
    bob_view, bob_view_trace_distance, combined_leakage_explicit, combined_table_leakage, role_swapped_infos, ResendStrategy,
    SwapInfos,
};
pub use measure::{maximize_information, measured_info_max, MeasuredInfo, MeasurementProblem, MeasurementSpec, OptimizerConfig};
pub use scan::{endpoint_scan, f_envelope, sigma_for_seed, tradeoff_scan, EnvelopePoint, TradeoffScan};
pub use suite::{inequality_suite, InequalityMaxima, InequalityReport};
