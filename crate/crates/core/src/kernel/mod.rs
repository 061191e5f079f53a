//! Exact small-system quantum mechanics.
//!
//! Qubit ordering is big-endian throughout the crate: qubit 0 is the leftmost
//! tensor factor, so in a basis index of an `n`-qubit register qubit `q`
//! occupies bit `n - 1 - q`. State comparisons use fidelity or trace
//! distance; global phases are never significant.

mod density;
mod gate;
pub mod linalg;
pub mod random;
mod state;
mod teleport;

pub use density::{helstrom, mutual_information, DensityMatrix, Ensemble};
pub use gate::{Gate, GateKind};
pub use nalgebra::Complex;
pub use state::{apply_gate, Basis, PureState};
#[cfg(test)]
pub(crate) use state::index_to_bits;
pub use teleport::{teleport_branch, teleport_withheld, Correction, RevealPolicy, Teleported};

pub type C64 = Complex<f64>;

/// Largest register a [`PureState`] may hold.
pub const MAX_QUBITS: usize = 6;

/// Norm tolerance for pure states.
pub const NORM_TOL: f64 = 1e-10;

/// Eigenvalues below this are treated as zero in entropy computations.
pub const EIGEN_CUTOFF: f64 = 1e-12;

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |q: f64| if q <= 0.0 { 0.0 } else { -q * q.log2() };
    term(p) + term(1.0 - p)
}

pub(crate) fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}
