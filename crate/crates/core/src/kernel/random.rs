//! Haar-distributed states and unitaries.

use rand::Rng;
use rand_distr::StandardNormal;

use super::linalg::{orthonormalize, CMatrix};
use super::{c, PureState, C64};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state on `n` qubits.
pub fn haar_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PureState {
    let amps = (0..1usize << n).map(|_| gaussian(rng)).collect();
    PureState::normalized(amps).expect("gaussian vector is nonzero")
}

/// Haar-random `dim x dim` unitary (QR of a Ginibre matrix with the
/// diagonal phase fix).
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    orthonormalize(&g)
}
