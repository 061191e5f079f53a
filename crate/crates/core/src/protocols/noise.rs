use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{Gate, PureState};

/// Channel imperfections.
///
/// `eps_noise` is the per-transmitted-qubit depolarizing probability: with
/// that probability the qubit gets a uniformly random Pauli from
/// `{I, X, Y, Z}`. `eps_fail` is the per-run probability that the instance
/// is lost; losses are announced to both parties.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub eps_noise: f64,
    pub eps_fail: f64,
}

impl NoiseModel {
    pub const NONE: NoiseModel = NoiseModel {
        eps_noise: 0.0,
        eps_fail: 0.0,
    };

    pub fn new(eps_noise: f64, eps_fail: f64) -> Result<Self> {
        let model = Self {
            eps_noise,
            eps_fail,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("eps_noise", self.eps_noise), ("eps_fail", self.eps_fail)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidProbability { name, value });
            }
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.eps_noise == 0.0 && self.eps_fail == 0.0
    }

    /// Draws the loss event. No randomness is consumed when `eps_fail` is 0.
    pub fn lost<R: Rng + ?Sized>(&self, rng: &mut R) -> bool {
        self.eps_fail > 0.0 && rng.random::<f64>() < self.eps_fail
    }
}

/// Depolarizes each listed qubit independently. No randomness is consumed
/// when `eps_noise` is 0, so noiseless runs share streams with the ideal
/// protocol.
pub fn apply_channel_noise<R: Rng + ?Sized>(
    state: &mut PureState,
    qubits: &[usize],
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<()> {
    if noise.eps_noise == 0.0 {
        return Ok(());
    }
    for &q in qubits {
        if rng.random::<f64>() < noise.eps_noise {
            match rng.random_range(0..4u8) {
                1 => state.apply(Gate::X(q))?,
                2 => state.apply(Gate::Y(q))?,
                3 => state.apply(Gate::Z(q))?,
                _ => {}
            }
        }
    }
    Ok(())
}
