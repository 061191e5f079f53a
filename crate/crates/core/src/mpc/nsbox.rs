use rand::Rng;
use serde::{Deserialize, Serialize};

use super::and::TablePool;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NsMode {
    /// Bob flips his bit with probability `(1 − E)/2`.
    OneSided,
    /// Both flip with probability `(1 − √E)/2`.
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NsSample {
    pub a_out: bool,
    pub b_out: bool,
    pub flipped_a: bool,
    pub flipped_b: bool,
    /// The flipping party knows its unflipped bit and so can recover a
    /// stronger correlation than intended.
    pub recoverable: bool,
}

/// Per-party flip probability for the mode.
pub fn ns_flip_probability(e: f64, mode: NsMode) -> Result<f64> {
    if !(0.0..=1.0).contains(&e) {
        return Err(Error::InvalidProbability { name: "E", value: e });
    }
    Ok(match mode {
        NsMode::OneSided => 0.5 * (1.0 - e),
        NsMode::Symmetric => 0.5 * (1.0 - e.sqrt()),
    })
}

/// One box use: a nonlocal AND followed by the random flips, so that
/// `P(A ⊕ B = a·b) = (1 + E)/2`. Always draws two uniforms from `rng`.
pub fn ns_box_sample<R: Rng + ?Sized>(a: bool, b: bool, e: f64, mode: NsMode, pool: &mut TablePool, rng: &mut R) -> Result<NsSample> {
    let p = ns_flip_probability(e, mode)?;
    let r = pool.and(a, b)?;
    let (ua, ub): (f64, f64) = (rng.random(), rng.random());
    let flipped_a = mode == NsMode::Symmetric && ua < p;
    let flipped_b = ub < p;
    Ok(NsSample {
        a_out: r.out.share_a ^ flipped_a,
        b_out: r.out.share_b ^ flipped_b,
        flipped_a,
        flipped_b,
        recoverable: e < 1.0,
    })
}
