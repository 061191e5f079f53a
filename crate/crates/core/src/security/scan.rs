use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ensembles::{tradeoff_point, SigmaA, TradeoffPoint};
use crate::error::{Error, Result};
use crate::kernel::random::haar_state;
use crate::kernel::{c, PureState};
use crate::protocols::nland::alice_encoding;
use crate::seed::{child_seed, stream_rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffScan {
    pub ancilla: usize,
    pub points: Vec<TradeoffPoint>,
    /// Largest `chi_y + max(chi_r, chi_yr)` and the point attaining it.
    pub max_sum: f64,
    pub argmax: Option<TradeoffPoint>,
}

impl TradeoffScan {
    fn from_points(ancilla: usize, points: Vec<TradeoffPoint>) -> Self {
        let argmax = points.iter().copied().max_by(|a, b| a.sum().total_cmp(&b.sum()));
        Self {
            ancilla,
            max_sum: argmax.map_or(0.0, |p| p.sum()),
            argmax,
            points,
        }
    }
}

fn scan<F>(samples: usize, ancilla: usize, seed: u64, make: F) -> Result<TradeoffScan>
where
    F: Fn(u64, &mut crate::seed::SimRng) -> Result<SigmaA> + Sync,
{
    if samples == 0 {
        return Err(Error::InvalidArgument("scan needs at least one sample".into()));
    }
    if ancilla > 2 {
        return Err(Error::InvalidArgument(format!("ancilla {ancilla} > 2")));
    }
    let points = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let s = child_seed(seed, i);
            let sigma = make(i, &mut stream_rng(s, 0))?;
            tradeoff_point(&sigma, s)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TradeoffScan::from_points(ancilla, points))
}

/// Haar-random purifications. Sample `i` is regenerated by
/// [`sigma_for_seed`] from its recorded seed `child_seed(seed, i)`.
pub fn tradeoff_scan(samples: usize, ancilla: usize, seed: u64) -> Result<TradeoffScan> {
    scan(samples, ancilla, seed, |_, rng| SigmaA::haar(ancilla, rng))
}

pub fn sigma_for_seed(point_seed: u64, ancilla: usize) -> Result<SigmaA> {
    SigmaA::haar(ancilla, &mut stream_rng(point_seed, 0))
}

/// Honest encodings (times a random ancilla state) plus a Haar
/// perturbation of log-uniform size in `[1e-3, max_delta]`, which fills
/// the region where `max(chi_r, chi_yr)` is close to 1. The first eight
/// samples are the unperturbed encodings.
pub fn endpoint_scan(samples: usize, ancilla: usize, max_delta: f64, seed: u64) -> Result<TradeoffScan> {
    if !(max_delta > 1e-3) {
        return Err(Error::InvalidArgument(format!("max_delta {max_delta} must exceed 1e-3")));
    }
    scan(samples, ancilla, seed, |i, rng| {
        let code = if i < 8 { i as u8 } else { rng.random_range(0..8u8) };
        let honest = alice_encoding(code & 4 != 0, code & 2 != 0, code & 1 != 0);
        let base = if ancilla == 0 {
            honest
        } else {
            honest.tensor(&haar_state(ancilla, rng))?
        };
        if i < 8 {
            return SigmaA::new(base);
        }
        let delta = 10f64.powf(rng.random_range(-3.0..max_delta.log10()));
        let noise = haar_state(2 + ancilla, rng);
        let amps = base
            .amplitudes()
            .iter()
            .zip(noise.amplitudes())
            .map(|(a, b)| a + b * c(delta, 0.0))
            .collect();
        SigmaA::new(PureState::normalized(amps)?)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopePoint {
    pub eps: f64,
    /// Points with `max(chi_r, chi_yr) >= 1 - eps`.
    pub count: usize,
    /// Largest `chi_y + max(chi_r, chi_yr) - 1` in the bin; `None` when
    /// the bin is empty.
    pub f: Option<f64>,
    /// Largest `chi_y` in the bin.
    pub max_chi_y: Option<f64>,
}

/// Empirical `f(eps)`. Values within 1e-9 of the bin edge count as inside,
/// so `eps = 0` collects the exact endpoints.
pub fn f_envelope(points: &[TradeoffPoint], eps_grid: &[f64]) -> Vec<EnvelopePoint> {
    eps_grid
        .iter()
        .map(|&eps| {
            let bin: Vec<&TradeoffPoint> = points.iter().filter(|p| p.max_other() >= 1.0 - eps - 1e-9).collect();
            let fold = |f: &dyn Fn(&TradeoffPoint) -> f64| bin.iter().map(|p| f(p)).reduce(f64::max);
            EnvelopePoint {
                eps,
                count: bin.len(),
                f: fold(&|p| p.sum() - 1.0),
                max_chi_y: fold(&|p| p.chi_y),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_and_regenerable() {
        let a = tradeoff_scan(40, 2, 9).unwrap();
        let b = tradeoff_scan(40, 2, 9).unwrap();
        assert_eq!(a, b);
        let p = a.points[17];
        let again = tradeoff_point(&sigma_for_seed(p.seed, 2).unwrap(), p.seed).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn no_ancilla_stays_below_one() {
        let s = tradeoff_scan(400, 0, 1).unwrap();
        assert!(s.max_sum <= 1.0 + 1e-6, "{}", s.max_sum);
    }

    #[test]
    fn endpoints_and_envelope() {
        let s = endpoint_scan(600, 2, 0.5, 3).unwrap();
        let env = f_envelope(&s.points, &[0.0, 0.01, 0.1]);
        assert!(env[0].count >= 8);
        assert!(env[0].f.unwrap().abs() < 1e-6);
        assert!(env[1].f.unwrap() <= 0.10);
        assert!(env[2].f.unwrap() <= 0.35);
        assert!(env[1].max_chi_y.unwrap() <= 0.07);
        assert!(f_envelope(&[], &[0.1])[0].f.is_none());
    }
}
