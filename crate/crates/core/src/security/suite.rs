use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ensembles::SigmaA;
use super::leakage::{role_swapped_infos, ResendStrategy};
use super::measure::{maximize_information, MeasurementProblem, MeasurementSpec, OptimizerConfig};
use crate::error::Result;
use crate::seed::{child_seed, stream_rng};

/// Largest left-hand side seen for each information inequality (each must
/// stay at most 1).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct InequalityMaxima {
    /// `I_y + I_r`.
    pub y_r: f64,
    /// `I_y + I_{y⊕r}`.
    pub y_yr: f64,
    /// `I_y + max(I_r, I_{y⊕r})`.
    pub y_max: f64,
    /// `I_x + I_{r'}` for a cheating Bob.
    pub x_rp: f64,
    /// `I_x + I_{x⊕r'}`.
    pub x_xrp: f64,
}

impl InequalityMaxima {
    fn merge(self, o: Self) -> Self {
        Self {
            y_r: self.y_r.max(o.y_r),
            y_yr: self.y_yr.max(o.y_yr),
            y_max: self.y_max.max(o.y_max),
            x_rp: self.x_rp.max(o.x_rp),
            x_xrp: self.x_xrp.max(o.x_xrp),
        }
    }

    pub fn largest(&self) -> f64 {
        [self.y_r, self.y_yr, self.y_max, self.x_rp, self.x_xrp].into_iter().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    /// Sampled `(sigma_A, M)` pairs on Alice's side.
    pub alice_pairs: usize,
    /// Of those, pairs whose `M` was optimized against the pair's state.
    pub optimized_pairs: usize,
    /// Sampled resend strategies on Bob's side.
    pub bob_pairs: usize,
    pub maxima: InequalityMaxima,
    /// Instances exceeding 1 by more than `tolerance`.
    pub violations: usize,
    pub tolerance: f64,
}

/// Samples `pairs` Haar states with Haar measurements (ancilla cycling
/// through 0, 1, 2), of which every `optimize_every`-th gets a measurement
/// optimized for `I_y + max(I_r, I_{y⊕r})`; plus `pairs` cheating-Bob
/// resend strategies.
pub fn inequality_suite(pairs: usize, optimize_every: usize, cfg: &OptimizerConfig, seed: u64) -> Result<InequalityReport> {
    let tolerance = 1e-6;
    let alice = (0..pairs as u64)
        .into_par_iter()
        .map(|i| -> Result<(InequalityMaxima, usize, bool)> {
            let mut rng = stream_rng(seed, i);
            let sigma = SigmaA::haar((i % 3) as usize, &mut rng)?;
            let problem = MeasurementProblem::alice_view(&sigma)?;
            let optimized = optimize_every > 0 && i as usize % optimize_every == 0;
            let infos = if optimized {
                maximize_information(&problem, |v| v[0] + v[1].max(v[2]), cfg, &mut rng).infos
            } else {
                problem.information(&MeasurementSpec::haar(problem.dim(), &mut rng))?
            };
            let (iy, ir, iyr) = (infos[0], infos[1], infos[2]);
            let m = InequalityMaxima {
                y_r: iy + ir,
                y_yr: iy + iyr,
                y_max: iy + ir.max(iyr),
                ..Default::default()
            };
            let bad = [m.y_r, m.y_yr, m.y_max].iter().filter(|v| **v > 1.0 + tolerance).count();
            Ok((m, bad, optimized))
        })
        .collect::<Result<Vec<_>>>()?;
    let bob_seed = child_seed(seed, 1);
    let bob = (0..pairs as u64)
        .into_par_iter()
        .map(|i| -> Result<(InequalityMaxima, usize)> {
            let mut rng = stream_rng(bob_seed, i);
            let s = if i % 2 == 0 { ResendStrategy::haar(&mut rng) } else { ResendStrategy::forward(&mut rng) };
            let v = role_swapped_infos(&s)?;
            let m = InequalityMaxima {
                x_rp: v.i_x + v.i_rp,
                x_xrp: v.i_x + v.i_xrp,
                ..Default::default()
            };
            let bad = [m.x_rp, m.x_xrp].iter().filter(|v| **v > 1.0 + tolerance).count();
            Ok((m, bad))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut maxima = InequalityMaxima::default();
    let mut violations = 0;
    let mut optimized_pairs = 0;
    for (m, bad, opt) in alice {
        maxima = maxima.merge(m);
        violations += bad;
        optimized_pairs += opt as usize;
    }
    for (m, bad) in bob {
        maxima = maxima.merge(m);
        violations += bad;
    }
    Ok(InequalityReport {
        alice_pairs: pairs,
        optimized_pairs,
        bob_pairs: pairs,
        maxima,
        violations,
        tolerance,
    })
}
