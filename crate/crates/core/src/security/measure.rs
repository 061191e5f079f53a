use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ensembles::SigmaA;
use crate::error::{Error, Result};
use crate::kernel::linalg::{is_unitary, CMatrix};
use crate::kernel::random::haar_unitary;
use crate::kernel::{c, mutual_information, PureState, C64};
use crate::protocols::nland::{alice_encoding, returned_branches};
use crate::protocols::Target;

/// Weighted pure states, each carrying one bit per target variable.
#[derive(Debug, Clone)]
pub struct MeasurementProblem {
    dim: usize,
    weights: Vec<f64>,
    states: Vec<Vec<C64>>,
    /// `labels[target][state]`.
    labels: Vec<Vec<bool>>,
}

impl MeasurementProblem {
    pub fn new(states: Vec<(f64, PureState)>, labels: Vec<Vec<bool>>) -> Result<Self> {
        let dim = states
            .first()
            .map(|(_, s)| s.dim())
            .ok_or_else(|| Error::InvalidEnsemble("no states".into()))?;
        if states.iter().any(|(_, s)| s.dim() != dim) {
            return Err(Error::InvalidEnsemble("state dimensions differ".into()));
        }
        if labels.is_empty() || labels.iter().any(|l| l.len() != states.len()) {
            return Err(Error::InvalidEnsemble("one label per state and target".into()));
        }
        let total: f64 = states.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidEnsemble(format!("weights sum to {total}")));
        }
        Ok(Self {
            dim,
            weights: states.iter().map(|(w, _)| *w).collect(),
            states: states.into_iter().map(|(_, s)| s.amplitudes().to_vec()).collect(),
            labels,
        })
    }

    /// Alice's 16 returned states for `s`, labelled by `y`, `r`, `y ⊕ r`.
    pub fn alice_view(s: &SigmaA) -> Result<Self> {
        let branches = returned_branches(s.state())?;
        let labels = Target::ALL
            .iter()
            .map(|t| branches.iter().map(|((y, h1, h2, _), _)| t.value(*y, *h1, *h2)).collect())
            .collect();
        Self::new(branches.into_iter().map(|(_, st)| (1.0 / 16.0, st)).collect(), labels)
    }

    /// Bob's view of honest Alice's encodings, labelled by `x`.
    pub fn bob_view_of_x() -> Self {
        let mut states = Vec::with_capacity(8);
        let mut labels = Vec::with_capacity(8);
        for b in 0..8u8 {
            let (x, s, t) = (b & 4 != 0, b & 2 != 0, b & 1 != 0);
            states.push((1.0 / 8.0, alice_encoding(x, s, t)));
            labels.push(x);
        }
        Self::new(states, vec![labels]).expect("valid by construction")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn targets(&self) -> usize {
        self.labels.len()
    }

    fn column_probs(&self, col: &[C64]) -> Vec<f64> {
        self.states
            .iter()
            .map(|s| col.iter().zip(s).map(|(v, a)| v.conj() * a).sum::<C64>().norm_sqr())
            .collect()
    }

    /// `probs[k][state]`.
    fn probs(&self, basis: &CMatrix) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|k| self.column_probs(basis.column(k).as_slice()))
            .collect()
    }

    fn infos(&self, probs: &[Vec<f64>]) -> Vec<f64> {
        self.labels
            .iter()
            .map(|lab| {
                let mut joint = vec![vec![0.0; self.dim]; 2];
                for (k, col) in probs.iter().enumerate() {
                    for (i, p) in col.iter().enumerate() {
                        joint[lab[i] as usize][k] += self.weights[i] * p;
                    }
                }
                mutual_information(&joint)
            })
            .collect()
    }

    /// Mutual information of each target with the outcome of measuring in
    /// the columns of `basis`.
    pub fn information(&self, basis: &MeasurementSpec) -> Result<Vec<f64>> {
        if basis.basis.nrows() != self.dim {
            return Err(Error::DimensionMismatch {
                left: basis.basis.nrows(),
                right: self.dim,
            });
        }
        Ok(self.infos(&self.probs(&basis.basis)))
    }
}

/// A projective measurement given by the columns of a unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSpec {
    pub basis: CMatrix,
}

impl MeasurementSpec {
    pub fn new(basis: CMatrix) -> Result<Self> {
        if !is_unitary(&basis, 1e-10) {
            return Err(Error::InvalidArgument("measurement basis is not unitary".into()));
        }
        Ok(Self { basis })
    }

    pub fn haar<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        Self {
            basis: haar_unitary(dim, rng),
        }
    }

    pub fn is_unitary(&self) -> bool {
        is_unitary(&self.basis, 1e-10)
    }
}

/// Search budget: random starting bases, then sweeps of Givens rotations
/// over every column pair with a shrinking angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_sweeps: usize,
    pub initial_step: f64,
    pub min_step: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 6,
            max_sweeps: 60,
            initial_step: 0.3,
            min_step: 1e-4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MeasuredInfo {
    pub spec: MeasurementSpec,
    /// Objective at `spec`; a lower bound on the optimum.
    pub value: f64,
    /// Per-target information at `spec`.
    pub infos: Vec<f64>,
}

fn rotate(u: &CMatrix, i: usize, j: usize, theta: f64, phi: f64) -> (Vec<C64>, Vec<C64>) {
    let (cs, sn) = (theta.cos(), theta.sin());
    let ph = c(phi.cos(), phi.sin());
    let (ci, cj) = (u.column(i), u.column(j));
    let ni = ci.iter().zip(cj.iter()).map(|(a, b)| a * cs + ph * b * sn).collect();
    let nj = ci.iter().zip(cj.iter()).map(|(a, b)| -ph.conj() * a * sn + b * cs).collect();
    (ni, nj)
}

/// Maximizes `objective(per-target infos)` over projective measurements.
pub fn maximize_information<F, R>(problem: &MeasurementProblem, objective: F, cfg: &OptimizerConfig, rng: &mut R) -> MeasuredInfo
where
    F: Fn(&[f64]) -> f64,
    R: Rng + ?Sized,
{
    let d = problem.dim;
    let mut best: Option<MeasuredInfo> = None;
    for _ in 0..cfg.restarts.max(1) {
        let mut u = haar_unitary(d, rng);
        let mut probs = problem.probs(&u);
        let mut value = objective(&problem.infos(&probs));
        let mut step = cfg.initial_step;
        let mut sweeps = 0;
        while step >= cfg.min_step && sweeps < cfg.max_sweeps {
            sweeps += 1;
            let mut improved = false;
            for i in 0..d {
                for j in i + 1..d {
                    'trial: for phi in [0.0, FRAC_PI_2] {
                        for theta in [step, -step] {
                            let (ni, nj) = rotate(&u, i, j, theta, phi);
                            let mut trial = probs.clone();
                            trial[i] = problem.column_probs(&ni);
                            trial[j] = problem.column_probs(&nj);
                            let v = objective(&problem.infos(&trial));
                            if v > value + 1e-13 {
                                u.column_mut(i).copy_from_slice(&ni);
                                u.column_mut(j).copy_from_slice(&nj);
                                probs = trial;
                                value = v;
                                improved = true;
                                break 'trial;
                            }
                        }
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        if best.as_ref().is_none_or(|b| value > b.value) {
            best = Some(MeasuredInfo {
                infos: problem.infos(&probs),
                spec: MeasurementSpec { basis: u },
                value,
            });
        }
    }
    best.expect("at least one restart")
}

/// Best found mutual information between `target` and a projective
/// measurement on Alice's returned system+ancilla.
pub fn measured_info_max<R: Rng + ?Sized>(s: &SigmaA, target: Target, cfg: &OptimizerConfig, rng: &mut R) -> Result<MeasuredInfo> {
    let problem = MeasurementProblem::alice_view(s)?;
    let k = Target::ALL.iter().position(|t| *t == target).expect("listed");
    Ok(maximize_information(&problem, |i| i[k], cfg, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::linalg::kron;
    use crate::kernel::{Basis, DensityMatrix, Ensemble};
    use crate::seed::stream_rng;

    fn hadamard() -> CMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        CMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)])
    }

    #[test]
    fn bob_view_accessible_information() {
        let p = MeasurementProblem::bob_view_of_x();
        let zx = MeasurementSpec::new(kron(&CMatrix::identity(2, 2), &hadamard())).unwrap();
        assert!((p.information(&zx).unwrap()[0] - 0.5).abs() < 1e-12);
        let best = maximize_information(&p, |i| i[0], &OptimizerConfig::default(), &mut stream_rng(1, 0));
        assert!((best.value - 0.5).abs() < 0.02, "{}", best.value);
        assert!(best.spec.is_unitary());
    }

    #[test]
    fn orthogonal_pair_gives_one_bit() {
        let a = PureState::product(&[false], &[Basis::X]).unwrap();
        let b = PureState::product(&[true], &[Basis::X]).unwrap();
        let p = MeasurementProblem::new(vec![(0.5, a), (0.5, b)], vec![vec![false, true]]).unwrap();
        let best = maximize_information(&p, |i| i[0], &OptimizerConfig::default(), &mut stream_rng(2, 0));
        assert!((best.value - 1.0).abs() < 1e-6, "{}", best.value);
    }

    #[test]
    fn measured_never_exceeds_holevo() {
        let mut rng = stream_rng(3, 0);
        let cfg = OptimizerConfig {
            restarts: 2,
            max_sweeps: 15,
            ..Default::default()
        };
        for anc in [0, 2] {
            let s = SigmaA::haar(anc, &mut rng).unwrap();
            let ens = super::super::ensembles::alice_view_ensembles(&s).unwrap();
            for t in Target::ALL {
                let m = measured_info_max(&s, t, &cfg, &mut rng).unwrap();
                let chi = ens.get(t).holevo_quantity().unwrap();
                assert!(m.value <= chi + 1e-9, "{t:?}: {} > {chi}", m.value);
                // the same measurement through the density-matrix path
                let members: Vec<DensityMatrix> = ens.get(t).members().iter().map(|(_, d)| d.clone()).collect();
                let direct = Ensemble::uniform(members).unwrap().measured_information(&m.spec.basis).unwrap();
                assert!((direct - m.value).abs() < 1e-9);
            }
        }
    }
}
