use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::linalg::CMatrix;
use crate::kernel::random::haar_state;
use crate::kernel::{c, DensityMatrix, Ensemble, PureState};
use crate::protocols::nland::returned_branches;
use crate::protocols::Target;

/// The state Alice sends in Protocol 1 together with her purification:
/// qubits 0 and 1 go to Bob, the rest (at most two) stay with her.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaA {
    state: PureState,
}

impl SigmaA {
    pub fn new(state: PureState) -> Result<Self> {
        if !(2..=4).contains(&state.num_qubits()) {
            return Err(Error::InvalidState(format!(
                "sigma_A needs 2 system qubits plus at most 2 ancilla, got {} qubits",
                state.num_qubits()
            )));
        }
        Ok(Self { state })
    }

    pub fn haar<R: Rng + ?Sized>(ancilla: usize, rng: &mut R) -> Result<Self> {
        if ancilla > 2 {
            return Err(Error::InvalidArgument(format!("ancilla {ancilla} > 2")));
        }
        Self::new(haar_state(2 + ancilla, rng))
    }

    pub fn state(&self) -> &PureState {
        &self.state
    }

    pub fn ancilla(&self) -> usize {
        self.state.num_qubits() - 2
    }

    /// What Bob receives.
    pub fn system(&self) -> Result<DensityMatrix> {
        self.state.reduced(&[0, 1])
    }
}

/// Alice's returned system+ancilla state, grouped by each Bob variable.
#[derive(Debug, Clone)]
pub struct ViewEnsembles {
    pub y: Ensemble,
    pub r: Ensemble,
    pub yr: Ensemble,
}

impl ViewEnsembles {
    pub fn get(&self, target: Target) -> &Ensemble {
        match target {
            Target::Y => &self.y,
            Target::R => &self.r,
            Target::Yr => &self.yr,
        }
    }
}

/// Runs honest Bob on all 16 `(y, h1, h2, p)` branches and averages the
/// returned states within each value of `y`, `r` and `y ⊕ r`.
pub fn alice_view_ensembles(s: &SigmaA) -> Result<ViewEnsembles> {
    let branches = returned_branches(&s.state)?;
    let dim = s.state.dim();
    let mut sums: [[CMatrix; 2]; 3] = std::array::from_fn(|_| [CMatrix::zeros(dim, dim), CMatrix::zeros(dim, dim)]);
    for ((y, h1, h2, _), st) in &branches {
        let rho = st.density();
        for (k, t) in Target::ALL.iter().enumerate() {
            sums[k][t.value(*y, *h1, *h2) as usize] += rho.matrix();
        }
    }
    let [y, r, yr] = sums.map(|[a, b]| {
        let scale = c(1.0 / 8.0, 0.0);
        Ensemble::uniform(vec![
            DensityMatrix::from_matrix(a * scale)?,
            DensityMatrix::from_matrix(b * scale)?,
        ])
    });
    Ok(ViewEnsembles { y: y?, r: r?, yr: yr? })
}

/// Holevo quantities of one `SigmaA`, in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeoffPoint {
    /// Seed that regenerates the sample.
    pub seed: u64,
    pub chi_y: f64,
    pub chi_r: f64,
    pub chi_yr: f64,
}

impl TradeoffPoint {
    pub fn max_other(&self) -> f64 {
        self.chi_r.max(self.chi_yr)
    }

    /// `chi_y + max(chi_r, chi_yr)`.
    pub fn sum(&self) -> f64 {
        self.chi_y + self.max_other()
    }
}

pub fn tradeoff_point(s: &SigmaA, seed: u64) -> Result<TradeoffPoint> {
    let e = alice_view_ensembles(s)?;
    Ok(TradeoffPoint {
        seed,
        chi_y: e.y.holevo_quantity()?,
        chi_r: e.r.holevo_quantity()?,
        chi_yr: e.yr.holevo_quantity()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::linalg::{identity, kron};
    use crate::kernel::random::haar_unitary;
    use crate::kernel::Basis;
    use crate::protocols::adversary::cheat_state;
    use crate::seed::stream_rng;

    #[test]
    fn honest_input_reveals_nothing_about_y() {
        let s = SigmaA::new(PureState::product(&[false, false], &[Basis::Z, Basis::Z]).unwrap()).unwrap();
        let e = alice_view_ensembles(&s).unwrap();
        let m = e.y.members();
        assert!(m[0].1.trace_distance(&m[1].1).unwrap() < 1e-12);
        let p = tradeoff_point(&s, 0).unwrap();
        assert!(p.chi_y < 1e-9);
        assert!((p.chi_r - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cheat_state_reveals_y_only() {
        let p = tradeoff_point(&SigmaA::new(cheat_state()).unwrap(), 0).unwrap();
        assert!((p.chi_y - 1.0).abs() < 1e-9, "{p:?}");
        assert!(p.chi_r < 1e-9 && p.chi_yr < 1e-9);
    }

    #[test]
    fn groupings_share_the_average() {
        let mut rng = stream_rng(3, 0);
        let s = SigmaA::haar(2, &mut rng).unwrap();
        let e = alice_view_ensembles(&s).unwrap();
        let a = e.y.average();
        for t in [&e.r, &e.yr] {
            assert!(a.trace_distance(&t.average()).unwrap() < 1e-12);
        }
    }

    #[test]
    fn ancilla_unitaries_leave_chi_unchanged() {
        let mut rng = stream_rng(4, 0);
        for _ in 0..5 {
            let s = SigmaA::haar(2, &mut rng).unwrap();
            let p = tradeoff_point(&s, 0).unwrap();
            let mut rotated = s.state().clone();
            rotated.apply_matrix(&kron(&identity(4), &haar_unitary(4, &mut rng))).unwrap();
            let q = tradeoff_point(&SigmaA::new(rotated).unwrap(), 0).unwrap();
            for (a, b) in [(p.chi_y, q.chi_y), (p.chi_r, q.chi_r), (p.chi_yr, q.chi_yr)] {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn chi_bounded() {
        let mut rng = stream_rng(5, 0);
        for anc in 0..=2 {
            let p = tradeoff_point(&SigmaA::haar(anc, &mut rng).unwrap(), 0).unwrap();
            for v in [p.chi_y, p.chi_r, p.chi_yr] {
                assert!((0.0..=1.0 + 1e-9).contains(&v));
            }
        }
        assert!(SigmaA::new(PureState::zero(1).unwrap()).is_err());
    }
}
