use super::linalg::{hermitian_defect, hermitian_eigenvalues, positive_projector, CMatrix};
use super::{c, PureState, EIGEN_CUTOFF};
use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;
const NEGATIVE_TOL: f64 = 1e-9;

/// Hermitian, unit-trace, positive semidefinite matrix over qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    m: CMatrix,
}

impl DensityMatrix {
    pub fn from_pure(state: &PureState) -> Self {
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        Self {
            num_qubits: state.num_qubits(),
            m: &v * v.adjoint(),
        }
    }

    /// Validates Hermiticity, unit trace and positivity.
    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        let dim = m.nrows();
        if !m.is_square() || dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidDensity(format!(
                "{}x{} is not a square power-of-two matrix",
                m.nrows(),
                m.ncols()
            )));
        }
        let defect = hermitian_defect(&m);
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let trace = m.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::InvalidDensity(format!("trace {trace} != 1")));
        }
        let min = hermitian_eigenvalues(&m, HERMITIAN_TOL)?[0];
        if min < -NEGATIVE_TOL {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min}")));
        }
        Ok(Self::from_matrix_unchecked(m))
    }

    pub(crate) fn from_matrix_unchecked(m: CMatrix) -> Self {
        Self {
            num_qubits: m.nrows().trailing_zeros() as usize,
            m,
        }
    }

    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let dim = 1 << num_qubits;
        Self {
            num_qubits,
            m: CMatrix::identity(dim, dim) * c(1.0 / dim as f64, 0.0),
        }
    }

    /// Probability-weighted mixture of same-size states.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidEnsemble("empty mixture".into()))?
            .1;
        let mut m = CMatrix::zeros(first.dim(), first.dim());
        for (p, d) in parts {
            first.same_dim(d)?;
            m += &d.m * c(*p, 0.0);
        }
        Ok(Self::from_matrix_unchecked(m))
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    pub fn purity(&self) -> f64 {
        (&self.m * &self.m).trace().re
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        Self::from_matrix_unchecked(self.m.kronecker(&other.m))
    }

    /// `u rho u^dagger`.
    pub fn conjugate(&self, u: &CMatrix) -> Result<DensityMatrix> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: u.nrows(),
                right: self.dim(),
            });
        }
        Ok(Self::from_matrix_unchecked(u * &self.m * u.adjoint()))
    }

    /// Reduced state on `keep`, with kept qubits in the listed order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(Error::EmptyKeepSet);
        }
        let n = self.num_qubits;
        let mut seen = vec![false; n];
        for &q in keep {
            if q >= n {
                return Err(Error::QubitOutOfRange {
                    qubit: q,
                    num_qubits: n,
                });
            }
            if std::mem::replace(&mut seen[q], true) {
                return Err(Error::DuplicateTargets(keep.to_vec()));
            }
        }
        let traced: Vec<usize> = (0..n).filter(|q| !seen[*q]).collect();
        let k = keep.len();
        let bit = |q: usize| 1usize << (n - 1 - q);
        let compose = |kept: usize, env: usize| {
            let mut idx = 0;
            for (i, &q) in keep.iter().enumerate() {
                if kept & (1 << (k - 1 - i)) != 0 {
                    idx |= bit(q);
                }
            }
            for (i, &q) in traced.iter().enumerate() {
                if env & (1 << (traced.len() - 1 - i)) != 0 {
                    idx |= bit(q);
                }
            }
            idx
        };
        let kd = 1 << k;
        let ed = 1 << traced.len();
        let mut out = CMatrix::zeros(kd, kd);
        for r in 0..kd {
            for col in 0..kd {
                let mut sum = c(0.0, 0.0);
                for e in 0..ed {
                    sum += self.m[(compose(r, e), compose(col, e))];
                }
                out[(r, col)] = sum;
            }
        }
        Ok(Self {
            num_qubits: k,
            m: out,
        })
    }

    /// Eigenvalues with tiny negatives clamped to zero.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(hermitian_eigenvalues(&self.m, HERMITIAN_TOL)?
            .into_iter()
            .map(|v| v.max(0.0))
            .collect())
    }

    /// Entropy in bits; eigenvalues below the cutoff are dropped.
    pub fn von_neumann_entropy(&self) -> Result<f64> {
        Ok(self
            .eigenvalues()?
            .into_iter()
            .filter(|&l| l > EIGEN_CUTOFF)
            .map(|l| -l * l.log2())
            .sum::<f64>()
            .max(0.0))
    }

    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        self.same_dim(other)?;
        let diff = &self.m - &other.m;
        let values = hermitian_eigenvalues(&diff, 2.0 * HERMITIAN_TOL)?;
        Ok((0.5 * values.iter().map(|v| v.abs()).sum::<f64>()).min(1.0))
    }

    /// Probability of each computational-basis outcome.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.m[(i, i)].re.max(0.0)).collect()
    }

    /// `Tr(projector * rho)`.
    pub fn expectation(&self, op: &CMatrix) -> Result<f64> {
        if op.nrows() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: op.nrows(),
                right: self.dim(),
            });
        }
        Ok((op * &self.m).trace().re)
    }

    fn same_dim(&self, other: &DensityMatrix) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }
}

/// Classical-quantum ensemble `{p_i, rho_i}`.
#[derive(Debug, Clone)]
pub struct Ensemble {
    members: Vec<(f64, DensityMatrix)>,
}

impl Ensemble {
    pub fn new(members: Vec<(f64, DensityMatrix)>) -> Result<Self> {
        let Some((_, first)) = members.first() else {
            return Err(Error::InvalidEnsemble("no members".into()));
        };
        let dim = first.dim();
        let mut total = 0.0;
        for (p, d) in &members {
            if !(0.0..=1.0 + 1e-12).contains(p) {
                return Err(Error::InvalidEnsemble(format!("probability {p}")));
            }
            if d.dim() != dim {
                return Err(Error::InvalidEnsemble(format!(
                    "member dims differ: {} vs {dim}",
                    d.dim()
                )));
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidEnsemble(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Self { members })
    }

    /// Equal-weight ensemble.
    pub fn uniform(states: Vec<DensityMatrix>) -> Result<Self> {
        let p = 1.0 / states.len().max(1) as f64;
        Self::new(states.into_iter().map(|d| (p, d)).collect())
    }

    pub fn members(&self) -> &[(f64, DensityMatrix)] {
        &self.members
    }

    pub fn dim(&self) -> usize {
        self.members[0].1.dim()
    }

    pub fn average(&self) -> DensityMatrix {
        let parts: Vec<(f64, &DensityMatrix)> = self.members.iter().map(|(p, d)| (*p, d)).collect();
        DensityMatrix::mixture(&parts).expect("validated ensemble")
    }

    /// `S(sum p_i rho_i) - sum p_i S(rho_i)`, clamped at zero.
    pub fn holevo_quantity(&self) -> Result<f64> {
        let mut chi = self.average().von_neumann_entropy()?;
        for (p, d) in &self.members {
            if *p > 0.0 {
                chi -= p * d.von_neumann_entropy()?;
            }
        }
        Ok(chi.max(0.0))
    }

    /// Classical mutual information between the member label and the
    /// outcome of the projective measurement onto the columns of `basis`.
    pub fn measured_information(&self, basis: &CMatrix) -> Result<f64> {
        let joint: Vec<Vec<f64>> = self
            .members
            .iter()
            .map(|(p, d)| {
                let rotated = basis.adjoint() * d.matrix() * basis;
                (0..rotated.nrows()).map(|i| p * rotated[(i, i)].re.max(0.0)).collect()
            })
            .collect();
        Ok(mutual_information(&joint))
    }
}

/// Optimal two-outcome discrimination between weighted states `pa·a` and
/// `pb·b`: the projector onto the positive eigenspace of `pb·b - pa·a`
/// (outcome "b") and the resulting success probability.
pub fn helstrom(a: &DensityMatrix, pa: f64, b: &DensityMatrix, pb: f64) -> Result<(CMatrix, f64)> {
    a.same_dim(b)?;
    let diff = b.matrix() * c(pb, 0.0) - a.matrix() * c(pa, 0.0);
    let proj = positive_projector(&diff, 1e-12)?;
    let success = pa + (&proj * &diff).trace().re;
    Ok((proj, success))
}

/// Mutual information in bits of a joint distribution `joint[label][outcome]`.
pub fn mutual_information(joint: &[Vec<f64>]) -> f64 {
    let labels: Vec<f64> = joint.iter().map(|row| row.iter().sum()).collect();
    let width = joint.first().map_or(0, Vec::len);
    let outcomes: Vec<f64> = (0..width).map(|o| joint.iter().map(|row| row[o]).sum()).collect();
    let mut info = 0.0;
    for (l, row) in joint.iter().enumerate() {
        for (o, &pj) in row.iter().enumerate() {
            if pj > 1e-15 {
                info += pj * (pj / (labels[l] * outcomes[o])).log2();
            }
        }
    }
    info.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{binary_entropy, Basis};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn ket(bits: &[bool], bases: &[Basis]) -> DensityMatrix {
        PureState::product(bits, bases).unwrap().density()
    }

    #[test]
    fn epr_marginals_are_maximally_mixed() {
        let rho = PureState::epr().density();
        let mixed = DensityMatrix::maximally_mixed(1);
        for q in 0..2 {
            let r = rho.partial_trace(&[q]).unwrap();
            assert!(r.trace_distance(&mixed).unwrap() < 1e-12);
        }
    }

    #[test]
    fn product_partial_trace() {
        let rho = ket(&[false, true], &[Basis::Z, Basis::Z]);
        let r = rho.partial_trace(&[0]).unwrap();
        assert!(r.trace_distance(&ket(&[false], &[Basis::Z])).unwrap() < 1e-12);
        assert!(matches!(rho.partial_trace(&[]), Err(Error::EmptyKeepSet)));
    }

    #[test]
    fn entropy_closed_forms() {
        assert!(ket(&[true], &[Basis::X]).von_neumann_entropy().unwrap().abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(1);
        assert!((mixed.von_neumann_entropy().unwrap() - 1.0).abs() < 1e-12);
        let a = ket(&[false], &[Basis::Z]);
        let b = ket(&[false], &[Basis::X]);
        let avg = DensityMatrix::mixture(&[(0.5, &a), (0.5, &b)]).unwrap();
        let expected = binary_entropy((1.0 + FRAC_1_SQRT_2) / 2.0);
        assert!((avg.von_neumann_entropy().unwrap() - expected).abs() < 1e-9);
    }

    #[test]
    fn trace_distance_closed_forms() {
        let zero = ket(&[false], &[Basis::Z]);
        let one = ket(&[true], &[Basis::Z]);
        let plus = ket(&[false], &[Basis::X]);
        assert!(zero.trace_distance(&zero).unwrap().abs() < 1e-12);
        assert!((zero.trace_distance(&one).unwrap() - 1.0).abs() < 1e-12);
        assert!((zero.trace_distance(&plus).unwrap() - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(zero.trace_distance(&DensityMatrix::maximally_mixed(2)).is_err());
    }

    #[test]
    fn holevo_closed_forms() {
        let zero = ket(&[false], &[Basis::Z]);
        let one = ket(&[true], &[Basis::Z]);
        let plus = ket(&[false], &[Basis::X]);
        let orth = Ensemble::uniform(vec![zero.clone(), one]).unwrap();
        assert!((orth.holevo_quantity().unwrap() - 1.0).abs() < 1e-12);
        let same = Ensemble::uniform(vec![zero.clone(), zero.clone()]).unwrap();
        assert!(same.holevo_quantity().unwrap().abs() < 1e-12);
        let mixed = Ensemble::uniform(vec![zero, plus]).unwrap();
        let expected = binary_entropy((1.0 + FRAC_1_SQRT_2) / 2.0);
        assert!((mixed.holevo_quantity().unwrap() - expected).abs() < 1e-9);
    }

    #[test]
    fn ensemble_validation() {
        let zero = ket(&[false], &[Basis::Z]);
        assert!(Ensemble::new(vec![(0.4, zero.clone()), (0.4, zero.clone())]).is_err());
        assert!(Ensemble::new(vec![(0.5, zero.clone()), (0.5, DensityMatrix::maximally_mixed(2))]).is_err());
        assert!(Ensemble::new(vec![]).is_err());
    }

    #[test]
    fn from_matrix_validates() {
        let bad_trace = CMatrix::identity(2, 2);
        assert!(DensityMatrix::from_matrix(bad_trace).is_err());
        let not_herm = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.3, 0.0), c(0.0, 0.0), c(0.5, 0.0)]);
        assert!(matches!(DensityMatrix::from_matrix(not_herm), Err(Error::NotHermitian(_))));
        let negative = CMatrix::from_row_slice(2, 2, &[c(1.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)]);
        assert!(DensityMatrix::from_matrix(negative).is_err());
    }

    #[test]
    fn helstrom_for_pure_pair() {
        // success = (1 + sqrt(1 - |<a|b>|^2)) / 2 for equal priors
        let a = ket(&[false], &[Basis::Z]);
        let b = ket(&[false], &[Basis::X]);
        let (_, success) = helstrom(&a, 0.5, &b, 0.5).unwrap();
        assert!((success - (1.0 + FRAC_1_SQRT_2) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn measured_information_of_orthogonal_pair() {
        let ens = Ensemble::uniform(vec![ket(&[false], &[Basis::Z]), ket(&[true], &[Basis::Z])]).unwrap();
        let info = ens.measured_information(&CMatrix::identity(2, 2)).unwrap();
        assert!((info - 1.0).abs() < 1e-12);
    }
}
