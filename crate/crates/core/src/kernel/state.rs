use std::f64::consts::FRAC_1_SQRT_2;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{c, DensityMatrix, Gate, C64, MAX_QUBITS, NORM_TOL};
use crate::error::{Error, Result};

/// Single-qubit measurement basis. X-basis outcomes record `|+>` as 0 and
/// `|->` as 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
}

impl Basis {
    pub fn from_bit(bit: bool) -> Basis {
        if bit {
            Basis::X
        } else {
            Basis::Z
        }
    }
}

/// Normalized amplitude vector over 1..=6 qubits (big-endian).
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    num_qubits: usize,
    amps: Vec<C64>,
}

/// Applies `gate` to a copy of `state`.
pub fn apply_gate(state: &PureState, gate: Gate) -> Result<PureState> {
    let mut out = state.clone();
    out.apply(gate)?;
    Ok(out)
}

impl PureState {
    /// `|0...0>` on `n` qubits.
    pub fn zero(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_count(n)?;
        if index >= 1 << n {
            return Err(Error::InvalidState(format!(
                "basis index {index} out of range for {n} qubits"
            )));
        }
        let mut amps = vec![c(0.0, 0.0); 1 << n];
        amps[index] = c(1.0, 0.0);
        Ok(Self { num_qubits: n, amps })
    }

    /// Product state with qubit `i` in the basis-`bases[i]` eigenstate
    /// labelled by `bits[i]`.
    pub fn product(bits: &[bool], bases: &[Basis]) -> Result<Self> {
        if bits.len() != bases.len() {
            return Err(Error::DimensionMismatch {
                left: bits.len(),
                right: bases.len(),
            });
        }
        let mut state = Self::basis(bits.len(), bits_to_index(bits))?;
        for (q, basis) in bases.iter().enumerate() {
            if *basis == Basis::X {
                state.apply(Gate::H(q))?;
            }
        }
        Ok(state)
    }

    /// Computational basis state `|b0 b1 ...>`.
    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        Self::basis(bits.len(), bits_to_index(bits))
    }

    /// `(|00> + |11>)/sqrt(2)`.
    pub fn epr() -> Self {
        let s = FRAC_1_SQRT_2;
        Self {
            num_qubits: 2,
            amps: vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)],
        }
    }

    /// Takes the amplitudes as given; the squared norm must already be 1.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let n = amps.len().trailing_zeros() as usize;
        if amps.len() < 2 || !amps.len().is_power_of_two() {
            return Err(Error::InvalidState(format!(
                "amplitude count {} is not a power of two >= 2",
                amps.len()
            )));
        }
        check_count(n)?;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("squared norm {norm} != 1")));
        }
        Ok(Self { num_qubits: n, amps })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(mut amps: Vec<C64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        for a in &mut amps {
            *a /= norm;
        }
        Self::from_amplitudes(amps)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &PureState) -> Result<C64> {
        self.same_dim(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// `self ⊗ other` with `self` occupying the leading qubits.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let n = self.num_qubits + other.num_qubits;
        check_count(n)?;
        let mut amps = Vec::with_capacity(1 << n);
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(Self { num_qubits: n, amps })
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }

    /// Reduced density matrix on `keep` (in the listed order).
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        self.density().partial_trace(keep)
    }

    pub fn apply(&mut self, gate: Gate) -> Result<()> {
        match gate {
            Gate::Cnot { control, target } => {
                self.check_qubit(control)?;
                self.check_qubit(target)?;
                if control == target {
                    return Err(Error::DuplicateTargets(vec![control, target]));
                }
                let cm = self.mask(control);
                let tm = self.mask(target);
                for i in 0..self.amps.len() {
                    if i & cm != 0 && i & tm == 0 {
                        self.amps.swap(i, i | tm);
                    }
                }
                Ok(())
            }
            other => {
                let u = other.kind().single_qubit().expect("single-qubit gate");
                self.apply_single(other.targets()[0], u)
            }
        }
    }

    pub fn apply_all(&mut self, gates: &[Gate]) -> Result<()> {
        gates.iter().try_for_each(|g| self.apply(*g))
    }

    /// Applies an arbitrary 2x2 unitary `u` to `qubit`.
    pub fn apply_single(&mut self, qubit: usize, u: [[C64; 2]; 2]) -> Result<()> {
        self.check_qubit(qubit)?;
        let m = self.mask(qubit);
        for i in 0..self.amps.len() {
            if i & m == 0 {
                let (a, b) = (self.amps[i], self.amps[i | m]);
                self.amps[i] = u[0][0] * a + u[0][1] * b;
                self.amps[i | m] = u[1][0] * a + u[1][1] * b;
            }
        }
        Ok(())
    }

    /// Applies a full-register unitary given as a dense `dim x dim` matrix.
    pub fn apply_matrix(&mut self, u: &nalgebra::DMatrix<C64>) -> Result<()> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: u.nrows(),
                right: self.dim(),
            });
        }
        let v = nalgebra::DVector::from_column_slice(&self.amps);
        self.amps = (u * v).as_slice().to_vec();
        Ok(())
    }

    /// Probability that measuring `qubit` in `basis` yields `outcome`.
    pub fn probability(&self, qubit: usize, basis: Basis, outcome: bool) -> Result<f64> {
        self.check_qubit(qubit)?;
        let m = self.mask(qubit);
        let mut p = 0.0;
        for i in 0..self.amps.len() {
            if i & m == 0 {
                let amp = self.branch_amp(self.amps[i], self.amps[i | m], basis, outcome);
                p += amp.norm_sqr();
            }
        }
        Ok(p)
    }

    /// Born-rule measurement; the measured qubit stays in the register,
    /// collapsed to the observed eigenstate.
    pub fn measure<R: Rng + ?Sized>(
        &mut self,
        qubit: usize,
        basis: Basis,
        rng: &mut R,
    ) -> Result<bool> {
        let p1 = self.probability(qubit, basis, true)?;
        let outcome = rng.random::<f64>() < p1;
        let p = if outcome { p1 } else { 1.0 - p1 };
        let m = self.mask(qubit);
        let norm = p.sqrt();
        for i in 0..self.amps.len() {
            if i & m == 0 {
                let amp = self.branch_amp(self.amps[i], self.amps[i | m], basis, outcome) / norm;
                let (e0, e1) = eigenvector(basis, outcome);
                self.amps[i] = amp * e0;
                self.amps[i | m] = amp * e1;
            }
        }
        Ok(outcome)
    }

    /// Born-rule measurement that removes the measured qubit.
    pub fn measure_discard<R: Rng + ?Sized>(
        &mut self,
        qubit: usize,
        basis: Basis,
        rng: &mut R,
    ) -> Result<bool> {
        let p1 = self.probability(qubit, basis, true)?;
        let outcome = rng.random::<f64>() < p1;
        self.project_discard(qubit, basis, outcome)?;
        Ok(outcome)
    }

    /// Post-selects `outcome` on `qubit` and removes it. Returns the outcome
    /// probability, or `None` (state untouched) when it is zero.
    pub fn project_discard(
        &mut self,
        qubit: usize,
        basis: Basis,
        outcome: bool,
    ) -> Result<Option<f64>> {
        self.check_qubit(qubit)?;
        if self.num_qubits == 1 {
            return Err(Error::QubitCount(0));
        }
        let m = self.mask(qubit);
        let pos = self.num_qubits - 1 - qubit;
        let mut amps = vec![c(0.0, 0.0); self.amps.len() / 2];
        let mut p = 0.0;
        for (j, slot) in amps.iter_mut().enumerate() {
            let i = insert_zero_bit(j, pos);
            let amp = self.branch_amp(self.amps[i], self.amps[i | m], basis, outcome);
            p += amp.norm_sqr();
            *slot = amp;
        }
        if p < 1e-14 {
            return Ok(None);
        }
        let norm = p.sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        self.amps = amps;
        self.num_qubits -= 1;
        Ok(Some(p))
    }

    /// Bell measurement on `(u, v)`: CNOT u->v, H on u, Z-measure both, and
    /// remove both qubits. Returns `(m_u, m_v)`; if `v` was half of an EPR
    /// pair `(v, w)`, qubit `w` now holds `X^{m_v} Z^{m_u}` times the state
    /// that was on `u`.
    pub fn bell_measure<R: Rng + ?Sized>(
        &mut self,
        u: usize,
        v: usize,
        rng: &mut R,
    ) -> Result<(bool, bool)> {
        self.bell_rotate(u, v)?;
        let (hi, lo) = if u > v { (u, v) } else { (v, u) };
        let first = self.measure_discard(hi, Basis::Z, rng)?;
        let second = self.measure_discard(lo, Basis::Z, rng)?;
        Ok(if u > v { (first, second) } else { (second, first) })
    }

    /// Forced-outcome Bell measurement; `None` when the outcome has zero
    /// probability.
    pub fn bell_project(
        &mut self,
        u: usize,
        v: usize,
        outcome: (bool, bool),
    ) -> Result<Option<f64>> {
        let mut trial = self.clone();
        trial.bell_rotate(u, v)?;
        let (hi, lo, o_hi, o_lo) = if u > v {
            (u, v, outcome.0, outcome.1)
        } else {
            (v, u, outcome.1, outcome.0)
        };
        let Some(p1) = trial.project_discard(hi, Basis::Z, o_hi)? else {
            return Ok(None);
        };
        let Some(p2) = trial.project_discard(lo, Basis::Z, o_lo)? else {
            return Ok(None);
        };
        *self = trial;
        Ok(Some(p1 * p2))
    }

    fn bell_rotate(&mut self, u: usize, v: usize) -> Result<()> {
        if u == v {
            return Err(Error::DuplicateTargets(vec![u, v]));
        }
        self.apply(Gate::Cnot {
            control: u,
            target: v,
        })?;
        self.apply(Gate::H(u))
    }

    /// Reorders qubits so that new qubit `i` is old qubit `order[i]`.
    pub fn permute(&mut self, order: &[usize]) -> Result<()> {
        let n = self.num_qubits;
        let mut seen = vec![false; n];
        if order.len() != n {
            return Err(Error::DimensionMismatch {
                left: order.len(),
                right: n,
            });
        }
        for &q in order {
            self.check_qubit(q)?;
            if std::mem::replace(&mut seen[q], true) {
                return Err(Error::DuplicateTargets(order.to_vec()));
            }
        }
        let mut amps = vec![c(0.0, 0.0); self.amps.len()];
        for (old, amp) in self.amps.iter().enumerate() {
            let mut new = 0;
            for (i, &q) in order.iter().enumerate() {
                if old & (1 << (n - 1 - q)) != 0 {
                    new |= 1 << (n - 1 - i);
                }
            }
            amps[new] = *amp;
        }
        self.amps = amps;
        Ok(())
    }

    /// Moves qubit `from` to position `to`, shifting the others.
    pub fn move_qubit(&mut self, from: usize, to: usize) -> Result<()> {
        self.check_qubit(from)?;
        self.check_qubit(to)?;
        let mut order: Vec<usize> = (0..self.num_qubits).filter(|&q| q != from).collect();
        order.insert(to, from);
        self.permute(&order)
    }

    /// Joint outcome distribution when every qubit is measured in its
    /// listed basis, indexed by the big-endian outcome string.
    pub fn outcome_distribution(&self, bases: &[Basis]) -> Result<Vec<f64>> {
        if bases.len() != self.num_qubits {
            return Err(Error::DimensionMismatch {
                left: bases.len(),
                right: self.num_qubits,
            });
        }
        let mut rotated = self.clone();
        for (q, b) in bases.iter().enumerate() {
            if *b == Basis::X {
                rotated.apply(Gate::H(q))?;
            }
        }
        Ok(rotated.amps.iter().map(|a| a.norm_sqr()).collect())
    }

    /// Samples a full register measurement without modifying the state.
    pub fn sample_all<R: Rng + ?Sized>(&self, bases: &[Basis], rng: &mut R) -> Result<Vec<bool>> {
        let dist = self.outcome_distribution(bases)?;
        let idx = sample_index(&dist, rng);
        Ok(index_to_bits(idx, self.num_qubits))
    }

    pub(crate) fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits {
            return Err(Error::QubitOutOfRange {
                qubit,
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    fn same_dim(&self, other: &PureState) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    fn mask(&self, qubit: usize) -> usize {
        1 << (self.num_qubits - 1 - qubit)
    }

    fn branch_amp(&self, a: C64, b: C64, basis: Basis, outcome: bool) -> C64 {
        let (e0, e1) = eigenvector(basis, outcome);
        e0.conj() * a + e1.conj() * b
    }
}

fn eigenvector(basis: Basis, outcome: bool) -> (C64, C64) {
    let s = FRAC_1_SQRT_2;
    match (basis, outcome) {
        (Basis::Z, false) => (c(1.0, 0.0), c(0.0, 0.0)),
        (Basis::Z, true) => (c(0.0, 0.0), c(1.0, 0.0)),
        (Basis::X, false) => (c(s, 0.0), c(s, 0.0)),
        (Basis::X, true) => (c(s, 0.0), c(-s, 0.0)),
    }
}

fn check_count(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::QubitCount(n));
    }
    Ok(())
}

fn insert_zero_bit(j: usize, pos: usize) -> usize {
    let low = j & ((1 << pos) - 1);
    let high = j >> pos;
    (high << (pos + 1)) | low
}

pub(crate) fn bits_to_index(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

pub(crate) fn index_to_bits(idx: usize, n: usize) -> Vec<bool> {
    (0..n).map(|q| idx & (1 << (n - 1 - q)) != 0).collect()
}

pub(crate) fn sample_index<R: Rng + ?Sized>(dist: &[f64], rng: &mut R) -> usize {
    let total: f64 = dist.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, p) in dist.iter().enumerate() {
        if u < *p {
            return i;
        }
        u -= p;
    }
    dist.iter().rposition(|p| *p > 0.0).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::GateKind;
    use crate::seed::stream_rng;
    use nalgebra::DMatrix;

    fn close(a: &PureState, b: &PureState) -> bool {
        (a.fidelity(b).unwrap() - 1.0).abs() < 1e-12
    }

    #[test]
    fn hadamard_makes_plus() {
        let plus = apply_gate(&PureState::zero(1).unwrap(), Gate::H(0)).unwrap();
        let expected = PureState::product(&[false], &[Basis::X]).unwrap();
        assert!(close(&plus, &expected));
        let a = plus.amplitudes();
        assert!((a[0].re - FRAC_1_SQRT_2).abs() < 1e-15 && (a[1].re - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn cnot_flips_target_when_control_set() {
        let s = PureState::from_bits(&[true, false]).unwrap();
        let out = apply_gate(
            &s,
            Gate::Cnot {
                control: 0,
                target: 1,
            },
        )
        .unwrap();
        assert!(close(&out, &PureState::from_bits(&[true, true]).unwrap()));
    }

    /// Builds the 4x4 matrix of a gate sequence column by column by running
    /// it on every basis state.
    fn matrix_of(gates: &[Gate]) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(4, 4);
        for col in 0..4 {
            let mut s = PureState::basis(2, col).unwrap();
            s.apply_all(gates).unwrap();
            for row in 0..4 {
                m[(row, col)] = s.amplitudes()[row];
            }
        }
        m
    }

    #[test]
    fn cnot_reverses_in_x_basis() {
        let conj = matrix_of(&[
            Gate::H(0),
            Gate::H(1),
            Gate::Cnot {
                control: 0,
                target: 1,
            },
            Gate::H(0),
            Gate::H(1),
        ]);
        let reversed = matrix_of(&[Gate::Cnot {
            control: 1,
            target: 0,
        }]);
        assert!((conj - reversed).norm() < 1e-12);
        // CNOT matrix agrees with the kind's declared matrix
        let fwd = matrix_of(&[Gate::Cnot {
            control: 0,
            target: 1,
        }]);
        assert!((fwd - GateKind::Cnot.matrix()).norm() < 1e-15);
    }

    #[test]
    fn index_errors() {
        let mut s = PureState::zero(2).unwrap();
        assert!(matches!(
            s.apply(Gate::X(2)),
            Err(Error::QubitOutOfRange { qubit: 2, .. })
        ));
        assert!(matches!(
            s.apply(Gate::Cnot {
                control: 1,
                target: 1
            }),
            Err(Error::DuplicateTargets(_))
        ));
        assert!(PureState::zero(7).is_err());
        assert!(PureState::zero(0).is_err());
        let mut rng = stream_rng(0, 0);
        assert!(s.measure(5, Basis::Z, &mut rng).is_err());
    }

    #[test]
    fn deterministic_measurements() {
        let mut rng = stream_rng(1, 0);
        for _ in 0..20 {
            let mut zero = PureState::zero(1).unwrap();
            assert!(!zero.measure(0, Basis::Z, &mut rng).unwrap());
            assert!(close(&zero, &PureState::zero(1).unwrap()));
            let plus = PureState::product(&[false], &[Basis::X]).unwrap();
            let mut p = plus.clone();
            assert!(!p.measure(0, Basis::X, &mut rng).unwrap());
            assert!(close(&p, &plus));
            let mut minus = PureState::product(&[true], &[Basis::X]).unwrap();
            assert!(minus.measure(0, Basis::X, &mut rng).unwrap());
        }
    }

    #[test]
    fn born_rule_frequency() {
        let mut rng = stream_rng(2, 0);
        let plus = PureState::product(&[false], &[Basis::X]).unwrap();
        let ones = (0..10_000)
            .filter(|_| plus.clone().measure(0, Basis::Z, &mut rng).unwrap())
            .count();
        let p0 = 1.0 - ones as f64 / 10_000.0;
        assert!((p0 - 0.5).abs() < 0.02, "{p0}");
    }

    #[test]
    fn collapse_renormalizes() {
        let mut rng = stream_rng(3, 0);
        let mut s = PureState::epr();
        let m = s.measure(0, Basis::Z, &mut rng).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        assert!(close(&s, &PureState::from_bits(&[m, m]).unwrap()));
    }

    #[test]
    fn discard_and_move() {
        let mut s = PureState::from_bits(&[true, false, true]).unwrap();
        assert_eq!(s.project_discard(1, Basis::Z, true).unwrap(), None);
        assert!((s.project_discard(1, Basis::Z, false).unwrap().unwrap() - 1.0).abs() < 1e-15);
        assert!(close(&s, &PureState::from_bits(&[true, true]).unwrap()));
        let mut t = PureState::from_bits(&[true, false, false]).unwrap();
        t.move_qubit(0, 2).unwrap();
        assert!(close(&t, &PureState::from_bits(&[false, false, true]).unwrap()));
    }

    #[test]
    fn teleport_by_hand() {
        let mut rng = stream_rng(4, 0);
        for _ in 0..50 {
            let mut psi = PureState::zero(1).unwrap();
            psi.apply(Gate::H(0)).unwrap();
            psi.apply(Gate::T(0)).unwrap();
            let target = psi.clone();
            let mut s = psi.tensor(&PureState::epr()).unwrap();
            let (mu, mv) = s.bell_measure(0, 1, &mut rng).unwrap();
            if mv {
                s.apply(Gate::X(0)).unwrap();
            }
            if mu {
                s.apply(Gate::Z(0)).unwrap();
            }
            assert!(close(&s, &target));
        }
    }
}
