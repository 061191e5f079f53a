use rand::Rng;
use serde::{Deserialize, Serialize};

use super::measure::MeasurementSpec;
use crate::error::{Error, Result};
use crate::kernel::random::haar_state;
use crate::kernel::{mutual_information, Basis, DensityMatrix, Ensemble, PureState};
use crate::protocols::nland::alice_encoding;

/// Bob's view of honest Alice's two qubits for input `x`, averaged over
/// `s` and `t`.
pub fn bob_view(x: bool) -> DensityMatrix {
    let parts: Vec<DensityMatrix> = (0..4u8)
        .map(|b| alice_encoding(x, b & 2 != 0, b & 1 != 0).density())
        .collect();
    let refs: Vec<(f64, &DensityMatrix)> = parts.iter().map(|d| (0.25, d)).collect();
    DensityMatrix::mixture(&refs).expect("valid mixture")
}

/// Trace distance between Bob's views for `x = 0` and `x = 1`.
pub fn bob_view_trace_distance() -> Result<f64> {
    bob_view(false).trace_distance(&bob_view(true))
}

/// Information about the XOR of `k` Alice inputs when each constituent
/// table leaks as in Protocol 1: `2^-k` bits.
pub fn combined_table_leakage(k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("group size must be at least 1".into()));
    }
    Ok(0.5f64.powi(k as i32))
}

/// Explicit construction for small `k`: the two-member ensemble of
/// `⊗ rho_{x_j}` averaged over input strings of each parity. Returns the
/// Holevo quantity and the trace distance between the members.
pub fn combined_leakage_explicit(k: usize) -> Result<(f64, f64)> {
    if !(1..=3).contains(&k) {
        return Err(Error::InvalidArgument(format!("explicit construction supports k in 1..=3, got {k}")));
    }
    let views = [bob_view(false), bob_view(true)];
    let mut groups: [Vec<DensityMatrix>; 2] = [Vec::new(), Vec::new()];
    for bits in 0u32..1 << k {
        let mut rho = views[(bits & 1) as usize].clone();
        for j in 1..k {
            rho = rho.tensor(&views[(bits >> j & 1) as usize]);
        }
        groups[(bits.count_ones() % 2) as usize].push(rho);
    }
    let [even, odd] = groups.map(|g| {
        let refs: Vec<(f64, &DensityMatrix)> = g.iter().map(|d| (1.0 / g.len() as f64, d)).collect();
        DensityMatrix::mixture(&refs)
    });
    let (even, odd) = (even?, odd?);
    let td = even.trace_distance(&odd)?;
    let chi = Ensemble::uniform(vec![even, odd])?.holevo_quantity()?;
    Ok((chi, td))
}

/// A cheating Bob in Protocol 1 who measures the two received qubits in
/// `measurement` and, on outcome `k`, sends `resend[k]` back to Alice.
#[derive(Debug, Clone)]
pub struct ResendStrategy {
    pub measurement: MeasurementSpec,
    pub resend: Vec<PureState>,
}

impl ResendStrategy {
    pub fn new(measurement: MeasurementSpec, resend: Vec<PureState>) -> Result<Self> {
        if measurement.basis.nrows() != 4 || resend.len() != 4 || resend.iter().any(|s| s.num_qubits() != 2) {
            return Err(Error::Strategy("resend strategy needs a 4x4 basis and four 2-qubit states".into()));
        }
        Ok(Self { measurement, resend })
    }

    pub fn haar<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let measurement = MeasurementSpec::haar(4, rng);
        let resend = (0..4).map(|_| haar_state(2, rng)).collect();
        Self { measurement, resend }
    }

    /// Resends the collapsed basis state itself.
    pub fn forward<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let measurement = MeasurementSpec::haar(4, rng);
        let resend = (0..4)
            .map(|k| PureState::from_amplitudes(measurement.basis.column(k).iter().copied().collect()).expect("unit column"))
            .collect();
        Self { measurement, resend }
    }
}

/// Bob's information about `x`, Alice's output `r'` and `x ⊕ r'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwapInfos {
    pub i_x: f64,
    pub i_rp: f64,
    pub i_xrp: f64,
}

/// Exact joint distribution of `(x, r', k)` over Alice's `(x, s, t)`, with
/// Alice measuring the resent state honestly and outputting parity ⊕ `t`.
pub fn role_swapped_infos(b: &ResendStrategy) -> Result<SwapInfos> {
    let mut joint = [[[0.0f64; 4]; 2]; 2];
    let parity_one = |st: &PureState, basis: Basis| -> Result<f64> {
        let d = st.outcome_distribution(&[basis, basis])?;
        Ok(d[1] + d[2])
    };
    let mut q = [[0.0; 2]; 4];
    for (k, st) in b.resend.iter().enumerate() {
        q[k] = [parity_one(st, Basis::Z)?, parity_one(st, Basis::X)?];
    }
    for code in 0..8u8 {
        let (x, s, t) = (code & 4 != 0, code & 2 != 0, code & 1 != 0);
        let enc = alice_encoding(x, s, t);
        for (k, q_k) in q.iter().enumerate() {
            let col = b.measurement.basis.column(k);
            let amp: crate::kernel::C64 = col.iter().zip(enc.amplitudes()).map(|(v, a)| v.conj() * a).sum();
            let pk = amp.norm_sqr() / 8.0;
            let p1 = q_k[s as usize];
            joint[x as usize][t as usize ^ 1][k] += pk * p1;
            joint[x as usize][t as usize][k] += pk * (1.0 - p1);
        }
    }
    let by = |f: &dyn Fn(usize, usize) -> usize| {
        let mut m = vec![vec![0.0; 4]; 2];
        for x in 0..2 {
            for e in 0..2 {
                for k in 0..4 {
                    m[f(x, e)][k] += joint[x][e][k];
                }
            }
        }
        mutual_information(&m)
    };
    Ok(SwapInfos {
        i_x: by(&|x, _| x),
        i_rp: by(&|_, e| e),
        i_xrp: by(&|x, e| x ^ e),
    })
}
