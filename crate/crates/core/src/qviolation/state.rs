//! Qubit states, measurement directions and the operators built from them.
//!
//! Party 0 is the most significant qubit of a basis index.

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::bellpoly::{BellPolynomial, Scenario};
use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Largest number of qubits handled.
pub const MAX_QUBITS: usize = 6;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

pub fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::InvalidArgument(format!(
            "{n} qubits; operators are built for 1 to {MAX_QUBITS}"
        )));
    }
    Ok(())
}

/// `σ·n̂` for `n̂ = (sinθ cosφ, sinθ sinφ, cosθ)`.
pub fn bloch_observable(theta: f64, phi: f64) -> Matrix2<C64> {
    observable_from_direction(&direction_from_angles(theta, phi))
}

pub fn direction_from_angles(theta: f64, phi: f64) -> [f64; 3] {
    [
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    ]
}

/// Polar angle in `[0, π]`, azimuth in `[0, 2π)`.
pub fn angles_from_direction(n: &[f64; 3]) -> (f64, f64) {
    let theta = n[2].clamp(-1.0, 1.0).acos();
    let mut phi = n[1].atan2(n[0]);
    if phi < 0.0 {
        phi += std::f64::consts::TAU;
    }
    if phi >= std::f64::consts::TAU {
        phi -= std::f64::consts::TAU;
    }
    (theta, phi)
}

pub fn observable_from_direction(n: &[f64; 3]) -> Matrix2<C64> {
    Matrix2::new(
        C64::new(n[2], 0.0),
        C64::new(n[0], -n[1]),
        C64::new(n[0], n[1]),
        C64::new(-n[2], 0.0),
    )
}

pub fn pauli(a: usize) -> Matrix2<C64> {
    let mut n = [0.0; 3];
    n[a] = 1.0;
    observable_from_direction(&n)
}

/// One Bloch direction per `(party, setting)`. Serialises both the unit
/// vectors and their `(θ, φ)` angles.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementConfig {
    pub scenario: Scenario,
    /// `directions[j][k-1]`, unit vectors.
    pub directions: Vec<Vec<[f64; 3]>>,
}

impl MeasurementConfig {
    pub fn from_directions(scenario: Scenario, directions: Vec<Vec<[f64; 3]>>) -> Result<Self> {
        if directions.len() != scenario.parties()
            || directions.iter().any(|d| d.len() != scenario.settings())
        {
            return Err(Error::InvalidArgument(format!(
                "direction table does not match {scenario}"
            )));
        }
        for n in directions.iter().flatten() {
            let norm = n.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !norm.is_finite() || (norm - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidArgument(format!(
                    "direction {n:?} is not a unit vector"
                )));
            }
        }
        Ok(MeasurementConfig {
            scenario,
            directions,
        })
    }

    /// From `angles[j][k-1] = (θ, φ)`.
    pub fn from_angles(scenario: Scenario, angles: &[Vec<(f64, f64)>]) -> Result<Self> {
        if angles
            .iter()
            .flatten()
            .any(|(t, p)| !t.is_finite() || !p.is_finite())
        {
            return Err(Error::InvalidArgument(
                "non-finite measurement angle".into(),
            ));
        }
        let directions = angles
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&(t, p)| direction_from_angles(t, p))
                    .collect()
            })
            .collect();
        Self::from_directions(scenario, directions)
    }

    pub fn random<R: Rng + ?Sized>(scenario: Scenario, rng: &mut R) -> Self {
        let directions = (0..scenario.parties())
            .map(|_| {
                (0..scenario.settings())
                    .map(|_| random_direction(rng))
                    .collect()
            })
            .collect();
        MeasurementConfig {
            scenario,
            directions,
        }
    }

    pub fn angles(&self) -> Vec<Vec<(f64, f64)>> {
        self.directions
            .iter()
            .map(|row| row.iter().map(angles_from_direction).collect())
            .collect()
    }

    pub fn direction(&self, party: usize, setting: usize) -> [f64; 3] {
        self.directions[party][setting - 1]
    }

    pub fn observable(&self, party: usize, setting: usize) -> Matrix2<C64> {
        if setting == 0 {
            Matrix2::identity()
        } else {
            observable_from_direction(&self.direction(party, setting))
        }
    }
}

pub fn random_direction<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| StandardNormal.sample(rng));
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.map(|x| x / norm);
        }
    }
}

impl Serialize for MeasurementConfig {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("MeasurementConfig", 3)?;
        st.serialize_field("scenario", &self.scenario)?;
        st.serialize_field("angles", &self.angles())?;
        st.serialize_field("directions", &self.directions)?;
        st.end()
    }
}

/// Unit vector in `C^(2^N)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    qubits: usize,
    amplitudes: Vec<C64>,
}

impl Serialize for PureState {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.amplitudes.iter().map(|a| [a.re, a.im]).collect();
        let mut st = s.serialize_struct("PureState", 2)?;
        st.serialize_field("qubits", &self.qubits)?;
        st.serialize_field("amplitudes", &pairs)?;
        st.end()
    }
}

impl PureState {
    /// Rejects vectors whose norm is not 1 within `1e−12`.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let qubits = qubits_for(amplitudes.len())?;
        let norm = norm(&amplitudes);
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "state norm {norm} is not 1"
            )));
        }
        Ok(PureState { qubits, amplitudes })
    }

    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let qubits = qubits_for(amplitudes.len())?;
        let n = norm(&amplitudes);
        if n < 1e-300 || !n.is_finite() {
            return Err(Error::InvalidArgument(
                "cannot normalise a zero vector".into(),
            ));
        }
        for a in &mut amplitudes {
            *a /= n;
        }
        Ok(PureState { qubits, amplitudes })
    }

    /// Computational basis state; `bits[j]` is party `j`'s qubit.
    pub fn basis(bits: &[u8]) -> Result<Self> {
        check_qubits(bits.len())?;
        let idx = bits
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | (b as usize & 1));
        let mut amps = vec![ZERO; 1 << bits.len()];
        amps[idx] = ONE;
        Ok(PureState {
            qubits: bits.len(),
            amplitudes: amps,
        })
    }

    /// Normalised complex Gaussian vector, i.e. Haar-distributed.
    pub fn haar_random<R: Rng + ?Sized>(qubits: usize, rng: &mut R) -> Result<Self> {
        check_qubits(qubits)?;
        let amps = (0..1usize << qubits)
            .map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
            .collect();
        Self::normalized(amps)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn to_vector(&self) -> DVector<C64> {
        DVector::from_column_slice(&self.amplitudes)
    }

    pub fn projector(&self) -> DMatrix<C64> {
        let v = self.to_vector();
        &v * v.adjoint()
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

fn qubits_for(len: usize) -> Result<usize> {
    if !len.is_power_of_two() || len < 2 {
        return Err(Error::InvalidArgument(format!(
            "state length {len} is not 2^N"
        )));
    }
    let n = len.trailing_zeros() as usize;
    check_qubits(n)?;
    Ok(n)
}

/// `cos ξ |0…0⟩ + sin ξ |1…1⟩` for `ξ ∈ [0, π/2]`.
pub fn ghz(qubits: usize, xi: f64) -> Result<PureState> {
    check_qubits(qubits)?;
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&xi) {
        return Err(Error::InvalidArgument(format!(
            "xi = {xi} outside [0, pi/2]"
        )));
    }
    let mut amps = vec![ZERO; 1 << qubits];
    amps[0] = C64::new(xi.cos(), 0.0);
    *amps.last_mut().expect("non-empty") += C64::new(xi.sin(), 0.0);
    PureState::new(amps)
}

/// Hermitian, unit-trace, positive semidefinite `2^N × 2^N` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    qubits: usize,
    matrix: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidArgument(
                "density matrix is not square".into(),
            ));
        }
        let qubits = qubits_for(matrix.nrows())?;
        let herm = max_abs(&(&matrix - matrix.adjoint()));
        if herm > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "density matrix is not Hermitian (deviation {herm:e})"
            )));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > 1e-12 || trace.im.abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("trace {trace} is not 1")));
        }
        let min = matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min < -1e-10 {
            return Err(Error::InvalidArgument(format!(
                "density matrix has eigenvalue {min:e}"
            )));
        }
        Ok(DensityMatrix { qubits, matrix })
    }

    pub fn maximally_mixed(qubits: usize) -> Result<Self> {
        check_qubits(qubits)?;
        let d = 1usize << qubits;
        Ok(DensityMatrix {
            qubits,
            matrix: DMatrix::identity(d, d) * C64::new(1.0 / d as f64, 0.0),
        })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }
}

/// `V |ψ⟩⟨ψ| + (1 − V) 𝕀/2^N` for `V ∈ [0, 1]`.
pub fn werner(psi: &PureState, visibility: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&visibility) {
        return Err(Error::InvalidArgument(format!(
            "visibility {visibility} outside [0, 1]"
        )));
    }
    let noise = DensityMatrix::maximally_mixed(psi.qubits())?;
    let matrix = psi.projector() * C64::new(visibility, 0.0)
        + noise.matrix * C64::new(1.0 - visibility, 0.0);
    DensityMatrix::new(matrix)
}

/// Apply a one-qubit operator to qubit `party` of an `n`-qubit vector.
pub(crate) fn apply_local(psi: &mut [C64], n: usize, party: usize, op: &Matrix2<C64>) {
    let bit = 1usize << (n - 1 - party);
    for i in 0..psi.len() {
        if i & bit == 0 {
            let (a0, a1) = (psi[i], psi[i | bit]);
            psi[i] = op[(0, 0)] * a0 + op[(0, 1)] * a1;
            psi[i | bit] = op[(1, 0)] * a0 + op[(1, 1)] * a1;
        }
    }
}

pub(crate) fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Largest entry modulus.
pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn kron(a: &DMatrix<C64>, b: &Matrix2<C64>) -> DMatrix<C64> {
    let (r, c) = a.shape();
    DMatrix::from_fn(2 * r, 2 * c, |i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)])
}

/// `Σ c · X_{1,k₁} ⊗ … ⊗ X_{N,k_N}` with identity at setting 0.
pub fn bell_operator(p: &BellPolynomial, c: &MeasurementConfig) -> Result<DMatrix<C64>> {
    let s = p.scenario();
    if s != c.scenario {
        return Err(Error::ScenarioMismatch {
            left: s.to_string(),
            right: c.scenario.to_string(),
        });
    }
    check_qubits(s.parties())?;
    let d = 1usize << s.parties();
    let mut h = DMatrix::zeros(d, d);
    for (m, coeff) in p.terms() {
        let idx = m.index().expect("computable");
        let mut t = DMatrix::from_element(1, 1, ONE);
        for (j, &k) in idx.iter().enumerate() {
            t = kron(&t, &c.observable(j, k));
        }
        h += t * C64::new(coeff.to_f64(), 0.0);
    }
    Ok(h)
}
