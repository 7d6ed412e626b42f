//! Quantum values of Bell polynomials on qubits: expectation values,
//! see-saw maximisation, generalised GHZ scans and Werner visibilities.

mod scan;
mod seesaw;
mod state;

use serde::Serialize;

use crate::bellpoly::BellPolynomial;
use crate::error::{Error, Result};
use crate::lhvlab;

pub use scan::{
    format_sig, ghz_grid, sample_csv, sample_random_pure_states, scan_csv, scan_ghz, SampleRow,
    ScanRow,
};
pub use seesaw::{
    max_eigenpair, partial_expectation_vector, seesaw_global, seesaw_settings, seesaw_sweep,
    stationarity_residual, OptimizationResult, SeesawOptions, DEFAULT_MAX_SWEEPS, DEFAULT_RESTARTS,
    DEFAULT_TOL, DEGENERATE_NORM, DIRECTION_TOL, EIGEN_TOL,
};
pub use state::{
    angles_from_direction, bell_operator, bloch_observable, direction_from_angles, ghz, max_abs,
    observable_from_direction, pauli, random_direction, werner, DensityMatrix, MeasurementConfig,
    PureState, C64, MAX_QUBITS,
};

/// Borrowed pure or mixed state.
#[derive(Clone, Copy, Debug)]
pub enum StateRef<'a> {
    Pure(&'a PureState),
    Mixed(&'a DensityMatrix),
}

impl<'a> From<&'a PureState> for StateRef<'a> {
    fn from(s: &'a PureState) -> Self {
        StateRef::Pure(s)
    }
}

impl<'a> From<&'a DensityMatrix> for StateRef<'a> {
    fn from(s: &'a DensityMatrix) -> Self {
        StateRef::Mixed(s)
    }
}

/// `Tr(ρ B)` with `B` built from the configuration.
pub fn expectation<'a>(
    p: &BellPolynomial,
    state: impl Into<StateRef<'a>>,
    c: &MeasurementConfig,
) -> Result<f64> {
    match state.into() {
        StateRef::Pure(psi) => {
            let compiled = seesaw::Compiled::new(p)?;
            if psi.qubits() != p.scenario().parties() || c.scenario != p.scenario() {
                return Err(Error::InvalidArgument(format!(
                    "{}-qubit state or {} configuration for {}",
                    psi.qubits(),
                    c.scenario,
                    p.scenario()
                )));
            }
            Ok(compiled.value(psi, c))
        }
        StateRef::Mixed(rho) => {
            if rho.qubits() != p.scenario().parties() {
                return Err(Error::InvalidArgument(format!(
                    "{}-qubit density matrix for {}",
                    rho.qubits(),
                    p.scenario()
                )));
            }
            let h = bell_operator(p, c)?;
            let t = (rho.matrix() * h).trace();
            if t.im.abs() > 1e-10 {
                return Err(Error::InvalidArgument(format!(
                    "expectation has imaginary part {:e}",
                    t.im
                )));
            }
            Ok(t.re)
        }
    }
}

/// Largest `|Tr(𝕀/2^N · O)|` over the non-identity terms of `p`.
pub fn noise_residual(p: &BellPolynomial, c: &MeasurementConfig) -> Result<f64> {
    let noise = DensityMatrix::maximally_mixed(p.scenario().parties())?;
    let mut worst: f64 = 0.0;
    for (m, _) in p.terms().filter(|(m, _)| !m.is_identity()) {
        let single = BellPolynomial::from_terms(
            p.scenario(),
            [(m.clone(), crate::rational::Rational::one())],
        )?;
        worst = worst.max(expectation(&single, &noise, c)?.abs());
    }
    Ok(worst)
}

/// Values within this of the LHV maximum do not count as violations.
pub const VIOLATION_MARGIN: f64 = 1e-9;

/// Tolerance for the noise-nullity check behind the linear visibility formula.
pub const NOISE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VisibilityMethod {
    Linear,
    Bisection,
}

#[derive(Clone, Debug, Serialize)]
pub struct VisibilityReport {
    /// Smallest `V` for which the Werner state violates the bound.
    pub visibility: f64,
    pub quantum_value: f64,
    pub lhv_max: f64,
    pub noise_value: f64,
    pub method: VisibilityMethod,
    pub optimization: OptimizationResult,
}

/// Threshold visibility of `V|ψ⟩⟨ψ| + (1−V)𝕀/2^N` against the exact LHV
/// maximum, at settings optimised for `ψ`.
///
/// Without an identity term the noise contributes nothing, which is checked
/// numerically, and `V* = lhv_max / value`. Otherwise the threshold is found
/// by bisection on actual Werner matrices.
pub fn visibility_threshold(
    p: &BellPolynomial,
    psi: &PureState,
    opts: &SeesawOptions,
) -> Result<VisibilityReport> {
    let (_, hi) = lhvlab::lhv_bound(p)?;
    let lhv_max = hi.to_f64();
    let opt = seesaw_settings(p, psi, opts, &[])?;
    let q = opt.value;
    if q <= lhv_max + VIOLATION_MARGIN {
        return Err(Error::NoViolation {
            value: q,
            bound: lhv_max,
        });
    }
    let residual = noise_residual(p, &opt.config)?;
    if residual > NOISE_TOL {
        return Err(Error::Precondition(format!(
            "noise correlations do not vanish (largest {residual:e})"
        )));
    }
    let noise_value = p.constant_term().to_f64();
    let (visibility, method) = if noise_value == 0.0 {
        (lhv_max / q, VisibilityMethod::Linear)
    } else {
        (
            bisect_visibility(p, psi, &opt.config, lhv_max)?,
            VisibilityMethod::Bisection,
        )
    };
    Ok(VisibilityReport {
        visibility: visibility.clamp(f64::MIN_POSITIVE, 1.0),
        quantum_value: q,
        lhv_max,
        noise_value,
        method,
        optimization: opt,
    })
}

/// Smallest `V ∈ [0, 1]` with `Tr(ρ_W(V) B) > bound`, to about `1e−13`.
pub fn bisect_visibility(
    p: &BellPolynomial,
    psi: &PureState,
    c: &MeasurementConfig,
    bound: f64,
) -> Result<f64> {
    let at = |v: f64| -> Result<f64> { expectation(p, &werner(psi, v)?, c) };
    if at(1.0)? <= bound {
        return Err(Error::NoViolation {
            value: at(1.0)?,
            bound,
        });
    }
    if at(0.0)? > bound {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if at(mid)? > bound {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Whether the optimised quantum value of `b` ever exceeds its LHV maximum by
/// more than [`TRIVIALITY_MARGIN`]. Numerical evidence only.
#[derive(Clone, Debug, Serialize)]
pub struct ViolationCheck {
    pub lhv_max: f64,
    pub quantum_max: f64,
    pub restarts_used: usize,
    pub trivial: bool,
}

pub const TRIVIALITY_MARGIN: f64 = 1e-7;

pub fn violation_check(b: &BellPolynomial, opts: &SeesawOptions) -> Result<ViolationCheck> {
    let (_, hi) = lhvlab::lhv_bound(b)?;
    let lhv_max = hi.to_f64();
    let opt = seesaw_global(b, opts)?;
    Ok(ViolationCheck {
        lhv_max,
        quantum_max: opt.spread.1,
        restarts_used: opt.restarts_used,
        trivial: opt.spread.1 - lhv_max <= TRIVIALITY_MARGIN,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bellpoly::Scenario;
    use crate::catalog;
    use nalgebra::DMatrix;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn tsirelson_config() -> MeasurementConfig {
        MeasurementConfig::from_angles(
            Scenario::new(2, 2).unwrap(),
            &[
                vec![(0.0, 0.0), (FRAC_PI_2, 0.0)],
                vec![(FRAC_PI_4, 0.0), (FRAC_PI_4, PI)],
            ],
        )
        .unwrap()
    }

    fn opts(restarts: usize) -> SeesawOptions {
        SeesawOptions {
            seed: 11,
            restarts,
            ..SeesawOptions::default()
        }
    }

    #[test]
    fn bloch_observables() {
        let z = bloch_observable(0.0, 0.0);
        assert_eq!(z, pauli(2));
        let x = bloch_observable(FRAC_PI_2, 0.0);
        assert!((x - pauli(0)).iter().all(|z| z.norm() < 1e-15));
        let o = bloch_observable(1.1, 4.0);
        assert!((o * o - nalgebra::Matrix2::identity())
            .iter()
            .all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn chsh_operator_at_tsirelson_angles() {
        let h = bell_operator(&catalog::chsh(), &tsirelson_config()).unwrap();
        let (lambda, v) = max_eigenpair(&h, 1e-10).unwrap();
        assert!((lambda - 2f64.sqrt()).abs() < 1e-9);
        assert_eq!(v.len(), 4);
    }

    #[test]
    fn trivial_operators() {
        let s = Scenario::new(2, 2).unwrap();
        let c = tsirelson_config();
        assert_eq!(
            max_abs(&bell_operator(&BellPolynomial::zero(s), &c).unwrap()),
            0.0
        );
        let one = BellPolynomial::constant(s, crate::Rational::one());
        assert_eq!(bell_operator(&one, &c).unwrap(), DMatrix::identity(4, 4));
    }

    #[test]
    fn eigenpairs_of_simple_matrices() {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(1.0, 0.0),
            C64::new(-1.0, 0.0),
        ]));
        let (l, v) = max_eigenpair(&d, 1e-12).unwrap();
        assert_eq!(l, 1.0);
        assert!((v[0].norm() - 1.0).abs() < 1e-12);
        let (l, _) = max_eigenpair(&DMatrix::identity(8, 8), 1e-12).unwrap();
        assert!((l - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ghz_and_werner() {
        let g = ghz(4, FRAC_PI_4).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((g.amplitudes()[0].re - r).abs() < 1e-15);
        assert!((g.amplitudes()[15].re - r).abs() < 1e-15);
        assert!(ghz(4, 2.0).is_err());
        let w1 = werner(&g, 1.0).unwrap();
        assert!(max_abs(&(w1.matrix() - g.projector())) < 1e-15);
        let w0 = werner(&g, 0.0).unwrap();
        assert!(
            max_abs(&(w0.matrix() - DMatrix::identity(16, 16) * C64::new(1.0 / 16.0, 0.0))) < 1e-15
        );
        assert!(werner(&g, 1.5).is_err());
    }

    #[test]
    fn pure_and_mixed_expectations_agree() {
        let p = catalog::chsh();
        let c = tsirelson_config();
        let g = ghz(2, FRAC_PI_4).unwrap();
        let pure = expectation(&p, &g, &c).unwrap();
        let mixed = expectation(&p, &werner(&g, 1.0).unwrap(), &c).unwrap();
        assert!((pure - 2f64.sqrt()).abs() < 1e-12);
        assert!((pure - mixed).abs() < 1e-12);
        let w = expectation(&p, &werner(&g, 0.3).unwrap(), &c).unwrap();
        assert!((w - 0.3 * pure).abs() < 1e-12);
    }

    #[test]
    fn chsh_seesaw_reaches_tsirelson() {
        let g = ghz(2, FRAC_PI_4).unwrap();
        let r = seesaw_settings(&catalog::chsh(), &g, &opts(10), &[]).unwrap();
        assert!((r.value - 2f64.sqrt()).abs() < 1e-9, "{}", r.value);
        assert!(r.converged);
        let r = seesaw_global(&catalog::chsh(), &opts(10)).unwrap();
        assert!((r.value - 2f64.sqrt()).abs() < 1e-9, "{}", r.value);
        let psi = r.state.as_ref().unwrap();
        assert!((expectation(&catalog::chsh(), psi, &r.config).unwrap() - r.value).abs() < 1e-9);
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let p = catalog::i33();
        let psi = PureState::basis(&[0, 0, 0]).unwrap();
        let a = seesaw_settings(&p, &psi, &opts(1), &[]).unwrap();
        let b = seesaw_settings(&p, &psi, &opts(1), &[]).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.config, b.config);
    }

    #[test]
    fn visibilities() {
        let g = ghz(2, FRAC_PI_4).unwrap();
        let v = visibility_threshold(&catalog::chsh(), &g, &opts(10)).unwrap();
        assert!((v.visibility - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
        assert_eq!(v.method, VisibilityMethod::Linear);
        let b = bisect_visibility(&catalog::chsh(), &g, &v.optimization.config, 1.0).unwrap();
        assert!((b - v.visibility).abs() < 1e-9);
        let prod = PureState::basis(&[0, 0]).unwrap();
        assert!(matches!(
            visibility_threshold(&catalog::chsh(), &prod, &opts(10)),
            Err(Error::NoViolation { .. })
        ));
    }

    #[test]
    fn shifted_inequality_uses_bisection() {
        // 1/4 + 3/4·CHSH has LHV maximum 1 and a non-zero noise value.
        let p = catalog::chsh().affine(&crate::Rational::new(1, 4), &crate::Rational::new(3, 4));
        let g = ghz(2, FRAC_PI_4).unwrap();
        let v = visibility_threshold(&p, &g, &opts(10)).unwrap();
        assert_eq!(v.method, VisibilityMethod::Bisection);
        assert!((v.visibility - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn triviality_flags_nonviolable_functions() {
        let s = Scenario::new(2, 2).unwrap();
        let local =
            BellPolynomial::from_index_terms(s, [([1usize, 1], crate::Rational::one())]).unwrap();
        assert!(violation_check(&local, &opts(5)).unwrap().trivial);
        assert!(!violation_check(&catalog::chsh(), &opts(5)).unwrap().trivial);
    }
}
