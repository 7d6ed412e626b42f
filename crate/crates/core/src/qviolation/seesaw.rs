//! Block-coordinate ascent over measurement directions, optionally
//! alternating with top-eigenvector state updates.
//!
//! For a fixed state the objective is affine in each direction `n̂_{j,k}`:
//! `E = e₀ + v·n̂`, so the best direction is `v/|v|`.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bellpoly::{BellPolynomial, Scenario};
use crate::error::{Error, Result};

use super::state::{
    apply_local, bell_operator, check_qubits, inner, pauli, MeasurementConfig, PureState, C64,
};

/// Stop once a sweep improves the objective by less than this.
pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_SWEEPS: usize = 10_000;
pub const DEFAULT_RESTARTS: usize = 50;
/// Partial-expectation vectors shorter than this leave the direction alone.
pub const DEGENERATE_NORM: f64 = 1e-14;
/// A converged sweep also moves no direction by more than this.
pub const DIRECTION_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct SeesawOptions {
    pub seed: u64,
    pub restarts: usize,
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for SeesawOptions {
    fn default() -> Self {
        SeesawOptions {
            seed: 0,
            restarts: DEFAULT_RESTARTS,
            tol: DEFAULT_TOL,
            max_sweeps: DEFAULT_MAX_SWEEPS,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OptimizationResult {
    pub value: f64,
    pub config: MeasurementConfig,
    /// The optimised state; `None` when the state was held fixed.
    pub state: Option<PureState>,
    pub restarts_used: usize,
    pub converged: bool,
    pub seed: u64,
    /// Smallest and largest final value over all restarts.
    pub spread: (f64, f64),
    /// Restart that produced `value`; warm starts come first.
    pub best_restart: usize,
    pub sweeps: usize,
}

/// Polynomial coefficients as floats, grouped by `(party, setting)`.
#[derive(Clone, Debug)]
pub(crate) struct Compiled {
    pub scenario: Scenario,
    pub terms: Vec<(Vec<usize>, f64)>,
    /// `by_slot[j][k-1]` lists terms measuring setting `k` on party `j`.
    by_slot: Vec<Vec<Vec<usize>>>,
}

impl Compiled {
    pub fn new(p: &BellPolynomial) -> Result<Self> {
        let s = p.scenario();
        check_qubits(s.parties())?;
        let terms: Vec<(Vec<usize>, f64)> = p
            .terms()
            .map(|(m, c)| (m.index().expect("computable"), c.to_f64()))
            .collect();
        let mut by_slot = vec![vec![Vec::new(); s.settings()]; s.parties()];
        for (t, (idx, _)) in terms.iter().enumerate() {
            for (j, &k) in idx.iter().enumerate() {
                if k > 0 {
                    by_slot[j][k - 1].push(t);
                }
            }
        }
        Ok(Compiled {
            scenario: s,
            terms,
            by_slot,
        })
    }

    fn check(&self, psi: &PureState, c: &MeasurementConfig) -> Result<()> {
        if c.scenario != self.scenario {
            return Err(Error::ScenarioMismatch {
                left: self.scenario.to_string(),
                right: c.scenario.to_string(),
            });
        }
        if psi.qubits() != self.scenario.parties() {
            return Err(Error::InvalidArgument(format!(
                "{}-qubit state for {}",
                psi.qubits(),
                self.scenario
            )));
        }
        Ok(())
    }

    /// `O|ψ⟩` for the product of term `t`'s observables, skipping `skip`.
    fn apply_term(
        &self,
        t: usize,
        psi: &[C64],
        c: &MeasurementConfig,
        skip: Option<usize>,
        out: &mut Vec<C64>,
    ) {
        out.clear();
        out.extend_from_slice(psi);
        let n = self.scenario.parties();
        for (j, &k) in self.terms[t].0.iter().enumerate() {
            if k > 0 && Some(j) != skip {
                apply_local(out, n, j, &c.observable(j, k));
            }
        }
    }

    pub fn value(&self, psi: &PureState, c: &MeasurementConfig) -> f64 {
        let amps = psi.amplitudes();
        let mut buf = Vec::with_capacity(amps.len());
        let mut total = 0.0;
        for t in 0..self.terms.len() {
            self.apply_term(t, amps, c, None, &mut buf);
            total += self.terms[t].1 * inner(amps, &buf).re;
        }
        total
    }

    /// `v` with `E = e₀ + v·n̂_{j,k}`.
    pub fn partial(&self, psi: &PureState, c: &MeasurementConfig, j: usize, k: usize) -> [f64; 3] {
        let amps = psi.amplitudes();
        let n = self.scenario.parties();
        let mut acc = vec![C64::new(0.0, 0.0); amps.len()];
        let mut buf = Vec::with_capacity(amps.len());
        for &t in &self.by_slot[j][k - 1] {
            self.apply_term(t, amps, c, Some(j), &mut buf);
            let w = self.terms[t].1;
            for (a, b) in acc.iter_mut().zip(&buf) {
                *a += b * w;
            }
        }
        std::array::from_fn(|axis| {
            let mut v = acc.clone();
            apply_local(&mut v, n, j, &pauli(axis));
            inner(amps, &v).re
        })
    }

    /// One pass over every `(party, setting)`. Returns the objective after
    /// each update and the largest direction change.
    pub fn sweep(&self, psi: &PureState, c: &mut MeasurementConfig) -> (Vec<f64>, f64) {
        let mut value = self.value(psi, c);
        let mut trace = Vec::with_capacity(self.scenario.observables());
        let mut max_step: f64 = 0.0;
        for j in 0..self.scenario.parties() {
            for k in 1..=self.scenario.settings() {
                let v = self.partial(psi, c, j, k);
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm >= DEGENERATE_NORM {
                    let old = c.directions[j][k - 1];
                    let new = v.map(|x| x / norm);
                    let gain: f64 = (0..3).map(|a| v[a] * (new[a] - old[a])).sum();
                    let step = (0..3)
                        .map(|a| (new[a] - old[a]).powi(2))
                        .sum::<f64>()
                        .sqrt();
                    max_step = max_step.max(step);
                    value += gain;
                    c.directions[j][k - 1] = new;
                }
                trace.push(value);
            }
        }
        (trace, max_step)
    }
}

/// Objective after each single-direction update of one sweep, starting from
/// `c`; `c` is updated in place.
pub fn seesaw_sweep(
    p: &BellPolynomial,
    psi: &PureState,
    c: &mut MeasurementConfig,
) -> Result<Vec<f64>> {
    let compiled = Compiled::new(p)?;
    compiled.check(psi, c)?;
    Ok(compiled.sweep(psi, c).0)
}

/// Partial-expectation Bloch vector `v` of `(party, setting)`, with the
/// objective equal to `e₀ + v·n̂` in that direction.
pub fn partial_expectation_vector(
    p: &BellPolynomial,
    psi: &PureState,
    c: &MeasurementConfig,
    party: usize,
    setting: usize,
) -> Result<[f64; 3]> {
    let compiled = Compiled::new(p)?;
    compiled.check(psi, c)?;
    if party >= c.scenario.parties() || setting == 0 || setting > c.scenario.settings() {
        return Err(Error::IndexOutOfRange(format!(
            "(party {party}, setting {setting}) in {}",
            c.scenario
        )));
    }
    Ok(compiled.partial(psi, c, party, setting))
}

/// Largest `|n̂ − v/|v||` over all directions with a non-degenerate `v`.
pub fn stationarity_residual(
    p: &BellPolynomial,
    psi: &PureState,
    c: &MeasurementConfig,
) -> Result<f64> {
    let compiled = Compiled::new(p)?;
    compiled.check(psi, c)?;
    let mut worst: f64 = 0.0;
    for j in 0..c.scenario.parties() {
        for k in 1..=c.scenario.settings() {
            let v = compiled.partial(psi, c, j, k);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm >= DEGENERATE_NORM {
                let n = c.direction(j, k);
                let d = (0..3)
                    .map(|a| (n[a] - v[a] / norm).powi(2))
                    .sum::<f64>()
                    .sqrt();
                worst = worst.max(d);
            }
        }
    }
    Ok(worst)
}

fn rng_for(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

struct Run {
    restart: usize,
    value: f64,
    config: MeasurementConfig,
    state: Option<PureState>,
    converged: bool,
    sweeps: usize,
}

fn ascend(
    compiled: &Compiled,
    psi: &PureState,
    mut c: MeasurementConfig,
    opts: &SeesawOptions,
) -> (MeasurementConfig, f64, bool, usize) {
    let mut value = compiled.value(psi, &c);
    for sweep in 1..=opts.max_sweeps {
        let (trace, step) = compiled.sweep(psi, &mut c);
        let next = compiled.value(psi, &c);
        debug_assert!(
            trace.iter().all(|&t| t >= value - 1e-9),
            "see-saw objective decreased"
        );
        let gain = next - value;
        value = next;
        if gain < opts.tol && step < DIRECTION_TOL {
            return (c, value, true, sweep);
        }
    }
    (c, value, false, opts.max_sweeps)
}

fn merge(runs: Vec<Run>, seed: u64) -> Result<OptimizationResult> {
    let restarts_used = runs.len();
    let lo = runs.iter().map(|r| r.value).fold(f64::INFINITY, f64::min);
    let hi = runs
        .iter()
        .map(|r| r.value)
        .fold(f64::NEG_INFINITY, f64::max);
    let best = runs
        .into_iter()
        .min_by(|a, b| b.value.total_cmp(&a.value).then(a.restart.cmp(&b.restart)))
        .ok_or_else(|| Error::NonConvergence("no restart completed".into()))?;
    Ok(OptimizationResult {
        value: best.value,
        config: best.config,
        state: best.state,
        restarts_used,
        converged: best.converged,
        seed,
        spread: (lo, hi),
        best_restart: best.restart,
        sweeps: best.sweeps,
    })
}

/// Maximise `⟨ψ|B|ψ⟩` over measurement directions for a fixed state. The
/// `warm` configurations are tried first, then `opts.restarts` random ones.
pub fn seesaw_settings(
    p: &BellPolynomial,
    psi: &PureState,
    opts: &SeesawOptions,
    warm: &[MeasurementConfig],
) -> Result<OptimizationResult> {
    let compiled = Compiled::new(p)?;
    let s = p.scenario();
    for c in warm {
        compiled.check(psi, c)?;
    }
    let total = warm.len() + opts.restarts;
    if total == 0 {
        return Err(Error::InvalidArgument("need at least one restart".into()));
    }
    let runs: Vec<Run> = (0..total)
        .into_par_iter()
        .map(|r| {
            let start = match warm.get(r) {
                Some(c) => c.clone(),
                None => MeasurementConfig::random(s, &mut rng_for(opts.seed, r - warm.len())),
            };
            let (config, value, converged, sweeps) = ascend(&compiled, psi, start, opts);
            Run {
                restart: r,
                value,
                config,
                state: None,
                converged,
                sweeps,
            }
        })
        .collect();
    merge(runs, opts.seed)
}

/// Largest eigenvalue of a Hermitian matrix with a unit eigenvector, checked
/// against `‖Hv − λv‖ ≤ tol·‖H‖`.
pub fn max_eigenpair(h: &DMatrix<C64>, tol: f64) -> Result<(f64, Vec<C64>)> {
    let d = h.nrows();
    if !h.is_square() || d == 0 || d > 1 << super::state::MAX_QUBITS {
        return Err(Error::InvalidArgument(format!(
            "{}x{} matrix; need square of dimension 1..=64",
            h.nrows(),
            h.ncols()
        )));
    }
    let eig = SymmetricEigen::try_new(h.clone(), f64::EPSILON, 10_000).ok_or_else(|| {
        Error::NonConvergence("Hermitian eigensolver hit its iteration cap".into())
    })?;
    let (i, &lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    let v = eig.eigenvectors.column(i).into_owned();
    let v = &v / C64::new(v.norm(), 0.0);
    let residual = (h * &v - &v * C64::new(lambda, 0.0)).norm();
    let scale = h.norm().max(1.0);
    if residual > tol * scale {
        return Err(Error::NonConvergence(format!(
            "eigenpair residual {residual:e} exceeds {:e}",
            tol * scale
        )));
    }
    Ok((lambda, v.iter().copied().collect()))
}

/// Eigenvector residual tolerance used by the global see-saw.
pub const EIGEN_TOL: f64 = 1e-10;

/// Maximise over both measurement directions and pure states: sweeps over
/// directions alternate with replacing the state by the top eigenvector of
/// the current Bell operator. Restarts whose eigensolve fails are skipped.
pub fn seesaw_global(p: &BellPolynomial, opts: &SeesawOptions) -> Result<OptimizationResult> {
    let compiled = Compiled::new(p)?;
    let s = p.scenario();
    if opts.restarts == 0 {
        return Err(Error::InvalidArgument("need at least one restart".into()));
    }
    let runs: Vec<Run> = (0..opts.restarts)
        .into_par_iter()
        .filter_map(|r| {
            let mut c = MeasurementConfig::random(s, &mut rng_for(opts.seed, r));
            let mut value = f64::NEG_INFINITY;
            let mut psi = None;
            for round in 1..=opts.max_sweeps {
                let h = bell_operator(p, &c).ok()?;
                let (_, v) = max_eigenpair(&h, EIGEN_TOL).ok()?;
                let state = PureState::normalized(v).ok()?;
                let (_, step) = compiled.sweep(&state, &mut c);
                let next = compiled.value(&state, &c);
                debug_assert!(next >= value - 1e-9, "see-saw objective decreased");
                let gain = next - value;
                value = next;
                psi = Some(state);
                if gain < opts.tol && step < DIRECTION_TOL {
                    return Some(Run {
                        restart: r,
                        value,
                        config: c,
                        state: psi,
                        converged: true,
                        sweeps: round,
                    });
                }
            }
            Some(Run {
                restart: r,
                value,
                config: c,
                state: psi,
                converged: false,
                sweeps: opts.max_sweeps,
            })
        })
        .collect();
    merge(runs, opts.seed)
}
