//! Numeric search for solutions of a constraint system.
//!
//! Levenberg–Marquardt on the squared residuals from random starting points.
//! Every equation is homogeneous in the `f` symbols and in the `g` symbols
//! separately, so solutions form cones and the origin is always one. Two
//! normalisation rows, the squared norm of each side's non-constant symbols
//! minus one, keep the search away from the origin and from the constant
//! solutions, which only give trivial inequalities.
//!
//! Converged points are rescaled so that each side's largest non-constant
//! coefficient is ±1, snapped to rationals with small denominators and
//! re-verified exactly.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;

use super::{verify_solution, ConstraintSystem};

/// Denominator bound for rationalising numeric solutions.
pub const SNAP_MAX_DEN: i64 = 64;

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub seed: u64,
    pub restarts: usize,
    /// Residual norm below which a point counts as a solution.
    pub tol: f64,
    pub max_iters: usize,
    pub max_den: i64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            seed: 0,
            restarts: 100,
            tol: 1e-10,
            max_iters: 2000,
            max_den: SNAP_MAX_DEN,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NumericSolution {
    pub restart: u64,
    pub residual: f64,
    /// Rescaled floating-point values, in symbol order.
    pub values: Vec<f64>,
    /// Snapped values, present only when they verify exactly.
    pub exact: Option<BTreeMap<String, Rational>>,
}

impl NumericSolution {
    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }
}

struct Problem<'a> {
    cs: &'a ConstraintSystem,
    forms: Vec<Vec<(usize, usize, f64)>>,
    blocks: Vec<Vec<usize>>,
}

impl<'a> Problem<'a> {
    fn new(cs: &'a ConstraintSystem) -> Self {
        let forms = cs
            .equations
            .iter()
            .map(|e| {
                e.form
                    .iter()
                    .map(|(&(a, b), c)| (a, b, c.to_f64()))
                    .collect()
            })
            .collect();
        let n = cs.symbols.len();
        let blocks = [0..cs.f_count, cs.f_count..n]
            .into_iter()
            .map(|r| r.filter(|&i| !cs.constant[i]).collect::<Vec<_>>())
            .filter(|b| !b.is_empty())
            .collect();
        Problem { cs, forms, blocks }
    }

    fn rows(&self) -> usize {
        self.forms.len() + self.blocks.len()
    }

    fn residuals(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut r = DVector::zeros(self.rows());
        for (i, form) in self.forms.iter().enumerate() {
            r[i] = form.iter().map(|&(a, b, c)| c * x[a] * x[b]).sum();
        }
        for (i, block) in self.blocks.iter().enumerate() {
            r[self.forms.len() + i] = block.iter().map(|&k| x[k] * x[k]).sum::<f64>() - 1.0;
        }
        r
    }

    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let mut j = DMatrix::zeros(self.rows(), x.len());
        for (i, form) in self.forms.iter().enumerate() {
            for &(a, b, c) in form {
                j[(i, a)] += c * x[b];
                j[(i, b)] += c * x[a];
            }
        }
        for (i, block) in self.blocks.iter().enumerate() {
            for &k in block {
                j[(self.forms.len() + i, k)] = 2.0 * x[k];
            }
        }
        j
    }

    fn levenberg_marquardt(&self, mut x: DVector<f64>, max_iters: usize) -> (DVector<f64>, f64) {
        let mut r = self.residuals(&x);
        let mut cost = r.norm_squared();
        let mut mu = 1e-3;
        for _ in 0..max_iters {
            if cost < 1e-30 {
                break;
            }
            let jac = self.jacobian(&x);
            let jt = jac.transpose();
            let a = &jt * &jac;
            let g = &jt * &r;
            let mut improved = false;
            while mu < 1e20 {
                let mut damped = a.clone();
                for i in 0..x.len() {
                    damped[(i, i)] += mu * a[(i, i)].max(1e-9);
                }
                let Some(chol) = damped.cholesky() else {
                    mu *= 10.0;
                    continue;
                };
                let step = chol.solve(&(-&g));
                let trial = &x + &step;
                let tr = self.residuals(&trial);
                let tc = tr.norm_squared();
                if tc < cost {
                    let small = step.norm() <= 1e-15 * (x.norm() + 1e-15);
                    x = trial;
                    r = tr;
                    cost = tc;
                    mu = (mu / 3.0).max(1e-15);
                    improved = !small;
                    break;
                }
                mu *= 4.0;
            }
            if !improved {
                break;
            }
        }
        (x, cost.sqrt())
    }

    /// Divide each side by its largest non-constant magnitude.
    fn rescale(&self, x: &mut [f64]) {
        let n = x.len();
        for range in [0..self.cs.f_count, self.cs.f_count..n] {
            let scale = range
                .clone()
                .filter(|&i| !self.cs.constant[i])
                .map(|i| x[i].abs())
                .fold(0.0, f64::max);
            if scale > 0.0 {
                for v in &mut x[range] {
                    *v /= scale;
                }
            }
        }
    }

    fn snap(&self, x: &[f64], max_den: i64) -> Option<BTreeMap<String, Rational>> {
        let mut values = BTreeMap::new();
        for (name, &v) in self.cs.symbols.iter().zip(x) {
            let r = Rational::approximate(v.abs(), max_den)?;
            values.insert(name.clone(), if v < 0.0 { -r } else { r });
        }
        let report = verify_solution(self.cs, &values).ok()?;
        report.pass.then_some(values)
    }
}

fn restart_rng(seed: u64, restart: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart);
    rng
}

/// Random-restart least squares. Returns every converged restart, sorted by
/// residual and then restart index.
pub fn solve_numeric(cs: &ConstraintSystem, opts: &SolveOptions) -> Result<Vec<NumericSolution>> {
    let n = cs.symbols.len();
    if n > 64 {
        return Err(Error::InvalidArgument(format!(
            "{n} symbols; numeric solving is limited to 64"
        )));
    }
    if cs.is_empty() {
        return Ok(vec![NumericSolution {
            restart: 0,
            residual: 0.0,
            values: vec![0.0; n],
            exact: Some(
                cs.symbols
                    .iter()
                    .map(|s| (s.clone(), Rational::zero()))
                    .collect(),
            ),
        }]);
    }
    let problem = Problem::new(cs);
    let runs: Vec<(u64, f64, Vec<f64>)> = (0..opts.restarts as u64)
        .into_par_iter()
        .map(|restart| {
            let mut rng = restart_rng(opts.seed, restart);
            let x0 = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
            let (x, residual) = problem.levenberg_marquardt(x0, opts.max_iters);
            (restart, residual, x.as_slice().to_vec())
        })
        .collect();
    let best = runs.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let mut found: Vec<NumericSolution> = runs
        .into_iter()
        .filter(|(_, residual, _)| *residual < opts.tol)
        .map(|(restart, residual, mut values)| {
            problem.rescale(&mut values);
            let exact = problem.snap(&values, opts.max_den);
            NumericSolution {
                restart,
                residual,
                values,
                exact,
            }
        })
        .collect();
    if found.is_empty() {
        return Err(Error::NonConvergence(format!(
            "no restart reached residual {:e}; best was {best:e}",
            opts.tol
        )));
    }
    found.sort_by(|a, b| {
        a.residual
            .total_cmp(&b.residual)
            .then(a.restart.cmp(&b.restart))
    });
    Ok(found)
}
