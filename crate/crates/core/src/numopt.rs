//! Seeded local minimization with multistart.
//!
//! A small quasi-Newton kernel used by the entanglement bounds: BFGS with
//! central-difference gradients and a backtracking line search, wrapped in a
//! deterministic multistart driver. Every randomized quantity derives from an
//! explicit master seed, and run `i` always draws from stream `i`, so the
//! outcome is independent of how runs are scheduled.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::scalar::{real, Real};

/// Gradient-norm convergence tolerance used by [`multistart`].
pub const DEFAULT_GRAD_TOL: f64 = 1e-9;

/// Iteration cap per start used by [`multistart`].
pub const DEFAULT_MAX_ITER: usize = 500;

/// Failure modes of the multistart driver.
#[derive(Debug, Error)]
pub enum NumOptError {
    #[error("all {runs} optimization runs failed to produce a finite value")]
    AllRunsFailed { runs: usize },
}

/// Outcome of a minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeResult<T: Real = f64> {
    /// Best parameter vector found.
    pub best_params: Vec<T>,
    /// Objective value at `best_params`.
    pub best_value: T,
    /// Whether the gradient-norm tolerance was met.
    pub converged: bool,
    /// Number of objective evaluations consumed.
    pub evaluations: usize,
}

/// Central-difference gradient. The step is widened for low-precision scalars
/// so the difference stays above rounding noise.
fn fd_gradient<T: Real, F: FnMut(&[T]) -> T>(
    f: &mut F,
    x: &mut [T],
    evals: &mut usize,
) -> DVector<T> {
    let h = real::<T>(1e-6).max(T::default_epsilon().sqrt());
    let mut g = DVector::zeros(x.len());
    for i in 0..x.len() {
        let xi = x[i];
        x[i] = xi + h;
        let fp = f(x);
        x[i] = xi - h;
        let fm = f(x);
        x[i] = xi;
        *evals += 2;
        g[i] = (fp - fm) / (h + h);
    }
    g
}

/// Minimizes `f` from `x0` by BFGS with finite-difference gradients.
///
/// Stops when the Euclidean gradient norm drops below `tol` or after
/// `max_iter` iterations. A non-finite objective during the line search
/// shrinks the step; if no acceptable step exists the search resets to
/// steepest descent once and then stops. The returned value never exceeds
/// the objective at `x0`.
pub fn minimize<T: Real, F: FnMut(&[T]) -> T>(
    mut f: F,
    x0: &[T],
    tol: T,
    max_iter: usize,
) -> OptimizeResult<T> {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut evals = 0usize;
    let mut fx = f(&x);
    evals += 1;
    if !fx.is_finite() || n == 0 {
        return OptimizeResult {
            best_params: x,
            best_value: fx,
            converged: n == 0,
            evaluations: evals,
        };
    }

    let c1 = real::<T>(1e-4);
    let mut g = fd_gradient(&mut f, &mut x, &mut evals);
    let mut h = DMatrix::<T>::identity(n, n);
    let mut scaled = false;
    let mut converged = false;

    for _ in 0..max_iter {
        if g.norm() < tol {
            converged = true;
            break;
        }

        let mut p = -(&h * &g);
        let mut slope = p.dot(&g);
        if !(slope < T::zero()) {
            // Curvature information went bad; restart from steepest descent.
            h = DMatrix::identity(n, n);
            p = -g.clone();
            slope = p.dot(&g);
        }

        // Backtracking Armijo search, halving up to 50 times.
        let mut accepted: Option<(Vec<T>, T, T)> = None;
        let mut steepest_retry = false;
        loop {
            let mut alpha = T::one();
            for _ in 0..50 {
                let xt: Vec<T> = x
                    .iter()
                    .zip(p.iter())
                    .map(|(&xi, &pi)| xi + alpha * pi)
                    .collect();
                let ft = f(&xt);
                evals += 1;
                if ft.is_finite() && ft <= fx + c1 * alpha * slope {
                    accepted = Some((xt, ft, alpha));
                    break;
                }
                alpha = alpha * real(0.5);
            }
            if accepted.is_some() || steepest_retry {
                break;
            }
            // One fallback pass along the raw gradient before giving up.
            steepest_retry = true;
            h = DMatrix::identity(n, n);
            p = -g.clone();
            slope = p.dot(&g);
        }

        let Some((xt, ft, _alpha)) = accepted else {
            break;
        };

        let s = DVector::from_iterator(n, xt.iter().zip(x.iter()).map(|(&a, &b)| a - b));
        x = xt;
        fx = ft;
        let gn = fd_gradient(&mut f, &mut x, &mut evals);
        let y = &gn - &g;
        g = gn;

        let sy = s.dot(&y);
        let guard = real::<T>(1e-10) * s.norm() * y.norm();
        if sy > guard {
            if !scaled {
                // First-step scaling keeps the initial Hessian near the
                // objective's curvature scale.
                let yy = y.dot(&y);
                if yy > T::zero() {
                    h = DMatrix::identity(n, n) * (sy / yy);
                }
                scaled = true;
            }
            let rho = T::one() / sy;
            let hy = &h * &y;
            let yhy = y.dot(&hy);
            // BFGS inverse update: H += (1 + yHy/sy) s s^T / sy - (H y s^T + s y^T H) / sy.
            let coeff = (T::one() + rho * yhy) * rho;
            for i in 0..n {
                for j in 0..n {
                    h[(i, j)] = h[(i, j)] + coeff * s[i] * s[j]
                        - rho * (hy[i] * s[j] + s[i] * hy[j]);
                }
            }
        }
    }

    if g.norm() < tol {
        converged = true;
    }
    OptimizeResult {
        best_params: x,
        best_value: fx,
        converged,
        evaluations: evals,
    }
}

/// Runs [`minimize`] from `runs` sampled starting points and returns the best
/// result.
///
/// Run `i` draws its start from `ChaCha8` stream `i` of the master seed, so
/// results are deterministic, independent of scheduling, and nested: enlarging
/// `runs` can only improve (never worsen) the best value. Ties keep the lowest
/// run index. Runs whose starting objective is non-finite are skipped; if all
/// runs are skipped an error reports the count.
pub fn multistart<T, F, S>(
    mut f: F,
    mut sampler: S,
    runs: usize,
    seed: u64,
) -> Result<OptimizeResult<T>, NumOptError>
where
    T: Real,
    F: FnMut(&[T]) -> T,
    S: FnMut(&mut ChaCha8Rng) -> Vec<T>,
{
    let tol = real::<T>(DEFAULT_GRAD_TOL);
    let mut best: Option<OptimizeResult<T>> = None;
    let mut total_evals = 0usize;
    for run in 0..runs {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(run as u64);
        let x0 = sampler(&mut rng);
        let res = minimize(&mut f, &x0, tol, DEFAULT_MAX_ITER);
        total_evals += res.evaluations;
        if !res.best_value.is_finite() {
            continue;
        }
        let better = match &best {
            None => true,
            Some(b) => res.best_value < b.best_value,
        };
        if better {
            best = Some(res);
        }
    }
    match best {
        Some(mut b) => {
            b.evaluations = total_evals;
            Ok(b)
        }
        None => Err(NumOptError::AllRunsFailed { runs }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn uniform_sampler(lo: f64, hi: f64, dim: usize) -> impl FnMut(&mut ChaCha8Rng) -> Vec<f64> {
        move |rng| (0..dim).map(|_| rng.gen_range(lo..hi)).collect()
    }

    #[test]
    fn quadratic_finds_minimum() {
        let res = minimize(|x: &[f64]| (x[0] - 3.0).powi(2), &[0.0], 1e-9, 500);
        assert!(res.converged);
        assert!((res.best_params[0] - 3.0).abs() < 1e-7);
        assert!(res.best_value < 1e-13);
    }

    #[test]
    fn rosenbrock_reaches_global_minimum() {
        let rosen =
            |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let res = minimize(rosen, &[-1.2, 1.0], 1e-9, 500);
        assert!(
            (res.best_params[0] - 1.0).abs() < 1e-5 && (res.best_params[1] - 1.0).abs() < 1e-5,
            "ended at {:?}",
            res.best_params
        );
    }

    #[test]
    fn constant_objective_converges_immediately() {
        let res = minimize(|_: &[f64]| 7.5, &[1.0, -2.0], 1e-9, 500);
        assert!(res.converged);
        assert_eq!(res.best_params, vec![1.0, -2.0]);
        assert_eq!(res.best_value, 7.5);
    }

    #[test]
    fn non_finite_start_reports_failure() {
        let res = minimize(|_: &[f64]| f64::NAN, &[0.0], 1e-9, 50);
        assert!(!res.converged);
        assert!(res.best_value.is_nan());
    }

    #[test]
    fn descent_never_increases_objective() {
        // Invariant: best_value <= f(x0).
        let f = |x: &[f64]| x[0].sin() + 0.5 * x[0] * x[0];
        for start in [-3.0, -1.0, 0.0, 2.0, 5.0] {
            let res = minimize(f, &[start], 1e-9, 200);
            assert!(res.best_value <= f(&[start]) + 1e-15);
        }
    }

    #[test]
    fn multistart_is_deterministic() {
        let f = |x: &[f64]| (3.0 * x[0]).sin() + 0.1 * x[0] * x[0];
        let a = multistart(f, uniform_sampler(-10.0, 10.0, 1), 20, 42).unwrap();
        let b = multistart(f, uniform_sampler(-10.0, 10.0, 1), 20, 42).unwrap();
        assert_eq!(a.best_params, b.best_params);
        assert_eq!(a.best_value, b.best_value);
        assert_eq!(a.evaluations, b.evaluations);
    }

    #[test]
    fn multistart_is_monotone_in_runs() {
        let f = |x: &[f64]| (3.0 * x[0]).sin() + 0.1 * x[0] * x[0];
        let few = multistart(f, uniform_sampler(-10.0, 10.0, 1), 5, 7).unwrap();
        let many = multistart(f, uniform_sampler(-10.0, 10.0, 1), 25, 7).unwrap();
        assert!(many.best_value <= few.best_value);
    }

    #[test]
    fn multistart_single_run_equals_minimize_from_sampled_start() {
        let f = |x: &[f64]| (x[0] - 3.0).powi(2);
        let mut sampler = uniform_sampler(-10.0, 10.0, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        rng.set_stream(0);
        let x0 = sampler(&mut rng);
        let direct = minimize(f, &x0, 1e-9, 500);
        let multi = multistart(f, uniform_sampler(-10.0, 10.0, 1), 1, 11).unwrap();
        assert_eq!(multi.best_params, direct.best_params);
        assert_eq!(multi.best_value, direct.best_value);
    }

    #[test]
    fn multistart_finds_global_minimum_of_multimodal() {
        // Oracle: dense grid scan refined by a local descent.
        let f = |x: &[f64]| (3.0 * x[0]).sin() + 0.1 * x[0] * x[0];
        let mut grid_best = (f64::INFINITY, 0.0);
        let mut t = -10.0;
        while t <= 10.0 {
            let v = f(&[t]);
            if v < grid_best.0 {
                grid_best = (v, t);
            }
            t += 1e-3;
        }
        let oracle = minimize(f, &[grid_best.1], 1e-12, 500).best_value;

        let mut hits = 0;
        for seed in 0..100u64 {
            let res = multistart(f, uniform_sampler(-10.0, 10.0, 1), 100, seed).unwrap();
            if (res.best_value - oracle).abs() < 1e-6 {
                hits += 1;
            }
        }
        assert!(hits >= 99, "global minimum found in only {hits}/100 seeds");
    }

    #[test]
    fn all_failed_runs_surface_an_error() {
        let err = multistart(
            |_: &[f64]| f64::NAN,
            uniform_sampler(-1.0, 1.0, 1),
            3,
            0,
        )
        .unwrap_err();
        assert!(matches!(err, NumOptError::AllRunsFailed { runs: 3 }));
    }

    #[test]
    fn f32_quadratic_smoke() {
        let res = minimize(|x: &[f32]| (x[0] - 3.0).powi(2), &[0.0f32], 1e-3, 200);
        assert!((res.best_params[0] - 3.0).abs() < 1e-2);
    }
}
