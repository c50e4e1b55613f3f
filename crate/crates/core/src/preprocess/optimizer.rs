//! Multi-start bounded Nelder–Mead maximization.
//!
//! Trial points are clamped into the box, so every evaluation is feasible.
//! Starts are the caller's seed points followed by uniform random points
//! drawn from a ChaCha stream, which makes results reproducible.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned box.
#[derive(Clone, Debug, PartialEq)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::InvalidParameter("bound vectors differ in length".into()));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l.is_finite() && u.is_finite() && l <= u)) {
            return Err(Error::InvalidParameter("bounds must be finite with lower ≤ upper".into()));
        }
        Ok(Self { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    fn clamp(&self, x: &mut [f64]) {
        for ((v, &l), &u) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *v = v.clamp(l, u);
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        self.lower.iter().zip(&self.upper).map(|(&l, &u)| l + (u - l) * rng.random::<f64>()).collect()
    }
}

/// Budget and stopping rule for one optimization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Total number of starts, including the caller's seed points.
    pub starts: usize,
    /// Nelder–Mead iterations per start.
    pub max_iters: usize,
    /// Stop a start once the simplex values agree to this absolute tolerance.
    pub tol: f64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { starts: 32, max_iters: 500, tol: 1e-6 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimResult {
    pub best_value: f64,
    pub best_x: Vec<f64>,
    pub evaluations: usize,
    /// True if some start stopped on the iteration limit rather than the tolerance.
    pub budget_exhausted: bool,
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Maximize `f` over `bounds`.
pub fn optimize<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    bounds: &Bounds,
    seed_points: &[Vec<f64>],
    budget: &SearchBudget,
    rng_seed: u64,
) -> Result<OptimResult> {
    let n = bounds.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut evaluations = 0;
    let mut exhausted = false;
    let total_starts = budget.starts.max(seed_points.len()).max(1);

    for start in 0..total_starts {
        let mut x0 = match seed_points.get(start) {
            Some(p) => {
                if p.len() != n {
                    return Err(Error::InvalidParameter("seed point has wrong dimension".into()));
                }
                p.clone()
            }
            None => bounds.sample(&mut rng),
        };
        bounds.clamp(&mut x0);
        let (v, x, evals, done) = nelder_mead(&mut f, bounds, x0, budget.max_iters, budget.tol);
        evaluations += evals;
        exhausted |= !done;
        if v.is_finite() && best.as_ref().is_none_or(|(bv, _)| v > *bv) {
            best = Some((v, x));
        }
    }
    match best {
        Some((best_value, best_x)) => Ok(OptimResult { best_value, best_x, evaluations, budget_exhausted: exhausted }),
        None => Err(Error::OptimizerFailed),
    }
}

/// One bounded Nelder–Mead run (maximizing). Returns the best value, its
/// point, the evaluation count and whether the tolerance was reached.
fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    bounds: &Bounds,
    x0: Vec<f64>,
    max_iters: usize,
    tol: f64,
) -> (f64, Vec<f64>, usize, bool) {
    let n = x0.len();
    let mut evals = 0;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        sanitize(f(x))
    };
    if n == 0 {
        let v = eval(&x0, &mut evals);
        return (v, x0, evals, true);
    }

    // Initial simplex: 10% of each box width, stepping inward from the bounds.
    let mut simplex: Vec<(f64, Vec<f64>)> = Vec::with_capacity(n + 1);
    let v0 = eval(&x0, &mut evals);
    simplex.push((v0, x0.clone()));
    for i in 0..n {
        let mut x = x0.clone();
        let width = bounds.upper[i] - bounds.lower[i];
        let step = if width > 0.0 { 0.1 * width } else { 0.0 };
        x[i] = if x[i] + step <= bounds.upper[i] { x[i] + step } else { x[i] - step };
        let v = eval(&x, &mut evals);
        simplex.push((v, x));
    }

    let order = |s: &mut Vec<(f64, Vec<f64>)>| s.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut converged = false;
    for _ in 0..max_iters {
        order(&mut simplex);
        let (best, worst) = (simplex[0].0, simplex[n].0);
        if best.is_finite() && worst.is_finite() && (best - worst).abs() <= tol {
            converged = true;
            break;
        }
        // centroid of all but worst
        let mut centroid = vec![0.0; n];
        for (_, x) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let towards = |coef: f64| -> Vec<f64> {
            let mut x: Vec<f64> =
                centroid.iter().zip(&simplex[n].1).map(|(c, w)| c + coef * (c - w)).collect();
            bounds.clamp(&mut x);
            x
        };
        let xr = towards(1.0);
        let vr = eval(&xr, &mut evals);
        if vr > simplex[0].0 {
            let xe = towards(2.0);
            let ve = eval(&xe, &mut evals);
            simplex[n] = if ve > vr { (ve, xe) } else { (vr, xr) };
            continue;
        }
        if vr > simplex[n - 1].0 {
            simplex[n] = (vr, xr);
            continue;
        }
        let (xc, vc) = if vr > simplex[n].0 {
            let xc = towards(0.5);
            let vc = eval(&xc, &mut evals);
            (xc, vc)
        } else {
            let xc = towards(-0.5);
            let vc = eval(&xc, &mut evals);
            (xc, vc)
        };
        if vc > simplex[n].0.max(vr) {
            simplex[n] = (vc, xc);
            continue;
        }
        // shrink towards the best vertex
        let xb = simplex[0].1.clone();
        for item in simplex.iter_mut().skip(1) {
            let mut x: Vec<f64> = xb.iter().zip(&item.1).map(|(b, xi)| b + 0.5 * (xi - b)).collect();
            bounds.clamp(&mut x);
            let v = eval(&x, &mut evals);
            *item = (v, x);
        }
    }
    order(&mut simplex);
    let (v, x) = simplex.swap_remove(0);
    (v, x, evals, converged)
}
