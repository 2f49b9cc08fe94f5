//! Adaptive Dormand–Prince 5(4) integrator with continuous output.
//!
//! Produces the reference solutions against which the discrete schemes are
//! measured, and the start-up values the multi-point schemes need.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridPoint;
use crate::problems::OdeProblem;

pub type Rhs = Arc<dyn Fn(f64, &[f64], &mut [f64]) + Send + Sync>;

/// `u' = f(x, u)` on `[x0, xf]`.
#[derive(Clone)]
pub struct FirstOrderSystem {
    pub dim: usize,
    pub rhs: Rhs,
    pub x0: f64,
    pub xf: f64,
    pub u0: Vec<f64>,
}

impl std::fmt::Debug for FirstOrderSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FirstOrderSystem")
            .field("dim", &self.dim)
            .field("x0", &self.x0)
            .field("xf", &self.xf)
            .field("u0", &self.u0)
            .finish_non_exhaustive()
    }
}

impl FirstOrderSystem {
    pub fn eval(&self, x: f64, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        (self.rhs)(x, u, &mut out);
        out
    }
}

/// Converts an order-n problem into `u1' = u2, ..., un' = F(x, u)`.
pub fn to_first_order(problem: &OdeProblem) -> Result<FirstOrderSystem> {
    let n = problem.order();
    if !(2..=3).contains(&n) {
        return Err(Error::UnsupportedOrder(n));
    }
    let model = problem.model;
    let rhs: Rhs = Arc::new(move |x, u, out| {
        out[..n - 1].copy_from_slice(&u[1..n]);
        out[n - 1] = model.highest_derivative(x, u);
    });
    Ok(FirstOrderSystem {
        dim: n,
        rhs,
        x0: problem.x0,
        xf: problem.xf,
        u0: problem.initial.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverTolerances {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub h_init: f64,
    pub h_min: f64,
}

impl SolverTolerances {
    /// `abs_tol = rel_tol = tol`, initial step `1e-3` and minimum step `1e-12`
    /// of the interval length.
    pub fn for_interval(x0: f64, xf: f64, tol: f64) -> Self {
        let len = (xf - x0).abs().max(f64::MIN_POSITIVE);
        Self {
            abs_tol: tol,
            rel_tol: tol,
            h_init: 1e-3 * len,
            h_min: 1e-12 * len,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all_positive = [self.abs_tol, self.rel_tol, self.h_init, self.h_min]
            .iter()
            .all(|v| *v > 0.0 && v.is_finite());
        if !all_positive || self.h_min >= self.h_init {
            return Err(Error::InvalidConfig(format!("bad solver tolerances {self:?}")));
        }
        Ok(())
    }
}

/// Default tolerance of the reference integrator.
pub const DEFAULT_TOL: f64 = 1e-9;

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
/// Continuous extension weights.
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

const MAX_STEPS: usize = 10_000_000;

/// One accepted step with its continuous-extension coefficients.
#[derive(Debug, Clone)]
struct DenseStep {
    x: f64,
    h: f64,
    start: Vec<f64>,
    end: Vec<f64>,
    r2: Vec<f64>,
    r3: Vec<f64>,
    r4: Vec<f64>,
    r5: Vec<f64>,
}

impl DenseStep {
    fn eval(&self, x: f64) -> Vec<f64> {
        if x == self.x {
            return self.start.clone();
        }
        if x == self.x + self.h {
            return self.end.clone();
        }
        let t = (x - self.x) / self.h;
        let t1 = 1.0 - t;
        (0..self.start.len())
            .map(|i| {
                self.start[i]
                    + t * (self.r2[i] + t1 * (self.r3[i] + t * (self.r4[i] + t1 * self.r5[i])))
            })
            .collect()
    }
}

/// Continuous reference solution over the accepted range.
#[derive(Debug, Clone)]
pub struct DenseSolution {
    x0: f64,
    u0: Vec<f64>,
    steps: Vec<DenseStep>,
    /// Abscissa where the step size underflowed, if it did.
    pub failure: Option<f64>,
    pub rhs_evaluations: usize,
}

impl DenseSolution {
    pub fn start(&self) -> f64 {
        self.x0
    }

    /// Last abscissa reached.
    pub fn end(&self) -> f64 {
        self.steps.last().map_or(self.x0, |s| s.x + s.h)
    }

    pub fn accepted_steps(&self) -> usize {
        self.steps.len()
    }

    /// Abscissas of all accepted step end points, starting with `x0`.
    pub fn mesh(&self) -> Vec<f64> {
        std::iter::once(self.x0)
            .chain(self.steps.iter().map(|s| s.x + s.h))
            .collect()
    }

    /// Stored states at `mesh()`.
    pub fn states(&self) -> Vec<Vec<f64>> {
        std::iter::once(self.u0.clone())
            .chain(self.steps.iter().map(|s| s.end.clone()))
            .collect()
    }

    /// `Err(StepUnderflow)` when the integration stopped early.
    pub fn check(&self) -> Result<()> {
        match self.failure {
            Some(x) => Err(Error::StepUnderflow { x }),
            None => Ok(()),
        }
    }

    pub fn value_at(&self, x: f64) -> Result<Vec<f64>> {
        let (start, end) = (self.x0, self.end());
        let slack = 1e-13 * (1.0 + end.abs());
        if !(x >= start - slack && x <= end + slack) {
            return Err(Error::OutOfRange { x, start, end });
        }
        if self.steps.is_empty() {
            return Ok(self.u0.clone());
        }
        let idx = self
            .steps
            .partition_point(|s| s.x + s.h < x)
            .min(self.steps.len() - 1);
        Ok(self.steps[idx].eval(x.clamp(start, end)))
    }

    pub fn y_at(&self, x: f64) -> Result<f64> {
        Ok(self.value_at(x)?[0])
    }
}

/// Samples the dense solution at each requested abscissa.
pub fn sample_at(solution: &DenseSolution, xs: &[f64]) -> Result<Vec<Vec<f64>>> {
    xs.iter().map(|&x| solution.value_at(x)).collect()
}

struct Stages {
    k: [Vec<f64>; 7],
    trial: Vec<f64>,
}

impl Stages {
    fn new(dim: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![0.0; dim]),
            trial: vec![0.0; dim],
        }
    }

    /// Fills stages 2..7 assuming `k[0]` holds `f(x, u)`. Returns the
    /// fifth-order solution and the error vector.
    fn step(&mut self, sys: &FirstOrderSystem, x: f64, u: &[f64], h: f64) -> (Vec<f64>, Vec<f64>) {
        let dim = u.len();
        for s in 1..7 {
            for i in 0..dim {
                let mut acc = 0.0;
                for j in 0..s {
                    acc += A[s][j] * self.k[j][i];
                }
                self.trial[i] = u[i] + h * acc;
            }
            let (done, rest) = self.k.split_at_mut(s);
            let _ = done;
            (sys.rhs)(x + C[s] * h, &self.trial, &mut rest[0]);
        }
        // Stage 7 was evaluated at the fifth-order solution (FSAL).
        let next = self.trial.clone();
        let err = (0..dim)
            .map(|i| h * (0..7).map(|j| E[j] * self.k[j][i]).sum::<f64>())
            .collect();
        (next, err)
    }
}

/// Integrates `sys` over its interval with proportional step-size control.
///
/// A step is accepted when every component of the local error estimate lies
/// below `abs_tol + rel_tol * |u|`. If the step size drops below `h_min` the
/// partial solution is returned with `failure` set.
pub fn integrate_adaptive(sys: &FirstOrderSystem, tol: &SolverTolerances) -> Result<DenseSolution> {
    tol.validate()?;
    let dim = sys.dim;
    let mut x = sys.x0;
    let mut u = sys.u0.clone();
    let mut st = Stages::new(dim);
    (sys.rhs)(x, &u, &mut st.k[0]);
    let mut evaluations = 1;
    if !st.k[0].iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "right-hand side not finite at the initial state x = {x}"
        )));
    }
    let mut sol = DenseSolution {
        x0: x,
        u0: u.clone(),
        steps: Vec::new(),
        failure: None,
        rhs_evaluations: 0,
    };
    let xf = sys.xf;
    let mut h = tol.h_init.min(xf - x);
    let mut last_rejected = false;
    while x < xf {
        if sol.steps.len() >= MAX_STEPS {
            sol.failure = Some(x);
            break;
        }
        if h < tol.h_min {
            sol.failure = Some(x);
            break;
        }
        let landing = x + h >= xf;
        if landing {
            h = xf - x;
        }
        let (next, err_vec) = st.step(sys, x, &u, h);
        evaluations += 6;
        let mut err = 0.0f64;
        for i in 0..dim {
            let scale = tol.abs_tol + tol.rel_tol * u[i].abs().max(next[i].abs());
            err = err.max((err_vec[i] / scale).abs());
        }
        if !err.is_finite() || !next.iter().all(|v| v.is_finite()) {
            h *= 0.2;
            last_rejected = true;
            continue;
        }
        if err <= 1.0 {
            let k1 = &st.k[0];
            let k7 = &st.k[6];
            let mut r2 = vec![0.0; dim];
            let mut r3 = vec![0.0; dim];
            let mut r4 = vec![0.0; dim];
            let mut r5 = vec![0.0; dim];
            for i in 0..dim {
                r2[i] = next[i] - u[i];
                r3[i] = h * k1[i] - r2[i];
                r4[i] = r2[i] - h * k7[i] - r3[i];
                r5[i] = h * (0..7).map(|j| D[j] * st.k[j][i]).sum::<f64>();
            }
            let x_next = if landing { xf } else { x + h };
            sol.steps.push(DenseStep {
                x,
                h: x_next - x,
                start: u.clone(),
                end: next.clone(),
                r2,
                r3,
                r4,
                r5,
            });
            x = x_next;
            u = next;
            st.k[0] = st.k[6].clone();
            let mut factor = if err == 0.0 { 5.0 } else { 0.9 * err.powf(-0.2) };
            factor = factor.clamp(0.2, 5.0);
            if last_rejected {
                factor = factor.min(1.0);
            }
            h *= factor;
            last_rejected = false;
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
            last_rejected = true;
        }
    }
    sol.rhs_evaluations = evaluations;
    Ok(sol)
}

/// Fixed-step integration with the fifth-order formula; returns the end state.
pub fn integrate_fixed_step(sys: &FirstOrderSystem, h: f64) -> Result<Vec<f64>> {
    if !(h > 0.0) {
        return Err(Error::InvalidConfig(format!("step must be positive, got {h}")));
    }
    let n = ((sys.xf - sys.x0) / h).round() as usize;
    let mut st = Stages::new(sys.dim);
    let mut u = sys.u0.clone();
    for i in 0..n {
        let x = sys.x0 + i as f64 * h;
        (sys.rhs)(x, &u, &mut st.k[0]);
        let (next, _) = st.step(sys, x, &u, h);
        u = next;
    }
    Ok(u)
}

/// Solves `problem` with the default reference tolerance over `[x0, x_end]`.
pub fn reference_solution(problem: &OdeProblem, x_end: f64, tol: f64) -> Result<DenseSolution> {
    let mut sys = to_first_order(problem)?;
    sys.xf = x_end;
    integrate_adaptive(&sys, &SolverTolerances::for_interval(sys.x0, x_end, tol))
}

/// Start-up nodes from the closed form when there is one, otherwise from a
/// reference solution.
pub fn startup_values(problem: &OdeProblem, nodes: &[f64]) -> Result<Vec<GridPoint>> {
    validate_startup_nodes(problem, nodes)?;
    if let Some(f) = problem.exact {
        return Ok(nodes.iter().map(|&x| GridPoint::new(x, f(x))).collect());
    }
    if nodes.len() == 1 {
        return Ok(vec![GridPoint::new(nodes[0], problem.initial[0])]);
    }
    let end = *nodes.last().unwrap();
    let sol = reference_solution(problem, end, DEFAULT_TOL)?;
    startup_from(problem, nodes, &sol)
}

/// Start-up nodes from separate integrations that land on each node.
///
/// Avoids the interpolation error of dense output, which the invariant
/// recurrences amplify roughly like `h⁻²`.
pub fn startup_integrated(problem: &OdeProblem, nodes: &[f64], tol: f64) -> Result<Vec<GridPoint>> {
    validate_startup_nodes(problem, nodes)?;
    if let Some(f) = problem.exact {
        return Ok(nodes.iter().map(|&x| GridPoint::new(x, f(x))).collect());
    }
    nodes
        .iter()
        .map(|&x| {
            if x == problem.x0 {
                return Ok(GridPoint::new(x, problem.initial[0]));
            }
            let sol = reference_solution(problem, x, tol)?;
            sol.check()?;
            Ok(GridPoint::new(x, sol.states().last().map_or(problem.initial[0], |u| u[0])))
        })
        .collect()
}

/// Start-up nodes sampled from an existing reference solution.
pub fn startup_from(
    problem: &OdeProblem,
    nodes: &[f64],
    reference: &DenseSolution,
) -> Result<Vec<GridPoint>> {
    validate_startup_nodes(problem, nodes)?;
    if let Some(f) = problem.exact {
        return Ok(nodes.iter().map(|&x| GridPoint::new(x, f(x))).collect());
    }
    nodes
        .iter()
        .map(|&x| {
            let y = if x == problem.x0 {
                problem.initial[0]
            } else {
                reference.y_at(x)?
            };
            Ok(GridPoint::new(x, y))
        })
        .collect()
}

fn validate_startup_nodes(problem: &OdeProblem, nodes: &[f64]) -> Result<()> {
    if nodes.is_empty() || nodes.len() > 3 {
        return Err(Error::InvalidConfig(format!(
            "expected 1 to 3 start-up nodes, got {}",
            nodes.len()
        )));
    }
    if nodes[0] != problem.x0 {
        return Err(Error::InvalidConfig(format!(
            "first start-up node {} must be x0 = {}",
            nodes[0], problem.x0
        )));
    }
    if !nodes.windows(2).all(|w| w[1] > w[0]) {
        return Err(Error::NonMonotone);
    }
    Ok(())
}
