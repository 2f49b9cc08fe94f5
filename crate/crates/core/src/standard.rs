//! Conventional finite-difference schemes on uniform meshes, used as the
//! baseline the invariant schemes are compared against.

use crate::error::{Error, Result};
use crate::grid::{GridPoint, NodeFlag, Stop, Trajectory};
use crate::problems::{Model, OdeProblem};
use crate::roots::{fixed_point, newton_1d, RootConfig, DIVERGENCE_LIMIT};

/// Four equally spaced ordinates `y_{n-1}, y_n, y_{n+1}, y_{n+2}` starting at
/// `x_base`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformStencil {
    pub x_base: f64,
    pub h: f64,
    pub ys: [f64; 4],
}

impl UniformStencil {
    pub fn new(x_base: f64, h: f64, ys: [f64; 4]) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::DegenerateStencil("step must be positive"));
        }
        Ok(Self { x_base, h, ys })
    }

    /// Centre of the stencil, `x_base + 3h/2`.
    pub fn midpoint(&self) -> f64 {
        self.x_base + 1.5 * self.h
    }

    /// Cubic-interpolant value and first three derivatives at the midpoint.
    pub fn derivatives(&self) -> [f64; 4] {
        p3_derivatives(self.ys, self.h)
    }
}

/// Value and first three derivatives at the centre of four equally spaced
/// ordinates, from the interpolating cubic.
pub fn p3_derivatives(ys: [f64; 4], h: f64) -> [f64; 4] {
    let [ym, y0, y1, y2] = ys;
    [
        (9.0 * (y0 + y1) - (ym + y2)) / 16.0,
        (27.0 * (y1 - y0) - (y2 - ym)) / (24.0 * h),
        (y2 - y1 - y0 + ym) / (2.0 * h * h),
        (y2 - 3.0 * y1 + 3.0 * y0 - ym) / (h * h * h),
    ]
}

/// Central-difference step for Example 1 at `x_n`:
/// `x² D² y + 4x D y + 2y = (2xy + x² D y)^p`, solved for `y_{n+1}` by
/// successive substitution.
pub fn standard_step_ex1(k: f64, x: f64, h: f64, y: [f64; 2], root: &RootConfig) -> Result<f64> {
    let [ym, y0] = y;
    let p = (k - 2.0) / (k - 1.0);
    let den = x * x + 2.0 * x * h;
    if den == 0.0 {
        return Err(Error::DomainError("x = 0 on the stencil"));
    }
    let fractional = p.fract() != 0.0;
    let base_of = |y1: f64| 2.0 * x * y0 + x * x * (y1 - ym) / (2.0 * h);
    // The radicand is clamped while iterating; only its sign at the fixed
    // point matters.
    let g = |y1: f64| {
        let base = if fractional { base_of(y1).max(0.0) } else { base_of(y1) };
        (h * h * base.powf(p) + (2.0 * y0 - ym) * x * x + 2.0 * x * h * ym - 2.0 * h * h * y0) / den
    };
    let y1 = fixed_point(g, 2.0 * y0 - ym, root)?;
    let base = base_of(y1);
    if fractional && base < 0.0 {
        return Err(Error::NegativeRadicand { value: base });
    }
    Ok(y1)
}

/// Third-order step: the equation with cubic-stencil derivatives at the
/// centre of `(x_{n-1}, ..., x_{n+2})`, solved for `y_{n+2}` by Newton.
pub fn standard_step_third_order(model: &Model, x_base: f64, h: f64, y: [f64; 3], root: &RootConfig) -> Result<f64> {
    let [ym, y0, y1] = y;
    let xm = x_base + 1.5 * h;
    let h3 = h * h * h;
    let residual = |y2: f64| {
        let [v, d1, d2, d3] = p3_derivatives([ym, y0, y1, y2], h);
        h3 * model.residual(xm, v, d1, d2, d3)
    };
    newton_1d(residual, 3.0 * y1 - 3.0 * y0 + ym, root)
}

/// Runs the standard scheme from start-ups on a uniform mesh whose step is
/// the start-up spacing.
///
/// Failures do not abort: the failing node is flagged and the run stops.
pub fn run_standard(problem: &OdeProblem, startups: &[GridPoint], root: &RootConfig) -> Result<Trajectory> {
    problem.model.validate()?;
    root.validate()?;
    let order = problem.order();
    if startups.len() != order {
        return Err(Error::InvalidConfig(format!(
            "example {} needs {order} start-up values, got {}",
            problem.model.number(),
            startups.len()
        )));
    }
    let mut traj = Trajectory::from_points(startups.iter().copied());
    if problem.xf <= problem.x0 {
        return Ok(traj);
    }
    let x0 = startups[0].x;
    let h = startups[1].x - x0;
    if !(h > 0.0) {
        return Err(Error::NonMonotone);
    }
    let steps = ((problem.xf - x0) / h).round() as usize;
    for i in order..=steps {
        let x = x0 + i as f64 * h;
        let ys = &traj.nodes[i - order..i];
        let next = match problem.model {
            Model::Example1 { k } => standard_step_ex1(k, x - h, h, [ys[0].y, ys[1].y], root),
            ref m => standard_step_third_order(m, x - 3.0 * h, h, [ys[0].y, ys[1].y, ys[2].y], root),
        };
        let outcome = next.and_then(|y| {
            if y.is_finite() && y.abs() <= DIVERGENCE_LIMIT {
                Ok(y)
            } else {
                Err(Error::Divergence { value: y })
            }
        });
        match outcome {
            Ok(y) => traj.push(GridPoint::new(x, y), NodeFlag::Ok),
            Err(e) => {
                let flag = if matches!(e, Error::Divergence { .. }) {
                    NodeFlag::Diverged
                } else {
                    NodeFlag::SolverFailed
                };
                traj.push(GridPoint::new(x, f64::NAN), flag);
                traj.stop = Some(Stop {
                    index: i,
                    x,
                    reason: e.to_string(),
                });
                break;
            }
        }
    }
    Ok(traj)
}
