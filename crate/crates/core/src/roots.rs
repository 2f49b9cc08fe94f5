//! Scalar and planar root finding used by the implicit steppers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Iterates whose magnitude exceeds this are treated as divergent.
pub const DIVERGENCE_LIMIT: f64 = 1e10;

const MAX_HALVINGS: usize = 40;
const POLISH_STEPS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootConfig {
    /// Absolute residual tolerance.
    pub tol: f64,
    pub max_iter: usize,
    /// Initial fraction of each update that is applied, in (0, 1].
    pub damping: f64,
    /// Relative update size below which an iteration is considered stalled at
    /// round-off level and accepted.
    pub step_tol: f64,
}

impl Default for RootConfig {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 100,
            damping: 1.0,
            step_tol: 1e-13,
        }
    }
}

impl RootConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "damping must lie in (0, 1], got {}",
                self.damping
            )));
        }
        Ok(())
    }
}

fn check_magnitude(value: f64) -> Result<()> {
    if !value.is_finite() || value.abs() > DIVERGENCE_LIMIT {
        return Err(Error::Divergence { value });
    }
    Ok(())
}

/// Solves `y = g(y)` by (optionally damped) successive substitution.
///
/// The returned `y` satisfies `|g(y) - y| <= cfg.tol`.
pub fn fixed_point<G>(mut g: G, y0: f64, cfg: &RootConfig) -> Result<f64>
where
    G: FnMut(f64) -> f64,
{
    cfg.validate()?;
    let mut y = y0;
    check_magnitude(y)?;
    let mut residual = f64::INFINITY;
    for _ in 0..cfg.max_iter {
        let gy = g(y);
        check_magnitude(gy)?;
        residual = gy - y;
        if residual.abs() <= cfg.tol {
            return Ok(polish(&mut g, y, residual.abs(), cfg));
        }
        y += cfg.damping * residual;
    }
    Err(Error::NonConvergence {
        iterations: cfg.max_iter,
        residual: residual.abs(),
    })
}

/// Keeps substituting past `tol` while the residual still shrinks, so that
/// stopping errors do not accumulate over long multistep runs.
fn polish<G: FnMut(f64) -> f64>(g: &mut G, mut y: f64, mut residual: f64, cfg: &RootConfig) -> f64 {
    for _ in 0..cfg.max_iter {
        if residual == 0.0 {
            break;
        }
        let next = g(y);
        let r = (g(next) - next).abs();
        if !(r < residual) {
            break;
        }
        y = next;
        residual = r;
    }
    y
}

fn fd_step(v: f64) -> f64 {
    1e-7 * (1.0 + v.abs())
}

/// Damped Newton iteration for `f(y) = 0` with a central-difference derivative.
///
/// When a full update does not reduce `|f|` it is halved until it does.
pub fn newton_1d<F>(mut f: F, y0: f64, cfg: &RootConfig) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    cfg.validate()?;
    let mut y = y0;
    check_magnitude(y)?;
    let mut fy = f(y);
    if !fy.is_finite() {
        return Err(Error::Divergence { value: fy });
    }
    for _ in 0..cfg.max_iter {
        if fy.abs() <= cfg.tol {
            return Ok(polish_1d(&mut f, y, fy));
        }
        let d = fd_step(y);
        let (up, down) = (f(y + d), f(y - d));
        // Near the edge of the residual's domain one probe may be undefined.
        let slope = match (up.is_finite(), down.is_finite()) {
            (true, true) => (up - down) / (2.0 * d),
            (true, false) => (up - fy) / d,
            (false, true) => (fy - down) / d,
            (false, false) => f64::NAN,
        };
        if !slope.is_finite() || slope.abs() < 1e-14 * (1.0 + fy.abs()) {
            return Err(Error::SingularDerivative);
        }
        let delta = -fy / slope;
        let mut lambda = cfg.damping;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let trial = y + lambda * delta;
            let ft = f(trial);
            if ft.is_finite() && ft.abs() < fy.abs() {
                accepted = Some((trial, ft));
                break;
            }
            lambda *= 0.5;
        }
        let (next, fnext) = match accepted {
            Some(v) => v,
            None => {
                // No decrease along the Newton direction: stalled at round-off
                // level if the update is negligible, otherwise take the full
                // step and let the outer loop decide.
                if delta.abs() <= cfg.step_tol * (1.0 + y.abs()) {
                    return Ok(polish_1d(&mut f, y, fy));
                }
                let trial = y + cfg.damping * delta;
                (trial, f(trial))
            }
        };
        check_magnitude(next)?;
        if !fnext.is_finite() {
            return Err(Error::Divergence { value: next });
        }
        let moved = (next - y).abs();
        y = next;
        fy = fnext;
        if moved <= cfg.step_tol * (1.0 + y.abs()) {
            return Ok(polish_1d(&mut f, y, fy));
        }
    }
    if fy.abs() <= cfg.tol {
        return Ok(polish_1d(&mut f, y, fy));
    }
    Err(Error::NonConvergence {
        iterations: cfg.max_iter,
        residual: fy.abs(),
    })
}

fn polish_1d<F: FnMut(f64) -> f64>(f: &mut F, mut y: f64, mut fy: f64) -> f64 {
    for _ in 0..POLISH_STEPS {
        if fy == 0.0 {
            break;
        }
        let d = fd_step(y);
        let (up, down) = (f(y + d), f(y - d));
        // Near the edge of the residual's domain one probe may be undefined.
        let slope = match (up.is_finite(), down.is_finite()) {
            (true, true) => (up - down) / (2.0 * d),
            (true, false) => (up - fy) / d,
            (false, true) => (fy - down) / d,
            (false, false) => f64::NAN,
        };
        let trial = y - fy / slope;
        let ft = f(trial);
        if !(ft.abs() < fy.abs()) {
            break;
        }
        y = trial;
        fy = ft;
    }
    y
}

fn max_norm(v: [f64; 2]) -> f64 {
    v[0].abs().max(v[1].abs())
}

/// Damped Newton iteration for a planar system `F(p) = 0`.
///
/// The Jacobian is estimated by central differences with step
/// `1e-7 * (1 + |p_i|)` per coordinate.
pub fn newton_2d<F>(mut f: F, p0: [f64; 2], cfg: &RootConfig) -> Result<[f64; 2]>
where
    F: FnMut([f64; 2]) -> [f64; 2],
{
    cfg.validate()?;
    let mut p = p0;
    check_magnitude(p[0])?;
    check_magnitude(p[1])?;
    let mut fp = f(p);
    if !fp.iter().all(|v| v.is_finite()) {
        return Err(Error::Divergence {
            value: max_norm(fp),
        });
    }
    for _ in 0..cfg.max_iter {
        if max_norm(fp) <= cfg.tol {
            return Ok(polish_2d(&mut f, p, fp));
        }
        let delta = solve_2x2(jacobian(&mut f, p), [-fp[0], -fp[1]])?;
        let norm0 = max_norm(fp);
        let mut lambda = cfg.damping;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let trial = [p[0] + lambda * delta[0], p[1] + lambda * delta[1]];
            let ft = f(trial);
            if ft.iter().all(|v| v.is_finite()) && max_norm(ft) < norm0 {
                accepted = Some((trial, ft));
                break;
            }
            lambda *= 0.5;
        }
        let small = |dv: [f64; 2], at: [f64; 2]| {
            (0..2).all(|i| dv[i].abs() <= cfg.step_tol * (1.0 + at[i].abs()))
        };
        let (next, fnext) = match accepted {
            Some(v) => v,
            None => {
                if small(delta, p) {
                    return Ok(polish_2d(&mut f, p, fp));
                }
                let trial = [p[0] + cfg.damping * delta[0], p[1] + cfg.damping * delta[1]];
                (trial, f(trial))
            }
        };
        check_magnitude(next[0])?;
        check_magnitude(next[1])?;
        if !fnext.iter().all(|v| v.is_finite()) {
            return Err(Error::Divergence {
                value: max_norm(fnext),
            });
        }
        let moved = [next[0] - p[0], next[1] - p[1]];
        p = next;
        fp = fnext;
        if small(moved, p) {
            return Ok(polish_2d(&mut f, p, fp));
        }
    }
    if max_norm(fp) <= cfg.tol {
        return Ok(polish_2d(&mut f, p, fp));
    }
    Err(Error::NonConvergence {
        iterations: cfg.max_iter,
        residual: max_norm(fp),
    })
}

fn jacobian<F: FnMut([f64; 2]) -> [f64; 2]>(f: &mut F, p: [f64; 2]) -> [[f64; 2]; 2] {
    let mut jac = [[0.0; 2]; 2];
    for j in 0..2 {
        let d = fd_step(p[j]);
        let mut plus = p;
        let mut minus = p;
        plus[j] += d;
        minus[j] -= d;
        let (fa, fb) = (f(plus), f(minus));
        for i in 0..2 {
            jac[i][j] = (fa[i] - fb[i]) / (2.0 * d);
        }
    }
    jac
}

/// Extra full Newton steps after convergence, kept only while the residual
/// keeps dropping. Stopping errors would otherwise accumulate over long
/// multistep runs.
fn polish_2d<F: FnMut([f64; 2]) -> [f64; 2]>(f: &mut F, mut p: [f64; 2], mut fp: [f64; 2]) -> [f64; 2] {
    for _ in 0..POLISH_STEPS {
        if max_norm(fp) == 0.0 {
            break;
        }
        let Ok(delta) = solve_2x2(jacobian(f, p), [-fp[0], -fp[1]]) else { break };
        let trial = [p[0] + delta[0], p[1] + delta[1]];
        let ft = f(trial);
        if !(max_norm(ft) < max_norm(fp)) {
            break;
        }
        p = trial;
        fp = ft;
    }
    p
}

/// Solves a 2x2 system after row equilibration, rejecting ill-conditioned matrices.
fn solve_2x2(mut a: [[f64; 2]; 2], mut b: [f64; 2]) -> Result<[f64; 2]> {
    for i in 0..2 {
        let s = a[i][0].abs().max(a[i][1].abs());
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::SingularJacobian {
                condition: f64::INFINITY,
            });
        }
        a[i][0] /= s;
        a[i][1] /= s;
        b[i] /= s;
    }
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let norm = (a[0][0].abs() + a[0][1].abs()).max(a[1][0].abs() + a[1][1].abs());
    let inv_norm = (a[1][1].abs() + a[0][1].abs()).max(a[1][0].abs() + a[0][0].abs()) / det.abs();
    let condition = norm * inv_norm;
    if det == 0.0 || !condition.is_finite() || condition > 1e14 {
        return Err(Error::SingularJacobian { condition });
    }
    Ok([
        (b[0] * a[1][1] - a[0][1] * b[1]) / det,
        (a[0][0] * b[1] - a[1][0] * b[0]) / det,
    ])
}
