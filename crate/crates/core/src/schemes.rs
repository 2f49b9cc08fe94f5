//! Symmetry-preserving steppers: each produces the next mesh node from a
//! short prefix by solving the invariant scheme together with its lattice
//! equation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridPoint, NodeFlag, Stop, Trajectory};
use crate::invariants::{ex2_j_from_xi, ex2_xi_inc, ex4_j_raw, ex4_xi_raw, mesh_cross_ratio};
use crate::problems::{Forcing, Model, OdeProblem};
use crate::roots::{fixed_point, newton_2d, RootConfig};

/// Parameters shared by all invariant steppers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub model: Model,
    /// Lattice constant. For Example 1 this is the step ratio `K` (default 1);
    /// for Examples 2–4 it is `γ`, taken from the start-ups when `None`.
    pub lattice: Option<f64>,
    /// Weight `α` in `J1` (with `β = 1 - α`).
    pub alpha: f64,
    pub root: RootConfig,
}

impl SchemeConfig {
    pub fn new(model: Model) -> Self {
        Self {
            model,
            lattice: None,
            alpha: 0.5,
            root: RootConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        self.root.validate()?;
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidConfig(format!("alpha must lie in [0, 1], got {}", self.alpha)));
        }
        if let Some(g) = self.lattice {
            if !(g > 0.0 && g.is_finite()) {
                return Err(Error::InvalidConfig(format!("lattice constant must be positive, got {g}")));
            }
        }
        Ok(())
    }
}

/// Lagrange extrapolation through three nodes.
pub(crate) fn quadratic_predictor(p: &[GridPoint; 3], x: f64) -> f64 {
    let [a, b, c] = *p;
    a.y * (x - b.x) * (x - c.x) / ((a.x - b.x) * (a.x - c.x))
        + b.y * (x - a.x) * (x - c.x) / ((b.x - a.x) * (b.x - c.x))
        + c.y * (x - a.x) * (x - b.x) / ((c.x - a.x) * (c.x - b.x))
}

fn check_prefix<const N: usize>(p: &[GridPoint; N]) -> Result<()> {
    for w in p.windows(2) {
        let h = w[1].x - w[0].x;
        if !(w[0].y.is_finite() && w[1].y.is_finite() && h.is_finite()) {
            return Err(Error::DegenerateStencil("non-finite node"));
        }
        if h == 0.0 {
            return Err(Error::DegenerateStencil("zero step"));
        }
        if h < 0.0 {
            return Err(Error::NonMonotone);
        }
    }
    Ok(())
}

fn ensure_advances(prev: f64, next: f64) -> Result<()> {
    if next > prev && next.is_finite() {
        Ok(())
    } else {
        Err(Error::NonMonotone)
    }
}

/// One step of the Example 1 scheme on the lattice `h_{n+1} = K h_n`.
///
/// Solves `c (ξ2 - q) = [(ξ2 + q)/2]^((k-2)/(k-1))`, `c = 2ξ1/(ξ1 + 1)`,
/// `q = ξ3/ξ1^(k-1)`, for `y_{n+1}` by successive substitution.
pub fn step_ex1(prev: [GridPoint; 2], cfg: &SchemeConfig) -> Result<GridPoint> {
    let Model::Example1 { k } = cfg.model else {
        return Err(Error::InvalidConfig("step_ex1 needs an Example 1 model".into()));
    };
    check_prefix(&prev)?;
    let ratio = cfg.lattice.unwrap_or(1.0);
    let [a, b] = prev;
    let hn = b.x - a.x;
    let hn1 = ratio * hn;
    let x = b.x + hn1;
    if a.x == 0.0 || b.x == 0.0 || x == 0.0 {
        return Err(Error::DomainError("x = 0 on the stencil"));
    }
    let (w0, w1) = (a.x * a.x * a.y, b.x * b.x * b.y);
    let p = (k - 2.0) / (k - 1.0);
    let c = 2.0 * ratio / (ratio + 1.0);
    let q = (w1 - w0) / hn.powf(k) / ratio.powf(k - 1.0);
    let scale = hn1.powf(k);
    let base_of = |y: f64| 0.5 * ((x * x * y - w1) / scale + q);
    let fractional = p.fract() != 0.0;
    let g = |y: f64| {
        let base = if fractional { base_of(y).max(0.0) } else { base_of(y) };
        (w1 + scale * (q + base.powf(p) / c)) / (x * x)
    };
    let guess = (w1 + ratio * (w1 - w0)) / (x * x);
    let y = fixed_point(g, guess, &cfg.root)?;
    if fractional && base_of(y) < 0.0 {
        return Err(Error::NegativeRadicand { value: base_of(y) });
    }
    Ok(GridPoint::new(x, y))
}

/// Ratio of consecutive chords of the start-up triple (Example 2 lattice).
pub fn ex2_gamma(s: &[GridPoint; 3]) -> f64 {
    let c = |i: usize| (s[i + 1].x - s[i].x).hypot(s[i + 1].y - s[i].y);
    c(1) / c(0)
}

/// Ratio of the start-up chart steps (Example 3 lattice).
pub fn ex3_gamma(x: [f64; 3]) -> f64 {
    let t = |a: f64, b: f64| (b - a) / (1.0 + a * b);
    t(x[0], x[1]) / t(x[1], x[2])
}

/// Ratio of consecutive normalized increments (Example 4 lattice).
pub fn ex4_gamma(s: &[GridPoint; 3]) -> f64 {
    let d = |i: usize| (s[i + 1].y - s[i].y) / (s[i].x * s[i + 1].x).sqrt();
    d(1) / d(0)
}

fn step_predictor(prev: &[GridPoint; 3]) -> [f64; 2] {
    let (h0, h1) = (prev[1].x - prev[0].x, prev[2].x - prev[1].x);
    let x = prev[2].x + h1 * h1 / h0;
    [x, quadratic_predictor(prev, x)]
}

/// One step of the Example 2 scheme: `J2 = K J1²` with `ξ1 = γ ξ2`.
pub fn step_ex2(prev: [GridPoint; 3], gamma: f64, cfg: &SchemeConfig) -> Result<GridPoint> {
    check_prefix(&prev)?;
    let d = [0, 1].map(|i| [prev[i + 1].x - prev[i].x, prev[i + 1].y - prev[i].y]);
    let [h, dy] = step_ex2_increment(d, gamma, cfg)?;
    let x = prev[2].x + h;
    ensure_advances(prev[2].x, x)?;
    Ok(GridPoint::new(x, prev[2].y + dy))
}

/// The Example 2 step in increments: from the last two `(h, Δy)`, oldest
/// first, returns the next one.
///
/// The scheme only sees increments, so working with them directly avoids the
/// cancellation of differencing absolute coordinates.
pub fn step_ex2_increment(d: [[f64; 2]; 2], gamma: f64, cfg: &SchemeConfig) -> Result<[f64; 2]> {
    let Model::Example2 { k } = cfg.model else {
        return Err(Error::InvalidConfig("step_ex2 needs an Example 2 model".into()));
    };
    if !d.iter().flatten().all(|v| v.is_finite()) {
        return Err(Error::DegenerateStencil("non-finite node"));
    }
    if d.iter().any(|p| p[0] <= 0.0) {
        return Err(if d.iter().any(|p| p[0] == 0.0) {
            Error::DegenerateStencil("zero step")
        } else {
            Error::NonMonotone
        });
    }
    let alpha = cfg.alpha;
    let residual = |v: [f64; 2]| {
        let xi = ex2_xi_inc([d[0], d[1], v]);
        let (j1, j2) = ex2_j_from_xi(xi, alpha);
        [xi[1] * xi[1] * (j2 - k * j1 * j1), xi[0] / xi[1] - gamma]
    };
    let [[h0, d0], [h1, d1]] = d;
    let rel = [
        GridPoint::new(-(h0 + h1), -(d0 + d1)),
        GridPoint::new(-h1, -d1),
        GridPoint::new(0.0, 0.0),
    ];
    let next = newton_2d(residual, step_predictor(&rel), &cfg.root)?;
    ensure_advances(0.0, next[0])?;
    Ok(next)
}

/// Next abscissa of the Example 3 mesh: `ξ5 = ξ4/γ`, inverted for `x_{n+2}`.
pub fn mesh_ex3(prev: [f64; 3], gamma: f64) -> Result<f64> {
    let [_, x0, x1] = prev;
    let den4 = 1.0 + x0 * x1;
    if den4 == 0.0 {
        return Err(Error::PoleOfChart);
    }
    let xi5 = (x1 - x0) / den4 / gamma;
    let den = 1.0 - xi5 * x1;
    if den.abs() <= 1e-14 * (1.0 + (xi5 * x1).abs()) {
        return Err(Error::ChartPole);
    }
    let next = (x1 + xi5) / den;
    ensure_advances(x1, next)?;
    Ok(next)
}

/// Example 3 ordinate at a fixed next abscissa: `J2 = J1²`.
///
/// `J1 = A + B ξ2` and `J2 = C ξ2 + D` are affine in `ξ2`, so the scheme is a
/// quadratic; the root nearest the quadratic extrapolation is kept.
pub fn step_ex3_y(prev: [GridPoint; 3], x_next: f64, cfg: &SchemeConfig) -> Result<GridPoint> {
    check_prefix(&prev)?;
    ensure_advances(prev[2].x, x_next)?;
    let [m, n, p] = prev;
    let t = |a: f64, b: f64| -> Result<f64> {
        let den = 1.0 + a * b;
        if den == 0.0 {
            return Err(Error::PoleOfChart);
        }
        Ok((b - a) / den)
    };
    let (s3, s4, s5) = (t(m.x, n.x)?, t(n.x, p.x)?, t(p.x, x_next)?);
    let slope0 = (n.y - m.y) / (n.x - m.x);
    let slope1 = (p.y - n.y) / (p.x - n.x);
    let xi1 = (1.0 + n.x * n.x).sqrt() * (slope1 - slope0);
    let sum = s3 + s4 + s5;
    let (alpha, beta) = (cfg.alpha, 1.0 - cfg.alpha);
    let a = 2.0 * alpha * xi1 / (s3 + s4);
    let b = 2.0 * beta / (s4 + s5);
    let c = 6.0 / (sum * (s4 + s5));
    let d = -6.0 * xi1 / (sum * (s3 + s4));
    // B² ξ² + (2AB - C) ξ + A² - D = 0
    let (qa, qb, qc) = (b * b, 2.0 * a * b - c, a * a - d);
    let weight = (1.0 + p.x * p.x).sqrt();
    let to_y = |xi2: f64| p.y + (x_next - p.x) * (xi2 / weight + slope1);
    let predictor = quadratic_predictor(&prev, x_next);
    let roots: Vec<f64> = if qa.abs() <= 1e-14 * (qb.abs() + qc.abs()) {
        if qb == 0.0 {
            return Err(Error::NoRealRoot { discriminant: 0.0 });
        }
        vec![-qc / qb]
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc < 0.0 {
            return Err(Error::NoRealRoot { discriminant: disc });
        }
        let sq = disc.sqrt();
        // Cancellation-free pair of roots.
        let big = -0.5 * (qb + qb.signum() * sq);
        let mut r = vec![big / qa];
        if big != 0.0 {
            r.push(qc / big);
        }
        r
    };
    let y = roots
        .into_iter()
        .map(to_y)
        .filter(|y| y.is_finite())
        .min_by(|u, v| (u - predictor).abs().total_cmp(&(v - predictor).abs()))
        .ok_or(Error::NoRealRoot { discriminant: f64::NAN })?;
    Ok(GridPoint::new(x_next, y))
}

/// One step of the Example 4 scheme: `J2 = A J1^(3/2)` with `ξ1 = γ ξ2`.
pub fn step_ex4(prev: [GridPoint; 3], gamma: f64, cfg: &SchemeConfig) -> Result<GridPoint> {
    let Model::Example4 { a } = cfg.model else {
        return Err(Error::InvalidConfig("step_ex4 needs an Example 4 model".into()));
    };
    check_prefix(&prev)?;
    if prev.iter().any(|p| p.x <= 0.0) {
        return Err(Error::NonPositiveAbscissa);
    }
    if prev[1].y == prev[0].y || prev[2].y == prev[1].y {
        return Err(Error::DegenerateStencil("vanishing chord invariant"));
    }
    let alpha = cfg.alpha;
    // Signed power keeps the residual smooth for iterates with J1 < 0; the
    // converged point is checked below.
    let pow = |j: f64| j.signum() * j.abs().powf(1.5);
    let residual = |v: [f64; 2]| {
        if v[0] <= 0.0 {
            return [f64::NAN; 2];
        }
        let s = [prev[0], prev[1], prev[2], GridPoint::new(v[0], v[1])];
        let xi = ex4_xi_raw(&s);
        let (j1, j2) = ex4_j_raw(&s, alpha);
        [(j2 - a * pow(j1)) / (1.0 + j1.abs().powf(1.5)), xi[0] / xi[1] - gamma]
    };
    let [x, y] = newton_2d(residual, step_predictor(&prev), &cfg.root)?;
    ensure_advances(prev[2].x, x)?;
    let s = [prev[0], prev[1], prev[2], GridPoint::new(x, y)];
    let (j1, _) = ex4_j_raw(&s, alpha);
    if j1 < 0.0 {
        return Err(Error::NegativeBase { value: j1 });
    }
    Ok(GridPoint::new(x, y))
}

/// Fractional-linear update solving `R = K` for `y_{n+2}`.
///
/// On `PoleDenominator` the error carries the (huge) quotient so callers can
/// keep going across a pole.
pub fn cross_ratio_step(y: [f64; 3], k: f64) -> Result<f64> {
    let [ym, y0, y1] = y;
    let a = y1 - ym;
    let b = y0 - ym;
    let num = a * y0 - k * b * y1;
    let den = a - k * b;
    let scale = a.abs().max((k * b).abs());
    if !(den.abs() > 1e-14 * scale) {
        return Err(Error::PoleDenominator { value: num / den });
    }
    Ok(num / den)
}

/// One step of the Example 5 scheme on a uniform mesh,
/// `K = 4 (1 - h²/2 F(x_n + h/2))`.
pub fn step_ex5(y: [f64; 3], x_n: f64, h: f64, forcing: Forcing) -> Result<f64> {
    let k = 4.0 * (1.0 - 0.5 * h * h * forcing.eval(x_n + 0.5 * h));
    cross_ratio_step(y, k)
}

/// The `F ≡ 0` scheme `R_y = R_x` on an arbitrary lattice, from three
/// starting ordinates. Exact for `y = 1/(a x + b) + c` on homographic lattices.
pub fn ex5_lattice_run(xs: &[f64], start: [f64; 3]) -> Result<Vec<f64>> {
    if xs.len() < 3 {
        return Err(Error::InvalidConfig("need at least three lattice nodes".into()));
    }
    let mut ys = start.to_vec();
    for n in 1..xs.len() - 2 {
        let k = mesh_cross_ratio([xs[n - 1], xs[n], xs[n + 1], xs[n + 2]]);
        let next = cross_ratio_step([ys[n - 1], ys[n], ys[n + 1]], k).map_err(|e| e.at_node(n + 2, xs[n + 2]))?;
        ys.push(next);
    }
    ys.truncate(xs.len());
    Ok(ys)
}

/// Lattice constant implied by the start-ups, if the example has one.
pub fn startup_lattice(model: &Model, startups: &[GridPoint]) -> Option<f64> {
    match (model, startups) {
        (Model::Example2 { .. }, [a, b, c, ..]) => Some(ex2_gamma(&[*a, *b, *c])),
        (Model::Example3, [a, b, c, ..]) => Some(ex3_gamma([a.x, b.x, c.x])),
        (Model::Example4 { .. }, [a, b, c, ..]) => Some(ex4_gamma(&[*a, *b, *c])),
        _ => None,
    }
}

fn uniform_count(x0: f64, xf: f64, h: f64) -> usize {
    ((xf - x0) / h).round() as usize
}

/// Runs the invariant scheme for `problem` from the given start-ups.
///
/// Termination per example: a fixed number of uniform steps for Examples 1
/// and 5; for Example 2 stepping continues while the middle node of the
/// prefix lies before `x_F` (so the last node may overshoot); for Examples 3
/// and 4 nodes are generated until one passes `x_F` and the overshooting node
/// is dropped.
pub fn run_scheme(problem: &OdeProblem, cfg: &SchemeConfig, startups: &[GridPoint]) -> Result<Trajectory> {
    cfg.validate()?;
    if cfg.model != problem.model {
        return Err(Error::InvalidConfig("scheme and problem models differ".into()));
    }
    let need = problem.order();
    if startups.len() != need {
        return Err(Error::InvalidConfig(format!(
            "example {} needs {need} start-up values, got {}",
            problem.model.number(),
            startups.len()
        )));
    }
    check_prefix_slice(startups)?;
    let mut traj = Trajectory::from_points(startups.iter().copied());
    if problem.xf <= problem.x0 {
        return Ok(traj);
    }
    let slack = 1e-12 * problem.xf.abs().max(1.0);
    let gamma = cfg.lattice.or_else(|| startup_lattice(&cfg.model, startups));
    match cfg.model {
        Model::Example1 { .. } => {
            let x0 = startups[0].x;
            let h = startups[1].x - x0;
            let uniform = cfg.lattice.unwrap_or(1.0) == 1.0;
            let steps = uniform_count(x0, problem.xf, h);
            let mut n = 1;
            loop {
                let last = traj.nodes[n].x;
                if uniform && n >= steps || !uniform && last >= problem.xf - slack {
                    break;
                }
                let mut p = step_ex1([traj.nodes[n - 1], traj.nodes[n]], cfg)
                    .map_err(|e| e.at_node(n + 1, last))?;
                if uniform {
                    p.x = x0 + (n + 1) as f64 * h;
                }
                traj.push(p, NodeFlag::Ok);
                n += 1;
            }
        }
        Model::Example2 { .. } => {
            let gamma = gamma.expect("lattice constant");
            let mut d: Vec<[f64; 2]> = startups.windows(2).map(|w| [w[1].x - w[0].x, w[1].y - w[0].y]).collect();
            let last = startups[2];
            let (mut x, mut y) = (CompensatedSum::new(last.x), CompensatedSum::new(last.y));
            while traj.nodes[traj.len() - 2].x < problem.xf {
                let n = traj.len();
                let inc = step_ex2_increment([d[n - 3], d[n - 2]], gamma, cfg)
                    .map_err(|e| e.at_node(n, traj.nodes[n - 1].x))?;
                d.push(inc);
                traj.push(GridPoint::new(x.add(inc[0]), y.add(inc[1])), NodeFlag::Ok);
            }
        }
        Model::Example3 => {
            let gamma = gamma.expect("lattice constant");
            let mut xs = traj.xs();
            while *xs.last().unwrap() < problem.xf - slack {
                let n = xs.len();
                let next = mesh_ex3([xs[n - 3], xs[n - 2], xs[n - 1]], gamma).map_err(|e| e.at_node(n, xs[n - 1]))?;
                xs.push(next);
            }
            let keep = xs.iter().take_while(|&&x| x <= problem.xf + slack).count();
            xs.truncate(keep.max(3));
            for n in 3..xs.len() {
                let prev = [traj.nodes[n - 3], traj.nodes[n - 2], traj.nodes[n - 1]];
                let p = step_ex3_y(prev, xs[n], cfg).map_err(|e| e.at_node(n, xs[n]))?;
                traj.push(p, NodeFlag::Ok);
            }
        }
        Model::Example4 { .. } => {
            let gamma = gamma.expect("lattice constant");
            while traj.last().unwrap().x < problem.xf - slack {
                let n = traj.len();
                let prev = [traj.nodes[n - 3], traj.nodes[n - 2], traj.nodes[n - 1]];
                let p = step_ex4(prev, gamma, cfg).map_err(|e| e.at_node(n, prev[2].x))?;
                traj.push(p, NodeFlag::Ok);
            }
            let keep = traj.len();
            traj.truncate_after(problem.xf);
            if traj.len() < 3 {
                traj.nodes.truncate(3.min(keep));
            }
        }
        Model::Example5 { forcing } => {
            let x0 = startups[0].x;
            let h = startups[1].x - x0;
            let steps = uniform_count(x0, problem.xf, h);
            for n in 1..steps.saturating_sub(1) {
                let ys = [traj.nodes[n - 1].y, traj.nodes[n].y, traj.nodes[n + 1].y];
                let x_n = x0 + n as f64 * h;
                let x = x0 + (n + 2) as f64 * h;
                match step_ex5(ys, x_n, h, forcing) {
                    Ok(y) => traj.push(GridPoint::new(x, y), NodeFlag::Ok),
                    Err(Error::PoleDenominator { value }) if value.is_finite() => {
                        traj.push(GridPoint::new(x, value), NodeFlag::NearPole)
                    }
                    Err(e) => {
                        traj.push(GridPoint::new(x, f64::NAN), NodeFlag::Diverged);
                        traj.stop = Some(Stop {
                            index: n + 2,
                            x,
                            reason: e.to_string(),
                        });
                        break;
                    }
                }
            }
        }
    }
    traj.flags.truncate(traj.nodes.len());
    Ok(traj)
}

/// Neumaier summation for node coordinates built from increments.
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn new(start: f64) -> Self {
        Self { sum: start, carry: 0.0 }
    }

    fn add(&mut self, v: f64) -> f64 {
        let t = self.sum + v;
        self.carry += if self.sum.abs() >= v.abs() {
            (self.sum - t) + v
        } else {
            (v - t) + self.sum
        };
        self.sum = t;
        self.sum + self.carry
    }
}

fn check_prefix_slice(p: &[GridPoint]) -> Result<()> {
    for w in p.windows(2) {
        check_prefix(&[w[0], w[1]])?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::{apply_group, ex1_xi, ex2_j, ex2_xi, ex3_j, ex4_j, ex5_r, GroupElement};
    use crate::grid::{Stencil3, Stencil4};
    use approx::assert_relative_eq;

    fn ex1_exact(x: f64) -> f64 {
        x / 12.0 + 1.0 / (x * x)
    }

    fn pts<const N: usize>(xs: [f64; N], f: impl Fn(f64) -> f64) -> [GridPoint; N] {
        xs.map(|x| GridPoint::new(x, f(x)))
    }

    /// Residual of the k = 3 uniform scheme written directly in `W = x²y`.
    fn ex1_residual(h: f64) -> f64 {
        let w = [1.0, 1.0 + h, 1.0 + 2.0 * h].map(|x| x * x * ex1_exact(x));
        w[2] - 2.0 * w[1] + w[0] - (0.5f64).sqrt() * h.powf(1.5) * (w[2] - w[0]).sqrt()
    }

    #[test]
    fn ex1_residual_is_fourth_order() {
        let ratio = ex1_residual(0.1) / ex1_residual(0.01);
        assert!((ratio.log10() - 4.0).abs() < 0.3, "{ratio}");
    }

    #[test]
    fn ex1_general_form_matches_specialization() {
        let cfg = SchemeConfig::new(Model::Example1 { k: 3.0 });
        let prev = pts([1.0, 1.1], ex1_exact);
        let next = step_ex1(prev, &cfg).unwrap();
        let s = Stencil3::new([prev[0], prev[1], next]).unwrap();
        let [_, xi2, xi3] = ex1_xi(&s, 3.0).unwrap();
        assert!((xi2 - xi3 - (0.5 * (xi2 + xi3)).sqrt()).abs() < 1e-9);
        assert!((next.y - ex1_exact(1.2)).abs() < 1e-4);
    }

    #[test]
    fn ex1_steady_state() {
        // y = b/x² makes both sides vanish.
        let cfg = SchemeConfig::new(Model::Example1 { k: 3.0 });
        let next = step_ex1(pts([1.0, 1.5], |x| 2.0 / (x * x)), &cfg).unwrap();
        assert_relative_eq!(next.y, 2.0 / 4.0, max_relative = 1e-12);
    }

    #[test]
    fn ex2_collinear_prefix_continues_collinear() {
        let cfg = SchemeConfig::new(Model::Example2 { k: 1.0 });
        let prev = pts([0.0, 1.0, 2.0], |x| 0.5 * x + 3.0);
        let next = step_ex2(prev, 1.0, &cfg).unwrap();
        assert_relative_eq!(next.x, 3.0, max_relative = 1e-12);
        assert_relative_eq!(next.y, 4.5, max_relative = 1e-12);
    }

    #[test]
    fn ex2_step_satisfies_both_equations() {
        let cfg = SchemeConfig::new(Model::Example2 { k: 1.0 });
        let prev = pts([0.0, 0.1, 0.2], |x| -10.0 * x + 0.5 * x * x);
        let gamma = ex2_gamma(&prev);
        let next = step_ex2(prev, gamma, &cfg).unwrap();
        let s = Stencil4::new([prev[0], prev[1], prev[2], next]).unwrap();
        let (j1, j2) = ex2_j(&s, 0.5).unwrap();
        let xi = ex2_xi(&s);
        assert!((j2 - j1 * j1).abs() < 1e-8 * j1 * j1 + 1e-12);
        assert_relative_eq!(xi[0] / xi[1], gamma, max_relative = 1e-12);
    }

    #[test]
    fn mesh_ex3_examples() {
        assert_relative_eq!(mesh_ex3([0.0, 1.0, 2.0], 3.0).unwrap(), 19.0 / 7.0, max_relative = 1e-14);
        let h = 1e-3;
        let g = ex3_gamma([0.0, h, 2.0 * h]);
        // ξ5 x_{n+1} = 1: x = (0, 1, 2) with γ = 2/3 gives ξ5 = 1/2.
        assert!(matches!(mesh_ex3([0.0, 1.0, 2.0], 2.0 / 3.0), Err(Error::ChartPole)));
        // A uniform start lands 2h³ past 3h.
        assert!((mesh_ex3([0.0, h, 2.0 * h], g).unwrap() - 3.0 * h - 2.0 * h.powi(3)).abs() < 1e-12);
    }

    #[test]
    fn ex3_linear_prefix_continues_linear() {
        let cfg = SchemeConfig::new(Model::Example3);
        let prev = pts([0.0, 0.1, 0.2], |x| 1.0 + 2.0 * x);
        let next = step_ex3_y(prev, 0.3, &cfg).unwrap();
        assert_relative_eq!(next.y, 1.6, max_relative = 1e-12);
    }

    #[test]
    fn ex3_step_solves_the_scheme() {
        let cfg = SchemeConfig::new(Model::Example3);
        let prev = pts([0.0, 0.1, 0.2], |x| 0.3 * x * x);
        let next = step_ex3_y(prev, 0.31, &cfg).unwrap();
        let s = Stencil4::new([prev[0], prev[1], prev[2], next]).unwrap();
        let (j1, j2) = ex3_j(&s, 0.5).unwrap();
        assert!((j2 - j1 * j1).abs() < 1e-9);
    }

    #[test]
    fn ex4_step_solves_the_scheme() {
        let cfg = SchemeConfig::new(Model::Example4 { a: -1.0 });
        let f = |x: f64| 0.1 * (x - 1.0) + 0.05 * (x - 1.0).powi(2);
        let prev = pts([1.0, 1.02, 1.04], f);
        let gamma = ex4_gamma(&prev);
        let next = step_ex4(prev, gamma, &cfg).unwrap();
        let s = Stencil4::new([prev[0], prev[1], prev[2], next]).unwrap();
        let (j1, j2) = ex4_j(&s, 0.5).unwrap();
        assert!(j1 > 0.0);
        assert!((j2 + j1.powf(1.5)).abs() < 1e-9 * j1.powf(1.5));
        let flat = pts([1.0, 1.1, 1.2], |_| 2.0);
        assert!(matches!(step_ex4(flat, 1.0, &cfg), Err(Error::DegenerateStencil(_))));
    }

    #[test]
    fn ex5_step_examples() {
        assert_eq!(step_ex5([0.0, 1.0, 2.0], 0.0, 0.1, Forcing::Zero).unwrap(), 3.0);
        let y = step_ex5([-0.4, -2.0 / 3.0, -2.0], 0.0, 0.1, Forcing::Zero).unwrap();
        assert_relative_eq!(y, 2.0, max_relative = 1e-14);
        assert_relative_eq!(ex5_r([-0.4, -2.0 / 3.0, -2.0, y]).unwrap(), 4.0, max_relative = 1e-13);
    }

    #[test]
    fn ex5_is_exact_on_homographic_data() {
        let n = 40;
        let xs: Vec<f64> = (0..n).map(|i| 1.0 / (0.3 * i as f64 + 1.0) + 0.1).collect();
        let f = |x: f64| 1.0 / (2.0 * x + 1.0) - 0.5;
        let ys = ex5_lattice_run(&xs, [f(xs[0]), f(xs[1]), f(xs[2])]).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert!((y - f(*x)).abs() <= 1e-10 * (1.0 + f(*x).abs()), "{x} {y}");
        }
    }

    #[test]
    fn zero_length_interval_returns_startups() {
        let p = OdeProblem::example5().with_interval(0.0, 0.0).unwrap();
        let s = pts([0.0, 0.1, 0.2], |x| x);
        let t = run_scheme(&p, &SchemeConfig::new(p.model), &s).unwrap();
        assert_eq!(t.nodes, s.to_vec());
    }

    #[test]
    fn ex2_mesh_follows_the_solution() {
        let p = OdeProblem::example2();
        let s = crate::reference::startup_values(&p, &[0.0, 1.0, 2.0]).unwrap();
        let t = run_scheme(&p, &SchemeConfig::new(p.model), &s).unwrap();
        let xs = t.xs();
        let ratios: Vec<f64> = xs.windows(3).map(|w| (w[2] - w[1]) / (w[1] - w[0])).collect();
        let spread = ratios.iter().fold(0.0f64, |m, r| m.max((r - 1.0).abs()));
        assert!(spread > 1e-3, "{spread}");
        assert_eq!(t.len(), 14);
    }

    fn close(a: GridPoint, b: GridPoint, tol: f64) -> bool {
        (a.x - b.x).abs() <= tol * (1.0 + a.x.abs()) && (a.y - b.y).abs() <= tol * (1.0 + a.y.abs())
    }

    #[test]
    fn ex1_stepper_is_equivariant() {
        let cfg = SchemeConfig::new(Model::Example1 { k: 3.0 });
        let prev = pts([1.3, 1.4], ex1_exact);
        let next = step_ex1(prev, &cfg).unwrap();
        for g in [GroupElement::Ex1Flow { t: 0.37 }, GroupElement::Ex1Scale { lambda: 1.7, k: 3.0 }] {
            let moved = apply_group(&g, &crate::grid::Stencil::new(prev).unwrap()).unwrap();
            let stepped = step_ex1(*moved.points(), &cfg).unwrap();
            let mapped = g.apply_point(next).unwrap();
            assert!(close(stepped, mapped, 1e-11), "{g:?}: {stepped:?} vs {mapped:?}");
        }
    }

    #[test]
    fn ex2_stepper_is_equivariant() {
        let cfg = SchemeConfig::new(Model::Example2 { k: 1.0 });
        let prev = pts([0.0, 0.2, 0.4], |x| x.sin());
        let gamma = ex2_gamma(&prev);
        let next = step_ex2(prev, gamma, &cfg).unwrap();
        for g in [
            GroupElement::Translate { a: 1.5, b: -0.7 },
            GroupElement::Rotate { theta: 0.3 },
            GroupElement::Dilate { lambda: 2.0 },
        ] {
            let moved = apply_group(&g, &Stencil3::new(prev).unwrap()).unwrap();
            let stepped = step_ex2(*moved.points(), ex2_gamma(moved.points()), &cfg).unwrap();
            let mapped = g.apply_point(next).unwrap();
            assert!(close(stepped, mapped, 1e-11), "{g:?}: {stepped:?} vs {mapped:?}");
        }
    }
}
