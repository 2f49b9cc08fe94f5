//! Difference invariants of each example's symmetry group, the differential
//! invariants they approximate, and exact finite group actions.
//!
//! The `*_raw` evaluators take unchecked node arrays and may return
//! non-finite values. Steppers use them inside root finders, where iterates
//! are allowed to wander; the checked variants validate their input first.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridPoint, Stencil, Stencil3, Stencil4};

/// Relative size below which an invariant's denominator counts as zero.
pub const DEGENERACY: f64 = 1e-14;

fn guarded(num: f64, den: f64, scale: f64, what: &'static str) -> Result<f64> {
    if !(den.abs() > DEGENERACY * scale) {
        return Err(Error::DegenerateStencil(what));
    }
    Ok(num / den)
}

/// A prolonged point `(x, y, y', y'', y''')`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JetPoint {
    pub x: f64,
    pub y: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

/// Which example's invariants to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Example2,
    Example3,
    Example4,
    Example5,
}

// Example 1

pub(crate) fn ex1_xi_raw(p: &[GridPoint; 3], k: f64) -> [f64; 3] {
    let w = p.map(|q| q.x * q.x * q.y);
    let (hn, hn1) = (p[1].x - p[0].x, p[2].x - p[1].x);
    [hn1 / hn, (w[2] - w[1]) / hn1.powf(k), (w[1] - w[0]) / hn.powf(k)]
}

/// `(h_{n+1}/h_n, Δ(x²y)/h_{n+1}^k, Δ(x²y)/h_n^k)` on `(x_{n-1}, x_n, x_{n+1})`.
pub fn ex1_xi(s: &Stencil3, k: f64) -> Result<[f64; 3]> {
    if [0.0, 0.5, 1.0, 2.0].contains(&k) {
        return Err(Error::InvalidConfig(format!("k = {k} is excluded")));
    }
    if s.xs().contains(&0.0) {
        return Err(Error::DomainError("x = 0 on the stencil"));
    }
    Ok(ex1_xi_raw(s.points(), k))
}

// Example 2

fn ex2_xi_raw(p: &[GridPoint; 4]) -> [f64; 5] {
    ex2_xi_inc([0, 1, 2].map(|i| [p[i + 1].x - p[i].x, p[i + 1].y - p[i].y]))
}

/// Same as [`ex2_xi_raw`] from the increments `(h, Δy)`, oldest first.
pub(crate) fn ex2_xi_inc(d: [[f64; 2]; 3]) -> [f64; 5] {
    let [[hn, dn], [hn1, dn1], [hn2, dn2]] = d;
    [
        hn2.hypot(dn2),
        hn1.hypot(dn1),
        hn.hypot(dn),
        dn2 * hn1 - dn1 * hn2,
        dn1 * hn - dn * hn1,
    ]
}

/// Chord lengths `ξ1..ξ3` (newest first) and chord cross products `ξ4, ξ5`.
pub fn ex2_xi(s: &Stencil4) -> [f64; 5] {
    ex2_xi_raw(s.points())
}

pub(crate) fn ex2_j_from_xi(xi: [f64; 5], alpha: f64) -> (f64, f64) {
    let [c1, c2, c3, x4, x5] = xi;
    let a = x4 / (c1 * c2 * (c1 + c2));
    let b = x5 / (c2 * c3 * (c2 + c3));
    (2.0 * (alpha * a + (1.0 - alpha) * b), 6.0 / (c1 + c2 + c3) * (a - b))
}

/// `(J1, J2)`: curvature and its arc-length derivative, to first order.
pub fn ex2_j(s: &Stencil4, alpha: f64) -> Result<(f64, f64)> {
    let [c1, c2, c3, x4, x5] = ex2_xi(s);
    let scale = c1.max(c2).max(c3);
    let a = guarded(x4, c1 * c2 * (c1 + c2), scale.powi(3), "vanishing chord")?;
    let b = guarded(x5, c2 * c3 * (c2 + c3), scale.powi(3), "vanishing chord")?;
    Ok((2.0 * (alpha * a + (1.0 - alpha) * b), 6.0 / (c1 + c2 + c3) * (a - b)))
}

// Example 3

fn chart_step(a: f64, b: f64) -> Result<f64> {
    let den = 1.0 + a * b;
    if den.abs() <= DEGENERACY * (1.0 + (a * b).abs()) {
        return Err(Error::PoleOfChart);
    }
    Ok((b - a) / den)
}

pub(crate) fn ex3_xi_raw(p: &[GridPoint; 4]) -> [f64; 5] {
    let slope = |i: usize| (p[i + 1].y - p[i].y) / (p[i + 1].x - p[i].x);
    let t = |a: f64, b: f64| (b - a) / (1.0 + a * b);
    [
        (1.0 + p[1].x * p[1].x).sqrt() * (slope(1) - slope(0)),
        (1.0 + p[2].x * p[2].x).sqrt() * (slope(2) - slope(1)),
        t(p[0].x, p[1].x),
        t(p[1].x, p[2].x),
        t(p[2].x, p[3].x),
    ]
}

/// Weighted slope jumps `ξ1, ξ2` and chart steps `tan(Δ arctan x)` as `ξ3..ξ5`.
pub fn ex3_xi(s: &Stencil4) -> Result<[f64; 5]> {
    let xs = s.xs();
    for w in xs.windows(2) {
        chart_step(w[0], w[1])?;
    }
    Ok(ex3_xi_raw(s.points()))
}

pub fn ex3_j(s: &Stencil4, alpha: f64) -> Result<(f64, f64)> {
    let [x1, x2, x3, x4, x5] = ex3_xi(s)?;
    let scale = x3.abs().max(x4.abs()).max(x5.abs());
    let a = guarded(x1, x3 + x4, scale, "chart steps cancel")?;
    let b = guarded(x2, x4 + x5, scale, "chart steps cancel")?;
    let c = guarded(6.0, x3 + x4 + x5, scale, "chart steps cancel")?;
    Ok((2.0 * (alpha * a + (1.0 - alpha) * b), c * (b - a)))
}

// Example 4

pub(crate) fn ex4_xi_raw(p: &[GridPoint; 4]) -> [f64; 5] {
    let d = |i: usize, j: usize| (p[j].y - p[i].y) / (p[i].x * p[j].x).sqrt();
    [d(2, 3), d(1, 2), d(0, 1), d(1, 3), d(0, 2)]
}

/// Ordinate differences normalized by `sqrt(x_i x_j)`.
pub fn ex4_xi(s: &Stencil4) -> Result<[f64; 5]> {
    if s.xs().iter().any(|&x| x <= 0.0) {
        return Err(Error::NonPositiveAbscissa);
    }
    Ok(ex4_xi_raw(s.points()))
}

fn ex4_j_parts(xi: [f64; 5], alpha: f64) -> (f64, f64, f64) {
    let [a1, a2, a3, a4, a5] = xi;
    let (u, v) = (a4 - a1 - a2, a5 - a2 - a3);
    let den = a1 * a2 * a3 * (a1 + a2) * (a2 + a3) * (a1 + a2 + a3);
    let j2 = 12.0 * (u * (a2 + a3) * a3 - v * a1 * (a1 + a2)) / den;
    let j1 = 8.0 * (alpha * u / (a1 * a2 * (a1 + a2)) + (1.0 - alpha) * v / (a2 * a3 * (a2 + a3)));
    (j1, j2, den)
}

pub(crate) fn ex4_j_raw(p: &[GridPoint; 4], alpha: f64) -> (f64, f64) {
    let (j1, j2, _) = ex4_j_parts(ex4_xi_raw(p), alpha);
    (j1, j2)
}

pub fn ex4_j(s: &Stencil4, alpha: f64) -> Result<(f64, f64)> {
    let xi = ex4_xi(s)?;
    let scale = xi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let (j1, j2, den) = ex4_j_parts(xi, alpha);
    if !(den.abs() > DEGENERACY * scale.powi(6)) || scale == 0.0 {
        return Err(Error::DegenerateStencil("vanishing chord invariant"));
    }
    Ok((j1, j2))
}

// Example 5

/// Anharmonic ratio of four ordinates.
pub fn ex5_r(y: [f64; 4]) -> Result<f64> {
    let (a, b) = (y[3] - y[2], y[1] - y[0]);
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(a.abs() > DEGENERACY * scale) || !(b.abs() > DEGENERACY * scale) {
        return Err(Error::DegenerateOrdinates);
    }
    Ok((y[3] - y[1]) * (y[2] - y[0]) / (a * b))
}

/// Mesh-weighted deviation of the ordinate cross ratio from the abscissa
/// cross ratio; approximates the Schwarzian derivative.
pub fn ex5_j1(s: &Stencil4) -> Result<f64> {
    let r = ex5_r(s.ys())?;
    let [hn, hn1, hn2] = [s.step(0), s.step(1), s.step(2)];
    let w = 6.0 * hn2 * hn / (hn1 * (hn1 + hn2) * (hn + hn1) * (hn + hn1 + hn2));
    Ok(w * (mesh_cross_ratio(s.xs()) - r))
}

/// Cross ratio of four abscissas (the mesh counterpart of `R`).
pub fn mesh_cross_ratio(x: [f64; 4]) -> f64 {
    (x[3] - x[1]) * (x[2] - x[0]) / ((x[3] - x[2]) * (x[1] - x[0]))
}

/// Differential invariants `(I1, I2)` of each family.
pub fn diff_invariants(family: Family, p: JetPoint) -> Result<(f64, f64)> {
    let JetPoint { x, d1, d2, d3, .. } = p;
    if ![x, p.y, d1, d2, d3].iter().all(|v| v.is_finite()) {
        return Err(Error::DomainError("non-finite jet"));
    }
    Ok(match family {
        Family::Example2 => {
            let s = 1.0 + d1 * d1;
            (d2 / s.powf(1.5), (s * d3 - 3.0 * d1 * d2 * d2) / s.powi(3))
        }
        Family::Example3 => {
            let s = 1.0 + x * x;
            (s.powf(1.5) * d2, (s * d3 + 3.0 * x * d2) * s.powf(1.5))
        }
        Family::Example4 => {
            if d1 == 0.0 {
                return Err(Error::DomainError("y' = 0"));
            }
            (
                (2.0 * x * d2 + d1) / d1.powi(3),
                x * x * (d1 * d3 - 3.0 * d2 * d2) / d1.powi(5),
            )
        }
        Family::Example5 => {
            if d1 == 0.0 {
                return Err(Error::DomainError("y' = 0"));
            }
            ((d1 * d3 - 1.5 * d2 * d2) / (d1 * d1), x)
        }
    })
}

/// A finite transformation from one of the examples' symmetry groups.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GroupElement {
    /// `(x + t, y x² / (x + t)²)`.
    Ex1Flow { t: f64 },
    /// `(x, y + eps / x²)`.
    Ex1Shift { eps: f64 },
    /// `(λ x, λ^(k-2) y)`.
    Ex1Scale { lambda: f64, k: f64 },
    Translate { a: f64, b: f64 },
    /// `(x cos t + y sin t, -x sin t + y cos t)`.
    Rotate { theta: f64 },
    Dilate { lambda: f64 },
    /// `(x, y + a + b x)`.
    Ex3Shear { a: f64, b: f64 },
    /// `(tan(arctan x + t), y sqrt((1 + x̃²)/(1 + x²)))`.
    Ex3TanFlow { t: f64 },
    /// `(x, y + c)`.
    ShiftY { c: f64 },
    /// `(x / (1 - t y)², y / (1 - t y))`.
    Ex4Projective { t: f64 },
    /// `(x, (a y + b) / (c y + d))`.
    Mobius { a: f64, b: f64, c: f64, d: f64 },
}

impl GroupElement {
    /// Image of a single point.
    pub fn apply_point(&self, p: GridPoint) -> Result<GridPoint> {
        let GridPoint { x, y } = p;
        let q = match *self {
            GroupElement::Ex1Flow { t } => {
                if x + t == 0.0 {
                    return Err(Error::UndefinedAction("x + t = 0"));
                }
                GridPoint::new(x + t, y * x * x / ((x + t) * (x + t)))
            }
            GroupElement::Ex1Shift { eps } => {
                if x == 0.0 {
                    return Err(Error::UndefinedAction("x = 0"));
                }
                GridPoint::new(x, y + eps / (x * x))
            }
            GroupElement::Ex1Scale { lambda, k } => GridPoint::new(lambda * x, lambda.powf(k - 2.0) * y),
            GroupElement::Translate { a, b } => GridPoint::new(x + a, y + b),
            GroupElement::Rotate { theta } => {
                let (s, c) = theta.sin_cos();
                GridPoint::new(x * c + y * s, -x * s + y * c)
            }
            GroupElement::Dilate { lambda } => GridPoint::new(lambda * x, lambda * y),
            GroupElement::Ex3Shear { a, b } => GridPoint::new(x, y + a + b * x),
            GroupElement::Ex3TanFlow { t } => {
                let angle = x.atan() + t;
                if angle.abs() >= std::f64::consts::FRAC_PI_2 {
                    return Err(Error::UndefinedAction("flow leaves the chart"));
                }
                let xt = angle.tan();
                GridPoint::new(xt, y * ((1.0 + xt * xt) / (1.0 + x * x)).sqrt())
            }
            GroupElement::ShiftY { c } => GridPoint::new(x, y + c),
            GroupElement::Ex4Projective { t } => {
                let den = 1.0 - t * y;
                if den == 0.0 {
                    return Err(Error::UndefinedAction("1 - t y = 0"));
                }
                GridPoint::new(x / (den * den), y / den)
            }
            GroupElement::Mobius { a, b, c, d } => {
                if a * d - b * c == 0.0 {
                    return Err(Error::UndefinedAction("singular Mobius map"));
                }
                let den = c * y + d;
                if den == 0.0 {
                    return Err(Error::UndefinedAction("point mapped to infinity"));
                }
                GridPoint::new(x, (a * y + b) / den)
            }
        };
        if !(q.x.is_finite() && q.y.is_finite()) {
            return Err(Error::UndefinedAction("non-finite image"));
        }
        Ok(q)
    }
}

/// Pointwise image of a stencil. Fails if the image abscissas stop increasing.
pub fn apply_group<const N: usize>(g: &GroupElement, s: &Stencil<N>) -> Result<Stencil<N>> {
    let mut out = *s.points();
    for p in out.iter_mut() {
        *p = g.apply_point(*p)?;
    }
    let scale = out.iter().fold(0.0f64, |m, p| m.max(p.x.abs()).max(p.y.abs()));
    if out.windows(2).any(|w| !(w[1].x - w[0].x > DEGENERACY * scale)) {
        return Err(Error::UndefinedAction("image mesh not increasing"));
    }
    Stencil::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn st4(xs: [f64; 4], ys: [f64; 4]) -> Stencil4 {
        Stencil4::from_xy(xs, ys).unwrap()
    }

    #[test]
    fn ex1_uniform_and_exact_solution() {
        let f = |x: f64| x / 12.0 + 1.0 / (x * x);
        let xs = [1.0, 1.1, 1.2];
        let s = Stencil3::from_xy(xs, xs.map(f)).unwrap();
        let xi = ex1_xi(&s, 3.0).unwrap();
        assert_relative_eq!(xi[0], 1.0, max_relative = 1e-12);
        // x²y = x³/12 + 1, so the difference is (1.2³ - 1.1³)/12 exactly.
        let expected = (1.2f64.powi(3) - 1.1f64.powi(3)) / 12.0 / 0.1f64.powi(3);
        assert_relative_eq!(xi[1], expected, max_relative = 1e-11);
        assert!(matches!(
            Stencil3::from_xy([1.0, 1.0, 1.2], [0.0; 3]),
            Err(Error::DegenerateStencil(_))
        ));
    }

    #[test]
    fn ex2_examples() {
        let line = st4([0.0, 1.0, 2.0, 3.0], [0.0, 2.0, 4.0, 6.0]);
        let xi = ex2_xi(&line);
        assert_eq!((xi[3], xi[4]), (0.0, 0.0));
        assert_eq!(ex2_j(&line, 0.5).unwrap(), (0.0, 0.0));
        let diag = ex2_xi(&st4([0.0, 1.0, 2.0, 3.0], [0.0, 1.0, 2.0, 3.0]));
        for c in &diag[..3] {
            assert_relative_eq!(*c, 2f64.sqrt());
        }
        let para = ex2_xi(&st4([0.0, 1.0, 2.0, 3.0], [0.0, 1.0, 4.0, 9.0]));
        assert_eq!(para[3], 2.0);
    }

    #[test]
    fn ex2_parabola_limit() {
        let h = 1e-3;
        let xs = [-h, 0.0, h, 2.0 * h];
        let (j1, j2) = ex2_j(&st4(xs, xs.map(|x| x * x / 2.0)), 0.5).unwrap();
        assert!((j1 - 1.0).abs() < 5e-3, "{j1}");
        assert!(j2.abs() < 5e-3, "{j2}");
    }

    #[test]
    fn ex3_examples() {
        let xi = ex3_xi(&st4([0.0, 1.0, 2.0, 3.0], [5.0; 4])).unwrap();
        assert_eq!(xi[3], 1.0 / 3.0);
        assert_eq!(xi[2], 1.0);
        assert_eq!((xi[0], xi[1]), (0.0, 0.0));
        let pole = st4([-3.0, -2.0, 0.5, 1.0], [0.0; 4]);
        assert!(matches!(ex3_xi(&pole), Err(Error::PoleOfChart)));
        let line = st4([0.0, 0.1, 0.3, 0.4], [1.0, 1.2, 1.6, 1.8]);
        let (j1, j2) = ex3_j(&line, 0.5).unwrap();
        assert!(j1.abs() < 1e-12 && j2.abs() < 1e-9);
    }

    #[test]
    fn ex3_cubic_limit() {
        let h = 1e-3;
        let xs = [-h, 0.0, h, 2.0 * h];
        let (_, j2) = ex3_j(&st4(xs, xs.map(|x| x.powi(3) / 6.0)), 0.5).unwrap();
        assert!((j2 - 1.0).abs() < 5e-3, "{j2}");
    }

    #[test]
    fn ex4_examples() {
        let xi = ex4_xi(&st4([1.0, 2.0, 4.0, 8.0], [0.0, 1.0, 2.0, 3.0])).unwrap();
        assert_relative_eq!(xi[1], 1.0 / 8f64.sqrt());
        assert_relative_eq!(xi[2], 1.0 / 2f64.sqrt());
        let flat = st4([1.0, 2.0, 4.0, 8.0], [3.0; 4]);
        assert_eq!(ex4_xi(&flat).unwrap(), [0.0; 5]);
        assert!(matches!(ex4_j(&flat, 0.5), Err(Error::DegenerateStencil(_))));
        assert!(matches!(
            ex4_xi(&st4([-1.0, 2.0, 4.0, 8.0], [0.0; 4])),
            Err(Error::NonPositiveAbscissa)
        ));
        let h = 1e-3;
        let xs = [1.0 - h, 1.0, 1.0 + h, 1.0 + 2.0 * h];
        let (j1, j2) = ex4_j(&st4(xs, xs), 0.5).unwrap();
        assert!((j1 - 1.0).abs() < 5e-3, "{j1}");
        assert!(j2.abs() < 5e-3, "{j2}");
    }

    #[test]
    fn ex5_cross_ratio_examples() {
        assert_eq!(ex5_r([1.0, 2.0, 3.0, 4.0]).unwrap(), 4.0);
        let hom = [0.0, 1.0, 2.0, 3.0].map(|n: f64| 1.0 / (n - 2.5));
        assert_relative_eq!(ex5_r(hom).unwrap(), 4.0, max_relative = 1e-14);
        assert!(matches!(ex5_r([0.0, 0.0, 1.0, 2.0]), Err(Error::DegenerateOrdinates)));
        let g = GroupElement::Mobius { a: 0.0, b: 1.0, c: 1.0, d: 1.0 };
        let s = st4([0.0, 1.0, 2.0, 3.0], [1.0, 2.0, 3.0, 4.0]);
        let image = apply_group(&g, &s).unwrap();
        assert_relative_eq!(ex5_r(image.ys()).unwrap(), 4.0, max_relative = 1e-14);
    }

    #[test]
    fn differential_invariant_examples() {
        let jet = |x, d1, d2, d3| JetPoint { x, y: 0.0, d1, d2, d3 };
        assert_eq!(diff_invariants(Family::Example2, jet(0.0, 0.0, 1.0, 0.0)).unwrap(), (1.0, 0.0));
        assert_eq!(diff_invariants(Family::Example5, jet(0.0, 1.0, 0.0, 2.0)).unwrap().0, 2.0);
        assert_eq!(diff_invariants(Family::Example4, jet(1.0, 1.0, 1.0, 3.0)).unwrap().1, 0.0);
        assert!(diff_invariants(Family::Example4, jet(1.0, 0.0, 1.0, 3.0)).is_err());
    }

    #[test]
    fn rotation_with_non_monotone_image_is_undefined() {
        let g = GroupElement::Rotate { theta: std::f64::consts::FRAC_PI_2 };
        let p = g.apply_point(GridPoint::new(1.0, 0.0)).unwrap();
        assert!(p.x.abs() < 1e-15 && (p.y + 1.0).abs() < 1e-15);
        let s = Stencil::<2>::from_xy([0.0, 1.0], [0.0, 0.0]).unwrap();
        assert!(matches!(apply_group(&g, &s), Err(Error::UndefinedAction(_))));
        let id = GroupElement::Ex1Flow { t: 0.0 };
        let s3 = Stencil3::from_xy([1.0, 2.0, 3.0], [0.3, 0.2, 0.1]).unwrap();
        let image = apply_group(&id, &s3).unwrap();
        assert_eq!(image.xs(), s3.xs());
        for (u, v) in image.ys().iter().zip(s3.ys()) {
            assert_relative_eq!(*u, v, max_relative = 1e-15);
        }
    }

    /// Central difference of the flow at `t = 0` against the generator.
    fn generator_matches(flow: impl Fn(f64) -> GroupElement, field: impl Fn(f64, f64) -> (f64, f64)) {
        let dt = 1e-6;
        for &(x, y) in &[(0.7, 0.3), (1.3, -0.4), (2.1, 0.05)] {
            let p = GridPoint::new(x, y);
            let fwd = flow(dt).apply_point(p).unwrap();
            let bwd = flow(-dt).apply_point(p).unwrap();
            let (vx, vy) = field(x, y);
            assert!(((fwd.x - bwd.x) / (2.0 * dt) - vx).abs() < 1e-6);
            assert!(((fwd.y - bwd.y) / (2.0 * dt) - vy).abs() < 1e-6);
        }
    }

    #[test]
    fn flows_are_generated_by_the_vector_fields() {
        let k = 3.0;
        generator_matches(|t| GroupElement::Ex1Flow { t }, |x, y| (1.0, -2.0 * y / x));
        generator_matches(|t| GroupElement::Ex1Shift { eps: t }, |x, _| (0.0, 1.0 / (x * x)));
        generator_matches(
            |t| GroupElement::Ex1Scale { lambda: t.exp(), k },
            |x, y| (x, (k - 2.0) * y),
        );
        generator_matches(|t| GroupElement::Rotate { theta: t }, |x, y| (y, -x));
        generator_matches(|t| GroupElement::Dilate { lambda: t.exp() }, |x, y| (x, y));
        generator_matches(|t| GroupElement::Ex3TanFlow { t }, |x, y| (1.0 + x * x, x * y));
        generator_matches(|t| GroupElement::Ex3Shear { a: 0.0, b: t }, |x, _| (0.0, x));
        generator_matches(|t| GroupElement::Ex4Projective { t }, |x, y| (2.0 * x * y, y * y));
        generator_matches(
            |t| GroupElement::Mobius { a: 1.0, b: 0.0, c: -t, d: 1.0 },
            |_, y| (0.0, y * y),
        );
    }

    #[test]
    fn ex2_scaling_covariance() {
        let s = st4([0.0, 0.4, 0.9, 1.2], [0.1, 0.5, 0.4, 0.8]);
        let lambda = 2.5;
        let t = apply_group(&GroupElement::Dilate { lambda }, &s).unwrap();
        let (a, b) = (ex2_xi(&s), ex2_xi(&t));
        for i in 0..3 {
            assert_relative_eq!(b[i], lambda * a[i], max_relative = 1e-13);
        }
        for i in 3..5 {
            assert_relative_eq!(b[i], lambda * lambda * a[i], max_relative = 1e-13);
        }
        let (j1, j2) = ex2_j(&s, 0.5).unwrap();
        let (k1, k2) = ex2_j(&t, 0.5).unwrap();
        assert_relative_eq!(k1, j1 / lambda, max_relative = 1e-12);
        assert_relative_eq!(k2, j2 / (lambda * lambda), max_relative = 1e-12);
        let res = |(p, q): (f64, f64)| q - p * p;
        assert_relative_eq!(res((k1, k2)), res((j1, j2)) / (lambda * lambda), max_relative = 1e-11);
    }

    /// Order of `|J - I|` between `h = 1e-2` and `1e-3` on steps `(h, 1.3h, 0.7h)`.
    fn limit_order(err: impl Fn(f64) -> f64) -> f64 {
        (err(1e-2) / err(1e-3)).log10()
    }

    fn skewed(x: f64, h: f64) -> [f64; 4] {
        [x - h, x, x + 1.3 * h, x + 2.0 * h]
    }

    #[test]
    fn continuous_limits_are_first_order() {
        let x = 0.4;
        let (f, f1, f2, f3) = (
            |x: f64| x.sin() + 0.3 * x * x,
            |x: f64| x.cos() + 0.6 * x,
            |x: f64| -x.sin() + 0.6,
            |x: f64| -x.cos(),
        );
        let jet = JetPoint { x, y: f(x), d1: f1(x), d2: f2(x), d3: f3(x) };
        type Pair = fn(&Stencil4) -> Result<(f64, f64)>;
        let cases: [(Family, Pair); 3] = [
            (Family::Example2, |s| ex2_j(s, 0.5)),
            (Family::Example3, |s| ex3_j(s, 0.5)),
            (Family::Example4, |s| ex4_j(s, 0.5)),
        ];
        for (family, j) in cases {
            let (i1, i2) = diff_invariants(family, jet).unwrap();
            for (idx, exact) in [(0, i1), (1, i2)] {
                let p = limit_order(|h| {
                    let xs = skewed(x, h);
                    let v = j(&st4(xs, xs.map(f))).unwrap();
                    ((if idx == 0 { v.0 } else { v.1 }) - exact).abs()
                });
                assert!(p >= 0.8, "{family:?} J{}: order {p}", idx + 1);
            }
        }
        let (s1, _) = diff_invariants(Family::Example5, jet).unwrap();
        let p = limit_order(|h| {
            let xs = skewed(x, h);
            (ex5_j1(&st4(xs, xs.map(f))).unwrap() - s1).abs()
        });
        assert!(p >= 0.8, "Example5: order {p}");
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.iter().zip(b).all(|(u, v)| (u - v).abs() <= 1e-10 * u.abs().max(v.abs()).max(1.0))
    }

    fn increasing4() -> impl Strategy<Value = ([f64; 4], [f64; 4])> {
        (0.5f64..2.0, prop::array::uniform3(0.05f64..0.3), prop::array::uniform4(-1.0f64..1.0)).prop_map(
            |(x0, h, y)| ([x0, x0 + h[0], x0 + h[0] + h[1], x0 + h[0] + h[1] + h[2]], y),
        )
    }

    proptest! {
        #[test]
        fn ex1_invariance((xs, ys) in increasing4(), t in -0.4f64..0.4, eps in -1.0f64..1.0, lambda in 0.5f64..2.0) {
            let s = Stencil3::from_xy([xs[0], xs[1], xs[2]], [ys[0], ys[1], ys[2]]).unwrap();
            let base = ex1_xi(&s, 3.0).unwrap();
            for g in [
                GroupElement::Ex1Flow { t },
                GroupElement::Ex1Shift { eps },
                GroupElement::Ex1Scale { lambda, k: 3.0 },
            ] {
                let image = apply_group(&g, &s).unwrap();
                prop_assert!(close(&base, &ex1_xi(&image, 3.0).unwrap()), "{g:?}");
            }
        }

        #[test]
        fn ex2_invariance((xs, ys) in increasing4(), a in -2.0f64..2.0, b in -2.0f64..2.0, theta in -0.1f64..0.1) {
            let s = st4(xs, ys.map(|y| 0.3 * y));
            let base = ex2_xi(&s);
            for g in [GroupElement::Translate { a, b }, GroupElement::Rotate { theta }] {
                if let Ok(image) = apply_group(&g, &s) {
                    prop_assert!(close(&base, &ex2_xi(&image)), "{g:?}");
                }
            }
        }

        #[test]
        fn ex3_invariance((xs, ys) in increasing4(), a in -2.0f64..2.0, b in -2.0f64..2.0, t in -0.3f64..0.3) {
            let s = st4(xs, ys);
            let base = ex3_xi(&s).unwrap();
            for g in [GroupElement::Ex3Shear { a, b }, GroupElement::Ex3TanFlow { t }] {
                let image = apply_group(&g, &s).unwrap();
                prop_assert!(close(&base, &ex3_xi(&image).unwrap()), "{g:?}");
            }
        }

        #[test]
        fn ex4_invariance((xs, ys) in increasing4(), c in -2.0f64..2.0, lambda in 0.5f64..2.0, t in -0.3f64..0.3) {
            let s = st4(xs, ys);
            let base = ex4_xi(&s).unwrap();
            for g in [
                GroupElement::ShiftY { c },
                GroupElement::Dilate { lambda },
                GroupElement::Ex4Projective { t },
            ] {
                if let Ok(image) = apply_group(&g, &s) {
                    prop_assert!(close(&base, &ex4_xi(&image).unwrap()), "{g:?}");
                }
            }
        }

        #[test]
        fn ex5_invariance((xs, ys) in increasing4(), m in prop::array::uniform4(-2.0f64..2.0)) {
            let s = st4(xs, ys);
            let [a, b, c, d] = m;
            prop_assume!((a * d - b * c).abs() > 0.1);
            prop_assume!(ys.iter().all(|y| (c * y + d).abs() > 0.2));
            prop_assume!(ys.windows(2).all(|w| (w[1] - w[0]).abs() > 0.05));
            let base = ex5_r(ys).unwrap();
            let image = apply_group(&GroupElement::Mobius { a, b, c, d }, &s).unwrap();
            let r = ex5_r(image.ys()).unwrap();
            prop_assert!((r - base).abs() <= 1e-10 * base.abs().max(1.0), "{base} {r}");
        }

        #[test]
        fn homographic_sequences_have_cross_ratio_four(a in 0.2f64..2.0, b in 0.5f64..3.0, c in -1.0f64..1.0) {
            let y = [0.0, 1.0, 2.0, 3.0].map(|n: f64| 1.0 / (a * n + b) + c);
            prop_assert!((ex5_r(y).unwrap() - 4.0).abs() < 1e-9);
        }
    }
}
