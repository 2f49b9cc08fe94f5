//! The five model ODEs, their default initial-value set-ups and jet algebra.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Forcing term `F(x)` of the Schwarzian equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Forcing {
    Zero,
    Sine,
}

impl Forcing {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Forcing::Zero => 0.0,
            Forcing::Sine => x.sin(),
        }
    }
}

/// Variant of the Example 3 initial value problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ex3Variant {
    /// `y''(0) = 1/arctan(x_b)`: `y''` blows up at `x_b = 11.25`.
    Blowup,
    /// `y''(0) = -1/arctan(x_b)`: smooth for all `x > 0`.
    NoBlowup,
}

/// Location of the Example 3 blow-up.
pub const EX3_BLOWUP_AT: f64 = 11.25;

/// The model equations, each with its free parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "example", rename_all = "lowercase")]
pub enum Model {
    /// `x^2 y'' + 4 x y' + 2 y = (2 x y + x^2 y')^((k-2)/(k-1))`.
    Example1 { k: f64 },
    /// `(1 + y'^2) y''' - 3 y' y''^2 = K y''^2` (similitude group of the plane).
    Example2 { k: f64 },
    /// `(1 + x^2) y''' + 3 x y'' = y''^2 (1 + x^2)^(3/2)`.
    Example3,
    /// `x^2 (y' y''' - 3 y''^2) = A y'^(1/2) (2 x y'' + y')^(3/2)`.
    Example4 { a: f64 },
    /// `(y' y''' - 3/2 y''^2) / y'^2 = F(x)` (Schwarzian equation).
    Example5 { forcing: Forcing },
}

impl Model {
    pub fn number(&self) -> u8 {
        match self {
            Model::Example1 { .. } => 1,
            Model::Example2 { .. } => 2,
            Model::Example3 => 3,
            Model::Example4 { .. } => 4,
            Model::Example5 { .. } => 5,
        }
    }

    pub fn order(&self) -> usize {
        match self {
            Model::Example1 { .. } => 2,
            _ => 3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Model::Example1 { k } => {
                if [0.0, 0.5, 1.0, 2.0].contains(&k) || !k.is_finite() {
                    return Err(Error::InvalidConfig(format!(
                        "k = {k} is excluded (equation linearizable)"
                    )));
                }
            }
            Model::Example2 { k } if !k.is_finite() => {
                return Err(Error::InvalidConfig("K must be finite".into()));
            }
            Model::Example4 { a } if !a.is_finite() => {
                return Err(Error::InvalidConfig("A must be finite".into()));
            }
            _ => {}
        }
        Ok(())
    }

    /// Highest derivative solved from the equation, given `jet = [y, y', ...]`
    /// of length `order()`.
    pub fn highest_derivative(&self, x: f64, jet: &[f64]) -> f64 {
        match *self {
            Model::Example1 { k } => {
                let (y, d1) = (jet[0], jet[1]);
                let p = (k - 2.0) / (k - 1.0);
                ((2.0 * x * y + x * x * d1).powf(p) - 4.0 * x * d1 - 2.0 * y) / (x * x)
            }
            Model::Example2 { k } => {
                let (d1, d2) = (jet[1], jet[2]);
                (3.0 * d1 * d2 * d2 + k * d2 * d2) / (1.0 + d1 * d1)
            }
            Model::Example3 => {
                let d2 = jet[2];
                let s = 1.0 + x * x;
                (d2 * d2 * s.powf(1.5) - 3.0 * x * d2) / s
            }
            Model::Example4 { a } => {
                let (d1, d2) = (jet[1], jet[2]);
                (3.0 * d2 * d2 + a * d1.sqrt() * (2.0 * x * d2 + d1).powf(1.5) / (x * x)) / d1
            }
            Model::Example5 { forcing } => {
                let (d1, d2) = (jet[1], jet[2]);
                forcing.eval(x) * d1 + 1.5 * d2 * d2 / d1
            }
        }
    }

    /// The equation in implicit form, `E(x, y, y', y'', y''') = 0`, written as
    /// it appears before solving for the highest derivative. Used by the
    /// standard schemes after substituting stencil derivatives.
    pub fn residual(&self, x: f64, y: f64, d1: f64, d2: f64, d3: f64) -> f64 {
        match *self {
            Model::Example1 { k } => {
                let p = (k - 2.0) / (k - 1.0);
                x * x * d2 + 4.0 * x * d1 + 2.0 * y - (2.0 * x * y + x * x * d1).powf(p)
            }
            Model::Example2 { k } => (1.0 + d1 * d1) * d3 - 3.0 * d1 * d2 * d2 - k * d2 * d2,
            Model::Example3 => {
                let s = 1.0 + x * x;
                s * d3 + 3.0 * x * d2 - d2 * d2 * s.powf(1.5)
            }
            Model::Example4 { a } => {
                x * x * (d1 * d3 - 3.0 * d2 * d2) - a * d1.sqrt() * (2.0 * x * d2 + d1).powf(1.5)
            }
            Model::Example5 { forcing } => {
                d1 * d3 - 1.5 * d2 * d2 - forcing.eval(x) * d1 * d1
            }
        }
    }
}

/// One of the model initial value problems.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OdeProblem {
    pub model: Model,
    pub x0: f64,
    pub xf: f64,
    /// `[y(x0), y'(x0), ...]`, one entry per order.
    pub initial: Vec<f64>,
    #[serde(skip)]
    pub exact: Option<fn(f64) -> f64>,
}

fn ex1_exact(x: f64) -> f64 {
    x / 12.0 + 1.0 / (x * x)
}

impl OdeProblem {
    pub fn new(model: Model, x0: f64, xf: f64, initial: Vec<f64>) -> Result<Self> {
        model.validate()?;
        if initial.len() != model.order() {
            return Err(Error::InvalidConfig(format!(
                "example {} needs {} initial values, got {}",
                model.number(),
                model.order(),
                initial.len()
            )));
        }
        if !(x0.is_finite() && xf.is_finite()) || xf < x0 {
            return Err(Error::InvalidConfig(format!("invalid interval [{x0}, {xf}]")));
        }
        Ok(Self {
            model,
            x0,
            xf,
            initial,
            exact: None,
        })
    }

    /// `k = 3` on `[1, 3]` with exact solution `y = x/12 + 1/x^2`.
    pub fn example1() -> Self {
        Self {
            model: Model::Example1 { k: 3.0 },
            x0: 1.0,
            xf: 3.0,
            initial: vec![13.0 / 12.0, 1.0 / 12.0 - 2.0],
            exact: Some(ex1_exact),
        }
    }

    /// `K = 1` on `[0, 10]`, `y(0) = 0, y'(0) = -10, y''(0) = 1`.
    pub fn example2() -> Self {
        Self {
            model: Model::Example2 { k: 1.0 },
            x0: 0.0,
            xf: 10.0,
            initial: vec![0.0, -10.0, 1.0],
            exact: None,
        }
    }

    /// On `[0, 11.2]` with `y(0) = y'(0) = 0` and `y''(0) = ±1/arctan(11.25)`.
    pub fn example3(variant: Ex3Variant) -> Self {
        let sign = match variant {
            Ex3Variant::Blowup => 1.0,
            Ex3Variant::NoBlowup => -1.0,
        };
        Self {
            model: Model::Example3,
            x0: 0.0,
            xf: 11.2,
            initial: vec![0.0, 0.0, sign / EX3_BLOWUP_AT.atan()],
            exact: None,
        }
    }

    /// `A = -1` on `[1, 16]`, `y(1) = 0, y'(1) = 0.1, y''(1) = 0.1`.
    pub fn example4() -> Self {
        Self {
            model: Model::Example4 { a: -1.0 },
            x0: 1.0,
            xf: 16.0,
            initial: vec![0.0, 0.1, 0.1],
            exact: None,
        }
    }

    /// `F(x) = sin x` on `[0, 2]`, `y(0) = 0, y'(0) = -10, y''(0) = 1`.
    pub fn example5() -> Self {
        Self {
            model: Model::Example5 {
                forcing: Forcing::Sine,
            },
            x0: 0.0,
            xf: 2.0,
            initial: vec![0.0, -10.0, 1.0],
            exact: None,
        }
    }

    /// Default set-up for an example number (variant only matters for 3).
    pub fn by_number(n: u8, variant: Ex3Variant) -> Result<Self> {
        Ok(match n {
            1 => Self::example1(),
            2 => Self::example2(),
            3 => Self::example3(variant),
            4 => Self::example4(),
            5 => Self::example5(),
            _ => return Err(Error::InvalidConfig(format!("unknown example {n}"))),
        })
    }

    pub fn order(&self) -> usize {
        self.model.order()
    }

    /// Replaces the interval. The closed form is kept: it does not depend on the end point.
    pub fn with_interval(mut self, x0: f64, xf: f64) -> Result<Self> {
        if !(x0.is_finite() && xf.is_finite()) || xf < x0 {
            return Err(Error::InvalidConfig(format!("invalid interval [{x0}, {xf}]")));
        }
        if x0 != self.x0 {
            self.exact = None;
        }
        self.x0 = x0;
        self.xf = xf;
        Ok(self)
    }

    /// Replaces the initial data; drops any closed-form solution.
    pub fn with_initial(mut self, initial: Vec<f64>) -> Result<Self> {
        if initial.len() != self.order() {
            return Err(Error::InvalidConfig(format!(
                "expected {} initial values, got {}",
                self.order(),
                initial.len()
            )));
        }
        if initial != self.initial {
            self.exact = None;
        }
        self.initial = initial;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example1_exact_solution_satisfies_equation() {
        let p = OdeProblem::example1();
        let f = p.exact.unwrap();
        for &x in &[1.0, 1.7, 2.4, 3.0] {
            let (y, d1, d2) = (f(x), 1.0 / 12.0 - 2.0 / x.powi(3), 6.0 / x.powi(4));
            assert!(p.model.residual(x, y, d1, d2, 0.0).abs() < 1e-13);
            let solved = p.model.highest_derivative(x, &[y, d1]);
            assert!((solved - d2).abs() < 1e-12);
        }
        assert!((f(1.0) - p.initial[0]).abs() < 1e-15);
    }

    #[test]
    fn explicit_and_implicit_forms_agree() {
        let models = [
            Model::Example2 { k: 1.0 },
            Model::Example3,
            Model::Example4 { a: -1.0 },
            Model::Example5 {
                forcing: Forcing::Sine,
            },
        ];
        let (x, y, d1, d2) = (1.3, 0.2, 0.4, 0.05);
        for m in models {
            let d3 = m.highest_derivative(x, &[y, d1, d2]);
            assert!(m.residual(x, y, d1, d2, d3).abs() < 1e-13, "{m:?}");
        }
    }

    #[test]
    fn excluded_k_rejected() {
        for k in [0.0, 0.5, 1.0, 2.0] {
            assert!(Model::Example1 { k }.validate().is_err());
        }
        assert!(Model::Example1 { k: 3.0 }.validate().is_ok());
    }

    #[test]
    fn initial_override_drops_closed_form() {
        let p = OdeProblem::example1().with_initial(vec![1.0, 0.0]).unwrap();
        assert!(p.exact.is_none());
        assert!(OdeProblem::example1().with_initial(vec![1.0]).is_err());
    }
}
