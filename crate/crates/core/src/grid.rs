//! Mesh nodes, stencils and discrete trajectories.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub x: f64,
    pub y: f64,
}

impl GridPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

impl From<(f64, f64)> for GridPoint {
    fn from((x, y): (f64, f64)) -> Self {
        Self { x, y }
    }
}

/// A window of `N` consecutive mesh nodes with strictly increasing abscissas.
///
/// Four-point stencils are indexed as `(n-1, n, n+1, n+2)`, three-point ones as
/// `(n-1, n, n+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stencil<const N: usize> {
    points: [GridPoint; N],
}

pub type Stencil3 = Stencil<3>;
pub type Stencil4 = Stencil<4>;

impl<const N: usize> Stencil<N> {
    pub fn new(points: [GridPoint; N]) -> Result<Self> {
        for w in points.windows(2) {
            let h = w[1].x - w[0].x;
            if !h.is_finite() {
                return Err(Error::DegenerateStencil("non-finite abscissa"));
            }
            if h == 0.0 {
                return Err(Error::DegenerateStencil("zero step"));
            }
            if h < 0.0 {
                return Err(Error::NonMonotone);
            }
        }
        Ok(Self { points })
    }

    pub fn from_xy(xs: [f64; N], ys: [f64; N]) -> Result<Self> {
        let mut points = [GridPoint::new(0.0, 0.0); N];
        for (p, (&x, &y)) in points.iter_mut().zip(xs.iter().zip(ys.iter())) {
            *p = GridPoint::new(x, y);
        }
        Self::new(points)
    }

    pub fn points(&self) -> &[GridPoint; N] {
        &self.points
    }

    pub fn xs(&self) -> [f64; N] {
        self.points.map(|p| p.x)
    }

    pub fn ys(&self) -> [f64; N] {
        self.points.map(|p| p.y)
    }

    /// Step `x[i+1] - x[i]`.
    pub fn step(&self, i: usize) -> f64 {
        self.points[i + 1].x - self.points[i].x
    }

    /// All consecutive steps, oldest first (`h_n, h_{n+1}, ...`).
    pub fn steps(&self) -> Vec<f64> {
        self.points.windows(2).map(|w| w[1].x - w[0].x).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeFlag {
    Ok,
    NearPole,
    Diverged,
    SolverFailed,
}

/// Why a run stopped before reaching the end of its interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stop {
    pub index: usize,
    pub x: f64,
    pub reason: String,
}

/// A discrete solution: mesh nodes with per-node status flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub nodes: Vec<GridPoint>,
    pub flags: Vec<NodeFlag>,
    pub stop: Option<Stop>,
}

impl Trajectory {
    pub fn from_points(points: impl IntoIterator<Item = GridPoint>) -> Self {
        let nodes: Vec<_> = points.into_iter().collect();
        let flags = vec![NodeFlag::Ok; nodes.len()];
        Self {
            nodes,
            flags,
            stop: None,
        }
    }

    pub fn push(&mut self, p: GridPoint, flag: NodeFlag) {
        self.nodes.push(p);
        self.flags.push(flag);
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn last(&self) -> Option<&GridPoint> {
        self.nodes.last()
    }

    pub fn xs(&self) -> Vec<f64> {
        self.nodes.iter().map(|p| p.x).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        self.nodes.iter().map(|p| p.y).collect()
    }

    /// Nodes whose values are usable (ok or flagged near a pole but finite).
    pub fn usable(&self) -> impl Iterator<Item = &GridPoint> {
        self.nodes
            .iter()
            .zip(&self.flags)
            .filter(|(p, f)| {
                matches!(f, NodeFlag::Ok | NodeFlag::NearPole) && p.x.is_finite() && p.y.is_finite()
            })
            .map(|(p, _)| p)
    }

    pub fn count_flag(&self, flag: NodeFlag) -> usize {
        self.flags.iter().filter(|&&f| f == flag).count()
    }

    /// True when abscissas of all ok nodes strictly increase.
    pub fn is_monotone(&self) -> bool {
        let xs: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.flags)
            .filter(|(_, f)| **f == NodeFlag::Ok)
            .map(|(p, _)| p.x)
            .collect();
        xs.windows(2).all(|w| w[1] > w[0])
    }

    /// Drops every node with abscissa beyond `end` (with a relative slack of 1e-12).
    pub fn truncate_after(&mut self, end: f64) {
        let slack = 1e-12 * end.abs().max(1.0);
        let keep = self.nodes.iter().take_while(|p| p.x <= end + slack).count();
        self.nodes.truncate(keep);
        self.flags.truncate(keep);
    }

    /// Linear interpolation of ordinates at `x` among usable nodes.
    pub fn interpolate(&self, x: f64) -> Option<f64> {
        let pts: Vec<&GridPoint> = self.usable().collect();
        let idx = pts.partition_point(|p| p.x < x);
        if idx < pts.len() && pts[idx].x == x {
            return Some(pts[idx].y);
        }
        if idx == 0 || idx >= pts.len() {
            return None;
        }
        let (a, b) = (pts[idx - 1], pts[idx]);
        let t = (x - a.x) / (b.x - a.x);
        Some(a.y + t * (b.y - a.y))
    }
}
