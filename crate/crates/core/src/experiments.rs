//! Experiment harness: runs schemes against a reference solution at several
//! resolutions and writes error tables and plot data.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridPoint, NodeFlag, Trajectory};
use crate::problems::{Ex3Variant, Model, OdeProblem};
use crate::reference::{reference_solution, startup_integrated, DenseSolution};
use crate::roots::RootConfig;
use crate::schemes::{run_scheme, startup_lattice, SchemeConfig};
use crate::standard::run_standard;

/// Tolerance of the reference integrator used by the harness.
pub const REFERENCE_TOL: f64 = 1e-12;
/// Tolerance for start-up values, which are integrated to each node separately.
pub const STARTUP_TOL: f64 = 1e-14;

/// Nodes closer than this to the pole are left out of cross-resolution
/// comparisons.
pub const POLE_EXCLUSION: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeChoice {
    Invariant,
    Standard,
    Both,
}

impl SchemeChoice {
    fn includes(self, kind: SchemeKind) -> bool {
        matches!(
            (self, kind),
            (SchemeChoice::Both, _)
                | (SchemeChoice::Invariant, SchemeKind::Invariant)
                | (SchemeChoice::Standard, SchemeKind::Standard)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Invariant,
    Standard,
}

impl SchemeKind {
    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Invariant => "invariant",
            SchemeKind::Standard => "standard",
        }
    }
}

/// How a row's mesh is specified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Resolution {
    /// Start-up spacing `h₀` (the uniform step for Examples 1 and 5).
    Step(f64),
    /// Number of uniform intervals over the whole interval.
    Intervals(usize),
}

impl Resolution {
    fn step(self, problem: &OdeProblem) -> f64 {
        match self {
            Resolution::Step(h) => h,
            Resolution::Intervals(n) => (problem.xf - problem.x0) / n as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub example: u8,
    pub scheme: SchemeChoice,
    pub resolutions: Vec<Resolution>,
    pub interval: Option<(f64, f64)>,
    pub initial: Option<Vec<f64>>,
    pub variant: Ex3Variant,
    pub out_dir: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn new(example: u8, scheme: SchemeChoice, steps: &[f64]) -> Self {
        Self {
            example,
            scheme,
            resolutions: steps.iter().map(|&h| Resolution::Step(h)).collect(),
            interval: None,
            initial: None,
            variant: Ex3Variant::Blowup,
            out_dir: None,
        }
    }

    pub fn with_variant(mut self, variant: Ex3Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn with_interval(mut self, x0: f64, xf: f64) -> Self {
        self.interval = Some((x0, xf));
        self
    }

    /// The configured problem, with overrides applied.
    pub fn problem(&self) -> Result<OdeProblem> {
        let mut p = OdeProblem::by_number(self.example, self.variant)?;
        if let Some((a, b)) = self.interval {
            if !(b > a) {
                return Err(Error::InvalidConfig(format!("empty interval [{a}, {b}]")));
            }
            p = p.with_interval(a, b)?;
        }
        if let Some(init) = &self.initial {
            p = p.with_initial(init.clone())?;
        }
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.problem()?;
        for r in &self.resolutions {
            match *r {
                Resolution::Step(h) if !(h > 0.0 && h.is_finite()) => {
                    return Err(Error::InvalidConfig(format!("step sizes must be positive, got {h}")));
                }
                Resolution::Intervals(0) => {
                    return Err(Error::InvalidConfig("interval count must be positive".into()));
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// File stem shared by all outputs of this experiment.
    pub fn stem(&self) -> String {
        match (self.example, self.variant) {
            (3, Ex3Variant::Blowup) => "example3-blowup".into(),
            (3, Ex3Variant::NoBlowup) => "example3-noblowup".into(),
            (n, _) => format!("example{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub scheme: SchemeKind,
    pub h: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub max_error: f64,
    pub endpoint_error: Option<f64>,
    pub order: Option<f64>,
    /// `None` when the run reached the end of its interval.
    pub failure: Option<String>,
    #[serde(skip)]
    pub wall_time: f64,
}

/// A non-ok node status or an early stop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlagEvent {
    pub scheme: SchemeKind,
    pub h: f64,
    pub index: usize,
    pub x: f64,
    pub flag: NodeFlag,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeConstant {
    pub h: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub model: Model,
    pub interval: (f64, f64),
    pub initial: Vec<f64>,
    pub reference_tol: f64,
    pub root: RootConfig,
    pub alpha: f64,
    pub lattice: Vec<LatticeConstant>,
    /// `exact` or `reference`.
    pub startups: String,
    /// `max_error` or `endpoint_error`.
    pub order_from: String,
    pub reference_failure: Option<f64>,
}

/// A finished run kept for plot output.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub scheme: SchemeKind,
    pub h: f64,
    pub trajectory: Trajectory,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub example: String,
    pub scheme: SchemeChoice,
    pub rows: Vec<ErrorRow>,
    pub flags: Vec<FlagEvent>,
    pub meta: Meta,
    #[serde(skip)]
    pub runs: Vec<RunTrace>,
}

impl ErrorReport {
    pub fn rows_for(&self, kind: SchemeKind) -> impl Iterator<Item = &ErrorRow> {
        self.rows.iter().filter(move |r| r.scheme == kind)
    }
}

/// Observed orders `ln(e₁/e₂)/ln(h₁/h₂)` between consecutive `(h, error)` pairs.
pub fn estimate_order(rows: &[(f64, f64)]) -> Result<Vec<f64>> {
    if rows.len() < 2 {
        return Err(Error::InsufficientRows);
    }
    Ok(rows
        .windows(2)
        .map(|w| (w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln())
        .collect())
}

/// Errors of a trajectory against the reference: max over usable nodes inside
/// the reference range, and at the last node (when it is usable and covered).
fn trajectory_errors(traj: &Trajectory, exact: &dyn Fn(f64) -> Option<f64>) -> (f64, Option<f64>) {
    let mut max = 0.0f64;
    for p in traj.usable() {
        if let Some(y) = exact(p.x) {
            max = max.max((p.y - y).abs());
        }
    }
    let end = match (traj.stop.as_ref(), traj.last()) {
        (None, Some(p)) if p.y.is_finite() => exact(p.x).map(|y| (p.y - y).abs()),
        _ => None,
    };
    (max, end)
}

fn flag_events(kind: SchemeKind, h: f64, traj: &Trajectory) -> Vec<FlagEvent> {
    let mut out: Vec<FlagEvent> = traj
        .nodes
        .iter()
        .zip(&traj.flags)
        .enumerate()
        .filter(|(_, (_, f))| **f != NodeFlag::Ok)
        .map(|(index, (p, &flag))| FlagEvent {
            scheme: kind,
            h,
            index,
            x: p.x,
            flag,
            reason: traj.stop.as_ref().filter(|s| s.index == index).map(|s| s.reason.clone()),
        })
        .collect();
    if let Some(stop) = &traj.stop {
        if !out.iter().any(|e| e.index == stop.index) {
            out.push(FlagEvent {
                scheme: kind,
                h,
                index: stop.index,
                x: stop.x,
                flag: NodeFlag::SolverFailed,
                reason: Some(stop.reason.clone()),
            });
        }
    }
    out
}

struct Harness {
    problem: OdeProblem,
    reference: Option<DenseSolution>,
    root: RootConfig,
}

impl Harness {
    fn new(problem: OdeProblem) -> Result<Self> {
        let reference = if problem.exact.is_some() {
            None
        } else {
            // Example 2 meshes overshoot x_F, so the reference runs a bit further.
            let end = problem.xf + 0.25 * (problem.xf - problem.x0);
            Some(reference_solution(&problem, end, REFERENCE_TOL)?)
        };
        Ok(Self {
            problem,
            reference,
            root: RootConfig::default(),
        })
    }

    fn exact(&self, x: f64) -> Option<f64> {
        match (self.problem.exact, &self.reference) {
            (Some(f), _) => Some(f(x)),
            (None, Some(r)) => r.y_at(x).ok(),
            (None, None) => None,
        }
    }

    fn startups(&self, h: f64) -> Result<Vec<GridPoint>> {
        let nodes: Vec<f64> = (0..self.problem.order()).map(|i| self.problem.x0 + i as f64 * h).collect();
        startup_integrated(&self.problem, &nodes, STARTUP_TOL)
    }

    fn reference_failure(&self) -> Option<f64> {
        self.reference.as_ref().and_then(|r| r.failure)
    }
}

fn is_nonuniform(model: &Model) -> bool {
    matches!(model, Model::Example2 { .. } | Model::Example3 | Model::Example4 { .. })
}

/// Runs every requested (scheme, resolution) pair and tabulates the errors.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ErrorReport> {
    spec.validate()?;
    let problem = spec.problem()?;
    let cfg = SchemeConfig::new(problem.model);
    let order_from_endpoint = matches!(problem.model, Model::Example3);
    let mut report = ErrorReport {
        example: spec.stem(),
        scheme: spec.scheme,
        rows: Vec::new(),
        flags: Vec::new(),
        meta: Meta {
            model: problem.model,
            interval: (problem.x0, problem.xf),
            initial: problem.initial.clone(),
            reference_tol: REFERENCE_TOL,
            root: cfg.root,
            alpha: cfg.alpha,
            lattice: Vec::new(),
            startups: if problem.exact.is_some() { "exact" } else { "reference" }.into(),
            order_from: if order_from_endpoint { "endpoint_error" } else { "max_error" }.into(),
            reference_failure: None,
        },
        runs: Vec::new(),
    };
    if spec.resolutions.is_empty() {
        return Ok(report);
    }
    let harness = Harness::new(problem.clone())?;
    report.meta.reference_failure = harness.reference_failure();
    let exact = |x: f64| harness.exact(x);
    let mut resolutions: Vec<f64> = spec.resolutions.iter().map(|r| r.step(&problem)).collect();
    resolutions.sort_by(|a, b| b.total_cmp(a));
    resolutions.dedup();

    for &h in &resolutions {
        let needs_invariant = spec.scheme.includes(SchemeKind::Invariant) || is_nonuniform(&problem.model);
        let mut invariant_nodes = None;
        if needs_invariant {
            let started = Instant::now();
            let startups = harness.startups(h).map_err(|e| e.at_resolution(h))?;
            if let Some(gamma) = startup_lattice(&problem.model, &startups) {
                report.meta.lattice.push(LatticeConstant { h, gamma });
            }
            let traj = run_scheme(&problem, &cfg, &startups).map_err(|e| e.at_resolution(h))?;
            invariant_nodes = Some(traj.len());
            if spec.scheme.includes(SchemeKind::Invariant) {
                let (max_error, endpoint_error) = trajectory_errors(&traj, &exact);
                report.flags.extend(flag_events(SchemeKind::Invariant, h, &traj));
                report.rows.push(ErrorRow {
                    scheme: SchemeKind::Invariant,
                    h,
                    n: traj.len(),
                    max_error,
                    endpoint_error,
                    order: None,
                    failure: traj.stop.as_ref().map(|s| s.reason.clone()),
                    wall_time: started.elapsed().as_secs_f64(),
                });
                report.runs.push(RunTrace {
                    scheme: SchemeKind::Invariant,
                    h,
                    trajectory: traj,
                });
            }
        }
        if spec.scheme.includes(SchemeKind::Standard) {
            let started = Instant::now();
            // Non-uniform examples compare at a matched node count.
            let step = match invariant_nodes {
                Some(n) if is_nonuniform(&problem.model) => (problem.xf - problem.x0) / (n - 1) as f64,
                _ => h,
            };
            let startups = harness.startups(step).map_err(|e| e.at_resolution(h))?;
            let traj = run_standard(&problem, &startups, &harness.root).map_err(|e| e.at_resolution(h))?;
            let (max_error, endpoint_error) = trajectory_errors(&traj, &exact);
            report.flags.extend(flag_events(SchemeKind::Standard, step, &traj));
            report.rows.push(ErrorRow {
                scheme: SchemeKind::Standard,
                h: step,
                n: traj.len(),
                max_error,
                endpoint_error,
                order: None,
                failure: traj.stop.as_ref().map(|s| s.reason.clone()),
                wall_time: started.elapsed().as_secs_f64(),
            });
            report.runs.push(RunTrace {
                scheme: SchemeKind::Standard,
                h: step,
                trajectory: traj,
            });
        }
    }
    report
        .rows
        .sort_by(|a, b| a.scheme.cmp(&b.scheme).then(b.h.total_cmp(&a.h)));
    fill_orders(&mut report.rows, order_from_endpoint);
    Ok(report)
}

fn fill_orders(rows: &mut [ErrorRow], endpoint: bool) {
    let metric = |r: &ErrorRow| if endpoint { r.endpoint_error } else { Some(r.max_error) };
    for i in 1..rows.len() {
        let (a, b) = (&rows[i - 1], &rows[i]);
        if a.scheme != b.scheme || a.failure.is_some() || b.failure.is_some() {
            continue;
        }
        if let (Some(ea), Some(eb)) = (metric(a), metric(b)) {
            if let Ok(p) = estimate_order(&[(a.h, ea), (b.h, eb)]) {
                rows[i].order = Some(p[0]).filter(|p| p.is_finite());
            }
        }
    }
}

/// Cross-resolution comparison of two invariant runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub coarse_h: f64,
    pub fine_h: f64,
    /// `max |y_coarse - y_fine| / max |y_fine|` over compared nodes.
    pub relative: f64,
    pub compared_nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardFailure {
    pub h: f64,
    pub failure_x: Option<f64>,
    pub reason: Option<String>,
}

/// Invariant and standard runs of the Schwarzian example across its pole.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularityBundle {
    pub interval: (f64, f64),
    pub reference_failure: Option<f64>,
    /// Pole estimate used for the exclusion zone.
    pub pole: f64,
    pub standard: Vec<StandardFailure>,
    pub discrepancies: Vec<Discrepancy>,
    /// Last abscissa reached by each invariant run.
    pub invariant_reach: Vec<(f64, f64)>,
    #[serde(skip)]
    pub runs: Vec<RunTrace>,
}

/// Largest |y| node of the first invariant run, used as a pole estimate when
/// the reference does not stop.
fn pole_from(traj: &Trajectory) -> f64 {
    traj.usable()
        .max_by(|a, b| a.y.abs().total_cmp(&b.y.abs()))
        .map(|p| p.x)
        .unwrap_or(f64::NAN)
}

fn compare(coarse: &RunTrace, fine: &RunTrace, pole: f64) -> Discrepancy {
    let mut diff = 0.0f64;
    let mut scale = 0.0f64;
    let mut count = 0;
    for p in coarse.trajectory.usable() {
        if (p.x - pole).abs() <= POLE_EXCLUSION {
            continue;
        }
        if let Some(y) = fine.trajectory.interpolate(p.x) {
            diff = diff.max((p.y - y).abs());
            scale = scale.max(y.abs());
            count += 1;
        }
    }
    Discrepancy {
        coarse_h: coarse.h,
        fine_h: fine.h,
        relative: if scale > 0.0 { diff / scale } else { diff },
        compared_nodes: count,
    }
}

/// Example 5 on `[0, 6]` at each step size: invariant runs through the pole,
/// standard runs until they fail, and cross-resolution consistency.
pub fn singularity_run(steps: &[f64]) -> Result<SingularityBundle> {
    if let Some(h) = steps.iter().find(|h| !(**h > 0.0 && h.is_finite())) {
        return Err(Error::InvalidConfig(format!("step sizes must be positive, got {h}")));
    }
    let problem = OdeProblem::example5().with_interval(0.0, 6.0)?;
    let reference = reference_solution(&problem, problem.xf, REFERENCE_TOL)?;
    let cfg = SchemeConfig::new(problem.model);
    let mut hs = steps.to_vec();
    hs.sort_by(|a, b| b.total_cmp(a));
    hs.dedup();
    let mut runs = Vec::new();
    let mut standard = Vec::new();
    for &h in &hs {
        let nodes = [0.0, h, 2.0 * h];
        let startups = startup_integrated(&problem, &nodes, STARTUP_TOL).map_err(|e| e.at_resolution(h))?;
        let inv = run_scheme(&problem, &cfg, &startups).map_err(|e| e.at_resolution(h))?;
        runs.push(RunTrace {
            scheme: SchemeKind::Invariant,
            h,
            trajectory: inv,
        });
        let std_run = run_standard(&problem, &startups, &cfg.root).map_err(|e| e.at_resolution(h))?;
        standard.push(StandardFailure {
            h,
            failure_x: std_run.stop.as_ref().map(|s| s.x),
            reason: std_run.stop.as_ref().map(|s| s.reason.clone()),
        });
        runs.push(RunTrace {
            scheme: SchemeKind::Standard,
            h,
            trajectory: std_run,
        });
    }
    let invariant: Vec<&RunTrace> = runs.iter().filter(|r| r.scheme == SchemeKind::Invariant).collect();
    let pole = reference
        .failure
        .unwrap_or_else(|| invariant.last().map(|r| pole_from(&r.trajectory)).unwrap_or(f64::NAN));
    let discrepancies = invariant.windows(2).map(|w| compare(w[0], w[1], pole)).collect();
    let invariant_reach = invariant
        .iter()
        .map(|r| (r.h, r.trajectory.usable().last().map_or(f64::NAN, |p| p.x)))
        .collect();
    Ok(SingularityBundle {
        interval: (problem.x0, problem.xf),
        reference_failure: reference.failure,
        pole,
        standard,
        discrepancies,
        invariant_reach,
        runs,
    })
}

/// Six significant digits in scientific notation.
pub fn sci(v: f64) -> String {
    format!("{v:.5e}")
}

fn opt_sci(v: Option<f64>) -> String {
    v.map(sci).unwrap_or_default()
}

/// The report as CSV text with header `scheme,h,N,max_error,endpoint_error,order`.
pub fn report_csv(report: &ErrorReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Output {
        path: PathBuf::from("<csv>"),
        message: e.to_string(),
    };
    w.write_record(["scheme", "h", "N", "max_error", "endpoint_error", "order"])
        .map_err(csv_err)?;
    for r in &report.rows {
        w.write_record([
            r.scheme.name().to_string(),
            sci(r.h),
            r.n.to_string(),
            sci(r.max_error),
            opt_sci(r.endpoint_error),
            opt_sci(r.order),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Output {
        path: PathBuf::from("<csv>"),
        message: e.to_string(),
    })?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn report_json(report: &ErrorReport) -> String {
    serde_json::to_string_pretty(report).expect("report serializes") + "\n"
}

pub fn bundle_json(bundle: &SingularityBundle) -> String {
    serde_json::to_string_pretty(bundle).expect("bundle serializes") + "\n"
}

/// Two-column `x y` text, one line per node; non-usable nodes are skipped.
pub fn xy_text(traj: &Trajectory) -> String {
    let mut s = String::new();
    for p in traj.usable() {
        s.push_str(&format!("{} {}\n", sci(p.x), sci(p.y)));
    }
    s
}

fn plot_name(stem: &str, run: &RunTrace) -> String {
    format!("{stem}_{}_h{}.xy", run.scheme.name(), sci(run.h))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })
}

/// Writes `<stem>.csv`, `<stem>.json` and one `.xy` file per run into `dir`.
/// Returns the written paths.
pub fn emit_report(report: &ErrorReport, dir: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let stem = &report.example;
    let mut written = Vec::new();
    let csv_path = dir.join(format!("{stem}.csv"));
    write(&csv_path, &report_csv(report)?)?;
    written.push(csv_path);
    let json_path = dir.join(format!("{stem}.json"));
    write(&json_path, &report_json(report))?;
    written.push(json_path);
    for run in &report.runs {
        let path = dir.join(plot_name(stem, run));
        write(&path, &xy_text(&run.trajectory))?;
        written.push(path);
    }
    Ok(written)
}

/// Writes `singularity.json` and one `.xy` file per run into `dir`.
pub fn emit_bundle(bundle: &SingularityBundle, dir: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let mut written = Vec::new();
    let json_path = dir.join("singularity.json");
    write(&json_path, &bundle_json(bundle))?;
    written.push(json_path);
    for run in &bundle.runs {
        let path = dir.join(plot_name("singularity", run));
        write(&path, &xy_text(&run.trajectory))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_examples() {
        let p = estimate_order(&[(0.1, 1e-2), (0.01, 1e-4)]).unwrap();
        assert!((p[0] - 2.0).abs() < 1e-12);
        assert!(matches!(estimate_order(&[(0.1, 1e-2)]), Err(Error::InsufficientRows)));
        // Example 1 invariant errors
        let p = estimate_order(&[(0.1, 6.04e-4), (0.01, 7.26e-6), (0.001, 7.39e-8)]).unwrap();
        assert!((p[0] - 1.920).abs() < 1e-3 && (p[1] - 1.992).abs() < 1e-3, "{p:?}");
    }

    #[test]
    fn empty_resolution_list_gives_empty_report() {
        let r = run_experiment(&ExperimentSpec::new(2, SchemeChoice::Both, &[])).unwrap();
        assert!(r.rows.is_empty() && r.flags.is_empty());
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(ExperimentSpec::new(6, SchemeChoice::Both, &[0.1]).validate().unwrap_err().is_spec_error());
        assert!(ExperimentSpec::new(1, SchemeChoice::Both, &[-0.1]).validate().is_err());
        assert!(ExperimentSpec::new(1, SchemeChoice::Both, &[0.1]).with_interval(2.0, 2.0).validate().is_err());
    }

    #[test]
    fn sci_has_six_significant_digits() {
        assert_eq!(sci(6.0443e-4), "6.04430e-4");
        assert_eq!(sci(130.0), "1.30000e2");
    }
}
