//! Experiment drivers: convergence tables, pollution sweeps, traces along
//! `y = 0` and solution dumps.
//!
//! A configuration file holds one optional section per experiment; missing
//! keys take the defaults of [`ExperimentConfig`].

use std::fmt;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{self, AnalysisError, ConvergenceReport, StabilizerScale};
use crate::assembly::{prepare, AssemblyError, ProblemSpec, QuadratureOptions};
use crate::mesh::{disk_mesh, hexagon_mesh, slit_disk_mesh, Mesh, MeshError, DEFAULT_NOTCH_HALF_ANGLE};
use crate::problems::{convex_problem, inhomogeneous_problem, pacman_problem, DielectricProfile, ProblemError};
use crate::solver::{solve_with, SolveError, SolveReport, SolverOptions};
use crate::wg_space::{Degree, DofMap, WgError, WgFunction};
use crate::C64;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Wg(#[from] WgError),
    #[error("{dofs} unknowns exceed the cap of {cap}")]
    TooLarge { dofs: usize, cap: usize },
    #[error("problem has no exact solution")]
    NoExactSolution,
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("config parse: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("config write: {0}")]
    TomlWrite(#[from] toml::ser::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    /// Unit hexagon, convex problem with Robin data.
    Hexagon,
    /// Disk with the dielectric profile, Dirichlet data.
    Disk,
    /// Unit disk minus a wedge around the negative x-axis, Dirichlet data.
    SlitDisk,
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Domain::Hexagon => "hexagon",
            Domain::Disk => "disk",
            Domain::SlitDisk => "slit-disk",
        })
    }
}

impl FromStr for Domain {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "hexagon" => Ok(Domain::Hexagon),
            "disk" => Ok(Domain::Disk),
            "slit-disk" => Ok(Domain::SlitDisk),
            _ => Err(format!("unknown domain {s:?} (expected hexagon, disk or slit-disk)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub domain: Domain,
    /// Wave number κ (also `k` in the exact solutions).
    pub kappa: f64,
    pub degree: Degree,
    /// Mesh parameter per level: `N` for the hexagon, rings for the disks.
    pub mesh_seq: Vec<usize>,
    /// Bessel order of the slit-disk solution.
    pub xi: f64,
    /// Angular cells per half ring on the innermost slit-disk ring.
    pub sectors: usize,
    pub notch_half_angle: f64,
    pub profile: DielectricProfile,
    /// Fixed `κh` of a pollution sweep.
    pub kh: f64,
    /// Wave numbers of a pollution sweep.
    pub k_list: Vec<f64>,
    /// Refuse systems with more unknowns than this.
    pub max_dofs: usize,
    pub out: Option<PathBuf>,
    pub h1_scale: StabilizerScale,
    pub quadrature: QuadratureOptions,
    pub solver: SolverOptions,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            domain: Domain::Hexagon,
            kappa: 1.0,
            degree: Degree::Zero,
            mesh_seq: vec![2, 4, 8, 16, 32, 64],
            xi: 1.0,
            sectors: 3,
            notch_half_angle: DEFAULT_NOTCH_HALF_ANGLE,
            profile: DielectricProfile::default(),
            kh: 0.25,
            k_list: vec![5.0, 10.0, 20.0, 40.0],
            max_dofs: 700_000,
            out: None,
            h1_scale: StabilizerScale::Global,
            quadrature: QuadratureOptions::default(),
            solver: SolverOptions::default(),
        }
    }
}

fn invalid(msg: impl Into<String>) -> ExperimentError {
    ExperimentError::Config(msg.into())
}

impl ExperimentConfig {
    /// Checks every parameter the experiments may read.
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(invalid(format!("wave number must be positive, got {}", self.kappa)));
        }
        if self.mesh_seq.is_empty() || self.mesh_seq.contains(&0) {
            return Err(invalid("mesh sequence must be non-empty with entries >= 1"));
        }
        if !(self.xi > 0.0 && self.xi <= crate::special::MAX_ORDER) {
            return Err(invalid(format!("xi must lie in (0, 4], got {}", self.xi)));
        }
        if self.sectors == 0 {
            return Err(invalid("sectors must be >= 1"));
        }
        if !(self.notch_half_angle > 0.0 && self.notch_half_angle < std::f64::consts::FRAC_PI_2) {
            return Err(invalid(format!("notch half-angle must lie in (0, pi/2), got {}", self.notch_half_angle)));
        }
        self.profile.validate()?;
        if !(self.kh > 0.0 && self.kh.is_finite()) {
            return Err(invalid(format!("kh must be positive, got {}", self.kh)));
        }
        if self.k_list.iter().any(|k| !(*k > 0.0 && k.is_finite())) {
            return Err(invalid("wave numbers in k_list must be positive"));
        }
        if self.max_dofs == 0 {
            return Err(invalid("max_dofs must be positive"));
        }
        if !(self.solver.tolerance > 0.0) {
            return Err(invalid("solver tolerance must be positive"));
        }
        Ok(())
    }

    /// Mesh for one level parameter.
    pub fn mesh(&self, n: usize) -> Result<Mesh, ExperimentError> {
        Ok(match self.domain {
            Domain::Hexagon => hexagon_mesh(n)?,
            Domain::Disk => disk_mesh(self.profile.radius, n)?,
            Domain::SlitDisk => slit_disk_mesh(n, self.sectors, self.notch_half_angle)?,
        })
    }

    /// Problem on this domain with wave number `kappa`.
    pub fn problem(&self, kappa: f64) -> Result<ProblemSpec, ExperimentError> {
        Ok(match self.domain {
            Domain::Hexagon => convex_problem(kappa)?,
            Domain::Disk => inhomogeneous_problem(kappa, self.profile)?,
            Domain::SlitDisk => pacman_problem(kappa, self.xi)?,
        })
    }
}

/// Unknowns of the WG space on `hexagon_mesh(n)`: `6n²` triangles and
/// `9n² + 3n` edges.
pub fn hexagon_dofs(n: usize, degree: Degree) -> usize {
    6 * n * n * degree.interior_dim() + (9 * n * n + 3 * n) * degree.edge_dim()
}

/// Named sections of a configuration file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ExperimentConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pollution: Option<ExperimentConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<ExperimentConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solve: Option<ExperimentConfig>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, ExperimentError> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> Result<String, ExperimentError> {
        Ok(toml::to_string(self)?)
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

/// A solved level.
#[derive(Debug, Clone)]
pub struct Solved {
    pub mesh: Mesh,
    pub dofs: DofMap,
    pub solution: WgFunction,
    pub report: SolveReport,
}

/// Assembles and solves `problem` on `mesh`.
pub fn solve_on(mesh: Mesh, problem: &ProblemSpec, cfg: &ExperimentConfig) -> Result<Solved, ExperimentError> {
    let dofs = DofMap::new(&mesh, cfg.degree);
    if dofs.n_total() > cfg.max_dofs {
        return Err(ExperimentError::TooLarge { dofs: dofs.n_total(), cap: cfg.max_dofs });
    }
    let sys = prepare(&mesh, &dofs, problem, &cfg.quadrature)?;
    let (x, report) = solve_with(&sys.matrix, &sys.rhs, &cfg.solver)?;
    let solution = WgFunction::from_vec(&dofs, sys.expand(&x))?;
    Ok(Solved { mesh, dofs, solution, report })
}

/// Relative (H¹, L²) errors of a solved level against `Q_h u`.
pub fn errors(s: &Solved, problem: &ProblemSpec, cfg: &ExperimentConfig) -> Result<(f64, f64), ExperimentError> {
    let exact = problem.exact.as_ref().ok_or(ExperimentError::NoExactSolution)?;
    let q = analysis::project_with(&s.mesh, &s.dofs, |p| (exact.value)(p), problem.kappa, &cfg.quadrature)?;
    let h1 = analysis::rel_h1_error_with(&s.solution, &q, &s.dofs, &s.mesh, cfg.h1_scale)?;
    let l2 = analysis::rel_l2_error(&s.solution, &q, &s.dofs, &s.mesh)?;
    Ok((h1, l2))
}

fn check_hexagon_cap(cfg: &ExperimentConfig, n: usize) -> Result<(), ExperimentError> {
    let dofs = hexagon_dofs(n, cfg.degree);
    if cfg.domain == Domain::Hexagon && dofs > cfg.max_dofs {
        return Err(ExperimentError::TooLarge { dofs, cap: cfg.max_dofs });
    }
    Ok(())
}

/// One row per mesh level. A failing level stops the sweep and is recorded
/// in `failure`; earlier rows are kept.
pub fn run_convergence(cfg: &ExperimentConfig) -> Result<ConvergenceReport, ExperimentError> {
    cfg.validate()?;
    let problem = cfg.problem(cfg.kappa)?;
    let mut report = ConvergenceReport::new(cfg.domain.to_string(), cfg.kappa, cfg.degree);
    for &n in &cfg.mesh_seq {
        let level = || -> Result<_, ExperimentError> {
            check_hexagon_cap(cfg, n)?;
            let s = solve_on(cfg.mesh(n)?, &problem, cfg)?;
            let (h1, l2) = errors(&s, &problem, cfg)?;
            Ok((s.mesh.h(), h1, l2, s.dofs.n_total(), s.report.seconds, s.report.relative_residual))
        };
        match level() {
            Ok((h, h1, l2, nd, secs, res)) => {
                report.push(h, h1, l2, nd, secs);
                report.max_residual = report.max_residual.max(res);
            }
            Err(e) => {
                report.failure = Some(format!("mesh parameter {n}: {e}"));
                break;
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PollutionRow {
    pub k: f64,
    pub n: usize,
    pub h: f64,
    pub err_h1: f64,
    /// Relative solver residual; not written to CSV.
    pub residual: f64,
}

/// Hexagon solves at fixed `κh` with `N = round(κ / kh)`.
pub fn run_pollution(cfg: &ExperimentConfig) -> Result<Vec<PollutionRow>, ExperimentError> {
    cfg.validate()?;
    if cfg.domain != Domain::Hexagon {
        return Err(invalid("the pollution sweep runs on the hexagon"));
    }
    if cfg.k_list.is_empty() {
        return Err(invalid("k_list is empty"));
    }
    let ns: Vec<usize> = cfg.k_list.iter().map(|k| ((k / cfg.kh).round() as usize).max(1)).collect();
    // Refuse the whole sweep before any solve.
    for &n in &ns {
        check_hexagon_cap(cfg, n)?;
    }
    let mut rows = Vec::new();
    for (&k, &n) in cfg.k_list.iter().zip(&ns) {
        let problem = cfg.problem(k)?;
        let s = solve_on(cfg.mesh(n)?, &problem, cfg)?;
        let (h1, _) = errors(&s, &problem, cfg)?;
        rows.push(PollutionRow { k, n, h: s.mesh.h(), err_h1: h1, residual: s.report.relative_residual });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub x: f64,
    pub re_u0: f64,
    pub re_exact: f64,
}

/// Interior values of the discrete solution along `y = 0` on the finest
/// hexagon mesh of the sequence, sorted by centroid `x`.
pub fn run_trace(cfg: &ExperimentConfig) -> Result<Vec<TraceRow>, ExperimentError> {
    cfg.validate()?;
    if cfg.domain != Domain::Hexagon {
        return Err(invalid("traces are taken on the hexagon"));
    }
    let n = *cfg.mesh_seq.last().expect("validated");
    check_hexagon_cap(cfg, n)?;
    let problem = cfg.problem(cfg.kappa)?;
    let s = solve_on(cfg.mesh(n)?, &problem, cfg)?;
    trace_rows(&s, &problem)
}

/// Trace of a solved level along `y = 0`.
pub fn trace_rows(s: &Solved, problem: &ProblemSpec) -> Result<Vec<TraceRow>, ExperimentError> {
    let exact = problem.exact.as_ref().ok_or(ExperimentError::NoExactSolution)?;
    let mut rows = Vec::new();
    for t in 0..s.mesh.num_triangles() {
        let pts = s.mesh.triangle_points(t);
        let (lo, hi) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p[1]), b.max(p[1])));
        if !(lo < 0.0 && hi > 0.0) {
            continue;
        }
        let x = (pts[0][0] + pts[1][0] + pts[2][0]) / 3.0;
        let u0 = analysis::eval_interior(&s.mesh, &s.dofs, &s.solution, t)?;
        rows.push(TraceRow { x, re_u0: u0([x, 0.0]).re, re_exact: (exact.value)([x, 0.0]).re });
    }
    rows.sort_by(|a, b| a.x.total_cmp(&b.x));
    Ok(rows)
}

/// Per-triangle record of a solution dump.
#[derive(Debug, Clone, PartialEq)]
pub struct DumpRow {
    pub vertices: [[f64; 2]; 3],
    pub coefficients: Vec<C64>,
}

/// Solves on the finest mesh of the sequence.
pub fn run_solve(cfg: &ExperimentConfig) -> Result<Solved, ExperimentError> {
    cfg.validate()?;
    let n = *cfg.mesh_seq.last().expect("validated");
    check_hexagon_cap(cfg, n)?;
    let problem = cfg.problem(cfg.kappa)?;
    solve_on(cfg.mesh(n)?, &problem, cfg)
}

pub fn dump_rows(s: &Solved) -> Vec<DumpRow> {
    (0..s.mesh.num_triangles())
        .map(|t| DumpRow { vertices: s.mesh.triangle_points(t), coefficients: s.solution.interior(&s.dofs, t).to_vec() })
        .collect()
}

fn full(v: f64) -> String {
    format!("{v:.16e}")
}

fn short(v: f64) -> String {
    format!("{v:.5e}")
}

pub fn write_pollution_csv<W: Write>(rows: &[PollutionRow], w: W) -> Result<(), ExperimentError> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["k", "N", "h", "errH1"])?;
    for r in rows {
        wr.write_record([r.k.to_string(), r.n.to_string(), short(r.h), short(r.err_h1)])?;
    }
    wr.flush()?;
    Ok(())
}

pub fn write_trace_csv<W: Write>(rows: &[TraceRow], w: W) -> Result<(), ExperimentError> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["x", "re_u0", "re_exact"])?;
    for r in rows {
        wr.write_record([full(r.x), full(r.re_u0), full(r.re_exact)])?;
    }
    wr.flush()?;
    Ok(())
}

/// Header `x0,y0,x1,y1,x2,y2` followed by `re_c{i},im_c{i}` per interior
/// coefficient; every number at 17 significant digits.
pub fn write_dump_csv<W: Write>(rows: &[DumpRow], degree: Degree, w: W) -> Result<(), ExperimentError> {
    let mut wr = csv::Writer::from_writer(w);
    let mut header: Vec<String> = ["x0", "y0", "x1", "y1", "x2", "y2"].map(String::from).to_vec();
    for i in 0..degree.interior_dim() {
        header.push(format!("re_c{i}"));
        header.push(format!("im_c{i}"));
    }
    wr.write_record(&header)?;
    for r in rows {
        let mut rec: Vec<String> = r.vertices.iter().flat_map(|p| [full(p[0]), full(p[1])]).collect();
        for c in &r.coefficients {
            rec.push(full(c.re));
            rec.push(full(c.im));
        }
        wr.write_record(&rec)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_dump_csv<R: Read>(r: R) -> Result<Vec<DumpRow>, ExperimentError> {
    let mut rd = csv::Reader::from_reader(r);
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let vals = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|e| invalid(format!("bad number {s:?} in dump: {e}"))))
            .collect::<Result<Vec<f64>, _>>()?;
        if vals.len() < 8 || vals.len() % 2 != 0 {
            return Err(invalid(format!("dump row has {} fields", vals.len())));
        }
        rows.push(DumpRow {
            vertices: [[vals[0], vals[1]], [vals[2], vals[3]], [vals[4], vals[5]]],
            coefficients: vals[6..].chunks(2).map(|c| C64::new(c[0], c[1])).collect(),
        });
    }
    Ok(rows)
}
