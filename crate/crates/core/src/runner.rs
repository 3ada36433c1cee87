//! Build, propagate, observe, write: the end-to-end path behind the CLI.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::basis::{ladder_state, plus_state, section_state, AmplitudeState, TdTransform};
use crate::config::{Geometry, InitialState, RunConfig, SolverChoice, Tracked};
use crate::dynamics::{self, eigen_solve, rk4_propagate, Solver, Trajectory};
use crate::ensemble::Ensemble;
use crate::error::{Error, Result};
use crate::kernel::{assemble_td_direct, build_generator};
use crate::linalg::inner;
use crate::output::Table;

/// Largest ensemble propagated by eigendecomposition under `solver = auto`.
pub const AUTO_EIGEN_MAX_ATOMS: usize = 500;

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub output: PathBuf,
    pub atoms: usize,
    pub solver: Solver,
    pub rows: usize,
}

pub fn build_ensemble(cfg: &RunConfig) -> Result<Ensemble> {
    let e = match cfg.geometry {
        Geometry::Line => {
            let n = cfg.n.ok_or_else(|| Error::config("n", "line geometry needs n"))?;
            Ensemble::line(n, cfg.spacing, cfg.k0)?
        }
        Geometry::Sphere => {
            let r = cfg
                .radius
                .ok_or_else(|| Error::config("radius", "sphere geometry needs a radius"))?;
            Ensemble::sphere_lattice(r, cfg.spacing, cfg.k0, cfg.target_count)?
        }
    };
    match cfg.sections {
        Some(m) => e.partition_sections(m),
        None => Ok(e),
    }
}

/// Initial amplitudes in the Fock basis.
pub fn initial_state(cfg: &RunConfig, e: &Ensemble) -> Result<AmplitudeState> {
    match cfg.init {
        InitialState::Plus => Ok(plus_state(e)),
        InitialState::Ladder(m) => ladder_state(e, m),
        InitialState::Section(m) => section_state(e, m),
    }
}

pub fn resolve_solver(cfg: &RunConfig, atoms: usize) -> Solver {
    match cfg.solver {
        SolverChoice::Rk4 => Solver::Rk4,
        SolverChoice::Eigen => Solver::Eigen,
        SolverChoice::Auto if atoms <= AUTO_EIGEN_MAX_ATOMS => Solver::Eigen,
        SolverChoice::Auto => Solver::Rk4,
    }
}

/// Sample times shared by both solvers: `k·dt` every `stride` steps plus the
/// final step.
pub fn time_grid(dt: f64, t_max: f64, stride: usize) -> Result<Vec<f64>> {
    let steps = dynamics::step_count(dt, t_max)?;
    let mut ks: Vec<usize> = (0..=steps).step_by(stride.max(1)).collect();
    if *ks.last().unwrap() != steps {
        ks.push(steps);
    }
    Ok(ks.into_iter().map(|k| k as f64 * dt).collect())
}

/// Propagates the configured initial state in the Fock basis.
pub fn simulate(cfg: &RunConfig) -> Result<(Ensemble, AmplitudeState, Trajectory)> {
    cfg.validate()?;
    let e = build_ensemble(cfg)?;
    let m = build_generator(&e, cfg.kernel, cfg.gamma)?;
    let beta0 = initial_state(cfg, &e)?;
    let traj = match resolve_solver(cfg, e.len()) {
        Solver::Rk4 => rk4_propagate(&m, &beta0, cfg.dt, cfg.t_max, cfg.stride)?,
        _ => eigen_solve(&m, &beta0, &time_grid(cfg.dt, cfg.t_max, cfg.stride)?)?,
    };
    Ok((e, beta0, traj))
}

fn column_name(label: usize) -> String {
    if label == 1 {
        "pop_plus".into()
    } else {
        format!("pop_{label}")
    }
}

/// Observable table of a run: time, tracked TD populations, the survival
/// probability for section-state starts, and the total excitation.
pub fn observe(cfg: &RunConfig, e: &Ensemble, beta0: &AmplitudeState, traj: &Trajectory) -> Result<Table> {
    let n = e.len();
    let labels: Vec<usize> = match &cfg.tracked {
        Tracked::All => (1..=n).collect(),
        Tracked::Labels(l) => l.clone(),
    };
    if let Some(&bad) = labels.iter().find(|&&l| l == 0 || l > n) {
        return Err(Error::config("tracked", format!("label {bad} outside 1..={n}")));
    }
    let s = TdTransform::new(e);
    let mut columns = vec!["t".to_string()];
    columns.extend(labels.iter().map(|&l| column_name(l)));
    let section = match cfg.init {
        InitialState::Section(m) => {
            columns.push(format!("pop_section{m}"));
            true
        }
        _ => false,
    };
    columns.push("total".into());

    let rows = traj
        .times()
        .iter()
        .zip(traj.states())
        .map(|(&t, state)| {
            let beta = state.amplitudes();
            let mut row = Vec::with_capacity(columns.len());
            row.push(t);
            row.extend(labels.iter().map(|&l| s.td_component(l, beta).norm_sqr()));
            if section {
                row.push(inner(beta0.amplitudes().view(), beta.view()).norm_sqr());
            }
            row.push(state.norm_sqr());
            row
        })
        .collect();
    Ok(Table { columns, rows })
}

/// Runs one configuration and returns the CSV text (echo + table).
pub fn render_run(cfg: &RunConfig) -> Result<(String, RunSummary)> {
    let (e, beta0, traj) = simulate(cfg)?;
    let table = observe(cfg, &e, &beta0, &traj)?;
    let text = table.render(&cfg.echo());
    let summary = RunSummary {
        output: cfg.output.clone(),
        atoms: e.len(),
        solver: traj.meta().solver,
        rows: table.rows.len(),
    };
    Ok((text, summary))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)?;
    Ok(())
}

/// Executes one run and writes its CSV to `cfg.output`.
pub fn run(cfg: &RunConfig) -> Result<RunSummary> {
    let (text, summary) = render_run(cfg)?;
    write_file(&cfg.output, &text)?;
    Ok(summary)
}

/// Executes independent runs concurrently. Each writes only its own file,
/// so the outputs do not depend on scheduling.
pub fn run_all(cfgs: &[RunConfig]) -> Result<Vec<RunSummary>> {
    cfgs.par_iter().map(run).collect()
}

/// Eigenvalues of the TD-basis generator, sorted by real then imaginary part.
pub fn spectrum_values(cfg: &RunConfig) -> Result<Vec<crate::C64>> {
    cfg.validate()?;
    let e = build_ensemble(cfg)?;
    let t = assemble_td_direct(&e, cfg.kernel, cfg.gamma)?;
    dynamics::eigenvalues(&t)
}

/// `<output stem>_spectrum.csv` next to the run output.
pub fn spectrum_path(cfg: &RunConfig) -> PathBuf {
    let stem = cfg
        .output
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".into());
    cfg.output.with_file_name(format!("{stem}_spectrum.csv"))
}

/// Writes the TD-generator spectrum as `index,re,im` rows.
pub fn spectrum(cfg: &RunConfig) -> Result<PathBuf> {
    let values = spectrum_values(cfg)?;
    let table = Table {
        columns: vec!["index".into(), "re".into(), "im".into()],
        rows: values
            .iter()
            .enumerate()
            .map(|(i, z)| vec![(i + 1) as f64, z.re, z.im])
            .collect(),
    };
    let path = spectrum_path(cfg);
    write_file(&path, &table.render(&cfg.echo()))?;
    Ok(path)
}
