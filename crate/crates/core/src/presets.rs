//! Built-in run scenarios.

use std::f64::consts::TAU;
use std::path::PathBuf;

use crate::config::{Geometry, InitialState, RunConfig, Tracked};
use crate::ensemble::lattice_radius_for_count;
use crate::error::{Error, Result};
use crate::kernel::Kernel;

pub const NAMES: &[&str] = &["fig1a", "fig1b", "fig2", "fig3", "fig4"];

/// Resonant wavelength in units of `1/k₀`.
pub const LAMBDA0: f64 = TAU;

pub fn describe(name: &str) -> Option<&'static str> {
    Some(match name {
        "fig1a" => "line of 100 atoms, spacing 1/k0, k0 along the line, sine kernel, start in |+>",
        "fig1b" => "as fig1a, start in |->",
        "fig2" => "sphere radius 3/k0, spacing 1/k0, trimmed to 121 atoms, sine kernel, start in |+>",
        "fig3" => "as fig2, start in |->",
        "fig4" => "sphere of 1000 atoms at spacing lambda0, sine and exp kernels, start in |+>, section |-> and section |3>",
        _ => return None,
    })
}

fn line_100() -> RunConfig {
    RunConfig {
        geometry: Geometry::Line,
        n: Some(100),
        spacing: 1.0,
        tracked: Tracked::All,
        t_max: 10.0,
        ..RunConfig::default()
    }
}

fn sphere_121() -> RunConfig {
    RunConfig {
        geometry: Geometry::Sphere,
        radius: Some(3.0),
        spacing: 1.0,
        target_count: Some(121),
        tracked: Tracked::Labels(vec![1, 2, 3, 121]),
        t_max: 10.0,
        ..RunConfig::default()
    }
}

/// A sphere at lattice spacing λ₀ holding 1000 atoms: the radius is the
/// smallest shell radius with at least 1000 sites, then trimmed to 1000.
pub fn fig4_base() -> RunConfig {
    RunConfig {
        geometry: Geometry::Sphere,
        radius: Some(lattice_radius_for_count(LAMBDA0, 1000)),
        spacing: LAMBDA0,
        target_count: Some(1000),
        tracked: Tracked::Labels(vec![1, 2, 3]),
        t_max: 2.0,
        ..RunConfig::default()
    }
}

fn named(name: &str, mut cfg: RunConfig, suffix: Option<&str>) -> RunConfig {
    cfg.preset = Some(name.to_string());
    cfg.output = PathBuf::from(match suffix {
        Some(s) => format!("{name}_{s}.csv"),
        None => format!("{name}.csv"),
    });
    cfg.run_suffix = suffix.map(str::to_string);
    cfg
}

/// Runs making up a preset, in a fixed order.
pub fn preset(name: &str) -> Result<Vec<RunConfig>> {
    let runs = match name {
        "fig1a" => vec![named(name, line_100(), None)],
        "fig1b" => vec![named(
            name,
            RunConfig {
                init: InitialState::Ladder(2),
                ..line_100()
            },
            None,
        )],
        "fig2" => vec![named(name, sphere_121(), None)],
        "fig3" => vec![named(
            name,
            RunConfig {
                init: InitialState::Ladder(2),
                ..sphere_121()
            },
            None,
        )],
        "fig4" => {
            let mut runs = Vec::new();
            for kernel in [Kernel::Sine, Kernel::Exp] {
                for (init, sections, tag) in [
                    (InitialState::Plus, None, "plus"),
                    (InitialState::Section(2), Some(2), "minus"),
                    (InitialState::Section(3), Some(3), "section3"),
                ] {
                    let cfg = RunConfig {
                        kernel,
                        init,
                        sections,
                        ..fig4_base()
                    };
                    runs.push(named(name, cfg, Some(&format!("{kernel}_{tag}"))));
                }
            }
            runs
        }
        other => {
            return Err(Error::config(
                "preset",
                format!("unknown preset `{other}` (available: {})", NAMES.join(", ")),
            ))
        }
    };
    Ok(runs)
}
