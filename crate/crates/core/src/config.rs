//! Run configuration: flat `key = value` files, flag overrides and the
//! config echo written at the top of every CSV.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::dynamics::DEFAULT_DT;
use crate::ensemble::Vec3;
use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::presets;

/// Every key accepted in a config file or as a flag.
pub const KEYS: &[&str] = &[
    "preset",
    "geometry",
    "n",
    "radius",
    "spacing",
    "target_count",
    "k0",
    "sections",
    "kernel",
    "init",
    "solver",
    "dt",
    "t_max",
    "stride",
    "tracked",
    "gamma",
    "output",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    Line,
    Sphere,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialState {
    Plus,
    /// Ladder TD state `|m⟩`, `m ≥ 2`.
    Ladder(usize),
    /// Section-based state over `m` sections.
    Section(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverChoice {
    /// Eigen for N ≤ 500, RK4 above.
    Auto,
    Rk4,
    Eigen,
}

/// TD labels to emit as population columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tracked {
    All,
    Labels(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub geometry: Geometry,
    pub n: Option<usize>,
    pub radius: Option<f64>,
    pub spacing: f64,
    pub target_count: Option<usize>,
    pub k0: Vec3,
    pub sections: Option<usize>,
    pub kernel: Kernel,
    pub init: InitialState,
    pub solver: SolverChoice,
    pub dt: f64,
    pub t_max: f64,
    pub stride: usize,
    pub tracked: Tracked,
    pub gamma: f64,
    pub output: PathBuf,
    pub preset: Option<String>,
    /// Distinguishes the runs of a multi-run preset; spliced into overridden
    /// output paths.
    pub run_suffix: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            geometry: Geometry::Line,
            n: None,
            radius: None,
            spacing: 1.0,
            target_count: None,
            k0: [1.0, 0.0, 0.0],
            sections: None,
            kernel: Kernel::Sine,
            init: InitialState::Plus,
            solver: SolverChoice::Auto,
            dt: DEFAULT_DT,
            t_max: 10.0,
            stride: 1,
            tracked: Tracked::All,
            gamma: 1.0,
            output: PathBuf::from("run.csv"),
            preset: None,
            run_suffix: None,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::config(key, format!("cannot parse `{value}`")))
}

fn parse_positive(key: &str, value: &str) -> Result<f64> {
    let v: f64 = parse_num(key, value)?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::config(key, format!("must be positive, got {value}")))
    }
}

fn parse_count(key: &str, value: &str) -> Result<usize> {
    let v: usize = parse_num(key, value)?;
    if v == 0 {
        return Err(Error::config(key, "must be >= 1"));
    }
    Ok(v)
}

fn optional<T>(value: &str, f: impl FnOnce(&str) -> Result<T>) -> Result<Option<T>> {
    if value == "none" {
        Ok(None)
    } else {
        f(value).map(Some)
    }
}

fn parse_label(key: &str, item: &str) -> Result<usize> {
    match item {
        "plus" | "+" => Ok(1),
        "minus" | "-" => Ok(2),
        other => parse_count(key, other),
    }
}

impl RunConfig {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "geometry" => {
                self.geometry = match value {
                    "line" => Geometry::Line,
                    "sphere" => Geometry::Sphere,
                    _ => return Err(Error::config(key, format!("expected line or sphere, got `{value}`"))),
                }
            }
            "n" => self.n = optional(value, |v| parse_count(key, v))?,
            "radius" => self.radius = optional(value, |v| parse_positive(key, v))?,
            "spacing" => self.spacing = parse_positive(key, value)?,
            "target_count" => self.target_count = optional(value, |v| parse_count(key, v))?,
            "k0" => {
                let parts: Vec<f64> = value
                    .split(',')
                    .map(|p| parse_num::<f64>(key, p.trim()))
                    .collect::<Result<_>>()?;
                let k0: Vec3 = parts
                    .try_into()
                    .map_err(|_| Error::config(key, "expected three comma-separated components"))?;
                if k0.iter().any(|x| !x.is_finite()) || k0.iter().all(|&x| x == 0.0) {
                    return Err(Error::config(key, "must be finite and non-zero"));
                }
                self.k0 = k0;
            }
            "sections" => self.sections = optional(value, |v| parse_count(key, v))?,
            "kernel" => {
                self.kernel = value
                    .parse()
                    .map_err(|_| Error::config(key, format!("expected sine or exp, got `{value}`")))?
            }
            "init" => self.init = value.parse().map_err(|e: Error| Error::config(key, e.to_string()))?,
            "solver" => {
                self.solver = match value {
                    "auto" => SolverChoice::Auto,
                    "rk4" => SolverChoice::Rk4,
                    "eigen" => SolverChoice::Eigen,
                    _ => return Err(Error::config(key, format!("expected auto, rk4 or eigen, got `{value}`"))),
                }
            }
            "dt" => self.dt = parse_positive(key, value)?,
            "t_max" => {
                let t: f64 = parse_num(key, value)?;
                if !(t >= 0.0 && t.is_finite()) {
                    return Err(Error::config(key, "must be non-negative"));
                }
                self.t_max = t;
            }
            "stride" => self.stride = parse_count(key, value)?,
            "tracked" => {
                self.tracked = if value == "all" {
                    Tracked::All
                } else {
                    let labels = value
                        .split(',')
                        .map(|item| parse_label(key, item.trim()))
                        .collect::<Result<Vec<_>>>()?;
                    Tracked::Labels(labels)
                }
            }
            "gamma" => self.gamma = parse_positive(key, value)?,
            "output" => {
                if value.is_empty() {
                    return Err(Error::config(key, "empty path"));
                }
                self.output = match &self.run_suffix {
                    Some(suffix) => with_suffix(Path::new(value), suffix),
                    None => PathBuf::from(value),
                }
            }
            "preset" => return Err(Error::config(key, "preset can only select the base configuration")),
            _ => return Err(Error::config(key, "unknown key")),
        }
        Ok(())
    }

    /// Cross-field checks that single keys cannot catch.
    pub fn validate(&self) -> Result<()> {
        match self.geometry {
            Geometry::Line if self.n.is_none() => {
                return Err(Error::config("n", "line geometry needs an atom count"))
            }
            Geometry::Sphere if self.radius.is_none() => {
                return Err(Error::config("radius", "sphere geometry needs a radius"))
            }
            _ => {}
        }
        match self.init {
            InitialState::Ladder(m) if m < 2 => {
                return Err(Error::config("init", "ladder index must be >= 2"))
            }
            InitialState::Section(m) => {
                if m < 2 {
                    return Err(Error::config("init", "section index must be >= 2"));
                }
                match self.sections {
                    Some(s) if s >= m => {}
                    _ => {
                        return Err(Error::config(
                            "sections",
                            format!("init section:{m} needs at least {m} sections"),
                        ))
                    }
                }
            }
            _ => {}
        }
        if let Tracked::Labels(labels) = &self.tracked {
            if labels.is_empty() {
                return Err(Error::config("tracked", "empty label list"));
            }
        }
        Ok(())
    }

    /// Resolved configuration as `(key, value)` pairs in canonical text form.
    /// Feeding these back through [`RunConfig::set`] reproduces `self`
    /// (apart from `preset`, which is not part of the physics).
    pub fn to_pairs(&self) -> Vec<(&'static str, String)> {
        fn opt<T: fmt::Display>(v: &Option<T>) -> String {
            v.as_ref().map_or_else(|| "none".to_string(), T::to_string)
        }
        vec![
            (
                "geometry",
                match self.geometry {
                    Geometry::Line => "line".into(),
                    Geometry::Sphere => "sphere".into(),
                },
            ),
            ("n", opt(&self.n)),
            ("radius", opt(&self.radius)),
            ("spacing", self.spacing.to_string()),
            ("target_count", opt(&self.target_count)),
            (
                "k0",
                format!("{},{},{}", self.k0[0], self.k0[1], self.k0[2]),
            ),
            ("sections", opt(&self.sections)),
            ("kernel", self.kernel.to_string()),
            ("init", self.init.to_string()),
            (
                "solver",
                match self.solver {
                    SolverChoice::Auto => "auto".into(),
                    SolverChoice::Rk4 => "rk4".into(),
                    SolverChoice::Eigen => "eigen".into(),
                },
            ),
            ("dt", self.dt.to_string()),
            ("t_max", self.t_max.to_string()),
            ("stride", self.stride.to_string()),
            (
                "tracked",
                match &self.tracked {
                    Tracked::All => "all".into(),
                    Tracked::Labels(l) => l
                        .iter()
                        .map(|&x| if x == 1 { "plus".to_string() } else { x.to_string() })
                        .collect::<Vec<_>>()
                        .join(","),
                },
            ),
            ("gamma", self.gamma.to_string()),
            ("output", self.output.display().to_string()),
        ]
    }

    /// `#`-prefixed echo of the resolved configuration.
    pub fn echo(&self) -> String {
        let mut s = String::from("# timed-dicke run configuration\n");
        for (k, v) in self.to_pairs() {
            s.push_str(&format!("# {k} = {v}\n"));
        }
        s
    }
}

impl fmt::Display for InitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialState::Plus => f.write_str("plus"),
            InitialState::Ladder(m) => write!(f, "ladder:{m}"),
            InitialState::Section(m) => write!(f, "section:{m}"),
        }
    }
}

impl FromStr for InitialState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::InvalidArgument(format!(
                "expected plus, minus, ladder:<m> or section:<m>, got `{s}`"
            ))
        };
        match s {
            "plus" => return Ok(InitialState::Plus),
            "minus" => return Ok(InitialState::Ladder(2)),
            _ => {}
        }
        let (kind, m) = s.split_once(':').ok_or_else(bad)?;
        let m: usize = m.parse().map_err(|_| bad())?;
        match kind {
            "ladder" => Ok(InitialState::Ladder(m)),
            "section" => Ok(InitialState::Section(m)),
            _ => Err(bad()),
        }
    }
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{suffix}"),
    };
    path.with_file_name(name)
}

/// Parses flat `key = value` text. Blank lines and `#` comments (whole-line
/// or after whitespace) are ignored; unknown keys are errors.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::config(line, format!("line {}: expected `key = value`", lineno + 1))
        })?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(Error::config(key, format!("line {}: unknown key", lineno + 1)));
        }
        pairs.push((key.to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

fn strip_comment(line: &str) -> &str {
    if line.trim_start().starts_with('#') {
        return "";
    }
    match line.find(" #").or_else(|| line.find("\t#")) {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Extracts the configuration echo from the `#` preamble of an emitted CSV.
pub fn parse_echo(csv: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for line in csv.lines() {
        let Some(body) = line.strip_prefix('#') else { break };
        if let Some((k, v)) = body.split_once('=') {
            let key = k.trim();
            if !KEYS.contains(&key) {
                return Err(Error::config(key, "unknown key in config echo"));
            }
            pairs.push((key.to_string(), v.trim().to_string()));
        }
    }
    if pairs.is_empty() {
        return Err(Error::Csv("no configuration echo found".into()));
    }
    Ok(pairs)
}

/// Resolves the run list: preset (from `preset` argument, else from the file)
/// as the base, then file values, then flag values. Returns one config per
/// run; multi-run presets yield several.
pub fn parse_config(
    preset: Option<&str>,
    file_pairs: &[(String, String)],
    flag_pairs: &[(String, String)],
) -> Result<Vec<RunConfig>> {
    let file_preset = file_pairs
        .iter()
        .rev()
        .find(|(k, _)| k == "preset")
        .map(|(_, v)| v.as_str());
    let chosen = preset.or(file_preset);
    if chosen.is_none() && file_pairs.is_empty() && flag_pairs.is_empty() {
        return Err(Error::config(
            "preset",
            format!(
                "nothing to run; choose a preset ({}) or give geometry flags",
                presets::NAMES.join(", ")
            ),
        ));
    }
    let mut runs = match chosen {
        Some(name) => presets::preset(name)?,
        None => vec![RunConfig::default()],
    };
    for run in &mut runs {
        for (k, v) in file_pairs.iter().chain(flag_pairs) {
            if k != "preset" {
                run.set(k, v)?;
            }
        }
        run.validate()?;
    }
    Ok(runs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(list: &[(&str, &str)]) -> Vec<(String, String)> {
        list.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn preset_fig1a() {
        let runs = parse_config(Some("fig1a"), &[], &[]).unwrap();
        assert_eq!(runs.len(), 1);
        let r = &runs[0];
        assert_eq!(r.geometry, Geometry::Line);
        assert_eq!(r.n, Some(100));
        assert_eq!(r.spacing, 1.0);
        assert_eq!(r.kernel, Kernel::Sine);
        assert_eq!(r.init, InitialState::Plus);
        assert_eq!(r.dt, 0.01);
        assert_eq!(r.t_max, 10.0);
    }

    #[test]
    fn flag_overrides_preset() {
        let runs = parse_config(Some("fig1a"), &[], &pairs(&[("spacing", "6.25")])).unwrap();
        assert_eq!(runs[0].spacing, 6.25);
        assert_eq!(runs[0].n, Some(100));
    }

    #[test]
    fn flags_override_file() {
        let file = parse_pairs("preset = fig2\n# comment\nkernel = exp  # trailing\n\n").unwrap();
        let runs = parse_config(None, &file, &pairs(&[("kernel", "sine")])).unwrap();
        assert_eq!(runs[0].kernel, Kernel::Sine);
        assert_eq!(runs[0].target_count, Some(121));
        let runs = parse_config(None, &file, &[]).unwrap();
        assert_eq!(runs[0].kernel, Kernel::Exp);
    }

    #[test]
    fn empty_is_usage_error() {
        let err = parse_config(None, &[], &[]).unwrap_err();
        let msg = err.to_string();
        for name in presets::NAMES {
            assert!(msg.contains(name), "{msg}");
        }
    }

    #[test]
    fn unknown_key_named() {
        let err = parse_pairs("geometry = line\nspcing = 2\n").unwrap_err();
        assert!(matches!(err, Error::Config { ref key, .. } if key == "spcing"));
        let err = RunConfig::default().set("bogus", "1").unwrap_err();
        assert!(err.to_string().contains("bogus"));
    }

    #[test]
    fn invalid_values_named() {
        let mut c = RunConfig::default();
        for (k, v) in [
            ("spacing", "-1"),
            ("dt", "0"),
            ("n", "0"),
            ("k0", "1,2"),
            ("k0", "0,0,0"),
            ("kernel", "gauss"),
            ("init", "ladder:x"),
            ("tracked", "plus,zero"),
            ("geometry", "cube"),
        ] {
            let err = c.set(k, v).unwrap_err();
            assert!(matches!(err, Error::Config { ref key, .. } if key == k), "{k}: {err}");
        }
    }

    #[test]
    fn cross_field_validation() {
        let mut c = RunConfig::default();
        assert!(c.validate().is_err()); // line without n
        c.set("n", "4").unwrap();
        c.validate().unwrap();
        c.set("init", "section:2").unwrap();
        assert!(matches!(c.validate(), Err(Error::Config { ref key, .. }) if key == "sections"));
        c.set("sections", "2").unwrap();
        c.validate().unwrap();
        c.set("geometry", "sphere").unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn echo_round_trips() {
        for name in presets::NAMES {
            for run in presets::preset(name).unwrap() {
                let echoed = parse_echo(&format!("{}t,total\n0,1\n", run.echo())).unwrap();
                let mut back = RunConfig::default();
                for (k, v) in &echoed {
                    back.set(k, v).unwrap();
                }
                back.preset = run.preset.clone();
                back.run_suffix = run.run_suffix.clone();
                assert_eq!(back, run);
            }
        }
    }

    #[test]
    fn output_override_keeps_run_suffix() {
        let runs = parse_config(Some("fig4"), &[], &pairs(&[("output", "out/f4.csv")])).unwrap();
        let names: Vec<_> = runs.iter().map(|r| r.output.clone()).collect();
        assert!(names.contains(&PathBuf::from("out/f4_sine_minus.csv")));
        assert!(names.contains(&PathBuf::from("out/f4_exp_plus.csv")));
        let mut uniq = names.clone();
        uniq.sort();
        uniq.dedup();
        assert_eq!(uniq.len(), names.len());
    }

    #[test]
    fn init_parsing() {
        assert_eq!("plus".parse::<InitialState>().unwrap(), InitialState::Plus);
        assert_eq!("minus".parse::<InitialState>().unwrap(), InitialState::Ladder(2));
        assert_eq!("ladder:5".parse::<InitialState>().unwrap(), InitialState::Ladder(5));
        assert_eq!("section:3".parse::<InitialState>().unwrap(), InitialState::Section(3));
        assert!("section".parse::<InitialState>().is_err());
    }
}
