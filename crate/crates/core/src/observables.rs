//! Reductions of trajectories to plotted quantities, plus the static overlap
//! diagnostics.

use crate::basis::{check_label, AmplitudeState, Basis};
use crate::dynamics::Trajectory;
use crate::ensemble::Ensemble;
use crate::error::{Error, Result};
use crate::linalg::inner;
use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub label: String,
}

impl ObservableSeries {
    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Value at the sample whose time is closest to `t`.
    pub fn at(&self, t: f64) -> Option<f64> {
        let idx = self
            .times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))?
            .0;
        Some(self.values[idx])
    }
}

pub(crate) fn population_label(label: usize) -> String {
    if label == 1 {
        "population:+".into()
    } else {
        format!("population:m={label}")
    }
}

fn require_td(traj: &Trajectory) -> Result<()> {
    if traj.basis() != Basis::Td {
        return Err(Error::BasisMismatch {
            expected: Basis::Td,
            found: traj.basis(),
        });
    }
    Ok(())
}

/// `|β_m(t)|²` for each requested TD label (1 = `|+⟩`).
pub fn populations(traj: &Trajectory, labels: &[usize]) -> Result<Vec<ObservableSeries>> {
    require_td(traj)?;
    let n = traj.dim();
    labels
        .iter()
        .map(|&label| {
            check_label(label, n)?;
            Ok(ObservableSeries {
                times: traj.times().to_vec(),
                values: traj
                    .states()
                    .iter()
                    .map(|s| s.amplitudes()[label - 1].norm_sqr())
                    .collect(),
                label: population_label(label),
            })
        })
        .collect()
}

/// `Σ_j |β_j(t)|²`; the same in either basis.
pub fn total_excitation(traj: &Trajectory) -> ObservableSeries {
    ObservableSeries {
        times: traj.times().to_vec(),
        values: traj.states().iter().map(AmplitudeState::norm_sqr).collect(),
        label: "total".into(),
    }
}

/// Population transferred into `target` from a trajectory that starts in the
/// pure TD state `source`.
pub fn fa_transfer(traj: &Trajectory, source: usize, target: usize) -> Result<ObservableSeries> {
    require_td(traj)?;
    let n = traj.dim();
    check_label(source, n)?;
    check_label(target, n)?;
    let start = traj
        .states()
        .first()
        .ok_or_else(|| Error::InvalidPrecondition("empty trajectory".into()))?;
    let p0 = start.amplitudes()[source - 1].norm_sqr();
    if p0 < 1.0 - 1e-9 {
        return Err(Error::InvalidPrecondition(format!(
            "trajectory does not start in TD state {source} (initial population {p0})"
        )));
    }
    let mut series = populations(traj, &[target])?.remove(0);
    series.label = format!("transfer:{source}->{target}");
    Ok(series)
}

/// Survival probability `|⟨ψ|β(t)⟩|²` of a reference state given in the
/// trajectory's basis.
pub fn survival(traj: &Trajectory, reference: &AmplitudeState) -> Result<ObservableSeries> {
    if reference.basis() != traj.basis() {
        return Err(Error::BasisMismatch {
            expected: traj.basis(),
            found: reference.basis(),
        });
    }
    if reference.len() != traj.dim() {
        return Err(Error::DimensionMismatch {
            expected: traj.dim(),
            found: reference.len(),
        });
    }
    Ok(ObservableSeries {
        times: traj.times().to_vec(),
        values: traj
            .states()
            .iter()
            .map(|s| inner(reference.amplitudes().view(), s.amplitudes().view()).norm_sqr())
            .collect(),
        label: "survival".into(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverlapSource {
    Plus,
    Minus,
}

/// Magnitude of the overlap of `|+⟩` or `|−⟩` with the unnormalised vector
///
/// `Σ_{j<N_t} e^{ik0·r_j}/N_t |j⟩ − e^{ik0·r_{N_t}} |N_t⟩`
///
/// taken exactly as written (the `1/N_t` weights are not a normalisation).
/// `|−⟩` is the ladder state on atoms 1 and 2.
pub fn static_overlap(e: &Ensemble, from: OverlapSource, n_target: usize) -> Result<f64> {
    let n = e.len();
    if n_target < 2 || n_target > n {
        return Err(Error::InvalidArgument(format!(
            "target size {n_target} outside 2..={n}"
        )));
    }
    let phases = e.phases();
    let probe: Vec<C64> = (1..=n)
        .map(|j| match j.cmp(&n_target) {
            std::cmp::Ordering::Less => phases[j - 1] / n_target as f64,
            std::cmp::Ordering::Equal => -phases[j - 1],
            std::cmp::Ordering::Greater => C64::new(0.0, 0.0),
        })
        .collect();
    let from_state = match from {
        OverlapSource::Plus => crate::basis::plus_state(e),
        OverlapSource::Minus => crate::basis::ladder_state(e, 2)?,
    };
    let ov: C64 = from_state
        .amplitudes()
        .iter()
        .zip(&probe)
        .map(|(a, b)| a.conj() * b)
        .sum();
    Ok(ov.norm())
}

/// First time the series drops below `threshold`, linearly interpolated
/// between samples. `Ok(None)` when it never does.
pub fn decay_time(series: &ObservableSeries, threshold: f64) -> Result<Option<f64>> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "threshold must lie in (0, 1), got {threshold}"
        )));
    }
    match series.values.first() {
        Some(&v0) if v0 > threshold => {}
        _ => {
            return Err(Error::InvalidPrecondition(
                "series does not start above the threshold".into(),
            ))
        }
    }
    for k in 1..series.values.len() {
        let (v0, v1) = (series.values[k - 1], series.values[k]);
        if v1 < threshold {
            let (t0, t1) = (series.times[k - 1], series.times[k]);
            return Ok(Some(t0 + (v0 - threshold) / (v0 - v1) * (t1 - t0)));
        }
    }
    Ok(None)
}

/// Least-squares slope of `−ln(value)` over samples with `t ≤ window`, i.e.
/// the initial exponential decay rate of a positive series.
pub fn initial_decay_rate(series: &ObservableSeries, window: f64) -> Result<f64> {
    let pts: Vec<(f64, f64)> = series
        .times
        .iter()
        .zip(&series.values)
        .filter(|(t, _)| **t <= window)
        .map(|(&t, &v)| (t, -v.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "fewer than two samples inside window {window}"
        )));
    }
    if pts.iter().any(|(_, y)| !y.is_finite()) {
        return Err(Error::NonFinite("series inside fit window"));
    }
    let k = pts.len() as f64;
    let (st, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (t, y)| (a + t, b + y));
    let (mt, my) = (st / k, sy / k);
    let (num, den) = pts.iter().fold((0.0, 0.0), |(n, d), (t, y)| {
        (n + (t - mt) * (y - my), d + (t - mt) * (t - mt))
    });
    Ok(num / den)
}
