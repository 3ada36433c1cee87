//! Propagation of `β̇ = M β` for a time-independent generator.
//!
//! Three independent routes: classical fixed-step RK4 (the reference method,
//! default step 0.01/γ), the modal expansion `β(t) = Σ c_i V_i e^{λ_i t}`, and
//! a dense matrix exponential kept as an oracle.

use std::fmt;

use faer::linalg::solvers::Solve;
use ndarray::{Array1, Array2};

use crate::basis::{AmplitudeState, Basis};
use crate::error::{Error, Result};
use crate::expm::expm;
use crate::kernel::{GeneratorMatrix, Kernel};
use crate::linalg::{from_faer, matvec, to_faer};
use crate::C64;

pub const DEFAULT_DT: f64 = 0.01;

/// Eigenbases worse than this are refused.
pub const MAX_EIGENVECTOR_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Solver {
    Rk4,
    Eigen,
    Expm,
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Solver::Rk4 => "rk4",
            Solver::Eigen => "eigen",
            Solver::Expm => "expm",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryMeta {
    pub kernel: Option<Kernel>,
    pub basis: Basis,
    pub solver: Solver,
    /// Integration step for RK4; `None` for solvers exact in time.
    pub dt: Option<f64>,
}

/// Snapshots of the amplitudes on an increasing time grid starting at 0.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<AmplitudeState>,
    meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[AmplitudeState] {
        &self.states
    }

    pub fn meta(&self) -> &TrajectoryMeta {
        &self.meta
    }

    pub fn basis(&self) -> Basis {
        self.meta.basis
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, AmplitudeState::len)
    }

    pub fn last(&self) -> Option<&AmplitudeState> {
        self.states.last()
    }

    /// Re-expresses every snapshot through `f`, e.g. a basis change.
    pub fn map_states(
        &self,
        basis: Basis,
        mut f: impl FnMut(&AmplitudeState) -> Result<AmplitudeState>,
    ) -> Result<Trajectory> {
        let states = self.states.iter().map(&mut f).collect::<Result<Vec<_>>>()?;
        Ok(Trajectory {
            times: self.times.clone(),
            states,
            meta: TrajectoryMeta {
                basis,
                ..self.meta.clone()
            },
        })
    }
}

fn check_inputs(m: &GeneratorMatrix, beta0: &AmplitudeState) -> Result<()> {
    if m.basis() != beta0.basis() {
        return Err(Error::BasisMismatch {
            expected: m.basis(),
            found: beta0.basis(),
        });
    }
    if m.dim() != beta0.len() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: beta0.len(),
        });
    }
    let finite = |z: &C64| z.re.is_finite() && z.im.is_finite();
    if !m.entries().iter().all(finite) {
        return Err(Error::NonFinite("generator entries"));
    }
    if !beta0.amplitudes().iter().all(finite) {
        return Err(Error::NonFinite("initial amplitudes"));
    }
    Ok(())
}

/// Number of steps of size `dt` that reach `t_max`. A `t_max` that is not a
/// whole number of steps is rounded to the nearest one.
pub fn step_count(dt: f64, t_max: f64) -> Result<usize> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    if !t_max.is_finite() || t_max < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "t_max must be non-negative, got {t_max}"
        )));
    }
    Ok((t_max / dt).round() as usize)
}

/// Classical RK4 with a fixed step. A snapshot is kept every `stride` steps
/// and at the final step; times are `k·dt`.
pub fn rk4_propagate(
    m: &GeneratorMatrix,
    beta0: &AmplitudeState,
    dt: f64,
    t_max: f64,
    stride: usize,
) -> Result<Trajectory> {
    check_inputs(m, beta0)?;
    let steps = step_count(dt, t_max)?;
    if stride == 0 {
        return Err(Error::InvalidArgument("stride must be >= 1".into()));
    }
    let a = m.entries().view();
    let half = C64::new(dt / 2.0, 0.0);
    let full = C64::new(dt, 0.0);
    let sixth = C64::new(dt / 6.0, 0.0);
    let two = C64::new(2.0, 0.0);

    let mut beta = beta0.amplitudes().clone();
    let mut times = vec![0.0];
    let mut states = vec![beta0.clone()];
    for step in 1..=steps {
        let k1 = matvec(a, beta.view());
        let k2 = matvec(a, (&beta + &(&k1 * half)).view());
        let k3 = matvec(a, (&beta + &(&k2 * half)).view());
        let k4 = matvec(a, (&beta + &(&k3 * full)).view());
        ndarray::Zip::from(&mut beta)
            .and(&k1)
            .and(&k2)
            .and(&k3)
            .and(&k4)
            .for_each(|b, &a1, &a2, &a3, &a4| {
                *b += sixth * (a1 + two * a2 + two * a3 + a4);
            });
        if step % stride == 0 || step == steps {
            if beta.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite("rk4 state (step too large?)"));
            }
            times.push(step as f64 * dt);
            states.push(AmplitudeState::from_parts(beta.clone(), beta0.basis()));
        }
    }
    Ok(Trajectory {
        times,
        states,
        meta: TrajectoryMeta {
            kernel: m.kernel(),
            basis: beta0.basis(),
            solver: Solver::Rk4,
            dt: Some(dt),
        },
    })
}

/// Modal solution of `β̇ = Mβ`: eigenpairs of `M` plus the expansion
/// coefficients of the initial condition.
#[derive(Debug, Clone)]
pub struct EigenSolution {
    pub eigenvalues: Vec<C64>,
    /// Column `i` is `V_i`, normalised to unit length.
    pub eigenvectors: Array2<C64>,
    /// `c` with `V c = β(0)`.
    pub coefficients: Array1<C64>,
    /// 2-norm condition number of `V`.
    pub condition: f64,
    basis: Basis,
}

impl EigenSolution {
    pub fn new(m: &GeneratorMatrix, beta0: &AmplitudeState) -> Result<Self> {
        check_inputs(m, beta0)?;
        let fm = to_faer(m.entries().view());
        let evd = fm
            .eigen()
            .map_err(|e| Error::Eigen(format!("{e:?}")))?;
        let values = evd.S();
        let n = m.dim();
        let mut vectors = evd.U().to_owned();
        for j in 0..n {
            let norm = (0..n).map(|i| vectors[(i, j)].norm_sqr()).sum::<f64>().sqrt();
            if norm > 0.0 {
                for i in 0..n {
                    vectors[(i, j)] /= norm;
                }
            }
        }
        let vectors = vectors.as_ref();
        let eigenvalues: Vec<C64> = (0..n).map(|i| values[i]).collect();

        let sv = vectors
            .singular_values()
            .map_err(|e| Error::Eigen(format!("{e:?}")))?;
        let (smax, smin) = sv
            .iter()
            .fold((0.0_f64, f64::INFINITY), |(hi, lo), &s| (hi.max(s), lo.min(s)));
        let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        if condition.is_nan() || condition >= MAX_EIGENVECTOR_CONDITION {
            return Err(Error::DegenerateSpectrum {
                condition,
                limit: MAX_EIGENVECTOR_CONDITION,
            });
        }

        let mut rhs = faer::Mat::<C64>::from_fn(n, 1, |i, _| beta0.amplitudes()[i]);
        vectors.partial_piv_lu().solve_in_place(rhs.as_mut());
        let coefficients = Array1::from_shape_fn(n, |i| rhs[(i, 0)]);
        Ok(Self {
            eigenvalues,
            eigenvectors: from_faer(vectors),
            coefficients,
            condition,
            basis: beta0.basis(),
        })
    }

    /// `β(t) = Σ_i c_i V_i e^{λ_i t}`.
    pub fn evaluate(&self, t: f64) -> AmplitudeState {
        let weights: Array1<C64> = self
            .coefficients
            .iter()
            .zip(&self.eigenvalues)
            .map(|(c, l)| c * (l * t).exp())
            .collect();
        AmplitudeState::from_parts(matvec(self.eigenvectors.view(), weights.view()), self.basis)
    }
}

/// Modal propagation evaluated at each of `times` (increasing, from 0).
pub fn eigen_solve(m: &GeneratorMatrix, beta0: &AmplitudeState, times: &[f64]) -> Result<Trajectory> {
    if times.first() != Some(&0.0) || times.windows(2).any(|w| w[1].is_nan() || w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "times must start at 0 and increase strictly".into(),
        ));
    }
    let sol = EigenSolution::new(m, beta0)?;
    let mut states = Vec::with_capacity(times.len());
    states.push(beta0.clone());
    states.extend(times[1..].iter().map(|&t| sol.evaluate(t)));
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        meta: TrajectoryMeta {
            kernel: m.kernel(),
            basis: beta0.basis(),
            solver: Solver::Eigen,
            dt: None,
        },
    })
}

/// `exp(M t) β0` through the independent scaling-and-squaring exponential.
pub fn oracle_expm(m: &GeneratorMatrix, beta0: &AmplitudeState, t: f64) -> Result<AmplitudeState> {
    check_inputs(m, beta0)?;
    if !t.is_finite() {
        return Err(Error::NonFinite("time"));
    }
    let scaled = m.entries().mapv(|z| z * t);
    let e = expm(&scaled)?;
    let n = m.dim();
    let b = beta0.amplitudes();
    let out = Array1::from_shape_fn(n, |i| (0..n).map(|j| e[[i, j]] * b[j]).sum());
    AmplitudeState::new(out, beta0.basis())
}

/// Eigenvalues of `M`, sorted by real part then imaginary part.
pub fn eigenvalues(m: &GeneratorMatrix) -> Result<Vec<C64>> {
    let mut values = to_faer(m.entries().view())
        .eigenvalues()
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(values)
}
