//! Single-excitation cooperative emission from atomic ensembles prepared in
//! timed-Dicke states.
//!
//! The crate builds the effective N×N decay generator of the amplitude
//! equations `β̇ = M β` for two coupling kernels:
//!
//! * [`Kernel::Sine`]: `sin(k₀r)/(k₀r)`, rotating-wave dynamics where the only
//!   inter-state couplings are the environment-mediated (Fano-Agarwal) ones;
//! * [`Kernel::Exp`]: `i e^{ik₀r}/(k₀r)`, which adds the collective Lamb shift
//!   and counter-rotating virtual processes.
//!
//! Generators are assembled in the bare (Fock) basis and conjugated into the
//! timed-Dicke basis by the unitary [`TdTransform`]; an independent direct
//! assembly in the timed-Dicke basis is provided for cross-validation.
//! Amplitudes are propagated by fixed-step RK4, by eigendecomposition, or by a
//! dense matrix exponential used as a test oracle.
//!
//! Units: `k₀ = 1` sets lengths, the single-atom amplitude decay rate `γ`
//! sets time. A lone atom obeys `β̇ = −γβ`, so its population decays as
//! `e^{−2γt}`.

pub mod basis;
pub mod config;
pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod expm;
pub mod kernel;
pub mod linalg;
pub mod observables;
pub mod output;
pub mod presets;
pub mod runner;

pub use num_complex::Complex64 as C64;

pub use basis::{
    ladder_state, plus_state, section_state, AmplitudeState, Basis, TdTransform,
};
pub use config::{parse_config, Geometry, InitialState, RunConfig, SolverChoice, Tracked};
pub use dynamics::{
    eigen_solve, eigenvalues, oracle_expm, rk4_propagate, EigenSolution, Solver, Trajectory,
    TrajectoryMeta,
};
pub use ensemble::{Ensemble, PairGeometry, Vec3};
pub use error::{Error, Result};
pub use kernel::{
    assemble_td_direct, build_exp_generator, build_generator, build_sine_generator,
    GeneratorMatrix, Kernel,
};
pub use observables::{
    decay_time, fa_transfer, initial_decay_rate, populations, static_overlap, survival,
    total_excitation, ObservableSeries, OverlapSource,
};
pub use runner::{run, spectrum, RunSummary};
