//! Effective decay generators.
//!
//! Fock basis, amplitude equation `β̇_j = Σ_i M_ji β_i`:
//!
//! * sine kernel: `M_ji = −γ sin(K_ji)/K_ji`,
//! * exponential kernel: `M_ji = iγ e^{iK_ji}/K_ji`,
//!
//! with `K_ji = k₀|r_j − r_i|` and `M_jj = −γ` for both. The diagonal of the
//! exponential kernel keeps only the finite decay part of the `K → 0` limit;
//! the divergent self Lamb shift is taken as absorbed into the transition
//! frequency. There is no `1/N` prefactor here: the `γ/N` of the
//! timed-Dicke equations comes from the `1/√N` normalisations of the states.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2};

use crate::basis::{ladder_weight, Basis};
use crate::ensemble::Ensemble;
use crate::error::{Error, Result};
use crate::linalg::matvec;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kernel {
    Sine,
    Exp,
}

impl Kernel {
    /// Coupling between two atoms a dimensionless distance `k` apart
    /// (`k = 0` gives the regularised self term `−γ`).
    pub fn coupling(self, gamma: f64, k: f64) -> C64 {
        if k == 0.0 {
            return C64::new(-gamma, 0.0);
        }
        match self {
            Kernel::Sine => C64::new(-gamma * k.sin() / k, 0.0),
            // iγ e^{ik}/k = γ(−sin k + i cos k)/k
            Kernel::Exp => C64::new(-gamma * k.sin() / k, gamma * k.cos() / k),
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kernel::Sine => "sine",
            Kernel::Exp => "exp",
        })
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sine" => Ok(Kernel::Sine),
            "exp" => Ok(Kernel::Exp),
            other => Err(Error::InvalidArgument(format!(
                "unknown kernel `{other}` (expected sine or exp)"
            ))),
        }
    }
}

/// Dense N×N generator with its basis and kernel tags. `kernel` is `None`
/// for matrices not produced by one of the builders.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix {
    entries: Array2<C64>,
    basis: Basis,
    kernel: Option<Kernel>,
    gamma: f64,
}

impl GeneratorMatrix {
    /// Wraps an arbitrary square matrix.
    pub fn new(entries: Array2<C64>, basis: Basis, kernel: Option<Kernel>, gamma: f64) -> Result<Self> {
        let (r, c) = entries.dim();
        if r != c {
            return Err(Error::DimensionMismatch { expected: r, found: c });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("generator entries"));
        }
        Ok(Self {
            entries,
            basis,
            kernel,
            gamma,
        })
    }

    pub(crate) fn from_parts(
        entries: Array2<C64>,
        basis: Basis,
        kernel: Option<Kernel>,
        gamma: f64,
    ) -> Self {
        Self {
            entries,
            basis,
            kernel,
            gamma,
        }
    }

    pub fn entries(&self) -> &Array2<C64> {
        &self.entries
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn kernel(&self) -> Option<Kernel> {
        self.kernel
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// `(M + M†)/2`, the part that controls `d/dt Σ|β|²`.
    pub fn hermitian_part(&self) -> Array2<C64> {
        let n = self.dim();
        Array2::from_shape_fn((n, n), |(j, i)| {
            (self.entries[[j, i]] + self.entries[[i, j]].conj()) * 0.5
        })
    }

    pub fn apply(&self, x: &Array1<C64>) -> Array1<C64> {
        matvec(self.entries.view(), x.view())
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "gamma must be positive, got {gamma}"
        )))
    }
}

/// Fock-basis generator for either kernel.
pub fn build_generator(e: &Ensemble, kernel: Kernel, gamma: f64) -> Result<GeneratorMatrix> {
    check_gamma(gamma)?;
    let geom = e.pair_geometry();
    let entries = geom.distance.mapv(|k| kernel.coupling(gamma, k));
    Ok(GeneratorMatrix::from_parts(
        entries,
        Basis::Fock,
        Some(kernel),
        gamma,
    ))
}

pub fn build_sine_generator(e: &Ensemble, gamma: f64) -> Result<GeneratorMatrix> {
    build_generator(e, Kernel::Sine, gamma)
}

pub fn build_exp_generator(e: &Ensemble, gamma: f64) -> Result<GeneratorMatrix> {
    build_generator(e, Kernel::Exp, gamma)
}

/// TD-basis generator assembled straight from the pair double sums
///
/// `T_pq = Σ_{j,i} w_p(j) w_q(i) e^{−i k0·(r_j − r_i)} κ(K_ji)`,
///
/// where `w_p` are the real ladder weights and `κ` the kernel. This never
/// forms `S`; the double sums are evaluated with running prefix sums, so
/// the cost is O(N²). It must agree with conjugating the Fock generator.
pub fn assemble_td_direct(e: &Ensemble, kernel: Kernel, gamma: f64) -> Result<GeneratorMatrix> {
    check_gamma(gamma)?;
    let n = e.len();
    let geom = e.pair_geometry();
    // G_ji = e^{−iKvec_ji} κ(K_ji)
    let g = Array2::from_shape_fn((n, n), |(j, i)| {
        C64::from_polar(1.0, -geom.phase[[j, i]]) * kernel.coupling(gamma, geom.distance[[j, i]])
    });

    // A_{j,q} = Σ_i G_ji w_q(i)
    let mut a = Array2::<C64>::zeros((n, n));
    for j in 0..n {
        let row = g.row(j);
        let mut prefix = C64::new(0.0, 0.0);
        let total: C64 = row.iter().sum();
        a[[j, 0]] = total * ladder_weight(n, 1, 1);
        for q in 2..=n {
            // prefix holds Σ_{i < q−1} G_ji (0-based atoms)
            prefix += row[q - 2];
            a[[j, q - 1]] = prefix * ladder_weight(n, q, 1) + row[q - 1] * ladder_weight(n, q, q);
        }
    }

    // T_{p,q} = Σ_j w_p(j) A_{j,q}
    let mut t = Array2::<C64>::zeros((n, n));
    for q in 0..n {
        let col = a.column(q);
        let total: C64 = col.iter().sum();
        t[[0, q]] = total * ladder_weight(n, 1, 1);
        let mut prefix = C64::new(0.0, 0.0);
        for p in 2..=n {
            prefix += col[p - 2];
            t[[p - 1, q]] = prefix * ladder_weight(n, p, 1) + col[p - 1] * ladder_weight(n, p, p);
        }
    }
    Ok(GeneratorMatrix::from_parts(t, Basis::Td, Some(kernel), gamma))
}
