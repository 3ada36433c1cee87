//! Timed-Dicke states and the unitary map between Fock and timed-Dicke
//! amplitudes.
//!
//! TD basis labels are 1-based: label 1 is the symmetric state `|+⟩`,
//! labels `m = 2..=N` are the ladder states `|m⟩` (label 2 is `|−⟩`).
//! Storage index is `label − 1`.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2};

use crate::ensemble::Ensemble;
use crate::error::{Error, Result};
use crate::kernel::GeneratorMatrix;
use crate::linalg::{adjoint, matmul, matvec, norm_sqr};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    Fock,
    Td,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::Fock => "fock",
            Basis::Td => "td",
        })
    }
}

impl FromStr for Basis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fock" => Ok(Basis::Fock),
            "td" => Ok(Basis::Td),
            other => Err(Error::InvalidArgument(format!("unknown basis `{other}`"))),
        }
    }
}

/// Single-excitation amplitudes at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeState {
    amplitudes: Array1<C64>,
    basis: Basis,
}

impl AmplitudeState {
    pub fn new(amplitudes: Array1<C64>, basis: Basis) -> Result<Self> {
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("amplitude state"));
        }
        Ok(Self { amplitudes, basis })
    }

    /// Standard basis vector at `label` (1-based).
    pub fn unit(n: usize, label: usize, basis: Basis) -> Result<Self> {
        check_label(label, n)?;
        let mut v = Array1::zeros(n);
        v[label - 1] = C64::new(1.0, 0.0);
        Ok(Self {
            amplitudes: v,
            basis,
        })
    }

    pub(crate) fn from_parts(amplitudes: Array1<C64>, basis: Basis) -> Self {
        Self { amplitudes, basis }
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Array1<C64> {
        self.amplitudes
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// Total excitation `Σ|β_j|²`.
    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(self.amplitudes.view())
    }

    /// Population `|β_label|²` (1-based).
    pub fn population(&self, label: usize) -> Result<f64> {
        check_label(label, self.len())?;
        Ok(self.amplitudes[label - 1].norm_sqr())
    }
}

pub(crate) fn check_label(label: usize, n: usize) -> Result<()> {
    if label == 0 || label > n {
        Err(Error::IndexOutOfRange { index: label, len: n })
    } else {
        Ok(())
    }
}

/// Real weights of TD basis state `label` on atom `atom` (both 1-based),
/// without the timing phase.
///
/// Symmetric state: `1/√N` everywhere. Ladder state `m`: `1/√(m(m−1))` on
/// atoms `1..m−1`, `−(m−1)/√(m(m−1))` on atom `m`, zero beyond.
pub(crate) fn ladder_weight(n: usize, label: usize, atom: usize) -> f64 {
    if label == 1 {
        return 1.0 / (n as f64).sqrt();
    }
    let m = label as f64;
    let norm = (m * (m - 1.0)).sqrt();
    match atom.cmp(&label) {
        std::cmp::Ordering::Less => 1.0 / norm,
        std::cmp::Ordering::Equal => -(m - 1.0) / norm,
        std::cmp::Ordering::Greater => 0.0,
    }
}

/// Fock coefficients of the symmetric timed-Dicke state,
/// `e^{i k0·r_j}/√N`.
pub fn plus_state(e: &Ensemble) -> AmplitudeState {
    let n = e.len();
    let scale = 1.0 / (n as f64).sqrt();
    let v = e.phases().into_iter().map(|p| p * scale).collect();
    AmplitudeState::from_parts(v, Basis::Fock)
}

/// Fock coefficients of the ladder state `|m⟩`, built on the first `m` atoms.
pub fn ladder_state(e: &Ensemble, m: usize) -> Result<AmplitudeState> {
    let n = e.len();
    if m < 2 || m > n {
        return Err(Error::InvalidArgument(format!(
            "ladder index {m} outside 2..={n}"
        )));
    }
    let phases = e.phases();
    let v = (1..=n)
        .map(|atom| phases[atom - 1] * ladder_weight(n, m, atom))
        .collect();
    Ok(AmplitudeState::from_parts(v, Basis::Fock))
}

/// Ladder pattern over section-symmetric blocks:
/// `[Σ_{s<m} |+⟩_s − (m−1)|+⟩_m] / √(m(m−1))`, where `|+⟩_s` is the timed
/// symmetric state restricted to section `s` (sections counted from 1 here).
pub fn section_state(e: &Ensemble, m: usize) -> Result<AmplitudeState> {
    let sections = e
        .sections()
        .ok_or_else(|| Error::InvalidState("ensemble has no sections".into()))?;
    let count = e.section_count().unwrap_or(0);
    if m < 2 || m > count {
        return Err(Error::InvalidArgument(format!(
            "section state index {m} outside 2..={count}"
        )));
    }
    let mut sizes = vec![0usize; count];
    for &s in sections {
        sizes[s] += 1;
    }
    let mf = m as f64;
    let norm = (mf * (mf - 1.0)).sqrt();
    let v = e
        .phases()
        .into_iter()
        .zip(sections)
        .map(|(phase, &s)| {
            let block = phase / (sizes[s] as f64).sqrt();
            match (s + 1).cmp(&m) {
                std::cmp::Ordering::Less => block / norm,
                std::cmp::Ordering::Equal => block * (-(mf - 1.0) / norm),
                std::cmp::Ordering::Greater => C64::new(0.0, 0.0),
            }
        })
        .collect();
    Ok(AmplitudeState::from_parts(v, Basis::Fock))
}

/// Unitary `S` with `β_td = S β_fock`. Row `label − 1` holds the conjugated
/// Fock coefficients of TD basis state `label`.
#[derive(Debug, Clone)]
pub struct TdTransform {
    s: Array2<C64>,
}

impl TdTransform {
    pub fn new(e: &Ensemble) -> Self {
        let n = e.len();
        let phases = e.phases();
        let s = Array2::from_shape_fn((n, n), |(row, col)| {
            phases[col].conj() * ladder_weight(n, row + 1, col + 1)
        });
        Self { s }
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.s
    }

    pub fn dim(&self) -> usize {
        self.s.nrows()
    }

    /// `⟨label|β_fock⟩`, one row of `S` applied to a Fock vector.
    pub fn td_component(&self, label: usize, fock: &Array1<C64>) -> C64 {
        self.s
            .row(label - 1)
            .iter()
            .zip(fock)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn to_td(&self, state: &AmplitudeState) -> Result<AmplitudeState> {
        self.check(state, Basis::Fock)?;
        Ok(AmplitudeState::from_parts(
            matvec(self.s.view(), state.amplitudes.view()),
            Basis::Td,
        ))
    }

    pub fn to_fock(&self, state: &AmplitudeState) -> Result<AmplitudeState> {
        self.check(state, Basis::Td)?;
        let n = self.dim();
        // S† β without materialising the adjoint
        let mut out = Array1::<C64>::zeros(n);
        for (row, &b) in self.s.rows().into_iter().zip(state.amplitudes.iter()) {
            for (o, s) in out.iter_mut().zip(row) {
                *o += s.conj() * b;
            }
        }
        Ok(AmplitudeState::from_parts(out, Basis::Fock))
    }

    /// `S M S†` for a Fock-basis generator (`S⁻¹ = S†`).
    pub fn transform_generator(&self, m: &GeneratorMatrix) -> Result<GeneratorMatrix> {
        if m.basis() != Basis::Fock {
            return Err(Error::BasisMismatch {
                expected: Basis::Fock,
                found: m.basis(),
            });
        }
        if m.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: m.dim(),
            });
        }
        let sm = matmul(self.s.view(), m.entries().view());
        let entries = matmul(sm.view(), adjoint(self.s.view()).view());
        Ok(GeneratorMatrix::from_parts(entries, Basis::Td, m.kernel(), m.gamma()))
    }

    fn check(&self, state: &AmplitudeState, expected: Basis) -> Result<()> {
        if state.basis != expected {
            return Err(Error::BasisMismatch {
                expected,
                found: state.basis,
            });
        }
        if state.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: state.len(),
            });
        }
        Ok(())
    }
}
