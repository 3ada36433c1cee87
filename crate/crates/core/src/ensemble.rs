//! Atomic geometries and the pairwise quantities derived from them.
//!
//! Positions are in units of `1/k₀`. The atom order fixed at construction is
//! significant: the ladder timed-Dicke states are built on "the first m
//! atoms", so every constructor documents its ordering.

use std::cmp::Ordering;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::C64;

pub type Vec3 = [f64; 3];

fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn dist(a: &Vec3, b: &Vec3) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    dot(&d, &d).sqrt()
}

/// An immutable set of atom positions with a driving wavevector and an
/// optional partition into sections.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    positions: Vec<Vec3>,
    k0: Vec3,
    sections: Option<Vec<usize>>,
}

/// Pair matrices `K_ji = k₀|r_j − r_i|` and `Kvec_ji = k₀·(r_j − r_i)`.
#[derive(Debug, Clone)]
pub struct PairGeometry {
    pub distance: Array2<f64>,
    pub phase: Array2<f64>,
}

impl Ensemble {
    /// Validates and wraps an explicit list of positions.
    ///
    /// Rejects empty ensembles, non-finite coordinates, a zero wavevector and
    /// coincident atoms (the exponential kernel is singular at `r = 0`).
    pub fn new(positions: Vec<Vec3>, k0: Vec3) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::InvalidArgument("ensemble needs at least one atom".into()));
        }
        if positions.iter().flatten().chain(&k0).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("ensemble coordinates"));
        }
        if dot(&k0, &k0) <= 0.0 {
            return Err(Error::InvalidArgument("k0 must be non-zero".into()));
        }
        for (j, a) in positions.iter().enumerate() {
            for (i, b) in positions.iter().enumerate().skip(j + 1) {
                if dist(a, b) <= 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "atoms {j} and {i} coincide at {a:?}"
                    )));
                }
            }
        }
        Ok(Self {
            positions,
            k0,
            sections: None,
        })
    }

    /// `n` atoms at `j·spacing·x̂`, `j = 0..n`, in that order.
    pub fn line(n: usize, spacing: f64, k0: Vec3) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("line needs n >= 1".into()));
        }
        if !spacing.is_finite() || spacing <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "line spacing must be positive, got {spacing}"
            )));
        }
        let positions = (0..n).map(|j| [j as f64 * spacing, 0.0, 0.0]).collect();
        Self::new(positions, k0)
    }

    /// Simple-cubic lattice points `spacing·(i,j,k)` inside a sphere of the
    /// given radius centred on a lattice site.
    ///
    /// Points are ordered by `(i²+j²+k², i, j, k)`, i.e. shell by shell from
    /// the centre outwards. With `target_count` the list is truncated in that
    /// same order, which drops the outermost points first.
    pub fn sphere_lattice(
        radius: f64,
        spacing: f64,
        k0: Vec3,
        target_count: Option<usize>,
    ) -> Result<Self> {
        if !radius.is_finite() || radius <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "sphere radius must be positive, got {radius}"
            )));
        }
        if !spacing.is_finite() || spacing <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "lattice spacing must be positive, got {spacing}"
            )));
        }
        let mut sites = sphere_sites(radius / spacing);
        if let Some(target) = target_count {
            if target == 0 {
                return Err(Error::InvalidArgument("target_count must be >= 1".into()));
            }
            if target > sites.len() {
                return Err(Error::InfeasibleCount {
                    requested: target,
                    available: sites.len(),
                });
            }
            sites.truncate(target);
        }
        let positions = sites
            .into_iter()
            .map(|[i, j, k]| [i as f64 * spacing, j as f64 * spacing, k as f64 * spacing])
            .collect();
        Self::new(positions, k0)
    }

    /// Splits the atoms into `m` contiguous groups along `k0`.
    ///
    /// Atoms are ranked by their projection on `k0` (ties by coordinates);
    /// group sizes differ by at most one, larger groups first. Atom order is
    /// unchanged, only the labels are added.
    pub fn partition_sections(&self, m: usize) -> Result<Self> {
        let n = self.len();
        if m == 0 || m > n {
            return Err(Error::InvalidArgument(format!(
                "cannot split {n} atoms into {m} sections"
            )));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            let pa = &self.positions[a];
            let pb = &self.positions[b];
            dot(pa, &self.k0)
                .total_cmp(&dot(pb, &self.k0))
                .then_with(|| cmp_coords(pa, pb))
        });
        let mut labels = vec![0; n];
        let (base, extra) = (n / m, n % m);
        let mut cursor = 0;
        for s in 0..m {
            let size = base + usize::from(s < extra);
            for &atom in &order[cursor..cursor + size] {
                labels[atom] = s;
            }
            cursor += size;
        }
        Ok(Self {
            sections: Some(labels),
            ..self.clone()
        })
    }

    /// Same atoms in a new order: atom `j` of the result is atom `perm[j]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.len();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidArgument("not a permutation of the atoms".into()));
        }
        Ok(Self {
            positions: perm.iter().map(|&p| self.positions[p]).collect(),
            k0: self.k0,
            sections: self
                .sections
                .as_ref()
                .map(|s| perm.iter().map(|&p| s[p]).collect()),
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn k0(&self) -> Vec3 {
        self.k0
    }

    /// `|k0|`.
    pub fn wavenumber(&self) -> f64 {
        dot(&self.k0, &self.k0).sqrt()
    }

    pub fn sections(&self) -> Option<&[usize]> {
        self.sections.as_deref()
    }

    pub fn section_count(&self) -> Option<usize> {
        self.sections
            .as_ref()
            .map(|s| s.iter().copied().max().map_or(0, |m| m + 1))
    }

    /// Timing phases `e^{i k0·r_j}`.
    pub fn phases(&self) -> Vec<C64> {
        self.positions
            .iter()
            .map(|r| C64::from_polar(1.0, dot(&self.k0, r)))
            .collect()
    }

    /// Smallest pairwise distance; `None` for a single atom.
    pub fn min_pair_distance(&self) -> Option<f64> {
        let mut best: Option<f64> = None;
        for (j, a) in self.positions.iter().enumerate() {
            for b in &self.positions[j + 1..] {
                let d = dist(a, b);
                best = Some(best.map_or(d, |m| m.min(d)));
            }
        }
        best
    }

    pub fn pair_geometry(&self) -> PairGeometry {
        let n = self.len();
        let k = self.wavenumber();
        let mut distance = Array2::zeros((n, n));
        let mut phase = Array2::zeros((n, n));
        for j in 0..n {
            for i in (j + 1)..n {
                let rj = &self.positions[j];
                let ri = &self.positions[i];
                let d = k * dist(rj, ri);
                let p = dot(&self.k0, &[rj[0] - ri[0], rj[1] - ri[1], rj[2] - ri[2]]);
                distance[[j, i]] = d;
                distance[[i, j]] = d;
                phase[[j, i]] = p;
                phase[[i, j]] = -p;
            }
        }
        PairGeometry { distance, phase }
    }
}

fn cmp_coords(a: &Vec3, b: &Vec3) -> Ordering {
    a[0].total_cmp(&b[0])
        .then_with(|| a[1].total_cmp(&b[1]))
        .then_with(|| a[2].total_cmp(&b[2]))
}

/// Integer sites with `i²+j²+k² ≤ ratio²`, sorted by `(norm², i, j, k)`.
fn sphere_sites(ratio: f64) -> Vec<[i64; 3]> {
    // Relative slack so radii that land exactly on a shell include it.
    let limit = ratio * ratio * (1.0 + 1e-12);
    let reach = ratio.floor() as i64;
    let mut sites = Vec::new();
    for i in -reach..=reach {
        for j in -reach..=reach {
            for k in -reach..=reach {
                if ((i * i + j * j + k * k) as f64) <= limit {
                    sites.push([i, j, k]);
                }
            }
        }
    }
    sites.sort_by_key(|&[i, j, k]| (i * i + j * j + k * k, i, j, k));
    sites
}

/// Smallest radius (in the same units as `spacing`) whose centred cubic
/// lattice sphere holds at least `count` sites. The radius lands exactly on
/// a shell, so the sphere contains the whole shell.
pub fn lattice_radius_for_count(spacing: f64, count: usize) -> f64 {
    let mut shells = std::collections::BTreeMap::<i64, usize>::new();
    let mut reach = 1i64;
    loop {
        shells.clear();
        for i in -reach..=reach {
            for j in -reach..=reach {
                for k in -reach..=reach {
                    *shells.entry(i * i + j * j + k * k).or_default() += 1;
                }
            }
        }
        // Shells with norm² ≤ reach² are complete inside the cube.
        let mut total = 0;
        for (&norm2, &c) in shells.range(..=reach * reach) {
            total += c;
            if total >= count {
                return spacing * (norm2 as f64).sqrt();
            }
        }
        reach += 1;
    }
}
