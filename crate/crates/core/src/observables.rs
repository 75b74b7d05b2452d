//! Multi-particle observables of a Slater determinant built from orbital
//! overlaps: non-escape and survival probabilities and the full counting
//! statistics of the number of particles inside the region.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{Grid, OrbitalSet};
use crate::linalg::CMatrix;

/// Region Δ = (−∞, cut].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionProjector {
    pub cut: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverlapKind {
    /// ⟨φₙ(t)|χ_Δ|φₖ(t)⟩
    Region,
    /// ⟨φₙ(0)|φₖ(t)⟩
    InitialVsEvolved,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OverlapMatrix {
    pub entries: CMatrix,
    pub kind: OverlapKind,
}

const HERMITIAN_TOL: f64 = 1e-10;
const IMAG_TOL: f64 = 1e-10;
const SPECTRUM_TOL: f64 = 1e-6;

impl OverlapMatrix {
    pub fn region(entries: CMatrix) -> Self {
        Self { entries, kind: OverlapKind::Region }
    }

    pub fn initial_vs_evolved(entries: CMatrix) -> Self {
        Self { entries, kind: OverlapKind::InitialVsEvolved }
    }

    pub fn dim(&self) -> usize {
        self.entries.dim()
    }

    /// Overlaps of the first `k` orbitals only.
    pub fn leading(&self, k: usize) -> Self {
        Self { entries: self.entries.leading(k), kind: self.kind }
    }
}

/// Region overlaps of a snapshot, cut snapped to the nearest grid node and
/// integrated with the trapezoidal rule.
pub fn region_overlaps(orbitals: &[Vec<Complex64>], grid: &Grid, region: &RegionProjector) -> Result<OverlapMatrix> {
    if !grid.contains(region.cut) {
        return Err(Error::CutOutsideGrid { cut: region.cut, x_min: grid.x_min, x_max: grid.x_max });
    }
    let end = grid.nearest_index(region.cut);
    let dx = grid.dx();
    let n = orbitals.len();
    let mut m = CMatrix::zeros(n);
    for i in 0..n {
        check_len(&orbitals[i], grid)?;
        for j in i..n {
            let (a, b) = (&orbitals[i][..=end], &orbitals[j][..=end]);
            let sum: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
            let ends = 0.5 * (a[0].conj() * b[0] + a[end].conj() * b[end]);
            let v = dx * (sum - ends);
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
    }
    Ok(OverlapMatrix::region(m))
}

/// ⟨φₙ(0)|φₖ(t)⟩ over the whole grid.
pub fn initial_overlaps(initial: &[Vec<Complex64>], evolved: &[Vec<Complex64>], grid: &Grid) -> Result<OverlapMatrix> {
    if initial.len() != evolved.len() {
        return Err(Error::ShapeMismatch { expected: initial.len(), got: evolved.len() });
    }
    let dx = grid.dx();
    let n = initial.len();
    let mut m = CMatrix::zeros(n);
    for i in 0..n {
        check_len(&initial[i], grid)?;
        for j in 0..n {
            check_len(&evolved[j], grid)?;
            let (a, b) = (&initial[i], &evolved[j]);
            let last = a.len() - 1;
            let sum: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
            m[(i, j)] = dx * (sum - 0.5 * (a[0].conj() * b[0] + a[last].conj() * b[last]));
        }
    }
    Ok(OverlapMatrix::initial_vs_evolved(m))
}

fn check_len(v: &[Complex64], grid: &Grid) -> Result<()> {
    if v.len() != grid.n_points {
        return Err(Error::ShapeMismatch { expected: grid.n_points, got: v.len() });
    }
    Ok(())
}

pub fn overlap_matrix_region(set: &OrbitalSet, region: &RegionProjector) -> Result<OverlapMatrix> {
    let amps: Vec<Vec<Complex64>> = set.orbitals.iter().map(|o| o.amplitudes.clone()).collect();
    region_overlaps(&amps, &set.grid, region)
}

pub fn overlap_matrix_initial(initial: &OrbitalSet, evolved: &OrbitalSet) -> Result<OverlapMatrix> {
    if initial.grid != evolved.grid {
        return Err(Error::InvalidGrid("orbital sets live on different grids".into()));
    }
    let a: Vec<Vec<Complex64>> = initial.orbitals.iter().map(|o| o.amplitudes.clone()).collect();
    let b: Vec<Vec<Complex64>> = evolved.orbitals.iter().map(|o| o.amplitudes.clone()).collect();
    initial_overlaps(&a, &b, &initial.grid)
}

fn require_region(m: &OverlapMatrix) -> Result<()> {
    if m.kind != OverlapKind::Region {
        return Err(Error::InvalidGrid("expected a region overlap matrix".into()));
    }
    let defect = m.entries.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    Ok(())
}

/// Probability that all N particles are inside the region: det M.
pub fn nonescape_prob(m: &OverlapMatrix) -> Result<f64> {
    require_region(m)?;
    let det = m.entries.det();
    if det.im.abs() > IMAG_TOL {
        return Err(Error::ComplexDeterminant(det.im));
    }
    Ok(det.re)
}

/// Probability of remaining in the initial Slater determinant: |det M|².
pub fn survival_prob(m: &OverlapMatrix) -> Result<f64> {
    if m.kind != OverlapKind::InitialVsEvolved {
        return Err(Error::InvalidGrid("expected an initial-vs-evolved overlap matrix".into()));
    }
    Ok(m.entries.det().norm_sqr())
}

/// Distribution p(0..=N) of the number of particles inside the region.
///
/// For a Slater determinant the count is a sum of independent Bernoulli
/// variables whose success probabilities are the eigenvalues λᵢ of the region
/// overlap matrix, so p(n) is the coefficient of zⁿ in Πᵢ(1 − λᵢ + λᵢz).
pub fn fcs(m: &OverlapMatrix) -> Result<Vec<f64>> {
    require_region(m)?;
    let lambdas = m.entries.hermitian_eigenvalues();
    for &l in &lambdas {
        if !(-SPECTRUM_TOL..=1.0 + SPECTRUM_TOL).contains(&l) {
            return Err(Error::Conditioning(l));
        }
    }
    Ok(poisson_binomial(&lambdas))
}

/// Poisson-binomial probabilities by sequential convolution with
/// `(1 − λ, λ)`; every update is a convex combination, so no cancellation
/// occurs for λ ∈ [0, 1].
pub fn poisson_binomial(lambdas: &[f64]) -> Vec<f64> {
    let mut p = vec![0.0; lambdas.len() + 1];
    p[0] = 1.0;
    for (k, &l) in lambdas.iter().enumerate() {
        let l = l.clamp(0.0, 1.0);
        for n in (0..=k + 1).rev() {
            let stay = if n <= k { p[n] * (1.0 - l) } else { 0.0 };
            let gain = if n > 0 { p[n - 1] * l } else { 0.0 };
            p[n] = stay + gain;
        }
    }
    p
}
