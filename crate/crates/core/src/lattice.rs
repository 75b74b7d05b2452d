//! Finite-difference single-particle Hamiltonian and bound states.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::potentials::{PotentialKind, TrapParams};
use crate::tridiag;

/// Uniform lattice including both end points. The end points carry Dirichlet
/// boundary conditions: every orbital vanishes there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl Grid {
    pub const DEFAULT_X_MIN: f64 = -20.0;
    pub const DEFAULT_X_MAX: f64 = 30.0;
    pub const DEFAULT_DX: f64 = 1.0 / 400.0;

    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if n_points < 3 {
            return Err(Error::GridTooSmall(n_points));
        }
        if !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidGrid(format!("x_min = {x_min} must be below x_max = {x_max}")));
        }
        Ok(Self { x_min, x_max, n_points })
    }

    /// Grid over `[x_min, x_max]` whose spacing is as close to `dx` as the
    /// interval allows.
    pub fn with_spacing(x_min: f64, x_max: f64, dx: f64) -> Result<Self> {
        if !(dx > 0.0) {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {dx}")));
        }
        let n = ((x_max - x_min) / dx).round() as usize + 1;
        Self::new(x_min, x_max, n)
    }

    /// [−20, 30] at dx = 1/400.
    pub fn standard() -> Self {
        Self::with_spacing(Self::DEFAULT_X_MIN, Self::DEFAULT_X_MAX, Self::DEFAULT_DX).unwrap()
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.x(i))
    }

    /// Index of the grid node nearest to `x` (clamped).
    pub fn nearest_index(&self, x: f64) -> usize {
        let i = ((x - self.x_min) / self.dx()).round();
        i.clamp(0.0, (self.n_points - 1) as f64) as usize
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_min && x <= self.x_max
    }
}

/// Three-point finite-difference form of −½∂² + V (optionally −iW).
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalHamiltonian {
    pub grid: Grid,
    /// 1/dx² + V(xᵢ) at every grid node.
    pub diagonal: Vec<f64>,
    /// Uniform hopping −1/(2dx²).
    pub off_diagonal: f64,
    /// Absorbing strength W(xᵢ) ≥ 0, entering the diagonal as −iW.
    pub absorber: Option<Vec<f64>>,
}

impl TridiagonalHamiltonian {
    /// Builds the operator from sampled potential values.
    pub fn from_potential(grid: Grid, potential: impl Fn(f64) -> f64) -> Self {
        let dx = grid.dx();
        let kinetic = 1.0 / (dx * dx);
        let diagonal = grid.points().map(|x| kinetic + potential(x)).collect();
        Self { grid, diagonal, off_diagonal: -0.5 * kinetic, absorber: None }
    }

    pub fn with_absorber(mut self, w: Vec<f64>) -> Result<Self> {
        if w.len() != self.grid.n_points {
            return Err(Error::ShapeMismatch { expected: self.grid.n_points, got: w.len() });
        }
        self.absorber = Some(w);
        Ok(self)
    }

    /// Same operator without the absorbing part.
    pub fn hermitian_part(&self) -> Self {
        Self { absorber: None, ..self.clone() }
    }

    pub fn is_hermitian(&self) -> bool {
        self.absorber.as_ref().is_none_or(|w| w.iter().all(|&v| v == 0.0))
    }

    /// Complex diagonal entry including −iW.
    pub fn diagonal_entry(&self, i: usize) -> Complex64 {
        let w = self.absorber.as_ref().map_or(0.0, |w| w[i]);
        Complex64::new(self.diagonal[i], -w)
    }

    pub fn interior_diagonal(&self) -> &[f64] {
        &self.diagonal[1..self.diagonal.len() - 1]
    }
}

/// Samples the initial or quenched trap on `grid`.
pub fn discretize(p: &TrapParams, which: PotentialKind, grid: Grid) -> Result<TridiagonalHamiltonian> {
    if grid.n_points < 3 {
        return Err(Error::GridTooSmall(grid.n_points));
    }
    Ok(TridiagonalHamiltonian::from_potential(grid, |x| p.eval(which, x)))
}

/// H·φ with Dirichlet ends (the end values of the result are zero).
pub fn apply_hamiltonian(h: &TridiagonalHamiltonian, phi: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = h.grid.n_points;
    if phi.len() != n {
        return Err(Error::ShapeMismatch { expected: n, got: phi.len() });
    }
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    let t = h.off_diagonal;
    for i in 1..n - 1 {
        out[i] = h.diagonal_entry(i) * phi[i] + t * (phi[i - 1] + phi[i + 1]);
    }
    Ok(out)
}

/// Single-particle wavefunction sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Orbital {
    pub amplitudes: Vec<Complex64>,
    /// Eigenvalue at construction.
    pub energy: f64,
}

impl Orbital {
    pub fn norm_sqr(&self, grid: &Grid) -> f64 {
        trapezoid_norm_sqr(&self.amplitudes, grid.dx())
    }
}

/// Lowest-energy-first list of orbitals that defines a Slater determinant.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitalSet {
    pub grid: Grid,
    pub orbitals: Vec<Orbital>,
}

impl OrbitalSet {
    pub fn len(&self) -> usize {
        self.orbitals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbitals.is_empty()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.orbitals.iter().map(|o| o.energy).collect()
    }

    /// The first `n` orbitals.
    pub fn truncated(&self, n: usize) -> Self {
        Self { grid: self.grid, orbitals: self.orbitals[..n.min(self.len())].to_vec() }
    }
}

pub fn trapezoid_norm_sqr(phi: &[Complex64], dx: f64) -> f64 {
    let n = phi.len();
    let inner: f64 = phi.iter().map(|z| z.norm_sqr()).sum();
    dx * (inner - 0.5 * (phi[0].norm_sqr() + phi[n - 1].norm_sqr()))
}

/// Lowest `count` eigenpairs of a Hermitian Hamiltonian whose energies lie
/// below zero. Each eigenvector is normalised under the trapezoidal rule and
/// its first antinode is made positive.
pub fn bound_states(h: &TridiagonalHamiltonian, count: usize) -> Result<OrbitalSet> {
    if !h.is_hermitian() {
        return Err(Error::InvalidGrid("bound states need a Hermitian Hamiltonian".into()));
    }
    let diag = h.interior_diagonal();
    let off = h.off_diagonal;
    let available = tridiag::sturm_count(diag, off, 0.0);
    if count > available {
        return Err(Error::CapacityExceeded { requested: count, available });
    }
    let dx = h.grid.dx();
    let orbitals = (0..count)
        .map(|k| {
            let energy = tridiag::kth_eigenvalue(diag, off, k);
            let v = tridiag::inverse_iteration(diag, off, energy);
            let mut amplitudes = Vec::with_capacity(h.grid.n_points);
            amplitudes.push(Complex64::new(0.0, 0.0));
            amplitudes.extend(v.iter().map(|&x| Complex64::new(x, 0.0)));
            amplitudes.push(Complex64::new(0.0, 0.0));
            let scale = first_antinode_sign(&v) / trapezoid_norm_sqr(&amplitudes, dx).sqrt();
            amplitudes.iter_mut().for_each(|z| *z *= scale);
            Orbital { amplitudes, energy }
        })
        .collect();
    Ok(OrbitalSet { grid: h.grid, orbitals })
}

/// Number of eigenvalues of a Hermitian Hamiltonian below zero.
pub fn count_bound_states(h: &TridiagonalHamiltonian) -> usize {
    tridiag::sturm_count(h.interior_diagonal(), h.off_diagonal, 0.0)
}

fn first_antinode_sign(v: &[f64]) -> f64 {
    let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut i = v.iter().position(|x| x.abs() >= 0.5 * peak).unwrap_or(0);
    while i + 1 < v.len() && v[i + 1].abs() > v[i].abs() {
        i += 1;
    }
    if v[i] < 0.0 {
        -1.0
    } else {
        1.0
    }
}
