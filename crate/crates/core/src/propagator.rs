//! Crank–Nicolson propagation of independent orbitals.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{trapezoid_norm_sqr, Orbital, OrbitalSet, TridiagonalHamiltonian};

/// Time grid of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub dt: f64,
    pub t_end: f64,
    /// Steps between two recorded samples.
    pub sample_every: usize,
    pub reference: EnergyReference,
}

/// Constant subtracted from H while propagating each orbital.
///
/// Orbitals evolve independently, so each may carry its own shift: this
/// multiplies orbital n by a pure phase e^{iE_n t}, which cancels in every
/// observable (|det|, and the spectrum of D†MD for diagonal unitary D).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum EnergyReference {
    /// Propagate under H itself.
    Zero,
    /// Shift orbital n by its own initial eigenvalue.
    #[default]
    PerOrbital,
    Fixed(f64),
}

impl EnergyReference {
    /// Shift applied to each orbital of `set`.
    pub fn resolve(&self, set: &OrbitalSet) -> Vec<f64> {
        match *self {
            Self::Zero => vec![0.0; set.len()],
            Self::Fixed(e) => vec![e; set.len()],
            Self::PerOrbital => set.energies(),
        }
    }
}

impl Schedule {
    /// Step for a C = 8 trap; scaled by 1/V₀ for other depths.
    pub const REFERENCE_DT: f64 = 2e-5;
    pub const TARGET_SAMPLES: usize = 2000;

    pub fn new(dt: f64, t_end: f64, sample_every: usize) -> Result<Self> {
        let s = Self { dt, t_end, sample_every, reference: EnergyReference::default() };
        s.validate()?;
        Ok(s)
    }

    pub fn with_reference(mut self, reference: EnergyReference) -> Self {
        self.reference = reference;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidSchedule(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0) {
            return Err(Error::InvalidSchedule(format!("t_end must be non-negative, got {}", self.t_end)));
        }
        if self.t_end > 0.0 && self.t_end < self.dt {
            return Err(Error::InvalidSchedule(format!(
                "t_end = {} is shorter than one step dt = {}",
                self.t_end, self.dt
            )));
        }
        if self.sample_every == 0 {
            return Err(Error::InvalidSchedule("sample_every must be at least 1".into()));
        }
        Ok(())
    }

    pub fn total_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    /// Step indices at which observables are recorded, always including 0 and
    /// the final step.
    pub fn sample_steps(&self) -> Vec<usize> {
        let total = self.total_steps();
        let mut steps = vec![0];
        let mut k = self.sample_every;
        while k <= total {
            steps.push(k);
            k = k.saturating_add(self.sample_every);
        }
        if *steps.last().unwrap() != total {
            steps.push(total);
        }
        steps
    }
}

/// Pre-factorised Crank–Nicolson update (1 + iHΔt/2)ψ' = (1 − iHΔt/2)ψ.
///
/// The left-hand matrix is constant, so its Thomas elimination coefficients
/// are computed once; each step is then a single fused forward sweep (which
/// also forms the right-hand side) and one back substitution.
#[derive(Debug, Clone)]
pub struct CnStepper {
    dt: f64,
    /// Diagonal of 1 − iHΔt/2 on the interior nodes.
    rhs_diag: Vec<Complex64>,
    /// Off-diagonal of 1 + iHΔt/2 (that of 1 − iHΔt/2 is its negative).
    lhs_off: Complex64,
    c_prime: Vec<Complex64>,
    inv_den: Vec<Complex64>,
}

impl CnStepper {
    pub fn new(h: &TridiagonalHamiltonian, dt: f64) -> Result<Self> {
        Self::with_reference(h, dt, 0.0)
    }

    /// Propagates under H − e_ref instead of H. Observables built from
    /// |det| or from Hermitian overlap blocks are unchanged by the constant
    /// shift, while the Cayley-transform distortion (growing with |E·Δt|) is
    /// minimised for states near `e_ref`.
    pub fn with_reference(h: &TridiagonalHamiltonian, dt: f64, e_ref: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::InvalidSchedule(format!("dt must be positive, got {dt}")));
        }
        let n = h.grid.n_points;
        let m = n - 2;
        let half = Complex64::new(0.0, 0.5 * dt);
        let lhs_off = half * h.off_diagonal;
        let mut rhs_diag = Vec::with_capacity(m);
        let mut c_prime = Vec::with_capacity(m);
        let mut inv_den = Vec::with_capacity(m);
        let mut prev_c = Complex64::new(0.0, 0.0);
        for i in 0..m {
            let a = Complex64::new(1.0, 0.0) + half * (h.diagonal_entry(i + 1) - e_ref);
            rhs_diag.push(Complex64::new(2.0, 0.0) - a);
            let den = a - lhs_off * prev_c;
            if den.norm() < 1e-300 {
                return Err(Error::ZeroPivot(i + 1));
            }
            let inv = den.inv();
            prev_c = lhs_off * inv;
            c_prime.push(prev_c);
            inv_den.push(inv);
        }
        Ok(Self { dt, rhs_diag, lhs_off, c_prime, inv_den })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advances `psi` (full grid, zero at both ends) by one step. `scratch`
    /// must hold `psi.len()` elements.
    pub fn step(&self, psi: &mut [Complex64], scratch: &mut [Complex64]) {
        let m = self.rhs_diag.len();
        debug_assert_eq!(psi.len(), m + 2);
        let b_off = -self.lhs_off;
        // Forward sweep: scratch[i] holds d'_i for interior node i + 1.
        let mut prev = Complex64::new(0.0, 0.0);
        for i in 0..m {
            let r = self.rhs_diag[i] * psi[i + 1] + b_off * (psi[i] + psi[i + 2]);
            prev = r * self.inv_den[i] - self.c_prime[i] * prev;
            scratch[i] = prev;
        }
        let mut next = Complex64::new(0.0, 0.0);
        for i in (0..m).rev() {
            next = scratch[i] - self.c_prime[i] * next;
            psi[i + 1] = next;
        }
        psi[0] = Complex64::new(0.0, 0.0);
        psi[m + 1] = Complex64::new(0.0, 0.0);
    }
}

type StepState = (CnStepper, Vec<Complex64>, Vec<Complex64>);

/// Two independent steps interleaved. The sweeps are latency-bound
/// recurrences, so running two chains side by side keeps the FPU busier.
/// Bitwise identical to calling `step` on each.
fn step_pair(x: &mut StepState, y: &mut StepState) {
    let (a, pa, sa) = x;
    let (b, pb, sb) = y;
    let m = a.rhs_diag.len();
    debug_assert_eq!(b.rhs_diag.len(), m);
    let (ba, bb) = (-a.lhs_off, -b.lhs_off);
    let zero = Complex64::new(0.0, 0.0);
    let (mut prev_a, mut prev_b) = (zero, zero);
    for i in 0..m {
        let ra = a.rhs_diag[i] * pa[i + 1] + ba * (pa[i] + pa[i + 2]);
        let rb = b.rhs_diag[i] * pb[i + 1] + bb * (pb[i] + pb[i + 2]);
        prev_a = ra * a.inv_den[i] - a.c_prime[i] * prev_a;
        prev_b = rb * b.inv_den[i] - b.c_prime[i] * prev_b;
        sa[i] = prev_a;
        sb[i] = prev_b;
    }
    let (mut next_a, mut next_b) = (zero, zero);
    for i in (0..m).rev() {
        next_a = sa[i] - a.c_prime[i] * next_a;
        next_b = sb[i] - b.c_prime[i] * next_b;
        pa[i + 1] = next_a;
        pb[i + 1] = next_b;
    }
    for p in [pa, pb] {
        p[0] = zero;
        p[m + 1] = zero;
    }
}

/// One Crank–Nicolson step of a single orbital.
pub fn cn_step(h: &TridiagonalHamiltonian, phi: &[Complex64], dt: f64) -> Result<Vec<Complex64>> {
    if phi.len() != h.grid.n_points {
        return Err(Error::ShapeMismatch { expected: h.grid.n_points, got: phi.len() });
    }
    let stepper = CnStepper::new(h, dt)?;
    let mut out = phi.to_vec();
    let mut scratch = vec![Complex64::new(0.0, 0.0); phi.len()];
    stepper.step(&mut out, &mut scratch);
    Ok(out)
}

/// Receives orbital snapshots at the sample times of a run.
pub trait Recorder {
    fn record(&mut self, t: f64, orbitals: &[Vec<Complex64>]) -> Result<()>;
}

impl<F> Recorder for F
where
    F: FnMut(f64, &[Vec<Complex64>]) -> Result<()>,
{
    fn record(&mut self, t: f64, orbitals: &[Vec<Complex64>]) -> Result<()> {
        self(t, orbitals)
    }
}

/// Advances every orbital of `set` under `h` in lockstep and hands snapshots
/// to `recorder` at the schedule's sample steps. Orbitals are independent and
/// are stepped in parallel; results do not depend on the thread count.
///
/// Returns the orbitals at `t_end`, keeping their initial energies so that a
/// follow-up run uses the same per-orbital reference.
pub fn evolve<R: Recorder>(
    set: &OrbitalSet,
    h: &TridiagonalHamiltonian,
    schedule: &Schedule,
    recorder: &mut R,
) -> Result<OrbitalSet> {
    schedule.validate()?;
    if set.grid != h.grid {
        return Err(Error::InvalidGrid("orbital set and Hamiltonian live on different grids".into()));
    }
    let n = h.grid.n_points;
    let mut states: Vec<StepState> = Vec::with_capacity(set.len());
    for (o, e_ref) in set.orbitals.iter().zip(schedule.reference.resolve(set)) {
        let stepper = CnStepper::with_reference(h, schedule.dt, e_ref)?;
        states.push((stepper, o.amplitudes.clone(), vec![Complex64::new(0.0, 0.0); n]));
    }
    let mut done = 0usize;
    let mut snapshot: Vec<Vec<Complex64>> = Vec::with_capacity(states.len());
    for target in schedule.sample_steps() {
        let todo = target - done;
        if todo > 0 {
            states.par_chunks_mut(2).for_each(|chunk| match chunk {
                [x, y] => (0..todo).for_each(|_| step_pair(x, y)),
                [(stepper, psi, scratch)] => (0..todo).for_each(|_| stepper.step(psi, scratch)),
                _ => unreachable!(),
            });
            done = target;
        }
        snapshot.clear();
        snapshot.extend(states.iter().map(|(_, psi, _)| psi.clone()));
        recorder.record(done as f64 * schedule.dt, &snapshot)?;
    }
    let orbitals = set
        .orbitals
        .iter()
        .zip(states)
        .map(|(o, (_, amplitudes, _))| Orbital { amplitudes, energy: o.energy })
        .collect();
    Ok(OrbitalSet { grid: set.grid, orbitals })
}

/// Squared norms of a snapshot of orbitals.
pub fn orbital_norms(orbitals: &[Vec<Complex64>], dx: f64) -> Vec<f64> {
    orbitals.iter().map(|psi| trapezoid_norm_sqr(psi, dx)).collect()
}
