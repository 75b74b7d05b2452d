//! Short-time (Zeno) analysis of the multi-particle decay.
//!
//! The survival probability of an N-particle product or (anti)symmetrised
//! state starts as 1 − (t/τ_Z)² with
//! τ_Z = {Σ Δĥ_n + 2α Σ_{n<k} |⟨φ_n|ĥ|φ_k⟩|²}^{−1/2}.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{apply_hamiltonian, OrbitalSet, TridiagonalHamiltonian};
use crate::series::interpolate;

/// Exchange symmetry of the many-body state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StatisticsKind {
    /// Polarized fermions and, equivalently, the Tonks–Girardeau gas (α = −1).
    Fermions,
    /// Distinguishable particles (α = 0).
    Distinguishable,
    /// Non-interacting bosons in distinct orbitals (α = +1).
    Bosons,
}

impl StatisticsKind {
    pub const ALL: [Self; 3] = [Self::Fermions, Self::Distinguishable, Self::Bosons];

    pub fn alpha(self) -> i32 {
        match self {
            Self::Fermions => -1,
            Self::Distinguishable => 0,
            Self::Bosons => 1,
        }
    }

    pub fn from_alpha(alpha: i32) -> Option<Self> {
        match alpha {
            -1 => Some(Self::Fermions),
            0 => Some(Self::Distinguishable),
            1 => Some(Self::Bosons),
            _ => None,
        }
    }
}

/// Single-particle ingredients of the Zeno time.
#[derive(Debug, Clone, PartialEq)]
pub struct ZenoTerms {
    /// Δĥ_n = ⟨ĥφ_n|ĥφ_n⟩ − ⟨φ_n|ĥ|φ_n⟩².
    pub variances: Vec<f64>,
    /// |⟨φ_n|ĥ|φ_k⟩|², row-major N×N with zero diagonal.
    pub offdiag_sq: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Default)]
struct Neumaier {
    sum: f64,
    c: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum + self.c
    }
}

fn inner(a: &[Complex64], b: &[Complex64], dx: f64) -> Complex64 {
    let (mut re, mut im) = (Neumaier::default(), Neumaier::default());
    for (x, y) in a.iter().zip(b) {
        let z = x.conj() * y;
        re.add(z.re);
        im.add(z.im);
    }
    Complex64::new(re.value(), im.value()) * dx
}

impl ZenoTerms {
    /// Evaluates the terms on the absorber-free quenched Hamiltonian `h` for
    /// orbitals that are eigenstates (energy ε_n) of the initial well.
    ///
    /// Everything is expressed through the residuals r_n = (ĥ − ε_n)φ_n,
    /// which vanish wherever the two potentials agree:
    /// Δĥ_n = ‖r_n‖² − (Re⟨φ_n|r_n⟩)² and ⟨φ_n|ĥ|φ_k⟩ = ⟨φ_n|r_k⟩ + ε_k⟨φ_n|φ_k⟩.
    pub fn compute(set: &OrbitalSet, h: &TridiagonalHamiltonian) -> Result<Self> {
        if !h.is_hermitian() {
            return Err(Error::InvalidGrid("Zeno time needs the Hamiltonian without absorber".into()));
        }
        if set.grid != h.grid {
            return Err(Error::InvalidGrid("orbital set and Hamiltonian live on different grids".into()));
        }
        let dx = h.grid.dx();
        let residuals = set
            .orbitals
            .iter()
            .map(|o| {
                let mut r = apply_hamiltonian(h, &o.amplitudes)?;
                r.iter_mut().zip(&o.amplitudes).for_each(|(r, p)| *r -= o.energy * p);
                Ok(r)
            })
            .collect::<Result<Vec<_>>>()?;
        let n = set.len();
        let mut variances = Vec::with_capacity(n);
        let mut offdiag_sq = vec![0.0; n * n];
        for i in 0..n {
            let phi = &set.orbitals[i].amplitudes;
            let shift = inner(phi, &residuals[i], dx).re;
            variances.push(inner(&residuals[i], &residuals[i], dx).re - shift * shift);
            for j in (i + 1)..n {
                let hij = inner(phi, &residuals[j], dx)
                    + set.orbitals[j].energy * inner(phi, &set.orbitals[j].amplitudes, dx);
                offdiag_sq[i * n + j] = hij.norm_sqr();
                offdiag_sq[j * n + i] = hij.norm_sqr();
            }
        }
        Ok(Self { variances, offdiag_sq })
    }

    pub fn len(&self) -> usize {
        self.variances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variances.is_empty()
    }

    /// Σ_{n<k≤N} |⟨φ_n|ĥ|φ_k⟩|² over the first `n_particles` orbitals.
    pub fn offdiag_sum(&self, n_particles: usize) -> f64 {
        let n = self.len();
        let mut acc = Neumaier::default();
        for i in 0..n_particles {
            for j in (i + 1)..n_particles {
                acc.add(self.offdiag_sq[i * n + j]);
            }
        }
        acc.value()
    }

    /// The bracket Σ Δĥ_n + 2α Σ_{n<k} |ĥ_nk|² for the first `n_particles`.
    pub fn bracket(&self, n_particles: usize, stats: StatisticsKind) -> f64 {
        let mut acc = Neumaier::default();
        self.variances[..n_particles].iter().for_each(|&v| acc.add(v));
        acc.add(2.0 * f64::from(stats.alpha()) * self.offdiag_sum(n_particles));
        acc.value()
    }

    /// τ_Z of the state built from the first `n_particles` orbitals.
    pub fn zeno_time(&self, n_particles: usize, stats: StatisticsKind) -> Result<f64> {
        if n_particles > self.len() {
            return Err(Error::ShapeMismatch { expected: self.len(), got: n_particles });
        }
        let b = self.bracket(n_particles, stats);
        if !(b > 0.0) {
            return Err(Error::NonPositiveBracket(b));
        }
        Ok(b.powf(-0.5))
    }
}

/// τ_Z of the full orbital set.
pub fn zeno_time(set: &OrbitalSet, h: &TridiagonalHamiltonian, stats: StatisticsKind) -> Result<f64> {
    ZenoTerms::compute(set, h)?.zeno_time(set.len(), stats)
}

/// Fewest samples accepted by [`parabola_fit`].
pub const MIN_FIT_SAMPLES: usize = 10;
const MONOTONE_TOL: f64 = 1e-12;

/// Least-squares fit of 1 − (t/τ)² to `values` over samples with
/// t ∈ [t_lo, t_hi]. `values` should start at 1 (normalise first).
pub fn parabola_fit(times: &[f64], values: &[f64], window: (f64, f64)) -> Result<f64> {
    let idx: Vec<usize> = (0..times.len()).filter(|&i| times[i] >= window.0 && times[i] <= window.1).collect();
    if idx.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientSamples { needed: MIN_FIT_SAMPLES, got: idx.len() });
    }
    for w in idx.windows(2) {
        if values[w[1]] > values[w[0]] + MONOTONE_TOL {
            return Err(Error::IncreasingChannel);
        }
    }
    if let Some(&i) = idx.iter().find(|&&i| values[i] <= 0.5) {
        return Err(Error::ChannelTooLow(values[i]));
    }
    let (mut num, mut den) = (0.0, 0.0);
    for &i in &idx {
        let t2 = times[i] * times[i];
        num += t2 * (1.0 - values[i]);
        den += t2 * t2;
    }
    let u = num / den;
    if !(u > 0.0) {
        return Err(Error::NonPositive("fitted curvature"));
    }
    Ok(u.powf(-0.5))
}

/// End of the interval over which the deficit 1 − value stays quadratic: the
/// last sample before (1 − value)/t² departs from its earliest value by more
/// than `rel_tol`.
pub fn quadratic_window(times: &[f64], values: &[f64], rel_tol: f64) -> Result<f64> {
    let mut reference = None;
    let mut end = None;
    for (&t, &v) in times.iter().zip(values) {
        if t <= 0.0 {
            continue;
        }
        let u = (1.0 - v) / (t * t);
        match reference {
            None if u > 0.0 => reference = Some(u),
            None => return Err(Error::NonPositive("initial deficit")),
            Some(r) if ((u - r) / r).abs() > rel_tol => break,
            Some(_) => {}
        }
        end = Some(t);
    }
    end.ok_or(Error::InsufficientSamples { needed: MIN_FIT_SAMPLES, got: 0 })
}

/// Outcome of the transition-time search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TransitionTime {
    Found(f64),
    /// The quadratic model held up to the last sample.
    NotFound { t_end: f64 },
}

impl TransitionTime {
    pub fn time(self) -> Option<f64> {
        match self {
            Self::Found(t) => Some(t),
            Self::NotFound { .. } => None,
        }
    }
}

/// First sample at which |1 − (t/τ)² − value| exceeds `epsilon` times the
/// deficit 1 − value. Samples with zero deficit are skipped.
pub fn transition_time(times: &[f64], values: &[f64], tau: f64, epsilon: f64) -> Result<TransitionTime> {
    if !(tau > 0.0) {
        return Err(Error::NonPositive("tau_z"));
    }
    for (&t, &v) in times.iter().zip(values) {
        let deficit = 1.0 - v;
        if t <= 0.0 || deficit == 0.0 {
            continue;
        }
        let model = 1.0 - (t / tau) * (t / tau);
        if ((model - v) / deficit).abs() > epsilon {
            return Ok(TransitionTime::Found(t));
        }
    }
    Ok(TransitionTime::NotFound { t_end: times.last().copied().unwrap_or(0.0) })
}

/// τ_q = τ_Z²Γ, the time by which the exponential regime sets in, and the
/// effective rate γ = τ/τ_Z² under repeated checks at interval τ.
pub fn derived_timescales(tau_z: f64, gamma: f64, tau_meas: f64) -> Result<(f64, f64)> {
    if !(tau_z > 0.0) {
        return Err(Error::NonPositive("tau_z"));
    }
    if !(gamma > 0.0) {
        return Err(Error::NonPositive("Gamma"));
    }
    if !(tau_meas > 0.0) {
        return Err(Error::NonPositive("tau_meas"));
    }
    Ok((tau_z * tau_z * gamma, tau_meas / (tau_z * tau_z)))
}

/// Channel at `t_q` relative to its value at the first sample.
pub fn fidelity_at_tq(times: &[f64], values: &[f64], t_q: f64) -> Result<f64> {
    let v = interpolate(times, values, t_q)?;
    Ok(v / values[0])
}

/// Zeno-regime summary of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ZenoReport {
    pub n_particles: usize,
    pub stats: StatisticsKind,
    pub tau_z_analytic: f64,
    pub tau_z_fit: Option<f64>,
    pub fit_window: Option<(f64, f64)>,
    pub t_q: Option<f64>,
    pub tau_q_estimate: Option<f64>,
    pub fidelity_at_tq: Option<f64>,
    pub per_orbital_variances: Vec<f64>,
    pub offdiag_sum: f64,
}
