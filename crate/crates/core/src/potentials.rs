//! Trap geometry: the initial bathtub well and the quenched leaky trap.
//!
//! Everything is in dimensionless units with ħ = m = L = 1, time measured in
//! t₀ = mL²/ħ and energy in ħ/t₀.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Geometry and depth of the initial well and of the quenched barrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapParams {
    /// Well depth, also the height of the barrier above the escape shelf.
    pub v0: f64,
    /// Well width.
    pub l: f64,
    /// Barrier width.
    pub l1: f64,
    /// Smoothness of the inner walls.
    pub sigma: f64,
    /// Smoothness of the outer walls.
    pub sigma1: f64,
    /// Inner edge of the barrier; also the default region cut.
    pub a: f64,
    /// Number of levels the well is designed to hold.
    pub capacity: usize,
}

/// Which of the two potentials to sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    /// Closed symmetric well, used to prepare the orbitals.
    Initial,
    /// Well with the right wall replaced by a finite barrier (t > 0).
    Quenched,
}

impl TrapParams {
    pub const DEFAULT_L1: f64 = 0.08;
    pub const DEFAULT_SIGMA: f64 = 0.01;
    pub const DEFAULT_A: f64 = 0.55;

    /// Standard trap for a given capacity: V₀ = C²π², L₁ = 0.08, σ = σ₁ = 0.01, a = 0.55.
    pub fn from_capacity(capacity: usize) -> Result<Self> {
        let v0 = depth_from_capacity(capacity)?;
        let p = Self {
            v0,
            l: 1.0,
            l1: Self::DEFAULT_L1,
            sigma: Self::DEFAULT_SIGMA,
            sigma1: Self::DEFAULT_SIGMA,
            a: Self::DEFAULT_A,
            capacity,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("V0", self.v0),
            ("L", self.l),
            ("L1", self.l1),
            ("sigma", self.sigma),
            ("sigma1", self.sigma1),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidTrap(format!("{name} must be positive, got {value}")));
            }
        }
        if !(self.a > self.l / 2.0) {
            return Err(Error::InvalidTrap(format!(
                "cut a = {} must lie outside the well core (a > L/2 = {})",
                self.a,
                self.l / 2.0
            )));
        }
        if self.capacity == 0 {
            return Err(Error::ZeroCapacity);
        }
        Ok(())
    }

    pub fn eval(&self, kind: PotentialKind, x: f64) -> f64 {
        match kind {
            PotentialKind::Initial => eval_initial(x, self),
            PotentialKind::Quenched => eval_quenched(x, self),
        }
    }

    /// Infimum of the quenched potential (the escape shelf and the well floor).
    pub fn min_potential(&self) -> f64 {
        -self.v0
    }

    /// Jump of the quenched potential across the Heaviside seam at x = a.
    pub fn seam_jump(&self) -> f64 {
        let inner = -0.5 * self.v0 * (1.0 - ((self.a.abs() - self.l / 2.0) / self.sigma).tanh());
        let outer = -0.5 * self.v0 * (1.0 + (-0.5 * self.l1 / self.sigma1).tanh());
        inner - outer
    }
}

/// Symmetric bathtub well present before the quench.
pub fn eval_initial(x: f64, p: &TrapParams) -> f64 {
    -0.5 * p.v0 * (1.0 - ((x.abs() - p.l / 2.0) / p.sigma1).tanh())
}

/// Leaky trap after the quench. The right wall becomes a barrier of width
/// `l1` that drops onto a shelf at depth −V₀. The two branches are glued with
/// sharp step functions at `x = a`, which leaves a small jump there.
pub fn eval_quenched(x: f64, p: &TrapParams) -> f64 {
    if x <= p.a {
        -0.5 * p.v0 * (1.0 - ((x.abs() - p.l / 2.0) / p.sigma).tanh())
    } else {
        -0.5 * p.v0 * (1.0 + ((x - p.a - p.l1 / 2.0) / p.sigma1).tanh())
    }
}

/// V₀ = C²π².
pub fn depth_from_capacity(capacity: usize) -> Result<f64> {
    if capacity == 0 {
        return Err(Error::ZeroCapacity);
    }
    let c = capacity as f64;
    Ok(c * c * PI * PI)
}

/// Classical turning points of the quenched potential at energy `energy`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurningPoints {
    /// Left wall of the classically allowed well region.
    pub x0: f64,
    /// Inner edge of the forbidden barrier region.
    pub x1: f64,
    /// Outer edge of the barrier.
    pub x2: f64,
}

const BISECTION_TOL: f64 = 1e-12;

/// Locates x₀ < x₁ < x₂ with V(xᵢ) = E by a coarse scan (spacing σ/4) followed
/// by bisection. Only energies strictly between the well floor and zero are
/// accepted.
pub fn turning_points(energy: f64, p: &TrapParams) -> Result<TurningPoints> {
    let min = p.min_potential();
    if !(energy > min && energy < 0.0) {
        return Err(Error::NoTurningPoints { energy, min });
    }
    let lo = -(p.l / 2.0 + 60.0 * p.sigma.max(p.sigma1));
    let hi = p.a + p.l1 / 2.0 + 60.0 * p.sigma1;
    let step = p.sigma.min(p.sigma1) / 4.0;
    let n = ((hi - lo) / step).ceil() as usize;
    let f = |x: f64| eval_quenched(x, p) - energy;

    let mut roots = Vec::with_capacity(3);
    let mut x_prev = lo;
    let mut f_prev = f(lo);
    if f_prev <= 0.0 {
        return Err(Error::Bracketing(format!(
            "potential at the left scan edge x = {lo} does not exceed E = {energy}"
        )));
    }
    for i in 1..=n {
        let x = if i == n { hi } else { lo + i as f64 * step };
        let fx = f(x);
        if (f_prev > 0.0) != (fx > 0.0) {
            roots.push(bisect(&f, x_prev, x)?);
        }
        x_prev = x;
        f_prev = fx;
    }
    match roots.as_slice() {
        &[x0, x1, x2] => Ok(TurningPoints { x0, x1, x2 }),
        other if other.len() < 3 => Err(Error::NoTurningPoints { energy, min }),
        other => Err(Error::Bracketing(format!(
            "found {} sign changes of V - E, expected 3",
            other.len()
        ))),
    }
}

fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut f_lo = f(lo);
    if (f_lo > 0.0) == (f(hi) > 0.0) {
        return Err(Error::Bracketing(format!("no sign change on [{lo}, {hi}]")));
    }
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Conversion between the dimensionless units used internally and SI.
/// Display only; nothing in the numerics reads it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    /// Reference time mL²/ħ in seconds.
    pub t0_seconds: f64,
}

impl UnitSystem {
    const HBAR: f64 = 1.054_571_817e-34;
    const AMU: f64 = 1.660_539_066_60e-27;

    pub fn new(mass_kg: f64, length_m: f64) -> Self {
        Self { t0_seconds: mass_kg * length_m * length_m / Self::HBAR }
    }

    /// ²³Na atoms in a well of the given width.
    pub fn sodium(length_m: f64) -> Self {
        Self::new(22.989_769 * Self::AMU, length_m)
    }

    pub fn to_seconds(&self, t: f64) -> f64 {
        t * self.t0_seconds
    }
}
