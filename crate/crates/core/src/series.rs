//! Sampled decay curves and the recorder that builds them from snapshots.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{Grid, OrbitalSet};
use crate::observables::{fcs, initial_overlaps, nonescape_prob, region_overlaps, survival_prob, RegionProjector};
use crate::propagator::{orbital_norms, Recorder};

/// Which probability a fit or threshold is applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    /// Non-escape probability P_N.
    P,
    /// Survival probability S_N.
    S,
}

impl Channel {
    pub fn name(self) -> &'static str {
        match self {
            Self::P => "P",
            Self::S => "S",
        }
    }
}

impl std::str::FromStr for Channel {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "P" | "p" => Ok(Self::P),
            "S" | "s" => Ok(Self::S),
            other => Err(format!("unknown channel '{other}' (expected P or S)")),
        }
    }
}

/// Observables of an N-particle state at the recorded sample times.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DecayTimeSeries {
    pub n_particles: usize,
    pub times: Vec<f64>,
    pub p: Vec<f64>,
    pub s: Vec<f64>,
    /// p(0..N) per sample; empty when counting statistics were not requested.
    pub fcs: Vec<Vec<f64>>,
    /// Squared norm of each of the N orbitals per sample.
    pub orbital_norms: Vec<Vec<f64>>,
}

impl DecayTimeSeries {
    pub fn new(n_particles: usize) -> Self {
        Self { n_particles, ..Default::default() }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn channel(&self, c: Channel) -> &[f64] {
        match c {
            Channel::P => &self.p,
            Channel::S => &self.s,
        }
    }

    /// Channel divided by its value at the first sample.
    pub fn normalized(&self, c: Channel) -> Vec<f64> {
        let v = self.channel(c);
        match v.first() {
            Some(&v0) if v0 > 0.0 => v.iter().map(|x| x / v0).collect(),
            _ => v.to_vec(),
        }
    }

    /// Linear interpolation of a channel at time `t`.
    pub fn value_at(&self, c: Channel, t: f64) -> Result<f64> {
        interpolate(&self.times, self.channel(c), t)
    }

    /// Appends the samples of `other` whose times lie strictly after the last
    /// sample held here.
    pub fn extend_after(&mut self, other: &DecayTimeSeries) {
        let last = self.times.last().copied().unwrap_or(f64::NEG_INFINITY);
        for i in 0..other.len() {
            if other.times[i] > last {
                self.times.push(other.times[i]);
                self.p.push(other.p[i]);
                self.s.push(other.s[i]);
                if let Some(f) = other.fcs.get(i) {
                    self.fcs.push(f.clone());
                }
                self.orbital_norms.push(other.orbital_norms[i].clone());
            }
        }
    }
}

pub(crate) fn interpolate(times: &[f64], values: &[f64], t: f64) -> Result<f64> {
    let (t0, t1) = match (times.first(), times.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(Error::OutOfRange { t, t0: f64::NAN, t1: f64::NAN }),
    };
    if !(t >= t0 && t <= t1) {
        return Err(Error::OutOfRange { t, t0, t1 });
    }
    let i = times.partition_point(|&x| x < t);
    if times[i] == t || i == 0 {
        return Ok(values[i]);
    }
    let w = (t - times[i - 1]) / (times[i] - times[i - 1]);
    Ok(values[i - 1] + w * (values[i] - values[i - 1]))
}

/// Builds one [`DecayTimeSeries`] per requested particle number from
/// snapshots of the largest orbital set. Orbitals evolve independently, so
/// the N-particle observables are those of the leading N×N overlap blocks.
/// Snapshots at or before the last recorded time are ignored, so a resumed
/// run may repeat its starting snapshot.
#[derive(Debug, Clone)]
pub struct SeriesRecorder {
    grid: Grid,
    region: RegionProjector,
    initial: Vec<Vec<Complex64>>,
    with_fcs: bool,
    pub series: Vec<DecayTimeSeries>,
}

impl SeriesRecorder {
    /// `particle_numbers` must not exceed the size of `initial`.
    pub fn new(initial: &OrbitalSet, region: RegionProjector, particle_numbers: &[usize], with_fcs: bool) -> Result<Self> {
        if let Some(&n) = particle_numbers.iter().find(|&&n| n == 0 || n > initial.len()) {
            return Err(Error::ShapeMismatch { expected: initial.len(), got: n });
        }
        Ok(Self {
            grid: initial.grid,
            region,
            initial: initial.orbitals.iter().map(|o| o.amplitudes.clone()).collect(),
            with_fcs,
            series: particle_numbers.iter().map(|&n| DecayTimeSeries::new(n)).collect(),
        })
    }

    pub fn into_series(self) -> Vec<DecayTimeSeries> {
        self.series
    }
}

impl Recorder for SeriesRecorder {
    fn record(&mut self, t: f64, orbitals: &[Vec<Complex64>]) -> Result<()> {
        if self.series.first().and_then(|s| s.times.last()).is_some_and(|&last| t <= last) {
            return Ok(());
        }
        let k = self.series.iter().map(|s| s.n_particles).max().unwrap_or(0);
        let orbitals = &orbitals[..k];
        let region = region_overlaps(orbitals, &self.grid, &self.region)?;
        let initial = initial_overlaps(&self.initial[..k], orbitals, &self.grid)?;
        let norms = orbital_norms(orbitals, self.grid.dx());
        for s in &mut self.series {
            let n = s.n_particles;
            let mr = region.leading(n);
            s.times.push(t);
            s.p.push(nonescape_prob(&mr)?);
            s.s.push(survival_prob(&initial.leading(n))?);
            if self.with_fcs {
                s.fcs.push(fcs(&mr)?);
            }
            s.orbital_norms.push(norms[..n].to_vec());
        }
        Ok(())
    }
}
