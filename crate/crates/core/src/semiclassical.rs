//! WKB tunneling rates of the initial-well levels through the quenched barrier.
//!
//! Each level k contributes a rate 2γ_k = T(E_k)/τ_k: the transmission per
//! wall impact times the number of impacts per unit time. The many-body rate
//! of the N-particle Fock state is Γ = 2 Σ γ_k.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use log::warn;

use crate::error::{Error, Result};
use crate::potentials::{eval_quenched, turning_points, TrapParams};

/// Composite Gauss–Legendre rule applied after the substitution
/// x = x_turn ± u², which turns the √ and 1/√ endpoint behaviour of the WKB
/// integrands into smooth functions of u.
#[derive(Debug, Clone)]
pub struct Quadrature {
    rule: GaussLegendre,
    order: usize,
    panels: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self::new(12, 48)
    }
}

impl Quadrature {
    /// `order` nodes per panel, `panels` panels between two breakpoints.
    pub fn new(order: usize, panels: usize) -> Self {
        let order = order.max(1);
        let rule = GaussLegendre::new(NonZeroUsize::new(order).unwrap());
        Self { rule, order, panels: panels.max(1) }
    }

    /// Same order with twice the panels.
    pub fn refined(&self) -> Self {
        Self::new(self.order, 2 * self.panels)
    }

    fn composite(&self, a: f64, b: f64, f: &impl Fn(f64) -> f64) -> f64 {
        let h = (b - a) / self.panels as f64;
        (0..self.panels)
            .map(|i| {
                let lo = a + i as f64 * h;
                let hi = if i + 1 == self.panels { b } else { lo + h };
                self.rule.integrate(lo, hi, f)
            })
            .sum()
    }

    /// ∫_lo^hi g(x) dx for g that may vanish or diverge like a power ±½ at
    /// both ends. Interior `breaks` (kinks, jumps, wall centres) become panel
    /// boundaries in the substituted variable.
    pub fn between_turning_points(&self, lo: f64, hi: f64, breaks: &[f64], g: impl Fn(f64) -> f64) -> f64 {
        if !(hi > lo) {
            return 0.0;
        }
        let mid = 0.5 * (lo + hi);
        let half = |anchor: f64, end: f64, sign: f64| -> f64 {
            let mut cuts = vec![0.0];
            cuts.extend(
                breaks
                    .iter()
                    .map(|&b| sign * (b - anchor))
                    .filter(|&d| d > 0.0 && d < sign * (end - anchor))
                    .map(f64::sqrt),
            );
            cuts.push((sign * (end - anchor)).sqrt());
            cuts.sort_by(f64::total_cmp);
            let f = |u: f64| 2.0 * u * g(anchor + sign * u * u);
            cuts.windows(2).map(|w| self.composite(w[0], w[1], &f)).sum()
        };
        half(lo, mid, 1.0) + half(hi, mid, -1.0)
    }
}

/// Under-barrier action ∫ √(2[V − E]) dx between `x1` and `x2` for an
/// arbitrary potential.
pub fn action_with(v: impl Fn(f64) -> f64, e: f64, x1: f64, x2: f64, breaks: &[f64], q: &Quadrature) -> f64 {
    q.between_turning_points(x1, x2, breaks, |x| (2.0 * (v(x) - e)).max(0.0).sqrt())
}

/// Classical period 2∫ dx/√(2[E − V]) over the allowed interval `[x0, x1]`.
pub fn period_with(v: impl Fn(f64) -> f64, e: f64, x0: f64, x1: f64, breaks: &[f64], q: &Quadrature) -> f64 {
    2.0 * q.between_turning_points(x0, x1, breaks, |x| {
        let k = 2.0 * (e - v(x));
        if k > 0.0 {
            k.sqrt().recip()
        } else {
            0.0
        }
    })
}

fn trap_breaks(p: &TrapParams) -> [f64; 4] {
    [-p.l / 2.0, p.l / 2.0, p.a, p.a + p.l1 / 2.0]
}

/// Action under the quenched barrier at energy `e`.
pub fn action(e: f64, p: &TrapParams) -> Result<f64> {
    action_q(e, p, &Quadrature::default())
}

pub fn action_q(e: f64, p: &TrapParams, q: &Quadrature) -> Result<f64> {
    let tp = turning_points(e, p)?;
    Ok(action_with(|x| eval_quenched(x, p), e, tp.x1, tp.x2, &trap_breaks(p), q))
}

/// Period of the bound motion inside the quenched well at energy `e`.
pub fn period(e: f64, p: &TrapParams) -> Result<f64> {
    period_q(e, p, &Quadrature::default())
}

pub fn period_q(e: f64, p: &TrapParams, q: &Quadrature) -> Result<f64> {
    let tp = turning_points(e, p)?;
    Ok(period_with(|x| eval_quenched(x, p), e, tp.x0, tp.x1, &trap_breaks(p), q))
}

/// Single-impact tunneling probability e^{−2S}/(1 + e^{−2S}/4)².
pub fn transmission(s: f64) -> f64 {
    let x = (-2.0 * s).exp();
    x / ((1.0 + 0.25 * x) * (1.0 + 0.25 * x))
}

/// Below this action the thick-barrier formula is unreliable.
pub const LOW_CONFIDENCE_ACTION: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelRate {
    /// 1-based level index.
    pub k: usize,
    pub energy: f64,
    pub action: f64,
    pub transmission: f64,
    pub period: f64,
    /// Half the level's decay rate: 2γ_k = T/τ_k.
    pub gamma: f64,
    pub low_confidence: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatePrediction {
    pub levels: Vec<LevelRate>,
    /// Levels without a barrier to tunnel through, with the reason.
    pub excluded: Vec<(usize, Error)>,
    /// Γ = 2 Σ γ_k over the included levels.
    pub gamma_total: f64,
}

impl RatePrediction {
    /// Γ restricted to the lowest `n` levels.
    pub fn gamma_for(&self, n: usize) -> f64 {
        2.0 * self.levels.iter().filter(|l| l.k <= n).map(|l| l.gamma).sum::<f64>()
    }

    /// Whether any of the lowest `n` levels was flagged or excluded.
    pub fn low_confidence_within(&self, n: usize) -> bool {
        self.levels.iter().any(|l| l.k <= n && l.low_confidence) || self.excluded.iter().any(|(k, _)| *k <= n)
    }
}

/// Rates for levels E_1..E_N of the initial well.
pub fn rates(energies: &[f64], p: &TrapParams) -> RatePrediction {
    rates_q(energies, p, &Quadrature::default())
}

pub fn rates_q(energies: &[f64], p: &TrapParams, q: &Quadrature) -> RatePrediction {
    let mut levels = Vec::with_capacity(energies.len());
    let mut excluded = Vec::new();
    for (i, &e) in energies.iter().enumerate() {
        let k = i + 1;
        let level = action_q(e, p, q).and_then(|s| Ok((s, period_q(e, p, q)?)));
        match level {
            Ok((s, tau)) => {
                let t = transmission(s);
                levels.push(LevelRate {
                    k,
                    energy: e,
                    action: s,
                    transmission: t,
                    period: tau,
                    gamma: 0.5 * t / tau,
                    low_confidence: s < LOW_CONFIDENCE_ACTION,
                });
            }
            Err(err) => {
                warn!("level {k} (E = {e}) excluded from the rate sum: {err}");
                excluded.push((k, err));
            }
        }
    }
    let gamma_total = 2.0 * levels.iter().map(|l| l.gamma).sum::<f64>();
    RatePrediction { levels, excluded, gamma_total }
}
