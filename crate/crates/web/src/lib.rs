//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Three cheap operations, all on a compact grid around the trap: the
//! potential with its bound levels, the WKB rates, and the Zeno times for
//! the three exchange statistics.

use wasm_bindgen::prelude::*;

use fockleak::lattice::{bound_states, discretize, Grid, OrbitalSet};
use fockleak::potentials::{PotentialKind, TrapParams};
use fockleak::semiclassical::rates;
use fockleak::zeno::{StatisticsKind, ZenoTerms};

/// The orbitals are negligible a few well widths away from the trap, so
/// the browser works on [−3, 6] instead of the full simulation grid.
const X_MIN: f64 = -3.0;
const X_MAX: f64 = 6.0;
const DX: f64 = 1.0 / 400.0;
/// Largest capacity the page offers.
pub const MAX_CAPACITY: usize = 16;

fn trap(capacity: usize) -> Result<TrapParams, String> {
    if capacity == 0 || capacity > MAX_CAPACITY {
        return Err(format!("capacity must be between 1 and {MAX_CAPACITY}"));
    }
    TrapParams::from_capacity(capacity).map_err(|e| e.to_string())
}

fn levels(p: &TrapParams, count: usize) -> Result<OrbitalSet, String> {
    let grid = Grid::with_spacing(X_MIN, X_MAX, DX).map_err(|e| e.to_string())?;
    let h = discretize(p, PotentialKind::Initial, grid).map_err(|e| e.to_string())?;
    bound_states(&h, count).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub struct Spectrum {
    x: Vec<f64>,
    initial: Vec<f64>,
    quenched: Vec<f64>,
    energies: Vec<f64>,
}

#[wasm_bindgen]
impl Spectrum {
    #[wasm_bindgen(getter)]
    pub fn x(&self) -> Vec<f64> {
        self.x.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn initial(&self) -> Vec<f64> {
        self.initial.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn quenched(&self) -> Vec<f64> {
        self.quenched.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn energies(&self) -> Vec<f64> {
        self.energies.clone()
    }
}

/// Both potentials on `samples` points of [−1, 2] and the lowest `count`
/// levels of the initial well.
#[wasm_bindgen]
pub fn spectrum(capacity: usize, count: usize, samples: usize) -> Result<Spectrum, String> {
    let p = trap(capacity)?;
    let set = levels(&p, count)?;
    let samples = samples.max(2);
    let x: Vec<f64> = (0..samples).map(|i| -1.0 + 3.0 * i as f64 / (samples - 1) as f64).collect();
    Ok(Spectrum {
        initial: x.iter().map(|&x| p.eval(PotentialKind::Initial, x)).collect(),
        quenched: x.iter().map(|&x| p.eval(PotentialKind::Quenched, x)).collect(),
        x,
        energies: set.energies(),
    })
}

#[wasm_bindgen]
pub struct RateTable {
    energies: Vec<f64>,
    actions: Vec<f64>,
    transmissions: Vec<f64>,
    periods: Vec<f64>,
    gamma_by_n: Vec<f64>,
}

#[wasm_bindgen]
impl RateTable {
    #[wasm_bindgen(getter)]
    pub fn energies(&self) -> Vec<f64> {
        self.energies.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn actions(&self) -> Vec<f64> {
        self.actions.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn transmissions(&self) -> Vec<f64> {
        self.transmissions.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn periods(&self) -> Vec<f64> {
        self.periods.clone()
    }
    /// Γ of the N-particle state for N = 1..count.
    #[wasm_bindgen(getter)]
    pub fn gamma_by_n(&self) -> Vec<f64> {
        self.gamma_by_n.clone()
    }
}

/// Per-level WKB data; levels without a barrier are reported as NaN.
#[wasm_bindgen]
pub fn wkb_rates(capacity: usize, count: usize) -> Result<RateTable, String> {
    let p = trap(capacity)?;
    let energies = levels(&p, count)?.energies();
    let r = rates(&energies, &p);
    let per_level = |f: fn(&fockleak::semiclassical::LevelRate) -> f64| -> Vec<f64> {
        (1..=count).map(|k| r.levels.iter().find(|l| l.k == k).map_or(f64::NAN, f)).collect()
    };
    Ok(RateTable {
        actions: per_level(|l| l.action),
        transmissions: per_level(|l| l.transmission),
        periods: per_level(|l| l.period),
        gamma_by_n: (1..=count).map(|n| r.gamma_for(n)).collect(),
        energies,
    })
}

#[wasm_bindgen]
pub struct ZenoTable {
    fermions: Vec<f64>,
    distinguishable: Vec<f64>,
    bosons: Vec<f64>,
}

#[wasm_bindgen]
impl ZenoTable {
    #[wasm_bindgen(getter)]
    pub fn fermions(&self) -> Vec<f64> {
        self.fermions.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn distinguishable(&self) -> Vec<f64> {
        self.distinguishable.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn bosons(&self) -> Vec<f64> {
        self.bosons.clone()
    }
}

/// τ_Z(N) for N = 1..count and α = −1, 0, +1.
#[wasm_bindgen]
pub fn zeno_times(capacity: usize, count: usize) -> Result<ZenoTable, String> {
    let p = trap(capacity)?;
    let set = levels(&p, count)?;
    let h = discretize(&p, PotentialKind::Quenched, set.grid).map_err(|e| e.to_string())?;
    let terms = ZenoTerms::compute(&set, &h).map_err(|e| e.to_string())?;
    let column = |s: StatisticsKind| -> Result<Vec<f64>, String> {
        (1..=count).map(|n| terms.zeno_time(n, s).map_err(|e| e.to_string())).collect()
    };
    Ok(ZenoTable {
        fermions: column(StatisticsKind::Fermions)?,
        distinguishable: column(StatisticsKind::Distinguishable)?,
        bosons: column(StatisticsKind::Bosons)?,
    })
}
