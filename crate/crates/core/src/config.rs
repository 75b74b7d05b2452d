//! Flat `key = value` run configuration.
//!
//! Lines are `key = value`; `#` starts a comment; blank lines are ignored.
//! Every key is optional. [`RunConfig::resolve`] fills defaults, checks
//! cross-field constraints and reports all violations at once. The resolved
//! configuration prints back into the same format ([`RunConfig::manifest`]),
//! and re-running from that text reproduces the run exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::absorber::CapParams;
use crate::lattice::Grid;
use crate::observables::RegionProjector;
use crate::potentials::{depth_from_capacity, TrapParams};
use crate::propagator::{EnergyReference, Schedule};
use crate::series::Channel;
use crate::zeno::StatisticsKind;

/// All problems found in a configuration, one message per field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub messages: Vec<String>,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid configuration:")?;
        for m in &self.messages {
            write!(f, "\n  - {m}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

/// Keys in manifest order.
pub const KEYS: &[&str] = &[
    "capacity",
    "v0",
    "l1",
    "sigma",
    "sigma1",
    "a",
    "x_min",
    "x_max",
    "dx",
    "refine",
    "cap_width",
    "cap_e_min",
    "dt",
    "t_end",
    "sample_every",
    "energy_reference",
    "zeno_dt",
    "zeno_t_end",
    "zeno_window",
    "zeno_rel_tol",
    "n",
    "alpha",
    "channels",
    "fit_channel",
    "epsilon_tq",
    "region_cut",
    "channel_floor",
    "workers",
    "dump_orbitals",
    "dump_absorber",
];

/// Raw key/value pairs as written in a file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, (String, usize)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        let mut messages = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                messages.push(format!("line {line_no}: expected `key = value`, got `{content}`"));
                continue;
            };
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                messages.push(format!("line {line_no}: unknown key `{key}`"));
            } else if let Some((_, first)) = entries.get(key) {
                messages.push(format!("line {line_no}: `{key}` already set on line {first}"));
            } else {
                entries.insert(key.to_string(), (value.to_string(), line_no));
            }
        }
        if messages.is_empty() {
            Ok(Self { entries })
        } else {
            Err(ConfigError { messages })
        }
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError { messages: vec![format!("cannot read {}: {e}", path.display())] })?;
        Self::parse(&text)
    }

    /// Overrides or adds one entry.
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_string(), (value.into(), 0));
    }

    pub fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str()).filter(|v| !v.is_empty() && *v != "auto")
    }
}

/// Inclusive range of particle numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParticleRange {
    pub min: usize,
    pub max: usize,
}

impl ParticleRange {
    pub fn single(n: usize) -> Self {
        Self { min: n, max: n }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> {
        self.min..=self.max
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn is_single(&self) -> bool {
        self.min == self.max
    }
}

impl FromStr for ParticleRange {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("expected a particle number or a range `lo..hi`, got `{s}`");
        match s.split_once("..") {
            Some((lo, hi)) => {
                let hi = hi.strip_prefix('=').unwrap_or(hi);
                let min = lo.trim().parse().map_err(|_| bad())?;
                let max = hi.trim().parse().map_err(|_| bad())?;
                Ok(Self { min, max })
            }
            None => s.trim().parse().map(Self::single).map_err(|_| bad()),
        }
    }
}

impl std::fmt::Display for ParticleRange {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_single() {
            write!(f, "{}", self.min)
        } else {
            write!(f, "{}..{}", self.min, self.max)
        }
    }
}

/// Which products a run emits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Channels {
    pub p: bool,
    pub s: bool,
    pub fcs: bool,
}

impl FromStr for Channels {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let mut c = Channels { p: false, s: false, fcs: false };
        for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            match item.to_ascii_uppercase().as_str() {
                "P" => c.p = true,
                "S" => c.s = true,
                "FCS" => c.fcs = true,
                other => return Err(format!("unknown channel `{other}` (expected P, S or FCS)")),
            }
        }
        if !(c.p || c.s || c.fcs) {
            return Err("at least one channel is required".into());
        }
        Ok(c)
    }
}

impl std::fmt::Display for Channels {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let names: Vec<&str> = [(self.p, "P"), (self.s, "S"), (self.fcs, "FCS")]
            .iter()
            .filter(|(on, _)| *on)
            .map(|(_, n)| *n)
            .collect();
        write!(f, "{}", names.join(","))
    }
}

/// Fit window for the short-time parabola.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZenoWindow {
    /// Up to where (1 − channel)/t² departs from its initial value by more
    /// than `zeno_rel_tol`.
    Auto,
    /// Fixed upper end.
    Until(f64),
}

/// Fully resolved configuration; every field has a concrete value.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub trap: TrapParams,
    pub grid: Grid,
    /// Grid spacing before refinement.
    pub dx: f64,
    pub refine: usize,
    pub cap: CapParams,
    pub schedule: Schedule,
    pub zeno_dt: f64,
    pub zeno_t_end: f64,
    pub zeno_window: ZenoWindow,
    pub zeno_rel_tol: f64,
    pub particles: ParticleRange,
    pub stats: StatisticsKind,
    pub channels: Channels,
    pub fit_channel: Channel,
    pub epsilon_tq: f64,
    pub region: RegionProjector,
    pub channel_floor: f64,
    /// Worker threads; 0 lets the runtime decide.
    pub workers: usize,
    pub dump_orbitals: bool,
    pub dump_absorber: bool,
}

/// Step for the C = 8 reference depth, scaled by 1/V₀.
pub fn default_dt(v0: f64) -> f64 {
    Schedule::REFERENCE_DT * depth_from_capacity(8).unwrap() / v0
}

struct Resolver<'a> {
    raw: &'a RawConfig,
    messages: Vec<String>,
}

impl Resolver<'_> {
    fn value<T: FromStr>(&mut self, key: &str, default: T) -> T
    where
        T::Err: std::fmt::Display,
    {
        match self.raw.get(key) {
            None => default,
            Some(v) => match v.parse() {
                Ok(x) => x,
                Err(e) => {
                    self.messages.push(format!("{key}: cannot parse `{v}`: {e}"));
                    default
                }
            },
        }
    }

    fn optional<T: FromStr>(&mut self, key: &str) -> Option<T>
    where
        T::Err: std::fmt::Display,
    {
        let v = self.raw.get(key)?;
        match v.parse() {
            Ok(x) => Some(x),
            Err(e) => {
                self.messages.push(format!("{key}: cannot parse `{v}`: {e}"));
                None
            }
        }
    }

    fn require(&mut self, ok: bool, message: impl FnOnce() -> String) {
        if !ok {
            self.messages.push(message());
        }
    }
}

impl RunConfig {
    /// All defaults: C = 8, N = 8, fermions.
    pub fn defaults() -> Self {
        Self::resolve(&RawConfig::default()).expect("defaults are valid")
    }

    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        Self::resolve(&RawConfig::parse(text)?)
    }

    pub fn resolve(raw: &RawConfig) -> Result<Self, ConfigError> {
        let mut r = Resolver { raw, messages: Vec::new() };

        let capacity: usize = r.value("capacity", 8);
        r.require(capacity >= 1, || "capacity: must be at least 1".into());
        let c = capacity.max(1) as f64;
        let v0 = r.value("v0", c * c * std::f64::consts::PI.powi(2));
        let trap = TrapParams {
            v0,
            l: 1.0,
            l1: r.value("l1", TrapParams::DEFAULT_L1),
            sigma: r.value("sigma", TrapParams::DEFAULT_SIGMA),
            sigma1: r.value("sigma1", TrapParams::DEFAULT_SIGMA),
            a: r.value("a", TrapParams::DEFAULT_A),
            capacity: capacity.max(1),
        };
        if let Err(e) = trap.validate() {
            r.messages.push(e.to_string());
        }

        let x_min: f64 = r.value("x_min", Grid::DEFAULT_X_MIN);
        let x_max: f64 = r.value("x_max", Grid::DEFAULT_X_MAX);
        let dx: f64 = r.value("dx", Grid::DEFAULT_DX);
        let refine: usize = r.value("refine", 1);
        r.require(refine >= 1, || "refine: must be at least 1".into());
        let grid = match Grid::with_spacing(x_min, x_max, dx / refine.max(1) as f64) {
            Ok(g) => g,
            Err(e) => {
                r.messages.push(format!("grid: {e}"));
                Grid::standard()
            }
        };

        let cap = match (r.optional::<f64>("cap_width"), r.optional::<f64>("cap_e_min")) {
            (Some(w), Some(e)) => {
                let implied = CapParams::with_width(w).e_min;
                r.require((implied - e).abs() <= 1e-9 * implied.abs(), || {
                    format!("cap_width = {w} implies cap_e_min = {implied}, but cap_e_min = {e}; set only one")
                });
                CapParams { width: w, e_min: e }
            }
            (None, Some(e)) if e > 0.0 => CapParams::with_e_min(e),
            (None, Some(e)) => {
                r.messages.push(format!("cap_e_min: must be positive, got {e}"));
                CapParams::with_width(CapParams::DEFAULT_WIDTH)
            }
            (Some(w), None) => CapParams::with_width(w),
            (None, None) => CapParams::with_width(CapParams::DEFAULT_WIDTH),
        };
        if let Err(e) = cap.validate(&grid) {
            r.messages.push(e.to_string());
        }
        let interior = cap.interior(&grid);
        r.require(trap.a + trap.l1 + 10.0 * trap.sigma1 < interior.1, || {
            format!(
                "absorber starts at x = {} which overlaps the barrier (ends near {})",
                interior.1,
                trap.a + trap.l1
            )
        });
        r.require(-(trap.l / 2.0) - 10.0 * trap.sigma > interior.0, || {
            format!("absorber ends at x = {} which overlaps the well", interior.0)
        });

        let dt: f64 = r.value("dt", default_dt(v0.max(f64::MIN_POSITIVE)));
        let t_end: f64 = r.value("t_end", 1.0);
        r.require(dt > 0.0 && dt.is_finite(), || format!("dt: must be positive, got {dt}"));
        r.require(t_end >= 0.0, || format!("t_end: must be non-negative, got {t_end}"));
        let zeno_dt: f64 = r.value("zeno_dt", (default_dt(v0.max(f64::MIN_POSITIVE)) / 10.0).min(dt));
        let zeno_t_end: f64 = r.value("zeno_t_end", 1e-3);
        r.require(zeno_dt > 0.0 && zeno_dt <= dt, || {
            format!("zeno_dt: must lie in (0, dt = {dt}], got {zeno_dt}")
        });
        r.require(zeno_t_end >= 0.0, || format!("zeno_t_end: must be non-negative, got {zeno_t_end}"));
        let main_span = (t_end - zeno_t_end).max(0.0);
        let auto_every = ((main_span / dt).round() as usize / Schedule::TARGET_SAMPLES).max(1);
        let sample_every: usize = r.value("sample_every", auto_every);
        r.require(sample_every >= 1, || "sample_every: must be at least 1".into());
        let reference = match r.raw.get("energy_reference") {
            None | Some("orbital") => EnergyReference::PerOrbital,
            Some("zero") => EnergyReference::Zero,
            Some(v) => match v.parse::<f64>() {
                Ok(e) => EnergyReference::Fixed(e),
                Err(_) => {
                    r.messages.push(format!("energy_reference: expected `orbital`, `zero` or a number, got `{v}`"));
                    EnergyReference::PerOrbital
                }
            },
        };
        let schedule = Schedule { dt, t_end, sample_every: sample_every.max(1), reference };

        let zeno_window = match r.optional::<f64>("zeno_window") {
            None => ZenoWindow::Auto,
            Some(t) if t > 0.0 => ZenoWindow::Until(t),
            Some(t) => {
                r.messages.push(format!("zeno_window: must be positive or `auto`, got {t}"));
                ZenoWindow::Auto
            }
        };
        let zeno_rel_tol: f64 = r.value("zeno_rel_tol", 0.02);
        r.require(zeno_rel_tol > 0.0, || "zeno_rel_tol: must be positive".into());

        let particles: ParticleRange = r.value("n", ParticleRange::single(capacity.max(1)));
        r.require(particles.min >= 1 && particles.min <= particles.max, || {
            format!("n: empty or zero particle range {particles}")
        });
        r.require(particles.max <= capacity, || {
            format!("n: particle number exceeds capacity ({} > {capacity})", particles.max)
        });

        let alpha: i32 = r.value("alpha", -1);
        let stats = StatisticsKind::from_alpha(alpha).unwrap_or_else(|| {
            r.messages.push(format!("alpha: must be -1, 0 or 1, got {alpha}"));
            StatisticsKind::Fermions
        });
        let channels: Channels = r.value("channels", Channels { p: true, s: true, fcs: true });
        let fit_channel: Channel = r.value("fit_channel", Channel::S);
        let epsilon_tq: f64 = r.value("epsilon_tq", 0.05);
        r.require(epsilon_tq > 0.0 && epsilon_tq < 1.0, || format!("epsilon_tq: must lie in (0, 1), got {epsilon_tq}"));
        let cut: f64 = r.value("region_cut", trap.a);
        r.require(grid.contains(cut), || {
            format!("region_cut: cut {cut} lies outside the grid [{}, {}]", grid.x_min, grid.x_max)
        });
        r.require(grid.contains(trap.a), || {
            format!("a: cut {} lies outside the grid [{}, {}]", trap.a, grid.x_min, grid.x_max)
        });
        let channel_floor: f64 = r.value("channel_floor", 1e-12);
        r.require(channel_floor > 0.0, || "channel_floor: must be positive".into());
        let workers: usize = r.value("workers", 0);
        let dump_orbitals: bool = r.value("dump_orbitals", false);
        let dump_absorber: bool = r.value("dump_absorber", false);

        if !r.messages.is_empty() {
            return Err(ConfigError { messages: r.messages });
        }
        Ok(Self {
            trap,
            grid,
            dx,
            refine,
            cap,
            schedule,
            zeno_dt,
            zeno_t_end,
            zeno_window,
            zeno_rel_tol,
            particles,
            stats,
            channels,
            fit_channel,
            epsilon_tq,
            region: RegionProjector { cut },
            channel_floor,
            workers,
            dump_orbitals,
            dump_absorber,
        })
    }

    /// The resolved configuration in the input format. Floats print in their
    /// shortest round-trip form, so parsing the manifest restores every bit.
    pub fn manifest(&self) -> String {
        let mut out = String::from("# resolved configuration\n");
        let mut line = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        line("capacity", self.trap.capacity.to_string());
        line("v0", self.trap.v0.to_string());
        line("l1", self.trap.l1.to_string());
        line("sigma", self.trap.sigma.to_string());
        line("sigma1", self.trap.sigma1.to_string());
        line("a", self.trap.a.to_string());
        line("x_min", self.grid.x_min.to_string());
        line("x_max", self.grid.x_max.to_string());
        line("dx", self.dx.to_string());
        line("refine", self.refine.to_string());
        line("cap_width", self.cap.width.to_string());
        line("cap_e_min", self.cap.e_min.to_string());
        line("dt", self.schedule.dt.to_string());
        line("t_end", self.schedule.t_end.to_string());
        line("sample_every", self.schedule.sample_every.to_string());
        line(
            "energy_reference",
            match self.schedule.reference {
                EnergyReference::PerOrbital => "orbital".into(),
                EnergyReference::Zero => "zero".into(),
                EnergyReference::Fixed(e) => e.to_string(),
            },
        );
        line("zeno_dt", self.zeno_dt.to_string());
        line("zeno_t_end", self.zeno_t_end.to_string());
        line(
            "zeno_window",
            match self.zeno_window {
                ZenoWindow::Auto => "auto".into(),
                ZenoWindow::Until(t) => t.to_string(),
            },
        );
        line("zeno_rel_tol", self.zeno_rel_tol.to_string());
        line("n", self.particles.to_string());
        line("alpha", self.stats.alpha().to_string());
        line("channels", self.channels.to_string());
        line("fit_channel", self.fit_channel.name().into());
        line("epsilon_tq", self.epsilon_tq.to_string());
        line("region_cut", self.region.cut.to_string());
        line("channel_floor", self.channel_floor.to_string());
        line("workers", self.workers.to_string());
        line("dump_orbitals", self.dump_orbitals.to_string());
        line("dump_absorber", self.dump_absorber.to_string());
        out
    }
}
