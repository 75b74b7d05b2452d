//! End-to-end runs: bound states → evolution → observables → Zeno analysis →
//! semiclassical rates → exponential fits, and the CSV files they produce.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::absorber::cap_values;
use crate::config::{ConfigError, RunConfig, ZenoWindow};
use crate::error::{Error, Result};
use crate::lattice::{bound_states, count_bound_states, discretize, OrbitalSet, TridiagonalHamiltonian};
use crate::potentials::PotentialKind;
use crate::propagator::{evolve, Recorder, Schedule};
use crate::ratefit::{auto_window, fit_exponential, FitResult};
use crate::semiclassical::{rates, RatePrediction};
use crate::series::{Channel, DecayTimeSeries, SeriesRecorder};
use crate::zeno::{
    fidelity_at_tq, parabola_fit, quadratic_window, transition_time, StatisticsKind, ZenoReport,
    ZenoTerms,
};

/// Failure of a CLI-level run, split by exit code.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(#[from] Error),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Numerical(_) => 3,
            Self::Io(_) => 1,
        }
    }
}

/// Everything that does not depend on time.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub config: RunConfig,
    /// Lowest `n_max` eigenstates of the initial well.
    pub initial: OrbitalSet,
    /// Number of initial-well levels below zero.
    pub bound_count: usize,
    /// Quenched Hamiltonian without absorber.
    pub quenched: TridiagonalHamiltonian,
    /// Quenched Hamiltonian with the absorbing layers.
    pub absorbing: TridiagonalHamiltonian,
    pub absorber: Vec<f64>,
    pub terms: ZenoTerms,
    pub rates: RatePrediction,
}

pub fn prepare(config: &RunConfig) -> Result<Prepared> {
    let p = &config.trap;
    let h_initial = discretize(p, PotentialKind::Initial, config.grid)?;
    let bound_count = count_bound_states(&h_initial);
    info!("initial well holds {bound_count} bound states (capacity {})", p.capacity);
    let initial = bound_states(&h_initial, config.particles.max)?;
    let quenched = discretize(p, PotentialKind::Quenched, config.grid)?;
    let terms = ZenoTerms::compute(&initial, &quenched)?;
    let absorber = cap_values(&config.grid, &config.cap)?;
    let absorbing = quenched.clone().with_absorber(absorber.clone())?;
    let rates = rates(&initial.energies(), p);
    Ok(Prepared { config: config.clone(), initial, bound_count, quenched, absorbing, absorber, terms, rates })
}

/// Observables for every particle number of the run.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub series: Vec<DecayTimeSeries>,
    /// End of the finely stepped head.
    pub head_end: f64,
    pub final_orbitals: OrbitalSet,
}

/// Evolves the largest orbital set once: a head stepped with `zeno_dt` and
/// recorded at every step, then the remainder with `dt`.
pub fn evolve_all(prep: &Prepared) -> Result<Evolution> {
    evolve_all_with(prep, &mut |_: f64, _: &[Vec<Complex64>]| Ok(()))
}

/// [`evolve_all`], also handing every snapshot to `observer` with its
/// absolute time. The snapshot at the head/main seam is seen twice.
pub fn evolve_all_with<R: Recorder>(prep: &Prepared, observer: &mut R) -> Result<Evolution> {
    let cfg = &prep.config;
    let ns = cfg.particles.to_vec();
    let mut recorder = SeriesRecorder::new(&prep.initial, cfg.region, &ns, cfg.channels.fcs)?;
    let head_end = cfg.zeno_t_end.min(cfg.schedule.t_end);
    let head_steps = (head_end / cfg.zeno_dt).round();
    let head = Schedule { dt: cfg.zeno_dt, t_end: head_steps * cfg.zeno_dt, sample_every: 1, ..cfg.schedule };
    info!("head: {} steps of {}", head.total_steps(), head.dt);
    let mut tee = Tee { recorder: &mut recorder, observer, offset: 0.0 };
    let mut orbitals = evolve(&prep.initial, &prep.absorbing, &head, &mut tee)?;
    let head_end = head.total_steps() as f64 * head.dt;
    let rest = cfg.schedule.t_end - head_end;
    if rest >= cfg.schedule.dt {
        let main = Schedule { t_end: rest, ..cfg.schedule };
        info!("main: {} steps of {}, sampled every {}", main.total_steps(), main.dt, main.sample_every);
        tee.offset = head_end;
        orbitals = evolve(&orbitals, &prep.absorbing, &main, &mut tee)?;
    }
    Ok(Evolution { series: recorder.into_series(), head_end, final_orbitals: orbitals })
}

struct Tee<'a, R> {
    recorder: &'a mut SeriesRecorder,
    observer: &'a mut R,
    offset: f64,
}

impl<R: Recorder> Recorder for Tee<'_, R> {
    fn record(&mut self, t: f64, orbitals: &[Vec<Complex64>]) -> Result<()> {
        self.recorder.record(self.offset + t, orbitals)?;
        self.observer.record(self.offset + t, orbitals)
    }
}

/// Analysis of one particle number.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub n: usize,
    pub zeno: ZenoReport,
    pub gamma_semiclassical: f64,
    pub semiclassical_low_confidence: bool,
    pub fit_p: Option<FitResult>,
    pub fit_s: Option<FitResult>,
}

fn short_time_fit(cfg: &RunConfig, s: &DecayTimeSeries, head_end: f64) -> Result<(f64, (f64, f64))> {
    let values = s.normalized(cfg.fit_channel);
    let head = s.times.partition_point(|&t| t <= head_end);
    let (times, values) = (&s.times[..head], &values[..head]);
    let t_fit = match cfg.zeno_window {
        ZenoWindow::Auto => quadratic_window(times, values, cfg.zeno_rel_tol)?,
        ZenoWindow::Until(t) => t,
    };
    Ok((parabola_fit(times, values, (0.0, t_fit))?, (0.0, t_fit)))
}

/// Zeno analysis of one series; exponential fits only when `with_fits`.
pub fn analyse(prep: &Prepared, s: &DecayTimeSeries, head_end: f64, with_fits: bool) -> Result<Analysis> {
    let cfg = &prep.config;
    let n = s.n_particles;
    let tau_a = prep.terms.zeno_time(n, cfg.stats)?;
    let fit = short_time_fit(cfg, s, head_end)
        .map_err(|e| warn!("N = {n}: no parabolic fit ({e})"))
        .ok();
    let tau_model = fit.map_or(tau_a, |f| f.0);
    let t_q = transition_time(&s.times, &s.normalized(cfg.fit_channel), tau_model, cfg.epsilon_tq)?.time();
    if t_q.is_none() {
        warn!("N = {n}: quadratic regime lasts past t = {}", s.times.last().unwrap_or(&0.0));
    }
    let fidelity = t_q.and_then(|t| fidelity_at_tq(&s.times, &s.p, t).ok());
    let gamma_sc = prep.rates.gamma_for(n);
    let tau_q = (gamma_sc > 0.0).then_some(tau_a * tau_a * gamma_sc);
    let fit_channel = |c: Channel| -> Option<FitResult> {
        let values = s.channel(c);
        auto_window(&s.times, values, t_q.unwrap_or(0.0), cfg.channel_floor)
            .and_then(|w| fit_exponential(&s.times, values, w, c))
            .map_err(|e| warn!("N = {n}: no exponential fit of {} ({e})", c.name()))
            .ok()
    };
    Ok(Analysis {
        n,
        zeno: ZenoReport {
            n_particles: n,
            stats: cfg.stats,
            tau_z_analytic: tau_a,
            tau_z_fit: fit.map(|f| f.0),
            fit_window: fit.map(|f| f.1),
            t_q,
            tau_q_estimate: tau_q,
            fidelity_at_tq: fidelity,
            per_orbital_variances: prep.terms.variances[..n].to_vec(),
            offdiag_sum: prep.terms.offdiag_sum(n),
        },
        gamma_semiclassical: gamma_sc,
        semiclassical_low_confidence: prep.rates.low_confidence_within(n),
        fit_p: if with_fits && cfg.channels.p { fit_channel(Channel::P) } else { None },
        fit_s: if with_fits && cfg.channels.s { fit_channel(Channel::S) } else { None },
    })
}

/// Twelve significant digits; `nan` for missing values.
pub fn fmt(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        "nan".into()
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    fmt(x.unwrap_or(f64::NAN))
}

pub fn timeseries_csv(s: &DecayTimeSeries) -> String {
    let mut out = String::from("t,P,S");
    for k in 1..=s.n_particles {
        let _ = write!(out, ",norm_{k}");
    }
    out.push('\n');
    for i in 0..s.len() {
        let _ = write!(out, "{},{},{}", fmt(s.times[i]), fmt(s.p[i]), fmt(s.s[i]));
        for v in &s.orbital_norms[i] {
            let _ = write!(out, ",{}", fmt(*v));
        }
        out.push('\n');
    }
    out
}

pub fn fcs_csv(s: &DecayTimeSeries) -> String {
    let mut out = String::from("t");
    for k in 0..=s.n_particles {
        let _ = write!(out, ",p_{k}");
    }
    out.push('\n');
    for (t, p) in s.times.iter().zip(&s.fcs) {
        out.push_str(&fmt(*t));
        for v in p {
            let _ = write!(out, ",{}", fmt(*v));
        }
        out.push('\n');
    }
    out
}

pub const SUMMARY_HEADER: &str =
    "N,alpha,tau_z_analytic,tau_z_fit,t_q,fidelity_at_tq,Gamma_semiclassical,Gamma_fit_P,Gamma_fit_S";

pub fn summary_csv(rows: &[Analysis]) -> String {
    let mut out = format!("{SUMMARY_HEADER}\n");
    for a in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            a.n,
            a.zeno.stats.alpha(),
            fmt(a.zeno.tau_z_analytic),
            fmt_opt(a.zeno.tau_z_fit),
            fmt_opt(a.zeno.t_q),
            fmt_opt(a.zeno.fidelity_at_tq),
            fmt(a.gamma_semiclassical),
            fmt_opt(a.fit_p.map(|f| f.gamma_obs)),
            fmt_opt(a.fit_s.map(|f| f.gamma_obs)),
        );
    }
    out
}

/// Zeno details, including τ_Z for all three statistics.
pub fn zeno_csv(rows: &[Analysis], terms: &ZenoTerms) -> String {
    let mut out = String::from(
        "N,alpha,tau_z_analytic,tau_z_fit,t_q,tau_q,fidelity_at_tq,fit_window_end,sum_variances,offdiag_sum,\
         tau_z_fermions,tau_z_distinguishable,tau_z_bosons\n",
    );
    for a in rows {
        let z = &a.zeno;
        let tau = |s| terms.zeno_time(a.n, s).ok();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            a.n,
            z.stats.alpha(),
            fmt(z.tau_z_analytic),
            fmt_opt(z.tau_z_fit),
            fmt_opt(z.t_q),
            fmt_opt(z.tau_q_estimate),
            fmt_opt(z.fidelity_at_tq),
            fmt_opt(z.fit_window.map(|w| w.1)),
            fmt(z.per_orbital_variances.iter().sum()),
            fmt(z.offdiag_sum),
            fmt_opt(tau(StatisticsKind::Fermions)),
            fmt_opt(tau(StatisticsKind::Distinguishable)),
            fmt_opt(tau(StatisticsKind::Bosons)),
        );
    }
    out
}

pub fn fits_csv(rows: &[Analysis]) -> String {
    let mut out =
        String::from("N,channel,Gamma_obs,Gamma_semiclassical,ratio,residual,intercept,t_lo,t_hi,low_confidence\n");
    for a in rows {
        for f in [a.fit_p, a.fit_s].into_iter().flatten() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                a.n,
                f.channel.name(),
                fmt(f.gamma_obs),
                fmt(a.gamma_semiclassical),
                fmt(f.gamma_obs / a.gamma_semiclassical),
                fmt(f.residual),
                fmt(f.intercept),
                fmt(f.window.0),
                fmt(f.window.1),
                a.semiclassical_low_confidence,
            );
        }
    }
    out
}

/// Per-level WKB table with a footer row carrying Γ in the `gamma_k` column.
pub fn rates_csv(r: &RatePrediction, energies: &[f64]) -> String {
    let mut out = String::from("k,E_k,S,T,tau_k,gamma_k,flag\n");
    for (i, e) in energies.iter().enumerate() {
        let k = i + 1;
        match r.levels.iter().find(|l| l.k == k) {
            Some(l) => {
                let _ = writeln!(
                    out,
                    "{k},{},{},{},{},{},{}",
                    fmt(l.energy),
                    fmt(l.action),
                    fmt(l.transmission),
                    fmt(l.period),
                    fmt(l.gamma),
                    if l.low_confidence { "low_confidence" } else { "ok" }
                );
            }
            None => {
                let _ = writeln!(out, "{k},{},nan,nan,nan,nan,excluded", fmt(*e));
            }
        }
    }
    let _ = writeln!(out, "Gamma,,,,,{},", fmt(r.gamma_total));
    out
}

pub fn bound_states_csv(set: &OrbitalSet) -> String {
    let mut out = String::from("k,E_k,norm\n");
    for (i, o) in set.orbitals.iter().enumerate() {
        let _ = writeln!(out, "{},{},{}", i + 1, fmt(o.energy), fmt(o.norm_sqr(&set.grid)));
    }
    out
}

pub fn orbitals_csv(set: &OrbitalSet) -> String {
    let mut out = String::from("x");
    for k in 1..=set.len() {
        let _ = write!(out, ",re_phi_{k},im_phi_{k}");
    }
    out.push('\n');
    for (i, x) in set.grid.points().enumerate() {
        out.push_str(&fmt(x));
        for o in &set.orbitals {
            let z = o.amplitudes[i];
            let _ = write!(out, ",{},{}", fmt(z.re), fmt(z.im));
        }
        out.push('\n');
    }
    out
}

pub fn absorber_csv(prep: &Prepared) -> String {
    let mut out = String::from("x,V,W\n");
    for (i, x) in prep.config.grid.points().enumerate() {
        let v = prep.quenched.diagonal[i] + 2.0 * prep.quenched.off_diagonal;
        let _ = writeln!(out, "{},{},{}", fmt(x), fmt(v), fmt(prep.absorber[i]));
    }
    out
}

/// What a subcommand computes and writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    BoundStates,
    Evolve,
    Zeno,
    Rates,
    Sweep,
    Fcs,
}

/// Collects output files in memory and writes them in one place, in order.
#[derive(Debug, Default)]
pub struct Outputs {
    pub files: Vec<(String, String)>,
}

impl Outputs {
    fn add(&mut self, name: impl Into<String>, body: String) {
        self.files.push((name.into(), body));
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, b)| b.as_str())
    }

    pub fn write_to(&self, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        self.files
            .iter()
            .map(|(name, body)| {
                let path = dir.join(name);
                fs::write(&path, body)?;
                Ok(path)
            })
            .collect()
    }
}

/// Runs `task` and returns its files without touching the disk.
pub fn execute(task: Task, config: &RunConfig) -> Result<Outputs> {
    let mut out = Outputs::default();
    out.add("manifest.txt", config.manifest());
    if task == Task::Rates {
        let p = &config.trap;
        let h = discretize(p, PotentialKind::Initial, config.grid)?;
        let set = bound_states(&h, config.particles.max)?;
        out.add("rates.csv", rates_csv(&rates(&set.energies(), p), &set.energies()));
        return Ok(out);
    }
    let prep = prepare(config)?;
    if config.dump_absorber {
        out.add("absorber.csv", absorber_csv(&prep));
    }
    if task == Task::BoundStates {
        out.add("bound_states.csv", bound_states_csv(&prep.initial));
        if config.dump_orbitals {
            out.add("orbitals.csv", orbitals_csv(&prep.initial));
        }
        return Ok(out);
    }
    let mut cfg = config.clone();
    if task == Task::Zeno {
        cfg.schedule.t_end = cfg.schedule.t_end.min(cfg.zeno_t_end);
    }
    let prep = Prepared { config: cfg, ..prep };
    let evo = evolve_all(&prep)?;
    if config.dump_orbitals {
        out.add("orbitals_final.csv", orbitals_csv(&evo.final_orbitals));
    }
    let suffix = |n: usize| if config.particles.is_single() { String::new() } else { format!("_N{n}") };
    for s in &evo.series {
        if task != Task::Zeno {
            out.add(format!("timeseries{}.csv", suffix(s.n_particles)), timeseries_csv(s));
        }
        if config.channels.fcs && matches!(task, Task::Evolve | Task::Sweep | Task::Fcs) {
            out.add(format!("fcs{}.csv", suffix(s.n_particles)), fcs_csv(s));
        }
    }
    if task == Task::Fcs {
        return Ok(out);
    }
    let rows = evo
        .series
        .par_iter()
        .map(|s| analyse(&prep, s, evo.head_end, task != Task::Zeno))
        .collect::<Result<Vec<_>>>()?;
    out.add("zeno.csv", zeno_csv(&rows, &prep.terms));
    if task == Task::Zeno {
        return Ok(out);
    }
    out.add("summary.csv", summary_csv(&rows));
    out.add("fits.csv", fits_csv(&rows));
    out.add("rates.csv", rates_csv(&prep.rates, &prep.initial.energies()));
    Ok(out)
}

/// Runs `task` and writes its files into `dir`.
pub fn run(task: Task, config: &RunConfig, dir: &Path) -> std::result::Result<Vec<PathBuf>, RunError> {
    let out = execute(task, config)?;
    Ok(out.write_to(dir)?)
}
