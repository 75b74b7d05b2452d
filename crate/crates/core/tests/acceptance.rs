//! Acceptance suite: one PASS/FAIL line per criterion. Tolerances are fixed
//! below; a failing criterion makes the target exit non-zero.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fockleak::absorber::{cap_values, CapParams};
use fockleak::config::RunConfig;
use fockleak::error::Result;
use fockleak::lattice::{bound_states, trapezoid_norm_sqr, Grid, Orbital, OrbitalSet, TridiagonalHamiltonian};
use fockleak::linalg::CMatrix;
use fockleak::observables::{fcs, nonescape_prob, region_overlaps, OverlapMatrix};
use fockleak::pipeline::{analyse, evolve_all_with, execute, prepare, Analysis, Prepared, Task};
use fockleak::propagator::{evolve, Schedule};
use fockleak::series::DecayTimeSeries;
use fockleak::zeno::StatisticsKind;

// Criterion 1
const BOX_REL_TOL: f64 = 1e-3;
const RICHARDSON: (f64, f64) = (3.6, 4.4);
// Criterion 2
const NORM_TOL: f64 = 1e-10;
const NORM_STEPS: usize = 10_000;
const WIDTH_REL_TOL: f64 = 5e-3;
// Criterion 3
const REFLECTION_TOL: f64 = 1e-5;
// Criterion 4
const FCS_SUM_TOL: f64 = 1e-9;
const FCS_DET_TOL: f64 = 1e-10;
const FCS_MEAN_TOL: f64 = 1e-10;
const SUBSET_TOL: f64 = 1e-12;
// Criterion 5
const ORDER_TOL: f64 = 1e-9;
const MONOTONE_TOL: f64 = 1e-12;
// Criterion 6
const ZENO_TOL_LOW: f64 = 0.05;
const ZENO_TOL_BRIM: f64 = 0.15;
const ZENO_EXPONENT: f64 = -0.5;
const ZENO_EXPONENT_TOL: f64 = 0.2;
// Criterion 8
const RATE_TOL: f64 = 0.25;
const RATE_RESIDUAL: f64 = 0.05;
const RATE_N_MAX: usize = 6;

/// Long C = 8 run shared by criteria 4, 5, 6 and 8. The step is 100× the
/// default; the per-orbital energy reference keeps it accurate.
const LONG_RUN: &str = "capacity = 8\nn = 1..8\ndt = 2e-3\nt_end = 600\n";
const FIDELITY_RUN: &str = "capacity = 12\nn = 1..12\nt_end = 1e-3\n";
const DETERMINISM_RUN: &str = "capacity = 8\nn = 1..3\ndt = 2e-3\nt_end = 3\n";

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }

    fn error(e: impl std::fmt::Display) -> Self {
        Self::new(false, format!("error: {e}"))
    }
}

fn report(k: usize, title: &str, seconds: f64, v: &Verdict) {
    let tag = if v.pass { "PASS" } else { "FAIL" };
    println!("criterion {k:>2} {tag} [{seconds:7.1} s] {title}: {}", v.detail);
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed().as_secs_f64())
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn gaussian(grid: &Grid, x0: f64, sigma: f64, k0: f64) -> Vec<Complex64> {
    let mut psi: Vec<Complex64> = grid
        .points()
        .map(|x| {
            let u = (x - x0) / sigma;
            Complex64::from_polar((-0.25 * u * u).exp(), k0 * x)
        })
        .collect();
    let n = psi.len();
    psi[0] = zero();
    psi[n - 1] = zero();
    let s = trapezoid_norm_sqr(&psi, grid.dx()).sqrt();
    psi.iter_mut().for_each(|z| *z /= s);
    psi
}

fn packet_set(grid: Grid, packets: &[(f64, f64, f64)]) -> OrbitalSet {
    let orbitals = packets
        .iter()
        .map(|&(x0, sigma, k0)| Orbital { amplitudes: gaussian(&grid, x0, sigma, k0), energy: 0.5 * k0 * k0 })
        .collect();
    OrbitalSet { grid, orbitals }
}

// ---------------------------------------------------------------- criterion 1

fn box_levels(dx: f64) -> Result<Vec<f64>> {
    // A deep constant floor makes the box levels negative so that the bound
    // state solver accepts them; the floor is added back afterwards.
    let floor = 2000.0;
    let grid = Grid::with_spacing(0.0, 1.0, dx)?;
    let h = TridiagonalHamiltonian::from_potential(grid, |_| -floor);
    Ok(bound_states(&h, 8)?.energies().iter().map(|e| e + floor).collect())
}

fn criterion_1() -> Result<Verdict> {
    let coarse = box_levels(1.0 / 100.0)?;
    let mid = box_levels(1.0 / 200.0)?;
    let fine = box_levels(1.0 / 400.0)?;
    let mut worst_rel = 0.0f64;
    let mut ratios = (f64::INFINITY, f64::NEG_INFINITY);
    for n in 1..=8 {
        let exact = (n * n) as f64 * PI * PI / 2.0;
        worst_rel = worst_rel.max((fine[n - 1] - exact).abs() / exact);
        let r = (coarse[n - 1] - mid[n - 1]) / (mid[n - 1] - fine[n - 1]);
        ratios = (ratios.0.min(r), ratios.1.max(r));
    }
    let pass = worst_rel < BOX_REL_TOL && ratios.0 >= RICHARDSON.0 && ratios.1 <= RICHARDSON.1;
    Ok(Verdict::new(
        pass,
        format!(
            "max rel. error {worst_rel:.3e} (< {BOX_REL_TOL:e}), Richardson ratios in [{:.4}, {:.4}]",
            ratios.0, ratios.1
        ),
    ))
}

// ---------------------------------------------------------------- criterion 2

fn criterion_2(prep: &Prepared) -> Result<Verdict> {
    let dt = prep.config.schedule.dt;
    let schedule = Schedule::new(dt, NORM_STEPS as f64 * dt, 1000)?;
    let dx = prep.config.grid.dx();
    let start: Vec<f64> = prep.initial.orbitals.iter().map(|o| o.norm_sqr(&prep.config.grid)).collect();
    let mut worst_norm = 0.0f64;
    let mut steps = 0usize;
    let mut watch = |t: f64, orbs: &[Vec<Complex64>]| -> Result<()> {
        for (psi, n0) in orbs.iter().zip(&start) {
            worst_norm = worst_norm.max((trapezoid_norm_sqr(psi, dx) - n0).abs() / n0);
        }
        steps = (t / dt).round() as usize;
        Ok(())
    };
    evolve(&prep.initial, &prep.quenched, &schedule, &mut watch)?;

    // Free spreading of a Gaussian with initial width σ₀ = 1:
    // σ²(t) = σ₀²(1 + t²/(4σ₀⁴)).
    let grid = Grid::with_spacing(-40.0, 40.0, 1.0 / 100.0)?;
    let h = TridiagonalHamiltonian::from_potential(grid, |_| 0.0);
    let set = packet_set(grid, &[(0.0, 1.0, 0.0)]);
    let mut worst_width = 0.0f64;
    let mut watch = |t: f64, orbs: &[Vec<Complex64>]| -> Result<()> {
        let psi = &orbs[0];
        let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for (x, z) in grid.points().zip(psi) {
            let w = z.norm_sqr();
            m0 += w;
            m1 += w * x;
            m2 += w * x * x;
        }
        let var = m2 / m0 - (m1 / m0).powi(2);
        let exact = 1.0 + t * t / 4.0;
        worst_width = worst_width.max((var.sqrt() - exact.sqrt()).abs() / exact.sqrt());
        Ok(())
    };
    evolve(&set, &h, &Schedule::new(1e-3, 8.0, 400)?, &mut watch)?;

    let pass = steps == NORM_STEPS && worst_norm < NORM_TOL && worst_width < WIDTH_REL_TOL;
    Ok(Verdict::new(
        pass,
        format!(
            "norm drift {worst_norm:.2e} over {steps} steps (< {NORM_TOL:e}); \
             Gaussian width error {worst_width:.2e} (< {WIDTH_REL_TOL:e})"
        ),
    ))
}

// ---------------------------------------------------------------- criterion 3

fn criterion_3() -> Result<Verdict> {
    let cap = CapParams::with_width(CapParams::DEFAULT_WIDTH);
    let k_min = (2.0 * cap.e_min).sqrt();
    // (x₀, σ, k₀): packets at the escape energy of the deepest C = 8 level
    // and at the layer's e_min, sent to each edge.
    let packets = [(5.0, 2.0, 3.0), (5.0, 2.0, -3.0), (5.0, 5.0, k_min), (5.0, 5.0, -k_min)];
    let t_end = 50.0;
    let dt = 2e-3;
    let dx = 1.0 / 400.0;
    let run = |x_min: f64, x_max: f64| -> Result<(Grid, Vec<Vec<Complex64>>)> {
        let grid = Grid::with_spacing(x_min, x_max, dx)?;
        let h = TridiagonalHamiltonian::from_potential(grid, |_| 0.0).with_absorber(cap_values(&grid, &cap)?)?;
        let set = packet_set(grid, &packets);
        let out = evolve(&set, &h, &Schedule::new(dt, t_end, usize::MAX)?, &mut |_: f64, _: &[Vec<Complex64>]| Ok(()))?;
        Ok((grid, out.orbitals.into_iter().map(|o| o.amplitudes).collect()))
    };
    let (g, test) = run(-20.0, 30.0)?;
    // Four times the span, extended equally on both sides.
    let (g_ref, reference) = run(-95.0, 105.0)?;
    let (lo, hi) = cap.interior(&g);
    let offset = g_ref.nearest_index(g.x_min);
    let mut worst = 0.0f64;
    for (psi, psi_ref) in test.iter().zip(&reference) {
        let diff: Vec<Complex64> = (0..g.n_points)
            .map(|i| if g.x(i) >= lo && g.x(i) <= hi { psi[i] - psi_ref[i + offset] } else { zero() })
            .collect();
        worst = worst.max(trapezoid_norm_sqr(&diff, dx));
    }
    Ok(Verdict::new(
        worst < REFLECTION_TOL,
        format!("worst reflected + residual norm {worst:.2e} (< {REFLECTION_TOL:e}) over 4 packets, E down to e_min = {:.3}", cap.e_min),
    ))
}

// ---------------------------------------------------------------- criterion 4

/// p(n) as the coefficient of zⁿ in det(1 − M + zM), expanded column by column.
fn subset_fcs(m: &CMatrix) -> Vec<f64> {
    let n = m.dim();
    let mut p = vec![0.0; n + 1];
    for mask in 0u32..(1 << n) {
        let b = CMatrix::from_fn(n, |i, j| {
            let id = if i == j { Complex64::new(1.0, 0.0) } else { zero() };
            if mask >> j & 1 == 1 {
                m[(i, j)]
            } else {
                id - m[(i, j)]
            }
        });
        p[mask.count_ones() as usize] += b.det().re;
    }
    p
}

fn random_contraction(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    // Gram–Schmidt on random complex columns gives a unitary U; M = U Λ U†.
    let mut cols: Vec<Vec<Complex64>> = Vec::new();
    while cols.len() < n {
        let mut v: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        for c in &cols {
            let proj: Complex64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            v.iter_mut().zip(c).for_each(|(x, a)| *x -= proj * a);
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    let lambda: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=1.0)).collect();
    CMatrix::from_fn(n, |i, j| (0..n).map(|k| cols[k][i] * lambda[k] * cols[k][j].conj()).sum())
}

#[derive(Default)]
struct FcsAudit {
    samples: usize,
    sum: f64,
    det: f64,
    mean: f64,
}

fn criterion_4(audit: &FcsAudit) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut oracle = 0.0f64;
    let mut cases = 0;
    for n in 1..=4 {
        for _ in 0..100 {
            let m = random_contraction(n, &mut rng);
            let fast = match fcs(&OverlapMatrix::region(m.clone())) {
                Ok(p) => p,
                Err(e) => return Verdict::error(e),
            };
            let slow = subset_fcs(&m);
            oracle = fast.iter().zip(&slow).map(|(a, b)| (a - b).abs()).fold(oracle, f64::max);
            cases += 1;
        }
    }
    let pass = audit.samples > 0
        && audit.sum < FCS_SUM_TOL
        && audit.det < FCS_DET_TOL
        && audit.mean < FCS_MEAN_TOL
        && oracle < SUBSET_TOL;
    Verdict::new(
        pass,
        format!(
            "{} samples x 8 blocks: |sum p - 1| {:.1e}, |p(N) - det M| {:.1e}, |mean - tr M| {:.1e}; \
             subset oracle {:.1e} over {cases} matrices",
            audit.samples, audit.sum, audit.det, audit.mean, oracle
        ),
    )
}

// ---------------------------------------------------------------- criterion 5

#[derive(Default, Debug)]
struct OrderAudit {
    samples: usize,
    worst_gap: f64,
    worst_gap_at: (usize, f64),
    violations: usize,
    worst_rise_p: f64,
    worst_rise_s: f64,
}

fn audit_order(series: &[&DecayTimeSeries]) -> OrderAudit {
    let mut a = OrderAudit::default();
    for s in series {
        for i in 0..s.len() {
            a.samples += 1;
            let gap = s.s[i] - s.p[i];
            if gap > a.worst_gap {
                a.worst_gap = gap;
                a.worst_gap_at = (s.n_particles, s.times[i]);
            }
            if gap > ORDER_TOL {
                a.violations += 1;
            }
            if i > 0 {
                a.worst_rise_p = a.worst_rise_p.max(s.p[i] - s.p[i - 1]);
                a.worst_rise_s = a.worst_rise_s.max(s.s[i] - s.s[i - 1]);
            }
        }
    }
    a
}

fn criterion_5(a: &OrderAudit) -> Verdict {
    let pass = a.violations == 0 && a.worst_rise_p <= MONOTONE_TOL && a.worst_rise_s <= MONOTONE_TOL;
    Verdict::new(
        pass,
        format!(
            "S - P exceeds {ORDER_TOL:e} at {} of {} samples (worst {:.2e} at N = {}, t = {:.4}); \
             largest rise P {:.2e}, S {:.2e} (tol {MONOTONE_TOL:e})",
            a.violations, a.samples, a.worst_gap, a.worst_gap_at.0, a.worst_gap_at.1, a.worst_rise_p, a.worst_rise_s
        ),
    )
}

// ---------------------------------------------------------------- criterion 6

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn criterion_6(rows: &[Analysis]) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    let (mut ns, mut logs) = (Vec::new(), Vec::new());
    for r in rows {
        let tol = if r.n <= 6 { ZENO_TOL_LOW } else { ZENO_TOL_BRIM };
        match r.zeno.tau_z_fit {
            Some(fit) => {
                let dev = fit / r.zeno.tau_z_analytic - 1.0;
                pass &= dev.abs() <= tol;
                parts.push(format!("{}:{:+.2}%", r.n, 100.0 * dev));
                ns.push(r.n as f64);
                logs.push(fit.ln());
            }
            None => {
                pass = false;
                parts.push(format!("{}:no fit", r.n));
            }
        }
    }
    let exponent = if ns.len() >= 2 { slope(&ns, &logs) } else { f64::NAN };
    pass &= (exponent / ZENO_EXPONENT - 1.0).abs() <= ZENO_EXPONENT_TOL;
    Verdict::new(
        pass,
        format!("fit vs analytic tau_Z per N [{}]; exponent {exponent:.3} (target -0.5 +/- 20%)", parts.join(" ")),
    )
}

// ---------------------------------------------------------------- criterion 7

fn criterion_7(preps: &[&Prepared]) -> Verdict {
    let mut checked = 0;
    let mut failures = Vec::new();
    for prep in preps {
        for n in 1..=prep.initial.len() {
            let tau = |s| prep.terms.zeno_time(n, s);
            match (tau(StatisticsKind::Fermions), tau(StatisticsKind::Distinguishable), tau(StatisticsKind::Bosons)) {
                (Ok(f), Ok(d), Ok(b)) => {
                    checked += 1;
                    if !(f >= d && d >= b) {
                        failures.push(format!("C = {} N = {n}", prep.config.trap.capacity));
                    }
                }
                _ => failures.push(format!("C = {} N = {n}: no Zeno time", prep.config.trap.capacity)),
            }
        }
    }
    Verdict::new(
        failures.is_empty(),
        format!("tau(-1) >= tau(0) >= tau(+1) on {checked} orbital sets; violations: [{}]", failures.join(", ")),
    )
}

// ---------------------------------------------------------------- criterion 8

fn criterion_8(rows: &[Analysis]) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for r in rows.iter().filter(|r| r.n <= RATE_N_MAX) {
        let gate = !r.semiclassical_low_confidence;
        let mut cell = format!("{}:", r.n);
        for (name, fit) in [("S", r.fit_s), ("P", r.fit_p)] {
            match fit {
                Some(f) => {
                    let ratio = f.gamma_obs / r.gamma_semiclassical;
                    let ok = (ratio - 1.0).abs() <= RATE_TOL && f.residual < RATE_RESIDUAL;
                    if gate {
                        pass &= ok;
                    }
                    cell.push_str(&format!(" {name} {ratio:.3} (res {:.0e})", f.residual));
                }
                None => {
                    pass &= !gate;
                    cell.push_str(&format!(" {name} no fit"));
                }
            }
        }
        if !gate {
            cell.push_str(" [low confidence, not gated]");
        }
        parts.push(cell);
    }
    Verdict::new(pass, format!("Gamma_fit / Gamma_WKB per N: {}", parts.join("; ")))
}

// ---------------------------------------------------------------- criterion 9

fn criterion_9(rows: &[Analysis], capacity: usize) -> Verdict {
    let from = capacity / 2;
    let fid: Vec<(usize, Option<f64>)> = rows.iter().filter(|r| r.n >= from).map(|r| (r.n, r.zeno.fidelity_at_tq)).collect();
    let values: Option<Vec<f64>> = fid.iter().map(|(_, f)| *f).collect();
    let pass = values.as_ref().is_some_and(|v| v.len() >= 2 && v.windows(2).all(|w| w[1] < w[0]));
    let shown: Vec<String> = fid
        .iter()
        .map(|(n, f)| match f {
            Some(f) => format!("{n}:{f:.9}"),
            None => format!("{n}:none"),
        })
        .collect();
    Verdict::new(pass, format!("C = {capacity}, P(t_q)/P(0) for N >= {from}: [{}]", shown.join(" ")))
}

// --------------------------------------------------------------- criterion 10

fn criterion_10() -> Result<Verdict> {
    let cfg = config(DETERMINISM_RUN);
    let first = execute(Task::Sweep, &cfg)?;
    let second = execute(Task::Sweep, &cfg)?;
    let round_trip = RunConfig::from_text(&cfg.manifest()).ok().as_ref() == Some(&cfg);
    let names: Vec<&String> = first.files.iter().map(|(n, _)| n).collect();
    let same = first.files == second.files;
    Ok(Verdict::new(
        same && round_trip && !names.is_empty(),
        format!(
            "{} files bit-identical across two runs: {same}; manifest round-trips: {round_trip}",
            names.len()
        ),
    ))
}

// ------------------------------------------------------------------------ main

fn config(text: &str) -> RunConfig {
    RunConfig::from_text(text).unwrap_or_else(|e| panic!("acceptance config rejected: {e}"))
}

fn analyse_all(prep: &Prepared, series: &[DecayTimeSeries], head_end: f64) -> Result<Vec<Analysis>> {
    series.iter().map(|s| analyse(prep, s, head_end, true)).collect()
}

fn main() {
    // Plain `cargo test` passes harness flags such as `--quiet`; they do not
    // apply here.
    let mut all = true;
    let mut emit = |k: usize, title: &str, secs: f64, v: Verdict| {
        all &= v.pass;
        report(k, title, secs, &v);
    };

    let (v, s) = timed(|| criterion_1().unwrap_or_else(Verdict::error));
    emit(1, "box eigenvalues and dx convergence", s, v);

    let long_cfg = config(LONG_RUN);
    let long_prep = prepare(&long_cfg).expect("C = 8 preparation");
    let (v, s) = timed(|| criterion_2(&long_prep).unwrap_or_else(Verdict::error));
    emit(2, "unitarity and free dispersion", s, v);

    let (v, s) = timed(|| criterion_3().unwrap_or_else(Verdict::error));
    emit(3, "absorber reflection", s, v);

    // One shared evolution of all eight orbitals, audited sample by sample.
    let mut audit = FcsAudit::default();
    let (long, long_secs) = timed(|| {
        let grid = long_cfg.grid;
        let region = long_cfg.region;
        let mut observer = |_: f64, orbs: &[Vec<Complex64>]| -> Result<()> {
            let m = region_overlaps(orbs, &grid, &region)?;
            for n in 1..=m.dim() {
                let block = m.leading(n);
                let p = fcs(&block)?;
                let mean: f64 = p.iter().enumerate().map(|(k, pk)| k as f64 * pk).sum();
                audit.sum = audit.sum.max((p.iter().sum::<f64>() - 1.0).abs());
                audit.det = audit.det.max((p[n] - nonescape_prob(&block)?).abs());
                audit.mean = audit.mean.max((mean - block.entries.trace().re).abs());
            }
            audit.samples += 1;
            Ok(())
        };
        let evo = evolve_all_with(&long_prep, &mut observer)?;
        let rows = analyse_all(&long_prep, &evo.series, evo.head_end)?;
        Ok::<_, fockleak::error::Error>((evo, rows))
    });
    let (long_evo, long_rows) = long.expect("C = 8 long run");
    eprintln!("shared C = 8 run: {long_secs:.1} s");

    let fid_cfg = config(FIDELITY_RUN);
    let ((fid_prep, fid_evo, fid_rows), fid_secs) = timed(|| {
        let prep = prepare(&fid_cfg).expect("C = 12 preparation");
        let evo = evolve_all_with(&prep, &mut |_: f64, _: &[Vec<Complex64>]| Ok(())).expect("C = 12 run");
        let rows = analyse_all(&prep, &evo.series, evo.head_end).expect("C = 12 analysis");
        (prep, evo, rows)
    });

    emit(4, "counting statistics identities", long_secs, criterion_4(&audit));

    let mut runs: Vec<&DecayTimeSeries> = long_evo.series.iter().collect();
    runs.extend(fid_evo.series.iter());
    emit(5, "P >= S and monotone decay", long_secs + fid_secs, criterion_5(&audit_order(&runs)));

    emit(6, "Zeno time: analytic vs fitted", long_secs, criterion_6(&long_rows));

    let (v, s) = timed(|| criterion_7(&[&long_prep, &fid_prep]));
    emit(7, "statistics ordering of tau_Z", s, v);

    emit(8, "exponential rates vs WKB", long_secs, criterion_8(&long_rows));

    emit(9, "fidelity at t_q decreases with N", fid_secs, criterion_9(&fid_rows, fid_cfg.trap.capacity));

    let (v, s) = timed(|| criterion_10().unwrap_or_else(Verdict::error));
    emit(10, "bit-identical outputs", s, v);

    if !all {
        std::process::exit(1);
    }
}
