use num_complex::Complex64;
use proptest::prelude::*;

use fockleak::absorber::{cap_values, CapParams};
use fockleak::config::RunConfig;
use fockleak::lattice::{bound_states, Grid, OrbitalSet, TridiagonalHamiltonian};
use fockleak::linalg::CMatrix;
use fockleak::observables::{fcs, nonescape_prob, poisson_binomial, OverlapMatrix};
use fockleak::ratefit::fit_exponential;
use fockleak::semiclassical::transmission;
use fockleak::series::Channel;
use fockleak::zeno::{parabola_fit, StatisticsKind, ZenoTerms};

/// U diag(λ) U† with U from Gram–Schmidt on the given columns.
fn hermitian_from(cols: &[Vec<(f64, f64)>], lambdas: &[f64]) -> Option<CMatrix> {
    let n = lambdas.len();
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for c in cols.iter().take(n) {
        let mut v: Vec<Complex64> = c.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
        for b in &basis {
            let proj: Complex64 = b.iter().zip(&v).map(|(a, x)| a.conj() * x).sum();
            v.iter_mut().zip(b).for_each(|(x, a)| *x -= proj * a);
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-2 {
            return None;
        }
        basis.push(v.into_iter().map(|z| z / norm).collect());
    }
    Some(CMatrix::from_fn(n, |i, j| (0..n).map(|k| basis[k][i] * lambdas[k] * basis[k][j].conj()).sum()))
}

fn contraction() -> impl Strategy<Value = Option<CMatrix>> {
    (1usize..=6).prop_flat_map(|n| {
        (
            prop::collection::vec(prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n), n),
            prop::collection::vec(0.0..=1.0f64, n),
        )
            .prop_map(|(cols, l)| hermitian_from(&cols, &l))
    })
}

/// Eigenstates of a small square well, quenched by lowering its right wall.
fn quenched_set(depth: f64, wall: f64, count: usize) -> Option<(OrbitalSet, TridiagonalHamiltonian)> {
    let grid = Grid::new(-3.0, 4.0, 561).ok()?;
    let initial = TridiagonalHamiltonian::from_potential(grid, |x| if x.abs() < 1.0 { -depth } else { 0.0 });
    let set = bound_states(&initial, count).ok()?;
    let quenched = TridiagonalHamiltonian::from_potential(grid, |x| {
        if x.abs() < 1.0 {
            -depth
        } else if x > 1.0 && x < 1.3 {
            -wall * depth
        } else if x >= 1.3 {
            -depth
        } else {
            0.0
        }
    });
    Some((set, quenched))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn poisson_binomial_is_a_distribution(l in prop::collection::vec(0.0..=1.0f64, 0..12)) {
        let p = poisson_binomial(&l);
        prop_assert_eq!(p.len(), l.len() + 1);
        prop_assert!(p.iter().all(|&x| (0.0..=1.0 + 1e-15).contains(&x)));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let mean: f64 = p.iter().enumerate().map(|(k, x)| k as f64 * x).sum();
        prop_assert!((mean - l.iter().sum::<f64>()).abs() < 1e-12);
        prop_assert!((p[l.len()] - l.iter().product::<f64>()).abs() < 1e-14);
        prop_assert!((p[0] - l.iter().map(|x| 1.0 - x).product::<f64>()).abs() < 1e-14);
    }

    #[test]
    fn fcs_identities(m in contraction()) {
        let Some(m) = m else { return Ok(()) };
        let n = m.dim();
        let om = OverlapMatrix::region(m.clone());
        let p = fcs(&om).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!((p[n] - nonescape_prob(&om).unwrap()).abs() < 1e-12);
        let mean: f64 = p.iter().enumerate().map(|(k, x)| k as f64 * x).sum();
        prop_assert!((mean - m.trace().re).abs() < 1e-12);
    }

    #[test]
    fn statistics_order_zeno_times(depth in 40.0..200.0f64, wall in 0.0..0.9f64, count in 1usize..=3) {
        let Some((set, h)) = quenched_set(depth, wall, count) else { return Ok(()) };
        let terms = ZenoTerms::compute(&set, &h).unwrap();
        for n in 1..=set.len() {
            let t = |s| terms.zeno_time(n, s).unwrap();
            let (f, d, b) = (t(StatisticsKind::Fermions), t(StatisticsKind::Distinguishable), t(StatisticsKind::Bosons));
            prop_assert!(f >= d && d >= b, "N = {}: {} {} {}", n, f, d, b);
        }
    }

    #[test]
    fn zeno_time_ignores_phases_and_order(
        depth in 40.0..200.0f64,
        wall in 0.0..0.9f64,
        phases in prop::collection::vec(0.0..std::f64::consts::TAU, 3),
        rotate in 0usize..3,
    ) {
        let Some((set, h)) = quenched_set(depth, wall, 3) else { return Ok(()) };
        let mut moved = set.clone();
        for (o, &ph) in moved.orbitals.iter_mut().zip(&phases) {
            let z = Complex64::from_polar(1.0, ph);
            o.amplitudes.iter_mut().for_each(|a| *a *= z);
        }
        moved.orbitals.rotate_left(rotate);
        let a = ZenoTerms::compute(&set, &h).unwrap();
        let b = ZenoTerms::compute(&moved, &h).unwrap();
        for s in StatisticsKind::ALL {
            let (x, y) = (a.zeno_time(3, s).unwrap(), b.zeno_time(3, s).unwrap());
            prop_assert!((x - y).abs() <= 1e-10 * x, "{:?}: {} vs {}", s, x, y);
        }
    }

    #[test]
    fn transmission_decreases_with_action(s1 in 0.0..40.0f64, ds in 1e-6..5.0f64) {
        let (a, b) = (transmission(s1), transmission(s1 + ds));
        prop_assert!(b < a);
        prop_assert!(a <= 0.64 + 1e-15 && b > 0.0);
    }

    #[test]
    fn exponential_fit_recovers_rate(gamma in 1e-3..10.0f64, amp in 0.1..1.0f64, n in 10usize..200) {
        let t_end = 5.0 / gamma;
        let times: Vec<f64> = (0..n).map(|i| t_end * i as f64 / (n - 1) as f64).collect();
        let values: Vec<f64> = times.iter().map(|t| amp * (-gamma * t).exp()).collect();
        let f = fit_exponential(&times, &values, (0.0, t_end), Channel::S).unwrap();
        prop_assert!((f.gamma_obs / gamma - 1.0).abs() < 1e-9);
        prop_assert!((f.intercept - amp.ln()).abs() < 1e-9);
    }

    #[test]
    fn parabola_fit_recovers_zeno_time(tau in 1e-4..10.0f64, n in 10usize..300, reach in 0.05..0.6f64) {
        let t_end = reach * tau;
        let times: Vec<f64> = (0..n).map(|i| t_end * i as f64 / (n - 1) as f64).collect();
        let values: Vec<f64> = times.iter().map(|t| 1.0 - (t / tau).powi(2)).collect();
        let fit = parabola_fit(&times, &values, (0.0, t_end)).unwrap();
        prop_assert!((fit / tau - 1.0).abs() < 1e-9);
    }

    #[test]
    fn absorber_profile_shape(width in 0.5..20.0f64) {
        let grid = Grid::standard();
        let cap = CapParams::with_width(width);
        let w = cap_values(&grid, &cap).unwrap();
        let (lo, hi) = cap.interior(&grid);
        let mid = grid.nearest_index(0.5 * (lo + hi));
        for (i, x) in grid.points().enumerate() {
            if x >= lo && x <= hi {
                prop_assert_eq!(w[i], 0.0);
            }
            prop_assert!(w[i] >= 0.0);
        }
        prop_assert!(w[..mid].windows(2).all(|p| p[0] >= p[1]));
        prop_assert!(w[mid..].windows(2).all(|p| p[0] <= p[1]));
    }

    #[test]
    fn manifest_round_trips(
        capacity in 1usize..=12,
        dt in 1e-5..1e-2f64,
        t_end in 0.1..100.0f64,
        eps in 0.01..0.2f64,
        alpha in -1i32..=1,
    ) {
        let text = format!("capacity = {capacity}\ndt = {dt}\nt_end = {t_end}\nepsilon_tq = {eps}\nalpha = {alpha}\n");
        let cfg = RunConfig::from_text(&text).unwrap();
        let again = RunConfig::from_text(&cfg.manifest()).unwrap();
        prop_assert_eq!(&cfg, &again);
        prop_assert_eq!(cfg.manifest(), again.manifest());
    }
}
