use fockleak::config::RunConfig;
use fockleak::pipeline::prepare;
use fockleak::zeno::StatisticsKind;
use fockleak_web::{spectrum, wkb_rates, zeno_times};

#[test]
fn compact_grid_matches_the_full_simulation() {
    let prep = prepare(&RunConfig::from_text("capacity = 8\nn = 8\n").unwrap()).unwrap();
    let s = spectrum(8, 8, 301).unwrap();
    for (a, b) in s.energies().iter().zip(prep.initial.energies()) {
        assert!((a - b).abs() < 1e-9 * b.abs(), "{a} vs {b}");
    }
    let z = zeno_times(8, 8).unwrap();
    for (n, (web, kind)) in [(z.fermions(), StatisticsKind::Fermions), (z.bosons(), StatisticsKind::Bosons)]
        .into_iter()
        .flat_map(|(col, k)| col.into_iter().enumerate().map(move |(i, t)| (i + 1, (t, k))))
    {
        let full = prep.terms.zeno_time(n, kind).unwrap();
        assert!((web / full - 1.0).abs() < 1e-6, "N = {n} {kind:?}: {web} vs {full}");
    }
    let r = wkb_rates(8, 8).unwrap();
    for (n, g) in r.gamma_by_n().iter().enumerate() {
        let full = prep.rates.gamma_for(n + 1);
        assert!((g / full - 1.0).abs() < 1e-6, "N = {}: {g} vs {full}", n + 1);
    }
}

#[test]
fn potential_samples_span_the_trap() {
    let s = spectrum(4, 2, 7).unwrap();
    assert_eq!(s.x(), vec![-1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0]);
    let v0 = 16.0 * std::f64::consts::PI.powi(2);
    assert!((s.initial()[2] + v0).abs() < 1e-9 * v0);
    // Beyond the barrier the quenched trap sits on the −V₀ shelf.
    assert!((s.quenched()[6] + v0).abs() < 1e-9 * v0);
    assert!(s.initial()[6].abs() < 1e-9 * v0);
}

#[test]
fn statistics_ordering() {
    let z = zeno_times(6, 6).unwrap();
    for i in 0..6 {
        assert!(z.fermions()[i] >= z.distinguishable()[i] && z.distinguishable()[i] >= z.bosons()[i]);
    }
}

#[test]
fn rejects_bad_capacity() {
    assert!(spectrum(0, 1, 10).is_err());
    assert!(zeno_times(99, 1).is_err());
    assert!(wkb_rates(3, 40).is_err());
}
