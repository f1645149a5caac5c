use proptest::prelude::*;
use qcfold::construction::*;
use qcfold::numeric::ExtReal;
use qcfold::Error;

type E = ExtReal<f64>;

fn toy() -> ConstructionState {
    ConstructionState::run(ConstructionConfig::default()).unwrap()
}

#[test]
fn asymptotics_examples() {
    // Far targets with tiny tolerances straddle both thresholds.
    assert!(check_asymptotics(&E::lit(1e-9), &E::lit(0.01), &E::lit(1e12)).unwrap());
    // dist = 10 leaves factors of order (1 - 2 pi / 10).
    assert!(!check_asymptotics(&E::lit(0.01), &E::lit(0.01), &E::lit(10.0)).unwrap());
    assert!(check_asymptotics(&E::lit(0.01), &E::lit(0.01), &E::lit(6.0)).is_err());
    assert!(check_asymptotics(&E::lit(0.01), &E::lit(0.2), &E::lit(100.0)).is_err());
}

#[test]
fn correction_factors_match_direct_evaluation() {
    let (mu, dist) = (0.003f64, 5000.0f64);
    let t = 2.0 * std::f64::consts::PI / dist;
    let a = (1.0 - t) / (1.0 + t).powi(3) * dist * dist * (1.0 - 2.0 * mu) / (dist + 1.0 - 2.0 * mu).powi(2);
    let b = (1.0 + t) / (1.0 - t).powi(3) * dist * dist * (1.0 + 2.0 * mu) / (dist - 1.0 - 2.0 * mu).powi(2);
    let (la, lb) = correction_factors(&E::lit(mu), &E::lit(dist)).unwrap();
    assert!((la.to_value() - a.ln()).abs() < 1e-13);
    assert!((lb.to_value() - b.ln()).abs() < 1e-13);
}

proptest! {
    #[test]
    fn asymptotics_monotone_in_dist(mu in 1e-6f64..0.12, mu_prev in 1e-6f64..0.12, d in 7.0f64..1e7, f in 1.0f64..100.0) {
        let (mu, mu_prev) = (E::lit(mu), E::lit(mu_prev));
        if check_asymptotics(&mu, &mu_prev, &E::lit(d)).unwrap() {
            prop_assert!(check_asymptotics(&mu, &mu_prev, &E::lit(d * f)).unwrap());
        }
    }
}

#[test]
fn critical_shrink_tends_to_one() {
    let thr2 = (2.0 - 0.01) / (2.0 - 0.02);
    let mut prev = 0.0;
    for m in [10.0f64, 1e2, 1e3, 1e4, 1e6] {
        let v = (thr2 / m).powf(1.0 / (m - 1.0)) * (m - 1.0) / m;
        assert!(v > prev && v < 1.0);
        prev = v;
    }
    assert!(1.0 - prev < 1e-4);
}

#[test]
fn vanishing_power_example() {
    let c = 0.003f64;
    let m = ((c / 2.0).ln() / 0.99f64.ln()).ceil();
    assert!(0.99f64.powf(m) < c / 2.0 && 0.99f64.powf(m - 1.0) >= c / 2.0);
}

#[test]
fn toy_pipeline_three_levels() {
    let s = toy();
    let ns: Vec<usize> = s.levels.iter().map(|l| l.n()).collect();
    assert_eq!(ns, vec![1, 2, 3]);
    for l in &s.levels[1..] {
        let sel = l.selection.as_ref().unwrap();
        assert!(sel.c.is_positive(), "C at level {}", l.k);
        assert!(sel.margins.all_positive(), "margins at level {}: {:?}", l.k, sel.margins);
        let inc = l.inclusion.as_ref().unwrap();
        let exc = l.exclusion.as_ref().unwrap();
        assert!(inc.pass && inc.min_margin.is_positive() && inc.samples >= 256);
        assert!(exc.pass && exc.critical_in_plateau);
        assert_eq!(inc.steps.len(), l.n() + 1);
    }
    assert!(s.all_checks_pass());
    // Disks off the target sequence keep w = delta = 0.
    assert_eq!(s.disk_parameters(7), (0.0, E::zero()));
    assert!(s.chosen.contains_key(&1) && s.chosen.contains_key(&2));
}

#[test]
fn determinism() {
    let (a, b) = (toy(), toy());
    assert_eq!(a.to_record(), b.to_record());
    assert_eq!(a.state_hash(), b.state_hash());
    assert_eq!(a.state_hash().len(), 64);
}

#[test]
fn monotone_safety_in_m() {
    let s = toy();
    for k in 2..=3 {
        for f in [2.0, 4.0, 8.0] {
            let mg = s.margins_with_scaled_m(k, f).unwrap();
            assert!(mg.all_positive(), "level {k}, m x {f}: {mg:?}");
        }
    }
}

#[test]
fn c_above_the_limit_flips_a_margin() {
    let s = toy();
    for k in 2..=3 {
        let sel = s.levels[k - 1].selection.as_ref().unwrap();
        let too_big = sel.e1.min(&sel.e2).scale(1.01);
        let mg = s.margins_with_c(k, too_big).unwrap();
        assert!(!mg.m1_rel.is_positive() || !mg.m2_rel.is_positive());
    }
}

#[test]
fn eq3_slack_halves_with_level() {
    let s = toy();
    let mut prev: Option<E> = None;
    for l in &s.levels[1..] {
        let sel = l.selection.as_ref().unwrap();
        let slack = sel.m.min_c.scale(0.5f64.powi(l.k as i32));
        // The bound and the slack differ by a fixed factor that tower rounding hides, so compare their ratio.
        assert!(sel.margins.eq3_fraction < E::lit(1.0) && sel.margins.eq3_fraction.is_positive());
        if let Some(p) = prev {
            assert!(slack < p);
        }
        prev = Some(slack);
    }
}

#[test]
fn parameter_locality() {
    let mut s = toy();
    let before_levels = s.levels.clone();
    let before_1 = s.chosen[&1].clone();
    s.rechoose(3).unwrap();
    assert_eq!(s.chosen[&1], before_1);
    assert_eq!(s.levels, before_levels);
}

#[test]
fn smaller_delta_keeps_inclusion() {
    let s = toy();
    for k in 2..=3 {
        let level = &s.levels[k - 1];
        let base = s.chosen[&(k - 1)].clone();
        let mut half = base.clone();
        half.delta_scale = 0.5;
        half.delta = base.delta.scale(0.5);
        let a = verify_inclusion(&s, level, &base).unwrap();
        let b = verify_inclusion(&s, level, &half).unwrap();
        assert!(b.pass && b.min_margin_rel >= a.min_margin_rel);
    }
}

#[test]
fn zero_delta_fails_exclusion() {
    let s = toy();
    let level = &s.levels[1];
    let mut c = s.chosen[&1].clone();
    c.delta = E::zero();
    c.delta_scale = 0.0;
    let r = verify_critical_exclusion(&s, level, &c).unwrap();
    assert!(!r.pass);
    assert!(!r.min_margin.is_positive());
}

#[test]
fn exclusion_margin_grows_with_m() {
    let s = toy();
    let level = &s.levels[1];
    let base = s.chosen[&1].clone();
    let mut prev = verify_critical_exclusion(&s, level, &base).unwrap().min_margin_rel;
    for f in [2.0, 4.0] {
        let mut c = base.clone();
        c.m = base.m.scale(f);
        let r = verify_critical_exclusion(&s, level, &c).unwrap().min_margin_rel;
        assert!(r >= prev);
        prev = r;
    }
}

#[test]
fn w_is_the_first_order_preimage() {
    let s = toy();
    let c = &s.chosen[&1];
    let l2 = &s.levels[1];
    // |w - 1/2| = D |z_p - x| with the symbolic real offset 0.
    let expect = l2.ln_d.exp().scale(std::f64::consts::PI);
    let got = c.w_offset.modulus();
    assert!(got.div(&expect).unwrap().ln().unwrap().abs() < E::lit(1e-9));
    assert!(c.permissible && c.contained);
}

#[test]
fn audit_passes_on_toy_run() {
    let s = toy();
    let a = univalence_audit(&s).unwrap();
    assert!(a.pass(), "{:?}", a.failures);
    assert!(a.chain_ratio > E::lit(10.0));
    assert!(a.escape);
    assert_eq!(a.exclusions, s.levels[1..].iter().all(|l| l.exclusion.as_ref().unwrap().pass));
    assert_eq!(a.localization.len(), 2);
}

#[test]
fn audit_needs_three_levels() {
    let s = ConstructionState::run(ConstructionConfig { levels: 2, ..Default::default() }).unwrap();
    assert!(univalence_audit(&s).is_err());
}

#[test]
fn strict_mode() {
    let s = ConstructionState::run(ConstructionConfig { mode: Mode::Strict, ..Default::default() }).unwrap();
    assert!(s.strict_failures().is_empty());
    assert!(s.all_checks_pass());
    let low = ConstructionState::new(ConstructionConfig { mode: Mode::Strict, lambda: 5.0, ..Default::default() });
    assert!(matches!(low, Err(Error::Parameter(_))));
}

#[test]
fn horizon_error_names_the_binding_constraint() {
    let cfg = ConstructionConfig { levels: 3, horizon: 2, ..Default::default() };
    match ConstructionState::run(cfg) {
        Err(Error::Horizon { horizon, binding }) => {
            assert_eq!(horizon, 2);
            assert!(binding.contains("empty scan") || binding.contains("n = "));
        }
        other => panic!("expected a horizon error, got {other:?}"),
    }
    let cfg = ConstructionConfig { dist_override: Some(7.0), ..Default::default() };
    match ConstructionState::run(cfg) {
        Err(Error::Horizon { binding, .. }) => assert!(binding.contains("thresholds"), "{binding}"),
        other => panic!("expected a horizon error, got {other:?}"),
    }
}

#[test]
fn dist_choice_sensitivity() {
    let s = toy();
    let v = s.dist_sensitivity(1, &E::lit(0.01), &[1e-3, 0.25, 0.5, 1.0]).unwrap();
    assert_eq!(v.iter().map(|x| x.1).collect::<Vec<_>>(), vec![false, true, true, true]);
}

#[test]
fn config_rejects_unknown_keys() {
    assert!(toml::from_str::<ConstructionConfig>("lambda = 20.0\nbogus = 1\n").is_err());
    let c: ConstructionConfig = toml::from_str("lambda = 30.0\nmode = \"strict\"\n").unwrap();
    assert_eq!(c.mode, Mode::Strict);
    assert_eq!(c.levels, 3);
}

#[test]
fn csv_has_one_row_per_level() {
    let s = toy();
    let csv = s.audit_csv();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.lines().nth(2).unwrap().starts_with("2,2,"));
}
