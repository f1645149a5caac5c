use num_complex::Complex;
use qcfold::beltrami::*;
use qcfold::numeric::Grid2D;

type C = Complex<f64>;

fn disk_coverage(n: usize, hw: f64) -> Grid2D<f64> {
    let f = BeltramiField::from_fn_supersampled(C::new(0.0, 0.0), hw, n, 8, |z| {
        if z.norm() < 1.0 {
            C::new(0.5, 0.0)
        } else {
            C::new(0.0, 0.0)
        }
    })
    .unwrap();
    let g = f.grid().clone();
    let v = g.values().iter().map(|v| v * 2.0).collect();
    g.with_values(v).unwrap()
}

/// `(1/pi) integral over the unit disk of 1/(z - zeta)` by polar midpoint quadrature.
fn cauchy_disk_quadrature(z: C) -> C {
    let (nr, na) = (400, 800);
    let mut s = C::new(0.0, 0.0);
    for i in 0..nr {
        let r = (i as f64 + 0.5) / nr as f64;
        for k in 0..na {
            let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / na as f64;
            s += r / (z - C::from_polar(r, t));
        }
    }
    s * (1.0 / nr as f64) * (2.0 * std::f64::consts::PI / na as f64) / std::f64::consts::PI
}

fn nearest(g: &Grid2D<f64>, z: C) -> (C, C) {
    let gm = g.geometry();
    let j = ((z.re - gm.center.re + gm.half_width) / gm.h).floor() as usize;
    let i = ((z.im - gm.center.im + gm.half_width) / gm.h).floor() as usize;
    (g.point(i, j), g.get(i, j))
}

#[test]
fn cauchy_of_disk_indicator() {
    let chi = disk_coverage(512, 1.5);
    let t = cauchy_transform(&chi).unwrap();
    for z in [C::new(2.0, 0.0), C::new(0.5, 0.0), C::new(0.3, 0.2), C::new(-1.2, 0.5)] {
        let z = z * (1.4 / z.norm().max(1.4));
        let (zz, v) = nearest(&t, z);
        let exact = if zz.norm() < 1.0 { zz.conj() } else { zz.inv() };
        assert!((v - exact).norm() < 5e-3, "T chi at {zz}: {v} vs {exact}");
        let q = cauchy_disk_quadrature(zz);
        assert!((q - exact).norm() < 5e-3, "quadrature oracle at {zz}");
    }
    let zero = Grid2D::zeros(C::new(0.0, 0.0), 1.0, 16).unwrap();
    assert_eq!(cauchy_transform(&zero).unwrap().sup_abs(), 0.0);
}

#[test]
fn cauchy_far_value_is_one_half() {
    let chi = disk_coverage(512, 2.5);
    let t = cauchy_transform(&chi).unwrap();
    let (zz, v) = nearest(&t, C::new(2.0, 0.0));
    assert!((v - zz.inv()).norm() < 2e-3);
    assert!((zz.inv().re - 0.5).abs() < 5e-3);
}

#[test]
fn beurling_of_disk_indicator() {
    let chi = disk_coverage(512, 2.5);
    let s = beurling_transform(&chi).unwrap();
    let (zz, v) = nearest(&s, C::new(2.0, 0.0));
    assert!((v + (zz * zz).inv()).norm() < 2e-3, "{v}");
    let (_, v) = nearest(&s, C::new(0.5, 0.0));
    assert!(v.norm() < 1e-2, "{v}");
    let m = beurling_multiplier(&chi).unwrap();
    let (_, v) = nearest(&m, C::new(2.0, 0.0));
    assert!((v + 0.25).norm() < 3e-2, "{v}");
}

#[test]
fn multiplier_is_unitary_on_mean_zero_data() {
    let g = Grid2D::from_fn(C::new(0.0, 0.0), 1.0, 64, |z| C::new((3.0 * z.re).sin(), (5.0 * z.im).cos() * z.re)).unwrap();
    let mean = g.values().iter().sum::<C>() / (64.0 * 64.0);
    let g = g.with_values(g.values().iter().map(|v| v - mean).collect()).unwrap();
    let s = beurling_multiplier_periodic(&g).unwrap();
    assert!((s.l2_norm() - g.l2_norm()).abs() < 1e-10 * g.l2_norm());
}

#[test]
fn padding_is_enforced() {
    let g = Grid2D::from_fn(C::new(0.0, 0.0), 1.0, 16, |_| C::new(0.1, 0.0)).unwrap();
    assert!(matches!(cauchy_transform(&g), Err(qcfold::Error::Padding(_))));
}

fn radial_field(n: usize) -> BeltramiField<f64> {
    BeltramiField::from_fn_supersampled(C::new(0.0, 0.0), 1.5, n, 8, |z| {
        if z.norm() < 1.0 && z.norm() > 0.0 {
            z / z.conj() / 3.0
        } else {
            C::new(0.0, 0.0)
        }
    })
    .unwrap()
}

fn radial_exact(z: C) -> C {
    if z.norm() < 1.0 {
        z * z.norm()
    } else {
        z
    }
}

#[test]
fn identity_for_zero_dilatation() {
    let f = BeltramiField::from_fn(C::new(0.0, 0.0), 1.0, 32, |_| C::new(0.0, 0.0)).unwrap();
    let m = solve_beltrami(&f, 1e-10, 50).unwrap();
    assert_eq!(m.iterations, 0);
    assert_eq!(m.hydro_a, C::new(0.0, 0.0));
    let d = deviation_profile(&m);
    assert_eq!(d.eps_global, 0.0);
    assert_eq!(d.c_fit, 0.0);
}

#[test]
fn radial_oracle_and_refinement() {
    let f1 = radial_field(1024);
    let m1 = solve_beltrami(&f1, 1e-10, 200).unwrap();
    assert!(m1.converged);
    assert!(m1.iterations <= iteration_bound(1e-10, f1.sup_norm()), "{} iterations", m1.iterations);
    assert!(m1.residual < 1e-9);
    assert!(m1.min_jacobian() > 0.0);
    let g = m1.phi.geometry();
    let mut err: f64 = 0.0;
    for (k, p) in m1.phi.values().iter().enumerate() {
        err = err.max((p - radial_exact(g.point(k / g.n, k % g.n))).norm());
    }
    assert!(err < 1e-3, "radial sup error {err}");
    let d = deviation_profile(&m1);
    assert!((d.eps_global - 0.25).abs() < 2e-3, "{}", d.eps_global);
    // The radial map is the identity outside the disk, so a vanishes.
    assert!(m1.hydro_a.norm() < 1e-3 && m1.hydro_a_moment().norm() < 1e-3);

    let m2 = solve_beltrami(&radial_field(512), 1e-10, 200).unwrap();
    let mut diff: f64 = 0.0;
    for (k, p) in m2.phi.values().iter().enumerate() {
        let z = m2.phi.point(k / 512, k % 512);
        if let Some(q) = m1.phi.sample_bilinear(z) {
            diff = diff.max((p - q).norm());
        }
    }
    assert!(diff < 3e-3, "refinement difference {diff}");
}

#[test]
fn far_field_coefficient_matches_moment() {
    let f = BeltramiField::from_fn_supersampled(C::new(0.0, 0.0), 2.0, 256, 4, |z| {
        if (z - C::new(0.2, 0.1)).norm() < 0.5 {
            C::new(0.3, 0.2)
        } else {
            C::new(0.0, 0.0)
        }
    })
    .unwrap();
    let m = solve_beltrami(&f, 1e-12, 200).unwrap();
    assert!((m.hydro_a - m.hydro_a_moment()).norm() < 0.05 * m.hydro_a_moment().norm(), "{} vs {}", m.hydro_a, m.hydro_a_moment());
    let d = deviation_profile(&m);
    assert!(d.c_fit <= d.c_envelope * (1.0 + 1e-12));
}

#[test]
fn translation_consistency() {
    let bump = |c: C| {
        move |z: C| {
            let r = (z - c).norm();
            if r < 0.4 {
                C::new(0.4 * (1.0 - r / 0.4), 0.1)
            } else {
                C::new(0.0, 0.0)
            }
        }
    };
    let n = 256;
    let hw = 2.0;
    let h = 2.0 * hw / n as f64;
    let shift = 16;
    let t = C::new(shift as f64 * h, 0.0);
    let f1 = BeltramiField::from_fn(C::new(0.0, 0.0), hw, n, bump(C::new(-0.3, 0.0))).unwrap();
    let f2 = BeltramiField::from_fn(C::new(0.0, 0.0), hw, n, bump(C::new(-0.3, 0.0) + t)).unwrap();
    let m1 = solve_beltrami(&f1, 1e-12, 200).unwrap();
    let m2 = solve_beltrami(&f2, 1e-12, 200).unwrap();
    let mut diff: f64 = 0.0;
    for i in 0..n {
        for j in 0..n - shift {
            diff = diff.max((m2.phi.get(i, j + shift) - (m1.phi.get(i, j) + t)).norm());
        }
    }
    assert!(diff < 5e-3, "{diff}");
}

#[test]
fn divergent_field_is_rejected() {
    let g = Grid2D::from_fn(C::new(0.0, 0.0), 1.0, 32, |z| if z.norm() < 0.5 { C::new(1.0, 0.0) } else { C::new(0.0, 0.0) }).unwrap();
    assert!(matches!(BeltramiField::new(g), Err(qcfold::Error::Divergence { .. })));
}

#[test]
fn mu_sequence_examples() {
    assert!((mu_for_modulus(102.0f64).unwrap() - 0.01).abs() < 1e-15);
    assert!((mu_for_modulus(12.0f64).unwrap() - 0.1).abs() < 1e-15);
    assert!(mu_for_modulus(9.0f64).is_err());
    let g = qcfold::graph::GraphModel::solve(20.0f64, 40).unwrap();
    let mus: Vec<f64> = (4..=40).map(|n| mu_sequence(&g, n).unwrap()).collect();
    assert!(mus.windows(2).all(|w| w[1] <= w[0]));
    assert!(mu_sequence(&g, 2).is_err());
}

#[test]
fn snapshot_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("phi.bin");
    let g = Grid2D::from_fn(C::new(1.0, -2.0), 0.75, 8, |z| z * z).unwrap();
    write_snapshot(&p, SnapshotKind::Map, &g, &[("iterations", "7".into())]).unwrap();
    let (k, back) = read_snapshot(&p).unwrap();
    assert_eq!(k, SnapshotKind::Map);
    assert_eq!(back, g);
    assert_eq!(std::fs::metadata(&p).unwrap().len(), 32 + 16 * 64);
    let meta: toml::Table = std::fs::read_to_string(snapshot::meta_path(&p)).unwrap().parse().unwrap();
    assert_eq!(meta["iterations"].as_integer(), Some(7));
    assert_eq!(meta["n"].as_integer(), Some(8));
}

#[test]
fn residual_and_iteration_bound_on_field_library() {
    let zero = C::new(0.0, 0.0);
    let library: Vec<(&str, Box<dyn Fn(C) -> C + Sync>)> = vec![
        ("constant disk", Box::new(move |z: C| if z.norm() < 0.8 { C::new(0.3, 0.0) } else { zero })),
        ("radial", Box::new(move |z: C| if z.norm() < 1.0 && z.norm() > 0.0 { z / z.conj() / 3.0 } else { zero })),
        ("shifted complex disk", Box::new(move |z: C| if (z - C::new(0.3, -0.2)).norm() < 0.5 { C::new(0.2, 0.4) } else { zero })),
        ("gaussian", Box::new(move |z: C| C::new(0.0, 0.5) * (-8.0 * z.norm_sqr()).exp() * if z.norm() < 1.2 { 1.0 } else { 0.0 })),
        ("annulus", Box::new(move |z: C| if z.norm() > 0.6 && z.norm() < 0.9 { -0.6 * z * z / z.norm_sqr() } else { zero })),
    ];
    let tol = 1e-10;
    for (name, mu) in &library {
        let f = BeltramiField::from_fn_supersampled(zero, 1.5, 256, 4, mu).unwrap();
        let m = solve_beltrami(&f, tol, 400).unwrap();
        assert!(m.converged, "{name}");
        assert!(m.residual < 10.0 * tol, "{name}: residual {}", m.residual);
        assert!(m.iterations <= iteration_bound(tol, f.sup_norm()), "{name}: {} iterations", m.iterations);
        assert!(m.min_jacobian() > 0.0, "{name}");
    }
}
