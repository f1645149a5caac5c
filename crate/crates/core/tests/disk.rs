use num_complex::Complex;
use proptest::prelude::*;
use qcfold::disk::*;
use qcfold::numeric::wirtinger_fd;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type C = Complex<f64>;

fn params(m: u32, delta: f64) -> DiskMapParams<f64> {
    DiskMapParams::new(m, delta, C::new(0.0, 0.0)).unwrap()
}

proptest! {
    #[test]
    fn plateau_is_holomorphic(m in 2u32..5000, delta in 1e-5f64..0.0625, s in 0.0f64..1.0, th in 0.0f64..6.3) {
        let p = params(m, delta);
        let z = C::from_polar(s * p.r() * (1.0 - 1e-12), th);
        prop_assert_eq!(psi_dilatation(z, &p).unwrap(), C::new(0.0, 0.0));
    }

    #[test]
    fn unit_circle_is_z_to_the_m(m in 2u32..2000, delta in 1e-5f64..0.0625, wr in 0.0f64..0.74, wt in 0.0f64..6.3, th in 0.0f64..6.3) {
        let p = DiskMapParams::new(m, delta, C::from_polar(wr, wt)).unwrap();
        let z = C::from_polar(1.0, th);
        let got = composed_disk_map(z, &p).unwrap();
        prop_assert!((got - z.powi(m as i32)).norm() < 1e-12 * m as f64);
    }
}

/// Differences only `delta z eta`, since `z^m` contributes exactly `m z^{m-1}` and its rounding swamps thin annuli.
/// The plateau identity `psi = z^m + delta z eta` is checked separately.
fn fd_dilatation(p: &DiskMapParams<f64>, z: C, h: f64) -> C {
    let m = p.m() as i32;
    let prof = p.profile();
    let bump = |u: C| Ok(u * (p.delta() * eta_eval(u, &prof)));
    let (a, ab) = wirtinger_fd(bump, z, h).unwrap();
    let (b, bb) = wirtinger_fd(bump, z, h / 2.0).unwrap();
    // One Richardson step removes the h^2 term.
    let (dz, dzb) = ((4.0 * b - a) / 3.0, (4.0 * bb - ab) / 3.0);
    dzb / (dz + p.mf() * z.powi(m - 1))
}

#[test]
fn closed_form_dilatation_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let m = rng.gen_range(20..=10_000u32);
        let delta = 10f64.powf(rng.gen_range(-4.0..(0.06f64).log10()));
        let p = params(m, delta);
        let width = 1.0 - p.r();
        let h = 1e-4 * width;
        for _ in 0..50 {
            let rad = p.r() + width * rng.gen_range(0.01..0.99);
            let z = C::from_polar(rad, rng.gen_range(0.0..std::f64::consts::TAU));
            let mu = psi_dilatation(z, &p).unwrap();
            let fd = fd_dilatation(&p, z, h);
            // Relative to |mu|, floored where the bump tail makes mu numerically zero.
            let rel = (fd - mu).norm() / mu.norm().max(1e-6);
            worst = worst.max(rel);
            assert!(rel < 1e-4, "m = {m}, delta = {delta}, z = {z}: {mu} vs {fd}");
        }
    }
    eprintln!("worst relative FD gap {worst:.2e}");
    assert!(worst > 0.0);
}

#[test]
fn psi_is_power_plus_bump() {
    let p = params(300, 0.02);
    let prof = p.profile();
    for k in 0..100 {
        let z = C::from_polar(0.9 + 0.001 * k as f64, 0.37 * k as f64);
        let direct = z.powi(300) + z * (0.02 * eta_eval(z, &prof));
        assert!((psi_eval(z, &p).unwrap() - direct).norm() < 1e-15);
    }
}

#[test]
fn certified_grid_dilatation_below_four_fifths() {
    for m in [20u32, 50, 100, 1000, 10_000] {
        for delta in [1e-4, 1e-3, 0.01, 0.06] {
            let rep = verify_lemma31(&params(m, delta), 256).unwrap();
            assert!(rep.max_dilatation < 0.8 && rep.max_dilatation > 0.0);
            assert!(rep.argmax_radius > rep.plateau_radius && rep.argmax_radius < 1.0);
            assert!(rep.r_inequality);
        }
    }
    assert!(verify_lemma31(&params(20, 0.01), 64).is_err());
}

#[test]
fn radius_inequality_sweep() {
    let ms: Vec<u32> = vec![2, 3, 20, 100, 1000, 10_000];
    assert_eq!(first_radius_failure(&ms, &[1e-4, 0.01, 0.06]).unwrap(), None);
    // 4 delta / m >= 1 empties the plateau.
    assert!(!radius_inequality_exact(2, 0.5).unwrap());
    assert!(radius_inequality_exact(1, 0.01).is_err());
}

#[test]
fn critical_points_are_roots() {
    for (m, delta) in [(20u32, 0.01), (100, 0.06), (1000, 1e-3), (10_000, 0.05)] {
        let p = params(m, delta);
        let cd = critical_data(&p).unwrap();
        assert_eq!(cd.points.len(), m as usize - 1);
        let mf = m as f64;
        for &c in cd.points.iter().step_by(((m as usize) / 64).max(1)) {
            let (dz, _) = psi_derivatives(c, &p);
            assert!(dz.norm() < 1e-10 * mf, "residual {} at m = {m}", dz.norm());
            // Newton on m z^{m-1} + delta from the formula root.
            let mut z = c;
            let mut steps = 0;
            loop {
                let f = mf * z.powi(m as i32 - 1) + delta;
                let df = mf * (mf - 1.0) * z.powi(m as i32 - 2);
                let dzn = f / df;
                z -= dzn;
                steps += 1;
                if dzn.norm() < 1e-15 * z.norm().max(1.0) || steps > 3 {
                    break;
                }
            }
            assert!(steps <= 3);
        }
    }
}

#[test]
fn critical_values_tend_to_delta() {
    for delta in [1e-3, 0.01, 0.06] {
        let mut prev = 0.0;
        for m in [10u32, 100, 1000, 10_000] {
            let cd = critical_data(&params(m, delta)).unwrap();
            let v = cd.values_unshifted[0].norm();
            assert!(v > prev && v < delta);
            assert!(cd.values_unshifted.iter().all(|u| (u.norm() - v).abs() < 1e-12));
            prev = v;
        }
        assert!((prev - delta).abs() < 1e-3);
    }
    let cd = critical_data(&DiskMapParams::new(5, 0.0, C::new(0.2, 0.1)).unwrap()).unwrap();
    assert_eq!(cd.values_shifted, vec![C::new(0.2, 0.1)]);
}

#[test]
fn support_stays_outside_point_nine() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..6 {
        let m = rng.gen_range(100..=10_000u32);
        let delta = rng.gen_range(1e-4..0.0624);
        let w = C::from_polar(rng.gen_range(0.0..0.74), rng.gen_range(0.0..std::f64::consts::TAU));
        let p = DiskMapParams::new(m, delta, w).unwrap();
        assert!(verify_support(&p, 0.9).unwrap(), "m = {m}, delta = {delta}, w = {w}");
        assert!(conformal_radius(&p) > 0.9);
    }
    assert!(verify_support(&params(100, 0.0625), 0.9).is_err());
}

#[test]
fn rho_is_w_translation_near_zero() {
    let w = C::new(0.3, -0.2);
    assert_eq!(rho_eval(C::new(0.1, 0.0), w).unwrap(), C::new(0.4, -0.2));
    assert_eq!(rho_eval(C::new(0.0, 1.0), w).unwrap(), C::new(0.0, 1.0));
    assert!(rho_eval(C::new(0.0, 0.0), C::new(0.75, 0.0)).is_err());
}
