//! Acceptance suite: one PASS/FAIL line per criterion, every tolerance pinned below.
//!
//! `cargo test -p qcfold --test acceptance` prints the table.

use std::io::Write as _;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_complex::Complex;
use num_rational::Ratio;
use qcfold::beltrami::*;
use qcfold::construction::*;
use qcfold::disk::*;
use qcfold::graph::*;
use qcfold::koebe::{phi_prime_bounds, Budget};
use qcfold::numeric::{tower_compare, wirtinger_fd, ExtReal, Grid2D, TowerReal};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type C = Complex<f64>;

const SEED: u64 = 20;

// 1
const CERT_M: [u32; 9] = [20, 50, 100, 200, 500, 1000, 2000, 5000, 10_000];
const CERT_DELTA: [f64; 7] = [1e-4, 3e-4, 1e-3, 3e-3, 0.01, 0.03, 0.06];
const DILATATION_BOUND: f64 = 0.8;
const LEMMA_GRID: usize = 256;
const FD_POINTS: usize = 1000;
const FD_REL_TOL: f64 = 1e-4;
/// Dilatations below this are treated as zero in the relative FD comparison.
const FD_FLOOR: f64 = 1e-6;
const LIMIT_1: Duration = Duration::from_secs(300);
// 2
const LIMIT_2: Duration = Duration::from_secs(1);
// 3
const SUPPORT_S: f64 = 0.9;
const SUPPORT_M: [u32; 4] = [100, 1000, 5000, 10_000];
const SUPPORT_DELTA: [f64; 4] = [1e-4, 0.01, 0.06, 0.0624];
const SUPPORT_W: f64 = 0.74;
// 4
const CRIT_RESIDUAL: f64 = 1e-10;
const CRIT_VALUE_M: u32 = 10_000;
const CRIT_VALUE_TOL: f64 = 1e-3;
// 5
const RADIAL_K: f64 = 1.0 / 3.0;
const RADIAL_N: usize = 1024;
const RADIAL_TOL: f64 = 1e-3;
const SOLVER_TOL: f64 = 1e-10;
const UNITARY_TOL: f64 = 1e-10;
const CHI_TOL: f64 = 1e-3;
const NEUMANN_SLACK: usize = 5;
const LIMIT_5: Duration = Duration::from_secs(60);
// 6
const MECHANISM_M: [u32; 3] = [100, 1000, 10_000];
const LIMIT_6: Duration = Duration::from_secs(120);
// 7
const BUDGET_LAMBDA: f64 = 20.0;
const BUDGET_N: usize = 50;
// 8
const LIMIT_8: Duration = Duration::from_secs(600);
// 9
const CHAIN_RATIO: f64 = 10.0;
// 10
const SYMMETRY_POINTS: usize = 1000;
const SYMMETRY_TOL: f64 = 1e-12;

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t: Instant, limit: Duration) -> std::result::Result<f64, String> {
    let s = t.elapsed().as_secs_f64();
    ensure(t.elapsed() <= limit, || format!("took {s:.1} s, limit {} s", limit.as_secs_f64()))?;
    Ok(s)
}

fn params(m: u32, delta: f64) -> DiskMapParams<f64> {
    DiskMapParams::new(m, delta, C::new(0.0, 0.0)).unwrap()
}

/// FD of `delta z eta` plus the exact `m z^{m-1}`, with one Richardson step.
fn fd_dilatation(p: &DiskMapParams<f64>, z: C, h: f64) -> C {
    let prof = p.profile();
    let bump = |u: C| Ok(u * (p.delta() * eta_eval(u, &prof)));
    let (a, ab) = wirtinger_fd(bump, z, h).unwrap();
    let (b, bb) = wirtinger_fd(bump, z, h / 2.0).unwrap();
    let (dz, dzb) = ((4.0 * b - a) / 3.0, (4.0 * bb - ab) / 3.0);
    dzb / (dz + p.mf() * z.powi(p.m() as i32 - 1))
}

fn criterion_1() -> Check {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    for &m in &CERT_M {
        for &d in &CERT_DELTA {
            let r = verify_lemma31(&params(m, d), LEMMA_GRID).map_err(|e| e.to_string())?;
            ensure(r.max_dilatation < DILATATION_BOUND, || format!("m = {m}, delta = {d}: sup {}", r.max_dilatation))?;
            ensure(r.argmax_radius > r.plateau_radius && r.argmax_radius < 1.0, || format!("m = {m}, delta = {d}: sup off the annulus"))?;
            worst = worst.max(r.max_dilatation);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut gap: f64 = 0.0;
    for _ in 0..FD_POINTS {
        let m = CERT_M[rng.gen_range(0..CERT_M.len())];
        let d = CERT_DELTA[rng.gen_range(0..CERT_DELTA.len())];
        let p = params(m, d);
        let width = 1.0 - p.r();
        let z = C::from_polar(p.r() + width * rng.gen_range(0.01..0.99), rng.gen_range(0.0..std::f64::consts::TAU));
        let mu = psi_dilatation(z, &p).map_err(|e| e.to_string())?;
        let fd = fd_dilatation(&p, z, 1e-4 * width);
        let rel = (fd - mu).norm() / mu.norm().max(FD_FLOOR);
        ensure(rel < FD_REL_TOL, || format!("FD mismatch {rel:.2e} at m = {m}, delta = {d}, z = {z}"))?;
        gap = gap.max(rel);
    }
    let s = within(t, LIMIT_1)?;
    Ok(format!("max |mu| = {worst:.4} over {} pairs, FD gap {gap:.1e}, {s:.1} s", CERT_M.len() * CERT_DELTA.len()))
}

fn criterion_2() -> Check {
    let t = Instant::now();
    let fail = first_radius_failure(&CERT_M, &CERT_DELTA).map_err(|e| e.to_string())?;
    ensure(fail.is_none(), || format!("radius inequality fails at {fail:?}"))?;
    let s = within(t, LIMIT_2)?;
    Ok(format!("exact on {} pairs, {:.0} ms", CERT_M.len() * CERT_DELTA.len(), s * 1e3))
}

fn criterion_3() -> Check {
    let mut count = 0;
    for &m in &SUPPORT_M {
        for &d in &SUPPORT_DELTA {
            for k in 0..5 {
                let w = if k == 0 { C::new(0.0, 0.0) } else { C::from_polar(SUPPORT_W, 1.3 * k as f64) };
                let p = DiskMapParams::new(m, d, w).map_err(|e| e.to_string())?;
                let ok = verify_support(&p, SUPPORT_S).map_err(|e| e.to_string())?;
                ensure(ok, || format!("dilatation inside |z| <= {SUPPORT_S} at m = {m}, delta = {d}, w = {w}"))?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} parameter sets clean on |z| <= {SUPPORT_S}"))
}

fn criterion_4() -> Check {
    let mut worst: f64 = 0.0;
    for &m in &[20u32, 100, 1000, CRIT_VALUE_M] {
        for &d in &[1e-4, 0.01, 0.06] {
            let p = params(m, d);
            let cd = critical_data(&p).map_err(|e| e.to_string())?;
            for &c in &cd.points {
                let r = psi_derivatives(c, &p).0.norm();
                ensure(r < CRIT_RESIDUAL * m as f64, || format!("residual {r:e} at m = {m}, delta = {d}"))?;
                worst = worst.max(r / m as f64);
            }
        }
    }
    let mut gap: f64 = 0.0;
    for &d in &[1e-3, 0.01, 0.06] {
        let cd = critical_data(&params(CRIT_VALUE_M, d)).map_err(|e| e.to_string())?;
        for v in &cd.values_unshifted {
            gap = gap.max((v.norm() - d).abs());
        }
    }
    ensure(gap < CRIT_VALUE_TOL, || format!("|values| - delta = {gap:e} at m = {CRIT_VALUE_M}"))?;
    Ok(format!("residual/m <= {worst:.1e}, ||v| - delta| <= {gap:.1e} at m = {CRIT_VALUE_M}"))
}

fn criterion_5() -> Check {
    let t = Instant::now();
    let f = BeltramiField::from_fn_supersampled(C::new(0.0, 0.0), 1.5, RADIAL_N, 8, |z| {
        if z.norm() < 1.0 && z.norm() > 0.0 {
            z / z.conj() * RADIAL_K
        } else {
            C::new(0.0, 0.0)
        }
    })
    .map_err(|e| e.to_string())?;
    let map = solve_beltrami(&f, SOLVER_TOL, 200).map_err(|e| e.to_string())?;
    let s = within(t, LIMIT_5)?;
    // k = 1/3 gives psi = z |z|^{2k/(1-k)} = z |z| inside the disk.
    let g = map.phi.geometry();
    let mut err: f64 = 0.0;
    for (k, p) in map.phi.values().iter().enumerate() {
        let z = g.point(k / g.n, k % g.n);
        let exact = if z.norm() < 1.0 { z * z.norm() } else { z };
        err = err.max((p - exact).norm());
    }
    ensure(err <= RADIAL_TOL, || format!("radial sup error {err:e}"))?;
    let bound = ((SOLVER_TOL.ln() / f.sup_norm().ln()).ceil() as usize) + NEUMANN_SLACK;
    ensure(map.converged && map.iterations <= bound, || format!("{} iterations, bound {bound}", map.iterations))?;

    let data = Grid2D::from_fn(C::new(0.0, 0.0), 1.0, 64, |z| C::new((3.0 * z.re).sin(), (5.0 * z.im).cos() * z.re)).map_err(|e| e.to_string())?;
    let mean = data.values().iter().sum::<C>() / (64.0 * 64.0);
    let data = data.with_values(data.values().iter().map(|v| v - mean).collect()).map_err(|e| e.to_string())?;
    let sd = beurling_multiplier_periodic(&data).map_err(|e| e.to_string())?;
    let unit = (sd.l2_norm() - data.l2_norm()).abs() / data.l2_norm();
    ensure(unit < UNITARY_TOL, || format!("Beurling norm change {unit:e}"))?;

    let chi = BeltramiField::from_fn_supersampled(C::new(0.0, 0.0), 2.5, 512, 8, |z| if z.norm() < 1.0 { C::new(0.5, 0.0) } else { C::new(0.0, 0.0) })
        .map_err(|e| e.to_string())?;
    let chi = chi.grid().with_values(chi.grid().values().iter().map(|v| v * 2.0).collect()).map_err(|e| e.to_string())?;
    let tc = cauchy_transform(&chi).map_err(|e| e.to_string())?;
    let probes = [(0.2, 0.0), (0.0, 0.5), (-0.3, 0.3), (0.6, 0.0), (0.0, -0.6), (1.3, 0.0), (0.0, -1.5), (2.0, 1.0), (-1.8, 0.0), (1.2, 1.2)];
    let mut chi_err: f64 = 0.0;
    for (x, y) in probes {
        let z = C::new(x, y);
        let exact = if z.norm() < 1.0 { z.conj() } else { z.inv() };
        chi_err = chi_err.max((tc.sample_bilinear(z).ok_or("probe outside window")? - exact).norm());
    }
    ensure(chi_err <= CHI_TOL, || format!("Cauchy transform of the disk off by {chi_err:e}"))?;
    Ok(format!("radial error {err:.1e} in {s:.1} s, {} iterations (bound {bound}), unitarity {unit:.0e}, disk probes {chi_err:.1e}", map.iterations))
}

fn criterion_6() -> Check {
    let mut v = vec![];
    for &m in &MECHANISM_M {
        let t = Instant::now();
        let mut p = ModelParams::new(GraphModel::solve(20.0, 4).map_err(|e| e.to_string())?, 20).map_err(|e| e.to_string())?;
        p.disks.insert(1, DiskMapParams::new(m, 0.05, C::new(0.5, 0.0)).map_err(|e| e.to_string())?);
        let window = Grid2D::zeros(p.graph.z(1), 1.5, 256).map_err(|e| e.to_string())?;
        let f = dilatation_field(&window, &p, FoldingPolicy::ZeroFill, Sampling::AreaAverage).map_err(|e| e.to_string())?;
        let map = solve_beltrami(&f, SOLVER_TOL, 400).map_err(|e| e.to_string())?;
        ensure(map.converged, || format!("solver did not converge at m = {m}"))?;
        within(t, LIMIT_6)?;
        v.push(deviation_profile(&map).eps_global);
    }
    ensure(v.windows(2).all(|w| w[1] < w[0]), || format!("sup |phi - id| not decreasing: {v:?}"))?;
    Ok(format!("sup |phi - id| = {:.2e}, {:.2e}, {:.2e}", v[0], v[1], v[2]))
}

fn criterion_7() -> Check {
    let exact = phi_prime_bounds(Ratio::new(1i64, 32)).map_err(|e| e.to_string())?;
    ensure(exact == (Ratio::new(1, 12), Ratio::new(125, 36)), || format!("phi' bounds {exact:?}"))?;
    let b = Budget::new(BUDGET_LAMBDA, BUDGET_N + 1, true).map_err(|e| e.to_string())?;
    let mut prev: Option<ExtReal<f64>> = None;
    for n in 1..=BUDGET_N {
        let (lo, hi) = b.inverse_derivative_bounds(n).map_err(|e| e.to_string())?;
        ensure(lo <= hi, || format!("lo > hi at n = {n}"))?;
        if let Some(p) = prev {
            ensure(hi < p, || format!("upper bound not decreasing at n = {n}"))?;
        }
        prev = Some(hi);
    }
    Ok(format!("(1/12, 125/36) exact, upper bound decreasing to n = {BUDGET_N}, last {}", prev.unwrap()))
}

fn criterion_8() -> Check {
    let t = Instant::now();
    let cfg = ConstructionConfig { lambda: 20.0, mode: Mode::Toy, levels: 3, ..Default::default() };
    let s = ConstructionState::run(cfg.clone()).map_err(|e| e.to_string())?;
    ensure(s.levels.len() == 3, || format!("{} levels", s.levels.len()))?;
    for l in &s.levels[1..] {
        let sel = l.selection.as_ref().ok_or("level without a selection")?;
        ensure(sel.margins.all_positive(), || format!("margins at level {}: {:?}", l.k, sel.margins))?;
        ensure(l.inclusion.as_ref().is_some_and(|r| r.pass), || format!("inclusion fails at level {}", l.k))?;
        ensure(l.exclusion.as_ref().is_some_and(|r| r.pass), || format!("critical exclusion fails at level {}", l.k))?;
    }
    let again = ConstructionState::run(cfg).map_err(|e| e.to_string())?;
    ensure(s.state_hash() == again.state_hash(), || "state hash differs across reruns".into())?;
    let secs = within(t, LIMIT_8)?;
    let ns: Vec<usize> = s.levels.iter().map(|l| l.n()).collect();
    Ok(format!("n = {ns:?}, hash {}, {secs:.1} s", &s.state_hash()[..12]))
}

fn criterion_9() -> Check {
    let cfg = ConstructionConfig { lambda: 20.0, mode: Mode::Strict, levels: 3, ..Default::default() };
    let s = ConstructionState::run(cfg).map_err(|e| e.to_string())?;
    let a = univalence_audit(&s).map_err(|e| e.to_string())?;
    ensure(a.chain_ratio > ExtReal::lit(CHAIN_RATIO), || format!("chain ratio {}", a.chain_ratio))?;

    // g(0) = sigma(0) = 1 on the boundary and g(-1) = g(1), so all three orbits join the orbit of 1.
    let p = ModelParams::new(GraphModel::solve(20.0, 4).map_err(|e| e.to_string())?, 20).map_err(|e| e.to_string())?;
    let g0 = model_g(C::new(0.0, 0.0), &p).map_err(|e| e.to_string())?;
    ensure((g0 - 1.0).norm() < 1e-15, || format!("g(0) = {g0}"))?;
    let (gp, gm) = (model_g(C::new(1.0, 0.0), &p).map_err(|e| e.to_string())?, model_g(C::new(-1.0, 0.0), &p).map_err(|e| e.to_string())?);
    ensure(gp == gm && gp.re > 1.0, || format!("g(1) = {gp}, g(-1) = {gm}"))?;
    let orbit = g_orbit_real(1.0f64, 6, 20.0).map_err(|e| e.to_string())?;
    ensure(orbit.windows(2).all(|w| tower_compare(&w[0], &w[1]).is_lt()), || "orbit not increasing".into())?;
    let last = orbit.last().unwrap().demote();
    let threshold = TowerReal::new(ESCAPE_DEPTH, 1.0).map_err(|e| e.to_string())?;
    ensure(tower_compare(&last, &threshold).is_gt(), || format!("orbit stops at {last}"))?;

    let level = &s.levels[1];
    let mut zero = s.chosen[&1].clone();
    zero.delta = ExtReal::zero();
    zero.delta_scale = 0.0;
    let control = verify_critical_exclusion(&s, level, &zero).map_err(|e| e.to_string())?;
    ensure(!control.pass, || "delta = 0 control passed critical exclusion".into())?;
    Ok(format!("chain ratio {}, orbit depth {}, delta = 0 control fails as required", a.chain_ratio, last.depth()))
}

fn criterion_10() -> Check {
    let mut p = ModelParams::new(GraphModel::solve(20.0, 8).map_err(|e| e.to_string())?, 20).map_err(|e| e.to_string())?;
    p.disks.insert(1, DiskMapParams::new(20, 0.05, C::new(0.3, -0.4)).map_err(|e| e.to_string())?);
    p.disks.insert(2, DiskMapParams::new(100, 0.01, C::new(-0.6, 0.1)).map_err(|e| e.to_string())?);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut count = 0;
    let mut worst: f64 = 0.0;
    while count < SYMMETRY_POINTS {
        let z = if rng.gen_bool(0.5) {
            C::new(rng.gen_range(0.0..3.0), rng.gen_range(-1.57..1.57))
        } else {
            p.graph.z(rng.gen_range(1..=3)) + C::from_polar(rng.gen_range(0.0..0.999f64).sqrt(), rng.gen_range(0.0..std::f64::consts::TAU))
        };
        let z = if rng.gen_bool(0.5) { -z } else { z };
        let Ok(g) = model_g(z, &p) else { continue };
        let scale = g.norm().max(1.0);
        let a = (model_g(-z, &p).map_err(|e| e.to_string())? - g).norm() / scale;
        let b = (model_g(z.conj(), &p).map_err(|e| e.to_string())? - g.conj()).norm() / scale;
        ensure(a <= SYMMETRY_TOL && b <= SYMMETRY_TOL, || format!("symmetry broken at {z}: {a:e}, {b:e}"))?;
        worst = worst.max(a).max(b);
        count += 1;
    }
    Ok(format!("{count} supported points, worst relative gap {worst:.1e}"))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("disk-map dilatation bound", criterion_1),
        ("plateau radius inequality", criterion_2),
        ("disk-map support", criterion_3),
        ("critical data", criterion_4),
        ("Beltrami solver", criterion_5),
        ("smallness by large m", criterion_6),
        ("Koebe budget", criterion_7),
        ("construction pipeline", criterion_8),
        ("univalence audit", criterion_9),
        ("symmetry", criterion_10),
    ];
    let mut failed = vec![];
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panic: {}", msg.unwrap_or_default()))
        });
        let line = match outcome {
            Ok(detail) => format!("criterion {:>2} {name:<28} PASS  {detail}\n", i + 1),
            Err(detail) => {
                failed.push(i + 1);
                format!("criterion {:>2} {name:<28} FAIL  {detail}\n", i + 1)
            }
        };
        // The raw handle bypasses libtest capture so the lines show without --nocapture.
        let mut out = std::io::stdout().lock();
        let _ = out.write_all(line.as_bytes());
        let _ = out.flush();
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
