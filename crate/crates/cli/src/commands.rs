//! One function per command. Each writes its artifacts into the output directory and returns the failed checks.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex;
use qcfold::beltrami::{deviation_profile, iteration_bound, solve_beltrami, write_snapshot, BeltramiField, SnapshotKind};
use qcfold::construction::{univalence_audit, ConstructionState, Mode};
use qcfold::disk::{eta_eval, psi_dilatation, verify_lemma31, verify_support, DiskMapParams};
use qcfold::graph::{dilatation_field, FoldingPolicy, GraphModel, ModelParams, Sampling};
use qcfold::koebe::{lambda_conditions, Budget};
use qcfold::numeric::{wirtinger_fd, Grid2D};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{FieldKind, RunConfig};
use crate::render::render_escape;

type C = Complex<f64>;

/// Dilatations below this count as zero in the relative finite-difference comparison.
const FD_FLOOR: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    VerifyDiskMaps,
    SolveBeltrami,
    Budget,
    Construct,
    Render,
    Audit,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::VerifyDiskMaps => "verify-disk-maps",
            Command::SolveBeltrami => "solve-beltrami",
            Command::Budget => "budget",
            Command::Construct => "construct",
            Command::Render => "render",
            Command::Audit => "audit",
        }
    }
}

/// Checks that ran; empty `failures` means exit 0.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Outcome {
    pub failures: Vec<String>,
    /// Printed to stdout.
    pub summary: String,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CmdError {
    /// Invalid parameters: exit 1.
    Config(String),
    /// The computation itself failed: exit 2.
    Run(String),
}

impl From<qcfold::Error> for CmdError {
    fn from(e: qcfold::Error) -> Self {
        match e {
            qcfold::Error::Parameter(_) => CmdError::Config(e.to_string()),
            other => CmdError::Run(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CmdError {
    fn from(e: std::io::Error) -> Self {
        CmdError::Run(e.to_string())
    }
}

fn write(out: &Path, name: &str, contents: impl AsRef<[u8]>) -> Result<(), CmdError> {
    std::fs::write(out.join(name), contents)?;
    log::info!("wrote {name}");
    Ok(())
}

fn to_toml<T: Serialize>(v: &T) -> Result<String, CmdError> {
    toml::to_string(v).map_err(|e| CmdError::Run(e.to_string()))
}

pub fn execute(cmd: Command, cfg: &RunConfig, out: &Path) -> Result<Outcome, CmdError> {
    log::info!("{} with seed {}", cmd.name(), cfg.seed);
    match cmd {
        Command::VerifyDiskMaps => verify_disk_maps(cfg, out),
        Command::SolveBeltrami => solve(cfg, out),
        Command::Budget => budget(cfg, out),
        Command::Construct => construct(cfg, out),
        Command::Render => render(cfg, out),
        Command::Audit => audit(cfg, out),
    }
}

/// Finite differences of `delta z eta` plus the exact `m z^{m-1}`, one Richardson step.
fn fd_dilatation(p: &DiskMapParams<f64>, z: C, h: f64) -> qcfold::Result<C> {
    let prof = p.profile();
    let bump = |u: C| Ok(u * (p.delta() * eta_eval(u, &prof)));
    let (a, ab) = wirtinger_fd(bump, z, h)?;
    let (b, bb) = wirtinger_fd(bump, z, h / 2.0)?;
    let (dz, dzb) = ((4.0 * b - a) / 3.0, (4.0 * bb - ab) / 3.0);
    Ok(dzb / (dz + p.mf() * z.powi(p.m() as i32 - 1)))
}

#[derive(Serialize)]
struct VerifyRow {
    m: u32,
    delta: f64,
    w: [f64; 2],
    max_dilatation: f64,
    argmax_radius: f64,
    plateau_radius: f64,
    r_inequality: bool,
    /// Absent when `delta >= 1/16`.
    support: Option<bool>,
    fd_gap: f64,
    pass: bool,
}

#[derive(Serialize)]
struct VerifyReport {
    pass: bool,
    max_dilatation: f64,
    dilatation_bound: f64,
    failures: Vec<String>,
    row: Vec<VerifyRow>,
}

fn verify_disk_maps(cfg: &RunConfig, out: &Path) -> Result<Outcome, CmdError> {
    let v = &cfg.verify_disk_maps;
    let pairs = v.m.len() * v.delta.len() * v.w.len();
    if pairs == 0 {
        return Err(CmdError::Config("verify_disk_maps: empty sweep".into()));
    }
    let per_pair = v.fd_points.div_ceil(pairs);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = vec![];
    let mut failures = vec![];
    for &m in &v.m {
        for &delta in &v.delta {
            for &w in &v.w {
                let p = DiskMapParams::new(m, delta, C::new(w[0], w[1]))?;
                let rep = verify_lemma31(&p, v.grid)?;
                let support = if delta < 1.0 / 16.0 { Some(verify_support(&p, v.support_radius)?) } else { None };
                let width = 1.0 - p.r();
                let mut gap: f64 = 0.0;
                for _ in 0..per_pair {
                    let z = C::from_polar(p.r() + width * rng.gen_range(0.01..0.99), rng.gen_range(0.0..std::f64::consts::TAU));
                    let mu = psi_dilatation(z, &p)?;
                    let fd = fd_dilatation(&p, z, 1e-4 * width)?;
                    gap = gap.max((fd - mu).norm() / mu.norm().max(FD_FLOOR));
                }
                let pass = rep.max_dilatation < v.dilatation_bound && rep.r_inequality && support != Some(false) && gap < v.fd_tolerance;
                if !pass {
                    failures.push(format!(
                        "m = {m}, delta = {delta}, w = {w:?}: sup {} (bound {}), radius inequality {}, support {support:?}, FD gap {gap:e}",
                        rep.max_dilatation, v.dilatation_bound, rep.r_inequality
                    ));
                }
                rows.push(VerifyRow {
                    m,
                    delta,
                    w,
                    max_dilatation: rep.max_dilatation,
                    argmax_radius: rep.argmax_radius,
                    plateau_radius: rep.plateau_radius,
                    r_inequality: rep.r_inequality,
                    support,
                    fd_gap: gap,
                    pass,
                });
            }
        }
    }
    let mut csv = String::from("m,delta,w_re,w_im,max_dilatation,argmax_radius,plateau_radius,r_inequality,support,fd_gap,pass\n");
    for r in &rows {
        let support = r.support.map_or("n/a".to_string(), |s| s.to_string());
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{support},{},{}",
            r.m, r.delta, r.w[0], r.w[1], r.max_dilatation, r.argmax_radius, r.plateau_radius, r.r_inequality, r.fd_gap, r.pass
        );
    }
    let max_dilatation = rows.iter().map(|r| r.max_dilatation).fold(0.0, f64::max);
    let report = VerifyReport { pass: failures.is_empty(), max_dilatation, dilatation_bound: v.dilatation_bound, failures: failures.clone(), row: rows };
    write(out, "verify-disk-maps.csv", &csv)?;
    write(out, "verify-disk-maps.toml", to_toml(&report)?)?;
    let summary = format!("{} parameter sets, max dilatation {max_dilatation:.6} (bound {})", report.row.len(), v.dilatation_bound);
    Ok(Outcome { failures, summary })
}

#[derive(Serialize)]
struct SolveReport {
    pass: bool,
    field: String,
    n: usize,
    iterations: usize,
    iteration_bound: usize,
    converged: bool,
    residual: f64,
    mu_sup: f64,
    min_jacobian: f64,
    /// Absent for fields without a closed form.
    sup_error: Option<f64>,
    eps_global: f64,
    c_fit: f64,
    hydro_a: [f64; 2],
    failures: Vec<String>,
}

fn solve(cfg: &RunConfig, out: &Path) -> Result<Outcome, CmdError> {
    let s = &cfg.solve_beltrami;
    let zero = C::new(0.0, 0.0);
    let k = s.k;
    if !(0.0..1.0).contains(&k) {
        return Err(CmdError::Config(format!("solve_beltrami.k = {k} must lie in [0, 1)")));
    }
    let (field, oracle): (BeltramiField<f64>, Option<Box<dyn Fn(C) -> C>>) = match s.field {
        FieldKind::Radial => {
            let f = BeltramiField::from_fn_supersampled(zero, s.half_width, s.n, s.supersample, move |z: C| {
                if z.norm() < 1.0 && z.norm() > 0.0 {
                    z / z.conj() * k
                } else {
                    zero
                }
            })?;
            let a = 2.0 * k / (1.0 - k);
            (f, Some(Box::new(move |z: C| if z.norm() < 1.0 { z * z.norm().powf(a) } else { z })))
        }
        FieldKind::Disk => {
            let f = BeltramiField::from_fn_supersampled(zero, s.half_width, s.n, s.supersample, move |z: C| if z.norm() < 1.0 { C::new(k, 0.0) } else { zero })?;
            (f, Some(Box::new(move |z: C| if z.norm() < 1.0 { z + z.conj() * k } else { z + k / z })))
        }
        FieldKind::Model => {
            let mut p = ModelParams::new(GraphModel::solve(s.lambda, 4)?, s.m)?;
            p.disks.insert(1, DiskMapParams::new(s.m, s.delta, C::new(s.w[0], s.w[1]))?);
            let window = Grid2D::zeros(p.graph.z(1), s.half_width, s.n)?;
            (dilatation_field(&window, &p, FoldingPolicy::ZeroFill, Sampling::AreaAverage)?, None)
        }
    };
    write_snapshot(&out.join("mu.bin"), SnapshotKind::Dilatation, field.grid(), &[("field", format!("{:?}", s.field).to_lowercase())])?;
    let map = solve_beltrami(&field, s.tol, s.max_iter)?;
    let bound = iteration_bound(s.tol, field.sup_norm());
    let g = map.phi.geometry();
    let sup_error = oracle.map(|f| {
        map.phi.values().iter().enumerate().map(|(i, v)| (v - f(g.point(i / g.n, i % g.n))).norm()).fold(0.0, f64::max)
    });
    let prof = deviation_profile(&map);
    let mut failures = vec![];
    if !map.converged {
        failures.push(format!("no convergence in {} iterations", map.iterations));
    }
    if !(map.residual < 10.0 * s.tol) {
        failures.push(format!("residual {:e} above 10 tol", map.residual));
    }
    if map.iterations > bound {
        failures.push(format!("{} iterations above the Neumann bound {bound}", map.iterations));
    }
    if !(map.min_jacobian() > 0.0) {
        failures.push("non-positive Jacobian".into());
    }
    if let Some(e) = sup_error {
        if !(e <= s.oracle_tolerance) {
            failures.push(format!("sup error {e:e} above {}", s.oracle_tolerance));
        }
    }
    write_snapshot(&out.join("phi.bin"), SnapshotKind::Map, &map.phi, &[("iterations", map.iterations.to_string())])?;
    let mut csv = String::from("radius,sup_deviation\n");
    for (r, d) in &prof.rings {
        let _ = writeln!(csv, "{r},{d}");
    }
    let report = SolveReport {
        pass: failures.is_empty(),
        field: format!("{:?}", s.field).to_lowercase(),
        n: s.n,
        iterations: map.iterations,
        iteration_bound: bound,
        converged: map.converged,
        residual: map.residual,
        mu_sup: field.sup_norm(),
        min_jacobian: map.min_jacobian(),
        sup_error,
        eps_global: prof.eps_global,
        c_fit: prof.c_fit,
        hydro_a: [map.hydro_a.re, map.hydro_a.im],
        failures: failures.clone(),
    };
    write(out, "solve-beltrami.csv", &csv)?;
    write(out, "solve-beltrami.toml", to_toml(&report)?)?;
    let err = sup_error.map_or("no closed form".to_string(), |e| format!("sup error {e:.3e}"));
    let summary = format!("{} iterations (bound {bound}), residual {:.2e}, {err}", map.iterations, map.residual);
    Ok(Outcome { failures, summary })
}

fn budget(cfg: &RunConfig, out: &Path) -> Result<Outcome, CmdError> {
    let c = &cfg.budget;
    let b = Budget::new(c.lambda, c.n_max + 1, c.strict)?;
    let graph = GraphModel::solve(c.lambda, 0)?;
    let (text, csv) = b.report(&graph, c.n_max)?;
    let mut failures = vec![];
    let mut prev = None;
    for n in 1..=c.n_max {
        let (lo, hi) = b.inverse_derivative_bounds(n)?;
        if !(lo <= hi) {
            failures.push(format!("lower above upper at n = {n}"));
        }
        if let Some(p) = prev {
            if !(hi < p) {
                failures.push(format!("upper side not decreasing at n = {n}"));
            }
        }
        prev = Some(hi);
    }
    if c.strict {
        let lc = lambda_conditions(c.lambda)?;
        if !lc.all() {
            failures.push(format!("lambda = {} misses threshold conditions: {lc:?}", c.lambda));
        }
    }
    let onset = b.containment_onset().ok();
    let head = format!("pass = {}\nonset = {}\nfailures = {}\n\n", failures.is_empty(), onset.map_or(-1, |n| n as i64), toml::Value::from(failures.clone()));
    write(out, "budget.csv", &csv)?;
    write(out, "budget.toml", head + &text)?;
    let summary = format!("{} rows, containment from n = {}", c.n_max, onset.map_or("none".into(), |n| n.to_string()));
    Ok(Outcome { failures, summary })
}

/// Fixed-width view of the per-level CSV.
fn table(csv: &str) -> String {
    let rows: Vec<Vec<&str>> = csv.lines().map(|l| l.split(',').collect()).collect();
    let cols = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols).map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.len()).max().unwrap_or(0)).collect();
    let mut s = String::new();
    for r in &rows {
        let cells: Vec<String> = r.iter().enumerate().map(|(i, c)| format!("{c:<w$}", w = widths[i])).collect();
        let _ = writeln!(s, "{}", cells.join("  ").trim_end());
    }
    s
}

fn run_construction(cfg: &RunConfig) -> Result<ConstructionState, CmdError> {
    ConstructionState::run(cfg.construct.clone()).map_err(CmdError::from)
}

fn construct(cfg: &RunConfig, out: &Path) -> Result<Outcome, CmdError> {
    let s = run_construction(cfg)?;
    let mut failures = vec![];
    for l in s.levels.iter().skip(1) {
        let margins = l.selection.as_ref().is_some_and(|x| x.margins.all_positive());
        let inc = l.inclusion.as_ref().is_some_and(|r| r.pass);
        let exc = l.exclusion.as_ref().is_some_and(|r| r.pass);
        if !(margins && inc && exc) {
            failures.push(format!("level {}: margins {margins}, inclusion {inc}, exclusion {exc}", l.k));
        }
    }
    if !s.all_checks_pass() && failures.is_empty() {
        failures.push("construction checks failed".into());
    }
    if s.config.mode == Mode::Strict {
        failures.extend(s.strict_failures());
    }
    let csv = s.audit_csv();
    write(out, "construct.csv", &csv)?;
    write(out, "construct.toml", format!("state_hash = \"{}\"\n\n{}", s.state_hash(), s.to_record()))?;
    Ok(Outcome { failures, summary: format!("{}state hash {}", table(&csv), s.state_hash()) })
}

#[derive(Serialize)]
struct AuditLocalization {
    level: usize,
    ln_radius: String,
    ln_bound: String,
    pass: bool,
}

#[derive(Serialize)]
struct AuditFile {
    pass: bool,
    state_hash: String,
    exclusions: bool,
    chain_ratio: String,
    chain_pass: bool,
    escape: bool,
    escape_depth: u32,
    failures: Vec<String>,
    localization: Vec<AuditLocalization>,
}

fn audit(cfg: &RunConfig, out: &Path) -> Result<Outcome, CmdError> {
    let s = run_construction(cfg)?;
    let a = univalence_audit(&s)?;
    let loc: Vec<AuditLocalization> = a
        .localization
        .iter()
        .map(|l| AuditLocalization { level: l.level, ln_radius: l.ln_radius.to_string(), ln_bound: l.ln_bound.to_string(), pass: l.pass })
        .collect();
    let mut csv = String::from("check,level,value,bound,pass\n");
    let _ = writeln!(csv, "chain_ratio,3,{},{},{}", a.chain_ratio, s.config.audit_ratio_threshold, a.chain_pass);
    let _ = writeln!(csv, "escape_depth,,{},,{}", a.escape_depth, a.escape);
    let _ = writeln!(csv, "critical_exclusion,,,,{}", a.exclusions);
    for l in &loc {
        let _ = writeln!(csv, "localization,{},{},{},{}", l.level, l.ln_radius, l.ln_bound, l.pass);
    }
    let file = AuditFile {
        pass: a.pass(),
        state_hash: s.state_hash(),
        exclusions: a.exclusions,
        chain_ratio: a.chain_ratio.to_string(),
        chain_pass: a.chain_pass,
        escape: a.escape,
        escape_depth: a.escape_depth,
        failures: a.failures.clone(),
        localization: loc,
    };
    write(out, "audit.csv", &csv)?;
    write(out, "audit.toml", to_toml(&file)?)?;
    Ok(Outcome { failures: a.failures.clone(), summary: table(&csv) })
}

#[derive(Serialize)]
struct RenderFile {
    width: usize,
    height: usize,
    escaped: usize,
    left_explicit_zone: usize,
    unsupported: usize,
    bounded: usize,
}

fn render(cfg: &RunConfig, out: &Path) -> Result<Outcome, CmdError> {
    let r = &cfg.render;
    if r.width == 0 || r.height == 0 || !(r.half_width > 0.0) {
        return Err(CmdError::Config("render: empty window".into()));
    }
    let (img, st) = render_escape(r)?;
    write(out, "render.ppm", img.to_ppm())?;
    let file = RenderFile { width: r.width, height: r.height, escaped: st.escaped, left_explicit_zone: st.left, unsupported: st.unsupported, bounded: st.bounded };
    write(out, "render.toml", to_toml(&file)?)?;
    let summary = format!("{}x{} image: {} escaped, {} left the explicit zones, {} unsupported, {} bounded", r.width, r.height, st.escaped, st.left, st.unsupported, st.bounded);
    Ok(Outcome { failures: vec![], summary })
}
