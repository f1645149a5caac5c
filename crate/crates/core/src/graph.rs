//! Half-strip geometry, the disks `D_n`, and the model map `g`.
//!
//! `g` is `sigma(lambda sinh z)` on the half-strip `S+ = {x > 0, |y| < pi/2}`
//! where `Re(lambda sinh z) > 2 pi`, and `rho_w o psi` on each unit disk
//! around `z_n = a_n + i pi`. Everything else (the folding zone) is
//! unsupported. Points off the closed first quadrant are evaluated through
//! `g(-z) = g(z)` and `g(conj z) = conj g(z)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex;
use rayon::prelude::*;

use crate::beltrami::field::BeltramiField;
use crate::disk::{composed_dilatation, composed_disk_map, conformal_radius, DiskMapParams};
use crate::error::{Error, Result};
use crate::numeric::ext::ExtReal;
use crate::numeric::grid::{Grid2D, GridGeometry};
use crate::numeric::logcomplex::LogComplex;
use crate::numeric::roots::newton_bracketed;
use crate::numeric::scalar::{lit, Real};
use crate::numeric::tower::TowerReal;

/// Vertex abscissas and disk centres for one `lambda`.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphModel<T> {
    lambda: T,
    a: Vec<T>,
    k: Vec<Option<u64>>,
}


/// `(a_n, k_n)`: `lambda cosh(a_n) = k_n pi` with `k_n` the integer putting `a_n` nearest `n pi`.
///
/// Once `k_n` exceeds the integer range of the scalar the spacing between
/// admissible roots is below the rounding of `n pi`, so `a_n = n pi` and
/// `k_n` is reported as `None`.
pub fn vertex<T: Real>(lambda: T, n: u64) -> Result<(T, Option<u64>)> {
    if !(lambda > T::one()) {
        return Err(Error::Parameter(format!("lambda = {lambda} must exceed 1")));
    }
    let target = T::from_u64(n).expect("n") * T::PI();
    let x = lambda * target.cosh() / T::PI();
    // Past the scalar's integer range consecutive roots are closer than the rounding of `n pi`.
    if !(x < T::one() / T::epsilon()) {
        return Ok((target, None));
    }
    let kmin = (lambda / T::PI()).ceil();
    let mut best: Option<(T, u64)> = None;
    for k in [x.floor(), x.ceil()] {
        let k = k.max(kmin);
        let rhs = k * T::PI() / lambda;
        let hi = rhs.acosh() + T::one();
        let a = newton_bracketed(|a: T| (lambda * a.cosh() - k * T::PI(), lambda * a.sinh()), T::zero(), hi, lit(1e-13), 200)?;
        let ku = k.to_u64().expect("k fits");
        if best.map_or(true, |(b, _)| (a - target).abs() < (b - target).abs()) {
            best = Some((a, ku));
        }
    }
    let (a, k) = best.ok_or_else(|| Error::Domain("no admissible vertex integer".into()))?;
    Ok((a, Some(k)))
}

impl<T: Real> GraphModel<T> {
    /// Vertices `a_1 ..= a_count`.
    pub fn solve(lambda: T, count: usize) -> Result<Self> {
        let mut a = Vec::with_capacity(count);
        let mut k = Vec::with_capacity(count);
        for n in 1..=count as u64 {
            let (an, kn) = vertex(lambda, n)?;
            a.push(an);
            k.push(kn);
        }
        Ok(Self { lambda, a, k })
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn count(&self) -> usize {
        self.a.len()
    }

    /// `a_n` for `n >= 1`; indices past `count` are solved on demand.
    pub fn a(&self, n: usize) -> T {
        assert!(n >= 1, "vertex indices start at 1");
        match self.a.get(n - 1) {
            Some(&v) => v,
            None => vertex(self.lambda, n as u64).expect("lambda validated at construction").0,
        }
    }

    /// `k_n` with `lambda cosh(a_n) = k_n pi`, when tracked.
    pub fn k(&self, n: usize) -> Option<u64> {
        match self.k.get(n - 1) {
            Some(&v) => v,
            None => vertex(self.lambda, n as u64).ok().and_then(|v| v.1),
        }
    }

    /// `z_n = a_n + i pi`.
    pub fn z(&self, n: usize) -> Complex<T> {
        Complex::new(self.a(n), T::PI())
    }

    /// Index of the disk containing `w` (closed disks, first quadrant).
    pub fn disk_containing(&self, w: Complex<T>) -> Option<usize> {
        if (w.im - T::PI()).abs() > T::one() {
            return None;
        }
        let c = (w.re / T::PI()).round().to_i64()?;
        (c - 1..=c + 1).filter(|&n| n >= 1).map(|n| n as usize).find(|&n| (w - self.z(n)).norm() <= T::one())
    }

    /// Structured text record of the vertex data.
    pub fn to_record(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "lambda = {:e}", self.lambda);
        let _ = writeln!(s, "count = {}", self.count());
        let a: Vec<String> = self.a.iter().map(|v| format!("{v:e}")).collect();
        let _ = writeln!(s, "a = [{}]", a.join(", "));
        let k: Vec<String> = self.k.iter().map(|v| v.map_or("-1".to_string(), |k| k.to_string())).collect();
        let _ = writeln!(s, "k = [{}]", k.join(", "));
        s
    }
}

/// Which neighbour an interval of the imaginary axis abuts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Abutment {
    /// One R-component and one D-component.
    DComponent,
    /// Two R-components.
    RR,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SigmaMode {
    Interior,
    Boundary(Abutment),
}

/// `M(z) = i (z - i)/(z + i)`.
pub fn mobius<T: Real>(z: Complex<T>) -> Complex<T> {
    let i = Complex::new(T::zero(), T::one());
    i * (z - i) / (z + i)
}

/// `M^{-1}(w) = (1 - i w)/(w - i)`.
pub fn mobius_inv<T: Real>(w: Complex<T>) -> Complex<T> {
    let i = Complex::new(T::zero(), T::one());
    (Complex::new(T::one(), T::zero()) - i * w) / (w - i)
}

/// `sigma` on `Re z > 2 pi` (interior) or on the imaginary axis (boundary).
pub fn sigma_eval<T: Real>(z: Complex<T>, mode: SigmaMode) -> Result<Complex<T>> {
    match mode {
        SigmaMode::Interior => {
            if !(z.re > T::PI() + T::PI()) {
                return Err(Error::unsupported(z.re.f64(), z.im.f64(), "folding zone 0 < Re <= 2 pi of sigma"));
            }
            Ok(z.exp())
        }
        SigmaMode::Boundary(ab) => {
            if z.re != T::zero() {
                return Err(Error::unsupported(z.re.f64(), z.im.f64(), "boundary sigma needs Re = 0"));
            }
            let e = Complex::new(z.im.cos(), z.im.sin());
            Ok(match ab {
                Abutment::DComponent => e,
                Abutment::RR if e.im >= T::zero() => mobius(e),
                Abutment::RR => mobius_inv(e),
            })
        }
    }
}

/// Graph plus per-disk parameters; disks without an entry use `(default_m, 0, 0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams<T> {
    pub graph: GraphModel<T>,
    pub default_m: u32,
    pub disks: BTreeMap<usize, DiskMapParams<T>>,
}

impl<T: Real> ModelParams<T> {
    pub fn new(graph: GraphModel<T>, default_m: u32) -> Result<Self> {
        DiskMapParams::new(default_m, T::zero(), Complex::new(T::zero(), T::zero()))?;
        Ok(Self { graph, default_m, disks: BTreeMap::new() })
    }

    pub fn disk(&self, n: usize) -> DiskMapParams<T> {
        self.disks.get(&n).copied().unwrap_or_else(|| {
            DiskMapParams::new(self.default_m, T::zero(), Complex::new(T::zero(), T::zero())).expect("validated")
        })
    }

    /// All chosen parameters permissible for `delta0`.
    pub fn permissible(&self, delta0: T) -> bool {
        self.disks.values().all(|p| p.permissible(delta0))
    }

    pub fn to_record(&self) -> String {
        let mut s = self.graph.to_record();
        let _ = writeln!(s, "default_m = {}", self.default_m);
        for (n, p) in &self.disks {
            let _ = writeln!(
                s,
                "disk.{n} = {{ m = {}, delta = {:e}, w_re = {:e}, w_im = {:e} }}",
                p.m(),
                p.delta(),
                p.w().re,
                p.w().im
            );
        }
        s
    }
}

/// Representative in the closed first quadrant and whether the result must be conjugated.
pub fn canonical<T: Real>(z: Complex<T>) -> (Complex<T>, bool) {
    let mut w = z;
    if w.re < T::zero() {
        w = -w;
    }
    let flip = w.im < T::zero();
    if flip {
        w = w.conj();
    }
    (w, flip)
}

/// Where a first-quadrant point falls.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Region {
    /// Half-strip with `Re(lambda sinh z) > 2 pi`.
    Strip,
    /// On the boundary of the half-strip.
    StripBoundary,
    /// Closed disk `D_n`.
    Disk(usize),
    /// Anywhere else; the map is not given explicitly there.
    Folding,
}

pub fn classify<T: Real>(w: Complex<T>, model: &GraphModel<T>) -> Region {
    let half_pi = T::FRAC_PI_2();
    if w.re == T::zero() && w.im <= half_pi || w.im == half_pi {
        return Region::StripBoundary;
    }
    if w.re > T::zero() && w.im < half_pi {
        let s = (w * model.lambda).sinh();
        return if s.re > T::PI() + T::PI() { Region::Strip } else { Region::Folding };
    }
    match model.disk_containing(w) {
        Some(n) => Region::Disk(n),
        None => Region::Folding,
    }
}

fn lambda_sinh_exact<T: Real>(w: Complex<T>, lambda: T) -> Complex<T> {
    let half_pi = T::FRAC_PI_2();
    if w.im == half_pi {
        return Complex::new(T::zero(), lambda * w.re.cosh());
    }
    if w.re == T::zero() {
        return Complex::new(T::zero(), lambda * w.im.sin());
    }
    w.sinh() * lambda
}

/// The model map `g`.
pub fn model_g<T: Real>(z: Complex<T>, p: &ModelParams<T>) -> Result<Complex<T>> {
    let (w, flip) = canonical(z);
    let v = match classify(w, &p.graph) {
        Region::Strip => sigma_eval(lambda_sinh_exact(w, p.graph.lambda), SigmaMode::Interior)?,
        Region::StripBoundary => sigma_eval(lambda_sinh_exact(w, p.graph.lambda), SigmaMode::Boundary(Abutment::RR))?,
        Region::Disk(n) => {
            let u = w - p.graph.z(n);
            composed_disk_map(if u.norm() > T::one() { u / u.norm() } else { u }, &p.disk(n))?
        }
        Region::Folding => return Err(Error::unsupported(z.re.f64(), z.im.f64(), "folding zone: g is not explicit here")),
    };
    Ok(if flip { v.conj() } else { v })
}

/// Dilatation of `g`: the disk-map dilatation inside each `D_n`, zero on the half-strip.
///
/// `Ok(None)` marks the folding zone.
pub fn model_dilatation<T: Real>(z: Complex<T>, p: &ModelParams<T>) -> Result<Option<Complex<T>>> {
    let (w, flip) = canonical(z);
    let mu = match classify(w, &p.graph) {
        Region::Strip | Region::StripBoundary => Complex::new(T::zero(), T::zero()),
        Region::Disk(n) => {
            let u = w - p.graph.z(n);
            if u.norm() >= T::one() {
                Complex::new(T::zero(), T::zero())
            } else {
                composed_dilatation(u, &p.disk(n))?
            }
        }
        Region::Folding => return Ok(None),
    };
    Ok(Some(if flip { mu.conj() } else { mu }))
}

/// `lambda sinh x` for an extended-range real `x >= 0`.
pub fn lambda_sinh_ext<T: Real>(x: &ExtReal<T>, lambda: T) -> ExtReal<T> {
    if let Some(v) = x.finite() {
        let s = lambda * v.sinh();
        if s.is_finite() {
            return ExtReal::from_value(s).expect("finite");
        }
    }
    if x.is_zero() {
        return ExtReal::zero();
    }
    // sinh x = e^x (1 - e^{-2x}) / 2, and e^{-2x} is below rounding here.
    x.add_value((lambda * lit(0.5)).ln()).exp()
}

/// `ln g'(x) = ln lambda + ln cosh x + lambda sinh x` along the real axis.
pub fn ln_g_prime_ext<T: Real>(x: &ExtReal<T>, lambda: T) -> ExtReal<T> {
    let lc = match x.finite() {
        Some(v) if v.abs() < lit(300.0) => ExtReal::from_value(v.cosh().ln()).expect("finite"),
        _ => x.abs().add_value(-lit::<T>(2.0).ln()),
    };
    lambda_sinh_ext(x, lambda).add(&lc).add_value(lambda.ln())
}

/// Derivative of `g(x) = exp(lambda sinh x)` on the real axis, in log-polar form.
pub fn g_real_derivative<T: Real>(x: T, lambda: T) -> Result<LogComplex<T>> {
    let s = lambda * x.sinh();
    if !(s > T::PI() + T::PI()) {
        return Err(Error::unsupported(x.f64(), 0.0, "lambda sinh x <= 2 pi"));
    }
    let l = ln_g_prime_ext(&ExtReal::from_value(x)?, lambda);
    Ok(LogComplex::new(l.to_signed_tower(), T::zero()))
}

/// `g(x) = exp(lambda sinh x)` for extended-range reals.
pub fn g_real_ext<T: Real>(x: &ExtReal<T>, lambda: T) -> ExtReal<T> {
    lambda_sinh_ext(x, lambda).exp()
}

/// `x0, g(x0), ..., g^steps(x0)` as towers; requires `x0 >= 1/2`.
pub fn g_orbit_real<T: Real>(x0: T, steps: usize, lambda: T) -> Result<Vec<TowerReal<T>>> {
    if !(x0 >= lit(0.5)) {
        return Err(Error::Parameter(format!("orbit start {x0} < 1/2")));
    }
    if !(lambda > T::one()) {
        return Err(Error::Parameter(format!("lambda = {lambda} must exceed 1")));
    }
    let mut x = ExtReal::from_value(x0)?;
    let mut out = vec![x.to_tower()?];
    for _ in 0..steps {
        x = g_real_ext(&x, lambda);
        out.push(x.to_tower()?);
    }
    Ok(out)
}

/// How samples outside the explicit regions are treated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FoldingPolicy {
    Reject,
    ZeroFill,
}

/// How the field is reduced to grid cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampling {
    /// Value at each cell centre.
    Point,
    /// Cell averages by polar quadrature over each disk's non-conformal annulus; resolves annuli thinner than a cell.
    AreaAverage,
}

/// Samples `mu_g` on the grid geometry of `window`.
pub fn dilatation_field<T: Real>(
    window: &Grid2D<T>,
    p: &ModelParams<T>,
    policy: FoldingPolicy,
    sampling: Sampling,
) -> Result<BeltramiField<T>> {
    let geom = window.geometry();
    let n = window.n();
    let cells: Vec<Result<(Complex<T>, bool)>> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let z = geom.point(idx / n, idx % n);
            match model_dilatation(z, p)? {
                Some(mu) => Ok((if sampling == Sampling::Point { mu } else { Complex::new(T::zero(), T::zero()) }, false)),
                None if policy == FoldingPolicy::ZeroFill => Ok((Complex::new(T::zero(), T::zero()), true)),
                None => Err(Error::unsupported(z.re.f64(), z.im.f64(), "folding zone inside the window")),
            }
        })
        .collect();
    let mut values = Vec::with_capacity(n * n);
    let mut filled = 0;
    for c in cells {
        let (v, f) = c?;
        values.push(v);
        filled += f as usize;
    }
    if sampling == Sampling::AreaAverage {
        accumulate_annuli(&mut values, &geom, p)?;
    }
    if filled > 0 {
        log::warn!("dilatation field: {filled} of {} samples in the folding zone were zero-filled", n * n);
    }
    let mut field = BeltramiField::new(window.with_values(values)?)?;
    field.zero_filled = filled;
    Ok(field)
}

fn accumulate_annuli<T: Real>(values: &mut [Complex<T>], geom: &GridGeometry<T>, p: &ModelParams<T>) -> Result<()> {
    let lo = geom.center - Complex::new(geom.half_width, geom.half_width);
    let hi = geom.center + Complex::new(geom.half_width, geom.half_width);
    let kmax = ((lo.re.abs().max(hi.re.abs()) + lit(2.0)) / T::PI()).ceil().to_usize().unwrap_or(0) + 1;
    let h = geom.h;
    let two_pi = T::PI() + T::PI();
    let inv_area = T::one() / (h * h);
    for k in 1..=kmax {
        let dp = p.disk(k);
        if dp.delta() == T::zero() && dp.w().norm() == T::zero() {
            continue;
        }
        let zk = p.graph.z(k);
        let s = conformal_radius(&dp);
        let radii = quadrature_radii(s, dp.r(), h);
        let na = (lit::<T>(8.0) * two_pi / h).ceil().to_usize().unwrap_or(16).max(16 * dp.m() as usize);
        let dth = two_pi / T::from_usize(na).expect("na");
        // Samples are taken in D_k itself and splatted into each reflected copy.
        let samples: Vec<(Complex<T>, Complex<T>)> = (0..na)
            .into_par_iter()
            .flat_map_iter(|a| {
                let th = (T::from_usize(a).expect("a") + lit(0.5)) * dth;
                let e = Complex::new(th.cos(), th.sin());
                let mut out = vec![];
                for &(rho, dr) in &radii {
                    let u = e * rho;
                    if let Ok(mu) = composed_dilatation(u, &dp) {
                        if mu.norm() > T::zero() {
                            out.push((u, mu * (rho * dr * dth)));
                        }
                    }
                }
                out.into_iter()
            })
            .collect();
        for (u, w) in samples {
            for (c, v) in [(zk + u, w), (zk.conj() + u.conj(), w.conj()), (-zk - u, w), (-zk.conj() - u.conj(), w.conj())] {
                if let Some(idx) = cell_index(geom, c) {
                    values[idx] += v * inv_area;
                }
            }
        }
    }
    Ok(())
}

/// Midpoint radii on `[s, 1]`: about four per cell on `[s, r]`, 64 on the bump annulus `[r, 1]`.
fn quadrature_radii<T: Real>(s: T, r: T, h: T) -> Vec<(T, T)> {
    let mut v = vec![];
    let mut push = |a: T, b: T, n: usize| {
        let d = (b - a) / T::from_usize(n).expect("n");
        for i in 0..n {
            v.push((a + (T::from_usize(i).expect("i") + lit(0.5)) * d, d));
        }
    };
    if r > s {
        push(s, r, ((r - s) / h * lit(4.0)).ceil().to_usize().unwrap_or(1).max(1));
    }
    push(r, T::one(), 64);
    v
}

fn cell_index<T: Real>(geom: &GridGeometry<T>, z: Complex<T>) -> Option<usize> {
    let u = (z.re - geom.center.re + geom.half_width) / geom.h;
    let v = (z.im - geom.center.im + geom.half_width) / geom.h;
    if u < T::zero() || v < T::zero() {
        return None;
    }
    let (j, i) = (u.to_usize()?, v.to_usize()?);
    (i < geom.n && j < geom.n).then_some(i * geom.n + j)
}
