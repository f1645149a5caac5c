//! Quasiregular self-maps of the unit disk.
//!
//! `psi(z) = z^m + delta z eta(z)` interpolates between `z^m + delta z` on the
//! plateau `|z| <= r` and `z^m` on the unit circle; `rho_w` translates the
//! disk of radius 1/8 by `w` and is the identity on the unit circle.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::scalar::{lit, Real};

/// Plateau radius and the smooth radial cutoff built on it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BumpProfile<T> {
    pub r: T,
}

/// `exp(1 + 1/(x^2 - 1))` on `[0, 1)`, zero from 1 on.
pub fn bump_eval<T: Real>(x: T) -> Result<T> {
    if x < T::zero() {
        return Err(Error::Domain(format!("bump argument {x} < 0")));
    }
    if x >= T::one() {
        return Ok(T::zero());
    }
    Ok((T::one() + T::one() / (x * x - T::one())).exp())
}

/// Derivative of [`bump_eval`].
pub fn bump_derivative<T: Real>(x: T) -> T {
    if x <= T::zero() || x >= T::one() {
        return T::zero();
    }
    let q = x * x - T::one();
    let b = (T::one() + T::one() / q).exp();
    b * (-(x + x) / (q * q))
}

impl<T: Real> BumpProfile<T> {
    pub fn new(r: T) -> Result<Self> {
        if !(r > T::zero() && r < T::one()) {
            return Err(Error::Parameter(format!("plateau radius {r} outside (0, 1)")));
        }
        Ok(Self { r })
    }

    /// Radial profile `eta_hat`.
    pub fn eta_hat(&self, x: T) -> T {
        if x <= self.r {
            T::one()
        } else if x >= T::one() {
            T::zero()
        } else {
            bump_eval((x - self.r) / (T::one() - self.r)).expect("non-negative argument")
        }
    }

    /// Radial derivative of `eta_hat`; zero off the open annulus.
    pub fn eta_hat_prime(&self, x: T) -> T {
        if x <= self.r || x >= T::one() {
            return T::zero();
        }
        bump_derivative((x - self.r) / (T::one() - self.r)) / (T::one() - self.r)
    }
}

/// `eta(z) = eta_hat(|z|)`.
pub fn eta_eval<T: Real>(z: Complex<T>, profile: &BumpProfile<T>) -> T {
    profile.eta_hat(z.norm())
}

/// Parameters `(m, delta, w)` of one disk map, with the derived plateau radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiskMapParams<T> {
    m: u32,
    delta: T,
    w: Complex<T>,
    r: T,
}

impl<T: Real> DiskMapParams<T> {
    /// Requires `m >= 2`, `delta >= 0`, `|w| < 3/4` and `4 delta < m`.
    pub fn new(m: u32, delta: T, w: Complex<T>) -> Result<Self> {
        if m < 2 {
            return Err(Error::Parameter(format!("power m = {m} < 2")));
        }
        if !(delta >= T::zero()) || !delta.is_finite() {
            return Err(Error::Parameter(format!("delta = {delta} must be finite and >= 0")));
        }
        if !(w.norm() < lit(0.75)) {
            return Err(Error::Parameter(format!("|w| = {} must be < 3/4", w.norm())));
        }
        let mf = T::from_u32(m).expect("m fits");
        let r = T::one() - lit::<T>(4.0) * delta / mf;
        if !(r > T::zero()) {
            return Err(Error::Parameter(format!("plateau radius 1 - 4 delta / m = {r} is not positive")));
        }
        Ok(Self { m, delta, w, r })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn mf(&self) -> T {
        T::from_u32(self.m).expect("m fits")
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn w(&self) -> Complex<T> {
        self.w
    }

    pub fn r(&self) -> T {
        self.r
    }

    pub fn profile(&self) -> BumpProfile<T> {
        BumpProfile { r: self.r }
    }

    /// `delta < delta0` and `|w| < 3/4`.
    pub fn permissible(&self, delta0: T) -> bool {
        self.delta < delta0 && self.w.norm() < lit(0.75)
    }

    /// Modulus `(delta/m)^{1/(m-1)}` shared by all critical points.
    pub fn critical_radius(&self) -> T {
        (self.delta / self.mf()).powf(T::one() / (self.mf() - T::one()))
    }

    /// Floating check of `r > (delta/m)^{1/(m-1)}`.
    pub fn radius_inequality(&self) -> bool {
        self.r > self.critical_radius()
    }
}

fn check_closed_disk<T: Real>(z: Complex<T>) -> Result<()> {
    // Rounding slack for points computed on the unit circle; `z^m` there carries about `m eps`.
    if z.norm() > T::one() + lit::<T>(1e-10) {
        return Err(Error::Domain(format!("|z| = {} > 1", z.norm())));
    }
    Ok(())
}

fn cpowi<T: Real>(z: Complex<T>, n: u32) -> Complex<T> {
    z.powi(n as i32)
}

/// `psi(z) = z^m + delta z eta(z)` on the closed unit disk.
pub fn psi_eval<T: Real>(z: Complex<T>, p: &DiskMapParams<T>) -> Result<Complex<T>> {
    check_closed_disk(z)?;
    let eta = eta_eval(z, &p.profile());
    Ok(cpowi(z, p.m) + z * (p.delta * eta))
}

/// Closed-form `(psi_z, psi_zbar)`.
pub fn psi_derivatives<T: Real>(z: Complex<T>, p: &DiskMapParams<T>) -> (Complex<T>, Complex<T>) {
    let prof = p.profile();
    let a = z.norm();
    let hp = prof.eta_hat_prime(a);
    let half = lit::<T>(0.5);
    let dz = cpowi(z, p.m - 1) * p.mf() + Complex::new(p.delta * (prof.eta_hat(a) + hp * a * half), T::zero());
    let dzb = if hp == T::zero() { Complex::new(T::zero(), T::zero()) } else { z * z * (p.delta * hp * half / a) };
    (dz, dzb)
}

/// `psi_zbar / psi_z`; exactly zero on the plateau.
pub fn psi_dilatation<T: Real>(z: Complex<T>, p: &DiskMapParams<T>) -> Result<Complex<T>> {
    if z.norm() >= T::one() {
        return Err(Error::Domain(format!("|z| = {} >= 1", z.norm())));
    }
    if z.norm() < p.r {
        return Ok(Complex::new(T::zero(), T::zero()));
    }
    let (dz, dzb) = psi_derivatives(z, p);
    if dz.norm() == T::zero() {
        return Err(Error::SingularDerivative { re: z.re.f64(), im: z.im.f64() });
    }
    Ok(dzb / dz)
}

fn check_w<T: Real>(w: Complex<T>) -> Result<()> {
    if !(w.norm() < lit(0.75)) {
        return Err(Error::Parameter(format!("|w| = {} must be < 3/4", w.norm())));
    }
    Ok(())
}

/// `rho_w(z)`: `z + w` on `|z| <= 1/8`, `z + (8/7)(1 - |z|) w` out to the unit circle.
pub fn rho_eval<T: Real>(z: Complex<T>, w: Complex<T>) -> Result<Complex<T>> {
    check_w(w)?;
    check_closed_disk(z)?;
    let a = z.norm();
    if a <= lit(0.125) {
        return Ok(z + w);
    }
    Ok(z + w * (lit::<T>(8.0 / 7.0) * (T::one() - a.min(T::one()))))
}

/// Closed-form `(rho_z, rho_zbar)`.
pub fn rho_derivatives<T: Real>(z: Complex<T>, w: Complex<T>) -> (Complex<T>, Complex<T>) {
    let a = z.norm();
    if a <= lit(0.125) {
        return (Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::zero()));
    }
    let k = lit::<T>(4.0 / 7.0) / a;
    (Complex::new(T::one(), T::zero()) - w * z.conj() * k, -(w * z * k))
}

/// `rho_zbar / rho_z`.
pub fn rho_dilatation<T: Real>(z: Complex<T>, w: Complex<T>) -> Complex<T> {
    let (dz, dzb) = rho_derivatives(z, w);
    dzb / dz
}

/// Sup of `|rho_dilatation|` over the cell centres of an `n x n` grid on `[-1, 1]^2` inside the unit disk.
pub fn rho_dilatation_sup<T: Real>(w: Complex<T>, n: usize) -> Result<T> {
    check_w(w)?;
    let h = lit::<T>(2.0) / T::from_usize(n).expect("n");
    let c = |k: usize| -T::one() + (T::from_usize(k).expect("k") + lit(0.5)) * h;
    Ok((0..n)
        .into_par_iter()
        .map(|i| {
            let y = c(i);
            (0..n).fold(T::zero(), |m, j| {
                let z = Complex::new(c(j), y);
                if z.norm() <= T::one() {
                    m.max(rho_dilatation(z, w).norm())
                } else {
                    m
                }
            })
        })
        .reduce(T::zero, |a, b| a.max(b)))
}

/// `rho_w(psi(z))`.
pub fn composed_disk_map<T: Real>(z: Complex<T>, p: &DiskMapParams<T>) -> Result<Complex<T>> {
    let u = psi_eval(z, p)?;
    rho_eval(u, p.w)
}

/// Chain rule for `F = rho o psi`: `(F_z, F_zbar)`.
pub fn composed_derivatives<T: Real>(z: Complex<T>, p: &DiskMapParams<T>) -> Result<(Complex<T>, Complex<T>)> {
    let u = psi_eval(z, p)?;
    let (pz, pzb) = psi_derivatives(z, p);
    let (rz, rzb) = rho_derivatives(u, p.w);
    Ok((rz * pz + rzb * pzb.conj(), rz * pzb + rzb * pz.conj()))
}

/// Dilatation of `rho_w o psi`; exactly zero where both factors are conformal.
pub fn composed_dilatation<T: Real>(z: Complex<T>, p: &DiskMapParams<T>) -> Result<Complex<T>> {
    if z.norm() >= T::one() {
        return Err(Error::Domain(format!("|z| = {} >= 1", z.norm())));
    }
    let (fz, fzb) = composed_derivatives(z, p)?;
    if fzb.norm() == T::zero() {
        return Ok(fzb);
    }
    if fz.norm() == T::zero() {
        return Err(Error::SingularDerivative { re: z.re.f64(), im: z.im.f64() });
    }
    Ok(fzb / fz)
}

/// Critical points of `psi` and their images.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalData<T> {
    pub points: Vec<Complex<T>>,
    pub values_unshifted: Vec<Complex<T>>,
    pub values_shifted: Vec<Complex<T>>,
}

/// The `m - 1` roots of `m z^{m-1} = -delta` and their images under `psi` and `rho_w o psi`.
///
/// `delta = 0` yields the single degenerate point `0` with value `w`.
pub fn critical_data<T: Real>(p: &DiskMapParams<T>) -> Result<CriticalData<T>> {
    let zero = Complex::new(T::zero(), T::zero());
    if p.delta == T::zero() {
        return Ok(CriticalData { points: vec![zero], values_unshifted: vec![zero], values_shifted: vec![p.w] });
    }
    let rad = p.critical_radius();
    let k1 = p.mf() - T::one();
    let scale = p.delta * k1 / p.mf();
    let mut data = CriticalData { points: vec![], values_unshifted: vec![], values_shifted: vec![] };
    for k in 0..(p.m - 1) {
        let kk = T::from_u32(k).expect("k");
        let th = (T::PI() + lit::<T>(2.0) * T::PI() * kk) / k1;
        let c = Complex::from_polar(rad, th);
        // psi(c) = c (c^{m-1} + delta) = delta c (m-1)/m on the plateau.
        let v = c * scale;
        data.points.push(c);
        data.values_unshifted.push(v);
        data.values_shifted.push(rho_eval(v, p.w)?);
    }
    Ok(data)
}

/// Outcome of the dilatation and radius checks for one parameter pair.
#[derive(Clone, Debug, PartialEq)]
pub struct Lemma31Report {
    pub m: u32,
    pub delta: f64,
    pub max_dilatation: f64,
    /// Radius at which the sampled maximum occurs.
    pub argmax_radius: f64,
    pub plateau_radius: f64,
    /// `r > (delta/m)^{1/(m-1)}` decided in exact rational arithmetic.
    pub r_inequality: bool,
}

/// Exact decision of `1 - 4 delta/m > (delta/m)^{1/(m-1)}`, i.e. `(1 - 4 delta/m)^{m-1} > delta/m`.
pub fn radius_inequality_exact(m: u32, delta: f64) -> Result<bool> {
    if m < 2 {
        return Err(Error::Parameter(format!("m = {m} < 2")));
    }
    let d = BigRational::from_float(delta).ok_or_else(|| Error::Parameter(format!("delta = {delta} not finite")))?;
    let mm = BigRational::from_integer(BigInt::from(m));
    let q = &d / &mm;
    let r = BigRational::one() - BigRational::from_integer(BigInt::from(4)) * &q;
    if r <= BigRational::from_integer(BigInt::from(0)) {
        return Ok(false);
    }
    Ok(num_traits::pow::Pow::pow(&r, m - 1) > q)
}

/// Samples `|psi_dilatation|` on a polar grid of the closing annulus `r <= |z| < 1`.
///
/// `grid_n` radii by `grid_n` uniform angles plus the two angles where
/// `(m-1) theta` is `0` or `pi`, at which the sup over each circle is attained.
pub fn verify_lemma31<T: Real>(p: &DiskMapParams<T>, grid_n: usize) -> Result<Lemma31Report> {
    if grid_n < 256 {
        return Err(Error::Parameter(format!("grid_n = {grid_n} < 256")));
    }
    let r = p.r;
    let mut angles: Vec<T> = (0..grid_n)
        .map(|k| lit::<T>(2.0) * T::PI() * T::from_usize(k).expect("k") / T::from_usize(grid_n).expect("n"))
        .collect();
    angles.push(T::zero());
    angles.push(T::PI() / (p.mf() - T::one()));
    let width = T::one() - r;
    let best = (0..grid_n)
        .into_par_iter()
        .map(|i| {
            let rad = r + width * (T::from_usize(i).expect("i") + lit(0.5)) / T::from_usize(grid_n).expect("n");
            let mut best = (T::zero(), rad);
            for &th in &angles {
                let z = Complex::from_polar(rad, th);
                if let Ok(mu) = psi_dilatation(z, p) {
                    if mu.norm() > best.0 {
                        best = (mu.norm(), rad);
                    }
                } else {
                    best = (T::infinity(), rad);
                }
            }
            best
        })
        .reduce(|| (T::zero(), T::zero()), |a, b| if b.0 > a.0 { b } else { a });
    Ok(Lemma31Report {
        m: p.m,
        delta: p.delta.f64(),
        max_dilatation: best.0.f64(),
        argmax_radius: best.1.f64(),
        plateau_radius: r.f64(),
        r_inequality: radius_inequality_exact(p.m, p.delta.f64())?,
    })
}

/// Sup of `|psi_dilatation|` over cell centres of an `n x n` grid on `[-1, 1]^2` inside the open disk.
pub fn psi_dilatation_grid_sup<T: Real>(p: &DiskMapParams<T>, n: usize) -> T {
    let h = lit::<T>(2.0) / T::from_usize(n).expect("n");
    let c = |k: usize| -T::one() + (T::from_usize(k).expect("k") + lit(0.5)) * h;
    (0..n)
        .into_par_iter()
        .map(|i| {
            let y = c(i);
            (0..n).fold(T::zero(), |m, j| {
                let z = Complex::new(c(j), y);
                match psi_dilatation(z, p) {
                    Ok(mu) => m.max(mu.norm()),
                    Err(_) => m,
                }
            })
        })
        .reduce(T::zero, |a, b| a.max(b))
}

/// Radius below which `rho_w o psi` is conformal: `r` when `w = 0`, otherwise
/// the largest `s <= r` with `s^m + delta s <= 1/8`.
pub fn conformal_radius<T: Real>(p: &DiskMapParams<T>) -> T {
    if p.w.norm() == T::zero() {
        return p.r;
    }
    let f = |s: T| s.powi(p.m as i32) + p.delta * s - lit(0.125);
    if f(p.r) <= T::zero() {
        return p.r;
    }
    let (mut lo, mut hi) = (T::zero(), p.r);
    for _ in 0..200 {
        let mid = (lo + hi) * lit(0.5);
        if f(mid) <= T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Whether the sampled dilatation of `rho_w o psi` vanishes on `|z| <= s`.
///
/// Samples 64 radii up to and including `s` against 1024 angles plus the
/// extremal angles of `psi`. Requires `delta < 1/16`.
pub fn verify_support<T: Real>(p: &DiskMapParams<T>, s: T) -> Result<bool> {
    if !(p.delta < lit(1.0 / 16.0)) {
        return Err(Error::Parameter(format!("delta = {} must be < 1/16", p.delta)));
    }
    if !(s > T::zero() && s < T::one()) {
        return Err(Error::Parameter(format!("s = {s} outside (0, 1)")));
    }
    let nr = 64usize;
    let na = 1024usize;
    let mut angles: Vec<T> =
        (0..na).map(|k| lit::<T>(2.0) * T::PI() * T::from_usize(k).expect("k") / T::from_usize(na).expect("n")).collect();
    angles.push(T::PI() / (p.mf() - T::one()));
    let clean = (1..=nr).into_par_iter().all(|i| {
        let rad = s * T::from_usize(i).expect("i") / T::from_usize(nr).expect("n");
        angles.iter().all(|&th| matches!(composed_dilatation(Complex::from_polar(rad, th), p), Ok(mu) if mu.norm() == T::zero()))
    });
    Ok(clean)
}

/// Exact rational radius inequality over a sweep; the first failing pair, if any.
pub fn first_radius_failure(ms: &[u32], deltas: &[f64]) -> Result<Option<(u32, f64)>> {
    for &m in ms {
        for &d in deltas {
            if !radius_inequality_exact(m, d)? {
                return Ok(Some((m, d)));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn bump_examples() {
        assert_eq!(bump_eval(0.0f64).unwrap(), 1.0);
        assert!((bump_eval(0.5f64).unwrap() - (-1.0f64 / 3.0).exp()).abs() < 1e-15);
        assert_eq!(bump_eval(2.0f64).unwrap(), 0.0);
        assert!(bump_eval(-0.1f64).is_err());
    }

    #[test]
    fn eta_examples() {
        let p = BumpProfile::new(0.5f64).unwrap();
        assert_eq!(eta_eval(c(0.3, 0.0), &p), 1.0);
        assert!((eta_eval(c(0.75, 0.0), &p) - (-1.0f64 / 3.0).exp()).abs() < 1e-15);
        assert_eq!(eta_eval(c(1.2, 0.0), &p), 0.0);
    }

    #[test]
    fn psi_examples() {
        let p = DiskMapParams::new(4, 0.01, c(0.0, 0.0)).unwrap();
        assert!((psi_eval(c(0.5, 0.0), &p).unwrap() - c(0.0675, 0.0)).norm() < 1e-15);
        assert!((psi_eval(c(0.0, 1.0), &p).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(psi_eval(c(0.0, 0.0), &p).unwrap(), c(0.0, 0.0));
        assert!(psi_eval(c(1.1, 0.0), &p).is_err());
    }

    #[test]
    fn rho_examples() {
        let w = c(0.05, 0.0);
        assert!((rho_eval(c(0.0, 0.0), w).unwrap() - w).norm() < 1e-15);
        assert!((rho_eval(c(0.1, 0.0), w).unwrap() - c(0.15, 0.0)).norm() < 1e-15);
        let u = Complex::from_polar(1.0, 2.3);
        assert!((rho_eval(u, c(0.3, 0.4)).unwrap() - u).norm() < 1e-15);
        assert!(rho_eval(c(0.0, 0.0), c(0.75, 0.0)).is_err());
        assert_eq!(rho_dilatation_sup(c(0.0, 0.0), 256).unwrap(), 0.0);
    }

    #[test]
    fn composed_examples() {
        let p = DiskMapParams::new(4, 0.01, c(0.1, 0.0)).unwrap();
        assert!((composed_disk_map(c(0.0, 0.0), &p).unwrap() - c(0.1, 0.0)).norm() < 1e-15);
        let p = DiskMapParams::new(4, 0.01, c(0.05, 0.0)).unwrap();
        assert!((composed_disk_map(c(0.5, 0.0), &p).unwrap() - c(0.1175, 0.0)).norm() < 1e-15);
        let p = DiskMapParams::new(6, 0.02, c(0.2, -0.3)).unwrap();
        let u = Complex::from_polar(1.0, 0.7);
        assert!((composed_disk_map(u, &p).unwrap() - u.powi(6)).norm() < 1e-14);
    }

    #[test]
    fn plateau_is_conformal() {
        let p = DiskMapParams::new(40, 0.01, c(0.0, 0.0)).unwrap();
        assert_eq!(psi_dilatation(c(0.2, 0.0), &p).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn critical_examples() {
        let p = DiskMapParams::new(2, 0.01, c(0.0, 0.0)).unwrap();
        let d = critical_data(&p).unwrap();
        assert!((d.points[0] - c(-0.005, 0.0)).norm() < 1e-15);
        assert!((d.values_unshifted[0] - c(-2.5e-5, 0.0)).norm() < 1e-18);
        let p = DiskMapParams::new(2, 0.01, c(0.1, 0.0)).unwrap();
        let d = critical_data(&p).unwrap();
        assert!((d.values_shifted[0] - c(0.1 - 2.5e-5, 0.0)).norm() < 1e-16);
        let p = DiskMapParams::new(5, 0.0, c(0.2, 0.1)).unwrap();
        let d = critical_data(&p).unwrap();
        assert_eq!(d.points, vec![c(0.0, 0.0)]);
        assert_eq!(d.values_shifted, vec![c(0.2, 0.1)]);
    }

    #[test]
    fn exact_radius_examples() {
        assert!(radius_inequality_exact(100, 0.01).unwrap());
        assert!(!radius_inequality_exact(2, 0.45).unwrap());
    }
}
