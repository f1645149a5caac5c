//! Cauchy and Beurling transforms of compactly supported grid densities.
//!
//! Both are aperiodic convolutions on a twice-padded grid against kernels
//! integrated exactly over each cell, so piecewise-constant densities are
//! transformed without quadrature error in the kernel. The self cell of both
//! kernels is zero by symmetry of the square.

use num_complex::Complex;
use rayon::prelude::*;

use super::fft::Fft2;
use crate::error::{Error, Result};
use crate::numeric::grid::Grid2D;
use crate::numeric::scalar::Real;

type C64 = Complex<f64>;

/// `sum over the cell corners` of `F` with the mixed-difference signs; equals `i * integral of F''`.
fn corner_difference(d: C64, h: f64, f: impl Fn(C64) -> C64) -> C64 {
    let (x0, x1, y0, y1) = (d.re - h / 2.0, d.re + h / 2.0, d.im - h / 2.0, d.im + h / 2.0);
    (f(C64::new(x1, y1)) - f(C64::new(x0, y1))) - (f(C64::new(x1, y0)) - f(C64::new(x0, y0)))
}

/// `(1/pi) * integral over the cell at offset d of 1/u`.
fn cauchy_cell(d: C64, h: f64) -> C64 {
    if d.norm() < h / 4.0 {
        return C64::new(0.0, 0.0);
    }
    // The log branch cut is kept off the cell by evaluating in the right half-plane; the kernel is odd.
    if d.re < 0.0 {
        return -cauchy_cell(-d, h);
    }
    let i = C64::new(0.0, 1.0);
    -i * corner_difference(d, h, |z| z * z.ln() - z) / std::f64::consts::PI
}

/// `-(1/pi) * integral over the cell at offset d of 1/u^2`.
fn beurling_cell(d: C64, h: f64) -> C64 {
    if d.norm() < h / 4.0 {
        return C64::new(0.0, 0.0);
    }
    // Even kernel.
    if d.re < 0.0 {
        return beurling_cell(-d, h);
    }
    let i = C64::new(0.0, 1.0);
    i * corner_difference(d, h, |z| -z.ln()) / std::f64::consts::PI
}

/// Precomputed kernel spectra for one grid geometry.
pub struct Transforms<T: Real> {
    n: usize,
    fft: Fft2<T>,
    cauchy: Vec<Complex<T>>,
    beurling: Vec<Complex<T>>,
}

impl<T: Real> Transforms<T> {
    pub fn new(n: usize, h: T) -> Self {
        let m = 2 * n;
        let fft = Fft2::new(m);
        let hf = h.f64();
        let build = |k: fn(C64, f64) -> C64| {
            let mut v: Vec<Complex<T>> = (0..m * m)
                .into_par_iter()
                .map(|idx| {
                    let wrap = |k: usize| if k >= n { k as f64 - m as f64 } else { k as f64 };
                    let d = C64::new(wrap(idx % m), wrap(idx / m)) * hf;
                    let v = k(d, hf);
                    Complex::new(T::lit(v.re), T::lit(v.im))
                })
                .collect();
            fft.forward(&mut v);
            v
        };
        let cauchy = build(cauchy_cell);
        let beurling = build(beurling_cell);
        Self { n, fft, cauchy, beurling }
    }

    pub fn for_grid(g: &Grid2D<T>) -> Self {
        Self::new(g.n(), g.spacing())
    }

    fn convolve(&self, a: &[Complex<T>], spectrum: &[Complex<T>]) -> Vec<Complex<T>> {
        let (n, m) = (self.n, 2 * self.n);
        let mut p = vec![Complex::new(T::zero(), T::zero()); m * m];
        p.par_chunks_mut(m).take(n).enumerate().for_each(|(i, row)| row[..n].copy_from_slice(&a[i * n..(i + 1) * n]));
        self.fft.forward(&mut p);
        p.par_iter_mut().zip(spectrum.par_iter()).for_each(|(v, k)| *v = *v * *k);
        self.fft.inverse(&mut p);
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            out.extend_from_slice(&p[i * m..i * m + n]);
        }
        out
    }

    /// `T h` on the grid's own samples.
    pub fn cauchy(&self, a: &[Complex<T>]) -> Vec<Complex<T>> {
        self.convolve(a, &self.cauchy)
    }

    /// `S h` on the grid's own samples.
    pub fn beurling(&self, a: &[Complex<T>]) -> Vec<Complex<T>> {
        self.convolve(a, &self.beurling)
    }
}

fn check_padding<T: Real>(h: &Grid2D<T>) -> Result<()> {
    match h.boundary_nonzero() {
        0 => Ok(()),
        k => Err(Error::Padding(k)),
    }
}

/// `T h(z) = (1/pi) integral h(zeta) / (z - zeta) dA(zeta)`.
pub fn cauchy_transform<T: Real>(h: &Grid2D<T>) -> Result<Grid2D<T>> {
    check_padding(h)?;
    h.with_values(Transforms::for_grid(h).cauchy(h.values()))
}

/// `S h = d/dz (T h)`, principal value `-(1/pi) integral h(zeta) / (z - zeta)^2 dA(zeta)`.
pub fn beurling_transform<T: Real>(h: &Grid2D<T>) -> Result<Grid2D<T>> {
    check_padding(h)?;
    h.with_values(Transforms::for_grid(h).beurling(h.values()))
}

/// Periodic Fourier multiplier `conj(xi)/xi` on the grid itself, zero mode set to 0.
///
/// Exactly unitary on periodic data; a reference for the convolution form,
/// not used by the solver.
pub fn beurling_multiplier_periodic<T: Real>(h: &Grid2D<T>) -> Result<Grid2D<T>> {
    h.with_values(apply_multiplier(h.values(), h.n()))
}

/// The multiplier `conj(xi)/xi` applied on the twice-padded grid and cropped back.
pub fn beurling_multiplier<T: Real>(h: &Grid2D<T>) -> Result<Grid2D<T>> {
    check_padding(h)?;
    let (n, m) = (h.n(), 2 * h.n());
    let mut p = vec![Complex::new(T::zero(), T::zero()); m * m];
    for i in 0..n {
        p[i * m..i * m + n].copy_from_slice(&h.values()[i * n..(i + 1) * n]);
    }
    let p = apply_multiplier(&p, m);
    h.with_values((0..n).flat_map(|i| p[i * m..i * m + n].iter().copied()).collect())
}

fn apply_multiplier<T: Real>(a: &[Complex<T>], n: usize) -> Vec<Complex<T>> {
    let fft = Fft2::new(n);
    let mut v = a.to_vec();
    fft.forward(&mut v);
    let freq = |k: usize| if k >= n / 2 { k as f64 - n as f64 } else { k as f64 };
    v.par_iter_mut().enumerate().for_each(|(idx, x)| {
        let xi = C64::new(freq(idx % n), freq(idx / n));
        if xi.norm() == 0.0 {
            *x = Complex::new(T::zero(), T::zero());
        } else {
            let m = xi.conj() / xi;
            *x = *x * Complex::new(T::lit(m.re), T::lit(m.im));
        }
    });
    fft.inverse(&mut v);
    v
}
