use num_complex::Complex;

use crate::error::{Error, Result};
use crate::numeric::grid::Grid2D;
use crate::numeric::scalar::Real;

/// Sampled Beltrami coefficient with `sup |mu| < 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct BeltramiField<T> {
    grid: Grid2D<T>,
    sup_norm: T,
    support_radius: T,
    /// Samples whose true value is unknown and were set to zero.
    pub zero_filled: usize,
}

impl<T: Real> BeltramiField<T> {
    /// Rejects fields with `sup |mu| >= 1` or non-finite samples.
    pub fn new(grid: Grid2D<T>) -> Result<Self> {
        let mut sup = T::zero();
        let mut rad = T::zero();
        let c = grid.center();
        let geom = grid.geometry();
        for i in 0..grid.n() {
            for j in 0..grid.n() {
                let v = grid.get(i, j).norm();
                if !v.is_finite() {
                    return Err(Error::Parameter(format!("non-finite dilatation sample at ({i}, {j})")));
                }
                if v > T::zero() {
                    sup = sup.max(v);
                    rad = rad.max((geom.point(i, j) - c).norm());
                }
            }
        }
        if sup >= T::one() {
            return Err(Error::Divergence { iterations: 0, change: sup.f64() });
        }
        Ok(Self { grid, sup_norm: sup, support_radius: rad, zero_filled: 0 })
    }

    /// Field sampled pointwise from `mu`.
    pub fn from_fn<F>(center: Complex<T>, half_width: T, n: usize, mu: F) -> Result<Self>
    where
        F: Fn(Complex<T>) -> Complex<T> + Sync,
    {
        Self::new(Grid2D::from_fn(center, half_width, n, mu)?)
    }

    /// Cell averages of `mu` from `s x s` midpoint subsamples per cell.
    pub fn from_fn_supersampled<F>(center: Complex<T>, half_width: T, n: usize, s: usize, mu: F) -> Result<Self>
    where
        F: Fn(Complex<T>) -> Complex<T> + Sync,
    {
        let h = (half_width + half_width) / T::from_usize(n).expect("n");
        let sf = T::from_usize(s).expect("s");
        let inv = T::one() / (sf * sf);
        Self::new(Grid2D::from_fn(center, half_width, n, |z| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for a in 0..s {
                for b in 0..s {
                    let du = (T::from_usize(b).expect("b") + T::lit(0.5)) / sf - T::lit(0.5);
                    let dv = (T::from_usize(a).expect("a") + T::lit(0.5)) / sf - T::lit(0.5);
                    acc += mu(z + Complex::new(du * h, dv * h));
                }
            }
            acc * inv
        })?)
    }

    pub fn grid(&self) -> &Grid2D<T> {
        &self.grid
    }

    pub fn sup_norm(&self) -> T {
        self.sup_norm
    }

    /// Largest distance from the grid centre to a nonzero sample.
    pub fn support_radius(&self) -> T {
        self.support_radius
    }
}
