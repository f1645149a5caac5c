use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::scalar::Real;

/// Square, cell-centred sample grid.
///
/// Sample `(i, j)` (row `i`, column `j`) sits at
/// `center + (-hw + (j + 1/2) h) + i (-hw + (i + 1/2) h)` with `h = 2 hw / n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid2D<T> {
    center: Complex<T>,
    half_width: T,
    n: usize,
    values: Vec<Complex<T>>,
}

impl<T: Real> Grid2D<T> {
    /// Zero grid; `n` must be a power of two, `half_width` positive.
    pub fn zeros(center: Complex<T>, half_width: T, n: usize) -> Result<Self> {
        if !n.is_power_of_two() || n < 2 {
            return Err(Error::Parameter(format!("grid size {n} is not a power of two >= 2")));
        }
        if !(half_width > T::zero()) || !half_width.is_finite() {
            return Err(Error::Parameter(format!("grid half width {half_width} must be positive")));
        }
        Ok(Self { center, half_width, n, values: vec![Complex::new(T::zero(), T::zero()); n * n] })
    }

    /// Grid filled by `f` at each sample point; rows are evaluated in parallel.
    pub fn from_fn<F>(center: Complex<T>, half_width: T, n: usize, f: F) -> Result<Self>
    where
        F: Fn(Complex<T>) -> Complex<T> + Sync,
    {
        let mut g = Self::zeros(center, half_width, n)?;
        let geom = g.geometry();
        g.values.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            for (j, v) in row.iter_mut().enumerate() {
                *v = f(geom.point(i, j));
            }
        });
        Ok(g)
    }

    /// Same geometry, new values.
    pub fn with_values(&self, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != self.n * self.n {
            return Err(Error::Parameter(format!("expected {} values, got {}", self.n * self.n, values.len())));
        }
        Ok(Self { center: self.center, half_width: self.half_width, n: self.n, values })
    }

    pub fn center(&self) -> Complex<T> {
        self.center
    }

    pub fn half_width(&self) -> T {
        self.half_width
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> T {
        self.geometry().h
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.values[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex<T>) {
        self.values[i * self.n + j] = v;
    }

    pub fn point(&self, i: usize, j: usize) -> Complex<T> {
        self.geometry().point(i, j)
    }

    /// Copyable geometry handle for closures.
    pub fn geometry(&self) -> GridGeometry<T> {
        let h = (self.half_width + self.half_width) / T::from_usize(self.n).expect("grid size");
        GridGeometry { center: self.center, half_width: self.half_width, n: self.n, h }
    }

    pub fn sup_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }

    /// Discrete `L^2` norm, `sqrt(sum |v|^2 h^2)`.
    pub fn l2_norm(&self) -> T {
        let h = self.spacing();
        let s = self.values.par_iter().map(|v| v.norm_sqr().f64()).sum::<f64>();
        T::lit(s.sqrt()) * h
    }

    /// Bilinear interpolation between sample points; `None` outside the sample hull.
    pub fn sample_bilinear(&self, z: Complex<T>) -> Option<Complex<T>> {
        let g = self.geometry();
        let half = T::lit(0.5);
        let u = (z.re - g.center.re + g.half_width) / g.h - half;
        let v = (z.im - g.center.im + g.half_width) / g.h - half;
        let top = T::from_usize(self.n - 1).expect("grid size");
        if !(u >= T::zero() && v >= T::zero() && u <= top && v <= top) {
            return None;
        }
        let j0 = u.floor().to_usize()?.min(self.n - 2);
        let i0 = v.floor().to_usize()?.min(self.n - 2);
        let fu = u - T::from_usize(j0)?;
        let fv = v - T::from_usize(i0)?;
        let one = T::one();
        let a = self.get(i0, j0) * (one - fu) + self.get(i0, j0 + 1) * fu;
        let b = self.get(i0 + 1, j0) * (one - fu) + self.get(i0 + 1, j0 + 1) * fu;
        Some(a * (one - fv) + b * fv)
    }

    /// Number of nonzero samples on the outermost ring of cells.
    pub fn boundary_nonzero(&self) -> usize {
        let n = self.n;
        let mut c = 0;
        for k in 0..n {
            for (i, j) in [(0, k), (n - 1, k), (k, 0), (k, n - 1)] {
                if self.get(i, j).norm() > T::zero() {
                    c += 1;
                }
            }
        }
        c
    }
}

#[derive(Clone, Copy, Debug)]
pub struct GridGeometry<T> {
    pub center: Complex<T>,
    pub half_width: T,
    pub n: usize,
    pub h: T,
}

impl<T: Real> GridGeometry<T> {
    pub fn coord(&self, k: usize) -> T {
        -self.half_width + (T::from_usize(k).expect("index") + T::lit(0.5)) * self.h
    }

    pub fn point(&self, i: usize, j: usize) -> Complex<T> {
        self.center + Complex::new(self.coord(j), self.coord(i))
    }
}
