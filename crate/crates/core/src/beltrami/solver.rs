use num_complex::Complex;
use rayon::prelude::*;

use super::field::BeltramiField;
use super::transforms::Transforms;
use crate::error::{Error, Result};
use crate::graph::GraphModel;
use crate::numeric::grid::Grid2D;
use crate::numeric::scalar::{lit, Real};

/// Sampled normalized solution `phi = z + T h` of `phi_zbar = mu phi_z`.
#[derive(Clone, Debug)]
pub struct QCMapApprox<T> {
    /// `phi` at the cell centres.
    pub phi: Grid2D<T>,
    /// `phi_zbar = h`.
    pub dzbar: Grid2D<T>,
    /// `phi_z = 1 + S h`.
    pub dz: Grid2D<T>,
    /// Coefficient of `1/z`, fitted on the two outermost rings of cells.
    pub hydro_a: Complex<T>,
    pub iterations: usize,
    /// Last successive `L^2` change of `h`.
    pub change: T,
    /// `L^2` norm of `phi_zbar - mu phi_z`.
    pub residual: T,
    pub converged: bool,
    pub mu_sup: T,
    pub mu_support_radius: T,
}

impl<T: Real> QCMapApprox<T> {
    /// `(1/pi) integral h`, the far-field coefficient implied by the density.
    pub fn hydro_a_moment(&self) -> Complex<T> {
        let h = self.dzbar.spacing();
        let s = self.dzbar.values().iter().fold(Complex::new(T::zero(), T::zero()), |a, v| a + v);
        s * (h * h / T::PI())
    }

    /// Smallest sampled Jacobian `|phi_z|^2 - |phi_zbar|^2`.
    pub fn min_jacobian(&self) -> T {
        self.dz
            .values()
            .par_iter()
            .zip(self.dzbar.values().par_iter())
            .map(|(a, b)| a.norm_sqr() - b.norm_sqr())
            .reduce(|| T::infinity(), |a, b| a.min(b))
    }

    /// `phi - id` at the samples.
    pub fn displacement(&self) -> Grid2D<T> {
        let g = self.phi.geometry();
        let n = g.n;
        let v = self.phi.values().iter().enumerate().map(|(k, p)| p - g.point(k / n, k % n)).collect();
        self.phi.with_values(v).expect("same size")
    }
}

/// Iteration cap implied by contraction: `ceil(ln tol / ln k) + 5`.
pub fn iteration_bound<T: Real>(tol: T, sup: T) -> usize {
    if sup <= T::zero() {
        return 5;
    }
    ((tol.ln() / sup.ln()).ceil().to_usize().unwrap_or(0)) + 5
}

/// Neumann iteration `h <- mu S h + mu` from `h = 0`; `phi = z + T h`.
///
/// Stops when the `L^2` change falls below `tol`. Exhausting `max_iter`
/// returns the truncated map with `converged = false` and a logged warning.
pub fn solve_beltrami<T: Real>(mu: &BeltramiField<T>, tol: T, max_iter: usize) -> Result<QCMapApprox<T>> {
    let g = mu.grid();
    if g.boundary_nonzero() > 0 {
        return Err(Error::Padding(g.boundary_nonzero()));
    }
    let tr = Transforms::for_grid(g);
    let m = g.values();
    let zero = Complex::new(T::zero(), T::zero());
    let mut h = vec![zero; m.len()];
    let mut change = T::zero();
    let mut iterations = 0;
    let mut converged = mu.sup_norm() == T::zero();
    let first = g.with_values(m.to_vec())?.l2_norm();
    while !converged && iterations < max_iter {
        let sh = tr.beurling(&h);
        let next: Vec<_> = m.par_iter().zip(sh.par_iter()).map(|(a, s)| *a * *s + *a).collect();
        let diff: Vec<_> = next.par_iter().zip(h.par_iter()).map(|(a, b)| a - b).collect();
        change = g.with_values(diff)?.l2_norm();
        h = next;
        iterations += 1;
        if !change.is_finite() || (iterations > 3 && change > first * lit(1e3)) {
            return Err(Error::Divergence { iterations, change: change.f64() });
        }
        converged = change < tol;
    }
    let sh = tr.beurling(&h);
    let dz: Vec<_> = sh.iter().map(|s| s + T::one()).collect();
    let res: Vec<_> = h.iter().zip(&dz).zip(m).map(|((hv, d), a)| hv - a * d).collect();
    let residual = g.with_values(res)?.l2_norm();
    if !converged {
        log::warn!("beltrami solver truncated after {iterations} iterations, change {change:e}, residual {residual:e}");
    }
    let th = tr.cauchy(&h);
    let geom = g.geometry();
    let n = geom.n;
    let phi: Vec<_> = th.iter().enumerate().map(|(k, t)| geom.point(k / n, k % n) + t).collect();
    let phi = g.with_values(phi)?;
    let hydro_a = fit_hydro(&phi);
    Ok(QCMapApprox {
        phi,
        dzbar: g.with_values(h)?,
        dz: g.with_values(dz)?,
        hydro_a,
        iterations,
        change,
        residual,
        converged,
        mu_sup: mu.sup_norm(),
        mu_support_radius: mu.support_radius(),
    })
}

/// Least squares `phi - z ~ a / (z - c)` over the two outermost square rings of cells.
fn fit_hydro<T: Real>(phi: &Grid2D<T>) -> Complex<T> {
    let g = phi.geometry();
    let n = g.n;
    let (mut num, mut den) = (Complex::new(T::zero(), T::zero()), T::zero());
    for i in 0..n {
        for j in 0..n {
            let ring = i.min(j).min(n - 1 - i).min(n - 1 - j);
            if ring < 2 {
                let z = g.point(i, j);
                let b = (z - g.center).inv();
                num += b.conj() * (phi.get(i, j) - z);
                den += b.norm_sqr();
            }
        }
    }
    num / den
}

/// Sup of `|phi - id|` overall and on rings about the grid centre, with `C / R` decay fits.
#[derive(Clone, Debug, PartialEq)]
pub struct DeviationProfile<T> {
    pub eps_global: T,
    /// Least-squares `C` in `sup_R |phi - id| ~ C / R` over rings with `R > r_fit`.
    pub c_fit: T,
    /// Smallest `C` with `sup_R |phi - id| <= C / R` on every such ring.
    pub c_envelope: T,
    /// Inner radius of the fit: the support radius of the dilatation.
    pub r_fit: T,
    /// `(R, sup over the ring [R, R + h))` inside the inscribed disk.
    pub rings: Vec<(T, T)>,
}

pub fn deviation_profile<T: Real>(map: &QCMapApprox<T>) -> DeviationProfile<T> {
    let disp = map.displacement();
    let g = disp.geometry();
    let n = g.n;
    let nr = n / 2;
    let mut rings = vec![T::zero(); nr];
    let mut eps = T::zero();
    for i in 0..n {
        for j in 0..n {
            let d = disp.get(i, j).norm();
            eps = eps.max(d);
            let k = ((g.point(i, j) - g.center).norm() / g.h).floor().to_usize().unwrap_or(usize::MAX);
            if k < nr {
                rings[k] = rings[k].max(d);
            }
        }
    }
    let rings: Vec<(T, T)> = rings.into_iter().enumerate().map(|(k, d)| (T::from_usize(k).expect("k") * g.h, d)).collect();
    let r_fit = map.mu_support_radius + g.h;
    let (mut num, mut den, mut env) = (T::zero(), T::zero(), T::zero());
    for &(r, d) in rings.iter().filter(|(r, _)| *r > r_fit) {
        num += d / r;
        den += T::one() / (r * r);
        env = env.max(d * r);
    }
    let c_fit = if den > T::zero() { num / den } else { T::zero() };
    DeviationProfile { eps_global: eps, c_fit, c_envelope: env, r_fit, rings }
}

/// `mu_n = min(1/8, 1/(|z_n| - 2))`; needs `|z_n| > 10`.
pub fn mu_sequence<T: Real>(model: &GraphModel<T>, n: usize) -> Result<T> {
    mu_for_modulus(model.z(n).norm())
}

/// `min(1/8, 1/(r - 2))` for `r > 10`.
pub fn mu_for_modulus<T: Real>(r: T) -> Result<T> {
    if !(r > lit(10.0)) {
        return Err(Error::OutOfRegime(format!("|z_n| = {r} <= 10")));
    }
    Ok(lit::<T>(0.125).min(T::one() / (r - lit(2.0))))
}
