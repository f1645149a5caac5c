//! Area law for the straightening map on a thin annulus.
//!
//! The dilatation of a disk map is supported on `1 - 4 delta0 / m < |z| < 1`,
//! whose area is about `8 pi delta0 / m`. The worst case calibrated here is
//! the radial field `k0 z / zbar`, which has a closed-form solution.

use num_complex::Complex;

use crate::beltrami::{deviation_profile, solve_beltrami, BeltramiField};
use crate::error::{Error, Result};
use crate::numeric::Grid2D;

type C = Complex<f64>;

/// `pi (1 - (1 - 4 delta0 / m)^2)`.
pub fn eq3_area(m: f64, delta0: f64) -> f64 {
    let r0 = 1.0 - 4.0 * delta0 / m;
    std::f64::consts::PI * (1.0 - r0 * r0)
}

/// `k z / zbar` on the annulus, cell-averaged by polar quadrature on an `n x n` grid of half-width `3/2`.
///
/// Deposition resolves annuli far thinner than a cell, so the field stays meaningful for large `m`.
pub fn worst_case_annulus_field(m: f64, delta0: f64, k: f64, n: usize) -> Result<BeltramiField<f64>> {
    let r0 = 1.0 - 4.0 * delta0 / m;
    if !(r0 > 0.0 && k.abs() < 1.0) {
        return Err(Error::Parameter(format!("annulus 1 - 4 delta0 / m = {r0}, k = {k}")));
    }
    let half_width = 1.5;
    let h = 2.0 * half_width / n as f64;
    let two_pi = 2.0 * std::f64::consts::PI;
    let na = (16.0 * two_pi / h).ceil() as usize;
    let nr = ((4.0 * (1.0 - r0) / h).ceil() as usize).max(8);
    let dth = two_pi / na as f64;
    let dr = (1.0 - r0) / nr as f64;
    let mut values = vec![C::new(0.0, 0.0); n * n];
    for a in 0..na {
        let e = C::from_polar(1.0, (a as f64 + 0.5) * dth);
        let w = e * e * k;
        for i in 0..nr {
            let rho = r0 + (i as f64 + 0.5) * dr;
            let z = e * rho;
            let u = ((z.re + half_width) / h) as usize;
            let v = ((z.im + half_width) / h) as usize;
            values[v * n + u] += w * (rho * dr * dth / (h * h));
        }
    }
    BeltramiField::new(Grid2D::zeros(C::new(0.0, 0.0), half_width, n)?.with_values(values)?)
}

/// `sup |psi - id|` for the radial field: `psi = r0^a z` inside, `z |z|^a` on the annulus, `z` outside, `a = 2k/(1-k)`.
pub fn annulus_exact_deviation(m: f64, delta0: f64, k: f64) -> f64 {
    let r0 = 1.0 - 4.0 * delta0 / m;
    let a = 2.0 * k / (1.0 - k);
    // r (1 - r^a) is unimodal on (0, 1) with its peak at (1 + a)^{-1/a}.
    let peak = (1.0 + a).powf(-1.0 / a).max(r0);
    peak * (1.0 - peak.powf(a))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Eq3Sample {
    pub m: f64,
    pub area: f64,
    pub solved: f64,
    pub exact: f64,
    /// `solved / (8 pi delta0 / m)`.
    pub ratio: f64,
}

/// Solves the worst-case field for each `m` and reports the normalized deviation.
pub fn eq3_calibration(ms: &[f64], delta0: f64, k: f64, n: usize) -> Result<Vec<Eq3Sample>> {
    ms.iter()
        .map(|&m| {
            let field = worst_case_annulus_field(m, delta0, k, n)?;
            let map = solve_beltrami(&field, 1e-10, 400)?;
            let solved = deviation_profile(&map).eps_global;
            let nominal = 8.0 * std::f64::consts::PI * delta0 / m;
            Ok(Eq3Sample { m, area: eq3_area(m, delta0), solved, exact: annulus_exact_deviation(m, delta0, k), ratio: solved / nominal })
        })
        .collect()
}
