//! Koebe correction factors for the pulled-back annuli around `z_{p_n}`.

use crate::error::{Error, Result};
use crate::numeric::ExtReal;

type E = ExtReal<f64>;

/// `ln A` and `ln B` for the inner circle `1 - 2 mu` and outer circle `1 + 2 mu` at conformality radius `dist`.
///
/// `A = (1 - t)/(1 + t)^3 * dist^2 (1 - 2 mu)/(dist + 1 - 2 mu)^2` and
/// `B = (1 + t)/(1 - t)^3 * dist^2 (1 + 2 mu)/(dist - 1 - 2 mu)^2` with `t = 2 pi / dist`.
pub fn correction_factors(mu: &E, dist: &E) -> Result<(E, E)> {
    let two_pi = E::lit(2.0 * std::f64::consts::PI);
    if !(*dist > two_pi) {
        return Err(Error::OutOfRegime(format!("radius of conformality {dist} <= 2 pi")));
    }
    if !(mu.is_positive() && *mu < E::lit(0.125)) {
        return Err(Error::Parameter(format!("mu = {mu} outside (0, 1/8)")));
    }
    let t = two_pi.div(dist)?;
    let two_mu = mu.scale(2.0);
    let inner = E::one().sub(&two_mu).div(dist)?;
    let outer = E::one().add(&two_mu).div(dist)?;
    let ln_a = t.neg().ln_1p()?.sub(&t.ln_1p()?.scale(3.0)).add(&two_mu.neg().ln_1p()?).sub(&inner.ln_1p()?.scale(2.0));
    let ln_b = t.ln_1p()?.sub(&t.neg().ln_1p()?.scale(3.0)).add(&two_mu.ln_1p()?).sub(&outer.neg().ln_1p()?.scale(2.0));
    Ok((ln_a, ln_b))
}

/// `(2 - mu)/2` and `(2 - mu)/(2 - 2 mu)` as `(ln thr1, ln thr2)`.
pub fn ln_thresholds(mu_prev: &E) -> Result<(E, E)> {
    let half = mu_prev.scale(0.5);
    let ln1 = half.neg().ln_1p()?;
    let ln2 = half.div(&E::one().sub(mu_prev))?.ln_1p()?;
    Ok((ln1, ln2))
}

/// Slack of both factors against their thresholds: `(A - thr1, thr2 - B)`.
pub fn slacks(ln_a: &E, ln_b: &E, mu_prev: &E) -> Result<(E, E)> {
    let e1 = ln_a.exp_m1().add(&mu_prev.scale(0.5));
    let e2 = mu_prev.scale(0.5).div(&E::one().sub(mu_prev))?.sub(&ln_b.exp_m1());
    Ok((e1, e2))
}

/// Slacks divided by `mu_prev / 2`, which stay of order one when `mu_prev` is tower-small.
pub fn normalized_slacks(ln_a: &E, ln_b: &E, mu_prev: &E) -> Result<(E, E)> {
    let unit = mu_prev.scale(0.5);
    let e1 = E::one().add(&ln_a.exp_m1().div(&unit)?);
    let e2 = E::one().sub(mu_prev).recip()?.sub(&ln_b.exp_m1().div(&unit)?);
    Ok((e1, e2))
}

/// Both factors meet the thresholds built from `mu_prev`.
pub fn check_asymptotics(mu: &E, mu_prev: &E, dist: &E) -> Result<bool> {
    if !(mu_prev.is_positive() && *mu_prev < E::lit(0.125)) {
        return Err(Error::Parameter(format!("previous mu = {mu_prev} outside (0, 1/8)")));
    }
    let (ln_a, ln_b) = correction_factors(mu, dist)?;
    let (ln1, ln2) = ln_thresholds(mu_prev)?;
    Ok(ln_a >= ln1 && ln_b <= ln2)
}

/// `min(1/8, 1/(|z| - 2))` for `|z| > 10` in extended range.
pub fn mu_for_modulus_ext(modulus: &E) -> Result<E> {
    if !(*modulus > E::lit(10.0)) {
        return Err(Error::OutOfRegime(format!("|z_n| = {modulus} <= 10")));
    }
    Ok(E::lit(0.125).min(&modulus.add_value(-2.0).recip()?))
}
