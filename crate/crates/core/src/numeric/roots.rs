use crate::error::{Error, Result};
use crate::numeric::scalar::Real;

/// Newton's method safeguarded by bisection on a sign-changing bracket.
///
/// `f` returns `(value, derivative)`. Stops when the bracket or the Newton
/// step is below `tol` (absolute).
pub fn newton_bracketed<T, F>(f: F, mut lo: T, mut hi: T, tol: T, max_iter: usize) -> Result<T>
where
    T: Real,
    F: Fn(T) -> (T, T),
{
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo == T::zero() {
        return Ok(lo);
    }
    if fhi == T::zero() {
        return Ok(hi);
    }
    if (flo > T::zero()) == (fhi > T::zero()) {
        return Err(Error::Domain(format!("no sign change on [{lo}, {hi}]")));
    }
    if flo > T::zero() {
        std::mem::swap(&mut lo, &mut hi);
    }
    let half = T::lit(0.5);
    let mut x = (lo + hi) * half;
    for _ in 0..max_iter {
        let (fx, dfx) = f(x);
        if fx == T::zero() {
            return Ok(x);
        }
        if fx < T::zero() {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        let inside = (newton - lo) * (newton - hi) < T::zero();
        let next = if dfx != T::zero() && newton.is_finite() && inside { newton } else { (lo + hi) * half };
        let step = (next - x).abs();
        x = next;
        if step <= tol || (hi - lo).abs() <= tol {
            return Ok(x);
        }
    }
    Err(Error::Domain(format!("root not resolved to {tol} in {max_iter} steps")))
}
