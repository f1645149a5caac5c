use std::fmt;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::numeric::ext::ExtReal;
use crate::numeric::scalar::Real;
use crate::numeric::tower::SignedTower;

/// Nonzero complex number stored as `exp(log_mag) * e^{i arg}`, `arg` in `(-pi, pi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogComplex<T> {
    pub log_mag: SignedTower<T>,
    pub arg: T,
}

/// Reduces an angle into `(-pi, pi]`.
pub fn wrap_angle<T: Real>(a: T) -> T {
    let two_pi = T::PI() + T::PI();
    let mut r = a % two_pi;
    if r <= -T::PI() {
        r += two_pi;
    } else if r > T::PI() {
        r -= two_pi;
    }
    r
}

impl<T: Real> LogComplex<T> {
    pub fn new(log_mag: SignedTower<T>, arg: T) -> Self {
        Self { log_mag, arg: wrap_angle(arg) }
    }

    pub fn from_complex(z: Complex<T>) -> Result<Self> {
        if z.norm() == T::zero() || !z.norm().is_finite() {
            return Err(Error::Domain("log-polar form of zero or non-finite value".into()));
        }
        Ok(Self { log_mag: SignedTower::from_value(z.norm().ln())?, arg: z.arg() })
    }

    /// Positive or negative real in extended range.
    pub fn from_ext(x: &ExtReal<T>) -> Result<Self> {
        if x.is_zero() {
            return Err(Error::Domain("log-polar form of zero".into()));
        }
        let arg = if x.signum() < 0 { T::PI() } else { T::zero() };
        Ok(Self { log_mag: x.log_abs(), arg })
    }

    pub fn modulus(&self) -> ExtReal<T> {
        ExtReal::from_log(self.log_mag)
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(self.log_mag.add(&o.log_mag), self.arg + o.arg)
    }

    pub fn div(&self, o: &Self) -> Self {
        Self::new(self.log_mag.sub(&o.log_mag), self.arg - o.arg)
    }

    /// Integer power; the argument is reduced exactly only while `n * arg` stays well inside the scalar's precision.
    pub fn powi(&self, n: i64) -> Self {
        let k = T::from_i64(n).expect("exponent fits");
        let lm = ExtReal::from_signed_tower(&self.log_mag).scale(k).to_signed_tower();
        Self::new(lm, self.arg * k)
    }

    /// Plain complex value, `None` when the modulus leaves the scalar range.
    pub fn to_complex(&self) -> Option<Complex<T>> {
        let r = self.log_mag.finite()?.exp();
        (r.is_finite() && r > T::zero()).then(|| Complex::from_polar(r, self.arg))
    }
}

impl<T: Real> fmt::Display for LogComplex<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exp({}) * e^(i {:e})", self.log_mag, self.arg)
    }
}
