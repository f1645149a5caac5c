//! Signed reals far outside the floating range in either direction.
//!
//! `ExtReal` stores `sign * exp(L)` where `L` is a [`SignedTower`], so both
//! `exp(exp(10^4))` and its reciprocal are representable. Sums keep full
//! relative precision while the operands' logarithms are finite scalars and
//! fall back to the dominant term otherwise.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::numeric::scalar::Real;
use crate::numeric::tower::{SignedTower, TowerReal};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtReal<T> {
    sign: i8,
    log: SignedTower<T>,
}

impl<T: Real> ExtReal<T> {
    pub fn zero() -> Self {
        Self { sign: 0, log: SignedTower::zero() }
    }

    pub fn one() -> Self {
        Self { sign: 1, log: SignedTower::zero() }
    }

    /// Finite scalar; NaN and infinities are rejected.
    pub fn from_value(x: T) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::Domain(format!("non-finite scalar {x}")));
        }
        if x == T::zero() {
            return Ok(Self::zero());
        }
        let sign = if x > T::zero() { 1 } else { -1 };
        Ok(Self { sign, log: SignedTower::from_value(x.abs().ln())? })
    }

    /// Shorthand for finite literals.
    pub fn lit(x: f64) -> Self {
        Self::from_value(T::lit(x)).expect("finite literal")
    }

    /// `exp(log)`.
    pub fn from_log(log: SignedTower<T>) -> Self {
        Self { sign: 1, log }
    }

    /// Positive value of a tower.
    pub fn from_tower(t: &TowerReal<T>) -> Result<Self> {
        let t = t.demote();
        if t.depth() == 0 {
            return Self::from_value(t.mantissa());
        }
        Ok(Self::from_log(SignedTower::from_tower(false, TowerReal::new(t.depth() - 1, t.mantissa())?)))
    }

    /// Real number stored as a signed tower.
    pub fn from_signed_tower(s: &SignedTower<T>) -> Self {
        if let Some(v) = s.finite() {
            return Self::from_value(v).expect("finite");
        }
        let sign = if s.is_negative() { -1 } else { 1 };
        let mag = s.abs();
        let log = mag.ln().expect("positive depth tower");
        Self { sign, log: SignedTower::from_tower(false, log) }
    }

    /// Same number as a signed tower; magnitudes below the scalar range flush to zero.
    pub fn to_signed_tower(&self) -> SignedTower<T> {
        if self.sign == 0 {
            return SignedTower::zero();
        }
        if let Some(l) = self.log.finite() {
            let v = l.exp();
            if v.is_finite() {
                let v = if self.sign < 0 { -v } else { v };
                return SignedTower::from_value(v).expect("finite");
            }
        }
        if self.log.is_negative() {
            return SignedTower::zero();
        }
        let l = self.log.abs();
        SignedTower::from_tower(self.sign < 0, l.exp())
    }

    /// Positive value as a tower.
    pub fn to_tower(&self) -> Result<TowerReal<T>> {
        if self.sign <= 0 {
            return Err(Error::Domain("tower of a non-positive value".into()));
        }
        Ok(self.to_signed_tower().abs())
    }

    pub fn signum(&self) -> i8 {
        self.sign
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn is_positive(&self) -> bool {
        self.sign > 0
    }

    /// Logarithm of the magnitude as a signed tower.
    pub fn log_abs(&self) -> SignedTower<T> {
        self.log
    }

    /// Scalar value; saturates to `±inf` or `0`.
    pub fn to_value(&self) -> T {
        if self.sign == 0 {
            return T::zero();
        }
        let v = self.log.to_value().exp();
        if self.sign < 0 {
            -v
        } else {
            v
        }
    }

    /// Scalar value when neither overflow nor underflow occurs.
    pub fn finite(&self) -> Option<T> {
        if self.sign == 0 {
            return Some(T::zero());
        }
        let v = self.to_value();
        (v.is_finite() && v != T::zero()).then_some(v)
    }

    pub fn neg(&self) -> Self {
        Self { sign: -self.sign, log: self.log }
    }

    pub fn abs(&self) -> Self {
        Self { sign: self.sign.abs(), log: self.log }
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.sign == 0 || o.sign == 0 {
            return Self::zero();
        }
        Self { sign: self.sign * o.sign, log: self.log.add(&o.log) }
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        if o.sign == 0 {
            return Err(Error::Domain("division by zero".into()));
        }
        if self.sign == 0 {
            return Ok(Self::zero());
        }
        Ok(Self { sign: self.sign * o.sign, log: self.log.sub(&o.log) })
    }

    pub fn recip(&self) -> Result<Self> {
        Self::one().div(self)
    }

    pub fn scale(&self, k: T) -> Self {
        self.mul(&Self::from_value(k).expect("finite scale"))
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.sign == 0 {
            return *o;
        }
        if o.sign == 0 {
            return *self;
        }
        let (big, small) = if self.cmp_abs(o) == Ordering::Less { (o, self) } else { (self, o) };
        let d = small.log.sub(&big.log).to_value();
        let r = d.exp();
        let l = if big.sign == small.sign {
            r.ln_1p()
        } else {
            if r >= T::one() {
                return Self::zero();
            }
            (-r).ln_1p()
        };
        let log = big.log.add(&SignedTower::from_value(l).expect("finite"));
        Self { sign: big.sign, log }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn add_value(&self, x: T) -> Self {
        self.add(&Self::from_value(x).expect("finite"))
    }

    /// Ordering of magnitudes.
    pub fn cmp_abs(&self, o: &Self) -> Ordering {
        match (self.sign == 0, o.sign == 0) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            _ => self.log.partial_cmp(&o.log).unwrap_or(Ordering::Equal),
        }
    }

    /// Natural logarithm of a positive value.
    pub fn ln(&self) -> Result<Self> {
        if self.sign <= 0 {
            return Err(Error::Domain("logarithm of a non-positive value".into()));
        }
        Ok(Self::from_signed_tower(&self.log))
    }

    pub fn exp(&self) -> Self {
        Self::from_log(self.to_signed_tower())
    }

    /// `self^y` for positive `self`.
    pub fn pow(&self, y: &Self) -> Result<Self> {
        Ok(y.mul(&self.ln()?).exp())
    }

    pub fn powf(&self, y: T) -> Result<Self> {
        self.pow(&Self::from_value(y)?)
    }

    pub fn sqrt(&self) -> Result<Self> {
        self.powf(T::lit(0.5))
    }

    /// `ln(1 + x)` for `x > -1`, accurate for magnitudes below the scalar range.
    pub fn ln_1p(&self) -> Result<Self> {
        if self.sign == 0 {
            return Ok(Self::zero());
        }
        match self.finite() {
            Some(v) => {
                if v <= -T::one() {
                    return Err(Error::Domain(format!("ln_1p of {v}")));
                }
                Self::from_value(v.ln_1p())
            }
            None if self.log.is_negative() => Ok(*self),
            None => {
                if self.sign < 0 {
                    return Err(Error::Domain("ln_1p of a huge negative value".into()));
                }
                self.ln()
            }
        }
    }

    /// `exp(x) - 1`, accurate for magnitudes below the scalar range.
    pub fn exp_m1(&self) -> Self {
        if self.sign == 0 {
            return Self::zero();
        }
        match self.finite() {
            Some(v) if v < T::one() => Self::from_value(v.exp_m1()).expect("finite"),
            Some(_) => self.exp().sub(&Self::one()),
            None if self.log.is_negative() => *self,
            None if self.sign < 0 => Self::lit(-1.0),
            None => self.exp(),
        }
    }

    /// Smallest integer not below a value whose scalar form is finite; larger values pass through.
    pub fn ceil(&self) -> Self {
        match self.finite() {
            Some(v) if v.abs() < T::lit(9.0e15) => Self::from_value(v.ceil()).expect("finite"),
            _ => *self,
        }
    }

    pub fn max(&self, o: &Self) -> Self {
        if self >= o {
            *self
        } else {
            *o
        }
    }

    pub fn min(&self, o: &Self) -> Self {
        if self <= o {
            *self
        } else {
            *o
        }
    }
}

impl<T: Real> PartialOrd for ExtReal<T> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(match self.sign.cmp(&o.sign) {
            Ordering::Equal => match self.sign {
                0 => Ordering::Equal,
                1 => self.cmp_abs(o),
                _ => o.cmp_abs(self),
            },
            other => other,
        })
    }
}

impl<T: Real> fmt::Display for ExtReal<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(v) = self.finite() {
            return write!(f, "{v:e}");
        }
        let s = if self.sign < 0 { "-" } else { "" };
        write!(f, "{s}exp({})", self.log)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type E = ExtReal<f64>;

    #[test]
    fn arithmetic_matches_scalars_in_range() {
        let a = E::lit(3.5);
        let b = E::lit(-1.25);
        assert!((a.add(&b).to_value() - 2.25).abs() < 1e-14);
        assert!((a.mul(&b).to_value() + 4.375).abs() < 1e-14);
        assert!((a.div(&b).unwrap().to_value() + 2.8).abs() < 1e-14);
        assert!(a.sub(&a).is_zero());
        assert!((E::lit(2.0).pow(&E::lit(10.0)).unwrap().to_value() - 1024.0).abs() < 1e-9);
    }

    #[test]
    fn tiny_and_huge_round_trip() {
        let huge = E::lit(1e300).exp();
        let tiny = huge.recip().unwrap();
        assert_eq!(tiny.to_value(), 0.0);
        assert!(tiny.is_positive());
        assert!((tiny.mul(&huge).to_value() - 1.0).abs() < 1e-12);
        assert!((huge.ln().unwrap().to_value() - 1e300).abs() / 1e300 < 1e-12);
        let l = tiny.ln_1p().unwrap();
        assert_eq!(l, tiny);
        let deep = huge.exp();
        assert!(deep > huge);
        assert!(deep.recip().unwrap() < tiny);
    }

    #[test]
    fn ln_1p_and_exp_m1() {
        let x = E::lit(1e-5);
        assert!((x.ln_1p().unwrap().to_value() - 1e-5f64.ln_1p()).abs() < 1e-20);
        assert!((x.exp_m1().to_value() - 1e-5f64.exp_m1()).abs() < 1e-20);
        assert!((E::lit(3.0).exp_m1().to_value() - 3f64.exp_m1()).abs() < 1e-12);
    }
}
