//! Iterated-exponential magnitudes.
//!
//! A [`TowerReal`] stores `exp^depth(mantissa)`. Positive depth requires
//! `mantissa >= 1`, so every positive-depth value exceeds `e`. The encoding is
//! not unique (`(1, 5)` and `(0, e^5)` are the same number); comparisons and
//! arithmetic first reduce both operands to the minimal depth at which the
//! mantissa is still finite.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::numeric::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TowerReal<T> {
    depth: u32,
    mantissa: T,
}

impl<T: Real> TowerReal<T> {
    /// Builds a canonical tower; a positive-depth mantissa below one is absorbed downward.
    pub fn new(depth: u32, mantissa: T) -> Result<Self> {
        if !mantissa.is_finite() {
            return Err(Error::Domain(format!("non-finite tower mantissa {mantissa}")));
        }
        let mut t = Self { depth, mantissa };
        while t.depth > 0 && t.mantissa < T::one() {
            t.mantissa = t.mantissa.exp();
            t.depth -= 1;
        }
        Ok(t)
    }

    /// Plain value at depth 0.
    pub fn from_value(x: T) -> Result<Self> {
        Self::new(0, x)
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn mantissa(&self) -> T {
        self.mantissa
    }

    /// True when the represented value is `> 0`.
    pub fn is_positive(&self) -> bool {
        self.depth > 0 || self.mantissa > T::zero()
    }

    /// Lowest-depth encoding whose mantissa is finite.
    pub fn demote(&self) -> Self {
        let mut t = *self;
        while t.depth > 0 {
            let e = t.mantissa.exp();
            if !e.is_finite() {
                break;
            }
            t.mantissa = e;
            t.depth -= 1;
        }
        t
    }

    /// The represented value, `+inf` when out of range.
    pub fn to_value(&self) -> T {
        let t = self.demote();
        if t.depth == 0 {
            t.mantissa
        } else {
            T::infinity()
        }
    }

    /// Natural logarithm; peels one exponential at positive depth.
    pub fn ln(&self) -> Result<Self> {
        if self.depth > 0 {
            return Ok(Self { depth: self.depth - 1, mantissa: self.mantissa });
        }
        if self.mantissa <= T::zero() {
            return Err(Error::Domain(format!("logarithm of non-positive value {}", self.mantissa)));
        }
        Ok(Self { depth: 0, mantissa: self.mantissa.ln() })
    }

    /// `exp` of the represented value, one level up.
    pub fn exp(&self) -> Self {
        if self.depth == 0 && self.mantissa < T::one() {
            return Self { depth: 0, mantissa: self.mantissa.exp() };
        }
        Self { depth: self.depth + 1, mantissa: self.mantissa }
    }

    /// Natural logarithm as a plain scalar; `+inf` when the log itself overflows.
    pub fn ln_value(&self) -> Result<T> {
        Ok(self.ln()?.to_value())
    }
}

/// Total order of the represented reals.
pub fn tower_compare<T: Real>(a: &TowerReal<T>, b: &TowerReal<T>) -> Ordering {
    let (a, b) = (a.demote(), b.demote());
    match a.depth.cmp(&b.depth) {
        Ordering::Equal => a.mantissa.partial_cmp(&b.mantissa).unwrap_or(Ordering::Equal),
        // Positive demoted depth means the value exceeds every finite scalar
        // of the previous level.
        other => other,
    }
}

/// Logarithm; the module-level name kept for symmetry with [`tower_compare`].
pub fn tower_log<T: Real>(x: &TowerReal<T>) -> Result<TowerReal<T>> {
    x.ln()
}

impl<T: Real> PartialOrd for TowerReal<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(tower_compare(self, other))
    }
}

impl<T: Real> fmt::Display for TowerReal<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.demote();
        if t.depth == 0 {
            write!(f, "{:e}", t.mantissa)
        } else {
            write!(f, "exp^{}({:e})", t.depth, t.mantissa)
        }
    }
}

/// Real number of either sign with tower-sized magnitude.
///
/// At depth 0 the sign lives in the mantissa and `neg` is false.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignedTower<T> {
    neg: bool,
    mag: TowerReal<T>,
}

impl<T: Real> SignedTower<T> {
    pub fn zero() -> Self {
        Self { neg: false, mag: TowerReal { depth: 0, mantissa: T::zero() } }
    }

    /// Finite scalar; non-finite input is rejected.
    pub fn from_value(x: T) -> Result<Self> {
        Ok(Self { neg: false, mag: TowerReal::from_value(x)? })
    }

    /// Positive tower with an explicit sign.
    pub fn from_tower(neg: bool, t: TowerReal<T>) -> Self {
        let t = t.demote();
        if t.depth == 0 {
            let m = if neg { -t.mantissa } else { t.mantissa };
            Self { neg: false, mag: TowerReal { depth: 0, mantissa: m } }
        } else {
            Self { neg, mag: t }
        }
    }

    pub fn is_negative(&self) -> bool {
        if self.mag.depth == 0 {
            self.mag.mantissa < T::zero()
        } else {
            self.neg
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mag.depth == 0 && self.mag.mantissa == T::zero()
    }

    /// Magnitude as a (non-negative) tower.
    pub fn abs(&self) -> TowerReal<T> {
        if self.mag.depth == 0 {
            TowerReal { depth: 0, mantissa: self.mag.mantissa.abs() }
        } else {
            self.mag
        }
    }

    pub fn depth(&self) -> u32 {
        self.mag.depth
    }

    /// Value as a scalar, `±inf` when out of range.
    pub fn to_value(&self) -> T {
        let v = self.mag.to_value();
        if self.mag.depth > 0 && self.neg {
            -v
        } else {
            v
        }
    }

    /// Finite scalar value, or `None` when out of range.
    pub fn finite(&self) -> Option<T> {
        let v = self.to_value();
        v.is_finite().then_some(v)
    }

    pub fn neg(&self) -> Self {
        if self.mag.depth == 0 {
            Self { neg: false, mag: TowerReal { depth: 0, mantissa: -self.mag.mantissa } }
        } else {
            Self { neg: !self.neg, mag: self.mag }
        }
    }

    pub fn demote(&self) -> Self {
        Self::from_tower(self.is_negative(), self.abs())
    }

    /// Sum. Terms below the precision of the dominant one are dropped.
    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = (self.demote(), other.demote());
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        let (big, small) = if tower_compare(&a.abs(), &b.abs()) == Ordering::Less { (b, a) } else { (a, b) };
        let same_sign = big.is_negative() == small.is_negative();
        if big.depth() == 0 {
            let s = big.mag.mantissa + small.mag.mantissa;
            if s.is_finite() {
                return Self { neg: false, mag: TowerReal { depth: 0, mantissa: s } };
            }
            // Same-sign overflow.
            let (x, y) = (big.mag.mantissa.abs(), small.mag.mantissa.abs());
            let l = x.ln() + (y / x).ln_1p();
            return Self::from_tower(big.is_negative(), TowerReal { depth: 1, mantissa: l });
        }
        if big.depth() == 1 {
            let lb = big.mag.mantissa;
            let ls = if small.depth() == 1 { small.mag.mantissa } else { small.mag.mantissa.abs().ln() };
            let r = (ls - lb).exp();
            if !same_sign && r >= T::one() {
                return Self::zero();
            }
            let l = if same_sign { lb + r.ln_1p() } else { lb + (-r).ln_1p() };
            let t = TowerReal::new(1, l).expect("finite log");
            return Self::from_tower(big.is_negative(), t);
        }
        if !same_sign && big.abs() == small.abs() {
            return Self::zero();
        }
        big
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
}

impl<T: Real> PartialOrd for SignedTower<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let (an, bn) = (self.is_negative(), other.is_negative());
        Some(match (an, bn) {
            (false, true) => Ordering::Greater,
            (true, false) => Ordering::Less,
            (false, false) => tower_compare(&self.abs(), &other.abs()),
            (true, true) => tower_compare(&other.abs(), &self.abs()),
        })
    }
}

impl<T: Real> fmt::Display for SignedTower<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.demote();
        if d.mag.depth == 0 {
            write!(f, "{:e}", d.mag.mantissa)
        } else {
            let s = if d.neg { "-" } else { "" };
            write!(f, "{s}{}", d.mag)
        }
    }
}
