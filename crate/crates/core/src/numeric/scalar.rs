//! Scalar trait shared by every generic routine in the crate.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating scalar accepted by the numeric core (implemented for `f32` and `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + rustfft::FftNum
    + 'static
{
    /// Short type name used in snapshot metadata.
    const NAME: &'static str;

    /// Lossy conversion from `f64`; constants in the crate are written as `f64` literals.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal fits the scalar type")
    }

    /// Widening conversion to `f64`.
    #[inline]
    fn f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }

    /// Largest `x` with `exp(x)` finite.
    #[inline]
    fn exp_limit() -> Self {
        Self::max_value().ln()
    }
}

macro_rules! impl_real {
    ($t:ty, $name:literal) => {
        impl Real for $t {
            const NAME: &'static str = $name;
        }
    };
}

impl_real!(f32, "f32");
impl_real!(f64, "f64");

/// Shorthand for `T::lit`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::lit(x)
}
