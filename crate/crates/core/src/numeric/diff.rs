use num_complex::Complex;

use crate::error::Result;
use crate::numeric::scalar::Real;

/// Default central-difference step, `1e-4 * max(1, |z|)`.
pub fn default_step<T: Real>(z: Complex<T>) -> T {
    T::lit(1e-4) * z.norm().max(T::one())
}

/// Central-difference Wirtinger derivatives `(f_z, f_zbar)`.
pub fn wirtinger_fd<T, F>(f: F, z: Complex<T>, h: T) -> Result<(Complex<T>, Complex<T>)>
where
    T: Real,
    F: Fn(Complex<T>) -> Result<Complex<T>>,
{
    let dx = Complex::new(h, T::zero());
    let dy = Complex::new(T::zero(), h);
    let two_h = h + h;
    let fx = (f(z + dx)? - f(z - dx)?) / two_h;
    let fy = (f(z + dy)? - f(z - dy)?) / two_h;
    let i = Complex::new(T::zero(), T::one());
    let half = T::lit(0.5);
    Ok(((fx - i * fy) * half, (fx + i * fy) * half))
}
