use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::numeric::scalar::Real;

/// Square 2D FFT of side `m`, row-major, rows and columns in parallel.
pub struct Fft2<T: Real> {
    m: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> Fft2<T> {
    pub fn new(m: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { m, forward: planner.plan_fft_forward(m), inverse: planner.plan_fft_inverse(m) }
    }

    pub fn size(&self) -> usize {
        self.m
    }

    fn rows(&self, data: &mut [Complex<T>], inverse: bool) {
        let f = if inverse { &self.inverse } else { &self.forward };
        let len = f.get_inplace_scratch_len();
        data.par_chunks_mut(self.m).for_each_init(
            || vec![Complex::new(T::zero(), T::zero()); len],
            |scratch, row| f.process_with_scratch(row, scratch),
        );
    }

    fn transpose(&self, data: &mut Vec<Complex<T>>) {
        let m = self.m;
        let src = &*data;
        let mut out = vec![Complex::new(T::zero(), T::zero()); m * m];
        out.par_chunks_mut(m).enumerate().for_each(|(i, row)| {
            for (j, v) in row.iter_mut().enumerate() {
                *v = src[j * m + i];
            }
        });
        *data = out;
    }

    pub fn forward(&self, data: &mut Vec<Complex<T>>) {
        assert_eq!(data.len(), self.m * self.m);
        self.rows(data, false);
        self.transpose(data);
        self.rows(data, false);
        self.transpose(data);
    }

    /// Normalized inverse.
    pub fn inverse(&self, data: &mut Vec<Complex<T>>) {
        assert_eq!(data.len(), self.m * self.m);
        self.rows(data, true);
        self.transpose(data);
        self.rows(data, true);
        self.transpose(data);
        let s = T::one() / T::from_usize(self.m * self.m).expect("size");
        data.par_iter_mut().for_each(|v| *v = *v * s);
    }
}
