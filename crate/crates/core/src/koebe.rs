//! Koebe distortion bounds, the inverse-derivative budget along the real
//! orbit of `1/2`, target indices `p_n`, and the containment test near `1/2`.
//!
//! Closed forms are generic over exact number types so that rational inputs
//! give rational outputs; the budget works in extended range.

use std::fmt::Write as _;

use num_traits::{FromPrimitive, Num};

use crate::error::{Error, Result};
use crate::graph::{g_real_ext, lambda_sinh_ext, ln_g_prime_ext, GraphModel};
use crate::numeric::ext::ExtReal;
use crate::numeric::scalar::{lit, Real};

/// Numbers the closed forms accept: floats and exact rationals alike.
pub trait Field: Num + Copy + PartialOrd + FromPrimitive {}
impl<T: Num + Copy + PartialOrd + FromPrimitive> Field for T {}

fn q<T: Field>(a: i64, b: i64) -> T {
    T::from_i64(a).expect("small integer") / T::from_i64(b).expect("small integer")
}

/// Radius `F'(a) r / 4` of the disk about `F(a)` covered by `F(D(a, r))`.
pub fn koebe_quarter<T: Field>(fprime_a: T, r: T) -> T {
    fprime_a * r / q(4, 1)
}

/// `(r^2 d F' / (r + d)^2, r^2 d F' / (r - d)^2)` bracketing `|F(z) - F(a)|` at `|z - a| = d`.
pub fn koebe_growth<T: Field>(r: T, d: T, fprime_a: T) -> Result<(T, T)> {
    if !(d >= T::zero() && d < r) {
        return Err(Error::Domain("koebe_growth needs 0 <= d < r".into()));
    }
    let k = r * r * d * fprime_a;
    Ok((k / ((r + d) * (r + d)), k / ((r - d) * (r - d))))
}

/// `((1 - t)/(1 + t)^3, (1 + t)/(1 - t)^3)` with `t = d / r`, bracketing `|F'(z) / F'(a)|`.
pub fn koebe_derivative_ratio<T: Field>(r: T, d: T) -> Result<(T, T)> {
    if !(d >= T::zero() && d < r) {
        return Err(Error::Domain("koebe_derivative_ratio needs 0 <= d < r".into()));
    }
    let t = d / r;
    let one = T::one();
    let (p, m) = (one + t, one - t);
    Ok((m / (p * p * p), p / (m * m * m)))
}

/// Bounds on `|phi'(x)|` for a map within `eps0` of the identity, from growth on `D(x, 3/8)`.
pub fn phi_prime_bounds<T: Field>(eps0: T) -> Result<(T, T)> {
    if !(eps0 > T::zero() && eps0 < q(1, 8)) {
        return Err(Error::Domain("eps0 must lie in (0, 1/8)".into()));
    }
    let quarter: T = q(1, 4);
    let den = q::<T>(9, 64) * quarter;
    let lo = q::<T>(1, 64) * (quarter - eps0 - eps0) / den;
    let hi = q::<T>(25, 64) * (quarter + eps0 + eps0) / den;
    Ok((lo, hi))
}

/// Growth prefactor `r^2 s / (r - s)^2` for `r = 10`, `s = 3 pi / 2 + 1`.
pub fn containment_prefactor<T: Real>() -> T {
    let s = lit::<T>(1.5) * T::PI() + T::one();
    let r = lit::<T>(10.0);
    r * r * s / ((r - s) * (r - s))
}

/// `ln (g^{-1})'(y)` for `y > 1` on the real axis, using `g^{-1}(y) = asinh(ln y / lambda)`.
pub fn ln_ginv_prime<T: Real>(y: &ExtReal<T>, lambda: T) -> Result<ExtReal<T>> {
    if !(*y > ExtReal::one()) {
        return Err(Error::Domain(format!("inverse branch needs y > 1, got {y}")));
    }
    let ly = y.ln()?;
    let t = ly.scale(T::one() / lambda);
    let half_ln = t.mul(&t).add(&ExtReal::one()).ln()?.scale(lit(0.5));
    Ok(ly.add(&half_ln).add_value(lambda.ln()).neg())
}

/// Target index for step `n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PIndex<T> {
    /// Minimizer of `|z_k - g^n(1/2)|` over explicitly solved vertices.
    Exact(u64),
    /// Too large to enumerate; `approx` is `g^n(1/2) / pi`.
    Symbolic { approx: ExtReal<T> },
}

impl<T: Real> PIndex<T> {
    pub fn exact(&self) -> Option<u64> {
        match self {
            Self::Exact(k) => Some(*k),
            Self::Symbolic { .. } => None,
        }
    }

    /// `|z_p|`: exact from the vertex, else `sqrt(x^2 + pi^2) ~ x` for the orbit point.
    pub fn modulus(&self, graph: &GraphModel<T>, x: &ExtReal<T>) -> ExtReal<T> {
        match self {
            Self::Exact(k) => ExtReal::from_value(graph.z(*k as usize).norm()).expect("finite"),
            Self::Symbolic { .. } => x.mul(x).add(&ExtReal::from_value(T::PI() * T::PI()).expect("finite")).sqrt().expect("positive"),
        }
    }
}

impl<T: Real> std::fmt::Display for PIndex<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Exact(k) => write!(f, "{k}"),
            Self::Symbolic { approx } => write!(f, "~{approx}"),
        }
    }
}

/// `p_n` from the orbit point `x = g^n(1/2)`: `round(x / pi)` refined over the two neighbours on each side.
pub fn p_index<T: Real>(x: &ExtReal<T>, graph: &GraphModel<T>) -> PIndex<T> {
    let approx = x.scale(T::one() / T::PI());
    match approx.finite() {
        Some(v) if v < lit(1e15) => {
            let k0 = v.round().to_i64().expect("bounded").max(1);
            let xv = x.to_value();
            let best = (k0 - 2..=k0 + 2)
                .filter(|&k| k >= 1)
                .min_by(|&a, &b| {
                    let da = (graph.a(a as usize) - xv).abs();
                    let db = (graph.a(b as usize) - xv).abs();
                    da.partial_cmp(&db).expect("finite")
                })
                .expect("non-empty");
            PIndex::Exact(best as u64)
        }
        _ => PIndex::Symbolic { approx },
    }
}

/// Budget constants and the real orbit `x_k = g^k(1/2)`.
#[derive(Clone, Debug)]
pub struct Budget<T> {
    pub eps0: T,
    pub c: T,
    pub r: T,
    pub lambda: T,
    /// Whether `lambda` reached the certified threshold; other outputs are non-certifying.
    pub strict: bool,
    orbit: Vec<ExtReal<T>>,
    ln_gprime: Vec<ExtReal<T>>,
}

impl<T: Real> Budget<T> {
    /// Orbit data up to `x_{horizon + 1}`.
    pub fn new(lambda: T, horizon: usize, strict: bool) -> Result<Self> {
        if !(lambda > T::one()) {
            return Err(Error::Parameter(format!("lambda = {lambda} must exceed 1")));
        }
        let mut orbit = vec![ExtReal::lit(0.5)];
        for k in 0..=horizon {
            let next = g_real_ext(&orbit[k], lambda);
            orbit.push(next);
        }
        let ln_gprime = orbit.iter().map(|x| ln_g_prime_ext(x, lambda)).collect();
        Ok(Self { eps0: lit(1.0 / 32.0), c: T::one(), r: T::one(), lambda, strict, orbit, ln_gprime })
    }

    pub fn horizon(&self) -> usize {
        self.orbit.len() - 2
    }

    /// `g^k(1/2)`.
    pub fn x(&self, k: usize) -> &ExtReal<T> {
        &self.orbit[k]
    }

    /// `ln g'(g^k(1/2))`.
    pub fn ln_g_prime(&self, k: usize) -> &ExtReal<T> {
        &self.ln_gprime[k]
    }

    fn check_n(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.horizon() {
            return Err(Error::Horizon { horizon: self.horizon(), binding: format!("budget step {n}") });
        }
        Ok(())
    }

    /// `ln |(g^{-n})'(g^n(1/2))| = -sum_{k<n} ln g'(x_k)`: the unperturbed inverse derivative.
    pub fn ln_model_inverse_derivative(&self, n: usize) -> ExtReal<T> {
        self.ln_gprime[..n].iter().fold(ExtReal::zero(), |a, l| a.sub(l))
    }

    fn phi_bounds(&self) -> (T, T) {
        phi_prime_bounds(self.eps0).expect("eps0 validated")
    }

    fn ln_ginv_product(&self, n: usize, shift: T) -> Result<ExtReal<T>> {
        let mut s = ExtReal::zero();
        for k in 1..=n {
            s = s.add(&ln_ginv_prime(&self.orbit[k].add_value(shift), self.lambda)?);
        }
        Ok(s)
    }

    /// `ln (g^{-1})'(x_k + shift) + ln g'(x_{k-1})`, evaluated without cancelling the two huge logs.
    fn ln_ginv_step_ratio(&self, k: usize, shift: T) -> Result<ExtReal<T>> {
        let s = lambda_sinh_ext(&self.orbit[k - 1], T::one());
        let xk = &self.orbit[k];
        let rel = ExtReal::from_value(shift)?.div(xk)?;
        let l1p = rel.ln_1p()?;
        let d = l1p.scale(T::one() / self.lambda);
        let num = d.mul(&s.scale(lit(2.0)).add(&d));
        let q = num.div(&s.mul(&s).add(&ExtReal::one()))?;
        Ok(q.ln_1p()?.scale(lit(-0.5)).sub(&l1p))
    }

    /// `ln(lower(n) / D_n)` with `D_n` the unperturbed inverse derivative; accurate when both are tower-small.
    pub fn ln_lower_ratio(&self, n: usize) -> Result<T> {
        self.check_n(n)?;
        let (lo, _) = self.phi_bounds();
        self.ln_ratio(n, self.eps0 + self.eps0, lo)
    }

    /// `ln(upper_tight(n) / D_n)`.
    pub fn ln_upper_tight_ratio(&self, n: usize) -> Result<T> {
        self.check_n(n)?;
        let (_, hi) = self.phi_bounds();
        self.ln_ratio(n, -(self.eps0 + self.eps0), hi)
    }

    fn ln_ratio(&self, n: usize, shift: T, phi: T) -> Result<T> {
        let mut s = T::from_usize(n).expect("n") * phi.ln();
        for k in 1..=n {
            s += self.ln_ginv_step_ratio(k, shift)?.finite().unwrap_or(T::zero());
        }
        Ok(s)
    }

    /// Lower side: `(phi'_lo)^n prod_{k=1}^n (g^{-1})'(x_k + 2 eps0)`.
    pub fn lower(&self, n: usize) -> Result<ExtReal<T>> {
        self.check_n(n)?;
        let (lo, _) = self.phi_bounds();
        let l = self.ln_ginv_product(n, self.eps0 + self.eps0)?.add_value(T::from_usize(n).expect("n") * lo.ln());
        Ok(ExtReal::exp(&l))
    }

    /// Upper side in closed form: `(C0 / lambda)^n / (lambda - eps0 lambda^{2-n})`.
    pub fn upper(&self, n: usize) -> Result<ExtReal<T>> {
        self.check_n(n)?;
        let (_, c0) = self.phi_bounds();
        let nf = T::from_usize(n).expect("n");
        let tail = self.lambda - self.eps0 * self.lambda.powf(T::lit(2.0) - nf);
        if !(tail > T::zero()) {
            return Err(Error::OutOfRegime(format!("lambda - eps0 lambda^(2-n) = {tail} <= 0")));
        }
        Ok(ExtReal::exp(&ExtReal::from_value(nf * (c0 / self.lambda).ln() - tail.ln())?))
    }

    /// Upper side before the closed-form relaxation: `C0^n prod_{k=1}^n (g^{-1})'(x_k - 2 eps0)`.
    pub fn upper_tight(&self, n: usize) -> Result<ExtReal<T>> {
        self.check_n(n)?;
        let (_, c0) = self.phi_bounds();
        let l = self.ln_ginv_product(n, -(self.eps0 + self.eps0))?.add_value(T::from_usize(n).expect("n") * c0.ln());
        Ok(ExtReal::exp(&l))
    }

    /// `(lower(n), upper(n))`.
    pub fn inverse_derivative_bounds(&self, n: usize) -> Result<(ExtReal<T>, ExtReal<T>)> {
        Ok((self.lower(n)?, self.upper(n)?))
    }

    /// Containment of the pulled-back disk in `D(1/2, 1/8)`: prefactor times the upper side below `1/8 - 2 eps0`.
    pub fn containment(&self, n: usize) -> Result<bool> {
        let rhs = self.upper(n)?.scale(containment_prefactor());
        Ok(rhs < ExtReal::from_value(lit::<T>(0.125) - self.eps0 - self.eps0)?)
    }

    /// Smallest `n` at which the containment holds.
    pub fn containment_onset(&self) -> Result<usize> {
        for n in 1..=self.horizon() {
            if self.containment(n)? {
                return Ok(n);
            }
        }
        Err(Error::Horizon { horizon: self.horizon(), binding: "containment in D(1/2, 1/8)".into() })
    }

    /// Per-`n` rows as a structured text record plus CSV.
    pub fn report(&self, graph: &GraphModel<T>, n_max: usize) -> Result<(String, String)> {
        let mut text = String::new();
        let mut csv = String::from("n,lower,upper,upper_tight,p_n,containment\n");
        let _ = writeln!(text, "lambda = {:e}\neps0 = {:e}\nC = {:e}\nR = {:e}\nstrict = {}\n", self.lambda, self.eps0, self.c, self.r, self.strict);
        for n in 1..=n_max.min(self.horizon()) {
            let (lo, hi, ht) = (self.lower(n)?, self.upper(n)?, self.upper_tight(n)?);
            let p = p_index(self.x(n), graph);
            let c = self.containment(n)?;
            let _ = writeln!(text, "[[row]]\nn = {n}\nlower = \"{lo}\"\nupper = \"{hi}\"\nupper_tight = \"{ht}\"\np = \"{p}\"\ncontainment = {c}\n");
            let _ = writeln!(csv, "{n},{lo},{hi},{ht},{p},{c}");
        }
        Ok((text, csv))
    }
}

/// Which threshold conditions a given `lambda` meets.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaConditions {
    /// `lambda sinh(lambda sinh x) e^x >= 2` at `x = 1/32` (the form used in the estimates; the map's own derivative is larger).
    pub derivative_at_eps: bool,
    /// `g(x) > lambda x` and `g'(x) > lambda` on `[1/2, 8]`.
    pub expansion: bool,
    /// Upper side strictly decreasing over `n <= 50`.
    pub upper_decays: bool,
    /// Lower side below upper side over `n <= 50`.
    pub ordered: bool,
    /// `|z_{p_1}| > 10`, so the first disk has a defined tolerance.
    pub first_target_far: bool,
}

impl LambdaConditions {
    pub fn all(&self) -> bool {
        self.derivative_at_eps && self.expansion && self.upper_decays && self.ordered && self.first_target_far
    }
}

pub fn lambda_conditions(lambda: f64) -> Result<LambdaConditions> {
    let x = 1.0f64 / 32.0;
    let derivative_at_eps = lambda * (lambda * x.sinh()).sinh() * x.exp() >= 2.0;
    let expansion = (0..=300).all(|i| {
        let x = 0.5 + 7.5 * i as f64 / 300.0;
        let lg = lambda * x.sinh();
        // In logs: ln g(x) = lambda sinh x, ln g'(x) = ln lambda + ln cosh x + lambda sinh x.
        lg > (lambda * x).ln() && lambda.ln() + x.cosh().ln() + lg > lambda.ln()
    });
    let b = Budget::new(lambda, 51, false)?;
    let mut upper_decays = true;
    let mut ordered = true;
    let mut prev = b.upper(1)?;
    for n in 1..=50 {
        let hi = b.upper(n)?;
        if n > 1 && !(hi < prev) {
            upper_decays = false;
        }
        if !(b.lower(n)? <= hi) {
            ordered = false;
        }
        prev = hi;
    }
    let first_target_far = b.x(1).finite().map_or(true, |v| (v * v + std::f64::consts::PI.powi(2)).sqrt() > 10.0);
    Ok(LambdaConditions { derivative_at_eps, expansion, upper_decays, ordered, first_target_far })
}

/// Smallest grid value meeting every condition, scanning upward.
pub fn lambda0_search(grid: &[f64]) -> Result<Option<f64>> {
    for &l in grid {
        if lambda_conditions(l)?.all() {
            return Ok(Some(l));
        }
    }
    Ok(None)
}
