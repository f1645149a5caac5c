//! Boundary inclusion and critical-value exclusion for one level.
//!
//! Both checks work at the scale of the disk at `p_{n_{k-1}}`, relative to
//! `u D` with `D = D_{n_k}` and `u = mu_{p_{n_{k-1}}} / 2`, and transport the result to the target by Koebe distortion
//! on the disk of radius `1/8` around `w`.

use super::asymptotics::ln_thresholds;
use super::state::{ChosenParams, ConstructionState, Level};
use crate::error::{Error, Result};
use crate::numeric::ExtReal;

type E = ExtReal<f64>;

/// Absolute margin after `s` forward steps.
#[derive(Clone, Debug, PartialEq)]
pub struct StepMargin {
    pub step: usize,
    pub margin: E,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InclusionReport {
    pub pass: bool,
    /// Smallest absolute margin over boundary samples and steps.
    pub min_margin: E,
    /// Smallest margin relative to `u D_{n_k}`.
    pub min_margin_rel: E,
    /// Boundary samples at which the verdict stabilised.
    pub samples: usize,
    /// Disk map plus `n_k` strip steps.
    pub steps: Vec<StepMargin>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExclusionReport {
    pub pass: bool,
    pub min_margin: E,
    pub min_margin_rel: E,
    /// Critical points lie where the disk map is holomorphic.
    pub critical_in_plateau: bool,
    /// `m - 1`, when `m` is exact.
    pub critical_values: Option<u64>,
    pub steps: Vec<StepMargin>,
}

/// Absolute margin at each step; passes while it exceeds `C = C_rel u D`.
fn step_margins(state: &ConstructionState, n: usize, rel: &E, c_rel: &E, unit: &E) -> Vec<StepMargin> {
    let lg: Vec<E> = (0..n).map(|j| state.ln_g_prime(j)).collect();
    let mut out = Vec::with_capacity(n + 1);
    let mut head = E::zero();
    for s in 0..=n {
        let tail = lg[s..].iter().fold(E::zero(), |a, l| a.add(l));
        let margin = tail.neg().exp().mul(rel).mul(unit);
        let pass = head.exp().mul(rel) > *c_rel;
        out.push(StepMargin { step: s, margin, pass });
        if s < n {
            head = head.add(&lg[s]);
        }
    }
    out
}

struct Inputs {
    mu: E,
    thr2: E,
    e1: E,
    e2: E,
    c_rel: E,
    unit: E,
}

fn level_inputs(state: &ConstructionState, level: &Level) -> Result<Inputs> {
    let sel = level.selection.as_ref().ok_or_else(|| Error::Parameter("level 1 has nothing to verify".into()))?;
    let mu_prev = state.levels[level.k - 2].target.mu;
    let (_, ln2) = ln_thresholds(&mu_prev)?;
    Ok(Inputs { mu: mu_prev, thr2: ln2.exp(), e1: sel.e1, e2: sel.e2, c_rel: sel.c_rel, unit: sel.unit })
}

/// Image of `|z - w| = delta` under the disk map and `g^{n_k}` lies inside the target's inner circle.
///
/// The disk map sends the circle to `w + delta (1 - mu) e^{i theta} + (1 - mu)^m e^{i m theta}` up to
/// the fixed rotation; the relative angle `(m - 1) theta` is sampled until the verdict repeats twice.
pub fn verify_inclusion(state: &ConstructionState, level: &Level, chosen: &ChosenParams) -> Result<InclusionReport> {
    let Inputs { mu, thr2, e1, c_rel, unit, .. } = level_inputs(state, level)?;
    let ln_d = level.ln_d;
    let d = ln_d.exp();
    let ub = E::one().sub(&mu);
    let delta_rel = thr2.scale(chosen.delta_scale);
    let a = chosen.m.mul(&mu.neg().ln_1p()?).sub(&ln_d).exp();
    let du = delta_rel.mul(&ub);
    let margin_at = |cos_phi: f64| -> Result<E> {
        let cross = du.mul(&a).scale(2.0 * cos_phi);
        let rho = du.mul(&du).add(&a.mul(&a)).add(&cross);
        let rho = if rho.is_positive() { rho.sqrt()? } else { E::zero() };
        let excess = if rho.add(&du).is_zero() { E::zero() } else { a.mul(&a).add(&cross).div(&rho.add(&du))? };
        let q = rho.mul(&d).scale(8.0);
        if q >= E::one() {
            return Err(Error::unsupported(chosen.w_base, 0.0, "pulled-back image leaves the univalence disk of radius 1/8"));
        }
        let one_q = E::one().sub(&q);
        let kappa_m1 = q.scale(2.0).sub(&q.mul(&q)).div(&one_q.mul(&one_q))?;
        let loss = thr2.mul(&ub).scale(chosen.delta_scale - 1.0).add(&excess).add(&rho.mul(&kappa_m1));
        Ok(e1.sub(&loss.div(&unit)?))
    };
    let sweep = |n_samples: usize| -> Result<E> {
        let Some(m) = chosen.m_exact else {
            return margin_at(1.0);
        };
        let mut worst: Option<E> = None;
        for j in 0..n_samples as u64 {
            let r = ((m - 1) % n_samples as u64) * j % n_samples as u64;
            let v = margin_at((2.0 * std::f64::consts::PI * r as f64 / n_samples as f64).cos())?;
            worst = Some(match worst {
                Some(w) => w.min(&v),
                None => v,
            });
        }
        Ok(worst.expect("non-empty"))
    };
    let cfg = &state.config;
    let mut n_samples = cfg.min_boundary_samples;
    let mut history: Vec<bool> = vec![];
    let mut rel = sweep(n_samples)?;
    history.push(rel > c_rel);
    while n_samples * 2 <= cfg.max_boundary_samples {
        let k = history.len();
        if k >= 3 && history[k - 1] == history[k - 2] && history[k - 2] == history[k - 3] {
            break;
        }
        n_samples *= 2;
        let v = sweep(n_samples)?;
        rel = rel.min(&v);
        history.push(v > c_rel);
    }
    let steps = step_margins(state, level.n(), &rel, &c_rel, &unit);
    let pass = steps.iter().all(|s| s.pass);
    Ok(InclusionReport { pass, min_margin: rel.mul(&d).mul(&unit), min_margin_rel: rel, samples: n_samples, steps })
}

/// All `m - 1` critical values of the disk map, pushed to the target, stay outside the outer circle.
///
/// The critical points sit on `|z - w| = r_c` with `r_c^{m-1} = delta / m`, so their values lie at
/// distance `delta (1 - 1/m) r_c` from `w` up to the vanishing term.
pub fn verify_critical_exclusion(state: &ConstructionState, level: &Level, chosen: &ChosenParams) -> Result<ExclusionReport> {
    let Inputs { thr2, e2, c_rel, unit, .. } = level_inputs(state, level)?;
    let d = level.ln_d.exp();
    let m = chosen.m;
    let scale = chosen.delta_scale;
    let (q_crit, one_minus_q, in_plateau) = if chosen.delta.is_positive() {
        let ln_delta = chosen.delta.ln()?;
        let ln_r = ln_delta.sub(&m.ln()?).div(&m.add_value(-1.0))?;
        let ln_q = ln_r.add(&m.recip()?.neg().ln_1p()?);
        // r_c < 1 - 4 delta / m, multiplied through by m - 1 and bounded with -ln(1 - x) <= x / (1 - x);
        // comparing the tower-small logs directly would lose the factor that separates them.
        let x = chosen.delta.scale(4.0).div(&m)?;
        let plateau = m.ln()?.sub(&ln_delta) > x.div(&E::one().sub(&x))?.mul(&m.add_value(-1.0));
        (ln_q.exp(), ln_q.exp_m1().neg(), plateau)
    } else {
        (E::zero(), E::one(), true)
    };
    let rho = thr2.mul(&q_crit).scale(scale);
    let q = rho.mul(&d).scale(8.0);
    let one_q = E::one().add(&q);
    let shrink = rho.mul(&q.scale(2.0).add(&q.mul(&q))).div(&one_q.mul(&one_q))?;
    let loss = thr2.scale(scale - 1.0).sub(&thr2.scale(scale).mul(&one_minus_q)).sub(&shrink);
    let rel = e2.add(&loss.div(&unit)?);
    let steps = step_margins(state, level.n(), &rel, &c_rel, &unit);
    let pass = in_plateau && steps.iter().all(|s| s.pass);
    Ok(ExclusionReport {
        pass,
        min_margin: rel.mul(&d).mul(&unit),
        min_margin_rel: rel,
        critical_in_plateau: in_plateau,
        critical_values: chosen.m_exact.map(|m| m - 1),
        steps,
    })
}
