//! Univalence audit over a constructed state.

use super::asymptotics::ln_thresholds;
use super::state::ConstructionState;
use crate::error::{Error, Result};
use crate::graph::{g_orbit_real, sigma_eval, Abutment, SigmaMode};
use crate::koebe::koebe_derivative_ratio;
use crate::numeric::{tower_compare, ExtReal, TowerReal};

type E = ExtReal<f64>;

/// Pulled-back radius of the disk at level `l` against `1 + 2 mu_{p_{n_l}}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Localization {
    pub level: usize,
    /// `ln((D_{n_{l+1}} B + delta)^{1/m})`.
    pub ln_radius: E,
    /// `ln(1 + 2 mu_{p_{n_l}})`.
    pub ln_bound: E,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditReport {
    /// Conjunction of the per-level critical exclusions.
    pub exclusions: bool,
    /// Distance to the critical value over the pulled-back outer radius at the third level.
    pub chain_ratio: E,
    pub chain_pass: bool,
    /// Real orbit of `sigma(0) = 1` strictly increasing past the depth threshold.
    pub escape: bool,
    /// Tower depth reached by the real orbit.
    pub escape_depth: u32,
    pub localization: Vec<Localization>,
    /// Named failures, one per failing sub-check.
    pub failures: Vec<String>,
}

impl AuditReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Tower depth the escaping orbit must reach.
pub const ESCAPE_DEPTH: u32 = 3;

/// Needs at least three levels.
pub fn univalence_audit(state: &ConstructionState) -> Result<AuditReport> {
    if state.levels.len() < 3 {
        return Err(Error::Parameter(format!("audit needs 3 levels, have {}", state.levels.len())));
    }
    let mut failures = vec![];
    let mut exclusions = true;
    for l in state.levels.iter().skip(1) {
        let ok = l.exclusion.as_ref().is_some_and(|r| r.pass);
        if !ok {
            exclusions = false;
            let margin = l.exclusion.as_ref().map(|r| r.min_margin.to_string()).unwrap_or_default();
            failures.push(format!("critical exclusion at level {} (margin {margin})", l.k));
        }
    }

    let budget = state.budget();
    let (n2, n3) = (state.levels[1].n(), state.levels[2].n());
    let lo = budget.lower(n2)?;
    let ut = budget.upper_tight(n3)?;
    let (c_lower, c_upper) = koebe_derivative_ratio(1.0f64, 0.5)?;
    let pi = std::f64::consts::PI;
    let dist = lo.scale(pi - 1.0).sub(&ut.scale(pi));
    let mu3 = state.levels[2].target.mu;
    let chain_ratio = dist.scale(c_lower).div(&ut.scale(c_upper).mul(&mu3.scale(2.0).add_value(1.0)))?;
    let chain_pass = chain_ratio >= E::from_value(state.config.audit_ratio_threshold)?;
    if !chain_pass {
        failures.push(format!("distance chain at level 3: ratio {chain_ratio} below {}", state.config.audit_ratio_threshold));
    }

    let one = sigma_eval(num_complex::Complex::new(0.0f64, 0.0), SigmaMode::Boundary(Abutment::RR))?;
    let orbit = g_orbit_real(one.re.max(0.5), 6, state.config.lambda)?;
    let increasing = orbit.windows(2).all(|w| tower_compare(&w[0], &w[1]).is_lt());
    let last = orbit.last().expect("non-empty").demote();
    let escape_depth = last.depth();
    let threshold = TowerReal::new(ESCAPE_DEPTH, 1.0)?;
    let escape = increasing && (one.re - 1.0).abs() < 1e-12 && tower_compare(&last, &threshold).is_gt();
    if !escape {
        failures.push(format!("real orbit of 1 reached depth {escape_depth} only"));
    }

    let mut localization = vec![];
    for w in state.levels.windows(2) {
        let (cur, next) = (&w[0], &w[1]);
        let Some(chosen) = state.chosen.get(&cur.k) else { continue };
        let sel = next.selection.as_ref().expect("levels past the first are selected");
        let ln_b = sel.ln_b;
        // delta / D is formed from its factors; the quotient of the tower values would lose it.
        let (_, ln2) = ln_thresholds(&cur.target.mu)?;
        let inner = ln_b.exp().add(&ln2.exp().scale(chosen.delta_scale));
        let ln_radius = next.ln_d.add(&inner.ln()?).div(&chosen.m)?;
        let ln_bound = cur.target.mu.scale(2.0).ln_1p()?;
        let pass = ln_radius < ln_bound;
        if !pass {
            failures.push(format!("localization at level {}: ln radius {ln_radius} >= {ln_bound}", cur.k));
        }
        localization.push(Localization { level: cur.k, ln_radius, ln_bound, pass });
    }
    Ok(AuditReport { exclusions, chain_ratio, chain_pass, escape, escape_depth, localization, failures })
}
