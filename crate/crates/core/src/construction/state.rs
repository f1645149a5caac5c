use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::asymptotics::{check_asymptotics, correction_factors, ln_thresholds, mu_for_modulus_ext, normalized_slacks};
use super::verify::{verify_critical_exclusion, verify_inclusion, ExclusionReport, InclusionReport};
use crate::constants::constants;
use crate::error::{Error, Result};
use crate::graph::GraphModel;
use crate::koebe::{p_index, Budget, PIndex};
use crate::numeric::{ExtReal, LogComplex};

type E = ExtReal<f64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Certified constants; `lambda` must reach `lambda0`.
    Strict,
    /// Any `lambda > 1`; permissibility and containment are reported, not required.
    Toy,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Strict => "strict",
            Mode::Toy => "toy",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConstructionConfig {
    pub lambda: f64,
    pub mode: Mode,
    /// Levels to construct, counting `n_1 = 1`.
    pub levels: usize,
    /// Largest `n` scanned when selecting `n_k`.
    pub horizon: usize,
    /// `dist_n = dist_fraction * |z_{p_n}|`.
    pub dist_fraction: f64,
    /// Fixed `dist_n` for every `n`, overriding `dist_fraction`.
    pub dist_override: Option<f64>,
    /// Multiplier applied to the smallest admissible `m`.
    pub m_safety: f64,
    /// Defaults to the bundled constant.
    pub eq3_constant: Option<f64>,
    /// Defaults to the bundled constant.
    pub delta0: Option<f64>,
    pub min_boundary_samples: usize,
    pub max_boundary_samples: usize,
    /// The univalence chain ratio passes at or above this value.
    pub audit_ratio_threshold: f64,
}

impl Default for ConstructionConfig {
    fn default() -> Self {
        Self {
            lambda: 20.0,
            mode: Mode::Toy,
            levels: 3,
            horizon: 8,
            dist_fraction: 0.5,
            dist_override: None,
            m_safety: 2.0,
            eq3_constant: None,
            delta0: None,
            min_boundary_samples: 256,
            max_boundary_samples: 65536,
            audit_ratio_threshold: 10.0,
        }
    }
}

/// Orbit point `g^n(1/2)` with its nearest disk.
#[derive(Clone, Debug, PartialEq)]
pub struct Target {
    pub n: usize,
    pub x: E,
    pub p: PIndex<f64>,
    pub modulus: E,
    /// `mu_{p_n}`.
    pub mu: E,
    /// `a_{p_n} - g^n(1/2)`; 0 when `p_n` is symbolic.
    pub re_offset: f64,
    pub dist: E,
}

/// Power `m` of the disk map, with `hat = m * min_C` kept exactly for the eq3 comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct MChoice {
    pub value: E,
    pub hat: E,
    pub min_c: E,
    pub exact: Option<u64>,
    /// Which condition set the size: `vanishing-term`, `critical-radius` or `eq3`.
    pub binding: &'static str,
}

/// The three inequality margins. `*_rel` are relative to `u D_n` with `u = mu_{p_{n_{k-1}}} / 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Margins {
    pub m1: E,
    pub m2: E,
    pub m3: E,
    pub m1_rel: E,
    pub m2_rel: E,
    /// `K * 8 pi delta0 / m`, the bound used for `sup |psi - id|`.
    pub eq3_bound: E,
    /// `eq3_bound / (min C / 2^k)`, formed from `m * min C` so it stays finite.
    pub eq3_fraction: E,
}

impl Margins {
    pub fn all_positive(&self) -> bool {
        self.m1_rel.is_positive() && self.m2_rel.is_positive() && self.m3.is_positive()
    }
}

/// Quantities fixed when a level is selected.
#[derive(Clone, Debug, PartialEq)]
pub struct Selection {
    pub ln_a: E,
    pub ln_b: E,
    /// `u = mu_{p_{n_{k-1}}} / 2`; the slacks below are in units of `u` so they stay of order one.
    pub unit: E,
    /// `(A - (2 - mu)/2) / u`.
    pub e1: E,
    /// `((2 - mu)/(2 - 2 mu) - B) / u`.
    pub e2: E,
    /// `ln(c_n / D_n)` with `c_n` the certified lower bound.
    pub ln_c_ratio: f64,
    /// `C_{n_k} / (u D_{n_k})`.
    pub c_rel: E,
    pub c: E,
    pub m: MChoice,
    pub margins: Margins,
    /// Candidates below `n_k` and why they failed.
    pub rejected: Vec<(usize, String)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Level {
    pub k: usize,
    pub target: Target,
    /// `ln D_{n_k}`.
    pub ln_d: E,
    pub selection: Option<Selection>,
    pub inclusion: Option<InclusionReport>,
    pub exclusion: Option<ExclusionReport>,
}

impl Level {
    pub fn n(&self) -> usize {
        self.target.n
    }
}

/// `(w, delta, m)` for the disk at `p_{n_level}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChosenParams {
    pub level: usize,
    pub p: PIndex<f64>,
    pub w_base: f64,
    /// `w - w_base`, first order in the inverse derivative.
    pub w_offset: LogComplex<f64>,
    pub delta: E,
    /// `delta / D_{n_{level+1}}` as a multiple of `(2 - mu)/(2 - 2 mu)`.
    pub delta_scale: f64,
    pub m: E,
    pub m_exact: Option<u64>,
    pub permissible: bool,
    /// `w` inside `D(1/2, 1/8)` per the budget containment test.
    pub contained: bool,
}

/// The inductive state; levels are appended only after all their checks have run.
#[derive(Clone, Debug)]
pub struct ConstructionState {
    pub config: ConstructionConfig,
    pub delta0: f64,
    pub eq3_constant: f64,
    budget: Budget<f64>,
    graph: GraphModel<f64>,
    pub levels: Vec<Level>,
    /// Keyed by the level whose disk the parameters belong to.
    pub chosen: BTreeMap<usize, ChosenParams>,
}

impl ConstructionState {
    /// Level 1 only: `n_1 = 1`, all parameters zero.
    pub fn new(config: ConstructionConfig) -> Result<Self> {
        let c = constants();
        if !(config.lambda > 1.0) {
            return Err(Error::Parameter(format!("lambda = {} must exceed 1", config.lambda)));
        }
        if config.mode == Mode::Strict && config.lambda < c.lambda0 {
            return Err(Error::Parameter(format!("strict mode needs lambda >= lambda0 = {}", c.lambda0)));
        }
        if config.levels < 1 || config.horizon < 2 || !(config.m_safety >= 1.0) || config.min_boundary_samples < 256 {
            return Err(Error::Parameter("levels >= 1, horizon >= 2, m_safety >= 1, min_boundary_samples >= 256".into()));
        }
        let budget = Budget::new(config.lambda, config.horizon + 1, config.mode == Mode::Strict)?;
        let graph = GraphModel::solve(config.lambda, 0)?;
        let mut s = Self {
            delta0: config.delta0.unwrap_or(c.delta0),
            eq3_constant: config.eq3_constant.unwrap_or(c.eq3_constant),
            config,
            budget,
            graph,
            levels: vec![],
            chosen: BTreeMap::new(),
        };
        let target = s.target(1)?;
        let ln_d = s.budget.ln_model_inverse_derivative(1);
        s.levels.push(Level { k: 1, target, ln_d, selection: None, inclusion: None, exclusion: None });
        Ok(s)
    }

    /// Runs the configured number of levels.
    pub fn run(config: ConstructionConfig) -> Result<Self> {
        let mut s = Self::new(config)?;
        while s.levels.len() < s.config.levels {
            s.advance()?;
        }
        Ok(s)
    }

    pub fn budget(&self) -> &Budget<f64> {
        &self.budget
    }

    pub fn graph(&self) -> &GraphModel<f64> {
        &self.graph
    }

    /// Orbit point, target index and conformality data for step `n`.
    pub fn target(&self, n: usize) -> Result<Target> {
        let x = *self.budget.x(n);
        let p = p_index(&x, &self.graph);
        let modulus = p.modulus(&self.graph, &x);
        let mu = mu_for_modulus_ext(&modulus)?;
        let re_offset = match p {
            PIndex::Exact(k) => self.graph.a(k as usize) - x.to_value(),
            PIndex::Symbolic { .. } => 0.0,
        };
        let dist = match self.config.dist_override {
            Some(d) => E::from_value(d)?,
            None => modulus.scale(self.config.dist_fraction),
        };
        Ok(Target { n, x, p, modulus, mu, re_offset, dist })
    }

    /// Whether step `n` passes the correction-factor thresholds at `dist_n = f |z_{p_n}|` for each fraction `f`.
    pub fn dist_sensitivity(&self, n: usize, mu_prev: &E, fractions: &[f64]) -> Result<Vec<(f64, bool)>> {
        let t = self.target(n)?;
        fractions
            .iter()
            .map(|&f| {
                let dist = t.modulus.scale(f);
                let ok = match correction_factors(&t.mu, &dist) {
                    Ok(_) => check_asymptotics(&t.mu, mu_prev, &dist)?,
                    Err(_) => false,
                };
                Ok((f, ok))
            })
            .collect()
    }

    /// `ln g'(g^j(1/2))`.
    pub fn ln_g_prime(&self, j: usize) -> E {
        *self.budget.ln_g_prime(j)
    }

    /// Smallest admissible `n_k`, then `C_{n_k}`, then `m` for the previous disk.
    pub fn select_level(&self) -> Result<Level> {
        let k = self.levels.len() + 1;
        let prev = self.levels.last().expect("level 1 exists");
        let mu_prev = prev.target.mu;
        let mut rejected = vec![];
        for n in prev.n() + 1..=self.config.horizon {
            let target = match self.target(n) {
                Ok(t) => t,
                Err(e) => {
                    rejected.push((n, e.to_string()));
                    continue;
                }
            };
            let (ln_a, ln_b) = match correction_factors(&target.mu, &target.dist) {
                Ok(v) => v,
                Err(e) => {
                    rejected.push((n, e.to_string()));
                    continue;
                }
            };
            let (ln1, ln2) = ln_thresholds(&mu_prev)?;
            if !(ln_a >= ln1 && ln_b <= ln2) {
                rejected.push((n, format!("correction factors ln A = {ln_a}, ln B = {ln_b} miss the thresholds")));
                continue;
            }
            let ln_d = self.budget.ln_model_inverse_derivative(n);
            let (e1, e2) = normalized_slacks(&ln_a, &ln_b, &mu_prev)?;
            let unit = mu_prev.scale(0.5);
            let ln_c_ratio = self.budget.ln_lower_ratio(n)?;
            let c_rel = e1.min(&e2).scale(0.5 * ln_c_ratio.exp());
            let c = c_rel.mul(&unit).mul(&ln_d.exp());
            let min_c = self.levels.iter().filter_map(|l| l.selection.as_ref().map(|s| s.c)).fold(c, |a, b| a.min(&b));
            let mut sel = Selection {
                ln_a,
                ln_b,
                unit,
                e1,
                e2,
                ln_c_ratio,
                c_rel,
                c,
                m: MChoice { value: E::zero(), hat: E::zero(), min_c, exact: None, binding: "" },
                margins: Margins {
                    m1: E::zero(),
                    m2: E::zero(),
                    m3: E::zero(),
                    m1_rel: E::zero(),
                    m2_rel: E::zero(),
                    eq3_bound: E::zero(),
                    eq3_fraction: E::zero(),
                },
                rejected: rejected.clone(),
            };
            sel.m = self.choose_m(k, &mu_prev, &ln_d, &sel)?;
            sel.margins = self.eq_margins(k, &mu_prev, &ln_d, &sel, &sel.m)?;
            return Ok(Level { k, target, ln_d, selection: Some(sel), inclusion: None, exclusion: None });
        }
        let binding = rejected.last().map(|r| format!("n = {}: {}", r.0, r.1)).unwrap_or_else(|| "empty scan".into());
        Err(Error::Horizon { horizon: self.config.horizon, binding })
    }

    fn eq3_numerator(&self) -> E {
        E::from_value(self.eq3_constant * 8.0 * std::f64::consts::PI * self.delta0).expect("finite")
    }

    fn choose_m(&self, k: usize, mu_prev: &E, ln_d: &E, sel: &Selection) -> Result<MChoice> {
        let ln1m = mu_prev.neg().ln_1p()?;
        // (1 - mu)^m <= C / 2, relative to D.
        let m_a = ln_d.add(&sel.c_rel.mul(&sel.unit).scale(0.5).ln()?).div(&ln1m)?;
        // 1 - Q(m) <= tau with Q(m) = (thr2 D / m)^{1/(m-1)} (m-1)/m, via -ln Q <= (L + 1 + ln m)/(m - 1).
        let (_, ln2) = ln_thresholds(mu_prev)?;
        let thr2 = ln2.exp();
        let tau = sel.e2.sub(&sel.c_rel).mul(&sel.unit).div(&thr2.scale(2.0))?;
        let big_l = ln2.add(ln_d).neg().add_value(1.0);
        let mut m_b = big_l.div(&tau)?.add_value(1.0);
        for _ in 0..6 {
            m_b = big_l.add(&m_b.ln()?).div(&tau)?.add_value(1.0);
        }
        // K 8 pi delta0 / m <= min C / 2^{k+1}.
        let hat_c = self.eq3_numerator().scale(2f64.powi(k as i32 + 1));
        let m_c = hat_c.div(&sel.m.min_c)?;
        let (mut m, mut binding) = (m_a, "vanishing-term");
        if m_b > m {
            (m, binding) = (m_b, "critical-radius");
        }
        if m_c > m {
            (m, binding) = (m_c, "eq3");
        }
        let m = m.max(&E::lit(2.0)).scale(self.config.m_safety);
        let (value, exact) = match m.finite() {
            Some(v) if v < 9.0e15 => {
                let e = ((v / 2.0).ceil() * 2.0) as u64;
                (E::from_value(e as f64)?, Some(e))
            }
            _ => (m, None),
        };
        let hat = if binding == "eq3" && exact.is_none() { hat_c.scale(self.config.m_safety) } else { value.mul(&sel.m.min_c) };
        Ok(MChoice { value, hat, min_c: sel.m.min_c, exact, binding })
    }

    /// Margins of the three inequalities at level `k` for power `m`.
    pub fn eq_margins(&self, k: usize, mu_prev: &E, ln_d: &E, sel: &Selection, m: &MChoice) -> Result<Margins> {
        let (_, ln2) = ln_thresholds(mu_prev)?;
        let thr2 = ln2.exp();
        let mv = m.value;
        let vanishing = mv.mul(&mu_prev.neg().ln_1p()?).sub(ln_d).sub(&sel.unit.ln()?).exp();
        let m1_rel = sel.e1.sub(&vanishing).sub(&sel.c_rel);
        let ln_q = ln2.add(ln_d).sub(&mv.ln()?).div(&mv.add_value(-1.0))?.add(&mv.recip()?.neg().ln_1p()?);
        let one_minus_q = ln_q.exp_m1().neg();
        let m2_rel = sel.e2.sub(&thr2.mul(&one_minus_q).div(&sel.unit)?).sub(&sel.c_rel);
        let d = ln_d.exp().mul(&sel.unit);
        let eq3_bound = self.eq3_numerator().div(&mv)?;
        let scale = 2f64.powi(k as i32);
        let eq3_fraction = self.eq3_numerator().scale(scale).div(&m.hat)?;
        let m3 = m.min_c.scale(1.0 / scale).mul(&E::one().sub(&eq3_fraction));
        Ok(Margins { m1: m1_rel.mul(&d), m2: m2_rel.mul(&d), m3, m1_rel, m2_rel, eq3_bound, eq3_fraction })
    }

    /// Margins at level `k` with that level's `m` multiplied by `factor`.
    pub fn margins_with_scaled_m(&self, k: usize, factor: f64) -> Result<Margins> {
        let lvl = &self.levels[k - 1];
        let sel = lvl.selection.as_ref().ok_or_else(|| Error::Parameter("level 1 has no margins".into()))?;
        let mu_prev = self.levels[k - 2].target.mu;
        let m = MChoice {
            value: sel.m.value.scale(factor),
            hat: sel.m.hat.scale(factor),
            exact: sel.m.exact.map(|e| (e as f64 * factor) as u64),
            ..sel.m.clone()
        };
        self.eq_margins(k, &mu_prev, &lvl.ln_d, sel, &m)
    }

    /// Margins at level `k` with `C_{n_k}` replaced by `c_rel * u * D_{n_k}`.
    pub fn margins_with_c(&self, k: usize, c_rel: E) -> Result<Margins> {
        let lvl = &self.levels[k - 1];
        let mut sel = lvl.selection.clone().ok_or_else(|| Error::Parameter("level 1 has no margins".into()))?;
        sel.c_rel = c_rel;
        let mu_prev = self.levels[k - 2].target.mu;
        self.eq_margins(k, &mu_prev, &lvl.ln_d, &sel, &sel.m)
    }

    /// `w = g^{-n_k}(z_{p_{n_k}})` to first order and `delta = (2 - mu)/(2 - 2 mu) D_{n_k}` for the disk at `p_{n_{k-1}}`.
    pub fn choose_w_delta(&self, level: &Level) -> Result<ChosenParams> {
        let sel = level.selection.as_ref().ok_or_else(|| Error::Parameter("level 1 chooses no parameters".into()))?;
        let prev = &self.levels[level.k - 2];
        let (_, ln2) = ln_thresholds(&prev.target.mu)?;
        let d = level.ln_d.exp();
        let delta = ln2.exp().mul(&d);
        let offset = Complex::new(level.target.re_offset, std::f64::consts::PI);
        let w_offset = LogComplex::from_ext(&d)?.mul(&LogComplex::from_complex(offset)?);
        let w_base = 0.5;
        let off_mod = w_offset.modulus();
        let permissible = delta < E::from_value(self.delta0)? && off_mod.add_value(w_base) < E::lit(0.75);
        let contained = off_mod < E::lit(0.125) && self.budget.containment(level.n())?;
        Ok(ChosenParams {
            level: prev.k,
            p: prev.target.p,
            w_base,
            w_offset,
            delta,
            delta_scale: 1.0,
            m: sel.m.value,
            m_exact: sel.m.exact,
            permissible,
            contained,
        })
    }

    /// Selects, chooses and verifies one more level, then commits it.
    pub fn advance(&mut self) -> Result<()> {
        let mut level = self.select_level()?;
        let chosen = self.choose_w_delta(&level)?;
        level.inclusion = Some(verify_inclusion(self, &level, &chosen)?);
        level.exclusion = Some(verify_critical_exclusion(self, &level, &chosen)?);
        self.chosen.insert(chosen.level, chosen);
        self.levels.push(level);
        Ok(())
    }

    /// Re-chooses `(w, delta)` for the disk at level `k - 1`; other levels are untouched.
    pub fn rechoose(&mut self, k: usize) -> Result<()> {
        let chosen = self.choose_w_delta(&self.levels[k - 1])?;
        self.chosen.insert(chosen.level, chosen);
        Ok(())
    }

    /// `(w, delta)` of the disk at `p_{n_l}`, zero for levels without a choice.
    pub fn disk_parameters(&self, level: usize) -> (f64, E) {
        match self.chosen.get(&level) {
            Some(c) => (c.w_base, c.delta),
            None => (0.0, E::zero()),
        }
    }

    /// Every level's checks passed, plus permissibility and containment in strict mode.
    pub fn all_checks_pass(&self) -> bool {
        let levels_ok = self.levels.iter().skip(1).all(|l| {
            l.selection.as_ref().is_some_and(|s| s.margins.all_positive())
                && l.inclusion.as_ref().is_some_and(|r| r.pass)
                && l.exclusion.as_ref().is_some_and(|r| r.pass)
        });
        levels_ok && (self.config.mode == Mode::Toy || self.strict_failures().is_empty())
    }

    /// Permissibility and containment failures, named by level.
    pub fn strict_failures(&self) -> Vec<String> {
        let mut v = vec![];
        for c in self.chosen.values() {
            if !c.permissible {
                v.push(format!("level {}: parameters not permissible (delta = {}, delta0 = {})", c.level, c.delta, self.delta0));
            }
            if !c.contained {
                v.push(format!("level {}: w not certified inside D(1/2, 1/8)", c.level));
            }
        }
        v
    }

    /// Deterministic structured text record of the whole state.
    pub fn to_record(&self) -> String {
        let mut s = String::new();
        let c = &self.config;
        let _ = writeln!(s, "[config]\nlambda = {:?}\nmode = \"{}\"\nlevels = {}\nhorizon = {}", c.lambda, c.mode.name(), c.levels, c.horizon);
        let _ = writeln!(s, "dist_fraction = {:?}\nm_safety = {:?}\ndelta0 = {:?}\neq3_constant = {:?}", c.dist_fraction, c.m_safety, self.delta0, self.eq3_constant);
        if let Some(d) = c.dist_override {
            let _ = writeln!(s, "dist_override = {d:?}");
        }
        for l in &self.levels {
            let t = &l.target;
            let _ = writeln!(s, "\n[[level]]\nk = {}\nn = {}\np = \"{}\"\nx = \"{}\"\nmodulus = \"{}\"\nmu = \"{}\"", l.k, t.n, t.p, t.x, t.modulus, t.mu);
            let _ = writeln!(s, "re_offset = {:?}\ndist = \"{}\"\nln_d = \"{}\"", t.re_offset, t.dist, l.ln_d);
            if let Some(sel) = &l.selection {
                let mg = &sel.margins;
                let _ = writeln!(s, "ln_a = \"{}\"\nln_b = \"{}\"\ne1 = \"{}\"\ne2 = \"{}\"\nln_c_ratio = {:?}", sel.ln_a, sel.ln_b, sel.e1, sel.e2, sel.ln_c_ratio);
                let _ = writeln!(s, "c = \"{}\"\nc_rel = \"{}\"\nm = \"{}\"\nm_binding = \"{}\"", sel.c, sel.c_rel, sel.m.value, sel.m.binding);
                let _ = writeln!(s, "m1 = \"{}\"\nm2 = \"{}\"\nm3 = \"{}\"\nm1_rel = \"{}\"\nm2_rel = \"{}\"\neq3_bound = \"{}\"", mg.m1, mg.m2, mg.m3, mg.m1_rel, mg.m2_rel, mg.eq3_bound);
            }
            if let Some(r) = &l.inclusion {
                let _ = writeln!(s, "inclusion = {}\ninclusion_margin = \"{}\"\ninclusion_samples = {}", r.pass, r.min_margin, r.samples);
            }
            if let Some(r) = &l.exclusion {
                let _ = writeln!(s, "exclusion = {}\nexclusion_margin = \"{}\"\ncritical_in_plateau = {}", r.pass, r.min_margin, r.critical_in_plateau);
            }
        }
        for c in self.chosen.values() {
            let _ = writeln!(s, "\n[[chosen]]\nlevel = {}\np = \"{}\"\nw_base = {:?}\nw_offset = \"{}\"", c.level, c.p, c.w_base, c.w_offset);
            let _ = writeln!(s, "delta = \"{}\"\ndelta_scale = {:?}\nm = \"{}\"\npermissible = {}\ncontained = {}", c.delta, c.delta_scale, c.m, c.permissible, c.contained);
        }
        s
    }

    /// SHA-256 of [`Self::to_record`], hex encoded.
    pub fn state_hash(&self) -> String {
        Sha256::digest(self.to_record().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// One row per level with its margins and verdicts.
    pub fn audit_csv(&self) -> String {
        let mut s = String::from("level,n,p,mu,dist,C,m,m_binding,m1,m2,m3,inclusion,inclusion_margin,exclusion,exclusion_margin\n");
        for l in &self.levels {
            let t = &l.target;
            let _ = write!(s, "{},{},{},{},{}", l.k, t.n, t.p, t.mu, t.dist);
            match &l.selection {
                Some(sel) => {
                    let mg = &sel.margins;
                    let _ = write!(s, ",{},{},{},{},{},{}", sel.c, sel.m.value, sel.m.binding, mg.m1, mg.m2, mg.m3);
                }
                None => s.push_str(",,,,,,"),
            }
            match (&l.inclusion, &l.exclusion) {
                (Some(i), Some(e)) => {
                    let _ = writeln!(s, ",{},{},{},{}", i.pass, i.min_margin, e.pass, e.min_margin);
                }
                _ => s.push_str(",,,,\n"),
            }
        }
        s
    }
}
