//! The inductive parameter selection and its verification.
//!
//! Levels `k = 1, 2, ...` pick step counts `n_k`, slack constants `C_{n_k}`
//! and powers `m` for the disk at `p_{n_{k-1}}`, then place `(w, delta)` on
//! that disk and check that its image lands inside the next target while its
//! critical values stay out. The straightening map is taken to be the
//! identity, so every inverse derivative is the model map's own.
//!
//! Orbit scales are tower-sized, so margins are carried relative to the
//! level's model derivative `D_n = |(g^{-n})'(g^n(1/2))|`; absolute values are
//! reported in extended range.

mod asymptotics;
mod audit;
mod eq3;
mod state;
mod verify;

pub use asymptotics::{check_asymptotics, correction_factors, ln_thresholds, mu_for_modulus_ext, normalized_slacks, slacks};
pub use audit::{univalence_audit, AuditReport, Localization, ESCAPE_DEPTH};
pub use eq3::{annulus_exact_deviation, eq3_area, eq3_calibration, worst_case_annulus_field, Eq3Sample};
pub use state::{ChosenParams, ConstructionConfig, ConstructionState, Level, MChoice, Margins, Mode, Selection, Target};
pub use verify::{verify_critical_exclusion, verify_inclusion, ExclusionReport, InclusionReport, StepMargin};
