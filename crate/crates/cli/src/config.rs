//! Run configuration: one TOML file, one section per command, `--set section.key=value` overrides.

use std::fmt::Write as _;
use std::path::Path;

use qcfold::construction::ConstructionConfig;
use serde::{Deserialize, Serialize};

/// Grammar version accepted by this build.
pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub version: u32,
    pub seed: u64,
    pub verify_disk_maps: VerifyConfig,
    pub solve_beltrami: SolveConfig,
    pub budget: BudgetConfig,
    pub construct: ConstructionConfig,
    pub render: RenderConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            version: CONFIG_VERSION,
            seed: 20,
            verify_disk_maps: VerifyConfig::default(),
            solve_beltrami: SolveConfig::default(),
            budget: BudgetConfig::default(),
            construct: ConstructionConfig::default(),
            render: RenderConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub m: Vec<u32>,
    pub delta: Vec<f64>,
    pub w: Vec<[f64; 2]>,
    pub grid: usize,
    pub fd_points: usize,
    pub fd_tolerance: f64,
    pub dilatation_bound: f64,
    pub support_radius: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            m: vec![100],
            delta: vec![0.01],
            w: vec![[0.0, 0.0]],
            grid: 256,
            fd_points: 1000,
            fd_tolerance: 1e-4,
            dilatation_bound: 0.8,
            support_radius: 0.9,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Radial,
    Disk,
    Model,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveConfig {
    pub field: FieldKind,
    pub k: f64,
    pub n: usize,
    pub half_width: f64,
    pub supersample: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub oracle_tolerance: f64,
    pub lambda: f64,
    pub m: u32,
    pub delta: f64,
    pub w: [f64; 2],
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            field: FieldKind::Radial,
            k: 1.0 / 3.0,
            n: 1024,
            half_width: 1.5,
            supersample: 8,
            tol: 1e-10,
            max_iter: 200,
            oracle_tolerance: 1e-3,
            lambda: 20.0,
            m: 100,
            delta: 0.05,
            w: [0.5, 0.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BudgetConfig {
    pub lambda: f64,
    pub n_max: usize,
    pub strict: bool,
}

impl Default for BudgetConfig {
    fn default() -> Self {
        Self { lambda: 20.0, n_max: 50, strict: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RenderConfig {
    pub lambda: f64,
    pub center: [f64; 2],
    pub half_width: f64,
    pub width: usize,
    pub height: usize,
    pub max_iter: usize,
    pub bailout: f64,
    pub disks: usize,
    pub m: u32,
    pub delta: f64,
    pub w: [f64; 2],
    pub overlay: bool,
}

impl Default for RenderConfig {
    fn default() -> Self {
        Self {
            lambda: 20.0,
            center: [0.0, 0.0],
            half_width: 12.0,
            width: 640,
            height: 320,
            max_iter: 16,
            bailout: 1e12,
            disks: 8,
            m: 20,
            delta: 0.0,
            w: [0.0, 0.0],
            overlay: true,
        }
    }
}

/// Invalid file, key, value or override.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Parses `text`, applies `section.key=value` overrides, then validates.
pub fn parse(text: &str, overrides: &[String]) -> Result<RunConfig, ConfigError> {
    let mut table: toml::Table = text.parse().map_err(|e| ConfigError(format!("config: {e}")))?;
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    let cfg: RunConfig = toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| ConfigError(format!("config: {e}")))?;
    if cfg.version != CONFIG_VERSION {
        return Err(ConfigError(format!("config version {} unsupported, expected {CONFIG_VERSION}", cfg.version)));
    }
    Ok(cfg)
}

pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<RunConfig, ConfigError> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| ConfigError(format!("{}: {e}", p.display())))?,
        None => String::new(),
    };
    parse(&text, overrides)
}

/// `value` is read as a TOML value; anything that does not parse is taken as a bare string.
fn apply_override(table: &mut toml::Table, item: &str) -> Result<(), ConfigError> {
    let (key, raw) = item.split_once('=').ok_or_else(|| ConfigError(format!("override `{item}` is not key=value")))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(ConfigError(format!("override key `{key}` is malformed")));
    }
    let value = match format!("v = {}", raw.trim()).parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.trim().to_string()),
    };
    let (last, parents) = path.split_last().expect("non-empty");
    let mut cur = table;
    for p in parents {
        let entry = cur.entry(p.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry.as_table_mut().ok_or_else(|| ConfigError(format!("override `{key}`: `{p}` is not a section")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

/// `(key, description)` for every accepted key; keys without a default are marked unset.
pub const KEYS: &[(&str, &str)] = &[
    ("version", "Config grammar version; must equal 1."),
    ("seed", "Seed for every randomized check."),
    ("verify_disk_maps.m", "Powers `m` to sweep."),
    ("verify_disk_maps.delta", "Values of `delta` to sweep."),
    ("verify_disk_maps.w", "Shifts `w` as `[re, im]`, each with `|w| < 3/4`."),
    ("verify_disk_maps.grid", "Polar samples per axis for the dilatation sup; at least 256."),
    ("verify_disk_maps.fd_points", "Random annulus points for the finite-difference comparison, split across pairs."),
    ("verify_disk_maps.fd_tolerance", "Relative tolerance between closed-form and finite-difference dilatation."),
    ("verify_disk_maps.dilatation_bound", "Sup of `|mu_psi|` must stay below this."),
    ("verify_disk_maps.support_radius", "Dilatation of `rho_w o psi` must vanish on `|z| <= s`; checked when `delta < 1/16`."),
    ("solve_beltrami.field", "`radial` (`k z / zbar` on the disk), `disk` (constant `k` on the disk) or `model` (one disk of the model map)."),
    ("solve_beltrami.k", "Dilatation size for the `radial` and `disk` fields."),
    ("solve_beltrami.n", "Grid side."),
    ("solve_beltrami.half_width", "Half-width of the square window around the field centre."),
    ("solve_beltrami.supersample", "Sub-samples per cell axis when averaging the oracle fields."),
    ("solve_beltrami.tol", "Stop when the L2 change of the density falls below this."),
    ("solve_beltrami.max_iter", "Iteration cap."),
    ("solve_beltrami.oracle_tolerance", "Largest accepted sup error against the closed form."),
    ("solve_beltrami.lambda", "Model field: `lambda`."),
    ("solve_beltrami.m", "Model field: power of the disk map on `D_1`."),
    ("solve_beltrami.delta", "Model field: `delta` on `D_1`."),
    ("solve_beltrami.w", "Model field: shift on `D_1` as `[re, im]`."),
    ("budget.lambda", "`lambda` of the budget."),
    ("budget.n_max", "Rows `n = 1 ..= n_max`."),
    ("budget.strict", "Require every threshold condition on `lambda`."),
    ("construct.lambda", "`lambda` of the construction."),
    ("construct.mode", "`toy` (any `lambda > 1`) or `strict` (`lambda` must reach `lambda0`, all parameters permissible)."),
    ("construct.levels", "Levels to build, counting `n_1 = 1`; the audit needs 3."),
    ("construct.horizon", "Largest `n` scanned per level."),
    ("construct.dist_fraction", "`dist_n` as a fraction of `|z_{p_n}|`."),
    ("construct.dist_override", "Fixed `dist_n` for every `n`; unset by default."),
    ("construct.m_safety", "Multiplier on the smallest admissible power `m`."),
    ("construct.eq3_constant", "Area-law constant; unset uses the bundled value."),
    ("construct.delta0", "Permissibility bound on `delta`; unset uses the bundled value."),
    ("construct.min_boundary_samples", "First boundary sample count of the inclusion check."),
    ("construct.max_boundary_samples", "Sample count cap of the inclusion check."),
    ("construct.audit_ratio_threshold", "The distance-chain ratio of the audit passes at or above this."),
    ("render.lambda", "`lambda` of the rendered model."),
    ("render.center", "Window centre as `[re, im]`."),
    ("render.half_width", "Half-width of the window; the height follows the pixel aspect."),
    ("render.width", "Image width in pixels."),
    ("render.height", "Image height in pixels."),
    ("render.max_iter", "Iterations before a pixel counts as bounded."),
    ("render.bailout", "Escape modulus."),
    ("render.disks", "Disks `D_n` with `n <= disks` carry the disk parameters below and are drawn."),
    ("render.m", "Power of every disk map."),
    ("render.delta", "`delta` of every disk map."),
    ("render.w", "Shift of every disk map as `[re, im]`."),
    ("render.overlay", "Draw the strip boundary, disk circles and centres."),
];

fn default_value(key: &str) -> Option<String> {
    let table = toml::Table::try_from(RunConfig::default()).expect("defaults serialize");
    let mut cur = &table;
    let parts: Vec<&str> = key.split('.').collect();
    let (last, parents) = parts.split_last()?;
    for p in parents {
        cur = cur.get(*p)?.as_table()?;
    }
    cur.get(*last).map(|v| v.to_string())
}

/// Markdown reference of every key and default, regenerated by `qcfold config-reference`.
pub fn reference_markdown() -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# Configuration reference\n");
    let _ = writeln!(s, "Generated by `qcfold config-reference`; do not edit by hand.\n");
    let _ = writeln!(s, "Config files are TOML, grammar version {CONFIG_VERSION}. Unknown keys are rejected.");
    let _ = writeln!(s, "Any key can be overridden with `--set section.key=value`, where `value` is a TOML value.\n");
    let mut section: Option<&str> = None;
    for (key, desc) in KEYS {
        let (sec, name) = key.rsplit_once('.').unwrap_or(("", key));
        if section != Some(sec) {
            let title = if sec.is_empty() { "top level".to_string() } else { format!("[{sec}]") };
            let _ = writeln!(s, "\n## {title}\n\n| key | default | meaning |\n|---|---|---|");
            section = Some(sec);
        }
        let default = default_value(key).unwrap_or_else(|| "unset".into());
        let _ = writeln!(s, "| `{name}` | `{default}` | {desc} |");
    }
    s
}
