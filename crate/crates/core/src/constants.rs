//! Versioned empirical constants loaded from `data/constants.toml`.

use std::sync::OnceLock;

use serde::Deserialize;

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    pub version: u32,
    pub m0: u32,
    pub delta0: f64,
    pub k0: f64,
    pub lambda0: f64,
    pub eq3_constant: f64,
}

pub const SOURCE: &str = include_str!("../data/constants.toml");

pub fn constants() -> &'static Constants {
    static C: OnceLock<Constants> = OnceLock::new();
    C.get_or_init(|| toml::from_str(SOURCE).expect("bundled constants parse"))
}
