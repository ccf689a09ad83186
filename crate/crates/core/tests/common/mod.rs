#![allow(dead_code)]

use std::path::PathBuf;

use espm::{Cell, CellParameters, Config};

pub fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

pub fn config(name: &str) -> Config {
    Config::load(&config_path(name)).expect("shipped config loads")
}

pub fn fresh() -> Config {
    config("fresh.json")
}

pub fn params() -> CellParameters {
    fresh().resolved_parameters()
}

pub fn cell() -> Cell {
    fresh().build_cell().expect("fresh cell builds")
}

/// Fresh cell with every degradation path switched off.
pub fn inert_cell() -> Cell {
    let base = cell();
    let mut p = base.params().clone();
    p.kinetics.k_f = 0.0;
    p.kinetics.i0_pl = 0.0;
    p.aging.kprime_p = 0.0;
    p.aging.kprime_n = 0.0;
    p.aging.betaprime_p = 0.0;
    p.aging.betaprime_n = 0.0;
    base.with_params(p).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
