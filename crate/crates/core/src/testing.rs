use std::path::PathBuf;

use crate::config::Config;
use crate::params::CellParameters;

pub(crate) fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

pub(crate) fn config() -> Config {
    Config::load(&config_path("fresh.json")).expect("shipped fresh config loads")
}

pub(crate) fn parameters() -> CellParameters {
    config().resolved_parameters()
}
