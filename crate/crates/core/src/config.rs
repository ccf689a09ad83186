//! JSON config files.
//!
//! A config holds the parameter groups of [`CellParameters`] at the top
//! level, next to `ocp` (paths of the two OCP tables, relative to the config
//! file), `mesh`, `experiment` and the optional identified blocks `theta1`
//! (fresh-cell vector) and `theta2` (aged-cell vector).

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cell::Cell;
use crate::error::{Error, Result};
use crate::identification::pso::PsoConfig;
use crate::ocp::{OcpCurve, OcpSet};
use crate::params::CellParameters;
use crate::state::InitialFilm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mesh {
    /// Radial shells per particle.
    pub n_r_p: usize,
    pub n_r_n: usize,
    /// Axial cells per region.
    pub n_x_p: usize,
    pub n_x_s: usize,
    pub n_x_n: usize,
}

impl Default for Mesh {
    fn default() -> Self {
        Self {
            n_r_p: 20,
            n_r_n: 20,
            n_x_p: 10,
            n_x_s: 10,
            n_x_n: 10,
        }
    }
}

impl Mesh {
    pub fn validate(&self) -> Result<()> {
        for (field, n) in [
            ("mesh.n_r_p", self.n_r_p),
            ("mesh.n_r_n", self.n_r_n),
            ("mesh.n_x_p", self.n_x_p),
            ("mesh.n_x_s", self.n_x_s),
            ("mesh.n_x_n", self.n_x_n),
        ] {
            if n < 3 {
                return Err(Error::invariant(field, format!("need at least 3 cells, got {n}")));
            }
        }
        Ok(())
    }

    /// Every count multiplied by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            n_r_p: self.n_r_p * factor,
            n_r_n: self.n_r_n * factor,
            n_x_p: self.n_x_p * factor,
            n_x_s: self.n_x_s * factor,
            n_x_n: self.n_x_n * factor,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OcpFiles {
    pub positive: PathBuf,
    pub negative: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Experiment {
    /// Capacity used for C-rates and Coulomb counting (Ah).
    pub nominal_capacity_ah: f64,
    /// Discharge voltage cutoff (V).
    pub cutoff_v: f64,
    #[serde(default = "default_dt")]
    pub dt_s: f64,
    #[serde(default = "default_soc0")]
    pub soc0: f64,
    #[serde(default = "default_max_time")]
    pub max_time_s: f64,
    /// Pre-existing film thicknesses at the start of a run (m).
    #[serde(default)]
    pub initial_l_sei_m: f64,
    #[serde(default)]
    pub initial_l_li_m: f64,
}

fn default_dt() -> f64 {
    1.0
}

fn default_soc0() -> f64 {
    1.0
}

fn default_max_time() -> f64 {
    36_000.0
}

impl Experiment {
    pub fn validate(&self) -> Result<()> {
        if !(self.nominal_capacity_ah > 0.0) {
            return Err(Error::invariant("experiment.nominal_capacity_ah", "must be > 0"));
        }
        if !(self.dt_s > 0.0) {
            return Err(Error::invariant("experiment.dt_s", "must be > 0"));
        }
        if !(0.0..=1.0).contains(&self.soc0) {
            return Err(Error::invariant("experiment.soc0", "must lie in [0, 1]"));
        }
        if !(self.max_time_s > 0.0) {
            return Err(Error::invariant("experiment.max_time_s", "must be > 0"));
        }
        if !(self.initial_l_sei_m >= 0.0 && self.initial_l_li_m >= 0.0) {
            return Err(Error::invariant("experiment.initial_l_sei_m", "film thicknesses must be >= 0"));
        }
        Ok(())
    }
}

/// Fresh-cell identified vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theta1 {
    pub a_cell: f64,
    pub r_l: f64,
    pub v_n: f64,
    pub r_p: f64,
    pub r_n: f64,
    pub d_s_ref_p: f64,
    pub d_s_ref_n: f64,
    pub theta_p_100: f64,
    pub theta_n_100: f64,
}

impl Theta1 {
    pub fn apply(&self, p: &mut CellParameters) {
        p.geometry.a_cell = self.a_cell;
        p.resistances.r_l = self.r_l;
        p.composition.v_n = self.v_n;
        p.geometry.r_p = self.r_p;
        p.geometry.r_n = self.r_n;
        p.transport.d_s_ref_p = self.d_s_ref_p;
        p.transport.d_s_ref_n = self.d_s_ref_n;
        p.stoichiometry.theta_p_100 = self.theta_p_100;
        p.stoichiometry.theta_n_100 = self.theta_n_100;
    }
}

/// Aged-cell identified vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theta2 {
    /// Film thickness over film conductivity (ohm m2).
    pub l_sei_over_kappa_sei: f64,
    pub theta_p_0: f64,
    pub theta_n_100: f64,
}

impl Theta2 {
    pub fn apply(&self, p: &mut CellParameters) {
        p.stoichiometry.theta_p_0 = self.theta_p_0;
        p.stoichiometry.theta_n_100 = self.theta_n_100;
    }

    /// SEI thickness implied by the identified ratio.
    pub fn l_sei(&self, kappa_sei: f64) -> f64 {
        self.l_sei_over_kappa_sei * kappa_sei
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    #[serde(flatten)]
    pub cell: CellParameters,
    pub ocp: OcpFiles,
    #[serde(default)]
    pub mesh: Mesh,
    pub experiment: Experiment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta1: Option<Theta1>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta2: Option<Theta2>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pso: Option<PsoConfig>,
    /// Directory the OCP paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config: Config = serde_json::from_str(&text).map_err(|e| Error::Parse {
            what: format!("config {}", path.display()),
            message: e.to_string(),
        })?;
        config.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.cell.validate()?;
        self.mesh.validate()?;
        self.experiment.validate()?;
        self.resolved_parameters().validate()?;
        if let Some(pso) = &self.pso {
            pso.validate()?;
        }
        Ok(())
    }

    /// Base parameters with `theta1` and then `theta2` applied.
    pub fn resolved_parameters(&self) -> CellParameters {
        let mut p = self.cell.clone();
        if let Some(t1) = &self.theta1 {
            t1.apply(&mut p);
        }
        if let Some(t2) = &self.theta2 {
            t2.apply(&mut p);
        }
        p
    }

    /// Film at the start of a run; `theta2` overrides the experiment value.
    pub fn initial_film(&self) -> InitialFilm {
        let mut film = InitialFilm {
            l_sei: self.experiment.initial_l_sei_m,
            l_li: self.experiment.initial_l_li_m,
        };
        if let Some(t2) = &self.theta2 {
            film.l_sei = t2.l_sei(self.cell.aging.kappa_sei);
        }
        film
    }

    pub fn load_ocp(&self) -> Result<OcpSet> {
        Ok(OcpSet {
            positive: OcpCurve::from_csv(&self.base_dir.join(&self.ocp.positive))?,
            negative: OcpCurve::from_csv(&self.base_dir.join(&self.ocp.negative))?,
        })
    }

    /// Cell with the resolved parameters.
    pub fn build_cell(&self) -> Result<Cell> {
        Cell::new(self.resolved_parameters(), Arc::new(self.load_ocp()?), self.mesh)
    }
}

/// Reads and validates the parameter groups of a config file.
pub fn load_parameters(path: &Path) -> Result<CellParameters> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_parameters(&text)
}

pub fn parse_parameters(text: &str) -> Result<CellParameters> {
    let params: CellParameters = serde_json::from_str(text).map_err(|e| Error::Parse {
        what: "cell parameters".into(),
        message: e.to_string(),
    })?;
    params.validate()?;
    Ok(params)
}

pub fn save_parameters(params: &CellParameters, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(params).map_err(|e| Error::Parse {
        what: "cell parameters".into(),
        message: e.to_string(),
    })?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
