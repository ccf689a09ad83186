use serde::{Deserialize, Serialize};

use crate::aging;
use crate::config::Mesh;
use crate::error::{Electrode, Error, Result};
use crate::params::CellParameters;

/// Film already present when a run starts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct InitialFilm {
    pub l_sei: f64,
    pub l_li: f64,
}

/// Discretized concentrations plus the aging state of one cell.
///
/// Electrolyte cells are ordered from the anode current collector (index 0)
/// through the separator to the cathode current collector. Solid shells are
/// ordered from the particle centre outwards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellState {
    pub c_s_p: Vec<f64>,
    pub c_s_n: Vec<f64>,
    pub c_e: Vec<f64>,
    /// Cumulative side-reaction products, per unit anode volume (mol/m3).
    pub c_sei: f64,
    pub c_li: f64,
    pub l_sei: f64,
    pub l_li: f64,
    pub l_film: f64,
    pub a_f_p: f64,
    pub a_f_n: f64,
    pub a_ina_p: f64,
    pub a_ina_n: f64,
    pub a_t_p: f64,
    pub a_t_n: f64,
    pub eps_p: f64,
    pub eps_n: f64,
    /// Simulation time (s); also the age that drives fracture growth.
    pub t: f64,
}

impl CellState {
    pub fn solid(&self, e: Electrode) -> &[f64] {
        match e {
            Electrode::Positive => &self.c_s_p,
            Electrode::Negative => &self.c_s_n,
        }
    }

    pub fn total_area(&self, e: Electrode) -> f64 {
        match e {
            Electrode::Positive => self.a_t_p,
            Electrode::Negative => self.a_t_n,
        }
    }

    pub fn fracture_area(&self, e: Electrode) -> f64 {
        match e {
            Electrode::Positive => self.a_f_p,
            Electrode::Negative => self.a_f_n,
        }
    }

    pub fn inactive_area(&self, e: Electrode) -> f64 {
        match e {
            Electrode::Positive => self.a_ina_p,
            Electrode::Negative => self.a_ina_n,
        }
    }

    pub fn porosity(&self, e: Electrode) -> f64 {
        match e {
            Electrode::Positive => self.eps_p,
            Electrode::Negative => self.eps_n,
        }
    }

    /// Replaces the film thicknesses and refreshes the anode porosity.
    pub fn with_film(mut self, film: InitialFilm, params: &CellParameters) -> Result<Self> {
        if !(film.l_sei >= 0.0 && film.l_li >= 0.0) {
            return Err(Error::invariant("film", "thicknesses must be >= 0"));
        }
        self.l_sei = film.l_sei;
        self.l_li = film.l_li;
        self.l_film = film.l_sei + film.l_li;
        let (eps_p, eps_n) = aging::porosity_update(&self, params)?;
        self.eps_p = eps_p;
        self.eps_n = eps_n;
        Ok(self)
    }
}

/// Uniform state at `soc0`: each electrode sits at the stoichiometry the
/// linear SOC map assigns to `soc0`, the electrolyte is at its nominal
/// concentration, and no aging has occurred.
pub fn initial_state(params: &CellParameters, mesh: &Mesh, soc0: f64) -> Result<CellState> {
    if !(0.0..=1.0).contains(&soc0) {
        return Err(Error::invariant("soc0", format!("must lie in [0, 1], got {soc0}")));
    }
    mesh.validate()?;
    let theta = |e: Electrode| {
        let (theta_0, theta_100) = params.stoichiometry_window(e);
        theta_0 + soc0 * (theta_100 - theta_0)
    };
    let theta_p = theta(Electrode::Positive);
    let theta_n = theta(Electrode::Negative);
    let n_x = mesh.n_x_n + mesh.n_x_s + mesh.n_x_p;
    let mut state = CellState {
        c_s_p: vec![theta_p * params.composition.c_s_max_p; mesh.n_r_p],
        c_s_n: vec![theta_n * params.composition.c_s_max_n; mesh.n_r_n],
        c_e: vec![params.electrolyte.nominal_concentration; n_x],
        c_sei: 0.0,
        c_li: 0.0,
        l_sei: 0.0,
        l_li: 0.0,
        l_film: 0.0,
        a_f_p: 0.0,
        a_f_n: 0.0,
        a_ina_p: 0.0,
        a_ina_n: 0.0,
        a_t_p: params.specific_area(Electrode::Positive),
        a_t_n: params.specific_area(Electrode::Negative),
        eps_p: 0.0,
        eps_n: 0.0,
        t: 0.0,
    };
    let (eps_p, eps_n) = aging::porosity_update(&state, params)?;
    state.eps_p = eps_p;
    state.eps_n = eps_n;
    Ok(state)
}
