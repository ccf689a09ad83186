//! Finite-volume semi-discretization of the electrolyte and solid-phase
//! transport equations.
//!
//! Both directions use cell-centred control volumes with harmonic-mean face
//! coefficients, so the discrete operators conserve lithium exactly: every
//! interior face flux leaves one cell and enters its neighbour.

mod electrolyte;
mod solid;

pub use electrolyte::{
    effective_coefficients, electrolyte_mass_rhs, solve_electrolyte_potential, total_electrolyte_lithium,
    EffectiveCoefficients, ElectrolyteGrid, ElectrolyteSolution, Region,
};
pub(crate) use electrolyte::implicit_mass_step;
pub use solid::{anode_surface_flux, cathode_surface_flux, solid_diffusion_rhs, surface_concentration, ShellGrid};

use crate::error::Electrode;
use crate::params::CellParameters;

/// Volumetric lithium-ion sources in the electrolyte (mol/(m3 s)).
///
/// Positive current is discharge: the anode releases ions and the cathode
/// takes them up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoreWallFluxes {
    pub j_p: f64,
    pub j_s: f64,
    pub j_n: f64,
}

impl PoreWallFluxes {
    pub fn in_region(&self, region: Region) -> f64 {
        match region {
            Region::Negative => self.j_n,
            Region::Separator => self.j_s,
            Region::Positive => self.j_p,
        }
    }
}

pub fn pore_wall_fluxes(current: f64, params: &CellParameters) -> PoreWallFluxes {
    let g = &params.geometry;
    let f = params.constants.faraday;
    PoreWallFluxes {
        j_p: -current / (g.a_cell * f * g.l_p),
        j_s: 0.0,
        j_n: current / (g.a_cell * f * g.l_n),
    }
}

/// Solid diffusivity at temperature `temperature`, Arrhenius in
/// `1/T - 1/T_ref` so that the reference value is recovered at `T_ref`.
pub fn arrhenius_diffusivity(temperature: f64, params: &CellParameters, electrode: Electrode) -> f64 {
    let t = &params.transport;
    let (d_ref, e_a) = match electrode {
        Electrode::Positive => (t.d_s_ref_p, t.e_a_ds_p),
        Electrode::Negative => (t.d_s_ref_n, t.e_a_ds_n),
    };
    d_ref
        * crate::params::arrhenius_factor(e_a, params.constants.r_gas, temperature, params.environment.t_ref)
}
