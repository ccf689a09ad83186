//! Side reactions on the anode (SEI growth, lithium plating), loss of active
//! material in both electrodes, and the porosity changes they cause.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Electrode, Error, Result};
use crate::params::CellParameters;
use crate::state::CellState;

/// `exp(-alpha F / RT (phi_s - phi_e - R_film I))`, the factor shared by
/// both side currents.
pub fn side_reaction_driving_factor(
    phi_s_n: f64,
    phi_e_n: f64,
    r_film: f64,
    current: f64,
    params: &CellParameters,
) -> f64 {
    let overpotential = phi_s_n - phi_e_n - r_film * current;
    (-params.kinetics.alpha / params.thermal_voltage() * overpotential).exp()
}

/// SEI current density per unit anode volume (A/m3, never positive).
pub fn sei_current_density(
    state: &CellState,
    phi_s_n: f64,
    phi_e_n: f64,
    r_film: f64,
    current: f64,
    params: &CellParameters,
) -> f64 {
    let k_f = params.sei_rate_constant();
    if k_f == 0.0 {
        return 0.0;
    }
    let drive = side_reaction_driving_factor(phi_s_n, phi_e_n, r_film, current, params);
    -params.constants.faraday * state.a_t_n * k_f * params.kinetics.c_solv_surf * drive
}

/// Plating current density per unit anode volume (A/m3, never positive).
pub fn plating_current_density(
    state: &CellState,
    phi_s_n: f64,
    phi_e_n: f64,
    r_film: f64,
    current: f64,
    params: &CellParameters,
) -> f64 {
    let i0_pl = params.kinetics.i0_pl;
    if i0_pl == 0.0 {
        return 0.0;
    }
    let drive = side_reaction_driving_factor(phi_s_n, phi_e_n, r_film, current, params);
    -2.0 * state.a_t_n * i0_pl * drive
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SideReactionRates {
    pub j_sei: f64,
    pub j_pl: f64,
    pub dc_sei_dt: f64,
    pub dc_li_dt: f64,
    pub dl_sei_dt: f64,
    pub dl_li_dt: f64,
}

impl SideReactionRates {
    pub fn dl_film_dt(&self) -> f64 {
        self.dl_sei_dt + self.dl_li_dt
    }
}

pub fn species_and_film_rates(j_sei: f64, j_pl: f64, state: &CellState, params: &CellParameters) -> SideReactionRates {
    let two_f = 2.0 * params.constants.faraday;
    let beta = params.aging.beta;
    let dc_sei_dt = -(j_sei / two_f + j_pl / two_f * beta);
    let dc_li_dt = -j_pl / two_f * (1.0 - beta);
    let a = &params.aging;
    SideReactionRates {
        j_sei,
        j_pl,
        dc_sei_dt,
        dc_li_dt,
        dl_sei_dt: dc_sei_dt * a.m_sei / a.rho_sei / state.a_t_n,
        dl_li_dt: dc_li_dt * a.m_li / a.rho_li / state.a_t_n,
    }
}

/// Ohmic resistance of the SEI layer (ohm).
pub fn film_resistance(l_sei: f64, a_t_n: f64, params: &CellParameters) -> f64 {
    l_sei / (a_t_n * params.geometry.a_cell * params.geometry.l_n * params.aging.kappa_sei)
}

/// Fracture area and isolation rate of one electrode at age `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LamRate {
    pub fracture_area: f64,
    pub inactive_rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LamRates {
    pub positive: LamRate,
    pub negative: LamRate,
}

pub fn fracture_area(params: &CellParameters, electrode: Electrode, t: f64) -> f64 {
    params.specific_area(electrode) * params.kprime(electrode) * t
}

pub fn lam_rates(state: &CellState, params: &CellParameters, t: f64) -> LamRates {
    let rate = |e: Electrode| {
        let a_f = fracture_area(params, e, t);
        LamRate {
            fracture_area: a_f,
            inactive_rate: params.betaprime(e)
                * (params.specific_area(e) + a_f - state.inactive_area(e)),
        }
    };
    LamRates {
        positive: rate(Electrode::Positive),
        negative: rate(Electrode::Negative),
    }
}

/// Explicit Euler update of the inactive areas from `state.t` to
/// `state.t + dt`, refreshing fracture and total areas at the new time.
/// `state.t` itself is left unchanged.
pub fn advance_lam(state: &mut CellState, params: &CellParameters, dt: f64) -> Result<()> {
    let rates = lam_rates(state, params, state.t);
    let t_new = state.t + dt;
    state.a_ina_p += dt * rates.positive.inactive_rate;
    state.a_ina_n += dt * rates.negative.inactive_rate;
    state.a_f_p = fracture_area(params, Electrode::Positive, t_new);
    state.a_f_n = fracture_area(params, Electrode::Negative, t_new);
    state.a_t_p = total_area(state, params, Electrode::Positive)?;
    state.a_t_n = total_area(state, params, Electrode::Negative)?;
    Ok(())
}

/// `a + a_f - a_ina`, which must stay positive.
pub fn total_area(state: &CellState, params: &CellParameters, electrode: Electrode) -> Result<f64> {
    let a_t = params.specific_area(electrode) + state.fracture_area(electrode) - state.inactive_area(electrode);
    if a_t > 0.0 && a_t.is_finite() {
        Ok(a_t)
    } else {
        Err(Error::ActiveArea { electrode, value: a_t })
    }
}

/// Closed-form total area of the linear LAM model at age `t`.
pub fn total_area_closed_form(params: &CellParameters, electrode: Electrode, t: f64) -> f64 {
    let a = params.specific_area(electrode);
    let k = params.kprime(electrode);
    let b = params.betaprime(electrode);
    if b == 0.0 {
        return a * (1.0 + k * t);
    }
    let ratio = k / b;
    a * (ratio + (1.0 - ratio) * (-b * t).exp())
}

/// Long-time behaviour of the active area, from the sign and size of
/// `1 - k'/beta'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LamRegime {
    /// Fracture and isolation balance; the area stays near its initial value.
    Balanced,
    /// Fracture outpaces isolation; the area grows.
    FractureDominated,
    /// Isolation outpaces fracture; the area shrinks.
    IsolationDominated,
    /// Outside all three bands.
    Unclassified,
}

impl LamRegime {
    pub fn case_label(self) -> &'static str {
        match self {
            LamRegime::Balanced => "i",
            LamRegime::FractureDominated => "ii",
            LamRegime::IsolationDominated => "iii",
            LamRegime::Unclassified => "unclassified",
        }
    }
}

impl fmt::Display for LamRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.case_label())
    }
}

pub const DEFAULT_REGIME_TOLERANCE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LamClassification {
    pub regime: LamRegime,
    /// `1 - k'/beta'`.
    pub margin: f64,
}

pub fn classify_lam_regime(kprime: f64, betaprime: f64, tolerance: f64) -> Result<LamClassification> {
    if betaprime == 0.0 || !betaprime.is_finite() {
        return Err(Error::UndefinedRegime(betaprime));
    }
    let margin = 1.0 - kprime / betaprime;
    let regime = if margin.abs() <= tolerance {
        LamRegime::Balanced
    } else if margin < -1.0 {
        LamRegime::FractureDominated
    } else if margin > 0.0 && margin < 1.0 {
        LamRegime::IsolationDominated
    } else {
        LamRegime::Unclassified
    };
    Ok(LamClassification { regime, margin })
}

/// Porosities implied by the current LAM areas and film thickness.
pub fn porosity_update(state: &CellState, params: &CellParameters) -> Result<(f64, f64)> {
    let g = &params.geometry;
    let eps_p = params.initial_porosity(Electrode::Positive) + (state.a_ina_p - state.a_f_p) * g.r_p / 3.0;
    let eps_n = params.initial_porosity(Electrode::Negative) + (state.a_ina_n - state.a_f_n) * g.r_n / 3.0
        - params.composition.v_n * 3.0 * state.l_film / g.r_n;
    for (electrode, value) in [(Electrode::Positive, eps_p), (Electrode::Negative, eps_n)] {
        if !(value > 0.0 && value < 1.0) {
            return Err(Error::Porosity { electrode, value });
        }
    }
    Ok((eps_p, eps_n))
}

/// Converts per-cycle LAM coefficients to per-second ones.
pub fn cycle_to_time_coefficients(k_cycle: f64, beta_cycle: f64, t_cycle: f64) -> Result<(f64, f64)> {
    if !(t_cycle > 0.0) {
        return Err(Error::invariant("t_cycle", "must be > 0"));
    }
    Ok((k_cycle / t_cycle, beta_cycle / t_cycle))
}
