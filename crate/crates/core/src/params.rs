//! Physical constants of the cell.
//!
//! Parameters are grouped the same way as the JSON config sections. Every
//! group deserializes strictly: a missing field is a parse error that names
//! the field, and [`CellParameters::validate`] reports the first violated
//! physical constraint with its dotted path (e.g. `transport.t_plus`).

use serde::{Deserialize, Serialize};

use crate::error::{Electrode, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    /// Cell cross-sectional area (m2).
    pub a_cell: f64,
    /// Region thicknesses (m).
    pub l_p: f64,
    pub l_s: f64,
    pub l_n: f64,
    /// Particle radii (m).
    pub r_p: f64,
    pub r_n: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transport {
    pub t_plus: f64,
    pub brugg: f64,
    /// Solid diffusivities at `t_ref` (m2/s).
    pub d_s_ref_p: f64,
    pub d_s_ref_n: f64,
    /// Activation energies of the solid diffusivities (J/mol).
    pub e_a_ds_p: f64,
    pub e_a_ds_n: f64,
}

/// `f(c, T) = (sum_k coefficients[k] * c^k) * exp(-E_a/R (1/T - 1/T_ref))`
/// with `c` in mol/m3.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrheniusPolynomial {
    pub coefficients: Vec<f64>,
    pub activation_energy: f64,
}

impl ArrheniusPolynomial {
    pub fn eval(&self, c: f64, temperature: f64, t_ref: f64, r_gas: f64) -> f64 {
        self.polynomial(c) * arrhenius_factor(self.activation_energy, r_gas, temperature, t_ref)
    }

    /// Concentration part only.
    pub fn polynomial(&self, c: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, &k| acc * c + k)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Electrolyte {
    /// Bulk diffusivity D(c, T) (m2/s).
    pub diffusivity: ArrheniusPolynomial,
    /// Bulk conductivity kappa(c, T) (S/m).
    pub conductivity: ArrheniusPolynomial,
    /// Initial, uniform salt concentration (mol/m3).
    #[serde(default = "default_nominal_concentration")]
    pub nominal_concentration: f64,
    /// Separator porosity (constant; aging only touches the electrodes).
    pub separator_porosity: f64,
}

fn default_nominal_concentration() -> f64 {
    1000.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Kinetics {
    /// Intercalation rate constants (m^2.5 / (mol^0.5 s)).
    pub k_p: f64,
    pub k_n: f64,
    #[serde(default)]
    pub e_a_k_p: f64,
    #[serde(default)]
    pub e_a_k_n: f64,
    /// Transfer coefficient of the side reactions.
    pub alpha: f64,
    /// Plating exchange current density (A/m2); zero disables plating.
    pub i0_pl: f64,
    /// SEI kinetic constant (m/s); zero disables SEI growth.
    pub k_f: f64,
    #[serde(default)]
    pub e_a_kf: f64,
    /// Solvent concentration at the SEI surface (mol/m3).
    pub c_solv_surf: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Composition {
    pub v_p: f64,
    pub v_n: f64,
    pub v_p_filler: f64,
    pub v_n_filler: f64,
    /// Maximum solid concentrations (mol/m3).
    pub c_s_max_p: f64,
    pub c_s_max_n: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stoichiometry {
    pub theta_p_0: f64,
    pub theta_p_100: f64,
    pub theta_n_0: f64,
    pub theta_n_100: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aging {
    /// Fraction of plated lithium converted into SEI.
    pub beta: f64,
    /// Fracture coefficients (1/s).
    pub kprime_p: f64,
    pub kprime_n: f64,
    /// Inactive-area coefficients (1/s).
    pub betaprime_p: f64,
    pub betaprime_n: f64,
    pub m_sei: f64,
    pub m_li: f64,
    pub rho_sei: f64,
    pub rho_li: f64,
    /// SEI ionic conductivity (S/m).
    pub kappa_sei: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Resistances {
    /// Lumped contact resistance (ohm).
    pub r_l: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub temperature: f64,
    pub t_ref: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub faraday: f64,
    pub r_gas: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Self {
            faraday: 96485.33212,
            r_gas: 8.314462618,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellParameters {
    pub geometry: Geometry,
    pub transport: Transport,
    pub electrolyte: Electrolyte,
    pub kinetics: Kinetics,
    pub composition: Composition,
    pub stoichiometry: Stoichiometry,
    pub aging: Aging,
    pub resistances: Resistances,
    pub environment: Environment,
    #[serde(default)]
    pub constants: Constants,
}

pub fn arrhenius_factor(activation_energy: f64, r_gas: f64, temperature: f64, t_ref: f64) -> f64 {
    (-activation_energy / r_gas * (1.0 / temperature - 1.0 / t_ref)).exp()
}

impl CellParameters {
    pub fn thickness(&self, e: Electrode) -> f64 {
        match e {
            Electrode::Positive => self.geometry.l_p,
            Electrode::Negative => self.geometry.l_n,
        }
    }

    pub fn radius(&self, e: Electrode) -> f64 {
        match e {
            Electrode::Positive => self.geometry.r_p,
            Electrode::Negative => self.geometry.r_n,
        }
    }

    pub fn c_s_max(&self, e: Electrode) -> f64 {
        match e {
            Electrode::Positive => self.composition.c_s_max_p,
            Electrode::Negative => self.composition.c_s_max_n,
        }
    }

    /// Pristine specific surface area `3 / R_i`.
    pub fn specific_area(&self, e: Electrode) -> f64 {
        3.0 / self.radius(e)
    }

    /// `1 - v_i - v_i,filler`.
    pub fn initial_porosity(&self, e: Electrode) -> f64 {
        let c = &self.composition;
        match e {
            Electrode::Positive => 1.0 - c.v_p - c.v_p_filler,
            Electrode::Negative => 1.0 - c.v_n - c.v_n_filler,
        }
    }

    /// Stoichiometry at 0 % and 100 % state of charge.
    pub fn stoichiometry_window(&self, e: Electrode) -> (f64, f64) {
        let s = &self.stoichiometry;
        match e {
            Electrode::Positive => (s.theta_p_0, s.theta_p_100),
            Electrode::Negative => (s.theta_n_0, s.theta_n_100),
        }
    }

    pub fn kprime(&self, e: Electrode) -> f64 {
        match e {
            Electrode::Positive => self.aging.kprime_p,
            Electrode::Negative => self.aging.kprime_n,
        }
    }

    pub fn betaprime(&self, e: Electrode) -> f64 {
        match e {
            Electrode::Positive => self.aging.betaprime_p,
            Electrode::Negative => self.aging.betaprime_n,
        }
    }

    /// Intercalation rate constant at the cell temperature.
    pub fn reaction_rate(&self, e: Electrode) -> f64 {
        let k = &self.kinetics;
        let (k_ref, e_a) = match e {
            Electrode::Positive => (k.k_p, k.e_a_k_p),
            Electrode::Negative => (k.k_n, k.e_a_k_n),
        };
        k_ref * self.arrhenius(e_a)
    }

    /// SEI kinetic constant at the cell temperature.
    pub fn sei_rate_constant(&self) -> f64 {
        self.kinetics.k_f * self.arrhenius(self.kinetics.e_a_kf)
    }

    pub fn arrhenius(&self, activation_energy: f64) -> f64 {
        arrhenius_factor(
            activation_energy,
            self.constants.r_gas,
            self.environment.temperature,
            self.environment.t_ref,
        )
    }

    /// `R T / F` at the cell temperature (V).
    pub fn thermal_voltage(&self) -> f64 {
        self.constants.r_gas * self.environment.temperature / self.constants.faraday
    }

    /// Bulk electrolyte diffusivity at concentration `c`.
    pub fn electrolyte_diffusivity(&self, c: f64) -> f64 {
        self.electrolyte.diffusivity.eval(
            c,
            self.environment.temperature,
            self.environment.t_ref,
            self.constants.r_gas,
        )
    }

    /// Bulk electrolyte conductivity at concentration `c`.
    pub fn electrolyte_conductivity(&self, c: f64) -> f64 {
        self.electrolyte.conductivity.eval(
            c,
            self.environment.temperature,
            self.environment.t_ref,
            self.constants.r_gas,
        )
    }

    /// Charge stored between the 0 % and 100 % stoichiometries of one
    /// electrode (Ah), with the pristine active area.
    pub fn window_capacity_ah(&self, e: Electrode) -> f64 {
        let (theta_0, theta_100) = self.stoichiometry_window(e);
        self.geometry.a_cell
            * self.thickness(e)
            * self.c_s_max(e)
            * (theta_100 - theta_0).abs()
            * self.constants.faraday
            / 3600.0
    }

    pub fn validate(&self) -> Result<()> {
        let positive: [(&str, f64); 24] = [
            ("geometry.a_cell", self.geometry.a_cell),
            ("geometry.l_p", self.geometry.l_p),
            ("geometry.l_s", self.geometry.l_s),
            ("geometry.l_n", self.geometry.l_n),
            ("geometry.r_p", self.geometry.r_p),
            ("geometry.r_n", self.geometry.r_n),
            ("transport.brugg", self.transport.brugg),
            ("transport.d_s_ref_p", self.transport.d_s_ref_p),
            ("transport.d_s_ref_n", self.transport.d_s_ref_n),
            ("kinetics.k_p", self.kinetics.k_p),
            ("kinetics.k_n", self.kinetics.k_n),
            ("kinetics.c_solv_surf", self.kinetics.c_solv_surf),
            ("composition.c_s_max_p", self.composition.c_s_max_p),
            ("composition.c_s_max_n", self.composition.c_s_max_n),
            ("aging.m_sei", self.aging.m_sei),
            ("aging.m_li", self.aging.m_li),
            ("aging.rho_sei", self.aging.rho_sei),
            ("aging.rho_li", self.aging.rho_li),
            ("aging.kappa_sei", self.aging.kappa_sei),
            ("electrolyte.nominal_concentration", self.electrolyte.nominal_concentration),
            ("environment.temperature", self.environment.temperature),
            ("environment.t_ref", self.environment.t_ref),
            ("constants.faraday", self.constants.faraday),
            ("constants.r_gas", self.constants.r_gas),
        ];
        for (field, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::invariant(field, format!("must be finite and > 0, got {value}")));
            }
        }

        let non_negative: [(&str, f64); 11] = [
            ("transport.e_a_ds_p", self.transport.e_a_ds_p),
            ("transport.e_a_ds_n", self.transport.e_a_ds_n),
            ("kinetics.i0_pl", self.kinetics.i0_pl),
            ("kinetics.k_f", self.kinetics.k_f),
            ("composition.v_p", self.composition.v_p),
            ("composition.v_n", self.composition.v_n),
            ("composition.v_p_filler", self.composition.v_p_filler),
            ("composition.v_n_filler", self.composition.v_n_filler),
            ("aging.kprime_p", self.aging.kprime_p),
            ("aging.kprime_n", self.aging.kprime_n),
            ("aging.betaprime_p", self.aging.betaprime_p),
        ];
        for (field, value) in non_negative {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::invariant(field, format!("must be finite and >= 0, got {value}")));
            }
        }
        let b = self.aging.betaprime_n;
        if !(b.is_finite() && b >= 0.0) {
            return Err(Error::invariant("aging.betaprime_n", format!("must be finite and >= 0, got {b}")));
        }

        open_unit("transport.t_plus", self.transport.t_plus)?;
        open_unit("kinetics.alpha", self.kinetics.alpha)?;
        open_unit("electrolyte.separator_porosity", self.electrolyte.separator_porosity)?;
        if !(0.0..=1.0).contains(&self.aging.beta) {
            return Err(Error::invariant("aging.beta", format!("must lie in [0, 1], got {}", self.aging.beta)));
        }

        let s = &self.stoichiometry;
        if !(0.0 <= s.theta_n_0 && s.theta_n_0 < s.theta_n_100 && s.theta_n_100 <= 1.0) {
            return Err(Error::invariant(
                "stoichiometry.theta_n_100",
                format!(
                    "anode needs 0 <= theta_n_0 < theta_n_100 <= 1, got {} and {}",
                    s.theta_n_0, s.theta_n_100
                ),
            ));
        }
        if !(0.0 <= s.theta_p_100 && s.theta_p_100 < s.theta_p_0 && s.theta_p_0 <= 1.0) {
            return Err(Error::invariant(
                "stoichiometry.theta_p_0",
                format!(
                    "cathode needs 0 <= theta_p_100 < theta_p_0 <= 1, got {} and {}",
                    s.theta_p_100, s.theta_p_0
                ),
            ));
        }

        for (field, e) in [
            ("composition.v_p", Electrode::Positive),
            ("composition.v_n", Electrode::Negative),
        ] {
            let eps = self.initial_porosity(e);
            if !(eps > 0.0 && eps < 1.0) {
                return Err(Error::invariant(
                    field,
                    format!("active plus filler fraction leaves initial porosity {eps}, need (0, 1)"),
                ));
            }
        }

        if self.electrolyte.diffusivity.coefficients.is_empty() {
            return Err(Error::invariant("electrolyte.diffusivity.coefficients", "must not be empty"));
        }
        if self.electrolyte.conductivity.coefficients.is_empty() {
            return Err(Error::invariant("electrolyte.conductivity.coefficients", "must not be empty"));
        }
        let c0 = self.electrolyte.nominal_concentration;
        if !(self.electrolyte_diffusivity(c0) > 0.0) {
            return Err(Error::invariant(
                "electrolyte.diffusivity",
                format!("must be positive at the nominal concentration {c0}"),
            ));
        }
        if !(self.electrolyte_conductivity(c0) > 0.0) {
            return Err(Error::invariant(
                "electrolyte.conductivity",
                format!("must be positive at the nominal concentration {c0}"),
            ));
        }
        if self.resistances.r_l < 0.0 || !self.resistances.r_l.is_finite() {
            return Err(Error::invariant("resistances.r_l", "must be finite and >= 0"));
        }
        Ok(())
    }
}

fn open_unit(field: &str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::invariant(field, format!("must lie in (0, 1), got {value}")))
    }
}
