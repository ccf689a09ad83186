//! The identified parameter vectors, their search boxes and the two-phase
//! (fresh, then aged) procedure.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::dataset::CycleLabel;
use crate::error::{Error, Result};
use crate::params::CellParameters;
use crate::state::InitialFilm;

/// A parameter the identification may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Param {
    ACell,
    RL,
    VN,
    RP,
    RN,
    DsRefP,
    DsRefN,
    ThetaP100,
    ThetaN100,
    /// Film thickness over film conductivity (ohm m2); sets the initial SEI
    /// thickness through the configured film conductivity.
    LSeiOverKappaSei,
    ThetaP0,
}

impl Param {
    pub fn name(self) -> &'static str {
        match self {
            Param::ACell => "a_cell",
            Param::RL => "r_l",
            Param::VN => "v_n",
            Param::RP => "r_p",
            Param::RN => "r_n",
            Param::DsRefP => "d_s_ref_p",
            Param::DsRefN => "d_s_ref_n",
            Param::ThetaP100 => "theta_p_100",
            Param::ThetaN100 => "theta_n_100",
            Param::LSeiOverKappaSei => "l_sei_over_kappa_sei",
            Param::ThetaP0 => "theta_p_0",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Param::ACell => "m2",
            Param::RL => "ohm",
            Param::RP | Param::RN => "m",
            Param::DsRefP | Param::DsRefN => "m2/s",
            Param::LSeiOverKappaSei => "ohm m2",
            Param::VN | Param::ThetaP100 | Param::ThetaN100 | Param::ThetaP0 => "-",
        }
    }

    /// Writes `value` into the parameter set or the starting film.
    pub fn apply(self, value: f64, params: &mut CellParameters, film: &mut InitialFilm) {
        match self {
            Param::ACell => params.geometry.a_cell = value,
            Param::RL => params.resistances.r_l = value,
            Param::VN => params.composition.v_n = value,
            Param::RP => params.geometry.r_p = value,
            Param::RN => params.geometry.r_n = value,
            Param::DsRefP => params.transport.d_s_ref_p = value,
            Param::DsRefN => params.transport.d_s_ref_n = value,
            Param::ThetaP100 => params.stoichiometry.theta_p_100 = value,
            Param::ThetaN100 => params.stoichiometry.theta_n_100 = value,
            Param::LSeiOverKappaSei => film.l_sei = value * params.aging.kappa_sei,
            Param::ThetaP0 => params.stoichiometry.theta_p_0 = value,
        }
    }

    /// Current value in a parameter set and film.
    pub fn read(self, params: &CellParameters, film: &InitialFilm) -> f64 {
        match self {
            Param::ACell => params.geometry.a_cell,
            Param::RL => params.resistances.r_l,
            Param::VN => params.composition.v_n,
            Param::RP => params.geometry.r_p,
            Param::RN => params.geometry.r_n,
            Param::DsRefP => params.transport.d_s_ref_p,
            Param::DsRefN => params.transport.d_s_ref_n,
            Param::ThetaP100 => params.stoichiometry.theta_p_100,
            Param::ThetaN100 => params.stoichiometry.theta_n_100,
            Param::LSeiOverKappaSei => film.l_sei / params.aging.kappa_sei,
            Param::ThetaP0 => params.stoichiometry.theta_p_0,
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParameterEntry {
    pub param: Param,
    pub lower: f64,
    pub upper: f64,
    pub guess: f64,
    pub value: f64,
}

/// Named entries with bounds; `value` starts at the guess.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterVector {
    entries: Vec<ParameterEntry>,
}

impl ParameterVector {
    /// Entries as `(param, lower, upper, guess)`; requires `lower <= guess <= upper`.
    pub fn new(entries: &[(Param, f64, f64, f64)]) -> Result<Self> {
        let entries = entries
            .iter()
            .map(|&(param, lower, upper, guess)| {
                if !(lower <= guess && guess <= upper) {
                    return Err(Error::invariant(
                        param.name(),
                        format!("guess {guess} outside [{lower}, {upper}]"),
                    ));
                }
                Ok(ParameterEntry {
                    param,
                    lower,
                    upper,
                    guess,
                    value: guess,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[ParameterEntry] {
        &self.entries
    }

    pub fn lower(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.lower).collect()
    }

    pub fn upper(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.upper).collect()
    }

    pub fn guesses(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.guess).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.value).collect()
    }

    pub fn set_values(&mut self, values: &[f64]) {
        for (e, &v) in self.entries.iter_mut().zip(values) {
            e.value = v;
        }
    }

    pub fn apply(&self, values: &[f64], params: &mut CellParameters, film: &mut InitialFilm) {
        for (e, &v) in self.entries.iter().zip(values) {
            e.param.apply(v, params, film);
        }
    }
}

/// A row of the published identification tables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRow {
    pub param: Param,
    pub lower: f64,
    pub upper: f64,
    /// Guess as published, before projection into the bounds.
    pub guess: f64,
    pub identified: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceTable {
    pub rows: Vec<ReferenceRow>,
    pub cost: f64,
}

const fn row(param: Param, lower: f64, upper: f64, guess: f64, identified: f64) -> ReferenceRow {
    ReferenceRow {
        param,
        lower,
        upper,
        guess,
        identified,
    }
}

/// Published bounds, guesses, identified values and final cost for a phase.
pub fn reference_table(label: CycleLabel) -> ReferenceTable {
    match label {
        CycleLabel::Fresh => ReferenceTable {
            rows: vec![
                row(Param::ACell, 0.28, 0.83, 0.55, 0.57),
                row(Param::RL, 0.02, 0.07, 0.045, 0.04),
                row(Param::VN, 0.45, 0.65, 0.5, 0.54),
                row(Param::RP, 0.6e-6, 1.9e-6, 1.25e-6, 1e-6),
                row(Param::RN, 5e-6, 15e-6, 10e-6, 5.16e-6),
                row(Param::DsRefP, 1e-14, 3.4e-13, 2.25e-13, 2e-13),
                row(Param::DsRefN, 1e-14, 3.4e-13, 2.25e-13, 1e-13),
                row(Param::ThetaP100, 0.14, 0.41, 0.28, 0.30),
                row(Param::ThetaN100, 0.43, 1.0, 0.85, 0.99),
            ],
            cost: 0.03,
        },
        CycleLabel::Aged1000 => ReferenceTable {
            rows: vec![
                row(Param::LSeiOverKappaSei, 0.0015, 0.15, 0.076, 0.085),
                row(Param::ThetaP0, 0.7, 1.0, 0.85, 0.92),
                row(Param::ThetaN100, 0.7, 1.0, 0.85, 0.88),
            ],
            cost: 0.03,
        },
        CycleLabel::Aged3300 => ReferenceTable {
            rows: vec![
                row(Param::LSeiOverKappaSei, 0.003, 0.3, 2.0, 0.25),
                row(Param::ThetaP0, 0.6, 1.0, 0.8, 0.79),
                row(Param::ThetaN100, 0.6, 1.0, 0.8, 0.72),
            ],
            cost: 0.04,
        },
    }
}

/// Search vector for a phase; published guesses outside their bounds are
/// projected onto the nearest bound.
pub fn search_vector(label: CycleLabel) -> ParameterVector {
    let rows: Vec<(Param, f64, f64, f64)> = reference_table(label)
        .rows
        .iter()
        .map(|r| {
            let guess = r.guess.clamp(r.lower, r.upper);
            if guess != r.guess {
                log::info!(
                    "{}: published guess {} outside [{}, {}], using {}",
                    r.param,
                    r.guess,
                    r.lower,
                    r.upper,
                    guess
                );
            }
            (r.param, r.lower, r.upper, guess)
        })
        .collect();
    ParameterVector::new(&rows).expect("projected guesses lie inside their bounds")
}

/// Switches the degradation paths each phase assumes.
///
/// Fresh cells run with every side reaction and LAM off; at 1000 cycles
/// plating is off; at 3300 cycles plating must be active.
pub fn phase_parameters(label: CycleLabel, params: &CellParameters) -> Result<CellParameters> {
    let mut p = params.clone();
    match label {
        CycleLabel::Fresh => {
            p.kinetics.k_f = 0.0;
            p.kinetics.i0_pl = 0.0;
            p.aging.kprime_p = 0.0;
            p.aging.kprime_n = 0.0;
            p.aging.betaprime_p = 0.0;
            p.aging.betaprime_n = 0.0;
        }
        CycleLabel::Aged1000 => p.kinetics.i0_pl = 0.0,
        CycleLabel::Aged3300 => {
            if !(p.kinetics.i0_pl > 0.0) {
                return Err(Error::invariant(
                    "kinetics.i0_pl",
                    "must be > 0 for the aged3300 phase (plating is active)",
                ));
            }
        }
    }
    Ok(p)
}
