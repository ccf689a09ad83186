//! Sensitivity of an aged cell's discharge to the anode LAM coefficients.
//!
//! Each point ages the cell's active areas over a cycle horizon with the LAM
//! model alone, then runs a constant-current discharge from full charge.
//! The cathode area is held at its pristine value.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aging;
use crate::cell::{Cell, Protocol, SimulationTrace, Termination};
use crate::error::{Error, Result};
use crate::params::CellParameters;
use crate::state::{CellState, InitialFilm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    KprimeN,
    BetaprimeN,
    /// Every combination of a `kprime_n` range and a `betaprime_n` range.
    Grid,
}

impl std::str::FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kprime_n" => Ok(SweepParam::KprimeN),
            "betaprime_n" => Ok(SweepParam::BetaprimeN),
            "both-grid" | "grid" => Ok(SweepParam::Grid),
            other => Err(Error::invariant(
                "param",
                format!("expected kprime_n, betaprime_n or both-grid, got `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Range {
    /// `count >= 2` with `min < max`, or a single point with `min == max`.
    pub fn validate(&self, field: &str) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min >= 0.0) {
            return Err(Error::invariant(field, "bounds must be finite and >= 0"));
        }
        match self.count {
            0 => Err(Error::invariant(field, "count must be >= 1")),
            1 if self.min != self.max => Err(Error::invariant(field, "a single point needs min == max")),
            1 => Ok(()),
            _ if self.min < self.max => Ok(()),
            _ => Err(Error::invariant(field, "min must be < max")),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count)
            .map(|k| if k + 1 == self.count { self.max } else { self.min + step * k as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub param: SweepParam,
    /// Range of the swept coefficient; for a grid, the `kprime_n` range.
    pub range: Range,
    /// `betaprime_n` range of a grid sweep.
    pub second: Option<Range>,
    pub cycles: f64,
    pub t_cycle_s: f64,
    /// Step used to age the areas over the horizon (s).
    pub aging_dt_s: f64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.range.validate("sweep range")?;
        if self.param == SweepParam::Grid {
            self.second
                .as_ref()
                .ok_or_else(|| Error::invariant("sweep", "a grid sweep needs a second range"))?
                .validate("second sweep range")?;
        }
        if !(self.cycles >= 0.0 && self.cycles.is_finite()) {
            return Err(Error::invariant("cycles", "must be >= 0"));
        }
        if !(self.t_cycle_s > 0.0) {
            return Err(Error::invariant("t_cycle_s", "must be > 0"));
        }
        if !(self.aging_dt_s > 0.0) {
            return Err(Error::invariant("aging_dt_s", "must be > 0"));
        }
        Ok(())
    }

    pub fn horizon_s(&self) -> f64 {
        self.cycles * self.t_cycle_s
    }

    /// `(kprime_n, betaprime_n)` of every point, with the coefficient that
    /// is not swept taken from `params`.
    pub fn points(&self, params: &CellParameters) -> Vec<(f64, f64)> {
        match self.param {
            SweepParam::KprimeN => self
                .range
                .values()
                .into_iter()
                .map(|k| (k, params.aging.betaprime_n))
                .collect(),
            SweepParam::BetaprimeN => self
                .range
                .values()
                .into_iter()
                .map(|b| (params.aging.kprime_n, b))
                .collect(),
            SweepParam::Grid => {
                let betas = self.second.map(|r| r.values()).unwrap_or_default();
                self.range
                    .values()
                    .into_iter()
                    .flat_map(|k| betas.iter().map(move |&b| (k, b)))
                    .collect()
            }
        }
    }
}

/// Parameters for horizon aging: cathode fracture and isolation off.
pub fn constant_cathode_area(params: &CellParameters) -> CellParameters {
    let mut p = params.clone();
    p.aging.kprime_p = 0.0;
    p.aging.betaprime_p = 0.0;
    p
}

/// State of `cell` at `soc0` after `horizon_s` of LAM evolution, with the
/// given film. Concentrations are uniform at the stoichiometry of `soc0`.
pub fn aged_state(cell: &Cell, soc0: f64, film: InitialFilm, horizon_s: f64, aging_dt_s: f64) -> Result<CellState> {
    if !(aging_dt_s > 0.0) {
        return Err(Error::invariant("aging_dt_s", "must be > 0"));
    }
    let params = cell.params();
    let mut state = cell.initial_state(soc0, film)?;
    let steps = (horizon_s / aging_dt_s).ceil() as u64;
    for k in 0..steps {
        let t_next = ((k + 1) as f64 * aging_dt_s).min(horizon_s);
        let h = t_next - state.t;
        if h > 0.0 {
            aging::advance_lam(&mut state, params, h)?;
            state.t = t_next;
        }
    }
    let (eps_p, eps_n) = aging::porosity_update(&state, params)?;
    state.eps_p = eps_p;
    state.eps_n = eps_n;
    Ok(state)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub kprime_n: f64,
    pub betaprime_n: f64,
    pub a_t_n_start: f64,
    pub a_t_n_end: f64,
    pub capacity_ah: f64,
    pub final_r_film_ohm: f64,
    pub termination: Termination,
    #[serde(skip)]
    pub trace: Option<SimulationTrace>,
}

/// Ages `cell` with the given anode coefficients and discharges it.
pub fn run_point(
    cell: &Cell,
    soc0: f64,
    film: InitialFilm,
    kprime_n: f64,
    betaprime_n: f64,
    spec: &SweepSpec,
    protocol: &Protocol,
) -> Result<SweepPoint> {
    let mut params = constant_cathode_area(cell.params());
    params.aging.kprime_n = kprime_n;
    params.aging.betaprime_n = betaprime_n;
    let cell = cell.with_params(params)?;
    let state = aged_state(&cell, soc0, film, spec.horizon_s(), spec.aging_dt_s)?;
    let a_t_n_start = state.a_t_n;
    let trace = cell.run_from(state, protocol)?;
    let last = trace.last().output;
    Ok(SweepPoint {
        kprime_n,
        betaprime_n,
        a_t_n_start,
        a_t_n_end: last.a_t_n,
        capacity_ah: trace.end_capacity_ah,
        final_r_film_ohm: last.r_film,
        termination: trace.termination,
        trace: Some(trace),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdicts {
    /// `None` when the sweep never varies `betaprime_n` at fixed `kprime_n`.
    pub capacity_decreasing_in_betaprime_n: Option<bool>,
    pub r_film_increasing_in_betaprime_n: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    /// Sorted by `betaprime_n`, then `kprime_n` (by `kprime_n` first for a
    /// `kprime_n` sweep).
    pub points: Vec<SweepPoint>,
    pub verdicts: Verdicts,
}

/// Runs every point (in parallel on the current rayon pool) and sorts the
/// results deterministically.
pub fn run_sweep(
    cell: &Cell,
    soc0: f64,
    film: InitialFilm,
    spec: &SweepSpec,
    protocol: &Protocol,
) -> Result<SweepResult> {
    spec.validate()?;
    let points = spec.points(cell.params());
    let mut results = points
        .par_iter()
        .map(|&(k, b)| run_point(cell, soc0, film, k, b, spec, protocol))
        .collect::<Result<Vec<_>>>()?;
    match spec.param {
        SweepParam::KprimeN => results.sort_by(|a, b| {
            a.kprime_n.total_cmp(&b.kprime_n).then(a.betaprime_n.total_cmp(&b.betaprime_n))
        }),
        _ => results.sort_by(|a, b| {
            a.betaprime_n.total_cmp(&b.betaprime_n).then(a.kprime_n.total_cmp(&b.kprime_n))
        }),
    }
    let verdicts = monotonicity(&results, spec.param);
    Ok(SweepResult {
        points: results,
        verdicts,
    })
}

fn monotonicity(points: &[SweepPoint], param: SweepParam) -> Verdicts {
    if param == SweepParam::KprimeN || points.len() < 2 {
        return Verdicts {
            capacity_decreasing_in_betaprime_n: None,
            r_film_increasing_in_betaprime_n: None,
        };
    }
    let mut kprimes: Vec<f64> = points.iter().map(|p| p.kprime_n).collect();
    kprimes.sort_by(f64::total_cmp);
    kprimes.dedup();
    let mut capacity = true;
    let mut film = true;
    let mut compared = false;
    for k in kprimes {
        let line: Vec<&SweepPoint> = points.iter().filter(|p| p.kprime_n == k).collect();
        for w in line.windows(2) {
            compared = true;
            capacity &= w[1].capacity_ah < w[0].capacity_ah;
            film &= w[1].final_r_film_ohm > w[0].final_r_film_ohm;
        }
    }
    Verdicts {
        capacity_decreasing_in_betaprime_n: compared.then_some(capacity),
        r_film_increasing_in_betaprime_n: compared.then_some(film),
    }
}
