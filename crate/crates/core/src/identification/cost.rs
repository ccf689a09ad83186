use serde::{Deserialize, Serialize};

use super::dataset::{soc_exp_from_coulomb_counting, CycleLabel, ExperimentalDataset};
use super::protocol::{phase_parameters, search_vector, ParameterVector};
use super::pso::{pso_minimize, PsoConfig, PsoResult, SearchProblem};
use crate::cell::{Cell, DtPolicy, Protocol, Termination, TraceSample};
use crate::error::{Error, Result};
use crate::params::CellParameters;
use crate::state::InitialFilm;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostWeights {
    pub voltage: f64,
    pub soc_n: f64,
    pub soc_p: f64,
}

impl Default for CostWeights {
    fn default() -> Self {
        Self {
            voltage: 1.0,
            soc_n: 1.0,
            soc_p: 1.0,
        }
    }
}

/// Cost of an evaluation that could not be completed is at least this.
pub const PENALTY_BASE: f64 = 1e3;

/// `PENALTY_BASE * (1 + shortfall)`, where the shortfall is the fraction of
/// the data horizon the simulation failed to cover.
pub fn penalty(fraction_completed: f64) -> f64 {
    let done = if fraction_completed.is_finite() {
        fraction_completed.clamp(0.0, 1.0)
    } else {
        0.0
    };
    PENALTY_BASE * (1.0 + (1.0 - done))
}

/// Root-mean-square misfit of each channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub voltage_rmse_v: f64,
    pub soc_n_rmse: f64,
    pub soc_p_rmse: f64,
}

impl CostBreakdown {
    pub fn weighted(&self, w: &CostWeights) -> f64 {
        w.voltage * self.voltage_rmse_v + w.soc_n * self.soc_n_rmse + w.soc_p * self.soc_p_rmse
    }
}

/// Compares a simulated trajectory with the data, interpolating the
/// simulation linearly at the sample times. Returns `None` if the
/// simulation does not span every sample.
pub fn trajectory_misfit(
    simulated: &[TraceSample],
    dataset: &ExperimentalDataset,
    soc_exp: &[f64],
) -> Option<CostBreakdown> {
    let first = simulated.first()?;
    let last = simulated.last()?;
    let tol = 1e-9 * last.t_s.abs().max(1.0);
    let mut k = 0;
    let (mut sv, mut sn, mut sp) = (0.0, 0.0, 0.0);
    for (sample, &soc) in dataset.samples().iter().zip(soc_exp) {
        let t = sample.t_s;
        if t < first.t_s - tol || t > last.t_s + tol {
            return None;
        }
        while k + 2 < simulated.len() && simulated[k + 1].t_s < t {
            k += 1;
        }
        let (a, b) = if simulated.len() == 1 {
            (first, first)
        } else {
            (&simulated[k], &simulated[k + 1])
        };
        let w = if b.t_s > a.t_s {
            ((t - a.t_s) / (b.t_s - a.t_s)).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let lerp = |x: f64, y: f64| x + w * (y - x);
        let dv = lerp(a.output.v_cell, b.output.v_cell) - sample.voltage_v;
        let dn = lerp(a.output.soc_n, b.output.soc_n) - soc;
        let dp = lerp(a.output.soc_p, b.output.soc_p) - soc;
        sv += dv * dv;
        sn += dn * dn;
        sp += dp * dp;
    }
    let n = dataset.len() as f64;
    Some(CostBreakdown {
        voltage_rmse_v: (sv / n).sqrt(),
        soc_n_rmse: (sn / n).sqrt(),
        soc_p_rmse: (sp / n).sqrt(),
    })
}

/// Everything needed to score a candidate parameter vector against data.
#[derive(Debug, Clone)]
pub struct IdentificationProblem {
    cell: Cell,
    params: CellParameters,
    film: InitialFilm,
    vector: ParameterVector,
    lower: Vec<f64>,
    upper: Vec<f64>,
    dataset: ExperimentalDataset,
    soc_exp: Vec<f64>,
    pub weights: CostWeights,
    pub dt: DtPolicy,
}

impl IdentificationProblem {
    /// `base` carries the fixed parameters; the phase decides which side
    /// reactions are active and which vector is searched.
    pub fn new(
        base: &Cell,
        film: InitialFilm,
        dataset: ExperimentalDataset,
        nominal_capacity_ah: f64,
        weights: CostWeights,
        dt: DtPolicy,
    ) -> Result<Self> {
        Self::with_vector(base, film, search_vector(dataset.label), dataset, nominal_capacity_ah, weights, dt)
    }

    pub fn with_vector(
        base: &Cell,
        film: InitialFilm,
        vector: ParameterVector,
        dataset: ExperimentalDataset,
        nominal_capacity_ah: f64,
        weights: CostWeights,
        dt: DtPolicy,
    ) -> Result<Self> {
        if !(nominal_capacity_ah > 0.0) {
            return Err(Error::invariant("experiment.nominal_capacity_ah", "must be > 0"));
        }
        let params = phase_parameters(dataset.label, base.params())?;
        let cell = base.with_params(params.clone())?;
        let soc_exp = soc_exp_from_coulomb_counting(&dataset, nominal_capacity_ah);
        Ok(Self {
            cell,
            params,
            film,
            lower: vector.lower(),
            upper: vector.upper(),
            vector,
            dataset,
            soc_exp,
            weights,
            dt,
        })
    }

    pub fn vector(&self) -> &ParameterVector {
        &self.vector
    }

    pub fn dataset(&self) -> &ExperimentalDataset {
        &self.dataset
    }

    pub fn label(&self) -> CycleLabel {
        self.dataset.label
    }

    pub fn soc_exp(&self) -> &[f64] {
        &self.soc_exp
    }

    /// Parameters and starting film with `x` substituted.
    pub fn candidate(&self, x: &[f64]) -> (CellParameters, InitialFilm) {
        let mut params = self.params.clone();
        let mut film = self.film;
        self.vector.apply(x, &mut params, &mut film);
        (params, film)
    }

    /// Per-channel misfit at `x`, or the penalty cost when the simulation
    /// fails or stops before the last sample.
    pub fn evaluate(&self, x: &[f64]) -> std::result::Result<CostBreakdown, f64> {
        let (params, film) = self.candidate(x);
        let cell = self.cell.with_params(params).map_err(|_| penalty(0.0))?;
        let state = cell.initial_state(1.0, film).map_err(|_| penalty(0.0))?;
        let horizon = self.dataset.last_time();
        let protocol = Protocol {
            current: self.dataset.current_a,
            cutoff_v: None,
            max_time_s: horizon,
            dt: self.dt,
        };
        match cell.run_from(state, &protocol) {
            Ok(trace) if trace.termination == Termination::MaxTime => {
                trajectory_misfit(&trace.samples, &self.dataset, &self.soc_exp)
                    .ok_or_else(|| penalty(trace.end_time_s / horizon))
            }
            Ok(trace) => Err(penalty(trace.end_time_s / horizon)),
            Err(Error::Simulation { t_s, .. }) => Err(penalty(t_s / horizon)),
            Err(_) => Err(penalty(0.0)),
        }
    }
}

impl SearchProblem for IdentificationProblem {
    fn lower(&self) -> &[f64] {
        &self.lower
    }

    fn upper(&self) -> &[f64] {
        &self.upper
    }

    fn initial_guess(&self) -> Vec<f64> {
        self.vector.guesses()
    }

    fn cost(&self, x: &[f64]) -> f64 {
        match self.evaluate(x) {
            Ok(b) => b.weighted(&self.weights),
            Err(p) => p,
        }
    }

    fn is_penalty(&self, cost: f64) -> bool {
        !(cost < PENALTY_BASE)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentificationOutcome {
    pub label: CycleLabel,
    /// Search vector with `value` set to the identified point.
    pub vector: ParameterVector,
    pub cost: f64,
    pub breakdown: CostBreakdown,
    pub pso: PsoResult,
}

impl IdentificationOutcome {
    pub fn value(&self, param: super::protocol::Param) -> Option<f64> {
        self.vector.entries().iter().find(|e| e.param == param).map(|e| e.value)
    }
}

pub fn identify(problem: &IdentificationProblem, config: &PsoConfig) -> Result<IdentificationOutcome> {
    let pso = pso_minimize(problem, config)?;
    let breakdown = problem
        .evaluate(&pso.best)
        .map_err(|p| Error::Optimization(format!("best point no longer evaluates (penalty {p})")))?;
    let mut vector = problem.vector().clone();
    vector.set_values(&pso.best);
    Ok(IdentificationOutcome {
        label: problem.label(),
        vector,
        cost: pso.best_cost,
        breakdown,
        pso,
    })
}

/// Identifies the fresh-cell vector with all degradation paths off.
pub fn identify_fresh(
    dataset: ExperimentalDataset,
    base: &Cell,
    nominal_capacity_ah: f64,
    config: &PsoConfig,
) -> Result<IdentificationOutcome> {
    if dataset.label != CycleLabel::Fresh {
        return Err(Error::Dataset(format!("expected a fresh dataset, got {}", dataset.label)));
    }
    let problem = IdentificationProblem::new(
        base,
        InitialFilm::default(),
        dataset,
        nominal_capacity_ah,
        CostWeights::default(),
        DtPolicy::default(),
    )?;
    identify(&problem, config)
}

/// Identifies the aged-cell vector on top of parameters that already carry
/// the fresh-cell values.
pub fn identify_aged(
    dataset: ExperimentalDataset,
    base_with_fresh_values: &Cell,
    nominal_capacity_ah: f64,
    config: &PsoConfig,
) -> Result<IdentificationOutcome> {
    if dataset.label == CycleLabel::Fresh {
        return Err(Error::Dataset("aged identification needs an aged dataset".into()));
    }
    let problem = IdentificationProblem::new(
        base_with_fresh_values,
        InitialFilm::default(),
        dataset,
        nominal_capacity_ah,
        CostWeights::default(),
        DtPolicy::default(),
    )?;
    identify(&problem, config)
}
