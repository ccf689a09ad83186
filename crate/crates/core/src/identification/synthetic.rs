//! Synthetic constant-current datasets from known parameter vectors, used
//! to check that the identification recovers a trajectory it can reproduce.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::dataset::{CycleLabel, ExperimentalDataset, Sample};
use super::protocol::{phase_parameters, Param};
use crate::cell::{Cell, DtPolicy, Protocol};
use crate::error::{Electrode, Error, Result};
use crate::state::InitialFilm;

/// Parameter values the synthetic data is generated with.
///
/// The fresh vector is the published fresh-cell result. The aged vectors
/// keep the published film ratio and anode stoichiometry and choose the
/// cathode 0 % stoichiometry so both electrode windows hold the same charge;
/// Coulomb-counted SOC then agrees with both electrode SOCs.
pub fn synthetic_truth(label: CycleLabel) -> Vec<(Param, f64)> {
    match label {
        CycleLabel::Fresh => vec![
            (Param::ACell, 0.57),
            (Param::RL, 0.04),
            (Param::VN, 0.54),
            (Param::RP, 1e-6),
            (Param::RN, 5.16e-6),
            (Param::DsRefP, 2e-13),
            (Param::DsRefN, 1e-13),
            (Param::ThetaP100, 0.30),
            (Param::ThetaN100, 0.99),
        ],
        CycleLabel::Aged1000 => vec![
            (Param::LSeiOverKappaSei, 0.085),
            (Param::ThetaP0, 0.877),
            (Param::ThetaN100, 0.88),
        ],
        CycleLabel::Aged3300 => vec![
            (Param::LSeiOverKappaSei, 0.25),
            (Param::ThetaP0, 0.771),
            (Param::ThetaN100, 0.72),
        ],
    }
}

/// `base` with the phase switches and the synthetic truth applied.
pub fn truth_cell(base: &Cell, label: CycleLabel) -> Result<(Cell, InitialFilm)> {
    let mut params = phase_parameters(label, base.params())?;
    let mut film = InitialFilm::default();
    for (param, value) in synthetic_truth(label) {
        param.apply(value, &mut params, &mut film);
    }
    Ok((base.with_params(params)?, film))
}

/// Charge the anode window of `cell` holds (Ah); the nominal capacity that
/// makes Coulomb counting consistent with the synthetic truth.
pub fn nominal_capacity_ah(cell: &Cell) -> f64 {
    cell.params().window_capacity_ah(Electrode::Negative)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub label: CycleLabel,
    pub current_a: f64,
    pub cutoff_v: f64,
    pub noise_std_v: f64,
    pub interval_s: f64,
    pub seed: u64,
    pub dt: DtPolicy,
    pub max_time_s: f64,
}

/// Simulates a full discharge of `cell` from SOC 1, samples the voltage every
/// `interval_s` up to the cutoff crossing and adds Gaussian noise.
pub fn generate(cell: &Cell, film: InitialFilm, spec: &SyntheticSpec) -> Result<ExperimentalDataset> {
    if !(spec.interval_s > 0.0) {
        return Err(Error::invariant("interval_s", "must be > 0"));
    }
    let noise = Normal::new(0.0, spec.noise_std_v)
        .map_err(|e| Error::invariant("noise_std_v", e.to_string()))?;
    let state = cell.initial_state(1.0, film)?;
    let trace = cell.run_from(
        state,
        &Protocol {
            current: spec.current_a,
            cutoff_v: Some(spec.cutoff_v),
            max_time_s: spec.max_time_s,
            dt: spec.dt,
        },
    )?;
    let samples = &trace.samples;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = Vec::new();
    let mut k = 0;
    let mut j = 0usize;
    loop {
        let t = j as f64 * spec.interval_s;
        if t > trace.end_time_s || t > samples[samples.len() - 1].t_s {
            break;
        }
        while k + 2 < samples.len() && samples[k + 1].t_s < t {
            k += 1;
        }
        let v = if samples.len() == 1 {
            samples[0].output.v_cell
        } else {
            let (a, b) = (&samples[k], &samples[k + 1]);
            let w = ((t - a.t_s) / (b.t_s - a.t_s)).clamp(0.0, 1.0);
            a.output.v_cell + w * (b.output.v_cell - a.output.v_cell)
        };
        out.push(Sample {
            t_s: t,
            voltage_v: v + noise.sample(&mut rng),
        });
        j += 1;
    }
    ExperimentalDataset::new(out, spec.current_a, cell.params().environment.temperature, spec.label)
}
