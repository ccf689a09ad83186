use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;

use espm::identification::{
    identify, reference_table, synthetic, CostBreakdown, CostWeights, CycleLabel, ExperimentalDataset,
    IdentificationProblem, PsoConfig, ReferenceTable,
};
use espm::sweep::{self, Range, SweepParam, SweepSpec, Verdicts};
use espm::{Cell, CellParameters, Config, DtPolicy, Protocol, SimulationTrace, Termination};

use crate::args::{IdentifyArgs, SimulateArgs, SweepArgs, SynthArgs};
use crate::error::{CliError, CliResult};
use crate::verify;

pub fn load_config(path: &Path) -> CliResult<Config> {
    Config::load(path).map_err(CliError::Config)
}

fn build_cell(config: &Config, params: CellParameters) -> CliResult<Cell> {
    let ocp = config.load_ocp().map_err(CliError::Config)?;
    Cell::new(params, Arc::new(ocp), config.mesh).map_err(CliError::Config)
}

/// Parameters with the fresh-cell vector applied but not the aged one.
fn fresh_base(config: &Config) -> CellParameters {
    let mut p = config.cell.clone();
    if let Some(t1) = &config.theta1 {
        t1.apply(&mut p);
    }
    p
}

fn parse_phase(phase: &str) -> CliResult<CycleLabel> {
    phase.parse().map_err(CliError::Config)
}

fn dt_policy(config: &Config) -> DtPolicy {
    DtPolicy::fixed(config.experiment.dt_s)
}

fn check_current(current: f64) -> CliResult<f64> {
    if !current.is_finite() {
        return Err(CliError::Config(espm::Error::invariant("current", "must be finite")));
    }
    Ok(current)
}

fn out_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Output(format!("{}: {e}", path.display()))
}

fn create_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| out_err(dir, e))
}

fn create_parent(path: &Path) -> CliResult<()> {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => create_dir(p),
        _ => Ok(()),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| out_err(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| out_err(path, e))
}

fn save_trace(trace: &SimulationTrace, path: &Path) -> CliResult<()> {
    trace.save_csv(path).map_err(|e| out_err(path, e))
}

#[derive(Debug, Serialize)]
pub struct SimulationSummary {
    pub termination: Termination,
    pub end_time_s: f64,
    pub end_capacity_ah: f64,
    pub end_voltage_v: f64,
    pub peak_r_film_ohm: f64,
    pub final_r_film_ohm: f64,
    pub current_a: f64,
    pub cutoff_v: f64,
    pub cycles: f64,
    pub samples: usize,
    pub config: Config,
}

pub const SIMULATION_SUMMARY_KEYS: [&str; 11] = [
    "termination",
    "end_time_s",
    "end_capacity_ah",
    "end_voltage_v",
    "peak_r_film_ohm",
    "final_r_film_ohm",
    "current_a",
    "cutoff_v",
    "cycles",
    "samples",
    "config",
];

pub fn simulate(args: &SimulateArgs) -> CliResult<()> {
    let config = load_config(&args.config)?;
    let mut params = config.resolved_parameters();
    if args.cycles > 0.0 {
        params = sweep::constant_cathode_area(&params);
    }
    let cell = build_cell(&config, params)?;
    let current = check_current(args.current.resolve(config.experiment.nominal_capacity_ah))?;
    let cutoff_v = args.cutoff.unwrap_or(config.experiment.cutoff_v);
    let film = config.initial_film();
    let state = if args.cycles > 0.0 {
        sweep::aged_state(&cell, config.experiment.soc0, film, args.cycles * args.t_cycle, args.aging_dt)
    } else {
        cell.initial_state(config.experiment.soc0, film)
    }
    .map_err(CliError::from_run)?;
    let protocol = Protocol {
        current,
        cutoff_v: Some(cutoff_v),
        max_time_s: config.experiment.max_time_s,
        dt: dt_policy(&config),
    };
    let trace = cell.run_from(state, &protocol).map_err(CliError::from_run)?;
    log::info!(
        "{:?} after {:.0} s: {:.4} Ah at {:.4} V",
        trace.termination,
        trace.end_time_s,
        trace.end_capacity_ah,
        trace.end_voltage_v
    );

    create_dir(&args.out)?;
    let trace_path = args.out.join("trace.csv");
    let summary_path = args.out.join("summary.json");
    save_trace(&trace, &trace_path)?;
    let summary = SimulationSummary {
        termination: trace.termination,
        end_time_s: trace.end_time_s,
        end_capacity_ah: trace.end_capacity_ah,
        end_voltage_v: trace.end_voltage_v,
        peak_r_film_ohm: trace.peak_film_resistance(),
        final_r_film_ohm: trace.last().output.r_film,
        current_a: current,
        cutoff_v,
        cycles: args.cycles,
        samples: trace.samples.len(),
        config,
    };
    write_json(&summary_path, &summary)?;
    if args.verify {
        verify::trace_csv(&trace_path, summary.samples)?;
        verify::json_with_keys(&summary_path, &SIMULATION_SUMMARY_KEYS)?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct DatasetInfo {
    pub path: PathBuf,
    pub samples: usize,
    pub current_a: f64,
    pub temperature_k: f64,
    pub duration_s: f64,
}

#[derive(Debug, Serialize)]
pub struct IdentifiedValue {
    pub name: &'static str,
    pub unit: &'static str,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub guess: f64,
}

#[derive(Debug, Serialize)]
pub struct IdentificationReport {
    pub phase: CycleLabel,
    pub seed: u64,
    pub dataset: DatasetInfo,
    pub nominal_capacity_ah: f64,
    pub weights: CostWeights,
    pub pso: PsoConfig,
    pub identified: Vec<IdentifiedValue>,
    pub cost: f64,
    pub breakdown: CostBreakdown,
    pub reference: ReferenceTable,
    pub history: Vec<f64>,
    pub evaluations: usize,
    pub config: Config,
}

pub const REPORT_KEYS: [&str; 13] = [
    "phase",
    "seed",
    "dataset",
    "nominal_capacity_ah",
    "weights",
    "pso",
    "identified",
    "cost",
    "breakdown",
    "reference",
    "history",
    "evaluations",
    "config",
];

pub fn identify_command(args: &IdentifyArgs) -> CliResult<()> {
    let config = load_config(&args.config)?;
    let label = parse_phase(&args.phase)?;
    if label != CycleLabel::Fresh && config.theta1.is_none() {
        return Err(CliError::Config(espm::Error::invariant(
            "theta1",
            "aged phases need the identified fresh-cell values",
        )));
    }
    let cell = build_cell(&config, fresh_base(&config))?;
    let nominal = config.experiment.nominal_capacity_ah;
    let current = check_current(args.current.resolve(nominal))?;
    let dataset = ExperimentalDataset::from_csv(&args.data, current, config.cell.environment.temperature, label)
        .map_err(CliError::Dataset)?;

    let mut pso = config.pso.clone().unwrap_or_default();
    pso.seed = args.seed;
    if let Some(n) = args.swarm {
        pso.swarm_size = n;
    }
    if let Some(n) = args.iterations {
        pso.iterations = n;
    }
    pso.validate().map_err(CliError::Config)?;

    let dataset_info = DatasetInfo {
        path: args.data.clone(),
        samples: dataset.len(),
        current_a: dataset.current_a,
        temperature_k: dataset.temperature_k,
        duration_s: dataset.last_time(),
    };
    let film = espm::InitialFilm {
        l_sei: config.experiment.initial_l_sei_m,
        l_li: config.experiment.initial_l_li_m,
    };
    let weights = CostWeights::default();
    let problem = IdentificationProblem::new(&cell, film, dataset, nominal, weights, dt_policy(&config))
        .map_err(CliError::from_run)?;
    let outcome = identify(&problem, &pso).map_err(CliError::Optimization)?;
    log::info!("{label}: cost {:.5} after {} evaluations", outcome.cost, outcome.pso.evaluations);

    let report = IdentificationReport {
        phase: label,
        seed: args.seed,
        dataset: dataset_info,
        nominal_capacity_ah: nominal,
        weights,
        identified: outcome
            .vector
            .entries()
            .iter()
            .map(|e| IdentifiedValue {
                name: e.param.name(),
                unit: e.param.unit(),
                value: e.value,
                lower: e.lower,
                upper: e.upper,
                guess: e.guess,
            })
            .collect(),
        cost: outcome.cost,
        breakdown: outcome.breakdown,
        reference: reference_table(label),
        history: outcome.pso.history,
        evaluations: outcome.pso.evaluations,
        pso,
        config,
    };
    create_parent(&args.out)?;
    write_json(&args.out, &report)?;
    if args.verify {
        verify::report_json(&args.out, &REPORT_KEYS)?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct SweepSummary {
    pub spec: SweepSpec,
    pub current_a: f64,
    pub cutoff_v: f64,
    pub verdicts: Verdicts,
    pub points: Vec<sweep::SweepPoint>,
    pub config: Config,
}

pub const SWEEP_SUMMARY_KEYS: [&str; 6] = ["spec", "current_a", "cutoff_v", "verdicts", "points", "config"];

/// File name of one point's trace.
pub fn point_file_name(index: usize, kprime_n: f64, betaprime_n: f64) -> String {
    format!("point_{index:03}_k{kprime_n:.3e}_b{betaprime_n:.3e}.csv")
}

pub fn sweep_command(args: &SweepArgs) -> CliResult<()> {
    let config = load_config(&args.config)?;
    let param: SweepParam = args.param.parse().map_err(CliError::Config)?;
    let second = match (param, args.min2, args.max2, args.count2) {
        (SweepParam::Grid, Some(min), Some(max), Some(count)) => Some(Range { min, max, count }),
        (SweepParam::Grid, ..) => {
            return Err(CliError::Config(espm::Error::invariant(
                "sweep",
                "both-grid needs --min2, --max2 and --count2",
            )))
        }
        _ => None,
    };
    let spec = SweepSpec {
        param,
        range: Range {
            min: args.min,
            max: args.max,
            count: args.count,
        },
        second,
        cycles: args.cycles,
        t_cycle_s: args.t_cycle,
        aging_dt_s: args.aging_dt,
    };
    spec.validate().map_err(CliError::Config)?;
    let cell = build_cell(&config, config.resolved_parameters())?;
    let current = check_current(args.current.resolve(config.experiment.nominal_capacity_ah))?;
    let cutoff_v = args.cutoff.unwrap_or(config.experiment.cutoff_v);
    let protocol = Protocol {
        current,
        cutoff_v: Some(cutoff_v),
        max_time_s: config.experiment.max_time_s,
        dt: dt_policy(&config),
    };
    let result = sweep::run_sweep(&cell, config.experiment.soc0, config.initial_film(), &spec, &protocol)
        .map_err(CliError::from_run)?;

    create_dir(&args.out)?;
    let envelope_path = args.out.join("envelope.csv");
    let mut envelope = csv::Writer::from_path(&envelope_path).map_err(|e| out_err(&envelope_path, e))?;
    envelope
        .write_record(verify::ENVELOPE_HEADER)
        .map_err(|e| out_err(&envelope_path, e))?;
    for (k, point) in result.points.iter().enumerate() {
        if let Some(trace) = &point.trace {
            save_trace(trace, &args.out.join(point_file_name(k, point.kprime_n, point.betaprime_n)))?;
        }
        envelope
            .write_record([
                format!("{:e}", point.kprime_n),
                format!("{:e}", point.betaprime_n),
                format!("{:e}", point.capacity_ah),
                format!("{:e}", point.final_r_film_ohm),
                format!("{:e}", point.a_t_n_start),
                format!("{:e}", point.a_t_n_end),
                termination_label(point.termination).to_string(),
            ])
            .map_err(|e| out_err(&envelope_path, e))?;
    }
    envelope.flush().map_err(|e| out_err(&envelope_path, e))?;
    drop(envelope);

    let summary_path = args.out.join("summary.json");
    let count = result.points.len();
    let verdicts = result.verdicts;
    if let Some(false) = verdicts.capacity_decreasing_in_betaprime_n {
        log::warn!("capacity does not decrease monotonically in betaprime_n");
    }
    let summary = SweepSummary {
        spec,
        current_a: current,
        cutoff_v,
        verdicts,
        points: result.points,
        config,
    };
    write_json(&summary_path, &summary)?;
    if args.verify {
        let sort_column = if param == SweepParam::KprimeN { 0 } else { 1 };
        verify::envelope_csv(&envelope_path, count, sort_column)?;
        verify::json_with_keys(&summary_path, &SWEEP_SUMMARY_KEYS)?;
        for (k, p) in summary.points.iter().enumerate() {
            let path = args.out.join(point_file_name(k, p.kprime_n, p.betaprime_n));
            let rows = csv::Reader::from_path(&path)
                .map_err(|e| CliError::Verify(format!("{}: {e}", path.display())))?
                .records()
                .count();
            verify::trace_csv(&path, rows)?;
        }
    }
    Ok(())
}

pub fn termination_label(t: Termination) -> &'static str {
    match t {
        Termination::CutoffReached => "cutoff_reached",
        Termination::SocExhausted => "soc_exhausted",
        Termination::MaxTime => "max_time",
    }
}

#[derive(Debug, Serialize)]
pub struct SynthSummary {
    pub phase: CycleLabel,
    pub seed: u64,
    pub path: PathBuf,
    pub samples: usize,
    pub current_a: f64,
    pub cutoff_v: f64,
    pub noise_std_v: f64,
    pub duration_s: f64,
    /// Charge of the truth cell's anode window; consistent Coulomb counting
    /// needs `nominal_capacity_ah` in the identification config to match.
    pub truth_window_capacity_ah: f64,
    pub truth: Vec<TruthValue>,
}

#[derive(Debug, Serialize)]
pub struct TruthValue {
    pub name: &'static str,
    pub unit: &'static str,
    pub value: f64,
}

pub fn synth(args: &SynthArgs) -> CliResult<SynthSummary> {
    let config = load_config(&args.config)?;
    let label = parse_phase(&args.phase)?;
    let base = build_cell(&config, fresh_base(&config))?;
    let (cell, film) = synthetic::truth_cell(&base, label).map_err(CliError::from_run)?;
    let current = check_current(args.current.resolve(config.experiment.nominal_capacity_ah))?;
    let cutoff_v = args.cutoff.unwrap_or(config.experiment.cutoff_v);
    let spec = synthetic::SyntheticSpec {
        label,
        current_a: current,
        cutoff_v,
        noise_std_v: args.noise_mv * 1e-3,
        interval_s: args.interval,
        seed: args.seed,
        dt: dt_policy(&config),
        max_time_s: config.experiment.max_time_s,
    };
    let dataset = synthetic::generate(&cell, film, &spec).map_err(CliError::from_run)?;
    create_parent(&args.out)?;
    dataset.save_csv(&args.out).map_err(|e| out_err(&args.out, e))?;
    if args.verify {
        verify::dataset_csv(&args.out, current, dataset.temperature_k, label, dataset.len())?;
    }
    Ok(SynthSummary {
        phase: label,
        seed: args.seed,
        path: args.out.clone(),
        samples: dataset.len(),
        current_a: current,
        cutoff_v,
        noise_std_v: spec.noise_std_v,
        duration_s: dataset.last_time(),
        truth_window_capacity_ah: synthetic::nominal_capacity_ah(&cell),
        truth: synthetic::synthetic_truth(label)
            .into_iter()
            .map(|(p, value)| TruthValue {
                name: p.name(),
                unit: p.unit(),
                value,
            })
            .collect(),
    })
}
