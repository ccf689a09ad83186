//! One ESPM time step and the constant-current experiment driver.

use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::aging;
use crate::config::Mesh;
use crate::error::{Electrode, Error, Result};
use crate::ocp::OcpSet;
use crate::params::CellParameters;
use crate::state::{initial_state, CellState, InitialFilm};
use crate::transport::{
    self, anode_surface_flux, cathode_surface_flux, pore_wall_fluxes, solve_electrolyte_potential,
    surface_concentration, ElectrolyteGrid, ShellGrid,
};

/// Algebraic outputs at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepOutput {
    pub v_cell: f64,
    pub soc_n: f64,
    pub soc_p: f64,
    pub eta_p: f64,
    pub eta_n: f64,
    pub phi_s_n: f64,
    pub phi_e_n: f64,
    pub delta_phi_e: f64,
    pub r_film: f64,
    pub r_el: f64,
    pub j_int: f64,
    pub j_sei: f64,
    pub j_pl: f64,
    /// Total anode active area (m2/m3).
    pub a_t_n: f64,
    /// `I / (A_cell L_n) - j_int - j_sei - j_pl`; zero by construction.
    pub flux_residual: f64,
    pub capacity_ah: f64,
}

/// `i0 = k F sqrt(c_avg c_surf (c_max - c_surf))` (A/m2).
///
/// The electrolyte concentration does not enter this form; it is accepted so
/// callers can pass the local state uniformly.
pub fn exchange_current(
    c_s_surf: f64,
    c_s_avg: f64,
    _c_e_local: f64,
    params: &CellParameters,
    electrode: Electrode,
) -> Result<f64> {
    let c_max = params.c_s_max(electrode);
    if !(c_s_surf > 0.0 && c_s_surf < c_max) {
        return Err(Error::Saturation {
            electrode,
            value: c_s_surf,
            max: c_max,
        });
    }
    let k = params.reaction_rate(electrode);
    Ok(k * params.constants.faraday * (c_s_avg * c_s_surf * (c_max - c_s_surf)).sqrt())
}

/// Butler-Volmer overpotential with symmetric transfer, signed so that
/// discharge gives a positive anode and a negative cathode value.
pub fn overpotential(
    current: f64,
    a_t: f64,
    thickness: f64,
    i0: f64,
    params: &CellParameters,
    electrode: Electrode,
) -> f64 {
    let x = current / (2.0 * params.geometry.a_cell * a_t * thickness * i0);
    let eta = params.thermal_voltage() / 0.5 * x.asinh();
    match electrode {
        Electrode::Negative => eta,
        Electrode::Positive => -eta,
    }
}

/// Surface stoichiometry mapped onto each electrode's SOC window; not clamped.
pub fn soc(state: &CellState, params: &CellParameters) -> (f64, f64) {
    let theta_n = surface_concentration(&state.c_s_n) / params.composition.c_s_max_n;
    let theta_p = surface_concentration(&state.c_s_p) / params.composition.c_s_max_p;
    soc_from_stoichiometry(theta_n, theta_p, params)
}

fn soc_from_stoichiometry(theta_n: f64, theta_p: f64, params: &CellParameters) -> (f64, f64) {
    let s = &params.stoichiometry;
    let soc_n = (theta_n - s.theta_n_0) / (s.theta_n_100 - s.theta_n_0);
    let soc_p = (s.theta_p_0 - theta_p) / (s.theta_p_0 - s.theta_p_100);
    (soc_n, soc_p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DtPolicy {
    Fixed { dt_s: f64 },
}

impl Default for DtPolicy {
    fn default() -> Self {
        DtPolicy::Fixed { dt_s: 1.0 }
    }
}

impl DtPolicy {
    pub fn fixed(dt_s: f64) -> Self {
        DtPolicy::Fixed { dt_s }
    }

    pub fn dt(&self) -> f64 {
        match *self {
            DtPolicy::Fixed { dt_s } => dt_s,
        }
    }
}

/// Constant-current run settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Protocol {
    /// Applied current (A); positive discharges.
    pub current: f64,
    /// Stop when the voltage crosses this value; `None` runs to `max_time_s`.
    pub cutoff_v: Option<f64>,
    /// Duration limit measured from the start of the run (s).
    pub max_time_s: f64,
    pub dt: DtPolicy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    CutoffReached,
    /// A particle surface reached an end of its stoichiometric range.
    SocExhausted,
    MaxTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub t_s: f64,
    pub output: StepOutput,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationTrace {
    pub samples: Vec<TraceSample>,
    pub termination: Termination,
    /// Time of termination; interpolated to the cutoff crossing when one occurs.
    pub end_time_s: f64,
    pub end_capacity_ah: f64,
    pub end_voltage_v: f64,
}

pub const TRACE_HEADER: [&str; 8] = [
    "t_s",
    "V_cell_V",
    "soc_n",
    "soc_p",
    "capacity_Ah",
    "R_film_ohm",
    "j_sei_A_m3",
    "j_pl_A_m3",
];

impl SimulationTrace {
    pub fn peak_film_resistance(&self) -> f64 {
        self.samples.iter().map(|s| s.output.r_film).fold(0.0, f64::max)
    }

    pub fn last(&self) -> &TraceSample {
        self.samples.last().expect("trace holds at least the initial sample")
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let to_err = |e: csv::Error| Error::Parse {
            what: "trace CSV".into(),
            message: e.to_string(),
        };
        w.write_record(TRACE_HEADER).map_err(to_err)?;
        for s in &self.samples {
            let o = &s.output;
            w.write_record(
                [s.t_s, o.v_cell, o.soc_n, o.soc_p, o.capacity_ah, o.r_film, o.j_sei, o.j_pl]
                    .iter()
                    .map(|v| format!("{v:e}")),
            )
            .map_err(to_err)?;
        }
        w.flush().map_err(|e| Error::Parse {
            what: "trace CSV".into(),
            message: e.to_string(),
        })
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

/// Parameters, OCP curves and the grids derived from them.
#[derive(Debug, Clone)]
pub struct Cell {
    params: CellParameters,
    ocp: Arc<OcpSet>,
    mesh: Mesh,
    grid: ElectrolyteGrid,
    shells_p: ShellGrid,
    shells_n: ShellGrid,
    d_s_p: f64,
    d_s_n: f64,
}

impl Cell {
    pub fn new(params: CellParameters, ocp: Arc<OcpSet>, mesh: Mesh) -> Result<Self> {
        params.validate()?;
        mesh.validate()?;
        let temperature = params.environment.temperature;
        Ok(Self {
            grid: ElectrolyteGrid::new(&params, &mesh),
            shells_p: ShellGrid::new(params.geometry.r_p, mesh.n_r_p),
            shells_n: ShellGrid::new(params.geometry.r_n, mesh.n_r_n),
            d_s_p: transport::arrhenius_diffusivity(temperature, &params, Electrode::Positive),
            d_s_n: transport::arrhenius_diffusivity(temperature, &params, Electrode::Negative),
            params,
            ocp,
            mesh,
        })
    }

    pub fn params(&self) -> &CellParameters {
        &self.params
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn ocp(&self) -> &Arc<OcpSet> {
        &self.ocp
    }

    pub fn electrolyte_grid(&self) -> &ElectrolyteGrid {
        &self.grid
    }

    pub fn shells(&self, electrode: Electrode) -> &ShellGrid {
        match electrode {
            Electrode::Positive => &self.shells_p,
            Electrode::Negative => &self.shells_n,
        }
    }

    /// Same OCP curves and mesh, different parameters.
    pub fn with_params(&self, params: CellParameters) -> Result<Self> {
        Self::new(params, Arc::clone(&self.ocp), self.mesh)
    }

    pub fn initial_state(&self, soc0: f64, film: InitialFilm) -> Result<CellState> {
        initial_state(&self.params, &self.mesh, soc0)?.with_film(film, &self.params)
    }

    /// Open-circuit voltage of a state.
    pub fn open_circuit_voltage(&self, state: &CellState) -> f64 {
        let theta_p = surface_concentration(&state.c_s_p) / self.params.composition.c_s_max_p;
        let theta_n = surface_concentration(&state.c_s_n) / self.params.composition.c_s_max_n;
        self.ocp.positive.eval(theta_p) - self.ocp.negative.eval(theta_n)
    }

    /// Lithium held by both particles, electrode-volume weighted (mol).
    pub fn solid_lithium(&self, state: &CellState) -> f64 {
        let g = &self.params.geometry;
        g.a_cell
            * (g.l_n * self.shells_n.average(&state.c_s_n) + g.l_p * self.shells_p.average(&state.c_s_p))
    }

    pub fn electrolyte_lithium(&self, state: &CellState) -> f64 {
        transport::total_electrolyte_lithium(state, &self.params, &self.grid)
    }

    /// Outputs at `state` under `current`; `capacity_ah` is carried through.
    pub fn evaluate(&self, state: &CellState, current: f64, capacity_ah: f64) -> Result<StepOutput> {
        let p = &self.params;
        let c_surf_p = surface_concentration(&state.c_s_p);
        let c_surf_n = surface_concentration(&state.c_s_n);
        let c_avg_p = self.shells_p.average(&state.c_s_p);
        let c_avg_n = self.shells_n.average(&state.c_s_n);
        let grid = &self.grid;
        let c_e_p = grid.region_mean(&state.c_e, transport::Region::Positive);
        let c_e_n = grid.region_mean(&state.c_e, transport::Region::Negative);
        let i0_p = exchange_current(c_surf_p, c_avg_p, c_e_p, p, Electrode::Positive)?;
        let i0_n = exchange_current(c_surf_n, c_avg_n, c_e_n, p, Electrode::Negative)?;

        let theta_p = c_surf_p / p.composition.c_s_max_p;
        let theta_n = c_surf_n / p.composition.c_s_max_n;
        let u_p = self.ocp.positive.eval(theta_p);
        let u_n = self.ocp.negative.eval(theta_n);

        let eta_p = overpotential(current, state.a_t_p, p.geometry.l_p, i0_p, p, Electrode::Positive);
        let eta_n = overpotential(current, state.a_t_n, p.geometry.l_n, i0_n, p, Electrode::Negative);
        let r_film = aging::film_resistance(state.l_sei, state.a_t_n, p);

        let fluxes = pore_wall_fluxes(current, p);
        let electrolyte = solve_electrolyte_potential(state, &fluxes, p, grid)?;
        let phi_e_n = electrolyte.anode_mean(grid);
        let phi_s_n = u_n + eta_n + r_film * current;

        let j_sei = aging::sei_current_density(state, phi_s_n, phi_e_n, r_film, current, p);
        let j_pl = aging::plating_current_density(state, phi_s_n, phi_e_n, r_film, current, p);
        let j_total = current / (p.geometry.a_cell * p.geometry.l_n);
        let j_int = j_total - j_sei - j_pl;
        let flux_residual = j_total - j_sei - j_pl - j_int;

        let v_cell = u_p - u_n + eta_p - eta_n + electrolyte.delta_phi_e
            - current * (p.resistances.r_l + electrolyte.r_el + r_film);
        if !v_cell.is_finite() {
            return Err(Error::NonFinite("cell voltage"));
        }
        let (soc_n, soc_p) = soc_from_stoichiometry(theta_n, theta_p, p);
        Ok(StepOutput {
            v_cell,
            soc_n,
            soc_p,
            eta_p,
            eta_n,
            phi_s_n,
            phi_e_n,
            delta_phi_e: electrolyte.delta_phi_e,
            r_film,
            r_el: electrolyte.r_el,
            j_int,
            j_sei,
            j_pl,
            a_t_n: state.a_t_n,
            flux_residual,
            capacity_ah,
        })
    }

    /// Advances `state` by `dt` using the side currents of `at_start`, which
    /// must be the output of [`Cell::evaluate`] on the same state.
    pub fn advance(&self, state: &mut CellState, at_start: &StepOutput, current: f64, dt: f64) -> Result<()> {
        let p = &self.params;
        let q_n = anode_surface_flux(current, at_start.j_sei, at_start.j_pl, state.a_t_n, p);
        let q_p = cathode_surface_flux(current, state.a_t_p, p);
        if !self.shells_n.implicit_step(&mut state.c_s_n, q_n, self.d_s_n, dt) {
            return Err(Error::NonFinite("anode solid concentration"));
        }
        if !self.shells_p.implicit_step(&mut state.c_s_p, q_p, self.d_s_p, dt) {
            return Err(Error::NonFinite("cathode solid concentration"));
        }
        let fluxes = pore_wall_fluxes(current, p);
        transport::implicit_mass_step(state, &fluxes, p, &self.grid, dt)?;

        let rates = aging::species_and_film_rates(at_start.j_sei, at_start.j_pl, state, p);
        state.c_sei += dt * rates.dc_sei_dt;
        state.c_li += dt * rates.dc_li_dt;
        state.l_sei += dt * rates.dl_sei_dt;
        state.l_li += dt * rates.dl_li_dt;
        state.l_film = state.l_sei + state.l_li;

        aging::advance_lam(state, p, dt)?;
        state.t += dt;
        let (eps_p, eps_n) = aging::porosity_update(state, p)?;
        state.eps_p = eps_p;
        state.eps_n = eps_n;
        Ok(())
    }

    /// One step from `state`: returns the advanced state and its outputs.
    pub fn step(&self, state: &CellState, current: f64, dt: f64) -> Result<(CellState, StepOutput)> {
        if !(dt > 0.0) {
            return Err(Error::invariant("dt", "must be > 0"));
        }
        let start = self.evaluate(state, current, 0.0)?;
        let mut next = state.clone();
        self.advance(&mut next, &start, current, dt)?;
        let capacity = current * dt / 3600.0;
        let out = self.evaluate(&next, current, capacity)?;
        Ok((next, out))
    }

    /// Constant-current run from a fresh uniform state at `soc0`.
    pub fn run_constant_current(
        &self,
        current: f64,
        cutoff_v: f64,
        soc0: f64,
        dt: DtPolicy,
        max_time_s: f64,
        film: InitialFilm,
    ) -> Result<SimulationTrace> {
        let state = self.initial_state(soc0, film)?;
        self.run_from(
            state,
            &Protocol {
                current,
                cutoff_v: Some(cutoff_v),
                max_time_s,
                dt,
            },
        )
    }

    /// Runs `protocol` starting from `state`. Time in the trace is measured
    /// from the start of the run.
    pub fn run_from(&self, mut state: CellState, protocol: &Protocol) -> Result<SimulationTrace> {
        let dt = protocol.dt.dt();
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::invariant("dt", "must be a positive finite number"));
        }
        if !(protocol.max_time_s > 0.0) {
            return Err(Error::invariant("max_time_s", "must be > 0"));
        }
        let current = protocol.current;
        let t0 = state.t;
        let annotate = |t: f64, source: Error| Error::Simulation {
            t_s: t,
            capacity_ah: current * t / 3600.0,
            source: Box::new(source),
        };
        let crossed = |v: f64| match protocol.cutoff_v {
            Some(cut) if current > 0.0 => v <= cut,
            Some(cut) if current < 0.0 => v >= cut,
            _ => false,
        };

        let mut out = self.evaluate(&state, current, 0.0).map_err(|e| annotate(0.0, e))?;
        let mut samples = vec![TraceSample { t_s: 0.0, output: out }];
        if crossed(out.v_cell) {
            return Ok(SimulationTrace {
                samples,
                termination: Termination::CutoffReached,
                end_time_s: 0.0,
                end_capacity_ah: 0.0,
                end_voltage_v: out.v_cell,
            });
        }

        let mut steps: u64 = 0;
        let mut elapsed = 0.0;
        let termination = loop {
            let remaining = protocol.max_time_s - elapsed;
            if remaining <= 1e-9 * dt {
                break Termination::MaxTime;
            }
            let h = dt.min(remaining);
            self.advance(&mut state, &out, current, h).map_err(|e| annotate(elapsed, e))?;
            steps += 1;
            // Recompute from the step count so fixed steps do not drift.
            elapsed = if h == dt { steps as f64 * dt } else { elapsed + h };
            state.t = t0 + elapsed;
            let capacity = current * elapsed / 3600.0;
            match self.evaluate(&state, current, capacity) {
                Ok(next) => out = next,
                Err(Error::Saturation { .. }) => break Termination::SocExhausted,
                Err(e) => return Err(annotate(elapsed, e)),
            }
            samples.push(TraceSample {
                t_s: elapsed,
                output: out,
            });
            if crossed(out.v_cell) {
                break Termination::CutoffReached;
            }
        };

        let last = samples[samples.len() - 1];
        let (end_time_s, end_voltage_v) = match (termination, protocol.cutoff_v) {
            (Termination::CutoffReached, Some(cut)) => {
                let prev = samples[samples.len() - 2];
                let dv = prev.output.v_cell - last.output.v_cell;
                let frac = if dv != 0.0 { (prev.output.v_cell - cut) / dv } else { 1.0 };
                (prev.t_s + frac.clamp(0.0, 1.0) * (last.t_s - prev.t_s), cut)
            }
            _ => (last.t_s, last.output.v_cell),
        };
        Ok(SimulationTrace {
            samples,
            termination,
            end_time_s,
            end_capacity_ah: current * end_time_s / 3600.0,
            end_voltage_v,
        })
    }
}
