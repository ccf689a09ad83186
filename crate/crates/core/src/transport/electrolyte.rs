use crate::config::Mesh;
use crate::error::{Error, Result};
use crate::params::{ArrheniusPolynomial, CellParameters};
use crate::state::CellState;
use crate::tridiag;

use super::PoreWallFluxes;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Negative,
    Separator,
    Positive,
}

/// Axial control volumes, anode collector first.
#[derive(Debug, Clone, PartialEq)]
pub struct ElectrolyteGrid {
    widths: Vec<f64>,
    regions: Vec<Region>,
    n_n: usize,
    n_s: usize,
    n_p: usize,
}

impl ElectrolyteGrid {
    pub fn new(params: &CellParameters, mesh: &Mesh) -> Self {
        let g = &params.geometry;
        let mut widths = Vec::with_capacity(mesh.n_x_n + mesh.n_x_s + mesh.n_x_p);
        let mut regions = Vec::with_capacity(widths.capacity());
        for (region, n, l) in [
            (Region::Negative, mesh.n_x_n, g.l_n),
            (Region::Separator, mesh.n_x_s, g.l_s),
            (Region::Positive, mesh.n_x_p, g.l_p),
        ] {
            widths.extend(std::iter::repeat_n(l / n as f64, n));
            regions.extend(std::iter::repeat_n(region, n));
        }
        Self {
            widths,
            regions,
            n_n: mesh.n_x_n,
            n_s: mesh.n_x_s,
            n_p: mesh.n_x_p,
        }
    }

    pub fn len(&self) -> usize {
        self.widths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.widths.is_empty()
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    /// Cell index range of one region.
    pub fn range(&self, region: Region) -> std::ops::Range<usize> {
        match region {
            Region::Negative => 0..self.n_n,
            Region::Separator => self.n_n..self.n_n + self.n_s,
            Region::Positive => self.n_n + self.n_s..self.n_n + self.n_s + self.n_p,
        }
    }

    /// Cell centres measured from the anode current collector (m).
    pub fn centers(&self) -> Vec<f64> {
        let mut x = 0.0;
        self.widths
            .iter()
            .map(|h| {
                let c = x + 0.5 * h;
                x += h;
                c
            })
            .collect()
    }

    /// Volume-weighted mean of a cell field over one region.
    pub fn region_mean(&self, field: &[f64], region: Region) -> f64 {
        let r = self.range(region);
        let (num, den) = r.fold((0.0, 0.0), |(num, den), k| {
            (num + field[k] * self.widths[k], den + self.widths[k])
        });
        num / den
    }
}

pub(crate) fn region_porosity(region: Region, state: &CellState, params: &CellParameters) -> f64 {
    match region {
        Region::Negative => state.eps_n,
        Region::Separator => params.electrolyte.separator_porosity,
        Region::Positive => state.eps_p,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveCoefficients {
    pub diffusivity: f64,
    pub conductivity: f64,
}

/// Bruggeman-corrected bulk transport coefficients.
pub fn effective_coefficients(c_e: f64, porosity: f64, params: &CellParameters) -> EffectiveCoefficients {
    let scale = porosity.powf(params.transport.brugg);
    EffectiveCoefficients {
        diffusivity: params.electrolyte_diffusivity(c_e) * scale,
        conductivity: params.electrolyte_conductivity(c_e) * scale,
    }
}

fn check_positive(c_e: &[f64]) -> Result<()> {
    match c_e.iter().position(|&c| !(c > 0.0)) {
        Some(cell) => Err(Error::NonPositiveElectrolyte {
            cell,
            value: c_e[cell],
        }),
        None => Ok(()),
    }
}

/// Harmonic-mean conductance of each interior face, `1 / (h_l/2k_l + h_r/2k_r)`.
fn face_conductances(cell_values: &[f64], widths: &[f64], out: &mut Vec<f64>) {
    out.clear();
    out.extend(
        cell_values
            .windows(2)
            .zip(widths.windows(2))
            .map(|(k, h)| 1.0 / (0.5 * h[0] / k[0] + 0.5 * h[1] / k[1])),
    );
}

/// Per-cell effective value of a bulk correlation; same arithmetic as
/// [`effective_coefficients`] with the temperature and porosity factors
/// computed once.
fn effective_field(
    correlation: &ArrheniusPolynomial,
    state: &CellState,
    params: &CellParameters,
    grid: &ElectrolyteGrid,
) -> Vec<f64> {
    let thermal = params.arrhenius(correlation.activation_energy);
    let scale = |region: Region| region_porosity(region, state, params).powf(params.transport.brugg);
    let scales = [
        scale(Region::Negative),
        scale(Region::Separator),
        scale(Region::Positive),
    ];
    state
        .c_e
        .iter()
        .zip(grid.regions())
        .map(|(&c, &region)| {
            let s = match region {
                Region::Negative => scales[0],
                Region::Separator => scales[1],
                Region::Positive => scales[2],
            };
            correlation.polynomial(c) * thermal * s
        })
        .collect()
}

fn effective_diffusivities(state: &CellState, params: &CellParameters, grid: &ElectrolyteGrid) -> Vec<f64> {
    effective_field(&params.electrolyte.diffusivity, state, params, grid)
}

/// `dc_e/dt` per cell, zero flux at both collectors.
pub fn electrolyte_mass_rhs(
    state: &CellState,
    fluxes: &PoreWallFluxes,
    params: &CellParameters,
    grid: &ElectrolyteGrid,
) -> Result<Vec<f64>> {
    check_positive(&state.c_e)?;
    let d_eff = effective_diffusivities(state, params, grid);
    let mut g = Vec::new();
    face_conductances(&d_eff, grid.widths(), &mut g);
    let source = 1.0 - params.transport.t_plus;
    let n = grid.len();
    let mut rhs = vec![0.0; n];
    for k in 0..n {
        let region = grid.regions()[k];
        let h = grid.widths()[k];
        let mut net = h * source * fluxes.in_region(region);
        if k + 1 < n {
            net += g[k] * (state.c_e[k + 1] - state.c_e[k]);
        }
        if k > 0 {
            net -= g[k - 1] * (state.c_e[k] - state.c_e[k - 1]);
        }
        rhs[k] = net / (region_porosity(region, state, params) * h);
    }
    Ok(rhs)
}

/// Backward-Euler update of `state.c_e` over `dt`, with the diffusion
/// coefficients lagged at the start of the step.
pub(crate) fn implicit_mass_step(
    state: &mut CellState,
    fluxes: &PoreWallFluxes,
    params: &CellParameters,
    grid: &ElectrolyteGrid,
    dt: f64,
) -> Result<()> {
    check_positive(&state.c_e)?;
    let d_eff = effective_diffusivities(state, params, grid);
    let mut g = Vec::new();
    face_conductances(&d_eff, grid.widths(), &mut g);
    let n = grid.len();
    let source = 1.0 - params.transport.t_plus;
    let mut lower = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    for k in 0..n {
        let region = grid.regions()[k];
        let h = grid.widths()[k];
        let mass = region_porosity(region, state, params) * h / dt;
        diag[k] = mass;
        if k > 0 {
            lower[k] = -g[k - 1];
            diag[k] += g[k - 1];
        }
        if k + 1 < n {
            upper[k] = -g[k];
            diag[k] += g[k];
        }
        state.c_e[k] = mass * state.c_e[k] + h * source * fluxes.in_region(region);
    }
    if !tridiag::solve_in_place(&lower, &diag, &upper, &mut state.c_e, &mut scratch) {
        return Err(Error::NonFinite("electrolyte concentration"));
    }
    check_positive(&state.c_e)
}

/// `A_cell * sum(eps_k h_k c_k)` (mol).
pub fn total_electrolyte_lithium(state: &CellState, params: &CellParameters, grid: &ElectrolyteGrid) -> f64 {
    params.geometry.a_cell
        * state
            .c_e
            .iter()
            .zip(grid.widths())
            .zip(grid.regions())
            .map(|((&c, &h), &region)| region_porosity(region, state, params) * h * c)
            .sum::<f64>()
}

/// Electrolyte potential and the derived resistance terms.
///
/// `phi_e` is gauged to zero in the first anode cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ElectrolyteSolution {
    pub phi_e: Vec<f64>,
    /// Ohmic electrolyte resistance from region-mean conductivities (ohm).
    pub r_el: f64,
    /// Concentration (diffusion) overpotential, cathode minus anode (V).
    pub delta_phi_e: f64,
}

impl ElectrolyteSolution {
    pub fn anode_mean(&self, grid: &ElectrolyteGrid) -> f64 {
        grid.region_mean(&self.phi_e, Region::Negative)
    }
}

/// Solves the electrolyte charge balance
/// `d/dx(k_eff dphi/dx) + d/dx(k_D d ln c/dx) + F J = 0`,
/// `k_D = 2 k_eff R T (1 - t+) / F`, with zero current at both collectors.
///
/// The pure-Neumann system is made regular by replacing the first row with
/// the gauge `phi_e[0] = 0`; the dropped row is implied by the others because
/// the sources integrate to zero.
pub fn solve_electrolyte_potential(
    state: &CellState,
    fluxes: &PoreWallFluxes,
    params: &CellParameters,
    grid: &ElectrolyteGrid,
) -> Result<ElectrolyteSolution> {
    check_positive(&state.c_e)?;
    let n = grid.len();
    let f = params.constants.faraday;
    let diffusion_factor = 2.0 * params.thermal_voltage() * (1.0 - params.transport.t_plus);
    let kappa = effective_field(&params.electrolyte.conductivity, state, params, grid);
    if let Some(k) = kappa.iter().position(|&k| !(k > 0.0 && k.is_finite())) {
        return Err(Error::Singular(format!(
            "effective conductivity {} in cell {k}",
            kappa[k]
        )));
    }
    let mut g = Vec::new();
    face_conductances(&kappa, grid.widths(), &mut g);
    let ln_c: Vec<f64> = state.c_e.iter().map(|c| c.ln()).collect();

    let mut lower = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut phi = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    diag[0] = 1.0;
    for k in 1..n {
        let region = grid.regions()[k];
        let mut rhs = -f * fluxes.in_region(region) * grid.widths()[k];
        lower[k] = g[k - 1];
        diag[k] = -g[k - 1];
        rhs += diffusion_factor * g[k - 1] * (ln_c[k] - ln_c[k - 1]);
        if k + 1 < n {
            upper[k] = g[k];
            diag[k] -= g[k];
            rhs -= diffusion_factor * g[k] * (ln_c[k + 1] - ln_c[k]);
        }
        phi[k] = rhs;
    }
    if !tridiag::solve_in_place(&lower, &diag, &upper, &mut phi, &mut scratch) {
        return Err(Error::Singular("zero pivot in potential solve".into()));
    }

    let geometry = &params.geometry;
    let region_kappa = |region: Region| {
        let c_mean = grid.region_mean(&state.c_e, region);
        effective_coefficients(c_mean, region_porosity(region, state, params), params).conductivity
    };
    let r_el = 1.0 / (2.0 * geometry.a_cell)
        * (geometry.l_n / region_kappa(Region::Negative)
            + 2.0 * geometry.l_s / region_kappa(Region::Separator)
            + geometry.l_p / region_kappa(Region::Positive));
    if !r_el.is_finite() || r_el < 0.0 {
        return Err(Error::Singular(format!("electrolyte resistance {r_el}")));
    }
    let delta_phi_e = diffusion_factor * (state.c_e[n - 1] / state.c_e[0]).ln();
    Ok(ElectrolyteSolution {
        phi_e: phi,
        r_el,
        delta_phi_e,
    })
}
