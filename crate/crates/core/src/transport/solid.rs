use crate::params::CellParameters;
use crate::tridiag;

/// Equal-thickness spherical shells, centre first.
#[derive(Debug, Clone, PartialEq)]
pub struct ShellGrid {
    radius: f64,
    dr: f64,
    /// `r^2` at the outer face of each shell.
    outer_area: Vec<f64>,
    /// `(r_out^3 - r_in^3) / 3`.
    volume: Vec<f64>,
}

impl ShellGrid {
    pub fn new(radius: f64, shells: usize) -> Self {
        let dr = radius / shells as f64;
        let outer_area = (1..=shells).map(|k| (k as f64 * dr).powi(2)).collect();
        let volume = (0..shells)
            .map(|k| {
                let r_in = k as f64 * dr;
                let r_out = (k + 1) as f64 * dr;
                (r_out.powi(3) - r_in.powi(3)) / 3.0
            })
            .collect();
        Self {
            radius,
            dr,
            outer_area,
            volume,
        }
    }

    pub fn len(&self) -> usize {
        self.volume.len()
    }

    pub fn is_empty(&self) -> bool {
        self.volume.is_empty()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn volumes(&self) -> &[f64] {
        &self.volume
    }

    /// Lithium per steradian, `sum(V_k c_k)`.
    pub fn total(&self, c: &[f64]) -> f64 {
        c.iter().zip(&self.volume).map(|(c, v)| c * v).sum()
    }

    /// Volume-averaged concentration.
    pub fn average(&self, c: &[f64]) -> f64 {
        self.total(c) / (self.radius.powi(3) / 3.0)
    }

    /// Backward-Euler step with inward surface flux `surface_flux`
    /// (`D dc/dr` at `r = R`, mol/(m2 s)).
    pub fn implicit_step(&self, c: &mut [f64], surface_flux: f64, diffusivity: f64, dt: f64) -> bool {
        let n = self.len();
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        let mut scratch = vec![0.0; n];
        let g = diffusivity / self.dr;
        for k in 0..n {
            let mass = self.volume[k] / dt;
            diag[k] = mass;
            if k > 0 {
                let gk = g * self.outer_area[k - 1];
                lower[k] = -gk;
                diag[k] += gk;
            }
            if k + 1 < n {
                let gk = g * self.outer_area[k];
                upper[k] = -gk;
                diag[k] += gk;
            }
            c[k] *= mass;
        }
        c[n - 1] += self.outer_area[n - 1] * surface_flux;
        tridiag::solve_in_place(&lower, &diag, &upper, c, &mut scratch)
    }
}

/// `dc/dt` per shell for `dc/dt = r^-2 d/dr(r^2 D dc/dr)` with symmetry at
/// the centre and `D dc/dr = surface_flux` at the surface.
pub fn solid_diffusion_rhs(c: &[f64], surface_flux: f64, diffusivity: f64, grid: &ShellGrid) -> Vec<f64> {
    let n = grid.len();
    let g = diffusivity / grid.dr;
    (0..n)
        .map(|k| {
            let mut net = if k + 1 < n {
                g * grid.outer_area[k] * (c[k + 1] - c[k])
            } else {
                grid.outer_area[k] * surface_flux
            };
            if k > 0 {
                net -= g * grid.outer_area[k - 1] * (c[k] - c[k - 1]);
            }
            net / grid.volume[k]
        })
        .collect()
}

/// Surface value by quadratic extrapolation of the three outer shell
/// averages.
pub fn surface_concentration(c: &[f64]) -> f64 {
    let n = c.len();
    (15.0 * c[n - 1] - 10.0 * c[n - 2] + 3.0 * c[n - 3]) / 8.0
}

/// Inward anode surface flux: the applied current plus the lithium consumed
/// by the side reactions, spread over the total active area.
pub fn anode_surface_flux(current: f64, j_sei: f64, j_pl: f64, a_t_n: f64, params: &CellParameters) -> f64 {
    let g = &params.geometry;
    (-current + g.l_n * g.a_cell * (j_sei + j_pl)) / (a_t_n * g.a_cell * params.constants.faraday * g.l_n)
}

pub fn cathode_surface_flux(current: f64, a_t_p: f64, params: &CellParameters) -> f64 {
    let g = &params.geometry;
    current / (a_t_p * g.a_cell * params.constants.faraday * g.l_p)
}
