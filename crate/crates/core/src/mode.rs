//! Sampled 1D eigenmode profiles on breakpoint-aligned quadrature grids.

use crate::cx::C64;
use crate::profile::DampingProfile;
use crate::quadrature::SimpsonGrid;

#[derive(Debug, Clone)]
pub struct ModeSamples {
    pub grid: SimpsonGrid,
    pub v: Vec<C64>,
}

impl ModeSamples {
    pub fn new(grid: SimpsonGrid, v: Vec<C64>) -> Self {
        assert_eq!(grid.len(), v.len());
        ModeSamples { grid, v }
    }

    /// integral of |v|^2
    pub fn norm_sq(&self) -> f64 {
        let vals: Vec<f64> = self.v.iter().map(|c| c.norm_sqr()).collect();
        self.grid.integrate(&vals)
    }

    /// integral of b(x) |v(x)|^2; b is sampled with piece-interior abscissae
    /// so jump-aligned grids see one-sided limits
    pub fn damping_quadratic_form(&self, profile: &DampingProfile) -> f64 {
        let vals: Vec<f64> = self
            .grid
            .eval_abscissae()
            .iter()
            .zip(&self.v)
            .map(|(&x, c)| profile.eval(x) * c.norm_sqr())
            .collect();
        self.grid.integrate(&vals)
    }

    /// |Re z + (v, b v) / (2 ||v||^2)|, the Rayleigh identity residual.
    pub fn rayleigh_residual(&self, z: C64, profile: &DampingProfile) -> f64 {
        (z.re + 0.5 * self.damping_quadratic_form(profile) / self.norm_sq()).abs()
    }
}
