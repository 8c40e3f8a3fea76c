use serde::{Deserialize, Serialize};

/// Numerical knobs shared by every inexact operation.
///
/// Exact operations on trigonometric polynomials never consult these; only
/// sampling, projection, Newton inversion and ODE integration do.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Settings {
    /// Highest retained Fourier mode after a projection.
    pub degree_cap: usize,
    pub eps_coeff: f64,
    pub eps_proj: f64,
    pub newton_max_iter: usize,
    /// RK4 steps per unit of flow time.
    pub flow_steps_per_unit: usize,
    /// Nodes used by the Thurston-Bott quadrature.
    pub bott_nodes: usize,
    pub wronskian_tol: f64,
    pub periodicity_tol: f64,
    pub tangency_tol: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            degree_cap: 64,
            eps_coeff: 1e-12,
            eps_proj: 1e-9,
            newton_max_iter: 100,
            flow_steps_per_unit: 1024,
            bott_nodes: 1024,
            wronskian_tol: 1e-8,
            periodicity_tol: 1e-6,
            tangency_tol: 1e-10,
        }
    }
}

impl Settings {
    /// Sample count of the projection grid, `4 * degree_cap` rounded up to a power of two.
    pub fn grid_size(&self) -> usize {
        (4 * self.degree_cap.max(4)).next_power_of_two()
    }
}
