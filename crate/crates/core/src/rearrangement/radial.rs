use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{lens_volume, norm, omega};
use crate::rearrangement::{GridFunction, StepProfile};

/// Radially decreasing function `f(x) = f*(ω_n |x|ⁿ)` built from a profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialLift {
    profile: StepProfile,
    n: usize,
}

impl RadialLift {
    pub fn new(profile: StepProfile, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        Ok(Self { profile, n })
    }

    pub fn profile(&self) -> &StepProfile {
        &self.profile
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Radius of the ball of measure `t`.
    pub fn radius_of_measure(&self, t: f64) -> f64 {
        (t / omega(self.n)).powf(1.0 / self.n as f64)
    }

    pub fn measure_of_radius(&self, r: f64) -> f64 {
        omega(self.n) * r.powi(self.n as i32)
    }

    /// Level-set radii `ρ_k = (t_k / ω_n)^{1/n}`.
    pub fn radii(&self) -> Vec<f64> {
        self.profile.ends().iter().map(|&t| self.radius_of_measure(t)).collect()
    }

    /// Value at distance `r` from the origin.
    pub fn eval_radius(&self, r: f64) -> f64 {
        // compare radii rather than measures so that the level sets are
        // exactly the balls B(0, ρ_k)
        let radii = self.radii();
        let k = radii.partition_point(|&rho| rho <= r);
        self.profile.values().get(k).copied().unwrap_or(0.0)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.eval_radius(norm(x))
    }

    /// `∫_{B(0, r)} f = ∫₀^{ω_n rⁿ} f*`.
    pub fn centered_mass(&self, r: f64) -> f64 {
        self.profile.primitive(self.measure_of_radius(r))
    }

    /// `∫_{B(x, r)} f` with `d = |x|`, as the layer-cake sum
    /// `Σ (v_k − v_{k+1}) |B(0, ρ_k) ∩ B(x, r)|`.
    pub fn ball_mass(&self, d: f64, r: f64) -> f64 {
        let values = self.profile.values();
        let radii = self.radii();
        let mut total = 0.0;
        for k in 0..values.len() {
            let next = values.get(k + 1).copied().unwrap_or(0.0);
            let jump = values[k] - next;
            if jump > 0.0 {
                total += jump * lens_volume(self.n, d, r, radii[k]);
            }
        }
        total
    }

    pub fn support_radius(&self) -> f64 {
        self.radius_of_measure(self.profile.support())
    }

    /// Samples the lift at the centres of a centred grid.
    pub fn to_grid(&self, cells: usize, half_width: f64) -> Result<GridFunction> {
        if !(1..=3).contains(&self.n) {
            return Err(Error::InvalidGrid(format!("grids support n <= 3, got {}", self.n)));
        }
        GridFunction::centered(self.n, cells, half_width, |x| self.eval(x))
    }
}
