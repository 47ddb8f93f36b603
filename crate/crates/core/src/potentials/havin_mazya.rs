use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_finite_or_inf, Error, Result};
use crate::geometry::{distance, norm, omega};
use crate::monotone::MonotoneFn;
use crate::potentials::{check_alpha, riesz, Source};
use crate::quadrature::{integrate_to_infinity, QuadConfig};
use crate::rearrangement::{GridFunction, RadialLift, StepProfile};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HavinMazyaConfig {
    /// uniform radial pieces out to twice the support radius
    pub near_pieces: usize,
    /// geometric radial pieces from there to the far radius
    pub far_pieces: usize,
    /// far radius as a multiple of the near radius
    pub far_factor: f64,
    pub quad: QuadConfig,
}

impl Default for HavinMazyaConfig {
    fn default() -> Self {
        Self {
            near_pieces: 200,
            far_pieces: 200,
            far_factor: 1e3,
            quad: QuadConfig::default(),
        }
    }
}

impl HavinMazyaConfig {
    fn validate(&self) -> Result<()> {
        if self.near_pieces == 0 || self.far_pieces == 0 || !(self.far_factor > 1.0) {
            return Err(Error::InvalidParameter(
                "piece counts must be positive and far_factor must exceed 1".into(),
            ));
        }
        Ok(())
    }
}

/// `I_α ψ(I_α f)(x)` with `I_α f = (n−α)^{-1} ∫ |f(y)| |x−y|^{α−n} dy`.
///
/// The inner potential is sampled (radially for radial sources, at cell
/// centres for grids) up to a far radius; beyond it `I_α f` is replaced by
/// its point-mass asymptotics `M ρ^{α−n}/(n−α)`.
pub fn havin_mazya(src: &Source, x: &[f64], alpha: f64, psi: &MonotoneFn, cfg: &HavinMazyaConfig) -> Result<f64> {
    let n = src.dim();
    check_alpha(alpha, n)?;
    src.check_point(x)?;
    psi.validate()?;
    cfg.validate()?;
    let mass = src.total_mass();
    if mass == 0.0 && psi.apply(0.0) == 0.0 {
        return Ok(0.0);
    }
    if psi.apply(0.0) > 0.0 {
        return Ok(f64::INFINITY);
    }
    let nf = n as f64;
    let far_u = |rho: f64| mass * rho.powf(alpha - nf) / (nf - alpha);
    let far_tail = |from: f64| {
        let shell = nf * omega(n) / (nf - alpha);
        shell * integrate_to_infinity(|rho| psi.apply(far_u(rho)) * rho.powf(alpha - 1.0), from, &cfg.quad)
    };
    let value = match src {
        Source::Radial(lift) => {
            let near = 2.0 * lift.support_radius().max(norm(x)).max(1e-12);
            let far = near * cfg.far_factor;
            let mut edges: Vec<f64> = (1..=cfg.near_pieces)
                .map(|k| near * k as f64 / cfg.near_pieces as f64)
                .collect();
            let ratio = cfg.far_factor.powf(1.0 / cfg.far_pieces as f64);
            for k in 1..=cfg.far_pieces {
                edges.push(if k == cfg.far_pieces { far } else { near * ratio.powi(k as i32) });
            }
            let mids: Vec<f64> = edges
                .iter()
                .enumerate()
                .map(|(k, &b)| 0.5 * (b + if k == 0 { 0.0 } else { edges[k - 1] }))
                .collect();
            let outer = mids
                .par_iter()
                .map(|&m| {
                    let mut y = vec![0.0; n];
                    y[0] = m;
                    riesz(src, &y, alpha).map(|u| psi.apply(u))
                })
                .collect::<Result<Vec<f64>>>()?;
            let mut values = Vec::with_capacity(outer.len());
            let mut running = f64::INFINITY;
            for v in outer {
                if !v.is_finite() {
                    return Ok(f64::INFINITY);
                }
                running = running.min(v);
                values.push(running);
            }
            let ends: Vec<f64> = edges.iter().map(|&r| omega(n) * r.powi(n as i32)).collect();
            let g = Source::from(RadialLift::new(StepProfile::new(ends, values)?, n)?);
            riesz(&g, x, alpha)? + far_tail(far)
        }
        Source::Grid(gs) => {
            let grid = gs.grid();
            let centroid = src.centroid();
            // largest ball about the centroid inside the grid box
            let inscribed = (0..n)
                .map(|i| {
                    let lo = grid.origin()[i];
                    let hi = lo + grid.shape()[i] as f64 * grid.spacing();
                    (centroid[i] - lo).min(hi - centroid[i])
                })
                .fold(f64::INFINITY, f64::min);
            if !(inscribed > 0.0) {
                return Err(Error::InvalidGrid("grid box has no interior around the centroid".into()));
            }
            let values = (0..grid.len())
                .into_par_iter()
                .map(|i| {
                    let c = grid.center(i);
                    if distance(&c, &centroid) >= inscribed {
                        return Ok(0.0);
                    }
                    riesz(src, &c, alpha).map(|u| psi.apply(u))
                })
                .collect::<Result<Vec<f64>>>()?;
            if values.iter().any(|v| !v.is_finite()) {
                return Ok(f64::INFINITY);
            }
            let g = GridFunction::new(grid.shape().to_vec(), grid.spacing(), grid.origin().to_vec(), values)?;
            riesz(&Source::from(g), x, alpha)? + far_tail(inscribed)
        }
    };
    check_finite_or_inf(value, "havin-maz'ya potential")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{gauss_kronrod, integrate_to_infinity};
    use std::f64::consts::PI;

    // I_1 of the unit-ball indicator in R³ at distance d, by direct radial
    // integration of the kernel averaged over spheres.
    fn inner_oracle(d: f64) -> f64 {
        let cfg = QuadConfig::default();
        let f = |rho: f64| rho * ((d + rho) / (d - rho).abs()).ln();
        let v = if d < 1.0 {
            gauss_kronrod(f, 0.0, d, &cfg).value + gauss_kronrod(f, d, 1.0, &cfg).value
        } else {
            gauss_kronrod(f, 0.0, 1.0, &cfg).value
        };
        0.5 * (2.0 * PI / d) * v
    }

    #[test]
    fn identity_on_unit_ball() {
        let cfg = QuadConfig::default();
        let expected = 2.0 * PI
            * (gauss_kronrod(inner_oracle, 1e-9, 1.0, &cfg).value
                + gauss_kronrod(inner_oracle, 1.0, 4.0, &cfg).value
                + integrate_to_infinity(inner_oracle, 4.0, &cfg));
        let src = Source::from(RadialLift::new(StepProfile::indicator(omega(3), 1.0).unwrap(), 3).unwrap());
        let v = havin_mazya(&src, &[0.0; 3], 1.0, &MonotoneFn::identity(), &HavinMazyaConfig::default()).unwrap();
        assert!((v - expected).abs() < 0.02 * expected, "{v} {expected}");
    }

    #[test]
    fn zero_source() {
        let src = Source::from(RadialLift::new(StepProfile::zero(), 3).unwrap());
        let v = havin_mazya(&src, &[0.0; 3], 1.0, &MonotoneFn::power(0.5), &HavinMazyaConfig::default()).unwrap();
        assert_eq!(v, 0.0);
    }
}
