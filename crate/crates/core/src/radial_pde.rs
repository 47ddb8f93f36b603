//! Radial solutions of `−div(g(|Du|) Du/|Du|) = f` in a ball with zero
//! boundary values, and the two-sided comparison with the truncated Wolff
//! potential `∫₀^R g⁻¹(r^{1−n} ∫_{B(x,r)} f) dr`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::omega;
use crate::monotone::MonotoneFn;
use crate::nfunction::{NFunction, NFunctionSpec};
use crate::potentials::{wolff, PotentialParams, Source};
use crate::quadrature::{gauss_kronrod, QuadConfig};
use crate::rearrangement::{RadialLift, StepProfile};
use crate::verifier::fit::{estimate_constant, extreme_ratio, BoundDirection};

/// Datum `f(x) = profile(|x|)` on the ball `B(0, domain_radius)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialProblem {
    pub n: usize,
    pub g: NFunctionSpec,
    /// datum as a non-increasing step function of the radius
    pub f: StepProfile,
    pub domain_radius: f64,
}

impl RadialProblem {
    pub fn new(n: usize, g: NFunctionSpec, f: StepProfile, domain_radius: f64) -> Result<Self> {
        let p = Self { n, g, f, domain_radius };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParameter(format!("dimension must be at least 2, got {}", self.n)));
        }
        if !(self.domain_radius > 0.0 && self.domain_radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "domain radius must be positive and finite, got {}",
                self.domain_radius
            )));
        }
        NFunction::from_spec(&self.g).map(|_| ())
    }

    /// The datum restricted to the domain, as a function on `ℝⁿ`.
    pub fn source(&self) -> Result<Source> {
        let w = omega(self.n);
        let f = self.f.truncate(self.domain_radius);
        let ends: Vec<f64> = f.ends().iter().map(|r| w * r.powi(self.n as i32)).collect();
        Ok(Source::from(RadialLift::new(StepProfile::new(ends, f.values().to_vec())?, self.n)?))
    }

    /// `s^{1−n} ∫₀^s τ^{n−1} f(τ) dτ`, exact on steps.
    pub fn flux(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        let n = self.n as i32;
        let s = s.min(self.domain_radius);
        let mut acc = 0.0;
        for (a, b, v) in self.f.pieces() {
            if a >= s {
                break;
            }
            acc += v * (b.min(s).powi(n) - a.powi(n));
        }
        acc / self.n as f64 / s.powi(n - 1)
    }
}

/// `u(r) = ∫_r^{R_dom} g⁻¹(flux(s)) ds` at each requested radius; radii
/// beyond the domain give 0.
pub fn solve_radial(prob: &RadialProblem, radii: &[f64]) -> Result<Vec<f64>> {
    prob.validate()?;
    if radii.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return Err(Error::InvalidParameter("radii must be finite and >= 0".into()));
    }
    let ginv = NFunction::from_spec(&prob.g)?.derivative_inverse_fn();
    let cfg = QuadConfig {
        rel_tol: 1e-12,
        ..QuadConfig::default()
    };
    let rd = prob.domain_radius;
    let mut order: Vec<usize> = (0..radii.len()).collect();
    order.sort_by(|&a, &b| radii[b].partial_cmp(&radii[a]).unwrap());
    let mut out = vec![0.0; radii.len()];
    let mut acc = 0.0;
    let mut from = rd;
    let integrand = |s: f64| ginv.apply(prob.flux(s));
    for i in order {
        let to = radii[i].min(rd);
        if to < from {
            let mut pts: Vec<f64> = prob.f.ends().iter().copied().filter(|&e| e > to && e < from).collect();
            pts.push(to);
            pts.insert(0, from);
            for w in pts.windows(2) {
                acc += gauss_kronrod(integrand, w[1], w[0], &cfg).value;
            }
            from = to;
        }
        out[i] = acc;
    }
    Ok(out)
}

/// `W^R f(x)` with `x = (r, 0, …, 0)`.
pub fn truncated_wolff(prob: &RadialProblem, r: f64, big_r: f64) -> Result<f64> {
    let g = NFunction::from_spec(&prob.g)?;
    let params = PotentialParams::new(1.0, g.derivative_inverse_fn()).truncated(big_r);
    let mut x = vec![0.0; prob.n];
    x[0] = r;
    wolff(&prob.source()?, &x, &params)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    pub radius: f64,
    pub big_r: f64,
    pub u: f64,
    pub wolff: f64,
    /// `inf_{B(x,R)} u`, read off at the outermost point of the ball
    pub inf_u: f64,
    /// `u − C_L (W − R)` at the fitted constant
    pub lower_slack: f64,
    /// `C_U (inf u + W + R) − u` at the fitted constant
    pub upper_slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub rows: Vec<EstimateRow>,
    /// largest dyadic `C_L` with `C_L (W − R) ≤ u` on every row
    pub c_lower: f64,
    /// smallest dyadic `C_U` with `u ≤ C_U (inf u + W + R)` on every row
    pub c_upper: f64,
    /// raw extreme ratios behind the dyadic fits
    pub raw_lower: Option<f64>,
    pub raw_upper: Option<f64>,
}

/// Compares `u` with `W^R f` at the points `(r, 0, …)` for each `R`.
pub fn estimate_check(prob: &RadialProblem, radii: &[f64], big_rs: &[f64]) -> Result<EstimateReport> {
    prob.validate()?;
    if radii.is_empty() || big_rs.is_empty() {
        return Err(Error::EmptyInput("estimate sweep"));
    }
    if big_rs.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::InvalidParameter("sweep radii must be positive".into()));
    }
    let rd = prob.domain_radius;
    let cases: Vec<(f64, f64)> = radii.iter().flat_map(|&r| big_rs.iter().map(move |&br| (r, br))).collect();
    let outer: Vec<f64> = cases.iter().map(|&(r, br)| (r + br).min(rd)).collect();
    let u_at = solve_radial(prob, radii)?;
    let u_outer = solve_radial(prob, &outer)?;
    let wolffs = cases
        .par_iter()
        .map(|&(r, br)| truncated_wolff(prob, r, br))
        .collect::<Result<Vec<f64>>>()?;
    let mut lo_l = Vec::new();
    let mut lo_r = Vec::new();
    let mut up_l = Vec::new();
    let mut up_r = Vec::new();
    for (k, &(_, br)) in cases.iter().enumerate() {
        let u = u_at[k / big_rs.len()];
        lo_l.push(u);
        lo_r.push((wolffs[k] - br).max(0.0));
        up_l.push(u);
        up_r.push(u_outer[k] + wolffs[k] + br);
    }
    let c_lower = estimate_constant(&lo_l, &lo_r, BoundDirection::Lower)?;
    let c_upper = estimate_constant(&up_l, &up_r, BoundDirection::Upper)?;
    let rows = cases
        .iter()
        .enumerate()
        .map(|(k, &(r, br))| EstimateRow {
            radius: r,
            big_r: br,
            u: lo_l[k],
            wolff: wolffs[k],
            inf_u: u_outer[k],
            lower_slack: lo_l[k] - c_lower * (wolffs[k] - br),
            upper_slack: c_upper * up_r[k] - up_l[k],
        })
        .collect();
    Ok(EstimateReport {
        rows,
        c_lower,
        c_upper,
        raw_lower: extreme_ratio(&lo_l, &lo_r, BoundDirection::Lower)?,
        raw_upper: extreme_ratio(&up_l, &up_r, BoundDirection::Upper)?,
    })
}

/// `g⁻¹` of a problem, for callers assembling their own potentials.
pub fn inverse_derivative(prob: &RadialProblem) -> Result<MonotoneFn> {
    Ok(NFunction::from_spec(&prob.g)?.derivative_inverse_fn())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant(n: usize, p: f64, rd: f64) -> RadialProblem {
        RadialProblem::new(n, NFunctionSpec::Power { p }, StepProfile::indicator(rd, 1.0).unwrap(), rd).unwrap()
    }

    #[test]
    fn poisson_closed_forms() {
        let radii: Vec<f64> = (0..100).map(|k| k as f64 / 99.0).collect();
        let u = solve_radial(&constant(3, 2.0, 1.0), &radii).unwrap();
        let err = radii
            .iter()
            .zip(&u)
            .map(|(r, v)| (v - (1.0 - r * r) / 6.0).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
        let u0 = solve_radial(&constant(2, 2.0, 1.0), &[0.0]).unwrap()[0];
        assert!((u0 - 0.25).abs() < 1e-12);
        let u0 = solve_radial(&constant(3, 3.0, 1.0), &[0.0]).unwrap()[0];
        assert!((u0 - 2.0 / (3.0 * 3f64.sqrt())).abs() < 1e-10, "{u0}");
    }

    #[test]
    fn origin_ratio_matches_power_law() {
        for p in [2.0, 3.0] {
            for rd in [0.25, 0.5, 1.0] {
                let prob = constant(3, p, rd);
                let u0 = solve_radial(&prob, &[0.0]).unwrap()[0];
                let w = truncated_wolff(&prob, 0.0, rd).unwrap();
                let expected = (3.0 * omega(3)).powf(-1.0 / (p - 1.0));
                assert!((u0 / w - expected).abs() < 1e-6 * expected, "p={p} R={rd}: {}", u0 / w);
            }
        }
    }

    #[test]
    fn zero_datum() {
        let prob = RadialProblem::new(3, NFunctionSpec::Power { p: 2.0 }, StepProfile::zero(), 1.0).unwrap();
        assert_eq!(solve_radial(&prob, &[0.0, 0.5]).unwrap(), vec![0.0, 0.0]);
        let rep = estimate_check(&prob, &[0.0, 0.5], &[0.1, 0.2]).unwrap();
        assert!(rep.rows.iter().all(|r| r.lower_slack >= 0.0 && r.upper_slack >= 0.0));
    }

    #[test]
    fn estimate_slacks_are_nonnegative() {
        let f = StepProfile::new(vec![0.3, 0.8], vec![4.0, 1.0]).unwrap();
        let prob = RadialProblem::new(3, NFunctionSpec::Power { p: 2.5 }, f, 1.0).unwrap();
        let rep = estimate_check(&prob, &[0.0, 0.2, 0.5], &[0.125, 0.25, 0.5]).unwrap();
        assert!(rep.c_lower > 0.0 && rep.c_upper.is_finite());
        assert!(rep.rows.iter().all(|r| r.lower_slack >= 0.0 && r.upper_slack >= 0.0), "{rep:?}");
    }
}
