//! Wolff-type, Riesz and Havin–Maz'ya potentials, the fractional maximal
//! operator, and the finiteness test for potentials of compactly supported
//! functions.

mod finiteness;
mod havin_mazya;
mod maximal;
mod source;

pub use finiteness::{finiteness_check, near_zero_exponent, Finiteness};
pub use havin_mazya::{havin_mazya, HavinMazyaConfig};
pub use maximal::{frac_maximal, MaximalEstimate};
pub use source::{GridSource, Source};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_finite_or_inf, Error, Result};
use crate::geometry::omega;
use crate::monotone::MonotoneFn;
use crate::quadrature::{gauss_kronrod, integrate_from_zero, integrate_to_infinity, QuadConfig};
use source::MassProfile;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialParams {
    pub alpha: f64,
    pub psi: MonotoneFn,
    /// Upper limit `R` of the outer integral; `None` means `∞`.
    #[serde(default)]
    pub truncation: Option<f64>,
    #[serde(default)]
    pub quad: QuadConfig,
}

impl PotentialParams {
    pub fn new(alpha: f64, psi: MonotoneFn) -> Self {
        Self {
            alpha,
            psi,
            truncation: None,
            quad: QuadConfig::default(),
        }
    }

    pub fn truncated(mut self, r: f64) -> Self {
        self.truncation = Some(r);
        self
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        check_alpha(self.alpha, n)?;
        if let Some(r) = self.truncation {
            if !(r > 0.0) {
                return Err(Error::InvalidParameter(format!("truncation radius must be positive, got {r}")));
            }
        }
        if !(self.quad.rel_tol > 0.0) || self.quad.max_intervals == 0 {
            return Err(Error::InvalidParameter("quadrature tolerances must be positive".into()));
        }
        self.psi.validate()
    }
}

pub(crate) fn check_alpha(alpha: f64, n: usize) -> Result<()> {
    if !(alpha > 0.0 && alpha < n as f64) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, {n}), got {alpha}")));
    }
    Ok(())
}

// Gauss–Legendre, 3 points on [−1, 1].
const GL3_X: f64 = 0.774_596_669_241_483_4;
const GL3_W: [f64; 2] = [5.0 / 9.0, 8.0 / 9.0];

/// `∫_a^b f` over geometric sub-chunks of ratio at most 1.05, three
/// Gauss points each.
fn gl3_log(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    if a <= 0.0 {
        return f64::NAN;
    }
    let chunks = ((b / a).ln() / 0.05f64.ln_1p()).ceil().max(1.0) as usize;
    let ratio = (b / a).powf(1.0 / chunks as f64);
    let mut lo = a;
    let mut total = 0.0;
    for k in 0..chunks {
        let hi = if k + 1 == chunks { b } else { lo * ratio };
        let c = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        total += h * (GL3_W[0] * (f(c - h * GL3_X) + f(c + h * GL3_X)) + GL3_W[1] * f(c));
        lo = hi;
    }
    total
}

/// Pieces of the outer `r`-integral, shared by every potential.
struct Outer<'k> {
    /// integrand as a function of `(r, mass of B(x, r))`
    kernel: &'k (dyn Fn(f64, f64) -> f64 + Sync),
    /// exact `∫_a^b kernel(r, m) dr` for constant `m`, when known
    exact: Option<&'k (dyn Fn(f64, f64, f64) -> f64 + Sync)>,
    /// `∫_a^∞ kernel(r, m) dr` for constant `m`
    tail: &'k (dyn Fn(f64, f64) -> f64 + Sync),
}

impl Outer<'_> {
    fn piece(&self, a: f64, b: f64, m: f64, cfg: &QuadConfig) -> f64 {
        if !(b > a) {
            return 0.0;
        }
        match self.exact {
            Some(ex) => ex(a, b, m),
            None => {
                let k = self.kernel;
                let v = gl3_log(&|r| k(r, m), a, b);
                if v.is_nan() {
                    gauss_kronrod(|r| k(r, m), a, b, cfg).value
                } else {
                    v
                }
            }
        }
    }

    fn integrate(&self, prof: &MassProfile<'_>, upper: f64, cfg: &QuadConfig) -> f64 {
        let kernel = self.kernel;
        let mut total;
        let mut start;
        match prof {
            MassProfile::Steps {
                n,
                local,
                inner,
                radii,
                masses,
            } => {
                let w = omega(*n) * local;
                let first = inner.min(upper);
                total = integrate_from_zero(|r| kernel(r, w * r.powi(*n as i32)), first, cfg);
                if upper <= *inner || !total.is_finite() {
                    return total;
                }
                start = *inner;
                let mut m = 0.0;
                for (k, &rad) in radii.iter().enumerate() {
                    let end = rad.min(upper);
                    total += self.piece(start, end, m, cfg);
                    if rad >= upper {
                        return total;
                    }
                    start = rad;
                    m = masses[k];
                }
            }
            MassProfile::Radial { kinks, .. } => {
                let mut pts: Vec<f64> = kinks.iter().copied().filter(|&k| k < upper).collect();
                let full = prof.full_radius();
                if full < upper {
                    if pts.last() != Some(&full) && full > 0.0 {
                        pts.push(full);
                    }
                } else {
                    pts.push(upper);
                }
                total = 0.0;
                start = 0.0;
                for &p in &pts {
                    let f = |r: f64| kernel(r, prof.mass(r));
                    total += if start == 0.0 {
                        integrate_from_zero(f, p, cfg)
                    } else {
                        gauss_kronrod(f, start, p, cfg).value
                    };
                    if !total.is_finite() {
                        return total;
                    }
                    start = p;
                }
                if start >= upper {
                    return total;
                }
            }
        }
        let m = prof.total();
        if upper.is_finite() {
            return total + self.piece(start, upper, m, cfg);
        }
        if start == 0.0 {
            // empty source: the whole half-line carries zero mass
            let head = integrate_from_zero(|r| kernel(r, 0.0), 1.0, cfg);
            return head + (self.tail)(1.0, 0.0);
        }
        total + (self.tail)(start, m)
    }
}

fn wolff_kernel(alpha: f64, n: usize, psi: &MonotoneFn) -> impl Fn(f64, f64) -> f64 + Sync + '_ {
    move |r: f64, m: f64| {
        let arg = r.powf(alpha - n as f64) * m;
        let v = psi.apply(arg);
        if v == 0.0 {
            0.0
        } else {
            r.powf(alpha - 1.0) * v
        }
    }
}

/// `∫₀^R r^{α−1} ψ(r^{α−n} ∫_{B(x,r)} |f|) dr`, with `R = ∞` unless the
/// parameters set a truncation. Divergent potentials evaluate to `∞`.
pub fn wolff(src: &Source, x: &[f64], params: &PotentialParams) -> Result<f64> {
    let n = src.dim();
    params.validate(n)?;
    src.check_point(x)?;
    let upper = params.truncation.unwrap_or(f64::INFINITY);
    let prof = src.mass_profile(x);
    let total = prof.total();
    if upper.is_infinite() && total > 0.0 && finiteness_check(&params.psi, params.alpha, n) == Finiteness::Infinite {
        return Ok(f64::INFINITY);
    }
    if total == 0.0 {
        // ∫₀^R r^{α−1} ψ(0) dr
        let at_zero = params.psi.apply(0.0);
        return Ok(if at_zero == 0.0 {
            0.0
        } else {
            at_zero * upper.powf(params.alpha) / params.alpha
        });
    }
    let kernel = wolff_kernel(params.alpha, n, &params.psi);
    let cfg = params.quad;
    let tail = |a: f64, m: f64| integrate_to_infinity(|r| kernel(r, m), a, &cfg);
    let outer = Outer {
        kernel: &kernel,
        exact: None,
        tail: &tail,
    };
    check_finite_or_inf(outer.integrate(&prof, upper, &cfg), "wolff potential")
}

/// [`wolff`] with the outer integral cut at `r`.
pub fn wolff_truncated(src: &Source, x: &[f64], params: &PotentialParams, r: f64) -> Result<f64> {
    if r == 0.0 {
        return Ok(0.0);
    }
    wolff(src, x, &params.clone().truncated(r))
}

/// `∫₀^R r^{α−n−1} ∫_{B(x,r)} |f| dr`, `R = ∞` by default.
pub fn riesz_with(src: &Source, x: &[f64], alpha: f64, upper: Option<f64>, cfg: &QuadConfig) -> Result<f64> {
    let n = src.dim();
    check_alpha(alpha, n)?;
    src.check_point(x)?;
    let upper = upper.unwrap_or(f64::INFINITY);
    if !(upper > 0.0) {
        return Err(Error::InvalidParameter(format!("truncation radius must be positive, got {upper}")));
    }
    let e = alpha - n as f64;
    if let Source::Grid(g) = src {
        return check_finite_or_inf(grid_riesz(g, x, alpha, upper), "riesz potential");
    }
    let kernel = move |r: f64, m: f64| if m == 0.0 { 0.0 } else { r.powf(e - 1.0) * m };
    let exact = move |a: f64, b: f64, m: f64| m * (a.powf(e) - b.powf(e)) / -e;
    let tail = move |a: f64, m: f64| m * a.powf(e) / -e;
    let prof = src.mass_profile(x);
    let outer = Outer {
        kernel: &kernel,
        exact: Some(&exact),
        tail: &tail,
    };
    let value = outer.integrate(&prof, upper, cfg);
    check_finite_or_inf(value, "riesz potential")
}

/// Riesz potential of a grid source as a direct kernel sum: each cell at
/// distance `d` contributes `w ∫_{max(d, h/4)}^R r^{α−n−1} dr`, and the cell
/// containing `x` adds the local piece `ω_n v (h/4)^α / α`.
fn grid_riesz(g: &GridSource, x: &[f64], alpha: f64, upper: f64) -> f64 {
    let n = g.grid().dim();
    let e = alpha - n as f64;
    let inner = 0.25 * g.grid().spacing();
    let far = if upper.is_finite() { upper.powf(e) } else { 0.0 };
    let mut total = 0.0;
    for (c, w) in g.cells() {
        let d = crate::geometry::distance(c, x).max(inner);
        if d < upper {
            total += w * (d.powf(e) - far) / -e;
        }
    }
    let local = g.grid().value_at(x).abs();
    total + omega(n) * local * inner.min(upper).powf(alpha) / alpha
}

pub fn riesz(src: &Source, x: &[f64], alpha: f64) -> Result<f64> {
    riesz_with(src, x, alpha, None, &QuadConfig::default())
}

pub fn riesz_truncated(src: &Source, x: &[f64], alpha: f64, r: f64) -> Result<f64> {
    if r == 0.0 {
        return Ok(0.0);
    }
    riesz_with(src, x, alpha, Some(r), &QuadConfig::default())
}

/// [`wolff`] at many points, in parallel.
pub fn wolff_many(src: &Source, points: &[Vec<f64>], params: &PotentialParams) -> Result<Vec<f64>> {
    points.par_iter().map(|x| wolff(src, x, params)).collect()
}

impl Source {
    /// The source `c · f`.
    pub fn scale(&self, c: f64) -> Result<Source> {
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::InvalidParameter(format!("scale must be finite and >= 0, got {c}")));
        }
        Ok(match self {
            Source::Grid(g) => Source::from(g.grid().scale(c)),
            Source::Radial(l) => Source::from(crate::rearrangement::RadialLift::new(l.profile().scale(c)?, l.dim())?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rearrangement::{GridFunction, RadialLift, StepProfile};
    use std::f64::consts::PI;

    fn ball(n: usize) -> Source {
        Source::from(RadialLift::new(StepProfile::indicator(omega(n), 1.0).unwrap(), n).unwrap())
    }

    #[test]
    fn ball_mass_examples() {
        let s = ball(2);
        assert!((s.ball_mass(&[0.0, 0.0], 2.0).unwrap() - PI).abs() < 1e-14);
        assert_eq!(s.ball_mass(&[1.5, 0.0], 0.5).unwrap(), 0.0);
        let lens = s.ball_mass(&[1.0, 0.0], 1.0).unwrap();
        assert!((lens - (2.0 * PI / 3.0 - 3f64.sqrt() / 2.0)).abs() < 1e-12);
        assert!(s.ball_mass(&[0.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn wolff_examples() {
        let s = ball(3);
        let p = PotentialParams::new(1.0, MonotoneFn::identity());
        let w = wolff(&s, &[0.0; 3], &p).unwrap();
        assert!((w - 2.0 * PI).abs() < 1e-8, "{w}");
        let wr = wolff_truncated(&s, &[0.0; 3], &p, 1.0).unwrap();
        assert!((wr - 2.0 * PI / 3.0).abs() < 1e-9, "{wr}");
        assert_eq!(wolff_truncated(&s, &[0.0; 3], &p, 0.0).unwrap(), 0.0);
        let p4 = PotentialParams::new(1.0, MonotoneFn::power(1.0 / 3.0));
        assert_eq!(wolff(&s, &[0.3, 0.0, 0.0], &p4).unwrap(), f64::INFINITY);
    }

    #[test]
    fn riesz_examples() {
        let r3 = riesz(&ball(3), &[0.0; 3], 1.0).unwrap();
        assert!((r3 - 2.0 * PI).abs() < 1e-9);
        let r2 = riesz(&ball(2), &[0.0; 2], 1.0).unwrap();
        assert!((r2 - 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn grid_riesz_matches_direct_kernel_sum() {
        let g = GridFunction::centered(2, 24, 1.2, |x| (1.0 - x[0] * x[0] - x[1] * x[1]).max(0.0)).unwrap();
        let s = Source::from(g.clone());
        let x = [0.31, -0.17];
        let alpha = 0.7;
        let direct: f64 = g
            .weighted_centers()
            .iter()
            .map(|(c, w)| w * crate::geometry::distance(c, &x).max(0.25 * g.spacing()).powf(alpha - 2.0) / (2.0 - alpha))
            .sum();
        let local = g.value_at(&x);
        let inner = 0.25 * g.spacing();
        let expected = direct + omega(2) * local * inner.powf(alpha) / alpha;
        let got = riesz(&s, &x, alpha).unwrap();
        assert!((got - expected).abs() < 1e-10 * expected, "{got} {expected}");
        let w = wolff(&s, &x, &PotentialParams::new(alpha / 2.0, MonotoneFn::identity())).unwrap();
        assert!((w - got).abs() < 1e-6 * got, "{w} {got}");
    }

    #[test]
    fn zero_source() {
        let s = Source::from(RadialLift::new(StepProfile::zero(), 3).unwrap());
        let p = PotentialParams::new(1.0, MonotoneFn::power(0.5));
        assert_eq!(wolff(&s, &[0.1, 0.0, 0.0], &p).unwrap(), 0.0);
        assert_eq!(riesz(&s, &[0.1, 0.0, 0.0], 1.0).unwrap(), 0.0);
    }
}
