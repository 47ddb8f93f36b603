//! One-dimensional side of the reduction principle: the Hardy-type
//! reduction operator, the rearrangement bound for Wolff potentials and the
//! two classical Hardy inequalities.

use serde::{Deserialize, Serialize};

use crate::error::{check_finite_or_inf, Error, Result};
use crate::monotone::MonotoneFn;
use crate::potentials::check_alpha;
use crate::quadrature::{gauss_kronrod, integrate_from_zero, integrate_to_infinity, power_integral, QuadConfig};
use crate::rearrangement::StepProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LowerLimit {
    /// integrate from `t`
    #[default]
    Full,
    /// integrate from `t/2`
    Half,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReductionParams {
    pub alpha: f64,
    pub n: usize,
    pub psi: MonotoneFn,
    #[serde(default)]
    pub lower: LowerLimit,
    /// upper limit `L` of the outer integral
    #[serde(with = "crate::io::extended", default = "infinite")]
    pub upper: f64,
    #[serde(default)]
    pub quad: QuadConfig,
}

fn infinite() -> f64 {
    f64::INFINITY
}

impl ReductionParams {
    pub fn new(alpha: f64, n: usize, psi: MonotoneFn) -> Self {
        Self {
            alpha,
            n,
            psi,
            lower: LowerLimit::Full,
            upper: f64::INFINITY,
            quad: QuadConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha, self.n)?;
        if !(self.upper > 0.0) {
            return Err(Error::InvalidParameter(format!("upper limit must be positive, got {}", self.upper)));
        }
        self.psi.validate()
    }

    fn beta(&self) -> f64 {
        self.alpha / self.n as f64
    }
}

/// `∫_{lo}^{hi} s^{β−1} ψ(c s^{β−1} ∫₀^s φ) ds` split at the steps of `φ`.
fn outer(phi: &StepProfile, beta: f64, psi: &MonotoneFn, c: f64, lo: f64, hi: f64, cfg: &QuadConfig) -> f64 {
    if !(hi > lo) {
        return 0.0;
    }
    let f = |s: f64| {
        let v = psi.apply(c * s.powf(beta - 1.0) * phi.primitive(s));
        if v == 0.0 {
            0.0
        } else {
            s.powf(beta - 1.0) * v
        }
    };
    let mut pts: Vec<f64> = vec![lo];
    pts.extend(phi.ends().iter().copied().filter(|&e| e > lo && e < hi));
    let mut total = 0.0;
    for w in pts.windows(2) {
        total += if w[0] == 0.0 {
            integrate_from_zero(f, w[1], cfg)
        } else {
            gauss_kronrod(f, w[0], w[1], cfg).value
        };
    }
    let last = *pts.last().unwrap();
    total += if hi.is_infinite() {
        if last == 0.0 {
            integrate_from_zero(f, 1.0, cfg) + integrate_to_infinity(f, 1.0, cfg)
        } else {
            integrate_to_infinity(f, last, cfg)
        }
    } else if last == 0.0 {
        integrate_from_zero(f, hi, cfg)
    } else {
        gauss_kronrod(f, last, hi, cfg).value
    };
    total
}

/// `∫_{t or t/2}^{L} s^{α/n−1} ψ(s^{α/n−1} ∫₀^s φ) ds`.
pub fn reduction_op(phi: &StepProfile, params: &ReductionParams, t: f64) -> Result<f64> {
    params.validate()?;
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("t must be positive, got {t}")));
    }
    let lo = match params.lower {
        LowerLimit::Full => t,
        LowerLimit::Half => 0.5 * t,
    };
    let v = outer(phi, params.beta(), &params.psi, 1.0, lo, params.upper, &params.quad);
    check_finite_or_inf(v, "reduction operator")
}

/// `∫_t^∞ s^{α/n−1} ψ(C s^{α/n} f**(s)) ds`, the right side of the
/// rearrangement estimate for `(W f)*(t)` up to the outer constant.
pub fn rhs_rearrangement_bound(
    f_star: &StepProfile,
    alpha: f64,
    n: usize,
    psi: &MonotoneFn,
    inner: f64,
    t: f64,
    cfg: &QuadConfig,
) -> Result<f64> {
    check_alpha(alpha, n)?;
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("t must be positive, got {t}")));
    }
    if !(inner > 0.0 && inner.is_finite()) {
        return Err(Error::InvalidParameter(format!("inner constant must be positive, got {inner}")));
    }
    // s^β f**(s) = s^{β−1} ∫₀^s f*
    let v = outer(f_star, alpha / n as f64, psi, inner, t, f64::INFINITY, cfg);
    check_finite_or_inf(v, "rearrangement bound")
}

/// `∫₀^{upper} s^{α/n−1} ψ(C s^{α/n} f**(s)) ds`, the size of a truncated
/// potential in terms of the rearrangement.
pub fn head_bound(
    f_star: &StepProfile,
    alpha: f64,
    n: usize,
    psi: &MonotoneFn,
    inner: f64,
    upper: f64,
    cfg: &QuadConfig,
) -> Result<f64> {
    check_alpha(alpha, n)?;
    if !(upper > 0.0) {
        return Err(Error::InvalidParameter(format!("upper limit must be positive, got {upper}")));
    }
    let v = outer(f_star, alpha / n as f64, psi, inner, 0.0, upper, cfg);
    check_finite_or_inf(v, "head bound")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardyReport {
    pub lhs: f64,
    /// right side including the constant
    pub rhs: f64,
    pub constant: f64,
    pub holds: bool,
}

fn report(lhs: f64, weighted: f64, constant: f64) -> HardyReport {
    let rhs = constant * weighted;
    HardyReport {
        lhs,
        rhs,
        constant,
        holds: lhs <= rhs * (1.0 + 1e-12) || rhs.is_infinite(),
    }
}

// ∫_a^b t^p (x + y/t)^q dt, with x + y/t ≥ 0 on (a, b); exact for small
// integer q.
fn mixed_piece(p: f64, q: f64, x: f64, y: f64, a: f64, b: f64, cfg: &QuadConfig) -> f64 {
    if q == q.round() && q <= 4.0 {
        let q = q as i32;
        let mut total = 0.0;
        let mut binom = 1.0;
        for j in 0..=q {
            let coef = binom * x.powi(q - j) * y.powi(j);
            if coef != 0.0 {
                total += coef * power_integral(p - j as f64, a, b);
            }
            binom = binom * (q - j) as f64 / (j + 1) as f64;
        }
        return total.max(0.0);
    }
    let f = |t: f64| t.powf(p) * (x + y / t).max(0.0).powf(q);
    match (a == 0.0, b.is_infinite()) {
        (true, _) => integrate_from_zero(f, b, cfg),
        (false, true) => integrate_to_infinity(f, a, cfg),
        _ => gauss_kronrod(f, a, b, cfg).value,
    }
}

// ∫₀^∞ t^p φ(t)^q dt
fn weighted_power(phi: &StepProfile, p: f64, q: f64) -> f64 {
    phi.pieces().map(|(a, b, v)| v.powf(q) * power_integral(p, a, b)).sum()
}

fn check_q(q: f64) -> Result<()> {
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::InvalidParameter(format!("q must be finite and >= 1, got {q}")));
    }
    Ok(())
}

/// `∫₀^∞ t^p ((1/t)∫₀^t φ)^q dt ≤ (q/(q−p−1))^q ∫₀^∞ t^p φ^q dt`, for
/// `p < q − 1`, on a non-increasing step function `φ`.
pub fn hardy1_check(phi: &StepProfile, p: f64, q: f64) -> Result<HardyReport> {
    check_q(q)?;
    if !(p < q - 1.0) {
        return Err(Error::InvalidParameter(format!("first Hardy inequality needs p < q - 1, got p = {p}, q = {q}")));
    }
    let cfg = QuadConfig::default();
    let mut lhs = 0.0;
    let mut mass = 0.0;
    for (a, b, v) in phi.pieces() {
        lhs += mixed_piece(p, q, v, mass - v * a, a, b, &cfg);
        mass += v * (b - a);
    }
    if mass > 0.0 {
        lhs += mixed_piece(p, q, 0.0, mass, phi.support(), f64::INFINITY, &cfg);
    }
    let constant = (q / (q - p - 1.0)).powf(q);
    Ok(report(lhs, weighted_power(phi, p, q), constant))
}

/// `∫₀^∞ t^p ((1/t)∫_t^∞ φ)^q dt ≤ (q/(p+1−q))^q ∫₀^∞ t^p φ^q dt`, for
/// `p > q − 1`.
pub fn hardy2_check(phi: &StepProfile, p: f64, q: f64) -> Result<HardyReport> {
    check_q(q)?;
    if !(p > q - 1.0) {
        return Err(Error::InvalidParameter(format!("second Hardy inequality needs p > q - 1, got p = {p}, q = {q}")));
    }
    let cfg = QuadConfig::default();
    let total = phi.total_mass();
    let mut lhs = 0.0;
    for (a, b, v) in phi.pieces() {
        // ∫_t^∞ φ = (∫_b^∞ φ + v b) − v t on (a, b)
        let after = total - phi.primitive(b);
        lhs += mixed_piece(p, q, -v, after + v * b, a, b, &cfg);
    }
    let constant = (q / (p + 1.0 - q)).powf(q);
    Ok(report(lhs, weighted_power(phi, p, q), constant))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> StepProfile {
        StepProfile::indicator(1.0, 1.0).unwrap()
    }

    #[test]
    fn reduction_examples() {
        let params = ReductionParams::new(0.5, 2, MonotoneFn::identity());
        let v = reduction_op(&unit(), &params, 1.0).unwrap();
        assert!((v - 2.0).abs() < 1e-8, "{v}");
        let v = reduction_op(&unit(), &params, 1e-12).unwrap();
        assert!((v - 4.0).abs() < 1e-5, "{v}");
        assert_eq!(reduction_op(&StepProfile::zero(), &params, 1.0).unwrap(), 0.0);
        assert!(reduction_op(&unit(), &params, 0.0).is_err());
    }

    #[test]
    fn half_lower_limit_and_finite_upper() {
        let mut params = ReductionParams::new(0.5, 2, MonotoneFn::identity());
        params.lower = LowerLimit::Half;
        params.upper = 4.0;
        // ∫_1^4 s^{-3/2} ds = 1
        let v = reduction_op(&unit(), &params, 2.0).unwrap();
        assert!((v - 1.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn rearrangement_bound_examples() {
        let cfg = QuadConfig::default();
        let v = rhs_rearrangement_bound(&unit(), 1.0, 3, &MonotoneFn::identity(), 1.0, 1.0, &cfg).unwrap();
        assert!((v - 3.0).abs() < 1e-8, "{v}");
        let p = StepProfile::new(vec![0.5, 2.0], vec![3.0, 1.0]).unwrap();
        let params = ReductionParams::new(1.0, 3, MonotoneFn::identity());
        for t in [0.1, 0.7, 3.0] {
            let a = rhs_rearrangement_bound(&p, 1.0, 3, &MonotoneFn::identity(), 1.0, t, &cfg).unwrap();
            let b = reduction_op(&p, &params, t).unwrap();
            assert!((a - b).abs() < 1e-12 * b, "{a} {b}");
        }
    }

    #[test]
    fn hardy_examples() {
        let r = hardy1_check(&unit(), 0.0, 2.0).unwrap();
        assert!((r.lhs - 2.0).abs() < 1e-12 && (r.rhs - 4.0).abs() < 1e-12 && r.holds, "{r:?}");
        let r = hardy2_check(&unit(), 1.0, 1.0).unwrap();
        assert!((r.lhs - 0.5).abs() < 1e-12 && (r.rhs - 0.5).abs() < 1e-12 && r.holds, "{r:?}");
        for r in [
            hardy1_check(&StepProfile::zero(), 0.0, 2.0).unwrap(),
            hardy2_check(&StepProfile::zero(), 1.0, 1.0).unwrap(),
        ] {
            assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
            assert!(r.holds);
        }
        assert!(hardy1_check(&unit(), 1.0, 2.0).is_err());
        assert!(hardy2_check(&unit(), 0.5, 2.0).is_err());
    }

    #[test]
    fn fractional_q_matches_quadrature() {
        let p = StepProfile::new(vec![0.3, 1.0, 2.5], vec![2.0, 1.5, 0.2]).unwrap();
        let r = hardy1_check(&p, 0.2, 2.5).unwrap();
        let cfg = QuadConfig::default();
        let direct = integrate_from_zero(|t| t.powf(0.2) * p.maximal(t).powf(2.5), 1.0, &cfg)
            + gauss_kronrod(|t| t.powf(0.2) * p.maximal(t).powf(2.5), 1.0, 2.5, &cfg).value
            + integrate_to_infinity(|t| t.powf(0.2) * p.maximal(t).powf(2.5), 2.5, &cfg);
        assert!((r.lhs - direct).abs() < 1e-7 * direct, "{} {direct}", r.lhs);
        assert!(r.holds);
    }
}
