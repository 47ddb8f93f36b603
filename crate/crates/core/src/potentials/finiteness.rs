use serde::{Deserialize, Serialize};

use crate::monotone::MonotoneFn;
use crate::quadrature::{integrate_to_infinity, QuadConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Finiteness {
    Finite,
    Infinite,
    Unknown,
}

/// Exponent `ρ` with `ψ(t) ≈ c t^ρ` as `t → 0`, read off log-slopes over
/// decades down to `1e-80`; `None` when the slopes do not settle.
pub fn near_zero_exponent(psi: &MonotoneFn) -> Option<f64> {
    let ts: Vec<f64> = (4..=40).map(|k| 10f64.powi(-2 * k)).collect();
    let vals: Vec<f64> = ts.iter().map(|&t| psi.apply(t)).collect();
    if vals.iter().any(|v| *v == 0.0 || !v.is_finite()) {
        return None;
    }
    let slopes: Vec<f64> = ts
        .windows(2)
        .zip(vals.windows(2))
        .map(|(t, v)| (v[0] / v[1]).ln() / (t[0] / t[1]).ln())
        .collect();
    let last = &slopes[slopes.len() - 6..];
    let lo = last.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = last.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo < 0.02 {
        Some(*last.last().unwrap())
    } else {
        None
    }
}

/// Whether `∫^∞ ψ(t^{1 − n/α}) dt` converges, i.e. whether the potential of a
/// compactly supported function with positive mass is finite.
///
/// Power-like `ψ` with exponent `ρ` at zero: finite iff `ρ(1 − n/α) < −1`.
/// Otherwise the tail is probed numerically.
pub fn finiteness_check(psi: &MonotoneFn, alpha: f64, n: usize) -> Finiteness {
    let decay = 1.0 - n as f64 / alpha;
    if psi.apply(0.0) > 0.0 {
        return Finiteness::Infinite;
    }
    // ψ vanishing on an initial interval makes the tail vanish eventually
    if psi.apply(1e-300) == 0.0 {
        return Finiteness::Finite;
    }
    if let Some(rho) = near_zero_exponent(psi) {
        let e = rho * decay;
        if e < -1.0 - 1e-3 {
            return Finiteness::Finite;
        }
        if e > -1.0 + 1e-3 {
            return Finiteness::Infinite;
        }
    }
    let cfg = QuadConfig {
        rel_tol: 1e-6,
        max_octaves: 200,
        ..QuadConfig::default()
    };
    let probe = integrate_to_infinity(|t| psi.apply(t.powf(decay)), 1.0, &cfg);
    if probe.is_infinite() {
        Finiteness::Infinite
    } else if probe.is_finite() {
        // a borderline exponent with a convergent probe is still undecided
        // unless the cut-off stabilised well before the octave cap
        let shorter = integrate_to_infinity(
            |t| psi.apply(t.powf(decay)),
            1.0,
            &QuadConfig {
                max_octaves: 100,
                ..cfg
            },
        );
        if (probe - shorter).abs() <= 1e-3 * probe.abs() {
            Finiteness::Finite
        } else {
            Finiteness::Unknown
        }
    } else {
        Finiteness::Unknown
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(finiteness_check(&MonotoneFn::power(1.0), 1.0, 3), Finiteness::Finite);
        assert_eq!(finiteness_check(&MonotoneFn::power(1.0 / 3.0), 1.0, 3), Finiteness::Infinite);
        assert_eq!(finiteness_check(&MonotoneFn::Zero, 1.0, 3), Finiteness::Finite);
    }

    #[test]
    fn exponent_of_inverse_zygmund_derivative() {
        let g = MonotoneFn::ZygmundDerivative { p: 3.0, alpha: 1.0, s: 10.0 };
        let rho = near_zero_exponent(&MonotoneFn::inverse_of(g)).unwrap();
        assert!((rho - 0.5).abs() < 1e-3, "{rho}");
    }

    #[test]
    fn plateau_at_zero() {
        let t = MonotoneFn::table(vec![0.5, 1.0], vec![0.0, 2.0]).unwrap();
        assert_eq!(finiteness_check(&t, 1.0, 3), Finiteness::Finite);
        let pos = MonotoneFn::table(vec![1.0], vec![1.0]).unwrap();
        assert_eq!(finiteness_check(&pos, 1.0, 3), Finiteness::Infinite);
    }
}
