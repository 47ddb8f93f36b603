//! Ball volumes and ball–ball intersection volumes.

use std::f64::consts::PI;

use crate::quadrature::{gauss_kronrod, QuadConfig};

/// Volume of the unit ball in `ℝⁿ`.
pub fn omega(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / n as f64 * omega(n - 2),
    }
}

/// Volume of a ball of radius `r` in `ℝⁿ`.
pub fn ball_volume(n: usize, r: f64) -> f64 {
    omega(n) * r.powi(n as i32)
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Volume of `B(0, rho) ∩ B(x, r)` in `ℝⁿ`, where `d = |x|`.
pub fn lens_volume(n: usize, d: f64, r: f64, rho: f64) -> f64 {
    if r <= 0.0 || rho <= 0.0 || d >= r + rho {
        return 0.0;
    }
    let (small, large) = if r < rho { (r, rho) } else { (rho, r) };
    if d + small <= large {
        return ball_volume(n, small);
    }
    // cancellation can push tiny lenses slightly outside [0, |small ball|]
    let v = match n {
        1 => (rho.min(d + r) - (-rho).max(d - r)).max(0.0),
        2 => {
            let a1 = ((d * d + rho * rho - r * r) / (2.0 * d * rho)).clamp(-1.0, 1.0).acos();
            let a2 = ((d * d + r * r - rho * rho) / (2.0 * d * r)).clamp(-1.0, 1.0).acos();
            let k = ((-d + rho + r) * (d + rho - r) * (d - rho + r) * (d + rho + r)).max(0.0);
            rho * rho * a1 + r * r * a2 - 0.5 * k.sqrt()
        }
        3 => {
            let s = rho + r - d;
            PI * s * s * (d * d + 2.0 * d * (rho + r) - 3.0 * (rho - r) * (rho - r)) / (12.0 * d)
        }
        _ => lens_by_sections(n, d, r, rho),
    };
    v.clamp(0.0, ball_volume(n, small))
}

fn lens_by_sections(n: usize, d: f64, r: f64, rho: f64) -> f64 {
    // slices orthogonal to the line of centres; the two caps meet at `cut`
    let cut = (d * d + rho * rho - r * r) / (2.0 * d);
    let w = omega(n - 1);
    let e = 0.5 * (n as f64 - 1.0);
    let cfg = QuadConfig {
        rel_tol: 1e-12,
        ..QuadConfig::default()
    };
    let lo = (d - r).max(-rho);
    let hi = rho.min(d + r);
    let cap_a = gauss_kronrod(|x| w * (r * r - (x - d) * (x - d)).max(0.0).powf(e), lo, cut.clamp(lo, hi), &cfg);
    let cap_b = gauss_kronrod(|x| w * (rho * rho - x * x).max(0.0).powf(e), cut.clamp(lo, hi), hi, &cfg);
    cap_a.value + cap_b.value
}
