//! Dyadic constant fitting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundDirection {
    /// `lhs ≤ C · rhs`, fit the smallest `C`
    Upper,
    /// `c · rhs ≤ lhs`, fit the largest `c`
    Lower,
}

/// Ratios within this relative distance of a power of two are rounding
/// noise and fit to that power.
pub const SNAP_TOL: f64 = 1e-12;

fn snapped(x: f64) -> Option<f64> {
    let c = 2f64.powi(x.log2().round() as i32);
    ((x - c).abs() <= SNAP_TOL * c).then_some(c)
}

/// Smallest power of two `≥ x` up to [`SNAP_TOL`] (`x > 0`).
pub fn dyadic_ceil(x: f64) -> f64 {
    if let Some(c) = snapped(x) {
        return c;
    }
    let mut c = 2f64.powi(x.log2().ceil() as i32);
    if c < x {
        c *= 2.0;
    }
    c
}

/// Largest power of two `≤ x` up to [`SNAP_TOL`] (`x > 0`).
pub fn dyadic_floor(x: f64) -> f64 {
    if let Some(c) = snapped(x) {
        return c;
    }
    let mut c = 2f64.powi(x.log2().floor() as i32);
    if c > x {
        c *= 0.5;
    }
    c
}

/// Raw extreme ratio over the samples: `max lhs/rhs` for upper bounds,
/// `min lhs/rhs` for lower bounds. Samples with `lhs = rhs = 0` are
/// ignored; `None` when nothing constrains the constant.
pub fn extreme_ratio(lhs: &[f64], rhs: &[f64], dir: BoundDirection) -> Result<Option<f64>> {
    if lhs.len() != rhs.len() {
        return Err(Error::InvalidParameter("lhs and rhs sample counts differ".into()));
    }
    if lhs.is_empty() {
        return Err(Error::EmptyInput("constant fit samples"));
    }
    let mut out: Option<f64> = None;
    for (&l, &r) in lhs.iter().zip(rhs) {
        if l.is_nan() || r.is_nan() || l < 0.0 || r < 0.0 {
            return Err(Error::InvalidParameter(format!("samples must be non-negative numbers, got {l}, {r}")));
        }
        let ratio = match dir {
            BoundDirection::Upper if l == 0.0 => continue,
            BoundDirection::Lower if r == 0.0 => continue,
            _ => l / r,
        };
        out = Some(match (out, dir) {
            (None, _) => ratio,
            (Some(o), BoundDirection::Upper) => o.max(ratio),
            (Some(o), BoundDirection::Lower) => o.min(ratio),
        });
    }
    Ok(out)
}

/// Power-of-two constant satisfying every sample: the smallest `C` with
/// `lhs ≤ C·rhs`, or the largest `c` with `c·rhs ≤ lhs`. An unconstrained
/// fit returns 1; an upper fit against a zero right side returns `∞`, a
/// lower fit with a zero left side returns 0.
pub fn estimate_constant(lhs: &[f64], rhs: &[f64], dir: BoundDirection) -> Result<f64> {
    Ok(match extreme_ratio(lhs, rhs, dir)? {
        None => 1.0,
        Some(r) if r.is_infinite() => f64::INFINITY,
        Some(0.0) => 0.0,
        Some(r) => match dir {
            BoundDirection::Upper => dyadic_ceil(r),
            BoundDirection::Lower => dyadic_floor(r),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let r = [1.0, 2.0, 3.0];
        assert_eq!(estimate_constant(&r, &r, BoundDirection::Upper).unwrap(), 1.0);
        let l = [2.0, 4.0, 6.0];
        assert_eq!(estimate_constant(&l, &r, BoundDirection::Upper).unwrap(), 2.0);
        assert_eq!(estimate_constant(&[2.5, 1.0], &[1.0, 1.0], BoundDirection::Upper).unwrap(), 4.0);
        assert_eq!(estimate_constant(&[2.5, 1.0], &[1.0, 1.0], BoundDirection::Lower).unwrap(), 1.0);
        assert_eq!(estimate_constant(&[0.3], &[1.0], BoundDirection::Lower).unwrap(), 0.25);
        assert_eq!(estimate_constant(&[0.0], &[0.0], BoundDirection::Upper).unwrap(), 1.0);
        assert!(estimate_constant(&[], &[], BoundDirection::Upper).is_err());
    }

    #[test]
    fn dyadic_rounding_is_exact_on_powers() {
        for k in -20..20 {
            let x = 2f64.powi(k);
            assert_eq!(dyadic_ceil(x), x);
            assert_eq!(dyadic_floor(x), x);
            assert_eq!(dyadic_ceil(x * 1.1), 2.0 * x);
        }
    }
}
