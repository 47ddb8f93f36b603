use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ball_volume, distance};
use crate::potentials::Source;

/// Best ball found by the search; `value` is a lower bound for `M_α f(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximalEstimate {
    pub value: f64,
    pub center: Vec<f64>,
    pub radius: f64,
    /// Relative gain of the last refinement round; small values indicate
    /// the search has settled.
    pub last_gain: f64,
}

/// `sup_{B ∋ x} |B|^{α/n − 1} ∫_B |f|`, searched over balls centred on the
/// line through `x` and the centroid of `|f|`, with radius at least the
/// distance from the centre to `x`. On grid sources radii below one cell
/// width are excluded.
pub fn frac_maximal(src: &Source, x: &[f64], alpha: f64) -> Result<MaximalEstimate> {
    let n = src.dim();
    if !(alpha >= 0.0 && alpha < n as f64) {
        return Err(Error::InvalidParameter(format!("alpha must lie in [0, {n}), got {alpha}")));
    }
    src.check_point(x)?;
    let centroid = src.centroid();
    let offset = distance(x, &centroid);
    let dir: Vec<f64> = if offset > 0.0 {
        centroid.iter().zip(x).map(|(c, xi)| (c - xi) / offset).collect()
    } else {
        let mut e = vec![0.0; n];
        e[0] = 1.0;
        e
    };
    let scale = src.support_radius(&centroid).max(1e-12) + offset;
    // balls much smaller than a cell only see cell centres, not cell volume
    let min_radius = match src {
        Source::Grid(g) => g.grid().spacing(),
        Source::Radial(_) => 0.0,
    };
    let eval = |t: f64, ls: f64| -> (f64, Vec<f64>, f64) {
        let center: Vec<f64> = x.iter().zip(&dir).map(|(xi, d)| xi + t * d).collect();
        let r = (t.abs() + scale * ls.exp()).max(min_radius);
        let mass = src.ball_mass_unchecked(&center, r);
        let value = ball_volume(n, r).powf(alpha / n as f64 - 1.0) * mass;
        (value, center, r)
    };
    // coarse scan in (t, log extra radius)
    let t_max = 2.0 * scale;
    let (ls_lo, ls_hi) = (-14.0, 4f64.ln());
    let steps = 40;
    let mut starts: Vec<(f64, f64, f64)> = Vec::new();
    for i in 0..=steps {
        let t = -t_max + 2.0 * t_max * i as f64 / steps as f64;
        for j in 0..=steps {
            let ls = ls_lo + (ls_hi - ls_lo) * j as f64 / steps as f64;
            starts.push((eval(t, ls).0, t, ls));
        }
    }
    starts.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let mut best = (0.0, 0.0, ls_lo);
    let mut last_gain = 0.0;
    for &(v0, t0, ls0) in starts.iter().take(4) {
        let (mut v, mut t, mut ls) = (v0, t0, ls0);
        let mut dt = t_max / steps as f64;
        let mut dls = (ls_hi - ls_lo) / steps as f64;
        let mut gain = 0.0;
        while dt > 1e-10 * scale && dls > 1e-10 {
            let mut improved = false;
            for (ct, cl) in [(dt, 0.0), (-dt, 0.0), (0.0, dls), (0.0, -dls), (dt, dls), (-dt, -dls), (dt, -dls), (-dt, dls)] {
                let nt = (t + ct).clamp(-t_max, t_max);
                let nl = (ls + cl).clamp(ls_lo - 10.0, ls_hi);
                let nv = eval(nt, nl).0;
                if nv > v {
                    gain = (nv - v) / nv;
                    v = nv;
                    t = nt;
                    ls = nl;
                    improved = true;
                    break;
                }
            }
            if !improved {
                dt *= 0.5;
                dls *= 0.5;
            }
        }
        if v > best.0 {
            best = (v, t, ls);
            last_gain = gain;
        }
    }
    let (value, center, radius) = eval(best.1, best.2);
    Ok(MaximalEstimate {
        value,
        center,
        radius,
        last_gain,
    })
}
