//! Rearrangement-invariant norms and modulars, all evaluated on decreasing
//! rearrangements. Grid inputs are rearranged first; the Morrey-type norms
//! are the exception, since they are not rearrangement invariant.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_finite_or_inf, Error, Result};
use crate::geometry::distance;
use crate::monotone::MonotoneFn;
use crate::nfunction::NFunction;
use crate::quadrature::{gauss_kronrod, integrate_from_zero, power_integral, QuadConfig};
use crate::rearrangement::{GridFunction, StepProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LorentzVariant {
    /// weighted by `f*`
    Star,
    /// weighted by `f**`
    DoubleStar,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LorentzParams {
    pub p: f64,
    #[serde(with = "crate::io::extended")]
    pub q: f64,
    pub variant: LorentzVariant,
    /// measure of the underlying domain; `∞` for the whole space
    #[serde(with = "crate::io::extended", default = "infinite")]
    pub domain_measure: f64,
}

fn infinite() -> f64 {
    f64::INFINITY
}

impl LorentzParams {
    pub fn new(p: f64, q: f64, variant: LorentzVariant) -> Self {
        Self {
            p,
            q,
            variant,
            domain_measure: f64::INFINITY,
        }
    }

    pub fn on_domain(mut self, measure: f64) -> Self {
        self.domain_measure = measure;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p.is_finite()) {
            return Err(Error::InvalidParameter(format!("lorentz p must lie in (0, inf), got {}", self.p)));
        }
        if !(self.q > 0.0) {
            return Err(Error::InvalidParameter(format!("lorentz q must lie in (0, inf], got {}", self.q)));
        }
        if !(self.domain_measure > 0.0) {
            return Err(Error::InvalidParameter("domain measure must be positive".into()));
        }
        Ok(())
    }

    /// Whether the quasi-norm is a Banach function norm.
    pub fn is_banach(&self) -> bool {
        match self.variant {
            LorentzVariant::Star => 1.0 <= self.q && self.q <= self.p,
            LorentzVariant::DoubleStar => self.p >= 1.0 && self.q >= 1.0,
        }
    }
}

/// `‖s^{1/p − 1/q} f*(s)‖_{L^q(0, |Ω|)}`, or the same with `f**`.
pub fn lorentz_norm(prof: &StepProfile, params: &LorentzParams) -> Result<f64> {
    params.validate()?;
    let dom = params.domain_measure;
    let prof = if dom.is_finite() { prof.truncate(dom) } else { prof.clone() };
    if prof.is_empty() {
        return Ok(0.0);
    }
    let LorentzParams { p, q, .. } = *params;
    let value = match (params.variant, q.is_infinite()) {
        (LorentzVariant::Star, false) => {
            let e = q / p;
            prof.pieces()
                .map(|(a, b, v)| v.powf(q) * (b.powf(e) - a.powf(e)) / e)
                .sum::<f64>()
                .powf(1.0 / q)
        }
        (LorentzVariant::Star, true) => prof
            .pieces()
            .map(|(_, b, v)| v * b.powf(1.0 / p))
            .fold(0.0, f64::max),
        (LorentzVariant::DoubleStar, false) => double_star_integral(&prof, p, q, dom)?.powf(1.0 / q),
        (LorentzVariant::DoubleStar, true) => double_star_sup(&prof, p, dom),
    };
    check_finite_or_inf(value, "lorentz norm")
}

// ∫₀^D s^{q/p − 1} f**(s)^q ds. On the step (a, b) with value v,
// f**(s) = v + c/s with c = ∫₀^a f* − v a.
fn double_star_integral(prof: &StepProfile, p: f64, q: f64, dom: f64) -> Result<f64> {
    let cfg = QuadConfig {
        rel_tol: 1e-12,
        ..QuadConfig::default()
    };
    let e = q / p - 1.0;
    let mut total = 0.0;
    let mut mass = 0.0;
    for (a, b, v) in prof.pieces() {
        let c = mass - v * a;
        total += if a == 0.0 {
            v.powf(q) * b.powf(e + 1.0) / (e + 1.0)
        } else {
            gauss_kronrod(|s| s.powf(e) * (v + c / s).powf(q), a, b, &cfg).value
        };
        mass += v * (b - a);
    }
    let support = prof.support();
    if dom > support {
        // f** = M/s beyond the support
        let k = e - q;
        let tail = if dom.is_infinite() {
            if k >= -1.0 {
                f64::INFINITY
            } else {
                support.powf(k + 1.0) / -(k + 1.0)
            }
        } else if (k + 1.0).abs() < 1e-14 {
            (dom / support).ln()
        } else {
            (dom.powf(k + 1.0) - support.powf(k + 1.0)) / (k + 1.0)
        };
        total += mass.powf(q) * tail;
    }
    Ok(total)
}

// sup over (0, D) of s^{1/p} f**(s): endpoints of each step plus the interior
// critical point of s^{1/p}(v + c/s).
fn double_star_sup(prof: &StepProfile, p: f64, dom: f64) -> f64 {
    let r = 1.0 / p;
    let mut best: f64 = 0.0;
    let mut mass = 0.0;
    for (a, b, v) in prof.pieces() {
        let c = mass - v * a;
        let h = |s: f64| s.powf(r) * (v + c / s);
        best = best.max(h(b));
        if a > 0.0 {
            best = best.max(h(a));
        }
        if p > 1.0 && v > 0.0 {
            let crit = c * (p - 1.0) / v;
            if crit > a && crit < b {
                best = best.max(h(crit));
            }
        }
        mass += v * (b - a);
    }
    let support = prof.support();
    if dom > support {
        // s^{1/p − 1} M beyond the support
        let tail = if p < 1.0 {
            mass * dom.powf(r - 1.0)
        } else {
            mass * support.powf(r - 1.0)
        };
        best = best.max(tail);
    }
    best
}

/// `inf{λ > 0 : modular(λ) ≤ 1}` for a modular non-increasing in `λ`;
/// relative accuracy 1e-12. `∞` when no `λ` up to 1e300 works.
pub fn luxemburg_by(modular: impl Fn(f64) -> f64) -> f64 {
    let mut hi = 1.0;
    while !(modular(hi) <= 1.0) {
        hi *= 2.0;
        if hi > 1e300 {
            return f64::INFINITY;
        }
    }
    let mut lo = hi;
    while modular(lo) <= 1.0 {
        lo *= 0.5;
        if lo < 1e-300 {
            return 0.0;
        }
    }
    // modular(lo) > 1 ≥ modular(hi)
    while hi / lo - 1.0 > 1e-13 {
        let mid = (lo * hi).sqrt();
        if modular(mid) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `∫ A(f*/λ)` over the steps of a profile.
pub fn orlicz_modular(a: &NFunction, prof: &StepProfile, lambda: f64) -> f64 {
    prof.pieces().map(|(s, e, v)| (e - s) * a.value(v / lambda)).sum()
}

/// Luxemburg norm `inf{λ : ∫ A(|f|/λ) ≤ 1}`.
pub fn luxemburg_norm(a: &NFunction, prof: &StepProfile) -> Result<f64> {
    if prof.is_empty() {
        return Ok(0.0);
    }
    check_finite_or_inf(luxemburg_by(|l| orlicz_modular(a, prof, l)), "luxemburg norm")
}

/// `t log(e + t)`.
pub fn llogl_modular_fn(t: f64) -> f64 {
    t * (std::f64::consts::E + t).ln()
}

/// Luxemburg norm for the modular `t log(e + t)`.
pub fn llogl_norm(prof: &StepProfile) -> Result<f64> {
    if prof.is_empty() {
        return Ok(0.0);
    }
    let modular = |l: f64| prof.pieces().map(|(s, e, v)| (e - s) * llogl_modular_fn(v / l)).sum::<f64>();
    check_finite_or_inf(luxemburg_by(modular), "L log L norm")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Domain,
    Target,
}

/// `T f = ∫₀^∞ s^σ H(s^ρ f*(s)) ds`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModularFunctional {
    pub h: MonotoneFn,
    pub sigma: f64,
    pub rho: f64,
    pub side: Side,
}

impl ModularFunctional {
    pub fn new(h: MonotoneFn, sigma: f64, rho: f64, side: Side) -> Self {
        Self { h, sigma, rho, side }
    }
}

/// Value of a modular functional on a profile; `∞` on divergence.
pub fn modular(t: &ModularFunctional, prof: &StepProfile) -> Result<f64> {
    t.h.validate()?;
    let h0 = t.h.apply(0.0);
    let cfg = QuadConfig::default();
    let sig = t.sigma;
    let mut total = 0.0;
    for (a, b, v) in prof.pieces() {
        let piece = if t.rho == 0.0 {
            let hv = t.h.apply(v);
            if hv == 0.0 {
                0.0
            } else {
                hv * power_integral(sig, a, b)
            }
        } else {
            let f = |s: f64| s.powf(sig) * t.h.apply(s.powf(t.rho) * v);
            if a == 0.0 {
                integrate_from_zero(f, b, &cfg)
            } else {
                gauss_kronrod(f, a, b, &cfg).value
            }
        };
        total += piece;
        if !total.is_finite() {
            return check_finite_or_inf(total, "modular");
        }
    }
    if h0 > 0.0 {
        // H(0) > 0 integrated against s^σ over an infinite range
        return Ok(f64::INFINITY);
    }
    check_finite_or_inf(total, "modular")
}

/// Value of a Morrey-type supremum over a finite ball family, together with
/// the value on the next finer family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MorreyEstimate {
    pub value: f64,
    pub refined: f64,
    pub center_spacing: f64,
    pub max_radius: f64,
    /// relative change under refinement below 5%
    pub stable: bool,
}

/// Morrey norm `sup R^{(θ−n)/q} ‖f‖_{L^q(B(x₀,R))}` over a lattice of
/// centres in the grid window and dyadic radii up to `4·diam(supp f)`.
/// The value is a lower bound for the supremum over all balls.
pub fn morrey_norm(f: &GridFunction, q: f64, theta: f64) -> Result<MorreyEstimate> {
    check_morrey(f, q, theta)?;
    let exp = (theta - f.dim() as f64) / q;
    let cell = f.cell_volume();
    morrey_sup(f, exp, &|vals: &mut Vec<f64>| {
        Ok((vals.iter().map(|v| v.powf(q)).sum::<f64>() * cell).powf(1.0 / q))
    })
}

/// Lorentz–Morrey norm `sup R^{(θ−n)/t} ‖(f 1_{B_R})*‖_{Λ^{t,q}}` on the same
/// ball family as [`morrey_norm`].
pub fn lorentz_morrey_norm(f: &GridFunction, t: f64, q: f64, theta: f64) -> Result<MorreyEstimate> {
    check_morrey(f, t.max(1.0), theta)?;
    let params = LorentzParams::new(t, q, LorentzVariant::Star);
    params.validate()?;
    let exp = (theta - f.dim() as f64) / t;
    let cell = f.cell_volume();
    morrey_sup(f, exp, &|vals: &mut Vec<f64>| {
        vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let ends: Vec<f64> = (1..=vals.len()).map(|k| k as f64 * cell).collect();
        lorentz_norm(&StepProfile::new(ends, vals.clone())?, &params)
    })
}

fn check_morrey(f: &GridFunction, q: f64, theta: f64) -> Result<()> {
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::InvalidParameter(format!("q must be finite and >= 1, got {q}")));
    }
    if !(0.0..=f.dim() as f64).contains(&theta) {
        return Err(Error::InvalidParameter(format!("theta must lie in [0, {}], got {theta}", f.dim())));
    }
    Ok(())
}

type BallNorm<'a> = dyn Fn(&mut Vec<f64>) -> Result<f64> + Sync + 'a;

fn morrey_sup(f: &GridFunction, exp: f64, norm: &BallNorm<'_>) -> Result<MorreyEstimate> {
    let cells: Vec<(Vec<f64>, f64)> = (0..f.len())
        .filter(|&i| f.values()[i] != 0.0)
        .map(|i| (f.center(i), f.values()[i].abs()))
        .collect();
    let h = f.spacing();
    if cells.is_empty() {
        return Ok(MorreyEstimate {
            value: 0.0,
            refined: 0.0,
            center_spacing: h,
            max_radius: 0.0,
            stable: true,
        });
    }
    let diam = cells
        .iter()
        .flat_map(|a| cells.iter().map(move |b| distance(&a.0, &b.0)))
        .fold(0.0, f64::max)
        + h * (f.dim() as f64).sqrt();
    let max_radius = 4.0 * diam;
    let extent = f.shape().iter().copied().max().unwrap_or(1);
    // about eight centres per axis on the coarse lattice
    let stride = (extent / 8).max(1);
    let coarse = sweep(f, &cells, stride, 2.0, max_radius, exp, norm)?;
    let fine = sweep(f, &cells, (stride / 2).max(1), 2f64.sqrt(), max_radius, exp, norm)?;
    let value = coarse.max(fine);
    Ok(MorreyEstimate {
        value: coarse,
        refined: value,
        center_spacing: stride as f64 * h,
        max_radius,
        stable: value == 0.0 || (value - coarse) / value < 0.05,
    })
}

fn sweep(
    f: &GridFunction,
    cells: &[(Vec<f64>, f64)],
    stride: usize,
    ratio: f64,
    max_radius: f64,
    exp: f64,
    norm: &BallNorm<'_>,
) -> Result<f64> {
    let n = f.dim();
    let shape = f.shape();
    let centers: Vec<usize> = (0..f.len())
        .filter(|&i| {
            let mut rem = i;
            (0..n).rev().all(|ax| {
                let k = rem % shape[ax];
                rem /= shape[ax];
                k % stride == stride / 2
            })
        })
        .collect();
    let min_radius = f.spacing();
    let mut radii = vec![max_radius];
    while *radii.last().unwrap() / ratio >= min_radius {
        let r = radii.last().unwrap() / ratio;
        radii.push(r);
    }
    let best = centers
        .par_iter()
        .map(|&i| -> Result<f64> {
            let x0 = f.center(i);
            let mut by_dist: Vec<(f64, f64)> = cells.iter().map(|(c, v)| (distance(c, &x0), *v)).collect();
            by_dist.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            let mut best: f64 = 0.0;
            for &r in &radii {
                let k = by_dist.partition_point(|(d, _)| *d < r);
                if k == 0 {
                    continue;
                }
                let mut vals: Vec<f64> = by_dist[..k].iter().map(|(_, v)| *v).collect();
                best = best.max(r.powf(exp) * norm(&mut vals)?);
            }
            Ok(best)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(best.into_iter().fold(0.0, f64::max))
}
