//! N-functions: growth indices, Young conjugates, doubling certificates and
//! the Orlicz `E`/`F` pair.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monotone::MonotoneFn;
use crate::quadrature::{integrate_from_zero, QuadConfig};

/// JSON descriptor of an N-function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum NFunctionSpec {
    /// `t^p / p`
    Power { p: f64 },
    /// `t^p`
    PurePower { p: f64 },
    Zygmund { p: f64, alpha: f64, s: f64 },
    ZygmundLoglog { p: f64, alpha: f64, s: f64 },
    PowerSum { coefs: Vec<f64>, exponents: Vec<f64> },
    /// `(1 + t) log(1 + t) − t`
    Entropy,
    /// Arbitrary pair `(G, g)`; indices are estimated on a grid.
    Custom { big: MonotoneFn, derivative: MonotoneFn },
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Explicit { big: MonotoneFn, small: MonotoneFn },
    Conjugate(Box<NFunction>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NFunction {
    repr: Repr,
    exact_indices: Option<(f64, f64)>,
}

/// Log-spaced evaluation grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Default for LogGrid {
    fn default() -> Self {
        Self {
            lo: 1e-8,
            hi: 1e8,
            points: 512,
        }
    }
}

impl LogGrid {
    pub fn new(lo: f64, hi: f64, points: usize) -> Self {
        Self { lo, hi, points }
    }

    pub fn refined(&self) -> Self {
        Self {
            points: 2 * self.points,
            ..*self
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        if self.points <= 1 {
            return vec![self.lo];
        }
        let (a, b) = (self.lo.ln(), self.hi.ln());
        let step = (b - a) / (self.points - 1) as f64;
        (0..self.points).map(|k| (a + step * k as f64).exp()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthIndices {
    pub lower: f64,
    pub upper: f64,
    /// Taken from the closed form rather than estimated.
    pub exact: bool,
    /// The grid estimate moved by more than 1% under 2× refinement.
    pub coarse: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoublingReport {
    pub delta2: bool,
    /// Grid supremum of `G(2t)/G(t)`.
    pub c_delta2: f64,
    pub nabla2: bool,
    /// Grid supremum of `G̃(2s)/G̃(s)`.
    pub c_nabla2: f64,
}

/// Values of the Orlicz pair `E(t)`, `F(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrliczEF {
    pub e: f64,
    pub f: f64,
    pub e_finite: bool,
}

/// Largest value of `t / ((s + t) · weight(s + t))` over `t > 0`, located by
/// a log-grid scan followed by golden-section refinement.
fn max_index_bump(s: f64, weight: impl Fn(f64) -> f64) -> f64 {
    let phi = |lt: f64| {
        let t = lt.exp();
        t / ((s + t) * weight(s + t))
    };
    let (a, b) = ((s * 1e-12).ln(), (s * 1e12 + 1e12).ln());
    let n = 400;
    let step = (b - a) / n as f64;
    let mut best = 0;
    for k in 1..=n {
        if phi(a + step * k as f64) > phi(a + step * best as f64) {
            best = k;
        }
    }
    let mut lo = a + step * (best.max(1) - 1) as f64;
    let mut hi = a + step * (best + 1).min(n) as f64;
    let gr = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let x1 = hi - gr * (hi - lo);
        let x2 = lo + gr * (hi - lo);
        if phi(x1) < phi(x2) {
            lo = x1;
        } else {
            hi = x2;
        }
    }
    phi(0.5 * (lo + hi)).max(phi(a + step * best as f64))
}

impl NFunction {
    pub fn new(big: MonotoneFn, small: MonotoneFn, exact_indices: Option<(f64, f64)>) -> Result<Self> {
        big.validate()?;
        small.validate()?;
        Ok(Self {
            repr: Repr::Explicit { big, small },
            exact_indices,
        })
    }

    /// `t^p / p`, with derivative `t^{p−1}`.
    pub fn power(p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::InvalidParameter(format!("N-function power needs p > 1, got {p}")));
        }
        Self::new(
            MonotoneFn::scaled(1.0 / p, 1.0, MonotoneFn::power(p)),
            MonotoneFn::power(p - 1.0),
            Some((p, p)),
        )
    }

    /// `t^p`, with derivative `p t^{p−1}`.
    pub fn pure_power(p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::InvalidParameter(format!("N-function power needs p > 1, got {p}")));
        }
        Self::new(
            MonotoneFn::power(p),
            MonotoneFn::scaled(p, 1.0, MonotoneFn::power(p - 1.0)),
            Some((p, p)),
        )
    }

    /// `t^p log^α(s + t)`. Requires `|α| / log s < (p − 1)/2`, which keeps
    /// both indices within `(p − (p−1)/2, p + (p−1)/2)` and hence in `Δ₂ ∩ ∇₂`.
    pub fn zygmund(p: f64, alpha: f64, s: f64) -> Result<Self> {
        MonotoneFn::zygmund(p, alpha, s).validate()?;
        if alpha.abs() / s.ln() >= 0.5 * (p - 1.0) {
            return Err(Error::InvalidParameter(format!(
                "zygmund shift too small: need |alpha|/log(s) < (p-1)/2 (p={p}, alpha={alpha}, s={s})"
            )));
        }
        let bump = alpha * max_index_bump(s, f64::ln);
        let indices = (p + bump.min(0.0), p + bump.max(0.0));
        Self::new(
            MonotoneFn::zygmund(p, alpha, s),
            MonotoneFn::ZygmundDerivative { p, alpha, s },
            Some(indices),
        )
    }

    /// `t^p (log log(s + t))^α`. Requires `|α| / (log s · log log s) < (p − 1)/2`.
    pub fn zygmund_loglog(p: f64, alpha: f64, s: f64) -> Result<Self> {
        let big = MonotoneFn::ZygmundLoglog { p, alpha, s };
        big.validate()?;
        if alpha.abs() / (s.ln() * s.ln().ln()) >= 0.5 * (p - 1.0) {
            return Err(Error::InvalidParameter(format!(
                "zygmund_loglog shift too small: need |alpha|/(log s loglog s) < (p-1)/2 (p={p}, alpha={alpha}, s={s})"
            )));
        }
        let bump = alpha * max_index_bump(s, |x| x.ln() * x.ln().ln());
        let indices = (p + bump.min(0.0), p + bump.max(0.0));
        Self::new(big, MonotoneFn::ZygmundLoglogDerivative { p, alpha, s }, Some(indices))
    }

    /// `Σ c_i t^{e_i}` with every `e_i > 1`.
    pub fn power_sum(coefs: Vec<f64>, exponents: Vec<f64>) -> Result<Self> {
        if exponents.iter().any(|e| !(*e > 1.0)) {
            return Err(Error::InvalidParameter("power_sum N-function needs exponents > 1".into()));
        }
        let big = MonotoneFn::PowerSum {
            coefs: coefs.clone(),
            exponents: exponents.clone(),
        };
        big.validate()?;
        let active: Vec<f64> = coefs
            .iter()
            .zip(&exponents)
            .filter(|(c, _)| **c > 0.0)
            .map(|(_, e)| *e)
            .collect();
        if active.is_empty() {
            return Err(Error::InvalidParameter("power_sum N-function needs a positive coefficient".into()));
        }
        let lo = active.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = active.iter().cloned().fold(0.0, f64::max);
        let small = MonotoneFn::PowerSum {
            coefs: coefs.iter().zip(&exponents).map(|(c, e)| c * e).collect(),
            exponents: exponents.iter().map(|e| e - 1.0).collect(),
        };
        Self::new(big, small, Some((lo, hi)))
    }

    /// `(1 + t) log(1 + t) − t`; in `Δ₂` but not in `∇₂`.
    pub fn entropy() -> Self {
        Self {
            repr: Repr::Explicit {
                big: MonotoneFn::Entropy,
                small: MonotoneFn::Log1p,
            },
            exact_indices: Some((1.0, 2.0)),
        }
    }

    pub fn from_spec(spec: &NFunctionSpec) -> Result<Self> {
        match spec {
            NFunctionSpec::Power { p } => Self::power(*p),
            NFunctionSpec::PurePower { p } => Self::pure_power(*p),
            NFunctionSpec::Zygmund { p, alpha, s } => Self::zygmund(*p, *alpha, *s),
            NFunctionSpec::ZygmundLoglog { p, alpha, s } => Self::zygmund_loglog(*p, *alpha, *s),
            NFunctionSpec::PowerSum { coefs, exponents } => Self::power_sum(coefs.clone(), exponents.clone()),
            NFunctionSpec::Entropy => Ok(Self::entropy()),
            NFunctionSpec::Custom { big, derivative } => Self::new(big.clone(), derivative.clone(), None),
        }
    }

    /// The Young conjugate as an N-function in its own right.
    pub fn conjugate(&self) -> NFunction {
        if let Repr::Conjugate(inner) = &self.repr {
            return (**inner).clone();
        }
        let exact_indices = self.exact_indices.map(|(i, s)| {
            let lo = if s.is_finite() { s / (s - 1.0) } else { 1.0 };
            let hi = if i > 1.0 { i / (i - 1.0) } else { f64::INFINITY };
            (lo, hi)
        });
        NFunction {
            repr: Repr::Conjugate(Box::new(self.clone())),
            exact_indices,
        }
    }

    /// `G(t)`.
    pub fn value(&self, t: f64) -> f64 {
        match &self.repr {
            Repr::Explicit { big, .. } => big.apply(t),
            Repr::Conjugate(inner) => inner.young_conjugate(t),
        }
    }

    /// `g(t) = G'(t)`.
    pub fn derivative(&self, t: f64) -> f64 {
        match &self.repr {
            Repr::Explicit { small, .. } => small.apply(t),
            Repr::Conjugate(inner) => inner.derivative_inverse(t).unwrap_or(f64::INFINITY),
        }
    }

    /// `g⁻¹(y)`.
    pub fn derivative_inverse(&self, y: f64) -> Result<f64> {
        match &self.repr {
            Repr::Explicit { small, .. } => small.generalized_inverse(y),
            Repr::Conjugate(inner) => Ok(inner.derivative(y)),
        }
    }

    /// `g` as a monotone function descriptor.
    pub fn derivative_fn(&self) -> MonotoneFn {
        match &self.repr {
            Repr::Explicit { small, .. } => small.clone(),
            Repr::Conjugate(inner) => MonotoneFn::inverse_of(inner.derivative_fn()),
        }
    }

    /// `g⁻¹` as a monotone function descriptor.
    pub fn derivative_inverse_fn(&self) -> MonotoneFn {
        match &self.repr {
            Repr::Explicit { small, .. } => MonotoneFn::inverse_of(small.clone()),
            Repr::Conjugate(inner) => inner.derivative_fn(),
        }
    }

    /// `G` as a monotone function descriptor, when it has one.
    pub fn value_fn(&self) -> Option<MonotoneFn> {
        match &self.repr {
            Repr::Explicit { big, .. } => Some(big.clone()),
            Repr::Conjugate(_) => None,
        }
    }

    pub fn exact_indices(&self) -> Option<(f64, f64)> {
        self.exact_indices
    }

    /// `G̃(s) = sup_t (s t − G(t))`, attained at `t = g⁻¹(s)`.
    pub fn young_conjugate(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        match self.derivative_inverse(s) {
            Ok(t) if t.is_finite() => {
                if t == 0.0 {
                    0.0
                } else {
                    (s * t - self.value(t)).max(0.0)
                }
            }
            _ => f64::INFINITY,
        }
    }

    /// Infimum and supremum of `t g(t) / G(t)` over the grid.
    pub fn estimate_indices(&self, grid: &LogGrid) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for t in grid.nodes() {
            let big = self.value(t);
            let small = self.derivative(t);
            if !(big > 0.0) || !big.is_finite() || !small.is_finite() {
                continue;
            }
            let h = t * small / big;
            lo = lo.min(h);
            hi = hi.max(h);
        }
        (lo, hi)
    }

    /// Growth indices: exact for closed-form families, otherwise estimated
    /// on `grid` with a coarseness flag from a 2× refined grid.
    pub fn growth_indices(&self, grid: &LogGrid) -> GrowthIndices {
        if let Some((lower, upper)) = self.exact_indices {
            return GrowthIndices {
                lower,
                upper,
                exact: true,
                coarse: false,
            };
        }
        let (lower, upper) = self.estimate_indices(grid);
        let (fine_lo, fine_hi) = self.estimate_indices(&grid.refined());
        let moved = |a: f64, b: f64| (a - b).abs() > 0.01 * b.abs();
        GrowthIndices {
            lower,
            upper,
            exact: false,
            coarse: moved(lower, fine_lo) || moved(upper, fine_hi),
        }
    }

    fn doubling_constant(&self, grid: &LogGrid) -> (f64, bool) {
        let nodes = grid.nodes();
        let ratio = |t: f64| {
            let a = self.value(t);
            let b = self.value(2.0 * t);
            if b.is_infinite() || b.is_nan() {
                f64::INFINITY
            } else if a > 0.0 {
                b / a
            } else if b > 0.0 {
                f64::INFINITY
            } else {
                1.0
            }
        };
        let ratios: Vec<f64> = nodes.iter().map(|&t| ratio(t)).collect();
        let full = ratios.iter().cloned().fold(0.0, f64::max);
        // the same supremum with two decades trimmed from each end
        let lo = grid.lo * 100.0;
        let hi = grid.hi / 100.0;
        let inner = nodes
            .iter()
            .zip(&ratios)
            .filter(|(t, _)| **t >= lo && **t <= hi)
            .map(|(_, r)| *r)
            .fold(0.0, f64::max);
        let ok = full.is_finite() && full <= 1.01 * inner;
        (full, ok)
    }

    /// Grid certificates for `Δ₂` (on `G`) and `∇₂` (on `G̃`).
    pub fn check_doubling(&self, grid: &LogGrid) -> DoublingReport {
        let (c_delta2, delta2) = self.doubling_constant(grid);
        let (c_nabla2, nabla2) = self.conjugate().doubling_constant(grid);
        DoublingReport {
            delta2,
            c_delta2,
            nabla2,
            c_nabla2,
        }
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma.is_finite() && sigma > 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("sigma must exceed 1, got {sigma}")))
    }
}

/// `E(t) = (∫₀ᵗ (r/A(r))^{1/(σ−1)} dr)^{(σ−1)/σ}`.
pub fn orlicz_e(a: &NFunction, sigma: f64, t: f64, cfg: &QuadConfig) -> Result<f64> {
    check_sigma(sigma)?;
    if t <= 0.0 {
        return Ok(0.0);
    }
    let k = 1.0 / (sigma - 1.0);
    let integral = integrate_from_zero(|r| (r / a.value(r)).powf(k), t, cfg);
    Ok(integral.powf((sigma - 1.0) / sigma))
}

/// `F(t) = (∫₀ᵗ B(r) / r^{1+σ/(σ−1)} dr)^{(σ−1)/σ}`.
pub fn orlicz_f(b: &NFunction, sigma: f64, t: f64, cfg: &QuadConfig) -> Result<f64> {
    check_sigma(sigma)?;
    if t <= 0.0 {
        return Ok(0.0);
    }
    let e = 1.0 + sigma / (sigma - 1.0);
    let integral = integrate_from_zero(|r| b.value(r) / r.powf(e), t, cfg);
    Ok(integral.powf((sigma - 1.0) / sigma))
}

pub fn orlicz_ef(a: &NFunction, b: &NFunction, sigma: f64, t: f64, cfg: &QuadConfig) -> Result<OrliczEF> {
    let e = orlicz_e(a, sigma, t, cfg)?;
    let f = orlicz_f(b, sigma, t, cfg)?;
    let e_finite = e.is_finite() && orlicz_e(a, sigma, t.max(1.0), cfg)?.is_finite();
    Ok(OrliczEF { e, f, e_finite })
}

/// Smallest candidate `δ` with `F(E(t)/δ) ≤ δ A(t)/t` at every grid point.
pub fn check_compatibility(
    a: &NFunction,
    b: &NFunction,
    sigma: f64,
    candidates: &[f64],
    t_grid: &[f64],
    cfg: &QuadConfig,
) -> Result<Option<f64>> {
    check_sigma(sigma)?;
    if t_grid.is_empty() {
        return Err(Error::EmptyInput("compatibility t grid"));
    }
    if candidates.is_empty() {
        return Err(Error::EmptyInput("compatibility delta candidates"));
    }
    if t_grid.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::InvalidParameter("compatibility grid must be positive and finite".into()));
    }
    let es = t_grid
        .iter()
        .map(|&t| orlicz_e(a, sigma, t, cfg))
        .collect::<Result<Vec<f64>>>()?;
    if es.iter().any(|e| !e.is_finite()) {
        return Err(Error::InvalidParameter("E is not finite-valued for this A and sigma".into()));
    }
    let mut sorted: Vec<f64> = candidates.iter().cloned().filter(|d| *d > 0.0).collect();
    sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
    for delta in sorted {
        let mut ok = true;
        for (&t, &e) in t_grid.iter().zip(&es) {
            let lhs = orlicz_f(b, sigma, e / delta, cfg)?;
            let rhs = delta * a.value(t) / t;
            if !(lhs <= rhs * (1.0 + 1e-9)) {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(Some(delta));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    #[test]
    fn conjugate_examples() {
        let quad = NFunction::power(2.0).unwrap();
        assert!((quad.young_conjugate(3.0) - 4.5).abs() < 1e-12);
        let cubic = NFunction::power(3.0).unwrap();
        // sup_t (t − t³/3) at t = 1
        assert!((cubic.young_conjugate(1.0) - 2.0 / 3.0).abs() < 1e-12);
        let quartic = NFunction::power(4.0).unwrap();
        assert!((quartic.young_conjugate(1.0) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn index_examples() {
        let g = NFunction::pure_power(2.5).unwrap();
        let ix = g.growth_indices(&LogGrid::default());
        assert_eq!((ix.lower, ix.upper), (2.5, 2.5));
        let (lo, hi) = g.estimate_indices(&LogGrid::default());
        assert!((lo - 2.5).abs() < 1e-12 && (hi - 2.5).abs() < 1e-12);

        let sum = NFunction::power_sum(vec![1.0, 1.0], vec![2.0, 4.0]).unwrap();
        let (lo, hi) = sum.estimate_indices(&LogGrid::default());
        assert!((lo - 2.0).abs() < 1e-3 && (hi - 4.0).abs() < 1e-3);

        let z = NFunction::zygmund(2.0, 1.0, 1e6).unwrap();
        let (i, s) = z.exact_indices().unwrap();
        assert!((i - 2.0).abs() < 0.1 && (s - 2.0).abs() < 0.1);
        let (lo, hi) = z.estimate_indices(&LogGrid::default());
        assert!((lo - i).abs() < 1e-3 && (hi - s).abs() < 1e-3, "{lo} {hi} {i} {s}");
    }

    #[test]
    fn zygmund_shift_validation() {
        assert!(NFunction::zygmund(2.0, 1.0, 2.0).is_err());
        assert!(NFunction::zygmund(2.0, 1.0, 10.0).is_ok());
        assert!(NFunction::zygmund(2.0, -1.0, 10.0).is_ok());
    }

    #[test]
    fn doubling_examples() {
        let grid = LogGrid::default();
        let sq = NFunction::pure_power(2.0).unwrap().check_doubling(&grid);
        assert!((sq.c_delta2 - 4.0).abs() < 1e-9 && sq.delta2 && sq.nabla2);
        let ent = NFunction::entropy().check_doubling(&grid);
        assert!(ent.delta2 && !ent.nabla2, "{ent:?}");
        for p in [1.3, 2.0, 5.0] {
            let d = NFunction::power(p).unwrap().check_doubling(&grid);
            assert!(d.delta2 && d.nabla2);
        }
    }

    #[test]
    fn ef_examples() {
        let a = NFunction::pure_power(2.0).unwrap();
        let ef = orlicz_ef(&a, &a, 3.0, 1.0, &cfg()).unwrap();
        assert!((ef.e - 2f64.powf(2.0 / 3.0)).abs() < 1e-8);
        assert!((ef.f - 2f64.powf(2.0 / 3.0)).abs() < 1e-8);
        assert!(ef.e_finite);
        for b in [1.2, 1.5] {
            let bb = NFunction::pure_power(b).unwrap();
            assert!(orlicz_f(&bb, 3.0, 2.0, &cfg()).unwrap().is_infinite());
        }
    }

    #[test]
    fn compatibility_examples() {
        let a = NFunction::pure_power(2.0).unwrap();
        let grid: Vec<f64> = (0..5).map(|k| 0.1 * 10f64.powf(0.5 * k as f64)).collect();
        let cands: Vec<f64> = (0..=10).map(|k| 2f64.powi(k)).collect();
        // closed form: δ^{4/3} ≥ 2^{8/9} t^{−8/9} is tightest at t = 0.1, giving δ ≈ 7.37
        let d = check_compatibility(&a, &a, 3.0, &cands, &grid, &cfg()).unwrap();
        assert_eq!(d, Some(8.0));
        let fast = NFunction::pure_power(20.0).unwrap();
        let wide: Vec<f64> = (0..8).map(|k| 10f64.powi(k - 1)).collect();
        let d = check_compatibility(&a, &fast, 3.0, &[1.0, 2.0, 4.0, 8.0], &wide, &cfg()).unwrap();
        assert_eq!(d, None);
        assert!(check_compatibility(&a, &a, 3.0, &cands, &[], &cfg()).is_err());
    }

    #[test]
    fn conjugate_indices_follow_duality() {
        let grid = LogGrid::default();
        for g in [NFunction::power(3.0).unwrap(), NFunction::zygmund(2.0, 1.0, 1e3).unwrap()] {
            let (i, s) = g.exact_indices().unwrap();
            let (ci, cs) = g.conjugate().estimate_indices(&grid);
            assert!((ci - s / (s - 1.0)).abs() < 1e-2, "{ci} vs {}", s / (s - 1.0));
            assert!((cs - i / (i - 1.0)).abs() < 1e-2, "{cs} vs {}", i / (i - 1.0));
        }
    }

    #[test]
    fn spec_json() {
        let s: NFunctionSpec = serde_json::from_str(r#"{"family":"zygmund","p":2,"alpha":1,"s":10}"#).unwrap();
        let g = NFunction::from_spec(&s).unwrap();
        assert!(g.value(1.0) > 0.0);
    }
}
