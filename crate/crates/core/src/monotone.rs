//! Non-decreasing, left-continuous functions on `[0, ∞)` with generalized
//! inverses.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A non-decreasing, left-continuous function on `[0, ∞)`.
///
/// Serialized as a JSON object tagged by `family`, e.g.
/// `{"family": "zygmund", "p": 2.0, "alpha": 1.0, "s": 10.0}` or
/// `{"family": "table", "t": [...], "v": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum MonotoneFn {
    Identity,
    Zero,
    /// `t^exponent`
    Power { exponent: f64 },
    /// `Σ coefs[i] · t^exponents[i]`
    PowerSum { coefs: Vec<f64>, exponents: Vec<f64> },
    /// `t^p · log^alpha(s + t)`
    Zygmund { p: f64, alpha: f64, s: f64 },
    /// Derivative of the `zygmund` family.
    ZygmundDerivative { p: f64, alpha: f64, s: f64 },
    /// `t^p · (log log(s + t))^alpha`
    ZygmundLoglog { p: f64, alpha: f64, s: f64 },
    /// Derivative of the `zygmund_loglog` family.
    ZygmundLoglogDerivative { p: f64, alpha: f64, s: f64 },
    /// `(1 + t) log(1 + t) − t`
    Entropy,
    /// `log(1 + t)`
    Log1p,
    /// `e^t − t − 1`
    ExpMinusLinear,
    /// `t · log(e + t)`
    Llogl,
    /// Step function: `v[0]` on `[0, t[0]]`, `v[k]` on `(t[k−1], t[k]]`, and
    /// `v[last]` beyond `t[last]`.
    Table { t: Vec<f64>, v: Vec<f64> },
    /// `outer · base(inner · t)`
    Scaled {
        outer: f64,
        inner: f64,
        base: Box<MonotoneFn>,
    },
    /// `outer(inner(t))`
    Compose {
        outer: Box<MonotoneFn>,
        inner: Box<MonotoneFn>,
    },
    /// Generalized inverse `y ↦ inf{t : base(t) ≥ y}`, infinite above the
    /// range of `base`.
    Inverse { base: Box<MonotoneFn> },
}

fn entropy(t: f64) -> f64 {
    if t < 1e-2 {
        // Σ_{k≥2} (−1)^k t^k / (k(k−1))
        let mut term = t;
        let mut sum = 0.0;
        for k in 2..12 {
            term *= -t;
            sum += term / ((k * (k - 1)) as f64);
        }
        -sum
    } else {
        (1.0 + t) * t.ln_1p() - t
    }
}

fn exp_minus_linear(s: f64) -> f64 {
    if s < 1e-2 {
        let mut term = s;
        let mut sum = 0.0;
        for k in 2..12 {
            term *= s / k as f64;
            sum += term;
        }
        sum
    } else {
        s.exp_m1() - s
    }
}

fn nonneg_finite(x: f64) -> bool {
    x.is_finite() && x >= 0.0
}

impl MonotoneFn {
    pub fn identity() -> Self {
        MonotoneFn::Identity
    }

    pub fn power(exponent: f64) -> Self {
        MonotoneFn::Power { exponent }
    }

    pub fn zygmund(p: f64, alpha: f64, s: f64) -> Self {
        MonotoneFn::Zygmund { p, alpha, s }
    }

    pub fn table(t: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        let f = MonotoneFn::Table { t, v };
        f.validate()?;
        Ok(f)
    }

    pub fn scaled(outer: f64, inner: f64, base: MonotoneFn) -> Self {
        MonotoneFn::Scaled {
            outer,
            inner,
            base: Box::new(base),
        }
    }

    pub fn compose(outer: MonotoneFn, inner: MonotoneFn) -> Self {
        MonotoneFn::Compose {
            outer: Box::new(outer),
            inner: Box::new(inner),
        }
    }

    pub fn inverse_of(base: MonotoneFn) -> Self {
        MonotoneFn::Inverse {
            base: Box::new(base),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: MonotoneFn = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        f.validate()?;
        Ok(f)
    }

    /// Checks the parameter constraints that make the family non-decreasing
    /// and non-negative.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match self {
            MonotoneFn::Identity
            | MonotoneFn::Zero
            | MonotoneFn::Entropy
            | MonotoneFn::Log1p
            | MonotoneFn::ExpMinusLinear
            | MonotoneFn::Llogl => Ok(()),
            MonotoneFn::Power { exponent } => {
                if exponent.is_finite() && *exponent > 0.0 {
                    Ok(())
                } else {
                    bad(format!("power exponent must be positive, got {exponent}"))
                }
            }
            MonotoneFn::PowerSum { coefs, exponents } => {
                if coefs.is_empty() || coefs.len() != exponents.len() {
                    return bad("power_sum needs equally many coefs and exponents".into());
                }
                if coefs.iter().any(|c| !nonneg_finite(*c))
                    || exponents.iter().any(|e| !(e.is_finite() && *e > 0.0))
                {
                    return bad("power_sum coefs must be >= 0 and exponents > 0".into());
                }
                Ok(())
            }
            MonotoneFn::Zygmund { p, alpha, s } | MonotoneFn::ZygmundDerivative { p, alpha, s } => {
                if !(p.is_finite() && *p > 1.0) || !alpha.is_finite() || !(s.is_finite() && *s > 1.0) {
                    return bad(format!("zygmund needs p > 1, finite alpha, s > 1 (p={p}, alpha={alpha}, s={s})"));
                }
                Ok(())
            }
            MonotoneFn::ZygmundLoglog { p, alpha, s }
            | MonotoneFn::ZygmundLoglogDerivative { p, alpha, s } => {
                if !(p.is_finite() && *p > 1.0)
                    || !alpha.is_finite()
                    || !(s.is_finite() && *s > std::f64::consts::E)
                {
                    return bad(format!(
                        "zygmund_loglog needs p > 1, finite alpha, s > e (p={p}, alpha={alpha}, s={s})"
                    ));
                }
                Ok(())
            }
            MonotoneFn::Table { t, v } => {
                if t.is_empty() || t.len() != v.len() {
                    return bad("table needs equally many (non-zero) breakpoints and values".into());
                }
                if t.iter().any(|x| !nonneg_finite(*x)) || v.iter().any(|x| !nonneg_finite(*x)) {
                    return bad("table entries must be finite and non-negative".into());
                }
                if t.windows(2).any(|w| w[1] <= w[0]) {
                    return bad("table breakpoints must be strictly increasing".into());
                }
                if v.windows(2).any(|w| w[1] < w[0]) {
                    return bad("table values must be non-decreasing".into());
                }
                Ok(())
            }
            MonotoneFn::Scaled { outer, inner, base } => {
                if !(nonneg_finite(*outer) && inner.is_finite() && *inner > 0.0) {
                    return bad(format!("scaled needs outer >= 0 and inner > 0 (outer={outer}, inner={inner})"));
                }
                base.validate()
            }
            MonotoneFn::Compose { outer, inner } => {
                outer.validate()?;
                inner.validate()
            }
            MonotoneFn::Inverse { base } => base.validate(),
        }
    }

    /// Value at `t ≥ 0`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if t.is_nan() {
            return Err(Error::NotANumber("monotone function argument"));
        }
        if t < 0.0 {
            return Err(Error::NegativeArgument(t));
        }
        let v = self.apply(t);
        if v.is_nan() {
            return Err(Error::NotANumber("monotone function value"));
        }
        Ok(v)
    }

    /// Unchecked evaluation; the caller guarantees `t ≥ 0`.
    pub fn apply(&self, t: f64) -> f64 {
        match self {
            MonotoneFn::Identity => t,
            MonotoneFn::Zero => 0.0,
            MonotoneFn::Power { exponent } => {
                if t == 0.0 {
                    0.0
                } else {
                    t.powf(*exponent)
                }
            }
            MonotoneFn::PowerSum { coefs, exponents } => {
                if t == 0.0 {
                    return 0.0;
                }
                coefs.iter().zip(exponents).map(|(c, e)| c * t.powf(*e)).sum()
            }
            MonotoneFn::Zygmund { p, alpha, s } => {
                if t == 0.0 {
                    return 0.0;
                }
                t.powf(*p) * (s + t).ln().powf(*alpha)
            }
            MonotoneFn::ZygmundDerivative { p, alpha, s } => {
                if t == 0.0 {
                    return 0.0;
                }
                let l = (s + t).ln();
                t.powf(p - 1.0) * l.powf(*alpha) * (alpha * t / ((s + t) * l) + p)
            }
            MonotoneFn::ZygmundLoglog { p, alpha, s } => {
                if t == 0.0 {
                    return 0.0;
                }
                t.powf(*p) * (s + t).ln().ln().powf(*alpha)
            }
            MonotoneFn::ZygmundLoglogDerivative { p, alpha, s } => {
                if t == 0.0 {
                    return 0.0;
                }
                let l = (s + t).ln();
                let ll = l.ln();
                t.powf(p - 1.0) * ll.powf(*alpha) * (alpha * t / ((s + t) * l * ll) + p)
            }
            MonotoneFn::Entropy => entropy(t),
            MonotoneFn::Log1p => t.ln_1p(),
            MonotoneFn::ExpMinusLinear => exp_minus_linear(t),
            MonotoneFn::Llogl => {
                if t == 0.0 {
                    0.0
                } else {
                    t * (std::f64::consts::E + t).ln()
                }
            }
            MonotoneFn::Table { t: bp, v } => {
                let k = bp.partition_point(|&b| b < t);
                v[k.min(v.len() - 1)]
            }
            MonotoneFn::Scaled { outer, inner, base } => {
                let b = base.apply(inner * t);
                if *outer == 0.0 {
                    0.0
                } else {
                    outer * b
                }
            }
            MonotoneFn::Compose { outer, inner } => outer.apply(inner.apply(t)),
            MonotoneFn::Inverse { base } => base.generalized_inverse(t).unwrap_or(f64::INFINITY),
        }
    }

    /// `lim_{t→∞}` of the function.
    pub fn sup_value(&self) -> f64 {
        match self {
            MonotoneFn::Zero => 0.0,
            MonotoneFn::PowerSum { coefs, .. } => {
                if coefs.iter().all(|c| *c == 0.0) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            MonotoneFn::Table { v, .. } => *v.last().unwrap(),
            MonotoneFn::Scaled { outer, base, .. } => {
                if *outer == 0.0 {
                    0.0
                } else {
                    outer * base.sup_value()
                }
            }
            MonotoneFn::Compose { outer, inner } => {
                let s = inner.sup_value();
                if s.is_finite() {
                    outer.apply(s).max(outer.apply(s * (1.0 - 1e-15)))
                } else {
                    outer.sup_value()
                }
            }
            _ => f64::INFINITY,
        }
    }

    /// Whether the function is continuous and strictly increasing, so that the
    /// generalized inverse is a true inverse.
    pub fn is_strictly_increasing(&self) -> bool {
        match self {
            MonotoneFn::Zero | MonotoneFn::Table { .. } => false,
            MonotoneFn::PowerSum { coefs, .. } => coefs.iter().any(|c| *c > 0.0),
            MonotoneFn::Scaled { outer, base, .. } => *outer > 0.0 && base.is_strictly_increasing(),
            MonotoneFn::Compose { outer, inner } => {
                outer.is_strictly_increasing() && inner.is_strictly_increasing()
            }
            MonotoneFn::Inverse { base } => {
                base.is_strictly_increasing() && base.sup_value().is_infinite()
            }
            _ => true,
        }
    }

    /// `inf{t ≥ 0 : f(t) ≥ y}`.
    pub fn generalized_inverse(&self, y: f64) -> Result<f64> {
        if y.is_nan() {
            return Err(Error::NotANumber("generalized inverse argument"));
        }
        if y < 0.0 {
            return Err(Error::NegativeArgument(y));
        }
        match self {
            MonotoneFn::Identity => Ok(y),
            MonotoneFn::Power { exponent } => Ok(if y == 0.0 { 0.0 } else { y.powf(1.0 / exponent) }),
            MonotoneFn::Zero => {
                if y == 0.0 {
                    Ok(0.0)
                } else {
                    Err(Error::UnboundedInverse(y))
                }
            }
            MonotoneFn::Table { t, v } => {
                if y <= v[0] {
                    return Ok(0.0);
                }
                let k = v.partition_point(|&x| x < y);
                if k == v.len() {
                    Err(Error::UnboundedInverse(y))
                } else {
                    Ok(t[k - 1])
                }
            }
            MonotoneFn::Scaled { outer, inner, base } => {
                if *outer == 0.0 {
                    return if y == 0.0 {
                        Ok(0.0)
                    } else {
                        Err(Error::UnboundedInverse(y))
                    };
                }
                Ok(base.generalized_inverse(y / outer)? / inner)
            }
            MonotoneFn::Inverse { base } if base.is_strictly_increasing() => Ok(base.apply(y)),
            _ => self.bisect_inverse(y),
        }
    }

    fn bisect_inverse(&self, y: f64) -> Result<f64> {
        if self.apply(0.0) >= y {
            return Ok(0.0);
        }
        // bracket: f(lo) < y <= f(hi)
        let mut hi = 1.0;
        let mut lo = 0.0;
        if self.apply(hi) >= y {
            let mut probe = 0.5;
            while probe > 1e-300 {
                if self.apply(probe) < y {
                    lo = probe;
                    break;
                }
                hi = probe;
                probe *= 0.5;
            }
            if lo == 0.0 {
                return Ok(0.0);
            }
        } else {
            loop {
                lo = hi;
                hi *= 2.0;
                if hi > 1e300 {
                    return Err(Error::UnboundedInverse(y));
                }
                if self.apply(hi) >= y {
                    break;
                }
            }
        }
        for _ in 0..400 {
            if hi - lo <= 1e-15 * hi {
                break;
            }
            let mid = if hi > 4.0 * lo {
                (lo * hi).sqrt()
            } else {
                0.5 * (lo + hi)
            };
            if mid <= lo || mid >= hi {
                break;
            }
            if self.apply(mid) >= y {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }
}
