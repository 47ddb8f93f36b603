use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monotone::MonotoneFn;

/// Right-continuous, non-increasing, compactly supported step function on
/// `[0, ∞)`: value `values[k]` on `[ends[k−1], ends[k])` (with `ends[−1] = 0`)
/// and zero beyond the last end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile", into = "RawProfile")]
pub struct StepProfile {
    ends: Vec<f64>,
    values: Vec<f64>,
    // cumulative mass at each end
    mass: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawProfile {
    pub ends: Vec<f64>,
    pub values: Vec<f64>,
}

impl TryFrom<RawProfile> for StepProfile {
    type Error = Error;
    fn try_from(raw: RawProfile) -> Result<Self> {
        StepProfile::new(raw.ends, raw.values)
    }
}

impl From<StepProfile> for RawProfile {
    fn from(p: StepProfile) -> Self {
        RawProfile {
            ends: p.ends,
            values: p.values,
        }
    }
}

impl StepProfile {
    pub fn new(ends: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if ends.len() != values.len() {
            return Err(Error::InvalidProfile(format!(
                "{} ends but {} values",
                ends.len(),
                values.len()
            )));
        }
        let mut prev_end = 0.0;
        let mut prev_val = f64::INFINITY;
        for (&e, &v) in ends.iter().zip(&values) {
            if !(e.is_finite() && e > prev_end) {
                return Err(Error::InvalidProfile(format!(
                    "ends must be finite and strictly increasing from 0, got {e} after {prev_end}"
                )));
            }
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidProfile(format!("values must be finite and >= 0, got {v}")));
            }
            if v > prev_val {
                return Err(Error::InvalidProfile(format!("values must be non-increasing, got {v} after {prev_val}")));
            }
            prev_end = e;
            prev_val = v;
        }
        Ok(Self::normalized(ends, values))
    }

    fn normalized(ends: Vec<f64>, values: Vec<f64>) -> Self {
        let mut e2: Vec<f64> = Vec::with_capacity(ends.len());
        let mut v2: Vec<f64> = Vec::with_capacity(values.len());
        for (e, v) in ends.into_iter().zip(values) {
            match v2.last() {
                Some(&last) if last == v => *e2.last_mut().unwrap() = e,
                _ => {
                    e2.push(e);
                    v2.push(v);
                }
            }
        }
        while v2.last() == Some(&0.0) {
            v2.pop();
            e2.pop();
        }
        let mut mass = Vec::with_capacity(e2.len());
        let mut acc = 0.0;
        let mut start = 0.0;
        for (&e, &v) in e2.iter().zip(&v2) {
            acc += (e - start) * v;
            mass.push(acc);
            start = e;
        }
        Self {
            ends: e2,
            values: v2,
            mass,
        }
    }

    pub fn zero() -> Self {
        Self::normalized(vec![], vec![])
    }

    /// `value · 1_{[0, len)}`.
    pub fn indicator(len: f64, value: f64) -> Result<Self> {
        Self::new(vec![len], vec![value])
    }

    /// From the breakpoint form `(t_k, v_k)`: `t_0 = 0`, value `v_k` on
    /// `[t_k, t_{k+1})`, and a final row with value `0`.
    pub fn from_breakpoints(t: &[f64], v: &[f64]) -> Result<Self> {
        if t.is_empty() || t.len() != v.len() {
            return Err(Error::InvalidProfile("breakpoint columns must be non-empty and of equal length".into()));
        }
        if t[0] != 0.0 {
            return Err(Error::InvalidProfile(format!("first breakpoint must be 0, got {}", t[0])));
        }
        if *v.last().unwrap() != 0.0 {
            return Err(Error::InvalidProfile("last breakpoint must carry value 0 (finite support)".into()));
        }
        Self::new(t[1..].to_vec(), v[..v.len() - 1].to_vec())
    }

    /// Inverse of [`StepProfile::from_breakpoints`].
    pub fn breakpoints(&self) -> (Vec<f64>, Vec<f64>) {
        let mut t = vec![0.0];
        t.extend_from_slice(&self.ends);
        let mut v = self.values.clone();
        v.push(0.0);
        (t, v)
    }

    /// Step approximation of the capped power `min(s, eps)^{−a}` on `[0, 1)`:
    /// `pieces` geometric steps on `[eps, 1)`, each carrying the mean of the
    /// power over the step.
    pub fn power_cutoff(a: f64, eps: f64, pieces: usize) -> Result<Self> {
        if !(a > 0.0 && a.is_finite() && eps > 0.0 && eps < 1.0 && pieces > 0) {
            return Err(Error::InvalidParameter(format!(
                "power cutoff needs a > 0, 0 < eps < 1, pieces > 0 (a={a}, eps={eps})"
            )));
        }
        let mut ends = vec![eps];
        let mut values = vec![eps.powf(-a)];
        let ratio = (1.0 / eps).powf(1.0 / pieces as f64);
        let mut lo = eps;
        for k in 1..=pieces {
            let hi = if k == pieces { 1.0 } else { eps * ratio.powi(k as i32) };
            let mean = if (a - 1.0).abs() < 1e-12 {
                (hi / lo).ln() / (hi - lo)
            } else {
                (hi.powf(1.0 - a) - lo.powf(1.0 - a)) / ((1.0 - a) * (hi - lo))
            };
            ends.push(hi);
            values.push(mean.min(*values.last().unwrap()));
            lo = hi;
        }
        Self::new(ends, values)
    }

    /// Random profile with `pieces` steps, widths in `(0.05, 1)` and values
    /// in `(0, 4]`.
    pub fn random<R: Rng>(rng: &mut R, pieces: usize) -> Self {
        let mut ends = Vec::with_capacity(pieces);
        let mut values: Vec<f64> = (0..pieces).map(|_| rng.gen_range(0.01..4.0)).collect();
        values.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let mut acc = 0.0;
        for _ in 0..pieces {
            acc += rng.gen_range(0.05..1.0);
            ends.push(acc);
        }
        Self::normalized(ends, values)
    }

    pub fn ends(&self) -> &[f64] {
        &self.ends
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.ends.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ends.is_empty()
    }

    /// Measure of the support.
    pub fn support(&self) -> f64 {
        self.ends.last().copied().unwrap_or(0.0)
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.last().copied().unwrap_or(0.0)
    }

    pub fn sup(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// `(start, end, value)` for each step.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.ends
            .iter()
            .zip(&self.values)
            .scan(0.0, |start, (&e, &v)| {
                let s = *start;
                *start = e;
                Some((s, e, v))
            })
    }

    /// `f*(s)`.
    pub fn eval(&self, s: f64) -> f64 {
        let k = self.ends.partition_point(|&e| e <= s);
        self.values.get(k).copied().unwrap_or(0.0)
    }

    /// `|{f* > λ}|`.
    pub fn distribution(&self, lambda: f64) -> f64 {
        let k = self.values.partition_point(|&v| v > lambda);
        if k == 0 {
            0.0
        } else {
            self.ends[k - 1]
        }
    }

    /// `∫₀ˢ f*`.
    pub fn primitive(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        let k = self.ends.partition_point(|&e| e <= s);
        if k >= self.ends.len() {
            return self.total_mass();
        }
        let (base, start) = if k == 0 {
            (0.0, 0.0)
        } else {
            (self.mass[k - 1], self.ends[k - 1])
        };
        base + (s - start) * self.values[k]
    }

    /// `f**(s) = (1/s) ∫₀ˢ f*`, with `f**(0) = f*(0)`.
    pub fn maximal(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return self.sup();
        }
        let k = self.ends.partition_point(|&e| e <= s);
        if k == 0 {
            // inside the first step the running mean is the step value
            return self.values.first().copied().unwrap_or(0.0);
        }
        self.primitive(s) / s
    }

    /// `c · f*`.
    pub fn scale(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::InvalidParameter(format!("scale factor must be finite and >= 0, got {c}")));
        }
        Ok(Self::normalized(
            self.ends.clone(),
            self.values.iter().map(|v| v * c).collect(),
        ))
    }

    /// `f* · 1_{[0, len)}`.
    pub fn truncate(&self, len: f64) -> Self {
        let mut ends = Vec::new();
        let mut values = Vec::new();
        for (_, e, v) in self.pieces() {
            if e < len {
                ends.push(e);
                values.push(v);
            } else {
                if len > ends.last().copied().unwrap_or(0.0) {
                    ends.push(len);
                    values.push(v);
                }
                break;
            }
        }
        Self::normalized(ends, values)
    }

    /// `ψ ∘ f*`; requires `ψ(0) = 0` so that the support stays finite.
    pub fn map_values(&self, psi: &MonotoneFn) -> Result<Self> {
        let at_zero = psi.eval(0.0)?;
        if at_zero > 0.0 {
            return Err(Error::InvalidProfile(format!(
                "psi(0) = {at_zero} > 0 would give infinite support"
            )));
        }
        let mut values = Vec::with_capacity(self.values.len());
        for &v in &self.values {
            let w = psi.eval(v)?;
            if !w.is_finite() {
                return Err(Error::InvalidProfile(format!("psi({v}) is not finite")));
            }
            values.push(w);
        }
        Ok(Self::normalized(self.ends.clone(), values))
    }

    /// All ends of `self` and `other`, merged.
    pub fn common_breakpoints(&self, other: &StepProfile) -> Vec<f64> {
        let mut pts: Vec<f64> = self.ends.iter().chain(other.ends.iter()).copied().collect();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        pts
    }

    pub fn to_csv(&self) -> String {
        let (t, v) = self.breakpoints();
        let mut out = String::from("t,v\n");
        for (a, b) in t.iter().zip(&v) {
            out.push_str(&format!("{a:.16e},{b:.16e}\n"));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or(Error::EmptyInput("profile csv"))?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        if cols != ["t", "v"] {
            return Err(Error::Parse(format!("profile csv header must be `t,v`, got `{header}`")));
        }
        let mut t = Vec::new();
        let mut v = Vec::new();
        for (row, line) in lines.enumerate() {
            let mut parts = line.split(',').map(str::trim);
            let parse = |s: Option<&str>| -> Result<f64> {
                s.ok_or_else(|| Error::Parse(format!("row {}: missing column", row + 2)))?
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("row {}: {e}", row + 2)))
            };
            t.push(parse(parts.next())?);
            v.push(parse(parts.next())?);
            if parts.next().is_some() {
                return Err(Error::Parse(format!("row {}: too many columns", row + 2)));
            }
        }
        Self::from_breakpoints(&t, &v)
    }
}
