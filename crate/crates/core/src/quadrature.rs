//! One-dimensional quadrature: adaptive Gauss–Kronrod (7/15) on finite
//! intervals, octave-by-octave summation for improper endpoints at `0` and
//! `∞`, and the composite log-midpoint rule used for grid potentials.
//!
//! Divergent improper integrals evaluate to `f64::INFINITY`. Divergence is
//! detected from the ratio of successive octave contributions: an integrand
//! behaving like `s^β` contributes `2^{β+1}` times more on each octave towards
//! `∞` (and `2^{-(β+1)}` towards `0`), so a ratio that stays `≥ 1` certifies
//! `β ≥ -1` at that end.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances shared by every adaptive integral in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Cap on the number of subintervals of one adaptive Gauss–Kronrod run.
    pub max_intervals: usize,
    /// Cap on the number of octaves summed for an improper endpoint.
    pub max_octaves: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-300,
            max_intervals: 2000,
            max_octaves: 400,
        }
    }
}

impl QuadConfig {
    /// The same configuration with tolerances tightened by `factor`.
    pub fn refined(&self, factor: f64) -> Self {
        Self {
            rel_tol: (self.rel_tol / factor).max(1e-14),
            max_intervals: self.max_intervals * 2,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

fn kronrod_rule<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Estimate {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Estimate {
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

struct Segment {
    a: f64,
    b: f64,
    est: Estimate,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est
            .error
            .partial_cmp(&other.est.error)
            .unwrap_or(Ordering::Equal)
    }
}

/// Globally adaptive G7/K15 quadrature on a finite interval.
pub fn gauss_kronrod<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Estimate {
    if !(b > a) {
        return Estimate {
            value: 0.0,
            error: 0.0,
        };
    }
    let first = kronrod_rule(&f, a, b);
    if !first.value.is_finite() {
        return first;
    }
    let mut heap = BinaryHeap::new();
    let mut total = first.value;
    let mut error = first.error;
    heap.push(Segment { a, b, est: first });
    let mut count = 1;
    while error > cfg.abs_tol.max(cfg.rel_tol * total.abs()) && count < cfg.max_intervals {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        let left = kronrod_rule(&f, worst.a, mid);
        let right = kronrod_rule(&f, mid, worst.b);
        if !left.value.is_finite() || !right.value.is_finite() {
            let value = left.value + right.value;
            return Estimate {
                value,
                error: f64::INFINITY,
            };
        }
        total += left.value + right.value - worst.est.value;
        error += left.error + right.error - worst.est.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            est: left,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            est: right,
        });
        count += 1;
    }
    // Re-sum to remove drift from the incremental updates.
    let (value, error) = heap
        .iter()
        .fold((0.0, 0.0), |(v, e), s| (v + s.est.value, e + s.est.error));
    Estimate { value, error }
}

/// Sums octave contributions `piece(0), piece(1), ...` whose magnitudes are
/// expected to behave geometrically; see the module docs.
fn sum_octaves<P: FnMut(usize) -> f64>(mut piece: P, cfg: &QuadConfig) -> f64 {
    const NONDECAY_LIMIT: usize = 16;
    const ZERO_RUN: usize = 8;
    let mut sum = 0.0;
    let mut prev: Option<f64> = None;
    let mut prev_ratio: Option<f64> = None;
    let mut nondecay = 0;
    let mut zeros = 0;
    let mut geometric = 0;
    let mut last_tail = 0.0;
    for k in 0..cfg.max_octaves {
        let p = piece(k);
        if p.is_nan() {
            return f64::NAN;
        }
        if p.is_infinite() {
            return p;
        }
        sum += p;
        if !sum.is_finite() || sum.abs() > 1e300 {
            return f64::INFINITY.copysign(sum);
        }
        if p == 0.0 {
            zeros += 1;
            prev = Some(0.0);
            prev_ratio = None;
            last_tail = 0.0;
            if zeros >= ZERO_RUN {
                return sum;
            }
            continue;
        }
        zeros = 0;
        if let Some(pp) = prev.filter(|&pp| pp != 0.0) {
            let q = p / pp;
            if q >= 1.0 - 1e-9 {
                nondecay += 1;
                geometric = 0;
                if nondecay >= NONDECAY_LIMIT {
                    return f64::INFINITY.copysign(sum);
                }
            } else if q > 0.0 {
                nondecay = 0;
                let tail = p * q / (1.0 - q);
                last_tail = tail;
                let target = cfg.abs_tol.max(cfg.rel_tol * sum.abs());
                if tail.abs() <= target {
                    return sum + tail;
                }
                match prev_ratio {
                    Some(qq) if (q - qq).abs() <= 1e-7 * (1.0 - q).max(1e-3) => {
                        geometric += 1;
                        if geometric >= 3 {
                            return sum + tail;
                        }
                    }
                    _ => geometric = 0,
                }
            } else {
                // sign change: oscillating contributions, no extrapolation
                nondecay = 0;
                geometric = 0;
                last_tail = 0.0;
            }
            prev_ratio = Some(q);
        }
        prev = Some(p);
    }
    if nondecay > 0 {
        f64::INFINITY.copysign(sum)
    } else {
        sum + last_tail
    }
}

/// `∫_a^∞ f`, with `a > 0`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, cfg: &QuadConfig) -> f64 {
    assert!(a > 0.0, "lower limit of an upper tail must be positive");
    sum_octaves(
        |k| {
            let lo = a * 2f64.powi(k as i32);
            let hi = 2.0 * lo;
            if !hi.is_finite() {
                return 0.0;
            }
            gauss_kronrod(&f, lo, hi, cfg).value
        },
        cfg,
    )
}

/// `∫_0^b f`, with `b > 0`, for integrands that may be singular at `0`.
pub fn integrate_from_zero<F: Fn(f64) -> f64>(f: F, b: f64, cfg: &QuadConfig) -> f64 {
    assert!(b > 0.0, "upper limit must be positive");
    sum_octaves(
        |k| {
            let hi = b * 0.5f64.powi(k as i32);
            let lo = 0.5 * hi;
            if lo <= f64::MIN_POSITIVE {
                return 0.0;
            }
            gauss_kronrod(&f, lo, hi, cfg).value
        },
        cfg,
    )
}

/// `∫_a^b f` for `0 ≤ a < b ≤ ∞`; the endpoints `0` and `∞` are treated as
/// improper.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    match (a == 0.0, b.is_infinite()) {
        (false, false) => gauss_kronrod(&f, a, b, cfg).value,
        (true, false) => integrate_from_zero(&f, b, cfg),
        (false, true) => integrate_to_infinity(&f, a, cfg),
        (true, true) => {
            let head = integrate_from_zero(&f, 1.0, cfg);
            if head.is_infinite() {
                return head;
            }
            head + integrate_to_infinity(&f, 1.0, cfg)
        }
    }
}

/// Integrates over `[points[0], points[last]]`, splitting at every interior
/// point. Points must be non-decreasing; the last may be `∞`.
pub fn integrate_piecewise<F: Fn(f64) -> f64>(f: F, points: &[f64], cfg: &QuadConfig) -> f64 {
    let mut total = 0.0;
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b > a {
            total += integrate(&f, a, b, cfg);
            if total.is_infinite() || total.is_nan() {
                return total;
            }
        }
    }
    total
}

/// Composite midpoint rule in `log r` over `[a, b]`, `0 < a < b < ∞`.
pub fn log_midpoint<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, nodes_per_decade: usize) -> f64 {
    if !(b > a) || a <= 0.0 {
        return 0.0;
    }
    let decades = (b / a).log10();
    let nodes = ((nodes_per_decade as f64) * decades).ceil().max(1.0) as usize;
    let step = (b / a).ln() / nodes as f64;
    let la = a.ln();
    (0..nodes)
        .map(|j| {
            let r = (la + (j as f64 + 0.5) * step).exp();
            f(r) * r
        })
        .sum::<f64>()
        * step
}

/// `∫_a^b s^e ds` for `0 ≤ a < b ≤ ∞`; `∞` when the integral diverges.
pub fn power_integral(e: f64, a: f64, b: f64) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let k = e + 1.0;
    if (a == 0.0 && k <= 0.0) || (b.is_infinite() && k >= 0.0) {
        return f64::INFINITY;
    }
    if k.abs() < 1e-14 {
        return (b / a).ln();
    }
    let hi = if b.is_infinite() { 0.0 } else { b.powf(k) };
    let lo = if a == 0.0 { 0.0 } else { a.powf(k) };
    (hi - lo) / k
}
