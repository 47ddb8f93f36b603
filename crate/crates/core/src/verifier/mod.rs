//! Inequality verification suites with fitted constants and refinement
//! stability.
//!
//! Every suite evaluates its cases twice, at a base resolution and at a
//! refined one (tighter quadrature, finer profiles). Constants are fitted to
//! powers of two from the union of both runs; stability is the relative
//! change of the raw extreme ratio between the runs.

pub mod fit;
mod suites;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::fmt_num;
use crate::quadrature::QuadConfig;
use fit::{dyadic_ceil, dyadic_floor, extreme_ratio, BoundDirection};

pub use suites::{
    default_t_grid, hm_wolff_cases, rearrangement_cases, run_suite, verify_appendix, verify_hm_wolff,
    verify_lorentz_mappings, verify_maximal, verify_orlicz_bounds, verify_sharpness, verify_upper_bound, CaseProfile,
    HmCase, Suite, UpperCase,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub seed: u64,
    /// largest admissible relative change of a raw constant under refinement
    pub stability_threshold: f64,
    pub quad: QuadConfig,
    /// sample points per decade of `t`
    pub t_per_decade: usize,
    /// random members per family
    pub random_cases: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            stability_threshold: 0.05,
            quad: QuadConfig {
                rel_tol: 1e-8,
                ..QuadConfig::default()
            },
            t_per_decade: 6,
            random_cases: 2,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.stability_threshold > 0.0) || self.t_per_decade == 0 {
            return Err(Error::InvalidParameter(
                "stability threshold and t_per_decade must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Resolution of one pass over a suite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolution {
    pub quad: QuadConfig,
    /// multiplier for profile pieces and sampling densities
    pub factor: usize,
}

impl Resolution {
    pub fn base(cfg: &SuiteConfig) -> Self {
        Self { quad: cfg.quad, factor: 1 }
    }

    pub fn refined(cfg: &SuiteConfig) -> Self {
        Self {
            quad: cfg.quad.refined(100.0),
            factor: 2,
        }
    }
}

/// Which constant a case's samples feed, and in which direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantSpec {
    pub name: String,
    pub direction: BoundDirection,
    /// value the raw ratio must respect (`≤` for upper, `≥` for lower
    /// bounds), with relative tolerance `tol`
    pub limit: Option<f64>,
    pub tol: f64,
}

impl ConstantSpec {
    pub fn upper(name: &str) -> Self {
        Self {
            name: name.into(),
            direction: BoundDirection::Upper,
            limit: None,
            tol: 0.0,
        }
    }

    pub fn lower(name: &str) -> Self {
        Self {
            name: name.into(),
            direction: BoundDirection::Lower,
            limit: None,
            tol: 0.0,
        }
    }

    pub fn limited(mut self, limit: f64, tol: f64) -> Self {
        self.limit = Some(limit);
        self.tol = tol;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    /// abscissa: `t`, `|x|`, or the case index, depending on the suite
    pub at: f64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub label: String,
    pub constants: Vec<ConstantSpec>,
    pub samples: Vec<Sample>,
}

impl CaseReport {
    pub fn new(label: impl Into<String>, constants: Vec<ConstantSpec>) -> Self {
        Self {
            label: label.into(),
            constants,
            samples: Vec::new(),
        }
    }

    pub fn push(&mut self, at: f64, lhs: f64, rhs: f64) {
        self.samples.push(Sample { at, lhs, rhs });
    }

    /// `max lhs/rhs` over samples with a nonzero left side.
    pub fn worst_ratio(&self) -> Option<f64> {
        let (l, r) = self.sides();
        extreme_ratio(&l, &r, BoundDirection::Upper).ok().flatten()
    }

    fn sides(&self) -> (Vec<f64>, Vec<f64>) {
        self.samples.iter().map(|s| (s.lhs, s.rhs)).unzip()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedConstant {
    pub name: String,
    pub direction: BoundDirection,
    pub raw: Option<f64>,
    pub refined_raw: Option<f64>,
    /// power of two valid for both passes
    pub dyadic: f64,
    pub stability: f64,
    pub limit: Option<f64>,
    pub within_limit: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub version: String,
    pub config: SuiteConfig,
    pub cases: Vec<CaseReport>,
    pub refined_cases: Vec<CaseReport>,
    /// cases skipped by a precondition, with the reason
    pub excluded: Vec<String>,
    pub constants: Vec<FittedConstant>,
    /// samples no finite positive constant can satisfy
    pub violations: usize,
    pub stability: f64,
    pub pass: bool,
}

impl VerificationReport {
    pub(crate) fn assemble(
        suite: &str,
        config: SuiteConfig,
        cases: Vec<CaseReport>,
        refined_cases: Vec<CaseReport>,
        excluded: Vec<String>,
    ) -> Result<Self> {
        if cases.is_empty() {
            return Err(Error::EmptyInput("verification cases"));
        }
        let mut specs: Vec<ConstantSpec> = Vec::new();
        for c in &cases {
            for s in &c.constants {
                if !specs.iter().any(|x| x.name == s.name) {
                    specs.push(s.clone());
                }
            }
        }
        let mut violations = 0;
        for c in cases.iter().chain(&refined_cases) {
            for s in &c.samples {
                if s.lhs.is_nan() || s.rhs.is_nan() {
                    violations += 1;
                    continue;
                }
                for spec in &c.constants {
                    let bad = match spec.direction {
                        BoundDirection::Upper => s.lhs > 0.0 && (s.rhs == 0.0 || (s.lhs.is_infinite() && s.rhs.is_finite())),
                        BoundDirection::Lower => s.rhs > 0.0 && (s.lhs == 0.0 || (s.rhs.is_infinite() && s.lhs.is_finite())),
                    };
                    if bad {
                        violations += 1;
                    }
                }
            }
        }
        let mut constants = Vec::new();
        let mut stability: f64 = 0.0;
        for spec in specs {
            let raw = pooled_ratio(&cases, &spec)?;
            let refined_raw = if refined_cases.is_empty() { raw } else { pooled_ratio(&refined_cases, &spec)? };
            let stab = match (raw, refined_raw) {
                (Some(a), Some(b)) if a.is_finite() && b.is_finite() && a > 0.0 => (b - a).abs() / a,
                (None, None) => 0.0,
                (Some(a), Some(b)) if a == b => 0.0,
                _ => f64::INFINITY,
            };
            stability = stability.max(stab);
            let both = [raw, refined_raw];
            let vals = both.iter().flatten().copied();
            let (dyadic, extreme) = match spec.direction {
                BoundDirection::Upper => {
                    let m = vals.fold(f64::NEG_INFINITY, f64::max);
                    (if m > 0.0 { dyadic_ceil(m) } else { 1.0 }, m)
                }
                BoundDirection::Lower => {
                    let m = vals.fold(f64::INFINITY, f64::min);
                    (if m.is_finite() && m > 0.0 { dyadic_floor(m) } else if m == 0.0 { 0.0 } else { 1.0 }, m)
                }
            };
            let within_limit = match (spec.limit, spec.direction) {
                (None, _) => true,
                (Some(l), BoundDirection::Upper) => !(extreme > l * (1.0 + spec.tol)),
                (Some(l), BoundDirection::Lower) => !(extreme < l * (1.0 - spec.tol)),
            };
            constants.push(FittedConstant {
                name: spec.name.clone(),
                direction: spec.direction,
                raw,
                refined_raw,
                dyadic,
                stability: stab,
                limit: spec.limit,
                within_limit,
            });
        }
        let threshold = config.stability_threshold;
        let pass = violations == 0
            && stability < threshold
            && constants.iter().all(|c| c.within_limit && c.dyadic.is_finite() && c.dyadic > 0.0);
        Ok(Self {
            suite: suite.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config,
            cases,
            refined_cases,
            excluded,
            constants,
            violations,
            stability,
            pass,
        })
    }

    /// One row per sample of the base pass: case, abscissa, both sides and
    /// their ratio.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("case,label,at,lhs,rhs,ratio\n");
        for (k, c) in self.cases.iter().enumerate() {
            for s in &c.samples {
                let ratio = if s.rhs == 0.0 && s.lhs == 0.0 { 0.0 } else { s.lhs / s.rhs };
                out.push_str(&format!(
                    "{k},{},{},{},{},{}\n",
                    c.label.replace(',', ";"),
                    fmt_num(s.at),
                    fmt_num(s.lhs),
                    fmt_num(s.rhs),
                    fmt_num(ratio)
                ));
            }
        }
        out
    }

    /// One line per fitted constant.
    pub fn summary(&self) -> String {
        let mut out = format!(
            "suite {}: {} ({} cases, {} violations, stability {:.3e})\n",
            self.suite,
            if self.pass { "pass" } else { "FAIL" },
            self.cases.len(),
            self.violations,
            self.stability
        );
        for c in &self.constants {
            out.push_str(&format!(
                "  {} [{:?}] raw {:?} refined {:?} dyadic {} limit {:?} ok {}\n",
                c.name, c.direction, c.raw, c.refined_raw, c.dyadic, c.limit, c.within_limit
            ));
        }
        out
    }

    pub fn constant(&self, name: &str) -> Option<&FittedConstant> {
        self.constants.iter().find(|c| c.name == name)
    }
}

fn pooled_ratio(cases: &[CaseReport], spec: &ConstantSpec) -> Result<Option<f64>> {
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    for c in cases.iter().filter(|c| c.constants.iter().any(|s| s.name == spec.name)) {
        for s in &c.samples {
            if s.lhs.is_nan() || s.rhs.is_nan() {
                continue;
            }
            lhs.push(s.lhs);
            rhs.push(s.rhs);
        }
    }
    if lhs.is_empty() {
        return Ok(None);
    }
    extreme_ratio(&lhs, &rhs, spec.direction)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assemble_fits_and_flags() {
        let mut a = CaseReport::new("a", vec![ConstantSpec::upper("C")]);
        a.push(1.0, 3.0, 1.0);
        a.push(2.0, 1.0, 1.0);
        let mut b = a.clone();
        b.samples[0].lhs = 3.03;
        let rep = VerificationReport::assemble("t", SuiteConfig::default(), vec![a.clone()], vec![b], vec![]).unwrap();
        let c = rep.constant("C").unwrap();
        assert_eq!(c.dyadic, 4.0);
        assert!((rep.stability - 0.01).abs() < 1e-12);
        assert!(rep.pass);
        let mut bad = a;
        bad.push(3.0, 1.0, 0.0);
        let rep = VerificationReport::assemble("t", SuiteConfig::default(), vec![bad], vec![], vec![]).unwrap();
        assert_eq!(rep.violations, 1);
        assert!(!rep.pass);
        assert!(rep.to_csv().starts_with("case,label,at,lhs,rhs,ratio\n0,a,"));
    }

    #[test]
    fn limits_are_enforced() {
        let mut a = CaseReport::new("a", vec![ConstantSpec::upper("C").limited(1.0, 1e-9)]);
        a.push(1.0, 1.0 + 1e-6, 1.0);
        let rep = VerificationReport::assemble("t", SuiteConfig::default(), vec![a], vec![], vec![]).unwrap();
        assert!(!rep.pass);
    }
}
