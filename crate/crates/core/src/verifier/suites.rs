use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CaseReport, ConstantSpec, Resolution, SuiteConfig, VerificationReport};
use crate::error::{Error, Result};
use crate::geometry::omega;
use crate::hardy::{head_bound, rhs_rearrangement_bound};
use crate::monotone::MonotoneFn;
use crate::nfunction::NFunction;
use crate::norms::{lorentz_norm, LorentzParams, LorentzVariant};
use crate::potentials::{
    finiteness_check, frac_maximal, havin_mazya, wolff, Finiteness, HavinMazyaConfig, PotentialParams, Source,
};
use crate::quadrature::{integrate_from_zero, integrate_to_infinity, power_integral, QuadConfig};
use crate::rearrangement::{RadialLift, StepProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    UpperBound,
    Sharpness,
    OrliczBounds,
    LorentzMappings,
    Maximal,
    Appendix,
    HmWolff,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::UpperBound,
        Suite::Sharpness,
        Suite::OrliczBounds,
        Suite::LorentzMappings,
        Suite::Maximal,
        Suite::Appendix,
        Suite::HmWolff,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::UpperBound => "upper_bound",
            Suite::Sharpness => "sharpness",
            Suite::OrliczBounds => "orlicz_bounds",
            Suite::LorentzMappings => "lorentz_mappings",
            Suite::Maximal => "maximal",
            Suite::Appendix => "appendix",
            Suite::HmWolff => "hm_wolff",
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite `{s}`")))
    }
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<VerificationReport> {
    cfg.validate()?;
    match suite {
        Suite::UpperBound => verify_upper_bound(&rearrangement_cases(cfg), &default_t_grid(cfg), cfg),
        Suite::Sharpness => verify_sharpness(&rearrangement_cases(cfg), &default_t_grid(cfg), cfg),
        Suite::OrliczBounds => verify_orlicz_bounds(cfg),
        Suite::LorentzMappings => verify_lorentz_mappings(cfg),
        Suite::Maximal => verify_maximal(cfg),
        Suite::Appendix => verify_appendix(cfg),
        Suite::HmWolff => verify_hm_wolff(&hm_wolff_cases(cfg), cfg),
    }
}

/// Non-increasing profile of a test case; capped powers are rebuilt with
/// more steps on refinement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CaseProfile {
    Steps { profile: StepProfile },
    PowerCutoff { a: f64, eps: f64, pieces: usize },
}

impl CaseProfile {
    pub fn at(&self, factor: usize) -> Result<StepProfile> {
        match self {
            CaseProfile::Steps { profile } => Ok(profile.clone()),
            CaseProfile::PowerCutoff { a, eps, pieces } => StepProfile::power_cutoff(*a, *eps, pieces * factor),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UpperCase {
    pub label: String,
    pub alpha: f64,
    pub n: usize,
    pub psi: MonotoneFn,
    /// rearrangement of the radially decreasing datum
    pub profile: CaseProfile,
}

fn radius_of(t: f64, n: usize) -> f64 {
    (t / omega(n)).powf(1.0 / n as f64)
}

fn on_axis(r: f64, n: usize) -> Vec<f64> {
    let mut x = vec![0.0; n];
    x[0] = r;
    x
}

fn lift(prof: &StepProfile, n: usize) -> Result<Source> {
    Ok(Source::from(RadialLift::new(prof.clone(), n)?))
}

fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let k = (decades * per_decade as f64).round().max(1.0) as usize;
    (0..=k).map(|i| lo * (hi / lo).powf(i as f64 / k as f64)).collect()
}

/// Inserts the geometric mean between neighbouring points.
fn densify(t: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * t.len());
    for w in t.windows(2) {
        out.push(w[0]);
        out.push((w[0] * w[1]).sqrt());
    }
    out.extend(t.last());
    out
}

fn seeded(cfg: &SuiteConfig, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(1_000_003).wrapping_add(stream))
}

pub fn default_t_grid(cfg: &SuiteConfig) -> Vec<f64> {
    log_grid(1e-3, 1e2, cfg.t_per_decade)
}

fn psi_catalog() -> Vec<(String, MonotoneFn)> {
    let mut out: Vec<(String, MonotoneFn)> = [1.5, 2.0, 3.0]
        .iter()
        .map(|&p| (format!("power p={p}"), MonotoneFn::power(1.0 / (p - 1.0))))
        .collect();
    out.push((
        "zygmund inverse p=2 a=1 s=100".into(),
        MonotoneFn::inverse_of(MonotoneFn::ZygmundDerivative { p: 2.0, alpha: 1.0, s: 100.0 }),
    ));
    out
}

fn profile_catalog(cfg: &SuiteConfig, stream: u64) -> Vec<(String, CaseProfile)> {
    let mut rng = seeded(cfg, stream);
    let mut out: Vec<(String, CaseProfile)> = (0..cfg.random_cases)
        .map(|k| {
            (
                format!("steps#{k}"),
                CaseProfile::Steps {
                    profile: StepProfile::random(&mut rng, 5),
                },
            )
        })
        .collect();
    out.push((
        "power cutoff a=0.3".into(),
        CaseProfile::PowerCutoff {
            a: 0.3,
            eps: 1e-3,
            pieces: 24,
        },
    ));
    out
}

/// ψ catalogue × profile catalogue × `(n, α) ∈ {(3, 1/2), (2, 1/2)}`.
pub fn rearrangement_cases(cfg: &SuiteConfig) -> Vec<UpperCase> {
    let mut out = Vec::new();
    for (n, alpha) in [(3usize, 0.5), (2, 0.5)] {
        for (pl, psi) in psi_catalog() {
            for (fl, profile) in profile_catalog(cfg, 1) {
                out.push(UpperCase {
                    label: format!("n={n} alpha={alpha} {pl} {fl}"),
                    alpha,
                    n,
                    psi: psi.clone(),
                    profile,
                });
            }
        }
    }
    out
}

/// Runs `pass` at base and refined resolution and assembles the report.
fn two_pass(
    suite: &str,
    cfg: &SuiteConfig,
    excluded: Vec<String>,
    pass: impl Fn(Resolution) -> Result<Vec<CaseReport>>,
) -> Result<VerificationReport> {
    cfg.validate()?;
    let base = pass(Resolution::base(cfg))?;
    let refined = pass(Resolution::refined(cfg))?;
    VerificationReport::assemble(suite, *cfg, base, refined, excluded)
}

fn split_finite(cases: &[UpperCase]) -> (Vec<&UpperCase>, Vec<String>) {
    let mut keep = Vec::new();
    let mut excluded = Vec::new();
    for c in cases {
        match finiteness_check(&c.psi, c.alpha, c.n) {
            Finiteness::Finite => keep.push(c),
            other => excluded.push(format!("{}: potential {:?}", c.label, other).to_lowercase()),
        }
    }
    (keep, excluded)
}

/// `(W f)*(t)` and `∫_t^∞ s^{α/n−1} ψ(s^{α/n} f**(s)) ds` on the grid.
fn rearrangement_samples(case: &UpperCase, t_grid: &[f64], res: Resolution, spec: ConstantSpec) -> Result<CaseReport> {
    let prof = case.profile.at(res.factor)?;
    let src = lift(&prof, case.n)?;
    let mut params = PotentialParams::new(case.alpha, case.psi.clone());
    params.quad = res.quad;
    let rows = t_grid
        .par_iter()
        .map(|&t| {
            let lhs = wolff(&src, &on_axis(radius_of(t, case.n), case.n), &params)?;
            let rhs = rhs_rearrangement_bound(&prof, case.alpha, case.n, &case.psi, 1.0, t, &res.quad)?;
            Ok((t, lhs, rhs))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rep = CaseReport::new(case.label.clone(), vec![spec]);
    for (t, l, r) in rows {
        rep.push(t, l, r);
    }
    Ok(rep)
}

fn rearrangement_suite(
    suite: &str,
    cases: &[UpperCase],
    t_grid: &[f64],
    cfg: &SuiteConfig,
    spec: ConstantSpec,
) -> Result<VerificationReport> {
    if t_grid.is_empty() {
        return Err(Error::EmptyInput("t grid"));
    }
    if t_grid.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(Error::InvalidParameter("t grid points must be positive and finite".into()));
    }
    let (keep, excluded) = split_finite(cases);
    if keep.is_empty() {
        return Err(Error::EmptyInput("cases with a finite potential"));
    }
    let mut sorted = t_grid.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    two_pass(suite, cfg, excluded, |res| {
        let grid = if res.factor > 1 { densify(&sorted) } else { sorted.clone() };
        keep.par_iter()
            .map(|c| rearrangement_samples(c, &grid, res, spec.clone()))
            .collect()
    })
}

/// `(W f)*(t) ≤ C₁ ∫_t^∞ s^{α/n−1} ψ(C₂ s^{α/n} f**(s)) ds` with `C₂ = 1`.
pub fn verify_upper_bound(cases: &[UpperCase], t_grid: &[f64], cfg: &SuiteConfig) -> Result<VerificationReport> {
    rearrangement_suite("upper_bound", cases, t_grid, cfg, ConstantSpec::upper("C_W1"))
}

/// `C₃ ∫_t^∞ s^{α/n−1} ψ(C₄ s^{α/n} f**(s)) ds ≤ (W f)*(t)` with `C₄ = 1`
/// for radially decreasing data.
pub fn verify_sharpness(cases: &[UpperCase], t_grid: &[f64], cfg: &SuiteConfig) -> Result<VerificationReport> {
    rearrangement_suite("sharpness", cases, t_grid, cfg, ConstantSpec::lower("C_W3"))
}

/// Two-sided bound with `ψ = g⁻¹` and the weak-type estimate
/// `t^{1−α/n} g(t^{−α/n} (W f)*(t)) ≤ C ‖f‖_{Λ^{1,1}}`.
pub fn verify_orlicz_bounds(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let n = 3usize;
    let catalog: Vec<(String, NFunction, f64)> = vec![
        ("G=t^2/2".into(), NFunction::power(2.0)?, 1.0),
        ("G=t^2 log(100+t)".into(), NFunction::zygmund(2.0, 1.0, 100.0)?, 1.0),
        ("G=t^2/2".into(), NFunction::power(2.0)?, 2.0),
    ];
    let profiles = profile_catalog(cfg, 2);
    let mut excluded = Vec::new();
    let mut cases = Vec::new();
    for (gl, g, alpha) in catalog {
        let (_, s_g) = g.exact_indices().expect("catalog functions carry exact indices");
        if alpha >= n as f64 / s_g {
            excluded.push(format!("{gl} alpha={alpha}: needs alpha < n/s_G = {}", n as f64 / s_g));
            continue;
        }
        for (fl, p) in &profiles {
            cases.push((format!("{gl} alpha={alpha} {fl}"), g.clone(), alpha, p.clone()));
        }
    }
    let t_grid = default_t_grid(cfg);
    two_pass("orlicz_bounds", cfg, excluded, |res| {
        let grid = if res.factor > 1 { densify(&t_grid) } else { t_grid.clone() };
        cases
            .par_iter()
            .map(|(label, g, alpha, profile)| {
                let prof = profile.at(res.factor)?;
                let ginv = g.derivative_inverse_fn();
                let case = UpperCase {
                    label: label.clone(),
                    alpha: *alpha,
                    n,
                    psi: ginv,
                    profile: profile.clone(),
                };
                let two_sided = rearrangement_samples(&case, &grid, res, ConstantSpec::upper("C_W"))?;
                let l1 = lorentz_norm(&prof, &LorentzParams::new(1.0, 1.0, LorentzVariant::Star))?;
                let beta = alpha / n as f64;
                let mut rep = CaseReport::new(
                    label.clone(),
                    vec![ConstantSpec::upper("C_W"), ConstantSpec::lower("c_W")],
                );
                let mut weak = CaseReport::new(format!("{label} weak"), vec![ConstantSpec::upper("C_weak")]);
                for s in &two_sided.samples {
                    rep.push(s.at, s.lhs, s.rhs);
                    let t = s.at;
                    weak.push(t, t.powf(1.0 - beta) * g.derivative(t.powf(-beta) * s.lhs), l1);
                }
                Ok(vec![rep, weak])
            })
            .collect::<Result<Vec<Vec<CaseReport>>>>()
            .map(|v| v.into_iter().flatten().collect())
    })
}

/// Lorentz-space mapping properties for `ψ = id`, `n = 3`, `α = 1/2`:
/// `‖W f‖_{Λ^{6,1}} ≤ c ‖f‖_{Λ^{2,1}}`, the weak-type bound
/// `sup_t t^{2/3} (W f)*(t) ≤ c ‖f‖_{L¹}`, and the `L^∞` bound of truncated
/// potentials.
pub fn verify_lorentz_mappings(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let n = 3usize;
    let alpha = 0.5;
    let (sigma, rho, beta_exp) = (2.0, 1.0, 1.0);
    let beta = alpha / n as f64;
    let nf = n as f64;
    let gamma = beta_exp * sigma * nf / (rho * nf - alpha * sigma * beta_exp - alpha * sigma * rho);
    if !(sigma > 1.0 && alpha < rho * nf / (sigma * beta_exp + sigma * rho) && gamma > 0.0) {
        return Err(Error::InvalidParameter("inadmissible Lorentz mapping parameters".into()));
    }
    let weak_exp = (nf * rho - alpha * (rho + 1.0)) / nf;
    let psi = MonotoneFn::identity();
    let mut rng = seeded(cfg, 3);
    let mut family: Vec<(String, CaseProfile)> = (0..6)
        .map(|k| {
            (
                format!("steps#{k}"),
                CaseProfile::Steps {
                    profile: StepProfile::random(&mut rng, 5),
                },
            )
        })
        .collect();
    for a in [0.2, 0.4] {
        family.push((format!("power cutoff a={a}"), CaseProfile::PowerCutoff { a, eps: 1e-3, pieces: 24 }));
    }
    for len in [0.5, 3.0] {
        family.push((
            format!("indicator |E|={len}"),
            CaseProfile::Steps {
                profile: StepProfile::indicator(len, 1.0)?,
            },
        ));
    }
    let t_grid = default_t_grid(cfg);
    two_pass("lorentz_mappings", cfg, Vec::new(), |res| {
        let grid = if res.factor > 1 { densify(&t_grid) } else { t_grid.clone() };
        family
            .par_iter()
            .map(|(label, profile)| {
                let prof = profile.at(res.factor)?;
                let src = lift(&prof, n)?;
                let mut params = PotentialParams::new(alpha, psi.clone());
                params.quad = res.quad;
                let at = |t: f64| wolff(&src, &on_axis(radius_of(t, n), n), &params).unwrap_or(f64::NAN);
                let outer = QuadConfig {
                    rel_tol: res.quad.rel_tol.max(1e-10) * 100.0,
                    ..res.quad
                };
                let integrand = |t: f64| t.powf(beta_exp / gamma - 1.0) * at(t).powf(beta_exp);
                let split = prof.support();
                let lhs = integrate_from_zero(integrand, split, &outer) + integrate_to_infinity(integrand, split, &outer);
                let src_norm = lorentz_norm(&prof, &LorentzParams::new(sigma, rho, LorentzVariant::Star))?.powf(rho);
                let mut strong = CaseReport::new(format!("{label} strong"), vec![ConstantSpec::upper("C_strong")]);
                strong.push(0.0, lhs, src_norm);

                let l1 = lorentz_norm(&prof, &LorentzParams::new(1.0, 1.0, LorentzVariant::Star))?.powf(rho);
                let mut weak = CaseReport::new(format!("{label} weak"), vec![ConstantSpec::upper("C_weak")]);
                for &t in &grid {
                    weak.push(t, t.powf(weak_exp) * at(t), l1);
                }

                let mut linf = CaseReport::new(format!("{label} truncated"), vec![ConstantSpec::upper("C_linf")]);
                for big_r in [0.25, 0.5, 1.0, 2.0] {
                    let lhs = wolff(&src, &vec![0.0; n], &params.clone().truncated(big_r))?;
                    let w = omega(n);
                    let rhs = head_bound(&prof, alpha, n, &psi, w.powf(1.0 - beta), w * big_r.powi(n as i32), &res.quad)?;
                    linf.push(big_r, lhs, rhs);
                }
                Ok(vec![strong, weak, linf])
            })
            .collect::<Result<Vec<Vec<CaseReport>>>>()
            .map(|v| v.into_iter().flatten().collect())
    })
}

/// `sup_{s ≥ t} s^β f**(s)` for a step profile.
fn sup_tail(prof: &StepProfile, beta: f64, t: f64) -> f64 {
    let h = |s: f64| s.powf(beta - 1.0) * prof.primitive(s);
    let mut best = h(t);
    let mut lo = 0.0;
    for (a, b, v) in prof.pieces() {
        lo = b;
        if b <= t {
            continue;
        }
        best = best.max(h(b));
        if beta > 0.0 && beta < 1.0 && v > 0.0 {
            // s^{β−1}(c + v s) is stationary at (1−β)c/(βv)
            let c = prof.primitive(a) - v * a;
            let s = (1.0 - beta) * c / (beta * v);
            if s > a.max(t) && s < b {
                best = best.max(h(s));
            }
        }
    }
    if beta >= 1.0 && prof.total_mass() > 0.0 {
        return f64::INFINITY;
    }
    let _ = lo;
    best
}

/// `(M_α f)*(t) ≤ C_M sup_{s>t} s^{α/n} f**(s)` on radially decreasing
/// data, read off along a ray.
pub fn verify_maximal(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let mut rng = seeded(cfg, 4);
    let mut cases: Vec<(String, usize, f64, StepProfile)> = vec![
        ("n=1 interval alpha=0".into(), 1, 0.0, StepProfile::indicator(2.0, 1.0)?),
        ("n=1 interval alpha=0.5".into(), 1, 0.5, StepProfile::indicator(2.0, 1.0)?),
        ("n=3 constant alpha=0".into(), 3, 0.0, StepProfile::indicator(1.0, 2.0)?),
        ("n=3 power cutoff alpha=1.5".into(), 3, 1.5, StepProfile::power_cutoff(0.3, 1e-3, 24)?),
    ];
    for (n, alpha) in [(2usize, 0.5), (2, 1.0), (3, 1.0)] {
        for k in 0..cfg.random_cases {
            cases.push((format!("n={n} alpha={alpha} steps#{k}"), n, alpha, StepProfile::random(&mut rng, 5)));
        }
    }
    two_pass("maximal", cfg, Vec::new(), |res| {
        cases
            .par_iter()
            .map(|(label, n, alpha, prof)| {
                let src = lift(prof, *n)?;
                let beta = alpha / *n as f64;
                let s = prof.support();
                let grid = log_grid(1e-2 * s, 1e2 * s, 4 * res.factor);
                let mut rep = CaseReport::new(label.clone(), vec![ConstantSpec::upper("C_M")]);
                for t in grid {
                    let m = frac_maximal(&src, &on_axis(radius_of(t, *n), *n), *alpha)?;
                    rep.push(t, m.value, sup_tail(prof, beta, t));
                }
                Ok(rep)
            })
            .collect()
    })
}

/// One-dimensional identities and bounds: the integral of `g⁻¹(C s^{−β})`, the Jensen-type
/// inequality, the secant comparison, and the inverse equivalences of the
/// Zygmund families.
pub fn verify_appendix(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let mut rng = seeded(cfg, 5);
    let jensen_profiles: Vec<StepProfile> = (0..cfg.random_cases.max(1) * 2)
        .map(|_| StepProfile::random(&mut rng, 5))
        .collect();
    two_pass("appendix", cfg, Vec::new(), |res| {
        let quad = QuadConfig {
            rel_tol: 1e-13,
            ..res.quad
        };
        let ts = log_grid(1e-3, 1e3, 3 * res.factor);
        let mut out = Vec::new();

        // exact indices: constants are attained for power G
        for (label, g, beta, cs) in [
            ("g=id", NFunction::power(2.0)?, 2.0, vec![1.0, 3.0]),
            ("G=t^1.5/1.5", NFunction::power(1.5)?, 1.5, vec![1.0]),
            ("G=t^3/3", NFunction::power(3.0)?, 3.0, vec![1.0, 0.5]),
        ] {
            let (i_g, s_g) = g.exact_indices().unwrap();
            let c1 = (i_g - 1.0) / (beta - i_g + 1.0);
            let c2 = (s_g - 1.0) / (beta - s_g + 1.0);
            for c in cs {
                let mut lo = CaseReport::new(format!("gpow {label} C={c} lower"), vec![ConstantSpec::lower("gpow_lower").limited(1.0, 1e-8)]);
                let mut up = CaseReport::new(format!("gpow {label} C={c} upper"), vec![ConstantSpec::upper("gpow_upper").limited(1.0, 1e-8)]);
                for &t in &ts {
                    let integral = integrate_to_infinity(|s| g.derivative_inverse(c * s.powf(-beta)).unwrap_or(f64::NAN), t, &quad);
                    let base = t * g.derivative_inverse(c * t.powf(-beta))?;
                    lo.push(t, integral, c1 * base);
                    up.push(t, integral, c2 * base);
                }
                out.push(lo);
                out.push(up);
            }
        }
        // estimated indices only bound the ratio up to comparability
        let zyg = NFunction::zygmund(2.0, 1.0, 100.0)?;
        let (i_g, s_g) = zyg.exact_indices().unwrap();
        let beta = 2.0;
        let mut rep = CaseReport::new(
            "gpow zygmund p=2 a=1 s=100",
            vec![ConstantSpec::lower("gpow_zygmund_lower"), ConstantSpec::upper("gpow_zygmund_upper")],
        );
        let mid = 0.5 * ((i_g - 1.0) / (beta - i_g + 1.0) + (s_g - 1.0) / (beta - s_g + 1.0));
        for &t in &ts {
            let integral = integrate_to_infinity(|s| zyg.derivative_inverse(s.powf(-beta)).unwrap_or(f64::NAN), t, &quad);
            rep.push(t, integral, mid * t * zyg.derivative_inverse(t.powf(-beta))?);
        }
        out.push(rep);

        // h(Φ(t)/t) ≤ t^{γ−1} ∫₀^t s^{−γ} h(φ(s)) ds for h = r^k, γ + k ≥ 1
        for (gamma, k) in [(0.0, 1.0), (0.0, 2.0), (0.5, 0.5), (0.5, 1.5)] {
            for (j, phi) in jensen_profiles.iter().enumerate() {
                let mut rep = CaseReport::new(
                    format!("jensen gamma={gamma} k={k} phi#{j}"),
                    vec![ConstantSpec::upper("jensen").limited(1.0, 1e-12)],
                );
                for &t in &log_grid(1e-2, 1e1, 4 * res.factor) {
                    let lhs = (phi.primitive(t) / t).powf(k);
                    let mut acc = 0.0;
                    for (a, b, v) in phi.pieces() {
                        if a >= t {
                            break;
                        }
                        acc += power_integral(-gamma, a, b.min(t)) * v.powf(k);
                    }
                    rep.push(t, lhs, t.powf(gamma - 1.0) * acc);
                }
                out.push(rep);
            }
        }

        // ∫₀^t h ≍ t h(t) for h(t) = t^{−1/(s_G−1)} g⁻¹(t)
        for (label, g) in [
            ("G=t^1.5/1.5", NFunction::power(1.5)?),
            ("G=t^3/3", NFunction::power(3.0)?),
            ("G=t^2 log(100+t)", NFunction::zygmund(2.0, 1.0, 100.0)?),
        ] {
            let (_, s_g) = g.exact_indices().unwrap();
            let h = |t: f64| t.powf(-1.0 / (s_g - 1.0)) * g.derivative_inverse(t).unwrap_or(f64::NAN);
            let mut rep = CaseReport::new(
                format!("secant {label}"),
                vec![ConstantSpec::upper("secant_upper"), ConstantSpec::lower("secant_lower")],
            );
            for &t in &ts {
                rep.push(t, integrate_from_zero(h, t, &quad), t * h(t));
            }
            out.push(rep);
        }

        // g_s⁻¹(t) against the model inverse
        let wide = log_grid(1e-6, 1e6, 4 * res.factor);
        let (p, a, s) = (2.0, 1.0, 1e6);
        for (label, g, model) in [
            (
                "zygmund inverse",
                NFunction::zygmund(p, a, s)?,
                Box::new(move |t: f64| t.powf(1.0 / (p - 1.0)) * (s + t).ln().powf(-a / (p - 1.0))) as Box<dyn Fn(f64) -> f64 + Sync>,
            ),
            (
                "zygmund loglog inverse",
                NFunction::zygmund_loglog(p, a, s)?,
                Box::new(move |t: f64| t.powf(1.0 / (p - 1.0)) * (s + t).ln().ln().powf(-a / (p - 1.0))),
            ),
        ] {
            let mut rep = CaseReport::new(
                label,
                vec![
                    ConstantSpec::upper("inverse_upper").limited(4.0, 0.0),
                    ConstantSpec::lower("inverse_lower").limited(0.25, 0.0),
                ],
            );
            for &t in &wide {
                rep.push(t, g.derivative_inverse(t)?, model(t));
            }
            out.push(rep);
        }
        Ok(out)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HmCase {
    pub label: String,
    pub alpha: f64,
    pub n: usize,
    pub psi: MonotoneFn,
    pub profile: CaseProfile,
}

pub fn hm_wolff_cases(cfg: &SuiteConfig) -> Vec<HmCase> {
    let mut rng = seeded(cfg, 6);
    let ball = CaseProfile::Steps {
        profile: StepProfile::indicator(omega(3), 1.0).unwrap(),
    };
    let steps = CaseProfile::Steps {
        profile: StepProfile::random(&mut rng, 5),
    };
    let cutoff = CaseProfile::PowerCutoff {
        a: 0.3,
        eps: 1e-3,
        pieces: 24,
    };
    vec![
        ("unit ball psi=id", MonotoneFn::identity(), ball.clone()),
        ("steps psi=id", MonotoneFn::identity(), steps.clone()),
        ("power cutoff psi=id", MonotoneFn::identity(), cutoff),
        ("steps psi=t^0.75", MonotoneFn::power(0.75), steps),
        ("unit ball psi=t^2", MonotoneFn::power(2.0), ball),
    ]
    .into_iter()
    .map(|(label, psi, profile)| HmCase {
        label: label.into(),
        alpha: 1.0,
        n: 3,
        psi,
        profile,
    })
    .collect()
}

/// `ω_n W((2^{α−n}/(n−α)) f)(x) ≤ V f(x)` at ten points along a ray.
pub fn verify_hm_wolff(cases: &[HmCase], cfg: &SuiteConfig) -> Result<VerificationReport> {
    if cases.is_empty() {
        return Err(Error::EmptyInput("hm_wolff cases"));
    }
    two_pass("hm_wolff", cfg, Vec::new(), |res| {
        let hm_cfg = HavinMazyaConfig {
            near_pieces: 200 * res.factor,
            far_pieces: 200 * res.factor,
            quad: res.quad,
            ..HavinMazyaConfig::default()
        };
        cases
            .par_iter()
            .map(|c| {
                let prof = c.profile.at(res.factor)?;
                let src = lift(&prof, c.n)?;
                let nf = c.n as f64;
                let scaled = src.scale(2f64.powf(c.alpha - nf) / (nf - c.alpha))?;
                let mut params = PotentialParams::new(c.alpha, c.psi.clone());
                params.quad = res.quad;
                let reach = 2.0 * radius_of(prof.support(), c.n);
                let mut rep = CaseReport::new(c.label.clone(), vec![ConstantSpec::upper("hm_wolff").limited(1.0, 1e-2)]);
                for k in 0..10 {
                    let x = on_axis(reach * k as f64 / 9.0, c.n);
                    let lhs = omega(c.n) * wolff(&scaled, &x, &params)?;
                    let rhs = havin_mazya(&src, &x, c.alpha, &c.psi, &hm_cfg)?;
                    rep.push(x[0], lhs, rhs);
                }
                Ok(rep)
            })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sup_tail_matches_brute_force() {
        let prof = StepProfile::new(vec![0.5, 1.5, 2.0], vec![3.0, 1.0, 0.2]).unwrap();
        for beta in [0.0, 0.3, 0.7] {
            for t in [0.1, 0.6, 1.7, 3.0] {
                let brute = (0..200_000)
                    .map(|k| t + k as f64 * 1e-4)
                    .map(|s| s.powf(beta - 1.0) * prof.primitive(s))
                    .fold(0.0, f64::max);
                let v = sup_tail(&prof, beta, t);
                assert!(v >= brute - 1e-12 && v <= brute * (1.0 + 1e-6), "beta={beta} t={t}: {v} vs {brute}");
            }
        }
    }

    #[test]
    fn empty_grid_is_rejected() {
        let cfg = SuiteConfig::default();
        assert!(verify_upper_bound(&rearrangement_cases(&cfg), &[], &cfg).is_err());
    }

    #[test]
    fn divergent_cases_are_excluded() {
        let cfg = SuiteConfig::default();
        let mut cases = rearrangement_cases(&cfg)[..1].to_vec();
        cases.push(UpperCase {
            label: "p=4".into(),
            alpha: 1.0,
            n: 3,
            psi: MonotoneFn::power(1.0 / 3.0),
            profile: CaseProfile::Steps {
                profile: StepProfile::indicator(1.0, 1.0).unwrap(),
            },
        });
        let rep = verify_upper_bound(&cases, &[0.1, 1.0], &cfg).unwrap();
        assert_eq!(rep.excluded.len(), 1);
        assert_eq!(rep.cases.len(), 1);
    }

    #[test]
    fn zero_datum_is_degenerate_pass() {
        let cfg = SuiteConfig::default();
        let case = UpperCase {
            label: "zero".into(),
            alpha: 0.5,
            n: 3,
            psi: MonotoneFn::identity(),
            profile: CaseProfile::Steps {
                profile: StepProfile::zero(),
            },
        };
        let rep = verify_sharpness(&[case], &[0.1, 1.0], &cfg).unwrap();
        assert!(rep.pass, "{}", rep.summary());
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
    }
}
