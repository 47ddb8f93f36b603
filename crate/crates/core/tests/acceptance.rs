//! End-to-end acceptance checks. Prints one line per criterion and fails if
//! any criterion fails.

use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wolfflab::geometry::omega;
use wolfflab::hardy::{hardy1_check, hardy2_check};
use wolfflab::monotone::MonotoneFn;
use wolfflab::nfunction::{NFunction, NFunctionSpec};
use wolfflab::norms::{lorentz_norm, LorentzParams, LorentzVariant};
use wolfflab::potentials::{riesz, wolff, PotentialParams, Source};
use wolfflab::quadrature::{integrate_to_infinity, QuadConfig};
use wolfflab::radial_pde::{solve_radial, truncated_wolff, RadialProblem};
use wolfflab::rearrangement::{GridFunction, RadialLift, StepProfile};
use wolfflab::verifier::{run_suite, Suite, SuiteConfig, VerificationReport};

const RIESZ_TOL: f64 = 5e-3;
const IDENTITY_TOL: f64 = 1e-3;
const STABILITY: f64 = 0.05;
const WITNESS_TOL: f64 = 1e-10;
const GPOW_ID_TOL: f64 = 1e-10;
const GPOW_POWER_TOL: f64 = 1e-8;
const PDE_SUP_TOL: f64 = 1e-6;
const PDE_RATIO_TOL: f64 = 1e-3;
const LORENTZ_TOL: f64 = 1e-10;
const INVERSE_BOUND: f64 = 4.0;

struct Outcome {
    id: usize,
    pass: bool,
    detail: String,
}

fn timed<T>(limit: Duration, f: impl FnOnce() -> T) -> (T, bool, Duration) {
    let start = Instant::now();
    let out = f();
    let took = start.elapsed();
    (out, took <= limit, took)
}

fn lift(p: StepProfile, n: usize) -> Source {
    Source::from(RadialLift::new(p, n).unwrap())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn suite_line(rep: &VerificationReport) -> String {
    let consts: Vec<String> = rep
        .constants
        .iter()
        .map(|c| format!("{}={} (raw {:.4e}, drift {:.2e})", c.name, c.dyadic, c.raw.unwrap_or(f64::NAN), c.stability))
        .collect();
    format!(
        "{} cases, {} excluded, {} violations, {}",
        rep.cases.len(),
        rep.excluded.len(),
        rep.violations,
        consts.join(", ")
    )
}

fn riesz_closed_form() -> Outcome {
    let (v, fast, took) = timed(Duration::from_secs(1), || {
        riesz(&lift(StepProfile::indicator(omega(3), 1.0).unwrap(), 3), &[0.0; 3], 1.0).unwrap()
    });
    let err = rel(v, 2.0 * PI);
    Outcome {
        id: 1,
        pass: err < RIESZ_TOL && fast,
        detail: format!("I_1 1_B(0) = {v:.10} vs 2pi, rel err {err:.2e}, {took:.2?}"),
    }
}

fn wolff_riesz_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (worst, fast, took) = timed(Duration::from_secs(10), || {
        let mut worst: f64 = 0.0;
        for n in [2usize, 3] {
            for _ in 0..10 {
                let f = StepProfile::random(&mut rng, 4);
                let alpha = rng.gen_range(0.2..1.8);
                let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
                let src = lift(f, n);
                let w = wolff(&src, &x, &PotentialParams::new(alpha / 2.0, MonotoneFn::identity())).unwrap();
                let i = riesz(&src, &x, alpha).unwrap();
                worst = worst.max(rel(w, i));
            }
        }
        worst
    });
    Outcome {
        id: 2,
        pass: worst < IDENTITY_TOL && fast,
        detail: format!("20 random points in n=2,3, worst rel gap {worst:.2e}, {took:.2?}"),
    }
}

fn rearrangement_suite(id: usize, suite: Suite, name: &str) -> Outcome {
    let (rep, fast, took) = timed(Duration::from_secs(300), || run_suite(suite, &SuiteConfig::default()).unwrap());
    let c = rep.constant(name).unwrap();
    let positive = c.dyadic.is_finite() && c.dyadic > 0.0 && c.raw.is_some_and(|r| r > 0.0);
    Outcome {
        id,
        pass: rep.pass && rep.cases.len() >= 20 && rep.violations == 0 && positive && c.stability < STABILITY && fast,
        detail: format!("{}, {took:.1?}", suite_line(&rep)),
    }
}

fn hardy_witness() -> Outcome {
    let unit = StepProfile::indicator(1.0, 1.0).unwrap();
    let w = hardy2_check(&unit, 1.0, 1.0).unwrap();
    let witness = (w.lhs - 0.5).abs() < WITNESS_TOL && (w.rhs - 0.5).abs() < WITNESS_TOL;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut violated = 0;
    for _ in 0..100 {
        let phi = StepProfile::random(&mut rng, 6);
        let q = rng.gen_range(1.0..5.0);
        let first = hardy1_check(&phi, q - 1.0 - rng.gen_range(0.01..3.0), q).unwrap();
        let second = hardy2_check(&phi, q - 1.0 + rng.gen_range(0.01..3.0), q).unwrap();
        violated += usize::from(!first.holds) + usize::from(!second.holds);
    }
    Outcome {
        id: 5,
        pass: witness && violated == 0,
        detail: format!("witness lhs {:.15} rhs {:.15}; 2x100 random cases, {violated} violated", w.lhs, w.rhs),
    }
}

fn gpow_exactness() -> Outcome {
    let cfg = QuadConfig {
        rel_tol: 1e-13,
        ..QuadConfig::default()
    };
    let ts = [1e-3, 0.1, 1.0, 7.0, 1e3];
    // g = id, β = 2, C = 1: both sides are 1/t and both constants are 1
    let g = NFunction::power(2.0).unwrap();
    let (i_g, s_g) = g.exact_indices().unwrap();
    let (c1, c2) = ((i_g - 1.0) / (2.0 - i_g + 1.0), (s_g - 1.0) / (2.0 - s_g + 1.0));
    let mut id_err: f64 = (c1 - 1.0).abs().max((c2 - 1.0).abs());
    for t in ts {
        let integral = integrate_to_infinity(|s| g.derivative_inverse(s.powi(-2)).unwrap(), t, &cfg);
        let side = t * g.derivative_inverse(t.powi(-2)).unwrap();
        id_err = id_err.max(rel(integral, 1.0 / t)).max(rel(side, 1.0 / t));
    }
    let mut pow_err: f64 = 0.0;
    for (p, beta, c) in [(1.5, 1.0, 1.0), (3.0, 2.5, 2.0), (4.0, 4.0, 0.3)] {
        let g = NFunction::power(p).unwrap();
        let closed = (p - 1.0) / (beta - p + 1.0);
        for t in ts {
            let integral = integrate_to_infinity(|s| g.derivative_inverse(c * s.powf(-beta)).unwrap(), t, &cfg);
            let side = t * g.derivative_inverse(c * t.powf(-beta)).unwrap();
            pow_err = pow_err.max(rel(integral, closed * side));
        }
    }
    Outcome {
        id: 6,
        pass: id_err < GPOW_ID_TOL && pow_err < GPOW_POWER_TOL,
        detail: format!("identity case max rel err {id_err:.2e}; power cases max rel err {pow_err:.2e}"),
    }
}

fn radial_pde() -> Outcome {
    let radii: Vec<f64> = (0..100).map(|k| k as f64 / 99.0).collect();
    let one = |p: f64, rd: f64| {
        RadialProblem::new(3, NFunctionSpec::Power { p }, StepProfile::indicator(rd, 1.0).unwrap(), rd).unwrap()
    };
    let u = solve_radial(&one(2.0, 1.0), &radii).unwrap();
    let sup = radii.iter().zip(&u).map(|(r, v)| (v - (1.0 - r * r) / 6.0).abs()).fold(0.0, f64::max);
    let mut ratio_err: f64 = 0.0;
    for p in [2.0, 3.0] {
        let expected = (3.0 * omega(3)).powf(-1.0 / (p - 1.0));
        for rd in [0.25, 0.5, 1.0] {
            let prob = one(p, rd);
            let u0 = solve_radial(&prob, &[0.0]).unwrap()[0];
            let w = truncated_wolff(&prob, 0.0, rd).unwrap();
            ratio_err = ratio_err.max(rel(u0 / w, expected));
        }
    }
    Outcome {
        id: 7,
        pass: sup < PDE_SUP_TOL && ratio_err < PDE_RATIO_TOL,
        detail: format!("sup |u - (1-r^2)/6| = {sup:.2e}; origin ratio max rel err {ratio_err:.2e}"),
    }
}

fn rearrangement_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let psi = MonotoneFn::inverse_of(MonotoneFn::ZygmundDerivative { p: 2.0, alpha: 1.0, s: 100.0 });
    let mut mismatches = 0;
    let mut commuted = 0;
    for k in 0..50 {
        let n = 1 + k % 3;
        let cells = [40, 12, 6][n - 1];
        let g = GridFunction::random(&mut rng, vec![cells; n], 0.3, 0.7, 2.0);
        let f = g.rearrange();
        let cell = g.cell_volume();
        let mut levels: Vec<f64> = g.values().iter().map(|v| v.abs()).collect();
        levels.push(0.0);
        for lambda in levels.iter().flat_map(|&l| [l, l * 0.999, l * 1.001]) {
            let count = g.values().iter().filter(|v| v.abs() > lambda).count();
            if f.distribution(lambda) != count as f64 * cell || g.distribution(lambda) != count as f64 * cell {
                mismatches += 1;
            }
        }
        if g.map_abs(&psi).unwrap().rearrange() != f.map_values(&psi).unwrap() {
            commuted += 1;
        }
    }
    Outcome {
        id: 8,
        pass: mismatches == 0 && commuted == 0,
        detail: format!("50 grids: {mismatches} distribution mismatches, {commuted} psi-rearrangement mismatches"),
    }
}

fn lorentz_closed_form() -> Outcome {
    let unit = StepProfile::indicator(1.0, 1.0).unwrap();
    let v = lorentz_norm(&unit, &LorentzParams::new(2.0, 1.0, LorentzVariant::Star)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut inexact = 0;
    for _ in 0..50 {
        let f = StepProfile::random(&mut rng, 6);
        let p = rng.gen_range(0.5..4.0);
        let got = lorentz_norm(&f, &LorentzParams::new(p, f64::INFINITY, LorentzVariant::Star)).unwrap();
        let direct = f.ends().iter().zip(f.values()).map(|(b, v)| v * b.powf(1.0 / p)).fold(0.0, f64::max);
        inexact += usize::from(got != direct);
    }
    Outcome {
        id: 9,
        pass: (v - 2.0).abs() < LORENTZ_TOL && inexact == 0,
        detail: format!("Lambda^(2,1) of 1_[0,1) = {v:.15}; weak-type sups: {inexact}/50 inexact"),
    }
}

fn zygmund_inverses() -> Outcome {
    let (p, a, s) = (2.0, 1.0, 1e6);
    let ts: Vec<f64> = (0..=240).map(|k| 10f64.powf(-6.0 + k as f64 / 20.0)).collect();
    let spread = |g: NFunction, model: &dyn Fn(f64) -> f64| {
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for &t in &ts {
            let r = g.derivative_inverse(t).unwrap() / model(t);
            lo = lo.min(r);
            hi = hi.max(r);
        }
        hi.max(1.0 / lo)
    };
    let c_log = spread(NFunction::zygmund(p, a, s).unwrap(), &|t| {
        t.powf(1.0 / (p - 1.0)) * (s + t).ln().powf(-a / (p - 1.0))
    });
    let c_loglog = spread(NFunction::zygmund_loglog(p, a, s).unwrap(), &|t| {
        t.powf(1.0 / (p - 1.0)) * (s + t).ln().ln().powf(-a / (p - 1.0))
    });
    Outcome {
        id: 10,
        pass: c_log < INVERSE_BOUND && c_loglog < INVERSE_BOUND,
        detail: format!("ratio confined to [1/C, C] with C = {c_log:.4} (log), {c_loglog:.4} (log log)"),
    }
}

fn hm_bound() -> Outcome {
    let rep = run_suite(Suite::HmWolff, &SuiteConfig::default()).unwrap();
    let points = rep.cases.iter().all(|c| c.samples.len() == 10);
    Outcome {
        id: 11,
        pass: rep.pass && rep.cases.len() == 5 && points,
        detail: suite_line(&rep),
    }
}

fn lorentz_mapping() -> Outcome {
    let rep = run_suite(Suite::LorentzMappings, &SuiteConfig::default()).unwrap();
    let strong = rep.constant("C_strong").unwrap();
    let family = rep.cases.iter().filter(|c| c.label.ends_with("strong")).count();
    Outcome {
        id: 12,
        pass: rep.pass && family == 10 && strong.dyadic.is_finite() && strong.stability < STABILITY,
        detail: format!("family of {family}; {}", suite_line(&rep)),
    }
}

fn divergence_marker() -> Outcome {
    let params = PotentialParams::new(1.0, MonotoneFn::power(1.0 / 3.0));
    let radial = wolff(&lift(StepProfile::indicator(1.0, 1.0).unwrap(), 3), &[0.2, 0.0, 0.0], &params);
    let grid = GridFunction::centered(3, 8, 1.0, |x| if x.iter().map(|v| v * v).sum::<f64>() < 0.5 { 1.0 } else { 0.0 })
        .unwrap();
    let gridded = wolff(&Source::from(grid), &[0.0; 3], &params);
    let ok = |r: &wolfflab::Result<f64>| matches!(r, Ok(v) if v.is_infinite() && *v > 0.0);
    Outcome {
        id: 13,
        pass: ok(&radial) && ok(&gridded),
        detail: format!("p=4, alpha=1, n=3: radial {radial:?}, grid {gridded:?}"),
    }
}

#[test]
fn acceptance_criteria() {
    let outcomes = vec![
        riesz_closed_form(),
        wolff_riesz_identity(),
        rearrangement_suite(3, Suite::UpperBound, "C_W1"),
        rearrangement_suite(4, Suite::Sharpness, "C_W3"),
        hardy_witness(),
        gpow_exactness(),
        radial_pde(),
        rearrangement_exactness(),
        lorentz_closed_form(),
        zygmund_inverses(),
        hm_bound(),
        lorentz_mapping(),
        divergence_marker(),
    ];
    // written past the test harness capture so the lines land in every log
    let mut err = std::io::stderr().lock();
    for o in &outcomes {
        let status = if o.pass { "PASS" } else { "FAIL" };
        writeln!(err, "criterion {:>2}: {status} | {}", o.id, o.detail).unwrap();
    }
    let failed: Vec<usize> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
