use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use wolfflab::hardy::{hardy1_check, hardy2_check, reduction_op, ReductionParams};
use wolfflab::io::{fmt_num, parse_json, read_points};
use wolfflab::nfunction::{NFunction, NFunctionSpec};
use wolfflab::norms::{
    llogl_norm, lorentz_morrey_norm, lorentz_norm, luxemburg_norm, modular, morrey_norm, LorentzParams,
    ModularFunctional, MorreyEstimate,
};
use wolfflab::potentials::{frac_maximal, havin_mazya, riesz_with, wolff_many, HavinMazyaConfig};
use wolfflab::quadrature::QuadConfig;
use wolfflab::radial_pde::{estimate_check, solve_radial, RadialProblem};
use wolfflab::verifier::{run_suite, Suite, SuiteConfig};
use wolfflab::{GridFunction, MonotoneFn, PotentialParams, RadialLift, Source, StepProfile};

/// Numerical laboratory for Wolff-type potentials and rearrangement estimates.
#[derive(Parser)]
#[command(name = "wolfflab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a potential at points; writes `x0,..,value,flags`.
    Potential {
        /// which potential to evaluate
        #[arg(long, value_enum)]
        op: Operator,
        /// operator parameters (JSON)
        #[arg(long)]
        params: PathBuf,
        /// datum: profile CSV (`t,v`) or grid CSV (`dim,...`)
        #[arg(long)]
        input: PathBuf,
        /// dimension of the radial lift when the input is a profile
        #[arg(long)]
        dim: Option<usize>,
        /// evaluation points, one per row
        #[arg(long)]
        points: PathBuf,
        /// output CSV; stdout if omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decreasing rearrangement of a grid or profile, optionally after
    /// applying a monotone function to |f|; writes a profile CSV.
    Rearrange {
        /// grid CSV or profile CSV
        #[arg(long)]
        input: PathBuf,
        /// monotone function descriptor (JSON)
        #[arg(long)]
        psi: Option<PathBuf>,
        /// output CSV; stdout if omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a norm; the request is `{"norm", "params", "input"}`.
    Norm {
        /// norm request (JSON); `input` is resolved against its directory
        #[arg(long)]
        request: PathBuf,
        /// output CSV; stdout if omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the one-dimensional reduction operator at the given t.
    Reduce {
        /// reduction parameters (JSON)
        #[arg(long)]
        params: PathBuf,
        /// profile CSV
        #[arg(long)]
        input: PathBuf,
        /// comma-separated evaluation points
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<f64>,
        /// output CSV; stdout if omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a weighted Hardy inequality on a profile.
    Hardy {
        /// profile CSV of the weight function
        #[arg(long)]
        input: PathBuf,
        /// `first` integrates from 0 and needs p < q - 1, `second` integrates
        /// to infinity and needs p > q - 1
        #[arg(long, value_enum)]
        form: HardyForm,
        /// power of the weight
        #[arg(long)]
        p: f64,
        /// integrability exponent
        #[arg(long)]
        q: f64,
        /// output CSV; stdout if omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the radial model problem; the spec is
    /// `{"n", "g", "f", "domain_radius"}` with `f` a profile CSV path.
    Pde {
        /// problem spec (JSON)
        #[arg(long)]
        problem: PathBuf,
        /// comma-separated radii
        #[arg(long, value_delimiter = ',', required = true)]
        radii: Vec<f64>,
        /// comma-separated ball radii; switches to the two-sided estimate report
        #[arg(long, value_delimiter = ',')]
        big_r: Vec<f64>,
        /// output CSV; stdout if omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite; exits with status 2 if it fails.
    Verify {
        /// upper_bound, sharpness, orlicz_bounds, lorentz_mappings, maximal,
        /// appendix or hm_wolff
        #[arg(long)]
        suite: String,
        /// suite configuration (JSON); defaults apply to missing keys
        #[arg(long)]
        config: Option<PathBuf>,
        /// overrides the seed of the configuration
        #[arg(long)]
        seed: Option<u64>,
        /// report CSV; stdout if omitted
        #[arg(long)]
        out: Option<PathBuf>,
        /// full report as JSON
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Operator {
    Wolff,
    Riesz,
    HavinMazya,
    Maximal,
}

#[derive(Clone, Copy, ValueEnum)]
enum HardyForm {
    First,
    Second,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RieszParams {
    alpha: f64,
    #[serde(default)]
    truncation: Option<f64>,
    #[serde(default)]
    quad: QuadConfig,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HavinMazyaParams {
    alpha: f64,
    psi: MonotoneFn,
    #[serde(default)]
    config: HavinMazyaConfig,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MaximalParams {
    alpha: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NormRequest {
    norm: String,
    #[serde(default)]
    params: serde_json::Value,
    input: PathBuf,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LuxemburgParams {
    g: NFunctionSpec,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MorreyParams {
    q: f64,
    theta: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LorentzMorreyParams {
    t: f64,
    q: f64,
    theta: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemSpec {
    n: usize,
    g: NFunctionSpec,
    f: PathBuf,
    domain_radius: f64,
}

/// Marker for a completed run whose verification failed.
#[derive(Debug)]
struct SuiteFailed(String);

impl std::fmt::Display for SuiteFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "suite {} failed", self.0)
    }
}

impl std::error::Error for SuiteFailed {}

enum Datum {
    Profile(StepProfile),
    Grid(GridFunction),
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(parse_json(&read(path)?, &path.display().to_string())?)
}

fn from_value<T: DeserializeOwned>(v: serde_json::Value, what: &str) -> Result<T> {
    let v = if v.is_null() { serde_json::json!({}) } else { v };
    serde_json::from_value(v).with_context(|| format!("invalid {what} parameters"))
}

fn load_datum(path: &Path) -> Result<Datum> {
    let text = read(path)?;
    let first = text.lines().map(str::trim).find(|l| !l.is_empty()).unwrap_or("");
    let datum = if first.starts_with("dim") {
        Datum::Grid(GridFunction::from_csv(&text)?)
    } else {
        Datum::Profile(StepProfile::from_csv(&text)?)
    };
    Ok(datum)
}

fn load_profile(path: &Path) -> Result<StepProfile> {
    match load_datum(path)? {
        Datum::Profile(p) => Ok(p),
        Datum::Grid(g) => Ok(g.rearrange()),
    }
}

fn beside(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.parent().unwrap_or(Path::new(".")).join(p)
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => Ok(std::io::stdout().write_all(text.as_bytes())?),
    }
}

fn table(header: &[String], rows: &[Vec<String>]) -> String {
    let mut s = header.join(",") + "\n";
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

fn flag(v: f64) -> &'static str {
    if v.is_finite() {
        "finite"
    } else {
        "infinite"
    }
}

fn potential(op: Operator, params: &Path, input: &Path, dim: Option<usize>, points: &Path) -> Result<String> {
    let src = match load_datum(input)? {
        Datum::Grid(g) => {
            if dim.is_some_and(|d| d != g.dim()) {
                bail!("--dim {} does not match the grid dimension {}", dim.unwrap(), g.dim());
            }
            Source::from(g)
        }
        Datum::Profile(p) => {
            let n = dim.context("--dim is required when the input is a profile")?;
            Source::from(RadialLift::new(p, n)?)
        }
    };
    let n = src.dim();
    let pts = read_points(&read(points)?, n)?;
    let (values, flags): (Vec<f64>, Vec<&str>) = match op {
        Operator::Wolff => {
            let p: PotentialParams = load_json(params)?;
            let v = wolff_many(&src, &pts, &p)?;
            let f = v.iter().map(|&x| flag(x)).collect();
            (v, f)
        }
        Operator::Riesz => {
            let p: RieszParams = load_json(params)?;
            let v = pts
                .iter()
                .map(|x| riesz_with(&src, x, p.alpha, p.truncation, &p.quad))
                .collect::<wolfflab::Result<Vec<f64>>>()?;
            let f = v.iter().map(|&x| flag(x)).collect();
            (v, f)
        }
        Operator::HavinMazya => {
            let p: HavinMazyaParams = load_json(params)?;
            let v = pts
                .iter()
                .map(|x| havin_mazya(&src, x, p.alpha, &p.psi, &p.config))
                .collect::<wolfflab::Result<Vec<f64>>>()?;
            let f = v.iter().map(|&x| flag(x)).collect();
            (v, f)
        }
        Operator::Maximal => {
            let p: MaximalParams = load_json(params)?;
            let v = pts
                .iter()
                .map(|x| frac_maximal(&src, x, p.alpha).map(|e| e.value))
                .collect::<wolfflab::Result<Vec<f64>>>()?;
            (v, vec!["lower_bound"; pts.len()])
        }
    };
    let mut header: Vec<String> = (0..n).map(|k| format!("x{k}")).collect();
    header.extend(["value".to_string(), "flags".to_string()]);
    let rows: Vec<Vec<String>> = pts
        .iter()
        .zip(values.iter().zip(&flags))
        .map(|(x, (&v, f))| {
            let mut r: Vec<String> = x.iter().map(|&c| fmt_num(c)).collect();
            r.push(fmt_num(v));
            r.push(f.to_string());
            r
        })
        .collect();
    Ok(table(&header, &rows))
}

fn rearrange(input: &Path, psi: Option<&Path>) -> Result<String> {
    let psi: Option<MonotoneFn> = psi.map(load_json).transpose()?;
    let prof = match (load_datum(input)?, psi) {
        (Datum::Grid(g), Some(psi)) => g.map_abs(&psi)?.rearrange(),
        (Datum::Grid(g), None) => g.rearrange(),
        (Datum::Profile(p), Some(psi)) => p.map_values(&psi)?,
        (Datum::Profile(p), None) => p,
    };
    Ok(prof.to_csv())
}

fn morrey_row(e: MorreyEstimate) -> String {
    let row = [fmt_num(e.value), fmt_num(e.refined), fmt_num(e.center_spacing), fmt_num(e.max_radius)];
    format!("value,refined,center_spacing,max_radius,stable\n{},{}\n", row.join(","), e.stable)
}

fn norm(request: &Path) -> Result<String> {
    let req: NormRequest = load_json(request)?;
    let input = beside(request, &req.input);
    let grid = |what: &str| -> Result<GridFunction> {
        match load_datum(&input)? {
            Datum::Grid(g) => Ok(g),
            Datum::Profile(_) => bail!("the {what} norm needs a grid input"),
        }
    };
    let value = match req.norm.as_str() {
        "lorentz" => {
            let p: LorentzParams = from_value(req.params, "lorentz")?;
            lorentz_norm(&load_profile(&input)?, &p)?
        }
        "luxemburg" => {
            let p: LuxemburgParams = from_value(req.params, "luxemburg")?;
            luxemburg_norm(&NFunction::from_spec(&p.g)?, &load_profile(&input)?)?
        }
        "llogl" => {
            from_value::<serde_json::Map<String, serde_json::Value>>(req.params, "llogl")?
                .is_empty()
                .then_some(())
                .context("the llogl norm takes no parameters")?;
            llogl_norm(&load_profile(&input)?)?
        }
        "modular" => {
            let p: ModularFunctional = from_value(req.params, "modular")?;
            modular(&p, &load_profile(&input)?)?
        }
        "morrey" => {
            let p: MorreyParams = from_value(req.params, "morrey")?;
            return Ok(morrey_row(morrey_norm(&grid("morrey")?, p.q, p.theta)?));
        }
        "lorentz_morrey" => {
            let p: LorentzMorreyParams = from_value(req.params, "lorentz_morrey")?;
            return Ok(morrey_row(lorentz_morrey_norm(&grid("lorentz_morrey")?, p.t, p.q, p.theta)?));
        }
        other => bail!("unknown norm `{other}`"),
    };
    Ok(format!("value\n{}\n", fmt_num(value)))
}

fn reduce(params: &Path, input: &Path, ts: &[f64]) -> Result<String> {
    let p: ReductionParams = load_json(params)?;
    let phi = load_profile(input)?;
    let rows = ts
        .iter()
        .map(|&t| Ok(vec![fmt_num(t), fmt_num(reduction_op(&phi, &p, t)?)]))
        .collect::<Result<Vec<_>>>()?;
    Ok(table(&["t".into(), "value".into()], &rows))
}

fn hardy(input: &Path, form: HardyForm, p: f64, q: f64) -> Result<String> {
    let phi = load_profile(input)?;
    let r = match form {
        HardyForm::First => hardy1_check(&phi, p, q)?,
        HardyForm::Second => hardy2_check(&phi, p, q)?,
    };
    Ok(format!(
        "lhs,rhs,constant,holds\n{},{},{},{}\n",
        fmt_num(r.lhs),
        fmt_num(r.rhs),
        fmt_num(r.constant),
        r.holds
    ))
}

fn pde(problem: &Path, radii: &[f64], big_r: &[f64]) -> Result<String> {
    let spec: ProblemSpec = load_json(problem)?;
    let f = load_profile(&beside(problem, &spec.f))?;
    let prob = RadialProblem::new(spec.n, spec.g, f, spec.domain_radius)?;
    if big_r.is_empty() {
        let u = solve_radial(&prob, radii)?;
        let rows: Vec<Vec<String>> = radii.iter().zip(&u).map(|(&r, &v)| vec![fmt_num(r), fmt_num(v)]).collect();
        return Ok(table(&["r".into(), "u".into()], &rows));
    }
    let rep = estimate_check(&prob, radii, big_r)?;
    let header: Vec<String> = ["radius", "big_r", "u", "wolff", "inf_u", "lower_slack", "upper_slack"]
        .map(String::from)
        .to_vec();
    let rows: Vec<Vec<String>> = rep
        .rows
        .iter()
        .map(|r| {
            [r.radius, r.big_r, r.u, r.wolff, r.inf_u, r.lower_slack, r.upper_slack]
                .map(fmt_num)
                .to_vec()
        })
        .collect();
    eprintln!("c_lower {} c_upper {}", fmt_num(rep.c_lower), fmt_num(rep.c_upper));
    Ok(table(&header, &rows))
}

fn verify(suite: &str, config: Option<&Path>, seed: Option<u64>, out: Option<&Path>, json: Option<&Path>) -> Result<()> {
    let suite: Suite = suite.parse()?;
    let mut cfg: SuiteConfig = config.map(load_json).transpose()?.unwrap_or_default();
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    let rep = run_suite(suite, &cfg)?;
    emit(out, &rep.to_csv())?;
    if let Some(p) = json {
        let text = serde_json::to_string_pretty(&rep)? + "\n";
        fs::write(p, text).with_context(|| format!("cannot write {}", p.display()))?;
    }
    eprintln!("{}", rep.summary());
    if !rep.pass {
        return Err(SuiteFailed(suite.name().into()).into());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Potential {
            op,
            params,
            input,
            dim,
            points,
            out,
        } => emit(out.as_deref(), &potential(op, &params, &input, dim, &points)?),
        Command::Rearrange { input, psi, out } => emit(out.as_deref(), &rearrange(&input, psi.as_deref())?),
        Command::Norm { request, out } => emit(out.as_deref(), &norm(&request)?),
        Command::Reduce { params, input, t, out } => emit(out.as_deref(), &reduce(&params, &input, &t)?),
        Command::Hardy { input, form, p, q, out } => emit(out.as_deref(), &hardy(&input, form, p, q)?),
        Command::Pde {
            problem,
            radii,
            big_r,
            out,
        } => emit(out.as_deref(), &pde(&problem, &radii, &big_r)?),
        Command::Verify {
            suite,
            config,
            seed,
            out,
            json,
        } => verify(&suite, config.as_deref(), seed, out.as_deref(), json.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<SuiteFailed>() => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
