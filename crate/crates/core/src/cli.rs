//! `braket` command-line front end.
//!
//! Data goes to standard output (or `--out`), diagnostics to standard error.
//! Exit codes: 0 success, 1 domain error, 2 usage or parse error.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::composite::{product_rule_report, sum_rule_report, ObservableSum, ProductRuleReport, SumRuleReport};
use crate::error::Error;
use crate::expr::{parse_expression, parse_ket, parse_operator, EvalContext, ExprError};
use crate::meter::{
    crz_sweep, estimate_modular_from_shots, observable_sweep, run_single_meter, sample_meter,
    write_sweep_csv, MeterOutcome, MeterPrep, ModularEstimate, ShotRecord, SweepRow,
};
use crate::scenario::{Scenario, ScenarioReport, SCENARIO_GAMMA_BAR};
use crate::tensor::{HilbertShape, Operator, SiteObservable};
use crate::values::{modular_value, two_level_coeffs, weak_value, Coupling, PrePostEnsemble, TwoLevelCoeffs};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{which}: {source}")]
    Expr {
        which: &'static str,
        #[source]
        source: ExprError,
    },
    #[error(transparent)]
    Domain(#[from] Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Expr { .. } => 2,
            CliError::Domain(_) | CliError::Io(_) => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "braket", version, about = "Weak and modular values of pre/post-selected systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weak value <phi|A|psi>/<phi|psi>.
    Weak {
        #[command(flatten)]
        states: States,
        #[arg(long)]
        obs: String,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Modular value <phi|exp(-igA)|psi>/<phi|psi>.
    Modular {
        #[command(flatten)]
        states: States,
        #[arg(long)]
        obs: String,
        #[command(flatten)]
        coupling: CouplingOpts,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Sum-rule and product-rule report for local terms `SITE:EXPR`.
    Sumrule {
        #[command(flatten)]
        states: States,
        /// Local term, e.g. `0:sx`; repeat for each site.
        #[arg(long = "term", required = true)]
        terms: Vec<String>,
        #[command(flatten)]
        coupling: CouplingOpts,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Meter-qubit simulation, optionally with sampled tomography.
    Meter {
        #[command(flatten)]
        states: States,
        #[arg(long)]
        obs: String,
        #[command(flatten)]
        coupling: CouplingOpts,
        #[arg(long = "gamma-bar", default_value_t = SCENARIO_GAMMA_BAR)]
        gamma_bar: f64,
        /// Shots per tomography basis (X, Y, Z).
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Built-in scenario: epr, hardy, cheshire or crz.
    Scenario {
        name: String,
        #[command(flatten)]
        coupling: CouplingOpts,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Sweep theta over a range with g = theta/2 and emit one row per point.
    Sweep {
        /// Scenario name (only `crz`); omit when giving --psi/--phi/--obs.
        scenario: Option<String>,
        #[arg(long)]
        psi: Option<String>,
        #[arg(long)]
        phi: Option<String>,
        #[arg(long)]
        obs: Option<String>,
        #[arg(long, num_args = 0..)]
        basis: Vec<String>,
        /// START STOP COUNT, endpoints included, COUNT >= 2.
        #[arg(long, num_args = 3, value_names = ["START", "STOP", "COUNT"], allow_negative_numbers = true, required = true)]
        range: Vec<String>,
        #[arg(long = "gamma-bar", default_value_t = SCENARIO_GAMMA_BAR)]
        gamma_bar: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct States {
    #[arg(long)]
    pub psi: String,
    #[arg(long)]
    pub phi: String,
    /// Extra ket label pairs `a,b` for index 0 and 1.
    #[arg(long, num_args = 0..)]
    pub basis: Vec<String>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct CouplingOpts {
    #[arg(long, allow_negative_numbers = true)]
    pub g: Option<f64>,
    /// Rotation angle; g = theta/2.
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct OutputOpts {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Serialize)]
struct Complex {
    re: f64,
    im: f64,
}

impl From<C64> for Complex {
    fn from(z: C64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

#[derive(Serialize)]
struct Inputs {
    psi: String,
    phi: String,
    dims: Vec<usize>,
    overlap: Complex,
}

#[derive(Serialize)]
struct WeakRecord {
    inputs: Inputs,
    obs: String,
    weak: Complex,
}

#[derive(Serialize)]
struct ModularRecord {
    inputs: Inputs,
    obs: String,
    g: f64,
    theta: Option<f64>,
    modular: Complex,
    abs_modular: f64,
    weak: Complex,
    two_level: Option<TwoLevelCoeffs>,
}

#[derive(Serialize)]
struct SumRuleRecord {
    inputs: Inputs,
    terms: Vec<String>,
    g: f64,
    sum_rule: SumRuleReport,
    product_rule: Option<ProductRuleReport>,
}

#[derive(Serialize)]
struct Tomography {
    shots_per_basis: u64,
    records: Vec<ShotRecord>,
    estimate: ModularEstimate,
}

#[derive(Serialize)]
struct MeterRecord {
    inputs: Inputs,
    obs: String,
    g: f64,
    gamma_bar: f64,
    exact: Complex,
    outcome: MeterOutcome,
    tomography: Option<Tomography>,
}

#[derive(Serialize)]
struct SweepRecord {
    rows: Vec<SweepRow>,
}

fn context(basis: &[String]) -> CliResult<EvalContext> {
    basis.iter().try_fold(EvalContext::default(), |ctx, spec| {
        ctx.with_basis_spec(spec)
            .map_err(|_| CliError::Usage(format!("--basis expects 'a,b' with two distinct labels, got {spec:?}")))
    })
}

fn expr_err(which: &'static str) -> impl Fn(ExprError) -> CliError {
    move |source| CliError::Expr { which, source }
}

fn canonical(src: &str, which: &'static str) -> CliResult<String> {
    Ok(parse_expression(src).map_err(expr_err(which))?.to_string())
}

struct Loaded {
    ensemble: PrePostEnsemble,
    inputs: Inputs,
    ctx: EvalContext,
}

fn load_states(psi: &str, phi: &str, basis: &[String]) -> CliResult<Loaded> {
    let ctx = context(basis)?;
    let psi_k = parse_ket(psi, &ctx).map_err(expr_err("--psi"))?;
    let phi_k = parse_ket(phi, &ctx).map_err(expr_err("--phi"))?;
    let ensemble = PrePostEnsemble::new(psi_k, phi_k)?;
    let inputs = Inputs {
        psi: canonical(psi, "--psi")?,
        phi: canonical(phi, "--phi")?,
        dims: ensemble.shape().dims().to_vec(),
        overlap: ensemble.overlap().into(),
    };
    Ok(Loaded { ensemble, inputs, ctx })
}

fn observable(src: &str, ctx: &EvalContext, which: &'static str) -> CliResult<Operator> {
    let op = parse_operator(src, ctx).map_err(expr_err(which))?;
    Ok(op.assert_hermitian()?)
}

fn coupling(opts: &CouplingOpts) -> CliResult<(Coupling, Option<f64>)> {
    match (opts.g, opts.theta) {
        (Some(g), None) => Ok((Coupling::new(g)?, None)),
        (None, Some(t)) => Ok((Coupling::from_theta(t)?, Some(t))),
        _ => Err(CliError::Usage("give exactly one of --g and --theta".into())),
    }
}

/// Two-level closed-form coefficients when `op` has exactly two distinct eigenvalues.
fn coeffs_if_two_level(op: &Operator, c: Coupling) -> CliResult<Option<TwoLevelCoeffs>> {
    let distinct = op.eigh()?.distinct(crate::values::EPS_DEGEN);
    match distinct.as_slice() {
        [lo, hi] => Ok(Some(two_level_coeffs(*hi, *lo, c)?)),
        _ => Ok(None),
    }
}

fn parse_term(spec: &str, ctx: &EvalContext) -> CliResult<(SiteObservable, String)> {
    let (site, src) = spec
        .split_once(':')
        .ok_or_else(|| CliError::Usage(format!("--term expects SITE:EXPR, got {spec:?}")))?;
    let site: usize = site
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("--term site must be a non-negative integer, got {site:?}")))?;
    let local = observable(src, ctx, "--term")?;
    let obs = match SiteObservable::two_level(site, local.clone()) {
        Ok(o) => o,
        Err(_) => SiteObservable::new(site, local)?,
    };
    Ok((obs, format!("{site}:{}", canonical(src, "--term")?)))
}

fn parse_range(range: &[String]) -> CliResult<Vec<f64>> {
    let bad = |what: &str| CliError::Usage(format!("--range: {what}"));
    let [start, stop, count] = range else {
        return Err(bad("expects START STOP COUNT"));
    };
    let start: f64 = start.parse().map_err(|_| bad("START is not a number"))?;
    let stop: f64 = stop.parse().map_err(|_| bad("STOP is not a number"))?;
    let count: usize = count.parse().map_err(|_| bad("COUNT is not a non-negative integer"))?;
    if !start.is_finite() || !stop.is_finite() {
        return Err(bad("bounds must be finite"));
    }
    if count < 2 {
        return Err(bad("COUNT must be at least 2"));
    }
    Ok(linspace(start, stop, count))
}

/// `count` points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    let last = (count - 1) as f64;
    (0..count)
        .map(|k| {
            if k + 1 == count {
                stop
            } else {
                start + (stop - start) * (k as f64 / last)
            }
        })
        .collect()
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("records serialize");
    s.push('\n');
    s
}

fn csv_complex(rows: &[(&str, C64)]) -> String {
    let mut s = String::from("quantity,re,im\n");
    for (name, z) in rows {
        s.push_str(&format!("{name},{},{}\n", z.re, z.im));
    }
    s
}

fn json_only(format: Format, cmd: &str) -> CliResult<()> {
    match format {
        Format::Json => Ok(()),
        Format::Csv => Err(CliError::Usage(format!("{cmd} supports --format json only"))),
    }
}

fn emit(text: String, out: &Option<PathBuf>) -> CliResult<String> {
    match out {
        Some(path) => {
            std::fs::write(path, text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

/// Run a parsed command; returns what belongs on standard output.
pub fn run(cli: Cli) -> CliResult<String> {
    match cli.command {
        Command::Weak { states, obs, out } => {
            let l = load_states(&states.psi, &states.phi, &states.basis)?;
            let op = observable(&obs, &l.ctx, "--obs")?;
            let w = weak_value(&op, &l.ensemble)?;
            let text = match out.format {
                Format::Json => json(&WeakRecord {
                    inputs: l.inputs,
                    obs: canonical(&obs, "--obs")?,
                    weak: w.into(),
                }),
                Format::Csv => csv_complex(&[("weak", w), ("overlap", l.ensemble.overlap())]),
            };
            emit(text, &out.out)
        }
        Command::Modular {
            states,
            obs,
            coupling: copts,
            out,
        } => {
            let l = load_states(&states.psi, &states.phi, &states.basis)?;
            let op = observable(&obs, &l.ctx, "--obs")?;
            let (c, theta) = coupling(&copts)?;
            let m = modular_value(&op, None, c, &l.ensemble)?;
            let w = weak_value(&op, &l.ensemble)?;
            let text = match out.format {
                Format::Json => json(&ModularRecord {
                    inputs: l.inputs,
                    obs: canonical(&obs, "--obs")?,
                    g: c.g(),
                    theta,
                    modular: m.into(),
                    abs_modular: m.norm(),
                    weak: w.into(),
                    two_level: coeffs_if_two_level(&op, c)?,
                }),
                Format::Csv => csv_complex(&[("modular", m), ("weak", w), ("overlap", l.ensemble.overlap())]),
            };
            emit(text, &out.out)
        }
        Command::Sumrule {
            states,
            terms,
            coupling: copts,
            out,
        } => {
            json_only(out.format, "sumrule")?;
            let l = load_states(&states.psi, &states.phi, &states.basis)?;
            let (c, _) = coupling(&copts)?;
            let mut observables = Vec::new();
            let mut names = Vec::new();
            for spec in &terms {
                let (o, name) = parse_term(spec, &l.ctx)?;
                observables.push(o);
                names.push(name);
            }
            let product_rule = match observables.as_slice() {
                [a, b] => Some(product_rule_report(a, b, &l.ensemble)?),
                _ => None,
            };
            let shape: HilbertShape = l.ensemble.shape().clone();
            let sum = ObservableSum::new(shape, observables)?;
            let record = SumRuleRecord {
                inputs: l.inputs,
                terms: names,
                g: c.g(),
                sum_rule: sum_rule_report(&sum, c, &l.ensemble)?,
                product_rule,
            };
            emit(json(&record), &out.out)
        }
        Command::Meter {
            states,
            obs,
            coupling: copts,
            gamma_bar,
            shots,
            seed,
            out,
        } => {
            json_only(out.format, "meter")?;
            let l = load_states(&states.psi, &states.phi, &states.basis)?;
            let op = observable(&obs, &l.ctx, "--obs")?;
            let (c, _) = coupling(&copts)?;
            let prep = MeterPrep::new(gamma_bar)?;
            let outcome = run_single_meter(&op, c, &l.ensemble, &prep)?;
            let tomography = match shots {
                None => None,
                Some(0) => return Err(CliError::Usage("--shots must be at least 1".into())),
                Some(n) => {
                    let records = ["X", "Y", "Z"]
                        .iter()
                        .zip(0u64..)
                        .map(|(b, k)| sample_meter(&outcome, b, n, seed.wrapping_add(k)))
                        .collect::<Result<Vec<_>, _>>()?;
                    let estimate = estimate_modular_from_shots(&records, &prep)?;
                    Some(Tomography {
                        shots_per_basis: n,
                        records,
                        estimate,
                    })
                }
            };
            let record = MeterRecord {
                inputs: l.inputs,
                obs: canonical(&obs, "--obs")?,
                g: c.g(),
                gamma_bar,
                exact: modular_value(&op, None, c, &l.ensemble)?.into(),
                outcome,
                tomography,
            };
            emit(json(&record), &out.out)
        }
        Command::Scenario {
            name,
            coupling: copts,
            out,
        } => {
            json_only(out.format, "scenario")?;
            let sc: Scenario = name.parse()?;
            let report: ScenarioReport = match (sc, copts.theta) {
                (Scenario::Crz, Some(t)) => crate::scenario::scenario_crz(t)?,
                _ => sc.run(coupling(&copts)?.0.g())?,
            };
            emit(json(&report), &out.out)
        }
        Command::Sweep {
            scenario,
            psi,
            phi,
            obs,
            basis,
            range,
            gamma_bar,
            format,
            out,
        } => {
            let thetas = parse_range(&range)?;
            let prep = MeterPrep::new(gamma_bar)?;
            let rows = match (scenario.as_deref(), psi, phi, obs) {
                (Some(name), None, None, None) => match name.parse::<Scenario>()? {
                    Scenario::Crz => {
                        let (p, f) = Scenario::Crz.states();
                        crz_sweep(&PrePostEnsemble::new(p, f)?, &prep, &thetas)?
                    }
                    other => {
                        return Err(CliError::Usage(format!(
                            "sweep supports the crz scenario, not {}",
                            other.name()
                        )))
                    }
                },
                (None, Some(psi), Some(phi), Some(obs)) => {
                    let l = load_states(&psi, &phi, &basis)?;
                    let op = observable(&obs, &l.ctx, "--obs")?;
                    observable_sweep(&op, &l.ensemble, &prep, &thetas)?
                }
                _ => {
                    return Err(CliError::Usage(
                        "sweep needs either a scenario name or all of --psi, --phi, --obs".into(),
                    ))
                }
            };
            let text = match format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_sweep_csv(&rows, &mut buf)?;
                    String::from_utf8(buf).expect("csv is ASCII")
                }
                Format::Json => json(&SweepRecord { rows }),
            };
            emit(text, &out)
        }
    }
}

/// Parse `args` (program name first) and run; returns (exit code, stdout, stderr).
pub fn run_from_args<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                (0, text, String::new())
            } else {
                (2, String::new(), text)
            };
        }
    };
    match run(cli) {
        Ok(out) => (0, out, String::new()),
        Err(e) => (e.exit_code(), String::new(), format!("error: {e}\n")),
    }
}
