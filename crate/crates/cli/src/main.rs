//! `lastsuccess` command-line tool: generate instances, evaluate policies and
//! emit sweep / curve data as CSV.

use std::fs::{File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use lastsuccess::bounds::{
    asls_lower_bound, figure2_data, flsr_lower_bound, multi_sample_guarantee, opt_bound,
};
use lastsuccess::eval::{
    brute_force_win_prob, exact_threshold_distribution, monte_carlo_win_prob,
    policy_win_prob_exact, ORACLE_BIT_CAP,
};
use lastsuccess::instances::{
    iid_instance, one_then_uniform, one_then_zeros, random_with_total_odds, secretary, staircase,
    two_trial,
};
use lastsuccess::policies::default_epsilon;
use lastsuccess::rng::replicate_seed;
use lastsuccess::{EstimationParams, EvalResult, Instance, MultiSampleParams, Policy};

#[derive(Parser)]
#[command(
    name = "lastsuccess",
    version,
    about = "Stopping policies for the last-success problem"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write an instance of a named family as JSON.
    Gen(GenArgs),
    /// Evaluate a policy on an instance exactly (or by enumeration).
    Eval(EvalArgs),
    /// Estimate a policy's winning probability by Monte Carlo.
    Mc(McArgs),
    /// Exact winning probabilities on random instances over a grid of R.
    Sweep(SweepArgs),
    /// Guarantee and impossibility curves as functions of R.
    Bounds(BoundsArgs),
    /// Multi-sample policy estimates over a list of sample counts.
    MultisampleCurve(CurveArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    OneThenZeros,
    OneThenUniform,
    Secretary,
    Staircase,
    TwoTrial,
    Iid,
    RandomOdds,
}

#[derive(Args)]
struct GenArgs {
    family: Family,
    #[arg(long)]
    n: Option<usize>,
    /// Step position for `staircase`.
    #[arg(long)]
    j: Option<usize>,
    #[arg(long)]
    p1: Option<f64>,
    #[arg(long)]
    p2: Option<f64>,
    /// Common probability for `iid`.
    #[arg(long)]
    p: Option<f64>,
    /// Target sum of odds for `random-odds`.
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output path; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolicyName {
    Fls,
    Asls,
    Flsr,
    EstimatedBruss,
    MultiSample,
}

#[derive(Args)]
struct PolicyArgs {
    #[arg(long, value_enum)]
    policy: PolicyName,
    #[arg(long, default_value_t = 0.5)]
    alpha0: f64,
    #[arg(long, default_value_t = 0.5)]
    alpha1: f64,
    /// Slack of the multi-sample policy; defaults to (e/m)^(1/4), clamped.
    #[arg(long)]
    epsilon: Option<f64>,
}

impl PolicyArgs {
    fn build(&self, m: usize) -> Result<Policy> {
        Ok(match self.policy {
            PolicyName::Fls => Policy::Fls,
            PolicyName::Asls => Policy::Asls,
            PolicyName::Flsr => Policy::Flsr,
            PolicyName::EstimatedBruss => {
                Policy::EstimatedBruss(EstimationParams::new(self.alpha0, self.alpha1)?)
            }
            PolicyName::MultiSample => Policy::MultiSample(MultiSampleParams::new(
                self.epsilon.unwrap_or_else(|| default_epsilon(m)),
            )?),
        })
    }
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    instance: PathBuf,
    #[command(flatten)]
    policy: PolicyArgs,
    /// Number of sample sequences.
    #[arg(long, default_value_t = 1)]
    m: usize,
}

#[derive(Args)]
struct McArgs {
    #[arg(long)]
    instance: PathBuf,
    #[command(flatten)]
    policy: PolicyArgs,
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, default_value_t = 1000)]
    replicates: usize,
    #[arg(long)]
    seed: u64,
    /// Append a result row to this CSV file.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    policy: PolicyName,
    #[arg(long, default_value_t = 0.5)]
    alpha0: f64,
    #[arg(long, default_value_t = 0.5)]
    alpha1: f64,
    /// Comma-separated target sums of odds.
    #[arg(long, value_delimiter = ',', required = true)]
    r_grid: Vec<f64>,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    trials_per_point: usize,
    #[arg(long)]
    seed: u64,
    /// Output path; stdout if omitted.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, default_value_t = 5.0)]
    r_max: f64,
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct CurveArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Comma-separated sample counts.
    #[arg(long, value_delimiter = ',', required = true)]
    m_list: Vec<usize>,
    #[arg(long, default_value_t = 2000)]
    replicates: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    csv: Option<PathBuf>,
}

/// Sum of odds as it appears in reports: a number, or "inf".
#[derive(Serialize)]
#[serde(untagged)]
enum OddsTotal {
    Finite(f64),
    Infinite(&'static str),
}

impl From<f64> for OddsTotal {
    fn from(r: f64) -> Self {
        if r.is_finite() {
            OddsTotal::Finite(r)
        } else {
            OddsTotal::Infinite("inf")
        }
    }
}

fn fmt_r(r: f64) -> String {
    if r.is_finite() {
        r.to_string()
    } else {
        "inf".into()
    }
}

#[derive(Serialize)]
struct EvalReport<'a> {
    policy: &'a str,
    method: &'a str,
    estimate: f64,
    ci_halfwidth: f64,
    #[serde(rename = "R")]
    r: OddsTotal,
    bound: Option<f64>,
}

#[derive(Serialize)]
struct McReport<'a> {
    policy: &'a str,
    method: &'a str,
    estimate: f64,
    ci_halfwidth: f64,
    #[serde(rename = "R")]
    r: OddsTotal,
    bound: Option<f64>,
    m: usize,
    replicates: usize,
    seed: u64,
}

#[derive(Serialize)]
struct McRow<'a> {
    policy: &'a str,
    m: usize,
    replicates: usize,
    seed: u64,
    #[serde(rename = "R")]
    r: String,
    estimate: f64,
    ci_halfwidth: f64,
}

#[derive(Serialize)]
struct SweepRow {
    policy: &'static str,
    n: usize,
    #[serde(rename = "R")]
    r: f64,
    instance_seed: u64,
    exact_winprob: f64,
    lower_bound: Option<f64>,
    upper_bound: f64,
}

#[derive(Serialize)]
struct BoundsRow {
    #[serde(rename = "R")]
    r: f64,
    asls_bound: f64,
    upper_bound: f64,
    flsr_bound: f64,
}

#[derive(Serialize)]
struct CurveRow {
    m: usize,
    epsilon: f64,
    estimate: f64,
    ci_halfwidth: f64,
    guarantee: f64,
}

fn bound_for(policy: &Policy, m: usize, r: f64) -> Option<f64> {
    match policy {
        Policy::Asls => Some(asls_lower_bound(r)),
        Policy::Flsr => Some(flsr_lower_bound(r)),
        Policy::MultiSample(_) => Some(multi_sample_guarantee(m, r)),
        Policy::Fls | Policy::EstimatedBruss(_) => None,
    }
}

fn read_instance(path: &Path) -> Result<Instance> {
    Instance::read_json(path).with_context(|| format!("reading instance {}", path.display()))
}

fn csv_writer(path: Option<&Path>) -> Result<csv::Writer<Box<dyn Write>>> {
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    };
    Ok(csv::Writer::from_writer(sink))
}

fn write_rows<T: Serialize>(path: Option<&Path>, rows: &[T]) -> Result<()> {
    let mut w = csv_writer(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string(value)?);
    Ok(())
}

fn require<T>(value: Option<T>, flag: &str, family: &str) -> Result<T> {
    value.with_context(|| format!("family {family} needs --{flag}"))
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let name = args
        .family
        .to_possible_value()
        .expect("no skipped variants")
        .get_name()
        .to_owned();
    let n = || require(args.n, "n", &name);
    let inst: Instance = match args.family {
        Family::OneThenZeros => one_then_zeros(n()?)?,
        Family::OneThenUniform => one_then_uniform(n()?)?,
        Family::Secretary => secretary(n()?)?,
        Family::Staircase => staircase(n()?, require(args.j, "j", &name)?)?,
        Family::TwoTrial => two_trial(
            require(args.p1, "p1", &name)?,
            require(args.p2, "p2", &name)?,
        )?,
        Family::Iid => iid_instance(n()?, require(args.p, "p", &name)?)?,
        Family::RandomOdds => random_with_total_odds(
            n()?,
            require(args.r, "r", &name)?,
            require(args.seed, "seed", &name)?,
        )?,
    };
    match args.out {
        Some(path) => inst
            .write_json(&path)
            .with_context(|| format!("writing {}", path.display()))?,
        None => println!("{}", inst.to_json()),
    }
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    if args.m == 0 {
        bail!("--m must be positive");
    }
    let inst = read_instance(&args.instance)?;
    let policy = args.policy.build(args.m)?;
    let result: EvalResult = if policy.is_single_sample() {
        let dist = exact_threshold_distribution(&inst, &policy)?;
        policy_win_prob_exact(&inst, &dist)?
    } else if inst.n() * args.m <= ORACLE_BIT_CAP {
        brute_force_win_prob(&inst, &policy, args.m)?
    } else {
        bail!("no exact form for {policy} with n*m > {ORACLE_BIT_CAP}; use `mc`");
    };
    let r = inst.odds_summary().total();
    print_json(&EvalReport {
        policy: policy.name(),
        method: result.method.as_str(),
        estimate: result.estimate,
        ci_halfwidth: result.ci_halfwidth,
        r: r.into(),
        bound: bound_for(&policy, args.m, r),
    })
}

fn cmd_mc(args: McArgs) -> Result<()> {
    let inst = read_instance(&args.instance)?;
    let policy = args.policy.build(args.m)?;
    let result = monte_carlo_win_prob(&inst, &policy, args.m, args.replicates, args.seed)?;
    let r = inst.odds_summary().total();
    if let Some(path) = &args.csv {
        let fresh = std::fs::metadata(path)
            .map(|m| m.len() == 0)
            .unwrap_or(true);
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        let mut w = csv::WriterBuilder::new()
            .has_headers(fresh)
            .from_writer(file);
        w.serialize(McRow {
            policy: policy.name(),
            m: args.m,
            replicates: args.replicates,
            seed: args.seed,
            r: fmt_r(r),
            estimate: result.estimate,
            ci_halfwidth: result.ci_halfwidth,
        })?;
        w.flush()?;
    }
    print_json(&McReport {
        policy: policy.name(),
        method: result.method.as_str(),
        estimate: result.estimate,
        ci_halfwidth: result.ci_halfwidth,
        r: r.into(),
        bound: bound_for(&policy, args.m, r),
        m: args.m,
        replicates: args.replicates,
        seed: args.seed,
    })
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let policy = PolicyArgs {
        policy: args.policy,
        alpha0: args.alpha0,
        alpha1: args.alpha1,
        epsilon: None,
    }
    .build(1)?;
    if !policy.is_single_sample() {
        bail!("sweep evaluates single-sample policies exactly; use multisample-curve for {policy}");
    }
    if let Some(r) = args.r_grid.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
        bail!("R grid values must be positive and finite, got {r}");
    }
    let trials = args.trials_per_point;
    let jobs: Vec<(f64, u64)> = args
        .r_grid
        .iter()
        .enumerate()
        .flat_map(|(i, &r)| {
            (0..trials).map(move |t| (r, replicate_seed(args.seed, (i * trials + t) as u64)))
        })
        .collect();
    let rows: Vec<SweepRow> = jobs
        .par_iter()
        .map(|&(r, instance_seed)| -> Result<SweepRow> {
            let inst = random_with_total_odds(args.n, r, instance_seed)?;
            let dist = exact_threshold_distribution(&inst, &policy)?;
            let exact = policy_win_prob_exact(&inst, &dist)?.estimate;
            Ok(SweepRow {
                policy: policy.name(),
                n: args.n,
                r,
                instance_seed,
                exact_winprob: exact,
                lower_bound: bound_for(&policy, 1, r),
                upper_bound: opt_bound(r).min(0.25),
            })
        })
        .collect::<Result<_>>()?;
    write_rows(args.csv.as_deref(), &rows)
}

fn cmd_bounds(args: BoundsArgs) -> Result<()> {
    let rows: Vec<BoundsRow> = figure2_data(args.step, args.r_max)?
        .into_iter()
        .map(|row| BoundsRow {
            r: row.r_value,
            asls_bound: row.asls_bound,
            upper_bound: row.upper_bound,
            flsr_bound: flsr_lower_bound(row.r_value),
        })
        .collect();
    write_rows(args.csv.as_deref(), &rows)
}

fn cmd_multisample_curve(args: CurveArgs) -> Result<()> {
    let inst = read_instance(&args.instance)?;
    let r = inst.odds_summary().total();
    let rows: Vec<CurveRow> = args
        .m_list
        .iter()
        .map(|&m| -> Result<CurveRow> {
            let epsilon = default_epsilon(m);
            let policy = Policy::MultiSample(MultiSampleParams::new(epsilon)?);
            let res = monte_carlo_win_prob(&inst, &policy, m, args.replicates, args.seed)?;
            Ok(CurveRow {
                m,
                epsilon,
                estimate: res.estimate,
                ci_halfwidth: res.ci_halfwidth,
                guarantee: multi_sample_guarantee(m, r),
            })
        })
        .collect::<Result<_>>()?;
    write_rows(args.csv.as_deref(), &rows)
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Gen(a) => cmd_gen(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Mc(a) => cmd_mc(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::MultisampleCurve(a) => cmd_multisample_curve(a),
    }
}
