//! `bincov`: command-line front end for the bin covering library.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use bincov::bintypes::enumerate_bin_types;
use bincov::generators::{Distribution, Family, GeneratorSpec};
use bincov::harness::{
    expected_ratio_mc, resolve_opt, run_experiment, stochastic_cases, sweep_lambda, tradeoff_cases,
    tradeoff_observation, AlgSpec, Execution, ExperimentConfig, OptMode, PredSource, RATIO_DIGITS,
};
use bincov::model::{format_decimal, parse_rational, ratio, InstanceFile};
use bincov::online::{InnerAlgorithm, TrustLevel};
use bincov::optcover::{opt_cover_with_budget, DEFAULT_NODE_BUDGET};
use bincov::{CountVector, FrequencyVector, Rational, Result, SizeSet};

#[derive(Parser)]
#[command(name = "bincov", version, about = "Online discrete bin covering with frequency predictions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance and write it as JSON.
    Gen(GenArgs),
    /// Print the catalog of non-wasteful bin types of a size set.
    EnumerateTypes(TypesArgs),
    /// Compute the exact offline optimum of a count vector.
    Opt(OptArgs),
    /// Run an algorithm on an instance file or on generated trials.
    Run(RunArgs),
    /// Sweep Hybrid's trust level over perfect and adversarial predictions.
    Sweep(SweepArgs),
    /// Monte-Carlo estimate of the expected ratio under a distribution.
    Ear(EarArgs),
}

#[derive(Args)]
struct SeedArg {
    /// Base seed; falls back to BINCOV_SEED, then 0.
    #[arg(long, env = "BINCOV_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct OutArg {
    /// Output file; `.csv` selects CSV, anything else JSON. Defaults to stdout (JSON).
    #[arg(short = 'o', long = "out")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExecArg {
    /// Run trials on one thread.
    #[arg(long)]
    sequential: bool,
}

impl ExecArg {
    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        }
    }
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    family: Family,
    #[arg(long)]
    k: u32,
    #[arg(long)]
    n: u64,
    /// Impossibility family index, 1 <= i <= k-1.
    #[arg(long)]
    i: Option<u32>,
    /// Stochastic family: size set (defaults to 1/k, 2/k, ..., 1).
    #[arg(long)]
    sizes: Option<String>,
    /// Stochastic family: probabilities per size (defaults to uniform).
    #[arg(long)]
    dist: Option<String>,
    #[command(flatten)]
    seed: SeedArg,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct TypesArgs {
    #[arg(long)]
    sizes: String,
    #[arg(long, default_value_t = bincov::bintypes::DEFAULT_TYPE_CAP)]
    cap: usize,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct OptArgs {
    #[arg(long)]
    sizes: String,
    /// Item count per size, in size order.
    #[arg(long)]
    counts: String,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    budget: usize,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgName {
    Dnf,
    Pc,
    Hybrid,
    Popc,
}

#[derive(Args)]
struct AlgArgs {
    #[arg(long)]
    alg: AlgName,
    #[arg(long)]
    eps: Option<String>,
    /// Trust level as `kappa/ell`.
    #[arg(long)]
    lambda: Option<TrustLevel>,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long, default_value = "dnf")]
    inner: InnerAlgorithm,
}

impl AlgArgs {
    fn spec(&self) -> Result<AlgSpec> {
        let name = match self.alg {
            AlgName::Dnf => "dnf",
            AlgName::Pc => "pc",
            AlgName::Hybrid => "hybrid",
            AlgName::Popc => "popc",
        };
        let mut spec = AlgSpec::from_parts(
            name,
            self.eps.as_deref().map(parse_rational).transpose()?,
            self.lambda,
            self.delta.as_deref().map(parse_rational).transpose()?,
        )?;
        if let AlgSpec::Hybrid { inner, .. } = &mut spec {
            *inner = self.inner;
        }
        Ok(spec)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OptModeArg {
    Auto,
    Exact,
    Analytic,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    alg: AlgArgs,
    /// Instance JSON file; a single run is reported.
    #[arg(long, conflicts_with = "family")]
    instance: Option<PathBuf>,
    /// Generator family; `--trials` seeded trials are reported.
    #[arg(long, requires = "k", requires = "n")]
    family: Option<Family>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    i: Option<u32>,
    /// Size set: checked against the instance file, or the stochastic family's set.
    #[arg(long)]
    sizes: Option<String>,
    #[arg(long)]
    dist: Option<String>,
    /// Prediction p1,...,pk; defaults to the generator's or file's prediction, else the
    /// instance's own frequencies.
    #[arg(long, conflicts_with = "eta")]
    pred: Option<String>,
    /// Perturb the instance's frequencies by this L1 distance instead.
    #[arg(long)]
    eta: Option<String>,
    #[arg(long, default_value_t = 1)]
    trials: u32,
    #[arg(long, value_enum, default_value_t = OptModeArg::Auto)]
    opt_mode: OptModeArg,
    /// Known optimum, overriding `--opt-mode`.
    #[arg(long)]
    opt: Option<u64>,
    /// Exit with status 2 unless every checked guarantee holds.
    #[arg(long)]
    check: bool,
    #[command(flatten)]
    seed: SeedArg,
    #[command(flatten)]
    out: OutArg,
    #[command(flatten)]
    exec: ExecArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepSource {
    Stochastic,
    Tradeoff,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum, default_value_t = SweepSource::Stochastic)]
    source: SweepSource,
    /// Stochastic source: size set and distribution (defaults to uniform).
    #[arg(long, default_value = "1/2,1")]
    sizes: String,
    #[arg(long)]
    dist: Option<String>,
    /// Tradeoff source: k.
    #[arg(long, default_value_t = 10)]
    k: u32,
    #[arg(long)]
    n: u64,
    #[arg(long, default_value = "0,1/4,1/2,3/4,1")]
    lambdas: String,
    #[arg(long, default_value = "1/2")]
    eps: String,
    #[arg(long, default_value = "dnf")]
    inner: InnerAlgorithm,
    #[arg(long)]
    check: bool,
    #[command(flatten)]
    seed: SeedArg,
    #[command(flatten)]
    out: OutArg,
    #[command(flatten)]
    exec: ExecArg,
}

#[derive(Args)]
struct EarArgs {
    #[command(flatten)]
    alg: AlgArgs,
    #[arg(long)]
    sizes: String,
    #[arg(long)]
    dist: Option<String>,
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = 20)]
    trials: u32,
    #[command(flatten)]
    seed: SeedArg,
    #[command(flatten)]
    out: OutArg,
    #[command(flatten)]
    exec: ExecArg,
}

fn main() -> ExitCode {
    // Status 2 is reserved for failed checks, so usage errors exit with 1.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::FAILURE } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::EnumerateTypes(a) => enumerate_types(a),
        Command::Opt(a) => opt(a),
        Command::Run(a) => run(a),
        Command::Sweep(a) => sweep(a),
        Command::Ear(a) => ear(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn emit_json<T: Serialize>(value: &T, out: &OutArg) -> Result<()> {
    let body = serde_json::to_string_pretty(value)? + "\n";
    emit(&body, out.out.as_deref())
}

fn emit(body: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, body)?,
        None => print_stdout(body)?,
    }
    Ok(())
}

/// Writes to stdout; a reader that closed the pipe early (`| head`) is not an error.
fn print_stdout(body: &str) -> Result<()> {
    let mut stdout = std::io::stdout().lock();
    match stdout.write_all(body.as_bytes()).and_then(|()| stdout.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn warn_single_size(sizes: &SizeSet) {
    if sizes.k() == 1 {
        eprintln!("warning: |S| = 1; the guarantees are stated for at least two sizes");
    }
}

fn parse_dist(dist: Option<&str>, sizes: &SizeSet) -> Result<FrequencyVector> {
    match dist {
        Some(d) => FrequencyVector::parse_list(d, false),
        None => FrequencyVector::uniform(sizes.k()),
    }
}

fn gen(a: GenArgs) -> Result<bool> {
    let mut spec = GeneratorSpec::new(a.family, a.k, a.n);
    spec.i = a.i;
    spec.seed = a.seed.seed;
    spec.sizes = a.sizes.as_deref().map(SizeSet::parse_list).transpose()?;
    spec.dist = a.dist.as_deref().map(|d| FrequencyVector::parse_list(d, false)).transpose()?;
    let generated = spec.generate()?;
    warn_single_size(generated.instance.sizes());
    emit_json(&generated.to_file(), &a.out)?;
    Ok(true)
}

fn enumerate_types(a: TypesArgs) -> Result<bool> {
    let sizes = SizeSet::parse_list(&a.sizes)?;
    warn_single_size(&sizes);
    let catalog = enumerate_bin_types(&sizes, a.cap)?;
    emit_json(&catalog.to_json(), &a.out)?;
    Ok(true)
}

fn opt(a: OptArgs) -> Result<bool> {
    let sizes = SizeSet::parse_list(&a.sizes)?;
    let counts = CountVector::parse_list(&a.counts)?;
    let catalog = bincov::bintypes::BinTypeCatalog::new(&sizes)?;
    let result = opt_cover_with_budget(&counts, &catalog, a.budget)?;
    emit_json(&result.to_json(&sizes), &a.out)?;
    Ok(true)
}

/// Output of a single `run` on an instance file.
#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct RunJson {
    alg: String,
    params: std::collections::BTreeMap<String, String>,
    profit: u64,
    opt: Option<u64>,
    ratio: Option<String>,
    g: u64,
    extra_bins: u64,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    guarantee: Option<bool>,
}

fn run(a: RunArgs) -> Result<bool> {
    let alg = a.alg.spec()?;
    let opt_mode = match (a.opt, a.opt_mode) {
        (Some(v), _) => OptMode::Provided(v),
        (None, OptModeArg::Auto) => OptMode::Auto,
        (None, OptModeArg::Exact) => OptMode::Exact,
        (None, OptModeArg::Analytic) => OptMode::Analytic,
    };
    let pred_source = match (&a.pred, &a.eta) {
        (Some(p), _) => Some(PredSource::Explicit(FrequencyVector::parse_list(p, false)?)),
        (None, Some(eta)) => Some(PredSource::Perturbed { eta: parse_rational(eta)? }),
        (None, None) => None,
    };

    if let Some(path) = &a.instance {
        let file: InstanceFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        let instance = file.to_instance()?;
        if let Some(s) = &a.sizes {
            if SizeSet::parse_list(s)? != *instance.sizes() {
                return Err(bincov::Error::InvalidArgument("--sizes does not match the instance file".into()));
            }
        }
        warn_single_size(instance.sizes());
        let catalog = bincov::bintypes::BinTypeCatalog::new(instance.sizes())?;
        let perfect = instance.frequencies().ok();
        let prediction = match pred_source {
            Some(PredSource::Explicit(f)) => Some(f),
            Some(PredSource::Perturbed { eta }) => match &perfect {
                Some(f) => Some(bincov::generators::perturb_prediction(f, &eta, a.seed.seed)?),
                None => None,
            },
            _ => file.prediction()?.or_else(|| perfect.clone()),
        };
        let mut record = alg.run(&instance, &catalog, prediction.as_ref())?;
        record.seed = Some(a.seed.seed);
        let opt = resolve_opt(opt_mode, &instance, file.known_opt, &catalog).ok();
        let is_perfect = prediction.is_some() && prediction == perfect;
        let guarantee = opt.and_then(|o| alg.guarantee_holds(&record, o, &catalog, is_perfect));
        let json = RunJson {
            alg: record.alg.clone(),
            params: record.params.clone(),
            profit: record.profit,
            opt,
            ratio: opt.filter(|&o| o > 0).map(|o| format_decimal(&ratio(record.profit, o), RATIO_DIGITS)),
            g: record.groups_completed,
            extra_bins: record.extra_bins,
            seed: a.seed.seed,
            guarantee,
        };
        emit_json(&json, &a.out)?;
        let dominated = opt.is_none_or(|o| record.profit <= o);
        return Ok(!a.check || (dominated && guarantee != Some(false)));
    }

    let family = a.family.ok_or_else(|| bincov::Error::InvalidArgument("run needs --instance or --family".into()))?;
    let mut generator = GeneratorSpec::new(family, a.k.unwrap_or(2), a.n.unwrap_or(0));
    generator.i = a.i;
    generator.sizes = a.sizes.as_deref().map(SizeSet::parse_list).transpose()?;
    generator.dist = a.dist.as_deref().map(|d| FrequencyVector::parse_list(d, false)).transpose()?;
    if generator.k == 1 || generator.sizes.as_ref().is_some_and(|s| s.k() == 1) {
        eprintln!("warning: |S| = 1; the guarantees are stated for at least two sizes");
    }
    let cfg = ExperimentConfig {
        alg: alg.clone(),
        generator,
        pred: pred_source.unwrap_or(PredSource::Generator),
        trials: a.trials,
        base_seed: a.seed.seed,
        opt_mode,
        execution: a.exec.execution(),
    };
    let report = run_experiment(&cfg)?;
    match &a.out.out {
        Some(p) => report.write(p)?,
        None => print_stdout(&(report.to_json()? + "\n"))?,
    }
    Ok(!a.check || report.check(&alg))
}

fn parse_trusts(list: &str) -> Result<Vec<TrustLevel>> {
    list.split(',').map(|s| s.trim().parse()).collect()
}

fn sweep(a: SweepArgs) -> Result<bool> {
    let eps: Rational = parse_rational(&a.eps)?;
    let trusts = parse_trusts(&a.lambdas)?;
    let cases = match a.source {
        SweepSource::Stochastic => {
            let sizes = SizeSet::parse_list(&a.sizes)?;
            warn_single_size(&sizes);
            let dist = Distribution::new(sizes.clone(), parse_dist(a.dist.as_deref(), &sizes)?)?;
            stochastic_cases(&dist, a.n, a.seed.seed)?
        }
        SweepSource::Tradeoff => tradeoff_cases(a.k, a.n)?,
    };
    let report = sweep_lambda(&cases, &trusts, &eps, a.inner, a.exec.execution())?;
    match &a.out.out {
        Some(p) => report.write(p)?,
        None => print_stdout(&(report.to_json()? + "\n"))?,
    }
    if let SweepSource::Tradeoff = a.source {
        for row in tradeoff_observation(&report, a.k) {
            eprintln!(
                "lambda={} alpha={} r={} 2alpha={} 2alpha/(1-2/k)={}",
                row.trust,
                format_decimal(&row.alpha, RATIO_DIGITS),
                format_decimal(&row.robustness, RATIO_DIGITS),
                format_decimal(&row.stated_bound, RATIO_DIGITS),
                format_decimal(&row.derived_bound, RATIO_DIGITS),
            );
        }
    }
    Ok(!a.check || report.all_ok())
}

fn ear(a: EarArgs) -> Result<bool> {
    let alg = a.alg.spec()?;
    let sizes = SizeSet::parse_list(&a.sizes)?;
    warn_single_size(&sizes);
    let dist = Distribution::new(sizes.clone(), parse_dist(a.dist.as_deref(), &sizes)?)?;
    let estimate = expected_ratio_mc(&alg, &dist, a.n, a.trials, a.seed.seed, a.exec.execution())?;
    match &a.out.out {
        Some(p) => estimate.write(p)?,
        None => print_stdout(&(estimate.to_json()? + "\n"))?,
    }
    eprintln!(
        "mean ratio {} (std. err. {:.6}) over {} trials; {} excluded with opt = 0",
        format_decimal(&estimate.mean, RATIO_DIGITS),
        estimate.std_err,
        estimate.used,
        estimate.excluded
    );
    Ok(true)
}
