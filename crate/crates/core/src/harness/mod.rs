//! Experiment runner and metrics: per-trial ratios, trust-level sweeps, Monte-Carlo
//! expected ratios, the `1/2 + 1/H_{k-1}` bound, and CSV/JSON reports.
//!
//! Ratios are exact rationals; they are rendered as decimals only when written out.

mod par;

use std::fmt::Write as _;
use std::path::Path;

use num_traits::One;
use serde::Serialize;

pub use par::Execution;

use crate::bintypes::BinTypeCatalog;
use crate::error::{invalid, Result};
use crate::generators::{
    adversarial_predictions, gen_tradeoff_pair, perturb_prediction, sample_stochastic, Distribution, Family,
    Generated, GeneratorSpec,
};
use crate::model::{format_decimal, format_rational, int, ratio, to_f64, FrequencyVector, Instance, Rational};
use crate::online::{
    dnf_guarantee_holds, hybrid_additive, hybrid_run_with, pc_additive, pc_run_with, popc_run, GroupCoveringParams,
    InnerAlgorithm, PopcParams, RunRecord, TrustLevel,
};
use crate::optcover::{closed_form_opt, opt_cover};

/// Value of the `schema` column in every CSV row.
pub const SCHEMA_ID: &str = "bincov-report-v1";
pub const CSV_HEADER: &str = "schema,alg,family,k,n,eps,lambda,delta,seed,profit,opt,ratio,g,extra_bins";
/// Decimal places used when rendering ratios.
pub const RATIO_DIGITS: u32 = 6;

/// An algorithm together with its parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgSpec {
    Dnf,
    Pc { eps: Rational },
    Hybrid { eps: Rational, trust: TrustLevel, inner: InnerAlgorithm },
    Popc { eps: Rational, delta: Rational },
}

impl AlgSpec {
    /// Builds a spec from a name and optional parameters; missing parameters default to
    /// `eps = 1/2`, `λ = 1/2`, `δ = 1/2`.
    pub fn from_parts(
        name: &str,
        eps: Option<Rational>,
        trust: Option<TrustLevel>,
        delta: Option<Rational>,
    ) -> Result<Self> {
        let half = || ratio(1, 2);
        Ok(match name {
            "dnf" => AlgSpec::Dnf,
            "pc" => AlgSpec::Pc { eps: eps.unwrap_or_else(half) },
            "hybrid" => AlgSpec::Hybrid {
                eps: eps.unwrap_or_else(half),
                trust: trust.unwrap_or(TrustLevel { kappa: 1, ell: 2 }),
                inner: InnerAlgorithm::Dnf,
            },
            "popc" => AlgSpec::Popc { eps: eps.unwrap_or_else(half), delta: delta.unwrap_or_else(half) },
            _ => return Err(invalid(format!("unknown algorithm {name:?}"))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            AlgSpec::Dnf => "dnf",
            AlgSpec::Pc { .. } => "pc",
            AlgSpec::Hybrid { .. } => "hybrid",
            AlgSpec::Popc { .. } => "popc",
        }
    }

    pub fn eps(&self) -> Option<&Rational> {
        match self {
            AlgSpec::Dnf => None,
            AlgSpec::Pc { eps } | AlgSpec::Hybrid { eps, .. } | AlgSpec::Popc { eps, .. } => Some(eps),
        }
    }

    pub fn trust(&self) -> Option<TrustLevel> {
        match self {
            AlgSpec::Hybrid { trust, .. } => Some(*trust),
            _ => None,
        }
    }

    pub fn delta(&self) -> Option<&Rational> {
        match self {
            AlgSpec::Popc { delta, .. } => Some(delta),
            _ => None,
        }
    }

    pub fn needs_prediction(&self) -> bool {
        matches!(self, AlgSpec::Pc { .. } | AlgSpec::Hybrid { .. })
    }

    pub fn run(
        &self,
        instance: &Instance,
        catalog: &BinTypeCatalog,
        prediction: Option<&FrequencyVector>,
    ) -> Result<RunRecord> {
        let need = || prediction.ok_or_else(|| invalid(format!("{} needs a prediction", self.name())));
        match self {
            AlgSpec::Dnf => Ok(crate::online::dnf_run(instance)),
            AlgSpec::Pc { eps } => {
                let params = GroupCoveringParams::new(catalog, need()?, eps)?;
                Ok(pc_run_with(instance, &params))
            }
            AlgSpec::Hybrid { eps, trust, inner } => {
                let params = GroupCoveringParams::new(catalog, need()?, eps)?;
                Ok(hybrid_run_with(instance, &params, *trust, *inner))
            }
            AlgSpec::Popc { eps, delta } => popc_run(instance, catalog, eps, delta),
        }
    }

    /// Checks the deterministic guarantee that applies to this run, if any:
    /// DNF's `(Opt - 1)/2`; for Group Covering with perfect predictions
    /// `(1 - eps)·Opt - (m² + m)`; for Hybrid the consistency bound with perfect
    /// predictions and the robustness bound otherwise; for POPC the
    /// `(1 - eps)·Opt - b` event, which only holds with probability `1 - delta`.
    pub fn guarantee_holds(&self, record: &RunRecord, opt: u64, catalog: &BinTypeCatalog, perfect: bool) -> Option<bool> {
        let k = catalog.sizes().k() as u64;
        match self {
            AlgSpec::Dnf => Some(dnf_guarantee_holds(record.profit, opt)),
            AlgSpec::Pc { eps } if perfect => {
                let m_k = crate::online::GroupCoveringParams::new(catalog, &FrequencyVector::uniform(k as usize).ok()?, eps)
                    .ok()?
                    .m_k_eps;
                Some(meets(record.profit, &(Rational::one() - eps), opt, pc_additive(m_k)))
            }
            AlgSpec::Pc { .. } => None,
            AlgSpec::Hybrid { eps, trust, inner } => {
                let uniform = FrequencyVector::uniform(k as usize).ok()?;
                let m_k = GroupCoveringParams::new(catalog, &uniform, eps).ok()?.m_k_eps;
                let b = hybrid_additive(*inner, m_k, k, *trust, catalog.tau_s() as u64);
                let factor = hybrid_factor(eps, *trust, *inner, perfect);
                Some(meets(record.profit, &factor, opt, b))
            }
            AlgSpec::Popc { eps, delta } => {
                let params = PopcParams::new(catalog, eps, delta).ok()?;
                Some(meets(record.profit, &(Rational::one() - eps), opt, params.additive()))
            }
        }
    }
}

/// `profit >= factor · opt - b`, exactly.
pub fn meets(profit: u64, factor: &Rational, opt: u64, b: u64) -> bool {
    int(profit + b) >= factor * int(opt)
}

/// Multiplicative factor of Hybrid's guarantee: `λ(1-eps) + (1-λ)c` with perfect
/// predictions, `(1-λ)c` otherwise.
pub fn hybrid_factor(eps: &Rational, trust: TrustLevel, inner: InnerAlgorithm, perfect: bool) -> Rational {
    let lambda = trust.value();
    let robust = (Rational::one() - &lambda) * inner.ratio();
    if perfect {
        lambda * (Rational::one() - eps) + robust
    } else {
        robust
    }
}

/// Where the prediction given to the algorithm comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PredSource {
    /// The instance's own frequencies.
    Perfect,
    /// The prediction attached by the generator (the family's or the distribution).
    Generator,
    Explicit(FrequencyVector),
    /// The instance's frequencies moved by `eta` in L1, seeded per trial.
    Perturbed { eta: Rational },
}

/// How a trial's optimum is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OptMode {
    /// Generator closed form, then a size-set closed form, then exact search for small
    /// instances (at most `12·k` items).
    Auto,
    Exact,
    Analytic,
    Provided(u64),
}

/// Resolves the optimum of an instance.
pub fn resolve_opt(mode: OptMode, instance: &Instance, known_opt: Option<u64>, catalog: &BinTypeCatalog) -> Result<u64> {
    let counts = instance.counts();
    let exact = || opt_cover(&counts, catalog).map(|r| r.profit);
    let analytic = || known_opt.or_else(|| closed_form_opt(instance.sizes(), &counts));
    match mode {
        OptMode::Provided(v) => Ok(v),
        OptMode::Exact => exact(),
        OptMode::Analytic => analytic().ok_or_else(|| invalid("no closed-form optimum for this instance")),
        OptMode::Auto => match analytic() {
            Some(v) => Ok(v),
            None if instance.len() <= 12 * instance.sizes().k() => exact(),
            None => Err(invalid("instance too large for exact search and no known optimum; supply one")),
        },
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub alg: AlgSpec,
    pub generator: GeneratorSpec,
    pub pred: PredSource,
    pub trials: u32,
    pub base_seed: u64,
    pub opt_mode: OptMode,
    pub execution: Execution,
}

impl ExperimentConfig {
    pub fn new(alg: AlgSpec, generator: GeneratorSpec) -> Self {
        ExperimentConfig {
            alg,
            generator,
            pred: PredSource::Generator,
            trials: 1,
            base_seed: 0,
            opt_mode: OptMode::Auto,
            execution: Execution::default(),
        }
    }
}

/// Seed of trial `t`: a SplitMix64 step over the base seed.
pub fn trial_seed(base: u64, t: u64) -> u64 {
    let mut z = base.wrapping_add(t.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One trial of an experiment. `opt` and `ratio` are absent for failed trials, and
/// `ratio` is absent when `opt = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialRow {
    pub alg: String,
    pub family: String,
    pub k: u32,
    pub n: u64,
    pub eps: Option<Rational>,
    pub lambda: Option<TrustLevel>,
    pub delta: Option<Rational>,
    pub seed: u64,
    pub profit: u64,
    pub opt: Option<u64>,
    pub ratio: Option<Rational>,
    pub g: u64,
    pub extra_bins: u64,
    /// Whether the run met the algorithm's guarantee (see [`AlgSpec::guarantee_holds`]).
    pub guarantee: Option<bool>,
    pub error: Option<String>,
}

impl TrialRow {
    fn from_record(alg: &AlgSpec, family: &str, k: u32, n: u64, seed: u64, record: &RunRecord, opt: u64) -> Self {
        TrialRow {
            alg: alg.name().to_string(),
            family: family.to_string(),
            k,
            n,
            eps: alg.eps().cloned(),
            lambda: alg.trust(),
            delta: alg.delta().cloned(),
            seed,
            profit: record.profit,
            opt: Some(opt),
            ratio: (opt > 0).then(|| ratio(record.profit, opt)),
            g: record.groups_completed,
            extra_bins: record.extra_bins,
            guarantee: None,
            error: None,
        }
    }

    fn failed(alg: &AlgSpec, family: &str, k: u32, n: u64, seed: u64, error: String) -> Self {
        TrialRow {
            alg: alg.name().to_string(),
            family: family.to_string(),
            k,
            n,
            eps: alg.eps().cloned(),
            lambda: alg.trust(),
            delta: alg.delta().cloned(),
            seed,
            profit: 0,
            opt: None,
            ratio: None,
            g: 0,
            extra_bins: 0,
            guarantee: None,
            error: Some(error),
        }
    }

    pub fn csv_line(&self) -> String {
        let opt_str = |r: &Option<Rational>| r.as_ref().map(format_rational).unwrap_or_default();
        let ok = self.error.is_none();
        format!(
            "{SCHEMA_ID},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.alg,
            self.family,
            self.k,
            self.n,
            opt_str(&self.eps),
            self.lambda.map(|t| t.to_string()).unwrap_or_default(),
            opt_str(&self.delta),
            self.seed,
            if ok { self.profit.to_string() } else { String::new() },
            self.opt.map(|o| o.to_string()).unwrap_or_default(),
            self.ratio.as_ref().map(|r| format_decimal(r, RATIO_DIGITS)).unwrap_or_default(),
            if ok { self.g.to_string() } else { String::new() },
            if ok { self.extra_bins.to_string() } else { String::new() },
        )
    }

    fn to_json(&self) -> TrialJson {
        TrialJson {
            alg: self.alg.clone(),
            family: self.family.clone(),
            k: self.k,
            n: self.n,
            eps: self.eps.as_ref().map(format_rational),
            lambda: self.lambda.map(|t| t.to_string()),
            delta: self.delta.as_ref().map(format_rational),
            seed: self.seed,
            profit: self.profit,
            opt: self.opt,
            ratio: self.ratio.as_ref().map(|r| format_decimal(r, RATIO_DIGITS)),
            g: self.g,
            extra_bins: self.extra_bins,
            guarantee: self.guarantee,
            error: self.error.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct TrialJson {
    alg: String,
    family: String,
    k: u32,
    n: u64,
    eps: Option<String>,
    lambda: Option<String>,
    delta: Option<String>,
    seed: u64,
    profit: u64,
    opt: Option<u64>,
    ratio: Option<String>,
    g: u64,
    extra_bins: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    guarantee: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

/// Aggregates over the trials that produced a ratio.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Summary {
    pub trials: usize,
    pub errors: usize,
    /// Trials with `opt = 0`, which have no ratio.
    pub zero_opt: usize,
    /// Rows whose guarantee was checked, and how many of them met it.
    pub checked: usize,
    pub met: usize,
    pub min: Option<Rational>,
    pub mean: Option<Rational>,
    /// Nearest-rank 10%, 50% and 90% quantiles.
    pub p10: Option<Rational>,
    pub median: Option<Rational>,
    pub p90: Option<Rational>,
}

impl Summary {
    pub fn of(rows: &[TrialRow]) -> Self {
        let mut ratios: Vec<Rational> = rows.iter().filter_map(|r| r.ratio.clone()).collect();
        ratios.sort();
        let q = |p: u64| -> Option<Rational> {
            let n = ratios.len() as u64;
            (n > 0).then(|| ratios[((p * n).div_ceil(100).max(1) - 1) as usize].clone())
        };
        let mean = (!ratios.is_empty())
            .then(|| ratios.iter().sum::<Rational>() / int(ratios.len() as u64));
        Summary {
            trials: rows.len(),
            errors: rows.iter().filter(|r| r.error.is_some()).count(),
            zero_opt: rows.iter().filter(|r| r.opt == Some(0)).count(),
            checked: rows.iter().filter(|r| r.guarantee.is_some()).count(),
            met: rows.iter().filter(|r| r.guarantee == Some(true)).count(),
            min: ratios.first().cloned(),
            mean,
            p10: q(10),
            median: q(50),
            p90: q(90),
        }
    }

    fn to_json(&self) -> SummaryJson {
        let d = |r: &Option<Rational>| r.as_ref().map(|r| format_decimal(r, RATIO_DIGITS));
        SummaryJson {
            trials: self.trials,
            errors: self.errors,
            zero_opt: self.zero_opt,
            checked: self.checked,
            met: self.met,
            min: d(&self.min),
            mean: d(&self.mean),
            p10: d(&self.p10),
            median: d(&self.median),
            p90: d(&self.p90),
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct SummaryJson {
    trials: usize,
    errors: usize,
    zero_opt: usize,
    checked: usize,
    met: usize,
    min: Option<String>,
    mean: Option<String>,
    p10: Option<String>,
    median: Option<String>,
    p90: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatioReport {
    pub rows: Vec<TrialRow>,
    pub summary: Summary,
    /// `1/2 + 1/H_{k-1}` for the generator's `k`, when `k >= 2`.
    pub h_bound: Option<Rational>,
}

impl RatioReport {
    pub fn from_rows(rows: Vec<TrialRow>, k: u32) -> Self {
        RatioReport { summary: Summary::of(&rows), rows, h_bound: h_bound(k).ok() }
    }

    pub fn to_csv(&self) -> String {
        rows_to_csv(&self.rows)
    }

    /// The `--check` verdict: no failed trials, `profit <= opt` everywhere, and the
    /// guarantee met by every trial, or for POPC by a `1 - delta` fraction of them.
    pub fn check(&self, alg: &AlgSpec) -> bool {
        let s = &self.summary;
        let dominated = self.rows.iter().all(|r| r.opt.is_some_and(|o| r.profit <= o));
        let guarantees = match alg.delta() {
            Some(delta) => int(s.met as u64) >= (Rational::one() - delta) * int(s.checked as u64),
            None => s.met == s.checked,
        };
        s.errors == 0 && dominated && guarantees
    }

    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        #[serde(rename_all = "camelCase")]
        struct Json {
            schema: &'static str,
            rows: Vec<TrialJson>,
            summary: SummaryJson,
            h_bound: Option<String>,
        }
        let json = Json {
            schema: SCHEMA_ID,
            rows: self.rows.iter().map(TrialRow::to_json).collect(),
            summary: self.summary.to_json(),
            h_bound: self.h_bound.as_ref().map(format_rational),
        };
        Ok(serde_json::to_string_pretty(&json)?)
    }

    /// Writes CSV when `path` ends in `.csv`, JSON otherwise.
    pub fn write(&self, path: &Path) -> Result<()> {
        let body = if is_csv(path) { self.to_csv() } else { self.to_json()? + "\n" };
        std::fs::write(path, body)?;
        Ok(())
    }
}

pub fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

pub fn rows_to_csv(rows: &[TrialRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let _ = writeln!(out, "{}", row.csv_line());
    }
    out
}

fn prediction_for(source: &PredSource, generated: &Generated, seed: u64) -> Result<Option<FrequencyVector>> {
    let perfect = || generated.instance.frequencies();
    Ok(match source {
        PredSource::Perfect => Some(perfect()?),
        PredSource::Generator => match &generated.prediction {
            Some(p) => Some(p.clone()),
            None => Some(perfect()?),
        },
        PredSource::Explicit(f) => Some(f.clone()),
        PredSource::Perturbed { eta } => Some(perturb_prediction(&perfect()?, eta, seed)?),
    })
}

fn run_trial(cfg: &ExperimentConfig, seed: u64) -> TrialRow {
    let spec = GeneratorSpec { seed, ..cfg.generator.clone() };
    let family = spec.family.name();
    let attempt = || -> Result<TrialRow> {
        let generated = spec.generate()?;
        let catalog = BinTypeCatalog::new(generated.instance.sizes())?;
        let prediction =
            if cfg.alg.needs_prediction() { prediction_for(&cfg.pred, &generated, seed)? } else { None };
        let record = cfg.alg.run(&generated.instance, &catalog, prediction.as_ref())?;
        let opt = resolve_opt(cfg.opt_mode, &generated.instance, generated.known_opt, &catalog)?;
        let perfect = match &prediction {
            Some(p) => generated.instance.frequencies().is_ok_and(|f| f == *p),
            None => false,
        };
        let mut row = TrialRow::from_record(&cfg.alg, family, spec.k, generated.instance.len() as u64, seed, &record, opt);
        row.guarantee = cfg.alg.guarantee_holds(&record, opt, &catalog, perfect);
        Ok(row)
    };
    attempt().unwrap_or_else(|e| TrialRow::failed(&cfg.alg, family, spec.k, spec.n, seed, e.to_string()))
}

/// Runs `cfg.trials` independent trials. Failures (for example an exhausted search
/// budget) become error rows; the other trials still run.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RatioReport> {
    if cfg.trials == 0 {
        return Err(invalid("an experiment needs at least one trial"));
    }
    let seeds: Vec<u64> = (0..cfg.trials as u64).map(|t| trial_seed(cfg.base_seed, t)).collect();
    let rows = cfg.execution.map(seeds, |seed| run_trial(cfg, seed));
    Ok(RatioReport::from_rows(rows, cfg.generator.k))
}

/// One instance/prediction pair in a trust-level sweep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepCase {
    pub label: String,
    pub instance: Instance,
    pub opt: u64,
    pub prediction: FrequencyVector,
    /// Whether `prediction` equals the instance's frequencies.
    pub perfect: bool,
}

impl SweepCase {
    pub fn new(label: impl Into<String>, instance: Instance, opt: u64, prediction: FrequencyVector) -> Self {
        let perfect = instance.frequencies().is_ok_and(|f| f == prediction);
        SweepCase { label: label.into(), instance, opt, prediction, perfect }
    }
}

/// One sampled instance with its perfect prediction and every adversarial prediction.
pub fn stochastic_cases(dist: &Distribution, n: u64, seed: u64) -> Result<Vec<SweepCase>> {
    let instance = sample_stochastic(dist, n, seed);
    let catalog = BinTypeCatalog::new(instance.sizes())?;
    let opt = resolve_opt(OptMode::Auto, &instance, None, &catalog)?;
    let mut cases = vec![SweepCase::new("stochastic/perfect", instance.clone(), opt, instance.frequencies()?)];
    for (i, f) in adversarial_predictions(instance.sizes()).into_iter().enumerate() {
        cases.push(SweepCase::new(format!("stochastic/adversarial-{i}"), instance.clone(), opt, f));
    }
    Ok(cases)
}

/// The tradeoff pair: the shared prediction is perfect for the first instance and
/// wrong for the second.
pub fn tradeoff_cases(k: u32, n: u64) -> Result<Vec<SweepCase>> {
    let pair = gen_tradeoff_pair(k, n)?;
    Ok(vec![
        SweepCase::new("tradeoff1", pair.sigma1, pair.opt1, pair.prediction.clone()),
        SweepCase::new("tradeoff2", pair.sigma2, pair.opt2, pair.prediction),
    ])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepRow {
    pub trust: TrustLevel,
    /// Worst ratio over cases with perfect predictions.
    pub consistency: Option<Rational>,
    /// Worst ratio over cases with imperfect predictions (all cases if none is).
    pub robustness: Option<Rational>,
    pub consistency_factor: Rational,
    pub robustness_factor: Rational,
    /// Additive constant `b` of both guarantees.
    pub additive: u64,
    /// Every perfect case meets `factor·Opt - b`.
    pub consistency_ok: bool,
    /// Every case meets `(1-λ)c·Opt - b`.
    pub robustness_ok: bool,
    pub rows: Vec<TrialRow>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepReport {
    pub eps: Rational,
    pub inner: InnerAlgorithm,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(|r| r.consistency_ok && r.robustness_ok)
    }

    pub fn to_csv(&self) -> String {
        let rows: Vec<TrialRow> = self.rows.iter().flat_map(|r| r.rows.iter().cloned()).collect();
        rows_to_csv(&rows)
    }

    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        #[serde(rename_all = "camelCase")]
        struct Row {
            lambda: String,
            consistency: Option<String>,
            robustness: Option<String>,
            consistency_factor: String,
            robustness_factor: String,
            additive: u64,
            consistency_ok: bool,
            robustness_ok: bool,
            trials: Vec<TrialJson>,
        }
        #[derive(Serialize)]
        struct Json {
            schema: &'static str,
            eps: String,
            inner: &'static str,
            sweep: Vec<Row>,
        }
        let d = |r: &Option<Rational>| r.as_ref().map(|r| format_decimal(r, RATIO_DIGITS));
        let json = Json {
            schema: SCHEMA_ID,
            eps: format_rational(&self.eps),
            inner: self.inner.name(),
            sweep: self
                .rows
                .iter()
                .map(|r| Row {
                    lambda: r.trust.to_string(),
                    consistency: d(&r.consistency),
                    robustness: d(&r.robustness),
                    consistency_factor: format_rational(&r.consistency_factor),
                    robustness_factor: format_rational(&r.robustness_factor),
                    additive: r.additive,
                    consistency_ok: r.consistency_ok,
                    robustness_ok: r.robustness_ok,
                    trials: r.rows.iter().map(TrialRow::to_json).collect(),
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&json)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let body = if is_csv(path) { self.to_csv() } else { self.to_json()? + "\n" };
        std::fs::write(path, body)?;
        Ok(())
    }
}

/// Runs Hybrid on every case for every trust level and checks the consistency and
/// robustness guarantees row by row.
pub fn sweep_lambda(
    cases: &[SweepCase],
    trusts: &[TrustLevel],
    eps: &Rational,
    inner: InnerAlgorithm,
    execution: Execution,
) -> Result<SweepReport> {
    if cases.is_empty() {
        return Err(invalid("a sweep needs at least one case"));
    }
    // Group Covering parameters depend only on (S, prediction, eps).
    let mut prepared = Vec::with_capacity(cases.len());
    for case in cases {
        let catalog = BinTypeCatalog::new(case.instance.sizes())?;
        let params = GroupCoveringParams::new(&catalog, &case.prediction, eps)?;
        prepared.push((case, catalog, params));
    }
    let jobs: Vec<(usize, TrustLevel)> =
        trusts.iter().flat_map(|&t| (0..prepared.len()).map(move |i| (i, t))).collect();
    let records = execution.map(jobs, |(i, trust)| {
        let (case, _, params) = &prepared[i];
        (i, trust, hybrid_run_with(&case.instance, params, trust, inner))
    });

    let mut rows = Vec::with_capacity(trusts.len());
    for (t_idx, &trust) in trusts.iter().enumerate() {
        let consistency_factor = hybrid_factor(eps, trust, inner, true);
        let robustness_factor = hybrid_factor(eps, trust, inner, false);
        let mut additive = 0;
        let (mut consistency, mut robustness, mut fallback): (Option<Rational>, Option<Rational>, Option<Rational>) =
            (None, None, None);
        let (mut consistency_ok, mut robustness_ok) = (true, true);
        let mut trial_rows = Vec::new();
        for (i, _, record) in &records[t_idx * prepared.len()..(t_idx + 1) * prepared.len()] {
            let (case, catalog, params) = &prepared[*i];
            let k = catalog.sizes().k() as u64;
            let b = hybrid_additive(inner, params.m_k_eps, k, trust, catalog.tau_s() as u64);
            additive = additive.max(b);
            let r = if case.opt == 0 { Rational::one() } else { ratio(record.profit, case.opt) };
            let min_into = |slot: &mut Option<Rational>| {
                if slot.as_ref().is_none_or(|m| r < *m) {
                    *slot = Some(r.clone());
                }
            };
            if case.perfect {
                min_into(&mut consistency);
                consistency_ok &= meets(record.profit, &consistency_factor, case.opt, b);
            } else {
                min_into(&mut robustness);
            }
            min_into(&mut fallback);
            robustness_ok &= meets(record.profit, &robustness_factor, case.opt, b);

            let alg = AlgSpec::Hybrid { eps: eps.clone(), trust, inner };
            let mut row =
                TrialRow::from_record(&alg, &case.label, k as u32, case.instance.len() as u64, 0, record, case.opt);
            row.g = record.groups_completed;
            trial_rows.push(row);
        }
        rows.push(SweepRow {
            trust,
            consistency,
            robustness: robustness.or(fallback),
            consistency_factor,
            robustness_factor,
            additive,
            consistency_ok,
            robustness_ok,
            rows: trial_rows,
        });
    }
    Ok(SweepReport { eps: eps.clone(), inner, rows })
}

/// Measured consistency/robustness of one trust level against the tradeoff bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TradeoffRow {
    pub trust: TrustLevel,
    /// `1 - consistency`.
    pub alpha: Rational,
    pub robustness: Rational,
    /// `2·alpha`, the bound as the impossibility result states it.
    pub stated_bound: Rational,
    /// `2·alpha / (1 - 2/k)`, the bound its argument yields.
    pub derived_bound: Rational,
}

pub fn tradeoff_observation(report: &SweepReport, k: u32) -> Vec<TradeoffRow> {
    report
        .rows
        .iter()
        .filter_map(|row| {
            let consistency = row.consistency.clone()?;
            let robustness = row.robustness.clone()?;
            let alpha = Rational::one() - consistency;
            let stated_bound = int(2) * &alpha;
            let derived_bound = if k > 2 { &stated_bound / (Rational::one() - ratio(2, k as u64)) } else { int(2) };
            Some(TradeoffRow { trust: row.trust, alpha, robustness, stated_bound, derived_bound })
        })
        .collect()
}

/// Monte-Carlo estimate of `E[Alg/Opt]` at a fixed `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct EarEstimate {
    pub mean: Rational,
    pub std_err: f64,
    pub used: usize,
    /// Trials with `opt = 0`, excluded from the estimate.
    pub excluded: usize,
    pub rows: Vec<TrialRow>,
}

impl EarEstimate {
    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        #[serde(rename_all = "camelCase")]
        struct Json {
            schema: &'static str,
            mean: String,
            std_err: String,
            used: usize,
            excluded: usize,
            note: &'static str,
            rows: Vec<TrialJson>,
        }
        Ok(serde_json::to_string_pretty(&Json {
            schema: SCHEMA_ID,
            mean: format_decimal(&self.mean, RATIO_DIGITS),
            std_err: format!("{:.6}", self.std_err),
            used: self.used,
            excluded: self.excluded,
            note: "finite-n estimate; the liminf over n is not computed",
            rows: self.rows.iter().map(TrialRow::to_json).collect(),
        })?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let body = if is_csv(path) { rows_to_csv(&self.rows) } else { self.to_json()? + "\n" };
        std::fs::write(path, body)?;
        Ok(())
    }
}

/// Runs `trials` i.i.d. instances of length `n` from `dist`; predictions (for
/// algorithms that use them) are the distribution itself.
pub fn expected_ratio_mc(
    alg: &AlgSpec,
    dist: &Distribution,
    n: u64,
    trials: u32,
    base_seed: u64,
    execution: Execution,
) -> Result<EarEstimate> {
    if trials < 2 {
        return Err(invalid("a Monte-Carlo estimate needs at least two trials"));
    }
    let mut generator = GeneratorSpec::new(Family::Stochastic, dist.sizes().k() as u32, n);
    generator.sizes = Some(dist.sizes().clone());
    generator.dist = Some(dist.probs().clone());
    let cfg = ExperimentConfig {
        alg: alg.clone(),
        generator,
        pred: PredSource::Generator,
        trials,
        base_seed,
        opt_mode: OptMode::Auto,
        execution,
    };
    let report = run_experiment(&cfg)?;
    if let Some(row) = report.rows.iter().find(|r| r.error.is_some()) {
        return Err(invalid(format!("trial failed: {}", row.error.as_deref().unwrap_or_default())));
    }
    let ratios: Vec<&Rational> = report.rows.iter().filter_map(|r| r.ratio.as_ref()).collect();
    if ratios.is_empty() {
        return Err(invalid("every trial had opt = 0"));
    }
    let used = ratios.len();
    let mean = ratios.iter().copied().sum::<Rational>() / int(used as u64);
    let m = to_f64(&mean);
    let var = ratios.iter().map(|r| (to_f64(r) - m).powi(2)).sum::<f64>() / (used as f64 - 1.0).max(1.0);
    let std_err = if used > 1 { (var / used as f64).sqrt() } else { 0.0 };
    Ok(EarEstimate { mean, std_err, used, excluded: report.rows.len() - used, rows: report.rows })
}

/// `1/2 + 1/H_{k-1}` with `H_{k-1} = Σ_{i<k} 1/i`.
pub fn h_bound(k: u32) -> Result<Rational> {
    if k < 2 {
        return Err(invalid("k must be at least 2"));
    }
    let h: Rational = (1..k as u64).map(|i| ratio(1, i)).sum();
    Ok(ratio(1, 2) + Rational::one() / h)
}
