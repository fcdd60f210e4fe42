//! Instance generators: the adversarial families behind the tradeoff and impossibility
//! results, i.i.d. sampling from a distribution, and controlled prediction errors.
//!
//! Randomness comes from ChaCha8 (`rand_chacha` 0.3) seeded with `seed_from_u64`.
//! Uniform draws use rejection sampling over raw 64-bit outputs, so a given
//! `(distribution, n, seed)` produces the same instance on every platform.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{ratio, FrequencyVector, Instance, Rational, SizeIdx, SizeSet};
use crate::optcover::{analytic_opt, closed_form_opt};

/// Name and version of the generator PRNG, echoed in reports.
pub const PRNG_NAME: &str = "chacha8/rand_chacha-0.3";

/// Adversarial instance families for the online algorithms, plus i.i.d. sampling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// `n` items of `(k-1)/k` followed by `n` items of `1/k`.
    #[serde(rename = "tradeoff1")]
    Tradeoff1,
    /// `n` items of `(k-1)/k`.
    #[serde(rename = "tradeoff2")]
    Tradeoff2,
    /// `n` items of `1/k` followed by `floor(n/i)` items of `(k-i)/k`, over `F_k`.
    #[serde(rename = "impossibility")]
    Impossibility,
    /// `n` items of `1/k` against a prediction of half `1/k`, half `(k-1)/k`.
    #[serde(rename = "anti-robust")]
    AntiRobust,
    #[serde(rename = "stochastic")]
    Stochastic,
}

impl Family {
    pub const ALL: [Family; 5] =
        [Family::Tradeoff1, Family::Tradeoff2, Family::Impossibility, Family::AntiRobust, Family::Stochastic];

    pub fn name(self) -> &'static str {
        match self {
            Family::Tradeoff1 => "tradeoff1",
            Family::Tradeoff2 => "tradeoff2",
            Family::Impossibility => "impossibility",
            Family::AntiRobust => "anti-robust",
            Family::Stochastic => "stochastic",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| invalid(format!("unknown family {s:?}")))
    }
}

/// Deterministic generator stream.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform integer in `[0, bound)` by rejection over raw 64-bit draws.
pub fn uniform_below(rng: &mut impl RngCore, bound: u64) -> u64 {
    assert!(bound > 0, "empty range");
    let zone = u64::MAX - (u64::MAX - bound + 1) % bound;
    loop {
        let x = rng.next_u64();
        if x <= zone {
            return x % bound;
        }
    }
}

/// Fisher-Yates shuffle driven by [`uniform_below`].
pub fn shuffle<T>(rng: &mut impl RngCore, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = uniform_below(rng, i as u64 + 1) as usize;
        items.swap(i, j);
    }
}

fn check_k(k: u32) -> Result<()> {
    if k < 2 {
        return Err(invalid(format!("k = {k} must be at least 2")));
    }
    Ok(())
}

/// Prediction putting 1/2 on `1/k` and 1/2 on `(k-1)/k` (a single 1 when `k = 2`).
fn tradeoff_prediction(k: u32) -> Result<FrequencyVector> {
    if k == 2 {
        FrequencyVector::point(1, 0)
    } else {
        FrequencyVector::uniform(2)
    }
}

/// An instance together with what its generator knows about it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generated {
    pub instance: Instance,
    pub known_opt: Option<u64>,
    pub prediction: Option<FrequencyVector>,
}

impl Generated {
    pub fn to_file(&self) -> crate::model::InstanceFile {
        let mut file = self.instance.to_file();
        file.known_opt = self.known_opt;
        file.prediction = self.prediction.as_ref().map(FrequencyVector::to_strings);
        file
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TradeoffPair {
    pub sigma1: Instance,
    pub sigma2: Instance,
    pub prediction: FrequencyVector,
    pub opt1: u64,
    pub opt2: u64,
}

/// The two instances no algorithm can tell apart for the first `n` items.
pub fn gen_tradeoff_pair(k: u32, n: u64) -> Result<TradeoffPair> {
    check_k(k)?;
    let sizes = SizeSet::tradeoff(k)?;
    let (small, large): (SizeIdx, SizeIdx) = (0, sizes.k() as SizeIdx - 1);
    let sigma1 = Instance::from_runs(sizes.clone(), &[(large, n), (small, n)])?;
    let sigma2 = Instance::from_runs(sizes, &[(large, n)])?;
    Ok(TradeoffPair {
        sigma1,
        sigma2,
        prediction: tradeoff_prediction(k)?,
        opt1: analytic_opt(Family::Tradeoff1, k, n, None)?,
        opt2: analytic_opt(Family::Tradeoff2, k, n, None)?,
    })
}

/// `n` items of `1/k`, then `floor(n/i)` items of `(k-i)/k`, over `F_k`.
pub fn gen_impossibility(k: u32, n: u64, i: u32) -> Result<Generated> {
    check_k(k)?;
    let known_opt = analytic_opt(Family::Impossibility, k, n, Some(i))?;
    let sizes = SizeSet::fk(k)?;
    let partner = (k - i - 1) as SizeIdx;
    let instance = Instance::from_runs(sizes, &[(0, n), (partner, n / i as u64)])?;
    Ok(Generated { instance, known_opt: Some(known_opt), prediction: None })
}

/// `n` items of `1/k` with the misleading half/half prediction.
pub fn gen_anti_robust(k: u32, n: u64) -> Result<Generated> {
    check_k(k)?;
    let sizes = SizeSet::tradeoff(k)?;
    let instance = Instance::from_runs(sizes, &[(0, n)])?;
    Ok(Generated {
        instance,
        known_opt: Some(analytic_opt(Family::AntiRobust, k, n, None)?),
        prediction: Some(tradeoff_prediction(k)?),
    })
}

/// A distribution over a size set with exact rational probabilities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distribution {
    sizes: SizeSet,
    probs: FrequencyVector,
    /// Cumulative probability numerators over the common denominator `scale`.
    cumulative: Vec<u64>,
    scale: u64,
}

impl Distribution {
    pub fn new(sizes: SizeSet, probs: FrequencyVector) -> Result<Self> {
        if probs.k() != sizes.k() {
            return Err(invalid(format!("distribution has {} entries for {} sizes", probs.k(), sizes.k())));
        }
        let mut lcm = BigInt::one();
        for p in probs.entries() {
            lcm = lcm.lcm(p.denom());
        }
        let scale = lcm.to_u64().ok_or_else(|| invalid("probability denominators too large"))?;
        let mut acc = 0u64;
        let cumulative = probs
            .entries()
            .iter()
            .map(|p| {
                acc += (p * Rational::from_integer(lcm.clone())).to_integer().to_u64().unwrap();
                acc
            })
            .collect();
        Ok(Distribution { sizes, probs, cumulative, scale })
    }

    pub fn uniform(sizes: SizeSet) -> Result<Self> {
        let k = sizes.k();
        Self::new(sizes, FrequencyVector::uniform(k)?)
    }

    pub fn sizes(&self) -> &SizeSet {
        &self.sizes
    }

    pub fn probs(&self) -> &FrequencyVector {
        &self.probs
    }

    pub fn draw(&self, rng: &mut impl RngCore) -> SizeIdx {
        let x = uniform_below(rng, self.scale);
        self.cumulative.partition_point(|&c| c <= x) as SizeIdx
    }
}

/// `n` i.i.d. draws from `dist`.
pub fn sample_stochastic(dist: &Distribution, n: u64, seed: u64) -> Instance {
    let mut rng = rng(seed);
    let items = (0..n).map(|_| dist.draw(&mut rng)).collect();
    Instance::new(dist.sizes.clone(), items).expect("draws are valid indices")
}

/// Moves mass `eta/2` from the largest entries of `f` to the smallest, so the result is
/// exactly `eta` away from `f` in L1. Ties in value are broken by a seeded shuffle.
pub fn perturb_prediction(f: &FrequencyVector, eta: &Rational, seed: u64) -> Result<FrequencyVector> {
    if eta.is_negative() || *eta > Rational::from_integer(BigInt::from(2)) {
        return Err(invalid("eta must lie in [0, 2]"));
    }
    if eta.is_zero() {
        return Ok(f.clone());
    }
    let mut entries = f.entries().to_vec();
    let mut order: Vec<usize> = (0..entries.len()).collect();
    shuffle(&mut rng(seed), &mut order);
    order.sort_by(|&a, &b| entries[a].cmp(&entries[b]));

    let mut remaining = eta / Rational::from_integer(BigInt::from(2));
    let (mut lo, mut hi) = (0usize, order.len() - 1);
    while remaining.is_positive() {
        if lo >= hi {
            return Err(invalid(format!("cannot move mass {} within {f}", crate::model::format_rational(eta))));
        }
        let (sink, source) = (order[lo], order[hi]);
        let room = Rational::one() - &entries[sink];
        let amount = remaining.clone().min(room.clone()).min(entries[source].clone());
        entries[sink] += &amount;
        entries[source] -= &amount;
        remaining -= &amount;
        if entries[source].is_zero() {
            hi -= 1;
        }
        if amount == room {
            lo += 1;
        }
    }
    FrequencyVector::new(entries)
}

/// Predictions used as the adversarial list in robustness sweeps: the tradeoff
/// prediction (half on the smallest size, half on the largest size below 1), every
/// point mass, and the uniform vector, without duplicates.
pub fn adversarial_predictions(sizes: &SizeSet) -> Vec<FrequencyVector> {
    let k = sizes.k();
    let mut out = Vec::new();
    let below_one = sizes.sizes().iter().rposition(|s| !s.value().is_one());
    let mut weights = vec![Rational::zero(); k];
    weights[0] += ratio(1, 2);
    weights[below_one.unwrap_or(0)] += ratio(1, 2);
    out.push(FrequencyVector::new(weights).expect("weights sum to 1"));
    out.extend((0..k).map(|i| FrequencyVector::point(k, i).expect("index in range")));
    out.push(FrequencyVector::uniform(k).expect("k >= 1"));
    let mut seen = Vec::new();
    out.retain(|f| {
        if seen.contains(f) {
            false
        } else {
            seen.push(f.clone());
            true
        }
    });
    out
}

/// Parameters of one generated instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub family: Family,
    pub k: u32,
    pub n: u64,
    pub i: Option<u32>,
    /// Stochastic only: the size set (defaults to `F_k`) and the distribution
    /// (defaults to uniform).
    pub sizes: Option<SizeSet>,
    pub dist: Option<FrequencyVector>,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(family: Family, k: u32, n: u64) -> Self {
        GeneratorSpec { family, k, n, i: None, sizes: None, dist: None, seed: 0 }
    }

    pub fn generate(&self) -> Result<Generated> {
        match self.family {
            Family::Tradeoff1 | Family::Tradeoff2 => {
                let pair = gen_tradeoff_pair(self.k, self.n)?;
                let (instance, opt) = if self.family == Family::Tradeoff1 {
                    (pair.sigma1, pair.opt1)
                } else {
                    (pair.sigma2, pair.opt2)
                };
                Ok(Generated { instance, known_opt: Some(opt), prediction: Some(pair.prediction) })
            }
            Family::Impossibility => {
                let i = self.i.ok_or_else(|| invalid("impossibility family needs i"))?;
                gen_impossibility(self.k, self.n, i)
            }
            Family::AntiRobust => gen_anti_robust(self.k, self.n),
            Family::Stochastic => {
                let sizes = match &self.sizes {
                    Some(s) => s.clone(),
                    None => SizeSet::fk(self.k)?,
                };
                let probs = match &self.dist {
                    Some(d) => d.clone(),
                    None => FrequencyVector::uniform(sizes.k())?,
                };
                let dist = Distribution::new(sizes, probs)?;
                let instance = sample_stochastic(&dist, self.n, self.seed);
                let known_opt = closed_form_opt(instance.sizes(), &instance.counts());
                Ok(Generated { instance, known_opt, prediction: Some(dist.probs.clone()) })
            }
        }
    }
}
