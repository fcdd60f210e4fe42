//! The trust-parametrized Hybrid `HY(Alg, λ, eps)`: each size's occurrences are dealt
//! round-robin, a `λ` share going to Group Covering and the rest to a purely online
//! algorithm.

use std::fmt;
use std::str::FromStr;

use crate::bintypes::BinTypeCatalog;
use crate::error::{invalid, Error, Result};
use crate::model::{format_rational, ratio, Covering, FrequencyVector, Instance, Owner, Rational};
use crate::online::dnf::Dnf;
use crate::online::group::{GroupCovering, GroupCoveringParams};
use crate::online::RunRecord;

/// `λ = κ/ℓ`, kept unreduced: `ℓ` is the routing period.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TrustLevel {
    pub kappa: u32,
    pub ell: u32,
}

impl TrustLevel {
    pub fn new(kappa: u32, ell: u32) -> Result<Self> {
        if ell == 0 || kappa > ell {
            return Err(invalid(format!("trust level {kappa}/{ell} must satisfy 0 <= κ <= ℓ, ℓ >= 1")));
        }
        Ok(TrustLevel { kappa, ell })
    }

    pub fn value(&self) -> Rational {
        ratio(self.kappa as u64, self.ell as u64)
    }

    /// Whether the occurrence with counter `c` goes to the inner algorithm.
    #[inline]
    pub fn routes_to_inner(&self, c: u64) -> bool {
        c % self.ell as u64 + (self.kappa as u64) < self.ell as u64
    }
}

impl FromStr for TrustLevel {
    type Err = Error;

    /// Parses `"κ/ℓ"`; a bare integer `κ` means `κ/1`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("not a trust level: {s:?}"));
        let (k, l) = s.split_once('/').unwrap_or((s, "1"));
        TrustLevel::new(k.trim().parse().map_err(|_| bad())?, l.trim().parse().map_err(|_| bad())?)
    }
}

impl fmt::Display for TrustLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.kappa, self.ell)
    }
}

/// The purely online algorithm Hybrid falls back on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum InnerAlgorithm {
    #[default]
    Dnf,
}

impl InnerAlgorithm {
    pub fn name(self) -> &'static str {
        match self {
            InnerAlgorithm::Dnf => "dnf",
        }
    }

    /// Competitive ratio `c` the guarantees use.
    pub fn ratio(self) -> Rational {
        match self {
            InnerAlgorithm::Dnf => ratio(1, 2),
        }
    }

    /// Additive constant: `DNF >= (Opt - 1)/2 >= Opt/2 - 1`.
    pub fn additive(self) -> u64 {
        match self {
            InnerAlgorithm::Dnf => 1,
        }
    }
}

impl FromStr for InnerAlgorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dnf" => Ok(InnerAlgorithm::Dnf),
            _ => Err(invalid(format!("unknown inner algorithm {s:?}"))),
        }
    }
}

pub fn hybrid_run(
    instance: &Instance,
    catalog: &BinTypeCatalog,
    prediction: &FrequencyVector,
    epsilon: &Rational,
    trust: TrustLevel,
    inner: InnerAlgorithm,
) -> Result<RunRecord> {
    let params = GroupCoveringParams::new(catalog, prediction, epsilon)?;
    Ok(hybrid_run_with(instance, &params, trust, inner))
}

/// The combined covering lists the inner algorithm's bins first, then Group Covering's.
pub fn hybrid_run_with(
    instance: &Instance,
    params: &GroupCoveringParams,
    trust: TrustLevel,
    inner: InnerAlgorithm,
) -> RunRecord {
    let units = instance.sizes().units();
    let mut pc = GroupCovering::new(params, units);
    let InnerAlgorithm::Dnf = inner;
    let mut alg = Dnf::new(Owner::Dnf);
    let mut seen = vec![0u64; instance.sizes().k()];
    for &a in instance.items() {
        let c = &mut seen[a as usize];
        if trust.routes_to_inner(*c) {
            alg.place(a, units);
        } else {
            pc.place(a);
        }
        *c += 1;
    }
    let out = pc.finish();
    let mut bins = alg.into_bins();
    bins.extend(out.bins);
    let mut record = RunRecord::new("hybrid", Covering::assemble(bins, units));
    record.groups_completed = out.groups_completed;
    record.groups_opened = out.groups_opened;
    record.extra_bins = out.extra_bins;
    record.param("eps", format_rational(&params.epsilon));
    record.param("lambda", trust.to_string());
    record.param("inner", inner.name().to_string());
    record
}
