//! POPC: learn frequencies from a DNF-placed prefix of `Φ` items, then run Group
//! Covering at `eps/2` with the learned prediction. Also the PAC sample-size threshold.

use num_traits::Signed;

use crate::bintypes::BinTypeCatalog;
use crate::error::{invalid, Result};
use crate::model::{ceil_u64, format_rational, int, to_f64, Covering, FrequencyVector, Instance, Owner, Rational};
use crate::model::{ratio, CountVector};
use crate::online::dnf::Dnf;
use crate::online::group::{check_open_unit, m_of, GroupCovering, GroupCoveringParams};
use crate::online::RunRecord;

/// Relative upward margin on floating-point logarithm terms, so rounding can never put
/// a computed threshold below the real-valued formula.
const LOG_MARGIN: f64 = 1e-12;

fn ceil_with_margin(x: f64) -> u64 {
    (x * (1.0 + LOG_MARGIN)).ceil() as u64
}

/// Sample size after which the empirical frequencies are within L1 distance `gamma`
/// of the truth with probability at least `1 - delta`:
/// `ceil(max(4k/γ², 8/γ² · ln(2/δ)))`.
pub fn pac_threshold(k: u32, gamma: &Rational, delta: &Rational) -> Result<u64> {
    if k == 0 {
        return Err(invalid("k must be positive"));
    }
    if !gamma.is_positive() {
        return Err(invalid(format!("gamma = {} must be positive", format_rational(gamma))));
    }
    check_open_unit("delta", delta)?;
    let g2 = gamma * gamma;
    let first = ceil_u64(&(int(4 * k as u64) / &g2))?;
    let second = ceil_with_margin(8.0 / to_f64(&g2) * (2.0 / to_f64(delta)).ln());
    Ok(first.max(second))
}

/// Exact per-size relative frequencies of a prefix.
pub fn empirical_frequencies(prefix: &Instance) -> Result<FrequencyVector> {
    prefix.frequencies()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PopcParams {
    pub epsilon: Rational,
    pub delta: Rational,
    /// `m_{eps/2} = ceil(6 · tau_S · tau_S^m / eps)`.
    pub m_half: u64,
    /// `m_{eps/2} + k`.
    pub m_k_half: u64,
    /// Length of the learning prefix.
    pub phi: u64,
}

impl PopcParams {
    /// `Φ = max{16k(m+1)², ceil(32(m+1)² ln(2/(1-sqrt(1-δ))))}` with `m = m_{k,eps/2}`.
    /// The logarithm is evaluated as `ln(2(1+sqrt(1-δ))/δ)`, which avoids cancellation.
    pub fn new(catalog: &BinTypeCatalog, epsilon: &Rational, delta: &Rational) -> Result<Self> {
        check_open_unit("eps", epsilon)?;
        check_open_unit("delta", delta)?;
        let k = catalog.sizes().k() as u64;
        let m_half = m_of(catalog, 6, epsilon)?;
        let m_k_half = m_half + k;
        let sq = ((m_k_half + 1) as u128).pow(2);
        let first = u64::try_from(16 * k as u128 * sq).map_err(|_| invalid("Φ overflows"))?;
        let d = to_f64(delta);
        let log_term = (2.0 * (1.0 + (1.0 - d).sqrt()) / d).ln();
        let second = ceil_with_margin(32.0 * sq as f64 * log_term);
        Ok(PopcParams { epsilon: epsilon.clone(), delta: delta.clone(), m_half, m_k_half, phi: first.max(second) })
    }

    /// Additive constant of the guarantee: `max{2Φ, m² + m + Φ}`.
    pub fn additive(&self) -> u64 {
        (2 * self.phi).max(self.m_k_half * self.m_k_half + self.m_k_half + self.phi)
    }
}

pub fn popc_run(instance: &Instance, catalog: &BinTypeCatalog, epsilon: &Rational, delta: &Rational) -> Result<RunRecord> {
    let params = PopcParams::new(catalog, epsilon, delta)?;
    popc_run_with(instance, catalog, &params)
}

pub fn popc_run_with(instance: &Instance, catalog: &BinTypeCatalog, params: &PopcParams) -> Result<RunRecord> {
    let sizes = instance.sizes();
    let units = sizes.units();
    let learn = (params.phi.min(instance.len() as u64)) as usize;
    let (prefix, rest) = instance.items().split_at(learn);

    let mut dnf = Dnf::new(Owner::Dnf);
    let mut counts = CountVector::zeros(sizes.k());
    for &a in prefix {
        dnf.place(a, units);
        counts.0[a as usize] += 1;
    }
    let mut bins = dnf.into_bins();

    let mut record_groups = (0, 0, 0);
    if !rest.is_empty() {
        let learned = FrequencyVector::new(counts.0.iter().map(|&c| ratio(c, params.phi)).collect())?;
        let half = &params.epsilon / int(2);
        let pc_params = GroupCoveringParams::new(catalog, &learned, &half)?;
        let mut pc = GroupCovering::new(&pc_params, units);
        for &a in rest {
            pc.place(a);
        }
        let out = pc.finish();
        record_groups = (out.groups_completed, out.groups_opened, out.extra_bins);
        bins.extend(out.bins);
    }

    let mut record = RunRecord::new("popc", Covering::assemble(bins, units));
    (record.groups_completed, record.groups_opened, record.extra_bins) = record_groups;
    record.param("eps", format_rational(&params.epsilon));
    record.param("delta", format_rational(&params.delta));
    record.param("phi", params.phi.to_string());
    Ok(record)
}
