//! Online algorithms: Dual-Next-Fit, Group Covering, the ℓ-splitting, Hybrid and POPC,
//! plus the additive constants of their guarantees.

mod dnf;
mod group;
mod hybrid;
mod popc;
mod split;

use std::collections::BTreeMap;

use serde::Serialize;

pub use crate::model::l1_distance;
pub use dnf::{dnf_run, Dnf};
pub use group::{num_completed_groups, pc_run, pc_run_with, GroupCovering, GroupCoveringParams, GroupOutcome};
pub use hybrid::{hybrid_run, hybrid_run_with, InnerAlgorithm, TrustLevel};
pub use popc::{empirical_frequencies, pac_threshold, popc_run, popc_run_with, PopcParams};
pub use split::{lambda_split, LambdaSplit};

use crate::model::Covering;

/// Output of one algorithm run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunRecord {
    pub alg: String,
    pub params: BTreeMap<String, String>,
    pub covering: Covering,
    pub profit: u64,
    /// Completed Group Covering groups (`g_eps`); 0 for algorithms without groups.
    pub groups_completed: u64,
    pub groups_opened: u64,
    pub extra_bins: u64,
    pub seed: Option<u64>,
}

impl RunRecord {
    pub fn new(alg: &str, covering: Covering) -> Self {
        RunRecord {
            alg: alg.to_string(),
            params: BTreeMap::new(),
            profit: covering.profit,
            covering,
            groups_completed: 0,
            groups_opened: 0,
            extra_bins: 0,
            seed: None,
        }
    }

    pub fn param(&mut self, key: &str, value: String) {
        self.params.insert(key.to_string(), value);
    }
}

/// `DNF >= (Opt - 1)/2`, checked without division.
pub fn dnf_guarantee_holds(profit: u64, opt: u64) -> bool {
    2 * profit + 1 >= opt
}

/// Additive constant of Group Covering under perfect predictions: `m² + m`.
pub fn pc_additive(m_k_eps: u64) -> u64 {
    m_k_eps * m_k_eps + m_k_eps
}

/// Additive constant of Group Covering on the last `j` parts of an ℓ-splitting.
pub fn pc_split_additive(m_k_eps: u64, k: u64, j: u64) -> u64 {
    pc_additive(m_k_eps) + k * j
}

/// Additive constant of Hybrid's consistency and robustness guarantees:
/// `b_Alg + m² + m + kκ + (ℓ-1)(k + tau_S)`.
pub fn hybrid_additive(inner: InnerAlgorithm, m_k_eps: u64, k: u64, trust: TrustLevel, tau_s: u64) -> u64 {
    inner.additive() + pc_split_additive(m_k_eps, k, trust.kappa as u64) + (trust.ell as u64 - 1) * (k + tau_s)
}
