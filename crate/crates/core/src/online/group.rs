//! Group Covering `PC_eps`: tiles the input with copies ("groups") of an optimal
//! covering of the scaled prediction profile, filling placeholders as items arrive.

use std::collections::VecDeque;

use num_traits::{One, Signed};

use crate::bintypes::BinTypeCatalog;
use crate::error::{invalid, Result};
use crate::model::{
    ceil_u64, floor_u64, format_rational, int, Bin, CountVector, Covering, FrequencyVector, Instance, Owner,
    Rational, SizeIdx, Units,
};
use crate::online::dnf::Dnf;
use crate::online::RunRecord;
use crate::optcover::opt_layout;

/// Everything `PC_eps` derives from `(S, f̂, eps)` before the first item arrives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupCoveringParams {
    pub epsilon: Rational,
    /// `ceil(3 · tau_S · tau_S^m / eps)`.
    pub m_eps: u64,
    /// `m_eps + k`.
    pub m_k_eps: u64,
    /// `floor(f̂_i · m_k_eps)` items of each size.
    pub sigma_sub: CountVector,
    /// Slot order of every bin in one group: an optimal non-wasteful covering of
    /// `sigma_sub`, with the uncovered remainder in a final bin.
    pub layout: Vec<Vec<SizeIdx>>,
    pub prediction: FrequencyVector,
}

pub(crate) fn check_open_unit(name: &str, x: &Rational) -> Result<()> {
    if !x.is_positive() || *x >= Rational::one() {
        return Err(invalid(format!("{name} = {} must lie in (0, 1)", format_rational(x))));
    }
    Ok(())
}

/// `ceil(factor · tau_S · tau_S^m / eps)`.
pub(crate) fn m_of(catalog: &BinTypeCatalog, factor: u64, eps: &Rational) -> Result<u64> {
    let product = factor * catalog.tau_s() as u64 * catalog.tau_s_max() as u64;
    ceil_u64(&(int(product) / eps))
}

impl GroupCoveringParams {
    pub fn new(catalog: &BinTypeCatalog, prediction: &FrequencyVector, epsilon: &Rational) -> Result<Self> {
        check_open_unit("eps", epsilon)?;
        let k = catalog.sizes().k();
        if prediction.k() != k {
            return Err(invalid(format!("prediction has {} entries for {k} sizes", prediction.k())));
        }
        let m_eps = m_of(catalog, 3, epsilon)?;
        let m_k_eps = m_eps + k as u64;
        let sigma_sub = CountVector(
            prediction.entries().iter().map(|f| floor_u64(&(f * int(m_k_eps)))).collect::<Result<Vec<_>>>()?,
        );
        let layout = opt_layout(&sigma_sub, catalog)?;
        Ok(GroupCoveringParams {
            epsilon: epsilon.clone(),
            m_eps,
            m_k_eps,
            sigma_sub,
            layout,
            prediction: prediction.clone(),
        })
    }

    /// Covered bins in one completed group.
    pub fn group_profit(&self, units: &Units) -> u64 {
        self.layout.iter().filter(|b| b.iter().map(|&i| units.of(i)).sum::<u64>() >= units.one).count() as u64
    }
}

/// Bins produced by a Group Covering run, with its statistics.
#[derive(Clone, Debug)]
pub struct GroupOutcome {
    pub bins: Vec<Bin>,
    pub groups_completed: u64,
    pub groups_opened: u64,
    pub extra_bins: u64,
}

/// Incremental `PC_eps` state.
///
/// For each size, a FIFO holds the unfilled placeholder positions in (group, bin, slot)
/// order, so popping the front gives exactly the first placeholder a scan starting at
/// the first group would find.
#[derive(Clone, Debug)]
pub struct GroupCovering<'p> {
    params: &'p GroupCoveringParams,
    units: Units,
    bins: Vec<Bin>,
    free: Vec<VecDeque<(u32, u16)>>,
    remaining: Vec<u32>,
    completed: u64,
    extra: Dnf,
}

impl<'p> GroupCovering<'p> {
    /// Initializes the run and opens the first group.
    pub fn new(params: &'p GroupCoveringParams, units: &Units) -> Self {
        let mut pc = GroupCovering {
            params,
            units: units.clone(),
            bins: Vec::new(),
            free: vec![VecDeque::new(); params.sigma_sub.0.len()],
            remaining: Vec::new(),
            completed: 0,
            extra: Dnf::new(Owner::Extra),
        };
        pc.open_group();
        pc
    }

    fn open_group(&mut self) {
        let group = self.remaining.len() as u32;
        let mut placeholders = 0u32;
        for (b, layout) in self.params.layout.iter().enumerate() {
            let global = self.bins.len() as u32;
            self.bins.push(Bin::with_placeholders(Owner::Group { group, bin: b as u32 }, layout));
            for (slot, &size) in layout.iter().enumerate() {
                self.free[size as usize].push_back((global, slot as u16));
            }
            placeholders += layout.len() as u32;
        }
        self.remaining.push(placeholders);
    }

    #[inline]
    pub fn place(&mut self, size: SizeIdx) {
        let a = size as usize;
        if self.free[a].is_empty() {
            if self.params.sigma_sub.0[a] == 0 {
                self.extra.place(size, &self.units);
                return;
            }
            self.open_group();
        }
        let (bin, slot) = self.free[a].pop_front().expect("a fresh group holds a placeholder of this size");
        let bin = &mut self.bins[bin as usize];
        bin.fill(slot as usize, &self.units);
        if let Owner::Group { group, .. } = bin.owner {
            let left = &mut self.remaining[group as usize];
            *left -= 1;
            if *left == 0 {
                self.completed += 1;
            }
        }
    }

    pub fn groups_completed(&self) -> u64 {
        self.completed
    }

    pub fn finish(self) -> GroupOutcome {
        let extra_bins = self.extra.bins_used();
        let mut bins = self.bins;
        bins.extend(self.extra.into_bins());
        GroupOutcome {
            bins,
            groups_completed: self.completed,
            groups_opened: self.remaining.len() as u64,
            extra_bins,
        }
    }
}

pub fn pc_run(
    instance: &Instance,
    catalog: &BinTypeCatalog,
    prediction: &FrequencyVector,
    epsilon: &Rational,
) -> Result<RunRecord> {
    let params = GroupCoveringParams::new(catalog, prediction, epsilon)?;
    Ok(pc_run_with(instance, &params))
}

pub fn pc_run_with(instance: &Instance, params: &GroupCoveringParams) -> RunRecord {
    let units = instance.sizes().units();
    let mut pc = GroupCovering::new(params, units);
    for &a in instance.items() {
        pc.place(a);
    }
    let out = pc.finish();
    let mut record = RunRecord::new("pc", Covering::assemble(out.bins, units));
    record.groups_completed = out.groups_completed;
    record.groups_opened = out.groups_opened;
    record.extra_bins = out.extra_bins;
    record.param("eps", format_rational(&params.epsilon));
    record
}

/// `g_eps` of a Group Covering (or Hybrid/POPC) run.
pub fn num_completed_groups(record: &RunRecord) -> u64 {
    record.groups_completed
}
