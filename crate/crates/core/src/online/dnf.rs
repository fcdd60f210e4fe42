//! Dual-Next-Fit: one open bin; close it as soon as it is covered.

use std::mem;

use crate::model::{Bin, Covering, Instance, Owner, SizeIdx, Units};
use crate::online::RunRecord;

/// Incremental DNF state. Closed bins are kept in closing order; the open bin (if it
/// holds anything) comes last.
#[derive(Clone, Debug)]
pub struct Dnf {
    owner: Owner,
    closed: Vec<Bin>,
    open: Bin,
}

impl Dnf {
    pub fn new(owner: Owner) -> Self {
        Dnf { owner, closed: Vec::new(), open: Bin::new(owner) }
    }

    #[inline]
    pub fn place(&mut self, size: SizeIdx, units: &Units) {
        self.open.push_item(size, units);
        if self.open.is_covered(units) {
            let full = mem::replace(&mut self.open, Bin::new(self.owner));
            self.closed.push(full);
        }
    }

    /// Bins holding at least one item.
    pub fn bins_used(&self) -> u64 {
        self.closed.len() as u64 + u64::from(self.open.has_items())
    }

    pub fn into_bins(mut self) -> Vec<Bin> {
        if self.open.has_items() {
            self.closed.push(self.open);
        }
        self.closed
    }
}

pub fn dnf_run(instance: &Instance) -> RunRecord {
    let units = instance.sizes().units();
    let mut dnf = Dnf::new(Owner::Dnf);
    for &a in instance.items() {
        dnf.place(a, units);
    }
    RunRecord::new("dnf", Covering::assemble(dnf.into_bins(), units))
}
