//! Non-wasteful bin types.
//!
//! A bin type is an ordered tuple of sizes whose every proper prefix sums below 1.
//! The catalog `T_S` of a size set is finite; `tau_s` is its cardinality and
//! `tau_s_max` the longest tuple.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{format_rational, SizeIdx, SizeSet, Units};

/// Default upper bound on the number of enumerated types.
pub const DEFAULT_TYPE_CAP: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinType {
    items: Vec<SizeIdx>,
    total: u64,
    covered: bool,
}

impl BinType {
    /// Validates the prefix rule for an explicit tuple.
    pub fn new(items: Vec<SizeIdx>, sizes: &SizeSet) -> Result<Self> {
        if items.is_empty() || items.iter().any(|&i| i as usize >= sizes.k()) {
            return Err(Error::InvalidArgument("bin type needs at least one valid size index".into()));
        }
        if !is_non_wasteful(&items, sizes.units()) {
            return Err(Error::NoOrdering);
        }
        Ok(Self::unchecked(items, sizes.units()))
    }

    fn unchecked(items: Vec<SizeIdx>, units: &Units) -> Self {
        let total = items.iter().map(|&i| units.of(i)).sum::<u64>();
        BinType { items, total, covered: total >= units.one }
    }

    pub fn items(&self) -> &[SizeIdx] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn total_units(&self) -> u64 {
        self.total
    }

    pub fn is_covered(&self) -> bool {
        self.covered
    }

    /// Sorted copy of the tuple; equal for two types iff they hold the same items.
    pub fn canonical_multiset(&self) -> Vec<SizeIdx> {
        canonical_multiset(&self.items)
    }
}

pub fn canonical_multiset(items: &[SizeIdx]) -> Vec<SizeIdx> {
    let mut m = items.to_vec();
    m.sort_unstable();
    m
}

/// Prefix rule: the sum of all but the last item is below 1.
pub fn is_non_wasteful(items: &[SizeIdx], units: &Units) -> bool {
    match items.split_last() {
        None => true,
        Some((_, rest)) => rest.iter().map(|&i| units.of(i)).sum::<u64>() < units.one,
    }
}

/// Orders a multiset so that it forms a non-wasteful type: the remaining items in
/// descending order followed by one copy of the largest item.
///
/// Putting the largest item last minimizes the sum of the others, so if this
/// ordering fails every ordering fails.
pub fn non_wasteful_ordering(multiset: &[SizeIdx], sizes: &SizeSet) -> Result<BinType> {
    if multiset.is_empty() {
        return Err(Error::InvalidArgument("empty multiset".into()));
    }
    let mut items = multiset.to_vec();
    items.sort_unstable_by(|a, b| b.cmp(a));
    let largest = items.remove(0);
    items.push(largest);
    BinType::new(items, sizes)
}

#[derive(Clone, Debug)]
pub struct BinTypeCatalog {
    sizes: SizeSet,
    types: Vec<BinType>,
    tau_s_max: usize,
    covered: Vec<usize>,
    multiset_index: BTreeMap<Vec<SizeIdx>, Vec<usize>>,
}

/// Depth-first expansion from the empty prefix; children are visited in ascending size
/// order, so the catalog order is stable.
pub fn enumerate_bin_types(sizes: &SizeSet, cap: usize) -> Result<BinTypeCatalog> {
    let units = sizes.units();
    let k = sizes.k() as SizeIdx;
    let mut types = Vec::new();
    // (prefix, sum) nodes; children pushed in reverse so ascending pops first.
    let mut stack: Vec<(Vec<SizeIdx>, u64)> = (0..k).rev().map(|i| (vec![i], units.of(i))).collect();
    while let Some((prefix, sum)) = stack.pop() {
        if types.len() == cap {
            return Err(Error::CatalogOverflow { partial: types.len(), cap });
        }
        if sum < units.one {
            for i in (0..k).rev() {
                let mut child = prefix.clone();
                child.push(i);
                stack.push((child, sum + units.of(i)));
            }
        }
        types.push(BinType { covered: sum >= units.one, total: sum, items: prefix });
    }

    let tau_s_max = types.iter().map(BinType::len).max().unwrap_or(0);
    let covered = types.iter().enumerate().filter(|(_, t)| t.covered).map(|(i, _)| i).collect();
    let mut multiset_index: BTreeMap<Vec<SizeIdx>, Vec<usize>> = BTreeMap::new();
    for (i, t) in types.iter().enumerate() {
        multiset_index.entry(t.canonical_multiset()).or_default().push(i);
    }
    Ok(BinTypeCatalog { sizes: sizes.clone(), types, tau_s_max, covered, multiset_index })
}

impl BinTypeCatalog {
    pub fn new(sizes: &SizeSet) -> Result<Self> {
        enumerate_bin_types(sizes, DEFAULT_TYPE_CAP)
    }

    pub fn sizes(&self) -> &SizeSet {
        &self.sizes
    }

    pub fn types(&self) -> &[BinType] {
        &self.types
    }

    /// `|T_S|`.
    pub fn tau_s(&self) -> usize {
        self.types.len()
    }

    /// Longest type.
    pub fn tau_s_max(&self) -> usize {
        self.tau_s_max
    }

    pub fn covered_types(&self) -> impl Iterator<Item = &BinType> {
        self.covered.iter().map(|&i| &self.types[i])
    }

    pub fn orderings_of(&self, multiset: &[SizeIdx]) -> &[usize] {
        self.multiset_index.get(multiset).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn contains(&self, tuple: &[SizeIdx]) -> bool {
        self.orderings_of(&canonical_multiset(tuple)).iter().any(|&i| self.types[i].items == tuple)
    }

    /// Covered multisets from which no item can be removed without uncovering them.
    /// Each is listed largest size first; the list is in descending lexicographic order.
    pub fn minimal_covered_multisets(&self) -> Vec<Vec<SizeIdx>> {
        let units = self.sizes.units();
        let mut out: Vec<Vec<SizeIdx>> = self
            .multiset_index
            .keys()
            .filter(|m| {
                let total: u64 = m.iter().map(|&i| units.of(i)).sum();
                // Sorted ascending, so m[0] is the smallest item.
                total >= units.one && total - units.of(m[0]) < units.one
            })
            .map(|m| m.iter().rev().copied().collect::<Vec<_>>())
            .collect();
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }

    pub fn to_json(&self) -> CatalogJson {
        let sizes = &self.sizes;
        CatalogJson {
            sizes: sizes.to_strings(),
            tau_s: self.tau_s(),
            tau_s_max: self.tau_s_max,
            covered_count: self.covered.len(),
            types: self
                .types
                .iter()
                .map(|t| TypeJson {
                    items: t.items.iter().map(|&i| sizes.size(i).to_string()).collect(),
                    total: format_rational(&sizes.level_value(t.total)),
                    covered: t.covered,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CatalogJson {
    pub sizes: Vec<String>,
    pub tau_s: usize,
    pub tau_s_max: usize,
    pub covered_count: usize,
    pub types: Vec<TypeJson>,
}

#[derive(Debug, Serialize)]
pub struct TypeJson {
    pub items: Vec<String>,
    pub total: String,
    pub covered: bool,
}
