//! Exact offline optimum for bin covering.
//!
//! The search runs over residual count vectors. Each step removes one *minimal*
//! covered multiset (one where dropping any item uncovers the bin); every covered bin
//! of an optimal covering contains such a multiset, so this is exact. States are
//! memoized, and a child is skipped when `1 + floor(residual size)` cannot beat the
//! best value found so far.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::bintypes::{non_wasteful_ordering, BinTypeCatalog};
use crate::error::{invalid, Error, Result};
use crate::generators::Family;
use crate::model::{Bin, CountVector, Covering, Owner, SizeIdx, SizeSet, Units};

/// Default cap on memoized states.
pub const DEFAULT_NODE_BUDGET: usize = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptResult {
    pub profit: u64,
    /// Covered multisets used (largest size first) with their multiplicities, in
    /// canonical order.
    pub type_counts: Vec<(Vec<SizeIdx>, u64)>,
    /// Items left outside the covered bins.
    pub leftovers: CountVector,
}

impl OptResult {
    pub fn to_json(&self, sizes: &SizeSet) -> OptJson {
        OptJson {
            profit: self.profit,
            type_counts: self
                .type_counts
                .iter()
                .map(|(m, c)| TypeCountJson { items: m.iter().map(|&i| sizes.size(i).to_string()).collect(), count: *c })
                .collect(),
            leftovers: self.leftovers.0.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OptJson {
    pub profit: u64,
    pub type_counts: Vec<TypeCountJson>,
    pub leftovers: Vec<u64>,
}

#[derive(Debug, Serialize)]
pub struct TypeCountJson {
    pub items: Vec<String>,
    pub count: u64,
}

/// `floor(Σ counts_i · s_i)`.
pub fn opt_upper_bound(counts: &CountVector, sizes: &SizeSet) -> u64 {
    (counts.total_units(sizes.units()) / sizes.units().one as u128) as u64
}

pub fn opt_cover(counts: &CountVector, catalog: &BinTypeCatalog) -> Result<OptResult> {
    opt_cover_with_budget(counts, catalog, DEFAULT_NODE_BUDGET)
}

pub fn opt_cover_with_budget(counts: &CountVector, catalog: &BinTypeCatalog, budget: usize) -> Result<OptResult> {
    let sizes = catalog.sizes();
    if counts.0.len() != sizes.k() {
        return Err(invalid(format!("count vector has length {}, expected {}", counts.0.len(), sizes.k())));
    }
    let root = counts
        .0
        .iter()
        .map(|&c| u32::try_from(c).map_err(|_| Error::BudgetExceeded { budget }))
        .collect::<Result<Vec<u32>>>()?;
    let mut search = Search::new(catalog, budget);
    let profit = search.value(&root)?;

    // Replay the optimum: at each state either some move on the largest item keeps the
    // value, or that item is left over.
    let mut used: BTreeMap<usize, u64> = BTreeMap::new();
    let mut state = root;
    let mut leftovers = vec![0u32; state.len()];
    let mut remaining = profit;
    while remaining > 0 {
        let top = top_index(&state).expect("a positive value needs items");
        let mut chosen = None;
        for j in 0..search.by_top[top].len() {
            let mi = search.by_top[top][j];
            if let Some(child) = sub(&state, &search.moves[mi]) {
                if search.value(&child)? + 1 == remaining {
                    chosen = Some((mi, child));
                    break;
                }
            }
        }
        match chosen {
            Some((mi, child)) => {
                *used.entry(mi).or_default() += 1;
                state = child;
                remaining -= 1;
            }
            None => {
                state[top] -= 1;
                leftovers[top] += 1;
            }
        }
    }
    for (l, s) in leftovers.iter_mut().zip(&state) {
        *l += s;
    }

    let type_counts = used.into_iter().map(|(mi, c)| (search.multisets[mi].clone(), c)).collect();
    Ok(OptResult {
        profit: profit as u64,
        type_counts,
        leftovers: CountVector(leftovers.into_iter().map(u64::from).collect()),
    })
}

/// An optimal covering whose bins follow non-wasteful types. Leftover items (whose
/// total is below 1 by optimality) share one extra bin.
pub fn opt_solution_non_wasteful(counts: &CountVector, catalog: &BinTypeCatalog) -> Result<Covering> {
    let sizes = catalog.sizes();
    let layout = opt_layout(counts, catalog)?;
    let bins = layout.iter().map(|items| Bin::from_items(Owner::Opt, items, sizes.units())).collect();
    Ok(Covering::assemble(bins, sizes.units()))
}

/// Slot orders of the bins of [`opt_solution_non_wasteful`].
pub fn opt_layout(counts: &CountVector, catalog: &BinTypeCatalog) -> Result<Vec<Vec<SizeIdx>>> {
    let sizes = catalog.sizes();
    let result = opt_cover(counts, catalog)?;
    let mut layout = Vec::new();
    for (multiset, count) in &result.type_counts {
        let ordered = non_wasteful_ordering(multiset, sizes)?;
        for _ in 0..*count {
            layout.push(ordered.items().to_vec());
        }
    }
    let leftovers: Vec<SizeIdx> = result
        .leftovers
        .0
        .iter()
        .enumerate()
        .flat_map(|(i, &c)| std::iter::repeat_n(i as SizeIdx, c as usize))
        .collect();
    if !leftovers.is_empty() {
        debug_assert!(leftovers.iter().map(|&i| sizes.units().of(i)).sum::<u64>() < sizes.units().one);
        layout.push(leftovers);
    }
    Ok(layout)
}

fn sub(state: &[u32], mv: &[u32]) -> Option<Vec<u32>> {
    state.iter().zip(mv).map(|(&s, &m)| s.checked_sub(m)).collect()
}

fn top_index(state: &[u32]) -> Option<usize> {
    state.iter().rposition(|&c| c > 0)
}

/// Memoized search over residual count vectors.
///
/// Every state branches on one copy of its largest remaining size: either that item
/// stays uncovered, or it goes into a minimal covered multiset whose largest element it
/// is. This is exact because any covered bin containing the item can be shrunk, keeping
/// the item, until removing anything uncovers it, and since the item is the largest, the
/// result is a minimal covered multiset. Fixing which item is decided next removes the
/// order symmetry between bins.
struct Search<'a> {
    units: &'a Units,
    moves: Vec<Vec<u32>>,
    multisets: Vec<Vec<SizeIdx>>,
    /// Moves whose largest size is the index, least waste first.
    by_top: Vec<Vec<usize>>,
    memo: HashMap<Vec<u32>, u32>,
    budget: usize,
}

struct Frame {
    state: Vec<u32>,
    top: usize,
    /// Next option: indices into `by_top[top]`, then one more for leaving the item out.
    next: usize,
    /// Gain of the child currently being evaluated.
    gain: u32,
    best: u32,
    bound: u32,
}

impl<'a> Search<'a> {
    fn new(catalog: &'a BinTypeCatalog, budget: usize) -> Self {
        let k = catalog.sizes().k();
        let units = catalog.sizes().units();
        let multisets = catalog.minimal_covered_multisets();
        let moves: Vec<Vec<u32>> = multisets
            .iter()
            .map(|m| {
                let mut v = vec![0u32; k];
                for &i in m {
                    v[i as usize] += 1;
                }
                v
            })
            .collect();
        let mut by_top = vec![Vec::new(); k];
        for (mi, m) in multisets.iter().enumerate() {
            // Multisets list their largest size first.
            by_top[m[0] as usize].push(mi);
        }
        let total = |mi: usize| multisets[mi].iter().map(|&i| units.of(i)).sum::<u64>();
        for list in &mut by_top {
            list.sort_by_key(|&mi| total(mi));
        }
        Search { units, moves, multisets, by_top, memo: HashMap::new(), budget }
    }

    fn bound(&self, state: &[u32]) -> u32 {
        let total: u128 = state.iter().zip(&self.units.units).map(|(&c, &u)| c as u128 * u as u128).sum();
        (total / self.units.one as u128) as u32
    }

    fn frame(&self, state: Vec<u32>) -> Frame {
        let bound = self.bound(&state);
        let top = top_index(&state).unwrap_or(0);
        Frame { state, top, next: 0, gain: 0, best: 0, bound }
    }

    /// Exact optimum for `root`, iterative so deep searches cannot overflow the stack.
    fn value(&mut self, root: &[u32]) -> Result<u32> {
        if let Some(&v) = self.memo.get(root) {
            return Ok(v);
        }
        let mut stack = vec![self.frame(root.to_vec())];
        loop {
            let top = stack.last_mut().unwrap();
            let options = if top.bound == 0 { 0 } else { self.by_top[top.top].len() + 1 };
            if top.best >= top.bound || top.next == options {
                let done = stack.pop().unwrap();
                self.memo.insert(done.state, done.best);
                match stack.last_mut() {
                    Some(parent) => parent.best = parent.best.max(done.best + parent.gain),
                    None => return Ok(done.best),
                }
                continue;
            }
            let option = top.next;
            top.next += 1;
            let (child, gain) = if option < options - 1 {
                match sub(&top.state, &self.moves[self.by_top[top.top][option]]) {
                    Some(child) => (child, 1),
                    None => continue,
                }
            } else {
                let mut child = top.state.clone();
                child[top.top] -= 1;
                (child, 0)
            };
            if let Some(&v) = self.memo.get(&child) {
                top.best = top.best.max(v + gain);
                continue;
            }
            let best = top.best;
            let child = self.frame(child);
            if child.bound + gain <= best {
                continue;
            }
            if self.memo.len() + stack.len() >= self.budget {
                return Err(Error::BudgetExceeded { budget: self.budget });
            }
            stack.last_mut().unwrap().gain = gain;
            stack.push(child);
        }
    }
}

/// Closed-form optimum of a generator family.
pub fn analytic_opt(family: Family, k: u32, n: u64, i: Option<u32>) -> Result<u64> {
    match family {
        Family::Tradeoff1 => Ok(n),
        Family::Tradeoff2 => Ok(n / 2),
        Family::Impossibility => {
            let i = i.ok_or_else(|| invalid("impossibility family needs i"))?;
            if i == 0 || i >= k {
                return Err(invalid(format!("i = {i} must lie in [1, k-1]")));
            }
            Ok(n / i as u64)
        }
        Family::AntiRobust => {
            if k == 0 {
                return Err(invalid("k must be positive"));
            }
            Ok(n / k as u64)
        }
        Family::Stochastic => Err(invalid("no closed-form optimum for stochastic instances")),
    }
}

/// Closed-form optimum for size sets with a known structure: one size, `{s, 1}`, and
/// `{1/k, (k-1)/k}` for `k >= 3`. Returns `None` for any other set.
pub fn closed_form_opt(sizes: &SizeSet, counts: &CountVector) -> Option<u64> {
    let u = sizes.units();
    let one = u.one;
    // Items needed to cover a bin with copies of a single size.
    let per_bin = |x: u64| one.div_ceil(x);
    match sizes.k() {
        1 => Some(counts.0[0] / per_bin(u.units[0])),
        2 => {
            let (small, large) = (u.units[0], u.units[1]);
            let (a, b) = (counts.0[0], counts.0[1]);
            if large == one {
                // A unit item covers a bin alone; mixing it with others only wastes.
                Some(b + a / per_bin(small))
            } else if small + large == one && 2 * large >= one && one.is_multiple_of(small) && small * 3 <= one {
                // {1/k, (k-1)/k}: p mixed bins, pairs of large items, runs of k small ones.
                let k = one / small;
                let m = a.min(b);
                let f = |p: u64| p + (b - p) / 2 + (a - p) / k;
                // f(p + 2k) - f(p) = k - 2 > 0, so the maximum lies in the last 2k values.
                (m.saturating_sub(2 * k)..=m).map(f).max()
            } else {
                None
            }
        }
        _ => None,
    }
}
