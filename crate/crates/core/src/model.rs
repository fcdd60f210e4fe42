//! Exact domain types: sizes, size sets, instances, frequency vectors, bins and coverings.
//!
//! Sizes are arbitrary-precision rationals. Every [`SizeSet`] also carries an integer
//! scale (the lcm of its denominators) so that bin levels can be tracked as plain
//! integers without losing exactness.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{invalid, Error, Result};

pub type Rational = num_rational::BigRational;

/// Index of a size inside its [`SizeSet`].
pub type SizeIdx = u16;

/// Parses `"p/q"`, an integer, or a finite decimal such as `"0.6"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int = if int.is_empty() || int == "-" { BigInt::zero() } else { BigInt::from_str(int).map_err(|_| bad())? };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac = BigInt::from_str(frac).map_err(|_| bad())?;
        let magnitude = int.abs() * &scale + frac;
        let numer = if negative { -magnitude } else { magnitude };
        return Ok(Rational::new(numer, scale));
    }
    Ok(Rational::from_integer(BigInt::from_str(s).map_err(|_| bad())?))
}

/// Canonical `"p/q"` rendering (`"p"` when the denominator is 1).
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal rendering rounded half-up to `digits` places, computed exactly.
pub fn format_decimal(r: &Rational, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = r * Rational::from_integer(scale.clone());
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let rounded = if scaled.is_negative() { -((-scaled) + half).floor() } else { (scaled + half).floor() };
    let n = rounded.to_integer();
    let negative = n.is_negative();
    let (q, rem) = n.abs().div_rem(&scale);
    let sign = if negative { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{q}")
    } else {
        format!("{sign}{q}.{:0>width$}", rem.to_string(), width = digits as usize)
    }
}

/// Lossy conversion used only for reporting and for the logarithms in sample-size formulas.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `a / b` as an exact rational; `b` must be nonzero.
pub fn ratio(a: u64, b: u64) -> Rational {
    Rational::new(BigInt::from(a), BigInt::from(b))
}

pub fn int(a: u64) -> Rational {
    Rational::from_integer(BigInt::from(a))
}

/// Largest integer `<= r` for nonnegative `r`.
pub(crate) fn floor_u64(r: &Rational) -> Result<u64> {
    r.floor().to_integer().to_u64().ok_or_else(|| invalid(format!("value {} out of range", format_rational(r))))
}

pub(crate) fn ceil_u64(r: &Rational) -> Result<u64> {
    r.ceil().to_integer().to_u64().ok_or_else(|| invalid(format!("value {} out of range", format_rational(r))))
}

/// An item size: an exact rational in `(0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Size(Rational);

impl Size {
    pub fn new(value: Rational) -> Result<Self> {
        if !value.is_positive() || value > Rational::one() {
            return Err(invalid(format!("size {} is not in (0, 1]", format_rational(&value))));
        }
        Ok(Size(value))
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }
}

impl FromStr for Size {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Size::new(parse_rational(s)?)
    }
}

impl fmt::Display for Size {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

/// Integer level scale shared by a size set: size `i` is `units[i] / one`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Units {
    pub units: Vec<u64>,
    pub one: u64,
}

impl Units {
    #[inline]
    pub fn of(&self, idx: SizeIdx) -> u64 {
        self.units[idx as usize]
    }
}

/// The finite set `S` of admissible item sizes, strictly ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SizeSet {
    sizes: Vec<Size>,
    units: Units,
}

impl SizeSet {
    /// Builds a size set from strictly ascending sizes.
    pub fn new(sizes: Vec<Size>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(invalid("size set must contain at least one size"));
        }
        if sizes.len() > SizeIdx::MAX as usize {
            return Err(invalid("too many sizes"));
        }
        if sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("sizes must be distinct and ascending"));
        }
        let mut lcm = BigInt::one();
        for s in &sizes {
            lcm = lcm.lcm(s.value().denom());
        }
        // Non-wasteful levels stay below 2, so twice the scale must fit.
        let one = lcm.to_u64().filter(|v| v.checked_mul(4).is_some()).ok_or(Error::ScaleOverflow)?;
        let units = sizes
            .iter()
            .map(|s| (s.value() * Rational::from_integer(lcm.clone())).to_integer().to_u64().unwrap())
            .collect();
        Ok(SizeSet { sizes, units: Units { units, one } })
    }

    /// Sorts the sizes first; duplicates are still rejected.
    pub fn from_unsorted(mut sizes: Vec<Size>) -> Result<Self> {
        sizes.sort();
        Self::new(sizes)
    }

    pub fn parse_list(list: &str) -> Result<Self> {
        let sizes = list.split(',').map(str::parse).collect::<Result<Vec<Size>>>()?;
        Self::new(sizes)
    }

    /// `F_k = {1/k, 2/k, ..., k/k}`.
    pub fn fk(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(invalid("k must be at least 1"));
        }
        let sizes = (1..=k).map(|i| Size::new(ratio(i as u64, k as u64))).collect::<Result<Vec<_>>>()?;
        Self::new(sizes)
    }

    /// `{1/k, (k-1)/k}`, the two sizes used by the tradeoff and anti-robust families.
    /// For `k = 2` both coincide and the set is `{1/2}`.
    pub fn tradeoff(k: u32) -> Result<Self> {
        if k < 2 {
            return Err(invalid("k must be at least 2"));
        }
        let mut sizes = vec![Size::new(ratio(1, k as u64))?, Size::new(ratio(k as u64 - 1, k as u64))?];
        sizes.dedup();
        Self::new(sizes)
    }

    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[Size] {
        &self.sizes
    }

    pub fn size(&self, idx: SizeIdx) -> &Size {
        &self.sizes[idx as usize]
    }

    pub fn units(&self) -> &Units {
        &self.units
    }

    pub fn index_of(&self, value: &Rational) -> Option<SizeIdx> {
        self.sizes.binary_search_by(|s| s.value().cmp(value)).ok().map(|i| i as SizeIdx)
    }

    pub fn min_size(&self) -> &Size {
        &self.sizes[0]
    }

    /// Converts an integer level back to an exact rational.
    pub fn level_value(&self, level: u64) -> Rational {
        ratio(level, self.units.one)
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.sizes.iter().map(|s| s.to_string()).collect()
    }
}

impl fmt::Display for SizeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.to_strings().join(","))
    }
}

/// Item counts per size, `(n_1, ..., n_k)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CountVector(pub Vec<u64>);

impl CountVector {
    pub fn zeros(k: usize) -> Self {
        CountVector(vec![0; k])
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// `Σ n_i s_i` in integer units.
    pub fn total_units(&self, units: &Units) -> u128 {
        self.0.iter().zip(&units.units).map(|(&c, &u)| c as u128 * u as u128).sum()
    }

    pub fn add(&self, other: &CountVector) -> CountVector {
        CountVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn parse_list(list: &str) -> Result<Self> {
        list.split(',')
            .map(|c| c.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad count {c:?}"))))
            .collect::<Result<Vec<_>>>()
            .map(CountVector)
    }
}

/// A predicted or observed frequency vector: `k` exact entries in `[0, 1]` summing to 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FrequencyVector {
    entries: Vec<Rational>,
}

impl FrequencyVector {
    pub fn new(entries: Vec<Rational>) -> Result<Self> {
        if entries.is_empty() {
            return Err(invalid("frequency vector must not be empty"));
        }
        if entries.iter().any(|e| e.is_negative() || *e > Rational::one()) {
            return Err(invalid("frequencies must lie in [0, 1]"));
        }
        let sum: Rational = entries.iter().sum();
        if !sum.is_one() {
            return Err(invalid(format!("frequencies sum to {}, not 1", format_rational(&sum))));
        }
        Ok(FrequencyVector { entries })
    }

    /// Rescales nonnegative weights to sum to 1.
    pub fn normalized(weights: Vec<Rational>) -> Result<Self> {
        if weights.iter().any(Signed::is_negative) {
            return Err(invalid("weights must be nonnegative"));
        }
        let sum: Rational = weights.iter().sum();
        if sum.is_zero() {
            return Err(invalid("weights sum to zero"));
        }
        Self::new(weights.into_iter().map(|w| w / &sum).collect())
    }

    /// Parses `p1,...,pk`; with `normalize` the weights are rescaled instead of rejected.
    pub fn parse_list(list: &str, normalize: bool) -> Result<Self> {
        let entries = list.split(',').map(parse_rational).collect::<Result<Vec<_>>>()?;
        if normalize {
            Self::normalized(entries)
        } else {
            Self::new(entries)
        }
    }

    pub fn from_counts(counts: &CountVector) -> Result<Self> {
        let n = counts.total();
        if n == 0 {
            return Err(Error::EmptyInstance);
        }
        Self::new(counts.0.iter().map(|&c| ratio(c, n)).collect())
    }

    /// Point mass on one index.
    pub fn point(k: usize, idx: usize) -> Result<Self> {
        if idx >= k {
            return Err(invalid("point mass index out of range"));
        }
        Self::new((0..k).map(|i| if i == idx { Rational::one() } else { Rational::zero() }).collect())
    }

    pub fn uniform(k: usize) -> Result<Self> {
        Self::new(vec![ratio(1, k as u64); k])
    }

    pub fn k(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn get(&self, idx: SizeIdx) -> &Rational {
        &self.entries[idx as usize]
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.entries.iter().map(format_rational).collect()
    }
}

impl fmt::Display for FrequencyVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_strings().join(","))
    }
}

/// `Σ |a_i - b_i|`.
pub fn l1_distance(a: &FrequencyVector, b: &FrequencyVector) -> Result<Rational> {
    if a.k() != b.k() {
        return Err(invalid(format!("length mismatch: {} vs {}", a.k(), b.k())));
    }
    Ok(a.entries.iter().zip(&b.entries).map(|(x, y)| (x - y).abs()).sum())
}

/// An ordered input sequence over a size set, stored as size indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    sizes: SizeSet,
    items: Vec<SizeIdx>,
}

impl Instance {
    pub fn new(sizes: SizeSet, items: Vec<SizeIdx>) -> Result<Self> {
        let k = sizes.k();
        if let Some(bad) = items.iter().find(|&&i| i as usize >= k) {
            return Err(invalid(format!("item index {bad} out of range for k = {k}")));
        }
        Ok(Instance { sizes, items })
    }

    pub fn empty(sizes: SizeSet) -> Self {
        Instance { sizes, items: Vec::new() }
    }

    /// Concatenates runs of `(size index, count)`.
    pub fn from_runs(sizes: SizeSet, runs: &[(SizeIdx, u64)]) -> Result<Self> {
        let mut items = Vec::with_capacity(runs.iter().map(|r| r.1 as usize).sum());
        for &(idx, count) in runs {
            items.extend(std::iter::repeat_n(idx, count as usize));
        }
        Self::new(sizes, items)
    }

    pub fn sizes(&self) -> &SizeSet {
        &self.sizes
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

    pub fn counts(&self) -> CountVector {
        let mut counts = vec![0u64; self.sizes.k()];
        for &i in &self.items {
            counts[i as usize] += 1;
        }
        CountVector(counts)
    }

    /// Exact frequencies `n_i / n`.
    pub fn frequencies(&self) -> Result<FrequencyVector> {
        FrequencyVector::from_counts(&self.counts())
    }

    pub fn prefix(&self, len: usize) -> Instance {
        Instance { sizes: self.sizes.clone(), items: self.items[..len.min(self.items.len())].to_vec() }
    }

    pub fn with_items(&self, items: Vec<SizeIdx>) -> Instance {
        Instance { sizes: self.sizes.clone(), items }
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            sizes: self.sizes.to_strings(),
            items: self.items.clone(),
            known_opt: None,
            prediction: None,
        }
    }
}

/// JSON instance format: `{"sizes": ["1/3","2/3"], "items": [0,1,0]}`.
///
/// Generated files may also carry the closed-form optimum and the family prediction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InstanceFile {
    pub sizes: Vec<String>,
    pub items: Vec<SizeIdx>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub known_opt: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prediction: Option<Vec<String>>,
}

impl InstanceFile {
    pub fn to_instance(&self) -> Result<Instance> {
        let sizes = self.sizes.iter().map(|s| s.parse()).collect::<Result<Vec<Size>>>()?;
        Instance::new(SizeSet::new(sizes)?, self.items.clone())
    }

    pub fn prediction(&self) -> Result<Option<FrequencyVector>> {
        self.prediction
            .as_ref()
            .map(|p| FrequencyVector::new(p.iter().map(|e| parse_rational(e)).collect::<Result<Vec<_>>>()?))
            .transpose()
    }
}

/// Which algorithm component a bin belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Owner {
    Dnf,
    Group { group: u32, bin: u32 },
    Extra,
    Alg,
    Opt,
}

/// A bin slot. `order == 0` marks an unfilled placeholder; otherwise it is the
/// 1-based position of this slot in the bin's fill sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Slot {
    pub size: SizeIdx,
    pub order: u16,
}

impl Slot {
    pub fn is_filled(&self) -> bool {
        self.order != 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Bin {
    pub owner: Owner,
    pub slots: SmallVec<[Slot; 4]>,
    #[serde(skip)]
    level: u64,
    #[serde(skip)]
    filled: u16,
}

impl Bin {
    pub fn new(owner: Owner) -> Self {
        Bin { owner, slots: SmallVec::new(), level: 0, filled: 0 }
    }

    /// A bin of unfilled placeholders in the given layout order.
    pub fn with_placeholders(owner: Owner, layout: &[SizeIdx]) -> Self {
        Bin {
            owner,
            slots: layout.iter().map(|&size| Slot { size, order: 0 }).collect(),
            level: 0,
            filled: 0,
        }
    }

    /// Builds a bin whose items were placed in the given order.
    pub fn from_items(owner: Owner, items: &[SizeIdx], units: &Units) -> Self {
        let mut bin = Bin::new(owner);
        for &i in items {
            bin.push_item(i, units);
        }
        bin
    }

    /// Appends a real item.
    #[inline]
    pub fn push_item(&mut self, size: SizeIdx, units: &Units) {
        self.filled += 1;
        self.slots.push(Slot { size, order: self.filled });
        self.level += units.of(size);
    }

    /// Replaces the placeholder at `pos` with a real item.
    #[inline]
    pub fn fill(&mut self, pos: usize, units: &Units) {
        let slot = &mut self.slots[pos];
        debug_assert!(!slot.is_filled());
        self.filled += 1;
        slot.order = self.filled;
        self.level += units.of(slot.size);
    }

    /// Level in integer units of the size set.
    #[inline]
    pub fn level_units(&self) -> u64 {
        self.level
    }

    pub fn level(&self, sizes: &SizeSet) -> Rational {
        sizes.level_value(self.level)
    }

    #[inline]
    pub fn is_covered(&self, units: &Units) -> bool {
        self.level >= units.one
    }

    pub fn has_items(&self) -> bool {
        self.filled > 0
    }

    pub fn filled_count(&self) -> usize {
        self.filled as usize
    }

    /// Real items in fill order.
    pub fn items_in_fill_order(&self) -> Vec<SizeIdx> {
        let mut filled: Vec<&Slot> = self.slots.iter().filter(|s| s.is_filled()).collect();
        filled.sort_by_key(|s| s.order);
        filled.into_iter().map(|s| s.size).collect()
    }

    /// Replays the fill sequence: no item may be added once the level has reached 1,
    /// and the cached level must equal the recomputed one.
    pub fn check_non_wasteful(&self, units: &Units) -> bool {
        let mut level = 0u64;
        for size in self.items_in_fill_order() {
            if level >= units.one {
                return false;
            }
            level += units.of(size);
        }
        level == self.level
    }
}

/// A complete assignment of items to bins.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Covering {
    pub bins: Vec<Bin>,
    pub profit: u64,
}

impl Covering {
    /// Assembles a covering, dropping bins that hold no real item.
    pub fn assemble(bins: Vec<Bin>, units: &Units) -> Self {
        let bins: Vec<Bin> = bins.into_iter().filter(Bin::has_items).collect();
        let profit = bins.iter().filter(|b| b.is_covered(units)).count() as u64;
        Covering { bins, profit }
    }

    pub fn empty() -> Self {
        Covering { bins: Vec::new(), profit: 0 }
    }

    /// Multiset of real items over all bins.
    pub fn item_counts(&self, k: usize) -> CountVector {
        let mut counts = vec![0u64; k];
        for bin in &self.bins {
            for s in bin.slots.iter().filter(|s| s.is_filled()) {
                counts[s.size as usize] += 1;
            }
        }
        CountVector(counts)
    }

    /// Checks conservation against `instance`, the stored profit and non-wastefulness
    /// of every bin.
    pub fn verify(&self, instance: &Instance) -> Result<(), String> {
        let units = instance.sizes().units();
        if self.item_counts(instance.sizes().k()) != instance.counts() {
            return Err("item multiset differs from the instance".into());
        }
        if profit(self, units) != self.profit {
            return Err("stored profit differs from recomputed profit".into());
        }
        if let Some(pos) = self.bins.iter().position(|b| !b.check_non_wasteful(units)) {
            return Err(format!("bin {pos} is wasteful"));
        }
        Ok(())
    }
}

/// Number of bins with level `>= 1`; placeholders contribute nothing.
pub fn profit(covering: &Covering, units: &Units) -> u64 {
    covering.bins.iter().filter(|b| b.is_covered(units)).count() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn make_fk() {
        assert_eq!(SizeSet::fk(3).unwrap().to_strings(), ["1/3", "2/3", "1"]);
        assert_eq!(SizeSet::fk(1).unwrap().to_strings(), ["1"]);
        assert_eq!(SizeSet::fk(5).unwrap().to_strings(), ["1/5", "2/5", "3/5", "4/5", "1"]);
        assert!(matches!(SizeSet::fk(0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn rationals_parse_and_reduce() {
        assert_eq!(r("2/4"), r("1/2"));
        assert_eq!(r("0.6"), r("3/5"));
        assert_eq!(r(".25"), r("1/4"));
        assert_eq!(r("1"), Rational::one());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(format_rational(&r("6/8")), "3/4");
        assert_eq!(format_decimal(&r("2/3"), 4), "0.6667");
        assert_eq!(format_decimal(&r("1"), 3), "1.000");
    }

    #[test]
    fn size_bounds() {
        assert!("0".parse::<Size>().is_err());
        assert!("3/2".parse::<Size>().is_err());
        assert!("1".parse::<Size>().is_ok());
        assert!(SizeSet::parse_list("2/3,1/3").is_err());
        assert!(SizeSet::parse_list("1/3,1/3").is_err());
        let s = SizeSet::parse_list("1/3,1/2").unwrap();
        assert_eq!(s.units().one, 6);
        assert_eq!(s.units().units, [2, 3]);
    }

    #[test]
    fn frequencies_by_counting() {
        let s = SizeSet::parse_list("1/2,1").unwrap();
        let inst = Instance::new(s, vec![0, 0, 1]).unwrap();
        assert_eq!(inst.frequencies().unwrap().entries(), [r("2/3"), r("1/3")]);

        let s = SizeSet::parse_list("1/3,2/3").unwrap();
        let inst = Instance::new(s.clone(), vec![0; 7]).unwrap();
        assert_eq!(inst.frequencies().unwrap().entries(), [r("1"), r("0")]);

        assert!(matches!(Instance::empty(s).frequencies(), Err(Error::EmptyInstance)));
    }

    #[test]
    fn frequency_vector_must_sum_to_one() {
        assert!(FrequencyVector::parse_list("1/2,1/3", false).is_err());
        let f = FrequencyVector::parse_list("1,2", true).unwrap();
        assert_eq!(f.entries(), [r("1/3"), r("2/3")]);
        assert!(FrequencyVector::parse_list("3/2,-1/2", false).is_err());
    }

    #[test]
    fn l1_examples() {
        let a = FrequencyVector::parse_list("1/2,1/2", false).unwrap();
        let b = FrequencyVector::parse_list("1/4,3/4", false).unwrap();
        assert_eq!(l1_distance(&a, &b).unwrap(), r("1/2"));
        assert_eq!(l1_distance(&a, &a).unwrap(), Rational::zero());
        let p = FrequencyVector::point(2, 0).unwrap();
        let q = FrequencyVector::point(2, 1).unwrap();
        assert_eq!(l1_distance(&p, &q).unwrap(), r("2"));
        let c = FrequencyVector::uniform(3).unwrap();
        assert!(l1_distance(&a, &c).is_err());
    }

    #[test]
    fn profit_examples() {
        let s = SizeSet::parse_list("1/3,1/2,2/3").unwrap();
        let u = s.units();
        assert_eq!(profit(&Covering::empty(), u), 0);

        let half = Covering::assemble(vec![Bin::from_items(Owner::Alg, &[1, 1], u)], u);
        assert_eq!(half.profit, 1);

        let c = Covering::assemble(
            vec![Bin::from_items(Owner::Alg, &[2], u), Bin::from_items(Owner::Alg, &[2, 0], u)],
            u,
        );
        assert_eq!(c.profit, 1);
        assert_eq!(profit(&c, u), 1);
    }

    #[test]
    fn exact_thirds_cover() {
        let s = SizeSet::parse_list("1/3").unwrap();
        let bin = Bin::from_items(Owner::Dnf, &[0, 0, 0], s.units());
        assert!(bin.is_covered(s.units()));
        assert_eq!(bin.level(&s), Rational::one());
    }

    #[test]
    fn placeholders_do_not_count() {
        let s = SizeSet::parse_list("1/2,1").unwrap();
        let u = s.units();
        let mut bin = Bin::with_placeholders(Owner::Group { group: 0, bin: 0 }, &[0, 0]);
        assert_eq!(bin.level_units(), 0);
        bin.fill(1, u);
        assert!(!bin.is_covered(u));
        bin.fill(0, u);
        assert!(bin.is_covered(u));
        assert_eq!(bin.items_in_fill_order(), [0, 0]);
        assert!(bin.check_non_wasteful(u));
        // Only bins holding at least one real item survive assembly.
        let c = Covering::assemble(vec![bin, Bin::with_placeholders(Owner::Extra, &[1])], u);
        assert_eq!(c.bins.len(), 1);
    }

    #[test]
    fn wasteful_replay_detected() {
        let s = SizeSet::parse_list("1/10,1/2").unwrap();
        let u = s.units();
        assert!(!Bin::from_items(Owner::Alg, &[1, 1, 0], u).check_non_wasteful(u));
        assert!(Bin::from_items(Owner::Alg, &[1, 0, 1], u).check_non_wasteful(u));
    }

    #[test]
    fn covering_verify_catches_loss() {
        let s = SizeSet::parse_list("1/2").unwrap();
        let u = s.units();
        let inst = Instance::new(s.clone(), vec![0, 0, 0]).unwrap();
        let c = Covering::assemble(vec![Bin::from_items(Owner::Dnf, &[0, 0], u)], u);
        assert!(c.verify(&inst).is_err());
        let c = Covering::assemble(
            vec![Bin::from_items(Owner::Dnf, &[0, 0], u), Bin::from_items(Owner::Dnf, &[0], u)],
            u,
        );
        assert!(c.verify(&inst).is_ok());
    }

    #[test]
    fn instance_file_round_trip() {
        let json = r#"{"sizes": ["1/3","2/3"], "items": [0,1,0]}"#;
        let file: InstanceFile = serde_json::from_str(json).unwrap();
        let inst = file.to_instance().unwrap();
        assert_eq!(inst.counts(), CountVector(vec![2, 1]));
        assert_eq!(inst.to_file(), file);
        let bad: InstanceFile = serde_json::from_str(r#"{"sizes": ["1/2"], "items": [1]}"#).unwrap();
        assert!(bad.to_instance().is_err());
    }
}
