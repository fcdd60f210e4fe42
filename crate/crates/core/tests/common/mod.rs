//! Oracles shared by the integration tests. They are written independently of the
//! library's search and closed forms so the two can be compared.

#![allow(dead_code)]

use bincov::model::{parse_rational, Instance};
use bincov::{CountVector, Rational};
use num_traits::One;

/// Optimum by exhaustive partition enumeration over item subsets.
///
/// `best(mask)` is the largest number of disjoint covered groups inside `mask`: either
/// the lowest item of `mask` stays unused, or it belongs to some covered subset.
pub fn brute_force_opt(items: &[Rational]) -> u64 {
    let n = items.len();
    assert!(n <= 16, "brute force is exponential");
    let full = (1usize << n) - 1;
    let mut sum = vec![Rational::from_integer(0.into()); 1 << n];
    for mask in 1..=full {
        let low = mask.trailing_zeros() as usize;
        sum[mask] = &sum[mask & (mask - 1)] + &items[low];
    }
    let covered: Vec<bool> = sum.iter().map(|s| *s >= Rational::one()).collect();
    let mut best = vec![0u64; 1 << n];
    for mask in 1..=full {
        let low_bit = mask & mask.wrapping_neg();
        let mut value = best[mask ^ low_bit];
        let rest = mask ^ low_bit;
        // Every subset of `mask` containing its lowest item.
        let mut sub = rest;
        loop {
            let group = sub | low_bit;
            if covered[group] {
                value = value.max(1 + best[mask ^ group]);
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        best[mask] = value;
    }
    best[full]
}

pub fn item_values(instance: &Instance) -> Vec<Rational> {
    instance.items().iter().map(|&i| instance.sizes().size(i).value().clone()).collect()
}

pub fn brute_force_instance_opt(instance: &Instance) -> u64 {
    brute_force_opt(&item_values(instance))
}

/// Optimum over `{1/2, 1}`: every unit item alone, halves in pairs.
pub fn opt_half_one(halves: u64, ones: u64) -> u64 {
    ones + halves / 2
}

/// Optimum over `{1/q, (q-1)/q}` for `q >= 3`, by scanning the number `p` of mixed
/// bins: the other large items pair up and the other small items go `q` to a bin.
pub fn opt_small_large(q: u64, small: u64, large: u64) -> u64 {
    (0..=small.min(large)).map(|p| p + (large - p) / 2 + (small - p) / q).max().unwrap_or(0)
}

/// Dispatches to the closed forms above for the two size sets the property tests use.
pub fn opt_for(instance: &Instance) -> u64 {
    let sizes = instance.sizes().to_strings();
    let counts: CountVector = instance.counts();
    match sizes.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["1/2", "1"] => opt_half_one(counts.0[0], counts.0[1]),
        ["1/3", "2/3"] => opt_small_large(3, counts.0[0], counts.0[1]),
        other => panic!("no test oracle for {other:?}"),
    }
}

pub fn r(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

/// `1 + 1/2 + ... + 1/n`.
pub fn harmonic(n: u64) -> Rational {
    (1..=n).map(|i| Rational::new(1.into(), i.into())).sum()
}
