//! The ℓ-splitting of an instance: `ℓ` sub-instances with identical per-size counts
//! plus an excess instance.

use crate::error::{invalid, Result};
use crate::model::{Instance, SizeIdx};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaSplit {
    pub parts: Vec<Instance>,
    pub excess: Instance,
}

/// Deals the `c`-th occurrence of each size to part `c mod ℓ`, then moves the last
/// incomplete round of every size to the excess instance (grouped by size, in part
/// order).
pub fn lambda_split(instance: &Instance, ell: u32) -> Result<LambdaSplit> {
    if ell == 0 {
        return Err(invalid("ℓ must be positive"));
    }
    let ell = ell as u64;
    let counts = instance.counts();
    let kept: Vec<u64> = counts.0.iter().map(|&n| n - n % ell).collect();
    let mut seen = vec![0u64; counts.0.len()];
    let mut parts: Vec<Vec<SizeIdx>> = vec![Vec::new(); ell as usize];
    let mut excess: Vec<Vec<SizeIdx>> = vec![Vec::new(); counts.0.len()];
    for &a in instance.items() {
        let c = &mut seen[a as usize];
        if *c < kept[a as usize] {
            parts[(*c % ell) as usize].push(a);
        } else {
            excess[a as usize].push(a);
        }
        *c += 1;
    }
    Ok(LambdaSplit {
        parts: parts.into_iter().map(|p| instance.with_items(p)).collect(),
        excess: instance.with_items(excess.concat()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CountVector, SizeSet};

    fn two_sizes(items: Vec<SizeIdx>) -> Instance {
        Instance::new(SizeSet::parse_list("1/3,2/3").unwrap(), items).unwrap()
    }

    #[test]
    fn uneven_counts() {
        let inst = two_sizes(vec![0, 1, 0, 0, 1, 0, 1, 0]);
        let s = lambda_split(&inst, 2).unwrap();
        for p in &s.parts {
            assert_eq!(p.counts(), CountVector(vec![2, 1]));
        }
        assert_eq!(s.excess.len(), 2);
        assert_eq!(s.excess.counts(), CountVector(vec![1, 1]));
    }

    #[test]
    fn single_part_is_identity() {
        let inst = two_sizes(vec![1, 0, 0, 1, 1]);
        let s = lambda_split(&inst, 1).unwrap();
        assert_eq!(s.parts, vec![inst]);
        assert!(s.excess.is_empty());
    }

    #[test]
    fn divisible_counts_leave_no_excess() {
        let s = lambda_split(&two_sizes(vec![0; 4]), 2).unwrap();
        assert_eq!(s.parts[0].counts(), CountVector(vec![2, 0]));
        assert_eq!(s.parts[1].counts(), CountVector(vec![2, 0]));
        assert!(s.excess.is_empty());
        assert!(lambda_split(&two_sizes(vec![]), 0).is_err());
    }
}
