//! gcd of lag sets, Frobenius numbers and representability.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumberTheoryError {
    #[error("generators {generators:?} have gcd {gcd}, Frobenius number is undefined")]
    NotCoprime { generators: Vec<u64>, gcd: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumericalSemigroupInfo {
    pub generators: BTreeSet<u64>,
    pub gcd: u64,
    /// Largest non-representable integer, -1 when every integer is
    /// representable; `None` when the generators are not coprime.
    pub frobenius: Option<i64>,
}

/// gcd of every element; 0 for the empty set.
pub fn gcd_set<I>(s: I) -> u64
where
    I: IntoIterator,
    I::Item: Into<u64>,
{
    s.into_iter().fold(0u64, |g, x| g.gcd(&x.into()))
}

/// Frobenius number by shortest paths over residues modulo the smallest
/// generator: `dist[r]` is the least representable integer congruent to `r`.
pub fn frobenius_number(s: &BTreeSet<u64>) -> Result<i64, NumberTheoryError> {
    let gcd = gcd_set(s.iter().copied());
    if gcd != 1 {
        return Err(NumberTheoryError::NotCoprime {
            generators: s.iter().copied().collect(),
            gcd,
        });
    }
    let modulus = *s.first().expect("coprime set is nonempty");
    let m = modulus as usize;
    let mut dist = vec![u64::MAX; m];
    dist[0] = 0;
    let mut heap = BinaryHeap::from([Reverse((0u64, 0usize))]);
    while let Some(Reverse((d, r))) = heap.pop() {
        if d > dist[r] {
            continue;
        }
        for &g in s {
            let next = (r + (g % modulus) as usize) % m;
            let nd = d + g;
            if nd < dist[next] {
                dist[next] = nd;
                heap.push(Reverse((nd, next)));
            }
        }
    }
    let largest = *dist.iter().max().expect("modulus is positive");
    Ok(largest as i64 - modulus as i64)
}

/// Whether `n` is a nonnegative integer combination of `s`.
pub fn representable(n: u64, s: &BTreeSet<u64>) -> bool {
    let n = n as usize;
    let mut reach = vec![false; n + 1];
    reach[0] = true;
    for i in 1..=n {
        reach[i] = s.iter().any(|&g| g as usize <= i && reach[i - g as usize]);
    }
    reach[n]
}

pub fn semigroup_info(generators: &BTreeSet<u64>) -> NumericalSemigroupInfo {
    let gcd = gcd_set(generators.iter().copied());
    NumericalSemigroupInfo {
        generators: generators.clone(),
        gcd,
        frobenius: frobenius_number(generators).ok(),
    }
}

/// The generator set `{i / g}` for a lag set with gcd `g`, where the
/// Frobenius number governs how positivity spreads along a residue class.
pub fn reduced_generators(lags: &BTreeSet<usize>) -> BTreeSet<u64> {
    let g = gcd_set(lags.iter().map(|&l| l as u64));
    if g == 0 {
        return BTreeSet::new();
    }
    lags.iter().map(|&l| l as u64 / g).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(v: &[u64]) -> BTreeSet<u64> {
        v.iter().copied().collect()
    }

    /// Largest integer below `bound` that no combination reaches, -1 if none.
    fn brute_frobenius(s: &BTreeSet<u64>, bound: u64) -> i64 {
        let mut reach = vec![false; bound as usize + 1];
        reach[0] = true;
        for i in 0..=bound as usize {
            if reach[i] {
                for &g in s {
                    if i + g as usize <= bound as usize {
                        reach[i + g as usize] = true;
                    }
                }
            }
        }
        reach.iter().rposition(|&r| !r).map_or(-1, |i| i as i64)
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd_set([2u64, 4, 7]), 1);
        assert_eq!(gcd_set([6u64, 3]), 3);
        assert_eq!(gcd_set(Vec::<u64>::new()), 0);
    }

    #[test]
    fn frobenius_examples() {
        assert_eq!(brute_frobenius(&set(&[3, 5]), 15), 7);
        assert_eq!(brute_frobenius(&set(&[2, 3]), 15), 1);
        assert_eq!(frobenius_number(&set(&[3, 5])), Ok(7));
        assert_eq!(frobenius_number(&set(&[2, 3])), Ok(1));
        assert_eq!(frobenius_number(&set(&[1])), Ok(-1));
        assert_eq!(frobenius_number(&set(&[1, 5])), Ok(-1));
    }

    #[test]
    fn frobenius_rejects_non_coprime() {
        assert_eq!(
            frobenius_number(&set(&[4, 6])),
            Err(NumberTheoryError::NotCoprime {
                generators: vec![4, 6],
                gcd: 2
            })
        );
        assert!(frobenius_number(&BTreeSet::new()).is_err());
    }

    #[test]
    fn representable_examples() {
        assert!(!representable(7, &set(&[3, 5])));
        assert!(representable(8, &set(&[3, 5])));
        assert!(representable(0, &set(&[4])));
    }

    #[test]
    fn reduced_generators_divide_out_gcd() {
        let lags: BTreeSet<usize> = [6, 3].into_iter().collect();
        assert_eq!(reduced_generators(&lags), set(&[1, 2]));
        assert_eq!(semigroup_info(&set(&[4, 6])).frobenius, None);
    }

    proptest! {
        #[test]
        fn everything_past_frobenius_is_representable(v in prop::collection::btree_set(1u64..=12, 1..5)) {
            prop_assume!(gcd_set(v.iter().copied()) == 1);
            let f = frobenius_number(&v).unwrap();
            let min = *v.first().unwrap() as i64;
            for n in (f + 1).max(0)..=(f + 3 * min) {
                prop_assert!(representable(n as u64, &v));
            }
            if f >= 0 {
                prop_assert!(!representable(f as u64, &v));
            }
        }
    }
}
