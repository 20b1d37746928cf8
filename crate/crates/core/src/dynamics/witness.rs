use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::simulate::{Orbit, DEFAULT_PRECISION_BITS};
use crate::equation::Equation;
use crate::ics::InitialConditions;
use crate::ratio::{ratio, Ratio};

/// Initial values tried when looking for an unbounded orbit:
///
/// * constant vectors `1/10`, `1`, `10`;
/// * for each modulus `q` in `{2, 3}` and residue `r < q`, `x_{-m} = hi` when
///   `m ≡ r (mod q)` and `lo` otherwise, for `(lo, hi)` in
///   `{(1/10, 10), (1/100, 100)}`.
pub fn default_witness_grid(k: usize) -> Vec<InitialConditions> {
    let mut grid: Vec<InitialConditions> = ["1/10", "1", "10"]
        .iter()
        .map(|c| InitialConditions::Rational(vec![ratio(c); k]))
        .collect();
    for (lo, hi) in [("1/10", "10"), ("1/100", "100")] {
        let (lo, hi) = (ratio(lo), ratio(hi));
        for q in [2usize, 3] {
            for r in 0..q {
                let ics = (1..=k)
                    .map(|m| if m % q == r { hi.clone() } else { lo.clone() })
                    .collect();
                grid.push(InitialConditions::Rational(ics));
            }
        }
    }
    grid.dedup();
    grid
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub ics: InitialConditions,
    /// First step with `x_n > threshold`.
    pub step: usize,
}

/// First grid entry whose orbit exceeds `threshold` within `steps` steps.
/// `None` is inconclusive, not a proof of boundedness. Grid entries whose
/// orbit hits a zero denominator are skipped.
pub fn unbounded_witness_search(
    eq: &Equation,
    grid: &[InitialConditions],
    threshold: &Ratio,
    steps: usize,
) -> Option<Witness> {
    assert!(threshold > &Ratio::default(), "threshold must be positive");
    grid.par_iter().find_map_first(|ics| {
        let orbit = Orbit::new(eq, ics, DEFAULT_PRECISION_BITS).ok()?;
        for (n, x) in orbit.take(steps).enumerate() {
            if &x.ok()? > threshold {
                return Some(Witness {
                    ics: ics.clone(),
                    step: n,
                });
            }
        }
        None
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reductions::unbounded_ic_t1;

    #[test]
    fn grid_shape() {
        let g = default_witness_grid(2);
        assert!(g.contains(&InitialConditions::Rational(vec![
            ratio("1/10"),
            ratio("10")
        ])));
        assert!(g.iter().all(|ics| ics.len() == 2));
        assert_eq!(default_witness_grid(7).len(), 3 + 2 * 5);
    }

    #[test]
    fn supercritical_t2_instance_has_witness() {
        let eq = Equation::literal("1", "1/2", &[(2, "1")], &[(1, "1")]);
        let grid = [InitialConditions::Rational(vec![
            ratio("1/10"),
            ratio("10"),
        ])];
        let w = unbounded_witness_search(&eq, &grid, &ratio("1000000"), 5000).expect("grows");
        assert!(w.step < 200);
    }

    #[test]
    fn constructed_t1_orbit_is_a_witness() {
        let eq = Equation::literal("0", "1", &[(2, "1"), (4, "1")], &[(1, "1")]);
        let ics = unbounded_ic_t1(&eq).unwrap();
        assert!(unbounded_witness_search(&eq, &[ics], &ratio("1000000"), 200).is_some());
    }

    #[test]
    fn subcritical_has_no_witness() {
        let eq = Equation::literal("1", "3", &[(2, "1")], &[(1, "1")]);
        let grid = default_witness_grid(2);
        assert!(unbounded_witness_search(&eq, &grid, &ratio("1000000"), 2000).is_none());
    }
}
