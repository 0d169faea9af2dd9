//! Greedy sets, coordinate projections and the truncation operator.

use serde::Serialize;

use crate::error::{invalid, LabError, Result};
use crate::space::{IndexSet, Vector};

/// Default bound on the number of greedy sets a single enumeration may produce.
pub const DEFAULT_FAMILY_LIMIT: usize = 10_000;

/// `min_{n∈Λ} |e_n^*(x)| ≥ max_{n∉Λ} |e_n^*(x)|`.
///
/// Indices outside the support carry coefficient 0; the minimum over an empty
/// `Λ` is `+∞` and the maximum over an empty complement is 0.
pub fn is_greedy_set(x: &Vector, set: &IndexSet) -> bool {
    let inside = set
        .iter()
        .map(|n| x.coefficient(n).abs())
        .fold(f64::INFINITY, f64::min);
    let outside = x
        .entries()
        .iter()
        .filter(|&&(n, _)| !set.contains(n))
        .fold(0.0, |m: f64, &(_, c)| m.max(c.abs()));
    inside >= outside
}

/// All greedy sets of a vector with a fixed cardinality inside `[1..ambient_cap]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreedySetFamily {
    pub base_vector: Vector,
    pub cardinality: usize,
    pub sets: Vec<IndexSet>,
    pub ambient_cap: usize,
}

/// `G(x, m)` within `[1..ambient_cap]`, capped at [`DEFAULT_FAMILY_LIMIT`] sets.
pub fn enumerate_greedy_sets(x: &Vector, m: usize, ambient_cap: usize) -> Result<GreedySetFamily> {
    enumerate_greedy_sets_with_limit(x, m, ambient_cap, DEFAULT_FAMILY_LIMIT)
}

/// `G(x, m)` within `[1..ambient_cap]`.
///
/// Every coefficient strictly above the `m`-th largest magnitude `t` is forced
/// into the set; the remaining slots are filled with every combination of
/// indices whose magnitude equals `t` (zero-coefficient indices when `m`
/// exceeds the support). Sets come out in lexicographic order.
pub fn enumerate_greedy_sets_with_limit(
    x: &Vector,
    m: usize,
    ambient_cap: usize,
    limit: usize,
) -> Result<GreedySetFamily> {
    if m > ambient_cap {
        return invalid(format!("m = {m} exceeds ambient cap {ambient_cap}"));
    }
    if x.max_index().is_some_and(|n| n > ambient_cap) {
        return invalid(format!(
            "support of x reaches index {} beyond ambient cap {ambient_cap}",
            x.max_index().unwrap()
        ));
    }
    let family = |sets| GreedySetFamily {
        base_vector: x.clone(),
        cardinality: m,
        sets,
        ambient_cap,
    };
    if m == 0 {
        return Ok(family(vec![IndexSet::empty()]));
    }

    let mut mags: Vec<f64> = x.entries().iter().map(|&(_, c)| c.abs()).collect();
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    let threshold = mags.get(m - 1).copied().unwrap_or(0.0);

    let forced: Vec<usize> = x
        .entries()
        .iter()
        .filter(|&&(_, c)| c.abs() > threshold)
        .map(|&(n, _)| n)
        .collect();
    let pool: Vec<usize> = if threshold > 0.0 {
        x.entries()
            .iter()
            .filter(|&&(_, c)| c.abs() == threshold)
            .map(|&(n, _)| n)
            .collect()
    } else {
        (1..=ambient_cap)
            .filter(|&n| x.coefficient(n) == 0.0)
            .collect()
    };
    let slots = m - forced.len();

    let required = binomial(pool.len(), slots);
    let mut sets = Vec::new();
    let mut chosen = Vec::with_capacity(slots);
    let mut overflow = false;
    choose(&pool, slots, 0, &mut chosen, &mut |picked| {
        if sets.len() == limit {
            overflow = true;
            return false;
        }
        let mut elems: Vec<usize> = forced.iter().chain(picked.iter()).copied().collect();
        elems.sort_unstable();
        sets.push(IndexSet::from_sorted_unchecked(elems));
        true
    });
    if overflow {
        return Err(LabError::EnumerationOverflow {
            enumerated: sets.len(),
            limit,
            required,
        });
    }
    sets.sort();
    Ok(family(sets))
}

/// Visits every `k`-subset of `pool` (in lexicographic order of positions);
/// stops early when `visit` returns false.
fn choose(
    pool: &[usize],
    k: usize,
    from: usize,
    chosen: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    if chosen.len() == k {
        return visit(chosen);
    }
    let need = k - chosen.len();
    if pool.len() < from + need {
        return true;
    }
    for i in from..=pool.len() - need {
        chosen.push(pool[i]);
        let go_on = choose(pool, k, i + 1, chosen, visit);
        chosen.pop();
        if !go_on {
            return false;
        }
    }
    true
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// `P_A(x) = Σ_{n∈A} e_n^*(x) e_n`
pub fn project(x: &Vector, set: &IndexSet) -> Vector {
    x.restrict(|n| set.contains(n))
}

/// `x − P_A(x)`
pub fn project_complement(x: &Vector, set: &IndexSet) -> Vector {
    x.restrict(|n| !set.contains(n))
}

/// `T_α(x)`: every coefficient with `|b| > α` becomes `sgn(b)·α`.
pub fn truncate(x: &Vector, alpha: f64) -> Result<Vector> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return invalid(format!("truncation level must be positive, got {alpha}"));
    }
    Ok(Vector::from_sorted_unchecked(
        x.entries()
            .iter()
            .map(|&(n, c)| {
                (
                    n,
                    if c.abs() > alpha {
                        alpha.copysign(c)
                    } else {
                        c
                    },
                )
            })
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(pairs: &[(usize, f64)]) -> Vector {
        Vector::from_entries(pairs.iter().copied()).unwrap()
    }

    fn set(items: &[usize]) -> IndexSet {
        IndexSet::new(items.iter().copied()).unwrap()
    }

    #[test]
    fn greedy_set_examples() {
        let x = v(&[(1, 3.0), (2, 1.0), (3, 2.0)]);
        assert!(is_greedy_set(&x, &set(&[1])));
        assert!(!is_greedy_set(&x, &set(&[3])));
        let tie = v(&[(1, 1.0), (2, 1.0)]);
        assert!(is_greedy_set(&tie, &set(&[2])));
        assert!(is_greedy_set(&x, &IndexSet::empty()));
    }

    #[test]
    fn enumeration_examples() {
        let x = v(&[(1, 3.0), (2, 1.0), (3, 2.0)]);
        assert_eq!(
            enumerate_greedy_sets(&x, 2, 3).unwrap().sets,
            vec![set(&[1, 3])]
        );
        let tie = v(&[(1, 1.0), (2, 1.0)]);
        assert_eq!(
            enumerate_greedy_sets(&tie, 1, 2).unwrap().sets,
            vec![set(&[1]), set(&[2])]
        );
        let short = v(&[(1, 2.0)]);
        assert_eq!(
            enumerate_greedy_sets(&short, 2, 3).unwrap().sets,
            vec![set(&[1, 2]), set(&[1, 3])]
        );
        assert_eq!(
            enumerate_greedy_sets(&short, 0, 3).unwrap().sets,
            vec![IndexSet::empty()]
        );
    }

    #[test]
    fn enumeration_preconditions_and_overflow() {
        let x = v(&[(5, 1.0)]);
        assert!(enumerate_greedy_sets(&x, 1, 4).is_err());
        assert!(enumerate_greedy_sets(&x, 6, 5).is_err());
        let err = enumerate_greedy_sets_with_limit(&Vector::zero(), 3, 20, 100).unwrap_err();
        match err {
            LabError::EnumerationOverflow {
                enumerated,
                limit,
                required,
            } => {
                assert_eq!((enumerated, limit, required), (100, 100, 1140));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn projection_examples() {
        let x = v(&[(1, 3.0), (2, 1.0)]);
        assert!(project(&x, &IndexSet::empty()).is_zero());
        assert_eq!(project(&x, &set(&[1])), v(&[(1, 3.0)]));
        assert!(project(&x, &set(&[5])).is_zero());
        assert_eq!(project_complement(&x, &set(&[1])), v(&[(2, 1.0)]));
    }

    #[test]
    fn truncation_examples() {
        let x = v(&[(1, 2.0), (2, -3.0), (3, 0.5)]);
        assert_eq!(truncate(&x, 3.0).unwrap(), x);
        assert_eq!(
            truncate(&x, 1.0).unwrap(),
            v(&[(1, 1.0), (2, -1.0), (3, 0.5)])
        );
        assert_eq!(truncate(&v(&[(1, -0.2)]), 0.1).unwrap(), v(&[(1, -0.1)]));
        assert!(truncate(&x, 0.0).is_err());
        assert!(truncate(&x, -1.0).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(20, 3), 1140);
        assert_eq!(binomial(2, 3), 0);
        assert_eq!(binomial(0, 0), 1);
    }
}
