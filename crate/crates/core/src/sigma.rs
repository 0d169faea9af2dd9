//! Exact evaluation of the projection-error functionals used as competitors
//! for greedy remainders.
//!
//! All four are minima of `‖x − P_I(x)‖` over finite candidate families. The
//! full evaluators walk every candidate that can meet the support and report
//! the lexicographically smallest minimizer; [`sigma_value`] only visits one
//! candidate per distinct intersection with the support.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::space::{IndexSet, Norm, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaKind {
    /// Arbitrary sets of size `≤ m` lying strictly right of `Λ`.
    Reverse,
    /// Intervals of length `≤ m` whose maximum is at least `max Λ`.
    Check,
    /// Intervals of length `≤ m` whose minimum is at most `min Λ`.
    Hat,
    /// Initial segments `[1, k]` with `k ≤ m`.
    PgTail,
}

impl SigmaKind {
    pub const ALL: [SigmaKind; 4] = [
        SigmaKind::Reverse,
        SigmaKind::Check,
        SigmaKind::Hat,
        SigmaKind::PgTail,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SigmaKind::Reverse => "reverse",
            SigmaKind::Check => "check",
            SigmaKind::Hat => "hat",
            SigmaKind::PgTail => "pg_tail",
        }
    }
}

impl fmt::Display for SigmaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SigmaKind {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        SigmaKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| {
                LabError::Config(format!(
                    "unknown sigma kind {s:?}; valid kinds: reverse, check, hat, pg_tail"
                ))
            })
    }
}

/// The value of a functional together with the (lexicographically smallest)
/// candidate set attaining it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaResult {
    pub value: f64,
    pub minimizer: IndexSet,
    pub kind: SigmaKind,
}

struct Best {
    value: f64,
    set: IndexSet,
}

impl Best {
    fn start<N: Norm + ?Sized>(norm: &N, x: &Vector) -> Self {
        Best {
            value: norm.norm(x),
            set: IndexSet::empty(),
        }
    }

    fn offer<N: Norm + ?Sized>(&mut self, norm: &N, x: &Vector, candidate: IndexSet) {
        let value = norm.norm(&x.restrict(|n| !candidate.contains(n)));
        if value < self.value || (value == self.value && candidate < self.set) {
            self.value = value;
            self.set = candidate;
        }
    }

    fn finish(self, kind: SigmaKind) -> SigmaResult {
        SigmaResult {
            value: self.value,
            minimizer: self.set,
            kind,
        }
    }
}

/// `inf{‖x − P_A(x)‖ : |A| ≤ m, A > Λ}`.
pub fn sigma_reverse<N: Norm + ?Sized>(
    x: &Vector,
    lambda_set: &IndexSet,
    m: usize,
    norm: &N,
) -> SigmaResult {
    let mut best = Best::start(norm, x);
    let floor = lambda_set.max().unwrap_or(0);
    let pool: Vec<usize> = x
        .entries()
        .iter()
        .map(|&(n, _)| n)
        .filter(|&n| n > floor)
        .collect();
    let mut chosen = Vec::new();
    subsets_up_to(&pool, m, 0, &mut chosen, &mut |picked| {
        if !picked.is_empty() {
            best.offer(norm, x, IndexSet::from_sorted_unchecked(picked.to_vec()));
        }
    });
    best.finish(SigmaKind::Reverse)
}

fn subsets_up_to(
    pool: &[usize],
    max_len: usize,
    from: usize,
    chosen: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    visit(chosen);
    if chosen.len() == max_len {
        return;
    }
    for i in from..pool.len() {
        chosen.push(pool[i]);
        subsets_up_to(pool, max_len, i + 1, chosen, visit);
        chosen.pop();
    }
}

/// `inf{‖x − P_I(x)‖ : I = ∅ or I an interval, Λ ≤ max I, |I| ≤ m}`.
pub fn sigma_check<N: Norm + ?Sized>(
    x: &Vector,
    lambda_set: &IndexSet,
    m: usize,
    norm: &N,
) -> SigmaResult {
    let mut best = Best::start(norm, x);
    if let (Some(top), true) = (x.max_index(), m > 0) {
        let floor = lambda_set.max().unwrap_or(0);
        let reach = top.max(floor);
        let first = (floor + 1).saturating_sub(m).max(1);
        for a in first..=top {
            let last = (a + m - 1).min(reach);
            for b in a.max(floor)..=last {
                best.offer(norm, x, IndexSet::interval(a, b));
            }
        }
    }
    best.finish(SigmaKind::Check)
}

/// `inf{‖x − P_I(x)‖ : I = ∅ or I an interval, Λ ≥ min I, |I| ≤ m}`.
pub fn sigma_hat<N: Norm + ?Sized>(
    x: &Vector,
    lambda_set: &IndexSet,
    m: usize,
    norm: &N,
) -> SigmaResult {
    let mut best = Best::start(norm, x);
    if let (Some(top), true) = (x.max_index(), m > 0) {
        let ceiling = lambda_set.min().unwrap_or(top).min(top);
        for a in 1..=ceiling {
            for b in a..=(a + m - 1).min(top) {
                best.offer(norm, x, IndexSet::interval(a, b));
            }
        }
    }
    best.finish(SigmaKind::Hat)
}

/// `min_{k≤m} ‖x − Σ_{n≤k} e_n^*(x) e_n‖`.
pub fn pg_tail<N: Norm + ?Sized>(x: &Vector, m: usize, norm: &N) -> SigmaResult {
    let mut best = Best::start(norm, x);
    let top = x.max_index().unwrap_or(0);
    for k in 1..=m.min(top) {
        best.offer(norm, x, IndexSet::interval(1, k));
    }
    best.finish(SigmaKind::PgTail)
}

/// Dispatches on `kind`; `lambda_set` is ignored for the tail functional.
pub fn sigma<N: Norm + ?Sized>(
    kind: SigmaKind,
    x: &Vector,
    lambda_set: &IndexSet,
    m: usize,
    norm: &N,
) -> SigmaResult {
    match kind {
        SigmaKind::Reverse => sigma_reverse(x, lambda_set, m, norm),
        SigmaKind::Check => sigma_check(x, lambda_set, m, norm),
        SigmaKind::Hat => sigma_hat(x, lambda_set, m, norm),
        SigmaKind::PgTail => pg_tail(x, m, norm),
    }
}

/// The value of [`sigma`] without the minimizer.
///
/// Interval candidates are visited once per distinct intersection with the
/// support (a run `s_i..=s_j` of consecutive support indices), using the
/// shortest admissible interval realizing it. The restricted vectors are the
/// same as in the full enumeration, so the result is bit-identical.
pub fn sigma_value<N: Norm + ?Sized>(
    kind: SigmaKind,
    x: &Vector,
    lambda_set: &IndexSet,
    m: usize,
    norm: &N,
) -> f64 {
    let support: Vec<usize> = x.entries().iter().map(|&(n, _)| n).collect();
    let k = support.len();
    let mut best = norm.norm(x);
    if m == 0 || k == 0 {
        return best;
    }
    let mut try_run = |i: usize, j: usize| {
        let v = norm.norm(&x.restrict(|n| n < support[i] || n > support[j]));
        if v < best {
            best = v;
        }
    };
    match kind {
        SigmaKind::Reverse => return sigma_reverse(x, lambda_set, m, norm).value,
        SigmaKind::Check => {
            let floor = lambda_set.max().unwrap_or(0);
            for i in 0..k {
                for j in i..k {
                    let b = support[j].max(floor);
                    let fits_right = j + 1 == k || b < support[j + 1];
                    if fits_right && b + 1 - support[i] <= m {
                        try_run(i, j);
                    }
                }
            }
        }
        SigmaKind::Hat => {
            let ceiling = lambda_set.min();
            for i in 0..k {
                let a = ceiling.map_or(support[i], |c| c.min(support[i]));
                if a == 0 || (i > 0 && a <= support[i - 1]) {
                    continue;
                }
                for j in i..k {
                    if support[j] + 1 - a <= m {
                        try_run(i, j);
                    }
                }
            }
        }
        SigmaKind::PgTail => {
            for j in 0..k {
                if support[j] <= m {
                    try_run(0, j);
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{indicator, LpExponent, SpaceSpec};

    fn l1() -> SpaceSpec {
        SpaceSpec::lp(LpExponent::One, 12)
    }

    fn set(items: &[usize]) -> IndexSet {
        IndexSet::new(items.iter().copied()).unwrap()
    }

    fn ind(items: &[usize]) -> Vector {
        indicator(&set(items), None).unwrap()
    }

    #[test]
    fn zero_budget_returns_the_norm() {
        let x = ind(&[1, 2, 3]);
        for kind in SigmaKind::ALL {
            let r = sigma(kind, &x, &set(&[1]), 0, &l1());
            assert_eq!(r.value, 3.0, "{kind}");
            assert!(r.minimizer.is_empty());
        }
    }

    #[test]
    fn reverse_examples() {
        let r = sigma_reverse(&ind(&[1, 2, 3]), &set(&[1]), 1, &l1());
        assert_eq!(r.value, 2.0);
        assert_eq!(r.minimizer, set(&[2]));
        let x = ind(&[2, 5, 7]);
        let r = sigma_reverse(&x, &IndexSet::empty(), 3, &l1());
        assert_eq!((r.value, r.minimizer), (0.0, x.support()));
    }

    #[test]
    fn check_examples() {
        let r = sigma_check(&ind(&[1, 2, 3]), &set(&[1]), 1, &l1());
        assert_eq!((r.value, r.minimizer), (2.0, set(&[1])));
        let r = sigma_check(&ind(&[1, 4]), &set(&[4]), 2, &l1());
        assert_eq!((r.value, r.minimizer), (1.0, set(&[3, 4])));
        // max Λ right of the support: only intervals reaching past it qualify
        let r = sigma_check(&ind(&[1, 2]), &set(&[9]), 3, &l1());
        assert_eq!((r.value, r.minimizer), (2.0, IndexSet::empty()));
    }

    #[test]
    fn hat_examples() {
        // {1} and {1,2} tie at 1; the lexicographically smaller one is reported
        let r = sigma_hat(&ind(&[1, 4]), &set(&[1]), 2, &l1());
        assert_eq!((r.value, r.minimizer), (1.0, set(&[1])));
        assert_eq!(
            l1().norm(&crate::greedy::project_complement(
                &ind(&[1, 4]),
                &set(&[1, 2])
            )),
            1.0
        );
        let r = sigma_hat(&ind(&[4]), &set(&[4]), 1, &l1());
        assert_eq!((r.value, r.minimizer), (0.0, set(&[4])));
    }

    #[test]
    fn tail_examples() {
        let r = pg_tail(&ind(&[1, 2, 3]), 2, &l1());
        assert_eq!((r.value, r.minimizer), (1.0, set(&[1, 2])));
        assert_eq!(pg_tail(&ind(&[2, 6]), 6, &l1()).value, 0.0);
        assert_eq!(pg_tail(&ind(&[2, 6]), 9, &l1()).value, 0.0);
    }

    #[test]
    fn value_path_matches_full_enumeration() {
        let spaces = [
            l1(),
            SpaceSpec::counterexample(12),
            SpaceSpec::increasing_weights(12),
        ];
        let xs = crate::family::random_vectors(11, 300, 10, 0.4);
        for (t, x) in xs.iter().enumerate() {
            let lambda_set = IndexSet::from_mask((t as u64 * 2654435761) & 0x3ff);
            for m in 0..5 {
                for kind in SigmaKind::ALL {
                    let space = &spaces[t % 3];
                    assert_eq!(
                        sigma_value(kind, x, &lambda_set, m, space),
                        sigma(kind, x, &lambda_set, m, space).value,
                        "{kind} x={x} Λ={lambda_set} m={m}"
                    );
                }
            }
        }
    }

    #[test]
    fn kinds_parse() {
        for kind in SigmaKind::ALL {
            assert_eq!(kind.as_str().parse::<SigmaKind>().unwrap(), kind);
        }
        assert!("tilde".parse::<SigmaKind>().is_err());
    }
}
