//! Shared oracles and generators for the integration tests.

#![allow(dead_code)]

use greedy_lab::sigma::SigmaKind;
use greedy_lab::space::{builtin_corpus, IndexSet, Norm, SpaceSpec, Vector};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn remainder_norm<N: Norm + ?Sized>(norm: &N, x: &Vector, keep_out: impl Fn(usize) -> bool) -> f64 {
    norm.norm(&x.restrict(|n| !keep_out(n)))
}

/// Every subset of `[1..cap]` of size at most `limit`, as bit masks.
fn masks_up_to(cap: usize, limit: usize) -> impl Iterator<Item = u32> {
    (0u32..1 << cap).filter(move |m| m.count_ones() as usize <= limit)
}

fn in_mask(mask: u32, n: usize) -> bool {
    n >= 1 && n <= 32 && mask >> (n - 1) & 1 == 1
}

/// Brute-force value of a functional: every admissible candidate set inside
/// `[1..cap]` (plus `∅`), with no use of the support of `x`.
pub fn naive_sigma<N: Norm + ?Sized>(
    kind: SigmaKind,
    x: &Vector,
    lambda_set: &IndexSet,
    m: usize,
    norm: &N,
    cap: usize,
) -> f64 {
    let mut best = norm.norm(x);
    let intervals = || (1..=cap).flat_map(move |lo| (lo..=cap).map(move |hi| (lo, hi)));
    match kind {
        SigmaKind::Reverse => {
            let floor = lambda_set.max().unwrap_or(0);
            for mask in masks_up_to(cap, m) {
                let right = (1..=cap).filter(|&n| in_mask(mask, n)).all(|n| n > floor);
                if right {
                    best = best.min(remainder_norm(norm, x, |n| in_mask(mask, n)));
                }
            }
        }
        SigmaKind::Check => {
            for (lo, hi) in intervals() {
                let fits = hi - lo < m && lambda_set.max().map_or(true, |top| top <= hi);
                if fits {
                    best = best.min(remainder_norm(norm, x, |n| lo <= n && n <= hi));
                }
            }
        }
        SigmaKind::Hat => {
            for (lo, hi) in intervals() {
                let fits = hi - lo < m && lambda_set.min().map_or(true, |bottom| lo <= bottom);
                if fits {
                    best = best.min(remainder_norm(norm, x, |n| lo <= n && n <= hi));
                }
            }
        }
        SigmaKind::PgTail => {
            for k in 0..=m.min(cap) {
                best = best.min(remainder_norm(norm, x, |n| n <= k));
            }
        }
    }
    best
}

pub const KINDS: [SigmaKind; 4] = [
    SigmaKind::Reverse,
    SigmaKind::Check,
    SigmaKind::Hat,
    SigmaKind::PgTail,
];

/// A vector on `[1..cap]` whose magnitudes repeat often enough to create ties.
pub fn random_vector(rng: &mut ChaCha8Rng, cap: usize) -> Vector {
    let magnitudes = [0.25, 0.5, 1.0, 1.0, 2.0, 3.0];
    let density = rng.gen_range(0.2..0.9);
    let mut pairs = Vec::new();
    for n in 1..=cap {
        if rng.gen_bool(density) {
            let c = *magnitudes.choose(rng).expect("nonempty");
            pairs.push((n, if rng.gen_bool(0.5) { c } else { -c }));
        }
    }
    Vector::from_entries(pairs).expect("valid entries")
}

pub fn random_set(rng: &mut ChaCha8Rng, cap: usize, density: f64) -> IndexSet {
    IndexSet::new((1..=cap).filter(|_| rng.gen_bool(density))).expect("valid set")
}

/// The built-in spaces at a given cap, plus a weighted space with
/// non-monotone weights.
pub fn test_spaces(cap: usize) -> Vec<SpaceSpec> {
    let mut spaces = builtin_corpus(cap);
    spaces.push(SpaceSpec::weighted(
        "zigzag",
        (0..cap)
            .map(|k| if k % 2 == 0 { 1.0 } else { 0.3 + k as f64 })
            .collect(),
        cap,
    ));
    spaces
}
