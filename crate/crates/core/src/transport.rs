//! Extremal tuples mapped through the reductions between the `λ`-type
//! remainder constant and the perturbation constant.
//!
//! Each map returns factor tuples whose ratios multiply to the source ratio,
//! so the factors give lower bounds for the constants on the other side even
//! when they fall outside the searched family.

use crate::greedy::{is_greedy_set, project_complement};
use crate::lambda::Lambda;
use crate::sigma::SigmaKind;
use crate::space::{
    indicator, span_length, sup_norm, surrounds, IndexSet, Norm, Sign, SignPattern, Vector,
    TOLERANCE,
};
use crate::witness::Witness;

/// Factor tuples and whether each meets the side conditions of its constant.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    pub factors: Vec<Witness>,
    pub admissible: bool,
}

impl Image {
    /// Product of the factor ratios; `None` if any factor is `positive/0`.
    pub fn ratio<N: Norm + ?Sized>(&self, norm: &N) -> Option<f64> {
        self.factors
            .iter()
            .try_fold(1.0, |acc, w| Some(acc * w.ratio(norm)?))
    }

    /// Largest ratio among factors of one variant, by predicate.
    pub fn factor_ratio<N: Norm + ?Sized>(
        &self,
        norm: &N,
        pick: fn(&Witness) -> bool,
    ) -> Option<f64> {
        self.factors
            .iter()
            .filter(|w| pick(w))
            .map(|w| w.ratio(norm).unwrap_or(f64::INFINITY))
            .reduce(f64::max)
    }
}

pub fn is_remainder(w: &Witness) -> bool {
    matches!(
        w,
        Witness::Greedy {
            remainder: true,
            ..
        } | Witness::Truncation { .. }
    )
}

pub fn is_competitor(w: &Witness) -> bool {
    matches!(w, Witness::Competitor { .. })
}

pub fn is_reformulated(w: &Witness) -> bool {
    matches!(w, Witness::Reformulated { .. })
}

fn admissible_competitor(
    lambda: Lambda,
    y: &Vector,
    m: usize,
    set: &IndexSet,
    interval: &IndexSet,
) -> bool {
    is_greedy_set(y, set)
        && set.len() == lambda.ceil_mul(m)
        && interval.len() <= m
        && interval.is_interval()
        && match (set.max(), interval.max()) {
            (Some(top), Some(end)) => top <= end,
            _ => true,
        }
}

fn signed(signs: &SignPattern) -> Vector {
    indicator(&signs.domain(), Some(signs)).expect("pattern matches its domain")
}

fn gap(a: &IndexSet) -> IndexSet {
    match (a.min(), a.max()) {
        (Some(lo), Some(hi)) => IndexSet::interval(lo, hi).difference(a),
        _ => IndexSet::empty(),
    }
}

/// `y = x + 1_{εA} + 1_{δB} + 1_D` with `D = [min A, max A] \ A`: then
/// `‖x + 1_{εA}‖ = ‖y − P_{B∪D} y‖` and `‖x + 1_{δB}‖ = ‖y − P_{A∪D} y‖`.
fn filled(x: &Vector, eps: &SignPattern, delta: &SignPattern) -> (Vector, IndexSet, IndexSet) {
    let a = eps.domain();
    let d = gap(&a);
    let y = x
        .add(&signed(eps))
        .add(&signed(delta))
        .add(&indicator(&d, None).expect("plain indicator"));
    let hull = a.union(&d);
    (y, delta.domain().union(&d), hull)
}

/// A perturbation tuple as one remainder tuple with `λ = 1`: the greedy
/// set `B ∪ D` of `y` against the interval `[min A, max A]`.
pub fn perturbation_to_unit_remainder(w: &Witness) -> Option<Image> {
    let Witness::Perturbation { x, eps, delta } = w else {
        return None;
    };
    let (y, greedy_set, hull) = filled(x, eps, delta);
    let m = greedy_set.len();
    let admissible = admissible_competitor(Lambda::ONE, &y, m, &greedy_set, &hull);
    Some(Image {
        factors: vec![Witness::Competitor {
            x: y,
            m,
            greedy_set,
            competitor: hull,
            kind: SigmaKind::Check,
        }],
        admissible,
    })
}

/// A perturbation tuple as a suppression tuple times a remainder tuple: with
/// `Λ` the first `⌈λ s(A)⌉` elements of `B ∪ D`,
/// `‖y − P_{B∪D} y‖ / ‖y − P_Λ y‖` times `‖y − P_Λ y‖ / ‖y − P_{A∪D} y‖`.
pub fn perturbation_to_remainder(w: &Witness, lambda: Lambda) -> Option<Image> {
    let Witness::Perturbation { x, eps, delta } = w else {
        return None;
    };
    let (y, top, hull) = filled(x, eps, delta);
    if eps.domain().is_empty() {
        let admissible = is_greedy_set(&y, &top);
        return Some(Image {
            factors: vec![Witness::Greedy {
                x: y,
                m: top.len(),
                greedy_set: top,
                remainder: true,
            }],
            admissible,
        });
    }
    let m = hull.len();
    let k = lambda.ceil_mul(m);
    if k > top.len() {
        return Some(Image {
            factors: Vec::new(),
            admissible: false,
        });
    }
    let set = IndexSet::from_sorted_unchecked(top.elements()[..k].to_vec());
    let rest = top.difference(&set);
    let reduced = project_complement(&y, &set);
    let admissible =
        admissible_competitor(lambda, &y, m, &set, &hull) && is_greedy_set(&reduced, &rest);
    Some(Image {
        factors: vec![
            Witness::Greedy {
                x: reduced,
                m: rest.len(),
                greedy_set: rest,
                remainder: true,
            },
            Witness::Competitor {
                x: y,
                m,
                greedy_set: set,
                competitor: hull,
                kind: SigmaKind::Check,
            },
        ],
        admissible,
    })
}

/// A remainder tuple `(x, Λ, I)` as a reformulated perturbation tuple times a
/// truncation tuple, with `α = min_Λ |x_n|`, `A = I \ Λ`, `B = Λ \ I`:
/// `‖x − P_Λ x‖ / ‖T_α(x − P_I x)‖` times `‖T_α(x − P_I x)‖ / ‖x − P_I x‖`.
pub fn remainder_to_perturbation(w: &Witness, lambda: Lambda) -> Option<Image> {
    let Witness::Competitor {
        x,
        greedy_set,
        competitor,
        ..
    } = w
    else {
        return None;
    };
    let rest = project_complement(x, greedy_set);
    if competitor.is_empty() {
        return Some(Image {
            factors: vec![Witness::Greedy {
                x: x.clone(),
                m: greedy_set.len(),
                greedy_set: greedy_set.clone(),
                remainder: true,
            }],
            admissible: is_greedy_set(x, greedy_set),
        });
    }
    let alpha = greedy_set
        .iter()
        .map(|n| x.coefficient(n).abs())
        .fold(f64::INFINITY, f64::min);
    if !(alpha > 0.0 && alpha.is_finite()) {
        return None;
    }
    let a = competitor.difference(greedy_set);
    let b = greedy_set.difference(competitor);
    let eps = SignPattern::new(b.iter().map(|n| {
        (
            n,
            if x.coefficient(n) < 0.0 {
                Sign::Minus
            } else {
                Sign::Plus
            },
        )
    }))
    .expect("distinct indices");
    let scaled = rest.scale(1.0 / alpha);
    let outside = project_complement(&scaled, &a);
    let admissible = is_greedy_set(x, greedy_set)
        && sup_norm(&scaled) <= 1.0 + TOLERANCE
        && (a.is_empty() || b.is_empty() || b.lies_before(&a))
        && lambda.admits(span_length(&a), a.len(), b.len())
        && b.is_disjoint(&outside.support())
        && surrounds(&outside, &a);
    Some(Image {
        factors: vec![
            Witness::Reformulated { x: scaled, a, eps },
            Witness::Truncation {
                x: project_complement(x, competitor),
                alpha,
            },
        ],
        admissible,
    })
}
