//! Argument tuples attaining a searched ratio, re-evaluable from scratch.
//!
//! Every search computes its ratios through the same helpers that
//! [`Witness::ratio`] uses, so a stored witness reproduces the reported value
//! bit for bit.

use serde::{Deserialize, Serialize};

use crate::greedy::{project, project_complement, truncate};
use crate::search::ratio;
use crate::sigma::SigmaKind;
use crate::space::{
    counterexample_indicator_norm, indicator, sup_norm, IndexSet, Norm, Sign, SignPattern, Vector,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    /// `‖P_Λ x‖/‖x‖`, or `‖x − P_Λ x‖/‖x‖` when `remainder` is set.
    Greedy {
        x: Vector,
        m: usize,
        greedy_set: IndexSet,
        remainder: bool,
    },
    /// `‖x − P_Λ x‖ / ‖x − P_I x‖` with `I` the competitor chosen by `kind`.
    Competitor {
        x: Vector,
        m: usize,
        greedy_set: IndexSet,
        competitor: IndexSet,
        kind: SigmaKind,
    },
    /// `‖1_A‖/‖1_B‖`
    SetPair { a: IndexSet, b: IndexSet },
    /// `‖x + 1_{εA}‖/‖x + 1_{δB}‖`; `A` and `B` are the pattern domains.
    Perturbation {
        x: Vector,
        eps: SignPattern,
        delta: SignPattern,
    },
    /// `‖x‖/‖x − P_A x + 1_{εB}‖`
    Reformulated {
        x: Vector,
        a: IndexSet,
        eps: SignPattern,
    },
    /// `‖x‖/‖x + e_k‖`
    UnitAppend { x: Vector, k: usize },
    /// `‖x + t e_k‖/‖x + s e_j‖`
    UnitSwap {
        x: Vector,
        j: usize,
        s: Sign,
        k: usize,
        t: Sign,
    },
    /// `‖x‖/(max|a_n|·‖1_A‖)` if `upper`, else `(min|a_n|·‖1_A‖)/‖x‖`, with `A = supp x`.
    Ul { x: Vector, upper: bool },
    /// `‖T_α x‖/‖x‖`
    Truncation { x: Vector, alpha: f64 },
    /// `‖1_A‖/‖1_B‖` in the two-weight space from class counts alone, for
    /// configurations too wide to materialize.
    TwoWeightCounts {
        span: usize,
        a_marked: usize,
        a_unmarked: usize,
        b_marked: usize,
        b_unmarked: usize,
    },
}

pub(crate) fn greedy_parts<N: Norm + ?Sized>(
    norm: &N,
    x: &Vector,
    set: &IndexSet,
    remainder: bool,
) -> (f64, f64) {
    let part = if remainder {
        project_complement(x, set)
    } else {
        project(x, set)
    };
    (norm.norm(&part), norm.norm(x))
}

pub(crate) fn perturbed<N: Norm + ?Sized>(norm: &N, x: &Vector, signs: &SignPattern) -> f64 {
    let bump = indicator(&signs.domain(), Some(signs)).expect("pattern matches its domain");
    norm.norm(&x.add(&bump))
}

pub(crate) fn reformulated_den<N: Norm + ?Sized>(
    norm: &N,
    x: &Vector,
    a: &IndexSet,
    eps: &SignPattern,
) -> f64 {
    perturbed(norm, &project_complement(x, a), eps)
}

pub(crate) fn with_unit<N: Norm + ?Sized>(norm: &N, x: &Vector, n: usize, sign: Sign) -> f64 {
    norm.norm(&x.add(&Vector::unit(n).scale(sign.value())))
}

pub(crate) fn ul_ratio<N: Norm + ?Sized>(norm: &N, x: &Vector, upper: bool) -> Option<f64> {
    let nx = norm.norm(x);
    let ones = norm.norm(&indicator(&x.support(), None).expect("plain indicator"));
    if upper {
        ratio(nx, sup_norm(x) * ones)
    } else {
        let least = x
            .entries()
            .iter()
            .fold(f64::INFINITY, |m, &(_, c)| m.min(c.abs()));
        ratio(least * ones, nx)
    }
}

pub(crate) fn truncation_ratio<N: Norm + ?Sized>(norm: &N, x: &Vector, alpha: f64) -> Option<f64> {
    let t = truncate(x, alpha).ok()?;
    ratio(norm.norm(&t), norm.norm(x))
}

impl Witness {
    /// Re-evaluates the ratio this witness attains; `None` means `positive/0`.
    pub fn ratio<N: Norm + ?Sized>(&self, norm: &N) -> Option<f64> {
        match self {
            Witness::Greedy {
                x,
                greedy_set,
                remainder,
                ..
            } => {
                let (num, den) = greedy_parts(norm, x, greedy_set, *remainder);
                ratio(num, den)
            }
            Witness::Competitor {
                x,
                greedy_set,
                competitor,
                ..
            } => ratio(
                norm.norm(&project_complement(x, greedy_set)),
                norm.norm(&project_complement(x, competitor)),
            ),
            Witness::SetPair { a, b } => ratio(
                norm.norm(&indicator(a, None).ok()?),
                norm.norm(&indicator(b, None).ok()?),
            ),
            Witness::Perturbation { x, eps, delta } => {
                ratio(perturbed(norm, x, eps), perturbed(norm, x, delta))
            }
            Witness::Reformulated { x, a, eps } => {
                ratio(norm.norm(x), reformulated_den(norm, x, a, eps))
            }
            Witness::UnitAppend { x, k } => ratio(norm.norm(x), with_unit(norm, x, *k, Sign::Plus)),
            Witness::UnitSwap { x, j, s, k, t } => {
                ratio(with_unit(norm, x, *k, *t), with_unit(norm, x, *j, *s))
            }
            Witness::Ul { x, upper } => ul_ratio(norm, x, *upper),
            Witness::Truncation { x, alpha } => truncation_ratio(norm, x, *alpha),
            Witness::TwoWeightCounts {
                a_marked,
                a_unmarked,
                b_marked,
                b_unmarked,
                ..
            } => ratio(
                counterexample_indicator_norm(*a_marked, *a_unmarked),
                counterexample_indicator_norm(*b_marked, *b_unmarked),
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{LpExponent, SpaceSpec};

    fn set(items: &[usize]) -> IndexSet {
        IndexSet::new(items.iter().copied()).unwrap()
    }

    #[test]
    fn set_pair_in_two_weight_space() {
        let w = Witness::SetPair {
            a: set(&[4, 8]),
            b: set(&[3, 5]),
        };
        let r = w.ratio(&SpaceSpec::counterexample(12)).unwrap();
        assert!((r - (1.0 + 1.0 / 2f64.sqrt()) / 1.5).abs() < 1e-15);
        let c = Witness::TwoWeightCounts {
            span: 5,
            a_marked: 2,
            a_unmarked: 0,
            b_marked: 0,
            b_unmarked: 2,
        };
        assert_eq!(c.ratio(&SpaceSpec::counterexample(12)), Some(r));
    }

    #[test]
    fn conventions_reach_witnesses() {
        let l1 = SpaceSpec::lp(LpExponent::One, 8);
        let x = Vector::unit(1);
        let zero_over_zero = Witness::Competitor {
            x: x.clone(),
            m: 1,
            greedy_set: set(&[1]),
            competitor: set(&[1]),
            kind: SigmaKind::Check,
        };
        assert_eq!(zero_over_zero.ratio(&l1), Some(1.0));
        let unbounded = Witness::Competitor {
            x,
            m: 1,
            greedy_set: IndexSet::empty(),
            competitor: set(&[1]),
            kind: SigmaKind::Check,
        };
        assert_eq!(unbounded.ratio(&l1), None);
    }

    #[test]
    fn json_round_trip() {
        let w = Witness::UnitSwap {
            x: Vector::from_entries([(1, 0.5)]).unwrap(),
            j: 2,
            s: Sign::Minus,
            k: 3,
            t: Sign::Plus,
        };
        let text = serde_json::to_string(&w).unwrap();
        assert!(text.contains("\"type\":\"unit_swap\""));
        assert_eq!(serde_json::from_str::<Witness>(&text).unwrap(), w);
    }
}
