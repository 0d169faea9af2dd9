//! Estimates of the extremal constants.
//!
//! Constants defined through arbitrary vectors are certified lower bounds:
//! the maximum of the defining ratio over a [`SearchFamily`]. The indicator
//! constants (`Δ_rc`, `Δ_c`, `Δ_{λ,rc}`) are computed exactly over all pairs
//! of subsets of `[1..N]`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, LabError, Result};
use crate::family::{subsets_up_to, SearchFamily};
use crate::greedy::{enumerate_greedy_sets, project_complement};
use crate::lambda::Lambda;
use crate::report::{CheckLeg, CheckReport};
use crate::search::{par_max, MaxRatio};
use crate::sigma::{sigma, sigma_value, SigmaKind};
use crate::space::{
    indicator, span_length, surrounds, IndexSet, IndicatorModel, Norm, Sign, SignPattern,
    SpaceSpec, Vector,
};
use crate::witness::{greedy_parts, perturbed, reformulated_den, with_unit, Witness};

/// Largest `N` for which the subset-mask path is used on spaces without an
/// indicator model.
pub const MASK_PATH_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ConstantName {
    #[serde(rename = "C_q")]
    QuasiGreedy,
    #[serde(rename = "C_l")]
    Suppression,
    #[serde(rename = "Delta_rc")]
    ReverseConservative,
    #[serde(rename = "Delta_c")]
    Conservative,
    #[serde(rename = "Delta_lambda_rc")]
    LambdaReverseConservative,
    #[serde(rename = "Delta_lambda_rpl")]
    Rpslc,
    #[serde(rename = "C_lambda_rp")]
    RpgII,
    #[serde(rename = "C_rpg")]
    Rpg,
    #[serde(rename = "C_pg")]
    Pg,
    #[serde(rename = "C_rpg_interval")]
    RpgInterval,
    #[serde(rename = "C_pg_interval")]
    PgInterval,
}

impl ConstantName {
    pub const ALL: [ConstantName; 11] = [
        ConstantName::QuasiGreedy,
        ConstantName::Suppression,
        ConstantName::ReverseConservative,
        ConstantName::Conservative,
        ConstantName::LambdaReverseConservative,
        ConstantName::Rpslc,
        ConstantName::RpgII,
        ConstantName::Rpg,
        ConstantName::Pg,
        ConstantName::RpgInterval,
        ConstantName::PgInterval,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ConstantName::QuasiGreedy => "C_q",
            ConstantName::Suppression => "C_l",
            ConstantName::ReverseConservative => "Delta_rc",
            ConstantName::Conservative => "Delta_c",
            ConstantName::LambdaReverseConservative => "Delta_lambda_rc",
            ConstantName::Rpslc => "Delta_lambda_rpl",
            ConstantName::RpgII => "C_lambda_rp",
            ConstantName::Rpg => "C_rpg",
            ConstantName::Pg => "C_pg",
            ConstantName::RpgInterval => "C_rpg_interval",
            ConstantName::PgInterval => "C_pg_interval",
        }
    }

    /// Indicator constants are reported unclamped; the others are at least 1.
    pub fn is_indicator_constant(&self) -> bool {
        matches!(
            self,
            ConstantName::ReverseConservative
                | ConstantName::Conservative
                | ConstantName::LambdaReverseConservative
        )
    }

    pub fn uses_lambda(&self) -> bool {
        matches!(
            self,
            ConstantName::LambdaReverseConservative | ConstantName::Rpslc | ConstantName::RpgII
        )
    }
}

impl fmt::Display for ConstantName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConstantName {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        ConstantName::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| {
                let valid: Vec<&str> = ConstantName::ALL.iter().map(|c| c.as_str()).collect();
                LabError::Config(format!(
                    "unknown constant {s:?}; valid names: {}",
                    valid.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantEstimate {
    pub name: ConstantName,
    pub space: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Lambda>,
    /// `max(1, max_ratio)`, or `max_ratio` itself for indicator constants.
    pub value: f64,
    /// Largest finite ratio met; the witness attains exactly this.
    pub max_ratio: f64,
    pub witness: Option<Witness>,
    /// First tuple whose ratio was `positive/0`; the constant is then infinite.
    pub unbounded_witness: Option<Witness>,
    pub exact: bool,
    pub tuples_searched: u64,
    pub family: SearchFamily,
}

impl ConstantEstimate {
    pub fn is_bounded(&self) -> bool {
        self.unbounded_witness.is_none()
    }

    /// `value`, or `+∞` when an unbounded witness was found.
    pub fn effective_value(&self) -> f64 {
        if self.is_bounded() {
            self.value
        } else {
            f64::INFINITY
        }
    }

    fn from_search(
        name: ConstantName,
        space: &SpaceSpec,
        lambda: Option<Lambda>,
        family: SearchFamily,
        acc: MaxRatio<Witness>,
        exact: bool,
    ) -> Self {
        let (max_ratio, witness) = match acc.best {
            Some((r, _, w)) => (r, Some(w)),
            None => (0.0, None),
        };
        ConstantEstimate {
            name,
            space: space.name.clone(),
            lambda,
            value: if name.is_indicator_constant() {
                max_ratio
            } else {
                max_ratio.max(1.0)
            },
            max_ratio,
            witness,
            unbounded_witness: acc.unbounded.map(|u| u.1),
            exact,
            tuples_searched: acc.tuples,
            family,
        }
    }
}

fn require_lambda_at_least_one(lambda: Lambda) -> Result<()> {
    if lambda.at_least_one() {
        Ok(())
    } else {
        invalid(format!("lambda must be at least 1, got {lambda}"))
    }
}

/// Runs `visit` on every nonzero family vector (plus `0` first when
/// `with_zero`), one work item per support.
pub(crate) fn over_family<F>(
    family: &SearchFamily,
    unit_ball: bool,
    with_zero: bool,
    visit: F,
) -> Result<MaxRatio<Witness>>
where
    F: Fn(&Vector, &mut MaxRatio<Witness>) -> Result<()> + Sync,
{
    family.validate()?;
    let supports = family.supports();
    let offset = usize::from(with_zero);
    par_max(supports.len() + offset, |i, acc| {
        if i < offset {
            return visit(&Vector::zero(), acc);
        }
        family.try_for_each_vector_on(&supports[i - offset], unit_ball, |x| visit(x, acc))
    })
}

fn greedy_search(
    space: &SpaceSpec,
    family: &SearchFamily,
    remainder: bool,
) -> Result<MaxRatio<Witness>> {
    over_family(family, false, false, |x, acc| {
        for m in 1..=x.support_len() {
            for set in &enumerate_greedy_sets(x, m, family.ambient_cap)?.sets {
                let (num, den) = greedy_parts(space, x, set, remainder);
                acc.offer(num, den, || Witness::Greedy {
                    x: x.clone(),
                    m,
                    greedy_set: set.clone(),
                    remainder,
                });
            }
        }
        Ok(())
    })
}

/// `C_q`: max of `‖P_Λ x‖/‖x‖` over `Λ ∈ G(x, m)`, `m ≤ |supp x|`.
pub fn estimate_quasi_greedy(space: &SpaceSpec, family: &SearchFamily) -> Result<ConstantEstimate> {
    let acc = greedy_search(space, family, false)?;
    Ok(ConstantEstimate::from_search(
        ConstantName::QuasiGreedy,
        space,
        None,
        family.constrained("greedy sets G(x,m), m <= |supp x|"),
        acc,
        false,
    ))
}

/// `C_ℓ`: max of `‖x − P_Λ x‖/‖x‖` over `Λ ∈ G(x, m)`, `m ≤ |supp x|`.
pub fn estimate_suppression(space: &SpaceSpec, family: &SearchFamily) -> Result<ConstantEstimate> {
    let acc = greedy_search(space, family, true)?;
    Ok(ConstantEstimate::from_search(
        ConstantName::Suppression,
        space,
        None,
        family.constrained("greedy sets G(x,m), m <= |supp x|"),
        acc,
        false,
    ))
}

/// Max of `‖x − P_Λ x‖ / σ(x)` over `Λ ∈ G(x, ⌈λm⌉)`, with `σ` the
/// functional of `kind` at budget `m`.
///
/// Only `⌈λm⌉ ≤ |supp x|` is visited: larger greedy sets contain the whole
/// support, so the numerator vanishes and the ratio is 0 or 1.
fn competitor_search(
    space: &SpaceSpec,
    family: &SearchFamily,
    kind: SigmaKind,
    lambda: Lambda,
) -> Result<MaxRatio<Witness>> {
    require_lambda_at_least_one(lambda)?;
    over_family(family, false, false, |x, acc| {
        let k = x.support_len();
        let mut m = 1;
        while lambda.ceil_mul(m) <= k {
            for set in &enumerate_greedy_sets(x, lambda.ceil_mul(m), family.ambient_cap)?.sets {
                let num = space.norm(&project_complement(x, set));
                let den = sigma_value(kind, x, set, m, space);
                acc.offer(num, den, || Witness::Competitor {
                    x: x.clone(),
                    m,
                    greedy_set: set.clone(),
                    competitor: sigma(kind, x, set, m, space).minimizer,
                    kind,
                });
            }
            m += 1;
        }
        Ok(())
    })
}

fn competitor_estimate(
    name: ConstantName,
    space: &SpaceSpec,
    family: &SearchFamily,
    kind: SigmaKind,
    lambda: Lambda,
) -> Result<ConstantEstimate> {
    let acc = competitor_search(space, family, kind, lambda)?;
    let constraint =
        format!("greedy sets G(x, ceil({lambda}*m)) against {kind} competitors of budget m");
    Ok(ConstantEstimate::from_search(
        name,
        space,
        name.uses_lambda().then_some(lambda),
        family.constrained(&constraint),
        acc,
        false,
    ))
}

/// `C_{λ,rp}`: greedy sets of size `⌈λm⌉` against intervals of length `≤ m`
/// reaching `max Λ`.
pub fn estimate_rpg_ii(
    space: &SpaceSpec,
    lambda: Lambda,
    family: &SearchFamily,
) -> Result<ConstantEstimate> {
    competitor_estimate(ConstantName::RpgII, space, family, SigmaKind::Check, lambda)
}

/// Greedy remainders against arbitrary sets of size `≤ m` right of `Λ`.
pub fn estimate_rpg(space: &SpaceSpec, family: &SearchFamily) -> Result<ConstantEstimate> {
    competitor_estimate(
        ConstantName::Rpg,
        space,
        family,
        SigmaKind::Reverse,
        Lambda::ONE,
    )
}

/// Greedy remainders against initial segments of length `≤ m`.
pub fn estimate_pg(space: &SpaceSpec, family: &SearchFamily) -> Result<ConstantEstimate> {
    competitor_estimate(
        ConstantName::Pg,
        space,
        family,
        SigmaKind::PgTail,
        Lambda::ONE,
    )
}

/// The `λ = 1` case of [`estimate_rpg_ii`].
pub fn estimate_rpg_interval(space: &SpaceSpec, family: &SearchFamily) -> Result<ConstantEstimate> {
    competitor_estimate(
        ConstantName::RpgInterval,
        space,
        family,
        SigmaKind::Check,
        Lambda::ONE,
    )
}

/// Greedy remainders against intervals of length `≤ m` starting at or before `min Λ`.
pub fn estimate_pg_interval(space: &SpaceSpec, family: &SearchFamily) -> Result<ConstantEstimate> {
    competitor_estimate(
        ConstantName::PgInterval,
        space,
        family,
        SigmaKind::Hat,
        Lambda::ONE,
    )
}

/// Where the partner set `B` sits relative to `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairOrder {
    /// `B < A`
    PartnerBefore,
    /// `A < B`
    PartnerAfter,
}

/// How the exact set-pair maximum is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairMethod {
    /// Class counts when the space has an indicator model, masks otherwise.
    Auto,
    /// Every subset of `[1..N]` as a bit mask; `N ≤ 20`.
    Masks,
    /// Class counts; needs an indicator model.
    Counts,
}

/// Exact max of `‖1_A‖/‖1_B‖` over nonempty `A, B ⊆ [1..n]` on the given
/// side of each other with `|B| ≥ ⌈(λ−1)s(A)⌉ + |A|`.
pub fn set_pair_max(
    space: &SpaceSpec,
    n: usize,
    lambda: Lambda,
    order: PairOrder,
    method: PairMethod,
) -> Result<(MaxRatio<Witness>, bool)> {
    require_lambda_at_least_one(lambda)?;
    if n == 0 {
        return invalid("N must be at least 1");
    }
    let model = space.indicator_model();
    match (method, model) {
        (PairMethod::Counts, None) => invalid(format!(
            "space {:?} has no count-based indicator model",
            space.name
        )),
        (PairMethod::Counts, Some(model)) | (PairMethod::Auto, Some(model)) => {
            Ok((pair_max_counts(model, n, lambda, order, &|_, _| true), true))
        }
        (PairMethod::Masks, _) | (PairMethod::Auto, None) => {
            if n > MASK_PATH_LIMIT {
                return invalid(format!(
                    "exact set-pair search on {:?} needs N <= {MASK_PATH_LIMIT}, got {n}",
                    space.name
                ));
            }
            Ok((pair_max_masks(space, n, lambda, order), true))
        }
    }
}

#[derive(Clone, Copy)]
struct Partner {
    norm: f64,
    marked: usize,
    unmarked: usize,
    mask: u64,
}

fn pair_max_masks(
    space: &SpaceSpec,
    n: usize,
    lambda: Lambda,
    order: PairOrder,
) -> MaxRatio<Witness> {
    let full = 1u64 << n;
    let norms: Vec<f64> = (0..full)
        .into_par_iter()
        .map(|mask| {
            space.norm(&indicator(&IndexSet::from_mask(mask), None).expect("plain indicator"))
        })
        .collect();
    let lowest = |mask: u64| mask.trailing_zeros() as usize + 1;
    let highest = |mask: u64| 64 - mask.leading_zeros() as usize;

    // best[r][k]: smallest ‖1_B‖ with |B| = k and B inside region r, where
    // region r is [1..r] before A or [r..n] after A
    let mut best: Vec<Vec<Option<Partner>>> = vec![vec![None; n + 1]; n + 2];
    let better = |slot: &Option<Partner>, v: f64| slot.is_none_or(|p| v < p.norm);
    for mask in 1..full {
        let k = mask.count_ones() as usize;
        let v = norms[mask as usize];
        let regions = match order {
            PairOrder::PartnerBefore => highest(mask)..=n,
            PairOrder::PartnerAfter => 1..=lowest(mask),
        };
        for r in regions {
            if better(&best[r][k], v) {
                best[r][k] = Some(Partner {
                    norm: v,
                    marked: 0,
                    unmarked: k,
                    mask,
                });
            }
        }
    }
    for row in best.iter_mut() {
        for k in (1..n).rev() {
            if let Some(p) = row[k + 1] {
                if better(&row[k], p.norm) {
                    row[k] = Some(p);
                }
            }
        }
    }

    let mut acc = MaxRatio::new(0);
    for a in 1..full {
        let (lo, hi) = (lowest(a), highest(a));
        let need = lambda.min_partner_size(hi - lo + 1, a.count_ones() as usize);
        let region = match order {
            PairOrder::PartnerBefore => lo - 1,
            PairOrder::PartnerAfter => hi + 1,
        };
        if need > n || region == 0 || region > n {
            continue;
        }
        if let Some(p) = best[region][need] {
            acc.offer(norms[a as usize], p.norm, || Witness::SetPair {
                a: IndexSet::from_mask(a),
                b: IndexSet::from_mask(p.mask),
            });
        }
    }
    acc
}

/// Class-count search; `keep(marked, unmarked)` filters the sets `A`.
pub(crate) fn pair_max_counts(
    model: IndicatorModel,
    n: usize,
    lambda: Lambda,
    order: PairOrder,
    keep: &dyn Fn(usize, usize) -> bool,
) -> MaxRatio<Witness> {
    let marked: Vec<bool> = (0..=n + 1)
        .map(|i| i >= 1 && i <= n && model.is_marked(i))
        .collect();
    // prefix[i] = marked indices in [1..i]
    let mut prefix = vec![0usize; n + 2];
    for i in 1..=n + 1 {
        prefix[i] = prefix[i - 1] + usize::from(marked[i]);
    }
    let region_counts = |r: usize| -> (usize, usize) {
        let (lo, hi) = match order {
            PairOrder::PartnerBefore => (1, r),
            PairOrder::PartnerAfter => (r, n),
        };
        if lo == 0 || lo > hi {
            return (0, 0);
        }
        let m = prefix[hi] - prefix[lo - 1];
        (m, hi - lo + 1 - m)
    };
    let partners: Vec<Vec<Option<Partner>>> = (0..=n + 1)
        .map(|r| {
            let (pm, pu) = region_counts(r);
            (0..=n)
                .map(|need| {
                    let mut best: Option<Partner> = None;
                    if need == 0 || need > pm + pu {
                        return None;
                    }
                    for bm in need.saturating_sub(pu)..=pm.min(need) {
                        let v = model.indicator_norm(bm, need - bm);
                        if best.is_none_or(|p| v < p.norm) {
                            best = Some(Partner {
                                norm: v,
                                marked: bm,
                                unmarked: need - bm,
                                mask: 0,
                            });
                        }
                    }
                    best
                })
                .collect()
        })
        .collect();

    let pick =
        |range: std::ops::RangeInclusive<usize>, want_marked: usize, want_unmarked: usize| {
            let mut out = Vec::new();
            let (mut wm, mut wu) = (want_marked, want_unmarked);
            for i in range {
                if marked[i] && wm > 0 {
                    wm -= 1;
                    out.push(i);
                } else if !marked[i] && wu > 0 {
                    wu -= 1;
                    out.push(i);
                }
            }
            out
        };

    let mut acc = MaxRatio::new(0);
    for lo in 1..=n {
        for hi in lo..=n {
            let region = match order {
                PairOrder::PartnerBefore => lo - 1,
                PairOrder::PartnerAfter => hi + 1,
            };
            let ends_marked =
                usize::from(marked[lo]) + if hi > lo { usize::from(marked[hi]) } else { 0 };
            let ends = if hi > lo { 2 } else { 1 };
            let inner_marked = if hi > lo + 1 {
                prefix[hi - 1] - prefix[lo]
            } else {
                0
            };
            let inner_unmarked = hi.saturating_sub(lo + 1) - inner_marked;
            for im in 0..=inner_marked {
                for iu in 0..=inner_unmarked {
                    let am = ends_marked + im;
                    let au = ends - ends_marked + iu;
                    let need = lambda.min_partner_size(hi - lo + 1, am + au);
                    if need > n || !keep(am, au) {
                        continue;
                    }
                    let Some(p) = partners[region][need] else {
                        continue;
                    };
                    acc.offer(model.indicator_norm(am, au), p.norm, || {
                        let mut a = vec![lo];
                        if hi > lo {
                            a.extend(pick(lo + 1..=hi - 1, im, iu));
                            a.push(hi);
                        }
                        let b_range = match order {
                            PairOrder::PartnerBefore => 1..=region,
                            PairOrder::PartnerAfter => region..=n,
                        };
                        Witness::SetPair {
                            a: IndexSet::from_sorted_unchecked(a),
                            b: IndexSet::from_sorted_unchecked(pick(b_range, p.marked, p.unmarked)),
                        }
                    });
                }
            }
        }
    }
    acc
}

fn set_pair_estimate(
    name: ConstantName,
    space: &SpaceSpec,
    n: usize,
    lambda: Lambda,
    order: PairOrder,
) -> Result<ConstantEstimate> {
    if n > space.ambient_cap {
        return invalid(format!(
            "N = {n} exceeds the ambient cap {} of {:?}",
            space.ambient_cap, space.name
        ));
    }
    let (acc, exact) = set_pair_max(space, n, lambda, order, PairMethod::Auto)?;
    let constraint = match (order, lambda.is_one()) {
        (PairOrder::PartnerBefore, true) => "B < A, |A| <= |B|".to_string(),
        (PairOrder::PartnerAfter, true) => "A < B, |A| <= |B|".to_string(),
        (PairOrder::PartnerBefore, false) => format!("B < A, ({lambda} - 1) s(A) + |A| <= |B|"),
        (PairOrder::PartnerAfter, false) => format!("A < B, ({lambda} - 1) s(A) + |A| <= |B|"),
    };
    let family = SearchFamily::standard()
        .with_ambient_cap(n)
        .with_support_size_max(n)
        .with_set_size_max(n)
        .with_grid(vec![1.0])
        .constrained(&format!("all nonempty A, B in [1..{n}] with {constraint}"));
    Ok(ConstantEstimate::from_search(
        name,
        space,
        name.uses_lambda().then_some(lambda),
        family,
        acc,
        exact,
    ))
}

/// `Δ_rc` over `[1..n]`: `B < A`, `|A| ≤ |B|`.
pub fn estimate_reverse_conservative(space: &SpaceSpec, n: usize) -> Result<ConstantEstimate> {
    set_pair_estimate(
        ConstantName::ReverseConservative,
        space,
        n,
        Lambda::ONE,
        PairOrder::PartnerBefore,
    )
}

/// `Δ_c` over `[1..n]`: `A < B`, `|A| ≤ |B|`.
pub fn estimate_conservative(space: &SpaceSpec, n: usize) -> Result<ConstantEstimate> {
    set_pair_estimate(
        ConstantName::Conservative,
        space,
        n,
        Lambda::ONE,
        PairOrder::PartnerAfter,
    )
}

/// `Δ_{λ,rc}` over `[1..n]`: `B < A`, `(λ−1)s(A) + |A| ≤ |B|`.
pub fn estimate_lambda_reverse_conservative(
    space: &SpaceSpec,
    lambda: Lambda,
    n: usize,
) -> Result<ConstantEstimate> {
    set_pair_estimate(
        ConstantName::LambdaReverseConservative,
        space,
        n,
        lambda,
        PairOrder::PartnerBefore,
    )
}

/// Index-set pairs `(A, B)` with `B ≠ ∅`, `B < A` and the λ-size constraint.
struct PerturbationPairs {
    sets: Vec<IndexSet>,
    pairs: Vec<(usize, usize)>,
}

impl PerturbationPairs {
    fn new(family: &SearchFamily, lambda: Lambda) -> Self {
        let sets = subsets_up_to(family.ambient_cap, family.set_size_max);
        let mut pairs = Vec::new();
        for (ia, a) in sets.iter().enumerate() {
            for (ib, b) in sets.iter().enumerate() {
                if !b.is_empty()
                    && b.lies_before(a)
                    && lambda.admits(span_length(a), a.len(), b.len())
                {
                    pairs.push((ia, ib));
                }
            }
        }
        PerturbationPairs { sets, pairs }
    }

    /// For each admissible partner `B` (disjoint from `supp x`): the smallest
    /// `‖x + 1_{δB}‖` and its sign pattern.
    fn partner_minima<N: Norm + ?Sized>(
        &self,
        norm: &N,
        x: &Vector,
    ) -> Vec<Option<(f64, SignPattern)>> {
        let support = x.support();
        self.sets
            .iter()
            .map(|b| {
                if b.is_empty() || !b.is_disjoint(&support) {
                    return None;
                }
                let mut best: Option<(f64, SignPattern)> = None;
                for delta in SignPattern::all_patterns(b) {
                    let v = perturbed(norm, x, &delta);
                    if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
                        best = Some((v, delta));
                    }
                }
                best
            })
            .collect()
    }
}

/// `Δ_{λ,rpl}`: max of `‖x + 1_{εA}‖/‖x + 1_{δB}‖` over `‖x‖_∞ ≤ 1`
/// (including `x = 0`), `B ∩ supp x = ∅`, `B < A`, `x` surrounding `A` and
/// `(λ−1)s(A) + |A| ≤ |B|`.
///
/// The max over sign pairs equals `max_ε / min_δ`, which is how it is computed.
pub fn estimate_rpslc(
    space: &SpaceSpec,
    lambda: Lambda,
    family: &SearchFamily,
) -> Result<ConstantEstimate> {
    require_lambda_at_least_one(lambda)?;
    let scan = PerturbationPairs::new(family, lambda);
    let acc = over_family(family, true, true, |x, acc| {
        let tops: Vec<Option<(f64, SignPattern)>> = scan
            .sets
            .iter()
            .map(|a| {
                if !surrounds(x, a) {
                    return None;
                }
                let mut best: Option<(f64, SignPattern)> = None;
                for eps in SignPattern::all_patterns(a) {
                    let v = perturbed(space, x, &eps);
                    if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
                        best = Some((v, eps));
                    }
                }
                best
            })
            .collect();
        let bottoms = scan.partner_minima(space, x);
        for &(ia, ib) in &scan.pairs {
            if let (Some((num, eps)), Some((den, delta))) = (&tops[ia], &bottoms[ib]) {
                acc.tuples += (1u64 << (scan.sets[ia].len() + scan.sets[ib].len())) - 1;
                acc.offer(*num, *den, || Witness::Perturbation {
                    x: x.clone(),
                    eps: eps.clone(),
                    delta: delta.clone(),
                });
            }
        }
        Ok(())
    })?;
    Ok(ConstantEstimate::from_search(
        ConstantName::Rpslc,
        space,
        Some(lambda),
        family.constrained(&format!(
            "|x|_inf <= 1 incl. x = 0; B disjoint from supp x, B < A, x surrounds A, ({lambda} - 1) s(A) + |A| <= |B|"
        )),
        acc,
        false,
    ))
}

/// The reformulated perturbation constant: max of `‖x‖/‖x − P_A x + 1_{εB}‖`
/// where `y = x − P_A x` is a family vector with `‖y‖_∞ ≤ 1` surrounding `A`,
/// the entries of `x` on `A` range over `{0, ±1} ∪ ±grid∩(0,1]`, and
/// `B ∩ supp y = ∅`, `B < A`, `(λ−1)s(A) + |A| ≤ |B|`.
pub fn estimate_rpslc_reformulated(
    space: &SpaceSpec,
    lambda: Lambda,
    family: &SearchFamily,
) -> Result<ConstantEstimate> {
    require_lambda_at_least_one(lambda)?;
    let scan = PerturbationPairs::new(family, lambda);
    let mut fills = vec![0.0, 1.0, -1.0];
    for g in family.magnitudes(true) {
        if g < 1.0 {
            fills.push(g);
            fills.push(-g);
        }
    }
    let acc = over_family(family, true, true, |y, acc| {
        let tops: Vec<Option<(f64, Vector, u64)>> = scan
            .sets
            .iter()
            .map(|a| {
                if !surrounds(y, a) {
                    return None;
                }
                let mut best: Option<(f64, Vector, u64)> = None;
                let mut digits = vec![0usize; a.len()];
                let mut count = 0u64;
                loop {
                    let fill: Vec<(usize, f64)> = a
                        .iter()
                        .zip(&digits)
                        .map(|(n, &d)| (n, fills[d]))
                        .filter(|&(_, c)| c != 0.0)
                        .collect();
                    let x = y.add(&Vector::from_sorted_unchecked(fill));
                    let v = space.norm(&x);
                    count += 1;
                    if best.as_ref().is_none_or(|(bv, _, _)| v > *bv) {
                        best = Some((v, x, 0));
                    }
                    let mut pos = digits.len();
                    let mut done = true;
                    while pos > 0 {
                        pos -= 1;
                        digits[pos] += 1;
                        if digits[pos] < fills.len() {
                            done = false;
                            break;
                        }
                        digits[pos] = 0;
                    }
                    if done {
                        break;
                    }
                }
                best.map(|(v, x, _)| (v, x, count))
            })
            .collect();
        let bottoms = scan.partner_minima(space, y);
        for &(ia, ib) in &scan.pairs {
            if let (Some((num, x, fills_tried)), Some((den, eps))) = (&tops[ia], &bottoms[ib]) {
                acc.tuples += fills_tried * (1u64 << scan.sets[ib].len()) - 1;
                acc.offer(*num, *den, || Witness::Reformulated {
                    x: x.clone(),
                    a: scan.sets[ia].clone(),
                    eps: eps.clone(),
                });
            }
        }
        Ok(())
    })?;
    debug_assert!(acc
        .best
        .as_ref()
        .is_none_or(|(r, _, w)| w.ratio(space) == Some(*r)));
    Ok(ConstantEstimate::from_search(
        ConstantName::Rpslc,
        space,
        Some(lambda),
        family.constrained(&format!(
            "x - P_A x has |.|_inf <= 1 and surrounds A; B disjoint from its support, B < A, ({lambda} - 1) s(A) + |A| <= |B|"
        )),
        acc,
        false,
    ))
}

/// The denominator used by [`estimate_rpslc_reformulated`], exposed for tests.
pub fn reformulated_ratio_parts<N: Norm + ?Sized>(
    norm: &N,
    x: &Vector,
    a: &IndexSet,
    eps: &SignPattern,
) -> (f64, f64) {
    (norm.norm(x), reformulated_den(norm, x, a, eps))
}

/// Default `λ` for constants and checks that take one.
pub fn default_lambda() -> Lambda {
    Lambda::integer(2).expect("2 is a valid lambda")
}

/// Estimates any named constant; set-pair constants use `N = family.ambient_cap`.
pub fn estimate(
    name: ConstantName,
    space: &SpaceSpec,
    lambda: Option<Lambda>,
    family: &SearchFamily,
) -> Result<ConstantEstimate> {
    let lambda = lambda.unwrap_or_else(default_lambda);
    match name {
        ConstantName::QuasiGreedy => estimate_quasi_greedy(space, family),
        ConstantName::Suppression => estimate_suppression(space, family),
        ConstantName::ReverseConservative => {
            estimate_reverse_conservative(space, family.ambient_cap)
        }
        ConstantName::Conservative => estimate_conservative(space, family.ambient_cap),
        ConstantName::LambdaReverseConservative => {
            estimate_lambda_reverse_conservative(space, lambda, family.ambient_cap)
        }
        ConstantName::Rpslc => estimate_rpslc(space, lambda, family),
        ConstantName::RpgII => estimate_rpg_ii(space, lambda, family),
        ConstantName::Rpg => estimate_rpg(space, family),
        ConstantName::Pg => estimate_pg(space, family),
        ConstantName::RpgInterval => estimate_rpg_interval(space, family),
        ConstantName::PgInterval => estimate_pg_interval(space, family),
    }
}

type CacheKey = (ConstantName, Option<(u64, u64)>, String);

/// Memoized [`estimate`] results for one space, keyed by constant, `λ` and family.
#[derive(Debug, Default)]
pub struct EstimateCache {
    entries: Mutex<BTreeMap<CacheKey, ConstantEstimate>>,
}

impl EstimateCache {
    pub fn get(
        &self,
        name: ConstantName,
        space: &SpaceSpec,
        lambda: Option<Lambda>,
        family: &SearchFamily,
    ) -> Result<ConstantEstimate> {
        let lambda = name
            .uses_lambda()
            .then(|| lambda.unwrap_or_else(default_lambda));
        let key = (
            name,
            lambda.map(|l| (l.numerator(), l.denominator())),
            serde_json::to_string(family)?,
        );
        if let Some(hit) = self.entries.lock().expect("cache lock").get(&key) {
            return Ok(hit.clone());
        }
        let est = estimate(name, space, lambda, family)?;
        self.entries
            .lock()
            .expect("cache lock")
            .insert(key, est.clone());
        Ok(est)
    }
}

/// Checks `‖x‖ ≤ ‖x + e_k‖` and `‖x + t e_k‖ ≤ ‖x + s e_j‖` for `‖x‖_∞ ≤ 1`
/// (including `x = 0`), `j < k` outside `supp x` in `[1..ambient_cap]`, and all signs.
pub fn check_unit_insertion(space: &SpaceSpec, family: &SearchFamily) -> Result<CheckReport> {
    let cap = family.ambient_cap;
    let outside =
        |x: &Vector| -> Vec<usize> { (1..=cap).filter(|&k| x.coefficient(k) == 0.0).collect() };
    let append = over_family(family, true, true, |x, acc| {
        let nx = space.norm(x);
        for k in outside(x) {
            acc.offer(nx, with_unit(space, x, k, Sign::Plus), || {
                Witness::UnitAppend { x: x.clone(), k }
            });
        }
        Ok(())
    })?;
    let swap = over_family(family, true, true, |x, acc| {
        let free = outside(x);
        let signs = [Sign::Plus, Sign::Minus];
        let values: Vec<[f64; 2]> = free
            .iter()
            .map(|&n| signs.map(|s| with_unit(space, x, n, s)))
            .collect();
        for (pj, &j) in free.iter().enumerate() {
            for (pk, &k) in free.iter().enumerate().skip(pj + 1) {
                for (ti, &t) in signs.iter().enumerate() {
                    for (si, &s) in signs.iter().enumerate() {
                        acc.offer(values[pk][ti], values[pj][si], || Witness::UnitSwap {
                            x: x.clone(),
                            j,
                            s,
                            k,
                            t,
                        });
                    }
                }
            }
        }
        Ok(())
    })?;
    let leg = |name: &str, acc: MaxRatio<Witness>| {
        let (worst, witness) = match (acc.unbounded, acc.best) {
            (Some((_, w)), _) => (f64::INFINITY, Some(w)),
            (None, Some((r, _, w))) => (r, Some(w)),
            (None, None) => (0.0, None),
        };
        CheckLeg::inequality(name, worst, 1.0, "1", witness)
    };
    Ok(CheckReport::from_legs(
        "unit-insertion",
        family
            .constrained("|x|_inf <= 1 incl. x = 0; j < k outside supp x; s, t = +-1")
            .description(),
        SCOPE_FINITE,
        BTreeMap::new(),
        vec![
            leg("appending a unit vector never decreases the norm", append),
            leg("a later unit vector never outweighs an earlier one", swap),
        ],
    ))
}

pub(crate) const SCOPE_FINITE: &str =
    "finite-family check: every enumerated tuple satisfies the inequality; suprema over the whole space are not certified";

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::LpExponent;

    fn tiny() -> SearchFamily {
        SearchFamily::standard()
            .with_ambient_cap(5)
            .with_support_size_max(3)
    }

    fn set(items: &[usize]) -> IndexSet {
        IndexSet::new(items.iter().copied()).unwrap()
    }

    #[test]
    fn names_round_trip() {
        for c in ConstantName::ALL {
            assert_eq!(c.as_str().parse::<ConstantName>().unwrap(), c);
            assert_eq!(serde_json::to_value(c).unwrap(), c.as_str());
        }
        let err = "C_x".parse::<ConstantName>().unwrap_err().to_string();
        assert!(err.contains("Delta_rc"));
    }

    #[test]
    fn greedy_constants_are_one_on_l1() {
        let l1 = SpaceSpec::lp(LpExponent::One, 12);
        for est in [
            estimate_quasi_greedy(&l1, &tiny()).unwrap(),
            estimate_suppression(&l1, &tiny()).unwrap(),
        ] {
            assert_eq!(est.value, 1.0);
            let w = est.witness.unwrap();
            assert_eq!(w.ratio(&l1), Some(est.max_ratio));
        }
    }

    #[test]
    fn reverse_conservative_examples() {
        let l1 = SpaceSpec::lp(LpExponent::One, 12);
        let e = estimate_reverse_conservative(&l1, 8).unwrap();
        assert_eq!(e.value, 1.0);
        assert!(e.exact);
        let ce = SpaceSpec::counterexample(12);
        let w = Witness::SetPair {
            a: set(&[4, 8]),
            b: set(&[3, 5]),
        };
        let r = w.ratio(&ce).unwrap();
        let e = estimate_reverse_conservative(&ce, 8).unwrap();
        assert!(e.max_ratio >= r);
        assert_eq!(e.witness.unwrap().ratio(&ce), Some(e.max_ratio));
    }

    #[test]
    fn lambda_constraint_skips_short_partners() {
        // A = {10}, B = {1} is inadmissible at λ = 2, so in ℓ∞ nothing beats 1
        let two = Lambda::integer(2).unwrap();
        assert!(!two.admits(1, 1, 1));
        let linf = SpaceSpec::lp(LpExponent::Infinity, 12);
        let e = estimate_lambda_reverse_conservative(&linf, two, 10).unwrap();
        assert_eq!(e.value, 1.0);
        let SetPairShape { a_len, b_len } = shape(e.witness.as_ref().unwrap());
        assert!(b_len >= 2 * a_len);
    }

    struct SetPairShape {
        a_len: usize,
        b_len: usize,
    }

    fn shape(w: &Witness) -> SetPairShape {
        match w {
            Witness::SetPair { a, b } => SetPairShape {
                a_len: a.len(),
                b_len: b.len(),
            },
            other => panic!("unexpected witness {other:?}"),
        }
    }

    #[test]
    fn count_and_mask_paths_agree() {
        let lambdas = [
            Lambda::ONE,
            Lambda::new(3, 2).unwrap(),
            Lambda::integer(2).unwrap(),
        ];
        for space in [
            SpaceSpec::counterexample(12),
            SpaceSpec::mirrored_counterexample(9, 12),
            SpaceSpec::lp(LpExponent::Two, 12),
        ] {
            for n in [1, 5, 11] {
                for lambda in lambdas {
                    for order in [PairOrder::PartnerBefore, PairOrder::PartnerAfter] {
                        let (counts, _) =
                            set_pair_max(&space, n, lambda, order, PairMethod::Counts).unwrap();
                        let (masks, _) =
                            set_pair_max(&space, n, lambda, order, PairMethod::Masks).unwrap();
                        let c = counts.best.as_ref().map(|b| b.0);
                        let m = masks.best.as_ref().map(|b| b.0);
                        assert_eq!(c, m, "{} n={n} λ={lambda} {order:?}", space.name);
                        if let Some((r, _, w)) = &counts.best {
                            assert_eq!(w.ratio(&space), Some(*r));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn weighted_spaces_need_the_mask_path() {
        let inc = SpaceSpec::increasing_weights(30);
        assert!(estimate_reverse_conservative(&inc, 25).is_err());
        let e = estimate_reverse_conservative(&inc, 6).unwrap();
        // weights 1/2, 1, 2, 4, 8, 16: A = {6}, B = {1}
        assert_eq!(e.value, 32.0);
    }

    #[test]
    fn rpslc_on_l1_is_one() {
        let l1 = SpaceSpec::lp(LpExponent::One, 8);
        let f = SearchFamily::compact().with_ambient_cap(6);
        let e = estimate_rpslc(&l1, Lambda::integer(2).unwrap(), &f).unwrap();
        assert_eq!(e.value, 1.0);
        assert_eq!(e.witness.unwrap().ratio(&l1), Some(e.max_ratio));
    }

    #[test]
    fn rpslc_at_zero_matches_set_pairs() {
        // with x = 0 and all-plus signs the ratio is a Δ_{λ,rc} ratio
        let ce = SpaceSpec::counterexample(8);
        let lambda = Lambda::new(3, 2).unwrap();
        let f = SearchFamily::compact()
            .with_ambient_cap(7)
            .with_set_size_max(7);
        let rpl = estimate_rpslc(&ce, lambda, &f).unwrap();
        let rc = estimate_lambda_reverse_conservative(&ce, lambda, 7).unwrap();
        assert!(rpl.max_ratio >= rc.max_ratio);
    }

    #[test]
    fn interval_constants_on_l2_are_one() {
        let l2 = SpaceSpec::lp(LpExponent::Two, 8);
        for est in [
            estimate_rpg(&l2, &tiny()).unwrap(),
            estimate_pg(&l2, &tiny()).unwrap(),
            estimate_rpg_interval(&l2, &tiny()).unwrap(),
            estimate_pg_interval(&l2, &tiny()).unwrap(),
            estimate_rpg_ii(&l2, Lambda::new(3, 2).unwrap(), &tiny()).unwrap(),
        ] {
            assert_eq!(est.value, 1.0, "{}", est.name);
            assert!(est.is_bounded());
        }
    }

    #[test]
    fn unit_insertion_examples() {
        let f = SearchFamily::compact().with_ambient_cap(5);
        for space in [
            SpaceSpec::lp(LpExponent::One, 8),
            SpaceSpec::lp(LpExponent::Two, 8),
        ] {
            assert!(check_unit_insertion(&space, &f).unwrap().status.is_pass());
        }
        let inc = SpaceSpec::increasing_weights(8);
        let r = check_unit_insertion(&inc, &f).unwrap();
        assert!(!r.status.is_pass());
        assert_eq!(r.witness.unwrap().ratio(&inc), Some(r.worst_ratio));
        let dec = SpaceSpec::weighted("dec", vec![1.0, 0.5], 2);
        let swap = Witness::UnitSwap {
            x: Vector::zero(),
            j: 1,
            s: Sign::Plus,
            k: 2,
            t: Sign::Plus,
        };
        assert_eq!(swap.ratio(&dec), Some(0.5));
    }
}
