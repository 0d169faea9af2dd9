//! Executable checks of the inequalities and separations, one
//! [`CheckReport`] per check.
//!
//! Checks over families can expose an implementation error or a false
//! inequality on the enumerated tuples; they do not prove anything about the
//! whole space. The two-weight space checks are exact within their stated
//! ranges because they only depend on class counts.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constants::{
    check_unit_insertion, default_lambda, estimate_rpslc_reformulated, over_family,
    pair_max_counts, ConstantEstimate, ConstantName, EstimateCache, PairOrder, SCOPE_FINITE,
};
use crate::error::{invalid, LabError, Result};
use crate::family::{random_vectors, SearchFamily};
use crate::lambda::Lambda;
use crate::report::{CheckLeg, CheckReport};
use crate::search::{par_max, MaxRatio};
use crate::space::{
    counterexample_indicator_norm, is_power_of_two_index, IndexSet, IndicatorModel, SpaceSpec,
    Vector,
};
use crate::transport::{
    is_competitor, is_reformulated, is_remainder, perturbation_to_remainder,
    perturbation_to_unit_remainder, remainder_to_perturbation, Image,
};
use crate::witness::{truncation_ratio, ul_ratio, Witness};

const SCOPE_CONSISTENCY: &str =
    "consistency check between family-dependent lower bounds of the constants; \
a fail points to an implementation error, not to a counterexample";
const SCOPE_EXACT: &str = "exact count-based evaluation over the stated range";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremId {
    UlProperty,
    Truncation,
    IntervalRpgBound,
    IntervalPgBound,
    RpgCharacterization,
    RpslcReformulation,
    RpgIiRpslcRelations,
    TypeIiRpslcBound,
    RpgIiEquivalences,
    UnitInsertion,
    OneConstantEquivalence,
    CounterexampleGrowth,
    CounterexampleTypeIiBound,
}

impl TheoremId {
    pub const ALL: [TheoremId; 13] = [
        TheoremId::UlProperty,
        TheoremId::Truncation,
        TheoremId::IntervalRpgBound,
        TheoremId::IntervalPgBound,
        TheoremId::RpgCharacterization,
        TheoremId::RpslcReformulation,
        TheoremId::RpgIiRpslcRelations,
        TheoremId::TypeIiRpslcBound,
        TheoremId::RpgIiEquivalences,
        TheoremId::UnitInsertion,
        TheoremId::OneConstantEquivalence,
        TheoremId::CounterexampleGrowth,
        TheoremId::CounterexampleTypeIiBound,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            TheoremId::UlProperty => "ul-property",
            TheoremId::Truncation => "truncation",
            TheoremId::IntervalRpgBound => "interval-rpg-bound",
            TheoremId::IntervalPgBound => "interval-pg-bound",
            TheoremId::RpgCharacterization => "rpg-characterization",
            TheoremId::RpslcReformulation => "rpslc-reformulation",
            TheoremId::RpgIiRpslcRelations => "rpgii-rpslc-relations",
            TheoremId::TypeIiRpslcBound => "type-ii-rpslc-bound",
            TheoremId::RpgIiEquivalences => "rpgii-equivalences",
            TheoremId::UnitInsertion => "unit-insertion",
            TheoremId::OneConstantEquivalence => "one-constant-equivalence",
            TheoremId::CounterexampleGrowth => "counterexample-growth",
            TheoremId::CounterexampleTypeIiBound => "counterexample-type-ii-bound",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| {
                let valid: Vec<&str> = TheoremId::ALL.iter().map(|t| t.as_str()).collect();
                LabError::Config(format!(
                    "unknown theorem id {s:?}; valid ids: all, {}",
                    valid.join(", ")
                ))
            })
    }
}

fn worst_of(est: &ConstantEstimate) -> (f64, Option<Witness>) {
    match &est.unbounded_witness {
        Some(w) => (f64::INFINITY, Some(w.clone())),
        None => (est.max_ratio, est.witness.clone()),
    }
}

fn worst_of_acc(acc: MaxRatio<Witness>) -> (f64, Option<Witness>) {
    match (acc.unbounded, acc.best) {
        (Some((_, w)), _) => (f64::INFINITY, Some(w)),
        (None, Some((r, _, w))) => (r, Some(w)),
        (None, None) => (0.0, None),
    }
}

/// `1 + C_q + 4C_q³Δ`
pub fn interval_bound(c_q: f64, delta: f64) -> f64 {
    1.0 + c_q + 4.0 * c_q.powi(3) * delta
}

/// Both UL inequalities with constant `2C_q` over every family vector.
pub fn check_ul_property(
    space: &SpaceSpec,
    c_q: f64,
    family: &SearchFamily,
) -> Result<CheckReport> {
    let side = |upper: bool| {
        over_family(family, false, false, |x, acc| {
            if let Some(r) = ul_ratio(space, x, upper) {
                acc.tuples += 1;
                acc.offer_ratio(r, || Witness::Ul {
                    x: x.clone(),
                    upper,
                });
            }
            Ok(())
        })
    };
    let bound = 2.0 * c_q;
    let (up, up_w) = worst_of_acc(side(true)?);
    let (low, low_w) = worst_of_acc(side(false)?);
    Ok(CheckReport::from_legs(
        TheoremId::UlProperty.as_str(),
        family.description(),
        SCOPE_FINITE,
        BTreeMap::from([("C_q".to_string(), c_q)]),
        vec![
            CheckLeg::inequality(
                "||sum a_n e_n|| / (max|a_n| ||1_A||)",
                up,
                bound,
                "2 C_q",
                up_w,
            ),
            CheckLeg::inequality(
                "min|a_n| ||1_A|| / ||sum a_n e_n||",
                low,
                bound,
                "2 C_q",
                low_w,
            ),
        ],
    ))
}

/// Truncation levels for `x`: each distinct `|coefficient|` and half the smallest.
pub fn truncation_levels(x: &Vector) -> Vec<f64> {
    let mut levels: Vec<f64> = x.entries().iter().map(|&(_, c)| c.abs()).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    if let Some(&least) = levels.first() {
        levels.insert(0, least / 2.0);
    }
    levels
}

fn truncation_scan(space: &SpaceSpec, x: &Vector, acc: &mut MaxRatio<Witness>) {
    for alpha in truncation_levels(x) {
        if let Some(r) = truncation_ratio(space, x, alpha) {
            acc.tuples += 1;
            acc.offer_ratio(r, || Witness::Truncation {
                x: x.clone(),
                alpha,
            });
        }
    }
}

/// `‖T_α x‖ ≤ C_ℓ‖x‖` over the family and over seeded random vectors.
pub fn check_truncation_bound(
    space: &SpaceSpec,
    c_l: f64,
    family: &SearchFamily,
    random: &[Vector],
) -> Result<CheckReport> {
    let on_family = over_family(family, false, false, |x, acc| {
        truncation_scan(space, x, acc);
        Ok(())
    })?;
    let on_random = par_max(random.len(), |i, acc| {
        truncation_scan(space, &random[i], acc);
        Ok(())
    })?;
    let (fam, fam_w) = worst_of_acc(on_family);
    let (rnd, rnd_w) = worst_of_acc(on_random);
    Ok(CheckReport::from_legs(
        TheoremId::Truncation.as_str(),
        format!(
            "{}; plus {} seeded random vectors",
            family.description(),
            random.len()
        ),
        SCOPE_FINITE,
        BTreeMap::from([("C_l".to_string(), c_l)]),
        vec![
            CheckLeg::inequality("||T_a x|| / ||x|| on the family", fam, c_l, "C_l", fam_w),
            CheckLeg::inequality(
                "||T_a x|| / ||x|| on random vectors",
                rnd,
                c_l,
                "C_l",
                rnd_w,
            ),
        ],
    ))
}

/// `‖x − P_Λ x‖ ≤ (1 + C_q + 4C_q³Δ_rc)‖x − P_I x‖` over the family, with
/// `I` ranging over `∅` and intervals of length `≤ m` reaching `max Λ`.
pub fn check_rpg_interval_bound(
    space: &SpaceSpec,
    c_q: f64,
    delta_rc: f64,
    family: &SearchFamily,
) -> Result<CheckReport> {
    check_rpg_interval_bound_in(&EstimateCache::default(), space, c_q, delta_rc, family)
}

fn check_rpg_interval_bound_in(
    cache: &EstimateCache,
    space: &SpaceSpec,
    c_q: f64,
    delta_rc: f64,
    family: &SearchFamily,
) -> Result<CheckReport> {
    let est = cache.get(ConstantName::RpgInterval, space, None, family)?;
    let (worst, witness) = worst_of(&est);
    Ok(CheckReport::from_legs(
        TheoremId::IntervalRpgBound.as_str(),
        est.family.description(),
        SCOPE_FINITE,
        BTreeMap::from([("C_q".to_string(), c_q), ("Delta_rc".to_string(), delta_rc)]),
        vec![CheckLeg::inequality(
            "||x - P_L x|| / ||x - P_I x||",
            worst,
            interval_bound(c_q, delta_rc),
            "1 + C_q + 4 C_q^3 Delta_rc",
            witness,
        )],
    ))
}

/// Mutual bounds between the initial-segment constant and the interval
/// (`min I ≤ min Λ`) constant, with `K = 1 + C_q + 4C_q³Δ_c`.
pub fn check_pg_interval_bound(space: &SpaceSpec, family: &SearchFamily) -> Result<CheckReport> {
    check_pg_interval_bound_in(&EstimateCache::default(), space, family)
}

fn check_pg_interval_bound_in(
    cache: &EstimateCache,
    space: &SpaceSpec,
    family: &SearchFamily,
) -> Result<CheckReport> {
    let c_q = cache
        .get(ConstantName::QuasiGreedy, space, None, family)?
        .value;
    let delta_c = cache
        .get(ConstantName::Conservative, space, None, family)?
        .value;
    let pg = cache.get(ConstantName::Pg, space, None, family)?;
    let hat = cache.get(ConstantName::PgInterval, space, None, family)?;
    let k = interval_bound(c_q, delta_c);
    let (pg_worst, pg_w) = worst_of(&pg);
    let (hat_worst, hat_w) = worst_of(&hat);
    Ok(CheckReport::from_legs(
        TheoremId::IntervalPgBound.as_str(),
        hat.family.description(),
        SCOPE_CONSISTENCY,
        BTreeMap::from([
            ("C_q".to_string(), c_q),
            ("Delta_c".to_string(), delta_c),
            ("C_pg".to_string(), pg.effective_value()),
            ("C_pg_interval".to_string(), hat.effective_value()),
        ]),
        vec![
            CheckLeg::inequality(
                "C_pg",
                pg_worst,
                k * hat.effective_value(),
                "(1 + C_q + 4 C_q^3 Delta_c) C_pg_interval",
                pg_w,
            ),
            CheckLeg::inequality(
                "C_pg_interval",
                hat_worst,
                k * pg.effective_value(),
                "(1 + C_q + 4 C_q^3 Delta_c) C_pg",
                hat_w.clone(),
            ),
            CheckLeg::inequality(
                "C_pg_interval",
                hat_worst,
                k,
                "1 + C_q + 4 C_q^3 Delta_c",
                hat_w,
            )
            .informational(),
        ],
    ))
}

fn finite(v: f64) -> bool {
    v.is_finite()
}

/// The remainder constant against arbitrary sets right of `Λ` is finite on
/// the family iff both `C_q` and `Δ_rc` are.
pub fn check_rpg_characterization(space: &SpaceSpec, family: &SearchFamily) -> Result<CheckReport> {
    check_rpg_characterization_in(&EstimateCache::default(), space, family)
}

fn check_rpg_characterization_in(
    cache: &EstimateCache,
    space: &SpaceSpec,
    family: &SearchFamily,
) -> Result<CheckReport> {
    let rpg = cache.get(ConstantName::Rpg, space, None, family)?;
    let c_q = cache.get(ConstantName::QuasiGreedy, space, None, family)?;
    let delta = cache.get(ConstantName::ReverseConservative, space, None, family)?;
    let left = finite(rpg.effective_value());
    let right = finite(c_q.effective_value()) && finite(delta.effective_value());
    let (rpg_worst, rpg_w) = worst_of(&rpg);
    Ok(CheckReport::from_legs(
        TheoremId::RpgCharacterization.as_str(),
        rpg.family.description(),
        SCOPE_CONSISTENCY,
        BTreeMap::from([
            ("C_rpg".to_string(), rpg.effective_value()),
            ("C_q".to_string(), c_q.effective_value()),
            ("Delta_rc".to_string(), delta.effective_value()),
        ]),
        vec![
            CheckLeg::condition(
                "finiteness agrees",
                left == right,
                format!("C_rpg finite ({left}) iff C_q and Delta_rc finite ({right})"),
                if left { None } else { rpg_w.clone() },
            ),
            CheckLeg::inequality("C_rpg", rpg_worst, f64::MAX, "finite", rpg_w).informational(),
        ],
    ))
}

/// Both directions of the reformulation of the perturbation constant.
pub fn check_rpslc_reformulation(
    space: &SpaceSpec,
    lambda: Lambda,
    family: &SearchFamily,
) -> Result<CheckReport> {
    check_rpslc_reformulation_in(&EstimateCache::default(), space, lambda, family)
}

fn check_rpslc_reformulation_in(
    cache: &EstimateCache,
    space: &SpaceSpec,
    lambda: Lambda,
    family: &SearchFamily,
) -> Result<CheckReport> {
    let direct = cache.get(ConstantName::Rpslc, space, Some(lambda), family)?;
    let reform = estimate_rpslc_reformulated(space, lambda, family)?;
    let (d, d_w) = worst_of(&direct);
    let (r, r_w) = worst_of(&reform);
    Ok(CheckReport::from_legs(
        TheoremId::RpslcReformulation.as_str(),
        format!(
            "{} | {}",
            direct.family.description(),
            reform.family.description()
        ),
        SCOPE_FINITE,
        BTreeMap::from([
            ("Delta_lambda_rpl".to_string(), d),
            ("Delta_lambda_rpl_reformulated".to_string(), r),
        ]),
        vec![
            CheckLeg::inequality(
                "||x|| / ||x - P_A x + 1_eB||",
                r,
                d,
                "max of ||x + 1_eA|| / ||x + 1_dB|| (perturbation form)",
                r_w,
            ),
            CheckLeg::inequality(
                "||x + 1_eA|| / ||x + 1_dB||",
                d,
                r,
                "max of ||x|| / ||x - P_A x + 1_eB|| (reformulated form)",
                d_w,
            ),
        ],
    ))
}

/// Relations between the `λ`-type constants and the perturbation constants.
///
/// Each side's lower bound is the family maximum together with the ratios of
/// the other side's extremal tuple mapped through the reduction; the mapped
/// tuples must meet the side conditions of their constants.
pub fn check_rpgii_rpslc_relations(
    space: &SpaceSpec,
    lambda: Lambda,
    family: &SearchFamily,
) -> Result<CheckReport> {
    check_rpgii_rpslc_relations_in(&EstimateCache::default(), space, lambda, family)
}

fn check_rpgii_rpslc_relations_in(
    cache: &EstimateCache,
    space: &SpaceSpec,
    lambda: Lambda,
    family: &SearchFamily,
) -> Result<CheckReport> {
    let c_l_est = cache.get(ConstantName::Suppression, space, None, family)?;
    let rpl_one = cache.get(ConstantName::Rpslc, space, Some(Lambda::ONE), family)?;
    let rp_one = cache.get(ConstantName::RpgII, space, Some(Lambda::ONE), family)?;
    let rpl = cache.get(ConstantName::Rpslc, space, Some(lambda), family)?;
    let rp = cache.get(ConstantName::RpgII, space, Some(lambda), family)?;
    let (rpl_one_w, rpl_one_wit) = worst_of(&rpl_one);
    let (rpl_w, rpl_wit) = worst_of(&rpl);
    let (rp_w, rp_wit) = worst_of(&rp);

    let images = [
        rpl_one_wit
            .as_ref()
            .and_then(perturbation_to_unit_remainder),
        rpl_wit
            .as_ref()
            .and_then(|w| perturbation_to_remainder(w, lambda)),
        rp_wit
            .as_ref()
            .and_then(|w| remainder_to_perturbation(w, lambda)),
    ];
    let lift = |base: f64, image: &Option<Image>, pick: fn(&Witness) -> bool| {
        image
            .as_ref()
            .and_then(|i| i.factor_ratio(space, pick))
            .map_or(base, |r| base.max(r))
    };
    let c_l = lift(
        lift(c_l_est.effective_value(), &images[1], is_remainder),
        &images[2],
        is_remainder,
    );
    let c_rp_one = lift(rp_one.effective_value(), &images[0], is_competitor);
    let c_rp = lift(rp.effective_value(), &images[1], is_competitor);
    let delta = lift(rpl.effective_value(), &images[2], is_reformulated);
    let admissible = images.iter().flatten().all(|i| i.admissible);
    let offending = images
        .iter()
        .flatten()
        .find(|i| !i.admissible)
        .and_then(|i| i.factors.first().cloned());

    Ok(CheckReport::from_legs(
        TheoremId::RpgIiRpslcRelations.as_str(),
        rp.family.description(),
        SCOPE_CONSISTENCY,
        BTreeMap::from([
            ("C_l".to_string(), c_l),
            ("Delta_1_rpl".to_string(), rpl_one.effective_value()),
            ("C_1_rp".to_string(), c_rp_one),
            ("Delta_lambda_rpl".to_string(), delta),
            ("C_lambda_rp".to_string(), c_rp),
        ]),
        vec![
            CheckLeg::condition(
                "mapped extremal tuples meet their side conditions",
                admissible,
                "greedy sets, interval budgets, B < A, surrounding and size constraints",
                offending,
            ),
            CheckLeg::inequality("Delta_1_rpl", rpl_one_w, c_rp_one, "C_1_rp", rpl_one_wit),
            CheckLeg::inequality(
                "Delta_lambda_rpl",
                rpl_w,
                c_l * c_rp,
                "C_l C_lambda_rp",
                rpl_wit,
            ),
            CheckLeg::inequality(
                "C_lambda_rp",
                rp_w,
                c_l * delta,
                "C_l Delta_lambda_rpl",
                rp_wit,
            ),
        ],
    ))
}

/// `‖x + 1_{εA}‖ ≤ (4C_q³Δ_{λ,rc} + C_ℓ)‖x + 1_{δB}‖` on every perturbation tuple.
pub fn check_type_ii_rpslc_bound(
    space: &SpaceSpec,
    lambda: Lambda,
    family: &SearchFamily,
) -> Result<CheckReport> {
    check_type_ii_rpslc_bound_in(&EstimateCache::default(), space, lambda, family)
}

fn check_type_ii_rpslc_bound_in(
    cache: &EstimateCache,
    space: &SpaceSpec,
    lambda: Lambda,
    family: &SearchFamily,
) -> Result<CheckReport> {
    let c_q = cache
        .get(ConstantName::QuasiGreedy, space, None, family)?
        .value;
    let c_l = cache
        .get(ConstantName::Suppression, space, None, family)?
        .value;
    let delta = cache
        .get(
            ConstantName::LambdaReverseConservative,
            space,
            Some(lambda),
            family,
        )?
        .value;
    let rpl = cache.get(ConstantName::Rpslc, space, Some(lambda), family)?;
    let (w, wit) = worst_of(&rpl);
    Ok(CheckReport::from_legs(
        TheoremId::TypeIiRpslcBound.as_str(),
        rpl.family.description(),
        SCOPE_FINITE,
        BTreeMap::from([
            ("C_q".to_string(), c_q),
            ("C_l".to_string(), c_l),
            ("Delta_lambda_rc".to_string(), delta),
        ]),
        vec![CheckLeg::inequality(
            "||x + 1_eA|| / ||x + 1_dB||",
            w,
            4.0 * c_q.powi(3) * delta + c_l,
            "4 C_q^3 Delta_lambda_rc + C_l",
            wit,
        )],
    ))
}

/// Finiteness of the `λ` remainder constant, of `C_q` with the perturbation
/// constant, and of `C_q` with `Δ_{λ,rc}` agree.
pub fn check_rpgii_equivalences(
    space: &SpaceSpec,
    lambda: Lambda,
    family: &SearchFamily,
) -> Result<CheckReport> {
    check_rpgii_equivalences_in(&EstimateCache::default(), space, lambda, family)
}

fn check_rpgii_equivalences_in(
    cache: &EstimateCache,
    space: &SpaceSpec,
    lambda: Lambda,
    family: &SearchFamily,
) -> Result<CheckReport> {
    let rp = cache.get(ConstantName::RpgII, space, Some(lambda), family)?;
    let c_q = cache.get(ConstantName::QuasiGreedy, space, None, family)?;
    let rpl = cache.get(ConstantName::Rpslc, space, Some(lambda), family)?;
    let delta = cache.get(
        ConstantName::LambdaReverseConservative,
        space,
        Some(lambda),
        family,
    )?;
    let statuses = [
        ("C_lambda_rp", finite(rp.effective_value()), &rp),
        (
            "C_q and Delta_lambda_rpl",
            finite(c_q.effective_value()) && finite(rpl.effective_value()),
            &rpl,
        ),
        (
            "C_q and Delta_lambda_rc",
            finite(c_q.effective_value()) && finite(delta.effective_value()),
            &delta,
        ),
    ];
    let agree = statuses.iter().all(|s| s.1 == statuses[0].1);
    let diverging = statuses.iter().find(|s| !s.1).and_then(|s| worst_of(s.2).1);
    let mut legs = vec![CheckLeg::condition(
        "finiteness agrees",
        agree,
        statuses
            .iter()
            .map(|s| format!("{} finite: {}", s.0, s.1))
            .collect::<Vec<_>>()
            .join("; "),
        if agree { None } else { diverging },
    )];
    for (name, _, est) in &statuses {
        let (w, wit) = worst_of(est);
        legs.push(CheckLeg::inequality(*name, w, f64::MAX, "finite", wit).informational());
    }
    Ok(CheckReport::from_legs(
        TheoremId::RpgIiEquivalences.as_str(),
        rp.family.description(),
        SCOPE_CONSISTENCY,
        BTreeMap::from([
            ("C_lambda_rp".to_string(), rp.effective_value()),
            ("C_q".to_string(), c_q.effective_value()),
            ("Delta_lambda_rpl".to_string(), rpl.effective_value()),
            ("Delta_lambda_rc".to_string(), delta.effective_value()),
        ]),
        legs,
    ))
}

/// Unit insertion, the remainder constant against sets right of `Λ`, and the
/// `λ = 1` interval constant either all equal 1 or all exceed it.
pub fn check_one_constant_equivalence(
    space: &SpaceSpec,
    family: &SearchFamily,
) -> Result<CheckReport> {
    check_one_constant_equivalence_in(&EstimateCache::default(), space, family)
}

fn check_one_constant_equivalence_in(
    cache: &EstimateCache,
    space: &SpaceSpec,
    family: &SearchFamily,
) -> Result<CheckReport> {
    let units = check_unit_insertion(space, family)?;
    let rpg = cache.get(ConstantName::Rpg, space, None, family)?;
    let rpg_interval = cache.get(ConstantName::RpgInterval, space, None, family)?;
    let (a, a_w) = worst_of(&rpg);
    let (b, b_w) = worst_of(&rpg_interval);
    let unit_leg = CheckLeg::inequality(
        "unit insertion (both inequalities)",
        units.worst_ratio,
        1.0,
        "1",
        units.witness.clone(),
    );
    let rpg_leg = CheckLeg::inequality("C_rpg", a, 1.0, "1", a_w);
    let interval_leg = CheckLeg::inequality("C_rpg_interval", b, 1.0, "1", b_w);
    let holds = [unit_leg.status, rpg_leg.status, interval_leg.status];
    let agree = holds.iter().all(|s| *s == holds[0]);
    Ok(CheckReport::from_legs(
        TheoremId::OneConstantEquivalence.as_str(),
        rpg.family.description(),
        SCOPE_FINITE,
        BTreeMap::from([
            ("C_rpg".to_string(), rpg.effective_value()),
            ("C_rpg_interval".to_string(), rpg_interval.effective_value()),
        ]),
        vec![
            CheckLeg::condition(
                "the three constant-1 statements agree",
                agree,
                format!(
                    "unit insertion {}, C_rpg = 1 {}, C_rpg_interval = 1 {}",
                    holds[0], holds[1], holds[2]
                ),
                None,
            ),
            unit_leg.informational(),
            rpg_leg.informational(),
            interval_leg.informational(),
        ],
    ))
}

/// `(Σ_{n≤N} n^{-1/2}) / (Σ_{n≤N} n^{-1})` from the class counts of
/// `A_N = {2^{2N+1}, …, 2^{3N}} ⊂ D` and `B_N = {3, …, 3^N}` (disjoint from `D`).
pub fn growth_ratio(n: usize) -> f64 {
    counterexample_indicator_norm(n, 0) / counterexample_indicator_norm(0, n)
}

/// Direct forward summation of the same ratio, for comparison.
pub fn growth_ratio_closed_form(n: usize) -> f64 {
    let mut root = 0.0;
    let mut harmonic = 0.0;
    for k in 1..=n {
        root += 1.0 / (k as f64).sqrt();
        harmonic += 1.0 / k as f64;
    }
    root / harmonic
}

/// Largest `N` for which `A_N` and `B_N` fit in `usize` indices.
const MATERIALIZABLE: usize = 21;

fn growth_sets(n: usize) -> (IndexSet, IndexSet) {
    let a = IndexSet::from_sorted_unchecked((2 * n + 1..=3 * n).map(|e| 1usize << e).collect());
    let b = IndexSet::from_sorted_unchecked((1..=n as u32).map(|e| 3usize.pow(e)).collect());
    (a, b)
}

fn growth_witness(n: usize) -> Witness {
    Witness::TwoWeightCounts {
        span: 0,
        a_marked: n,
        a_unmarked: 0,
        b_marked: 0,
        b_unmarked: n,
    }
}

/// Growth of `‖1_{A_N}‖/‖1_{B_N}‖` in the two-weight space.
pub fn check_counterexample_growth(
    ns: &[usize],
    thresholds: &[(usize, f64)],
) -> Result<CheckReport> {
    if ns.is_empty() || ns.contains(&0) || ns.windows(2).any(|w| w[0] >= w[1]) {
        return invalid("N values must be positive and strictly increasing");
    }
    let ratios: Vec<f64> = ns.iter().map(|&n| growth_ratio(n)).collect();
    let mut legs = Vec::new();

    let (worst_err, worst_n) = ns
        .iter()
        .zip(&ratios)
        .map(|(&n, &r)| {
            let c = growth_ratio_closed_form(n);
            ((r - c).abs() / c, n)
        })
        .fold(
            (0.0, ns[0]),
            |best, cur| if cur.0 > best.0 { cur } else { best },
        );
    legs.push(CheckLeg::inequality(
        format!("relative error against direct summation (largest at N = {worst_n})"),
        worst_err,
        1e-9,
        "1e-9",
        None,
    ));

    let increasing = ratios.windows(2).all(|w| w[0] < w[1]);
    legs.push(CheckLeg::condition(
        "ratio strictly increasing in N",
        increasing,
        format!("N = {ns:?}"),
        None,
    ));

    for &(n, threshold) in thresholds {
        let r = growth_ratio(n);
        legs.push(CheckLeg::inequality(
            format!("threshold at N = {n}"),
            threshold,
            r,
            format!("ratio(N = {n}) = (sum n^-1/2) / (sum n^-1)"),
            Some(growth_witness(n)),
        ));
    }

    let space = SpaceSpec::counterexample(64);
    let mut symbolic = true;
    let mut materialized = true;
    for &n in ns {
        // |A_N| = 3N − (2N+1) + 1 = N = |B_N|; max B_N = 3^N < 2^{2N+1} = min A_N
        symbolic &= (n as f64) * 3f64.log2() < (2 * n + 1) as f64;
        if n <= MATERIALIZABLE {
            let (a, b) = growth_sets(n);
            symbolic &= a.len() == n && b.len() == n && b.lies_before(&a);
            symbolic &= a.iter().all(is_power_of_two_index) && !b.iter().any(is_power_of_two_index);
            let w = Witness::SetPair { a, b };
            materialized &= w.ratio(&space) == Some(growth_ratio(n));
        }
    }
    legs.push(CheckLeg::condition(
        "|A_N| = |B_N| = N, B_N < A_N, B_N disjoint from D",
        symbolic,
        "N log2 3 < 2N + 1; powers of 3 are odd and > 1",
        None,
    ));
    legs.push(CheckLeg::condition(
        format!("materialized sets reproduce the count-based ratio (N <= {MATERIALIZABLE})"),
        materialized,
        "bit-identical",
        None,
    ));

    let last = *ns.last().expect("nonempty");
    legs.push(
        CheckLeg::inequality(
            format!("ratio at N = {last}"),
            growth_ratio(last),
            f64::MAX,
            "unbounded as N grows",
            Some(growth_witness(last)),
        )
        .informational(),
    );
    Ok(CheckReport::from_legs(
        TheoremId::CounterexampleGrowth.as_str(),
        format!("A_N, B_N for N in {ns:?}"),
        SCOPE_EXACT,
        BTreeMap::new(),
        legs,
    ))
}

/// `max(2, √(1 − 2 ln(λ − 1)))`, the larger of the case constants for the
/// two-weight space; requires `λ > 1`.
pub fn type_ii_case_bound(lambda: Lambda) -> f64 {
    let tail = (1.0 - 2.0 * (lambda.as_f64() - 1.0).ln()).max(0.0).sqrt();
    tail.max(2.0)
}

/// Most powers of two in any window of `span` consecutive positive integers:
/// `⌊log₂ span⌋ + 1`.
pub fn max_marked_in_window(span: usize) -> usize {
    (usize::BITS - span.leading_zeros()) as usize
}

/// Upper bound on `‖1_A‖/‖1_B‖` in the two-weight space over all admissible
/// pairs with `s(A) ≤ span_max`, from class counts: `A` has `a_D` powers of
/// two (so `s(A) ≥ 2^{a_D−1}`) and `a_O` other indices, and `‖1_B‖` is at
/// least the harmonic sum of the smallest admissible `|B|`.
pub fn relaxed_two_weight_max(
    lambda: Lambda,
    span_max: usize,
    keep: &dyn Fn(usize, usize) -> bool,
) -> (f64, Option<Witness>) {
    let marked_max = max_marked_in_window(span_max);
    let need_max = lambda.min_partner_size(span_max, span_max);
    let mut harmonic = vec![0.0; need_max + 1];
    for k in 1..=need_max {
        harmonic[k] = harmonic[k - 1] + 1.0 / k as f64;
    }
    let roots: Vec<f64> = (0..=marked_max)
        .map(|k| counterexample_indicator_norm(k, 0))
        .collect();
    let mut best: Option<(f64, usize, usize, usize, usize)> = None;
    for a_d in 0..=marked_max {
        let span_floor = if a_d == 0 { 0 } else { 1usize << (a_d - 1) };
        for a_o in 0..=span_max {
            let size = a_d + a_o;
            let span = size.max(span_floor);
            if span > span_max {
                break;
            }
            if size == 0 || !keep(a_d, a_o) {
                continue;
            }
            let need = lambda.min_partner_size(span, size);
            let r = (roots[a_d] + harmonic[a_o]) / harmonic[need];
            if best.is_none_or(|b| r > b.0) {
                best = Some((r, span, a_d, a_o, need));
            }
        }
    }
    match best {
        None => (0.0, None),
        Some((_, span, a_d, a_o, need)) => {
            let w = Witness::TwoWeightCounts {
                span,
                a_marked: a_d,
                a_unmarked: a_o,
                b_marked: 0,
                b_unmarked: need,
            };
            let exact = w
                .ratio(&SpaceSpec::counterexample(1))
                .expect("positive partner");
            (exact, Some(w))
        }
    }
}

/// `Δ_{λ,rc}` of the two-weight space stays below the case constant.
pub fn check_counterexample_lambda_bound(
    lambda: Lambda,
    n: usize,
    span_max: usize,
) -> Result<CheckReport> {
    if !lambda.at_least_one() || lambda.is_one() {
        return invalid(format!("lambda must exceed 1, got {lambda}"));
    }
    if n == 0 || span_max == 0 {
        return invalid("N and the span bound must be positive");
    }
    let bound = type_ii_case_bound(lambda);
    let model = IndicatorModel::TwoWeight { mirror_cap: None };
    let roots: Vec<f64> = (0..=max_marked_in_window(span_max.max(n)))
        .map(|k| counterexample_indicator_norm(k, 0))
        .collect();
    let mut harmonic = vec![0.0; span_max.max(n) + 1];
    for k in 1..harmonic.len() {
        harmonic[k] = harmonic[k - 1] + 1.0 / k as f64;
    }
    let case_one = |a_d: usize, a_o: usize| roots[a_d] <= harmonic[a_o];
    let (all, all_w) = worst_of_acc(pair_max_counts(
        model,
        n,
        lambda,
        PairOrder::PartnerBefore,
        &|_, _| true,
    ));
    let (one, one_w) = worst_of_acc(pair_max_counts(
        model,
        n,
        lambda,
        PairOrder::PartnerBefore,
        &case_one,
    ));
    let (rel, rel_w) = relaxed_two_weight_max(lambda, span_max, &|_, _| true);
    let (rel_one, rel_one_w) = relaxed_two_weight_max(lambda, span_max, &case_one);
    let formula = "max(2, sqrt(1 - 2 ln(lambda - 1)))";
    Ok(CheckReport::from_legs(
        TheoremId::CounterexampleTypeIiBound.as_str(),
        format!(
            "all nonempty A, B in [1..{n}] with B < A, ({lambda} - 1) s(A) + |A| <= |B|; \
             count configurations with s(A) <= {span_max} and |A ∩ D| <= floor(log2 s(A)) + 1"
        ),
        SCOPE_EXACT,
        BTreeMap::from([
            ("lambda".to_string(), lambda.as_f64()),
            ("C(lambda)".to_string(), bound),
        ]),
        vec![
            CheckLeg::inequality(
                format!("Delta_lambda_rc on [1..{n}]"),
                all,
                bound,
                formula,
                all_w,
            ),
            CheckLeg::inequality(
                format!("pairs with ||1_(A∩D)|| <= ||1_(A\\D)|| on [1..{n}]"),
                one,
                2.0,
                "2",
                one_w,
            ),
            CheckLeg::inequality(
                format!("count relaxation, spans <= {span_max}"),
                rel,
                bound,
                formula,
                rel_w,
            ),
            CheckLeg::inequality(
                format!("count relaxation with ||1_(A∩D)|| <= ||1_(A\\D)||, spans <= {span_max}"),
                rel_one,
                2.0,
                "2",
                rel_one_w,
            ),
        ],
    ))
}

/// Parameters of a verification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub lambda: Lambda,
    /// Family for greedy-set and interval searches.
    pub family: SearchFamily,
    /// Family for perturbation tuples `(x, A, B, ε, δ)`.
    pub compact_family: SearchFamily,
    pub seed: u64,
    pub random_vectors: usize,
    pub growth_ns: Vec<usize>,
    pub growth_thresholds: Vec<(usize, f64)>,
    pub pair_range: usize,
    pub span_max: usize,
}

impl VerifyConfig {
    /// Standard families capped by the space's ambient cap.
    pub fn for_space(space: &SpaceSpec) -> Self {
        let standard = SearchFamily::standard();
        let compact = SearchFamily::compact();
        VerifyConfig {
            lambda: default_lambda(),
            family: standard
                .clone()
                .with_ambient_cap(standard.ambient_cap.min(space.ambient_cap)),
            compact_family: compact
                .clone()
                .with_ambient_cap(compact.ambient_cap.min(space.ambient_cap)),
            seed: 0,
            random_vectors: 10_000,
            growth_ns: vec![1, 10, 100, 10_000],
            growth_thresholds: vec![(100, 3.5), (10_000, 20.0)],
            pair_range: 64,
            span_max: 1 << 16,
        }
    }
}

/// Runs checks on one space, sharing constant estimates between them.
pub struct Verifier<'a> {
    space: &'a SpaceSpec,
    config: VerifyConfig,
    cache: EstimateCache,
}

impl<'a> Verifier<'a> {
    pub fn new(space: &'a SpaceSpec, config: VerifyConfig) -> Self {
        Verifier {
            space,
            config,
            cache: EstimateCache::default(),
        }
    }

    pub fn config(&self) -> &VerifyConfig {
        &self.config
    }

    fn value(&self, name: ConstantName) -> Result<f64> {
        Ok(self
            .cache
            .get(name, self.space, None, &self.config.family)?
            .value)
    }

    pub fn run(&self, id: TheoremId) -> Result<CheckReport> {
        let (space, cfg, cache) = (self.space, &self.config, &self.cache);
        match id {
            TheoremId::UlProperty => {
                check_ul_property(space, self.value(ConstantName::QuasiGreedy)?, &cfg.family)
            }
            TheoremId::Truncation => {
                let random =
                    random_vectors(cfg.seed, cfg.random_vectors, cfg.family.ambient_cap, 0.35);
                check_truncation_bound(
                    space,
                    self.value(ConstantName::Suppression)?,
                    &cfg.family,
                    &random,
                )
            }
            TheoremId::IntervalRpgBound => check_rpg_interval_bound_in(
                cache,
                space,
                self.value(ConstantName::QuasiGreedy)?,
                self.value(ConstantName::ReverseConservative)?,
                &cfg.family,
            ),
            TheoremId::IntervalPgBound => check_pg_interval_bound_in(cache, space, &cfg.family),
            TheoremId::RpgCharacterization => {
                check_rpg_characterization_in(cache, space, &cfg.family)
            }
            TheoremId::RpslcReformulation => {
                check_rpslc_reformulation_in(cache, space, cfg.lambda, &cfg.compact_family)
            }
            TheoremId::RpgIiRpslcRelations => {
                check_rpgii_rpslc_relations_in(cache, space, cfg.lambda, &cfg.compact_family)
            }
            TheoremId::TypeIiRpslcBound => {
                check_type_ii_rpslc_bound_in(cache, space, cfg.lambda, &cfg.compact_family)
            }
            TheoremId::RpgIiEquivalences => {
                check_rpgii_equivalences_in(cache, space, cfg.lambda, &cfg.compact_family)
            }
            TheoremId::UnitInsertion => check_unit_insertion(space, &cfg.family),
            TheoremId::OneConstantEquivalence => {
                check_one_constant_equivalence_in(cache, space, &cfg.family)
            }
            TheoremId::CounterexampleGrowth => {
                check_counterexample_growth(&cfg.growth_ns, &cfg.growth_thresholds)
            }
            TheoremId::CounterexampleTypeIiBound => {
                check_counterexample_lambda_bound(cfg.lambda, cfg.pair_range, cfg.span_max)
            }
        }
    }

    pub fn run_all(&self) -> Result<Vec<CheckReport>> {
        TheoremId::ALL.iter().map(|&id| self.run(id)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::LpExponent;

    #[test]
    fn ids_round_trip() {
        for id in TheoremId::ALL {
            assert_eq!(id.as_str().parse::<TheoremId>().unwrap(), id);
        }
        assert!("interval-bound"
            .parse::<TheoremId>()
            .unwrap_err()
            .to_string()
            .contains("ul-property"));
    }

    #[test]
    fn growth_examples() {
        assert_eq!(growth_ratio(1), 1.0);
        let r = growth_ratio(100);
        assert!((r - 18.5896 / 5.18738).abs() < 1e-3);
        let r = check_counterexample_growth(&[1, 10, 100], &[(100, 3.5)]).unwrap();
        assert!(r.status.is_pass(), "{r:#?}");
    }

    #[test]
    fn case_bound_values() {
        for l in ["3/2", "2", "3"] {
            assert_eq!(type_ii_case_bound(l.parse().unwrap()), 2.0);
        }
        let close: Lambda = "11/10".parse().unwrap();
        assert!((type_ii_case_bound(close) - (1.0 + 2.0 * 10f64.ln()).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn window_counts() {
        assert_eq!(max_marked_in_window(1), 1);
        assert_eq!(max_marked_in_window(2), 2);
        assert_eq!(max_marked_in_window(3), 2);
        assert_eq!(max_marked_in_window(4), 3);
        assert_eq!(max_marked_in_window(1 << 16), 17);
    }

    #[test]
    fn l1_small_family_checks_pass() {
        let l1 = SpaceSpec::lp(LpExponent::One, 6);
        let mut cfg = VerifyConfig::for_space(&l1);
        cfg.family = cfg.family.with_support_size_max(3);
        cfg.compact_family = cfg.compact_family.with_ambient_cap(5);
        cfg.random_vectors = 50;
        let v = Verifier::new(&l1, cfg);
        for id in TheoremId::ALL {
            if matches!(
                id,
                TheoremId::CounterexampleGrowth | TheoremId::CounterexampleTypeIiBound
            ) {
                continue;
            }
            let r = v.run(id).unwrap();
            assert!(r.status.is_pass(), "{id}: {r:#?}");
        }
    }
}
