//! Pass/fail reports for inequality checks.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::space::TOLERANCE;
use crate::witness::Witness;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn is_pass(self) -> bool {
        self == Status::Pass
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
        })
    }
}

/// `worst ≤ bound + 1e−9`; an unbounded (infinite) worst never passes.
pub fn within(worst: f64, bound: f64) -> bool {
    worst.is_finite() && worst <= bound + TOLERANCE
}

/// One inequality (or agreement condition) inside a check.
///
/// `worst_ratio` is `+∞` (serialized as `null`) when the search met a
/// `positive/0` ratio. Non-binding legs are reported but do not decide the
/// status.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckLeg {
    pub name: String,
    pub status: Status,
    #[serde(with = "extended_real")]
    pub worst_ratio: f64,
    pub bound_used: f64,
    pub bound_formula: String,
    pub binding: bool,
    pub witness: Option<Witness>,
}

impl CheckLeg {
    pub fn inequality(
        name: impl Into<String>,
        worst_ratio: f64,
        bound_used: f64,
        bound_formula: impl Into<String>,
        witness: Option<Witness>,
    ) -> Self {
        CheckLeg {
            name: name.into(),
            status: if within(worst_ratio, bound_used) {
                Status::Pass
            } else {
                Status::Fail
            },
            worst_ratio,
            bound_used,
            bound_formula: bound_formula.into(),
            binding: true,
            witness,
        }
    }

    /// A yes/no condition, encoded as `violations ≤ 0`.
    pub fn condition(
        name: impl Into<String>,
        holds: bool,
        description: impl Into<String>,
        witness: Option<Witness>,
    ) -> Self {
        CheckLeg::inequality(
            name,
            if holds { 0.0 } else { 1.0 },
            0.0,
            description,
            witness,
        )
    }

    pub fn informational(mut self) -> Self {
        self.binding = false;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub theorem_id: String,
    pub status: Status,
    #[serde(with = "extended_real")]
    pub worst_ratio: f64,
    pub bound_used: f64,
    pub bound_formula: String,
    pub witness: Option<Witness>,
    pub family_description: String,
    /// What a pass does and does not establish.
    pub scope: String,
    /// Constants fed into the bounds, by name.
    pub constants: BTreeMap<String, f64>,
    pub legs: Vec<CheckLeg>,
}

impl CheckReport {
    /// Status is pass iff every binding leg passes. The headline fields copy
    /// the failing binding leg with the largest `worst − bound`, or when all
    /// pass, the binding leg with the largest `worst / bound` (zero-bound
    /// conditions last); ties go to the earlier leg.
    pub fn from_legs(
        theorem_id: &str,
        family_description: String,
        scope: &str,
        constants: BTreeMap<String, f64>,
        legs: Vec<CheckLeg>,
    ) -> Self {
        let rank = |l: &CheckLeg| {
            if !l.status.is_pass() {
                (1, l.worst_ratio - l.bound_used)
            } else if l.bound_used > 0.0 {
                (0, l.worst_ratio / l.bound_used)
            } else {
                (0, f64::NEG_INFINITY)
            }
        };
        let headline = legs
            .iter()
            .filter(|l| l.binding)
            .fold(None::<&CheckLeg>, |best, l| match best {
                Some(b) if rank(l).partial_cmp(&rank(b)) != Some(std::cmp::Ordering::Greater) => {
                    Some(b)
                }
                _ => Some(l),
            })
            .expect("a check has at least one binding leg");
        CheckReport {
            theorem_id: theorem_id.into(),
            status: if legs
                .iter()
                .filter(|l| l.binding)
                .all(|l| l.status.is_pass())
            {
                Status::Pass
            } else {
                Status::Fail
            },
            worst_ratio: headline.worst_ratio,
            bound_used: headline.bound_used,
            bound_formula: headline.bound_formula.clone(),
            witness: headline.witness.clone(),
            family_description,
            scope: scope.into(),
            constants,
            legs,
        }
    }
}

/// `f64` that may be `+∞`, written as `null`.
pub(crate) mod extended_real {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn headline_is_the_tightest_binding_leg() {
        let legs = vec![
            CheckLeg::inequality("a", 1.0, 6.0, "six", None),
            CheckLeg::inequality("b", 2.0, 2.5, "two and a half", None),
            CheckLeg::inequality("c", 9.0, 1.0, "one", None).informational(),
        ];
        let r = CheckReport::from_legs("t", String::new(), "", BTreeMap::new(), legs);
        assert_eq!(r.status, Status::Pass);
        assert_eq!((r.worst_ratio, r.bound_used), (2.0, 2.5));

        let legs = vec![
            CheckLeg::condition("holds", true, "", None),
            CheckLeg::inequality("slack", 0.5, 1.0, "one", None),
            CheckLeg::inequality("broken", 1.5, 1.0, "one", None),
        ];
        let r = CheckReport::from_legs("t", String::new(), "", BTreeMap::new(), legs.clone());
        assert_eq!((r.status, r.worst_ratio), (Status::Fail, 1.5));
        let r = CheckReport::from_legs("t", String::new(), "", BTreeMap::new(), legs[..2].to_vec());
        assert_eq!((r.status, r.worst_ratio), (Status::Pass, 0.5));
    }

    #[test]
    fn tolerance_and_unbounded() {
        assert!(within(1.0 + 5e-10, 1.0));
        assert!(!within(1.0 + 2e-9, 1.0));
        assert!(!within(f64::INFINITY, 1e300));
        let leg = CheckLeg::inequality("u", f64::INFINITY, 1.0, "", None);
        let text = serde_json::to_string(&leg).unwrap();
        assert!(text.contains("\"worst_ratio\":null"));
        let back: CheckLeg = serde_json::from_str(&text).unwrap();
        assert_eq!(back.worst_ratio, f64::INFINITY);
    }
}
