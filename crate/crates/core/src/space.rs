//! Sparse vectors, index sets, signs and the norm oracles.
//!
//! Every space here is a norm on finitely supported real sequences indexed by
//! the positive integers. The canonical unit vectors `e_n` play the role of the
//! basis and coordinates are read off directly.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::SmallVec;

use crate::error::{invalid, LabError, Result};

/// Absolute tolerance for floating comparisons in searches and checks.
pub const TOLERANCE: f64 = 1e-9;

/// Ambient index cap used when a space document does not set one.
pub const DEFAULT_AMBIENT_CAP: usize = 64;

/// A finitely supported coefficient sequence.
///
/// Entries are sorted by index, indices are at least 1, and no stored
/// coefficient is zero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Vector {
    entries: Vec<(usize, f64)>,
}

impl Vector {
    pub fn zero() -> Self {
        Vector {
            entries: Vec::new(),
        }
    }

    /// `e_n`
    pub fn unit(n: usize) -> Self {
        assert!(n >= 1, "indices start at 1");
        Vector {
            entries: vec![(n, 1.0)],
        }
    }

    /// Builds a vector from `(index, coefficient)` pairs. Zero coefficients are
    /// dropped; repeated indices and non-finite coefficients are rejected.
    pub fn from_entries<I: IntoIterator<Item = (usize, f64)>>(pairs: I) -> Result<Self> {
        let mut entries: Vec<(usize, f64)> = pairs.into_iter().collect();
        entries.sort_by_key(|&(n, _)| n);
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return invalid(format!("index {} appears twice", w[0].0));
            }
        }
        for &(n, c) in &entries {
            if n == 0 {
                return invalid("indices start at 1");
            }
            if !c.is_finite() {
                return invalid(format!("coefficient at index {n} is not finite"));
            }
        }
        entries.retain(|&(_, c)| c != 0.0);
        Ok(Vector { entries })
    }

    /// Caller guarantees the invariants (sorted, nonzero, indices >= 1).
    pub(crate) fn from_sorted_unchecked(entries: Vec<(usize, f64)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|&(n, c)| n >= 1 && c != 0.0));
        Vector { entries }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of nonzero coefficients.
    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn support(&self) -> IndexSet {
        IndexSet {
            elements: self.entries.iter().map(|&(n, _)| n).collect(),
        }
    }

    /// `e_n^*(x)`
    pub fn coefficient(&self, n: usize) -> f64 {
        match self.entries.binary_search_by_key(&n, |&(i, _)| i) {
            Ok(pos) => self.entries[pos].1,
            Err(_) => 0.0,
        }
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|&(n, _)| n)
    }

    pub fn min_index(&self) -> Option<usize> {
        self.entries.first().map(|&(n, _)| n)
    }

    /// Keeps the coordinates whose index satisfies `keep`.
    pub fn restrict<F: Fn(usize) -> bool>(&self, keep: F) -> Vector {
        Vector {
            entries: self
                .entries
                .iter()
                .copied()
                .filter(|&(n, _)| keep(n))
                .collect(),
        }
    }

    pub fn scale(&self, t: f64) -> Vector {
        if t == 0.0 {
            return Vector::zero();
        }
        Vector {
            entries: self.entries.iter().map(|&(n, c)| (n, c * t)).collect(),
        }
    }

    /// Coordinatewise sum; cancelling coefficients are removed.
    pub fn add(&self, other: &Vector) -> Vector {
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.entries, &other.entries);
        while i < a.len() || j < b.len() {
            let next = if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                i += 1;
                a[i - 1]
            } else if i == a.len() || b[j].0 < a[i].0 {
                j += 1;
                b[j - 1]
            } else {
                i += 1;
                j += 1;
                (a[i - 1].0, a[i - 1].1 + b[j - 1].1)
            };
            if next.1 != 0.0 {
                out.push(next);
            }
        }
        Vector { entries: out }
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        self.add(&other.scale(-1.0))
    }

    /// Parses a vector literal.
    ///
    /// Two forms are accepted: comma separated `index:coefficient` pairs
    /// (`"1:3, 2:-0.5"`) and a sum of terms `coefficient e index`
    /// (`"3e1 + 1e2 - e5"`). Coefficients may be decimals or fractions `p/q`.
    pub fn parse_literal(s: &str) -> Result<Vector> {
        let s = s.trim();
        if s.is_empty() || s == "0" {
            return Ok(Vector::zero());
        }
        if s.contains(':') {
            let mut pairs = Vec::new();
            for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                let (idx, coef) = item.split_once(':').ok_or_else(|| {
                    LabError::InvalidArgument(format!("expected index:coefficient, got {item:?}"))
                })?;
                pairs.push((parse_index(idx)?, parse_coefficient(coef)?));
            }
            return Vector::from_entries(pairs);
        }
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut terms = Vec::new();
        let mut start = 0;
        for (i, ch) in compact.char_indices() {
            if (ch == '+' || ch == '-') && i > start {
                terms.push(&compact[start..i]);
                start = i;
            }
        }
        terms.push(&compact[start..]);
        let mut pairs = Vec::new();
        for term in terms {
            let (coef, idx) = term.rsplit_once('e').ok_or_else(|| {
                LabError::InvalidArgument(format!("expected a term like 3e1, got {term:?}"))
            })?;
            let c = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                other => parse_coefficient(other)?,
            };
            pairs.push((parse_index(idx)?, c));
        }
        Vector::from_entries(pairs)
    }
}

fn parse_index(s: &str) -> Result<usize> {
    s.trim()
        .parse::<usize>()
        .map_err(|_| LabError::InvalidArgument(format!("bad index {s:?}")))
}

/// Parses a decimal or `p/q` coefficient. Dyadic values are represented exactly.
pub fn parse_coefficient(s: &str) -> Result<f64> {
    let s = s.trim();
    let bad = || LabError::InvalidArgument(format!("bad coefficient {s:?}"));
    let value = match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| bad())?;
            let q: f64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0.0 {
                return Err(bad());
            }
            p / q
        }
        None => s.parse().map_err(|_| bad())?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|(n, c)| format!("{n}:{c}"))
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

impl Serialize for Vector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.entries.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Vector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<(usize, f64)>::deserialize(deserializer)?;
        Vector::from_entries(pairs).map_err(serde::de::Error::custom)
    }
}

/// A finite sorted set of positive integers.
///
/// Ordering is lexicographic on the sorted elements, so `∅` precedes every
/// nonempty set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct IndexSet {
    elements: Vec<usize>,
}

impl IndexSet {
    pub fn empty() -> Self {
        IndexSet {
            elements: Vec::new(),
        }
    }

    pub fn new<I: IntoIterator<Item = usize>>(items: I) -> Result<Self> {
        let mut elements: Vec<usize> = items.into_iter().collect();
        if elements.contains(&0) {
            return invalid("indices start at 1");
        }
        elements.sort_unstable();
        elements.dedup();
        Ok(IndexSet { elements })
    }

    pub(crate) fn from_sorted_unchecked(elements: Vec<usize>) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(elements.first().is_none_or(|&n| n >= 1));
        IndexSet { elements }
    }

    /// `[lo, hi]`, empty when `lo > hi`.
    pub fn interval(lo: usize, hi: usize) -> Self {
        assert!(lo >= 1, "indices start at 1");
        IndexSet {
            elements: (lo..=hi).collect(),
        }
    }

    /// Decodes a bitmask where bit `i` stands for index `i + 1`.
    pub fn from_mask(mask: u64) -> Self {
        IndexSet {
            elements: (0..64)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| i + 1)
                .collect(),
        }
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.elements.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, n: usize) -> bool {
        self.elements.binary_search(&n).is_ok()
    }

    pub fn min(&self) -> Option<usize> {
        self.elements.first().copied()
    }

    pub fn max(&self) -> Option<usize> {
        self.elements.last().copied()
    }

    /// `self < other`: every element of `self` is below every element of
    /// `other`. Vacuously true when either set is empty.
    pub fn lies_before(&self, other: &IndexSet) -> bool {
        match (self.max(), other.min()) {
            (Some(a), Some(b)) => a < b,
            _ => true,
        }
    }

    pub fn is_disjoint(&self, other: &IndexSet) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.elements.len() && j < other.elements.len() {
            match self.elements[i].cmp(&other.elements[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        let mut elements: Vec<usize> = self.iter().chain(other.iter()).collect();
        elements.sort_unstable();
        elements.dedup();
        IndexSet { elements }
    }

    pub fn difference(&self, other: &IndexSet) -> IndexSet {
        IndexSet {
            elements: self.iter().filter(|&n| !other.contains(n)).collect(),
        }
    }

    pub fn is_interval(&self) -> bool {
        match (self.min(), self.max()) {
            (Some(lo), Some(hi)) => hi - lo + 1 == self.len(),
            _ => true,
        }
    }
}

impl<'de> Deserialize<'de> for IndexSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let items = Vec::<usize>::deserialize(deserializer)?;
        IndexSet::new(items).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.elements.iter().map(usize::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_i8(if *self == Sign::Plus { 1 } else { -1 })
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        match i8::deserialize(deserializer)? {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(serde::de::Error::custom(format!(
                "sign must be 1 or -1, got {other}"
            ))),
        }
    }
}

/// An assignment of `±1` to the elements of an index set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SignPattern {
    signs: Vec<(usize, Sign)>,
}

impl SignPattern {
    pub fn all_plus(set: &IndexSet) -> Self {
        SignPattern {
            signs: set.iter().map(|n| (n, Sign::Plus)).collect(),
        }
    }

    pub fn new<I: IntoIterator<Item = (usize, Sign)>>(pairs: I) -> Result<Self> {
        let mut signs: Vec<(usize, Sign)> = pairs.into_iter().collect();
        signs.sort_by_key(|&(n, _)| n);
        if signs.windows(2).any(|w| w[0].0 == w[1].0) {
            return invalid("sign pattern assigns an index twice");
        }
        Ok(SignPattern { signs })
    }

    /// The pattern whose `k`-th element (in index order) is negative iff bit
    /// `k` of `bits` is set.
    pub fn from_bits(set: &IndexSet, bits: u64) -> Self {
        SignPattern {
            signs: set
                .iter()
                .enumerate()
                .map(|(k, n)| {
                    (
                        n,
                        if bits >> k & 1 == 1 {
                            Sign::Minus
                        } else {
                            Sign::Plus
                        },
                    )
                })
                .collect(),
        }
    }

    /// All `2^|set|` sign patterns on `set`, in bit order.
    pub fn all_patterns(set: &IndexSet) -> impl Iterator<Item = SignPattern> + '_ {
        assert!(set.len() < 64);
        (0..1u64 << set.len()).map(move |bits| SignPattern::from_bits(set, bits))
    }

    pub fn domain(&self) -> IndexSet {
        IndexSet::from_sorted_unchecked(self.signs.iter().map(|&(n, _)| n).collect())
    }

    pub fn signs(&self) -> &[(usize, Sign)] {
        &self.signs
    }
}

/// `1_{εA} = Σ_{n∈A} ε_n e_n`; all-plus signs when `signs` is `None`.
pub fn indicator(set: &IndexSet, signs: Option<&SignPattern>) -> Result<Vector> {
    match signs {
        None => Ok(Vector::from_sorted_unchecked(
            set.iter().map(|n| (n, 1.0)).collect(),
        )),
        Some(pattern) => {
            if pattern.domain() != *set {
                return invalid(format!(
                    "sign pattern domain {} does not match set {}",
                    pattern.domain(),
                    set
                ));
            }
            Ok(Vector::from_sorted_unchecked(
                pattern.signs.iter().map(|&(n, s)| (n, s.value())).collect(),
            ))
        }
    }
}

/// `‖x‖_∞ = max_n |e_n^*(x)|`
pub fn sup_norm(x: &Vector) -> f64 {
    x.entries.iter().fold(0.0, |m, &(_, c)| m.max(c.abs()))
}

/// `s(A) = max A − min A + 1`, and 0 for the empty set.
pub fn span_length(set: &IndexSet) -> usize {
    match (set.min(), set.max()) {
        (Some(lo), Some(hi)) => hi - lo + 1,
        _ => 0,
    }
}

/// `x` surrounds `A` when `A` is empty or no support of `x` lies in `[min A, max A]`.
pub fn surrounds(x: &Vector, set: &IndexSet) -> bool {
    match (set.min(), set.max()) {
        (Some(lo), Some(hi)) => !x.entries.iter().any(|&(n, _)| lo <= n && n <= hi),
        _ => true,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LpExponent {
    One,
    Two,
    Infinity,
}

impl Serialize for LpExponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            LpExponent::One => serializer.serialize_u8(1),
            LpExponent::Two => serializer.serialize_u8(2),
            LpExponent::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for LpExponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Num(p) if p == 1.0 => Ok(LpExponent::One),
            Raw::Num(p) if p == 2.0 => Ok(LpExponent::Two),
            Raw::Text(t) if matches!(t.as_str(), "inf" | "infinity" | "∞") => {
                Ok(LpExponent::Infinity)
            }
            _ => Err(serde::de::Error::custom("p must be 1, 2 or \"inf\"")),
        }
    }
}

pub fn lp_norm(x: &Vector, p: LpExponent) -> f64 {
    match p {
        LpExponent::One => x.entries.iter().map(|&(_, c)| c.abs()).sum(),
        LpExponent::Two => x.entries.iter().map(|&(_, c)| c * c).sum::<f64>().sqrt(),
        LpExponent::Infinity => sup_norm(x),
    }
}

/// Whether `n` belongs to the marked set `{1, 2, 4, 8, …}` of the
/// two-weight counterexample space.
pub fn is_power_of_two_index(n: usize) -> bool {
    n.is_power_of_two()
}

#[inline]
fn root_weight(i: usize) -> f64 {
    1.0 / (i as f64).sqrt()
}

#[inline]
fn harmonic_weight(i: usize) -> f64 {
    1.0 / i as f64
}

/// Pairs magnitudes sorted decreasingly with the weights `w(1) ≥ w(2) ≥ …` and
/// sums from the smallest term up.
fn rearranged_sum(mags: &mut [f64], weight: fn(usize) -> f64) -> f64 {
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    for i in (0..mags.len()).rev() {
        acc += weight(i + 1) * mags[i];
    }
    acc
}

fn counterexample_norm_with(x: &Vector, marked: impl Fn(usize) -> bool) -> f64 {
    let mut on: SmallVec<[f64; 16]> = SmallVec::new();
    let mut off: SmallVec<[f64; 16]> = SmallVec::new();
    for &(n, c) in &x.entries {
        if marked(n) {
            on.push(c.abs());
        } else {
            off.push(c.abs());
        }
    }
    rearranged_sum(&mut on, root_weight) + rearranged_sum(&mut off, harmonic_weight)
}

/// Norm of the two-weight space: coefficients on powers of two are paired
/// with `1/√k`, the rest with `1/k`, each after decreasing rearrangement
/// (which realizes the supremum over bijections).
pub fn counterexample_norm(x: &Vector) -> f64 {
    counterexample_norm_with(x, is_power_of_two_index)
}

/// `‖1_A‖` in the two-weight space as a function of `a = |A ∩ D|` and
/// `b = |A \ D|`. Accumulates in the same order as [`counterexample_norm`],
/// so the two agree bit for bit on indicators.
pub fn counterexample_indicator_norm(a: usize, b: usize) -> f64 {
    let mut on = 0.0;
    for i in (1..=a).rev() {
        on += root_weight(i);
    }
    let mut off = 0.0;
    for i in (1..=b).rev() {
        off += harmonic_weight(i);
    }
    on + off
}

/// A norm oracle on finitely supported vectors.
pub trait Norm: Sync {
    fn norm(&self, x: &Vector) -> f64;
}

impl<F: Fn(&Vector) -> f64 + Sync> Norm for F {
    fn norm(&self, x: &Vector) -> f64 {
        self(x)
    }
}

/// The built-in norm families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "lowercase")]
pub enum SpaceKind {
    Lp {
        p: LpExponent,
    },
    /// The two-weight space. With `mirror_cap = M` the indices `1..=M` are
    /// reversed (`n ↦ M + 1 − n`) before the norm is taken.
    Counterexample {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mirror_cap: Option<usize>,
    },
    /// Weighted ℓ1: `Σ w_n |x_n|`; indices past the list reuse the last weight.
    Weighted {
        weights: Vec<f64>,
    },
}

/// A named norm oracle with an ambient index cap for searches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub name: String,
    #[serde(flatten)]
    pub kind: SpaceKind,
    #[serde(default = "default_ambient_cap")]
    pub ambient_cap: usize,
}

fn default_ambient_cap() -> usize {
    DEFAULT_AMBIENT_CAP
}

impl SpaceSpec {
    pub fn lp(p: LpExponent, ambient_cap: usize) -> Self {
        let name = match p {
            LpExponent::One => "l1",
            LpExponent::Two => "l2",
            LpExponent::Infinity => "linf",
        };
        SpaceSpec {
            name: name.into(),
            kind: SpaceKind::Lp { p },
            ambient_cap,
        }
    }

    pub fn counterexample(ambient_cap: usize) -> Self {
        SpaceSpec {
            name: "counterexample".into(),
            kind: SpaceKind::Counterexample { mirror_cap: None },
            ambient_cap,
        }
    }

    pub fn mirrored_counterexample(mirror_cap: usize, ambient_cap: usize) -> Self {
        SpaceSpec {
            name: format!("counterexample-mirror{mirror_cap}"),
            kind: SpaceKind::Counterexample {
                mirror_cap: Some(mirror_cap),
            },
            ambient_cap,
        }
    }

    pub fn weighted(name: &str, weights: Vec<f64>, ambient_cap: usize) -> Self {
        SpaceSpec {
            name: name.into(),
            kind: SpaceKind::Weighted { weights },
            ambient_cap,
        }
    }

    /// Weighted ℓ1 with weights `1/2, 1, 2, 4, …` on `1..=n`.
    pub fn increasing_weights(n: usize) -> Self {
        let weights = (0..n).map(|k| 2f64.powi(k as i32 - 1)).collect();
        SpaceSpec::weighted("increasing-weights", weights, n)
    }

    /// Weighted ℓ1 with weights `1, 1/2, 1/4, …` on `1..=n`.
    pub fn decreasing_weights(n: usize) -> Self {
        let weights = (0..n).map(|k| 2f64.powi(-(k as i32))).collect();
        SpaceSpec::weighted("decreasing-weights", weights, n)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SpaceSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_ambient_cap(mut self, ambient_cap: usize) -> Self {
        self.ambient_cap = ambient_cap;
        self
    }

    /// Whether every built-in norm of this kind is 1-unconditional.
    pub fn is_one_unconditional(&self) -> bool {
        true
    }

    /// Parameter checks plus a sampled test of the norm axioms.
    pub fn validate(&self) -> Result<()> {
        if self.ambient_cap == 0 {
            return Err(LabError::Config("ambient_cap must be at least 1".into()));
        }
        match &self.kind {
            SpaceKind::Weighted { weights } => {
                if weights.is_empty() {
                    return Err(LabError::Config(
                        "weighted space needs at least one weight".into(),
                    ));
                }
                if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
                    return Err(LabError::Config(format!(
                        "weights must be positive and finite, got {w}"
                    )));
                }
            }
            SpaceKind::Counterexample {
                mirror_cap: Some(0),
            } => {
                return Err(LabError::Config("mirror_cap must be at least 1".into()));
            }
            _ => {}
        }
        if !self.norm(&Vector::zero()).eq(&0.0) {
            return Err(LabError::Config("norm of the zero vector is not 0".into()));
        }
        for n in 1..=self.ambient_cap {
            let v = self.norm(&Vector::unit(n));
            if !(v.is_finite() && v > 0.0) {
                return Err(LabError::Config(format!("‖e_{n}‖ = {v} is not positive")));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let cap = self.ambient_cap.min(16);
        let sample = |rng: &mut ChaCha8Rng| {
            let mut pairs = Vec::new();
            for n in 1..=cap {
                if rng.gen_bool(0.4) {
                    pairs.push((n, rng.gen_range(-2.0..2.0)));
                }
            }
            Vector::from_entries(pairs).expect("sampled vector is valid")
        };
        for _ in 0..64 {
            let x = sample(&mut rng);
            let y = sample(&mut rng);
            let t: f64 = rng.gen_range(-3.0..3.0);
            let (nx, ny) = (self.norm(&x), self.norm(&y));
            let homogeneous = (self.norm(&x.scale(t)) - t.abs() * nx).abs() <= 1e-12 * (1.0 + nx);
            let triangle = self.norm(&x.add(&y)) <= (nx + ny) * (1.0 + 1e-12) + 1e-12;
            if !homogeneous || !triangle || (!x.is_zero() && nx <= 0.0) {
                return Err(LabError::Config(format!(
                    "space {:?} fails the sampled norm axioms at x = {x}",
                    self.name
                )));
            }
        }
        Ok(())
    }

    /// Exposes the count-based indicator structure, when the norm of `1_A`
    /// depends only on how many elements of `A` fall in each of two classes.
    pub fn indicator_model(&self) -> Option<IndicatorModel> {
        match self.kind {
            SpaceKind::Lp { p } => Some(IndicatorModel::CountOnly(p)),
            SpaceKind::Counterexample { mirror_cap } => {
                Some(IndicatorModel::TwoWeight { mirror_cap })
            }
            SpaceKind::Weighted { .. } => None,
        }
    }
}

fn mirror_index(n: usize, mirror_cap: Option<usize>) -> usize {
    match mirror_cap {
        Some(m) if n <= m => m + 1 - n,
        _ => n,
    }
}

impl Norm for SpaceSpec {
    fn norm(&self, x: &Vector) -> f64 {
        match &self.kind {
            SpaceKind::Lp { p } => lp_norm(x, *p),
            SpaceKind::Counterexample { mirror_cap: None } => counterexample_norm(x),
            SpaceKind::Counterexample { mirror_cap } => {
                let m = *mirror_cap;
                counterexample_norm_with(x, move |n| is_power_of_two_index(mirror_index(n, m)))
            }
            SpaceKind::Weighted { weights } => {
                let last = *weights.last().expect("validated nonempty");
                x.entries
                    .iter()
                    .map(|&(n, c)| weights.get(n - 1).copied().unwrap_or(last) * c.abs())
                    .sum()
            }
        }
    }
}

/// Count-based description of `‖1_A‖` for class-symmetric spaces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IndicatorModel {
    /// `‖1_A‖` depends on `|A|` only.
    CountOnly(LpExponent),
    /// `‖1_A‖ = Σ_{k≤|A∩D|} 1/√k + Σ_{k≤|A\D|} 1/k`, with `D` read through the mirror map.
    TwoWeight { mirror_cap: Option<usize> },
}

impl IndicatorModel {
    /// Whether `n` is in the marked class (`D` for the two-weight space).
    pub fn is_marked(&self, n: usize) -> bool {
        match self {
            IndicatorModel::CountOnly(_) => false,
            IndicatorModel::TwoWeight { mirror_cap } => {
                is_power_of_two_index(mirror_index(n, *mirror_cap))
            }
        }
    }

    /// `‖1_A‖` for `marked` elements in the marked class and `unmarked` outside it.
    pub fn indicator_norm(&self, marked: usize, unmarked: usize) -> f64 {
        match self {
            IndicatorModel::CountOnly(p) => {
                let k = marked + unmarked;
                match p {
                    LpExponent::One => k as f64,
                    LpExponent::Two => (k as f64).sqrt(),
                    LpExponent::Infinity => {
                        if k == 0 {
                            0.0
                        } else {
                            1.0
                        }
                    }
                }
            }
            IndicatorModel::TwoWeight { .. } => counterexample_indicator_norm(marked, unmarked),
        }
    }
}

/// The built-in spaces shipped as a corpus (`l1`, `l2`, `linf`, the two-weight
/// space, its mirror image, and increasing/decreasing weighted ℓ1).
pub fn builtin_corpus(ambient_cap: usize) -> Vec<SpaceSpec> {
    vec![
        SpaceSpec::lp(LpExponent::One, ambient_cap),
        SpaceSpec::lp(LpExponent::Two, ambient_cap),
        SpaceSpec::lp(LpExponent::Infinity, ambient_cap),
        SpaceSpec::counterexample(ambient_cap),
        SpaceSpec::mirrored_counterexample(ambient_cap, ambient_cap),
        SpaceSpec::increasing_weights(ambient_cap),
        SpaceSpec::decreasing_weights(ambient_cap),
    ]
}
