//! Finite search families standing in for "all of the space" in suprema.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::space::{IndexSet, Vector};

/// Which sign patterns are enumerated for family vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignCoverage {
    /// Every `±1` assignment.
    All,
    /// Every assignment with the first coefficient positive. Lossless for
    /// ratios of norms, which are invariant under `x ↦ −x`.
    UpToGlobalSign,
}

/// Vectors with support in `[1..ambient_cap]` of size at most
/// `support_size_max`, magnitudes from `coefficient_grid` and all signs;
/// index sets for set-pair searches have size at most `set_size_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchFamily {
    pub ambient_cap: usize,
    pub support_size_max: usize,
    pub set_size_max: usize,
    pub coefficient_grid: Vec<f64>,
    pub sign_patterns: SignCoverage,
    /// Identifier of the admissibility predicate applied to tuples; filled in
    /// by each estimator.
    pub set_pair_constraints: String,
}

impl Default for SearchFamily {
    fn default() -> Self {
        SearchFamily::standard()
    }
}

impl SearchFamily {
    /// Supports up to 4 in `[1..12]` with magnitudes `{1/4, 1/2, 1, 2}`.
    pub fn standard() -> Self {
        SearchFamily {
            ambient_cap: 12,
            support_size_max: 4,
            set_size_max: 4,
            coefficient_grid: vec![0.25, 0.5, 1.0, 2.0],
            sign_patterns: SignCoverage::UpToGlobalSign,
            set_pair_constraints: "none".into(),
        }
    }

    /// The family used for perturbation tuples `(x, A, B, ε, δ)`, where every
    /// extra index set multiplies the work: supports up to 3 in `[1..8]`,
    /// magnitudes `{1/2, 1}`, sets up to 3.
    pub fn compact() -> Self {
        SearchFamily {
            ambient_cap: 8,
            support_size_max: 3,
            set_size_max: 3,
            coefficient_grid: vec![0.5, 1.0],
            sign_patterns: SignCoverage::UpToGlobalSign,
            set_pair_constraints: "none".into(),
        }
    }

    pub fn with_ambient_cap(mut self, ambient_cap: usize) -> Self {
        self.ambient_cap = ambient_cap;
        self
    }

    pub fn with_grid(mut self, grid: Vec<f64>) -> Self {
        self.coefficient_grid = grid;
        self
    }

    pub fn with_support_size_max(mut self, k: usize) -> Self {
        self.support_size_max = k;
        self
    }

    pub fn with_set_size_max(mut self, k: usize) -> Self {
        self.set_size_max = k;
        self
    }

    pub(crate) fn constrained(&self, predicate: &str) -> Self {
        let mut f = self.clone();
        f.set_pair_constraints = predicate.into();
        f
    }

    pub fn validate(&self) -> Result<()> {
        if self.ambient_cap == 0 || self.ambient_cap > 60 {
            return invalid(format!(
                "family ambient cap must be in 1..=60, got {}",
                self.ambient_cap
            ));
        }
        if self.support_size_max == 0 {
            return invalid("support_size_max must be at least 1");
        }
        if self.coefficient_grid.is_empty() {
            return invalid("coefficient grid is empty");
        }
        if let Some(c) = self
            .coefficient_grid
            .iter()
            .find(|c| !(c.is_finite() && **c > 0.0))
        {
            return invalid(format!("grid magnitudes must be positive, got {c}"));
        }
        Ok(())
    }

    /// Grid magnitudes, optionally restricted to `≤ 1` (for `‖x‖_∞ ≤ 1`).
    pub fn magnitudes(&self, unit_ball: bool) -> Vec<f64> {
        let mut g: Vec<f64> = self
            .coefficient_grid
            .iter()
            .copied()
            .filter(|&c| !unit_ball || c <= 1.0)
            .collect();
        g.sort_by(f64::total_cmp);
        g.dedup();
        g
    }

    /// Supports ordered by size, then lexicographically.
    pub fn supports(&self) -> Vec<IndexSet> {
        let mut out = Vec::new();
        for k in 1..=self.support_size_max.min(self.ambient_cap) {
            out.extend(subsets_of_size(self.ambient_cap, k));
        }
        out
    }

    /// Calls `f` on every family vector supported exactly on `support`.
    pub fn for_each_vector_on<F: FnMut(&Vector)>(
        &self,
        support: &IndexSet,
        unit_ball: bool,
        mut f: F,
    ) {
        let _ = self.try_for_each_vector_on(support, unit_ball, |x| {
            f(x);
            Ok(())
        });
    }

    /// Like [`Self::for_each_vector_on`], stopping at the first error.
    pub fn try_for_each_vector_on<F: FnMut(&Vector) -> Result<()>>(
        &self,
        support: &IndexSet,
        unit_ball: bool,
        mut f: F,
    ) -> Result<()> {
        let mags = self.magnitudes(unit_ball);
        let k = support.len();
        if mags.is_empty() || k == 0 {
            return Ok(());
        }
        let sign_bits = match self.sign_patterns {
            SignCoverage::All => k,
            SignCoverage::UpToGlobalSign => k - 1,
        };
        let mut digits = vec![0usize; k];
        loop {
            for bits in 0..1u64 << sign_bits {
                let entries: Vec<(usize, f64)> = support
                    .iter()
                    .enumerate()
                    .map(|(pos, n)| {
                        let flip = match self.sign_patterns {
                            SignCoverage::All => bits >> pos & 1 == 1,
                            SignCoverage::UpToGlobalSign => pos > 0 && bits >> (pos - 1) & 1 == 1,
                        };
                        let c = mags[digits[pos]];
                        (n, if flip { -c } else { c })
                    })
                    .collect();
                f(&Vector::from_sorted_unchecked(entries))?;
            }
            let mut pos = k;
            loop {
                if pos == 0 {
                    return Ok(());
                }
                pos -= 1;
                digits[pos] += 1;
                if digits[pos] < mags.len() {
                    break;
                }
                digits[pos] = 0;
            }
        }
    }

    /// Number of nonzero family vectors.
    pub fn vector_count(&self, unit_ball: bool) -> u64 {
        let g = self.magnitudes(unit_ball).len() as u64;
        (1..=self.support_size_max.min(self.ambient_cap))
            .map(|k| {
                let signs = match self.sign_patterns {
                    SignCoverage::All => 1u64 << k,
                    SignCoverage::UpToGlobalSign => 1u64 << (k - 1),
                };
                crate::greedy::binomial(self.ambient_cap, k) as u64 * g.pow(k as u32) * signs
            })
            .sum()
    }

    pub fn description(&self) -> String {
        let mut s = String::new();
        let grid: Vec<String> = self
            .coefficient_grid
            .iter()
            .map(|c| c.to_string())
            .collect();
        let _ = write!(
            s,
            "supports of size <= {} in [1..{}], magnitudes {{{}}}, signs {}, index sets of size <= {}",
            self.support_size_max,
            self.ambient_cap,
            grid.join(", "),
            match self.sign_patterns {
                SignCoverage::All => "all",
                SignCoverage::UpToGlobalSign => "all up to a global flip",
            },
            self.set_size_max,
        );
        if self.set_pair_constraints != "none" {
            let _ = write!(s, "; constraint: {}", self.set_pair_constraints);
        }
        s
    }
}

/// All `k`-subsets of `[1..n]` in lexicographic order.
pub fn subsets_of_size(n: usize, k: usize) -> Vec<IndexSet> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut current: Vec<usize> = (1..=k).collect();
    loop {
        out.push(IndexSet::from_sorted_unchecked(current.clone()));
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if current[i] < n - (k - 1 - i) {
                current[i] += 1;
                for j in i + 1..k {
                    current[j] = current[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// All subsets of `[1..n]` with at most `k` elements, by size then lexicographically.
pub fn subsets_up_to(n: usize, k: usize) -> Vec<IndexSet> {
    (0..=k.min(n)).flat_map(|j| subsets_of_size(n, j)).collect()
}

/// Reproducible random vectors: each index in `[1..ambient_cap]` is kept with
/// probability `density`, with a dyadic magnitude `j/64`, `j ∈ 1..=256`, and a
/// random sign.
pub fn random_vectors(seed: u64, count: usize, ambient_cap: usize, density: f64) -> Vec<Vector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut entries = Vec::new();
            for n in 1..=ambient_cap {
                if rng.gen_bool(density) {
                    let c = rng.gen_range(1..=256) as f64 / 64.0;
                    entries.push((n, if rng.gen_bool(0.5) { -c } else { c }));
                }
            }
            Vector::from_sorted_unchecked(entries)
        })
        .collect()
}
