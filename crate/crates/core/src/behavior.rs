//! Counts, conditional outcome distributions and the losses between them.
//!
//! All tables are flat, row-major over `(s, t, x, y)`: Alice's setting and
//! Bob's setting select a block, and each block holds the `nX * nY` outcome
//! pairs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-cell normalization tolerance for [`Behavior`] blocks.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Default floor applied to probabilities inside [`nll_loss`].
pub const DEFAULT_NLL_CLAMP: f64 = 1e-12;

/// Index ranges of a bipartite experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Scenario {
    /// Alice settings.
    pub n_s: usize,
    /// Bob settings.
    pub n_t: usize,
    /// Alice outcomes.
    pub n_x: usize,
    /// Bob outcomes.
    pub n_y: usize,
}

impl Scenario {
    pub fn new(n_s: usize, n_t: usize, n_x: usize, n_y: usize) -> Result<Self> {
        let sc = Self { n_s, n_t, n_x, n_y };
        sc.validate()?;
        Ok(sc)
    }

    /// `n` settings per side, binary outcomes.
    pub fn binary(n: usize) -> Self {
        Self {
            n_s: n,
            n_t: n,
            n_x: 2,
            n_y: 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_s == 0 || self.n_t == 0 || self.n_x == 0 || self.n_y == 0 {
            return Err(Error::InvalidScenario(format!(
                "all dimensions must be positive, got {self}"
            )));
        }
        Ok(())
    }

    pub fn n_pairs(&self) -> usize {
        self.n_s * self.n_t
    }

    pub fn is_binary(&self) -> bool {
        self.n_x == 2 && self.n_y == 2
    }

    pub fn block_len(&self) -> usize {
        self.n_x * self.n_y
    }

    pub fn len(&self) -> usize {
        self.n_pairs() * self.block_len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, s: usize, t: usize, x: usize, y: usize) -> usize {
        ((s * self.n_t + t) * self.n_x + x) * self.n_y + y
    }

    /// Inverse of [`Scenario::index`].
    pub fn coords(&self, i: usize) -> (usize, usize, usize, usize) {
        let y = i % self.n_y;
        let r = i / self.n_y;
        let x = r % self.n_x;
        let r = r / self.n_x;
        (r / self.n_t, r % self.n_t, x, y)
    }

    fn ensure_same(&self, other: &Scenario) -> Result<()> {
        if self != other {
            return Err(Error::ScenarioMismatch {
                left: *self,
                right: *other,
            });
        }
        Ok(())
    }
}

impl Default for Scenario {
    fn default() -> Self {
        Self::binary(6)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}x{} settings, {}x{} outcomes",
            self.n_s, self.n_t, self.n_x, self.n_y
        )
    }
}

/// Raw coincidence counts `N(x, y | s, t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    scenario: Scenario,
    counts: Vec<u64>,
}

impl CountTable {
    pub fn zeros(scenario: Scenario) -> Self {
        Self {
            scenario,
            counts: vec![0; scenario.len()],
        }
    }

    pub fn from_vec(scenario: Scenario, counts: Vec<u64>) -> Result<Self> {
        scenario.validate()?;
        if counts.len() != scenario.len() {
            return Err(Error::Dimension {
                what: "count table",
                expected: scenario.len(),
                got: counts.len(),
            });
        }
        Ok(Self { scenario, counts })
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.counts
    }

    pub fn get(&self, s: usize, t: usize, x: usize, y: usize) -> u64 {
        self.counts[self.scenario.index(s, t, x, y)]
    }

    pub fn set(&mut self, s: usize, t: usize, x: usize, y: usize, n: u64) {
        let i = self.scenario.index(s, t, x, y);
        self.counts[i] = n;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn pair_total(&self, s: usize, t: usize) -> u64 {
        let b = self.scenario.block_len();
        let start = (s * self.scenario.n_t + t) * b;
        self.counts[start..start + b].iter().sum()
    }
}

/// Conditional distribution `P(x, y | s, t)`; every setting-pair block sums
/// to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Behavior {
    scenario: Scenario,
    p: Vec<f64>,
}

impl Behavior {
    /// Validates entries in `[0, 1]` and per-block normalization.
    pub fn from_vec(scenario: Scenario, p: Vec<f64>) -> Result<Self> {
        scenario.validate()?;
        if p.len() != scenario.len() {
            return Err(Error::Dimension {
                what: "behavior",
                expected: scenario.len(),
                got: p.len(),
            });
        }
        let b = Self { scenario, p };
        b.validate()?;
        Ok(b)
    }

    /// No validation; for predictors whose output is normalized by
    /// construction.
    pub(crate) fn from_vec_unchecked(scenario: Scenario, p: Vec<f64>) -> Self {
        debug_assert_eq!(p.len(), scenario.len());
        Self { scenario, p }
    }

    pub fn uniform(scenario: Scenario) -> Self {
        let v = 1.0 / scenario.block_len() as f64;
        Self {
            scenario,
            p: vec![v; scenario.len()],
        }
    }

    /// Builds a behavior cell by cell.
    pub fn from_fn(
        scenario: Scenario,
        mut f: impl FnMut(usize, usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let p = (0..scenario.len())
            .map(|i| {
                let (s, t, x, y) = scenario.coords(i);
                f(s, t, x, y)
            })
            .collect();
        Self::from_vec(scenario, p)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, &v) in self.p.iter().enumerate() {
            if !(-NORMALIZATION_TOL..=1.0 + NORMALIZATION_TOL).contains(&v) || !v.is_finite() {
                let (s, t, x, y) = self.scenario.coords(i);
                return Err(Error::InvalidBehavior(format!(
                    "p({x},{y}|{s},{t}) = {v} outside [0, 1]"
                )));
            }
        }
        for (k, block) in self.p.chunks(self.scenario.block_len()).enumerate() {
            let sum: f64 = block.iter().sum();
            if (sum - 1.0).abs() > NORMALIZATION_TOL {
                return Err(Error::InvalidBehavior(format!(
                    "block (s={}, t={}) sums to {sum}",
                    k / self.scenario.n_t,
                    k % self.scenario.n_t
                )));
            }
        }
        Ok(())
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.p
    }

    #[inline]
    pub fn get(&self, s: usize, t: usize, x: usize, y: usize) -> f64 {
        self.p[self.scenario.index(s, t, x, y)]
    }

    /// Largest absolute cell difference.
    pub fn max_abs_diff(&self, other: &Behavior) -> Result<f64> {
        self.scenario.ensure_same(&other.scenario)?;
        Ok(self
            .p
            .iter()
            .zip(&other.p)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Alice's marginal `Σ_y P(x, y | s, t)`.
    pub fn marginal_x(&self, s: usize, t: usize, x: usize) -> f64 {
        (0..self.scenario.n_y).map(|y| self.get(s, t, x, y)).sum()
    }

    /// Bob's marginal `Σ_x P(x, y | s, t)`.
    pub fn marginal_y(&self, s: usize, t: usize, y: usize) -> f64 {
        (0..self.scenario.n_x).map(|x| self.get(s, t, x, y)).sum()
    }
}

/// Relative frequencies: each setting-pair block divided by its own total.
pub fn normalize(counts: &CountTable) -> Result<Behavior> {
    let sc = counts.scenario;
    let b = sc.block_len();
    let mut p = Vec::with_capacity(sc.len());
    for (k, block) in counts.counts.chunks(b).enumerate() {
        let total: u64 = block.iter().sum();
        if total == 0 {
            return Err(Error::ZeroTotal {
                s: k / sc.n_t,
                t: k % sc.n_t,
            });
        }
        let total = total as f64;
        p.extend(block.iter().map(|&n| n as f64 / total));
    }
    Ok(Behavior::from_vec_unchecked(sc, p))
}

/// Squared-error loss `Σ (P − F)²` summed over every cell.
pub fn sq_loss(p: &Behavior, f: &Behavior) -> Result<f64> {
    p.scenario.ensure_same(&f.scenario)?;
    Ok(sq_loss_slices(&p.p, &f.p))
}

#[inline]
pub(crate) fn sq_loss_slices(p: &[f64], f: &[f64]) -> f64 {
    p.iter()
        .zip(f)
        .map(|(a, b)| {
            let d = a - b;
            d * d
        })
        .sum()
}

/// Negative log-likelihood `−Σ N ln P` with `P` floored at `clamp`.
///
/// Cells with zero count contribute nothing, whatever their probability.
pub fn nll_loss(p: &Behavior, counts: &CountTable, clamp: f64) -> Result<f64> {
    p.scenario.ensure_same(&counts.scenario)?;
    Ok(p.p
        .iter()
        .zip(&counts.counts)
        .filter(|(_, &n)| n > 0)
        .map(|(&q, &n)| -(n as f64) * q.max(clamp).ln())
        .sum())
}

/// Largest change of either party's marginal under the remote party's
/// setting. Zero exactly when the behavior is no-signalling.
pub fn signalling_deficit(f: &Behavior) -> f64 {
    let sc = f.scenario;
    let mut worst: f64 = 0.0;
    // Bob's marginal against Alice's setting.
    for t in 0..sc.n_t {
        for y in 0..sc.n_y {
            let m: Vec<f64> = (0..sc.n_s).map(|s| f.marginal_y(s, t, y)).collect();
            worst = worst.max(spread(&m));
        }
    }
    // Alice's marginal against Bob's setting.
    for s in 0..sc.n_s {
        for x in 0..sc.n_x {
            let m: Vec<f64> = (0..sc.n_t).map(|t| f.marginal_x(s, t, x)).collect();
            worst = worst.max(spread(&m));
        }
    }
    worst
}

/// Correlator `Σ (−1)^(x+y) P(x, y | s, t)` for binary outcomes.
pub fn correlator(f: &Behavior, s: usize, t: usize) -> f64 {
    f.get(s, t, 0, 0) - f.get(s, t, 0, 1) - f.get(s, t, 1, 0) + f.get(s, t, 1, 1)
}

/// CHSH value `E(s0,t0) + E(s0,t1) + E(s1,t0) − E(s1,t1)`.
pub fn chsh(f: &Behavior, s: [usize; 2], t: [usize; 2]) -> f64 {
    correlator(f, s[0], t[0]) + correlator(f, s[0], t[1]) + correlator(f, s[1], t[0])
        - correlator(f, s[1], t[1])
}

/// Largest `|CHSH|` over every 2×2 sub-grid of settings and every placement
/// of the minus sign. Binary outcomes only.
pub fn max_chsh(f: &Behavior) -> f64 {
    let sc = f.scenario;
    let mut best: f64 = 0.0;
    for s0 in 0..sc.n_s {
        for s1 in 0..sc.n_s {
            if s1 == s0 {
                continue;
            }
            for t0 in 0..sc.n_t {
                for t1 in 0..sc.n_t {
                    if t1 == t0 {
                        continue;
                    }
                    best = best.max(chsh(f, [s0, s1], [t0, t1]).abs());
                }
            }
        }
    }
    best
}

fn spread(v: &[f64]) -> f64 {
    let (lo, hi) = v
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &a| {
            (lo.min(a), hi.max(a))
        });
    hi - lo
}
