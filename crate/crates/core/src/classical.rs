//! Compatible-distribution maps for the classical causal models.
//!
//! * common cause (cCC): `P(xy|st) = Σ_λ P(x|s,λ) P(y|t,λ) P(λ)`
//! * cause-effect, setting-to-remote-outcome (cCE0):
//!   `P(xy|st) = Σ_λ P(x|s,λ) P(y|s,t,λ) P(λ)`
//! * superdeterministic, latent parent of `S` (cSD0):
//!   `P(xy|st) = Σ_λ P(x|s,λ) P(y|t,λ) P(s|λ) P(λ) / Σ_λ' P(s|λ') P(λ')`
//!
//! Conditional tables are stored flat with full outcome rows, so the same
//! code serves binary and many-valued outcomes. Index orders are documented
//! on each field.

use serde::{Deserialize, Serialize};

use crate::behavior::{Behavior, Scenario};
use crate::error::{Error, Result};

/// Default cap on the latent cardinality explored by a sweep.
pub const DEFAULT_MAX_CARDINALITY: usize = 16;

const PARAM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CccParams {
    pub d: usize,
    /// `P(λ)`, length `d`.
    pub p_lambda: Vec<f64>,
    /// `P(x|s,λ)` at `(s * d + λ) * nX + x`.
    pub p_x_given_s_lambda: Vec<f64>,
    /// `P(y|t,λ)` at `(t * d + λ) * nY + y`.
    pub p_y_given_t_lambda: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cce0Params {
    pub d: usize,
    pub p_lambda: Vec<f64>,
    /// `P(x|s,λ)` at `(s * d + λ) * nX + x`.
    pub p_x_given_s_lambda: Vec<f64>,
    /// `P(y|s,t,λ)` at `((s * nT + t) * d + λ) * nY + y`.
    pub p_y_given_s_t_lambda: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Csd0Params {
    pub d: usize,
    pub p_lambda: Vec<f64>,
    /// `P(s|λ)` at `λ * nS + s`.
    pub p_s_given_lambda: Vec<f64>,
    /// `P(x|s,λ)` at `(s * d + λ) * nX + x`.
    pub p_x_given_s_lambda: Vec<f64>,
    /// `P(y|t,λ)` at `(t * d + λ) * nY + y`.
    pub p_y_given_t_lambda: Vec<f64>,
}

fn check_len(what: &'static str, v: &[f64], expected: usize) -> Result<()> {
    if v.len() != expected {
        return Err(Error::Dimension {
            what,
            expected,
            got: v.len(),
        });
    }
    Ok(())
}

/// Every consecutive row of `row_len` entries is a probability vector.
fn check_simplex_rows(what: &str, v: &[f64], row_len: usize) -> Result<()> {
    for (r, row) in v.chunks(row_len).enumerate() {
        if let Some(bad) = row
            .iter()
            .find(|&&p| !p.is_finite() || !(-PARAM_TOL..=1.0 + PARAM_TOL).contains(&p))
        {
            return Err(Error::InvalidParams(format!(
                "{what} row {r} has entry {bad} outside [0, 1]"
            )));
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > PARAM_TOL {
            return Err(Error::InvalidParams(format!(
                "{what} row {r} sums to {sum}"
            )));
        }
    }
    Ok(())
}

fn check_d(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::InvalidParams("latent cardinality must be ≥ 1".into()));
    }
    Ok(())
}

impl CccParams {
    pub fn validate(&self, sc: &Scenario) -> Result<()> {
        check_d(self.d)?;
        check_len("p_lambda", &self.p_lambda, self.d)?;
        check_len("p_x_given_s_lambda", &self.p_x_given_s_lambda, sc.n_s * self.d * sc.n_x)?;
        check_len("p_y_given_t_lambda", &self.p_y_given_t_lambda, sc.n_t * self.d * sc.n_y)?;
        check_simplex_rows("p_lambda", &self.p_lambda, self.d)?;
        check_simplex_rows("p_x_given_s_lambda", &self.p_x_given_s_lambda, sc.n_x)?;
        check_simplex_rows("p_y_given_t_lambda", &self.p_y_given_t_lambda, sc.n_y)
    }
}

impl Cce0Params {
    pub fn validate(&self, sc: &Scenario) -> Result<()> {
        check_d(self.d)?;
        check_len("p_lambda", &self.p_lambda, self.d)?;
        check_len("p_x_given_s_lambda", &self.p_x_given_s_lambda, sc.n_s * self.d * sc.n_x)?;
        check_len(
            "p_y_given_s_t_lambda",
            &self.p_y_given_s_t_lambda,
            sc.n_s * sc.n_t * self.d * sc.n_y,
        )?;
        check_simplex_rows("p_lambda", &self.p_lambda, self.d)?;
        check_simplex_rows("p_x_given_s_lambda", &self.p_x_given_s_lambda, sc.n_x)?;
        check_simplex_rows("p_y_given_s_t_lambda", &self.p_y_given_s_t_lambda, sc.n_y)
    }
}

impl Csd0Params {
    pub fn validate(&self, sc: &Scenario) -> Result<()> {
        check_d(self.d)?;
        check_len("p_lambda", &self.p_lambda, self.d)?;
        check_len("p_s_given_lambda", &self.p_s_given_lambda, self.d * sc.n_s)?;
        check_len("p_x_given_s_lambda", &self.p_x_given_s_lambda, sc.n_s * self.d * sc.n_x)?;
        check_len("p_y_given_t_lambda", &self.p_y_given_t_lambda, sc.n_t * self.d * sc.n_y)?;
        check_simplex_rows("p_lambda", &self.p_lambda, self.d)?;
        check_simplex_rows("p_s_given_lambda", &self.p_s_given_lambda, sc.n_s)?;
        check_simplex_rows("p_x_given_s_lambda", &self.p_x_given_s_lambda, sc.n_x)?;
        check_simplex_rows("p_y_given_t_lambda", &self.p_y_given_t_lambda, sc.n_y)
    }
}

pub fn predict_ccc(params: &CccParams, sc: &Scenario) -> Result<Behavior> {
    params.validate(sc)?;
    let mut out = vec![0.0; sc.len()];
    ccc_into(params, sc, &mut out);
    Ok(Behavior::from_vec_unchecked(*sc, out))
}

pub fn predict_cce0(params: &Cce0Params, sc: &Scenario) -> Result<Behavior> {
    params.validate(sc)?;
    let mut out = vec![0.0; sc.len()];
    cce0_into(params, sc, &mut out);
    Ok(Behavior::from_vec_unchecked(*sc, out))
}

pub fn predict_csd0(params: &Csd0Params, sc: &Scenario) -> Result<Behavior> {
    params.validate(sc)?;
    let mut out = vec![0.0; sc.len()];
    csd0_into(params, sc, &mut out)?;
    Ok(Behavior::from_vec_unchecked(*sc, out))
}

/// Unchecked kernel; `out` has length `sc.len()`.
pub(crate) fn ccc_into(p: &CccParams, sc: &Scenario, out: &mut [f64]) {
    let d = p.d;
    if sc.is_binary() {
        let total: f64 = p.p_lambda.iter().sum();
        for s in 0..sc.n_s {
            let xa = &p.p_x_given_s_lambda[s * d * 2..][..d * 2];
            let a = weighted_first(&p.p_lambda, xa);
            for t in 0..sc.n_t {
                let yb = &p.p_y_given_t_lambda[t * d * 2..][..d * 2];
                let (j, b) = joint_first(&p.p_lambda, xa, yb);
                write_binary(&mut out[(s * sc.n_t + t) * 4..][..4], total, j, a, b);
            }
        }
        return;
    }
    out.fill(0.0);
    for s in 0..sc.n_s {
        for t in 0..sc.n_t {
            let block = &mut out[(s * sc.n_t + t) * sc.block_len()..][..sc.block_len()];
            for l in 0..d {
                let w = p.p_lambda[l];
                let px = &p.p_x_given_s_lambda[(s * d + l) * sc.n_x..][..sc.n_x];
                let py = &p.p_y_given_t_lambda[(t * d + l) * sc.n_y..][..sc.n_y];
                accumulate_outer(block, w, px, py);
            }
        }
    }
}

pub(crate) fn cce0_into(p: &Cce0Params, sc: &Scenario, out: &mut [f64]) {
    let d = p.d;
    if sc.is_binary() {
        let total: f64 = p.p_lambda.iter().sum();
        for s in 0..sc.n_s {
            let xa = &p.p_x_given_s_lambda[s * d * 2..][..d * 2];
            let a = weighted_first(&p.p_lambda, xa);
            for t in 0..sc.n_t {
                let st = s * sc.n_t + t;
                let yb = &p.p_y_given_s_t_lambda[st * d * 2..][..d * 2];
                let (j, b) = joint_first(&p.p_lambda, xa, yb);
                write_binary(&mut out[st * 4..][..4], total, j, a, b);
            }
        }
        return;
    }
    out.fill(0.0);
    for s in 0..sc.n_s {
        for t in 0..sc.n_t {
            let block = &mut out[(s * sc.n_t + t) * sc.block_len()..][..sc.block_len()];
            for l in 0..d {
                let w = p.p_lambda[l];
                let px = &p.p_x_given_s_lambda[(s * d + l) * sc.n_x..][..sc.n_x];
                let py = &p.p_y_given_s_t_lambda[((s * sc.n_t + t) * d + l) * sc.n_y..][..sc.n_y];
                accumulate_outer(block, w, px, py);
            }
        }
    }
}

pub(crate) fn csd0_into(p: &Csd0Params, sc: &Scenario, out: &mut [f64]) -> Result<()> {
    let d = p.d;
    out.fill(0.0);
    for s in 0..sc.n_s {
        let denom: f64 = (0..d).map(|l| p.p_s_given_lambda[l * sc.n_s + s] * p.p_lambda[l]).sum();
        if denom <= 0.0 || !denom.is_finite() {
            return Err(Error::ZeroSettingProbability { s });
        }
        if sc.is_binary() {
            let inv = 1.0 / denom;
            let ps = &p.p_s_given_lambda[s..];
            let w = |l: usize| ps[l * sc.n_s] * p.p_lambda[l] * inv;
            let xa = &p.p_x_given_s_lambda[s * d * 2..][..d * 2];
            let (mut a, mut total) = (0.0, 0.0);
            for l in 0..d {
                let wl = w(l);
                total += wl;
                a += wl * xa[2 * l];
            }
            for t in 0..sc.n_t {
                let yb = &p.p_y_given_t_lambda[t * d * 2..][..d * 2];
                let (mut j, mut b) = (0.0, 0.0);
                for l in 0..d {
                    let wb = w(l) * yb[2 * l];
                    b += wb;
                    j += wb * xa[2 * l];
                }
                write_binary(&mut out[(s * sc.n_t + t) * 4..][..4], total, j, a, b);
            }
            continue;
        }
        for t in 0..sc.n_t {
            let block = &mut out[(s * sc.n_t + t) * sc.block_len()..][..sc.block_len()];
            for l in 0..d {
                let w = p.p_s_given_lambda[l * sc.n_s + s] * p.p_lambda[l] / denom;
                let px = &p.p_x_given_s_lambda[(s * d + l) * sc.n_x..][..sc.n_x];
                let py = &p.p_y_given_t_lambda[(t * d + l) * sc.n_y..][..sc.n_y];
                accumulate_outer(block, w, px, py);
            }
        }
    }
    Ok(())
}

/// `Σ_λ w_λ P(0|λ)` over a table of binary rows.
#[inline]
fn weighted_first(w: &[f64], rows: &[f64]) -> f64 {
    w.iter().zip(rows.chunks_exact(2)).map(|(w, r)| w * r[0]).sum()
}

/// `(Σ_λ w_λ P(x=0|λ) P(y=0|λ), Σ_λ w_λ P(y=0|λ))` over binary rows.
#[inline]
fn joint_first(w: &[f64], xa: &[f64], yb: &[f64]) -> (f64, f64) {
    let (mut j, mut b) = (0.0, 0.0);
    for ((w, xr), yr) in w.iter().zip(xa.chunks_exact(2)).zip(yb.chunks_exact(2)) {
        let wb = w * yr[0];
        b += wb;
        j += wb * xr[0];
    }
    (j, b)
}

/// Fills a 2×2 block from its total mass, `P(0,0)` and the two `0`-marginals.
#[inline]
fn write_binary(block: &mut [f64], total: f64, j: f64, a: f64, b: f64) {
    block[0] = j;
    block[1] = a - j;
    block[2] = b - j;
    block[3] = total - a - b + j;
}

#[inline]
fn accumulate_outer(block: &mut [f64], w: f64, px: &[f64], py: &[f64]) {
    let ny = py.len();
    for (x, &a) in px.iter().enumerate() {
        let a = w * a;
        for (cell, &b) in block[x * ny..(x + 1) * ny].iter_mut().zip(py) {
            *cell += a * b;
        }
    }
}

impl Cce0Params {
    /// Lifts common-cause parameters by copying Bob's table for every `s`.
    pub fn from_ccc(p: &CccParams, sc: &Scenario) -> Self {
        Self {
            d: p.d,
            p_lambda: p.p_lambda.clone(),
            p_x_given_s_lambda: p.p_x_given_s_lambda.clone(),
            p_y_given_s_t_lambda: (0..sc.n_s)
                .flat_map(|_| p.p_y_given_t_lambda.iter().copied())
                .collect(),
        }
    }
}

impl Csd0Params {
    /// Common-cause parameters with a setting distribution attached.
    pub fn from_ccc(p: &CccParams, p_s_given_lambda: Vec<f64>) -> Self {
        Self {
            d: p.d,
            p_lambda: p.p_lambda.clone(),
            p_s_given_lambda,
            p_x_given_s_lambda: p.p_x_given_s_lambda.clone(),
            p_y_given_t_lambda: p.p_y_given_t_lambda.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behavior::{signalling_deficit, Behavior};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn simplex(rng: &mut impl Rng, n: usize) -> Vec<f64> {
        let w: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 1e-3).collect();
        let z: f64 = w.iter().sum();
        w.into_iter().map(|a| a / z).collect()
    }

    fn rows(rng: &mut impl Rng, n_rows: usize, len: usize) -> Vec<f64> {
        (0..n_rows).flat_map(|_| simplex(rng, len)).collect()
    }

    pub(crate) fn random_ccc(rng: &mut impl Rng, sc: &Scenario, d: usize) -> CccParams {
        CccParams {
            d,
            p_lambda: simplex(rng, d),
            p_x_given_s_lambda: rows(rng, sc.n_s * d, sc.n_x),
            p_y_given_t_lambda: rows(rng, sc.n_t * d, sc.n_y),
        }
    }

    fn random_cce0(rng: &mut impl Rng, sc: &Scenario, d: usize) -> Cce0Params {
        Cce0Params {
            d,
            p_lambda: simplex(rng, d),
            p_x_given_s_lambda: rows(rng, sc.n_s * d, sc.n_x),
            p_y_given_s_t_lambda: rows(rng, sc.n_s * sc.n_t * d, sc.n_y),
        }
    }

    fn random_csd0(rng: &mut impl Rng, sc: &Scenario, d: usize) -> Csd0Params {
        let c = random_ccc(rng, sc, d);
        Csd0Params::from_ccc(&c, rows(rng, d, sc.n_s))
    }

    fn binary_row(p0: f64) -> [f64; 2] {
        [p0, 1.0 - p0]
    }

    #[test]
    fn ccc_single_latent_factorizes() {
        let sc = Scenario::binary(3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = random_ccc(&mut rng, &sc, 1);
        let b = predict_ccc(&p, &sc).unwrap();
        for s in 0..3 {
            for t in 0..3 {
                for x in 0..2 {
                    for y in 0..2 {
                        let want = p.p_x_given_s_lambda[s * 2 + x] * p.p_y_given_t_lambda[t * 2 + y];
                        assert!((b.get(s, t, x, y) - want).abs() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn ccc_deterministic_point_mass() {
        let sc = Scenario::binary(2);
        let p = CccParams {
            d: 2,
            p_lambda: vec![0.0, 1.0],
            p_x_given_s_lambda: [binary_row(1.0), binary_row(0.0), binary_row(1.0), binary_row(0.0)].concat(),
            p_y_given_t_lambda: [binary_row(0.0), binary_row(0.0), binary_row(0.0), binary_row(0.0)].concat(),
        };
        let b = predict_ccc(&p, &sc).unwrap();
        // λ = 1 fires: x = 1, y = 1 everywhere.
        for s in 0..2 {
            for t in 0..2 {
                assert_eq!(b.get(s, t, 1, 1), 1.0);
            }
        }
    }

    #[test]
    fn ccc_perfect_correlation_two_latents() {
        let sc = Scenario::binary(6);
        let mut px = Vec::new();
        for _s in 0..6 {
            for l in 0..2 {
                px.extend(binary_row(if l == 0 { 1.0 } else { 0.0 }));
            }
        }
        let p = CccParams {
            d: 2,
            p_lambda: vec![0.5, 0.5],
            p_x_given_s_lambda: px.clone(),
            p_y_given_t_lambda: px,
        };
        let b = predict_ccc(&p, &sc).unwrap();
        // Loop oracle: sum over λ by hand.
        for s in 0..6 {
            for t in 0..6 {
                for x in 0..2 {
                    for y in 0..2 {
                        let want: f64 = (0..2)
                            .map(|l| {
                                let dx = if x == l { 1.0 } else { 0.0 };
                                let dy = if y == l { 1.0 } else { 0.0 };
                                0.5 * dx * dy
                            })
                            .sum();
                        assert_eq!(b.get(s, t, x, y), want);
                    }
                }
                assert_eq!(b.get(s, t, 0, 0), 0.5);
                assert_eq!(b.get(s, t, 1, 1), 0.5);
            }
        }
    }

    #[test]
    fn ccc_rejects_bad_dimensions() {
        let sc = Scenario::binary(2);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut p = random_ccc(&mut rng, &sc, 2);
        p.p_lambda.push(0.0);
        assert!(matches!(predict_ccc(&p, &sc), Err(Error::Dimension { .. })));
    }

    #[test]
    fn cce0_setting_independent_matches_ccc() {
        let sc = Scenario::binary(3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let c = random_ccc(&mut rng, &sc, 3);
        let a = predict_ccc(&c, &sc).unwrap();
        let b = predict_cce0(&Cce0Params::from_ccc(&c, &sc), &sc).unwrap();
        assert!(a.max_abs_diff(&b).unwrap() < 1e-15);
    }

    #[test]
    fn cce0_maximal_signalling() {
        let sc = Scenario::binary(3);
        let mut py = Vec::new();
        for s in 0..3 {
            for _t in 0..3 {
                py.extend(binary_row(if s == 0 { 1.0 } else { 0.0 }));
            }
        }
        let p = Cce0Params {
            d: 1,
            p_lambda: vec![1.0],
            p_x_given_s_lambda: [binary_row(0.5), binary_row(0.5), binary_row(0.5)].concat(),
            p_y_given_s_t_lambda: py,
        };
        let b = predict_cce0(&p, &sc).unwrap();
        assert_eq!(signalling_deficit(&b), 1.0);
    }

    #[test]
    fn cce0_reproduces_pr_box() {
        // λ = (x, c) with x uniform; Bob outputs y = x ⊕ (s·t) — d = 4 with
        // two latent values unused is still a valid d = 4 construction.
        let sc = Scenario::binary(2);
        let d = 4;
        let p_lambda = vec![0.5, 0.5, 0.0, 0.0];
        let mut px = vec![0.0; 2 * d * 2];
        for s in 0..2 {
            for l in 0..d {
                let x = l & 1;
                px[(s * d + l) * 2 + x] = 1.0;
            }
        }
        let mut py = vec![0.0; 2 * 2 * d * 2];
        for s in 0..2 {
            for t in 0..2 {
                for l in 0..d {
                    let y = (l & 1) ^ (s & t);
                    py[((s * 2 + t) * d + l) * 2 + y] = 1.0;
                }
            }
        }
        let p = Cce0Params {
            d,
            p_lambda,
            p_x_given_s_lambda: px,
            p_y_given_s_t_lambda: py,
        };
        let b = predict_cce0(&p, &sc).unwrap();
        let pr = Behavior::from_fn(sc, |s, t, x, y| if x ^ y == s & t { 0.5 } else { 0.0 }).unwrap();
        for i in 0..sc.len() {
            assert_eq!(b.as_slice()[i], pr.as_slice()[i], "cell {:?}", sc.coords(i));
        }
    }

    #[test]
    fn csd0_uniform_settings_match_ccc() {
        let sc = Scenario::binary(4);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let c = random_ccc(&mut rng, &sc, 3);
        let sd = Csd0Params::from_ccc(&c, vec![0.25; 3 * 4]);
        let a = predict_ccc(&c, &sc).unwrap();
        let b = predict_csd0(&sd, &sc).unwrap();
        assert!(a.max_abs_diff(&b).unwrap() < 1e-15);
    }

    #[test]
    fn csd0_single_latent_is_product() {
        let sc = Scenario::binary(3);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let sd = random_csd0(&mut rng, &sc, 1);
        let b = predict_csd0(&sd, &sc).unwrap();
        for s in 0..3 {
            for t in 0..3 {
                for x in 0..2 {
                    for y in 0..2 {
                        let want = sd.p_x_given_s_lambda[s * 2 + x] * sd.p_y_given_t_lambda[t * 2 + y];
                        assert!((b.get(s, t, x, y) - want).abs() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn csd0_matches_joint_then_condition() {
        let sc = Scenario::new(3, 2, 2, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let p = random_csd0(&mut rng, &sc, 2);
        let b = predict_csd0(&p, &sc).unwrap();
        let d = 2;
        for t in 0..sc.n_t {
            // Joint over (x, y, s, λ) at fixed t, then marginalize λ and
            // divide by P(s).
            let mut joint = vec![0.0; 2 * 2 * sc.n_s * d];
            for x in 0..2 {
                for y in 0..2 {
                    for s in 0..sc.n_s {
                        for l in 0..d {
                            joint[((x * 2 + y) * sc.n_s + s) * d + l] = p.p_x_given_s_lambda
                                [(s * d + l) * 2 + x]
                                * p.p_y_given_t_lambda[(t * d + l) * 2 + y]
                                * p.p_s_given_lambda[l * sc.n_s + s]
                                * p.p_lambda[l];
                        }
                    }
                }
            }
            for s in 0..sc.n_s {
                let ps: f64 = (0..2)
                    .flat_map(|x| (0..2).map(move |y| (x, y)))
                    .flat_map(|(x, y)| (0..d).map(move |l| ((x * 2 + y) * sc.n_s + s) * d + l))
                    .map(|i| joint[i])
                    .sum();
                for x in 0..2 {
                    for y in 0..2 {
                        let pxy: f64 = (0..d).map(|l| joint[((x * 2 + y) * sc.n_s + s) * d + l]).sum();
                        assert!((b.get(s, t, x, y) - pxy / ps).abs() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn csd0_zero_denominator_names_setting() {
        let sc = Scenario::binary(3);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let c = random_ccc(&mut rng, &sc, 2);
        // Setting 2 has zero probability under both latent values.
        let sd = Csd0Params::from_ccc(&c, vec![0.5, 0.5, 0.0, 0.3, 0.7, 0.0]);
        match predict_csd0(&sd, &sc) {
            Err(Error::ZeroSettingProbability { s: 2 }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn predictors_emit_normalized_behaviors() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let sc = Scenario::new(
                rng.random_range(1..5),
                rng.random_range(1..5),
                rng.random_range(2..4),
                rng.random_range(2..4),
            )
            .unwrap();
            let d = rng.random_range(1..6);
            let a = predict_ccc(&random_ccc(&mut rng, &sc, d), &sc).unwrap();
            let b = predict_cce0(&random_cce0(&mut rng, &sc, d), &sc).unwrap();
            let c = predict_csd0(&random_csd0(&mut rng, &sc, d), &sc).unwrap();
            for beh in [&a, &b, &c] {
                for block in beh.as_slice().chunks(sc.block_len()) {
                    assert!((block.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                }
            }
            assert!(signalling_deficit(&a) <= 1e-12);
        }
    }

    #[test]
    fn extra_null_latent_preserves_behavior() {
        let sc = Scenario::binary(3);
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for d in 1..5 {
            let c = random_ccc(&mut rng, &sc, d);
            let before = predict_ccc(&c, &sc).unwrap();
            // Embed at d + 1 with a zero-probability extra latent value.
            let e = d + 1;
            let mut px = Vec::new();
            for s in 0..sc.n_s {
                px.extend_from_slice(&c.p_x_given_s_lambda[s * d * 2..(s + 1) * d * 2]);
                px.extend(simplex(&mut rng, 2));
            }
            let mut py = Vec::new();
            for t in 0..sc.n_t {
                py.extend_from_slice(&c.p_y_given_t_lambda[t * d * 2..(t + 1) * d * 2]);
                py.extend(simplex(&mut rng, 2));
            }
            let mut pl = c.p_lambda.clone();
            pl.push(0.0);
            let lifted = CccParams {
                d: e,
                p_lambda: pl,
                p_x_given_s_lambda: px,
                p_y_given_t_lambda: py,
            };
            let after = predict_ccc(&lifted, &sc).unwrap();
            assert!(before.max_abs_diff(&after).unwrap() < 1e-15);
        }
    }

    #[test]
    fn sixteen_deterministic_strategies_hit_all_local_vertices() {
        let sc = Scenario::binary(2);
        let d = 16;
        // λ encodes (a0, a1, b0, b1): outputs per setting.
        let mut px = vec![0.0; 2 * d * 2];
        let mut py = vec![0.0; 2 * d * 2];
        for l in 0..d {
            for s in 0..2 {
                px[(s * d + l) * 2 + ((l >> s) & 1)] = 1.0;
            }
            for t in 0..2 {
                py[(t * d + l) * 2 + ((l >> (2 + t)) & 1)] = 1.0;
            }
        }
        for v in 0..d {
            let mut pl = vec![0.0; d];
            pl[v] = 1.0;
            let p = CccParams {
                d,
                p_lambda: pl,
                p_x_given_s_lambda: px.clone(),
                p_y_given_t_lambda: py.clone(),
            };
            let b = predict_ccc(&p, &sc).unwrap();
            let want = Behavior::from_fn(sc, |s, t, x, y| {
                let a = (v >> s) & 1;
                let bb = (v >> (2 + t)) & 1;
                if x == a && y == bb { 1.0 } else { 0.0 }
            })
            .unwrap();
            assert_eq!(b, want);
        }
    }
}
