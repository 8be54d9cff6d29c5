//! Packing between constrained model parameters and the unconstrained real
//! vectors searched by the optimizer.
//!
//! Layout of a packed vector, block by block:
//!
//! | family | blocks |
//! |--------|--------|
//! | cCC    | `P(λ)`, `P(x|s,λ)` rows, `P(y|t,λ)` rows |
//! | cCE0   | `P(λ)`, `P(x|s,λ)` rows, `P(y|s,t,λ)` rows |
//! | cSD0   | `P(λ)`, `P(s|λ)` rows, `P(x|s,λ)` rows, `P(y|t,λ)` rows |
//! | qCC    | 16 factor reals, then 4 reals per Alice effect, 4 per Bob effect |
//!
//! A probability vector of length `k` takes `k − 1` reals. Two-entry rows
//! go through the logistic map; longer ones use squared weights with the
//! last weight pinned to one, `p_i = w_i² / (Σ_j w_j² + 1)`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::behavior::{Behavior, Scenario};
use crate::classical::{
    cce0_into, ccc_into, csd0_into, predict_cce0, predict_ccc, predict_csd0, Cce0Params,
    CccParams, Csd0Params,
};
use crate::error::{Error, Result};
use crate::quantum::{
    make_density, make_effect, predict_qcc, qcc_into, ComplexMatrix, DensityOperator, QccParams,
};

/// Latent dimension of the quantum model: two qubits.
pub const QCC_LATENT_DIM: usize = 4;

const QCC_FACTOR_LEN: usize = 16;
const QCC_EFFECT_LEN: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelFamily {
    #[serde(rename = "ccc")]
    Ccc,
    #[serde(rename = "cce0")]
    Cce0,
    #[serde(rename = "csd0")]
    Csd0,
    #[serde(rename = "qcc")]
    Qcc,
}

impl ModelFamily {
    pub const ALL: [ModelFamily; 4] = [Self::Ccc, Self::Cce0, Self::Csd0, Self::Qcc];

    pub fn is_classical(self) -> bool {
        !matches!(self, Self::Qcc)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Ccc => "ccc",
            Self::Cce0 => "cce0",
            Self::Csd0 => "csd0",
            Self::Qcc => "qcc",
        }
    }

    /// Display label, e.g. `cCE0`.
    pub fn label(self) -> &'static str {
        match self {
            Self::Ccc => "cCC",
            Self::Cce0 => "cCE0",
            Self::Csd0 => "cSD0",
            Self::Qcc => "qCC",
        }
    }
}

impl fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ModelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ccc" => Ok(Self::Ccc),
            "cce0" | "cce" => Ok(Self::Cce0),
            "csd0" | "csd" => Ok(Self::Csd0),
            "qcc" => Ok(Self::Qcc),
            other => Err(Error::Config(format!("unknown model family `{other}`"))),
        }
    }
}

/// A single statistical model: a family at a fixed latent dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: ModelFamily,
    /// Latent cardinality for classical families; `4` (two qubits) for qCC.
    pub d: usize,
    pub scenario: Scenario,
}

impl ModelSpec {
    pub fn classical(family: ModelFamily, d: usize, scenario: Scenario) -> Result<Self> {
        let spec = Self { family, d, scenario };
        spec.validate()?;
        Ok(spec)
    }

    pub fn qcc(scenario: Scenario) -> Result<Self> {
        let spec = Self {
            family: ModelFamily::Qcc,
            d: QCC_LATENT_DIM,
            scenario,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Classical families at cardinality `d`, qCC ignoring `d`.
    pub fn new(family: ModelFamily, d: usize, scenario: Scenario) -> Result<Self> {
        match family {
            ModelFamily::Qcc => Self::qcc(scenario),
            f => Self::classical(f, d, scenario),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        match self.family {
            ModelFamily::Qcc => {
                if self.d != QCC_LATENT_DIM {
                    return Err(Error::Config(format!(
                        "qCC latent dimension is fixed at {QCC_LATENT_DIM}, got {}",
                        self.d
                    )));
                }
                if self.scenario.n_x != 2 || self.scenario.n_y != 2 {
                    return Err(Error::InvalidScenario(
                        "qCC needs binary outcomes".into(),
                    ));
                }
            }
            _ => {
                if self.d == 0 {
                    return Err(Error::Config("latent cardinality must be ≥ 1".into()));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            ModelFamily::Qcc => write!(f, "qCC(2x2)"),
            fam => write!(f, "{fam}(d={})", self.d),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParamVector(pub Vec<f64>);

impl ParamVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Constrained parameters of any family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "tables", rename_all = "lowercase")]
pub enum ModelParams {
    Ccc(CccParams),
    Cce0(Cce0Params),
    Csd0(Csd0Params),
    Qcc(QccParams),
}

impl ModelParams {
    pub fn predict(&self, sc: &Scenario) -> Result<Behavior> {
        match self {
            Self::Ccc(p) => predict_ccc(p, sc),
            Self::Cce0(p) => predict_cce0(p, sc),
            Self::Csd0(p) => predict_csd0(p, sc),
            Self::Qcc(p) => predict_qcc(p, sc),
        }
    }

    pub fn validate(&self, sc: &Scenario) -> Result<()> {
        match self {
            Self::Ccc(p) => p.validate(sc),
            Self::Cce0(p) => p.validate(sc),
            Self::Csd0(p) => p.validate(sc),
            Self::Qcc(p) => p.validate(sc),
        }
    }

    /// Prediction without re-validating; valid for anything produced by
    /// [`unpack`].
    pub(crate) fn predict_into(&self, sc: &Scenario, out: &mut [f64]) -> Result<()> {
        match self {
            Self::Ccc(p) => ccc_into(p, sc, out),
            Self::Cce0(p) => cce0_into(p, sc, out),
            Self::Csd0(p) => csd0_into(p, sc, out)?,
            Self::Qcc(p) => qcc_into(&p.rho, &p.effects_a, &p.effects_b, sc, out),
        }
        Ok(())
    }
}

pub fn param_count(spec: &ModelSpec) -> usize {
    let sc = &spec.scenario;
    let d = spec.d;
    match spec.family {
        ModelFamily::Ccc => (d - 1) + sc.n_s * d * (sc.n_x - 1) + sc.n_t * d * (sc.n_y - 1),
        ModelFamily::Cce0 => {
            (d - 1) + sc.n_s * d * (sc.n_x - 1) + sc.n_s * sc.n_t * d * (sc.n_y - 1)
        }
        ModelFamily::Csd0 => {
            (d - 1) + d * (sc.n_s - 1) + sc.n_s * d * (sc.n_x - 1) + sc.n_t * d * (sc.n_y - 1)
        }
        ModelFamily::Qcc => QCC_FACTOR_LEN + QCC_EFFECT_LEN * (sc.n_s + sc.n_t),
    }
}

#[inline]
pub fn logistic(u: f64) -> f64 {
    1.0 / (1.0 + (-u).exp())
}

/// Writes the probability vector encoded by `free` (length `out.len() − 1`).
#[inline]
fn simplex_into(free: &[f64], out: &mut [f64]) {
    debug_assert_eq!(free.len() + 1, out.len());
    if out.len() == 2 {
        let p = logistic(free[0]);
        out[0] = p;
        out[1] = 1.0 - p;
        return;
    }
    let z: f64 = free.iter().map(|w| w * w).sum::<f64>() + 1.0;
    for (o, w) in out.iter_mut().zip(free) {
        *o = w * w / z;
    }
    *out.last_mut().expect("non-empty simplex") = 1.0 / z;
}

/// Squared-weight encoding of a simplex point, with the last weight pinned.
pub fn squared_weights(p: &[f64]) -> Vec<f64> {
    let last = p[p.len() - 1];
    p[..p.len() - 1].iter().map(|q| (q / last).sqrt()).collect()
}

/// Squared-weight decoding; inverse of [`squared_weights`] up to signs.
pub fn from_squared_weights(w: &[f64]) -> Vec<f64> {
    let z: f64 = w.iter().map(|a| a * a).sum::<f64>() + 1.0;
    w.iter().map(|a| a * a / z).chain(std::iter::once(1.0 / z)).collect()
}

/// Fills consecutive rows of length `row_len` from the front of `v`;
/// returns the rest of `v`.
fn rows_into<'a>(v: &'a [f64], out: &mut [f64], row_len: usize) -> &'a [f64] {
    let k = row_len - 1;
    let n_rows = out.len() / row_len;
    let (head, rest) = v.split_at(n_rows * k);
    if k == 0 {
        out.fill(1.0);
    } else {
        for (free, row) in head.chunks(k).zip(out.chunks_mut(row_len)) {
            simplex_into(free, row);
        }
    }
    rest
}

/// Constrained parameters decoded from `v`.
pub fn unpack(spec: &ModelSpec, v: &ParamVector) -> Result<ModelParams> {
    let mut params = blank_params(spec);
    unpack_into(spec, v.as_slice(), &mut params)?;
    Ok(params)
}

/// Zero-filled parameters of the right shape for `spec`.
pub(crate) fn blank_params(spec: &ModelSpec) -> ModelParams {
    let sc = &spec.scenario;
    let d = spec.d;
    match spec.family {
        ModelFamily::Ccc => ModelParams::Ccc(CccParams {
            d,
            p_lambda: vec![0.0; d],
            p_x_given_s_lambda: vec![0.0; sc.n_s * d * sc.n_x],
            p_y_given_t_lambda: vec![0.0; sc.n_t * d * sc.n_y],
        }),
        ModelFamily::Cce0 => ModelParams::Cce0(Cce0Params {
            d,
            p_lambda: vec![0.0; d],
            p_x_given_s_lambda: vec![0.0; sc.n_s * d * sc.n_x],
            p_y_given_s_t_lambda: vec![0.0; sc.n_s * sc.n_t * d * sc.n_y],
        }),
        ModelFamily::Csd0 => ModelParams::Csd0(Csd0Params {
            d,
            p_lambda: vec![0.0; d],
            p_s_given_lambda: vec![0.0; d * sc.n_s],
            p_x_given_s_lambda: vec![0.0; sc.n_s * d * sc.n_x],
            p_y_given_t_lambda: vec![0.0; sc.n_t * d * sc.n_y],
        }),
        ModelFamily::Qcc => ModelParams::Qcc(QccParams {
            rho: DensityOperator::maximally_mixed(),
            effects_a: vec![make_effect(0.5, 0.5, 0.0, 0.0); sc.n_s],
            effects_b: vec![make_effect(0.5, 0.5, 0.0, 0.0); sc.n_t],
        }),
    }
}

/// Decodes `v` into `params` in place; `params` must have `spec`'s shape.
pub(crate) fn unpack_into(spec: &ModelSpec, v: &[f64], params: &mut ModelParams) -> Result<()> {
    let expected = param_count(spec);
    if v.len() != expected {
        return Err(Error::Dimension {
            what: "parameter vector",
            expected,
            got: v.len(),
        });
    }
    let sc = &spec.scenario;
    match params {
        ModelParams::Ccc(p) => {
            let rest = rows_into(v, &mut p.p_lambda, spec.d);
            let rest = rows_into(rest, &mut p.p_x_given_s_lambda, sc.n_x);
            rows_into(rest, &mut p.p_y_given_t_lambda, sc.n_y);
        }
        ModelParams::Cce0(p) => {
            let rest = rows_into(v, &mut p.p_lambda, spec.d);
            let rest = rows_into(rest, &mut p.p_x_given_s_lambda, sc.n_x);
            rows_into(rest, &mut p.p_y_given_s_t_lambda, sc.n_y);
        }
        ModelParams::Csd0(p) => {
            let rest = rows_into(v, &mut p.p_lambda, spec.d);
            let rest = rows_into(rest, &mut p.p_s_given_lambda, sc.n_s);
            let rest = rows_into(rest, &mut p.p_x_given_s_lambda, sc.n_x);
            rows_into(rest, &mut p.p_y_given_t_lambda, sc.n_y);
        }
        ModelParams::Qcc(p) => {
            let (factor, rest) = v.split_at(QCC_FACTOR_LEN);
            p.rho = make_density(&factor_matrix(factor))?;
            let (a, b) = rest.split_at(QCC_EFFECT_LEN * sc.n_s);
            for (e, c) in p.effects_a.iter_mut().zip(a.chunks(QCC_EFFECT_LEN)) {
                *e = make_effect(c[0], c[1], c[2], c[3]);
            }
            for (e, c) in p.effects_b.iter_mut().zip(b.chunks(QCC_EFFECT_LEN)) {
                *e = make_effect(c[0], c[1], c[2], c[3]);
            }
        }
    }
    Ok(())
}

/// Lower-triangular factor: four real diagonal entries, then the six
/// strictly-lower entries as `(re, im)` pairs in row order.
fn factor_matrix(v: &[f64]) -> ComplexMatrix {
    let mut t = ComplexMatrix::zeros(4);
    for i in 0..4 {
        t.set(i, i, Complex64::new(v[i], 0.0));
    }
    let mut k = 4;
    for i in 1..4 {
        for j in 0..i {
            t.set(i, j, Complex64::new(v[k], v[k + 1]));
            k += 2;
        }
    }
    t
}

/// Re-encodes a classical model at latent size `d` as one at size `d + 1`
/// with the same prediction (to within 1e-9 when growing from `d = 1`): the
/// new value is placed first with zero weight. Its response rows
/// are drawn from a standard normal seeded by `seed`.
pub fn grow_latent(spec: &ModelSpec, v: &ParamVector, seed: u64) -> Result<(ModelSpec, ParamVector)> {
    if !spec.family.is_classical() {
        return Err(Error::InvalidParams(format!(
            "{} has no adjustable latent size",
            spec.family.label()
        )));
    }
    let expected = param_count(spec);
    if v.len() != expected {
        return Err(Error::Dimension {
            what: "parameter vector",
            expected,
            got: v.len(),
        });
    }
    let grown = ModelSpec::classical(spec.family, spec.d + 1, spec.scenario)?;
    let sc = &spec.scenario;
    let d = spec.d;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(param_count(&grown));

    let (weights, mut rest) = v.as_slice().split_at(d - 1);
    let mut p = vec![0.0; d];
    rows_into(weights, &mut p, d);
    if d == 1 {
        // Two-point weights are logistic-coded and cannot reach zero.
        let eps: f64 = 1e-9;
        out.push((eps / (1.0 - eps)).ln());
    } else {
        out.push(0.0);
        out.extend(squared_weights(&p));
    }

    // (outer groups, free values per row) for each conditional table, in
    // packing order; rows are indexed with the latent value innermost.
    let mut blocks = Vec::with_capacity(3);
    if spec.family == ModelFamily::Csd0 {
        blocks.push((1, sc.n_s - 1));
    }
    blocks.push((sc.n_s, sc.n_x - 1));
    blocks.push(match spec.family {
        ModelFamily::Cce0 => (sc.n_s * sc.n_t, sc.n_y - 1),
        _ => (sc.n_t, sc.n_y - 1),
    });
    let heaviest = (0..d).fold(0, |m, l| if p[l] > p[m] { l } else { m });
    for (i, (groups, k)) in blocks.into_iter().enumerate() {
        for _ in 0..groups {
            if i == 0 && spec.family == ModelFamily::Csd0 {
                // A copied setting row keeps the new value negligible in
                // every per-setting normalization.
                out.extend_from_slice(&rest[heaviest * k..][..k]);
            } else {
                out.extend((0..k).map(|_| -> f64 { StandardNormal.sample(&mut rng) }));
            }
            let (old, tail) = rest.split_at(d * k);
            out.extend_from_slice(old);
            rest = tail;
        }
    }
    debug_assert!(rest.is_empty());
    debug_assert_eq!(out.len(), param_count(&grown));
    Ok((grown, ParamVector(out)))
}

/// I.i.d. standard-normal starting point, a pure function of `(spec, seed)`.
pub fn random_init(spec: &ModelSpec, seed: u64) -> ParamVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ParamVector(
        (0..param_count(spec))
            .map(|_| StandardNormal.sample(&mut rng))
            .collect(),
    )
}

/// Reusable scratch for evaluating a model many times.
pub(crate) struct Evaluator {
    spec: ModelSpec,
    params: ModelParams,
    out: Vec<f64>,
}

impl Evaluator {
    pub fn new(spec: ModelSpec) -> Self {
        Self {
            params: blank_params(&spec),
            out: vec![0.0; spec.scenario.len()],
            spec,
        }
    }

    pub fn predict(&mut self, v: &[f64]) -> Result<&[f64]> {
        unpack_into(&self.spec, v, &mut self.params)?;
        self.params.predict_into(&self.spec.scenario, &mut self.out)?;
        Ok(&self.out)
    }
}
