//! Model selection: test-error scoring, the cardinality sweep, bootstrap
//! error bars and the final ranking.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::behavior::{normalize, signalling_deficit, sq_loss, Behavior, CountTable, Scenario};
use crate::classical::DEFAULT_MAX_CARDINALITY;
use crate::error::{Error, Result};
use crate::optimizer::{fit_with_starts, search, FitResult, OptimizerConfig};
use crate::params::{grow_latent, ModelFamily, ModelSpec, ParamVector};
use crate::simulator::{mix_seed, poisson};

/// Two sweep errors closer than this count as equal.
pub const DEFAULT_PLATEAU_TOL: f64 = 1e-6;
pub const DEFAULT_RESAMPLES: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdjudicationConfig {
    pub optimizer: OptimizerConfig,
    /// Largest latent cardinality a sweep may reach.
    pub max_cardinality: usize,
    pub plateau_tol: f64,
    /// Add a search started from the previous cardinality's optimum,
    /// re-encoded with one extra latent value of zero weight.
    pub warm_start: bool,
    pub resamples: usize,
    /// Random restarts per bootstrap refit, on top of the search started at
    /// the primary optimum; `None` reuses `optimizer.restarts`.
    pub bootstrap_restarts: Option<usize>,
    pub bootstrap_seed: u64,
    /// Redraw the test table as well as the training table in each
    /// resample. With `false` the test table stays fixed and the error bars
    /// reflect only the variability of the fit.
    pub resample_test: bool,
}

impl Default for AdjudicationConfig {
    fn default() -> Self {
        Self {
            optimizer: OptimizerConfig::default(),
            max_cardinality: DEFAULT_MAX_CARDINALITY,
            plateau_tol: DEFAULT_PLATEAU_TOL,
            warm_start: true,
            resamples: DEFAULT_RESAMPLES,
            bootstrap_restarts: None,
            bootstrap_seed: 0,
            resample_test: true,
        }
    }
}

impl AdjudicationConfig {
    pub fn validate(&self) -> Result<()> {
        self.optimizer.validate()?;
        if self.max_cardinality == 0 {
            return Err(Error::Config("max cardinality must be ≥ 1".into()));
        }
        if !(self.plateau_tol >= 0.0) {
            return Err(Error::Config("plateau tolerance must be non-negative".into()));
        }
        if self.resamples == 1 {
            return Err(Error::Config("bootstrap needs 0 or ≥ 2 resamples".into()));
        }
        Ok(())
    }

    /// Derives the optimizer and bootstrap seeds from one run seed, on
    /// streams disjoint from the simulator's train/test draws.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.optimizer.base_seed = mix_seed(seed, 3);
        self.bootstrap_seed = mix_seed(seed, 4);
        self
    }

    fn bootstrap_restarts(&self) -> usize {
        self.bootstrap_restarts.unwrap_or(self.optimizer.restarts)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    /// Training error fell while test error rose over three consecutive
    /// cardinalities.
    OverfitRule,
    /// Training and test errors stayed equal over three consecutive
    /// cardinalities.
    PlateauRule,
    Cap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub d: usize,
    pub training_error: f64,
    pub test_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTrace {
    pub records: Vec<SweepRecord>,
    pub stop_reason: StopReason,
    pub selected_d: usize,
}

/// Plug-in test error of `fit` on `f_test`; also stored in the fit.
pub fn test_error(fit: &mut FitResult, f_test: &Behavior) -> Result<f64> {
    let e = sq_loss(&fit.best_behavior, f_test)?;
    fit.test_error = Some(e);
    Ok(e)
}

/// Which stop rule, if any, fires on the last three records.
pub fn stop_rule(records: &[SweepRecord], plateau_tol: f64) -> Option<StopReason> {
    let [a, b, c] = records.get(records.len().checked_sub(3)?..)? else {
        return None;
    };
    if a.training_error > b.training_error
        && b.training_error > c.training_error
        && a.test_error < b.test_error
        && b.test_error < c.test_error
    {
        return Some(StopReason::OverfitRule);
    }
    let spread = |f: fn(&SweepRecord) -> f64| {
        let v = [f(a), f(b), f(c)];
        v.iter().cloned().fold(f64::MIN, f64::max) - v.iter().cloned().fold(f64::MAX, f64::min)
    };
    if spread(|r| r.training_error) <= plateau_tol && spread(|r| r.test_error) <= plateau_tol {
        return Some(StopReason::PlateauRule);
    }
    None
}

/// Fits `family` at `d = 1, 2, …` until a stop rule fires or the cap is
/// reached; returns the fit with the lowest test error (earliest on ties).
pub fn cardinality_sweep(
    family: ModelFamily,
    f_train: &Behavior,
    f_test: &Behavior,
    config: &AdjudicationConfig,
) -> Result<(FitResult, SweepTrace)> {
    config.validate()?;
    if !family.is_classical() {
        return Err(Error::Config(format!("{} has no cardinality to sweep", family.label())));
    }
    let sc = f_train.scenario();
    if sc != f_test.scenario() {
        return Err(Error::ScenarioMismatch {
            left: sc,
            right: f_test.scenario(),
        });
    }
    let mut records = Vec::new();
    let mut best: Option<FitResult> = None;
    let mut prev: Option<(ModelSpec, ParamVector)> = None;
    let stop_reason = loop {
        let d = records.len() + 1;
        let spec = ModelSpec::classical(family, d, sc)?;
        let starts = match (&prev, config.warm_start) {
            (Some((s, v)), true) => vec![grow_latent(s, v, mix_seed(config.optimizer.base_seed, d as u64))?.1],
            _ => Vec::new(),
        };
        let mut fit = fit_with_starts(&spec, f_train, &config.optimizer, &starts)?;
        let test = test_error(&mut fit, f_test)?;
        records.push(SweepRecord {
            d,
            training_error: fit.training_error,
            test_error: test,
        });
        prev = Some((spec, fit.best_params.clone()));
        if best.as_ref().is_none_or(|b| test < b.test_error.unwrap_or(f64::INFINITY)) {
            best = Some(fit);
        }
        if let Some(reason) = stop_rule(&records, config.plateau_tol) {
            break reason;
        }
        if d >= config.max_cardinality {
            break StopReason::Cap;
        }
    };
    let best = best.expect("at least one cardinality is fitted");
    let selected_d = best.spec.d;
    Ok((
        best,
        SweepTrace {
            records,
            stop_reason,
            selected_d,
        },
    ))
}

/// Poisson redraw of every cell around its observed count.
pub fn resample_counts(counts: &CountTable, rng: &mut ChaCha8Rng) -> Result<CountTable> {
    let v = counts.as_slice().iter().map(|&c| poisson(c as f64, rng)).collect();
    CountTable::from_vec(counts.scenario(), v)
}

/// Seed of bootstrap resample `r` for the model `spec`.
pub fn resample_seed(base: u64, spec: &ModelSpec, r: usize) -> u64 {
    let tag = mix_seed(spec.family as u64 + 1, spec.d as u64);
    base ^ mix_seed(tag, r as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapStats {
    pub train_std: f64,
    pub test_std: f64,
    pub training_errors: Vec<f64>,
    pub test_errors: Vec<f64>,
}

/// Sample standard deviation (`n − 1` denominator); zero below two values.
pub fn sample_std(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    (v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Parametric bootstrap of each fit's training and test errors: the count
/// tables are redrawn (the test table only if `resample_test`), each model is refitted at its selected cardinality
/// (with one search started from its primary optimum) and rescored.
pub fn bootstrap_errors(
    counts_train: &CountTable,
    counts_test: &CountTable,
    fits: &[FitResult],
    config: &AdjudicationConfig,
) -> Result<Vec<BootstrapStats>> {
    config.validate()?;
    if config.resamples < 2 {
        return Err(Error::Config("bootstrap needs at least 2 resamples".into()));
    }
    let jobs: Vec<(usize, usize)> = (0..fits.len())
        .flat_map(|m| (0..config.resamples).map(move |r| (m, r)))
        .collect();
    let outcomes: Vec<(f64, f64)> = jobs
        .par_iter()
        .map(|&(m, r)| {
            let fit = &fits[m];
            let mut rng = ChaCha8Rng::seed_from_u64(resample_seed(config.bootstrap_seed, &fit.spec, r));
            let train = normalize(&resample_counts(counts_train, &mut rng)?)?;
            let test = if config.resample_test {
                normalize(&resample_counts(counts_test, &mut rng)?)?
            } else {
                normalize(counts_test)?
            };
            let starts = [fit.best_params.clone()];
            let mut refit = search(
                &fit.spec,
                &train,
                &config.optimizer,
                config.bootstrap_restarts(),
                &starts,
            )?;
            let e = test_error(&mut refit, &test)?;
            Ok((refit.training_error, e))
        })
        .collect::<Result<_>>()?;
    Ok(outcomes
        .chunks(config.resamples)
        .map(|c| {
            let training_errors: Vec<f64> = c.iter().map(|o| o.0).collect();
            let test_errors: Vec<f64> = c.iter().map(|o| o.1).collect();
            BootstrapStats {
                train_std: sample_std(&training_errors),
                test_std: sample_std(&test_errors),
                training_errors,
                test_errors,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub family: ModelFamily,
    pub d: usize,
    pub training_error: f64,
    pub test_error: f64,
    pub train_std: f64,
    pub test_std: f64,
    /// Largest dependence of either party's marginal on the remote setting
    /// in the fitted behavior.
    pub signalling_deficit: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sweep: Option<SweepTrace>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bootstrap: Option<BootstrapStats>,
    pub fit: FitResult,
}

/// Test-error gap between two models in units of their combined standard
/// deviation; `None` when both deviations are zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Separation {
    pub a: ModelFamily,
    pub b: ModelFamily,
    pub sigma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjudicationReport {
    pub scenario: Scenario,
    /// One entry per slate model, in slate order.
    pub models: Vec<ModelReport>,
    /// Slate models by ascending test error.
    pub ranking: Vec<ModelFamily>,
    pub separations: Vec<Separation>,
    pub config: AdjudicationConfig,
}

impl AdjudicationReport {
    pub fn model(&self, family: ModelFamily) -> Option<&ModelReport> {
        self.models.iter().find(|m| m.family == family)
    }

    /// Symmetric lookup of the separation between `a` and `b`.
    pub fn separation(&self, a: ModelFamily, b: ModelFamily) -> Option<f64> {
        self.separations
            .iter()
            .find(|s| (s.a, s.b) == (a, b) || (s.a, s.b) == (b, a))
            .and_then(|s| s.sigma)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let report: Self = serde_json::from_str(s)?;
        report.validate()?;
        Ok(report)
    }

    /// Structural consistency checks for reports read from disk.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidReport(m));
        if self.models.is_empty() {
            return bad("no models".into());
        }
        for m in &self.models {
            let finite = [m.training_error, m.test_error, m.train_std, m.test_std];
            if finite.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return bad(format!("{} has a negative or non-finite error", m.family.label()));
            }
        }
        let mut listed: Vec<ModelFamily> = self.models.iter().map(|m| m.family).collect();
        let mut ranked = self.ranking.clone();
        listed.sort();
        ranked.sort();
        if listed != ranked || listed.windows(2).any(|w| w[0] == w[1]) {
            return bad("ranking is not a permutation of the models".into());
        }
        Ok(())
    }
}

/// Combined-σ separation of two test errors.
pub fn separation(test_a: f64, std_a: f64, test_b: f64, std_b: f64) -> Option<f64> {
    let s = (std_a * std_a + std_b * std_b).sqrt();
    (s > 0.0).then(|| (test_a - test_b).abs() / s)
}

/// Runs the whole pipeline on raw counts: normalize, sweep or fit each
/// slate model, score on the test table, bootstrap the errors and rank.
pub fn adjudicate(
    slate: &[ModelFamily],
    counts_train: &CountTable,
    counts_test: &CountTable,
    config: &AdjudicationConfig,
) -> Result<AdjudicationReport> {
    config.validate()?;
    if slate.is_empty() {
        return Err(Error::Config("slate is empty".into()));
    }
    for (i, f) in slate.iter().enumerate() {
        if slate[..i].contains(f) {
            return Err(Error::Config(format!("{} appears twice in the slate", f.label())));
        }
    }
    let f_train = normalize(counts_train)?;
    let f_test = normalize(counts_test)?;
    let sc = f_train.scenario();
    if sc != f_test.scenario() {
        return Err(Error::ScenarioMismatch {
            left: sc,
            right: f_test.scenario(),
        });
    }

    let primary: Vec<(FitResult, Option<SweepTrace>)> = slate
        .par_iter()
        .map(|&family| {
            if family.is_classical() {
                let (fit, trace) = cardinality_sweep(family, &f_train, &f_test, config)?;
                Ok((fit, Some(trace)))
            } else {
                let mut fit = fit_with_starts(&ModelSpec::qcc(sc)?, &f_train, &config.optimizer, &[])?;
                test_error(&mut fit, &f_test)?;
                Ok((fit, None))
            }
        })
        .collect::<Result<_>>()?;

    let fits: Vec<FitResult> = primary.iter().map(|(f, _)| f.clone()).collect();
    let boot = if config.resamples >= 2 {
        bootstrap_errors(counts_train, counts_test, &fits, config)?
            .into_iter()
            .map(Some)
            .collect()
    } else {
        vec![None; fits.len()]
    };

    let models: Vec<ModelReport> = primary
        .into_iter()
        .zip(boot)
        .map(|((fit, sweep), bootstrap)| {
            Ok(ModelReport {
                family: fit.spec.family,
                d: fit.spec.d,
                training_error: fit.training_error,
                test_error: fit.test_error.expect("scored above"),
                train_std: bootstrap.as_ref().map_or(0.0, |b| b.train_std),
                test_std: bootstrap.as_ref().map_or(0.0, |b| b.test_std),
                signalling_deficit: signalling_deficit(&fit.best_behavior),
                sweep,
                bootstrap,
                fit,
            })
        })
        .collect::<Result<_>>()?;

    let mut order: Vec<usize> = (0..models.len()).collect();
    order.sort_by(|&i, &j| models[i].test_error.total_cmp(&models[j].test_error).then(i.cmp(&j)));
    let ranking = order.iter().map(|&i| models[i].family).collect();

    let mut separations = Vec::new();
    for i in 0..models.len() {
        for j in i + 1..models.len() {
            let (a, b) = (&models[i], &models[j]);
            separations.push(Separation {
                a: a.family,
                b: b.family,
                sigma: separation(a.test_error, a.test_std, b.test_error, b.test_std),
            });
        }
    }

    Ok(AdjudicationReport {
        scenario: sc,
        models,
        ranking,
        separations,
        config: config.clone(),
    })
}
