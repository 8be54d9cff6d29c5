//! Nelder–Mead minimization with seeded multistart.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::behavior::{sq_loss_slices, Behavior};
use crate::error::{Error, Result};
use crate::params::{param_count, random_init, unpack, Evaluator, ModelParams, ModelSpec, ParamVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    /// Independent searches per fit; restart `r` starts from seed
    /// `base_seed + r`.
    pub restarts: usize,
    /// Iteration cap per search; `None` means `2000 × dimension`.
    pub max_iters: Option<usize>,
    /// Edge length of the initial axis-aligned simplex.
    pub simplex_init_scale: f64,
    pub reflect: f64,
    pub expand: f64,
    pub contract: f64,
    pub shrink: f64,
    /// Stop once `f_worst − f_best` over the simplex falls to this value.
    pub convergence_tol: f64,
    /// Rebuild the simplex around the best vertex after convergence and keep
    /// going while that still improves by more than `convergence_tol`.
    /// `0` disables.
    pub max_rebuilds: usize,
    /// Replace the four coefficients by dimension-dependent values
    /// (reflect 1, expand 1 + 2/n, contract 0.75 − 1/2n, shrink 1 − 1/n),
    /// which keeps the simplex from collapsing in high dimension. They equal
    /// the classic values at `n = 2`.
    pub adaptive: bool,
    pub base_seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 100,
            max_iters: None,
            simplex_init_scale: 0.5,
            reflect: 1.0,
            expand: 2.0,
            contract: 0.5,
            shrink: 0.5,
            convergence_tol: 1e-9,
            max_rebuilds: 0,
            adaptive: true,
            base_seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.restarts == 0 {
            return bad("restarts must be ≥ 1");
        }
        if !(self.reflect > 0.0) {
            return bad("reflection coefficient must be positive");
        }
        if !(self.expand > 1.0 && self.expand > self.reflect) {
            return bad("expansion coefficient must exceed 1 and the reflection coefficient");
        }
        if !(self.contract > 0.0 && self.contract < 1.0) {
            return bad("contraction coefficient must lie in (0, 1)");
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return bad("shrink coefficient must lie in (0, 1)");
        }
        if !(self.simplex_init_scale > 0.0) {
            return bad("initial simplex scale must be positive");
        }
        if !(self.convergence_tol >= 0.0) {
            return bad("convergence tolerance must be non-negative");
        }
        Ok(())
    }

    /// `(reflect, expand, contract, shrink)` for dimension `n`.
    pub fn coefficients(&self, n: usize) -> (f64, f64, f64, f64) {
        if self.adaptive && n >= 2 {
            let n = n as f64;
            (1.0, 1.0 + 2.0 / n, 0.75 - 0.5 / n, 1.0 - 1.0 / n)
        } else {
            (self.reflect, self.expand, self.contract, self.shrink)
        }
    }

    pub fn iteration_cap(&self, dim: usize) -> usize {
        self.max_iters.unwrap_or(2000 * dim.max(1))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadOutcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

/// The search hit a non-finite objective value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aborted {
    pub iterations: usize,
}

/// Minimizes `objective` from `x0`.
///
/// Returns `Err(Aborted)` when the objective is non-finite at any evaluated
/// point (including `x0`).
pub fn nelder_mead<F>(
    mut objective: F,
    x0: &[f64],
    config: &OptimizerConfig,
) -> std::result::Result<NelderMeadOutcome, Aborted>
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let cap = config.iteration_cap(n);
    let (c_reflect, c_expand, c_contract, c_shrink) = config.coefficients(n);
    let mut evals = 0usize;
    let mut iterations = 0usize;
    let mut eval = |x: &[f64], iterations: usize| -> std::result::Result<f64, Aborted> {
        evals += 1;
        let v = objective(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Aborted { iterations })
        }
    };

    let f0 = eval(x0, 0)?;
    if n == 0 {
        return Ok(NelderMeadOutcome {
            x: Vec::new(),
            f: f0,
            iterations: 0,
            evaluations: 1,
            converged: true,
        });
    }

    let mut best_x = x0.to_vec();
    let mut best_f = f0;
    let mut converged;
    let mut rebuilds = 0usize;

    'outer: loop {
        // Axis-aligned simplex around the current best.
        let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        let mut vals: Vec<f64> = Vec::with_capacity(n + 1);
        pts.push(best_x.clone());
        vals.push(best_f);
        for i in 0..n {
            let mut p = best_x.clone();
            p[i] += config.simplex_init_scale;
            vals.push(eval(&p, iterations)?);
            pts.push(p);
        }
        let mut sum = vec![0.0; n];
        recompute_sum(&pts, &mut sum);

        let mut xr = vec![0.0; n];
        let mut xe = vec![0.0; n];
        let mut xc = vec![0.0; n];
        let mut centroid = vec![0.0; n];
        let start_f = best_f;

        loop {
            let (ib, iw, isw) = extremes(&vals);
            if vals[iw] - vals[ib] <= config.convergence_tol {
                converged = true;
                best_x.copy_from_slice(&pts[ib]);
                best_f = vals[ib];
                break;
            }
            if iterations >= cap {
                best_x.copy_from_slice(&pts[ib]);
                best_f = vals[ib];
                converged = false;
                break 'outer;
            }
            iterations += 1;
            if iterations.is_multiple_of(n + 1) {
                recompute_sum(&pts, &mut sum);
            }

            let inv = 1.0 / n as f64;
            for j in 0..n {
                centroid[j] = (sum[j] - pts[iw][j]) * inv;
            }
            for j in 0..n {
                xr[j] = centroid[j] + c_reflect * (centroid[j] - pts[iw][j]);
            }
            let fr = eval(&xr, iterations)?;

            if fr < vals[ib] {
                for j in 0..n {
                    xe[j] = centroid[j] + c_expand * (xr[j] - centroid[j]);
                }
                let fe = eval(&xe, iterations)?;
                if fe < fr {
                    replace(&mut pts, &mut vals, &mut sum, iw, &xe, fe);
                } else {
                    replace(&mut pts, &mut vals, &mut sum, iw, &xr, fr);
                }
                continue;
            }
            if fr < vals[isw] {
                replace(&mut pts, &mut vals, &mut sum, iw, &xr, fr);
                continue;
            }
            let accepted = if fr < vals[iw] {
                // Outside contraction.
                for j in 0..n {
                    xc[j] = centroid[j] + c_contract * (xr[j] - centroid[j]);
                }
                let fc = eval(&xc, iterations)?;
                if fc <= fr {
                    replace(&mut pts, &mut vals, &mut sum, iw, &xc, fc);
                    true
                } else {
                    false
                }
            } else {
                // Inside contraction.
                for j in 0..n {
                    xc[j] = centroid[j] + c_contract * (pts[iw][j] - centroid[j]);
                }
                let fc = eval(&xc, iterations)?;
                if fc < vals[iw] {
                    replace(&mut pts, &mut vals, &mut sum, iw, &xc, fc);
                    true
                } else {
                    false
                }
            };
            if !accepted {
                let anchor = pts[ib].clone();
                for i in 0..=n {
                    if i == ib {
                        continue;
                    }
                    for j in 0..n {
                        pts[i][j] = anchor[j] + c_shrink * (pts[i][j] - anchor[j]);
                    }
                    vals[i] = eval(&pts[i], iterations)?;
                }
                recompute_sum(&pts, &mut sum);
            }
        }

        if rebuilds >= config.max_rebuilds || start_f - best_f <= config.convergence_tol {
            break;
        }
        rebuilds += 1;
    }

    Ok(NelderMeadOutcome {
        x: best_x,
        f: best_f,
        iterations,
        evaluations: evals,
        converged,
    })
}

fn recompute_sum(pts: &[Vec<f64>], sum: &mut [f64]) {
    sum.fill(0.0);
    for p in pts {
        for (s, v) in sum.iter_mut().zip(p) {
            *s += v;
        }
    }
}

fn replace(pts: &mut [Vec<f64>], vals: &mut [f64], sum: &mut [f64], i: usize, x: &[f64], f: f64) {
    for ((s, old), new) in sum.iter_mut().zip(pts[i].iter_mut()).zip(x) {
        *s += new - *old;
        *old = *new;
    }
    vals[i] = f;
}

/// Indices of the best, worst and second-worst vertices. Ties resolve to
/// the lowest index for best and the highest for worst.
fn extremes(vals: &[f64]) -> (usize, usize, usize) {
    let mut ib = 0;
    let mut iw = 0;
    for (i, &v) in vals.iter().enumerate() {
        if v < vals[ib] {
            ib = i;
        }
        if v >= vals[iw] {
            iw = i;
        }
    }
    let mut isw = if iw == 0 { 1 } else { 0 };
    for (i, &v) in vals.iter().enumerate() {
        if i != iw && v > vals[isw] {
            isw = i;
        }
    }
    (ib, iw, isw)
}

/// Best fit of one model to a training behavior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub spec: ModelSpec,
    pub best_params: ParamVector,
    #[serde(with = "crate::io::behavior_serde")]
    pub best_behavior: Behavior,
    pub training_error: f64,
    /// Filled in by [`crate::selection::test_error`]; `None` until then.
    pub test_error: Option<f64>,
    /// Final objective of each restart; `None` for aborted restarts.
    pub restart_errors: Vec<Option<f64>>,
    /// Index of the winning restart.
    pub best_restart: usize,
}

impl FitResult {
    pub fn params(&self) -> Result<ModelParams> {
        unpack(&self.spec, &self.best_params)
    }
}

/// Squared-error objective of `spec` against `target`, on packed vectors.
pub fn objective_fn(spec: ModelSpec, target: &Behavior) -> impl FnMut(&[f64]) -> f64 + '_ {
    let mut ev = Evaluator::new(spec);
    move |v| match ev.predict(v) {
        Ok(p) => sq_loss_slices(p, target.as_slice()),
        Err(_) => f64::NAN,
    }
}

/// Seeded multistart Nelder–Mead on `v ↦ sq_loss(predict(unpack(v)), F_train)`.
///
/// Restarts run in parallel; the result does not depend on the schedule.
pub fn fit(spec: &ModelSpec, f_train: &Behavior, config: &OptimizerConfig) -> Result<FitResult> {
    fit_with_starts(spec, f_train, config, &[])
}

/// [`fit`] plus one extra search from each of `starts`, numbered after the
/// random restarts.
pub fn fit_with_starts(
    spec: &ModelSpec,
    f_train: &Behavior,
    config: &OptimizerConfig,
    starts: &[ParamVector],
) -> Result<FitResult> {
    config.validate()?;
    search(spec, f_train, config, config.restarts, starts)
}

/// `random` seeded searches followed by one from each of `starts`; at least
/// one search in total.
pub(crate) fn search(
    spec: &ModelSpec,
    f_train: &Behavior,
    config: &OptimizerConfig,
    random: usize,
    starts: &[ParamVector],
) -> Result<FitResult> {
    spec.validate()?;
    if spec.scenario != f_train.scenario() {
        return Err(Error::ScenarioMismatch {
            left: spec.scenario,
            right: f_train.scenario(),
        });
    }
    if random + starts.len() == 0 {
        return Err(Error::Config("a fit needs at least one search".into()));
    }
    let n = param_count(spec);
    if let Some(bad) = starts.iter().find(|v| v.len() != n) {
        return Err(Error::Dimension {
            what: "starting point",
            expected: n,
            got: bad.len(),
        });
    }
    let outcomes: Vec<Option<NelderMeadOutcome>> = (0..random + starts.len())
        .into_par_iter()
        .map(|r| {
            let x0 = match r.checked_sub(random) {
                Some(i) => starts[i].clone(),
                None => random_init(spec, config.base_seed.wrapping_add(r as u64)),
            };
            nelder_mead(objective_fn(*spec, f_train), x0.as_slice(), config).ok()
        })
        .collect();
    finish_fit(spec, f_train, outcomes)
}

fn finish_fit(
    spec: &ModelSpec,
    f_train: &Behavior,
    outcomes: Vec<Option<NelderMeadOutcome>>,
) -> Result<FitResult> {
    let restarts = outcomes.len();
    let mut best: Option<(usize, &NelderMeadOutcome)> = None;
    for (r, o) in outcomes.iter().enumerate() {
        if let Some(o) = o {
            if best.is_none_or(|(_, b)| o.f < b.f) {
                best = Some((r, o));
            }
        }
    }
    let (best_restart, outcome) = best.ok_or(Error::AllRestartsAborted { restarts })?;
    debug_assert_eq!(outcome.x.len(), param_count(spec));
    let best_params = ParamVector(outcome.x.clone());
    let best_behavior = unpack(spec, &best_params)?.predict(&spec.scenario)?;
    let training_error = crate::behavior::sq_loss(&best_behavior, f_train)?;
    let restart_errors = outcomes.iter().map(|o| o.as_ref().map(|o| o.f)).collect();
    Ok(FitResult {
        spec: *spec,
        best_params,
        best_behavior,
        training_error,
        test_error: None,
        restart_errors,
        best_restart,
    })
}
