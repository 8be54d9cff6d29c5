//! Acceptance suite. Each test prints exactly one line of the form
//! `criterion N: PASS|FAIL — details` and fails when its criterion fails.
//!
//! The lines bypass output capture; `-- --nocapture` adds per-seed details.
//! The full suite performs dozens of adjudications and takes about two hours
//! on a single core.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::io::Write;
use std::sync::OnceLock;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use bell_adj::optimizer::OptimizerConfig;
use bell_adj::params::{param_count, random_init, unpack};
use bell_adj::quantum::{predict_qcc, DensityOperator, Effect, QccParams};
use bell_adj::selection::cardinality_sweep;
use bell_adj::simulator::{generate_dataset, sample_counts, MeasurementSet, SourceConfig};
use bell_adj::{
    adjudicate, fit, normalize, AdjudicationConfig, AdjudicationReport, Behavior, ModelFamily,
    ModelSpec, ParamVector, Scenario,
};

const SEEDS: std::ops::RangeInclusive<u64> = 1..=10;
const RESTARTS: usize = 20;
const RESAMPLES: usize = 10;

const CCC: ModelFamily = ModelFamily::Ccc;
const CCE0: ModelFamily = ModelFamily::Cce0;
const CSD0: ModelFamily = ModelFamily::Csd0;
const QCC: ModelFamily = ModelFamily::Qcc;

/// Writes straight to the process stdout so the line shows up even when the
/// test harness captures output.
fn report_line(n: u32, pass: bool, details: String) {
    let line = format!("criterion {n}: {} — {details}\n", if pass { "PASS" } else { "FAIL" });
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
}

fn config(seed: u64) -> AdjudicationConfig {
    let mut c = AdjudicationConfig::default().with_seed(seed);
    c.optimizer.restarts = RESTARTS;
    c.resamples = RESAMPLES;
    // Bootstrap refits start from the primary optimum only.
    c.bootstrap_restarts = Some(0);
    c
}

fn source(seed: u64) -> SourceConfig {
    SourceConfig {
        seed,
        ..SourceConfig::default()
    }
}

fn sep(r: &AdjudicationReport, a: ModelFamily, b: ModelFamily) -> f64 {
    r.separation(a, b).unwrap_or(f64::INFINITY)
}

fn m(r: &AdjudicationReport, f: ModelFamily) -> &bell_adj::selection::ModelReport {
    r.model(f).expect("model in slate")
}

// ---------------------------------------------------------------------------
// 1. cCC fit vs. a quadratic program over the local deterministic points

/// Deterministic local behaviors of a binary-outcome scenario, each as the
/// indices of its unit cells (one per setting pair).
fn local_vertices(sc: &Scenario) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for a in 0..1usize << sc.n_s {
        for b in 0..1usize << sc.n_t {
            let mut v = Vec::with_capacity(sc.n_pairs());
            for s in 0..sc.n_s {
                for t in 0..sc.n_t {
                    v.push(sc.index(s, t, (a >> s) & 1, (b >> t) & 1));
                }
            }
            out.push(v);
        }
    }
    out
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(w: &mut [f64]) {
    let mut u = w.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        cum += ui;
        let t = (cum - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    for x in w.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
}

/// min_w ‖Σ_k w_k v_k − f‖² over the simplex (the squared distance from `f`
/// to the local polytope), by accelerated projected gradient. Returns the
/// final objective and its Frank–Wolfe gap, so `value − gap` is a certified
/// lower bound on the optimum.
fn qp_oracle(vertices: &[Vec<usize>], f: &[f64], max_iters: usize, gap_tol: f64) -> (f64, f64) {
    let k = vertices.len();
    let combine = |w: &[f64]| -> Vec<f64> {
        let mut p = vec![0.0; f.len()];
        for (wk, v) in w.iter().zip(vertices) {
            for &i in v {
                p[i] += wk;
            }
        }
        p
    };
    let adjoint = |r: &[f64]| -> Vec<f64> { vertices.iter().map(|v| v.iter().map(|&i| r[i]).sum()).collect() };
    // Lipschitz constant of the gradient: 2 λ_max(VᵀV) by power iteration.
    let mut x = vec![1.0 / (k as f64).sqrt(); k];
    let mut lam = 0.0;
    for _ in 0..200 {
        let y = adjoint(&combine(&x));
        lam = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        x = y.iter().map(|v| v / lam).collect();
    }
    let step = 1.0 / (2.0 * lam * 1.01);

    let residual = |w: &[f64]| -> Vec<f64> { combine(w).iter().zip(f).map(|(p, q)| p - q).collect() };
    let value_gap = |w: &[f64]| -> (f64, f64) {
        let r = residual(w);
        let g: Vec<f64> = adjoint(&r).iter().map(|v| 2.0 * v).collect();
        let gmin = g.iter().cloned().fold(f64::INFINITY, f64::min);
        let gap = w.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>() - gmin;
        (r.iter().map(|v| v * v).sum(), gap)
    };
    let mut w = vec![1.0 / k as f64; k];
    let mut z = w.clone();
    let mut t = 1.0f64;
    for it in 0..max_iters {
        let g = adjoint(&residual(&z));
        let mut next: Vec<f64> = z.iter().zip(&g).map(|(a, b)| a - 2.0 * step * b).collect();
        project_simplex(&mut next);
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        z = next
            .iter()
            .zip(&w)
            .map(|(a, b)| a + (t - 1.0) / t_next * (a - b))
            .collect();
        w = next;
        t = t_next;
        if it % 50 == 0 && value_gap(&w).1 < gap_tol {
            break;
        }
    }
    value_gap(&w)
}

fn dirichlet(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}

fn oracle_targets(sc: &Scenario) -> Vec<(bool, Behavior)> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let verts = local_vertices(sc);
    let mut out = Vec::new();
    for _ in 0..10 {
        // Mixture of a PR box with a random local point: no-signalling,
        // nonlocal for large enough PR weight.
        let q: f64 = rng.random_range(0.0..1.0);
        let w = dirichlet(&mut rng, verts.len());
        let p = Behavior::from_fn(*sc, |s, t, x, y| {
            let pr = if (x ^ y) == (s & t) { 0.5 } else { 0.0 };
            let i = sc.index(s, t, x, y);
            let local: f64 = w.iter().zip(&verts).filter(|(_, v)| v.contains(&i)).map(|(wk, _)| wk).sum();
            q * pr + (1.0 - q) * local
        })
        .unwrap();
        out.push((false, p));
    }
    for _ in 0..10 {
        let blocks: Vec<Vec<f64>> = (0..4).map(|_| dirichlet(&mut rng, 4)).collect();
        let p = Behavior::from_fn(*sc, |s, t, x, y| blocks[s * 2 + t][x * 2 + y]).unwrap();
        out.push((true, p));
    }
    out
}

#[test]
fn criterion_1_local_polytope_oracle() {
    let start = Instant::now();
    let sc = Scenario::binary(2);
    let verts = local_vertices(&sc);
    let spec = ModelSpec::classical(CCC, verts.len(), sc).unwrap();
    let cfg = OptimizerConfig {
        restarts: RESTARTS,
        base_seed: 11,
        ..OptimizerConfig::default()
    };
    let mut worst: f64 = 0.0;
    let mut below = 0;
    for (_, target) in oracle_targets(&sc) {
        let (oracle, _) = qp_oracle(&verts, target.as_slice(), 200_000, 1e-13);
        let fitted = fit(&spec, &target, &cfg).unwrap().training_error;
        worst = worst.max((fitted - oracle).abs());
        if fitted < oracle - 1e-9 {
            below += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst <= 1e-3 && below == 0 && secs <= 300.0;
    report_line(
        1,
        pass,
        format!("20 targets, max |fit − QP| = {worst:.2e}, fits below QP optimum: {below}, {secs:.1}s"),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------------
// 2. Quantum predictor: Φ⁺ correlators and exact no-signalling

fn phi_plus_state() -> DensityOperator {
    let a = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let z = Complex64::new(0.0, 0.0);
    DensityOperator::pure(&[a, z, z, a]).unwrap()
}

/// Largest marginal dependence on the remote setting, computed directly.
fn max_marginal_shift(p: &Behavior) -> f64 {
    let sc = p.scenario();
    let mut worst: f64 = 0.0;
    for s in 0..sc.n_s {
        for x in 0..sc.n_x {
            let m: Vec<f64> = (0..sc.n_t).map(|t| (0..sc.n_y).map(|y| p.get(s, t, x, y)).sum()).collect();
            for a in &m {
                worst = worst.max((a - m[0]).abs());
            }
        }
    }
    for t in 0..sc.n_t {
        for y in 0..sc.n_y {
            let m: Vec<f64> = (0..sc.n_s).map(|s| (0..sc.n_x).map(|x| p.get(s, t, x, y)).sum()).collect();
            for a in &m {
                worst = worst.max((a - m[0]).abs());
            }
        }
    }
    worst
}

#[test]
fn criterion_2_quantum_predictor() {
    let start = Instant::now();
    let n = 20;
    let alphas: Vec<f64> = (0..n).map(|i| 2.0 * PI * i as f64 / n as f64 + 0.05).collect();
    let betas: Vec<f64> = (0..n).map(|j| PI * j as f64 / n as f64 - 0.3).collect();
    let xz = |a: f64| Effect::projector([a.sin(), 0.0, a.cos()]);
    let params = QccParams {
        rho: phi_plus_state(),
        effects_a: alphas.iter().map(|&a| xz(a)).collect(),
        effects_b: betas.iter().map(|&b| xz(b)).collect(),
    };
    let sc = Scenario::binary(n);
    let p = predict_qcc(&params, &sc).unwrap();
    let mut corr_err: f64 = 0.0;
    for (s, a) in alphas.iter().enumerate() {
        for (t, b) in betas.iter().enumerate() {
            let e = p.get(s, t, 0, 0) - p.get(s, t, 0, 1) - p.get(s, t, 1, 0) + p.get(s, t, 1, 1);
            corr_err = corr_err.max((e - (a - b).cos()).abs());
        }
    }

    let sc6 = Scenario::binary(6);
    let spec = ModelSpec::qcc(sc6).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut deficit: f64 = 0.0;
    for i in 0..1000 {
        let scale = [0.5, 1.0, 3.0][i % 3];
        let v = ParamVector(
            random_init(&spec, i as u64)
                .0
                .iter()
                .map(|x| x * scale + rng.random_range(-0.1..0.1))
                .collect(),
        );
        let b = unpack(&spec, &v).unwrap().predict(&sc6).unwrap();
        deficit = deficit.max(max_marginal_shift(&b));
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = corr_err <= 1e-10 && deficit <= 1e-12 && secs <= 60.0;
    report_line(
        2,
        pass,
        format!("max |E − cos(α−β)| = {corr_err:.1e} on 20×20, max signalling over 1000 draws = {deficit:.1e}, {secs:.1}s"),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------------
// 3 & 4. Entangled source, spiral settings

struct EntangledRun {
    seed: u64,
    report: AdjudicationReport,
    secs: f64,
}

fn entangled_runs() -> &'static [EntangledRun] {
    static RUNS: OnceLock<Vec<EntangledRun>> = OnceLock::new();
    RUNS.get_or_init(|| {
        SEEDS
            .map(|seed| {
                let start = Instant::now();
                let ds = generate_dataset(&source(seed)).unwrap();
                let report = adjudicate(&[CCE0, CSD0, QCC], &ds.train, &ds.test, &config(seed)).unwrap();
                let secs = start.elapsed().as_secs_f64();
                eprintln!("  (entangled seed {seed} adjudicated in {secs:.0}s)");
                EntangledRun { seed, report, secs }
            })
            .collect()
    })
}

#[test]
fn criterion_3_entangled_headline() {
    let runs = entangled_runs();
    let mut passed = 0;
    let mut ordered = 0;
    let mut details = Vec::new();
    for run in runs {
        let r = &run.report;
        let (ce, sd, q) = (m(r, CCE0), m(r, CSD0), m(r, QCC));
        let trains_lower = ce.training_error < q.training_error && sd.training_error < q.training_error;
        let tests_lower = q.test_error < ce.test_error && q.test_error < sd.test_error;
        let (s_ce, s_sd) = (sep(r, CCE0, QCC), sep(r, CSD0, QCC));
        let ok = trains_lower && tests_lower && s_ce >= 2.0 && s_sd >= 2.0;
        passed += ok as usize;
        ordered += (trains_lower && tests_lower) as usize;
        details.push(format!(
            "seed {}: train cCE0 {:.2e} cSD0 {:.2e} qCC {:.2e}; test cCE0 {:.2e}±{:.1e} cSD0 {:.2e}±{:.1e} qCC {:.2e}±{:.1e}; sep {:.2}σ/{:.2}σ; d={}/{}; {:.0}s → {}",
            run.seed,
            ce.training_error,
            sd.training_error,
            q.training_error,
            ce.test_error,
            ce.test_std,
            sd.test_error,
            sd.test_std,
            q.test_error,
            q.test_std,
            s_ce,
            s_sd,
            ce.d,
            sd.d,
            run.secs,
            if ok { "ok" } else { "no" }
        ));
    }
    for d in &details {
        eprintln!("  {d}");
    }
    let pass = passed >= 8;
    report_line(
        3,
        pass,
        format!("{passed}/10 seeds with cCE0,cSD0 training below qCC and qCC testing ≥2σ below both (need ≥8); ordering alone holds in {ordered}/10"),
    );
    assert!(pass);
}

#[test]
fn criterion_4_ccc_underfit() {
    let runs = entangled_runs();
    let mut details = Vec::new();
    let mut all = true;
    // The cCC sweep runs to the cardinality cap; three seeds bound runtime.
    for run in runs.iter().take(3) {
        let ds = generate_dataset(&source(run.seed)).unwrap();
        let train = normalize(&ds.train).unwrap();
        let test = normalize(&ds.test).unwrap();
        let (fit, trace) = cardinality_sweep(CCC, &train, &test, &config(run.seed)).unwrap();
        let q_test = m(&run.report, QCC).test_error;
        let (tr, te) = (fit.training_error, fit.test_error.unwrap());
        // Certified lower bounds on the distance of each table to the local
        // polytope: no common-cause model of any cardinality does better.
        let verts = local_vertices(&train.scenario());
        let bound = |f: &Behavior| {
            let (v, gap) = qp_oracle(&verts, f.as_slice(), 30_000, 1e-6);
            v - gap
        };
        let (lb_tr, lb_te) = (bound(&train), bound(&test));
        let ok = tr >= 10.0 * q_test && te >= 10.0 * q_test && lb_tr >= 10.0 * q_test && lb_te >= 10.0 * q_test;
        all &= ok;
        details.push(format!(
            "seed {}: cCC(d={}, {:?}) train {tr:.3e} test {te:.3e} = {:.0}×/{:.0}× qCC test {q_test:.2e}; polytope bound {lb_tr:.3e}/{lb_te:.3e} = {:.0}×/{:.0}×",
            run.seed,
            fit.spec.d,
            trace.stop_reason,
            tr / q_test,
            te / q_test,
            lb_tr / q_test,
            lb_te / q_test,
        ));
    }
    for d in &details {
        eprintln!("  {d}");
    }
    report_line(4, all, details.join("; "));
    assert!(all);
}

// ---------------------------------------------------------------------------
// 5. Dephased source

#[test]
fn criterion_5_dephased() {
    let mut passed = 0;
    let mut details = Vec::new();
    for seed in SEEDS {
        let ds = generate_dataset(&SourceConfig {
            dephased: true,
            ..source(seed)
        })
        .unwrap();
        let r = adjudicate(&[CCC, CCE0, QCC], &ds.train, &ds.test, &config(seed)).unwrap();
        let (c, ce, q) = (m(&r, CCC), m(&r, CCE0), m(&r, QCC));
        let comb = |a: f64, b: f64| (a * a + b * b).sqrt();
        let train_sep = (c.training_error - q.training_error).abs() / comb(c.train_std, q.train_std);
        let test_sep = (c.test_error - q.test_error).abs() / comb(c.test_std, q.test_std);
        let agree = train_sep <= 1.0 && test_sep <= 1.0;
        let gap_q = (q.training_error - ce.training_error) / comb(q.train_std, ce.train_std);
        let gap_c = (c.training_error - ce.training_error) / comb(c.train_std, ce.train_std);
        let ce_trains_lower = gap_q >= 1.0 && gap_c >= 1.0;
        let ce_tests_higher = ce.test_error > c.test_error && ce.test_error > q.test_error;
        let ok = agree && ce_trains_lower && ce_tests_higher;
        passed += ok as usize;
        details.push(format!(
            "seed {seed}: cCC vs qCC train {train_sep:.2}σ test {test_sep:.2}σ; cCE0 trains lower by {gap_c:.2}σ/{gap_q:.2}σ, tests higher: {ce_tests_higher} → {}",
            if ok { "ok" } else { "no" }
        ));
    }
    for d in &details {
        eprintln!("  {d}");
    }
    let pass = passed >= 7;
    report_line(
        5,
        pass,
        format!("{passed}/10 seeds with cCC≈qCC within 1σ and cCE0 training ≥1σ lower, testing higher (need ≥7)"),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------------
// 6. CHSH measurement configuration

#[test]
fn criterion_6_chsh_insufficient() {
    let mut passed = 0;
    let mut details = Vec::new();
    for seed in SEEDS {
        let ds = generate_dataset(&SourceConfig {
            measurements: MeasurementSet::Chsh,
            n_settings: 2,
            ..source(seed)
        })
        .unwrap();
        let r = adjudicate(&[CCE0, CSD0, QCC], &ds.train, &ds.test, &config(seed)).unwrap();
        let seps = [sep(&r, CCE0, CSD0), sep(&r, CCE0, QCC), sep(&r, CSD0, QCC)];
        let ok = seps.iter().all(|s| *s <= 1.0);
        passed += ok as usize;
        details.push(format!(
            "seed {seed}: separations {:.2}σ {:.2}σ {:.2}σ → {}",
            seps[0],
            seps[1],
            seps[2],
            if ok { "ok" } else { "no" }
        ));
    }
    for d in &details {
        eprintln!("  {d}");
    }
    let pass = passed >= 7;
    report_line(
        6,
        pass,
        format!("{passed}/10 seeds with cCE0, cSD0, qCC test errors mutually within 1σ (need ≥7)"),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------------
// 7. Pipeline identities

#[test]
fn criterion_7_pipeline_identities() {
    let ds = generate_dataset(&SourceConfig {
        measurements: MeasurementSet::Chsh,
        n_settings: 2,
        ..source(5)
    })
    .unwrap();
    let slate = [CCC, CCE0, CSD0, QCC];

    // Plug-in identity.
    let r = adjudicate(&slate, &ds.train, &ds.train, &config(5)).unwrap();
    let plug_in = r
        .models
        .iter()
        .map(|m| (m.test_error - m.training_error).abs())
        .fold(0.0, f64::max);

    // Determinism across thread counts.
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| adjudicate(&slate, &ds.train, &ds.test, &config(9)).unwrap().to_json().unwrap())
    };
    let a = run(1);
    let b = run(4);
    let c = run(1);
    let identical = a == b && a == c;

    // Bootstrap scaling: ×10⁴ counts at the same exact behavior, for the
    // natural model of the data (qCC) and a misspecified one (cCC).
    let exact = generate_dataset(&source(3)).unwrap().exact;
    let mut cfg = config(3);
    cfg.max_cardinality = 4;
    let stds = |mean: f64| {
        let train = sample_counts(&exact, mean, 101).unwrap();
        let test = sample_counts(&exact, mean, 102).unwrap();
        let r = adjudicate(&[CCC, QCC], &train, &test, &cfg).unwrap();
        [CCC, QCC].map(|f| (m(&r, f).train_std, m(&r, f).test_std))
    };
    let lo = stds(8000.0);
    let hi = stds(8000.0 * 1e4);
    let factors: Vec<(f64, f64)> = lo.iter().zip(&hi).map(|(l, h)| (l.0 / h.0, l.1 / h.1)).collect();
    let scaling = factors
        .iter()
        .all(|(a, b)| (50.0..=200.0).contains(a) && (50.0..=200.0).contains(b));

    let pass = plug_in <= 1e-12 && identical && scaling;
    report_line(
        7,
        pass,
        format!(
            "plug-in max |test − train| = {plug_in:.1e}; reports identical across 1/4/1 threads: {identical}; std shrink ×10⁴ counts (train/test): cCC {:.1}/{:.1}, qCC {:.1}/{:.1}",
            factors[0].0, factors[0].1, factors[1].0, factors[1].1
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------------
// 8. Tsirelson bound

#[test]
fn criterion_8_tsirelson() {
    let sc = Scenario::binary(2);
    let spec = ModelSpec::qcc(sc).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut best: f64 = 0.0;
    for i in 0..100_000u64 {
        let scale = [0.3, 1.0, 2.0, 5.0][(i % 4) as usize];
        let v: Vec<f64> = (0..param_count(&spec))
            .map(|_| scale * rng.random_range(-PI..PI))
            .collect();
        let p = unpack(&spec, &ParamVector(v)).unwrap().predict(&sc).unwrap();
        let e = |s: usize, t: usize| {
            p.get(s, t, 0, 0) - p.get(s, t, 0, 1) - p.get(s, t, 1, 0) + p.get(s, t, 1, 1)
        };
        let (e00, e01, e10, e11) = (e(0, 0), e(0, 1), e(1, 0), e(1, 1));
        for v in [
            e00 + e01 + e10 - e11,
            e00 + e01 - e10 + e11,
            e00 - e01 + e10 + e11,
            -e00 + e01 + e10 + e11,
        ] {
            best = best.max(v.abs());
        }
    }
    // The bound is attained by Φ⁺ with x–z projectors at the optimal angles.
    let xz = |a: f64| Effect::projector([a.sin(), 0.0, a.cos()]);
    let optimal = QccParams {
        rho: phi_plus_state(),
        effects_a: vec![xz(0.0), xz(PI / 2.0)],
        effects_b: vec![xz(PI / 4.0), xz(-PI / 4.0)],
    };
    let p = predict_qcc(&optimal, &sc).unwrap();
    let e = |s: usize, t: usize| p.get(s, t, 0, 0) - p.get(s, t, 0, 1) - p.get(s, t, 1, 0) + p.get(s, t, 1, 1);
    let attained = e(0, 0) + e(0, 1) + e(1, 0) - e(1, 1);
    let bound = 2.0 * SQRT_2;
    let pass = best <= bound + 1e-6 && (attained - bound).abs() <= 1e-12;
    report_line(
        8,
        pass,
        format!("max |CHSH| over 1e5 random draws = {best:.6}, optimal construction = {attained:.12} (bound {bound:.12})"),
    );
    assert!(pass);
}
