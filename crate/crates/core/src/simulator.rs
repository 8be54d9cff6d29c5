//! Synthetic two-photon data: a noisy Bell-state source, optional dephasing
//! of Bob's qubit, fixed measurement sets and Poissonian coincidence counts.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::behavior::{Behavior, CountTable, Scenario};
use crate::error::{Error, Result};
use crate::quantum::{phi_plus, predict_qcc, ComplexMatrix, DensityOperator, Effect, QccParams};

/// Visibility whose Bell-state fidelity `(3v + 1)/4` is 0.979.
pub const DEFAULT_VISIBILITY: f64 = 0.972;
/// 800 coincidences per second over a 10 s window per setting pair.
pub const DEFAULT_MEAN_PER_SETTING: f64 = 8000.0;
pub const DEFAULT_SETTINGS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasurementSet {
    /// `n` projectors along a golden-angle spiral, same set on both sides.
    Spiral,
    /// The two-setting CHSH configuration; forces two settings per side.
    Chsh,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SourceConfig {
    pub visibility: f64,
    pub dephased: bool,
    pub mean_coincidences_per_setting: f64,
    pub n_settings: usize,
    pub measurements: MeasurementSet,
    pub seed: u64,
}

impl Default for SourceConfig {
    fn default() -> Self {
        Self {
            visibility: DEFAULT_VISIBILITY,
            dephased: false,
            mean_coincidences_per_setting: DEFAULT_MEAN_PER_SETTING,
            n_settings: DEFAULT_SETTINGS,
            measurements: MeasurementSet::Spiral,
            seed: 0,
        }
    }
}

impl SourceConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.visibility) {
            return Err(Error::Config(format!(
                "visibility {} outside [0, 1]",
                self.visibility
            )));
        }
        if !(self.mean_coincidences_per_setting > 0.0)
            || !self.mean_coincidences_per_setting.is_finite()
        {
            return Err(Error::Config("mean coincidences must be positive".into()));
        }
        if self.n_settings == 0 {
            return Err(Error::Config("need at least one setting".into()));
        }
        if self.measurements == MeasurementSet::Chsh && self.n_settings != 2 {
            return Err(Error::Config("CHSH measurements use exactly 2 settings".into()));
        }
        Ok(())
    }
}

/// `v |Φ⁺⟩⟨Φ⁺| + (1 − v) I/4`.
pub fn werner_state(v: f64) -> Result<DensityOperator> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::Config(format!("visibility {v} outside [0, 1]")));
    }
    let pure = ComplexMatrix::outer(&phi_plus()).scale(v);
    let noise = ComplexMatrix::identity(4).scale((1.0 - v) / 4.0);
    Ok(DensityOperator::new_unchecked(&pure + &noise))
}

/// Completely dephases Bob's qubit in the Pauli-X eigenbasis:
/// `ρ ↦ ½ρ + ½ (I⊗X) ρ (I⊗X)`.
pub fn dephase_b(rho: &DensityOperator) -> DensityOperator {
    let x = ComplexMatrix::from_real_rows(2, &[0.0, 1.0, 1.0, 0.0]).expect("Pauli X");
    let ix = ComplexMatrix::identity(2).kron(&x);
    let flipped = &(&ix * rho.matrix()) * &ix;
    DensityOperator::new_unchecked((&flipped + rho.matrix()).scale(0.5))
}

/// Unit Bloch vectors `z_k = 1 − (2k+1)/n`, azimuth `φ_k = k π (3 − √5)`.
pub fn spiral_directions(n: usize) -> Vec<[f64; 3]> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - (2 * k + 1) as f64 / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = k as f64 * golden;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// Rank-1 projectors along [`spiral_directions`].
pub fn spiral_measurements(n: usize) -> Vec<Effect> {
    spiral_directions(n).into_iter().map(Effect::projector).collect()
}

/// Alice along Bloch z and x; Bob along `(z ± x)/√2`.
pub fn chsh_measurements() -> (Vec<Effect>, Vec<Effect>) {
    let h = FRAC_1_SQRT_2;
    (
        vec![Effect::projector([0.0, 0.0, 1.0]), Effect::projector([1.0, 0.0, 0.0])],
        vec![Effect::projector([h, 0.0, h]), Effect::projector([-h, 0.0, h])],
    )
}

/// Independent Poisson draw per cell with mean `mean_per_setting × P`.
pub fn sample_counts(behavior: &Behavior, mean_per_setting: f64, seed: u64) -> Result<CountTable> {
    if !(mean_per_setting > 0.0) || !mean_per_setting.is_finite() {
        return Err(Error::Config("mean per setting must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let counts = behavior
        .as_slice()
        .iter()
        .map(|&p| poisson(mean_per_setting * p.max(0.0), &mut rng))
        .collect();
    CountTable::from_vec(behavior.scenario(), counts)
}

pub(crate) fn poisson(mean: f64, rng: &mut ChaCha8Rng) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("positive finite mean").sample(rng) as u64
}

/// SplitMix64 finalizer; derives independent child seeds.
pub fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Everything needed to reproduce a simulated dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config: SourceConfig,
    pub state: DensityOperator,
    pub effects_a: Vec<Effect>,
    pub effects_b: Vec<Effect>,
    pub train_seed: u64,
    pub test_seed: u64,
    pub fidelity_phi_plus: f64,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub exact: Behavior,
    pub train: CountTable,
    pub test: CountTable,
    pub provenance: Provenance,
}

/// The exact source behavior for `config`, before sampling.
pub fn source_params(config: &SourceConfig) -> Result<QccParams> {
    config.validate()?;
    let mut rho = werner_state(config.visibility)?;
    if config.dephased {
        rho = dephase_b(&rho);
    }
    let (effects_a, effects_b) = match config.measurements {
        MeasurementSet::Spiral => {
            let m = spiral_measurements(config.n_settings);
            (m.clone(), m)
        }
        MeasurementSet::Chsh => chsh_measurements(),
    };
    Ok(QccParams {
        rho,
        effects_a,
        effects_b,
    })
}

/// Training and test tables from two independent Poisson draws.
pub fn generate_dataset(config: &SourceConfig) -> Result<Dataset> {
    let params = source_params(config)?;
    let sc = Scenario::binary(config.n_settings);
    let exact = predict_qcc(&params, &sc)?;
    let train_seed = mix_seed(config.seed, 1);
    let test_seed = mix_seed(config.seed, 2);
    let train = sample_counts(&exact, config.mean_coincidences_per_setting, train_seed)?;
    let test = sample_counts(&exact, config.mean_coincidences_per_setting, test_seed)?;
    let fidelity_phi_plus = crate::quantum::fidelity(&params.rho, &phi_plus())?;
    Ok(Dataset {
        exact,
        train,
        test,
        provenance: Provenance {
            config: config.clone(),
            state: params.rho,
            effects_a: params.effects_a,
            effects_b: params.effects_b,
            train_seed,
            test_seed,
            fidelity_phi_plus,
        },
    })
}

/// Real-amplitude two-qubit vector.
pub fn ket(amplitudes: [f64; 4]) -> [Complex64; 4] {
    amplitudes.map(|a| Complex64::new(a, 0.0))
}
