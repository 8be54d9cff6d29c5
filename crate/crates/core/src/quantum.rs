//! Two-qubit states, qubit effects and the quantum common-cause map
//! `P(xy|st) = Tr[(E_{x|s} ⊗ E_{y|t}) ρ]`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::behavior::{Behavior, Scenario};
use crate::error::{Error, Result};

/// Tolerance on Hermiticity, trace and spectrum checks.
pub const QUANTUM_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_rows(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::Dimension {
                what: "complex matrix",
                expected: dim * dim,
                got: entries.len(),
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidQuantum("non-finite matrix entry".into()));
        }
        Ok(Self { dim, entries })
    }

    pub fn from_real_rows(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::from_rows(dim, entries.iter().map(|&r| Complex64::new(r, 0.0)).collect())
    }

    /// `|v⟩⟨v|`.
    pub fn outer(v: &[Complex64]) -> Self {
        let n = v.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.entries[i * n + j] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        self.entries[i * self.dim + j] = z;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.entries[j * n + i] = self.entries[i * n + j].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * a).collect(),
        }
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        let mut out = Self::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self.get(i, j);
                for k in 0..m {
                    for l in 0..m {
                        out.set(i * m + k, j * m + l, a * other.get(k, l));
                    }
                }
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// Ascending eigenvalues of the Hermitian part.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let n = self.dim;
        let m = DMatrix::from_fn(n, n, |i, j| (self.get(i, j) + self.get(j, i).conj()) * 0.5);
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// `⟨v|M|v⟩`.
    pub fn quadratic_form(&self, v: &[Complex64]) -> Complex64 {
        let n = self.dim;
        let mut acc = ZERO;
        for i in 0..n {
            let mut row = ZERO;
            for j in 0..n {
                row += self.get(i, j) * v[j];
            }
            acc += v[i].conj() * row;
        }
        acc
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                for j in 0..n {
                    out.entries[i * n + j] += a * rhs.get(k, j);
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

/// `[[re, im], ...]` rows, the JSON layout for matrices.
impl Serialize for ComplexMatrix {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = self
            .entries
            .chunks(self.dim)
            .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        rows.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(de)?;
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(serde::de::Error::custom("matrix rows must form a square grid"));
        }
        let entries = rows
            .into_iter()
            .flatten()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        ComplexMatrix::from_rows(dim, entries).map_err(serde::de::Error::custom)
    }
}

/// Positive, unit-trace operator on two qubits.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct DensityOperator(ComplexMatrix);

impl DensityOperator {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if m.dim() != 4 {
            return Err(Error::Dimension {
                what: "density operator",
                expected: 4,
                got: m.dim(),
            });
        }
        if m.hermiticity_defect() > QUANTUM_TOL {
            return Err(Error::InvalidQuantum("density operator not Hermitian".into()));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > QUANTUM_TOL || tr.im.abs() > QUANTUM_TOL {
            return Err(Error::InvalidQuantum(format!("density operator trace {tr}")));
        }
        let min = m.hermitian_eigenvalues()[0];
        if min < -QUANTUM_TOL {
            return Err(Error::InvalidQuantum(format!(
                "density operator has eigenvalue {min}"
            )));
        }
        Ok(Self(m))
    }

    pub(crate) fn new_unchecked(m: ComplexMatrix) -> Self {
        Self(m)
    }

    /// `|ψ⟩⟨ψ|` for a unit vector.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        check_unit(psi, 4)?;
        Self::new(ComplexMatrix::outer(psi))
    }

    pub fn maximally_mixed() -> Self {
        Self(ComplexMatrix::identity(4).scale(0.25))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }
}

impl<'de> Deserialize<'de> for DensityOperator {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(de)?;
        Self::new(m).map_err(serde::de::Error::custom)
    }
}

/// Outcome-0 element `E_0` of a binary qubit POVM; `E_1 = I − E_0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Effect(ComplexMatrix);

impl Effect {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if m.dim() != 2 {
            return Err(Error::Dimension {
                what: "effect",
                expected: 2,
                got: m.dim(),
            });
        }
        if m.hermiticity_defect() > QUANTUM_TOL {
            return Err(Error::InvalidQuantum("effect not Hermitian".into()));
        }
        let (lo, hi) = eig2(&m);
        if lo < -QUANTUM_TOL || hi > 1.0 + QUANTUM_TOL {
            return Err(Error::InvalidQuantum(format!(
                "effect eigenvalues ({lo}, {hi}) outside [0, 1]"
            )));
        }
        Ok(Self(m))
    }

    /// Rank-1 projector onto the Bloch direction `(x, y, z)` (normalized here).
    pub fn projector(bloch: [f64; 3]) -> Self {
        let r = (bloch[0] * bloch[0] + bloch[1] * bloch[1] + bloch[2] * bloch[2]).sqrt();
        let n = bloch.map(|c| c / r);
        Self(bloch_operator(1.0, 0.0, n))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    /// `E_1 = I − E_0`.
    pub fn complement(&self) -> Self {
        Self(&ComplexMatrix::identity(2) - &self.0)
    }
}

impl<'de> Deserialize<'de> for Effect {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(de)?;
        Self::new(m).map_err(serde::de::Error::custom)
    }
}

/// Eigenvalues of the Hermitian part of a 2×2 matrix, ascending.
fn eig2(m: &ComplexMatrix) -> (f64, f64) {
    let a = m.get(0, 0).re;
    let d = m.get(1, 1).re;
    let b = (m.get(0, 1) + m.get(1, 0).conj()) * 0.5;
    let mean = 0.5 * (a + d);
    let r = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    (mean - r, mean + r)
}

/// `μ0 |n⟩⟨n| + μ1 |n⊥⟩⟨n⊥|` for unit Bloch vector `n`.
fn bloch_operator(mu0: f64, mu1: f64, n: [f64; 3]) -> ComplexMatrix {
    let a = 0.5 * (mu0 + mu1);
    let b = 0.5 * (mu0 - mu1);
    ComplexMatrix {
        dim: 2,
        entries: vec![
            Complex64::new(a + b * n[2], 0.0),
            Complex64::new(b * n[0], -b * n[1]),
            Complex64::new(b * n[0], b * n[1]),
            Complex64::new(a - b * n[2], 0.0),
        ],
    }
}

/// `(1 + sin u)/2`: onto `[0, 1]`, smooth, with `0` and `1` attained at
/// finite arguments. The eigenvalue map used by [`make_effect`].
#[inline]
pub fn unit_interval(u: f64) -> f64 {
    0.5 * (1.0 + u.sin())
}

/// Effect with eigenvalue `σ(lam0)` along Bloch direction `(θ, φ)` and
/// `σ(lam1)` along the antipode, `σ` being [`unit_interval`].
pub fn make_effect(lam0: f64, lam1: f64, theta: f64, phi: f64) -> Effect {
    let n = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
    Effect(bloch_operator(unit_interval(lam0), unit_interval(lam1), n))
}

/// `T T† / Tr(T T†)`.
pub fn make_density(factor: &ComplexMatrix) -> Result<DensityOperator> {
    if factor.dim() != 4 {
        return Err(Error::Dimension {
            what: "density factor",
            expected: 4,
            got: factor.dim(),
        });
    }
    let tt = factor * &factor.adjoint();
    let tr = tt.trace().re;
    if !(tr > 0.0) || !tr.is_finite() {
        return Err(Error::InvalidQuantum("density factor is zero".into()));
    }
    let mut rho = tt.scale(1.0 / tr);
    // Exact Hermiticity: average with the adjoint.
    let adj = rho.adjoint();
    rho = (&rho + &adj).scale(0.5);
    Ok(DensityOperator(rho))
}

fn check_unit(psi: &[Complex64], dim: usize) -> Result<()> {
    if psi.len() != dim {
        return Err(Error::Dimension {
            what: "state vector",
            expected: dim,
            got: psi.len(),
        });
    }
    let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    if (norm - 1.0).abs() > QUANTUM_TOL {
        return Err(Error::InvalidQuantum(format!(
            "state vector has squared norm {norm}"
        )));
    }
    Ok(())
}

/// `⟨ψ|ρ|ψ⟩` for a unit vector `ψ`.
pub fn fidelity(rho: &DensityOperator, psi: &[Complex64]) -> Result<f64> {
    check_unit(psi, 4)?;
    Ok(rho.0.quadratic_form(psi).re.clamp(0.0, 1.0))
}

/// `(|00⟩ + |11⟩)/√2`.
pub fn phi_plus() -> [Complex64; 4] {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    [h, ZERO, ZERO, h]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QccParams {
    pub rho: DensityOperator,
    pub effects_a: Vec<Effect>,
    pub effects_b: Vec<Effect>,
}

impl QccParams {
    pub fn validate(&self, sc: &Scenario) -> Result<()> {
        if sc.n_x != 2 || sc.n_y != 2 {
            return Err(Error::InvalidScenario(format!(
                "quantum model needs binary outcomes, got {sc}"
            )));
        }
        if self.effects_a.len() != sc.n_s {
            return Err(Error::Dimension {
                what: "Alice effects",
                expected: sc.n_s,
                got: self.effects_a.len(),
            });
        }
        if self.effects_b.len() != sc.n_t {
            return Err(Error::Dimension {
                what: "Bob effects",
                expected: sc.n_t,
                got: self.effects_b.len(),
            });
        }
        DensityOperator::new(self.rho.0.clone())?;
        for e in self.effects_a.iter().chain(&self.effects_b) {
            Effect::new(e.0.clone())?;
        }
        Ok(())
    }
}

pub fn predict_qcc(params: &QccParams, sc: &Scenario) -> Result<Behavior> {
    params.validate(sc)?;
    let mut out = vec![0.0; sc.len()];
    qcc_into(&params.rho, &params.effects_a, &params.effects_b, sc, &mut out);
    Ok(Behavior::from_vec_unchecked(*sc, out))
}

/// Unchecked kernel. Marginals are computed once per party, so the output is
/// no-signalling to rounding.
pub(crate) fn qcc_into(
    rho: &DensityOperator,
    effects_a: &[Effect],
    effects_b: &[Effect],
    sc: &Scenario,
    out: &mut [f64],
) {
    let r = &rho.0;
    // ρ[(a', b'), (a, b)] at index (2a' + b') * 4 + (2a + b).
    let rho_at = |ap: usize, bp: usize, a: usize, b: usize| r.entries[(2 * ap + bp) * 4 + 2 * a + b];

    // Bob's reduced state R[b, b'] = Σ_a ρ[(a, b'), (a, b)].
    let mut bob_red = [[ZERO; 2]; 2];
    for (b, row) in bob_red.iter_mut().enumerate() {
        for (bp, cell) in row.iter_mut().enumerate() {
            *cell = (0..2).map(|a| rho_at(a, bp, a, b)).sum();
        }
    }
    let contract = |e: &ComplexMatrix, m: &[[Complex64; 2]; 2]| -> f64 {
        let mut acc = ZERO;
        for (b, row) in m.iter().enumerate() {
            for (bp, cell) in row.iter().enumerate() {
                acc += e.entries[b * 2 + bp] * cell;
            }
        }
        acc.re
    };
    let p_b: Vec<f64> = effects_b.iter().map(|e| contract(&e.0, &bob_red)).collect();

    for (s, ea) in effects_a.iter().enumerate() {
        let a_mat = &ea.0;
        // M_s[b, b'] = Σ_{a,a'} A[a, a'] ρ[(a', b'), (a, b)].
        let mut m = [[ZERO; 2]; 2];
        for (b, row) in m.iter_mut().enumerate() {
            for (bp, cell) in row.iter_mut().enumerate() {
                let mut acc = ZERO;
                for a in 0..2 {
                    for ap in 0..2 {
                        acc += a_mat.entries[a * 2 + ap] * rho_at(ap, bp, a, b);
                    }
                }
                *cell = acc;
            }
        }
        let p_a = m[0][0].re + m[1][1].re;
        for (t, eb) in effects_b.iter().enumerate() {
            let p00 = contract(&eb.0, &m);
            let block = &mut out[(s * sc.n_t + t) * 4..][..4];
            block[0] = p00;
            block[1] = p_a - p00;
            block[2] = p_b[t] - p00;
            block[3] = 1.0 - p_a - p_b[t] + p00;
        }
    }
}
