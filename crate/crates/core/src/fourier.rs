//! Fourier matrices: unitary `n x n` matrices whose entries all have modulus
//! `1/sqrt(n)` (complex Hadamard matrices scaled to be unitary).
//!
//! Every Fourier matrix factors as `D_out * C * D_in` with diagonal phase
//! matrices and a *central* (dephased) matrix `C` whose last row and last
//! column are real and positive. Detector probabilities never depend on the
//! output phases, and one input phase is a gauge freedom, so searches only
//! need `n - 1` input phases plus whatever parameters label the central
//! matrix.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::state::{check_permutation, DensityMatrix};

/// Tolerance on both the unitarity and the modulus residual.
pub const FOURIER_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct FourierMatrix {
    entries: DMatrix<Complex64>,
}

/// Residuals reported by [`is_fourier`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FourierDiagnostics {
    pub is_fourier: bool,
    /// `max |(F F^dagger)_jk - delta_jk|`
    pub unitarity_residual: f64,
    /// `max | sqrt(n) |F_jk| - 1 |`
    pub modulus_residual: f64,
}

/// Checks unitarity and equal moduli. Never fails; a non-square matrix is
/// reported with infinite residuals.
pub fn is_fourier(m: &DMatrix<Complex64>) -> FourierDiagnostics {
    let (rows, cols) = m.shape();
    if rows != cols || rows == 0 {
        return FourierDiagnostics {
            is_fourier: false,
            unitarity_residual: f64::INFINITY,
            modulus_residual: f64::INFINITY,
        };
    }
    let n = rows;
    let gram = m * m.adjoint();
    let mut unitarity = 0.0f64;
    for j in 0..n {
        for k in 0..n {
            let target = if j == k { 1.0 } else { 0.0 };
            unitarity = unitarity.max((gram[(j, k)] - Complex64::new(target, 0.0)).norm());
        }
    }
    let root_n = (n as f64).sqrt();
    let modulus = m.iter().map(|e| (e.norm() * root_n - 1.0).abs()).fold(0.0, f64::max);
    FourierDiagnostics {
        is_fourier: unitarity <= FOURIER_TOL && modulus <= FOURIER_TOL,
        unitarity_residual: unitarity,
        modulus_residual: modulus,
    }
}

/// Result of pulling the phases out of a Fourier matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Dephased {
    pub central: FourierMatrix,
    /// `phi_k`, with the last one fixed to zero.
    pub input_phases: Vec<f64>,
    /// `phi'_j`
    pub output_phases: Vec<f64>,
}

impl Dephased {
    /// `diag(exp(i phi')) * central * diag(exp(i phi))`.
    pub fn recompose(&self) -> FourierMatrix {
        FourierMatrix {
            entries: apply_phases(&self.central.entries, &self.output_phases, &self.input_phases),
        }
    }
}

impl FourierMatrix {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        let d = is_fourier(&m);
        if !d.is_fourier {
            return Err(Error::NotFourier {
                unitarity: d.unitarity_residual,
                modulus: d.modulus_residual,
            });
        }
        Ok(Self { entries: m })
    }

    /// `F_jk = exp(2 pi i jk / n) exp(i phi'_j + i phi_k) / sqrt(n)` with
    /// 1-based `j, k`, so the zero-phase matrix is already central.
    pub fn standard(n: usize, input_phases: &[f64], output_phases: &[f64]) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewPaths { n });
        }
        for phases in [input_phases, output_phases] {
            if phases.len() != n {
                return Err(Error::BadLength {
                    expected: n,
                    got: phases.len(),
                });
            }
        }
        Ok(Self {
            entries: apply_phases(&dft_central(n), output_phases, input_phases),
        })
    }

    /// The one-parameter family of central 4x4 Fourier matrices.
    pub fn central_n4(t: f64) -> Self {
        Self {
            entries: central_n4_matrix(t),
        }
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn entry(&self, j: usize, k: usize) -> Complex64 {
        self.entries[(j, k)]
    }

    /// Splits into output phases, central matrix and input phases, using
    /// the gauge `phi_n = 0`.
    pub fn dephase(&self) -> Dephased {
        let n = self.n();
        let output_phases: Vec<f64> = (0..n).map(|j| self.entries[(j, n - 1)].arg()).collect();
        let input_phases: Vec<f64> = (0..n)
            .map(|k| {
                if k == n - 1 {
                    0.0
                } else {
                    wrap_phase(self.entries[(n - 1, k)].arg() - output_phases[n - 1])
                }
            })
            .collect();
        let neg_out: Vec<f64> = output_phases.iter().map(|p| -p).collect();
        let neg_in: Vec<f64> = input_phases.iter().map(|p| -p).collect();
        let central = FourierMatrix {
            entries: apply_phases(&self.entries, &neg_out, &neg_in),
        };
        Dephased {
            central,
            input_phases,
            output_phases,
        }
    }

    /// `rho -> F rho F^dagger`.
    pub fn transform(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.n() != self.n() {
            return Err(Error::DimensionMismatch {
                left: self.n(),
                right: rho.n(),
            });
        }
        let out = &self.entries * rho.matrix() * self.entries.adjoint();
        Ok(DensityMatrix::from_upper(out))
    }

    /// Click probabilities `(F rho F^dagger)_mm` of the wave-mode detectors.
    pub fn detector_probs(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        Ok(self.transform(rho)?.diagonal_probs())
    }
}

/// `diag(exp(i row)) * m * diag(exp(i col))`.
fn apply_phases(m: &DMatrix<Complex64>, row: &[f64], col: &[f64]) -> DMatrix<Complex64> {
    let n = m.nrows();
    DMatrix::from_fn(n, m.ncols(), |j, k| m[(j, k)] * Complex64::from_polar(1.0, row[j] + col[k]))
}

pub(crate) fn wrap_phase(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

pub(crate) fn dft_central(n: usize) -> DMatrix<Complex64> {
    let scale = 1.0 / (n as f64).sqrt();
    DMatrix::from_fn(n, n, |j, k| {
        // 1-based exponent, reduced mod n to keep the angle small
        let e = ((j + 1) * (k + 1)) % n;
        Complex64::from_polar(scale, 2.0 * PI * e as f64 / n as f64)
    })
}

pub(crate) fn central_n4_matrix(t: f64) -> DMatrix<Complex64> {
    let e = Complex64::from_polar(0.5, t);
    let p = Complex64::new(0.5, 0.0);
    let rows = [[e, -p, -e, p], [-p, p, -p, p], [-e, -p, e, p], [p, p, p, p]];
    DMatrix::from_fn(4, 4, |j, k| rows[j][k])
}

/// Which central matrix a [`FourierFamily`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    StandardDft,
    CentralN2,
    CentralN3First,
    CentralN3Second,
    CentralN4,
}

/// Serializable description of a Fourier matrix.
///
/// JSON: `{"n":4,"family":"central-n4","t":1.0,"input_phases":[..]}` with
/// optional `output_phases` and, for `central-n4`, `column_permutation`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierFamily {
    pub n: usize,
    pub family: FamilyKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    pub input_phases: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub output_phases: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub column_permutation: Option<Vec<usize>>,
}

impl FourierFamily {
    /// Standard DFT with free input phases.
    pub fn standard(input_phases: Vec<f64>) -> Self {
        Self {
            n: input_phases.len(),
            family: FamilyKind::StandardDft,
            t: None,
            input_phases,
            output_phases: Vec::new(),
            column_permutation: None,
        }
    }

    pub fn central_n4(t: f64, column_permutation: Vec<usize>, input_phases: Vec<f64>) -> Self {
        Self {
            n: 4,
            family: FamilyKind::CentralN4,
            t: Some(t),
            input_phases,
            output_phases: Vec::new(),
            column_permutation: Some(column_permutation),
        }
    }

    fn central(&self) -> Result<DMatrix<Complex64>> {
        let fixed = |want: usize| -> Result<()> {
            if self.n != want {
                Err(Error::WrongDimension {
                    expected: want,
                    got: self.n,
                })
            } else {
                Ok(())
            }
        };
        let c = match self.family {
            FamilyKind::StandardDft => {
                if self.n < 2 {
                    return Err(Error::TooFewPaths { n: self.n });
                }
                dft_central(self.n)
            }
            FamilyKind::CentralN2 => {
                fixed(2)?;
                dft_central(2)
            }
            FamilyKind::CentralN3First => {
                fixed(3)?;
                dft_central(3)
            }
            FamilyKind::CentralN3Second => {
                fixed(3)?;
                dft_central(3).map(|e| e.conj())
            }
            FamilyKind::CentralN4 => {
                fixed(4)?;
                let t = self
                    .t
                    .ok_or_else(|| Error::BadParameter("central-n4 needs the parameter t".into()))?;
                central_n4_matrix(t)
            }
        };
        match &self.column_permutation {
            None => Ok(c),
            Some(perm) => {
                check_permutation(perm, self.n)?;
                Ok(DMatrix::from_fn(self.n, self.n, |j, k| c[(j, perm[k])]))
            }
        }
    }

    pub fn matrix(&self) -> Result<FourierMatrix> {
        let c = self.central()?;
        if self.input_phases.len() != self.n {
            return Err(Error::BadLength {
                expected: self.n,
                got: self.input_phases.len(),
            });
        }
        let out = if self.output_phases.is_empty() {
            vec![0.0; self.n]
        } else if self.output_phases.len() == self.n {
            self.output_phases.clone()
        } else {
            return Err(Error::BadLength {
                expected: self.n,
                got: self.output_phases.len(),
            });
        };
        FourierMatrix::new(apply_phases(&c, &out, &self.input_phases))
    }

    /// Moves the last input phase into the output phases so `phi_n = 0`.
    pub fn gauge_fixed(mut self) -> Self {
        if let Some(&last) = self.input_phases.last() {
            if last != 0.0 {
                for p in &mut self.input_phases {
                    *p = wrap_phase(*p - last);
                }
                if self.output_phases.is_empty() {
                    self.output_phases = vec![0.0; self.n];
                }
                for p in &mut self.output_phases {
                    *p = wrap_phase(*p + last);
                }
            }
        }
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("descriptor serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: Self = serde_json::from_str(text)?;
        // reject early rather than at first use
        f.matrix()?;
        Ok(f.gauge_fixed())
    }
}

/// Canonical representative of a matrix modulo row and column phases:
/// last column and last row made real positive.
fn dephase_raw(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = m.nrows();
    let mut a = m.clone();
    for j in 0..n {
        let ph = a[(j, n - 1)] / a[(j, n - 1)].norm();
        for k in 0..n {
            a[(j, k)] /= ph;
        }
    }
    for k in 0..n {
        let ph = a[(n - 1, k)] / a[(n - 1, k)].norm();
        for j in 0..n {
            a[(j, k)] /= ph;
        }
    }
    a
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let n = used.len();
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn permute_columns(m: &DMatrix<Complex64>, perm: &[usize]) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |j, k| m[(j, perm[k])])
}

/// Whether `central_n4(t) * P_sigma` equals `P_pi * central_n4(t') * P_rep`
/// up to row and column phases for some row permutation `pi` and some `t'`.
fn column_perm_equivalent(sigma: &[usize], rep: &[usize], t: f64, row_perms: &[Vec<usize>]) -> bool {
    let a = permute_columns(&central_n4_matrix(t), sigma);
    let base = dephase_raw(&permute_columns(&central_n4_matrix(0.0), rep));
    for pi in row_perms {
        let d = dephase_raw(&DMatrix::from_fn(4, 4, |j, k| a[(pi[j], k)]));
        // Entries of the dephased rep depend on t' as exp(i k t'), |k| <= 2;
        // collect candidate t' from every entry that moved.
        let mut candidates = vec![0.0];
        for (x, y) in d.iter().zip(base.iter()) {
            let r = (x / y).arg();
            if r.abs() > 1e-12 {
                for k in 1..=2 {
                    for branch in 0..k {
                        let tp = (r + 2.0 * PI * branch as f64) / k as f64;
                        candidates.push(tp);
                        candidates.push(-tp);
                    }
                }
            }
        }
        for tp in candidates {
            let b = dephase_raw(&permute_columns(&central_n4_matrix(tp), rep));
            if (&d - &b).iter().map(|e| e.norm()).fold(0.0, f64::max) < 1e-9 {
                return true;
            }
        }
    }
    false
}

/// Column permutations of the 4x4 central family that cannot be undone by
/// row permutations together with a change of `t`.
///
/// All 24 permutations are checked numerically at several generic `t`; the
/// survivors are `[0,1,2,3]`, `[0,1,3,2]` and `[0,2,1,3]`, one for each way
/// of pairing the four columns.
pub fn n4_column_classes() -> &'static [Vec<usize>] {
    static CLASSES: OnceLock<Vec<Vec<usize>>> = OnceLock::new();
    CLASSES.get_or_init(|| {
        let all = permutations(4);
        let probes = [0.37, 1.21, 2.93, -2.05];
        let mut reps: Vec<Vec<usize>> = Vec::new();
        for sigma in &all {
            let known = reps
                .iter()
                .any(|rep| probes.iter().all(|&t| column_perm_equivalent(sigma, rep, t, &all)));
            if !known {
                reps.push(sigma.clone());
            }
        }
        reps
    })
}
