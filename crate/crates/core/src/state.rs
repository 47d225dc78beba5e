//! Qunit states between the preparation and probing stages.
//!
//! A [`DensityMatrix`] is always Hermitian as stored: construction keeps the
//! upper triangle and mirrors it, so downstream code never sees
//! representation noise in `rho_kj` versus `conj(rho_jk)`. Trace and
//! positivity are checked against fixed tolerances.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Largest tolerated `|rho_jk - conj(rho_kj)|` in raw input.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Largest tolerated `|tr rho - 1|`.
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest eigenvalue still accepted as positive semidefinite.
pub const PSD_TOL: f64 = -1e-10;

/// Hermitian, positive semidefinite, unit-trace `n x n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Checks the three density-matrix invariants and stores the matrix.
    pub fn validate(raw: DMatrix<Complex64>) -> Result<Self> {
        let (rows, cols) = raw.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows < 2 {
            return Err(Error::TooFewPaths { n: rows });
        }
        let mut deviation = 0.0f64;
        for j in 0..rows {
            for k in j..rows {
                deviation = deviation.max((raw[(j, k)] - raw[(k, j)].conj()).norm());
            }
        }
        if !(deviation <= HERMITIAN_TOL) {
            return Err(Error::NotHermitian { deviation });
        }
        let rho = Self::from_upper(raw);
        let trace = rho.trace();
        if !((trace - 1.0).abs() <= TRACE_TOL) {
            return Err(Error::TraceNotOne {
                trace,
                deviation: (trace - 1.0).abs(),
            });
        }
        let min_eigenvalue = rho.min_eigenvalue();
        if !(min_eigenvalue >= PSD_TOL) {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(rho)
    }

    /// Row-major construction, mostly for tests and literals.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        for row in rows {
            if row.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
        }
        Self::validate(DMatrix::from_fn(n, n, |j, k| rows[j][k]))
    }

    /// Mirrors the upper triangle and drops the imaginary part of the
    /// diagonal. Callers guarantee trace and positivity.
    pub(crate) fn from_upper(m: DMatrix<Complex64>) -> Self {
        let n = m.nrows();
        let entries = DMatrix::from_fn(n, n, |j, k| match j.cmp(&k) {
            std::cmp::Ordering::Less => m[(j, k)],
            std::cmp::Ordering::Equal => Complex64::new(m[(j, j)].re, 0.0),
            std::cmp::Ordering::Greater => m[(k, j)].conj(),
        });
        Self { entries }
    }

    /// Rank-one state with entries `sqrt(p_j p_k) exp(i(phi_j - phi_k))`.
    pub fn pure_state(probabilities: &[f64], phases: &[f64]) -> Result<Self> {
        let n = probabilities.len();
        if phases.len() != n {
            return Err(Error::BadLength {
                expected: n,
                got: phases.len(),
            });
        }
        check_probabilities(probabilities)?;
        let amps: Vec<Complex64> = probabilities
            .iter()
            .zip(phases)
            .map(|(&p, &phi)| Complex64::from_polar(p.max(0.0).sqrt(), phi))
            .collect();
        let mut rho = Self::projector(&amps);
        // keep the requested probabilities exactly on the diagonal
        for (j, &p) in probabilities.iter().enumerate() {
            rho.entries[(j, j)] = Complex64::new(p, 0.0);
        }
        Ok(rho)
    }

    /// `psi psi^dagger / |psi|^2`.
    pub fn from_amplitudes(amplitudes: &[Complex64]) -> Result<Self> {
        let n = amplitudes.len();
        if n < 2 {
            return Err(Error::TooFewPaths { n });
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::BadProbabilities("zero or non-finite amplitude vector".into()));
        }
        let amps: Vec<Complex64> = amplitudes.iter().map(|a| a / norm).collect();
        Ok(Self::projector(&amps))
    }

    fn projector(amps: &[Complex64]) -> Self {
        let n = amps.len();
        Self::from_upper(DMatrix::from_fn(n, n, |j, k| amps[j] * amps[k].conj()))
    }

    /// Incoherent state with the given path probabilities.
    pub fn diagonal(probabilities: &[f64]) -> Result<Self> {
        check_probabilities(probabilities)?;
        let n = probabilities.len();
        Ok(Self::from_upper(DMatrix::from_fn(n, n, |j, k| {
            if j == k {
                Complex64::new(probabilities[j], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })))
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        Self::diagonal(&vec![1.0 / n as f64; n])
    }

    /// The path is certainly `path` (0-based).
    pub fn path_certain(n: usize, path: usize) -> Result<Self> {
        if path >= n {
            return Err(Error::BadParameter(format!("path {path} out of range for n = {n}")));
        }
        let mut p = vec![0.0; n];
        p[path] = 1.0;
        Self::diagonal(&p)
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entry(&self, j: usize, k: usize) -> Complex64 {
        self.entries[(j, k)]
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn diagonal_probs(&self) -> Vec<f64> {
        (0..self.n()).map(|j| self.entries[(j, j)].re).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n()).map(|j| self.entries[(j, j)].re).sum()
    }

    /// `tr(rho^2)`, equal to the squared Frobenius norm for Hermitian rho.
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|e| e.norm_sqr()).sum()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.entries.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(f64::NAN)
    }

    /// Diagonal sorted in descending order; ties keep the original index order.
    pub fn sorted_path_probs(&self) -> PathDistribution {
        PathDistribution::sorted_from(&self.diagonal_probs())
    }

    /// `rho_jk -> exp(i(phi_j - phi_k)) rho_jk`.
    pub fn apply_path_phases(&self, phases: &[f64]) -> Result<Self> {
        let n = self.n();
        if phases.len() != n {
            return Err(Error::BadLength {
                expected: n,
                got: phases.len(),
            });
        }
        let m = DMatrix::from_fn(n, n, |j, k| {
            self.entries[(j, k)] * Complex64::from_polar(1.0, phases[j] - phases[k])
        });
        Ok(Self::from_upper(m))
    }

    /// Relabels the paths: new path `j` is old path `perm[j]`.
    pub fn permute_paths(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n();
        check_permutation(perm, n)?;
        let m = DMatrix::from_fn(n, n, |j, k| self.entries[(perm[j], perm[k])]);
        Ok(Self::from_upper(m))
    }

    /// `(1 - weight) * self + weight * other`.
    pub fn mix(&self, other: &Self, weight: f64) -> Result<Self> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch {
                left: self.n(),
                right: other.n(),
            });
        }
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::BadParameter(format!("mixing weight {weight} outside [0, 1]")));
        }
        Ok(Self::from_upper(
            &self.entries * Complex64::new(1.0 - weight, 0.0) + &other.entries * Complex64::new(weight, 0.0),
        ))
    }

    /// Multiplies every off-diagonal entry by `s` in `[0, 1]`.
    pub fn scale_coherences(&self, s: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::BadParameter(format!("coherence factor {s} outside [0, 1]")));
        }
        let n = self.n();
        let m = DMatrix::from_fn(n, n, |j, k| {
            if j == k {
                self.entries[(j, k)]
            } else {
                self.entries[(j, k)] * s
            }
        });
        Ok(Self::from_upper(m))
    }

    /// The complex diagonal moment `z` and the phase `theta` of the
    /// phase-invariant product `rho_12 rho_23 rho_31` of a qutrit.
    pub fn qutrit_moment(&self) -> Result<QutritMoment> {
        if self.n() != 3 {
            return Err(Error::WrongDimension {
                expected: 3,
                got: self.n(),
            });
        }
        let q = cube_root_of_unity();
        let z = q * self.entries[(0, 0)].re + q * q * self.entries[(1, 1)].re + self.entries[(2, 2)].re;
        let product = self.entries[(0, 1)] * self.entries[(1, 2)] * self.entries[(2, 0)];
        let theta = if product == Complex64::new(0.0, 0.0) {
            0.0
        } else {
            let t = product.arg();
            // arg() returns [-pi, pi]; the convention excludes -pi.
            if t <= -PI {
                t + 2.0 * PI
            } else {
                t
            }
        };
        Ok(QutritMoment { z, theta })
    }

    pub fn to_json(&self) -> String {
        let file = StateFile {
            n: self.n(),
            entries: (0..self.n())
                .map(|j| (0..self.n()).map(|k| [self.entries[(j, k)].re, self.entries[(j, k)].im]).collect())
                .collect(),
        };
        serde_json::to_string(&file).expect("state serializes")
    }

    /// Parses the `{"n": .., "entries": [[[re, im], ..], ..]}` format and
    /// validates the result.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: StateFile = serde_json::from_str(text)?;
        if file.entries.len() != file.n {
            return Err(Error::BadLength {
                expected: file.n,
                got: file.entries.len(),
            });
        }
        let rows: Vec<Vec<Complex64>> = file
            .entries
            .iter()
            .map(|row| row.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
            .collect();
        Self::from_rows(&rows)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct StateFile {
    n: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

/// `q = exp(2 pi i / 3)`.
pub fn cube_root_of_unity() -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI / 3.0)
}

fn check_probabilities(p: &[f64]) -> Result<()> {
    if p.len() < 2 {
        return Err(Error::TooFewPaths { n: p.len() });
    }
    if let Some(bad) = p.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
        return Err(Error::BadProbabilities(format!("negative or non-finite entry {bad}")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > TRACE_TOL {
        return Err(Error::BadProbabilities(format!("entries sum to {sum}")));
    }
    Ok(())
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::BadLength {
            expected: n,
            got: perm.len(),
        });
    }
    let mut seen = vec![false; n];
    for &i in perm {
        if i >= n || seen[i] {
            return Err(Error::BadParameter(format!("{perm:?} is not a permutation of 0..{n}")));
        }
        seen[i] = true;
    }
    Ok(())
}

/// Path probabilities in nonincreasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct PathDistribution(Vec<f64>);

impl PathDistribution {
    /// Validates and sorts; ties keep their input order.
    pub fn new(probabilities: &[f64]) -> Result<Self> {
        check_probabilities(probabilities)?;
        Ok(Self::sorted_from(probabilities))
    }

    pub(crate) fn sorted_from(p: &[f64]) -> Self {
        let mut v = p.to_vec();
        // stable: equal values keep original index order
        v.sort_by(|a, b| b.total_cmp(a));
        Self(v)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    /// `p_1`, the largest path probability.
    pub fn max(&self) -> f64 {
        self.0[0]
    }
}

/// Qutrit diagonal moment `z = q rho_11 + q^2 rho_22 + rho_33` and the
/// phase of `rho_12 rho_23 rho_31`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QutritMoment {
    pub z: Complex64,
    pub theta: f64,
}

impl QutritMoment {
    /// `rho_kk = 1/3 + (2/3) Re(q^-k z)` for k = 1, 2, 3.
    pub fn reconstruct_diagonal(&self) -> [f64; 3] {
        let q = cube_root_of_unity();
        let mut out = [0.0; 3];
        for (k, slot) in out.iter_mut().enumerate() {
            let qk = q.powu(k as u32 + 1).conj();
            *slot = 1.0 / 3.0 + 2.0 / 3.0 * (qk * self.z).re;
        }
        out
    }

    /// Whether `z` lies in the closed triangle with corners 1, q, q^2.
    pub fn in_triangle(&self, slack: f64) -> bool {
        // Barycentric weights are exactly the reconstructed diagonal.
        self.reconstruct_diagonal().iter().all(|&w| w >= -slack)
    }
}
