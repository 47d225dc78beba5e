//! Path-knowledge measures `P(diag rho)`.
//!
//! Four families are provided: betting games with a gain schedule, the
//! normalized purity, the normalized Shannon entropy and the Rényi-type
//! measures with their `lambda -> 0, 1, inf` limits. All of them are
//! functions of the path probabilities only, equal 1 for a certain path and
//! 0 for a uniform distribution.

use rand::Rng;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::random::{random_density, random_permutation, random_simplex, rng_from_seed};
use crate::state::{DensityMatrix, PathDistribution};

/// Tolerance on `sum g_m = 0`.
pub const GAIN_SUM_TOL: f64 = 1e-12;
/// Rényi orders with `|lambda - 1|` up to this value use the entropy.
pub const RENYI_ENTROPY_SWITCH: f64 = 1e-4;
/// `n p_1 - 1` at or below this counts as a uniform maximum.
pub const UNIFORM_MAX_TOL: f64 = 1e-12;

/// Payouts `g_m` for needing `m` guesses: `1 = g_1 > g_2 >= ... >= g_n`,
/// summing to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct GainVector(Vec<f64>);

impl GainVector {
    pub fn new(g: Vec<f64>) -> Result<Self> {
        if g.len() < 2 {
            return Err(Error::TooFewPaths { n: g.len() });
        }
        if (g[0] - 1.0).abs() > GAIN_SUM_TOL {
            return Err(Error::GainOrderViolated(format!("g1 = {} must be 1", g[0])));
        }
        if !(g[1] < g[0]) {
            return Err(Error::GainOrderViolated(format!("g2 = {} is not below g1", g[1])));
        }
        if let Some(w) = g.windows(2).skip(1).find(|w| !(w[1] <= w[0])) {
            return Err(Error::GainOrderViolated(format!("{} is followed by larger {}", w[0], w[1])));
        }
        let sum: f64 = g.iter().sum();
        if sum.abs() > GAIN_SUM_TOL {
            return Err(Error::GainSumNonzero { sum });
        }
        Ok(Self(g))
    }

    /// `g = (1, -1/(n-1), ..., -1/(n-1))`
    pub fn one_guess(n: usize) -> Self {
        let rest = -1.0 / (n as f64 - 1.0);
        let mut g = vec![rest; n];
        g[0] = 1.0;
        Self(g)
    }

    /// `g_m = (n + 1 - 2m) / (n - 1)`
    pub fn linear(n: usize) -> Self {
        let d = n as f64 - 1.0;
        Self((1..=n).map(|m| (n as f64 + 1.0 - 2.0 * m as f64) / d).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }
}

/// Which path-knowledge functional to use.
///
/// Parses from `one-guess`, `linear`, `bet:1,0,-1`, `purity`, `entropy`,
/// `renyi:2.5`, `renyi:inf` and `renyi:0`.
#[derive(Debug, Clone, PartialEq)]
pub enum Measure {
    OneGuess,
    Linear,
    Bet(GainVector),
    Purity,
    Entropy,
    /// Finite order `lambda > 0`.
    Renyi(f64),
    RenyiInf,
    RenyiZero,
}

impl Measure {
    /// The four measures worked out in closed form for qutrits.
    pub const CANONICAL: [Measure; 4] = [Measure::OneGuess, Measure::Linear, Measure::Purity, Measure::Entropy];

    pub fn renyi(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::BadMeasure(format!("renyi:{lambda}")));
        }
        Ok(Measure::Renyi(lambda))
    }

    /// Gain schedule for the betting measures.
    pub fn gains(&self, n: usize) -> Option<GainVector> {
        match self {
            Measure::OneGuess => Some(GainVector::one_guess(n)),
            Measure::Linear => Some(GainVector::linear(n)),
            Measure::Bet(g) => Some(g.clone()),
            _ => None,
        }
    }

    /// Binds the measure to a dimension for repeated evaluation.
    pub fn prepare(&self, n: usize) -> Result<PreparedMeasure> {
        if n < 2 {
            return Err(Error::TooFewPaths { n });
        }
        if let Measure::Bet(g) = self {
            if g.n() != n {
                return Err(Error::DimensionMismatch { left: g.n(), right: n });
            }
        }
        let kernel = match self {
            Measure::OneGuess | Measure::Linear | Measure::Bet(_) => Kernel::Bet(self.gains(n).unwrap().0),
            Measure::Purity => Kernel::Purity,
            Measure::Entropy => Kernel::Entropy,
            Measure::Renyi(l) if (l - 1.0).abs() <= RENYI_ENTROPY_SWITCH * (1.0 + 1e-9) => Kernel::Entropy,
            Measure::Renyi(l) => Kernel::Renyi(*l),
            Measure::RenyiInf => Kernel::RenyiInf,
            Measure::RenyiZero => Kernel::RenyiZero,
        };
        Ok(PreparedMeasure { n, kernel })
    }

    /// `P` of a probability vector in any order.
    pub fn of_probs(&self, p: &[f64]) -> Result<f64> {
        let prepared = self.prepare(p.len())?;
        let mut buf = p.to_vec();
        Ok(prepared.eval(&mut buf))
    }

    /// `P(diag rho)`.
    pub fn knowledge(&self, rho: &DensityMatrix) -> Result<f64> {
        self.of_probs(&rho.diagonal_probs())
    }

    /// Whether the measure depends on the probabilities only through `p_1`.
    pub fn depends_only_on_max(&self) -> bool {
        matches!(self, Measure::OneGuess | Measure::RenyiInf | Measure::RenyiZero)
    }
}

/// Convenience wrapper for [`Measure::knowledge`].
pub fn knowledge(measure: &Measure, rho: &DensityMatrix) -> Result<f64> {
    measure.knowledge(rho)
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Measure::OneGuess => write!(f, "one-guess"),
            Measure::Linear => write!(f, "linear"),
            Measure::Bet(g) => {
                let parts: Vec<String> = g.as_slice().iter().map(|x| format!("{x}")).collect();
                write!(f, "bet:{}", parts.join(","))
            }
            Measure::Purity => write!(f, "purity"),
            Measure::Entropy => write!(f, "entropy"),
            Measure::Renyi(l) => write!(f, "renyi:{l}"),
            Measure::RenyiInf => write!(f, "renyi:inf"),
            Measure::RenyiZero => write!(f, "renyi:0"),
        }
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::BadMeasure(s.to_string());
        match s {
            "one-guess" => return Ok(Measure::OneGuess),
            "linear" => return Ok(Measure::Linear),
            "purity" => return Ok(Measure::Purity),
            "entropy" => return Ok(Measure::Entropy),
            "renyi:inf" => return Ok(Measure::RenyiInf),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("bet:") {
            let g = rest
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| bad())?;
            return Ok(Measure::Bet(GainVector::new(g)?));
        }
        if let Some(rest) = s.strip_prefix("renyi:") {
            let l: f64 = rest.trim().parse().map_err(|_| bad())?;
            if l == 0.0 {
                return Ok(Measure::RenyiZero);
            }
            return Measure::renyi(l).map_err(|_| bad());
        }
        Err(bad())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Kernel {
    Bet(Vec<f64>),
    Purity,
    Entropy,
    Renyi(f64),
    RenyiInf,
    RenyiZero,
}

/// A measure bound to a dimension; `eval` does not allocate.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedMeasure {
    n: usize,
    kernel: Kernel,
}

impl PreparedMeasure {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Evaluates on `p`, which may be reordered in place. The result is
    /// clamped to `[0, 1]`.
    pub fn eval(&self, p: &mut [f64]) -> f64 {
        debug_assert_eq!(p.len(), self.n);
        let v = match &self.kernel {
            Kernel::Bet(g) => {
                p.sort_unstable_by(|a, b| b.total_cmp(a));
                g.iter().zip(p.iter()).map(|(g, p)| g * p).sum()
            }
            Kernel::Purity => purity(p),
            Kernel::Entropy => entropy(p),
            Kernel::Renyi(l) => renyi(p, *l),
            Kernel::RenyiInf => {
                let p1 = max_of(p);
                renyi_inf(p1, self.n)
            }
            Kernel::RenyiZero => renyi_zero(max_of(p)),
        };
        v.clamp(0.0, 1.0)
    }
}

fn max_of(p: &[f64]) -> f64 {
    p.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn purity(p: &[f64]) -> f64 {
    let n = p.len() as f64;
    let s: f64 = p.iter().map(|x| x * x).sum();
    ((n * s - 1.0) / (n - 1.0)).max(0.0).sqrt()
}

fn entropy(p: &[f64]) -> f64 {
    let n = p.len() as f64;
    // 0 log 0 = 0
    let s: f64 = p.iter().filter(|&&x| x > 0.0).map(|&x| x * (n * x).ln()).sum();
    s / n.ln()
}

fn renyi(p: &[f64], lambda: f64) -> f64 {
    let n = p.len() as f64;
    let ln_n = n.ln();
    let ratio_pow = |ratio: f64| -> f64 {
        if ratio <= 0.0 {
            0.0
        } else {
            (ratio.ln() / lambda).exp()
        }
    };
    if lambda < 1.0 {
        // (n - sum (n p)^l) / (n - n^l), both sides written with expm1
        let num: f64 = p
            .iter()
            .map(|&x| if x > 0.0 { -(lambda * (n * x).ln()).exp_m1() } else { 1.0 })
            .sum();
        let den = (n - 1.0) - (lambda * ln_n).exp_m1();
        return ratio_pow((num / den).min(1.0));
    }
    if lambda * ln_n < 600.0 {
        let num: f64 = p
            .iter()
            .map(|&x| if x > 0.0 { (lambda * (n * x).ln()).exp_m1() } else { -1.0 })
            .sum();
        let den = n * ((lambda - 1.0) * ln_n).exp_m1();
        return ratio_pow((num / den).min(1.0));
    }
    // Large orders: work with logarithms to avoid overflow of n^lambda.
    let p1 = max_of(p);
    let tail: f64 = p.iter().filter(|&&x| x > 0.0).map(|&x| (lambda * (x / p1).ln()).exp()).sum();
    let ln_sum = lambda * (n * p1).ln() + tail.ln();
    if ln_sum <= ln_n {
        return 0.0;
    }
    // ln(sum - n) and ln(n^lambda - n)
    let ln_num = ln_sum + (-(ln_n - ln_sum).exp()).ln_1p();
    let ln_den = lambda * ln_n + (-((1.0 - lambda) * ln_n).exp()).ln_1p();
    ((ln_num - ln_den) / lambda).exp().min(1.0)
}

fn renyi_inf(p1: f64, n: usize) -> f64 {
    if n as f64 * p1 - 1.0 > UNIFORM_MAX_TOL {
        p1
    } else {
        0.0
    }
}

fn renyi_zero(p1: f64) -> f64 {
    if p1 >= 1.0 - UNIFORM_MAX_TOL {
        1.0
    } else {
        0.0
    }
}

/// The two limiting Rényi orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenyiLimit {
    Infinity,
    Zero,
}

/// `lambda -> inf`: `p_1` unless `n p_1 = 1`. `lambda -> 0`: 1 iff `p_1 = 1`.
pub fn renyi_limits(diag: &PathDistribution, which: RenyiLimit) -> f64 {
    match which {
        RenyiLimit::Infinity => renyi_inf(diag.max(), diag.n()),
        RenyiLimit::Zero => renyi_zero(diag.max()),
    }
}

/// Largest violation found for each of the five measure axioms.
#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub measure: String,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    /// `P = 1` for a certain path, and `P < 1` otherwise.
    pub certainty: f64,
    /// `P = 0` for the uniform distribution.
    pub uniformity: f64,
    /// Invariance under permutations of the probabilities.
    pub permutation: f64,
    /// `P(mix) <= (1 - w) P_1 + w P_2`.
    pub convexity: f64,
    /// Moving weight from a larger to a smaller probability must not increase `P`.
    pub degradation: f64,
    /// Values outside `[0, 1]`.
    pub range: f64,
    /// Degradation steps that left `P` unchanged (within 1e-12).
    pub degradation_ties: usize,
}

impl AxiomReport {
    pub fn max_violation(&self) -> f64 {
        [self.certainty, self.uniformity, self.permutation, self.convexity, self.degradation, self.range]
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.max_violation() <= tol
    }
}

/// Randomized check of the measure axioms on `n`-path states.
///
/// Degradation is read as the transfer `p_i -> p_i + e`, `p_j -> p_j - e`
/// with `p_j > p_i` and `0 < e <= (p_j - p_i) / 2`.
pub fn check_axioms(measure: &Measure, n: usize, trials: usize, seed: u64) -> Result<AxiomReport> {
    let prepared = measure.prepare(n)?;
    let mut rng = rng_from_seed(seed);
    let eval = |p: &[f64]| -> f64 {
        let mut buf = p.to_vec();
        prepared.eval(&mut buf)
    };
    let mut report = AxiomReport {
        measure: measure.to_string(),
        n,
        trials,
        seed,
        certainty: 0.0,
        uniformity: 0.0,
        permutation: 0.0,
        convexity: 0.0,
        degradation: 0.0,
        range: 0.0,
        degradation_ties: 0,
    };
    let uniform = vec![1.0 / n as f64; n];
    report.uniformity = eval(&uniform).abs();

    for _ in 0..trials {
        let draw = |rng: &mut crate::random::SeededRng| -> Vec<f64> {
            if rng.random_bool(0.5) {
                random_density(n, rng).diagonal_probs()
            } else {
                random_simplex(n, rng)
            }
        };
        let p1 = draw(&mut rng);
        let p2 = draw(&mut rng);
        let v1 = eval(&p1);
        let v2 = eval(&p2);

        // (a)
        let mut certain = vec![0.0; n];
        certain[rng.random_range(0..n)] = 1.0;
        report.certainty = report.certainty.max((eval(&certain) - 1.0).abs());
        let top = p1.iter().copied().fold(0.0, f64::max);
        if top < 1.0 - 1e-9 && v1 >= 1.0 {
            report.certainty = report.certainty.max(1.0 - top);
        }

        // (c)
        let perm = random_permutation(n, &mut rng);
        let shuffled: Vec<f64> = perm.iter().map(|&i| p1[i]).collect();
        report.permutation = report.permutation.max((eval(&shuffled) - v1).abs());

        // (d)
        let w: f64 = rng.random();
        let mixed: Vec<f64> = p1.iter().zip(&p2).map(|(a, b)| (1.0 - w) * a + w * b).collect();
        let bound = (1.0 - w) * v1 + w * v2;
        report.convexity = report.convexity.max(eval(&mixed) - bound);

        // (e)
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        let (lo, hi) = if p1[i] < p1[j] { (i, j) } else { (j, i) };
        if p1[hi] > p1[lo] {
            let e = rng.random_range(0.0..=1.0) * (p1[hi] - p1[lo]) / 2.0;
            if e > 0.0 {
                let mut degraded = p1.clone();
                degraded[lo] += e;
                degraded[hi] -= e;
                let dv = eval(&degraded) - v1;
                report.degradation = report.degradation.max(dv);
                if dv.abs() <= 1e-12 {
                    report.degradation_ties += 1;
                }
            }
        }

        for v in [v1, v2] {
            report.range = report.range.max(-v).max(v - 1.0);
        }
    }
    Ok(report)
}
