//! Interference strength `V(rho) = max_F P(diag F rho F^dagger)`.
//!
//! The maximum runs over input phases of a central Fourier matrix (output
//! phases do not change the detector probabilities and the last input phase
//! is a global phase). For `n = 2, 3` every Fourier matrix is the standard
//! one up to phases and permutations. For `n = 4` the one-parameter family
//! `F(t)` is searched over `t` and over the three column classes that row
//! permutations cannot absorb. For `n >= 5` only the standard family is
//! searched and the result is a lower bound.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fourier::{dft_central, n4_column_classes, wrap_phase, FourierFamily, FourierMatrix};
use crate::knowledge::{Measure, PreparedMeasure};
use crate::random::{random_density, random_permutation, rng_from_seed, SeededRng};
use crate::state::DensityMatrix;

/// Grid points for `t` in the coarse stage.
pub const T_GRID: usize = 48;
/// Largest coarse grid evaluated exhaustively; beyond it random samples are used.
pub const GRID_BUDGET: usize = 1 << 21;
/// Number of random samples replacing an oversized grid.
pub const RANDOM_SAMPLES: usize = 1 << 16;

const SCAN_POINTS: usize = 10;
const SCOUT_CYCLES: usize = 4;
const POLISHED: usize = 4;
const GOLDEN_WIDTH: f64 = 1e-11;
const MIN_BRACKET: f64 = 1e-7;
const NEWTON_ROUNDS: usize = 8;
const NEWTON_STEP: f64 = 1e-4;
const NEWTON_MIN_GAIN: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchConfig {
    /// Number of ascent starts; `None` picks 16 for `n <= 3` and 64 otherwise.
    pub starts: Option<usize>,
    /// Coarse grid points per phase.
    pub grid: usize,
    pub tol: f64,
    /// Ascent cycles per start.
    pub max_iter: usize,
    /// Only used when the coarse grid is replaced by random samples.
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            starts: None,
            grid: 24,
            tol: 1e-10,
            max_iter: 500,
            seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.starts == Some(0) {
            return Err(Error::BadParameter("starts must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::BadParameter(format!("tol must be positive, got {}", self.tol)));
        }
        if self.grid < 2 {
            return Err(Error::BadParameter(format!("grid must be at least 2, got {}", self.grid)));
        }
        Ok(())
    }

    fn starts_for(&self, n: usize) -> usize {
        self.starts.unwrap_or(if n <= 3 { 16 } else { 64 })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrengthResult {
    pub v: f64,
    pub argmax: FourierFamily,
    /// Ascent cycles used by the winning start.
    pub iterations: usize,
    /// Improvement made by the last cycle of the winning start.
    pub residual: f64,
    /// Set for `n >= 5`, where only the standard family is searched.
    pub lower_bound_only: bool,
}

/// Numeric `V` by multi-start coarse grid plus coordinate ascent.
///
/// A bet is the largest of the linear functionals `sum_m g_s(m) p_m` over
/// reassignments `s` of the gains. For three paths each functional is
/// maximized on its own: the functionals are smooth, while their maximum has
/// ridges that can hide a narrow peak between grid points.
pub fn strength(measure: &Measure, rho: &DensityMatrix, cfg: &SearchConfig) -> Result<StrengthResult> {
    cfg.validate()?;
    let mut obj = Objective::new(measure, rho)?;
    let assignments = match measure.gains(obj.n) {
        Some(g) if obj.n == 3 => distinct_permutations(g.as_slice()),
        _ => vec![],
    };
    let mut best: Option<Ascent> = None;
    if assignments.is_empty() {
        best = Some(search(&mut obj, cfg));
    }
    for w in assignments {
        obj.weights = Some(w);
        let mut found = search(&mut obj, cfg);
        obj.weights = None;
        // the bet at the point is at least the functional
        found.v = obj.eval(found.point.class, &found.point.x);
        if best.as_ref().map_or(true, |b| found.v > b.v) {
            best = Some(found);
        }
    }
    let best = best.expect("at least one search");
    Ok(StrengthResult {
        v: best.v,
        argmax: obj.descriptor(&best.point),
        iterations: best.iterations,
        residual: best.residual,
        lower_bound_only: obj.n >= 5,
    })
}

struct Ascent {
    v: f64,
    point: Point,
    iterations: usize,
    residual: f64,
}

fn distinct_permutations(g: &[f64]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut idx: Vec<usize> = (0..g.len()).collect();
    permute(&mut idx, 0, &mut |perm| {
        let w: Vec<f64> = perm.iter().map(|&i| g[i]).collect();
        if !out.contains(&w) {
            out.push(w);
        }
    });
    out
}

fn permute(idx: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k == idx.len() {
        visit(idx);
        return;
    }
    for i in k..idx.len() {
        idx.swap(k, i);
        permute(idx, k + 1, visit);
        idx.swap(k, i);
    }
}

/// Short ascent from every coarse start, then full ascent from the most
/// promising ones.
fn search(obj: &mut Objective, cfg: &SearchConfig) -> Ascent {
    let starts = coarse_starts(obj, cfg);
    let scout = SearchConfig {
        max_iter: cfg.max_iter.min(SCOUT_CYCLES),
        ..cfg.clone()
    };
    let mut scouted: Vec<Option<Ascent>> = starts.into_iter().map(|s| Some(ascend(obj, s, &scout))).collect();
    let value = |a: &Option<Ascent>| a.as_ref().map_or(f64::NEG_INFINITY, |a| a.v);
    let mut order: Vec<usize> = (0..scouted.len()).collect();
    order.sort_by(|&a, &b| value(&scouted[b]).total_cmp(&value(&scouted[a])));
    order.truncate(POLISHED);
    order.sort_unstable();
    let mut best: Option<Ascent> = None;
    for i in order {
        let first = scouted[i].take().expect("each start polished once");
        let done = first.residual < cfg.tol && first.iterations < scout.max_iter;
        let found = if done {
            first
        } else {
            let rest = SearchConfig {
                max_iter: cfg.max_iter - scout.max_iter,
                ..cfg.clone()
            };
            let more = ascend(obj, first.point, &rest);
            Ascent {
                iterations: more.iterations + first.iterations,
                ..more
            }
        };
        if best.as_ref().map_or(true, |b| found.v > b.v) {
            best = Some(found);
        }
    }
    newton_polish(obj, best.expect("at least one start"))
}

/// Newton steps from a finite-difference Hessian, each followed by a line
/// search. Coordinate ascent crawls along flat valleys; this finishes the job.
fn newton_polish(obj: &mut Objective, mut a: Ascent) -> Ascent {
    let dims = obj.dims();
    let class = a.point.class;
    let h = NEWTON_STEP;
    let mut trial = vec![0.0; dims];
    for _ in 0..NEWTON_ROUNDS {
        let x = a.point.x.clone();
        let mut at = |dx: &[(usize, f64)]| {
            let mut y = x.clone();
            for &(i, d) in dx {
                y[i] += d;
            }
            obj.eval(class, &y)
        };
        let f0 = a.v;
        let mut grad = DVector::zeros(dims);
        let mut hess = DMatrix::zeros(dims, dims);
        for i in 0..dims {
            let (fp, fm) = (at(&[(i, h)]), at(&[(i, -h)]));
            grad[i] = (fp - fm) / (2.0 * h);
            hess[(i, i)] = (fp - 2.0 * f0 + fm) / (h * h);
            for j in 0..i {
                let v = (at(&[(i, h), (j, h)]) - at(&[(i, h), (j, -h)]) - at(&[(i, -h), (j, h)]) + at(&[(i, -h), (j, -h)]))
                    / (4.0 * h * h);
                hess[(i, j)] = v;
                hess[(j, i)] = v;
            }
        }
        let Some(chol) = (-hess).cholesky() else { break };
        let step = chol.solve(&grad);
        let dir: Vec<f64> = step.iter().copied().collect();
        let (fa, t) = line_search(obj, class, &x, &dir, f0, 2.0, &mut trial);
        if fa - f0 <= NEWTON_MIN_GAIN {
            break;
        }
        for (xi, di) in a.point.x.iter_mut().zip(&dir) {
            *xi += t * di;
        }
        a.v = fa;
    }
    a
}

/// Exhaustive scan on a uniform grid of `grid_resolution` points per phase
/// (and per `t` for `n = 4`). Refining by an integer factor never lowers the
/// result.
pub fn brute_force_strength(measure: &Measure, rho: &DensityMatrix, grid_resolution: usize) -> Result<f64> {
    let n = rho.n();
    if n > 4 {
        return Err(Error::TooLarge { n });
    }
    if grid_resolution < 36 {
        return Err(Error::BadParameter(format!(
            "grid resolution must be at least 36, got {grid_resolution}"
        )));
    }
    let mut obj = Objective::new(measure, rho)?;
    let dims = obj.dims();
    let step = 2.0 * PI / grid_resolution as f64;
    let total = grid_resolution.pow(dims as u32);
    let mut best = f64::NEG_INFINITY;
    let mut x = vec![0.0; dims];
    for class in 0..obj.classes() {
        for idx in 0..total {
            let mut r = idx;
            for xi in x.iter_mut() {
                *xi = (r % grid_resolution) as f64 * step;
                r /= grid_resolution;
            }
            best = best.max(obj.eval(class, &x));
        }
    }
    Ok(best)
}

/// `P` at one fixed Fourier matrix.
pub fn strength_lower_bound(measure: &Measure, rho: &DensityMatrix, f: &FourierMatrix) -> Result<f64> {
    measure.knowledge(&f.transform(rho)?)
}

#[derive(Debug, Clone, PartialEq)]
struct Point {
    class: usize,
    x: Vec<f64>,
}

enum Family {
    /// Precomputed `K[m * pairs + p] = C_mj conj(C_mk)`.
    Fixed(Vec<Complex64>),
    N4(&'static [Vec<usize>]),
}

struct Objective {
    n: usize,
    pairs: Vec<(usize, usize)>,
    rho: Vec<Complex64>,
    measure: PreparedMeasure,
    family: Family,
    phases: Vec<Complex64>,
    sigma: Vec<Complex64>,
    kernel: Vec<Complex64>,
    kernel_key: Option<(usize, u64)>,
    probs: Vec<f64>,
    /// Replaces the measure by `sum_m w_m p_m` when set.
    weights: Option<Vec<f64>>,
}

impl Objective {
    fn new(measure: &Measure, rho: &DensityMatrix) -> Result<Self> {
        let n = rho.n();
        let prepared = measure.prepare(n)?;
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|j| (j + 1..n).map(move |k| (j, k))).collect();
        let rho_pairs = pairs.iter().map(|&(j, k)| rho.entry(j, k)).collect();
        let family = if n == 4 {
            Family::N4(n4_column_classes())
        } else {
            let c = dft_central(n);
            let mut kernel = Vec::with_capacity(n * pairs.len());
            for m in 0..n {
                for &(j, k) in &pairs {
                    kernel.push(c[(m, j)] * c[(m, k)].conj());
                }
            }
            Family::Fixed(kernel)
        };
        Ok(Self {
            n,
            measure: prepared,
            family,
            phases: vec![Complex64::new(1.0, 0.0); n],
            sigma: vec![Complex64::new(0.0, 0.0); pairs.len()],
            kernel: vec![Complex64::new(0.0, 0.0); n * pairs.len()],
            kernel_key: None,
            probs: vec![0.0; n],
            weights: None,
            rho: rho_pairs,
            pairs,
        })
    }

    /// Free phases plus `t` for the n = 4 family.
    fn dims(&self) -> usize {
        match self.family {
            Family::Fixed(_) => self.n - 1,
            Family::N4(_) => 4,
        }
    }

    fn classes(&self) -> usize {
        match &self.family {
            Family::Fixed(_) => 1,
            Family::N4(classes) => classes.len(),
        }
    }

    fn eval(&mut self, class: usize, x: &[f64]) -> f64 {
        for k in 0..self.n - 1 {
            self.phases[k] = Complex64::from_polar(1.0, x[k]);
        }
        self.eval_phasors(class, x.get(3).copied().unwrap_or(0.0))
    }

    /// Evaluates with `self.phases[..n-1]` already set; `t` is ignored
    /// outside the n = 4 family.
    fn eval_phasors(&mut self, class: usize, t: f64) -> f64 {
        let n = self.n;
        self.phases[n - 1] = Complex64::new(1.0, 0.0);
        for (p, &(j, k)) in self.pairs.iter().enumerate() {
            self.sigma[p] = self.rho[p] * self.phases[j] * self.phases[k].conj();
        }
        let np = self.pairs.len();
        let kernel: &[Complex64] = match &self.family {
            Family::Fixed(k) => k,
            Family::N4(classes) => {
                let key = (class, t.to_bits());
                if self.kernel_key != Some(key) {
                    let c = n4_entries(t, &classes[class]);
                    for m in 0..4 {
                        for (p, &(j, k)) in self.pairs.iter().enumerate() {
                            self.kernel[m * np + p] = c[m][j] * c[m][k].conj();
                        }
                    }
                    self.kernel_key = Some(key);
                }
                &self.kernel
            }
        };
        let base = 1.0 / n as f64;
        for m in 0..n {
            let row = &kernel[m * np..(m + 1) * np];
            let s: f64 = row
                .iter()
                .zip(&self.sigma)
                .map(|(k, s)| k.re * s.re - k.im * s.im)
                .sum();
            self.probs[m] = (base + 2.0 * s).max(0.0);
        }
        match &self.weights {
            Some(w) => w.iter().zip(&self.probs).map(|(w, p)| w * p).sum(),
            None => self.measure.eval(&mut self.probs),
        }
    }

    fn descriptor(&self, point: &Point) -> FourierFamily {
        let mut phases: Vec<f64> = point.x[..self.n - 1].iter().map(|&a| wrap_phase(a)).collect();
        phases.push(0.0);
        match &self.family {
            Family::Fixed(_) => FourierFamily::standard(phases),
            Family::N4(classes) => FourierFamily::central_n4(wrap_phase(point.x[3]), classes[point.class].clone(), phases),
        }
    }
}

fn n4_entries(t: f64, perm: &[usize]) -> [[Complex64; 4]; 4] {
    let e = Complex64::from_polar(0.5, t);
    let h = Complex64::new(0.5, 0.0);
    let rows = [[e, -h, -e, h], [-h, h, -h, h], [-e, -h, e, h], [h, h, h, h]];
    let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
    for m in 0..4 {
        for k in 0..4 {
            out[m][k] = rows[m][perm[k]];
        }
    }
    out
}

/// Best `starts` points of the coarse stage, preferring discrete local maxima.
fn coarse_starts(obj: &mut Objective, cfg: &SearchConfig) -> Vec<Point> {
    let dims = obj.dims();
    let starts = cfg.starts_for(obj.n);
    let mut res: Vec<usize> = vec![cfg.grid; obj.n - 1];
    if dims == 4 {
        res.push(T_GRID);
    }
    let steps: Vec<f64> = res.iter().map(|&r| 2.0 * PI / r as f64).collect();
    let per_class = res.iter().try_fold(1usize, |acc, &r| acc.checked_mul(r));
    let classes = obj.classes();

    let total = per_class.and_then(|p| p.checked_mul(classes)).filter(|&t| t <= GRID_BUDGET);
    let Some(total) = total else {
        let mut rng = rng_from_seed(cfg.seed);
        let mut samples: Vec<(f64, Point)> = (0..RANDOM_SAMPLES)
            .map(|_| {
                let class = rng.random_range(0..classes);
                let x: Vec<f64> = (0..dims).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
                (obj.eval(class, &x), Point { class, x })
            })
            .collect();
        samples.sort_by(|a, b| b.0.total_cmp(&a.0));
        return samples.into_iter().take(starts).map(|s| s.1).collect();
    };
    let per_class = per_class.unwrap();

    let decode = |idx: usize, out: &mut [usize]| {
        let mut r = idx;
        for (o, &g) in out.iter_mut().zip(&res) {
            *o = r % g;
            r /= g;
        }
    };
    let mut values = Vec::with_capacity(total);
    let mut digits = vec![0usize; dims];
    let table: Vec<Complex64> = (0..cfg.grid).map(|d| Complex64::from_polar(1.0, d as f64 * steps[0])).collect();
    let phase_dims = obj.n - 1;
    for class in 0..classes {
        for idx in 0..per_class {
            decode(idx, &mut digits);
            for k in 0..phase_dims {
                obj.phases[k] = table[digits[k]];
            }
            let t = if dims > phase_dims { digits[phase_dims] as f64 * steps[phase_dims] } else { 0.0 };
            values.push(obj.eval_phasors(class, t));
        }
    }

    // strides of the flattened index for neighbour lookups
    let mut strides = vec![1usize; dims];
    for i in 1..dims {
        strides[i] = strides[i - 1] * res[i - 1];
    }
    let mut maxima: Vec<usize> = Vec::new();
    for class in 0..classes {
        let offset = class * per_class;
        for idx in 0..per_class {
            decode(idx, &mut digits);
            let v = values[offset + idx];
            let is_max = (0..dims).all(|i| {
                let g = res[i];
                let up = if digits[i] + 1 == g { idx + strides[i] - g * strides[i] } else { idx + strides[i] };
                let down = if digits[i] == 0 { idx + (g - 1) * strides[i] } else { idx - strides[i] };
                v >= values[offset + up] && v >= values[offset + down]
            });
            if is_max {
                maxima.push(offset + idx);
            }
        }
    }
    // stable sort keeps the lower index first among equal values
    maxima.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    maxima.truncate(starts);
    maxima
        .into_iter()
        .map(|flat| {
            let class = flat / per_class;
            decode(flat % per_class, &mut digits);
            let x = digits.iter().zip(&steps).map(|(&d, &s)| d as f64 * s).collect();
            Point { class, x }
        })
        .collect()
}

/// Coordinate ascent with extra diagonal directions `e_i +- e_j`, which can
/// follow the ridges where two sorted probabilities cross.
fn ascend(obj: &mut Objective, start: Point, cfg: &SearchConfig) -> Ascent {
    let dims = obj.dims();
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for i in 0..dims {
        let mut d = vec![0.0; dims];
        d[i] = 1.0;
        dirs.push(d);
    }
    for i in 0..dims {
        for j in i + 1..dims {
            for sign in [1.0, -1.0] {
                let mut d = vec![0.0; dims];
                d[i] = 1.0;
                d[j] = sign;
                dirs.push(d);
            }
        }
    }
    let class = start.class;
    let mut x = start.x;
    let mut f = obj.eval(class, &x);
    let mut brackets = vec![PI; dirs.len()];
    let mut trial = vec![0.0; dims];
    let mut iterations = 0;
    let mut residual = 0.0;
    while iterations < cfg.max_iter {
        iterations += 1;
        let before = f;
        let start_of_cycle = x.clone();
        for (d, dir) in dirs.iter().enumerate() {
            let (fa, a) = line_search(obj, class, &x, dir, f, brackets[d], &mut trial);
            if fa > f {
                f = fa;
                for (xi, di) in x.iter_mut().zip(dir) {
                    *xi += a * di;
                }
            }
            brackets[d] = (4.0 * a.abs()).clamp(MIN_BRACKET, PI);
        }
        // extrapolate along the net move of the cycle to cut zigzagging
        let disp: Vec<f64> = x.iter().zip(&start_of_cycle).map(|(a, b)| a - b).collect();
        if disp.iter().any(|&d| d != 0.0) {
            let (fa, a) = line_search(obj, class, &x, &disp, f, 2.0, &mut trial);
            if fa > f {
                f = fa;
                for (xi, di) in x.iter_mut().zip(&disp) {
                    *xi += a * di;
                }
            }
        }
        residual = f - before;
        if residual < cfg.tol {
            break;
        }
    }
    Ascent {
        v: f,
        point: Point { class, x },
        iterations,
        residual,
    }
}

/// Scans `[-bracket, bracket]` along `dir` and refines the best cell by
/// golden section. Returns the best value and step, never worse than `f0`.
fn line_search(
    obj: &mut Objective,
    class: usize,
    x: &[f64],
    dir: &[f64],
    f0: f64,
    bracket: f64,
    trial: &mut [f64],
) -> (f64, f64) {
    let mut at = |a: f64, trial: &mut [f64]| -> f64 {
        for ((t, xi), di) in trial.iter_mut().zip(x).zip(dir) {
            *t = xi + a * di;
        }
        obj.eval(class, trial)
    };
    let h = 2.0 * bracket / SCAN_POINTS as f64;
    let mut best = (f0, 0.0);
    for i in 0..=SCAN_POINTS {
        let a = -bracket + i as f64 * h;
        if i == SCAN_POINTS / 2 {
            continue;
        }
        let fa = at(a, trial);
        if fa > best.0 {
            best = (fa, a);
        }
    }
    let invphi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (best.1 - h, best.1 + h);
    let mut c = hi - invphi * (hi - lo);
    let mut d = lo + invphi * (hi - lo);
    let mut fc = at(c, trial);
    let mut fd = at(d, trial);
    while hi - lo > GOLDEN_WIDTH {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - invphi * (hi - lo);
            fc = at(c, trial);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + invphi * (hi - lo);
            fd = at(d, trial);
        }
    }
    for (fa, a) in [(fc, c), (fd, d)] {
        if fa > best.0 {
            best = (fa, a);
        }
    }
    best
}

/// Largest violation found for each interference-strength axiom.
#[derive(Debug, Clone, Serialize)]
pub struct StrengthAxiomReport {
    pub measure: String,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    /// `V` of a certain path.
    pub certain_path: f64,
    /// `V > 1 - 1e-6` with a diagonal further than 1e-4 from uniform.
    pub full_strength: f64,
    /// `1 - V` for pure states with uniform diagonal.
    pub uniform_pure: f64,
    pub permutation: f64,
    /// Against the brute-force value of the mixture.
    pub convexity: f64,
    /// Increase of `V` after scaling the coherences down.
    pub degradation: f64,
    /// Change of `V` under path phases.
    pub phase: f64,
    pub range: f64,
}

impl StrengthAxiomReport {
    pub fn max_violation(&self) -> f64 {
        [
            self.certain_path,
            self.full_strength,
            self.uniform_pure,
            self.permutation,
            self.convexity,
            self.degradation,
            self.phase,
            self.range,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.max_violation() <= tol
    }
}

/// Grid used for the mixture in the convexity check.
pub const CONVEXITY_GRID: usize = 72;

/// Randomized check of the `V` axioms on `n = 2` or `3`. Consecutive
/// samples are paired for the convexity check, so each trial costs four
/// optimizer runs and one brute-force scan.
pub fn check_strength_axioms(
    measure: &Measure,
    n: usize,
    trials: usize,
    seed: u64,
    cfg: &SearchConfig,
) -> Result<StrengthAxiomReport> {
    if !(2..=3).contains(&n) {
        return Err(Error::BadN { n, min: 2, max: 3 });
    }
    let mut rng = rng_from_seed(seed);
    let v_of = |rho: &DensityMatrix| -> Result<f64> { Ok(strength(measure, rho, cfg)?.v) };
    let mut report = StrengthAxiomReport {
        measure: measure.to_string(),
        n,
        trials,
        seed,
        certain_path: 0.0,
        full_strength: 0.0,
        uniform_pure: 0.0,
        permutation: 0.0,
        convexity: 0.0,
        degradation: 0.0,
        phase: 0.0,
        range: 0.0,
    };
    for path in 0..n {
        report.certain_path = report.certain_path.max(v_of(&DensityMatrix::path_certain(n, path)?)?.abs());
    }
    let mut rho = sample_state(n, &mut rng);
    let mut v = v_of(&rho)?;
    for trial in 0..trials {
        let next = sample_state(n, &mut rng);
        let v_next = v_of(&next)?;

        let diag = rho.diagonal_probs();
        let off_uniform = diag.iter().map(|p| (p - 1.0 / n as f64).abs()).fold(0.0, f64::max);
        if v > 1.0 - 1e-6 && off_uniform >= 1e-4 {
            report.full_strength = report.full_strength.max(v - (1.0 - 1e-6));
        }
        report.range = report.range.max(-v).max(v - 1.0);

        // cycle through the remaining checks to keep the trial cost flat
        match trial % 4 {
            0 => {
                let perm = random_permutation(n, &mut rng);
                let vp = v_of(&rho.permute_paths(&perm)?)?;
                report.permutation = report.permutation.max((vp - v).abs());
            }
            1 => {
                let s: f64 = rng.random_range(0.0..1.0);
                let vs = v_of(&rho.scale_coherences(s)?)?;
                report.degradation = report.degradation.max(vs - v);
            }
            2 => {
                let phases: Vec<f64> = (0..n).map(|_| rng.random_range(-PI..PI)).collect();
                let vf = v_of(&rho.apply_path_phases(&phases)?)?;
                report.phase = report.phase.max((vf - v).abs());
            }
            _ => {
                let phases: Vec<f64> = (0..n).map(|_| rng.random_range(-PI..PI)).collect();
                let uniform = DensityMatrix::pure_state(&vec![1.0 / n as f64; n], &phases)?;
                report.uniform_pure = report.uniform_pure.max(1.0 - v_of(&uniform)?);
            }
        }

        let w: f64 = rng.random();
        let mixed = rho.mix(&next, w)?;
        let bound = (1.0 - w) * v + w * v_next;
        let vm = brute_force_strength(measure, &mixed, CONVEXITY_GRID)?;
        report.convexity = report.convexity.max(vm - bound);

        rho = next;
        v = v_next;
    }
    Ok(report)
}

/// Mixed and pure states, with some diagonal-heavy and near-uniform draws.
fn sample_state(n: usize, rng: &mut SeededRng) -> DensityMatrix {
    match rng.random_range(0..4) {
        0 => crate::random::haar_pure_state(n, rng),
        1 => {
            let rho = random_density(n, rng);
            let s: f64 = rng.random();
            rho.scale_coherences(s).expect("scaling keeps a valid state")
        }
        _ => random_density(n, rng),
    }
}
