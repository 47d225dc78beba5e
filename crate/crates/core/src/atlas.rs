//! Border curves in the `(P, V)` plane and checks of the known and
//! conjectured borders for two, three, four and many paths.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;
use std::io::Write;

use crate::error::{Error, Result};
use crate::fourier::{FourierFamily, FourierMatrix};
use crate::knowledge::{Measure, PreparedMeasure};
use crate::qutrit::{family_state, v_analytic, Family, FamilyTag, QutritPureSpec};
use crate::random::{haar_pure_state, random_density, rng_from_seed};
use crate::state::DensityMatrix;
use crate::strength::{strength, SearchConfig};

/// Header of the curve CSV.
pub const CURVE_CSV_HEADER: [&str; 6] = ["measure", "n", "kind", "p", "v", "param"];

/// Prints `x` with 12 significant digits.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-5..12).contains(&mag) {
        let decimals = (11 - mag).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.11e}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PVPoint {
    pub p: f64,
    pub v: f64,
    /// Sweep parameter; its meaning depends on the curve.
    pub param: f64,
    /// Path probabilities of the state that produced the point.
    pub probs: Vec<f64>,
    /// The Fourier matrix at which `v` is attained, when known.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fourier: Option<FourierFamily>,
}

impl PVPoint {
    fn new(p: f64, v: f64, param: f64, probs: Vec<f64>) -> Self {
        Self { p, v, param, probs, fourier: None }
    }

    /// How far the point is from `P = 1 => V = 0` and `V = 1 => P = 0`,
    /// judged at 1e-9.
    pub fn exclusion_violation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        if self.p >= 1.0 - 1e-9 {
            worst = worst.max(self.v);
        }
        if self.v >= 1.0 - 1e-9 {
            worst = worst.max(self.p);
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveKind {
    Analytic,
    Conjectured,
    NumericScan,
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CurveKind::Analytic => "analytic",
            CurveKind::Conjectured => "conjectured",
            CurveKind::NumericScan => "numeric-scan",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BorderCurve {
    pub measure: String,
    pub n: usize,
    pub kind: CurveKind,
    /// Sorted by `p`.
    pub points: Vec<PVPoint>,
}

impl BorderCurve {
    pub fn new(measure: &Measure, n: usize, kind: CurveKind, mut points: Vec<PVPoint>) -> Self {
        points.sort_by(|a, b| a.p.total_cmp(&b.p));
        Self {
            measure: measure.to_string(),
            n,
            kind,
            points,
        }
    }

    pub fn write_csv<W: Write>(&self, out: W, header: bool) -> Result<()> {
        write_curves_csv(std::slice::from_ref(self), out, header)
    }

    pub fn max_exclusion_violation(&self) -> f64 {
        self.points.iter().map(PVPoint::exclusion_violation).fold(0.0, f64::max)
    }
}

pub fn write_curves_csv<W: Write>(curves: &[BorderCurve], out: W, header: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::BadParameter(format!("csv output failed: {e}"));
    if header {
        w.write_record(CURVE_CSV_HEADER).map_err(io)?;
    }
    for c in curves {
        let n = c.n.to_string();
        let kind = c.kind.to_string();
        for pt in &c.points {
            w.write_record([
                c.measure.as_str(),
                &n,
                &kind,
                &format_sig(pt.p),
                &format_sig(pt.v),
                &format_sig(pt.param),
            ])
            .map_err(io)?;
        }
    }
    w.flush().map_err(|e| Error::BadParameter(format!("csv output failed: {e}")))?;
    Ok(())
}

fn sweep(samples: usize) -> impl Iterator<Item = f64> {
    let last = (samples.max(2) - 1) as f64;
    (0..samples.max(2)).map(move |i| i as f64 / last)
}

/// The amplitudes `(cos a, sin a)` for `a` in `[0, pi/4]`. Every measure of
/// two paths is a function of the predictability, so `V` is the same function
/// of the visibility `sin 2a`.
pub fn qubit_border(measure: &Measure, samples: usize) -> Result<BorderCurve> {
    let prepared = measure.prepare(2)?;
    let eval = |x: f64| -> f64 { prepared.eval(&mut [(1.0 + x) / 2.0, (1.0 - x) / 2.0]) };
    let points = sweep(samples)
        .map(|s| {
            let a = s * PI / 4.0;
            let (c, d) = (a.cos(), a.sin());
            let probs = vec![c * c, d * d];
            let (pred, vis) = if s == 1.0 { (0.0, 1.0) } else { ((c * c - d * d).abs(), (2.0 * a).sin()) };
            PVPoint::new(eval(pred), eval(vis), a, probs)
        })
        .collect();
    Ok(BorderCurve::new(measure, 2, CurveKind::Analytic, points))
}

/// The decomposition of a mixed qubit state into two pure states with the
/// same `(P, V)`, which bounds the mixed point by a rectangle.
#[derive(Debug, Clone, Serialize)]
pub struct QubitRectangle {
    pub p: f64,
    pub v: f64,
    pub p_corner: f64,
    pub v_corner: f64,
    pub weight: f64,
}

impl QubitRectangle {
    pub fn inside(&self, slack: f64) -> bool {
        self.p <= self.p_corner + slack && self.v <= self.v_corner + slack
    }
}

pub fn qubit_rectangle(measure: &Measure, rho: &DensityMatrix) -> Result<QubitRectangle> {
    if rho.n() != 2 {
        return Err(Error::WrongDimension { expected: 2, got: rho.n() });
    }
    let prepared = measure.prepare(2)?;
    let eval = |x: f64| -> f64 { prepared.eval(&mut [(1.0 + x) / 2.0, (1.0 - x) / 2.0]) };
    let [a, b] = [rho.entry(0, 0).re, rho.entry(1, 1).re];
    let off = rho.entry(0, 1).norm();
    let root = (a * b).sqrt();
    let eps = if root > 0.0 { (off / root).min(1.0) } else { 0.0 };
    Ok(QubitRectangle {
        p: eval((a - b).abs()),
        v: eval(2.0 * off),
        p_corner: eval((a - b).abs()),
        v_corner: eval(2.0 * root),
        weight: 0.5 * (1.0 + eps),
    })
}

/// Outer and inner borders of the pure-qutrit region.
#[derive(Debug, Clone, Serialize)]
pub struct QutritRegion {
    pub outer: BorderCurve,
    pub inner: BorderCurve,
    /// Where the two inner families meet, at `p = (1/2, 1/2, 0)`.
    pub cusp: (f64, f64),
    #[serde(skip)]
    measure: Measure,
}

fn require_canonical(measure: &Measure) -> Result<()> {
    if Measure::CANONICAL.contains(measure) {
        Ok(())
    } else {
        Err(Error::BadMeasure(format!(
            "{measure}: qutrit borders are known for one-guess, linear, purity and entropy"
        )))
    }
}

fn family_point(measure: &Measure, tag: FamilyTag) -> Result<PVPoint> {
    let spec = family_state(tag)?;
    let p = measure.of_probs(&spec.probs())?;
    let v = v_analytic(measure, &spec).expect("canonical measure");
    Ok(PVPoint::new(p, v, tag.param, spec.probs().to_vec()))
}

fn family_curve(measure: &Measure, family: Family, resolution: usize) -> Result<Vec<PVPoint>> {
    let (lo, hi) = family.range();
    sweep(resolution)
        .map(|s| family_point(measure, FamilyTag::new(family, lo + s * (hi - lo))))
        .collect()
}

fn outer_family(measure: &Measure) -> Family {
    if *measure == Measure::Linear {
        Family::Ib
    } else {
        Family::Ia
    }
}

pub fn qutrit_region(measure: &Measure, resolution: usize) -> Result<QutritRegion> {
    require_canonical(measure)?;
    let outer = family_curve(measure, outer_family(measure), resolution)?;
    let mut inner = family_curve(measure, Family::II, resolution)?;
    inner.extend(family_curve(measure, Family::III, resolution)?);
    let cusp = family_point(measure, FamilyTag::new(Family::III, 0.5))?;
    Ok(QutritRegion {
        outer: BorderCurve::new(measure, 3, CurveKind::Analytic, outer),
        inner: BorderCurve::new(measure, 3, CurveKind::Analytic, inner),
        cusp: (cusp.p, cusp.v),
        measure: measure.clone(),
    })
}

impl QutritRegion {
    /// `V` on the family through `(p, ?)`, by bisection on the family
    /// parameter (`P` increases along every family).
    fn v_on(&self, family: Family, p: f64) -> Result<f64> {
        let (mut lo, mut hi) = family.range();
        let at = |x: f64| family_point(&self.measure, FamilyTag::new(family, x));
        if p <= at(lo)?.p {
            return Ok(at(lo)?.v);
        }
        if p >= at(hi)?.p {
            return Ok(at(hi)?.v);
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if at(mid)?.p < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(at(0.5 * (lo + hi))?.v)
    }

    pub fn outer_v_at(&self, p: f64) -> Result<f64> {
        self.v_on(outer_family(&self.measure), p)
    }

    pub fn inner_v_at(&self, p: f64) -> Result<f64> {
        if p <= self.cusp.0 {
            self.v_on(Family::II, p)
        } else {
            self.v_on(Family::III, p)
        }
    }

    /// Positive when `(p, v)` lies above the outer border.
    pub fn outer_excess(&self, p: f64, v: f64) -> Result<f64> {
        Ok(v - self.outer_v_at(p)?)
    }

    /// Positive when `(p, v)` lies below the inner border.
    pub fn inner_deficit(&self, p: f64, v: f64) -> Result<f64> {
        Ok(self.inner_v_at(p)? - v)
    }
}

/// `2 (P + V - 1/2)^2 + (P - V)^2 - 3/2`
pub fn qutrit_ellipse_residual(p: f64, v: f64) -> f64 {
    2.0 * (p + v - 0.5).powi(2) + (p - v).powi(2) - 1.5
}

/// Entropic outer border from a point `(u, w)` of the qutrit ellipse.
pub fn entropic_border_point(u: f64, w: f64) -> (f64, f64) {
    let f = |x: f64| -> f64 {
        let a = if x > -0.5 { (1.0 + 2.0 * x) * (1.0 + 2.0 * x).ln() } else { 0.0 };
        let b = if x < 1.0 { 2.0 * (1.0 - x) * (1.0 - x).ln() } else { 0.0 };
        (a + b) / (3.0 * 3f64.ln())
    };
    (f(u), f(w))
}

/// The pure state `(1, -1, 0) / sqrt 2`, left unchanged by both 3x3 central
/// Fourier matrices.
pub fn balanced_pair_state() -> DensityMatrix {
    let c = |x: f64| Complex64::new(x, 0.0);
    DensityMatrix::from_rows(&[
        vec![c(0.5), c(-0.5), c(0.0)],
        vec![c(-0.5), c(0.5), c(0.0)],
        vec![c(0.0), c(0.0), c(0.0)],
    ])
    .expect("valid state")
}

/// Probabilities `(G^-4, G^-2, G^2, G^4) / 10` with `G = (sqrt 5 - 1) / 2`.
pub fn golden_probabilities() -> [f64; 4] {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    [g.powi(-4) / 10.0, g.powi(-2) / 10.0, g.powi(2) / 10.0, g.powi(4) / 10.0]
}

/// Four-path pure state with amplitudes `(sqrt p4, sqrt p3, sqrt p2, sqrt p1)`.
pub fn reversed_amplitude_state(p: [f64; 4]) -> DensityMatrix {
    let amps: Vec<Complex64> = p.iter().rev().map(|x| Complex64::new(x.sqrt(), 0.0)).collect();
    DensityMatrix::from_amplitudes(&amps).expect("valid amplitudes")
}

pub fn golden_ququart_state() -> DensityMatrix {
    reversed_amplitude_state(golden_probabilities())
}

fn max_abs_diff(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    (a.matrix() - b.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleReport {
    pub probabilities: [f64; 4],
    /// `sum p - 1`.
    pub normalization_residual: f64,
    /// Largest entry of `F rho F^dagger - rho` for `F(0)`.
    pub fixed_point_residual: f64,
    pub p_lin: f64,
    /// `p_lin - sqrt(5/9)`.
    pub p_lin_residual: f64,
    pub v_numeric: f64,
    pub argmax: FourierFamily,
    pub p2_plus_v2: f64,
    /// `P^2 + V^2 > 1`, so the quarter circle is not the four-path border.
    pub conjecture_falsified: bool,
}

pub fn ququart_counterexample(cfg: &SearchConfig) -> Result<CounterexampleReport> {
    let p = golden_probabilities();
    let rho = golden_ququart_state();
    let f = FourierMatrix::central_n4(0.0);
    let fixed_point_residual = max_abs_diff(&f.transform(&rho)?, &rho);
    let p_lin = Measure::Linear.knowledge(&rho)?;
    let r = strength(&Measure::Linear, &rho, cfg)?;
    let sum = p_lin * p_lin + r.v * r.v;
    Ok(CounterexampleReport {
        probabilities: p,
        normalization_residual: p.iter().sum::<f64>() - 1.0,
        fixed_point_residual,
        p_lin,
        p_lin_residual: p_lin - (5.0f64 / 9.0).sqrt(),
        v_numeric: r.v,
        argmax: r.argmax,
        p2_plus_v2: sum,
        conjecture_falsified: sum > 1.0,
    })
}

/// Parameters of the conjectured four-path curve: `sinh a = e^x / 2` and
/// `sinh b = e^-x / 2`, so that `4 sinh a sinh b = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuartCurveParam {
    pub a: f64,
    pub b: f64,
}

impl QuartCurveParam {
    pub fn from_log(x: f64) -> Self {
        Self {
            a: (0.5 * x.exp()).asinh(),
            b: (0.5 * (-x).exp()).asinh(),
        }
    }

    /// `(p1, p2, p3, p4)` with `p1/p2 = p3/p4 = e^2a` and
    /// `p3/p1 = p4/p2 = tanh^2(b/2)`.
    pub fn probabilities(&self) -> [f64; 4] {
        let r = (2.0 * self.a).exp();
        let s = (0.5 * self.b).tanh().powi(2);
        let p2 = 1.0 / ((1.0 + r) * (1.0 + s));
        let p1 = r * p2;
        [p1, p2, s * p1, s * p2]
    }

    pub fn p(&self) -> f64 {
        self.a.tanh() / 3.0 + 2.0 / 3.0 / self.b.cosh()
    }

    pub fn v(&self) -> f64 {
        self.b.tanh() / 3.0 + 2.0 / 3.0 / self.a.cosh()
    }

    pub fn state(&self) -> DensityMatrix {
        reversed_amplitude_state(self.probabilities())
    }
}

/// The Fourier setting that maps the curve states onto their partners:
/// `F(0)` with the last two columns swapped and phases `(pi, pi, 0, 0)`.
pub fn quart_curve_fourier() -> FourierFamily {
    FourierFamily::central_n4(0.0, vec![0, 1, 3, 2], vec![PI, PI, 0.0, 0.0])
}

/// Output index of `p~_1 .. p~_4` under [`quart_curve_fourier`].
const QUART_OUTPUT_LABELS: [usize; 4] = [2, 3, 1, 0];

#[derive(Debug, Clone, Serialize)]
pub struct QuartConjecture {
    pub curve: BorderCurve,
    /// Largest residual of the four reciprocal ratio relations, written as
    /// `sqrt(p~1) = e^b sqrt(p~2)` and so on.
    pub reciprocity_residual: f64,
    /// Largest `|P_lin(state) - P|` and `|P_lin(F state F^dagger) - V|`.
    pub value_residual: f64,
    /// Smallest `P^2 + V^2 - 1` away from the ends of the sweep.
    pub min_interior_margin: f64,
}

/// Sweep range of `x` in [`QuartCurveParam::from_log`].
pub const QUART_SWEEP: f64 = 12.0;

pub fn ququart_conjectured_border(samples: usize) -> Result<QuartConjecture> {
    if samples < 2 {
        return Err(Error::BadParameter(format!("samples must be at least 2, got {samples}")));
    }
    let f = quart_curve_fourier().matrix()?;
    let mut points = Vec::with_capacity(samples);
    let mut reciprocity: f64 = 0.0;
    let mut value: f64 = 0.0;
    let mut margin = f64::INFINITY;
    for (i, s) in sweep(samples).enumerate() {
        let q = QuartCurveParam::from_log(-QUART_SWEEP + 2.0 * QUART_SWEEP * s);
        let rho = q.state();
        let out = f.detector_probs(&rho)?;
        let t: Vec<f64> = QUART_OUTPUT_LABELS.iter().map(|&k| out[k]).collect();
        // cross-multiplied so the ends of the sweep, where some outputs
        // vanish, stay finite
        let (eb, th) = (q.b.exp(), (0.5 * q.a).tanh());
        let r: Vec<f64> = t.iter().map(|x| x.sqrt()).collect();
        for d in [
            (r[0] - eb * r[1]).abs() / eb.max(1.0),
            (r[2] - eb * r[3]).abs() / eb.max(1.0),
            (r[2] - th * r[0]).abs(),
            (r[3] - th * r[1]).abs(),
        ] {
            reciprocity = reciprocity.max(d);
        }
        let (p, v) = (q.p(), q.v());
        value = value
            .max((Measure::Linear.knowledge(&rho)? - p).abs())
            .max((Measure::Linear.of_probs(&out)? - v).abs());
        if i > 0 && i + 1 < samples.max(2) {
            margin = margin.min(p * p + v * v - 1.0);
        }
        let mut pt = PVPoint::new(p, v, q.a, q.probabilities().to_vec());
        pt.fourier = Some(quart_curve_fourier());
        points.push(pt);
    }
    Ok(QuartConjecture {
        curve: BorderCurve::new(&Measure::Linear, 4, CurveKind::Conjectured, points),
        reciprocity_residual: reciprocity,
        value_residual: value,
        min_interior_margin: margin,
    })
}

/// Numeric `V_lin` of the curve states next to the conjectured value.
#[derive(Debug, Clone, Serialize)]
pub struct QuartCurveCheck {
    pub param: f64,
    pub p: f64,
    pub v_conjectured: f64,
    pub v_numeric: f64,
}

pub fn ququart_curve_numeric(samples: usize, sweep_half_width: f64, cfg: &SearchConfig) -> Result<Vec<QuartCurveCheck>> {
    sweep(samples)
        .map(|s| {
            let q = QuartCurveParam::from_log(-sweep_half_width + 2.0 * sweep_half_width * s);
            let r = strength(&Measure::Linear, &q.state(), cfg)?;
            Ok(QuartCurveCheck {
                param: q.a,
                p: q.p(),
                v_conjectured: q.v(),
                v_numeric: r.v,
            })
        })
        .collect()
}

/// `(p1, p2)` of the many-path family with one large and `n - 1` equal
/// probabilities, and its Fourier partner `(p~1, p~2)`.
pub fn qunit_partner(n: usize, p1: f64) -> (f64, f64, f64, f64) {
    let nf = n as f64;
    let p2 = ((1.0 - p1) / (nf - 1.0)).max(0.0);
    let (a, b) = (p1.sqrt(), p2.sqrt());
    let t1 = (a + (nf - 1.0) * b).powi(2) / nf;
    let t2 = (a - b).powi(2) / nf;
    (p1, p2, t1, t2)
}

fn qunit_probs(n: usize, p1: f64, p2: f64) -> Vec<f64> {
    let mut v = vec![p2; n];
    v[0] = p1;
    v
}

#[derive(Debug, Clone, Serialize)]
pub struct SymmetricPoint {
    pub n: usize,
    pub p1: f64,
    pub p2: f64,
    /// Closed form `log_n(sqrt n / 2) + log_n(sqrt n + 1) / sqrt n`.
    pub value: f64,
    pub p_ent: f64,
    pub v_ent: f64,
}

pub fn qunit_symmetric_value(n: usize) -> f64 {
    let nf = n as f64;
    let r = nf.sqrt();
    let ln_n = nf.ln();
    (r / 2.0).ln() / ln_n + (r + 1.0).ln() / ln_n / r
}

pub fn qunit_symmetric_point(n: usize) -> Result<SymmetricPoint> {
    check_qunit_n(n)?;
    let r = (n as f64).sqrt();
    let p1 = (r + 1.0) / (2.0 * r);
    let p2 = 1.0 / (2.0 * r * (r + 1.0));
    let (_, _, t1, t2) = qunit_partner(n, p1);
    Ok(SymmetricPoint {
        n,
        p1,
        p2,
        value: qunit_symmetric_value(n),
        p_ent: Measure::Entropy.of_probs(&qunit_probs(n, p1, p2))?,
        v_ent: Measure::Entropy.of_probs(&qunit_probs(n, t1, t2))?,
    })
}

fn check_qunit_n(n: usize) -> Result<()> {
    if !(2..=64).contains(&n) {
        return Err(Error::BadN { n, min: 2, max: 64 });
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct QunitConjecture {
    pub curve: BorderCurve,
    /// Largest residual of the two reciprocity identities.
    pub reciprocity_residual: f64,
    pub symmetric: SymmetricPoint,
}

/// Reciprocity identities of the partner map, as residuals.
pub fn qunit_reciprocity(n: usize, p1: f64, p2: f64, t1: f64, t2: f64) -> (f64, f64) {
    let nf = n as f64;
    let first = nf * p1 + nf * t1 - 2.0 * (nf * p1 * t1).sqrt() - (nf - 1.0);
    let second = nf * p2 + nf * t2 + 2.0 * (nf * p2 * t2).sqrt() - 1.0;
    (first, second)
}

pub fn qunit_entropic_conjecture(n: usize, samples: usize) -> Result<QunitConjecture> {
    check_qunit_n(n)?;
    let measure = Measure::Entropy;
    let prepared = measure.prepare(n)?;
    let lo = 1.0 / n as f64;
    let mut reciprocity: f64 = 0.0;
    let points = sweep(samples)
        .map(|s| {
            let (p1, p2, t1, t2) = qunit_partner(n, lo + s * (1.0 - lo));
            let (a, b) = qunit_reciprocity(n, p1, p2, t1, t2);
            reciprocity = reciprocity.max(a.abs()).max(b.abs());
            let p = prepared.eval(&mut qunit_probs(n, p1, p2));
            let v = prepared.eval(&mut qunit_probs(n, t1, t2));
            PVPoint::new(p, v, p1, qunit_probs(n, p1, p2))
        })
        .collect();
    Ok(QunitConjecture {
        curve: BorderCurve::new(&measure, n, CurveKind::Conjectured, points),
        reciprocity_residual: reciprocity,
        symmetric: qunit_symmetric_point(n)?,
    })
}

/// The measures that depend on the largest path probability only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LargestProbabilityMeasure {
    OneGuess,
    RenyiInf,
    RenyiZero,
}

impl LargestProbabilityMeasure {
    pub fn measure(&self) -> Measure {
        match self {
            Self::OneGuess => Measure::OneGuess,
            Self::RenyiInf => Measure::RenyiInf,
            Self::RenyiZero => Measure::RenyiZero,
        }
    }

    pub fn from_measure(m: &Measure) -> Option<Self> {
        match m {
            Measure::OneGuess => Some(Self::OneGuess),
            Measure::RenyiInf => Some(Self::RenyiInf),
            Measure::RenyiZero => Some(Self::RenyiZero),
            _ => None,
        }
    }
}

/// `(n-1)^2/n (P + V - (n-2)/(n-1))^2 + (n-1)/n (P - V)^2 - 1`
pub fn one_guess_ellipse_residual(n: usize, p: f64, v: f64) -> f64 {
    let nf = n as f64;
    let m = nf - 1.0;
    m * m / nf * (p + v - (nf - 2.0) / m).powi(2) + m / nf * (p - v).powi(2) - 1.0
}

/// `n (P + V - 1)^2 + n/(n-1) (P - V)^2 - 1`
pub fn renyi_inf_ellipse_residual(n: usize, p: f64, v: f64) -> f64 {
    let nf = n as f64;
    nf * (p + v - 1.0).powi(2) + nf / (nf - 1.0) * (p - v).powi(2) - 1.0
}

/// Border traced by the one-large-probability family for a measure of `p1`.
pub fn p1_measure_borders(n: usize, which: LargestProbabilityMeasure, samples: usize) -> Result<BorderCurve> {
    if n < 2 {
        return Err(Error::BadN { n, min: 2, max: usize::MAX });
    }
    let measure = which.measure();
    let prepared: PreparedMeasure = measure.prepare(n)?;
    let lo = 1.0 / n as f64;
    let points = sweep(samples)
        .map(|s| {
            // exact ends so the corners come out exactly
            let p1 = if s == 0.0 { lo } else if s == 1.0 { 1.0 } else { lo + s * (1.0 - lo) };
            let (p1, p2, t1, t2) = qunit_partner(n, p1);
            let (t1, t2) = if s == 0.0 { (1.0, 0.0) } else { (t1, t2) };
            let p = prepared.eval(&mut qunit_probs(n, p1, p2));
            let v = prepared.eval(&mut qunit_probs(n, t1, t2));
            PVPoint::new(p, v, p1, qunit_probs(n, p1, p2))
        })
        .collect();
    Ok(BorderCurve::new(&measure, n, CurveKind::Analytic, points))
}

/// `(P, V)` of random states, pure with probability `1 - purity_mix`.
pub fn random_state_scan(
    n: usize,
    measure: &Measure,
    count: usize,
    purity_mix: f64,
    seed: u64,
    cfg: &SearchConfig,
) -> Result<Vec<PVPoint>> {
    if count == 0 {
        return Err(Error::BadParameter("count must be at least 1".into()));
    }
    if n < 2 {
        return Err(Error::TooFewPaths { n });
    }
    if !(0.0..=1.0).contains(&purity_mix) {
        return Err(Error::BadParameter(format!("purity mix {purity_mix} outside [0, 1]")));
    }
    let mut rng = rng_from_seed(seed);
    (0..count)
        .map(|i| {
            let rho = if rng.random_bool(purity_mix) {
                random_density(n, &mut rng)
            } else {
                haar_pure_state(n, &mut rng)
            };
            let p = measure.knowledge(&rho)?;
            let r = strength(measure, &rho, cfg)?;
            let mut pt = PVPoint::new(p, r.v, i as f64, rho.diagonal_probs());
            pt.fourier = Some(r.argmax);
            Ok(pt)
        })
        .collect()
}

/// Sorted path probabilities of a pure qutrit state as a spec.
pub fn qutrit_spec_of(rho: &DensityMatrix) -> Result<QutritPureSpec> {
    let d = rho.diagonal_probs();
    if d.len() != 3 {
        return Err(Error::WrongDimension { expected: 3, got: d.len() });
    }
    QutritPureSpec::from_unsorted([d[0], d[1], d[2]])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_formatting() {
        assert_eq!(format_sig(0.25), "0.250000000000");
        assert_eq!(format_sig(1.0), "1.00000000000");
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig((5.0f64 / 9.0).sqrt()), "0.745355992500");
        assert_eq!(format_sig(1e-9), "1.00000000000e-9");
        assert_eq!(format_sig(-0.5), "-0.500000000000");
    }

    #[test]
    fn qubit_border_examples() {
        let c = qubit_border(&Measure::Purity, 3).unwrap();
        let first = &c.points[0];
        let last = c.points.last().unwrap();
        assert_eq!((first.p, first.v), (0.0, 1.0));
        assert!((last.p - 1.0).abs() < 1e-15 && last.v.abs() < 1e-15);
        let mid = &c.points[1];
        assert!((mid.p - (PI / 4.0).cos()).abs() < 1e-12);
        assert!((mid.v - (PI / 4.0).sin()).abs() < 1e-12);
        for m in [Measure::OneGuess, Measure::Linear, Measure::Purity] {
            for pt in qubit_border(&m, 101).unwrap().points {
                assert!((pt.p * pt.p + pt.v * pt.v - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn qubit_entropic_border_is_the_image_of_the_circle() {
        let h = |x: f64| ((1.0 + x) * (1.0 + x).ln() + if x < 1.0 { (1.0 - x) * (1.0 - x).ln() } else { 0.0 }) / 4f64.ln();
        for pt in qubit_border(&Measure::Entropy, 51).unwrap().points {
            let a = pt.param;
            assert!((pt.p - h((2.0 * a).cos())).abs() < 1e-12);
            assert!((pt.v - h((2.0 * a).sin())).abs() < 1e-12);
        }
    }

    #[test]
    fn qubit_border_agrees_with_the_optimizer() {
        for m in Measure::CANONICAL {
            for pt in qubit_border(&m, 9).unwrap().points {
                let rho = DensityMatrix::pure_state(&pt.probs, &[0.0, 0.0]).unwrap();
                let v = strength(&m, &rho, &SearchConfig::default()).unwrap().v;
                assert!((v - pt.v).abs() < 1e-9, "{m}: {v} vs {}", pt.v);
            }
        }
    }

    #[test]
    fn qutrit_cusps() {
        let r = qutrit_region(&Measure::OneGuess, 11).unwrap();
        assert!((r.cusp.0 - 0.25).abs() < 1e-15 && (r.cusp.1 - 0.5).abs() < 1e-15);
        let lin = qutrit_region(&Measure::Linear, 11).unwrap();
        assert!((lin.outer_v_at(0.6).unwrap() - 0.8).abs() < 1e-9);
        assert!(qutrit_region(&Measure::RenyiInf, 11).is_err());
    }

    #[test]
    fn outer_borders_end_at_the_corners() {
        for m in Measure::CANONICAL {
            let r = qutrit_region(&m, 21).unwrap();
            let first = &r.outer.points[0];
            let last = r.outer.points.last().unwrap();
            assert!(first.p.abs() < 1e-12 && (first.v - 1.0).abs() < 1e-12, "{m}");
            assert!((last.p - 1.0).abs() < 1e-12 && last.v.abs() < 1e-12, "{m}");
            assert!(r.outer.max_exclusion_violation() < 1e-9);
        }
    }

    #[test]
    fn ellipse_and_entropic_parameterization() {
        for m in [Measure::OneGuess, Measure::Purity] {
            for pt in qutrit_region(&m, 31).unwrap().outer.points {
                assert!(qutrit_ellipse_residual(pt.p, pt.v).abs() < 1e-9);
            }
        }
        // the entropic border is the one-guess ellipse pushed through the map
        let og = qutrit_region(&Measure::OneGuess, 31).unwrap().outer;
        let ent = qutrit_region(&Measure::Entropy, 31).unwrap().outer;
        for (a, b) in og.points.iter().zip(&ent.points) {
            let (p, v) = entropic_border_point(a.p, a.v);
            assert!((p - b.p).abs() < 1e-9 && (v - b.v).abs() < 1e-9);
        }
    }

    #[test]
    fn counterexample_report() {
        let p = golden_probabilities();
        let g = (5f64.sqrt() - 1.0) / 2.0;
        assert!((g.powi(-4) + g.powi(-2) + g.powi(2) + g.powi(4) - 10.0).abs() < 1e-12);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let r = ququart_counterexample(&SearchConfig::default()).unwrap();
        assert!(r.fixed_point_residual < 1e-12);
        assert!(r.p_lin_residual.abs() < 1e-12);
        assert!(r.v_numeric >= r.p_lin - 1e-12);
        assert!(r.p2_plus_v2 >= 10.0 / 9.0 - 1e-9);
        assert!(r.conjecture_falsified);
    }

    #[test]
    fn quart_curve_symmetric_point_is_the_golden_state() {
        let q = QuartCurveParam::from_log(0.0);
        assert!((q.a.sinh() - 0.5).abs() < 1e-15 && (q.b.sinh() - 0.5).abs() < 1e-15);
        assert!((q.p() - 5f64.sqrt() / 3.0).abs() < 1e-15);
        assert!((q.v() - 5f64.sqrt() / 3.0).abs() < 1e-15);
        for (a, b) in q.probabilities().iter().zip(golden_probabilities()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn quart_curve_reciprocity_and_margin() {
        let c = ququart_conjectured_border(201).unwrap();
        assert!(c.reciprocity_residual < 1e-7, "{}", c.reciprocity_residual);
        assert!(c.value_residual < 1e-12, "{}", c.value_residual);
        assert!(c.min_interior_margin > 0.0);
        let first = &c.curve.points[0];
        let last = c.curve.points.last().unwrap();
        assert!(first.p < 1e-5 && (first.v - 1.0).abs() < 1e-5);
        assert!((last.p - 1.0).abs() < 1e-5 && last.v < 1e-5);
        assert!(ququart_conjectured_border(1).is_err());
    }

    #[test]
    fn qunit_symmetric_values() {
        for (n, want) in [(9, 0.394845), (10, 0.394820), (11, 0.394827)] {
            let s = qunit_symmetric_point(n).unwrap();
            assert!((s.value - want).abs() < 1e-6, "{n}: {}", s.value);
            assert!((s.p_ent - s.value).abs() < 1e-12);
            assert!((s.v_ent - s.value).abs() < 1e-12);
        }
        assert_eq!(qunit_symmetric_point(65).unwrap_err().name(), "BadN");
        assert_eq!(qunit_entropic_conjecture(1, 3).unwrap_err().name(), "BadN");
    }

    #[test]
    fn qunit_curve_for_two_paths_is_the_qubit_border() {
        let conj = qunit_entropic_conjecture(2, 41).unwrap();
        assert!(conj.reciprocity_residual < 1e-12);
        let qubit = qutrit_free_qubit_curve();
        for pt in &conj.curve.points {
            let v = interpolate_by_bisection(&qubit, pt.p);
            assert!((v - pt.v).abs() < 1e-9, "{} {} {}", pt.p, pt.v, v);
        }
    }

    fn qutrit_free_qubit_curve() -> impl Fn(f64) -> (f64, f64) {
        let prepared = Measure::Entropy.prepare(2).unwrap();
        move |a: f64| {
            let e = |x: f64| prepared.eval(&mut [(1.0 + x) / 2.0, (1.0 - x) / 2.0]);
            (e((2.0 * a).cos()), e((2.0 * a).sin()))
        }
    }

    /// `V` on the qubit curve at the given `P`, with `P` decreasing in `a`.
    fn interpolate_by_bisection(curve: &impl Fn(f64) -> (f64, f64), p: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, PI / 4.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if curve(mid).0 > p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        curve(0.5 * (lo + hi)).1
    }

    #[test]
    fn one_guess_family_reproduces_the_low_n_borders() {
        for pt in p1_measure_borders(3, LargestProbabilityMeasure::OneGuess, 101).unwrap().points {
            assert!(qutrit_ellipse_residual(pt.p, pt.v).abs() < 1e-9);
            assert!(one_guess_ellipse_residual(3, pt.p, pt.v).abs() < 1e-9);
        }
        for pt in p1_measure_borders(2, LargestProbabilityMeasure::OneGuess, 101).unwrap().points {
            assert!((pt.p * pt.p + pt.v * pt.v - 1.0).abs() < 1e-9);
        }
        for n in [4, 7, 20] {
            for pt in p1_measure_borders(n, LargestProbabilityMeasure::OneGuess, 51).unwrap().points {
                assert!(one_guess_ellipse_residual(n, pt.p, pt.v).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn renyi_limits_borders() {
        let n = 5;
        let c = p1_measure_borders(n, LargestProbabilityMeasure::RenyiInf, 101).unwrap();
        let lo = 1.0 / n as f64;
        for pt in &c.points {
            if pt.p > lo + 1e-9 && pt.v > lo + 1e-9 {
                assert!(renyi_inf_ellipse_residual(n, pt.p, pt.v).abs() < 1e-9);
            } else {
                // only the corners survive off the ellipse
                assert!((pt.p == 0.0 && pt.v == 1.0) || (pt.p == 1.0 && pt.v == 0.0), "{pt:?}");
            }
        }
        let zero = p1_measure_borders(n, LargestProbabilityMeasure::RenyiZero, 11).unwrap();
        assert!(zero.points.iter().all(|pt| pt.p == 0.0 || pt.v == 0.0));
        // a uniform diagonal sits on the P = 0 branch
        let uniform = DensityMatrix::pure_state(&[0.2; 5], &[0.0; 5]).unwrap();
        assert_eq!(Measure::RenyiInf.knowledge(&uniform).unwrap(), 0.0);
    }

    #[test]
    fn one_guess_ellipse_at_the_diagonal_by_bisection() {
        // P = V on the n = 3 ellipse: 2 (2P - 1/2)^2 = 3/2
        let (mut lo, mut hi) = (0.25, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if qutrit_ellipse_residual(mid, mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((lo - (1.0 + 3f64.sqrt()) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn scans_are_reproducible_and_valid() {
        let cfg = SearchConfig::default();
        let a = random_state_scan(2, &Measure::Purity, 30, 0.0, 5, &cfg).unwrap();
        let b = random_state_scan(2, &Measure::Purity, 30, 0.0, 5, &cfg).unwrap();
        assert_eq!(a, b);
        for pt in &a {
            assert!((pt.p * pt.p + pt.v * pt.v - 1.0).abs() < 1e-8);
            assert!(pt.exclusion_violation() < 1e-9);
        }
    }

    #[test]
    fn mixed_qubits_sit_in_their_rectangles() {
        let mut rng = rng_from_seed(12);
        for _ in 0..200 {
            let rho = random_density(2, &mut rng);
            for m in Measure::CANONICAL {
                let r = qubit_rectangle(&m, &rho).unwrap();
                assert!(r.inside(1e-12));
                let v = strength(&m, &rho, &SearchConfig::default()).unwrap().v;
                assert!(v <= r.v_corner + 1e-9);
            }
        }
    }

    #[test]
    fn csv_layout() {
        let c = qubit_border(&Measure::Linear, 2).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf, true).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "measure,n,kind,p,v,param");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("linear,2,analytic,0,1.00000000000,"));
    }
}
