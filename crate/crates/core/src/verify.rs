//! Named bundles of checks with residuals and tolerances.

use serde::Serialize;
use std::fmt;
use std::str::FromStr;

use crate::atlas::{
    entropic_border_point, one_guess_ellipse_residual, p1_measure_borders, qubit_border, qubit_rectangle,
    ququart_conjectured_border, ququart_counterexample, ququart_curve_numeric, qunit_entropic_conjecture,
    qunit_symmetric_value, qutrit_ellipse_residual, qutrit_region, renyi_inf_ellipse_residual, balanced_pair_state,
    LargestProbabilityMeasure, QuartCurveParam,
};
use crate::error::{Error, Result};
use crate::knowledge::{check_axioms, Measure};
use crate::qutrit::{durr_pair, family_state, two_of_three_gains, v_analytic, Family, FamilyTag, QutritPureSpec};
use crate::random::{haar_pure_state, random_density, rng_from_seed};
use crate::strength::{check_strength_axioms, strength, SearchConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Qubit,
    Qutrit,
    Ququart,
    Qunit,
    Axioms,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Qubit, Suite::Qutrit, Suite::Ququart, Suite::Qunit, Suite::Axioms];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Qubit => "qubit",
            Suite::Qutrit => "qutrit",
            Suite::Ququart => "ququart",
            Suite::Qunit => "qunit",
            Suite::Axioms => "axioms",
        })
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.to_string() == s)
            .ok_or_else(|| Error::BadParameter(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub check: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Collects checks; a residual passes when it is at most the tolerance.
#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn add(&mut self, name: impl Into<String>, residual: f64, tolerance: f64) {
        self.0.push(Check {
            check: name.into(),
            residual,
            tolerance,
            passed: residual <= tolerance,
        });
    }

    fn flag(&mut self, name: impl Into<String>, ok: bool) {
        self.add(name, if ok { 0.0 } else { 1.0 }, 0.0);
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub search: SearchConfig,
    /// Random trials for the axiom suite.
    pub trials: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            search: SearchConfig::default(),
            trials: 1000,
            seed: 0,
        }
    }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<VerifyReport> {
    let mut c = Checks::default();
    match suite {
        Suite::Qubit => qubit(&mut c, opts)?,
        Suite::Qutrit => qutrit(&mut c, opts)?,
        Suite::Ququart => ququart(&mut c, opts)?,
        Suite::Qunit => qunit(&mut c)?,
        Suite::Axioms => axioms(&mut c, opts)?,
    }
    Ok(VerifyReport {
        suite,
        passed: c.0.iter().all(|x| x.passed),
        checks: c.0,
    })
}

fn qubit(c: &mut Checks, opts: &VerifyOptions) -> Result<()> {
    let mut rng = rng_from_seed(opts.seed);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let rho = haar_pure_state(2, &mut rng);
        let p = Measure::Purity.knowledge(&rho)?;
        let v = strength(&Measure::Purity, &rho, &opts.search)?.v;
        worst = worst.max((p * p + v * v - 1.0).abs());
    }
    c.add("pure-qubit-purity-circle", worst, 1e-9);

    for m in [Measure::OneGuess, Measure::Linear, Measure::Purity] {
        let curve = qubit_border(&m, 101)?;
        let r = curve.points.iter().map(|pt| (pt.p * pt.p + pt.v * pt.v - 1.0).abs()).fold(0.0, f64::max);
        c.add(format!("qubit-border-circle-{m}"), r, 1e-12);
    }
    let ent = qubit_border(&Measure::Entropy, 101)?;
    let h = |x: f64| {
        let a = (1.0 + x) * (1.0 + x).ln();
        let b = if x < 1.0 { (1.0 - x) * (1.0 - x).ln() } else { 0.0 };
        (a + b) / 4f64.ln()
    };
    let r = ent
        .points
        .iter()
        .map(|pt| (pt.p - h((2.0 * pt.param).cos())).abs().max((pt.v - h((2.0 * pt.param).sin())).abs()))
        .fold(0.0, f64::max);
    c.add("qubit-entropic-border", r, 1e-12);
    let ends = ent.points[0].p.abs().max((ent.points[0].v - 1.0).abs());
    c.add("qubit-border-endpoints", ends.max(ent.max_exclusion_violation()), 1e-9);

    let mut outside: f64 = 0.0;
    for _ in 0..100 {
        let rho = random_density(2, &mut rng);
        for m in Measure::CANONICAL {
            let r = qubit_rectangle(&m, &rho)?;
            let v = strength(&m, &rho, &opts.search)?.v;
            outside = outside.max(r.p - r.p_corner).max(r.v - r.v_corner).max(v - r.v_corner);
        }
    }
    c.add("mixed-qubit-rectangle", outside.max(0.0), 1e-9);
    Ok(())
}

/// Expected `(P, V)` at `p = (1/2, 1/2, 0)`.
pub fn cusp_values(measure: &Measure) -> Option<(f64, f64)> {
    let log3_2 = 2f64.ln() / 3f64.ln();
    match measure {
        Measure::OneGuess => Some((0.25, 0.5)),
        Measure::Linear => Some((0.5, 1.0 / 3f64.sqrt())),
        Measure::Purity => Some((0.5, 0.5)),
        Measure::Entropy => Some((1.0 - log3_2, log3_2 / 3.0)),
        _ => None,
    }
}

fn qutrit(c: &mut Checks, opts: &VerifyOptions) -> Result<()> {
    let cusp = balanced_pair_state();
    let cusp_spec = QutritPureSpec::new(0.5, 0.5, 0.0)?;
    for m in Measure::CANONICAL {
        let (p, v) = cusp_values(&m).expect("canonical");
        let pa = m.knowledge(&cusp)?;
        let va = v_analytic(&m, &cusp_spec).expect("canonical");
        c.add(format!("cusp-analytic-{m}"), (pa - p).abs().max((va - v).abs()), 1e-12);
        let vn = strength(&m, &cusp, &opts.search)?.v;
        c.add(format!("cusp-numeric-{m}"), (vn - v).abs(), 1e-6);
    }

    for m in [Measure::OneGuess, Measure::Purity] {
        let r = qutrit_region(&m, 50)?;
        let worst = r.outer.points.iter().map(|pt| qutrit_ellipse_residual(pt.p, pt.v).abs()).fold(0.0, f64::max);
        c.add(format!("outer-ellipse-{m}"), worst, 1e-9);
    }
    let lin = qutrit_region(&Measure::Linear, 50)?;
    let worst = lin.outer.points.iter().map(|pt| (pt.p * pt.p + pt.v * pt.v - 1.0).abs()).fold(0.0, f64::max);
    c.add("outer-circle-linear-analytic", worst, 1e-9);
    let mut worst: f64 = 0.0;
    for pt in lin.outer.points.iter().step_by(5) {
        let rho = family_state(FamilyTag::new(Family::Ib, pt.param))?.state();
        let v = strength(&Measure::Linear, &rho, &opts.search)?.v;
        worst = worst.max((pt.p * pt.p + v * v - 1.0).abs());
    }
    c.add("outer-circle-linear-numeric", worst, 1e-5);
    let og = qutrit_region(&Measure::OneGuess, 50)?;
    let ent = qutrit_region(&Measure::Entropy, 50)?;
    let worst = og
        .outer
        .points
        .iter()
        .zip(&ent.outer.points)
        .map(|(a, b)| {
            let (p, v) = entropic_border_point(a.p, a.v);
            (p - b.p).abs().max((v - b.v).abs())
        })
        .fold(0.0, f64::max);
    c.add("outer-entropic-parameterization", worst, 1e-9);

    let mut rng = rng_from_seed(opts.seed);
    let mut worst: f64 = 0.0;
    let mut pure: f64 = 0.0;
    for i in 0..500 {
        let rho = if i % 2 == 0 { haar_pure_state(3, &mut rng) } else { random_density(3, &mut rng) };
        let (p, vbar) = durr_pair(&rho)?;
        let rhs = 1.5 * rho.purity() - 0.5;
        worst = worst.max((p * p + vbar * vbar - rhs).abs());
        if i % 2 == 0 {
            pure = pure.max((p * p + vbar * vbar - 1.0).abs());
        }
    }
    c.add("purity-identity", worst, 1e-12);
    c.add("purity-identity-pure", pure, 1e-12);

    for m in Measure::CANONICAL {
        let region = qutrit_region(&m, 5)?;
        let mut diff: f64 = 0.0;
        let mut excess: f64 = 0.0;
        for _ in 0..50 {
            let rho = haar_pure_state(3, &mut rng);
            let spec = crate::atlas::qutrit_spec_of(&rho)?;
            let p = m.knowledge(&rho)?;
            let v = strength(&m, &rho, &opts.search)?.v;
            diff = diff.max((v - v_analytic(&m, &spec).expect("canonical")).abs());
            excess = excess.max(region.outer_excess(p, v)?);
        }
        c.add(format!("analytic-vs-numeric-{m}"), diff, 1e-5);
        c.add(format!("inside-outer-border-{m}"), excess.max(0.0), 1e-6);
    }

    let bet = two_of_three_gains(0.99)?;
    let state = crate::atlas::balanced_pair_state();
    let p = bet.knowledge(&state)?;
    let v = strength(&bet, &state, &opts.search)?.v;
    c.add("two-of-three-p", (p - 0.995).abs(), 1e-12);
    c.add("two-of-three-v", (0.995 - v).max(0.0), 1e-9);
    Ok(())
}

fn ququart(c: &mut Checks, opts: &VerifyOptions) -> Result<()> {
    let r = ququart_counterexample(&opts.search)?;
    c.add("golden-normalization", r.normalization_residual.abs(), 1e-15);
    c.add("golden-fixed-point", r.fixed_point_residual, 1e-12);
    c.add("golden-p-lin", r.p_lin_residual.abs(), 1e-12);
    c.add("golden-v-at-least-p", (r.p_lin - r.v_numeric).max(0.0), 1e-12);
    c.add("golden-beyond-circle", (10.0 / 9.0 - 1e-9 - r.p2_plus_v2).max(0.0), 0.0);
    c.flag("conjecture-falsified", r.conjecture_falsified);

    let q = QuartCurveParam::from_log(0.0);
    let target = 5f64.sqrt() / 3.0;
    c.add("curve-symmetric-point", (q.p() - target).abs().max((q.v() - target).abs()), 1e-12);
    let curve = ququart_conjectured_border(201)?;
    c.add("curve-reciprocity", curve.reciprocity_residual, 1e-7);
    c.add("curve-values", curve.value_residual, 1e-12);
    c.add("curve-beyond-circle", (-curve.min_interior_margin).max(0.0), 0.0);
    let sym = q.p() * q.p() + q.v() * q.v() - 1.0;
    c.add("curve-symmetric-margin", (1e-4 - sym).max(0.0), 0.0);
    let numeric = ququart_curve_numeric(9, 3.0, &opts.search)?;
    let short = numeric.iter().map(|x| x.v_conjectured - x.v_numeric).fold(0.0, f64::max);
    c.add("curve-numeric-strength", short, 1e-5);
    Ok(())
}

fn qunit(c: &mut Checks) -> Result<()> {
    let mut recip: f64 = 0.0;
    let mut sym: f64 = 0.0;
    for n in [2, 3, 4, 5, 10, 20, 64] {
        let conj = qunit_entropic_conjecture(n, 101)?;
        recip = recip.max(conj.reciprocity_residual);
        let s = &conj.symmetric;
        sym = sym.max((s.p_ent - s.value).abs()).max((s.v_ent - s.value).abs());
    }
    c.add("reciprocity-identities", recip, 1e-12);
    c.add("symmetric-point", sym, 1e-12);
    for (n, want) in [(9, 0.394845), (10, 0.394820), (11, 0.394827)] {
        c.add(format!("symmetric-value-n{n}"), (qunit_symmetric_value(n) - want).abs(), 1e-6);
    }
    let argmin = (2..=20)
        .min_by(|&a, &b| qunit_symmetric_value(a).total_cmp(&qunit_symmetric_value(b)))
        .expect("nonempty");
    c.flag("symmetric-minimum-at-10", argmin == 10);

    let qubit = qubit_border(&Measure::Entropy, 2001)?;
    let two = qunit_entropic_conjecture(2, 101)?;
    let mut worst: f64 = 0.0;
    for pt in &two.curve.points {
        worst = worst.max(distance_to_polyline(&qubit.points, pt.p, pt.v));
    }
    c.add("two-path-curve-is-qubit-border", worst, 1e-6);

    let mut worst: f64 = 0.0;
    for pt in p1_measure_borders(3, LargestProbabilityMeasure::OneGuess, 101)?.points {
        worst = worst.max(qutrit_ellipse_residual(pt.p, pt.v).abs());
    }
    c.add("one-guess-family-n3-ellipse", worst, 1e-9);
    let mut worst: f64 = 0.0;
    for pt in p1_measure_borders(2, LargestProbabilityMeasure::OneGuess, 101)?.points {
        worst = worst.max((pt.p * pt.p + pt.v * pt.v - 1.0).abs());
    }
    c.add("one-guess-family-n2-circle", worst, 1e-9);
    let mut worst: f64 = 0.0;
    for n in [4, 6, 12] {
        for pt in p1_measure_borders(n, LargestProbabilityMeasure::OneGuess, 51)?.points {
            worst = worst.max(one_guess_ellipse_residual(n, pt.p, pt.v).abs());
        }
        let lo = 1.0 / n as f64;
        for pt in p1_measure_borders(n, LargestProbabilityMeasure::RenyiInf, 51)?.points {
            if pt.p > lo + 1e-9 && pt.v > lo + 1e-9 {
                worst = worst.max(renyi_inf_ellipse_residual(n, pt.p, pt.v).abs());
            } else if !((pt.p == 0.0 && pt.v == 1.0) || (pt.p == 1.0 && pt.v == 0.0)) {
                worst = worst.max(1.0);
            }
        }
    }
    c.add("largest-probability-ellipses", worst, 1e-9);
    Ok(())
}

/// Distance from `(p, v)` to a curve given by sorted points.
fn distance_to_polyline(points: &[crate::atlas::PVPoint], p: f64, v: f64) -> f64 {
    points
        .windows(2)
        .map(|w| {
            let (ax, ay, bx, by) = (w[0].p, w[0].v, w[1].p, w[1].v);
            let (dx, dy) = (bx - ax, by - ay);
            let len2 = dx * dx + dy * dy;
            let t = if len2 > 0.0 { (((p - ax) * dx + (v - ay) * dy) / len2).clamp(0.0, 1.0) } else { 0.0 };
            ((ax + t * dx - p).powi(2) + (ay + t * dy - v).powi(2)).sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

fn axioms(c: &mut Checks, opts: &VerifyOptions) -> Result<()> {
    for m in Measure::CANONICAL {
        for n in [2, 3, 5] {
            let r = check_axioms(&m, n, opts.trials, opts.seed)?;
            c.add(format!("knowledge-axioms-{m}-n{n}"), r.max_violation(), 1e-8);
        }
        let trials = (opts.trials / 10).max(4);
        let r = check_strength_axioms(&m, 3, trials, opts.seed, &opts.search)?;
        c.add(format!("strength-axioms-{m}-n3"), r.max_violation(), 1e-8);
    }
    Ok(())
}
