//! Closed forms for three paths.
//!
//! Pure qutrit states are described by their sorted path probabilities
//! `p1 >= p2 >= p3`; the phases do not matter for `P` or `V`.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::knowledge::Measure;
use crate::state::DensityMatrix;

const ORDER_TOL: f64 = 1e-12;

/// Sorted probabilities of a pure qutrit state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QutritPureSpec {
    p: [f64; 3],
}

impl QutritPureSpec {
    pub fn new(p1: f64, p2: f64, p3: f64) -> Result<Self> {
        let p = [p1, p2, p3];
        if p.iter().any(|x| !x.is_finite() || *x < -ORDER_TOL) {
            return Err(Error::BadProbabilities(format!("{p:?} has a negative entry")));
        }
        if p1 < p2 - ORDER_TOL || p2 < p3 - ORDER_TOL {
            return Err(Error::BadProbabilities(format!("{p:?} is not sorted descending")));
        }
        let sum = p1 + p2 + p3;
        if (sum - 1.0).abs() > ORDER_TOL {
            return Err(Error::BadProbabilities(format!("{p:?} sums to {sum}")));
        }
        Ok(Self { p: p.map(|x| x.max(0.0)) })
    }

    /// Sorts first.
    pub fn from_unsorted(p: [f64; 3]) -> Result<Self> {
        let mut s = p;
        s.sort_by(|a, b| b.total_cmp(a));
        Self::new(s[0], s[1], s[2])
    }

    pub fn probs(&self) -> [f64; 3] {
        self.p
    }

    /// The pure state with real nonnegative amplitudes.
    pub fn state(&self) -> DensityMatrix {
        DensityMatrix::pure_state(&self.p, &[0.0; 3]).expect("spec is a valid distribution")
    }

    /// `sqrt(p1 p2) + sqrt(p2 p3) + sqrt(p3 p1)`
    pub fn root_pair_sum(&self) -> f64 {
        let [a, b, c] = self.p.map(f64::sqrt);
        a * b + b * c + c * a
    }
}

/// The four one-parameter families of pure qutrit states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// `p2 = p3`, parameter `p1` in `[1/3, 1]`.
    Ia,
    /// `(p1 - p3)^2 + 3 p2 = 1`, parameter `P = p1 - p3` in `[0, 1]`.
    Ib,
    /// `p1 = p2`, parameter `p1` in `[1/3, 1/2]`.
    II,
    /// `p3 = 0`, parameter `p1` in `[1/2, 1]`.
    III,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Ia, Family::Ib, Family::II, Family::III];

    pub fn range(&self) -> (f64, f64) {
        match self {
            Family::Ia => (1.0 / 3.0, 1.0),
            Family::Ib => (0.0, 1.0),
            Family::II => (1.0 / 3.0, 0.5),
            Family::III => (0.5, 1.0),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::Ia => "Ia",
            Family::Ib => "Ib",
            Family::II => "II",
            Family::III => "III",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Ia" | "ia" => Ok(Family::Ia),
            "Ib" | "ib" => Ok(Family::Ib),
            "II" | "ii" => Ok(Family::II),
            "III" | "iii" => Ok(Family::III),
            _ => Err(Error::BadParameter(format!("unknown family '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyTag {
    pub family: Family,
    pub param: f64,
}

impl FamilyTag {
    pub fn new(family: Family, param: f64) -> Self {
        Self { family, param }
    }
}

pub fn family_state(tag: FamilyTag) -> Result<QutritPureSpec> {
    let (lo, hi) = tag.family.range();
    let x = tag.param;
    if !(x >= lo - ORDER_TOL && x <= hi + ORDER_TOL) {
        return Err(Error::BadParameter(format!(
            "family {} parameter {x} outside [{lo}, {hi}]",
            tag.family
        )));
    }
    let x = x.clamp(lo, hi);
    let p = match tag.family {
        Family::Ia => [x, (1.0 - x) / 2.0, (1.0 - x) / 2.0],
        Family::Ib => [
            (1.0 + x) * (2.0 + x) / 6.0,
            (1.0 - x * x) / 3.0,
            (1.0 - x) * (2.0 - x) / 6.0,
        ],
        Family::II => [x, x, 1.0 - 2.0 * x],
        Family::III => [x, 1.0 - x, 0.0],
    };
    // Ia and II at their ends can be off by one ulp in the ordering
    QutritPureSpec::from_unsorted(p)
}

pub fn v_one_guess(spec: &QutritPureSpec) -> f64 {
    spec.root_pair_sum().clamp(0.0, 1.0)
}

/// The nonnegative root of `2y^3 + y^2 = p1 p2 p3`.
pub fn linear_cubic_root(spec: &QutritPureSpec) -> f64 {
    let [a, b, c] = spec.p;
    let prod = a * b * c;
    if prod <= 0.0 {
        return 0.0;
    }
    let cos3 = (27.0 * prod).sqrt().clamp(0.0, 1.0);
    let theta = cos3.acos() / 3.0;
    cos3 / (6.0 * theta.cos())
}

pub fn v_linear(spec: &QutritPureSpec) -> f64 {
    let [a, b, c] = spec.p;
    let y = linear_cubic_root(spec);
    let inner = a * b + b * c + c * a + 2.0 * y + 3.0 * y * y;
    (2.0 / 3f64.sqrt() * inner.max(0.0).sqrt()).clamp(0.0, 1.0)
}

fn require_qutrit(rho: &DensityMatrix) -> Result<()> {
    if rho.n() != 3 {
        return Err(Error::WrongDimension { expected: 3, got: rho.n() });
    }
    Ok(())
}

/// `|z|` for the moment `z = q rho_11 + q^2 rho_22 + rho_33`.
pub fn p_purity(rho: &DensityMatrix) -> Result<f64> {
    Ok(rho.qutrit_moment()?.z.norm().min(1.0))
}

/// `|rho_12| + |rho_23| + |rho_31|`, valid for mixed states too.
pub fn v_purity(rho: &DensityMatrix) -> Result<f64> {
    require_qutrit(rho)?;
    let s = rho.entry(0, 1).norm() + rho.entry(1, 2).norm() + rho.entry(2, 0).norm();
    Ok(s.min(1.0))
}

pub fn v_entropy(spec: &QutritPureSpec) -> f64 {
    let s = spec.root_pair_sum();
    let first = 1.0 / 3.0 + 2.0 / 3.0 * s;
    let rest = ((1.0 - s) / 3.0).max(0.0);
    Measure::Entropy
        .of_probs(&[first, rest, rest])
        .expect("three entries")
}

/// Analytic `V` of a pure qutrit state for the four canonical measures.
pub fn v_analytic(measure: &Measure, spec: &QutritPureSpec) -> Option<f64> {
    match measure {
        Measure::OneGuess => Some(v_one_guess(spec)),
        Measure::Linear => Some(v_linear(spec)),
        Measure::Purity => Some(v_one_guess(spec)),
        Measure::Entropy => Some(v_entropy(spec)),
        _ => None,
    }
}

/// Path knowledge and the alternative interference measure
/// `sqrt(3 (|rho_12|^2 + |rho_23|^2 + |rho_31|^2))`.
pub fn durr_pair(rho: &DensityMatrix) -> Result<(f64, f64)> {
    require_qutrit(rho)?;
    let p = p_purity(rho)?;
    let s = rho.entry(0, 1).norm_sqr() + rho.entry(1, 2).norm_sqr() + rho.entry(2, 0).norm_sqr();
    Ok((p, (3.0 * s).sqrt()))
}

/// `(P, V)` in the limit `g2 -> 1` of the bet `(1, g2, -1 - g2)`.
pub fn two_of_three_limit(spec: &QutritPureSpec) -> (f64, f64) {
    let [p1, p2, p3] = spec.p;
    let [a, b, c] = spec.p.map(f64::sqrt);
    let p = 1.0 - 3.0 * p3;
    // equality of the branch condition belongs to the first branch
    let v = if a <= b + c {
        1.0
    } else {
        2.0 * ((p1 * p2).sqrt() - (p2 * p3).sqrt() + (p3 * p1).sqrt())
    };
    (p, v.clamp(0.0, 1.0))
}

/// Gain vector `(1, g2, -1 - g2)` of the general three-path bet.
pub fn two_of_three_gains(g2: f64) -> Result<Measure> {
    Ok(Measure::Bet(crate::knowledge::GainVector::new(vec![1.0, g2, -1.0 - g2])?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::rng_from_seed;
    use rand::Rng;

    fn spec(a: f64, b: f64, c: f64) -> QutritPureSpec {
        QutritPureSpec::new(a, b, c).unwrap()
    }

    #[test]
    fn family_endpoints() {
        assert_eq!(family_state(FamilyTag::new(Family::Ia, 1.0)).unwrap().probs(), [1.0, 0.0, 0.0]);
        let third = 1.0 / 3.0;
        let ii = family_state(FamilyTag::new(Family::II, third)).unwrap().probs();
        assert!(ii.iter().all(|p| (p - third).abs() < 1e-15));
        let ib0 = family_state(FamilyTag::new(Family::Ib, 0.0)).unwrap().probs();
        assert!(ib0.iter().all(|p| (p - third).abs() < 1e-15));
        assert_eq!(family_state(FamilyTag::new(Family::Ib, 1.0)).unwrap().probs(), [1.0, 0.0, 0.0]);
        assert_eq!(
            family_state(FamilyTag::new(Family::II, 0.7)).unwrap_err().name(),
            "BadParameter"
        );
        assert_eq!(
            family_state(FamilyTag::new(Family::III, 0.2)).unwrap_err().name(),
            "BadParameter"
        );
    }

    #[test]
    fn families_satisfy_their_constraints() {
        for i in 0..=20 {
            let t = i as f64 / 20.0;
            for fam in Family::ALL {
                let (lo, hi) = fam.range();
                let [p1, p2, p3] = family_state(FamilyTag::new(fam, lo + t * (hi - lo))).unwrap().probs();
                let residual = match fam {
                    Family::Ia => p2 - p3,
                    Family::Ib => (p1 - p3).powi(2) + 3.0 * p2 - 1.0,
                    Family::II => p1 - p2,
                    Family::III => p3,
                };
                assert!(residual.abs() < 1e-15, "{fam} {t}");
            }
        }
    }

    #[test]
    fn one_guess_examples() {
        assert!((v_one_guess(&spec(0.5, 0.5, 0.0)) - 0.5).abs() < 1e-15);
        assert_eq!(v_one_guess(&spec(1.0, 0.0, 0.0)), 0.0);
        let t = 1.0 / 3.0;
        assert!((v_one_guess(&spec(t, t, t)) - 1.0).abs() < 1e-15);
    }

    /// Bisection on the monotone cubic, independent of the trigonometric form.
    fn cubic_oracle(prod: f64) -> f64 {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if 2.0 * mid.powi(3) + mid * mid < prod {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn cubic_root_matches_bisection() {
        let t = 1.0 / 3.0;
        assert!((linear_cubic_root(&spec(t, t, t)) - 1.0 / 6.0).abs() < 1e-15);
        assert!((2.0 / 216.0 + 1.0 / 36.0 - 1.0 / 27.0f64).abs() < 1e-17);
        let mut rng = rng_from_seed(1);
        for _ in 0..500 {
            let p = crate::random::random_simplex(3, &mut rng);
            let s = QutritPureSpec::from_unsorted([p[0], p[1], p[2]]).unwrap();
            let prod = p[0] * p[1] * p[2];
            assert!((linear_cubic_root(&s) - cubic_oracle(prod)).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_examples() {
        let t = 1.0 / 3.0;
        assert!((v_linear(&spec(t, t, t)) - 1.0).abs() < 1e-12);
        assert!((v_linear(&spec(0.5, 0.5, 0.0)) - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        for i in 0..=50 {
            let big_p = i as f64 / 50.0;
            let s = family_state(FamilyTag::new(Family::Ib, big_p)).unwrap();
            assert!((v_linear(&s) - (1.0 - big_p * big_p).sqrt()).abs() < 1e-9, "{big_p}");
        }
    }

    #[test]
    fn purity_examples() {
        let rho = spec(0.5, 0.5, 0.0).state();
        assert!((p_purity(&rho).unwrap() - 0.5).abs() < 1e-15);
        assert!((v_purity(&rho).unwrap() - 0.5).abs() < 1e-15);
        let mixed = DensityMatrix::maximally_mixed(3).unwrap();
        assert!(p_purity(&mixed).unwrap() < 1e-15);
        assert_eq!(v_purity(&mixed).unwrap(), 0.0);
        assert_eq!(v_purity(&DensityMatrix::maximally_mixed(2).unwrap()).unwrap_err().name(), "WrongDimension");
        // family Ia coincides with the one-guess pair
        for i in 0..=10 {
            let p1 = 1.0 / 3.0 + i as f64 / 15.0;
            let s = family_state(FamilyTag::new(Family::Ia, p1)).unwrap();
            let rho = s.state();
            let og = Measure::OneGuess.of_probs(&s.probs()).unwrap();
            assert!((p_purity(&rho).unwrap() - og).abs() < 1e-12);
            assert!((v_purity(&rho).unwrap() - v_one_guess(&s)).abs() < 1e-12);
        }
    }

    #[test]
    fn purity_closed_form_agrees_with_the_diagonal_measure() {
        let mut rng = rng_from_seed(3);
        for _ in 0..200 {
            let rho = crate::random::random_density(3, &mut rng);
            let direct = Measure::Purity.knowledge(&rho).unwrap();
            assert!((p_purity(&rho).unwrap() - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn entropy_examples() {
        let expected = 2f64.ln() / 3f64.ln() / 3.0;
        assert!((v_entropy(&spec(0.5, 0.5, 0.0)) - expected).abs() < 1e-15);
        assert_eq!(v_entropy(&spec(1.0, 0.0, 0.0)), 0.0);
        let t = 1.0 / 3.0;
        assert!((v_entropy(&spec(t, t, t)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn durr_examples() {
        let (p, v) = durr_pair(&spec(0.5, 0.5, 0.0).state()).unwrap();
        assert!((p * p + v * v - 1.0).abs() < 1e-12);
        assert!((v - 0.75f64.sqrt()).abs() < 1e-15);
        let (p, v) = durr_pair(&DensityMatrix::maximally_mixed(3).unwrap()).unwrap();
        assert!(p < 1e-15 && v == 0.0);
    }

    #[test]
    fn two_of_three_examples() {
        let (p, v) = two_of_three_limit(&spec(0.5, 0.5, 0.0));
        assert_eq!((p, v), (1.0, 1.0));
        assert_eq!(two_of_three_limit(&spec(1.0, 0.0, 0.0)), (1.0, 0.0));
        let (p, v) = two_of_three_limit(&spec(0.64, 0.32, 0.04));
        assert!((p - 0.88).abs() < 1e-12);
        let expected = 2.0 * ((0.64f64 * 0.32).sqrt() - (0.32f64 * 0.04).sqrt() + (0.04f64 * 0.64).sqrt());
        assert!((v - expected).abs() < 1e-15);
        // family II always reaches V = 1 and the border is max{P, V} = 1
        for i in 0..=10 {
            let s = family_state(FamilyTag::new(Family::II, 1.0 / 3.0 + i as f64 / 60.0)).unwrap();
            assert_eq!(two_of_three_limit(&s).1, 1.0);
        }
    }

    #[test]
    fn one_guess_decreases_in_p2() {
        let mut rng = rng_from_seed(7);
        let h = 1e-6;
        for _ in 0..300 {
            let p1: f64 = rng.random_range(1.0 / 3.0..1.0);
            let lo = 0.5 * (1.0 - p1);
            let hi = p1.min(1.0 - p1);
            let p2: f64 = rng.random_range(lo + h..hi - h);
            let v = |p2: f64| -> f64 {
                let [a, b, c] = [p1, p2, 1.0 - p1 - p2].map(f64::sqrt);
                a * b + b * c + c * a
            };
            assert!(v(p2 + h) - v(p2) <= 1e-12);
        }
    }

    #[test]
    fn linear_slope_signs_at_the_bounds() {
        let h = 1e-6;
        let v = |big_p: f64, p2: f64| -> f64 {
            let p1 = (1.0 + big_p - p2) / 2.0;
            let p3 = p1 - big_p;
            v_linear(&QutritPureSpec::from_unsorted([p1, p2, p3]).unwrap())
        };
        for i in 1..20 {
            let big_p = i as f64 / 20.0;
            let lower = (1.0 - big_p) / 3.0;
            let upper = if big_p <= 0.5 { (1.0 + big_p) / 3.0 } else { 1.0 - big_p };
            assert!(v(big_p, lower + h) > v(big_p, lower), "{big_p}");
            assert!(v(big_p, upper - h) > v(big_p, upper), "{big_p}");
        }
    }
}
