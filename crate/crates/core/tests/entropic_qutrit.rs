//! The entropic closed form for qutrits is the entropy of
//! `(1/3 + 2s/3, (1-s)/3, (1-s)/3)` with `s` the sum of root pair products.
//! It is attained on the outer family but is only a lower bound elsewhere.

use duality_core::atlas::balanced_pair_state;
use duality_core::qutrit::{family_state, v_entropy, Family, FamilyTag, QutritPureSpec};
use duality_core::*;

fn numeric(rho: &DensityMatrix) -> f64 {
    strength(&Measure::Entropy, rho, &SearchConfig::default()).unwrap().v
}

#[test]
fn exact_on_the_outer_families() {
    for family in [Family::Ia, Family::Ib] {
        let (lo, hi) = family.range();
        for i in 0..=10 {
            let spec = family_state(FamilyTag::new(family, lo + (hi - lo) * i as f64 / 10.0)).unwrap();
            let v = numeric(&spec.state());
            assert!((v - v_entropy(&spec)).abs() < 1e-9, "{family} {i}: {v} vs {}", v_entropy(&spec));
        }
    }
}

#[test]
fn never_above_the_optimum() {
    let mut rng = duality_core::random::rng_from_seed(8);
    for _ in 0..100 {
        let rho = duality_core::random::haar_pure_state(3, &mut rng);
        let spec = duality_core::atlas::qutrit_spec_of(&rho).unwrap();
        assert!(v_entropy(&spec) <= numeric(&rho) + 1e-9);
    }
}

#[test]
fn below_the_optimum_at_the_cusp() {
    let rho = balanced_pair_state();
    let p = Measure::Entropy.knowledge(&rho).unwrap();
    let closed = v_entropy(&QutritPureSpec::new(0.5, 0.5, 0.0).unwrap());
    let log3_2 = 2f64.ln() / 3f64.ln();
    assert!((closed - log3_2 / 3.0).abs() < 1e-12);
    // the state is left unchanged by the standard matrix, so V >= P
    let fixed = strength_lower_bound(&Measure::Entropy, &rho, &FourierMatrix::standard(3, &[0.0; 3], &[0.0; 3]).unwrap()).unwrap();
    assert!((fixed - p).abs() < 1e-12);
    assert!((p - (1.0 - log3_2)).abs() < 1e-12);
    let v = numeric(&rho);
    assert!(v >= p - 1e-12 && v > closed + 0.15, "{v} {closed}");
    assert!((brute_force_strength(&Measure::Entropy, &rho, 360).unwrap() - v).abs() < 1e-4);
}

#[test]
fn below_the_optimum_off_the_border() {
    let spec = QutritPureSpec::new(0.7116, 0.2859, 0.0025).unwrap();
    let rho = spec.state();
    let brute = brute_force_strength(&Measure::Entropy, &rho, 720).unwrap();
    assert!(brute - v_entropy(&spec) > 0.05, "{brute} {}", v_entropy(&spec));
    assert!((numeric(&rho) - brute).abs() < 1e-4);
}
