mod common;

use common::*;
use hnnconj::brinkmann::integer::{integer_exp_solve, IntegerExpInstance};
use hnnconj::decision::{Bounds, Certificate, Decision, Trace};
use hnnconj::Engine;
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn raw_word(rank: i32, min: usize, max: usize) -> impl Strategy<Value = Raw> {
    prop::collection::vec((1..=rank, any::<bool>()), min..=max)
        .prop_map(|v| reduce(&v.into_iter().map(|(g, s)| if s { g } else { -g }).collect::<Vec<_>>()))
}

fn nonzero(lo: i64, hi: i64) -> impl Strategy<Value = i64> {
    (lo..=hi).prop_filter("nonzero", |&x| x != 0)
}

fn holds(inst: &IntegerExpInstance, a: u64, b: u64) -> bool {
    let lhs = BigInt::from(inst.gamma) * BigInt::from(inst.alpha).pow(a as u32);
    let rhs = BigInt::from(inst.delta) * BigInt::from(inst.beta).pow(b as u32);
    lhs == rhs && inst.satisfies_constraint(a, b)
}

fn engine() -> Engine {
    Engine::new(Bounds {
        orbit: 16,
        conjugator: 4,
        image: 8,
        ..Bounds::default()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn integer_solver_matches_brute_force(
        gamma in nonzero(-20, 20), alpha in nonzero(-12, 12),
        delta in nonzero(-20, 20), beta in nonzero(-12, 12),
        d in 0u64..3, l in -4i64..5, m in -4i64..5,
    ) {
        let inst = IntegerExpInstance { gamma, alpha, delta, beta, d, l, m };
        let got = integer_exp_solve(&inst).unwrap();
        let brute = (0..=24u64)
            .flat_map(|s| (0..=s).map(move |a| (a, s - a)))
            .find(|&(a, b)| holds(&inst, a, b));
        match (got, brute) {
            (Decision::Yes(sol), Some(b)) => prop_assert_eq!(sol, b),
            (Decision::Yes((a, b)), None) => prop_assert!(holds(&inst, a, b) && a + b > 24),
            (Decision::No(Certificate::PrimeSupport), None) => {}
            (other, b) => prop_assert!(false, "{other:?} vs brute {b:?}"),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn single_exponent_answers_verify(seed in any::<u64>(), u in raw_word(2, 1, 3), x in raw_word(2, 0, 2), p in 0usize..3) {
        let mut rng = StdRng::seed_from_u64(seed);
        let imgs = random_injective_f2(&mut rng);
        let phi = endo(&imgs);
        let v = word(&concat(&concat(&x, &apply_power(&u, &imgs, p)), &inverse(&x)));
        let uw = word(&u);
        match engine().single_exponent_conj(&phi, &uw, &v, &mut Trace::new()) {
            Decision::Yes(s) => prop_assert!(s.verify(&phi, &uw, &v) && s.p <= p),
            Decision::No(c) => prop_assert!(false, "constructed instance refuted: {c:?}"),
            Decision::Inconclusive(_) => {}
        }
    }

    #[test]
    fn pair_answers_verify(seed in any::<u64>(), u in raw_word(2, 1, 3), x in raw_word(2, 0, 2), p in 0usize..3, q in 0usize..3) {
        let mut rng = StdRng::seed_from_u64(seed);
        let imgs = random_injective_f2(&mut rng);
        let phi = endo(&imgs);
        // φ^q(v) conjugate to φ^p(u) with v := x⁻¹·φ^{p}(u)·x pulled back q steps when possible.
        let v = word(&concat(&concat(&inverse(&x), &apply_power(&u, &imgs, p + q)), &x));
        let uw = word(&u);
        match engine().two_exp_general(&phi, &uw, &v, &mut Trace::new()) {
            Decision::Yes(s) => prop_assert!(s.verify(&phi, &uw, &v)),
            Decision::No(c) => prop_assert!(false, "constructed instance refuted: {c:?}"),
            Decision::Inconclusive(_) => {}
        }
    }

    #[test]
    fn general_maps_answers_verify(imgs in prop::collection::vec(raw_word(2, 0, 3), 2), u in raw_word(2, 0, 3), v in raw_word(2, 0, 3)) {
        let phi = endo(&imgs);
        let (uw, vw) = (word(&u), word(&v));
        let e = engine();
        if let Decision::Yes(s) = e.two_exp_general(&phi, &uw, &vw, &mut Trace::new()) {
            prop_assert!(s.verify(&phi, &uw, &vw));
        }
        if let Decision::Yes(s) = e.retract_lift_conj(&phi, &uw, &vw, &mut Trace::new()) {
            prop_assert!(s.verify(&phi, &uw, &vw));
        }
        if let Decision::Yes(s) = e.equality_kernel(&phi, &uw, &vw, &mut Trace::new()) {
            prop_assert!(s.verify(&phi, &uw, &vw));
        }
        if let Decision::Yes(s) = e.equality_pair(&phi, &uw, &vw, &mut Trace::new()) {
            prop_assert!(s.verify(&phi, &uw, &vw));
        }
        if let Decision::Yes(s) = e.twisted_pair_general(&phi, 1, &uw, &vw, &mut Trace::new()) {
            prop_assert!(s.verify(&phi, &uw, &vw));
        }
    }

    #[test]
    fn equal_images_are_found(seed in any::<u64>(), u in raw_word(2, 0, 3), k in 0usize..3) {
        let mut rng = StdRng::seed_from_u64(seed);
        let imgs = random_injective_f2(&mut rng);
        let phi = endo(&imgs);
        let uw = word(&u);
        let v = phi.apply_power(&uw, k);
        match engine().equality_pair(&phi, &v, &uw, &mut Trace::new()) {
            Decision::Yes(s) => prop_assert!(s.verify(&phi, &v, &uw)),
            other => prop_assert!(other.is_inconclusive(), "{other:?}"),
        }
    }
}

#[test]
fn transpose_keeps_the_relation() {
    let phi = endo(&[vec![2], vec![1, 1]]);
    let (u, v) = (word(&[1]), word(&[2]));
    let pair = engine().two_exp_general(&phi, &u, &v, &mut Trace::new()).yes().unwrap();
    assert!(pair.verify(&phi, &u, &v));
    assert!(pair.transpose().verify(&phi, &v, &u));
}
