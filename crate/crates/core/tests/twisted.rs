mod common;

use common::*;
use hnnconj::decision::{Bounds, Decision, Trace};
use hnnconj::twisted::{decode_fixed, encode_fixed, twisted_iterate_witness, verify_twisted};
use hnnconj::Engine;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn raw_word(rank: i32, min: usize, max: usize) -> impl Strategy<Value = Raw> {
    prop::collection::vec((1..=rank, any::<bool>()), min..=max)
        .prop_map(|v| reduce(&v.into_iter().map(|(g, s)| if s { g } else { -g }).collect::<Vec<_>>()))
}

/// `x⁻¹·v·φ(x)` on raw letters.
fn twist(v: &[i32], x: &[i32], imgs: &[Raw]) -> Raw {
    concat(&concat(&inverse(x), v), &substitute(x, imgs))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn encoded_conjugator_is_fixed(seed in any::<u64>(), v in raw_word(2, 0, 4), x in raw_word(2, 0, 3)) {
        let mut rng = StdRng::seed_from_u64(seed);
        let imgs = random_injective_f2(&mut rng);
        let phi = endo(&imgs);
        let u = twist(&v, &x, &imgs);
        let (uw, vw, xw) = (word(&u), word(&v), word(&x));
        prop_assert!(verify_twisted(&phi, &uw, &vw, &xw));
        let ext = encode_fixed(&phi, &uw, &vw);
        let bxe = word(&[vec![3], x.clone(), vec![4]].concat());
        prop_assert_eq!(ext.apply(&bxe), bxe.clone());
        prop_assert_eq!(decode_fixed(&bxe, 2), Some(xw));
    }

    #[test]
    fn iterate_witness_verifies(seed in any::<u64>(), u in raw_word(2, 0, 4), i in 0usize..4, j in 0usize..4) {
        let mut rng = StdRng::seed_from_u64(seed);
        let imgs = random_injective_f2(&mut rng);
        let phi = endo(&imgs);
        let x = raw(&twisted_iterate_witness(&phi, &word(&u), i, j));
        let lhs = apply_power(&u, &imgs, i);
        prop_assert_eq!(lhs, twist(&apply_power(&u, &imgs, j), &x, &imgs));
    }

    #[test]
    fn twisted_search_is_sound(seed in any::<u64>(), v in raw_word(2, 0, 3), x in raw_word(2, 0, 2), other in raw_word(2, 0, 3)) {
        let mut rng = StdRng::seed_from_u64(seed);
        let imgs = random_injective_f2(&mut rng);
        let phi = endo(&imgs);
        let engine = Engine::new(Bounds { conjugator: 4, ..Bounds::default() });
        let u = twist(&v, &x, &imgs);
        match engine.twisted_conjugate(&phi, &word(&u), &word(&v), &mut Trace::new()) {
            Decision::Yes(y) => prop_assert_eq!(twist(&v, &raw(&y), &imgs), u.clone()),
            Decision::No(c) => prop_assert!(false, "related pair refuted: {c:?}"),
            Decision::Inconclusive(_) => {}
        }
        if let Decision::Yes(y) = engine.twisted_conjugate(&phi, &word(&u), &word(&other), &mut Trace::new()) {
            prop_assert_eq!(twist(&other, &raw(&y), &imgs), u);
        }
    }

    #[test]
    fn pairs_verify(seed in any::<u64>(), u in raw_word(2, 0, 3), v in raw_word(2, 0, 3), n in 1usize..3) {
        let mut rng = StdRng::seed_from_u64(seed);
        let phi = endo(&random_injective_f2(&mut rng));
        let engine = Engine::new(Bounds { conjugator: 3, ..Bounds::default() });
        if let Decision::Yes(pair) = engine.phi_n_twisted_pairs(&phi, n, &word(&u), &word(&v), &mut Trace::new()) {
            prop_assert!(pair.verify(&phi, &word(&u), &word(&v)));
            prop_assert!(pair.p < n && pair.q < n);
        }
    }
}
