mod common;

use common::*;
use hnnconj::endo::{nielsen_retract, stable_image_probe, StableImageProbe};
use hnnconj::words::Word;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn raw_word(rank: i32, min: usize, max: usize) -> impl Strategy<Value = Raw> {
    prop::collection::vec((1..=rank, any::<bool>()), min..=max)
        .prop_map(|v| reduce(&v.into_iter().map(|(g, s)| if s { g } else { -g }).collect::<Vec<_>>()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn application_is_a_homomorphism(imgs in prop::collection::vec(raw_word(2, 0, 4), 2), a in raw_word(2, 0, 6), b in raw_word(2, 0, 6)) {
        let phi = endo(&imgs);
        let (aw, bw) = (word(&a), word(&b));
        prop_assert_eq!(phi.apply(&aw.mul(&bw)), phi.apply(&aw).mul(&phi.apply(&bw)));
        prop_assert_eq!(raw(&phi.apply(&aw)), substitute(&a, &imgs));
        prop_assert_eq!(raw(&phi.apply_power(&aw, 3)), apply_power(&a, &imgs, 3));
    }

    #[test]
    fn injective_maps_have_unique_preimages(seed in any::<u64>(), w in raw_word(2, 0, 6)) {
        let mut rng = StdRng::seed_from_u64(seed);
        let imgs = random_injective_f2(&mut rng);
        let phi = endo(&imgs);
        prop_assert!(phi.is_injective());
        let img = phi.apply(&word(&w));
        prop_assert_eq!(phi.pullback_element(&img), Some(word(&w)));
    }

    #[test]
    fn automorphisms_are_bijective(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let imgs = random_automorphism(&mut rng, 3, 6);
        let phi = endo(&imgs);
        prop_assert!(phi.is_injective() && phi.is_surjective());
        for g in 1..=3 {
            prop_assert!(phi.pullback_element(&Word::generator(g)).is_some());
        }
    }

    #[test]
    fn retraction_contract(imgs in prop::collection::vec(raw_word(3, 0, 4), 3), w in raw_word(3, 0, 6)) {
        let phi = endo(&imgs);
        let r = nielsen_retract(&phi).unwrap();
        let pi = &r.projection;
        let ww = word(&w);
        prop_assert_eq!(pi.apply(&pi.apply(&ww)), pi.apply(&ww));
        prop_assert!(r.restricted.is_injective());
        prop_assert!(r.rank_chain.windows(2).all(|p| p[0] > p[1]));
        for n in 1..=3 {
            let lhs = r.embed.apply(&r.restricted.apply_power(&r.coords.apply(&ww), n));
            prop_assert_eq!(lhs, pi.apply(&phi.apply_power(&ww, n)));
        }
    }

    #[test]
    fn probe_depth_is_exact(seed in any::<u64>(), w in raw_word(2, 1, 4), k in 0usize..3) {
        let mut rng = StdRng::seed_from_u64(seed);
        let phi = endo(&random_injective_f2(&mut rng));
        let target = phi.apply_power(&word(&w), k);
        if let StableImageProbe::NotInImagePower { m, preimage } = stable_image_probe(&phi, &target, 16) {
            prop_assert!(m > k);
            prop_assert_eq!(phi.apply_power(&preimage, m - 1), target);
            prop_assert!(phi.pullback_element(&preimage).is_none());
        }
    }
}
