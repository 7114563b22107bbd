mod common;

use common::*;
use hnnconj::decision::{Bounds, Certificate, Decision, Trace};
use hnnconj::hnn::{verify_witness, HnnElement, HnnPresentation, HnnWord};
use hnnconj::Engine;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn hnn_letters(rank: i32, max: usize) -> impl Strategy<Value = Raw> {
    prop::collection::vec(
        prop_oneof![
            1 => Just(T),
            1 => Just(T_INV),
            4 => (1..=rank, any::<bool>()).prop_map(|(g, s)| if s { g } else { -g }),
        ],
        0..=max,
    )
}

fn presentation(seed: u64) -> (HnnPresentation, Vec<Raw>) {
    let mut rng = StdRng::seed_from_u64(seed);
    let imgs = random_injective_f2(&mut rng);
    (HnnPresentation::new(endo(&imgs)).unwrap(), imgs)
}

fn parse(pres: &HnnPresentation, w: &[i32]) -> HnnWord {
    pres.parse_word(&hnn_to_string(w)).unwrap()
}

fn join(parts: &[&[i32]]) -> Raw {
    parts.concat()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rewrite_agrees_with_reference(seed in any::<u64>(), w in hnn_letters(2, 10)) {
        let (pres, imgs) = presentation(seed);
        let e = pres.rewrite(&parse(&pres, &w));
        let f = hnn_rewrite(&w, &imgs);
        let frame = Frame { i: e.i, x: raw(&e.x), j: e.j };
        prop_assert!(hnn_equal(&frame, &f, &imgs));
        prop_assert_eq!(e.retraction_exponent(), parse(&pres, &w).t_exponent());
    }

    #[test]
    fn rewrite_is_a_congruence(seed in any::<u64>(), a in hnn_letters(2, 6), b in hnn_letters(2, 6)) {
        let (pres, _) = presentation(seed);
        let (ea, eb) = (pres.rewrite(&parse(&pres, &a)), pres.rewrite(&parse(&pres, &b)));
        let ab = pres.rewrite(&parse(&pres, &join(&[&a, &b])));
        prop_assert!(pres.equal(&pres.mul(&ea, &eb), &ab));
        prop_assert!(pres.equal(&pres.mul(&ea, &ea.inverse()), &HnnElement::identity()));
        // inserting a relator t⁻¹·x·t·φ(x)⁻¹ does not change the element
        let rel = join(&[&[T_INV, 1, T], &inverse(&raw(pres.phi().image(1)))]);
        let with_rel = pres.rewrite(&parse(&pres, &join(&[&a, &rel, &b])));
        prop_assert!(pres.equal(&with_rel, &ab));
    }

    #[test]
    fn conjugates_are_recognised(seed in any::<u64>(), g in hnn_letters(2, 4), w in hnn_letters(2, 4)) {
        let (pres, imgs) = presentation(seed);
        let h = join(&[&hnn_inverse(&w), &g, &w]);
        let engine = Engine::new(Bounds { conjugator: 4, orbit: 24, ..Bounds::default() });
        match engine.hnn_conjugate(&pres, &parse(&pres, &g), &parse(&pres, &h), &mut Trace::new()) {
            Decision::Yes(wit) => {
                let (ge, he) = (pres.rewrite(&parse(&pres, &g)), pres.rewrite(&parse(&pres, &h)));
                prop_assert!(verify_witness(&pres, &ge, &he, &wit.conjugator));
                let z = raw_hnn(&wit.conjugator);
                let zhz = join(&[&hnn_inverse(&z), &h, &z]);
                prop_assert!(hnn_equal(&hnn_rewrite(&g, &imgs), &hnn_rewrite(&zhz, &imgs), &imgs));
                // a perturbed conjugator must fail unless it happens to centralise
                let bad = pres.mul(&wit.conjugator, &HnnElement::base(hnnconj::Word::generator(1)));
                let centralises = pres.equal(&pres.conjugate(&ge, &HnnElement::base(hnnconj::Word::generator(1))), &ge);
                prop_assert!(centralises || !verify_witness(&pres, &ge, &he, &bad));
            }
            Decision::No(c) => prop_assert!(false, "conjugate pair refuted: {c:?}"),
            Decision::Inconclusive(_) => {}
        }
    }

    #[test]
    fn decisions_are_symmetric(seed in any::<u64>(), g in hnn_letters(2, 5), h in hnn_letters(2, 5)) {
        let (pres, _) = presentation(seed);
        let engine = Engine::new(Bounds { conjugator: 3, orbit: 16, ..Bounds::default() });
        let (gw, hw) = (parse(&pres, &g), parse(&pres, &h));
        let fwd = engine.hnn_conjugate(&pres, &gw, &hw, &mut Trace::new());
        let back = engine.hnn_conjugate(&pres, &hw, &gw, &mut Trace::new());
        prop_assert!(!(fwd.is_yes() && back.is_no()) && !(fwd.is_no() && back.is_yes()));
        prop_assert!(engine.hnn_conjugate(&pres, &gw, &gw, &mut Trace::new()).is_yes());
        if gw.t_exponent() != hw.t_exponent() {
            let refuted = matches!(fwd, Decision::No(Certificate::RetractionExponent { .. }));
            prop_assert!(refuted);
        }
    }
}

fn raw_hnn(e: &HnnElement) -> Raw {
    join(&[&vec![T; e.i], &raw(&e.x), &vec![T_INV; e.j]])
}

#[test]
fn baumslag_solitar_fixtures() {
    let pres = HnnPresentation::parse("rank 1\na -> aa\n").unwrap();
    let engine = Engine::default();
    let run = |g: &str, h: &str| {
        engine.hnn_conjugate(&pres, &pres.parse_word(g).unwrap(), &pres.parse_word(h).unwrap(), &mut Trace::new())
    };
    assert!(run("a", "aa").is_yes());
    assert_eq!(run("a", "aaa"), Decision::No(Certificate::PrimeSupport));
    assert!(matches!(run("a", "t"), Decision::No(Certificate::RetractionExponent { g: 0, h: 1 })));
}
