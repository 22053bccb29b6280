mod common;

use std::sync::OnceLock;

use proptest::prelude::*;

use common::*;
use multiegs::permgroup::{element_order, GroupElement, Tower};
use multiegs::ramification::{certify_pair, socle, CertifyOptions, PairVerdict};
use multiegs::tree::level_offset;
use multiegs::{DefiningDatum, GroupContext, Portrait, Symbol, Word};

fn constant_tower() -> &'static Tower {
    static TOWER: OnceLock<Tower> = OnceLock::new();
    TOWER.get_or_init(|| Tower::new(&constant_p3(), 3))
}

fn periodic_ctx() -> &'static GroupContext {
    static CTX: OnceLock<GroupContext> = OnceLock::new();
    CTX.get_or_init(|| GroupContext::new(&periodic_p5(), 3))
}

fn element_of(ctx: &'static GroupContext) -> impl Strategy<Value = Portrait> {
    let n = ctx.generators().len();
    proptest::collection::vec((0..n, 1..ctx.p()), 1..20).prop_map(move |word| {
        word.iter().fold(ctx.identity(), |acc, &(i, e)| {
            acc.mul(&ctx.generators()[i].pow(i64::from(e)))
        })
    })
}

fn portrait(p: u32, depth: usize) -> impl Strategy<Value = Portrait> {
    proptest::collection::vec(0..p as u8, level_offset(p, depth))
        .prop_map(move |labels| Portrait::from_labels(p, depth, labels).unwrap())
}

fn symbol() -> impl Strategy<Value = Symbol> {
    prop_oneof![
        Just(Symbol::A),
        (1u32..=5, 1usize..=4).prop_map(|(family, index)| Symbol::B { family, index }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 500, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn datum_text_round_trips(p in prop_oneof![Just(3u32), Just(5), Just(7)], seed in proptest::collection::vec(1i64..50, 1..4)) {
        let dim = (p - 1) as usize;
        let vectors: Vec<Vec<i64>> = seed.iter().map(|&s| (0..dim as i64).map(|i| (s * (i + 1) + i * i) % 7 - 3).collect()).collect();
        let datum = DefiningDatum::multi_ggs(p, vectors);
        prop_assert_eq!(DefiningDatum::parse(&datum.serialize()).unwrap(), datum);
    }

    #[test]
    fn words_round_trip_through_text(letters in proptest::collection::vec((symbol(), -6i64..=6), 0..8)) {
        let w = Word::from_letters(letters);
        prop_assert_eq!(w.to_string().parse::<Word>().unwrap(), w);
    }

    #[test]
    fn inverse_word_cancels(letters in proptest::collection::vec((symbol(), -6i64..=6), 0..8)) {
        let w = Word::from_letters(letters);
        prop_assert!(w.concat(&w.inverse()).is_empty());
    }

    #[test]
    fn truncation_is_a_homomorphism(g in portrait(3, 3), h in portrait(3, 3), m in 0usize..=3) {
        prop_assert_eq!(g.mul(&h).truncate(m).unwrap(), g.truncate(m).unwrap().mul(&h.truncate(m).unwrap()));
    }

    #[test]
    fn packed_and_text_forms_round_trip(g in portrait(5, 2)) {
        prop_assert_eq!(Portrait::from_packed(5, 2, &g.packed()), g.clone());
        prop_assert_eq!(Portrait::from_text(&g.to_text()).unwrap(), g);
    }

    #[test]
    fn order_divides_and_is_minimal(g in portrait(3, 3)) {
        let o = element_order(&g);
        prop_assert!(g.pow(o as i64).is_identity());
        prop_assert!(o == 1 || !g.pow((o / 3) as i64).is_identity());
    }

    #[test]
    fn socles_of_coprime_powers_agree(x in element_of(periodic_ctx()), m in 1i64..25) {
        prop_assume!(m % 5 != 0 && !x.is_identity());
        let z = socle(&x).unwrap();
        let zm = socle(&x.pow(m)).unwrap();
        prop_assert!((1..5).any(|u| z.pow(u) == zm));
    }

    #[test]
    fn conjugation_preserves_membership_and_order(z in element_of(periodic_ctx()), g in element_of(periodic_ctx())) {
        prop_assume!(!z.is_identity());
        prop_assert!(periodic_ctx().contains(&z.conjugate_by(&g)));
        prop_assert_eq!(element_order(&z), element_order(&z.conjugate_by(&g)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 120, failure_persistence: None, ..ProptestConfig::default() })]

    /// The invariant rungs never contradict a full orbit search.
    #[test]
    fn ladder_agrees_with_orbit_search(
        x in element_of_tower(),
        y in element_of_tower(),
    ) {
        let tower = constant_tower();
        let full = certify_pair(tower, &x, &y, &CertifyOptions::default());
        let bare = certify_pair(tower, &x, &y, &CertifyOptions {
            invariants: false,
            lifting: false,
            quotients: false,
            ..CertifyOptions::default()
        });
        prop_assert_ne!(bare.verdict, PairVerdict::Undecided);
        prop_assert_eq!(full.verdict, bare.verdict);
    }

    #[test]
    fn a_conjugate_is_never_certified_disjoint(x in element_of_tower(), g in element_of_tower(), u in 1i64..3) {
        prop_assume!(!x.is_identity());
        let out = certify_pair(constant_tower(), &x, &x.conjugate_by(&g).pow(u), &CertifyOptions::default());
        prop_assert_eq!(out.verdict, PairVerdict::Intersect);
    }
}

fn element_of_tower() -> impl Strategy<Value = Portrait> {
    let ctx = constant_tower().top();
    let n = ctx.generators().len();
    proptest::collection::vec((0..n, 1..ctx.p()), 1..20).prop_map(move |word| {
        word.iter().fold(ctx.identity(), |acc, &(i, e)| {
            acc.mul(&ctx.generators()[i].pow(i64::from(e)))
        })
    })
}
