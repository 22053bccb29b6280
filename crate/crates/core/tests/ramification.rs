mod common;

use common::*;
use multiegs::generators::GeneratorPortraits;
use multiegs::permgroup::{GroupElement, Tower};
use multiegs::ramification::{
    build_tuples, certify_pair, replay_report, verify_ramification, CaseChoice, CertificateKind,
    CertifyOptions, PairVerdict, SphericalSystem, TupleError, TupleOptions, Verdict, VerifyOptions,
};
use multiegs::{DefiningDatum, GroupContext, Word};

fn words(list: &[&str]) -> Vec<Word> {
    list.iter().map(|w| w.parse().unwrap()).collect()
}

#[test]
fn reports_replay_to_their_verdicts() {
    for (datum, k) in [
        (constant_p3(), 3),
        (nonperiodic_p5(), 3),
        (periodic_p5(), 3),
        (symmetric_p5(), 4),
    ] {
        let report = verify_ramification(&datum, k, &VerifyOptions::default()).unwrap();
        assert_eq!(report.verdict, Verdict::Verified);
        assert!(replay_report(&datum, &report), "{}", report.to_text());
    }
}

#[test]
fn reports_are_byte_identical_across_runs_and_thread_counts() {
    let datum = periodic_p5();
    let one = verify_ramification(&datum, 3, &VerifyOptions::default()).unwrap();
    let again = verify_ramification(&datum, 3, &VerifyOptions::default()).unwrap();
    let threaded = verify_ramification(
        &datum,
        3,
        &VerifyOptions {
            threads: 4,
            ..VerifyOptions::default()
        },
    )
    .unwrap();
    assert_eq!(one.to_json(), again.to_json());
    assert_eq!(one.to_json(), threaded.to_json());
    assert!(!one.to_json().contains("wall_time"));
}

#[test]
fn products_close_up_in_every_tuple() {
    for (datum, k) in [
        (constant_p3(), 3),
        (nonperiodic_p5(), 3),
        (periodic_p5(), 3),
        (symmetric_p5(), 4),
    ] {
        let pair = build_tuples(&datum, k, &TupleOptions::default()).unwrap();
        let ctx = GroupContext::new(&datum, k);
        for (n, system) in [(1, &pair.t1), (2, &pair.t2)] {
            system.validate(&ctx, n).unwrap();
            let prod = system
                .extended()
                .iter()
                .fold(ctx.identity(), |acc, x| acc.mul(x));
            assert!(prod.is_identity());
            assert_eq!(
                &Word::product(system.words()).reduce_mod(datum.p()),
                system.product()
            );
        }
    }
}

#[test]
fn nonperiodic_multi_ggs_tuples_start_with_the_listed_entries() {
    let pair = build_tuples(&nonperiodic_p5(), 3, &TupleOptions::default()).unwrap();
    let t1: Vec<String> = pair.t1.words().iter().map(Word::to_string).collect();
    let t2: Vec<String> = pair.t2.words().iter().map(Word::to_string).collect();
    assert_eq!(t1[..2], ["a^-1", "a b1.1"]);
    assert_eq!(t2[1], "b1.1");
    // the second generator is rescaled so that only b_1 has nonzero sum
    assert_eq!(pair.basis[1].to_string(), "b1.1^4 b1.2");
}

#[test]
fn user_basis_is_honoured_or_rejected() {
    let options = TupleOptions {
        case: CaseChoice::Auto,
        basis: Some(vec![vec![1, 0], vec![4, 1]]),
    };
    let pair = build_tuples(&periodic_p5(), 3, &options).unwrap();
    assert_eq!(pair.basis[1].to_string(), "b1.1^4 b1.2");
    let singular = TupleOptions {
        case: CaseChoice::Auto,
        basis: Some(vec![vec![1, 1], vec![2, 2]]),
    };
    assert_eq!(
        build_tuples(&periodic_p5(), 3, &singular).unwrap_err(),
        TupleError::BadBasis { r: 2 }
    );
    // the identity basis fails the vanishing property at level 2
    let identity = TupleOptions {
        case: CaseChoice::Auto,
        basis: Some(vec![vec![1, 0], vec![0, 1]]),
    };
    assert!(matches!(
        build_tuples(&periodic_p5(), 3, &identity),
        Err(TupleError::NotDistinguished { .. })
    ));
}

#[test]
fn tuple_construction_guards() {
    assert_eq!(
        build_tuples(&gupta_sidki(), 3, &TupleOptions::default()).unwrap_err(),
        TupleError::Ggs
    );
    assert_eq!(
        build_tuples(&periodic_p5(), 2, &TupleOptions::default()).unwrap_err(),
        TupleError::BelowThreshold { k: 2, threshold: 3 }
    );
    let forced = TupleOptions {
        case: CaseChoice::Periodic,
        basis: None,
    };
    assert_eq!(
        build_tuples(&constant_p3(), 3, &forced).unwrap_err(),
        TupleError::PeriodicNeedsLargerPrime
    );
    let nonperiodic = TupleOptions {
        case: CaseChoice::NonPeriodic,
        basis: None,
    };
    assert_eq!(
        build_tuples(&periodic_p5(), 3, &nonperiodic).unwrap_err(),
        TupleError::NoNonZeroSum
    );
    let mixed = DefiningDatum::new(
        5,
        [(1, vec![vec![1, 4, 0, 0]]), (2, vec![vec![1, 0, 0, 0]])]
            .into_iter()
            .collect(),
    );
    assert!(matches!(
        build_tuples(&mixed, 4, &TupleOptions::default()),
        Err(TupleError::NoExplicitTuple(_))
    ));
}

#[test]
fn spherical_validation_catches_bad_tuples() {
    let datum = constant_p3();
    let ctx = GroupContext::new(&datum, 3);
    let gens = GeneratorPortraits::new(&datum, 3);
    let dropped = SphericalSystem::new(words(&["b1.1", "b2.1^-1"]), &gens);
    assert!(matches!(
        dropped.validate(&ctx, 1),
        Err(TupleError::NonGenerating { .. })
    ));
    let trivial = SphericalSystem::new(words(&["a b1.1 b2.1^-1", "a^3", "b1.1", "b2.1^-1"]), &gens);
    assert_eq!(
        trivial.validate(&ctx, 1),
        Err(TupleError::TrivialEntry { tuple: 1, index: 1 })
    );
}

#[test]
fn rooted_element_is_separated_by_depth() {
    let datum = periodic_p5();
    let tower = Tower::new(&datum, 3);
    let gens = GeneratorPortraits::new(&datum, 3);
    let x = gens.eval(&"a^-1".parse().unwrap()).unwrap();
    let y = gens.eval(&"a b1.1^2".parse().unwrap()).unwrap();
    let out = certify_pair(&tower, &x, &y, &CertifyOptions::default());
    assert_eq!(out.certificate, Some(CertificateKind::Depth));
}

#[test]
fn independent_directed_generators_are_separated_by_abelianization() {
    let datum = nonperiodic_p5();
    let tower = Tower::new(&datum, 3);
    let gens = GeneratorPortraits::new(&datum, 3);
    let x = gens.eval(&"b1.2".parse().unwrap()).unwrap();
    let y = gens.eval(&"b1.1^2".parse().unwrap()).unwrap();
    let out = certify_pair(&tower, &x, &y, &CertifyOptions::default());
    assert_eq!(out.verdict, PairVerdict::Disjoint);
    assert_eq!(out.certificate, Some(CertificateKind::Abelianization));
}

#[test]
fn powers_of_a_b1_need_an_exact_search() {
    let datum = periodic_p5();
    let tower = Tower::new(&datum, 3);
    let gens = GeneratorPortraits::new(&datum, 3);
    let x = gens.eval(&"a b1.1".parse().unwrap()).unwrap();
    let y = gens.eval(&"a b1.1^2".parse().unwrap()).unwrap();
    let out = certify_pair(&tower, &x, &y, &CertifyOptions::default());
    assert_eq!(out.verdict, PairVerdict::Disjoint);
    assert_eq!(out.certificate, Some(CertificateKind::OrbitExact));
    let capped = |cap| {
        certify_pair(
            &tower,
            &x,
            &y,
            &CertifyOptions {
                cap,
                ..CertifyOptions::default()
            },
        )
    };
    assert_eq!(capped(625).certificate, Some(CertificateKind::OrbitExact));
    let undecided = capped(300);
    assert_eq!(undecided.verdict, PairVerdict::Undecided);
    assert!(undecided.details.get("y_orbit_capped").is_some());
}

#[test]
fn refuted_when_the_tuples_share_a_conjugacy_class() {
    // both tuples of the constant datum contain b_1, so a doubled T1 must fail
    let datum = constant_p3();
    let tower = Tower::new(&datum, 3);
    let gens = GeneratorPortraits::new(&datum, 3);
    let x = gens.eval(&"b1.1".parse().unwrap()).unwrap();
    let y = gens.eval(&"a b1.1^2 a^-1".parse().unwrap()).unwrap();
    let out = certify_pair(&tower, &x, &y, &CertifyOptions::default());
    assert_eq!(out.verdict, PairVerdict::Intersect);
}
