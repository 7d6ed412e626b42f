mod common;

use bellforge::bellpoly::{Assignment, BellPolynomial, ExtendedPolynomial, Monomial, Scenario};
use bellforge::catalog::{self, CoefficientVariant};
use bellforge::lhvlab::{self, SnClass};
use bellforge::Rational;
use proptest::prelude::*;

fn entries() -> Vec<(String, ExtendedPolynomial, ExtendedPolynomial)> {
    let mut out: Vec<_> = catalog::entries()
        .unwrap()
        .iter()
        .map(|e| {
            (
                e.name.to_string(),
                e.polynomial.as_extended().clone(),
                e.class_function(),
            )
        })
        .collect();
    let (shift, scale) = catalog::i42_class_form();
    for v in CoefficientVariant::CONCRETE {
        let p = catalog::i42(v).unwrap();
        let f = p.affine(&shift, &scale);
        out.push((format!("i42 {v}"), p.into_extended(), f.into_extended()));
    }
    out
}

#[test]
fn catalog_spectra_and_bounds_match_brute_force() {
    for (name, p, f) in entries() {
        let oracle = common::spectrum(&p);
        let lib = lhvlab::enumerate_roots(&p).unwrap();
        assert_eq!(lib.entries, oracle, "{name}");
        assert_eq!(lib.total, common::count(p.scenario()), "{name}");
        let (lo, hi) = lhvlab::lhv_bound(&p).unwrap();
        assert_eq!(&lo, oracle.keys().next().unwrap(), "{name}");
        assert_eq!(&hi, oracle.keys().last().unwrap(), "{name}");

        let roots: Vec<Rational> = common::spectrum(&f).into_keys().collect();
        let expected = match common::grid_class(&roots) {
            Some(n) => SnClass::classified(n),
            None => SnClass::Unclassified { n_max: 64 },
        };
        assert_eq!(lhvlab::classify(&f).unwrap(), expected, "{name}");
    }
}

#[test]
fn catalog_facets_match_rational_elimination() {
    let cases: Vec<(&str, BellPolynomial)> = vec![
        ("chsh", catalog::chsh()),
        ("mabk3", catalog::mabk(3).unwrap()),
        ("unitp3", catalog::unit_partner(3).unwrap()),
        ("i33", catalog::i33()),
        ("i42", catalog::i42(CoefficientVariant::Canonical).unwrap()),
        (
            "i42 printed",
            catalog::i42(CoefficientVariant::Printed).unwrap(),
        ),
        ("i42p", catalog::i42prime()),
    ];
    for (name, p) in cases {
        let s = p.scenario();
        let (_, hi) = lhvlab::lhv_bound(&p).unwrap();
        let (count, rank) = common::saturating_affine_rank(p.extended(), &hi);
        let r = lhvlab::is_tight(&p, &hi).unwrap();
        let dim = common::correlators(s).len() as i64;
        assert_eq!(r.saturating_count, count as u64, "{name}");
        assert_eq!(r.affine_rank, rank, "{name}");
        assert_eq!(r.polytope_dim, dim, "{name}");
        assert_eq!(r.is_facet, rank == dim - 1, "{name}");
    }
}

#[test]
fn vertex_vectors_match_direct_products() {
    let s = Scenario::new(3, 2).unwrap();
    let idx = common::correlators(s);
    for n in [0u64, 5, 37, 63] {
        let x = common::outcomes(s, n);
        let values: Vec<Vec<i8>> = x
            .iter()
            .map(|row| row.iter().map(|&v| v as i8).collect())
            .collect();
        let a = Assignment::from_values(s, &values).unwrap();
        let v = lhvlab::vertex_vector(&a);
        let oracle = common::correlation_vector(s, &x);
        for (i, ix) in idx.iter().enumerate() {
            assert_eq!(v.get(&Monomial::from_index(ix)), Rational::from(oracle[i]));
        }
    }
}

fn small_polynomial() -> impl Strategy<Value = BellPolynomial> {
    (1usize..=3, 1usize..=2).prop_flat_map(|(n, m)| {
        let s = Scenario::new(n, m).unwrap();
        let width = common::correlators(s).len();
        (
            proptest::collection::vec((-4i64..=4, 1i64..=4), width + 1),
            Just(s),
        )
            .prop_map(|(coeffs, s)| {
                let mut idx = vec![vec![0usize; s.parties()]];
                idx.extend(common::correlators(s));
                BellPolynomial::from_index_terms(
                    s,
                    idx.into_iter()
                        .zip(coeffs)
                        .map(|(i, (a, b))| (i, Rational::new(a, b))),
                )
                .unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_polynomials_agree_with_the_oracle(p in small_polynomial()) {
        let oracle = common::spectrum(p.extended());
        prop_assert_eq!(&lhvlab::enumerate_roots(&p).unwrap().entries, &oracle);
        let (lo, hi) = lhvlab::lhv_bound(&p).unwrap();
        prop_assert_eq!(&lo, oracle.keys().next().unwrap());
        prop_assert_eq!(&hi, oracle.keys().last().unwrap());
        let (count, rank) = common::saturating_affine_rank(p.extended(), &hi);
        let r = lhvlab::is_tight(&p, &hi).unwrap();
        prop_assert_eq!(r.saturating_count, count as u64);
        prop_assert_eq!(r.affine_rank, rank);
    }

    #[test]
    fn mixtures_stay_inside_the_bounds(
        p in small_polynomial(),
        picks in proptest::collection::vec((0u64..64, 1i64..10), 1..6),
    ) {
        let s = p.scenario();
        let total: i64 = picks.iter().map(|(_, w)| w).sum();
        let mixture: Vec<(Rational, Assignment)> = picks
            .iter()
            .map(|&(n, w)| {
                let bits = n % common::count(s);
                (Rational::new(w, total), Assignment::from_bits(s, bits).unwrap())
            })
            .collect();
        let v = lhvlab::lhv_expectation(&p, &mixture).unwrap();
        let (lo, hi) = lhvlab::lhv_bound(&p).unwrap();
        prop_assert!(lo <= v && v <= hi);
    }
}
