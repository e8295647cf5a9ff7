use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use proptest::prelude::*;

use qinv::cli::{Meta, OutputRecord, RecordKind, SeriesRecord};
use qinv::invariants::{jones_closed, twist_exponent, TorusKnot};
use qinv::lattice::{dominant_reduce, weyl_elements, weyl_vector, Reduction};
use qinv::qseries::euler_product;
use qinv::wchars::{character_numerator, wchar_shifted, WCharParams};
use qinv::{Agreement, QSeries, WeightVector, Q};

fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

fn coeff(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Sparse series on the grid `1/6`, optionally truncated.
fn series() -> impl Strategy<Value = QSeries> {
    let terms = prop::collection::vec((0i64..60, -5i64..=5, 1i64..=3), 0..8);
    let trunc = prop::option::of(30i64..90);
    (terms, trunc).prop_map(|(terms, trunc)| {
        QSeries::from_terms(terms.into_iter().map(|(e, n, d)| (q(e, 6), coeff(n, d))), trunc.map(|t| q(t, 6)))
    })
}

/// Truncated series with constant term 1.
fn unit() -> impl Strategy<Value = QSeries> {
    (series(), 12i64..60).prop_map(|(s, t)| {
        let tail = QSeries::from_terms(s.terms().filter(|(e, _)| **e > q(0, 1)).map(|(e, c)| (*e, c.clone())), None);
        QSeries::exact_one().add(&tail).truncate(q(t, 6))
    })
}

fn dominant_weight() -> impl Strategy<Value = WeightVector> {
    (2usize..=4)
        .prop_flat_map(|r| prop::collection::vec(0i64..4, r - 1))
        .prop_map(|a| WeightVector::from_fundamental(a.len() + 1, &a).unwrap())
}

fn agree(a: &QSeries, b: &QSeries) -> bool {
    a.agreement_order(b) == Agreement::Full
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn addition_is_commutative_and_associative(a in series(), b in series(), c in series()) {
        prop_assert!(agree(&(a.add(&b)), &b.add(&a)));
        prop_assert!(agree(&a.add(&b).add(&c), &a.add(&b.add(&c))));
        prop_assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn multiplication_is_a_ring_product(a in series(), b in series(), c in series()) {
        prop_assert!(agree(&a.mul(&b), &b.mul(&a)));
        prop_assert!(agree(&a.mul(&b).mul(&c), &a.mul(&b.mul(&c))));
        prop_assert!(agree(&a.mul(&b.add(&c)), &a.mul(&b).add(&a.mul(&c))));
        prop_assert!(agree(&a.mul(&QSeries::exact_one()), &a));
    }

    #[test]
    fn division_inverts_multiplication(a in series(), b in unit()) {
        let product = a.mul(&b);
        let quotient = product.div_by_unit(&b).unwrap();
        prop_assert!(agree(&quotient, &a));
        prop_assert!(agree(&quotient.mul(&b), &product));
    }

    #[test]
    fn truncation_only_drops_high_terms(a in series(), t in 0i64..90) {
        let t = q(t, 6);
        let cut = a.truncate(t);
        prop_assert!(cut.terms().all(|(e, _)| *e < t));
        prop_assert!(agree(&cut, &a));
        prop_assert!(cut.trunc().unwrap() <= t);
    }

    #[test]
    fn shift_is_additive(a in series(), s in -12i64..12, u in -12i64..12) {
        let lhs = a.shift(q(s, 6)).shift(q(u, 6));
        prop_assert_eq!(lhs, a.shift(q(s + u, 6)));
        prop_assert_eq!(a.shift(q(s, 6)).shift(q(-s, 6)), a);
    }

    #[test]
    fn series_records_round_trip(a in series()) {
        let record = SeriesRecord::from_series(&a);
        prop_assert_eq!(record.to_series().unwrap(), a.clone());
        let json = serde_json::to_string(&record).unwrap();
        let back: SeriesRecord = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back.to_series().unwrap(), a.clone());

        let out = OutputRecord {
            kind: RecordKind::Series,
            meta: Meta {
                tool: "qinv".into(),
                version: "0".into(),
                command: "jones".into(),
                parameters: serde_json::json!({ "r": 2 }),
                truncation: a.trunc().map(|t| t.to_string()),
                timestamp: None,
            },
            payload: serde_json::json!({ "series": record }),
        };
        let text = serde_json::to_string(&out).unwrap();
        let parsed: OutputRecord = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(parsed.series().unwrap().unwrap(), a);
    }

    #[test]
    fn twist_matches_shifted_norm(lambda in dominant_weight()) {
        let delta = weyl_vector(lambda.rank());
        let shifted = WeightVector::new(
            lambda.coords().iter().zip(delta.coords()).map(|(a, b)| a + b).collect(),
        ).unwrap();
        let expected = (shifted.norm_sq() - delta.norm_sq()) / Q::from_integer(2);
        prop_assert_eq!(twist_exponent(&lambda), expected);
    }

    #[test]
    fn weyl_group_preserves_the_form(lambda in dominant_weight(), seed in any::<usize>()) {
        let r = lambda.rank();
        let group = weyl_elements(r).unwrap();
        let w = &group[seed % group.len()];
        let image = w.act(&lambda).unwrap();
        prop_assert_eq!(image.norm_sq(), lambda.norm_sq());
        let delta = weyl_vector(r);
        prop_assert_eq!(image.inner(&w.act(&delta).unwrap()).unwrap(), lambda.inner(&delta).unwrap());

        let moved = WeightVector::new(
            image.coords().iter().zip(w.act(&delta).unwrap().coords()).map(|(a, b)| a + b).collect(),
        ).unwrap();
        match dominant_reduce(&moved).unwrap() {
            Reduction::Chamber { u, dominant } => {
                prop_assert!(dominant.is_regular_dominant());
                prop_assert_eq!(dominant.norm_sq(), moved.norm_sq());
                prop_assert_eq!(u.act(&dominant).unwrap(), moved);
            }
            Reduction::Boundary => prop_assert!(false, "lambda + delta is regular"),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn jones_truncations_are_consistent(r in 2usize..=3, n in 0usize..=3, lo in 4i64..15, extra in 1i64..10) {
        let knot = TorusKnot::new(2, 5).unwrap();
        let short = jones_closed(r, knot, n, Q::from_integer(lo)).unwrap();
        let long = jones_closed(r, knot, n, Q::from_integer(lo + extra)).unwrap();
        prop_assert_eq!(long.truncate(Q::from_integer(lo)), short);
    }

    #[test]
    fn character_numerator_truncations_are_consistent(
        shift in prop::collection::vec(-2i64..=2, 2),
        lo in 5i64..20,
        extra in 1i64..15,
    ) {
        let mu = WeightVector::from_simple_roots(3, &[Q::from_integer(shift[0]), Q::from_integer(shift[1])]).unwrap();
        let params = WCharParams::vacuum(3, 3, 4).unwrap().with_shift(mu).unwrap();
        let short = character_numerator(&params, Q::from_integer(lo)).unwrap();
        let long = character_numerator(&params, Q::from_integer(lo + extra)).unwrap();
        prop_assert_eq!(long.truncate(Q::from_integer(lo)), short);
    }

    #[test]
    fn root_lattice_shifts_leave_characters_fixed(a in -3i64..=3, b in -3i64..=3) {
        let base = WCharParams::vacuum(3, 4, 5).unwrap();
        let beta = WeightVector::from_simple_roots(3, &[Q::from_integer(a), Q::from_integer(b)]).unwrap();
        let shifted = wchar_shifted(&base.clone().with_shift(beta).unwrap(), Q::from_integer(25)).unwrap();
        prop_assert_eq!(shifted, wchar_shifted(&base, Q::from_integer(25)).unwrap());
    }
}

#[test]
fn partition_generating_function_is_positive() {
    let t = Q::from_integer(60);
    let partitions = QSeries::one(t).div_by_unit(&euler_product(t)).unwrap();
    assert!(partitions.terms().all(|(_, c)| c.is_positive()));
    assert_eq!(partitions.coeff(Q::from_integer(10)), coeff(42, 1));
    assert_eq!(partitions.coeff(Q::from_integer(50)), coeff(204226, 1));
}
