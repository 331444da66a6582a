use dpcyl::rational::{q, qf, Q};
use dpcyl::sample::random_ample;
use dpcyl::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::sync::OnceLock;

fn class(k: usize) -> impl Strategy<Value = DivisorClass> {
    prop::collection::vec((-20i64..=20, 1i64..=6), k + 1)
        .prop_map(|v| DivisorClass::new(v.into_iter().map(|(n, d)| qf(n, d)).collect()).unwrap())
}

fn rational() -> impl Strategy<Value = Q> {
    (-30i64..=30, 1i64..=7).prop_map(|(n, d)| qf(n, d))
}

fn surfaces() -> &'static Vec<(String, SurfaceModel)> {
    static S: OnceLock<Vec<(String, SurfaceModel)>> = OnceLock::new();
    S.get_or_init(|| {
        catalog()
            .into_iter()
            .map(|e| (e.key(), e.surface().unwrap()))
            .filter(|(_, s)| s.rho() > 1)
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pair_is_symmetric_and_bilinear(a in class(5), b in class(5), c in class(5), t in rational()) {
        prop_assert_eq!(a.dot(&b), b.dot(&a));
        let mut at = a.clone();
        at.add_scaled(&t, &c);
        prop_assert_eq!(at.dot(&b), a.dot(&b) + &t * c.dot(&b));
        prop_assert_eq!(pair(&a, &b).unwrap(), a.dot(&b));
    }

    #[test]
    fn pullback_is_orthogonal_and_idempotent(idx in 0usize..40, seed in any::<u64>()) {
        let (_, s) = &surfaces()[idx % surfaces().len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = DivisorClass::from_ints(
            &(0..=s.k()).map(|_| rand::Rng::gen_range(&mut rng, -5..=5)).collect::<Vec<i64>>(),
        );
        let p = mumford_pullback(s, &c).unwrap();
        prop_assert!(s.roots().iter().all(|r| p.rep.dot(r) == q(0)));
        prop_assert_eq!(mumford_pullback(s, &p.rep).unwrap(), p.clone());
        // The difference is supported on the roots, so it pairs to zero with H.
        let h = dpcyl::surface::anticanonical(s);
        prop_assert_eq!(c.dot(&h.rep), p.rep.dot(&h.rep));
    }

    #[test]
    fn coords_round_trip(idx in 0usize..40, seed in any::<u64>()) {
        let (key, s) = &surfaces()[idx % surfaces().len()];
        let Ok(fib) = select_fibration(s) else { return Ok(()) };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_ample(s, &mut rng, 6, 100_000).unwrap();
        let ad = coords_of(s, &fib, &h).unwrap();
        prop_assert_eq!(ad.reconstruct(s, &fib).unwrap(), h, "{}", key);
        prop_assert!(ad.b.iter().all(|b| b < &q(0)));
        if fib.n >= 2 {
            prop_assert_eq!(ad.a0, q(0));
        }
    }

    #[test]
    fn any_coefficient_perturbation_breaks_equivalence(
        idx in 0usize..40,
        seed in any::<u64>(),
        pick in any::<usize>(),
        delta in rational().prop_filter("nonzero", |d| d != &q(0)),
    ) {
        let (key, s) = &surfaces()[idx % surfaces().len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_ample(s, &mut rng, 6, 100_000).unwrap();
        let cert = construct_cylinder(s, &h).unwrap();
        let mut bad = cert.clone();
        let i = pick % bad.support.len();
        // Only curves with a non-zero image on S carry a detectable coefficient.
        prop_assume!(!s.is_root(&bad.support[i].class));
        bad.support[i].coeff += delta;
        let report = verify_certificate(s, &h, &bad);
        prop_assert!(!report.equivalence_ok, "{} {}", key, cert.lemma);
        prop_assert!(!report.accepted());
    }

    #[test]
    fn epsilon_is_strictly_inside(bounds in prop::collection::vec((1i64..50, 1i64..9), 0..6)) {
        let bounds: Vec<Q> = bounds.into_iter().map(|(n, d)| qf(n, d)).collect();
        let e = choose_epsilon(&bounds).unwrap();
        prop_assert!(e > q(0));
        prop_assert!(bounds.iter().all(|b| &e < b));
    }
}

#[test]
fn enumeration_is_closed_under_permuting_points() {
    for (k, sq, kd) in [(5, -1, -1), (6, -1, -1), (6, -2, 0), (5, 0, -2)] {
        let all: BTreeSet<DivisorClass> = enumerate_classes(k, sq, kd).unwrap().into_iter().collect();
        for c in &all {
            assert_eq!(c.self_int(), q(sq));
            assert_eq!(c.dot(&canonical_class(k).unwrap()), q(kd));
            for i in 1..k {
                let mut v = c.coeffs().to_vec();
                v.swap(i, i + 1);
                assert!(all.contains(&DivisorClass::new(v).unwrap()));
            }
        }
    }
}

#[test]
fn enumeration_is_sorted() {
    let v = enumerate_classes(6, -1, -1).unwrap();
    assert!(v.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn catalog_json_round_trip() {
    let entries = catalog();
    let text = catalog::to_json(&entries);
    let back = catalog::from_json(&text).unwrap();
    assert_eq!(back, entries);
    assert_eq!(catalog::to_json(&back), text);
}

#[test]
fn certificate_json_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (_, s) in surfaces().iter().step_by(5) {
        let h = random_ample(s, &mut rng, 6, 100_000).unwrap();
        let cert = construct_cylinder(s, &h).unwrap();
        let text = serde_json::to_string(&cert).unwrap();
        let back: CylinderCertificate = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cert);
    }
}

#[test]
fn sampler_is_reproducible() {
    let s = catalog_surface(3, "A2+2A1", None).unwrap();
    let draw = |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..5).map(|_| random_ample(&s, &mut rng, 6, 100_000).unwrap()).collect::<Vec<_>>()
    };
    assert_eq!(draw(3), draw(3));
    assert_ne!(draw(3), draw(4));
}
