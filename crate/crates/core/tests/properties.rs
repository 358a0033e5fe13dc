use freevis_core::morphism::is_primitive;
use freevis_core::{
    ball, dist_basis, gromov_product, sigma, Basis, Endomorphism, GeneratingSet, Letter,
    StallingsGraph, VisualMetricSpec, Word,
};
use proptest::prelude::*;

fn letters(rank: usize, max: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((0..rank, any::<bool>()), 0..=max)
        .prop_map(|v| v.into_iter().map(|(g, inv)| Letter::new(g, inv)).collect())
}

fn word(rank: usize, max: usize) -> impl Strategy<Value = Word> {
    letters(rank, max).prop_map(Word::reduce)
}

fn endo(rank: usize, max: usize) -> impl Strategy<Value = Endomorphism> {
    prop::collection::vec(word(rank, max), rank)
        .prop_map(move |images| Endomorphism::new(Basis::standard(rank), images).unwrap())
}

/// Product of Nielsen generators and inner automorphisms, by index.
fn automorphism(steps: &[(u8, Word)]) -> Endomorphism {
    let b = Basis::standard(2);
    let gens = Endomorphism::nielsen_generators(&b).unwrap();
    let mut phi = Endomorphism::identity(&b);
    for (k, x) in steps {
        let next = match k % 4 {
            3 => Endomorphism::inner(&b, x).unwrap(),
            i => gens[i as usize].clone(),
        };
        phi = phi.compose(&next).unwrap();
    }
    phi
}

/// Naive reduction by repeated deletion of the leftmost cancelling pair.
fn naive_reduce(mut v: Vec<Letter>) -> Vec<Letter> {
    while let Some(i) = v.windows(2).position(|w| w[0] == w[1].inverse()) {
        v.drain(i..i + 2);
    }
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn reduction_matches_naive(raw in letters(3, 30)) {
        let w = Word::reduce(raw.clone());
        prop_assert_eq!(w.letters(), &naive_reduce(raw)[..]);
    }

    #[test]
    fn group_laws(u in word(3, 12), v in word(3, 12), w in word(3, 12)) {
        prop_assert_eq!(&(&u * &v) * &w, &u * &(&v * &w));
        prop_assert!((&u * &u.inverse()).is_identity());
        prop_assert_eq!(u.inverse().inverse(), u.clone());
        prop_assert_eq!((&u * &v).inverse(), &v.inverse() * &u.inverse());
        let overlap = u.inverse().common_prefix_len(&v);
        prop_assert_eq!((&u * &v).len(), u.len() + v.len() - 2 * overlap);
    }

    #[test]
    fn cyclic_reduction(u in word(2, 14)) {
        let (core, conj) = u.cyclic_reduce();
        prop_assert!(core.is_cyclically_reduced());
        prop_assert_eq!(&(&conj.inverse() * &core) * &conj, u.clone());
        prop_assert_eq!(core.len(), u.cyclic_length());
    }

    #[test]
    fn powers(u in word(2, 6), m in -4i64..4, n in -4i64..4) {
        prop_assert_eq!(&u.pow(m) * &u.pow(n), u.pow(m + n));
    }

    #[test]
    fn conjugates_are_detected(u in word(2, 8), c in word(2, 6), d in word(2, 6)) {
        prop_assert!(u.is_conjugate(&u.conjugate_by(&c)));
        let v = u.conjugate_by(&d);
        prop_assert_eq!(u.conjugate_by(&c).conjugacy_key(), v.conjugacy_key());
    }

    #[test]
    fn homomorphism(phi in endo(3, 5), u in word(3, 10), v in word(3, 10)) {
        let lhs = phi.apply(&(&u * &v)).unwrap();
        let rhs = &phi.apply(&u).unwrap() * &phi.apply(&v).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(phi.apply(&u.inverse()).unwrap(), phi.apply(&u).unwrap().inverse());
    }

    #[test]
    fn composition_is_a_right_action(phi in endo(2, 4), psi in endo(2, 4), u in word(2, 8)) {
        let both = phi.compose(&psi).unwrap();
        prop_assert_eq!(both.apply(&u).unwrap(), psi.apply(&phi.apply(&u).unwrap()).unwrap());
    }

    #[test]
    fn inner_automorphisms(x in word(2, 6), y in word(2, 6), g in word(2, 10)) {
        let b = Basis::standard(2);
        let lx = Endomorphism::inner(&b, &x).unwrap();
        let ly = Endomorphism::inner(&b, &y).unwrap();
        prop_assert_eq!(lx.apply(&g).unwrap(), &(&x.inverse() * &g) * &x);
        prop_assert_eq!(lx.compose(&ly).unwrap(), Endomorphism::inner(&b, &(&x * &y)).unwrap());
        prop_assert!(lx.is_automorphism());
    }

    #[test]
    fn folding_ignores_generator_order(gens in prop::collection::vec(word(2, 6), 1..4), probe in word(2, 8)) {
        let forward = StallingsGraph::new(2, &gens);
        let rev: Vec<Word> = gens.iter().rev().map(Word::inverse).collect();
        let backward = StallingsGraph::new(2, &rev);
        prop_assert_eq!(forward.vertex_count(), backward.vertex_count());
        prop_assert_eq!(forward.edge_count(), backward.edge_count());
        prop_assert_eq!(forward.contains(&probe), backward.contains(&probe));
        let product = gens.iter().fold(Word::identity(), |acc, g| &acc * g);
        prop_assert!(forward.contains(&product));
        prop_assert!(forward.contains(&product.inverse()));
    }

    #[test]
    fn inversion(steps in prop::collection::vec((0u8..4, word(2, 3)), 0..8)) {
        let phi = automorphism(&steps);
        prop_assert!(phi.is_automorphism());
        let inv = phi.invert().unwrap();
        prop_assert!(phi.compose(&inv).unwrap().is_identity());
        prop_assert!(inv.compose(&phi).unwrap().is_identity());
    }

    #[test]
    fn basis_metric(g in word(2, 10), h in word(2, 10), k in word(2, 10)) {
        prop_assert_eq!(dist_basis(&g, &h), dist_basis(&h, &g));
        prop_assert_eq!(dist_basis(&g, &h) == 0, g == h);
        prop_assert!(dist_basis(&g, &k) <= dist_basis(&g, &h) + dist_basis(&h, &k));
        // left invariance
        prop_assert_eq!(dist_basis(&(&k * &g), &(&k * &h)), dist_basis(&g, &h));
    }

    #[test]
    fn generating_set_sandwich(g in word(2, 7), h in word(2, 7)) {
        let b = Basis::standard(2);
        let s = GeneratingSet::parse_members(&b, "a, b, a^2 b, a^3 b").unwrap();
        let d = s.dist(&g, &h, 10_000_000).unwrap();
        let db = dist_basis(&g, &h);
        // every member has basis length at most 4
        prop_assert!(d <= db && db <= 4 * d);
        prop_assert_eq!(d, s.dist(&h, &g, 10_000_000).unwrap());
    }

    #[test]
    fn gromov_product_bounds(g in word(2, 8), h in word(2, 8), p in word(2, 4)) {
        let b = Basis::standard(2);
        let spec = VisualMetricSpec::new(GeneratingSet::basis(&b), p.clone(), freevis_core::Gamma::Ln2, 1.0).unwrap();
        let x = gromov_product(&spec, &g, &h).unwrap();
        let lo = freevis_core::Rational::from_integer(0);
        let hi = dist_basis(&p, &g).min(dist_basis(&p, &h)) as i64;
        prop_assert!(x >= lo && x <= freevis_core::Rational::from_integer(hi));
        prop_assert_eq!(x, gromov_product(&spec, &h, &g).unwrap());
    }

    #[test]
    fn prefix_metric_is_an_ultrametric(g in word(2, 8), h in word(2, 8), k in word(2, 8)) {
        let spec = VisualMetricSpec::standard(&Basis::standard(2));
        let s = |x: &Word, y: &Word| sigma(&spec, x, y).unwrap().upper();
        prop_assert!(s(&g, &k) <= s(&g, &h).max(s(&h, &k)));
        if g != h {
            let exact = 2f64.powi(-(g.common_prefix_len(&h) as i32));
            prop_assert_eq!(s(&g, &h), exact);
        }
    }
}

/// `u ~ v` by brute force over conjugators of length at most `|u| + |v|`.
fn conjugate_by_search(u: &Word, v: &Word, pool: &[Word]) -> bool {
    let bound = u.len() + v.len();
    pool.iter()
        .take_while(|c| c.len() <= bound)
        .any(|c| &u.conjugate_by(c) == v)
}

#[test]
fn conjugacy_matches_brute_force() {
    let words = ball(2, 3);
    let pool = ball(2, 6);
    for u in &words {
        for v in &words {
            assert_eq!(
                u.is_conjugate(v),
                conjugate_by_search(u, v, &pool),
                "{u:?} {v:?}"
            );
        }
    }
}

/// `u` is primitive iff some `v` completes it to a basis, found by folding.
fn has_complement(u: &Word, pool: &[Word]) -> bool {
    pool.iter()
        .any(|v| StallingsGraph::new(2, [u, v]).is_whole_group())
}

#[test]
fn primitivity_matches_folding() {
    let pool = ball(2, 5);
    for u in ball(2, 5) {
        assert_eq!(is_primitive(&u, 2), has_complement(&u, &pool), "{u:?}");
    }
}
