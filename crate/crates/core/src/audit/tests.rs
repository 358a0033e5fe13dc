use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::word::{random_word, Basis, Word};

fn f2() -> Basis {
    Basis::standard(2)
}

fn w(s: &str) -> Word {
    f2().parse_word(s).unwrap()
}

fn endo(a: &str, b: &str) -> Endomorphism {
    Endomorphism::new(f2(), vec![w(a), w(b)]).unwrap()
}

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn spec() -> VisualMetricSpec {
    VisualMetricSpec::standard(&f2())
}

fn cfg() -> AuditConfig {
    AuditConfig::default()
}

/// Direct definition: max over unordered pairs of distinct elements.
fn naive_q_min(phi: &Endomorphism, p: Rational, radius: usize, base: &Word) -> Rational {
    let pts = crate::word::ball(phi.rank(), radius);
    let gp = |g: &Word, h: &Word| {
        let pi = base.inverse();
        (&pi * g).common_prefix_len(&(&pi * h)) as i64
    };
    let mut best = Rational::from_integer(0);
    let mut any = false;
    for (i, g) in pts.iter().enumerate() {
        for h in &pts[i + 1..] {
            let v = Rational::from_integer(gp(g, h))
                - p * Rational::from_integer(gp(&phi.apply(g).unwrap(), &phi.apply(h).unwrap()));
            if !any || v > best {
                best = v;
                any = true;
            }
        }
    }
    best
}

#[test]
fn identity_is_zero() {
    let id = Endomorphism::identity(&f2());
    for radius in 0..=4 {
        assert_eq!(
            q_min(&id, r(1, 1), radius, &spec(), &cfg()).unwrap(),
            r(0, 1)
        );
    }
    let f = frontier(&id, &default_grid(), &[1, 2, 3], &spec(), &cfg()).unwrap();
    assert_eq!(f.column(r(1, 1)).unwrap(), vec![r(0, 1); 3]);
    assert!(f.is_monotone());
}

#[test]
fn inner_ceiling() {
    let phi = Endomorphism::inner(&f2(), &w("a b")).unwrap();
    for radius in 0..=7 {
        assert!(q_min(&phi, r(1, 1), radius, &spec(), &cfg()).unwrap() <= r(6, 1));
    }
}

#[test]
fn collapse_witness() {
    let phi = endo("a", "a");
    for p in [1, 2, 4] {
        assert!(q_min(&phi, r(p, 1), 5, &spec(), &cfg()).unwrap() >= r(4, 1));
    }
    // the explicit witness pair
    let g = w("a b a^-2");
    let h = &g * &w("b");
    assert_eq!(g.common_prefix_len(&h), 4);
    assert_eq!(phi.apply(&g).unwrap(), Word::identity());
    assert_eq!(phi.apply(&h).unwrap(), w("a"));
}

#[test]
fn tree_walk_matches_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut maps = vec![
        endo("a", "a"),
        endo("a b", "b"),
        endo("a^2", "b^2"),
        endo("b^-1 a^-1 b", "b^-1 a^-1 b^-1 a b"),
        endo("1", "b a"),
    ];
    for _ in 0..6 {
        let a = random_word(2, rand::Rng::gen_range(&mut rng, 0..4), &mut rng);
        let b = random_word(2, rand::Rng::gen_range(&mut rng, 0..4), &mut rng);
        maps.push(Endomorphism::new(f2(), vec![a, b]).unwrap());
    }
    for phi in &maps {
        let fast = tree::gromov_table(phi, 4);
        for radius in 0..=4 {
            for p in [r(1, 3), r(1, 1), r(2, 1)] {
                assert_eq!(
                    fast.q_min(p, radius),
                    naive_q_min(phi, p, radius, &Word::identity()),
                    "{phi:?} P={p} R={radius}"
                );
            }
        }
    }
}

#[test]
fn tree_walk_rank_three_matches_scan() {
    let b = Basis::standard(3);
    let phi = Endomorphism::new(
        b.clone(),
        vec![
            b.parse_word("a b").unwrap(),
            b.parse_word("c^-1").unwrap(),
            b.parse_word("a").unwrap(),
        ],
    )
    .unwrap();
    let fast = tree::gromov_table(&phi, 3);
    let slow = scan::gromov_table(&phi, &Word::identity(), 3, &cfg()).unwrap();
    for radius in 0..=3 {
        for p in default_grid() {
            assert_eq!(fast.q_min(p, radius), slow.q_min(p, radius));
        }
    }
}

#[test]
fn basepoint_scan_matches_definition() {
    let phi = endo("a b", "b a^-1");
    let p = w("b a");
    let s = VisualMetricSpec::new(
        GeneratingSet::basis(&f2()),
        p.clone(),
        crate::metric::Gamma::Ln2,
        4.0,
    )
    .unwrap();
    for radius in 0..=3 {
        assert_eq!(
            q_min(&phi, r(1, 1), radius, &s, &cfg()).unwrap(),
            naive_q_min(&phi, r(1, 1), radius, &p)
        );
    }
}

#[test]
fn doubling_frontier() {
    let phi = endo("a^2", "b^2");
    let f = frontier(&phi, &default_grid(), &[1, 2, 3, 4, 5, 6], &spec(), &cfg()).unwrap();
    assert_eq!(f.column(r(1, 2)).unwrap(), vec![r(0, 1); 6]);
    assert!(f.is_monotone());
    let q = qie_frontier(&phi, &default_grid(), &[1, 2, 3, 4, 5], &cfg()).unwrap();
    assert_eq!(q.column(r(1, 2)).unwrap(), vec![r(0, 1); 5]);
    assert!(q.is_monotone());
}

#[test]
fn nielsen_multiplication_column_grows() {
    let phi = endo("a b", "b");
    let radii = [2, 3, 4, 5, 6];
    let f = frontier(&phi, &default_grid(), &radii, &spec(), &cfg()).unwrap();
    // grows by one every second radius
    let col = f.column(r(1, 1)).unwrap();
    assert_eq!(col, [1, 1, 2, 2, 3].map(Rational::from_integer));
    assert!(f.is_monotone());
}

#[test]
fn qie_examples() {
    let id = Endomorphism::identity(&f2());
    let q = qie_frontier(&id, &[r(1, 1)], &[1, 2, 3], &cfg()).unwrap();
    assert_eq!(q.column(r(1, 1)).unwrap(), vec![r(0, 1); 3]);
    let collapse = endo("a", "a");
    let q = qie_frontier(&collapse, &[r(1, 1), r(4, 1)], &[1, 2, 3, 4], &cfg()).unwrap();
    for p in [r(1, 1), r(4, 1)] {
        let col = q.column(p).unwrap();
        assert!(col.windows(2).all(|w| w[0] < w[1]), "{col:?}");
    }
}

#[test]
fn seminorm_examples() {
    let grid = default_grid();
    // Q_min(1, R) saturates at R = 2|x|, so P_hat settles one radius later
    let radii: Vec<usize> = (1..=6).collect();
    let inner = Endomorphism::inner(&f2(), &w("a")).unwrap();
    let est = estimate_seminorm(&inner, &grid, &radii, &spec(), &cfg()).unwrap();
    assert_eq!(est.value, SeminormValue::Finite(0.0));
    assert!(est.stabilized);
    assert_eq!(
        est.p_hat[3..],
        [(4, Some(r(2, 1))), (5, Some(r(1, 1))), (6, Some(r(1, 1)))]
    );

    let doubling = endo("a^2", "b^2");
    let est = estimate_seminorm(&doubling, &grid, &radii, &spec(), &cfg()).unwrap();
    assert_eq!(est.value, SeminormValue::Finite(0.0));
    assert_eq!(est.p_hat.last().unwrap().1, Some(r(1, 2)));

    let collapse = endo("a", "a");
    let est = estimate_seminorm(&collapse, &grid, &[3, 4, 5], &spec(), &cfg()).unwrap();
    assert_eq!(est.value, SeminormValue::Divergent);
    assert!(est.to_text().starts_with("seminorm: divergent\n"));
}

#[test]
fn dbar_examples() {
    let grid = default_grid();
    let radii = [1, 2, 3, 4, 5];
    let b = f2();
    let eps = Endomorphism::epsilon(&b);
    let d = pseudometric_dbar(&eps, &eps, &grid, &radii, &spec(), &cfg()).unwrap();
    assert_eq!(d.value, SeminormValue::Finite(0.0));
    let other = eps
        .compose(&Endomorphism::inner(&b, &w("a")).unwrap())
        .unwrap();
    let d = pseudometric_dbar(&eps, &other, &grid, &radii, &spec(), &cfg()).unwrap();
    assert_eq!(d.value, SeminormValue::Finite(0.0));

    let id = Endomorphism::identity(&b);
    let mult = endo("a b", "b");
    let d1 = pseudometric_dbar(&id, &mult, &grid, &radii, &spec(), &cfg()).unwrap();
    let d2 = pseudometric_dbar(&mult, &id, &grid, &radii, &spec(), &cfg()).unwrap();
    assert_eq!(d1.value, d2.value);
    if let SeminormValue::Finite(v) = d1.value {
        assert!(v >= 0.0);
    }
    assert!(pseudometric_dbar(&id, &endo("a", "a"), &grid, &radii, &spec(), &cfg()).is_err());
}

#[test]
fn metric_equivalence() {
    let b = f2();
    let basis = GeneratingSet::basis(&b);
    let f = metric_equiv_audit(&basis, &basis, &[r(1, 1)], &[1, 2, 3], &cfg()).unwrap();
    assert_eq!(f.column(r(1, 1)).unwrap(), vec![r(0, 1); 3]);

    let ab = GeneratingSet::parse_members(&b, "a, b, a b").unwrap();
    let f = metric_equiv_audit(&basis, &ab, &default_grid(), &[1, 2, 3, 4], &cfg()).unwrap();
    assert!(f.is_monotone());
    let col = f.column(r(2, 1)).unwrap();
    assert!(col.iter().all(|q| *q <= r(2, 1)), "{col:?}");

    let uv = GeneratingSet::parse_members(&b, "a, b, a^2 b, a^3 b").unwrap();
    let f = metric_equiv_audit(&basis, &uv, &default_grid(), &[1, 2, 3], &cfg()).unwrap();
    assert!(f.is_monotone());
}

#[test]
fn sampling_is_seeded_and_flagged() {
    let phi = endo("a b", "b a^-1");
    let p = w("a");
    let s = VisualMetricSpec::new(
        GeneratingSet::basis(&f2()),
        p,
        crate::metric::Gamma::Ln2,
        4.0,
    )
    .unwrap();
    let small = AuditConfig {
        pair_budget: 2_000,
        seed: 11,
        ..AuditConfig::default()
    };
    let radii = [1, 2, 3, 4, 5];
    let a = frontier(&phi, &default_grid(), &radii, &s, &small).unwrap();
    let b = frontier(&phi, &default_grid(), &radii, &s, &small).unwrap();
    assert!(a.sampled);
    assert_eq!(a, b);
    let exact = frontier(&phi, &default_grid(), &radii, &s, &cfg()).unwrap();
    assert!(!exact.sampled);
    // ball(2) has 17 elements, well within the pair budget
    assert_eq!(a.table[..2], exact.table[..2]);
    for (ra, re) in a.table.iter().zip(&exact.table) {
        for (qa, qe) in ra.iter().zip(re) {
            assert!(qa <= qe);
        }
    }
}

#[test]
fn csv_records() {
    let id = Endomorphism::identity(&f2());
    let f = frontier(&id, &[r(1, 2), r(1, 1)], &[0, 1], &spec(), &cfg()).unwrap();
    assert_eq!(
        f.to_csv(),
        "R,P_num,P_den,Qmin_num,Qmin_den\n0,1,2,0,1\n0,1,1,0,1\n1,1,2,0,1\n1,1,1,0,1\n"
    );
}

#[test]
fn argument_checks() {
    let id = Endomorphism::identity(&f2());
    assert!(frontier(&id, &[], &[1], &spec(), &cfg()).is_err());
    assert!(frontier(&id, &[r(1, 1)], &[2, 1], &spec(), &cfg()).is_err());
    let tiny = AuditConfig {
        node_budget: 10,
        ..AuditConfig::default()
    };
    assert!(matches!(
        frontier(&id, &[r(1, 1)], &[3], &spec(), &tiny),
        Err(Error::BudgetExceeded { .. })
    ));
    assert_eq!(parse_grid("1/2, 2,1/2").unwrap(), vec![r(1, 2), r(2, 1)]);
    assert!(parse_grid("0").is_err());
    assert!(parse_grid("x").is_err());
}
