//! Cross-module invariants under random (seeded) inputs.

use causal_cones::cone::ConvexCone;
use causal_cones::events::{self, KMode, SampleBox};
use causal_cones::group;
use causal_cones::lorentz::{self, ConeRegion};
use causal_cones::order::{self, BasisKind, FinitePoset, SUBSET_CAP};
use causal_cones::relation::Relation;
use causal_cones::{linalg, sampling};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn cone_from_seed(seed: u64) -> ConvexCone {
    let mut rng = sampling::rng(seed);
    let dim = rng.random_range(2..=4);
    let m = rng.random_range(1..=7);
    let gens = (0..m).map(|_| sampling::gaussian(&mut rng, dim)).collect();
    ConvexCone::new(dim, gens).unwrap()
}

fn poset_from_seed(seed: u64, max: usize) -> FinitePoset {
    let mut rng = sampling::rng(seed);
    let n = rng.random_range(1..=max);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let mut r = Relation::identity(n);
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(0.4) {
                r.set(perm[a], perm[b], true);
            }
        }
    }
    order::make_poset(r.transitive_closure()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cone_membership_is_homogeneous_and_convex(seed in any::<u64>(), s in 0.01f64..100.0, t in 0.0f64..1.0) {
        let c = cone_from_seed(seed);
        let g = c.generators();
        let x = linalg::add(&linalg::scale(&g[0], t), &linalg::scale(g.last().unwrap(), 1.0 - t));
        prop_assert!(c.member(&x, 1e-8).unwrap());
        prop_assert!(c.member(&linalg::scale(&x, s), 1e-8 * s.max(1.0)).unwrap());
    }

    #[test]
    fn generators_belong_to_the_double_dual(seed in any::<u64>()) {
        let c = cone_from_seed(seed);
        let d = c.dual().unwrap();
        for g in c.generators() {
            for h in d.generators() {
                prop_assert!(linalg::dot(g, h) >= -1e-9);
            }
        }
        let dd = d.dual().unwrap();
        for g in c.generators() {
            prop_assert!(dd.member(g, 1e-8).unwrap());
        }
    }

    #[test]
    fn edge_lies_in_both_c_and_minus_c(seed in any::<u64>()) {
        let mut c = cone_from_seed(seed);
        // Force a line half the time.
        if seed % 2 == 0 {
            let mut g = c.generators().to_vec();
            g.push(linalg::scale(&g[0], -1.0));
            c = ConvexCone::new(c.dim(), g).unwrap();
        }
        let es = c.edge_and_span(1e-9).unwrap();
        if seed % 2 == 0 {
            prop_assert!(!es.edge.is_empty());
        }
        for v in &es.edge {
            prop_assert!(c.member(v, 1e-7).unwrap());
            prop_assert!(c.member(&linalg::scale(v, -1.0), 1e-7).unwrap());
        }
        prop_assert!(es.span.len() >= es.edge.len());
    }

    #[test]
    fn cone_region_is_lorentz_invariant(seed in any::<u64>(), q in 1usize..=4) {
        let mut rng = sampling::rng(seed);
        let a = group::random_causal_element(q, 4, seed).unwrap().linear().clone();
        for _ in 0..20 {
            let v = sampling::interior_vector(&mut rng, q);
            let w: Vec<f64> = (&a * nalgebra::DVector::from_column_slice(&v)).iter().cloned().collect();
            prop_assert_eq!(lorentz::lc_classify(q, &w, 1e-12).unwrap(), ConeRegion::Interior);
            let minus = linalg::scale(&v, -1.0);
            let wm: Vec<f64> = (&a * nalgebra::DVector::from_column_slice(&minus)).iter().cloned().collect();
            prop_assert_eq!(lorentz::lc_classify(q, &wm, 1e-12).unwrap(), ConeRegion::Backward);
        }
    }

    #[test]
    fn dilation_factors_multiply(seed in any::<u64>(), q in 1usize..=3) {
        let f = group::random_causal_element(q, 5, seed).unwrap();
        let g = group::random_causal_element(q, 5, seed ^ 0x5eed).unwrap();
        let zf = group::zeeman_decompose(&f, q, 1e-9).unwrap();
        let zg = group::zeeman_decompose(&g, q, 1e-9).unwrap();
        let zfg = group::zeeman_decompose(&f.compose(&g), q, 1e-9).unwrap();
        prop_assert!((zfg.lambda - zf.lambda * zg.lambda).abs() <= 1e-9 * zfg.lambda);
        let inv = group::zeeman_decompose(&f.inverse().unwrap(), q, 1e-9).unwrap();
        prop_assert!((inv.lambda * zf.lambda - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn causal_elements_preserve_open_order(seed in any::<u64>(), q in 1usize..=3) {
        let f = group::random_causal_element(q, 6, seed).unwrap();
        prop_assert!(group::preserves_open_order(&f, q, 500, seed).unwrap());
    }

    #[test]
    fn k_contains_j_and_is_a_partial_order(seed in any::<u64>(), q in 1usize..=3, n in 2usize..80) {
        let bx = SampleBox::new(vec![0.0; q + 1], vec![1.0; q + 1]).unwrap();
        let e = events::sprinkle(q, n, bx, seed, None).unwrap();
        let i = e.chronological_relation();
        let j = e.causal_relation();
        let ki = e.k_relation(KMode::Ideal);
        let kc = e.k_relation(KMode::Closed);
        prop_assert!(i.is_subset_of(&j));
        prop_assert!(j.is_subset_of(&kc));
        prop_assert!(ki.is_subset_of(&kc));
        prop_assert!(kc.is_partial_order().0);
        prop_assert!(i.is_irreflexive());
    }
}

/// Causal maps carry I+ and J+ of a sample onto those of its image.
#[test]
fn relations_are_covariant_under_causal_maps() {
    for seed in 0..20u64 {
        let q = 1 + (seed % 3) as usize;
        let bx = SampleBox::new(vec![-1.0; q + 1], vec![1.0; q + 1]).unwrap();
        let e = events::sprinkle(q, 120, bx, seed, None).unwrap();
        let f = group::random_causal_element(q, 6, 100 + seed).unwrap();
        let image = e.map_events(&f).unwrap();
        assert_eq!(e.chronological_relation(), image.chronological_relation(), "seed {seed}");
        assert_eq!(e.causal_relation(), image.causal_relation(), "seed {seed}");
    }
}

/// A space stretch is not causal, and the oracle and relations both see it.
#[test]
fn non_causal_maps_break_covariance() {
    let bx = SampleBox::new(vec![-1.0; 3], vec![1.0; 3]).unwrap();
    let e = events::sprinkle(2, 150, bx, 3, None).unwrap();
    let f = group::AffineMap::linear_only(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 3.0, 1.0]))).unwrap();
    assert!(!group::is_causal_map(&f, 2, 10_000, 1).unwrap());
    assert_ne!(e.causal_relation(), e.map_events(&f).unwrap().causal_relation());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scott_opens_are_closed_under_union_and_intersection(seed in any::<u64>()) {
        let p = poset_from_seed(seed, 6);
        let basis = order::basis_sets(&p, BasisKind::Scott, 0, SUBSET_CAP).unwrap().sets;
        for a in &basis {
            for b in &basis {
                let union: Vec<usize> = (0..p.size()).filter(|x| a.contains(x) || b.contains(x)).collect();
                let inter: Vec<usize> = (0..p.size()).filter(|x| a.contains(x) && b.contains(x)).collect();
                prop_assert!(order::is_scott_open(&p, &union, SUBSET_CAP).unwrap());
                prop_assert!(order::is_scott_open(&p, &inter, SUBSET_CAP).unwrap());
            }
        }
    }

    #[test]
    fn way_below_is_order_isomorphism_invariant(seed in any::<u64>()) {
        let p = poset_from_seed(seed, 6);
        let n = p.size();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut sampling::rng(seed.wrapping_add(1)));
        let moved = Relation::from_fn(n, |a, b| p.leq(perm[a], perm[b]));
        let p2 = order::make_poset(moved).unwrap();
        let w1 = order::way_below(&p, SUBSET_CAP).unwrap().relation;
        let w2 = order::way_below(&p2, SUBSET_CAP).unwrap().relation;
        for a in 0..n {
            for b in 0..n {
                prop_assert_eq!(w2.get(a, b), w1.get(perm[a], perm[b]));
            }
        }
        prop_assert!(w1.is_subset_of(p.order()));
        prop_assert_eq!(order::is_bicontinuous(&p, SUBSET_CAP).unwrap(), order::is_bicontinuous(&p2, SUBSET_CAP).unwrap());
    }

    #[test]
    fn lawson_basis_refines_scott(seed in any::<u64>()) {
        let p = poset_from_seed(seed, 5);
        let scott = order::basis_sets(&p, BasisKind::Scott, 0, SUBSET_CAP).unwrap().sets;
        let lawson = order::basis_sets(&p, BasisKind::Lawson, 1, SUBSET_CAP).unwrap().sets;
        for s in &scott {
            prop_assert!(lawson.contains(s), "Scott basis set {:?} missing from Lawson basis", s);
        }
    }
}
