//! Property tests over random skeletons and random paths.

use kgraph_core::catalog::{self, random};
use kgraph_core::checks::{random_path, random_word};
use kgraph_core::construct::{opposite_graph, product};
use kgraph_core::document::{parse_skeleton, SpecDocument};
use kgraph_core::dynamics::{bracket, distance, make_window, sample_windows, shift, MetricParams, Sampling};
use kgraph_core::kgraph::normal_colors;
use kgraph_core::measure::{parry_measure, CylinderSet};
use kgraph_core::relations::{stable_equiv, unstable_equiv};
use kgraph_core::spectral::{perron_data, vertex_matrix};
use kgraph_core::{validate_skeleton, DegreeVector, KGraph, Morphism, Vertex};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn graph(k: usize, seed: u64) -> KGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random::graph(&mut rng, k, 4, 3)
}

fn named(i: usize) -> KGraph {
    catalog::by_name(["g1", "g2", "g3", "g4"][i]).unwrap()
}

/// A random normal-form path of degree `d` with range `v`.
fn path_from(kg: &KGraph, rng: &mut ChaCha8Rng, d: &DegreeVector, v: Vertex) -> Morphism {
    let mut word = Vec::new();
    let mut v = v;
    for c in normal_colors(d) {
        let choices = kg.edges_with_range(c, v);
        let e = choices[rng.random_range(0..choices.len())];
        word.push(e);
        v = kg.skeleton().edge(e).source;
    }
    if word.is_empty() {
        return kg.identity(v);
    }
    kg.morphism_from_word(&word).unwrap()
}

fn degree(rng: &mut ChaCha8Rng, k: usize, max: i64) -> DegreeVector {
    DegreeVector::new((0..k).map(|_| rng.random_range(0..=max)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn degree_arithmetic(a in prop::collection::vec(-50i64..50, 1..4), b in prop::collection::vec(-50i64..50, 1..4)) {
        let k = a.len().min(b.len());
        let (a, b) = (DegreeVector::new(a[..k].to_vec()), DegreeVector::new(b[..k].to_vec()));
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert_eq!(-(-&a), a.clone());
        prop_assert!(DegreeVector::min(&a, &b).le(&a) && a.le(&DegreeVector::max(&a, &b)));
        prop_assert_eq!(a.to_string().parse::<DegreeVector>().unwrap(), a);
    }

    #[test]
    fn box_iter_counts(lo in prop::collection::vec(-3i64..3, 1..4), ext in prop::collection::vec(0i64..3, 3)) {
        let k = lo.len();
        let lo = DegreeVector::new(lo);
        let hi = &lo + &DegreeVector::new(ext[..k].to_vec());
        let points: Vec<DegreeVector> = DegreeVector::box_iter(&lo, &hi).collect();
        let expected: i64 = (0..k).map(|i| hi.get(i) - lo.get(i) + 1).product();
        prop_assert_eq!(points.len() as i64, expected);
        prop_assert!(points.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(points.iter().all(|p| lo.le(p) && p.le(&hi)));
    }

    #[test]
    fn random_skeletons_validate(k in 1usize..=3, seed in any::<u64>()) {
        let kg = graph(k, seed);
        prop_assert!(validate_skeleton(kg.skeleton()).is_valid());
    }

    #[test]
    fn normal_form_is_confluent(k in 1usize..=3, seed in any::<u64>(), len in 1usize..8) {
        let kg = graph(k, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let word = random_word(&kg, &mut rng, len);
        let nf = kg.normalize(&word);
        // any sequence of square moves preserves the normal form
        let mut w = word.clone();
        for _ in 0..20 {
            if len > 1 {
                let p = rng.random_range(0..len - 1);
                kg.swap_at(&mut w, p);
            }
            prop_assert_eq!(kg.normalize(&w), nf.clone());
        }
        let colors: Vec<usize> = nf.iter().map(|&e| kg.skeleton().color(e)).collect();
        prop_assert!(colors.windows(2).all(|c| c[0] <= c[1]));
    }

    #[test]
    fn factorize_inverts_compose(k in 1usize..=3, seed in any::<u64>()) {
        let kg = graph(k, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d1 = degree(&mut rng, k, 2);
        let d2 = degree(&mut rng, k, 2);
        let a = random_path(&kg, &mut rng, &d1, None).unwrap();
        let b = path_from(&kg, &mut rng, &d2, a.source());
        let ab = kg.compose(&a, &b).unwrap();
        prop_assert_eq!(ab.degree(), &(&d1 + &d2));
        let (f1, f2) = kg.factorize(&ab, &d1, &d2).unwrap();
        prop_assert_eq!(&f1, &a);
        prop_assert_eq!(&f2, &b);
        // every other split recomposes too
        let total = &d1 + &d2;
        let m = DegreeVector::new((0..k).map(|i| rng.random_range(0..=total.get(i))).collect());
        let (g1, g2) = kg.factorize(&ab, &m, &(&total - &m)).unwrap();
        prop_assert_eq!(kg.compose(&g1, &g2).unwrap(), ab);
    }

    #[test]
    fn vertex_matrices_multiply(k in 1usize..=3, seed in any::<u64>()) {
        let kg = graph(k, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = degree(&mut rng, k, 3);
        let q = degree(&mut rng, k, 3);
        prop_assert_eq!(vertex_matrix(&kg, &(&p + &q)), vertex_matrix(&kg, &p).mul(&vertex_matrix(&kg, &q)));
        prop_assert_eq!(vertex_matrix(&kg, &p).total(), kg.count(&p));
    }

    #[test]
    fn opposite_is_an_involution(k in 1usize..=3, seed in any::<u64>()) {
        let kg = graph(k, seed);
        let op = opposite_graph(&kg).unwrap();
        prop_assert!(validate_skeleton(op.skeleton()).is_valid());
        let back = opposite_graph(&op).unwrap();
        prop_assert_eq!(back.skeleton(), kg.skeleton());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = degree(&mut rng, k, 2);
        prop_assert_eq!(vertex_matrix(&op, &d), vertex_matrix(&kg, &d).transpose());
    }

    #[test]
    fn parry_expansion(k in 1usize..=3, seed in any::<u64>()) {
        let kg = graph(k, seed);
        let pd = perron_data(&kg, 1e-12).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = degree(&mut rng, k, 2);
        let lam = random_path(&kg, &mut rng, &d, None).unwrap();
        let off = DegreeVector::new((0..k).map(|_| rng.random_range(-3..=3)).collect());
        let base = parry_measure(&kg, &pd, &CylinderSet::new(lam.clone(), off.clone())).unwrap().value;
        let c = rng.random_range(0..k);
        let unit = DegreeVector::unit(k, c);
        let mut right = 0.0;
        for &e in kg.edges_with_range(c, lam.source()) {
            let ext = kg.compose(&lam, &kg.edge_morphism(e)).unwrap();
            right += parry_measure(&kg, &pd, &CylinderSet::new(ext, off.clone())).unwrap().value;
        }
        let mut left = 0.0;
        for &e in kg.edges_with_source(c, lam.range()) {
            let ext = kg.compose(&kg.edge_morphism(e), &lam).unwrap();
            left += parry_measure(&kg, &pd, &CylinderSet::new(ext, &off - &unit)).unwrap().value;
        }
        prop_assert!((right - base).abs() <= 1e-9 * base.max(1.0));
        prop_assert!((left - base).abs() <= 1e-9 * base.max(1.0));
    }

    #[test]
    fn bracket_laws_on_sampled_windows(i in 0usize..4, seed in any::<u64>()) {
        let kg = named(i);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ws = sample_windows(&kg, 3, 3, Sampling::Uniform, &mut rng).unwrap();
        let (x, y, z) = (&ws[0], &ws[1], &ws[2]);
        prop_assert_eq!(&bracket(&kg, x, x).unwrap(), x);
        if x.center() == y.center() && y.center() == z.center() {
            let xy = bracket(&kg, x, y).unwrap();
            let xz = bracket(&kg, x, z).unwrap();
            prop_assert_eq!(&bracket(&kg, &xy, z).unwrap(), &xz);
            prop_assert_eq!(&bracket(&kg, x, &bracket(&kg, y, z).unwrap()).unwrap(), &xz);
            let zero = DegreeVector::zero(kg.k());
            prop_assert!(unstable_equiv(&xy, x, &zero).unwrap());
            prop_assert!(stable_equiv(&xy, y, &zero).unwrap());
        }
    }

    #[test]
    fn distance_is_an_ultrametric(i in 0usize..4, seed in any::<u64>(), r in 0.05f64..0.95) {
        let kg = named(i);
        let params = MetricParams::new(r).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ws = sample_windows(&kg, 2, 3, Sampling::Uniform, &mut rng).unwrap();
        let d = |a, b| distance(a, b, &params).unwrap().rho;
        let (x, y, z) = (&ws[0], &ws[1], &ws[2]);
        prop_assert_eq!(d(x, y), d(y, x));
        prop_assert_eq!(d(x, y) == 0.0, x == y);
        prop_assert!(d(x, z) <= d(x, y).max(d(y, z)));
    }

    #[test]
    fn shifts_compose(i in 0usize..4, seed in any::<u64>()) {
        let kg = named(i);
        let k = kg.k();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = sample_windows(&kg, 3, 1, Sampling::Uniform, &mut rng).unwrap().remove(0);
        let n = DegreeVector::new((0..k).map(|_| rng.random_range(-1..=1)).collect());
        let m = DegreeVector::new((0..k).map(|_| rng.random_range(-1..=1)).collect());
        let lhs = shift(&kg, &shift(&kg, &w, &n).unwrap(), &m).unwrap();
        let rhs = shift(&kg, &w, &(&n + &m)).unwrap();
        let r = lhs.radius().min(rhs.radius());
        prop_assert_eq!(lhs.restrict(&kg, r).unwrap(), rhs.restrict(&kg, r).unwrap());
    }

    #[test]
    fn windows_round_trip_through_records(i in 0usize..4, seed in any::<u64>()) {
        let kg = named(i);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = sample_windows(&kg, 2, 1, Sampling::Uniform, &mut rng).unwrap().remove(0);
        let again = w.to_record(&kg).to_window(&kg).unwrap();
        prop_assert_eq!(&again, &w);
        prop_assert_eq!(make_window(&kg, w.body().clone(), w.radius()).unwrap(), w);
    }

    #[test]
    fn spec_documents_round_trip(k in 1usize..=3, seed in any::<u64>()) {
        let kg = graph(k, seed);
        let text = SpecDocument::from_skeleton(kg.skeleton()).to_json();
        prop_assert_eq!(&parse_skeleton(&text).unwrap(), kg.skeleton());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn products_of_random_graphs_are_valid(seed in any::<u64>()) {
        let a = graph(1, seed);
        let b = graph(2, seed.wrapping_add(1));
        let p = product(&a, &b).unwrap();
        prop_assert!(validate_skeleton(p.skeleton()).is_valid());
        let d = DegreeVector::from([1, 1, 1]);
        let expected = a.count(&DegreeVector::from([1])) * b.count(&DegreeVector::from([1, 1]));
        prop_assert_eq!(p.count(&d), expected);
    }
}
