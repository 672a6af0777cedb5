use online_embed::generate::{random_metric, rng_from_seed, GeneratorKind};
use online_embed::line::LineState;
use online_embed::scalar::ratio;
use online_embed::tree::{four_point_check, l1_to_linf_lift, GreedyTreeState, TreeL1Embedder};
use online_embed::{distortion_report, HostPointSet, MetricSpace, Norm, Rational};
use proptest::prelude::*;

fn scaled(space: &MetricSpace<Rational>, c: &Rational) -> MetricSpace<Rational> {
    MetricSpace::from_matrix(space.to_matrix().into_iter().map(|r| r.into_iter().map(|d| d * c).collect()).collect()).unwrap()
}

fn kind() -> impl Strategy<Value = GeneratorKind> {
    prop::sample::select(GeneratorKind::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn greedy_and_line_are_scale_invariant(seed in any::<u64>(), n in 2usize..8, k in kind(), p in 1i64..20, q in 1i64..20) {
        let space: MetricSpace<Rational> = random_metric(&mut rng_from_seed(seed), n, k);
        let c = ratio(p, q);
        let big = scaled(&space, &c);
        let a = distortion_report(&space, &GreedyTreeState::run(&space).unwrap().host()).unwrap();
        let b = distortion_report(&big, &GreedyTreeState::run(&big).unwrap().host()).unwrap();
        prop_assert_eq!(a.distortion, b.distortion);
        let a = LineState::run(&space).unwrap();
        let b = LineState::run(&big).unwrap();
        for (x, y) in a.positions().iter().zip(b.positions()) {
            prop_assert_eq!(x * &c, y.clone());
        }
    }

    #[test]
    fn tree_lifts_are_isometric_in_any_order(seed in any::<u64>(), n in 2usize..10, perm_seed in any::<u64>()) {
        let base: MetricSpace<Rational> = random_metric(&mut rng_from_seed(seed), n, GeneratorKind::Tree);
        let mut perm: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng_from_seed(perm_seed));
        let space = base.permuted(&perm);
        prop_assert!(four_point_check(&space).is_ok());
        let e = TreeL1Embedder::run(&space).unwrap();
        let exact = |host: &HostPointSet<Rational>| space.to_matrix() == host.distance_matrix().unwrap();
        prop_assert!(exact(&HostPointSet::Tree(e.realizer().tree().clone())));
        let dim = (n - 1).max(1);
        let tuples = e.point_tuples(dim).unwrap();
        prop_assert!(exact(&HostPointSet::vectors(Norm::L1, tuples.clone()).unwrap()));
        prop_assert!(exact(&l1_to_linf_lift(&tuples, Some(dim)).unwrap()));
    }

    #[test]
    fn greedy_dominates_and_respects_its_bound(seed in any::<u64>(), n in 2usize..9, k in kind()) {
        let space: MetricSpace<f64> = random_metric(&mut rng_from_seed(seed), n, k);
        let r = distortion_report(&space, &GreedyTreeState::run(&space).unwrap().host()).unwrap();
        prop_assert!(r.contraction.tol_le(&1.0));
        prop_assert!(r.distortion.tol_le(&((1u64 << (n - 1)) as f64 - 1.0)));
    }

    #[test]
    fn float_and_rational_backends_agree(seed in any::<u64>(), n in 2usize..8, k in kind()) {
        let exact: MetricSpace<Rational> = random_metric(&mut rng_from_seed(seed), n, k);
        let float: MetricSpace<f64> = exact.convert();
        let a = distortion_report(&exact, &LineState::run(&exact).unwrap().host()).unwrap();
        let b = distortion_report(&float, &LineState::run(&float).unwrap().host()).unwrap();
        let (da, db) = (a.distortion.to_f64_lossy(), b.distortion.to_f64_lossy());
        prop_assert!((da - db).abs() <= 1e-9 * da.abs().max(1.0), "{} vs {}", da, db);
    }
}
