use metafinite_core::gen;
use metafinite_core::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn aux_elimination_preserves_values(seed in any::<u64>(), gates in 1usize..=50) {
        let mut rng = gen::rng(seed);
        let c = gen::random_circuit(&mut rng, 3, gates, true);
        let out = eliminate_aux_gates(&c).unwrap();
        prop_assert!(out.gates().all(|g| g.kind.code() <= 6));
        let x = gen::random_rationals(&mut rng, 3);
        prop_assert_eq!(out.evaluate(&x).unwrap(), c.evaluate(&x).unwrap());
    }

    #[test]
    fn tree_like_pass_preserves_values(seed in any::<u64>(), gates in 1usize..=16) {
        let mut rng = gen::rng(seed);
        let c = gen::random_circuit(&mut rng, 2, gates, true);
        let out = make_tree_like(&c).unwrap();
        prop_assert!(out.is_tree_like().unwrap());
        prop_assert_eq!(out.depth().unwrap(), c.depth().unwrap());
        let x = gen::random_rationals(&mut rng, 2);
        prop_assert_eq!(out.evaluate(&x).unwrap(), c.evaluate(&x).unwrap());
    }

    #[test]
    fn leveling_preserves_values(seed in any::<u64>(), gates in 1usize..=16) {
        let mut rng = gen::rng(seed);
        let c = make_tree_like(&gen::random_circuit(&mut rng, 2, gates, false)).unwrap();
        let out = level_paths(&c).unwrap();
        prop_assert!(out.is_leveled().unwrap());
        prop_assert!(out.is_tree_like().unwrap());
        prop_assert_eq!(out.depth().unwrap(), c.depth().unwrap());
        let x = gen::random_rationals(&mut rng, 2);
        prop_assert_eq!(out.evaluate(&x).unwrap(), c.evaluate(&x).unwrap());
    }
}

#[test]
fn leveling_needs_tree_like_input() {
    let mut c = Circuit::new(1);
    let x = c.add(GateKind::Input(1), vec![]);
    let s = c.add(GateKind::Sign, vec![x]);
    let a = c.add(GateKind::Add, vec![s]);
    let b = c.add(GateKind::Add, vec![s]);
    let m = c.add(GateKind::Mul, vec![a, b]);
    c.add(GateKind::Output, vec![m]);
    assert_eq!(level_paths(&c), Err(NormalizeError::NotTreeLike));
}
