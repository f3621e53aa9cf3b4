use metafinite_core::circuit_to_formula::{level_vars, INPUT_SYMBOL};
use metafinite_core::gen;
use metafinite_core::model_checker::eval_number_term;
use metafinite_core::*;
use proptest::prelude::*;

fn normalize(c: &Circuit) -> Circuit {
    level_paths(&make_tree_like(&eliminate_aux_gates(c).unwrap()).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn val_terms_compute_gate_values(seed in any::<u64>(), gates in 1usize..=8, u in 2usize..=3) {
        let mut rng = gen::rng(seed);
        let c = normalize(&gen::random_circuit(&mut rng, 2, gates, false));
        prop_assume!(c.size() <= 30);
        let desc = descriptor_from_circuit(&c, u).unwrap();
        let vals = build_val_terms(&desc);
        let arb = desc.arb();
        let sig = desc.signature();
        let levels = c.input_path_lengths();
        let d = gen::random_structure(&mut rng, &sig, u, -2..=2);
        let gate_values = c.evaluator().unwrap().eval_all(&d.encode()[..2]).unwrap();
        for g in c.gates() {
            let Some((x, _)) = levels[&g.id] else { continue };
            let a: Assignment = level_vars(x, desc.q).iter().map(|s| s.as_str()).zip(desc.tuples[&g.id].iter().copied()).collect();
            prop_assert_eq!(&eval_number_term(&vals[x], &d, &arb, &a).unwrap(), &gate_values[&g.id]);
        }
    }
}

#[test]
fn round_trip_on_all_zero_one_structures() {
    let sig = Signature::numbers(&[(INPUT_SYMBOL, 1)]).unwrap();
    let phi = parse_formula("forall x. f(x) = 0 | exists y. f(y) < f(x)", &sig).unwrap();
    let u = 2;
    let c = normalize(&compile(&phi, &sig, u, &ArbInterpretation::new()).unwrap());
    let desc = descriptor_from_circuit(&c, u).unwrap();
    let psi = build_sentence(&desc);
    let rsig = desc.signature();
    for k in 0..4 {
        let d = gen::zero_one_structure(&sig, u, k);
        let rd = RStructure::new(rsig.clone(), u, vec![], vec![d.number_table(0).to_vec()]).unwrap();
        assert_eq!(satisfies(&psi, &rd, &desc.arb(), &Assignment::new()).unwrap(), holds(&phi, &d).unwrap());
    }
}

#[test]
fn unnormalized_circuits_are_refused() {
    let sig = Signature::numbers(&[(INPUT_SYMBOL, 1)]).unwrap();
    let phi = parse_formula("exists x. f(x) = 1", &sig).unwrap();
    let c = compile(&phi, &sig, 2, &ArbInterpretation::new()).unwrap();
    assert!(matches!(descriptor_from_circuit(&c, 2), Err(ReverseError::AuxGate(_))));
}
