//! Randomized structural invariants of the problem transformations.

use proptest::prelude::*;
use qrbnb::problem::{
    apply_penalty, fix_variables, qubo_to_ising, Assignment, ConstrainedQuadraticProblem,
    LinearConstraint, Subproblem,
};
use std::collections::BTreeMap;

/// A small random quadratic problem plus one binary assignment for it.
fn problem_and_bits() -> impl Strategy<Value = (ConstrainedQuadraticProblem, Vec<u8>)> {
    (2_usize..=8).prop_flat_map(|n| {
        let entries = proptest::collection::vec(
            (0..n, 0..n, -2.0..2.0_f64),
            0..=2 * n,
        );
        let bits = proptest::collection::vec(0_u8..=1, n);
        let offset = -1.0..1.0_f64;
        (entries, bits, offset).prop_map(move |(entries, bits, offset)| {
            let mut problem = ConstrainedQuadraticProblem::new(n);
            for (i, j, c) in entries {
                problem.add_quadratic(i.min(j), i.max(j), c);
            }
            problem.offset = offset;
            (problem, bits)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bits_and_spins_round_trip(bits in proptest::collection::vec(0_u8..=1, 1..16)) {
        let assignment = Assignment::from_bits(bits.clone());
        let spins = assignment.to_spins();
        prop_assert!(spins.iter().all(|&s| s == 1 || s == -1));
        let back = Assignment::from_spins(spins);
        prop_assert_eq!(back.to_bits(), bits);
    }

    #[test]
    fn spin_form_preserves_objective((problem, bits) in problem_and_bits()) {
        let assignment = Assignment::from_bits(bits);
        let ising = qubo_to_ising(&problem);
        let direct = problem.evaluate(&assignment).unwrap();
        let via_spins = ising.evaluate_spins(&assignment.to_spins());
        prop_assert!((direct - via_spins).abs() < 1e-9);
    }

    #[test]
    fn fixing_preserves_objective_on_completions(
        (problem, bits) in problem_and_bits(),
        fix_mask in proptest::collection::vec(any::<bool>(), 8),
    ) {
        let root = Subproblem::root(&problem);
        let fixings: Vec<(usize, u8)> = (0..problem.n_vars)
            .filter(|&i| fix_mask[i])
            .map(|i| (i, bits[i]))
            .collect();
        let sub = root.child(&fixings);
        let (reduced, index_map, fix_offset) = fix_variables(&sub);
        prop_assert_eq!(reduced.n_vars, index_map.len());

        let unfixed_bits: Vec<u8> = index_map.iter().map(|&i| bits[i]).collect();
        let reduced_value = reduced
            .evaluate(&Assignment::from_bits(unfixed_bits.clone()))
            .unwrap();
        let full_value = problem
            .evaluate(&sub.complete(&unfixed_bits))
            .unwrap();
        prop_assert!((reduced_value + fix_offset - full_value).abs() < 1e-9);
    }

    #[test]
    fn penalty_folding_is_exact_on_feasible_points(
        (mut problem, bits) in problem_and_bits(),
        group_size in 2_usize..=4,
    ) {
        let members: Vec<usize> = (0..group_size.min(problem.n_vars)).collect();
        problem
            .constraints
            .push(LinearConstraint::onehot(members.clone(), "onehot-g"));
        let folded = apply_penalty(&problem, &BTreeMap::new()).unwrap();

        let assignment = Assignment::from_bits(bits);
        let original = problem.evaluate(&assignment).unwrap();
        let penalized = folded.evaluate(&assignment).unwrap();
        // The penalty is w·(violation)², so folding never lowers a value and
        // is exact precisely on feasible assignments.
        prop_assert!(penalized >= original - 1e-9);
        let feasible = problem.is_feasible(&assignment).unwrap();
        if feasible {
            prop_assert!((penalized - original).abs() < 1e-9);
        } else {
            prop_assert!(penalized > original + 1e-9);
        }
    }
}
