use nambu_core::cnb::{cnb6_det, cnb6_pfaffian, poisson};
use nambu_core::dynamics::{alt_nambu_rhs, hamilton_rhs, nambu_rhs};
use nambu_core::operator::Operator;
use nambu_core::phase_space::{invariants, Gradient};
use nambu_core::qnb::{commutator, jordan_kurosh_solve, qnb6_full, qnb6_strings, JkMode};
use nambu_core::report::relative_difference_vec;
use nambu_core::sampling::{random_bound_state, random_complex_matrix, random_hermitian, seeded};
use proptest::prelude::*;

fn gradient() -> impl Strategy<Value = Gradient> {
    prop::array::uniform6(-2.0f64..2.0)
}

fn sextuple() -> impl Strategy<Value = [Gradient; 6]> {
    prop::array::uniform6(gradient())
}

fn hadamard(g: &[Gradient; 6]) -> f64 {
    g.iter().map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt()).product()
}

proptest! {
    #[test]
    fn det_equals_pairing_sum(g in sextuple()) {
        let (d, p) = (cnb6_det(&g), cnb6_pfaffian(&g));
        prop_assert!((d - p).abs() <= 1e-12 * hadamard(&g).max(1e-300));
    }

    #[test]
    fn bracket_is_alternating(g in sextuple(), i in 0usize..6, j in 0usize..6) {
        prop_assume!(i != j);
        let mut swapped = g;
        swapped.swap(i, j);
        let bound = 1e-12 * hadamard(&g);
        prop_assert!((cnb6_pfaffian(&g) + cnb6_pfaffian(&swapped)).abs() <= bound);
        prop_assert!((cnb6_det(&g) + cnb6_det(&swapped)).abs() <= bound);
        let mut repeated = g;
        repeated[j] = repeated[i];
        prop_assert!(cnb6_pfaffian(&repeated).abs() <= bound);
    }

    #[test]
    fn bracket_is_multilinear(g in sextuple(), h in gradient(), a in -3.0f64..3.0, slot in 0usize..6) {
        let mut combo = g;
        combo[slot] = std::array::from_fn(|k| a * g[slot][k] + h[k]);
        let mut other = g;
        other[slot] = h;
        let lhs = cnb6_pfaffian(&combo);
        let rhs = a * cnb6_pfaffian(&g) + cnb6_pfaffian(&other);
        prop_assert!((lhs - rhs).abs() <= 1e-11 * (hadamard(&combo) + hadamard(&g) * a.abs() + hadamard(&other)).max(1e-300));
    }

    #[test]
    fn poisson_bracket_is_antisymmetric(f in gradient(), g in gradient()) {
        prop_assert_eq!(poisson(&f, &g), -poisson(&g, &f));
        prop_assert_eq!(poisson(&f, &f), 0.0);
    }

    #[test]
    fn flows_agree_on_bound_states(seed in any::<u64>()) {
        let z = random_bound_state(&mut seeded(seed));
        let h = hamilton_rhs(&z).unwrap();
        prop_assert!(relative_difference_vec(&h, &nambu_rhs(&z).unwrap()) < 1e-8);
        prop_assert!(relative_difference_vec(&h, &alt_nambu_rhs(&z).unwrap()) < 1e-8);
    }

    #[test]
    fn flows_conserve_energy_to_first_order(seed in any::<u64>()) {
        let z = random_bound_state(&mut seeded(seed));
        let v = nambu_rhs(&z).unwrap();
        let eps = 1e-7;
        let arr = z.to_array();
        let fwd = nambu_core::PhaseState::from_array(std::array::from_fn(|k| arr[k] + eps * v[k]));
        let bwd = nambu_core::PhaseState::from_array(std::array::from_fn(|k| arr[k] - eps * v[k]));
        let dh = (invariants(&fwd).unwrap().energy - invariants(&bwd).unwrap().energy) / (2.0 * eps);
        let speed = v.iter().map(|x| x.abs()).fold(0.0, f64::max);
        prop_assert!(dh.abs() < 1e-6 * speed.max(1.0));
    }

    #[test]
    fn quantum_bracket_evaluators_agree(seed in any::<u64>(), dim in 2usize..5) {
        let mut rng = seeded(seed);
        let ops: [Operator; 6] = std::array::from_fn(|_| Operator::new(random_complex_matrix(&mut rng, dim), 1.0).unwrap());
        let a = qnb6_full(&ops).unwrap();
        let b = qnb6_strings(&ops).unwrap();
        let bound: f64 = ops.iter().map(|o| o.spectral_norm()).product();
        prop_assert!((&a - &b).norm() <= 1e-12 * bound);
    }

    #[test]
    fn commutator_obeys_jacobi(seed in any::<u64>(), dim in 1usize..6) {
        let mut rng = seeded(seed);
        let [a, b, c]: [Operator; 3] = std::array::from_fn(|_| Operator::new(random_complex_matrix(&mut rng, dim), 1.0).unwrap());
        let ab_c = commutator(&commutator(&a, &b).unwrap(), &c).unwrap();
        let bc_a = commutator(&commutator(&b, &c).unwrap(), &a).unwrap();
        let ca_b = commutator(&commutator(&c, &a).unwrap(), &b).unwrap();
        let total = &(&ab_c + &bc_a) + &ca_b;
        prop_assert!(total.norm() <= 1e-12 * (a.norm() * b.norm() * c.norm()).max(1.0));
    }

    #[test]
    fn jordan_kurosh_inverts_positive_kernels(seed in any::<u64>(), dim in 1usize..6) {
        let mut rng = seeded(seed);
        let m = Operator::new(random_complex_matrix(&mut rng, dim), 1.0).unwrap();
        let k = &(&m * &m.adjoint()) + &Operator::identity(dim, 1.0);
        let x = Operator::new(random_hermitian(&mut rng, dim), 1.0).unwrap();
        let b = &(&k * &x) + &(&x * &k);
        let sol = jordan_kurosh_solve(&k, &b, JkMode::Strict).unwrap();
        prop_assert_eq!(sol.singular_pairs, 0);
        prop_assert!((&sol.solution - &x).norm() <= 1e-10 * x.norm().max(1.0) * k.spectral_norm());
    }
}
