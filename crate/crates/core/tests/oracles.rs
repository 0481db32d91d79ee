use nambu_core::cnb::{cnb6_det, cnb6_pfaffian, coordinate_gradient};
use nambu_core::dynamics::{hamilton_rhs, nambu_rhs};
use nambu_core::phase_space::{fd_gradient_oracle, invariant_gradients, invariants, Invariant};
use nambu_core::sampling::{random_bound_state, seeded};
use nambu_core::su2::{build_generators, hamiltonian_operator, spin_matrices};
use nambu_core::{PhaseState, RepSpec};

#[test]
fn analytic_gradients_match_finite_differences() {
    let mut rng = seeded(100);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let z = random_bound_state(&mut rng);
        let table = invariant_gradients(&z).unwrap();
        for which in Invariant::all() {
            let fd = fd_gradient_oracle(|s| which.eval(s), &z, 1e-5).unwrap();
            let an = table.get(which);
            let scale = an.iter().chain(&fd).map(|v| v.abs()).fold(1.0, f64::max);
            let diff = an.iter().zip(&fd).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            worst = worst.max(diff / scale);
        }
    }
    assert!(worst < 1e-6, "{worst}");
}

#[test]
fn classical_invariant_identities() {
    let mut rng = seeded(101);
    for _ in 0..100 {
        let z = random_bound_state(&mut rng);
        let inv = invariants(&z).unwrap();
        let (l, a, d) = (inv.angular_momentum, inv.prl, inv.scaled_prl);
        // A² = 1 + 2HL², so D² + L² = −1/(2H) and ℛ² = 𝓛² = −1/(2H).
        let target = -0.5 / inv.energy;
        let tol = 1e-12 * target.max(1.0);
        assert!((a.norm_squared() - 1.0 - 2.0 * inv.energy * l.norm_squared()).abs() < 1e-12 * a.norm_squared().max(1.0));
        assert!((d.norm_squared() + l.norm_squared() - target).abs() < tol);
        assert!((inv.right.norm_squared() - target).abs() < tol);
        assert!((inv.left.norm_squared() - target).abs() < tol);
        assert!(l.dot(&a).abs() < 1e-12 * l.norm() * a.norm().max(1.0));
        assert!(inv.kepler_residual.abs() < 1e-12 * target.max(1.0));
        assert!((inv.chiral_sum3() - 2.0 * l[2]).abs() < 1e-12 * l.norm().max(1.0));
    }
}

#[test]
fn hand_values_at_the_circular_point() {
    let z = PhaseState::new([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
    let inv = invariants(&z).unwrap();
    assert_eq!(inv.energy, -0.5);
    assert_eq!(inv.angular_momentum.as_slice(), &[0.0, 0.0, 1.0]);
    assert!(inv.prl.norm() < 1e-15);
    assert_eq!(inv.right[2], 1.0);
    assert_eq!(inv.left[2], 1.0);
    let flow = nambu_rhs(&z).unwrap();
    assert_eq!(hamilton_rhs(&z).unwrap(), [0.0, -1.0, 1.0, 0.0, 0.0, 0.0]);
    for (a, b) in flow.iter().zip([0.0, -1.0, 1.0, 0.0, 0.0, 0.0]) {
        assert!((a - b).abs() < 1e-14);
    }
}

#[test]
fn coordinate_sextuple_is_the_canonical_form() {
    let id: [[f64; 6]; 6] = std::array::from_fn(coordinate_gradient);
    assert_eq!(cnb6_det(&id), 1.0);
    assert_eq!(cnb6_pfaffian(&id), 1.0);
}

#[test]
fn spin_matrices_from_ladder_oracle() {
    // Independent construction: S₊|m⟩ = ħ√(s(s+1) − m(m+1))|m+1⟩, S₁ = (S₊+S₋)/2.
    for twice in 0..6u32 {
        let s = twice as f64 / 2.0;
        let n = twice as usize + 1;
        let [s1, _, s3] = spin_matrices(s, 1.0).unwrap();
        let m = |k: usize| s - k as f64;
        for row in 0..n {
            assert!((s3[(row, row)].re - m(row)).abs() < 1e-14);
            for col in 0..n {
                let expected = if row + 1 == col || col + 1 == row {
                    let lo = m(row.max(col));
                    0.5 * (s * (s + 1.0) - lo * (lo + 1.0)).sqrt()
                } else {
                    0.0
                };
                assert!((s1[(row, col)].re - expected).abs() < 1e-14, "s={s} ({row},{col})");
            }
        }
    }
}

#[test]
fn hamiltonian_trace_sums_balmer_levels() {
    // Each block contributes (2s+1)² · (−1/(2(2s+1)²)) = −½.
    let rep = RepSpec::from_values(1.0, &[0.0, 0.5, 1.0, 1.5, 2.0]).unwrap();
    let h = hamiltonian_operator(&rep);
    assert!((h.trace().re + 2.5).abs() < 1e-12);
    assert_eq!(build_generators(&rep).dim(), 55);
}
