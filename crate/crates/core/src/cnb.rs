//! Poisson brackets and the six-slot classical Nambu bracket.
//!
//! The Nambu bracket is evaluated two independent ways: as the Jacobian
//! determinant of the six functions with respect to `(x, px, y, py, z, pz)`,
//! and as the Pfaffian of the antisymmetric matrix of their pairwise Poisson
//! brackets. The Pfaffian is summed over the 15 perfect pairings, which is the
//! Levi-Civita sum with its 48-fold redundancy removed.

use std::sync::OnceLock;

use nalgebra::Matrix6;

use crate::pairing::{pairings6, Pairing};
use crate::phase_space::Gradient;

/// {f, g} = Σ_k (∂f/∂q_k ∂g/∂p_k − ∂f/∂p_k ∂g/∂q_k)
pub fn poisson(grad_f: &Gradient, grad_g: &Gradient) -> f64 {
    (0..3)
        .map(|k| grad_f[2 * k] * grad_g[2 * k + 1] - grad_f[2 * k + 1] * grad_g[2 * k])
        .sum()
}

/// Jacobian determinant ∂(I₁…I₆)/∂(x, px, y, py, z, pz); row i is ∇Iᵢ.
pub fn cnb6_det(grads: &[Gradient; 6]) -> f64 {
    Matrix6::from_fn(|i, j| grads[i][j]).determinant()
}

fn pairings() -> &'static [Pairing] {
    static PAIRINGS: OnceLock<Vec<Pairing>> = OnceLock::new();
    PAIRINGS.get_or_init(pairings6)
}

/// Pfaffian of the matrix {Iᵢ, Iⱼ}.
pub fn cnb6_pfaffian(grads: &[Gradient; 6]) -> f64 {
    let pb = |i: usize, j: usize| poisson(&grads[i], &grads[j]);
    pairings()
        .iter()
        .map(|p| {
            let [(a, b), (c, d), (e, f)] = p.pairs;
            p.sign as f64 * pb(a, b) * pb(c, d) * pb(e, f)
        })
        .sum()
}

/// Gradient of ln g given ∇g and g > 0.
pub fn log_gradient(grad: &Gradient, value: f64) -> Gradient {
    grad.map(|c| c / value)
}

/// Unit gradient of the k-th canonical coordinate.
pub fn coordinate_gradient(k: usize) -> Gradient {
    let mut g = [0.0; 6];
    g[k] = 1.0;
    g
}
