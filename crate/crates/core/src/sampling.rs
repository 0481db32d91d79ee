//! Seeded random test points and operators.
//!
//! All randomness derives from one `u64` seed fed to ChaCha8
//! (`rand_chacha::ChaCha8Rng::seed_from_u64`), so a seed reproduces the
//! same sample stream on every platform.

use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::phase_space::{invariants, Gradient, PhaseState};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const SAMPLE_ENERGY_RANGE: (f64, f64) = (-1.5, -0.1);
pub const SAMPLE_COORDINATE_RANGE: (f64, f64) = (0.5, 2.0);
/// Rejection floor for |L|, ℛ₃+𝓛₃ and |ℛ₃𝓛₃|.
pub const SAMPLE_GUARD: f64 = 1e-3;

fn signed_uniform(rng: &mut SeededRng, lo: f64, hi: f64) -> f64 {
    let v = rng.random_range(lo..hi);
    if rng.random_bool(0.5) {
        v
    } else {
        -v
    }
}

fn unit_vector(rng: &mut SeededRng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n2: f64 = v.iter().map(|c| c * c).sum();
        if n2 > 1e-4 && n2 <= 1.0 {
            let n = n2.sqrt();
            return v.map(|c| c / n);
        }
    }
}

/// Random bound-state point whose Nambu-flow denominators are well away from zero.
///
/// Position components are uniform in ±[0.5, 2]; the energy is drawn uniformly in
/// [−1.5, −0.1] and fixes |p|, whose direction is uniform on the sphere.
pub fn random_bound_state(rng: &mut SeededRng) -> PhaseState {
    let (clo, chi) = SAMPLE_COORDINATE_RANGE;
    let (elo, ehi) = SAMPLE_ENERGY_RANGE;
    loop {
        let pos: [f64; 3] = std::array::from_fn(|_| signed_uniform(rng, clo, chi));
        let r = pos.iter().map(|c| c * c).sum::<f64>().sqrt();
        let energy = rng.random_range(elo..ehi);
        let kinetic = energy + 1.0 / r;
        let dir = unit_vector(rng);
        if kinetic <= 0.0 {
            continue;
        }
        let speed = (2.0 * kinetic).sqrt();
        let z = PhaseState::new(pos, dir.map(|c| c * speed));
        let Ok(inv) = invariants(&z) else { continue };
        if inv.angular_momentum.norm() < SAMPLE_GUARD
            || inv.chiral_sum3() < SAMPLE_GUARD
            || inv.chiral_product3().abs() < SAMPLE_GUARD
        {
            continue;
        }
        return z;
    }
}

/// Six gradient rows with entries uniform in [−1, 1].
pub fn random_gradient_sextuple(rng: &mut SeededRng) -> [Gradient; 6] {
    std::array::from_fn(|_| std::array::from_fn(|_| rng.random_range(-1.0..1.0)))
}

/// Complex matrix with real and imaginary parts uniform in [−1, 1].
pub fn random_complex_matrix(rng: &mut SeededRng, dim: usize) -> DMatrix<Complex<f64>> {
    DMatrix::from_fn(dim, dim, |_, _| {
        Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

/// (M + M†)/2 for a random complex M.
pub fn random_hermitian(rng: &mut SeededRng, dim: usize) -> DMatrix<Complex<f64>> {
    let m = random_complex_matrix(rng, dim);
    (&m + m.adjoint()) * Complex::new(0.5, 0.0)
}
