//! Phase-space points of the rescaled Coulomb problem and its invariants.
//!
//! Every 6-vector in this crate uses the canonical coordinate order
//! `(x, px, y, py, z, pz)`: position component `k` sits at index `2k`,
//! its conjugate momentum at `2k + 1`.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gradient or rate vector in canonical coordinate order.
pub type Gradient = [f64; 6];

pub const COORDINATE_NAMES: [&str; 6] = ["x", "px", "y", "py", "z", "pz"];

/// `|L|` at or below this value raises the zero-angular-momentum flag.
pub const ZERO_ANGULAR_MOMENTUM: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub x: f64,
    pub px: f64,
    pub y: f64,
    pub py: f64,
    pub z: f64,
    pub pz: f64,
}

impl PhaseState {
    pub fn new(position: [f64; 3], momentum: [f64; 3]) -> Self {
        Self {
            x: position[0],
            px: momentum[0],
            y: position[1],
            py: momentum[1],
            z: position[2],
            pz: momentum[2],
        }
    }

    pub fn from_array(c: [f64; 6]) -> Self {
        Self { x: c[0], px: c[1], y: c[2], py: c[3], z: c[4], pz: c[5] }
    }

    pub fn to_array(&self) -> [f64; 6] {
        [self.x, self.px, self.y, self.py, self.z, self.pz]
    }

    pub fn position(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn momentum(&self) -> Vector3<f64> {
        Vector3::new(self.px, self.py, self.pz)
    }

    pub fn radius(&self) -> f64 {
        self.position().norm()
    }

    /// Same position, momentum negated (the time-reversed state).
    pub fn reversed(&self) -> Self {
        Self { px: -self.px, py: -self.py, pz: -self.pz, ..*self }
    }

    fn checked_radius(&self) -> Result<f64> {
        let r = self.radius();
        if r > 0.0 && r.is_finite() {
            Ok(r)
        } else {
            Err(Error::SingularPoint)
        }
    }
}

/// H = p²/2 − 1/r.
pub fn hamiltonian(z: &PhaseState) -> Result<f64> {
    let r = z.checked_radius()?;
    Ok(0.5 * z.momentum().norm_squared() - 1.0 / r)
}

/// Conserved quantities of a bound Coulomb orbit at one phase point.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantSet {
    pub energy: f64,
    /// L = r × p
    pub angular_momentum: Vector3<f64>,
    /// A = p × L − r̂
    pub prl: Vector3<f64>,
    /// D = A / √(−2H)
    pub scaled_prl: Vector3<f64>,
    /// ℛ = L + D
    pub right: Vector3<f64>,
    /// 𝓛 = L − D
    pub left: Vector3<f64>,
    /// r̂·A + 1 − L²/r; zero on any Kepler orbit.
    pub kepler_residual: f64,
    pub zero_angular_momentum: bool,
}

impl InvariantSet {
    /// ℛ₃ + 𝓛₃, the argument of the logarithm in the Nambu flow.
    pub fn chiral_sum3(&self) -> f64 {
        self.right[2] + self.left[2]
    }

    pub fn chiral_product3(&self) -> f64 {
        self.right[2] * self.left[2]
    }
}

pub fn invariants(z: &PhaseState) -> Result<InvariantSet> {
    let r = z.checked_radius()?;
    let pos = z.position();
    let mom = z.momentum();
    let energy = 0.5 * mom.norm_squared() - 1.0 / r;
    if !(energy < 0.0) {
        return Err(Error::UnboundState { energy });
    }
    let rhat = pos / r;
    let angular_momentum = pos.cross(&mom);
    let prl = mom.cross(&angular_momentum) - rhat;
    let scaled_prl = prl / (-2.0 * energy).sqrt();
    let kepler_residual = rhat.dot(&prl) + 1.0 - angular_momentum.norm_squared() / r;
    Ok(InvariantSet {
        energy,
        angular_momentum,
        prl,
        scaled_prl,
        right: angular_momentum + scaled_prl,
        left: angular_momentum - scaled_prl,
        kepler_residual,
        zero_angular_momentum: angular_momentum.norm() <= ZERO_ANGULAR_MOMENTUM,
    })
}

/// Scalar invariants addressable by name in a [`GradientTable`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Invariant {
    Energy,
    AngularMomentum(usize),
    Prl(usize),
    Right(usize),
    Left(usize),
}

impl Invariant {
    pub fn name(&self) -> String {
        match self {
            Invariant::Energy => "H".to_string(),
            Invariant::AngularMomentum(i) => format!("L{}", i + 1),
            Invariant::Prl(i) => format!("A{}", i + 1),
            Invariant::Right(i) => format!("R{}", i + 1),
            Invariant::Left(i) => format!("Lcal{}", i + 1),
        }
    }

    pub fn all() -> Vec<Invariant> {
        let mut out = vec![Invariant::Energy];
        for i in 0..3 {
            out.push(Invariant::AngularMomentum(i));
            out.push(Invariant::Prl(i));
            out.push(Invariant::Right(i));
            out.push(Invariant::Left(i));
        }
        out
    }

    pub fn eval(&self, z: &PhaseState) -> Result<f64> {
        let inv = invariants(z)?;
        Ok(match *self {
            Invariant::Energy => inv.energy,
            Invariant::AngularMomentum(i) => inv.angular_momentum[i],
            Invariant::Prl(i) => inv.prl[i],
            Invariant::Right(i) => inv.right[i],
            Invariant::Left(i) => inv.left[i],
        })
    }
}

/// Analytic partial derivatives of the invariants in canonical order.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientTable {
    pub energy: Gradient,
    pub angular_momentum: [Gradient; 3],
    pub prl: [Gradient; 3],
    pub right: [Gradient; 3],
    pub left: [Gradient; 3],
    pub zero_angular_momentum: bool,
}

impl GradientTable {
    pub fn get(&self, which: Invariant) -> Gradient {
        match which {
            Invariant::Energy => self.energy,
            Invariant::AngularMomentum(i) => self.angular_momentum[i],
            Invariant::Prl(i) => self.prl[i],
            Invariant::Right(i) => self.right[i],
            Invariant::Left(i) => self.left[i],
        }
    }
}

/// Interleave position and momentum partials into canonical order.
fn interleave(d_dr: Vector3<f64>, d_dp: Vector3<f64>) -> Gradient {
    [d_dr[0], d_dp[0], d_dr[1], d_dp[1], d_dr[2], d_dp[2]]
}

pub fn invariant_gradients(z: &PhaseState) -> Result<GradientTable> {
    let inv = invariants(z)?;
    let r = z.radius();
    let pos = z.position();
    let mom = z.momentum();
    let p2 = mom.norm_squared();
    let rp = pos.dot(&mom);
    let id = Matrix3::<f64>::identity();

    let dh_dr = pos / (r * r * r);
    let dh_dp = mom;
    let energy = interleave(dh_dr, dh_dp);

    // Jacobians, row i = component i, column j = coordinate j.
    // L_i = ε_ijk r_j p_k
    let dl_dr = Matrix3::new(0.0, mom[2], -mom[1], -mom[2], 0.0, mom[0], mom[1], -mom[0], 0.0);
    let dl_dp = Matrix3::new(0.0, -pos[2], pos[1], pos[2], 0.0, -pos[0], -pos[1], pos[0], 0.0);
    // A_i = r_i p² − p_i (r·p) − r_i / r
    let da_dr = id * p2 - mom * mom.transpose() - (id / r - pos * pos.transpose() / (r * r * r));
    let da_dp = pos * mom.transpose() * 2.0 - id * rp - mom * pos.transpose();

    // D = A w⁻¹ with w = √(−2H), ∂w = −∂H / w
    let w = (-2.0 * inv.energy).sqrt();
    let dd_dr = da_dr / w + inv.prl * dh_dr.transpose() / (w * w * w);
    let dd_dp = da_dp / w + inv.prl * dh_dp.transpose() / (w * w * w);

    let rows = |jr: Matrix3<f64>, jp: Matrix3<f64>| -> [Gradient; 3] {
        std::array::from_fn(|i| interleave(jr.row(i).transpose(), jp.row(i).transpose()))
    };

    Ok(GradientTable {
        energy,
        angular_momentum: rows(dl_dr, dl_dp),
        prl: rows(da_dr, da_dp),
        right: rows(dl_dr + dd_dr, dl_dp + dd_dp),
        left: rows(dl_dr - dd_dr, dl_dp - dd_dp),
        zero_angular_momentum: inv.zero_angular_momentum,
    })
}

/// Central-difference gradient of `f` with step `h`; O(h²) accurate.
pub fn fd_gradient_oracle<F>(f: F, z: &PhaseState, h: f64) -> Result<Gradient>
where
    F: Fn(&PhaseState) -> Result<f64>,
{
    let base = z.to_array();
    let mut grad = [0.0; 6];
    for (k, g) in grad.iter_mut().enumerate() {
        let mut plus = base;
        let mut minus = base;
        plus[k] += h;
        minus[k] -= h;
        let fp = f(&PhaseState::from_array(plus)).map_err(|_| Error::StencilFailure { coordinate: k })?;
        let fm = f(&PhaseState::from_array(minus)).map_err(|_| Error::StencilFailure { coordinate: k })?;
        *g = (fp - fm) / (2.0 * h);
    }
    Ok(grad)
}
