//! Finite representations of the chiral su(2) ⊕ su(2) algebra of Hydrogen.
//!
//! A [`RepSpec`] is a direct sum of irreducible (s, s) blocks. On each block
//! ℛᵢ = 2Sᵢ ⊗ 1 and 𝓛ᵢ = 1 ⊗ 2Sᵢ, so [ℛᵢ, ℛⱼ] = 2iħ εᵢⱼₖ ℛₖ, the two factors
//! commute, and ℛ² = 𝓛² = 4ħ²s(s+1). The Hamiltonian H = −½(ℛ² + ħ²)⁻¹ is
//! then the scalar −1/(2ħ²(2s+1)²) on each block: the Balmer levels with
//! n = 2s + 1 and degeneracy n².

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{c, CMatrix, Operator};
use crate::report::{relative_residual, VerificationReport};

/// Multiplicity clustering tolerance for [`spectrum`].
pub const SPECTRUM_CLUSTER_TOL: f64 = 1e-9;

/// Spin s ∈ {0, ½, 1, …}, stored as 2s.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Spin {
    twice: u32,
}

impl Spin {
    pub fn from_twice(twice: u32) -> Self {
        Self { twice }
    }

    pub fn new(s: f64) -> Result<Self> {
        let twice = 2.0 * s;
        if !(s >= 0.0) || !s.is_finite() || (twice - twice.round()).abs() > 1e-9 || twice > 1e6 {
            return Err(Error::InvalidSpin(s));
        }
        Ok(Self { twice: twice.round() as u32 })
    }

    pub fn value(&self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn twice(&self) -> u32 {
        self.twice
    }

    /// 2s + 1
    pub fn multiplicity(&self) -> usize {
        self.twice as usize + 1
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

impl Serialize for Spin {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.value())
    }
}

impl<'de> Deserialize<'de> for Spin {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        Spin::new(v).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepSpec {
    pub hbar: f64,
    pub spins: Vec<Spin>,
}

impl RepSpec {
    pub fn new(hbar: f64, spins: Vec<Spin>) -> Result<Self> {
        if !(hbar > 0.0) || !hbar.is_finite() {
            return Err(Error::InvalidArgument(format!("hbar must be positive, got {hbar}")));
        }
        if spins.is_empty() {
            return Err(Error::InvalidArgument("representation needs at least one spin".into()));
        }
        Ok(Self { hbar, spins })
    }

    /// Convenience constructor from spin values like `[0.0, 0.5, 1.0]`.
    pub fn from_values(hbar: f64, spins: &[f64]) -> Result<Self> {
        let spins = spins.iter().map(|&s| Spin::new(s)).collect::<Result<Vec<_>>>()?;
        Self::new(hbar, spins)
    }

    /// Parse a comma-separated spin list such as `"0,0.5,1"` or `"1/2,3/2"`.
    pub fn parse_spins(list: &str) -> Result<Vec<Spin>> {
        list.split(',')
            .map(|item| {
                let item = item.trim();
                let value = match item.split_once('/') {
                    Some((n, d)) => {
                        let n: f64 = n.trim().parse().map_err(|_| Error::InvalidArgument(format!("bad spin '{item}'")))?;
                        let d: f64 = d.trim().parse().map_err(|_| Error::InvalidArgument(format!("bad spin '{item}'")))?;
                        n / d
                    }
                    None => item.parse().map_err(|_| Error::InvalidArgument(format!("bad spin '{item}'")))?,
                };
                Spin::new(value)
            })
            .collect()
    }

    /// Σ (2sᵢ + 1)²
    pub fn dim(&self) -> usize {
        self.spins.iter().map(|s| s.multiplicity().pow(2)).sum()
    }

    pub fn label(&self) -> String {
        let items: Vec<String> = self.spins.iter().map(|s| s.to_string()).collect();
        format!("[{}]", items.join(","))
    }
}

/// Hermitean spin-s matrices (Sₓ, S_y, S_z) in the basis m = s, s−1, …, −s.
pub fn spin_matrices(s: f64, hbar: f64) -> Result<[CMatrix; 3]> {
    let spin = Spin::new(s)?;
    Ok(spin_blocks(spin, hbar))
}

fn spin_blocks(spin: Spin, hbar: f64) -> [CMatrix; 3] {
    let d = spin.multiplicity();
    let s = spin.value();
    let m = |k: usize| s - k as f64;
    // S₊|m⟩ = ħ√(s(s+1) − m(m+1)) |m+1⟩
    let raise = CMatrix::from_fn(d, d, |row, col| {
        if col == row + 1 {
            let mc = m(col);
            c(hbar * (s * (s + 1.0) - mc * (mc + 1.0)).sqrt(), 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    let lower = raise.adjoint();
    let sx = (&raise + &lower) * c(0.5, 0.0);
    let sy = (&raise - &lower) * c(0.0, -0.5);
    let sz = CMatrix::from_fn(d, d, |row, col| if row == col { c(hbar * m(row), 0.0) } else { c(0.0, 0.0) });
    [sx, sy, sz]
}

/// ℛᵢ and 𝓛ᵢ on a representation.
#[derive(Clone, Debug, PartialEq)]
pub struct Generators {
    pub rep: RepSpec,
    pub right: [Operator; 3],
    pub left: [Operator; 3],
}

impl Generators {
    pub fn hbar(&self) -> f64 {
        self.rep.hbar
    }

    pub fn dim(&self) -> usize {
        self.rep.dim()
    }

    pub fn identity(&self) -> Operator {
        Operator::identity(self.dim(), self.hbar())
    }

    /// ℛ₃ + 𝓛₃
    pub fn chiral_sum3(&self) -> Operator {
        &self.right[2] + &self.left[2]
    }

    pub fn right_casimir(&self) -> Operator {
        casimir(&self.right)
    }

    pub fn left_casimir(&self) -> Operator {
        casimir(&self.left)
    }

    /// ℛ₁, ℛ₂, ℛ₃, 𝓛₁, 𝓛₂, 𝓛₃ in that order.
    pub fn all(&self) -> [&Operator; 6] {
        [&self.right[0], &self.right[1], &self.right[2], &self.left[0], &self.left[1], &self.left[2]]
    }
}

fn casimir(g: &[Operator; 3]) -> Operator {
    let sq: Vec<Operator> = g.iter().map(|x| x * x).collect();
    &(&sq[0] + &sq[1]) + &sq[2]
}

pub fn build_generators(rep: &RepSpec) -> Generators {
    let hbar = rep.hbar;
    let mut right: [Vec<CMatrix>; 3] = Default::default();
    let mut left: [Vec<CMatrix>; 3] = Default::default();
    for &spin in &rep.spins {
        let s = spin_blocks(spin, hbar);
        let d = spin.multiplicity();
        let id = CMatrix::identity(d, d);
        for i in 0..3 {
            let twice = &s[i] * c(2.0, 0.0);
            right[i].push(twice.kronecker(&id));
            left[i].push(id.kronecker(&twice));
        }
    }
    Generators {
        rep: rep.clone(),
        right: std::array::from_fn(|i| Operator::direct_sum(&right[i], hbar)),
        left: std::array::from_fn(|i| Operator::direct_sum(&left[i], hbar)),
    }
}

/// H = −½ (ℛ² + ħ²)⁻¹
pub fn hamiltonian_operator(rep: &RepSpec) -> Operator {
    hamiltonian_from(&build_generators(rep))
}

pub(crate) fn hamiltonian_from(g: &Generators) -> Operator {
    let shifted = &g.right_casimir() + &g.identity().scale_real(g.hbar() * g.hbar());
    shifted
        .try_inverse()
        .expect("ℛ² + ħ² is ħ²(2s+1)² on every block")
        .scale_real(-0.5)
}

/// Closed-form level −1/(2ħ²(2s+1)²).
pub fn balmer_energy(spin: Spin, hbar: f64) -> f64 {
    let n = spin.multiplicity() as f64;
    -1.0 / (2.0 * hbar * hbar * n * n)
}

/// Checks (A′)² = 2H(L² + ħ²) + 1 with L = (ℛ+𝓛)/2 and A′ = √(−2H)(ℛ−𝓛)/2,
/// plus ℛ² = 𝓛² and the equality of both expressions for H.
pub fn prl_operator_identity_check(rep: &RepSpec) -> VerificationReport {
    let mut report = VerificationReport::new("prl_operator_identity", 1e-12).with_rep(rep.label());
    report.trials = 1;
    let g = build_generators(rep);
    let hbar = rep.hbar;
    let id = g.identity();
    let h = hamiltonian_from(&g);
    let root = h
        .scale_real(-2.0)
        .hermitean_function(|v| v.max(0.0).sqrt())
        .expect("H is hermitean");

    let ang: [Operator; 3] = std::array::from_fn(|i| (&g.right[i] + &g.left[i]).scale_real(0.5));
    let prl: [Operator; 3] = std::array::from_fn(|i| &root * &(&g.right[i] - &g.left[i]).scale_real(0.5));
    let l2 = casimir(&ang);
    let a2 = casimir(&prl);
    let rhs = &(&h.scale_real(2.0) * &(&l2 + &id.scale_real(hbar * hbar))) + &id;
    let scale = id.norm();
    report.record("a_prime_squared", relative_residual((&rhs - &a2).norm(), scale));

    let casimir_gap = (&g.right_casimir() - &g.left_casimir()).norm();
    report.record("right_left_casimir", relative_residual(casimir_gap, g.right_casimir().norm().max(scale)));

    let h_left = (&g.left_casimir() + &id.scale_real(hbar * hbar))
        .try_inverse()
        .expect("invertible")
        .scale_real(-0.5);
    report.record("hamiltonian_double_expression", relative_residual((&h - &h_left).norm(), h.norm()));
    report
}

/// Eigenvalue with its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub eigenvalue: f64,
    pub multiplicity: usize,
}

/// Ascending eigenvalues of a hermitean operator, clustered within [`SPECTRUM_CLUSTER_TOL`].
pub fn spectrum(op: &Operator) -> Result<Vec<Level>> {
    let (values, _) = op.hermitean_eigen()?;
    let mut levels: Vec<(f64, usize)> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for &v in values.iter() {
        match levels.last_mut() {
            Some((sum, n)) if (v - last).abs() <= SPECTRUM_CLUSTER_TOL => {
                *sum += v;
                *n += 1;
            }
            _ => levels.push((v, 1)),
        }
        last = v;
    }
    Ok(levels
        .into_iter()
        .map(|(sum, n)| Level { eigenvalue: sum / n as f64, multiplicity: n })
        .collect())
}

/// One row of the exported spectrum table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BalmerLevel {
    pub s: f64,
    pub energy: f64,
    pub degeneracy: usize,
    pub balmer_n: usize,
}

/// Labels Hamiltonian levels by n = 1/(ħ√(−2E)) and s = (n − 1)/2.
pub fn balmer_table(levels: &[Level], hbar: f64) -> Vec<BalmerLevel> {
    levels
        .iter()
        .map(|l| {
            let n = (1.0 / (hbar * (-2.0 * l.eigenvalue).sqrt())).round() as usize;
            BalmerLevel {
                s: (n as f64 - 1.0) / 2.0,
                energy: l.eigenvalue,
                degeneracy: l.multiplicity,
                balmer_n: n,
            }
        })
        .collect()
}
