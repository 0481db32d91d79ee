//! Quantum Nambu brackets and the quantized Kepler evolution laws.
//!
//! The six-slot bracket `[I₁, …, I₆]` is the fully antisymmetrized product of
//! its arguments. [`qnb6_full`] sums all 720 signed orderings and serves as the
//! oracle; [`qnb6_strings`] resolves it into 90 ordered products of three
//! commutators (15 pairings times 3! orderings of their commutators).
//!
//! Residuals of the operator identities are measured relative to the largest
//! of the terms involved and the product of the spectral norms of the bracket
//! arguments, so identities whose terms cancel to round-off stay well defined.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{c, C64, CMatrix, Operator};
use crate::pairing::{pairings6, Pairing, ORDERINGS3};
use crate::report::{relative_residual, VerificationReport};
use crate::su2::{build_generators, hamiltonian_from, Generators, RepSpec};

/// Number of ordered commutator strings in [`qnb6_strings`]: 15 · 3!.
pub const QNB6_STRING_TERMS: usize = 90;

pub fn commutator(a: &Operator, b: &Operator) -> Result<Operator> {
    a.ensure_compatible(b)?;
    Ok(&(a * b) - &(b * a))
}

fn comm(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

fn check_six(ops: &[Operator; 6]) -> Result<()> {
    Operator::ensure_all_compatible(&ops.iter().collect::<Vec<_>>())
}

/// Σ_σ sgn(σ) I_σ(1) ⋯ I_σ(6) over all 720 permutations.
pub fn qnb6_full(ops: &[Operator; 6]) -> Result<Operator> {
    check_six(ops)?;
    let dim = ops[0].dim();
    let mats: Vec<&CMatrix> = ops.iter().map(|o| o.matrix()).collect();
    let mut total = CMatrix::zeros(dim, dim);
    let prefix = CMatrix::identity(dim, dim);
    let remaining: Vec<usize> = (0..6).collect();
    accumulate_permutations(&mats, &prefix, &remaining, 1.0, &mut total);
    Ok(Operator::from_parts(total, ops[0].hbar()))
}

/// Depth-first over permutations, sharing prefix products. Picking the element
/// at position `k` of the sorted remainder contributes (−1)^k to the parity.
fn accumulate_permutations(mats: &[&CMatrix], prefix: &CMatrix, remaining: &[usize], sign: f64, total: &mut CMatrix) {
    if remaining.len() == 1 {
        *total += (prefix * mats[remaining[0]]) * c(sign, 0.0);
        return;
    }
    for (k, &idx) in remaining.iter().enumerate() {
        let next = prefix * mats[idx];
        let rest: Vec<usize> = remaining.iter().copied().filter(|&j| j != idx).collect();
        let s = if k % 2 == 0 { sign } else { -sign };
        accumulate_permutations(mats, &next, &rest, s, total);
    }
}

fn pairings() -> &'static [Pairing] {
    static PAIRINGS: OnceLock<Vec<Pairing>> = OnceLock::new();
    PAIRINGS.get_or_init(pairings6)
}

/// (1/8) ε^{ijklmn} [Iᵢ,Iⱼ][I_k,I_l][I_m,I_n], given the commutator table.
///
/// Reordering whole commutators is an even permutation of the slots, so every
/// ordering of a pairing carries the pairing's own sign.
fn strings_from_commutators(comms: &[[CMatrix; 6]; 6], dim: usize) -> CMatrix {
    let mut total = CMatrix::zeros(dim, dim);
    for p in pairings() {
        let factors = p.pairs.map(|(i, j)| &comms[i][j]);
        let mut sym = CMatrix::zeros(dim, dim);
        for order in ORDERINGS3 {
            sym += factors[order[0]] * factors[order[1]] * factors[order[2]];
        }
        total += sym * c(p.sign as f64, 0.0);
    }
    total
}

/// The 90-term commutator-string resolution of the six-slot bracket.
pub fn qnb6_strings(ops: &[Operator; 6]) -> Result<Operator> {
    check_six(ops)?;
    let dim = ops[0].dim();
    let comms: [[CMatrix; 6]; 6] =
        std::array::from_fn(|i| std::array::from_fn(|j| if i < j { comm(ops[i].matrix(), ops[j].matrix()) } else { CMatrix::zeros(dim, dim) }));
    Ok(Operator::from_parts(strings_from_commutators(&comms, dim), ops[0].hbar()))
}

/// Evaluates the string resolution when every commutator is the scalar
/// `iħ · brackets[i][j]`; the result is then `(iħ)³ · 48/8 · Pf(brackets)`.
pub fn strings_with_scalar_commutators(brackets: &[[f64; 6]; 6], hbar: f64) -> C64 {
    let ih = c(0.0, hbar);
    let comms: [[CMatrix; 6]; 6] =
        std::array::from_fn(|i| std::array::from_fn(|j| CMatrix::from_element(1, 1, ih * brackets[i][j])));
    strings_from_commutators(&comms, 1)[(0, 0)]
}

/// Product of spectral norms: a magnitude scale for products of the given operators.
pub fn magnitude_bound(ops: &[&Operator]) -> f64 {
    ops.iter().map(|o| o.spectral_norm()).product()
}

/// df/dt = [f, H] / (iħ)
pub fn heisenberg_rhs(f: &Operator, h: &Operator, hbar: f64) -> Result<Operator> {
    Ok(commutator(f, h)?.scale(c(0.0, -1.0 / hbar)))
}

/// 𝒬 = 2ħ² H Σᵢ ([[[f,𝓛ᵢ],𝓛ᵢ],ℛ₃] + [[[f,ℛᵢ],ℛᵢ],𝓛₃]) H, nested exactly as written.
pub fn quantum_rotation(f: &Operator, gens: &Generators, h: &Operator, hbar: f64) -> Result<Operator> {
    f.ensure_compatible(h)?;
    f.ensure_compatible(&gens.right[0])?;
    let mut inner = Operator::zeros(f.dim(), f.hbar());
    for i in 0..3 {
        let via_left = commutator(&commutator(&commutator(f, &gens.left[i])?, &gens.left[i])?, &gens.right[2])?;
        let via_right = commutator(&commutator(&commutator(f, &gens.right[i])?, &gens.right[i])?, &gens.left[2])?;
        inner = &(&inner + &via_left) + &via_right;
    }
    Ok((&(h * &inner) * h).scale_real(2.0 * hbar * hbar))
}

/// Two sides of an operator identity and their relative residual.
#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionCheck {
    pub lhs: Operator,
    pub rhs: Operator,
    /// ‖lhs − rhs‖_F over the magnitude scale of the identity.
    pub residual: f64,
    pub scale: f64,
}

impl EvolutionCheck {
    fn new(lhs: Operator, rhs: Operator, floor: f64) -> Self {
        let scale = lhs.norm().max(rhs.norm()).max(floor);
        let residual = relative_residual((&lhs - &rhs).norm(), scale);
        Self { lhs, rhs, residual, scale }
    }
}

/// How 𝒬 enters the right-hand side of the entwined law.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RotationSign {
    /// H[…]H + 𝒬
    Added,
    /// H[…]H − 𝒬
    Subtracted,
}

impl fmt::Display for RotationSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RotationSign::Added => "added",
            RotationSign::Subtracted => "subtracted",
        })
    }
}

/// Ingredients of 3(iħ)³(Kḟ + ḟK) = H[f, K, ℛ₁, ℛ₂, 𝓛₁, 𝓛₂]H ± 𝒬 with K = ℛ₃ + 𝓛₃.
#[derive(Clone, Debug, PartialEq)]
pub struct EntwinedTerms {
    /// 3(iħ)³(Kḟ + ḟK)
    pub lhs: Operator,
    /// H[f, K, ℛ₁, ℛ₂, 𝓛₁, 𝓛₂]H
    pub bracket: Operator,
    /// 𝒬
    pub rotation: Operator,
    /// Spectral-norm product of H, H and the six bracket arguments.
    pub magnitude: f64,
}

impl EntwinedTerms {
    pub fn check(&self, sign: RotationSign) -> EvolutionCheck {
        let rhs = match sign {
            RotationSign::Added => &self.bracket + &self.rotation,
            RotationSign::Subtracted => &self.bracket - &self.rotation,
        };
        let floor = self.bracket.norm().max(self.rotation.norm()).max(self.magnitude);
        EvolutionCheck::new(self.lhs.clone(), rhs, floor)
    }
}

fn ensure_rep_dim(f: &Operator, rep: &RepSpec) -> Result<()> {
    if f.dim() != rep.dim() {
        return Err(Error::DimMismatch { left: f.dim(), right: rep.dim() });
    }
    if f.hbar() != rep.hbar {
        return Err(Error::HbarMismatch { left: f.hbar(), right: rep.hbar });
    }
    Ok(())
}

pub fn entwined_evolution_terms(f: &Operator, rep: &RepSpec) -> Result<EntwinedTerms> {
    ensure_rep_dim(f, rep)?;
    let g = build_generators(rep);
    entwined_terms_with(f, &g)
}

fn entwined_terms_with(f: &Operator, g: &Generators) -> Result<EntwinedTerms> {
    let hbar = g.hbar();
    let h = hamiltonian_from(g);
    let k = g.chiral_sum3();
    let fdot = heisenberg_rhs(f, &h, hbar)?;
    let ih3 = c(0.0, hbar).powi(3);
    let lhs = (&(&k * &fdot) + &(&fdot * &k)).scale(ih3 * 3.0);
    let args = [f.clone(), k, g.right[0].clone(), g.right[1].clone(), g.left[0].clone(), g.left[1].clone()];
    let bracket = &(&h * &qnb6_strings(&args)?) * &h;
    let rotation = quantum_rotation(f, g, &h, hbar)?;
    let mut norms: Vec<&Operator> = args.iter().collect();
    norms.push(&h);
    norms.push(&h);
    Ok(EntwinedTerms { lhs, bracket, rotation, magnitude: magnitude_bound(&norms) })
}

/// Residual of 3(iħ)³(Kḟ + ḟK) = H[f, K, ℛ₁, ℛ₂, 𝓛₁, 𝓛₂]H + 𝒬.
pub fn entwined_evolution_check(f: &Operator, rep: &RepSpec) -> Result<EvolutionCheck> {
    Ok(entwined_evolution_terms(f, rep)?.check(RotationSign::Added))
}

/// Normalization of the complete symmetrization (A, B, C).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetrizationConvention {
    /// Sum over all 6 orderings.
    Sum,
    /// Sum over all 6 orderings divided by 3!.
    Normalized,
}

impl SymmetrizationConvention {
    pub const ALL: [SymmetrizationConvention; 2] = [SymmetrizationConvention::Sum, SymmetrizationConvention::Normalized];
}

impl fmt::Display for SymmetrizationConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymmetrizationConvention::Sum => "sum_over_6_orderings",
            SymmetrizationConvention::Normalized => "sum_over_6_orderings_div_3factorial",
        })
    }
}

/// Complete symmetrization of three operators under `convention`.
pub fn symmetrize3(a: &Operator, b: &Operator, cc: &Operator, convention: SymmetrizationConvention) -> Result<Operator> {
    Operator::ensure_all_compatible(&[a, b, cc])?;
    let items = [a, b, cc];
    let mut total = Operator::zeros(a.dim(), a.hbar());
    for order in ORDERINGS3 {
        total = &total + &(&(items[order[0]] * items[order[1]]) * items[order[2]]);
    }
    Ok(match convention {
        SymmetrizationConvention::Sum => total,
        SymmetrizationConvention::Normalized => total.scale_real(1.0 / 6.0),
    })
}

/// Which six-slot evaluator produces the bracket side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BracketEvaluator {
    Strings,
    Full,
}

/// 4(iħ)³ (ℛ₃, 𝓛₃, ḟ) against [f, H, ℛ₁, ℛ₂, 𝓛₁, 𝓛₂].
pub fn symmetrized_evolution_check(f: &Operator, rep: &RepSpec, convention: SymmetrizationConvention) -> Result<EvolutionCheck> {
    symmetrized_evolution_check_with(f, rep, convention, BracketEvaluator::Strings)
}

pub fn symmetrized_evolution_check_with(
    f: &Operator,
    rep: &RepSpec,
    convention: SymmetrizationConvention,
    evaluator: BracketEvaluator,
) -> Result<EvolutionCheck> {
    Ok(symmetrized_evolution_terms(f, rep, evaluator)?.check(convention))
}

/// Both sides of the symmetrized law, the left one before normalization.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetrizedTerms {
    /// 4(iħ)³ times the plain six-ordering sum of (ℛ₃, 𝓛₃, ḟ).
    pub lhs_sum: Operator,
    /// [f, H, ℛ₁, ℛ₂, 𝓛₁, 𝓛₂]
    pub bracket: Operator,
    /// Spectral-norm product of the six bracket arguments.
    pub magnitude: f64,
}

impl SymmetrizedTerms {
    pub fn lhs(&self, convention: SymmetrizationConvention) -> Operator {
        match convention {
            SymmetrizationConvention::Sum => self.lhs_sum.clone(),
            SymmetrizationConvention::Normalized => self.lhs_sum.scale_real(1.0 / 6.0),
        }
    }

    pub fn check(&self, convention: SymmetrizationConvention) -> EvolutionCheck {
        EvolutionCheck::new(self.lhs(convention), self.bracket.clone(), self.magnitude)
    }
}

pub fn symmetrized_evolution_terms(f: &Operator, rep: &RepSpec, evaluator: BracketEvaluator) -> Result<SymmetrizedTerms> {
    ensure_rep_dim(f, rep)?;
    let g = build_generators(rep);
    let hbar = rep.hbar;
    let h = hamiltonian_from(&g);
    let fdot = heisenberg_rhs(f, &h, hbar)?;
    let ih3 = c(0.0, hbar).powi(3);
    let lhs_sum = symmetrize3(&g.right[2], &g.left[2], &fdot, SymmetrizationConvention::Sum)?.scale(ih3 * 4.0);
    let args = [f.clone(), h, g.right[0].clone(), g.right[1].clone(), g.left[0].clone(), g.left[1].clone()];
    let bracket = match evaluator {
        BracketEvaluator::Strings => qnb6_strings(&args)?,
        BracketEvaluator::Full => qnb6_full(&args)?,
    };
    let magnitude = magnitude_bound(&args.iter().collect::<Vec<_>>());
    Ok(SymmetrizedTerms { lhs_sum, bracket, magnitude })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum JkMode {
    /// Minimal-norm solution; incompatibility is reported, not fatal.
    #[default]
    Lenient,
    /// Incompatible right-hand sides are an error.
    Strict,
}

/// Relative singular-pair threshold: |λᵢ + λⱼ| ≤ ε with ε = 10⁻⁸ ‖K‖₂.
pub const JK_SINGULAR_REL: f64 = 1e-8;
/// Strict mode rejects √(incompatibility) above this fraction of ‖B‖_F.
pub const JK_STRICT_REL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct JkSolution {
    pub solution: Operator,
    /// Σ |B̃ᵢⱼ|² over eigenpairs with |λᵢ + λⱼ| ≤ ε.
    pub incompatibility: f64,
    pub singular_pairs: usize,
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
    pub threshold: f64,
}

impl JkSolution {
    /// Whether the eigenpair (i, j) was treated as singular.
    pub fn is_singular(&self, i: usize, j: usize) -> bool {
        (self.eigenvalues[i] + self.eigenvalues[j]).abs() <= self.threshold
    }
}

/// Minimal-norm X with KX + XK = B for hermitean K.
pub fn jordan_kurosh_solve(k: &Operator, b: &Operator, mode: JkMode) -> Result<JkSolution> {
    k.ensure_compatible(b)?;
    let (values, u) = k.hermitean_eigen()?;
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let threshold = JK_SINGULAR_REL * scale;
    let bt = u.adjoint() * b.matrix() * &u;
    let n = k.dim();
    let mut xt = CMatrix::zeros(n, n);
    let mut incompatibility = 0.0;
    let mut singular_pairs = 0;
    for i in 0..n {
        for j in 0..n {
            let denom = values[i] + values[j];
            if denom.abs() > threshold {
                xt[(i, j)] = bt[(i, j)] / denom;
            } else {
                singular_pairs += 1;
                incompatibility += bt[(i, j)].norm_sqr();
            }
        }
    }
    if mode == JkMode::Strict && incompatibility.sqrt() > JK_STRICT_REL * b.norm() {
        return Err(Error::Incompatible { norm: incompatibility });
    }
    Ok(JkSolution {
        solution: Operator::from_parts(&u * xt * u.adjoint(), k.hbar()),
        incompatibility,
        singular_pairs,
        eigenvalues: values.iter().copied().collect(),
        eigenvectors: u,
        threshold,
    })
}

/// ⟨ψ|Kḟ + ḟK|ψ⟩ = 2κ⟨ψ|ḟ|ψ⟩ on every eigenvector of K = ℛ₃ + 𝓛₃, and on
/// equal-weight superpositions within each degenerate eigenspace.
pub fn sector_expectation_check(rep: &RepSpec, f: &Operator) -> Result<VerificationReport> {
    ensure_rep_dim(f, rep)?;
    let mut report = VerificationReport::new("sector_expectation", 1e-12).with_rep(rep.label());
    let g = build_generators(rep);
    let h = hamiltonian_from(&g);
    let k = g.chiral_sum3();
    let fdot = heisenberg_rhs(f, &h, rep.hbar)?;
    let anti = &(&k * &fdot) + &(&fdot * &k);
    let scale = (2.0 * k.spectral_norm() * fdot.spectral_norm()).max(f64::MIN_POSITIVE);
    let (values, u) = k.hermitean_eigen()?;

    let expect = |op: &Operator, psi: &CMatrix| -> C64 { (psi.adjoint() * op.matrix() * psi)[(0, 0)] };
    let mut vectors: Vec<(f64, CMatrix)> = (0..values.len()).map(|i| (values[i], u.columns(i, 1).into_owned())).collect();

    let mut start = 0;
    while start < values.len() {
        let mut end = start + 1;
        while end < values.len() && (values[end] - values[start]).abs() < 1e-9 {
            end += 1;
        }
        if end - start > 1 {
            let mut psi = CMatrix::zeros(values.len(), 1);
            for col in start..end {
                psi += u.columns(col, 1);
            }
            psi /= c(((end - start) as f64).sqrt(), 0.0);
            vectors.push((values[start], psi));
        }
        start = end;
    }

    for (kappa, psi) in &vectors {
        let lhs = expect(&anti, psi);
        let rhs = expect(&fdot, psi) * (2.0 * kappa);
        report.record("sector_proportionality", (lhs - rhs).norm() / scale);
        if kappa.abs() < 1e-9 {
            report.record("kappa_zero_sector_vanishes", lhs.norm() / scale);
        }
    }
    report.trials = vectors.len();
    Ok(report)
}
