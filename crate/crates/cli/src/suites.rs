//! Verification suites shared by the subcommands and the consolidated report.

use std::f64::consts::PI;

use nambu_core::cnb::{cnb6_det, cnb6_pfaffian, coordinate_gradient, log_gradient, poisson};
use nambu_core::dynamics::{conservation_report, integrate, IntegratorConfig, RhsKind};
use nambu_core::operator::{c, Operator};
use nambu_core::phase_space::{invariant_gradients, invariants, Gradient};
use nambu_core::qnb::{
    entwined_evolution_terms, jordan_kurosh_solve, qnb6_full, qnb6_strings, sector_expectation_check,
    strings_with_scalar_commutators, symmetrized_evolution_terms, BracketEvaluator, JkMode, RotationSign,
    SymmetrizationConvention,
};
use nambu_core::report::{relative_difference, relative_difference_vec, VerificationReport};
use nambu_core::sampling::{random_bound_state, random_complex_matrix, random_gradient_sextuple, random_hermitian, seeded};
use nambu_core::su2::{balmer_energy, build_generators, hamiltonian_operator, spectrum, BalmerLevel, Generators};
use nambu_core::{PhaseState, RepSpec, Result, Spin};

pub const BRACKET_TOL: f64 = 1e-10;
pub const FLOW_TOL: f64 = 1e-8;
pub const CONSERVATION_TOL: f64 = 1e-8;
pub const CLOSURE_TOL: f64 = 1e-6;
pub const SPECTRUM_TOL: f64 = 1e-10;
pub const QNB_TOL: f64 = 1e-12;
pub const LAW_TOL: f64 = 1e-10;
pub const SECTOR_TOL: f64 = 1e-12;
pub const DEFAULT_SEED: u64 = 42;

/// Flow sextuple with the i-th slot left for the coordinate direction.
fn flow_tail(z: &PhaseState, kind: RhsKind) -> Result<[Gradient; 5]> {
    let g = invariant_gradients(z)?;
    let first = match kind {
        RhsKind::NambuLog => {
            let k: Gradient = std::array::from_fn(|i| g.right[2][i] + g.left[2][i]);
            log_gradient(&k, invariants(z)?.chiral_sum3())
        }
        _ => g.energy,
    };
    Ok([first, g.right[0], g.right[1], g.left[0], g.left[1]])
}

fn flow_bracket_vectors(z: &PhaseState, kind: RhsKind) -> Result<([f64; 6], [f64; 6])> {
    let tail = flow_tail(z, kind)?;
    let mut det = [0.0; 6];
    let mut pf = [0.0; 6];
    for i in 0..6 {
        let six = [coordinate_gradient(i), tail[0], tail[1], tail[2], tail[3], tail[4]];
        det[i] = cnb6_det(&six);
        pf[i] = cnb6_pfaffian(&six);
    }
    Ok((det, pf))
}

/// Determinant against pairing sum on random and flow sextuples, and the three flow laws
/// against each other on seeded bound states.
pub fn cnb_suite(points: usize, seed: u64, bracket_tol: f64, flow_tol: f64) -> VerificationReport {
    let mut report = VerificationReport::new("cnb_equivalence", bracket_tol.max(flow_tol)).with_seed(seed);
    report.trials = points;
    let mut rng = seeded(seed);
    for _ in 0..points {
        let six = random_gradient_sextuple(&mut rng);
        report.record_with("det_vs_pfaffian_random", relative_difference(cnb6_det(&six), cnb6_pfaffian(&six)), bracket_tol);
    }
    for _ in 0..points {
        let z = random_bound_state(&mut rng);
        for (name, kind) in [("det_vs_pfaffian_nambu_sextuple", RhsKind::NambuLog), ("det_vs_pfaffian_alt_sextuple", RhsKind::NambuAlt)] {
            match flow_bracket_vectors(&z, kind) {
                Ok((det, pf)) => report.record_with(name, relative_difference_vec(&det, &pf), bracket_tol),
                Err(_) => report.record_with(name, f64::NAN, bracket_tol),
            }
        }
        let rhs: Vec<Result<[f64; 6]>> = RhsKind::ALL.iter().map(|k| k.eval(&z)).collect();
        match (&rhs[0], &rhs[1], &rhs[2]) {
            (Ok(h), Ok(n), Ok(a)) => {
                report.record_with("hamilton_vs_nambu", relative_difference_vec(h, n), flow_tol);
                report.record_with("hamilton_vs_alt", relative_difference_vec(h, a), flow_tol);
                report.record_with("nambu_vs_alt", relative_difference_vec(n, a), flow_tol);
            }
            _ => report.record_with("flow_domain", f64::NAN, flow_tol),
        }
    }
    report
}

pub fn eccentric_start() -> PhaseState {
    PhaseState::new([1.0, 0.0, 0.0], [0.0, 0.5, 0.0])
}

pub fn circular_start() -> PhaseState {
    PhaseState::new([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
}

/// 2π a^{3/2} with a = −1/(2H).
pub fn kepler_period(z: &PhaseState) -> Result<f64> {
    let a = -0.5 / invariants(z)?.energy;
    Ok(2.0 * PI * a.powf(1.5))
}

/// Invariant drift over one eccentric period and circular closure after 2π, for every flow law.
pub fn conservation_suite() -> VerificationReport {
    let mut report = VerificationReport::new("conservation", CONSERVATION_TOL);
    let config = IntegratorConfig::default();
    let ecc = eccentric_start();
    let h0 = invariants(&ecc).map(|i| i.energy).unwrap_or(f64::NAN);
    report.record("initial_energy_exact", (h0 + 7.0 / 8.0).abs());
    let period = kepler_period(&ecc).unwrap_or(f64::NAN);
    for kind in RhsKind::ALL {
        report.trials += 2;
        match integrate(&ecc, kind, period, &config) {
            Ok(traj) => {
                let drift = conservation_report(&traj, CONSERVATION_TOL);
                for chk in &drift.checks {
                    report.record(&format!("{kind}_{}", chk.name), chk.residual);
                }
            }
            Err(e) => {
                report.record(&format!("{kind}_integration"), f64::NAN);
                report.note(format!("{kind} eccentric: {e}"));
            }
        }
        match integrate(&circular_start(), kind, 2.0 * PI, &config) {
            Ok(traj) => {
                let (a, b) = (traj.initial().to_array(), traj.last().state.to_array());
                let gap = (0..6).map(|i| (a[i] - b[i]).abs()).fold(0.0, f64::max);
                report.record_with(&format!("{kind}_circular_closure"), gap, CLOSURE_TOL);
            }
            Err(e) => {
                report.record_with(&format!("{kind}_circular_closure"), f64::NAN, CLOSURE_TOL);
                report.note(format!("{kind} circular: {e}"));
            }
        }
    }
    report
}

/// Spins 0, ½, …, smax.
pub fn spin_ladder(smax: Spin) -> Vec<Spin> {
    (0..=smax.twice()).map(Spin::from_twice).collect()
}

/// Spectrum of the Hamiltonian on the direct sum of `spins`, with the Balmer comparison.
pub fn spectrum_suite(spins: &[Spin], hbar: f64) -> (VerificationReport, Vec<BalmerLevel>) {
    let mut report = VerificationReport::new("balmer_spectrum", SPECTRUM_TOL);
    let rep = match RepSpec::new(hbar, spins.to_vec()) {
        Ok(rep) => rep,
        Err(e) => {
            report.record("representation", f64::NAN);
            report.note(e.to_string());
            return (report, Vec::new());
        }
    };
    report = report.with_rep(rep.label());
    report.trials = spins.len();
    let levels = match spectrum(&hamiltonian_operator(&rep)) {
        Ok(levels) => levels,
        Err(e) => {
            report.record("eigen_decomposition", f64::NAN);
            report.note(e.to_string());
            return (report, Vec::new());
        }
    };
    let mut expected: Vec<Spin> = spins.to_vec();
    expected.sort_by_key(|s| s.twice());
    expected.dedup();
    report.record_flag("level_count", levels.len() == expected.len());
    let mut table = Vec::new();
    for (level, spin) in levels.iter().zip(&expected) {
        let mult = spins.iter().filter(|s| *s == spin).count() * spin.multiplicity() * spin.multiplicity();
        report.record("energy", (level.eigenvalue - balmer_energy(*spin, hbar)).abs());
        report.record_flag("degeneracy", level.multiplicity == mult);
        table.push(BalmerLevel { s: spin.value(), energy: level.eigenvalue, degeneracy: level.multiplicity, balmer_n: spin.multiplicity() });
    }
    (report, table)
}

/// 720-term against 90-term evaluation on random sextuples, plus the classical-limit normalization.
pub fn qnb_suite(trials: usize, seed: u64, dims: std::ops::RangeInclusive<usize>) -> VerificationReport {
    let mut report = VerificationReport::new("qnb_double_implementation", QNB_TOL).with_seed(seed);
    let mut rng = seeded(seed);
    for dim in dims {
        for _ in 0..trials {
            let ops: [Operator; 6] = std::array::from_fn(|_| Operator::new(random_complex_matrix(&mut rng, dim), 1.0).expect("square"));
            report.trials += 1;
            match (qnb6_full(&ops), qnb6_strings(&ops)) {
                (Ok(a), Ok(b)) => {
                    let bound: f64 = ops.iter().map(|o| o.spectral_norm()).product();
                    let scale = a.norm().max(b.norm()).max(bound);
                    report.record(&format!("full_vs_strings_dim{dim}"), (&a - &b).norm() / scale);
                }
                _ => report.record(&format!("full_vs_strings_dim{dim}"), f64::NAN),
            }
        }
    }
    // ε/8 commutator strings with scalar commutators iħ{·,·} equal 3!(iħ)³ times the ε/48 bracket.
    let factorial3 = 48.0 / 8.0;
    for hbar in [1.0, 0.5] {
        let g = random_gradient_sextuple(&mut rng);
        let pb: [[f64; 6]; 6] = std::array::from_fn(|i| std::array::from_fn(|j| poisson(&g[i], &g[j])));
        let quantum = strings_with_scalar_commutators(&pb, hbar);
        let classical = c(0.0, hbar).powi(3) * factorial3 * cnb6_pfaffian(&g);
        report.record("classical_limit_normalization", (quantum - classical).norm() / classical.norm());
    }
    report
}

/// Identity, the six generators and their pairwise products.
pub fn generator_monomials(g: &Generators) -> Vec<(String, Operator)> {
    let names = ["R1", "R2", "R3", "Lcal1", "Lcal2", "Lcal3"];
    let gens = g.all();
    let mut out = vec![("I".to_string(), g.identity())];
    for (i, a) in gens.iter().enumerate() {
        out.push((names[i].to_string(), (*a).clone()));
    }
    for (i, a) in gens.iter().enumerate() {
        for (j, b) in gens.iter().enumerate() {
            out.push((format!("{}*{}", names[i], names[j]), *a * *b));
        }
    }
    out
}

/// Test operators: generator monomials followed by seeded random hermitean matrices.
pub fn law_operators(rep: &RepSpec, trials: usize, seed: u64) -> Vec<(String, Operator)> {
    let g = build_generators(rep);
    let mut ops = generator_monomials(&g);
    let mut rng = seeded(seed);
    for k in 0..trials {
        ops.push((format!("random{k}"), Operator::new(random_hermitian(&mut rng, rep.dim()), rep.hbar).expect("square")));
    }
    ops
}

/// 3(iħ)³(Kḟ + ḟK) = H[f, K, ℛ₁, ℛ₂, 𝓛₁, 𝓛₂]H + 𝒬 on monomials and random hermitean f.
pub fn entwined_suite(rep: &RepSpec, trials: usize, seed: u64) -> VerificationReport {
    let mut report = VerificationReport::new("entwined_evolution", LAW_TOL).with_rep(rep.label()).with_seed(seed);
    let mut worst_other = 0.0f64;
    for (name, f) in law_operators(rep, trials, seed) {
        report.trials += 1;
        match entwined_evolution_terms(&f, rep) {
            Ok(terms) => {
                let kind = if name.starts_with("random") { "random_hermitean" } else { "generator_monomial" };
                report.record(&format!("entwined_law_{kind}"), terms.check(RotationSign::Added).residual);
                let anti = [&terms.lhs, &terms.bracket, &terms.rotation]
                    .iter()
                    .map(|op| (*op + &op.adjoint()).norm())
                    .fold(0.0, f64::max);
                if kind == "random_hermitean" {
                    report.record("anti_hermitean_sides", anti / terms.magnitude.max(f64::MIN_POSITIVE));
                }
                worst_other = worst_other.max(terms.check(RotationSign::Subtracted).residual);
            }
            Err(e) => {
                report.record(&format!("entwined_law_{name}"), f64::NAN);
                report.note(e.to_string());
            }
        }
    }
    report.note(format!("largest residual with the rotation term subtracted: {worst_other:.3e}"));
    report
}

/// Outcome of evaluating the symmetrized law under both normalizations.
#[derive(Clone, Debug, PartialEq)]
pub struct ConventionOutcome {
    pub sum_residual: f64,
    pub normalized_residual: f64,
    pub largest_side: f64,
    /// 720-term against 90-term bracket on the law's own sextuple.
    pub full_vs_strings: f64,
}

impl ConventionOutcome {
    pub fn passing(&self, tol: f64) -> Vec<SymmetrizationConvention> {
        let mut out = Vec::new();
        if self.sum_residual < tol {
            out.push(SymmetrizationConvention::Sum);
        }
        if self.normalized_residual < tol {
            out.push(SymmetrizationConvention::Normalized);
        }
        out
    }
}

/// Worst residual of the 4(iħ)³ law per convention over `ops`, bracket side from the 720-term oracle.
pub fn evaluate_conventions(rep: &RepSpec, ops: &[(String, Operator)]) -> Result<ConventionOutcome> {
    let mut out = ConventionOutcome { sum_residual: 0.0, normalized_residual: 0.0, largest_side: 0.0, full_vs_strings: 0.0 };
    for (_, f) in ops {
        let full = symmetrized_evolution_terms(f, rep, BracketEvaluator::Full)?;
        let strings = symmetrized_evolution_terms(f, rep, BracketEvaluator::Strings)?;
        let sum = full.check(SymmetrizationConvention::Sum);
        out.sum_residual = out.sum_residual.max(sum.residual);
        out.normalized_residual = out.normalized_residual.max(full.check(SymmetrizationConvention::Normalized).residual);
        out.largest_side = out.largest_side.max(sum.lhs.norm()).max(sum.rhs.norm());
        out.full_vs_strings = out.full_vs_strings.max((&full.bracket - &strings.bracket).norm() / sum.scale);
    }
    Ok(out)
}

/// Convention selection on `rep`: passes iff exactly one normalization satisfies the law.
pub fn convention_suite(rep: &RepSpec, trials: usize, seed: u64) -> VerificationReport {
    let mut report = VerificationReport::new("symmetrized_convention", LAW_TOL).with_rep(rep.label()).with_seed(seed);
    let ops = law_operators(rep, trials, seed);
    report.trials = ops.len();
    let outcome = match evaluate_conventions(rep, &ops) {
        Ok(o) => o,
        Err(e) => {
            report.record("symmetrized_law", f64::NAN);
            report.note(e.to_string());
            return report;
        }
    };
    record_conventions(&mut report, &outcome, true);
    report
}

/// Writes both residuals as notes and the verdict as checks. With `require_unique`, two passing
/// conventions fail the selection; otherwise only the law residual is judged.
pub fn record_conventions(report: &mut VerificationReport, outcome: &ConventionOutcome, require_unique: bool) {
    report.note(format!("{}: residual {:.3e}", SymmetrizationConvention::Sum, outcome.sum_residual));
    report.note(format!("{}: residual {:.3e}", SymmetrizationConvention::Normalized, outcome.normalized_residual));
    let passing = outcome.passing(LAW_TOL);
    match passing.as_slice() {
        [one] => report.convention_selected = Some(one.to_string()),
        [] => report.convention_selected = None,
        _ => {
            report.convention_selected = Some("ambiguous".to_string());
            report.note(format!("both conventions satisfy the law; largest side norm {:.3e}", outcome.largest_side));
        }
    }
    report.record("symmetrized_law", outcome.sum_residual.min(outcome.normalized_residual));
    report.record_with("law_bracket_full_vs_strings", outcome.full_vs_strings, QNB_TOL);
    if require_unique {
        report.record_flag("unique_convention", passing.len() == 1);
    }
}

/// Solve K X + X K = K F + F K and compare X with F on the nonsingular eigenpairs of K.
pub fn jordan_kurosh_suite(rep: &RepSpec, trials: usize, seed: u64, mode: JkMode) -> VerificationReport {
    let mut report = VerificationReport::new("jordan_kurosh", LAW_TOL).with_rep(rep.label()).with_seed(seed);
    let k = build_generators(rep).chiral_sum3();
    let mut rng = seeded(seed);
    let mut singular = 0;
    for _ in 0..trials {
        report.trials += 1;
        let f = Operator::new(random_hermitian(&mut rng, rep.dim()), rep.hbar).expect("square");
        let b = &(&k * &f) + &(&f * &k);
        match jordan_kurosh_solve(&k, &b, mode) {
            Ok(sol) => {
                let u = &sol.eigenvectors;
                let xt = u.adjoint() * sol.solution.matrix() * u;
                let ft = u.adjoint() * f.matrix() * u;
                let mut worst = 0.0f64;
                let mut leak = 0.0f64;
                for i in 0..rep.dim() {
                    for j in 0..rep.dim() {
                        if sol.is_singular(i, j) {
                            leak = leak.max(xt[(i, j)].norm());
                        } else {
                            worst = worst.max((xt[(i, j)] - ft[(i, j)]).norm());
                        }
                    }
                }
                report.record("round_trip_nonsingular", worst / f.spectral_norm().max(f64::MIN_POSITIVE));
                report.record("singular_components_zeroed", leak);
                report.record("incompatibility", sol.incompatibility.sqrt() / b.norm().max(f64::MIN_POSITIVE));
                singular = singular.max(sol.singular_pairs);
            }
            Err(e) => {
                report.record("round_trip_nonsingular", f64::NAN);
                report.note(e.to_string());
            }
        }
    }
    report.note(format!("singular eigenpairs detected: {singular}"));
    report
}

pub fn sector_suite(rep: &RepSpec, trials: usize, seed: u64) -> VerificationReport {
    let mut report = VerificationReport::new("sector_expectation", SECTOR_TOL).with_rep(rep.label()).with_seed(seed);
    for (_, f) in law_operators(rep, trials, seed) {
        report.trials += 1;
        match sector_expectation_check(rep, &f) {
            Ok(sub) => {
                for chk in sub.checks {
                    report.record(&chk.name, chk.residual);
                }
            }
            Err(e) => {
                report.record("sector_proportionality", f64::NAN);
                report.note(e.to_string());
            }
        }
    }
    report
}
