//! Flow laws of the Kepler problem and their numerical integration.
//!
//! Three right-hand sides produce the same phase-space velocity:
//! Hamilton's equations, the Nambu flow
//! `H² {zⁱ, ln(ℛ₃+𝓛₃), ℛ₁, ℛ₂, 𝓛₁, 𝓛₂}`, and the alternative Nambu flow
//! `{zⁱ, H, ℛ₁, ℛ₂, 𝓛₁, 𝓛₂} / (4ℛ₃𝓛₃)`. Both Nambu forms go through
//! [`cnb6_det`] on analytic invariant gradients.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cnb::{cnb6_det, coordinate_gradient, log_gradient};
use crate::error::{Error, Result};
use crate::phase_space::{invariant_gradients, invariants, Gradient, PhaseState};
use crate::report::VerificationReport;

/// Guard for ℛ₃+𝓛₃ and |ℛ₃𝓛₃| in the Nambu forms.
pub const DEGENERACY_THRESHOLD: f64 = 1e-6;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhsKind {
    Hamilton,
    NambuLog,
    NambuAlt,
}

impl RhsKind {
    pub const ALL: [RhsKind; 3] = [RhsKind::Hamilton, RhsKind::NambuLog, RhsKind::NambuAlt];

    pub fn eval(self, z: &PhaseState) -> Result<Gradient> {
        match self {
            RhsKind::Hamilton => hamilton_rhs(z),
            RhsKind::NambuLog => nambu_rhs(z),
            RhsKind::NambuAlt => alt_nambu_rhs(z),
        }
    }
}

impl fmt::Display for RhsKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RhsKind::Hamilton => "hamilton",
            RhsKind::NambuLog => "nambu",
            RhsKind::NambuAlt => "alt",
        })
    }
}

impl FromStr for RhsKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hamilton" => Ok(RhsKind::Hamilton),
            "nambu" | "nambu_log" => Ok(RhsKind::NambuLog),
            "alt" | "nambu_alt" => Ok(RhsKind::NambuAlt),
            other => Err(Error::InvalidArgument(format!("unknown rhs kind '{other}'"))),
        }
    }
}

/// dr/dt = p, dp/dt = −r/r³
pub fn hamilton_rhs(z: &PhaseState) -> Result<Gradient> {
    let r = z.radius();
    if !(r > 0.0) {
        return Err(Error::SingularPoint);
    }
    let f = -1.0 / (r * r * r);
    Ok([z.px, f * z.x, z.py, f * z.y, z.pz, f * z.z])
}

/// zⁱ-th component of a six-slot bracket with the coordinate in slot one.
fn coordinate_brackets(tail: [Gradient; 5], scale: f64) -> Gradient {
    std::array::from_fn(|i| {
        let rows = [coordinate_gradient(i), tail[0], tail[1], tail[2], tail[3], tail[4]];
        scale * cnb6_det(&rows)
    })
}

pub fn nambu_rhs(z: &PhaseState) -> Result<Gradient> {
    let inv = invariants(z)?;
    if inv.zero_angular_momentum {
        return Err(Error::ZeroAngularMomentum { magnitude: inv.angular_momentum.norm() });
    }
    let k = inv.chiral_sum3();
    if k <= DEGENERACY_THRESHOLD {
        return Err(Error::DegenerateInvariants { what: "R3 + Lcal3", value: k });
    }
    let g = invariant_gradients(z)?;
    let grad_k: Gradient = std::array::from_fn(|j| g.right[2][j] + g.left[2][j]);
    let tail = [log_gradient(&grad_k, k), g.right[0], g.right[1], g.left[0], g.left[1]];
    Ok(coordinate_brackets(tail, inv.energy * inv.energy))
}

pub fn alt_nambu_rhs(z: &PhaseState) -> Result<Gradient> {
    let inv = invariants(z)?;
    let prod = inv.chiral_product3();
    if prod.abs() <= DEGENERACY_THRESHOLD {
        return Err(Error::DegenerateInvariants { what: "R3 * Lcal3", value: prod });
    }
    let g = invariant_gradients(z)?;
    let tail = [g.energy, g.right[0], g.right[1], g.left[0], g.left[1]];
    Ok(coordinate_brackets(tail, 0.25 / prod))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub state: PhaseState,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
    pub rhs_kind: RhsKind,
    pub tolerance: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl Trajectory {
    pub fn initial(&self) -> &PhaseState {
        &self.points[0].state
    }

    pub fn last(&self) -> &TrajectoryPoint {
        self.points.last().expect("trajectory always holds its initial point")
    }

    /// State recorded at exactly time `t` (checkpoints and the endpoint are hit exactly).
    pub fn state_at(&self, t: f64) -> Option<&PhaseState> {
        self.points.iter().find(|p| p.t == t).map(|p| &p.state)
    }

    /// CSV: `t,x,px,y,py,z,pz,H,L3,kepler_residual`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,x,px,y,py,z,pz,H,L3,kepler_residual")?;
        for p in &self.points {
            let (h, l3, kepler) = match invariants(&p.state) {
                Ok(inv) => (inv.energy, inv.angular_momentum[2], inv.kepler_residual),
                Err(_) => (f64::NAN, f64::NAN, f64::NAN),
            };
            let mut row = vec![p.t];
            row.extend(p.state.to_array());
            row.extend([h, l3, kepler]);
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegratorConfig {
    /// Per-step mixed tolerance: |err_i| ≤ tol · (1 + max(|y_i|, |y_i'|)).
    pub tolerance: f64,
    pub max_steps: usize,
    /// Times the integrator must land on exactly (beyond the endpoint).
    pub checkpoints: Vec<f64>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { tolerance: DEFAULT_TOLERANCE, max_steps: 1_000_000, checkpoints: Vec::new() }
    }
}

impl IntegratorConfig {
    pub fn with_tolerance(tolerance: f64) -> Self {
        Self { tolerance, ..Self::default() }
    }
}

// Dormand-Prince 5(4) tableau; the system is autonomous so the nodes are unused.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const MIN_STEP: f64 = 1e-14;

fn axpy(y: &Gradient, h: f64, k: &[Gradient; 7], coeffs: &[f64], upto: usize) -> Gradient {
    std::array::from_fn(|i| y[i] + h * (0..upto).map(|s| coeffs[s] * k[s][i]).sum::<f64>())
}

/// Adaptive Dormand-Prince integration from t = 0 to `t_max`, recording every accepted step.
pub fn integrate(z0: &PhaseState, kind: RhsKind, t_max: f64, config: &IntegratorConfig) -> Result<Trajectory> {
    if !(t_max >= 0.0) || !t_max.is_finite() {
        return Err(Error::InvalidArgument(format!("t_max must be finite and nonnegative, got {t_max}")));
    }
    if !(config.tolerance > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", config.tolerance)));
    }
    invariants(z0)?;
    let mut k1 = kind.eval(z0)?;

    let mut stops: Vec<f64> = config.checkpoints.iter().copied().filter(|&t| t > 0.0 && t < t_max).collect();
    stops.push(t_max);
    stops.sort_by(f64::total_cmp);
    stops.dedup();

    let mut traj = Trajectory {
        points: vec![TrajectoryPoint { t: 0.0, state: *z0 }],
        rhs_kind: kind,
        tolerance: config.tolerance,
        accepted_steps: 0,
        rejected_steps: 0,
    };
    if t_max == 0.0 {
        return Ok(traj);
    }

    let tol = config.tolerance;
    let mut y = z0.to_array();
    let mut t = 0.0;
    let ynorm = y.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let fnorm = k1.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-10);
    let mut h = (0.01 * ynorm / fnorm * tol.powf(0.2) * 10.0).min(t_max);
    let mut next_stop = 0;

    while next_stop < stops.len() {
        if traj.accepted_steps + traj.rejected_steps >= config.max_steps {
            return Err(Error::StepFailure { t, step: h });
        }
        let target = stops[next_stop];
        let mut step = h;
        let mut lands = false;
        if t + step >= target || target - (t + step) < 1e-12 * target.max(1.0) {
            step = target - t;
            lands = true;
        }
        if step < MIN_STEP {
            return Err(Error::StepFailure { t, step });
        }

        let mut k = [[0.0; 6]; 7];
        k[0] = k1;
        let mut stage_error = None;
        for s in 1..7 {
            let ys = axpy(&y, step, &k, &A[s], s);
            match kind.eval(&PhaseState::from_array(ys)) {
                Ok(v) => k[s] = v,
                Err(e) => {
                    stage_error = Some(e);
                    break;
                }
            }
        }
        if let Some(e) = stage_error {
            // Shrink first; only a persistent failure is a domain exit.
            traj.rejected_steps += 1;
            h = step * 0.25;
            if h < MIN_STEP {
                return Err(Error::DomainExit { t, source: Box::new(e) });
            }
            continue;
        }

        let y_new = axpy(&y, step, &k, &A[6], 6);
        let err = (0..6)
            .map(|i| {
                let e: f64 = (0..7).map(|s| E[s] * k[s][i]).sum::<f64>() * step;
                e.abs() / (tol * (1.0 + y[i].abs().max(y_new[i].abs())))
            })
            .fold(0.0f64, f64::max);

        if err <= 1.0 {
            t = if lands { target } else { t + step };
            y = y_new;
            k1 = k[6];
            let state = PhaseState::from_array(y);
            if let Err(e) = invariants(&state) {
                return Err(Error::DomainExit { t, source: Box::new(e) });
            }
            traj.points.push(TrajectoryPoint { t, state });
            traj.accepted_steps += 1;
            if lands {
                next_stop += 1;
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            // A step clipped to land on a stop says nothing about the natural step size.
            h = if lands { h.max(step * factor) } else { step * factor };
        } else {
            traj.rejected_steps += 1;
            h = step * (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
        }
    }
    Ok(traj)
}

/// Max drift of every conserved quantity along `traj`, checked against `threshold`.
///
/// Tracks H, L, A, the five Nambu-flow invariants ℛ₁, ℛ₂, 𝓛₁, 𝓛₂, ℛ₃+𝓛₃,
/// and the Kepler residual r̂·A + 1 − L²/r (absolute, not drift).
pub fn conservation_report(traj: &Trajectory, threshold: f64) -> VerificationReport {
    let mut report = VerificationReport::new(format!("conservation_{}", traj.rhs_kind), threshold);
    report.trials = traj.points.len();
    let Ok(start) = invariants(traj.initial()) else {
        report.record("initial_state", f64::NAN);
        return report;
    };
    let scalars = |inv: &crate::phase_space::InvariantSet| -> Vec<(&'static str, f64)> {
        vec![
            ("H", inv.energy),
            ("L1", inv.angular_momentum[0]),
            ("L2", inv.angular_momentum[1]),
            ("L3", inv.angular_momentum[2]),
            ("A1", inv.prl[0]),
            ("A2", inv.prl[1]),
            ("A3", inv.prl[2]),
            ("R1", inv.right[0]),
            ("R2", inv.right[1]),
            ("Lcal1", inv.left[0]),
            ("Lcal2", inv.left[1]),
            ("R3+Lcal3", inv.chiral_sum3()),
        ]
    };
    let reference = scalars(&start);
    for p in &traj.points {
        match invariants(&p.state) {
            Ok(inv) => {
                for ((name, v0), (_, v)) in reference.iter().zip(scalars(&inv)) {
                    report.record(&format!("drift_{name}"), (v - v0).abs());
                }
                report.record("kepler_residual", inv.kepler_residual.abs());
            }
            Err(_) => report.record("bound_state", f64::NAN),
        }
    }
    report
}

/// Largest max-norm state difference over the times both trajectories recorded exactly.
pub fn max_divergence(a: &Trajectory, b: &Trajectory) -> f64 {
    a.points
        .iter()
        .filter_map(|p| {
            b.state_at(p.t).map(|s| {
                let (x, y) = (p.state.to_array(), s.to_array());
                (0..6).map(|i| (x[i] - y[i]).abs()).fold(0.0, f64::max)
            })
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::relative_difference_vec;
    use crate::sampling::{random_bound_state, seeded};
    use std::f64::consts::PI;

    fn circular() -> PhaseState {
        PhaseState::new([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    }

    fn eccentric() -> PhaseState {
        PhaseState::new([1.0, 0.0, 0.0], [0.0, 0.5, 0.0])
    }

    #[test]
    fn hamilton_rhs_hand_values() {
        assert_eq!(hamilton_rhs(&circular()).unwrap(), [0.0, -1.0, 1.0, 0.0, 0.0, 0.0]);
        let rest = PhaseState::new([2.0, 0.0, 0.0], [0.0; 3]);
        let v = hamilton_rhs(&rest).unwrap();
        assert_eq!([v[0], v[2], v[4]], [0.0; 3]);
        assert_eq!(v[1], -0.25);
        assert_eq!(hamilton_rhs(&PhaseState::new([0.0; 3], [1.0, 0.0, 0.0])), Err(Error::SingularPoint));
    }

    #[test]
    fn nambu_forms_at_circular_point() {
        let expect = [0.0, -1.0, 1.0, 0.0, 0.0, 0.0];
        for v in [nambu_rhs(&circular()).unwrap(), alt_nambu_rhs(&circular()).unwrap()] {
            for i in 0..6 {
                assert!((v[i] - expect[i]).abs() < 1e-14, "{v:?}");
            }
        }
    }

    #[test]
    fn three_laws_agree_on_random_points() {
        let mut rng = seeded(2024);
        for _ in 0..100 {
            let z = random_bound_state(&mut rng);
            let h = hamilton_rhs(&z).unwrap();
            assert!(relative_difference_vec(&nambu_rhs(&z).unwrap(), &h) < 1e-8);
            assert!(relative_difference_vec(&alt_nambu_rhs(&z).unwrap(), &h) < 1e-8);
        }
    }

    #[test]
    fn nambu_guards() {
        // Retrograde orbit: L₃ < 0 so ℛ₃+𝓛₃ = 2L₃ < 0
        let retro = PhaseState::new([1.0, 0.0, 0.0], [0.0, -1.0, 0.0]);
        assert!(matches!(nambu_rhs(&retro), Err(Error::DegenerateInvariants { .. })));
        // Orbit in the x-z plane: L₃ = 0
        let polar = PhaseState::new([1.0, 0.0, 0.0], [0.0, 0.0, 1.0]);
        assert!(matches!(nambu_rhs(&polar), Err(Error::DegenerateInvariants { .. })));
        assert!(matches!(alt_nambu_rhs(&polar), Err(Error::DegenerateInvariants { .. })));
        let radial = PhaseState::new([1.0, 0.0, 0.0], [0.0; 3]);
        assert!(matches!(nambu_rhs(&radial), Err(Error::ZeroAngularMomentum { .. })));
        assert!(hamilton_rhs(&radial).is_ok());
        let unbound = PhaseState::new([1.0, 0.0, 0.0], [0.0, 3.0, 0.0]);
        assert!(matches!(nambu_rhs(&unbound), Err(Error::UnboundState { .. })));
    }

    #[test]
    fn zero_duration_keeps_only_initial_state() {
        let t = integrate(&circular(), RhsKind::NambuLog, 0.0, &IntegratorConfig::default()).unwrap();
        assert_eq!(t.points.len(), 1);
        assert_eq!(t.points[0].state, circular());
    }

    #[test]
    fn circular_orbit_closes_for_every_law() {
        for kind in RhsKind::ALL {
            let t = integrate(&circular(), kind, 2.0 * PI, &IntegratorConfig::default()).unwrap();
            let end = t.last();
            assert_eq!(end.t, 2.0 * PI);
            let (a, b) = (end.state.to_array(), circular().to_array());
            let gap = (0..6).map(|i| (a[i] - b[i]).abs()).fold(0.0, f64::max);
            assert!(gap < 1e-6, "{kind}: {gap:e}");
            assert!(t.points.windows(2).all(|w| w[1].t > w[0].t));
        }
    }

    #[test]
    fn eccentric_orbit_conserves_invariants() {
        let period = 2.0 * PI * (4.0f64 / 7.0).powf(1.5);
        for kind in RhsKind::ALL {
            let t = integrate(&eccentric(), kind, period, &IntegratorConfig::default()).unwrap();
            let report = conservation_report(&t, 1e-8);
            assert!(report.pass, "{kind}: {report:#?}");
        }
    }

    #[test]
    fn hamilton_and_nambu_trajectories_coincide() {
        let period = 2.0 * PI * (4.0f64 / 7.0).powf(1.5);
        let cfg = IntegratorConfig { checkpoints: (1..20).map(|i| period * i as f64 / 20.0).collect(), ..Default::default() };
        let a = integrate(&eccentric(), RhsKind::Hamilton, period, &cfg).unwrap();
        let b = integrate(&eccentric(), RhsKind::NambuLog, period, &cfg).unwrap();
        assert!(max_divergence(&a, &b) < 1e-5);
        assert!(b.state_at(period).is_some());
    }

    #[test]
    fn time_reversal_returns_to_start() {
        let z0 = eccentric();
        let fwd = integrate(&z0, RhsKind::Hamilton, 1.7, &IntegratorConfig::default()).unwrap();
        let back = integrate(&fwd.last().state.reversed(), RhsKind::Hamilton, 1.7, &IntegratorConfig::default()).unwrap();
        let (a, b) = (back.last().state.to_array(), z0.reversed().to_array());
        assert!((0..6).all(|i| (a[i] - b[i]).abs() < 1e-5));
    }

    #[test]
    fn frozen_trajectory_has_zero_drift() {
        let z = eccentric();
        let traj = Trajectory {
            points: (0..5).map(|i| TrajectoryPoint { t: i as f64, state: z }).collect(),
            rhs_kind: RhsKind::Hamilton,
            tolerance: 1e-10,
            accepted_steps: 4,
            rejected_steps: 0,
        };
        let r = conservation_report(&traj, 1e-15);
        assert_eq!(r.check("drift_H").unwrap().residual, 0.0);
        assert_eq!(r.check("drift_A1").unwrap().residual, 0.0);
    }

    #[test]
    fn integration_leaving_the_guarded_domain_is_reported() {
        // Radial infall ends at the collision singularity.
        let z = PhaseState::new([1.0, 0.0, 0.0], [-0.1, 0.0, 0.0]);
        let err = integrate(&z, RhsKind::Hamilton, 10.0, &IntegratorConfig::default()).unwrap_err();
        assert!(matches!(err, Error::DomainExit { .. } | Error::StepFailure { .. }), "{err:?}");
    }

    #[test]
    fn csv_has_header_and_full_precision() {
        let t = integrate(&circular(), RhsKind::Hamilton, 0.0, &IntegratorConfig::default()).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,x,px,y,py,z,pz,H,L3,kepler_residual");
        let row: Vec<f64> = lines.next().unwrap().split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(row, vec![0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, -0.5, 1.0, 0.0]);
        assert!(lines.next().is_none());
    }

    #[test]
    fn rhs_kind_parsing() {
        assert_eq!("nambu".parse::<RhsKind>().unwrap(), RhsKind::NambuLog);
        assert_eq!("alt".parse::<RhsKind>().unwrap(), RhsKind::NambuAlt);
        assert!("leapfrog".parse::<RhsKind>().is_err());
    }
}
