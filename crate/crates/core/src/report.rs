//! Verification reports: named residuals against pinned tolerances.

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// Largest residual observed under one name, with its own tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedResidual {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationReport {
    pub schema: u32,
    pub test_name: String,
    pub rep: Option<String>,
    pub seed: Option<u64>,
    pub trials: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub convention_selected: Option<String>,
    pub pass: bool,
    pub checks: Vec<NamedResidual>,
    pub notes: Vec<String>,
}

/// Non-finite residuals are clamped so the report stays valid JSON; they always fail.
fn sanitize(residual: f64) -> f64 {
    if residual.is_finite() {
        residual
    } else {
        f64::MAX
    }
}

impl VerificationReport {
    pub fn new(test_name: impl Into<String>, tolerance: f64) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            test_name: test_name.into(),
            rep: None,
            seed: None,
            trials: 0,
            max_residual: 0.0,
            tolerance,
            convention_selected: None,
            pass: true,
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_rep(mut self, rep: impl Into<String>) -> Self {
        self.rep = Some(rep.into());
        self
    }

    /// Record a residual under `name` at the report tolerance.
    pub fn record(&mut self, name: &str, residual: f64) {
        let tol = self.tolerance;
        self.record_with(name, residual, tol);
    }

    /// Record a residual under `name` with its own tolerance. Repeated names keep the maximum.
    pub fn record_with(&mut self, name: &str, residual: f64, tolerance: f64) {
        let failed = !(residual < tolerance);
        let residual = sanitize(residual);
        match self.checks.iter_mut().find(|c| c.name == name) {
            Some(c) => {
                c.residual = c.residual.max(residual);
                c.samples += 1;
                c.pass &= !failed;
            }
            None => self.checks.push(NamedResidual {
                name: name.to_string(),
                residual,
                tolerance,
                samples: 1,
                pass: !failed,
            }),
        }
        self.refresh();
    }

    /// A boolean verdict that has no numeric residual.
    pub fn record_flag(&mut self, name: &str, ok: bool) {
        self.record_with(name, if ok { 0.0 } else { 1.0 }, 0.5);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    fn refresh(&mut self) {
        self.max_residual = self.checks.iter().map(|c| c.residual).fold(0.0, f64::max);
        self.pass = self.checks.iter().all(|c| c.pass);
    }

    pub fn check(&self, name: &str) -> Option<&NamedResidual> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// `diff / scale`, zero when both vanish.
pub fn relative_residual(diff: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

/// |a − b| / max(|a|, |b|).
pub fn relative_difference(a: f64, b: f64) -> f64 {
    relative_residual((a - b).abs(), a.abs().max(b.abs()))
}

/// max_i |aᵢ − bᵢ| / max(‖a‖∞, ‖b‖∞).
pub fn relative_difference_vec(a: &[f64], b: &[f64]) -> f64 {
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let scale = a.iter().chain(b).map(|x| x.abs()).fold(0.0, f64::max);
    relative_residual(diff, scale)
}
