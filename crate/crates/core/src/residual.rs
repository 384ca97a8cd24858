//! Named residuals collected by the verification routines.

use nalgebra::DMatrix;

use crate::linalg::max_abs;
use crate::tolerance::Tolerance;

#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub name: String,
    pub max_abs: f64,
    pub frobenius: f64,
    pub passed: bool,
}

/// A list of residuals, each accepted when its max-abs entry is at most
/// `eps * max(1, scale)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub tolerance: f64,
    pub entries: Vec<Residual>,
}

impl ResidualReport {
    pub fn new(tol: &Tolerance) -> Self {
        Self {
            tolerance: tol.eps,
            entries: Vec::new(),
        }
    }

    fn tol(&self) -> Tolerance {
        Tolerance::new(self.tolerance)
    }

    pub fn push_matrix(&mut self, name: impl Into<String>, residual: &DMatrix<f64>, scale: f64) {
        let m = max_abs(residual);
        let f = residual.norm();
        self.push_values(name, m, f, scale);
    }

    pub fn push_scalar(&mut self, name: impl Into<String>, residual: f64, scale: f64) {
        self.push_values(name, residual.abs(), residual.abs(), scale);
    }

    pub fn push_values(&mut self, name: impl Into<String>, max_abs: f64, frobenius: f64, scale: f64) {
        let passed = max_abs.is_finite() && self.tol().is_zero(max_abs, scale);
        self.entries.push(Residual {
            name: name.into(),
            max_abs,
            frobenius,
            passed,
        });
    }

    /// Records a pass/fail condition that has no numeric residual.
    pub fn push_flag(&mut self, name: impl Into<String>, ok: bool) {
        self.entries.push(Residual {
            name: name.into(),
            max_abs: if ok { 0.0 } else { 1.0 },
            frobenius: if ok { 0.0 } else { 1.0 },
            passed: ok,
        });
    }

    /// Merges entries of `other` under a common prefix.
    pub fn extend_prefixed(&mut self, prefix: &str, other: ResidualReport) {
        for mut e in other.entries {
            e.name = format!("{prefix}{}", e.name);
            self.entries.push(e);
        }
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn max(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.max_abs))
    }

    pub fn failures(&self) -> impl Iterator<Item = &Residual> {
        self.entries.iter().filter(|e| !e.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Residual> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// Largest residual among entries whose name starts with `prefix`.
    pub fn max_with_prefix(&self, prefix: &str) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.name.starts_with(prefix))
            .fold(0.0, |m, e| m.max(e.max_abs))
    }
}
