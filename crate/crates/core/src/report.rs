//! Structured outcomes of residual and oracle checks.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    /// Exact evaluation; `residual` is the exact value(s) as `num/den` strings.
    Exact { zero: bool, residual: Vec<String> },
    /// Deterministic floating-point comparison.
    Numeric { residual: f64, tolerance: f64 },
    /// Monte Carlo comparison against a reference value.
    Statistical {
        estimate: [f64; 2],
        reference: [f64; 2],
        std_error: f64,
        sigma_distance: f64,
        max_sigma: f64,
        samples: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub passed: bool,
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub inputs: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn exact<S: Into<String>>(check: S, residual: Vec<String>) -> Self {
        let zero = residual.iter().all(|r| r == "0/1" || r == "0");
        Self {
            check: check.into(),
            passed: zero,
            outcome: Outcome::Exact { zero, residual },
            seed: None,
            inputs: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn numeric<S: Into<String>>(check: S, residual: f64, tolerance: f64) -> Self {
        Self {
            check: check.into(),
            passed: residual.is_finite() && residual <= tolerance,
            outcome: Outcome::Numeric { residual, tolerance },
            seed: None,
            inputs: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn statistical<S: Into<String>>(
        check: S,
        estimate: [f64; 2],
        reference: [f64; 2],
        std_error: f64,
        max_sigma: f64,
        samples: u64,
    ) -> Self {
        let dist = ((estimate[0] - reference[0]).powi(2) + (estimate[1] - reference[1]).powi(2)).sqrt();
        let sigma_distance = if std_error > 0.0 {
            dist / std_error
        } else if dist == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        Self {
            check: check.into(),
            passed: sigma_distance <= max_sigma,
            outcome: Outcome::Statistical {
                estimate,
                reference,
                std_error,
                sigma_distance,
                max_sigma,
                samples,
            },
            seed: None,
            inputs: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_input<K: Into<String>, V: ToString>(mut self, key: K, value: V) -> Self {
        self.inputs.insert(key.into(), value.to_string());
        self
    }

    pub fn with_note<S: Into<String>>(mut self, note: S) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn fail_with<S: Into<String>>(mut self, note: S) -> Self {
        self.passed = false;
        self.notes.push(note.into());
        self
    }

    /// Combines several reports; passes when all pass.
    pub fn all<S: Into<String>>(check: S, parts: &[VerificationReport]) -> Self {
        let residual: Vec<String> = parts
            .iter()
            .flat_map(|p| match &p.outcome {
                Outcome::Exact { residual, .. } => residual.clone(),
                _ => Vec::new(),
            })
            .collect();
        let mut r = Self::exact(check, residual);
        r.passed = parts.iter().all(|p| p.passed);
        if let Outcome::Exact { zero, .. } = &mut r.outcome {
            *zero = r.passed;
        }
        for p in parts.iter().filter(|p| !p.passed) {
            r.notes.push(format!("failed: {}", p.check));
        }
        r
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{status}] {}", self.check)?;
        match &self.outcome {
            Outcome::Exact { zero, residual } => {
                if *zero {
                    write!(f, " (exact zero x{})", residual.len())?;
                } else {
                    let bad: Vec<&String> = residual.iter().filter(|r| *r != "0/1").take(3).collect();
                    write!(f, " (non-zero residuals: {bad:?})")?;
                }
            }
            Outcome::Numeric { residual, tolerance } => {
                write!(f, " (residual {residual:.3e}, tol {tolerance:.1e})")?;
            }
            Outcome::Statistical { sigma_distance, samples, std_error, .. } => {
                write!(f, " ({sigma_distance:.2} sigma, se {std_error:.2e}, n={samples})")?;
            }
        }
        if let Some(seed) = self.seed {
            write!(f, " seed={seed}")?;
        }
        Ok(())
    }
}
