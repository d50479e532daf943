//! The acceptance suite: every criterion as a list of measured checks.

mod appendix;
mod family;
mod structure;

use std::fmt;
use std::path::PathBuf;

use serde::Serialize;

use crate::bath::SpectralModel;
use crate::dynamics::Method;

pub use appendix::{appendix_mode, criteria as appendix_criteria};
pub use family::{
    avoided_crossings, family_distances, synthetic_density, synthetic_sweep, AvoidedCrossing, FAMILY_DISTANCES_NM,
};
pub use structure::{dark_state, dipoles, flat_bath, properties, random_cylindrical_model};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Bound {
    Below { limit: f64 },
    Above { limit: f64 },
    Within { lo: f64, hi: f64 },
    Equal { value: f64 },
}

impl Bound {
    pub fn holds(&self, x: f64) -> bool {
        match *self {
            Bound::Below { limit } => x < limit,
            Bound::Above { limit } => x > limit,
            Bound::Within { lo, hi } => x >= lo && x <= hi,
            Bound::Equal { value } => x == value,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Bound::Below { limit } => write!(f, "< {limit:.1e}"),
            Bound::Above { limit } => write!(f, "> {limit:.1e}"),
            Bound::Within { lo, hi } => write!(f, "in [{lo:.1e}, {hi:.1e}]"),
            Bound::Equal { value } => write!(f, "== {value}"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub label: String,
    pub measured: f64,
    pub bound: Bound,
    pub passed: bool,
}

impl Check {
    pub fn new(label: impl Into<String>, measured: f64, bound: Bound) -> Self {
        Self {
            label: label.into(),
            measured,
            passed: bound.holds(measured),
            bound,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Criterion {
    pub id: u8,
    pub name: String,
    pub checks: Vec<Check>,
    /// Set when the criterion could not be evaluated at all.
    pub error: Option<String>,
    pub note: Option<String>,
}

impl Criterion {
    fn new(id: u8, name: &str) -> Self {
        Self {
            id,
            name: name.into(),
            checks: Vec::new(),
            error: None,
            note: None,
        }
    }

    fn failed(id: u8, name: &str, err: impl fmt::Display) -> Self {
        Self {
            error: Some(err.to_string()),
            ..Self::new(id, name)
        }
    }

    pub fn passed(&self) -> bool {
        self.error.is_none() && !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    /// One line: verdict, name and every measured value.
    pub fn line(&self) -> String {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let body = match &self.error {
            Some(e) => format!("error: {e}"),
            None => self
                .checks
                .iter()
                .map(|c| {
                    let mark = if c.passed { "" } else { " (!)" };
                    format!("{} {:.3e} {}{mark}", c.label, c.measured, c.bound)
                })
                .collect::<Vec<_>>()
                .join("; "),
        };
        format!("[{verdict}] {}. {}: {body}", self.id, self.name)
    }
}

pub struct VerifySettings {
    /// Bath of the lossy-mode comparison and of the dark-state check.
    pub model: SpectralModel,
    pub window_fs: f64,
    pub step_fs: f64,
    pub truncation: u32,
    pub method: Method,
    pub seed: u64,
    pub property_models: usize,
    /// Scratch space for the synthetic sweep files.
    pub work_dir: PathBuf,
}

impl VerifySettings {
    pub fn with_work_dir(work_dir: PathBuf) -> Self {
        Self {
            model: SpectralModel::LorentzianAxial(appendix_mode()),
            window_fs: 400_000.0,
            step_fs: 500.0,
            truncation: 1,
            method: Method::Exponential,
            seed: 20_251,
            property_models: 100,
            work_dir,
        }
    }
}

pub fn run_all(s: &VerifySettings) -> Vec<Criterion> {
    let ((mut dynamics, structural), sweep) = rayon::join(
        || {
            rayon::join(
                || appendix::criteria(s),
                || {
                    vec![
                        structure::dark_state(&s.model),
                        structure::flat_bath(),
                        structure::properties(s.seed, s.property_models),
                        structure::dipoles(),
                    ]
                },
            )
        },
        || family::synthetic_sweep(&s.work_dir),
    );
    dynamics.extend(structural);
    dynamics.push(sweep);
    dynamics.sort_by_key(|c| c.id);
    dynamics
}
