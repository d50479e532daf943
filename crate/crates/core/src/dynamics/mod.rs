//! Time propagation of density matrices under the Bloch-Redfield, Lindblad
//! and effective generators, and the exact atom + lossy-mode reference.

mod expo;
mod generator;
mod integrate;
mod oracle;
mod runs;

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use expo::{step_propagator, Support, MAX_SUPPORT};
pub use generator::{GeneratorKind, SparseGenerator};
pub use integrate::{dopri5, Tolerance};
pub use oracle::{build_oracle, Oracle, OracleMode, OracleModel, Polarization};
pub use runs::{oracle_modes, run, run_all, RunRequest, RunSetup, Variant};

/// How ρ(t) is advanced between sample times.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Method {
    /// exp(ℒ Δt) of the generator restricted to the reachable support.
    Exponential,
    /// Adaptive Dormand-Prince 5(4) on the full matrix.
    RungeKutta { rtol: f64, atol: f64 },
}

impl Default for Method {
    fn default() -> Self {
        Method::Exponential
    }
}

/// Expectation value reported at each sample time.
#[derive(Clone, Debug)]
pub enum Observable {
    /// Σ_k ρ_kk over the listed indices of the generator's space.
    Population { name: String, indices: Vec<usize> },
    /// Re tr(O ρ) for a Hermitian O.
    Matrix { name: String, op: DMatrix<Complex64> },
}

impl Observable {
    pub fn name(&self) -> &str {
        match self {
            Observable::Population { name, .. } | Observable::Matrix { name, .. } => name,
        }
    }

    fn eval(&self, rho: &DMatrix<Complex64>) -> f64 {
        match self {
            Observable::Population { indices, .. } => indices.iter().map(|&k| rho[(k, k)].re).sum(),
            Observable::Matrix { op, .. } => (op * rho).trace().re,
        }
    }
}

pub struct PropagationJob<'a> {
    pub generator: &'a SparseGenerator,
    pub initial: DMatrix<Complex64>,
    /// Atomic units, strictly increasing from 0.
    pub times: Vec<f64>,
    pub observables: Vec<Observable>,
    pub method: Method,
    /// Record trace and minimum eigenvalue of ρ at every sample.
    pub diagnostics: bool,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct TimeSeries {
    pub generator: String,
    pub times: Vec<f64>,
    pub names: Vec<String>,
    /// values[t][observable]
    pub values: Vec<Vec<f64>>,
    pub trace: Vec<f64>,
    pub min_eigenvalue: Vec<f64>,
}

impl TimeSeries {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.names.iter().position(|n| n == name)?;
        Some(self.values.iter().map(|row| row[k]).collect())
    }

    pub fn max_trace_drift(&self) -> f64 {
        self.trace.iter().map(|t| (t - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

const TRACE_DRIFT_LIMIT: f64 = 1e-6;

fn validate(job: &PropagationJob) -> Result<()> {
    let n = job.generator.dim();
    if job.initial.nrows() != n || job.initial.ncols() != n {
        return Err(Error::Dimension {
            expected: n,
            got: job.initial.nrows(),
        });
    }
    let rho = &job.initial;
    if (rho - rho.adjoint()).norm() > 1e-12 {
        return Err(Error::InvalidInput("initial density matrix is not Hermitian".into()));
    }
    if (rho.trace().re - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidInput("initial density matrix does not have unit trace".into()));
    }
    if min_eigenvalue(rho) < -1e-12 {
        return Err(Error::InvalidInput("initial density matrix is not positive semidefinite".into()));
    }
    if job.times.first() != Some(&0.0) {
        return Err(Error::InvalidInput("time grid must start at 0".into()));
    }
    if job.times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("time grid must be strictly increasing".into()));
    }
    Ok(())
}

pub fn min_eigenvalue(rho: &DMatrix<Complex64>) -> f64 {
    let h = (rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn propagate(job: &PropagationJob) -> Result<TimeSeries> {
    validate(job)?;
    let mut series = TimeSeries {
        generator: job.generator.kind.name().to_string(),
        times: job.times.clone(),
        names: job.observables.iter().map(|o| o.name().to_string()).collect(),
        ..TimeSeries::default()
    };
    let tp = job.generator.is_trace_preserving();
    let mut record = |rho: &DMatrix<Complex64>, t: f64| -> Result<()> {
        series.values.push(job.observables.iter().map(|o| o.eval(rho)).collect());
        let tr = rho.trace().re;
        if tp && (tr - 1.0).abs() > TRACE_DRIFT_LIMIT {
            return Err(Error::Integration {
                t,
                reason: format!("trace drifted to {tr}"),
            });
        }
        if job.diagnostics {
            series.trace.push(tr);
            series.min_eigenvalue.push(min_eigenvalue(rho));
        }
        Ok(())
    };
    let n = job.generator.dim();
    match job.method {
        Method::Exponential => {
            let support = Support::reachable(job.generator, &job.initial, MAX_SUPPORT)?;
            let s = support.restrict(job.generator);
            let mut v = support.to_coords(&job.initial);
            let mut cache: HashMap<u64, DMatrix<f64>> = HashMap::new();
            record(&job.initial, 0.0)?;
            for w in job.times.windows(2) {
                let dt = w[1] - w[0];
                // uniform grids hit the cache every step
                let key = dt.to_bits();
                let p = cache.entry(key).or_insert_with(|| step_propagator(&s, dt));
                v = &*p * v;
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::Integration {
                        t: w[1],
                        reason: "non-finite state".into(),
                    });
                }
                record(&support.to_matrix(&v, n), w[1])?;
            }
        }
        Method::RungeKutta { rtol, atol } => {
            let y0: Vec<Complex64> = job.initial.iter().copied().collect();
            let mut failure = None;
            dopri5(
                |_, y, dy| {
                    let rho = DMatrix::from_column_slice(n, n, y);
                    let out = job.generator.apply(&rho);
                    dy.copy_from_slice(out.as_slice());
                },
                &y0,
                &job.times,
                Tolerance { rtol, atol },
                |k, y| {
                    let rho = DMatrix::from_column_slice(n, n, y);
                    let r = record(&rho, job.times[k]);
                    if let Err(e) = &r {
                        failure = Some(e.to_string());
                    }
                    r
                },
            )?;
            debug_assert!(failure.is_none());
        }
    }
    Ok(series)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Deviation {
    pub name: String,
    pub max_abs: f64,
    pub rms: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeviationReport {
    pub run_a: String,
    pub run_b: String,
    pub per_observable: Vec<Deviation>,
    pub max_abs: f64,
    pub tolerance: f64,
    pub within_tolerance: bool,
}

/// Per-observable deviation between two runs on the same grid, limited to
/// `subset` (all shared observables when empty).
pub fn compare_runs(a: &TimeSeries, b: &TimeSeries, subset: &[String], tolerance: f64) -> Result<DeviationReport> {
    if a.times.len() != b.times.len() || a.times.iter().zip(&b.times).any(|(x, y)| (x - y).abs() > 1e-9 * x.abs().max(1.0)) {
        return Err(Error::InvalidInput("runs use different time grids".into()));
    }
    let names: Vec<String> = if subset.is_empty() {
        a.names.iter().filter(|n| b.names.contains(n)).cloned().collect()
    } else {
        subset.to_vec()
    };
    let mut per = Vec::new();
    for name in names {
        let (Some(xa), Some(xb)) = (a.column(&name), b.column(&name)) else {
            return Err(Error::InvalidInput(format!("observable {name} missing from one run")));
        };
        let diffs: Vec<f64> = xa.iter().zip(&xb).map(|(p, q)| (p - q).abs()).collect();
        let max_abs = diffs.iter().copied().fold(0.0, f64::max);
        let rms = if diffs.is_empty() {
            0.0
        } else {
            (diffs.iter().map(|d| d * d).sum::<f64>() / diffs.len() as f64).sqrt()
        };
        per.push(Deviation { name, max_abs, rms });
    }
    let max_abs = per.iter().map(|d| d.max_abs).fold(0.0, f64::max);
    Ok(DeviationReport {
        run_a: a.generator.clone(),
        run_b: b.generator.clone(),
        per_observable: per,
        max_abs,
        tolerance,
        within_tolerance: max_abs < tolerance,
    })
}
