//! Generator variants of one physical setup, propagated from a common
//! initial basis state on a common grid.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{build_oracle, propagate, Method, Observable, OracleMode, OracleModel, Polarization, PropagationJob, SparseGenerator, TimeSeries};
use crate::atom::{Basis, DipoleTable};
use crate::bath::SpectralModel;
use crate::effective::project_effective;
use crate::error::{Error, Result};
use crate::master_eq::{build_br_tensor, geometric_mean_lindblad, partial_secularize, BrOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Variant {
    Oracle { truncation: u32 },
    BlochRedfield,
    Lindblad,
    Effective,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRequest {
    pub variant: Variant,
    pub counter_rotating: bool,
}

impl RunRequest {
    /// Stable identifier, e.g. `oracle-n2`, `lindblad-rwa`.
    pub fn id(&self) -> String {
        let base = match self.variant {
            Variant::Oracle { truncation } => format!("oracle-n{truncation}"),
            Variant::BlochRedfield => "bloch-redfield".into(),
            Variant::Lindblad => "lindblad".into(),
            Variant::Effective => "effective".into(),
        };
        if self.counter_rotating {
            base
        } else {
            format!("{base}-rwa")
        }
    }
}

pub struct RunSetup<'a> {
    pub basis: &'a Basis,
    pub dipoles: &'a DipoleTable,
    pub model: &'a SpectralModel,
    pub intermediate_levels: Option<Vec<u32>>,
    /// Basis index of the initial pure state.
    pub initial: usize,
    /// Basis indices whose populations are reported.
    pub watched: Vec<usize>,
    /// Atomic units, from 0.
    pub times: Vec<f64>,
    pub method: Method,
    pub diagnostics: bool,
}

/// The oracle modes equivalent to a Lorentzian model.
pub fn oracle_modes(model: &SpectralModel) -> Result<Vec<OracleMode>> {
    match model {
        SpectralModel::LorentzianAxial(l) => Ok(vec![OracleMode {
            lorentzian: *l,
            polarizations: vec![Polarization::Z],
        }]),
        SpectralModel::LorentzianIsotropic(l) => Ok(vec![OracleMode {
            lorentzian: *l,
            polarizations: vec![Polarization::X, Polarization::Y, Polarization::Z],
        }]),
        SpectralModel::Flat { j_xx, j_zz } if *j_xx == 0.0 && *j_zz == 0.0 => Ok(Vec::new()),
        _ => Err(Error::InvalidInput(format!(
            "the lossy-mode reference needs a Lorentzian model, got {}",
            model.describe()
        ))),
    }
}

fn populations(setup: &RunSetup, index: impl Fn(usize) -> Vec<usize>) -> Vec<Observable> {
    setup
        .watched
        .iter()
        .map(|&k| Observable::Population {
            name: setup.basis.states[k].label(),
            indices: index(k),
        })
        .collect()
}

fn pure(n: usize, k: usize) -> DMatrix<Complex64> {
    let mut rho = DMatrix::zeros(n, n);
    rho[(k, k)] = Complex64::new(1.0, 0.0);
    rho
}

pub fn run(setup: &RunSetup, req: RunRequest) -> Result<TimeSeries> {
    let n = setup.basis.len();
    if setup.initial >= n || setup.watched.iter().any(|&k| k >= n) {
        return Err(Error::InvalidInput("state index outside the basis".into()));
    }
    let job = |generator: &SparseGenerator, initial, observables| {
        propagate(&PropagationJob {
            generator,
            initial,
            times: setup.times.clone(),
            observables,
            method: setup.method,
            diagnostics: setup.diagnostics,
        })
    };
    let mut series = match req.variant {
        Variant::Oracle { truncation } => {
            let model = OracleModel {
                modes: oracle_modes(setup.model)?,
                truncation,
            };
            let oracle = build_oracle(setup.basis, setup.dipoles, &model, req.counter_rotating)?;
            let rho = oracle.with_vacuum(&pure(n, setup.initial))?;
            job(&oracle.generator, rho, populations(setup, |k| oracle.atom_indices(k)))?
        }
        _ => {
            let opts = BrOptions {
                counter_rotating: req.counter_rotating,
                intermediate_levels: setup.intermediate_levels.clone(),
            };
            let tensor = partial_secularize(&build_br_tensor(setup.basis, setup.dipoles, setup.model, &opts)?);
            match req.variant {
                Variant::BlochRedfield => job(
                    &SparseGenerator::bloch_redfield(&tensor),
                    pure(n, setup.initial),
                    populations(setup, |k| vec![k]),
                )?,
                Variant::Lindblad => {
                    let g = geometric_mean_lindblad(&tensor)?;
                    job(&SparseGenerator::lindblad(&g), pure(n, setup.initial), populations(setup, |k| vec![k]))?
                }
                _ => {
                    let g = geometric_mean_lindblad(&tensor)?;
                    let level = project_effective(&g, setup.basis, setup.basis.states[setup.initial].n)?;
                    let local = |k: usize| level.indices.iter().position(|&i| i == k);
                    let start = local(setup.initial).expect("initial state lies in its own level");
                    job(
                        &SparseGenerator::effective(&level.matrix),
                        pure(level.indices.len(), start),
                        // states outside the level are never populated here
                        populations(setup, |k| local(k).into_iter().collect()),
                    )?
                }
            }
        }
    };
    series.generator = req.id();
    Ok(series)
}

/// Independent runs in parallel, results in request order.
pub fn run_all(setup: &RunSetup, requests: &[RunRequest]) -> Result<Vec<TimeSeries>> {
    requests.par_iter().map(|&r| run(setup, r)).collect()
}
