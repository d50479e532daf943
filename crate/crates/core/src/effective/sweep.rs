use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{block_decompose, eigen_decompose, find_block, participation_ratio, project_effective, Eigen};
use crate::atom::{Basis, DipoleTable, Parity};
use crate::bath::SpectralModel;
use crate::error::{Error, Result};
use crate::master_eq::{build_br_tensor, full_secularize, geometric_mean_lindblad, partial_secularize, BrOptions, GeneratorSet, Secularization};

/// Overlaps closer than this are treated as ties.
pub const TIE_TOL: f64 = 1e-6;

pub struct SweepSetup<'a> {
    pub basis: &'a Basis,
    pub dipoles: &'a DipoleTable,
    pub options: BrOptions,
    pub n: u32,
    pub two_mj: i32,
    pub parity: Parity,
    /// Generator of the tracked model; `Full` tracks the reference itself.
    pub secularization: Secularization,
}

/// One sweep point, with eigenstates listed in track order.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepPoint {
    pub param: f64,
    pub energies: Vec<f64>,
    /// Energies minus their mean at this point.
    pub centered: Vec<f64>,
    pub rates: Vec<f64>,
    pub participation: Vec<f64>,
    pub mean_participation: f64,
    pub condition: f64,
    pub defective: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Ambiguity {
    pub point: usize,
    pub track: usize,
    /// Eigenstate indices (energy order at this point) whose overlaps tied.
    pub candidates: Vec<usize>,
    pub chosen: usize,
    pub reference: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepTable {
    pub n: u32,
    pub two_mj: i32,
    pub parity: Parity,
    /// Block basis labels.
    pub labels: Vec<String>,
    /// Dominant block basis state of each track at the first point.
    pub track_labels: Vec<String>,
    pub full: Vec<SweepPoint>,
    /// Fully secular model without off-diagonal couplings.
    pub reference: Vec<SweepPoint>,
    pub ambiguities: Vec<Ambiguity>,
}

fn block_eigen(g: &GeneratorSet, setup: &SweepSetup) -> Result<(Eigen, Vec<String>)> {
    let level = project_effective(g, setup.basis, setup.n)?;
    let blocks = block_decompose(&level, setup.basis)?;
    let block = find_block(&blocks, setup.two_mj, setup.parity).ok_or_else(|| {
        Error::Domain(format!(
            "no block with n={}, m_j={}/2, parity {}",
            setup.n, setup.two_mj, setup.parity
        ))
    })?;
    let eig = eigen_decompose(&block.h)?;
    Ok((eig, block.labels.iter().map(|s| s.label()).collect()))
}

pub fn sweep_and_track(models: &[SpectralModel], params: &[f64], setup: &SweepSetup) -> Result<SweepTable> {
    if models.len() != params.len() {
        return Err(Error::InvalidInput("one parameter value per sweep model is required".into()));
    }
    if models.is_empty() {
        return Err(Error::InvalidInput("empty sweep".into()));
    }
    if setup.secularization == Secularization::None {
        return Err(Error::InvalidInput(
            "the unsecularized Bloch-Redfield generator has no effective Hamiltonian".into(),
        ));
    }
    let raw: Vec<(Eigen, Eigen, Vec<String>)> = models
        .par_iter()
        .map(|model| {
            let tensor = build_br_tensor(setup.basis, setup.dipoles, model, &setup.options)?;
            let reference = full_secularize(&tensor);
            let tracked = match setup.secularization {
                Secularization::Full => reference.clone(),
                _ => geometric_mean_lindblad(&partial_secularize(&tensor))?,
            };
            let (e_full, labels) = block_eigen(&tracked, setup)?;
            let (e_ref, _) = block_eigen(&reference, setup)?;
            Ok((e_full, e_ref, labels))
        })
        .collect::<Result<_>>()?;
    let labels = raw[0].2.clone();
    // tracks start in the eigenvalue order of the first point
    let first = &raw[0].0.vectors;
    let track_labels = (0..first.ncols())
        .map(|t| {
            let col = first.column(t);
            let k = (0..col.len())
                .max_by(|&a, &b| col[a].norm_sqr().total_cmp(&col[b].norm_sqr()))
                .unwrap_or(0);
            labels[k].clone()
        })
        .collect();
    let mut ambiguities = Vec::new();
    let full_eigs: Vec<&Eigen> = raw.iter().map(|r| &r.0).collect();
    let ref_eigs: Vec<&Eigen> = raw.iter().map(|r| &r.1).collect();
    let full = assemble(&full_eigs, params, false, &mut ambiguities)?;
    let reference = assemble(&ref_eigs, params, true, &mut ambiguities)?;
    Ok(SweepTable {
        n: setup.n,
        two_mj: setup.two_mj,
        parity: setup.parity,
        labels,
        track_labels,
        full,
        reference,
        ambiguities,
    })
}

fn assemble(eigs: &[&Eigen], params: &[f64], reference: bool, amb: &mut Vec<Ambiguity>) -> Result<Vec<SweepPoint>> {
    let perms = track(eigs, reference, amb);
    eigs.iter()
        .zip(params)
        .zip(&perms)
        .map(|((e, &param), perm)| {
            let energies: Vec<f64> = perm.iter().map(|&k| e.energies[k]).collect();
            let mean = energies.iter().sum::<f64>() / energies.len() as f64;
            let participation = perm
                .iter()
                .map(|&k| participation_ratio(&e.vectors.column(k).into_owned()))
                .collect::<Result<Vec<_>>>()?;
            Ok(SweepPoint {
                param,
                centered: energies.iter().map(|x| x - mean).collect(),
                rates: perm.iter().map(|&k| e.rates[k]).collect(),
                mean_participation: participation.iter().sum::<f64>() / participation.len() as f64,
                participation,
                energies,
                condition: e.condition,
                defective: e.defective,
            })
        })
        .collect()
}

/// perm[p][track] = eigenstate index at point p. Tracks start in energy
/// order and follow maximal |overlap|² greedily.
fn track(eigs: &[&Eigen], reference: bool, amb: &mut Vec<Ambiguity>) -> Vec<Vec<usize>> {
    let n = eigs[0].energies.len();
    let mut perms = vec![(0..n).collect::<Vec<_>>()];
    for p in 1..eigs.len() {
        let prev = eigs[p - 1];
        let prev_perm = &perms[p - 1];
        let cur = eigs[p];
        let overlap = |t: usize, j: usize| {
            let a = prev.vectors.column(prev_perm[t]);
            let b = cur.vectors.column(j);
            a.dotc(&b).norm_sqr()
        };
        let table: Vec<Vec<f64>> = (0..n).map(|t| (0..n).map(|j| overlap(t, j)).collect()).collect();
        let mut free_t = vec![true; n];
        let mut free_j = vec![true; n];
        let mut perm = vec![0; n];
        for _ in 0..n {
            let mut best = f64::NEG_INFINITY;
            for t in (0..n).filter(|&t| free_t[t]) {
                for j in (0..n).filter(|&j| free_j[j]) {
                    best = best.max(table[t][j]);
                }
            }
            let tied: Vec<(usize, usize)> = (0..n)
                .filter(|&t| free_t[t])
                .flat_map(|t| (0..n).filter(|&j| free_j[j]).map(move |j| (t, j)))
                .filter(|&(t, j)| best - table[t][j] <= TIE_TOL)
                .collect();
            let &(t, j) = tied
                .iter()
                .min_by(|a, b| {
                    let da = (prev.energies[prev_perm[a.0]] - cur.energies[a.1]).abs();
                    let db = (prev.energies[prev_perm[b.0]] - cur.energies[b.1]).abs();
                    da.total_cmp(&db).then(a.cmp(b))
                })
                .expect("at least one free pair");
            let rivals: Vec<usize> = tied.iter().filter(|&&(tt, _)| tt == t).map(|&(_, jj)| jj).collect();
            if rivals.len() > 1 {
                amb.push(Ambiguity {
                    point: p,
                    track: t,
                    candidates: rivals,
                    chosen: j,
                    reference,
                });
            }
            perm[t] = j;
            free_t[t] = false;
            free_j[j] = false;
        }
        perms.push(perm);
    }
    perms
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use num_complex::Complex64;

    fn eig_of(h: [[f64; 2]; 2]) -> Eigen {
        let m = DMatrix::from_fn(2, 2, |i, j| Complex64::new(h[i][j], 0.0));
        eigen_decompose(&m).unwrap()
    }

    #[test]
    fn avoided_crossing_keeps_identity() {
        // two states exchange energy order while weakly coupled; the track
        // follows the character, not the energy ordering
        let a = eig_of([[0.0, 1e-3], [1e-3, 1.0]]);
        let b = eig_of([[1.0, 1e-3], [1e-3, 0.0]]);
        let mut amb = Vec::new();
        let perms = track(&[&a, &b], false, &mut amb);
        // track 0 starts as the low state (mostly basis 0); at point 1 basis
        // 0 is the upper eigenstate
        assert_eq!(perms[1], vec![1, 0]);
        assert!(amb.is_empty());
    }

    #[test]
    fn exact_degeneracy_is_recorded() {
        let a = eig_of([[0.0, 0.0], [0.0, 1.0]]);
        // equal-weight eigenvectors: overlaps tie at 1/2
        let b = eig_of([[0.5, 0.5], [0.5, 0.5]]);
        let mut amb = Vec::new();
        track(&[&a, &b], false, &mut amb);
        assert!(!amb.is_empty());
    }
}
