//! Effective non-Hermitian Hamiltonian of one Bohr level and its analysis.
//!
//! H_eff^(n) = P_n [H_at + H_CP − (i/2) Σ L†L] P_n. Because every D and Σ
//! operator changes m_j by q and l by ±1, H_eff^(n) splits into blocks of
//! fixed m_j and l-parity.

mod sweep;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::atom::{Basis, Parity, QuantumState};
use crate::error::{Error, Result};
use crate::master_eq::GeneratorSet;

pub use sweep::{sweep_and_track, Ambiguity, SweepPoint, SweepSetup, SweepTable};

/// Cross-block elements larger than this (Hartree) are a construction bug.
pub const BLOCK_TOL: f64 = 1e-14;
/// Eigenvector matrices worse conditioned than this are flagged.
pub const DEFECTIVE_CONDITION: f64 = 1e12;

/// H_eff restricted to one Bohr level.
#[derive(Clone, Debug)]
pub struct LevelHamiltonian {
    pub n: u32,
    /// Basis indices of the level, in basis order.
    pub indices: Vec<usize>,
    pub matrix: DMatrix<Complex64>,
}

pub fn project_effective(g: &GeneratorSet, basis: &Basis, n: u32) -> Result<LevelHamiltonian> {
    if g.dim() != basis.len() {
        return Err(Error::Dimension {
            expected: basis.len(),
            got: g.dim(),
        });
    }
    let indices = basis.level_indices(n);
    if indices.is_empty() {
        return Err(Error::Domain(format!("Bohr level {n} is not in the basis")));
    }
    let full = g.effective_hamiltonian();
    // level-diagonal structure is what makes the projection exact
    for &i in &indices {
        for j in 0..g.dim() {
            if basis.states[j].n != n && (full[(i, j)].norm() > BLOCK_TOL || full[(j, i)].norm() > BLOCK_TOL) {
                return Err(Error::Consistency(format!(
                    "effective Hamiltonian couples level {n} state {i} to state {j} of level {}",
                    basis.states[j].n
                )));
            }
        }
    }
    let matrix = DMatrix::from_fn(indices.len(), indices.len(), |i, j| full[(indices[i], indices[j])]);
    Ok(LevelHamiltonian { n, indices, matrix })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Eigen {
    /// Re λ, Hartree, ascending.
    pub energies: Vec<f64>,
    /// −2 Im λ, Hartree (ħ = 1).
    pub rates: Vec<f64>,
    /// Unit-norm right eigenvectors as columns, in the block's basis.
    #[serde(skip)]
    pub vectors: DMatrix<Complex64>,
    /// Condition number of the eigenvector matrix.
    pub condition: f64,
    pub defective: bool,
}

/// One (n, m_j, parity) block of H_eff.
#[derive(Clone, Debug)]
pub struct EffectiveBlock {
    pub n: u32,
    pub two_mj: i32,
    pub parity: Parity,
    /// Basis indices.
    pub indices: Vec<usize>,
    pub labels: Vec<QuantumState>,
    pub h: DMatrix<Complex64>,
}

impl EffectiveBlock {
    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    pub fn mj(&self) -> f64 {
        self.two_mj as f64 / 2.0
    }
}

pub fn block_decompose(level: &LevelHamiltonian, basis: &Basis) -> Result<Vec<EffectiveBlock>> {
    let mut keys: Vec<(i32, Parity)> = level
        .indices
        .iter()
        .map(|&i| (basis.states[i].two_mj, basis.states[i].parity()))
        .collect();
    let key_of = keys.clone();
    keys.sort_by_key(|&(m, p)| (m, p == Parity::Odd));
    keys.dedup();
    let local = &level.matrix;
    for i in 0..local.nrows() {
        for j in 0..local.ncols() {
            if key_of[i] != key_of[j] && local[(i, j)].norm() > BLOCK_TOL {
                return Err(Error::Consistency(format!(
                    "H_eff element ({}, {}) = {:e} couples different (m_j, parity) blocks",
                    level.indices[i],
                    level.indices[j],
                    local[(i, j)].norm()
                )));
            }
        }
    }
    Ok(keys
        .into_iter()
        .map(|(two_mj, parity)| {
            let pos: Vec<usize> = (0..level.indices.len()).filter(|&k| key_of[k] == (two_mj, parity)).collect();
            let indices: Vec<usize> = pos.iter().map(|&k| level.indices[k]).collect();
            let h = DMatrix::from_fn(pos.len(), pos.len(), |i, j| local[(pos[i], pos[j])]);
            EffectiveBlock {
                n: level.n,
                two_mj,
                parity,
                labels: indices.iter().map(|&i| basis.states[i].clone()).collect(),
                indices,
                h,
            }
        })
        .collect())
}

/// Convenience: the single block with the requested quantum numbers.
pub fn find_block(blocks: &[EffectiveBlock], two_mj: i32, parity: Parity) -> Option<&EffectiveBlock> {
    blocks.iter().find(|b| b.two_mj == two_mj && b.parity == parity)
}

/// Eigen-decomposition of a general complex matrix through the complex
/// Schur form and back-substitution on the triangular factor.
pub fn eigen_decompose(h: &DMatrix<Complex64>) -> Result<Eigen> {
    let n = h.nrows();
    if n == 0 {
        return Ok(Eigen {
            energies: vec![],
            rates: vec![],
            vectors: DMatrix::zeros(0, 0),
            condition: 1.0,
            defective: false,
        });
    }
    // work relative to the mean diagonal energy so small splittings keep
    // their relative precision
    let shift = h.diagonal().iter().map(|z| z.re).sum::<f64>() / n as f64;
    let hs = h - DMatrix::<Complex64>::identity(n, n) * Complex64::new(shift, 0.0);
    let schur = nalgebra::linalg::Schur::try_new(hs, 1e-15, 10_000)
        .ok_or_else(|| Error::Consistency("Schur decomposition did not converge".into()))?;
    let (q, t) = schur.unpack();
    let scale = t.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut y = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..n {
        let lam = t[(k, k)];
        y[(k, k)] = Complex64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let mut acc = Complex64::new(0.0, 0.0);
            for m in j + 1..=k {
                acc += t[(j, m)] * y[(m, k)];
            }
            let mut den = t[(j, j)] - lam;
            if den.norm() < f64::EPSILON * scale {
                den = Complex64::new(f64::EPSILON * scale, 0.0);
            }
            y[(j, k)] = -acc / den;
        }
    }
    let mut v = q * y;
    for k in 0..n {
        let nrm = v.column(k).norm();
        v.column_mut(k).unscale_mut(nrm);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| t[(a, a)].re.total_cmp(&t[(b, b)].re));
    let energies = order.iter().map(|&k| t[(k, k)].re + shift).collect();
    let rates = order.iter().map(|&k| -2.0 * t[(k, k)].im).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    let sv = vectors.clone().singular_values();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    Ok(Eigen {
        energies,
        rates,
        vectors,
        condition,
        defective: condition > DEFECTIVE_CONDITION,
    })
}

pub fn eigenanalyze(block: &EffectiveBlock) -> Result<Eigen> {
    eigen_decompose(&block.h)
}

/// [Σ_k |c_k|⁴]⁻¹ for a unit vector in an orthonormal basis.
pub fn participation_ratio(v: &DVector<Complex64>) -> Result<f64> {
    let norm = v.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidInput(format!("participation ratio needs a unit vector, norm = {norm}")));
    }
    let s: f64 = v.iter().map(|c| c.norm_sqr().powi(2)).sum();
    Ok(1.0 / s)
}

/// A state of the block annihilated by every decay operator, when the
/// stacked decay map is rank deficient.
pub fn dark_state_certificate(block: &EffectiveBlock, g: &GeneratorSet) -> Option<DVector<Complex64>> {
    let n = block.dim();
    if n == 0 {
        return None;
    }
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for d in &g.decay {
        let sub = d.op.submatrix(&(0..g.dim()).collect::<Vec<_>>(), &block.indices);
        for r in 0..sub.nrows() {
            if sub.row(r).iter().any(|&x| x != 0.0) {
                rows.push(sub.row(r).iter().copied().collect());
            }
        }
    }
    let m_rows = rows.len().max(n);
    let mut m = DMatrix::<f64>::zeros(m_rows, n);
    for (r, row) in rows.iter().enumerate() {
        for (c, &x) in row.iter().enumerate() {
            m[(r, c)] = x;
        }
    }
    let svd = m.svd(false, true);
    let v_t = svd.v_t?;
    let (kmin, smin) = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))?;
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        // nothing decays at all: every state is trivially dark
        let mut e = DVector::zeros(n);
        e[0] = Complex64::new(1.0, 0.0);
        return Some(e);
    }
    if smin > 1e-12 * smax {
        return None;
    }
    Some(DVector::from_fn(n, |i, _| Complex64::new(v_t[(kmin, i)], 0.0)))
}

/// Stacked decay operators of a block, Σ_k L_k†L_k restricted to it.
pub fn decay_gram_block(block: &EffectiveBlock, g: &GeneratorSet) -> DMatrix<f64> {
    let gram = g.decay_gram();
    DMatrix::from_fn(block.dim(), block.dim(), |i, j| gram[(block.indices[i], block.indices[j])])
}

#[cfg(test)]
mod tests;
