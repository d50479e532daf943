//! Exact reference model: the atom coupled to damped bosonic modes.
//!
//! A mode of frequency ω_M, width κ and coupling g, damped into a flat
//! reservoir, is equivalent to a Lorentzian spectral density
//! J(ω) = (g²/π)(κ/2)/((ω − ω_M)² + (κ/2)²) on the coupled axis. The
//! atom-mode space is truncated by total photon number.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::generator::{GeneratorKind, SparseGenerator};
use crate::atom::{Basis, DipoleTable};
use crate::bath::Lorentzian;
use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    X,
    Y,
    Z,
}

/// One Lorentzian mode. Listing several polarizations creates one
/// independent mode per axis, so the bath stays diagonal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleMode {
    pub lorentzian: Lorentzian,
    pub polarizations: Vec<Polarization>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleModel {
    pub modes: Vec<OracleMode>,
    /// Maximum total photon number.
    pub truncation: u32,
}

/// Atom ⊗ Fock space generator with bookkeeping for reduced observables.
#[derive(Clone, Debug)]
pub struct Oracle {
    pub generator: SparseGenerator,
    atom_dim: usize,
    fock: Vec<Vec<u32>>,
    counter_rotating: bool,
}

fn fock_states(modes: usize, max_total: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0; modes]];
    if modes == 0 {
        return out;
    }
    for total in 1..=max_total {
        let mut layer = Vec::new();
        compositions(modes, total, &mut Vec::new(), &mut layer);
        out.extend(layer);
    }
    out
}

fn compositions(slots: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if slots == 1 {
        let mut v = prefix.clone();
        v.push(left);
        out.push(v);
        return;
    }
    for k in (0..=left).rev() {
        prefix.push(k);
        compositions(slots - 1, left - k, prefix, out);
        prefix.pop();
    }
}

pub fn build_oracle(basis: &Basis, dipoles: &DipoleTable, model: &OracleModel, counter_rotating: bool) -> Result<Oracle> {
    if model.truncation < 1 && !model.modes.is_empty() {
        return Err(Error::InvalidInput("photon truncation must be at least 1".into()));
    }
    // expand multi-axis modes
    let mut axes = Vec::new();
    for m in &model.modes {
        if m.polarizations.is_empty() {
            return Err(Error::InvalidInput("mode without polarization".into()));
        }
        if !(m.lorentzian.kappa >= 0.0) {
            return Err(Error::InvalidInput("mode width must be non-negative".into()));
        }
        let mut pols = m.polarizations.clone();
        pols.sort();
        pols.dedup();
        for p in pols {
            axes.push((m.lorentzian, p));
        }
    }
    let n_at = basis.len();
    let fock = fock_states(axes.len(), if axes.is_empty() { 0 } else { model.truncation });
    let n_f = fock.len();
    let dim = n_at * n_f;
    let idx = |a: usize, f: usize| a * n_f + f;
    let fock_index = |v: &[u32]| fock.iter().position(|w| w.as_slice() == v);

    let energies = basis.energies();
    let cart = dipoles.cartesian();
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    for a in 0..n_at {
        for (f, occ) in fock.iter().enumerate() {
            let mut e = Complex64::new(energies[a], 0.0);
            for (m, &(l, _)) in axes.iter().enumerate() {
                e += Complex64::new(l.center, -0.5 * l.kappa) * occ[m] as f64;
            }
            h[(idx(a, f), idx(a, f))] = e;
        }
    }
    for (m, &(l, pol)) in axes.iter().enumerate() {
        let d = &cart[match pol {
            Polarization::X => 0,
            Polarization::Y => 1,
            Polarization::Z => 2,
        }];
        for (f, occ) in fock.iter().enumerate() {
            // a_m† |occ⟩ = √(n+1) |occ + 1⟩
            let mut up = occ.clone();
            up[m] += 1;
            let Some(fu) = fock_index(&up) else { continue };
            let amp = ((occ[m] + 1) as f64).sqrt() * l.g;
            for dst in 0..n_at {
                for src in 0..n_at {
                    let dd = d[(dst, src)];
                    if dd == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    // emission |dst⟩⟨src| a†: kept under the rotating-wave
                    // approximation only when the atom does not gain energy
                    if !counter_rotating && energies[dst] > energies[src] {
                        continue;
                    }
                    let v = dd * amp;
                    h[(idx(dst, fu), idx(src, f))] += v;
                    h[(idx(src, f), idx(dst, fu))] += v.conj();
                }
            }
        }
    }
    let mut jumps = Vec::new();
    for (m, &(l, _)) in axes.iter().enumerate() {
        if l.kappa == 0.0 {
            continue;
        }
        let mut trip = Vec::new();
        for (f, occ) in fock.iter().enumerate() {
            if occ[m] == 0 {
                continue;
            }
            let mut down = occ.clone();
            down[m] -= 1;
            let fd = fock_index(&down).expect("lower Fock state exists");
            let amp = (l.kappa * occ[m] as f64).sqrt();
            for a in 0..n_at {
                trip.push((idx(a, fd), idx(a, f), amp));
            }
        }
        jumps.push(SparseMatrix::from_triplets(dim, dim, trip));
    }
    Ok(Oracle {
        generator: SparseGenerator::new(GeneratorKind::Oracle, &h, jumps, true),
        atom_dim: n_at,
        fock,
        counter_rotating,
    })
}

impl Oracle {
    pub fn dim(&self) -> usize {
        self.generator.dim()
    }

    pub fn atom_dim(&self) -> usize {
        self.atom_dim
    }

    pub fn fock_states(&self) -> &[Vec<u32>] {
        &self.fock
    }

    pub fn counter_rotating(&self) -> bool {
        self.counter_rotating
    }

    /// ρ_atom ⊗ |vac⟩⟨vac|.
    pub fn with_vacuum(&self, rho_atom: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
        if rho_atom.nrows() != self.atom_dim {
            return Err(Error::Dimension {
                expected: self.atom_dim,
                got: rho_atom.nrows(),
            });
        }
        let n_f = self.fock.len();
        let mut rho = DMatrix::zeros(self.dim(), self.dim());
        for i in 0..self.atom_dim {
            for j in 0..self.atom_dim {
                rho[(i * n_f, j * n_f)] = rho_atom[(i, j)];
            }
        }
        Ok(rho)
    }

    /// Composite-space indices whose populations sum to atomic state `a`.
    pub fn atom_indices(&self, a: usize) -> Vec<usize> {
        let n_f = self.fock.len();
        (0..n_f).map(|f| a * n_f + f).collect()
    }

    /// Partial trace over the photons.
    pub fn reduce(&self, rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let n_f = self.fock.len();
        DMatrix::from_fn(self.atom_dim, self.atom_dim, |i, j| {
            (0..n_f).map(|f| rho[(i * n_f + f, j * n_f + f)]).sum()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fock_counting() {
        assert_eq!(fock_states(1, 2).len(), 3);
        assert_eq!(fock_states(2, 2).len(), 6);
        assert_eq!(fock_states(3, 1).len(), 4);
        assert_eq!(fock_states(0, 5).len(), 1);
        assert!(fock_states(2, 2).iter().all(|v| v.iter().sum::<u32>() <= 2));
    }
}
