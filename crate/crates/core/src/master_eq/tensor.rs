use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::atom::{Basis, DipoleTable, Spherical};
use crate::bath::SpectralModel;
use crate::error::{Error, Result};

/// Options shared by every member of the master-equation hierarchy.
#[derive(Clone, Debug, PartialEq)]
pub struct BrOptions {
    /// Keep the counter-rotating part of the dipole coupling. When off,
    /// kernels at negative transition frequencies are dropped.
    pub counter_rotating: bool,
    /// Restrict the final states of every transition to these Bohr levels.
    pub intermediate_levels: Option<Vec<u32>>,
}

impl Default for BrOptions {
    fn default() -> Self {
        Self {
            counter_rotating: true,
            intermediate_levels: None,
        }
    }
}

/// One dipole transition `source -> target` through component `q`,
/// with the bath kernels evaluated at ω = E_source − E_target.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transition {
    pub source: usize,
    pub target: usize,
    pub q: Spherical,
    /// `<target| d^q |source>`
    pub dipole: f64,
    pub omega: f64,
    pub gamma: f64,
    pub lambda: f64,
}

/// Which index tuples the tensor keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TupleFilter {
    All,
    /// a and b in the same Bohr level.
    SameLevel,
}

/// Values of Γ and Λ for one tuple (a, b, c, d). `bd` entries are evaluated
/// at ω_bd and `ac` entries at ω_ac.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TensorEntry {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
    pub q: Spherical,
    pub gamma_bd: f64,
    pub gamma_ac: f64,
    pub lambda_bd: f64,
    pub lambda_ac: f64,
}

/// Bloch-Redfield tensor in factored form.
///
/// Because the kernel tensor is diagonal in the spherical basis, every entry
/// Γ_{ca,db}(ω) = d^q_ca d^q_db γ_q(ω) is a product of two transitions with
/// the same q. Only the transitions are stored; tuples are enumerated on
/// demand, which keeps memory linear in the number of dipole elements.
#[derive(Clone, Debug)]
pub struct BrTensor {
    energies: Vec<f64>,
    levels: Vec<u32>,
    transitions: Vec<Transition>,
    by_q: [Vec<usize>; 3],
    filter: TupleFilter,
    counter_rotating: bool,
}

pub fn build_br_tensor(
    basis: &Basis,
    dipoles: &DipoleTable,
    model: &SpectralModel,
    opts: &BrOptions,
) -> Result<BrTensor> {
    if dipoles.dim() != basis.len() {
        return Err(Error::Dimension {
            expected: basis.len(),
            got: dipoles.dim(),
        });
    }
    let energies = basis.energies();
    let levels: Vec<u32> = basis.states.iter().map(|s| s.n).collect();
    let mut raw = Vec::new();
    for q in Spherical::ALL {
        if !model.couples(q) {
            continue;
        }
        for (target, source, dipole) in dipoles.iter(q) {
            if let Some(allowed) = &opts.intermediate_levels {
                if !allowed.contains(&levels[target]) {
                    continue;
                }
            }
            raw.push((source, target, q, dipole));
        }
    }
    let transitions: Vec<Transition> = raw
        .into_par_iter()
        .map(|(source, target, q, dipole)| {
            let omega = energies[source] - energies[target];
            let (gamma, lambda) = if omega < 0.0 && !opts.counter_rotating {
                (0.0, 0.0)
            } else {
                (model.gamma(q, omega)?, model.lambda_shift(q, omega))
            };
            Ok(Transition {
                source,
                target,
                q,
                dipole,
                omega,
                gamma,
                lambda,
            })
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|t| t.gamma != 0.0 || t.lambda != 0.0)
        .collect();
    let mut by_q: [Vec<usize>; 3] = Default::default();
    for (k, t) in transitions.iter().enumerate() {
        by_q[t.q.index()].push(k);
    }
    Ok(BrTensor {
        energies,
        levels,
        transitions,
        by_q,
        filter: TupleFilter::All,
        counter_rotating: opts.counter_rotating,
    })
}

/// Drops every tuple whose states a and b lie in different Bohr levels.
pub fn partial_secularize(t: &BrTensor) -> BrTensor {
    BrTensor {
        filter: TupleFilter::SameLevel,
        ..t.clone()
    }
}

impl BrTensor {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn filter(&self) -> TupleFilter {
        self.filter
    }

    pub fn counter_rotating(&self) -> bool {
        self.counter_rotating
    }

    pub(crate) fn transitions_of(&self, q: Spherical) -> impl Iterator<Item = &Transition> + '_ {
        self.by_q[q.index()].iter().map(move |&k| &self.transitions[k])
    }

    fn keeps(&self, a: usize, b: usize) -> bool {
        match self.filter {
            TupleFilter::All => true,
            TupleFilter::SameLevel => self.levels[a] == self.levels[b],
        }
    }

    /// Every retained tuple. t1 = a→c, t2 = b→d.
    pub fn entries(&self) -> impl Iterator<Item = TensorEntry> + '_ {
        Spherical::ALL.into_iter().flat_map(move |q| {
            self.transitions_of(q).flat_map(move |t1| {
                self.transitions_of(q)
                    .filter(move |t2| self.keeps(t1.source, t2.source))
                    .map(move |t2| {
                        let dd = t1.dipole * t2.dipole;
                        TensorEntry {
                            a: t1.source,
                            b: t2.source,
                            c: t1.target,
                            d: t2.target,
                            q,
                            gamma_bd: dd * t2.gamma,
                            gamma_ac: dd * t1.gamma,
                            lambda_bd: dd * t2.lambda,
                            lambda_ac: dd * t1.lambda,
                        }
                    })
            })
        })
    }

    pub fn entry_count(&self) -> usize {
        self.entries().count()
    }

    /// The operator K of the one-sided terms, so that they read Kρ + ρK†:
    /// K_ab = Σ_c Λ/Γ_{ca,cb}(ω_bc) (−i λ − γ/2).
    pub fn one_sided(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        let mut k = DMatrix::zeros(n, n);
        for q in Spherical::ALL {
            let mut by_target: Vec<Vec<&Transition>> = vec![Vec::new(); n];
            for t in self.transitions_of(q) {
                by_target[t.target].push(t);
            }
            for group in &by_target {
                for t1 in group {
                    for t2 in group {
                        if !self.keeps(t1.source, t2.source) {
                            continue;
                        }
                        let dd = t1.dipole * t2.dipole;
                        k[(t1.source, t2.source)] += Complex64::new(-0.5 * dd * t2.gamma, -dd * t2.lambda);
                    }
                }
            }
        }
        k
    }

    /// Coefficients of the two-sided terms |d⟩⟨b|ρ|a⟩⟨c| as
    /// `(d, c, b, a, w)`.
    pub fn two_sided(&self) -> Vec<(usize, usize, usize, usize, Complex64)> {
        self.entries()
            .filter_map(|e| {
                let w = Complex64::new(0.5 * (e.gamma_bd + e.gamma_ac), e.lambda_bd - e.lambda_ac);
                (w != Complex64::new(0.0, 0.0)).then_some((e.d, e.c, e.b, e.a, w))
            })
            .collect()
    }
}
