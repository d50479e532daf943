//! Bloch-Redfield tensor and its two Lindblad reductions.
//!
//! The full-secular reduction keeps only resonant tuples. The
//! partial-secular reduction keeps every tuple whose states a and b share a
//! Bohr level and then replaces each pair of kernel evaluations by their
//! geometric mean. With the kernel tensor diagonal in the spherical basis
//! this factorizes into three decay operators Σ_q^(n) and three shift
//! operators D_q^(n) per Bohr level, and H_CP = Σ D†D.

mod tensor;

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::atom::Spherical;
use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;

pub use tensor::{build_br_tensor, partial_secularize, BrOptions, BrTensor, TensorEntry, Transition, TupleFilter};

/// Absolute tolerance (Hartree) for treating two transition frequencies as
/// equal.
pub const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Secularization {
    None,
    Full,
    PartialGeometricMean,
}

/// What a decay operator is attached to.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DecayGroup {
    /// Σ_q^(n): all transitions leaving Bohr level n.
    Level(u32),
    /// S^q_Ω: all transitions at frequency Ω (Hartree), optionally
    /// restricted to one source level.
    Frequency { omega: f64, level: Option<u32> },
}

#[derive(Clone, Debug)]
pub struct DecayOperator {
    pub q: Spherical,
    pub group: DecayGroup,
    /// Real matrix, rows = final state, columns = initial state.
    pub op: SparseMatrix,
}

/// D_q^(n) stored as magnitudes |d| √|λ| with the common sign of λ per
/// final state factored out, so that D†D = Mᵀ diag(sign) M.
#[derive(Clone, Debug)]
pub struct ShiftOperator {
    pub q: Spherical,
    pub level: u32,
    pub magnitude: SparseMatrix,
    pub sign: Vec<i8>,
}

impl ShiftOperator {
    /// Mᵀ diag(sign) M.
    pub fn signed_gram(&self) -> DMatrix<f64> {
        let n = self.magnitude.ncols();
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.magnitude.nrows()];
        for (r, c, v) in self.magnitude.iter() {
            rows[r].push((c, v));
        }
        let mut out = DMatrix::zeros(n, n);
        for (r, row) in rows.iter().enumerate() {
            let s = self.sign[r] as f64;
            for &(i, vi) in row {
                for &(j, vj) in row {
                    out[(i, j)] += s * vi * vj;
                }
            }
        }
        out
    }
}

/// Operators of a Lindblad master equation for the atom.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    pub h_at: Vec<f64>,
    /// Environment-induced Hamiltonian: H_CP for the geometric-mean
    /// generator, the secular Lamb-shift term for the full-secular one.
    pub h_cp: DMatrix<f64>,
    pub decay: Vec<DecayOperator>,
    pub shift: Vec<ShiftOperator>,
    pub secularization: Secularization,
    pub counter_rotating: bool,
    levels: Vec<u32>,
    decay_gram: DMatrix<f64>,
}

impl GeneratorSet {
    fn assemble(
        tensor: &BrTensor,
        h_cp: DMatrix<f64>,
        decay: Vec<DecayOperator>,
        shift: Vec<ShiftOperator>,
        secularization: Secularization,
    ) -> Self {
        let n = tensor.dim();
        let mut decay_gram = DMatrix::zeros(n, n);
        for d in &decay {
            decay_gram += d.op.gram();
        }
        Self {
            h_at: tensor.energies().to_vec(),
            h_cp,
            decay,
            shift,
            secularization,
            counter_rotating: tensor.counter_rotating(),
            levels: tensor.levels().to_vec(),
            decay_gram,
        }
    }

    pub fn dim(&self) -> usize {
        self.h_at.len()
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    /// H_at + H_CP.
    pub fn hamiltonian(&self) -> DMatrix<f64> {
        let mut h = self.h_cp.clone();
        for (k, e) in self.h_at.iter().enumerate() {
            h[(k, k)] += e;
        }
        h
    }

    /// Σ_k L_kᵀ L_k over all decay operators.
    pub fn decay_gram(&self) -> &DMatrix<f64> {
        &self.decay_gram
    }

    /// H_at + H_CP − (i/2) Σ L†L on the full space.
    pub fn effective_hamiltonian(&self) -> DMatrix<Complex64> {
        let h = self.hamiltonian();
        DMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            Complex64::new(h[(i, j)], -0.5 * self.decay_gram[(i, j)])
        })
    }

    /// Kossakowski matrix of the dissipator in the basis of transition
    /// operators |c⟩⟨a|, assembled from the decay operators.
    pub fn kossakowski(&self) -> (Vec<(usize, usize)>, DMatrix<f64>) {
        let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for d in &self.decay {
            for (r, c, _) in d.op.iter() {
                let next = index.len();
                index.entry((r, c)).or_insert(next);
            }
        }
        let mut m = DMatrix::zeros(index.len(), index.len());
        for d in &self.decay {
            let entries: Vec<(usize, f64)> = d.op.iter().map(|(r, c, v)| (index[&(r, c)], v)).collect();
            for &(i, vi) in &entries {
                for &(j, vj) in &entries {
                    m[(i, j)] += vi * vj;
                }
            }
        }
        let mut pairs = vec![(0, 0); index.len()];
        for (k, v) in index {
            pairs[v] = k;
        }
        (pairs, m)
    }
}

/// Partial-secular geometric-mean Lindblad generator.
pub fn geometric_mean_lindblad(t: &BrTensor) -> Result<GeneratorSet> {
    if t.filter() != TupleFilter::SameLevel {
        return Err(Error::InvalidInput(
            "geometric-mean generator needs a partially secularized tensor".into(),
        ));
    }
    let n = t.dim();
    let levels = t.levels();
    let mut level_set: Vec<u32> = levels.to_vec();
    level_set.sort_unstable();
    level_set.dedup();

    let mut h_cp = DMatrix::zeros(n, n);
    let mut decay = Vec::new();
    let mut shift = Vec::new();
    for q in Spherical::ALL {
        for &level in &level_set {
            let group: Vec<&Transition> = t.transitions_of(q).filter(|tr| levels[tr.source] == level).collect();
            if group.is_empty() {
                continue;
            }
            let mut sigma = Vec::new();
            let mut dmag = Vec::new();
            // per final state: (source, λ) of the first nonzero λ seen
            let mut first: Vec<Option<(usize, f64)>> = vec![None; n];
            for tr in &group {
                if tr.gamma < 0.0 {
                    return Err(Error::Consistency(format!(
                        "negative decay kernel {:e} on transition {}->{}",
                        tr.gamma, tr.source, tr.target
                    )));
                }
                if tr.gamma > 0.0 {
                    sigma.push((tr.target, tr.source, tr.dipole * tr.gamma.sqrt()));
                }
                if tr.lambda != 0.0 {
                    match first[tr.target] {
                        None => first[tr.target] = Some((tr.source, tr.lambda)),
                        Some((b0, l0)) if l0.signum() != tr.lambda.signum() => {
                            return Err(Error::SignCondition {
                                a: b0,
                                b: tr.source,
                                c: tr.target,
                                delta: q.q() as i8,
                                lambda_ac: l0,
                                lambda_bc: tr.lambda,
                            });
                        }
                        Some(_) => {}
                    }
                    dmag.push((tr.target, tr.source, tr.dipole * tr.lambda.abs().sqrt()));
                }
            }
            if !sigma.is_empty() {
                decay.push(DecayOperator {
                    q,
                    group: DecayGroup::Level(level),
                    op: SparseMatrix::from_triplets(n, n, sigma),
                });
            }
            if !dmag.is_empty() {
                let sign = first
                    .iter()
                    .map(|f| f.map_or(0, |(_, l)| if l > 0.0 { 1 } else { -1 }))
                    .collect();
                let op = ShiftOperator {
                    q,
                    level,
                    magnitude: SparseMatrix::from_triplets(n, n, dmag),
                    sign,
                };
                h_cp += op.signed_gram();
                shift.push(op);
            }
        }
    }
    Ok(GeneratorSet::assemble(t, h_cp, decay, shift, Secularization::PartialGeometricMean))
}

/// Fully secular Lindblad generator: only tuples with ω_ac = ω_bd survive.
/// Decay terms are grouped by frequency into S^q_Ω = Σ d √γ |c⟩⟨a|.
pub fn full_secularize(t: &BrTensor) -> GeneratorSet {
    let n = t.dim();
    let e = t.energies();
    let levels = t.levels();
    let same_level = t.filter() == TupleFilter::SameLevel;

    // secular Lamb shift: tuples with c = d and E_a = E_b
    let mut h_ls = DMatrix::zeros(n, n);
    for q in Spherical::ALL {
        let mut by_target: Vec<Vec<&Transition>> = vec![Vec::new(); n];
        for tr in t.transitions_of(q) {
            by_target[tr.target].push(tr);
        }
        for group in &by_target {
            for t1 in group {
                for t2 in group {
                    if (e[t1.source] - e[t2.source]).abs() > DEGENERACY_TOL {
                        continue;
                    }
                    if same_level && levels[t1.source] != levels[t2.source] {
                        continue;
                    }
                    h_ls[(t1.source, t2.source)] += t1.dipole * t2.dipole * 0.5 * (t1.lambda + t2.lambda);
                }
            }
        }
    }

    let mut decay = Vec::new();
    for q in Spherical::ALL {
        let mut group: Vec<&Transition> = t.transitions_of(q).filter(|tr| tr.gamma > 0.0).collect();
        group.sort_by(|x, y| {
            let lx = if same_level { levels[x.source] } else { 0 };
            let ly = if same_level { levels[y.source] } else { 0 };
            lx.cmp(&ly).then(x.omega.total_cmp(&y.omega))
        });
        let mut start = 0;
        while start < group.len() {
            let head = group[start];
            let mut end = start + 1;
            while end < group.len()
                && (group[end].omega - group[end - 1].omega).abs() <= DEGENERACY_TOL
                && (!same_level || levels[group[end].source] == levels[head.source])
            {
                end += 1;
            }
            let triplets = group[start..end]
                .iter()
                .map(|tr| (tr.target, tr.source, tr.dipole * tr.gamma.sqrt()))
                .collect();
            decay.push(DecayOperator {
                q,
                group: DecayGroup::Frequency {
                    omega: head.omega,
                    level: same_level.then_some(levels[head.source]),
                },
                op: SparseMatrix::from_triplets(n, n, triplets),
            });
            start = end;
        }
    }
    GeneratorSet::assemble(t, h_ls, decay, Vec::new(), Secularization::Full)
}

/// −i[H_at + H_CP, ρ] + Σ (L ρ L† − ½{L†L, ρ}).
pub fn lindblad_rhs(g: &GeneratorSet, rho: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let n = g.dim();
    if rho.nrows() != n || rho.ncols() != n {
        return Err(Error::Dimension {
            expected: n,
            got: rho.nrows().max(rho.ncols()),
        });
    }
    let heff = g.effective_hamiltonian();
    let i = Complex64::new(0.0, 1.0);
    let mut out = (&heff * rho - rho * heff.adjoint()) * (-i);
    for d in &g.decay {
        add_sandwich(&d.op, rho, &mut out);
    }
    Ok(out)
}

/// out += L ρ Lᵀ for a real sparse L.
pub(crate) fn add_sandwich(l: &SparseMatrix, rho: &DMatrix<Complex64>, out: &mut DMatrix<Complex64>) {
    let entries: Vec<(usize, usize, f64)> = l.iter().collect();
    for &(k, i, lki) in &entries {
        for &(m, j, lmj) in &entries {
            let r = rho[(i, j)];
            if r != Complex64::new(0.0, 0.0) {
                out[(k, m)] += r * (lki * lmj);
            }
        }
    }
}

/// Kossakowski matrix assembled directly from the tensor entries, in the
/// basis of transition operators |c⟩⟨a|. `geometric` selects
/// √γ(ω_ac)√γ(ω_bd) instead of the Bloch-Redfield average.
pub fn kossakowski_from_tensor(t: &BrTensor, geometric: bool) -> (Vec<(usize, usize)>, DMatrix<f64>) {
    let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for tr in t.transitions() {
        if tr.gamma > 0.0 {
            let next = index.len();
            index.entry((tr.target, tr.source)).or_insert(next);
        }
    }
    let mut m = DMatrix::zeros(index.len(), index.len());
    for e in t.entries() {
        let (Some(&i), Some(&j)) = (index.get(&(e.c, e.a)), index.get(&(e.d, e.b))) else {
            continue;
        };
        let v = if geometric {
            let g = e.gamma_ac * e.gamma_bd;
            // both carry the dipole product d_ca d_db
            let dd_sign = e.gamma_ac.signum();
            dd_sign * g.abs().sqrt()
        } else {
            0.5 * (e.gamma_ac + e.gamma_bd)
        };
        m[(i, j)] += v;
    }
    let mut pairs = vec![(0, 0); index.len()];
    for (k, v) in index {
        pairs[v] = k;
    }
    (pairs, m)
}
