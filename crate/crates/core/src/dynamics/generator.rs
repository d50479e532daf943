use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::linalg::SparseMatrix;
use crate::master_eq::{BrTensor, GeneratorSet};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Which member of the hierarchy a generator came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    BlochRedfield,
    Lindblad,
    Effective,
    Oracle,
}

impl GeneratorKind {
    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::BlochRedfield => "bloch-redfield",
            GeneratorKind::Lindblad => "lindblad",
            GeneratorKind::Effective => "effective",
            GeneratorKind::Oracle => "oracle",
        }
    }
}

/// A linear generator ρ̇ = −i(H ρ − ρ H†) + Σ_k L_k ρ L_kᵀ + T[ρ] in
/// operator form.
///
/// H is non-Hermitian in general (it carries −(i/2) Σ L†L or the
/// one-sided Bloch-Redfield terms); the L_k are real; T holds two-sided
/// terms that do not factorize (Bloch-Redfield only).
#[derive(Clone, Debug)]
pub struct SparseGenerator {
    pub kind: GeneratorKind,
    dim: usize,
    // column j: (k, H_kj)
    h_cols: Vec<Vec<(usize, Complex64)>>,
    jumps: Vec<SparseMatrix>,
    // (b, a) -> [(d, c, w)]: ρ_ba feeds (d, c)
    tensor: HashMap<(usize, usize), Vec<(usize, usize, Complex64)>>,
    trace_preserving: bool,
}

impl SparseGenerator {
    pub fn new(
        kind: GeneratorKind,
        h: &DMatrix<Complex64>,
        jumps: Vec<SparseMatrix>,
        trace_preserving: bool,
    ) -> Self {
        let dim = h.nrows();
        let h_cols = (0..dim)
            .map(|j| (0..dim).filter_map(|k| (h[(k, j)] != ZERO).then(|| (k, h[(k, j)]))).collect())
            .collect();
        Self {
            kind,
            dim,
            h_cols,
            jumps,
            tensor: HashMap::new(),
            trace_preserving,
        }
    }

    /// Geometric-mean (or full-secular) Lindblad generator.
    pub fn lindblad(g: &GeneratorSet) -> Self {
        let jumps = g.decay.iter().map(|d| d.op.clone()).collect();
        Self::new(GeneratorKind::Lindblad, &g.effective_hamiltonian(), jumps, true)
    }

    /// The same generator with every jump term removed.
    pub fn lindblad_without_refilling(g: &GeneratorSet) -> Self {
        Self::new(GeneratorKind::Effective, &g.effective_hamiltonian(), Vec::new(), false)
    }

    /// Effective non-Hermitian Hamiltonian acting on its own space.
    pub fn effective(h_eff: &DMatrix<Complex64>) -> Self {
        Self::new(GeneratorKind::Effective, h_eff, Vec::new(), false)
    }

    /// Bloch-Redfield generator, −i[H_at, ρ] + Kρ + ρK† + two-sided terms.
    pub fn bloch_redfield(t: &BrTensor) -> Self {
        let n = t.dim();
        let k = t.one_sided();
        // −i(Hρ − ρH†) = Kρ + ρK† − i[H_at, ρ] with H = H_at + iK
        let mut h = k * I;
        for (j, e) in t.energies().iter().enumerate() {
            h[(j, j)] += e;
        }
        let mut tensor: HashMap<(usize, usize), Vec<(usize, usize, Complex64)>> = HashMap::new();
        for (d, c, b, a, w) in t.two_sided() {
            tensor.entry((b, a)).or_default().push((d, c, w));
        }
        let mut g = Self::new(GeneratorKind::BlochRedfield, &h, Vec::new(), true);
        g.tensor = tensor;
        debug_assert_eq!(g.dim, n);
        g
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    /// ρ̇ for a dense ρ.
    pub fn apply(&self, rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let n = self.dim;
        let mut out = DMatrix::zeros(n, n);
        for (j, col) in self.h_cols.iter().enumerate() {
            for &(k, h) in col {
                // −i H_kj ρ_j· into row k
                let f = -I * h;
                for m in 0..n {
                    let r = rho[(j, m)];
                    if r != ZERO {
                        out[(k, m)] += f * r;
                    }
                }
                // +i ρ_·j conj(H_kj) into column k
                let f = I * h.conj();
                for m in 0..n {
                    let r = rho[(m, j)];
                    if r != ZERO {
                        out[(m, k)] += f * r;
                    }
                }
            }
        }
        for l in &self.jumps {
            crate::master_eq::add_sandwich(l, rho, &mut out);
        }
        for (&(b, a), targets) in &self.tensor {
            let r = rho[(b, a)];
            if r != ZERO {
                for &(d, c, w) in targets {
                    out[(d, c)] += w * r;
                }
            }
        }
        out
    }

    /// Image of the matrix unit |i⟩⟨j| as sparse entries.
    pub fn unit_image(&self, i: usize, j: usize) -> Vec<((usize, usize), Complex64)> {
        let mut out = Vec::new();
        for &(k, h) in &self.h_cols[i] {
            out.push(((k, j), -I * h));
        }
        for &(m, h) in &self.h_cols[j] {
            out.push(((i, m), I * h.conj()));
        }
        for l in &self.jumps {
            for (k, lki) in l.column(i) {
                for (m, lmj) in l.column(j) {
                    out.push(((k, m), Complex64::new(lki * lmj, 0.0)));
                }
            }
        }
        if let Some(targets) = self.tensor.get(&(i, j)) {
            for &(d, c, w) in targets {
                out.push(((d, c), w));
            }
        }
        out
    }

    /// Dense N²×N² superoperator acting on column-stacked ρ.
    pub fn superoperator(&self) -> DMatrix<Complex64> {
        let n = self.dim;
        let mut s = DMatrix::zeros(n * n, n * n);
        for j in 0..n {
            for i in 0..n {
                for ((k, m), v) in self.unit_image(i, j) {
                    s[(k + m * n, i + j * n)] += v;
                }
            }
        }
        s
    }
}
