//! Exact propagation by the matrix exponential of the generator restricted
//! to the density-matrix elements reachable from the initial state.
//!
//! Symmetries (m_j, parity, photon parity) keep the reachable set far
//! smaller than N². The restricted generator is written in real
//! coordinates of Hermitian matrices (Re ρ_ii; Re ρ_ij, Im ρ_ij for i < j),
//! which assumes the generator maps Hermitian matrices to Hermitian
//! matrices.

use std::collections::{HashMap, VecDeque};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::generator::SparseGenerator;
use crate::error::{Error, Result};

/// Real dimension above which the restricted generator is not materialized.
pub const MAX_SUPPORT: usize = 1600;

#[derive(Clone, Debug)]
pub struct Support {
    pairs: Vec<(usize, usize)>,
    // first real coordinate of each pair
    offset: Vec<usize>,
    index: HashMap<(usize, usize), usize>,
    real_dim: usize,
}

impl Support {
    /// Closure of the nonzero upper-triangle elements of ρ0 under the
    /// generator.
    pub fn reachable(g: &SparseGenerator, rho0: &DMatrix<Complex64>, limit: usize) -> Result<Self> {
        let n = g.dim();
        let mut index = HashMap::new();
        let mut pairs = Vec::new();
        let mut queue = VecDeque::new();
        fn push(
            p: (usize, usize),
            index: &mut HashMap<(usize, usize), usize>,
            pairs: &mut Vec<(usize, usize)>,
            queue: &mut VecDeque<(usize, usize)>,
        ) {
            let p = (p.0.min(p.1), p.0.max(p.1));
            if !index.contains_key(&p) {
                index.insert(p, pairs.len());
                pairs.push(p);
                queue.push_back(p);
            }
        }
        for i in 0..n {
            for j in i..n {
                if rho0[(i, j)] != Complex64::new(0.0, 0.0) || rho0[(j, i)] != Complex64::new(0.0, 0.0) {
                    push((i, j), &mut index, &mut pairs, &mut queue);
                }
            }
        }
        let mut real_dim = 0;
        while let Some((i, j)) = queue.pop_front() {
            real_dim += if i == j { 1 } else { 2 };
            if real_dim > limit {
                return Err(Error::InvalidInput(format!(
                    "reachable density-matrix support exceeds {limit} real dimensions"
                )));
            }
            for (p, v) in g.unit_image(i, j).into_iter().chain(g.unit_image(j, i)) {
                if v != Complex64::new(0.0, 0.0) {
                    push(p, &mut index, &mut pairs, &mut queue);
                }
            }
        }
        let mut offset = Vec::with_capacity(pairs.len());
        let mut k = 0;
        for &(i, j) in &pairs {
            offset.push(k);
            k += if i == j { 1 } else { 2 };
        }
        Ok(Self {
            pairs,
            offset,
            index,
            real_dim: k,
        })
    }

    pub fn real_dim(&self) -> usize {
        self.real_dim
    }

    pub fn to_coords(&self, rho: &DMatrix<Complex64>) -> DVector<f64> {
        let mut v = DVector::zeros(self.real_dim);
        for (p, &(i, j)) in self.pairs.iter().enumerate() {
            let o = self.offset[p];
            v[o] = rho[(i, j)].re;
            if i != j {
                v[o + 1] = rho[(i, j)].im;
            }
        }
        v
    }

    pub fn to_matrix(&self, v: &DVector<f64>, n: usize) -> DMatrix<Complex64> {
        let mut rho = DMatrix::zeros(n, n);
        for (p, &(i, j)) in self.pairs.iter().enumerate() {
            let o = self.offset[p];
            if i == j {
                rho[(i, i)] = Complex64::new(v[o], 0.0);
            } else {
                let z = Complex64::new(v[o], v[o + 1]);
                rho[(i, j)] = z;
                rho[(j, i)] = z.conj();
            }
        }
        rho
    }

    /// The generator in real coordinates on this support.
    pub fn restrict(&self, g: &SparseGenerator) -> DMatrix<f64> {
        let mut s = DMatrix::zeros(self.real_dim, self.real_dim);
        let add = |s: &mut DMatrix<f64>, col: usize, image: Vec<((usize, usize), Complex64)>, scale: Complex64| {
            // image of a basis element; only the upper triangle is read
            // after symmetrizing the Hermitian output
            let mut acc: HashMap<(usize, usize), Complex64> = HashMap::new();
            for ((k, m), v) in image {
                let v = v * scale;
                *acc.entry((k, m)).or_default() += v;
            }
            for (&(k, m), &v) in &acc {
                if k > m {
                    continue;
                }
                let p = self.index[&(k, m)];
                let o = self.offset[p];
                s[(o, col)] += v.re;
                if k != m {
                    s[(o + 1, col)] += v.im;
                }
            }
        };
        for (p, &(i, j)) in self.pairs.iter().enumerate() {
            let o = self.offset[p];
            if i == j {
                add(&mut s, o, g.unit_image(i, i), Complex64::new(1.0, 0.0));
            } else {
                // E_ij + E_ji
                let mut img = g.unit_image(i, j);
                img.extend(g.unit_image(j, i));
                add(&mut s, o, img, Complex64::new(1.0, 0.0));
                // i E_ij − i E_ji
                let mut img: Vec<_> = g.unit_image(i, j);
                img.extend(
                    g.unit_image(j, i)
                        .into_iter()
                        .map(|(p, v)| (p, -v)),
                );
                add(&mut s, o + 1, img, Complex64::new(0.0, 1.0));
            }
        }
        s
    }
}

/// exp(S dt) for the restricted generator.
pub fn step_propagator(s: &DMatrix<f64>, dt: f64) -> DMatrix<f64> {
    (s * dt).exp()
}
