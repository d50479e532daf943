//! Hydrogen fine-structure basis, energies and spherical dipole matrix
//! elements.

pub mod angular;
pub mod radial;

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::ALPHA;

pub use radial::radial_integral;

/// Spherical component of a vector operator. `d^q` raises `m_j` by `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Spherical {
    Plus,
    Minus,
    Zero,
}

impl Spherical {
    pub const ALL: [Spherical; 3] = [Spherical::Plus, Spherical::Minus, Spherical::Zero];

    pub fn q(self) -> i32 {
        match self {
            Spherical::Plus => 1,
            Spherical::Minus => -1,
            Spherical::Zero => 0,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Spherical::Plus => 0,
            Spherical::Minus => 1,
            Spherical::Zero => 2,
        }
    }

    pub fn from_q(q: i32) -> Option<Self> {
        match q {
            1 => Some(Spherical::Plus),
            -1 => Some(Spherical::Minus),
            0 => Some(Spherical::Zero),
            _ => None,
        }
    }
}

/// Parity of the orbital angular momentum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_l(l: u32) -> Self {
        if l % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// A fine-structure state |n, l, j, m_j>. `j` and `m_j` are stored doubled.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantumState {
    pub n: u32,
    pub l: u32,
    pub two_j: u32,
    pub two_mj: i32,
    /// Hartree.
    pub energy: f64,
}

impl QuantumState {
    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn mj(&self) -> f64 {
        self.two_mj as f64 / 2.0
    }

    pub fn parity(&self) -> Parity {
        Parity::of_l(self.l)
    }

    /// Spectroscopic label, e.g. `3s1/2(+1/2)`.
    pub fn label(&self) -> String {
        const L: [char; 12] = ['s', 'p', 'd', 'f', 'g', 'h', 'i', 'k', 'l', 'm', 'n', 'o'];
        let lc = L.get(self.l as usize).copied().unwrap_or('?');
        let sign = if self.two_mj < 0 { '-' } else { '+' };
        format!(
            "{}{}{}/2({}{}/2)",
            self.n,
            lc,
            self.two_j,
            sign,
            self.two_mj.abs()
        )
    }

    pub fn same_labels(&self, n: u32, l: u32, two_j: u32, two_mj: i32) -> bool {
        self.n == n && self.l == l && self.two_j == two_j && self.two_mj == two_mj
    }
}

impl fmt::Display for QuantumState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Fine-structure energy E_nj in Hartree for a given fine-structure
/// constant. `two_j` is 2j.
pub fn fine_structure_energy_with(n: u32, two_j: u32, alpha: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("principal quantum number must be >= 1".into()));
    }
    if two_j % 2 == 0 || (two_j + 1) / 2 > n {
        return Err(Error::Domain(format!(
            "j = {two_j}/2 is not a fine-structure level of n = {n}"
        )));
    }
    let nf = n as f64;
    let j_half = (two_j + 1) as f64 / 2.0;
    Ok(-1.0 / (2.0 * nf * nf) - alpha * alpha / (2.0 * nf.powi(3)) * (1.0 / j_half - 3.0 / (4.0 * nf)))
}

/// Fine-structure energy with the CODATA fine-structure constant.
pub fn fine_structure_energy(n: u32, two_j: u32) -> Result<f64> {
    fine_structure_energy_with(n, two_j, ALPHA)
}

/// Ordered fine-structure basis up to a principal quantum number cutoff.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Basis {
    pub states: Vec<QuantumState>,
    pub n_max: u32,
    pub alpha: f64,
}

/// All states with n <= n_max, ordered by n, l, j, m_j.
pub fn enumerate_basis(n_max: u32) -> Basis {
    enumerate_basis_with(n_max, ALPHA)
}

pub fn enumerate_basis_with(n_max: u32, alpha: f64) -> Basis {
    let mut states = Vec::new();
    for n in 1..=n_max {
        for l in 0..n {
            let mut two_js = vec![2 * l + 1];
            if l > 0 {
                two_js.insert(0, 2 * l - 1);
            }
            for two_j in two_js {
                let energy = fine_structure_energy_with(n, two_j, alpha).expect("valid (n, j)");
                let tj = two_j as i32;
                for two_mj in (-tj..=tj).step_by(2) {
                    states.push(QuantumState {
                        n,
                        l,
                        two_j,
                        two_mj,
                        energy,
                    });
                }
            }
        }
    }
    Basis {
        states,
        n_max,
        alpha,
    }
}

impl Basis {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn find(&self, n: u32, l: u32, two_j: u32, two_mj: i32) -> Option<usize> {
        self.states
            .iter()
            .position(|s| s.same_labels(n, l, two_j, two_mj))
    }

    /// Indices of the states in Bohr level `n`.
    pub fn level_indices(&self, n: u32) -> Vec<usize> {
        self.states
            .iter()
            .enumerate()
            .filter(|(_, s)| s.n == n)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.energy).collect()
    }
}

/// Sparse spherical dipole matrices `<a| d^q |b>` in e a0, real under the
/// Condon-Shortley convention.
#[derive(Clone, Debug, Default)]
pub struct DipoleTable {
    dim: usize,
    // indexed by Spherical::index()
    elements: [BTreeMap<(usize, usize), f64>; 3],
}

impl DipoleTable {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, q: Spherical, a: usize, b: usize) -> f64 {
        self.elements[q.index()].get(&(a, b)).copied().unwrap_or(0.0)
    }

    /// Non-zero elements `(a, b, <a|d^q|b>)`, ordered by (a, b).
    pub fn iter(&self, q: Spherical) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.elements[q.index()].iter().map(|(&(a, b), &v)| (a, b, v))
    }

    pub fn nnz(&self, q: Spherical) -> usize {
        self.elements[q.index()].len()
    }

    pub fn to_dense(&self, q: Spherical) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (a, b, v) in self.iter(q) {
            m[(a, b)] = v;
        }
        m
    }

    /// Cartesian components (d_x, d_y, d_z) recovered by inverting the
    /// spherical transformation.
    pub fn cartesian(&self) -> [DMatrix<Complex64>; 3] {
        let plus = self.to_dense(Spherical::Plus).map(|v| Complex64::new(v, 0.0));
        let minus = self.to_dense(Spherical::Minus).map(|v| Complex64::new(v, 0.0));
        let zero = self.to_dense(Spherical::Zero).map(|v| Complex64::new(v, 0.0));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let dx = (&minus - &plus) * Complex64::new(s, 0.0);
        let dy = (&plus + &minus) * Complex64::new(0.0, s);
        [dx, dy, zero]
    }
}

/// Spherical dipole element between two fine-structure states.
fn coupled_element(final_: &QuantumState, q: i32, initial: &QuantumState, radial: f64) -> f64 {
    let (lp, l) = (final_.l as i32, initial.l as i32);
    let mut acc = 0.0;
    for two_ms in [-1, 1] {
        let two_ml_f = final_.two_mj - two_ms;
        let two_ml_i = initial.two_mj - two_ms;
        if two_ml_f.abs() > 2 * lp || two_ml_i.abs() > 2 * l {
            continue;
        }
        let cg_f = angular::clebsch_gordan(2 * lp, two_ml_f, 1, two_ms, final_.two_j as i32, final_.two_mj);
        let cg_i = angular::clebsch_gordan(2 * l, two_ml_i, 1, two_ms, initial.two_j as i32, initial.two_mj);
        if cg_f == 0.0 || cg_i == 0.0 {
            continue;
        }
        acc += cg_f * cg_i * angular::c1_element(lp, two_ml_f / 2, q, l, two_ml_i / 2);
    }
    acc * radial
}

/// Builds `<a|d^q|b>` for every pair allowed by the selection rules
/// (|Δl| = 1, m_j(a) = m_j(b) + q).
pub fn build_dipole_table(basis: &Basis) -> DipoleTable {
    let mut table = DipoleTable {
        dim: basis.len(),
        elements: Default::default(),
    };
    let mut radial_cache: BTreeMap<(u32, u32, u32, u32), f64> = BTreeMap::new();
    for (a, sa) in basis.states.iter().enumerate() {
        for (b, sb) in basis.states.iter().enumerate() {
            if sa.l.abs_diff(sb.l) != 1 {
                continue;
            }
            let dq = (sa.two_mj - sb.two_mj) / 2;
            let Some(comp) = Spherical::from_q(dq) else {
                continue;
            };
            let radial = *radial_cache
                .entry((sa.n, sa.l, sb.n, sb.l))
                .or_insert_with(|| radial_integral(sa.n, sa.l, sb.n, sb.l).expect("|dl| = 1"));
            let v = coupled_element(sa, dq, sb, radial);
            // exact angular zeros come out at roundoff level
            if v.abs() > 1e-14 * radial.abs().max(1.0) {
                table.elements[comp.index()].insert((a, b), v);
            }
        }
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_state_energy() {
        let e = fine_structure_energy(1, 1).unwrap();
        assert!((e - (-0.5 - ALPHA * ALPHA / 8.0)).abs() < 1e-16);
    }

    #[test]
    fn n2_fine_structure_splitting() {
        let e12 = fine_structure_energy(2, 1).unwrap();
        let e32 = fine_structure_energy(2, 3).unwrap();
        assert!(((e32 - e12) - ALPHA * ALPHA / 32.0).abs() < 1e-10 * ALPHA * ALPHA);
    }

    #[test]
    fn n7_j_half() {
        let e = fine_structure_energy(7, 1).unwrap();
        let expected = -1.0 / 98.0 - ALPHA * ALPHA / 686.0 * (1.0 - 3.0 / 28.0);
        assert!((e - expected).abs() < 1e-16);
    }

    #[test]
    fn invalid_levels() {
        assert!(fine_structure_energy(0, 1).is_err());
        assert!(fine_structure_energy(2, 2).is_err());
        assert!(fine_structure_energy(2, 5).is_err());
    }

    #[test]
    fn basis_counts() {
        assert_eq!(enumerate_basis(1).len(), 2);
        assert_eq!(enumerate_basis(4).len(), 60);
        let b = enumerate_basis(7);
        for n in 1..=7 {
            assert_eq!(b.level_indices(n).len() as u32, 2 * n * n);
        }
        let even_half = b
            .states
            .iter()
            .filter(|s| s.n == 7 && s.two_mj == 1 && s.l % 2 == 0)
            .count();
        assert_eq!(even_half, 7);
    }

    #[test]
    fn basis_ordering() {
        let b = enumerate_basis(3);
        let key = |s: &QuantumState| (s.n, s.l, s.two_j, s.two_mj);
        assert!(b.states.windows(2).all(|w| key(&w[0]) < key(&w[1])));
    }

    #[test]
    fn energy_increases_with_j() {
        let b = enumerate_basis(6);
        for s in &b.states {
            for t in &b.states {
                if s.n == t.n && s.two_j < t.two_j {
                    assert!(s.energy < t.energy);
                }
            }
        }
    }

    #[test]
    fn lm_element_1s_2p0_recovered() {
        // <1s|z|2p0> in the uncoupled basis = 128 sqrt(2)/243; the coupled
        // elements combine into it through the spin-orbit recoupling.
        let b = enumerate_basis(2);
        let t = build_dipole_table(&b);
        let s = b.find(1, 0, 1, 1).unwrap();
        let p12 = b.find(2, 1, 1, 1).unwrap();
        let p32 = b.find(2, 1, 3, 1).unwrap();
        let c12 = angular::clebsch_gordan(2, 0, 1, 1, 1, 1);
        let c32 = angular::clebsch_gordan(2, 0, 1, 1, 3, 1);
        let z = c12 * t.get(Spherical::Zero, s, p12) + c32 * t.get(Spherical::Zero, s, p32);
        assert!((z - 128.0 * 2f64.sqrt() / 243.0).abs() < 1e-13, "{z}");
    }

    #[test]
    fn selection_rules_hold() {
        let b = enumerate_basis(4);
        let t = build_dipole_table(&b);
        for q in Spherical::ALL {
            assert!(t.nnz(q) > 0);
            for (a, c, _) in t.iter(q) {
                let (sa, sc) = (&b.states[a], &b.states[c]);
                assert_eq!(sa.l.abs_diff(sc.l), 1);
                assert_eq!(sa.two_mj, sc.two_mj + 2 * q.q());
            }
        }
    }

    #[test]
    fn conjugation_symmetry() {
        let b = enumerate_basis(3);
        let t = build_dipole_table(&b);
        for q in Spherical::ALL {
            let opp = Spherical::from_q(-q.q()).unwrap();
            let sign = if q.q() % 2 == 0 { 1.0 } else { -1.0 };
            for a in 0..b.len() {
                for c in 0..b.len() {
                    let lhs = t.get(q, c, a);
                    let rhs = sign * t.get(opp, a, c);
                    assert!((lhs - rhs).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn cartesian_components_hermitian() {
        let b = enumerate_basis(4);
        let t = build_dipole_table(&b);
        for m in t.cartesian() {
            let diff = (&m - m.adjoint()).norm();
            assert!(diff <= 1e-12 * m.norm());
        }
    }
}
