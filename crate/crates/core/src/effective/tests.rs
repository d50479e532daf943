use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::*;
use crate::atom::{build_dipole_table, enumerate_basis, enumerate_basis_with, DipoleTable};
use crate::bath::{Lorentzian, NegativeFrequencyTail, SpectralModel};
use crate::dynamics::{propagate, Method, Observable, PropagationJob, SparseGenerator};
use crate::master_eq::{build_br_tensor, geometric_mean_lindblad, partial_secularize, BrOptions, Secularization};
use crate::units::ev_to_hartree;

fn appendix_model() -> SpectralModel {
    SpectralModel::lorentzian_axial(
        Lorentzian {
            g: ev_to_hartree(9e-4 / 5f64.sqrt()),
            kappa: ev_to_hartree(2e-3),
            center: ev_to_hartree(1.95),
        },
        NegativeFrequencyTail::Allow,
    )
    .unwrap()
}

fn gm_with(basis: &Basis, dip: &DipoleTable, model: &SpectralModel, opts: &BrOptions) -> GeneratorSet {
    let t = build_br_tensor(basis, dip, model, opts).unwrap();
    geometric_mean_lindblad(&partial_secularize(&t)).unwrap()
}

fn gm(basis: &Basis, dip: &DipoleTable, model: &SpectralModel) -> GeneratorSet {
    gm_with(basis, dip, model, &BrOptions::default())
}

fn dark_setup() -> (Basis, GeneratorSet) {
    let basis = enumerate_basis_with(7, 0.0);
    let dip = build_dipole_table(&basis);
    let model = SpectralModel::lorentzian_axial(
        Lorentzian {
            g: 1e-3,
            kappa: 2e-3,
            center: 0.5 * (1.0 / 36.0 - 1.0 / 49.0),
        },
        NegativeFrequencyTail::Allow,
    )
    .unwrap();
    let opts = BrOptions {
        intermediate_levels: Some(vec![6]),
        ..BrOptions::default()
    };
    let g = gm_with(&basis, &dip, &model, &opts);
    (basis, g)
}

#[test]
fn vacuum_gives_bare_energies() {
    let basis = enumerate_basis(3);
    let dip = build_dipole_table(&basis);
    let g = gm(&basis, &dip, &SpectralModel::vacuum());
    let level = project_effective(&g, &basis, 3).unwrap();
    for (i, &k) in level.indices.iter().enumerate() {
        for j in 0..level.indices.len() {
            let want = if i == j { basis.states[k].energy } else { 0.0 };
            assert_eq!(level.matrix[(i, j)], Complex64::new(want, 0.0));
        }
    }
    for block in block_decompose(&level, &basis).unwrap() {
        let e = eigenanalyze(&block).unwrap();
        assert!(e.rates.iter().all(|&r| r == 0.0));
        let mut want: Vec<f64> = block.labels.iter().map(|s| s.energy).collect();
        want.sort_by(f64::total_cmp);
        for (a, b) in e.energies.iter().zip(&want) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}

#[test]
fn missing_level_is_rejected() {
    let basis = enumerate_basis(2);
    let dip = build_dipole_table(&basis);
    let g = gm(&basis, &dip, &SpectralModel::vacuum());
    assert!(project_effective(&g, &basis, 5).is_err());
}

#[test]
fn appendix_level_three_splits_into_blocks() {
    let basis = enumerate_basis(4);
    let dip = build_dipole_table(&basis);
    let g = gm(&basis, &dip, &appendix_model());
    let level = project_effective(&g, &basis, 3).unwrap();
    assert_eq!(level.matrix.nrows(), 18);
    let blocks = block_decompose(&level, &basis).unwrap();
    assert_eq!(blocks.iter().map(|b| b.dim()).sum::<usize>(), 18);
    // off-block entries vanish exactly
    let pos = |k: usize| level.indices.iter().position(|&i| i == k).unwrap();
    for a in &blocks {
        for b in &blocks {
            if (a.two_mj, a.parity) == (b.two_mj, b.parity) {
                continue;
            }
            for &i in &a.indices {
                for &j in &b.indices {
                    assert_eq!(level.matrix[(pos(i), pos(j))], Complex64::new(0.0, 0.0));
                }
            }
        }
    }
    let half_even = find_block(&blocks, 1, Parity::Even).unwrap();
    assert_eq!(half_even.dim(), 3);
    // the field actually mixes s and d states
    let off = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).filter(|(i, j)| i != j);
    assert!(off.map(|(i, j)| half_even.h[(i, j)].norm()).fold(0.0, f64::max) > 0.0);
}

#[test]
fn anti_hermitian_part_is_negative_semidefinite() {
    let basis = enumerate_basis(4);
    let dip = build_dipole_table(&basis);
    let g = gm(&basis, &dip, &appendix_model());
    let level = project_effective(&g, &basis, 3).unwrap();
    let m = &level.matrix;
    let anti = (m - m.adjoint()) * Complex64::new(0.0, -0.5);
    let ev = anti.symmetric_eigenvalues();
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(ev.iter().all(|&x| x <= 1e-12 * scale));
    for block in block_decompose(&level, &basis).unwrap() {
        let e = eigenanalyze(&block).unwrap();
        assert!(e.rates.iter().all(|&r| r >= -1e-12 * scale));
    }
}

#[test]
fn level_seven_block_dimensions() {
    let (basis, g) = dark_setup();
    let level = project_effective(&g, &basis, 7).unwrap();
    let blocks = block_decompose(&level, &basis).unwrap();
    assert_eq!(find_block(&blocks, 1, Parity::Even).unwrap().dim(), 7);
    assert_eq!(find_block(&blocks, 1, Parity::Odd).unwrap().dim(), 6);
    let top = find_block(&blocks, 13, Parity::Even).unwrap();
    assert_eq!(top.dim(), 1);
    assert_eq!((top.labels[0].l, top.labels[0].two_j), (6, 13));
    assert!(find_block(&blocks, 13, Parity::Odd).is_none());
}

#[test]
fn opposite_mj_blocks_match() {
    let basis = enumerate_basis(4);
    let dip = build_dipole_table(&basis);
    let iso = SpectralModel::lorentzian_isotropic(
        Lorentzian {
            g: 2e-4,
            kappa: 1e-3,
            center: 0.07,
        },
        NegativeFrequencyTail::Allow,
    )
    .unwrap();
    for model in [appendix_model(), iso] {
        let g = gm(&basis, &dip, &model);
        let level = project_effective(&g, &basis, 3).unwrap();
        let blocks = block_decompose(&level, &basis).unwrap();
        for b in blocks.iter().filter(|b| b.two_mj > 0) {
            let mirror = find_block(&blocks, -b.two_mj, b.parity).unwrap();
            // same (l, j) ordering in both blocks
            let key = |s: &crate::atom::QuantumState| (s.l, s.two_j);
            let perm: Vec<usize> = b
                .labels
                .iter()
                .map(|s| mirror.labels.iter().position(|t| key(t) == key(s)).unwrap())
                .collect();
            // |l j m> and |l j -m> differ by the Clebsch-Gordan phase (-1)^(l+1/2-j)
            let phase: Vec<f64> = b
                .labels
                .iter()
                .map(|s| if (2 * s.l + 1 - s.two_j) % 4 == 0 { 1.0 } else { -1.0 })
                .collect();
            let scale = b.h.iter().map(|z| z.norm()).fold(0.0, f64::max);
            for i in 0..b.dim() {
                for j in 0..b.dim() {
                    let d = (b.h[(i, j)] * phase[i] * phase[j] - mirror.h[(perm[i], perm[j])]).norm();
                    assert!(d <= 1e-13 * scale, "{} {}: {d:e}", b.labels[i], b.labels[j]);
                }
            }
            let ea = eigen_decompose(&b.h).unwrap();
            let eb = eigen_decompose(&mirror.h).unwrap();
            for (x, y) in ea.energies.iter().zip(&eb.energies) {
                assert!((x - y).abs() <= 1e-13 * scale);
            }
        }
    }
}

#[test]
fn participation_ratio_bounds() {
    let e0 = DVector::from_vec(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
    assert_eq!(participation_ratio(&e0).unwrap(), 1.0);
    for n in 1..=9usize {
        let v = DVector::from_fn(n, |k, _| Complex64::from_polar(1.0 / (n as f64).sqrt(), 0.7 * k as f64 + 0.3));
        let p = participation_ratio(&v).unwrap();
        assert!((p - n as f64).abs() <= 1e-12 * n as f64, "n={n}: {p}");
    }
    let bad = DVector::from_element(2, Complex64::new(1.0, 0.0));
    assert!(participation_ratio(&bad).is_err());

    let (basis, g) = dark_setup();
    let level = project_effective(&g, &basis, 7).unwrap();
    let blocks = block_decompose(&level, &basis).unwrap();
    let block = find_block(&blocks, 1, Parity::Even).unwrap();
    let e = eigenanalyze(block).unwrap();
    for k in 0..block.dim() {
        let p = participation_ratio(&e.vectors.column(k).into_owned()).unwrap();
        assert!((1.0 - 1e-12..=7.0 + 1e-12).contains(&p));
    }
}

#[test]
fn dark_state_in_level_seven() {
    let (basis, g) = dark_setup();
    let level = project_effective(&g, &basis, 7).unwrap();
    let blocks = block_decompose(&level, &basis).unwrap();
    let block = find_block(&blocks, 1, Parity::Even).unwrap();
    let psi = dark_state_certificate(block, &g).expect("7 states decay into 6");
    // ⟨ψ|Σ†Σ|ψ⟩ evaluated as Σ_k ‖L_k ψ‖²
    let mut rq = 0.0;
    for d in &g.decay {
        let l = d.op.submatrix(&(0..g.dim()).collect::<Vec<_>>(), &block.indices);
        rq += (l.map(|x| Complex64::new(x, 0.0)) * &psi).norm_squared();
    }
    rq /= psi.norm_squared();
    let norm = decay_gram_block(block, &g).singular_values().max();
    assert!(rq.abs() <= 1e-20 * norm, "Rayleigh quotient {rq:e} vs {norm:e}");

    let e = eigenanalyze(block).unwrap();
    let max = e.rates.iter().copied().fold(0.0, f64::max);
    let dark = e.rates.iter().filter(|&&r| r <= 1e-10 * max).count();
    assert!(max > 0.0);
    assert_eq!(dark, 1, "rates {:?}", e.rates);
}

#[test]
fn isotropic_full_rank_has_no_dark_state() {
    let basis = enumerate_basis(3);
    let dip = build_dipole_table(&basis);
    let iso = SpectralModel::flat(1e-4, 1e-4, NegativeFrequencyTail::Allow).unwrap();
    let g = gm(&basis, &dip, &iso);
    let level = project_effective(&g, &basis, 3).unwrap();
    let blocks = block_decompose(&level, &basis).unwrap();
    let block = find_block(&blocks, 1, Parity::Even).unwrap();
    assert!(dark_state_certificate(block, &g).is_none());
}

#[test]
fn hermitian_part_alone_when_nothing_decays() {
    let h = DMatrix::from_row_slice(3, 3, &[1.0, 0.2, 0.0, 0.2, 1.5, 0.1, 0.0, 0.1, 2.0]);
    let e = eigen_decompose(&h.map(|x| Complex64::new(x, 0.0))).unwrap();
    let mut want: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    want.sort_by(f64::total_cmp);
    for (a, b) in e.energies.iter().zip(&want) {
        assert!((a - b).abs() < 1e-14);
    }
    assert!(e.rates.iter().all(|r| r.abs() < 1e-14));
    assert!(!e.defective);
}

#[test]
fn eigenvectors_satisfy_the_eigenproblem() {
    let basis = enumerate_basis(4);
    let dip = build_dipole_table(&basis);
    let g = gm(&basis, &dip, &appendix_model());
    let level = project_effective(&g, &basis, 3).unwrap();
    let e = eigen_decompose(&level.matrix).unwrap();
    for k in 0..level.matrix.nrows() {
        let v = e.vectors.column(k).into_owned();
        let lam = Complex64::new(e.energies[k], -0.5 * e.rates[k]);
        let r = (&level.matrix * &v - v * lam).norm();
        assert!(r < 1e-12 * e.energies[k].abs(), "residual {r:e}");
        assert!((e.vectors.column(k).norm() - 1.0).abs() < 1e-13);
    }
    assert!(e.energies.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn coupling_enters_linearly() {
    let basis = enumerate_basis(4);
    let dip = build_dipole_table(&basis);
    let base = appendix_model();
    let field = |s: f64| {
        let g = gm(&basis, &dip, &base.scaled(s));
        let level = project_effective(&g, &basis, 3).unwrap();
        let mut m = level.matrix.clone();
        for (i, &k) in level.indices.iter().enumerate() {
            m[(i, i)] -= basis.states[k].energy;
        }
        m
    };
    let f1 = field(1.0);
    let f_half = field(0.5);
    let f_tenth = field(0.1);
    // the bare energies are ~1e6 times the field terms, so subtracting them
    // leaves rounding at the 1e-10 relative level
    let scale = f1.iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!((&f1 * Complex64::new(0.5, 0.0) - &f_half).norm() <= 1e-8 * scale);
    assert!((&f1 * Complex64::new(0.1, 0.0) - &f_tenth).norm() <= 1e-8 * scale);

    // eigenvalues approach the bare energies linearly
    let level = |s: f64| {
        let g = gm(&basis, &dip, &base.scaled(s));
        project_effective(&g, &basis, 3).unwrap()
    };
    let bare_dev = |s: f64| {
        let l = level(s);
        let e = eigen_decompose(&l.matrix).unwrap();
        let mut bare: Vec<f64> = l.indices.iter().map(|&k| basis.states[k].energy).collect();
        bare.sort_by(f64::total_cmp);
        e.energies.iter().zip(&bare).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    };
    let d1 = bare_dev(1e-2);
    let d2 = bare_dev(5e-3);
    assert!(d1 > 0.0);
    assert!((d1 / d2 - 2.0).abs() < 0.05, "{d1:e} / {d2:e}");
}

#[test]
fn effective_dynamics_equal_lindblad_without_jumps() {
    let basis = enumerate_basis(4);
    let dip = build_dipole_table(&basis);
    let g = gm(&basis, &dip, &appendix_model());
    let level = project_effective(&g, &basis, 3).unwrap();
    let start = basis.find(3, 0, 1, 1).unwrap();
    let local = level.indices.iter().position(|&k| k == start).unwrap();
    let n = basis.len();
    let m = level.indices.len();

    let full = SparseGenerator::lindblad_without_refilling(&g);
    let eff = SparseGenerator::effective(&level.matrix);
    let mut rho_full = DMatrix::zeros(n, n);
    rho_full[(start, start)] = Complex64::new(1.0, 0.0);
    let mut rho_eff = DMatrix::zeros(m, m);
    rho_eff[(local, local)] = Complex64::new(1.0, 0.0);
    let times: Vec<f64> = (0..=40).map(|k| k as f64 * 2.0e6).collect();
    let pops_full: Vec<Observable> = level
        .indices
        .iter()
        .map(|&k| Observable::Population {
            name: basis.states[k].label(),
            indices: vec![k],
        })
        .collect();
    let pops_eff: Vec<Observable> = level
        .indices
        .iter()
        .enumerate()
        .map(|(i, &k)| Observable::Population {
            name: basis.states[k].label(),
            indices: vec![i],
        })
        .collect();
    let a = propagate(&PropagationJob {
        generator: &full,
        initial: rho_full,
        times: times.clone(),
        observables: pops_full,
        method: Method::Exponential,
        diagnostics: false,
    })
    .unwrap();
    let b = propagate(&PropagationJob {
        generator: &eff,
        initial: rho_eff,
        times,
        observables: pops_eff,
        method: Method::Exponential,
        diagnostics: false,
    })
    .unwrap();
    for (ra, rb) in a.values.iter().zip(&b.values) {
        for (x, y) in ra.iter().zip(rb) {
            assert!((x - y).abs() < 1e-12, "{x} vs {y}");
        }
    }
    // the initial state does decay and mix
    let last = a.values.last().unwrap();
    assert!(last[local] < 1.0 - 1e-3);
}

#[test]
fn constant_sweep_gives_flat_tracks() {
    let basis = enumerate_basis(4);
    let dip = build_dipole_table(&basis);
    let setup = SweepSetup {
        basis: &basis,
        dipoles: &dip,
        options: BrOptions::default(),
        n: 3,
        two_mj: 1,
        parity: Parity::Even,
        secularization: Secularization::PartialGeometricMean,
    };
    let models = vec![appendix_model(); 4];
    let table = sweep_and_track(&models, &[1.0, 2.0, 3.0, 4.0], &setup).unwrap();
    assert_eq!(table.labels.len(), 3);
    assert_eq!(table.full.len(), 4);
    for p in &table.full {
        assert_eq!(p.energies, table.full[0].energies);
        assert_eq!(p.rates, table.full[0].rates);
        let mean = p.participation.iter().sum::<f64>() / p.participation.len() as f64;
        assert!((p.mean_participation - mean).abs() < 1e-15);
        assert!(p.centered.iter().sum::<f64>().abs() < 1e-15);
    }
    assert!(table.ambiguities.is_empty());
    // the diagonal reference has pure basis states
    for p in &table.reference {
        assert!(p.participation.iter().all(|&x| (x - 1.0).abs() < 1e-12));
    }
}

#[test]
fn sweep_rejects_mismatched_input() {
    let basis = enumerate_basis(3);
    let dip = build_dipole_table(&basis);
    let setup = SweepSetup {
        basis: &basis,
        dipoles: &dip,
        options: BrOptions::default(),
        n: 3,
        two_mj: 1,
        parity: Parity::Even,
        secularization: Secularization::PartialGeometricMean,
    };
    assert!(sweep_and_track(&[appendix_model()], &[1.0, 2.0], &setup).is_err());
    assert!(sweep_and_track(&[], &[], &setup).is_err());
    let none = SweepSetup {
        secularization: Secularization::None,
        options: setup.options.clone(),
        ..setup
    };
    assert!(sweep_and_track(&[appendix_model()], &[1.0], &none).is_err());
    let bad = SweepSetup { two_mj: 9, ..setup };
    assert!(sweep_and_track(&[appendix_model()], &[1.0], &bad).is_err());
}
