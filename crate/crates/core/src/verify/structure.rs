use std::f64::consts::PI;

use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Bound, Check, Criterion};
use crate::atom::angular::c1_element;
use crate::atom::{build_dipole_table, enumerate_basis, enumerate_basis_with, radial_integral, Basis, DipoleTable, Parity};
use crate::bath::{NegativeFrequencyTail, SpectralModel, TabulatedDensity};
use crate::dynamics::{propagate, Method, PropagationJob, SparseGenerator};
use crate::effective::{block_decompose, eigenanalyze, find_block, participation_ratio, project_effective};
use crate::error::{Error, Result};
use crate::master_eq::{build_br_tensor, geometric_mean_lindblad, kossakowski_from_tensor, partial_secularize, BrOptions};
use crate::oracle::{adaptive_gauss_kronrod, radial_integral_quadrature};

pub fn dark_state(model: &SpectralModel) -> Criterion {
    const NAME: &str = "dark state";
    let measured = || -> Result<Vec<Check>> {
        let basis = enumerate_basis_with(7, 0.0);
        let dip = build_dipole_table(&basis);
        let opts = BrOptions {
            counter_rotating: true,
            intermediate_levels: Some(vec![6]),
        };
        let g = geometric_mean_lindblad(&partial_secularize(&build_br_tensor(&basis, &dip, model, &opts)?))?;
        let level = project_effective(&g, &basis, 7)?;
        let blocks = block_decompose(&level, &basis)?;
        let block = find_block(&blocks, 1, Parity::Even)
            .ok_or_else(|| Error::Consistency("no even m_j=1/2 block in level 7".into()))?;
        let e = eigenanalyze(block)?;
        let max = e.rates.iter().copied().fold(0.0, f64::max);
        let min = e.rates.iter().copied().fold(f64::INFINITY, f64::min);
        let dark = e.rates.iter().filter(|&&r| r <= 1e-10 * max).count();
        Ok(vec![
            Check::new("block dimension", block.dim() as f64, Bound::Equal { value: 7.0 }),
            Check::new("rates <= 1e-10 x max", if max > 0.0 { dark as f64 } else { 0.0 }, Bound::Equal { value: 1.0 }),
            Check::new("min/max rate", min / max, Bound::Below { limit: 1e-10 }),
        ])
    };
    finish(4, NAME, measured())
}

fn finish(id: u8, name: &str, checks: Result<Vec<Check>>) -> Criterion {
    match checks {
        Ok(checks) => Criterion {
            checks,
            ..Criterion::new(id, name)
        },
        Err(e) => Criterion::failed(id, name, e),
    }
}

pub fn flat_bath() -> Criterion {
    let measured = || -> Result<Vec<Check>> {
        let basis = enumerate_basis(3);
        let dip = build_dipole_table(&basis);
        let model = SpectralModel::flat(3e-5, 7e-5, NegativeFrequencyTail::Allow)?;
        let t = partial_secularize(&build_br_tensor(&basis, &dip, &model, &BrOptions::default())?);
        let gm = SparseGenerator::lindblad(&geometric_mean_lindblad(&t)?).superoperator();
        let br = SparseGenerator::bloch_redfield(&t).superoperator();
        let diff = (gm - br).iter().map(|z| z.norm()).fold(0.0, f64::max);
        Ok(vec![Check::new("max entry difference", diff, Bound::Below { limit: 1e-12 })])
    };
    finish(6, "flat-bath exactness", measured())
}

/// A random diagonal, cylindrically symmetric tabulated J: a few
/// Drude-Lorentz peaks per axis on a positive grid, one axis possibly empty.
pub fn random_cylindrical_model<R: Rng>(rng: &mut R) -> SpectralModel {
    const POINTS: usize = 400;
    let omega: Vec<f64> = (0..POINTS)
        .map(|k| 1e-3 * (2.0f64 / 1e-3).powf(k as f64 / (POINTS - 1) as f64))
        .collect();
    let column = |rng: &mut R| -> Vec<f64> {
        let peaks: Vec<(f64, f64, f64)> = (0..rng.gen_range(1..=3))
            .map(|_| {
                let center = 10f64.powf(rng.gen_range(-2.0..0.0));
                let width = center * rng.gen_range(0.05..0.5);
                let height = 10f64.powf(rng.gen_range(-6.0..-3.0));
                (center, width, height)
            })
            .collect();
        omega
            .iter()
            .map(|&w| {
                peaks
                    .iter()
                    .map(|&(c, g, a)| a * c * g * w * g / ((c * c - w * w).powi(2) + (w * g).powi(2)))
                    .sum()
            })
            .collect()
    };
    let mut xx = column(rng);
    let mut zz = column(rng);
    match rng.gen_range(0..5) {
        0 => xx.iter_mut().for_each(|v| *v = 0.0),
        1 => zz.iter_mut().for_each(|v| *v = 0.0),
        _ => {}
    }
    SpectralModel::Tabulated(TabulatedDensity::new(omega, xx, zz).expect("valid synthetic table"))
}

#[derive(Default)]
struct Worst {
    hermiticity: f64,
    kossakowski: f64,
    trace: f64,
    participation: f64,
    superposition: f64,
}

fn one_model(basis: &Basis, dip: &DipoleTable, model: &SpectralModel, cr: bool, rng: &mut ChaCha8Rng, w: &mut Worst) -> Result<()> {
    let opts = BrOptions {
        counter_rotating: cr,
        intermediate_levels: None,
    };
    let t = partial_secularize(&build_br_tensor(basis, dip, model, &opts)?);
    let g = geometric_mean_lindblad(&t)?;

    let h = &g.h_cp;
    let scale = h.amax();
    if scale > 0.0 {
        w.hermiticity = w.hermiticity.max((h - h.transpose()).amax() / scale);
    }

    let (_, k) = kossakowski_from_tensor(&t, true);
    if k.nrows() > 0 {
        let sym = 0.5 * (&k + k.transpose());
        let ev = SymmetricEigen::new(sym).eigenvalues;
        let norm = ev.amax();
        if norm > 0.0 {
            w.kossakowski = w.kossakowski.min(ev.min() / norm);
        }
    }

    let n = basis.len();
    let psi = DVector::from_fn(n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let psi = &psi / Complex64::new(psi.norm(), 0.0);
    let rho = &psi * psi.adjoint();
    let s = propagate(&PropagationJob {
        generator: &SparseGenerator::lindblad(&g),
        initial: rho,
        times: (0..=4).map(|k| k as f64 * 2.5e4).collect(),
        observables: vec![],
        method: Method::Exponential,
        diagnostics: true,
    })?;
    w.trace = w.trace.max(s.max_trace_drift());

    for level in [2, 3] {
        let blocks = block_decompose(&project_effective(&g, basis, level)?, basis)?;
        for b in &blocks {
            let e = eigenanalyze(b)?;
            for j in 0..b.dim() {
                let p = participation_ratio(&e.vectors.column(j).into_owned())?;
                let excess = (1.0 - p).max(p - b.dim() as f64).max(0.0);
                w.participation = w.participation.max(excess);
            }
        }
    }

    let dim = rng.gen_range(1..=7usize);
    let v = DVector::from_fn(dim, |_, _| Complex64::from_polar(1.0 / (dim as f64).sqrt(), rng.gen_range(0.0..2.0 * PI)));
    let p = participation_ratio(&v)?;
    w.superposition = w.superposition.max((p - dim as f64).abs() / dim as f64);
    Ok(())
}

pub fn properties(seed: u64, count: usize) -> Criterion {
    const NAME: &str = "structural invariants";
    let basis = enumerate_basis(3);
    let dip = build_dipole_table(&basis);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = Worst::default();
    let mut redrawn = 0usize;
    let mut accepted = 0usize;
    while accepted < count {
        let model = random_cylindrical_model(&mut rng);
        let cr = rng.gen_bool(0.5);
        match one_model(&basis, &dip, &model, cr, &mut rng, &mut w) {
            Ok(()) => accepted += 1,
            Err(Error::SignCondition { .. }) if redrawn < 10 * count => redrawn += 1,
            Err(e) => return Criterion::failed(7, NAME, e),
        }
    }
    let mut c = finish(
        7,
        NAME,
        Ok(vec![
            Check::new("H_CP asymmetry / norm", w.hermiticity, Bound::Below { limit: 1e-12 }),
            Check::new("min Kossakowski eigenvalue / norm", w.kossakowski, Bound::Above { limit: -1e-10 }),
            Check::new("trace drift", w.trace, Bound::Below { limit: 1e-10 }),
            Check::new("participation outside [1, dim]", w.participation, Bound::Below { limit: 1e-12 }),
            Check::new("equal-superposition |P - n| / n", w.superposition, Bound::Below { limit: 1e-12 }),
        ]),
    );
    c.note = Some(format!(
        "{count} models from seed {seed}; {redrawn} redrawn after a shift-sign violation"
    ));
    c
}

pub fn dipoles() -> Criterion {
    let mut worst: f64 = 0.0;
    for n in 1..=8u32 {
        for l in 0..n {
            for np in 1..=8u32 {
                for lp in [l.wrapping_sub(1), l + 1] {
                    if lp >= np {
                        continue;
                    }
                    let closed = match radial_integral(n, l, np, lp) {
                        Ok(v) => v,
                        Err(e) => return Criterion::failed(8, "dipole oracle", e),
                    };
                    let quad = radial_integral_quadrature(n, l, np, lp);
                    worst = worst.max((closed - quad).abs() / quad.abs());
                }
            }
        }
    }
    // <1s|z|2p0>: closed-form radial part times the angular factor, against
    // quadrature in r and in theta
    let element = match radial_integral(1, 0, 2, 1) {
        Ok(r) => (r * c1_element(0, 0, 0, 1, 0)).abs(),
        Err(e) => return Criterion::failed(8, "dipole oracle", e),
    };
    let angular = adaptive_gauss_kronrod(
        |th: f64| 2.0 * PI * (0.25 / PI).sqrt() * (0.75 / PI).sqrt() * th.cos() * th.cos() * th.sin(),
        0.0,
        PI,
        1e-15,
    );
    let brute = (radial_integral_quadrature(1, 0, 2, 1) * angular).abs();
    let exact = 128.0 * 2f64.sqrt() / 243.0;
    let mut c = Criterion::new(8, "dipole oracle");
    c.checks = vec![
        Check::new("radial closed form vs quadrature, n <= 8", worst, Bound::Below { limit: 1e-8 }),
        Check::new("<1s|z|2p0> vs quadrature", (element - brute).abs(), Bound::Below { limit: 1e-6 }),
        Check::new("<1s|z|2p0> vs 128 sqrt2/243", (element - exact).abs(), Bound::Below { limit: 1e-6 }),
    ];
    c.note = Some(format!("<1s|z|2p0> = {element:.9} a0"));
    c
}
