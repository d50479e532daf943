use nalgebra::DMatrix;
use num_complex::Complex64;

use vacmix::atom::{build_dipole_table, enumerate_basis, Basis, DipoleTable};
use vacmix::bath::{Lorentzian, NegativeFrequencyTail, SpectralModel};
use vacmix::dynamics::{
    build_oracle, compare_runs, propagate, run, Method, Observable, OracleModel, PropagationJob, RunRequest, RunSetup,
    SparseGenerator, Variant,
};
use vacmix::effective::project_effective;
use vacmix::master_eq::{build_br_tensor, geometric_mean_lindblad, partial_secularize, BrOptions};
use vacmix::units::{ev_to_hartree, HARTREE_EV};

fn mode() -> Lorentzian {
    Lorentzian {
        g: ev_to_hartree(9e-4 / 5f64.sqrt()),
        kappa: ev_to_hartree(2e-3),
        center: ev_to_hartree(1.95),
    }
}

fn setup() -> (Basis, DipoleTable, SpectralModel) {
    let basis = enumerate_basis(4);
    let dip = build_dipole_table(&basis);
    let model = SpectralModel::lorentzian_axial(mode(), NegativeFrequencyTail::Allow).unwrap();
    (basis, dip, model)
}

/// Uniform grid in units of ħ/eV.
fn grid(end_ev: f64, steps: usize) -> Vec<f64> {
    (0..=steps).map(|k| k as f64 * end_ev / steps as f64 * HARTREE_EV).collect()
}

fn watched(basis: &Basis) -> Vec<usize> {
    basis
        .level_indices(3)
        .into_iter()
        .filter(|&k| basis.states[k].two_mj == 1)
        .collect()
}

fn pure(n: usize, k: usize) -> DMatrix<Complex64> {
    let mut rho = DMatrix::zeros(n, n);
    rho[(k, k)] = Complex64::new(1.0, 0.0);
    rho
}

#[test]
fn uncoupled_oracle_keeps_populations() {
    let (basis, dip, _) = setup();
    let model = OracleModel {
        modes: vec![],
        truncation: 1,
    };
    let oracle = build_oracle(&basis, &dip, &model, true).unwrap();
    assert_eq!(oracle.dim(), basis.len());
    let start = basis.find(3, 0, 1, 1).unwrap();
    let other = basis.find(3, 2, 5, 1).unwrap();
    let mut rho = DMatrix::zeros(60, 60);
    rho[(start, start)] = Complex64::new(0.25, 0.0);
    rho[(other, other)] = Complex64::new(0.75, 0.0);
    rho[(start, other)] = Complex64::new(0.2, 0.1);
    rho[(other, start)] = Complex64::new(0.2, -0.1);
    let s = propagate(&PropagationJob {
        generator: &oracle.generator,
        initial: rho,
        times: grid(1e4, 50),
        observables: vec![
            Observable::Population {
                name: "s".into(),
                indices: vec![start],
            },
            Observable::Population {
                name: "d".into(),
                indices: vec![other],
            },
        ],
        method: Method::Exponential,
        diagnostics: true,
    })
    .unwrap();
    for row in &s.values {
        assert!((row[0] - 0.25).abs() < 1e-13);
        assert!((row[1] - 0.75).abs() < 1e-13);
    }
}

#[test]
fn oracle_with_coupling_off_is_bare_atom() {
    let (basis, dip, _) = setup();
    let mut m = mode();
    m.g = 0.0;
    let model = OracleModel {
        modes: vec![vacmix::dynamics::OracleMode {
            lorentzian: m,
            polarizations: vec![vacmix::dynamics::Polarization::Z],
        }],
        truncation: 1,
    };
    let oracle = build_oracle(&basis, &dip, &model, true).unwrap();
    let start = basis.find(3, 0, 1, 1).unwrap();
    let s = propagate(&PropagationJob {
        generator: &oracle.generator,
        initial: oracle.with_vacuum(&pure(60, start)).unwrap(),
        times: grid(1e5, 20),
        observables: vec![Observable::Population {
            name: "s".into(),
            indices: oracle.atom_indices(start),
        }],
        method: Method::Exponential,
        diagnostics: false,
    })
    .unwrap();
    assert!(s.values.iter().all(|r| (r[0] - 1.0).abs() < 1e-13));
}

#[test]
fn lindblad_preserves_trace_and_positivity() {
    let (basis, dip, model) = setup();
    let t = build_br_tensor(&basis, &dip, &model, &BrOptions::default()).unwrap();
    let g = geometric_mean_lindblad(&partial_secularize(&t)).unwrap();
    let gen = SparseGenerator::lindblad(&g);
    let start = basis.find(3, 0, 1, 1).unwrap();
    for method in [Method::Exponential, Method::RungeKutta { rtol: 1e-9, atol: 1e-12 }] {
        let s = propagate(&PropagationJob {
            generator: &gen,
            initial: pure(60, start),
            times: if matches!(method, Method::Exponential) { grid(5e4, 25) } else { grid(300.0, 5) },
            observables: vec![],
            method,
            diagnostics: true,
        })
        .unwrap();
        assert!(s.max_trace_drift() < 1e-10, "{method:?}: {:e}", s.max_trace_drift());
        // the explicit integrator's local error (~rtol) shows up as slightly
        // negative eigenvalues of nearly empty states
        let floor = if matches!(method, Method::Exponential) { -1e-12 } else { -1e-8 };
        assert!(s.min_eigenvalue() > floor, "{method:?}: {:e}", s.min_eigenvalue());
    }
}

#[test]
fn oracle_stays_positive() {
    let (basis, dip, _) = setup();
    let model = OracleModel {
        modes: vec![vacmix::dynamics::OracleMode {
            lorentzian: mode(),
            polarizations: vec![vacmix::dynamics::Polarization::Z],
        }],
        truncation: 1,
    };
    let oracle = build_oracle(&basis, &dip, &model, true).unwrap();
    let start = basis.find(3, 0, 1, 1).unwrap();
    let s = propagate(&PropagationJob {
        generator: &oracle.generator,
        initial: oracle.with_vacuum(&pure(60, start)).unwrap(),
        times: grid(2e5, 40),
        observables: vec![],
        method: Method::Exponential,
        diagnostics: true,
    })
    .unwrap();
    // rounding accumulates over the 120-state atom-mode space
    assert!(s.max_trace_drift() < 1e-8, "{:e}", s.max_trace_drift());
    assert!(s.min_eigenvalue() >= -1e-8, "{:e}", s.min_eigenvalue());
}

#[test]
fn effective_norm_never_grows() {
    let (basis, dip, model) = setup();
    let t = build_br_tensor(&basis, &dip, &model, &BrOptions::default()).unwrap();
    let g = geometric_mean_lindblad(&partial_secularize(&t)).unwrap();
    let level = project_effective(&g, &basis, 3).unwrap();
    let gen = SparseGenerator::effective(&level.matrix);
    let start = level.indices.iter().position(|&k| k == basis.find(3, 0, 1, 1).unwrap()).unwrap();
    let s = propagate(&PropagationJob {
        generator: &gen,
        initial: pure(18, start),
        times: grid(6e5, 300),
        observables: vec![],
        method: Method::Exponential,
        diagnostics: true,
    })
    .unwrap();
    assert!(s.trace.windows(2).all(|w| w[1] <= w[0] + 1e-15));
    assert!(*s.trace.last().unwrap() < 1.0);
}

fn integrator_check(variant: Variant, end_ev: f64) {
    let (basis, dip, model) = setup();
    let base = RunSetup {
        basis: &basis,
        dipoles: &dip,
        model: &model,
        intermediate_levels: None,
        initial: basis.find(3, 0, 1, 1).unwrap(),
        watched: watched(&basis),
        times: grid(end_ev, 40),
        method: Method::Exponential,
        diagnostics: false,
    };
    let req = RunRequest {
        variant,
        counter_rotating: true,
    };
    let expo = run(&base, req).unwrap();
    let rk = |rtol: f64| {
        run(
            &RunSetup {
                method: Method::RungeKutta { rtol, atol: rtol * 1e-3 },
                times: base.times.clone(),
                watched: base.watched.clone(),
                intermediate_levels: None,
                ..base
            },
            req,
        )
        .unwrap()
    };
    let coarse = rk(1e-9);
    let fine = rk(5e-10);
    let d = compare_runs(&expo, &coarse, &[], 1e-6).unwrap();
    assert!(d.within_tolerance, "exponential vs Runge-Kutta: {:e}", d.max_abs);
    let d = compare_runs(&coarse, &fine, &[], 1e-6).unwrap();
    assert!(d.within_tolerance, "halved tolerance: {:e}", d.max_abs);
}

#[test]
fn integrators_agree_on_effective_dynamics() {
    integrator_check(Variant::Effective, 2e5);
}

// jumps into several lower levels create coherences oscillating at Bohr
// frequencies, so the explicit integrator only runs a short window here
#[test]
fn integrators_agree_on_lindblad_dynamics() {
    integrator_check(Variant::Lindblad, 300.0);
}

#[test]
fn run_compared_with_itself_has_no_deviation() {
    let (basis, dip, model) = setup();
    let s = RunSetup {
        basis: &basis,
        dipoles: &dip,
        model: &model,
        intermediate_levels: None,
        initial: basis.find(3, 0, 1, 1).unwrap(),
        watched: watched(&basis),
        times: grid(1e4, 10),
        method: Method::Exponential,
        diagnostics: false,
    };
    let a = run(
        &s,
        RunRequest {
            variant: Variant::Effective,
            counter_rotating: true,
        },
    )
    .unwrap();
    let d = compare_runs(&a, &a, &[], 1e-12).unwrap();
    assert_eq!(d.max_abs, 0.0);
    assert!(d.within_tolerance);
    let mut b = a.clone();
    b.times.pop();
    b.values.pop();
    assert!(compare_runs(&a, &b, &[], 1.0).is_err());
}

#[test]
fn invalid_jobs_are_rejected() {
    let (basis, dip, model) = setup();
    let t = build_br_tensor(&basis, &dip, &model, &BrOptions::default()).unwrap();
    let g = geometric_mean_lindblad(&partial_secularize(&t)).unwrap();
    let gen = SparseGenerator::lindblad(&g);
    let job = |initial: DMatrix<Complex64>, times: Vec<f64>| {
        propagate(&PropagationJob {
            generator: &gen,
            initial,
            times,
            observables: vec![],
            method: Method::Exponential,
            diagnostics: false,
        })
    };
    assert!(job(pure(60, 0) * Complex64::new(2.0, 0.0), vec![0.0, 1.0]).is_err());
    assert!(job(pure(60, 0), vec![1.0, 2.0]).is_err());
    assert!(job(pure(60, 0), vec![0.0, 2.0, 1.0]).is_err());
    assert!(job(pure(59, 0), vec![0.0]).is_err());
    let mut neg = pure(60, 0) * Complex64::new(1.5, 0.0);
    neg[(1, 1)] = Complex64::new(-0.5, 0.0);
    assert!(job(neg, vec![0.0]).is_err());
    // a zero-length window returns the initial populations
    let s = job(pure(60, 3), vec![0.0]).unwrap();
    assert_eq!(s.values.len(), 1);
}
