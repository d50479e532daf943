use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use vacmix::atom::{build_dipole_table, enumerate_basis, Basis, DipoleTable, Parity};
use vacmix::bath::{Lorentzian, NegativeFrequencyTail, SpectralModel};
use vacmix::cli::{BathSection, MethodName, RunConfig};
use vacmix::effective::{block_decompose, eigenanalyze, participation_ratio, project_effective};
use vacmix::master_eq::{
    build_br_tensor, geometric_mean_lindblad, kossakowski_from_tensor, lindblad_rhs, partial_secularize, BrOptions,
    GeneratorSet,
};
use vacmix::units::ev_to_hartree;
use vacmix::verify::random_cylindrical_model;
use vacmix::Error;

fn atom() -> &'static (Basis, DipoleTable) {
    static ATOM: OnceLock<(Basis, DipoleTable)> = OnceLock::new();
    ATOM.get_or_init(|| {
        let basis = enumerate_basis(3);
        let dip = build_dipole_table(&basis);
        (basis, dip)
    })
}

fn model_strategy() -> impl Strategy<Value = SpectralModel> {
    let lorentzian = (1e-5..1e-3f64, 1e-3..5e-2f64, 0.5..15.0f64).prop_map(|(g, k, c)| Lorentzian {
        g: ev_to_hartree(g),
        kappa: ev_to_hartree(k),
        center: ev_to_hartree(c),
    });
    prop_oneof![
        (lorentzian.clone(), any::<bool>()).prop_map(|(l, axial)| if axial {
            SpectralModel::lorentzian_axial(l, NegativeFrequencyTail::Allow).unwrap()
        } else {
            SpectralModel::lorentzian_isotropic(l, NegativeFrequencyTail::Allow).unwrap()
        }),
        (0.0..1e-4f64, 0.0..1e-4f64)
            .prop_map(|(x, z)| SpectralModel::flat(x, z, NegativeFrequencyTail::Allow).unwrap()),
        any::<u64>().prop_map(|seed| random_cylindrical_model(&mut ChaCha8Rng::seed_from_u64(seed))),
    ]
}

/// The geometric-mean generator with its tensor, or `None` when the model
/// violates the shift-sign condition.
fn generator(model: &SpectralModel, cr: bool) -> Option<(vacmix::master_eq::BrTensor, GeneratorSet)> {
    let (basis, dip) = atom();
    let opts = BrOptions {
        counter_rotating: cr,
        intermediate_levels: None,
    };
    let t = partial_secularize(&build_br_tensor(basis, dip, model, &opts).unwrap());
    match geometric_mean_lindblad(&t) {
        Ok(g) => Some((t, g)),
        Err(Error::SignCondition { .. }) => None,
        Err(e) => panic!("{e}"),
    }
}

fn random_state(coeffs: &[(f64, f64)]) -> DMatrix<Complex64> {
    let psi = DVector::from_iterator(coeffs.len(), coeffs.iter().map(|&(a, b)| Complex64::new(a, b)));
    let psi = &psi / Complex64::new(psi.norm(), 0.0);
    &psi * psi.adjoint()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn casimir_polder_hamiltonian_is_symmetric(model in model_strategy(), cr in any::<bool>()) {
        let Some((_, g)) = generator(&model, cr) else { return Ok(()) };
        let scale = g.h_cp.amax();
        prop_assume!(scale > 0.0);
        prop_assert!((&g.h_cp - g.h_cp.transpose()).amax() <= 1e-12 * scale);
    }

    #[test]
    fn rhs_is_traceless(
        model in model_strategy(),
        coeffs in proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 28),
    ) {
        prop_assume!(coeffs.iter().any(|&(a, b)| a.abs() + b.abs() > 1e-3));
        let Some((_, g)) = generator(&model, true) else { return Ok(()) };
        let rho = random_state(&coeffs);
        let d = lindblad_rhs(&g, &rho).unwrap();
        let scale = d.iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(d.trace().norm() <= 1e-12 * scale.max(f64::MIN_POSITIVE));
        prop_assert!((&d - d.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max) <= 1e-12 * scale.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn kossakowski_matrix_is_positive(model in model_strategy(), cr in any::<bool>()) {
        let Some((t, _)) = generator(&model, cr) else { return Ok(()) };
        let (_, k) = kossakowski_from_tensor(&t, true);
        prop_assume!(k.nrows() > 0);
        let ev = SymmetricEigen::new(0.5 * (&k + k.transpose())).eigenvalues;
        let norm = ev.amax();
        prop_assume!(norm > 0.0);
        prop_assert!(ev.min() >= -1e-10 * norm, "{} / {norm}", ev.min());
    }

    #[test]
    fn participation_stays_within_block(model in model_strategy()) {
        let Some((_, g)) = generator(&model, true) else { return Ok(()) };
        let (basis, _) = atom();
        for level in [2, 3] {
            for b in block_decompose(&project_effective(&g, basis, level).unwrap(), basis).unwrap() {
                let e = eigenanalyze(&b).unwrap();
                for j in 0..b.dim() {
                    let p = participation_ratio(&e.vectors.column(j).into_owned()).unwrap();
                    prop_assert!(p >= 1.0 - 1e-12 && p <= b.dim() as f64 + 1e-12, "{p} in dim {}", b.dim());
                }
            }
        }
    }

    #[test]
    fn participation_of_any_vector_is_bounded(coeffs in proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..12)) {
        prop_assume!(coeffs.iter().any(|&(a, b)| a.abs() + b.abs() > 1e-3));
        let v = DVector::from_iterator(coeffs.len(), coeffs.iter().map(|&(a, b)| Complex64::new(a, b)));
        let p = participation_ratio(&v.normalize()).unwrap();
        prop_assert!(p >= 1.0 - 1e-12 && p <= coeffs.len() as f64 + 1e-12);
    }

    #[test]
    fn equal_superposition_participates_fully(phases in proptest::collection::vec(0.0..2.0 * PI, 1..16)) {
        let n = phases.len();
        let v = DVector::from_iterator(n, phases.iter().map(|&ph| Complex64::from_polar(1.0 / (n as f64).sqrt(), ph)));
        let p = participation_ratio(&v).unwrap();
        prop_assert!((p - n as f64).abs() <= 1e-12 * n as f64, "{p} vs {n}");
    }

    #[test]
    fn configuration_survives_a_round_trip(
        n_max in 2..10u32,
        m_j in prop_oneof![Just(0.5), Just(-1.5), Just(2.5)],
        odd in any::<bool>(),
        g in 1e-6..1e-2f64,
        center in 0.1..5.0f64,
        cr in any::<bool>(),
        window in 0.0..1e6f64,
        rk in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let mut c = RunConfig::default();
        c.atom.n_max = n_max;
        c.atom.n = n_max;
        c.atom.m_j = m_j;
        c.atom.parity = if odd { Parity::Odd } else { Parity::Even };
        c.bath = BathSection::LorentzianIsotropic {
            g_ev_per_ea0: g,
            kappa_ev: 1e-3,
            center_ev: center,
            negative_frequency_tail: true,
        };
        c.flags.counter_rotating = cr;
        c.dynamics.window_fs = window;
        c.dynamics.method = if rk { MethodName::RungeKutta } else { MethodName::Exponential };
        c.verify.seed = seed;
        let back = RunConfig::parse(&c.to_toml()).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.hash(), c.hash());
    }
}
