use super::{Bound, Check, Criterion, VerifySettings};
use crate::atom::{build_dipole_table, enumerate_basis, Parity};
use crate::bath::Lorentzian;
use crate::dynamics::{compare_runs, run_all, RunRequest, RunSetup, TimeSeries, Variant};
use crate::error::{Error, Result};
use crate::units::{ev_to_hartree, fs_to_au};

const NAMES: [(u8, &str); 4] = [
    (1, "oracle agreement"),
    (2, "refilling magnitude"),
    (3, "Bloch-Redfield vs Lindblad"),
    (5, "counter-rotating relevance"),
];

/// The z-coupled lossy mode of the reference comparison.
pub fn appendix_mode() -> Lorentzian {
    Lorentzian {
        g: ev_to_hartree(9e-4 / 5f64.sqrt()),
        kappa: ev_to_hartree(2e-3),
        center: ev_to_hartree(1.95),
    }
}

pub fn criteria(s: &VerifySettings) -> Vec<Criterion> {
    match measure(s) {
        Ok(c) => c,
        Err(e) => NAMES.iter().map(|&(id, name)| Criterion::failed(id, name, &e)).collect(),
    }
}

fn grid(s: &VerifySettings) -> Result<Vec<f64>> {
    if !(s.step_fs > 0.0) || !(s.window_fs >= 0.0) {
        return Err(Error::Config("time window and step must be positive".into()));
    }
    let steps = (s.window_fs / s.step_fs).round() as usize;
    Ok((0..=steps).map(|k| fs_to_au(k as f64 * s.step_fs)).collect())
}

fn peak(series: &TimeSeries, name: &str) -> f64 {
    series
        .column(name)
        .map_or(f64::NAN, |c| c.into_iter().fold(0.0, f64::max))
}

fn measure(s: &VerifySettings) -> Result<Vec<Criterion>> {
    let basis = enumerate_basis(4);
    let dipoles = build_dipole_table(&basis);
    let initial = basis
        .find(3, 0, 1, 1)
        .ok_or_else(|| Error::Consistency("3s1/2 missing from the basis".into()))?;
    let watched: Vec<usize> = basis
        .level_indices(3)
        .into_iter()
        .filter(|&k| basis.states[k].two_mj == 1)
        .collect();
    let setup = RunSetup {
        basis: &basis,
        dipoles: &dipoles,
        model: &s.model,
        intermediate_levels: None,
        initial,
        watched: watched.clone(),
        times: grid(s)?,
        method: s.method,
        diagnostics: false,
    };
    let req = |variant, counter_rotating| RunRequest {
        variant,
        counter_rotating,
    };
    let runs = run_all(
        &setup,
        &[
            req(Variant::Oracle { truncation: s.truncation }, true),
            req(Variant::Oracle { truncation: s.truncation + 1 }, true),
            req(Variant::Lindblad, true),
            req(Variant::Effective, true),
            req(Variant::BlochRedfield, true),
            req(Variant::Effective, false),
        ],
    )?;
    let [oracle, oracle_up, lindblad, effective, br, effective_rwa] = &runs[..] else {
        unreachable!("six runs requested");
    };

    let mut by_peak: Vec<String> = oracle.names.clone();
    by_peak.sort_by(|a, b| peak(oracle, b).total_cmp(&peak(oracle, a)));
    let largest: Vec<String> = by_peak.into_iter().take(3).collect();
    let mut c1 = Criterion::new(1, NAMES[0].1);
    c1.checks = vec![
        Check::new(
            "lindblad vs oracle",
            compare_runs(lindblad, oracle, &largest, 0.02)?.max_abs,
            Bound::Below { limit: 0.02 },
        ),
        Check::new(
            "effective vs oracle",
            compare_runs(effective, oracle, &largest, 0.02)?.max_abs,
            Bound::Below { limit: 0.02 },
        ),
        Check::new(
            format!("oracle photon cap {} vs {}", s.truncation, s.truncation + 1),
            compare_runs(oracle, oracle_up, &[], 1e-4)?.max_abs,
            Bound::Below { limit: 1e-4 },
        ),
    ];
    c1.note = Some(format!("compared populations: {}", largest.join(", ")));

    let odd: Vec<String> = watched
        .iter()
        .filter(|&&k| basis.states[k].parity() == Parity::Odd)
        .map(|&k| basis.states[k].label())
        .collect();
    let mut c2 = Criterion::new(2, NAMES[1].1);
    for name in &odd {
        c2.checks.push(Check::new(
            format!("lindblad peak {name}"),
            peak(lindblad, name),
            Bound::Within { lo: 2e-4, hi: 5e-3 },
        ));
    }
    let effective_odd = odd.iter().map(|n| peak(effective, n)).fold(0.0, f64::max);
    c2.checks
        .push(Check::new("effective odd-parity peak", effective_odd, Bound::Equal { value: 0.0 }));

    let mut c3 = Criterion::new(3, NAMES[2].1);
    c3.checks.push(Check::new(
        "max population deviation",
        compare_runs(br, lindblad, &[], 0.01)?.max_abs,
        Bound::Below { limit: 0.01 },
    ));

    let mut c5 = Criterion::new(5, NAMES[3].1);
    c5.checks.push(Check::new(
        "effective with vs without counter-rotating shifts",
        compare_runs(effective, effective_rwa, &[], 0.05)?.max_abs,
        Bound::Above { limit: 0.05 },
    ));
    Ok(vec![c1, c2, c3, c5])
}
