use std::path::PathBuf;

use serde::Serialize;

use super::output::Writer;
use super::{Context, Format};
use crate::atom::{build_dipole_table, enumerate_basis_with, Spherical};
use crate::bath::{read_spectral_file, Axis, SpectralModel};
use crate::dynamics::{compare_runs, run_all, DeviationReport, RunSetup, TimeSeries};
use crate::effective::{sweep_and_track, SweepPoint, SweepSetup, SweepTable};
use crate::error::{Error, Result};
use crate::master_eq::BrOptions;
use crate::units::{au_to_fs, ev_to_hartree, fs_to_au, hartree_to_ev};
use crate::verify::{self, Criterion, VerifySettings};

fn writer(ctx: &Context) -> Writer {
    let formats = &ctx.config.output.formats;
    Writer {
        dir: ctx.out_dir.clone(),
        hash: ctx.hash.clone(),
        csv: formats.contains(&Format::Csv),
        json: formats.contains(&Format::Json),
    }
}

fn options(ctx: &Context) -> BrOptions {
    BrOptions {
        counter_rotating: ctx.config.flags.counter_rotating,
        intermediate_levels: ctx.config.flags.intermediate_levels.clone(),
    }
}

/// γ and λ tables (with J) on the configured frequency grid.
pub fn spectra(ctx: &Context) -> Result<Vec<PathBuf>> {
    let s = &ctx.config.spectra;
    if s.points == 0 {
        return Err(Error::Config("[spectra] empty frequency grid".into()));
    }
    let model = ctx.config.bath.model(&ctx.base_dir)?;
    let grid: Vec<f64> = if s.points == 1 {
        vec![s.omega_min_ev]
    } else {
        (0..s.points)
            .map(|k| s.omega_min_ev + (s.omega_max_ev - s.omega_min_ev) * k as f64 / (s.points - 1) as f64)
            .collect()
    };
    let mut rows = Vec::with_capacity(grid.len());
    for &w_ev in &grid {
        let w = ev_to_hartree(w_ev);
        rows.push(vec![
            w_ev,
            hartree_to_ev(model.density(Axis::Transverse, w)?),
            hartree_to_ev(model.density(Axis::Axial, w)?),
            hartree_to_ev(model.gamma(Spherical::Plus, w)?),
            hartree_to_ev(model.gamma(Spherical::Zero, w)?),
            hartree_to_ev(model.lambda_shift(Spherical::Plus, w)),
            hartree_to_ev(model.lambda_shift(Spherical::Zero, w)),
        ]);
    }
    let columns: Vec<String> = ["omega_eV", "J_xx", "J_zz", "gamma_xx", "gamma_zz", "lambda_xx", "lambda_zz"]
        .map(String::from)
        .to_vec();
    let w = writer(ctx);
    w.prepare()?;
    #[derive(Serialize)]
    struct Sidecar {
        model: String,
        columns: Vec<String>,
        units: &'static str,
    }
    let mut out: Vec<PathBuf> = w.csv("spectra.csv", &columns, &rows)?.into_iter().collect();
    out.extend(w.json(
        "spectra.json",
        &Sidecar {
            model: model.describe(),
            columns,
            units: "omega in eV; J, gamma, lambda in eV/(e a0)^2",
        },
    )?);
    Ok(out)
}

/// Tracked eigenstates of one (n, m_j, parity) block along the sweep, with
/// the fully secular reference.
pub fn sweep(ctx: &Context) -> Result<SweepTable> {
    let c = &ctx.config;
    if c.sweep.files.is_empty() {
        return Err(Error::Config("[sweep] needs at least one spectral file".into()));
    }
    let paths: Vec<PathBuf> = c.sweep.files.iter().map(|f| ctx.base_dir.join(f)).collect();
    if let Some(missing) = paths.iter().find(|p| !p.is_file()) {
        return Err(Error::Config(format!("[sweep] missing spectral file {}", missing.display())));
    }
    let params: Vec<f64> = if c.sweep.distances_nm.is_empty() {
        (0..paths.len()).map(|k| k as f64).collect()
    } else {
        c.sweep.distances_nm.clone()
    };
    let models = paths
        .iter()
        .map(|p| read_spectral_file(p).map(SpectralModel::Tabulated))
        .collect::<Result<Vec<_>>>()?;
    let basis = enumerate_basis_with(c.atom.n_max, c.atom.alpha);
    let dipoles = build_dipole_table(&basis);
    let table = sweep_and_track(
        &models,
        &params,
        &SweepSetup {
            basis: &basis,
            dipoles: &dipoles,
            options: options(ctx),
            n: c.atom.n,
            two_mj: c.two_mj(),
            parity: c.atom.parity,
            secularization: c.flags.secularization,
        },
    )?;
    write_sweep(ctx, &table, c.sweep.distances_nm.is_empty())?;
    Ok(table)
}

fn write_sweep(ctx: &Context, table: &SweepTable, indexed: bool) -> Result<()> {
    let w = writer(ctx);
    w.prepare()?;
    let param = if indexed { "point" } else { "d_nm" };
    let tracks: Vec<String> = (0..table.labels.len()).map(|k| format!("track{k}")).collect();
    let quantities: [(&str, fn(&SweepPoint) -> Vec<f64>); 4] = [
        ("energies", |p| p.energies.iter().map(|&e| hartree_to_ev(e)).collect()),
        ("centered", |p| p.centered.iter().map(|&e| hartree_to_ev(e)).collect()),
        ("rates", |p| p.rates.iter().map(|&e| hartree_to_ev(e)).collect()),
        ("participation", |p| {
            let mut v = p.participation.clone();
            v.push(p.mean_participation);
            v
        }),
    ];
    for (prefix, points) in [("", &table.full), ("reference_", &table.reference)] {
        for (name, f) in &quantities {
            let mut columns = vec![param.to_string()];
            columns.extend(tracks.iter().cloned());
            if *name == "participation" {
                columns.push("mean".into());
            }
            let rows: Vec<Vec<f64>> = points
                .iter()
                .map(|p| std::iter::once(p.param).chain(f(p)).collect())
                .collect();
            w.csv(&format!("{prefix}{name}.csv"), &columns, &rows)?;
        }
    }
    #[derive(Serialize)]
    struct Sidecar<'a> {
        n: u32,
        two_mj: i32,
        parity: String,
        parameter: &'a str,
        units: &'static str,
        /// Block basis state each track starts on (largest weight).
        tracks: Vec<(String, String)>,
        table: &'a SweepTable,
    }
    let start: Vec<(String, String)> = tracks.iter().cloned().zip(table.track_labels.iter().cloned()).collect();
    w.json(
        "sweep.json",
        &Sidecar {
            n: table.n,
            two_mj: table.two_mj,
            parity: table.parity.to_string(),
            parameter: param,
            units: "energies and rates in eV",
            tracks: start,
            table,
        },
    )?;
    Ok(())
}

#[derive(Serialize)]
pub struct PropagationReport {
    pub runs: Vec<String>,
    pub comparisons: Vec<DeviationReport>,
}

/// Runs with the descriptions their sidecar files record.
pub struct Simulation {
    pub series: Vec<TimeSeries>,
    pub report: PropagationReport,
    pub model: String,
    pub initial: String,
}

/// Every configured run on a shared grid, compared against the first,
/// without writing anything.
pub fn simulate(ctx: &Context) -> Result<Simulation> {
    let c = &ctx.config;
    let d = &c.dynamics;
    let requests = d.requests()?;
    if requests.is_empty() {
        return Err(Error::Config("[dynamics] runs is empty".into()));
    }
    let model = c.bath.model(&ctx.base_dir)?;
    let basis = enumerate_basis_with(c.atom.n_max, c.atom.alpha);
    let s = &d.initial;
    let (two_j, two_mj) = ((2.0 * s.j).round() as u32, (2.0 * s.m_j).round() as i32);
    let initial = basis
        .find(s.n, s.l, two_j, two_mj)
        .ok_or_else(|| Error::Config(format!("[dynamics] initial state n={} is outside n_max={}", s.n, c.atom.n_max)))?;
    let watched: Vec<usize> = basis
        .level_indices(s.n)
        .into_iter()
        .filter(|&k| basis.states[k].two_mj == two_mj)
        .collect();
    let steps = (d.window_fs / d.step_fs).round() as usize;
    let times: Vec<f64> = (0..=steps).map(|k| fs_to_au(k as f64 * d.step_fs)).collect();
    let dipoles = build_dipole_table(&basis);
    let setup = RunSetup {
        basis: &basis,
        dipoles: &dipoles,
        model: &model,
        intermediate_levels: c.flags.intermediate_levels.clone(),
        initial,
        watched,
        times,
        method: d.method(),
        diagnostics: false,
    };
    let series = run_all(&setup, &requests)?;
    let comparisons = series[1..]
        .iter()
        .map(|s| compare_runs(&series[0], s, &[], 0.02))
        .collect::<Result<Vec<_>>>()?;
    let report = PropagationReport {
        runs: series.iter().map(|s| s.generator.clone()).collect(),
        comparisons,
    };
    Ok(Simulation {
        series,
        report,
        model: model.describe(),
        initial: basis.states[initial].label(),
    })
}

/// [`simulate`], then one table per run and `comparison.json`.
pub fn propagate(ctx: &Context) -> Result<(Vec<TimeSeries>, PropagationReport)> {
    let Simulation {
        series,
        report,
        model,
        initial,
    } = simulate(ctx)?;
    let w = writer(ctx);
    w.prepare()?;
    for s in &series {
        let mut columns = vec!["t_fs".to_string()];
        columns.extend(s.names.iter().cloned());
        let rows: Vec<Vec<f64>> = s
            .times
            .iter()
            .zip(&s.values)
            .map(|(&t, v)| std::iter::once(au_to_fs(t)).chain(v.iter().copied()).collect())
            .collect();
        w.csv(&format!("{}.csv", s.generator), &columns, &rows)?;
        #[derive(Serialize)]
        struct Sidecar<'a> {
            generator: &'a str,
            observables: &'a [String],
            observable_kind: &'static str,
            model: String,
            initial: String,
        }
        w.json(
            &format!("{}.json", s.generator),
            &Sidecar {
                generator: &s.generator,
                observables: &s.names,
                observable_kind: "population of the labelled fine-structure state",
                model: model.clone(),
                initial: initial.clone(),
            },
        )?;
    }
    w.json("comparison.json", &report)?;
    Ok((series, report))
}

pub fn verify_settings(ctx: &Context) -> Result<VerifySettings> {
    let c = &ctx.config;
    let mut s = VerifySettings::with_work_dir(ctx.out_dir.join("verify-work"));
    s.model = c.bath.model(&ctx.base_dir)?;
    s.window_fs = c.dynamics.window_fs;
    s.step_fs = c.dynamics.step_fs;
    s.truncation = c.dynamics.truncation;
    s.method = c.dynamics.method();
    s.seed = ctx.seed.unwrap_or(c.verify.seed);
    s.property_models = c.verify.property_models;
    Ok(s)
}

pub fn verify(ctx: &Context) -> Result<Vec<Criterion>> {
    let settings = verify_settings(ctx)?;
    let results = verify::run_all(&settings);
    let w = writer(ctx);
    w.prepare()?;
    #[derive(Serialize)]
    struct Sidecar<'a> {
        passed: bool,
        criteria: &'a [Criterion],
    }
    w.json(
        "verify.json",
        &Sidecar {
            passed: results.iter().all(Criterion::passed),
            criteria: &results,
        },
    )?;
    Ok(results)
}
