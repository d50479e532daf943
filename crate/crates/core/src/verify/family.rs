use std::path::Path;

use super::{Bound, Check, Criterion};
use crate::bath::{write_spectral_file, TabulatedDensity};
use crate::cli::{commands, Context, RunConfig};
use crate::effective::{SweepPoint, SweepTable};
use crate::error::Result;
use crate::units::ev_to_hartree;

/// First distance, last distance and number of log-spaced points.
pub const FAMILY_DISTANCES_NM: (f64, f64, usize) = (20.0, 120.0, 60);

const AMPLITUDE: f64 = 1e-16;
const TRANSVERSE_RATIO: f64 = 0.05;
/// Two states count as mixed above this participation ratio.
const MIXED: f64 = 1.5;

/// A Drude-Lorentz resonance at 0.1 eV whose strength falls as d⁻³, with a
/// weak transverse copy.
pub fn synthetic_density(d_nm: f64) -> TabulatedDensity {
    const POINTS: usize = 3000;
    let w0 = ev_to_hartree(0.1);
    let width = ev_to_hartree(0.005);
    let omega: Vec<f64> = (0..POINTS)
        .map(|k| 1e-4 * (0.8f64 / 1e-4).powf(k as f64 / (POINTS - 1) as f64))
        .collect();
    let s = AMPLITUDE * (50.0 / d_nm).powi(3);
    let zz: Vec<f64> = omega
        .iter()
        .map(|&w| s * w * width / ((w0 * w0 - w * w).powi(2) + (w * width).powi(2)))
        .collect();
    let xx = zz.iter().map(|v| v * TRANSVERSE_RATIO).collect();
    TabulatedDensity::new(omega, xx, zz).expect("valid synthetic table")
}

pub fn family_distances() -> Vec<f64> {
    let (lo, hi, n) = FAMILY_DISTANCES_NM;
    (0..n).map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64)).collect()
}

/// Interior minimum of the gap between energy-adjacent eigenstates.
#[derive(Clone, Debug, PartialEq)]
pub struct AvoidedCrossing {
    pub point: usize,
    /// Position of the lower state in energy order.
    pub lower: usize,
    pub gap: f64,
    pub participation: (f64, f64),
}

/// Interior local minima of adjacent energy gaps that dip below half of
/// the largest gap on either side.
pub fn avoided_crossings(points: &[SweepPoint]) -> Vec<AvoidedCrossing> {
    let sorted: Vec<Vec<(f64, f64)>> = points
        .iter()
        .map(|p| {
            let mut v: Vec<(f64, f64)> = p.centered.iter().copied().zip(p.participation.iter().copied()).collect();
            v.sort_by(|a, b| a.0.total_cmp(&b.0));
            v
        })
        .collect();
    let dim = sorted.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    for k in 0..dim.saturating_sub(1) {
        let gap: Vec<f64> = sorted.iter().map(|s| s[k + 1].0 - s[k].0).collect();
        for p in 1..gap.len().saturating_sub(1) {
            if !(gap[p] < gap[p - 1] && gap[p] < gap[p + 1]) {
                continue;
            }
            let left = gap[..p].iter().copied().fold(0.0, f64::max);
            let right = gap[p + 1..].iter().copied().fold(0.0, f64::max);
            if gap[p] <= 0.5 * left.min(right) {
                out.push(AvoidedCrossing {
                    point: p,
                    lower: k,
                    gap: gap[p],
                    participation: (sorted[p][k].1, sorted[p][k + 1].1),
                });
            }
        }
    }
    out
}

/// min(largest relative rise, largest relative fall) along the series;
/// zero exactly when it is monotone.
fn non_monotonicity(r: &[f64]) -> f64 {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut rise, mut fall) = (0.0f64, 0.0f64);
    for &x in r {
        if lo.is_finite() && lo > 0.0 {
            rise = rise.max((x - lo) / lo);
        }
        if hi.is_finite() && hi > 0.0 {
            fall = fall.max((hi - x) / hi);
        }
        lo = lo.min(x);
        hi = hi.max(x);
    }
    rise.min(fall)
}

fn min_rates(points: &[SweepPoint]) -> Vec<f64> {
    points
        .iter()
        .map(|p| p.rates.iter().copied().fold(f64::INFINITY, f64::min))
        .collect()
}

fn run_sweep(work_dir: &Path) -> Result<SweepTable> {
    let dir = work_dir.join("synthetic-family");
    std::fs::create_dir_all(&dir).map_err(|e| crate::Error::io(&dir, e))?;
    let distances = family_distances();
    let mut files = Vec::new();
    for (k, &d) in distances.iter().enumerate() {
        let path = dir.join(format!("d{k:02}.txt"));
        write_spectral_file(&path, &synthetic_density(d), &format!("synthetic family, d = {d} nm"))?;
        files.push(path);
    }
    let mut config = RunConfig::default();
    config.atom.n_max = 8;
    config.atom.n = 7;
    config.atom.m_j = 0.5;
    config.sweep.files = files;
    config.sweep.distances_nm = distances;
    let ctx = Context::new(config, work_dir.to_path_buf(), Some(work_dir.join("synthetic-sweep")));
    commands::sweep(&ctx)
}

pub fn synthetic_sweep(work_dir: &Path) -> Criterion {
    const NAME: &str = "synthetic distance sweep";
    let table = match run_sweep(work_dir) {
        Ok(t) => t,
        Err(e) => return Criterion::failed(9, NAME, e),
    };
    let full = avoided_crossings(&table.full);
    let mixed = full
        .iter()
        .filter(|c| c.participation.0 > MIXED && c.participation.1 > MIXED)
        .count();
    let reference = avoided_crossings(&table.reference).len();
    let reference_tracks = (0..table.labels.len())
        .map(|k| non_monotonicity(&table.reference.iter().map(|p| p.rates[k]).collect::<Vec<_>>()))
        .fold(0.0, f64::max);
    let mut c = Criterion::new(9, NAME);
    c.checks = vec![
        Check::new("avoided crossings between mixed states", mixed as f64, Bound::Above { limit: 0.0 }),
        Check::new("avoided crossings in the reference", reference as f64, Bound::Equal { value: 0.0 }),
        Check::new(
            "non-monotonicity of the minimum rate",
            non_monotonicity(&min_rates(&table.full)),
            Bound::Above { limit: 0.01 },
        ),
        Check::new(
            "non-monotonicity of reference rates",
            reference_tracks,
            Bound::Below { limit: 1e-9 },
        ),
    ];
    c.note = Some(format!(
        "{} points, {} tracking ambiguities",
        table.full.len(),
        table.ambiguities.len()
    ));
    c
}
