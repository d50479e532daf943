//! C interface to vacmix.
//!
//! Every fallible function returns a [`VacmixStatus`]; on failure the
//! message is kept per thread and read with [`vacmix_last_error`]. Handles
//! are opaque and released with their `_free` function. Energies and rates
//! cross the boundary in eV, times in fs.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use vacmix::atom::{build_dipole_table, enumerate_basis_with, radial_integral};
use vacmix::cli::{commands, Context, RunConfig};
use vacmix::effective::{sweep_and_track, SweepSetup};
use vacmix::master_eq::BrOptions;
use vacmix::units::{au_to_fs, hartree_to_ev};
use vacmix::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VacmixStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Bad configuration, unreadable file or malformed table.
    Config = 3,
    /// Invalid physical input or a failed computation.
    Computation = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

/// A parsed run configuration.
pub struct VacmixConfig {
    config: RunConfig,
    base_dir: PathBuf,
}

/// Eigenstates of the configured block of the effective Hamiltonian.
pub struct VacmixBlock {
    energies_ev: Vec<f64>,
    rates_ev: Vec<f64>,
    participation: Vec<f64>,
    labels: Vec<CString>,
}

/// Populations of one propagated run.
pub struct VacmixSeries {
    names: Vec<CString>,
    times_fs: Vec<f64>,
    /// Row-major, one row per time.
    values: Vec<f64>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Failure(VacmixStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Config(_) | Error::Io { .. } | Error::Parse { .. } => VacmixStatus::Config,
            _ => VacmixStatus::Computation,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(VacmixStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> VacmixStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            VacmixStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            VacmixStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(VacmixStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn copy_out(src: &[f64], out: *mut f64, len: usize) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output buffer"));
    }
    if len < src.len() {
        return Err(Failure(
            VacmixStatus::BufferTooSmall,
            format!("buffer holds {len} values, {} needed", src.len()),
        ));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
    Ok(())
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output handle"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn vacmix_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn vacmix_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// The built-in default configuration.
///
/// # Safety
/// `out` must be valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn vacmix_config_default(out: *mut *mut VacmixConfig) -> VacmixStatus {
    guard(|| {
        store(
            out,
            VacmixConfig {
                config: RunConfig::default(),
                base_dir: PathBuf::from("."),
            },
        )
    })
}

/// Parses TOML text. Relative file names resolve against `base_dir`, or the
/// working directory when it is NULL.
///
/// # Safety
/// `toml` and a non-null `base_dir` must be NUL-terminated strings; `out`
/// must be valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn vacmix_config_parse(
    toml: *const c_char,
    base_dir: *const c_char,
    out: *mut *mut VacmixConfig,
) -> VacmixStatus {
    guard(|| {
        let config = RunConfig::parse(text(toml, "toml")?)?;
        let base_dir = if base_dir.is_null() {
            PathBuf::from(".")
        } else {
            PathBuf::from(text(base_dir, "base_dir")?)
        };
        store(out, VacmixConfig { config, base_dir })
    })
}

/// Writes the 64-character SHA-256 of the canonical configuration and a
/// terminating NUL; `len` must be at least 65.
///
/// # Safety
/// `config` must come from this library; `buf` must hold `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn vacmix_config_hash(config: *const VacmixConfig, buf: *mut c_char, len: usize) -> VacmixStatus {
    guard(|| {
        let c = config.as_ref().ok_or_else(|| null("config"))?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let hash = c.config.hash();
        if len < hash.len() + 1 {
            return Err(Failure(
                VacmixStatus::BufferTooSmall,
                format!("buffer holds {len} bytes, {} needed", hash.len() + 1),
            ));
        }
        ptr::copy_nonoverlapping(hash.as_ptr().cast(), buf, hash.len());
        *buf.add(hash.len()) = 0;
        Ok(())
    })
}

/// # Safety
/// `config` must come from this library or be NULL, and is not used after.
#[no_mangle]
pub unsafe extern "C" fn vacmix_config_free(config: *mut VacmixConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Diagonalizes the block selected by `[atom]` (level n, m_j, parity) under
/// the configured bath and flags.
///
/// # Safety
/// `config` must come from this library; `out` must be valid for writing a
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn vacmix_block_compute(config: *const VacmixConfig, out: *mut *mut VacmixBlock) -> VacmixStatus {
    guard(|| {
        let c = config.as_ref().ok_or_else(|| null("config"))?;
        let cfg = &c.config;
        let model = cfg.bath.model(&c.base_dir)?;
        let basis = enumerate_basis_with(cfg.atom.n_max, cfg.atom.alpha);
        let dipoles = build_dipole_table(&basis);
        let table = sweep_and_track(
            &[model],
            &[0.0],
            &SweepSetup {
                basis: &basis,
                dipoles: &dipoles,
                options: BrOptions {
                    counter_rotating: cfg.flags.counter_rotating,
                    intermediate_levels: cfg.flags.intermediate_levels.clone(),
                },
                n: cfg.atom.n,
                two_mj: cfg.two_mj(),
                parity: cfg.atom.parity,
                secularization: cfg.flags.secularization,
            },
        )?;
        let p = &table.full[0];
        let labels = table
            .track_labels
            .iter()
            .map(|l| CString::new(l.as_str()).expect("labels have no NUL"))
            .collect();
        store(
            out,
            VacmixBlock {
                energies_ev: p.energies.iter().map(|&e| hartree_to_ev(e)).collect(),
                rates_ev: p.rates.iter().map(|&e| hartree_to_ev(e)).collect(),
                participation: p.participation.clone(),
                labels,
            },
        )
    })
}

/// Number of eigenstates, 0 for NULL.
///
/// # Safety
/// `block` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn vacmix_block_dim(block: *const VacmixBlock) -> usize {
    block.as_ref().map_or(0, |b| b.energies_ev.len())
}

/// Re E of each eigenstate in eV.
///
/// # Safety
/// `block` must come from this library; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn vacmix_block_energies(block: *const VacmixBlock, out: *mut f64, len: usize) -> VacmixStatus {
    guard(|| copy_out(&block.as_ref().ok_or_else(|| null("block"))?.energies_ev, out, len))
}

/// −2 Im E of each eigenstate in eV.
///
/// # Safety
/// `block` must come from this library; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn vacmix_block_rates(block: *const VacmixBlock, out: *mut f64, len: usize) -> VacmixStatus {
    guard(|| copy_out(&block.as_ref().ok_or_else(|| null("block"))?.rates_ev, out, len))
}

/// Participation ratio of each eigenstate in the bare basis.
///
/// # Safety
/// `block` must come from this library; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn vacmix_block_participation(
    block: *const VacmixBlock,
    out: *mut f64,
    len: usize,
) -> VacmixStatus {
    guard(|| copy_out(&block.as_ref().ok_or_else(|| null("block"))?.participation, out, len))
}

/// Dominant bare-state label of eigenstate `k`, owned by the block; NULL
/// when out of range.
///
/// # Safety
/// `block` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn vacmix_block_label(block: *const VacmixBlock, k: usize) -> *const c_char {
    block
        .as_ref()
        .and_then(|b| b.labels.get(k))
        .map_or(ptr::null(), |s| s.as_ptr())
}

/// # Safety
/// `block` must come from this library or be NULL, and is not used after.
#[no_mangle]
pub unsafe extern "C" fn vacmix_block_free(block: *mut VacmixBlock) {
    if !block.is_null() {
        drop(Box::from_raw(block));
    }
}

/// Propagates one generator variant ("oracle", "oracle-n2", "lindblad",
/// "bloch-redfield", "effective", optionally suffixed "-rwa") with the
/// `[dynamics]` settings. Nothing is written to disk.
///
/// # Safety
/// `config` must come from this library, `run` must be a NUL-terminated
/// string and `out` must be valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn vacmix_propagate(
    config: *const VacmixConfig,
    run: *const c_char,
    out: *mut *mut VacmixSeries,
) -> VacmixStatus {
    guard(|| {
        let c = config.as_ref().ok_or_else(|| null("config"))?;
        let mut cfg = c.config.clone();
        cfg.dynamics.runs = vec![text(run, "run")?.to_string()];
        let ctx = Context::new(cfg, c.base_dir.clone(), None);
        let s = commands::simulate(&ctx)?
            .series
            .pop()
            .ok_or_else(|| Failure(VacmixStatus::Computation, "no run produced".into()))?;
        store(
            out,
            VacmixSeries {
                names: s
                    .names
                    .iter()
                    .map(|n| CString::new(n.as_str()).expect("labels have no NUL"))
                    .collect(),
                times_fs: s.times.iter().map(|&t| au_to_fs(t)).collect(),
                values: s.values.concat(),
            },
        )
    })
}

/// Number of time points, 0 for NULL.
///
/// # Safety
/// `series` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn vacmix_series_rows(series: *const VacmixSeries) -> usize {
    series.as_ref().map_or(0, |s| s.times_fs.len())
}

/// Number of observed populations, 0 for NULL.
///
/// # Safety
/// `series` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn vacmix_series_columns(series: *const VacmixSeries) -> usize {
    series.as_ref().map_or(0, |s| s.names.len())
}

/// Label of column `k`, owned by the series; NULL when out of range.
///
/// # Safety
/// `series` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn vacmix_series_name(series: *const VacmixSeries, k: usize) -> *const c_char {
    series
        .as_ref()
        .and_then(|s| s.names.get(k))
        .map_or(ptr::null(), |n| n.as_ptr())
}

/// Time grid in fs.
///
/// # Safety
/// `series` must come from this library; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn vacmix_series_times(series: *const VacmixSeries, out: *mut f64, len: usize) -> VacmixStatus {
    guard(|| copy_out(&series.as_ref().ok_or_else(|| null("series"))?.times_fs, out, len))
}

/// Populations, row-major with rows × columns entries.
///
/// # Safety
/// `series` must come from this library; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn vacmix_series_values(series: *const VacmixSeries, out: *mut f64, len: usize) -> VacmixStatus {
    guard(|| copy_out(&series.as_ref().ok_or_else(|| null("series"))?.values, out, len))
}

/// # Safety
/// `series` must come from this library or be NULL, and is not used after.
#[no_mangle]
pub unsafe extern "C" fn vacmix_series_free(series: *mut VacmixSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// ∫ R_nl R_n'l' r³ dr in Bohr radii, for |l − l'| = 1.
///
/// # Safety
/// `out` must be valid for writing a double.
#[no_mangle]
pub unsafe extern "C" fn vacmix_radial_integral(n: u32, l: u32, n2: u32, l2: u32, out: *mut f64) -> VacmixStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = radial_integral(n, l, n2, l2)?;
        Ok(())
    })
}
