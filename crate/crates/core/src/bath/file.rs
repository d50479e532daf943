//! Plain-text spectral tables.
//!
//! ```text
//! # comment
//! #format: imgreen        (optional; default is "density")
//! omega_eV  Jxx  Jzz      (J in eV/(e a0)^2), or ImGxx ImGzz in 1/m
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::tabulated::{spectral_density_from_green, TabulatedDensity};
use super::Axis;
use crate::error::{Error, Result};
use crate::units::{ev_to_hartree, hartree_to_ev};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectralFileFormat {
    /// Columns are J_xx and J_zz in eV/(e a0)^2.
    Density,
    /// Columns are Im G^scatt_xx and Im G^scatt_zz in 1/m.
    ImGreen,
}

pub fn read_spectral_file(path: &Path) -> Result<TabulatedDensity> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_spectral_text(&text, path)
}

pub(crate) fn parse_spectral_text(text: &str, path: &Path) -> Result<TabulatedDensity> {
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut format = SpectralFileFormat::Density;
    let (mut w, mut a, mut b) = (Vec::new(), Vec::new(), Vec::new());
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(value) = comment.trim().strip_prefix("format:") {
                format = match value.trim() {
                    "imgreen" => SpectralFileFormat::ImGreen,
                    "density" => SpectralFileFormat::Density,
                    other => return Err(parse_err(i + 1, format!("unknown format directive `{other}`"))),
                };
            }
            continue;
        }
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != 3 {
            return Err(parse_err(i + 1, format!("expected 3 columns, found {}", cols.len())));
        }
        let mut vals = [0.0; 3];
        for (v, c) in vals.iter_mut().zip(&cols) {
            *v = c
                .parse::<f64>()
                .map_err(|e| parse_err(i + 1, format!("`{c}`: {e}")))?;
        }
        w.push(vals[0]);
        a.push(vals[1]);
        b.push(vals[2]);
    }
    if w.is_empty() {
        return Err(parse_err(0, "no data rows".into()));
    }
    let table = match format {
        SpectralFileFormat::Density => {
            let omega = w.iter().map(|&x| ev_to_hartree(x)).collect();
            let to_au = |v: Vec<f64>| v.into_iter().map(ev_to_hartree).collect::<Vec<_>>();
            TabulatedDensity::new(omega, to_au(a), to_au(b))
        }
        SpectralFileFormat::ImGreen => spectral_density_from_green(&w, &a, &b),
    };
    table.map_err(|e| parse_err(0, e.to_string()))
}

/// Writes a table in the density format (eV, eV/(e a0)^2).
pub fn write_spectral_file(path: &Path, table: &TabulatedDensity, header: &str) -> Result<()> {
    let mut out = String::new();
    for line in header.lines() {
        let _ = writeln!(out, "# {line}");
    }
    out.push_str("#format: density\n");
    out.push_str("# omega_eV Jxx_eV_per_ea0^2 Jzz_eV_per_ea0^2\n");
    let xx = table.column(Axis::Transverse);
    let zz = table.column(Axis::Axial);
    for (k, &w) in table.omega().iter().enumerate() {
        let _ = writeln!(
            out,
            "{:.16e} {:.16e} {:.16e}",
            hartree_to_ev(w),
            hartree_to_ev(xx[k]),
            hartree_to_ev(zz[k])
        );
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_density_rows_and_comments() {
        let text = "# a comment\n\n1.0 0.1 0.2\n2.0 0.3 0.4\n";
        let t = parse_spectral_text(text, Path::new("mem")).unwrap();
        assert_eq!(t.len(), 2);
        assert!((t.omega()[1] - ev_to_hartree(2.0)).abs() < 1e-15);
        assert!((t.column(Axis::Axial)[0] - ev_to_hartree(0.2)).abs() < 1e-15);
    }

    #[test]
    fn imgreen_directive_switches_units() {
        let text = "#format: imgreen\n1.0 1e7 2e7\n2.0 1e7 2e7\n";
        let t = parse_spectral_text(text, Path::new("mem")).unwrap();
        let direct = spectral_density_from_green(&[1.0, 2.0], &[1e7, 1e7], &[2e7, 2e7]).unwrap();
        assert_eq!(t, direct);
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_spectral_text("1.0 2.0\n", Path::new("x.txt")).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
        let err = parse_spectral_text("2.0 0 0\n1.0 0 0\n", Path::new("x.txt")).unwrap_err();
        assert!(err.to_string().contains("increasing"), "{err}");
        assert!(parse_spectral_text("# only comments\n", Path::new("x")).is_err());
    }

    #[test]
    fn write_then_read() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("j.txt");
        let t = TabulatedDensity::new(vec![0.01, 0.02, 0.05], vec![0.0, 1e-3, 0.0], vec![1e-4, 2e-3, 5e-5]).unwrap();
        write_spectral_file(&p, &t, "test table").unwrap();
        let back = read_spectral_file(&p).unwrap();
        for (x, y) in t.omega().iter().zip(back.omega()) {
            assert!((x - y).abs() <= 1e-15 * x);
        }
        for (x, y) in t.column(Axis::Axial).iter().zip(back.column(Axis::Axial)) {
            assert!((x - y).abs() <= 1e-15 * x.abs());
        }
    }
}
