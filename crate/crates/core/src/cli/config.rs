//! Run configuration. Physical quantities carry their unit in the key
//! name (`_ev`, `_nm`, `_fs`); unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::atom::Parity;
use crate::bath::{read_spectral_file, Lorentzian, NegativeFrequencyTail, SpectralModel};
use crate::dynamics::{Method, RunRequest, Variant};
use crate::error::{Error, Result};
use crate::master_eq::Secularization;
use crate::units::{ev_to_hartree, ALPHA};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub atom: AtomSection,
    pub bath: BathSection,
    pub flags: FlagsSection,
    pub dynamics: DynamicsSection,
    pub spectra: SpectraSection,
    pub sweep: SweepSection,
    pub verify: VerifySection,
    pub output: OutputSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AtomSection {
    pub n_max: u32,
    /// Bohr level analysed by `sweep`.
    pub n: u32,
    pub m_j: f64,
    pub parity: Parity,
    /// Fine-structure constant; 0 switches fine structure off.
    pub alpha: f64,
}

impl Default for AtomSection {
    fn default() -> Self {
        Self {
            n_max: 4,
            n: 3,
            m_j: 0.5,
            parity: Parity::Even,
            alpha: ALPHA,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BathSection {
    LorentzianAxial {
        g_ev_per_ea0: f64,
        kappa_ev: f64,
        center_ev: f64,
        /// Must be true: the Lorentzian has weight at ω ≤ 0.
        negative_frequency_tail: bool,
    },
    LorentzianIsotropic {
        g_ev_per_ea0: f64,
        kappa_ev: f64,
        center_ev: f64,
        negative_frequency_tail: bool,
    },
    Flat {
        j_xx_ev_per_ea0sq: f64,
        j_zz_ev_per_ea0sq: f64,
        negative_frequency_tail: bool,
    },
    /// Spectral table (density or Im G format).
    Tabulated { file: PathBuf },
}

impl Default for BathSection {
    fn default() -> Self {
        BathSection::LorentzianAxial {
            g_ev_per_ea0: 9e-4 / 5f64.sqrt(),
            kappa_ev: 2e-3,
            center_ev: 1.95,
            negative_frequency_tail: true,
        }
    }
}

fn tail(allow: bool) -> NegativeFrequencyTail {
    if allow {
        NegativeFrequencyTail::Allow
    } else {
        NegativeFrequencyTail::Reject
    }
}

impl BathSection {
    pub fn model(&self, base: &Path) -> Result<SpectralModel> {
        let lorentzian = |g: f64, kappa: f64, center: f64| Lorentzian {
            g: ev_to_hartree(g),
            kappa: ev_to_hartree(kappa),
            center: ev_to_hartree(center),
        };
        let config = |e: Error| match e {
            Error::InvalidInput(m) => Error::Config(format!("[bath] {m}")),
            other => other,
        };
        match self {
            BathSection::LorentzianAxial {
                g_ev_per_ea0,
                kappa_ev,
                center_ev,
                negative_frequency_tail,
            } => SpectralModel::lorentzian_axial(
                lorentzian(*g_ev_per_ea0, *kappa_ev, *center_ev),
                tail(*negative_frequency_tail),
            )
            .map_err(config),
            BathSection::LorentzianIsotropic {
                g_ev_per_ea0,
                kappa_ev,
                center_ev,
                negative_frequency_tail,
            } => SpectralModel::lorentzian_isotropic(
                lorentzian(*g_ev_per_ea0, *kappa_ev, *center_ev),
                tail(*negative_frequency_tail),
            )
            .map_err(config),
            BathSection::Flat {
                j_xx_ev_per_ea0sq,
                j_zz_ev_per_ea0sq,
                negative_frequency_tail,
            } => SpectralModel::flat(
                ev_to_hartree(*j_xx_ev_per_ea0sq),
                ev_to_hartree(*j_zz_ev_per_ea0sq),
                tail(*negative_frequency_tail),
            )
            .map_err(config),
            BathSection::Tabulated { file } => Ok(SpectralModel::Tabulated(read_spectral_file(&base.join(file))?)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlagsSection {
    pub counter_rotating: bool,
    /// Generator analysed by `sweep`; the fully secular reference is always
    /// emitted alongside.
    pub secularization: Secularization,
    /// Restrict intermediate states to these Bohr levels.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intermediate_levels: Option<Vec<u32>>,
}

impl Default for FlagsSection {
    fn default() -> Self {
        Self {
            counter_rotating: true,
            secularization: Secularization::PartialGeometricMean,
            intermediate_levels: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateLabel {
    pub n: u32,
    pub l: u32,
    pub j: f64,
    pub m_j: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodName {
    Exponential,
    RungeKutta,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DynamicsSection {
    pub initial: StateLabel,
    pub window_fs: f64,
    pub step_fs: f64,
    pub method: MethodName,
    /// Relative tolerance of the Runge-Kutta integrator.
    pub tolerance: f64,
    /// Photon-number cap of the lossy-mode reference.
    pub truncation: u32,
    /// e.g. "oracle", "oracle-n2", "bloch-redfield", "lindblad",
    /// "effective"; a "-rwa" suffix drops the counter-rotating terms.
    pub runs: Vec<String>,
}

impl Default for DynamicsSection {
    fn default() -> Self {
        Self {
            initial: StateLabel {
                n: 3,
                l: 0,
                j: 0.5,
                m_j: 0.5,
            },
            window_fs: 400_000.0,
            step_fs: 500.0,
            method: MethodName::Exponential,
            tolerance: 1e-9,
            truncation: 1,
            runs: vec!["oracle".into(), "lindblad".into(), "effective".into()],
        }
    }
}

impl DynamicsSection {
    pub fn method(&self) -> Method {
        match self.method {
            MethodName::Exponential => Method::Exponential,
            MethodName::RungeKutta => Method::RungeKutta {
                rtol: self.tolerance,
                atol: self.tolerance * 1e-3,
            },
        }
    }

    pub fn requests(&self) -> Result<Vec<RunRequest>> {
        self.runs.iter().map(|r| parse_run(r, self.truncation)).collect()
    }
}

fn parse_run(s: &str, truncation: u32) -> Result<RunRequest> {
    let (base, counter_rotating) = match s.strip_suffix("-rwa") {
        Some(b) => (b, false),
        None => (s, true),
    };
    let variant = match base {
        "oracle" => Variant::Oracle { truncation },
        "bloch-redfield" => Variant::BlochRedfield,
        "lindblad" => Variant::Lindblad,
        "effective" => Variant::Effective,
        other => match other.strip_prefix("oracle-n").and_then(|n| n.parse().ok()) {
            Some(t) if t >= 1 => Variant::Oracle { truncation: t },
            _ => return Err(Error::Config(format!("unknown run `{s}`"))),
        },
    };
    Ok(RunRequest {
        variant,
        counter_rotating,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectraSection {
    pub omega_min_ev: f64,
    pub omega_max_ev: f64,
    pub points: usize,
}

impl Default for SpectraSection {
    fn default() -> Self {
        Self {
            omega_min_ev: 1.9,
            omega_max_ev: 2.0,
            points: 401,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    /// One spectral table per sweep point, in sweep order.
    pub files: Vec<PathBuf>,
    /// Sweep parameter of each file; point indices when empty.
    pub distances_nm: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    pub seed: u64,
    pub property_models: usize,
}

impl Default for VerifySection {
    fn default() -> Self {
        Self {
            seed: 20_251,
            property_models: 100,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub directory: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("out"),
            formats: vec![Format::Csv, Format::Json],
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let c: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// SHA-256 of the canonical serialization.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn two_mj(&self) -> i32 {
        (2.0 * self.atom.m_j).round() as i32
    }

    pub fn validate(&self) -> Result<()> {
        let half_odd = |x: f64| {
            let t = 2.0 * x;
            t == t.round() && (t.round() as i64).rem_euclid(2) == 1
        };
        let bad = |m: &str| Err(Error::Config(m.into()));
        if self.atom.n_max == 0 || self.atom.n == 0 || self.atom.n > self.atom.n_max {
            return bad("[atom] needs 1 <= n <= n_max");
        }
        if !half_odd(self.atom.m_j) {
            return bad("[atom] m_j must be a half-odd integer");
        }
        if !(self.atom.alpha >= 0.0) {
            return bad("[atom] alpha must be >= 0");
        }
        let s = &self.dynamics.initial;
        if s.n == 0 || s.l >= s.n || !half_odd(s.j) || !half_odd(s.m_j) || s.m_j.abs() > s.j || (s.j - s.l as f64).abs() != 0.5 {
            return bad("[dynamics] initial is not a valid fine-structure state");
        }
        if !(self.dynamics.step_fs > 0.0) || !(self.dynamics.window_fs >= 0.0) {
            return bad("[dynamics] window_fs must be >= 0 and step_fs > 0");
        }
        if !(self.dynamics.tolerance > 0.0) || self.dynamics.truncation == 0 {
            return bad("[dynamics] tolerance must be > 0 and truncation >= 1");
        }
        self.dynamics.requests()?;
        if !self.sweep.distances_nm.is_empty() && self.sweep.distances_nm.len() != self.sweep.files.len() {
            return bad("[sweep] distances_nm needs one entry per file");
        }
        if self.flags.secularization == Secularization::None {
            return bad("[flags] secularization must be partial-geometric-mean or full");
        }
        if !(self.spectra.omega_max_ev > self.spectra.omega_min_ev) {
            return bad("[spectra] omega_max_ev must exceed omega_min_ev");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let c = RunConfig::default();
        let text = c.to_toml();
        assert_eq!(RunConfig::parse(&text).unwrap(), c);
    }

    #[test]
    fn every_variant_round_trips() {
        let mut c = RunConfig::default();
        c.bath = BathSection::Tabulated {
            file: "j.txt".into(),
        };
        c.flags.intermediate_levels = Some(vec![6]);
        c.flags.secularization = Secularization::Full;
        c.sweep.files = vec!["a.txt".into(), "b.txt".into()];
        c.sweep.distances_nm = vec![20.0, 30.5];
        c.dynamics.runs = vec!["oracle-n2".into(), "effective-rwa".into()];
        let back = RunConfig::parse(&c.to_toml()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash(), c.hash());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::parse("[atom]\nn_max = 4\ncolour = 3\n").is_err());
        assert!(RunConfig::parse("[bath]\nmodel = \"flat\"\nj_xx_ev_per_ea0sq = 0.0\nj_zz_ev_per_ea0sq = 0.0\nnegative_frequency_tail = true\nextra = 1\n").is_err());
        assert!(RunConfig::parse("[nonsense]\n").is_err());
    }

    #[test]
    fn partial_file_takes_defaults() {
        let c = RunConfig::parse("[dynamics]\nwindow_fs = 1000.0\n").unwrap();
        assert_eq!(c.dynamics.window_fs, 1000.0);
        assert_eq!(c.atom, AtomSection::default());
    }

    #[test]
    fn hash_tracks_content() {
        let a = RunConfig::default();
        let mut b = a.clone();
        b.dynamics.step_fs = 250.0;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn invalid_values_are_config_errors() {
        for text in [
            "[atom]\nm_j = 1.0\n",
            "[atom]\nn = 5\n",
            "[dynamics]\nstep_fs = 0.0\n",
            "[dynamics]\nruns = [\"oracle-n0\"]\n",
            "[dynamics]\ninitial = { n = 3, l = 0, j = 1.5, m_j = 0.5 }\n",
            "[sweep]\nfiles = [\"a\"]\ndistances_nm = [1.0, 2.0]\n",
        ] {
            assert!(matches!(RunConfig::parse(text), Err(Error::Config(_))), "{text}");
        }
    }

    #[test]
    fn run_names_parse() {
        let r = parse_run("lindblad-rwa", 1).unwrap();
        assert_eq!(r.variant, Variant::Lindblad);
        assert!(!r.counter_rotating);
        assert_eq!(parse_run("oracle", 3).unwrap().variant, Variant::Oracle { truncation: 3 });
        assert_eq!(parse_run("oracle-n2", 1).unwrap().id(), "oracle-n2");
    }
}
