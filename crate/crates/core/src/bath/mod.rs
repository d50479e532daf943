//! Spectral densities J(ω) of the electromagnetic environment and the two
//! kernels derived from them: the decay kernel γ(ω) = 2πJ(ω) and the
//! principal-value shift kernel λ(ω) = P∫ J(ω')/(ω − ω') dω'.
//!
//! Only diagonal, cylindrically symmetric tensors are represented
//! (J_xx = J_yy, J_zz). In the spherical basis this tensor stays diagonal,
//! with the ±1 components seeing J_xx and the 0 component seeing J_zz.
//!
//! Frequencies and kernels are in Hartree atomic units; J carries units of
//! energy / (e a0)^2.

mod file;
mod tabulated;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::atom::Spherical;
use crate::error::{Error, Result};

pub use file::{read_spectral_file, write_spectral_file, SpectralFileFormat};
pub use tabulated::{spectral_density_from_green, OutOfGrid, TabulatedDensity};

/// Cartesian tensor component seen by a spherical dipole component.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    /// xx (= yy)
    Transverse,
    /// zz
    Axial,
}

impl Axis {
    pub fn of(q: Spherical) -> Self {
        match q {
            Spherical::Plus | Spherical::Minus => Axis::Transverse,
            Spherical::Zero => Axis::Axial,
        }
    }
}

/// Single Lorentzian peak J(ω) = (g²/π)(κ/2)/((ω − ω_M)² + (κ/2)²).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lorentzian {
    /// Coupling, energy / (e a0).
    pub g: f64,
    /// Full width.
    pub kappa: f64,
    /// Centre frequency.
    pub center: f64,
}

impl Lorentzian {
    pub fn density(&self, w: f64) -> f64 {
        let hw = 0.5 * self.kappa;
        let x = w - self.center;
        self.g * self.g / PI * hw / (x * x + hw * hw)
    }

    /// Closed-form shift integral over the whole real axis.
    pub fn shift(&self, w: f64) -> f64 {
        let hw = 0.5 * self.kappa;
        let x = w - self.center;
        self.g * self.g * x / (x * x + hw * hw)
    }
}

/// A spectral-density model for one emitter position.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SpectralModel {
    /// Same Lorentzian on every axis. Extends to negative frequencies.
    LorentzianIsotropic(Lorentzian),
    /// Lorentzian on the zz component only; J_xx = J_yy = 0.
    LorentzianAxial(Lorentzian),
    /// Frequency-independent J on the whole real axis; λ vanishes.
    Flat { j_xx: f64, j_zz: f64 },
    /// Sampled J on a positive frequency grid (physical).
    Tabulated(TabulatedDensity),
}

/// Acknowledgement required to build models whose J does not vanish for
/// ω ≤ 0. Such models exist only for comparison with the lossy-mode oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NegativeFrequencyTail {
    Reject,
    Allow,
}

/// Kernel values at one frequency, indexed by [`Spherical::index`].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Kernels {
    pub gamma: [f64; 3],
    pub lambda: [f64; 3],
}

impl SpectralModel {
    pub fn lorentzian_isotropic(mode: Lorentzian, tail: NegativeFrequencyTail) -> Result<Self> {
        Self::check_tail(tail)?;
        Self::check_lorentzian(&mode)?;
        Ok(SpectralModel::LorentzianIsotropic(mode))
    }

    pub fn lorentzian_axial(mode: Lorentzian, tail: NegativeFrequencyTail) -> Result<Self> {
        Self::check_tail(tail)?;
        Self::check_lorentzian(&mode)?;
        Ok(SpectralModel::LorentzianAxial(mode))
    }

    pub fn flat(j_xx: f64, j_zz: f64, tail: NegativeFrequencyTail) -> Result<Self> {
        Self::check_tail(tail)?;
        if !(j_xx >= 0.0 && j_zz >= 0.0) {
            return Err(Error::InvalidInput("flat spectral density must be >= 0".into()));
        }
        Ok(SpectralModel::Flat { j_xx, j_zz })
    }

    /// The all-zero environment.
    pub fn vacuum() -> Self {
        SpectralModel::Flat { j_xx: 0.0, j_zz: 0.0 }
    }

    fn check_tail(tail: NegativeFrequencyTail) -> Result<()> {
        match tail {
            NegativeFrequencyTail::Allow => Ok(()),
            NegativeFrequencyTail::Reject => Err(Error::InvalidInput(
                "model has spectral weight at negative frequencies; pass NegativeFrequencyTail::Allow \
                 to use it"
                    .into(),
            )),
        }
    }

    fn check_lorentzian(mode: &Lorentzian) -> Result<()> {
        if !(mode.kappa > 0.0) || !mode.g.is_finite() || !mode.center.is_finite() {
            return Err(Error::InvalidInput(format!("invalid Lorentzian parameters {mode:?}")));
        }
        Ok(())
    }

    /// Whether J ≡ 0 for ω ≤ 0.
    pub fn is_physical(&self) -> bool {
        matches!(self, SpectralModel::Tabulated(_))
            || matches!(self, SpectralModel::Flat { j_xx, j_zz } if *j_xx == 0.0 && *j_zz == 0.0)
    }

    /// Spectral density J_axis(ω).
    pub fn density(&self, axis: Axis, w: f64) -> Result<f64> {
        Ok(match self {
            SpectralModel::LorentzianIsotropic(m) => m.density(w),
            SpectralModel::LorentzianAxial(m) => match axis {
                Axis::Axial => m.density(w),
                Axis::Transverse => 0.0,
            },
            SpectralModel::Flat { j_xx, j_zz } => match axis {
                Axis::Transverse => *j_xx,
                Axis::Axial => *j_zz,
            },
            SpectralModel::Tabulated(t) => t.density(axis, w)?,
        })
    }

    /// Decay kernel γ_qq(ω) = 2π J_qq(ω).
    pub fn gamma(&self, q: Spherical, w: f64) -> Result<f64> {
        Ok(2.0 * PI * self.density(Axis::of(q), w)?)
    }

    /// Shift kernel λ_qq(ω).
    pub fn lambda_shift(&self, q: Spherical, w: f64) -> f64 {
        let axis = Axis::of(q);
        match self {
            SpectralModel::LorentzianIsotropic(m) => m.shift(w),
            SpectralModel::LorentzianAxial(m) => match axis {
                Axis::Axial => m.shift(w),
                Axis::Transverse => 0.0,
            },
            SpectralModel::Flat { .. } => 0.0,
            SpectralModel::Tabulated(t) => t.shift(axis, w),
        }
    }

    pub fn kernels(&self, w: f64) -> Result<Kernels> {
        let mut k = Kernels::default();
        for q in Spherical::ALL {
            k.gamma[q.index()] = self.gamma(q, w)?;
            k.lambda[q.index()] = self.lambda_shift(q, w);
        }
        Ok(k)
    }

    /// Whether the component couples at all (used to skip dead transitions).
    pub fn couples(&self, q: Spherical) -> bool {
        let axis = Axis::of(q);
        match self {
            SpectralModel::LorentzianIsotropic(m) => m.g != 0.0,
            SpectralModel::LorentzianAxial(m) => axis == Axis::Axial && m.g != 0.0,
            SpectralModel::Flat { j_xx, j_zz } => match axis {
                Axis::Transverse => *j_xx != 0.0,
                Axis::Axial => *j_zz != 0.0,
            },
            SpectralModel::Tabulated(t) => t.couples(axis),
        }
    }

    /// Same model with J multiplied by `s >= 0`.
    pub fn scaled(&self, s: f64) -> Self {
        assert!(s >= 0.0, "spectral scale must be non-negative");
        match self {
            SpectralModel::LorentzianIsotropic(m) => SpectralModel::LorentzianIsotropic(Lorentzian {
                g: m.g * s.sqrt(),
                ..*m
            }),
            SpectralModel::LorentzianAxial(m) => SpectralModel::LorentzianAxial(Lorentzian {
                g: m.g * s.sqrt(),
                ..*m
            }),
            SpectralModel::Flat { j_xx, j_zz } => SpectralModel::Flat {
                j_xx: j_xx * s,
                j_zz: j_zz * s,
            },
            SpectralModel::Tabulated(t) => SpectralModel::Tabulated(t.scaled(s)),
        }
    }

    /// Swap the transverse and axial components.
    pub fn swapped_axes(&self) -> Result<Self> {
        match self {
            SpectralModel::LorentzianIsotropic(_) => Ok(self.clone()),
            SpectralModel::Flat { j_xx, j_zz } => Ok(SpectralModel::Flat {
                j_xx: *j_zz,
                j_zz: *j_xx,
            }),
            SpectralModel::Tabulated(t) => Ok(SpectralModel::Tabulated(t.swapped())),
            SpectralModel::LorentzianAxial(_) => Err(Error::InvalidInput(
                "axial Lorentzian has no transverse counterpart".into(),
            )),
        }
    }

    /// Short stable description used in output metadata.
    pub fn describe(&self) -> String {
        match self {
            SpectralModel::LorentzianIsotropic(m) => {
                format!("lorentzian-isotropic(g={:e}, kappa={:e}, center={:e})", m.g, m.kappa, m.center)
            }
            SpectralModel::LorentzianAxial(m) => {
                format!("lorentzian-axial(g={:e}, kappa={:e}, center={:e})", m.g, m.kappa, m.center)
            }
            SpectralModel::Flat { j_xx, j_zz } => format!("flat(jxx={j_xx:e}, jzz={j_zz:e})"),
            SpectralModel::Tabulated(t) => format!("tabulated({} points)", t.len()),
        }
    }
}
