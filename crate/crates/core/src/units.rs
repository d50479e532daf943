//! Physical constants (CODATA 2018) and unit conversions.
//!
//! Everything inside the crate is in Hartree atomic units
//! (hbar = e = a0 = m_e = 1). Conversions happen only at I/O boundaries.

/// Fine-structure constant.
pub const ALPHA: f64 = 7.297_352_569_3e-3;
/// Hartree energy in eV.
pub const HARTREE_EV: f64 = 27.211_386_245_988;
/// Atomic unit of time in femtoseconds.
pub const AU_TIME_FS: f64 = 2.418_884_326_585_7e-2;
/// Bohr radius in metres.
pub const BOHR_M: f64 = 5.291_772_109_03e-11;
/// Bohr radius in nanometres.
pub const BOHR_NM: f64 = BOHR_M * 1e9;
/// Elementary charge in coulombs.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Reduced Planck constant in J s.
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Vacuum permittivity in F/m.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
/// Hartree energy in joules.
pub const HARTREE_J: f64 = HARTREE_EV * ELEMENTARY_CHARGE;

#[inline]
pub fn ev_to_hartree(e: f64) -> f64 {
    e / HARTREE_EV
}

#[inline]
pub fn hartree_to_ev(e: f64) -> f64 {
    e * HARTREE_EV
}

#[inline]
pub fn fs_to_au(t: f64) -> f64 {
    t / AU_TIME_FS
}

#[inline]
pub fn au_to_fs(t: f64) -> f64 {
    t * AU_TIME_FS
}

/// hbar/eV expressed in femtoseconds.
pub const HBAR_PER_EV_FS: f64 = HARTREE_EV * AU_TIME_FS;

/// Angular frequency (rad/s) of a photon with the given energy in eV.
#[inline]
pub fn ev_to_rad_per_s(e: f64) -> f64 {
    e * ELEMENTARY_CHARGE / HBAR_SI
}
