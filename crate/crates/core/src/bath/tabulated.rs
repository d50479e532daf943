use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::Axis;
use crate::error::{Error, Result};
use crate::units::{ev_to_hartree, ev_to_rad_per_s, BOHR_M, ELEMENTARY_CHARGE, EPSILON_0, HARTREE_J, SPEED_OF_LIGHT};

/// Behaviour of γ outside the tabulated grid.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutOfGrid {
    #[default]
    ZeroExtend,
    Error,
}

/// Piecewise-linear J_xx (= J_yy) and J_zz on a strictly increasing,
/// positive frequency grid (Hartree). Zero outside the grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TabulatedDensity {
    omega: Vec<f64>,
    j_xx: Vec<f64>,
    j_zz: Vec<f64>,
    #[serde(default)]
    pub out_of_grid: OutOfGrid,
}

impl TabulatedDensity {
    pub fn new(omega: Vec<f64>, j_xx: Vec<f64>, j_zz: Vec<f64>) -> Result<Self> {
        if omega.len() < 2 {
            return Err(Error::InvalidInput("tabulated density needs at least two points".into()));
        }
        if j_xx.len() != omega.len() || j_zz.len() != omega.len() {
            return Err(Error::InvalidInput("column lengths differ from frequency grid".into()));
        }
        if !omega.iter().all(|w| w.is_finite() && *w > 0.0) {
            return Err(Error::InvalidInput("frequency grid must be positive".into()));
        }
        if let Some(k) = omega.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(format!(
                "frequency grid not strictly increasing at row {}",
                k + 1
            )));
        }
        for (name, col) in [("Jxx", &j_xx), ("Jzz", &j_zz)] {
            if let Some(k) = col.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::InvalidInput(format!("{name} negative or not finite at row {k}")));
            }
        }
        Ok(Self {
            omega,
            j_xx,
            j_zz,
            out_of_grid: OutOfGrid::ZeroExtend,
        })
    }

    pub fn with_out_of_grid(mut self, policy: OutOfGrid) -> Self {
        self.out_of_grid = policy;
        self
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn column(&self, axis: Axis) -> &[f64] {
        match axis {
            Axis::Transverse => &self.j_xx,
            Axis::Axial => &self.j_zz,
        }
    }

    pub(crate) fn couples(&self, axis: Axis) -> bool {
        self.column(axis).iter().any(|&v| v != 0.0)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            omega: self.omega.clone(),
            j_xx: self.j_xx.iter().map(|v| v * s).collect(),
            j_zz: self.j_zz.iter().map(|v| v * s).collect(),
            out_of_grid: self.out_of_grid,
        }
    }

    pub fn swapped(&self) -> Self {
        Self {
            omega: self.omega.clone(),
            j_xx: self.j_zz.clone(),
            j_zz: self.j_xx.clone(),
            out_of_grid: self.out_of_grid,
        }
    }

    /// Linear interpolation of J; zero (or an error) outside the grid.
    pub fn density(&self, axis: Axis, w: f64) -> Result<f64> {
        let (lo, hi) = (self.omega[0], *self.omega.last().unwrap());
        if w < lo || w > hi {
            return match self.out_of_grid {
                OutOfGrid::ZeroExtend => Ok(0.0),
                OutOfGrid::Error => Err(Error::Domain(format!(
                    "frequency {w:e} outside tabulated grid [{lo:e}, {hi:e}]"
                ))),
            };
        }
        let col = self.column(axis);
        let k = match self.omega.partition_point(|&x| x <= w) {
            0 => 0,
            p if p >= self.omega.len() => self.omega.len() - 2,
            p => p - 1,
        };
        let t = (w - self.omega[k]) / (self.omega[k + 1] - self.omega[k]);
        Ok(col[k] + t * (col[k + 1] - col[k]))
    }

    /// Principal value ∫ J(ω')/(ω − ω') dω' of the piecewise-linear
    /// interpolant, integrated exactly segment by segment.
    ///
    /// On segment k, with slope s_k and the segment's line J_k(·) continued
    /// to ω, the integral is J_k(ω) ln|(ω − ω_k)/(ω − ω_{k+1})| − s_k h_k.
    /// Summing and regrouping by node removes the removable log
    /// singularities at interior nodes, leaving (s_k − s_{k−1})(ω − ω_k)
    /// ln|ω − ω_k| per interior node plus the two edge terms.
    pub fn shift(&self, axis: Axis, w: f64) -> f64 {
        let x = &self.omega;
        let y = self.column(axis);
        let n = x.len();
        let span = x[n - 1] - x[0];
        if w < x[0] - span || w > x[n - 1] + span {
            return self.shift_far(y, w);
        }
        let slope = |k: usize| (y[k + 1] - y[k]) / (x[k + 1] - x[k]);
        let xlog = |d: f64| if d == 0.0 { 0.0 } else { d * d.abs().ln() };

        let mut acc = 0.0;
        // first node: + J_0(ω) ln|ω − ω_0| where J_0(ω) = y0 + s0 (ω − ω0)
        let d0 = w - x[0];
        let s0 = slope(0);
        acc += y[0] * ln_abs(d0) + s0 * xlog(d0);
        let mut prev_slope = s0;
        for k in 1..n - 1 {
            let sk = slope(k);
            acc += (sk - prev_slope) * xlog(w - x[k]);
            prev_slope = sk;
        }
        // last node: − J_{n−2}(ω) ln|ω − ω_{n−1}|
        let dl = w - x[n - 1];
        acc -= y[n - 1] * ln_abs(dl) + prev_slope * xlog(dl);
        // − Σ s_k h_k telescopes
        acc - (y[n - 1] - y[0])
    }
}

impl TabulatedDensity {
    // Far from the support the node sum cancels catastrophically; sum the
    // per-segment integrals in a form that stays accurate as h/(ω − ω_k) → 0.
    fn shift_far(&self, y: &[f64], w: f64) -> f64 {
        let x = &self.omega;
        let mut acc = 0.0;
        for k in 0..x.len() - 1 {
            let (h, d) = (x[k + 1] - x[k], w - x[k]);
            let r = h / d;
            let log = -(-r).ln_1p();
            // ∫ (ω' − ω_k)/(ω − ω') dω' over the segment = d·log − h
            let lin = if r.abs() < 0.1 {
                let mut term = r;
                let mut sum = 0.0;
                for j in 2..40 {
                    sum += term / j as f64;
                    term *= r;
                    if term.abs() < 1e-18 * sum.abs() {
                        break;
                    }
                }
                h * sum
            } else {
                d * log - h
            };
            let s = (y[k + 1] - y[k]) / h;
            acc += y[k] * log + s * lin;
        }
        acc
    }
}

fn ln_abs(d: f64) -> f64 {
    // a non-zero edge value at the evaluation point is a genuine log
    // divergence of the zero-extended interpolant
    d.abs().ln()
}

/// Converts Im G^scatt (SI, m⁻¹) sampled at photon energies in eV into a
/// tabulated spectral density in atomic units,
/// J = ω² Im G / (ħ π ε0 c²), expressed per (e a0)² and in Hartree.
pub fn spectral_density_from_green(
    omega_ev: &[f64],
    im_g_xx: &[f64],
    im_g_zz: &[f64],
) -> Result<TabulatedDensity> {
    if im_g_xx.len() != omega_ev.len() || im_g_zz.len() != omega_ev.len() {
        return Err(Error::InvalidInput("Green tensor columns differ in length from the grid".into()));
    }
    for (name, col) in [("ImGxx", im_g_xx), ("ImGzz", im_g_zz)] {
        if let Some(k) = col.iter().position(|v| !(*v >= 0.0)) {
            return Err(Error::InvalidInput(format!(
                "{name} negative at row {k}: passivity requires Im G >= 0"
            )));
        }
    }
    // ħJ in joules per (C m)², times (e a0)² / E_h.
    let dipole_au = ELEMENTARY_CHARGE * BOHR_M;
    let convert = |w_ev: f64, img: f64| {
        let w = ev_to_rad_per_s(w_ev);
        w * w / (PI * EPSILON_0 * SPEED_OF_LIGHT * SPEED_OF_LIGHT) * img * dipole_au * dipole_au / HARTREE_J
    };
    let j_xx = omega_ev.iter().zip(im_g_xx).map(|(&w, &g)| convert(w, g)).collect();
    let j_zz = omega_ev.iter().zip(im_g_zz).map(|(&w, &g)| convert(w, g)).collect();
    let omega = omega_ev.iter().map(|&w| ev_to_hartree(w)).collect();
    TabulatedDensity::new(omega, j_xx, j_zz)
}
