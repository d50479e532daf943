//! Adaptive Dormand-Prince 5(4) integrator for complex linear ODEs.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { rtol: 1e-9, atol: 1e-12 }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// 5th-order weights equal the last row of A; error = 5th − 4th order
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates y' = f(t, y) through every time in `times` (increasing,
/// starting at the current time `times[0]`), calling `record` at each.
pub fn dopri5<F, R>(mut f: F, y0: &[Complex64], times: &[f64], tol: Tolerance, mut record: R) -> Result<Vec<Complex64>>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
    R: FnMut(usize, &[Complex64]) -> Result<()>,
{
    let n = y0.len();
    let mut y = y0.to_vec();
    let Some(&t0) = times.first() else {
        return Ok(y);
    };
    record(0, &y)?;
    let mut t = t0;
    let mut k: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); n]; 7];
    let mut tmp = vec![Complex64::new(0.0, 0.0); n];
    let mut ynew = vec![Complex64::new(0.0, 0.0); n];
    f(t, &y, &mut k[0]);
    let mut h = initial_step(&y, &k[0], tol, times.last().unwrap() - t0);
    let mut fsal_valid = true;
    for (idx, &target) in times.iter().enumerate().skip(1) {
        if target < t {
            return Err(Error::InvalidInput("time grid must be increasing".into()));
        }
        while t < target {
            let last = t + h >= target;
            let step = if last { target - t } else { h };
            if step <= f64::EPSILON * t.abs().max(1.0) * 16.0 && !last {
                return Err(Error::Integration {
                    t,
                    reason: format!("step size underflow (h = {step:e})"),
                });
            }
            if !fsal_valid {
                f(t, &y, &mut k[0]);
            }
            for s in 1..7 {
                for i in 0..n {
                    let mut acc = y[i];
                    for (j, a) in A[s].iter().enumerate().take(s) {
                        if *a != 0.0 {
                            acc += k[j][i] * (step * a);
                        }
                    }
                    tmp[i] = acc;
                }
                f(t + C[s] * step, &tmp, &mut k[s]);
                if s == 6 {
                    ynew.copy_from_slice(&tmp);
                }
            }
            let mut err: f64 = 0.0;
            for i in 0..n {
                let mut e = Complex64::new(0.0, 0.0);
                for (j, w) in E.iter().enumerate() {
                    if *w != 0.0 {
                        e += k[j][i] * w;
                    }
                }
                let sc = tol.atol + tol.rtol * y[i].norm().max(ynew[i].norm());
                err = err.max((e * step).norm() / sc);
            }
            if !err.is_finite() {
                return Err(Error::Integration {
                    t,
                    reason: "non-finite error estimate".into(),
                });
            }
            if err <= 1.0 {
                t = if last { target } else { t + step };
                std::mem::swap(&mut y, &mut ynew);
                k.swap(0, 6);
                fsal_valid = true;
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !last {
                    h = step * fac;
                } else {
                    h = h.max(step * fac);
                }
            } else {
                fsal_valid = true;
                h = step * (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            }
        }
        record(idx, &y)?;
    }
    Ok(y)
}

fn initial_step(y: &[Complex64], dy: &[Complex64], tol: Tolerance, span: f64) -> f64 {
    let mut d0: f64 = 0.0;
    let mut d1: f64 = 0.0;
    for (a, b) in y.iter().zip(dy) {
        let sc = tol.atol + tol.rtol * a.norm();
        d0 = d0.max(a.norm() / sc);
        d1 = d1.max(b.norm() / sc);
    }
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.min(span.max(f64::MIN_POSITIVE))
}
