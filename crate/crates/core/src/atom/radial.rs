//! Hydrogenic radial dipole integrals <n l | r | n' l'> in units of a0.
//!
//! The general case uses Gordon's closed form, a difference of two
//! terminating Gauss hypergeometric series. The rational part is evaluated
//! exactly with big rationals; only the final square-root normalisation is
//! done in floating point. Radial functions follow the usual sign
//! convention (positive near the origin).

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

type Q = BigRational;

fn q(v: i64) -> Q {
    Q::from_integer(v.into())
}

fn factorial_q(n: u32) -> Q {
    let mut acc = Q::one();
    for i in 2..=n as i64 {
        acc *= q(i);
    }
    acc
}

fn pow_q(base: &Q, exp: i64) -> Q {
    if exp >= 0 {
        num_traits::pow(base.clone(), exp as usize)
    } else {
        num_traits::pow(base.recip(), (-exp) as usize)
    }
}

/// Terminating 2F1(-a, -b; c; x) with non-negative integers a, b.
fn hyp2f1_terminating(a: u32, b: u32, c: u32, x: &Q) -> Q {
    let mut term = Q::one();
    let mut sum = Q::one();
    let kmax = a.min(b);
    for k in 0..kmax {
        let k = k as i64;
        // (−a)_k+1/(−a)_k = (k − a), etc.
        term = term * q(k - a as i64) * q(k - b as i64) / (q(c as i64 + k) * q(k + 1)) * x;
        sum += &term;
    }
    sum
}

/// <n l | r | n' l-1> for l >= 1 using Gordon's formula.
fn gordon_down(n: u32, l: u32, np: u32) -> f64 {
    if n == np {
        // degenerate limit of the same formula
        let nf = n as f64;
        let lf = l as f64;
        return -1.5 * nf * (nf * nf - lf * lf).sqrt();
    }
    let (ni, npi, li) = (n as i64, np as i64, l as i64);
    let nr = n - l - 1;
    let nrp = np - l;
    let diff = q(ni - npi);
    let sum = q(ni + npi);
    let x = -q(4 * ni * npi) / (&diff * &diff);
    let f1 = hyp2f1_terminating(nr, nrp, 2 * l, &x);
    let f2 = hyp2f1_terminating(nr + 2, nrp, 2 * l, &x);
    let ratio = &diff / &sum;
    let bracket = f1 - &ratio * &ratio * f2;
    let rational = pow_q(&q(4 * ni * npi), li + 1) * pow_q(&diff, ni + npi - 2 * li - 2)
        / pow_q(&sum, ni + npi)
        * bracket
        / (q(4) * factorial_q(2 * l - 1));
    let root = (factorial_q(n + l) * factorial_q(np + l - 1)
        / (factorial_q(n - l - 1) * factorial_q(np - l)))
    .to_f64()
    .expect("finite factorial ratio")
    .sqrt();
    let sign = if (np - l) % 2 == 0 { 1.0 } else { -1.0 };
    let magnitude = rational.abs().to_f64().expect("finite rational");
    let rsign = if rational.is_negative() {
        -1.0
    } else if rational.is_zero() {
        0.0
    } else {
        1.0
    };
    sign * rsign * magnitude * root
}

/// Radial integral <n l | r | n' l'> (units of a0). Requires |l - l'| = 1.
pub fn radial_integral(n: u32, l: u32, np: u32, lp: u32) -> Result<f64> {
    if n == 0 || np == 0 || l >= n || lp >= np {
        return Err(Error::Domain(format!(
            "invalid hydrogen states (n={n}, l={l}), (n'={np}, l'={lp})"
        )));
    }
    if l.abs_diff(lp) != 1 {
        return Err(Error::Domain(format!(
            "radial dipole integral needs |l - l'| = 1, got l={l}, l'={lp}"
        )));
    }
    Ok(if lp + 1 == l {
        gordon_down(n, l, np)
    } else {
        gordon_down(np, lp, n)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_s_two_p() {
        let r = radial_integral(1, 0, 2, 1).unwrap();
        assert!((r - 128.0 * 6f64.sqrt() / 243.0).abs() < 1e-14);
    }

    #[test]
    fn two_s_two_p_is_minus_three_root_three() {
        let r = radial_integral(2, 0, 2, 1).unwrap();
        assert!((r + 3.0 * 3f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn symmetric_in_arguments() {
        for (n, l, np, lp) in [(3, 2, 4, 1), (5, 0, 2, 1), (7, 3, 6, 4)] {
            let a = radial_integral(n, l, np, lp).unwrap();
            let b = radial_integral(np, lp, n, l).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn selection_rule_errors() {
        assert!(matches!(radial_integral(2, 1, 2, 1), Err(Error::Domain(_))));
        assert!(matches!(radial_integral(3, 2, 3, 0), Err(Error::Domain(_))));
        assert!(radial_integral(2, 2, 3, 1).is_err());
    }

    #[test]
    fn same_n_is_nonzero() {
        assert!(radial_integral(3, 0, 3, 1).unwrap().abs() > 1.0);
    }
}
