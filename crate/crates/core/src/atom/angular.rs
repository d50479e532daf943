//! Angular-momentum coupling coefficients.
//!
//! All angular momenta are passed doubled (`two_j = 2j`) so half-integers
//! stay exact.

const FACT_MAX: usize = 171;

fn factorial(n: i32) -> f64 {
    debug_assert!(n >= 0 && (n as usize) < FACT_MAX);
    thread_local! {
        static TABLE: [f64; FACT_MAX] = {
            let mut t = [1.0; FACT_MAX];
            for i in 1..FACT_MAX {
                t[i] = t[i - 1] * i as f64;
            }
            t
        };
    }
    TABLE.with(|t| t[n as usize])
}

fn triangle_ok(two_a: i32, two_b: i32, two_c: i32) -> bool {
    two_c >= (two_a - two_b).abs() && two_c <= two_a + two_b && (two_a + two_b + two_c) % 2 == 0
}

/// Wigner 3j symbol (j1 j2 j3; m1 m2 m3) by the Racah formula.
pub fn wigner_3j(two_j1: i32, two_j2: i32, two_j3: i32, two_m1: i32, two_m2: i32, two_m3: i32) -> f64 {
    if two_m1 + two_m2 + two_m3 != 0 {
        return 0.0;
    }
    if !triangle_ok(two_j1, two_j2, two_j3) {
        return 0.0;
    }
    if two_m1.abs() > two_j1 || two_m2.abs() > two_j2 || two_m3.abs() > two_j3 {
        return 0.0;
    }
    if (two_j1 + two_m1) % 2 != 0 || (two_j2 + two_m2) % 2 != 0 || (two_j3 + two_m3) % 2 != 0 {
        return 0.0;
    }
    // integer arguments of the factorials
    let j1pj2mj3 = (two_j1 + two_j2 - two_j3) / 2;
    let j1mj2pj3 = (two_j1 - two_j2 + two_j3) / 2;
    let mj1pj2pj3 = (-two_j1 + two_j2 + two_j3) / 2;
    let jsum = (two_j1 + two_j2 + two_j3) / 2;
    let delta = factorial(j1pj2mj3) * factorial(j1mj2pj3) * factorial(mj1pj2pj3) / factorial(jsum + 1);

    let j1pm1 = (two_j1 + two_m1) / 2;
    let j1mm1 = (two_j1 - two_m1) / 2;
    let j2pm2 = (two_j2 + two_m2) / 2;
    let j2mm2 = (two_j2 - two_m2) / 2;
    let j3pm3 = (two_j3 + two_m3) / 2;
    let j3mm3 = (two_j3 - two_m3) / 2;
    let norm = (factorial(j1pm1)
        * factorial(j1mm1)
        * factorial(j2pm2)
        * factorial(j2mm2)
        * factorial(j3pm3)
        * factorial(j3mm3))
    .sqrt();

    // k ranges where every factorial argument is non-negative
    let a1 = (two_j3 - two_j2 + two_m1) / 2;
    let a2 = (two_j3 - two_j1 - two_m2) / 2;
    let kmin = 0.max(-a1).max(-a2);
    let kmax = j1pj2mj3.min(j1mm1).min(j2pm2);
    let mut sum = 0.0;
    for k in kmin..=kmax {
        let denom = factorial(k)
            * factorial(a1 + k)
            * factorial(a2 + k)
            * factorial(j1pj2mj3 - k)
            * factorial(j1mm1 - k)
            * factorial(j2pm2 - k);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign / denom;
    }
    let phase_exp = (two_j1 - two_j2 - two_m3) / 2;
    let phase = if phase_exp.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    phase * delta.sqrt() * norm * sum
}

/// Clebsch-Gordan coefficient <j1 m1; j2 m2 | J M>.
pub fn clebsch_gordan(two_j1: i32, two_m1: i32, two_j2: i32, two_m2: i32, two_j: i32, two_m: i32) -> f64 {
    let phase_exp = (two_j1 - two_j2 + two_m) / 2;
    let phase = if phase_exp.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    phase * ((two_j + 1) as f64).sqrt() * wigner_3j(two_j1, two_j2, two_j, two_m1, two_m2, -two_m)
}

/// Reduced angular factor <l' m'| C^1_q |l m> of the unit-vector spherical
/// component, Condon-Shortley phases. Integer `l`, `m`.
pub fn c1_element(lp: i32, mp: i32, q: i32, l: i32, m: i32) -> f64 {
    let phase = if mp.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    phase
        * (((2 * l + 1) * (2 * lp + 1)) as f64).sqrt()
        * wigner_3j(2 * lp, 2, 2 * l, -2 * mp, 2 * q, 2 * m)
        * wigner_3j(2 * lp, 2, 2 * l, 0, 0, 0)
}
