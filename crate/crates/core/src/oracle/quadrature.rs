/// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        kron += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Adaptive Gauss-Kronrod quadrature of `f` over `[a, b]` to the given
/// absolute tolerance.
pub fn adaptive_gauss_kronrod<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> f64 {
    let mut stack = vec![(a, b, abs_tol)];
    let mut total = 0.0;
    let mut depth_guard = 0usize;
    while let Some((lo, hi, tol)) = stack.pop() {
        let (val, err) = gk15(&f, lo, hi);
        depth_guard += 1;
        if err <= tol || depth_guard > 200_000 || (hi - lo) < 1e-12 * (b - a).abs() {
            total += val;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, 0.5 * tol));
            stack.push((mid, hi, 0.5 * tol));
        }
    }
    total
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Normalised hydrogen radial function R_nl(r) (atomic units), evaluated
/// from the generalised Laguerre recurrence.
pub fn hydrogen_radial(n: u32, l: u32, r: f64) -> f64 {
    let nf = n as f64;
    let x = 2.0 * r / nf;
    let alpha = (2 * l + 1) as f64;
    let k = n - l - 1;
    let mut lag_prev = 1.0;
    let mut lag = 1.0 + alpha - x;
    let poly = if k == 0 {
        1.0
    } else {
        for i in 1..k {
            let i = i as f64;
            let next = ((2.0 * i + 1.0 + alpha - x) * lag - (i + alpha) * lag_prev) / (i + 1.0);
            lag_prev = lag;
            lag = next;
        }
        lag
    };
    let ln_norm = 1.5 * (2.0 / nf).ln() + 0.5 * (ln_factorial(n - l - 1) - (2.0 * nf).ln() - ln_factorial(n + l));
    ln_norm.exp() * x.powi(l as i32) * (-r / nf).exp() * poly
}

/// <n l | r | n' l'> by brute-force quadrature.
pub fn radial_integral_quadrature(n: u32, l: u32, np: u32, lp: u32) -> f64 {
    let r_max = 60.0 * n.max(np) as f64;
    let f = |r: f64| hydrogen_radial(n, l, r) * hydrogen_radial(np, lp, r) * r * r * r;
    // panels first so the adaptive splitter sees every oscillation
    let panels = 16 * (n + np) as usize;
    let width = r_max / panels as f64;
    (0..panels)
        .map(|i| adaptive_gauss_kronrod(f, i as f64 * width, (i + 1) as f64 * width, 1e-15))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radial_functions_normalised() {
        for (n, l) in [(1, 0), (2, 1), (4, 2), (8, 7), (8, 0)] {
            let norm = adaptive_gauss_kronrod(
                |r| hydrogen_radial(n, l, r).powi(2) * r * r,
                0.0,
                60.0 * n as f64,
                1e-14,
            );
            assert!((norm - 1.0).abs() < 1e-10, "n={n} l={l} norm={norm}");
        }
    }

    #[test]
    fn gauss_kronrod_polynomial_exact() {
        let v = adaptive_gauss_kronrod(|x| x.powi(5) - 3.0 * x, 0.0, 2.0, 1e-14);
        assert!((v - (64.0 / 6.0 - 6.0)).abs() < 1e-13);
    }
}
