//! Floating-point helpers shared by the analytic modules: complex log-gamma,
//! incomplete gamma for integer order, adaptive Gauss-Kronrod quadrature,
//! trapezoid rule on vertical lines, compensated summation.

use num_complex::Complex64;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// log Gamma(z) for complex z away from the poles (Lanczos, g = 7).
/// The imaginary part is not reduced to a principal branch.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let s = (z * PI).sin();
        return Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma(Complex64::new(1.0, 0.0) - z);
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    Complex64::new(0.5 * (2.0 * PI).ln(), 0.0) + (z + 0.5) * t.ln() - t + x.ln()
}

/// log Gamma(x) for real x > 0.
pub fn ln_gamma_real(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// Regularised upper incomplete gamma Q(a, y) = Gamma(a, y)/Gamma(a) for a
/// positive integer a, via e^{-y} sum_{i<a} y^i / i!.
pub fn gamma_q_int(a: u32, y: f64) -> f64 {
    if y <= 0.0 {
        return 1.0;
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for i in 1..a {
        term *= y / i as f64;
        sum += term;
    }
    (-y).exp() * sum
}

/// int_y^inf Q(a, t) dt = a Q(a+1, y) - y Q(a, y).
pub fn gamma_q_int_tail_integral(a: u32, y: f64) -> f64 {
    (a as f64 * gamma_q_int(a + 1, y) - y * gamma_q_int(a, y)).max(0.0)
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    statrs::function::erf::erfc(x)
}

/// Neumaier compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = KahanSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Compensated sum of an iterator.
pub fn ksum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().collect::<KahanSum>().value()
}

const GK_XK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GK_WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * GK_WK[7];
    let mut rg = fc * GK_WG[3];
    for j in 0..7 {
        let x = h * GK_XK[j];
        let s = f(c - x) + f(c + x);
        rk += GK_WK[j] * s;
        if j % 2 == 1 {
            rg += GK_WG[j / 2] * s;
        }
    }
    (rk * h, ((rk - rg) * h).abs())
}

/// Adaptive Gauss-Kronrod (7, 15) quadrature on [a, b] to absolute
/// tolerance `tol`. Returns (value, error estimate).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let mut stack = vec![(a, b, tol)];
    let mut total = KahanSum::new();
    let mut err = 0.0;
    let mut evals = 0usize;
    while let Some((lo, hi, t)) = stack.pop() {
        let (v, e) = gk15(&f, lo, hi);
        evals += 1;
        if e <= t || hi - lo < 1e-12 * (b - a).abs().max(1.0) || evals > 200_000 {
            total.add(v);
            err += e;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, 0.5 * t));
            stack.push((lo, mid, 0.5 * t));
        }
    }
    (total.value(), err)
}

/// (1/2 pi i) int_{c - iT}^{c + iT} f(s) ds by the trapezoid rule with step h.
pub fn vertical_line_integral<F: Fn(Complex64) -> Complex64>(f: F, c: f64, t_max: f64, h: f64) -> Complex64 {
    let n = (t_max / h).ceil() as i64;
    let mut re = KahanSum::new();
    let mut im = KahanSum::new();
    for j in -n..=n {
        let v = f(Complex64::new(c, j as f64 * h));
        re.add(v.re);
        im.add(v.im);
    }
    Complex64::new(re.value(), im.value()) * (h / (2.0 * PI))
}

/// Nodes and weights of the vertical trapezoid rule, for integrands whose
/// expensive part is shared across many evaluations.
pub fn vertical_nodes(c: f64, t_max: f64, h: f64) -> Vec<Complex64> {
    let n = (t_max / h).ceil() as i64;
    (-n..=n).map(|j| Complex64::new(c, j as f64 * h)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_gamma_matches_factorials() {
        let mut fact = 1.0f64;
        for n in 1..20u32 {
            let v = ln_gamma(Complex64::new(n as f64 + 1.0, 0.0));
            fact *= n as f64;
            assert!((v.re - fact.ln()).abs() < 1e-12, "n={n}");
        }
        let half = ln_gamma(Complex64::new(0.5, 0.0));
        assert!((half.re - PI.sqrt().ln()).abs() < 1e-13);
    }

    #[test]
    fn ln_gamma_reflection_and_recurrence() {
        // Gamma(z+1) = z Gamma(z) on complex points, including large imaginary parts.
        for &(x, y) in &[(0.3, 2.0), (-2.7, 1.0), (4.0, 60.0), (1.5, -45.0)] {
            let z = Complex64::new(x, y);
            let lhs = (ln_gamma(z + 1.0) - ln_gamma(z) - z.ln()).exp();
            assert!((lhs - 1.0).norm() < 1e-11, "z={z}");
        }
        // |Gamma(1/2 + it)|^2 = pi / cosh(pi t)
        let t = 3.0;
        let v = ln_gamma(Complex64::new(0.5, t)).re * 2.0;
        assert!((v - (PI / (PI * t).cosh()).ln()).abs() < 1e-12);
    }

    #[test]
    fn incomplete_gamma_integer_order() {
        assert!((gamma_q_int(1, 2.0) - (-2.0f64).exp()).abs() < 1e-16);
        // Q(a, y) via numerical integration of the density
        let a = 5u32;
        let y = 3.0;
        let (v, _) = integrate(|t| (-t).exp() * t.powi(a as i32 - 1) / 24.0, y, 80.0, 1e-14);
        assert!((v - gamma_q_int(a, y)).abs() < 1e-12);
        let (tail, _) = integrate(|t| gamma_q_int(a, t), y, 120.0, 1e-13);
        assert!((tail - gamma_q_int_tail_integral(a, y)).abs() < 1e-11);
    }

    #[test]
    fn quadrature_polynomial_and_gaussian() {
        let (v, _) = integrate(|x| x * x * x - x, -1.0, 2.0, 1e-13);
        assert!((v - (15.0 / 4.0 - 1.5)).abs() < 1e-13);
        let (g, _) = integrate(|x| (-x * x).exp(), -12.0, 12.0, 1e-14);
        assert!((g - PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn vertical_integral_inverts_mellin_of_exp() {
        // (1/2 pi i) int Gamma(s) x^{-s} ds = e^{-x}
        let x = 0.7f64;
        let v = vertical_line_integral(|s| (ln_gamma(s) - s * x.ln()).exp(), 1.0, 60.0, 0.05);
        assert!((v.re - (-x).exp()).abs() < 1e-12);
        assert!(v.im.abs() < 1e-12);
    }

    #[test]
    fn kahan_beats_naive_on_cancellation() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(ksum(xs), 2.0);
    }
}
