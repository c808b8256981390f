//! Numerical L-values: L(1, chi_d), central values L(1/2, g x chi_d) of
//! quadratic twists of level-1 eigenforms, the half-integral weight
//! coefficient/central value ratio test, and L(1, Sym^2 g).

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::arith::{self, Sieve};
use crate::error::{Error, Result};
use crate::mf::half::{admissible_n, disc_of, HalfIntForm};
use crate::mf::trace::normalized_prime_eigenvalues;
use crate::numeric::{erfc, gamma_q_int_tail_integral, ln_gamma, vertical_nodes, KahanSum};
use crate::par::{self, Mode};

/// Default coefficient range for the built-in eigenforms.
pub const DEFAULT_MAX_N: u64 = 100_000;

/// Normalized Hecke eigenvalues lambda_g(n), n <= max_n, of a level-1 eigenform.
#[derive(Debug, Clone)]
pub struct EigenformL {
    pub label: String,
    /// Integral weight of g.
    pub weight: u32,
    sieve: Sieve,
    primes: Vec<u64>,
    lam: Vec<f64>,
}

/// lambda(p^e) for e = 0..=emax from lambda(p), via the Hecke recursion.
pub fn prime_power_lambdas(lp: f64, emax: usize) -> Vec<f64> {
    let mut v = vec![1.0, lp];
    while v.len() <= emax {
        let e = v.len();
        v.push(lp * v[e - 1] - v[e - 2]);
    }
    v.truncate(emax + 1);
    v
}

impl EigenformL {
    /// Builds lambda(n) multiplicatively from prime values (p ascending, covering all p <= max_n).
    pub fn from_prime_values(label: impl Into<String>, weight: u32, primes: &[(u64, f64)], max_n: u64) -> Result<Self> {
        let sieve = Sieve::new(max_n.max(2) as usize);
        let plist: Vec<u64> = sieve.primes_up_to(max_n).collect();
        if plist.len() > primes.len() || plist.iter().zip(primes).any(|(p, q)| *p != q.0) {
            return Err(Error::Invalid("prime eigenvalues do not cover every prime up to max_n".into()));
        }
        let mut lp = vec![0.0f64; max_n as usize + 1];
        for &(p, l) in primes.iter().take(plist.len()) {
            lp[p as usize] = l;
        }
        let mut lam = vec![0.0f64; max_n as usize + 1];
        if max_n >= 1 {
            lam[1] = 1.0;
        }
        for n in 2..=max_n as usize {
            let p = sieve.spf(n) as usize;
            let mut m = n;
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            let pe = n / m;
            let lpe = if m > 1 {
                lam[pe]
            } else if e == 1 {
                lp[p]
            } else {
                lp[p] * lam[pe / p] - lam[pe / p / p]
            };
            lam[n] = lpe * lam[m];
        }
        Ok(EigenformL { label: label.into(), weight, sieve, primes: plist, lam })
    }

    /// The normalized eigenform spanning S_k(SL_2(Z)) (dim 1), with lambda(n) for n <= max_n.
    pub fn level1(k: u32, max_n: u64, mode: Mode) -> Result<Self> {
        let pv = normalized_prime_eigenvalues(k, max_n.max(2), mode)?;
        Self::from_prime_values(format!("g{k}"), k, &pv, max_n)
    }

    pub fn max_n(&self) -> u64 {
        self.lam.len() as u64 - 1
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn lambda(&self, n: u64) -> f64 {
        self.lam[n as usize]
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lam
    }

    pub fn sieve(&self) -> &Sieve {
        &self.sieve
    }

    /// kappa with weight = 2 kappa.
    pub fn kappa(&self) -> u32 {
        self.weight / 2
    }
}

/// Memoized level-1 eigenform of weight k with at least `max_n` coefficients.
pub fn eigenform(k: u32, max_n: u64) -> Result<Arc<EigenformL>> {
    static MEMO: OnceLock<Mutex<HashMap<u32, Arc<EigenformL>>>> = OnceLock::new();
    let memo = MEMO.get_or_init(|| Mutex::new(HashMap::new()));
    let mut m = memo.lock().unwrap();
    if let Some(g) = m.get(&k) {
        if g.max_n() >= max_n {
            return Ok(g.clone());
        }
    }
    let g = Arc::new(EigenformL::level1(k, max_n, Mode::default())?);
    m.insert(k, g.clone());
    Ok(g)
}

pub fn g18() -> Result<Arc<EigenformL>> {
    eigenform(18, DEFAULT_MAX_N)
}

pub fn g22() -> Result<Arc<EigenformL>> {
    eigenform(22, DEFAULT_MAX_N)
}

pub fn delta() -> Result<Arc<EigenformL>> {
    eigenform(12, DEFAULT_MAX_N)
}

/// A numerical value with its error estimate and method tag.
#[derive(Debug, Clone, PartialEq)]
pub struct LValue {
    pub value: f64,
    pub est_error: f64,
    pub method: String,
}

fn check_negative_fundamental(d: i64) -> Result<()> {
    if d >= 0 || !arith::is_fundamental(d)? {
        return Err(Error::Invalid(format!("{d} is not a negative fundamental discriminant")));
    }
    Ok(())
}

/// L(1, chi_d) for fundamental d < 0 by the theta-function identity
/// L(1) = sum chi(n) [e^{-pi n^2/q}/n + (pi/sqrt q) erfc(n sqrt(pi/q))], q = |d|.
pub fn dirichlet_l1(d: i64) -> Result<LValue> {
    check_negative_fundamental(d)?;
    let q = d.unsigned_abs() as f64;
    let n_max = (q * 50.0 / PI).sqrt().ceil() as i64 + 1;
    let mut acc = KahanSum::new();
    for n in 1..=n_max {
        let chi = arith::kronecker(d, n);
        if chi == 0 {
            continue;
        }
        let nf = n as f64;
        acc.add(chi as f64 * ((-PI * nf * nf / q).exp() / nf + PI / q.sqrt() * erfc(nf * (PI / q).sqrt())));
    }
    let tail = 2.0 * (-PI * (n_max as f64).powi(2) / q).exp() * (1.0 + PI / q.sqrt());
    Ok(LValue {
        value: acc.value(),
        est_error: tail + 1e-15 * acc.value().abs(),
        method: format!("theta-identity,n<={n_max}"),
    })
}

/// h(d) recovered from L(1, chi_d) via the class number formula.
pub fn class_number_from_l1(d: i64, l1: f64) -> u64 {
    let w = match d {
        -3 => 6.0,
        -4 => 4.0,
        _ => 2.0,
    };
    (w * (d.unsigned_abs() as f64).sqrt() * l1 / (2.0 * PI)).round() as u64
}

/// How the weight W(xi) is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightMethod {
    /// sum_j lambda(2^j) eps^j 2^{-j/2} Q(kappa, 2 pi 2^j xi).
    Closed,
    /// Trapezoid rule on Re s = c, |Im s| <= 60, step 0.05.
    Contour { c: f64 },
}

/// Options for [`central_value_twist_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AfeOptions {
    pub method: WeightMethod,
    /// Tail tolerance used to choose the truncation.
    pub tail_tol: f64,
    /// Force a truncation point instead of choosing one.
    pub truncation: Option<u64>,
}

impl Default for AfeOptions {
    fn default() -> Self {
        AfeOptions { method: WeightMethod::Closed, tail_tol: 1e-10, truncation: None }
    }
}

/// 1/(1 - 2^{-1/2})^2, bounding sum_j |lambda(2^j)| 2^{-j/2}.
const C_W: f64 = 11.656_854_249_492_38;

/// Tail bound for the AFE sum beyond m = t, from |lambda(m)| <= 2 sqrt(m)
/// and |W(xi)| <= C_W Q(kappa, 2 pi xi).
pub fn afe_tail_bound(kappa: u32, absd: f64, t: f64) -> f64 {
    let y0 = 2.0 * PI * t / absd;
    4.0 * C_W * absd / (2.0 * PI) * gamma_q_int_tail_integral(kappa, y0)
}

/// Smallest truncation whose tail bound is below `tol`.
pub fn afe_truncation(kappa: u32, absd: f64, tol: f64) -> u64 {
    let mut y0 = 1.0;
    while afe_tail_bound(kappa, absd, y0 * absd / (2.0 * PI)) > tol {
        y0 += 0.25;
    }
    (y0 * absd / (2.0 * PI)).ceil() as u64
}

/// Closed-form weight W(xi) for the 2-part series with eps = chi_d(2).
pub fn weight_closed(kappa: u32, lam2: &[f64], eps: f64, xi: f64) -> f64 {
    let y = 2.0 * PI * xi;
    let mut e = (-y).exp();
    let mut yj = y;
    let mut scale = 1.0;
    let mut acc = 0.0;
    for &l in lam2 {
        if yj > 90.0 {
            break;
        }
        let mut term = 1.0;
        let mut poly = 1.0;
        for i in 1..kappa {
            term *= yj / i as f64;
            poly += term;
        }
        acc += l * scale * e * poly;
        yj *= 2.0;
        e *= e;
        scale *= eps * std::f64::consts::FRAC_1_SQRT_2;
    }
    acc
}

/// Node weights for W(xi) = Re sum_n w_n xi^{-s_n} on the line Re s = c.
pub fn weight_contour_nodes(kappa: u32, lam2_p: f64, eps: f64, c: f64) -> Vec<(Complex64, Complex64)> {
    let h = 0.05;
    let lg_k = ln_gamma(Complex64::new(kappa as f64, 0.0));
    vertical_nodes(c, 60.0, h)
        .into_iter()
        .map(|s| {
            let z = Complex64::new(2.0, 0.0).powc(-(s + 0.5));
            let l2 = 1.0 / (1.0 - eps * lam2_p * z + z * z);
            let g = (ln_gamma(s + kappa as f64) - lg_k).exp();
            let w = l2 * g * (Complex64::new(2.0 * PI, 0.0)).powc(-s) / s * (h / (2.0 * PI));
            (s, w)
        })
        .collect()
}

fn weight_contour(nodes: &[(Complex64, Complex64)], xi: f64) -> f64 {
    let lx = xi.ln();
    let mut acc = KahanSum::new();
    for (s, w) in nodes {
        acc.add((w * (-s * lx).exp()).re);
    }
    acc.value()
}

/// chi_d(m) for m <= t, built multiplicatively from prime values.
fn chi_table(d: i64, t: usize, sieve: &Sieve) -> Vec<i8> {
    let mut chi = vec![0i8; t + 1];
    if t >= 1 {
        chi[1] = 1;
    }
    for m in 2..=t {
        let p = sieve.spf(m) as usize;
        chi[m] = if p == m { arith::kronecker(d, m as i64) as i8 } else { chi[p] * chi[m / p] };
    }
    chi
}

/// L(1/2, g x chi_d) = 2 sum_{m odd} lambda(m) chi_d(m)/sqrt(m) W(m/|d|)
/// with eps = chi_d(2) in the 2-part of W. Needs d = 1 mod 4 with
/// sign(d) = (-1)^kappa so that the root number is +1.
pub fn central_value_twist(g: &EigenformL, d: i64) -> Result<LValue> {
    central_value_twist_with(g, d, AfeOptions::default())
}

pub fn central_value_twist_with(g: &EigenformL, d: i64, opts: AfeOptions) -> Result<LValue> {
    if !arith::is_fundamental(d)? || d.rem_euclid(4) != 1 {
        return Err(Error::Invalid(format!("{d} must be a fundamental discriminant = 1 mod 4")));
    }
    let kappa = g.kappa();
    if (d < 0) != (kappa % 2 == 1) {
        return Err(Error::Precondition(format!("sign of d = {d} gives root number -1 for weight {}", g.weight)));
    }
    let absd = d.unsigned_abs() as f64;
    let t = opts.truncation.unwrap_or_else(|| afe_truncation(kappa, absd, opts.tail_tol));
    if t > g.max_n() {
        return Err(Error::Truncation(format!(
            "|d| = {} needs lambda(m) for m <= {t}, only {} available",
            d.unsigned_abs(),
            g.max_n()
        )));
    }
    let eps = arith::kronecker(d, 2) as f64;
    let lam2 = prime_power_lambdas(g.lambda(2), 64);
    let nodes = match opts.method {
        WeightMethod::Closed => Vec::new(),
        WeightMethod::Contour { c } => weight_contour_nodes(kappa, g.lambda(2), eps, c),
    };
    let chi = chi_table(d, t as usize, g.sieve());
    let lam = g.lambdas();
    let mut acc = KahanSum::new();
    let mut abs_acc = 0.0;
    for m in (1..=t as usize).step_by(2) {
        if chi[m] == 0 || lam[m] == 0.0 {
            continue;
        }
        let xi = m as f64 / absd;
        let w = match opts.method {
            WeightMethod::Closed => weight_closed(kappa, &lam2, eps, xi),
            WeightMethod::Contour { .. } => weight_contour(&nodes, xi),
        };
        let term = lam[m] * chi[m] as f64 / (m as f64).sqrt() * w;
        acc.add(term);
        abs_acc += term.abs();
    }
    let value = 2.0 * acc.value();
    let est_error = afe_tail_bound(kappa, absd, t as f64) + 1e-15 * abs_acc * 2.0;
    let tag = match opts.method {
        WeightMethod::Closed => "closed".to_string(),
        WeightMethod::Contour { c } => format!("contour(c={c},T=60,h=0.05)"),
    };
    Ok(LValue { value, est_error, method: format!("afe[{tag}],m<={t}") })
}

/// Central values for a batch of discriminants, in input order.
pub fn central_values(g: &EigenformL, ds: &[i64], mode: Mode) -> Vec<Result<LValue>> {
    par::map(mode, ds, |&d| central_value_twist(g, d))
}

/// | |c(f,n1)|^2 L(1/2, g x chi_{d2}) / (|c(f,n2)|^2 L(1/2, g x chi_{d1})) - 1 |.
pub fn waldspurger_ratio_check(f: &HalfIntForm, g: &EigenformL, n1: u64, n2: u64) -> Result<f64> {
    for n in [n1, n2] {
        if !admissible_n(f.kappa, n) {
            return Err(Error::Invalid(format!("n = {n} is not odd squarefree with (-1)^kappa n = 1 mod 4")));
        }
    }
    if n1 == n2 {
        return Ok(0.0);
    }
    let (c1, c2) = (f.c(n1)?, f.c(n2)?);
    if c1 == 0.0 || c2 == 0.0 {
        return Err(Error::Precondition(format!("c(f, n) vanishes for n in {{{n1}, {n2}}}")));
    }
    let l1 = central_value_twist(g, disc_of(f.kappa, n1))?;
    let l2 = central_value_twist(g, disc_of(f.kappa, n2))?;
    for l in [&l1, &l2] {
        if l.value.abs() <= 10.0 * l.est_error {
            return Err(Error::Precondition("central value vanishes within its error".into()));
        }
    }
    Ok((c1 * c1 * l2.value / (c2 * c2 * l1.value) - 1.0).abs())
}

/// L(1, Sym^2 g) as the Euler product over p <= p0. The error estimate is
/// twice the change from p0/2 to p0.
pub fn sym2_l_at_1(g: &EigenformL, p0: u64) -> Result<LValue> {
    if p0 > g.max_n() {
        return Err(Error::Range { need: p0, have: g.max_n() });
    }
    let log_at = |x: u64| -> f64 {
        let mut acc = KahanSum::new();
        for &p in g.primes().iter().take_while(|&&p| p <= x) {
            let l = g.lambda(p);
            let x = 1.0 / p as f64;
            // (1 - a^2 x)(1 - x)(1 - a^{-2} x) with a + 1/a = l
            let f = (1.0 - (l * l - 2.0) * x + x * x) * (1.0 - x);
            acc.add(-f.ln());
        }
        acc.value()
    };
    let full = log_at(p0).exp();
    let half = log_at(p0 / 2).exp();
    Ok(LValue { value: full, est_error: 2.0 * (full - half).abs(), method: format!("euler,p<={p0}") })
}

/// Coefficients b(n) of L(s, Sym^2 g) = zeta(2s) sum lambda(n^2) n^{-s}, n <= x.
fn sym2_coeffs(g: &EigenformL, x: usize) -> Vec<f64> {
    let sieve = Sieve::new(x.max(2));
    let mut b = vec![0.0; x + 1];
    b[1] = 1.0;
    let mut local: HashMap<usize, Vec<f64>> = HashMap::new();
    for n in 2..=x {
        let p = sieve.spf(n) as usize;
        let mut m = n;
        let mut e = 0usize;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        let loc = local.entry(p).or_insert_with(|| {
            let mut emax = 1;
            let mut pe = p;
            while pe <= x / p {
                pe *= p;
                emax += 1;
            }
            let lpp = prime_power_lambdas(g.lambda(p as u64), 2 * emax);
            (0..=emax).map(|e| (0..=e / 2).map(|i| lpp[2 * (e - 2 * i)]).sum()).collect()
        });
        b[n] = loc[e] * b[m];
    }
    b
}

/// L(1, Sym^2 g) by a smoothed approximate functional equation with gamma
/// factor Gamma_R(s+1) Gamma_C(s+k-1), conductor 1, no extra smoothing
/// (G = 1); the gamma factor alone makes V(n) decay quickly.
pub fn sym2_l_at_1_afe(g: &EigenformL) -> Result<LValue> {
    let k = g.weight as f64;
    let ln_gr = |s: Complex64| -(s / 2.0) * PI.ln() + ln_gamma(s / 2.0);
    let ln_gc = |s: Complex64| Complex64::new(2.0f64.ln(), 0.0) - s * (2.0 * PI).ln() + ln_gamma(s);
    let ln_gamma_factor = |s: Complex64| ln_gr(s + 1.0) + ln_gc(s + k - 1.0);
    let h = 0.05;
    let nodes = vertical_nodes(2.0, 80.0, h);
    let weights = |s0: f64| -> Vec<(Complex64, Complex64)> {
        let base = ln_gamma_factor(Complex64::new(s0, 0.0));
        nodes.iter().map(|&w| (w, (ln_gamma_factor(w + s0) - base).exp() / w * (h / (2.0 * PI)))).collect()
    };
    let v = |ws: &[(Complex64, Complex64)], n: f64| -> f64 {
        let ln = n.ln();
        ws.iter().map(|(w, c)| (c * (-w * ln).exp()).re).sum()
    };
    let w1 = weights(1.0);
    let w0 = weights(0.0);
    let ratio = (ln_gamma_factor(Complex64::new(0.0, 0.0)) - ln_gamma_factor(Complex64::new(1.0, 0.0))).re.exp();
    let mut n_max = 16usize;
    while v(&w0, n_max as f64).abs() > 1e-13 || v(&w1, n_max as f64).abs() > 1e-13 {
        n_max *= 2;
        if n_max as u64 > g.max_n() {
            return Err(Error::Truncation(format!("Sym^2 AFE needs more than {} coefficients", g.max_n())));
        }
    }
    let n_max = 4 * n_max;
    if n_max as u64 > g.max_n() {
        return Err(Error::Truncation(format!("Sym^2 AFE needs {n_max} coefficients")));
    }
    let b = sym2_coeffs(g, n_max);
    let mut acc = KahanSum::new();
    for (n, &bn) in b.iter().enumerate().skip(1) {
        let nf = n as f64;
        acc.add(bn / nf * v(&w1, nf) + ratio * bn * v(&w0, nf));
    }
    Ok(LValue { value: acc.value(), est_error: 1e-9, method: format!("sym2-afe(c=2,T=80,h=0.05),n<={n_max}") })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classgroup::class_group;
    use crate::mf::qexp::{delta_qexp, eisenstein_qexp};

    #[test]
    fn l1_values() {
        assert!((dirichlet_l1(-4).unwrap().value - PI / 4.0).abs() < 1e-10);
        assert!((dirichlet_l1(-23).unwrap().value - 3.0 * PI / 23f64.sqrt()).abs() < 1e-10);
        assert!(dirichlet_l1(-12).is_err());
        // L(1, chi_d) = -pi/|d|^{3/2} sum_{a<|d|} a chi(a) for d < -4
        for d in [-7i64, -8, -31, -40, -163, -1155] {
            let q = -d;
            let s: i64 = (1..q).map(|a| a * arith::kronecker(d, a) as i64).sum();
            let oracle = -PI * s as f64 / (q as f64).powf(1.5);
            assert!((dirichlet_l1(d).unwrap().value - oracle).abs() < 1e-10, "d={d}");
        }
    }

    #[test]
    fn class_number_formula_round_trip() {
        let mut count = 0;
        let mut d = -3i64;
        while count < 50 {
            if arith::is_fundamental(d).unwrap() {
                let h = class_group(d).unwrap().h() as u64;
                assert_eq!(class_number_from_l1(d, dirichlet_l1(d).unwrap().value), h, "d={d}");
                count += 1;
            }
            d -= 97;
        }
    }

    #[test]
    fn eigenvalues_match_qexpansion() {
        let g = EigenformL::level1(18, 2000, Mode::Sequential).unwrap();
        let x = 300;
        let q = eisenstein_qexp(6, x).mul(&delta_qexp(x));
        for n in 1..=x as u64 {
            let a: f64 = num_traits::ToPrimitive::to_f64(&q.coeffs[n as usize]).unwrap();
            let l = a / (n as f64).powf(8.5);
            assert!((g.lambda(n) - l).abs() < 1e-9 * l.abs().max(1.0), "n={n}");
        }
    }

    #[test]
    fn closed_weight_matches_contours() {
        let g = EigenformL::level1(18, 200, Mode::Sequential).unwrap();
        let lam2 = prime_power_lambdas(g.lambda(2), 64);
        for eps in [1.0, -1.0] {
            let n1 = weight_contour_nodes(9, g.lambda(2), eps, 1.0);
            let n2 = weight_contour_nodes(9, g.lambda(2), eps, 1.5);
            for xi in [0.01, 0.1, 0.5, 1.0, 3.0] {
                let a = weight_closed(9, &lam2, eps, xi);
                assert!((a - weight_contour(&n1, xi)).abs() < 1e-10, "xi={xi}");
                assert!((a - weight_contour(&n2, xi)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn central_value_methods_agree() {
        let g = eigenform(18, 20_000).unwrap();
        for d in [-3i64, -7, -23, -71, -211] {
            let a = central_value_twist(&g, d).unwrap();
            let b = central_value_twist_with(
                &g,
                d,
                AfeOptions { method: WeightMethod::Contour { c: 1.0 }, ..Default::default() },
            )
            .unwrap();
            let c = central_value_twist_with(
                &g,
                d,
                AfeOptions { method: WeightMethod::Contour { c: 1.5 }, ..Default::default() },
            )
            .unwrap();
            assert!((a.value - b.value).abs() < 1e-6 && (b.value - c.value).abs() < 1e-6, "d={d}");
            let t = afe_truncation(9, d.unsigned_abs() as f64, 1e-10);
            let doubled =
                central_value_twist_with(&g, d, AfeOptions { truncation: Some(2 * t), ..Default::default() }).unwrap();
            assert!((doubled.value - a.value).abs() <= a.est_error + 1e-14);
            assert!(a.value >= -1e-6);
        }
        assert!(central_value_twist(&g, 5).is_err());
        assert!(central_value_twist(&g, -4).is_err());
    }

    #[test]
    fn sym2_two_methods() {
        let g = eigenform(18, 200_000).unwrap();
        let e = sym2_l_at_1(&g, 100_000).unwrap();
        let a = sym2_l_at_1_afe(&g).unwrap();
        assert!(e.value > 0.0 && a.value > 0.0);
        assert!(((e.value - a.value) / a.value).abs() < 1e-3, "{e:?} {a:?}");
        let e2 = sym2_l_at_1(&g, 200_000).unwrap();
        assert!((e2.value - e.value).abs() <= e.est_error.max(1e-3 * a.value));
    }
}
