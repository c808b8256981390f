//! Resonator coefficients, the discriminant family D_{N,eta}, the Euler
//! product G(2s+1; u), and the twisted first moment of central values with
//! its predicted main term.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::arith;
use crate::error::{invalid, Error, Result};
use crate::lfun::{self, prime_power_lambdas, EigenformL};
use crate::numeric::{integrate, KahanSum};
use crate::par::{self, Mode};

/// Resonator R(d) = sum_{m <= M} r(m) lambda_0(m) chi_d(m).
#[derive(Debug, Clone)]
pub struct ResonatorParams {
    pub x: f64,
    pub m: f64,
    pub l: f64,
    pub n_level: u64,
    /// True when L or M was set by hand rather than derived from X.
    pub overridden: bool,
    lambda0: Arc<EigenformL>,
    window: Vec<u64>,
    terms: Vec<(u64, f64)>,
}

/// L = (1/8) sqrt(log M log log M), taken as 0 when log log M <= 0.
pub fn default_l(m: f64) -> f64 {
    let lm = m.ln();
    if lm <= 1.0 {
        return 0.0;
    }
    0.125 * (lm * lm.ln()).sqrt()
}

impl ResonatorParams {
    /// M = X^{1/24}, L from M, level N, eigenvalues of `lambda0`.
    pub fn new(x: f64, n_level: u64, lambda0: Arc<EigenformL>) -> Result<Self> {
        let m = x.powf(1.0 / 24.0);
        Self::build(x, m, default_l(m), n_level, lambda0, false)
    }

    /// Same family scale with L (and optionally M) set directly.
    pub fn with_overrides(x: f64, n_level: u64, lambda0: Arc<EigenformL>, l: f64, m: Option<f64>) -> Result<Self> {
        let m = m.unwrap_or_else(|| x.powf(1.0 / 24.0));
        Self::build(x, m, l, n_level, lambda0, true)
    }

    fn build(x: f64, m: f64, l: f64, n_level: u64, lambda0: Arc<EigenformL>, overridden: bool) -> Result<Self> {
        if !(x >= 1.0) || !(m >= 1.0) || !(l >= 0.0) || n_level == 0 {
            return invalid("resonator needs X >= 1, M >= 1, L >= 0, N >= 1");
        }
        let (lo, hi) = (l * l, l.powi(4));
        let window: Vec<u64> = if l > 0.0 {
            if hi > lambda0.max_n() as f64 {
                return Err(Error::Range { need: hi.floor() as u64, have: lambda0.max_n() });
            }
            lambda0
                .primes()
                .iter()
                .copied()
                .filter(|&p| p as f64 >= lo && p as f64 <= hi && !n_level.is_multiple_of(p))
                .collect()
        } else {
            Vec::new()
        };
        let mut p = ResonatorParams { x, m, l, n_level, overridden, lambda0, window, terms: Vec::new() };
        p.terms = p.enumerate_terms()?;
        Ok(p)
    }

    /// r(p) = L / (sqrt(p) log p) on the window, else 0.
    pub fn r_prime(&self, p: u64) -> f64 {
        if self.window.binary_search(&p).is_ok() {
            self.l / ((p as f64).sqrt() * (p as f64).ln())
        } else {
            0.0
        }
    }

    /// r(m) for any m >= 1, by multiplicativity on squarefree m.
    pub fn r(&self, m: u64) -> f64 {
        if m == 1 {
            return 1.0;
        }
        match arith::factorize(m) {
            Ok(f) if f.is_squarefree() => f.primes().map(|p| self.r_prime(p)).product(),
            _ => 0.0,
        }
    }

    pub fn window(&self) -> &[u64] {
        &self.window
    }

    /// The nonzero terms (m, r(m) lambda_0(m)) with m <= M, m ascending.
    pub fn terms(&self) -> &[(u64, f64)] {
        &self.terms
    }

    fn enumerate_terms(&self) -> Result<Vec<(u64, f64)>> {
        let mmax = self.m.floor() as u64;
        if mmax > self.lambda0.max_n() && !self.window.is_empty() && self.window[0] <= mmax {
            return Err(Error::Range { need: mmax, have: self.lambda0.max_n() });
        }
        let mut out = vec![(1u64, 1.0f64)];
        // depth-first over increasing prime lists
        let mut stack: Vec<(usize, u64, f64)> = vec![(0, 1, 1.0)];
        while let Some((start, m, v)) = stack.pop() {
            for (i, &p) in self.window.iter().enumerate().skip(start) {
                let Some(mp) = m.checked_mul(p).filter(|&mp| mp <= mmax) else { break };
                let w = v * self.r_prime(p) * self.lambda0.lambda(p);
                out.push((mp, w));
                stack.push((i + 1, mp, w));
            }
        }
        out.sort_by_key(|t| t.0);
        Ok(out)
    }

    pub fn lambda0(&self) -> &EigenformL {
        &self.lambda0
    }
}

/// R(d), summed in ascending m.
pub fn resonator_value(params: &ResonatorParams, d: i64) -> f64 {
    let mut acc = KahanSum::new();
    for &(m, w) in params.terms() {
        acc.add(w * arith::kronecker(d, m as i64) as f64);
    }
    acc.value()
}

/// The product over the window of 1 + r(p)^2 lambda_0(p)^2.
pub fn cal_r(params: &ResonatorParams) -> f64 {
    let mut acc = KahanSum::new();
    for &p in params.window() {
        let r = params.r_prime(p);
        let l = params.lambda0.lambda(p);
        acc.add((r * r * l * l).ln_1p());
    }
    acc.value().exp()
}

/// Discriminants d = (-1)^k n with n odd squarefree, (n, N) = 1 and
/// d = eta mod 4N.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilyD {
    pub n_level: u64,
    pub eta: i64,
    pub k: u32,
}

impl FamilyD {
    pub fn new(n_level: u64, eta: i64, k: u32) -> Result<Self> {
        let q = 4 * n_level as i64;
        if n_level == 0 || eta.rem_euclid(4) != 1 || arith::gcd(eta, q) != 1 {
            return invalid(format!("eta = {eta} is not a unit mod {q} congruent to 1 mod 4"));
        }
        Ok(FamilyD { n_level, eta: eta.rem_euclid(q), k })
    }

    pub fn contains(&self, d: i64) -> bool {
        let n = d.unsigned_abs();
        let sign_ok = if self.k.is_multiple_of(2) { d > 0 } else { d < 0 };
        sign_ok
            && n % 2 == 1
            && arith::is_squarefree(n)
            && num_integer::gcd(n, self.n_level) == 1
            && d.rem_euclid(4 * self.n_level as i64) == self.eta
    }

    /// Members with lo <= |d| <= hi, ascending in |d|.
    pub fn members_in(&self, lo: u64, hi: u64) -> Vec<i64> {
        let sign = if self.k.is_multiple_of(2) { 1 } else { -1 };
        (lo.max(1)..=hi).map(|n| sign * n as i64).filter(|&d| self.contains(d)).collect()
    }

    /// Members with X <= |d| <= 2X.
    pub fn members(&self, x: u64) -> Vec<i64> {
        self.members_in(x, 2 * x)
    }
}

fn psi(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

fn smooth_step(t: f64) -> f64 {
    let a = psi(t);
    let b = psi(1.0 - t);
    if a + b == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

/// Smooth bump equal to 1 on [1.1, 1.9] and supported in [1, 2].
pub fn bump(xi: f64) -> f64 {
    if xi <= 1.0 || xi >= 2.0 {
        return 0.0;
    }
    smooth_step((xi - 1.0) / 0.1) * smooth_step((2.0 - xi) / 0.1)
}

/// int_0^inf Phi for Phi supported in [1/2, 5/2].
pub fn phi_integral(phi: &dyn Fn(f64) -> f64) -> f64 {
    let mut total = 0.0;
    // split at the kinks of the default bump so the quadrature sees smooth pieces
    let cuts = [0.5, 1.0, 1.1, 1.9, 2.0, 2.5];
    for w in cuts.windows(2) {
        total += integrate(phi, w[0], w[1], 1e-12).0;
    }
    total
}

/// Which of the four local cases a prime falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalCase {
    /// p | 2N
    Ramified,
    /// p | u_1
    U1,
    /// p | u_2, p not dividing u_1
    U2,
    Generic,
}

/// u = u_1 u_2^2 with u_1 squarefree.
pub fn split_u(u: u64) -> Result<(u64, u64)> {
    let f = arith::factorize(u)?;
    let (mut u1, mut u2) = (1u64, 1u64);
    for &(p, e) in &f.pairs {
        if e % 2 == 1 {
            u1 *= p;
        }
        u2 *= p.pow(e / 2);
    }
    Ok((u1, u2))
}

pub fn local_case(p: u64, u: u64, n_level: u64) -> LocalCase {
    if p == 2 || n_level.is_multiple_of(p) {
        return LocalCase::Ramified;
    }
    if !u.is_multiple_of(p) {
        return LocalCase::Generic;
    }
    let mut e = 0;
    let mut v = u;
    while v.is_multiple_of(p) {
        v /= p;
        e += 1;
    }
    if e % 2 == 1 {
        LocalCase::U1
    } else {
        LocalCase::U2
    }
}

/// G_p(2s+1; u) with lambda_g(p) = lp, x = p^{-(2s+1)}.
pub fn euler_g_local(case: LocalCase, p: u64, lp: f64, s: f64) -> f64 {
    let pf = p as f64;
    let x = pf.powf(-(2.0 * s + 1.0));
    // (1 - alpha^2 x)(1 - beta^2 x) with alpha beta = 1, alpha + beta = lp
    let ab = 1.0 - (lp * lp - 2.0) * x + x * x;
    match case {
        LocalCase::Ramified => ab * (1.0 - x),
        LocalCase::U1 => (1.0 - 1.0 / pf) * (1.0 - x),
        LocalCase::U2 => (1.0 - 1.0 / pf) * (1.0 - x * x),
        LocalCase::Generic => (1.0 - 1.0 / pf) * (1.0 - x) * (1.0 + ab / pf + x),
    }
}

/// G(2s+1; u) as the product over p <= p0 (needs p0 <= max_n of g).
pub fn euler_g(g: &EigenformL, s: f64, u: u64, n_level: u64, p0: u64) -> Result<f64> {
    if s <= -0.25 {
        return invalid("G(2s+1; u) needs s > -1/4");
    }
    if u == 0 || u.is_multiple_of(2) || num_integer::gcd(u, n_level) != 1 {
        return invalid(format!("u = {u} must be odd and coprime to N"));
    }
    if p0 > g.max_n() {
        return Err(Error::Range { need: p0, have: g.max_n() });
    }
    let mut acc = KahanSum::new();
    for &p in g.primes().iter().take_while(|&&p| p <= p0) {
        acc.add(euler_g_local(local_case(p, u, n_level), p, g.lambda(p), s).ln());
    }
    // primes of u beyond p0 still change the product
    if let Ok(f) = arith::factorize(u) {
        for p in f.primes().filter(|&p| p > p0) {
            let lp = if p <= g.max_n() { g.lambda(p) } else { return Err(Error::Range { need: p, have: g.max_n() }) };
            acc.add(euler_g_local(local_case(p, u, n_level), p, lp, s).ln());
            acc.add(-euler_g_local(LocalCase::Generic, p, lp, s).ln());
        }
    }
    Ok(acc.value().exp())
}

/// L_{g,eta}(1/2) for N = 1: the 2-part of L(1/2, g x chi_d), which depends
/// on chi_d(2) = eps. Since d mod 8 is not fixed by eta mod 4, the family
/// average of both classes is returned together with the two values.
pub fn l_g_eta_half(g: &EigenformL) -> (f64, f64, f64) {
    let lam2 = prime_power_lambdas(g.lambda(2), 1);
    let val = |eps: f64| 1.0 / (1.0 - eps * lam2[1] / 2f64.sqrt() + 0.5);
    let (plus, minus) = (val(1.0), val(-1.0));
    (0.5 * (plus + minus), plus, minus)
}

/// Components of the predicted main term.
#[derive(Debug, Clone, PartialEq)]
pub struct MainTerm {
    pub value: f64,
    pub lambda_u1: f64,
    pub u1: u64,
    pub phi_integral: f64,
    pub l_g_eta: f64,
    pub sym2_at_1: f64,
    pub g_factor: f64,
}

/// Truncation of the Euler product G(1; u).
pub const G_PRODUCT_LIMIT: u64 = 100_000;

/// X lambda_g(u_1) / (2 N sqrt(u_1)) * int Phi * L_{g,eta}(1/2) * L(1, Sym^2 g) * G(1; u), N = 1.
pub fn twisted_moment_main(g: &EigenformL, u: u64, x: f64, phi_int: f64, family: &FamilyD) -> Result<MainTerm> {
    if family.n_level != 1 {
        return Err(Error::Precondition("the main term is implemented for level N = 1".into()));
    }
    let (u1, _) = split_u(u)?;
    if u1 > g.max_n() {
        return Err(Error::Range { need: u1, have: g.max_n() });
    }
    let lambda_u1 = g.lambda(u1);
    let l_g_eta = l_g_eta_half(g).0;
    let sym2 = lfun::sym2_l_at_1_afe(g)?.value;
    let g_factor = euler_g(g, 0.0, u, 1, G_PRODUCT_LIMIT.min(g.max_n()))?;
    let value = x * lambda_u1 / (2.0 * (u1 as f64).sqrt()) * phi_int * l_g_eta * sym2 * g_factor;
    Ok(MainTerm { value, lambda_u1, u1, phi_integral: phi_int, l_g_eta, sym2_at_1: sym2, g_factor })
}

fn family_window(family: &FamilyD, x: f64, phi: &(dyn Fn(f64) -> f64 + Sync)) -> Vec<i64> {
    let lo = (0.5 * x).floor() as u64;
    let hi = (2.5 * x).ceil() as u64;
    family.members_in(lo, hi).into_iter().filter(|&d| phi(d.unsigned_abs() as f64 / x) != 0.0).collect()
}

/// sum_{d in D} L(1/2, g x chi_d) chi_d(u) Phi(|d|/X), reduced in ascending |d|.
pub fn twisted_moment_lhs(
    g: &EigenformL,
    u: u64,
    x: f64,
    phi: &(dyn Fn(f64) -> f64 + Sync),
    family: &FamilyD,
    mode: Mode,
) -> Result<f64> {
    if family.k != g.kappa() {
        return invalid("family parity must match the weight of g");
    }
    let ds = family_window(family, x, phi);
    let vals = lfun::central_values(g, &ds, mode);
    let mut acc = KahanSum::new();
    let mut failures = Vec::new();
    for (&d, v) in ds.iter().zip(vals) {
        match v {
            Ok(l) => acc.add(l.value * arith::kronecker(d, u as i64) as f64 * phi(d.unsigned_abs() as f64 / x)),
            Err(e) => failures.push(format!("d={d}: {e}")),
        }
    }
    if !failures.is_empty() {
        return Err(Error::Tolerance(format!("{} central values failed; first: {}", failures.len(), failures[0])));
    }
    Ok(acc.value())
}

/// Empirical counterparts of the resonance estimates over D(X) = {X <= |d| <= 2X}.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatesReport {
    pub x: f64,
    pub l: f64,
    pub m: f64,
    pub members: usize,
    pub cal_r: f64,
    /// sum L(1/2, g_0 x chi_d) |R(d)|^2
    pub sum_l0_r2: f64,
    /// sum L(1/2, g_1 x chi_d) |R(d)|^2 for a second form, if given.
    pub sum_l1_r2: Option<f64>,
    pub sum_r2: f64,
    pub sum_r6: f64,
    /// X R exp(L / (2 log L)), or X R when L <= e.
    pub cmp_lower: f64,
    /// (2X / pi^2) R
    pub cmp_r2: f64,
    /// X exp(log X / log log X)
    pub cmp_r6: f64,
}

pub fn estimates_report(
    params: &ResonatorParams,
    family: &FamilyD,
    g0: &EigenformL,
    g1: Option<&EigenformL>,
    mode: Mode,
) -> Result<EstimatesReport> {
    let x = params.x;
    let ds = family.members(x.round() as u64);
    let rs: Vec<f64> = par::map(mode, &ds, |&d| resonator_value(params, d));
    let weighted = |g: &EigenformL| -> Result<f64> {
        let vals = lfun::central_values(g, &ds, mode);
        let mut acc = KahanSum::new();
        for (v, r) in vals.into_iter().zip(&rs) {
            acc.add(v?.value * r * r);
        }
        Ok(acc.value())
    };
    let sum_l0_r2 = weighted(g0)?;
    let sum_l1_r2 = g1.map(weighted).transpose()?;
    let sum_r2 = rs.iter().map(|r| r * r).collect::<KahanSum>().value();
    let sum_r6 = rs.iter().map(|r| r.powi(6)).collect::<KahanSum>().value();
    let cr = cal_r(params);
    let l = params.l;
    let growth = if l > std::f64::consts::E { (0.5 * l / l.ln()).exp() } else { 1.0 };
    Ok(EstimatesReport {
        x,
        l,
        m: params.m,
        members: ds.len(),
        cal_r: cr,
        sum_l0_r2,
        sum_l1_r2,
        sum_r2,
        sum_r6,
        cmp_lower: x * cr * growth,
        cmp_r2: 2.0 * x / (PI * PI) * cr,
        cmp_r6: x * (x.ln() / x.ln().ln()).exp(),
    })
}

/// sum_{p <= x} lambda_a(p) lambda_b(p) log p.
pub fn rankin_selberg_prime_sum(a: &EigenformL, b: &EigenformL, x: u64) -> Result<f64> {
    let top = a.max_n().min(b.max_n());
    if x > top {
        return Err(Error::Range { need: x, have: top });
    }
    Ok(a.primes()
        .iter()
        .take_while(|&&p| p <= x)
        .map(|&p| a.lambda(p) * b.lambda(p) * (p as f64).ln())
        .collect::<KahanSum>()
        .value())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g() -> Arc<EigenformL> {
        lfun::g18().unwrap()
    }

    #[test]
    fn resonator_basics() {
        let p = ResonatorParams::new(5000.0, 1, g()).unwrap();
        assert!(p.window().is_empty());
        assert_eq!(resonator_value(&p, -23), 1.0);
        assert_eq!(cal_r(&p), 1.0);

        let q = ResonatorParams::with_overrides(5000.0, 1, g(), 10.0, None).unwrap();
        let r101 = 10.0 / (101f64.sqrt() * 101f64.ln());
        assert!((q.r_prime(101) - r101).abs() < 1e-15);
        assert_eq!(q.r_prime(97), 0.0);
        assert_eq!(*q.window().first().unwrap(), 101);
        assert_eq!(*q.window().last().unwrap(), 9973);
        // M = 5000^{1/24} < 101: only m = 1 survives
        assert_eq!(q.terms(), &[(1, 1.0)]);
        let cr = cal_r(&q);
        let bound: f64 = q.window().iter().map(|&p| 4.0 * q.r_prime(p).powi(2)).sum();
        assert!(cr >= 1.0 && cr.ln() <= bound);
    }

    #[test]
    fn resonator_support_and_multiplicativity() {
        let gl = g();
        let q = ResonatorParams::with_overrides(1e4, 1, gl.clone(), 4.0, Some(3.0e4)).unwrap();
        let terms = q.terms();
        assert!(terms.len() > 10);
        for &(m, w) in terms {
            let f = arith::factorize(m).unwrap();
            assert!(f.is_squarefree());
            assert!(f.primes().all(|p| (16..=256).contains(&p)));
            let r: f64 = f.primes().map(|p| q.r_prime(p)).product();
            assert!((q.r(m) - r).abs() <= 1e-15 * r.abs().max(1e-300));
            assert!((w - r * gl.lambda(m)).abs() < 1e-12);
        }
        for m in 1..=30_000u64 {
            if q.r(m) != 0.0 {
                assert!(terms.binary_search_by_key(&m, |t| t.0).is_ok(), "m={m}");
            }
        }
        let d = -1_000_003i64;
        let direct: f64 = (1..=30_000u64).map(|m| q.r(m) * gl.lambda(m) * arith::kronecker(d, m as i64) as f64).sum();
        assert!((resonator_value(&q, d) - direct).abs() < 1e-10);
    }

    #[test]
    fn family_membership() {
        let fam = FamilyD::new(1, 1, 9).unwrap();
        let ms = fam.members(500);
        for n in 500..=1000u64 {
            let d = -(n as i64);
            let brute = n % 2 == 1 && arith::moebius(n).unwrap() != 0 && d.rem_euclid(4) == 1;
            assert_eq!(ms.contains(&d), brute);
            if brute {
                assert!(arith::is_fundamental(d).unwrap());
            }
        }
        let fam3 = FamilyD::new(3, 5, 2).unwrap();
        for d in fam3.members(200) {
            assert!(d > 0 && d % 3 != 0 && d.rem_euclid(12) == 5 && arith::is_fundamental(d).unwrap());
        }
        assert!(FamilyD::new(1, 3, 9).is_err());
        assert!(FamilyD::new(3, 9, 9).is_err());
    }

    #[test]
    fn bump_shape_and_integral() {
        assert_eq!(bump(1.0), 0.0);
        assert_eq!(bump(2.0), 0.0);
        assert!((bump(1.5) - 1.0).abs() < 1e-15);
        assert!((bump(1.1) - 1.0).abs() < 1e-15 && (bump(1.9) - 1.0).abs() < 1e-15);
        assert!(bump(1.05) > 0.0 && bump(1.05) < 1.0);
        // symmetric smooth step: the ramps contribute 0.1 together
        assert!((phi_integral(&bump) - 0.9).abs() < 1e-10);
        assert_eq!(phi_integral(&|_| 0.0), 0.0);
    }

    #[test]
    fn local_factors_match_series() {
        let gl = g();
        for p in [3u64, 5, 7, 11] {
            let lp = gl.lambda(p);
            let pf = p as f64;
            let lpp = prime_power_lambdas(lp, 80);
            let x = 1.0 / pf;
            let l_p_inv = (1.0 - (lp * lp - 2.0) * x + x * x) * (1.0 - x);
            // p | u_1: (1 - 1/p^2)/(1 + 1/p) sum_k lambda(p^{2k+1}) x^k / L_p, with lambda(p) pulled out
            let odd: f64 = (0..40).map(|k| lpp[2 * k + 1] * x.powi(k as i32)).sum();
            let u1 = (1.0 - 1.0 / (pf * pf)) / (1.0 + 1.0 / pf) * odd * l_p_inv / lp;
            assert!((u1 - euler_g_local(LocalCase::U1, p, lp, 0.0)).abs() < 1e-12);
            let even: f64 = (0..40).map(|k| lpp[2 * k] * x.powi(k as i32)).sum();
            let u2 = (1.0 - 1.0 / (pf * pf)) / (1.0 + 1.0 / pf) * even * l_p_inv;
            assert!((u2 - euler_g_local(LocalCase::U2, p, lp, 0.0)).abs() < 1e-12);
            assert!((u2 - (1.0 - 1.0 / pf) * (1.0 - 1.0 / (pf * pf))).abs() < 1e-12);
            let gen = (1.0 - 1.0 / (pf * pf)) * (1.0 + (even - 1.0) / (1.0 + 1.0 / pf)) * l_p_inv;
            assert!((gen - euler_g_local(LocalCase::Generic, p, lp, 0.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn generic_factor_is_close_to_one() {
        let gl = g();
        let worst = gl
            .primes()
            .iter()
            .filter(|&&p| p > 2 && p <= 10_000)
            .map(|&p| (euler_g_local(LocalCase::Generic, p, gl.lambda(p), 0.0) - 1.0).abs() * p as f64)
            .fold(0.0, f64::max);
        assert!(worst <= 6.0, "{worst}");
    }

    #[test]
    fn euler_g_multiplicative() {
        let gl = g();
        let e = |u| euler_g(&gl, 0.0, u, 1, 20_000).unwrap();
        for (u, v) in [(3u64, 5u64), (9, 7), (27, 25), (15, 49)] {
            let lhs = e(u * v) * e(1);
            let rhs = e(u) * e(v);
            assert!((lhs / rhs - 1.0).abs() < 1e-12, "{u} {v}");
        }
        assert!(euler_g(&gl, 0.0, 2, 1, 100).is_err());
        assert!(euler_g(&gl, -0.3, 1, 1, 100).is_err());
    }

    #[test]
    fn main_term_properties() {
        let gl = g();
        let fam = FamilyD::new(1, 1, 9).unwrap();
        let a = twisted_moment_main(&gl, 1, 1000.0, 0.9, &fam).unwrap();
        let b = twisted_moment_main(&gl, 1, 2000.0, 0.9, &fam).unwrap();
        assert_eq!(b.value / a.value, 2.0);
        let m9 = twisted_moment_main(&gl, 9, 1000.0, 0.9, &fam).unwrap();
        assert_eq!((m9.u1, m9.lambda_u1), (1, 1.0));
        let gf = |p: u64| {
            euler_g_local(LocalCase::U2, p, 0.0, 0.0) / euler_g_local(LocalCase::Generic, p, gl.lambda(p), 0.0)
        };
        assert!((m9.value / a.value - gf(3)).abs() < 1e-12);

        // a synthetic form with lambda(3) = 0 has zero main term at u = 3
        let pv: Vec<(u64, f64)> = gl.primes().iter().map(|&p| (p, if p == 3 { 0.0 } else { gl.lambda(p) })).collect();
        let z = EigenformL::from_prime_values("z", 18, &pv, gl.max_n()).unwrap();
        assert_eq!(twisted_moment_main(&z, 3, 1000.0, 0.9, &fam).unwrap().value, 0.0);
    }

    #[test]
    fn lhs_small_cases() {
        let gl = g();
        let fam = FamilyD::new(1, 1, 9).unwrap();
        assert_eq!(twisted_moment_lhs(&gl, 1, 300.0, &|_| 0.0, &fam, Mode::Sequential).unwrap(), 0.0);
        let s9 = twisted_moment_lhs(&gl, 9, 300.0, &bump, &fam, Mode::Sequential).unwrap();
        assert!(s9 >= 0.0);
        let par = twisted_moment_lhs(&gl, 9, 300.0, &bump, &fam, Mode::Parallel).unwrap();
        assert_eq!(s9.to_bits(), par.to_bits());
    }

    #[test]
    fn estimates_at_desk_scale() {
        let gl = g();
        let fam = FamilyD::new(1, 1, 9).unwrap();
        let p = ResonatorParams::new(5000.0, 1, gl.clone()).unwrap();
        let rep = estimates_report(&p, &fam, &gl, None, Mode::default()).unwrap();
        assert!(rep.sum_r2 <= rep.cmp_r2 * 2.0);
        assert!(rep.sum_l0_r2 > 0.0 && rep.sum_r2 > 0.0 && rep.sum_r6 > 0.0 && rep.cal_r > 0.0);
    }

    #[test]
    fn rankin_selberg_sums() {
        let gl = g();
        let d = lfun::delta().unwrap();
        let x = 20_000;
        let same = rankin_selberg_prime_sum(&gl, &gl, x).unwrap();
        let cross = rankin_selberg_prime_sum(&gl, &d, x).unwrap();
        assert!((same / x as f64 - 1.0).abs() < 0.2);
        assert!(cross.abs() / (x as f64) < 0.2);
    }
}
