//! Kohnen plus-space forms of weight kappa + 1/2: the two level-4 exemplars,
//! U(r^2), and Hecke eigenvalue extraction through the prime-square relation.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::qexp::eta_power_3m;
use crate::arith;
use crate::cache;
use crate::error::{Error, Result};

/// Half-integral weight form with a(n) = coeffs[n] * sqrt(sqrt_scale).
#[derive(Debug, Clone, PartialEq)]
pub struct HalfIntForm {
    pub label: String,
    pub kappa: u32,
    pub level: u64,
    pub coeffs: Vec<BigRational>,
    pub sqrt_scale: BigRational,
    pub plus_flag: bool,
    pub eigen: BTreeMap<u64, f64>,
}

/// (-1)^kappa n mod 4 lies in {0, 1}.
pub fn plus_admissible(kappa: u32, n: u64) -> bool {
    let r = (n % 4) as i64;
    let s = if kappa.is_multiple_of(2) { r } else { (4 - r) % 4 };
    s == 0 || s == 1
}

impl HalfIntForm {
    pub fn new(
        label: impl Into<String>,
        kappa: u32,
        level: u64,
        coeffs: Vec<BigRational>,
        sqrt_scale: BigRational,
    ) -> Self {
        let mut f = HalfIntForm {
            label: label.into(),
            kappa,
            level,
            coeffs,
            sqrt_scale,
            plus_flag: false,
            eigen: BTreeMap::new(),
        };
        f.plus_flag = f.plus_condition_holds();
        f
    }

    pub fn from_ints(label: impl Into<String>, kappa: u32, level: u64, a: &[i128]) -> Self {
        let coeffs = a.iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect();
        Self::new(label, kappa, level, coeffs, BigRational::one())
    }

    /// a(n) = 0 whenever (-1)^kappa n = 2, 3 mod 4, over the computed range.
    pub fn plus_condition_holds(&self) -> bool {
        self.coeffs.iter().enumerate().skip(1).all(|(n, c)| plus_admissible(self.kappa, n as u64) || c.is_zero())
    }

    pub fn max_n(&self) -> u64 {
        self.coeffs.len().saturating_sub(1) as u64
    }

    fn check_range(&self, n: u64) -> Result<()> {
        if n > self.max_n() {
            return Err(Error::Range { need: n, have: self.max_n() });
        }
        Ok(())
    }

    pub fn a_f64(&self, n: u64) -> Result<f64> {
        self.check_range(n)?;
        Ok(self.coeffs[n as usize].to_f64().unwrap_or(f64::NAN) * self.sqrt_scale.to_f64().unwrap().sqrt())
    }

    /// c(n) = a(n) n^{1/4 - kappa/2}.
    pub fn c(&self, n: u64) -> Result<f64> {
        Ok(self.a_f64(n)? * (n as f64).powf(0.25 - self.kappa as f64 / 2.0))
    }

    /// c(n) for all 0 <= n <= max (c(0) set to 0).
    pub fn c_series(&self) -> Vec<f64> {
        let s = self.sqrt_scale.to_f64().unwrap().sqrt();
        let e = 0.25 - self.kappa as f64 / 2.0;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, a)| if n == 0 { 0.0 } else { a.to_f64().unwrap_or(f64::NAN) * s * (n as f64).powf(e) })
            .collect()
    }

    /// f | U(r^2) = r^{1/2 - kappa} sum a(r^2 n) q^n, kept on n <= max / r^2.
    pub fn u_r2(&self, r: u64) -> Result<HalfIntForm> {
        if r == 0 {
            return Err(Error::Invalid("U(r^2) needs r >= 1".into()));
        }
        let r2 = r * r;
        let len = self.max_n() / r2;
        if len == 0 {
            return Err(Error::Range { need: r2, have: self.max_n() });
        }
        let coeffs = (0..=len).map(|n| self.coeffs[(n * r2) as usize].clone()).collect();
        let rr = BigRational::from_integer(BigInt::from(r));
        let scale = &self.sqrt_scale * num_traits::pow(rr.recip(), 2 * self.kappa as usize - 1);
        let level = if r == 1 { self.level } else { self.level * r };
        let mut g = HalfIntForm::new(format!("{}|U({}^2)", self.label, r), self.kappa, level, coeffs, scale);
        g.eigen = self.eigen.clone();
        Ok(g)
    }
}

/// The two built-in plus-space eigenforms of level 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Exemplar {
    /// Weight 19/2, Shimura lift in S_18.
    F19,
    /// Weight 23/2, Shimura lift in S_22.
    F23,
}

impl Exemplar {
    pub fn kappa(self) -> u32 {
        match self {
            Exemplar::F19 => 9,
            Exemplar::F23 => 11,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Exemplar::F19 => "f19/2",
            Exemplar::F23 => "f23/2",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "f19/2" | "f19" | "19/2" => Ok(Exemplar::F19),
            "f23/2" | "f23" | "23/2" => Ok(Exemplar::F23),
            _ => Err(Error::Invalid(format!("unknown form {s:?} (f19/2 or f23/2)"))),
        }
    }
}

/// Coefficients C(D), 0 <= D <= x, of the exemplar through the theta
/// expansion phi = eta^18 * theta-series in z: with prod (1 - q^n)^18 = sum p(e) q^e,
/// f19/2: C(D) = sum_j (-1)^j p((D - 3 - j^2)/4),
/// f23/2: C(D) = (1/3) sum_j (-1)^j (D - 19 j^2) p((D - 3 - j^2)/4).
pub fn theta_route(which: Exemplar, x: usize) -> Vec<i128> {
    let emax = x.saturating_sub(3) / 4;
    let p = eta_power_3m(6, emax);
    let mut out = vec![0i128; x + 1];
    for (d, slot) in out.iter_mut().enumerate().skip(3) {
        let mut s = 0i128;
        let mut j = 0usize;
        while j * j + 3 <= d {
            let rem = d - 3 - j * j;
            if rem.is_multiple_of(4) {
                let sign = if j.is_multiple_of(2) { 1 } else { -1 };
                let mult = if j == 0 { 1 } else { 2 };
                let pe = p[rem / 4];
                let w = match which {
                    Exemplar::F19 => 1,
                    Exemplar::F23 => d as i128 - 19 * (j * j) as i128,
                };
                s += sign * mult * w * pe;
            }
            j += 1;
        }
        *slot = s;
    }
    if which == Exemplar::F23 {
        for c in out.iter_mut() {
            assert!(*c % 3 == 0, "weight 23/2 theta route must be divisible by 3");
            *c /= 3;
        }
    }
    out
}

type Memo = Mutex<BTreeMap<&'static str, Arc<HalfIntForm>>>;

/// Exemplar with coefficients for n <= x, memoized (and cached on disk when
/// FUNDCOEFF_CACHE_DIR is set).
pub fn exemplar(which: Exemplar, x: u64) -> Result<Arc<HalfIntForm>> {
    if x > 20_000_000 {
        return Err(Error::Invalid(format!("exemplar range {x} exceeds 2e7")));
    }
    static MEMO: OnceLock<Memo> = OnceLock::new();
    let memo = MEMO.get_or_init(|| Mutex::new(BTreeMap::new()));
    let mut m = memo.lock().unwrap();
    if let Some(f) = m.get(which.label()) {
        if f.max_n() >= x {
            return Ok(f.clone());
        }
    }
    let x = x.max(64) as usize;
    let ints = match cache::load(which.label(), x + 1)? {
        Some(v) => v,
        None => {
            let v = theta_route(which, x);
            cache::store(which.label(), &v)?;
            v
        }
    };
    let f = Arc::new(HalfIntForm::from_ints(which.label(), which.kappa(), 4, &ints[..=x]));
    m.insert(which.label(), f.clone());
    Ok(f)
}

/// Odd squarefree n with (-1)^kappa n = 1 mod 4, i.e. d = (-1)^kappa n fundamental.
pub fn admissible_n(kappa: u32, n: u64) -> bool {
    n % 2 == 1 && arith::is_squarefree(n) && {
        let d = if kappa.is_multiple_of(2) { n as i64 } else { -(n as i64) };
        d.rem_euclid(4) == 1
    }
}

pub fn disc_of(kappa: u32, n: u64) -> i64 {
    if kappa.is_multiple_of(2) {
        n as i64
    } else {
        -(n as i64)
    }
}

/// Sign in front of c(f, p^{2m-2} n) in the prime-square recursion.
/// For odd p, (p^2 - 1)/2 is even, so the sign is +1.
pub fn hecke_sign(kappa: u32, p: u64) -> f64 {
    if (kappa as u64 * ((p * p - 1) / 2)).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// lambda(p) = c(p^2 n)/c(n) + (d/p)/sqrt(p), using `ratio(n)` = c(p^2 n)/c(n)
/// (None when c(n) = 0 or out of range) over the first three admissible n.
pub fn lambda_extract_with(kappa: u32, p: u64, max_n: u64, ratio: &dyn Fn(u64) -> Option<f64>) -> Result<f64> {
    let mut vals = Vec::new();
    let mut n = 1u64;
    while n * p * p <= max_n && vals.len() < 3 {
        if admissible_n(kappa, n) {
            if let Some(r) = ratio(n) {
                let d = disc_of(kappa, n);
                vals.push(r + arith::kronecker(d, p as i64) as f64 / (p as f64).sqrt());
            }
        }
        n += 1;
    }
    if vals.len() < 3 {
        return Err(Error::NoUsableN(p));
    }
    let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo > 1e-9 || hi.abs().max(lo.abs()) > 2.0 + 1e-9 {
        return Err(Error::NotEigenform { p, spread: hi - lo });
    }
    Ok(vals[0])
}

/// lambda_f(p) from the exact coefficient ratio a(p^2 n)/a(n).
pub fn lambda_extract(f: &HalfIntForm, p: u64) -> Result<f64> {
    let scale = (p as f64).powf(0.5 - f.kappa as f64);
    lambda_extract_with(f.kappa, p, f.max_n(), &|n| {
        let a = &f.coeffs[n as usize];
        if a.is_zero() {
            None
        } else {
            Some((&f.coeffs[(n * p * p) as usize] / a).to_f64()? * scale)
        }
    })
}

/// Eigenvalues lambda_f(p) for all primes p <= pmax.
pub fn lambda_table(f: &HalfIntForm, pmax: u64) -> Result<BTreeMap<u64, f64>> {
    arith::Sieve::new(pmax.max(2) as usize).primes_up_to(pmax).map(|p| Ok((p, lambda_extract(f, p)?))).collect()
}

/// |c(f, r^2 n)| <= 3^{Omega(r)} |c(f, n)|, compared exactly:
/// a(r^2 n)^2 <= 9^{Omega(r)} r^{2 kappa - 1} a(n)^2.
pub fn hecke_bound_check(f: &HalfIntForm, r: u64, n: u64) -> Result<bool> {
    f.check_range(r * r * n)?;
    let big_omega = if r == 1 { 0 } else { arith::big_omega(r)? };
    let lhs = num_traits::pow(f.coeffs[(r * r * n) as usize].clone(), 2);
    let rhs = num_traits::pow(f.coeffs[n as usize].clone(), 2)
        * BigRational::from_integer(num_traits::pow(BigInt::from(9), big_omega as usize))
        * BigRational::from_integer(num_traits::pow(BigInt::from(r), 2 * f.kappa as usize - 1));
    Ok(lhs.abs() <= rhs)
}

/// c(f, n) prod_{p | r} (lambda(p) - (d/p)/sqrt p) for squarefree r.
pub fn hecke_product(c_n: f64, kappa: u32, n: u64, r: u64, lambda: &BTreeMap<u64, f64>) -> Result<f64> {
    let d = disc_of(kappa, n);
    let fac = arith::factorize(r)?;
    let mut v = c_n;
    for p in fac.primes() {
        let l = lambda.get(&p).ok_or(Error::Range { need: p, have: lambda.keys().last().copied().unwrap_or(0) })?;
        v *= l - arith::kronecker(d, p as i64) as f64 / (p as f64).sqrt();
    }
    Ok(v)
}

/// c(f, p^{2m} n) for m = 0..=mmax from c(f, n), lambda and the recursion.
pub fn hecke_recursion(c_n: f64, lambda: f64, kappa: u32, n: u64, p: u64, mmax: usize) -> Vec<f64> {
    let d = disc_of(kappa, n);
    let mut out = vec![c_n];
    if mmax >= 1 {
        out.push((lambda - arith::kronecker(d, p as i64) as f64 / (p as f64).sqrt()) * c_n);
    }
    let s = hecke_sign(kappa, p);
    for m in 1..mmax {
        let next = lambda * out[m] - s * out[m - 1];
        out.push(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mf::jacobi::{jacobi_cusp_index1, plus_form_from_jacobi};

    #[test]
    fn theta_route_small_values() {
        let f = theta_route(Exemplar::F19, 8);
        assert_eq!((f[3], f[4], f[7]), (1, -2, -16));
        let g = theta_route(Exemplar::F23, 8);
        assert_eq!((g[3], g[4], g[7]), (1, 10, -88));
    }

    #[test]
    fn theta_route_equals_jacobi_route() {
        for (which, k) in [(Exemplar::F19, 10), (Exemplar::F23, 12)] {
            let x = 400;
            let t = theta_route(which, x);
            let j = jacobi_cusp_index1(k, x).unwrap();
            for d in 0..=x {
                assert_eq!(BigInt::from(t[d]), j.coeffs[d], "{which:?} D={d}");
            }
            let f = plus_form_from_jacobi(&j);
            assert!(f.plus_flag);
            assert_eq!(f.kappa, which.kappa());
        }
    }

    #[test]
    fn u_r2_identity_and_composition() {
        let f = exemplar(Exemplar::F19, 4000).unwrap();
        assert_eq!(*f.u_r2(1).unwrap().coeffs, *f.coeffs);
        let g = f.u_r2(3).unwrap();
        for n in 1..=g.max_n() {
            // c(f|U(9), n) = c(f, 9n), exactly: coeffs'^2 s' = coeffs^2 s 3^{1 - 2 kappa}
            let lhs = num_traits::pow(g.coeffs[n as usize].clone(), 2) * &g.sqrt_scale;
            let rhs = num_traits::pow(f.coeffs[9 * n as usize].clone(), 2)
                * &f.sqrt_scale
                * num_traits::pow(BigRational::new(1.into(), 3.into()), 17);
            assert_eq!(lhs, rhs);
            let (a, b) = (g.c(n).unwrap(), f.c(9 * n).unwrap());
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-300));
        }
        let uv = f.u_r2(3).unwrap().u_r2(5).unwrap();
        let w = f.u_r2(15).unwrap();
        assert_eq!(uv.coeffs, w.coeffs);
        assert_eq!(uv.sqrt_scale, w.sqrt_scale);
    }

    #[test]
    fn synthetic_round_trip_and_corruption() {
        let lam = 0.7312;
        let p = 3u64;
        let kappa = 9;
        let good = |n: u64| {
            let d = disc_of(kappa, n);
            Some(lam - arith::kronecker(d, 3) as f64 / 3f64.sqrt())
        };
        let got = lambda_extract_with(kappa, p, 1000, &good).unwrap();
        assert!((got - lam).abs() < 1e-15);
        let bad = |n: u64| good(n).map(|v| if n == 7 { v + 0.01 } else { v });
        assert!(matches!(lambda_extract_with(kappa, p, 1000, &bad), Err(Error::NotEigenform { .. })));
        assert!(matches!(lambda_extract_with(kappa, p, 1000, &|_| None), Err(Error::NoUsableN(3))));
    }

    #[test]
    fn recursion_sign_is_plus_for_odd_primes() {
        let f = exemplar(Exemplar::F19, 3 * 7usize.pow(4) as u64 + 10).unwrap();
        for p in [3u64, 5, 7] {
            assert_eq!(hecke_sign(9, p), 1.0);
            let lam = lambda_extract(&f, p).unwrap();
            let n = 3u64;
            let pred = hecke_recursion(f.c(n).unwrap(), lam, 9, n, p, 2);
            let actual = f.c(p.pow(4) * n).unwrap();
            assert!((pred[2] - actual).abs() < 1e-10 * actual.abs().max(1.0), "p={p}");
            // the other sign is visibly wrong
            let wrong = lam * pred[1] + pred[0];
            assert!((wrong - actual).abs() > 1e-3 * actual.abs().max(1e-3));
        }
    }

    #[test]
    fn hecke_bound_examples() {
        let f = exemplar(Exemplar::F19, 81 * 500).unwrap();
        assert!(hecke_bound_check(&f, 1, 3).unwrap());
        for n in (1..=500).filter(|&n| n % 2 == 1 && arith::is_squarefree(n)) {
            assert!(hecke_bound_check(&f, 9, n).unwrap(), "n={n}");
        }
        assert!(hecke_bound_check(&f, 15, 7).unwrap());
    }

    #[test]
    fn plus_admissibility() {
        assert!(plus_admissible(9, 3) && plus_admissible(9, 4) && !plus_admissible(9, 1) && !plus_admissible(9, 2));
        assert!(plus_admissible(10, 1) && plus_admissible(10, 4) && !plus_admissible(10, 3));
    }
}
