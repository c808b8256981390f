//! Integer substrate: factorisation, multiplicative functions, Kronecker
//! symbols, fundamental discriminants, sieves and primes represented by forms.

use crate::error::{invalid, Result};

/// Prime factorisation as sorted (prime, exponent) pairs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Factorization {
    pub pairs: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn value(&self) -> u128 {
        self.pairs.iter().map(|&(p, e)| (p as u128).pow(e)).product()
    }

    pub fn is_squarefree(&self) -> bool {
        self.pairs.iter().all(|&(_, e)| e == 1)
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.pairs.iter().map(|&(p, _)| p)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'outer: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

// Brent's variant of Pollard rho; n odd composite.
fn pollard_brent(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g, mut q) = (2u64, 2u64, 1u64, 1u64);
        let mut ys = 2u64;
        let mut r = 1u64;
        let m = 64u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd_u64(q, n);
                k += m;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd_u64(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn factor_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_brent(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

/// Exact prime factorisation of 1 <= n <= 2^63 - 1.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return invalid("factorize(0)");
    }
    if n > i64::MAX as u64 {
        return invalid("factorize: n exceeds 2^63 - 1");
    }
    let mut m = n;
    let mut raw = Vec::new();
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while m.is_multiple_of(p) {
            raw.push(p);
            m /= p;
        }
    }
    let mut p = 53;
    while p * p <= m && p < 1000 {
        while m.is_multiple_of(p) {
            raw.push(p);
            m /= p;
        }
        p += 2;
    }
    factor_into(m, &mut raw);
    raw.sort_unstable();
    let mut pairs: Vec<(u64, u32)> = Vec::new();
    for q in raw {
        match pairs.last_mut() {
            Some((r, e)) if *r == q => *e += 1,
            _ => pairs.push((q, 1)),
        }
    }
    Ok(Factorization { pairs })
}

pub fn moebius(n: u64) -> Result<i32> {
    let f = factorize(n)?;
    if !f.is_squarefree() {
        return Ok(0);
    }
    Ok(if f.pairs.len() % 2 == 0 { 1 } else { -1 })
}

pub fn omega(n: u64) -> Result<u32> {
    Ok(factorize(n)?.pairs.len() as u32)
}

pub fn big_omega(n: u64) -> Result<u32> {
    Ok(factorize(n)?.pairs.iter().map(|&(_, e)| e).sum())
}

pub fn is_squarefree(n: u64) -> bool {
    n != 0 && factorize(n).map(|f| f.is_squarefree()).unwrap_or(false)
}

/// Kronecker symbol (d / n) for all integers, including n <= 0 and the
/// 2-adic rule (d/2) = 0, 1, -1 for d even, d = +-1 mod 8, d = +-3 mod 8.
pub fn kronecker(d: i64, n: i64) -> i32 {
    if n == 0 {
        return if d == 1 || d == -1 { 1 } else { 0 };
    }
    let mut result = 1i32;
    let mut n = n;
    if n < 0 {
        n = -n;
        if d < 0 {
            result = -result;
        }
    }
    let mut v = 0;
    while n % 2 == 0 {
        n /= 2;
        v += 1;
    }
    if v > 0 {
        if d % 2 == 0 {
            return 0;
        }
        let r = d.rem_euclid(8);
        if v % 2 == 1 && (r == 3 || r == 5) {
            result = -result;
        }
    }
    // Jacobi symbol (d mod n / n) for odd n > 0.
    let n = n as u64;
    let a = d.rem_euclid(n as i64) as u64;
    result * jacobi(a, n)
}

/// Jacobi symbol (a / n) for odd n > 0.
pub fn jacobi(a: u64, n: u64) -> i32 {
    debug_assert!(n % 2 == 1);
    let mut a = a % n;
    let mut n = n;
    let mut t = 1;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Options for [`is_fundamental_with`].
#[derive(Debug, Clone, Copy, Default)]
pub struct FundamentalOpts {
    /// Treat d = 1 (the trivial discriminant) as fundamental.
    pub accept_one: bool,
}

/// Fundamental discriminant test with the default convention (d = 1 rejected).
pub fn is_fundamental(d: i64) -> Result<bool> {
    is_fundamental_with(d, FundamentalOpts::default())
}

pub fn is_fundamental_with(d: i64, opts: FundamentalOpts) -> Result<bool> {
    if d == 0 {
        return invalid("is_fundamental(0)");
    }
    if d == 1 {
        return Ok(opts.accept_one);
    }
    let r = d.rem_euclid(4);
    if r == 1 {
        return Ok(is_squarefree(d.unsigned_abs()));
    }
    if r == 0 {
        let m = d / 4;
        let mr = m.rem_euclid(4);
        return Ok((mr == 2 || mr == 3) && is_squarefree(m.unsigned_abs()));
    }
    Ok(false)
}

/// Smallest-prime-factor sieve on [0, n].
#[derive(Debug, Clone)]
pub struct Sieve {
    spf: Vec<u32>,
    primes: Vec<u32>,
}

impl Sieve {
    pub fn new(n: usize) -> Self {
        let n = n.max(2);
        let mut spf = vec![0u32; n + 1];
        let mut primes = Vec::new();
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            for &p in &primes {
                let m = p as usize * i;
                if p > spf[i] || m > n {
                    break;
                }
                spf[m] = p;
            }
        }
        Sieve { spf, primes }
    }

    pub fn limit(&self) -> usize {
        self.spf.len() - 1
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn primes_up_to(&self, x: u64) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().map(|&p| p as u64).take_while(move |&p| p <= x)
    }

    pub fn spf(&self, m: usize) -> u32 {
        self.spf[m]
    }

    pub fn is_prime(&self, m: usize) -> bool {
        m >= 2 && self.spf[m] as usize == m
    }

    /// Factorisation of 1 <= m <= limit using the table.
    pub fn factor(&self, mut m: usize) -> Factorization {
        let mut pairs: Vec<(u64, u32)> = Vec::new();
        while m > 1 {
            let p = self.spf[m] as usize;
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            pairs.push((p as u64, e));
        }
        Factorization { pairs }
    }

    /// Moebius function table on [0, limit] (entry 0 is 0).
    pub fn moebius_table(&self) -> Vec<i8> {
        let n = self.limit();
        let mut mu = vec![0i8; n + 1];
        if n >= 1 {
            mu[1] = 1;
        }
        for m in 2..=n {
            let p = self.spf[m] as usize;
            let q = m / p;
            mu[m] = if q.is_multiple_of(p) { 0 } else { -mu[q] };
        }
        mu
    }

    /// Squarefree indicator on [0, limit].
    pub fn squarefree_table(&self) -> Vec<bool> {
        self.moebius_table().iter().map(|&m| m != 0).collect()
    }
}

/// Positive divisors of n in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// sigma_k(n) = sum of d^k over divisors, as u128 (caller keeps it in range).
pub fn sigma(k: u32, n: u64) -> u128 {
    divisors(n).into_iter().map(|d| (d as u128).pow(k)).sum()
}

pub fn gcd(a: i64, b: i64) -> i64 {
    gcd_u64(a.unsigned_abs(), b.unsigned_abs()) as i64
}

/// Square root of a modulo an odd prime p (Tonelli-Shanks), if it exists.
pub fn sqrt_mod_prime(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    let mut q = p - 1;
    let mut s = 0;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// Smallest b in [0, 2p) with b^2 = d (mod 4p), for a prime p and a
/// discriminant d = 0, 1 (mod 4).
pub fn sqrt_disc_mod_4p(d: i64, p: u64) -> Option<i64> {
    let m = 4 * p as i128;
    let ok = |b: i64| ((b as i128 * b as i128 - d as i128).rem_euclid(m)) == 0;
    if p < 64 {
        return (0..2 * p as i64).find(|&b| ok(b));
    }
    let r = sqrt_mod_prime(d.rem_euclid(p as i64) as u64, p)? as i64;
    let p = p as i64;
    let mut cands = [r, p - r, r + p, 2 * p - r];
    cands.sort_unstable();
    cands.into_iter().filter(|&b| (0..2 * p).contains(&b)).find(|&b| ok(b))
}

/// All primes p <= x of the form a x^2 + b x y + c y^2 for a primitive
/// positive-definite form.
pub fn primes_by_form(a: i64, b: i64, c: i64, x: u64) -> Result<Vec<u64>> {
    let disc = b as i128 * b as i128 - 4 * a as i128 * c as i128;
    if a <= 0 || disc >= 0 {
        return invalid("primes_by_form: form is not positive definite");
    }
    if gcd(gcd(a, b), c) != 1 {
        return invalid("primes_by_form: form is not primitive");
    }
    let nd = (-disc) as f64;
    let (af, bf) = (a as f64, b as f64);
    let xf = x as f64;
    // f(u, v) = a (u + b v / 2a)^2 + |D| v^2 / 4a <= X bounds |v| and then u.
    let vmax = (4.0 * af * xf / nd).sqrt().floor() as i64 + 1;
    let mut found = std::collections::BTreeSet::new();
    for v in -vmax..=vmax {
        let rest = xf - nd * (v as f64).powi(2) / (4.0 * af);
        if rest < 0.0 {
            continue;
        }
        let centre = -bf * v as f64 / (2.0 * af);
        let span = (rest / af).sqrt();
        let lo = (centre - span).floor() as i64 - 1;
        let hi = (centre + span).ceil() as i64 + 1;
        for u in lo..=hi {
            let val =
                a as i128 * (u as i128).pow(2) + b as i128 * u as i128 * v as i128 + c as i128 * (v as i128).pow(2);
            if val >= 2 && val <= x as i128 && is_prime(val as u64) {
                found.insert(val as u64);
            }
        }
    }
    Ok(found.into_iter().collect())
}
