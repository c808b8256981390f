//! Bernoulli numbers, Hurwitz class numbers and Cohen's generalized class numbers.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith;

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn binom(n: usize, k: usize) -> BigInt {
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

/// Bernoulli number B_n with B_1 = -1/2.
pub fn bernoulli(n: usize) -> BigRational {
    static MEMO: OnceLock<Mutex<Vec<BigRational>>> = OnceLock::new();
    let memo = MEMO.get_or_init(|| Mutex::new(vec![BigRational::one()]));
    let mut b = memo.lock().unwrap();
    while b.len() <= n {
        let m = b.len();
        let mut s = BigRational::zero();
        for (k, bk) in b.iter().enumerate() {
            s += BigRational::from_integer(binom(m + 1, k)) * bk;
        }
        b.push(-s / rat(m as i64 + 1));
    }
    b[n].clone()
}

/// zeta(1 - 2l) = -B_{2l} / (2l).
pub fn zeta_negative_odd(l: usize) -> BigRational {
    -bernoulli(2 * l) / rat(2 * l as i64)
}

/// Hurwitz class number H(N) by enumeration of reduced forms of
/// discriminant -N (imprimitive ones included).
pub fn hurwitz(n: u64) -> BigRational {
    if n == 0 {
        return BigRational::new((-1).into(), 12.into());
    }
    if n % 4 == 1 || n % 4 == 2 {
        return BigRational::zero();
    }
    let n = n as i64;
    let mut twelve_h = 0i64;
    let mut a = 1i64;
    while 3 * a * a <= n {
        for b in -a + 1..=a {
            let num = n + b * b;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            twelve_h += form_weight12(a, b, c);
        }
        a += 1;
    }
    BigRational::new(twelve_h.into(), 12.into())
}

fn form_weight12(a: i64, b: i64, c: i64) -> i64 {
    if b == 0 && a == c {
        6
    } else if b == a && a == c {
        4
    } else {
        12
    }
}

/// Table of 12 H(N) for 0 <= N <= x (entry 0 is -1).
pub fn hurwitz12_table(x: usize) -> Vec<i64> {
    let mut t = vec![0i64; x + 1];
    t[0] = -1;
    let x = x as i64;
    let mut a = 1i64;
    while 3 * a * a <= x {
        for b in -a + 1..=a {
            let mut c = a;
            loop {
                let n = 4 * a * c - b * b;
                if n > x {
                    break;
                }
                if !(c == a && b < 0) {
                    t[n as usize] += form_weight12(a, b, c);
                }
                c += 1;
            }
        }
        a += 1;
    }
    t
}

/// Splits D = D0 f^2 with D0 a fundamental discriminant (or 1).
pub fn fundamental_part(d: i64) -> (i64, u64) {
    assert!(d != 0);
    let fac = arith::factorize(d.unsigned_abs()).expect("nonzero");
    let mut core: i64 = 1;
    let mut f: u64 = 1;
    for &(p, e) in &fac.pairs {
        if e % 2 == 1 {
            core *= p as i64;
        }
        f *= p.pow(e / 2);
    }
    let core = core * d.signum();
    if core.rem_euclid(4) == 1 {
        (core, f)
    } else {
        assert!(f.is_multiple_of(2), "D must be 0 or 1 mod 4");
        (4 * core, f / 2)
    }
}

/// L(1 - r, chi_{D0}) for a fundamental discriminant D0 (D0 = 1 gives zeta).
pub fn l_value_negative(r: usize, d0: i64) -> BigRational {
    static MEMO: OnceLock<Mutex<HashMap<(usize, i64), BigRational>>> = OnceLock::new();
    let memo = MEMO.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = memo.lock().unwrap().get(&(r, d0)) {
        return v.clone();
    }
    let f = d0.unsigned_abs();
    // S_i = sum_{a=1}^{F} chi(a) a^i
    let mut s: Vec<BigInt> = vec![BigInt::zero(); r + 1];
    for a in 1..=f {
        let chi = arith::kronecker(d0, a as i64);
        if chi == 0 {
            continue;
        }
        let mut pw = BigInt::one();
        for si in s.iter_mut() {
            if chi > 0 {
                *si += &pw;
            } else {
                *si -= &pw;
            }
            pw *= a;
        }
    }
    let mut b = BigRational::zero();
    let fb = BigInt::from(f);
    for (i, si) in s.iter().enumerate() {
        // F^{r-1-i} may be a negative power when i = r
        let fpow = if r > i {
            BigRational::from_integer(num_traits::pow(fb.clone(), r - 1 - i))
        } else {
            BigRational::new(BigInt::one(), fb.clone())
        };
        b += BigRational::from_integer(binom(r, i) * si) * bernoulli(r - i) * fpow;
    }
    let v = -b / rat(r as i64);
    memo.lock().unwrap().insert((r, d0), v.clone());
    v
}

fn sigma_big(k: usize, n: u64) -> BigInt {
    arith::divisors(n).into_iter().map(|d| num_traits::pow(BigInt::from(d), k)).sum()
}

/// Cohen's generalized class number H(r, N).
pub fn cohen(r: usize, n: u64) -> BigRational {
    assert!(r >= 1);
    if n == 0 {
        return zeta_negative_odd(r);
    }
    let d = if r.is_multiple_of(2) { n as i64 } else { -(n as i64) };
    if d.rem_euclid(4) == 2 || d.rem_euclid(4) == 3 {
        return BigRational::zero();
    }
    let (d0, f) = fundamental_part(d);
    let l = l_value_negative(r, d0);
    let mut s = BigInt::zero();
    for e in arith::divisors(f) {
        let mu = arith::moebius(e).unwrap();
        if mu == 0 {
            continue;
        }
        let chi = arith::kronecker(d0, e as i64);
        if chi == 0 {
            continue;
        }
        let term = num_traits::pow(BigInt::from(e), r - 1) * sigma_big(2 * r - 1, f / e);
        if mu * chi > 0 {
            s += term;
        } else {
            s -= term;
        }
    }
    l * BigRational::from_integer(s)
}

/// Content-free integral rescaling of a rational vector: multiply by the
/// lcm of denominators, divide by the gcd, and make the first nonzero
/// entry positive.
pub fn primitive_integral(v: &[BigRational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    let sign = ints.iter().find(|x| !x.is_zero()).map(|x| x.signum()).unwrap();
    ints.into_iter().map(|x| x / &g * &sign).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(1), q(-1, 2));
        assert_eq!(bernoulli(4), q(-1, 30));
        assert_eq!(bernoulli(12), q(-691, 2730));
        assert_eq!(bernoulli(5), q(0, 1));
    }

    #[test]
    fn hurwitz_examples() {
        assert_eq!(hurwitz(0), q(-1, 12));
        assert_eq!(hurwitz(3), q(1, 3));
        assert_eq!(hurwitz(4), q(1, 2));
        assert_eq!(hurwitz(7), q(1, 1));
        assert_eq!(hurwitz(12), q(4, 3));
        assert_eq!(hurwitz(5), q(0, 1));
    }

    #[test]
    fn table_matches_enumeration() {
        let t = hurwitz12_table(3000);
        for n in 0..=3000u64 {
            assert_eq!(q(t[n as usize], 12), hurwitz(n), "N={n}");
        }
    }

    #[test]
    fn hurwitz_sum_relation() {
        // sum_{t^2 <= 4n} H(4n - t^2) = 2 sigma(n) - lambda(n), lambda(n) = sum_{d|n} min(d, n/d)
        let t = hurwitz12_table(4 * 300);
        let t12 = |_: &i64, n: i64| t[n as usize];
        for n in 1..=300u64 {
            let m = 4 * n as i64;
            let s: i64 = (-m..=m).filter(|t| t * t <= m).map(|t| t12(&t, m - t * t)).sum();
            let lam: u64 = arith::divisors(n).iter().map(|&d| d.min(n / d)).sum();
            let rhs = 12 * (2 * arith::sigma(1, n) as i64 - lam as i64);
            assert_eq!(s, rhs, "n={n}");
        }
    }

    #[test]
    fn cohen_examples() {
        assert_eq!(cohen(2, 0), q(1, 120));
        assert_eq!(cohen(1, 3), hurwitz(3));
        for n in 1..200u64 {
            assert_eq!(cohen(1, n), hurwitz(n), "N={n}");
        }
        // H(r, N) vanishes for (-1)^r N = 2, 3 mod 4
        assert_eq!(cohen(3, 1), q(0, 1));
        assert_eq!(cohen(3, 2), q(0, 1));
        assert_eq!(cohen(2, 2), q(0, 1));
        assert_eq!(cohen(2, 3), q(0, 1));
        assert!(!cohen(2, 1).is_zero());
    }

    #[test]
    fn cohen_eisenstein_e41() {
        // e_{4,1}(3) = H(3, 3) / zeta(-5) = 56
        let v = cohen(3, 3) / zeta_negative_odd(3);
        assert_eq!(v, q(56, 1));
        assert_eq!(cohen(3, 4) / zeta_negative_odd(3), q(126, 1));
    }

    #[test]
    fn fundamental_parts() {
        assert_eq!(fundamental_part(-12), (-3, 2));
        assert_eq!(fundamental_part(-16), (-4, 2));
        assert_eq!(fundamental_part(9), (1, 3));
        assert_eq!(fundamental_part(-23 * 25), (-23, 5));
        assert_eq!(fundamental_part(-32), (-8, 2));
    }

    #[test]
    fn primitive_rescaling() {
        let v = vec![q(0, 1), q(-2, 3), q(4, 9)];
        let p = primitive_integral(&v);
        assert_eq!(p, vec![BigInt::from(0), BigInt::from(3), BigInt::from(-2)]);
    }
}
