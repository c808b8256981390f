//! Hecke eigenvalues of the normalized eigenform spanning a one-dimensional
//! S_k(SL_2(Z)), from the Eichler-Selberg trace formula
//! tr T(p) = -1/2 sum_{t^2 < 4p} P_k(t, p) H(4p - t^2) - 1.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::hurwitz::hurwitz12_table;
use crate::arith::Sieve;
use crate::error::{Error, Result};
use crate::numeric::KahanSum;
use crate::par::{self, Mode};

/// Weights with dim S_k(SL_2(Z)) = 1.
pub const ONE_DIMENSIONAL: [u32; 6] = [12, 16, 18, 20, 22, 26];

/// Primes up to this bound use exact integer arithmetic.
pub const EXACT_LIMIT: u64 = 2000;

fn check_weight(k: u32) -> Result<()> {
    if ONE_DIMENSIONAL.contains(&k) {
        Ok(())
    } else {
        Err(Error::Invalid(format!("S_{k} is not one-dimensional")))
    }
}

/// Exact a(p) via the trace formula; `h12` must cover 4p.
pub fn trace_exact(k: u32, p: u64, h12: &[i64]) -> Result<BigInt> {
    check_weight(k)?;
    let four_p = 4 * p as i64;
    if h12.len() as i64 <= four_p {
        return Err(Error::Range { need: 4 * p, have: h12.len() as u64 - 1 });
    }
    let mut s = BigInt::zero();
    let mut t: i64 = 0;
    while t * t < four_p {
        // h_{k-2}(rho, rhobar) with rho + rhobar = t, rho rhobar = p
        let (mut u0, mut u1) = (BigInt::from(1), BigInt::from(t));
        for _ in 1..k - 2 {
            let u2 = &u1 * t - &u0 * p;
            u0 = u1;
            u1 = u2;
        }
        let term = u1 * h12[(four_p - t * t) as usize];
        s += if t == 0 { term } else { term * 2 };
        t += 1;
    }
    // tr = -s / 24 - 1
    let (q, r): (BigInt, BigInt) = (&s / 24, &s % 24);
    if !r.is_zero() {
        return Err(Error::Tolerance(format!("trace formula not integral at p={p}")));
    }
    Ok(-q - 1)
}

/// Normalized lambda(p) = a(p)/p^{(k-1)/2} in floating point:
/// -(1/(2 sqrt p)) sum_t U_{k-2}(t/(2 sqrt p)) H(4p - t^2) - p^{-(k-1)/2}.
pub fn trace_float(k: u32, p: u64, h12: &[i64]) -> f64 {
    let four_p = 4 * p as i64;
    let sp = (p as f64).sqrt();
    let mut acc = KahanSum::new();
    let mut t: i64 = 0;
    while t * t < four_p {
        let x = t as f64 / (2.0 * sp);
        let (mut u0, mut u1) = (1.0, 2.0 * x);
        for _ in 1..k - 2 {
            let u2 = 2.0 * x * u1 - u0;
            u0 = u1;
            u1 = u2;
        }
        let h = h12[(four_p - t * t) as usize] as f64 / 12.0;
        acc.add(if t == 0 { u1 * h } else { 2.0 * u1 * h });
        t += 1;
    }
    -acc.value() / (2.0 * sp) - (p as f64).powf(-(k as f64 - 1.0) / 2.0)
}

/// Normalized eigenvalues lambda(p) for all primes p <= x, in increasing order.
/// Exact below [`EXACT_LIMIT`], floating point above, with agreement checked
/// on primes in (EXACT_LIMIT/2, EXACT_LIMIT].
pub fn normalized_prime_eigenvalues(k: u32, x: u64, mode: Mode) -> Result<Vec<(u64, f64)>> {
    check_weight(k)?;
    let primes: Vec<u64> = Sieve::new(x.max(2) as usize).primes_up_to(x).collect();
    let h12 = hurwitz12_table(4 * x.max(EXACT_LIMIT) as usize);
    let norm = |p: u64| (p as f64).powf((k as f64 - 1.0) / 2.0);
    let vals: Vec<Result<f64>> = par::map(mode, &primes, |&p| {
        if p <= EXACT_LIMIT {
            let a = trace_exact(k, p, &h12)?;
            let exact = a.to_f64().unwrap() / norm(p);
            if p > EXACT_LIMIT / 2 {
                let fl = trace_float(k, p, &h12);
                if (fl - exact).abs() > 1e-9 {
                    return Err(Error::Tolerance(format!("trace formula float/exact mismatch at p={p}")));
                }
            }
            Ok(exact)
        } else {
            Ok(trace_float(k, p, &h12))
        }
    });
    primes.into_iter().zip(vals).map(|(p, v)| Ok((p, v?))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mf::qexp::{delta_qexp, eisenstein_qexp};

    #[test]
    fn tau_and_e6_delta() {
        let h12 = hurwitz12_table(4 * 200);
        assert_eq!(trace_exact(12, 2, &h12).unwrap(), BigInt::from(-24));
        assert_eq!(trace_exact(12, 3, &h12).unwrap(), BigInt::from(252));
        assert_eq!(trace_exact(18, 2, &h12).unwrap(), BigInt::from(-528));
        let x = 200;
        let d = delta_qexp(x);
        let g18 = eisenstein_qexp(6, x).mul(&d);
        let g22 = eisenstein_qexp(4, x).mul(&eisenstein_qexp(6, x)).mul(&d);
        for p in Sieve::new(x).primes_up_to(x as u64) {
            let pi = p as usize;
            assert_eq!(trace_exact(12, p, &h12).unwrap(), d.coeffs[pi].to_integer(), "tau({p})");
            assert_eq!(trace_exact(18, p, &h12).unwrap(), g18.coeffs[pi].to_integer());
            assert_eq!(trace_exact(22, p, &h12).unwrap(), g22.coeffs[pi].to_integer());
        }
        assert!(trace_exact(14, 2, &h12).is_err());
    }

    #[test]
    fn float_matches_exact_and_deligne() {
        let v = normalized_prime_eigenvalues(22, 5000, Mode::default()).unwrap();
        assert!(v.iter().all(|(_, l)| l.abs() <= 2.0));
        let h12 = hurwitz12_table(4 * 2000);
        for &(p, l) in v.iter().filter(|(p, _)| *p < 200) {
            assert!((trace_float(22, p, &h12) - l).abs() < 1e-12);
        }
    }
}
