//! Degree-2 Siegel cusp forms of Saito-Kurokawa type, through their
//! half-integral weight source: Fourier coefficients, Fourier-Jacobi
//! slices, U(p), the weight k - 1/2 extraction h_p, Bessel periods and their
//! inversion.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith;
use crate::classgroup::{Bqf, ClassCharacter, ClassGroup, Cyclotomic};
use crate::error::{invalid, Error, Result};
use crate::mf::half::{exemplar, Exemplar, HalfIntForm};

/// S = [[a, b/2], [b/2, c]] with a > 0 and b^2 - 4ac < 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lambda2Matrix {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl Lambda2Matrix {
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self> {
        if a <= 0 || b * b - 4 * a * c >= 0 {
            return invalid(format!("[{a}, {b}/2; {b}/2, {c}] is not positive definite"));
        }
        Ok(Lambda2Matrix { a, b, c })
    }

    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn content(&self) -> i64 {
        arith::gcd(arith::gcd(self.a, self.b), self.c)
    }

    pub fn is_primitive(&self) -> bool {
        self.content() == 1
    }

    pub fn is_fundamental(&self) -> bool {
        arith::is_fundamental(self.disc()).unwrap_or(false)
    }

    /// A^T S A for A in GL_2(Z), via the form (x, y) -> S(ax + by, cx + dy).
    pub fn transform(&self, m: [[i64; 2]; 2]) -> Lambda2Matrix {
        let f = Bqf::new(self.a, self.b, self.c).transform(m);
        Lambda2Matrix { a: f.a, b: f.b, c: f.c }
    }

    pub fn scale(&self, p: i64) -> Lambda2Matrix {
        Lambda2Matrix { a: p * self.a, b: p * self.b, c: p * self.c }
    }

    pub fn as_bqf(&self) -> Bqf {
        Bqf::new(self.a, self.b, self.c)
    }
}

impl From<Bqf> for Lambda2Matrix {
    fn from(f: Bqf) -> Self {
        Lambda2Matrix { a: f.a, b: f.b, c: f.c }
    }
}

/// A Saito-Kurokawa lift of Siegel weight k, given by its source form of
/// weight k - 1/2 in the plus space of level 4.
#[derive(Debug, Clone)]
pub struct SKLift {
    pub k: u32,
    pub source: Arc<HalfIntForm>,
    pub g_label: String,
}

impl SKLift {
    /// The built-in lifts: k = 10 from f19/2 (g in S_18) and k = 12 from
    /// f23/2 (g in S_22), with source coefficients up to `max_disc`.
    pub fn builtin(k: u32, max_disc: u64) -> Result<Self> {
        let which = match k {
            10 => Exemplar::F19,
            12 => Exemplar::F23,
            _ => return invalid(format!("no built-in Saito-Kurokawa lift of weight {k}")),
        };
        Ok(SKLift { k, source: exemplar(which, max_disc)?, g_label: format!("g{}", 2 * k - 2) })
    }

    pub fn from_source(k: u32, source: Arc<HalfIntForm>, g_label: impl Into<String>) -> Result<Self> {
        if source.kappa + 1 != k {
            return invalid("source weight must be k - 1/2");
        }
        if !source.sqrt_scale.is_one() {
            return invalid("source coefficients must be stored without a square-root scale");
        }
        Ok(SKLift { k, source, g_label: g_label.into() })
    }

    fn a_source(&self, n: u64) -> Result<&BigRational> {
        self.source.coeffs.get(n as usize).ok_or(Error::Range { need: n, have: self.source.max_n() })
    }
}

/// a(F, S) = sum_{e | content(S)} e^{k-1} a_source(|disc S| / e^2).
pub fn sk_coefficient(f: &SKLift, s: &Lambda2Matrix) -> Result<BigRational> {
    let absd = s.disc().unsigned_abs();
    let mut acc = BigRational::zero();
    for e in arith::divisors(s.content() as u64) {
        let w = num_traits::pow(BigInt::from(e), f.k as usize - 1);
        acc += BigRational::from_integer(w) * f.a_source(absd / (e * e))?;
    }
    Ok(acc)
}

/// Fourier-Jacobi slice of index m: (n, r) -> a(F, [[n, r/2], [r/2, m]])
/// for 1 <= n <= x and 0 < 4nm - r^2 <= x.
pub fn fourier_jacobi(f: &SKLift, m: i64, x: i64) -> Result<BTreeMap<(i64, i64), BigRational>> {
    if m < 1 || x < 1 {
        return invalid("fourier_jacobi: m and x must be positive");
    }
    let mut out = BTreeMap::new();
    for n in 1..=x {
        let rmax = ((4 * n * m) as f64).sqrt() as i64 + 1;
        for r in -rmax..=rmax {
            let d = 4 * n * m - r * r;
            if d > 0 && d <= x {
                out.insert((n, r), sk_coefficient(f, &Lambda2Matrix { a: n, b: r, c: m })?);
            }
        }
    }
    Ok(out)
}

/// a(U(p) F, S) = a(F, pS).
pub fn u_p(f: &SKLift, p: i64, s: &Lambda2Matrix) -> Result<BigRational> {
    if p < 2 || !arith::is_prime(p as u64) {
        return invalid(format!("U(p) needs a prime, got {p}"));
    }
    sk_coefficient(f, &s.scale(p))
}

/// Coefficients a(m), 0 <= m <= x, of h_p: the sum over 0 <= mu <= 2p - 1
/// with mu^2 = -m mod 4p of a(F, [[(m + mu^2)/4p, mu/2], [mu/2, p]]).
#[derive(Debug, Clone, PartialEq)]
pub struct HpSeries {
    pub p: u64,
    /// Weight k - 1/2 as (2k - 1)/2.
    pub weight_twice: u32,
    pub level: u64,
    pub coeffs: Vec<BigRational>,
}

pub fn h_p_construct(f: &SKLift, p: u64, x: u64) -> Result<HpSeries> {
    if p < 3 || !arith::is_prime(p) {
        return invalid(format!("h_p needs an odd prime, got {p}"));
    }
    let four_p = 4 * p as i64;
    let mut coeffs = vec![BigRational::zero(); x as usize + 1];
    for m in 1..=x as i64 {
        let mut acc = BigRational::zero();
        for mu in 0..2 * p as i64 {
            if (mu * mu + m) % four_p != 0 {
                continue;
            }
            let s = Lambda2Matrix { a: (m + mu * mu) / four_p, b: mu, c: p as i64 };
            acc += sk_coefficient(f, &s)?;
        }
        coeffs[m as usize] = acc;
    }
    Ok(HpSeries { p, weight_twice: 2 * f.k - 1, level: 4 * p, coeffs })
}

/// a(F, S) on the reduced representative of each class.
pub fn class_coefficients(f: &SKLift, g: &ClassGroup) -> Result<Vec<BigRational>> {
    g.elements.iter().map(|&e| sk_coefficient(f, &e.into())).collect()
}

/// B(F, chi) = sum over classes S of a(F, S) chi(S), exactly in Q(zeta_m).
pub fn bessel_period(f: &SKLift, g: &ClassGroup, chi: &ClassCharacter) -> Result<Cyclotomic> {
    Ok(g.character_sum(chi, &class_coefficients(f, g)?))
}

/// (1/h) sum_chi B(F, chi) chi^{-1}(S) for every class S, in class order.
/// Each entry is exact; an irrational result is reported as an error.
pub fn bessel_inversion(f: &SKLift, g: &ClassGroup) -> Result<Vec<BigRational>> {
    let chars = g.characters();
    let periods: Vec<Cyclotomic> = chars.iter().map(|chi| bessel_period(f, g, chi)).collect::<Result<_>>()?;
    let h = BigRational::from_integer(BigInt::from(g.h()));
    (0..g.h())
        .map(|s| {
            let mut acc = Cyclotomic::zero(g.exponent() as usize);
            for (chi, b) in chars.iter().zip(&periods) {
                let m = chi.modulus;
                let ang = g.character_on_form(chi, s) % m;
                acc = acc.add(&b.rotate(((m - ang) % m) as usize));
            }
            acc.scale(&h.recip())
                .as_rational()
                .ok_or(Error::Tolerance(format!("inversion at class {s} is not rational")))
        })
        .collect()
}

/// Outcome of the inequality |B|^2 <= C_F |d|^{k-1} L.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselBound {
    pub holds: bool,
    /// |B|^2 / (|d|^{k-1} L); infinite when L = 0 and B != 0.
    pub implied_c: f64,
}

pub fn bessel_bound_check(b_abs_sq: f64, d: i64, k: u32, l_value: f64, c_f: f64) -> Result<BesselBound> {
    if l_value < 0.0 || !l_value.is_finite() {
        return invalid("bessel_bound_check: L-value must be a nonnegative real");
    }
    if c_f <= 0.0 {
        return invalid("bessel_bound_check: C_F must be positive");
    }
    let scale = (d.unsigned_abs() as f64).powi(k as i32 - 1) * l_value;
    let implied_c = if b_abs_sq == 0.0 {
        0.0
    } else if scale == 0.0 {
        f64::INFINITY
    } else {
        b_abs_sq / scale
    };
    Ok(BesselBound { holds: b_abs_sq <= c_f * scale, implied_c })
}
