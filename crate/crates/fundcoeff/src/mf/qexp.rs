//! Exact q-expansions of level-1 integral weight forms.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::hurwitz::bernoulli;
use crate::arith;

/// Truncated power series sum_{n <= X} a(n) q^n with exact rational coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct QExpansion {
    pub weight: BigRational,
    pub level: u64,
    pub coeffs: Vec<BigRational>,
}

impl QExpansion {
    pub fn new(weight: i64, level: u64, coeffs: Vec<BigRational>) -> Self {
        QExpansion { weight: BigRational::from_integer(weight.into()), level, coeffs }
    }

    pub fn from_ints(weight: i64, level: u64, coeffs: &[i128]) -> Self {
        Self::new(weight, level, coeffs.iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect())
    }

    /// Largest exponent kept.
    pub fn max_n(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, n: usize) -> &BigRational {
        &self.coeffs[n]
    }

    fn truncate_to(&self, x: usize) -> &[BigRational] {
        &self.coeffs[..=x.min(self.max_n())]
    }

    /// Sum, truncated at the shorter of the two.
    pub fn add(&self, other: &QExpansion) -> QExpansion {
        let x = self.max_n().min(other.max_n());
        let coeffs = self.truncate_to(x).iter().zip(other.truncate_to(x)).map(|(a, b)| a + b).collect();
        QExpansion { weight: self.weight.clone(), level: self.level.max(other.level), coeffs }
    }

    pub fn sub(&self, other: &QExpansion) -> QExpansion {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, s: &BigRational) -> QExpansion {
        QExpansion {
            weight: self.weight.clone(),
            level: self.level,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Product, truncated at the shorter of the two; weights add.
    pub fn mul(&self, other: &QExpansion) -> QExpansion {
        let x = self.max_n().min(other.max_n());
        let mut coeffs = vec![BigRational::zero(); x + 1];
        for (i, a) in self.truncate_to(x).iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=x - i].iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        QExpansion { weight: &self.weight + &other.weight, level: self.level.max(other.level), coeffs }
    }

    /// Integer coefficients, if all are integral and fit in i128.
    pub fn to_ints(&self) -> Option<Vec<i128>> {
        self.coeffs.iter().map(|c| if c.is_integer() { i128::try_from(c.to_integer()).ok() } else { None }).collect()
    }
}

/// Coefficients of eta(q)^3 / q^{1/8} = sum_j (-1)^j (2j+1) q^{j(j+1)/2}, j >= 0.
fn eta_cubed_sparse(x: usize) -> Vec<(usize, i128)> {
    let mut out = Vec::new();
    let mut j = 0usize;
    while j * (j + 1) / 2 <= x {
        let s = if j.is_multiple_of(2) { 1 } else { -1 };
        out.push((j * (j + 1) / 2, s * (2 * j as i128 + 1)));
        j += 1;
    }
    out
}

fn mul_sparse(dense: &[i128], sparse: &[(usize, i128)]) -> Vec<i128> {
    let x = dense.len() - 1;
    let mut out = vec![0i128; x + 1];
    for &(e, c) in sparse {
        for (i, &a) in dense[..=x - e].iter().enumerate() {
            out[i + e] += c * a;
        }
    }
    out
}

/// prod_{n >= 1} (1 - q^n)^{3m} up to q^x, via m-fold products of the
/// Jacobi series for eta^3.
pub fn eta_power_3m(m: u32, x: usize) -> Vec<i128> {
    let sparse = eta_cubed_sparse(x);
    let mut acc = vec![0i128; x + 1];
    acc[0] = 1;
    for _ in 0..m {
        acc = mul_sparse(&acc, &sparse);
    }
    acc
}

/// prod_{n >= 1} (1 - q^n) up to q^x (Euler's pentagonal series).
pub fn eta_qexp(x: usize) -> QExpansion {
    let mut c = vec![0i128; x + 1];
    let mut k: i64 = 0;
    loop {
        let mut any = false;
        for kk in [k, -k - 1] {
            let e = (kk * (3 * kk - 1) / 2) as usize;
            if e <= x {
                c[e] += if kk.rem_euclid(2) == 0 { 1 } else { -1 };
                any = true;
            }
        }
        if !any {
            break;
        }
        k += 1;
    }
    let mut q = QExpansion::from_ints(0, 1, &c);
    q.weight = BigRational::new(1.into(), 2.into());
    q
}

/// Delta = q prod (1 - q^n)^24 up to q^x.
pub fn delta_ints(x: usize) -> Vec<i128> {
    let mut out = vec![0i128; x + 1];
    if x >= 1 {
        let p = eta_power_3m(8, x - 1);
        out[1..].copy_from_slice(&p);
    }
    out
}

pub fn delta_qexp(x: usize) -> QExpansion {
    QExpansion::from_ints(12, 1, &delta_ints(x))
}

/// Normalized Eisenstein series E_k = 1 - (2k / B_k) sum sigma_{k-1}(n) q^n.
pub fn eisenstein_qexp(k: u32, x: usize) -> QExpansion {
    assert!(k >= 4 && k.is_multiple_of(2), "E_k needs even k >= 4");
    let factor = -BigRational::from_integer(BigInt::from(2 * k)) / bernoulli(k as usize);
    let mut coeffs = vec![BigRational::one()];
    for n in 1..=x {
        let s = BigInt::from(arith::sigma(k - 1, n as u64));
        coeffs.push(&factor * BigRational::from_integer(s));
    }
    QExpansion::new(k as i64, 1, coeffs)
}
