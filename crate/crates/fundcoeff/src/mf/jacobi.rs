//! Index-1 Jacobi forms via the Jacobi-Eisenstein series E_{4,1}, E_{6,1}.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::half::HalfIntForm;
use super::hurwitz::{cohen, primitive_integral, zeta_negative_odd};
use super::qexp::eisenstein_qexp;
use crate::error::{invalid, Result};

/// Index-1 Jacobi form, stored through its theta-decomposition
/// coefficients C(D), D = 4n - r^2.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiForm1 {
    pub k: u32,
    pub coeffs: Vec<BigInt>,
}

impl JacobiForm1 {
    /// Coefficient of q^n zeta^r.
    pub fn coeff_nr(&self, n: i64, r: i64) -> Option<&BigInt> {
        let d = 4 * n - r * r;
        if d < 0 {
            return None;
        }
        self.coeffs.get(d as usize)
    }

    pub fn max_d(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }
}

/// e_{k,1}(D) = H(k - 1, D) / zeta(3 - 2k) for 0 <= D <= x.
pub fn jacobi_eisenstein(k: u32, x: usize) -> Vec<BigRational> {
    let z = zeta_negative_odd(k as usize - 1);
    (0..=x).map(|d| cohen(k as usize - 1, d as u64) / &z).collect()
}

/// C(D) of f(tau) * phi(tau, z) for an elliptic form f and index-1 phi.
fn times_elliptic(f: &[BigRational], e: &[BigRational]) -> Vec<BigRational> {
    (0..e.len())
        .map(|d| {
            let mut s = BigRational::zero();
            let mut i = 0;
            while 4 * i <= d {
                if !f[i].is_zero() {
                    s += &f[i] * &e[d - 4 * i];
                }
                i += 1;
            }
            s
        })
        .collect()
}

/// The cusp form phi_{k,1}, k in {10, 12}, normalized integral and
/// primitive with C(3) > 0.
pub fn jacobi_cusp_index1(k: u32, x: usize) -> Result<JacobiForm1> {
    if k != 10 && k != 12 {
        return invalid(format!("jacobi_cusp_index1: k = {k} not supported (10 or 12)"));
    }
    let xe = x / 4 + 1;
    let e4 = eisenstein_qexp(4, xe);
    let e6 = eisenstein_qexp(6, xe);
    let e41 = jacobi_eisenstein(4, x);
    let e61 = jacobi_eisenstein(6, x);
    let (a, b) = if k == 10 {
        (times_elliptic(&e6.coeffs, &e41), times_elliptic(&e4.coeffs, &e61))
    } else {
        let e4sq = e4.mul(&e4);
        (times_elliptic(&e4sq.coeffs, &e41), times_elliptic(&e6.coeffs, &e61))
    };
    let diff: Vec<BigRational> = a.iter().zip(&b).map(|(u, v)| u - v).collect();
    Ok(JacobiForm1 { k, coeffs: primitive_integral(&diff) })
}

/// The plus-space form of weight k - 1/2 with a(D) = C(D).
pub fn plus_form_from_jacobi(phi: &JacobiForm1) -> HalfIntForm {
    let coeffs = phi.coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect();
    HalfIntForm::new(format!("jacobi{}", phi.k), phi.k - 1, 4, coeffs, BigRational::from_integer(1.into()))
}
