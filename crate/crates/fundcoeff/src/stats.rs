//! Measurements over coefficient sequences: sign changes, short-interval
//! sums, moments, large values, shifted convolutions and square-divisor
//! tails. Every n-sum runs in ascending n with compensated summation.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::arith::Sieve;
use crate::error::{invalid, Error, Result};
use crate::mf::HalfIntForm;
use crate::numeric::KahanSum;
use crate::par::{self, Mode};

/// Which n take part in a masked statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mask {
    pub odd: bool,
    pub squarefree: bool,
    /// Require gcd(n, N) = 1 for this N.
    pub coprime_to: u64,
}

impl Mask {
    pub const ALL: Mask = Mask { odd: false, squarefree: false, coprime_to: 1 };
    /// Odd, squarefree, coprime to N: the support of mu^2(n) 1_{(n, 2N) = 1}.
    pub fn odd_squarefree(n_level: u64) -> Mask {
        Mask { odd: true, squarefree: true, coprime_to: n_level }
    }
}

/// Real coefficients c(n), 1 <= n <= X, of a form of weight k + 1/2.
#[derive(Debug, Clone)]
pub struct CoeffSeries {
    pub label: String,
    pub k: u32,
    pub n_level: u64,
    values: Vec<f64>,
    squarefree: Vec<bool>,
}

impl CoeffSeries {
    /// `values[n]` is c(n); `values[0]` is ignored.
    pub fn new(label: impl Into<String>, k: u32, n_level: u64, mut values: Vec<f64>) -> Self {
        if values.is_empty() {
            values.push(0.0);
        }
        values[0] = 0.0;
        let squarefree = Sieve::new(values.len().max(2)).squarefree_table();
        CoeffSeries { label: label.into(), k, n_level, values, squarefree }
    }

    /// Normalized coefficients c(f, n) of a plus-space form.
    pub fn from_form(f: &HalfIntForm) -> Self {
        Self::new(f.label.clone(), f.kappa, 1, f.c_series())
    }

    /// Reads lines "n,c" (header lines and blanks skipped); missing n are 0.
    pub fn from_csv(label: impl Into<String>, k: u32, n_level: u64, text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split(',').map(str::trim);
            let (Some(a), Some(b)) = (it.next(), it.next()) else {
                return invalid(format!("line {}: expected n,c", i + 1));
            };
            match (a.parse::<u64>(), b.parse::<f64>()) {
                (Ok(n), Ok(c)) => pairs.push((n, c)),
                _ if i == 0 => continue,
                _ => return invalid(format!("line {}: cannot parse {line:?}", i + 1)),
            }
        }
        let max = pairs.iter().map(|p| p.0).max().unwrap_or(0) as usize;
        let mut values = vec![0.0; max + 1];
        for (n, c) in pairs {
            values[n as usize] = c;
        }
        Ok(Self::new(label, k, n_level, values))
    }

    pub fn max_n(&self) -> u64 {
        self.values.len() as u64 - 1
    }

    pub fn get(&self, n: u64) -> f64 {
        self.values[n as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn passes(&self, mask: Mask, n: u64) -> bool {
        n >= 1
            && (!mask.odd || n % 2 == 1)
            && (!mask.squarefree || self.squarefree[n as usize])
            && (mask.coprime_to <= 1 || num_integer::gcd(n, mask.coprime_to) == 1)
    }

    /// Masked n in [lo, hi], ascending.
    pub fn masked(&self, mask: Mask, lo: u64, hi: u64) -> Result<Vec<u64>> {
        self.check(hi)?;
        Ok((lo.max(1)..=hi).filter(|&n| self.passes(mask, n)).collect())
    }

    fn check(&self, hi: u64) -> Result<()> {
        if hi > self.max_n() {
            return Err(Error::Range { need: hi, have: self.max_n() });
        }
        Ok(())
    }

    fn default_mask(&self) -> Mask {
        Mask::odd_squarefree(self.n_level)
    }
}

/// W(u) = u^{(k - 1/2)/2} e^{-2 pi u} for a form of weight k + 1/2; 0 for u <= 0.
pub fn weight_w(u: f64, k: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    ((k - 0.5) / 2.0 * u.ln() - 2.0 * PI * u).exp()
}

/// Sign changes among consecutive nonzero masked entries in [lo, hi].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignChanges {
    pub count: usize,
    pub locations: Vec<(u64, u64)>,
}

pub fn sign_changes(s: &CoeffSeries, mask: Mask, lo: u64, hi: u64) -> Result<SignChanges> {
    let mut prev: Option<(u64, f64)> = None;
    let mut locations = Vec::new();
    for n in s.masked(mask, lo, hi)? {
        let c = s.get(n);
        if c == 0.0 {
            continue;
        }
        if let Some((m, pc)) = prev {
            if pc * c < 0.0 {
                locations.push((m, n));
            }
        }
        prev = Some((n, c));
    }
    Ok(SignChanges { count: locations.len(), locations })
}

/// |sum c(n)| and sum |c(n)| over masked n in [x, x + y].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalSums {
    pub abs_of_sum: f64,
    pub sum_of_abs: f64,
}

impl IntervalSums {
    /// A strict inequality forces a sign change in the interval.
    pub fn certifies_flip(&self) -> bool {
        self.abs_of_sum < self.sum_of_abs
    }
}

pub fn short_interval_sums(s: &CoeffSeries, x: u64, y: u64) -> Result<IntervalSums> {
    let ns = s.masked(s.default_mask(), x, x + y)?;
    let plain: KahanSum = ns.iter().map(|&n| s.get(n)).collect();
    let abs: KahanSum = ns.iter().map(|&n| s.get(n).abs()).collect();
    Ok(IntervalSums { abs_of_sum: plain.value().abs(), sum_of_abs: abs.value() })
}

/// Short-interval sums for many starting points, in input order.
pub fn short_interval_batch(s: &CoeffSeries, xs: &[u64], y: u64, mode: Mode) -> Result<Vec<IntervalSums>> {
    par::map(mode, xs, |&x| short_interval_sums(s, x, y)).into_iter().collect()
}

/// sum over masked n in [lo, hi] of |c(n)|^power, power in {2, 4}.
pub fn moment_sums(s: &CoeffSeries, lo: u64, hi: u64, power: u32) -> Result<f64> {
    if power != 2 && power != 4 {
        return invalid(format!("moment power must be 2 or 4, got {power}"));
    }
    let ns = s.masked(s.default_mask(), lo, hi)?;
    Ok(ns.iter().map(|&n| s.get(n).abs().powi(power as i32)).collect::<KahanSum>().value())
}

/// exp((1/82) sqrt(log n / log log n)), defined for n >= 16 (log log n > 1).
pub fn large_threshold(n: u64) -> f64 {
    let l = (n as f64).ln();
    (l / l.ln()).sqrt().exp().powf(1.0 / 82.0)
}

/// Masked n in [lo, hi] with |c(n)| at or above the threshold.
pub fn large_values(s: &CoeffSeries, lo: u64, hi: u64) -> Result<Vec<u64>> {
    if lo < 16 {
        return invalid("large_values needs lo >= 16 so that log log n > 1");
    }
    Ok(s.masked(s.default_mask(), lo, hi)?.into_iter().filter(|&n| s.get(n).abs() >= large_threshold(n)).collect())
}

/// sum_n c(n) c(n+h) e(n v / r) W(n/X) W((n+h)/X), cut where W < 1e-16 max W.
pub fn shifted_convolution(s: &CoeffSeries, h: i64, v: i64, r: u64, x: f64) -> Result<Complex64> {
    if h == 0 {
        return invalid("shifted_convolution needs h != 0");
    }
    if r == 0 || num_integer::gcd(v.unsigned_abs(), r) != 1 {
        return invalid("shifted_convolution needs r >= 1 and (v, r) = 1");
    }
    if (h.unsigned_abs() as f64) >= x.sqrt() {
        return invalid("shifted_convolution needs |h| < sqrt(X)");
    }
    let k = s.k as f64;
    let u_peak = (k - 0.5) / (4.0 * PI);
    let w_max = weight_w(u_peak, k);
    let mut u_cut = u_peak.max(1.0);
    while weight_w(u_cut, k) >= 1e-16 * w_max {
        u_cut += 0.25;
    }
    let n_top = (u_cut * x).ceil() as i64;
    s.check((n_top + h.abs()) as u64)?;
    let mut re = KahanSum::new();
    let mut im = KahanSum::new();
    for n in 1..=n_top {
        let m = n + h;
        if m < 1 {
            continue;
        }
        let w = s.get(n as u64) * s.get(m as u64) * weight_w(n as f64 / x, k) * weight_w(m as f64 / x, k);
        if w == 0.0 {
            continue;
        }
        let ang = 2.0 * PI * ((n as i128 * v as i128).rem_euclid(r as i128) as f64) / r as f64;
        re.add(w * ang.cos());
        im.add(w * ang.sin());
    }
    Ok(Complex64::new(re.value(), im.value()))
}

/// sum_{d > Y} sum_{n <= X, (n, 2N) = 1, d^2 | n} |c(n)|, with the per-d terms.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareTail {
    pub total: f64,
    pub per_d: Vec<(u64, f64)>,
}

pub fn square_divisor_tail(s: &CoeffSeries, x: u64, y: u64) -> Result<SquareTail> {
    if y < 1 {
        return invalid("square_divisor_tail needs Y >= 1");
    }
    s.check(x)?;
    let mask = Mask { odd: true, squarefree: false, coprime_to: s.n_level };
    let mut per_d = Vec::new();
    let mut d = y + 1;
    while d * d <= x {
        let sum: KahanSum =
            (1..=x / (d * d)).map(|j| j * d * d).filter(|&n| s.passes(mask, n)).map(|n| s.get(n).abs()).collect();
        per_d.push((d, sum.value()));
        d += 1;
    }
    let total = per_d.iter().map(|t| t.1).collect::<KahanSum>().value();
    Ok(SquareTail { total, per_d })
}
