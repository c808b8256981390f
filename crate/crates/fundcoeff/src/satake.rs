//! Satake-level machinery: power sums for pi, std(pi), ad(pi) and AI(chi),
//! the local identities linking them, the prime-power sum bounding log L,
//! the smoothed prime sum P(chi; x) and its tail frequency A_K(V; x), brute
//! force moment bounds over class group characters, the unit-circle random
//! model and the Gaussian integral closing the large-deviation argument.

use crate::arith::{self, Sieve};
use crate::classgroup::{ClassCharacter, ClassGroup, PrimeIdeal};
use crate::error::{invalid, Error, Result};
use crate::lfun::EigenformL;
use crate::numeric::{integrate, ksum};
use crate::par::{self, Mode};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Either a root of unity exp(2 pi i num/den) or zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootValue {
    Root { num: u64, den: u64 },
    Zero,
}

impl RootValue {
    pub fn root(num: u64, den: u64) -> Self {
        let den = den.max(1);
        let num = num % den;
        let g = num_integer::gcd(num, den);
        RootValue::Root { num: num / g, den: den / g }
    }

    pub fn pow(self, n: u64) -> Self {
        match self {
            RootValue::Root { num, den } => RootValue::root((num % den) * (n % den) % den, den),
            RootValue::Zero => {
                if n == 0 {
                    RootValue::root(0, 1)
                } else {
                    RootValue::Zero
                }
            }
        }
    }

    pub fn to_complex(self) -> Complex64 {
        match self {
            RootValue::Root { num, den } => Complex64::from_polar(1.0, 2.0 * PI * num as f64 / den as f64),
            RootValue::Zero => Complex64::new(0.0, 0.0),
        }
    }
}

/// Satake pair of AI(chi) at one prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SatakeAI {
    pub alpha: RootValue,
    pub beta: RootValue,
}

impl SatakeAI {
    pub fn new(alpha: RootValue, beta: RootValue) -> Self {
        SatakeAI { alpha, beta }
    }

    /// a_AI(p^n) = alpha^n + beta^n (complex; real for genuine AI data).
    pub fn power_sum_complex(&self, n: u64) -> Complex64 {
        self.alpha.pow(n).to_complex() + self.beta.pow(n).to_complex()
    }

    pub fn power_sum(&self, n: u64) -> f64 {
        self.power_sum_complex(n).re
    }
}

/// Unitary Satake parameters (alpha, beta) of pi at one prime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalGSp4 {
    pub alpha: Complex64,
    pub beta: Complex64,
}

/// Which L-function's Satake set to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Star {
    Pi,
    Std,
    Ad,
}

impl LocalGSp4 {
    pub fn from_angles(theta1: f64, theta2: f64) -> Self {
        LocalGSp4 { alpha: Complex64::from_polar(1.0, theta1), beta: Complex64::from_polar(1.0, theta2) }
    }

    pub fn pi_set(&self) -> [Complex64; 4] {
        let (a, b) = (self.alpha, self.beta);
        [a, a.inv(), b, b.inv()]
    }

    pub fn std_set(&self) -> [Complex64; 5] {
        let (a, b) = (self.alpha, self.beta);
        [Complex64::new(1.0, 0.0), a * b, a / b, b / a, (a * b).inv()]
    }

    pub fn ad_set(&self) -> [Complex64; 10] {
        let (a, b) = (self.alpha, self.beta);
        let one = Complex64::new(1.0, 0.0);
        [a * a, (a * a).inv(), b * b, (b * b).inv(), a * b, b / a, a / b, (a * b).inv(), one, one]
    }

    /// a_star(p^n) = sum of n-th powers over the Satake set.
    pub fn power_sum(&self, star: Star, n: i32) -> f64 {
        let s: Complex64 = match star {
            Star::Pi => self.pi_set().iter().map(|z| z.powi(n)).sum(),
            Star::Std => self.std_set().iter().map(|z| z.powi(n)).sum(),
            Star::Ad => self.ad_set().iter().map(|z| z.powi(n)).sum(),
        };
        s.re
    }
}

/// a_{pi x AI}(p^n) = a_pi(p^n) a_AI(p^n).
pub fn a_pi_times_ai(pi: &LocalGSp4, ai: &SatakeAI, n: u32) -> f64 {
    pi.power_sum(Star::Pi, n as i32) * ai.power_sum(n as u64)
}

/// Residuals of the three local identities
/// a_pi(p^2) = a_ad - a_std - 1, a_pi(p)^2 = a_ad + a_std + 1,
/// and the Rankin-Selberg square identity at p.
pub fn local_identity_residuals(pi: &LocalGSp4) -> (f64, f64) {
    let a2 = pi.power_sum(Star::Pi, 2);
    let a1 = pi.power_sum(Star::Pi, 1);
    let ad = pi.power_sum(Star::Ad, 1);
    let sd = pi.power_sum(Star::Std, 1);
    ((a2 - (ad - sd - 1.0)).abs(), (a1 * a1 - (ad + sd + 1.0)).abs())
}

/// |a_{pi x AI(chi)}(p^2) - (a_ad - a_std - 1)(a_{AI(chi^2)}(p) + (d/p)^2 - (d/p))|.
/// `ai_sq` holds the Satake data of AI(chi^2) at p.
pub fn rs_square_identity_check(pi: &LocalGSp4, ai: &SatakeAI, ai_sq: &SatakeAI, d: i64, p: u64) -> f64 {
    let lhs = a_pi_times_ai(pi, ai, 2);
    let k = arith::kronecker(d, p as i64) as f64;
    let ad = pi.power_sum(Star::Ad, 1);
    let sd = pi.power_sum(Star::Std, 1);
    let rhs = (ad - sd - 1.0) * (ai_sq.power_sum(1) + k * k - k);
    (lhs - rhs).abs()
}

/// Satake data of pi at every prime up to a bound.
#[derive(Debug, Clone)]
pub struct SatakeGSp4 {
    pub label: String,
    primes: Vec<u64>,
    locals: Vec<LocalGSp4>,
}

impl SatakeGSp4 {
    pub fn from_locals(label: impl Into<String>, primes: Vec<u64>, locals: Vec<LocalGSp4>) -> Self {
        SatakeGSp4 { label: label.into(), primes, locals }
    }

    /// Uniformly random unitary (alpha_p, beta_p) for p <= x.
    pub fn fuzz(x: u64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let primes: Vec<u64> = Sieve::new(x as usize).primes_up_to(x).collect();
        let locals = primes
            .iter()
            .map(|_| LocalGSp4::from_angles(rng.random::<f64>() * 2.0 * PI, rng.random::<f64>() * 2.0 * PI))
            .collect();
        SatakeGSp4 { label: format!("fuzz(seed={seed})"), primes, locals }
    }

    /// Yoshida-shape data: L(s, pi) = L(s, g1) L(s, g2), so alpha_p and
    /// beta_p are the Satake parameters of two elliptic eigenforms.
    pub fn yoshida(g1: &EigenformL, g2: &EigenformL, x: u64) -> Result<Self> {
        let primes: Vec<u64> = g1.primes().iter().copied().take_while(|&p| p <= x).collect();
        if g1.max_n() < x || g2.max_n() < x {
            return Err(Error::Range { need: x, have: g1.max_n().min(g2.max_n()) });
        }
        let angle = |l: f64| (l / 2.0).clamp(-1.0, 1.0).acos();
        let locals = primes.iter().map(|&p| LocalGSp4::from_angles(angle(g1.lambda(p)), angle(g2.lambda(p)))).collect();
        Ok(SatakeGSp4 { label: format!("yoshida({}, {})", g1.label, g2.label), primes, locals })
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn get(&self, p: u64) -> Option<&LocalGSp4> {
        self.primes.binary_search(&p).ok().map(|i| &self.locals[i])
    }

    fn covers(&self, x: f64) -> Result<()> {
        let last = self.primes.last().copied().unwrap_or(1);
        let next_needed = Sieve::new((x as usize).max(2)).primes_up_to(x as u64).last().unwrap_or(0);
        if next_needed > last {
            return Err(Error::Range { need: next_needed, have: last });
        }
        Ok(())
    }
}

/// Satake data of AI(chi) at p as a closure-friendly helper.
pub fn ai_data<'a>(g: &'a ClassGroup, chi: &ClassCharacter) -> impl Fn(u64) -> SatakeAI + 'a {
    let chi = chi.clone();
    move |p| g.ai_satake(&chi, p)
}

/// Prime-power sum
/// sum_{p^n <= x, p not dividing N} a_{pi x AI}(p^n) / (n p^{(n/2)(1 + 1/log x)}) + C0 log|d| / log x.
pub fn chandee_sum(pi: &SatakeGSp4, ai: &dyn Fn(u64) -> SatakeAI, d: i64, x: f64, c0: f64, level: u64) -> Result<f64> {
    if x <= 1.0 {
        return invalid("chandee_sum: x must exceed 1");
    }
    pi.covers(x)?;
    let lx = x.ln();
    let mut terms = Vec::new();
    for &p in pi.primes().iter().take_while(|&&p| p as f64 <= x) {
        if level.is_multiple_of(p) {
            continue;
        }
        let loc = pi.get(p).unwrap();
        let a = ai(p);
        let mut n = 1u32;
        let mut pn = p as f64;
        while pn <= x {
            let v = a_pi_times_ai(loc, &a, n);
            terms.push(v / (n as f64 * (p as f64).powf(n as f64 / 2.0 * (1.0 + 1.0 / lx))));
            n += 1;
            pn *= p as f64;
        }
    }
    Ok(ksum(terms) + c0 * (d.unsigned_abs() as f64).ln() / lx)
}

/// The termwise bound 8 sum_{p^n <= x} 1/(n p^{n/2}) for [`chandee_sum`]
/// without the C0 term.
pub fn chandee_trivial_bound(x: f64) -> f64 {
    let sieve = Sieve::new((x as usize).max(2));
    let mut terms = Vec::new();
    for p in sieve.primes_up_to(x as u64) {
        let mut n = 1;
        let mut pn = p as f64;
        while pn <= x {
            terms.push(8.0 / (n as f64 * pn.sqrt()));
            n += 1;
            pn *= p as f64;
        }
    }
    ksum(terms)
}

/// P(chi; x) = sum_{p <= x, p not dividing N} a_pi(p) a_AI(p) / p^{1/2 + 1/log x} log(x/p)/log x.
pub fn p_lambda(pi: &SatakeGSp4, ai: &dyn Fn(u64) -> SatakeAI, x: f64, level: u64) -> Result<f64> {
    if x < 2.0 {
        return invalid("P(chi; x) needs x >= 2");
    }
    pi.covers(x)?;
    let lx = x.ln();
    Ok(ksum(pi.primes().iter().take_while(|&&p| p as f64 <= x).filter(|&&p| !level.is_multiple_of(p)).map(|&p| {
        let w = (p as f64).powf(-0.5 - 1.0 / lx) * (x / p as f64).ln() / lx;
        pi.get(p).unwrap().power_sum(Star::Pi, 1) * ai(p).power_sum(1) * w
    })))
}

/// Values P(chi; x) for every character of the class group, in
/// `ClassGroup::characters` order.
pub fn p_lambda_all(pi: &SatakeGSp4, g: &ClassGroup, x: f64, level: u64, mode: Mode) -> Result<Vec<f64>> {
    if x < 2.0 {
        return invalid("P(chi; x) needs x >= 2");
    }
    pi.covers(x)?;
    let lx = x.ln();
    let data: Vec<(f64, PrimeIdeal)> = pi
        .primes()
        .iter()
        .take_while(|&&p| p as f64 <= x)
        .filter(|&&p| !level.is_multiple_of(p))
        .map(|&p| {
            let w = (p as f64).powf(-0.5 - 1.0 / lx) * (x / p as f64).ln() / lx;
            (pi.get(p).unwrap().power_sum(Star::Pi, 1) * w, g.prime_ideal_class(p))
        })
        .collect();
    let chars = g.characters();
    Ok(par::map(mode, &chars, |chi| {
        let m = chi.modulus as f64;
        ksum(data.iter().map(|(w, kind)| match *kind {
            PrimeIdeal::Inert => 0.0,
            PrimeIdeal::Ramified(c) => w * (2.0 * PI * chi.angles[c] as f64 / m).cos(),
            PrimeIdeal::Split { p, .. } => w * 2.0 * (2.0 * PI * chi.angles[p] as f64 / m).cos(),
        }))
    }))
}

/// A_K(V; x) for each V in `vs`: fraction of characters with P(chi; x) > V.
pub fn a_k(pi: &SatakeGSp4, g: &ClassGroup, vs: &[f64], x: f64, level: u64) -> Result<Vec<f64>> {
    let values = p_lambda_all(pi, g, x, level, Mode::default())?;
    let h = values.len() as f64;
    Ok(vs.iter().map(|&v| values.iter().filter(|&&p| p > v).count() as f64 / h).collect())
}

/// Which primes a moment bound ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentCase {
    /// p not dividing d (only split primes contribute).
    Unramified,
    /// p dividing d.
    Ramified,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

fn double_factorial_ratio(ell: u32) -> f64 {
    // (2l)! / (2^l l!) = (2l - 1)!!
    (1..=ell).map(|i| (2 * i - 1) as f64).product()
}

/// Brute-force check of the 2l-th moment bound over all characters.
/// The size condition x^l < sqrt|d| / 2 is applied to the largest prime
/// that carries a nonzero weight.
pub fn moment_bound_check(
    g: &ClassGroup,
    b: &BTreeMap<u64, f64>,
    x: f64,
    ell: u32,
    case: MomentCase,
    level: u64,
) -> Result<MomentCheck> {
    if ell == 0 {
        return invalid("moment_bound_check: l must be positive");
    }
    let primes: Vec<(u64, f64, PrimeIdeal)> = b
        .iter()
        .filter(|(&p, &bp)| p as f64 <= x && bp != 0.0 && !level.is_multiple_of(p) && arith::is_prime(p))
        .map(|(&p, &bp)| (p, bp, g.prime_ideal_class(p)))
        .filter(|(_, _, kind)| match case {
            MomentCase::Unramified => !matches!(kind, PrimeIdeal::Ramified(_)),
            MomentCase::Ramified => matches!(kind, PrimeIdeal::Ramified(_)),
        })
        .collect();
    let active: Vec<&(u64, f64, PrimeIdeal)> =
        primes.iter().filter(|(_, _, k)| !matches!(k, PrimeIdeal::Inert)).collect();
    if let Some(&&(pmax, _, _)) = active.last() {
        let lhs_size = (pmax as f64).powi(ell as i32);
        if lhs_size >= (g.d.unsigned_abs() as f64).sqrt() / 2.0 {
            return Err(Error::Precondition(format!("moment_bound_check: {pmax}^{ell} >= sqrt|d|/2 for d = {}", g.d)));
        }
    }
    let chars = g.characters();
    let powers: Vec<f64> = chars
        .iter()
        .map(|chi| {
            let s = ksum(active.iter().map(|(p, bp, kind)| {
                let a = match *kind {
                    PrimeIdeal::Split { p: c, pbar } => chi.value_complex(c).re + chi.value_complex(pbar).re,
                    PrimeIdeal::Ramified(c) => chi.value_complex(c).re,
                    PrimeIdeal::Inert => 0.0,
                };
                bp * a / (*p as f64).sqrt()
            }));
            s.powi(2 * ell as i32)
        })
        .collect();
    let lhs = ksum(powers) / chars.len() as f64;
    let mass = ksum(active.iter().map(|(p, bp, _)| bp * bp / *p as f64));
    let factor = if case == MomentCase::Unramified { 2.0 } else { 1.0 };
    let rhs = double_factorial_ratio(ell) * (factor * mass).powi(ell as i32);
    Ok(MomentCheck { lhs, rhs, holds: lhs <= rhs * (1.0 + 1e-12) + 1e-15 })
}

/// Monte Carlo statistics of sum_{p < X, (d/p) = 1} b(p) (X_p + 1/X_p) / sqrt p
/// with X_p independent and uniform on the unit circle.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomModelStats {
    pub samples: usize,
    pub mean: f64,
    pub variance: f64,
    pub predicted_variance: f64,
    pub histogram_edges: Vec<f64>,
    pub histogram: Vec<u64>,
}

const MC_BATCH: usize = 4096;

pub fn random_model_mc(
    d: i64,
    b: &BTreeMap<u64, f64>,
    x: u64,
    samples: usize,
    seed: u64,
    mode: Mode,
) -> Result<RandomModelStats> {
    if samples < 2 {
        return invalid("random_model_mc: need at least two samples");
    }
    let weights: Vec<f64> = b
        .iter()
        .filter(|(&p, _)| p < x && arith::kronecker(d, p as i64) == 1)
        .map(|(&p, &bp)| bp / (p as f64).sqrt())
        .collect();
    let predicted_variance = 2.0 * ksum(weights.iter().map(|w| w * w));
    let batches = samples.div_ceil(MC_BATCH);
    let parts: Vec<Vec<f64>> = par::map_range(mode, batches, |bi| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(bi as u64 + 1);
        let n = MC_BATCH.min(samples - bi * MC_BATCH);
        (0..n).map(|_| ksum(weights.iter().map(|w| 2.0 * w * (2.0 * PI * rng.random::<f64>()).cos()))).collect()
    });
    let all: Vec<f64> = parts.into_iter().flatten().collect();
    let mean = ksum(all.iter().copied()) / samples as f64;
    let variance = ksum(all.iter().map(|v| (v - mean).powi(2))) / (samples - 1) as f64;
    let sd = predicted_variance.sqrt().max(1e-300);
    let bins = 40usize;
    let lo = -5.0 * sd;
    let width = 10.0 * sd / bins as f64;
    let histogram_edges: Vec<f64> = (0..=bins).map(|i| lo + i as f64 * width).collect();
    let mut histogram = vec![0u64; bins];
    for v in &all {
        let k = ((v - lo) / width).floor();
        if k >= 0.0 && (k as usize) < bins {
            histogram[k as usize] += 1;
        }
    }
    Ok(RandomModelStats { samples, mean, variance, predicted_variance, histogram_edges, histogram })
}

/// Relative residual |int e^{-t^2/(2 sigma) + t/2} dt - sqrt(2 pi sigma) e^{sigma/8}| / RHS.
pub fn gaussian_integral_check(sigma: f64) -> Result<f64> {
    if !(0.1..=100.0).contains(&sigma) {
        return invalid("gaussian_integral_check: sigma outside [0.1, 100]");
    }
    let rhs = (2.0 * PI * sigma).sqrt() * (sigma / 8.0).exp();
    let centre = sigma / 2.0;
    let half = 40.0 * sigma.sqrt();
    let (v, _) = integrate(|t| (-t * t / (2.0 * sigma) + t / 2.0).exp(), centre - half, centre + half, 1e-14 * rhs);
    Ok((v - rhs).abs() / rhs)
}

/// Two prime sums over squares and split primes:
/// (i) sum_{p <= sqrt x} a_{pi x AI}(p^2) p^{-1 - 2/log x} log(x/p)/log x,
/// (ii) sum_{p <= x, (d/p) = 1} a_pi(p)^2 / p,
/// returned with the comparison values -log log x and (1/2) log log x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimeSquareSums {
    pub prime_squares: f64,
    pub split_squares: f64,
    pub minus_loglog: f64,
    pub half_loglog: f64,
}

pub fn prime_square_sums(pi: &SatakeGSp4, ai: &dyn Fn(u64) -> SatakeAI, d: i64, x: f64) -> Result<PrimeSquareSums> {
    if x < 3.0 {
        return invalid("prime_square_sums: x must be at least 3");
    }
    pi.covers(x)?;
    let lx = x.ln();
    let prime_squares = ksum(pi.primes().iter().take_while(|&&p| (p as f64) <= x.sqrt()).map(|&p| {
        let pf = p as f64;
        a_pi_times_ai(pi.get(p).unwrap(), &ai(p), 2) * pf.powf(-1.0 - 2.0 / lx) * (x / pf).ln() / lx
    }));
    let split_squares = ksum(
        pi.primes()
            .iter()
            .take_while(|&&p| p as f64 <= x)
            .filter(|&&p| arith::kronecker(d, p as i64) == 1)
            .map(|&p| pi.get(p).unwrap().power_sum(Star::Pi, 1).powi(2) / p as f64),
    );
    let ll = lx.ln();
    Ok(PrimeSquareSums { prime_squares, split_squares, minus_loglog: -ll, half_loglog: 0.5 * ll })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classgroup::class_group;

    #[test]
    fn worked_point_alpha_i_beta_1() {
        let loc = LocalGSp4 { alpha: Complex64::new(0.0, 1.0), beta: Complex64::new(1.0, 0.0) };
        assert!((loc.power_sum(Star::Pi, 1) - 2.0).abs() < 1e-15);
        assert!((loc.power_sum(Star::Std, 1) - 1.0).abs() < 1e-15);
        assert!((loc.power_sum(Star::Ad, 1) - 2.0).abs() < 1e-15);
        assert!(loc.power_sum(Star::Pi, 2).abs() < 1e-15);
        let (r1, r2) = local_identity_residuals(&loc);
        assert!(r1 < 1e-15 && r2 < 1e-15);
    }

    #[test]
    fn fuzzed_identities_and_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let loc = LocalGSp4::from_angles(rng.random::<f64>() * 6.3, rng.random::<f64>() * 6.3);
            let (r1, r2) = local_identity_residuals(&loc);
            assert!(r1 < 1e-12 && r2 < 1e-12);
            let t = rng.random::<f64>();
            let ai = SatakeAI::new(
                RootValue::root((t * 1e6) as u64, 1_000_000),
                RootValue::root(1_000_000 - (t * 1e6) as u64, 1_000_000),
            );
            let ai2 = SatakeAI::new(ai.alpha.pow(2), ai.beta.pow(2));
            assert!(rs_square_identity_check(&loc, &ai, &ai2, -23, 2) < 1e-12);
            for n in 1..=20 {
                assert!(a_pi_times_ai(&loc, &ai, n).abs() <= 8.0 + 1e-12);
            }
        }
    }

    #[test]
    fn rs_square_inert_and_ramified() {
        let g = class_group(-23).unwrap();
        let chars = g.characters();
        let loc = LocalGSp4::from_angles(0.3, 1.1);
        for chi in &chars {
            let chi2 = ClassCharacter {
                exps: chi.exps.clone(),
                modulus: chi.modulus,
                angles: chi.angles.iter().map(|a| 2 * a % chi.modulus).collect(),
            };
            for p in [2u64, 3, 5, 7, 11, 23] {
                let ai = g.ai_satake(chi, p);
                let ai2 = g.ai_satake(&chi2, p);
                assert!(rs_square_identity_check(&loc, &ai, &ai2, -23, p) < 1e-12, "p={p}");
            }
            let inert = g.ai_satake(chi, 5);
            assert!(inert.power_sum(1).abs() < 1e-15);
            assert!((inert.power_sum(2) - 2.0).abs() < 1e-15);
        }
        let order3 = chars.iter().find(|c| !c.is_trivial()).unwrap();
        let ai = g.ai_satake(order3, 2);
        assert!((ai.power_sum(1) + 1.0).abs() < 1e-14);
        assert!((g.ai_satake(&chars[0], 2).power_sum(1) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn moment_equality_case() {
        let g = class_group(-23).unwrap();
        let b: BTreeMap<u64, f64> = [(2u64, 1.0)].into_iter().collect();
        let m = moment_bound_check(&g, &b, 4.0, 1, MomentCase::Unramified, 1).unwrap();
        assert!((m.lhs - 1.0).abs() < 1e-14);
        assert!((m.rhs - 1.0).abs() < 1e-14);
        assert!(m.holds);
        let b3: BTreeMap<u64, f64> = [(3u64, 1.0)].into_iter().collect();
        assert!(moment_bound_check(&g, &b3, 4.0, 1, MomentCase::Unramified, 1).is_err());
        let empty = moment_bound_check(&g, &BTreeMap::new(), 4.0, 2, MomentCase::Unramified, 1).unwrap();
        assert_eq!((empty.lhs, empty.rhs, empty.holds), (0.0, 0.0, true));
    }

    #[test]
    fn moment_ramified_single_prime() {
        let g = class_group(-10007).unwrap();
        let b: BTreeMap<u64, f64> = [(10007u64, 2.0)].into_iter().collect();
        // 10007 > sqrt(10007)/2, so the precondition rejects it
        assert!(moment_bound_check(&g, &b, 2e4, 1, MomentCase::Ramified, 1).is_err());
        let g = class_group(-1155).unwrap();
        let b: BTreeMap<u64, f64> = [(3u64, 1.5)].into_iter().collect();
        let m = moment_bound_check(&g, &b, 4.0, 1, MomentCase::Ramified, 1).unwrap();
        assert!(m.holds);
        assert!(m.lhs <= 1.5 * 1.5 / 3.0 + 1e-12);
    }

    #[test]
    fn gaussian_identity() {
        for s in [0.5, 1.0, 2.6, 10.0] {
            assert!(gaussian_integral_check(s).unwrap() < 1e-8);
        }
        assert!(gaussian_integral_check(0.01).is_err());
    }

    #[test]
    fn random_model_reproducible_and_centred() {
        let b: BTreeMap<u64, f64> = Sieve::new(200).primes().iter().map(|&p| (p as u64, 1.0)).collect();
        let a = random_model_mc(-23, &b, 200, 20_000, 11, Mode::Parallel).unwrap();
        let c = random_model_mc(-23, &b, 200, 20_000, 11, Mode::Sequential).unwrap();
        assert_eq!(a, c);
        assert!(a.mean.abs() < 4.0 * a.predicted_variance.sqrt() / (20_000f64).sqrt());
        let zero: BTreeMap<u64, f64> = BTreeMap::new();
        let z = random_model_mc(-23, &zero, 200, 10_000, 1, Mode::Sequential).unwrap();
        assert_eq!(z.variance, 0.0);
    }

    #[test]
    fn p_lambda_trivial_character_counts_split_primes() {
        let g = class_group(-23).unwrap();
        let chars = g.characters();
        let pi = SatakeGSp4::from_locals(
            "ones",
            Sieve::new(100).primes().iter().map(|&p| p as u64).collect(),
            vec![LocalGSp4::from_angles(0.0, 0.0); 25],
        );
        let x = 50.0f64;
        let ai = ai_data(&g, &chars[0]);
        let v = p_lambda(&pi, &ai, x, 1).unwrap();
        let lx = x.ln();
        let expect: f64 = Sieve::new(50)
            .primes_up_to(50)
            .map(|p| {
                let a = 1.0 + arith::kronecker(-23, p as i64) as f64;
                4.0 * a * (p as f64).powf(-0.5 - 1.0 / lx) * (x / p as f64).ln() / lx
            })
            .sum();
        assert!((v - expect).abs() < 1e-12);
        let all = p_lambda_all(&pi, &g, x, 1, Mode::Sequential).unwrap();
        assert!((all[0] - v).abs() < 1e-12);
    }

    #[test]
    fn prime_square_sums_small_x_by_hand() {
        let g = class_group(-23).unwrap();
        let chars = g.characters();
        let loc = LocalGSp4::from_angles(0.4, 1.3);
        let pi = SatakeGSp4::from_locals("c", vec![2, 3, 5, 7, 11], vec![loc; 5]);
        let ai = ai_data(&g, &chars[1]);
        let r = prime_square_sums(&pi, &ai, -23, 10.0).unwrap();
        let lx = 10f64.ln();
        let hand: f64 = [2u64, 3]
            .iter()
            .map(|&p| {
                let pf = p as f64;
                a_pi_times_ai(&loc, &ai(p), 2) * pf.powf(-1.0 - 2.0 / lx) * (10.0 / pf).ln() / lx
            })
            .sum();
        assert!((r.prime_squares - hand).abs() < 1e-14);
        // (-23/p) = 1 for p = 2, 3 among p <= 10
        let a1 = loc.power_sum(Star::Pi, 1);
        assert!((r.split_squares - a1 * a1 * (0.5 + 1.0 / 3.0)).abs() < 1e-14);
    }

    #[test]
    fn chandee_bound_and_empty_window() {
        let g = class_group(-47).unwrap();
        let chars = g.characters();
        let pi = SatakeGSp4::fuzz(1000, 3);
        let ai = ai_data(&g, &chars[2]);
        let x = 500.0;
        let s = chandee_sum(&pi, &ai, -47, x, 0.0, 1).unwrap();
        assert!(s.abs() <= chandee_trivial_bound(x));
        let only_c0 = chandee_sum(&pi, &ai, -47, 1.5, 2.0, 1).unwrap();
        assert!((only_c0 - 2.0 * 47f64.ln() / 1.5f64.ln()).abs() < 1e-12);
    }
}
