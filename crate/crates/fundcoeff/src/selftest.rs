//! The acceptance suite as a library routine, shared by the `acceptance`
//! test target and the `selftest` CLI subcommand.
//!
//! Each criterion yields one PASS/FAIL line. The hashed text holds only
//! deterministic content; timings are reported next to it but never hashed.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::arith::{self, Sieve};
use crate::classgroup::{class_group, Bqf};
use crate::error::Result;
use crate::lfun;
use crate::mf::{self, hurwitz::hurwitz12_table, trace, Exemplar};
use crate::par::{self, Mode};
use crate::resonance::{self, FamilyD};
use crate::satake::{self, LocalGSp4, MomentCase, RootValue, SatakeAI, Star};
use crate::siegel::{self, SKLift};
use crate::stats::{self, CoeffSeries, Mask};

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub pass: bool,
    /// Deterministic summary of what was measured.
    pub detail: String,
    pub seconds: f64,
}

impl CriterionResult {
    /// The line without its timing, as covered by the report hash.
    pub fn hashed_line(&self) -> String {
        format!("{:>2} {} {}: {}", self.id, if self.pass { "PASS" } else { "FAIL" }, self.title, self.detail)
    }

    pub fn line(&self) -> String {
        format!("{} [{:.2}s]", self.hashed_line(), self.seconds)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub results: Vec<CriterionResult>,
}

impl Report {
    /// The deterministic text that the hash covers.
    pub fn text(&self) -> String {
        self.results.iter().map(|r| r.hashed_line() + "\n").collect()
    }

    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.text().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    /// Failing criteria not listed in [`KNOWN_UNATTAINABLE`].
    pub fn unexpected_failures(&self) -> Vec<u8> {
        self.results.iter().filter(|r| !r.pass && !KNOWN_UNATTAINABLE.contains(&r.id)).map(|r| r.id).collect()
    }
}

fn timed(id: u8, title: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> CriterionResult {
    let t = Instant::now();
    let (pass, detail) = match f() {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionResult { id, title, pass, detail, seconds: t.elapsed().as_secs_f64() }
}

/// Criteria that fail under the specified normalization and are recorded
/// as such: the large-values half of 8 needs |c(n)| above about 1.02,
/// while the integral primitive exemplar has |c(n)| of order 1e-2.
pub const KNOWN_UNATTAINABLE: &[u8] = &[8];

/// Criteria 1 to 11 in order.
pub fn run() -> Report {
    Report {
        results: vec![
            criterion1(),
            criterion2(),
            criterion3(),
            criterion4(),
            criterion5(),
            criterion6(),
            criterion7(),
            criterion8(),
            criterion9(),
            criterion10(),
            criterion11(),
        ],
    }
}

/// Runs the suite twice on one thread and once on eight threads, and
/// appends criterion 12 (identical hashes) to the first report.
pub fn run_full() -> Report {
    let t = Instant::now();
    let first = par::with_threads(1, run);
    let second = par::with_threads(1, run);
    let eight = par::with_threads(8, run);
    let hashes = [first.hash(), second.hash(), eight.hash()];
    let pass = hashes[0] == hashes[1] && hashes[0] == hashes[2];
    let mut out = first;
    out.results.push(CriterionResult {
        id: 12,
        title: "determinism",
        pass,
        detail: format!(
            "hash(1 thread) = {}, rerun {}, 8 threads {}",
            &hashes[0][..16],
            &hashes[1][..16],
            &hashes[2][..16]
        ),
        seconds: t.elapsed().as_secs_f64(),
    });
    out
}

// Independent oracle for composition: Dirichlet's united forms with a
// private reduction routine, sharing no code with the classgroup module.
fn oracle_reduce(mut a: i128, mut b: i128, mut c: i128) -> (i128, i128, i128) {
    loop {
        if b > a || b <= -a {
            let k = (a - b).div_euclid(2 * a);
            c += k * (a * k + b);
            b += 2 * a * k;
        } else if a > c {
            (a, b, c) = (c, -b, a);
        } else {
            if a == c && b < 0 {
                b = -b;
            }
            return (a, b, c);
        }
    }
}

fn oracle_compose(f: Bqf, g: Bqf) -> (i128, i128, i128) {
    let disc = f.disc() as i128;
    let (a1, b1) = (f.a as i128, f.b as i128);
    let (a, b, c) = (g.a as i128, g.b as i128, g.c as i128);
    // an equivalent copy of g whose first coefficient is coprime to a1:
    // g(ux - y, x) = (g(u, 1), -2au - b, a) or g(x, vx + y) = (g(1, v), b + 2cv, c)
    let (a2, b2) = (0i128..)
        .flat_map(|t| [(a * t * t + b * t + c, -2 * a * t - b), (a + b * t + c * t * t, b + 2 * c * t)])
        .find(|&(na, _)| num_integer::gcd(na, a1) == 1)
        .expect("primitive forms represent values coprime to a1");
    // B = b1 mod 2 a1 and B = b2 mod 2 a2
    let bb = (0..a2).map(|k| b1 + 2 * a1 * k).find(|cand| (cand - b2).rem_euclid(2 * a2) == 0).expect("CRT solution");
    let c3 = (bb * bb - disc) / (4 * a1 * a2);
    oracle_reduce(a1 * a2, bb, c3)
}

fn oracle_class_number(d: i64) -> u64 {
    let mut h = 0;
    let mut a = 1i64;
    while 3 * a * a <= -d {
        for b in -a + 1..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || arith::gcd(arith::gcd(a, b), c) != 1 || (b < 0 && a == c) {
                continue;
            }
            h += 1;
        }
        a += 1;
    }
    h
}

fn criterion1() -> CriterionResult {
    timed(1, "class groups", || {
        let t = Instant::now();
        let mut ok = true;
        let mut parts = Vec::new();
        for (d, h_want) in [(-23i64, 3usize), (-47, 5), (-71, 7)] {
            let g = class_group(d)?;
            let mut table_ok = g.h() == h_want && g.structure == vec![h_want as u64];
            for i in 0..g.h() {
                for j in 0..g.h() {
                    let (a, b, c) = oracle_compose(g.elements[i], g.elements[j]);
                    let k = g.compose(i, j);
                    let e = g.elements[k];
                    table_ok &= (e.a as i128, e.b as i128, e.c as i128) == (a, b, c);
                }
            }
            ok &= table_ok;
            parts.push(format!(
                "h({d})={} {:?} table={}",
                g.h(),
                g.structure,
                if table_ok { "ok" } else { "MISMATCH" }
            ));
        }
        let fast = t.elapsed().as_secs_f64() < 1.0;
        let ds: Vec<i64> = (3..=10_000i64).map(|n| -n).filter(|&d| arith::is_fundamental(d).unwrap_or(false)).collect();
        let step = ds.len() / 50;
        let chosen: Vec<i64> = ds.iter().step_by(step).take(50).copied().collect();
        let mut agree = 0;
        for &d in &chosen {
            let l1 = lfun::dirichlet_l1(d)?;
            let h = oracle_class_number(d);
            if lfun::class_number_from_l1(d, l1.value) == h && class_group(d)?.h() as u64 == h {
                agree += 1;
            }
        }
        ok &= fast && agree == chosen.len() && chosen.len() == 50;
        parts.push(format!("class number formula {agree}/{} exact", chosen.len()));
        parts.push(format!("small groups under 1 s: {fast}"));
        Ok((ok, parts.join("; ")))
    })
}

fn criterion2() -> CriterionResult {
    timed(2, "Satake identities", || {
        let mut worst: f64 = 0.0;
        let mut bound_ok = true;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let t1 = rng.random::<f64>() * std::f64::consts::TAU;
            let t2 = rng.random::<f64>() * std::f64::consts::TAU;
            let loc = LocalGSp4::from_angles(t1, t2);
            let (r1, r2) = satake::local_identity_residuals(&loc);
            let num = rng.random_range(0..1_000_000u64);
            let ai = SatakeAI::new(RootValue::root(num, 1_000_000), RootValue::root(1_000_000 - num, 1_000_000));
            let ai2 = SatakeAI::new(ai.alpha.pow(2), ai.beta.pow(2));
            let r3 = satake::rs_square_identity_check(&loc, &ai, &ai2, -23, 2);
            worst = worst.max(r1).max(r2).max(r3);
            for n in 1..=20 {
                bound_ok &= satake::a_pi_times_ai(&loc, &ai, n).abs() <= 8.0 + 1e-12;
            }
        }
        // every prime type on Cl(-23): 2, 3 split, 5, 7 inert, 23 ramified
        let g = class_group(-23)?;
        let loc = LocalGSp4::from_angles(0.7, 2.1);
        let mut cases = 0;
        for chi in g.characters() {
            let chi2 = g.character(&chi.exps.iter().map(|e| 2 * e).collect::<Vec<_>>());
            for p in [2u64, 3, 5, 7, 23] {
                let r = satake::rs_square_identity_check(&loc, &g.ai_satake(&chi, p), &g.ai_satake(&chi2, p), -23, p);
                worst = worst.max(r);
                cases += 1;
                for n in 1..=20 {
                    bound_ok &= satake::a_pi_times_ai(&loc, &g.ai_satake(&chi, p), n).abs() <= 8.0 + 1e-12;
                }
            }
        }
        let wp = LocalGSp4 { alpha: Complex64::new(0.0, 1.0), beta: Complex64::new(1.0, 0.0) };
        let point = [
            wp.power_sum(Star::Pi, 1),
            wp.power_sum(Star::Std, 1),
            wp.power_sum(Star::Ad, 1),
            wp.power_sum(Star::Pi, 2),
        ];
        let point_ok = point.iter().zip([2.0, 1.0, 2.0, 0.0]).all(|(a, b)| (a - b).abs() < 1e-12);
        let pass = worst < 1e-12 && bound_ok && point_ok;
        Ok((
            pass,
            format!(
                "max residual {} over 1000 draws + {cases} class-group cases (<1e-12: {}); |a| <= 8: {bound_ok}; worked point (2,1,2,0): {point_ok}",
                if worst < 1e-12 { "<1e-12".to_string() } else { format!("{worst:.3e}") },
                worst < 1e-12
            ),
        ))
    })
}

fn criterion3() -> CriterionResult {
    timed(3, "moment bound brute force", || {
        let mut configs = 0;
        let mut holds = 0;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in [-23i64, -47, -71, -163] {
            let g = class_group(d)?;
            let root = (d.unsigned_abs() as f64).sqrt() / 2.0;
            for ell in 1..=2u32 {
                let admissible: Vec<u64> =
                    [2u64, 3, 5, 7, 11, 13].into_iter().filter(|&p| (p as f64).powi(ell as i32) < root).collect();
                let mut weightings: Vec<BTreeMap<u64, f64>> = vec![BTreeMap::new()];
                weightings.push(admissible.iter().map(|&p| (p, 1.0)).collect());
                for &p in &admissible {
                    weightings.push([(p, 1.0)].into_iter().collect());
                }
                for _ in 0..5 {
                    weightings.push(admissible.iter().map(|&p| (p, rng.random_range(-2.0..2.0))).collect());
                }
                for b in &weightings {
                    for x in [2.0, 3.0, 4.0, 6.0, 8.0] {
                        match satake::moment_bound_check(&g, b, x, ell, MomentCase::Unramified, 1) {
                            Ok(m) => {
                                configs += 1;
                                holds += m.holds as usize;
                            }
                            Err(crate::Error::Precondition(_)) => {}
                            Err(e) => return Err(e),
                        }
                    }
                }
            }
        }
        let g = class_group(-23)?;
        let b: BTreeMap<u64, f64> = [(2u64, 1.0)].into_iter().collect();
        let eq = satake::moment_bound_check(&g, &b, 4.0, 1, MomentCase::Unramified, 1)?;
        let eq_ok = (eq.lhs - 1.0).abs() < 1e-12 && (eq.rhs - 1.0).abs() < 1e-12 && eq.holds;
        Ok((
            holds == configs && configs > 0 && eq_ok,
            format!("{holds}/{configs} admissible configurations hold; equality case d=-23, l=1, b2=1, x=4: lhs={:.12} rhs={:.12}", eq.lhs, eq.rhs),
        ))
    })
}

fn criterion4() -> CriterionResult {
    timed(4, "h_p pipeline", || {
        let f = SKLift::builtin(10, 5000)?;
        let src = &f.source.coeffs;
        let two = BigRational::from_integer(BigInt::from(2));
        let mut checked = 0;
        let mut bad = 0;
        let mut zeros = 0;
        for p in [3u64, 5, 7] {
            let h = siegel::h_p_construct(&f, p, 2000)?;
            for m in 1..=2000u64 {
                // -m a square mod 4p, by brute force over all residues
                let residue = (0..4 * p).any(|t| (t * t + m) % (4 * p) == 0);
                if !residue {
                    zeros += 1;
                    bad += (!h.coeffs[m as usize].is_zero()) as usize;
                } else if num_integer::gcd(m, 4 * p) == 1 {
                    checked += 1;
                    bad += (h.coeffs[m as usize] != &two * &src[m as usize]) as usize;
                }
            }
        }
        Ok((
            bad == 0,
            format!("{checked} coprime m equal 2 a_source(m), {zeros} non-residue m vanish, {bad} mismatches"),
        ))
    })
}

fn criterion5() -> CriterionResult {
    timed(5, "Bessel periods", || {
        let f = SKLift::builtin(10, 5000)?;
        let mut parts = Vec::new();
        let mut ok = true;
        for d in [-23i64, -47] {
            let g = class_group(d)?;
            let mut nonzero = 0;
            for chi in g.characters().iter().filter(|c| !c.is_trivial()) {
                nonzero += (!siegel::bessel_period(&f, &g, chi)?.is_zero()) as usize;
            }
            let want: Vec<BigRational> =
                g.elements.iter().map(|s| f.source.coeffs[s.disc().unsigned_abs() as usize].clone()).collect();
            let inv = siegel::bessel_inversion(&f, &g)?;
            let inv_ok = inv == want;
            ok &= nonzero == 0 && inv_ok;
            parts.push(format!(
                "d={d}: {} nontrivial characters, {nonzero} nonzero periods, inversion exact: {inv_ok}",
                g.h() - 1
            ));
        }
        Ok((ok, parts.join("; ")))
    })
}

fn criterion6() -> CriterionResult {
    timed(6, "Waldspurger ratio", || {
        let mut parts = Vec::new();
        let mut ok = true;
        for (k, g) in [(10u32, lfun::g18()?), (12u32, lfun::g22()?)] {
            let f = mf::plus_form_from_jacobi(&mf::jacobi_cusp_index1(k, 600)?);
            let ns: Vec<u64> = (1..=600u64)
                .filter(|&n| mf::half::admissible_n(f.kappa, n) && !f.coeffs[n as usize].is_zero())
                .take(21)
                .collect();
            let mut worst: f64 = 0.0;
            let mut pairs = 0;
            for &n2 in &ns[1..] {
                let dev = lfun::waldspurger_ratio_check(&f, &g, ns[0], n2)?;
                worst = worst.max(dev);
                pairs += 1;
            }
            ok &= pairs >= 20 && worst < 1e-4;
            parts.push(format!(
                "(f{}/2, g{}): {pairs} pairs, max deviation {}",
                2 * k - 1,
                g.weight,
                if worst < 1e-6 { "<1e-6".into() } else { format!("{worst:.2e}") }
            ));
        }
        Ok((ok, parts.join("; ")))
    })
}

fn criterion7() -> CriterionResult {
    timed(7, "Shimura compatibility", || {
        let mut parts = Vec::new();
        let mut ok = true;
        for (which, g) in [(Exemplar::F19, lfun::g18()?), (Exemplar::F23, lfun::g22()?)] {
            let f = mf::exemplar(which, 100_000)?;
            let table = mf::lambda_table(&f, 50)?;
            let worst = table.iter().map(|(&p, &l)| (l - g.lambda(p)).abs()).fold(0.0, f64::max);
            ok &= worst < 1e-9 && table.len() == 15;
            parts.push(format!(
                "{}: {} primes, max |lambda_f - lambda_g| {}",
                which.label(),
                table.len(),
                if worst < 1e-9 { "<1e-9".into() } else { format!("{worst:.2e}") }
            ));
        }
        let a2 = trace::trace_exact(18, 2, &hurwitz12_table(8))?;
        let f = mf::exemplar(Exemplar::F19, 100_000)?;
        let from_half = mf::lambda_extract(&f, 2)? * 2f64.powf(8.5);
        let a2_ok = a2 == BigInt::from(-528) && (from_half + 528.0).abs() < 1e-9 * 528.0;
        ok &= a2_ok;
        parts.push(format!("a_g18(2) = {a2}, from f19/2: {:.6}", from_half));
        Ok((ok, parts.join("; ")))
    })
}

fn criterion8() -> CriterionResult {
    timed(8, "sign changes and large values", || {
        let s = CoeffSeries::from_form(&*mf::exemplar(Exemplar::F19, 100_000)?);
        let sc = stats::sign_changes(&s, Mask::odd_squarefree(1), 1, 100_000)?;
        let large = stats::large_values(&s, 10_000, 100_000)?;
        let ns = s.masked(Mask::odd_squarefree(1), 10_000, 100_000)?;
        let max_c = ns.iter().map(|&n| s.get(n).abs()).fold(0.0, f64::max);
        let rms = (stats::moment_sums(&s, 10_000, 100_000, 2)? / ns.len() as f64).sqrt();
        Ok((
            sc.count >= 500 && large.len() >= 100,
            format!(
                "{} sign changes over odd squarefree n <= 1e5 (need 500); {} large values in [1e4, 1e5] (need 100; max |c| {:.4e}, rms {:.4e}, threshold >= {:.4})",
                sc.count,
                large.len(),
                max_c,
                rms,
                stats::large_threshold(10_000)
            ),
        ))
    })
}

fn criterion9() -> CriterionResult {
    timed(9, "twisted first moment", || {
        let t = Instant::now();
        let g = lfun::g18()?;
        let fam = FamilyD::new(1, 1, g.kappa())?;
        let phi_int = resonance::phi_integral(&resonance::bump);
        let mut parts = Vec::new();
        let mut ok = true;
        for (x, tol) in [(2000.0, 0.25), (4000.0, 0.20)] {
            for u in [1u64, 9] {
                let lhs = resonance::twisted_moment_lhs(&g, u, x, &resonance::bump, &fam, Mode::default())?;
                let main = resonance::twisted_moment_main(&g, u, x, phi_int, &fam)?.value;
                let dev = (lhs / main - 1.0).abs();
                ok &= dev <= tol;
                parts.push(format!("X={x} u={u}: lhs/main-1 = {:+.4}", lhs / main - 1.0));
            }
        }
        let fast = t.elapsed().as_secs_f64() < 300.0;
        ok &= fast;
        parts.push(format!("under 5 min: {fast}"));
        Ok((ok, parts.join("; ")))
    })
}

fn criterion10() -> CriterionResult {
    timed(10, "Gaussian integral and random model", || {
        let mut worst: f64 = 0.0;
        for s in [0.5, 1.0, 2.6, 10.0] {
            worst = worst.max(satake::gaussian_integral_check(s)?);
        }
        let d = -163i64;
        let b: BTreeMap<u64, f64> = Sieve::new(1000).primes_up_to(1000).map(|p| (p, 1.0)).collect();
        let mc = satake::random_model_mc(d, &b, 1000, 100_000, 20_261_016, Mode::default())?;
        // independent prediction: Var(2 cos U) = 2 per split prime
        let pred: f64 = (2..1000u64)
            .filter(|&p| arith::is_prime(p) && arith::kronecker(d, p as i64) == 1)
            .map(|p| 2.0 / p as f64)
            .sum();
        let rel = (mc.variance / pred - 1.0).abs();
        Ok((
            worst < 1e-8 && rel < 0.05,
            format!(
                "max integral residual {}; MC variance {:.6} vs predicted {:.6} (rel {:.4}, 1e5 samples)",
                if worst < 1e-12 { "<1e-12".into() } else { format!("{worst:.2e}") },
                mc.variance,
                pred,
                rel
            ),
        ))
    })
}

fn criterion11() -> CriterionResult {
    timed(11, "moment growth", || {
        let s = CoeffSeries::from_form(&*mf::exemplar(Exemplar::F19, 100_000)?);
        let s2 = |x: u64| stats::moment_sums(&s, x, 2 * x, 2);
        let ratio2 = s2(40_000)? / s2(20_000)?;
        let s4: Vec<f64> = [10_000u64, 20_000, 40_000]
            .iter()
            .map(|&x| stats::moment_sums(&s, x, 2 * x, 4).map(|v| v / x as f64))
            .collect::<Result<_>>()?;
        let growth_ok = s4.windows(2).all(|w| w[1] / w[0] < 2.0);
        Ok((
            (1.5..=2.5).contains(&ratio2) && growth_ok,
            format!(
                "S2(2X)/S2(X) = {ratio2:.4} at X=2e4; S4/X = {:.4e}, {:.4e}, {:.4e} at X=1e4, 2e4, 4e4",
                s4[0], s4[1], s4[2]
            ),
        ))
    })
}
