use std::collections::BTreeMap;

use fundcoeff::arith::{self, Sieve};
use fundcoeff::classgroup::{class_group, class_group_with, reduce, Bqf};
use fundcoeff::lfun;
use fundcoeff::par::{self, Mode};
use fundcoeff::resonance::{self, ResonatorParams};
use fundcoeff::satake::{self, LocalGSp4, SatakeGSp4};
use fundcoeff::siegel::{self, Lambda2Matrix, SKLift};
use fundcoeff::stats::{CoeffSeries, Mask};
use proptest::prelude::*;

fn fundamental_negative() -> impl Strategy<Value = i64> {
    (3i64..3000).prop_map(|n| -n).prop_filter("fundamental", |&d| arith::is_fundamental(d).unwrap())
}

fn sl2() -> impl Strategy<Value = [[i64; 2]; 2]> {
    // products of T^k and S keep the entries small and the determinant 1
    prop::collection::vec(-3i64..=3, 1..5).prop_map(|ks| {
        let mut m = [[1i64, 0], [0, 1]];
        for k in ks {
            let t = [[1, k], [0, 1]];
            let s = [[0, -1], [1, 0]];
            m = mul(mul(m, t), s);
        }
        m
    })
}

fn mul(a: [[i64; 2]; 2], b: [[i64; 2]; 2]) -> [[i64; 2]; 2] {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reduction_is_an_sl2_invariant(d in fundamental_negative(), i in 0usize..64, m in sl2()) {
        let g = class_group(d).unwrap();
        let f = g.elements[i % g.h()];
        let moved = f.transform(m);
        prop_assert_eq!(moved.disc(), d);
        let r = reduce(moved).unwrap();
        prop_assert!(r.is_reduced());
        prop_assert_eq!(r, f);
    }

    #[test]
    fn class_group_axioms(d in fundamental_negative(), i in 0usize..64, j in 0usize..64, k in 0usize..64) {
        let g = class_group(d).unwrap();
        let h = g.h();
        let (i, j, k) = (i % h, j % h, k % h);
        prop_assert_eq!(g.compose(g.compose(i, j), k), g.compose(i, g.compose(j, k)));
        prop_assert_eq!(g.compose(i, j), g.compose(j, i));
        prop_assert_eq!(g.compose(i, g.identity), i);
        prop_assert_eq!(g.compose(i, g.inverse(i)), g.identity);
        prop_assert_eq!(h as u64 % g.order(i), 0);
        prop_assert_eq!(g.structure.iter().product::<u64>(), h as u64);
    }

    #[test]
    fn characters_are_homomorphisms(d in fundamental_negative(), i in 0usize..64, j in 0usize..64) {
        let g = class_group(d).unwrap();
        let (i, j) = (i % g.h(), j % g.h());
        let ij = g.compose(i, j);
        for chi in g.characters() {
            let m = chi.modulus;
            prop_assert_eq!((chi.angles[i] + chi.angles[j]) % m, chi.angles[ij] % m);
        }
    }

    #[test]
    fn kronecker_is_multiplicative(d in -5000i64..5000, m in 1i64..2000, n in 1i64..2000) {
        prop_assume!(d.rem_euclid(4) <= 1 && d != 0);
        prop_assert_eq!(arith::kronecker(d, m * n), arith::kronecker(d, m) * arith::kronecker(d, n));
    }

    #[test]
    fn kronecker_is_multiplicative_in_the_top(a in -300i64..300, b in -300i64..300, n in 1i64..2000) {
        prop_assert_eq!(arith::kronecker(a * b, n), arith::kronecker(a, n) * arith::kronecker(b, n));
    }

    #[test]
    fn local_satake_identities(t1 in 0.0..std::f64::consts::TAU, t2 in 0.0..std::f64::consts::TAU) {
        let (r1, r2) = satake::local_identity_residuals(&LocalGSp4::from_angles(t1, t2));
        prop_assert!(r1 < 1e-12 && r2 < 1e-12);
    }

    #[test]
    fn mask_matches_set_comprehension(odd: bool, sf: bool, q in 1u64..30, lo in 1u64..5000, len in 0u64..5000) {
        let hi = (lo + len).min(10_000);
        let s = CoeffSeries::new("ones", 9, 1, vec![1.0; 10_001]);
        let mask = Mask { odd, squarefree: sf, coprime_to: q };
        let brute: Vec<u64> = (lo..=hi)
            .filter(|&n| !odd || n % 2 == 1 )
            .filter(|&n| !sf || (2..).take_while(|p| p * p <= n).all(|p| n % (p * p) != 0))
            .filter(|&n| q <= 1 || num_gcd(n, q) == 1)
            .collect();
        prop_assert_eq!(s.masked(mask, lo, hi).unwrap(), brute);
    }
}

fn num_gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        num_gcd(b, a % b)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sk_coefficients_are_sl2_invariant(a in 1i64..12, b in -12i64..12, c in 1i64..12, m in sl2()) {
        prop_assume!(b * b < 4 * a * c);
        let s = Lambda2Matrix::new(a, b, c).unwrap();
        let f = SKLift::builtin(10, s.disc().unsigned_abs()).unwrap();
        let t = s.transform(m);
        prop_assert_eq!(t.disc(), s.disc());
        prop_assert_eq!(siegel::sk_coefficient(&f, &t).unwrap(), siegel::sk_coefficient(&f, &s).unwrap());
    }

    #[test]
    fn euler_g_is_multiplicative_in_u(u in 1u64..200, v in 1u64..200) {
        let (u, v) = (2 * u + 1, 2 * v + 1);
        prop_assume!(num_gcd(u, v) == 1);
        let g = lfun::g18().unwrap();
        let p0 = 2000;
        let gu = resonance::euler_g(&g, 0.5, u, 1, p0).unwrap();
        let gv = resonance::euler_g(&g, 0.5, v, 1, p0).unwrap();
        let guv = resonance::euler_g(&g, 0.5, u * v, 1, p0).unwrap();
        let g1 = resonance::euler_g(&g, 0.5, 1, 1, p0).unwrap();
        prop_assert!((guv * g1 / (gu * gv) - 1.0).abs() < 1e-10);
    }
}

#[test]
fn resonator_is_multiplicative_on_its_support() {
    let g = lfun::g18().unwrap();
    let p = ResonatorParams::with_overrides(1e6, 1, g, 3.0, Some(1e4)).unwrap();
    let terms = p.terms();
    assert!(terms.len() > 10);
    for &(m, r) in terms {
        let f = arith::factorize(m).unwrap();
        assert!(f.is_squarefree());
        let prod: f64 = f.primes().map(|q| p.r_prime(q) * p.lambda0().lambda(q)).product();
        assert!((r - prod).abs() <= 1e-12 * prod.abs().max(1.0), "m = {m}");
        assert!((p.r(m) - f.primes().map(|q| p.r_prime(q)).product::<f64>()).abs() < 1e-15);
        assert!(f.primes().all(|q| p.window().contains(&q)));
    }
}

#[test]
fn sequential_and_parallel_modes_agree_bitwise() {
    for d in [-23i64, -4003, -100_003] {
        let a = class_group_with(d, Mode::Sequential).unwrap();
        let b = class_group_with(d, Mode::Parallel).unwrap();
        assert_eq!(a.elements, b.elements);
        assert_eq!(a.structure, b.structure);
        assert_eq!(a.coords, b.coords);
    }
    let g = lfun::g18().unwrap();
    let ds: Vec<i64> =
        (3..400i64).map(|n| -n).filter(|&d| d.rem_euclid(4) == 1 && arith::is_fundamental(d).unwrap()).collect();
    let seq: Vec<f64> = lfun::central_values(&g, &ds, Mode::Sequential).into_iter().map(|v| v.unwrap().value).collect();
    let par: Vec<f64> = par::with_threads(4, || lfun::central_values(&g, &ds, Mode::Parallel))
        .into_iter()
        .map(|v| v.unwrap().value)
        .collect();
    assert_eq!(seq, par);

    let b: BTreeMap<u64, f64> = Sieve::new(500).primes_up_to(500).map(|p| (p, 1.0)).collect();
    let s = satake::random_model_mc(-163, &b, 500, 20_000, 9, Mode::Sequential).unwrap();
    let p = par::with_threads(3, || satake::random_model_mc(-163, &b, 500, 20_000, 9, Mode::Parallel)).unwrap();
    assert_eq!(s, p);

    let cg = class_group(-4003).unwrap();
    let pi = SatakeGSp4::fuzz(300, 5);
    assert_eq!(
        satake::p_lambda_all(&pi, &cg, 300.0, 1, Mode::Sequential).unwrap(),
        satake::p_lambda_all(&pi, &cg, 300.0, 1, Mode::Parallel).unwrap()
    );
}

#[test]
fn bessel_inversion_recovers_class_coefficients() {
    let f = SKLift::builtin(12, 200).unwrap();
    for d in [-23i64, -47, -56, -71, -104, -167] {
        let g = class_group(d).unwrap();
        assert_eq!(siegel::bessel_inversion(&f, &g).unwrap(), siegel::class_coefficients(&f, &g).unwrap(), "d = {d}");
    }
}

#[test]
fn reduce_rejects_indefinite_forms() {
    assert!(reduce(Bqf::new(1, 3, 1)).is_err());
}
