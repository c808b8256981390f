//! Class groups of imaginary quadratic fields through reduced binary
//! quadratic forms: reduction, composition, elementary divisors, the full
//! character group with exact root-of-unity values, prime ideal classes and
//! theta coefficients of ideal class characters.

use crate::arith::{self, Sieve};
use crate::error::{invalid, Result};
use crate::par::{self, Mode};
use crate::satake::{RootValue, SatakeAI};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;
use std::f64::consts::PI;

/// Integer binary quadratic form a x^2 + b x y + c y^2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bqf {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl Bqf {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        Bqf { a, b, c }
    }

    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn content(&self) -> i64 {
        arith::gcd(arith::gcd(self.a, self.b), self.c)
    }

    pub fn is_positive_definite(&self) -> bool {
        self.a > 0 && (self.b as i128).pow(2) - 4 * (self.a as i128) * (self.c as i128) < 0
    }

    pub fn is_reduced(&self) -> bool {
        self.b.abs() <= self.a && self.a <= self.c && (self.b >= 0 || (self.b.abs() != self.a && self.a != self.c))
    }

    pub fn eval(&self, x: i64, y: i64) -> i128 {
        let (x, y) = (x as i128, y as i128);
        self.a as i128 * x * x + self.b as i128 * x * y + self.c as i128 * y * y
    }

    /// The form f(alpha x + beta y, gamma x + delta y).
    pub fn transform(&self, m: [[i64; 2]; 2]) -> Bqf {
        let [[al, be], [ga, de]] = m.map(|r| r.map(|v| v as i128));
        let (a, b, c) = (self.a as i128, self.b as i128, self.c as i128);
        let na = a * al * al + b * al * ga + c * ga * ga;
        let nb = 2 * a * al * be + b * (al * de + be * ga) + 2 * c * ga * de;
        let nc = a * be * be + b * be * de + c * de * de;
        Bqf::new(na as i64, nb as i64, nc as i64)
    }
}

impl std::fmt::Display for Bqf {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

/// Gauss reduction of a positive-definite form to the unique reduced
/// representative of its SL2(Z) class.
pub fn reduce(f: Bqf) -> Result<Bqf> {
    if !f.is_positive_definite() {
        return invalid(format!("reduce: {f} is not positive definite"));
    }
    let (mut a, mut b, mut c) = (f.a as i128, f.b as i128, f.c as i128);
    loop {
        // translate b into (-a, a]
        if b <= -a || b > a {
            let k = (a - b).div_euclid(2 * a);
            let nb = b + 2 * a * k;
            c += k * (a * k + b);
            b = nb;
        }
        if a > c {
            std::mem::swap(&mut a, &mut c);
            b = -b;
            continue;
        }
        break;
    }
    if a == c && b < 0 {
        b = -b;
    }
    Ok(Bqf::new(a as i64, b as i64, c as i64))
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    // returns (g, x, y) with a x + b y = g >= 0
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Dirichlet composition of two primitive forms of the same discriminant,
/// followed by reduction.
pub fn compose_forms(f1: Bqf, f2: Bqf) -> Bqf {
    let (f1, f2) = if f1.a > f2.a { (f2, f1) } else { (f1, f2) };
    let disc = f1.disc() as i128;
    let (a1, b1) = (f1.a as i128, f1.b as i128);
    let (a2, b2, c2) = (f2.a as i128, f2.b as i128, f2.c as i128);
    let s = (b1 + b2) / 2;
    let n = b2 - s;
    let (y1, d) = if a2 % a1 == 0 {
        (0, a1)
    } else {
        let (g, u, _v) = ext_gcd(a2, a1);
        (u, g)
    };
    let (x2, y2, d1) = if s % d == 0 {
        (0, -1, d)
    } else {
        let (g, x, y) = ext_gcd(s, d);
        (x, -y, g)
    };
    let v1 = a1 / d1;
    let v2 = a2 / d1;
    let r = (y1 * y2 * n - x2 * c2).rem_euclid(v1);
    let b3 = b2 + 2 * v2 * r;
    let a3 = v1 * v2;
    let c3 = (b3 * b3 - disc) / (4 * a3);
    reduce(Bqf::new(a3 as i64, b3 as i64, c3 as i64)).expect("composite is positive definite")
}

/// How a form class is matched with an ideal class. `Direct` pairs the form
/// (a, b, c) with the ideal [a, (-b + sqrt d)/2]; `Inverse` pairs it with
/// the conjugate ideal. Orthogonality and Fourier inversion do not depend on
/// the choice; Bessel periods use it consistently.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormIdealConvention {
    Direct,
    Inverse,
}

pub const FORM_IDEAL_CONVENTION: FormIdealConvention = FormIdealConvention::Direct;

/// Largest table kept in memory; bigger groups compose on demand.
const TABLE_LIMIT: usize = 2048;

/// Class group of a negative fundamental discriminant.
#[derive(Debug, Clone)]
pub struct ClassGroup {
    pub d: i64,
    pub elements: Vec<Bqf>,
    pub identity: usize,
    pub w: u32,
    /// Elementary divisors d_1 | d_2 | ... (all > 1).
    pub structure: Vec<u64>,
    /// Element indices of generators of the cyclic factors.
    pub generators: Vec<usize>,
    /// Coordinates of every element against `generators`.
    pub coords: Vec<Vec<u64>>,
    index: HashMap<Bqf, usize>,
    table: Option<Vec<u32>>,
}

/// Reduced primitive forms of discriminant d < 0, principal form first,
/// sorted by (a, |b|, b < 0).
pub fn reduced_forms(d: i64, mode: Mode) -> Vec<Bqf> {
    let amax = ((-d) as f64 / 3.0).sqrt().floor() as i64 + 1;
    let rows: Vec<Vec<Bqf>> = par::map_range(mode, amax as usize, |i| {
        let a = i as i64 + 1;
        let mut out = Vec::new();
        for b in (-a + 1)..=a {
            if (b - d).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            let f = Bqf::new(a, b, c);
            if f.content() == 1 {
                out.push(f);
            }
        }
        out
    });
    let mut forms: Vec<Bqf> = rows.into_iter().flatten().collect();
    forms.sort_by_key(|f| (f.a, f.b.abs(), f.b < 0));
    forms
}

pub fn class_group(d: i64) -> Result<ClassGroup> {
    class_group_with(d, Mode::default())
}

pub fn class_group_with(d: i64, mode: Mode) -> Result<ClassGroup> {
    if d >= 0 {
        return invalid("class_group: d must be negative");
    }
    if d < -100_000_000 {
        return invalid("class_group: |d| > 1e8");
    }
    if !arith::is_fundamental(d)? {
        return invalid(format!("class_group: {d} is not a fundamental discriminant"));
    }
    let elements = reduced_forms(d, mode);
    let h = elements.len();
    let index: HashMap<Bqf, usize> = elements.iter().enumerate().map(|(i, f)| (*f, i)).collect();
    let w = match d {
        -3 => 6,
        -4 => 4,
        _ => 2,
    };
    let mut g = ClassGroup {
        d,
        elements,
        identity: 0,
        w,
        structure: vec![],
        generators: vec![],
        coords: vec![],
        index,
        table: None,
    };
    if h <= TABLE_LIMIT {
        let rows: Vec<Vec<u32>> = par::map_range(mode, h, |i| (0..h).map(|j| g.compose_direct(i, j) as u32).collect());
        g.table = Some(rows.into_iter().flatten().collect());
    }
    g.build_structure();
    Ok(g)
}

impl ClassGroup {
    pub fn h(&self) -> usize {
        self.elements.len()
    }

    pub fn index_of(&self, f: &Bqf) -> Option<usize> {
        self.index.get(f).copied()
    }

    /// Index of the class of an arbitrary primitive form of discriminant d.
    pub fn class_of(&self, f: Bqf) -> Result<usize> {
        if f.disc() != self.d {
            return invalid(format!("class_of: {f} has discriminant {}", f.disc()));
        }
        let r = reduce(f)?;
        self.index_of(&r).ok_or_else(|| crate::Error::Invalid(format!("{f} is not primitive")))
    }

    fn compose_direct(&self, i: usize, j: usize) -> usize {
        let f = compose_forms(self.elements[i], self.elements[j]);
        self.index[&f]
    }

    pub fn compose(&self, i: usize, j: usize) -> usize {
        match &self.table {
            Some(t) => t[i * self.h() + j] as usize,
            None => self.compose_direct(i, j),
        }
    }

    pub fn inverse(&self, i: usize) -> usize {
        let f = self.elements[i];
        self.index[&reduce(Bqf::new(f.a, -f.b, f.c)).expect("reduced input")]
    }

    pub fn pow(&self, i: usize, mut e: u64) -> usize {
        let mut result = self.identity;
        let mut base = i;
        while e > 0 {
            if e & 1 == 1 {
                result = self.compose(result, base);
            }
            base = self.compose(base, base);
            e >>= 1;
        }
        result
    }

    pub fn order(&self, i: usize) -> u64 {
        let mut e = 1;
        let mut cur = i;
        while cur != self.identity {
            cur = self.compose(cur, i);
            e += 1;
        }
        e
    }

    /// Exponent of the group (largest elementary divisor, 1 for trivial groups).
    pub fn exponent(&self) -> u64 {
        self.structure.last().copied().unwrap_or(1)
    }

    fn build_structure(&mut self) {
        let h = self.h();
        // Greedy generators with exponent vectors relative to them.
        let mut vecs: Vec<Option<Vec<i64>>> = vec![None; h];
        vecs[self.identity] = Some(vec![]);
        let mut members = vec![self.identity];
        let mut gens: Vec<usize> = Vec::new();
        let mut relations: Vec<Vec<i64>> = Vec::new();
        for g in 0..h {
            if vecs[g].is_some() {
                continue;
            }
            let j = gens.len();
            gens.push(g);
            let mut e = 1i64;
            let mut cur = g;
            while vecs[cur].is_none() {
                cur = self.compose(cur, g);
                e += 1;
            }
            let mut rel: Vec<i64> = vecs[cur].clone().unwrap().iter().map(|v| -v).collect();
            rel.resize(j + 1, 0);
            rel[j] += e;
            relations.push(rel);
            let mut new_members = Vec::new();
            for &m in &members {
                let base = vecs[m].clone().unwrap();
                let mut cur = m;
                for i in 1..e {
                    cur = self.compose(cur, g);
                    let mut v = base.clone();
                    v.resize(j + 1, 0);
                    v[j] = i;
                    vecs[cur] = Some(v);
                    new_members.push(cur);
                }
            }
            members.extend(new_members);
        }
        let t = gens.len();
        let mut rmat: Vec<Vec<i64>> = relations
            .into_iter()
            .map(|mut r| {
                r.resize(t, 0);
                r
            })
            .collect();
        let (diag, v, vinv) = smith_normal_form(&mut rmat);
        let keep: Vec<usize> = (0..t).filter(|&i| diag[i] > 1).collect();
        self.structure = keep.iter().map(|&i| diag[i] as u64).collect();
        self.generators = keep
            .iter()
            .map(|&i| {
                let mut cur = self.identity;
                for (k, &gk) in gens.iter().enumerate() {
                    let e = vinv[i][k].rem_euclid(diag[i].max(1)) as u64;
                    cur = self.compose(cur, self.pow(gk, e));
                }
                cur
            })
            .collect();
        self.coords = (0..h)
            .map(|el| {
                let mut x = vecs[el].clone().unwrap();
                x.resize(t, 0);
                keep.iter()
                    .map(|&i| {
                        let y: i64 = (0..t).map(|k| x[k] * v[k][i]).sum();
                        y.rem_euclid(diag[i]) as u64
                    })
                    .collect()
            })
            .collect();
    }

    /// All h characters, trivial first, ordered by exponent vector.
    pub fn characters(&self) -> Vec<ClassCharacter> {
        let r = self.structure.len();
        let mut out = Vec::with_capacity(self.h());
        let mut exps = vec![0u64; r];
        loop {
            out.push(self.character(&exps));
            let mut i = r;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                exps[i] += 1;
                if exps[i] < self.structure[i] {
                    break;
                }
                exps[i] = 0;
            }
        }
    }

    /// The character with the given exponent vector.
    pub fn character(&self, exps: &[u64]) -> ClassCharacter {
        let e = self.exponent();
        let angles = self
            .coords
            .iter()
            .map(|y| {
                let mut k = 0u64;
                for (i, &di) in self.structure.iter().enumerate() {
                    k = (k + exps[i] % di * y[i] % di * (e / di)) % e;
                }
                k
            })
            .collect();
        ClassCharacter { exps: exps.to_vec(), modulus: e, angles }
    }

    /// Class of a prime ideal above p.
    pub fn prime_ideal_class(&self, p: u64) -> PrimeIdeal {
        let k = arith::kronecker(self.d, p as i64);
        if k == -1 {
            return PrimeIdeal::Inert;
        }
        let b = arith::sqrt_disc_mod_4p(self.d, p).expect("d is a square mod 4p");
        let c = (b as i128 * b as i128 - self.d as i128) / (4 * p as i128);
        let cls = self.class_of(Bqf::new(p as i64, b, c as i64)).expect("primitive prime form");
        if k == 0 {
            PrimeIdeal::Ramified(cls)
        } else {
            PrimeIdeal::Split { p: cls, pbar: self.inverse(cls) }
        }
    }

    /// Character value attached to a form class under the fixed convention.
    pub fn character_on_form(&self, chi: &ClassCharacter, element: usize) -> u64 {
        match FORM_IDEAL_CONVENTION {
            FormIdealConvention::Direct => chi.angles[element],
            FormIdealConvention::Inverse => chi.angles[self.inverse(element)],
        }
    }

    /// Satake parameters of AI(chi) at p.
    pub fn ai_satake(&self, chi: &ClassCharacter, p: u64) -> SatakeAI {
        let m = chi.modulus;
        match self.prime_ideal_class(p) {
            PrimeIdeal::Inert => SatakeAI::new(RootValue::root(0, 1), RootValue::root(1, 2)),
            PrimeIdeal::Ramified(c) => SatakeAI::new(RootValue::root(chi.angles[c], m), RootValue::Zero),
            PrimeIdeal::Split { p: c, pbar } => {
                SatakeAI::new(RootValue::root(chi.angles[c], m), RootValue::root(chi.angles[pbar], m))
            }
        }
    }

    /// r_chi(n) = sum over ideals of norm n of chi(ideal), for n <= x.
    pub fn theta_coeffs(&self, chi: &ClassCharacter, x: usize) -> Vec<Complex64> {
        let sieve = Sieve::new(x.max(2));
        let mut local: HashMap<u64, PrimeIdeal> = HashMap::new();
        let mut r = vec![Complex64::new(0.0, 0.0); x + 1];
        if x >= 1 {
            r[1] = Complex64::new(1.0, 0.0);
        }
        let m = chi.modulus as f64;
        let unit = |k: u64| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / m);
        for n in 2..=x {
            let p = sieve.spf(n) as usize;
            let mut q = n;
            let mut e = 0u32;
            while q % p == 0 {
                q /= p;
                e += 1;
            }
            let kind = *local.entry(p as u64).or_insert_with(|| self.prime_ideal_class(p as u64));
            let rp = match kind {
                PrimeIdeal::Inert => {
                    if e.is_multiple_of(2) {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                }
                PrimeIdeal::Ramified(c) => unit(chi.angles[c] * e as u64 % chi.modulus),
                PrimeIdeal::Split { p: c, pbar } => (0..=e)
                    .map(|i| {
                        let k = chi.angles[c] * i as u64 + chi.angles[pbar] * (e - i) as u64;
                        unit(k % chi.modulus)
                    })
                    .sum(),
            };
            r[n] = r[q] * rp;
        }
        r
    }

    /// Exact sum over classes of coeff(S) chi(S), as an element of Q(zeta_m).
    pub fn character_sum(&self, chi: &ClassCharacter, coeff: &[BigRational]) -> Cyclotomic {
        let mut out = Cyclotomic::zero(chi.modulus as usize);
        for (i, c) in coeff.iter().enumerate() {
            out.add_term(c, self.character_on_form(chi, i) as usize);
        }
        out
    }
}

/// Smith normal form of a square integer matrix (rows are relations).
/// Returns the diagonal d_1 | d_2 | ..., the column transform V and its
/// inverse, so that U A V = diag for some unimodular U.
fn smith_normal_form(a: &mut [Vec<i64>]) -> (Vec<i64>, Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let t = a.len();
    let ident = |t: usize| -> Vec<Vec<i64>> { (0..t).map(|i| (0..t).map(|j| (i == j) as i64).collect()).collect() };
    let mut v = ident(t);
    let mut vinv = ident(t);
    for k in 0..t {
        loop {
            // pivot: smallest nonzero entry in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in k..t {
                for j in k..t {
                    if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            a.swap(k, pi);
            if pj != k {
                for row in a.iter_mut() {
                    row.swap(k, pj);
                }
                for row in v.iter_mut() {
                    row.swap(k, pj);
                }
                vinv.swap(k, pj);
            }
            let piv = a[k][k];
            let mut clean = true;
            for i in k + 1..t {
                let q = a[i][k].div_euclid(piv);
                if q != 0 {
                    for j in k..t {
                        a[i][j] -= q * a[k][j];
                    }
                }
                if a[i][k] != 0 {
                    clean = false;
                }
            }
            for j in k + 1..t {
                let q = a[k][j].div_euclid(piv);
                if q != 0 {
                    for row in a.iter_mut() {
                        row[j] -= q * row[k];
                    }
                    for row in v.iter_mut() {
                        row[j] -= q * row[k];
                    }
                    for c in 0..t {
                        vinv[k][c] += q * vinv[j][c];
                    }
                }
                if a[k][j] != 0 {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility of the trailing block by the pivot
            let bad = (k + 1..t).find(|&i| (k + 1..t).any(|j| a[i][j] % piv != 0));
            match bad {
                Some(i) => {
                    for j in k..t {
                        a[k][j] += a[i][j];
                    }
                }
                None => break,
            }
        }
        if a[k][k] < 0 {
            for j in k..t {
                a[k][j] = -a[k][j];
            }
        }
    }
    let diag = (0..t).map(|i| a[i][i]).collect();
    (diag, v, vinv)
}

/// Decomposition type of a rational prime in the field of discriminant d.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimeIdeal {
    Split { p: usize, pbar: usize },
    Ramified(usize),
    Inert,
}

/// Character of the class group. Its value on element i is
/// exp(2 pi i angles[i] / modulus).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassCharacter {
    pub exps: Vec<u64>,
    pub modulus: u64,
    pub angles: Vec<u64>,
}

impl ClassCharacter {
    pub fn is_trivial(&self) -> bool {
        self.angles.iter().all(|&a| a == 0)
    }

    /// Exact value as a reduced fraction num/den of a full turn.
    pub fn value(&self, i: usize) -> (u64, u64) {
        let g = num_integer::gcd(self.angles[i], self.modulus);
        (self.angles[i] / g, self.modulus / g)
    }

    pub fn value_complex(&self, i: usize) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI * self.angles[i] as f64 / self.modulus as f64)
    }

    pub fn conj(&self) -> ClassCharacter {
        ClassCharacter {
            exps: self.exps.clone(),
            modulus: self.modulus,
            angles: self.angles.iter().map(|&a| (self.modulus - a) % self.modulus).collect(),
        }
    }

    /// Order of the character.
    pub fn order(&self) -> u64 {
        self.angles.iter().map(|&a| self.modulus / num_integer::gcd(a, self.modulus)).fold(1, num_integer::lcm)
    }
}

fn cyclotomic_poly(n: usize, memo: &mut HashMap<usize, Vec<BigInt>>) -> Vec<BigInt> {
    if let Some(p) = memo.get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by Phi_d for proper divisors d
    let mut num = vec![BigInt::zero(); n + 1];
    num[0] = -BigInt::one();
    num[n] = BigInt::one();
    for d in 1..n {
        if n.is_multiple_of(d) {
            let phi = cyclotomic_poly(d, memo);
            num = poly_div_exact(&num, &phi);
        }
    }
    memo.insert(n, num.clone());
    num
}

fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    let nn = rem.len() - 1;
    let mut q = vec![BigInt::zero(); nn - dn + 1];
    for i in (0..=nn - dn).rev() {
        let c = rem[i + dn].clone();
        if !c.is_zero() {
            for j in 0..=dn {
                rem[i + j] -= &c * &den[j];
            }
        }
        q[i] = c;
    }
    debug_assert!(rem.iter().all(|c| c.is_zero()));
    q
}

/// Element of the cyclotomic field Q(zeta_n), stored as a polynomial in
/// zeta_n of degree < n. Equality tests reduce modulo Phi_n.
#[derive(Debug, Clone, PartialEq)]
pub struct Cyclotomic {
    pub n: usize,
    pub coeffs: Vec<BigRational>,
}

impl Cyclotomic {
    pub fn zero(n: usize) -> Self {
        Cyclotomic { n: n.max(1), coeffs: vec![BigRational::zero(); n.max(1)] }
    }

    pub fn add_term(&mut self, c: &BigRational, k: usize) {
        let k = k % self.n;
        self.coeffs[k] += c;
    }

    /// Multiply by zeta_n^k.
    pub fn rotate(&self, k: usize) -> Self {
        let mut out = Cyclotomic::zero(self.n);
        for (i, c) in self.coeffs.iter().enumerate() {
            out.coeffs[(i + k) % self.n] = c.clone();
        }
        out
    }

    pub fn add(&self, other: &Cyclotomic) -> Self {
        assert_eq!(self.n, other.n);
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Cyclotomic { n: self.n, coeffs }
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Cyclotomic { n: self.n, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// Canonical remainder modulo the n-th cyclotomic polynomial.
    pub fn reduced(&self) -> Vec<BigRational> {
        let mut memo = HashMap::new();
        let phi = cyclotomic_poly(self.n, &mut memo);
        let dn = phi.len() - 1;
        let mut rem = self.coeffs.clone();
        for i in (dn..rem.len()).rev() {
            let c = rem[i].clone();
            if c.is_zero() {
                continue;
            }
            for (j, pj) in phi.iter().enumerate() {
                let t = &c * BigRational::from_integer(pj.clone());
                rem[i - dn + j] -= t;
            }
        }
        rem.truncate(dn);
        rem
    }

    pub fn is_zero(&self) -> bool {
        self.reduced().iter().all(|c| c.is_zero())
    }

    /// The rational value if the element lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        let r = self.reduced();
        if r.iter().skip(1).all(|c| c.is_zero()) {
            Some(r.first().cloned().unwrap_or_else(BigRational::zero))
        } else {
            None
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        use num_traits::ToPrimitive;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| Complex64::from_polar(c.to_f64().unwrap_or(f64::NAN), 2.0 * PI * k as f64 / self.n as f64))
            .sum()
    }

    pub fn abs_upper(&self) -> BigRational {
        self.coeffs.iter().map(|c| c.abs()).fold(BigRational::zero(), |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce(Bqf::new(1, 1, 6)).unwrap(), Bqf::new(1, 1, 6));
        assert_eq!(reduce(Bqf::new(6, 1, 1)).unwrap(), Bqf::new(1, 1, 6));
        assert_eq!(reduce(Bqf::new(2, -1, 3)).unwrap(), Bqf::new(2, -1, 3));
        assert!(reduce(Bqf::new(1, 3, 1)).is_err());
        assert_eq!(reduce(Bqf::new(2, -2, 3)).unwrap(), Bqf::new(2, 2, 3));
        assert_eq!(reduce(Bqf::new(3, -1, 3)).unwrap(), Bqf::new(3, 1, 3));
    }

    #[test]
    fn class_group_examples() {
        let g = class_group(-23).unwrap();
        assert_eq!(g.h(), 3);
        assert_eq!(g.structure, vec![3]);
        assert_eq!(g.elements, vec![Bqf::new(1, 1, 6), Bqf::new(2, 1, 3), Bqf::new(2, -1, 3)]);
        let g4 = class_group(-4).unwrap();
        assert_eq!(g4.h(), 1);
        assert_eq!(g4.w, 4);
        assert!(g4.structure.is_empty());
        assert_eq!(class_group(-47).unwrap().structure, vec![5]);
        assert!(class_group(-12).is_err());
        assert!(class_group(5).is_err());
    }

    #[test]
    fn compose_examples() {
        let g = class_group(-23).unwrap();
        let f = g.index_of(&Bqf::new(2, 1, 3)).unwrap();
        let fi = g.index_of(&Bqf::new(2, -1, 3)).unwrap();
        assert_eq!(g.compose(g.identity, f), f);
        assert_eq!(g.compose(f, f), fi);
        assert_eq!(g.compose(f, fi), g.identity);
    }

    #[test]
    fn known_structures() {
        // Non-cyclic groups: Cl(-84) = (Z/2)^2, Cl(-420) = (Z/2)^3, Cl(-3299) = Z/3 x Z/9.
        assert_eq!(class_group(-84).unwrap().structure, vec![2, 2]);
        assert_eq!(class_group(-420).unwrap().structure, vec![2, 2, 2]);
        assert_eq!(class_group(-3299).unwrap().structure, vec![3, 9]);
        assert_eq!(class_group(-3).unwrap().w, 6);
        assert_eq!(class_group(-163).unwrap().h(), 1);
    }

    #[test]
    fn group_table_is_abelian_group() {
        for d in [-71i64, -84, -95, -231, -3299] {
            let g = class_group(d).unwrap();
            let h = g.h();
            for i in 0..h {
                assert_eq!(g.compose(i, g.inverse(i)), g.identity);
                for j in 0..h {
                    assert_eq!(g.compose(i, j), g.compose(j, i));
                    for k in 0..h.min(12) {
                        assert_eq!(g.compose(g.compose(i, j), k), g.compose(i, g.compose(j, k)));
                    }
                }
            }
            assert_eq!(g.structure.iter().product::<u64>() as usize, h);
            // coordinates are a bijection onto the product of cyclic groups
            let mut seen = std::collections::HashSet::new();
            for c in &g.coords {
                assert!(seen.insert(c.clone()));
            }
            // coordinates are additive
            for i in 0..h {
                for j in 0..h {
                    let k = g.compose(i, j);
                    for (t, &dt) in g.structure.iter().enumerate() {
                        assert_eq!((g.coords[i][t] + g.coords[j][t]) % dt, g.coords[k][t]);
                    }
                }
            }
        }
    }

    #[test]
    fn characters_are_homomorphisms_and_orthogonal() {
        for d in [-23i64, -84, -3299] {
            let g = class_group(d).unwrap();
            let chars = g.characters();
            assert_eq!(chars.len(), g.h());
            assert!(chars[0].is_trivial());
            let ones = vec![BigRational::one(); g.h()];
            for chi in &chars {
                let s = g.character_sum(chi, &ones);
                let expect = if chi.is_trivial() { g.h() as i64 } else { 0 };
                assert_eq!(s.as_rational(), Some(BigRational::from_integer(expect.into())));
                assert_eq!(chi.angles[g.identity], 0);
                for i in 0..g.h() {
                    assert_eq!(chi.angles[g.inverse(i)], (chi.modulus - chi.angles[i]) % chi.modulus);
                    for j in 0..g.h() {
                        let k = g.compose(i, j);
                        assert_eq!((chi.angles[i] + chi.angles[j]) % chi.modulus, chi.angles[k]);
                    }
                }
            }
            let distinct: std::collections::HashSet<_> = chars.iter().map(|c| c.angles.clone()).collect();
            assert_eq!(distinct.len(), g.h());
        }
    }

    #[test]
    fn prime_ideal_examples() {
        let g = class_group(-23).unwrap();
        let f = g.index_of(&Bqf::new(2, 1, 3)).unwrap();
        assert_eq!(g.prime_ideal_class(2), PrimeIdeal::Split { p: f, pbar: g.inverse(f) });
        assert_eq!(g.prime_ideal_class(5), PrimeIdeal::Inert);
        let r = g.class_of(Bqf::new(23, 23, 6)).unwrap();
        assert_eq!(g.prime_ideal_class(23), PrimeIdeal::Ramified(r));
    }

    #[test]
    fn theta_examples() {
        let g = class_group(-23).unwrap();
        let chars = g.characters();
        let r = g.theta_coeffs(&chars[0], 50);
        assert_eq!(r[1], Complex64::new(1.0, 0.0));
        assert!((r[2].re - 2.0).abs() < 1e-12);
        assert!(r[5].norm() < 1e-12);
        for chi in &chars {
            assert!((g.theta_coeffs(chi, 5)[1] - 1.0).norm() < 1e-15);
        }
    }

    #[test]
    fn ideal_counts_by_class_match_representation_numbers() {
        for d in [-23i64, -47] {
            let g = class_group(d).unwrap();
            let chars = g.characters();
            let x = 10_000usize;
            let thetas: Vec<Vec<Complex64>> = chars.iter().map(|c| g.theta_coeffs(c, x)).collect();
            for (ci, form) in g.elements.iter().enumerate() {
                // representation numbers by brute force
                let mut reps = vec![0u32; x + 1];
                let ymax = ((4 * form.a * x as i64) as f64 / (-d) as f64).sqrt() as i64 + 1;
                for y in -ymax..=ymax {
                    let xmax = ((x as f64 / form.a as f64).sqrt() + (form.b.abs() * y.abs()) as f64 / form.a as f64)
                        as i64
                        + 2;
                    for u in -xmax..=xmax {
                        let v = form.eval(u, y);
                        if v >= 1 && v as usize <= x {
                            reps[v as usize] += 1;
                        }
                    }
                }
                for n in 1..=x {
                    let count: Complex64 = chars
                        .iter()
                        .zip(&thetas)
                        .map(|(chi, th)| th[n] * chi.value_complex(ci).conj())
                        .sum::<Complex64>()
                        / g.h() as f64;
                    let k = count.re.round();
                    assert!((count - k).norm() < 1e-8 && k >= 0.0, "d={d} n={n}");
                    assert_eq!(k as u32, reps[n] / g.w, "d={d} n={n} class {form}");
                }
            }
        }
    }

    #[test]
    fn cyclotomic_reduction() {
        // 1 + zeta_3 + zeta_3^2 = 0, and zeta_4^2 = -1
        let one = BigRational::one();
        let mut s = Cyclotomic::zero(3);
        for k in 0..3 {
            s.add_term(&one, k);
        }
        assert!(s.is_zero());
        let mut t = Cyclotomic::zero(4);
        t.add_term(&one, 2);
        assert_eq!(t.as_rational(), Some(-one.clone()));
        let mut u = Cyclotomic::zero(12);
        u.add_term(&one, 1);
        assert!(!u.is_zero());
        assert!(u.as_rational().is_none());
    }
}
