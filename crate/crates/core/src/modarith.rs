//! Exact integer and modular arithmetic.
//!
//! Everything here is exact except the complex exponentials returned by the
//! Gauss-sum routines. Moduli are odd throughout; big moduli (such as
//! `7^239`) are carried as [`BigUint`] together with their factorization.

use std::cmp::Ordering;
use std::f64::consts::TAU;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `p`-adic valuation `e` with `p^e | n`.
pub fn nu_p(n: &BigUint, p: u64) -> u32 {
    debug_assert!(p >= 2);
    if n.is_zero() {
        return 0;
    }
    let p = BigUint::from(p);
    let mut n = n.clone();
    let mut e = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return e;
        }
        n = q;
        e += 1;
    }
}

pub fn nu_p_u64(mut n: u64, p: u64) -> u32 {
    debug_assert!(p >= 2);
    if n == 0 {
        return 0;
    }
    let mut e = 0;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    e
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut f = 3u64;
    while f.saturating_mul(f) <= n {
        if n % f == 0 {
            return false;
        }
        f += 2;
    }
    true
}

/// Trial-division factorization, ascending primes.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// An odd positive integer together with its prime factorization.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FactoredModulus {
    value: BigUint,
    factors: Vec<(u64, u32)>,
    phi: BigUint,
}

impl fmt::Debug for FactoredModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FactoredModulus({})", self)
    }
}

impl fmt::Display for FactoredModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_u64() {
            Some(v) => write!(f, "{v}"),
            None => {
                let parts: Vec<String> = self
                    .factors
                    .iter()
                    .map(|&(p, e)| if e == 1 { p.to_string() } else { format!("{p}^{e}") })
                    .collect();
                write!(f, "{}", parts.join("*"))
            }
        }
    }
}

impl FactoredModulus {
    /// Factor `n` by trial division. Rejects zero and even `n`.
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidModulus("0".into()));
        }
        if n % 2 == 0 {
            return Err(Error::EvenModulus(n.to_string()));
        }
        Self::from_factors(factorize(n))
    }

    /// Build from `(prime, exponent)` pairs; pairs are sorted and validated.
    pub fn from_factors(mut factors: Vec<(u64, u32)>) -> Result<Self> {
        factors.retain(|&(_, e)| e > 0);
        factors.sort_unstable();
        for w in factors.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidModulus(format!("repeated prime {}", w[0].0)));
            }
        }
        for &(p, _) in &factors {
            if p == 2 {
                return Err(Error::EvenModulus(format!("2^k * ...")));
            }
            if !is_prime_u64(p) {
                return Err(Error::InvalidModulus(format!("{p} is not prime")));
            }
        }
        let mut value = BigUint::one();
        let mut phi = BigUint::one();
        for &(p, e) in &factors {
            let pe1 = BigUint::from(p).pow(e - 1);
            value *= &pe1 * p;
            phi *= pe1 * (p - 1);
        }
        Ok(Self { value, factors, phi })
    }

    /// Parse `729`, `7^239` or `3^3*5^2*7`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty modulus".into()));
        }
        if !s.contains(['^', '*']) {
            let n: u64 = s
                .parse()
                .map_err(|_| Error::Parse(format!("not an integer modulus: {s}")))?;
            return Self::new(n);
        }
        let mut acc: Vec<(u64, u32)> = Vec::new();
        for part in s.split('*') {
            let part = part.trim();
            let (base, exp) = match part.split_once('^') {
                Some((b, e)) => (b.trim(), e.trim()),
                None => (part, "1"),
            };
            let base: u64 = base
                .parse()
                .map_err(|_| Error::Parse(format!("bad base in {part:?}")))?;
            let exp: u32 = exp
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in {part:?}")))?;
            if base == 0 {
                return Err(Error::InvalidModulus("0".into()));
            }
            for (p, e) in factorize(base) {
                match acc.iter_mut().find(|(q, _)| *q == p) {
                    Some(slot) => slot.1 += e * exp,
                    None => acc.push((p, e * exp)),
                }
            }
        }
        Self::from_factors(acc)
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.value.to_u64()
    }

    /// The value as `u64`, or [`Error::ModulusTooLarge`].
    pub fn value_u64(&self) -> Result<u64> {
        self.to_u64().ok_or_else(|| Error::ModulusTooLarge {
            q: self.to_string(),
            limit: u64::MAX,
        })
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn phi(&self) -> &BigUint {
        &self.phi
    }

    pub fn phi_u64(&self) -> Option<u64> {
        self.phi.to_u64()
    }

    pub fn valuation(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    pub fn divides(&self, other: &FactoredModulus) -> bool {
        self.factors.iter().all(|&(p, e)| other.valuation(p) >= e)
    }

    pub fn same_support(&self, other: &FactoredModulus) -> bool {
        self.factors.len() == other.factors.len()
            && self.primes().zip(other.primes()).all(|(a, b)| a == b)
    }

    /// `self / other`; errors unless `other | self`.
    pub fn quotient(&self, other: &FactoredModulus) -> Result<FactoredModulus> {
        if !other.divides(self) {
            return Err(Error::PreconditionViolated(format!("{other} does not divide {self}")));
        }
        let factors = self
            .factors
            .iter()
            .map(|&(p, e)| (p, e - other.valuation(p)))
            .collect();
        Self::from_factors(factors)
    }

    pub fn pow(&self, k: u32) -> FactoredModulus {
        let factors = self.factors.iter().map(|&(p, e)| (p, e * k)).collect();
        Self::from_factors(factors).expect("powers of a valid modulus are valid")
    }

    pub fn divisor_count(&self) -> u64 {
        self.factors.iter().map(|&(_, e)| u64::from(e) + 1).product()
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }
}

/// Relation between two moduli under the `≺` / `⪯` orders.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Precedence {
    /// Same prime support, every valuation strictly smaller.
    Prec,
    /// `a ⪯ b` holds but `a ≺ b` does not.
    PreceqOnly,
    Neither,
}

pub fn prec_relation(a: &FactoredModulus, b: &FactoredModulus) -> Precedence {
    if !a.same_support(b) {
        return Precedence::Neither;
    }
    let mut strict = true;
    for (&(_, ea), &(_, eb)) in a.factors.iter().zip(&b.factors) {
        match ea.cmp(&eb) {
            Ordering::Greater => return Precedence::Neither,
            Ordering::Equal => strict = false,
            Ordering::Less => {}
        }
    }
    if strict {
        Precedence::Prec
    } else {
        Precedence::PreceqOnly
    }
}

/// `a ⪯ b`.
pub fn preceq(a: &FactoredModulus, b: &FactoredModulus) -> bool {
    prec_relation(a, b) != Precedence::Neither
}

/// `a ≺ b`.
pub fn prec(a: &FactoredModulus, b: &FactoredModulus) -> bool {
    prec_relation(a, b) == Precedence::Prec
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// `a mod m` as a residue in `[0, m)`.
#[inline]
pub fn reduce_signed(a: i128, m: u64) -> u64 {
    a.rem_euclid(m as i128) as u64
}

/// Representative of `a mod m` in the open interval `(-m/2, m/2)`; `m` odd.
pub fn signed_residue(a: i128, m: u64) -> i64 {
    let r = reduce_signed(a, m);
    if r > m / 2 {
        r as i64 - m as i64
    } else {
        r as i64
    }
}

pub fn signed_residue_big(a: &BigInt, m: &BigUint) -> BigInt {
    let m = BigInt::from(m.clone());
    let r = a.mod_floor(&m);
    if &r * 2 > m {
        r - m
    } else {
        r
    }
}

/// Inverse of `a` modulo `m`, in `[0, m)`.
pub fn mod_inv(a: i64, m: u64) -> Result<u64> {
    if m == 1 {
        return Ok(0);
    }
    let a0 = reduce_signed(a as i128, m) as i128;
    let (mut r0, mut r1) = (m as i128, a0);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return Err(Error::NotInvertible {
            a: a.to_string(),
            m: m.to_string(),
        });
    }
    Ok(reduce_signed(s0, m))
}

pub fn mod_inv_big(a: &BigInt, m: &BigUint) -> Result<BigUint> {
    let mi = BigInt::from(m.clone());
    if m.is_one() {
        return Ok(BigUint::zero());
    }
    let e = a.mod_floor(&mi).extended_gcd(&mi);
    if !e.gcd.is_one() {
        return Err(Error::NotInvertible {
            a: a.to_string(),
            m: m.to_string(),
        });
    }
    Ok(e.x.mod_floor(&mi).to_biguint().expect("non-negative after mod_floor"))
}

/// Jacobi symbol `(b / r)` for odd `r ≥ 1`.
pub fn jacobi(b: i64, r: u64) -> i32 {
    assert!(r % 2 == 1, "Jacobi symbol needs an odd modulus, got {r}");
    let mut a = reduce_signed(b as i128, r);
    let mut n = r;
    let mut t = 1i32;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

pub fn jacobi_big(b: &BigInt, r: &BigUint) -> i32 {
    assert!(r.is_odd(), "Jacobi symbol needs an odd modulus");
    let ri = BigInt::from(r.clone());
    let mut a = b.mod_floor(&ri).to_biguint().expect("non-negative");
    let mut n = r.clone();
    let mut t = 1i32;
    let eight = BigUint::from(8u8);
    let four = BigUint::from(4u8);
    while !a.is_zero() {
        let tz = a.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            a >>= tz;
            let n8 = (&n % &eight).to_u8().unwrap();
            if tz % 2 == 1 && matches!(n8, 3 | 5) {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if (&a % &four).to_u8() == Some(3) && (&n % &four).to_u8() == Some(3) {
            t = -t;
        }
        a %= &n;
    }
    if n.is_one() {
        t
    } else {
        0
    }
}

/// A complex number of modulus one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitComplex {
    pub re: f64,
    pub im: f64,
}

impl UnitComplex {
    pub const ONE: UnitComplex = UnitComplex { re: 1.0, im: 0.0 };
    pub const I: UnitComplex = UnitComplex { re: 0.0, im: 1.0 };

    /// `e(num/den)`.
    pub fn from_fraction(num: u64, den: u64) -> Self {
        let z = e_frac(num as i128, den);
        UnitComplex { re: z.re, im: z.im }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

impl From<UnitComplex> for Complex64 {
    fn from(u: UnitComplex) -> Self {
        u.to_complex()
    }
}

/// `e(num/den) = exp(2πi num/den)`, reduced exactly to `(-1/2, 1/2]` first.
pub fn e_frac(num: i128, den: u64) -> Complex64 {
    let mut r = num.rem_euclid(den as i128) as f64;
    let d = den as f64;
    if 2.0 * r > d {
        r -= d;
    }
    let (s, c) = (TAU * r / d).sin_cos();
    Complex64::new(c, s)
}

/// `ε_r`: 1 when `r ≡ 1 (mod 4)`, `i` when `r ≡ 3 (mod 4)`.
pub fn epsilon_r(r: u64) -> UnitComplex {
    assert!(r % 2 == 1, "epsilon_r needs odd r, got {r}");
    if r % 4 == 1 {
        UnitComplex::ONE
    } else {
        UnitComplex::I
    }
}

/// Closed form of `∑_{u mod r} e_r(Au + Bu²)` by completing the square.
pub fn quad_gauss_closed(a: i64, b: i64, r: u64) -> Result<Complex64> {
    assert!(r % 2 == 1, "quadratic Gauss sum needs odd r");
    if r == 1 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let four_b = reduce_signed(4 * b as i128, r) as i64;
    let inv = mod_inv(four_b, r).map_err(|_| Error::BNotCoprime { b, r })?;
    let a_r = reduce_signed(a as i128, r);
    let phase = mul_mod(inv, mul_mod(a_r, a_r, r), r);
    let e = e_frac(-(phase as i128), r);
    let sign = f64::from(jacobi(b, r));
    Ok(e * sign * epsilon_r(r).to_complex() * (r as f64).sqrt())
}

/// Literal `∑_{u=0}^{r-1} e((Au + Bu²)/r)`, compensated, ascending `u`.
pub fn quad_gauss_brute(a: i64, b: i64, r: u64) -> Complex64 {
    let a_r = reduce_signed(a as i128, r);
    let b_r = reduce_signed(b as i128, r);
    let mut sum = ComplexSum::new();
    for u in 0..r {
        let arg = (mul_mod(a_r, u, r) + mul_mod(b_r, mul_mod(u, u, r), r)) % r;
        sum.add(e_frac(arg as i128, r));
    }
    sum.value()
}

/// `θ(q) = ∑_{p | q} ln p / (p - 1)`.
pub fn theta_q(q: &FactoredModulus) -> f64 {
    q.primes().map(|p| (p as f64).ln() / (p - 1) as f64).sum()
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factorize(n) {
        let len = out.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Number of positive divisors.
pub fn sigma0(n: u64) -> u64 {
    assert!(n >= 1, "sigma0 needs n >= 1");
    factorize(n).iter().map(|&(_, e)| u64::from(e) + 1).product()
}

/// Neumaier-compensated sum of `f64`.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        iter.into_iter().for_each(|x| s.add(x));
        s
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Parse a small integer expression: signed sums of products of powers,
/// e.g. `1+2*7^116` or `-3`.
pub fn parse_int_expr(s: &str) -> Result<BigInt> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let bad = || Error::Parse(format!("bad integer expression: {s}"));
    let mut total = BigInt::zero();
    let mut term_start = 0;
    let bytes = s.as_bytes();
    let mut terms: Vec<(bool, &str)> = Vec::new();
    let mut neg = false;
    for i in 0..=bytes.len() {
        let at_sep = i == bytes.len() || ((bytes[i] == b'+' || bytes[i] == b'-') && i > 0);
        if i == 0 && (bytes[0] == b'+' || bytes[0] == b'-') {
            neg = bytes[0] == b'-';
            term_start = 1;
            continue;
        }
        if at_sep {
            terms.push((neg, &s[term_start..i]));
            if i < bytes.len() {
                neg = bytes[i] == b'-';
                term_start = i + 1;
            }
        }
    }
    for (neg, term) in terms {
        if term.is_empty() {
            return Err(bad());
        }
        let mut prod = BigInt::one();
        for factor in term.split('*') {
            let (base, exp) = match factor.split_once('^') {
                Some((b, e)) => (b, e.parse::<u32>().map_err(|_| bad())?),
                None => (factor, 1),
            };
            let base: BigInt = base.parse().map_err(|_| bad())?;
            prod *= base.pow(exp);
        }
        if neg {
            total -= prod;
        } else {
            total += prod;
        }
    }
    Ok(total)
}

/// `(num / den) mod 1` as an `f64` in `[-1/2, 1/2)`, accurate to a relative
/// `2^-53` even when the fraction is tiny and the operands are huge.
pub fn big_fraction_mod1(num: &BigUint, den: &BigUint) -> f64 {
    let r = num % den;
    let (r, neg) = if &r * 2u32 >= *den {
        (den - &r, true)
    } else {
        (r, false)
    };
    // Scale so the quotient carries at least 64 significant bits.
    let shift = den.bits().saturating_sub(r.bits()) + 128;
    let scaled = (&r << shift) / den;
    let mag = scaled.to_f64().unwrap_or(f64::INFINITY);
    let v = mag * (-(shift as f64)).exp2();
    if neg {
        -v
    } else {
        v
    }
}
