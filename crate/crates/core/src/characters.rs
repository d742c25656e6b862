//! Dirichlet characters with exact values.
//!
//! `(Z/qZ)*` is split into its odd prime-power components, each cyclic with a
//! fixed generator (the smallest positive one) and a full discrete-log table.
//! A character is an exponent vector against those generators, so values are
//! exact rationals modulo one ([`ExactPhase`]) until a caller asks for a
//! complex number.

use std::fmt;
use std::ops::{Add, Neg};
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modarith::{e_frac, mul_mod, pow_mod, reduce_signed, FactoredModulus};

/// Largest modulus for which discrete-log tables are built.
pub const MAX_TABLE_MODULUS: u64 = 10_000_000;

/// `e(numerator / denominator)` held exactly; always reduced, `0 ≤ num < den`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExactPhase {
    num: u64,
    den: u64,
}

impl ExactPhase {
    pub const ZERO: ExactPhase = ExactPhase { num: 0, den: 1 };

    pub fn new(num: i128, den: u64) -> Self {
        assert!(den > 0, "phase denominator must be positive");
        let n = reduce_signed(num, den);
        let g = n.gcd(&den);
        if n == 0 {
            return Self::ZERO;
        }
        ExactPhase {
            num: n / g,
            den: den / g,
        }
    }

    pub fn numerator(self) -> u64 {
        self.num
    }

    pub fn denominator(self) -> u64 {
        self.den
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    /// `k · self`.
    pub fn scale(self, k: i128) -> Self {
        let n = (self.num as i128 % self.den as i128) * (k % self.den as i128);
        Self::new(n, self.den)
    }

    pub fn to_complex(self) -> Complex64 {
        e_frac(self.num as i128, self.den)
    }
}

impl Add for ExactPhase {
    type Output = ExactPhase;

    fn add(self, rhs: ExactPhase) -> ExactPhase {
        let l = self.den.lcm(&rhs.den);
        let n = self.num as u128 * (l / self.den) as u128 + rhs.num as u128 * (l / rhs.den) as u128;
        ExactPhase::new((n % l as u128) as i128, l)
    }
}

impl Neg for ExactPhase {
    type Output = ExactPhase;

    fn neg(self) -> ExactPhase {
        ExactPhase::new(-(self.num as i128), self.den)
    }
}

impl fmt::Debug for ExactPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Display for ExactPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// One cyclic factor `(Z/p^e Z)*` of the unit group.
#[derive(Debug)]
pub struct UnitComponent {
    pub prime: u64,
    pub exponent: u32,
    /// `p^e`.
    pub modulus: u64,
    /// `p^(e-1) (p-1)`.
    pub order: u64,
    pub generator: u64,
    /// Element of `(Z/qZ)*` that is `generator` on this component and 1 on the others.
    pub embedded_generator: u64,
    dlog: Vec<u32>,
}

const NON_UNIT: u32 = u32::MAX;

impl UnitComponent {
    fn new(prime: u64, exponent: u32) -> Self {
        let modulus = prime.pow(exponent);
        let order = modulus / prime * (prime - 1);
        let generator = smallest_generator(prime, modulus, order);
        let mut dlog = vec![NON_UNIT; modulus as usize];
        let mut x = 1u64;
        for k in 0..order {
            dlog[x as usize] = k as u32;
            x = mul_mod(x, generator, modulus);
        }
        debug_assert_eq!(x, 1);
        UnitComponent {
            prime,
            exponent,
            modulus,
            order,
            generator,
            embedded_generator: generator,
            dlog,
        }
    }

    /// Discrete log of `m` (any integer residue) to the component generator.
    #[inline]
    pub fn dlog(&self, m: u64) -> Option<u64> {
        match self.dlog[(m % self.modulus) as usize] {
            NON_UNIT => None,
            k => Some(u64::from(k)),
        }
    }
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn smallest_generator(prime: u64, modulus: u64, order: u64) -> u64 {
    let ells = prime_divisors(order);
    (2..modulus)
        .find(|&g| {
            g % prime != 0 && ells.iter().all(|&l| pow_mod(g, order / l, modulus) != 1)
        })
        .unwrap_or(1)
}

/// Solve `x ≡ a (mod m)`, `x ≡ b (mod n)` for coprime `m`, `n`.
pub(crate) fn crt(a: u64, m: u64, b: u64, n: u64) -> u64 {
    if m == 1 {
        return b % n;
    }
    if n == 1 {
        return a % m;
    }
    let mn = m * n;
    let m_inv = crate::modarith::mod_inv((m % n) as i64, n).expect("coprime moduli");
    // x = a + m * ((b - a) * m^{-1} mod n)
    let diff = reduce_signed(b as i128 - a as i128, n);
    let t = mul_mod(diff, m_inv, n);
    (a % m + mul_mod(m, t, mn)) % mn
}

/// The unit group `(Z/qZ)*` for odd `q`, with discrete-log tables.
pub struct UnitGroup {
    modulus: FactoredModulus,
    q: u64,
    components: Vec<UnitComponent>,
    exponent: u64,
    scale: Vec<u64>,
    roots: OnceLock<Vec<Complex64>>,
}

impl fmt::Debug for UnitGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UnitGroup")
            .field("q", &self.q)
            .field("components", &self.components.iter().map(|c| (c.modulus, c.generator)).collect::<Vec<_>>())
            .finish()
    }
}

impl UnitGroup {
    pub fn new(modulus: &FactoredModulus) -> Result<Arc<UnitGroup>> {
        let q = match modulus.to_u64() {
            Some(q) if q <= MAX_TABLE_MODULUS => q,
            _ => {
                return Err(Error::ModulusTooLarge {
                    q: modulus.to_string(),
                    limit: MAX_TABLE_MODULUS,
                })
            }
        };
        let mut components: Vec<UnitComponent> = modulus
            .factors()
            .iter()
            .map(|&(p, e)| UnitComponent::new(p, e))
            .collect();
        for c in &mut components {
            c.embedded_generator = crt(c.generator, c.modulus, 1, q / c.modulus);
        }
        let exponent = components.iter().fold(1u64, |acc, c| acc.lcm(&c.order));
        let scale = components.iter().map(|c| exponent / c.order).collect();
        Ok(Arc::new(UnitGroup {
            modulus: modulus.clone(),
            q,
            components,
            exponent,
            scale,
            roots: OnceLock::new(),
        }))
    }

    pub fn for_modulus(q: u64) -> Result<Arc<UnitGroup>> {
        Self::new(&FactoredModulus::new(q)?)
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &FactoredModulus {
        &self.modulus
    }

    pub fn components(&self) -> &[UnitComponent] {
        &self.components
    }

    /// Exponent of the group: every character value is `e(k / exponent)`.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn order(&self) -> u64 {
        self.components.iter().map(|c| c.order).product()
    }

    pub fn is_unit(&self, m: u64) -> bool {
        self.components.iter().all(|c| c.dlog(m).is_some())
    }

    /// `e(k / exponent)` for every `k`, built on first use.
    pub fn roots(&self) -> &[Complex64] {
        self.roots.get_or_init(|| {
            (0..self.exponent)
                .map(|k| e_frac(k as i128, self.exponent))
                .collect()
        })
    }
}

/// Parity filter for character enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    All,
    Even,
}

/// Portable form of a character: modulus plus exponent vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterSpec {
    pub modulus: u64,
    pub exponents: Vec<u64>,
}

#[derive(Clone)]
pub struct DirichletCharacter {
    group: Arc<UnitGroup>,
    exponents: Vec<u64>,
}

impl fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "χ mod {} {:?}", self.group.q, self.exponents)
    }
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.group.q == other.group.q && self.exponents == other.exponents
    }
}

impl Eq for DirichletCharacter {}

impl DirichletCharacter {
    /// Exponents are reduced modulo the component orders.
    pub fn new(group: Arc<UnitGroup>, exponents: &[u64]) -> Result<Self> {
        if exponents.len() != group.components.len() {
            return Err(Error::PreconditionViolated(format!(
                "modulus {} needs {} exponents, got {}",
                group.q,
                group.components.len(),
                exponents.len()
            )));
        }
        let exponents = exponents
            .iter()
            .zip(&group.components)
            .map(|(&e, c)| e % c.order)
            .collect();
        Ok(DirichletCharacter { group, exponents })
    }

    pub fn principal(group: Arc<UnitGroup>) -> Self {
        let exponents = vec![0; group.components.len()];
        DirichletCharacter { group, exponents }
    }

    pub fn from_spec(spec: &CharacterSpec, group: Arc<UnitGroup>) -> Result<Self> {
        if spec.modulus != group.q {
            return Err(Error::PreconditionViolated(format!(
                "character modulus {} does not match group modulus {}",
                spec.modulus, group.q
            )));
        }
        Self::new(group, &spec.exponents)
    }

    pub fn spec(&self) -> CharacterSpec {
        CharacterSpec {
            modulus: self.group.q,
            exponents: self.exponents.clone(),
        }
    }

    pub fn group(&self) -> &Arc<UnitGroup> {
        &self.group
    }

    pub fn modulus(&self) -> u64 {
        self.group.q
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    /// `χ(m) = e(k / exponent)`; returns `k`, or `None` off the units.
    #[inline]
    pub fn eval_index(&self, m: u64) -> Option<u64> {
        let e = self.group.exponent;
        let mut acc = 0u64;
        for ((c, &x), &s) in self.group.components.iter().zip(&self.exponents).zip(&self.group.scale) {
            let k = c.dlog(m)?;
            acc = (acc + mul_mod(mul_mod(k, x, c.order), s, e)) % e;
        }
        Some(acc)
    }

    pub fn eval_phase(&self, m: i64) -> Option<ExactPhase> {
        let m = reduce_signed(m as i128, self.group.q);
        self.eval_index(m)
            .map(|k| ExactPhase::new(k as i128, self.group.exponent))
    }

    /// Complex value, `0` off the units.
    pub fn eval(&self, m: i64) -> Complex64 {
        let m = reduce_signed(m as i128, self.group.q);
        match self.eval_index(m) {
            Some(k) => self.group.roots()[k as usize],
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// Value indices for `m = 0, 1, …, q-1`.
    pub fn index_table(&self) -> Vec<Option<u64>> {
        (0..self.group.q).map(|m| self.eval_index(m)).collect()
    }

    pub fn is_principal(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    pub fn order(&self) -> u64 {
        self.group
            .components
            .iter()
            .zip(&self.exponents)
            .fold(1u64, |acc, (c, &x)| acc.lcm(&(c.order / x.gcd(&c.order))))
    }

    pub fn is_even(&self) -> bool {
        self.eval_phase(-1).is_some_and(ExactPhase::is_zero)
    }

    pub fn conductor(&self) -> u64 {
        self.group
            .components
            .iter()
            .zip(&self.exponents)
            .map(|(c, &x)| {
                let ord = c.order / x.gcd(&c.order);
                if ord == 1 {
                    return 1;
                }
                // χ is trivial on 1 + p^f Z (order p^(e-f)) iff ord | p^(f-1)(p-1).
                let mut pf = c.prime;
                let mut cap = c.prime - 1;
                for _ in 1..c.exponent {
                    if cap % ord == 0 {
                        break;
                    }
                    pf *= c.prime;
                    cap *= c.prime;
                }
                pf
            })
            .product()
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.group.q
    }

    pub fn conjugate(&self) -> Self {
        let exponents = self
            .group
            .components
            .iter()
            .zip(&self.exponents)
            .map(|(c, &x)| (c.order - x) % c.order)
            .collect();
        DirichletCharacter {
            group: self.group.clone(),
            exponents,
        }
    }

    /// Pointwise product of two characters to the same modulus.
    pub fn mul(&self, other: &DirichletCharacter) -> Result<Self> {
        if self.group.q != other.group.q {
            return Err(Error::PreconditionViolated(format!(
                "cannot multiply characters mod {} and mod {}",
                self.group.q, other.group.q
            )));
        }
        let exponents = self
            .group
            .components
            .iter()
            .zip(self.exponents.iter().zip(&other.exponents))
            .map(|(c, (&a, &b))| (a + b) % c.order)
            .collect();
        Ok(DirichletCharacter {
            group: self.group.clone(),
            exponents,
        })
    }

    /// The character mod `target.q()` induced by `self`; requires `self.modulus() | target.q()`.
    pub fn lift_to(&self, target: &Arc<UnitGroup>) -> Result<Self> {
        let d = self.group.q;
        if target.q % d != 0 {
            return Err(Error::LiftMismatch { d, q: target.q });
        }
        let exponents = target
            .components
            .iter()
            .map(|c| {
                let phase = self
                    .eval_phase((c.embedded_generator % d) as i64)
                    .expect("a unit mod q reduces to a unit mod d");
                phase.numerator() * (c.order / phase.denominator())
            })
            .collect::<Vec<_>>();
        DirichletCharacter::new(target.clone(), &exponents)
    }

    /// The primitive character inducing `self`, as a character on `target`,
    /// whose modulus must be the conductor.
    pub fn primitive_on(&self, target: &Arc<UnitGroup>) -> Result<Self> {
        let c = target.q;
        if c != self.conductor() {
            return Err(Error::PreconditionViolated(format!(
                "target modulus {c} is not the conductor {} of {self:?}",
                self.conductor()
            )));
        }
        let q = self.group.q;
        // The part of q coprime to the conductor.
        let mut rest = q;
        for comp in &target.components {
            while rest % comp.prime == 0 {
                rest /= comp.prime;
            }
        }
        let exponents = target
            .components
            .iter()
            .map(|comp| {
                let lift = crt(comp.embedded_generator, c, 1, rest);
                let phase = self.eval_phase(lift as i64).expect("lift is a unit mod q");
                phase.numerator() * (comp.order / phase.denominator())
            })
            .collect::<Vec<_>>();
        DirichletCharacter::new(target.clone(), &exponents)
    }
}

/// All characters of `group`, in lexicographic order of exponent vectors.
pub fn enumerate_characters(group: &Arc<UnitGroup>, parity: Parity) -> Vec<DirichletCharacter> {
    let orders: Vec<u64> = group.components.iter().map(|c| c.order).collect();
    let total: u64 = orders.iter().product();
    let mut out = Vec::with_capacity(total as usize);
    let mut exps = vec![0u64; orders.len()];
    for _ in 0..total {
        let chi = DirichletCharacter {
            group: group.clone(),
            exponents: exps.clone(),
        };
        if parity == Parity::All || chi.is_even() {
            out.push(chi);
        }
        for i in (0..exps.len()).rev() {
            exps[i] += 1;
            if exps[i] < orders[i] {
                break;
            }
            exps[i] = 0;
        }
    }
    out
}

/// `χ·ψ` with `χ` lifted from its modulus `d | q` to `ψ`'s modulus `q`.
pub fn coset_character(chi: &DirichletCharacter, psi: &DirichletCharacter) -> Result<DirichletCharacter> {
    chi.lift_to(psi.group())?.mul(psi)
}
