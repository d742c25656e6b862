//! `ζ(1/2, a)` by Euler–Maclaurin and central values `L(1/2, χ)` from it.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::modarith::ComplexSum;

/// `B_{2j} / (2j)!` for `j = 1..=8`.
const BERNOULLI_OVER_FACTORIAL: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
    1.0 / 74_724_249_600.0,
    -3617.0 / 10_670_622_842_880_000.0,
];

/// Number of terms summed before the Euler–Maclaurin correction.
pub const DEFAULT_TERMS: usize = 12;

/// `ζ(1/2, a)` for `0 < a ≤ 1`.
pub fn hurwitz_zeta_half(a: f64) -> f64 {
    hurwitz_zeta_half_with(a, DEFAULT_TERMS)
}

/// `ζ(1/2, a)` summing `n` terms directly.
pub fn hurwitz_zeta_half_with(a: f64, n: usize) -> f64 {
    assert!(a > 0.0, "Hurwitz zeta needs a > 0");
    let s = 0.5;
    let mut head = 0.0;
    for k in (0..n).rev() {
        head += 1.0 / (k as f64 + a).sqrt();
    }
    let big = n as f64 + a;
    let root = big.sqrt();
    // (N+a)^{1-s}/(s-1) + (N+a)^{-s}/2
    let mut tail = -2.0 * root + 0.5 / root;
    // s(s+1)…(s+2j-2) (N+a)^{-s-2j+1}
    let inv2 = 1.0 / (big * big);
    let mut rising = s;
    let mut power = 1.0 / (root * big);
    for (j, &c) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        tail += c * rising * power;
        let m = 2.0 * j as f64 + 1.0;
        rising *= (s + m) * (s + m + 1.0);
        power *= inv2;
    }
    head + tail
}

/// `ζ(1/2, a/q)` for `a = 1..=q`, built once per modulus.
#[derive(Clone, Debug)]
pub struct HurwitzTable {
    q: u64,
    values: Vec<f64>,
}

impl HurwitzTable {
    pub fn new(q: u64) -> Self {
        let values = (1..=q)
            .into_par_iter()
            .map(|a| hurwitz_zeta_half(a as f64 / q as f64))
            .collect();
        HurwitzTable { q, values }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// `ζ(1/2, a/q)`, `1 ≤ a ≤ q`.
    pub fn get(&self, a: u64) -> f64 {
        self.values[(a - 1) as usize]
    }
}

/// `L(1/2, χ) = q^{-1/2} Σ_{a=1}^{q} χ(a) ζ(1/2, a/q)`.
pub fn l_central_hurwitz(chi: &DirichletCharacter, table: &HurwitzTable) -> Result<Complex64> {
    if chi.is_principal() {
        return Err(Error::PrincipalCharacter);
    }
    let q = chi.modulus();
    if table.q != q {
        return Err(Error::PreconditionViolated(format!(
            "Hurwitz table for {} used with modulus {q}",
            table.q
        )));
    }
    let roots = chi.group().roots();
    let mut sum = ComplexSum::new();
    for a in 1..=q {
        if let Some(k) = chi.eval_index(a % q) {
            sum.add(roots[k as usize] * table.get(a));
        }
    }
    Ok(sum.value() / (q as f64).sqrt())
}
