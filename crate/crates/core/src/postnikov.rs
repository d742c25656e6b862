//! The truncated d-adic logarithm and the Postnikov invariant `a_ψ`.
//!
//! For `d | q` with the same prime support, `L_q(1+dx) = Σ (-1)^{k+1} d^k x^k / k`
//! reduces to a polynomial over `Z/qZ`, and every character `ψ` mod `q` satisfies
//! `ψ(1+dx) = e_q(a_ψ L_q(1+dx))` for a unique `a_ψ` mod `q/d`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::characters::{DirichletCharacter, ExactPhase};
use crate::error::{Error, Result};
use crate::modarith::{
    epsilon_r, jacobi, mod_inv, mul_mod, pow_mod, reduce_signed, signed_residue, ComplexSum,
    FactoredModulus,
};

/// `L_q(1+dx)` as a polynomial over `Z/qZ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedLog {
    d: u64,
    q: u64,
    coeffs: Vec<u64>,
}

/// Checks `d | q`, `d < q` and equal prime support.
fn check_pair(d: u64, q: &FactoredModulus) -> Result<u64> {
    let qv = q.value_u64()?;
    if d == 0 || qv % d != 0 {
        return Err(Error::PreconditionViolated(format!("{d} does not divide {qv}")));
    }
    if d == qv {
        return Err(Error::PreconditionViolated(format!(
            "d = q = {qv} leaves a trivial kernel"
        )));
    }
    if q.primes().any(|p| d % p != 0) {
        return Err(Error::PreconditionViolated(format!(
            "{d} and {qv} have different prime support"
        )));
    }
    Ok(qv)
}

/// Smallest `M` with `k - a ≥ ln k` for every `k ≥ M`.
pub fn log_bound_threshold(a: u32) -> u64 {
    // k - a - ln k is increasing for k ≥ 1.
    (1u64..)
        .find(|&k| k as f64 - f64::from(a) >= (k as f64).ln())
        .expect("threshold exists")
}

fn floor_log(p: u64, k: u64) -> u32 {
    let mut n = 0;
    let mut x = k;
    while x >= p {
        x /= p;
        n += 1;
    }
    n
}

/// `c_k mod q`, splitting `k = k_q k'` with `k_q | q^∞` and `gcd(k', q) = 1`.
fn coefficient(k: u64, dval: &[(u64, u32)], qv: u64) -> u64 {
    let mut k_prime = k;
    let mut num = 1u64;
    for &(p, a) in dval {
        let mut nu = 0u64;
        while k_prime % p == 0 {
            k_prime /= p;
            nu += 1;
        }
        num = mul_mod(num, pow_mod(p, k * u64::from(a) - nu, qv), qv);
    }
    let inv = mod_inv((k_prime % qv) as i64, qv).expect("k' is coprime to q");
    let c = mul_mod(num, inv, qv);
    if k % 2 == 0 {
        (qv - c) % qv
    } else {
        c
    }
}

impl TruncatedLog {
    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Coefficients of `x^1, …, x^N`.
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn truncation_n(&self) -> usize {
        self.coeffs.len()
    }

    /// Horner evaluation at `x` mod `q`.
    pub fn eval(&self, x: i64) -> u64 {
        let q = self.q;
        let x = reduce_signed(i128::from(x), q);
        let mut acc = 0u64;
        for &c in self.coeffs.iter().rev() {
            acc = (mul_mod(acc, x, q) + c) % q;
        }
        mul_mod(acc, x, q)
    }
}

/// Builds `L_q(1+dx)` mod `q`.
pub fn lq_build(d: u64, q: &FactoredModulus) -> Result<TruncatedLog> {
    let qv = check_pair(d, q)?;
    let dval: Vec<(u64, u32)> = q
        .factors()
        .iter()
        .map(|&(p, _)| (p, crate::modarith::nu_p_u64(d, p)))
        .collect();
    // k·ν_p(d) - ⌊log_p k⌋ is nondecreasing, so once it reaches ν_p(q) for
    // every p all later coefficients vanish.
    let bound = (1u64..)
        .find(|&k| {
            q.factors().iter().zip(&dval).all(|(&(p, e), &(_, a))| {
                k * u64::from(a) >= u64::from(e) + u64::from(floor_log(p, k))
            })
        })
        .expect("bound exists");
    let mut coeffs: Vec<u64> = (1..=bound).map(|k| coefficient(k, &dval, qv)).collect();
    // Exact N: one past the last nonzero coefficient.
    while coeffs.len() > 1 && coeffs[coeffs.len() - 2] == 0 && *coeffs.last().unwrap() == 0 {
        coeffs.pop();
    }
    Ok(TruncatedLog { d, q: qv, coeffs })
}

/// Postnikov invariants of a character for a given `d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PostnikovData {
    pub q: u64,
    pub d: u64,
    pub psi_exponents: Vec<u64>,
    pub a_psi: i64,
    pub b_psi: Option<i64>,
    pub verified: bool,
}

impl PostnikovData {
    /// `q/d`.
    pub fn period(&self) -> u64 {
        self.q / self.d
    }
}

/// `a_ψ` mod `q/d` from the point `x = 1`, as the signed representative.
pub fn solve_a_psi(psi: &DirichletCharacter, log: &TruncatedLog) -> Result<i64> {
    let q = log.q;
    let d = log.d;
    let m = q / d;
    if psi.modulus() != q {
        return Err(Error::PreconditionViolated(format!(
            "character modulus {} differs from {q}",
            psi.modulus()
        )));
    }
    let phase = psi
        .eval_phase((1 + d) as i64)
        .expect("1 + d is a unit");
    if q % phase.denominator() != 0 {
        return Err(Error::VerificationFailed { q, d, x: 1 });
    }
    let t = phase.numerator() * (q / phase.denominator());
    let l1 = log.eval(1);
    debug_assert_eq!(l1 % d, 0);
    debug_assert_eq!(t % d, 0);
    let u = (l1 / d) % m;
    let u_inv = mod_inv(u as i64, m)?;
    let a = mul_mod((t / d) % m, u_inv, m);
    Ok(signed_residue(i128::from(a), m))
}

/// `ψ(1+dx) = e_q(a·L_q(1+dx))` for every `x` mod `q/d`; returns the first failure.
pub fn verify_postnikov(psi: &DirichletCharacter, log: &TruncatedLog, a: i64) -> Option<u64> {
    let q = log.q;
    let d = log.d;
    let a_mod = reduce_signed(i128::from(a), q);
    (0..q / d).find(|&x| {
        let lhs = psi.eval_phase((1 + d * x) as i64);
        let rhs = ExactPhase::new(i128::from(mul_mod(a_mod, log.eval(x as i64), q)), q);
        lhs != Some(rhs)
    })
}

/// Solves and exhaustively certifies the Postnikov formula for primitive `ψ`.
pub fn compute_postnikov(psi: &DirichletCharacter, d: u64) -> Result<PostnikovData> {
    let log = lq_build(d, psi.group().modulus())?;
    compute_postnikov_with(psi, &log)
}

/// As [`compute_postnikov`], reusing a prebuilt log polynomial.
pub fn compute_postnikov_with(psi: &DirichletCharacter, log: &TruncatedLog) -> Result<PostnikovData> {
    let q = log.q;
    let d = log.d;
    if !psi.is_primitive() {
        return Err(Error::NotPrimitive(q));
    }
    let a = solve_a_psi(psi, log)?;
    if let Some(x) = verify_postnikov(psi, log, a) {
        return Err(Error::VerificationFailed { q, d, x });
    }
    let m = q / d;
    let b = ((m % d) == 0).then(|| signed_residue(i128::from(a), d));
    Ok(PostnikovData {
        q,
        d,
        psi_exponents: psi.exponents().to_vec(),
        a_psi: a,
        b_psi: b,
        verified: true,
    })
}

/// `S_{q,d}(ψ,k) = Σ_{u mod q/d} ψ(1+du) e_q(dku)`, summed directly.
pub fn s_qd_brute(psi: &DirichletCharacter, d: u64, k: i64) -> Complex64 {
    let q = psi.modulus();
    let mut s = ComplexSum::new();
    for u in 0..q / d {
        if let Some(p) = psi.eval_phase((1 + d * u) as i64) {
            let add = ExactPhase::new(i128::from(d) * i128::from(k) * i128::from(u), q);
            s.add((p + add).to_complex());
        }
    }
    s.value()
}

/// `S_{q,d}(ψ,k)` for every `k` in `0..q/d`, summed directly from a table of `ψ(1+du)`.
pub fn s_qd_brute_period(psi: &DirichletCharacter, d: u64) -> Vec<Complex64> {
    let q = psi.modulus();
    let m = q / d;
    let roots = psi.group().roots();
    let values: Vec<Option<Complex64>> = (0..m)
        .map(|u| psi.eval_index((1 + d * u) % q).map(|k| roots[k as usize]))
        .collect();
    let twiddle: Vec<Complex64> = (0..m).map(|j| crate::modarith::e_frac(j as i128, m)).collect();
    (0..m)
        .map(|k| {
            let mut s = ComplexSum::new();
            for (u, v) in values.iter().enumerate() {
                if let Some(v) = v {
                    s.add(v * twiddle[(k * u as u64 % m) as usize]);
                }
            }
            s.value()
        })
        .collect()
}

/// Which closed form for `S_{q,d}` applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SumRegime {
    /// `q | d²`.
    Linear,
    /// `d² | q | d³`, `3 ∤ q`.
    Quadratic,
}

pub fn sum_regime(d: u64, q: u64) -> Option<SumRegime> {
    let d2 = u128::from(d) * u128::from(d);
    let q = u128::from(q);
    if d2 % q == 0 {
        Some(SumRegime::Linear)
    } else if q % d2 == 0 && (d2 * u128::from(d)) % q == 0 && q % 3 != 0 {
        Some(SumRegime::Quadratic)
    } else {
        None
    }
}

/// Closed form of `S_{q,d}(ψ,k)` from the Postnikov data.
pub fn s_qd_closed(data: &PostnikovData, k: i64) -> Result<Complex64> {
    let q = data.q;
    let d = data.d;
    let a = data.a_psi;
    let zero = Complex64::new(0.0, 0.0);
    match sum_regime(d, q) {
        Some(SumRegime::Linear) => {
            let m = q / d;
            Ok(if reduce_signed(i128::from(k) + i128::from(a), m) == 0 {
                Complex64::new(m as f64, 0.0)
            } else {
                zero
            })
        }
        Some(SumRegime::Quadratic) => {
            let ka = i128::from(k) + i128::from(a);
            if reduce_signed(ka, d) != 0 {
                return Ok(zero);
            }
            let inv2a = mod_inv(reduce_signed(2 * i128::from(a), q) as i64, q)?;
            let sq = mul_mod(reduce_signed(ka, q), reduce_signed(ka, q), q);
            let phase = crate::modarith::e_frac(i128::from(mul_mod(inv2a, sq, q)), q);
            let j = jacobi(-2 * a, q / (d * d));
            let eps = epsilon_r(q).to_complex();
            Ok(eps * (q as f64).sqrt() * phase * f64::from(j))
        }
        None => Err(Error::RegimeUnsupported(format!(
            "d = {d}, q = {q} is neither q | d² nor d² | q | d³ with 3 ∤ q"
        ))),
    }
}

/// `S(q;χ,h,n) = Σ_{m mod q} χ(m+h) χ̄(m) e(mn/q)`, summed directly.
pub fn hb_sum_brute(chi: &DirichletCharacter, h: i64, n: i64) -> Complex64 {
    let q = chi.modulus();
    let mut s = ComplexSum::new();
    for m in 0..q as i64 {
        if let (Some(x), Some(y)) = (chi.eval_phase(m + h), chi.eval_phase(m)) {
            let add = ExactPhase::new(i128::from(m) * i128::from(n), q);
            s.add((x + (-y) + add).to_complex());
        }
    }
    s.value()
}

/// `Σ_{1≤|h|≤A} |S(q;χ,hq₀,0)| / (q₀ A)`.
pub fn hb2_ratio(chi: &DirichletCharacter, q0: u64, a: u64) -> f64 {
    let total: f64 = (1..=a as i64)
        .flat_map(|h| [h, -h])
        .map(|h| hb_sum_brute(chi, h * q0 as i64, 0).norm())
        .sum();
    total / (q0 * a) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{enumerate_characters, Parity, UnitGroup};
    use crate::modarith::quad_gauss_closed;

    fn fm(q: u64) -> FactoredModulus {
        FactoredModulus::new(q).unwrap()
    }

    fn primitive_even(q: u64) -> Vec<DirichletCharacter> {
        let g = UnitGroup::for_modulus(q).unwrap();
        enumerate_characters(&g, Parity::Even)
            .into_iter()
            .filter(DirichletCharacter::is_primitive)
            .collect()
    }

    fn valid_ds(q: u64) -> Vec<u64> {
        let f = fm(q);
        crate::modarith::divisors(q)
            .into_iter()
            .filter(|&d| d < q && f.primes().all(|p| d % p == 0))
            .collect()
    }

    #[test]
    fn threshold_example() {
        assert_eq!(log_bound_threshold(3), 5);
        assert_eq!(log_bound_threshold(0), 1);
    }

    #[test]
    fn lq_examples() {
        let l = lq_build(3, &fm(9)).unwrap();
        assert_eq!(l.coeffs(), &[3, 0]);
        assert_eq!(l.truncation_n(), 2);
        assert_eq!(l.eval(0), 0);
        let l = lq_build(25, &fm(3125)).unwrap();
        let inv2 = mod_inv(2, 3125).unwrap();
        for x in 0..3125u64 {
            let dx = 25 * x % 3125;
            let expected = reduce_signed(
                i128::from(dx) - i128::from(mul_mod(inv2, mul_mod(dx, dx, 3125), 3125)),
                3125,
            );
            assert_eq!(l.eval(x as i64), expected);
        }
        assert!(lq_build(4, &fm(9)).is_err());
        assert!(lq_build(3, &fm(45)).is_err());
        assert!(lq_build(9, &fm(9)).is_err());
    }

    /// `c_k` from exact rationals, for small `k`.
    fn coefficient_oracle(k: u32, d: u64, q: u64) -> u64 {
        use num_bigint::BigInt;
        use num_integer::Integer;
        let num = BigInt::from(d).pow(k);
        let den = BigInt::from(k);
        let g = num.gcd(&den);
        let (num, den) = (num / &g, den / &g);
        let den_inv = crate::modarith::mod_inv_big(&den, &num_bigint::BigUint::from(q)).unwrap();
        let v = (num * BigInt::from(den_inv)).mod_floor(&BigInt::from(q));
        let v: u64 = v.try_into().unwrap();
        if k % 2 == 0 {
            (q - v) % q
        } else {
            v
        }
    }

    #[test]
    fn coefficients_match_rationals() {
        for q in [9u64, 27, 81, 243, 729, 125, 625, 3125, 343, 2401, 1331, 225, 675, 3375] {
            for d in valid_ds(q) {
                let l = lq_build(d, &fm(q)).unwrap();
                assert_eq!(l.coeffs()[0], d % q);
                for (i, &c) in l.coeffs().iter().enumerate() {
                    assert_eq!(c % d, 0, "coefficient not divisible by d");
                    assert_eq!(c, coefficient_oracle(i as u32 + 1, d, q), "q={q} d={d} k={}", i + 1);
                }
                for k in l.truncation_n() as u32 + 1..l.truncation_n() as u32 + 40 {
                    assert_eq!(coefficient_oracle(k, d, q), 0, "q={q} d={d} k={k}");
                }
                if l.truncation_n() > 1 {
                    let n = l.truncation_n() as u32 - 1;
                    assert_ne!(coefficient_oracle(n, d, q), 0, "N not minimal for q={q} d={d}");
                }
            }
        }
    }

    #[test]
    fn periodicity_additivity_modularity() {
        for q in [27u64, 81, 125, 243, 625, 343, 1331, 675] {
            for d in valid_ds(q) {
                let l = lq_build(d, &fm(q)).unwrap();
                let m = q / d;
                let g = d.min(q).max(1);
                let qd2 = num_integer::gcd(q, g * g);
                for x in 0..m {
                    assert_eq!(l.eval((x + m) as i64), l.eval(x as i64));
                    assert_eq!(l.eval(x as i64) % qd2, (d * x) % qd2);
                    for y in 0..m.min(40) {
                        let prod = mul_mod(1 + d * x, 1 + d * y, q);
                        let z = (prod + q - 1) % q / d;
                        assert_eq!(l.eval(z as i64), (l.eval(x as i64) + l.eval(y as i64)) % q);
                    }
                }
                if q % 3 != 0 && (d as u128).pow(3) % q as u128 == 0 {
                    let inv2 = mod_inv(2, q).unwrap();
                    for x in 0..m {
                        let dx = d * x % q;
                        let expected = reduce_signed(
                            i128::from(dx) - i128::from(mul_mod(inv2, mul_mod(dx, dx, q), q)),
                            q,
                        );
                        assert_eq!(l.eval(x as i64), expected);
                    }
                }
            }
        }
    }

    #[test]
    fn a_psi_example_mod_9() {
        let g = UnitGroup::for_modulus(9).unwrap();
        let psi = crate::characters::DirichletCharacter::new(g, &[1]).unwrap();
        assert_eq!(psi.eval_phase(2), Some(ExactPhase::new(1, 6)));
        assert_eq!(psi.eval_phase(4), Some(ExactPhase::new(1, 3)));
        let data = compute_postnikov(&psi, 3).unwrap();
        assert_eq!(data.a_psi, 1);
        assert_eq!(data.b_psi, Some(1));
        assert!(data.verified);
    }

    #[test]
    fn postnikov_invariants() {
        for q in [27u64, 81, 243, 125, 625, 343, 1331] {
            let chars = primitive_even(q);
            for d in valid_ds(q) {
                let l = lq_build(d, &fm(q)).unwrap();
                let m = q / d;
                let data: Vec<_> = chars.iter().map(|c| compute_postnikov_with(c, &l).unwrap()).collect();
                for (psi, pd) in chars.iter().zip(&data) {
                    assert!(pd.a_psi != 0 && (pd.a_psi.unsigned_abs() as f64) < m as f64 / 2.0);
                    assert_eq!(num_integer::gcd(pd.a_psi.unsigned_abs(), m), 1);
                    if let Some(b) = pd.b_psi {
                        assert!(b != 0 && (b.unsigned_abs() as f64) < d as f64 / 2.0);
                        assert_eq!(reduce_signed(i128::from(b - pd.a_psi), d), 0);
                    }
                    let conj = compute_postnikov_with(&psi.conjugate(), &l).unwrap();
                    assert_eq!(conj.a_psi, -pd.a_psi);
                }
                // Homomorphism on a slice of pairs.
                for (i, p1) in chars.iter().enumerate().take(12) {
                    for p2 in chars.iter().skip(i).take(12) {
                        let prod = p1.mul(p2).unwrap();
                        if !prod.is_primitive() {
                            continue;
                        }
                        let a1 = solve_a_psi(p1, &l).unwrap();
                        let a2 = solve_a_psi(p2, &l).unwrap();
                        let a12 = solve_a_psi(&prod, &l).unwrap();
                        assert_eq!(reduce_signed(i128::from(a12 - a1 - a2), m), 0);
                    }
                }
            }
        }
    }

    #[test]
    fn postnikov_round_trip_json() {
        let psi = &primitive_even(81)[0];
        let data = compute_postnikov(psi, 9).unwrap();
        let json = serde_json::to_string(&data).unwrap();
        assert!(json.starts_with(r#"{"q":81,"d":9,"psi_exponents":"#));
        let back: PostnikovData = serde_json::from_str(&json).unwrap();
        assert_eq!(back, data);
    }

    #[test]
    fn non_primitive_rejected() {
        let g = UnitGroup::for_modulus(81).unwrap();
        let chi = DirichletCharacter::principal(g);
        assert!(matches!(compute_postnikov(&chi, 9), Err(Error::NotPrimitive(81))));
    }

    #[test]
    fn s_qd_closed_matches_brute() {
        for q in [81u64, 243, 125, 625, 3125, 343, 2401, 1331] {
            let chars = primitive_even(q);
            for d in valid_ds(q) {
                if sum_regime(d, q).is_none() {
                    continue;
                }
                let l = lq_build(d, &fm(q)).unwrap();
                let m = q / d;
                for psi in chars.iter().step_by(((chars.len() / 8).max(1)) as usize) {
                    let data = compute_postnikov_with(psi, &l).unwrap();
                    for k in 0..m as i64 {
                        let brute = s_qd_brute(psi, d, k);
                        let closed = s_qd_closed(&data, k).unwrap();
                        assert!((brute - closed).norm() < 1e-9, "q={q} d={d} k={k}: {brute} vs {closed}");
                    }
                }
            }
        }
    }

    #[test]
    fn period_brute_matches_pointwise() {
        for (q, d) in [(81u64, 9u64), (625, 25), (343, 7)] {
            let g = UnitGroup::for_modulus(q).unwrap();
            for psi in enumerate_characters(&g, Parity::All).iter().step_by(7) {
                let all = s_qd_brute_period(psi, d);
                for (k, v) in all.iter().enumerate() {
                    assert!((v - s_qd_brute(psi, d, k as i64)).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn s_qd_examples() {
        let psi = &primitive_even(81)[0];
        let data = compute_postnikov(psi, 9).unwrap();
        let s = s_qd_brute(psi, 9, -data.a_psi);
        assert!((s - Complex64::new(9.0, 0.0)).norm() < 1e-12);
        let chars = primitive_even(3125);
        for psi in chars.iter().take(20) {
            let data = compute_postnikov(psi, 25).unwrap();
            let s = s_qd_brute(psi, 25, -data.a_psi);
            let expected = epsilon_r(3125).to_complex()
                * 3125f64.sqrt()
                * f64::from(jacobi(-2 * data.a_psi, 5));
            assert!((s - expected).norm() < 1e-9);
        }
        let psi = &primitive_even(2187)[0];
        let data = compute_postnikov(psi, 27).unwrap();
        assert!(matches!(s_qd_closed(&data, 0), Err(Error::RegimeUnsupported(_))));
    }

    /// The quadratic regime reduces to a Gauss sum; check that reduction directly.
    #[test]
    fn quadratic_regime_via_gauss_sum() {
        let (q, d) = (3125u64, 25u64);
        let r = q / (d * d);
        for psi in primitive_even(q).iter().take(10) {
            let data = compute_postnikov(psi, d).unwrap();
            let a = data.a_psi;
            let k = -a + 3 * d as i64;
            let h = (k + a) / d as i64;
            let half = mod_inv(2, r).unwrap() as i64;
            let via_gauss = quad_gauss_closed(h, -a * half, r).unwrap() * d as f64;
            assert!((s_qd_brute(psi, d, k) - via_gauss).norm() < 1e-9);
        }
    }

    #[test]
    fn hb_sums() {
        let g = UnitGroup::for_modulus(45).unwrap();
        for chi in enumerate_characters(&g, Parity::All).iter().take(10) {
            assert!((hb_sum_brute(chi, 0, 0) - Complex64::new(24.0, 0.0)).norm() < 1e-9);
            for h in -5..5 {
                assert!(hb_sum_brute(chi, h, 2).norm() <= 45.0 + 1e-9);
            }
        }
        let chi = &primitive_even(243)[0];
        let r = hb2_ratio(chi, 9, 4);
        assert!(r.is_finite() && r >= 0.0);
    }
}
