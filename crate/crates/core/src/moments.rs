//! Coset second moments `Σ_χ |L(1/2, χψ)|²` and their predicted main terms.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::characters::{coset_character, enumerate_characters, DirichletCharacter, Parity, UnitGroup};
use crate::error::{Error, Result};
use crate::lvalue::afe::{AfeKernel, MIN_CUTOFF_FACTOR};
use crate::lvalue::gamma::{DIGAMMA_QUARTER, EULER_GAMMA};
use crate::lvalue::hurwitz::{hurwitz_zeta_half, l_central_hurwitz, HurwitzTable};
use crate::lvalue::vfunc::VTable;
use crate::modarith::{
    big_fraction_mod1, jacobi_big, mod_inv_big, prec, preceq, sigma0, signed_residue_big,
    theta_q, CompensatedSum, ComplexSum, FactoredModulus,
};
use crate::postnikov::PostnikovData;

/// Which theorem's hypotheses `(d, q)` satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    #[serde(rename = "thm1")]
    Thm1,
    #[serde(rename = "thm2")]
    Thm2,
    #[serde(rename = "thm3")]
    Thm3,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Thm1 => "thm1",
            Regime::Thm2 => "thm2",
            Regime::Thm3 => "thm3",
        }
    }
}

/// `d ≺ q ⪯ d²` gives Thm1, else `d² ⪯ q ⪯ d³` with `3 ∤ q` gives Thm2,
/// else any `d | q` gives Thm3.
pub fn classify(d: &FactoredModulus, q: &FactoredModulus) -> Result<Regime> {
    if !d.divides(q) {
        return Err(Error::RegimeViolation(format!("{d} does not divide {q}")));
    }
    let d2 = d.pow(2);
    let d3 = d.pow(3);
    if !d.is_one() && prec(d, q) && preceq(q, &d2) {
        Ok(Regime::Thm1)
    } else if !d.is_one() && preceq(&d2, q) && preceq(q, &d3) && q.valuation(3) == 0 {
        Ok(Regime::Thm2)
    } else {
        Ok(Regime::Thm3)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Hurwitz,
    Afe,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Hurwitz => "hurwitz",
            Method::Afe => "afe",
        }
    }
}

/// Per-modulus tables shared by every character mod `q`.
pub struct ModulusContext {
    q: FactoredModulus,
    group: Arc<UnitGroup>,
    vt: Arc<VTable>,
    cutoff: u64,
    hurwitz: OnceLock<HurwitzTable>,
    afe: OnceLock<Result<AfeKernel>>,
    conductor_tables: Mutex<HashMap<u64, Arc<(Arc<UnitGroup>, HurwitzTable)>>>,
}

/// Largest modulus for which L-values are computed.
pub const MAX_LVALUE_MODULUS: u64 = 200_000;

impl ModulusContext {
    pub fn new(q: &FactoredModulus, vt: Arc<VTable>) -> Result<Self> {
        let qv = q.value_u64()?;
        Self::with_cutoff(q, vt, MIN_CUTOFF_FACTOR * qv)
    }

    pub fn with_cutoff(q: &FactoredModulus, vt: Arc<VTable>, cutoff: u64) -> Result<Self> {
        let qv = q.value_u64()?;
        if qv > MAX_LVALUE_MODULUS {
            return Err(Error::ModulusTooLarge { q: q.to_string(), limit: MAX_LVALUE_MODULUS });
        }
        Ok(ModulusContext {
            q: q.clone(),
            group: UnitGroup::new(q)?,
            vt,
            cutoff,
            hurwitz: OnceLock::new(),
            afe: OnceLock::new(),
            conductor_tables: Mutex::new(HashMap::new()),
        })
    }

    pub fn modulus(&self) -> &FactoredModulus {
        &self.q
    }

    pub fn q(&self) -> u64 {
        self.group.q()
    }

    pub fn group(&self) -> &Arc<UnitGroup> {
        &self.group
    }

    pub fn vtable(&self) -> &Arc<VTable> {
        &self.vt
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    pub fn hurwitz(&self) -> &HurwitzTable {
        self.hurwitz.get_or_init(|| HurwitzTable::new(self.q()))
    }

    pub fn afe_kernel(&self) -> Result<&AfeKernel> {
        match self.afe.get_or_init(|| AfeKernel::new(self.q(), &self.vt, self.cutoff)) {
            Ok(k) => Ok(k),
            Err(e) => Err(Error::PreconditionViolated(e.to_string())),
        }
    }

    fn conductor_table(&self, c: u64) -> Result<Arc<(Arc<UnitGroup>, HurwitzTable)>> {
        let mut map = self.conductor_tables.lock().expect("table cache poisoned");
        if let Some(t) = map.get(&c) {
            return Ok(t.clone());
        }
        let entry = Arc::new((UnitGroup::for_modulus(c)?, HurwitzTable::new(c)));
        map.insert(c, entry.clone());
        Ok(entry)
    }

    /// `|L(1/2, χ)|²` for a character mod `q` of any conductor > 1 or the principal one.
    pub fn l_abs_sq(&self, chi: &DirichletCharacter, method: Method) -> Result<f64> {
        match method {
            Method::Afe => Ok(self.afe_kernel()?.evaluate(chi)?.value),
            Method::Hurwitz => Ok(self.l_central(chi)?.norm_sqr()),
        }
    }

    /// `L(1/2, χ)` by the Hurwitz route; imprimitive characters go through
    /// their primitive inducer and the missing Euler factors.
    pub fn l_central(&self, chi: &DirichletCharacter) -> Result<Complex64> {
        if chi.is_primitive() {
            return l_central_hurwitz(chi, self.hurwitz());
        }
        let c = chi.conductor();
        let base = if c == 1 {
            Complex64::new(hurwitz_zeta_half(1.0), 0.0)
        } else {
            let entry = self.conductor_table(c)?;
            let prim = chi.primitive_on(&entry.0)?;
            l_central_hurwitz(&prim, &entry.1)?
        };
        let mut value = base;
        for p in self.q.primes() {
            if c % p != 0 {
                // 1 - χ*(p) p^{-1/2}; χ*(p) is read off χ through any lift of p.
                let lift = lift_coprime_to(p, c, self.q());
                let chi_p = if c == 1 {
                    Complex64::new(1.0, 0.0)
                } else {
                    chi.eval(lift as i64)
                };
                value *= Complex64::new(1.0, 0.0) - chi_p / (p as f64).sqrt();
            }
        }
        Ok(value)
    }
}

/// An integer `≡ p (mod c)` that is a unit mod `q`.
fn lift_coprime_to(p: u64, c: u64, q: u64) -> u64 {
    (0..q).map(|k| p + k * c).find(|&m| num_integer::gcd(m, q) == 1).expect("lift exists")
}

/// `D = (φ(d)/2)(φ(q)/q)(ln q + 2γ₀ + ψ(1/4) - ln π + 2θ(q))`.
pub fn main_d(q: &FactoredModulus, d: &FactoredModulus) -> f64 {
    let phi_d = d.phi().to_f64().unwrap_or(f64::INFINITY);
    let ratio = q.phi().to_f64().unwrap_or(0.0) / q.value().to_f64().unwrap_or(1.0);
    let ln_q = ln_big(q.value());
    phi_d / 2.0 * ratio * (ln_q + 2.0 * EULER_GAMMA + DIGAMMA_QUARTER - PI.ln() + 2.0 * theta_q(q))
}

fn ln_big(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        n.to_f64().unwrap().ln()
    } else {
        let shift = bits - 64;
        (n >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// `γ'/γ(1/2) = -(1/2) ln π + (1/2) ψ(1/4)`.
pub fn gamma_log_derivative_half() -> f64 {
    -0.5 * PI.ln() + 0.5 * DIGAMMA_QUARTER
}

/// Both sides of the diagonal lemma.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagCheck {
    pub q: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub terms: u64,
}

/// `Σ_{(n,q)=1, n² ≤ factor·q} V(n²/q)/n` against its closed form.
pub fn diag_lemma_check(q: &FactoredModulus, vt: &VTable, factor: f64) -> Result<DiagCheck> {
    let qv = q.value_u64()?;
    let n_max = (factor * qv as f64).sqrt().floor() as u64;
    let mut sum = CompensatedSum::new();
    for n in 1..=n_max {
        if q.primes().all(|p| n % p != 0) {
            sum.add(vt.eval((n * n) as f64 / qv as f64) / n as f64);
        }
    }
    let ratio = q.phi().to_f64().unwrap() / qv as f64;
    let rhs = ratio * (0.5 * (qv as f64).ln() + EULER_GAMMA + gamma_log_derivative_half() + theta_q(q));
    Ok(DiagCheck { q: qv, lhs: sum.value(), rhs, terms: n_max })
}

fn check_thm1(data: &PostnikovData) -> Result<()> {
    let (q, d) = (data.q as u128, data.d as u128);
    if !(d < q && (d * d) % q == 0) {
        return Err(Error::RegimeViolation(format!(
            "A needs d ≺ q ⪯ d², got d = {}, q = {}",
            data.d, data.q
        )));
    }
    Ok(())
}

/// `A = (φ(d)/d) √q σ₀(|a_ψ|)/√|a_ψ|`.
pub fn main_a(data: &PostnikovData) -> Result<f64> {
    check_thm1(data)?;
    let d = FactoredModulus::new(data.d)?;
    let a = data.a_psi.unsigned_abs();
    Ok(d.phi_u64().unwrap() as f64 / data.d as f64 * (data.q as f64).sqrt() * sigma0(a) as f64
        / (a as f64).sqrt())
}

/// The exact arithmetic behind `A′`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AprimePhase {
    pub q: String,
    pub d: String,
    pub a_psi: String,
    pub b_psi: String,
    /// `(2a)^{-1}(a-b)² mod q`.
    pub residue: String,
    /// `residue / q` reduced to `[-1/2, 1/2)`.
    pub fraction: f64,
    /// `cos(2π·fraction)` for `q ≡ 1 (4)`, `sin(2π·fraction)` for `q ≡ 3 (4)`.
    pub trig: f64,
    pub trig_kind: String,
    /// `(2a/q)`.
    pub jacobi_q: i32,
    /// `(2a/(q/d²))`.
    pub jacobi_reduced: i32,
    pub phi_d: f64,
    pub sigma0_b: Option<u64>,
    /// `A′`, when `σ₀(|b|)` is computable.
    pub aprime: Option<f64>,
}

/// Exact `A′` data from `a_ψ` alone; works for moduli far beyond table range.
pub fn aprime_phase(q: &FactoredModulus, d: &FactoredModulus, a: &BigInt) -> Result<AprimePhase> {
    let d2 = d.pow(2);
    let d3 = d.pow(3);
    if !(preceq(&d2, q) && preceq(q, &d3) && q.valuation(3) == 0) {
        return Err(Error::RegimeViolation(format!(
            "A′ needs d² ⪯ q ⪯ d³ and 3 ∤ q, got d = {d}, q = {q}"
        )));
    }
    let qv = q.value();
    let dv = d.value();
    let b = signed_residue_big(a, dv);
    let diff = a - &b;
    let two_a = a * BigInt::from(2);
    let inv = mod_inv_big(&two_a, qv)?;
    let sq = (&diff * &diff).magnitude() % qv;
    let residue = (BigUint::from(inv) * sq) % qv;
    let fraction = big_fraction_mod1(&residue, qv);
    let q_mod4 = (qv % 4u32).to_u32().unwrap();
    let (trig, trig_kind) = if q_mod4 == 1 {
        ((TAU * fraction).cos(), "cos")
    } else {
        ((TAU * fraction).sin(), "sin")
    };
    let jacobi_q = jacobi_big(&two_a, qv);
    let reduced = qv / d2.value();
    let jacobi_reduced = if reduced.is_one() { 1 } else { jacobi_big(&two_a, &reduced) };
    let phi_d = d.phi().to_f64().unwrap_or(f64::INFINITY);
    let sigma0_b = b.abs().to_u64().filter(|v| !v.is_zero()).map(sigma0);
    let aprime = sigma0_b.map(|s| {
        let babs = b.abs().to_f64().unwrap();
        f64::from(jacobi_q) * phi_d * s as f64 / babs.sqrt() * trig
    });
    Ok(AprimePhase {
        q: qv.to_string(),
        d: dv.to_string(),
        a_psi: a.to_string(),
        b_psi: b.to_string(),
        residue: residue.to_string(),
        fraction,
        trig,
        trig_kind: trig_kind.into(),
        jacobi_q,
        jacobi_reduced,
        phi_d,
        sigma0_b,
        aprime,
    })
}

/// `A′ = (2a_ψ/q) φ(d) σ₀(|b_ψ|)/√|b_ψ| · {cos, sin}(2π (2a_ψ)^{-1}(a_ψ-b_ψ)²/q)`.
pub fn main_aprime(data: &PostnikovData) -> Result<f64> {
    let q = FactoredModulus::new(data.q)?;
    let d = FactoredModulus::new(data.d)?;
    let phase = aprime_phase(&q, &d, &BigInt::from(data.a_psi))?;
    if let Some(b) = data.b_psi {
        debug_assert_eq!(phase.b_psi, b.to_string());
    }
    phase
        .aprime
        .ok_or_else(|| Error::RegimeViolation("b_ψ = 0 leaves A′ undefined".into()))
}

/// Deterministic sum of per-character values computed in parallel.
fn ordered_sum(values: Vec<Result<f64>>) -> Result<f64> {
    let mut s = CompensatedSum::new();
    for v in values {
        s.add(v?);
    }
    Ok(s.value())
}

/// `Σ_{χ mod d} |L(1/2, χψ)|²` over even `χ` or all `χ`.
pub fn coset_moment(
    ctx: &ModulusContext,
    psi: &DirichletCharacter,
    d: &FactoredModulus,
    parity: Parity,
    method: Method,
) -> Result<f64> {
    let coset = coset(ctx, psi, d, parity)?;
    if method == Method::Afe && coset.iter().any(|c| !c.is_primitive() || !c.is_even()) {
        return Err(Error::NotPrimitiveEven);
    }
    let values: Vec<Result<f64>> = coset.par_iter().map(|c| ctx.l_abs_sq(c, method)).collect();
    ordered_sum(values)
}

/// The characters `χψ`, `χ` mod `d` of the requested parity.
pub fn coset(
    ctx: &ModulusContext,
    psi: &DirichletCharacter,
    d: &FactoredModulus,
    parity: Parity,
) -> Result<Vec<DirichletCharacter>> {
    if psi.modulus() != ctx.q() {
        return Err(Error::PreconditionViolated(format!(
            "ψ has modulus {}, context is for {}",
            psi.modulus(),
            ctx.q()
        )));
    }
    if !d.divides(ctx.modulus()) {
        return Err(Error::RegimeViolation(format!("{d} does not divide {}", ctx.q())));
    }
    if parity == Parity::Even && !d.is_one() && !prec(d, ctx.modulus()) {
        return Err(Error::RegimeViolation(format!(
            "the even coset needs d ≺ q, got d = {d}, q = {}",
            ctx.q()
        )));
    }
    let gd = UnitGroup::new(d)?;
    enumerate_characters(&gd, parity)
        .iter()
        .map(|chi| coset_character(chi, psi))
        .collect()
}

/// `φ(d) Σ_± Σ_{m ≡ ±n (d), (mn,q)=1, mn ≤ T} ψ(m) ψ̄(n) V(mn/q)/√(mn)`.
pub fn gambit_rhs(ctx: &ModulusContext, psi: &DirichletCharacter, d: u64, cutoff: u64) -> Result<f64> {
    let q = ctx.q();
    if q % d != 0 {
        return Err(Error::RegimeViolation(format!("{d} does not divide {q}")));
    }
    let e = psi.group().exponent();
    let roots = psi.group().roots();
    let idx = psi.index_table();
    let vt = ctx.vtable();
    let qf = q as f64;
    let phi_d = FactoredModulus::new(d)?.phi_u64().unwrap() as f64;
    let rows: Vec<Complex64> = (1..=cutoff)
        .into_par_iter()
        .map(|n| {
            let mut row = ComplexSum::new();
            let Some(i_n) = idx[(n % q) as usize] else { return row.value() };
            let m_max = cutoff / n;
            for sign in [1i64, -1] {
                let start = (sign * n as i64).rem_euclid(d as i64) as u64;
                let mut m = if start == 0 { d } else { start };
                while m <= m_max {
                    if let Some(i_m) = idx[(m % q) as usize] {
                        let t = (m * n) as f64;
                        let w = vt.eval(t / qf) / t.sqrt();
                        row.add(roots[((i_m + e - i_n) % e) as usize] * w);
                    }
                    m += d;
                }
            }
            row.value()
        })
        .collect();
    let mut total = ComplexSum::new();
    for r in rows {
        total.add(r);
    }
    Ok(phi_d * total.value().re)
}

/// `M_{m=n} = φ(d) Σ_{(n,q)=1} V(n²/q)/n`.
pub fn m_diagonal(q: &FactoredModulus, d: &FactoredModulus, vt: &VTable) -> Result<f64> {
    let diag = diag_lemma_check(q, vt, 100.0)?;
    Ok(d.phi().to_f64().unwrap() * diag.lhs)
}
