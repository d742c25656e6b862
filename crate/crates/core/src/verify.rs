//! Invariant suites behind `coset-moments verify`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::characters::{enumerate_characters, DirichletCharacter, Parity, UnitGroup};
use crate::error::{Error, Result};
use crate::lvalue::{afe_moment_term, l_central_hurwitz, mellin_check, AfeKernel, HurwitzTable, VTable};
use crate::modarith::{mod_inv, quad_gauss_brute, quad_gauss_closed, signed_residue, FactoredModulus};
use crate::moments::{coset_moment, diag_lemma_check, gambit_rhs, Method, ModulusContext};
use crate::postnikov::{
    compute_postnikov_with, lq_build, s_qd_brute_period, s_qd_closed, solve_a_psi, sum_regime, TruncatedLog,
};
use crate::report::select_psis;

const SEED: u64 = 0x00c0_5e75;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Postnikov,
    Gauss,
    Sqd,
    AfeOracle,
    Gambit,
    Diag,
    Mellin,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Postnikov,
        Suite::Gauss,
        Suite::Sqd,
        Suite::AfeOracle,
        Suite::Gambit,
        Suite::Diag,
        Suite::Mellin,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Postnikov => "postnikov",
            Suite::Gauss => "gauss",
            Suite::Sqd => "sqd",
            Suite::AfeOracle => "afe-oracle",
            Suite::Gambit => "gambit",
            Suite::Diag => "diag",
            Suite::Mellin => "mellin",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

impl CaseResult {
    fn new(label: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        CaseResult { label: label.into(), passed, detail: detail.into() }
    }

    fn from_result(label: impl Into<String>, r: Result<String>) -> Self {
        match r {
            Ok(detail) => CaseResult::new(label, true, detail),
            Err(e) => CaseResult::new(label, false, e.to_string()),
        }
    }
}

impl fmt::Display for CaseResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.label, self.detail)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub cases: Vec<CaseResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> usize {
        self.cases.iter().filter(|c| c.passed).count()
    }

    pub fn failed(&self) -> usize {
        self.cases.len() - self.passed()
    }

    pub fn all_passed(&self) -> bool {
        self.failed() == 0
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {}/{} cases passed{}",
            self.suite,
            self.passed(),
            self.cases.len(),
            if self.all_passed() { "" } else { " (FAILURES)" }
        )
    }
}

/// Grid settings shared by the suites; `None` fields select the default grid.
#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub q: Option<u64>,
    pub d: Option<u64>,
    pub q_max: u64,
    pub r_max: u64,
    pub gauss_pairs: usize,
    pub sample: usize,
    pub tolerance: Option<f64>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            q: None,
            d: None,
            q_max: 20_000,
            r_max: 999,
            gauss_pairs: 100,
            sample: 200,
            tolerance: None,
        }
    }
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<SuiteReport> {
    let cases = match suite {
        Suite::Postnikov => postnikov_suite(cfg)?,
        Suite::Gauss => gauss_suite(cfg),
        Suite::Sqd => sqd_suite(cfg)?,
        Suite::AfeOracle => afe_oracle_suite(cfg)?,
        Suite::Gambit => gambit_suite(cfg)?,
        Suite::Diag => diag_suite(cfg)?,
        Suite::Mellin => mellin_suite(cfg),
    };
    Ok(SuiteReport { suite, cases })
}

/// `(q, d)` with `q = p^k`, `p ∈ {3,5,7,11}`, `2 ≤ k ≤ 6`, `q ≤ q_max`, `d = p^j`, `1 ≤ j < k`.
pub fn prime_power_pairs(q_max: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for p in [3u64, 5, 7, 11] {
        for k in 2..=6u32 {
            let q = p.pow(k);
            if q > q_max {
                break;
            }
            out.extend((1..k).map(|j| (q, p.pow(j))));
        }
    }
    out
}

fn explicit_pairs(cfg: &VerifyConfig) -> Result<Option<Vec<(u64, u64)>>> {
    match (cfg.q, cfg.d) {
        (Some(q), Some(d)) => Ok(Some(vec![(q, d)])),
        (None, None) => Ok(None),
        _ => Err(Error::PreconditionViolated("--q and --d go together".into())),
    }
}

fn primitive(q: u64, parity: Parity) -> Result<Vec<DirichletCharacter>> {
    let g = UnitGroup::for_modulus(q)?;
    Ok(enumerate_characters(&g, parity).into_iter().filter(DirichletCharacter::is_primitive).collect())
}

/// Exhaustive lemma checks on `L_q(1+dx)` over `x, y` mod `q/d`.
fn log_identities(log: &TruncatedLog) -> Result<String> {
    let (q, d) = (log.q(), log.d());
    let m = q / d;
    let fail = |what: &str, x: u64| -> Result<String> {
        Err(Error::PreconditionViolated(format!("{what} fails at x = {x} for q = {q}, d = {d}")))
    };
    if log.coeffs()[0] != d % q || log.coeffs().iter().any(|c| c % d != 0) {
        return fail("coefficient shape", 0);
    }
    let vals: Vec<u64> = (0..m).map(|x| log.eval(x as i64)).collect();
    if vals[0] != 0 {
        return fail("L(1) = 0", 0);
    }
    if let Some(x) = (0..m).find(|&x| log.eval((x + m) as i64) != vals[x as usize]) {
        return fail("periodicity", x);
    }
    let bad_add = (0..m).into_par_iter().find_first(|&x| {
        (0..m).any(|y| {
            let z = (x + y + (d % m) * x % m * y) % m;
            (vals[x as usize] + vals[y as usize]) % q != vals[z as usize]
        })
    });
    if let Some(x) = bad_add {
        return fail("additivity", x);
    }
    let g = q.gcd(&(d.saturating_mul(d)));
    if let Some(x) = (0..m).find(|&x| vals[x as usize] % g != (d * x) % g) {
        return fail("modularity (1)", x);
    }
    let mut checks = "periodicity, additivity, modularity (1)".to_string();
    if q % 3 != 0 && (u128::from(d).pow(3)) % u128::from(q) == 0 {
        let inv2 = mod_inv(2, q)?;
        let bad = (0..m).find(|&x| {
            let dx = d * x % q;
            let sq = (u128::from(dx) * u128::from(dx) % u128::from(q)) as u64;
            let rhs = (dx + q - (u128::from(inv2) * u128::from(sq) % u128::from(q)) as u64) % q;
            vals[x as usize] != rhs
        });
        if let Some(x) = bad {
            return fail("modularity (2)", x);
        }
        checks.push_str(", modularity (2)");
    }
    Ok(format!("N = {}, {checks} over x, y mod {m}", log.truncation_n()))
}

struct PsiCheck {
    a: i64,
    failure: Option<String>,
}

fn check_one_psi(psi: &DirichletCharacter, log: &TruncatedLog) -> PsiCheck {
    let (q, d) = (log.q(), log.d());
    let m = q / d;
    match compute_postnikov_with(psi, log) {
        Err(e) => PsiCheck { a: 0, failure: Some(e.to_string()) },
        Ok(data) => {
            let a = data.a_psi;
            let mut why = Vec::new();
            if !data.verified {
                why.push("not certified".to_string());
            }
            if a.unsigned_abs().gcd(&m) != 1 {
                why.push(format!("gcd(a, {m}) ≠ 1"));
            }
            if !(a != 0 && 2 * a.unsigned_abs() < m) {
                why.push(format!("a = {a} outside (-q/2d, q/2d)"));
            }
            match (m % d == 0, data.b_psi) {
                (true, Some(b)) => {
                    if (a - b).rem_euclid(d as i64) != 0 || !(b != 0 && 2 * b.unsigned_abs() < d) {
                        why.push(format!("b = {b} does not reduce a = {a} into (-d/2, d/2)"));
                    }
                }
                (false, None) => {}
                _ => why.push("b_ψ presence does not match d | q/d".into()),
            }
            match solve_a_psi(&psi.conjugate(), log) {
                Ok(abar) if abar == -a => {}
                Ok(abar) => why.push(format!("a of conjugate is {abar}, expected {}", -a)),
                Err(e) => why.push(e.to_string()),
            }
            PsiCheck { a, failure: (!why.is_empty()).then(|| why.join("; ")) }
        }
    }
}

/// `a_{ψ₁ψ₂} ≡ a_{ψ₁} + a_{ψ₂}` over consecutive pairs with primitive product.
fn homomorphism(chars: &[DirichletCharacter], log: &TruncatedLog) -> Result<usize> {
    let m = log.q() / log.d();
    let mut count = 0;
    for w in chars.windows(2) {
        let prod = w[0].mul(&w[1])?;
        if !prod.is_primitive() {
            continue;
        }
        let (a0, a1, a2) = (solve_a_psi(&w[0], log)?, solve_a_psi(&w[1], log)?, solve_a_psi(&prod, log)?);
        if signed_residue(i128::from(a0) + i128::from(a1), m) != a2 {
            return Err(Error::PreconditionViolated(format!(
                "a({:?}·{:?}) = {a2}, expected {a0} + {a1} mod {m}",
                w[0].exponents(),
                w[1].exponents()
            )));
        }
        count += 1;
    }
    Ok(count)
}

fn postnikov_pair(q: u64, d: u64, per_class: bool) -> Result<Vec<CaseResult>> {
    let qf = FactoredModulus::new(q)?;
    let log = lq_build(d, &qf)?;
    let mut cases = vec![CaseResult::from_result(format!("q={q} d={d} L_q identities"), log_identities(&log))];
    let chars = primitive(q, Parity::Even)?;
    let checks: Vec<PsiCheck> = chars.par_iter().map(|psi| check_one_psi(psi, &log)).collect();
    let all_primitive = primitive(q, Parity::All)?;
    cases.push(CaseResult::from_result(
        format!("q={q} d={d} homomorphism"),
        homomorphism(&all_primitive, &log).map(|n| format!("{n} products")),
    ));
    if per_class {
        let mut classes: BTreeMap<i64, (usize, Vec<String>)> = BTreeMap::new();
        for c in &checks {
            let entry = classes.entry(c.a).or_default();
            entry.0 += 1;
            entry.1.extend(c.failure.clone());
        }
        for (a, (n, fails)) in classes {
            let label = format!("q={q} d={d} a_psi={a}");
            let detail = format!("{n} primitive even characters certified over x mod {}", q / d);
            cases.push(if fails.is_empty() {
                CaseResult::new(label, true, detail)
            } else {
                CaseResult::new(label, false, fails.join("; "))
            });
        }
    } else {
        let fails: Vec<String> = checks.iter().filter_map(|c| c.failure.clone()).collect();
        let classes: std::collections::BTreeSet<i64> = checks.iter().map(|c| c.a).collect();
        let label = format!("q={q} d={d} Postnikov formula");
        cases.push(if fails.is_empty() {
            CaseResult::new(
                label,
                true,
                format!("{} primitive even characters in {} a_psi classes, all certified", checks.len(), classes.len()),
            )
        } else {
            CaseResult::new(label, false, format!("{} failures, first: {}", fails.len(), fails[0]))
        });
    }
    Ok(cases)
}

fn postnikov_suite(cfg: &VerifyConfig) -> Result<Vec<CaseResult>> {
    match explicit_pairs(cfg)? {
        Some(pairs) => postnikov_pair(pairs[0].0, pairs[0].1, true),
        None => {
            let mut out = Vec::new();
            for (q, d) in prime_power_pairs(cfg.q_max) {
                out.extend(postnikov_pair(q, d, false)?);
            }
            Ok(out)
        }
    }
}

fn gauss_suite(cfg: &VerifyConfig) -> Vec<CaseResult> {
    let tol = cfg.tolerance.unwrap_or(1e-9);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut inputs = Vec::new();
    for r in (1..=cfg.r_max).step_by(2) {
        let pairs: Vec<(i64, i64)> = (0..cfg.gauss_pairs)
            .map(|_| {
                let a = rng.gen_range(0..r) as i64;
                let b = loop {
                    let b = rng.gen_range(0..r.max(2)) as i64;
                    if (b as u64).gcd(&r) == 1 {
                        break b;
                    }
                };
                (a, b)
            })
            .collect();
        inputs.push((r, pairs));
    }
    inputs
        .par_iter()
        .map(|(r, pairs)| {
            let mut worst: f64 = 0.0;
            for &(a, b) in pairs {
                match quad_gauss_closed(a, b, *r) {
                    Ok(c) => worst = worst.max((c - quad_gauss_brute(a, b, *r)).norm()),
                    Err(e) => return CaseResult::new(format!("r={r}"), false, format!("A={a} B={b}: {e}")),
                }
            }
            CaseResult::new(format!("r={r}"), worst <= tol, format!("{} pairs, max error {worst:.2e}", pairs.len()))
        })
        .collect()
}

fn sqd_pair(q: u64, d: u64, tol: f64) -> Result<CaseResult> {
    let regime = sum_regime(d, q).ok_or_else(|| {
        Error::RegimeUnsupported(format!("d = {d}, q = {q} is neither q | d² nor d² | q | d³ with 3 ∤ q"))
    })?;
    let log = lq_build(d, &FactoredModulus::new(q)?)?;
    let chars = primitive(q, Parity::All)?;
    let label = format!("q={q} d={d} {regime:?}");
    let errs: Vec<Result<f64>> = chars
        .par_iter()
        .map(|psi| {
            let data = compute_postnikov_with(psi, &log)?;
            let brute = s_qd_brute_period(psi, d);
            let mut worst: f64 = 0.0;
            for (k, b) in brute.iter().enumerate() {
                worst = worst.max((s_qd_closed(&data, k as i64)? - b).norm());
            }
            Ok(worst)
        })
        .collect();
    let mut worst: f64 = 0.0;
    for e in errs {
        match e {
            Ok(w) => worst = worst.max(w),
            Err(e) => return Ok(CaseResult::new(label, false, e.to_string())),
        }
    }
    Ok(CaseResult::new(
        label,
        worst <= tol,
        format!("{} primitive characters × {} values of k, max error {worst:.2e}", chars.len(), q / d),
    ))
}

fn sqd_suite(cfg: &VerifyConfig) -> Result<Vec<CaseResult>> {
    let tol = cfg.tolerance.unwrap_or(1e-9);
    match explicit_pairs(cfg)? {
        Some(pairs) => Ok(vec![sqd_pair(pairs[0].0, pairs[0].1, tol)?]),
        None => prime_power_pairs(cfg.q_max)
            .into_iter()
            .filter(|&(q, d)| sum_regime(d, q).is_some())
            .map(|(q, d)| sqd_pair(q, d, tol))
            .collect(),
    }
}

/// Every primitive even character mod `q` through the ratio-class kernel, plus the
/// literal divisor-convolution route on the first one, against the Hurwitz oracle.
pub fn afe_oracle_modulus(q: u64, vt: &VTable, tol: f64) -> Result<Option<CaseResult>> {
    let chars = primitive(q, Parity::Even)?;
    if chars.is_empty() {
        return Ok(None);
    }
    let cutoff = crate::lvalue::afe::MIN_CUTOFF_FACTOR * q;
    let table = HurwitzTable::new(q);
    let kernel = AfeKernel::new(q, vt, cutoff)?;
    let errs: Vec<Result<f64>> = chars
        .par_iter()
        .map(|chi| {
            let k = kernel.evaluate(chi)?.value;
            Ok((k - l_central_hurwitz(chi, &table)?.norm_sqr()).abs())
        })
        .collect();
    let mut worst: f64 = 0.0;
    for e in errs {
        worst = worst.max(e?);
    }
    let lit = afe_moment_term(&chars[0], vt, cutoff)?.value;
    let lit_err = (lit - l_central_hurwitz(&chars[0], &table)?.norm_sqr()).abs();
    let regroup = (lit - kernel.evaluate(&chars[0])?.value).abs();
    Ok(Some(CaseResult::new(
        format!("q={q}"),
        worst <= tol && lit_err <= tol && regroup <= 1e-10,
        format!(
            "{} characters, max error {worst:.2e}; literal route {lit_err:.2e}, regrouping {regroup:.2e}",
            chars.len()
        ),
    )))
}

/// `count` random primitive even characters with `lo < q ≤ hi`, literal route only.
pub fn afe_oracle_sample(lo: u64, hi: u64, count: usize, vt: &VTable, tol: f64) -> Result<Vec<CaseResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ hi);
    let mut picks = Vec::new();
    while picks.len() < count {
        let q = rng.gen_range(lo + 1..=hi) | 1;
        if q > hi {
            continue;
        }
        let chars = primitive(q, Parity::Even)?;
        if chars.is_empty() {
            continue;
        }
        let chi = chars[rng.gen_range(0..chars.len())].clone();
        picks.push(chi);
    }
    let mut out = Vec::with_capacity(count);
    for chi in picks {
        let q = chi.modulus();
        let table = HurwitzTable::new(q);
        let lit = afe_moment_term(&chi, vt, crate::lvalue::afe::MIN_CUTOFF_FACTOR * q)?;
        let err = (lit.value - l_central_hurwitz(&chi, &table)?.norm_sqr()).abs();
        out.push(CaseResult::new(
            format!("q={q} chi={:?}", chi.exponents()),
            err <= tol,
            format!("|L|² = {:.10}, error {err:.2e}", lit.value),
        ));
    }
    Ok(out)
}

fn afe_oracle_suite(cfg: &VerifyConfig) -> Result<Vec<CaseResult>> {
    let vt = VTable::new()?;
    let tol = cfg.tolerance.unwrap_or(1e-6);
    if let Some(q) = cfg.q {
        return Ok(afe_oracle_modulus(q, &vt, tol)?.into_iter().collect());
    }
    let q_max = cfg.q_max.min(2000);
    let mut out = Vec::new();
    for q in (3..=q_max).step_by(2) {
        out.extend(afe_oracle_modulus(q, &vt, tol)?);
    }
    if cfg.sample > 0 {
        out.extend(afe_oracle_sample(q_max, 10 * q_max, cfg.sample, &vt, cfg.tolerance.unwrap_or(1e-5))?);
    }
    Ok(out)
}

pub const GAMBIT_PAIRS: [(u64, u64); 4] = [(243, 27), (729, 27), (625, 25), (2401, 49)];

/// Coset moment by the Hurwitz route against the truncated `m ≡ ±n (d)` sum.
pub fn gambit_pair(q: u64, d: u64, psi_count: usize, vt: Arc<VTable>, tol: f64) -> Result<Vec<CaseResult>> {
    let qf = FactoredModulus::new(q)?;
    let df = FactoredModulus::new(d)?;
    let ctx = ModulusContext::new(&qf, vt)?;
    let mut out = Vec::new();
    for psi in select_psis(&ctx, d, psi_count)? {
        let lhs = coset_moment(&ctx, &psi, &df, Parity::Even, Method::Hurwitz)?;
        let rhs = gambit_rhs(&ctx, &psi, d, ctx.cutoff())?;
        let err = (lhs - rhs).abs();
        out.push(CaseResult::new(
            format!("q={q} d={d} psi={:?}", psi.exponents()),
            err <= tol,
            format!("M = {lhs:.10}, sum = {rhs:.10}, error {err:.2e}"),
        ));
    }
    Ok(out)
}

fn gambit_suite(cfg: &VerifyConfig) -> Result<Vec<CaseResult>> {
    let vt = Arc::new(VTable::new()?);
    let tol = cfg.tolerance.unwrap_or(1e-5);
    let pairs = explicit_pairs(cfg)?.unwrap_or_else(|| GAMBIT_PAIRS.to_vec());
    let mut out = Vec::new();
    for (q, d) in pairs {
        out.extend(gambit_pair(q, d, 3, vt.clone(), tol)?);
    }
    Ok(out)
}

pub const DIAG_MODULI: [u64; 3] = [625, 2401, 14641];

fn diag_suite(cfg: &VerifyConfig) -> Result<Vec<CaseResult>> {
    let vt = VTable::new()?;
    let moduli = cfg.q.map_or_else(|| DIAG_MODULI.to_vec(), |q| vec![q]);
    moduli
        .into_iter()
        .map(|q| {
            let c = diag_lemma_check(&FactoredModulus::new(q)?, &vt, 100.0)?;
            let bound = cfg.tolerance.unwrap_or(10.0) / (q as f64).sqrt();
            let err = (c.lhs - c.rhs).abs();
            Ok(CaseResult::new(
                format!("q={q}"),
                err <= bound,
                format!("lhs {:.10}, rhs {:.10}, |diff| {err:.2e} ≤ {bound:.2e}", c.lhs, c.rhs),
            ))
        })
        .collect()
}

fn mellin_suite(cfg: &VerifyConfig) -> Vec<CaseResult> {
    let tol = cfg.tolerance.unwrap_or(1e-6);
    let mut out = Vec::new();
    for s in [-0.4, -0.2, 0.0, 0.2, 0.4] {
        for k in [1i64, -2, 3, 5, -8] {
            let label = format!("s={s} k={k}");
            out.push(match mellin_check(s, k) {
                Ok(c) => CaseResult::new(
                    label,
                    c.abs_error() <= tol,
                    format!("lhs {:.12}, rhs {:.12}, error {:.2e}", c.lhs, c.rhs, c.abs_error()),
                ),
                Err(e) => CaseResult::new(label, false, e.to_string()),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.as_str().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn pair_grid() {
        let pairs = prime_power_pairs(20_000);
        assert!(pairs.contains(&(729, 27)));
        assert!(pairs.contains(&(14641, 1331)));
        assert!(!pairs.iter().any(|&(q, _)| q > 20_000));
        assert!(pairs.iter().all(|&(q, d)| q % d == 0 && d < q));
    }

    #[test]
    fn postnikov_729_27() {
        let cfg = VerifyConfig { q: Some(729), d: Some(27), ..Default::default() };
        let r = run_suite(Suite::Postnikov, &cfg).unwrap();
        assert!(r.all_passed(), "{:#?}", r.cases);
        let classes = r.cases.iter().filter(|c| c.label.contains("a_psi=")).count();
        assert_eq!(classes, 18);
    }

    #[test]
    fn small_suites() {
        let cfg = VerifyConfig { r_max: 41, gauss_pairs: 10, ..Default::default() };
        assert!(run_suite(Suite::Gauss, &cfg).unwrap().all_passed());
        let cfg = VerifyConfig { q: Some(3125), d: Some(25), ..Default::default() };
        assert!(run_suite(Suite::Sqd, &cfg).unwrap().all_passed());
        let cfg = VerifyConfig { q: Some(2187), d: Some(27), ..Default::default() };
        assert!(matches!(run_suite(Suite::Sqd, &cfg), Err(Error::RegimeUnsupported(_))));
        assert!(run_suite(Suite::Mellin, &VerifyConfig::default()).unwrap().all_passed());
    }
}
