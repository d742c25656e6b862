//! Moment reports, character selection, and family scans.

use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::characters::{enumerate_characters, DirichletCharacter, Parity};
use crate::error::{Error, Result};
use crate::lvalue::vfunc::{VTable, VTableParams};
use crate::modarith::{signed_residue, FactoredModulus};
use crate::moments::{
    aprime_phase, classify, coset, coset_moment, main_a, main_d, Method, ModulusContext, Regime,
};
use crate::postnikov::{compute_postnikov_with, lq_build, solve_a_psi, PostnikovData};

pub const CSV_VERSION_LINE: &str = "# coset-moments report v1";

pub const CSV_COLUMNS: [&str; 14] = [
    "q",
    "d",
    "psi_index",
    "a_psi",
    "b_psi",
    "regime",
    "M",
    "D",
    "A_or_Aprime",
    "residual",
    "predicted_scale",
    "ratio",
    "method",
    "seconds",
];

/// Constants and quadrature settings behind a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub weight: String,
    pub constants: String,
    pub v_table: VTableParams,
}

impl ReportMeta {
    fn new(vt: &VTable) -> Self {
        ReportMeta {
            weight: "G(s) = 1".into(),
            constants: "Euler gamma and digamma(1/4) = -gamma - pi/2 - 3 ln 2 as f64 literals".into(),
            v_table: vt.params().clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub q: u64,
    pub d: u64,
    pub psi_index: Vec<u64>,
    pub a_psi: Option<i64>,
    pub b_psi: Option<i64>,
    pub regime: Regime,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "D")]
    pub main_d: Option<f64>,
    #[serde(rename = "A_or_Aprime")]
    pub secondary: Option<f64>,
    pub residual: Option<f64>,
    pub predicted_scale: f64,
    /// `|residual| / predicted_scale`, or `M / envelope` for Thm3.
    pub ratio: f64,
    pub method: Method,
    pub coset_size: usize,
    pub afe_cutoff: Option<u64>,
    pub jacobi_q: Option<i32>,
    pub jacobi_reduced: Option<i32>,
    pub seconds: Option<f64>,
    pub meta: ReportMeta,
}

fn opt<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

impl MomentReport {
    pub fn csv_row(&self) -> String {
        let psi = self.psi_index.iter().map(u64::to_string).collect::<Vec<_>>().join(";");
        [
            self.q.to_string(),
            self.d.to_string(),
            psi,
            opt(&self.a_psi),
            opt(&self.b_psi),
            self.regime.as_str().to_string(),
            self.m.to_string(),
            opt(&self.main_d),
            opt(&self.secondary),
            opt(&self.residual),
            self.predicted_scale.to_string(),
            self.ratio.to_string(),
            self.method.as_str().to_string(),
            opt(&self.seconds),
        ]
        .join(",")
    }
}

pub fn csv_header() -> String {
    format!("{CSV_VERSION_LINE}\n{}\n", CSV_COLUMNS.join(","))
}

pub fn to_csv(reports: &[MomentReport]) -> String {
    let mut out = csv_header();
    for r in reports {
        let _ = writeln!(out, "{}", r.csv_row());
    }
    out
}

pub fn to_json(reports: &[MomentReport]) -> Result<String> {
    Ok(serde_json::to_string_pretty(reports)? + "\n")
}

/// Postnikov data when `(d, q)` admits it, else `None`.
fn postnikov_for(ctx: &ModulusContext, psi: &DirichletCharacter, d: u64) -> Result<Option<PostnikovData>> {
    match lq_build(d, ctx.modulus()) {
        Ok(log) => Ok(Some(compute_postnikov_with(psi, &log)?)),
        Err(Error::PreconditionViolated(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Full pipeline for the regime `(d, q)` falls in.
pub fn theorem_report(
    ctx: &ModulusContext,
    psi: &DirichletCharacter,
    d: &FactoredModulus,
    method: Method,
    record_timing: bool,
) -> Result<MomentReport> {
    match classify(d, ctx.modulus())? {
        Regime::Thm3 => bound_report(ctx, psi, d, record_timing),
        regime => asymptotic_report(ctx, psi, d, regime, method, record_timing),
    }
}

fn asymptotic_report(
    ctx: &ModulusContext,
    psi: &DirichletCharacter,
    d: &FactoredModulus,
    regime: Regime,
    method: Method,
    record_timing: bool,
) -> Result<MomentReport> {
    let start = Instant::now();
    if !psi.is_primitive() || !psi.is_even() {
        return Err(Error::NotPrimitiveEven);
    }
    let dv = d.value_u64()?;
    let qv = ctx.q();
    let data = postnikov_for(ctx, psi, dv)?
        .ok_or_else(|| Error::RegimeViolation(format!("no Postnikov data for d = {dv}, q = {qv}")))?;
    let members = coset(ctx, psi, d, Parity::Even)?.len();
    let m = coset_moment(ctx, psi, d, Parity::Even, method)?;
    let main = main_d(ctx.modulus(), d);
    let (secondary, jq, jr, scale) = match regime {
        Regime::Thm1 => (main_a(&data)?, None, None, (qv as f64).powf(-0.125) * dv as f64),
        _ => {
            let ph = aprime_phase(ctx.modulus(), d, &BigInt::from(data.a_psi))?;
            let value = ph
                .aprime
                .ok_or_else(|| Error::RegimeViolation("b_ψ = 0 leaves A′ undefined".into()))?;
            (value, Some(ph.jacobi_q), Some(ph.jacobi_reduced), (dv as f64).powf(-0.25) * (qv as f64).sqrt())
        }
    };
    let residual = m - main - secondary;
    Ok(MomentReport {
        q: qv,
        d: dv,
        psi_index: psi.exponents().to_vec(),
        a_psi: Some(data.a_psi),
        b_psi: data.b_psi,
        regime,
        m,
        main_d: Some(main),
        secondary: Some(secondary),
        residual: Some(residual),
        predicted_scale: scale,
        ratio: residual.abs() / scale,
        method,
        coset_size: members,
        afe_cutoff: (method == Method::Afe).then(|| ctx.cutoff()),
        jacobi_q: jq,
        jacobi_reduced: jr,
        seconds: record_timing.then(|| start.elapsed().as_secs_f64()),
        meta: ReportMeta::new(ctx.vtable()),
    })
}

/// `M_all = Σ_{χ mod d} |L(1/2, χψ)|²` against `d + d^{-1/2} q^{1/2}`.
pub fn bound_report(
    ctx: &ModulusContext,
    psi: &DirichletCharacter,
    d: &FactoredModulus,
    record_timing: bool,
) -> Result<MomentReport> {
    let start = Instant::now();
    if !psi.is_primitive() {
        return Err(Error::NotPrimitive(ctx.q()));
    }
    let dv = d.value_u64()?;
    let qv = ctx.q();
    let data = postnikov_for(ctx, psi, dv)?;
    let members = coset(ctx, psi, d, Parity::All)?.len();
    let m = coset_moment(ctx, psi, d, Parity::All, Method::Hurwitz)?;
    let envelope = dv as f64 + (qv as f64).sqrt() / (dv as f64).sqrt();
    Ok(MomentReport {
        q: qv,
        d: dv,
        psi_index: psi.exponents().to_vec(),
        a_psi: data.as_ref().map(|p| p.a_psi),
        b_psi: data.as_ref().and_then(|p| p.b_psi),
        regime: Regime::Thm3,
        m,
        main_d: None,
        secondary: None,
        residual: None,
        predicted_scale: envelope,
        ratio: m / envelope,
        method: Method::Hurwitz,
        coset_size: members,
        afe_cutoff: None,
        jacobi_q: None,
        jacobi_reduced: None,
        seconds: record_timing.then(|| start.elapsed().as_secs_f64()),
        meta: ReportMeta::new(ctx.vtable()),
    })
}

/// Primitive even characters mod `q` paired with `a_ψ` for the given `d` when defined.
pub fn primitive_even_with_a(ctx: &ModulusContext, d: u64) -> Result<Vec<(DirichletCharacter, Option<i64>)>> {
    let log = lq_build(d, ctx.modulus()).ok();
    enumerate_characters(ctx.group(), Parity::Even)
        .into_iter()
        .filter(DirichletCharacter::is_primitive)
        .map(|psi| {
            let a = match &log {
                Some(l) => Some(solve_a_psi(&psi, l)?),
                None => None,
            };
            Ok((psi, a))
        })
        .collect()
}

/// `count` primitive even characters with distinct `a_ψ` where possible: one with
/// `a_ψ = 1` if any, one with `b_ψ ≠ a_ψ` if any, then evenly spaced classes.
pub fn select_psis(ctx: &ModulusContext, d: u64, count: usize) -> Result<Vec<DirichletCharacter>> {
    let all = primitive_even_with_a(ctx, d)?;
    // One representative per a_ψ class, in index order.
    let mut reps: Vec<usize> = Vec::new();
    for (i, (_, a)) in all.iter().enumerate() {
        if a.is_none() || !reps.iter().any(|&j| all[j].1 == *a) {
            reps.push(i);
        }
    }
    let mut picked: Vec<usize> = Vec::new();
    if let Some(&i) = reps.iter().find(|&&i| all[i].1 == Some(1)) {
        picked.push(i);
    }
    if (ctx.q() / d) % d == 0 {
        let b_differs = |a: i64| signed_residue(i128::from(a), d) != a;
        if let Some(&i) = reps.iter().find(|&&i| all[i].1.is_some_and(b_differs)) {
            picked.push(i);
        }
    }
    let n = reps.len();
    let target = count.min(all.len());
    let spaced = (0..n).map(|k| reps[k * n / target.max(1) % n.max(1)]);
    for i in spaced.chain(reps.clone()).chain(0..all.len()) {
        if picked.len() >= target {
            break;
        }
        if !picked.contains(&i) {
            picked.push(i);
        }
    }
    picked.truncate(target);
    Ok(picked.into_iter().map(|i| all[i].0.clone()).collect())
}

/// The primitive even character whose `a_ψ` is nearest `target` (exact match first,
/// ties to the lower index).
pub fn find_target_a(ctx: &ModulusContext, d: u64, target: i64) -> Result<(DirichletCharacter, i64)> {
    let all = primitive_even_with_a(ctx, d)?;
    all.into_iter()
        .filter_map(|(psi, a)| a.map(|a| (psi, a)))
        .min_by_key(|(_, a)| (a - target).unsigned_abs())
        .ok_or_else(|| Error::RegimeViolation(format!("no a_ψ is defined for d = {d}, q = {}", ctx.q())))
}

/// Scan families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Thm1,
    Thm2,
    Thm3,
}

/// `(q, d)` pairs of a family for one prime.
pub fn family_pairs(family: Family, p: u64) -> Vec<(u64, u64)> {
    match family {
        Family::Thm1 => vec![(p.pow(4), p.pow(2))],
        Family::Thm2 => vec![(p.pow(5), p.pow(2))],
        Family::Thm3 => vec![(p.pow(5), p), (p.pow(5), p.pow(2)), (p.pow(4), p)],
    }
}

/// Reports for explicit `(q, d)` pairs, `psi_count` characters each.
pub fn scan_pairs(
    family: Family,
    pairs: &[(u64, u64)],
    psi_count: usize,
    method: Method,
    record_timing: bool,
) -> Result<Vec<MomentReport>> {
    let vt = Arc::new(VTable::new()?);
    let mut out = Vec::new();
    for &(q, d) in pairs {
        let qf = FactoredModulus::new(q)?;
        let df = FactoredModulus::new(d)?;
        let ctx = ModulusContext::new(&qf, vt.clone())?;
        for psi in select_psis(&ctx, d, psi_count)? {
            let report = match family {
                Family::Thm3 => bound_report(&ctx, &psi, &df, record_timing)?,
                _ => theorem_report(&ctx, &psi, &df, method, record_timing)?,
            };
            out.push(report);
        }
    }
    Ok(out)
}

pub fn scan_family(
    family: Family,
    primes: &[u64],
    psi_count: usize,
    method: Method,
    record_timing: bool,
) -> Result<Vec<MomentReport>> {
    let pairs: Vec<(u64, u64)> = primes.iter().flat_map(|&p| family_pairs(family, p)).collect();
    scan_pairs(family, &pairs, psi_count, method, record_timing)
}
