//! Command-line front end.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::lvalue::VTable;
use crate::modarith::{parse_int_expr, FactoredModulus};
use crate::moments::{aprime_phase, classify, AprimePhase, Method, ModulusContext, Regime, MAX_LVALUE_MODULUS};
use crate::report::{
    bound_report, find_target_a, primitive_even_with_a, scan_family, scan_pairs, theorem_report, to_csv,
    to_json, Family, MomentReport,
};
use crate::verify::{run_suite, Suite, VerifyConfig};

/// Largest `|residual| / scale` accepted for Thm1 and Thm2 rows.
pub const RESIDUAL_RATIO_LIMIT: f64 = 5.0;
/// Largest `M / envelope` accepted for Thm3 rows.
pub const ENVELOPE_RATIO_LIMIT: f64 = 20.0;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "coset-moments", version, about = "Coset second moments of Dirichlet L-functions")]
pub struct Cli {
    /// Worker threads for the numerical kernels.
    #[arg(long, global = true, env = "COSET_MOMENT_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an invariant suite and print per-case results.
    Verify(VerifyArgs),
    /// Coset moment reports for one (q, d).
    Moment(MomentArgs),
    /// Reports over a family of prime-power moduli.
    Scan(ScanArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Postnikov,
    Gauss,
    Sqd,
    AfeOracle,
    Gambit,
    Diag,
    Mellin,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Postnikov => Suite::Postnikov,
            SuiteArg::Gauss => Suite::Gauss,
            SuiteArg::Sqd => Suite::Sqd,
            SuiteArg::AfeOracle => Suite::AfeOracle,
            SuiteArg::Gambit => Suite::Gambit,
            SuiteArg::Diag => Suite::Diag,
            SuiteArg::Mellin => Suite::Mellin,
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub suite: SuiteArg,
    /// Single modulus instead of the default grid, e.g. `729` or `3^6`.
    #[arg(long)]
    pub q: Option<String>,
    #[arg(long)]
    pub d: Option<String>,
    /// Largest modulus in the default grid.
    #[arg(long, default_value_t = 20_000)]
    pub q_max: u64,
    /// Largest odd r for the Gauss suite.
    #[arg(long, default_value_t = 999)]
    pub r_max: u64,
    /// Random (A, B) pairs per r for the Gauss suite.
    #[arg(long, default_value_t = 100)]
    pub pairs: usize,
    /// Sampled characters above the exhaustive range for the AFE oracle.
    #[arg(long, default_value_t = 200)]
    pub sample: usize,
    /// Override the suite's tolerance.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Print failures and the summary only.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Hurwitz,
    Afe,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct ModulusArgs {
    /// Modulus, e.g. `625`, `5^4` or `7^239`.
    #[arg(long, conflicts_with_all = ["prime", "q_exp"])]
    pub q: Option<String>,
    #[arg(long, conflicts_with_all = ["prime", "d_exp"])]
    pub d: Option<String>,
    /// Prime p for q = p^q_exp, d = p^d_exp.
    #[arg(long, requires_all = ["q_exp", "d_exp"])]
    pub prime: Option<u64>,
    #[arg(long)]
    pub q_exp: Option<u32>,
    #[arg(long)]
    pub d_exp: Option<u32>,
}

impl ModulusArgs {
    fn resolve(&self) -> Result<(FactoredModulus, FactoredModulus)> {
        match (&self.q, &self.d, self.prime) {
            (Some(q), Some(d), None) => Ok((FactoredModulus::parse(q)?, FactoredModulus::parse(d)?)),
            (None, None, Some(p)) => {
                let (kq, kd) = (self.q_exp.unwrap_or(0), self.d_exp.unwrap_or(0));
                Ok((FactoredModulus::from_factors(vec![(p, kq)])?, FactoredModulus::from_factors(vec![(p, kd)])?))
            }
            _ => Err(Error::Parse("give --q and --d, or --prime with --q-exp and --d-exp".into())),
        }
    }
}

#[derive(Debug, Args)]
pub struct MomentArgs {
    #[command(flatten)]
    pub modulus: ModulusArgs,
    /// `all-primitive-even`, `target-a N` or `index e1,e2,...`.
    #[arg(long, num_args = 1..=2, value_names = ["KIND", "VALUE"], default_values = ["all-primitive-even"])]
    pub psi: Vec<String>,
    #[arg(long, value_enum, default_value = "hurwitz")]
    pub method: MethodArg,
    #[arg(long, value_enum)]
    pub out: Option<OutFormat>,
    /// Write to a file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Exact A′ phase data only; no L-values, so q may be huge.
    #[arg(long)]
    pub phase_only: bool,
    /// a_ψ for `--phase-only`; defaults to `1+2d`.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Fill the `seconds` column.
    #[arg(long)]
    pub record_timing: bool,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Comma-separated primes, e.g. `5,7,11`.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["q", "d"])]
    pub primes: Vec<u64>,
    /// Explicit modulus instead of `--primes`.
    #[arg(long, requires = "d")]
    pub q: Option<String>,
    #[arg(long, requires = "q")]
    pub d: Option<String>,
    /// Characters per modulus.
    #[arg(long, default_value_t = 6)]
    pub psi_count: usize,
    #[arg(long, value_enum, default_value = "hurwitz")]
    pub method: MethodArg,
    #[arg(long, value_enum, default_value = "csv")]
    pub out: OutFormat,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub record_timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Thm1,
    Thm2,
    Thm3,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Thm1 => Family::Thm1,
            FamilyArg::Thm2 => Family::Thm2,
            FamilyArg::Thm3 => Family::Thm3,
        }
    }
}

/// How `moment` picks characters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PsiSelector {
    AllPrimitiveEven,
    TargetA(i64),
    Index(Vec<u64>),
}

impl PsiSelector {
    pub fn parse(parts: &[String]) -> Result<Self> {
        let bad = || Error::Parse(format!("bad --psi {:?}", parts.join(" ")));
        match parts {
            [k] if k == "all-primitive-even" => Ok(PsiSelector::AllPrimitiveEven),
            [k, v] if k == "target-a" => Ok(PsiSelector::TargetA(v.trim().parse().map_err(|_| bad())?)),
            [k, v] if k == "index" => v
                .split(',')
                .map(|x| x.trim().parse::<u64>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()
                .map(PsiSelector::Index),
            _ => Err(bad()),
        }
    }
}

/// Status for a failed run: configuration problems are usage errors.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::VerificationFailed { .. } | Error::QuadratureNotConverged(_) => EXIT_CHECK_FAILED,
        _ => EXIT_USAGE,
    }
}

fn methods(m: MethodArg) -> Vec<Method> {
    match m {
        MethodArg::Hurwitz => vec![Method::Hurwitz],
        MethodArg::Afe => vec![Method::Afe],
        MethodArg::Both => vec![Method::Hurwitz, Method::Afe],
    }
}

fn within_limits(r: &MomentReport) -> bool {
    let limit = match r.regime {
        Regime::Thm3 => ENVELOPE_RATIO_LIMIT,
        _ => RESIDUAL_RATIO_LIMIT,
    };
    r.ratio.is_finite() && r.ratio <= limit
}

fn emit(text: &str, output: &Option<PathBuf>) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn render(reports: &[MomentReport], format: OutFormat) -> Result<String> {
    match format {
        OutFormat::Csv => Ok(to_csv(reports)),
        OutFormat::Json => to_json(reports),
    }
}

/// Exit status from the ratio checks, with a note on stderr for each offender.
fn ratio_status(reports: &[MomentReport]) -> i32 {
    let bad: Vec<&MomentReport> = reports.iter().filter(|r| !within_limits(r)).collect();
    for r in &bad {
        eprintln!(
            "ratio {} above limit for q = {}, d = {}, psi = {:?} ({})",
            r.ratio,
            r.q,
            r.d,
            r.psi_index,
            r.regime.as_str()
        );
    }
    if bad.is_empty() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<i32> {
    let parse = |s: &Option<String>| -> Result<Option<u64>> {
        s.as_deref().map(|v| FactoredModulus::parse(v)?.value_u64()).transpose()
    };
    let cfg = VerifyConfig {
        q: parse(&args.q)?,
        d: parse(&args.d)?,
        q_max: args.q_max,
        r_max: args.r_max,
        gauss_pairs: args.pairs,
        sample: args.sample,
        tolerance: args.tolerance,
    };
    let report = run_suite(args.suite.into(), &cfg)?;
    let mut out = io::stdout().lock();
    for case in report.cases.iter().filter(|c| !args.quiet || !c.passed) {
        writeln!(out, "{case}")?;
    }
    writeln!(out, "{}", report.summary())?;
    Ok(if report.all_passed() { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn phase_csv(p: &AprimePhase) -> String {
    let opt = |v: Option<String>| v.unwrap_or_default();
    format!(
        "{}\nq,d,a_psi,b_psi,residue,fraction,trig_kind,trig,jacobi_q,jacobi_reduced,phi_d,sigma0_b,aprime\n\
         {},{},{},{},{},{},{},{},{},{},{},{},{}\n",
        crate::report::CSV_VERSION_LINE,
        p.q,
        p.d,
        p.a_psi,
        p.b_psi,
        p.residue,
        p.fraction,
        p.trig_kind,
        p.trig,
        p.jacobi_q,
        p.jacobi_reduced,
        p.phi_d,
        opt(p.sigma0_b.map(|v| v.to_string())),
        opt(p.aprime.map(|v| v.to_string())),
    )
}

fn cmd_phase(args: &MomentArgs, q: &FactoredModulus, d: &FactoredModulus) -> Result<i32> {
    let a = match &args.a {
        Some(expr) => parse_int_expr(expr)?,
        None => BigInt::from(1) + BigInt::from(2) * BigInt::from(d.value().clone()),
    };
    let phase = aprime_phase(q, d, &a)?;
    let text = match args.out.unwrap_or(OutFormat::Json) {
        OutFormat::Json => serde_json::to_string_pretty(&phase)? + "\n",
        OutFormat::Csv => phase_csv(&phase),
    };
    emit(&text, &args.output)?;
    Ok(EXIT_OK)
}

fn resolve_psis(ctx: &ModulusContext, d: u64, selector: &PsiSelector) -> Result<Vec<DirichletCharacter>> {
    match selector {
        PsiSelector::AllPrimitiveEven => Ok(primitive_even_with_a(ctx, d)?.into_iter().map(|(c, _)| c).collect()),
        PsiSelector::TargetA(target) => {
            let (psi, a) = find_target_a(ctx, d, *target)?;
            if a != *target {
                eprintln!("no ψ has a_psi = {target}; using nearest a_psi = {a}");
            }
            Ok(vec![psi])
        }
        PsiSelector::Index(exps) => {
            let psi = DirichletCharacter::new(ctx.group().clone(), exps)?;
            if !psi.is_primitive() {
                return Err(Error::NotPrimitive(ctx.q()));
            }
            Ok(vec![psi])
        }
    }
}

fn cmd_moment(args: &MomentArgs) -> Result<i32> {
    let (q, d) = args.modulus.resolve()?;
    if args.phase_only {
        return cmd_phase(args, &q, &d);
    }
    let selector = PsiSelector::parse(&args.psi)?;
    if q.to_u64().map_or(true, |v| v > MAX_LVALUE_MODULUS) {
        return Err(Error::ModulusTooLarge { q: q.to_string(), limit: MAX_LVALUE_MODULUS });
    }
    let regime = classify(&d, &q)?;
    let dv = d.value_u64()?;
    let ctx = ModulusContext::new(&q, Arc::new(VTable::new()?))?;
    let psis = resolve_psis(&ctx, dv, &selector)?;
    let mut reports = Vec::new();
    for psi in &psis {
        if regime == Regime::Thm3 {
            reports.push(bound_report(&ctx, psi, &d, args.record_timing)?);
            continue;
        }
        for method in methods(args.method) {
            reports.push(theorem_report(&ctx, psi, &d, method, args.record_timing)?);
        }
    }
    let mut status = ratio_status(&reports);
    if args.method == MethodArg::Both {
        for pair in reports.chunks(2).filter(|p| p.len() == 2 && p[0].regime != Regime::Thm3) {
            let gap = (pair[0].m - pair[1].m).abs();
            if gap > 1e-6 * pair[0].m.abs().max(1.0) {
                eprintln!("hurwitz and afe disagree by {gap:e} for psi = {:?}", pair[0].psi_index);
                status = EXIT_CHECK_FAILED;
            }
        }
    }
    emit(&render(&reports, args.out.unwrap_or(OutFormat::Csv))?, &args.output)?;
    Ok(status)
}

fn cmd_scan(args: &ScanArgs) -> Result<i32> {
    let family: Family = args.family.into();
    let method = match args.method {
        MethodArg::Afe => Method::Afe,
        _ => Method::Hurwitz,
    };
    let reports = match (&args.q, &args.d) {
        (Some(q), Some(d)) => {
            let pair = (FactoredModulus::parse(q)?.value_u64()?, FactoredModulus::parse(d)?.value_u64()?);
            scan_pairs(family, &[pair], args.psi_count, method, args.record_timing)?
        }
        _ if args.primes.is_empty() => return Err(Error::Parse("give --primes or --q with --d".into())),
        _ => scan_family(family, &args.primes, args.psi_count, method, args.record_timing)?,
    };
    let status = ratio_status(&reports);
    emit(&render(&reports, args.out)?, &args.output)?;
    Ok(status)
}

/// Parses `args` and runs the command; returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return EXIT_USAGE;
        }
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let result = match &cli.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Moment(a) => cmd_moment(a),
        Command::Scan(a) => cmd_scan(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
