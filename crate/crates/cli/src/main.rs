//! Command-line front end: every analysis as a subcommand with
//! machine-readable output.
//!
//! Exit codes: 0 when every mathematical check passes, 1 when a check fails
//! (the first failure goes to stderr), 2 on usage or configuration errors.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fixcount_core::conjecture::{conjecture_scan, CellStatus};
use fixcount_core::pisano::{
    pisano_general, pisano_prime, pisano_prime_power, verify_wall, PeriodCache, PisanoRecord,
};
use fixcount_core::realize::{
    dold_scan_with, golden_mean_fix_count, growth_certificate_for_spec, orbit_scan,
    sign_check_exact, witness_report, DoldOptions, GrowthOutcome, SignRow,
};
use fixcount_core::sequences::lucas_companion;
use fixcount_core::{Error, SequenceSpec};
use output::{csv_quote, csv_row, print_json, Format};

#[derive(Parser)]
#[command(
    name = "fixcount",
    version,
    about = "Realizability analysis of integer sequences as periodic-point counts"
)]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value = "human")]
    format: Format,
    /// Worker threads for parallel scans (defaults to FIXCOUNT_WORKERS, then
    /// all cores); any positive count yields byte-identical output
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Period cache file, loaded and validated at startup
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CertificateKind {
    /// Exact convolution values up to max-n
    Exact,
    /// Monotonicity plus the doubling inequality A_{2n} >= n A_n
    Growth,
}

#[derive(Subcommand)]
enum Command {
    /// Scan the Dold condition: n divides sum_{d|n} mu(n/d) U_d
    Dold {
        /// Sequence spec, e.g. `5*fib^2` or `lucasU:P=3,Q=2`
        #[arg(allow_hyphen_values = true)]
        spec: String,
        #[arg(long)]
        max_n: u64,
        /// Exact cross-check bound for small n
        #[arg(long, default_value_t = 50)]
        exact_bound: u64,
    },
    /// Check the sign condition: sum_{d|n} mu(n/d) U_d >= 0
    Sign {
        #[arg(allow_hyphen_values = true)]
        spec: String,
        #[arg(long)]
        max_n: u64,
        #[arg(long, value_enum, default_value = "exact")]
        certificate: CertificateKind,
        /// With --certificate growth, exact rows are still emitted up to
        /// min(max-n, this bound)
        #[arg(long, default_value_t = 100)]
        exact_bound: u64,
    },
    /// Exact orbit counts (1/n) sum_{d|n} mu(n/d) U_d as reduced fractions
    Orbits {
        #[arg(allow_hyphen_values = true)]
        spec: String,
        #[arg(long)]
        max_n: u64,
    },
    /// Fibonacci periods modulo m
    Pisano {
        /// Emit one record per modulus in 2..=max-m
        #[arg(long, conflicts_with_all = ["prime", "exponent"])]
        max_m: Option<u64>,
        /// Emit the prime-power record for prime^exponent
        #[arg(long)]
        prime: Option<u64>,
        #[arg(long, requires = "prime")]
        exponent: Option<u32>,
    },
    /// Verify the Wall-style divisibility facts for primes up to max-p
    WallVerify {
        #[arg(long)]
        max_p: u64,
        /// Ceiling on prime-power moduli checked along the power ladder
        #[arg(long, default_value_t = 100_000)]
        power_limit: u64,
    },
    /// Primes dividing orbit-count denominators at prime indices
    Denominators {
        #[arg(allow_hyphen_values = true)]
        spec: String,
        #[arg(long)]
        prime_bound: u64,
    },
    /// Grid scan of the Dold condition for (P^2-4Q) U_{n^2}(P,Q)
    Conjecture {
        /// Inclusive range, e.g. `-10..10`
        #[arg(long, allow_hyphen_values = true)]
        p_range: String,
        #[arg(long, allow_hyphen_values = true)]
        q_range: String,
        #[arg(long)]
        max_n: u64,
    },
    /// Golden-mean shift fixed points: enumeration vs matrix trace vs L_n
    OracleGolden {
        #[arg(long)]
        max_n: u64,
    },
    /// Compute periods for every modulus up to max-m and write a cache file
    CacheBuild {
        #[arg(long)]
        max_m: u64,
    },
}

/// A command's verdict: machine output already printed, plus whether every
/// mathematical check passed and an optional first-failure diagnostic.
struct Verdict {
    passed: bool,
    diagnostic: Option<String>,
}

impl Verdict {
    fn pass() -> Self {
        Verdict {
            passed: true,
            diagnostic: None,
        }
    }

    fn fail(diagnostic: String) -> Self {
        Verdict {
            passed: false,
            diagnostic: Some(diagnostic),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(verdict) => {
            if verdict.passed {
                ExitCode::from(0)
            } else {
                if let Some(diag) = verdict.diagnostic {
                    eprintln!("{diag}");
                }
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn parse_spec(text: &str) -> anyhow::Result<SequenceSpec> {
    SequenceSpec::parse(text).map_err(|err| match err {
        Error::SpecParse { position, message } => {
            anyhow!("invalid sequence spec `{text}` at byte {position}: {message}")
        }
        other => anyhow!("invalid sequence spec `{text}`: {other}"),
    })
}

fn parse_range(text: &str) -> anyhow::Result<(i64, i64)> {
    let (lo, hi) = text
        .split_once("..")
        .ok_or_else(|| anyhow!("range `{text}` must look like `a..b`"))?;
    let lo: i64 = lo.trim().parse().context("range start")?;
    let hi: i64 = hi.trim().parse().context("range end")?;
    Ok((lo, hi))
}

fn configure_workers(requested: Option<usize>) -> anyhow::Result<()> {
    let requested = match requested {
        Some(n) => Some(n),
        None => match std::env::var("FIXCOUNT_WORKERS") {
            Ok(value) => Some(value.parse().context("FIXCOUNT_WORKERS")?),
            Err(_) => None,
        },
    };
    if let Some(n) = requested {
        if n == 0 {
            return Err(anyhow!("--workers must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("initializing worker pool")?;
    }
    Ok(())
}

fn load_cache(path: &Option<PathBuf>) -> anyhow::Result<Option<PeriodCache>> {
    match path {
        Some(p) if p.exists() => {
            Ok(Some(PeriodCache::load(p).with_context(|| {
                format!("loading cache {}", p.display())
            })?))
        }
        _ => Ok(None),
    }
}

fn run(cli: Cli) -> anyhow::Result<Verdict> {
    configure_workers(cli.workers)?;
    match cli.command {
        Command::Dold {
            spec,
            max_n,
            exact_bound,
        } => cmd_dold(&parse_spec(&spec)?, max_n, exact_bound, cli.format),
        Command::Sign {
            spec,
            max_n,
            certificate,
            exact_bound,
        } => cmd_sign(
            &parse_spec(&spec)?,
            max_n,
            certificate,
            exact_bound,
            cli.format,
        ),
        Command::Orbits { spec, max_n } => cmd_orbits(&parse_spec(&spec)?, max_n, cli.format),
        Command::Pisano {
            max_m,
            prime,
            exponent,
        } => {
            let cache = load_cache(&cli.cache)?;
            cmd_pisano(max_m, prime, exponent, cache.as_ref(), cli.format)
        }
        Command::WallVerify { max_p, power_limit } => {
            cmd_wall_verify(max_p, power_limit, cli.format)
        }
        Command::Denominators { spec, prime_bound } => {
            cmd_denominators(&parse_spec(&spec)?, prime_bound, cli.format)
        }
        Command::Conjecture {
            p_range,
            q_range,
            max_n,
        } => cmd_conjecture(
            parse_range(&p_range)?,
            parse_range(&q_range)?,
            max_n,
            cli.format,
        ),
        Command::OracleGolden { max_n } => cmd_oracle_golden(max_n, cli.format),
        Command::CacheBuild { max_m } => {
            let path = cli
                .cache
                .ok_or_else(|| anyhow!("cache-build requires --cache PATH"))?;
            cmd_cache_build(max_m, &path)
        }
    }
}

#[derive(Serialize)]
struct DoldOutput<'a> {
    kind: &'static str,
    #[serde(flatten)]
    report: &'a fixcount_core::DoldReport,
}

fn cmd_dold(
    spec: &SequenceSpec,
    max_n: u64,
    exact_bound: u64,
    format: Format,
) -> anyhow::Result<Verdict> {
    let opts = DoldOptions {
        exact_cross_check_bound: exact_bound,
        ..DoldOptions::default()
    };
    let report = dold_scan_with(spec, max_n, &opts)?;
    match format {
        Format::Json => print_json(&DoldOutput {
            kind: "dold",
            report: &report,
        })?,
        Format::Csv => {
            println!("n,residue,denominator,pass");
            for row in &report.rows {
                println!(
                    "{}",
                    csv_row(&[
                        row.n.to_string(),
                        row.residue.to_string(),
                        row.denominator.to_string(),
                        row.pass.to_string(),
                    ])
                );
            }
        }
        Format::Human => {
            println!("dold scan: spec={} max_n={}", report.spec, report.max_n);
            for row in &report.rows {
                println!(
                    "n={} residue={} denominator={} {}",
                    row.n,
                    row.residue,
                    row.denominator,
                    if row.pass { "pass" } else { "FAIL" }
                );
            }
            println!(
                "summary: {}/{} pass, denominator primes: {}",
                report.summary.pass_count,
                report.max_n,
                format_list(&report.summary.denominator_primes)
            );
        }
    }
    match report.first_failure() {
        None => Ok(Verdict::pass()),
        Some(row) => Ok(Verdict::fail(format!(
            "first failure: n={} residue={} denominator={}",
            row.n, row.residue, row.denominator
        ))),
    }
}

#[derive(Serialize)]
struct SignOutput<'a> {
    kind: &'static str,
    spec: &'a SequenceSpec,
    max_n: u64,
    certificate: &'static str,
    all_non_negative: bool,
    certificate_passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    growth: Option<&'a GrowthOutcome>,
    rows: &'a [SignRow],
}

fn cmd_sign(
    spec: &SequenceSpec,
    max_n: u64,
    certificate: CertificateKind,
    exact_bound: u64,
    format: Format,
) -> anyhow::Result<Verdict> {
    let (exact_rows_to, growth) = match certificate {
        CertificateKind::Exact => (max_n, None),
        CertificateKind::Growth => (
            max_n.min(exact_bound),
            Some(growth_certificate_for_spec(spec, max_n)?),
        ),
    };
    let exact = sign_check_exact(spec, exact_rows_to)?;
    let all_non_negative = exact.all_non_negative();
    let certificate_passed = growth.map(|g| g.passed).unwrap_or(all_non_negative);
    let output = SignOutput {
        kind: "sign",
        spec,
        max_n,
        certificate: match certificate {
            CertificateKind::Exact => "exact",
            CertificateKind::Growth => "growth-lemma",
        },
        all_non_negative,
        certificate_passed,
        growth: growth.as_ref(),
        rows: &exact.rows,
    };
    match format {
        Format::Json => print_json(&output)?,
        Format::Csv => {
            println!("n,value,non_negative");
            for row in &exact.rows {
                println!(
                    "{}",
                    csv_row(&[
                        row.n.to_string(),
                        csv_quote(&row.value.to_string()),
                        row.non_negative.to_string(),
                    ])
                );
            }
        }
        Format::Human => {
            println!(
                "sign check: spec={spec} max_n={max_n} certificate={}",
                output.certificate
            );
            for row in &exact.rows {
                println!(
                    "n={} value={} {}",
                    row.n,
                    row.value,
                    if row.non_negative { "ok" } else { "NEGATIVE" }
                );
            }
            if let Some(g) = &growth {
                match g.first_failure {
                    None => println!("growth certificate: pass (checked to {max_n})"),
                    Some(f) => println!("growth certificate: FAIL at n={} ({:?})", f.n, f.kind),
                }
            }
        }
    }
    if !all_non_negative {
        let first = exact.rows.iter().find(|r| !r.non_negative).unwrap();
        return Ok(Verdict::fail(format!(
            "first negative convolution at n={}: {}",
            first.n, first.value
        )));
    }
    if !certificate_passed {
        let failure = growth.and_then(|g| g.first_failure).unwrap();
        return Ok(Verdict::fail(format!(
            "growth certificate failed at n={} ({:?})",
            failure.n, failure.kind
        )));
    }
    Ok(Verdict::pass())
}

#[derive(Serialize)]
struct OrbitsOutput<'a> {
    kind: &'static str,
    #[serde(flatten)]
    report: &'a fixcount_core::OrbitReport,
}

fn cmd_orbits(spec: &SequenceSpec, max_n: u64, format: Format) -> anyhow::Result<Verdict> {
    let report = orbit_scan(spec, max_n)?;
    match format {
        Format::Json => print_json(&OrbitsOutput {
            kind: "orbits",
            report: &report,
        })?,
        Format::Csv => {
            println!("n,orbit_count,integral,non_negative");
            for row in &report.rows {
                println!(
                    "{}",
                    csv_row(&[
                        row.n.to_string(),
                        csv_quote(&row.count.to_string()),
                        row.integral.to_string(),
                        row.non_negative.to_string(),
                    ])
                );
            }
        }
        Format::Human => {
            println!("orbit counts: spec={spec} max_n={max_n}");
            for row in &report.rows {
                let note = match (row.integral, row.non_negative) {
                    (true, true) => "",
                    (false, _) => " NON-INTEGRAL",
                    (true, false) => " NEGATIVE",
                };
                println!("n={} orbits={}{}", row.n, row.count, note);
            }
        }
    }
    if report.summary.realizable_prefix {
        Ok(Verdict::pass())
    } else {
        let first = report
            .rows
            .iter()
            .find(|r| !r.integral || !r.non_negative)
            .unwrap();
        Ok(Verdict::fail(format!(
            "first non-realizable orbit count at n={}: {}",
            first.n, first.count
        )))
    }
}

#[derive(Serialize)]
struct PisanoOutput {
    kind: &'static str,
    records: Vec<PisanoRecord>,
}

fn cmd_pisano(
    max_m: Option<u64>,
    prime: Option<u64>,
    exponent: Option<u32>,
    cache: Option<&PeriodCache>,
    format: Format,
) -> anyhow::Result<Verdict> {
    match (max_m, prime) {
        (Some(max_m), None) => {
            let mut records = Vec::new();
            for m in 2..=max_m {
                let record = match cache.and_then(|c| c.lookup(m)) {
                    Some(hit) => hit,
                    None => pisano_general(m)?,
                };
                records.push(record);
            }
            let output = PisanoOutput {
                kind: "pisano",
                records,
            };
            match format {
                Format::Json => print_json(&output)?,
                Format::Csv => {
                    println!("modulus,period,method");
                    for r in &output.records {
                        println!(
                            "{}",
                            csv_row(&[
                                r.modulus.to_string(),
                                r.period.to_string(),
                                r.method.to_string(),
                            ])
                        );
                    }
                }
                Format::Human => {
                    for r in &output.records {
                        println!("m={} period={} method={}", r.modulus, r.period, r.method);
                    }
                }
            }
            Ok(Verdict::pass())
        }
        (None, Some(p)) => {
            match exponent {
                Some(e) => {
                    let record = pisano_prime_power(p, e)?;
                    match format {
                        Format::Json => {
                            #[derive(Serialize)]
                            struct Out {
                                kind: &'static str,
                                #[serde(flatten)]
                                record: fixcount_core::PrimePowerPeriod,
                            }
                            print_json(&Out {
                                kind: "pisano-prime-power",
                                record,
                            })?;
                        }
                        Format::Csv => {
                            println!("prime,exponent,period,s");
                            println!(
                                "{},{},{},{}",
                                record.prime, record.exponent, record.period, record.s
                            );
                        }
                        Format::Human => println!(
                            "p={} exponent={} period={} s={}",
                            record.prime, record.exponent, record.period, record.s
                        ),
                    }
                }
                None => {
                    let record = pisano_prime(p)?;
                    match format {
                        Format::Json => print_json(&PisanoOutput {
                            kind: "pisano",
                            records: vec![record],
                        })?,
                        Format::Csv => {
                            println!("modulus,period,method");
                            println!("{},{},{}", record.modulus, record.period, record.method);
                        }
                        Format::Human => println!(
                            "m={} period={} method={}",
                            record.modulus, record.period, record.method
                        ),
                    }
                }
            }
            Ok(Verdict::pass())
        }
        _ => Err(anyhow!("pisano requires exactly one of --max-m or --prime")),
    }
}

#[derive(Serialize)]
struct WallOutput<'a> {
    kind: &'static str,
    #[serde(flatten)]
    report: &'a fixcount_core::WallReport,
}

fn cmd_wall_verify(max_p: u64, power_limit: u64, format: Format) -> anyhow::Result<Verdict> {
    let report = verify_wall(max_p, power_limit)?;
    match format {
        Format::Json => print_json(&WallOutput {
            kind: "wall-verify",
            report: &report,
        })?,
        Format::Csv => {
            println!("prime,exponent,rule,period,reference");
            for v in &report.violations {
                println!(
                    "{}",
                    csv_row(&[
                        v.prime.to_string(),
                        v.exponent.to_string(),
                        format!("{:?}", v.rule),
                        v.period.to_string(),
                        v.reference.to_string(),
                    ])
                );
            }
        }
        Format::Human => {
            println!(
                "wall verification: {} primes, {} prime powers checked (max_p={}, power_limit={})",
                report.checked_primes, report.checked_prime_powers, max_p, power_limit
            );
            for v in &report.violations {
                println!(
                    "violation: p={} exponent={} rule={:?} period={} reference={}",
                    v.prime, v.exponent, v.rule, v.period, v.reference
                );
            }
            if report.violations.is_empty() {
                println!("no violations");
            }
        }
    }
    if report.violations.is_empty() {
        Ok(Verdict::pass())
    } else {
        let v = &report.violations[0];
        Ok(Verdict::fail(format!(
            "first violation: p={} rule={:?} period={} reference={}",
            v.prime, v.rule, v.period, v.reference
        )))
    }
}

#[derive(Serialize)]
struct WitnessOutput<'a> {
    kind: &'static str,
    #[serde(flatten)]
    report: &'a fixcount_core::WitnessReport,
}

fn cmd_denominators(
    spec: &SequenceSpec,
    prime_bound: u64,
    format: Format,
) -> anyhow::Result<Verdict> {
    let report = witness_report(spec, prime_bound)?;
    match format {
        Format::Json => print_json(&WitnessOutput {
            kind: "denominators",
            report: &report,
        })?,
        Format::Csv => {
            println!("prime,n,residue");
            for w in &report.witnesses {
                println!("{},{},{}", w.prime, w.n, w.residue);
            }
        }
        Format::Human => {
            println!(
                "denominator witnesses: spec={spec} prime_bound={prime_bound} count={}",
                report.count
            );
            for w in &report.witnesses {
                println!("p={} n={} residue={}", w.prime, w.n, w.residue);
            }
        }
    }
    if report.witnesses.is_empty() {
        Ok(Verdict::pass())
    } else {
        let w = &report.witnesses[0];
        Ok(Verdict::fail(format!(
            "denominator prime found: p={} at n={} (sequence is not realizable)",
            w.prime, w.n
        )))
    }
}

#[derive(Serialize)]
struct ConjectureOutput<'a> {
    kind: &'static str,
    #[serde(flatten)]
    report: &'a fixcount_core::ConjectureReport,
}

fn cmd_conjecture(
    p_range: (i64, i64),
    q_range: (i64, i64),
    max_n: u64,
    format: Format,
) -> anyhow::Result<Verdict> {
    let report = conjecture_scan(p_range, q_range, max_n)?;
    match format {
        Format::Json => print_json(&ConjectureOutput {
            kind: "conjecture",
            report: &report,
        })?,
        Format::Csv => {
            println!("p,q,discriminant,class,status,first_n,residue");
            for cell in &report.cells {
                let (status, first_n, residue) = match cell.status {
                    CellStatus::Pass => ("pass", String::new(), String::new()),
                    CellStatus::Degenerate => ("degenerate", String::new(), String::new()),
                    CellStatus::Fail { first_n, residue } => {
                        ("fail", first_n.to_string(), residue.to_string())
                    }
                };
                println!(
                    "{}",
                    csv_row(&[
                        cell.p.to_string(),
                        cell.q.to_string(),
                        cell.discriminant.to_string(),
                        format!("{:?}", cell.class),
                        status.to_string(),
                        first_n,
                        residue,
                    ])
                );
            }
        }
        Format::Human => {
            print!("{}", report.render_matrix());
            println!(
                "{} cells: {} pass, {} degenerate, {} fail",
                report.cells.len(),
                report.summary.pass,
                report.summary.degenerate,
                report.summary.fail
            );
        }
    }
    if report.summary.fail == 0 {
        Ok(Verdict::pass())
    } else {
        let cell = report
            .cells
            .iter()
            .find(|c| matches!(c.status, CellStatus::Fail { .. }))
            .unwrap();
        let CellStatus::Fail { first_n, residue } = cell.status else {
            unreachable!()
        };
        Ok(Verdict::fail(format!(
            "first failing cell: P={} Q={} at n={first_n} residue={residue}",
            cell.p, cell.q
        )))
    }
}

#[derive(Serialize)]
struct GoldenRow {
    n: u64,
    enumeration: u64,
    trace: u64,
    lucas: u64,
    consistent: bool,
}

#[derive(Serialize)]
struct GoldenOutput {
    kind: &'static str,
    max_n: u64,
    rows: Vec<GoldenRow>,
}

fn cmd_oracle_golden(max_n: u64, format: Format) -> anyhow::Result<Verdict> {
    use num_traits::ToPrimitive;
    let mut rows = Vec::new();
    for n in 1..=max_n {
        let count = golden_mean_fix_count(n)?;
        let lucas = lucas_companion(n)
            .to_u64()
            .ok_or_else(|| anyhow!("Lucas number overflows u64 at n={n}"))?;
        rows.push(GoldenRow {
            n,
            enumeration: count.enumeration,
            trace: count.trace,
            lucas,
            consistent: count.enumeration == count.trace && count.trace == lucas,
        });
    }
    let output = GoldenOutput {
        kind: "golden-mean",
        max_n,
        rows,
    };
    match format {
        Format::Json => print_json(&output)?,
        Format::Csv => {
            println!("n,enumeration,trace,lucas,consistent");
            for r in &output.rows {
                println!(
                    "{},{},{},{},{}",
                    r.n, r.enumeration, r.trace, r.lucas, r.consistent
                );
            }
        }
        Format::Human => {
            for r in &output.rows {
                println!(
                    "n={} enumeration={} trace={} lucas={} {}",
                    r.n,
                    r.enumeration,
                    r.trace,
                    r.lucas,
                    if r.consistent { "ok" } else { "MISMATCH" }
                );
            }
        }
    }
    match output.rows.iter().find(|r| !r.consistent) {
        None => Ok(Verdict::pass()),
        Some(r) => Ok(Verdict::fail(format!(
            "count mismatch at n={}: enumeration={} trace={} lucas={}",
            r.n, r.enumeration, r.trace, r.lucas
        ))),
    }
}

fn cmd_cache_build(max_m: u64, path: &std::path::Path) -> anyhow::Result<Verdict> {
    let mut cache = PeriodCache::new();
    for m in 2..=max_m {
        cache.insert(pisano_general(m)?);
    }
    cache.save(path)?;
    println!("wrote {} periods to {}", cache.len(), path.display());
    Ok(Verdict::pass())
}

fn format_list(values: &[u64]) -> String {
    if values.is_empty() {
        "none".to_string()
    } else {
        values
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    }
}
