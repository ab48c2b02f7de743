mod cache;
mod config;
mod error;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use princheb::density::{class_group_from_densities, density_report, identity_density_table};
use princheb::numberfield::{
    bach_sorenson_bound, bounds::bach_sorenson_value_unscaled, lenstra_class_bound, minkowski_bound, principality,
    scan_primes, ClassGroupData, ClassGroupOptions, DensityEstimate, FieldDescription, ScanOptions, ScanRecord,
};
use princheb::verifier::{gold_certificate, hes_nonsplit_test, Conclusion, Verdict, VerifyOptions};
use serde::Serialize;
use serde_json::{json, Value};

use crate::cache::class_group_cached;
use crate::config::{read_json, ExtensionConfig, FieldConfig};
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "princheb", version, about = "Principal Chebotarev densities and nonsplitting tests")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Number field reports.
    #[command(subcommand)]
    Field(FieldCommand),
    /// Frobenius and principal order of every prime up to a bound.
    Scan(ScanArgs),
    /// Exact density of a class in a group extension.
    Density(DensityArgs),
    /// Recover the kernel's invariant factors from identity-class densities.
    Recover(ExtensionArgs),
    /// Nonsplitting test for the Hilbert exact sequence.
    #[command(subcommand)]
    Hes(HesCommand),
}

#[derive(Subcommand)]
enum FieldCommand {
    /// Degree, discriminant, signature and bounds.
    Info(FieldArgs),
    /// Class group with its factor base and certification.
    Classgroup(FieldArgs),
}

#[derive(Subcommand)]
enum HesCommand {
    /// Scan all primes up to the Bach-Sorenson bound for unrealized classes.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SearchArgs {
    /// Starting coefficient box for the relation search.
    #[arg(long = "box", default_value_t = 10)]
    search_box: i64,
    /// Number of times the box doubles.
    #[arg(long, default_value_t = 4)]
    doublings: u32,
}

impl SearchArgs {
    fn options(&self) -> Result<ClassGroupOptions, CliError> {
        if self.search_box < 1 {
            return Err(CliError::Config("--box must be positive".into()));
        }
        Ok(ClassGroupOptions { initial_box: self.search_box, doublings: self.doublings, ..ClassGroupOptions::default() })
    }
}

#[derive(Args)]
struct FieldArgs {
    config: PathBuf,
    /// Class number used for the prime bound instead of computing one.
    #[arg(long)]
    h: Option<u64>,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Args)]
struct ScanArgs {
    config: PathBuf,
    #[arg(long)]
    max_norm: u64,
    #[arg(long, default_value_t = 1)]
    m: u64,
    /// Write one CSV row per prime to stdout; the summary goes to stderr.
    #[arg(long, conflicts_with = "json")]
    csv: bool,
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Args)]
struct ExtensionArgs {
    config: PathBuf,
}

#[derive(Args)]
struct DensityArgs {
    config: PathBuf,
    /// Any element of the class, as an index into the quotient group.
    #[arg(long = "class")]
    class: usize,
    #[arg(long, default_value_t = 1)]
    m: u64,
}

#[derive(Args)]
struct VerifyArgs {
    config: PathBuf,
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[command(flatten)]
    search: SearchArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = io::stdout().lock();
    match run(&cli, &mut out) {
        Ok(code) => ExitCode::from(code),
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli, out: &mut dyn Write) -> Result<u8, CliError> {
    match &cli.command {
        Command::Field(FieldCommand::Info(args)) => field_info(args, cli.json, out),
        Command::Field(FieldCommand::Classgroup(args)) => field_classgroup(args, cli.json, out),
        Command::Scan(args) => scan(args, cli.json, out),
        Command::Density(args) => density(args, cli.json, out),
        Command::Recover(args) => recover(args, cli.json, out),
        Command::Hes(HesCommand::Verify(args)) => hes_verify(args, cli.json, out),
    }
}

fn load_field(path: &PathBuf) -> Result<(FieldConfig, FieldDescription), CliError> {
    let config: FieldConfig = read_json(path)?;
    let k = config.build()?;
    Ok((config, k))
}

fn print_json(out: &mut dyn Write, value: &impl Serialize) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value).expect("report serializes");
    writeln!(out)?;
    Ok(())
}

/// `num/den` together with a decimal approximation.
fn rational(num: u64, den: u64) -> Value {
    json!({ "value": format!("{num}/{den}"), "decimal": num as f64 / den as f64 })
}

fn field_summary(k: &FieldDescription) -> Value {
    let (r1, r2) = k.signature();
    json!({
        "name": k.name(),
        "degree": k.degree(),
        "discriminant": k.discriminant().to_string(),
        "signature": [r1, r2],
        "index": k.index().to_string(),
    })
}

fn field_info(args: &FieldArgs, as_json: bool, out: &mut dyn Write) -> Result<u8, CliError> {
    let (_, k) = load_field(&args.config)?;
    let (h, h_source) = match (args.h, k.known_class_number()) {
        (Some(h), _) => (h, "argument".to_string()),
        (None, Some(h)) => (h, "config".to_string()),
        (None, None) => {
            let cg = class_group_cached(&k, &args.search.options()?)?;
            (cg.class_number(), format!("computed, {}", certification_name(&cg)))
        }
    };
    if h == 0 {
        return Err(CliError::Config("h must be positive".into()));
    }
    let abs_disc: f64 = k.abs_discriminant().to_string().parse().unwrap_or(f64::INFINITY);
    let bk = bach_sorenson_bound(&k, h);
    let bk_display = bach_sorenson_value_unscaled(k.degree(), abs_disc, h);
    let report = json!({
        "field": field_summary(&k),
        "abs_discriminant": k.abs_discriminant().to_string(),
        "minkowski_bound": minkowski_bound(&k),
        "lenstra_class_bound": lenstra_class_bound(&k),
        "class_number": { "h": h, "source": h_source },
        "bach_sorenson_bound": { "value": bk, "coefficient": "2.5 n h", "grh_conditional": true },
        "bach_sorenson_bound_n_h": { "value": bk_display, "coefficient": "n h", "grh_conditional": true },
    });
    if as_json {
        print_json(out, &report)?;
    } else {
        let (r1, r2) = k.signature();
        writeln!(out, "field              {}", k.name())?;
        writeln!(out, "degree             {}", k.degree())?;
        writeln!(out, "discriminant       {}", k.discriminant())?;
        writeln!(out, "|discriminant|     {}", k.abs_discriminant())?;
        writeln!(out, "signature          ({r1}, {r2})")?;
        writeln!(out, "index              {}", k.index())?;
        writeln!(out, "Minkowski bound    {:.4}", minkowski_bound(&k))?;
        writeln!(out, "Lenstra bound      {}", lenstra_class_bound(&k))?;
        writeln!(out, "class number       {h} ({h_source})")?;
        writeln!(out, "B_K                {bk} (GRH; coefficient 2.5 n h)")?;
        writeln!(out, "B_K with n h       {bk_display} (GRH)")?;
    }
    Ok(0)
}

fn certification_name(cg: &ClassGroupData) -> String {
    serde_json::to_value(cg.certification).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

fn field_classgroup(args: &FieldArgs, as_json: bool, out: &mut dyn Write) -> Result<u8, CliError> {
    let (_, k) = load_field(&args.config)?;
    let k = match args.h {
        Some(h) => k.with_known_class_number(Some(h)),
        None => k,
    };
    let cg = class_group_cached(&k, &args.search.options()?)?;
    let mut primes = Vec::new();
    for (q, class) in cg.factor_base.iter().zip(&cg.class_map) {
        let witness = principality(&k, &cg, q)?;
        primes.push(json!({
            "p": q.p,
            "residue_degree": q.residue_degree,
            "ramification_index": q.ramification_index,
            "norm": q.norm().to_string(),
            "class": class.coords(),
            "principal": witness.certificate.is_some(),
        }));
    }
    let report = json!({
        "field": field_summary(&k),
        "invariant_factors": cg.structure.invariant_factors(),
        "class_number": cg.class_number(),
        "certification": certification_name(&cg),
        "minkowski_bound": cg.minkowski_bound,
        "lenstra_class_bound": cg.lenstra_bound,
        "relations": cg.relations.len(),
        "search_box": cg.search_box,
        "factor_base": primes,
    });
    if as_json {
        print_json(out, &report)?;
    } else {
        writeln!(out, "field              {}", k.name())?;
        writeln!(out, "class number       {}", cg.class_number())?;
        writeln!(out, "structure          {}", invariant_string(cg.structure.invariant_factors()))?;
        writeln!(out, "certification      {}", certification_name(&cg))?;
        writeln!(out, "relations          {} (box {})", cg.relations.len(), cg.search_box)?;
        writeln!(out, "factor base        {} primes of norm <= {:.4}", cg.factor_base.len(), cg.minkowski_bound)?;
        for (q, class) in cg.factor_base.iter().zip(&cg.class_map) {
            writeln!(out, "  p = {:<5} f = {} e = {}  class {:?}", q.p, q.residue_degree, q.ramification_index, class.coords())?;
        }
    }
    Ok(0)
}

fn invariant_string(factors: &[u64]) -> String {
    if factors.is_empty() {
        "1".to_string()
    } else {
        factors.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    p: u64,
    status: &'a str,
    frob_rep: String,
    f: String,
    principal_order: String,
}

fn status_name(r: &ScanRecord) -> &'static str {
    match r.status {
        princheb::numberfield::ScanStatus::Ramified => "ramified",
        princheb::numberfield::ScanStatus::Excluded => "excluded",
        princheb::numberfield::ScanStatus::Scanned => "scanned",
    }
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn scan(args: &ScanArgs, as_json: bool, out: &mut dyn Write) -> Result<u8, CliError> {
    if args.max_norm < 2 {
        return Err(CliError::Config("--max-norm must be at least 2".into()));
    }
    if args.m == 0 {
        return Err(CliError::Config("--m must be positive".into()));
    }
    let (_, k) = load_field(&args.config)?;
    let cg = class_group_cached(&k, &args.search.options()?)?;
    let records = scan_primes(&k, &cg, args.max_norm, &ScanOptions { threads: args.threads })?;
    let summary: Vec<Value> = k
        .galois()
        .group()
        .conjugacy_classes()
        .iter()
        .map(|c| {
            let est = DensityEstimate::tally(&records, c, args.m, args.max_norm);
            json!({
                "class_representative": c.representative,
                "label": k.galois().label(c.representative),
                "m": args.m,
                "numerator": est.numerator,
                "denominator": est.denominator,
                "density": rational(est.numerator, est.denominator),
                "excluded_primes": est.excluded,
            })
        })
        .collect();
    if args.csv {
        let mut w = csv::Writer::from_writer(&mut *out);
        for r in &records {
            w.serialize(CsvRow {
                p: r.p,
                status: status_name(r),
                frob_rep: opt(r.frobenius_label.clone()),
                f: opt(r.residue_degree),
                principal_order: opt(r.principal_order),
            })
            .map_err(|e| CliError::Io(io::Error::other(e)))?;
        }
        w.flush()?;
        for s in &summary {
            eprintln!("{s}");
        }
    } else if as_json {
        print_json(out, &json!({ "field": field_summary(&k), "class_number": cg.class_number(), "records": records, "summary": summary }))?;
    } else {
        writeln!(out, "field {}  h = {}  primes <= {}  m = {}", k.name(), cg.class_number(), args.max_norm, args.m)?;
        for s in &summary {
            writeln!(
                out,
                "  class {:<10} {:>8} / {:<8} = {:.6}",
                s["label"].as_str().unwrap_or(""),
                s["numerator"],
                s["denominator"],
                s["density"]["decimal"].as_f64().unwrap_or(0.0)
            )?;
        }
    }
    Ok(0)
}

fn density(args: &DensityArgs, as_json: bool, out: &mut dyn Write) -> Result<u8, CliError> {
    let config: ExtensionConfig = read_json(&args.config)?;
    let e = config.build()?;
    if args.class >= e.quotient().order() {
        return Err(CliError::Config(format!("--class {} is not an element of a group of order {}", args.class, e.quotient().order())));
    }
    if args.m == 0 {
        return Err(CliError::Config("--m must be positive".into()));
    }
    let class = e.quotient().class_of(args.class);
    let report = density_report(&e, &class, args.m)?;
    if as_json {
        let mut v = serde_json::to_value(&report).expect("report serializes");
        v["density"] = rational(report.numerator, report.denominator);
        v["class_members"] = json!(class.members);
        print_json(out, &v)?;
    } else {
        writeln!(
            out,
            "class {:?}  m = {}  mu = {}/{} ({:.6})  positive: {}",
            class.members,
            args.m,
            report.numerator,
            report.denominator,
            report.numerator as f64 / report.denominator as f64,
            report.positivity
        )?;
    }
    Ok(0)
}

fn recover(args: &ExtensionArgs, as_json: bool, out: &mut dyn Write) -> Result<u8, CliError> {
    let config: ExtensionConfig = read_json(&args.config)?;
    let e = config.build()?;
    let table = identity_density_table(&e);
    let recovered = class_group_from_densities(&table, e.quotient().order() as u64)?;
    if recovered.invariant_factors() != e.kernel().invariant_factors() {
        return Err(CliError::Inconsistent(format!(
            "recovered {} but the kernel is {}",
            invariant_string(recovered.invariant_factors()),
            invariant_string(e.kernel().invariant_factors())
        )));
    }
    if as_json {
        let table: Vec<Value> =
            table.iter().map(|(m, v)| json!({ "m": m, "mu": rational(*v.numer(), *v.denom()) })).collect();
        print_json(out, &json!({ "invariant_factors": recovered.invariant_factors(), "identity_densities": table }))?;
    } else {
        writeln!(out, "{}", invariant_string(recovered.invariant_factors()))?;
    }
    Ok(0)
}

fn hes_verify(args: &VerifyArgs, as_json: bool, out: &mut dyn Write) -> Result<u8, CliError> {
    let (config, k) = load_field(&args.config)?;
    let cg = class_group_cached(&k, &args.search.options()?)?;
    let opts = VerifyOptions { scan: ScanOptions { threads: args.threads }, excluded_overrides: config.overrides() };
    let verdict = hes_nonsplit_test(&k, &cg, &opts)?;
    if gold_certificate(&k)?.is_some() && verdict.conclusion == Conclusion::Nonsplit {
        return Err(CliError::Inconsistent("NONSPLIT despite a Gold certificate".into()));
    }
    if as_json {
        print_json(out, &json!({ "field": field_summary(&k), "verdict": verdict }))?;
    } else {
        print_verdict(out, &verdict)?;
    }
    Ok(if verdict.refused() { 2 } else { 0 })
}

fn print_verdict(out: &mut dyn Write, v: &Verdict) -> Result<(), CliError> {
    writeln!(out, "field              {}", v.field)?;
    writeln!(out, "discriminant       {}", v.discriminant)?;
    writeln!(out, "class number       {}", v.class_number)?;
    writeln!(out, "B_K                {} (conditional on GRH)", v.bound_used)?;
    writeln!(out, "{:<12} {:>5} {:>9} {:>9}", "class", "size", "witness", "count")?;
    for c in &v.per_class {
        writeln!(out, "{:<12} {:>5} {:>9} {:>9}", c.label, c.size, opt(c.witness), c.witness_count)?;
    }
    if !v.excluded_primes.is_empty() {
        writeln!(out, "excluded primes    {:?}", v.excluded_primes)?;
    }
    if let Some(gold) = &v.gold {
        let names: Vec<String> = gold
            .conditions
            .iter()
            .map(|c| match c {
                princheb::verifier::GoldCondition::CyclicOverQ => "cyclic over Q".to_string(),
                princheb::verifier::GoldCondition::TotallyRamified { p } => format!("{p} totally ramified"),
            })
            .collect();
        writeln!(out, "Gold certificate   sequence splits ({})", names.join("; "))?;
    }
    let conclusion = match v.conclusion {
        Conclusion::Nonsplit => "NONSPLIT (conditional on GRH)",
        Conclusion::Inconclusive => "INCONCLUSIVE",
    };
    writeln!(out, "conclusion         {conclusion}")?;
    if let Some(reason) = &v.reason {
        writeln!(out, "reason             {reason}")?;
    }
    Ok(())
}
