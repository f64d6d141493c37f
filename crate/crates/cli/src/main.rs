use std::fs;
use std::io::{self, BufWriter, Write};
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use splicekit::{
    ak_min_genus, classify, connected_sum_default, crosscap_alt, emit_report, gen_family,
    ingest_external, ingest_table, u_minus, u_upper, verify_observation, verify_witness, CurveMap,
    FamilySpec, SearchBudget, TableEntry, Witness,
};

/// Unknotting-type numbers of knot projections and crosscap numbers of
/// alternating knots.
///
/// Projection files hold one `name: signed Gauss code` record per line.
#[derive(Parser)]
#[command(name = "splicekit", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Canonical key of every projection
    Canon { file: PathBuf },
    /// Minimum number of S- splices down to the simple closed curve
    UMinus {
        file: PathBuf,
        /// Write the descent witness here (a directory when the file has several records)
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Bounded search for u, which also allows S+ and RI+
    UUpper {
        file: PathBuf,
        #[arg(long)]
        max_crossings: Option<usize>,
        #[arg(long)]
        max_cost: Option<usize>,
        #[arg(long)]
        max_nodes: Option<usize>,
    },
    /// Crosscap numbers of the alternating knots (CSV)
    Crosscap { file: PathBuf },
    /// Same CSV as `crosscap`
    Genus { file: PathBuf },
    /// Low-u family classification
    Classify { file: PathBuf },
    /// Emit a family member as a record
    Gen {
        #[command(subcommand)]
        family: Family,
    },
    /// Connected sum of two projections given as FILE:NAME
    Sum { a: String, b: String },
    /// Replay a witness script against FILE:NAME
    VerifyWitness { projection: String, script: PathBuf },
    /// Check every prime entry with at most eight crossings and write the report
    VerifyTable {
        #[arg(long)]
        projections: PathBuf,
        #[arg(long)]
        external: Option<PathBuf>,
        #[arg(long)]
        report: PathBuf,
    },
}

#[derive(Subcommand)]
enum Family {
    Torus { l: usize },
    Rational { m: usize, n: usize },
    Pretzel { p: usize, q: usize, r: usize },
    Sum { a: String, b: String },
}

/// A computed result contradicts a property the algorithms guarantee.
#[derive(Debug)]
struct Violation(String);

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Violation {}

fn load(path: &Path) -> Result<Vec<TableEntry>> {
    ingest_table(path).with_context(|| format!("reading {}", path.display()))
}

/// Resolves `file:name`.
fn load_ref(spec: &str) -> Result<(String, CurveMap)> {
    let (file, name) = spec
        .rsplit_once(':')
        .ok_or_else(|| anyhow!("expected FILE:NAME, got `{spec}`"))?;
    let entries = load(Path::new(file))?;
    let e = entries
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| anyhow!("no record named `{name}` in {file}"))?;
    Ok((e.name.clone(), e.map()))
}

fn record(out: &mut impl Write, name: &str, map: &CurveMap) -> Result<()> {
    writeln!(out, "{name}: {}", map.extract_code())?;
    Ok(())
}

fn sum_record(out: &mut impl Write, a: &str, b: &str) -> Result<()> {
    let (na, pa) = load_ref(a)?;
    let (nb, pb) = load_ref(b)?;
    let s = connected_sum_default(&pa, &pb)?;
    // `#` starts a comment in record files
    record(out, &format!("{na}+{nb}"), &s)
}

fn surfaces_csv(out: &mut impl Write, file: &Path) -> Result<()> {
    writeln!(out, "name,n,chi_max,nonorientable_at_max,crosscap,genus")?;
    for e in load(file)? {
        let p = e.map();
        let r = ak_min_genus(&p)?;
        let c = crosscap_alt(&p)?;
        writeln!(out, "{},{},{},{},{},{}", e.name, e.n, r.chi_max, r.nonorientable_at_max, c, r.genus)?;
    }
    Ok(())
}

fn run(cli: Cli, out: &mut impl Write) -> Result<()> {
    match cli.cmd {
        Cmd::Canon { file } => {
            writeln!(out, "name,n,key")?;
            for e in load(&file)? {
                writeln!(out, "{},{},{}", e.name, e.n, e.map().canonical_key())?;
            }
        }
        Cmd::UMinus { file, witness } => {
            let entries = load(&file)?;
            if let Some(dir) = witness.as_ref().filter(|_| entries.len() > 1) {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            writeln!(out, "name,n,u_minus,ri_count")?;
            for e in &entries {
                let p = e.map();
                let (u, w) = u_minus(&p)?;
                let check = verify_witness(&p, &w);
                if !check.valid || check.s_count != u {
                    return Err(Violation(format!("{}: descent witness does not replay", e.name)).into());
                }
                writeln!(out, "{},{},{},{}", e.name, e.n, u, w.ri_count)?;
                if let Some(path) = &witness {
                    let target = if entries.len() > 1 { path.join(format!("{}.witness", e.name)) } else { path.clone() };
                    fs::write(&target, w.to_string()).with_context(|| format!("writing {}", target.display()))?;
                }
            }
        }
        Cmd::UUpper { file, max_crossings, max_cost, max_nodes } => {
            writeln!(out, "name,n,u_minus,u_upper_value,u_upper_status,nodes")?;
            for e in load(&file)? {
                let p = e.map();
                let (um, _) = u_minus(&p)?;
                let d = SearchBudget::default_for(e.n, um);
                let budget = SearchBudget {
                    max_crossings: max_crossings.unwrap_or(d.max_crossings),
                    max_cost: max_cost.unwrap_or(d.max_cost),
                    max_nodes: max_nodes.unwrap_or(d.max_nodes),
                };
                let r = u_upper(&p, budget)?;
                let v = r.value.map(|v| v.to_string()).unwrap_or_default();
                if r.value.is_some_and(|v| v > um) {
                    return Err(Violation(format!("{}: u bound {v} above u-minus {um}", e.name)).into());
                }
                writeln!(out, "{},{},{},{},{},{}", e.name, e.n, um, v, r.status, r.nodes)?;
            }
        }
        Cmd::Crosscap { file } | Cmd::Genus { file } => surfaces_csv(out, &file)?,
        Cmd::Classify { file } => {
            writeln!(out, "name,n,class_label")?;
            for e in load(&file)? {
                writeln!(out, "{},{},{}", e.name, e.n, classify(&e.map())?)?;
            }
        }
        Cmd::Gen { family } => {
            let spec = match family {
                Family::Torus { l } => FamilySpec::Torus(l),
                Family::Rational { m, n } => FamilySpec::Rational(m, n),
                Family::Pretzel { p, q, r } => FamilySpec::Pretzel(p, q, r),
                Family::Sum { a, b } => return sum_record(out, &a, &b),
            };
            record(out, &spec.to_string(), &gen_family(&spec)?)?;
        }
        Cmd::Sum { a, b } => sum_record(out, &a, &b)?,
        Cmd::VerifyWitness { projection, script } => {
            let (name, p) = load_ref(&projection)?;
            let text = fs::read_to_string(&script).with_context(|| format!("reading {}", script.display()))?;
            let w = Witness::parse(&text)?;
            let c = verify_witness(&p, &w);
            writeln!(out, "projection: {name}")?;
            writeln!(out, "valid: {}", c.valid)?;
            writeln!(out, "s_count: {}", c.s_count)?;
            writeln!(out, "ri_count: {}", c.ri_count)?;
            if let Some(i) = c.failed_step {
                writeln!(out, "failed_step: {}", i + 1)?;
            }
            if let Some(reason) = &c.reason {
                writeln!(out, "reason: {reason}")?;
            }
            if !c.valid {
                return Err(anyhow!("witness rejected"));
            }
        }
        Cmd::VerifyTable { projections, external, report } => {
            let entries = load(&projections)?;
            let ext = match &external {
                Some(path) => ingest_external(path).with_context(|| format!("reading {}", path.display()))?,
                None => Vec::new(),
            };
            let (rows, s) = verify_observation(&entries, &ext)?;
            emit_report(&rows, &report).with_context(|| format!("writing {}", report.display()))?;
            writeln!(out, "rows: {}", s.rows)?;
            writeln!(out, "mismatches: {}", s.mismatches)?;
            writeln!(out, "external_matched: {}", s.external_matched)?;
            writeln!(out, "external_mismatches: {}", s.external_mismatches)?;
            writeln!(out, "class_mismatches: {}", s.class_mismatches)?;
            writeln!(out, "bound_violations: {}", s.bound_violations)?;
            if !s.is_clean() {
                return Err(Violation("report has mismatches".into()).into());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = panic::catch_unwind(AssertUnwindSafe(|| run(cli, &mut out)));
    let _ = out.flush();
    match result {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Violation>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
        Err(_) => ExitCode::from(2),
    }
}
