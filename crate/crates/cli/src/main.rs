use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use quadvar::classify::{classify_with, code_params, Strategy};
use quadvar::constructions::{
    elliptic_forms, elliptic_points, gen_glynn, glynn_certificates, glynn_forms, glynn_solve, nrc_forms, nrc_points,
    EllipticParams, GenGlynnParams, NrcParams,
};
use quadvar::error::Error;
use quadvar::fitting::{castelnuovo_check, conjecture_check, FitOptions, DEFAULT_SEED};
use quadvar::gf::{prime_power, Elem, Field, FieldInfo};
use quadvar::projgeom::{PointSet, BUDGET_ENV};
use quadvar::quadforms::{conditions, covered_by_two_hyperplanes, FormSubspace};
use quadvar::search::{compare_with_table, csv_header, csv_record, search_grid, SearchOptions};
use quadvar::symmetry::{fixes_no_line, invariant_lines_exhaustive, PermGroup};
use quadvar::variety::{solve_naive, solve_pruned};

/// Point sets in PG(k-1, q) cut out by subspaces of quadratic forms.
#[derive(Parser, Debug)]
#[command(name = "quadvar", version, about)]
struct Cli {
    /// Seed for sampled subset checks.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Include wall-clock timings in the report (breaks byte-identical output).
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build one of the named constructions.
    #[command(subcommand)]
    Construct(Construct),
    /// Arc / track / contains-line verdict and code parameters of a point set.
    Classify {
        #[arg(long)]
        points: PathBuf,
        #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
        strategy: StrategyArg,
    },
    /// Common zeros of a subspace of quadratic forms.
    Variety {
        #[arg(long)]
        forms: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Pruned)]
        method: Method,
        /// Also classify the variety.
        #[arg(long)]
        classify: bool,
        #[arg(long)]
        points_out: Option<PathBuf>,
    },
    /// Circulant seed search.
    Search {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        q: u64,
        /// Minimum |V(U)| for a row (default q + 1).
        #[arg(long)]
        threshold: Option<usize>,
        /// Skip the projection tests on each row.
        #[arg(long)]
        no_conjecture: bool,
        /// CSV output path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Projection tests on a point set.
    ProjectCheck {
        #[arg(long)]
        points: PathBuf,
        /// Source subspace, used to report the dimension hypothesis.
        #[arg(long)]
        forms: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Enumerate every centre subset up to the cap instead of sampling.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Does a coordinate permutation group fix a line of PG(k-1, q)?
    FixesNoLine {
        /// `cyclic:k`, `dihedral:k` or `k:(1,2,3);(1,2)`.
        #[arg(long)]
        group: String,
        #[arg(long)]
        q: u64,
        #[command(flatten)]
        field: FieldArgs,
        /// Cross-check with a scan of all point orbits.
        #[arg(long)]
        brute_force: bool,
    },
    /// Rerun the search and diff against the embedded tables.
    VerifyTables {
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        q: Option<u64>,
        /// Include the larger tabled q.
        #[arg(long)]
        extended: bool,
    },
}

#[derive(Subcommand, Debug)]
enum Construct {
    /// Normal rational curve and its forms.
    Nrc {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        k: usize,
        /// Comma-separated distinct elements (default: codes 0..k-1).
        #[arg(long)]
        alphas: Option<String>,
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        out: OutFiles,
    },
    /// Elliptic curve y^2 = x^3 + ax + b embedded in PG(k-1, q).
    Elliptic {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        k: usize,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        out: OutFiles,
    },
    /// The five-form family in PG(4, q), for every admissible parameter.
    Glynn {
        #[arg(long)]
        q: u64,
        /// Restrict to this d.
        #[arg(long, allow_hyphen_values = true)]
        d: Option<String>,
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        out: OutFiles,
    },
    /// Generalised construction from the subfield F_q of F_{q^t}.
    Genglynn {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        q: u32,
        /// Skip the hyperplane-bound check.
        #[arg(long)]
        no_bound: bool,
        #[command(flatten)]
        out: OutFiles,
    },
}

#[derive(Args, Debug)]
struct FieldArgs {
    /// Modulus coefficients, constant term first (default: Conway polynomial).
    #[arg(long)]
    modulus: Option<String>,
}

#[derive(Args, Debug)]
struct OutFiles {
    #[arg(long)]
    points_out: Option<PathBuf>,
    #[arg(long)]
    forms_out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StrategyArg {
    Auto,
    Scan,
    Pencils,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Naive,
    Pruned,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Castelnuovo,
    Conjecture,
}

enum Failure {
    Usage(String),
    Budget(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } => Failure::Budget(format!("{e} (override with {BUDGET_ENV})")),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type CmdResult = Result<Outcome, Failure>;

struct Outcome {
    field: Option<Field>,
    result: Value,
    /// `false` for a verification mismatch.
    ok: bool,
}

#[derive(Serialize)]
struct RunReport<'a> {
    command: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    field: Option<FieldInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon_convention: Option<&'static str>,
    status: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<u128>,
    result: Value,
}

fn epsilon_convention(f: &Field) -> &'static str {
    if f.is_prime_field() {
        "eps = least primitive root mod p; elements are integers 0..p-1"
    } else {
        "eps = class of X modulo the modulus; elements are 0, 1 or z^i = eps^i, codes are base-p digit vectors"
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let start = Instant::now();
    let outcome = run(&cli);
    let elapsed = start.elapsed().as_millis();
    let out = match outcome {
        Ok(o) => o,
        Err(Failure::Usage(m)) | Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(2);
        }
        Err(Failure::Budget(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(3);
        }
    };
    let report = RunReport {
        command: std::env::args().skip(1).collect(),
        field: out.field.as_ref().map(Field::info),
        epsilon_convention: out.field.as_ref().map(epsilon_convention),
        status: if out.ok { "ok" } else { "mismatch" },
        elapsed_ms: cli.timings.then_some(elapsed),
        result: out.result,
    };
    let text = serde_json::to_string_pretty(&report).expect("report serialises") + "\n";
    let written = match &cli.json {
        Some(p) => std::fs::write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(if out.ok { 0 } else { 1 })
}

fn run(cli: &Cli) -> CmdResult {
    let fit = FitOptions { exhaustive: true, seed: cli.seed };
    match &cli.command {
        Command::Construct(c) => construct(c),
        Command::Classify { points, strategy } => cmd_classify(points, *strategy),
        Command::Variety { forms, method, classify, points_out } => {
            cmd_variety(forms, *method, *classify, points_out.as_deref())
        }
        Command::Search { k, q, threshold, no_conjecture, out } => {
            let f = Field::of_order(*q)?;
            let opts = SearchOptions { threshold: *threshold, conjecture: !no_conjecture, fit };
            let r = search_grid(*k, &f, &opts)?;
            if let Some(path) = out {
                write_csv(path, *k, &r.rows)?;
            }
            Ok(Outcome { result: serde_json::to_value(&r).unwrap(), field: Some(f), ok: true })
        }
        Command::ProjectCheck { points, forms, mode, exhaustive } => {
            let s = read_points(points)?;
            let u = forms.as_deref().map(|p| read_forms(p, Some(s.field()))).transpose()?;
            let opts = FitOptions { exhaustive: *exhaustive, seed: cli.seed };
            let r = match mode {
                Mode::Castelnuovo => castelnuovo_check(&s, u.as_ref(), &opts)?,
                Mode::Conjecture => conjecture_check(&s, u.as_ref(), &opts)?,
            };
            Ok(Outcome { result: serde_json::to_value(&r).unwrap(), field: Some(s.field().clone()), ok: true })
        }
        Command::FixesNoLine { group, q, field, brute_force } => {
            let f = field_from(*q, field)?;
            let g = PermGroup::parse(group)?;
            let r = fixes_no_line(&g, &f)?;
            let mut result = serde_json::to_value(&r).unwrap();
            let mut ok = true;
            if *brute_force {
                let lines = invariant_lines_exhaustive(&g, &f)?;
                ok = lines.is_empty() == r.fixes_no_line;
                result["brute_force_invariant_lines"] = json!(lines.len());
                result["agree"] = json!(ok);
            }
            Ok(Outcome { result, field: Some(f), ok })
        }
        Command::VerifyTables { k, q, extended } => verify_tables(*k, *q, *extended, fit),
    }
}

fn field_from(q: u64, args: &FieldArgs) -> Result<Field, Failure> {
    match &args.modulus {
        None => Ok(Field::of_order(q)?),
        Some(m) => {
            let coeffs: Vec<u32> = m
                .split(',')
                .map(|c| c.trim().parse().map_err(|_| Failure::Usage(format!("bad modulus coefficient `{c}`"))))
                .collect::<Result<_, _>>()?;
            let (p, _) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
            let f = Field::with_modulus(p, &coeffs)?;
            if f.q() as u64 != q {
                return Err(Failure::Usage(format!("modulus defines a field of order {}, not {q}", f.q())));
            }
            Ok(f)
        }
    }
}

fn read_points(path: &Path) -> Result<PointSet, Failure> {
    Ok(PointSet::from_text(&std::fs::read_to_string(path)?, None)?)
}

fn read_forms(path: &Path, field: Option<&Field>) -> Result<FormSubspace, Failure> {
    Ok(FormSubspace::from_text(&std::fs::read_to_string(path)?, field)?)
}

fn write_outputs(out: &OutFiles, points: Option<&PointSet>, forms: Option<&FormSubspace>) -> Result<(), Failure> {
    if let (Some(p), Some(s)) = (&out.points_out, points) {
        std::fs::write(p, s.to_text())?;
    }
    if let (Some(p), Some(u)) = (&out.forms_out, forms) {
        std::fs::write(p, u.to_text())?;
    }
    Ok(())
}

fn parse_elems(f: &Field, list: &str) -> Result<Vec<Elem>, Failure> {
    Ok(list.split(',').map(|s| f.parse(s)).collect::<Result<Vec<_>, _>>()?)
}

fn summary(s: &PointSet) -> Result<Value, Failure> {
    let cl = classify_with(s, Strategy::Auto)?;
    let code = code_params(s)?;
    Ok(json!({
        "n": s.len(),
        "classification": cl,
        "code": code,
        "conditions": conditions(s),
        "covered_by_two_hyperplanes": covered_by_two_hyperplanes(s),
    }))
}

fn construct(c: &Construct) -> CmdResult {
    match c {
        Construct::Nrc { q, k, alphas, field, out } => {
            let f = field_from(*q, field)?;
            let p = match alphas {
                Some(a) => NrcParams { k: *k, alphas: parse_elems(&f, a)? },
                None => NrcParams::standard(&f, *k)?,
            };
            let u = nrc_forms(&p, &f)?;
            let v = solve_pruned(&u);
            let pts = nrc_points(&p, &f)?;
            write_outputs(out, Some(&pts), Some(&u))?;
            let result = json!({
                "params": p,
                "dim_u": u.dim(),
                "forms": u,
                "points": pts,
                "variety_matches_points": v.points.same_points(&pts),
                "variety": summary(&v.points)?,
            });
            Ok(Outcome { result, field: Some(f), ok: true })
        }
        Construct::Elliptic { q, k, a, b, field, out } => {
            let f = field_from(*q, field)?;
            let p = EllipticParams { a: f.parse(a)?, b: f.parse(b)?, k: *k };
            let r = elliptic_forms(&p, &f)?;
            let pts = elliptic_points(&p, &f)?;
            let v = solve_pruned(&r.oracle);
            write_outputs(out, Some(&pts), Some(&r.oracle))?;
            let result = json!({
                "params": p,
                "j_invariant": f.format(quadvar::constructions::elliptic::j_invariant(&p, &f)?),
                "curve_points": pts.len(),
                "forms": r,
                "curve_in_variety": pts.iter().all(|x| v.points.contains(x)),
                "variety": summary(&v.points)?,
            });
            Ok(Outcome { result, field: Some(f), ok: true })
        }
        Construct::Glynn { q, d, field, out } => {
            let f = field_from(*q, field)?;
            let wanted = d.as_deref().map(|d| f.parse(d)).transpose()?;
            let mut sols = glynn_solve(&f)?;
            if let Some(d) = wanted {
                sols.retain(|g| g.d == Some(d));
                if sols.is_empty() {
                    return Err(Failure::Usage(format!("d = {} is not an admissible parameter", f.format(d))));
                }
            }
            let mut items = Vec::new();
            for g in &sols {
                let u = glynn_forms(g, &f)?;
                let v = solve_pruned(&u);
                let listed = quadvar::constructions::glynn::listed_points(g, &f)?;
                let certificates = if f.characteristic() == 3 { None } else { Some(glynn_certificates(g, &f)?) };
                if items.is_empty() {
                    write_outputs(out, Some(&v.points), Some(&u))?;
                }
                items.push(json!({
                    "params": g,
                    "generic": g.generic(&f),
                    "dim_u": u.dim(),
                    "forms": u,
                    "points": v.points,
                    "contains_listed_points": listed.iter().all(|x| v.points.contains(x)),
                    "variety": summary(&v.points)?,
                    "certificates": certificates,
                }));
            }
            Ok(Outcome { result: Value::Array(items), field: Some(f), ok: true })
        }
        Construct::Genglynn { t, q, no_bound, out } => {
            let (f, p) = GenGlynnParams::standard(*t, *q)?;
            let r = gen_glynn(&p, &f, !no_bound)?;
            write_outputs(out, Some(&r.points), Some(&r.forms))?;
            Ok(Outcome { result: serde_json::to_value(&r).unwrap(), field: Some(f), ok: true })
        }
    }
}

fn cmd_classify(points: &Path, strategy: StrategyArg) -> CmdResult {
    let s = read_points(points)?;
    let strategy = match strategy {
        StrategyArg::Auto => Strategy::Auto,
        StrategyArg::Scan => Strategy::HyperplaneScan,
        StrategyArg::Pencils => Strategy::Pencils,
    };
    let cl = classify_with(&s, strategy)?;
    let result = json!({
        "n": s.len(),
        "classification": cl,
        "code": code_params(&s)?,
        "conditions": conditions(&s),
        "covered_by_two_hyperplanes": covered_by_two_hyperplanes(&s),
    });
    Ok(Outcome { result, field: Some(s.field().clone()), ok: true })
}

fn cmd_variety(forms: &Path, method: Method, classify: bool, points_out: Option<&Path>) -> CmdResult {
    let u = read_forms(forms, None)?;
    let v = match method {
        Method::Naive => solve_naive(&u)?,
        Method::Pruned => solve_pruned(&u),
    };
    if let Some(p) = points_out {
        std::fs::write(p, v.points.to_text())?;
    }
    let mut result = json!({ "dim_u": u.dim(), "method": v.method, "size": v.len(), "points": v.points });
    if classify {
        result["summary"] = summary(&v.points)?;
    }
    Ok(Outcome { result, field: Some(u.field().clone()), ok: true })
}

fn write_csv(path: &Path, k: usize, rows: &[quadvar::search::SearchRow]) -> Result<(), Failure> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Failure::Io(e.to_string()))?;
    w.write_record(csv_header(k)).map_err(|e| Failure::Io(e.to_string()))?;
    for r in rows {
        w.write_record(csv_record(r)).map_err(|e| Failure::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Tabled `q` per `k`: the required ones, then the extended ones.
fn table_qs(k: usize, extended: bool) -> Vec<u64> {
    match (k, extended) {
        (5, false) => vec![9, 11, 13],
        (5, true) => vec![9, 11, 13, 19, 29, 31, 41, 47, 49],
        (_, false) => vec![13],
        (_, true) => vec![13, 23, 25, 27, 29, 41, 43, 47, 49],
    }
}

fn verify_tables(k: Option<usize>, q: Option<u64>, extended: bool, fit: FitOptions) -> CmdResult {
    let ks = match k {
        Some(k) if k == 5 || k == 7 => vec![k],
        Some(k) => return Err(Failure::Usage(format!("tables exist for k = 5 and 7, not {k}"))),
        None => vec![5, 7],
    };
    let opts = SearchOptions { threshold: None, conjecture: false, fit };
    let mut diffs = Vec::new();
    let mut ok = true;
    let mut field = None;
    for k in ks {
        let qs = match q {
            Some(q) => vec![q],
            None => table_qs(k, extended),
        };
        for q in qs {
            let f = Field::of_order(q)?;
            let r = search_grid(k, &f, &opts)?;
            let d = compare_with_table(k, q as u32, &r.rows);
            ok &= d.ok();
            diffs.push(d);
            field = Some(f);
        }
    }
    if diffs.len() > 1 {
        field = None;
    }
    Ok(Outcome { result: serde_json::to_value(&diffs).unwrap(), field, ok })
}
