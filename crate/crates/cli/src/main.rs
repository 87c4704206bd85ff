use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qkneser::bounds::{self, SweepRanges};
use qkneser::linalg::DEFAULT_BUDGET;
use qkneser::oracle::{self, build_yset};
use qkneser::report::{self, SpectrumReport, CSV_COLUMNS};
use qkneser::{BoundReport, CountReport, Error, FormKind, MixingSuiteReport, PrimePower, Sign, VerifyReport, YCase};

#[derive(Parser, Debug)]
#[command(name = "qkneser", version, about = "Spectra, density bounds and enumeration checks for complementary subspaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,

    /// Worker threads; defaults to the available cores.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Enumeration budget in subspaces.
    #[arg(long, default_value_t = DEFAULT_BUDGET, global = true)]
    budget: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Distinct eigenvalues of the complementary-subspace graph.
    Spectrum {
        #[arg(long)]
        e1: u32,
        #[arg(long)]
        e2: u32,
        #[arg(long)]
        q: u64,
    },
    /// Closed-form density bound for one case.
    Bound(CaseArgs),
    /// Exact proportion of complementary non-degenerate pairs.
    Count {
        #[command(flatten)]
        case: CaseArgs,
        /// Count every pair instead of one orbit representative.
        #[arg(long)]
        full_pairs: bool,
    },
    /// Sweep a family's bounds and tail checks.
    Verify(VerifyArgs),
    /// Seeded expander-mixing checks on the explicit biadjacency matrix.
    MixingCheck {
        #[arg(long)]
        e1: usize,
        #[arg(long)]
        e2: usize,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random subset pairs on top of the fixed cases.
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

#[derive(Args, Debug)]
struct CaseArgs {
    #[arg(long, value_parser = parse_family)]
    family: FormKind,
    /// Dimension of the first subspace.
    #[arg(long)]
    e1: u32,
    /// Dimension of the second subspace.
    #[arg(long)]
    e2: u32,
    #[arg(long)]
    q: u64,
    /// Type of the ambient orthogonal space.
    #[arg(long, value_parser = parse_sign, allow_hyphen_values = true)]
    eps: Option<Sign>,
    #[arg(long, value_parser = parse_sign, allow_hyphen_values = true)]
    sigma1: Option<Sign>,
    #[arg(long, value_parser = parse_sign, allow_hyphen_values = true)]
    sigma2: Option<Sign>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_parser = parse_family)]
    family: FormKind,
    /// Largest q of the main sweep.
    #[arg(long)]
    q_max: Option<u64>,
    /// Largest size parameter of the main sweep.
    #[arg(long)]
    size_max: Option<u32>,
    /// Largest q of the direct large-q sweep.
    #[arg(long)]
    tail_q_max: Option<u64>,
    /// Largest ambient dimension of the tail checks.
    #[arg(long)]
    tail_d_max: Option<u32>,
    /// Count every pair of every exception tuple.
    #[arg(long)]
    full_pairs: bool,
}

fn parse_family(s: &str) -> Result<FormKind, String> {
    FormKind::parse(&s.to_ascii_lowercase()).ok_or_else(|| format!("unknown family `{s}`"))
}

fn parse_sign(s: &str) -> Result<Sign, String> {
    Sign::parse(s).ok_or_else(|| format!("sign must be + or -, got `{s}`"))
}

/// A finished command: what to print and whether every check passed.
struct Outcome {
    json: String,
    csv: Vec<Vec<String>>,
    table: String,
    failure: Option<String>,
    note: Option<String>,
}

fn exit_for(e: &Error) -> u8 {
    match e {
        Error::Domain(_) | Error::Config(_) => 2,
        Error::Budget { .. } => 3,
        Error::Consistency(_) | Error::Report(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if n == 0 {
            eprintln!("error: --workers must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_for(&e));
        }
    };
    if let Err(e) = emit(cli.format, &outcome) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    if let Some(note) = &outcome.note {
        eprintln!("note: {note}");
    }
    match &outcome.failure {
        None => ExitCode::SUCCESS,
        Some(t) => {
            eprintln!("FAIL: {t}");
            ExitCode::from(1)
        }
    }
}

fn emit(format: Format, o: &Outcome) -> io::Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match format {
        Format::Json => writeln!(out, "{}", o.json)?,
        Format::Table => write!(out, "{}", o.table)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            if !o.csv.is_empty() {
                w.write_record(CSV_COLUMNS)?;
            }
            for row in &o.csv {
                w.write_record(row)?;
            }
            w.flush()?;
            return Ok(());
        }
    }
    out.flush()
}

fn run(cli: &Cli) -> qkneser::Result<Outcome> {
    match &cli.command {
        Command::Spectrum { e1, e2, q } => Ok(spectrum(report::spectrum_report(*e1, *e2, *q)?)),
        Command::Bound(c) => bound(c),
        Command::Count { case, full_pairs } => count(case, *full_pairs, cli.budget),
        Command::Verify(v) => verify(v, cli.budget),
        Command::MixingCheck { e1, e2, q, seed, trials } => {
            Ok(mixing(oracle::mixing_suite(*e1, *e2, *q, *trials, *seed)?))
        }
    }
}

fn spectrum(r: SpectrumReport) -> Outcome {
    let mut table = format!("Gamma_{{{},{}}} over F_{}\n", r.e1, r.e2, r.q);
    for (m, ev) in r.exponents.iter().zip(&r.eigenvalues) {
        table.push_str(&format!("  m = {m:<6} eigenvalues +-{ev}\n"));
    }
    table.push_str(&format!("character route agrees: {}\n", r.character_route_agrees));
    let failure = (!r.character_route_agrees).then(|| format!("spectrum e1={} e2={} q={}", r.e1, r.e2, r.q));
    Outcome {
        json: report::to_json_string(&report::spectrum_json(&r)),
        csv: Vec::new(),
        table,
        failure,
        note: None,
    }
}

fn half(kind: FormKind, e: u32) -> qkneser::Result<u32> {
    if e == 0 || e % 2 == 1 {
        return Err(Error::Domain(format!("{kind} subspaces need positive even dimension, got {e}")));
    }
    Ok(e / 2)
}

fn require<T>(v: Option<T>, flag: &str, kind: FormKind) -> qkneser::Result<T> {
    v.ok_or_else(|| Error::Domain(format!("{kind} needs --{flag}")))
}

fn bound(c: &CaseArgs) -> qkneser::Result<Outcome> {
    let q = PrimePower::new(c.q)?;
    let r = match c.family {
        FormKind::Orthogonal => {
            let eps = require(c.eps, "eps", c.family)?;
            let s1 = require(c.sigma1, "sigma1", c.family)?;
            let s2 = require(c.sigma2, "sigma2", c.family)?;
            bounds::bound_orthogonal(eps, s1, s2, half(c.family, c.e1)?, half(c.family, c.e2)?, q)?
        }
        FormKind::Symplectic => bounds::bound_symplectic(half(c.family, c.e1)?, half(c.family, c.e2)?, q)?,
        FormKind::Hermitian => bounds::bound_unitary(c.e1, c.e2, q)?,
    };
    let note = r.exception.then(|| format!("{} is an exception tuple; dispatch to `count`", r.tuple()));
    let failure = (!r.pass).then(|| r.tuple());
    Ok(Outcome {
        json: report::to_json_string(&report::bound_json(&r)),
        csv: vec![report::bound_csv_row(&r)],
        table: bound_table(std::slice::from_ref(&r)),
        failure,
        note,
    })
}

fn bound_table(rows: &[BoundReport]) -> String {
    let mut s = String::new();
    for b in rows {
        let mark = if b.pass { "PASS" } else { "FAIL" };
        let eq = if b.equality() { " (equality)" } else { "" };
        s.push_str(&format!(
            "{mark}  {}\n      bound {} ~ {:.6}  threshold {} ~ {:.6}{eq}\n",
            b.tuple(),
            b.lower_bound,
            b.lower_bound.approx(),
            b.threshold,
            approx(&b.threshold),
        ));
    }
    s
}

fn approx(r: &qkneser::ExactRational) -> f64 {
    qkneser::QuadExt::rational(r.clone()).approx()
}

fn count_cases(c: &CaseArgs) -> qkneser::Result<Vec<(YCase, YCase)>> {
    let d = (c.e1 + c.e2) as usize;
    let (e1, e2, q) = (c.e1 as usize, c.e2 as usize, c.q);
    Ok(match c.family {
        FormKind::Orthogonal => {
            let eps = require(c.eps, "eps", c.family)?;
            let s1: Vec<Sign> = c.sigma1.map_or(Sign::BOTH.to_vec(), |s| vec![s]);
            let s2: Vec<Sign> = c.sigma2.map_or(Sign::BOTH.to_vec(), |s| vec![s]);
            let mut v = Vec::new();
            for &a in &s1 {
                for &b in &s2 {
                    v.push((YCase::orthogonal(eps, a, d, e1, q), YCase::orthogonal(eps, b, d, e2, q)));
                }
            }
            v
        }
        FormKind::Symplectic => vec![(YCase::symplectic(d, e1, q), YCase::symplectic(d, e2, q))],
        FormKind::Hermitian => vec![(YCase::hermitian(d, e1, q), YCase::hermitian(d, e2, q))],
    })
}

fn count(c: &CaseArgs, full_pairs: bool, budget: u64) -> qkneser::Result<Outcome> {
    let mut reps = Vec::new();
    for (a, b) in count_cases(c)? {
        let y1 = build_yset(&a, budget)?;
        let y2 = build_yset(&b, budget)?;
        reps.push(if full_pairs {
            oracle::count_complementary(&y1, &y2)?
        } else {
            oracle::count_complementary_transitive(&y1, &y2)?
        });
    }
    let failure = reps.iter().find(|r| !r.pass).map(count_tuple);
    let json = if reps.len() == 1 {
        report::count_json(&reps[0])
    } else {
        serde_json_array(reps.iter().map(report::count_json))
    };
    Ok(Outcome {
        json: report::to_json_string(&json),
        csv: reps.iter().map(report::count_csv_row).collect(),
        table: count_table(&reps),
        failure,
        note: None,
    })
}

fn serde_json_array(items: impl Iterator<Item = report::Value>) -> report::Value {
    report::Value::Array(items.collect())
}

fn count_tuple(c: &CountReport) -> String {
    format!("count {} x {}", c.case1, c.case2)
}

fn count_table(rows: &[CountReport]) -> String {
    let mut s = String::new();
    for c in rows {
        let mark = if c.pass { "PASS" } else { "FAIL" };
        let eq = if c.proportion == c.threshold { " (equality)" } else { "" };
        s.push_str(&format!(
            "{mark}  {}\n      |Y1|={} |Y2|={} pairs={} proportion {} ~ {:.6}  threshold {}{eq}  [{}]\n",
            count_tuple(c),
            c.y1,
            c.y2,
            c.pairs,
            c.proportion,
            approx(&c.proportion),
            c.threshold,
            c.method.name(),
        ));
    }
    s
}

fn verify(v: &VerifyArgs, budget: u64) -> qkneser::Result<Outcome> {
    let mut r = SweepRanges::defaults(v.family);
    if let Some(x) = v.q_max {
        r.q_max = x;
    }
    if let Some(x) = v.size_max {
        r.size_max = x;
    }
    if let Some(x) = v.tail_q_max {
        r.tail_direct_q_max = x;
        r.tail_q_max = x;
    }
    if let Some(x) = v.tail_d_max {
        r.tail_d_max = x;
    }
    r.full_pairs = v.full_pairs;
    r.budget = budget;
    let rep = bounds::verify_theorem(v.family, &r)?;
    let mut csv: Vec<Vec<String>> = rep.bounds.iter().map(report::bound_csv_row).collect();
    csv.extend(rep.counts.iter().map(report::count_csv_row));
    Ok(Outcome {
        json: report::to_json_string(&report::verify_json(&rep)),
        csv,
        table: verify_table(&rep),
        failure: rep.first_failure(),
        note: None,
    })
}

fn verify_table(rep: &VerifyReport) -> String {
    let sweep = rep.sweep().count();
    let tails = rep.bounds.len() - sweep;
    let equalities = rep.bounds.iter().filter(|b| b.equality()).count();
    let mut s = format!("{} sweep\n", rep.family);
    s.push_str(&format!("  main-sweep bounds   {sweep}\n"));
    s.push_str(&format!("  tail checks         {tails}\n"));
    s.push_str(&format!("  equality cases      {equalities}\n"));
    if !rep.dispatched.is_empty() {
        let list: Vec<String> = rep.dispatched.iter().map(|(q, m2, m1)| format!("({q},{m2},{m1})")).collect();
        s.push_str(&format!("  counted exceptions  {} {}\n", rep.dispatched.len(), list.join(" ")));
        let held = rep.counts.iter().filter(|c| c.pass).count();
        s.push_str(&format!("  exact counts        {held}/{} pass\n", rep.counts.len()));
    }
    s.push_str(if rep.pass() { "PASS\n" } else { "FAIL\n" });
    s
}

fn mixing(r: MixingSuiteReport) -> Outcome {
    let mut table = format!("mixing check e1={} e2={} q={} seed={}\n", r.e1, r.e2, r.q, r.seed);
    table.push_str(&format!("  inequality held     {}/{}\n", r.held, r.checked));
    table.push_str(&format!("  equality cases      {}\n", r.equalities));
    table.push_str(&format!("  char-poly identity  {}/{}\n", r.char_poly_held, r.char_poly_checked));
    table.push_str(if r.pass() { "PASS\n" } else { "FAIL\n" });
    let failure = if r.pass() {
        None
    } else {
        Some(r.first_failure.clone().unwrap_or_else(|| format!("mixing e1={} e2={} q={}", r.e1, r.e2, r.q)))
    };
    Outcome {
        json: report::to_json_string(&report::mixing_json(&r)),
        csv: Vec::new(),
        table,
        failure,
        note: None,
    }
}
