use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value as J};

use twistsum_core::combinatorics::{check_hypothesis_enumerate, check_lemma, run_trials, LemmaOutcome, RandomParams, SetSystem};
use twistsum_core::counting::{compute_matches, CountReport, EqualityMode, KRange, MatchQuery};
use twistsum_core::expsums::{evaluate, Backend as SumBackend, IntPoly, Range, SumSpec, Twist};
use twistsum_core::kclass::{birch_condition, birch_good_primes, check_class, conjecture_probe, salie_bad_primes, salie_good_primes, FamilyHandle};
use twistsum_core::lemmas::{run_suite, SuiteConfig, SUITES};
use twistsum_core::multfun::{load_multfun, MultFun};
use twistsum_core::sieve::{squarefree_k_almost, squarefree_k_almost_smooth, to_csv};
use twistsum_core::value::Value;
use twistsum_core::Error;

#[derive(Parser, Debug)]
#[command(name = "twistsum", version, about = "Kloosterman-type sums, lemma suites and counting experiments")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Serialize)]
struct Global {
    #[arg(long, global = true, value_enum, default_value_t = Backend::Exact)]
    backend: Backend,
    #[arg(long, global = true, default_value_t = 100)]
    precision_bits: u32,
    #[arg(long, global = true)]
    #[serde(skip)]
    threads: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    #[arg(long, global = true)]
    csv: bool,
    #[arg(long, global = true)]
    #[serde(skip)]
    out: Option<PathBuf>,
    #[arg(long = "constant-C", global = true, default_value_t = 1.0)]
    constant_c: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Backend {
    Exact,
    Numeric,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum FamilyArg {
    Kloosterman,
    Birch,
    Salie,
    Generic,
    Corrupted,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum RangeArg {
    Unit,
    Full,
}

impl From<RangeArg> for Range {
    fn from(r: RangeArg) -> Self {
        match r {
            RangeArg::Unit => Range::Unit,
            RangeArg::Full => Range::Full,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum TwistArg {
    None,
    Jacobi,
}

impl From<TwistArg> for Twist {
    fn from(t: TwistArg) -> Self {
        match t {
            TwistArg::None => Twist::None,
            TwistArg::Jacobi => Twist::Jacobi,
        }
    }
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "subcommand", rename_all = "lowercase")]
enum Cmd {
    /// Evaluate one exponential sum.
    Sum(SumArgs),
    /// Enumerate square-free k-almost primes as CSV.
    Sieve(SieveArgs),
    /// Count matches S(a,b;n) = η f(n) and evaluate the bounds.
    Count(CountArgs),
    /// Run a named lemma suite.
    Lemma(LemmaArgs),
    /// Check the kloostermanian properties of a family.
    Class(ClassArgs),
    /// Check the extremal set-system lemma.
    Setsys(SetsysArgs),
    /// Search a box of (a, b) for candidate kloostermanian generic sums.
    Probe(ProbeArgs),
}

#[derive(Args, Debug, Serialize)]
struct SumArgs {
    #[arg(long, value_enum, default_value_t = FamilyArg::Kloosterman)]
    family: FamilyArg,
    #[arg(short, allow_negative_numbers = true)]
    a: i64,
    #[arg(short, allow_negative_numbers = true)]
    b: i64,
    #[arg(short)]
    c: u64,
    #[arg(long, value_enum, default_value_t = RangeArg::Unit)]
    range: RangeArg,
    #[arg(long, value_enum, default_value_t = TwistArg::None)]
    twist: TwistArg,
    /// Phase polynomial g for the generic family, e.g. "x^3".
    #[arg(long, default_value = "x")]
    g: String,
    #[arg(long, default_value = "x")]
    h: String,
}

#[derive(Args, Debug, Serialize)]
struct SieveArgs {
    #[arg(long = "X")]
    x: u64,
    #[arg(long)]
    k: usize,
    /// Keep only y-smooth n.
    #[arg(long)]
    smooth: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
struct CountArgs {
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    a: i64,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    b: i64,
    /// A positive integer, or "all" for the square-free scan.
    #[arg(long, default_value = "2")]
    k: String,
    /// One value, or several for a sweep.
    #[arg(long = "X", required = true, num_args = 1..)]
    x: Vec<u64>,
    /// sharpness-k, sharpness-squarefree, one, random, or a path to a function JSON file.
    #[arg(long, default_value = "sharpness-k")]
    f: String,
    /// Equality mode; defaults to the global backend.
    #[arg(long, value_enum)]
    mode: Option<Backend>,
    #[arg(long)]
    scan_exceptional: bool,
}

#[derive(Args, Debug, Serialize)]
struct LemmaArgs {
    #[arg(long)]
    suite: String,
    #[arg(long)]
    prime_bound: Option<u64>,
    #[arg(long)]
    bound: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
struct ClassArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(short, allow_negative_numbers = true)]
    a: i64,
    #[arg(short, allow_negative_numbers = true)]
    b: i64,
    #[arg(long, default_value_t = 100)]
    prime_bound: u64,
    /// Bound on mn for the T-multiplicativity check; defaults to min(prime bound, 60).
    #[arg(long)]
    mult_bound: Option<u64>,
    /// Restrict the prime checks to the family's good prime set.
    #[arg(long)]
    good_set: bool,
    #[arg(long, value_enum, default_value_t = RangeArg::Unit)]
    range: RangeArg,
    #[arg(long, value_enum, default_value_t = TwistArg::None)]
    twist: TwistArg,
    #[arg(long, default_value = "x")]
    g: String,
    #[arg(long, default_value = "x")]
    h: String,
}

#[derive(Args, Debug, Serialize)]
struct SetsysArgs {
    #[arg(long, conflicts_with = "input")]
    random: bool,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    /// JSON file with ground_size, subsets and t.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct ProbeArgs {
    #[arg(long)]
    g: String,
    #[arg(long)]
    h: String,
    #[arg(long, value_enum, default_value_t = RangeArg::Unit)]
    range: RangeArg,
    #[arg(long, value_enum, default_value_t = TwistArg::None)]
    twist: TwistArg,
    #[arg(long = "box", default_value_t = 3)]
    search_box: i64,
    #[arg(long, default_value_t = 40)]
    prime_bound: u64,
}

/// Operational or configuration failure; reported with exit code 2.
struct Failure(String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.to_string())
    }
}

/// Command output: JSON payload, optional CSV rendering, and whether every verdict passed.
struct Output {
    result: J,
    csv: Option<String>,
    text: Option<String>,
    passed: bool,
}

impl Output {
    fn json(result: J, passed: bool) -> Self {
        Self { result, csv: None, text: None, passed }
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<J, Failure> {
    serde_json::to_value(v).map_err(|e| Failure(e.to_string()))
}

fn poly(s: &str) -> Result<IntPoly, Failure> {
    Ok(IntPoly::parse(s)?)
}

fn sum(g: &Global, args: &SumArgs) -> Result<Output, Failure> {
    let spec = match args.family {
        FamilyArg::Kloosterman => SumSpec::kloosterman(args.a, args.b, args.c),
        FamilyArg::Birch => SumSpec::birch(args.a, args.b, args.c, args.range.into()),
        FamilyArg::Salie => SumSpec::salie(args.a, args.b, args.c),
        FamilyArg::Generic => SumSpec::generic(args.a, args.b, args.c, poly(&args.g)?, poly(&args.h)?, args.range.into(), args.twist.into()),
        FamilyArg::Corrupted => return Err(Failure("the corrupted family is only available to `class`".into())),
    };
    let backend = match g.backend {
        Backend::Exact => SumBackend::Exact,
        Backend::Numeric => SumBackend::Numeric { precision_bits: g.precision_bits },
    };
    let value = evaluate(&spec, backend)?;
    let numeric = value.numeric(g.precision_bits)?;
    let result = value.to_json(g.precision_bits)?;
    let text = format!(
        "value ≈ {:.15} + {:.15}i (±{:.1e})\nexact: {}",
        numeric.re.to_f64(),
        numeric.im.to_f64(),
        numeric.error_bound,
        result["exact"]
    );
    Ok(Output { result, csv: None, text: Some(text), passed: true })
}

fn sieve(args: &SieveArgs) -> Result<Output, Failure> {
    if args.k == 0 {
        return Err(Failure("k must be positive".into()));
    }
    let items = match args.smooth {
        Some(y) => squarefree_k_almost_smooth(args.x, args.k, y),
        None => squarefree_k_almost(args.x, args.k),
    };
    let csv = to_csv(&items);
    let rows: Vec<J> = items.iter().map(|n| json!({"n": n.n(), "P+": n.largest_prime_factor(), "omega": n.omega()})).collect();
    Ok(Output { result: json!({"count": items.len(), "rows": rows}), csv: Some(csv), text: None, passed: true })
}

fn multfun(name: &str, args: &CountArgs, k: KRange, seed: u64) -> Result<MultFun, Failure> {
    let eta = Value::one();
    Ok(match name {
        "sharpness-k" => match k {
            KRange::Fixed(k) => MultFun::sharpness_k(args.a, args.b, eta, k)?,
            KRange::All => return Err(Failure("sharpness-k needs a fixed k".into())),
        },
        "sharpness-squarefree" => MultFun::sharpness_squarefree(args.a, args.b, eta)?,
        "one" => MultFun::constant_one(eta)?,
        "random" => MultFun::random_table(seed, eta)?,
        path => load_multfun(std::path::Path::new(path))?,
    })
}

fn count_csv(reports: &[CountReport]) -> String {
    let mut s = String::from("X,k,r_k,bound,rhs,upper,applicable,verdict\n");
    for r in reports {
        let k = match r.k {
            KRange::Fixed(k) => k.to_string(),
            KRange::All => "all".into(),
        };
        for b in &r.bounds {
            let verdict = if !b.applicable {
                "n/a"
            } else if b.holds {
                "pass"
            } else {
                "fail"
            };
            s.push_str(&format!("{},{},{},{},{},{},{},{}\n", r.x, k, b.lhs, b.name, b.rhs, b.upper, b.applicable, verdict));
        }
    }
    s
}

fn count(g: &Global, args: &CountArgs) -> Result<Output, Failure> {
    let k = match args.k.as_str() {
        "all" => KRange::All,
        s => KRange::Fixed(s.parse().map_err(|_| Failure(format!("invalid k: {s}")))?),
    };
    let f = multfun(&args.f, args, k, g.seed)?;
    let mode = match args.mode.unwrap_or(g.backend) {
        Backend::Exact => EqualityMode::Exact,
        Backend::Numeric => EqualityMode::Numeric,
    };
    let mut reports = Vec::new();
    for &x in &args.x {
        let q = MatchQuery::new(args.a, args.b, &f, x, k).mode(mode).constant_c(g.constant_c).scan_exceptional(args.scan_exceptional);
        reports.push(compute_matches(&q)?);
    }
    let passed = reports.iter().all(|r| r.all_bounds_hold());
    let result = if reports.len() == 1 { to_json(&reports[0])? } else { to_json(&reports)? };
    Ok(Output { result, csv: Some(count_csv(&reports)), text: None, passed })
}

fn lemma(g: &Global, args: &LemmaArgs) -> Result<Output, Failure> {
    if !SUITES.contains(&args.suite.as_str()) {
        return Err(Failure(format!("unknown suite {}; expected one of {}", args.suite, SUITES.join(", "))));
    }
    let cfg = SuiteConfig { prime_bound: args.prime_bound, bound: args.bound, trials: args.trials, seed: g.seed };
    let report = run_suite(&args.suite, &cfg)?;
    let mut csv = String::from("suite,check,passed,checked,failures\n");
    for c in &report.checks {
        csv.push_str(&format!("{},{},{},{},{}\n", report.suite, c.name, c.passed, c.checked, c.failures));
    }
    Ok(Output { result: to_json(&report)?, csv: Some(csv), text: None, passed: report.passed })
}

fn class(args: &ClassArgs) -> Result<Output, Failure> {
    let (a, b) = (args.a, args.b);
    let (h, good) = match args.family {
        FamilyArg::Kloosterman => (FamilyHandle::kloosterman(a, b), None),
        FamilyArg::Birch => (FamilyHandle::birch(a, b, args.range.into()), args.good_set.then(|| birch_good_primes(a, b)).transpose()?),
        FamilyArg::Salie => (FamilyHandle::salie(a, b), args.good_set.then(|| salie_good_primes(a, b)).transpose()?),
        FamilyArg::Generic => (FamilyHandle::generic(a, b, poly(&args.g)?, poly(&args.h)?, args.range.into(), args.twist.into()), None),
        FamilyArg::Corrupted => (FamilyHandle::corrupted_kloosterman(a, b), None),
    };
    let mult_bound = args.mult_bound.unwrap_or(args.prime_bound.min(60));
    let report = check_class(&h, args.prime_bound, mult_bound, good)?;
    let mut result = to_json(&report)?;
    match args.family {
        FamilyArg::Birch => result["birch_condition"] = to_json(&birch_condition(a, b))?,
        FamilyArg::Salie => result["salie_bad_primes"] = to_json(&salie_bad_primes(a, b, args.prime_bound)?)?,
        _ => {}
    }
    Ok(Output::json(result, report.passed))
}

fn setsys(g: &Global, args: &SetsysArgs) -> Result<Output, Failure> {
    if let Some(path) = &args.input {
        let text = std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
        let v: J = serde_json::from_str(&text).map_err(|e| Failure(e.to_string()))?;
        let sys = SetSystem::from_json(&v)?;
        let outcome = check_lemma(&sys);
        let enumerated = if sys.m() <= 16 { Some(check_hypothesis_enumerate(&sys)) } else { None };
        let passed = !matches!(outcome, LemmaOutcome::Counterexample { .. });
        return Ok(Output::json(json!({"system": sys, "outcome": outcome, "hypothesis_by_enumeration": enumerated}), passed));
    }
    if !args.random {
        return Err(Failure("setsys needs --random or --input".into()));
    }
    let summary = run_trials(g.seed, args.trials, &RandomParams::default());
    let passed = summary.counterexamples == 0 && summary.criteria_disagree == 0;
    let csv = format!(
        "trials,hypothesis_true,bound_holds,counterexamples,criteria_disagree\n{},{},{},{},{}\n",
        summary.trials, summary.hypothesis_true, summary.bound_holds, summary.counterexamples, summary.criteria_disagree
    );
    Ok(Output { result: to_json(&summary)?, csv: Some(csv), text: None, passed })
}

fn probe(args: &ProbeArgs) -> Result<Output, Failure> {
    let report = conjecture_probe(&poly(&args.g)?, &poly(&args.h)?, args.range.into(), args.twist.into(), args.search_box, args.prime_bound)?;
    Ok(Output::json(to_json(&report)?, true))
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    if cli.global.precision_bits == 0 || cli.global.precision_bits > 100 {
        return Err(Failure(format!("precision {} bits is not supported (1..=100)", cli.global.precision_bits)));
    }
    if let Some(n) = cli.global.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure(e.to_string()))?;
    }
    match &cli.cmd {
        Cmd::Sum(a) => sum(&cli.global, a),
        Cmd::Sieve(a) => sieve(a),
        Cmd::Count(a) => count(&cli.global, a),
        Cmd::Lemma(a) => lemma(&cli.global, a),
        Cmd::Class(a) => class(a),
        Cmd::Setsys(a) => setsys(&cli.global, a),
        Cmd::Probe(a) => probe(a),
    }
}

fn emit(cli: &Cli, out: &Output) -> Result<(), Failure> {
    let config = json!({"global": to_json(&cli.global)?, "command": to_json(&cli.cmd)?});
    let body = if cli.global.csv {
        match &out.csv {
            Some(csv) => format!("# config: {config}\n{csv}"),
            None => return Err(Failure("this subcommand has no CSV output".into())),
        }
    } else if let (Some(text), false) = (&out.text, cli.global.json) {
        format!("{text}\n")
    } else {
        let ts = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let envelope = json!({
            "config": config,
            "passed": out.passed,
            "result": out.result,
            "metadata": {"timestamp": ts, "version": env!("CARGO_PKG_VERSION")},
        });
        serde_json::to_string_pretty(&envelope).map_err(|e| Failure(e.to_string()))? + "\n"
    };
    match &cli.global.out {
        Some(path) => std::fs::write(path, body).map_err(|e| Failure(format!("{}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let res = run(&cli).and_then(|out| emit(&cli, &out).map(|_| out.passed));
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
