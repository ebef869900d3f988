use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use permc::ancestry::{base_threshold, build_seed_tables};
use permc::error::ExitClass;
use permc::oracle::lambda_bruteforce;
use permc::verify::verify;
use permc::{Engine64, Error, FixedPoint, Limits, Morphism, QMembership, SeedTables};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "permc", version, about = "Factor complexity of infinite permutations from binary morphisms")]
struct Cli {
    /// Output format; json and csv are byte-stable.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Largest prefix ever generated, in symbols.
    #[arg(long, global = true, env = "PERMC_MAX_PREFIX")]
    max_prefix: Option<usize>,
    /// Symbols scanned per suffix comparison.
    #[arg(long, global = true)]
    lookahead_cap: Option<usize>,
    /// Replaces the default base threshold l·(L+2).
    #[arg(long, global = true)]
    base_threshold_override: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineChoice {
    Recurrence,
    Oracle,
    Both,
}

#[derive(Args)]
struct MorphismArg {
    /// Morphism as `<image of 0>/<image of 1>`, e.g. 01/10.
    spec: Option<String>,
    /// Image of 0 (with --phi1, instead of SPEC).
    #[arg(long, requires = "phi1", conflicts_with = "spec")]
    phi0: Option<String>,
    /// Image of 1.
    #[arg(long, requires = "phi0")]
    phi1: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a morphism and report class Q membership and L.
    Check(MorphismArg),
    /// Build the seed tables (A1, A2, B and statistics).
    Analyze(MorphismArg),
    /// Evaluate lambda(n) for one length or an inclusive range lo..hi.
    Lambda {
        #[command(flatten)]
        morphism: MorphismArg,
        #[arg(long = "n")]
        n: String,
        #[arg(long, value_enum, default_value_t = EngineChoice::Recurrence)]
        engine: EngineChoice,
    },
    /// Run the invariant suite over factors up to a window length.
    Verify {
        #[command(flatten)]
        morphism: MorphismArg,
        /// Longest factor length checked; defaults to twice the base threshold.
        #[arg(long)]
        window: Option<usize>,
    },
}

enum Failure {
    Core(Error),
    Mismatch(usize),
    Property(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Core(e) => match e.exit_class() {
                ExitClass::Malformed => 1,
                ExitClass::NotInQ => 2,
                ExitClass::Cap => 3,
                ExitClass::Invariant => 5,
            },
            Failure::Mismatch(_) => 4,
            Failure::Property(_) => 5,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Core(e) => e.to_string(),
            Failure::Mismatch(k) => format!("{k} row(s) where recurrence and oracle disagree"),
            Failure::Property(name) => format!("property failed: {name}"),
        }
    }
}

struct Ctx {
    format: Format,
    limits: Limits,
    out: String,
}

impl Ctx {
    fn morphism(&self, arg: &MorphismArg) -> Result<Morphism, Error> {
        match (&arg.spec, &arg.phi0, &arg.phi1) {
            (Some(s), None, None) => s.parse(),
            (None, Some(a), Some(b)) => Morphism::new(a.parse()?, b.parse()?),
            _ => Err(Error::MalformedSpec("give SPEC or both --phi0 and --phi1".into())),
        }
    }

    fn fixed_point(&self, m: Morphism) -> FixedPoint {
        FixedPoint::with_limits(m, self.limits.clone())
    }

    /// Fails with the not-in-Q exit class unless the morphism is in Q.
    fn in_q(&self, arg: &MorphismArg) -> Result<FixedPoint, Error> {
        let m = self.morphism(arg)?;
        if let QMembership::NotInQ { reason } = m.classify_q() {
            return Err(Error::NotInQ(reason));
        }
        Ok(self.fixed_point(m))
    }

    fn json(&mut self, v: &Value) {
        self.out.push_str(&serde_json::to_string_pretty(v).expect("json"));
        self.out.push('\n');
    }

    fn csv(&mut self, header: &[&str], rows: Vec<Vec<String>>) {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header).expect("csv");
        for r in rows {
            w.write_record(&r).expect("csv");
        }
        self.out.push_str(&String::from_utf8(w.into_inner().expect("csv")).expect("utf-8"));
    }
}

fn cmd_check(ctx: &mut Ctx, arg: &MorphismArg) -> Result<(), Failure> {
    let m = ctx.morphism(arg)?;
    let q = m.classify_q();
    let sync = if q.is_in_q() {
        Some(ctx.fixed_point(m.clone()).synchronization_length()?)
    } else {
        None
    };
    match ctx.format {
        Format::Text => {
            let _ = writeln!(ctx.out, "morphism     {m}");
            let _ = writeln!(ctx.out, "block_len    {}", m.block_len());
            let _ = writeln!(ctx.out, "class_q      {q}");
            let sync_text = sync.map_or("-".to_string(), |s| s.to_string());
            let _ = writeln!(ctx.out, "sync_length  {sync_text}");
        }
        Format::Json => {
            let v = json!({
                "morphism": m.to_string(),
                "block_len": m.block_len(),
                "class_q": serde_json::to_value(&q).expect("json"),
                "sync_length": sync,
            });
            ctx.json(&v);
        }
        Format::Csv => {
            let row = vec![
                m.to_string(),
                m.block_len().to_string(),
                q.to_string(),
                sync.map_or(String::new(), |s| s.to_string()),
            ];
            ctx.csv(&["morphism", "block_len", "class_q", "sync_length"], vec![row]);
        }
    }
    match q {
        QMembership::NotInQ { reason } => Err(Error::NotInQ(reason).into()),
        _ => Ok(()),
    }
}

fn analyze_text(out: &mut String, t: &SeedTables) {
    let _ = writeln!(out, "sync_length     {}", t.sync_length);
    let _ = writeln!(out, "base_threshold  {}", t.base_threshold);
    for (w, s) in &t.a1 {
        let _ = writeln!(out, "A1  {w:<8} m={} n={}", s.m, s.n);
    }
    for (w, m) in &t.a2 {
        let _ = writeln!(out, "A2  {w:<8} m={m}");
    }
    for (w, s) in &t.b {
        let _ = writeln!(out, "B   {w:<8} k={} t={} r={}", s.k, s.t, s.r);
    }
}

fn cmd_analyze(ctx: &mut Ctx, arg: &MorphismArg) -> Result<(), Failure> {
    let mut fp = ctx.in_q(arg)?;
    let t = build_seed_tables(&mut fp)?;
    match ctx.format {
        Format::Text => analyze_text(&mut ctx.out, &t),
        Format::Json => ctx.json(&t.to_json()),
        Format::Csv => {
            let mut rows = vec![
                vec!["meta".into(), String::new(), "sync_length".into(), t.sync_length.to_string()],
                vec!["meta".into(), String::new(), "base_threshold".into(), t.base_threshold.to_string()],
            ];
            let mut push = |section: &str, w: &permc::Word, field: &str, v: u64| {
                rows.push(vec![section.into(), w.to_string(), field.into(), v.to_string()]);
            };
            for (w, s) in &t.a1 {
                push("a1", w, "m", s.m);
                push("a1", w, "n", s.n);
            }
            for (w, m) in &t.a2 {
                push("a2", w, "m", *m);
            }
            for (w, s) in &t.b {
                push("b", w, "k", s.k);
                push("b", w, "t", s.t);
                push("b", w, "r", s.r);
            }
            ctx.csv(&["section", "word", "field", "value"], rows);
        }
    }
    Ok(())
}

fn parse_range(s: &str) -> Result<(usize, usize), Error> {
    let bad = || Error::InvalidArgument(format!("expected n or lo..hi, got {s:?}"));
    let num = |x: &str| x.trim().parse::<usize>().map_err(|_| bad());
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let n = num(s)?;
            (n, n)
        }
    };
    if lo < 2 || lo > hi {
        return Err(Error::InvalidArgument(format!("range {s:?} must satisfy 2 ≤ lo ≤ hi")));
    }
    Ok((lo, hi))
}

struct Row {
    n: usize,
    recurrence: Option<u64>,
    oracle: Option<u64>,
}

fn cmd_lambda(ctx: &mut Ctx, arg: &MorphismArg, range: &str, engine: EngineChoice) -> Result<(), Failure> {
    let (lo, hi) = parse_range(range)?;
    let mut fp = if engine == EngineChoice::Oracle {
        let m = ctx.morphism(arg)?;
        ctx.fixed_point(m)
    } else {
        ctx.in_q(arg)?
    };
    let mut rec = match engine {
        EngineChoice::Oracle => None,
        _ => Some(Engine64::new(build_seed_tables(&mut fp)?)),
    };
    let mut rows = Vec::new();
    for n in lo..=hi {
        let recurrence = match rec.as_mut() {
            Some(e) => Some(e.lambda(n)?),
            None => None,
        };
        let oracle = match engine {
            EngineChoice::Recurrence => None,
            _ => Some(lambda_bruteforce(&mut fp, n)?.lambda),
        };
        rows.push(Row { n, recurrence, oracle });
    }
    let both = engine == EngineChoice::Both;
    let value = |r: &Row| r.recurrence.or(r.oracle).expect("one engine ran");
    let matches = |r: &Row| r.recurrence == r.oracle;
    match ctx.format {
        Format::Text => {
            if both {
                let _ = writeln!(ctx.out, "{:>8}  {:>12}  {:>12}  match", "n", "lambda", "oracle");
            } else {
                let _ = writeln!(ctx.out, "{:>8}  {:>12}", "n", "lambda");
            }
            for r in &rows {
                if both {
                    let _ = writeln!(
                        ctx.out,
                        "{:>8}  {:>12}  {:>12}  {}",
                        r.n,
                        value(r),
                        r.oracle.expect("oracle ran"),
                        if matches(r) { "yes" } else { "NO" }
                    );
                } else {
                    let _ = writeln!(ctx.out, "{:>8}  {:>12}", r.n, value(r));
                }
            }
        }
        Format::Json => {
            let v: Vec<Value> = rows
                .iter()
                .map(|r| {
                    if both {
                        json!({"n": r.n, "lambda": value(r), "lambda_oracle": r.oracle, "match": matches(r)})
                    } else {
                        json!({"n": r.n, "lambda": value(r)})
                    }
                })
                .collect();
            ctx.json(&Value::Array(v));
        }
        Format::Csv => {
            let header: &[&str] = if both {
                &["n", "lambda", "lambda_oracle", "match"]
            } else {
                &["n", "lambda"]
            };
            let out = rows
                .iter()
                .map(|r| {
                    let mut row = vec![r.n.to_string(), value(r).to_string()];
                    if both {
                        row.push(r.oracle.expect("oracle ran").to_string());
                        row.push(matches(r).to_string());
                    }
                    row
                })
                .collect();
            ctx.csv(header, out);
        }
    }
    let mismatches = if both { rows.iter().filter(|r| !matches(r)).count() } else { 0 };
    if mismatches > 0 {
        return Err(Failure::Mismatch(mismatches));
    }
    Ok(())
}

fn cmd_verify(ctx: &mut Ctx, arg: &MorphismArg, window: Option<usize>) -> Result<(), Failure> {
    let mut fp = ctx.in_q(arg)?;
    let window = match window {
        Some(w) => w,
        None => 2 * base_threshold(&mut fp)?,
    };
    let report = verify(&mut fp, window)?;
    match ctx.format {
        Format::Text => {
            for o in &report.outcomes {
                let status = if o.passed() { "PASS" } else { "FAIL" };
                let _ = write!(ctx.out, "{status}  {} ({} checks)", o.name, o.checked);
                if let Some(c) = &o.counterexample {
                    let _ = write!(ctx.out, ": {c}");
                }
                ctx.out.push('\n');
            }
        }
        Format::Json => ctx.json(&report.to_json()),
        Format::Csv => {
            let rows = report
                .outcomes
                .iter()
                .map(|o| {
                    vec![
                        o.name.to_string(),
                        o.checked.to_string(),
                        o.passed().to_string(),
                        o.counterexample.clone().unwrap_or_default(),
                    ]
                })
                .collect();
            ctx.csv(&["property", "checked", "passed", "counterexample"], rows);
        }
    }
    match report.outcomes.iter().find(|o| !o.passed()) {
        Some(o) => Err(Failure::Property(format!(
            "{}: {}",
            o.name,
            o.counterexample.as_deref().unwrap_or_default()
        ))),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let mut limits = Limits {
        lookahead_cap: cli.lookahead_cap,
        base_threshold_override: cli.base_threshold_override,
        ..Limits::default()
    };
    if let Some(p) = cli.max_prefix {
        limits.max_prefix = p;
    }
    let mut ctx = Ctx {
        format: cli.format,
        limits,
        out: String::new(),
    };
    let result = match &cli.command {
        Command::Check(m) => cmd_check(&mut ctx, m),
        Command::Analyze(m) => cmd_analyze(&mut ctx, m),
        Command::Lambda { morphism, n, engine } => cmd_lambda(&mut ctx, morphism, n, *engine),
        Command::Verify { morphism, window } => cmd_verify(&mut ctx, morphism, *window),
    };
    print!("{}", ctx.out);
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
