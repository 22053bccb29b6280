use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use multiegs::generators::GeneratorPortraits;
use multiegs::groupdata::DEFAULT_MAX_P;
use multiegs::permgroup::{p_exponent, GroupContext};
use multiegs::ramification::{
    lemma_suite, verify_ramification, CaseChoice, CertifyOptions, TupleOptions, VerifyOptions,
    DEFAULT_CAP,
};
use multiegs::{DefiningDatum, Word};

const EXIT_INVALID: u8 = 3;

#[derive(Parser)]
#[command(
    name = "multiegs",
    version,
    about = "Level quotients of multi-EGS groups and ramification checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a defining datum.
    Classify(Common),
    /// Build both tuples in G_k and certify every pair.
    Verify(VerifyArgs),
    /// Run the element-level checks that apply to the datum.
    Lemmas(Common),
    /// Orders |G_1|..|G_k| and generator ranks d(G_n).
    Tower(Level),
    /// Order of G_k.
    Order(Level),
    /// Minimal number of generators of G_k.
    Rank(Level),
    /// Evaluate a word in G_k.
    Element(ElementArgs),
}

#[derive(Args)]
struct Common {
    /// JSON datum, e.g. {"p": 5, "vectors": [[1,4,0,0],[0,1,4,0]]}
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Largest accepted prime.
    #[arg(long, default_value_t = DEFAULT_MAX_P)]
    max_p: u32,
}

#[derive(Args)]
struct Level {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    k: usize,
    /// Refuse levels with more than this many leaves.
    #[arg(long, default_value_t = 10_000)]
    max_leaves: u64,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    level: Level,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
    #[arg(long, value_enum, default_value_t = CaseArg::Auto)]
    case: CaseArg,
    /// Change of directed generators, rows separated by ';', e.g. "1,0;1,1".
    #[arg(long)]
    basis: Option<String>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Skip the invariant rungs and decide by orbits only.
    #[arg(long)]
    no_invariants: bool,
    /// Disable level-by-level lifting when orbits exceed the cap.
    #[arg(long)]
    no_lifting: bool,
    /// Decide only in G_k itself, not in its smaller quotients.
    #[arg(long)]
    no_quotients: bool,
    /// Include wall time in the report.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct ElementArgs {
    #[command(flatten)]
    level: Level,
    /// Word such as "a b1.1 b1.2^-1".
    #[arg(long)]
    word: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    Auto,
    Periodic,
    Nonperiodic,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}

fn load(common: &Common) -> Result<DefiningDatum, String> {
    let text = std::fs::read_to_string(&common.input)
        .map_err(|e| format!("{}: {e}", common.input.display()))?;
    let datum = DefiningDatum::parse(&text).map_err(|e| e.to_string())?;
    datum.validate_with_max(common.max_p).map_err(|errs| {
        errs.iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("; ")
    })?;
    Ok(datum)
}

fn load_level(level: &Level) -> Result<DefiningDatum, String> {
    let datum = load(&level.common)?;
    if level.k == 0 {
        return Err("k must be at least 1".into());
    }
    let leaves = u64::from(datum.p())
        .checked_pow(level.k as u32)
        .unwrap_or(u64::MAX);
    if leaves > level.max_leaves {
        return Err(format!(
            "p^k = {leaves} leaves exceeds --max-leaves {}",
            level.max_leaves
        ));
    }
    Ok(datum)
}

fn emit(format: Format, value: &Value, text: impl FnOnce() -> String) {
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(value).expect("plain data")
        ),
        Format::Text => print!("{}", text()),
    }
}

fn order_value(ctx: &GroupContext) -> Value {
    let order = ctx.order();
    json!({
        "k": ctx.depth(),
        "order": order.to_string(),
        "exponent": p_exponent(&order, ctx.p()),
    })
}

fn run(command: Command) -> Result<u8, String> {
    match command {
        Command::Classify(common) => {
            let datum = load(&common)?;
            let class = datum.classify().map_err(|e| format!("{e:?}"))?;
            let value = json!({ "datum": datum.to_json(), "classification": class });
            emit(common.format, &value, || {
                let mut out = String::new();
                for (key, v) in value["classification"].as_object().expect("struct") {
                    out.push_str(&format!("{key}: {v}\n"));
                }
                out
            });
            Ok(0)
        }
        Command::Verify(args) => {
            let datum = load_level(&args.level)?;
            let basis = args.basis.as_deref().map(parse_matrix).transpose()?;
            let options = VerifyOptions {
                tuples: TupleOptions {
                    case: match args.case {
                        CaseArg::Auto => CaseChoice::Auto,
                        CaseArg::Periodic => CaseChoice::Periodic,
                        CaseArg::Nonperiodic => CaseChoice::NonPeriodic,
                    },
                    basis,
                },
                certify: CertifyOptions {
                    cap: args.cap.max(1),
                    invariants: !args.no_invariants,
                    lifting: !args.no_lifting,
                    quotients: !args.no_quotients,
                },
                threads: args.threads,
                timing: args.timing,
            };
            let report =
                verify_ramification(&datum, args.level.k, &options).map_err(|e| e.to_string())?;
            match args.level.common.format {
                Format::Json => println!("{}", report.to_json()),
                Format::Text => print!("{}", report.to_text()),
            }
            Ok(report.verdict.exit_code() as u8)
        }
        Command::Lemmas(common) => {
            let datum = load(&common)?;
            let reports = lemma_suite(&datum);
            if reports.is_empty() {
                return Err("no element-level check applies to this datum".into());
            }
            let value = json!(reports);
            emit(common.format, &value, || {
                reports
                    .iter()
                    .map(|r| {
                        let status = if r.pass { "pass" } else { "FAIL" };
                        let checks: Vec<String> = r
                            .checks
                            .iter()
                            .map(|c| format!("{} = {}", c.name, c.observed))
                            .collect();
                        let note = r
                            .note
                            .as_deref()
                            .map(|n| format!(" ({n})"))
                            .unwrap_or_default();
                        format!(
                            "{status} {} in G_{}: {} [{}]{note}\n",
                            r.lemma,
                            r.depth,
                            r.subject,
                            checks.join(", ")
                        )
                    })
                    .collect()
            });
            Ok(if reports.iter().all(|r| r.pass) { 0 } else { 1 })
        }
        Command::Tower(level) => {
            let datum = load_level(&level)?;
            let rows: Vec<Value> = (1..=level.k)
                .map(|n| {
                    let ctx = GroupContext::new(&datum, n);
                    let mut row = order_value(&ctx);
                    row["rank"] = json!(ctx.frattini_rank());
                    row
                })
                .collect();
            let value = json!(rows);
            emit(level.common.format, &value, || {
                rows.iter()
                    .map(|r| {
                        format!(
                            "n={} |G_n| = {} = {}^{} d(G_n) = {}\n",
                            r["k"],
                            unquote(&r["order"]),
                            datum.p(),
                            r["exponent"],
                            r["rank"]
                        )
                    })
                    .collect()
            });
            Ok(0)
        }
        Command::Order(level) => {
            let datum = load_level(&level)?;
            let ctx = GroupContext::new(&datum, level.k);
            let value = order_value(&ctx);
            emit(level.common.format, &value, || {
                format!(
                    "{} = {}^{}\n",
                    unquote(&value["order"]),
                    datum.p(),
                    value["exponent"]
                )
            });
            Ok(0)
        }
        Command::Rank(level) => {
            let datum = load_level(&level)?;
            let ctx = GroupContext::new(&datum, level.k);
            let value = json!({ "k": level.k, "rank": ctx.frattini_rank() });
            emit(level.common.format, &value, || {
                format!("{}\n", value["rank"])
            });
            Ok(0)
        }
        Command::Element(args) => {
            let datum = load_level(&args.level)?;
            let word: Word = args
                .word
                .parse()
                .map_err(|e: multiegs::generators::WordError| e.to_string())?;
            word.check(&datum).map_err(|e| e.to_string())?;
            let g = GeneratorPortraits::new(&datum, args.level.k)
                .eval(&word)
                .map_err(|e| e.to_string())?;
            let perm = g.to_leaf_perm();
            let value = json!({
                "word": word.to_string(),
                "portrait": g.to_text(),
                "leaf_permutation": perm.images(),
                "order": multiegs::permgroup::element_order(&g),
                "stabilizer_depth": g.stabilizer_depth(),
            });
            emit(args.level.common.format, &value, || {
                let images: Vec<String> = perm.images().iter().map(u32::to_string).collect();
                format!(
                    "word {}\n{}leaves {}\norder {}\n",
                    word,
                    g.to_text(),
                    images.join(" "),
                    value["order"]
                )
            });
            Ok(0)
        }
    }
}

fn unquote(v: &Value) -> String {
    v.as_str()
        .map(str::to_string)
        .unwrap_or_else(|| v.to_string())
}

fn parse_matrix(text: &str) -> Result<Vec<Vec<i64>>, String> {
    text.split(';')
        .map(|row| {
            row.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<i64>()
                        .map_err(|e| format!("basis entry {x:?}: {e}"))
                })
                .collect()
        })
        .collect()
}
