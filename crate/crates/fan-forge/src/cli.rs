//! Command-line front end.
//!
//! Exit codes: 0 success, 1 invariant failure, 2 parse/input error,
//! 3 semantic precondition failure, 4 refutation found no witness.

use crate::collapse::{
    certify_identification, collapse_chain, refute_uniformity, CollapseError, FanId,
    FunctionOracle, RefuteOutcome, RefuteSearch,
};
use crate::group::{GroupError, TowerElement};
use crate::metric::{dist, dist_oracle};
use crate::rat::Rat;
use crate::space::{enumerate_truncation, parse_point, PointAddress};
use crate::verify::{run_suite, Suite, VerifyReport};
use clap::{Args, Parser, Subcommand};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVARIANT: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_SEMANTIC: i32 = 3;
pub const EXIT_NOT_FOUND: i32 = 4;

#[derive(Parser)]
#[command(
    name = "fan-forge",
    about = "Exact computations on iterated rational double fans: distances, group actions, collapse certificates",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact distance between two points
    Dist {
        /// first point literal, e.g. "fan(1/2;1;A;1;b0,b1)"
        p: String,
        /// second point literal
        q: String,
    },
    /// Shortest-path distance on a finite truncation
    OracleDist {
        p: String,
        q: String,
        #[arg(long)]
        level: u32,
        #[arg(long, default_value_t = 1)]
        spokes: u32,
        #[arg(long, default_value_t = 2)]
        denom: u64,
    },
    /// Apply a serialized element to a point
    Act {
        /// element JSON file (or inline JSON starting with '{')
        element: String,
        point: String,
    },
    /// Multiply two serialized elements
    Mul { g1: String, g2: String },
    /// Invert a serialized element
    Inv { g: String },
    /// Build a collapse chain on one spoke of a fan
    Chain {
        #[command(flatten)]
        fan: FanArgs,
        #[arg(long)]
        spoke: u32,
        /// gap budget, a rational strictly between 0 and 1
        #[arg(long)]
        gamma: String,
        /// file with one fixed point literal per line
        #[arg(long)]
        fix: Option<PathBuf>,
        /// write the chain JSON here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for a uniformity witness against an oracle
    Refute {
        #[command(flatten)]
        fan: FanArgs,
        /// oracle spec: dist:<point> | table:<file> | const:<rational>
        #[arg(long)]
        oracle: String,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        fix: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        max_spoke: u32,
        #[arg(long, default_value_t = 3)]
        max_segment: u32,
        #[arg(long, default_value = "1/32")]
        grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify that both base points of a fan get identified
    Certify {
        #[command(flatten)]
        fan: FanArgs,
        #[arg(long)]
        oracle: String,
        #[arg(long)]
        gamma: String,
        #[arg(long)]
        spoke: Option<u32>,
        #[arg(long)]
        fix: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate a truncation and export it as DOT
    Truncate {
        #[arg(long)]
        level: u32,
        #[arg(long, default_value_t = 1)]
        spokes: u32,
        #[arg(long, default_value_t = 2)]
        denom: u64,
        /// write the DOT text here instead of stdout
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Run the seeded invariant suites
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 500)]
        samples: u64,
        /// falls back to FANFORGE_SEED, then 0
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args)]
struct FanArgs {
    /// the fan's ordered base pair, "x,y" split at the top-level comma
    #[arg(long, default_value = "b0,b1")]
    pair: String,
    /// the level the fan was created at
    #[arg(long, default_value_t = 1)]
    level: u32,
}

enum CmdError {
    Parse(String),
    Semantic(String),
    NotFound(String),
}

impl CmdError {
    fn exit_code(&self) -> i32 {
        match self {
            CmdError::Parse(_) => EXIT_PARSE,
            CmdError::Semantic(_) => EXIT_SEMANTIC,
            CmdError::NotFound(_) => EXIT_NOT_FOUND,
        }
    }

    fn message(&self) -> &str {
        match self {
            CmdError::Parse(m) | CmdError::Semantic(m) | CmdError::NotFound(m) => m,
        }
    }
}

impl From<crate::space::SpaceError> for CmdError {
    fn from(e: crate::space::SpaceError) -> Self {
        CmdError::Parse(e.to_string())
    }
}

impl From<GroupError> for CmdError {
    fn from(e: GroupError) -> Self {
        match e {
            GroupError::Serialization(_) => CmdError::Parse(e.to_string()),
            _ => CmdError::Semantic(e.to_string()),
        }
    }
}

impl From<CollapseError> for CmdError {
    fn from(e: CollapseError) -> Self {
        match e {
            CollapseError::InvalidChain(_) | CollapseError::OracleRange(_) => {
                CmdError::Parse(e.to_string())
            }
            _ => CmdError::Semantic(e.to_string()),
        }
    }
}

/// Parses the process arguments and runs the selected command, returning the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders help/version on stdout with success
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<i32, CmdError> {
    match command {
        Command::Dist { p, q } => {
            let p = point_arg(&p)?;
            let q = point_arg(&q)?;
            println!("{}", dist(&p, &q));
            Ok(EXIT_OK)
        }
        Command::OracleDist {
            p,
            q,
            level,
            spokes,
            denom,
        } => {
            let p = point_arg(&p)?;
            let q = point_arg(&q)?;
            let trunc = enumerate_truncation(level, spokes, denom)?;
            let d = dist_oracle(&p, &q, &trunc).map_err(|e| CmdError::Semantic(e.to_string()))?;
            println!("{}", d);
            Ok(EXIT_OK)
        }
        Command::Act { element, point } => {
            let g = element_arg(&element)?;
            let p = point_arg(&point)?;
            println!("{}", g.act(&p));
            Ok(EXIT_OK)
        }
        Command::Mul { g1, g2 } => {
            let g1 = element_arg(&g1)?;
            let g2 = element_arg(&g2)?;
            println!("{}", g1.mul(&g2)?.to_json_string());
            Ok(EXIT_OK)
        }
        Command::Inv { g } => {
            let g = element_arg(&g)?;
            println!("{}", g.inv().to_json_string());
            Ok(EXIT_OK)
        }
        Command::Chain {
            fan,
            spoke,
            gamma,
            fix,
            out,
        } => {
            let fan = fan_arg(&fan)?;
            let gamma = rat_arg(&gamma)?;
            let fixed = fixed_set(fix.as_deref())?;
            let chain = collapse_chain(&fan, spoke, &gamma, &fixed)?;
            emit(out.as_deref(), &chain.to_json_string())?;
            Ok(EXIT_OK)
        }
        Command::Refute {
            fan,
            oracle,
            eps,
            fix,
            max_spoke,
            max_segment,
            grid,
            out,
        } => {
            let fan = fan_arg(&fan)?;
            let oracle = oracle_arg(&oracle)?;
            let eps = rat_arg(&eps)?;
            let fixed = fixed_set(fix.as_deref())?;
            let search = RefuteSearch {
                max_spoke,
                max_segment,
                offset_grid: rat_arg(&grid)?,
            };
            let outcome = refute_uniformity(&fan, &oracle, &eps, &fixed, &search)?;
            emit(out.as_deref(), &outcome.to_json_string())?;
            match outcome {
                RefuteOutcome::Witness(_) => Ok(EXIT_OK),
                RefuteOutcome::NotFound { .. } => Err(CmdError::NotFound(
                    "no witness within the searched bounds".into(),
                )),
            }
        }
        Command::Certify {
            fan,
            oracle,
            gamma,
            spoke,
            fix,
            out,
        } => {
            let fan = fan_arg(&fan)?;
            let oracle = oracle_arg(&oracle)?;
            let gamma = rat_arg(&gamma)?;
            let fixed = fixed_set(fix.as_deref())?;
            let report = certify_identification(&fan, &fixed, &oracle, &gamma, spoke)?;
            emit(out.as_deref(), &report.to_json_string())?;
            Ok(EXIT_OK)
        }
        Command::Truncate {
            level,
            spokes,
            denom,
            dot,
        } => {
            let trunc = enumerate_truncation(level, spokes, denom)?;
            eprintln!("nodes: {}", trunc.points().len());
            eprintln!("edges: {}", trunc.edges().len());
            emit(dot.as_deref(), trunc.to_dot().trim_end())?;
            Ok(EXIT_OK)
        }
        Command::Verify {
            suite,
            samples,
            seed,
        } => {
            let seed = seed
                .or_else(|| {
                    std::env::var("FANFORGE_SEED")
                        .ok()
                        .and_then(|s| s.parse().ok())
                })
                .unwrap_or(0);
            let suites: Vec<Suite> = match suite.as_str() {
                "metric" => vec![Suite::Metric],
                "group" => vec![Suite::Group],
                "action" => vec![Suite::Action],
                "collapse" => vec![Suite::Collapse],
                "all" => Suite::all().to_vec(),
                other => {
                    return Err(CmdError::Parse(format!(
                        "unknown suite `{}` (metric|group|action|collapse|all)",
                        other
                    )))
                }
            };
            let mut failed = false;
            for suite in suites {
                let report = run_suite(suite, samples, seed);
                print_report(&report);
                failed |= !report.passed();
            }
            Ok(if failed { EXIT_INVARIANT } else { EXIT_OK })
        }
    }
}

fn print_report(report: &VerifyReport) {
    // timing goes to stderr so stdout is byte-identical across runs
    println!(
        "suite {}: {} samples, seed {}, {}",
        report.suite,
        report.samples_run,
        report.seed,
        if report.passed() { "ok" } else { "FAILED" }
    );
    eprintln!("suite {}: {:?}", report.suite, report.elapsed);
    for f in &report.failures {
        println!("  failed property: {}", f.property);
        println!("  counterexample: {}", f.counterexample);
    }
}

fn point_arg(text: &str) -> Result<PointAddress, CmdError> {
    parse_point(text).map_err(|e| CmdError::Parse(format!("in `{}`: {}", text, e)))
}

fn rat_arg(text: &str) -> Result<Rat, CmdError> {
    text.parse()
        .map_err(|_| CmdError::Parse(format!("bad rational `{}`", text)))
}

/// Element argument: a file path, or inline JSON when it starts with `{`.
fn element_arg(text: &str) -> Result<TowerElement, CmdError> {
    let json = if text.trim_start().starts_with('{') {
        text.to_string()
    } else {
        std::fs::read_to_string(text)
            .map_err(|e| CmdError::Parse(format!("cannot read `{}`: {}", text, e)))?
    };
    Ok(TowerElement::from_json_str(json.trim())?)
}

/// Splits "x,y" at the top-level comma (point literals contain commas of
/// their own inside parentheses).
fn split_pair(text: &str) -> Result<(&str, &str), CmdError> {
    let mut depth = 0usize;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => return Ok((&text[..i], &text[i + 1..])),
            _ => {}
        }
    }
    Err(CmdError::Parse(format!(
        "expected `x,y` with a top-level comma in `{}`",
        text
    )))
}

fn fan_arg(args: &FanArgs) -> Result<FanId, CmdError> {
    let (x, y) = split_pair(&args.pair)?;
    let x = point_arg(x)?;
    let y = point_arg(y)?;
    FanId::new((x, y), args.level).map_err(|e| CmdError::Semantic(e.to_string()))
}

fn fixed_set(path: Option<&std::path::Path>) -> Result<Vec<PointAddress>, CmdError> {
    let Some(path) = path else {
        return Ok(Vec::new());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CmdError::Parse(format!("cannot read `{}`: {}", path.display(), e)))?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(point_arg)
        .collect()
}

/// Oracle spec: `dist:<point>`, `table:<file>`, or `const:<rational>`.
fn oracle_arg(text: &str) -> Result<FunctionOracle, CmdError> {
    let (kind, rest) = text
        .split_once(':')
        .ok_or_else(|| CmdError::Parse(format!("bad oracle spec `{}`", text)))?;
    match kind {
        "dist" => Ok(FunctionOracle::norm_dist_to(point_arg(rest)?)),
        "const" => Ok(FunctionOracle::constant(rat_arg(rest)?)?),
        "table" => {
            let body = std::fs::read_to_string(rest)
                .map_err(|e| CmdError::Parse(format!("cannot read `{}`: {}", rest, e)))?;
            let json: TableJson = serde_json::from_str(&body)
                .map_err(|e| CmdError::Parse(format!("bad table file: {}", e)))?;
            let mut entries = BTreeMap::new();
            for (p, v) in json.entries {
                entries.insert(point_arg(&p)?, rat_arg(&v)?);
            }
            Ok(FunctionOracle::table(entries, rat_arg(&json.default)?)?)
        }
        other => Err(CmdError::Parse(format!(
            "unknown oracle kind `{}` (dist|table|const)",
            other
        ))),
    }
}

#[derive(serde::Deserialize)]
struct TableJson {
    default: String,
    entries: Vec<(String, String)>,
}

fn emit(path: Option<&std::path::Path>, content: &str) -> Result<(), CmdError> {
    match path {
        None => {
            println!("{}", content);
            Ok(())
        }
        Some(path) => {
            let mut file = std::fs::File::create(path).map_err(|e| {
                CmdError::Parse(format!("cannot write `{}`: {}", path.display(), e))
            })?;
            writeln!(file, "{}", content).map_err(|e| {
                CmdError::Parse(format!("cannot write `{}`: {}", path.display(), e))
            })?;
            Ok(())
        }
    }
}
