//! Command-line front door: play games, generate CSV tables, query oracles.
//!
//! Exit codes: 0 expected outcome, 1 unexpected game outcome, 2 usage
//! error, 3 budget exceeded.

use std::collections::BTreeSet;
use std::io::{BufRead, Write as _};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use diag_games::cantor::{self, QueryPlan};
use diag_games::core::{
    BinaryVector, Claim, GameError, GameParams, Query, Regime,
};
use diag_games::engine::{
    self, Adversary, CantorStrategy, Scenario, ScriptedScan, StrategyStep, Winner,
};
use diag_games::kronecker::{
    AllZerosAdversary, BalancedAdversary, CoveringAdversary, RandomAdversary,
    ZeroFirstAdversary,
};
use diag_games::oracle;

#[derive(Parser)]
#[command(name = "diag-games", version, about = "Cantor-Kronecker diagonalization games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play one game and judge the outcome.
    Play(PlayArgs),
    /// Print a CSV experiment table over ranges of (n, m).
    Table(TableArgs),
    /// Query an exact oracle directly.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct PlayArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    /// Cantor side: diagonal | adaptive | oblivious | endgame | scan | manual
    #[arg(long)]
    cantor: CantorChoice,
    /// Kronecker side: balanced | covering | zero-first | manual | random:SEED
    #[arg(long)]
    kronecker: String,
    /// Default seed for `random` without an explicit `:SEED`.
    #[arg(long, env = "DIAG_GAMES_SEED")]
    seed: Option<u64>,
    /// Write the transcript as JSON to this path.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CantorChoice {
    Diagonal,
    Adaptive,
    Oblivious,
    Endgame,
    /// Full row-major scan ending in a decision claim (regime m >= 2^n).
    Scan,
    Manual,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long)]
    scenario: Scenario,
    /// Inclusive range, e.g. `3..6` or a single value `4`.
    #[arg(long, value_parser = parse_range)]
    n_range: (usize, usize),
    #[arg(long, value_parser = parse_range)]
    m_range: (usize, usize),
    /// Worker threads for the parallel build (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Args)]
struct OracleArgs {
    /// g | f | covering | edge-matching | cube-cover
    #[arg(long)]
    which: Oracle,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: Option<usize>,
    /// Covering plan, 1-based columns: rows separated by `;`, e.g. `1,2;3`.
    #[arg(long)]
    plan: Option<String>,
    /// Edge directions, 1-based, e.g. `1,2,2`.
    #[arg(long)]
    dirs: Option<String>,
    /// Cube column sets, 1-based, rows separated by `;`, e.g. `1;2,3`.
    #[arg(long)]
    sets: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Oracle {
    G,
    F,
    Covering,
    EdgeMatching,
    CubeCover,
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    if let Some((lo, hi)) = s.split_once("..") {
        let lo = lo.trim().parse().map_err(|e| format!("{e}"))?;
        let hi = hi.trim().parse().map_err(|e| format!("{e}"))?;
        if lo > hi {
            return Err(format!("empty range {s}"));
        }
        Ok((lo, hi))
    } else {
        let v = s.trim().parse().map_err(|e| format!("{e}"))?;
        Ok((v, v))
    }
}

/// Parses `1,2;3` into 0-based per-row column sets.
fn parse_row_sets(s: &str) -> Result<Vec<BTreeSet<usize>>, String> {
    s.split(';')
        .map(|row| {
            row.split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| {
                    let j: usize = t.trim().parse().map_err(|e| format!("{e}"))?;
                    if j == 0 {
                        return Err("columns are 1-based".to_string());
                    }
                    Ok(j - 1)
                })
                .collect()
        })
        .collect()
}

fn parse_dirs(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let j: usize = t.trim().parse().map_err(|e| format!("{e}"))?;
            if j == 0 {
                return Err("directions are 1-based".to_string());
            }
            Ok(j - 1)
        })
        .collect()
}

fn parse_bits(s: &str, n: usize) -> Result<BinaryVector, String> {
    let s = s.trim();
    if s.len() != n || !s.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(format!("expected {n} bits of 0/1, got `{s}`"));
    }
    let bits: Vec<u8> = s.bytes().map(|b| b - b'0').collect();
    Ok(BinaryVector::from_bits(&bits))
}

fn prompt(msg: &str) -> String {
    eprint!("{msg}");
    std::io::stderr().flush().ok();
    let mut line = String::new();
    std::io::stdin()
        .lock()
        .read_line(&mut line)
        .expect("read stdin");
    line.trim().to_string()
}

/// Interactive Cantor: `q I J` queries (1-based), `claim BITS` makes a
/// search claim, `complete` / `incomplete [BITS]` make decision claims.
struct ManualCantor {
    params: GameParams,
}

impl CantorStrategy for ManualCantor {
    fn next(&mut self) -> StrategyStep {
        loop {
            let line = prompt("cantor> ");
            let mut it = line.split_whitespace();
            match it.next() {
                Some("q") => {
                    let parse = |t: Option<&str>| t.and_then(|t| t.parse::<usize>().ok());
                    match (parse(it.next()), parse(it.next())) {
                        (Some(i), Some(j)) if i >= 1 && j >= 1 => {
                            return StrategyStep::Query(Query::new(i - 1, j - 1));
                        }
                        _ => eprintln!("usage: q ROW COL (1-based)"),
                    }
                }
                Some("claim") => match it.next().map(|s| parse_bits(s, self.params.n())) {
                    Some(Ok(v)) => return StrategyStep::Claim(Claim::Search(v)),
                    _ => eprintln!("usage: claim BITS"),
                },
                Some("complete") => {
                    return StrategyStep::Claim(Claim::Decision {
                        complete: true,
                        witness: None,
                    });
                }
                Some("incomplete") => {
                    let witness = match it.next() {
                        None => None,
                        Some(s) => match parse_bits(s, self.params.n()) {
                            Ok(v) => Some(v),
                            Err(e) => {
                                eprintln!("{e}");
                                continue;
                            }
                        },
                    };
                    return StrategyStep::Claim(Claim::Decision {
                        complete: false,
                        witness,
                    });
                }
                _ => eprintln!("commands: q ROW COL | claim BITS | complete | incomplete [BITS]"),
            }
        }
    }

    fn observe(&mut self, answer: u8) {
        eprintln!("answer: {answer}");
    }
}

/// Interactive Kronecker: answers each displayed query with 0 or 1.
struct ManualAdversary;

impl Adversary for ManualAdversary {
    fn observe_plan(&mut self, plan: &QueryPlan) {
        eprintln!("plan ({} queries):", plan.total_size());
        for (row, cols) in plan.rows().iter().enumerate() {
            let cols: Vec<String> = cols.iter().map(|c| (c + 1).to_string()).collect();
            eprintln!("  row {}: cols {}", row + 1, cols.join(","));
        }
    }

    fn answer(&mut self, q: Query) -> u8 {
        loop {
            match prompt(&format!("L[{},{}]? ", q.row + 1, q.col + 1)).as_str() {
                "0" => return 0,
                "1" => return 1,
                _ => eprintln!("answer 0 or 1"),
            }
        }
    }
}

enum KroneckerChoice {
    Balanced,
    Covering,
    ZeroFirst,
    Manual,
    Random(Option<u64>),
}

fn parse_kronecker(s: &str) -> Result<KroneckerChoice, String> {
    match s {
        "balanced" => Ok(KroneckerChoice::Balanced),
        "covering" => Ok(KroneckerChoice::Covering),
        "zero-first" | "zero_first" => Ok(KroneckerChoice::ZeroFirst),
        "manual" => Ok(KroneckerChoice::Manual),
        "random" => Ok(KroneckerChoice::Random(None)),
        other => match other.strip_prefix("random:") {
            Some(seed) => seed
                .parse()
                .map(|s| KroneckerChoice::Random(Some(s)))
                .map_err(|e| format!("bad seed: {e}")),
            None => Err(format!("unknown adversary `{other}`")),
        },
    }
}

fn build_adversary(
    choice: &KroneckerChoice,
    params: GameParams,
    default_seed: Option<u64>,
) -> Result<(Box<dyn Adversary>, Option<u64>), GameError> {
    Ok(match choice {
        KroneckerChoice::Balanced => (Box::new(BalancedAdversary::new(params.n())), None),
        KroneckerChoice::Covering => (Box::new(CoveringAdversary::new()), None),
        KroneckerChoice::ZeroFirst => {
            if params.regime() == Regime::Large {
                (Box::new(ZeroFirstAdversary::new(params)?), None)
            } else {
                (Box::new(AllZerosAdversary), None)
            }
        }
        KroneckerChoice::Manual => (Box::new(ManualAdversary), None),
        KroneckerChoice::Random(seed) => {
            let seed = seed.or(default_seed).unwrap_or(0);
            (Box::new(RandomAdversary::new(seed)), Some(seed))
        }
    })
}

fn cmd_play(args: &PlayArgs) -> Result<u8, GameError> {
    let params = GameParams::new(args.m, args.n)?;
    let choice = parse_kronecker(&args.kronecker)
        .map_err(GameError::Transcript)?;
    let (mut adv, seed) = build_adversary(&choice, params, args.seed)?;

    let mut transcript = match args.cantor {
        CantorChoice::Diagonal => {
            let mut s = cantor::DiagonalStrategy::new(params)?;
            engine::play_adaptive(&mut s, adv.as_mut(), params)?
        }
        CantorChoice::Adaptive => {
            let mut s = cantor::AdaptiveStrategy::new(params)?;
            engine::play_adaptive(&mut s, adv.as_mut(), params)?
        }
        CantorChoice::Oblivious | CantorChoice::Endgame => {
            let plan = if args.cantor == CantorChoice::Endgame {
                cantor::endgame_plan(params)?
            } else {
                cantor::oblivious_plan(params)?
            };
            engine::play_oblivious(
                &plan,
                |plan, board| Ok(Claim::Search(cantor::oblivious_output(plan, board)?)),
                adv.as_mut(),
                params,
            )?
        }
        CantorChoice::Scan => {
            params.require_regime("scan strategy", Regime::Large)?;
            let mut s = ScriptedScan::sequential(params);
            engine::play_adaptive(&mut s, adv.as_mut(), params)?
        }
        CantorChoice::Manual => {
            let mut s = ManualCantor { params };
            engine::play_adaptive(&mut s, adv.as_mut(), params)?
        }
    };
    transcript.seed = seed;

    let winner = match transcript.claim {
        Claim::Search(_) => engine::judge_search(&transcript)?,
        Claim::Decision { .. } => engine::judge_decision(&transcript)?,
    };
    println!("queries: {}", transcript.events.len());
    match &transcript.claim {
        Claim::Search(v) => println!("claim: search {v}"),
        Claim::Decision { complete, witness } => match witness {
            Some(w) => println!("claim: decision complete={complete} witness={w}"),
            None => println!("claim: decision complete={complete}"),
        },
    }
    println!("winner: {winner}");
    if let Some(path) = &args.out {
        std::fs::write(path, transcript.to_json())
            .map_err(|e| GameError::Transcript(format!("write {}: {e}", path.display())))?;
    }
    Ok(if winner == Winner::Cantor { 0 } else { 1 })
}

fn cmd_table(args: &TableArgs) -> Result<u8, GameError> {
    #[cfg(feature = "parallel")]
    if args.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(args.jobs)
            .build_global()
            .map_err(|e| GameError::Transcript(format!("thread pool: {e}")))?;
    }
    let rows = engine::table(args.scenario, args.n_range, args.m_range)?;
    print!("{}", engine::to_csv(&rows));
    Ok(0)
}

fn show_covering(result: Option<diag_games::kronecker::CoveringAssignment>) {
    match result {
        None => println!("none"),
        Some(a) => {
            println!("covering assignment:");
            for (row, cells) in a.rows().iter().enumerate() {
                let cells: Vec<String> = cells
                    .iter()
                    .map(|(j, b)| format!("{}={b}", j + 1))
                    .collect();
                println!("  row {}: {}", row + 1, cells.join(", "));
            }
        }
    }
}

fn cmd_oracle(args: &OracleArgs) -> Result<u8, GameError> {
    let usage = |msg: &str| GameError::Transcript(msg.to_string());
    match args.which {
        Oracle::G => {
            let m = args.m.ok_or_else(|| usage("--which g needs --m"))?;
            let params = GameParams::new(m, args.n)?;
            println!("{}", oracle::adaptive_game_value(params)?);
        }
        Oracle::F => {
            let m = args.m.ok_or_else(|| usage("--which f needs --m"))?;
            let params = GameParams::new(m, args.n)?;
            println!("{}", oracle::oblivious_game_value(params)?);
        }
        Oracle::Covering => {
            let spec = args
                .plan
                .as_deref()
                .ok_or_else(|| usage("--which covering needs --plan"))?;
            let rows = parse_row_sets(spec).map_err(|e| usage(&e))?;
            let plan = QueryPlan::new(args.n, rows)?;
            show_covering(oracle::covering_exists(&plan)?);
        }
        Oracle::EdgeMatching => {
            let spec = args
                .dirs
                .as_deref()
                .ok_or_else(|| usage("--which edge-matching needs --dirs"))?;
            let dirs = parse_dirs(spec).map_err(|e| usage(&e))?;
            match oracle::edge_matching(&dirs, args.n)? {
                Some(edges) => {
                    for (dir, (a, b)) in edges {
                        println!("dir {}: {a} -- {b}", dir + 1);
                    }
                }
                None => {
                    // A perfect matching needs every direction multiplicity
                    // even; flag that obstruction when it applies.
                    let half = 1usize << (args.n - 1);
                    let odd = (0..args.n).any(|d| {
                        dirs.iter().filter(|&&x| x == d).count() % 2 == 1
                    });
                    if dirs.len() == half && odd {
                        println!("none (parity)");
                    } else {
                        println!("none");
                    }
                }
            }
        }
        Oracle::CubeCover => {
            let spec = args
                .sets
                .as_deref()
                .ok_or_else(|| usage("--which cube-cover needs --sets"))?;
            let sets = parse_row_sets(spec).map_err(|e| usage(&e))?;
            match oracle::cube_cover_search(&sets, args.n)? {
                Some(cubes) => {
                    let d: usize = sets.iter().map(|s| s.len()).sum();
                    println!("cover of >= {} vertices:", d + sets.len());
                    for (i, verts) in cubes.iter().enumerate() {
                        let verts: Vec<String> =
                            verts.iter().map(|v| v.to_string()).collect();
                        println!("  cube {}: {}", i + 1, verts.join(" "));
                    }
                }
                None => {
                    println!(
                        "NONE -- no placement reaches d + q vertices; \
                         potential counterexample, please report"
                    );
                }
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Play(args) => cmd_play(args),
        Command::Table(args) => cmd_table(args),
        Command::Oracle(args) => cmd_oracle(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                GameError::BudgetExceeded(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
