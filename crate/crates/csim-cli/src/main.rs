use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use csim_cli::commands::{
    self, bench, render_bench_record, render_bench_text, render_solve_record, render_solve_text,
    render_table_check_record, render_table_check_text, solve, table_check, BenchOptions,
    ProbeOutcome, SolveOptions, SolveVerdict, StrategyChoice, TableCheckOptions,
};
use csim_cli::table::KnownValuesTable;
use csim_core::search::Budget;
use csim_core::Shape;

const EXIT_FOUND: u8 = 0;
const EXIT_NONEXISTENT: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_BAD_INPUT: u8 = 3;

/// Search for consistently signed intercalate matrices and the integer
/// sums-of-squares formulas they encode.
#[derive(Parser)]
#[command(name = "csim", version, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    V1,
    V2,
}

impl From<StrategyArg> for StrategyChoice {
    fn from(arg: StrategyArg) -> Self {
        match arg {
            StrategyArg::V1 => StrategyChoice::V1,
            StrategyArg::V2 => StrategyChoice::V2,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    /// Plain text.
    Text,
    /// A JSON record.
    Record,
}

#[derive(Clone, Copy)]
struct TypeArg {
    rows: usize,
    cols: usize,
    colors: usize,
}

impl FromStr for TypeArg {
    type Err = String;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(format!("expected `r,s,n`, found `{text}`"));
        }
        let parse = |p: &str| p.parse::<usize>().map_err(|_| format!("bad number `{p}`"));
        Ok(TypeArg { rows: parse(parts[0])?, cols: parse(parts[1])?, colors: parse(parts[2])? })
    }
}

#[derive(Args)]
struct BudgetArgs {
    /// Wall-clock limit per search, in seconds.
    #[arg(long, default_value_t = 600)]
    budget_seconds: u64,
    /// Node limit per search.
    #[arg(long, default_value_t = 100_000_000)]
    budget_nodes: u64,
}

impl BudgetArgs {
    fn budget(&self) -> Budget {
        Budget {
            max_nodes: Some(self.budget_nodes),
            max_wall: Some(Duration::from_secs(self.budget_seconds)),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Complete a matrix of the given type, or prove that none extends the
    /// starting constraints.
    Solve {
        /// Type as `r,s,n`.
        #[arg(long = "type")]
        type_: TypeArg,
        /// Partial input file in the matrix text format; defaults to the
        /// canonical starting assignments.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "v1")]
        strategy: StrategyArg,
        /// Minimum-signature file for strategy v2 (`color count` lines), or
        /// `default` for the built-in signature.
        #[arg(long)]
        signature: Option<String>,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
        /// Log one line per assignment/elimination of the initial
        /// propagation to stderr.
        #[arg(long)]
        trace: bool,
    },
    /// Time the search across types and strategies and check every verdict
    /// against the known-values table.
    Bench {
        /// Types as `r,s,n`, separated by `;` or repeated.
        #[arg(long, required = true, value_delimiter = ';')]
        types: Vec<TypeArg>,
        /// Strategies to run.
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [StrategyArg::V1, StrategyArg::V2])]
        strategies: Vec<StrategyArg>,
        #[arg(long, default_value_t = 10)]
        repeats: usize,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
    },
    /// Re-derive the known-values table: existence at the tabulated n and,
    /// for exact entries, nonexistence at n-1.
    TableCheck {
        #[arg(long, default_value_t = 9)]
        max_r: usize,
        #[arg(long, default_value_t = 9)]
        max_s: usize,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version print normally; malformed invocations exit
            // with the bad-input code.
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(EXIT_BAD_INPUT)
            } else {
                ExitCode::from(EXIT_FOUND)
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_BAD_INPUT)
        }
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Command::Solve { type_, input, strategy, signature, budget, format, trace } => {
            let input_text = match input {
                Some(path) => Some(
                    std::fs::read_to_string(&path)
                        .map_err(|e| format!("cannot read {}: {e}", path.display()))?,
                ),
                None => None,
            };
            let shape = Shape::new(type_.rows, type_.cols, type_.colors)
                .map_err(|e| e.to_string())?;
            let signature = match signature.as_deref() {
                None | Some("default") => None,
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| format!("cannot read {path}: {e}"))?;
                    Some(commands::parse_signature(&text, shape).map_err(|e| e.to_string())?)
                }
            };
            let report = solve(&SolveOptions {
                rows: type_.rows,
                cols: type_.cols,
                colors: type_.colors,
                input: input_text,
                strategy: strategy.into(),
                signature,
                budget: budget.budget(),
                trace,
            })
            .map_err(|e| e.to_string())?;

            for event in &report.trace {
                eprintln!("{event}");
            }
            match format {
                FormatArg::Text => print!("{}", render_solve_text(&report)),
                FormatArg::Record => println!("{}", render_solve_record(&report)),
            }
            if let SolveVerdict::Nonexistent { reason } = &report.verdict {
                eprintln!("reason: {reason}");
            }
            eprintln!(
                "nodes={} propagations={} eliminations={} wall_ms={:.3}",
                report.stats.nodes,
                report.stats.propagations,
                report.stats.eliminations,
                report.stats.wall.as_secs_f64() * 1e3
            );
            Ok(match report.verdict {
                SolveVerdict::Found { .. } => EXIT_FOUND,
                SolveVerdict::Nonexistent { .. } => EXIT_NONEXISTENT,
                SolveVerdict::BudgetExhausted => EXIT_BUDGET,
            })
        }
        Command::Bench { types, strategies, repeats, budget, format } => {
            let options = BenchOptions {
                types: types.iter().map(|t| (t.rows, t.cols, t.colors)).collect(),
                strategies: strategies.iter().map(|&s| s.into()).collect(),
                repeats,
                budget: budget.budget(),
            };
            let cells =
                bench(&options, KnownValuesTable::embedded()).map_err(|e| e.to_string())?;
            match format {
                FormatArg::Text => print!("{}", render_bench_text(&cells)),
                FormatArg::Record => println!("{}", render_bench_record(&cells)),
            }
            let mismatch = cells.iter().any(|cell| cell.matches == Some(false));
            Ok(if mismatch { EXIT_NONEXISTENT } else { EXIT_FOUND })
        }
        Command::TableCheck { max_r, max_s, budget, format } => {
            let options = TableCheckOptions { max_r, max_s, budget: budget.budget() };
            let cells =
                table_check(&options, KnownValuesTable::embedded()).map_err(|e| e.to_string())?;
            match format {
                FormatArg::Text => print!("{}", render_table_check_text(&cells)),
                FormatArg::Record => println!("{}", render_table_check_record(&cells)),
            }
            let failed = cells.iter().any(|cell| {
                matches!(cell.existence, ProbeOutcome::Fail { .. })
                    || matches!(cell.nonexistence, Some(ProbeOutcome::Fail { .. }))
            });
            Ok(if failed { EXIT_NONEXISTENT } else { EXIT_FOUND })
        }
    }
}
