//! Command-line front end: `solve`, `typespace` and `corpus`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::capacity::Capacity;
use crate::corpus::{run_corpus, CorpusConfig};
use crate::extended::{ExtendedError, ExtendedGame, Level};
use crate::game::{parse_game, GameError, ProductSet, StrategicGame};
use crate::solver::{
    choquet_rationalizable_with, classical_rationalizability, AttitudeRestriction, RestrictionError, Shape,
    SolveOptions, SolveReport, SolverError,
};
use crate::types::{build_witness_space, parse_type_space, CapacityTypeSpace, TypeSpaceError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_SIZE_CAP: i32 = 2;
pub const EXIT_FAILURE: i32 = 3;
pub const EXIT_EMPTY: i32 = 10;

#[derive(Parser, Debug)]
#[command(name = "choquet", version, about = "Choquet rationalizability for finite games")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Iterate Choquet rationalizability on a game file.
    Solve(SolveArgs),
    /// Run the belief operator on a capacity type space.
    Typespace(TypespaceArgs),
    /// Check every property on seeded random games.
    Corpus(CorpusArgs),
}

#[derive(Args, Debug)]
pub struct Common {
    /// Output layout.
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    pub game: PathBuf,
    /// Attitude restriction: any, add, conv, conc, optionally with +na, or
    /// a comma-separated list with one entry per player.
    #[arg(long = "r", default_value = "any")]
    pub restriction: String,
    #[arg(long, value_enum, default_value_t = Route::Direct)]
    pub route: Route,
    /// Level cap, or `inf`.
    #[arg(long, default_value = "inf", value_parser = parse_levels)]
    pub levels: LevelCap,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct TypespaceArgs {
    pub game: PathBuf,
    /// Type-space file; without one the witness space is built.
    pub types: Option<PathBuf>,
    #[arg(long, default_value = "inf", value_parser = parse_levels)]
    pub levels: LevelCap,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct CorpusArgs {
    #[arg(long, default_value_t = 200)]
    pub count: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 2)]
    pub min_actions: usize,
    #[arg(long, default_value_t = 3)]
    pub max_actions: usize,
    #[arg(long, default_value_t = -5, allow_hyphen_values = true)]
    pub payoff_min: i64,
    #[arg(long, default_value_t = 5, allow_hyphen_values = true)]
    pub payoff_max: i64,
    /// Grid bound for the never-best-response check; 0 skips it.
    #[arg(long, default_value_t = 16)]
    pub denbound: u32,
    #[arg(long, default_value_t = 5)]
    pub capacities: usize,
    #[arg(long, default_value_t = 1)]
    pub type_spaces: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Route {
    Direct,
    Extended,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Structured,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelCap(pub Option<usize>);

fn parse_levels(s: &str) -> Result<LevelCap, String> {
    if s == "inf" {
        return Ok(LevelCap(None));
    }
    s.parse::<usize>()
        .map(|k| LevelCap(Some(k)))
        .map_err(|_| format!("expected a level count or `inf`, got `{s}`"))
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Game { path: String, source: GameError },
    #[error("{path}: {source}")]
    TypeSpace { path: String, source: TypeSpaceError },
    #[error(transparent)]
    Restriction(#[from] RestrictionError),
    #[error("the extended route covers only the unrestricted attitude, got `{0}`")]
    RouteRestriction(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Extended(#[from] ExtendedError),
    #[error(transparent)]
    Types(#[from] TypeSpaceError),
    #[error("payoff range {0}..{1} is empty")]
    PayoffRange(i64, i64),
    #[error("action range {0}..{1} is empty")]
    ActionRange(usize, usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Solver(SolverError::SizeCap { .. })
            | CliError::Extended(ExtendedError::SizeCap { .. })
            | CliError::Game {
                source: GameError::TooManyProfiles { .. },
                ..
            }
            | CliError::TypeSpace {
                source: TypeSpaceError::TooManyProfiles { .. },
                ..
            }
            | CliError::Types(TypeSpaceError::TooManyProfiles { .. }) => EXIT_SIZE_CAP,
            CliError::Solver(_) | CliError::Extended(_) | CliError::Types(_) => EXIT_FAILURE,
            _ => EXIT_PARSE,
        }
    }
}

/// Report text plus exit status.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub text: String,
    pub status: i32,
    /// True when `text` is a diagnostic rather than a report.
    pub is_error: bool,
}

/// Parses `args` and runs the command; usage errors exit with
/// [`EXIT_PARSE`].
pub fn run_from<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let status = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            Outcome {
                text: e.render().to_string(),
                status,
                is_error: status != EXIT_OK,
            }
        }
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let (common, result) = match &cli.command {
        Command::Solve(args) => (&args.common, cmd_solve(args)),
        Command::Typespace(args) => (&args.common, cmd_typespace(args)),
        Command::Corpus(args) => (&args.common, cmd_corpus(args)),
    };
    let outcome = match result {
        Ok((report, status)) => Outcome {
            text: report.render(common.format),
            status,
            is_error: false,
        },
        Err(e) => {
            return Outcome {
                status: e.exit_code(),
                text: format!("error: {e}\n"),
                is_error: true,
            }
        }
    };
    if let Some(path) = &common.out {
        if let Err(source) = std::fs::write(path, &outcome.text) {
            let e = CliError::Io {
                path: path.display().to_string(),
                source,
            };
            return Outcome {
                status: e.exit_code(),
                text: format!("error: {e}\n"),
                is_error: true,
            };
        }
        return Outcome {
            text: String::new(),
            status: outcome.status,
            is_error: false,
        };
    }
    outcome
}

/// A report is a sequence of tables and notes. Table mode aligns columns;
/// structured mode writes one tab-separated `key=value` record per row, so
/// both carry exactly the same content.
#[derive(Clone, Debug, Default)]
pub struct Report {
    items: Vec<Item>,
}

#[derive(Clone, Debug)]
enum Item {
    Table {
        name: String,
        header: Vec<String>,
        rows: Vec<Vec<String>>,
    },
    Note(String, String),
}

impl Report {
    fn table(&mut self, name: &str, header: &[&str], rows: Vec<Vec<String>>) {
        self.items.push(Item::Table {
            name: name.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows,
        });
    }

    fn note(&mut self, key: &str, value: impl Into<String>) {
        self.items.push(Item::Note(key.into(), value.into()));
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        for item in &self.items {
            match (item, format) {
                (Item::Note(k, v), Format::Table) => {
                    let _ = writeln!(out, "{k}: {v}");
                }
                (Item::Note(k, v), Format::Structured) => {
                    let _ = writeln!(out, "{}={v}", k.replace(' ', "_"));
                }
                (Item::Table { name, header, rows }, Format::Table) => {
                    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
                    for row in rows {
                        for (w, cell) in widths.iter_mut().zip(row) {
                            *w = (*w).max(cell.chars().count());
                        }
                    }
                    let line = |cells: &[String]| -> String {
                        let padded: Vec<String> = cells
                            .iter()
                            .zip(&widths)
                            .map(|(c, &w)| format!("{c:<w$}"))
                            .collect();
                        padded.join("  ").trim_end().to_string()
                    };
                    let _ = writeln!(out, "{name}");
                    let _ = writeln!(out, "{}", line(header));
                    for row in rows {
                        let _ = writeln!(out, "{}", line(row));
                    }
                    let _ = writeln!(out);
                }
                (Item::Table { name, header, rows }, Format::Structured) => {
                    for row in rows {
                        let fields: Vec<String> =
                            header.iter().zip(row).map(|(h, c)| format!("{h}={c}")).collect();
                        let _ = writeln!(out, "{name}\t{}", fields.join("\t"));
                    }
                }
            }
        }
        out
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load_game(path: &Path) -> Result<StrategicGame, CliError> {
    parse_game(&read(path)?).map_err(|source| CliError::Game {
        path: path.display().to_string(),
        source,
    })
}

fn set_text(game: &StrategicGame, i: usize, actions: &[usize]) -> String {
    game.format_actions(i, actions)
}

fn inline_capacity(cap: &Capacity) -> String {
    cap.to_text().lines().collect::<Vec<_>>().join("; ")
}

fn level_rows(game: &StrategicGame, levels: &[ProductSet]) -> Vec<Vec<String>> {
    levels
        .iter()
        .enumerate()
        .map(|(k, level)| {
            std::iter::once(k.to_string())
                .chain((0..game.num_players()).map(|i| set_text(game, i, level.player(i))))
                .collect()
        })
        .collect()
}

fn level_header(game: &StrategicGame) -> Vec<&str> {
    std::iter::once("level")
        .chain(game.player_names().iter().map(String::as_str))
        .collect()
}

fn limit_notes(report: &mut Report, game: &StrategicGame, key: &str, limit: &ProductSet) {
    for i in 0..game.num_players() {
        report.note(
            &format!("{key} {}", game.player_name(i)),
            set_text(game, i, limit.player(i)),
        );
    }
}

fn cmd_solve(args: &SolveArgs) -> Result<(Report, i32), CliError> {
    let game = load_game(&args.game)?;
    let restriction = AttitudeRestriction::parse(&args.restriction, game.num_players())?;
    if args.route == Route::Extended && !restriction.is_unrestricted() {
        return Err(CliError::RouteRestriction(restriction.to_string()));
    }
    let mut report = Report::default();
    report.note("restriction", restriction.to_string());
    report.note("route", format!("{:?}", args.route).to_lowercase());
    let mut status = EXIT_OK;

    let direct = if args.route == Route::Extended {
        None
    } else {
        let options = SolveOptions {
            max_levels: args.levels.0,
            ..SolveOptions::default()
        };
        let solved = choquet_rationalizable_with(&game, &restriction, options)?;
        direct_tables(&mut report, &game, &solved);
        if !solved.empty_players().is_empty() {
            status = EXIT_EMPTY;
        }
        Some(solved)
    };

    let second: Option<(&str, Vec<ProductSet>)> = match args.route {
        Route::Direct => None,
        _ if restriction.is_unrestricted() => Some(("extended", extended_tables(&mut report, &game, args.levels)?)),
        _ if (0..game.num_players()).all(|i| {
            let r = restriction.player(i);
            r.shape == Shape::Additive && !r.non_additive
        }) =>
        {
            let levels = classical_rationalizability(&game)?;
            report.table("classical levels", &level_header(&game), level_rows(&game, &levels));
            Some(("classical", levels))
        }
        _ => return Err(CliError::RouteRestriction(restriction.to_string())),
    };

    if let (Some(direct), Some((name, levels))) = (&direct, &second) {
        let depth = (direct.levels.len()).max(levels.len());
        let at = |k: usize| &levels[k.min(levels.len() - 1)];
        let mismatch = (0..depth).find(|&k| direct.level(k) != at(k));
        match mismatch {
            None => report.note("verdict", "CONSISTENT"),
            Some(k) => {
                report.note("verdict", format!("INCONSISTENT at level {k} (direct vs {name})"));
                status = EXIT_FAILURE;
            }
        }
    }
    Ok((report, status))
}

fn direct_tables(report: &mut Report, game: &StrategicGame, solved: &SolveReport) {
    let levels: Vec<ProductSet> = solved.levels.iter().map(|l| l.survivors.clone()).collect();
    report.table("direct levels", &level_header(game), level_rows(game, &levels));
    let witnesses = solved
        .levels
        .iter()
        .enumerate()
        .skip(1)
        .flat_map(|(k, level)| {
            level.witnesses.iter().enumerate().flat_map(move |(i, ws)| {
                ws.iter().map(move |(a, cap)| {
                    vec![
                        k.to_string(),
                        game.player_name(i).to_string(),
                        game.action_label(i, *a).to_string(),
                        inline_capacity(cap),
                    ]
                })
            })
        })
        .collect();
    report.table("witnesses", &["level", "player", "action", "capacity"], witnesses);
    if solved.truncated {
        report.note("stopped at level", (solved.levels.len() - 1).to_string());
    } else {
        report.note("fixed point at level", solved.fixed_point_index.to_string());
    }
    limit_notes(report, game, "limit", solved.limit());
    for i in solved.empty_players() {
        if let Some(k) = solved.empty_from(i) {
            report.note(&format!("empty {}", game.player_name(i)), format!("from level {k}"));
        }
    }
}

/// Adds the extended-route tables and returns the projected levels.
fn extended_tables(report: &mut Report, game: &StrategicGame, cap: LevelCap) -> Result<Vec<ProductSet>, CliError> {
    let ext = ExtendedGame::build(game)?;
    let trace = ext.iesda()?;
    let last = cap.0.map_or(trace.levels.len() - 1, |k| k.min(trace.levels.len() - 1));
    let mut rows = Vec::new();
    let mut projected = Vec::new();
    for k in 0..=last {
        let level = &trace.levels[k];
        let mut row = vec![k.to_string()];
        for i in 0..game.num_players() {
            let sets: Vec<String> = level.sets[i].iter().map(|&m| ext.format_mask(i, m)).collect();
            row.push(sets.join(" "));
        }
        rows.push(row);
        projected.push(trace.project_to_actions(Level::At(k))?.actions);
    }
    report.table("extended levels", &level_header(game), rows);
    let certificates = trace
        .eliminations
        .iter()
        .enumerate()
        .take(last + 1)
        .flat_map(|(k, es)| {
            let ext = &ext;
            es.iter().map(move |e| {
                vec![
                    k.to_string(),
                    game.player_name(e.player).to_string(),
                    ext.format_mask(e.player, e.candidate),
                    e.certificate.describe(game),
                ]
            })
        })
        .collect();
    report.table("eliminations", &["level", "player", "set", "certificate"], certificates);
    report.table("projected levels", &level_header(game), level_rows(game, &projected));
    limit_notes(report, game, "extended limit", &trace.project_to_actions(Level::Limit)?.actions);
    Ok(projected)
}

fn cmd_typespace(args: &TypespaceArgs) -> Result<(Report, i32), CliError> {
    let game = load_game(&args.game)?;
    let solved = choquet_rationalizable_with(&game, &AttitudeRestriction::unrestricted(game.num_players()), SolveOptions::default())?;
    let space: CapacityTypeSpace = match &args.types {
        Some(path) => parse_type_space(&game, &read(path)?).map_err(|source| CliError::TypeSpace {
            path: path.display().to_string(),
            source,
        })?,
        None => build_witness_space(&game, &solved)?,
    };
    let epistemic = space.bkcr_fixpoint()?;
    let mut report = Report::default();
    report.note("type space", if args.types.is_some() { "file" } else { "witness" });
    let last = args.levels.0.map_or(epistemic.levels.len() - 1, |k| k.min(epistemic.levels.len() - 1));
    let mut header = vec!["level"];
    let names: Vec<String> = game
        .player_names()
        .iter()
        .flat_map(|p| [format!("{p} types"), format!("{p} actions")])
        .collect();
    header.extend(names.iter().map(String::as_str));
    let rows = (0..=last)
        .map(|k| {
            let mut row = vec![k.to_string()];
            for i in 0..game.num_players() {
                let labels: Vec<&str> = epistemic.level(k)[i].iter().map(|&t| space.types(i)[t].as_str()).collect();
                row.push(format!("{{{}}}", labels.join(",")));
                row.push(set_text(&game, i, epistemic.projection(k).player(i)));
            }
            row
        })
        .collect();
    report.table("BkCR levels", &header, rows);
    report.note("CBCR at level", (epistemic.levels.len() - 1).to_string());
    limit_notes(&mut report, &game, "projection", epistemic.cbcr_projection());
    limit_notes(&mut report, &game, "limit", solved.limit());
    let violations = epistemic.soundness_violations(&solved);
    let sound = violations.is_empty();
    report.note(
        "soundness",
        if sound {
            "SUBSET holds".to_string()
        } else {
            format!("SUBSET fails at levels {violations:?}")
        },
    );
    let equal = epistemic.cbcr_projection() == solved.limit();
    report.note("verdict", if equal { "EQUAL" } else { "NOT EQUAL" });
    Ok((report, if sound { EXIT_OK } else { EXIT_FAILURE }))
}

fn cmd_corpus(args: &CorpusArgs) -> Result<(Report, i32), CliError> {
    if args.payoff_min > args.payoff_max {
        return Err(CliError::PayoffRange(args.payoff_min, args.payoff_max));
    }
    if args.min_actions == 0 || args.min_actions > args.max_actions {
        return Err(CliError::ActionRange(args.min_actions, args.max_actions));
    }
    let config = CorpusConfig {
        count: args.count,
        min_actions: args.min_actions,
        max_actions: args.max_actions,
        payoff_min: args.payoff_min,
        payoff_max: args.payoff_max,
        seed: args.seed,
        capacities_per_game: args.capacities,
        type_spaces_per_game: args.type_spaces,
        oracle_bound: args.denbound,
    };
    let summary = run_corpus(&config)?;
    let mut report = Report::default();
    report.note("seed", config.seed.to_string());
    report.note("games", summary.games.to_string());
    report.note(
        "actions",
        format!("{}..{}", config.min_actions, config.max_actions),
    );
    report.note("payoffs", format!("{}..{}", config.payoff_min, config.payoff_max));
    let rows = summary
        .properties
        .iter()
        .map(|p| {
            vec![
                p.name.to_string(),
                p.passed.to_string(),
                p.failed.to_string(),
                if p.failed == 0 { "pass" } else { "FAIL" }.to_string(),
            ]
        })
        .collect();
    report.table("properties", &["property", "passed", "failed", "verdict"], rows);
    for p in &summary.properties {
        if let Some(example) = &p.first_counterexample {
            report.note(&format!("counterexample {}", p.name), example.replace('\n', " | "));
        }
    }
    let ok = summary.all_passed();
    report.note("verdict", if ok { "PASS" } else { "FAIL" });
    Ok((report, if ok { EXIT_OK } else { EXIT_FAILURE }))
}
