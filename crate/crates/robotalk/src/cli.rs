//! Command-line front end.
//!
//! Three subcommands, all scriptable through exit codes alone:
//!
//! * `simulate` — run a scenario config, write the transcript, print a
//!   per-robot completion summary. Exit 0 on full completion, 2 when the
//!   tick limit cut the run short, 1 on a bad config.
//! * `experiment wake-word|mode|lexicon` — Monte-Carlo sweeps written as
//!   CSV. Exit 1 on invalid flags.
//! * `validate-tables` — check the shipped pronunciation and confusion data
//!   files against the reference rows. Exit 1 listing any mismatch.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::channel::ChannelModel;
use crate::phonetics::{reference, ConfusionTable, PronunciationTable};
use crate::sim::{
    lexicon_ablation, mode_experiment, run_scenario, wake_word_experiment, write_trials_csv,
    AblationParams, ModeParams, RunOutcome, Scenario, ScenarioMode, TrialResult, WakeWordParams,
};
use crate::tasks::TaskStatus;

#[derive(Parser)]
#[command(
    name = "robotalk",
    about = "Verbal robot-to-robot coordination: simulate scenarios and run channel experiments",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario config and write its transcript and summary.
    Simulate(SimulateArgs),
    /// Run a Monte-Carlo experiment and write CSV results.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
    /// Check the shipped data tables against the reference rows.
    ValidateTables(ValidateArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Path to the scenario config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Override the config's random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the transcript here instead of stdout.
    #[arg(long)]
    transcript: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ExperimentCommand {
    /// Wake-word detection rate vs distance.
    WakeWord(WakeWordArgs),
    /// Full coordination exchanges vs initial distance.
    Mode(ModeArgs),
    /// Maximum distance sustaining command recognition, with and without
    /// the alternative-phrase lexicon.
    Lexicon(LexiconArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// Smallest distance (cm).
    #[arg(long, default_value_t = 10.0)]
    min: f64,
    /// Largest distance (cm).
    #[arg(long, default_value_t = 300.0)]
    max: f64,
    /// Distance step (cm).
    #[arg(long, default_value_t = 10.0)]
    step: f64,
    /// Trials per distance point.
    #[arg(long, default_value_t = 20)]
    trials: u32,
    /// Ambient noise level (dB).
    #[arg(long = "noise-db", default_value_t = 20)]
    noise_db: i32,
    /// Root random seed; echoed into the CSV header.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Compute distance points on up to N threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct WakeWordArgs {
    #[command(flatten)]
    sweep: SweepArgs,
    /// Wake-word phrase.
    #[arg(long = "wake-word", default_value = "hey robot")]
    wake_word: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Coordinating,
    Volunteering,
}

#[derive(Args)]
struct ModeArgs {
    #[command(flatten)]
    sweep: SweepArgs,
    /// Which coordination pattern to exercise.
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// How far the volunteering robot drives away to execute (cm).
    #[arg(long = "away-travel", default_value_t = 50.0)]
    away_travel_cm: f64,
    /// Tick budget per trial.
    #[arg(long = "tick-limit", default_value_t = 600)]
    tick_limit: u64,
}

#[derive(Args)]
struct LexiconArgs {
    /// Recognition rate that must be sustained.
    #[arg(long = "p-target", default_value_t = 0.95)]
    p_target: f64,
    /// Transmissions per rate evaluation.
    #[arg(long, default_value_t = 2000)]
    trials: u32,
    /// Ambient noise level (dB).
    #[arg(long = "noise-db", default_value_t = 20)]
    noise_db: i32,
    /// Root random seed; echoed into the CSV header.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Per-keyword confusion probability at the delivery plateau.
    #[arg(long = "confusion-prob")]
    confusion_prob: Option<f64>,
    /// Upper end of the distance search (cm).
    #[arg(long = "max-distance", default_value_t = 400.0)]
    max_distance_cm: f64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    /// Pronunciation table file.
    #[arg(long, default_value = concat!(env!("CARGO_MANIFEST_DIR"), "/data/pronunciations.txt"))]
    pronunciations: PathBuf,
    /// Confusion table file.
    #[arg(long, default_value = concat!(env!("CARGO_MANIFEST_DIR"), "/data/confusions.txt"))]
    confusions: PathBuf,
}

/// Parse arguments and dispatch. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version are not failures; bad flags are.
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{err}");
                    0
                }
                _ => {
                    eprint!("{err}");
                    1
                }
            };
        }
    };
    match cli.command {
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Experiment(args) => cmd_experiment(&args),
        Command::ValidateTables(args) => {
            cmd_validate_tables(&args.pronunciations, &args.confusions)
        }
    }
}

fn fail(message: impl std::fmt::Display) -> i32 {
    eprintln!("error: {message}");
    1
}

fn cmd_simulate(args: &SimulateArgs) -> i32 {
    let text = match fs::read_to_string(&args.config) {
        Ok(text) => text,
        Err(err) => return fail(format!("cannot read {}: {err}", args.config.display())),
    };
    let mut scenario = match Scenario::from_json(&text) {
        Ok(scenario) => scenario,
        Err(err) => return fail(err),
    };
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }
    let report = match run_scenario(&scenario) {
        Ok(report) => report,
        Err(err) => return fail(err),
    };

    let transcript = report.transcript_text();
    if let Some(path) = &args.transcript {
        if let Err(err) = fs::write(path, &transcript) {
            return fail(format!("cannot write {}: {err}", path.display()));
        }
    } else {
        print!("{transcript}");
    }

    println!(
        "scenario: {}  seed: {}  noise: {} dB",
        scenario.mode.as_str(),
        scenario.seed,
        scenario.noise_db
    );
    let outcome = match report.outcome {
        RunOutcome::Completed => "completed",
        RunOutcome::TickLimitExceeded => "tick limit exceeded",
    };
    println!("outcome: {} after {} ticks", outcome, report.ticks);
    for (robot, count) in report.completed_counts() {
        println!("{robot}: {count} tasks completed");
    }
    let done: BTreeSet<u32> = report
        .repos
        .values()
        .flat_map(|repo| {
            repo.tasks()
                .filter(|t| matches!(t.status, TaskStatus::Completed(_)))
                .map(|t| t.id)
        })
        .collect();
    println!("tasks completed: {}/{}", done.len(), scenario.tasks.len());
    if !report.violations.is_empty() {
        println!("protocol notes: {}", report.violations.len());
        for (tick, violation) in &report.violations {
            println!("  [{tick}] {}: {}", violation.robot, violation.detail);
        }
    }

    match report.outcome {
        RunOutcome::Completed => 0,
        RunOutcome::TickLimitExceeded => 2,
    }
}

fn write_csv_file(path: &Path, comment: &str, results: &[TrialResult]) -> i32 {
    let mut buf = Vec::new();
    if let Err(err) = write_trials_csv(&mut buf, comment, results) {
        return fail(err);
    }
    match fs::write(path, &buf) {
        Ok(()) => {
            println!("wrote {} rows to {}", results.len(), path.display());
            0
        }
        Err(err) => fail(format!("cannot write {}: {err}", path.display())),
    }
}

fn cmd_experiment(command: &ExperimentCommand) -> i32 {
    match command {
        ExperimentCommand::WakeWord(args) => {
            let params = WakeWordParams {
                min_distance_cm: args.sweep.min,
                max_distance_cm: args.sweep.max,
                step_cm: args.sweep.step,
                trials_per_distance: args.sweep.trials,
                noise_db: args.sweep.noise_db,
                seed: args.sweep.seed,
                wake_word: args.wake_word.clone(),
                channel: ChannelModel::default(),
                jobs: args.sweep.jobs,
            };
            let results = match wake_word_experiment(&params) {
                Ok(results) => results,
                Err(err) => return fail(err),
            };
            let comment = format!(
                "wake-word experiment seed={} noise_db={} trials_per_distance={} wake_word=\"{}\"\n{}",
                params.seed,
                params.noise_db,
                params.trials_per_distance,
                params.wake_word,
                channel_summary(&params.channel),
            );
            write_csv_file(&args.sweep.out, &comment, &results)
        }
        ExperimentCommand::Mode(args) => {
            let mode = match args.mode {
                ModeArg::Coordinating => ScenarioMode::Coordinating,
                ModeArg::Volunteering => ScenarioMode::Volunteering,
            };
            let params = ModeParams {
                mode,
                min_distance_cm: args.sweep.min,
                max_distance_cm: args.sweep.max,
                step_cm: args.sweep.step,
                trials_per_distance: args.sweep.trials,
                noise_db: args.sweep.noise_db,
                seed: args.sweep.seed,
                channel: ChannelModel::default(),
                away_travel_cm: args.away_travel_cm,
                tick_limit: args.tick_limit,
                jobs: args.sweep.jobs,
            };
            let results = match mode_experiment(&params) {
                Ok(results) => results,
                Err(err) => return fail(err),
            };
            let comment = format!(
                "mode experiment mode={} seed={} noise_db={} trials_per_distance={} away_travel_cm={} tick_limit={}\n{}",
                mode.as_str(),
                params.seed,
                params.noise_db,
                params.trials_per_distance,
                params.away_travel_cm,
                params.tick_limit,
                channel_summary(&params.channel),
            );
            write_csv_file(&args.sweep.out, &comment, &results)
        }
        ExperimentCommand::Lexicon(args) => {
            let mut channel = ChannelModel::default();
            if let Some(p) = args.confusion_prob {
                channel.confusion_prob_at_plateau = p;
            }
            let params = AblationParams {
                p_target: args.p_target,
                trials_per_eval: args.trials,
                noise_db: args.noise_db,
                seed: args.seed,
                channel,
                max_distance_cm: args.max_distance_cm,
                ..AblationParams::default()
            };
            let without = match lexicon_ablation(&params, false) {
                Ok(d) => d,
                Err(err) => return fail(err),
            };
            let with = match lexicon_ablation(&params, true) {
                Ok(d) => d,
                Err(err) => return fail(err),
            };
            let mut out = String::new();
            out.push_str(&format!(
                "# lexicon ablation seed={} noise_db={} p_target={:.4} trials_per_eval={}\n",
                params.seed, params.noise_db, params.p_target, params.trials_per_eval
            ));
            out.push_str(&format!("# {}\n", channel_summary(&params.channel)));
            out.push_str("with_lexicon,max_distance_cm\n");
            out.push_str(&format!("false,{without:.1}\n"));
            out.push_str(&format!("true,{with:.1}\n"));
            match fs::write(&args.out, out) {
                Ok(()) => {
                    println!(
                        "max distance sustaining {:.0}% recognition: {:.1} cm without lexicon, {:.1} cm with",
                        params.p_target * 100.0,
                        without,
                        with
                    );
                    0
                }
                Err(err) => fail(format!("cannot write {}: {err}", args.out.display())),
            }
        }
    }
}

fn channel_summary(channel: &ChannelModel) -> String {
    let pivots: Vec<String> = channel
        .noise_levels()
        .map(|(db, cm)| format!("{db}dB->{cm}cm"))
        .collect();
    format!(
        "channel plateau_success={:.4} knee_offset_cm={} knee_steepness_cm={} confusion_prob_at_plateau={:.4} pivotal[{}]",
        channel.plateau_success,
        channel.knee_offset_cm,
        channel.knee_steepness_cm,
        channel.confusion_prob_at_plateau,
        pivots.join(",")
    )
}

fn nonempty_lines(text: &str) -> Vec<&str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect()
}

fn cmd_validate_tables(pronunciations: &Path, confusions: &Path) -> i32 {
    let mut mismatches: Vec<String> = Vec::new();

    match fs::read_to_string(pronunciations) {
        Err(err) => {
            mismatches.push(format!("cannot read {}: {err}", pronunciations.display()));
        }
        Ok(text) => {
            let lines = nonempty_lines(&text);
            if lines.len() != reference::PRONUNCIATIONS.len() {
                mismatches.push(format!(
                    "pronunciations: expected {} rows, found {}",
                    reference::PRONUNCIATIONS.len(),
                    lines.len()
                ));
            }
            for (i, (word, possible, used)) in reference::PRONUNCIATIONS.iter().enumerate() {
                let expected = format!("{word}|{}|{used}", possible.join("|"));
                match lines.get(i) {
                    Some(line) if **line == expected => {}
                    Some(line) => mismatches.push(format!(
                        "pronunciations row {} ({word}): expected \"{expected}\", found \"{line}\"",
                        i + 1
                    )),
                    None => {
                        mismatches.push(format!("pronunciations row {} ({word}): missing", i + 1))
                    }
                }
            }
            if let Err(err) = PronunciationTable::parse(&text) {
                mismatches.push(format!("pronunciations: {err}"));
            }
        }
    }

    match fs::read_to_string(confusions) {
        Err(err) => {
            mismatches.push(format!("cannot read {}: {err}", confusions.display()));
        }
        Ok(text) => {
            let lines = nonempty_lines(&text);
            if lines.len() != reference::CONFUSIONS.len() {
                mismatches.push(format!(
                    "confusions: expected {} rows, found {}",
                    reference::CONFUSIONS.len(),
                    lines.len()
                ));
            }
            for (i, (keyword, phrase, count)) in reference::CONFUSIONS.iter().enumerate() {
                let expected = format!("{keyword}|{phrase}|{count}");
                match lines.get(i) {
                    Some(line) if **line == expected => {}
                    Some(line) => mismatches.push(format!(
                        "confusions row {} ({keyword}): expected \"{expected}\", found \"{line}\"",
                        i + 1
                    )),
                    None => {
                        mismatches.push(format!("confusions row {} ({keyword}): missing", i + 1))
                    }
                }
            }
            if let Err(err) = ConfusionTable::parse(&text) {
                mismatches.push(format!("confusions: {err}"));
            }
        }
    }

    if mismatches.is_empty() {
        println!(
            "pronunciations: {} rows match; confusions: {} rows match",
            reference::PRONUNCIATIONS.len(),
            reference::CONFUSIONS.len()
        );
        0
    } else {
        let mut stderr = std::io::stderr().lock();
        for mismatch in &mismatches {
            let _ = writeln!(stderr, "mismatch: {mismatch}");
        }
        1
    }
}
