//! Experiment harnesses: Monte-Carlo sweeps over distance.
//!
//! Three experiments, mirroring how the platform is evaluated on hardware:
//!
//! * [`wake_word_experiment`] — wake-word detection rate vs distance, the
//!   curve whose sharp drop defines the pivotal distance.
//! * [`mode_experiment`] — full coordination exchanges (coordinating or
//!   volunteering) vs initial distance. In volunteering trials the claiming
//!   robot drives away from its teammate to water the plant, so its
//!   completion report travels farther than the initial separation — which
//!   is why the volunteering curve drops earlier.
//! * [`lexicon_ablation`] — how far command recognition stays above a target
//!   rate, with and without the alternative-phrase lexicon repairing known
//!   mis-transcriptions.
//!
//! Every distance point draws from its own derived seed, so points can be
//! computed in parallel (`jobs`) without changing any result.

use std::io;

use crate::agent::{detect_wake_word, AgentMode};
use crate::channel::ChannelModel;
use crate::geom::Point;
use crate::phonetics::{AlternativeLexicon, ConfusionTable, PronunciationTable, Utterance};
use crate::rng;
use crate::tasks::TaskStatus;

use super::engine::{run_scenario, RunReport, SimError};
use super::scenario::{AgentConfig, ChannelConfig, Scenario, ScenarioMode, TaskConfig};
use super::transcript::MessageKind;

/// Monte-Carlo outcome at one distance.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub distance_cm: f64,
    pub trials: u32,
    pub successes: u32,
}

impl TrialResult {
    pub fn rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            f64::from(self.successes) / f64::from(self.trials)
        }
    }
}

/// Write results as CSV: a `#` comment header recording the run parameters,
/// then `distance_cm,trials,successes,rate` with the rate at four decimals.
pub fn write_trials_csv<W: io::Write>(
    mut w: W,
    comment: &str,
    results: &[TrialResult],
) -> io::Result<()> {
    for line in comment.lines() {
        writeln!(w, "# {line}")?;
    }
    writeln!(w, "distance_cm,trials,successes,rate")?;
    for r in results {
        writeln!(
            w,
            "{},{},{},{:.4}",
            r.distance_cm,
            r.trials,
            r.successes,
            r.rate()
        )?;
    }
    Ok(())
}

fn sweep(min: f64, max: f64, step: f64) -> Result<Vec<f64>, SimError> {
    if step.is_nan() || step <= 0.0 {
        return Err(SimError::InvalidParams("step must be positive".into()));
    }
    if max < min || min < 0.0 {
        return Err(SimError::InvalidParams(
            "need 0 <= min distance <= max distance".into(),
        ));
    }
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| min + k as f64 * step).collect())
}

/// Evaluate `f` at every index, fanning out over up to `jobs` threads.
/// Output order is by index regardless of execution order.
fn run_indexed<T, F>(count: usize, jobs: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let jobs = jobs.max(1);
    if jobs == 1 || count <= 1 {
        return (0..count).map(f).collect();
    }
    let chunk_size = count.div_ceil(jobs);
    let mut slots: Vec<Option<T>> = (0..count).map(|_| None).collect();
    std::thread::scope(|scope| {
        for (chunk_idx, chunk) in slots.chunks_mut(chunk_size).enumerate() {
            let f = &f;
            scope.spawn(move || {
                for (offset, slot) in chunk.iter_mut().enumerate() {
                    *slot = Some(f(chunk_idx * chunk_size + offset));
                }
            });
        }
    });
    slots
        .into_iter()
        .map(|s| s.expect("every index computed"))
        .collect()
}

/// Parameters for [`wake_word_experiment`].
#[derive(Debug, Clone)]
pub struct WakeWordParams {
    pub min_distance_cm: f64,
    pub max_distance_cm: f64,
    pub step_cm: f64,
    pub trials_per_distance: u32,
    pub noise_db: i32,
    pub seed: u64,
    pub wake_word: String,
    pub channel: ChannelModel,
    pub jobs: usize,
}

impl Default for WakeWordParams {
    fn default() -> Self {
        WakeWordParams {
            min_distance_cm: 10.0,
            max_distance_cm: 300.0,
            step_cm: 10.0,
            trials_per_distance: 20,
            noise_db: 20,
            seed: 7,
            wake_word: "hey robot".into(),
            channel: ChannelModel::default(),
            jobs: 1,
        }
    }
}

/// Speak the wake word across the channel repeatedly at each distance and
/// count how often the far side detects it.
pub fn wake_word_experiment(params: &WakeWordParams) -> Result<Vec<TrialResult>, SimError> {
    let distances = sweep(
        params.min_distance_cm,
        params.max_distance_cm,
        params.step_cm,
    )?;
    params.channel.pivotal_distance(params.noise_db)?;
    let utterance = Utterance::speak(&params.wake_word, PronunciationTable::builtin());
    let confusions = ConfusionTable::builtin();
    let lexicon = AlternativeLexicon::builtin();

    let results = run_indexed(distances.len(), params.jobs, |k| {
        let distance = distances[k];
        let mut rng = rng::stream(params.seed, &format!("wake/{k}"));
        let mut successes = 0;
        for _ in 0..params.trials_per_distance {
            let outcome = params
                .channel
                .transmit(&utterance, distance, params.noise_db, confusions, &mut rng)
                .expect("noise level validated");
            let heard = outcome
                .received_text
                .is_some_and(|text| detect_wake_word(&text, &params.wake_word, lexicon));
            if heard {
                successes += 1;
            }
        }
        TrialResult {
            distance_cm: distance,
            trials: params.trials_per_distance,
            successes,
        }
    });
    Ok(results)
}

/// Parameters for [`mode_experiment`].
#[derive(Debug, Clone)]
pub struct ModeParams {
    pub mode: ScenarioMode,
    pub min_distance_cm: f64,
    pub max_distance_cm: f64,
    pub step_cm: f64,
    pub trials_per_distance: u32,
    pub noise_db: i32,
    pub seed: u64,
    pub channel: ChannelModel,
    /// How far past its teammate the volunteering robot drives to execute.
    pub away_travel_cm: f64,
    /// Per-trial tick budget; a trial that cannot finish in time fails.
    pub tick_limit: u64,
    pub jobs: usize,
}

impl Default for ModeParams {
    fn default() -> Self {
        ModeParams {
            mode: ScenarioMode::Volunteering,
            min_distance_cm: 10.0,
            max_distance_cm: 200.0,
            step_cm: 10.0,
            trials_per_distance: 20,
            noise_db: 20,
            seed: 7,
            channel: ChannelModel::default(),
            away_travel_cm: 50.0,
            tick_limit: 600,
            jobs: 1,
        }
    }
}

/// Build the two-robot trial scenario for one mode at one initial distance.
fn mode_trial_scenario(params: &ModeParams, distance: f64, trial_seed: u64) -> Scenario {
    let coordinating = params.mode == ScenarioMode::Coordinating;
    // Bot opens the conversation (lowest id) and, when coordinating, gives
    // the orders. In volunteering trials it claims first and drives away
    // from Rob; in coordinating trials Rob executes where it stands.
    let target = if coordinating {
        Point::new(distance, 0.0)
    } else {
        Point::new(-params.away_travel_cm, 0.0)
    };
    Scenario {
        seed: trial_seed,
        mode: params.mode,
        noise_db: params.noise_db,
        tick_duration_s: 0.1,
        tick_limit: params.tick_limit,
        wake_word: "hey robot".into(),
        agents: vec![
            AgentConfig {
                id: "Bot".into(),
                groups: vec!["team plant".into()],
                mode: if coordinating {
                    AgentMode::Coordinator
                } else {
                    AgentMode::Volunteer
                },
                pose: Point::new(0.0, 0.0),
                speed_cm_per_tick: 10.0,
            },
            AgentConfig {
                id: "Rob".into(),
                groups: vec!["team plant".into()],
                mode: AgentMode::Volunteer,
                pose: Point::new(distance, 0.0),
                speed_cm_per_tick: 10.0,
            },
        ],
        tasks: vec![TaskConfig {
            id: 1,
            name: "water the yellow rose".into(),
            target,
        }],
        channel: ChannelConfig::from_model(&params.channel),
        lexicon: Default::default(),
    }
}

/// Did the full exchange for one task go through? The handoff (command or
/// claim) must have been heard, the task must have been executed, and the
/// completion report must have reached the other robot.
fn full_exchange_succeeded(report: &RunReport, mode: ScenarioMode) -> bool {
    let handoff_kind = match mode {
        ScenarioMode::Coordinating => MessageKind::Command,
        _ => MessageKind::TaskClaim,
    };
    if report.delivered_count(handoff_kind) == 0 {
        return false;
    }
    // Completion heard: some replica records a task completed by a
    // different robot, which can only have come through the channel.
    report.repos.iter().any(|(listener, repo)| {
        repo.tasks()
            .any(|t| matches!(&t.status, TaskStatus::Completed(by) if by != listener))
    })
}

/// Run full coordination exchanges at each initial distance and count the
/// trials in which the whole protocol (handoff, execution, completion
/// report) went through.
pub fn mode_experiment(params: &ModeParams) -> Result<Vec<TrialResult>, SimError> {
    if params.mode == ScenarioMode::WaterPlants {
        return Err(SimError::InvalidParams(
            "mode experiment compares coordinating and volunteering".into(),
        ));
    }
    let distances = sweep(
        params.min_distance_cm,
        params.max_distance_cm,
        params.step_cm,
    )?;
    params.channel.pivotal_distance(params.noise_db)?;

    let results: Vec<Result<TrialResult, SimError>> =
        run_indexed(distances.len(), params.jobs, |k| {
            let distance = distances[k];
            let mut successes = 0;
            for trial in 0..params.trials_per_distance {
                // The label omits the mode, so coordinating and volunteering
                // trials at the same point are paired: same seed, same link
                // streams, differing only in behaviour.
                let trial_seed = rng::derive_seed(params.seed, &format!("mode/{k}/{trial}"));
                let scenario = mode_trial_scenario(params, distance, trial_seed);
                let report = run_scenario(&scenario)?;
                if full_exchange_succeeded(&report, params.mode) {
                    successes += 1;
                }
            }
            Ok(TrialResult {
                distance_cm: distance,
                trials: params.trials_per_distance,
                successes,
            })
        });
    results.into_iter().collect()
}

/// Parameters for [`lexicon_ablation`] and [`recognition_rate`].
#[derive(Debug, Clone)]
pub struct AblationParams {
    /// Recognition rate that must be sustained.
    pub p_target: f64,
    pub trials_per_eval: u32,
    pub noise_db: i32,
    pub seed: u64,
    pub channel: ChannelModel,
    /// Upper end of the distance search.
    pub max_distance_cm: f64,
    /// Binary-search resolution.
    pub tolerance_cm: f64,
    /// Command statements cycled through the trials.
    pub command_names: Vec<String>,
}

impl Default for AblationParams {
    fn default() -> Self {
        AblationParams {
            p_target: 0.95,
            trials_per_eval: 2000,
            noise_db: 20,
            seed: 7,
            channel: ChannelModel::default(),
            max_distance_cm: 400.0,
            tolerance_cm: 1.0,
            command_names: Scenario::water_plants(0)
                .tasks
                .iter()
                .map(|t| t.name.clone())
                .collect(),
        }
    }
}

/// Fraction of delivered commands transcribed back to their exact text at
/// one distance — the translation performance of the link, measured on the
/// utterances that arrived at all. With the lexicon, known wrong phrases
/// are repaired before comparison.
pub fn recognition_rate(
    params: &AblationParams,
    distance_cm: f64,
    with_lexicon: bool,
) -> Result<f64, SimError> {
    if params.command_names.is_empty() {
        return Err(SimError::InvalidParams("no command names to test".into()));
    }
    let confusions = ConfusionTable::builtin();
    let lexicon = AlternativeLexicon::builtin();
    // The stream label depends only on the distance, so the with- and
    // without-lexicon evaluations see identical transmissions.
    let mut rng = rng::stream(params.seed, &format!("ablation/{}", distance_cm.to_bits()));
    let mut delivered = 0u32;
    let mut correct = 0u32;
    for i in 0..params.trials_per_eval {
        let name = &params.command_names[i as usize % params.command_names.len()];
        let utterance = Utterance::speak(name, PronunciationTable::builtin());
        let outcome = params.channel.transmit(
            &utterance,
            distance_cm,
            params.noise_db,
            confusions,
            &mut rng,
        )?;
        if let Some(received) = outcome.received_text {
            delivered += 1;
            let heard = if with_lexicon {
                lexicon.recover_text(&received)
            } else {
                received
            };
            if heard.eq_ignore_ascii_case(name) {
                correct += 1;
            }
        }
    }
    if delivered == 0 {
        Ok(0.0)
    } else {
        Ok(f64::from(correct) / f64::from(delivered))
    }
}

/// The farthest distance at which command recognition stays at or above
/// `p_target`, found by binary search over Monte-Carlo evaluations.
pub fn lexicon_ablation(params: &AblationParams, with_lexicon: bool) -> Result<f64, SimError> {
    if !(params.p_target > 0.0 && params.p_target < 1.0) {
        return Err(SimError::InvalidParams("p_target must be in (0, 1)".into()));
    }
    if params.trials_per_eval == 0 {
        return Err(SimError::InvalidParams(
            "trials_per_eval must be positive".into(),
        ));
    }
    if params.tolerance_cm.is_nan() || params.tolerance_cm <= 0.0 {
        return Err(SimError::InvalidParams(
            "tolerance_cm must be positive".into(),
        ));
    }
    params.channel.pivotal_distance(params.noise_db)?;

    if recognition_rate(params, 0.0, with_lexicon)? < params.p_target {
        return Ok(0.0);
    }
    if recognition_rate(params, params.max_distance_cm, with_lexicon)? >= params.p_target {
        return Ok(params.max_distance_cm);
    }
    let mut lo = 0.0;
    let mut hi = params.max_distance_cm;
    while hi - lo > params.tolerance_cm {
        let mid = (lo + hi) / 2.0;
        if recognition_rate(params, mid, with_lexicon)? >= params.p_target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}
