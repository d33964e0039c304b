//! The deterministic tick engine.
//!
//! Each tick, agents are stepped in robot-id order: first every utterance
//! queued for them from the previous tick, then one `Tick`. Everything an
//! agent says is pushed through the channel once per listener, on that
//! listener's own link stream, and delivered (or not) at the start of the
//! next tick. The run ends when every agent is done and nothing is still in
//! flight, or at the tick limit.
//!
//! Determinism: agent order, inbox order, and per-link random streams are
//! all functions of the scenario (including its seed), so the same scenario
//! produces a byte-identical transcript every time.

use std::collections::BTreeMap;

use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::agent::{
    AgentContext, AgentEvent, AgentMode, AgentSetup, Outbound, ProtocolViolation, RobotAgent,
};
use crate::channel::{ChannelError, ChannelModel};
use crate::geom;
use crate::grammar::{Addressee, RobotId};
use crate::phonetics::{AlternativeLexicon, ConfusionTable, PronunciationTable};
use crate::rng;
use crate::tasks::TaskRepository;

use super::scenario::{Scenario, ScenarioError, ScenarioMode};
use super::transcript::{transcript_text, DeliveryOutcome, MessageKind, TranscriptEntry};

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("invalid experiment parameters: {0}")]
    InvalidParams(String),
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunOutcome {
    /// Every agent reached `Done`.
    Completed,
    /// The tick limit cut the run short; the report holds the partial
    /// transcript and repositories.
    TickLimitExceeded,
}

/// Everything a run produced.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub outcome: RunOutcome,
    pub ticks: u64,
    pub transcript: Vec<TranscriptEntry>,
    /// Final task-repository replica of every robot.
    pub repos: BTreeMap<RobotId, TaskRepository>,
    pub violations: Vec<(u64, ProtocolViolation)>,
    /// Total utterances spoken; always equals the transcript length.
    pub utterances_spoken: u64,
}

impl RunReport {
    pub fn transcript_text(&self) -> String {
        transcript_text(&self.transcript)
    }

    /// Tasks each robot completed, according to its own replica.
    pub fn completed_counts(&self) -> BTreeMap<RobotId, usize> {
        self.repos
            .iter()
            .map(|(id, repo)| (id.clone(), repo.completed_count(id)))
            .collect()
    }

    pub fn delivered_count(&self, kind: MessageKind) -> usize {
        self.transcript
            .iter()
            .filter(|e| e.kind == kind && e.outcome != DeliveryOutcome::Lost)
            .count()
    }
}

struct Link {
    rng: ChaCha8Rng,
}

/// Run a scenario to completion (or to its tick limit).
pub fn run_scenario(scenario: &Scenario) -> Result<RunReport, SimError> {
    scenario.validate()?;
    let channel: ChannelModel = scenario.channel.to_model();
    let confusions = ConfusionTable::builtin();
    let lexicon: AlternativeLexicon = scenario.build_lexicon()?;
    let ctx = AgentContext {
        pronunciations: PronunciationTable::builtin(),
        lexicon: &lexicon,
    };
    let repo = scenario.build_repository()?;

    // Roster, in robot-id order. The lowest id opens the conversation.
    let mut ids: Vec<RobotId> = scenario
        .agents
        .iter()
        .map(|a| RobotId::new(&a.id).expect("validated id"))
        .collect();
    ids.sort();
    let initiator = ids.first().cloned();

    let mut agents: BTreeMap<RobotId, RobotAgent> = BTreeMap::new();
    let mut agent_streams: BTreeMap<RobotId, ChaCha8Rng> = BTreeMap::new();
    for config in &scenario.agents {
        let id = RobotId::new(&config.id).expect("validated id");
        let awaits_commands =
            scenario.mode == ScenarioMode::Coordinating && config.mode == AgentMode::Volunteer;
        agents.insert(
            id.clone(),
            RobotAgent::new(AgentSetup {
                id: id.clone(),
                groups: config.groups.clone(),
                mode: config.mode,
                pose: config.pose,
                speed_cm_per_tick: config.speed_cm_per_tick,
                wake_word: scenario.wake_word.clone(),
                repo: repo.clone(),
                initiator: Some(&id) == initiator.as_ref(),
                awaits_commands,
            }),
        );
        agent_streams.insert(
            id.clone(),
            rng::stream(
                scenario.seed,
                &format!("agent/{}", id.as_str().to_ascii_lowercase()),
            ),
        );
    }
    let mut links: BTreeMap<(RobotId, RobotId), Link> = BTreeMap::new();
    for speaker in &ids {
        for listener in &ids {
            if speaker != listener {
                let label = format!(
                    "link/{}->{}",
                    speaker.as_str().to_ascii_lowercase(),
                    listener.as_str().to_ascii_lowercase()
                );
                links.insert(
                    (speaker.clone(), listener.clone()),
                    Link {
                        rng: rng::stream(scenario.seed, &label),
                    },
                );
            }
        }
    }

    let mut transcript: Vec<TranscriptEntry> = Vec::new();
    let mut violations: Vec<(u64, ProtocolViolation)> = Vec::new();
    let mut inboxes: BTreeMap<RobotId, Vec<String>> = BTreeMap::new();
    let mut outcome = RunOutcome::TickLimitExceeded;
    let mut ticks = scenario.tick_limit;

    for tick in 1..=scenario.tick_limit {
        // Step every agent: queued utterances first, then the tick.
        let mut spoken: Vec<(RobotId, Outbound)> = Vec::new();
        for id in &ids {
            let agent = agents.get_mut(id).expect("agent exists");
            let stream = agent_streams.get_mut(id).expect("stream exists");
            let mut events: Vec<AgentEvent> = inboxes
                .remove(id)
                .unwrap_or_default()
                .into_iter()
                .map(AgentEvent::Heard)
                .collect();
            events.push(AgentEvent::Tick);
            for event in events {
                let output = agent.step(event, &ctx, stream);
                for violation in output.violations {
                    violations.push((tick, violation));
                }
                for outbound in output.spoken {
                    spoken.push((id.clone(), outbound));
                }
            }
        }

        // Carry each utterance across the channel, once per listener.
        for (speaker_id, outbound) in spoken {
            let speaker_pose = agents[&speaker_id].pose();
            let listeners: Vec<RobotId> = ids
                .iter()
                .filter(|id| **id != speaker_id)
                .cloned()
                .collect();

            // The transcript tracks the addressed robot, or the nearest
            // listener for group and broadcast messages.
            let tracked: Option<RobotId> = match &outbound.message.addressee {
                Addressee::Robot(id) if listeners.contains(id) => Some(id.clone()),
                _ => listeners
                    .iter()
                    .min_by(|a, b| {
                        let da = geom::distance(speaker_pose, agents[*a].pose());
                        let db = geom::distance(speaker_pose, agents[*b].pose());
                        da.partial_cmp(&db)
                            .expect("finite distances")
                            .then(a.cmp(b))
                    })
                    .cloned(),
            };

            let mut tracked_entry: Option<(f64, DeliveryOutcome)> = None;
            for listener_id in &listeners {
                let distance = geom::distance(speaker_pose, agents[listener_id].pose());
                let link = links
                    .get_mut(&(speaker_id.clone(), listener_id.clone()))
                    .expect("link exists");
                let result = channel.transmit(
                    &outbound.utterance,
                    distance,
                    scenario.noise_db,
                    confusions,
                    &mut link.rng,
                )?;
                if Some(listener_id) == tracked.as_ref() {
                    let delivery = match (&result.delivered, result.is_garbled()) {
                        (false, _) => DeliveryOutcome::Lost,
                        (true, false) => DeliveryOutcome::Delivered,
                        (true, true) => DeliveryOutcome::Garbled {
                            received: result.received_text.clone().expect("delivered"),
                        },
                    };
                    tracked_entry = Some((distance, delivery));
                }
                if let Some(received) = result.received_text {
                    inboxes
                        .entry(listener_id.clone())
                        .or_default()
                        .push(received);
                }
            }

            let (distance_cm, delivery) = tracked_entry.unwrap_or((0.0, DeliveryOutcome::Lost));
            transcript.push(TranscriptEntry {
                tick,
                speaker: speaker_id,
                addressee: outbound.message.addressee.clone(),
                distance_cm,
                spoken_text: outbound.utterance.text(),
                kind: MessageKind::from(&outbound.message.body),
                outcome: delivery,
            });
        }

        if agents.values().all(RobotAgent::is_done) && inboxes.values().all(Vec::is_empty) {
            outcome = RunOutcome::Completed;
            ticks = tick;
            break;
        }
    }

    let utterances_spoken = transcript.len() as u64;
    Ok(RunReport {
        outcome,
        ticks,
        transcript,
        repos: agents
            .into_iter()
            .map(|(id, agent)| (id, agent.repo().clone()))
            .collect(),
        violations,
        utterances_spoken,
    })
}
