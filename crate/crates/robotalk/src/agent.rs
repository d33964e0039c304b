//! The per-robot protocol state machine.
//!
//! An agent is dormant until it hears the wake word. Utterances follow the
//! consumer voice-assistant pattern: every spoken message is prefixed with
//! the wake word, so a single utterance can both wake a listener and carry a
//! message. Once awake, an agent greets, then either volunteers for tasks
//! from its replica of the task repository or — as a coordinator — assigns
//! tasks to the robots it has heard greet.
//!
//! Agents never share state. Everything an agent knows about the others it
//! learned by listening, and everything it wants others to know it says out
//! loud. The engine feeds events in ([`AgentEvent`]) and carries spoken
//! utterances out ([`StepOutput`]).
//!
//! Claim contention is possible because announcements can be lost. A fresh
//! claim is spoken, re-announced once after a short settle window, and only
//! then executed; when two replicas disagree about a claimant, both sides
//! apply the same tie-break — the lower robot id wins — so they converge
//! without an acknowledgement protocol.

use std::collections::BTreeSet;

use rand::Rng;

use crate::geom::{self, Point};
use crate::grammar::{
    parse_message, render_message, resolve_addressee, Addressee, Message, MessageBody, RobotId,
};
use crate::phonetics::{AlternativeLexicon, PronunciationTable, Utterance};
use crate::tasks::{TaskError, TaskId, TaskRepository, TaskStatus};

/// Ticks between broadcast greeting retries while no peer has answered.
const GREET_RETRY_INTERVAL: u64 = 20;
/// Total broadcast greetings an initiator will attempt.
const MAX_GREET_ATTEMPTS: u32 = 3;
/// Ticks a coordinator waits for a claim acknowledgement before re-issuing.
const COMMAND_RETRY_INTERVAL: u64 = 20;
/// Total times a coordinator will speak the same command.
const MAX_COMMAND_ATTEMPTS: u32 = 3;
/// A fresh claim is re-announced this many ticks after it was first spoken.
const CLAIM_REANNOUNCE_TICKS: u64 = 2;
/// Execution starts this many ticks after the claim was first spoken.
const CLAIM_SETTLE_TICKS: u64 = 4;

/// Behavioural role of a robot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentMode {
    /// Assigns named tasks to other robots and executes none itself.
    Coordinator,
    /// Picks tasks for itself from the repository and announces claims.
    Volunteer,
}

/// Protocol phase of a robot.
#[derive(Debug, Clone, PartialEq)]
pub enum AgentState {
    /// Asleep; only the wake word gets through.
    Dormant,
    /// Awake and introduced; not yet choosing work.
    Greeted,
    /// Choosing a task, waiting for a claim to settle, or waiting for work.
    Selecting,
    /// Travelling towards the target of a claimed task.
    Executing { task_id: TaskId, target: Point },
    /// Nothing left in the replica for this robot to do.
    Done,
}

/// What the engine can feed an agent.
#[derive(Debug, Clone)]
pub enum AgentEvent {
    /// Channel-delivered text, exactly as heard.
    Heard(String),
    /// One step of simulated time.
    Tick,
    /// Echo of the agent's own speech; state was already updated when the
    /// utterance was produced, so this is a no-op.
    Spoke(Utterance),
}

/// A non-fatal protocol irregularity, logged rather than raised.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolViolation {
    pub robot: RobotId,
    pub detail: String,
}

/// A message on its way out: the semantic form plus the spoken surface form.
#[derive(Debug, Clone)]
pub struct Outbound {
    pub message: Message,
    pub utterance: Utterance,
}

/// Everything an agent produced during one step.
#[derive(Debug, Default)]
pub struct StepOutput {
    pub spoken: Vec<Outbound>,
    pub violations: Vec<ProtocolViolation>,
}

impl StepOutput {
    fn empty() -> Self {
        StepOutput::default()
    }
}

/// Shared immutable tables an agent speaks and listens through.
#[derive(Clone, Copy)]
pub struct AgentContext<'a> {
    pub pronunciations: &'a PronunciationTable,
    pub lexicon: &'a AlternativeLexicon,
}

/// True when the wake-word phrase, after keyword recovery, is a prefix of
/// the received text.
pub fn detect_wake_word(
    received_text: &str,
    wake_word: &str,
    lexicon: &AlternativeLexicon,
) -> bool {
    strip_wake_prefix(received_text, wake_word, lexicon).is_some()
}

/// Recover keywords in the received text, then split off the wake-word
/// prefix. Returns the remainder of the utterance when the wake word
/// matched.
pub fn strip_wake_prefix(
    received_text: &str,
    wake_word: &str,
    lexicon: &AlternativeLexicon,
) -> Option<String> {
    let recovered = lexicon.recover_text(received_text);
    let tokens: Vec<&str> = recovered.split_whitespace().collect();
    let wake: Vec<&str> = wake_word.split_whitespace().collect();
    if wake.is_empty() || tokens.len() < wake.len() {
        return None;
    }
    let matched = wake
        .iter()
        .zip(&tokens)
        .all(|(w, t)| t.eq_ignore_ascii_case(w));
    matched.then(|| tokens[wake.len()..].join(" "))
}

/// Euclidean distance between two robots' poses, in centimetres.
pub fn distance_between(a: &RobotAgent, b: &RobotAgent) -> f64 {
    geom::distance(a.pose(), b.pose())
}

/// Construction parameters for [`RobotAgent`].
#[derive(Debug, Clone)]
pub struct AgentSetup {
    pub id: RobotId,
    pub groups: Vec<String>,
    pub mode: AgentMode,
    pub pose: Point,
    pub speed_cm_per_tick: f64,
    pub wake_word: String,
    pub repo: TaskRepository,
    /// Speaks the opening greeting at simulation start.
    pub initiator: bool,
    /// Waits for commands instead of volunteering (workers under a
    /// coordinator).
    pub awaits_commands: bool,
}

#[derive(Debug, Clone)]
struct Settle {
    task_id: TaskId,
    started: u64,
    reannounced: bool,
}

#[derive(Debug, Clone)]
struct PendingCommand {
    task_id: TaskId,
    worker: RobotId,
    issued: u64,
    attempts: u32,
}

/// One robot: protocol state, pose, and its replica of the task repository.
#[derive(Debug, Clone)]
pub struct RobotAgent {
    id: RobotId,
    groups: Vec<String>,
    mode: AgentMode,
    pose: Point,
    speed: f64,
    wake_word: String,
    repo: TaskRepository,
    state: AgentState,
    initiator: bool,
    awaits_commands: bool,
    known_peers: BTreeSet<RobotId>,
    tick: u64,
    settle: Option<Settle>,
    pending_command: Option<PendingCommand>,
    greet_attempts: u32,
    last_greet_tick: u64,
}

impl RobotAgent {
    pub fn new(setup: AgentSetup) -> Self {
        RobotAgent {
            id: setup.id,
            groups: setup.groups,
            mode: setup.mode,
            pose: setup.pose,
            speed: setup.speed_cm_per_tick,
            wake_word: setup.wake_word,
            repo: setup.repo,
            state: AgentState::Dormant,
            initiator: setup.initiator,
            awaits_commands: setup.awaits_commands,
            known_peers: BTreeSet::new(),
            tick: 0,
            settle: None,
            pending_command: None,
            greet_attempts: 0,
            last_greet_tick: 0,
        }
    }

    pub fn id(&self) -> &RobotId {
        &self.id
    }

    pub fn pose(&self) -> Point {
        self.pose
    }

    pub fn state(&self) -> &AgentState {
        &self.state
    }

    pub fn mode(&self) -> AgentMode {
        self.mode
    }

    pub fn is_done(&self) -> bool {
        self.state == AgentState::Done
    }

    pub fn repo(&self) -> &TaskRepository {
        &self.repo
    }

    pub fn known_peers(&self) -> &BTreeSet<RobotId> {
        &self.known_peers
    }

    pub fn wake_word(&self) -> &str {
        &self.wake_word
    }

    /// Where this agent's announcements go: its first group, or everyone.
    fn announce_addressee(&self) -> Addressee {
        match self.groups.first() {
            Some(g) => Addressee::Group(g.clone()),
            None => Addressee::All,
        }
    }

    fn say(&self, addressee: Addressee, body: MessageBody, ctx: &AgentContext) -> Outbound {
        let message = Message {
            addressee,
            speaker: self.id.clone(),
            body,
        };
        let text = format!("{} {}", self.wake_word, render_message(&message));
        Outbound {
            utterance: Utterance::speak(&text, ctx.pronunciations),
            message,
        }
    }

    fn violation(&self, detail: impl Into<String>) -> ProtocolViolation {
        ProtocolViolation {
            robot: self.id.clone(),
            detail: detail.into(),
        }
    }

    /// Advance the state machine by one event.
    pub fn step<R: Rng + ?Sized>(
        &mut self,
        event: AgentEvent,
        ctx: &AgentContext,
        rng: &mut R,
    ) -> StepOutput {
        match event {
            AgentEvent::Heard(text) => self.on_heard(&text, ctx),
            AgentEvent::Tick => self.on_tick(ctx, rng),
            AgentEvent::Spoke(_) => StepOutput::empty(),
        }
    }

    fn on_heard(&mut self, text: &str, ctx: &AgentContext) -> StepOutput {
        let mut out = StepOutput::empty();
        let Some(rest) = strip_wake_prefix(text, &self.wake_word, ctx.lexicon) else {
            // No wake word. A command slipped through without one is the
            // classic protocol violation; everything else is ambient noise.
            if let Ok(m) = parse_message(&ctx.lexicon.recover_text(text)) {
                if matches!(m.body, MessageBody::Command(_))
                    && resolve_addressee(&m.addressee, &self.id, &self.groups)
                {
                    out.violations.push(self.violation(format!(
                        "command {:?} ignored: no wake word (state {:?})",
                        text, self.state
                    )));
                }
            }
            return out;
        };

        if rest.is_empty() {
            // A bare wake word rouses a dormant robot, which introduces
            // itself to whoever is out there.
            if self.state == AgentState::Dormant {
                self.state = AgentState::Greeted;
                out.spoken
                    .push(self.say(Addressee::All, MessageBody::Greeting, ctx));
            }
            return out;
        }

        let message = match parse_message(&rest) {
            Ok(m) => m,
            Err(_) => {
                // Garbled beyond parsing. The wake word still woke us up.
                if self.state == AgentState::Dormant {
                    self.state = AgentState::Greeted;
                    out.spoken
                        .push(self.say(Addressee::All, MessageBody::Greeting, ctx));
                }
                return out;
            }
        };

        if message.speaker == self.id {
            return out; // own echo
        }
        self.known_peers.insert(message.speaker.clone());

        let was_dormant = self.state == AgentState::Dormant;
        if was_dormant {
            self.state = AgentState::Greeted;
            out.spoken.push(self.say(
                Addressee::Robot(message.speaker.clone()),
                MessageBody::Greeting,
                ctx,
            ));
        }

        let for_me = resolve_addressee(&message.addressee, &self.id, &self.groups);
        match &message.body {
            MessageBody::Greeting => {
                // Answer broadcast greetings so the greeter learns our id.
                // Directed greetings are themselves answers.
                if !was_dormant && message.addressee == Addressee::All {
                    out.spoken.push(self.say(
                        Addressee::Robot(message.speaker.clone()),
                        MessageBody::Greeting,
                        ctx,
                    ));
                }
            }
            MessageBody::TeamAndTask { .. } => {
                // Status broadcast; the speaker id was already noted.
            }
            MessageBody::TaskClaim(task_id) => {
                if for_me {
                    self.on_claim_announcement(&message, *task_id, ctx, &mut out);
                }
            }
            MessageBody::TaskComplete(task_id) => {
                if for_me {
                    self.on_completion_announcement(&message, *task_id, &mut out);
                }
            }
            MessageBody::Command(statement) => {
                if for_me {
                    let speaker = message.speaker.clone();
                    self.on_command(&speaker, statement, ctx, &mut out);
                }
            }
        }
        out
    }

    fn on_claim_announcement(
        &mut self,
        message: &Message,
        task_id: TaskId,
        ctx: &AgentContext,
        out: &mut StepOutput,
    ) {
        match self.repo.apply_announcement(message) {
            Ok(_) => {
                // A coordinator treats a worker's claim as the command ack.
                if let Some(pending) = &self.pending_command {
                    if pending.task_id == task_id && pending.worker == message.speaker {
                        self.pending_command = None;
                    }
                }
            }
            Err(TaskError::ConflictingClaim {
                task,
                local,
                announced,
            }) => {
                let winner = local.clone().min(announced.clone());
                if winner == announced {
                    if self.repo.resolve_claim(task, &announced).is_err() {
                        // Local side already completed it; keep the replica.
                        out.violations.push(self.violation(format!(
                            "claim for completed task {task} by {announced} ignored"
                        )));
                        return;
                    }
                    if local == self.id {
                        self.abandon(task);
                    }
                } else if local == self.id {
                    // We win the tie-break; say the claim again so the loser
                    // (and anyone else who missed it) can converge.
                    out.spoken.push(self.say(
                        self.announce_addressee(),
                        MessageBody::TaskClaim(task),
                        ctx,
                    ));
                }
            }
            Err(err) => {
                out.violations
                    .push(self.violation(format!("claim announcement: {err}")));
            }
        }
    }

    fn on_completion_announcement(
        &mut self,
        message: &Message,
        task_id: TaskId,
        out: &mut StepOutput,
    ) {
        match self.repo.apply_announcement(message) {
            Ok(_) => {
                if let Some(pending) = &self.pending_command {
                    if pending.task_id == task_id {
                        self.pending_command = None;
                    }
                }
            }
            Err(TaskError::ConflictingClaim {
                task,
                local,
                announced,
            }) => {
                // Finished work beats a standing claim. Two completions of
                // the same task keep the first one heard.
                let local_completed = matches!(
                    self.repo.get(task).map(|t| &t.status),
                    Some(TaskStatus::Completed(_))
                );
                if local_completed {
                    out.violations.push(self.violation(format!(
                        "task {task} reported complete by {announced} but already completed by {local}"
                    )));
                    return;
                }
                if self.repo.record_completion(&announced, task).is_ok() {
                    if local == self.id {
                        self.abandon(task);
                        out.violations.push(self.violation(format!(
                            "task {task} completed by {announced} while we were executing it"
                        )));
                    }
                    if let Some(pending) = &self.pending_command {
                        if pending.task_id == task {
                            self.pending_command = None;
                        }
                    }
                }
            }
            Err(err) => {
                out.violations
                    .push(self.violation(format!("completion announcement: {err}")));
            }
        }
    }

    fn on_command(
        &mut self,
        speaker: &RobotId,
        statement: &str,
        ctx: &AgentContext,
        out: &mut StepOutput,
    ) {
        if self.mode == AgentMode::Coordinator {
            out.violations.push(self.violation(format!(
                "coordinator received a command from {speaker}: {statement:?}"
            )));
            return;
        }
        let Some(task_id) = self.repo.task_id_by_name(statement) else {
            out.violations
                .push(self.violation(format!("command names no known task: {statement:?}")));
            return;
        };
        if let AgentState::Executing {
            task_id: current, ..
        } = &self.state
        {
            if *current == task_id {
                // Duplicate command; repeat the acknowledgement.
                out.spoken.push(self.say(
                    self.announce_addressee(),
                    MessageBody::TaskClaim(task_id),
                    ctx,
                ));
            } else {
                let current = *current;
                out.violations.push(self.violation(format!(
                    "command for task {task_id} while executing task {current}; ignored"
                )));
            }
            return;
        }
        match self.repo.get(task_id).map(|t| t.status.clone()) {
            Some(TaskStatus::Available) => {
                self.repo
                    .claim(&self.id, task_id)
                    .expect("available task is claimable");
                let target = self.repo.get(task_id).expect("task exists").target;
                self.state = AgentState::Executing { task_id, target };
                self.settle = None;
                out.spoken.push(self.say(
                    self.announce_addressee(),
                    MessageBody::TaskClaim(task_id),
                    ctx,
                ));
            }
            Some(TaskStatus::Claimed(holder)) if holder == self.id => {
                // Already ours (e.g. command repeated before we moved).
                out.spoken.push(self.say(
                    self.announce_addressee(),
                    MessageBody::TaskClaim(task_id),
                    ctx,
                ));
            }
            Some(status) => {
                out.violations.push(self.violation(format!(
                    "command for task {task_id} in state {status:?}; ignored"
                )));
            }
            None => unreachable!("task_id came from the repository"),
        }
    }

    /// Drop any claim-settling or execution tied to a task we just lost.
    fn abandon(&mut self, task_id: TaskId) {
        if matches!(&self.settle, Some(s) if s.task_id == task_id) {
            self.settle = None;
        }
        if matches!(&self.state, AgentState::Executing { task_id: t, .. } if *t == task_id) {
            self.state = AgentState::Selecting;
        }
    }

    fn on_tick<R: Rng + ?Sized>(&mut self, ctx: &AgentContext, rng: &mut R) -> StepOutput {
        self.tick += 1;
        let mut out = StepOutput::empty();
        match self.state.clone() {
            AgentState::Dormant => {
                if self.initiator {
                    // Open the conversation: the wake word plus a greeting
                    // travel as one utterance.
                    self.state = AgentState::Greeted;
                    self.greet_attempts = 1;
                    self.last_greet_tick = self.tick;
                    out.spoken
                        .push(self.say(Addressee::All, MessageBody::Greeting, ctx));
                }
            }
            AgentState::Greeted => {
                self.state = AgentState::Selecting;
            }
            AgentState::Selecting => {
                self.maybe_regreet(ctx, &mut out);
                match self.mode {
                    AgentMode::Coordinator => self.coordinate(ctx, rng, &mut out),
                    AgentMode::Volunteer => self.volunteer(ctx, rng, &mut out),
                }
            }
            AgentState::Executing { task_id, target } => {
                self.pose = geom::step_toward(self.pose, target, self.speed);
                if self.pose == target {
                    match self.repo.complete(&self.id, task_id) {
                        Ok(()) => {
                            out.spoken.push(self.say(
                                self.announce_addressee(),
                                MessageBody::TaskComplete(task_id),
                                ctx,
                            ));
                        }
                        Err(err) => {
                            out.violations
                                .push(self.violation(format!("arrived at task {task_id}: {err}")));
                        }
                    }
                    self.state = AgentState::Selecting;
                }
            }
            AgentState::Done => {}
        }
        out
    }

    /// Initiators keep introducing themselves (a bounded number of times)
    /// until somebody answers.
    fn maybe_regreet(&mut self, ctx: &AgentContext, out: &mut StepOutput) {
        if self.initiator
            && self.known_peers.is_empty()
            && self.greet_attempts < MAX_GREET_ATTEMPTS
            && self.tick.saturating_sub(self.last_greet_tick) >= GREET_RETRY_INTERVAL
        {
            self.greet_attempts += 1;
            self.last_greet_tick = self.tick;
            out.spoken
                .push(self.say(Addressee::All, MessageBody::Greeting, ctx));
        }
    }

    fn coordinate<R: Rng + ?Sized>(
        &mut self,
        ctx: &AgentContext,
        rng: &mut R,
        out: &mut StepOutput,
    ) {
        if let Some(pending) = self.pending_command.clone() {
            // Still waiting for the worker's claim to come back.
            if self.tick.saturating_sub(pending.issued) >= COMMAND_RETRY_INTERVAL {
                if pending.attempts < MAX_COMMAND_ATTEMPTS {
                    let name = self
                        .repo
                        .get(pending.task_id)
                        .expect("pending task exists")
                        .name
                        .clone();
                    self.pending_command = Some(PendingCommand {
                        attempts: pending.attempts + 1,
                        issued: self.tick,
                        ..pending.clone()
                    });
                    out.spoken.push(self.say(
                        Addressee::Robot(pending.worker.clone()),
                        MessageBody::Command(name),
                        ctx,
                    ));
                } else {
                    out.violations.push(self.violation(format!(
                        "command for task {} to {} never acknowledged",
                        pending.task_id, pending.worker
                    )));
                    self.pending_command = None;
                }
            }
            return;
        }

        let available: Vec<TaskId> = self.repo.available_tasks().iter().map(|t| t.id).collect();
        if available.is_empty() {
            if self.repo.claimed_by(&self.id).is_empty() {
                self.state = AgentState::Done;
            }
            return;
        }
        // Idle workers: heard of, and not currently holding a claim.
        let idle: Vec<RobotId> = self
            .known_peers
            .iter()
            .filter(|peer| self.repo.claimed_by(peer).is_empty())
            .cloned()
            .collect();
        if idle.is_empty() {
            return;
        }
        let task_id = available[rng.random_range(0..available.len())];
        let worker = idle[rng.random_range(0..idle.len())].clone();
        let name = self.repo.get(task_id).expect("task exists").name.clone();
        self.repo
            .claim(&worker, task_id)
            .expect("available task is claimable");
        self.pending_command = Some(PendingCommand {
            task_id,
            worker: worker.clone(),
            issued: self.tick,
            attempts: 1,
        });
        out.spoken
            .push(self.say(Addressee::Robot(worker), MessageBody::Command(name), ctx));
    }

    fn volunteer<R: Rng + ?Sized>(
        &mut self,
        ctx: &AgentContext,
        rng: &mut R,
        out: &mut StepOutput,
    ) {
        if let Some(settle) = self.settle.clone() {
            let still_mine = matches!(
                self.repo.get(settle.task_id).map(|t| &t.status),
                Some(TaskStatus::Claimed(holder)) if *holder == self.id
            );
            if !still_mine {
                // Lost the tie-break while settling; pick again next tick.
                self.settle = None;
                return;
            }
            let age = self.tick.saturating_sub(settle.started);
            if age >= CLAIM_SETTLE_TICKS {
                let target = self.repo.get(settle.task_id).expect("task exists").target;
                self.state = AgentState::Executing {
                    task_id: settle.task_id,
                    target,
                };
                self.settle = None;
            } else if age >= CLAIM_REANNOUNCE_TICKS && !settle.reannounced {
                self.settle = Some(Settle {
                    reannounced: true,
                    ..settle
                });
                out.spoken.push(self.say(
                    self.announce_addressee(),
                    MessageBody::TaskClaim(settle.task_id),
                    ctx,
                ));
            }
            return;
        }

        if self.awaits_commands {
            if !self.repo.has_available() && self.repo.claimed_by(&self.id).is_empty() {
                self.state = AgentState::Done;
            }
            return;
        }

        let available: Vec<TaskId> = self.repo.available_tasks().iter().map(|t| t.id).collect();
        if available.is_empty() {
            if self.repo.claimed_by(&self.id).is_empty() {
                self.state = AgentState::Done;
            }
            return;
        }
        let task_id = available[rng.random_range(0..available.len())];
        self.repo
            .claim(&self.id, task_id)
            .expect("available task is claimable");
        self.settle = Some(Settle {
            task_id,
            started: self.tick,
            reannounced: false,
        });
        out.spoken.push(self.say(
            self.announce_addressee(),
            MessageBody::TaskClaim(task_id),
            ctx,
        ));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phonetics::ConfusionTable;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn id(s: &str) -> RobotId {
        RobotId::new(s).unwrap()
    }

    fn ctx() -> AgentContext<'static> {
        AgentContext {
            pronunciations: PronunciationTable::builtin(),
            lexicon: AlternativeLexicon::builtin(),
        }
    }

    fn five_plants() -> TaskRepository {
        let names = ["green", "violet", "indigo", "orange", "yellow"];
        TaskRepository::new(names.iter().enumerate().map(|(i, color)| {
            (
                u32::try_from(i).unwrap() + 1,
                format!("water the {color} plant"),
                Point::new(f64::from(u32::try_from(i).unwrap()) * 30.0, 40.0),
            )
        }))
        .unwrap()
    }

    fn volunteer_agent(name: &str, initiator: bool) -> RobotAgent {
        RobotAgent::new(AgentSetup {
            id: id(name),
            groups: vec!["team plant".into()],
            mode: AgentMode::Volunteer,
            pose: Point::new(0.0, 0.0),
            speed_cm_per_tick: 10.0,
            wake_word: "hey robot".into(),
            repo: five_plants(),
            initiator,
            awaits_commands: false,
        })
    }

    #[test]
    fn wake_word_detection() {
        let lexicon = AlternativeLexicon::builtin();
        assert!(detect_wake_word(
            "hey robot hi i am rob",
            "hey robot",
            lexicon
        ));
        assert!(detect_wake_word("Hey Robot", "hey robot", lexicon));
        assert!(!detect_wake_word("hey there robot", "hey robot", lexicon));
        assert!(!detect_wake_word("garbled noise", "hey robot", lexicon));
    }

    #[test]
    fn wake_word_recovered_through_lexicon() {
        // A custom lexicon registers a known mis-hearing of the wake word.
        let mut lexicon = AlternativeLexicon::builtin().clone();
        lexicon.add_alternative("robot", "row but").unwrap();
        assert!(detect_wake_word(
            "hey row but hi i am bot",
            "hey robot",
            &lexicon
        ));
        assert!(!detect_wake_word(
            "hey row but hi i am bot",
            "hey robot",
            AlternativeLexicon::builtin()
        ));
    }

    #[test]
    fn dormant_agent_greets_on_wake_word() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut agent = volunteer_agent("Rob", false);
        let out = agent.step(AgentEvent::Heard("hey robot".into()), &ctx(), &mut rng);
        assert_eq!(agent.state(), &AgentState::Greeted);
        assert_eq!(out.spoken.len(), 1);
        assert_eq!(out.spoken[0].message.body, MessageBody::Greeting);
    }

    #[test]
    fn garbled_wake_word_does_nothing() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut agent = volunteer_agent("Rob", false);
        let out = agent.step(
            AgentEvent::Heard("hay robe it hi i am bot".into()),
            &ctx(),
            &mut rng,
        );
        assert_eq!(agent.state(), &AgentState::Dormant);
        assert!(out.spoken.is_empty());
    }

    #[test]
    fn initiator_speaks_first_and_volunteers() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut agent = volunteer_agent("Bot", true);
        let out = agent.step(AgentEvent::Tick, &ctx(), &mut rng);
        assert_eq!(out.spoken.len(), 1);
        let greeting = out.spoken[0].utterance.text();
        assert!(greeting.starts_with("hey robot"), "{greeting}");
        assert_eq!(agent.state(), &AgentState::Greeted);

        agent.step(AgentEvent::Tick, &ctx(), &mut rng); // Greeted -> Selecting
        let out = agent.step(AgentEvent::Tick, &ctx(), &mut rng);
        assert_eq!(out.spoken.len(), 1);
        let m = &out.spoken[0].message;
        match m.body {
            MessageBody::TaskClaim(k) => assert!((1..=5).contains(&k)),
            ref other => panic!("expected a claim, got {other:?}"),
        }
        assert_eq!(m.addressee, Addressee::Group("team plant".into()));
    }

    #[test]
    fn coordinator_commands_a_known_robot_by_task_name() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut coordinator = RobotAgent::new(AgentSetup {
            id: id("Bot"),
            groups: vec!["team plant".into()],
            mode: AgentMode::Coordinator,
            pose: Point::new(0.0, 0.0),
            speed_cm_per_tick: 10.0,
            wake_word: "hey robot".into(),
            repo: TaskRepository::new([(
                1,
                "water the yellow rose".to_string(),
                Point::new(50.0, 0.0),
            )])
            .unwrap(),
            initiator: true,
            awaits_commands: false,
        });
        coordinator.step(AgentEvent::Tick, &ctx(), &mut rng); // greet
        coordinator.step(
            AgentEvent::Heard("hey robot Hi Bot, I am Rob".into()),
            &ctx(),
            &mut rng,
        );
        coordinator.step(AgentEvent::Tick, &ctx(), &mut rng); // -> Selecting
        let out = coordinator.step(AgentEvent::Tick, &ctx(), &mut rng);
        assert_eq!(out.spoken.len(), 1);
        let m = &out.spoken[0].message;
        assert_eq!(m.addressee, Addressee::Robot(id("Rob")));
        assert_eq!(m.body, MessageBody::Command("water the yellow rose".into()));
        assert_eq!(
            out.spoken[0].utterance.text(),
            "hey robot Hi Rob, I am Bot, water the yellow rose"
        );
        // The coordinator books the assignment in its own replica.
        assert_eq!(
            coordinator.repo.get(1).unwrap().status,
            TaskStatus::Claimed(id("Rob"))
        );
        // It never executes tasks itself.
        assert_eq!(coordinator.state(), &AgentState::Selecting);
    }

    #[test]
    fn same_seed_same_pick_sequence() {
        let picks = |seed: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut agent = volunteer_agent("Bot", true);
            let mut claims = Vec::new();
            for _ in 0..200 {
                let out = agent.step(AgentEvent::Tick, &ctx(), &mut rng);
                for spoken in out.spoken {
                    if let MessageBody::TaskClaim(k) = spoken.message.body {
                        claims.push(k);
                    }
                }
            }
            claims
        };
        assert_eq!(picks(7), picks(7));
        assert!(!picks(7).is_empty());
    }

    #[test]
    fn volunteer_never_claims_claimed_tasks() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut agent = volunteer_agent("Bot", true);
        // Every other task is already claimed by Rob before Bot wakes.
        for task in [1, 3, 5] {
            agent.repo.claim(&id("Rob"), task).unwrap();
        }
        let mut claims = Vec::new();
        for _ in 0..300 {
            let out = agent.step(AgentEvent::Tick, &ctx(), &mut rng);
            for spoken in out.spoken {
                if let MessageBody::TaskClaim(k) = spoken.message.body {
                    claims.push(k);
                }
            }
        }
        claims.sort_unstable();
        claims.dedup();
        assert_eq!(claims, vec![2, 4], "only tasks 2 and 4 were claimable");
        assert!(agent.is_done());
    }

    #[test]
    fn claim_settles_then_executes_with_one_reannouncement() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut agent = volunteer_agent("Bot", true);
        let mut claim_count = 0;
        let mut ticks_to_execute = 0;
        for t in 1..=40 {
            let out = agent.step(AgentEvent::Tick, &ctx(), &mut rng);
            claim_count += out
                .spoken
                .iter()
                .filter(|s| matches!(s.message.body, MessageBody::TaskClaim(_)))
                .count();
            if matches!(agent.state(), AgentState::Executing { .. }) {
                ticks_to_execute = t;
                break;
            }
        }
        assert_eq!(claim_count, 2, "initial claim plus one re-announcement");
        // greet (1), greeted->selecting (2), claim (3), settle (4 ticks)
        assert_eq!(ticks_to_execute, 3 + 4);
    }

    #[test]
    fn kinematics_arrival_after_ceil_dist_over_speed_ticks() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut agent = volunteer_agent("Bot", true);
        // Force-execute task 1 at (0, 40): distance 40, speed 10 -> 4 ticks.
        agent.repo.claim(&id("Bot"), 1).unwrap();
        agent.state = AgentState::Executing {
            task_id: 1,
            target: agent.repo.get(1).unwrap().target,
        };
        let mut ticks = 0;
        loop {
            let out = agent.step(AgentEvent::Tick, &ctx(), &mut rng);
            ticks += 1;
            if let Some(spoken) = out.spoken.first() {
                assert_eq!(spoken.message.body, MessageBody::TaskComplete(1));
                break;
            }
            assert!(ticks < 100, "never arrived");
        }
        assert_eq!(ticks, 4);
        assert_eq!(
            agent.repo.get(1).unwrap().status,
            TaskStatus::Completed(id("Bot"))
        );
    }

    #[test]
    fn distance_between_agents() {
        let a = volunteer_agent("Rob", false);
        let mut b = volunteer_agent("Bot", false);
        assert_eq!(distance_between(&a, &b), 0.0);
        b.pose = Point::new(30.0, 40.0);
        assert_eq!(distance_between(&a, &b), 50.0);
        // Moving straight away at speed v for k ticks adds k*v.
        let d0 = distance_between(&a, &b);
        let away = Point::new(300.0, 400.0);
        for k in 1..=5u32 {
            b.pose = geom::step_toward(b.pose, away, 10.0);
            assert!((distance_between(&a, &b) - (d0 + f64::from(k) * 10.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn command_claims_and_executes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut worker = volunteer_agent("Rob", false);
        worker.awaits_commands = true;
        worker.step(
            AgentEvent::Heard("hey robot hi i am bot".into()),
            &ctx(),
            &mut rng,
        );
        let out = worker.step(
            AgentEvent::Heard("hey robot hi rob i am bot water the yellow plant".into()),
            &ctx(),
            &mut rng,
        );
        // The claim acknowledgement goes out and execution starts.
        assert!(matches!(
            worker.state(),
            AgentState::Executing { task_id: 5, .. }
        ));
        assert!(out
            .spoken
            .iter()
            .any(|s| s.message.body == MessageBody::TaskClaim(5)));
        assert_eq!(
            worker.repo.get(5).unwrap().status,
            TaskStatus::Claimed(id("Rob"))
        );
    }

    #[test]
    fn garbled_command_recovers_through_lexicon() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut worker = volunteer_agent("Rob", false);
        worker.awaits_commands = true;
        // "indigo" was transcribed as "in the go" in transit.
        let out = worker.step(
            AgentEvent::Heard("hey robot hi rob i am bot water the in the go plant".into()),
            &ctx(),
            &mut rng,
        );
        assert!(matches!(
            worker.state(),
            AgentState::Executing { task_id: 3, .. }
        ));
        assert!(!out.spoken.is_empty());
    }

    #[test]
    fn command_without_wake_word_is_logged_and_ignored() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut worker = volunteer_agent("Rob", false);
        let out = worker.step(
            AgentEvent::Heard("hi rob i am bot water the yellow plant".into()),
            &ctx(),
            &mut rng,
        );
        assert_eq!(worker.state(), &AgentState::Dormant);
        assert!(out.spoken.is_empty());
        assert_eq!(out.violations.len(), 1);
        assert!(out.violations[0].detail.contains("no wake word"));
    }

    #[test]
    fn command_while_busy_is_not_preempted() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut worker = volunteer_agent("Rob", false);
        worker.awaits_commands = true;
        worker.step(
            AgentEvent::Heard("hey robot hi rob i am bot water the yellow plant".into()),
            &ctx(),
            &mut rng,
        );
        assert!(matches!(
            worker.state(),
            AgentState::Executing { task_id: 5, .. }
        ));
        let out = worker.step(
            AgentEvent::Heard("hey robot hi rob i am bot water the green plant".into()),
            &ctx(),
            &mut rng,
        );
        // Still on the first task; the conflicting command is only logged.
        assert!(matches!(
            worker.state(),
            AgentState::Executing { task_id: 5, .. }
        ));
        assert_eq!(out.violations.len(), 1);
    }

    #[test]
    fn conflicting_claims_resolve_to_lower_id_on_both_sides() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ctx = ctx();

        // Rob (higher id) claimed task 2 locally, then hears Bot claim it.
        let mut rob = volunteer_agent("Rob", false);
        rob.state = AgentState::Greeted;
        rob.repo.claim(&id("Rob"), 2).unwrap();
        rob.state = AgentState::Executing {
            task_id: 2,
            target: rob.repo.get(2).unwrap().target,
        };
        rob.step(
            AgentEvent::Heard("hey robot hi team plant i am bot i will complete task 2".into()),
            &ctx,
            &mut rng,
        );
        assert_eq!(
            rob.repo.get(2).unwrap().status,
            TaskStatus::Claimed(id("Bot"))
        );
        assert_eq!(
            rob.state(),
            &AgentState::Selecting,
            "loser abandons execution"
        );

        // Bot (lower id) claimed task 2 locally, then hears Rob claim it.
        let mut bot = volunteer_agent("Bot", false);
        bot.state = AgentState::Greeted;
        bot.repo.claim(&id("Bot"), 2).unwrap();
        let out = bot.step(
            AgentEvent::Heard("hey robot hi team plant i am rob i will complete task 2".into()),
            &ctx,
            &mut rng,
        );
        assert_eq!(
            bot.repo.get(2).unwrap().status,
            TaskStatus::Claimed(id("Bot"))
        );
        assert!(
            out.spoken
                .iter()
                .any(|s| s.message.body == MessageBody::TaskClaim(2)),
            "winner re-announces the claim"
        );
    }

    #[test]
    fn completion_beats_standing_claim() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut rob = volunteer_agent("Rob", false);
        rob.state = AgentState::Greeted;
        rob.repo.claim(&id("Rob"), 2).unwrap();
        rob.state = AgentState::Executing {
            task_id: 2,
            target: rob.repo.get(2).unwrap().target,
        };
        let out = rob.step(
            AgentEvent::Heard("hey robot hi team plant i am bot i have completed task 2".into()),
            &ctx(),
            &mut rng,
        );
        assert_eq!(
            rob.repo.get(2).unwrap().status,
            TaskStatus::Completed(id("Bot"))
        );
        assert_eq!(rob.state(), &AgentState::Selecting);
        assert_eq!(out.violations.len(), 1);
    }

    #[test]
    fn status_broadcasts_teach_the_roster() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut agent = volunteer_agent("Rob", false);
        agent.state = AgentState::Selecting;
        let out = agent.step(
            AgentEvent::Heard(
                "hey robot Hi all, I am X, member of Team A, completing task: water the red rose"
                    .into(),
            ),
            &ctx(),
            &mut rng,
        );
        assert!(agent.known_peers().contains(&id("X")));
        assert!(out.spoken.is_empty() && out.violations.is_empty());
    }

    #[test]
    fn claim_for_unknown_task_is_logged() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut agent = volunteer_agent("Rob", false);
        agent.state = AgentState::Selecting;
        let out = agent.step(
            AgentEvent::Heard("hey robot hi team plant i am bot i will complete task 99".into()),
            &ctx(),
            &mut rng,
        );
        assert_eq!(out.violations.len(), 1);
        assert!(out.violations[0].detail.contains("unknown task"));
    }

    #[test]
    fn spoke_event_is_a_no_op() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut agent = volunteer_agent("Rob", false);
        let utterance =
            Utterance::speak("hey robot hi all i am rob", PronunciationTable::builtin());
        let before = format!("{agent:?}");
        let out = agent.step(AgentEvent::Spoke(utterance), &ctx(), &mut rng);
        assert!(out.spoken.is_empty() && out.violations.is_empty());
        assert_eq!(format!("{agent:?}"), before);
    }

    #[test]
    fn done_when_replica_has_nothing_left() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut agent = volunteer_agent("Rob", false);
        agent.state = AgentState::Selecting;
        for task in 1..=5 {
            agent
                .repo
                .apply_announcement(&Message {
                    addressee: Addressee::All,
                    speaker: id("Bot"),
                    body: MessageBody::TaskClaim(task),
                })
                .unwrap();
        }
        agent.step(AgentEvent::Tick, &ctx(), &mut rng);
        assert!(agent.is_done());
    }

    #[test]
    fn plant_names_cover_confusable_keywords() {
        let table = ConfusionTable::builtin();
        let repo = five_plants();
        let confusable = repo
            .tasks()
            .filter(|t| t.name.split_whitespace().any(|w| table.contains(w)))
            .count();
        assert_eq!(confusable, 3); // indigo, orange, yellow
    }
}
