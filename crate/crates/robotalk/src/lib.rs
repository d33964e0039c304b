//! robotalk — verbal robot-to-robot coordination at desk scale.
//!
//! Robots in this library coordinate the way people in a room do: by talking.
//! Every exchange is a short, human-readable sentence ("Hi, Rob, I am Bot,
//! water the yellow rose"), so anyone within earshot of the transcript can
//! follow, audit, or join the conversation. No network infrastructure is
//! assumed anywhere: each robot keeps its own replica of the task list and
//! updates it purely from what it hears.
//!
//! The crate has six parts:
//!
//! * [`grammar`] — the message language: parsing, rendering, addressing.
//! * [`phonetics`] — pronunciation collapse, mis-transcription sampling, and
//!   the alternative-phrase lexicon that repairs known mis-hearings.
//! * [`channel`] — the simulated acoustic link: distance- and noise-dependent
//!   delivery with a sharp knee past the pivotal distance, plus per-keyword
//!   confusion on delivered utterances.
//! * [`tasks`] — the per-robot replicated task repository with claim and
//!   completion semantics.
//! * [`agent`] — the per-robot protocol state machine: wake word, greeting,
//!   task selection or command handling, movement, announcements.
//! * [`sim`] — the deterministic tick engine, scenario configs, transcripts,
//!   and the experiment harnesses (wake-word range sweep, coordinating vs
//!   volunteering comparison, lexicon ablation).
//!
//! Start with the runnable examples (`cargo run --example water_plants`) or
//! the `robotalk` binary, which exposes the same capabilities as subcommands.

pub mod agent;
pub mod channel;
pub mod cli;
pub mod geom;
pub mod grammar;
pub mod phonetics;
pub mod rng;
pub mod sim;
pub mod tasks;

pub use agent::{AgentEvent, AgentMode, AgentState, RobotAgent};
pub use channel::{ChannelError, ChannelModel, TransmissionOutcome};
pub use geom::Point;
pub use grammar::{
    parse_message, render_message, resolve_addressee, Addressee, GrammarError, Message,
    MessageBody, RobotId,
};
pub use phonetics::{
    AlternativeLexicon, ConfusionTable, PhoneticsError, PronunciationTable, Utterance,
};
pub use sim::{
    lexicon_ablation, mode_experiment, run_scenario, wake_word_experiment, RunOutcome, RunReport,
    Scenario, ScenarioMode, SimError, TranscriptEntry, TrialResult,
};
pub use tasks::{Task, TaskError, TaskId, TaskRepository, TaskStatus};
