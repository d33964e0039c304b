//! Deterministic simulation: scenarios, the tick engine, transcripts, and
//! the experiment harnesses.

mod engine;
mod experiments;
mod scenario;
mod transcript;

pub use engine::{run_scenario, RunOutcome, RunReport, SimError};
pub use experiments::{
    lexicon_ablation, mode_experiment, recognition_rate, wake_word_experiment, write_trials_csv,
    AblationParams, ModeParams, TrialResult, WakeWordParams,
};
pub use scenario::{AgentConfig, ChannelConfig, Scenario, ScenarioError, ScenarioMode, TaskConfig};
pub use transcript::{transcript_text, DeliveryOutcome, MessageKind, TranscriptEntry};
