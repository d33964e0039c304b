//! The human-readable record of everything said during a run.
//!
//! One line per utterance, tick-ordered, with the delivery outcome spelled
//! out. Anyone reading the transcript can follow the whole conversation:
//!
//! ```text
//! [3] Bot->team plant (d=100cm): "hey robot Hi team plant, I am Bot, I will complete task: 2" [delivered]
//! ```

use std::fmt;

use crate::grammar::{Addressee, MessageBody, RobotId};

/// Semantic kind of a spoken message, kept alongside the raw text so
/// experiment harnesses do not need to re-parse the transcript.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MessageKind {
    Greeting,
    TeamAndTask,
    Command,
    TaskClaim,
    TaskComplete,
}

impl From<&MessageBody> for MessageKind {
    fn from(body: &MessageBody) -> Self {
        match body {
            MessageBody::Greeting => MessageKind::Greeting,
            MessageBody::TeamAndTask { .. } => MessageKind::TeamAndTask,
            MessageBody::Command(_) => MessageKind::Command,
            MessageBody::TaskClaim(_) => MessageKind::TaskClaim,
            MessageBody::TaskComplete(_) => MessageKind::TaskComplete,
        }
    }
}

/// What happened to an utterance on its way to the listener the transcript
/// tracks (the addressed robot, or the nearest listener for broadcasts).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeliveryOutcome {
    Delivered,
    Lost,
    Garbled { received: String },
}

impl fmt::Display for DeliveryOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeliveryOutcome::Delivered => f.write_str("delivered"),
            DeliveryOutcome::Lost => f.write_str("lost"),
            DeliveryOutcome::Garbled { received } => write!(f, "garbled:\"{received}\""),
        }
    }
}

/// One spoken utterance and its fate.
#[derive(Debug, Clone, PartialEq)]
pub struct TranscriptEntry {
    pub tick: u64,
    pub speaker: RobotId,
    pub addressee: Addressee,
    /// Distance to the tracked listener at the moment of speaking.
    pub distance_cm: f64,
    pub spoken_text: String,
    pub kind: MessageKind,
    pub outcome: DeliveryOutcome,
}

impl fmt::Display for TranscriptEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}->{} (d={:.0}cm): \"{}\" [{}]",
            self.tick,
            self.speaker,
            self.addressee,
            self.distance_cm,
            self.spoken_text,
            self.outcome
        )
    }
}

/// Render a whole transcript, one entry per line.
pub fn transcript_text(entries: &[TranscriptEntry]) -> String {
    let mut out = String::new();
    for entry in entries {
        out.push_str(&entry.to_string());
        out.push('\n');
    }
    out
}
