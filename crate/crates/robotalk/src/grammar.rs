//! The verbal message language spoken between robots.
//!
//! Every message names its speaker, so listeners always know who is talking,
//! and optionally an addressee (a specific robot, a named group, or `all`).
//! The grammar, with commas optional because they are not audible on the
//! acoustic path:
//!
//! ```text
//! message        ::= salutation addressee? "," speaker-clause ("," statement)?
//! salutation     ::= "hi" | "hello"
//! addressee      ::= "all" | robot-id | group-name
//! robot-id       ::= token                   ; letters and digits, one token
//! group-name     ::= token token+            ; two or more tokens
//! speaker-clause ::= "i am" robot-id
//! statement      ::= membership | claim | completion | command
//! membership     ::= "member of" phrase "completing task" ":"? phrase
//! claim          ::= "i will complete task" ":"? integer
//! completion     ::= "i have completed task" ":"? integer
//! command        ::= word+
//! ```
//!
//! Parsing is case-insensitive and keyword-anchored: `hi`/`hello`, `i am`,
//! `member of`, `completing task`, `i will complete task` and
//! `i have completed task` delimit the segments whether or not punctuation
//! survived transcription. A single-token addressee is a robot id; a
//! multi-token one is a group name, which matches how teams are named in
//! practice ("team a", "team plant").
//!
//! All functions here are pure; there is no shared state.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use thiserror::Error;

/// Punctuation that may or may not survive the spoken path.
const PUNCTUATION: &[char] = &[',', ':', '.', '!', '?', ';'];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrammarError {
    /// No grammar production matches the text.
    #[error("malformed message: {0}")]
    MalformedMessage(String),
    /// The mandatory "I am `<robot>`" segment is absent.
    #[error("missing speaker: no \"I am <robot>\" segment")]
    MissingSpeaker,
    /// A robot identifier must be one non-empty token of letters and digits.
    #[error("invalid robot id {0:?}")]
    InvalidRobotId(String),
}

/// A robot's unique identifier. Comparison, ordering and hashing are
/// case-insensitive; the original spelling is kept for display.
#[derive(Debug, Clone)]
pub struct RobotId(String);

impl RobotId {
    pub fn new(name: &str) -> Result<Self, GrammarError> {
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric()) {
            return Err(GrammarError::InvalidRobotId(name.to_string()));
        }
        Ok(RobotId(name.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    fn lower_bytes(&self) -> impl Iterator<Item = u8> + '_ {
        self.0.bytes().map(|b| b.to_ascii_lowercase())
    }
}

impl PartialEq for RobotId {
    fn eq(&self, other: &Self) -> bool {
        self.0.eq_ignore_ascii_case(&other.0)
    }
}

impl Eq for RobotId {}

impl PartialOrd for RobotId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RobotId {
    fn cmp(&self, other: &Self) -> Ordering {
        self.lower_bytes().cmp(other.lower_bytes())
    }
}

impl Hash for RobotId {
    fn hash<H: Hasher>(&self, state: &mut H) {
        for b in self.lower_bytes() {
            state.write_u8(b);
        }
    }
}

impl fmt::Display for RobotId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Who a message is meant for.
#[derive(Debug, Clone)]
pub enum Addressee {
    /// Every robot in earshot.
    All,
    /// One specific robot.
    Robot(RobotId),
    /// A named group such as "team plant".
    Group(String),
}

impl PartialEq for Addressee {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Addressee::All, Addressee::All) => true,
            (Addressee::Robot(a), Addressee::Robot(b)) => a == b,
            (Addressee::Group(a), Addressee::Group(b)) => a.eq_ignore_ascii_case(b),
            _ => false,
        }
    }
}

impl Eq for Addressee {}

impl fmt::Display for Addressee {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Addressee::All => f.write_str("all"),
            Addressee::Robot(id) => f.write_str(id.as_str()),
            Addressee::Group(g) => f.write_str(g),
        }
    }
}

/// The semantic payload of a message.
#[derive(Debug, Clone)]
pub enum MessageBody {
    /// "Hi, I am X" with nothing more: identifier exchange.
    Greeting,
    /// Status broadcast: team membership plus the task being worked on.
    TeamAndTask { team: String, task_name: String },
    /// An instruction for the addressee, e.g. "water the yellow rose".
    Command(String),
    /// The speaker assigns the numbered task to itself.
    TaskClaim(u32),
    /// The speaker reports the numbered task finished.
    TaskComplete(u32),
}

impl PartialEq for MessageBody {
    fn eq(&self, other: &Self) -> bool {
        use MessageBody::*;
        match (self, other) {
            (Greeting, Greeting) => true,
            (
                TeamAndTask {
                    team: t1,
                    task_name: n1,
                },
                TeamAndTask {
                    team: t2,
                    task_name: n2,
                },
            ) => t1.eq_ignore_ascii_case(t2) && n1.eq_ignore_ascii_case(n2),
            (Command(a), Command(b)) => a.eq_ignore_ascii_case(b),
            (TaskClaim(a), TaskClaim(b)) => a == b,
            (TaskComplete(a), TaskComplete(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for MessageBody {}

/// A parsed utterance. Equality is case-insensitive on every text field,
/// matching a channel on which casing is not spoken.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub addressee: Addressee,
    pub speaker: RobotId,
    pub body: MessageBody,
}

/// Split into tokens, stripping punctuation from token edges. Returns the
/// original-case tokens; matching lowercases on the fly.
fn tokenize(text: &str) -> Vec<&str> {
    text.split_whitespace()
        .map(|t| t.trim_matches(PUNCTUATION))
        .filter(|t| !t.is_empty())
        .collect()
}

fn eq_token(token: &str, keyword: &str) -> bool {
    token.eq_ignore_ascii_case(keyword)
}

/// Position of the first occurrence of the consecutive keyword sequence.
fn find_seq(tokens: &[&str], seq: &[&str]) -> Option<usize> {
    if tokens.len() < seq.len() {
        return None;
    }
    (0..=tokens.len() - seq.len()).find(|&i| {
        seq.iter()
            .enumerate()
            .all(|(j, k)| eq_token(tokens[i + j], k))
    })
}

fn starts_with_seq(tokens: &[&str], seq: &[&str]) -> bool {
    find_seq(tokens, seq) == Some(0)
}

fn parse_task_id(tokens: &[&str]) -> Result<u32, GrammarError> {
    if tokens.len() != 1 {
        return Err(GrammarError::MalformedMessage(
            "expected a single task number".into(),
        ));
    }
    match tokens[0].parse::<u32>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(GrammarError::MalformedMessage(format!(
            "task id must be a positive integer, got {:?}",
            tokens[0]
        ))),
    }
}

fn parse_statement(tokens: &[&str]) -> Result<MessageBody, GrammarError> {
    if tokens.is_empty() {
        return Ok(MessageBody::Greeting);
    }
    if starts_with_seq(tokens, &["member", "of"]) {
        let rest = &tokens[2..];
        let split = find_seq(rest, &["completing", "task"]).ok_or_else(|| {
            GrammarError::MalformedMessage("membership without \"completing task\"".into())
        })?;
        let team = &rest[..split];
        let name = &rest[split + 2..];
        if team.is_empty() || name.is_empty() {
            return Err(GrammarError::MalformedMessage(
                "membership needs a team name and a task name".into(),
            ));
        }
        return Ok(MessageBody::TeamAndTask {
            team: team.join(" "),
            task_name: name.join(" "),
        });
    }
    if starts_with_seq(tokens, &["i", "will", "complete", "task"]) {
        return parse_task_id(&tokens[4..]).map(MessageBody::TaskClaim);
    }
    if starts_with_seq(tokens, &["i", "have", "completed", "task"]) {
        return parse_task_id(&tokens[4..]).map(MessageBody::TaskComplete);
    }
    Ok(MessageBody::Command(tokens.join(" ")))
}

/// Parse one finished utterance into its semantic form.
///
/// A greeting with no explicit addressee is a broadcast: it precedes the
/// identifier exchange, so there is nobody to name yet.
pub fn parse_message(text: &str) -> Result<Message, GrammarError> {
    let tokens = tokenize(text);
    if tokens.is_empty() {
        return Err(GrammarError::MalformedMessage("empty utterance".into()));
    }
    let anchor = find_seq(&tokens, &["i", "am"]).ok_or(GrammarError::MissingSpeaker)?;
    if anchor + 2 >= tokens.len() {
        return Err(GrammarError::MissingSpeaker);
    }
    if !(eq_token(tokens[0], "hi") || eq_token(tokens[0], "hello")) {
        return Err(GrammarError::MalformedMessage(format!(
            "expected a salutation, got {:?}",
            tokens[0]
        )));
    }
    let speaker = RobotId::new(tokens[anchor + 2]).map_err(|_| {
        GrammarError::MalformedMessage(format!(
            "speaker {:?} is not a robot id",
            tokens[anchor + 2]
        ))
    })?;

    let addr_tokens = &tokens[1..anchor];
    let addressee = match addr_tokens {
        [] => Addressee::All,
        [one] if eq_token(one, "all") => Addressee::All,
        [one] => Addressee::Robot(RobotId::new(one).map_err(|_| {
            GrammarError::MalformedMessage(format!("addressee {one:?} is not a robot id"))
        })?),
        many => Addressee::Group(many.join(" ")),
    };

    let body = parse_statement(&tokens[anchor + 3..])?;
    Ok(Message {
        addressee,
        speaker,
        body,
    })
}

/// Render the canonical surface form of a message.
///
/// `parse_message(render_message(m)) == m` for every well-formed message.
pub fn render_message(m: &Message) -> String {
    let head = format!("Hi {}, I am {}", m.addressee, m.speaker);
    match &m.body {
        MessageBody::Greeting => head,
        MessageBody::TeamAndTask { team, task_name } => {
            format!("{head}, member of {team}, completing task: {task_name}")
        }
        MessageBody::Command(statement) => format!("{head}, {statement}"),
        MessageBody::TaskClaim(id) => format!("{head}, I will complete task: {id}"),
        MessageBody::TaskComplete(id) => format!("{head}, I have completed task: {id}"),
    }
}

/// Is a message with addressee `a` meant for the robot `self_id`, given the
/// groups it belongs to? Pure function of its inputs.
pub fn resolve_addressee(a: &Addressee, self_id: &RobotId, self_groups: &[String]) -> bool {
    match a {
        Addressee::All => true,
        Addressee::Robot(id) => id == self_id,
        Addressee::Group(g) => self_groups.iter().any(|mine| mine.eq_ignore_ascii_case(g)),
    }
}
