//! Scenario configuration: the JSON-shaped description of a run.
//!
//! A scenario names its agents (id, groups, mode, start pose, speed), its
//! tasks (id, name, 2D target in centimetres), the channel parameters, and
//! the run controls (seed, noise level, tick limit). Every field that has a
//! sensible default can be omitted from the file; the seed cannot.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agent::AgentMode;
use crate::channel::ChannelModel;
use crate::geom::Point;
use crate::grammar::{GrammarError, RobotId};
use crate::phonetics::AlternativeLexicon;
use crate::tasks::{TaskError, TaskRepository};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("invalid robot id: {0}")]
    Grammar(#[from] GrammarError),
    #[error("invalid task list: {0}")]
    Task(#[from] TaskError),
}

/// Which coordination pattern the scenario exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioMode {
    /// A coordinator robot assigns named tasks to the others.
    Coordinating,
    /// Robots claim tasks for themselves from the shared list.
    Volunteering,
    /// The five-plant watering scenario (volunteering robots).
    WaterPlants,
}

impl ScenarioMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioMode::Coordinating => "coordinating",
            ScenarioMode::Volunteering => "volunteering",
            ScenarioMode::WaterPlants => "water_plants",
        }
    }
}

/// One robot in the roster.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentConfig {
    pub id: String,
    #[serde(default)]
    pub groups: Vec<String>,
    pub mode: AgentMode,
    pub pose: Point,
    #[serde(default = "default_speed")]
    pub speed_cm_per_tick: f64,
}

/// One task in the repository.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskConfig {
    pub id: u32,
    pub name: String,
    pub target: Point,
}

/// Channel parameters; field for field the [`ChannelModel`], plus an
/// `ideal` switch that overrides everything with a lossless link.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    #[serde(default)]
    pub ideal: bool,
    #[serde(default = "default_plateau")]
    pub plateau_success: f64,
    #[serde(default = "default_knee_offset")]
    pub knee_offset_cm: f64,
    #[serde(default = "default_knee_steepness")]
    pub knee_steepness_cm: f64,
    #[serde(default = "default_confusion")]
    pub confusion_prob_at_plateau: f64,
    #[serde(default = "default_noise_table")]
    pub noise_table: BTreeMap<i32, f64>,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig {
            ideal: false,
            plateau_success: default_plateau(),
            knee_offset_cm: default_knee_offset(),
            knee_steepness_cm: default_knee_steepness(),
            confusion_prob_at_plateau: default_confusion(),
            noise_table: default_noise_table(),
        }
    }
}

impl ChannelConfig {
    pub fn to_model(&self) -> ChannelModel {
        if self.ideal {
            let mut model = ChannelModel::ideal();
            for noise in self.noise_table.keys() {
                model.set_pivotal_distance(*noise, 1e12);
            }
            return model;
        }
        let mut model = ChannelModel {
            plateau_success: self.plateau_success,
            knee_offset_cm: self.knee_offset_cm,
            knee_steepness_cm: self.knee_steepness_cm,
            confusion_prob_at_plateau: self.confusion_prob_at_plateau,
            ..ChannelModel::default()
        };
        for (noise, pivot) in &self.noise_table {
            model.set_pivotal_distance(*noise, *pivot);
        }
        model
    }

    pub fn from_model(model: &ChannelModel) -> Self {
        ChannelConfig {
            ideal: false,
            plateau_success: model.plateau_success,
            knee_offset_cm: model.knee_offset_cm,
            knee_steepness_cm: model.knee_steepness_cm,
            confusion_prob_at_plateau: model.confusion_prob_at_plateau,
            noise_table: model.noise_levels().collect(),
        }
    }
}

fn default_speed() -> f64 {
    10.0
}
fn default_plateau() -> f64 {
    0.95
}
fn default_knee_offset() -> f64 {
    20.0
}
fn default_knee_steepness() -> f64 {
    10.0
}
fn default_confusion() -> f64 {
    0.02
}
fn default_noise_table() -> BTreeMap<i32, f64> {
    BTreeMap::from([(20, 120.0)])
}
fn default_noise_db() -> i32 {
    20
}
fn default_tick_duration() -> f64 {
    0.1
}
fn default_tick_limit() -> u64 {
    100_000
}
fn default_wake_word() -> String {
    "hey robot".to_string()
}

/// A complete, runnable scenario description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub seed: u64,
    pub mode: ScenarioMode,
    #[serde(default = "default_noise_db")]
    pub noise_db: i32,
    #[serde(default = "default_tick_duration")]
    pub tick_duration_s: f64,
    #[serde(default = "default_tick_limit")]
    pub tick_limit: u64,
    #[serde(default = "default_wake_word")]
    pub wake_word: String,
    pub agents: Vec<AgentConfig>,
    pub tasks: Vec<TaskConfig>,
    #[serde(default)]
    pub channel: ChannelConfig,
    /// Extra alternative phrases, keyword → phrases, merged into the
    /// builtin recovery lexicon for this scenario.
    #[serde(default)]
    pub lexicon: BTreeMap<String, Vec<String>>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Scenario, ScenarioError> {
        let scenario: Scenario = serde_json::from_str(text)?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// The five-plant watering scenario: Rob and Bot volunteering over an
    /// ideal channel.
    pub fn water_plants(seed: u64) -> Scenario {
        let plants = [
            ("water the green plant", 50.0, 120.0),
            ("water the violet plant", -80.0, 60.0),
            ("water the indigo plant", 150.0, 90.0),
            ("water the orange plant", -40.0, -100.0),
            ("water the yellow plant", 120.0, -70.0),
        ];
        Scenario {
            seed,
            mode: ScenarioMode::WaterPlants,
            noise_db: default_noise_db(),
            tick_duration_s: default_tick_duration(),
            tick_limit: default_tick_limit(),
            wake_word: default_wake_word(),
            agents: vec![
                AgentConfig {
                    id: "Rob".into(),
                    groups: vec!["team plant".into()],
                    mode: AgentMode::Volunteer,
                    pose: Point::new(0.0, 0.0),
                    speed_cm_per_tick: default_speed(),
                },
                AgentConfig {
                    id: "Bot".into(),
                    groups: vec!["team plant".into()],
                    mode: AgentMode::Volunteer,
                    pose: Point::new(100.0, 0.0),
                    speed_cm_per_tick: default_speed(),
                },
            ],
            tasks: plants
                .iter()
                .enumerate()
                .map(|(i, (name, x, y))| TaskConfig {
                    id: u32::try_from(i).expect("small index") + 1,
                    name: (*name).to_string(),
                    target: Point::new(*x, *y),
                })
                .collect(),
            channel: ChannelConfig {
                ideal: true,
                ..ChannelConfig::default()
            },
            lexicon: BTreeMap::new(),
        }
    }

    /// The validated task repository every robot starts from.
    pub fn build_repository(&self) -> Result<TaskRepository, ScenarioError> {
        Ok(TaskRepository::new(
            self.tasks.iter().map(|t| (t.id, t.name.clone(), t.target)),
        )?)
    }

    /// The builtin recovery lexicon plus this scenario's extensions.
    pub fn build_lexicon(&self) -> Result<AlternativeLexicon, ScenarioError> {
        let mut lexicon = AlternativeLexicon::builtin().clone();
        for (keyword, phrases) in &self.lexicon {
            for phrase in phrases {
                lexicon
                    .add_alternative(keyword, phrase)
                    .map_err(|err| ScenarioError::Invalid(err.to_string()))?;
            }
        }
        Ok(lexicon)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.agents.is_empty() {
            return Err(ScenarioError::Invalid("no agents configured".into()));
        }
        if matches!(
            self.mode,
            ScenarioMode::Coordinating | ScenarioMode::Volunteering
        ) && self.agents.len() < 2
        {
            return Err(ScenarioError::Invalid(format!(
                "{} mode needs at least two agents",
                self.mode.as_str()
            )));
        }
        if self.tick_limit == 0 {
            return Err(ScenarioError::Invalid("tick_limit must be positive".into()));
        }
        if self.wake_word.split_whitespace().next().is_none() {
            return Err(ScenarioError::Invalid("wake word must not be empty".into()));
        }
        let mut ids: Vec<RobotId> = Vec::new();
        for agent in &self.agents {
            let id = RobotId::new(&agent.id)?;
            if ids.contains(&id) {
                return Err(ScenarioError::Invalid(format!("duplicate robot id {id}")));
            }
            ids.push(id);
            if agent.speed_cm_per_tick <= 0.0 {
                return Err(ScenarioError::Invalid(format!(
                    "robot {} needs a positive speed",
                    agent.id
                )));
            }
        }
        let coordinators = self
            .agents
            .iter()
            .filter(|a| a.mode == AgentMode::Coordinator)
            .count();
        match self.mode {
            ScenarioMode::Coordinating => {
                if coordinators != 1 {
                    return Err(ScenarioError::Invalid(format!(
                        "coordinating mode needs exactly one coordinator, found {coordinators}"
                    )));
                }
            }
            ScenarioMode::Volunteering | ScenarioMode::WaterPlants => {
                if coordinators > 0 {
                    return Err(ScenarioError::Invalid(
                        "volunteering scenarios have no coordinator".into(),
                    ));
                }
            }
        }
        self.build_repository()?;
        self.build_lexicon()?;
        let model = self.channel.to_model();
        if !(model.plateau_success > 0.0 && model.plateau_success <= 1.0) {
            return Err(ScenarioError::Invalid(
                "plateau_success must be in (0, 1]".into(),
            ));
        }
        if model.knee_steepness_cm.is_nan() || model.knee_steepness_cm <= 0.0 {
            return Err(ScenarioError::Invalid(
                "knee_steepness_cm must be positive".into(),
            ));
        }
        if !(0.0..=1.0).contains(&model.confusion_prob_at_plateau) {
            return Err(ScenarioError::Invalid(
                "confusion_prob_at_plateau must be a probability".into(),
            ));
        }
        if model.pivotal_distance(self.noise_db).is_err() {
            return Err(ScenarioError::Invalid(format!(
                "no pivotal distance configured for {} dB",
                self.noise_db
            )));
        }
        Ok(())
    }
}
