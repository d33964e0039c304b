//! The per-robot task repository.
//!
//! Every robot holds an identical initial copy of the task list and keeps it
//! in sync purely by listening: spoken claims and completion reports are
//! applied to the local replica through [`TaskRepository::apply_announcement`].
//! There is no shared store and no network.
//!
//! A task moves `Available → Claimed → Completed`, and the robot that
//! completes a task is the one that claimed it. Two replicas can disagree
//! after message loss; a conflicting claim is surfaced to the caller rather
//! than resolved silently, because resolution (lower robot id wins, after a
//! re-announcement round) is protocol policy, not repository policy.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::geom::Point;
use crate::grammar::{Message, MessageBody, RobotId};

pub type TaskId = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TaskError {
    #[error("unknown task {0}")]
    UnknownTask(TaskId),
    #[error("task {task} is already claimed by {holder}")]
    AlreadyClaimed { task: TaskId, holder: RobotId },
    #[error("task {task} is not claimed by {robot}")]
    NotClaimant { task: TaskId, robot: RobotId },
    #[error("task {task}: local replica says {local}, announcement says {announced}")]
    ConflictingClaim {
        task: TaskId,
        local: RobotId,
        announced: RobotId,
    },
    #[error("duplicate task id {0}")]
    DuplicateTask(TaskId),
    #[error("invalid task: {0}")]
    InvalidTask(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TaskStatus {
    Available,
    Claimed(RobotId),
    Completed(RobotId),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Task {
    pub id: TaskId,
    pub name: String,
    pub target: Point,
    pub status: TaskStatus,
}

/// What applying an announcement did to the replica.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnnouncementEffect {
    /// The claim was recorded.
    Claimed,
    /// The completion was recorded.
    Completed,
    /// The replica already reflected this announcement; nothing changed.
    AlreadyKnown,
    /// The message body was not a claim or a completion.
    NotAnAnnouncement,
}

/// One robot's replica of the task list.
#[derive(Debug, Clone)]
pub struct TaskRepository {
    tasks: BTreeMap<TaskId, Task>,
    version: u64,
}

/// Replica equality is over the replicated state (the tasks). The version
/// counter tracks local mutations and differs between replicas that took
/// different routes to the same state.
impl PartialEq for TaskRepository {
    fn eq(&self, other: &Self) -> bool {
        self.tasks == other.tasks
    }
}

impl TaskRepository {
    pub fn new(
        tasks: impl IntoIterator<Item = (TaskId, String, Point)>,
    ) -> Result<Self, TaskError> {
        let mut map = BTreeMap::new();
        for (id, name, target) in tasks {
            if id == 0 {
                return Err(TaskError::InvalidTask("task ids are positive".into()));
            }
            if name.trim().is_empty() {
                return Err(TaskError::InvalidTask(format!(
                    "task {id} has an empty name"
                )));
            }
            let task = Task {
                id,
                name,
                target,
                status: TaskStatus::Available,
            };
            if map.insert(id, task).is_some() {
                return Err(TaskError::DuplicateTask(id));
            }
        }
        Ok(TaskRepository {
            tasks: map,
            version: 0,
        })
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn get(&self, id: TaskId) -> Option<&Task> {
        self.tasks.get(&id)
    }

    pub fn tasks(&self) -> impl Iterator<Item = &Task> {
        self.tasks.values()
    }

    /// The tasks still up for grabs, in id order.
    pub fn available_tasks(&self) -> Vec<&Task> {
        self.tasks
            .values()
            .filter(|t| t.status == TaskStatus::Available)
            .collect()
    }

    pub fn has_available(&self) -> bool {
        self.tasks
            .values()
            .any(|t| t.status == TaskStatus::Available)
    }

    /// Tasks currently claimed (not yet completed) by `robot`.
    pub fn claimed_by(&self, robot: &RobotId) -> Vec<TaskId> {
        self.tasks
            .values()
            .filter(|t| matches!(&t.status, TaskStatus::Claimed(r) if r == robot))
            .map(|t| t.id)
            .collect()
    }

    /// Number of tasks completed by `robot`.
    pub fn completed_count(&self, robot: &RobotId) -> usize {
        self.tasks
            .values()
            .filter(|t| matches!(&t.status, TaskStatus::Completed(r) if r == robot))
            .count()
    }

    pub fn all_completed(&self) -> bool {
        self.tasks
            .values()
            .all(|t| matches!(t.status, TaskStatus::Completed(_)))
    }

    /// Look a task up by its spoken name, case-insensitively.
    pub fn task_id_by_name(&self, name: &str) -> Option<TaskId> {
        self.tasks
            .values()
            .find(|t| t.name.eq_ignore_ascii_case(name.trim()))
            .map(|t| t.id)
    }

    fn get_mut(&mut self, id: TaskId) -> Result<&mut Task, TaskError> {
        self.tasks.get_mut(&id).ok_or(TaskError::UnknownTask(id))
    }

    /// Record that `robot` claims the task. Fails unless the task is
    /// currently available.
    pub fn claim(&mut self, robot: &RobotId, id: TaskId) -> Result<(), TaskError> {
        let task = self.get_mut(id)?;
        match &task.status {
            TaskStatus::Available => {
                task.status = TaskStatus::Claimed(robot.clone());
                self.version += 1;
                Ok(())
            }
            TaskStatus::Claimed(holder) | TaskStatus::Completed(holder) => {
                Err(TaskError::AlreadyClaimed {
                    task: id,
                    holder: holder.clone(),
                })
            }
        }
    }

    /// Record that `robot` finished the task it had claimed.
    pub fn complete(&mut self, robot: &RobotId, id: TaskId) -> Result<(), TaskError> {
        let task = self.get_mut(id)?;
        match &task.status {
            TaskStatus::Claimed(holder) if holder == robot => {
                task.status = TaskStatus::Completed(robot.clone());
                self.version += 1;
                Ok(())
            }
            _ => Err(TaskError::NotClaimant {
                task: id,
                robot: robot.clone(),
            }),
        }
    }

    /// Fold a heard claim or completion report into the replica.
    ///
    /// Re-applying an announcement the replica already reflects is a no-op.
    /// A completion for a task this replica still thinks is available is
    /// accepted as an implied claim plus completion: the claim announcement
    /// was evidently lost. A claim or completion that contradicts a
    /// different robot's standing claim is surfaced as
    /// [`TaskError::ConflictingClaim`].
    pub fn apply_announcement(
        &mut self,
        message: &Message,
    ) -> Result<AnnouncementEffect, TaskError> {
        let speaker = message.speaker.clone();
        match message.body {
            MessageBody::TaskClaim(id) => {
                let task = self.get_mut(id)?;
                match &task.status {
                    TaskStatus::Available => {
                        task.status = TaskStatus::Claimed(speaker);
                        self.version += 1;
                        Ok(AnnouncementEffect::Claimed)
                    }
                    TaskStatus::Claimed(holder) | TaskStatus::Completed(holder)
                        if *holder == speaker =>
                    {
                        Ok(AnnouncementEffect::AlreadyKnown)
                    }
                    TaskStatus::Claimed(holder) | TaskStatus::Completed(holder) => {
                        Err(TaskError::ConflictingClaim {
                            task: id,
                            local: holder.clone(),
                            announced: speaker,
                        })
                    }
                }
            }
            MessageBody::TaskComplete(id) => {
                let task = self.get_mut(id)?;
                match &task.status {
                    TaskStatus::Available => {
                        task.status = TaskStatus::Completed(speaker);
                        self.version += 1;
                        Ok(AnnouncementEffect::Completed)
                    }
                    TaskStatus::Claimed(holder) if *holder == speaker => {
                        task.status = TaskStatus::Completed(speaker);
                        self.version += 1;
                        Ok(AnnouncementEffect::Completed)
                    }
                    TaskStatus::Completed(holder) if *holder == speaker => {
                        Ok(AnnouncementEffect::AlreadyKnown)
                    }
                    TaskStatus::Claimed(holder) | TaskStatus::Completed(holder) => {
                        Err(TaskError::ConflictingClaim {
                            task: id,
                            local: holder.clone(),
                            announced: speaker,
                        })
                    }
                }
            }
            _ => Ok(AnnouncementEffect::NotAnAnnouncement),
        }
    }

    /// Conflict repair: rewrite the claimant of a standing claim to the
    /// winner of a tie-break. Only meaningful on a `Claimed` task.
    pub fn resolve_claim(&mut self, id: TaskId, winner: &RobotId) -> Result<(), TaskError> {
        let task = self.get_mut(id)?;
        match &task.status {
            TaskStatus::Claimed(holder) if holder == winner => Ok(()),
            TaskStatus::Claimed(_) => {
                task.status = TaskStatus::Claimed(winner.clone());
                self.version += 1;
                Ok(())
            }
            _ => Err(TaskError::NotClaimant {
                task: id,
                robot: winner.clone(),
            }),
        }
    }

    /// Conflict repair: a completion report won a tie-break over a standing
    /// claim by someone else; record the task as completed by the reporter.
    pub fn record_completion(&mut self, robot: &RobotId, id: TaskId) -> Result<(), TaskError> {
        let task = self.get_mut(id)?;
        match &task.status {
            TaskStatus::Completed(holder) if holder == robot => Ok(()),
            TaskStatus::Completed(holder) => Err(TaskError::AlreadyClaimed {
                task: id,
                holder: holder.clone(),
            }),
            _ => {
                task.status = TaskStatus::Completed(robot.clone());
                self.version += 1;
                Ok(())
            }
        }
    }
}
