//! Graph networks and the online planning loop.
//!
//! A [`GraphNetwork`] is an ordered list of clutter graphs, each grown from
//! the workspace as it was when the previous one ended, linked by
//! [`TransitionRecord`]s. [`solve`] drives the loop: query feasible states,
//! pick the cheapest, hand it to the task-motion interface, and grow a new
//! graph whenever the current one ends without retrieving the target.

mod select;
mod solve;
mod tmpi;
mod trace;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::andor::{build_clutter_graph, AugmentedGraph, GraphId, GraphIds, GraphStatus};
use crate::geometry::Vec2;
use crate::sim::{ObjectId, WorkspaceConfig};

pub use select::{rank_options, select_optimal_state, Candidate, ObjectCostWeights, SelectError, Selection};
pub use solve::{solve, Episode, EpisodeLog, Outcome, SolveConfig, SolveError};
pub use tmpi::{DispatchError, MotionOutcome, MotionStats, Tmpi, EXECUTION_SPEED};
pub use trace::{replay, ActionTrace, ReplayError, ReplayReport, TracedAction, TRACE_FORMAT};

pub type ClutterGraph = AugmentedGraph<Arc<WorkspaceConfig>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransitionReason {
    GraphFailedAfterRearrangement,
    ExecutionFailureRetry,
    NoFeasibleState,
}

/// The one object whose pose changed between two snapshots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MovedObject {
    pub object: ObjectId,
    pub pose: Vec2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionRecord {
    pub from: GraphId,
    pub to: GraphId,
    pub reason: TransitionReason,
    /// `None` when the object layout did not change.
    pub delta: Option<MovedObject>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NetworkStatus {
    Running,
    Solved,
    Exhausted,
}

#[derive(Debug, Error, PartialEq)]
pub enum NetworkError {
    #[error("depth limit must be at least 1")]
    ZeroLimit,
    #[error("the network already holds {0} graphs, its depth limit")]
    DepthLimit(usize),
    #[error("the network is solved; no graph may follow a solved graph")]
    AfterSolved,
    #[error("the network is exhausted")]
    Exhausted,
    #[error("transition {0:?} does not match the snapshot change: {1}")]
    InconsistentDelta(TransitionReason, String),
}

/// Objects whose state differs between two snapshots, in id order.
fn changed_objects(before: &WorkspaceConfig, after: &WorkspaceConfig) -> Vec<MovedObject> {
    let mut moved: Vec<MovedObject> = after
        .objects
        .iter()
        .filter(|o| before.object(o.id) != Some(*o))
        .map(|o| MovedObject {
            object: o.id,
            pose: o.center,
        })
        .collect();
    moved.sort_by_key(|m| m.object);
    moved
}

#[derive(Debug, Clone)]
pub struct GraphNetwork {
    graphs: Vec<ClutterGraph>,
    transitions: Vec<TransitionRecord>,
    depth_limit: usize,
    status: NetworkStatus,
    ids: GraphIds,
}

impl GraphNetwork {
    /// A network holding one fresh graph grown from `scene`.
    pub fn new(depth_limit: usize, scene: Arc<WorkspaceConfig>) -> Result<Self, NetworkError> {
        if depth_limit == 0 {
            return Err(NetworkError::ZeroLimit);
        }
        let mut ids = GraphIds::new();
        let first = build_clutter_graph(ids.fresh(), scene);
        Ok(Self {
            graphs: vec![first],
            transitions: Vec::new(),
            depth_limit,
            status: NetworkStatus::Running,
            ids,
        })
    }

    pub fn graphs(&self) -> &[ClutterGraph] {
        &self.graphs
    }

    pub fn transitions(&self) -> &[TransitionRecord] {
        &self.transitions
    }

    pub fn depth(&self) -> usize {
        self.graphs.len()
    }

    pub fn depth_limit(&self) -> usize {
        self.depth_limit
    }

    pub fn status(&self) -> NetworkStatus {
        self.status
    }

    pub fn current(&self) -> &ClutterGraph {
        self.graphs.last().expect("a network is never empty")
    }

    pub fn current_mut(&mut self) -> &mut ClutterGraph {
        self.graphs.last_mut().expect("a network is never empty")
    }

    /// Re-reads the last graph's status: the network is solved exactly when
    /// its last graph is.
    pub fn refresh(&mut self) -> NetworkStatus {
        if self.current().status() == GraphStatus::Solved {
            self.status = NetworkStatus::Solved;
        }
        self.status
    }

    /// Marks the network as exhausted; no graph may be grown afterwards.
    pub fn exhaust(&mut self) {
        if self.status == NetworkStatus::Running {
            self.status = NetworkStatus::Exhausted;
        }
    }

    pub fn can_grow(&self) -> bool {
        self.status == NetworkStatus::Running && self.graphs.len() < self.depth_limit
    }

    /// Appends a fresh graph rooted at `scene` and records the transition.
    pub fn grow_next_graph(
        &mut self,
        reason: TransitionReason,
        scene: Arc<WorkspaceConfig>,
    ) -> Result<&mut ClutterGraph, NetworkError> {
        match self.status {
            NetworkStatus::Solved => return Err(NetworkError::AfterSolved),
            NetworkStatus::Exhausted => return Err(NetworkError::Exhausted),
            NetworkStatus::Running => {}
        }
        if self.current().status() == GraphStatus::Solved {
            return Err(NetworkError::AfterSolved);
        }
        if self.graphs.len() >= self.depth_limit {
            return Err(NetworkError::DepthLimit(self.depth_limit));
        }
        let moved = changed_objects(self.current().snapshot(), &scene);
        let delta = match reason {
            TransitionReason::GraphFailedAfterRearrangement => {
                if moved.len() != 1 {
                    return Err(NetworkError::InconsistentDelta(
                        reason,
                        format!("{} objects changed, expected exactly one", moved.len()),
                    ));
                }
                Some(moved[0])
            }
            TransitionReason::ExecutionFailureRetry | TransitionReason::NoFeasibleState => {
                if !moved.is_empty() {
                    return Err(NetworkError::InconsistentDelta(
                        reason,
                        format!("{} objects changed, expected none", moved.len()),
                    ));
                }
                None
            }
        };
        let from = self.current().id();
        let graph = build_clutter_graph(self.ids.fresh(), scene);
        self.transitions.push(TransitionRecord {
            from,
            to: graph.id(),
            reason,
            delta,
        });
        self.graphs.push(graph);
        Ok(self.current_mut())
    }
}

#[cfg(test)]
mod tests;
