use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::andor::{ActionTemplate, ArcId, Feasible, NodeId, ObjectSelector, Verb};
use crate::geometry::Vec2;
use crate::sim::{ObjectId, ObjectState, WorkspaceConfig};

use super::ClutterGraph;

/// Costs closer than this are treated as equal and fall through to the
/// id-based tie-break.
const COST_TIE_TOLERANCE: f64 = 1e-9;

/// Weights of the blocker cost
/// `w_base·d(o, home) + w_gripper·d(o, gripper) + w_size·r + w_target·d(o, target)`.
/// Distances are between centers; `home` is the entry pose.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ObjectCostWeights {
    pub w_base: f64,
    pub w_gripper: f64,
    pub w_size: f64,
    pub w_target: f64,
}

impl Default for ObjectCostWeights {
    fn default() -> Self {
        Self {
            w_base: 0.1,
            w_gripper: 0.1,
            w_size: 0.5,
            w_target: 1.0,
        }
    }
}

impl ObjectCostWeights {
    pub fn validate(&self) -> Result<(), SelectError> {
        let w = [self.w_base, self.w_gripper, self.w_size, self.w_target];
        if w.iter().all(|x| x.is_finite() && *x >= 0.0) && w.iter().any(|&x| x > 0.0) {
            Ok(())
        } else {
            Err(SelectError::BadWeights)
        }
    }

    pub fn object_cost(&self, o: &ObjectState, scene: &WorkspaceConfig) -> f64 {
        let target = scene.target().center;
        let gripper: Vec2 = scene.gripper.position;
        self.w_base * o.center.distance(scene.entry)
            + self.w_gripper * o.center.distance(gripper)
            + self.w_size * o.radius
            + self.w_target * o.center.distance(target)
    }
}

/// A feasible state together with the action of the arc leading to it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub node: NodeId,
    pub arc: ArcId,
    pub cost: f64,
    pub action: ActionTemplate,
}

impl Candidate {
    pub fn from_graph(graph: &ClutterGraph, f: Feasible) -> Self {
        let action = graph.arc(f.arc).expect("feasible arcs exist").action;
        Self {
            node: f.node,
            arc: f.arc,
            cost: f.cost,
            action,
        }
    }

    /// Whether taking this arc means choosing a blocker.
    pub fn chooses_blocker(&self) -> bool {
        self.action.verb == Verb::Approach
            && self.action.object == Some(ObjectSelector::ChosenBlocker)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection {
    pub node: NodeId,
    pub arc: ArcId,
    /// The chosen blocker, for blocker-choosing arcs.
    pub object: Option<ObjectId>,
    pub cost: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum SelectError {
    #[error("no candidate states to choose from")]
    NoCandidates,
    #[error("cost weights must be finite, non-negative and not all zero")]
    BadWeights,
}

/// Whether `a` ranks before `b`: cheaper by more than the tie tolerance,
/// or tied and lower on `(object, arc)` with no object first.
fn ranks_before(a: &Selection, b: &Selection) -> bool {
    if a.cost < b.cost - COST_TIE_TOLERANCE {
        true
    } else if a.cost <= b.cost + COST_TIE_TOLERANCE {
        (a.object, a.arc) < (b.object, b.arc)
    } else {
        false
    }
}

/// Every option the candidates offer. Blocker-choosing arcs are expanded
/// into one option per movable non-target object on the table that is not
/// in `excluded`, costing the arc cost plus the object's cost.
fn options(
    candidates: &[Candidate],
    scene: &WorkspaceConfig,
    weights: &ObjectCostWeights,
    excluded: &[ObjectId],
) -> Vec<Selection> {
    let mut out = Vec::new();
    for c in candidates {
        if c.chooses_blocker() {
            for o in scene.movable_blockers().filter(|o| !excluded.contains(&o.id)) {
                out.push(Selection {
                    node: c.node,
                    arc: c.arc,
                    object: Some(o.id),
                    cost: c.cost + weights.object_cost(o, scene),
                });
            }
        } else {
            out.push(Selection {
                node: c.node,
                arc: c.arc,
                object: None,
                cost: c.cost,
            });
        }
    }
    out
}

/// Picks the cheapest option. Ties go to the lowest object id (no object
/// first), then the lowest arc id.
pub fn select_optimal_state(
    candidates: &[Candidate],
    scene: &WorkspaceConfig,
    weights: &ObjectCostWeights,
    excluded: &[ObjectId],
) -> Result<Selection, SelectError> {
    weights.validate()?;
    options(candidates, scene, weights, excluded)
        .into_iter()
        .reduce(|best, s| if ranks_before(&s, &best) { s } else { best })
        .ok_or(SelectError::NoCandidates)
}

/// All options in the order [`select_optimal_state`] would pick them if
/// each were excluded in turn.
pub fn rank_options(
    candidates: &[Candidate],
    scene: &WorkspaceConfig,
    weights: &ObjectCostWeights,
    excluded: &[ObjectId],
) -> Result<Vec<Selection>, SelectError> {
    weights.validate()?;
    let mut rest = options(candidates, scene, weights, excluded);
    let mut ranked = Vec::with_capacity(rest.len());
    while !rest.is_empty() {
        let mut best = 0;
        for i in 1..rest.len() {
            if ranks_before(&rest[i], &rest[best]) {
                best = i;
            }
        }
        ranked.push(rest.remove(best));
    }
    Ok(ranked)
}
