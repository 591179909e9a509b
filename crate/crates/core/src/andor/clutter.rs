//! The per-iteration graph for retrieving a target from clutter.
//!
//! ```text
//!                 target-placed (success)        object-placed-in-storage (failure)
//!                        ^ a4                              ^ a6
//!                 target-picked                     blocker-picked
//!                   ^ a3                              ^ a5
//!        +----------+----------+           +----------+----------+
//!   target-graspable     gripper-empty           blocker-chosen
//!        ^ a0                 ^ a1                    ^ a2
//!        +--------------------+-----------------------+
//!                     workspace-snapshot (virtual root)
//! ```
//!
//! a3 needs both `target-graspable` and `gripper-empty`; a5 needs both
//! `blocker-chosen` and `gripper-empty`. The blocker arc carries a base cost
//! of 1 on top of which the planner adds the cost of the chosen object, so a
//! reachable target always wins over re-arrangement.

use super::{ActionTemplate, ArcId, AugmentedGraph, GraphBuilder, GraphId, NodeId, NodeKind};

pub const NODE_COUNT: usize = 8;
pub const ARC_COUNT: usize = 7;

pub const ROOT: NodeId = NodeId(0);
pub const TARGET_GRASPABLE: NodeId = NodeId(1);
pub const GRIPPER_EMPTY: NodeId = NodeId(2);
pub const TARGET_PICKED: NodeId = NodeId(3);
pub const TARGET_PLACED: NodeId = NodeId(4);
pub const BLOCKER_CHOSEN: NodeId = NodeId(5);
pub const BLOCKER_PICKED: NodeId = NodeId(6);
pub const PLACED_IN_STORAGE: NodeId = NodeId(7);

pub const APPROACH_TARGET: ArcId = ArcId(0);
pub const EMPTY_GRIPPER: ArcId = ArcId(1);
pub const CHOOSE_BLOCKER: ArcId = ArcId(2);
pub const PICK_TARGET: ArcId = ArcId(3);
pub const PLACE_TARGET: ArcId = ArcId(4);
pub const PICK_BLOCKER: ArcId = ArcId(5);
pub const STORE_BLOCKER: ArcId = ArcId(6);

pub const BLOCKER_BASE_COST: f64 = 1.0;

pub fn build_clutter_graph<S>(id: GraphId, snapshot: S) -> AugmentedGraph<S> {
    use NodeKind::*;
    let mut b = GraphBuilder::new("workspace-snapshot");
    let built = (|| {
        let graspable = b.node("target-graspable", Internal)?;
        let empty = b.node("gripper-empty", Internal)?;
        let picked = b.node("target-picked", Internal)?;
        let placed = b.node("target-placed", SuccessTerminal)?;
        let chosen = b.node("blocker-chosen", Internal)?;
        let held = b.node("blocker-picked", Internal)?;
        let stored = b.node("object-placed-in-storage", FailureTerminal)?;
        let root = b.root();
        b.arc(&[root], graspable, ActionTemplate::APPROACH_TARGET, 0.0)?;
        b.arc(&[root], empty, ActionTemplate::NOOP, 0.0)?;
        b.arc(&[root], chosen, ActionTemplate::APPROACH_BLOCKER, BLOCKER_BASE_COST)?;
        b.arc(&[graspable, empty], picked, ActionTemplate::PICK_TARGET, 0.0)?;
        b.arc(&[picked], placed, ActionTemplate::PLACE_TARGET, 0.0)?;
        b.arc(&[chosen, empty], held, ActionTemplate::PICK_BLOCKER, 0.0)?;
        b.arc(&[held], stored, ActionTemplate::PLACE_IN_STORAGE, 0.0)?;
        Ok::<_, super::GraphError>(())
    })();
    built.expect("the clutter template is well formed");
    b.build(id, snapshot)
}
