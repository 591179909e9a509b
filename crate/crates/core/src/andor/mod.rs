//! AND/OR graphs with a virtual root.
//!
//! A hyper-arc maps a set of child nodes to one parent. All children must be
//! achieved before the arc can be traversed (AND); several arcs into the same
//! parent are alternatives (OR). An [`AugmentedGraph`] adds a virtual root
//! that stands for the workspace snapshot the graph was grown from; arcs whose
//! only child is the root are the virtual arcs.
//!
//! Graphs only grow and nodes are only ever achieved, never reset. Once a
//! success or failure terminal is achieved the graph is frozen and every
//! further query is an error.

pub mod clutter;

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use clutter::build_clutter_graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ArcId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GraphId(pub u64);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

impl fmt::Display for ArcId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

impl fmt::Display for GraphId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g{}", self.0)
    }
}

/// Hands out graph ids in increasing order.
#[derive(Debug, Default, Clone)]
pub struct GraphIds {
    next: u64,
}

impl GraphIds {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fresh(&mut self) -> GraphId {
        let id = GraphId(self.next);
        self.next += 1;
        id
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeKind {
    Internal,
    SuccessTerminal,
    FailureTerminal,
    VirtualRoot,
}

impl NodeKind {
    pub fn is_terminal(self) -> bool {
        matches!(self, NodeKind::SuccessTerminal | NodeKind::FailureTerminal)
    }

    fn as_str(self) -> &'static str {
        match self {
            NodeKind::Internal => "internal",
            NodeKind::SuccessTerminal => "success-terminal",
            NodeKind::FailureTerminal => "failure-terminal",
            NodeKind::VirtualRoot => "virtual-root",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub label: String,
    pub kind: NodeKind,
    pub achieved: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verb {
    Pick,
    PlaceInStorage,
    PlaceTarget,
    Approach,
    Noop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectSelector {
    Target,
    ChosenBlocker,
}

/// Verb plus the object it applies to. Only the clutter-domain combinations
/// are constructible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ActionTemplate {
    pub verb: Verb,
    pub object: Option<ObjectSelector>,
}

impl ActionTemplate {
    pub const APPROACH_TARGET: Self = Self::raw(Verb::Approach, Some(ObjectSelector::Target));
    pub const APPROACH_BLOCKER: Self =
        Self::raw(Verb::Approach, Some(ObjectSelector::ChosenBlocker));
    pub const PICK_TARGET: Self = Self::raw(Verb::Pick, Some(ObjectSelector::Target));
    pub const PICK_BLOCKER: Self = Self::raw(Verb::Pick, Some(ObjectSelector::ChosenBlocker));
    pub const PLACE_TARGET: Self = Self::raw(Verb::PlaceTarget, Some(ObjectSelector::Target));
    pub const PLACE_IN_STORAGE: Self =
        Self::raw(Verb::PlaceInStorage, Some(ObjectSelector::ChosenBlocker));
    pub const NOOP: Self = Self::raw(Verb::Noop, None);

    const fn raw(verb: Verb, object: Option<ObjectSelector>) -> Self {
        Self { verb, object }
    }

    pub fn new(verb: Verb, object: Option<ObjectSelector>) -> Result<Self, GraphError> {
        use ObjectSelector::*;
        let ok = matches!(
            (verb, object),
            (Verb::Approach | Verb::Pick, Some(_))
                | (Verb::PlaceInStorage, Some(ChosenBlocker))
                | (Verb::PlaceTarget, Some(Target))
                | (Verb::Noop, None)
        );
        if ok {
            Ok(Self { verb, object })
        } else {
            Err(GraphError::BadAction(verb, object))
        }
    }
}

impl fmt::Display for ActionTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verb = match self.verb {
            Verb::Pick => "pick",
            Verb::PlaceInStorage => "place-in-storage",
            Verb::PlaceTarget => "place-target",
            Verb::Approach => "approach",
            Verb::Noop => "noop",
        };
        match self.object {
            None => f.write_str(verb),
            Some(ObjectSelector::Target) => write!(f, "{verb}(target)"),
            Some(ObjectSelector::ChosenBlocker) => write!(f, "{verb}(chosen-blocker)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperArc {
    pub id: ArcId,
    /// Sorted, non-empty.
    pub children: Vec<NodeId>,
    pub parent: NodeId,
    pub action: ActionTemplate,
    pub cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphStatus {
    Active,
    Solved,
    Failed,
}

impl fmt::Display for GraphStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GraphStatus::Active => "active",
            GraphStatus::Solved => "solved",
            GraphStatus::Failed => "failed",
        })
    }
}

/// One traversable arc: all children achieved, parent not yet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feasible {
    pub node: NodeId,
    pub arc: ArcId,
    pub cost: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("graph {0} is {1} and can no longer be queried")]
    Frozen(GraphId, GraphStatus),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("unknown arc {0}")]
    UnknownArc(ArcId),
    #[error("arc {arc} leads to {actual}, not {requested}")]
    WrongParent {
        arc: ArcId,
        requested: NodeId,
        actual: NodeId,
    },
    #[error("arc {0} has unachieved children")]
    ChildrenNotAchieved(ArcId),
    #[error("node {0} is already achieved")]
    AlreadyAchieved(NodeId),
    #[error("malformed arc: {0}")]
    MalformedArc(&'static str),
    #[error("{0:?} cannot act on {1:?}")]
    BadAction(Verb, Option<ObjectSelector>),
    #[error("a graph has exactly one virtual root")]
    SecondRoot,
}

/// Builds the node and arc sets of an augmented graph. The virtual root is
/// created first and always has id `n0`.
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    nodes: Vec<Node>,
    arcs: Vec<HyperArc>,
}

impl GraphBuilder {
    pub fn new(root_label: &str) -> Self {
        Self {
            nodes: vec![Node {
                id: NodeId(0),
                label: root_label.to_owned(),
                kind: NodeKind::VirtualRoot,
                achieved: true,
            }],
            arcs: Vec::new(),
        }
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn node(&mut self, label: &str, kind: NodeKind) -> Result<NodeId, GraphError> {
        if kind == NodeKind::VirtualRoot {
            return Err(GraphError::SecondRoot);
        }
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(Node {
            id,
            label: label.to_owned(),
            kind,
            achieved: false,
        });
        Ok(id)
    }

    pub fn arc(
        &mut self,
        children: &[NodeId],
        parent: NodeId,
        action: ActionTemplate,
        cost: f64,
    ) -> Result<ArcId, GraphError> {
        let known = |n: NodeId| (n.0 as usize) < self.nodes.len();
        if let Some(&n) = children.iter().chain([&parent]).find(|&&n| !known(n)) {
            return Err(GraphError::UnknownNode(n));
        }
        let children: BTreeSet<NodeId> = children.iter().copied().collect();
        if children.is_empty() {
            return Err(GraphError::MalformedArc("no children"));
        }
        if children.contains(&parent) {
            return Err(GraphError::MalformedArc("parent among its own children"));
        }
        if parent == self.root() {
            return Err(GraphError::MalformedArc("the root has no incoming arcs"));
        }
        if children.contains(&self.root()) && children.len() > 1 {
            return Err(GraphError::MalformedArc("virtual arcs have the root as only child"));
        }
        if children
            .iter()
            .any(|&c| self.nodes[c.0 as usize].kind.is_terminal())
        {
            return Err(GraphError::MalformedArc("terminals have no successors"));
        }
        if !(cost >= 0.0 && cost.is_finite()) {
            return Err(GraphError::MalformedArc("cost must be finite and non-negative"));
        }
        let id = ArcId(self.arcs.len() as u32);
        self.arcs.push(HyperArc {
            id,
            children: children.into_iter().collect(),
            parent,
            action,
            cost,
        });
        Ok(id)
    }

    pub fn build<S>(self, id: GraphId, snapshot: S) -> AugmentedGraph<S> {
        AugmentedGraph {
            id,
            nodes: self.nodes,
            arcs: self.arcs,
            snapshot,
            status: GraphStatus::Active,
            expansions: 0,
        }
    }
}

/// An AND/OR graph whose root encodes a snapshot of type `S`.
#[derive(Debug, Clone)]
pub struct AugmentedGraph<S> {
    id: GraphId,
    nodes: Vec<Node>,
    arcs: Vec<HyperArc>,
    snapshot: S,
    status: GraphStatus,
    expansions: u64,
}

impl<S> AugmentedGraph<S> {
    pub fn id(&self) -> GraphId {
        self.id
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn snapshot(&self) -> &S {
        &self.snapshot
    }

    pub fn status(&self) -> GraphStatus {
        self.status
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn arcs(&self) -> &[HyperArc] {
        &self.arcs
    }

    pub fn node(&self, id: NodeId) -> Result<&Node, GraphError> {
        self.nodes.get(id.0 as usize).ok_or(GraphError::UnknownNode(id))
    }

    pub fn arc(&self, id: ArcId) -> Result<&HyperArc, GraphError> {
        self.arcs.get(id.0 as usize).ok_or(GraphError::UnknownArc(id))
    }

    pub fn is_virtual(&self, arc: ArcId) -> bool {
        self.arcs
            .get(arc.0 as usize)
            .is_some_and(|a| a.children == [self.root()])
    }

    /// Number of successful [`mark_achieved`](Self::mark_achieved) calls.
    pub fn expansions_count(&self) -> u64 {
        self.expansions
    }

    pub fn achieved(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().filter(|n| n.achieved).map(|n| n.id)
    }

    fn ensure_active(&self) -> Result<(), GraphError> {
        match self.status {
            GraphStatus::Active => Ok(()),
            s => Err(GraphError::Frozen(self.id, s)),
        }
    }

    fn traversable(&self, arc: &HyperArc) -> bool {
        arc.children.iter().all(|c| self.nodes[c.0 as usize].achieved)
    }

    /// Every arc whose children are all achieved and whose parent is not,
    /// in arc-id order.
    pub fn next_feasible_states(&self) -> Result<Vec<Feasible>, GraphError> {
        self.ensure_active()?;
        Ok(self
            .arcs
            .iter()
            .filter(|a| !self.nodes[a.parent.0 as usize].achieved && self.traversable(a))
            .map(|a| Feasible {
                node: a.parent,
                arc: a.id,
                cost: a.cost,
            })
            .collect())
    }

    pub fn mark_achieved(&mut self, node: NodeId, via: ArcId) -> Result<GraphStatus, GraphError> {
        self.ensure_active()?;
        self.node(node)?;
        let arc = self.arc(via)?;
        if arc.parent != node {
            return Err(GraphError::WrongParent {
                arc: via,
                requested: node,
                actual: arc.parent,
            });
        }
        if !self.traversable(arc) {
            return Err(GraphError::ChildrenNotAchieved(via));
        }
        let n = &mut self.nodes[node.0 as usize];
        if n.achieved {
            return Err(GraphError::AlreadyAchieved(node));
        }
        n.achieved = true;
        self.expansions += 1;
        let reached = |kind| self.nodes.iter().any(|n| n.kind == kind && n.achieved);
        self.status = if reached(NodeKind::SuccessTerminal) {
            GraphStatus::Solved
        } else if reached(NodeKind::FailureTerminal) {
            GraphStatus::Failed
        } else {
            GraphStatus::Active
        };
        Ok(self.status)
    }

    /// Line-oriented text form: a header, one line per node and one per arc.
    ///
    /// ```text
    /// graph g0 active expansions 0
    /// n0 workspace-snapshot virtual-root achieved
    /// n1 target-graspable internal pending
    /// a0 n0 -> n1 approach(target) cost 0
    /// ```
    pub fn dump(&self) -> String {
        let mut out = format!(
            "graph {} {} expansions {}\n",
            self.id, self.status, self.expansions
        );
        for n in &self.nodes {
            let state = if n.achieved { "achieved" } else { "pending" };
            let _ = writeln!(out, "{} {} {} {state}", n.id, n.label, n.kind.as_str());
        }
        for a in &self.arcs {
            let children: Vec<String> = a.children.iter().map(|c| c.to_string()).collect();
            let _ = writeln!(
                out,
                "{} {} -> {} {} cost {}",
                a.id,
                children.join(","),
                a.parent,
                a.action,
                a.cost
            );
        }
        out
    }

    /// SHA-256 of [`dump`](Self::dump), hex encoded.
    pub fn fingerprint(&self) -> String {
        hex::encode(Sha256::digest(self.dump().as_bytes()))
    }
}
