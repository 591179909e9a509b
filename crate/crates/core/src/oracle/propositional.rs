//! The propositional pick-and-place toy domain.
//!
//! Objects are numbered `0..K` with object 0 the target. The propositions are
//! `clear(o)` and `holding(o)` for every object plus `gripper-empty`, so a
//! state is a `2K + 1` bit vector:
//!
//! | bit        | proposition      |
//! |------------|------------------|
//! | `o`        | `clear(o)`       |
//! | `K + o`    | `holding(o)`     |
//! | `2K`       | `gripper-empty`  |
//!
//! `pick(o)` needs `clear(o)` and `gripper-empty` and yields `holding(o)`.
//! `place(o)` needs `holding(o)`, empties the gripper and puts `o` away for
//! good, so `clear(o)` stays false. Geometry is abstracted into one rule: the
//! target is clear exactly when every object of the blocking set is gone
//! (neither clear nor held). The goal is `holding(target)`.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use serde::Serialize;
use thiserror::Error;

/// Largest `K` accepted by the search.
pub const MAX_SEARCH_OBJECTS: usize = 10;
/// Largest `K` whose raw state count fits in a `u64`.
pub const MAX_COUNT_OBJECTS: usize = 31;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PropositionalError {
    #[error("need at least one object")]
    NoObjects,
    #[error("{0} objects is over the cap of {1}")]
    TooManyObjects(usize, usize),
    #[error("object {0} cannot block the target")]
    BadBlocker(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StateSpaceCount {
    pub propositions: u32,
    pub states: u64,
}

/// Raw encoding size: `2K + 1` propositions and `2^(2K+1)` states.
pub fn enumerate_state_space(k: usize) -> Result<StateSpaceCount, PropositionalError> {
    if k == 0 {
        return Err(PropositionalError::NoObjects);
    }
    if k > MAX_COUNT_OBJECTS {
        return Err(PropositionalError::TooManyObjects(k, MAX_COUNT_OBJECTS));
    }
    let propositions = 2 * k as u32 + 1;
    Ok(StateSpaceCount {
        propositions,
        states: 1u64 << propositions,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case", tag = "op", content = "object")]
pub enum PropAction {
    Pick(usize),
    Place(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TaskPlan {
    pub actions: Vec<PropAction>,
    pub expanded: u64,
    /// Distinct states reached from the initial state.
    pub reachable: u64,
}

impl TaskPlan {
    pub fn length(&self) -> usize {
        self.actions.len()
    }
}

#[derive(Debug, Clone)]
struct Domain {
    k: usize,
    blockers: u64,
}

impl Domain {
    fn new(k: usize, blocked: &[usize]) -> Result<Self, PropositionalError> {
        if k == 0 {
            return Err(PropositionalError::NoObjects);
        }
        if k > MAX_SEARCH_OBJECTS {
            return Err(PropositionalError::TooManyObjects(k, MAX_SEARCH_OBJECTS));
        }
        let mut blockers = 0u64;
        for &b in blocked {
            if b == 0 || b >= k {
                return Err(PropositionalError::BadBlocker(b));
            }
            blockers |= 1 << b;
        }
        Ok(Self { k, blockers })
    }

    fn clear(&self, o: usize) -> u64 {
        1 << o
    }

    fn holding(&self, o: usize) -> u64 {
        1 << (self.k + o)
    }

    fn empty(&self) -> u64 {
        1 << (2 * self.k)
    }

    fn gone(&self, s: u64, o: usize) -> bool {
        s & (self.clear(o) | self.holding(o)) == 0
    }

    fn with_target_clearance(&self, mut s: u64) -> u64 {
        let blocked = (1..self.k).any(|b| self.blockers & (1 << b) != 0 && !self.gone(s, b));
        if !blocked && s & self.holding(0) == 0 {
            s |= self.clear(0);
        }
        s
    }

    fn initial(&self) -> u64 {
        let mut s = self.empty();
        for o in 1..self.k {
            s |= self.clear(o);
        }
        self.with_target_clearance(s)
    }

    fn is_goal(&self, s: u64) -> bool {
        s & self.holding(0) != 0
    }

    fn successors(&self, s: u64) -> impl Iterator<Item = (PropAction, u64)> + '_ {
        let picks = (0..self.k).filter_map(move |o| {
            let ready = s & self.clear(o) != 0 && s & self.empty() != 0;
            ready.then(|| {
                let next = (s | self.holding(o)) & !self.empty() & !self.clear(o);
                (PropAction::Pick(o), next)
            })
        });
        let places = (0..self.k).filter(move |&o| s & self.holding(o) != 0).map(move |o| {
            let next = (s | self.empty()) & !self.holding(o);
            (PropAction::Place(o), self.with_target_clearance(next))
        });
        picks.chain(places)
    }
}

/// Uniform-cost search from the initial state to `holding(target)`.
/// `blocked` lists the objects (ids `1..K`) in the way of the target.
pub fn shortest_task_plan(k: usize, blocked: &[usize]) -> Result<Option<TaskPlan>, PropositionalError> {
    let d = Domain::new(k, blocked)?;
    let start = d.initial();
    let mut best: HashMap<u64, (u64, Option<(u64, PropAction)>)> = HashMap::new();
    best.insert(start, (0, None));
    let mut heap = BinaryHeap::from([Reverse((0u64, start))]);
    let mut expanded = 0u64;
    while let Some(Reverse((g, s))) = heap.pop() {
        if best[&s].0 < g {
            continue;
        }
        expanded += 1;
        if d.is_goal(s) {
            let mut actions = Vec::new();
            let mut cur = s;
            while let Some((prev, a)) = best[&cur].1 {
                actions.push(a);
                cur = prev;
            }
            actions.reverse();
            return Ok(Some(TaskPlan {
                actions,
                expanded,
                reachable: reachable_states(&d),
            }));
        }
        for (a, next) in d.successors(s) {
            let cost = g + 1;
            if best.get(&next).is_none_or(|&(c, _)| cost < c) {
                best.insert(next, (cost, Some((s, a))));
                heap.push(Reverse((cost, next)));
            }
        }
    }
    Ok(None)
}

fn reachable_states(d: &Domain) -> u64 {
    let mut seen = std::collections::HashSet::from([d.initial()]);
    let mut stack = vec![d.initial()];
    while let Some(s) = stack.pop() {
        for (_, next) in d.successors(s) {
            if seen.insert(next) {
                stack.push(next);
            }
        }
    }
    seen.len() as u64
}

/// Number of states reachable from the initial state: the mutex-pruned
/// counterpart of the raw count.
pub fn reachable_state_count(k: usize, blocked: &[usize]) -> Result<u64, PropositionalError> {
    Ok(reachable_states(&Domain::new(k, blocked)?))
}
