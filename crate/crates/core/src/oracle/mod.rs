//! Reference answers for the planner: a propositional search over the toy
//! pick-and-place domain and a brute-force removal oracle over real scenes.

pub mod propositional;
mod removal;

pub use propositional::{
    enumerate_state_space, reachable_state_count, shortest_task_plan, PropAction, PropositionalError,
    StateSpaceCount, TaskPlan,
};
pub use removal::{removal_oracle, target_reachable, OracleError, RemovalCertificate, MAX_ORACLE_OBJECTS};
