//! Online TSP planning over the evolving site map: classification into
//! open-area and branch-entry sites, active-set maintenance, greedy and
//! exact-TSP goal selection, and the per-iteration planning step.

mod active;
mod objective;
mod step;
mod tsp;

pub use active::{maintain_active_set, ActiveSiteSet, SiteTau};
pub use objective::{classify_site, edge_objective, greedy_next, EdgeObjective, TAU_CLAMP};
pub use step::{plan_step, GroundRouter, PlanOutcome, TerminateReason};
pub use tsp::tsp_order;
