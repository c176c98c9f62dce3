//! The point-wise guidance field over ground points (explorability fused
//! with smoothed observability) and the topological map of visit sites
//! extracted from it.

mod field;
mod sites;
mod topo;

pub use field::{
    explorability_distance, explorability_medial, guidance_field, update_explorability,
};
pub use sites::{extract_sites, SiteClass, SiteSeed, SiteState, VisitSite};
pub use topo::{build_topo_map, TopoMap};
