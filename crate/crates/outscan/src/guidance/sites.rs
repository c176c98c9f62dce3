use crate::geom::{LabeledPointCloud, Point3, SpatialIndex};

/// Site category per the planner's policy: open-area sites are visited
/// greedily, branch-entry sites are ordered by the TSP.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteClass {
    OpenArea,
    BranchEntry,
}

/// Lifecycle of a visit site in the active set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteState {
    Active,
    Visited,
    Removed,
}

/// A candidate site fresh out of non-maximum suppression, before the
/// planner classifies and adopts it.
#[derive(Debug, Clone, Copy)]
pub struct SiteSeed {
    pub point_index: u32,
    pub position: Point3,
    pub tau: f64,
}

/// A visit site of the topological guidance map.
#[derive(Debug, Clone)]
pub struct VisitSite {
    /// Creation-ordered id; ties everywhere break toward the lower id.
    pub id: u32,
    /// Cloud point the site was extracted from.
    pub point_index: u32,
    pub position: Point3,
    /// Guidance value at creation time.
    pub tau: f64,
    pub class: SiteClass,
    pub state: SiteState,
    pub created_scan: u32,
}

/// Extracts visit sites as the local maxima of the guidance field under
/// non-maximum suppression with radius `r_n`.
///
/// A candidate is a site iff no other candidate within `r_n` has a larger
/// tau (ties resolved toward the lower point index), and its tau reaches
/// `floor`. Sites therefore dominate their own neighborhood and are pairwise
/// more than `r_n` apart.
pub fn extract_sites(
    cloud: &LabeledPointCloud,
    tau: &[(u32, f64)],
    r_n: f64,
    floor: f64,
) -> Vec<SiteSeed> {
    assert!(r_n > 0.0);
    let mut order: Vec<usize> = (0..tau.len()).filter(|&s| tau[s].1 >= floor).collect();
    if order.is_empty() {
        return Vec::new();
    }
    // Descending tau, ascending point index on ties.
    order.sort_by(|&a, &b| {
        tau[b].1
            .partial_cmp(&tau[a].1)
            .unwrap()
            .then(tau[a].0.cmp(&tau[b].0))
    });

    let positions: Vec<Point3> = tau.iter().map(|&(i, _)| cloud.point(i)).collect();
    let index = SpatialIndex::build_with_cell(&positions, r_n.max(1.0))
        .expect("candidates are non-empty");
    let mut rank = vec![usize::MAX; tau.len()];
    for (r, &slot) in order.iter().enumerate() {
        rank[slot] = r;
    }

    let mut suppressed = vec![false; tau.len()];
    let mut out = Vec::new();
    for (r, &slot) in order.iter().enumerate() {
        if suppressed[slot] {
            continue;
        }
        let neighbors = index.radius_indices(positions[slot], r_n);
        // Dominated by any earlier-ranked candidate in range: not a local
        // maximum of the field, regardless of that candidate's own fate.
        let dominated = neighbors
            .iter()
            .any(|&n| rank[n as usize] < r);
        if dominated {
            continue;
        }
        out.push(SiteSeed {
            point_index: tau[slot].0,
            position: positions[slot],
            tau: tau[slot].1,
        });
        for n in neighbors {
            suppressed[n as usize] = true;
        }
    }
    out
}
