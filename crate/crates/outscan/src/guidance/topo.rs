use super::VisitSite;
use crate::geom::Point3;

/// The discrete planning substrate: visit sites joined by a kNN graph whose
/// edge weights are traverse distances.
#[derive(Debug, Clone, Default)]
pub struct TopoMap {
    /// Site ids in node order.
    pub site_ids: Vec<u32>,
    pub positions: Vec<Point3>,
    /// Undirected weighted edges as (node a, node b, meters).
    pub edges: Vec<(u32, u32, f64)>,
}

impl TopoMap {
    pub fn node_count(&self) -> usize {
        self.site_ids.len()
    }

    /// Neighbor node slots of node `a`.
    pub fn neighbors(&self, a: u32) -> Vec<u32> {
        let mut out: Vec<u32> = self
            .edges
            .iter()
            .filter_map(|&(x, y, _)| {
                if x == a {
                    Some(y)
                } else if y == a {
                    Some(x)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }
}

/// Connects each site to its `k` nearest peers (Euclidean selection); edge
/// weights come from `ground_dist` (shortest traverse over the ground
/// graph), falling back to straight-line distance when the ground graph
/// cannot connect a pair.
pub fn build_topo_map<F>(sites: &[VisitSite], k: usize, mut ground_dist: F) -> TopoMap
where
    F: FnMut(Point3, Point3) -> Option<f64>,
{
    let n = sites.len();
    let mut map = TopoMap {
        site_ids: sites.iter().map(|s| s.id).collect(),
        positions: sites.iter().map(|s| s.position).collect(),
        edges: Vec::new(),
    };
    if n <= 1 || k == 0 {
        return map;
    }
    let mut seen = std::collections::HashSet::new();
    for a in 0..n {
        let mut by_dist: Vec<(f64, usize)> = (0..n)
            .filter(|&b| b != a)
            .map(|b| (map.positions[a].dist(map.positions[b]), b))
            .collect();
        by_dist.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for &(euclid, b) in by_dist.iter().take(k) {
            let key = (a.min(b), a.max(b));
            if !seen.insert(key) {
                continue;
            }
            let w = ground_dist(map.positions[a], map.positions[b]).unwrap_or(euclid);
            debug_assert!(w > 0.0, "edge weights must be positive");
            map.edges.push((key.0 as u32, key.1 as u32, w));
        }
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::guidance::{SiteClass, SiteState};

    fn site(id: u32, x: f64, y: f64) -> VisitSite {
        VisitSite {
            id,
            point_index: id,
            position: Point3::new(x, y, 0.0),
            tau: 0.5,
            class: SiteClass::BranchEntry,
            state: SiteState::Active,
            created_scan: 0,
        }
    }

    #[test]
    fn single_site_has_no_edges() {
        let map = build_topo_map(&[site(0, 0.0, 0.0)], 8, |_, _| None);
        assert_eq!(map.node_count(), 1);
        assert!(map.edges.is_empty());
    }

    #[test]
    fn three_sites_fully_connect() {
        let sites = [site(0, 0.0, 0.0), site(1, 5.0, 0.0), site(2, 0.0, 7.0)];
        let map = build_topo_map(&sites, 8, |_, _| None);
        assert_eq!(map.edges.len(), 3);
        assert_eq!(map.neighbors(0), vec![1, 2]);
    }

    #[test]
    fn ground_distance_wins_over_euclidean() {
        let sites = [site(0, 0.0, 0.0), site(1, 10.0, 0.0)];
        let map = build_topo_map(&sites, 2, |_, _| Some(14.0));
        assert_eq!(map.edges[0].2, 14.0);
    }

    #[test]
    fn neighbor_sets_match_brute_force_knn() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(6);
        let sites: Vec<VisitSite> = (0..20)
            .map(|i| site(i, rng.gen_range(0.0..50.0), rng.gen_range(0.0..50.0)))
            .collect();
        let k = 4;
        let map = build_topo_map(&sites, k, |_, _| None);
        for a in 0..sites.len() {
            let mut brute: Vec<(f64, usize)> = (0..sites.len())
                .filter(|&b| b != a)
                .map(|b| (sites[a].position.dist(sites[b].position), b))
                .collect();
            brute.sort_by(|x, y| x.partial_cmp(y).unwrap());
            let want: std::collections::HashSet<u32> =
                brute.iter().take(k).map(|&(_, b)| b as u32).collect();
            let got: std::collections::HashSet<u32> =
                map.neighbors(a as u32).into_iter().collect();
            // Each brute-force neighbor must be connected (the union graph
            // may add the reverse direction on top).
            for w in want {
                assert!(got.contains(&w), "site {a} missing neighbor {w}");
            }
        }
    }
}
