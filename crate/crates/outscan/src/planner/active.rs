use crate::geom::Point3;
use crate::guidance::{SiteClass, SiteSeed, SiteState, VisitSite};

/// Re-evaluated guidance at a site; `None` means the site's source point no
/// longer exists (deleted for collision clearance).
pub type SiteTau = (u32, Option<f64>);

/// All sites ever created, addressed by creation id, with the live subset
/// driving the planner. Visited and removed sites are never re-planned.
#[derive(Debug, Clone, Default)]
pub struct ActiveSiteSet {
    sites: Vec<VisitSite>,
}

impl ActiveSiteSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn site(&self, id: u32) -> &VisitSite {
        &self.sites[id as usize]
    }

    pub fn all(&self) -> &[VisitSite] {
        &self.sites
    }

    pub fn active(&self) -> impl Iterator<Item = &VisitSite> {
        self.sites.iter().filter(|s| s.state == SiteState::Active)
    }

    pub fn active_count(&self) -> usize {
        self.active().count()
    }

    pub fn active_of(&self, class: SiteClass) -> Vec<&VisitSite> {
        self.active().filter(|s| s.class == class).collect()
    }

    pub fn mark_visited(&mut self, id: u32) {
        let s = &mut self.sites[id as usize];
        if s.state == SiteState::Active {
            s.state = SiteState::Visited;
        }
    }

    pub fn mark_removed(&mut self, id: u32) {
        let s = &mut self.sites[id as usize];
        if s.state == SiteState::Active {
            s.state = SiteState::Removed;
        }
    }

    /// Adopts classified candidates, rejecting any closer than `r_n` to an
    /// already-active site (the map keeps its suppression spacing). Returns
    /// the accepted ids.
    pub fn insert_candidates(
        &mut self,
        seeds: &[SiteSeed],
        classes: &[SiteClass],
        r_n: f64,
        scan_index: u32,
    ) -> Vec<u32> {
        assert_eq!(seeds.len(), classes.len());
        let mut accepted = Vec::new();
        for (seed, &class) in seeds.iter().zip(classes) {
            let too_close = self
                .active()
                .any(|s| s.position.dist(seed.position) < r_n);
            if too_close {
                continue;
            }
            let id = self.sites.len() as u32;
            self.sites.push(VisitSite {
                id,
                point_index: seed.point_index,
                position: seed.position,
                tau: seed.tau,
                class,
                state: SiteState::Active,
                created_scan: scan_index,
            });
            accepted.push(id);
        }
        accepted
    }
}

/// Active-set maintenance for one scan: sites whose re-evaluated guidance
/// fell below `tau_threshold` (or whose source point vanished) are removed,
/// and sites within `visit_radius` of the robot are marked visited.
///
/// `re_evaluated` carries entries only for sites inside the current scan
/// range; sites not listed keep their previous value.
pub fn maintain_active_set(
    set: &mut ActiveSiteSet,
    re_evaluated: &[SiteTau],
    robot: Point3,
    visit_radius: f64,
    tau_threshold: f64,
) {
    for &(id, tau) in re_evaluated {
        match tau {
            None => set.mark_removed(id),
            Some(t) => {
                let site = &mut set.sites[id as usize];
                if site.state == SiteState::Active {
                    site.tau = t;
                    if t < tau_threshold {
                        site.state = SiteState::Removed;
                    }
                }
            }
        }
    }
    let visited: Vec<u32> = set
        .active()
        .filter(|s| s.position.dist(robot) <= visit_radius)
        .map(|s| s.id)
        .collect();
    for id in visited {
        set.mark_visited(id);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seed_at(x: f64, y: f64, tau: f64) -> SiteSeed {
        SiteSeed { point_index: 0, position: Point3::new(x, y, 0.0), tau }
    }

    #[test]
    fn tau_drop_removes_the_site() {
        let mut set = ActiveSiteSet::new();
        let ids = set.insert_candidates(
            &[seed_at(0.0, 0.0, 0.8)],
            &[SiteClass::BranchEntry],
            6.0,
            0,
        );
        maintain_active_set(&mut set, &[(ids[0], Some(0.2))], Point3::new(50.0, 0.0, 0.0), 1.5, 0.3);
        assert_eq!(set.site(ids[0]).state, SiteState::Removed);
        assert_eq!(set.active_count(), 0);
    }

    #[test]
    fn passing_robot_marks_visited() {
        let mut set = ActiveSiteSet::new();
        let ids = set.insert_candidates(
            &[seed_at(10.0, 0.0, 0.8)],
            &[SiteClass::OpenArea],
            6.0,
            0,
        );
        maintain_active_set(&mut set, &[], Point3::new(10.0, 1.4, 0.0), 1.5, 0.3);
        assert_eq!(set.site(ids[0]).state, SiteState::Visited);
        // A visited site is final even if tau later recovers.
        maintain_active_set(&mut set, &[(ids[0], Some(0.9))], Point3::ZERO, 1.5, 0.3);
        assert_eq!(set.site(ids[0]).state, SiteState::Visited);
    }

    #[test]
    fn insertion_respects_active_spacing() {
        let mut set = ActiveSiteSet::new();
        set.insert_candidates(&[seed_at(0.0, 0.0, 0.8)], &[SiteClass::BranchEntry], 6.0, 0);
        // 2 m away with r_n = 6: rejected.
        let rejected = set.insert_candidates(
            &[seed_at(2.0, 0.0, 0.9)],
            &[SiteClass::BranchEntry],
            6.0,
            1,
        );
        assert!(rejected.is_empty());
        // Once the blocker is gone (visited), the same spot is insertable.
        set.mark_visited(0);
        let accepted = set.insert_candidates(
            &[seed_at(2.0, 0.0, 0.9)],
            &[SiteClass::BranchEntry],
            6.0,
            2,
        );
        assert_eq!(accepted.len(), 1);
    }

    #[test]
    fn dead_source_point_removes_the_site() {
        let mut set = ActiveSiteSet::new();
        let ids = set.insert_candidates(
            &[seed_at(0.0, 0.0, 0.8)],
            &[SiteClass::BranchEntry],
            6.0,
            0,
        );
        maintain_active_set(&mut set, &[(ids[0], None)], Point3::new(50.0, 0.0, 0.0), 1.5, 0.3);
        assert_eq!(set.site(ids[0]).state, SiteState::Removed);
    }
}
