use super::{edge_objective, greedy_next, tsp_order, ActiveSiteSet, TAU_CLAMP};
use crate::geom::{PathPolyline, Point3};
use crate::guidance::SiteClass;

/// Ground-path queries the planner needs; the simulator backs this with its
/// navigation graph, tests with straight-line stubs.
pub trait GroundRouter {
    /// Traversable path between two positions, if connected.
    fn path(&mut self, from: Point3, to: Point3) -> Option<PathPolyline>;
    /// Shortest traverse distances from one position to many.
    fn distances(&mut self, from: Point3, to: &[Point3]) -> Vec<Option<f64>>;
}

/// Why a planning step ended the episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminateReason {
    /// Every site is visited or removed.
    ActiveSetEmpty,
    /// The next traverse does not fit in the remaining budget.
    BudgetExhausted,
    /// Goals remained but none was reachable on the ground graph.
    NoReachableGoal,
}

/// One planning decision.
#[derive(Debug, Clone)]
pub enum PlanOutcome {
    Goal { site_id: u32, path: PathPolyline },
    Terminate(TerminateReason),
}

/// Selects the next goal per the planning policy: open-area sites are
/// visited greedily; otherwise the pending branch-entry sites are ordered by
/// the open-path TSP and the first is taken. The shortest ground path to the
/// chosen goal is returned, or termination when the active set is empty or
/// the path exceeds the remaining budget. Unreachable goals are removed and
/// planning retries.
pub fn plan_step(
    set: &mut ActiveSiteSet,
    robot: Point3,
    budget_remaining: f64,
    router: &mut dyn GroundRouter,
    use_tsp: bool,
) -> crate::Result<PlanOutcome> {
    let mut removed_for_reachability = false;
    loop {
        if set.active_count() == 0 {
            return Ok(PlanOutcome::Terminate(if removed_for_reachability {
                TerminateReason::NoReachableGoal
            } else {
                TerminateReason::ActiveSetEmpty
            }));
        }

        let oa = set.active_of(SiteClass::OpenArea);
        let goal_id = if !oa.is_empty() {
            let positions: Vec<Point3> = oa.iter().map(|s| s.position).collect();
            let dists = router.distances(robot, &positions);
            let candidates: Vec<(u32, f64, f64)> = oa
                .iter()
                .zip(&dists)
                .filter_map(|(s, d)| d.map(|d| (s.id, d, s.tau)))
                .collect();
            match greedy_next(&candidates) {
                Some(id) => id,
                None => {
                    // Every open-area site is unreachable right now.
                    removed_for_reachability = true;
                    let ids: Vec<u32> = oa.iter().map(|s| s.id).collect();
                    for id in ids {
                        set.mark_removed(id);
                    }
                    continue;
                }
            }
        } else {
            let be = set.active_of(SiteClass::BranchEntry);
            let positions: Vec<Point3> = be.iter().map(|s| s.position).collect();
            let from_robot = router.distances(robot, &positions);
            if !use_tsp {
                // Ablation policy: branch entries taken greedily as well.
                let candidates: Vec<(u32, f64, f64)> = be
                    .iter()
                    .zip(&from_robot)
                    .filter_map(|(s, d)| d.map(|d| (s.id, d, s.tau)))
                    .collect();
                match greedy_next(&candidates) {
                    Some(id) => id,
                    None => {
                        removed_for_reachability = true;
                        let ids: Vec<u32> = be.iter().map(|s| s.id).collect();
                        for id in ids {
                            set.mark_removed(id);
                        }
                        continue;
                    }
                }
            } else {
                let n = be.len() + 1;
                let mut distances = vec![0.0; n * n];
                let mut tau = vec![0.0; n];
                for (i, site) in be.iter().enumerate() {
                    tau[i + 1] = site.tau.min(TAU_CLAMP);
                    // Straight-line fallback keeps the matrix finite when the
                    // ground graph cannot connect a pair yet.
                    distances[i + 1] =
                        from_robot[i].unwrap_or_else(|| robot.dist(site.position));
                    distances[(i + 1) * n] = distances[i + 1];
                }
                for i in 0..be.len() {
                    let row = router.distances(be[i].position, &positions);
                    for (j, d) in row.into_iter().enumerate() {
                        if i != j {
                            let w = d.unwrap_or_else(|| be[i].position.dist(be[j].position));
                            distances[(i + 1) * n + (j + 1)] = w;
                        }
                    }
                }
                let objective = edge_objective(&distances, &tau);
                let order = tsp_order(&objective)?;
                be[order[0] - 1].id
            }
        };

        let goal = set.site(goal_id).position;
        match router.path(robot, goal) {
            None => {
                removed_for_reachability = true;
                set.mark_removed(goal_id);
                continue;
            }
            Some(path) => {
                if path.length() > budget_remaining {
                    return Ok(PlanOutcome::Terminate(TerminateReason::BudgetExhausted));
                }
                return Ok(PlanOutcome::Goal { site_id: goal_id, path });
            }
        }
    }
}
