use super::{integrate_scan, simulate_scan, step_robot, NavGrid, RobotState, Scene, StepEventKind};
use crate::config::Params;
use crate::geom::{
    accumulated_curvature, LabeledPointCloud, PathPolyline, Point3, PointLabel, SpatialIndex,
};
use crate::guidance::{
    explorability_medial, extract_sites, guidance_field, update_explorability, SiteClass,
};
use crate::planner::{
    classify_site, maintain_active_set, plan_step, ActiveSiteSet, GroundRouter, PlanOutcome,
    SiteTau, TerminateReason,
};
use crate::refine::{curve_to_polyline, select_control_points, QualityQueue, RefinedPath};
use crate::visibility::{smooth_observability, visible_set, ViewpointHistory};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use std::collections::HashMap;

/// Scanning policy under evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    /// The complete method: guidance sites, greedy/TSP visiting, refinement.
    Full,
    /// Uniformly random clearance-valid goals within the planning radius.
    RandomWalk,
    /// TSP branch disabled; every site is visited greedily.
    GreedyOnly,
    /// Full planning but raw shortest paths (no B-spline refinement).
    NoRefine,
}

impl Policy {
    pub fn parse(s: &str) -> Option<Policy> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Some(Policy::Full),
            "random" | "randomwalk" | "random_walk" => Some(Policy::RandomWalk),
            "greedy" | "greedyonly" | "greedy_only" => Some(Policy::GreedyOnly),
            "norefine" | "no_refine" => Some(Policy::NoRefine),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Policy::Full => "full",
            Policy::RandomWalk => "random",
            Policy::GreedyOnly => "greedy",
            Policy::NoRefine => "norefine",
        }
    }
}

#[derive(Debug, Clone)]
pub struct EpisodeConfig {
    pub params: Params,
    pub seed: u64,
    pub policy: Policy,
}

impl EpisodeConfig {
    pub fn new(params: Params, seed: u64, policy: Policy) -> Self {
        Self { params, seed, policy }
    }
}

/// One planner trace row (per planning step).
#[derive(Debug, Clone)]
pub struct TraceRow {
    pub step: u32,
    pub scan_index: u32,
    pub x: f64,
    pub y: f64,
    /// Goal site id, or -1 on termination rows.
    pub goal_id: i64,
    pub goal_class: &'static str,
    pub path_len: f64,
    pub budget_left: f64,
    pub active_sites: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpisodeStatus {
    Running,
    Terminated(TerminateReason),
    /// Planning-step guard tripped; should not happen on sane scenes.
    StepLimit,
}

/// Everything an episode leaves behind.
#[derive(Debug)]
pub struct EpisodeResult {
    pub status: EpisodeStatus,
    pub trace: Vec<TraceRow>,
    pub coverage_curve: Vec<(f64, f64)>,
    pub final_iou: f64,
    pub total_travel: f64,
    pub accumulated_curvature: f64,
    pub scan_count: u32,
    pub step_seconds: Vec<f64>,
    pub cloud: LabeledPointCloud,
    pub executed: PathPolyline,
    pub path_log: Vec<(f64, Point3)>,
}

impl EpisodeResult {
    /// Planner trace as CSV (deterministic float formatting).
    pub fn trace_csv(&self) -> String {
        let mut out =
            String::from("step,scan,x,y,goal_id,goal_class,path_len,budget_left,active\n");
        for r in &self.trace {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                r.step,
                r.scan_index,
                crate::io::fmt_f64(r.x),
                crate::io::fmt_f64(r.y),
                r.goal_id,
                r.goal_class,
                crate::io::fmt_f64(r.path_len),
                crate::io::fmt_f64(r.budget_left),
                r.active_sites
            ));
        }
        out
    }

    /// Executed path as CSV rows (t, x, y, z).
    pub fn path_csv(&self) -> String {
        let mut out = String::from("t,x,y,z\n");
        for (t, p) in &self.path_log {
            out.push_str(&format!(
                "{},{},{},{}\n",
                crate::io::fmt_f64(*t),
                crate::io::fmt_f64(p.x),
                crate::io::fmt_f64(p.y),
                crate::io::fmt_f64(p.z)
            ));
        }
        out
    }

    /// Coverage-vs-distance curve as CSV rows (meters, iou).
    pub fn coverage_csv(&self) -> String {
        let mut out = String::from("travel_m,iou\n");
        for (d, iou) in &self.coverage_curve {
            out.push_str(&format!(
                "{},{}\n",
                crate::io::fmt_f64(*d),
                crate::io::fmt_f64(*iou)
            ));
        }
        out
    }

    /// SHA-256 of the planner trace; the episode determinism fingerprint.
    pub fn trace_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.trace_csv().as_bytes());
        h.update(self.path_csv().as_bytes());
        format!("{:x}", h.finalize())
    }

    /// First travel distance at which coverage reached `threshold`.
    pub fn travel_to_reach(&self, threshold: f64) -> Option<f64> {
        self.coverage_curve
            .iter()
            .find(|(_, iou)| *iou >= threshold)
            .map(|(d, _)| *d)
    }
}

/// Outcome of one planning iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Planned,
    Finished(EpisodeStatus),
}

struct FieldPass {
    tau: Vec<(u32, f64)>,
    obstacle_index: Option<SpatialIndex>,
}

/// A running episode; [`Episode::step`] executes one planning iteration so
/// tests can interleave invariant checks.
pub struct Episode {
    scene: Scene,
    params: Params,
    policy: Policy,
    noise_rng: ChaCha8Rng,
    goal_rng: ChaCha8Rng,
    cloud: LabeledPointCloud,
    sites: ActiveSiteSet,
    history: ViewpointHistory,
    pending_history: Option<(u32, Point3)>,
    robot: RobotState,
    nav: NavGrid,
    // Coverage bookkeeping.
    truth_cells: std::collections::HashSet<(i32, i32)>,
    scanned_counts: HashMap<(i32, i32), u32>,
    covered_truth: usize,
    covered_extra: usize,
    coverage_curve: Vec<(f64, f64)>,
    // Logs.
    trace: Vec<TraceRow>,
    path_log: Vec<(f64, Point3)>,
    executed: PathPolyline,
    step_seconds: Vec<f64>,
    sim_time: f64,
    status: EpisodeStatus,
    started: bool,
    step_count: u32,
    /// Guidance snapshot of the latest planning pass: (point, position, tau).
    pub last_field: Vec<(u32, Point3, f64)>,
    /// Sites created in the latest planning pass.
    pub last_created: Vec<u32>,
}

const MAX_PLAN_STEPS: u32 = 5_000;

impl Episode {
    pub fn new(scene: Scene, config: EpisodeConfig) -> crate::Result<Self> {
        config.params.validate()?;
        let params = config.params;
        if scene.truth_clearance(scene.start.x, scene.start.y) < params.clearance {
            return Err(crate::Error::Scene(
                "start pose violates obstacle clearance".into(),
            ));
        }
        let truth_cells = scene.walkable_cells(params.coverage_cell);
        let start = scene.start_position();
        let heading = scene.start.heading;
        let nav = NavGrid::new(params.nav_cell, params.clearance);
        let budget = params.budget;
        Ok(Self {
            scene,
            policy: config.policy,
            noise_rng: ChaCha8Rng::seed_from_u64(config.seed),
            goal_rng: ChaCha8Rng::seed_from_u64(config.seed ^ 0x9e37_79b9_7f4a_7c15),
            cloud: LabeledPointCloud::new(),
            sites: ActiveSiteSet::new(),
            history: ViewpointHistory::new(params.history_k),
            pending_history: None,
            robot: RobotState::new(start, heading, budget),
            nav,
            truth_cells,
            scanned_counts: HashMap::new(),
            covered_truth: 0,
            covered_extra: 0,
            coverage_curve: Vec::new(),
            trace: Vec::new(),
            path_log: vec![(0.0, start)],
            executed: PathPolyline::from_points([start]),
            step_seconds: Vec::new(),
            sim_time: 0.0,
            status: EpisodeStatus::Running,
            started: false,
            step_count: 0,
            params,
            last_field: Vec::new(),
            last_created: Vec::new(),
        })
    }

    pub fn status(&self) -> EpisodeStatus {
        self.status
    }

    pub fn cloud(&self) -> &LabeledPointCloud {
        &self.cloud
    }

    pub fn sites(&self) -> &ActiveSiteSet {
        &self.sites
    }

    pub fn robot(&self) -> &RobotState {
        &self.robot
    }

    pub fn scene(&self) -> &Scene {
        &self.scene
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    /// Current coverage IoU against the scene's walkable mask.
    pub fn coverage(&self) -> f64 {
        let denom = self.truth_cells.len() + self.covered_extra;
        if denom == 0 {
            0.0
        } else {
            self.covered_truth as f64 / denom as f64
        }
    }

    fn cell_of(&self, p: Point3) -> (i32, i32) {
        (
            (p.x / self.params.coverage_cell).floor() as i32,
            (p.y / self.params.coverage_cell).floor() as i32,
        )
    }

    fn coverage_add(&mut self, p: Point3) {
        let k = self.cell_of(p);
        let n = self.scanned_counts.entry(k).or_insert(0);
        *n += 1;
        if *n == 1 {
            if self.truth_cells.contains(&k) {
                self.covered_truth += 1;
            } else {
                self.covered_extra += 1;
            }
        }
    }

    fn coverage_remove(&mut self, p: Point3) {
        let k = self.cell_of(p);
        if let Some(n) = self.scanned_counts.get_mut(&k) {
            *n -= 1;
            if *n == 0 {
                self.scanned_counts.remove(&k);
                if self.truth_cells.contains(&k) {
                    self.covered_truth -= 1;
                } else {
                    self.covered_extra -= 1;
                }
            }
        }
    }

    fn flush_pending_history(&mut self) {
        if let Some((scan, pos)) = self.pending_history.take() {
            self.history.push(scan, pos);
        }
    }

    /// Scans at the current pose: simulate, integrate with duplicate
    /// suppression, delete ground points hugging newly discovered obstacles,
    /// refresh navigation and coverage. History insertion is deferred so the
    /// upcoming field pass sees only strictly older viewpoints.
    fn do_scan(&mut self) {
        self.flush_pending_history();
        let scan_index = self.robot.scan_index;
        let batch = simulate_scan(
            &self.scene,
            self.robot.position,
            &self.params.lidar,
            &mut self.noise_rng,
        );
        let added = integrate_scan(
            &mut self.cloud,
            &batch,
            scan_index,
            self.params.merge_radius,
        );
        // Collision clearance: ground points too close to a newly seen
        // obstacle point are dropped (coverage may decrease here).
        let mut removed: Vec<u32> = Vec::new();
        for &i in &added {
            if self.cloud.label(i) == PointLabel::Obstacle {
                for g in self.cloud.radius_indices_labeled(
                    self.cloud.point(i),
                    self.params.collision_removal_radius,
                    PointLabel::Ground,
                ) {
                    removed.push(g);
                }
            }
        }
        removed.sort_unstable();
        removed.dedup();
        for g in removed {
            self.coverage_remove(self.cloud.point(g));
            self.cloud.remove(g);
        }
        for &i in &added {
            if self.cloud.is_alive(i) && self.cloud.label(i) == PointLabel::Ground {
                self.coverage_add(self.cloud.point(i));
            }
        }
        self.nav.integrate_points(&self.cloud, &added);
        self.coverage_curve.push((self.robot.traveled, self.coverage()));
        self.pending_history = Some((scan_index, self.robot.position));
        self.robot.scan_index += 1;
    }

    /// Planning-area indices by horizontal distance.
    fn planning_area(&self) -> (Vec<u32>, Vec<u32>, Vec<u32>) {
        let area =
            self.cloud
                .radius_indices_xy(self.robot.position, self.params.sigma, None);
        let mut ground = Vec::new();
        let mut obstacles = Vec::new();
        for &i in &area {
            match self.cloud.label(i) {
                PointLabel::Ground => ground.push(i),
                PointLabel::Obstacle => obstacles.push(i),
            }
        }
        (area, ground, obstacles)
    }

    fn obstacle_index(&self, obstacle_idx: &[u32]) -> Option<SpatialIndex> {
        if obstacle_idx.is_empty() {
            return None;
        }
        let pts: Vec<Point3> = obstacle_idx.iter().map(|&i| self.cloud.point(i)).collect();
        Some(SpatialIndex::build(&pts).expect("non-empty obstacle set"))
    }

    /// Representative ground points (lowest index per evaluation cell) on
    /// which observability, smoothing, guidance, and site extraction run.
    fn eval_reps(&self, ground: &[u32]) -> Vec<u32> {
        let cell = self.params.field_eval_cell;
        let mut reps: HashMap<(i64, i64), u32> = HashMap::new();
        for &i in ground {
            let p = self.cloud.point(i);
            let k = ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64);
            reps.entry(k).or_insert(i);
        }
        let mut out: Vec<u32> = reps.into_values().collect();
        out.sort_unstable();
        out
    }

    /// Binary observability over evaluation points via GHPR visibility on a
    /// down-sampled planning cloud.
    fn compute_rho(&self, area: &[u32], eval: &[u32]) -> crate::Result<Vec<(u32, f64)>> {
        if self.history.is_empty() || eval.is_empty() {
            return Ok(eval.iter().map(|&i| (i, 0.0)).collect());
        }
        let cell = self.params.visibility_cell;
        let keyer = |p: Point3| {
            (
                (p.x / cell).floor() as i64,
                (p.y / cell).floor() as i64,
                (p.z / cell).floor() as i64,
            )
        };
        let mut slot_of_cell: HashMap<(i64, i64, i64), usize> = HashMap::new();
        let mut positions: Vec<Point3> = Vec::new();
        for &i in area {
            let p = self.cloud.point(i);
            slot_of_cell.entry(keyer(p)).or_insert_with(|| {
                positions.push(p);
                positions.len() - 1
            });
        }
        let mut seen_any = vec![false; positions.len()];
        let sensor = Point3::new(0.0, 0.0, self.params.lidar.sensor_height);
        for (_, vp) in self.history.iter() {
            let vis = visible_set(&positions, vp + sensor, self.params.alpha)?;
            for (s, v) in vis.visible.iter().enumerate() {
                seen_any[s] |= *v;
            }
        }
        let oldest = self.history.oldest_scan().unwrap();
        Ok(eval
            .iter()
            .map(|&i| {
                let fresh = self.cloud.first_seen(i) > oldest;
                let slot = slot_of_cell[&keyer(self.cloud.point(i))];
                (i, if fresh && seen_any[slot] { 1.0 } else { 0.0 })
            })
            .collect())
    }

    /// Full guidance-field pass for a planning iteration.
    fn field_pass(&mut self) -> crate::Result<FieldPass> {
        let (area, ground, obstacle_idx) = self.planning_area();
        let obstacle_index = self.obstacle_index(&obstacle_idx);
        update_explorability(
            &mut self.cloud,
            &ground,
            self.robot.position,
            obstacle_index.as_ref(),
            self.params.omega,
            self.params.sigma,
        );
        let eval = self.eval_reps(&ground);
        let rho = self.compute_rho(&area, &eval)?;
        let rho_s = smooth_observability(
            &self.cloud,
            &rho,
            self.params.smooth_radius,
            self.params.smooth_sigma,
        );
        for &(i, v) in &rho_s {
            self.cloud.attrs_mut(i).rho_smooth = v;
        }
        let tau = guidance_field(&mut self.cloud, &eval, self.params.lambda);
        Ok(FieldPass { tau, obstacle_index })
    }

    /// Mid-leg bookkeeping: stored explorability keeps decaying with every
    /// scan, and sites the robot passes get marked visited.
    fn light_field_pass(&mut self) {
        let (_, ground, obstacle_idx) = self.planning_area();
        let obstacle_index = self.obstacle_index(&obstacle_idx);
        update_explorability(
            &mut self.cloud,
            &ground,
            self.robot.position,
            obstacle_index.as_ref(),
            self.params.omega,
            self.params.sigma,
        );
        self.mark_visited_near();
    }

    fn mark_visited_near(&mut self) {
        let near: Vec<u32> = self
            .sites
            .active()
            .filter(|s| s.position.dist(self.robot.position) <= self.params.visit_radius)
            .map(|s| s.id)
            .collect();
        for id in near {
            self.sites.mark_visited(id);
        }
    }

    /// One planning iteration; returns whether the episode continues.
    pub fn step(&mut self) -> crate::Result<StepOutcome> {
        if self.status != EpisodeStatus::Running {
            return Ok(StepOutcome::Finished(self.status));
        }
        let wall_start = std::time::Instant::now();
        self.step_count += 1;
        if self.step_count > MAX_PLAN_STEPS {
            self.status = EpisodeStatus::StepLimit;
            return Ok(StepOutcome::Finished(self.status));
        }
        if !self.started {
            self.do_scan();
            self.started = true;
        }

        // Fields, site generation, classification, maintenance.
        let pass = self.field_pass()?;
        self.flush_pending_history();

        let re_eval: Vec<SiteTau> = self
            .sites
            .active()
            .filter_map(|s| {
                if !self.cloud.is_alive(s.point_index) {
                    return Some((s.id, None));
                }
                if s.position.dist_xy(self.robot.position) <= self.params.sigma {
                    Some((s.id, Some(self.cloud.attrs(s.point_index).tau)))
                } else {
                    None
                }
            })
            .collect();
        maintain_active_set(
            &mut self.sites,
            &re_eval,
            self.robot.position,
            self.params.visit_radius,
            self.params.tau_threshold,
        );

        let seeds = extract_sites(
            &self.cloud,
            &pass.tau,
            self.params.r_n,
            self.params.tau_threshold,
        );
        let classes: Vec<SiteClass> = seeds
            .iter()
            .map(|s| {
                let phi_m = explorability_medial(
                    s.position,
                    pass.obstacle_index.as_ref(),
                    self.params.sigma,
                );
                let rho_s = self.cloud.attrs(s.point_index).rho_smooth;
                classify_site(phi_m, rho_s, self.params.oa_phi_m)
            })
            .collect();
        let scan_idx = self.robot.scan_index.saturating_sub(1);
        self.last_created =
            self.sites
                .insert_candidates(&seeds, &classes, self.params.r_n, scan_idx);
        self.last_field = pass
            .tau
            .iter()
            .map(|&(i, t)| (i, self.cloud.point(i), t))
            .collect();

        // Goal selection.
        let planned = match self.policy {
            Policy::RandomWalk => self.random_walk_goal()?,
            Policy::Full | Policy::NoRefine => plan_step(
                &mut self.sites,
                self.robot.position,
                self.robot.budget.remaining(),
                &mut self.nav,
                true,
            )?,
            Policy::GreedyOnly => plan_step(
                &mut self.sites,
                self.robot.position,
                self.robot.budget.remaining(),
                &mut self.nav,
                false,
            )?,
        };

        let outcome = match planned {
            PlanOutcome::Terminate(reason) => {
                self.trace.push(TraceRow {
                    step: self.step_count,
                    scan_index: scan_idx,
                    x: self.robot.position.x,
                    y: self.robot.position.y,
                    goal_id: -1,
                    goal_class: "-",
                    path_len: 0.0,
                    budget_left: self.robot.budget.remaining(),
                    active_sites: self.sites.active_count(),
                });
                self.status = EpisodeStatus::Terminated(reason);
                StepOutcome::Finished(self.status)
            }
            PlanOutcome::Goal { site_id, path } => {
                let goal_class = if site_id == u32::MAX {
                    "RW"
                } else {
                    match self.sites.site(site_id).class {
                        SiteClass::OpenArea => "OA",
                        SiteClass::BranchEntry => "BE",
                    }
                };
                let exec_path = self.prepare_leg_path(&path);
                self.trace.push(TraceRow {
                    step: self.step_count,
                    scan_index: scan_idx,
                    x: self.robot.position.x,
                    y: self.robot.position.y,
                    goal_id: if site_id == u32::MAX { -2 } else { site_id as i64 },
                    goal_class,
                    path_len: exec_path.length(),
                    budget_left: self.robot.budget.remaining(),
                    active_sites: self.sites.active_count(),
                });
                self.execute_leg(site_id, &exec_path);
                StepOutcome::Planned
            }
        };
        self.step_seconds.push(wall_start.elapsed().as_secs_f64());
        Ok(outcome)
    }

    /// Refines the planned polyline into a quality-aware spline when the
    /// policy calls for it; otherwise returns the polyline unchanged.
    fn prepare_leg_path(&mut self, base: &PathPolyline) -> PathPolyline {
        let refine_on = matches!(self.policy, Policy::Full | Policy::GreedyOnly);
        if !refine_on || base.length() < 2.0 * self.params.base_sample_step {
            return base.clone();
        }
        let queue_points = self.quality_queue_for(base);
        let mut queue = queue_points;
        let clearance_cut = self.params.clearance + 3.0;
        let cloud = &self.cloud;
        let clearance = move |p: Point3| {
            cloud
                .nearest_xy_within(p, PointLabel::Obstacle, clearance_cut)
                .map(|(_, d)| d)
        };
        let obstacle_at = move |p: Point3| {
            cloud
                .nearest_xy_within(p, PointLabel::Obstacle, clearance_cut)
                .map(|(i, _)| cloud.point(i))
        };
        let controls = select_control_points(
            base,
            self.params.base_sample_step,
            &mut queue,
            self.params.d_c,
            self.params.r_c,
            &clearance,
            self.params.clearance,
        );
        let start = base.waypoints()[0];
        let goal = *base.waypoints().last().unwrap();
        match crate::refine::refine_path(
            start,
            goal,
            &controls,
            &clearance,
            self.params.clearance,
            &obstacle_at,
        ) {
            Ok(RefinedPath::Spline(curve)) => {
                curve_to_polyline(&curve, self.params.curve_sample_step, base.length())
            }
            Ok(RefinedPath::Fallback) | Err(_) => base.clone(),
        }
    }

    /// Under-scanned points near the planned leg, by local box-counting
    /// dimension over corridor representatives.
    fn quality_queue_for(&mut self, base: &PathPolyline) -> QualityQueue {
        let corridor = self.params.r_c + self.params.d_c + 1.0;
        let mut idx_set: Vec<u32> = Vec::new();
        for s in base.resample(2.0) {
            idx_set.extend(self.cloud.radius_indices_xy(s, corridor, Some(PointLabel::Ground)));
        }
        idx_set.sort_unstable();
        idx_set.dedup();
        let reps = self.eval_reps(&idx_set);
        let dims = match crate::quality::local_quality_field(
            &mut self.cloud,
            &reps,
            self.params.quality_radius,
            &self.params.quality_ladder,
            self.params.quality_min_points,
        ) {
            Ok(d) => d,
            Err(_) => Vec::new(),
        };
        QualityQueue::from_dims(
            dims.into_iter()
                .filter_map(|(i, d)| d.map(|d| (d, self.cloud.point(i)))),
            self.params.under_scanned_dim,
        )
    }

    /// Follows a leg: advances pose, spends budget, scans on schedule, and
    /// halts early if a fresh obstacle breaks the remaining path's
    /// clearance.
    fn execute_leg(&mut self, site_id: u32, path: &PathPolyline) {
        let (events, halt) = step_robot(
            path,
            self.params.speed,
            self.params.scan_period,
            self.robot.budget.remaining(),
        );
        let mut prev_arc = 0.0;
        let mut truncated = false;
        for ev in &events {
            self.advance_along(path, prev_arc, ev.arc);
            prev_arc = ev.arc;
            self.do_scan();
            match ev.kind {
                StepEventKind::Periodic => {
                    self.light_field_pass();
                    if self.remaining_path_blocked(path, ev.arc) {
                        truncated = true;
                        break;
                    }
                }
                StepEventKind::Arrival => {
                    self.mark_visited_near();
                }
            }
        }
        let arrived = !truncated && halt == super::HaltReason::Completed;
        if arrived && site_id != u32::MAX {
            self.sites.mark_visited(site_id);
        }
    }

    /// Moves the robot along `path` from arc `from` to arc `to`, logging
    /// dense pose samples and spending budget.
    fn advance_along(&mut self, path: &PathPolyline, from: f64, to: f64) {
        if to <= from {
            return;
        }
        let step = self.params.curve_sample_step.max(0.05);
        let n = (((to - from) / step).ceil() as usize).max(1);
        let mut prev = self.robot.position;
        for k in 1..=n {
            let arc = from + (to - from) * k as f64 / n as f64;
            let p = path.point_at_arc(arc);
            let d = prev.dist(p);
            if d > 0.0 {
                self.robot.budget.spend(d);
                self.robot.traveled += d;
                self.sim_time += d / self.params.speed;
                self.robot.heading = (p.y - prev.y).atan2(p.x - prev.x);
                self.robot.position = p;
                self.executed.push(p);
                self.path_log.push((self.sim_time, p));
                prev = p;
            }
        }
    }

    /// Checks the not-yet-traversed part of the leg against the obstacles
    /// known right now.
    fn remaining_path_blocked(&self, path: &PathPolyline, from_arc: f64) -> bool {
        let total = path.length();
        if from_arc >= total {
            return false;
        }
        let step = 0.5;
        let mut arc = from_arc;
        while arc <= total {
            let p = path.point_at_arc(arc);
            if self
                .cloud
                .nearest_xy_within(p, PointLabel::Obstacle, self.params.clearance)
                .is_some()
            {
                return true;
            }
            arc += step;
        }
        false
    }

    /// Uniformly random clearance-valid goal within the planning radius.
    fn random_walk_goal(&mut self) -> crate::Result<PlanOutcome> {
        let candidates = self
            .nav
            .walkable_nodes_within(self.robot.position, self.params.sigma);
        let reachable: Vec<Point3> = candidates
            .into_iter()
            .filter(|p| p.dist(self.robot.position) > self.params.visit_radius)
            .collect();
        if reachable.is_empty() {
            return Ok(PlanOutcome::Terminate(TerminateReason::NoReachableGoal));
        }
        // Bounded number of attempts: a sampled goal may be disconnected.
        for _ in 0..16 {
            let goal = reachable[self.goal_rng.gen_range(0..reachable.len())];
            if let Some(path) = self.nav.path(self.robot.position, goal) {
                if path.length() > self.robot.budget.remaining() {
                    return Ok(PlanOutcome::Terminate(TerminateReason::BudgetExhausted));
                }
                return Ok(PlanOutcome::Goal { site_id: u32::MAX, path });
            }
        }
        Ok(PlanOutcome::Terminate(TerminateReason::NoReachableGoal))
    }

    /// Runs the loop to completion and packages the results.
    pub fn run(mut self) -> crate::Result<EpisodeResult> {
        while self.status == EpisodeStatus::Running {
            self.step()?;
        }
        Ok(self.finish())
    }

    /// Packages results without running further (for stepwise drivers).
    pub fn finish(self) -> EpisodeResult {
        let final_iou = self.coverage();
        let curvature = accumulated_curvature(&self.executed);
        EpisodeResult {
            status: self.status,
            trace: self.trace,
            coverage_curve: self.coverage_curve,
            final_iou,
            total_travel: self.robot.traveled,
            accumulated_curvature: curvature,
            scan_count: self.robot.scan_index,
            step_seconds: self.step_seconds,
            cloud: self.cloud,
            executed: self.executed,
            path_log: self.path_log,
        }
    }
}

/// Runs one full episode on a scene.
pub fn run_episode(scene: Scene, config: EpisodeConfig) -> crate::Result<EpisodeResult> {
    Episode::new(scene, config)?.run()
}
