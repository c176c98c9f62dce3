use crate::geom::{PathPolyline, Point3};

/// Remaining travel-distance budget in meters, standing in for battery life.
#[derive(Debug, Clone, Copy)]
pub struct EnergyBudget {
    remaining: f64,
}

impl EnergyBudget {
    pub fn new(meters: f64) -> Self {
        assert!(meters >= 0.0);
        Self { remaining: meters }
    }

    pub fn remaining(&self) -> f64 {
        self.remaining
    }

    /// Spends up to `meters`; returns what was actually available.
    pub fn spend(&mut self, meters: f64) -> f64 {
        let spent = meters.min(self.remaining);
        self.remaining -= spent;
        spent
    }
}

/// The simulated scanner's pose and bookkeeping.
#[derive(Debug, Clone)]
pub struct RobotState {
    pub position: Point3,
    pub heading: f64,
    pub traveled: f64,
    pub scan_index: u32,
    pub budget: EnergyBudget,
}

impl RobotState {
    pub fn new(position: Point3, heading: f64, budget: f64) -> Self {
        Self {
            position,
            heading,
            traveled: 0.0,
            scan_index: 0,
            budget: EnergyBudget::new(budget),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepEventKind {
    /// Scheduled mid-traverse scan (every `scan_period` seconds).
    Periodic,
    /// Scan at the end of the executed (possibly truncated) traverse.
    Arrival,
}

/// A scan trigger along the traverse at arc position `arc`.
#[derive(Debug, Clone, Copy)]
pub struct StepEvent {
    pub pose: Point3,
    pub arc: f64,
    pub kind: StepEventKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaltReason {
    Completed,
    BudgetExhausted,
}

/// Schedules the scan triggers for advancing along `path` at `speed`,
/// scanning every `scan_period` seconds of simulated time, with an arrival
/// scan at the end. Execution truncates at `budget_remaining` meters.
///
/// A zero-length path produces a single arrival scan in place.
pub fn step_robot(
    path: &PathPolyline,
    speed: f64,
    scan_period: f64,
    budget_remaining: f64,
) -> (Vec<StepEvent>, HaltReason) {
    assert!(speed > 0.0 && scan_period > 0.0);
    let total = path.length();
    let executed = total.min(budget_remaining.max(0.0));
    let stride = speed * scan_period;
    let mut events = Vec::new();
    let mut k = 1usize;
    loop {
        let arc = k as f64 * stride;
        if arc > executed {
            break;
        }
        events.push(StepEvent {
            pose: path.point_at_arc(arc),
            arc,
            kind: StepEventKind::Periodic,
        });
        k += 1;
    }
    events.push(StepEvent {
        pose: path.point_at_arc(executed),
        arc: executed,
        kind: StepEventKind::Arrival,
    });
    let reason = if executed + 1e-9 < total {
        HaltReason::BudgetExhausted
    } else {
        HaltReason::Completed
    };
    (events, reason)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(len: f64) -> PathPolyline {
        PathPolyline::from_points([Point3::ZERO, Point3::new(len, 0.0, 0.0)])
    }

    #[test]
    fn eight_meter_leg_scans_twice() {
        // 8 m at 1 m/s with an 8 s period: one periodic trigger (which lands
        // on the endpoint) plus the arrival scan.
        let (events, reason) = step_robot(&line(8.0), 1.0, 8.0, 1000.0);
        assert_eq!(reason, HaltReason::Completed);
        assert_eq!(events.len(), 2);
        assert_eq!(events[0].kind, StepEventKind::Periodic);
        assert_eq!(events[1].kind, StepEventKind::Arrival);
        assert!((events[1].arc - 8.0).abs() < 1e-12);
    }

    #[test]
    fn long_leg_scans_periodically() {
        let (events, _) = step_robot(&line(20.0), 1.0, 8.0, 1000.0);
        let arcs: Vec<f64> = events.iter().map(|e| e.arc).collect();
        assert_eq!(arcs, vec![8.0, 16.0, 20.0]);
    }

    #[test]
    fn zero_length_path_scans_once_in_place() {
        let p = PathPolyline::from_points([Point3::new(3.0, 1.0, 0.0)]);
        let (events, reason) = step_robot(&p, 1.0, 8.0, 1000.0);
        assert_eq!(reason, HaltReason::Completed);
        assert_eq!(events.len(), 1);
        assert_eq!(events[0].kind, StepEventKind::Arrival);
        assert_eq!(events[0].arc, 0.0);
    }

    #[test]
    fn budget_halts_mid_path() {
        let (events, reason) = step_robot(&line(20.0), 1.0, 8.0, 12.5);
        assert_eq!(reason, HaltReason::BudgetExhausted);
        let last = events.last().unwrap();
        assert_eq!(last.kind, StepEventKind::Arrival);
        assert!((last.arc - 12.5).abs() < 1e-12);
        assert!((last.pose.x - 12.5).abs() < 1e-12);
    }

    #[test]
    fn budget_tracks_spending() {
        let mut b = EnergyBudget::new(10.0);
        assert_eq!(b.spend(4.0), 4.0);
        assert_eq!(b.spend(8.0), 6.0);
        assert_eq!(b.remaining(), 0.0);
    }
}
