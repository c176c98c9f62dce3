//! Runtime parameters for planning, scanning, and evaluation.
//!
//! Every knob carries the default used throughout the experiments; a JSON
//! config file (or CLI flags) may override any subset.

use serde::{Deserialize, Serialize};

/// LiDAR sensor model parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct LidarParams {
    /// Maximum usable range in meters.
    pub max_range: f64,
    /// Lowest elevation angle in degrees.
    pub elevation_min_deg: f64,
    /// Highest elevation angle in degrees.
    pub elevation_max_deg: f64,
    /// Number of elevation rings.
    pub rings: usize,
    /// Azimuth step in degrees.
    pub azimuth_step_deg: f64,
    /// Isotropic Gaussian range-noise sigma in meters.
    pub noise_sigma: f64,
    /// Sensor mounting height above the ground in meters.
    pub sensor_height: f64,
}

impl Default for LidarParams {
    fn default() -> Self {
        Self {
            max_range: 50.0,
            elevation_min_deg: -15.0,
            elevation_max_deg: 15.0,
            rings: 40,
            azimuth_step_deg: 0.4,
            noise_sigma: 0.02,
            sensor_height: 0.8,
        }
    }
}

/// All tunable parameters of the planner and the simulation harness.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Params {
    /// Planning-area radius in meters; also the length scale of Eqs. 2-3.
    pub sigma: f64,
    /// Non-maximum-suppression radius for site extraction, meters.
    pub r_n: f64,
    /// Guidance-field fusion weight between explorability and observability.
    pub lambda: f64,
    /// Explorability fusion weight between distance and medial terms.
    pub omega: f64,
    /// GHPR radial-kernel scale factor.
    pub alpha: f64,
    /// Number of historical viewpoints used for observability.
    pub history_k: usize,
    /// Neighbor count of the site kNN graph.
    pub site_knn: usize,
    /// Guidance threshold below which sites are neither created nor kept.
    pub tau_threshold: f64,
    /// Medial-explorability threshold for Open Area classification.
    pub oa_phi_m: f64,
    /// Robot-to-site distance that marks a site as visited, meters.
    pub visit_radius: f64,
    /// Control-point displacement distance for path refinement, meters.
    pub d_c: f64,
    /// Path-sample suppression radius during control-point selection, meters.
    pub r_c: f64,
    /// Sample spacing of the base path before refinement, meters.
    pub base_sample_step: f64,
    /// Sample spacing when discretizing refined spline paths, meters.
    pub curve_sample_step: f64,
    /// Minimum obstacle clearance for robot positions and paths, meters.
    pub clearance: f64,
    /// Gaussian kernel radius for observability smoothing, meters.
    pub smooth_radius: f64,
    /// Gaussian kernel sigma for observability smoothing, meters.
    pub smooth_sigma: f64,
    /// Travel-distance budget for one episode, meters.
    pub budget: f64,
    /// Robot traverse speed, m/s.
    pub speed: f64,
    /// Simulated time between scans, seconds.
    pub scan_period: f64,
    /// Merge radius for duplicate suppression during scan integration, meters.
    pub merge_radius: f64,
    /// Ground points closer than this to a newly discovered obstacle point
    /// are dropped from the cloud, meters.
    pub collision_removal_radius: f64,
    /// Cell size of the downsampled cloud fed to GHPR during episodes, meters.
    pub visibility_cell: f64,
    /// Cell size of the ground subsample on which per-scan field smoothing,
    /// guidance, and site extraction are evaluated, meters.
    pub field_eval_cell: f64,
    /// Cell size of the ground navigation graph, meters.
    pub nav_cell: f64,
    /// Raster cell size for coverage IoU, meters.
    pub coverage_cell: f64,
    /// Box-counting cell ladder (descending), meters.
    pub quality_ladder: Vec<f64>,
    /// Neighborhood radius for the local quality field, meters.
    pub quality_radius: f64,
    /// Minimum neighborhood size for a local dimension estimate.
    pub quality_min_points: usize,
    /// Fractal dimension below which a point counts as under-scanned.
    pub under_scanned_dim: f64,
    /// LiDAR sensor model.
    pub lidar: LidarParams,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            sigma: 12.0,
            r_n: 6.0,
            lambda: 0.7,
            omega: 0.5,
            alpha: 1.0e4,
            history_k: 2,
            site_knn: 8,
            tau_threshold: 0.3,
            oa_phi_m: 0.8,
            visit_radius: 1.5,
            d_c: 1.5,
            r_c: 3.0,
            base_sample_step: 0.5,
            curve_sample_step: 0.25,
            clearance: 1.0,
            smooth_radius: 2.0,
            smooth_sigma: 1.0,
            budget: 1000.0,
            speed: 1.0,
            scan_period: 8.0,
            merge_radius: 0.05,
            collision_removal_radius: 1.0,
            visibility_cell: 0.3,
            field_eval_cell: 0.25,
            nav_cell: 0.5,
            coverage_cell: 0.5,
            quality_ladder: vec![1.6, 0.8, 0.4, 0.2, 0.1],
            quality_radius: 2.0,
            quality_min_points: 8,
            under_scanned_dim: 2.0,
            lidar: LidarParams::default(),
        }
    }
}

impl Params {
    /// Validates parameter ranges that downstream code relies on.
    pub fn validate(&self) -> crate::Result<()> {
        if !(self.sigma > 0.0) {
            return Err(crate::Error::InvalidParameter("sigma must be > 0".into()));
        }
        if !(self.alpha > 1.0) {
            return Err(crate::Error::InvalidParameter("alpha must be > 1".into()));
        }
        if !(0.0..=1.0).contains(&self.lambda) || !(0.0..=1.0).contains(&self.omega) {
            return Err(crate::Error::InvalidParameter(
                "lambda and omega must lie in [0,1]".into(),
            ));
        }
        if self.r_n <= 0.0 || self.visit_radius <= 0.0 {
            return Err(crate::Error::InvalidParameter(
                "r_n and visit_radius must be > 0".into(),
            ));
        }
        if self.quality_ladder.len() < 3 {
            return Err(crate::Error::InvalidParameter(
                "quality ladder needs at least 3 scales".into(),
            ));
        }
        Ok(())
    }
}
