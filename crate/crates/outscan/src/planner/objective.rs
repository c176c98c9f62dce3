use crate::guidance::SiteClass;

/// Guidance values are clamped below 1 so the traverse objective's
/// denominator never vanishes.
pub const TAU_CLAMP: f64 = 0.999;

/// Pairwise traverse objective `o(from, to) = d(from, to) / (1 - tau(to))`.
///
/// Row 0 is the start node (the robot); the matrix is asymmetric because the
/// denominator rewards the segment's destination site.
#[derive(Debug, Clone)]
pub struct EdgeObjective {
    n: usize,
    data: Vec<f64>,
}

impl EdgeObjective {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.data[from * self.n + to]
    }
}

/// Builds the objective from a distance matrix (row-major, `n x n`) and the
/// per-node guidance values.
pub fn edge_objective(distances: &[f64], tau: &[f64]) -> EdgeObjective {
    let n = tau.len();
    assert_eq!(distances.len(), n * n, "square distance matrix required");
    let mut data = vec![0.0; n * n];
    for from in 0..n {
        for to in 0..n {
            let denom = 1.0 - tau[to].min(TAU_CLAMP);
            data[from * n + to] = distances[from * n + to] / denom;
        }
    }
    EdgeObjective { n, data }
}

/// Open-area versus branch-entry classification: spacious
/// (`phi_m > threshold`) or fully observed (`rho_smooth = 1` within 1e-6)
/// sites are open-area.
pub fn classify_site(phi_m: f64, rho_smooth: f64, oa_phi_m: f64) -> SiteClass {
    if phi_m > oa_phi_m || rho_smooth >= 1.0 - 1e-6 {
        SiteClass::OpenArea
    } else {
        SiteClass::BranchEntry
    }
}

/// Greedy choice over open-area candidates `(site id, distance from the
/// robot, tau)`: minimize `d / (1 - tau)`, ties to the lower site id.
pub fn greedy_next(candidates: &[(u32, f64, f64)]) -> Option<u32> {
    candidates
        .iter()
        .map(|&(id, d, tau)| (d / (1.0 - tau.min(TAU_CLAMP)), id))
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)))
        .map(|(_, id)| id)
}
