use super::EdgeObjective;

/// Exact solutions are affordable through this size (2^n subsets).
const EXACT_LIMIT: usize = 12;
/// Beyond this many pending sites something is wrong upstream; the planning
/// area bounds the site count well below it.
const HARD_CAP: usize = 30;

/// Open-path TSP over `objective` (node 0 is the fixed start, no return):
/// returns the visiting order of nodes `1..n` minimizing the summed edge
/// objective. Exact subset DP up to 12 sites, nearest-neighbor plus 2-opt
/// beyond, error above the hard cap.
pub fn tsp_order(objective: &EdgeObjective) -> crate::Result<Vec<usize>> {
    let n = objective.n();
    if n == 0 {
        return Err(crate::Error::EmptyInput);
    }
    let sites = n - 1;
    if sites == 0 {
        return Ok(Vec::new());
    }
    if sites > HARD_CAP {
        return Err(crate::Error::TooManySites(sites));
    }
    if sites == 1 {
        return Ok(vec![1]);
    }
    if sites <= EXACT_LIMIT {
        Ok(held_karp_open(objective))
    } else {
        Ok(two_opt(objective, nearest_neighbor(objective)))
    }
}

/// Subset DP (Held-Karp) for the open path: `dp[mask][j]` is the cheapest
/// way to leave the start, visit exactly the sites in `mask`, and stand at
/// site `j`. Ties resolve toward lexicographically smaller orders via the
/// deterministic scan order of predecessors.
fn held_karp_open(objective: &EdgeObjective) -> Vec<usize> {
    let m = objective.n() - 1;
    let full = 1usize << m;
    let mut dp = vec![f64::INFINITY; full * m];
    let mut parent = vec![usize::MAX; full * m];
    for j in 0..m {
        dp[(1 << j) * m + j] = objective.get(0, j + 1);
    }
    for mask in 1..full {
        for j in 0..m {
            if mask & (1 << j) == 0 {
                continue;
            }
            let cur = dp[mask * m + j];
            if !cur.is_finite() {
                continue;
            }
            for k in 0..m {
                if mask & (1 << k) != 0 {
                    continue;
                }
                let next_mask = mask | (1 << k);
                let cand = cur + objective.get(j + 1, k + 1);
                if cand < dp[next_mask * m + k] {
                    dp[next_mask * m + k] = cand;
                    parent[next_mask * m + k] = j;
                }
            }
        }
    }
    let last_mask = full - 1;
    let mut end = 0;
    let mut best = f64::INFINITY;
    for j in 0..m {
        if dp[last_mask * m + j] < best {
            best = dp[last_mask * m + j];
            end = j;
        }
    }
    let mut order = Vec::with_capacity(m);
    let mut mask = last_mask;
    let mut j = end;
    loop {
        order.push(j + 1);
        let p = parent[mask * m + j];
        mask &= !(1 << j);
        if p == usize::MAX {
            break;
        }
        j = p;
    }
    order.reverse();
    order
}

fn nearest_neighbor(objective: &EdgeObjective) -> Vec<usize> {
    let n = objective.n();
    let mut order = Vec::with_capacity(n - 1);
    let mut visited = vec![false; n];
    let mut cur = 0usize;
    for _ in 1..n {
        let mut best = (f64::INFINITY, usize::MAX);
        for cand in 1..n {
            if !visited[cand] {
                let c = objective.get(cur, cand);
                if c < best.0 {
                    best = (c, cand);
                }
            }
        }
        visited[best.1] = true;
        order.push(best.1);
        cur = best.1;
    }
    order
}

fn path_cost(objective: &EdgeObjective, order: &[usize]) -> f64 {
    let mut cost = 0.0;
    let mut prev = 0usize;
    for &v in order {
        cost += objective.get(prev, v);
        prev = v;
    }
    cost
}

/// First-improvement 2-opt on the open path (segment reversals).
fn two_opt(objective: &EdgeObjective, mut order: Vec<usize>) -> Vec<usize> {
    let m = order.len();
    let mut best_cost = path_cost(objective, &order);
    let mut improved = true;
    while improved {
        improved = false;
        for i in 0..m - 1 {
            for j in i + 1..m {
                order[i..=j].reverse();
                let cost = path_cost(objective, &order);
                if cost + 1e-12 < best_cost {
                    best_cost = cost;
                    improved = true;
                } else {
                    order[i..=j].reverse();
                }
            }
        }
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::edge_objective;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_objective(rng: &mut StdRng, n: usize) -> EdgeObjective {
        // Asymmetric positive matrix straight from the generator; tau = 0 so
        // the objective equals the raw distances.
        let mut d = vec![0.0; n * n];
        for from in 0..n {
            for to in 0..n {
                if from != to {
                    d[from * n + to] = rng.gen_range(0.1..100.0);
                }
            }
        }
        edge_objective(&d, &vec![0.0; n])
    }

    fn brute_force(objective: &EdgeObjective) -> (f64, Vec<usize>) {
        let m = objective.n() - 1;
        let mut sites: Vec<usize> = (1..=m).collect();
        let mut best = (f64::INFINITY, Vec::new());
        permute(&mut sites, 0, &mut |perm| {
            let c = path_cost(objective, perm);
            if c < best.0 {
                best = (c, perm.to_vec());
            }
        });
        best
    }

    fn permute(v: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
        if k == v.len() {
            f(v);
            return;
        }
        for i in k..v.len() {
            v.swap(k, i);
            permute(v, k + 1, f);
            v.swap(k, i);
        }
    }

    #[test]
    fn single_site_is_trivial() {
        let o = edge_objective(&[0.0, 3.0, 3.0, 0.0], &[0.0, 0.2]);
        assert_eq!(tsp_order(&o).unwrap(), vec![1]);
    }

    #[test]
    fn three_sites_match_enumeration() {
        let mut rng = StdRng::seed_from_u64(100);
        for _ in 0..50 {
            let o = random_objective(&mut rng, 4);
            let got = tsp_order(&o).unwrap();
            let (best, _) = brute_force(&o);
            assert!((path_cost(&o, &got) - best).abs() < 1e-9);
        }
    }

    #[test]
    fn eight_sites_match_enumeration() {
        let mut rng = StdRng::seed_from_u64(101);
        for _ in 0..20 {
            let o = random_objective(&mut rng, 9);
            let got = tsp_order(&o).unwrap();
            let (best, _) = brute_force(&o);
            assert!(
                (path_cost(&o, &got) - best).abs() < 1e-9,
                "dp {} vs brute {best}",
                path_cost(&o, &got)
            );
        }
    }

    #[test]
    fn heuristic_regime_visits_everything() {
        let mut rng = StdRng::seed_from_u64(102);
        let o = random_objective(&mut rng, 16); // 15 sites: beyond exact
        let got = tsp_order(&o).unwrap();
        let mut sorted = got.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (1..16).collect::<Vec<usize>>());
    }

    #[test]
    fn hard_cap_errors() {
        let mut rng = StdRng::seed_from_u64(103);
        let o = random_objective(&mut rng, 32);
        assert!(matches!(tsp_order(&o), Err(crate::Error::TooManySites(31))));
    }
}
