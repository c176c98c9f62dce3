use super::{PathPolyline, Point3};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Undirected weighted graph whose nodes carry 3D positions.
///
/// Edge weights must be non-negative; path queries use Dijkstra.
#[derive(Debug, Clone, Default)]
pub struct PointGraph {
    positions: Vec<Point3>,
    adjacency: Vec<Vec<(u32, f64)>>,
}

impl PointGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, p: Point3) -> u32 {
        self.positions.push(p);
        self.adjacency.push(Vec::new());
        (self.positions.len() - 1) as u32
    }

    pub fn add_edge(&mut self, a: u32, b: u32, weight: f64) {
        assert!(weight >= 0.0, "edge weights must be non-negative");
        assert!(a != b, "self loops are not allowed");
        self.adjacency[a as usize].push((b, weight));
        self.adjacency[b as usize].push((a, weight));
    }

    pub fn node_count(&self) -> usize {
        self.positions.len()
    }

    pub fn position(&self, i: u32) -> Point3 {
        self.positions[i as usize]
    }

    pub fn neighbors(&self, i: u32) -> &[(u32, f64)] {
        &self.adjacency[i as usize]
    }

    /// Shortest-path distances from `start` to every reachable node.
    pub fn dijkstra_all(&self, start: u32) -> Vec<f64> {
        let n = self.positions.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut heap = BinaryHeap::new();
        dist[start as usize] = 0.0;
        heap.push(HeapEntry { cost: 0.0, node: start });
        while let Some(HeapEntry { cost, node }) = heap.pop() {
            if cost > dist[node as usize] {
                continue;
            }
            for &(next, w) in &self.adjacency[node as usize] {
                let nd = cost + w;
                if nd < dist[next as usize] {
                    dist[next as usize] = nd;
                    heap.push(HeapEntry { cost: nd, node: next });
                }
            }
        }
        dist
    }

    /// Minimal-weight path between two nodes as (cost, node sequence).
    pub fn dijkstra_path(&self, start: u32, goal: u32) -> Option<(f64, Vec<u32>)> {
        let n = self.positions.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut prev = vec![u32::MAX; n];
        let mut heap = BinaryHeap::new();
        dist[start as usize] = 0.0;
        heap.push(HeapEntry { cost: 0.0, node: start });
        while let Some(HeapEntry { cost, node }) = heap.pop() {
            if node == goal {
                break;
            }
            if cost > dist[node as usize] {
                continue;
            }
            for &(next, w) in &self.adjacency[node as usize] {
                let nd = cost + w;
                if nd < dist[next as usize] {
                    dist[next as usize] = nd;
                    prev[next as usize] = node;
                    heap.push(HeapEntry { cost: nd, node: next });
                }
            }
        }
        if dist[goal as usize].is_infinite() {
            return None;
        }
        let mut nodes = vec![goal];
        let mut cur = goal;
        while cur != start {
            cur = prev[cur as usize];
            nodes.push(cur);
        }
        nodes.reverse();
        Some((dist[goal as usize], nodes))
    }
}

/// Shortest path between two graph nodes as a waypoint polyline.
///
/// A disconnected pair is an [`crate::Error::Unreachable`] error; callers
/// fall back per their own policy. `start == goal` yields a single-waypoint,
/// zero-length path.
pub fn shortest_path(graph: &PointGraph, start: u32, goal: u32) -> crate::Result<PathPolyline> {
    let n = graph.node_count() as u32;
    if start >= n || goal >= n {
        return Err(crate::Error::InvalidParameter(
            "start/goal node outside the graph".into(),
        ));
    }
    if start == goal {
        return Ok(PathPolyline::from_points([graph.position(start)]));
    }
    let (_, nodes) = graph.dijkstra_path(start, goal).ok_or(crate::Error::Unreachable)?;
    Ok(PathPolyline::from_points(
        nodes.into_iter().map(|i| graph.position(i)),
    ))
}

/// Min-heap entry; ties broken by node index for determinism.
#[derive(Debug, Copy, Clone, PartialEq)]
struct HeapEntry {
    cost: f64,
    node: u32,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .partial_cmp(&self.cost)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
