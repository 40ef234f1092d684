//! Neighborhood graphs with Euclidean edge weights and Dijkstra shortest
//! paths: the baseline geodesic-distance estimator.

use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::embedding::DistanceMatrix;
use crate::error::{GeodesyError, Result};
use crate::geometry::Polyline;
use crate::PointCloud;

/// Connected-component decomposition of a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectivityStatus {
    /// Number of connected components.
    pub component_count: usize,
    /// Component sizes, largest first.
    pub component_sizes: Vec<usize>,
    /// Component id per vertex (ids follow first-seen order).
    pub component_of: Vec<usize>,
}

impl ConnectivityStatus {
    /// True when the whole graph is one component.
    pub fn is_connected(&self) -> bool {
        self.component_count <= 1
    }
}

/// Points within radius `r` of each other joined by edges weighted with
/// their exact Euclidean distances.
#[derive(Debug, Clone)]
pub struct NeighborhoodGraph {
    cloud: PointCloud,
    radius: f64,
    adjacency: Vec<Vec<(usize, f64)>>,
    connectivity: ConnectivityStatus,
}

impl NeighborhoodGraph {
    /// Number of vertices.
    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    /// True when the graph has no vertices.
    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    /// The connectivity radius.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// The vertex cloud.
    pub fn cloud(&self) -> &PointCloud {
        &self.cloud
    }

    /// Neighbors of vertex `i` with edge weights, ascending by index.
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[i]
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Component structure, computed at build time.
    pub fn connectivity(&self) -> &ConnectivityStatus {
        &self.connectivity
    }
}

/// Builds the neighborhood graph at radius `r` (edge iff `‖xᵢ−xⱼ‖ ≤ r`).
pub fn build_graph(cloud: &PointCloud, r: f64) -> Result<NeighborhoodGraph> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(GeodesyError::invalid("connectivity radius must be positive"));
    }
    if cloud.len() == 0 {
        return Err(GeodesyError::invalid("cannot build a graph on an empty cloud"));
    }
    let n = cloud.len();
    let mut adjacency = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            let d = cloud.dist(i, j);
            if d <= r {
                adjacency[i].push((j, d));
                adjacency[j].push((i, d));
            }
        }
    }
    let connectivity = components(&adjacency);
    Ok(NeighborhoodGraph {
        cloud: cloud.clone(),
        radius: r,
        adjacency,
        connectivity,
    })
}

fn components(adjacency: &[Vec<(usize, f64)>]) -> ConnectivityStatus {
    let n = adjacency.len();
    let mut component_of = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    for start in 0..n {
        if component_of[start] != usize::MAX {
            continue;
        }
        let id = sizes.len();
        let mut stack = vec![start];
        component_of[start] = id;
        let mut size = 1usize;
        while let Some(v) = stack.pop() {
            for &(w, _) in &adjacency[v] {
                if component_of[w] == usize::MAX {
                    component_of[w] = id;
                    size += 1;
                    stack.push(w);
                }
            }
        }
        sizes.push(size);
    }
    let component_count = sizes.len();
    let mut component_sizes = sizes;
    component_sizes.sort_unstable_by(|a, b| b.cmp(a));
    ConnectivityStatus {
        component_count,
        component_sizes,
        component_of,
    }
}

const NO_PREV: usize = usize::MAX;

/// Single-source Dijkstra with deterministic (distance, index) tie-breaking
/// and smallest-index predecessors. Returns distances and predecessor links.
fn dijkstra(adjacency: &[Vec<(usize, f64)>], source: usize) -> (Vec<f64>, Vec<usize>) {
    #[derive(PartialEq)]
    struct Entry(f64, usize);
    impl Eq for Entry {}
    impl PartialOrd for Entry {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Entry {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            // Reversed (distance, index) order: BinaryHeap is a max-heap.
            other
                .0
                .partial_cmp(&self.0)
                .expect("distances are finite")
                .then_with(|| other.1.cmp(&self.1))
        }
    }

    let n = adjacency.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![NO_PREV; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Entry(0.0, source));
    while let Some(Entry(d, i)) = heap.pop() {
        if settled[i] || d > dist[i] {
            continue;
        }
        settled[i] = true;
        for &(j, w) in &adjacency[i] {
            let nd = d + w;
            if nd < dist[j] {
                dist[j] = nd;
                prev[j] = i;
                heap.push(Entry(nd, j));
            } else if nd == dist[j] && i < prev[j] {
                // Equal-length alternative through a smaller predecessor.
                prev[j] = i;
            }
        }
    }
    (dist, prev)
}

/// Shortest-path distances from each source to every vertex (`+∞` where
/// unreachable). Sources run concurrently.
pub fn graph_distances(g: &NeighborhoodGraph, sources: &[usize]) -> Result<Vec<Vec<f64>>> {
    for &s in sources {
        if s >= g.len() {
            return Err(GeodesyError::invalid(format!(
                "source {s} out of range for a {}-vertex graph",
                g.len()
            )));
        }
    }
    Ok(sources
        .par_iter()
        .map(|&s| dijkstra(&g.adjacency, s).0)
        .collect())
}

/// Complete graph-distance matrix over a subset of vertices, failing with the
/// component structure if any needed pair is unreachable.
pub fn graph_distance_submatrix(
    g: &NeighborhoodGraph,
    indices: &[usize],
) -> Result<DistanceMatrix> {
    let rows = graph_distances(g, indices)?;
    let mut d = DistanceMatrix::new(indices.len());
    for (a, row) in rows.iter().enumerate() {
        for (b, &j) in indices.iter().enumerate().skip(a + 1) {
            let v = row[j];
            if !v.is_finite() {
                let status = g.connectivity();
                return Err(GeodesyError::Disconnected {
                    count: status.component_count,
                    sizes: status.component_sizes.clone(),
                });
            }
            d.set(a, b, v)?;
        }
    }
    Ok(d)
}

/// A shortest path between two vertices as a polyline through the cloud.
///
/// `i == j` yields the degenerate zero-length path that stays at the vertex.
pub fn graph_path(g: &NeighborhoodGraph, i: usize, j: usize) -> Result<Polyline> {
    if i >= g.len() || j >= g.len() {
        return Err(GeodesyError::invalid(format!(
            "vertex out of range: ({i}, {j}) in a {}-vertex graph",
            g.len()
        )));
    }
    if i == j {
        let p = g.cloud.point_vec(i);
        return Polyline::new(vec![p.clone(), p]);
    }
    let (dist, prev) = dijkstra(&g.adjacency, i);
    if !dist[j].is_finite() {
        return Err(GeodesyError::NoPath { from: i, to: j });
    }
    let mut chain = vec![j];
    let mut cur = j;
    while cur != i {
        cur = prev[cur];
        debug_assert_ne!(cur, NO_PREV, "finite distance implies a predecessor chain");
        chain.push(cur);
    }
    chain.reverse();
    Polyline::new(chain.into_iter().map(|v| g.cloud.point_vec(v)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::polyline_length;
    use crate::surfaces::{sample, GroundTruthOracle, SampleMode, SurfaceSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cloud_1d(xs: &[f64]) -> PointCloud {
        let pts: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        PointCloud::from_points(&pts, 1).unwrap()
    }

    fn random_cloud(n: usize, dim: usize, seed: u64) -> PointCloud {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..dim).map(|_| rng.random_range(0.0..1.0)).collect())
            .collect();
        PointCloud::from_points(&pts, dim).unwrap()
    }

    /// Reference all-pairs shortest paths by Bellman–Ford relaxation.
    fn bellman_ford(g: &NeighborhoodGraph, source: usize) -> Vec<f64> {
        let n = g.len();
        let mut dist = vec![f64::INFINITY; n];
        dist[source] = 0.0;
        for _ in 0..n {
            let mut changed = false;
            for i in 0..n {
                if !dist[i].is_finite() {
                    continue;
                }
                for &(j, w) in g.neighbors(i) {
                    let nd = dist[i] + w;
                    if nd < dist[j] {
                        dist[j] = nd;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        dist
    }

    #[test]
    fn collinear_points_chain_up() {
        let cloud = cloud_1d(&[0.0, 1.0, 2.0]);
        let g = build_graph(&cloud, 1.0).unwrap();
        assert_eq!(g.neighbors(0), &[(1, 1.0)]);
        assert_eq!(g.neighbors(1), &[(0, 1.0), (2, 1.0)]);
        assert_eq!(g.edge_count(), 2);
        assert!(g.connectivity().is_connected());

        let d = graph_distances(&g, &[0]).unwrap();
        assert_eq!(d[0][2], 2.0);
        let path = graph_path(&g, 0, 2).unwrap();
        assert_eq!(path.vertices.len(), 3);
        assert!((polyline_length(&path) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn tiny_radius_disconnects_with_status() {
        let cloud = cloud_1d(&[0.0, 1.0, 2.0]);
        let g = build_graph(&cloud, 0.5).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.connectivity().component_count, 3);
        let d = graph_distances(&g, &[0]).unwrap();
        assert!(d[0][1].is_infinite());
        assert!(matches!(
            graph_path(&g, 0, 1),
            Err(GeodesyError::NoPath { from: 0, to: 1 })
        ));
        assert!(matches!(
            graph_distance_submatrix(&g, &[0, 1]),
            Err(GeodesyError::Disconnected { count: 3, .. })
        ));
    }

    #[test]
    fn generous_radius_completes_the_graph() {
        let cloud = random_cloud(20, 3, 1);
        let g = build_graph(&cloud, 10.0).unwrap();
        assert_eq!(g.edge_count(), 20 * 19 / 2);
    }

    #[test]
    fn graph_distance_dominates_euclidean() {
        let cloud = random_cloud(80, 2, 5);
        let g = build_graph(&cloud, 0.25).unwrap();
        let rows = graph_distances(&g, &(0..80).collect::<Vec<_>>()).unwrap();
        for i in 0..80 {
            assert_eq!(rows[i][i], 0.0);
            for j in 0..80 {
                if rows[i][j].is_finite() {
                    assert!(rows[i][j] >= cloud.dist(i, j) - 1e-12);
                }
            }
        }
    }

    #[test]
    fn flat_convex_clouds_upper_bound_the_metric() {
        let cloud = random_cloud(150, 2, 9);
        let g = build_graph(&cloud, 0.3).unwrap();
        assert!(g.connectivity().is_connected());
        let rows = graph_distances(&g, &(0..150).collect::<Vec<_>>()).unwrap();
        for i in 0..150 {
            for j in 0..150 {
                assert!(cloud.dist(i, j) <= rows[i][j] + 1e-12);
            }
        }
    }

    #[test]
    fn dijkstra_agrees_with_bellman_ford_exactly() {
        for seed in 0..8 {
            let n = 30 + (seed as usize % 3) * 10; // up to 50 nodes
            let cloud = random_cloud(n, 2, 100 + seed);
            let radius = 0.15 + 0.05 * (seed % 4) as f64;
            let g = build_graph(&cloud, radius).unwrap();
            for source in [0, n / 2, n - 1] {
                let fast = graph_distances(&g, &[source]).unwrap().remove(0);
                let slow = bellman_ford(&g, source);
                for v in 0..n {
                    assert!(
                        (fast[v] == slow[v]) || (fast[v].is_infinite() && slow[v].is_infinite()),
                        "seed {seed} source {source} vertex {v}: {} vs {}",
                        fast[v],
                        slow[v]
                    );
                }
            }
        }
    }

    #[test]
    fn distances_shrink_as_radius_grows() {
        let cloud = random_cloud(100, 2, 13);
        let small = build_graph(&cloud, 0.2).unwrap();
        let large = build_graph(&cloud, 0.3).unwrap();
        let ds = graph_distances(&small, &(0..100).collect::<Vec<_>>()).unwrap();
        let dl = graph_distances(&large, &(0..100).collect::<Vec<_>>()).unwrap();
        for i in 0..100 {
            for j in 0..100 {
                if ds[i][j].is_finite() {
                    assert!(dl[i][j] <= ds[i][j] + 1e-12);
                }
            }
        }
    }

    #[test]
    fn sphere_graph_distances_sandwich_the_metric() {
        let spec = SurfaceSpec::sphere(1.0).unwrap();
        let cloud = sample(&spec, 800, 31, SampleMode::AreaUniform).unwrap();
        let oracle = GroundTruthOracle::new(spec);
        let r = 0.35;
        let g = build_graph(&cloud, r).unwrap();
        assert!(g.connectivity().is_connected());

        let sources: Vec<usize> = (0..40).map(|i| i * 20).collect();
        let rows = graph_distances(&g, &sources).unwrap();
        let mut checked = 0;
        for (row, &i) in rows.iter().zip(&sources) {
            for j in (0..800).step_by(7) {
                if i == j {
                    continue;
                }
                let dg = row[j];
                let dm = oracle.distance(cloud.point(i), cloud.point(j)).unwrap();
                assert!(
                    0.5 * dg <= dm,
                    "lower sandwich failed: d_G={dg}, d_M={dm}"
                );
                assert!(
                    dm <= (1.0 + r * r) * dg,
                    "upper sandwich failed: d_G={dg}, d_M={dm}"
                );
                checked += 1;
            }
        }
        assert!(checked > 1000);
    }

    #[test]
    fn equal_length_ties_pick_smallest_predecessor() {
        // Unit square: two shortest paths 0→3; the tie resolves through
        // vertex 1, the smaller middle index.
        let pts = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 1.0],
        ];
        let cloud = PointCloud::from_points(&pts, 2).unwrap();
        let g = build_graph(&cloud, 1.0).unwrap();
        let path = graph_path(&g, 0, 3).unwrap();
        assert_eq!(path.vertices.len(), 3);
        assert_eq!(path.vertices[1][0], 1.0);
        assert_eq!(path.vertices[1][1], 0.0);
    }

    #[test]
    fn degenerate_and_invalid_paths() {
        let cloud = cloud_1d(&[0.0, 1.0]);
        let g = build_graph(&cloud, 2.0).unwrap();
        let p = graph_path(&g, 1, 1).unwrap();
        assert_eq!(p.vertices.len(), 2);
        assert_eq!(polyline_length(&p), 0.0);
        assert!(graph_path(&g, 0, 5).is_err());
        assert!(build_graph(&cloud, 0.0).is_err());
        assert!(graph_distances(&g, &[9]).is_err());
    }

    #[test]
    fn submatrix_is_complete_and_symmetric_by_storage() {
        let cloud = random_cloud(60, 2, 21);
        let g = build_graph(&cloud, 0.4).unwrap();
        let idx: Vec<usize> = (0..60).step_by(5).collect();
        let d = graph_distance_submatrix(&g, &idx).unwrap();
        assert!(d.is_complete());
        assert_eq!(d.len(), idx.len());
        for a in 0..idx.len() {
            assert_eq!(d.get(a, a), Some(0.0));
        }
    }
}
