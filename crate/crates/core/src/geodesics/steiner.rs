//! Geodesic upper bounds by Dijkstra on a Steiner-augmented graph: each mesh
//! edge gains `m` evenly spaced subdivision nodes, and nodes sharing a face
//! are joined by straight segments through that face.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::DVector;

use crate::error::{GeodesyError, Result};
use crate::geometry::Polyline;
use crate::mesh::TriMesh;

use super::{require_manifold, Back, GeodesicSolution};

/// Path backtracking state for a Steiner solve.
#[derive(Debug)]
pub(crate) struct SteinerBack {
    m: usize,
    parents: Vec<u32>,
}

const NONE32: u32 = u32::MAX;

/// Node layout: mesh vertices are `0..n`; the `j`-th Steiner point of the
/// `e`-th edge (edges in `edge_incidence` order) is `n + e*m + j`, placed at
/// fraction `(j + 1) / (m + 1)` from the edge's smaller-indexed endpoint.
struct Nodes {
    n: usize,
    m: usize,
    edges: Vec<(usize, usize)>,
    positions: Vec<DVector<f64>>,
}

impl Nodes {
    fn new(mesh: &TriMesh, m: usize) -> Nodes {
        let cloud = mesh.vertices();
        let n = mesh.vertex_count();
        let edges: Vec<(usize, usize)> = mesh.edge_incidence().keys().copied().collect();
        let mut positions: Vec<DVector<f64>> = (0..n).map(|v| cloud.point_vec(v)).collect();
        for &(u, v) in &edges {
            let a = cloud.point_vec(u);
            let b = cloud.point_vec(v);
            for j in 0..m {
                let t = (j + 1) as f64 / (m + 1) as f64;
                positions.push(&a + t * (&b - &a));
            }
        }
        Nodes {
            n,
            m,
            edges,
            positions,
        }
    }

    fn count(&self) -> usize {
        self.positions.len()
    }

    /// All node ids on edge `e`, endpoint-to-endpoint.
    fn along_edge(&self, e: usize) -> Vec<usize> {
        let (u, v) = self.edges[e];
        let mut ids = Vec::with_capacity(self.m + 2);
        ids.push(u);
        for j in 0..self.m {
            ids.push(self.n + e * self.m + j);
        }
        ids.push(v);
        ids
    }
}

#[derive(Clone, Copy, PartialEq)]
struct QEntry {
    key: f64,
    idx: u32,
}

impl Eq for QEntry {}

impl Ord for QEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .total_cmp(&self.key)
            .then_with(|| other.idx.cmp(&self.idx))
    }
}

impl PartialOrd for QEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn build_graph(mesh: &TriMesh, nodes: &Nodes) -> Vec<Vec<(u32, f64)>> {
    let mut adj: Vec<Vec<(u32, f64)>> = vec![Vec::new(); nodes.count()];
    let mut link = |a: usize, b: usize| {
        let l = (&nodes.positions[a] - &nodes.positions[b]).norm();
        adj[a].push((b as u32, l));
        adj[b].push((a as u32, l));
    };
    // Consecutive nodes along each edge (the nodes are collinear, so chains
    // lose nothing over all-pairs links within an edge).
    let mut edge_index = std::collections::BTreeMap::new();
    for (e, &key) in nodes.edges.iter().enumerate() {
        edge_index.insert(key, e);
        let ids = nodes.along_edge(e);
        for w in ids.windows(2) {
            link(w[0], w[1]);
        }
    }
    // Straight segments through each face: every corner to the Steiner nodes
    // of the opposite side, and all pairs of Steiner nodes on distinct sides.
    for tri in mesh.faces() {
        let steiners = |a: usize, b: usize| -> Vec<usize> {
            let key = if a < b { (a, b) } else { (b, a) };
            let e = edge_index[&key];
            (0..nodes.m).map(|j| nodes.n + e * nodes.m + j).collect()
        };
        let s01 = steiners(tri[0], tri[1]);
        let s12 = steiners(tri[1], tri[2]);
        let s20 = steiners(tri[2], tri[0]);
        for &s in &s12 {
            link(tri[0], s);
        }
        for &s in &s20 {
            link(tri[1], s);
        }
        for &s in &s01 {
            link(tri[2], s);
        }
        for &a in &s01 {
            for &b in &s12 {
                link(a, b);
            }
            for &b in &s20 {
                link(a, b);
            }
        }
        for &a in &s12 {
            for &b in &s20 {
                link(a, b);
            }
        }
    }
    adj
}

/// Geodesic distance upper bounds from `source` by shortest paths on the
/// Steiner graph with `m` subdivision points per edge (`m = 0` is plain
/// edge-graph Dijkstra).
pub fn steiner_geodesics(mesh: &TriMesh, source: usize, m: usize) -> Result<GeodesicSolution> {
    let n = mesh.vertex_count();
    if source >= n {
        return Err(GeodesyError::invalid(format!(
            "source index {source} out of range for {n} vertices"
        )));
    }
    require_manifold(mesh)?;
    let nodes = Nodes::new(mesh, m);
    let adj = build_graph(mesh, &nodes);
    let mut dist = vec![f64::INFINITY; nodes.count()];
    let mut parents = vec![NONE32; nodes.count()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(QEntry {
        key: 0.0,
        idx: source as u32,
    });
    while let Some(QEntry { key, idx }) = heap.pop() {
        let v = idx as usize;
        if key > dist[v] {
            continue;
        }
        for &(u, l) in &adj[v] {
            let cand = key + l;
            if cand < dist[u as usize] {
                dist[u as usize] = cand;
                parents[u as usize] = idx;
                heap.push(QEntry { key: cand, idx: u });
            }
        }
    }
    dist.truncate(n);
    Ok(GeodesicSolution {
        source,
        distances: dist,
        back: Some(Back::Steiner(SteinerBack { m, parents })),
    })
}

impl SteinerBack {
    pub(crate) fn path(&self, mesh: &TriMesh, source: usize, target: usize) -> Result<Polyline> {
        let nodes = Nodes::new(mesh, self.m);
        let mut rev = vec![nodes.positions[target].clone()];
        let mut cur = target;
        while cur != source {
            let p = self.parents[cur];
            if p == NONE32 {
                return Err(GeodesyError::NoPath {
                    from: source,
                    to: target,
                });
            }
            cur = p as usize;
            rev.push(nodes.positions[cur].clone());
        }
        rev.reverse();
        rev.dedup_by(|a, b| a == b);
        if rev.len() == 1 {
            let p = rev[0].clone();
            rev.push(p);
        }
        Polyline::new(rev)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloud::PointCloud;
    use crate::geodesics::exact_geodesics;

    fn mesh_from(pts: &[[f64; 3]], faces: Vec<[usize; 3]>) -> TriMesh {
        let v: Vec<Vec<f64>> = pts.iter().map(|p| p.to_vec()).collect();
        TriMesh::new(PointCloud::from_points(&v, 2).unwrap(), faces).unwrap()
    }

    fn cube() -> TriMesh {
        mesh_from(
            &[
                [0.0, 0.0, 0.0],
                [1.0, 0.0, 0.0],
                [1.0, 1.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.0, 0.0, 1.0],
                [1.0, 0.0, 1.0],
                [1.0, 1.0, 1.0],
                [0.0, 1.0, 1.0],
            ],
            vec![
                [0, 3, 2],
                [0, 2, 1],
                [4, 5, 6],
                [4, 6, 7],
                [0, 1, 5],
                [0, 5, 4],
                [1, 2, 6],
                [1, 6, 5],
                [2, 3, 7],
                [2, 7, 6],
                [3, 0, 4],
                [3, 4, 7],
            ],
        )
    }

    #[test]
    fn zero_subdivisions_is_edge_dijkstra() {
        let mesh = cube();
        let sol = steiner_geodesics(&mesh, 0, 0).unwrap();
        // Hand-checked edge-graph distances on the triangulated cube.
        assert_eq!(sol.distances[0], 0.0);
        assert!((sol.distances[1] - 1.0).abs() < 1e-12);
        assert!((sol.distances[2] - 2.0f64.sqrt()).abs() < 1e-12);
        // Opposite corner: a unit edge plus a face diagonal; two unit edges
        // cannot reach it because the corners share no unit-edge neighbor.
        assert!((sol.distances[6] - (1.0 + 2.0f64.sqrt())).abs() < 1e-12);
        assert!((sol.distances[7] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn refinement_tightens_toward_the_exact_distance() {
        let mesh = cube();
        let exact = exact_geodesics(&mesh, 0).unwrap().distances[6];
        let mut prev = f64::INFINITY;
        for &m in &[0usize, 4, 16, 64] {
            let d = steiner_geodesics(&mesh, 0, m).unwrap().distances[6];
            assert!(d <= prev + 1e-9, "m={m}: {d} > {prev}");
            assert!(d >= exact - 1e-9, "m={m}: {d} < exact {exact}");
            prev = d;
        }
        assert!((prev - exact) / exact < 0.01, "m=64 gap too large: {prev}");
    }

    #[test]
    fn flat_pair_converges_to_the_chord() {
        let mesh = mesh_from(
            &[
                [0.0, 0.0, 0.0],
                [1.0, 0.0, 0.0],
                [0.5, 1.0, 0.0],
                [0.5, -1.0, 0.0],
            ],
            vec![[0, 1, 2], [1, 0, 3]],
        );
        let d = steiner_geodesics(&mesh, 2, 64).unwrap().distances[3];
        assert!(d >= 2.0 - 1e-12);
        assert!((d - 2.0) / 2.0 < 0.01, "{d}");
    }

    #[test]
    fn paths_are_realizable_and_match_reported_lengths() {
        let mesh = cube();
        let sol = steiner_geodesics(&mesh, 0, 8).unwrap();
        for target in [2usize, 6, 7] {
            let path = sol.path(&mesh, target).unwrap();
            assert!(
                (path.length() - sol.distances[target]).abs() < 1e-9,
                "target {target}"
            );
        }
    }
}
