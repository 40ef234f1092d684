//! Geodesic distances and shortest paths on triangle meshes: an exact
//! window-propagation solver, a Steiner-subdivision Dijkstra oracle that
//! upper-bounds it, and a pair-grouped distance-matrix driver.

mod exact;
mod steiner;

pub use exact::{exact_geodesics, exact_geodesics_with};
pub use steiner::steiner_geodesics;

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{GeodesyError, Result};
use crate::geometry::Polyline;
use crate::mesh::TriMesh;

/// Shortest-path distances from one source vertex, with optional path
/// backtracking state.
#[derive(Debug)]
pub struct GeodesicSolution {
    pub source: usize,
    /// Per-vertex distance; `+∞` for vertices the source cannot reach.
    pub distances: Vec<f64>,
    pub(crate) back: Option<Back>,
}

#[derive(Debug)]
pub(crate) enum Back {
    Exact(exact::ExactBack),
    Steiner(steiner::SteinerBack),
}

impl GeodesicSolution {
    /// Reconstruct the shortest path to `target` as a polyline on the mesh.
    /// `mesh` must be the mesh this solution was computed on.
    pub fn path(&self, mesh: &TriMesh, target: usize) -> Result<Polyline> {
        if target >= self.distances.len() {
            return Err(GeodesyError::invalid(format!(
                "target index {target} out of range for {} vertices",
                self.distances.len()
            )));
        }
        if !self.distances[target].is_finite() {
            return Err(GeodesyError::NoPath {
                from: self.source,
                to: target,
            });
        }
        match &self.back {
            None => Err(GeodesyError::invalid(
                "solution was computed distance-only; paths unavailable",
            )),
            Some(Back::Exact(b)) => b.path(mesh, self.source, target),
            Some(Back::Steiner(b)) => b.path(mesh, self.source, target),
        }
    }
}

/// Refuse meshes the propagation solvers cannot run on: edges in three or
/// more faces, or faces that could not be oriented coherently (in which
/// case crossings between the two sides of an edge are ambiguous).
pub(crate) fn require_manifold(mesh: &TriMesh) -> Result<()> {
    for (&(u, v), fs) in mesh.edge_incidence() {
        if fs.len() > 2 {
            return Err(GeodesyError::NonManifold(format!(
                "edge ({u}, {v}) lies in {} faces",
                fs.len()
            )));
        }
    }
    if !mesh.is_orientable() {
        return Err(GeodesyError::NonManifold(
            "faces cannot be oriented coherently".into(),
        ));
    }
    Ok(())
}

/// Exact distances for a list of vertex pairs. Pairs are grouped by source
/// so each source's propagation runs once; sources run in parallel. The
/// result is aligned with `pairs`.
pub fn mesh_distance_matrix(mesh: &TriMesh, pairs: &[(usize, usize)]) -> Result<Vec<f64>> {
    let n = mesh.vertex_count();
    for &(i, j) in pairs {
        if i >= n || j >= n {
            return Err(GeodesyError::invalid(format!(
                "pair ({i}, {j}) out of range for {n} vertices"
            )));
        }
    }
    let mut groups: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for (idx, &(i, j)) in pairs.iter().enumerate() {
        groups.entry(i).or_default().push((j, idx));
    }
    let per_source: Result<Vec<Vec<(usize, f64)>>> = groups
        .par_iter()
        .map(|(&src, items)| {
            let targets: Vec<usize> = items.iter().map(|&(j, _)| j).collect();
            let sol = exact_geodesics_with(mesh, src, Some(&targets), false)?;
            Ok(items
                .iter()
                .map(|&(j, idx)| (idx, sol.distances[j]))
                .collect())
        })
        .collect();
    let mut out = vec![f64::INFINITY; pairs.len()];
    for chunk in per_source? {
        for (idx, d) in chunk {
            out[idx] = d;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_tdc, TdcParams};
    use crate::nets::estimate_eps;
    use crate::surfaces::{sample, SampleMode, SurfaceSpec};
    use crate::tangents::estimate_tangents;
    use crate::cloud::PointCloud;

    fn sphere_mesh(n: usize, seed: u64) -> TriMesh {
        let spec = SurfaceSpec::sphere(1.0).unwrap();
        let cloud = sample(&spec, n, seed, SampleMode::AreaUniform).unwrap();
        let eps = estimate_eps(&cloud).unwrap();
        let field = estimate_tangents(&cloud, 2, 1.5 * eps).unwrap();
        let params = TdcParams::for_scale(eps, cloud.diameter()).unwrap();
        let (mesh, report) = build_tdc(&cloud, &field, &params).unwrap();
        assert_eq!(report.count_after, 0, "test mesh must be consistent");
        mesh
    }

    /// Structured torus grid (major 2, minor 1): deterministic, coherently
    /// oriented, with genuine negative curvature along the inner ring.
    fn structured_torus(nu: usize, nv: usize) -> TriMesh {
        let (big, small) = (2.0f64, 1.0f64);
        let tau = 2.0 * std::f64::consts::PI;
        let mut pts = Vec::with_capacity(nu * nv);
        for i in 0..nu {
            let u = tau * i as f64 / nu as f64;
            for j in 0..nv {
                let v = tau * j as f64 / nv as f64;
                let w = big + small * v.cos();
                pts.push(vec![w * u.cos(), w * u.sin(), small * v.sin()]);
            }
        }
        let at = |i: usize, j: usize| (i % nu) * nv + (j % nv);
        let mut faces = Vec::new();
        for i in 0..nu {
            for j in 0..nv {
                faces.push([at(i, j), at(i + 1, j), at(i + 1, j + 1)]);
                faces.push([at(i, j), at(i + 1, j + 1), at(i, j + 1)]);
            }
        }
        TriMesh::new(PointCloud::from_points(&pts, 2).unwrap(), faces).unwrap()
    }

    #[test]
    fn matrix_entries_are_grouped_symmetric_and_zero_on_diagonal() {
        let mesh = sphere_mesh(300, 3);
        let pairs = [(0usize, 0usize), (0, 7), (7, 0), (3, 11), (11, 3), (5, 5)];
        let d = mesh_distance_matrix(&mesh, &pairs).unwrap();
        assert_eq!(d[0], 0.0);
        assert_eq!(d[5], 0.0);
        assert!((d[1] - d[2]).abs() < 1e-9, "{} vs {}", d[1], d[2]);
        assert!((d[3] - d[4]).abs() < 1e-9);
        // Grouped runs agree with a plain full propagation.
        let sol = exact_geodesics(&mesh, 0).unwrap();
        assert!((d[1] - sol.distances[7]).abs() < 1e-12);
    }

    #[test]
    fn non_manifold_and_unindexed_inputs_are_refused() {
        // Three triangles sharing one edge.
        let pts = vec![
            vec![0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.5, 1.0, 0.0],
            vec![0.5, -1.0, 0.0],
            vec![0.5, 0.0, 1.0],
        ];
        let cloud = PointCloud::from_points(&pts, 2).unwrap();
        let mesh = TriMesh::new(cloud, vec![[0, 1, 2], [1, 0, 3], [0, 1, 4]]).unwrap();
        match exact_geodesics(&mesh, 0) {
            Err(GeodesyError::NonManifold(msg)) => assert!(msg.contains("3 faces"), "{msg}"),
            other => panic!("expected non-manifold refusal, got {other:?}"),
        }
        assert!(matches!(
            steiner_geodesics(&mesh, 0, 2),
            Err(GeodesyError::NonManifold(_))
        ));
        let ok = sphere_mesh(250, 9);
        assert!(exact_geodesics(&ok, ok.vertex_count()).is_err());
        assert!(mesh_distance_matrix(&ok, &[(0, ok.vertex_count())]).is_err());
    }

    #[test]
    fn exact_is_bounded_by_steiner_and_satisfies_triangle_inequality() {
        let mesh = sphere_mesh(400, 2);
        let n = mesh.vertex_count();
        let sources: Vec<usize> = (0..12).map(|k| k * (n / 12)).collect();
        let sols: Vec<_> = sources
            .iter()
            .map(|&s| exact_geodesics(&mesh, s).unwrap())
            .collect();
        // Steiner upper bounds at two subdivision levels.
        for (k, &s) in sources.iter().enumerate().take(3) {
            let st0 = steiner_geodesics(&mesh, s, 0).unwrap();
            let st4 = steiner_geodesics(&mesh, s, 4).unwrap();
            for v in 0..n {
                assert!(sols[k].distances[v] <= st4.distances[v] + 1e-9);
                assert!(st4.distances[v] <= st0.distances[v] + 1e-9);
            }
        }
        // Triangle inequality over all triples of the 12 sources.
        let idx: std::collections::HashMap<usize, usize> =
            sources.iter().enumerate().map(|(k, &s)| (s, k)).collect();
        for &a in &sources {
            for &b in &sources {
                for &c in &sources {
                    let ab = sols[idx[&a]].distances[b];
                    let bc = sols[idx[&b]].distances[c];
                    let ac = sols[idx[&a]].distances[c];
                    assert!(ac <= ab + bc + 1e-8, "{ac} > {ab} + {bc}");
                }
            }
        }
    }

    #[test]
    fn paths_realize_reported_distances_on_curved_meshes() {
        let mesh = structured_torus(24, 12);
        let n = mesh.vertex_count();
        let sol = exact_geodesics(&mesh, 0).unwrap();
        let faces = mesh.faces();
        let cloud = mesh.vertices();
        for t in [n / 7, n / 3, n / 2, 2 * n / 3, n - 1] {
            let path = sol.path(&mesh, t).unwrap();
            let len = path.length();
            assert!(
                (len - sol.distances[t]).abs() < 1e-9,
                "path length {len} vs distance {} for target {t}",
                sol.distances[t]
            );
            // Every segment stays on the mesh: its midpoint lies in some face.
            for w in path.vertices.windows(2) {
                let mid = (&w[0] + &w[1]) * 0.5;
                let on = faces.iter().any(|f| {
                    let tri: Vec<Vec<f64>> =
                        f.iter().map(|&v| cloud.point(v).to_vec()).collect();
                    crate::mesh::point_triangle_distance(mid.as_slice(), &tri[0], &tri[1], &tri[2])
                        < 1e-9
                });
                assert!(on, "segment midpoint off the mesh for target {t}");
            }
        }
    }

    #[test]
    fn rigid_motions_leave_distances_unchanged() {
        let mesh = sphere_mesh(250, 9);
        let n = mesh.vertex_count();
        // Rotate about an axis and translate.
        let (s, c) = (0.6f64, 0.8f64);
        let moved: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let p = mesh.vertices().point(i);
                vec![
                    c * p[0] - s * p[2] + 10.0,
                    p[1] - 3.0,
                    s * p[0] + c * p[2] + 0.5,
                ]
            })
            .collect();
        let cloud = PointCloud::from_points(&moved, 2).unwrap();
        let mesh2 = TriMesh::new(cloud, mesh.faces().to_vec()).unwrap();
        let a = exact_geodesics(&mesh, 17).unwrap();
        let b = exact_geodesics(&mesh2, 17).unwrap();
        for v in 0..n {
            assert!(
                (a.distances[v] - b.distances[v]).abs() < 1e-9,
                "vertex {v}: {} vs {}",
                a.distances[v],
                b.distances[v]
            );
        }
    }
}
