//! Topological and geometric validation of triangle meshes, including
//! two-sided Hausdorff estimates against an analytic surface.

use std::collections::{BTreeSet, HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{GeodesyError, Result};
use crate::surfaces::{sample, surface_distance, SampleMode, SurfaceSpec};

use super::TriMesh;

/// Number of probe points per Hausdorff direction.
const HAUSDORFF_PROBES: usize = 10_000;

/// Quality, topology, and fidelity summary of a mesh.
#[derive(Debug, Clone)]
pub struct MeshReport {
    /// Number of faces.
    pub face_count: usize,
    /// Number of distinct undirected edges.
    pub edge_count: usize,
    /// Number of vertices used by at least one face.
    pub used_vertex_count: usize,
    /// Smallest face thickness.
    pub min_thickness: f64,
    /// Faces flagged as thickness-degenerate.
    pub degenerate_faces: usize,
    /// Longest face edge.
    pub max_face_diameter: f64,
    /// Edges with exactly one incident face.
    pub boundary_edges: usize,
    /// Edges with three or more incident faces.
    pub non_manifold_edges: usize,
    /// Used vertices whose incident faces do not form one edge-connected fan.
    pub vertex_link_failures: usize,
    /// Edge-connected components of the face complex.
    pub connected_components: usize,
    /// Whether coherent orientation succeeded.
    pub orientable: bool,
    /// V − E + F over the used complex.
    pub euler_characteristic: i64,
    /// No boundary, no non-manifold edges, no link failures.
    pub is_closed_manifold: bool,
    /// Sampled max distance from the mesh to the surface, when a surface was given.
    pub hausdorff_mesh_to_surface: Option<f64>,
    /// Sampled max distance from the surface to the mesh, when a surface was given.
    pub hausdorff_surface_to_mesh: Option<f64>,
}

impl MeshReport {
    /// One-line digest for error messages and logs.
    pub fn summary(&self) -> String {
        let mut s = format!(
            "faces={} edges={} vertices={} components={} euler={} boundary_edges={} \
             non_manifold_edges={} link_failures={} orientable={} min_thickness={:.3e} \
             degenerate_faces={}",
            self.face_count,
            self.edge_count,
            self.used_vertex_count,
            self.connected_components,
            self.euler_characteristic,
            self.boundary_edges,
            self.non_manifold_edges,
            self.vertex_link_failures,
            self.orientable,
            self.min_thickness,
            self.degenerate_faces,
        );
        if let (Some(ms), Some(sm)) = (self.hausdorff_mesh_to_surface, self.hausdorff_surface_to_mesh) {
            s.push_str(&format!(" hausdorff=({ms:.3e}, {sm:.3e})"));
        }
        s
    }
}

/// Validates a mesh: manifoldness, orientation, face quality, topology, and —
/// when `surface` is given — a two-sided sampled Hausdorff distance.
pub fn validate_mesh(mesh: &TriMesh, surface: Option<&SurfaceSpec>) -> Result<MeshReport> {
    if mesh.face_count() == 0 {
        return Err(GeodesyError::invalid("cannot validate an empty mesh"));
    }

    let mut boundary_edges = 0;
    let mut non_manifold_edges = 0;
    for faces in mesh.edge_incidence().values() {
        match faces.len() {
            1 => boundary_edges += 1,
            2 => {}
            _ => non_manifold_edges += 1,
        }
    }

    let mut max_face_diameter = 0.0f64;
    for &(a, b) in mesh.edge_incidence().keys() {
        max_face_diameter = max_face_diameter.max(mesh.vertices().dist(a, b));
    }

    let mut degenerate_faces = 0;
    let mut min_thickness = f64::INFINITY;
    for f in 0..mesh.face_count() {
        let t = mesh.thickness(f);
        if t.degenerate {
            degenerate_faces += 1;
        }
        min_thickness = min_thickness.min(t.value);
    }

    let vertex_link_failures = count_link_failures(mesh);
    let connected_components = count_components(mesh);
    let is_closed_manifold =
        boundary_edges == 0 && non_manifold_edges == 0 && vertex_link_failures == 0;

    let (h_ms, h_sm) = match surface {
        Some(spec) => {
            let (a, b) = hausdorff_both(mesh, spec)?;
            (Some(a), Some(b))
        }
        None => (None, None),
    };

    Ok(MeshReport {
        face_count: mesh.face_count(),
        edge_count: mesh.edge_count(),
        used_vertex_count: mesh.used_vertex_count(),
        min_thickness,
        degenerate_faces,
        max_face_diameter,
        boundary_edges,
        non_manifold_edges,
        vertex_link_failures,
        connected_components,
        orientable: mesh.is_orientable(),
        euler_characteristic: mesh.euler_characteristic(),
        is_closed_manifold,
        hausdorff_mesh_to_surface: h_ms,
        hausdorff_surface_to_mesh: h_sm,
    })
}

/// Counts used vertices whose incident faces fail to form a single component
/// under adjacency through edges containing the vertex.
fn count_link_failures(mesh: &TriMesh) -> usize {
    let mut incident: HashMap<usize, Vec<usize>> = HashMap::new();
    for (fi, f) in mesh.faces().iter().enumerate() {
        for &v in f {
            incident.entry(v).or_default().push(fi);
        }
    }
    let mut failures = 0;
    for (&v, faces) in &incident {
        if faces.len() <= 1 {
            continue;
        }
        // Adjacency through shared edges (v, x).
        let mut by_edge: HashMap<usize, Vec<usize>> = HashMap::new();
        for &fi in faces {
            for &x in &mesh.faces()[fi] {
                if x != v {
                    by_edge.entry(x).or_default().push(fi);
                }
            }
        }
        let mut seen = BTreeSet::from([faces[0]]);
        let mut queue = VecDeque::from([faces[0]]);
        while let Some(fi) = queue.pop_front() {
            for &x in &mesh.faces()[fi] {
                if x == v {
                    continue;
                }
                for &gi in &by_edge[&x] {
                    if seen.insert(gi) {
                        queue.push_back(gi);
                    }
                }
            }
        }
        if seen.len() != faces.len() {
            failures += 1;
        }
    }
    failures
}

/// Counts edge-connected components of the face complex.
fn count_components(mesh: &TriMesh) -> usize {
    let nf = mesh.face_count();
    let mut seen = vec![false; nf];
    let mut components = 0;
    for start in 0..nf {
        if seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(fi) = queue.pop_front() {
            let f = mesh.faces()[fi];
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                for &gi in &mesh.edge_incidence()[&(a.min(b), a.max(b))] {
                    if !seen[gi] {
                        seen[gi] = true;
                        queue.push_back(gi);
                    }
                }
            }
        }
    }
    components
}

fn sub(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

/// Distance from `p` to segment `ab`.
fn point_segment_distance(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ab = sub(b, a);
    let ap = sub(p, a);
    let denom = dot(ab, ab);
    let t = if denom > 0.0 {
        (dot(ap, ab) / denom).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let q = [a[0] + t * ab[0], a[1] + t * ab[1], a[2] + t * ab[2]];
    norm(sub(p, &q))
}

/// Distance from `p` to triangle `abc` by Voronoi-region classification.
pub(crate) fn point_triangle_distance(p: &[f64], a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    let ab = sub(b, a);
    let ac = sub(c, a);
    let ap = sub(p, a);
    let d1 = dot(ab, ap);
    let d2 = dot(ac, ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return norm(ap);
    }
    let bp = sub(p, b);
    let d3 = dot(ab, bp);
    let d4 = dot(ac, bp);
    if d3 >= 0.0 && d4 <= d3 {
        return norm(bp);
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let t = d1 / (d1 - d3);
        let q = [a[0] + t * ab[0], a[1] + t * ab[1], a[2] + t * ab[2]];
        return norm(sub(p, &q));
    }
    let cp = sub(p, c);
    let d5 = dot(ab, cp);
    let d6 = dot(ac, cp);
    if d6 >= 0.0 && d5 <= d6 {
        return norm(cp);
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let t = d2 / (d2 - d6);
        let q = [a[0] + t * ac[0], a[1] + t * ac[1], a[2] + t * ac[2]];
        return norm(sub(p, &q));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && d4 - d3 >= 0.0 && d5 - d6 >= 0.0 {
        let t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        let bc = sub(c, b);
        let q = [b[0] + t * bc[0], b[1] + t * bc[1], b[2] + t * bc[2]];
        return norm(sub(p, &q));
    }
    let denom = va + vb + vc;
    if denom <= 0.0 || !denom.is_finite() {
        // Degenerate triangle: fall back to the nearest edge.
        return point_segment_distance(p, a, b)
            .min(point_segment_distance(p, a, c))
            .min(point_segment_distance(p, b, c));
    }
    let v = vb / denom;
    let w = vc / denom;
    let q = [
        a[0] + v * ab[0] + w * ac[0],
        a[1] + v * ab[1] + w * ac[1],
        a[2] + v * ab[2] + w * ac[2],
    ];
    norm(sub(p, &q))
}

/// Sampled Hausdorff distances (mesh → surface, surface → mesh).
fn hausdorff_both(mesh: &TriMesh, spec: &SurfaceSpec) -> Result<(f64, f64)> {
    if spec.ambient_dim() != 3 {
        return Err(GeodesyError::invalid(
            "Hausdorff validation requires a surface embedded in R³",
        ));
    }

    // Mesh → surface: area-weighted random points on faces.
    let verts = mesh.vertices();
    let mut cumulative = Vec::with_capacity(mesh.face_count());
    let mut total = 0.0;
    for f in mesh.faces() {
        let a = verts.point(f[0]);
        let b = verts.point(f[1]);
        let c = verts.point(f[2]);
        total += 0.5 * norm(cross(sub(b, a), sub(c, a)));
        cumulative.push(total);
    }
    if !(total > 0.0) {
        return Err(GeodesyError::invalid("mesh has zero total area"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x9a0d);
    let probes: Vec<[f64; 3]> = (0..HAUSDORFF_PROBES)
        .map(|_| {
            let r = rng.random_range(0.0..total);
            let fi = cumulative.partition_point(|&s| s <= r).min(mesh.face_count() - 1);
            let f = mesh.faces()[fi];
            let a = verts.point(f[0]);
            let b = verts.point(f[1]);
            let c = verts.point(f[2]);
            let s = rng.random_range(0.0f64..1.0).sqrt();
            let t = rng.random_range(0.0f64..1.0);
            let (wa, wb, wc) = (1.0 - s, s * (1.0 - t), s * t);
            [
                wa * a[0] + wb * b[0] + wc * c[0],
                wa * a[1] + wb * b[1] + wc * c[1],
                wa * a[2] + wb * b[2] + wc * c[2],
            ]
        })
        .collect();
    let mesh_to_surface = probes
        .par_iter()
        .map(|p| surface_distance(spec, p))
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;

    // Surface → mesh: area-uniform surface samples against all faces, with a
    // centroid-ball skip and nearest-vertex warm start.
    let surf = sample(spec, HAUSDORFF_PROBES, 0x5a17, SampleMode::AreaUniform)?;
    let mut centroids = Vec::with_capacity(mesh.face_count());
    let mut radii = Vec::with_capacity(mesh.face_count());
    for f in mesh.faces() {
        let a = verts.point(f[0]);
        let b = verts.point(f[1]);
        let c = verts.point(f[2]);
        let centroid = [
            (a[0] + b[0] + c[0]) / 3.0,
            (a[1] + b[1] + c[1]) / 3.0,
            (a[2] + b[2] + c[2]) / 3.0,
        ];
        let r = norm(sub(a, &centroid))
            .max(norm(sub(b, &centroid)))
            .max(norm(sub(c, &centroid)));
        centroids.push(centroid);
        radii.push(r);
    }
    let surface_to_mesh = (0..surf.len())
        .into_par_iter()
        .map(|pi| {
            let p = surf.point(pi);
            let mut best = (0..verts.len())
                .map(|v| norm(sub(p, verts.point(v))))
                .fold(f64::INFINITY, f64::min);
            for fi in 0..mesh.face_count() {
                if norm(sub(p, &centroids[fi])) - radii[fi] >= best {
                    continue;
                }
                let f = mesh.faces()[fi];
                let d = point_triangle_distance(
                    p,
                    verts.point(f[0]),
                    verts.point(f[1]),
                    verts.point(f[2]),
                );
                best = best.min(d);
            }
            best
        })
        .reduce(|| 0.0, f64::max);

    Ok((mesh_to_surface, surface_to_mesh))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nets::estimate_eps;
    use crate::tangents::estimate_tangents;
    use crate::PointCloud;

    #[test]
    fn point_triangle_distance_covers_all_regions() {
        let a = [0.0, 0.0, 0.0];
        let b = [2.0, 0.0, 0.0];
        let c = [0.0, 2.0, 0.0];
        // Interior projection.
        assert!((point_triangle_distance(&[0.5, 0.5, 3.0], &a, &b, &c) - 3.0).abs() < 1e-12);
        // Vertex regions.
        assert!((point_triangle_distance(&[-1.0, -1.0, 0.0], &a, &b, &c) - 2.0f64.sqrt()).abs() < 1e-12);
        assert!((point_triangle_distance(&[3.0, -1.0, 0.0], &a, &b, &c) - 2.0f64.sqrt()).abs() < 1e-12);
        assert!((point_triangle_distance(&[-1.0, 3.0, 0.0], &a, &b, &c) - 2.0f64.sqrt()).abs() < 1e-12);
        // Edge regions.
        assert!((point_triangle_distance(&[1.0, -2.0, 0.0], &a, &b, &c) - 2.0).abs() < 1e-12);
        assert!((point_triangle_distance(&[-2.0, 1.0, 0.0], &a, &b, &c) - 2.0).abs() < 1e-12);
        assert!((point_triangle_distance(&[2.0, 2.0, 0.0], &a, &b, &c) - 2.0f64.sqrt()).abs() < 1e-12);
        // On the triangle.
        assert_eq!(point_triangle_distance(&[0.5, 0.5, 0.0], &a, &b, &c), 0.0);
        // Degenerate triangle falls back to segment distance.
        let d = point_triangle_distance(&[0.0, 1.0, 0.0], &a, &b, &[1.0, 0.0, 0.0]);
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_triangle_report() {
        let pts = vec![
            vec![0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.5, 3.0f64.sqrt() / 2.0, 0.0],
        ];
        let cloud = PointCloud::from_points(&pts, 2).unwrap();
        let mesh = TriMesh::new(cloud, vec![[0, 1, 2]]).unwrap();
        let report = validate_mesh(&mesh, None).unwrap();
        assert_eq!(report.face_count, 1);
        assert_eq!(report.edge_count, 3);
        assert_eq!(report.boundary_edges, 3);
        assert_eq!(report.non_manifold_edges, 0);
        assert_eq!(report.vertex_link_failures, 0);
        assert_eq!(report.connected_components, 1);
        assert_eq!(report.euler_characteristic, 1);
        assert!(!report.is_closed_manifold);
        assert!((report.min_thickness - 3.0f64.sqrt() / 2.0).abs() < 1e-12);
        assert_eq!(report.degenerate_faces, 0);
        assert!((report.max_face_diameter - 1.0).abs() < 1e-12);
        assert!(report.summary().contains("faces=1"));
    }

    #[test]
    fn bowtie_vertex_fails_link_test() {
        // Two triangles sharing only the middle vertex.
        let pts = vec![
            vec![-1.0, -1.0, 0.0],
            vec![-1.0, 1.0, 0.0],
            vec![0.0, 0.0, 0.0],
            vec![1.0, -1.0, 0.0],
            vec![1.0, 1.0, 0.0],
        ];
        let cloud = PointCloud::from_points(&pts, 2).unwrap();
        let mesh = TriMesh::new(cloud, vec![[0, 1, 2], [2, 3, 4]]).unwrap();
        let report = validate_mesh(&mesh, None).unwrap();
        assert_eq!(report.vertex_link_failures, 1);
        assert_eq!(report.connected_components, 2);
        assert!(!report.is_closed_manifold);
    }

    #[test]
    fn non_manifold_edge_is_counted() {
        let pts = vec![
            vec![0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.5, 1.0, 0.0],
            vec![0.5, -1.0, 0.5],
            vec![0.5, 0.0, 1.0],
        ];
        let cloud = PointCloud::from_points(&pts, 2).unwrap();
        let mesh = TriMesh::new(cloud, vec![[0, 1, 2], [0, 1, 3], [0, 1, 4]]).unwrap();
        let report = validate_mesh(&mesh, None).unwrap();
        assert_eq!(report.non_manifold_edges, 1);
        assert!(!report.is_closed_manifold);
    }

    #[test]
    fn sphere_mesh_hausdorff_is_small() {
        let spec = SurfaceSpec::sphere(1.0).unwrap();
        let cloud = crate::surfaces::sample(&spec, 600, 11, crate::surfaces::SampleMode::AreaUniform).unwrap();
        let eps = estimate_eps(&cloud).unwrap();
        let field = estimate_tangents(&cloud, 2, 2.0 * eps).unwrap();
        let params = super::super::TdcParams::for_scale(eps, 2.0).unwrap();
        let (mesh, _) = super::super::build_tdc(&cloud, &field, &params).unwrap();
        let report = validate_mesh(&mesh, Some(&spec)).unwrap();
        let ms = report.hausdorff_mesh_to_surface.unwrap();
        let sm = report.hausdorff_surface_to_mesh.unwrap();
        // Interpolating mesh on a unit sphere: both sides well under the
        // sampling scale, and the mesh (inside the ball) stays within the
        // chordal sagitta of the surface.
        assert!(ms > 0.0 && ms < 0.5 * eps, "mesh→surface {ms} vs eps {eps}");
        assert!(sm > 0.0 && sm < 0.5 * eps, "surface→mesh {sm} vs eps {eps}");
    }

    #[test]
    fn empty_mesh_is_rejected() {
        let pts = vec![vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
        let cloud = PointCloud::from_points(&pts, 2).unwrap();
        let mesh = TriMesh::new(cloud, vec![]).unwrap();
        assert!(validate_mesh(&mesh, None).is_err());
    }
}
