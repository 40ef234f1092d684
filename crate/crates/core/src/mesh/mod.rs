//! Surface reconstruction by the tangential Delaunay complex: per-vertex
//! Delaunay stars computed in estimated tangent charts, glued into a triangle
//! mesh, with inconsistency detection and jitter-based repair.

mod delaunay;
mod validate;

pub use validate::{validate_mesh, MeshReport};
pub(crate) use validate::point_triangle_distance;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::{BufRead, Write as _};

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{GeodesyError, Result};
use crate::geometry::{simplex_thickness, Simplex, Thickness};
use crate::tangents::TangentField;
use crate::PointCloud;

use delaunay::{chart_star, ChartStar};

/// A triangle mesh in R³ interpolating its sample points.
#[derive(Debug, Clone)]
pub struct TriMesh {
    vertices: PointCloud,
    faces: Vec<[usize; 3]>,
    thicknesses: Vec<Thickness>,
    edge_incidence: BTreeMap<(usize, usize), Vec<usize>>,
    twins: Vec<Option<usize>>,
    orientable: bool,
}

impl TriMesh {
    /// Builds a mesh from vertices and faces, orienting faces coherently
    /// where the complex allows it.
    pub fn new(vertices: PointCloud, faces: Vec<[usize; 3]>) -> Result<Self> {
        if vertices.dim() != 3 {
            return Err(GeodesyError::invalid("triangle meshes live in R³"));
        }
        let n = vertices.len();
        let mut seen = BTreeSet::new();
        for f in &faces {
            if f[0] >= n || f[1] >= n || f[2] >= n {
                return Err(GeodesyError::invalid(format!(
                    "face ({}, {}, {}) references a vertex outside 0..{n}",
                    f[0], f[1], f[2]
                )));
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(GeodesyError::invalid(format!(
                    "face ({}, {}, {}) repeats a vertex",
                    f[0], f[1], f[2]
                )));
            }
            let mut key = *f;
            key.sort_unstable();
            if !seen.insert(key) {
                return Err(GeodesyError::invalid(format!(
                    "duplicate face ({}, {}, {})",
                    f[0], f[1], f[2]
                )));
            }
        }

        let (faces, orientable) = orient_coherently(faces);

        let mut edge_incidence: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (fi, f) in faces.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                edge_incidence.entry(key).or_default().push(fi);
            }
        }

        // Twin halfedges: halfedge 3f+k runs faces[f][k] → faces[f][(k+1)%3].
        let mut directed: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (fi, f) in faces.iter().enumerate() {
            for k in 0..3 {
                directed
                    .entry((f[k], f[(k + 1) % 3]))
                    .or_default()
                    .push(3 * fi + k);
            }
        }
        let mut twins = vec![None; 3 * faces.len()];
        for (&(a, b), hes) in &directed {
            if hes.len() != 1 {
                continue;
            }
            if let Some(opp) = directed.get(&(b, a)) {
                if opp.len() == 1 {
                    twins[hes[0]] = Some(opp[0]);
                }
            }
        }

        let thicknesses = faces
            .iter()
            .map(|f| {
                let s = Simplex::new(vec![
                    vertices.point_vec(f[0]),
                    vertices.point_vec(f[1]),
                    vertices.point_vec(f[2]),
                ])
                .expect("validated face");
                simplex_thickness(&s)
            })
            .collect();

        Ok(TriMesh {
            vertices,
            faces,
            thicknesses,
            edge_incidence,
            twins,
            orientable,
        })
    }

    /// The vertex cloud (a copy of the sample points).
    pub fn vertices(&self) -> &PointCloud {
        &self.vertices
    }

    /// All faces as vertex index triples, coherently oriented per component
    /// where possible.
    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    /// Number of faces.
    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Number of stored vertices (including any not used by faces).
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Cached thickness of face `f`.
    pub fn thickness(&self, f: usize) -> Thickness {
        self.thicknesses[f]
    }

    /// Smallest face thickness, if any faces exist.
    pub fn min_thickness(&self) -> Option<f64> {
        self.thicknesses
            .iter()
            .map(|t| t.value)
            .reduce(f64::min)
    }

    /// Undirected edge → incident face indices.
    pub fn edge_incidence(&self) -> &BTreeMap<(usize, usize), Vec<usize>> {
        &self.edge_incidence
    }

    /// Number of distinct undirected edges.
    pub fn edge_count(&self) -> usize {
        self.edge_incidence.len()
    }

    /// True when coherent orientation succeeded across all manifold edges.
    pub fn is_orientable(&self) -> bool {
        self.orientable
    }

    /// Opposite halfedge of `he`, when the edge is manifold and coherently
    /// oriented. Halfedge `3f+k` runs `faces[f][k] → faces[f][(k+1)%3]`.
    pub fn twin(&self, he: usize) -> Option<usize> {
        self.twins[he]
    }

    /// Next halfedge around the face of `he`.
    pub fn next_halfedge(&self, he: usize) -> usize {
        he - he % 3 + (he % 3 + 1) % 3
    }

    /// Source vertex of halfedge `he`.
    pub fn he_origin(&self, he: usize) -> usize {
        self.faces[he / 3][he % 3]
    }

    /// Target vertex of halfedge `he`.
    pub fn he_dest(&self, he: usize) -> usize {
        self.faces[he / 3][(he % 3 + 1) % 3]
    }

    /// Vertices actually used by faces.
    pub fn used_vertex_count(&self) -> usize {
        let mut used = HashSet::new();
        for f in &self.faces {
            used.extend(f.iter().copied());
        }
        used.len()
    }

    /// Euler characteristic V − E + F over the used part of the complex.
    pub fn euler_characteristic(&self) -> i64 {
        self.used_vertex_count() as i64 - self.edge_count() as i64 + self.face_count() as i64
    }

    /// Writes the mesh in OFF format with 17-significant-digit coordinates
    /// (bit-exact on read-back).
    pub fn write_off(&self, path: &std::path::Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "OFF")?;
        writeln!(out, "{} {} 0", self.vertices.len(), self.faces.len())?;
        for i in 0..self.vertices.len() {
            let p = self.vertices.point(i);
            writeln!(out, "{:.16e} {:.16e} {:.16e}", p[0], p[1], p[2])?;
        }
        for f in &self.faces {
            writeln!(out, "3 {} {} {}", f[0], f[1], f[2])?;
        }
        Ok(())
    }

    /// Reads a mesh written by [`TriMesh::write_off`].
    pub fn read_off(path: &std::path::Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let mut lines = std::io::BufReader::new(file).lines();
        let mut next_line = || -> Result<String> {
            loop {
                match lines.next() {
                    Some(l) => {
                        let l = l?;
                        let t = l.trim().to_string();
                        if !t.is_empty() && !t.starts_with('#') {
                            return Ok(t);
                        }
                    }
                    None => return Err(GeodesyError::Parse("truncated OFF file".into())),
                }
            }
        };
        let header = next_line()?;
        if header != "OFF" {
            return Err(GeodesyError::Parse(format!("expected OFF header, got {header:?}")));
        }
        let counts = next_line()?;
        let mut it = counts.split_whitespace();
        let nv: usize = parse(it.next(), "vertex count")?;
        let nf: usize = parse(it.next(), "face count")?;
        let mut pts = Vec::with_capacity(nv);
        for _ in 0..nv {
            let line = next_line()?;
            let c: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|e| GeodesyError::Parse(e.to_string())))
                .collect::<Result<_>>()?;
            if c.len() != 3 {
                return Err(GeodesyError::Parse("vertex line must have 3 coordinates".into()));
            }
            pts.push(c);
        }
        let mut faces = Vec::with_capacity(nf);
        for _ in 0..nf {
            let line = next_line()?;
            let mut it = line.split_whitespace();
            let arity: usize = parse(it.next(), "face arity")?;
            if arity != 3 {
                return Err(GeodesyError::Parse("only triangle faces are supported".into()));
            }
            let a = parse(it.next(), "face index")?;
            let b = parse(it.next(), "face index")?;
            let c = parse(it.next(), "face index")?;
            faces.push([a, b, c]);
        }
        TriMesh::new(PointCloud::from_points(&pts, 2)?, faces)
    }
}

fn parse<T: std::str::FromStr>(tok: Option<&str>, what: &str) -> Result<T> {
    tok.ok_or_else(|| GeodesyError::Parse(format!("missing {what}")))?
        .parse()
        .map_err(|_| GeodesyError::Parse(format!("invalid {what}")))
}

/// Flips faces along a breadth-first sweep so neighbors traverse shared
/// edges oppositely; reports whether that succeeded everywhere.
fn orient_coherently(mut faces: Vec<[usize; 3]>) -> (Vec<[usize; 3]>, bool) {
    let nf = faces.len();
    let mut by_edge: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (fi, f) in faces.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            by_edge.entry((a.min(b), a.max(b))).or_default().push(fi);
        }
    }
    let mut oriented = vec![false; nf];
    let mut ok = true;
    for start in 0..nf {
        if oriented[start] {
            continue;
        }
        faces[start].sort_unstable();
        oriented[start] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(fi) = queue.pop_front() {
            let f = faces[fi];
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                let incident = &by_edge[&(a.min(b), a.max(b))];
                if incident.len() != 2 {
                    continue;
                }
                for &gi in incident {
                    if gi == fi {
                        continue;
                    }
                    let traverses_same = |g: &[usize; 3]| {
                        (0..3).any(|m| g[m] == a && g[(m + 1) % 3] == b)
                    };
                    if !oriented[gi] {
                        if traverses_same(&faces[gi]) {
                            faces[gi].swap(0, 1);
                        }
                        oriented[gi] = true;
                        queue.push_back(gi);
                    } else if traverses_same(&faces[gi]) {
                        ok = false;
                    }
                }
            }
        }
    }
    (faces, ok)
}

/// Why a star may be empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StarStatus {
    /// The star was computed normally.
    Ok,
    /// Fewer than k+1 points (center included) in the neighborhood.
    TooFewNeighbors,
    /// The chart projection is collinear: no 2-dimensional star exists.
    DegenerateChart,
}

/// One vertex's Delaunay star in its tangent chart.
#[derive(Debug, Clone)]
pub struct Star {
    /// Sorted vertex triples, each containing the generating vertex.
    pub simplices: Vec<[usize; 3]>,
    /// Outcome flag for empty or degenerate charts.
    pub status: StarStatus,
}

impl Star {
    fn empty(status: StarStatus) -> Self {
        Star {
            simplices: Vec::new(),
            status,
        }
    }

    /// Membership test (simplices are kept sorted).
    pub fn contains(&self, simplex: &[usize; 3]) -> bool {
        self.simplices.binary_search(simplex).is_ok()
    }
}

/// All per-vertex stars of a cloud.
#[derive(Debug, Clone)]
pub struct StarComplex {
    /// One star per vertex, aligned with cloud indices.
    pub stars: Vec<Star>,
}

impl StarComplex {
    /// The union of all stars as a sorted set of simplices.
    pub fn union(&self) -> BTreeSet<[usize; 3]> {
        let mut set = BTreeSet::new();
        for s in &self.stars {
            set.extend(s.simplices.iter().copied());
        }
        set
    }
}

/// Simplices missing from some member vertex's star, with repair statistics.
#[derive(Debug, Clone)]
pub struct InconsistencyReport {
    /// Residual inconsistent simplices and the vertices whose stars omit them.
    pub inconsistent: Vec<([usize; 3], Vec<usize>)>,
    /// Inconsistent-simplex count before any repair round.
    pub count_before: usize,
    /// Count in the state the mesh was built from.
    pub count_after: usize,
    /// Repair rounds actually executed.
    pub rounds_used: usize,
}

/// Parameters of the tangential-Delaunay-complex construction.
#[derive(Debug, Clone, Copy)]
pub struct TdcParams {
    /// Chart radius: neighbors within this distance enter each star.
    pub neighbor_radius: f64,
    /// Squared ambient edge-length cap; longer simplices are discarded.
    pub max_sq_edge: f64,
    /// Maximum jitter magnitude used by the repair rounds.
    pub perturb_radius: f64,
    /// Repair-round budget.
    pub time_limit_rounds: usize,
    /// Seed of the repair jitter stream.
    pub seed: u64,
}

impl TdcParams {
    /// Defaults scaled to an interpoint distance `eps` and cloud `diameter`:
    /// chart radius 6ε, edge cap (6ε)², jitter 1% of the diameter, 50 rounds.
    pub fn for_scale(eps: f64, diameter: f64) -> Result<Self> {
        if !(eps > 0.0) || !eps.is_finite() || !(diameter > 0.0) || !diameter.is_finite() {
            return Err(GeodesyError::invalid("scale parameters must be positive"));
        }
        Ok(TdcParams {
            neighbor_radius: 6.0 * eps,
            max_sq_edge: 36.0 * eps * eps,
            perturb_radius: 0.01 * diameter,
            time_limit_rounds: 50,
            seed: 0x7dc,
        })
    }
}

/// Minimum ratio of projected to ambient length for a chart candidate. Pairs
/// whose connecting segment leans more than ~37° out of either endpoint's
/// tangent plane (off-surface shortcuts: tube wraps, winding jumps) are
/// excluded from both charts alike, so the filter never causes one-sided
/// star membership.
const MIN_PROJECTION_RATIO: f64 = 0.8;

/// Chart points around `center` (which becomes local index 0): neighbors
/// within `radius` passing the symmetric distortion filter.
fn chart_points(
    cloud: &PointCloud,
    field: &TangentField,
    center: usize,
    radius: f64,
    jitter: Option<&[DVector<f64>]>,
) -> Result<(Vec<[f64; 2]>, Vec<usize>)> {
    let frame = field.frame(center).ok_or_else(|| {
        GeodesyError::invalid(format!("vertex {center} has no usable tangent frame"))
    })?;
    if frame.dim() != 2 {
        return Err(GeodesyError::invalid(
            "tangential stars are supported for 2-dimensional tangent frames only",
        ));
    }
    let n = cloud.len();
    let d = cloud.dim();
    let xi = cloud.point(center);
    let mut pts = vec![[0.0, 0.0]];
    let mut gids = vec![center];
    let zero = DVector::zeros(d);
    let center_jitter = jitter.map_or_else(|| zero.clone(), |j| j[center].clone());
    for j in 0..n {
        if j == center {
            continue;
        }
        let real = cloud.dist(center, j);
        if real > radius {
            continue;
        }
        let xj = cloud.point(j);
        // The filter runs on the unjittered geometry under both endpoint
        // frames, so the candidate set is symmetric and stable across
        // repair rounds.
        let real_delta = DVector::from_fn(d, |r, _| xj[r] - xi[r]);
        let threshold = MIN_PROJECTION_RATIO * real;
        if (frame.basis.transpose() * &real_delta).norm() < threshold {
            continue;
        }
        match field.frame(j) {
            Some(fj) => {
                if (fj.basis.transpose() * &real_delta).norm() < threshold {
                    continue;
                }
            }
            None => continue,
        }
        let mut delta = real_delta;
        if let Some(jit) = jitter {
            delta += &jit[j] - &center_jitter;
        }
        let proj = frame.basis.transpose() * &delta;
        pts.push([proj[0], proj[1]]);
        gids.push(j);
    }
    Ok((pts, gids))
}

fn star_from_chart(
    cloud: &PointCloud,
    center: usize,
    pts: &[[f64; 2]],
    gids: &[usize],
    max_sq_edge: f64,
) -> Star {
    // The center plus at least k+1 = 3 neighbors.
    if pts.len() < 4 {
        return Star::empty(StarStatus::TooFewNeighbors);
    }
    let fan = match chart_star(pts, gids, 0) {
        ChartStar::Collinear => return Star::empty(StarStatus::DegenerateChart),
        ChartStar::Fan(f) => f,
    };
    let sq = |a: usize, b: usize| -> f64 {
        let pa = cloud.point(a);
        let pb = cloud.point(b);
        pa.iter()
            .zip(pb)
            .map(|(x, y)| (x - y) * (x - y))
            .sum()
    };
    let mut simplices = Vec::with_capacity(fan.len());
    for [a, b] in fan {
        let (ga, gb) = (gids[a], gids[b]);
        if sq(center, ga) > max_sq_edge || sq(center, gb) > max_sq_edge || sq(ga, gb) > max_sq_edge
        {
            continue;
        }
        // Degenerate slivers (collinear sample triples) are chart artifacts,
        // not faces. The test runs on the ambient coordinates, so every chart
        // judges a given triple identically.
        let s = Simplex::new(vec![
            cloud.point_vec(center),
            cloud.point_vec(ga),
            cloud.point_vec(gb),
        ])
        .expect("three vertices");
        if simplex_thickness(&s).degenerate {
            continue;
        }
        let mut tri = [center, ga, gb];
        tri.sort_unstable();
        simplices.push(tri);
    }
    simplices.sort_unstable();
    simplices.dedup();
    Star {
        simplices,
        status: StarStatus::Ok,
    }
}

/// The Delaunay star of vertex `i` in its tangent chart: neighbors within
/// `neighbor_radius` are projected onto the frame, triangulated, and the
/// simplices incident to `i` are lifted back to vertex indices. Simplices
/// with any squared ambient edge length above `max_sq_edge` are discarded.
pub fn tangential_star(
    cloud: &PointCloud,
    field: &TangentField,
    i: usize,
    neighbor_radius: f64,
    max_sq_edge: f64,
) -> Result<Star> {
    if field.len() != cloud.len() {
        return Err(GeodesyError::invalid("tangent field / cloud length mismatch"));
    }
    if i >= cloud.len() {
        return Err(GeodesyError::invalid(format!("vertex {i} out of range")));
    }
    if !(neighbor_radius > 0.0) || !(max_sq_edge > 0.0) {
        return Err(GeodesyError::invalid("star parameters must be positive"));
    }
    let (pts, gids) = chart_points(cloud, field, i, neighbor_radius, None)?;
    Ok(star_from_chart(cloud, i, &pts, &gids, max_sq_edge))
}

fn detect_inconsistencies(stars: &[Star]) -> Vec<([usize; 3], Vec<usize>)> {
    let mut union = BTreeSet::new();
    for s in stars {
        union.extend(s.simplices.iter().copied());
    }
    let mut out = Vec::new();
    for simplex in union {
        let omitting: Vec<usize> = simplex
            .iter()
            .copied()
            .filter(|&v| !stars[v].contains(&simplex))
            .collect();
        if !omitting.is_empty() {
            out.push((simplex, omitting));
        }
    }
    out
}

/// Builds the tangential Delaunay complex: per-vertex stars, inconsistency
/// detection, and up to `time_limit_rounds` of seeded jitter repair. The
/// mesh keeps the original sample coordinates; jitter only influences which
/// simplices the charts select. Residual inconsistent simplices stay in the
/// mesh and are reported.
pub fn build_tdc(
    cloud: &PointCloud,
    field: &TangentField,
    params: &TdcParams,
) -> Result<(TriMesh, InconsistencyReport)> {
    if field.len() != cloud.len() {
        return Err(GeodesyError::invalid("tangent field / cloud length mismatch"));
    }
    if cloud.len() == 0 {
        return Err(GeodesyError::Reconstruction("empty cloud".into()));
    }
    if let Some(&i) = field.unusable_indices().first() {
        return Err(GeodesyError::invalid(format!(
            "vertex {i} has no usable tangent frame; drop unusable vertices first"
        )));
    }
    if !(params.neighbor_radius > 0.0) || !(params.max_sq_edge > 0.0) {
        return Err(GeodesyError::invalid("TDC parameters must be positive"));
    }

    let n = cloud.len();
    let d = cloud.dim();
    // Candidate lists are symmetric and fixed across repair rounds.
    let candidates: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && cloud.dist(i, j) <= params.neighbor_radius)
                .collect()
        })
        .collect();

    let build_star = |i: usize, jitter: Option<&[DVector<f64>]>| -> Result<Star> {
        let (pts, gids) = chart_points(cloud, field, i, params.neighbor_radius, jitter)?;
        Ok(star_from_chart(cloud, i, &pts, &gids, params.max_sq_edge))
    };

    let mut stars: Vec<Star> = (0..n)
        .into_par_iter()
        .map(|i| build_star(i, None))
        .collect::<Result<_>>()?;
    let mut inconsistent = detect_inconsistencies(&stars);
    let count_before = inconsistent.len();

    let mut best_stars = stars.clone();
    let mut best_inconsistent = inconsistent.clone();
    let mut rounds_used = 0;

    if !inconsistent.is_empty() && params.time_limit_rounds > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let mut jitter: Vec<DVector<f64>> = vec![DVector::zeros(d); n];
        // Magnitude schedule: gentle at first, escalating toward the full
        // perturbation radius while no round improves on the best state, with
        // a clean restart when a plateau lasts too long.
        let mut stuck = 0usize;
        for _round in 0..params.time_limit_rounds {
            rounds_used += 1;
            // Every vertex whose jitter changes this round goes into
            // `changed`, so all charts that can see it get rebuilt.
            let mut changed = BTreeSet::new();
            if stuck > 0 && stuck % 20 == 0 {
                for (v, j) in jitter.iter_mut().enumerate() {
                    if j.iter().any(|&c| c != 0.0) {
                        j.fill(0.0);
                        changed.insert(v);
                    }
                }
            }
            let magnitude = params.perturb_radius * (0.25 * 1.3f64.powi(stuck as i32)).min(1.0);
            let mut incident = BTreeSet::new();
            for (simplex, _) in &inconsistent {
                incident.extend(simplex.iter().copied());
            }
            for &v in &incident {
                jitter[v] = loop {
                    let cand = DVector::from_fn(d, |_, _| rng.random_range(-1.0..1.0));
                    if cand.norm() <= 1.0 {
                        break cand * magnitude;
                    }
                };
            }
            changed.extend(incident.iter().copied());
            let mut affected: BTreeSet<usize> = changed.iter().copied().collect();
            for &v in &changed {
                affected.extend(candidates[v].iter().copied());
            }
            let affected: Vec<usize> = affected.into_iter().collect();
            let rebuilt: Vec<(usize, Star)> = affected
                .par_iter()
                .map(|&i| build_star(i, Some(&jitter)).map(|s| (i, s)))
                .collect::<Result<_>>()?;
            for (i, s) in rebuilt {
                stars[i] = s;
            }
            inconsistent = detect_inconsistencies(&stars);
            if inconsistent.len() < best_inconsistent.len() {
                best_inconsistent = inconsistent.clone();
                best_stars = stars.clone();
                stuck = 0;
            } else {
                stuck += 1;
            }
            if inconsistent.is_empty() {
                break;
            }
        }
    }

    let complex = StarComplex { stars: best_stars };
    let faces: Vec<[usize; 3]> = complex.union().into_iter().collect();
    if faces.is_empty() {
        let flagged = complex
            .stars
            .iter()
            .filter(|s| s.status != StarStatus::Ok)
            .count();
        return Err(GeodesyError::Reconstruction(format!(
            "all {n} stars are empty ({flagged} flagged degenerate or underpopulated)"
        )));
    }
    let report = InconsistencyReport {
        count_before,
        count_after: best_inconsistent.len(),
        inconsistent: best_inconsistent,
        rounds_used,
    };
    let mesh = TriMesh::new(cloud.clone(), faces)?;
    Ok((mesh, report))
}
