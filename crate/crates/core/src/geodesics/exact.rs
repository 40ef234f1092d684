//! Exact polyhedral geodesics by continuous-Dijkstra window propagation,
//! with pseudo-source expansion at saddle and boundary vertices and lazy
//! interval trimming against already-accepted windows.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::DVector;

use crate::error::{GeodesyError, Result};
use crate::geometry::Polyline;
use crate::mesh::TriMesh;

use super::{require_manifold, Back, GeodesicSolution};

/// Slack comparator for settled distances; prevents update ping-pong.
const SLACK: f64 = 1e-10;
/// Windows narrower than this fraction of their edge are dropped.
const WIDTH_FRAC: f64 = 1e-12;
/// Pointwise tolerance when testing window domination.
const DOM_TOL: f64 = 1e-12;
/// Vertices whose incident face angles sum to at least `2π − SADDLE_EPS`
/// spawn pseudo-sources (flat or saddle vertices can carry bent geodesics).
const SADDLE_EPS: f64 = 1e-9;
const NONE32: u32 = u32::MAX;

/// A window on a halfedge: the interval `[b0, b1]` of the edge (arclength
/// from the halfedge origin) lit by the unfolded source image `(sx, sy)`,
/// `sy ≤ 0`, at accumulated pseudo-source offset `sigma`. The convention is
/// that the halfedge's own face lies at `y > 0` and receives the light.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Window {
    he: u32,
    b0: f64,
    b1: f64,
    sx: f64,
    sy: f64,
    sigma: f64,
    root: u32,
    pred: u32,
}

impl Window {
    fn eval(&self, t: f64) -> f64 {
        self.sigma + (t - self.sx).hypot(self.sy)
    }

    /// Smallest distance the window can deliver anywhere on its interval.
    fn key(&self) -> f64 {
        self.eval(self.sx.clamp(self.b0, self.b1))
    }
}

/// Where on its window a vertex was hit, for path backtracking.
#[derive(Debug, Clone, Copy)]
enum Hit {
    /// The apex (third vertex) of the window's face.
    Apex,
    /// The origin endpoint of the window's halfedge.
    End0,
    /// The destination endpoint of the window's halfedge.
    End1,
}

/// Provenance of a vertex's current best distance.
#[derive(Debug, Clone, Copy)]
enum Arrival {
    Unset,
    Source,
    Edge { parent: u32 },
    Win { widx: u32, hit: Hit },
}

/// Min-heap entry ordered by key (ties broken by insertion index).
#[derive(Debug, Clone, Copy, PartialEq)]
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

/// Per-halfedge unfolding frame: edge from `(0,0)` to `(len,0)`, the face's
/// third vertex (apex) at `y > 0`. Everything is intrinsic — computed from
/// edge lengths only — so rigid motions of the mesh change nothing.
pub(crate) struct Frames {
    len: Vec<f64>,
    apex: Vec<[f64; 2]>,
}

impl Frames {
    pub(crate) fn new(mesh: &TriMesh) -> Result<Frames> {
        let cloud = mesh.vertices();
        let nf = mesh.face_count();
        let mut len = vec![0.0; 3 * nf];
        let mut apex = vec![[0.0; 2]; 3 * nf];
        for (f, tri) in mesh.faces().iter().enumerate() {
            for k in 0..3 {
                let p = tri[k];
                let q = tri[(k + 1) % 3];
                let r = tri[(k + 2) % 3];
                let l = cloud.dist(p, q);
                if l <= 0.0 {
                    return Err(GeodesyError::invalid(format!(
                        "mesh has a zero-length edge ({p}, {q})"
                    )));
                }
                let a = cloud.dist(p, r);
                let b = cloud.dist(q, r);
                let rx = (a * a - b * b + l * l) / (2.0 * l);
                let ry = (a * a - rx * rx).max(0.0).sqrt();
                len[3 * f + k] = l;
                apex[3 * f + k] = [rx, ry];
            }
        }
        Ok(Frames { len, apex })
    }
}

/// The sub-interval of the exit segment `E0→E1` (in the window's frame)
/// lit through `[b0, b1]` from image `S`, as arclength on the exit edge.
fn lit_interval(
    sx: f64,
    sy: f64,
    b0: f64,
    b1: f64,
    e0: [f64; 2],
    e1: [f64; 2],
    le: f64,
) -> Option<(f64, f64)> {
    if sy >= -1e-300 {
        // Image on the edge line: the cone through [b0, b1] degenerates to
        // the full upper half-plane anchored at sx.
        return if sx >= b0 - 1e-12 && sx <= b1 + 1e-12 {
            Some((0.0, le))
        } else {
            None
        };
    }
    // Crossing abscissa on y = 0 of the segment from S to a point above the
    // line; the denominator stays negative because exit points have y ≥ 0.
    let x_at = |x: f64, y: f64| sx + (x - sx) * sy / (sy - y);
    let x0 = x_at(e0[0], e0[1]);
    let x1 = x_at(e1[0], e1[1]);
    let (img_lo, img_hi) = if x0 <= x1 { (x0, x1) } else { (x1, x0) };
    let lo = img_lo.max(b0);
    let hi = img_hi.min(b1);
    if lo > hi {
        return None;
    }
    let ex = e1[0] - e0[0];
    let ey = e1[1] - e0[1];
    // Invert the (monotone, pole-free) crossing map: solve x*(s) = c for the
    // edge parameter s ∈ [0, 1].
    let solve = |c: f64| -> f64 {
        let den = (sx - c) * ey - ex * sy;
        if den.abs() < 1e-300 {
            return if (c - x0).abs() <= (c - x1).abs() { 0.0 } else { le };
        }
        let s = (e0[0] * sy - c * sy + c * e0[1] - sx * e0[1]) / den;
        (s * le).clamp(0.0, le)
    };
    let ta = solve(lo);
    let tb = solve(hi);
    Some(if ta <= tb { (ta, tb) } else { (tb, ta) })
}

/// Minimum of `w.eval(t) − u.eval(t)` over `[lo, hi]`, with its location.
/// The difference has at most two interior critical points, both roots of
/// linear equations, so the minimum over a finite candidate set is exact.
fn min_diff(w: &Window, u: &Window, lo: f64, hi: f64) -> (f64, f64) {
    let g = |t: f64| w.eval(t) - u.eval(t);
    let a = u.sy.abs();
    let b = w.sy.abs();
    let mut cands = [lo, hi, w.sx, u.sx, f64::NAN, f64::NAN];
    if (a - b).abs() > 1e-300 {
        cands[4] = (w.sx * a - u.sx * b) / (a - b);
    }
    if a + b > 1e-300 {
        cands[5] = (w.sx * a + u.sx * b) / (a + b);
    }
    let mut best = (lo, g(lo));
    for &t in &cands {
        if t.is_finite() && t >= lo && t <= hi {
            let v = g(t);
            if v < best.1 {
                best = (t, v);
            }
        }
    }
    best
}

/// Root of `w.eval − u.eval` inside `[a, b]`, given a sign change.
fn bisect_crossing(w: &Window, u: &Window, mut a: f64, mut b: f64) -> f64 {
    let g = |t: f64| w.eval(t) - u.eval(t);
    let ga = g(a);
    for _ in 0..60 {
        let mid = 0.5 * (a + b);
        if (g(mid) > 0.0) == (ga > 0.0) {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Path backtracking state retained by a full (non-distance-only) solve.
#[derive(Debug)]
pub(crate) struct ExactBack {
    arena: Vec<Window>,
    arrivals: Vec<Arrival>,
}

impl ExactBack {
    pub(crate) fn path(&self, mesh: &TriMesh, source: usize, target: usize) -> Result<Polyline> {
        let cloud = mesh.vertices();
        let frames = Frames::new(mesh)?;
        let mut rev: Vec<DVector<f64>> = vec![cloud.point_vec(target)];
        let mut cur = target;
        let mut guard = 0usize;
        while cur != source {
            guard += 1;
            if guard > 10 * (self.arrivals.len() + self.arena.len() + 16) {
                return Err(GeodesyError::invalid(
                    "path backtracking did not terminate",
                ));
            }
            match self.arrivals[cur] {
                Arrival::Unset | Arrival::Source => {
                    return Err(GeodesyError::NoPath {
                        from: source,
                        to: target,
                    });
                }
                Arrival::Edge { parent } => {
                    rev.push(cloud.point_vec(parent as usize));
                    cur = parent as usize;
                }
                Arrival::Win { widx, hit } => {
                    let root = self.unroll(mesh, &frames, widx, hit, &mut rev);
                    rev.push(cloud.point_vec(root));
                    cur = root;
                }
            }
        }
        rev.reverse();
        rev.dedup_by(|a, b| a == b);
        if rev.len() == 1 {
            let p = rev[0].clone();
            rev.push(p);
        }
        Polyline::new(rev)
    }

    /// Walk a window's predecessor chain, pushing the 3D edge-crossing points
    /// (from target backwards); returns the chain's root vertex.
    fn unroll(
        &self,
        mesh: &TriMesh,
        frames: &Frames,
        widx: u32,
        hit: Hit,
        rev: &mut Vec<DVector<f64>>,
    ) -> usize {
        let cloud = mesh.vertices();
        let mut w = &self.arena[widx as usize];
        let (mut tx, mut ty) = match hit {
            Hit::Apex => {
                let [rx, ry] = frames.apex[w.he as usize];
                (rx, ry)
            }
            Hit::End0 => (0.0, 0.0),
            Hit::End1 => (frames.len[w.he as usize], 0.0),
        };
        loop {
            let he = w.he as usize;
            let l = frames.len[he];
            let x = if ty > 0.0 {
                w.sx + (tx - w.sx) * w.sy / (w.sy - ty)
            } else {
                tx
            };
            let x = if x.is_finite() { x.clamp(w.b0, w.b1) } else { w.b0 };
            let a = cloud.point_vec(mesh.he_origin(he));
            let b = cloud.point_vec(mesh.he_dest(he));
            rev.push(&a + (x / l) * (&b - &a));
            if w.pred == NONE32 {
                return w.root as usize;
            }
            let parent = &self.arena[w.pred as usize];
            // The edge we just crossed, seen from the parent's face.
            let e_exit = mesh.twin(he).expect("window crossed an interior edge");
            let phe = parent.he as usize;
            let lp = frames.len[phe];
            let [rx, ry] = frames.apex[phe];
            let (e0, e1) = if e_exit == mesh.next_halfedge(phe) {
                ([lp, 0.0], [rx, ry])
            } else {
                ([rx, ry], [0.0, 0.0])
            };
            let le = frames.len[e_exit];
            let s = (le - x) / le;
            tx = e0[0] + s * (e1[0] - e0[0]);
            ty = e0[1] + s * (e1[1] - e0[1]);
            w = parent;
        }
    }
}

struct Solver<'m> {
    mesh: &'m TriMesh,
    frames: Frames,
    /// vertex → (neighbor, edge length)
    adj: Vec<Vec<(u32, f64)>>,
    /// vertex → incident faces
    vfaces: Vec<Vec<u32>>,
    /// saddle (angle sum ≥ 2π − ε) or boundary vertices
    eligible: Vec<bool>,
    dist: Vec<f64>,
    arrival: Vec<Arrival>,
    /// smallest pseudo-source offset already spawned per vertex
    spawned: Vec<f64>,
    arena: Vec<Window>,
    /// halfedge → accepted window indices (for domination tests)
    accepted: Vec<Vec<u32>>,
    heap: BinaryHeap<QEntry>,
    track_paths: bool,
}

impl<'m> Solver<'m> {
    fn new(mesh: &'m TriMesh, track_paths: bool) -> Result<Self> {
        let n = mesh.vertex_count();
        let cloud = mesh.vertices();
        let frames = Frames::new(mesh)?;
        let mut adj: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
        let mut boundary = vec![false; n];
        for (&(u, v), fs) in mesh.edge_incidence() {
            let l = cloud.dist(u, v);
            adj[u].push((v as u32, l));
            adj[v].push((u as u32, l));
            if fs.len() == 1 {
                boundary[u] = true;
                boundary[v] = true;
            }
        }
        let mut vfaces: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut angle = vec![0.0f64; n];
        for (f, tri) in mesh.faces().iter().enumerate() {
            for k in 0..3 {
                let v = tri[k];
                vfaces[v].push(f as u32);
                // Corner angle of halfedge 3f+k at its origin: apex frame
                // geometry gives cos = rx / |origin→apex|.
                let he = 3 * f + k;
                let [rx, ry] = frames.apex[he];
                angle[v] += ry.atan2(rx);
            }
        }
        let eligible = (0..n)
            .map(|v| boundary[v] || angle[v] >= 2.0 * std::f64::consts::PI - SADDLE_EPS)
            .collect();
        Ok(Solver {
            mesh,
            frames,
            adj,
            vfaces,
            eligible,
            dist: vec![f64::INFINITY; n],
            arrival: vec![Arrival::Unset; n],
            spawned: vec![f64::INFINITY; n],
            accepted: vec![Vec::new(); 3 * mesh.face_count()],
            arena: Vec::new(),
            heap: BinaryHeap::new(),
            track_paths,
        })
    }

    fn relax(&mut self, v: usize, cand: f64, arr: Arrival) -> bool {
        if cand + SLACK < self.dist[v] {
            self.dist[v] = cand;
            self.arrival[v] = arr;
            true
        } else {
            false
        }
    }

    /// Seed upper bounds (and edge-path provenance) via plain Dijkstra on
    /// the mesh edge graph. Edge paths are feasible surface paths, so every
    /// bound is valid; window propagation can only improve on them.
    fn edge_dijkstra(&mut self, source: usize) {
        let mut heap = BinaryHeap::new();
        heap.push(QEntry {
            key: 0.0,
            idx: source as u32,
        });
        while let Some(QEntry { key, idx }) = heap.pop() {
            let v = idx as usize;
            if key > self.dist[v] {
                continue;
            }
            for i in 0..self.adj[v].len() {
                let (u, l) = self.adj[v][i];
                if self.relax(u as usize, key + l, Arrival::Edge { parent: idx }) {
                    heap.push(QEntry {
                        key: key + l,
                        idx: u,
                    });
                }
            }
        }
    }

    /// Spawn a (pseudo-)source at `v`: one full-edge window across each
    /// incident face, plus edge relaxations to its neighbors.
    fn spawn(&mut self, v: usize, sigma: f64) {
        self.spawned[v] = sigma;
        let fs = self.vfaces[v].clone();
        for f in fs {
            let f = f as usize;
            let tri = self.mesh.faces()[f];
            let c = tri.iter().position(|&x| x == v).expect("incident face");
            let opp = 3 * f + (c + 1) % 3;
            if let Some(tw) = self.mesh.twin(opp) {
                let le = self.frames.len[opp];
                let [rx, ry] = self.frames.apex[opp];
                self.insert(Window {
                    he: tw as u32,
                    b0: 0.0,
                    b1: le,
                    sx: le - rx,
                    sy: -ry,
                    sigma,
                    root: v as u32,
                    pred: NONE32,
                });
            }
        }
        let nbrs = self.adj[v].clone();
        for (u, l) in nbrs {
            let cand = sigma + l;
            self.relax(u as usize, cand, Arrival::Edge { parent: v as u32 });
            self.consider_spawn(u as usize, cand);
        }
    }

    /// Spawn a pseudo-source at an eligible vertex once a window (or edge
    /// chain) delivers its settled distance; re-spawn only on improvement.
    fn consider_spawn(&mut self, v: usize, cand: f64) {
        if self.eligible[v] && cand <= self.dist[v] + SLACK && cand + SLACK < self.spawned[v] {
            self.spawn(v, cand.min(self.dist[v]));
        }
    }

    /// Trim a candidate window against accepted windows on its halfedge and
    /// keep it if any part survives.
    fn insert(&mut self, mut w: Window) {
        let he = w.he as usize;
        if !(w.sx.is_finite() && w.sy.is_finite() && w.sigma.is_finite()) {
            return;
        }
        let le = self.frames.len[he];
        w.b0 = w.b0.clamp(0.0, le);
        w.b1 = w.b1.clamp(0.0, le);
        let wmin = WIDTH_FRAC * le;
        for i in 0..self.accepted[he].len() {
            if !(w.b1 - w.b0 >= wmin) {
                return;
            }
            let u = self.arena[self.accepted[he][i] as usize];
            let lo = w.b0.max(u.b0);
            let hi = w.b1.min(u.b1);
            if lo > hi {
                continue;
            }
            let (tmin, gmin) = min_diff(&w, &u, lo, hi);
            if gmin >= -DOM_TOL {
                // u is at least as good on the whole overlap.
                if u.b0 <= w.b0 && u.b1 >= w.b1 {
                    return; // fully dominated
                } else if u.b0 <= w.b0 {
                    w.b0 = hi;
                } else if u.b1 >= w.b1 {
                    w.b1 = lo;
                }
                // u strictly interior to w: leave w whole.
            } else {
                // Partial domination: shave dominated prefix/suffix.
                let glo = w.eval(lo) - u.eval(lo);
                let ghi = w.eval(hi) - u.eval(hi);
                if u.b0 <= w.b0 && glo > DOM_TOL {
                    w.b0 = bisect_crossing(&w, &u, lo, tmin);
                }
                if u.b1 >= w.b1 && ghi > DOM_TOL {
                    w.b1 = bisect_crossing(&w, &u, tmin, hi);
                }
            }
        }
        if !(w.b1 - w.b0 >= wmin) {
            return;
        }
        let key = w.key();
        let widx = self.arena.len() as u32;
        self.arena.push(w);
        self.accepted[he].push(widx);
        self.heap.push(QEntry { key, idx: widx });
    }

    /// Relax the three vertices of the window's face. Endpoint candidates
    /// walk along the edge from the interval boundary, so they are feasible
    /// for any interval and exact when the interval touches the corner.
    fn settle(&mut self, widx: u32) {
        let w = self.arena[widx as usize];
        let he = w.he as usize;
        let l = self.frames.len[he];
        let [rx, ry] = self.frames.apex[he];
        let p = self.mesh.he_origin(he);
        let q = self.mesh.he_dest(he);
        let r = self.mesh.faces()[he / 3][(he % 3 + 2) % 3];
        let cp = w.eval(w.b0) + w.b0;
        self.relax(
            p,
            cp,
            Arrival::Win {
                widx,
                hit: Hit::End0,
            },
        );
        self.consider_spawn(p, cp);
        let cq = w.eval(w.b1) + (l - w.b1);
        self.relax(
            q,
            cq,
            Arrival::Win {
                widx,
                hit: Hit::End1,
            },
        );
        self.consider_spawn(q, cq);
        let xr = if w.sy >= -1e-300 {
            w.sx
        } else {
            w.sx + (rx - w.sx) * w.sy / (w.sy - ry)
        };
        if xr >= w.b0 && xr <= w.b1 {
            let cr = w.sigma + (rx - w.sx).hypot(ry - w.sy);
            self.relax(
                r,
                cr,
                Arrival::Win {
                    widx,
                    hit: Hit::Apex,
                },
            );
            self.consider_spawn(r, cr);
        }
    }

    /// Continue the window across the two far edges of its face.
    fn propagate(&mut self, widx: u32) {
        let w = self.arena[widx as usize];
        let he = w.he as usize;
        let l = self.frames.len[he];
        let [rx, ry] = self.frames.apex[he];
        let n1 = self.mesh.next_halfedge(he);
        let n2 = self.mesh.next_halfedge(n1);
        self.propagate_exit(widx, n1, [l, 0.0], [rx, ry]);
        self.propagate_exit(widx, n2, [rx, ry], [0.0, 0.0]);
    }

    fn propagate_exit(&mut self, widx: u32, exit_he: usize, e0: [f64; 2], e1: [f64; 2]) {
        let w = self.arena[widx as usize];
        let Some(tw) = self.mesh.twin(exit_he) else {
            return;
        };
        let le = self.frames.len[exit_he];
        let Some((t0, t1)) = lit_interval(w.sx, w.sy, w.b0, w.b1, e0, e1, le) else {
            return;
        };
        // Express the image in the exit halfedge's frame (rotation about e0),
        // then flip onto the twin's frame on the far side of the edge.
        let c = (e1[0] - e0[0]) / le;
        let s = (e1[1] - e0[1]) / le;
        let dx = w.sx - e0[0];
        let dy = w.sy - e0[1];
        let ex_x = c * dx + s * dy;
        let ex_y = -s * dx + c * dy;
        self.insert(Window {
            he: tw as u32,
            b0: le - t1,
            b1: le - t0,
            sx: le - ex_x,
            sy: (-ex_y).min(0.0),
            sigma: w.sigma,
            root: w.root,
            pred: if self.track_paths { widx } else { NONE32 },
        });
    }

    fn needed_max(&self, comp: &[u32], targets: Option<&[usize]>) -> f64 {
        match targets {
            Some(ts) => ts.iter().map(|&t| self.dist[t]).fold(0.0, f64::max),
            None => comp.iter().map(|&v| self.dist[v as usize]).fold(0.0, f64::max),
        }
    }

    fn run(&mut self, source: usize, targets: Option<&[usize]>) {
        self.dist[source] = 0.0;
        self.arrival[source] = Arrival::Source;
        self.edge_dijkstra(source);
        let comp: Vec<u32> = (0..self.dist.len() as u32)
            .filter(|&v| self.dist[v as usize].is_finite())
            .collect();
        self.spawn(source, 0.0);
        let mut needed = self.needed_max(&comp, targets);
        while let Some(QEntry { key, idx }) = self.heap.pop() {
            if key > needed + SLACK {
                needed = self.needed_max(&comp, targets);
                if key > needed + SLACK {
                    break;
                }
            }
            self.settle(idx);
            self.propagate(idx);
        }
    }
}

/// Exact geodesic distances from `source` to every vertex in its component,
/// with path backtracking retained.
pub fn exact_geodesics(mesh: &TriMesh, source: usize) -> Result<GeodesicSolution> {
    exact_geodesics_with(mesh, source, None, true)
}

/// As [`exact_geodesics`], with optional early termination once all
/// `targets` are settled, and a distance-only mode that skips path storage.
pub fn exact_geodesics_with(
    mesh: &TriMesh,
    source: usize,
    targets: Option<&[usize]>,
    with_paths: bool,
) -> Result<GeodesicSolution> {
    let n = mesh.vertex_count();
    if source >= n {
        return Err(GeodesyError::invalid(format!(
            "source index {source} out of range for {n} vertices"
        )));
    }
    if let Some(ts) = targets {
        for &t in ts {
            if t >= n {
                return Err(GeodesyError::invalid(format!(
                    "target index {t} out of range for {n} vertices"
                )));
            }
        }
    }
    require_manifold(mesh)?;
    let mut solver = Solver::new(mesh, with_paths)?;
    solver.run(source, targets);
    let Solver {
        dist,
        arena,
        arrival,
        ..
    } = solver;
    Ok(GeodesicSolution {
        source,
        distances: dist,
        back: with_paths.then_some(Back::Exact(ExactBack {
            arena,
            arrivals: arrival,
        })),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloud::PointCloud;

    fn mesh_from(pts: &[[f64; 3]], faces: Vec<[usize; 3]>) -> TriMesh {
        let v: Vec<Vec<f64>> = pts.iter().map(|p| p.to_vec()).collect();
        TriMesh::new(PointCloud::from_points(&v, 2).unwrap(), faces).unwrap()
    }

    /// Unit cube surface, outward-oriented, two triangles per side.
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
    fn flat_pair_is_the_straight_chord() {
        // Two coplanar triangles sharing an edge; the geodesic between the
        // two apexes is the straight segment through the shared edge.
        let mesh = mesh_from(
            &[
                [0.0, 0.0, 0.0],
                [1.0, 0.0, 0.0],
                [0.5, 1.0, 0.0],
                [0.5, -1.0, 0.0],
            ],
            vec![[0, 1, 2], [1, 0, 3]],
        );
        let sol = exact_geodesics(&mesh, 2).unwrap();
        assert!((sol.distances[3] - 2.0).abs() < 1e-10, "{}", sol.distances[3]);
        assert_eq!(sol.distances[2], 0.0);
        let path = sol.path(&mesh, 3).unwrap();
        assert!((path.length() - 2.0).abs() < 1e-9);
        // The crossing point is the midpoint of the shared edge.
        let mid = &path.vertices[1];
        assert!((mid[0] - 0.5).abs() < 1e-9 && mid[1].abs() < 1e-9);
    }

    #[test]
    fn cube_corner_to_corner_is_sqrt5() {
        // Opposite corners of the unit cube: unfolding two adjacent sides
        // flat gives a 2 × 1 rectangle, so the geodesic is √5.
        let mesh = cube();
        let sol = exact_geodesics(&mesh, 0).unwrap();
        let d = sol.distances[6];
        assert!((d - 5.0f64.sqrt()).abs() < 1e-9, "{d}");
        let path = sol.path(&mesh, 6).unwrap();
        assert!((path.length() - d).abs() < 1e-9);
        // Corner-adjacent vertices are reached along edges.
        assert!((sol.distances[1] - 1.0).abs() < 1e-12);
        assert!((sol.distances[2] - 2.0f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn geodesics_bend_through_cone_apexes() {
        // A fan of ten 45° sectors around one apex (total angle 450° > 2π)
        // embedded as a zig-zag between two latitude bands. Both angular
        // routes from P0 to the far midpoint M exceed 180°, so the geodesic
        // passes through the apex: d = |P0 C| + |C M| = 1 + cos(π/8).
        // The best pure edge path detours through N and is ~0.04 longer, so
        // this fails unless pseudo-sources propagate through the apex.
        let alpha = std::f64::consts::PI / 12.0;
        let quarter = std::f64::consts::FRAC_PI_4;
        let db = ((quarter.cos() + alpha.sin() * alpha.sin())
            / (alpha.cos() * alpha.cos()))
        .acos();
        let ring: Vec<[f64; 3]> = (0..11)
            .map(|i| {
                let a = if i % 2 == 0 { alpha } else { -alpha };
                let b = i as f64 * db;
                [a.cos() * b.cos(), a.cos() * b.sin(), a.sin()]
            })
            .collect();
        let mut pts = vec![[0.0, 0.0, 0.0]];
        pts.extend_from_slice(&ring);
        let p5 = ring[5];
        let p6 = ring[6];
        // Midpoint of the outer edge of sector 5, and an off-median interior
        // point (keeping C, N, M non-collinear so no edge path matches).
        pts.push([
            0.5 * (p5[0] + p6[0]),
            0.5 * (p5[1] + p6[1]),
            0.5 * (p5[2] + p6[2]),
        ]);
        pts.push([
            0.55 * p5[0] + 0.25 * p6[0],
            0.55 * p5[1] + 0.25 * p6[1],
            0.55 * p5[2] + 0.25 * p6[2],
        ]);
        let (c, m, n) = (0usize, 12usize, 13usize);
        let pv = |i: usize| i + 1; // ring vertex index
        let mut faces = Vec::new();
        for i in 0..10 {
            if i == 5 {
                faces.push([c, pv(5), n]);
                faces.push([pv(5), m, n]);
                faces.push([m, pv(6), n]);
                faces.push([c, n, pv(6)]);
            } else {
                faces.push([c, pv(i), pv(i + 1)]);
            }
        }
        let mesh = mesh_from(&pts, faces);
        let sol = exact_geodesics(&mesh, pv(0)).unwrap();
        let want = 1.0 + (std::f64::consts::PI / 8.0).cos();
        let d = sol.distances[m];
        assert!((d - want).abs() < 1e-9, "{d} vs {want}");
        let path = sol.path(&mesh, m).unwrap();
        assert!((path.length() - d).abs() < 1e-9);
        // The path passes through the apex.
        assert!(path.vertices.iter().any(|p| p.norm() < 1e-9));
    }

    #[test]
    fn flat_grid_distances_are_euclidean() {
        // A triangulated square grid is convex and flat, so geodesics are
        // straight lines and distances are plain Euclidean.
        let k = 8usize;
        let mut pts = Vec::new();
        for j in 0..=k {
            for i in 0..=k {
                pts.push([i as f64, j as f64, 0.0]);
            }
        }
        let at = |i: usize, j: usize| j * (k + 1) + i;
        let mut faces = Vec::new();
        for j in 0..k {
            for i in 0..k {
                faces.push([at(i, j), at(i + 1, j), at(i + 1, j + 1)]);
                faces.push([at(i, j), at(i + 1, j + 1), at(i, j + 1)]);
            }
        }
        let mesh = mesh_from(&pts, faces);
        let sol = exact_geodesics(&mesh, at(0, 0)).unwrap();
        for &(i, j) in &[(k, k), (k, 0), (3, 7), (5, 2), (1, 1)] {
            let want = ((i * i + j * j) as f64).sqrt();
            let got = sol.distances[at(i, j)];
            assert!((got - want).abs() < 1e-9, "({i},{j}): {got} vs {want}");
        }
        let path = sol.path(&mesh, at(3, 7)).unwrap();
        assert!((path.length() - sol.distances[at(3, 7)]).abs() < 1e-9);
    }

    #[test]
    fn other_components_stay_infinite() {
        let mesh = mesh_from(
            &[
                [0.0, 0.0, 0.0],
                [1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [5.0, 5.0, 0.0],
                [6.0, 5.0, 0.0],
                [5.0, 6.0, 0.0],
            ],
            vec![[0, 1, 2], [3, 4, 5]],
        );
        let sol = exact_geodesics(&mesh, 0).unwrap();
        assert!(sol.distances[1].is_finite());
        assert!(sol.distances[3].is_infinite());
        assert!(matches!(
            sol.path(&mesh, 4),
            Err(GeodesyError::NoPath { .. })
        ));
    }

    #[test]
    fn distances_dominate_the_ambient_chord() {
        let mesh = cube();
        for s in 0..8 {
            let sol = exact_geodesics(&mesh, s).unwrap();
            for v in 0..8 {
                let chord = mesh.vertices().dist(s, v);
                assert!(sol.distances[v] >= chord - 1e-12);
            }
        }
    }

    #[test]
    fn distance_only_mode_matches_and_refuses_paths() {
        let mesh = cube();
        let full = exact_geodesics(&mesh, 0).unwrap();
        let bare = exact_geodesics_with(&mesh, 0, None, false).unwrap();
        for v in 0..8 {
            assert_eq!(full.distances[v], bare.distances[v]);
        }
        assert!(bare.path(&mesh, 6).is_err());
        // Target pruning returns the same values for the targets.
        let pruned = exact_geodesics_with(&mesh, 0, Some(&[6]), false).unwrap();
        assert!((pruned.distances[6] - full.distances[6]).abs() < 1e-12);
    }
}
