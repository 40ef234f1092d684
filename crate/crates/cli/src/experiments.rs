//! Experiment harness: distance-accuracy sweeps, embedding comparisons, and
//! lower-bound gap tables, each emitted as a deterministic CSV table plus a
//! timing sidecar.

use std::collections::BTreeSet;
use std::path::Path;
use std::time::Instant;

use geodesy::embedding::{
    isomap_landmarks, mesh_isomap_landmarks, procrustes_align, Embedding,
};
use geodesy::error::{GeodesyError, Result};
use geodesy::geodesics::mesh_distance_matrix;
use geodesy::graph::{build_graph, graph_distances};
use geodesy::mesh::{build_tdc, validate_mesh, TdcParams, TriMesh};
use geodesy::nets::{covering_radius, estimate_eps, extract_net};
use geodesy::surfaces::{
    bump_arc_cubic_coefficient, isometric_coords, lower_bound_pair, sample, true_distance,
    GroundTruthOracle, SampleMode,
};
use geodesy::tangents::estimate_tangents;
use geodesy::PointCloud;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::ExperimentConfig;

/// Reconstruction scale factors tried, in order, by the distance experiment.
pub const DISTANCE_SCALE_LADDER: [f64; 5] = [0.9, 1.0, 1.1, 1.2, 1.3];

/// Reconstruction scale factors tried, in order, by the embedding experiment.
pub const ISOMAP_SCALE_LADDER: [f64; 4] = [1.05, 1.2, 1.35, 1.5];

/// Seed of the fixed dense reference sample used to measure covering radii.
const REFERENCE_SEED: u64 = 12345;

/// Size of the dense reference sample.
const REFERENCE_SIZE: usize = 20_000;

/// An in-memory CSV table with a fixed header.
#[derive(Debug, Clone)]
pub struct Table {
    /// Column names.
    pub header: Vec<String>,
    /// Rows; every row has exactly `header.len()` fields.
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Index of a named column.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Writes the table as CSV (RFC-4180 quoting where needed).
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)
            .map_err(|e| GeodesyError::Parse(format!("cannot write {}: {e}", path.display())))?;
        w.write_record(&self.header)
            .and_then(|_| self.rows.iter().try_for_each(|r| w.write_record(r)))
            .and_then(|_| w.flush().map_err(csv::Error::from))
            .map_err(|e| GeodesyError::Parse(format!("cannot write {}: {e}", path.display())))
    }

    /// Reads a table back from CSV.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path)
            .map_err(|e| GeodesyError::Parse(format!("cannot read {}: {e}", path.display())))?;
        let header = r
            .headers()
            .map_err(|e| GeodesyError::Parse(format!("bad header in {}: {e}", path.display())))?
            .iter()
            .map(|s| s.to_string())
            .collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec
                .map_err(|e| GeodesyError::Parse(format!("bad row in {}: {e}", path.display())))?;
            rows.push(rec.iter().map(|s| s.to_string()).collect());
        }
        Ok(Self { header, rows })
    }
}

/// Derives an independent stream seed from the master seed and two labels.
pub fn mix_seed(seed: u64, a: u64, b: u64) -> u64 {
    let mut z = seed ^ a.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ b.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Draws `count` distinct unordered index pairs from `0..m`.
pub fn sample_pairs(m: usize, count: usize, seed: u64) -> Result<Vec<(usize, usize)>> {
    if m < 2 || count > m * (m - 1) / 2 {
        return Err(GeodesyError::invalid(format!(
            "cannot draw {count} distinct pairs from {m} points"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let mut pairs = Vec::with_capacity(count);
    while pairs.len() < count {
        let i = rng.random_range(0..m);
        let j = rng.random_range(0..m);
        if i == j {
            continue;
        }
        let key = (i.min(j), i.max(j));
        if seen.insert(key) {
            pairs.push(key);
        }
    }
    Ok(pairs)
}

/// Builds a reconstructed mesh over the cloud, walking a ladder of scale
/// factors (and jitter seeds) until one yields a consistent, manifold,
/// connected complex. Returns the mesh and the scale that produced it.
pub fn build_mesh_scaled(
    cloud: &PointCloud,
    k: usize,
    eps: f64,
    factors: &[f64],
    jitter_seeds: u64,
) -> Result<(TriMesh, f64)> {
    let mut last = String::from("no scale attempted");
    for &f in factors {
        let scale = eps * f;
        let field = match estimate_tangents(cloud, k, 1.5 * scale) {
            Ok(t) => t,
            Err(e) => {
                last = e.to_string();
                continue;
            }
        };
        for ds in 0..jitter_seeds.max(1) {
            let mut params = TdcParams::for_scale(scale, cloud.diameter())?;
            params.seed += ds;
            let (mesh, report) = match build_tdc(cloud, &field, &params) {
                Ok(out) => out,
                Err(e) => {
                    last = e.to_string();
                    continue;
                }
            };
            if report.count_after > 0 {
                last = format!(
                    "{} inconsistent stars after {} rounds at scale {scale:.4}",
                    report.count_after, report.rounds_used
                );
                continue;
            }
            let quality = validate_mesh(&mesh, None)?;
            if quality.non_manifold_edges > 0
                || quality.vertex_link_failures > 0
                || !quality.orientable
            {
                last = format!("non-manifold at scale {scale:.4}: {}", quality.summary());
                continue;
            }
            if quality.connected_components != 1 || quality.used_vertex_count != cloud.len() {
                last = format!(
                    "mesh does not connect the cloud at scale {scale:.4}: {}",
                    quality.summary()
                );
                continue;
            }
            return Ok((mesh, scale));
        }
    }
    Err(GeodesyError::Reconstruction(format!(
        "no usable mesh at any scale in {factors:?} x {eps:.4}: {last}"
    )))
}

/// Accumulated output of one experiment cell.
struct CellOut {
    n: usize,
    repeat: usize,
    rows: Vec<Vec<String>>,
    timings: Vec<Vec<String>>,
}

fn fmt(v: f64) -> String {
    format!("{v:.6e}")
}

/// Mean absolute and mean relative error of estimates against ground truth.
fn error_means(estimates: &[f64], truth: &[f64]) -> (f64, f64) {
    let n = truth.len() as f64;
    let mut abs = 0.0;
    let mut rel = 0.0;
    for (&e, &t) in estimates.iter().zip(truth) {
        abs += (e - t).abs();
        rel += (e - t).abs() / t;
    }
    (abs / n, rel / n)
}

/// Runs the distance-accuracy experiment: per (n, repeat), sample the surface,
/// extract a net, reconstruct a mesh once and build a neighborhood graph per
/// radius, then compare both estimates against the analytic oracle on a fixed
/// random pair subsample. Failures are recorded per row and the run continues.
pub fn run_distance_experiment(cfg: &ExperimentConfig) -> Result<(Table, Table)> {
    let oracle = GroundTruthOracle::new(cfg.surface.clone());
    let jobs: Vec<(usize, usize)> = cfg
        .sample_sizes
        .iter()
        .flat_map(|&n| (0..cfg.repeats).map(move |r| (n, r)))
        .collect();
    let cells: Vec<CellOut> = jobs
        .par_iter()
        .map(|&(n, repeat)| distance_cell(cfg, &oracle, n, repeat))
        .collect();
    Ok(assemble(cfg, cells))
}

fn distance_cell(
    cfg: &ExperimentConfig,
    oracle: &GroundTruthOracle,
    n: usize,
    repeat: usize,
) -> CellOut {
    let surface = cfg.surface.name();
    let k = cfg.surface.intrinsic_dim();
    let seed = mix_seed(cfg.seed, n as u64, repeat as u64);
    let mut out = CellOut { n, repeat, rows: Vec::new(), timings: Vec::new() };
    let fail_all = |out: &mut CellOut, stage: &str, err: String| {
        out.rows.push(vec![
            surface.clone(),
            n.to_string(),
            stage.to_string(),
            String::new(),
            repeat.to_string(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            format!("error: {err}"),
        ]);
    };

    let t = Instant::now();
    let cloud = match sample(&cfg.surface, n, seed, SampleMode::AreaUniform) {
        Ok(c) => c,
        Err(e) => {
            fail_all(&mut out, "sample", e.to_string());
            return out;
        }
    };
    out.push_timing(&surface, "sample", t.elapsed().as_secs_f64());

    let t = Instant::now();
    let stage = (|| -> Result<(PointCloud, f64)> {
        let eps0 = estimate_eps(&cloud)?;
        let net = extract_net(&cloud, eps0, None)?
            .net()
            .ok_or_else(|| GeodesyError::invalid("net extraction short-circuited"))?;
        let sub = cloud.select(&net.selected_indices)?;
        let eps_hat = estimate_eps(&sub)?;
        Ok((sub, eps_hat))
    })();
    let (sub, eps_hat) = match stage {
        Ok(v) => v,
        Err(e) => {
            fail_all(&mut out, "net", e.to_string());
            return out;
        }
    };
    out.push_timing(&surface, "net", t.elapsed().as_secs_f64());

    let pairs = match sample_pairs(sub.len(), cfg.pair_subsample, mix_seed(seed, 0xABCD, 1)) {
        Ok(p) => p,
        Err(e) => {
            fail_all(&mut out, "pairs", e.to_string());
            return out;
        }
    };
    let truth: Result<Vec<f64>> = pairs
        .iter()
        .map(|&(i, j)| true_distance(oracle, sub.point(i), sub.point(j)))
        .collect();
    let truth = match truth {
        Ok(t) => t,
        Err(e) => {
            fail_all(&mut out, "oracle", e.to_string());
            return out;
        }
    };

    let row = |out: &mut CellOut, method: &str, radius: String, means: Option<(f64, f64)>, wall: f64, status: String| {
        let (abs, rel) = means.map(|(a, b)| (fmt(a), fmt(b))).unwrap_or_default();
        out.rows.push(vec![
            surface.clone(),
            n.to_string(),
            method.to_string(),
            radius,
            repeat.to_string(),
            abs,
            rel,
            fmt(eps_hat),
            fmt(wall),
            status,
        ]);
    };

    // Mesh: reconstruct once, then measure exact polyhedral distances.
    let t = Instant::now();
    match build_mesh_scaled(&sub, k, eps_hat, &DISTANCE_SCALE_LADDER, 2) {
        Ok((mesh, scale)) => {
            let build_s = t.elapsed().as_secs_f64();
            out.push_timing(&surface, "mesh_build", build_s);
            let t = Instant::now();
            match mesh_distance_matrix(&mesh, &pairs) {
                Ok(est) => row(
                    &mut out,
                    "mesh",
                    "mesh".into(),
                    Some(error_means(&est, &truth)),
                    t.elapsed().as_secs_f64(),
                    format!("ok scale={scale:.4}"),
                ),
                Err(e) => {
                    let wall = t.elapsed().as_secs_f64();
                    row(&mut out, "mesh", "mesh".into(), None, wall, format!("error: {e}"))
                }
            }
            out.push_timing(&surface, "mesh_distances", t.elapsed().as_secs_f64());
        }
        Err(e) => {
            out.push_timing(&surface, "mesh_build", t.elapsed().as_secs_f64());
            row(&mut out, "mesh", "mesh".into(), None, 0.0, format!("error: {e}"));
        }
    }

    // Graph: one Dijkstra sweep per radius over the unique pair sources.
    let sources: Vec<usize> = {
        let mut s: Vec<usize> = pairs.iter().map(|p| p.0).collect();
        s.sort_unstable();
        s.dedup();
        s
    };
    for &r in &cfg.radii {
        let t = Instant::now();
        let outcome = (|| -> Result<Vec<f64>> {
            let g = build_graph(&sub, r)?;
            let rows = graph_distances(&g, &sources)?;
            pairs
                .iter()
                .map(|&(i, j)| {
                    let si = sources.binary_search(&i).expect("source was inserted");
                    let v = rows[si][j];
                    if v.is_finite() {
                        Ok(v)
                    } else {
                        Err(GeodesyError::NoPath { from: i, to: j })
                    }
                })
                .collect()
        })();
        let wall = t.elapsed().as_secs_f64();
        match outcome {
            Ok(est) => {
                row(&mut out, "graph", fmt(r), Some(error_means(&est, &truth)), wall, "ok".into())
            }
            Err(e) => row(&mut out, "graph", fmt(r), None, wall, format!("error: {e}")),
        }
        out.push_timing(&surface, &format!("graph_r={r}"), wall);
    }
    out
}

impl CellOut {
    fn push_timing(&mut self, surface: &str, stage: &str, seconds: f64) {
        self.timings.push(vec![
            surface.to_string(),
            self.n.to_string(),
            self.repeat.to_string(),
            stage.to_string(),
            fmt(seconds),
        ]);
    }
}

fn assemble(header: &[&str], mut cells: Vec<CellOut>) -> (Table, Table) {
    cells.sort_by_key(|c| (c.n, c.repeat));
    let mut rows = Table::new(header);
    let mut timings = Table::new(&["surface", "n", "repeat", "stage", "seconds"]);
    for cell in cells {
        rows.rows.extend(cell.rows);
        timings.rows.extend(cell.timings);
    }
    (rows, timings)
}

/// Selects `count` spread-out members of `eligible` by farthest-point
/// traversal, starting from the first eligible point.
pub fn farthest_point_subset(cloud: &PointCloud, eligible: &[usize], count: usize) -> Vec<usize> {
    let mut chosen = vec![eligible[0]];
    let mut dist: Vec<f64> = eligible.iter().map(|&i| cloud.dist(i, eligible[0])).collect();
    while chosen.len() < count && chosen.len() < eligible.len() {
        let (best, _) = dist
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (t, &d)| if d > acc.1 { (t, d) } else { acc });
        chosen.push(eligible[best]);
        for (t, &i) in eligible.iter().enumerate() {
            dist[t] = dist[t].min(cloud.dist(i, eligible[best]));
        }
    }
    chosen
}

/// Landmark indices for an embedding run: points whose isometric coordinates
/// sit away from the domain boundary (margin 3ε per coordinate, capped at a
/// quarter of the coordinate span), spread by farthest-point selection.
pub fn select_landmarks(
    cloud: &PointCloud,
    coords: &[Vec<f64>],
    eps: f64,
    count: usize,
) -> Result<Vec<usize>> {
    let k = coords[0].len();
    let mut lo = vec![f64::INFINITY; k];
    let mut hi = vec![f64::NEG_INFINITY; k];
    for c in coords {
        for q in 0..k {
            lo[q] = lo[q].min(c[q]);
            hi[q] = hi[q].max(c[q]);
        }
    }
    let margins: Vec<f64> = (0..k).map(|q| (3.0 * eps).min((hi[q] - lo[q]) / 4.0)).collect();
    let eligible: Vec<usize> = (0..cloud.len())
        .filter(|&i| {
            (0..k).all(|q| {
                coords[i][q] >= lo[q] + margins[q] && coords[i][q] <= hi[q] - margins[q]
            })
        })
        .collect();
    if eligible.len() < count {
        return Err(GeodesyError::invalid(format!(
            "only {} interior points available for {count} landmarks",
            eligible.len()
        )));
    }
    Ok(farthest_point_subset(cloud, &eligible, count))
}

/// Runs the embedding experiment: per repeat, embed a fixed landmark subset
/// with the graph method at every radius and with the mesh method once, and
/// record the Procrustes error of each against the true isometric coordinates.
pub fn run_isomap_experiment(cfg: &ExperimentConfig) -> Result<(Table, Table)> {
    let k = cfg.surface.intrinsic_dim();
    // Fail fast if the surface has no isometric coordinates.
    let probe = sample(&cfg.surface, 4, 0, SampleMode::AreaUniform)?;
    isometric_coords(&cfg.surface, probe.point(0))?;
    let dense = sample(&cfg.surface, REFERENCE_SIZE, REFERENCE_SEED, SampleMode::AreaUniform)?;

    let jobs: Vec<(usize, usize)> = cfg
        .sample_sizes
        .iter()
        .flat_map(|&n| (0..cfg.repeats).map(move |r| (n, r)))
        .collect();
    let cells: Vec<CellOut> = jobs
        .par_iter()
        .map(|&(n, repeat)| isomap_cell(cfg, &dense, k, n, repeat))
        .collect();
    Ok(assemble(cfg, cells))
}

fn isomap_cell(
    cfg: &ExperimentConfig,
    dense: &PointCloud,
    k: usize,
    n: usize,
    repeat: usize,
) -> CellOut {
    let surface = cfg.surface.name();
    let seed = mix_seed(cfg.seed, n as u64, repeat as u64);
    let mut out = CellOut { n, repeat, rows: Vec::new(), timings: Vec::new() };

    let t = Instant::now();
    let stage = (|| -> Result<(PointCloud, f64, Vec<usize>, Embedding)> {
        let cloud = sample(&cfg.surface, n, seed, SampleMode::AreaUniform)?;
        let eps = covering_radius(&cloud, dense)?;
        let coords: Result<Vec<Vec<f64>>> = (0..cloud.len())
            .map(|i| isometric_coords(&cfg.surface, cloud.point(i)))
            .collect();
        let coords = coords?;
        let landmarks = select_landmarks(&cloud, &coords, eps, cfg.landmark_count)?;
        let reference_rows: Vec<Vec<f64>> =
            landmarks.iter().map(|&l| coords[l].clone()).collect();
        let reference = Embedding::from_rows(&reference_rows, "reference")?;
        Ok((cloud, eps, landmarks, reference))
    })();
    let (cloud, eps, landmarks, reference) = match stage {
        Ok(v) => v,
        Err(e) => {
            out.rows.push(vec![
                surface.clone(),
                n.to_string(),
                "setup".into(),
                String::new(),
                repeat.to_string(),
                String::new(),
                String::new(),
                String::new(),
                format!("error: {e}"),
            ]);
            return out;
        }
    };
    out.push_timing(&surface, "setup", t.elapsed().as_secs_f64());

    let row = |out: &mut CellOut, method: &str, radius: String, rmse: Option<f64>, wall: f64, status: String| {
        out.rows.push(vec![
            surface.clone(),
            n.to_string(),
            method.to_string(),
            radius,
            repeat.to_string(),
            rmse.map(fmt).unwrap_or_default(),
            fmt(eps),
            fmt(wall),
            status,
        ]);
    };

    for &r in &cfg.radii {
        let t = Instant::now();
        match isomap_landmarks(&cloud, k, r, &landmarks)
            .and_then(|e| procrustes_align(&e, &reference))
        {
            Ok(p) => {
                let wall = t.elapsed().as_secs_f64();
                row(&mut out, "isomap", fmt(r), Some(p.rmse), wall, "ok".into())
            }
            Err(e) => {
                let wall = t.elapsed().as_secs_f64();
                row(&mut out, "isomap", fmt(r), None, wall, format!("error: {e}"))
            }
        }
    }

    let t = Instant::now();
    let mut done = false;
    let mut last = String::new();
    for &f in &ISOMAP_SCALE_LADDER {
        let scale = eps * f;
        let params = match TdcParams::for_scale(scale, cloud.diameter()) {
            Ok(p) => p,
            Err(e) => {
                last = e.to_string();
                continue;
            }
        };
        match mesh_isomap_landmarks(&cloud, k, Some(&params), &landmarks)
            .and_then(|e| procrustes_align(&e, &reference))
        {
            Ok(p) => {
                let wall = t.elapsed().as_secs_f64();
                row(&mut out, "mesh-isomap", "mesh".into(), Some(p.rmse), wall, format!("ok scale={scale:.4}"));
                done = true;
                break;
            }
            Err(e) => last = e.to_string(),
        }
    }
    if !done {
        let wall = t.elapsed().as_secs_f64();
        row(&mut out, "mesh-isomap", "mesh".into(), None, wall, format!("error: {last}"));
    }
    out.push_timing(&surface, "mesh_embed", t.elapsed().as_secs_f64());
    out
}

/// Runs the lower-bound experiment: for each grid resolution, build the flat
/// and bumped grid pair and report the distance-gap ratio statistics, the
/// embedding gap, and the quadrature value they should approach.
pub fn run_lower_bound_experiment(k: usize, m_list: &[usize], amplitude: f64) -> Result<Table> {
    let mut table = Table::new(&[
        "k",
        "m",
        "amplitude",
        "eps",
        "min_gap_ratio",
        "median_gap_ratio",
        "embedding_gap_ratio",
        "cubic_coefficient_oracle",
    ]);
    let c1 = bump_arc_cubic_coefficient(amplitude);
    for &m in m_list {
        let (_, d1, d2, u1, u2) = lower_bound_pair(k, m, amplitude)?;
        let eps = 1.0 / (m as f64 - 1.0);
        let n = u1.coords.nrows();
        let mut ratios = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let a = d1.get(i, j).expect("complete matrix");
                let b = d2.get(i, j).expect("complete matrix");
                if a > 0.0 {
                    ratios.push((b - a) / (eps * eps * a));
                }
            }
        }
        ratios.sort_by(|x, y| x.partial_cmp(y).expect("finite ratios"));
        let min = ratios.first().copied().unwrap_or(f64::NAN);
        let median = ratios[ratios.len() / 2];
        let gap: f64 = (0..n)
            .map(|i| {
                let d: f64 = (0..u1.coords.ncols())
                    .map(|q| (u1.coords[(i, q)] - u2.coords[(i, q)]).powi(2))
                    .sum();
                d
            })
            .sum::<f64>()
            / n as f64;
        let gap_ratio = gap.sqrt() / (eps * eps);
        table.rows.push(vec![
            k.to_string(),
            m.to_string(),
            fmt(amplitude),
            fmt(eps),
            fmt(min),
            fmt(median),
            fmt(gap_ratio),
            fmt(c1),
        ]);
    }
    Ok(table)
}
