//! `geodesy`: sampling, reconstruction, geodesic distances, and embeddings
//! on synthetic surfaces, plus the experiment harness behind the CSV/SVG
//! result files.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use geodesy::cloud::{read_indices, read_pairs, write_distances, write_indices};
use geodesy::embedding::{isomap, isomap_landmarks, mesh_isomap, mesh_isomap_landmarks};
use geodesy::error::{GeodesyError, Result};
use geodesy::geodesics::{exact_geodesics, steiner_geodesics};
use geodesy::mesh::{build_tdc, validate_mesh, TdcParams, TriMesh};
use geodesy::nets::{estimate_eps, extract_net};
use geodesy::surfaces::{sample, SampleMode};
use geodesy::tangents::estimate_tangents;
use geodesy::PointCloud;
use geodesy_cli::config::{ConfigOverrides, ExperimentConfig};
use geodesy_cli::experiments::{
    run_distance_experiment, run_isomap_experiment, run_lower_bound_experiment,
};
use geodesy_cli::parse::{parse_count_list, parse_real_list, parse_surface};
use geodesy_cli::{exit_code, plot};

#[derive(Parser)]
#[command(
    name = "geodesy",
    version,
    about = "Geodesic distances and embeddings on sampled surfaces"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample a point cloud from a synthetic surface.
    Sample {
        /// Surface description, e.g. sphere:radius=1, torus, swiss, flat:k=2.
        #[arg(long)]
        surface: String,
        /// Number of points.
        #[arg(long)]
        n: usize,
        /// RNG seed.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Sampling mode: area, param, or grid.
        #[arg(long, default_value = "area")]
        mode: String,
        /// Output cloud CSV (one point per row).
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract a separated covering subset from a cloud.
    Net {
        #[command(flatten)]
        cloud: CloudArgs,
        /// Net scale; defaults to the estimated covering radius.
        #[arg(long)]
        eps: Option<f64>,
        /// Output index list, one selected row index per line.
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate tangent frames by local weighted PCA.
    Tangents {
        #[command(flatten)]
        cloud: CloudArgs,
        /// Neighborhood radius; defaults to 1.5 x estimated covering radius.
        #[arg(long)]
        radius: Option<f64>,
        /// Output CSV: base point then an orthonormal basis per row.
        #[arg(long)]
        out: PathBuf,
    },
    /// Reconstruct a triangle mesh over a cloud.
    Mesh {
        #[command(flatten)]
        cloud: CloudArgs,
        /// Reconstruction scale; defaults to the estimated covering radius.
        #[arg(long)]
        scale: Option<f64>,
        /// Repair-round budget override.
        #[arg(long)]
        rounds: Option<usize>,
        /// Output mesh in OFF format.
        #[arg(long)]
        out: PathBuf,
    },
    /// Shortest-path distances in a neighborhood graph for listed pairs.
    GraphDist {
        #[command(flatten)]
        cloud: CloudArgs,
        /// Connection radius.
        #[arg(long)]
        radius: f64,
        /// CSV of vertex index pairs `i,j`.
        #[arg(long)]
        pairs: PathBuf,
        /// Output CSV rows `i,j,distance`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Geodesic distances on a mesh for listed vertex pairs.
    MeshDist {
        /// Input mesh in OFF format.
        #[arg(long)]
        mesh: PathBuf,
        /// CSV of vertex index pairs `i,j`.
        #[arg(long)]
        pairs: PathBuf,
        /// Use the Steiner-point upper bound with this many points per edge
        /// instead of the exact solver.
        #[arg(long)]
        steiner: Option<usize>,
        /// Output CSV rows `i,j,distance`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Embed a cloud from neighborhood-graph distances.
    Isomap {
        #[command(flatten)]
        cloud: CloudArgs,
        /// Connection radius.
        #[arg(long)]
        radius: f64,
        /// Optional landmark index file; embeds only those points.
        #[arg(long)]
        landmarks: Option<PathBuf>,
        /// Output embedding CSV.
        #[arg(long)]
        out: PathBuf,
    },
    /// Embed a cloud from reconstructed-mesh geodesic distances.
    MeshIsomap {
        #[command(flatten)]
        cloud: CloudArgs,
        /// Reconstruction scale; defaults derive from the cloud.
        #[arg(long)]
        scale: Option<f64>,
        /// Optional landmark index file; embeds only those points.
        #[arg(long)]
        landmarks: Option<PathBuf>,
        /// Output embedding CSV.
        #[arg(long)]
        out: PathBuf,
    },
    /// Batch experiments emitting CSV tables and SVG plots.
    Experiment {
        #[command(subcommand)]
        which: ExpCmd,
    },
}

/// Flags shared by subcommands that read a cloud CSV.
#[derive(Args)]
struct CloudArgs {
    /// Input cloud CSV (one point per row).
    #[arg(long)]
    input: PathBuf,
    /// Intrinsic dimension of the sampled surface.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Input file has a header line.
    #[arg(long)]
    header: bool,
}

impl CloudArgs {
    fn read(&self) -> Result<PointCloud> {
        PointCloud::read_csv(&self.input, self.dim, self.header)
    }
}

#[derive(Subcommand)]
enum ExpCmd {
    /// Distance-accuracy sweep: mesh vs neighborhood graph per radius.
    Distances(ExpFlags),
    /// Embedding accuracy: landmark embeddings vs true coordinates.
    Isomap(ExpFlags),
    /// Distance/embedding gaps of the flat-vs-bumped grid pair.
    Lowerbound {
        /// Intrinsic dimension of the grids.
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Comma-separated grid resolutions.
        #[arg(long, default_value = "11,21,41")]
        m_list: String,
        /// Bump amplitude.
        #[arg(long, default_value_t = 1.0)]
        amplitude: f64,
        /// Output directory.
        #[arg(long, default_value = "out")]
        outdir: PathBuf,
    },
}

/// Config-file plus override flags of the sampling experiments; flags win.
#[derive(Args)]
struct ExpFlags {
    /// Plain key=value config file (keys: surface, sizes, radii, repeats,
    /// pairs, landmarks, seed, outdir).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    surface: Option<String>,
    /// Comma-separated sample sizes.
    #[arg(long)]
    sizes: Option<String>,
    /// Comma-separated radii.
    #[arg(long)]
    radii: Option<String>,
    #[arg(long)]
    repeats: Option<usize>,
    /// Random vertex pairs the errors are averaged over.
    #[arg(long)]
    pairs: Option<usize>,
    /// Landmark count for embedding runs.
    #[arg(long)]
    landmarks: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    outdir: Option<PathBuf>,
}

impl ExpFlags {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let over = ConfigOverrides {
            surface: self.surface.clone(),
            sample_sizes: self.sizes.as_deref().map(parse_count_list).transpose()?,
            radii: self.radii.as_deref().map(parse_real_list).transpose()?,
            repeats: self.repeats,
            pair_subsample: self.pairs,
            landmark_count: self.landmarks,
            seed: self.seed,
            outdir: self.outdir.clone(),
        };
        ExperimentConfig::load(self.config.as_deref(), &over)
    }
}

fn parse_mode(text: &str) -> Result<SampleMode> {
    match text {
        "area" => Ok(SampleMode::AreaUniform),
        "param" => Ok(SampleMode::ParamUniform),
        "grid" => Ok(SampleMode::RegularGrid),
        other => Err(GeodesyError::Parse(format!(
            "unknown sampling mode {other:?} (expected area, param, or grid)"
        ))),
    }
}

fn configure_threads() -> Result<()> {
    match std::env::var("GEODESY_THREADS") {
        Err(_) => Ok(()),
        Ok(v) => {
            let n: usize = v.parse().map_err(|_| {
                GeodesyError::invalid(format!("GEODESY_THREADS={v:?} is not a worker count"))
            })?;
            if n == 0 {
                return Err(GeodesyError::invalid("GEODESY_THREADS must be at least 1"));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| GeodesyError::invalid(format!("cannot size the thread pool: {e}")))
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Sample { surface, n, seed, mode, out } => {
            let spec = parse_surface(&surface)?;
            let cloud = sample(&spec, n, seed, parse_mode(&mode)?)?;
            cloud.write_csv(&out, false)?;
            println!("wrote {} points of {} to {}", cloud.len(), spec.name(), out.display());
        }
        Cmd::Net { cloud, eps, out } => {
            let cloud = cloud.read()?;
            let eps = match eps {
                Some(e) => e,
                None => estimate_eps(&cloud)?,
            };
            let net = extract_net(&cloud, eps, None)?
                .net()
                .expect("extraction without anchors always yields a net");
            write_indices(&out, &net.selected_indices)?;
            println!(
                "net: {} of {} points at eps {eps:.4} (separation {:.4}, cover bound {:.4})",
                net.selected_indices.len(),
                cloud.len(),
                net.separation,
                net.cover_radius_bound
            );
        }
        Cmd::Tangents { cloud, radius, out } => {
            let cloud = cloud.read()?;
            let k = cloud.intrinsic_dim;
            let h = match radius {
                Some(r) => r,
                None => 1.5 * estimate_eps(&cloud)?,
            };
            let field = estimate_tangents(&cloud, k, h)?;
            field.write_csv(&out)?;
            println!(
                "tangents: {} of {} frames usable at radius {h:.4}",
                field.usable_count(),
                field.len()
            );
        }
        Cmd::Mesh { cloud, scale, rounds, out } => {
            let cloud = cloud.read()?;
            let k = cloud.intrinsic_dim;
            let eps = match scale {
                Some(e) => e,
                None => estimate_eps(&cloud)?,
            };
            let field = estimate_tangents(&cloud, k, 1.5 * eps)?;
            let mut params = TdcParams::for_scale(eps, cloud.diameter())?;
            if let Some(r) = rounds {
                params.time_limit_rounds = r;
            }
            let (mesh, report) = build_tdc(&cloud, &field, &params)?;
            if report.count_after > 0 {
                return Err(GeodesyError::Reconstruction(format!(
                    "{} inconsistent stars remain after {} repair rounds",
                    report.count_after, report.rounds_used
                )));
            }
            let quality = validate_mesh(&mesh, None)?;
            mesh.write_off(&out)?;
            println!("mesh: {}", quality.summary());
        }
        Cmd::GraphDist { cloud, radius, pairs, out } => {
            let cloud = cloud.read()?;
            let pairs = read_pairs(&pairs)?;
            let g = geodesy::graph::build_graph(&cloud, radius)?;
            let sources: Vec<usize> = {
                let mut s: Vec<usize> = pairs.iter().map(|p| p.0).collect();
                s.sort_unstable();
                s.dedup();
                s
            };
            let rows = geodesy::graph::graph_distances(&g, &sources)?;
            let mut records = Vec::with_capacity(pairs.len());
            for &(i, j) in &pairs {
                let si = sources.binary_search(&i).expect("source was inserted");
                let d = rows[si][j];
                if !d.is_finite() {
                    return Err(GeodesyError::NoPath { from: i, to: j });
                }
                records.push((i, j, d));
            }
            write_distances(&out, &records)?;
            println!("graph distances: {} pairs at radius {radius}", records.len());
        }
        Cmd::MeshDist { mesh, pairs, steiner, out } => {
            let mesh = TriMesh::read_off(&mesh)?;
            let pairs = read_pairs(&pairs)?;
            let sources: Vec<usize> = {
                let mut s: Vec<usize> = pairs.iter().map(|p| p.0).collect();
                s.sort_unstable();
                s.dedup();
                s
            };
            let mut records = Vec::with_capacity(pairs.len());
            for &src in &sources {
                let sol = match steiner {
                    Some(m) => steiner_geodesics(&mesh, src, m)?,
                    None => exact_geodesics(&mesh, src)?,
                };
                for &(i, j) in pairs.iter().filter(|p| p.0 == src) {
                    let d = sol.distances[j];
                    if !d.is_finite() {
                        return Err(GeodesyError::NoPath { from: i, to: j });
                    }
                    records.push((i, j, d));
                }
            }
            records.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite"));
            write_distances(&out, &records)?;
            println!("mesh distances: {} pairs", records.len());
        }
        Cmd::Isomap { cloud, radius, landmarks, out } => {
            let cloud = cloud.read()?;
            let k = cloud.intrinsic_dim;
            let emb = match landmarks {
                Some(path) => isomap_landmarks(&cloud, k, radius, &read_indices(&path)?)?,
                None => isomap(&cloud, k, radius)?,
            };
            emb.write_csv(&out)?;
            println!("embedded {} points into {} dims", emb.coords.nrows(), emb.coords.ncols());
        }
        Cmd::MeshIsomap { cloud, scale, landmarks, out } => {
            let cloud = cloud.read()?;
            let k = cloud.intrinsic_dim;
            let params = scale
                .map(|e| TdcParams::for_scale(e, cloud.diameter()))
                .transpose()?;
            let emb = match landmarks {
                Some(path) => {
                    mesh_isomap_landmarks(&cloud, k, params.as_ref(), &read_indices(&path)?)?
                }
                None => mesh_isomap(&cloud, k, params.as_ref())?,
            };
            emb.write_csv(&out)?;
            println!("embedded {} points into {} dims", emb.coords.nrows(), emb.coords.ncols());
        }
        Cmd::Experiment { which } => run_experiment(which)?,
    }
    Ok(())
}

fn run_experiment(which: ExpCmd) -> Result<()> {
    match which {
        ExpCmd::Distances(flags) => {
            let cfg = flags.resolve()?;
            std::fs::create_dir_all(&cfg.outdir)?;
            let (rows, timings) = run_distance_experiment(&cfg)?;
            let rows_path = cfg.outdir.join("distances.csv");
            rows.write_csv(&rows_path)?;
            timings.write_csv(&cfg.outdir.join("timings.csv"))?;
            let plots = plot::emit_distance_plots(&rows, &cfg.outdir)?;
            println!(
                "distance experiment: {} rows -> {} (+ timings.csv, {} plots)",
                rows.rows.len(),
                rows_path.display(),
                plots.len()
            );
        }
        ExpCmd::Isomap(flags) => {
            let cfg = flags.resolve()?;
            std::fs::create_dir_all(&cfg.outdir)?;
            let (rows, timings) = run_isomap_experiment(&cfg)?;
            let rows_path = cfg.outdir.join("isomap.csv");
            rows.write_csv(&rows_path)?;
            timings.write_csv(&cfg.outdir.join("timings.csv"))?;
            let plots = plot::emit_isomap_plots(&rows, &cfg.outdir)?;
            println!(
                "embedding experiment: {} rows -> {} (+ timings.csv, {} plots)",
                rows.rows.len(),
                rows_path.display(),
                plots.len()
            );
        }
        ExpCmd::Lowerbound { k, m_list, amplitude, outdir } => {
            let m_list = parse_count_list(&m_list)?;
            std::fs::create_dir_all(&outdir)?;
            let rows = run_lower_bound_experiment(k, &m_list, amplitude)?;
            let rows_path = outdir.join("lowerbound.csv");
            rows.write_csv(&rows_path)?;
            let plots = plot::emit_lower_bound_plots(&rows, &outdir)?;
            println!(
                "lower-bound experiment: {} rows -> {} ({} plots)",
                rows.rows.len(),
                rows_path.display(),
                plots.len()
            );
        }
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let outcome = configure_threads().and_then(|_| run(cli));
    if let Err(e) = outcome {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}
