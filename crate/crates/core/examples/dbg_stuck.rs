use geodesy::embedding::DistanceMatrix;
use geodesy::geodesics::mesh_distance_matrix;
use geodesy::graph::{build_graph, graph_distances};
use geodesy::mesh::{build_tdc, validate_mesh, TdcParams};
use geodesy::nets::{estimate_eps, extract_net};
use geodesy::surfaces::{sample, true_distance, GroundTruthOracle, SampleMode, SurfaceSpec};
use geodesy::tangents::estimate_tangents;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let spec = SurfaceSpec::sphere(1.0).unwrap();
    let oracle = GroundTruthOracle::new(spec.clone());
    let mut per_n: Vec<(f64, f64, f64)> = Vec::new(); // (mean eps, mean mesh err, mean best graph err)
    for &n in &[500usize, 1000, 2000, 4000] {
        let mut acc = (0.0, 0.0, 0.0);
        let mut reps = 0.0;
        for rep in 0..3u64 {
            let t0 = std::time::Instant::now();
            let seed = 1000 + 7 * n as u64 + rep;
            let cloud = sample(&spec, n, seed, SampleMode::AreaUniform).unwrap();
            let eps0 = estimate_eps(&cloud).unwrap();
            let net = extract_net(&cloud, eps0, None).unwrap();
            let net = net.net().unwrap();
            let sub = cloud.select(&net.selected_indices).unwrap();
            let eps = estimate_eps(&sub).unwrap();
            // pairs
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
            let m = sub.len();
            let mut pairs = Vec::new();
            while pairs.len() < 100 {
                let i = rng.random_range(0..m);
                let j = rng.random_range(0..m);
                if i != j && !pairs.contains(&(i.min(j), i.max(j))) {
                    pairs.push((i.min(j), i.max(j)));
                }
            }
            let truth: Vec<f64> = pairs
                .iter()
                .map(|&(i, j)| true_distance(&oracle, sub.point(i), sub.point(j)).unwrap())
                .collect();
            // mesh with scale ladder
            let mut mesh_err = None;
            'ladder: for f in [1.0, 1.1, 0.9, 1.2, 1.3] {
                let e = eps * f;
                let tf = match estimate_tangents(&sub, 2, 1.5 * e) {
                    Ok(t) => t,
                    Err(_) => continue,
                };
                for ds in 0..2u64 {
                let mut params = TdcParams::for_scale(e, sub.diameter()).unwrap();
                params.seed += ds;
                match build_tdc(&sub, &tf, &params) {
                    Ok((m, rep_v)) => {
                        if rep_v.count_after == 0 {
                            let d = mesh_distance_matrix(&m, &pairs).unwrap();
                            let err = d
                                .iter()
                                .zip(&truth)
                                .map(|(a, t)| (a - t).abs() / t)
                                .sum::<f64>()
                                / 100.0;
                            mesh_err = Some(err);
                            break 'ladder;
                        }
                    }
                    Err(_) => continue,
                }
                }
            }
            // graph per radius (relative to eps)
            let mut best_graph = f64::INFINITY;
            let mut best_r = 0.0;
            let sources: Vec<usize> = {
                let mut s: Vec<usize> = pairs.iter().map(|p| p.0).collect();
                s.sort();
                s.dedup();
                s
            };
            for fr in [0.75, 1.0, 1.5, 2.0] {
                let r = fr * eps;
                let g = match build_graph(&sub, r) {
                    Ok(g) => g,
                    Err(_) => continue,
                };
                let rows = match graph_distances(&g, &sources) {
                    Ok(r) => r,
                    Err(_) => continue,
                };
                let mut err = 0.0;
                let mut ok = true;
                for (p, &(i, j)) in pairs.iter().enumerate() {
                    let si = sources.binary_search(&i).unwrap();
                    let v = rows[si][j];
                    if !v.is_finite() {
                        ok = false;
                        break;
                    }
                    err += (v - truth[p]).abs() / truth[p];
                }
                if ok {
                    let err = err / 100.0;
                    if err < best_graph {
                        best_graph = err;
                        best_r = r;
                    }
                }
            }
            let me = mesh_err.unwrap_or(f64::NAN);
            println!(
                "n {n} rep {rep}: net {m} eps {eps:.4} mesh {me:.5} graph {best_graph:.5} (r={best_r:.3}) [{:.1}s]",
                t0.elapsed().as_secs_f64()
            );
            acc.0 += eps;
            acc.1 += me;
            acc.2 += best_graph;
            reps += 1.0;
        }
        per_n.push((acc.0 / reps, acc.1 / reps, acc.2 / reps));
    }
    // slopes: least squares of log(err) on log(eps)
    let slope = |ys: Vec<f64>, xs: Vec<f64>| {
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        num / den
    };
    let xs: Vec<f64> = per_n.iter().map(|p| p.0.ln()).collect();
    let mesh_s = slope(per_n.iter().map(|p| p.1.ln()).collect(), xs.clone());
    let graph_s = slope(per_n.iter().map(|p| p.2.ln()).collect(), xs);
    println!("mesh slope {mesh_s:.3} graph slope {graph_s:.3} diff {:.3}", mesh_s - graph_s);
}
