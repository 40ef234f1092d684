use geodesy::nets::estimate_eps;
use geodesy::surfaces::{sample, SampleMode, SurfaceSpec};
use geodesy::tangents::{estimate_tangents, tangent_error_profile};

fn main() {
    let mut prev: Option<(f64, f64)> = None;
    for &n in &[1000usize, 2000, 4000, 8000, 16000] {
        let spec = SurfaceSpec::sphere(1.0).unwrap();
        let cloud = sample(&spec, n, 77, SampleMode::AreaUniform).unwrap();
        let eps = estimate_eps(&cloud).unwrap();
        let field = estimate_tangents(&cloud, 2, 4.0 * eps).unwrap();
        let profile = tangent_error_profile(&field, &cloud, &spec).unwrap();
        let med = profile.median_angle().unwrap();
        let mut line = format!(
            "n={n:6} eps={eps:.4} h={:.4} median={med:.6} max={:.6}",
            4.0 * eps,
            profile.max_angle().unwrap()
        );
        if let Some((pe, pm)) = prev {
            let exp = (med / pm).ln() / (eps / pe).ln();
            let per_halving = (med / pm).powf((0.5f64).ln() / (eps / pe).ln());
            line += &format!("  exponent={exp:.3} per-halving={per_halving:.3}");
        }
        println!("{line}");
        prev = Some((eps, med));
    }
}
