use geodesy::mesh::{build_tdc, validate_mesh, TdcParams};
use geodesy::nets::estimate_eps;
use geodesy::surfaces::{sample, SampleMode, SurfaceSpec};
use geodesy::tangents::estimate_tangents;

fn run(label: &str, spec: &SurfaceSpec, n: usize, seed: u64, mode: SampleMode) {
    let cloud = sample(spec, n, seed, mode).unwrap();
    let eps = estimate_eps(&cloud).unwrap();
    let field = estimate_tangents(&cloud, 2, 1.5 * eps).unwrap();
    if !field.unusable_indices().is_empty() {
        println!("{label} n={n} seed={seed}: {} unusable frames", field.unusable_indices().len());
        return;
    }
    let diameter = cloud.diameter();
    let params = TdcParams::for_scale(eps, diameter).unwrap();
    let t0 = std::time::Instant::now();
    let (mesh, report) = build_tdc(&cloud, &field, &params).unwrap();
    let vrep = validate_mesh(&mesh, Some(spec)).unwrap();
    println!(
        "{label} n={n} seed={seed} eps={eps:.3}: before={} after={} rounds={} faces={} bnd={} \
         nonmf={} link={} euler={} closed={} H=({:.4},{:.4}) [{:.1}s]",
        report.count_before,
        report.count_after,
        report.rounds_used,
        mesh.face_count(),
        vrep.boundary_edges,
        vrep.non_manifold_edges,
        vrep.vertex_link_failures,
        vrep.euler_characteristic,
        vrep.is_closed_manifold,
        vrep.hausdorff_mesh_to_surface.unwrap(),
        vrep.hausdorff_surface_to_mesh.unwrap(),
        t0.elapsed().as_secs_f64()
    );
}

fn main() {
    let flat = SurfaceSpec::flat_square(2).unwrap();
    run("flat  ", &flat, 225, 0, SampleMode::RegularGrid);
    run("flat  ", &flat, 400, 0, SampleMode::AreaUniform);
    let sphere = SurfaceSpec::sphere(1.0).unwrap();
    for &(n, seed) in &[(500usize, 11u64), (500, 1), (1000, 1), (2000, 1), (4000, 1)] {
        run("sphere", &sphere, n, seed, SampleMode::AreaUniform);
    }
    let torus = SurfaceSpec::torus();
    for &(n, seed) in &[(2000usize, 1u64), (2000, 2), (2000, 3)] {
        run("torus ", &torus, n, seed, SampleMode::AreaUniform);
    }
    let swiss = SurfaceSpec::swiss_roll();
    for &(n, seed) in &[(1000usize, 1u64), (1000, 5), (2000, 1)] {
        run("swiss ", &swiss, n, seed, SampleMode::AreaUniform);
    }
}
