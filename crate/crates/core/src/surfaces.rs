//! Analytic benchmark surfaces, their samplers, and ground-truth geodesic
//! oracles: sphere, torus, Swiss roll, flat cube faces, and bumped grid
//! surfaces used for lower-bound experiments.

use std::collections::BinaryHeap;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embedding::{DistanceMatrix, Embedding};
use crate::error::{GeodesyError, Result};
use crate::geometry::AffineSubspace;
use crate::PointCloud;

/// Maximum residual for a point to count as lying on a surface.
pub const ON_SURFACE_TOL: f64 = 1e-9;

const TORUS_SCAFFOLD_SEED: u64 = 0x7052_55f1;
const TORUS_SCAFFOLD_N: usize = 2500;

/// Shape parameter sets for the analytic benchmark surfaces.
#[derive(Debug, Clone, PartialEq)]
pub enum SurfaceKind {
    /// Sphere of the given radius centered at the origin.
    Sphere { radius: f64 },
    /// Torus of revolution around the z-axis.
    Torus { major: f64, minor: f64 },
    /// Spiral strip (u·cos u, u·sin u, v) with u in `[u_min, u_max]`, v in `[0, height]`.
    SwissRoll { u_min: f64, u_max: f64, height: f64 },
    /// Unit cube face `[0,1]^k × {0}` in `R^{k+1}`.
    FlatSquareK { k: usize },
    /// Flat cube face with tri-cube bumps of the given amplitude between the
    /// nodes of an m-per-axis grid along the k-th coordinate.
    BumpedGrid { k: usize, amplitude: f64, m: usize },
}

/// A benchmark surface: shape family plus parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceSpec {
    pub kind: SurfaceKind,
}

impl SurfaceSpec {
    /// Sphere of radius `radius` centered at the origin.
    pub fn sphere(radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(GeodesyError::invalid("sphere radius must be positive"));
        }
        Ok(Self {
            kind: SurfaceKind::Sphere { radius },
        })
    }

    /// The default torus: major radius 2, minor radius 1.
    pub fn torus() -> Self {
        Self::torus_with(2.0, 1.0).expect("default torus parameters are valid")
    }

    /// Torus with explicit radii (`0 < minor < major`).
    pub fn torus_with(major: f64, minor: f64) -> Result<Self> {
        if !(minor > 0.0 && major > minor) || !major.is_finite() {
            return Err(GeodesyError::invalid(
                "torus radii must satisfy 0 < minor < major",
            ));
        }
        Ok(Self {
            kind: SurfaceKind::Torus { major, minor },
        })
    }

    /// The default Swiss roll: u in `[π/4, 9π/4]`, height 1.
    pub fn swiss_roll() -> Self {
        Self {
            kind: SurfaceKind::SwissRoll {
                u_min: std::f64::consts::FRAC_PI_4,
                u_max: 2.25 * std::f64::consts::PI,
                height: 1.0,
            },
        }
    }

    /// Unit cube face `[0,1]^k × {0}`.
    pub fn flat_square(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(GeodesyError::invalid("flat square dimension must be positive"));
        }
        Ok(Self {
            kind: SurfaceKind::FlatSquareK { k },
        })
    }

    /// Bumped grid surface with grid pitch `ε = 1/(m−1)`.
    pub fn bumped_grid(k: usize, amplitude: f64, m: usize) -> Result<Self> {
        if k == 0 {
            return Err(GeodesyError::invalid("bumped grid dimension must be positive"));
        }
        if !(amplitude >= 0.0) || !amplitude.is_finite() {
            return Err(GeodesyError::invalid("bump amplitude must be nonnegative"));
        }
        if m < 2 {
            return Err(GeodesyError::invalid("grid resolution must be at least 2"));
        }
        Ok(Self {
            kind: SurfaceKind::BumpedGrid { k, amplitude, m },
        })
    }

    /// Dimension of the ambient Euclidean space.
    pub fn ambient_dim(&self) -> usize {
        match self.kind {
            SurfaceKind::Sphere { .. } | SurfaceKind::Torus { .. } | SurfaceKind::SwissRoll { .. } => 3,
            SurfaceKind::FlatSquareK { k } | SurfaceKind::BumpedGrid { k, .. } => k + 1,
        }
    }

    /// Intrinsic (manifold) dimension.
    pub fn intrinsic_dim(&self) -> usize {
        match self.kind {
            SurfaceKind::Sphere { .. } | SurfaceKind::Torus { .. } | SurfaceKind::SwissRoll { .. } => 2,
            SurfaceKind::FlatSquareK { k } | SurfaceKind::BumpedGrid { k, .. } => k,
        }
    }

    /// Short name used in CSV rows and CLI output.
    pub fn name(&self) -> String {
        match self.kind {
            SurfaceKind::Sphere { radius } => format!("sphere({radius})"),
            SurfaceKind::Torus { major, minor } => format!("torus({major},{minor})"),
            SurfaceKind::SwissRoll { .. } => "swissroll".into(),
            SurfaceKind::FlatSquareK { k } => format!("flat({k})"),
            SurfaceKind::BumpedGrid { k, amplitude, m } => format!("bumped({k},{amplitude},{m})"),
        }
    }
}

/// Sampling modes over a surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleMode {
    /// Uniform on the parameter domain.
    ParamUniform,
    /// Uniform with respect to surface area.
    AreaUniform,
    /// Regular parameter grid; flat and bumped surfaces only.
    RegularGrid,
}

/// Draws `n` surface points, deterministically in `seed`.
pub fn sample(spec: &SurfaceSpec, n: usize, seed: u64, mode: SampleMode) -> Result<PointCloud> {
    let k = spec.intrinsic_dim();
    if n < k + 2 {
        return Err(GeodesyError::invalid(format!(
            "need at least k+2 = {} samples, got {n}",
            k + 2
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<f64>> = match (&spec.kind, mode) {
        (SurfaceKind::Sphere { radius }, SampleMode::AreaUniform) => (0..n)
            .map(|_| {
                // Uniform direction via rejection from the unit ball.
                loop {
                    let x = rng.random_range(-1.0..1.0);
                    let y = rng.random_range(-1.0..1.0);
                    let z = rng.random_range(-1.0..1.0);
                    let n2: f64 = x * x + y * y + z * z;
                    if n2 > 1e-12 && n2 <= 1.0 {
                        let s = radius / n2.sqrt();
                        break vec![x * s, y * s, z * s];
                    }
                }
            })
            .collect(),
        (SurfaceKind::Sphere { radius }, SampleMode::ParamUniform) => (0..n)
            .map(|_| {
                let u = rng.random_range(0.0..std::f64::consts::TAU);
                let v = rng.random_range(0.0..std::f64::consts::PI);
                vec![
                    radius * u.cos() * v.cos(),
                    radius * u.sin() * v.cos(),
                    radius * v.sin(),
                ]
            })
            .collect(),
        (SurfaceKind::Torus { major, minor }, SampleMode::ParamUniform) => (0..n)
            .map(|_| {
                let u = rng.random_range(0.0..std::f64::consts::TAU);
                let v = rng.random_range(0.0..std::f64::consts::TAU);
                torus_point(*major, *minor, u, v).to_vec()
            })
            .collect(),
        (SurfaceKind::Torus { major, minor }, SampleMode::AreaUniform) => (0..n)
            .map(|_| {
                // Area element r(R + r cos v) du dv: accept v against (R + r cos v)/(R + r).
                let u = rng.random_range(0.0..std::f64::consts::TAU);
                loop {
                    let v = rng.random_range(0.0..std::f64::consts::TAU);
                    let accept = (major + minor * v.cos()) / (major + minor);
                    if rng.random_range(0.0..1.0) < accept {
                        break torus_point(*major, *minor, u, v).to_vec();
                    }
                }
            })
            .collect(),
        (SurfaceKind::SwissRoll { u_min, u_max, height }, SampleMode::ParamUniform) => (0..n)
            .map(|_| {
                let u = rng.random_range(*u_min..*u_max);
                let v = rng.random_range(0.0..*height);
                vec![u * u.cos(), u * u.sin(), v]
            })
            .collect(),
        (SurfaceKind::SwissRoll { u_min, u_max, height }, SampleMode::AreaUniform) => {
            // The spiral arc length is the natural coordinate: uniform in s.
            let s_lo = swiss_arc_length(*u_min);
            let s_hi = swiss_arc_length(*u_max);
            (0..n)
                .map(|_| {
                    let s = rng.random_range(s_lo..s_hi);
                    let u = swiss_u_from_arc(s, *u_min, *u_max);
                    let v = rng.random_range(0.0..*height);
                    vec![u * u.cos(), u * u.sin(), v]
                })
                .collect()
        }
        (SurfaceKind::FlatSquareK { k }, SampleMode::ParamUniform | SampleMode::AreaUniform) => (0..n)
            .map(|_| {
                let mut p: Vec<f64> = (0..*k).map(|_| rng.random_range(0.0..1.0)).collect();
                p.push(0.0);
                p
            })
            .collect(),
        (SurfaceKind::BumpedGrid { k, amplitude, m }, SampleMode::ParamUniform) => (0..n)
            .map(|_| {
                let mut p: Vec<f64> = (0..*k).map(|_| rng.random_range(0.0..1.0)).collect();
                let h = bump_height(*amplitude, grid_pitch(*m), p[*k - 1]);
                p.push(h);
                p
            })
            .collect(),
        (SurfaceKind::BumpedGrid { k, amplitude, m }, SampleMode::AreaUniform) => {
            let eps = grid_pitch(*m);
            // Density along the bumped axis is √(1 + f′²); |w′| ≤ 2.01.
            let g_max = (1.0 + (1.01 * amplitude * eps).powi(2)).sqrt();
            (0..n)
                .map(|_| {
                    let mut p: Vec<f64> = (0..*k - 1).map(|_| rng.random_range(0.0..1.0)).collect();
                    let t = loop {
                        let t = rng.random_range(0.0..1.0);
                        let g = (1.0 + bump_slope(*amplitude, eps, t).powi(2)).sqrt();
                        if rng.random_range(0.0..1.0) * g_max < g {
                            break t;
                        }
                    };
                    p.push(t);
                    p.push(bump_height(*amplitude, eps, t));
                    p
                })
                .collect()
        }
        (SurfaceKind::FlatSquareK { k }, SampleMode::RegularGrid) => {
            let m = grid_side(n, *k)?;
            grid_points(*k, m, |_t| 0.0)
        }
        (SurfaceKind::BumpedGrid { k, amplitude, m }, SampleMode::RegularGrid) => {
            if n != m.pow(*k as u32) {
                return Err(GeodesyError::invalid(format!(
                    "regular grid on this surface needs n = m^k = {}, got {n}",
                    m.pow(*k as u32)
                )));
            }
            // Grid nodes sit at the bump zeros, so heights vanish exactly.
            let eps = grid_pitch(*m);
            let a = *amplitude;
            grid_points(*k, *m, move |t| bump_height(a, eps, t))
        }
        (_, SampleMode::RegularGrid) => {
            return Err(GeodesyError::invalid(
                "regular grid sampling is only defined for flat and bumped grid surfaces",
            ));
        }
    };
    PointCloud::from_points(&points, spec.intrinsic_dim())
}

fn grid_side(n: usize, k: usize) -> Result<usize> {
    let m = (n as f64).powf(1.0 / k as f64).round() as usize;
    for cand in m.saturating_sub(1)..=m + 1 {
        if cand >= 2 && cand.pow(k as u32) == n {
            return Ok(cand);
        }
    }
    Err(GeodesyError::invalid(format!(
        "regular grid needs n to be a perfect k-th power with side ≥ 2, got n={n}, k={k}"
    )))
}

fn grid_pitch(m: usize) -> f64 {
    1.0 / (m - 1) as f64
}

fn grid_points(k: usize, m: usize, height: impl Fn(f64) -> f64) -> Vec<Vec<f64>> {
    let eps = grid_pitch(m);
    let n = m.pow(k as u32);
    let mut out = Vec::with_capacity(n);
    let mut idx = vec![0usize; k];
    for _ in 0..n {
        let mut p: Vec<f64> = idx.iter().map(|&i| i as f64 * eps).collect();
        p.push(height(p[k - 1]));
        out.push(p);
        // Odometer increment, last axis fastest.
        for q in (0..k).rev() {
            idx[q] += 1;
            if idx[q] < m {
                break;
            }
            idx[q] = 0;
        }
    }
    out
}

fn torus_point(major: f64, minor: f64, u: f64, v: f64) -> [f64; 3] {
    let w = major + minor * v.cos();
    [w * u.cos(), w * u.sin(), minor * v.sin()]
}

/// Distance from a point to the surface, measured by implicit-equation
/// residuals plus any excess outside the parameter domain.
pub fn on_surface_residual(spec: &SurfaceSpec, p: &[f64]) -> f64 {
    if p.len() != spec.ambient_dim() {
        return f64::INFINITY;
    }
    match &spec.kind {
        SurfaceKind::Sphere { radius } => {
            let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            (n - radius).abs()
        }
        SurfaceKind::Torus { major, minor } => {
            let rho = (p[0] * p[0] + p[1] * p[1]).sqrt();
            (((rho - major).powi(2) + p[2] * p[2]).sqrt() - minor).abs()
        }
        SurfaceKind::SwissRoll { u_min, u_max, height } => {
            let u = (p[0] * p[0] + p[1] * p[1]).sqrt();
            let spiral = ((p[0] - u * u.cos()).powi(2) + (p[1] - u * u.sin()).powi(2)).sqrt();
            let dom = (u_min - u).max(0.0) + (u - u_max).max(0.0);
            let z_dom = (-p[2]).max(0.0) + (p[2] - height).max(0.0);
            spiral + dom + z_dom
        }
        SurfaceKind::FlatSquareK { k } => {
            let mut r = p[*k].abs();
            for q in 0..*k {
                r += (-p[q]).max(0.0) + (p[q] - 1.0).max(0.0);
            }
            r
        }
        SurfaceKind::BumpedGrid { k, amplitude, m } => {
            let mut r = (p[*k] - bump_height(*amplitude, grid_pitch(*m), p[*k - 1])).abs();
            for q in 0..*k {
                r += (-p[q]).max(0.0) + (p[q] - 1.0).max(0.0);
            }
            r
        }
    }
}

/// Orthonormal basis of the tangent space at an on-surface point.
pub fn analytic_tangent(spec: &SurfaceSpec, p: &[f64]) -> Result<AffineSubspace> {
    let resid = on_surface_residual(spec, p);
    if resid > ON_SURFACE_TOL {
        return Err(GeodesyError::invalid(format!(
            "point is off the surface (residual {resid:.3e})"
        )));
    }
    let d = spec.ambient_dim();
    let base = DVector::from_column_slice(p);
    let basis: DMatrix<f64> = match &spec.kind {
        SurfaceKind::Sphere { .. } => {
            let n = base.normalize();
            // Pick the coordinate axis least aligned with the normal.
            let axis = (0..3)
                .min_by(|&a, &b| n[a].abs().partial_cmp(&n[b].abs()).expect("finite"))
                .expect("three axes");
            let mut e = DVector::zeros(3);
            e[axis] = 1.0;
            let b1 = (&e - &n * n.dot(&e)).normalize();
            let b2 = DVector::from_column_slice(&[
                n[1] * b1[2] - n[2] * b1[1],
                n[2] * b1[0] - n[0] * b1[2],
                n[0] * b1[1] - n[1] * b1[0],
            ]);
            DMatrix::from_columns(&[b1, b2])
        }
        SurfaceKind::Torus { major, .. } => {
            let u = p[1].atan2(p[0]);
            let rho = (p[0] * p[0] + p[1] * p[1]).sqrt();
            let v = p[2].atan2(rho - major);
            let du = DVector::from_column_slice(&[-u.sin(), u.cos(), 0.0]);
            let dv = DVector::from_column_slice(&[
                -(v.sin()) * u.cos(),
                -(v.sin()) * u.sin(),
                v.cos(),
            ]);
            DMatrix::from_columns(&[du, dv])
        }
        SurfaceKind::SwissRoll { .. } => {
            let u = (p[0] * p[0] + p[1] * p[1]).sqrt();
            let du = DVector::from_column_slice(&[
                u.cos() - u * u.sin(),
                u.sin() + u * u.cos(),
                0.0,
            ])
            .normalize();
            let dz = DVector::from_column_slice(&[0.0, 0.0, 1.0]);
            DMatrix::from_columns(&[du, dz])
        }
        SurfaceKind::FlatSquareK { k } => DMatrix::identity(d, d).columns(0, *k).into_owned(),
        SurfaceKind::BumpedGrid { k, amplitude, m } => {
            let mut cols = Vec::with_capacity(*k);
            for q in 0..*k - 1 {
                let mut e = DVector::zeros(d);
                e[q] = 1.0;
                cols.push(e);
            }
            let slope = bump_slope(*amplitude, grid_pitch(*m), p[*k - 1]);
            let mut e = DVector::zeros(d);
            e[*k - 1] = 1.0;
            e[*k] = slope;
            cols.push(e.normalize());
            DMatrix::from_columns(&cols)
        }
    };
    AffineSubspace::new(base, basis)
}

/// How a ground-truth oracle computes distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    /// Closed-form expression.
    ClosedForm,
    /// Closed form after Newton inversion of an arc-length coordinate.
    NewtonInversion,
    /// Iterative midpoint refinement of an initial path.
    MidpointRefinement,
}

/// Ground-truth geodesic distances on an analytic surface.
#[derive(Debug)]
pub struct GroundTruthOracle {
    spec: SurfaceSpec,
    method: OracleMethod,
    torus_scaffold: OnceLock<TorusScaffold>,
}

impl GroundTruthOracle {
    /// Builds the oracle appropriate for the surface.
    pub fn new(spec: SurfaceSpec) -> Self {
        let method = match spec.kind {
            SurfaceKind::Sphere { .. }
            | SurfaceKind::FlatSquareK { .. }
            | SurfaceKind::BumpedGrid { .. } => OracleMethod::ClosedForm,
            SurfaceKind::SwissRoll { .. } => OracleMethod::NewtonInversion,
            SurfaceKind::Torus { .. } => OracleMethod::MidpointRefinement,
        };
        Self {
            spec,
            method,
            torus_scaffold: OnceLock::new(),
        }
    }

    /// The surface this oracle answers for.
    pub fn spec(&self) -> &SurfaceSpec {
        &self.spec
    }

    /// The computation method in use.
    pub fn method(&self) -> OracleMethod {
        self.method
    }

    fn check_on_surface(&self, p: &[f64]) -> Result<()> {
        let resid = on_surface_residual(&self.spec, p);
        if resid > ON_SURFACE_TOL {
            return Err(GeodesyError::invalid(format!(
                "query point is off the surface (residual {resid:.3e})"
            )));
        }
        Ok(())
    }

    /// Intrinsic distance between two on-surface points.
    pub fn distance(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.check_on_surface(x)?;
        self.check_on_surface(y)?;
        match &self.spec.kind {
            SurfaceKind::Sphere { radius } => {
                let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
                let c = (dot / (radius * radius)).clamp(-1.0, 1.0);
                Ok(radius * c.acos())
            }
            SurfaceKind::SwissRoll { .. } => {
                let s1 = swiss_arc_length((x[0] * x[0] + x[1] * x[1]).sqrt());
                let s2 = swiss_arc_length((y[0] * y[0] + y[1] * y[1]).sqrt());
                Ok(((s1 - s2).powi(2) + (x[2] - y[2]).powi(2)).sqrt())
            }
            SurfaceKind::FlatSquareK { k } => {
                let d2: f64 = (0..*k).map(|q| (x[q] - y[q]).powi(2)).sum();
                Ok(d2.sqrt())
            }
            SurfaceKind::BumpedGrid { k, amplitude, m } => {
                let eps = grid_pitch(*m);
                let mut d2: f64 = (0..*k - 1).map(|q| (x[q] - y[q]).powi(2)).sum();
                let l1 = bump_axis_arc_length(*amplitude, eps, x[*k - 1]);
                let l2 = bump_axis_arc_length(*amplitude, eps, y[*k - 1]);
                d2 += (l1 - l2).powi(2);
                Ok(d2.sqrt())
            }
            SurfaceKind::Torus { major, minor } => {
                // Canonical argument order makes symmetry exact.
                let (a, b) = if x
                    .iter()
                    .zip(y)
                    .find_map(|(xa, ya)| {
                        (xa != ya).then(|| xa.partial_cmp(ya).expect("finite"))
                    })
                    .unwrap_or(std::cmp::Ordering::Equal)
                    == std::cmp::Ordering::Greater
                {
                    (y, x)
                } else {
                    (x, y)
                };
                self.torus_distance(a, b, *major, *minor)
            }
        }
    }

    fn torus_distance(&self, x: &[f64], y: &[f64], major: f64, minor: f64) -> Result<f64> {
        let chord = dist3(x, y);
        if chord < 1e-14 {
            return Ok(0.0);
        }
        let scaffold = self
            .torus_scaffold
            .get_or_init(|| TorusScaffold::build(major, minor));
        let init = scaffold.initial_path(x, y);
        refine_torus_path(init, major, minor)
    }
}

/// Intrinsic distance between two on-surface points (free-function form).
pub fn true_distance(oracle: &GroundTruthOracle, x: &[f64], y: &[f64]) -> Result<f64> {
    oracle.distance(x, y)
}

/// Isometric (flattening) coordinates for surfaces that admit them globally:
/// the Swiss roll, flat cube faces, and bumped grids.
pub fn isometric_coords(spec: &SurfaceSpec, p: &[f64]) -> Result<Vec<f64>> {
    let resid = on_surface_residual(spec, p);
    if resid > ON_SURFACE_TOL {
        return Err(GeodesyError::invalid(format!(
            "point is off the surface (residual {resid:.3e})"
        )));
    }
    match &spec.kind {
        SurfaceKind::SwissRoll { .. } => {
            let u = (p[0] * p[0] + p[1] * p[1]).sqrt();
            Ok(vec![swiss_arc_length(u), p[2]])
        }
        SurfaceKind::FlatSquareK { k } => Ok(p[..*k].to_vec()),
        SurfaceKind::BumpedGrid { k, amplitude, m } => {
            let mut c = p[..*k - 1].to_vec();
            c.push(bump_axis_arc_length(*amplitude, grid_pitch(*m), p[*k - 1]));
            Ok(c)
        }
        SurfaceKind::Sphere { .. } | SurfaceKind::Torus { .. } => Err(GeodesyError::invalid(
            "surface has no global isometric coordinates",
        )),
    }
}

// ---------------------------------------------------------------------------
// Swiss roll arc length and inversion
// ---------------------------------------------------------------------------

/// Arc length of the spiral (t·cos t, t·sin t) from 0 to `u`.
pub fn swiss_arc_length(u: f64) -> f64 {
    0.5 * u * (1.0 + u * u).sqrt() + 0.5 * u.asinh()
}

/// Inverts the spiral arc length by Newton's method to 1e-12.
pub fn swiss_u_from_arc(s: f64, u_min: f64, u_max: f64) -> f64 {
    // s(u) ≈ u²/2 for large u, so √(2s) is an excellent starting point.
    let mut u = (2.0 * s.max(0.0)).sqrt().clamp(u_min, u_max);
    for _ in 0..100 {
        let f = swiss_arc_length(u) - s;
        if f.abs() < 1e-12 {
            break;
        }
        u = (u - f / (1.0 + u * u).sqrt()).clamp(u_min, u_max);
    }
    u
}

// ---------------------------------------------------------------------------
// Euclidean distance to a surface
// ---------------------------------------------------------------------------

/// Golden-section minimization of `f` on `[lo, hi]`.
fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..90 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    f(0.5 * (lo + hi))
}

/// Coarse scan over `steps + 1` samples of `[lo, hi]` followed by a
/// golden-section refinement around the best bracket.
fn scan_min(f: impl Fn(f64) -> f64 + Copy, lo: f64, hi: f64, steps: usize) -> f64 {
    let pitch = (hi - lo) / steps as f64;
    let mut best = (f(lo), 0);
    for i in 1..=steps {
        let v = f(lo + pitch * i as f64);
        if v < best.0 {
            best = (v, i);
        }
    }
    let b_lo = lo + pitch * best.1.saturating_sub(1) as f64;
    let b_hi = (lo + pitch * (best.1 + 1) as f64).min(hi);
    golden_min(f, b_lo, b_hi)
}

/// Distance from `t` to the interval `[0, 1]`.
fn unit_clamp_excess(t: f64) -> f64 {
    (t - t.clamp(0.0, 1.0)).abs()
}

/// Exact Euclidean distance from an ambient point to the surface (numeric
/// one-dimensional minimization where no closed form exists).
pub fn surface_distance(spec: &SurfaceSpec, p: &[f64]) -> Result<f64> {
    if p.len() != spec.ambient_dim() {
        return Err(GeodesyError::invalid(format!(
            "point dimension {} does not match ambient dimension {}",
            p.len(),
            spec.ambient_dim()
        )));
    }
    match &spec.kind {
        SurfaceKind::Sphere { radius } => {
            let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            Ok((n - radius).abs())
        }
        SurfaceKind::Torus { major, minor } => {
            let rho = (p[0] * p[0] + p[1] * p[1]).sqrt();
            Ok((((rho - major).powi(2) + p[2] * p[2]).sqrt() - minor).abs())
        }
        SurfaceKind::SwissRoll { u_min, u_max, height } => {
            let dz = p[2] - p[2].clamp(0.0, *height);
            let spiral_sq = |u: f64| {
                let dx = p[0] - u * u.cos();
                let dy = p[1] - u * u.sin();
                dx * dx + dy * dy
            };
            let best = scan_min(&spiral_sq, *u_min, *u_max, 400);
            Ok((best + dz * dz).sqrt())
        }
        SurfaceKind::FlatSquareK { k } => {
            let mut sq = p[*k] * p[*k];
            for q in 0..*k {
                let e = unit_clamp_excess(p[q]);
                sq += e * e;
            }
            Ok(sq.sqrt())
        }
        SurfaceKind::BumpedGrid { k, amplitude, m } => {
            let eps = grid_pitch(*m);
            let mut sq = 0.0;
            for q in 0..k - 1 {
                let e = unit_clamp_excess(p[q]);
                sq += e * e;
            }
            // Remaining coordinates: distance to the profile (t, h(t)).
            let (pt, pz) = (p[*k - 1], p[*k]);
            let profile_sq = |t: f64| {
                let dh = pz - bump_height(*amplitude, eps, t);
                (pt - t) * (pt - t) + dh * dh
            };
            let steps = 400.max(40 * (*m - 1));
            let best = scan_min(&profile_sq, 0.0, 1.0, steps);
            Ok((sq + best).sqrt())
        }
    }
}

// ---------------------------------------------------------------------------
// Tri-cube bumps
// ---------------------------------------------------------------------------

/// Tri-cube window `w(t) = (1 − |t|³)₊³`.
pub fn tricube(t: f64) -> f64 {
    let a = 1.0 - t.abs().powi(3);
    if a <= 0.0 {
        0.0
    } else {
        a.powi(3)
    }
}

/// Derivative of the tri-cube window: `w′(t) = −9 t |t| (1 − |t|³)²`.
pub fn tricube_prime(t: f64) -> f64 {
    let a = 1.0 - t.abs().powi(3);
    if a <= 0.0 {
        0.0
    } else {
        -9.0 * t * t.abs() * a * a
    }
}

/// Bump height at axis position `t ∈ [0,1]`: one tri-cube bump of amplitude
/// `A(ε/2)²` per grid cell, vanishing at the grid nodes.
fn bump_height(amplitude: f64, eps: f64, t: f64) -> f64 {
    let (_, frac) = bump_cell(eps, t);
    amplitude * (eps / 2.0) * (eps / 2.0) * tricube(2.0 * frac / eps - 1.0)
}

/// Slope of the bump profile at axis position `t`.
fn bump_slope(amplitude: f64, eps: f64, t: f64) -> f64 {
    let (_, frac) = bump_cell(eps, t);
    amplitude * (eps / 2.0) * tricube_prime(2.0 * frac / eps - 1.0)
}

fn bump_cell(eps: f64, t: f64) -> (usize, f64) {
    let cells = (1.0 / eps).round() as usize; // m - 1 cells
    let i = ((t / eps).floor() as usize).min(cells.saturating_sub(1));
    (i, t - i as f64 * eps)
}

/// Arc length of one bump cell: the graph of `t ↦ A(ε/2)²·w(2t/ε − 1)` over
/// `[0, ε]`, by adaptive quadrature to relative tolerance 1e-10.
pub fn bump_arc_length(amplitude: f64, eps: f64) -> Result<f64> {
    if !(amplitude >= 0.0) || !amplitude.is_finite() {
        return Err(GeodesyError::invalid("bump amplitude must be nonnegative"));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(GeodesyError::invalid("bump cell width must lie in (0, 1)"));
    }
    if amplitude == 0.0 {
        return Ok(eps);
    }
    let f = |t: f64| (1.0 + bump_slope(amplitude, eps, t).powi(2)).sqrt();
    Ok(adaptive_simpson(&f, 0.0, eps, 1e-10))
}

/// Arc length along the bumped axis from 0 to `t` (whole cells use the exact
/// per-cell length, the final partial cell is integrated directly).
fn bump_axis_arc_length(amplitude: f64, eps: f64, t: f64) -> f64 {
    if amplitude == 0.0 {
        return t;
    }
    let eta = bump_arc_length(amplitude, eps).expect("validated parameters");
    let (i, frac) = bump_cell(eps, t);
    let f = |s: f64| (1.0 + bump_slope(amplitude, eps, s).powi(2)).sqrt();
    let partial = if frac > 0.0 {
        adaptive_simpson(&f, 0.0, frac.min(eps), 1e-10)
    } else {
        0.0
    };
    i as f64 * eta + partial
}

/// Coefficient of `ε³` in the bump cell's excess length `η − ε`:
/// `(A²/16)·∫₋₁¹ w′(t)² dt`.
pub fn bump_arc_cubic_coefficient(amplitude: f64) -> f64 {
    let f = |t: f64| tricube_prime(t).powi(2);
    amplitude * amplitude / 16.0 * adaptive_simpson(&f, -1.0, 1.0, 1e-12)
}

/// Coefficient of `ε⁵` in the expansion `η ≈ ε + C₁ε³ − C₂ε⁵`:
/// `(A⁴/256)·∫₋₁¹ w′(t)⁴ dt`.
pub fn bump_arc_quintic_coefficient(amplitude: f64) -> f64 {
    let f = |t: f64| tricube_prime(t).powi(4);
    amplitude.powi(4) / 256.0 * adaptive_simpson(&f, -1.0, 1.0, 1e-12)
}

/// Adaptive Simpson quadrature with a relative tolerance.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    fn simpson(f: &impl Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
            + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    let scale = whole.abs().max((b - a).abs());
    recurse(f, a, fa, b, fb, whole, m, fm, rel_tol * scale, 48)
}

// ---------------------------------------------------------------------------
// Lower-bound surface pair
// ---------------------------------------------------------------------------

/// Regular grid cloud shared by a flat cube face and its bumped counterpart,
/// with both intrinsic distance matrices and both isometric embeddings.
pub fn lower_bound_pair(
    k: usize,
    m: usize,
    amplitude: f64,
) -> Result<(PointCloud, DistanceMatrix, DistanceMatrix, Embedding, Embedding)> {
    if m < 3 {
        return Err(GeodesyError::invalid("grid resolution must be at least 3"));
    }
    if k == 0 {
        return Err(GeodesyError::invalid("dimension must be at least 1"));
    }
    let n = m.pow(k as u32);
    if n > 100_000 {
        return Err(GeodesyError::invalid(format!(
            "grid of m^k = {n} points is beyond desk scale"
        )));
    }
    let eps = grid_pitch(m);
    let eta = bump_arc_length(amplitude, eps)?;

    let flat = SurfaceSpec::flat_square(k)?;
    let cloud = sample(&flat, n, 0, SampleMode::RegularGrid)?;

    // Multi-indices in the same odometer order as the sampler.
    let indices: Vec<Vec<usize>> = (0..n)
        .map(|mut flat_idx| {
            let mut iv = vec![0usize; k];
            for q in (0..k).rev() {
                iv[q] = flat_idx % m;
                flat_idx /= m;
            }
            iv
        })
        .collect();

    let d1 = DistanceMatrix::from_fn(n, |i, j| {
        let s: f64 = (0..k)
            .map(|q| {
                let d = indices[i][q] as f64 - indices[j][q] as f64;
                d * d * eps * eps
            })
            .sum();
        s.sqrt()
    })?;
    let d2 = DistanceMatrix::from_fn(n, |i, j| {
        let mut s: f64 = (0..k - 1)
            .map(|q| {
                let d = indices[i][q] as f64 - indices[j][q] as f64;
                d * d * eps * eps
            })
            .sum();
        let dk = indices[i][k - 1] as f64 - indices[j][k - 1] as f64;
        s += dk * dk * eta * eta;
        s.sqrt()
    })?;

    let u1 = Embedding::from_rows(
        &indices
            .iter()
            .map(|iv| iv.iter().map(|&i| i as f64 * eps).collect::<Vec<f64>>())
            .collect::<Vec<_>>(),
        "flat_grid",
    )?;
    let u2 = Embedding::from_rows(
        &indices
            .iter()
            .map(|iv| {
                let mut c: Vec<f64> = iv[..k - 1].iter().map(|&i| i as f64 * eps).collect();
                c.push(iv[k - 1] as f64 * eta);
                c
            })
            .collect::<Vec<_>>(),
        "bumped_grid",
    )?;
    Ok((cloud, d1, d2, u1, u2))
}

// ---------------------------------------------------------------------------
// Torus oracle internals
// ---------------------------------------------------------------------------

#[derive(Debug)]
struct TorusScaffold {
    points: Vec<[f64; 3]>,
    adj: Vec<Vec<(usize, f64)>>,
    radius: f64,
}

impl TorusScaffold {
    fn build(major: f64, minor: f64) -> Self {
        let spec = SurfaceSpec::torus_with(major, minor).expect("validated by the oracle");
        let cloud = sample(&spec, TORUS_SCAFFOLD_N, TORUS_SCAFFOLD_SEED, SampleMode::AreaUniform)
            .expect("scaffold sampling parameters are valid");
        let points: Vec<[f64; 3]> = (0..cloud.len())
            .map(|i| {
                let p = cloud.point(i);
                [p[0], p[1], p[2]]
            })
            .collect();

        let n = points.len();
        let area = 4.0 * std::f64::consts::PI.powi(2) * major * minor;
        let mut radius = 2.5 * (area / n as f64).sqrt();
        loop {
            let mut adj = vec![Vec::new(); n];
            for i in 0..n {
                for j in i + 1..n {
                    let d = dist3(&points[i], &points[j]);
                    if d <= radius {
                        adj[i].push((j, d));
                        adj[j].push((i, d));
                    }
                }
            }
            if connected(&adj) {
                return Self { points, adj, radius };
            }
            radius *= 1.3;
        }
    }

    /// Shortest scaffold path from `x` to `y`, as a polyline of on-torus
    /// points (plus the exact endpoints).
    fn initial_path(&self, x: &[f64], y: &[f64]) -> Vec<[f64; 3]> {
        let n = self.points.len();
        let mut adj = self.adj.clone();
        adj.push(Vec::new()); // node n: x
        adj.push(Vec::new()); // node n + 1: y
        let xp = [x[0], x[1], x[2]];
        let yp = [y[0], y[1], y[2]];
        for (node, p) in [(n, xp), (n + 1, yp)] {
            let mut dists: Vec<(f64, usize)> = self
                .points
                .iter()
                .enumerate()
                .map(|(i, q)| (dist3(&p, q), i))
                .collect();
            dists.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
            let within = dists.iter().take_while(|(d, _)| *d <= self.radius).count();
            for &(d, i) in dists.iter().take(within.max(3)) {
                adj[node].push((i, d));
                adj[i].push((node, d));
            }
        }
        let direct = dist3(&xp, &yp);
        if direct <= self.radius {
            adj[n].push((n + 1, direct));
            adj[n + 1].push((n, direct));
        }

        let (dist, prev) = dijkstra_adjacency(&adj, n);
        debug_assert!(dist[n + 1].is_finite(), "scaffold graph is connected");
        let mut chain = vec![n + 1];
        while let Some(p) = prev[*chain.last().expect("nonempty")] {
            chain.push(p);
        }
        chain.reverse();
        chain
            .into_iter()
            .map(|i| {
                if i == n {
                    xp
                } else if i == n + 1 {
                    yp
                } else {
                    self.points[i]
                }
            })
            .collect()
    }
}

fn connected(adj: &[Vec<(usize, f64)>]) -> bool {
    let n = adj.len();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(i) = stack.pop() {
        for &(j, _) in &adj[i] {
            if !seen[j] {
                seen[j] = true;
                count += 1;
                stack.push(j);
            }
        }
    }
    count == n
}

/// Plain binary-heap Dijkstra over an adjacency list (oracle-internal).
fn dijkstra_adjacency(adj: &[Vec<(usize, f64)>], source: usize) -> (Vec<f64>, Vec<Option<usize>>) {
    #[derive(PartialEq)]
    struct Entry(f64, usize);
    impl Eq for Entry {}
    impl PartialOrd for Entry {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Entry {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            // Reversed for a min-heap.
            other
                .0
                .partial_cmp(&self.0)
                .expect("finite")
                .then(other.1.cmp(&self.1))
        }
    }

    let n = adj.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut prev: Vec<Option<usize>> = vec![None; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Entry(0.0, source));
    while let Some(Entry(d, i)) = heap.pop() {
        if d > dist[i] {
            continue;
        }
        for &(j, w) in &adj[i] {
            let nd = d + w;
            if nd < dist[j] {
                dist[j] = nd;
                prev[j] = Some(i);
                heap.push(Entry(nd, j));
            }
        }
    }
    (dist, prev)
}

fn dist3(a: &[f64], b: &[f64]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn project_to_torus(p: [f64; 3], major: f64, minor: f64) -> [f64; 3] {
    let rho = (p[0] * p[0] + p[1] * p[1]).sqrt();
    if rho < 1e-12 {
        // On the symmetry axis: snap deterministically to u = 0.
        let w = [-major, 0.0, p[2]];
        let wl = (w[0] * w[0] + w[2] * w[2]).sqrt();
        return [major + minor * w[0] / wl, 0.0, minor * w[2] / wl];
    }
    let cx = major * p[0] / rho;
    let cy = major * p[1] / rho;
    let wx = p[0] - cx;
    let wy = p[1] - cy;
    let wz = p[2];
    let wl = (wx * wx + wy * wy + wz * wz).sqrt();
    if wl < 1e-12 {
        // On the core circle: snap outward.
        let s = (major + minor) / major;
        return [cx * s, cy * s, 0.0];
    }
    [cx + minor * wx / wl, cy + minor * wy / wl, minor * wz / wl]
}

fn polyline_len3(path: &[[f64; 3]]) -> f64 {
    path.windows(2).map(|w| dist3(&w[0], &w[1])).sum()
}

/// One projected-midpoint relaxation stage: every interior vertex moves to
/// the torus projection of its neighbors' midpoint until the length settles.
fn relax_torus_path(path: &mut [[f64; 3]], major: f64, minor: f64, max_passes: usize) {
    let mut prev = polyline_len3(path);
    for _ in 0..max_passes {
        for i in 1..path.len() - 1 {
            let mid = [
                0.5 * (path[i - 1][0] + path[i + 1][0]),
                0.5 * (path[i - 1][1] + path[i + 1][1]),
                0.5 * (path[i - 1][2] + path[i + 1][2]),
            ];
            path[i] = project_to_torus(mid, major, minor);
        }
        let len = polyline_len3(path);
        if (prev - len).abs() <= 1e-10 * len.max(1e-300) {
            break;
        }
        prev = len;
    }
}

fn bisect_torus_path(path: &[[f64; 3]], major: f64, minor: f64) -> Vec<[f64; 3]> {
    let mut out = Vec::with_capacity(path.len() * 2 - 1);
    for i in 0..path.len() - 1 {
        out.push(path[i]);
        let mid = [
            0.5 * (path[i][0] + path[i + 1][0]),
            0.5 * (path[i][1] + path[i + 1][1]),
            0.5 * (path[i][2] + path[i + 1][2]),
        ];
        out.push(project_to_torus(mid, major, minor));
    }
    out.push(*path.last().expect("nonempty"));
    out
}

/// Midpoint refinement: alternate segment bisection (with on-surface
/// re-projection) and projected-midpoint relaxation until the polyline length
/// changes by less than 1e-8 relative between sweeps.
fn refine_torus_path(init: Vec<[f64; 3]>, major: f64, minor: f64) -> Result<f64> {
    const MAX_SWEEPS: usize = 60;
    const MAX_SEGMENTS: usize = 1 << 20;
    const COARSE_SEGMENTS: usize = 8;

    // Resample the graph path down to a handful of segments so the global
    // shape converges fast, then refine upward.
    let mut path = resample_path(&init, COARSE_SEGMENTS, major, minor);
    relax_torus_path(&mut path, major, minor, 2000);
    let mut prev_len = polyline_len3(&path);

    for _sweep in 0..MAX_SWEEPS {
        if path.len() - 1 < MAX_SEGMENTS {
            path = bisect_torus_path(&path, major, minor);
        }
        relax_torus_path(&mut path, major, minor, 40);
        let len = polyline_len3(&path);
        if (len - prev_len).abs() <= 1e-8 * len.max(1e-300) {
            return Ok(len);
        }
        prev_len = len;
    }
    Err(GeodesyError::Convergence {
        context: "torus midpoint refinement".into(),
        iterations: MAX_SWEEPS,
        best: prev_len,
    })
}

/// Arc-length-uniform resampling of a polyline onto `segments` segments,
/// with interior vertices re-projected onto the torus.
fn resample_path(path: &[[f64; 3]], segments: usize, major: f64, minor: f64) -> Vec<[f64; 3]> {
    let total = polyline_len3(path);
    if total <= 0.0 || path.len() == 2 {
        let mut out = Vec::with_capacity(segments + 1);
        for t in 0..=segments {
            let f = t as f64 / segments as f64;
            let p = [
                path[0][0] + f * (path[path.len() - 1][0] - path[0][0]),
                path[0][1] + f * (path[path.len() - 1][1] - path[0][1]),
                path[0][2] + f * (path[path.len() - 1][2] - path[0][2]),
            ];
            out.push(if t == 0 || t == segments {
                p
            } else {
                project_to_torus(p, major, minor)
            });
        }
        return out;
    }
    let mut cumulative = Vec::with_capacity(path.len());
    let mut acc = 0.0;
    cumulative.push(0.0);
    for w in path.windows(2) {
        acc += dist3(&w[0], &w[1]);
        cumulative.push(acc);
    }
    let mut out = Vec::with_capacity(segments + 1);
    out.push(path[0]);
    let mut seg = 0usize;
    for t in 1..segments {
        let target = total * t as f64 / segments as f64;
        while seg + 1 < cumulative.len() - 1 && cumulative[seg + 1] < target {
            seg += 1;
        }
        let span = (cumulative[seg + 1] - cumulative[seg]).max(1e-300);
        let f = (target - cumulative[seg]) / span;
        let p = [
            path[seg][0] + f * (path[seg + 1][0] - path[seg][0]),
            path[seg][1] + f * (path[seg + 1][1] - path[seg][1]),
            path[seg][2] + f * (path[seg + 1][2] - path[seg][2]),
        ];
        out.push(project_to_torus(p, major, minor));
    }
    out.push(*path.last().expect("nonempty"));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::index::sample as index_sample;

    fn specs_under_test() -> Vec<(SurfaceSpec, SampleMode)> {
        vec![
            (SurfaceSpec::sphere(1.0).unwrap(), SampleMode::AreaUniform),
            (SurfaceSpec::sphere(2.5).unwrap(), SampleMode::ParamUniform),
            (SurfaceSpec::torus(), SampleMode::AreaUniform),
            (SurfaceSpec::torus(), SampleMode::ParamUniform),
            (SurfaceSpec::swiss_roll(), SampleMode::ParamUniform),
            (SurfaceSpec::swiss_roll(), SampleMode::AreaUniform),
            (SurfaceSpec::flat_square(2).unwrap(), SampleMode::ParamUniform),
            (
                SurfaceSpec::bumped_grid(2, 1.0, 11).unwrap(),
                SampleMode::ParamUniform,
            ),
            (
                SurfaceSpec::bumped_grid(2, 1.0, 11).unwrap(),
                SampleMode::AreaUniform,
            ),
        ]
    }

    #[test]
    fn sampled_points_lie_on_their_surfaces() {
        for (spec, mode) in specs_under_test() {
            let cloud = sample(&spec, 200, 42, mode).unwrap();
            assert_eq!(cloud.len(), 200);
            assert_eq!(cloud.dim(), spec.ambient_dim());
            assert_eq!(cloud.intrinsic_dim, spec.intrinsic_dim());
            for p in cloud.iter() {
                let r = on_surface_residual(&spec, p);
                assert!(r <= 1e-12, "{} residual {r}", spec.name());
            }
        }
    }

    #[test]
    fn sampling_is_deterministic_in_the_seed() {
        let spec = SurfaceSpec::torus();
        let a = sample(&spec, 64, 7, SampleMode::AreaUniform).unwrap();
        let b = sample(&spec, 64, 7, SampleMode::AreaUniform).unwrap();
        let c = sample(&spec, 64, 8, SampleMode::AreaUniform).unwrap();
        for i in 0..64 {
            assert_eq!(a.point(i), b.point(i));
        }
        assert!((0..64).any(|i| a.point(i) != c.point(i)));
    }

    #[test]
    fn paper_sphere_map_covers_a_hemisphere_only() {
        let spec = SurfaceSpec::sphere(1.0).unwrap();
        let literal = sample(&spec, 300, 3, SampleMode::ParamUniform).unwrap();
        assert!(literal.iter().all(|p| p[2] >= 0.0));
        let area = sample(&spec, 300, 3, SampleMode::AreaUniform).unwrap();
        assert!(area.iter().any(|p| p[2] > 0.0) && area.iter().any(|p| p[2] < 0.0));
    }

    #[test]
    fn regular_grid_flat_square_is_exact() {
        let spec = SurfaceSpec::flat_square(2).unwrap();
        let cloud = sample(&spec, 9, 0, SampleMode::RegularGrid).unwrap();
        let mut got: Vec<(f64, f64, f64)> = cloud.iter().map(|p| (p[0], p[1], p[2])).collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut want = Vec::new();
        for x in [0.0, 0.5, 1.0] {
            for y in [0.0, 0.5, 1.0] {
                want.push((x, y, 0.0));
            }
        }
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(got, want);
    }

    #[test]
    fn regular_grid_rejects_bad_requests() {
        let sphere = SurfaceSpec::sphere(1.0).unwrap();
        assert!(sample(&sphere, 9, 0, SampleMode::RegularGrid).is_err());
        let flat = SurfaceSpec::flat_square(2).unwrap();
        assert!(sample(&flat, 10, 0, SampleMode::RegularGrid).is_err());
        let bumped = SurfaceSpec::bumped_grid(2, 1.0, 5).unwrap();
        assert!(sample(&bumped, 24, 0, SampleMode::RegularGrid).is_err());
        assert!(sample(&bumped, 25, 0, SampleMode::RegularGrid).is_ok());
    }

    #[test]
    fn sphere_oracle_matches_great_circles() {
        let oracle = GroundTruthOracle::new(SurfaceSpec::sphere(1.0).unwrap());
        assert_eq!(oracle.method(), OracleMethod::ClosedForm);
        let d = oracle
            .distance(&[1.0, 0.0, 0.0], &[-1.0, 0.0, 0.0])
            .unwrap();
        assert!((d - std::f64::consts::PI).abs() < 1e-12);
        let d = oracle.distance(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap();
        assert!((d - std::f64::consts::FRAC_PI_2).abs() < 1e-12);

        let big = GroundTruthOracle::new(SurfaceSpec::sphere(2.0).unwrap());
        let d = big.distance(&[2.0, 0.0, 0.0], &[-2.0, 0.0, 0.0]).unwrap();
        assert!((d - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn oracle_rejects_off_surface_points() {
        let oracle = GroundTruthOracle::new(SurfaceSpec::sphere(1.0).unwrap());
        let err = oracle.distance(&[1.001, 0.0, 0.0], &[0.0, 1.0, 0.0]);
        assert!(err.is_err());
    }

    #[test]
    fn swiss_roll_oracle_is_euclidean_in_arc_length_coordinates() {
        let oracle = GroundTruthOracle::new(SurfaceSpec::swiss_roll());
        assert_eq!(oracle.method(), OracleMethod::NewtonInversion);
        let cases = [(1.0, 0.2, 2.0, 0.9), (2.5, 0.0, 6.0, 1.0), (0.8, 0.5, 0.8, 0.1)];
        for (u1, z1, u2, z2) in cases {
            let x = [u1 * f64::cos(u1), u1 * f64::sin(u1), z1];
            let y = [u2 * f64::cos(u2), u2 * f64::sin(u2), z2];
            let want = ((swiss_arc_length(u1) - swiss_arc_length(u2)).powi(2)
                + (z1 - z2).powi(2))
            .sqrt();
            let got = oracle.distance(&x, &y).unwrap();
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn swiss_arc_length_inverts_to_newton_tolerance() {
        let (u_min, u_max) = (std::f64::consts::FRAC_PI_4, 2.25 * std::f64::consts::PI);
        for t in 0..=50 {
            let u = u_min + (u_max - u_min) * t as f64 / 50.0;
            let back = swiss_u_from_arc(swiss_arc_length(u), u_min, u_max);
            assert!((back - u).abs() < 1e-10, "u={u} back={back}");
        }
    }

    #[test]
    fn torus_oracle_matches_outer_equator_arcs() {
        let oracle = GroundTruthOracle::new(SurfaceSpec::torus());
        assert_eq!(oracle.method(), OracleMethod::MidpointRefinement);
        for du in [0.05, 0.1, 0.2] {
            let x = [3.0, 0.0, 0.0];
            let y = [3.0 * f64::cos(du), 3.0 * f64::sin(du), 0.0];
            let d = oracle.distance(&x, &y).unwrap();
            assert!(
                (d - 3.0 * du).abs() < 1e-5,
                "du={du}: got {d}, want {}",
                3.0 * du
            );
        }
    }

    #[test]
    fn oracle_metric_properties_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for (spec, mode, pool, pair_tol, tri_tol) in [
            (SurfaceSpec::sphere(1.0).unwrap(), SampleMode::AreaUniform, 40, 0.0, 1e-6),
            (SurfaceSpec::swiss_roll(), SampleMode::ParamUniform, 40, 0.0, 1e-6),
            (SurfaceSpec::flat_square(2).unwrap(), SampleMode::ParamUniform, 40, 0.0, 1e-6),
            (SurfaceSpec::torus(), SampleMode::AreaUniform, 36, 1e-8, 1e-5),
        ] {
            let oracle = GroundTruthOracle::new(spec.clone());
            let cloud = sample(&spec, pool, 99, mode).unwrap();
            let n = cloud.len();
            let mut d = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in i + 1..n {
                    let fwd = oracle.distance(cloud.point(i), cloud.point(j)).unwrap();
                    let bwd = oracle.distance(cloud.point(j), cloud.point(i)).unwrap();
                    assert!(
                        (fwd - bwd).abs() <= pair_tol,
                        "{}: symmetry violated by {}",
                        spec.name(),
                        (fwd - bwd).abs()
                    );
                    let chord = cloud.dist(i, j);
                    assert!(
                        fwd >= chord - 1e-9,
                        "{}: geodesic {fwd} below chord {chord}",
                        spec.name()
                    );
                    d[i][j] = fwd;
                    d[j][i] = fwd;
                }
            }
            for _ in 0..1000 {
                let idx = index_sample(&mut rng, n, 3).into_vec();
                let (a, b, c) = (idx[0], idx[1], idx[2]);
                assert!(
                    d[a][c] <= d[a][b] + d[b][c] + tri_tol,
                    "{}: triangle violated: d({a},{c})={} vs {}",
                    spec.name(),
                    d[a][c],
                    d[a][b] + d[b][c]
                );
            }
        }
    }

    #[test]
    fn bump_arc_length_hand_values() {
        // Flat bumps measure the cell exactly.
        assert_eq!(bump_arc_length(0.0, 0.25).unwrap(), 0.25);

        // Quadrature oracle: ∫₋₁¹ w′² = 3⁹/6545 (expanded termwise).
        let integral = adaptive_simpson(&|t: f64| tricube_prime(t).powi(2), -1.0, 1.0, 1e-12);
        let exact = 19683.0 / 6545.0;
        assert!(
            (integral - exact).abs() < 1e-9 * exact,
            "quadrature {integral} vs exact {exact}"
        );

        // A=1, ε=0.1: η exceeds ε by ≤ C₁ε³.
        let c1 = bump_arc_cubic_coefficient(1.0);
        assert!((c1 - exact / 16.0).abs() < 1e-10);
        let eta = bump_arc_length(1.0, 0.1).unwrap();
        assert!(eta > 0.1);
        assert!(eta <= 0.1 + c1 * 1e-3 + 1e-15, "eta={eta}");

        // Cubic scaling of the excess across halved widths.
        let ratios: Vec<f64> = [0.1, 0.05, 0.025]
            .iter()
            .map(|&e| (bump_arc_length(1.0, e).unwrap() - e) / e.powi(3))
            .collect();
        for pair in ratios.windows(2) {
            assert!(
                (pair[0] - pair[1]).abs() / pair[1] < 0.01,
                "ratios {ratios:?}"
            );
        }

        assert!(bump_arc_length(-1.0, 0.1).is_err());
        assert!(bump_arc_length(1.0, 0.0).is_err());
        assert!(bump_arc_length(1.0, 1.0).is_err());
    }

    #[test]
    fn bumped_grid_oracle_accumulates_cell_lengths() {
        let spec = SurfaceSpec::bumped_grid(1, 1.0, 5).unwrap();
        let oracle = GroundTruthOracle::new(spec);
        let eps = 0.25;
        let eta = bump_arc_length(1.0, eps).unwrap();
        // Distance between consecutive grid nodes along the bumped axis.
        let x = [0.0, 0.0];
        let y = [eps, 0.0];
        let d = oracle.distance(&x, &y).unwrap();
        assert!((d - eta).abs() < 1e-12);
        let z = [3.0 * eps, 0.0];
        let d = oracle.distance(&x, &z).unwrap();
        assert!((d - 3.0 * eta).abs() < 1e-12);
    }

    #[test]
    fn lower_bound_pair_matches_displayed_formulas() {
        // k=1: every pair distance on the bumped side is a multiple of η.
        let (cloud, d1, d2, u1, u2) = lower_bound_pair(1, 11, 1.0).unwrap();
        let eps = 0.1;
        let eta = bump_arc_length(1.0, eps).unwrap();
        assert_eq!(cloud.len(), 11);
        for i in 0..11 {
            assert_eq!(d2.get(i, i), Some(0.0));
            for j in i + 1..11 {
                let gap = (j - i) as f64;
                assert!((d1.get(i, j).unwrap() - gap * eps).abs() < 1e-12);
                assert!((d2.get(i, j).unwrap() - gap * eta).abs() < 1e-12);
                assert!((u1.dist(i, j) - gap * eps).abs() < 1e-12);
                assert!((u2.dist(i, j) - gap * eta).abs() < 1e-12);
            }
        }

        // The embeddings are isometric for their matrices.
        let (_, d1, d2, u1, u2) = lower_bound_pair(2, 7, 1.0).unwrap();
        let n = u1.len();
        for i in 0..n {
            for j in i + 1..n {
                assert!((u1.dist(i, j) - d1.get(i, j).unwrap()).abs() < 1e-12);
                assert!((u2.dist(i, j) - d2.get(i, j).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn lower_bound_separation_bounds_hold() {
        let c1 = bump_arc_cubic_coefficient(1.0);

        // k=1: d₂ − d₁ ≥ ½C₁ε²·d₁ for all pairs.
        let (_, d1, d2, _, _) = lower_bound_pair(1, 21, 1.0).unwrap();
        let eps = 1.0 / 20.0;
        for i in 0..21 {
            for j in i + 1..21 {
                let a = d1.get(i, j).unwrap();
                let b = d2.get(i, j).unwrap();
                assert!(b - a >= 0.5 * c1 * eps * eps * a - 1e-15);
            }
        }

        // k=2: the bound carries the squared cosine of the pair's angle to
        // the bumped axis.
        let m = 11;
        let (_, d1, d2, _, _) = lower_bound_pair(2, m, 1.0).unwrap();
        let eps = 1.0 / (m as f64 - 1.0);
        for i in 0..m * m {
            for j in i + 1..m * m {
                let (i0, i1) = (i / m, i % m);
                let (j0, j1) = (j / m, j % m);
                let a = d1.get(i, j).unwrap();
                let b = d2.get(i, j).unwrap();
                if i1 == j1 {
                    assert!((b - a).abs() < 1e-12, "axis-orthogonal pairs keep d₁");
                    continue;
                }
                let dk = (i1 as f64 - j1 as f64) * eps;
                let beta2 = dk * dk / (a * a);
                assert!(
                    b - a >= c1 * eps * eps * beta2 * a / 3.0 - 1e-15,
                    "pair ({i0},{i1})-({j0},{j1}): gap {} vs bound {}",
                    b - a,
                    c1 * eps * eps * beta2 * a / 3.0
                );
            }
        }

        assert!(lower_bound_pair(1, 2, 1.0).is_err());
    }

    #[test]
    fn isometric_coordinates_flatten_known_surfaces() {
        let swiss = SurfaceSpec::swiss_roll();
        let u = 2.0;
        let p = [u * f64::cos(u), u * f64::sin(u), 0.7];
        let c = isometric_coords(&swiss, &p).unwrap();
        assert!((c[0] - swiss_arc_length(u)).abs() < 1e-12);
        assert!((c[1] - 0.7).abs() < 1e-15);

        let flat = SurfaceSpec::flat_square(2).unwrap();
        let c = isometric_coords(&flat, &[0.3, 0.4, 0.0]).unwrap();
        assert_eq!(c, vec![0.3, 0.4]);

        let sphere = SurfaceSpec::sphere(1.0).unwrap();
        assert!(isometric_coords(&sphere, &[1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn analytic_tangents_match_finite_differences() {
        use crate::geometry::subspace_angle;

        let h = 1e-6;
        // Torus tangent at a generic parameter point.
        let (r_maj, r_min) = (2.0, 1.0);
        let (u, v) = (0.8, 2.1);
        let p = torus_point(r_maj, r_min, u, v);
        let spec = SurfaceSpec::torus();
        let t = analytic_tangent(&spec, &p).unwrap();
        let du = central_diff(|s| torus_point(r_maj, r_min, s, v), u, h);
        let dv = central_diff(|s| torus_point(r_maj, r_min, u, s), v, h);
        let numeric = AffineSubspace::from_spanning(
            DVector::from_column_slice(&p),
            &DMatrix::from_columns(&[
                DVector::from_column_slice(&du),
                DVector::from_column_slice(&dv),
            ]),
        )
        .unwrap();
        assert!(subspace_angle(&t, &numeric).unwrap() < 1e-7);

        // Swiss roll tangent.
        let u = 3.0;
        let p = [u * f64::cos(u), u * f64::sin(u), 0.5];
        let spec = SurfaceSpec::swiss_roll();
        let t = analytic_tangent(&spec, &p).unwrap();
        let du = central_diff(|s| [s * s.cos(), s * s.sin(), 0.5], u, h);
        let numeric = AffineSubspace::from_spanning(
            DVector::from_column_slice(&p),
            &DMatrix::from_columns(&[
                DVector::from_column_slice(&du),
                DVector::from_column_slice(&[0.0, 0.0, 1.0]),
            ]),
        )
        .unwrap();
        assert!(subspace_angle(&t, &numeric).unwrap() < 1e-7);

        // Sphere tangent is orthogonal to the position vector.
        let spec = SurfaceSpec::sphere(1.0).unwrap();
        let p = [0.6f64, 0.48, 0.64];
        let norm = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        let p = [p[0] / norm, p[1] / norm, p[2] / norm];
        let t = analytic_tangent(&spec, &p).unwrap();
        for c in 0..2 {
            let col = t.basis.column(c);
            let dot: f64 = (0..3).map(|i| col[i] * p[i]).sum();
            assert!(dot.abs() < 1e-12);
        }
    }

    fn central_diff(f: impl Fn(f64) -> [f64; 3], at: f64, h: f64) -> [f64; 3] {
        let a = f(at + h);
        let b = f(at - h);
        [
            (a[0] - b[0]) / (2.0 * h),
            (a[1] - b[1]) / (2.0 * h),
            (a[2] - b[2]) / (2.0 * h),
        ]
    }

    #[test]
    fn surface_spec_validation() {
        assert!(SurfaceSpec::sphere(0.0).is_err());
        assert!(SurfaceSpec::torus_with(1.0, 1.0).is_err());
        assert!(SurfaceSpec::flat_square(0).is_err());
        assert!(SurfaceSpec::bumped_grid(2, -1.0, 5).is_err());
        assert!(SurfaceSpec::bumped_grid(2, 1.0, 1).is_err());
        assert_eq!(SurfaceSpec::torus().ambient_dim(), 3);
        assert_eq!(SurfaceSpec::flat_square(3).unwrap().ambient_dim(), 4);
        assert_eq!(SurfaceSpec::flat_square(3).unwrap().intrinsic_dim(), 3);
    }

    #[test]
    fn sample_size_preconditions() {
        let spec = SurfaceSpec::sphere(1.0).unwrap();
        assert!(sample(&spec, 3, 0, SampleMode::AreaUniform).is_err());
        assert!(sample(&spec, 4, 0, SampleMode::AreaUniform).is_ok());
    }

    #[test]
    fn surface_distance_matches_closed_forms() {
        let sphere = SurfaceSpec::sphere(1.0).unwrap();
        assert!((surface_distance(&sphere, &[2.0, 0.0, 0.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((surface_distance(&sphere, &[0.3, 0.4, 0.0]).unwrap() - 0.5).abs() < 1e-12);
        assert!(surface_distance(&sphere, &[0.0, 0.0, 1.0]).unwrap() < 1e-12);

        let torus = SurfaceSpec::torus();
        assert!(surface_distance(&torus, &[3.0, 0.0, 0.0]).unwrap() < 1e-12);
        assert!((surface_distance(&torus, &[4.0, 0.0, 0.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((surface_distance(&torus, &[0.0, 0.0, 0.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((surface_distance(&torus, &[2.0, 0.0, 2.0]).unwrap() - 1.0).abs() < 1e-12);

        let swiss = SurfaceSpec::swiss_roll();
        let u = std::f64::consts::PI;
        let on = [u * u.cos(), u * u.sin(), 0.4];
        assert!(surface_distance(&swiss, &on).unwrap() < 1e-9);
        let above = [u * u.cos(), u * u.sin(), 1.5];
        assert!((surface_distance(&swiss, &above).unwrap() - 0.5).abs() < 1e-9);

        let flat = SurfaceSpec::flat_square(2).unwrap();
        assert!((surface_distance(&flat, &[0.5, 0.5, 0.7]).unwrap() - 0.7).abs() < 1e-12);
        assert!((surface_distance(&flat, &[2.0, 0.5, 0.0]).unwrap() - 1.0).abs() < 1e-12);
        let hyp = surface_distance(&flat, &[2.0, 0.5, 2.0]).unwrap();
        assert!((hyp - 5.0f64.sqrt()).abs() < 1e-12);

        assert!(surface_distance(&sphere, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn surface_distance_handles_bumped_profiles() {
        let spec = SurfaceSpec::bumped_grid(2, 1.0, 5).unwrap();
        let eps = grid_pitch(5);
        // A point on the profile itself is at distance ~0.
        let on = [0.5, 0.3, bump_height(1.0, eps, 0.3)];
        assert!(surface_distance(&spec, &on).unwrap() < 1e-9);
        // Far above a grid node, where the bumps vanish: the nearest profile
        // point can undercut the vertical drop by at most the bump height.
        let peak = 1.0 * (eps / 2.0) * (eps / 2.0);
        let d = surface_distance(&spec, &[0.5, 0.5, 10.0]).unwrap();
        assert!(d <= 10.0 + 1e-12 && d >= 10.0 - peak);
        // Amplitude zero degenerates to the flat square.
        let flat_like = SurfaceSpec::bumped_grid(2, 0.0, 5).unwrap();
        let flat = SurfaceSpec::flat_square(2).unwrap();
        for p in [[0.2, 0.9, 0.3], [1.4, -0.2, 0.1], [0.5, 0.5, -2.0]] {
            let a = surface_distance(&flat_like, &p).unwrap();
            let b = surface_distance(&flat, &p).unwrap();
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn surface_distance_agrees_with_dense_sampling() {
        // A dense sample gives an upper bound on the true distance that is
        // tight to within the sample's fill radius.
        for (spec, probes) in [
            (
                SurfaceSpec::swiss_roll(),
                vec![[1.0, 2.0, 0.5], [-3.0, -3.0, 1.2], [0.0, 0.0, 0.5]],
            ),
            (
                SurfaceSpec::bumped_grid(2, 1.0, 5).unwrap(),
                vec![[0.3, 0.7, 0.2], [-0.5, 0.5, 0.1], [1.1, 1.1, -0.4]],
            ),
        ] {
            let cloud = sample(&spec, 20_000, 9, SampleMode::AreaUniform).unwrap();
            for p in &probes {
                let brute = cloud
                    .iter()
                    .map(|q| {
                        p.iter()
                            .zip(q)
                            .map(|(a, b)| (a - b) * (a - b))
                            .sum::<f64>()
                            .sqrt()
                    })
                    .fold(f64::INFINITY, f64::min);
                let d = surface_distance(&spec, p).unwrap();
                assert!(d <= brute + 1e-9, "{}: {d} > {brute}", spec.name());
                assert!(brute - d < 0.05, "{}: {d} vs {brute}", spec.name());
            }
        }
    }
}
