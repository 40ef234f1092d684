//! Tangent-space estimation by local principal component analysis: at each
//! sample point, the top-k eigenspace of the second-moment matrix of its
//! neighborhood, centered at the point itself.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{GeodesyError, Result};
use crate::geometry::{subspace_angle, AffineSubspace};
use crate::surfaces::{analytic_tangent, SurfaceSpec};
use crate::PointCloud;

/// Estimated tangent frames for every point of a cloud.
///
/// Points whose neighborhood is too small for a rank-k estimate carry `None`
/// and must be excluded downstream.
#[derive(Debug, Clone)]
pub struct TangentField {
    /// One frame per point; `None` marks an unusable estimate.
    pub frames: Vec<Option<AffineSubspace>>,
    /// Neighborhood radius used for every point.
    pub radius_h: f64,
    /// Neighborhood sizes `|Nᵢ|`, the center point included.
    pub neighbor_counts: Vec<usize>,
    /// Spectral-gap ratios λₖ/λₖ₊₁ (NaN for unusable points).
    pub gap_ratios: Vec<f64>,
    /// True where the spectral gap is too small to pick a k-eigenspace.
    pub degenerate: Vec<bool>,
    /// Tangent dimension k.
    pub dim: usize,
}

impl TangentField {
    /// Number of points.
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    /// True when the field covers no points.
    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// The frame at point `i`, if usable.
    pub fn frame(&self, i: usize) -> Option<&AffineSubspace> {
        self.frames[i].as_ref()
    }

    /// Number of usable frames.
    pub fn usable_count(&self) -> usize {
        self.frames.iter().filter(|f| f.is_some()).count()
    }

    /// Indices of points without a usable frame.
    pub fn unusable_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.frames[i].is_none()).collect()
    }

    /// Debug dump: one row per point with the flattened basis entries
    /// followed by the gap ratio (zeros and NaN for unusable points).
    pub fn write_csv(&self, path: &std::path::Path) -> Result<()> {
        let mut out = String::new();
        for i in 0..self.len() {
            let mut fields = Vec::new();
            match &self.frames[i] {
                Some(f) => {
                    for c in 0..f.basis.ncols() {
                        for r in 0..f.basis.nrows() {
                            fields.push(format!("{}", f.basis[(r, c)]));
                        }
                    }
                }
                None => {
                    let d = self
                        .frames
                        .iter()
                        .flatten()
                        .next()
                        .map_or(self.dim, |f| f.ambient_dim());
                    fields.extend(std::iter::repeat_n("0".to_string(), d * self.dim));
                }
            }
            fields.push(format!("{}", self.gap_ratios[i]));
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        std::fs::write(path, out)?;
        Ok(())
    }
}

/// Estimates a k-dimensional tangent frame at every cloud point from the
/// second-moment matrix of its radius-`h` neighborhood (centered at the
/// point, not at the neighborhood barycenter).
pub fn estimate_tangents(cloud: &PointCloud, k: usize, h: f64) -> Result<TangentField> {
    let d = cloud.dim();
    if !(h > 0.0) || !h.is_finite() {
        return Err(GeodesyError::invalid("neighborhood radius must be positive"));
    }
    if k == 0 || k >= d {
        return Err(GeodesyError::invalid(format!(
            "tangent dimension must satisfy 1 ≤ k < ambient dimension (k={k}, d={d})"
        )));
    }
    if cloud.len() == 0 {
        return Err(GeodesyError::invalid("cannot estimate tangents of an empty cloud"));
    }

    let n = cloud.len();
    let per_point: Vec<(Option<AffineSubspace>, usize, f64, bool)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = cloud.point(i);
            let mut sigma = DMatrix::<f64>::zeros(d, d);
            let mut count = 0usize;
            for j in 0..n {
                if cloud.dist(i, j) <= h {
                    count += 1;
                    let xj = cloud.point(j);
                    for a in 0..d {
                        let da = xj[a] - xi[a];
                        for b in a..d {
                            sigma[(a, b)] += da * (xj[b] - xi[b]);
                        }
                    }
                }
            }
            if count < k + 1 {
                return (None, count, f64::NAN, false);
            }
            for a in 0..d {
                for b in a..d {
                    let v = sigma[(a, b)] / count as f64;
                    sigma[(a, b)] = v;
                    sigma[(b, a)] = v;
                }
            }

            let eig = sigma.symmetric_eigen();
            let mut order: Vec<usize> = (0..d).collect();
            order.sort_by(|&a, &b| {
                eig.eigenvalues[b]
                    .partial_cmp(&eig.eigenvalues[a])
                    .unwrap()
                    .then(a.cmp(&b))
            });
            let lam = |r: usize| eig.eigenvalues[order[r]].max(0.0);
            let gap = if lam(k) <= 0.0 {
                if lam(k - 1) <= 0.0 {
                    1.0
                } else {
                    f64::INFINITY
                }
            } else {
                lam(k - 1) / lam(k)
            };
            let degenerate = lam(k - 1) <= lam(k) * (1.0 + 1e-9);

            let mut basis = DMatrix::<f64>::zeros(d, k);
            for (c, &e) in order.iter().take(k).enumerate() {
                let mut col = eig.eigenvectors.column(e).clone_owned();
                let mut best = 0usize;
                for r in 1..d {
                    if col[r].abs() > col[best].abs() {
                        best = r;
                    }
                }
                if col[best] < 0.0 {
                    col.neg_mut();
                }
                basis.set_column(c, &col);
            }
            let base = DVector::from_column_slice(xi);
            let frame = AffineSubspace::new(base.clone(), basis.clone())
                .or_else(|_| AffineSubspace::from_spanning(base, &basis))
                .ok();
            (frame, count, gap, degenerate)
        })
        .collect();

    let mut frames = Vec::with_capacity(n);
    let mut neighbor_counts = Vec::with_capacity(n);
    let mut gap_ratios = Vec::with_capacity(n);
    let mut degenerate = Vec::with_capacity(n);
    for (f, c, g, dg) in per_point {
        frames.push(f);
        neighbor_counts.push(c);
        gap_ratios.push(g);
        degenerate.push(dg);
    }
    Ok(TangentField {
        frames,
        radius_h: h,
        neighbor_counts,
        gap_ratios,
        degenerate,
        dim: k,
    })
}

/// Per-point angles between estimated and analytic tangent frames.
#[derive(Debug, Clone)]
pub struct TangentErrorProfile {
    /// Principal angles, one per usable frame.
    pub angles: Vec<f64>,
    /// Cloud indices the angles belong to.
    pub indices: Vec<usize>,
    /// Points skipped for lack of a usable frame.
    pub unusable: Vec<usize>,
}

impl TangentErrorProfile {
    /// Median angle over usable frames.
    pub fn median_angle(&self) -> Option<f64> {
        if self.angles.is_empty() {
            return None;
        }
        let mut sorted = self.angles.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let m = sorted.len();
        Some(if m % 2 == 1 {
            sorted[m / 2]
        } else {
            0.5 * (sorted[m / 2 - 1] + sorted[m / 2])
        })
    }

    /// Largest angle over usable frames.
    pub fn max_angle(&self) -> Option<f64> {
        self.angles.iter().copied().reduce(f64::max)
    }
}

/// Compares a tangent field against the analytic tangents of the surface the
/// cloud was sampled from. Unusable frames are skipped and reported.
pub fn tangent_error_profile(
    field: &TangentField,
    cloud: &PointCloud,
    spec: &SurfaceSpec,
) -> Result<TangentErrorProfile> {
    if field.len() != cloud.len() {
        return Err(GeodesyError::invalid("tangent field / cloud length mismatch"));
    }
    let mut angles = Vec::new();
    let mut indices = Vec::new();
    let mut unusable = Vec::new();
    for i in 0..field.len() {
        match field.frame(i) {
            Some(frame) => {
                let truth = analytic_tangent(spec, cloud.point(i))?;
                angles.push(subspace_angle(frame, &truth)?);
                indices.push(i);
            }
            None => unusable.push(i),
        }
    }
    Ok(TangentErrorProfile {
        angles,
        indices,
        unusable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nets::{estimate_eps, extract_net};
    use crate::surfaces::{sample, SampleMode};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sphere_cloud(n: usize, seed: u64) -> (PointCloud, SurfaceSpec) {
        let spec = SurfaceSpec::sphere(1.0).unwrap();
        let cloud = sample(&spec, n, seed, SampleMode::AreaUniform).unwrap();
        (cloud, spec)
    }

    #[test]
    fn planar_points_recover_the_plane() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<Vec<f64>> = (0..40)
            .map(|_| vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), 0.0])
            .collect();
        let cloud = PointCloud::from_points(&pts, 3).unwrap();
        let field = estimate_tangents(&cloud, 2, 10.0).unwrap();
        let plane = AffineSubspace::new(
            DVector::zeros(3),
            DMatrix::from_column_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]),
        )
        .unwrap();
        assert_eq!(field.usable_count(), 40);
        for i in 0..40 {
            let angle = subspace_angle(field.frame(i).unwrap(), &plane).unwrap();
            assert!(angle < 1e-9, "point {i}: angle {angle}");
            assert!(!field.degenerate[i]);
            assert_eq!(field.neighbor_counts[i], 40);
        }
    }

    #[test]
    fn sphere_frames_track_analytic_tangents() {
        let (cloud, spec) = sphere_cloud(2000, 41);
        let eps = estimate_eps(&cloud).unwrap();
        let h = 4.0 * eps;
        let field = estimate_tangents(&cloud, 2, h).unwrap();
        assert_eq!(field.usable_count(), 2000);
        let profile = tangent_error_profile(&field, &cloud, &spec).unwrap();
        assert!(profile.unusable.is_empty());
        let max = profile.max_angle().unwrap();
        assert!(max < 0.5 * h, "max angle {max} vs 0.5h {}", 0.5 * h);
        assert!(max < 0.3, "max angle {max}");
    }

    #[test]
    fn isolated_points_are_flagged_unusable() {
        let pts = vec![
            vec![0.0, 0.0, 0.0],
            vec![0.1, 0.0, 0.0],
            vec![0.0, 0.1, 0.0],
            vec![50.0, 50.0, 50.0],
        ];
        let cloud = PointCloud::from_points(&pts, 3).unwrap();
        let field = estimate_tangents(&cloud, 2, 0.5).unwrap();
        assert!(field.frame(3).is_none());
        assert_eq!(field.neighbor_counts[3], 1);
        assert!(field.gap_ratios[3].is_nan());
        assert_eq!(field.unusable_indices(), vec![3]);
    }

    #[test]
    fn exact_frames_have_zero_error() {
        let (cloud, spec) = sphere_cloud(100, 7);
        let frames: Vec<Option<AffineSubspace>> = (0..100)
            .map(|i| Some(analytic_tangent(&spec, cloud.point(i)).unwrap()))
            .collect();
        let field = TangentField {
            frames,
            radius_h: 1.0,
            neighbor_counts: vec![100; 100],
            gap_ratios: vec![f64::INFINITY; 100],
            degenerate: vec![false; 100],
            dim: 2,
        };
        let profile = tangent_error_profile(&field, &cloud, &spec).unwrap();
        assert!(profile.max_angle().unwrap() < 1e-12);
    }

    #[test]
    fn halving_eps_roughly_halves_the_median_error() {
        // The linear error law needs genuinely local neighborhoods
        // (h ≲ 0.5 on the unit sphere), hence the large samples.
        let mut medians = Vec::new();
        let mut epses = Vec::new();
        for &n in &[4000usize, 16000] {
            let (cloud, spec) = sphere_cloud(n, 77);
            let eps = estimate_eps(&cloud).unwrap();
            let field = estimate_tangents(&cloud, 2, 4.0 * eps).unwrap();
            let profile = tangent_error_profile(&field, &cloud, &spec).unwrap();
            medians.push(profile.median_angle().unwrap());
            epses.push(eps);
        }
        // Rescale the observed ratio to a per-ε̂-halving rate; linear error
        // in ε̂ gives 0.5 exactly.
        let ratio = medians[1] / medians[0];
        let eps_ratio = epses[1] / epses[0];
        assert!(eps_ratio < 0.9, "sampling density failed to increase");
        let per_halving = ratio.powf((0.5f64).ln() / eps_ratio.ln());
        assert!(
            (0.35..=0.65).contains(&per_halving),
            "per-halving ratio {per_halving} (raw {ratio}, eps ratio {eps_ratio})"
        );
    }

    #[test]
    fn net_second_moments_stay_well_conditioned() {
        // Nets of the unit disk: the second-moment matrix about the center
        // keeps a bounded condition number as the net is refined.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut pts = Vec::new();
        while pts.len() < 4000 {
            let x = rng.random_range(-1.0..1.0);
            let y = rng.random_range(-1.0..1.0);
            if x * x + y * y <= 1.0 {
                pts.push(vec![x, y]);
            }
        }
        let cloud = PointCloud::from_points(&pts, 2).unwrap();
        for &eta in &[0.2, 0.1, 0.05] {
            let net = extract_net(&cloud, eta, None).unwrap();
            let selected = net.net().expect("no anchors, cannot short-circuit");
            let mut m = [[0.0f64; 2]; 2];
            for &i in &selected.selected_indices {
                let p = cloud.point(i);
                m[0][0] += p[0] * p[0];
                m[0][1] += p[0] * p[1];
                m[1][1] += p[1] * p[1];
            }
            let count = selected.selected_indices.len() as f64;
            let (a, b, c) = (m[0][0] / count, m[0][1] / count, m[1][1] / count);
            let tr = a + c;
            let det = a * c - b * b;
            let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
            let (lmax, lmin) = (tr / 2.0 + disc, tr / 2.0 - disc);
            assert!(
                lmax / lmin < 10.0,
                "eta {eta}: condition number {}",
                lmax / lmin
            );
        }
    }

    #[test]
    fn frames_rotate_with_the_cloud() {
        let (cloud, _) = sphere_cloud(300, 19);
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let raw = DMatrix::from_fn(3, 3, |_, _| rng.random_range(-1.0..1.0));
        let q = raw.qr().q();

        let rotated_pts: Vec<Vec<f64>> = (0..300)
            .map(|i| {
                let p = DVector::from_column_slice(cloud.point(i));
                (&q * p).iter().copied().collect()
            })
            .collect();
        let rotated = PointCloud::from_points(&rotated_pts, 3).unwrap();

        let h = 0.6;
        let field = estimate_tangents(&cloud, 2, h).unwrap();
        let field_rot = estimate_tangents(&rotated, 2, h).unwrap();
        for i in 0..300 {
            let (Some(f), Some(fr)) = (field.frame(i), field_rot.frame(i)) else {
                continue;
            };
            let expected = AffineSubspace::from_spanning(
                &q * &f.base,
                &(&q * &f.basis),
            )
            .unwrap();
            let angle = subspace_angle(&expected, fr).unwrap();
            assert!(angle < 1e-9, "point {i}: angle {angle}");
        }
    }

    #[test]
    fn frame_directions_ignore_translation() {
        let (cloud, _) = sphere_cloud(200, 23);
        let shift = [13.5, -2.25, 8.0];
        let moved_pts: Vec<Vec<f64>> = (0..200)
            .map(|i| {
                cloud
                    .point(i)
                    .iter()
                    .zip(&shift)
                    .map(|(a, t)| a + t)
                    .collect()
            })
            .collect();
        let moved = PointCloud::from_points(&moved_pts, 3).unwrap();
        let field = estimate_tangents(&cloud, 2, 0.7).unwrap();
        let field_moved = estimate_tangents(&moved, 2, 0.7).unwrap();
        for i in 0..200 {
            let (Some(f), Some(fm)) = (field.frame(i), field_moved.frame(i)) else {
                continue;
            };
            let unmoved = AffineSubspace::new(f.base.clone(), fm.basis.clone()).unwrap();
            let angle = subspace_angle(f, &unmoved).unwrap();
            assert!(angle < 1e-9, "point {i}: angle {angle}");
        }
    }

    #[test]
    fn estimate_rejects_bad_parameters() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0]];
        let cloud = PointCloud::from_points(&pts, 2).unwrap();
        assert!(estimate_tangents(&cloud, 1, 0.0).is_err());
        assert!(estimate_tangents(&cloud, 0, 1.0).is_err());
        assert!(estimate_tangents(&cloud, 2, 1.0).is_err());
    }

    #[test]
    fn csv_dump_round_trips_shape() {
        let (cloud, _) = sphere_cloud(20, 29);
        let field = estimate_tangents(&cloud, 2, 1.5).unwrap();
        let dir = std::env::temp_dir().join(format!("geodesy-tan-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("frames.csv");
        field.write_csv(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 20);
        assert_eq!(text.lines().next().unwrap().split(',').count(), 7);
        std::fs::remove_dir_all(&dir).ok();
    }
}
