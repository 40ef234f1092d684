//! Distance-matrix embeddings: Classical Scaling, Procrustes alignment, and
//! width/diameter statistics for embedded point sets.

use nalgebra::{DMatrix, DVector};

use crate::error::{GeodesyError, Result};
use crate::PointCloud;

/// Symmetric pairwise-distance matrix with optional missing entries.
///
/// Off-diagonal entries are stored once (strict upper triangle), so symmetry
/// is exact by storage; the diagonal is implicitly zero.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
    present: Vec<bool>,
}

impl DistanceMatrix {
    /// Creates an `n`-point matrix with every off-diagonal entry missing.
    pub fn new(n: usize) -> Self {
        let m = n * n.saturating_sub(1) / 2;
        Self {
            n,
            entries: vec![0.0; m],
            present: vec![false; m],
        }
    }

    fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.n);
        i * self.n - i * (i + 1) / 2 + (j - i - 1)
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.n
    }

    /// True when the matrix has no points.
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Sets the distance between `i` and `j` (argument order is irrelevant).
    pub fn set(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        if i >= self.n || j >= self.n {
            return Err(GeodesyError::invalid(format!(
                "index ({i}, {j}) out of range for a {}-point distance matrix",
                self.n
            )));
        }
        if !value.is_finite() || value < 0.0 {
            return Err(GeodesyError::invalid(format!(
                "distance ({i}, {j}) must be finite and nonnegative, got {value}"
            )));
        }
        if i == j {
            if value != 0.0 {
                return Err(GeodesyError::invalid(format!(
                    "diagonal entry ({i}, {i}) must be zero, got {value}"
                )));
            }
            return Ok(());
        }
        let idx = self.index(i.min(j), i.max(j));
        self.entries[idx] = value;
        self.present[idx] = true;
        Ok(())
    }

    /// Distance between `i` and `j`, or `None` when the entry is missing.
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        if i >= self.n || j >= self.n {
            return None;
        }
        if i == j {
            return Some(0.0);
        }
        let idx = self.index(i.min(j), i.max(j));
        self.present[idx].then(|| self.entries[idx])
    }

    /// True when every off-diagonal entry is present.
    pub fn is_complete(&self) -> bool {
        self.present.iter().all(|&p| p)
    }

    /// Number of missing off-diagonal pairs.
    pub fn missing_count(&self) -> usize {
        self.present.iter().filter(|&&p| !p).count()
    }

    /// Builds a complete matrix from a pairwise distance function.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut d = Self::new(n);
        for i in 0..n {
            for j in i + 1..n {
                d.set(i, j, f(i, j))?;
            }
        }
        Ok(d)
    }

    /// Euclidean distance matrix of a point cloud.
    pub fn from_cloud(cloud: &PointCloud) -> Self {
        Self::from_fn(cloud.len(), |i, j| cloud.dist(i, j))
            .expect("Euclidean distances are finite and nonnegative")
    }

    /// Restriction to a subset of the points, in the order given.
    pub fn submatrix(&self, idx: &[usize]) -> Result<Self> {
        let mut d = Self::new(idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate().skip(a + 1) {
                if i >= self.n || j >= self.n {
                    return Err(GeodesyError::invalid(format!(
                        "subset index {} out of range for a {}-point matrix",
                        i.max(j),
                        self.n
                    )));
                }
                if let Some(v) = self.get(i, j) {
                    d.set(a, b, v)?;
                }
            }
        }
        Ok(d)
    }

    /// Largest present entry (0 for an empty or all-missing matrix).
    pub fn max_entry(&self) -> f64 {
        self.entries
            .iter()
            .zip(&self.present)
            .filter(|&(_, &p)| p)
            .map(|(&v, _)| v)
            .fold(0.0, f64::max)
    }
}

/// Point set in `R^k` produced by an embedding method.
#[derive(Debug, Clone)]
pub struct Embedding {
    /// Row `i` holds the coordinates of point `i`.
    pub coords: DMatrix<f64>,
    /// Name of the producing method.
    pub method: String,
    /// Method-specific diagnostics as ordered key/value pairs.
    pub params: Vec<(String, String)>,
}

impl Embedding {
    /// Wraps a coordinate matrix, validating finiteness and `k ≥ 1`.
    pub fn new(coords: DMatrix<f64>, method: impl Into<String>) -> Result<Self> {
        if coords.ncols() == 0 {
            return Err(GeodesyError::invalid("embedding dimension must be at least 1"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(GeodesyError::invalid("embedding coordinates must be finite"));
        }
        Ok(Self {
            coords,
            method: method.into(),
            params: Vec::new(),
        })
    }

    /// Builds an embedding from one coordinate slice per point.
    pub fn from_rows(points: &[Vec<f64>], method: impl Into<String>) -> Result<Self> {
        if points.is_empty() {
            return Err(GeodesyError::invalid("embedding needs at least one point"));
        }
        let k = points[0].len();
        if points.iter().any(|p| p.len() != k) {
            return Err(GeodesyError::invalid("all points must share one dimension"));
        }
        let coords = DMatrix::from_row_iterator(points.len(), k, points.iter().flatten().copied());
        Self::new(coords, method)
    }

    /// Views a point cloud as an embedding in its ambient space.
    pub fn from_cloud(cloud: &PointCloud) -> Self {
        let coords = DMatrix::from_row_iterator(
            cloud.len(),
            cloud.dim(),
            cloud.iter().flat_map(|p| p.iter().copied()),
        );
        Self::new(coords, "points").expect("point clouds are finite and nonempty")
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.coords.nrows()
    }

    /// True when the embedding has no points.
    pub fn is_empty(&self) -> bool {
        self.coords.nrows() == 0
    }

    /// Embedding dimension `k`.
    pub fn dim(&self) -> usize {
        self.coords.ncols()
    }

    /// Coordinates of point `i` as a column vector.
    pub fn point(&self, i: usize) -> DVector<f64> {
        self.coords.row(i).transpose()
    }

    /// Euclidean distance between embedded points `i` and `j`.
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        (self.coords.row(i) - self.coords.row(j)).norm()
    }

    /// Looks up a diagnostic parameter by key.
    pub fn param(&self, key: &str) -> Option<&str> {
        self.params
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Writes the coordinates as CSV, one row per point.
    pub fn write_csv(&self, path: &std::path::Path) -> Result<()> {
        let mut out = String::new();
        for i in 0..self.len() {
            let row: Vec<String> = self.coords.row(i).iter().map(|c| format!("{c}")).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        std::fs::write(path, out)?;
        Ok(())
    }

    /// Per-column variances (population normalization).
    pub fn column_variances(&self) -> Vec<f64> {
        let n = self.len() as f64;
        (0..self.dim())
            .map(|c| {
                let col = self.coords.column(c);
                let mean = col.sum() / n;
                col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
            })
            .collect()
    }
}

/// Optimal orthogonal alignment of one embedding onto another.
#[derive(Debug, Clone)]
pub struct ProcrustesResult {
    /// Orthogonal matrix (reflections allowed) mapping source to target.
    pub rotation: DMatrix<f64>,
    /// Translation applied after rotation.
    pub translation: DVector<f64>,
    /// Root mean squared residual after alignment.
    pub rmse: f64,
}

/// Classical Scaling: embeds a complete distance matrix into `R^k`.
///
/// Forms the doubly centered Gram matrix `G = -1/2 · J · D∘² · J`, takes the
/// top-`k` eigenpairs, and scales eigenvectors by the square roots of their
/// eigenvalues. Negative top-`k` eigenvalues are clamped to zero; the clamped
/// mass and the count of positive eigenvalues are reported in the embedding's
/// parameters, along with human-readable warnings.
pub fn classical_scaling(d: &DistanceMatrix, k: usize) -> Result<Embedding> {
    let n = d.len();
    if k == 0 {
        return Err(GeodesyError::invalid("target dimension must be at least 1"));
    }
    if k >= n {
        return Err(GeodesyError::invalid(format!(
            "target dimension {k} must be smaller than the point count {n}"
        )));
    }
    if !d.is_complete() {
        return Err(GeodesyError::invalid(format!(
            "distance matrix has {} missing entries; Classical Scaling needs a complete matrix",
            d.missing_count()
        )));
    }

    // Double centering computed entrywise: g_ij = -1/2 (d²_ij - r_i - r_j + s)
    // with r the row means of D∘² and s its grand mean.
    let mut sq = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v = d.get(i, j).expect("complete").powi(2);
            sq[(i, j)] = v;
            sq[(j, i)] = v;
        }
    }
    let row_means: Vec<f64> = (0..n).map(|i| sq.row(i).sum() / n as f64).collect();
    let grand_mean = row_means.iter().sum::<f64>() / n as f64;
    let mut g = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = -0.5 * (sq[(i, j)] - row_means[i] - row_means[j] + grand_mean);
        }
    }

    let eig = g.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    // Stable descending sort keeps tied eigenvalues in solver order, fixing the
    // deflation order deterministically.
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("eigenvalues of a real symmetric matrix are finite")
    });

    let positive_rank = eig.eigenvalues.iter().filter(|&&l| l > 0.0).count();
    let mut coords = DMatrix::<f64>::zeros(n, k);
    let mut clamped_mass = 0.0;
    for (col, &ei) in order.iter().take(k).enumerate() {
        let lambda = eig.eigenvalues[ei];
        if lambda <= 0.0 {
            clamped_mass += -lambda;
            continue; // column stays zero
        }
        let mut v = eig.eigenvectors.column(ei).clone_owned();
        // Deterministic sign: the first entry of largest magnitude is positive.
        let lead = v
            .iter()
            .enumerate()
            .max_by(|(ai, a), (bi, b)| {
                a.abs()
                    .partial_cmp(&b.abs())
                    .expect("finite")
                    .then(bi.cmp(ai))
            })
            .map(|(i, _)| i)
            .expect("n >= 1");
        if v[lead] < 0.0 {
            v.neg_mut();
        }
        coords.set_column(col, &(v * lambda.sqrt()));
    }

    let mut emb = Embedding::new(coords, "classical_scaling")?;
    emb.params.push(("clamped_mass".into(), format!("{clamped_mass:e}")));
    emb.params.push(("positive_rank".into(), positive_rank.to_string()));
    if clamped_mass > 0.0 {
        emb.params.push((
            "warning".into(),
            format!(
                "clamped negative eigenvalue mass {clamped_mass:.6e}: \
                 the distance matrix is not Euclidean-realizable in {k} dimensions"
            ),
        ));
    }
    if positive_rank < k {
        emb.params.push((
            "warning".into(),
            format!(
                "only {positive_rank} positive eigenvalues for target dimension {k}; \
                 trailing columns are zero"
            ),
        ));
    }
    Ok(emb)
}

/// Optimal orthogonal + translation alignment of `u` onto `v`.
///
/// Centers both point sets, takes the SVD `AΛBᵀ` of `V₀ᵀU₀`, and returns
/// `R = ABᵀ` (reflections permitted) with the residual
/// `rmse = (1/n Σ ‖v_i − (R u_i + t)‖²)^{1/2}`.
pub fn procrustes_align(u: &Embedding, v: &Embedding) -> Result<ProcrustesResult> {
    if u.len() != v.len() {
        return Err(GeodesyError::invalid(format!(
            "point-count mismatch: {} vs {}",
            u.len(),
            v.len()
        )));
    }
    if u.dim() != v.dim() {
        return Err(GeodesyError::invalid(format!(
            "dimension mismatch: {} vs {}",
            u.dim(),
            v.dim()
        )));
    }
    let n = u.len();
    if n == 0 {
        return Err(GeodesyError::invalid("cannot align empty point sets"));
    }
    let k = u.dim();

    let u_mean = u.coords.row_mean().transpose();
    let v_mean = v.coords.row_mean().transpose();
    let mut u0 = u.coords.clone();
    let mut v0 = v.coords.clone();
    for i in 0..n {
        for c in 0..k {
            u0[(i, c)] -= u_mean[c];
            v0[(i, c)] -= v_mean[c];
        }
    }

    let m = v0.transpose() * &u0;
    let svd = m.svd(true, true);
    let a = svd.u.expect("requested");
    let bt = svd.v_t.expect("requested");
    let rotation = a * bt;

    let residual = &v0 - &u0 * rotation.transpose();
    let rmse = (residual.norm_squared() / n as f64).sqrt();
    let translation = v_mean - &rotation * u_mean;
    Ok(ProcrustesResult {
        rotation,
        translation,
        rmse,
    })
}

/// Width (twice the root of the smallest covariance eigenvalue) and exact
/// diameter of an embedded point set.
pub fn width_and_diameter(points: &Embedding) -> Result<(f64, f64)> {
    let n = points.len();
    let k = points.dim();
    if n < k + 1 {
        return Err(GeodesyError::invalid(format!(
            "need at least k+1 = {} points in dimension {k}, got {n}",
            k + 1
        )));
    }

    let mean = points.coords.row_mean();
    let mut centered = points.coords.clone();
    for i in 0..n {
        centered.set_row(i, &(points.coords.row(i) - &mean));
    }
    let cov = centered.transpose() * &centered / n as f64;
    let eig = cov.symmetric_eigen();
    let lambda_min = eig.eigenvalues.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    let width = 2.0 * lambda_min.max(0.0).sqrt();

    let mut diameter: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            diameter = diameter.max(points.dist(i, j));
        }
    }
    Ok((width, diameter))
}

/// Embeds a cloud by neighborhood-graph shortest-path distances followed by
/// classical scaling. Requires the graph to be connected at radius `r`.
pub fn isomap(cloud: &crate::PointCloud, k: usize, r: f64) -> Result<Embedding> {
    let g = crate::graph::build_graph(cloud, r)?;
    let status = g.connectivity();
    if !status.is_connected() {
        return Err(GeodesyError::Disconnected {
            count: status.component_count,
            sizes: status.component_sizes.clone(),
        });
    }
    let all: Vec<usize> = (0..cloud.len()).collect();
    let d = crate::graph::graph_distance_submatrix(&g, &all)?;
    let mut e = classical_scaling(&d, k)?;
    e.method = "isomap".into();
    e.params.push(("radius".into(), format!("{r}")));
    Ok(e)
}

/// Landmark isomap: shortest-path distances are evaluated only among the
/// selected landmark vertices (paths may pass through any cloud point), and
/// only the landmarks are embedded.
pub fn isomap_landmarks(
    cloud: &crate::PointCloud,
    k: usize,
    r: f64,
    landmarks: &[usize],
) -> Result<Embedding> {
    if landmarks.is_empty() {
        return Err(GeodesyError::invalid("need at least one landmark"));
    }
    let mut seen = vec![false; cloud.len()];
    for &l in landmarks {
        if l >= cloud.len() {
            return Err(GeodesyError::invalid(format!(
                "landmark {l} out of range for {} points",
                cloud.len()
            )));
        }
        if seen[l] {
            return Err(GeodesyError::invalid(format!("duplicate landmark {l}")));
        }
        seen[l] = true;
    }
    let g = crate::graph::build_graph(cloud, r)?;
    let d = crate::graph::graph_distance_submatrix(&g, landmarks)?;
    let mut e = classical_scaling(&d, k)?;
    e.method = "isomap-landmarks".into();
    e.params.push(("radius".into(), format!("{r}")));
    e.params
        .push(("landmarks".into(), format!("{}", landmarks.len())));
    Ok(e)
}

/// Embeds a cloud by reconstructing a triangle mesh over it, measuring exact
/// polyhedral geodesics between all vertex pairs, and classically scaling the
/// result. `params: None` derives reconstruction parameters from the sampling
/// scale.
pub fn mesh_isomap(
    cloud: &PointCloud,
    k: usize,
    params: Option<&crate::mesh::TdcParams>,
) -> Result<Embedding> {
    let all: Vec<usize> = (0..cloud.len()).collect();
    let mut e = mesh_isomap_impl(cloud, k, params, &all)?;
    e.method = "mesh-isomap".into();
    Ok(e)
}

/// Landmark variant of [`mesh_isomap`]: geodesics may cross the whole mesh,
/// but distances are evaluated and embedded only among the landmark vertices.
pub fn mesh_isomap_landmarks(
    cloud: &PointCloud,
    k: usize,
    params: Option<&crate::mesh::TdcParams>,
    landmarks: &[usize],
) -> Result<Embedding> {
    if landmarks.is_empty() {
        return Err(GeodesyError::invalid("need at least one landmark"));
    }
    let mut seen = vec![false; cloud.len()];
    for &l in landmarks {
        if l >= cloud.len() {
            return Err(GeodesyError::invalid(format!(
                "landmark {l} out of range for {} points",
                cloud.len()
            )));
        }
        if seen[l] {
            return Err(GeodesyError::invalid(format!("duplicate landmark {l}")));
        }
        seen[l] = true;
    }
    let mut e = mesh_isomap_impl(cloud, k, params, landmarks)?;
    e.method = "mesh-isomap-landmarks".into();
    e.params
        .push(("landmarks".into(), format!("{}", landmarks.len())));
    Ok(e)
}

fn mesh_isomap_impl(
    cloud: &PointCloud,
    k: usize,
    params: Option<&crate::mesh::TdcParams>,
    subset: &[usize],
) -> Result<Embedding> {
    let eps = crate::nets::estimate_eps(cloud)?;
    let field = crate::tangents::estimate_tangents(cloud, cloud.intrinsic_dim, 1.5 * eps)?;
    let derived;
    let params = match params {
        Some(p) => p,
        None => {
            derived = crate::mesh::TdcParams::for_scale(eps, cloud.diameter())?;
            &derived
        }
    };
    let (mesh, build) = crate::mesh::build_tdc(cloud, &field, params)?;
    let report = crate::mesh::validate_mesh(&mesh, None)?;
    if build.count_after > 0 {
        return Err(GeodesyError::Reconstruction(format!(
            "{} inconsistent stars remain after {} rounds; {}",
            build.count_after,
            build.rounds_used,
            report.summary()
        )));
    }
    if report.non_manifold_edges > 0 || report.vertex_link_failures > 0 || !report.orientable {
        return Err(GeodesyError::NonManifold(format!(
            "reconstructed mesh is not an oriented manifold; {}",
            report.summary()
        )));
    }
    if report.connected_components != 1 || report.used_vertex_count != cloud.len() {
        return Err(GeodesyError::Reconstruction(format!(
            "reconstructed mesh does not connect the cloud ({} components, {} of {} vertices used); {}",
            report.connected_components,
            report.used_vertex_count,
            cloud.len(),
            report.summary()
        )));
    }
    let m = subset.len();
    let mut pairs = Vec::with_capacity(m * (m - 1) / 2);
    let mut at = Vec::with_capacity(m * (m - 1) / 2);
    for a in 0..m {
        for b in a + 1..m {
            pairs.push((subset[a], subset[b]));
            at.push((a, b));
        }
    }
    let dists = crate::geodesics::mesh_distance_matrix(&mesh, &pairs)?;
    let mut d = DistanceMatrix::new(m);
    for (idx, &(a, b)) in at.iter().enumerate() {
        d.set(a, b, dists[idx])?;
    }
    let mut e = classical_scaling(&d, k)?;
    e.params.push(("eps".into(), format!("{eps}")));
    Ok(e)
}
