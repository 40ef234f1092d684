//! Shared geometric primitives: polylines, simplices, affine subspaces,
//! principal angles, thickness, and distortion of sampled maps.

use crate::error::{GeodesyError, Result};
use nalgebra::{DMatrix, DVector};

/// Dot product of two coordinate slices.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean norm of a coordinate slice.
#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Euclidean distance between two coordinate slices.
#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// An ordered polygonal curve with at least two vertices.
#[derive(Debug, Clone)]
pub struct Polyline {
    pub vertices: Vec<DVector<f64>>,
}

impl Polyline {
    pub fn new(vertices: Vec<DVector<f64>>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(GeodesyError::invalid("polyline needs at least 2 vertices"));
        }
        let dim = vertices[0].len();
        if vertices.iter().any(|v| v.len() != dim) {
            return Err(GeodesyError::invalid("polyline vertices of mixed dimension"));
        }
        Ok(Polyline { vertices })
    }

    /// Sum of segment lengths; for a polygonal curve this equals the
    /// supremum of inscribed partial sums, so no refinement can exceed it.
    pub fn length(&self) -> f64 {
        polyline_length(self)
    }
}

/// Length of a polyline as the sum of its Euclidean segment lengths.
pub fn polyline_length(p: &Polyline) -> f64 {
    p.vertices
        .windows(2)
        .map(|w| (&w[1] - &w[0]).norm())
        .sum()
}

/// Convex hull of k+1 points. Affine independence is not enforced at
/// construction; `simplex_thickness` reports rank deficiency via its flag.
#[derive(Debug, Clone)]
pub struct Simplex {
    pub vertices: Vec<DVector<f64>>,
}

impl Simplex {
    pub fn new(vertices: Vec<DVector<f64>>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(GeodesyError::invalid("simplex needs at least one vertex"));
        }
        let dim = vertices[0].len();
        if vertices.iter().any(|v| v.len() != dim) {
            return Err(GeodesyError::invalid("simplex vertices of mixed dimension"));
        }
        if vertices.len() > dim + 1 {
            return Err(GeodesyError::invalid(format!(
                "{} vertices cannot be affinely independent in R^{dim}",
                vertices.len()
            )));
        }
        Ok(Simplex { vertices })
    }

    /// Number of vertices minus one.
    pub fn order(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Largest pairwise vertex distance.
    pub fn diameter(&self) -> f64 {
        let mut best = 0.0f64;
        for i in 0..self.vertices.len() {
            for j in (i + 1)..self.vertices.len() {
                best = best.max((&self.vertices[i] - &self.vertices[j]).norm());
            }
        }
        best
    }

    /// Matrix of edge vectors v_i − v_0, one per column.
    fn edge_matrix(&self) -> DMatrix<f64> {
        let d = self.vertices[0].len();
        let k = self.order();
        DMatrix::from_fn(d, k, |r, c| self.vertices[c + 1][r] - self.vertices[0][r])
    }
}

/// Thickness of a simplex together with a degeneracy flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thickness {
    /// Smallest altitude divided by diameter; 0 when degenerate.
    pub value: f64,
    /// True when the edge matrix is rank-deficient at tolerance 1e-9 × diameter.
    pub degenerate: bool,
}

/// Ratio of the smallest altitude of a simplex to its diameter.
///
/// A k-simplex never exceeds √((k+1)/2k), attained exactly by regular
/// simplices. Vertices (k = 0) have thickness 1 by convention.
pub fn simplex_thickness(s: &Simplex) -> Thickness {
    let k = s.order();
    if k == 0 {
        return Thickness {
            value: 1.0,
            degenerate: false,
        };
    }
    let diam = s.diameter();
    if diam <= 0.0 {
        return Thickness {
            value: 0.0,
            degenerate: true,
        };
    }
    // Rank test on the edge matrix, scale-invariant via the diameter.
    let edges = s.edge_matrix();
    let svals = edges.clone().svd(false, false).singular_values;
    if svals.len() < k || svals[k - 1] < 1e-9 * diam {
        return Thickness {
            value: 0.0,
            degenerate: true,
        };
    }
    let mut min_altitude = f64::INFINITY;
    for i in 0..=k {
        // Orthonormal basis of the face opposite vertex i.
        let face: Vec<&DVector<f64>> = s
            .vertices
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, v)| v)
            .collect();
        let base = face[0];
        let d = base.len();
        let span = DMatrix::from_fn(d, k - 1, |r, c| face[c + 1][r] - base[r]);
        let basis = orthonormal_columns(&span, 1e-12 * diam);
        let r = &s.vertices[i] - base;
        let proj = &basis * (basis.transpose() * &r);
        min_altitude = min_altitude.min((r - proj).norm());
    }
    Thickness {
        value: min_altitude / diam,
        degenerate: false,
    }
}

/// An affine subspace given by a base point and an orthonormal direction basis
/// (one column per direction).
#[derive(Debug, Clone)]
pub struct AffineSubspace {
    pub base: DVector<f64>,
    pub basis: DMatrix<f64>,
}

impl AffineSubspace {
    /// Builds a subspace from an already-orthonormal basis, checked to 1e-10.
    pub fn new(base: DVector<f64>, basis: DMatrix<f64>) -> Result<Self> {
        if basis.nrows() != base.len() {
            return Err(GeodesyError::invalid("basis rows must match point dimension"));
        }
        if basis.ncols() == 0 || basis.ncols() > basis.nrows() {
            return Err(GeodesyError::invalid("basis must have 1..=d columns"));
        }
        let gram = basis.transpose() * &basis;
        for i in 0..gram.nrows() {
            for j in 0..gram.ncols() {
                let want = if i == j { 1.0 } else { 0.0 };
                if (gram[(i, j)] - want).abs() > 1e-10 {
                    return Err(GeodesyError::invalid(
                        "basis columns must be orthonormal to 1e-10",
                    ));
                }
            }
        }
        Ok(AffineSubspace { base, basis })
    }

    /// Builds a subspace from a spanning set, orthonormalizing and dropping
    /// dependent directions. Errors when the span is trivial.
    pub fn from_spanning(base: DVector<f64>, span: &DMatrix<f64>) -> Result<Self> {
        let scale = span.iter().map(|x| x.abs()).fold(0.0f64, f64::max);
        if scale == 0.0 {
            return Err(GeodesyError::invalid("spanning set is zero"));
        }
        let basis = orthonormal_columns(span, 1e-12 * scale);
        if basis.ncols() == 0 {
            return Err(GeodesyError::invalid("spanning set is rank zero"));
        }
        AffineSubspace::new(base, basis)
    }

    /// Subspace dimension k.
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Ambient dimension d.
    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Coefficients of x − base in the basis (the projection chart).
    pub fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        self.basis.transpose() * (x - &self.base)
    }

    /// The ambient point corresponding to chart coefficients.
    pub fn lift(&self, coeffs: &DVector<f64>) -> DVector<f64> {
        &self.base + &self.basis * coeffs
    }
}

/// Orthonormal basis for the column space of `m`, keeping singular directions
/// above `tol`.
pub fn orthonormal_columns(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    if m.ncols() == 0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("svd requested u");
    let rank = svd.singular_values.iter().take_while(|&&s| s > tol).count();
    u.columns(0, rank.min(u.ncols())).into_owned()
}

/// Maximum principal angle between two subspaces of equal dimension, in
/// [0, π/2]. Base points are ignored; only direction spaces enter.
pub fn subspace_angle(a: &AffineSubspace, b: &AffineSubspace) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(GeodesyError::invalid(format!(
            "subspace dimensions differ: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    if a.ambient_dim() != b.ambient_dim() {
        return Err(GeodesyError::invalid("ambient dimensions differ"));
    }
    let cross = a.basis.transpose() * &b.basis;
    let svals = cross.clone().svd(false, false).singular_values;
    // Cosines of the principal angles; the smallest gives the largest angle.
    let c = svals[svals.len() - 1].clamp(-1.0, 1.0);
    if c < std::f64::consts::FRAC_1_SQRT_2 {
        return Ok(c.acos());
    }
    // Near-zero angles: acos loses half the significant digits, so switch to
    // the sine of the largest angle, ‖(I − P_a)·B_b‖₂, which is exact there.
    let residual = &b.basis - &a.basis * cross;
    let s = residual.svd(false, false).singular_values[0].clamp(-1.0, 1.0);
    Ok(s.asin())
}

/// Distance from a point to its orthogonal projection onto an affine subspace.
pub fn point_to_subspace_distance(x: &DVector<f64>, t: &AffineSubspace) -> Result<f64> {
    if x.len() != t.ambient_dim() {
        return Err(GeodesyError::invalid("point/subspace dimension mismatch"));
    }
    let r = x - &t.base;
    let proj = &t.basis * (t.basis.transpose() * &r);
    Ok((r - proj).norm())
}

/// Smallest ξ such that |‖F(x)−F(y)‖ − ‖x−y‖| ≤ ξ‖x−y‖ over all supplied
/// (source, image) pairs — the maximum relative distance deviation.
pub fn distortion_of_map(pairs: &[(DVector<f64>, DVector<f64>)]) -> Result<f64> {
    if pairs.len() < 2 {
        return Err(GeodesyError::invalid("need at least 2 point pairs"));
    }
    let mut xi = 0.0f64;
    for i in 0..pairs.len() {
        for j in (i + 1)..pairs.len() {
            let d_src = (&pairs[i].0 - &pairs[j].0).norm();
            if d_src == 0.0 {
                return Err(GeodesyError::invalid(format!(
                    "source points {i} and {j} coincide"
                )));
            }
            let d_img = (&pairs[i].1 - &pairs[j].1).norm();
            xi = xi.max((d_img - d_src).abs() / d_src);
        }
    }
    Ok(xi)
}

/// Applies a map, given as a closure, to every vertex of a polyline.
pub fn map_polyline(p: &Polyline, f: impl Fn(&DVector<f64>) -> DVector<f64>) -> Polyline {
    Polyline {
        vertices: p.vertices.iter().map(f).collect(),
    }
}
