//! Point clouds in R^d with flat storage and CSV round-tripping.

use crate::error::{GeodesyError, Result};
use nalgebra::DVector;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

/// A finite point set in R^d, annotated with the intrinsic dimension k of the
/// surface it is assumed to sample. Coordinates are stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    coords: Vec<f64>,
    dim: usize,
    /// Intrinsic dimension of the underlying surface (k <= dim).
    pub intrinsic_dim: usize,
}

impl PointCloud {
    /// Builds a cloud from row-major coordinates. Every coordinate must be finite.
    pub fn new(coords: Vec<f64>, dim: usize, intrinsic_dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(GeodesyError::invalid("ambient dimension must be positive"));
        }
        if intrinsic_dim == 0 || intrinsic_dim > dim {
            return Err(GeodesyError::invalid(format!(
                "intrinsic dimension {intrinsic_dim} must lie in 1..={dim}"
            )));
        }
        if coords.len() % dim != 0 {
            return Err(GeodesyError::invalid(format!(
                "coordinate buffer length {} is not a multiple of dim {dim}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(GeodesyError::invalid("coordinates must be finite"));
        }
        Ok(PointCloud {
            coords,
            dim,
            intrinsic_dim,
        })
    }

    /// Builds a cloud from one slice per point.
    pub fn from_points(points: &[Vec<f64>], intrinsic_dim: usize) -> Result<Self> {
        let dim = points.first().map(|p| p.len()).unwrap_or(0);
        if points.iter().any(|p| p.len() != dim) {
            return Err(GeodesyError::invalid("points have inconsistent dimensions"));
        }
        let coords = points.iter().flatten().copied().collect();
        PointCloud::new(coords, dim.max(1), intrinsic_dim)
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Coordinates of point `i` as a slice.
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// Coordinates of point `i` as an owned vector.
    pub fn point_vec(&self, i: usize) -> DVector<f64> {
        DVector::from_column_slice(self.point(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    /// Euclidean distance between points `i` and `j`.
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        crate::geometry::dist(self.point(i), self.point(j))
    }

    /// New cloud keeping only the listed point indices, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            if i >= self.len() {
                return Err(GeodesyError::invalid(format!(
                    "index {i} out of range for cloud of {} points",
                    self.len()
                )));
            }
            coords.extend_from_slice(self.point(i));
        }
        PointCloud::new(coords, self.dim, self.intrinsic_dim)
    }

    /// Largest pairwise distance. O(n^2).
    pub fn diameter(&self) -> f64 {
        let n = self.len();
        let mut best = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                best = best.max(self.dist(i, j));
            }
        }
        best
    }

    /// Reads a cloud from CSV: one point per row, `.` as the decimal separator,
    /// optionally preceded by a `x0,x1,...` header row (detected, or forced by `header`).
    pub fn read_csv(path: &Path, intrinsic_dim: usize, header: bool) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let reader = BufReader::new(file);
        let mut coords = Vec::new();
        let mut dim = None;
        let mut first_row = !header;
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
            let parsed: std::result::Result<Vec<f64>, _> =
                fields.iter().map(|f| f.parse::<f64>()).collect();
            let row = match parsed {
                Ok(row) => row,
                Err(_) if first_row => {
                    // A non-numeric first row is treated as a header.
                    first_row = false;
                    continue;
                }
                Err(e) => {
                    return Err(GeodesyError::Parse(format!(
                        "{}:{}: {e}",
                        path.display(),
                        lineno + 1
                    )))
                }
            };
            first_row = false;
            match dim {
                None => dim = Some(row.len()),
                Some(d) if d != row.len() => {
                    return Err(GeodesyError::Parse(format!(
                        "{}:{}: expected {d} columns, found {}",
                        path.display(),
                        lineno + 1,
                        row.len()
                    )))
                }
                _ => {}
            }
            coords.extend(row);
        }
        let dim = dim.ok_or_else(|| GeodesyError::invalid("empty point-cloud file"))?;
        PointCloud::new(coords, dim, intrinsic_dim)
    }

    /// Writes the cloud as CSV. Floats use the shortest representation that
    /// round-trips to the same bits.
    pub fn write_csv(&self, path: &Path, header: bool) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        if header {
            let names: Vec<String> = (0..self.dim).map(|j| format!("x{j}")).collect();
            writeln!(out, "{}", names.join(","))?;
        }
        for p in self.iter() {
            let row: Vec<String> = p.iter().map(|c| format!("{c}")).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Reads a one-column CSV of point indices.
pub fn read_indices(path: &Path) -> Result<Vec<usize>> {
    let file = std::fs::File::open(path)?;
    let mut out = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let i = t.parse::<usize>().map_err(|e| {
            GeodesyError::Parse(format!("{}:{}: {e}", path.display(), lineno + 1))
        })?;
        out.push(i);
    }
    Ok(out)
}

/// Writes point indices as a one-column CSV.
pub fn write_indices(path: &Path, indices: &[usize]) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    for &i in indices {
        writeln!(out, "{i}")?;
    }
    Ok(())
}

/// Reads index pairs from CSV rows `i,j`.
pub fn read_pairs(path: &Path) -> Result<Vec<(usize, usize)>> {
    let file = std::fs::File::open(path)?;
    let mut out = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let mut fields = t.split(',').map(str::trim);
        let parse = |f: Option<&str>| -> Result<usize> {
            f.ok_or_else(|| {
                GeodesyError::Parse(format!("{}:{}: expected i,j", path.display(), lineno + 1))
            })?
            .parse::<usize>()
            .map_err(|e| GeodesyError::Parse(format!("{}:{}: {e}", path.display(), lineno + 1)))
        };
        let i = parse(fields.next())?;
        let j = parse(fields.next())?;
        out.push((i, j));
    }
    Ok(out)
}

/// Writes distance rows `i,j,d`.
pub fn write_distances(path: &Path, rows: &[(usize, usize, f64)]) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    for (i, j, d) in rows {
        writeln!(out, "{i},{j},{d}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_through_csv_bit_exact() {
        let cloud = PointCloud::from_points(
            &[
                vec![0.1, 0.2, 0.30000000000000004],
                vec![-1.5e-300, 2.0f64.sqrt(), std::f64::consts::PI],
            ],
            2,
        )
        .unwrap();
        let dir = std::env::temp_dir().join("geodesy_cloud_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cloud.csv");
        cloud.write_csv(&path, true).unwrap();
        let back = PointCloud::read_csv(&path, 2, false).unwrap();
        assert_eq!(cloud, back);
    }

    #[test]
    fn rejects_non_finite_coordinates() {
        assert!(PointCloud::new(vec![0.0, f64::NAN], 2, 1).is_err());
        assert!(PointCloud::new(vec![0.0, f64::INFINITY], 2, 1).is_err());
    }

    #[test]
    fn rejects_ragged_rows() {
        let dir = std::env::temp_dir().join("geodesy_cloud_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("ragged.csv");
        std::fs::write(&path, "1.0,2.0\n3.0\n").unwrap();
        assert!(PointCloud::read_csv(&path, 1, false).is_err());
    }

    #[test]
    fn select_reorders_points() {
        let cloud =
            PointCloud::from_points(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]], 1).unwrap();
        let sub = cloud.select(&[2, 0]).unwrap();
        assert_eq!(sub.point(0), &[2.0, 0.0]);
        assert_eq!(sub.point(1), &[0.0, 0.0]);
    }
}
