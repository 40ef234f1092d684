//! Extraction of well-separated subsamples (nets) and empirical
//! covering-radius estimation.

use rayon::prelude::*;

use crate::error::{GeodesyError, Result};
use crate::PointCloud;

/// A well-separated subsample of a parent cloud.
#[derive(Debug, Clone, PartialEq)]
pub struct NetResult {
    /// Indices into the parent cloud, in selection order.
    pub selected_indices: Vec<usize>,
    /// Guaranteed minimum pairwise distance between selected points (ε/2).
    pub separation: f64,
    /// Covering bound for the underlying surface: if the parent is an
    /// ε-cover, the net is an ε + ε/2 cover by the triangle inequality.
    pub cover_radius_bound: f64,
}

/// Outcome of net extraction.
#[derive(Debug, Clone, PartialEq)]
pub enum NetOutcome {
    /// The extracted net.
    Net(NetResult),
    /// The two anchors lie within ε/2 of each other; the chord between them
    /// already answers the caller's distance query.
    AnchorsTooClose { distance: f64 },
}

impl NetOutcome {
    /// The net, if extraction did not short-circuit.
    pub fn net(self) -> Option<NetResult> {
        match self {
            NetOutcome::Net(n) => Some(n),
            NetOutcome::AnchorsTooClose { .. } => None,
        }
    }
}

/// Greedy extraction of a maximal ε/2-separated subset, optionally seeded
/// with a pair of anchor points.
///
/// Points are scanned in parent index order after the anchors; each selected
/// point removes every remaining point strictly within ε/2 of it, so the
/// selected set is exactly ε/2-separated and every parent point ends up
/// within ε/2 of a selected point.
pub fn extract_net(
    cloud: &PointCloud,
    eps: f64,
    anchors: Option<(usize, usize)>,
) -> Result<NetOutcome> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(GeodesyError::invalid("net scale eps must be positive"));
    }
    if cloud.len() == 0 {
        return Err(GeodesyError::invalid("cannot extract a net from an empty cloud"));
    }
    let n = cloud.len();
    let half = eps / 2.0;

    let mut seeds = Vec::new();
    if let Some((i, j)) = anchors {
        if i >= n || j >= n {
            return Err(GeodesyError::invalid(format!(
                "anchor index out of range: ({i}, {j}) with {n} points"
            )));
        }
        if i == j {
            return Err(GeodesyError::invalid("anchor indices must be distinct"));
        }
        let d = cloud.dist(i, j);
        if d < half {
            return Ok(NetOutcome::AnchorsTooClose { distance: d });
        }
        seeds.push(i);
        seeds.push(j);
    }

    let mut removed = vec![false; n];
    let mut selected = Vec::new();
    let select = |p: usize, removed: &mut Vec<bool>, selected: &mut Vec<usize>| {
        selected.push(p);
        for q in 0..n {
            if !removed[q] && cloud.dist(p, q) < half {
                removed[q] = true;
            }
        }
    };
    for &s in &seeds {
        select(s, &mut removed, &mut selected);
    }
    for p in 0..n {
        if !removed[p] {
            select(p, &mut removed, &mut selected);
        }
    }

    Ok(NetOutcome::Net(NetResult {
        selected_indices: selected,
        separation: half,
        cover_radius_bound: 1.5 * eps,
    }))
}

/// Maximum over reference points of the distance to the nearest cloud point.
pub fn covering_radius(cloud: &PointCloud, reference: &PointCloud) -> Result<f64> {
    if reference.len() == 0 {
        return Err(GeodesyError::invalid("reference cloud must be nonempty"));
    }
    if cloud.len() == 0 {
        return Err(GeodesyError::invalid("cloud must be nonempty"));
    }
    if cloud.dim() != reference.dim() {
        return Err(GeodesyError::invalid(format!(
            "dimension mismatch: cloud {} vs reference {}",
            cloud.dim(),
            reference.dim()
        )));
    }
    Ok((0..reference.len())
        .into_par_iter()
        .map(|r| {
            let p = reference.point(r);
            (0..cloud.len())
                .map(|c| dist_slices(p, cloud.point(c)))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max))
}

/// Covering-radius estimate from the sample alone: the maximum over points of
/// the distance to their ⌈ln n⌉-th nearest neighbor.
pub fn estimate_eps(cloud: &PointCloud) -> Result<f64> {
    let n = cloud.len();
    if n < 2 {
        return Err(GeodesyError::invalid(
            "covering-radius estimation needs at least 2 points",
        ));
    }
    let k = (n as f64).ln().ceil().max(1.0) as usize;
    let k = k.min(n - 1);
    Ok((0..n)
        .into_par_iter()
        .map(|i| {
            let mut dists: Vec<f64> = (0..n)
                .filter(|&j| j != i)
                .map(|j| cloud.dist(i, j))
                .collect();
            let (_, kth, _) = dists.select_nth_unstable_by(k - 1, |a, b| {
                a.partial_cmp(b).expect("distances are finite")
            });
            *kth
        })
        .reduce(|| 0.0, f64::max))
}

fn dist_slices(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
