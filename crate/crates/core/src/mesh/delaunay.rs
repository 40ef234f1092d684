//! Planar Delaunay stars by gift-wrapping with exact predicates.
//!
//! Degeneracies (collinear triples, cocircular quadruples) are resolved by
//! deterministic index-ordered symbolic perturbation, so every chart has a
//! uniquely defined star. Because the tie-breaking keys are global vertex
//! indices and the perturbed lower-hull structure is isometry-invariant,
//! isometric charts resolve the same ties the same way.

use robust::{incircle, orient2d, Coord};

/// Outcome of a single chart-star computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum ChartStar {
    /// Fan triangles `(center, a, b)` in chart-CCW order, as local indices.
    Fan(Vec<[usize; 2]>),
    /// Every candidate is collinear with the center: no 2-dimensional star.
    Collinear,
}

fn coord(p: [f64; 2]) -> Coord<f64> {
    Coord { x: p[0], y: p[1] }
}

/// Sign of the orientation of `(i, j, k)` under symbolic perturbation —
/// never zero. Ties are resolved as if each point `g` were displaced by an
/// infinitesimal amount that decreases astronomically with its global index,
/// the y-component dominating the x-component.
fn orient2d_sos(pts: &[[f64; 2]], gid: &[usize], i: usize, j: usize, k: usize) -> i8 {
    // Sort the arguments by global index, tracking permutation parity.
    let mut v = [i, j, k];
    let mut sign = 1i8;
    for a in 0..2 {
        for b in 0..2 - a {
            if gid[v[b]] > gid[v[b + 1]] {
                v.swap(b, b + 1);
                sign = -sign;
            }
        }
    }
    let (p1, p2, p3) = (pts[v[0]], pts[v[1]], pts[v[2]]);
    let d = orient2d(coord(p1), coord(p2), coord(p3));
    if d != 0.0 {
        return if d > 0.0 { sign } else { -sign };
    }
    for term in [p3[0] - p2[0], p2[1] - p3[1], p1[0] - p3[0]] {
        if term != 0.0 {
            return if term > 0.0 { sign } else { -sign };
        }
    }
    sign
}

/// Sign of the incircle determinant of `(a, b, c, d)` under symbolic
/// perturbation of the paraboloid lift heights (point `g`'s lift lowered by
/// an infinitesimal that shrinks with its global index). Positive means `d`
/// lies strictly inside the circle through `(a, b, c)` when that triangle is
/// counterclockwise. Returns zero only in the fully collinear case, which
/// callers treat as "outside".
fn incircle_sos(pts: &[[f64; 2]], gid: &[usize], a: usize, b: usize, c: usize, d: usize) -> i8 {
    let v = incircle(coord(pts[a]), coord(pts[b]), coord(pts[c]), coord(pts[d]));
    if v != 0.0 {
        return if v > 0.0 { 1 } else { -1 };
    }
    // Expansion of the lifted 4×4 determinant in the height perturbations:
    // the lowest-index point's term dominates. Each coefficient is ± the
    // orientation of the other three points.
    let mut order = [(gid[a], 0usize), (gid[b], 1), (gid[c], 2), (gid[d], 3)];
    order.sort_unstable();
    for &(_, pos) in &order {
        let term = match pos {
            0 => -orient2d(coord(pts[b]), coord(pts[c]), coord(pts[d])),
            1 => orient2d(coord(pts[a]), coord(pts[c]), coord(pts[d])),
            2 => -orient2d(coord(pts[a]), coord(pts[b]), coord(pts[d])),
            _ => orient2d(coord(pts[a]), coord(pts[b]), coord(pts[c])),
        };
        if term != 0.0 {
            return if term > 0.0 { 1 } else { -1 };
        }
    }
    // All four points exactly collinear: no circle exists even after the
    // height perturbation; report "outside" deterministically.
    0
}

/// The best apex strictly left of the directed edge `tail → head`: the
/// candidate whose circumcircle with the edge is empty on that side.
fn pivot(
    pts: &[[f64; 2]],
    gid: &[usize],
    cands: &[usize],
    tail: usize,
    head: usize,
) -> Option<usize> {
    let mut best: Option<usize> = None;
    for &r in cands {
        if r == tail || r == head {
            continue;
        }
        if orient2d_sos(pts, gid, tail, head, r) <= 0 {
            continue;
        }
        best = Some(match best {
            None => r,
            Some(q) => {
                if incircle_sos(pts, gid, tail, head, q, r) > 0 {
                    r
                } else {
                    q
                }
            }
        });
    }
    best
}

/// Delaunay star of `center` among the chart points, as fan triangles
/// `(center, a, b)` in counterclockwise chart orientation.
///
/// `gid` supplies the global vertex index per chart point for deterministic
/// symbolic tie-breaking. Points coinciding exactly with the center are
/// ignored.
pub(crate) fn chart_star(pts: &[[f64; 2]], gid: &[usize], center: usize) -> ChartStar {
    let cands: Vec<usize> = (0..pts.len())
        .filter(|&j| j != center && pts[j] != pts[center])
        .collect();
    if cands.len() < 2 {
        return ChartStar::Fan(Vec::new());
    }
    let reference = cands[0];
    if cands.iter().all(|&j| {
        orient2d(coord(pts[center]), coord(pts[reference]), coord(pts[j])) == 0.0
    }) {
        return ChartStar::Collinear;
    }

    // The nearest candidate: its diametral circle is strictly empty, so the
    // edge to it survives any infinitesimal perturbation.
    let p0 = *cands
        .iter()
        .min_by(|&&x, &&y| {
            let dx = sq_dist(pts[x], pts[center]);
            let dy = sq_dist(pts[y], pts[center]);
            dx.partial_cmp(&dy).unwrap().then(gid[x].cmp(&gid[y]))
        })
        .unwrap();

    let mut fan = Vec::new();
    // Counterclockwise walk from the starting edge.
    let mut p = p0;
    let mut closed = false;
    for _ in 0..=cands.len() {
        match pivot(pts, gid, &cands, center, p) {
            Some(q) => {
                fan.push([p, q]);
                if q == p0 {
                    closed = true;
                    break;
                }
                p = q;
            }
            None => break,
        }
    }
    if !closed {
        // Open fan: walk the other way round from the start edge.
        let mut p = p0;
        for _ in 0..=cands.len() {
            match pivot(pts, gid, &cands, p, center) {
                Some(q) => {
                    fan.push([q, p]);
                    p = q;
                }
                None => break,
            }
        }
    }
    ChartStar::Fan(fan)
}

fn sq_dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    dx * dx + dy * dy
}
