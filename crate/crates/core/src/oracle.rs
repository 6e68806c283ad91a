//! Brute-force Delaunay complexes for Euclidean and constant metrics.
//!
//! Every `(dim+1)`-tuple of sites is tested for an empty circumball; the
//! survivors and their faces form the complex. Quadratic-in-tuples cost is
//! fine for the few dozen sites these checks use.

use nalgebra::{DMatrix, DVector};

use crate::complex::{AbstractComplex, Simplex};
use crate::error::{Error, Result};
use crate::metric::{sqrt_metric, Metric};

/// Relative width of the co-spherical band `| |q - c| - r | <= COSPHERICAL_TOL * r`.
pub const COSPHERICAL_TOL: f64 = 1e-9;

/// Relative volume below which a tuple is treated as flat.
const FLAT_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct ExactDelaunay {
    pub dim: usize,
    pub simplices: AbstractComplex,
    /// Top simplices in lexicographic order.
    pub tops: Vec<Simplex>,
    /// Circumcenter per top simplex, in input coordinates.
    pub circumcenters: Vec<Vec<f64>>,
    /// Circumradius per top simplex, measured in the metric of the construction.
    pub circumradii: Vec<f64>,
    /// Set when more than `dim + 1` sites share a circumsphere within tolerance.
    pub degenerate: bool,
    work_points: Vec<Vec<f64>>,
    work_centers: Vec<Vec<f64>>,
    back: Option<DMatrix<f64>>,
}

/// Circumcenter and radius of `dim + 1` points, or `None` for a flat tuple.
pub fn circumsphere(p: &[&[f64]]) -> Option<(Vec<f64>, f64)> {
    let dim = p[0].len();
    if p.len() != dim + 1 {
        return None;
    }
    let mut a = DMatrix::zeros(dim, dim);
    let mut b = DVector::zeros(dim);
    let mut scale = 1.0f64;
    for i in 0..dim {
        let mut n2 = 0.0;
        for j in 0..dim {
            let d = p[i + 1][j] - p[0][j];
            a[(i, j)] = 2.0 * d;
            n2 += d * d;
        }
        b[i] = n2;
        scale *= 2.0 * n2.sqrt();
    }
    let det = a.determinant();
    if !(det.abs() > FLAT_TOL * scale) {
        return None;
    }
    let x = a.lu().solve(&b)?;
    let c: Vec<f64> = (0..dim).map(|j| p[0][j] + x[j]).collect();
    let r = x.norm();
    Some((c, r))
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Calls `f` on each increasing `k`-tuple of `0..n`.
fn for_each_tuple(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < n - k + i {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in (i + 1)..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Euclidean Delaunay complex by exhaustive empty-circumball tests.
pub fn euclidean_delaunay_bruteforce<P: AsRef<[f64]>>(sites: &[P], dim: usize) -> Result<ExactDelaunay> {
    let pts: Vec<Vec<f64>> = sites.iter().map(|p| p.as_ref().to_vec()).collect();
    build(pts, dim, None)
}

fn build(points: Vec<Vec<f64>>, dim: usize, back: Option<DMatrix<f64>>) -> Result<ExactDelaunay> {
    if !(2..=3).contains(&dim) {
        return Err(Error::Unsupported(format!("dimension {dim}")));
    }
    if let Some(p) = points.iter().find(|p| p.len() != dim) {
        return Err(Error::DimensionError {
            expected: dim,
            got: p.len(),
        });
    }
    if points.len() < dim + 1 {
        return Err(Error::TooFewSites {
            need: dim + 1,
            got: points.len(),
        });
    }
    let n = points.len();
    let mut tops = Vec::new();
    let mut centers = Vec::new();
    let mut radii = Vec::new();
    let mut degenerate = false;
    for_each_tuple(n, dim + 1, |t| {
        let p: Vec<&[f64]> = t.iter().map(|&i| points[i].as_slice()).collect();
        let Some((c, r)) = circumsphere(&p) else {
            return;
        };
        let mut empty = true;
        let mut cospherical = false;
        for (q, pq) in points.iter().enumerate() {
            if t.contains(&q) {
                continue;
            }
            let d = dist(pq, &c);
            if (d - r).abs() <= COSPHERICAL_TOL * r {
                cospherical = true;
            } else if d < r {
                empty = false;
                break;
            }
        }
        if empty {
            degenerate |= cospherical;
            tops.push(t.iter().map(|&i| i as u32).collect::<Simplex>());
            centers.push(c);
            radii.push(r);
        }
    });
    let simplices = AbstractComplex::from_simplices(&tops);
    let circumcenters = match &back {
        Some(m) => centers.iter().map(|c| apply(m, c)).collect(),
        None => centers.clone(),
    };
    Ok(ExactDelaunay {
        dim,
        simplices,
        tops,
        circumcenters,
        circumradii: radii,
        degenerate,
        work_points: points,
        work_centers: centers,
        back,
    })
}

fn apply(m: &DMatrix<f64>, p: &[f64]) -> Vec<f64> {
    (m * DVector::from_column_slice(p)).iter().copied().collect()
}

/// `F p` for each site, with `F` the symmetric square root of `m`.
pub fn stretch_sites<P: AsRef<[f64]>>(sites: &[P], m: &Metric) -> Result<Vec<Vec<f64>>> {
    let f = sqrt_metric(m)?;
    sites
        .iter()
        .map(|p| {
            let p = p.as_ref();
            if p.len() != m.dim() {
                return Err(Error::DimensionError {
                    expected: m.dim(),
                    got: p.len(),
                });
            }
            Ok(apply(&f, p))
        })
        .collect()
}

/// Delaunay complex under a constant metric, via the stretched sites.
pub fn uniform_delaunay<P: AsRef<[f64]>>(sites: &[P], m: &Metric, dim: usize) -> Result<ExactDelaunay> {
    if m.dim() != dim {
        return Err(Error::DimensionError {
            expected: dim,
            got: m.dim(),
        });
    }
    let stretched = stretch_sites(sites, m)?;
    let inv = sqrt_metric(m)?
        .try_inverse()
        .ok_or_else(|| Error::InvalidMetric("singular square root".into()))?;
    build(stretched, dim, Some(inv))
}

/// A bounded or unbounded Voronoi edge of a planar diagram.
#[derive(Clone, Debug, PartialEq)]
pub enum VoronoiEdgeGeom {
    Segment([f64; 2], [f64; 2]),
    Ray { origin: [f64; 2], dir: [f64; 2] },
}

#[derive(Clone, Debug, PartialEq)]
pub struct VoronoiEdge {
    /// The dual Delaunay edge.
    pub sites: [u32; 2],
    pub geom: VoronoiEdgeGeom,
}

impl VoronoiEdgeGeom {
    /// Distance from `p` to the closed segment or ray.
    pub fn distance_to(&self, p: &[f64]) -> f64 {
        let (o, d, tmax) = match *self {
            VoronoiEdgeGeom::Segment(a, b) => (a, [b[0] - a[0], b[1] - a[1]], 1.0),
            VoronoiEdgeGeom::Ray { origin, dir } => (origin, dir, f64::INFINITY),
        };
        let dd = d[0] * d[0] + d[1] * d[1];
        let t = if dd > 0.0 {
            (((p[0] - o[0]) * d[0] + (p[1] - o[1]) * d[1]) / dd).clamp(0.0, tmax)
        } else {
            0.0
        };
        ((o[0] + t * d[0] - p[0]).powi(2) + (o[1] + t * d[1] - p[1]).powi(2)).sqrt()
    }

    /// Parameter interval `[t0, t1]` of the part inside the box, if any.
    pub fn clip(&self, lo: [f64; 2], hi: [f64; 2]) -> Option<(f64, f64)> {
        let (o, d, mut t1) = match *self {
            VoronoiEdgeGeom::Segment(a, b) => (a, [b[0] - a[0], b[1] - a[1]], 1.0),
            VoronoiEdgeGeom::Ray { origin, dir } => (origin, dir, f64::INFINITY),
        };
        let mut t0 = 0.0f64;
        for i in 0..2 {
            if d[i] == 0.0 {
                if o[i] < lo[i] || o[i] > hi[i] {
                    return None;
                }
            } else {
                let (a, b) = ((lo[i] - o[i]) / d[i], (hi[i] - o[i]) / d[i]);
                t0 = t0.max(a.min(b));
                t1 = t1.min(a.max(b));
            }
        }
        (t0 <= t1).then_some((t0, t1))
    }

    pub fn meets_box(&self, lo: [f64; 2], hi: [f64; 2]) -> bool {
        self.clip(lo, hi).is_some()
    }
}

impl ExactDelaunay {
    /// Indices into `tops` of the top simplices containing `face`.
    pub fn cofaces(&self, face: &[u32]) -> Vec<usize> {
        self.tops
            .iter()
            .enumerate()
            .filter(|(_, t)| face.iter().all(|v| t.contains(v)))
            .map(|(i, _)| i)
            .collect()
    }

    /// Largest relative spread of vertex-to-circumcenter distances.
    pub fn max_equidistance_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for (t, c) in self.tops.iter().zip(&self.work_centers) {
            let ds: Vec<f64> = t.iter().map(|&i| dist(&self.work_points[i as usize], c)).collect();
            let hi = ds.iter().copied().fold(f64::MIN, f64::max);
            let lo = ds.iter().copied().fold(f64::MAX, f64::min);
            worst = worst.max((hi - lo) / hi);
        }
        worst
    }

    /// Smallest margin `|q - c|² - r²` (relative to `r²`) over tops and foreign sites.
    pub fn min_empty_ball_margin(&self) -> f64 {
        let mut worst = f64::INFINITY;
        for ((t, c), r) in self.tops.iter().zip(&self.work_centers).zip(&self.circumradii) {
            for (q, p) in self.work_points.iter().enumerate() {
                if !t.contains(&(q as u32)) {
                    worst = worst.min((dist(p, c).powi(2) - r * r) / (r * r));
                }
            }
        }
        worst
    }

    /// Power protection `sqrt(min |q - c|² - r²)` of top `i` against sites not in it.
    pub fn protection(&self, i: usize) -> f64 {
        let (t, c, r) = (&self.tops[i], &self.work_centers[i], self.circumradii[i]);
        let nearest = self
            .work_points
            .iter()
            .enumerate()
            .filter(|(q, _)| !t.contains(&(*q as u32)))
            .map(|(_, p)| dist(p, c))
            .fold(f64::INFINITY, f64::min);
        (nearest * nearest - r * r).max(0.0).sqrt()
    }

    /// Voronoi edges dual to the Delaunay edges (2D only).
    pub fn voronoi_edges_2d(&self) -> Result<Vec<VoronoiEdge>> {
        if self.dim != 2 {
            return Err(Error::Unsupported("Voronoi edges are planar only".into()));
        }
        let mut out = Vec::new();
        for e in self.simplices.of_dim(1) {
            let co = self.cofaces(e);
            let geom = match co.as_slice() {
                [a, b] => {
                    let (ca, cb) = (&self.work_centers[*a], &self.work_centers[*b]);
                    VoronoiEdgeGeom::Segment([ca[0], ca[1]], [cb[0], cb[1]])
                }
                [a] => {
                    let t = &self.tops[*a];
                    let opp = *t.iter().find(|v| !e.contains(v)).unwrap() as usize;
                    let (p, q) = (&self.work_points[e[0] as usize], &self.work_points[e[1] as usize]);
                    let o = &self.work_points[opp];
                    let mut n = [-(q[1] - p[1]), q[0] - p[0]];
                    let side = (o[0] - p[0]) * n[0] + (o[1] - p[1]) * n[1];
                    if side > 0.0 {
                        n = [-n[0], -n[1]];
                    }
                    let c = &self.work_centers[*a];
                    VoronoiEdgeGeom::Ray {
                        origin: [c[0], c[1]],
                        dir: n,
                    }
                }
                _ => continue,
            };
            out.push(VoronoiEdge {
                sites: [e[0], e[1]],
                geom: self.map_back(geom),
            });
        }
        Ok(out)
    }

    fn map_back(&self, g: VoronoiEdgeGeom) -> VoronoiEdgeGeom {
        let Some(m) = &self.back else {
            return g;
        };
        let map = |p: [f64; 2]| {
            let v = apply(m, &p);
            [v[0], v[1]]
        };
        match g {
            VoronoiEdgeGeom::Segment(a, b) => VoronoiEdgeGeom::Segment(map(a), map(b)),
            VoronoiEdgeGeom::Ray { origin, dir } => VoronoiEdgeGeom::Ray {
                origin: map(origin),
                dir: map(dir),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuples_enumerate_binomially() {
        let mut count = 0;
        for_each_tuple(6, 3, |_| count += 1);
        assert_eq!(count, 20);
        let mut all = 0;
        for_each_tuple(3, 3, |t| {
            assert_eq!(t, &[0, 1, 2]);
            all += 1;
        });
        assert_eq!(all, 1);
    }

    #[test]
    fn segment_clip() {
        let s = VoronoiEdgeGeom::Segment([-1.0, 0.5], [0.5, 0.5]);
        assert_eq!(s.clip([0.0, 0.0], [1.0, 1.0]), Some((2.0 / 3.0, 1.0)));
        let r = VoronoiEdgeGeom::Ray {
            origin: [2.0, 2.0],
            dir: [1.0, 0.0],
        };
        assert!(!r.meets_box([0.0, 0.0], [1.0, 1.0]));
    }
}
