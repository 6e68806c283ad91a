//! Structured background triangulations ("canvases").
//!
//! A canvas is a regular grid over an axis-aligned box. In 2D each square is
//! split into two triangles with diagonals alternating in a checkerboard; in
//! 3D each cube is split into the six Kuhn tetrahedra around its main diagonal.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::MetricField;

/// Default cap on the number of canvas vertices.
pub const DEFAULT_VERTEX_CAP: u64 = 5_000_000;

/// Marker for a missing cell neighbor.
pub const NO_CELL: u32 = u32::MAX;

/// Axis-aligned box in 1 to 3 dimensions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub dim: usize,
    pub lo: [f64; 3],
    pub hi: [f64; 3],
}

impl BBox {
    pub fn new(lo: &[f64], hi: &[f64]) -> Result<Self> {
        let dim = lo.len();
        if dim != hi.len() {
            return Err(Error::DimensionError {
                expected: dim,
                got: hi.len(),
            });
        }
        if !(2..=3).contains(&dim) {
            return Err(Error::InvalidCanvas(format!("dimension {dim} not in 2..=3")));
        }
        let mut b = Self {
            dim,
            lo: [0.0; 3],
            hi: [0.0; 3],
        };
        for i in 0..dim {
            if !(hi[i] > lo[i]) || !lo[i].is_finite() || !hi[i].is_finite() {
                return Err(Error::InvalidCanvas(format!("degenerate extent on axis {i}")));
            }
            b.lo[i] = lo[i];
            b.hi[i] = hi[i];
        }
        Ok(b)
    }

    pub fn unit(dim: usize) -> Self {
        let mut b = Self {
            dim,
            lo: [0.0; 3],
            hi: [0.0; 3],
        };
        b.hi[..dim].fill(1.0);
        b
    }

    /// Bounding box of `points` grown by `margin` on every side.
    pub fn around<P: AsRef<[f64]>>(points: &[P], margin: f64) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyInput("points"))?.as_ref();
        let dim = first.len();
        let mut lo = first.to_vec();
        let mut hi = first.to_vec();
        for p in points {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::DimensionError {
                    expected: dim,
                    got: p.len(),
                });
            }
            for i in 0..dim {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        for i in 0..dim {
            lo[i] -= margin;
            hi[i] += margin;
        }
        Self::new(&lo, &hi)
    }

    #[inline]
    pub fn extent(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim).map(|i| self.extent(i)).product()
    }

    pub fn diameter(&self) -> f64 {
        (0..self.dim).map(|i| self.extent(i).powi(2)).sum::<f64>().sqrt()
    }

    /// Whether `p` lies in the box grown by `tol`.
    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        (0..self.dim).all(|i| p[i] >= self.lo[i] - tol && p[i] <= self.hi[i] + tol)
    }

    /// Distance from an inside point to the nearest box face (negative outside).
    pub fn depth(&self, p: &[f64]) -> f64 {
        (0..self.dim)
            .map(|i| (p[i] - self.lo[i]).min(self.hi[i] - p[i]))
            .fold(f64::INFINITY, f64::min)
    }

    /// The box shrunk by `m` on every side, or `None` if nothing remains.
    pub fn shrunk(&self, m: f64) -> Option<Self> {
        let mut b = *self;
        for i in 0..self.dim {
            b.lo[i] += m;
            b.hi[i] -= m;
            if !(b.hi[i] > b.lo[i]) {
                return None;
            }
        }
        Some(b)
    }
}

/// Longest canvas edges.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanvasEdgeStats {
    /// Longest Euclidean edge length.
    pub e_max: f64,
    /// Longest edge length under the field at the edge midpoint.
    pub e_max_metric: f64,
    pub edge_count: usize,
}

/// A structured simplicial grid with vertex and cell adjacency.
#[derive(Debug)]
pub struct Canvas {
    dim: usize,
    bbox: BBox,
    n: [usize; 3],
    h: [f64; 3],
    vertices: Vec<f64>,
    cells: Vec<u32>,
    adj_offsets: Vec<usize>,
    adj: Vec<u32>,
    cell_adj: OnceLock<Vec<u32>>,
}

/// Per-axis cell counts for the largest step `h` with `h·√dim ≤ target_edge`.
pub fn grid_counts(bbox: &BBox, target_edge: f64) -> Result<Vec<usize>> {
    if !(target_edge > 0.0) || !target_edge.is_finite() {
        return Err(Error::InvalidCanvas(format!("target edge {target_edge} must be positive")));
    }
    let root = (bbox.dim as f64).sqrt();
    (0..bbox.dim)
        .map(|i| {
            let raw = bbox.extent(i) * root / target_edge;
            // Absorb round-off so that exact divisions are not bumped up by one.
            let n = (raw * (1.0 - 1e-12)).ceil().max(1.0);
            if n > 1e9 {
                return Err(Error::CanvasTooDense {
                    vertices: u64::MAX,
                    cap: DEFAULT_VERTEX_CAP,
                });
            }
            Ok(n as usize)
        })
        .collect()
}

/// Builds the canvas whose longest edge is at most `target_edge`.
pub fn build_canvas(bbox: &BBox, target_edge: f64, dim: usize) -> Result<Canvas> {
    build_canvas_with_cap(bbox, target_edge, dim, DEFAULT_VERTEX_CAP)
}

pub fn build_canvas_with_cap(bbox: &BBox, target_edge: f64, dim: usize, cap: u64) -> Result<Canvas> {
    if dim != bbox.dim {
        return Err(Error::DimensionError {
            expected: bbox.dim,
            got: dim,
        });
    }
    let n = grid_counts(bbox, target_edge)?;
    Canvas::grid(bbox, &n, cap)
}

/// Number of vertices of a grid with `n` cells per axis.
pub fn vertex_count(n: &[usize]) -> u64 {
    n.iter().map(|&k| k as u64 + 1).product()
}

impl Canvas {
    /// Grid with exactly `n[i]` cells along axis `i`.
    pub fn grid(bbox: &BBox, n: &[usize], cap: u64) -> Result<Self> {
        let dim = bbox.dim;
        if n.len() != dim {
            return Err(Error::DimensionError {
                expected: dim,
                got: n.len(),
            });
        }
        if n.iter().any(|&k| k == 0) {
            return Err(Error::InvalidCanvas("zero cells along an axis".into()));
        }
        let count = vertex_count(n);
        if count > cap || count > u32::MAX as u64 / 8 {
            return Err(Error::CanvasTooDense { vertices: count, cap });
        }
        let mut nn = [0usize; 3];
        let mut h = [0.0; 3];
        for i in 0..dim {
            nn[i] = n[i];
            h[i] = bbox.extent(i) / n[i] as f64;
        }
        let vertices = grid_vertices(bbox, &nn);
        let cells = if dim == 2 { triangles(&nn) } else { kuhn_tets(&nn) };
        let (adj_offsets, adj) = vertex_adjacency(count as usize, &cells, dim + 1);
        Ok(Self {
            dim,
            bbox: *bbox,
            n: nn,
            h,
            vertices,
            cells,
            adj_offsets,
            adj,
            cell_adj: OnceLock::new(),
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn bbox(&self) -> &BBox {
        &self.bbox
    }

    /// Cells per axis.
    pub fn counts(&self) -> &[usize] {
        &self.n[..self.dim]
    }

    /// Grid step per axis.
    pub fn steps(&self) -> &[f64] {
        &self.h[..self.dim]
    }

    /// Largest grid step.
    pub fn max_step(&self) -> f64 {
        self.steps().iter().copied().fold(0.0, f64::max)
    }

    #[inline]
    pub fn num_vertices(&self) -> usize {
        self.vertices.len() / self.dim
    }

    #[inline]
    pub fn num_cells(&self) -> usize {
        self.cells.len() / (self.dim + 1)
    }

    #[inline]
    pub fn vertex(&self, v: usize) -> &[f64] {
        &self.vertices[v * self.dim..(v + 1) * self.dim]
    }

    #[inline]
    pub fn cell(&self, c: usize) -> &[u32] {
        let k = self.dim + 1;
        &self.cells[c * k..(c + 1) * k]
    }

    /// Edge-connected neighbors of `v`, in increasing index order.
    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[self.adj_offsets[v]..self.adj_offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj_offsets[v + 1] - self.adj_offsets[v]
    }

    /// Each undirected edge once, as `(lo, hi)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_vertices())
            .flat_map(move |u| self.neighbors(u).iter().map(move |&w| (u, w as usize)))
            .filter(|(u, w)| u < w)
    }

    /// Facet neighbors of cell `c`; entry `i` is the cell across the facet
    /// opposite local vertex `i`, or [`NO_CELL`] on the boundary.
    pub fn cell_neighbors(&self, c: usize) -> &[u32] {
        let k = self.dim + 1;
        let adj = self.cell_adj.get_or_init(|| cell_adjacency(&self.cells, k));
        &adj[c * k..(c + 1) * k]
    }

    /// Grid coordinates of vertex `v`.
    pub fn grid_index(&self, v: usize) -> [usize; 3] {
        let mut out = [0; 3];
        let mut r = v;
        for i in 0..self.dim {
            out[i] = r % (self.n[i] + 1);
            r /= self.n[i] + 1;
        }
        out
    }

    pub fn vertex_at(&self, idx: &[usize]) -> usize {
        let mut v = 0;
        for i in (0..self.dim).rev() {
            v = v * (self.n[i] + 1) + idx[i];
        }
        v
    }

    /// Canvas vertex nearest to `p`, or `None` if `p` is outside the box.
    pub fn nearest_vertex(&self, p: &[f64]) -> Option<usize> {
        if p.len() != self.dim {
            return None;
        }
        let tol = 1e-9 * self.bbox.diameter();
        if !self.bbox.contains(p, tol) {
            return None;
        }
        let mut idx = [0usize; 3];
        for i in 0..self.dim {
            let s = ((p[i] - self.bbox.lo[i]) / self.h[i]).round();
            idx[i] = (s.max(0.0) as usize).min(self.n[i]);
        }
        Some(self.vertex_at(&idx[..self.dim]))
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        let idx = self.grid_index(v);
        (0..self.dim).any(|i| idx[i] == 0 || idx[i] == self.n[i])
    }

    pub fn cell_touches_boundary(&self, c: usize) -> bool {
        self.cell(c).iter().any(|&v| self.is_boundary_vertex(v as usize))
    }

    /// Signed volume of cell `c` (positive for every cell of a built canvas).
    pub fn signed_volume(&self, c: usize) -> f64 {
        let cell = self.cell(c);
        let p: Vec<&[f64]> = cell.iter().map(|&v| self.vertex(v as usize)).collect();
        signed_volume(&p)
    }

    pub fn cell_centroid(&self, c: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for &v in self.cell(c) {
            for (o, x) in out.iter_mut().zip(self.vertex(v as usize)) {
                *o += x;
            }
        }
        let k = (self.dim + 1) as f64;
        out.iter_mut().for_each(|o| *o /= k);
        out
    }

    /// All vertex coordinates, `dim` values per vertex.
    pub fn coordinates(&self) -> &[f64] {
        &self.vertices
    }

    /// Iterates vertex coordinates as slices.
    pub fn vertex_iter(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.vertices.chunks_exact(self.dim)
    }
}

/// Signed volume of a simplex given by `dim + 1` points (area in 2D).
pub fn signed_volume(p: &[&[f64]]) -> f64 {
    match p.len() {
        3 => {
            let (a, b, c) = (p[0], p[1], p[2]);
            0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
        }
        4 => {
            let d = |q: &[f64]| [q[0] - p[0][0], q[1] - p[0][1], q[2] - p[0][2]];
            let (u, v, w) = (d(p[1]), d(p[2]), d(p[3]));
            (u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0])
                + u[2] * (v[0] * w[1] - v[1] * w[0]))
                / 6.0
        }
        _ => 0.0,
    }
}

/// Longest Euclidean and metric edge lengths.
pub fn max_edge_length(c: &Canvas, f: &MetricField) -> CanvasEdgeStats {
    let dim = c.dim();
    let mut e_max = 0.0f64;
    let mut e_max_metric = 0.0f64;
    let mut edge_count = 0;
    let mut d = [0.0; 3];
    let mut mid = [0.0; 3];
    for (u, w) in c.edges() {
        let (a, b) = (c.vertex(u), c.vertex(w));
        for i in 0..dim {
            d[i] = b[i] - a[i];
            mid[i] = 0.5 * (a[i] + b[i]);
        }
        let e = d[..dim].iter().map(|x| x * x).sum::<f64>().sqrt();
        e_max = e_max.max(e);
        e_max_metric = e_max_metric.max(f.eval(&mid[..dim]).norm(&d[..dim]));
        edge_count += 1;
    }
    CanvasEdgeStats {
        e_max,
        e_max_metric,
        edge_count,
    }
}

fn grid_vertices(bbox: &BBox, n: &[usize; 3]) -> Vec<f64> {
    let dim = bbox.dim;
    let coord = |axis: usize, i: usize| {
        if i == n[axis] {
            bbox.hi[axis]
        } else {
            bbox.lo[axis] + bbox.extent(axis) * i as f64 / n[axis] as f64
        }
    };
    let mut out = Vec::with_capacity(vertex_count(&n[..dim]) as usize * dim);
    if dim == 2 {
        for j in 0..=n[1] {
            for i in 0..=n[0] {
                out.extend([coord(0, i), coord(1, j)]);
            }
        }
    } else {
        for k in 0..=n[2] {
            for j in 0..=n[1] {
                for i in 0..=n[0] {
                    out.extend([coord(0, i), coord(1, j), coord(2, k)]);
                }
            }
        }
    }
    out
}

fn triangles(n: &[usize; 3]) -> Vec<u32> {
    let row = n[0] + 1;
    let mut out = Vec::with_capacity(6 * n[0] * n[1]);
    for j in 0..n[1] {
        for i in 0..n[0] {
            let v00 = (j * row + i) as u32;
            let v10 = v00 + 1;
            let v01 = v00 + row as u32;
            let v11 = v01 + 1;
            if (i + j) % 2 == 0 {
                out.extend([v00, v10, v11, v00, v11, v01]);
            } else {
                out.extend([v00, v10, v01, v10, v11, v01]);
            }
        }
    }
    out
}

fn kuhn_tets(n: &[usize; 3]) -> Vec<u32> {
    const PERMS: [([usize; 3], bool); 6] = [
        ([0, 1, 2], true),
        ([1, 2, 0], true),
        ([2, 0, 1], true),
        ([0, 2, 1], false),
        ([2, 1, 0], false),
        ([1, 0, 2], false),
    ];
    let (sx, sy) = (1, n[0] + 1);
    let sz = sy * (n[1] + 1);
    let stride = [sx, sy, sz];
    let mut out = Vec::with_capacity(24 * n[0] * n[1] * n[2]);
    for k in 0..n[2] {
        for j in 0..n[1] {
            for i in 0..n[0] {
                let base = i * sx + j * sy + k * sz;
                for (perm, even) in PERMS {
                    let v1 = base + stride[perm[0]];
                    let v2 = v1 + stride[perm[1]];
                    let v3 = v2 + stride[perm[2]];
                    if even {
                        out.extend([base as u32, v1 as u32, v2 as u32, v3 as u32]);
                    } else {
                        out.extend([base as u32, v1 as u32, v3 as u32, v2 as u32]);
                    }
                }
            }
        }
    }
    out
}

fn vertex_adjacency(nv: usize, cells: &[u32], k: usize) -> (Vec<usize>, Vec<u32>) {
    let mut keys: Vec<u64> = Vec::with_capacity(cells.len() / k * k * (k - 1) / 2);
    for cell in cells.chunks_exact(k) {
        for a in 0..k {
            for b in (a + 1)..k {
                let (x, y) = (cell[a].min(cell[b]), cell[a].max(cell[b]));
                keys.push(((x as u64) << 32) | y as u64);
            }
        }
    }
    keys.sort_unstable();
    keys.dedup();
    let mut deg = vec![0usize; nv + 1];
    for &key in &keys {
        deg[(key >> 32) as usize] += 1;
        deg[(key & 0xffff_ffff) as usize] += 1;
    }
    let mut offsets = vec![0usize; nv + 1];
    for v in 0..nv {
        offsets[v + 1] = offsets[v] + deg[v];
    }
    let mut fill = offsets.clone();
    let mut adj = vec![0u32; offsets[nv]];
    for &key in &keys {
        let (x, y) = ((key >> 32) as usize, (key & 0xffff_ffff) as usize);
        adj[fill[x]] = y as u32;
        fill[x] += 1;
        adj[fill[y]] = x as u32;
        fill[y] += 1;
    }
    for v in 0..nv {
        adj[offsets[v]..offsets[v + 1]].sort_unstable();
    }
    (offsets, adj)
}

fn cell_adjacency(cells: &[u32], k: usize) -> Vec<u32> {
    let mut facets: Vec<([u32; 3], u32, u8)> = Vec::with_capacity(cells.len());
    for (c, cell) in cells.chunks_exact(k).enumerate() {
        for skip in 0..k {
            let mut key = [u32::MAX; 3];
            let mut t = 0;
            for (i, &v) in cell.iter().enumerate() {
                if i != skip {
                    key[t] = v;
                    t += 1;
                }
            }
            key[..k - 1].sort_unstable();
            facets.push((key, c as u32, skip as u8));
        }
    }
    facets.sort_unstable();
    let mut out = vec![NO_CELL; cells.len()];
    for pair in facets.windows(2) {
        if pair[0].0 == pair[1].0 {
            let (a, b) = (&pair[0], &pair[1]);
            out[a.1 as usize * k + a.2 as usize] = b.1;
            out[b.1 as usize * k + b.2 as usize] = a.1;
        }
    }
    out
}
