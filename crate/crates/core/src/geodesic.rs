//! Multi-front geodesic distance propagation over a canvas.
//!
//! Fronts grow from every site at once. Besides the usual edge relaxation
//! `dist[u] + w(u, v)`, each vertex carries an *anchor*: an earlier vertex on
//! its shortest path together with the distance accumulated up to it. A
//! vertex can then be reached by the straight chord from the anchor,
//! measured in the metric at the chord midpoint, which removes the
//! directional bias of pure graph paths. The anchor is kept while the metric
//! at the new vertex stays within `drift_tol` (relative Frobenius distance)
//! of the metric at the anchor; otherwise the path restarts from the
//! current vertex. Under a constant metric the anchor is always the site,
//! so distances are exact at every vertex.
//!
//! The queue is label-correcting with lazy deletion: a vertex is re-queued
//! whenever its label improves, so the result satisfies
//! `dist[v] <= dist[u] + w(u, v)` on every canvas edge.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::canvas::Canvas;
use crate::error::{Error, Result};
use crate::metric::{Metric, MetricField};

/// Default bound on the relative metric drift along a chord.
pub const DEFAULT_DRIFT_TOL: f64 = 0.02;

/// Relative width of a distance tie.
const TIE_REL: f64 = 1e-13;

/// Colour of a vertex no front has reached.
pub const UNREACHED: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeodesicOptions {
    /// Largest relative metric drift over which a vertex keeps propagating
    /// from its anchor; negative gives plain edge-path Dijkstra.
    pub drift_tol: f64,
    /// Vertices farther than this are left unreached.
    pub cutoff: f64,
}

impl Default for GeodesicOptions {
    fn default() -> Self {
        Self {
            drift_tol: DEFAULT_DRIFT_TOL,
            cutoff: f64::INFINITY,
        }
    }
}

/// Distances and nearest-site colours over the canvas vertices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontResult {
    pub dist: Vec<f64>,
    pub color: Vec<u32>,
    pub source_count: usize,
    /// Canvas vertex each site was snapped to.
    pub source_vertices: Vec<usize>,
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    d: f64,
    color: u32,
    v: u32,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // Reversed for a min-heap on (distance, colour, vertex).
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .d
            .total_cmp(&self.d)
            .then(other.color.cmp(&self.color))
            .then(other.v.cmp(&self.v))
    }
}

/// Snaps each site to its nearest canvas vertex.
pub fn snap_sites<P: AsRef<[f64]>>(c: &Canvas, sites: &[P]) -> Result<Vec<usize>> {
    if sites.is_empty() {
        return Err(Error::EmptyInput("sites"));
    }
    let mut owner: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
    let mut out = Vec::with_capacity(sites.len());
    for (i, s) in sites.iter().enumerate() {
        let s = s.as_ref();
        if s.len() != c.dim() {
            return Err(Error::DimensionError {
                expected: c.dim(),
                got: s.len(),
            });
        }
        let v = c.nearest_vertex(s).ok_or(Error::OutOfDomain(i))?;
        if let Some(&first) = owner.get(&v) {
            return Err(Error::SiteCollision {
                first,
                second: i,
                vertex: v,
            });
        }
        owner.insert(v, i);
        out.push(v);
    }
    Ok(out)
}

/// Incremental multi-front propagation; sources may be added one at a time.
pub struct FrontPropagator<'a> {
    canvas: &'a Canvas,
    field: &'a MetricField,
    opts: GeodesicOptions,
    constant: Option<Metric>,
    /// Row-major metric per vertex, only for non-constant fields.
    vertex_metric: Vec<f64>,
    dist: Vec<f64>,
    color: Vec<u32>,
    anchor: Vec<u32>,
    base: Vec<f64>,
    heap: BinaryHeap<Entry>,
    sources: Vec<usize>,
}

impl<'a> FrontPropagator<'a> {
    pub fn new(canvas: &'a Canvas, field: &'a MetricField, opts: GeodesicOptions) -> Result<Self> {
        let dim = canvas.dim();
        field.check_dim(dim)?;
        let n = canvas.num_vertices();
        let constant = field.constant(dim);
        let vertex_metric = if constant.is_some() {
            Vec::new()
        } else {
            let mut out = Vec::with_capacity(n * dim * dim);
            for p in canvas.vertex_iter() {
                let m = field.eval(p);
                for i in 0..dim {
                    for j in 0..dim {
                        out.push(m.get(i, j));
                    }
                }
            }
            out
        };
        Ok(Self {
            canvas,
            field,
            opts,
            constant,
            vertex_metric,
            dist: vec![f64::INFINITY; n],
            color: vec![UNREACHED; n],
            anchor: vec![u32::MAX; n],
            base: vec![0.0; n],
            heap: BinaryHeap::new(),
            sources: Vec::new(),
        })
    }

    /// Adds a source at canvas vertex `v` with the next colour and propagates.
    pub fn add_source(&mut self, v: usize) -> Result<u32> {
        if v >= self.dist.len() {
            return Err(Error::InvalidSite {
                index: v,
                count: self.dist.len(),
            });
        }
        if let Some(first) = self.sources.iter().position(|&s| s == v) {
            return Err(Error::SiteCollision {
                first,
                second: self.sources.len(),
                vertex: v,
            });
        }
        let c = self.sources.len() as u32;
        self.sources.push(v);
        self.seed(v, c);
        self.run();
        Ok(c)
    }

    fn seed(&mut self, v: usize, c: u32) {
        self.dist[v] = 0.0;
        self.color[v] = c;
        self.anchor[v] = v as u32;
        self.base[v] = 0.0;
        self.heap.push(Entry {
            d: 0.0,
            color: c,
            v: v as u32,
        });
    }

    /// Seeds all sources before propagating once.
    pub fn add_sources(&mut self, vs: &[usize]) -> Result<()> {
        for &v in vs {
            if v >= self.dist.len() {
                return Err(Error::InvalidSite {
                    index: v,
                    count: self.dist.len(),
                });
            }
            if let Some(first) = self.sources.iter().position(|&s| s == v) {
                return Err(Error::SiteCollision {
                    first,
                    second: self.sources.len(),
                    vertex: v,
                });
            }
            let c = self.sources.len() as u32;
            self.sources.push(v);
            self.seed(v, c);
        }
        self.run();
        Ok(())
    }

    #[inline]
    fn metric_at_vertex(&self, v: usize) -> &[f64] {
        let d2 = self.canvas.dim() * self.canvas.dim();
        &self.vertex_metric[v * d2..(v + 1) * d2]
    }

    #[inline]
    fn drift_ok(&self, a: usize, w: usize) -> bool {
        if self.opts.drift_tol < 0.0 {
            return false;
        }
        if self.constant.is_some() {
            return true;
        }
        let (ga, gw) = (self.metric_at_vertex(a), self.metric_at_vertex(w));
        let mut diff = 0.0;
        let mut norm = 0.0;
        for k in 0..ga.len() {
            diff += (ga[k] - gw[k]).powi(2);
            norm += ga[k] * ga[k];
        }
        diff <= self.opts.drift_tol * self.opts.drift_tol * norm
    }

    /// Length of the chord `a -> b` in the metric at its midpoint.
    #[inline]
    fn chord(&self, a: usize, b: usize) -> f64 {
        let dim = self.canvas.dim();
        let (pa, pb) = (self.canvas.vertex(a), self.canvas.vertex(b));
        let mut d = [0.0; 3];
        for i in 0..dim {
            d[i] = pb[i] - pa[i];
        }
        match &self.constant {
            Some(m) => m.norm(&d[..dim]),
            None => {
                let mut mid = [0.0; 3];
                for i in 0..dim {
                    mid[i] = 0.5 * (pa[i] + pb[i]);
                }
                self.field.eval(&mid[..dim]).norm(&d[..dim])
            }
        }
    }

    fn run(&mut self) {
        let canvas = self.canvas;
        while let Some(e) = self.heap.pop() {
            let u = e.v as usize;
            if e.d != self.dist[u] || e.color != self.color[u] {
                continue;
            }
            if e.d > self.opts.cutoff {
                self.heap.clear();
                break;
            }
            let (du, cu, au, bu) = (self.dist[u], self.color[u], self.anchor[u] as usize, self.base[u]);
            for &w in canvas.neighbors(u) {
                let w = w as usize;
                let scalar = du + self.chord(u, w);
                let mut cand = (scalar, u, du);
                if au != u && self.drift_ok(au, w) {
                    let vector = bu + self.chord(au, w);
                    if vector <= scalar {
                        cand = (vector, au, bu);
                    }
                }
                self.offer(w, cand.0, cu, cand.1, cand.2);
            }
        }
    }

    #[inline]
    fn offer(&mut self, w: usize, d: f64, c: u32, anchor: usize, base: f64) {
        let cur = self.dist[w];
        let tol = TIE_REL * cur.min(d);
        let better = d < cur - tol;
        let tie_lower = !better && d <= cur + tol && c < self.color[w];
        if !(better || tie_lower) {
            return;
        }
        self.dist[w] = d.min(cur);
        self.color[w] = c;
        self.anchor[w] = anchor as u32;
        self.base[w] = base;
        self.heap.push(Entry {
            d: self.dist[w],
            color: c,
            v: w as u32,
        });
    }

    pub fn dist(&self) -> &[f64] {
        &self.dist
    }

    pub fn color(&self) -> &[u32] {
        &self.color
    }

    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    pub fn into_result(self) -> FrontResult {
        FrontResult {
            source_count: self.sources.len(),
            dist: self.dist,
            color: self.color,
            source_vertices: self.sources,
        }
    }
}

/// Propagates fronts from all sites at once.
pub fn multi_front_dijkstra<P: AsRef<[f64]>>(c: &Canvas, f: &MetricField, sites: &[P]) -> Result<FrontResult> {
    multi_front_dijkstra_with(c, f, sites, GeodesicOptions::default())
}

pub fn multi_front_dijkstra_with<P: AsRef<[f64]>>(
    c: &Canvas,
    f: &MetricField,
    sites: &[P],
    opts: GeodesicOptions,
) -> Result<FrontResult> {
    let vs = snap_sites(c, sites)?;
    let mut prop = FrontPropagator::new(c, f, opts)?;
    prop.add_sources(&vs)?;
    Ok(prop.into_result())
}

/// Distances from a single canvas vertex; vertices beyond `cutoff` are infinite.
pub fn distance_field(c: &Canvas, f: &MetricField, source: usize, cutoff: f64) -> Result<Vec<f64>> {
    let mut prop = FrontPropagator::new(
        c,
        f,
        GeodesicOptions {
            cutoff,
            ..Default::default()
        },
    )?;
    prop.add_source(source)?;
    Ok(prop.into_result().dist)
}

/// The vertex with the largest distance (lowest index on ties).
pub fn farthest_vertex(fr: &FrontResult, _c: &Canvas) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (v, &d) in fr.dist.iter().enumerate() {
        if d > best.1 {
            best = (v, d);
        }
    }
    best
}

impl FrontResult {
    /// Maximum edge-relaxation violation `dist[v] - dist[u] - w(u, v)` over all edges.
    pub fn max_relaxation_violation(&self, c: &Canvas, f: &MetricField) -> f64 {
        let dim = c.dim();
        let mut worst = f64::NEG_INFINITY;
        for (u, v) in c.edges() {
            let (a, b) = (c.vertex(u), c.vertex(v));
            let mut d = [0.0; 3];
            let mut mid = [0.0; 3];
            for i in 0..dim {
                d[i] = b[i] - a[i];
                mid[i] = 0.5 * (a[i] + b[i]);
            }
            let w = f.eval(&mid[..dim]).norm(&d[..dim]);
            worst = worst.max(self.dist[v] - self.dist[u] - w);
            worst = worst.max(self.dist[u] - self.dist[v] - w);
        }
        worst
    }
}
