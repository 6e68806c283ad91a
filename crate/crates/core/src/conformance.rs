//! Empirical checks tying the discrete complex to exact Delaunay complexes
//! and to the separation and encompassing lemmas.

use std::collections::BTreeSet;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::canvas::{grid_counts, max_edge_length, BBox, Canvas, DEFAULT_VERTEX_CAP};
use crate::complex::{AbstractComplex, Simplex};
use crate::drvd::{color_canvas, extract_complex};
use crate::error::{Error, Result};
use crate::geodesic::{farthest_vertex, multi_front_dijkstra};
use crate::metric::{region_distortion_bound, uniform_distance, Metric, MetricField};
use crate::nets::net_report;
use crate::oracle::{euclidean_delaunay_bruteforce, uniform_delaunay, ExactDelaunay};

/// Absolute tolerance for geometric comparisons on unit-scale coordinates.
pub const GEOM_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EqualityVerdict {
    pub equal: bool,
    /// In the reference complex, absent from the discrete one.
    pub missing: Vec<Simplex>,
    /// In the discrete complex, absent from the reference one.
    pub extra: Vec<Simplex>,
}

/// Simplex-wise difference of two complexes over the same site indexing.
pub fn compare_complexes(reference: &AbstractComplex, discrete: &AbstractComplex) -> EqualityVerdict {
    let missing = reference.difference(discrete);
    let extra = discrete.difference(reference);
    EqualityVerdict {
        equal: missing.is_empty() && extra.is_empty(),
        missing,
        extra,
    }
}

/// Domain handling for the equality checks.
#[derive(Clone, Debug, PartialEq)]
pub struct EqualityConfig {
    /// Canvas domain; `None` uses the site bounding box grown by `inflation`.
    pub domain: Option<BBox>,
    /// Margin around the sites when `domain` is `None`; `None` uses the
    /// largest nearest-neighbour distance among the sites.
    pub inflation: Option<f64>,
    /// Only require exact simplices whose Voronoi face meets the domain.
    pub restrict_to_domain: bool,
    /// Simplices whose Voronoi face lies within this many canvas edge
    /// lengths of the domain boundary are neither required nor forbidden.
    pub boundary_margin: f64,
    /// Per-axis cell counts must be multiples of these (nested canvases).
    pub grid_multiple: Option<Vec<usize>>,
    pub vertex_cap: u64,
}

impl Default for EqualityConfig {
    fn default() -> Self {
        Self {
            domain: None,
            inflation: None,
            restrict_to_domain: true,
            boundary_margin: 2.0,
            grid_multiple: None,
            vertex_cap: DEFAULT_VERTEX_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EqualityReport {
    pub verdict: EqualityVerdict,
    pub canvas_vertices: usize,
    pub canvas_counts: Vec<usize>,
    /// Longest canvas edge.
    pub canvas_edge: f64,
    pub required: usize,
    /// Reference simplices too close to the boundary to decide.
    pub excluded_boundary: Vec<Simplex>,
    pub elapsed_secs: f64,
}

/// Site bounding box grown by the largest nearest-neighbour distance.
pub fn default_domain<P: AsRef<[f64]>>(sites: &[P], inflation: Option<f64>) -> Result<BBox> {
    let margin = match inflation {
        Some(m) => m,
        None => {
            let mut worst = 0.0f64;
            for (i, p) in sites.iter().enumerate() {
                let nn = sites
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, q)| dist(p.as_ref(), q.as_ref()))
                    .fold(f64::INFINITY, f64::min);
                if nn.is_finite() {
                    worst = worst.max(nn);
                }
            }
            if worst > 0.0 {
                worst
            } else {
                1.0
            }
        }
    };
    BBox::around(sites, margin)
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Builds the canvas used by the equality checks.
pub fn equality_canvas(domain: &BBox, canvas_edge: f64, cfg: &EqualityConfig) -> Result<Canvas> {
    let mut n = grid_counts(domain, canvas_edge)?;
    if let Some(m) = &cfg.grid_multiple {
        if m.len() != n.len() || m.iter().any(|&k| k == 0) {
            return Err(Error::InvalidCanvas("grid multiple per axis must be positive".into()));
        }
        for (k, &b) in n.iter_mut().zip(m) {
            *k = k.div_ceil(b) * b;
        }
    }
    Canvas::grid(domain, &n, cfg.vertex_cap)
}

fn grown(b: &BBox, m: f64) -> BBox {
    let mut g = *b;
    for i in 0..b.dim {
        g.lo[i] -= m;
        g.hi[i] += m;
    }
    g
}

/// Splits the reference complex into simplices required inside the domain
/// and ones too close to its boundary to decide.
fn required_simplices(ex: &ExactDelaunay, domain: &BBox, margin: f64, n_sites: usize) -> Result<(AbstractComplex, Vec<Simplex>)> {
    let core = domain.shrunk(margin);
    let outer = grown(domain, margin);
    let mut required = AbstractComplex::new();
    let mut excluded: BTreeSet<Simplex> = BTreeSet::new();
    for i in 0..n_sites {
        required.insert_with_faces(&[i as u32]);
    }
    for (t, c) in ex.tops.iter().zip(&ex.circumcenters) {
        if core.map_or(false, |b| b.contains(c, 0.0)) {
            required.insert_with_faces(t);
        } else if outer.contains(c, 0.0) {
            excluded.insert(t.clone());
        }
    }
    if ex.dim == 2 {
        let (olo, ohi) = ([outer.lo[0], outer.lo[1]], [outer.hi[0], outer.hi[1]]);
        for e in ex.voronoi_edges_2d()? {
            let s = vec![e.sites[0], e.sites[1]];
            let inside = core.map_or(false, |b| e.geom.meets_box([b.lo[0], b.lo[1]], [b.hi[0], b.hi[1]]));
            if inside {
                required.insert_with_faces(&s);
            } else if e.geom.meets_box(olo, ohi) {
                excluded.insert(s);
            }
        }
    }
    let excluded = excluded.into_iter().filter(|s| !required.contains(s)).collect();
    Ok((required, excluded))
}

fn equality_against(
    ex: ExactDelaunay,
    sites: &[Vec<f64>],
    field: &MetricField,
    canvas_edge: f64,
    cfg: &EqualityConfig,
) -> Result<EqualityReport> {
    if ex.degenerate {
        return Err(Error::DegenerateSites);
    }
    let start = Instant::now();
    let domain = match cfg.domain {
        Some(d) => d,
        None => default_domain(sites, cfg.inflation)?,
    };
    let canvas = equality_canvas(&domain, canvas_edge, cfg)?;
    let diagram = color_canvas(&canvas, field, sites)?;
    let discrete = extract_complex(&diagram);
    let e_c = max_edge_length(&canvas, &MetricField::euclidean()).e_max;
    let (required, excluded_boundary) = if cfg.restrict_to_domain {
        required_simplices(&ex, &domain, cfg.boundary_margin * e_c, sites.len())?
    } else {
        (ex.simplices.clone(), Vec::new())
    };
    let missing = required.difference(&discrete);
    let extra = discrete.difference(&ex.simplices);
    Ok(EqualityReport {
        verdict: EqualityVerdict {
            equal: missing.is_empty() && extra.is_empty(),
            missing,
            extra,
        },
        canvas_vertices: canvas.num_vertices(),
        canvas_counts: canvas.counts().to_vec(),
        canvas_edge: e_c,
        required: required.len(),
        excluded_boundary,
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}

fn to_points<P: AsRef<[f64]>>(sites: &[P]) -> Vec<Vec<f64>> {
    sites.iter().map(|p| p.as_ref().to_vec()).collect()
}

/// Discrete complex under the Euclidean metric against the brute-force Delaunay complex.
pub fn verify_euclidean_equality<P: AsRef<[f64]>>(sites: &[P], canvas_edge: f64) -> Result<EqualityReport> {
    verify_euclidean_equality_with(sites, canvas_edge, &EqualityConfig::default())
}

pub fn verify_euclidean_equality_with<P: AsRef<[f64]>>(
    sites: &[P],
    canvas_edge: f64,
    cfg: &EqualityConfig,
) -> Result<EqualityReport> {
    let pts = to_points(sites);
    let dim = pts.first().ok_or(Error::EmptyInput("sites"))?.len();
    let ex = euclidean_delaunay_bruteforce(&pts, dim)?;
    equality_against(ex, &pts, &MetricField::euclidean(), canvas_edge, cfg)
}

/// Discrete complex under a constant metric against the stretched-site Delaunay complex.
pub fn verify_uniform_equality_with<P: AsRef<[f64]>>(
    sites: &[P],
    m: &Metric,
    canvas_edge: f64,
    cfg: &EqualityConfig,
) -> Result<EqualityReport> {
    let pts = to_points(sites);
    let ex = uniform_delaunay(&pts, m, m.dim())?;
    equality_against(ex, &pts, &MetricField::uniform(*m), canvas_edge, cfg)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub epsilon: f64,
    pub delta: f64,
    /// Smallest distance between circumcenters of facet-adjacent tops, both inside the domain.
    pub min_adjacent_circumcenter_dist: Option<f64>,
    /// `δ²/4ε`.
    pub vertex_bound: f64,
    /// Smallest distance from an inside circumcenter to a Voronoi edge not incident to it (2D).
    pub min_foreign_face_dist: Option<f64>,
    /// `δ²/8ε`.
    pub face_bound: f64,
    pub adjacent_pairs: usize,
    pub foreign_checks: usize,
    pub holds: bool,
}

/// Separation of exact Euclidean Voronoi vertices and foreign faces for given ε, δ.
pub fn separation_with_params<P: AsRef<[f64]>>(sites: &[P], domain: &BBox, epsilon: f64, delta: f64) -> Result<SeparationReport> {
    let pts = to_points(sites);
    let dim = domain.dim;
    if pts.len() < dim + 2 {
        return Err(Error::TooFewSites {
            need: dim + 2,
            got: pts.len(),
        });
    }
    let ex = euclidean_delaunay_bruteforce(&pts, dim)?;
    if ex.degenerate {
        return Err(Error::DegenerateSites);
    }
    let tol = GEOM_TOL * domain.diameter();
    let inside: Vec<bool> = ex.circumcenters.iter().map(|c| domain.contains(c, tol)).collect();
    let mut min_adj: Option<f64> = None;
    let mut pairs = 0;
    for a in 0..ex.tops.len() {
        for b in (a + 1)..ex.tops.len() {
            let shared = ex.tops[a].iter().filter(|v| ex.tops[b].contains(v)).count();
            if shared == dim && inside[a] && inside[b] {
                let d = dist(&ex.circumcenters[a], &ex.circumcenters[b]);
                min_adj = Some(min_adj.map_or(d, |m: f64| m.min(d)));
                pairs += 1;
            }
        }
    }
    let mut min_face: Option<f64> = None;
    let mut checks = 0;
    if dim == 2 {
        let edges = ex.voronoi_edges_2d()?;
        for (t, c) in ex.tops.iter().zip(&ex.circumcenters) {
            if !domain.contains(c, tol) {
                continue;
            }
            for e in &edges {
                if t.contains(&e.sites[0]) && t.contains(&e.sites[1]) {
                    continue;
                }
                let d = e.geom.distance_to(c);
                min_face = Some(min_face.map_or(d, |m: f64| m.min(d)));
                checks += 1;
            }
        }
    }
    let vertex_bound = delta * delta / (4.0 * epsilon);
    let face_bound = delta * delta / (8.0 * epsilon);
    let holds = min_adj.map_or(true, |d| d >= vertex_bound - GEOM_TOL)
        && min_face.map_or(true, |d| d >= face_bound - GEOM_TOL);
    Ok(SeparationReport {
        epsilon,
        delta,
        min_adjacent_circumcenter_dist: min_adj,
        vertex_bound,
        min_foreign_face_dist: min_face,
        face_bound,
        adjacent_pairs: pairs,
        foreign_checks: checks,
        holds,
    })
}

/// Separation check with ε and δ measured on `canvas` (exact protection
/// when available, otherwise the discrete estimate).
pub fn verify_separation<P: AsRef<[f64]> + Sync>(sites: &[P], canvas: &Canvas) -> Result<SeparationReport> {
    let f = MetricField::euclidean();
    let report = net_report(canvas, &f, sites)?;
    let delta = report
        .delta_exact
        .or(report.delta_hat)
        .ok_or(Error::TooFewSites {
            need: canvas.dim() + 1,
            got: sites.len(),
        })?;
    separation_with_params(sites, canvas.bbox(), report.epsilon_hat, delta)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncompassingReport {
    pub holds: bool,
    pub site: usize,
    pub psi0: f64,
    pub epsilon_hat: f64,
    pub omega0: f64,
    /// Vertices coloured by the site but outside its `+ω₀` cell under the reference metric.
    pub plus_violations: usize,
    /// Vertices inside its `−ω₀` cell under the reference metric but coloured otherwise.
    pub minus_violations: usize,
    pub checked_vertices: usize,
}

/// Checks that the cell of site `p_index` under `f` lies between the
/// `−ω₀` and `+ω₀` power-shifted cells under the constant metric `f(p)`.
pub fn verify_encompassing<P: AsRef<[f64]>>(
    sites: &[P],
    f: &MetricField,
    p_index: usize,
    canvas: &Canvas,
) -> Result<EncompassingReport> {
    if p_index >= sites.len() {
        return Err(Error::InvalidSite {
            index: p_index,
            count: sites.len(),
        });
    }
    let front = multi_front_dijkstra(canvas, f, sites)?;
    let (_, epsilon_hat) = farthest_vertex(&front, canvas);
    let sv: Vec<&[f64]> = front.source_vertices.iter().map(|&v| canvas.vertex(v)).collect();
    let g0 = f.eval(sv[p_index]);
    let psi0 = region_distortion_bound(f, &g0, canvas.vertex_iter())?;
    let rho0 = 2.0 * psi0 * epsilon_hat;
    let omega0 = 2.0 * rho0 * rho0 * (psi0 * psi0 - 1.0);
    let mut plus = 0;
    let mut minus = 0;
    for v in 0..canvas.num_vertices() {
        let x = canvas.vertex(v);
        let d2: Vec<f64> = sv
            .iter()
            .map(|p| uniform_distance(&g0, x, p).map(|d| d * d))
            .collect::<Result<_>>()?;
        let own = d2[p_index];
        let others = d2
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != p_index)
            .map(|(_, d)| *d)
            .fold(f64::INFINITY, f64::min);
        let all = own.min(others);
        let colored = front.color[v] as usize == p_index;
        if colored && own > all + omega0 + GEOM_TOL {
            plus += 1;
        }
        if !colored && own + omega0 < others - GEOM_TOL {
            minus += 1;
        }
    }
    Ok(EncompassingReport {
        holds: plus == 0 && minus == 0,
        site: p_index,
        psi0,
        epsilon_hat,
        omega0,
        plus_violations: plus,
        minus_violations: minus,
        checked_vertices: canvas.num_vertices(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementReport {
    pub coarse_counts: Vec<usize>,
    pub fine_counts: Vec<usize>,
    pub coarse_vertices: usize,
    pub fine_vertices: usize,
    /// Fine-canvas complex compared against the coarse one.
    pub verdict: EqualityVerdict,
}

/// Complexes on the grid with `counts` cells and on its uniform halving.
pub fn verify_refinement<P: AsRef<[f64]>>(
    sites: &[P],
    f: &MetricField,
    domain: &BBox,
    counts: &[usize],
    vertex_cap: u64,
) -> Result<RefinementReport> {
    let coarse = Canvas::grid(domain, counts, vertex_cap)?;
    let fine_counts: Vec<usize> = counts.iter().map(|k| 2 * k).collect();
    let fine = Canvas::grid(domain, &fine_counts, vertex_cap)?;
    let a = extract_complex(&color_canvas(&coarse, f, sites)?);
    let b = extract_complex(&color_canvas(&fine, f, sites)?);
    Ok(RefinementReport {
        coarse_counts: counts.to_vec(),
        fine_counts,
        coarse_vertices: coarse.num_vertices(),
        fine_vertices: fine.num_vertices(),
        verdict: compare_complexes(&a, &b),
    })
}
