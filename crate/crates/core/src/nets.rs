//! Farthest-point nets and measurement of their (ε, μ, δ) parameters.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canvas::{BBox, Canvas};
use crate::complex::Simplex;
use crate::drvd::{extract_complex, witnesses_of, DiscreteDiagram};
use crate::error::{Error, Result};
use crate::geodesic::{distance_field, farthest_vertex, multi_front_dijkstra, FrontPropagator, GeodesicOptions};
use crate::metric::MetricField;
use crate::oracle::uniform_delaunay;

/// Largest net [`generate_net`] builds before giving up.
pub const NET_SITE_CAP: usize = 10_000;

/// Largest site count for the exact protection cross-check.
pub const EXACT_CROSSCHECK_MAX_SITES: usize = 100;

/// Measured net parameters on a canvas.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetReport {
    pub site_count: usize,
    /// Largest distance from a canvas vertex to its nearest site.
    pub epsilon_hat: f64,
    pub farthest_vertex: usize,
    /// Smallest geodesic distance between two sites.
    pub mu_hat: Option<f64>,
    pub closest_pair: Option<(usize, usize)>,
    /// Smallest power protection over top simplices, from discrete Voronoi-vertex estimates.
    pub delta_hat: Option<f64>,
    pub delta_simplex: Option<Simplex>,
    /// Exact protection over simplices with circumcenter in the canvas box
    /// (constant metrics only).
    pub delta_exact: Option<f64>,
    pub iota_hat: Option<f64>,
    pub lambda_hat: Option<f64>,
    /// Sites whose discrete cell touches the canvas boundary.
    pub boundary_flags: Vec<usize>,
    pub canvas_vertices: usize,
    pub canvas_steps: Vec<f64>,
    pub canvas_bbox: BBox,
}

/// Inserts farthest canvas vertices until every vertex is within `epsilon_target`.
pub fn generate_net(c: &Canvas, f: &MetricField, epsilon_target: f64, seed_point: &[f64]) -> Result<Vec<Vec<f64>>> {
    if !(epsilon_target > 0.0) {
        return Err(Error::InvalidParams("epsilon_target must be positive".into()));
    }
    let seed = c.nearest_vertex(seed_point).ok_or(Error::OutOfDomain(0))?;
    let mut prop = FrontPropagator::new(c, f, GeodesicOptions::default())?;
    prop.add_source(seed)?;
    loop {
        let (v, d) = argmax(prop.dist());
        if d <= epsilon_target {
            break;
        }
        if prop.sources().len() >= NET_SITE_CAP {
            return Err(Error::NetOverflow(NET_SITE_CAP));
        }
        prop.add_source(v)?;
    }
    Ok(prop.sources().iter().map(|&v| c.vertex(v).to_vec()).collect())
}

fn argmax(d: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (v, &x) in d.iter().enumerate() {
        if x > best.1 {
            best = (v, x);
        }
    }
    best
}

/// Exact protection of a site set under a constant metric, over simplices
/// whose circumcenter lies in `domain` (grown by `tol`).
pub fn exact_protection<P: AsRef<[f64]>>(
    sites: &[P],
    m: &crate::metric::Metric,
    domain: &BBox,
    tol: f64,
) -> Result<Option<f64>> {
    let ex = uniform_delaunay(sites, m, domain.dim)?;
    let mut best: Option<f64> = None;
    for (i, c) in ex.circumcenters.iter().enumerate() {
        if domain.contains(c, tol) {
            let d = ex.protection(i);
            best = Some(best.map_or(d, |b: f64| b.min(d)));
        }
    }
    Ok(best)
}

/// Measures ε, μ and δ of `sites` on canvas `c`.
pub fn net_report<P: AsRef<[f64]> + Sync>(c: &Canvas, f: &MetricField, sites: &[P]) -> Result<NetReport> {
    if sites.is_empty() {
        return Err(Error::EmptyInput("sites"));
    }
    let dim = c.dim();
    let front = multi_front_dijkstra(c, f, sites)?;
    let (far_v, epsilon_hat) = farthest_vertex(&front, c);
    let src = front.source_vertices.clone();
    let n = src.len();
    let diagram = DiscreteDiagram::from_front(c, front);
    let complex = extract_complex(&diagram);

    let tops: Vec<Simplex> = if n > dim {
        complex.maximal().into_iter().filter(|s| s.len() == dim + 1).collect()
    } else {
        Vec::new()
    };
    // Candidate Voronoi-vertex locations: witness cells of each top and their 1-ring.
    let candidates: Vec<Vec<usize>> = tops
        .iter()
        .map(|s| {
            let mut vs: Vec<usize> = Vec::new();
            for cell in witnesses_of(&diagram, s).unwrap_or_default() {
                for &v in c.cell(cell) {
                    vs.push(v as usize);
                    vs.extend(c.neighbors(v as usize).iter().map(|&w| w as usize));
                }
            }
            vs.sort_unstable();
            vs.dedup();
            vs
        })
        .collect();
    let mut tops_of_site: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (t, s) in tops.iter().enumerate() {
        for &p in s {
            tops_of_site[p as usize].push(t);
        }
    }

    let cutoff = 3.0 * epsilon_hat;
    let per_site: Vec<Result<(f64, usize, BTreeMap<usize, Vec<f64>>)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut field = distance_field(c, f, src[i], cutoff)?;
            let nearest = |field: &[f64]| {
                (0..n)
                    .filter(|&j| j != i)
                    .map(|j| (field[src[j]], j))
                    .fold((f64::INFINITY, usize::MAX), |a, b| if b.0 < a.0 { b } else { a })
            };
            let mut near = nearest(&field);
            if n > 1 && !near.0.is_finite() {
                field = distance_field(c, f, src[i], f64::INFINITY)?;
                near = nearest(&field);
            }
            let at: BTreeMap<usize, Vec<f64>> = tops_of_site[i]
                .iter()
                .map(|&t| (t, candidates[t].iter().map(|&v| field[v]).collect()))
                .collect();
            Ok((near.0, near.1, at))
        })
        .collect();
    let per_site: Vec<(f64, usize, BTreeMap<usize, Vec<f64>>)> = per_site.into_iter().collect::<Result<_>>()?;

    let (mu_hat, closest_pair) = if n > 1 {
        let (i, (d, j, _)) = per_site
            .iter()
            .enumerate()
            .fold((0, &per_site[0]), |a, b| if b.1 .0 < a.1 .0 { b } else { a });
        (Some(*d), Some((i.min(*j), i.max(*j))))
    } else {
        (None, None)
    };

    // Witness-region estimate of each top's Voronoi vertex, then its protection.
    let protections: Vec<Result<Option<f64>>> = tops
        .par_iter()
        .enumerate()
        .map(|(t, s)| {
            let cand = &candidates[t];
            if cand.is_empty() {
                return Ok(None);
            }
            let mut best = (usize::MAX, f64::INFINITY);
            for (k, &v) in cand.iter().enumerate() {
                let r = s
                    .iter()
                    .map(|&p| per_site[p as usize].2[&t][k])
                    .fold(0.0f64, f64::max);
                if r < best.1 {
                    best = (v, r);
                }
            }
            if !best.1.is_finite() {
                return Ok(None);
            }
            let mut field = distance_field(c, f, best.0, cutoff)?;
            let foreign = |field: &[f64]| {
                (0..n)
                    .filter(|q| !s.contains(&(*q as u32)))
                    .map(|q| field[src[q]])
                    .fold(f64::INFINITY, f64::min)
            };
            if !foreign(&field).is_finite() {
                field = distance_field(c, f, best.0, f64::INFINITY)?;
            }
            let r = s.iter().map(|&p| field[src[p as usize]]).fold(0.0f64, f64::max);
            let dq = foreign(&field);
            Ok(Some((dq * dq - r * r).max(0.0).sqrt()))
        })
        .collect();
    let mut delta_hat: Option<f64> = None;
    let mut delta_simplex = None;
    for (t, p) in protections.into_iter().enumerate() {
        if let Some(d) = p? {
            if delta_hat.map_or(true, |b| d < b) {
                delta_hat = Some(d);
                delta_simplex = Some(tops[t].clone());
            }
        }
    }

    let delta_exact = match f.constant(dim) {
        Some(m) if n > dim && n <= EXACT_CROSSCHECK_MAX_SITES => {
            let pts: Vec<Vec<f64>> = src.iter().map(|&v| c.vertex(v).to_vec()).collect();
            exact_protection(&pts, &m, c.bbox(), 1e-12 * c.bbox().diameter())?
        }
        _ => None,
    };

    let boundary_flags = (0..n)
        .filter(|&i| {
            diagram
                .site_cells(i)
                .iter()
                .any(|&cell| c.cell_touches_boundary(cell as usize))
        })
        .collect();

    Ok(NetReport {
        site_count: n,
        epsilon_hat,
        farthest_vertex: far_v,
        mu_hat,
        closest_pair,
        delta_hat,
        delta_simplex,
        delta_exact,
        iota_hat: delta_hat.map(|d| (d / epsilon_hat).clamp(0.0, 1.0)),
        lambda_hat: mu_hat.map(|m| (m / epsilon_hat).clamp(0.0, 2.0)),
        boundary_flags,
        canvas_vertices: c.num_vertices(),
        canvas_steps: c.steps().to_vec(),
        canvas_bbox: *c.bbox(),
    })
}
