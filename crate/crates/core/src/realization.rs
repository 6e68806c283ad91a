//! Straight and curved (discrete center-of-mass) realizations of abstract
//! complexes, and direct embedding checks.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::straightening_bound;
use crate::canvas::{signed_volume, Canvas};
use crate::complex::{facets, AbstractComplex, Simplex};
use crate::error::{Error, Result};
use crate::geodesic::{distance_field, snap_sites};
use crate::metric::MetricField;

/// Tolerance on barycentric coordinates.
const BARY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RealizationMode {
    Straight,
    Curved,
}

/// A barycentric coordinate vector and the point it realizes to.
pub type Sample = (Vec<f64>, Vec<f64>);

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RealizedComplex {
    pub complex: AbstractComplex,
    pub site_coords: Vec<Vec<f64>>,
    pub mode: RealizationMode,
    /// Per maximal simplex, its barycentric samples (curved mode only).
    pub curved_samples: Vec<(Simplex, Vec<Sample>)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    /// Top simplices whose orientation disagrees with the majority of their
    /// component, plus flat ones.
    pub inverted_count: usize,
    pub inverted: Vec<Simplex>,
    pub degenerate: Vec<Simplex>,
    /// Vertex-disjoint maximal simplices whose straight realizations intersect.
    pub overlap_pairs: Vec<(Simplex, Simplex)>,
    /// Facets shared by more than two top simplices.
    pub nonmanifold_facets: usize,
    /// Smallest vertex-to-opposite-facet altitude over top simplices.
    pub min_altitude: f64,
    pub embedded: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StraighteningGap {
    pub max_gap: f64,
    pub bound: f64,
    pub worst_simplex: Option<Simplex>,
    pub samples: usize,
}

fn check_bary(bary: &[f64], k: usize) -> Result<()> {
    if bary.len() != k {
        return Err(Error::InvalidBarycentric(format!("{} coordinates for {k} vertices", bary.len())));
    }
    if let Some(b) = bary.iter().find(|b| !(**b >= -BARY_TOL)) {
        return Err(Error::InvalidBarycentric(format!("negative coordinate {b}")));
    }
    let s: f64 = bary.iter().sum();
    if (s - 1.0).abs() > BARY_TOL {
        return Err(Error::InvalidBarycentric(format!("coordinates sum to {s}")));
    }
    Ok(())
}

/// `Σ λ_p p`.
pub fn straight_point<P: AsRef<[f64]>>(simplex_sites: &[P], bary: &[f64]) -> Result<Vec<f64>> {
    check_bary(bary, simplex_sites.len())?;
    let dim = simplex_sites.first().ok_or(Error::EmptyInput("simplex"))?.as_ref().len();
    let mut out = vec![0.0; dim];
    for (p, &l) in simplex_sites.iter().zip(bary) {
        for (o, x) in out.iter_mut().zip(p.as_ref()) {
            *o += l * x;
        }
    }
    Ok(out)
}

/// Barycentric coordinates `(i_0/r, ..., i_{k-1}/r)` with `Σ i = r`.
pub fn barycentric_grid(k: usize, resolution: usize) -> Vec<Vec<f64>> {
    fn rec(k: usize, left: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if cur.len() == k - 1 {
            cur.push(left);
            out.push(cur.iter().map(|&i| i as f64 / r as f64).collect());
            cur.pop();
            return;
        }
        for i in (0..=left).rev() {
            cur.push(i);
            rec(k, left - i, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k == 0 {
        return out;
    }
    let r = resolution.max(1);
    rec(k, r, r, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Per-site geodesic distance fields over a canvas.
pub struct SiteFields {
    pub vertices: Vec<usize>,
    pub fields: Vec<Vec<f64>>,
}

impl SiteFields {
    pub fn compute<P: AsRef<[f64]>>(c: &Canvas, f: &MetricField, sites: &[P]) -> Result<Self> {
        let vertices = snap_sites(c, sites)?;
        let fields = vertices
            .par_iter()
            .map(|&v| distance_field(c, f, v, f64::INFINITY))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { vertices, fields })
    }

    /// Canvas vertex minimizing `½ Σ λ_p d_p(v)²` over the sites of `simplex`.
    pub fn karcher_vertex(&self, simplex: &[u32], bary: &[f64]) -> Result<usize> {
        check_bary(bary, simplex.len())?;
        if let Some(&bad) = simplex.iter().find(|&&s| s as usize >= self.fields.len()) {
            return Err(Error::InvalidSite {
                index: bad as usize,
                count: self.fields.len(),
            });
        }
        let fs: Vec<(&[f64], f64)> = simplex
            .iter()
            .zip(bary)
            .filter(|(_, &l)| l > 0.0)
            .map(|(&s, &l)| (self.fields[s as usize].as_slice(), l))
            .collect();
        let nv = self.fields[0].len();
        let mut best = (0usize, f64::INFINITY);
        for v in 0..nv {
            let e: f64 = fs.iter().map(|(d, l)| l * d[v] * d[v]).sum::<f64>() * 0.5;
            if e < best.1 {
                best = (v, e);
            }
        }
        Ok(best.0)
    }
}

/// Discrete Riemannian center of mass of the given sites with weights `bary`.
pub fn karcher_point<P: AsRef<[f64]>>(c: &Canvas, f: &MetricField, simplex_sites: &[P], bary: &[f64]) -> Result<Vec<f64>> {
    check_bary(bary, simplex_sites.len())?;
    let fields = SiteFields::compute(c, f, simplex_sites)?;
    let idx: Vec<u32> = (0..simplex_sites.len() as u32).collect();
    Ok(c.vertex(fields.karcher_vertex(&idx, bary)?).to_vec())
}

/// Curved samples of every maximal simplex of dimension at least one.
pub fn realize<P: AsRef<[f64]>>(
    c: &Canvas,
    fields: &SiteFields,
    complex: &AbstractComplex,
    sites: &[P],
    resolution: usize,
) -> Result<RealizedComplex> {
    let maximal: Vec<Simplex> = complex.maximal().into_iter().filter(|s| s.len() > 1).collect();
    let samples = maximal
        .par_iter()
        .map(|s| {
            barycentric_grid(s.len(), resolution)
                .into_iter()
                .map(|b| {
                    let v = fields.karcher_vertex(s, &b)?;
                    Ok((b, c.vertex(v).to_vec()))
                })
                .collect::<Result<Vec<Sample>>>()
                .map(|v| (s.clone(), v))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RealizedComplex {
        complex: complex.clone(),
        site_coords: sites.iter().map(|p| p.as_ref().to_vec()).collect(),
        mode: RealizationMode::Curved,
        curved_samples: samples,
    })
}

pub fn realize_straight<P: AsRef<[f64]>>(complex: &AbstractComplex, sites: &[P]) -> RealizedComplex {
    RealizedComplex {
        complex: complex.clone(),
        site_coords: sites.iter().map(|p| p.as_ref().to_vec()).collect(),
        mode: RealizationMode::Straight,
        curved_samples: Vec::new(),
    }
}

/// Largest `|karcher − straight|` over barycentric grids on the maximal
/// simplices, next to the bound `ε·√(128(ψ₀ − 1))`.
pub fn straightening_gap<P: AsRef<[f64]>>(
    c: &Canvas,
    f: &MetricField,
    complex: &AbstractComplex,
    sites: &[P],
    sample_resolution: usize,
    psi0: f64,
    epsilon: f64,
) -> Result<StraighteningGap> {
    let fields = SiteFields::compute(c, f, sites)?;
    let realized = realize(c, &fields, complex, sites, sample_resolution)?;
    let mut out = StraighteningGap {
        max_gap: 0.0,
        bound: straightening_bound(epsilon, psi0),
        worst_simplex: None,
        samples: 0,
    };
    for (s, samples) in &realized.curved_samples {
        let pts: Vec<&[f64]> = s.iter().map(|&i| sites[i as usize].as_ref()).collect();
        for (b, x) in samples {
            let y = straight_point(&pts, b)?;
            let gap = x.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            out.samples += 1;
            if gap > out.max_gap || out.worst_simplex.is_none() {
                out.max_gap = out.max_gap.max(gap);
                out.worst_simplex = Some(s.clone());
            }
        }
    }
    Ok(out)
}

fn sub(a: &[f64], b: &[f64]) -> [f64; 3] {
    let mut o = [0.0; 3];
    for i in 0..a.len() {
        o[i] = a[i] - b[i];
    }
    o
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Separating-axis candidates for two convex hulls of 2 to 4 points.
fn axes(a: &[&[f64]], b: &[&[f64]], dim: usize) -> Vec<[f64; 3]> {
    let edges = |s: &[&[f64]]| {
        let mut e = Vec::new();
        for i in 0..s.len() {
            for j in (i + 1)..s.len() {
                e.push(sub(s[j], s[i]));
            }
        }
        e
    };
    let (ea, eb) = (edges(a), edges(b));
    let mut out: Vec<[f64; 3]> = vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
    if dim == 2 {
        for e in ea.iter().chain(&eb) {
            out.push([-e[1], e[0], 0.0]);
        }
    } else {
        out.push([0.0, 0.0, 1.0]);
        for s in [&ea, &eb] {
            for i in 0..s.len() {
                for j in (i + 1)..s.len() {
                    let n = cross(s[i], s[j]);
                    out.push(n);
                    for e in s.iter() {
                        out.push(cross(n, *e));
                    }
                }
            }
        }
        for x in &ea {
            for y in &eb {
                out.push(cross(*x, *y));
            }
        }
    }
    out
}

fn hulls_intersect(a: &[&[f64]], b: &[&[f64]], dim: usize, tol: f64) -> bool {
    for ax in axes(a, b, dim) {
        let n = dot(&ax[..dim], &ax[..dim]).sqrt();
        if n == 0.0 {
            continue;
        }
        let proj = |s: &[&[f64]]| {
            s.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                let t = dot(&ax[..dim], p) / n;
                (lo.min(t), hi.max(t))
            })
        };
        let ((alo, ahi), (blo, bhi)) = (proj(a), proj(b));
        if ahi < blo - tol || bhi < alo - tol {
            return false;
        }
    }
    true
}

fn altitude(p: &[&[f64]], dim: usize) -> f64 {
    let vol = signed_volume(p).abs();
    let mut best = f64::INFINITY;
    for skip in 0..p.len() {
        let f: Vec<&[f64]> = p.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, q)| *q).collect();
        let facet_measure = if dim == 2 {
            let d = sub(f[1], f[0]);
            dot(&d[..2], &d[..2]).sqrt()
        } else {
            let n = cross(sub(f[1], f[0]), sub(f[2], f[0]));
            0.5 * dot(&n, &n).sqrt()
        };
        if facet_measure > 0.0 {
            best = best.min(dim as f64 * vol / facet_measure);
        }
    }
    best
}

/// Orientation consistency and pairwise overlap of the straight realization.
pub fn check_embedding<P: AsRef<[f64]>>(complex: &AbstractComplex, sites: &[P], dim: usize) -> Result<EmbeddingReport> {
    if !(2..=3).contains(&dim) {
        return Err(Error::Unsupported(format!("dimension {dim}")));
    }
    let n = sites.len();
    for s in complex.vertices() {
        if s as usize >= n {
            return Err(Error::InvalidSite { index: s as usize, count: n });
        }
    }
    let owned: Vec<&[f64]> = sites.iter().map(|p| p.as_ref()).collect();
    let pt = |i: u32| owned[i as usize];
    let scale = {
        let mut s = 0.0f64;
        for p in sites {
            for x in p.as_ref() {
                s = s.max(x.abs());
            }
        }
        s.max(1e-300)
    };
    let maximal = complex.maximal();
    let tops: Vec<&Simplex> = maximal.iter().filter(|s| s.len() == dim + 1).collect();

    let mut facet_map: HashMap<Simplex, Vec<(usize, usize)>> = HashMap::new();
    for (t, s) in tops.iter().enumerate() {
        for (i, f) in facets(s).into_iter().enumerate() {
            facet_map.entry(f).or_default().push((t, i));
        }
    }
    let mut nbrs: Vec<Vec<(usize, i8)>> = vec![Vec::new(); tops.len()];
    let mut nonmanifold = 0;
    let mut keys: Vec<&Simplex> = facet_map.keys().collect();
    keys.sort();
    for k in keys {
        let users = &facet_map[k];
        match users.as_slice() {
            [(a, i), (b, j)] => {
                let rel: i8 = if (i + j) % 2 == 0 { -1 } else { 1 };
                nbrs[*a].push((*b, rel));
                nbrs[*b].push((*a, rel));
            }
            [_] => {}
            _ => nonmanifold += 1,
        }
    }

    let geo: Vec<f64> = tops
        .iter()
        .map(|s| {
            let p: Vec<&[f64]> = s.iter().map(|&i| pt(i)).collect();
            signed_volume(&p)
        })
        .collect();
    let flat_tol = 1e-14 * scale.powi(dim as i32);
    let mut orient = vec![0i8; tops.len()];
    let mut inverted = Vec::new();
    let mut degenerate = Vec::new();
    for start in 0..tops.len() {
        if orient[start] != 0 {
            continue;
        }
        orient[start] = 1;
        let mut comp = vec![start];
        let mut stack = vec![start];
        while let Some(a) = stack.pop() {
            for &(b, rel) in &nbrs[a] {
                if orient[b] == 0 {
                    orient[b] = rel * orient[a];
                    comp.push(b);
                    stack.push(b);
                }
            }
        }
        let sign = |t: usize| orient[t] as f64 * geo[t];
        let pos = comp.iter().filter(|&&t| sign(t) > flat_tol).count();
        let neg = comp.iter().filter(|&&t| sign(t) < -flat_tol).count();
        let majority_pos = pos >= neg;
        comp.sort_unstable();
        for &t in &comp {
            let s = sign(t);
            if s.abs() <= flat_tol {
                degenerate.push(tops[t].clone());
                inverted.push(tops[t].clone());
            } else if (s > 0.0) != majority_pos {
                inverted.push(tops[t].clone());
            }
        }
    }
    inverted.sort();

    let shapes: Vec<&Simplex> = maximal.iter().filter(|s| s.len() >= 2).collect();
    let tol = 1e-12 * scale;
    let overlap_pairs: Vec<(Simplex, Simplex)> = (0..shapes.len())
        .into_par_iter()
        .flat_map_iter(|a| {
            let shapes = &shapes;
            ((a + 1)..shapes.len()).filter_map(move |b| {
                let (sa, sb) = (shapes[a], shapes[b]);
                if sa.iter().any(|v| sb.contains(v)) {
                    return None;
                }
                let pa: Vec<&[f64]> = sa.iter().map(|&i| pt(i)).collect();
                let pb: Vec<&[f64]> = sb.iter().map(|&i| pt(i)).collect();
                hulls_intersect(&pa, &pb, dim, tol).then(|| (sa.clone(), sb.clone()))
            })
        })
        .collect();

    let min_altitude = tops
        .iter()
        .map(|s| {
            let p: Vec<&[f64]> = s.iter().map(|&i| pt(i)).collect();
            altitude(&p, dim)
        })
        .fold(f64::INFINITY, f64::min);

    let embedded = inverted.is_empty() && overlap_pairs.is_empty();
    Ok(EmbeddingReport {
        inverted_count: inverted.len(),
        inverted,
        degenerate,
        overlap_pairs,
        nonmanifold_facets: nonmanifold,
        min_altitude,
        embedded,
    })
}
