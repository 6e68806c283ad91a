//! Discrete Riemannian Voronoi diagram and its dual complex.
//!
//! Each canvas vertex carries the colour of its nearest site. A canvas cell
//! belongs to the cell of every site whose colour appears among its
//! vertices, so neighbouring Voronoi cells overlap by one canvas cell. A cell
//! whose vertices carry colours `S` witnesses the simplex on `S`.

use std::collections::HashMap;

use crate::canvas::Canvas;
use crate::complex::{AbstractComplex, Simplex};
use crate::error::{Error, Result};
use crate::geodesic::{multi_front_dijkstra_with, FrontResult, GeodesicOptions};
use crate::metric::MetricField;

/// Sorted distinct colours of at most four vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColorSet {
    len: u8,
    c: [u32; 4],
}

impl ColorSet {
    pub fn from_colors(colors: &[u32]) -> Self {
        let mut c = [u32::MAX; 4];
        let mut len = 0usize;
        for &x in colors {
            if !c[..len].contains(&x) {
                c[len] = x;
                len += 1;
            }
        }
        c[..len].sort_unstable();
        Self { len: len as u8, c }
    }

    #[inline]
    pub fn as_slice(&self) -> &[u32] {
        &self.c[..self.len as usize]
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Whether every element of the sorted `s` is in the set.
    pub fn contains_all(&self, s: &[u32]) -> bool {
        s.iter().all(|x| self.as_slice().contains(x))
    }
}

/// Canvas colouring with per-site cell lists.
#[derive(Clone, Debug)]
pub struct DiscreteDiagram {
    pub front: FrontResult,
    dim: usize,
    cell_colors: Vec<ColorSet>,
    site_cells: Vec<Vec<u32>>,
}

/// Colours the canvas by nearest site and builds the discrete diagram.
pub fn color_canvas<P: AsRef<[f64]>>(c: &Canvas, f: &MetricField, sites: &[P]) -> Result<DiscreteDiagram> {
    color_canvas_with(c, f, sites, GeodesicOptions::default())
}

pub fn color_canvas_with<P: AsRef<[f64]>>(
    c: &Canvas,
    f: &MetricField,
    sites: &[P],
    opts: GeodesicOptions,
) -> Result<DiscreteDiagram> {
    let front = multi_front_dijkstra_with(c, f, sites, opts)?;
    Ok(DiscreteDiagram::from_front(c, front))
}

impl DiscreteDiagram {
    pub fn from_front(c: &Canvas, front: FrontResult) -> Self {
        let k = c.dim() + 1;
        let mut cell_colors = Vec::with_capacity(c.num_cells());
        let mut site_cells = vec![Vec::new(); front.source_count];
        let mut buf = [0u32; 4];
        for cell in 0..c.num_cells() {
            for (b, &v) in buf.iter_mut().zip(c.cell(cell)) {
                *b = front.color[v as usize];
            }
            let set = ColorSet::from_colors(&buf[..k]);
            for &s in set.as_slice() {
                site_cells[s as usize].push(cell as u32);
            }
            cell_colors.push(set);
        }
        Self {
            front,
            dim: c.dim(),
            cell_colors,
            site_cells,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_sites(&self) -> usize {
        self.front.source_count
    }

    pub fn num_cells(&self) -> usize {
        self.cell_colors.len()
    }

    /// Colours present at the vertices of canvas cell `cell`.
    pub fn cell_colors(&self, cell: usize) -> &[u32] {
        self.cell_colors[cell].as_slice()
    }

    /// Canvas cells belonging to the cell of `site`.
    pub fn site_cells(&self, site: usize) -> &[u32] {
        &self.site_cells[site]
    }

    /// Colour of every canvas vertex.
    pub fn vertex_colors(&self) -> &[u32] {
        &self.front.color
    }
}

/// Collects the simplices witnessed by canvas cells, closed under faces.
pub fn extract_complex(d: &DiscreteDiagram) -> AbstractComplex {
    let mut first: HashMap<ColorSet, usize> = HashMap::new();
    for (cell, set) in d.cell_colors.iter().enumerate() {
        first.entry(*set).or_insert(cell);
    }
    let mut sets: Vec<(ColorSet, usize)> = first.into_iter().collect();
    sets.sort_unstable();
    let mut out = AbstractComplex::new();
    for (set, cell) in &sets {
        out.insert_with_faces(set.as_slice());
        out.add_witness(set.as_slice(), *cell);
    }
    out.prune_witnesses();
    out
}

/// All canvas cells whose colours include every site of `simplex`.
pub fn witnesses_of(d: &DiscreteDiagram, simplex: &[u32]) -> Result<Vec<usize>> {
    let n = d.num_sites();
    if let Some(&bad) = simplex.iter().find(|&&s| s as usize >= n) {
        return Err(Error::InvalidSite {
            index: bad as usize,
            count: n,
        });
    }
    let s = crate::complex::normalize(simplex);
    if s.is_empty() {
        return Ok(Vec::new());
    }
    // Every witness lies in the cell list of the first site.
    Ok(d.site_cells[s[0] as usize]
        .iter()
        .map(|&c| c as usize)
        .filter(|&c| d.cell_colors[c].contains_all(&s))
        .collect())
}

/// Maximal simplices all of whose witnesses touch the canvas boundary.
pub fn boundary_only_simplices(d: &DiscreteDiagram, c: &Canvas, complex: &AbstractComplex) -> Vec<Simplex> {
    complex
        .maximal()
        .into_iter()
        .filter(|s| {
            witnesses_of(d, s)
                .map(|w| w.iter().all(|&cell| c.cell_touches_boundary(cell)))
                .unwrap_or(false)
        })
        .collect()
}
