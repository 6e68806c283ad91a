use anisomesh::canvas::{build_canvas, build_canvas_with_cap, max_edge_length, BBox, Canvas, NO_CELL};
use anisomesh::metric::{Metric, MetricField};
use anisomesh::Error;
use approx::assert_relative_eq;
use proptest::prelude::*;

fn unit(dim: usize) -> BBox {
    BBox::unit(dim)
}

/// Longest Euclidean edge by direct enumeration of cell vertex pairs.
fn brute_longest_edge(c: &Canvas) -> f64 {
    let mut best = 0.0f64;
    for cell in 0..c.num_cells() {
        let vs = c.cell(cell);
        for a in 0..vs.len() {
            for b in a + 1..vs.len() {
                let (p, q) = (c.vertex(vs[a] as usize), c.vertex(vs[b] as usize));
                let d: f64 = p.iter().zip(q).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
                best = best.max(d);
            }
        }
    }
    best
}

#[test]
fn unit_square_target_point_three() {
    let c = build_canvas(&unit(2), 0.3, 2).unwrap();
    assert_eq!(c.counts(), &[5, 5]);
    assert_relative_eq!(c.steps()[0], 0.2, epsilon = 1e-15);
    assert_eq!(c.num_vertices(), 36);
    assert_eq!(c.num_cells(), 50);
}

#[test]
fn minimal_grid() {
    let c = build_canvas(&unit(2), 2f64.sqrt(), 2).unwrap();
    assert_eq!((c.num_vertices(), c.num_cells()), (4, 2));
    let s = max_edge_length(&c, &MetricField::euclidean());
    assert_relative_eq!(s.e_max, 2f64.sqrt(), epsilon = 1e-12);
}

#[test]
fn longest_edge_respects_target() {
    let c = build_canvas(&unit(2), 0.15, 2).unwrap();
    let s = max_edge_length(&c, &MetricField::euclidean());
    assert!(s.e_max <= 0.15);
    assert_relative_eq!(s.e_max, brute_longest_edge(&c), epsilon = 1e-15);
    let c3 = build_canvas(&unit(3), 0.3, 3).unwrap();
    let s3 = max_edge_length(&c3, &MetricField::euclidean());
    assert!(s3.e_max <= 0.3);
    assert_relative_eq!(s3.e_max, brute_longest_edge(&c3), epsilon = 1e-15);
}

#[test]
fn edge_stats_under_metrics() {
    let c = build_canvas(&unit(2), 0.3, 2).unwrap();
    let e = max_edge_length(&c, &MetricField::euclidean());
    assert_relative_eq!(e.e_max, 0.2 * 2f64.sqrt(), epsilon = 1e-12);
    assert_relative_eq!(e.e_max_metric, e.e_max, epsilon = 1e-12);
    let u = max_edge_length(&c, &MetricField::uniform(Metric::diag(&[4.0, 1.0]).unwrap()));
    assert_relative_eq!(u.e_max_metric, 0.2 * 5f64.sqrt(), epsilon = 1e-12);
    // 5x5 grid: 30 horizontal + 30 vertical + 25 diagonals
    assert_eq!(e.edge_count, 85);
}

#[test]
fn refinement_halves_longest_edge() {
    let bb = BBox::new(&[0.0, 0.0], &[2.0, 1.0]).unwrap();
    let f = MetricField::euclidean();
    let a = build_canvas(&bb, 0.2, 2).unwrap();
    let n2: Vec<usize> = a.counts().iter().map(|n| 2 * n).collect();
    let b = Canvas::grid(&bb, &n2, u64::MAX).unwrap();
    assert_relative_eq!(max_edge_length(&b, &f).e_max, 0.5 * max_edge_length(&a, &f).e_max, max_relative = 1e-12);
    // halving the target itself halves e_max whenever the counts double
    for t in [0.4, 0.2 * 2f64.sqrt(), 0.1] {
        let c1 = build_canvas(&unit(2), t, 2).unwrap();
        let c2 = build_canvas(&unit(2), t / 2.0, 2).unwrap();
        if c2.counts()[0] == 2 * c1.counts()[0] {
            assert!(max_edge_length(&c2, &f).e_max <= 0.5 * max_edge_length(&c1, &f).e_max * (1.0 + 1e-12));
        }
        assert!(max_edge_length(&c2, &f).e_max <= t / 2.0 * (1.0 + 1e-12));
    }
}

#[test]
fn interior_degrees_in_range() {
    let c = build_canvas(&unit(2), 0.1, 2).unwrap();
    for v in 0..c.num_vertices() {
        if !c.is_boundary_vertex(v) {
            assert!((4..=8).contains(&c.degree(v)), "vertex {v} degree {}", c.degree(v));
        }
    }
}

#[test]
fn too_dense_is_rejected() {
    match build_canvas_with_cap(&unit(2), 0.01, 2, 1000) {
        Err(Error::CanvasTooDense { vertices, cap }) => {
            assert_eq!(cap, 1000);
            assert!(vertices > 1000);
        }
        other => panic!("{other:?}"),
    }
    assert!(build_canvas(&unit(2), 0.0, 2).is_err());
    assert!(BBox::new(&[0.0, 0.0], &[0.0, 1.0]).is_err());
}

fn check_invariants(c: &Canvas) {
    let k = c.dim() + 1;
    let mut total = 0.0;
    for cell in 0..c.num_cells() {
        let vs = c.cell(cell);
        assert_eq!(vs.len(), k);
        for a in 0..k {
            assert!((vs[a] as usize) < c.num_vertices());
            for b in a + 1..k {
                assert_ne!(vs[a], vs[b]);
            }
        }
        let v = c.signed_volume(cell);
        assert!(v > 0.0);
        total += v;
    }
    assert_relative_eq!(total, c.bbox().volume(), max_relative = 1e-9);
    for v in 0..c.num_vertices() {
        for &w in c.neighbors(v) {
            assert!(c.neighbors(w as usize).contains(&(v as u32)));
        }
    }
    for cell in 0..c.num_cells() {
        for &nb in c.cell_neighbors(cell) {
            if nb != NO_CELL {
                assert!(c.cell_neighbors(nb as usize).contains(&(cell as u32)));
            }
        }
    }
}

#[test]
fn invariants_hold_small_2d_and_3d() {
    check_invariants(&build_canvas(&BBox::new(&[-1.0, 0.5], &[0.3, 1.7]).unwrap(), 0.2, 2).unwrap());
    check_invariants(&build_canvas(&BBox::new(&[0.0, 0.0, 0.0], &[1.0, 0.5, 0.7]).unwrap(), 0.25, 3).unwrap());
}

#[test]
fn nearest_vertex_snaps_and_rejects_outside() {
    let c = build_canvas(&unit(2), 0.3, 2).unwrap();
    let v = c.nearest_vertex(&[0.39, 0.61]).unwrap();
    assert_eq!(c.vertex(v), &[0.4, 0.6]);
    assert!(c.nearest_vertex(&[1.5, 0.5]).is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn random_boxes_tile(lx in 0.1f64..3.0, ly in 0.1f64..3.0, t in 0.05f64..0.5, x0 in -2.0f64..2.0) {
        let bb = BBox::new(&[x0, -1.0], &[x0 + lx, -1.0 + ly]).unwrap();
        let c = build_canvas(&bb, t, 2).unwrap();
        check_invariants(&c);
        let s = max_edge_length(&c, &MetricField::euclidean());
        prop_assert!(s.e_max <= t * (1.0 + 1e-12));
    }
}
