use std::collections::BTreeSet;

use anisomesh::complex::AbstractComplex;
use anisomesh::metric::{sqrt_metric, Metric};
use anisomesh::oracle::{circumsphere, euclidean_delaunay_bruteforce, stretch_sites, uniform_delaunay};
use anisomesh::Error;
use approx::assert_relative_eq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_sites(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..dim).map(|_| rng.gen_range(0.0..1.0)).collect()).collect()
}

/// Nerve of the Voronoi diagram read off a dense sampling grid: every grid
/// square whose four corners have nearest sites S contributes S.
fn sampled_nerve(sites: &[Vec<f64>], lo: f64, hi: f64, n: usize) -> AbstractComplex {
    let h = (hi - lo) / n as f64;
    let nearest = |x: f64, y: f64| {
        let mut best = (f64::INFINITY, 0u32);
        for (i, p) in sites.iter().enumerate() {
            let d = (p[0] - x).powi(2) + (p[1] - y).powi(2);
            if d < best.0 {
                best = (d, i as u32);
            }
        }
        best.1
    };
    let mut label = vec![0u32; (n + 1) * (n + 1)];
    for j in 0..=n {
        for i in 0..=n {
            label[j * (n + 1) + i] = nearest(lo + i as f64 * h, lo + j as f64 * h);
        }
    }
    let mut k = AbstractComplex::new();
    for j in 0..n {
        for i in 0..n {
            let s: BTreeSet<u32> = [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)]
                .iter()
                .map(|&(a, b)| label[b * (n + 1) + a])
                .collect();
            k.insert_with_faces(&s.into_iter().collect::<Vec<u32>>());
        }
    }
    k
}

#[test]
fn three_points_one_triangle() {
    let ex = euclidean_delaunay_bruteforce(&[[0.0, 0.0], [1.0, 0.0], [0.2, 0.9]], 2).unwrap();
    assert_eq!(ex.simplices.len(), 7);
    assert_eq!(ex.tops, vec![vec![0, 1, 2]]);
    assert!(!ex.degenerate);
}

#[test]
fn square_is_degenerate() {
    let ex = euclidean_delaunay_bruteforce(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]], 2).unwrap();
    assert!(ex.degenerate);
}

#[test]
fn perturbed_square_two_triangles() {
    let sites = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.9, 0.9]];
    let ex = euclidean_delaunay_bruteforce(&sites, 2).unwrap();
    assert!(!ex.degenerate);
    // independent check: a triple is Delaunay iff the fourth point lies outside its circumcircle
    let mut expect = Vec::new();
    for t in [[0u32, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]] {
        let other = (0..4).find(|i| !t.contains(i)).unwrap() as usize;
        let p: Vec<&[f64]> = t.iter().map(|&i| sites[i as usize].as_slice()).collect();
        let (c, r) = circumsphere(&p).unwrap();
        let d = ((sites[other][0] - c[0]).powi(2) + (sites[other][1] - c[1]).powi(2)).sqrt();
        if d > r {
            expect.push(t.to_vec());
        }
    }
    assert_eq!(ex.tops, expect);
    // (0.9, 0.9) lies inside the circumcircle of the first three points, so the diagonal is {0, 3}
    assert_eq!(ex.tops, vec![vec![0, 1, 3], vec![0, 2, 3]]);
}

#[test]
fn too_few_sites() {
    assert!(matches!(
        euclidean_delaunay_bruteforce(&[[0.0, 0.0], [1.0, 0.0]], 2),
        Err(Error::TooFewSites { need: 3, got: 2 })
    ));
}

#[test]
fn nerve_matches_sampled_voronoi() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut checked = 0;
    while checked < 10 {
        let sites = random_sites(&mut rng, 8, 2);
        let ex = euclidean_delaunay_bruteforce(&sites, 2).unwrap();
        if ex.degenerate {
            continue;
        }
        // the sampling window must contain every Voronoi vertex
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for c in &ex.circumcenters {
            lo = lo.min(c[0]).min(c[1]);
            hi = hi.max(c[0]).max(c[1]);
        }
        // Voronoi vertices that lie too close together for the grid are skipped as unresolvable
        let h = (hi - lo + 0.2) / 2000.0;
        let mut min_gap = f64::INFINITY;
        for a in 0..ex.circumcenters.len() {
            for b in a + 1..ex.circumcenters.len() {
                let (p, q) = (&ex.circumcenters[a], &ex.circumcenters[b]);
                min_gap = min_gap.min(((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt());
            }
        }
        if min_gap < 4.0 * h {
            continue;
        }
        let sampled = sampled_nerve(&sites, lo - 0.1, hi + 0.1, 2000);
        assert_eq!(sampled.simplices(), ex.simplices.simplices(), "site set {checked}");
        checked += 1;
    }
}

#[test]
fn outputs_satisfy_equidistance_and_empty_ball() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for dim in [2, 3] {
        let sites = random_sites(&mut rng, 14, dim);
        let ex = euclidean_delaunay_bruteforce(&sites, dim).unwrap();
        assert!(ex.max_equidistance_residual() < 1e-9);
        assert!(ex.min_empty_ball_margin() > -1e-12);
        assert!(ex.simplices.is_downward_closed());
        assert!(ex.simplices.is_pure(dim));
        for (t, c) in ex.tops.iter().zip(&ex.circumcenters) {
            for &v in t {
                let d: f64 = sites[v as usize].iter().zip(c).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                assert_relative_eq!(d, ex.circumradii[ex.tops.iter().position(|x| x == t).unwrap()], max_relative = 1e-9);
            }
        }
        // Euler characteristic of a triangulated convex region
        let counts: Vec<usize> = (0..=dim).map(|k| ex.simplices.of_dim(k).count()).collect();
        let chi: i64 = counts.iter().enumerate().map(|(k, &n)| if k % 2 == 0 { n as i64 } else { -(n as i64) }).sum();
        assert_eq!(chi, 1);
    }
}

#[test]
fn stretch_examples() {
    let pts = [[1.0, 1.0], [0.3, -0.2]];
    assert_eq!(stretch_sites(&pts, &Metric::identity(2)).unwrap(), vec![vec![1.0, 1.0], vec![0.3, -0.2]]);
    let s = stretch_sites(&pts, &Metric::diag(&[4.0, 1.0]).unwrap()).unwrap();
    assert_relative_eq!(s[0][0], 2.0, epsilon = 1e-15);
    assert_relative_eq!(s[0][1], 1.0, epsilon = 1e-15);
    let m = Metric::from_upper_2d(2.0, 0.6, 1.5).unwrap();
    let f = sqrt_metric(&m).unwrap();
    let inv = f.try_inverse().unwrap();
    for (p, q) in pts.iter().zip(stretch_sites(&pts, &m).unwrap()) {
        let back = &inv * nalgebra::DVector::from_column_slice(&q);
        assert_relative_eq!(back[0], p[0], epsilon = 1e-12);
        assert_relative_eq!(back[1], p[1], epsilon = 1e-12);
    }
}

#[test]
fn uniform_delaunay_matches_stretched_euclidean() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let m = Metric::diag(&[4.0, 1.0]).unwrap();
    for _ in 0..5 {
        let sites = random_sites(&mut rng, 10, 2);
        let u = uniform_delaunay(&sites, &m, 2).unwrap();
        let e = euclidean_delaunay_bruteforce(&stretch_sites(&sites, &m).unwrap(), 2).unwrap();
        assert_eq!(u.simplices.simplices(), e.simplices.simplices());
        // circumcenters come back in input coordinates
        for (t, c) in u.tops.iter().zip(&u.circumcenters) {
            let r: Vec<f64> = t
                .iter()
                .map(|&v| anisomesh::metric::uniform_distance(&m, &sites[v as usize], c).unwrap())
                .collect();
            assert_relative_eq!(r[0], r[1], max_relative = 1e-9);
            assert_relative_eq!(r[0], r[2], max_relative = 1e-9);
        }
        let id = uniform_delaunay(&sites, &Metric::identity(2), 2).unwrap();
        let eu = euclidean_delaunay_bruteforce(&sites, 2).unwrap();
        assert_eq!(id.simplices.simplices(), eu.simplices.simplices());
        for c in [0.5, 3.0] {
            let sc = uniform_delaunay(&sites, &Metric::diag(&[c * c, c * c]).unwrap(), 2).unwrap();
            assert_eq!(sc.simplices.simplices(), eu.simplices.simplices());
        }
    }
    // the stretch changes combinatorics for some site sets
    let sites = [[0.0, 0.0], [1.0, 0.0], [0.5, 0.6], [0.5, -0.6]];
    let u = uniform_delaunay(&sites, &m, 2).unwrap();
    let e = euclidean_delaunay_bruteforce(&sites, 2).unwrap();
    assert_ne!(u.simplices.simplices(), e.simplices.simplices());
}

#[test]
fn voronoi_edges_in_2d() {
    let sites = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.9, 0.9]];
    let ex = euclidean_delaunay_bruteforce(&sites, 2).unwrap();
    let edges = ex.voronoi_edges_2d().unwrap();
    assert_eq!(edges.len(), ex.simplices.of_dim(1).count());
    // every edge point is equidistant from its two sites
    for e in &edges {
        let (a, b) = (&sites[e.sites[0] as usize], &sites[e.sites[1] as usize]);
        if let anisomesh::oracle::VoronoiEdgeGeom::Segment(p, q) = e.geom {
            for x in [p, q] {
                let da = ((x[0] - a[0]).powi(2) + (x[1] - a[1]).powi(2)).sqrt();
                let db = ((x[0] - b[0]).powi(2) + (x[1] - b[1]).powi(2)).sqrt();
                assert_relative_eq!(da, db, max_relative = 1e-9);
            }
        }
    }
}

#[test]
fn protection_of_single_triangle_plus_far_point() {
    let sites = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [3.0, 3.0]];
    let ex = euclidean_delaunay_bruteforce(&sites, 2).unwrap();
    let i = ex.tops.iter().position(|t| t == &vec![0, 1, 2]).unwrap();
    // circumcenter (0.5,0.5), r² = 0.5, nearest foreign site (3,3) at d² = 12.5
    assert_relative_eq!(ex.protection(i), 12.0f64.sqrt(), epsilon = 1e-12);
}
