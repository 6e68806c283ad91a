use anisomesh::metric::{
    distortion, region_distortion_bound, sqrt_metric, uniform_distance, FieldKind, Metric, MetricField, ShockParams,
    SwirlParams, TheoryParams,
};
use anisomesh::Error;
use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

fn diag(v: &[f64]) -> Metric {
    Metric::diag(v).unwrap()
}

fn random_spd(rng: &mut ChaCha8Rng, dim: usize) -> Metric {
    // A·Aᵀ + 0.1·I
    let a: Vec<f64> = (0..dim * dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut g = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            g[i * dim + j] = (0..dim).map(|k| a[i * dim + k] * a[j * dim + k]).sum::<f64>();
        }
        g[i * dim + i] += 0.1;
    }
    Metric::new(dim, &g).unwrap()
}

#[test]
fn sqrt_examples() {
    let f = sqrt_metric(&diag(&[4.0, 1.0])).unwrap();
    assert_relative_eq!(f[(0, 0)], 2.0, epsilon = 1e-12);
    assert_relative_eq!(f[(1, 1)], 1.0, epsilon = 1e-12);
    assert_relative_eq!(f[(0, 1)], 0.0, epsilon = 1e-12);

    let f = sqrt_metric(&Metric::identity(2)).unwrap();
    assert_relative_eq!(f, nalgebra::DMatrix::identity(2, 2), epsilon = 1e-12);

    let m = Metric::from_upper_2d(2.0, 1.0, 2.0).unwrap();
    let f = sqrt_metric(&m).unwrap();
    // eigenvalues 3 and 1 with eigenvectors (1,1)/√2, (1,-1)/√2
    let a = (3f64.sqrt() + 1.0) / 2.0;
    let b = (3f64.sqrt() - 1.0) / 2.0;
    assert_relative_eq!(f[(0, 0)], a, epsilon = 1e-12);
    assert_relative_eq!(f[(0, 1)], b, epsilon = 1e-12);
    assert_relative_eq!(f[(1, 1)], a, epsilon = 1e-12);
    assert_relative_eq!(f[(0, 0)], 1.3660, epsilon = 1e-4);
    let ff = &f * &f;
    assert_relative_eq!(ff, m.to_matrix(), epsilon = 1e-12);
}

#[test]
fn non_spd_rejected() {
    assert!(matches!(Metric::from_upper_2d(1.0, 2.0, 1.0), Err(Error::InvalidMetric(_))));
    assert!(matches!(Metric::new(2, &[1.0, 0.5, 0.4, 1.0]), Err(Error::InvalidMetric(_))));
    assert!(matches!(Metric::diag(&[1.0, 0.0]), Err(Error::InvalidMetric(_))));
    assert!(matches!(Metric::diag(&[1.0, f64::NAN]), Err(Error::InvalidMetric(_))));
}

#[test]
fn distortion_examples() {
    let i = Metric::identity(2);
    assert_relative_eq!(distortion(&i, &i).unwrap(), 1.0, epsilon = 1e-12);
    assert_relative_eq!(distortion(&diag(&[4.0, 1.0]), &i).unwrap(), 2.0, epsilon = 1e-12);
    assert_relative_eq!(distortion(&diag(&[9.0, 1.0]), &diag(&[4.0, 1.0])).unwrap(), 1.5, epsilon = 1e-12);
}

#[test]
fn distortion_scaling_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for dim in [2, 3] {
        let m = random_spd(&mut rng, dim);
        for c in [1.0, 1.5, 2.0, 4.0] {
            let scaled = m.scaled(c * c).unwrap();
            assert_relative_eq!(distortion(&scaled, &m).unwrap(), c, max_relative = 1e-10);
        }
    }
}

#[test]
fn uniform_distance_examples() {
    let m = diag(&[4.0, 1.0]);
    assert_relative_eq!(uniform_distance(&m, &[0.0, 0.0], &[1.0, 0.0]).unwrap(), 2.0);
    assert_relative_eq!(uniform_distance(&Metric::identity(2), &[0.0, 0.0], &[3.0, 4.0]).unwrap(), 5.0);
    assert_relative_eq!(uniform_distance(&m, &[0.0, 0.0], &[1.0, 1.0]).unwrap(), 5f64.sqrt(), epsilon = 1e-12);
    assert!(matches!(
        uniform_distance(&m, &[0.0, 0.0], &[1.0, 1.0, 0.0]),
        Err(Error::DimensionError { expected: 2, got: 3 })
    ));
}

#[test]
fn uniform_distance_sandwich_by_distortion() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let id = Metric::identity(2);
    for _ in 0..1000 {
        let m = random_spd(&mut rng, 2);
        let psi = distortion(&m, &id).unwrap();
        let x: [f64; 2] = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let y = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let e = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt();
        let d = uniform_distance(&m, &x, &y).unwrap();
        assert!(d <= psi * e * (1.0 + 1e-12) + 1e-15);
        assert!(d >= e / psi * (1.0 - 1e-12) - 1e-15);
    }
}

#[test]
fn region_distortion_examples() {
    let g0 = diag(&[3.0, 2.0]);
    let pts: Vec<Vec<f64>> = vec![vec![0.1, 0.2], vec![0.7, 0.9]];
    let u = MetricField::uniform(g0.clone());
    assert_relative_eq!(
        region_distortion_bound(&u, &g0, pts.iter().map(|p| p.as_slice())).unwrap(),
        1.0,
        epsilon = 1e-12
    );
    let e = MetricField::euclidean();
    assert_relative_eq!(
        region_distortion_bound(&e, &diag(&[4.0, 1.0]), pts.iter().map(|p| p.as_slice())).unwrap(),
        2.0,
        epsilon = 1e-12
    );
    let empty: Vec<&[f64]> = Vec::new();
    assert!(matches!(region_distortion_bound(&e, &g0, empty), Err(Error::EmptyInput(_))));
}

#[test]
fn shock_distortion_shrinks_with_neighborhood() {
    let f = MetricField::hyperbolic_shock(ShockParams::default());
    let p0 = [0.37, 0.52];
    let g0 = f.eval(&p0);
    let mut prev = f64::INFINITY;
    for r in [0.2, 0.1, 0.05, 0.02, 0.01, 0.005] {
        let samples: Vec<Vec<f64>> = (0..64)
            .map(|k| {
                let t = k as f64 / 64.0 * std::f64::consts::TAU;
                vec![p0[0] + r * t.cos(), p0[1] + r * t.sin()]
            })
            .collect();
        let psi = region_distortion_bound(&f, &g0, samples.iter().map(|p| p.as_slice())).unwrap();
        assert!(psi >= 1.0 && psi <= prev + 1e-12, "r={r} psi={psi} prev={prev}");
        prev = psi;
    }
    assert!(prev < 1.01);
}

#[test]
fn shock_field_formula_and_ceiling() {
    let p = ShockParams::default();
    let f = MetricField::hyperbolic_shock(p);
    let id = Metric::identity(2);
    let ceiling = (1.0 + p.alpha * p.alpha).sqrt();
    for i in 0..=20 {
        for j in 0..=20 {
            let x = [i as f64 / 20.0, j as f64 / 20.0];
            let g = f.eval(&x);
            // recomputed here from the ridge normal
            let phi = x[1] - p.y0 - p.amplitude * (std::f64::consts::TAU * p.frequency * x[0]).sin();
            let grad = [-p.amplitude * std::f64::consts::TAU * p.frequency * (std::f64::consts::TAU * p.frequency * x[0]).cos(), 1.0];
            let nrm = (grad[0] * grad[0] + grad[1] * grad[1]).sqrt();
            let n = [grad[0] / nrm, grad[1] / nrm];
            let s = 1.0 / (p.beta * phi).cosh();
            let w = p.alpha * p.alpha * s * s;
            assert_relative_eq!(g.get(0, 0), 1.0 + w * n[0] * n[0], epsilon = 1e-12);
            assert_relative_eq!(g.get(0, 1), w * n[0] * n[1], epsilon = 1e-12);
            assert_relative_eq!(g.get(1, 1), 1.0 + w * n[1] * n[1], epsilon = 1e-12);
            assert!(distortion(&g, &id).unwrap() <= ceiling + 1e-12);
        }
    }
    assert_relative_eq!(ShockParams::alpha_for_distortion(1.05), (1.05f64 * 1.05 - 1.0).sqrt());
}

#[test]
fn swirl_is_spd_and_anisotropic_away_from_center() {
    let f = MetricField::swirl(SwirlParams::default());
    let g = f.eval(&[0.9, 0.5]);
    let ev = g.eigenvalues();
    assert!(ev[0] > 0.0 && ev[1] / ev[0] > 2.0);
    let c = f.eval(&[0.5, 0.5]);
    assert_relative_eq!(distortion(&c, &Metric::identity(2)).unwrap(), 1.0, epsilon = 1e-12);
}

#[test]
fn field_from_params() {
    let mut p = BTreeMap::new();
    p.insert("g11".to_string(), 4.0);
    p.insert("g12".to_string(), 0.0);
    p.insert("g22".to_string(), 1.0);
    let f = MetricField::from_params(FieldKind::Uniform, &p).unwrap();
    assert_eq!(f.constant(2).unwrap(), diag(&[4.0, 1.0]));
    p.insert("bogus".to_string(), 1.0);
    assert!(MetricField::from_params(FieldKind::Uniform, &p).is_err());
    assert_eq!(FieldKind::parse("hyperbolic_shock"), Some(FieldKind::HyperbolicShock));
    assert_eq!(FieldKind::parse("nope"), None);
}

#[test]
fn theory_params_validate() {
    assert!(TheoryParams::new(0.1, 0.16, 0.08, 1.0).validate().is_ok());
    assert!(TheoryParams::new(0.1, 0.3, 0.08, 1.0).validate().is_err());
    assert!(TheoryParams::new(0.1, 0.16, 0.2, 1.0).validate().is_err());
    assert!(TheoryParams::new(0.1, 0.16, 0.08, 0.9).validate().is_err());
    assert!(TheoryParams::new(-0.1, 0.16, 0.08, 1.0).validate().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn distortion_symmetric_and_reflexive(seed in any::<u64>(), dim in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_spd(&mut rng, dim);
        let b = random_spd(&mut rng, dim);
        let ab = distortion(&a, &b).unwrap();
        let ba = distortion(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-10 * ab);
        prop_assert!(ab >= 1.0 - 1e-12);
        prop_assert!((distortion(&a, &a).unwrap() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn sqrt_reconstructs(seed in any::<u64>(), dim in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_spd(&mut rng, dim);
        let f = sqrt_metric(&m).unwrap();
        let g = m.to_matrix();
        prop_assert!((&f - f.transpose()).norm() <= 1e-12 * f.norm());
        prop_assert!((&f * &f - &g).norm() <= 1e-10 * g.norm());
    }

    #[test]
    fn uniform_distance_is_a_metric(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_spd(&mut rng, 2);
        let p: Vec<[f64; 2]> = (0..3).map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect();
        let d = |a: &[f64; 2], b: &[f64; 2]| uniform_distance(&m, a, b).unwrap();
        prop_assert_eq!(d(&p[0], &p[0]), 0.0);
        prop_assert!(d(&p[0], &p[1]) > 0.0);
        prop_assert!(d(&p[0], &p[2]) <= d(&p[0], &p[1]) + d(&p[1], &p[2]) + 1e-12);
    }
}
