//! Acceptance criteria at desk scale. Prints one PASS/FAIL line per
//! criterion and exits non-zero when any criterion fails.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anisomesh::bounds::evaluate_bounds;
use anisomesh::canvas::{build_canvas, grid_counts, BBox, Canvas};
use anisomesh::conformance::{
    separation_with_params, verify_euclidean_equality_with, verify_refinement, verify_uniform_equality_with,
    EqualityConfig,
};
use anisomesh::drvd::{color_canvas, extract_complex};
use anisomesh::geodesic::multi_front_dijkstra;
use anisomesh::metric::{region_distortion_bound, uniform_distance, Metric, MetricField, ShockParams, TheoryParams};
use anisomesh::nets::{generate_net, net_report, NetReport};
use anisomesh::realization::{check_embedding, realize, straightening_gap, SiteFields};
use anisomesh::svg::render_svg;
use anisomesh::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BASE_SEED: u64 = 42;
const RUNS: usize = 10;
const VERTEX_CAP: u64 = 500_000;
const TIME_LIMIT_SECS: f64 = 30.0;

struct Outcome {
    pass: bool,
    detail: String,
}

fn unit() -> BBox {
    BBox::unit(2)
}

/// Working canvas for net generation and measurement: 128 cells per side.
fn work_canvas() -> Canvas {
    Canvas::grid(&unit(), &[128, 128], u64::MAX).unwrap()
}

/// Farthest-point net of 15 to 40 sites from run-specific randomness.
fn random_net(c: &Canvas, f: &MetricField, run: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(BASE_SEED + run as u64);
    let seed = [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)];
    let mut eps = rng.gen_range(0.17..0.26);
    for _ in 0..20 {
        let net = generate_net(c, f, eps, &seed).unwrap();
        match net.len() {
            n if n < 15 => eps *= 0.9,
            n if n > 40 => eps *= 1.1,
            _ => return net,
        }
    }
    panic!("run {run}: no net with 15 to 40 sites");
}

fn vertices_for(edge: f64) -> u64 {
    grid_counts(&unit(), edge).unwrap().iter().map(|&n| n as u64 + 1).product()
}

fn finest_feasible_edge() -> f64 {
    // n + 1 vertices per side within the cap
    let n = (VERTEX_CAP as f64).sqrt().floor() - 1.0;
    2f64.sqrt() / n
}

fn equality_cfg() -> EqualityConfig {
    EqualityConfig {
        domain: Some(unit()),
        vertex_cap: VERTEX_CAP,
        ..EqualityConfig::default()
    }
}

/// Runs the equality protocol for one constant metric; `bound` maps a net
/// report to the prescribed canvas edge.
fn equality_protocol(m: &Metric, bound: impl Fn(&NetReport) -> f64) -> Outcome {
    let f = MetricField::uniform(*m);
    let c = work_canvas();
    let mut failed = Vec::new();
    let mut skipped = 0;
    let mut diag = Vec::new();
    for run in 0..RUNS {
        let net = random_net(&c, &f, run);
        let rep = net_report(&c, &f, &net).unwrap();
        let delta = rep.delta_exact.unwrap();
        let edge = bound(&rep);
        let need = vertices_for(edge);
        let run_once = |e: f64| {
            if m == &Metric::identity(2) {
                verify_euclidean_equality_with(&net, e, &equality_cfg())
            } else {
                verify_uniform_equality_with(&net, m, e, &equality_cfg())
            }
        };
        // the largest canvas the cap allows, reported for context only
        let coarse = run_once(edge.max(finest_feasible_edge()));
        match &coarse {
            Ok(r) => diag.push(format!(
                "{}:{}",
                run,
                if r.verdict.equal { "eq" } else { "ne" }
            )),
            Err(Error::DegenerateSites) => diag.push(format!("{run}:degenerate")),
            Err(e) => diag.push(format!("{run}:{e}")),
        }
        if need > VERTEX_CAP {
            if matches!(coarse, Err(Error::DegenerateSites)) {
                skipped += 1;
                continue;
            }
            failed.push(format!(
                "run {run} ({} sites, δ={delta:.4}, ε̂={:.4}): edge {edge:.2e} needs {need} vertices",
                net.len(),
                rep.epsilon_hat
            ));
            continue;
        }
        let t = Instant::now();
        match run_once(edge) {
            Ok(r) => {
                let secs = t.elapsed().as_secs_f64();
                if !r.verdict.equal || secs > TIME_LIMIT_SECS {
                    failed.push(format!(
                        "run {run}: equal={} missing={} extra={} {secs:.1}s",
                        r.verdict.equal,
                        r.verdict.missing.len(),
                        r.verdict.extra.len()
                    ));
                }
            }
            Err(Error::DegenerateSites) => skipped += 1,
            Err(e) => failed.push(format!("run {run}: {e}")),
        }
    }
    let checked = RUNS - skipped;
    Outcome {
        pass: failed.is_empty() && checked > 0,
        detail: format!(
            "{} of {checked} non-degenerate runs failed [{}]; at the finest capped canvas: {}",
            failed.len(),
            failed.join("; "),
            diag.join(" ")
        ),
    }
}

fn criterion_1() -> Outcome {
    equality_protocol(&Metric::identity(2), |r| {
        let (eps, mu, delta) = (r.epsilon_hat, r.mu_hat.unwrap(), r.delta_exact.unwrap());
        (mu / 16.0).min(delta * delta / (64.0 * eps))
    })
}

fn criterion_2() -> Outcome {
    let m = Metric::diag(&[4.0, 1.0]).unwrap();
    let root_min = m.eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min).sqrt();
    equality_protocol(&m, move |r| {
        let (eps, mu, delta) = (r.epsilon_hat, r.mu_hat.unwrap(), r.delta_exact.unwrap());
        root_min * (mu / 16.0).min(delta * delta / (64.0 * eps))
    })
}

fn criterion_3() -> Outcome {
    let f = MetricField::euclidean();
    let c = work_canvas();
    let mut bad = Vec::new();
    let mut worst = f64::INFINITY;
    let mut checked = 0;
    for run in 0..RUNS {
        let net = random_net(&c, &f, run);
        let rep = net_report(&c, &f, &net).unwrap();
        match separation_with_params(&net, &unit(), rep.epsilon_hat, rep.delta_exact.unwrap()) {
            Ok(s) => {
                checked += 1;
                if let Some(d) = s.min_adjacent_circumcenter_dist {
                    worst = worst.min(d - s.vertex_bound);
                }
                if let Some(d) = s.min_foreign_face_dist {
                    worst = worst.min(d - s.face_bound);
                }
                if !s.holds {
                    bad.push(format!("run {run}: {s:?}"));
                }
            }
            Err(Error::DegenerateSites) => {}
            Err(e) => bad.push(format!("run {run}: {e}")),
        }
    }
    Outcome {
        pass: bad.is_empty() && checked > 0,
        detail: format!("{checked} nets checked, smallest margin {worst:.3e}; {}", bad.join("; ")),
    }
}

fn criterion_4() -> Outcome {
    let c = Canvas::grid(&unit(), &[100, 100], u64::MAX).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(BASE_SEED);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    let mut pairs = 0;
    for m in [Metric::diag(&[4.0, 1.0]).unwrap(), Metric::from_upper_2d(2.0, 0.7, 1.0).unwrap()] {
        let f = MetricField::uniform(m);
        for _ in 0..20 {
            let s = rng.gen_range(0..c.num_vertices());
            let fr = multi_front_dijkstra(&c, &f, &[c.vertex(s).to_vec()]).unwrap();
            let mut k = 0;
            while k < 25 {
                let v = rng.gen_range(0..c.num_vertices());
                if v == s {
                    continue;
                }
                let r = fr.dist[v] / uniform_distance(&m, c.vertex(s), c.vertex(v)).unwrap();
                lo = lo.min(r);
                hi = hi.max(r);
                pairs += 1;
                k += 1;
            }
        }
    }
    Outcome {
        pass: lo >= 1.0 - 1e-12 && hi <= 1.09,
        detail: format!("{pairs} pairs, ratio in [{lo:.6}, {hi:.6}]"),
    }
}

/// Largest distortion between the field and its value at any site.
fn sampled_psi0(c: &Canvas, f: &MetricField, sites: &[Vec<f64>]) -> f64 {
    sites
        .iter()
        .map(|p| region_distortion_bound(f, &f.eval(p), c.vertex_iter()).unwrap())
        .fold(1.0, f64::max)
}

fn shock_net(c: &Canvas, f: &MetricField, run: usize) -> (Vec<Vec<f64>>, NetReport) {
    let net = random_net(c, f, run);
    let rep = net_report(c, f, &net).unwrap();
    (net, rep)
}

fn canvas_at(edge: f64) -> Canvas {
    build_canvas(&unit(), edge, 2).unwrap()
}

fn criterion_5() -> Outcome {
    let wc = work_canvas();
    let mut alpha = ShockParams::alpha_for_distortion(1.05);
    let (f, net, rep, psi0) = loop {
        let f = MetricField::hyperbolic_shock(ShockParams { alpha, ..ShockParams::default() });
        let (net, rep) = shock_net(&wc, &f, 0);
        let psi0 = sampled_psi0(&wc, &f, &net);
        if psi0 <= 1.05 {
            break (f, net, rep, psi0);
        }
        alpha *= 0.9;
    };
    let c = canvas_at(rep.mu_hat.unwrap() / 10.0);
    let k = extract_complex(&color_canvas(&c, &f, &net).unwrap());
    let g = straightening_gap(&c, &f, &k, &net, 4, psi0, rep.epsilon_hat).unwrap();
    let limit = g.bound + 2.0 * c.max_step();
    Outcome {
        pass: g.max_gap <= limit,
        detail: format!(
            "α={alpha:.4}, ψ₀={psi0:.4}, {} sites, {} samples: max gap {:.4e} vs bound {:.4e} + 2h = {limit:.4e}",
            net.len(),
            g.samples,
            g.max_gap,
            g.bound
        ),
    }
}

fn criterion_6() -> Outcome {
    let wc = work_canvas();
    let f = MetricField::hyperbolic_shock(ShockParams::default());
    let (net, rep) = shock_net(&wc, &f, 0);
    let c = canvas_at(rep.mu_hat.unwrap() / 10.0);
    let d = color_canvas(&c, &f, &net).unwrap();
    let k = extract_complex(&d);
    let e = check_embedding(&k, &net, 2).unwrap();
    let fields = SiteFields::compute(&c, &f, &net).unwrap();
    let curved = realize(&c, &fields, &k, &net, 8).unwrap();
    let svg = render_svg(&c, &d, Some(&curved)).unwrap();
    let path: PathBuf = [env!("CARGO_TARGET_TMPDIR"), "acceptance_shock.svg"].iter().collect();
    let written = std::fs::write(&path, &svg).is_ok();
    Outcome {
        pass: e.inverted_count == 0 && e.overlap_pairs.is_empty() && written,
        detail: format!(
            "{} sites, {} triangles, inverted={} overlaps={} min altitude {:.4}; svg {} ({} bytes)",
            net.len(),
            k.of_dim(2).count(),
            e.inverted_count,
            e.overlap_pairs.len(),
            e.min_altitude,
            path.display(),
            svg.len()
        ),
    }
}

fn criterion_7() -> Outcome {
    let (eps, mu, delta) = (0.1, 0.16, 0.09);
    let mut notes = Vec::new();
    let mut ok = true;
    for dim in [2, 3] {
        let mut prev: Option<[f64; 4]> = None;
        for psi in [1.1, 1.01, 1.001, 1.0] {
            let r = evaluate_bounds(&TheoryParams::new(eps, mu, delta, psi), dim, 0.0).unwrap();
            let cur = [r.omega0, r.eta0, r.chi2.unwrap_or(f64::INFINITY), r.chi.unwrap_or(f64::INFINITY)];
            if let Some(p) = prev {
                ok &= cur.iter().zip(&p).all(|(a, b)| a <= b);
            }
            prev = Some(cur);
            if psi == 1.0 {
                ok &= cur == [0.0; 4];
                let d0 = r.delta0_sq.unwrap_or(f64::NAN);
                ok &= (d0 - delta * delta).abs() <= 1e-6;
                notes.push(format!("dim {dim}: δ₀²−δ² = {:.1e}", d0 - delta * delta));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(BASE_SEED);
    let mut draws = 0;
    for _ in 0..1000 {
        let eps = rng.gen_range(1e-3..10.0);
        let p = TheoryParams::new(eps, eps * rng.gen_range(1e-3..2.0), eps * rng.gen_range(0.0..1.0), 1.0 + rng.gen_range(0.0..0.5));
        let r = evaluate_bounds(&p, 2, 0.0).unwrap();
        ok &= r.canvas_bound_euclidean <= r.sep_foreign_faces;
        draws += 1;
    }
    Outcome {
        pass: ok,
        detail: format!("monotone to zero along ψ₀ ↓ 1; {}; {draws} draws with e_C bound ≤ δ²/8ε", notes.join(", ")),
    }
}

fn criterion_8() -> Outcome {
    let wc = work_canvas();
    let f = MetricField::hyperbolic_shock(ShockParams::default());
    let mut lines = Vec::new();
    let mut ok = true;
    for run in 0..5 {
        let (net, rep) = shock_net(&wc, &f, run);
        let n = grid_counts(&unit(), rep.mu_hat.unwrap() / 10.0).unwrap();
        let r = verify_refinement(&net, &f, &unit(), &n, u64::MAX).unwrap();
        ok &= r.verdict.equal;
        let verdict = if r.verdict.equal {
            "equal".to_string()
        } else {
            // context only: whether the complex settles at h/4 against h/8
            let quarter: Vec<usize> = n.iter().map(|k| 4 * k).collect();
            let settled = verify_refinement(&net, &f, &unit(), &quarter, u64::MAX).unwrap().verdict.equal;
            format!(
                "missing {:?} extra {:?}, h/4 vs h/8 {}",
                r.verdict.missing,
                r.verdict.extra,
                if settled { "equal" } else { "differ" }
            )
        };
        lines.push(format!(
            "run {run}: {} sites δ̂={:.3} {}→{} {verdict}",
            net.len(),
            rep.delta_hat.unwrap_or(0.0),
            n[0],
            r.fine_counts[0]
        ));
    }
    Outcome {
        pass: ok,
        detail: lines.join("; "),
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 euclidean equality", criterion_1),
        ("2 uniform-metric equality", criterion_2),
        ("3 separation", criterion_3),
        ("4 geodesic chord factor", criterion_4),
        ("5 straightening bound", criterion_5),
        ("6 embedding", criterion_6),
        ("7 bounds continuity", criterion_7),
        ("8 refinement stability", criterion_8),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failures = 0;
    for (name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let t = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {name} ({:.1}s): {}", t.elapsed().as_secs_f64(), o.detail);
        failures += usize::from(!o.pass);
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
