//! `anisomesh`: command-line driver for discrete Riemannian Voronoi diagrams
//! and their dual anisotropic Delaunay complexes.
//!
//! Every command writes its artifacts into `--out-dir` together with a
//! `manifest.json` listing the parameters and outputs. Exit status is 0 on
//! success, 2 on unreadable or malformed input and 1 on any other failure,
//! including a failed check under `--assert`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anisomesh::bounds::evaluate_bounds;
use anisomesh::canvas::{build_canvas_with_cap, grid_counts, max_edge_length, BBox, Canvas, DEFAULT_VERTEX_CAP};
use anisomesh::conformance::{
    verify_encompassing, verify_euclidean_equality_with, verify_refinement, verify_separation,
    verify_uniform_equality_with, EqualityConfig,
};
use anisomesh::drvd::{color_canvas, extract_complex};
use anisomesh::io::{
    format_complex, format_medit, format_off, format_sites, parse_field_config, parse_sites, parse_theory_params,
    write_atomic,
};
use anisomesh::metric::{Metric, MetricField, TheoryParams};
use anisomesh::nets::{generate_net, net_report};
use anisomesh::complex::Simplex;
use anisomesh::realization::{check_embedding, realize, realize_straight, Sample, SiteFields};
use anisomesh::svg::render_svg;
use anisomesh::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Parser, Debug, Serialize)]
#[command(name = "anisomesh", version, about = "Discrete Riemannian Voronoi diagrams and anisotropic Delaunay complexes")]
struct Cli {
    /// Directory for output files (created if missing).
    #[serde(skip)]
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Worker threads; the ANISOMESH_THREADS variable takes precedence.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 42)]
    rng_seed: u64,
    /// Exit with status 1 when a verification does not hold.
    #[arg(long = "assert", global = true)]
    assertion_mode: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
enum Command {
    /// Build a canvas and export it (.off in 2D, .mesh in 3D).
    Canvas(CanvasArgs),
    /// Generate a farthest-point net and report its parameters.
    Net(NetArgs),
    /// Colour canvas vertices by their nearest site.
    Color(SiteArgs),
    /// Extract the discrete Delaunay complex.
    Complex(SiteArgs),
    /// Realize the complex and check that it is embedded.
    Realize(RealizeArgs),
    /// Run one of the conformance checks.
    Verify {
        #[command(subcommand)]
        check: Check,
    },
    /// Evaluate the closed-form bounds.
    Bounds(BoundsArgs),
    /// Render the coloured canvas and the dual complex to SVG.
    Render(RenderArgs),
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
enum Check {
    /// Discrete complex against the exact Delaunay complex (constant metrics).
    Equality(EqualityArgs),
    /// Distance between exact Voronoi vertices and to foreign faces.
    Separation(SiteArgs),
    /// Cell of one site against the power-shifted cells of its own metric.
    Encompassing(EncompassingArgs),
    /// Complex at canvas edge h against the complex at h/2.
    Refinement(SiteArgs),
}

#[derive(Args, Debug, Serialize)]
struct DomainArgs {
    /// Ambient dimension (2 or 3).
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Canvas box as comma-separated lower then upper corner; unit box by default.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    bbox: Option<Vec<f64>>,
    /// Longest canvas edge.
    #[arg(long, default_value_t = 0.01)]
    canvas_edge: f64,
    #[arg(long, default_value_t = DEFAULT_VERTEX_CAP)]
    vertex_cap: u64,
}

#[derive(Args, Debug, Serialize)]
struct CanvasArgs {
    #[command(flatten)]
    domain: DomainArgs,
}

#[derive(Args, Debug, Serialize)]
struct NetArgs {
    #[command(flatten)]
    domain: DomainArgs,
    /// Metric field configuration (key=value); Euclidean when omitted.
    #[arg(long)]
    field: Option<PathBuf>,
    /// Covering radius to reach.
    #[arg(long)]
    epsilon_target: f64,
    /// First site; drawn from the seeded RNG when omitted.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    seed_point: Option<Vec<f64>>,
}

#[derive(Args, Debug, Serialize)]
struct SiteArgs {
    #[command(flatten)]
    domain: DomainArgs,
    /// Site file, one point per line.
    #[arg(long)]
    sites: PathBuf,
    #[arg(long)]
    field: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum Mode {
    Straight,
    Curved,
    None,
}

#[derive(Args, Debug, Serialize)]
struct RealizeArgs {
    #[command(flatten)]
    input: SiteArgs,
    #[arg(long, value_enum, default_value_t = Mode::Straight)]
    mode: Mode,
    /// Barycentric subdivisions per simplex in curved mode.
    #[arg(long, default_value_t = 6)]
    resolution: usize,
}

#[derive(Args, Debug, Serialize)]
struct RenderArgs {
    #[command(flatten)]
    input: SiteArgs,
    /// How the dual complex is drawn over the cells.
    #[arg(long, value_enum, default_value_t = Mode::Straight)]
    mode: Mode,
    #[arg(long, default_value_t = 6)]
    resolution: usize,
}

#[derive(Args, Debug, Serialize)]
struct EqualityArgs {
    #[command(flatten)]
    input: SiteArgs,
    /// Canvas edge for the discrete complex; defaults to √λ_min·min{μ/16, δ²/64ε}
    /// measured on the `--canvas-edge` canvas.
    #[arg(long)]
    check_edge: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
struct EncompassingArgs {
    #[command(flatten)]
    input: SiteArgs,
    /// Index of the site whose cell is checked.
    #[arg(long, default_value_t = 0)]
    site: usize,
}

#[derive(Args, Debug, Serialize)]
struct BoundsArgs {
    /// Parameter file (epsilon, mu, delta, psi0, ...); overrides the flags below.
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    psi0: f64,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Geodesic relaxation factor of the canvas distances.
    #[arg(long, default_value_t = 0.0)]
    xi: f64,
}

enum Failure {
    Input(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_)
            | Error::Io(_)
            | Error::InvalidMetric(_)
            | Error::InvalidParams(_)
            | Error::InvalidCanvas(_)
            | Error::DimensionError { .. }
            | Error::EmptyInput(_) => Failure::Input(e.to_string()),
            other => Failure::Run(other.to_string()),
        }
    }
}

/// Realized complex with the witness map left out (its keys are simplices).
#[derive(Serialize)]
struct RealizationView<'a> {
    mode: Mode,
    site_coords: &'a [Vec<f64>],
    maximal: Vec<Simplex>,
    curved_samples: &'a [(Simplex, Vec<Sample>)],
}

type Res<T> = std::result::Result<T, Failure>;

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    rng_seed: u64,
    threads: Option<usize>,
    config: &'a Cli,
    outputs: Vec<String>,
    passed: Option<bool>,
}

struct Run<'a> {
    out_dir: &'a Path,
    outputs: Vec<String>,
}

impl Run<'_> {
    fn write(&mut self, name: &str, bytes: &[u8]) -> Res<()> {
        write_atomic(&self.out_dir.join(name), bytes)?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Res<String> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Run(e.to_string()))?;
        text.push('\n');
        self.write(name, text.as_bytes())?;
        Ok(text)
    }
}

fn read_text(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_sites(path: &Path, dim: usize) -> Res<Vec<Vec<f64>>> {
    let sites = parse_sites(&read_text(path)?).map_err(|e| Failure::Input(format!("{}:{e}", path.display())))?;
    if sites.is_empty() {
        return Err(Failure::Input(format!("{}: no sites", path.display())));
    }
    if sites[0].len() != dim {
        return Err(Failure::Input(format!(
            "{}: sites have dimension {}, expected {dim}",
            path.display(),
            sites[0].len()
        )));
    }
    Ok(sites)
}

fn load_field(path: Option<&Path>) -> Res<MetricField> {
    match path {
        None => Ok(MetricField::euclidean()),
        Some(p) => parse_field_config(&read_text(p)?, p.parent())
            .map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
    }
}

fn domain(d: &DomainArgs) -> Res<BBox> {
    match &d.bbox {
        None => Ok(BBox::unit(d.dim)),
        Some(v) if v.len() == 2 * d.dim => Ok(BBox::new(&v[..d.dim], &v[d.dim..])?),
        Some(v) => Err(Failure::Input(format!("--bbox needs {} values, got {}", 2 * d.dim, v.len()))),
    }
}

fn canvas(d: &DomainArgs) -> Res<Canvas> {
    Ok(build_canvas_with_cap(&domain(d)?, d.canvas_edge, d.dim, d.vertex_cap)?)
}

fn configure_threads(requested: Option<usize>) -> Res<Option<usize>> {
    let n = match std::env::var("ANISOMESH_THREADS") {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .map_err(|_| Failure::Input(format!("ANISOMESH_THREADS: expected a count, found '{v}'")))?,
        ),
        Err(_) => requested,
    };
    if let Some(n) = n {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Run(e.to_string()))?;
    }
    Ok(n)
}

/// Returns the stdout summary and, for checks, whether they held.
fn dispatch(cli: &Cli, run: &mut Run) -> Res<(String, Option<bool>)> {
    match &cli.command {
        Command::Canvas(a) => {
            let c = canvas(&a.domain)?;
            let (name, mesh) = if a.domain.dim == 2 {
                ("canvas.off", format_off(&c)?)
            } else {
                ("canvas.mesh", format_medit(&c)?)
            };
            run.write(name, mesh.as_bytes())?;
            let stats = serde_json::json!({
                "counts": c.counts(),
                "vertices": c.num_vertices(),
                "cells": c.num_cells(),
                "steps": c.steps(),
                "edges": max_edge_length(&c, &MetricField::euclidean()),
            });
            Ok((run.json("canvas.json", &stats)?, None))
        }
        Command::Net(a) => {
            let bbox = domain(&a.domain)?;
            let c = canvas(&a.domain)?;
            let f = load_field(a.field.as_deref())?;
            let seed = match &a.seed_point {
                Some(p) => p.clone(),
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(cli.rng_seed);
                    (0..a.domain.dim).map(|i| rng.gen_range(bbox.lo[i]..bbox.hi[i])).collect()
                }
            };
            let sites = generate_net(&c, &f, a.epsilon_target, &seed)?;
            run.write("sites.txt", format_sites(&sites).as_bytes())?;
            let report = net_report(&c, &f, &sites)?;
            Ok((run.json("net.json", &report)?, None))
        }
        Command::Color(a) => {
            let c = canvas(&a.domain)?;
            let sites = load_sites(&a.sites, a.domain.dim)?;
            let d = color_canvas(&c, &load_field(a.field.as_deref())?, &sites)?;
            let colors: String = d.vertex_colors().iter().map(|k| format!("{k}\n")).collect();
            run.write("colors.txt", colors.as_bytes())?;
            let multi = (0..d.num_cells()).filter(|&i| d.cell_colors(i).len() > 1).count();
            let summary = serde_json::json!({
                "sites": d.num_sites(),
                "vertices": c.num_vertices(),
                "cells": d.num_cells(),
                "multi_color_cells": multi,
                "cells_per_site": (0..d.num_sites()).map(|s| d.site_cells(s).len()).collect::<Vec<_>>(),
            });
            Ok((run.json("color.json", &summary)?, None))
        }
        Command::Complex(a) => {
            let c = canvas(&a.domain)?;
            let sites = load_sites(&a.sites, a.domain.dim)?;
            let k = extract_complex(&color_canvas(&c, &load_field(a.field.as_deref())?, &sites)?);
            run.write("complex.cplx", format_complex(&k).as_bytes())?;
            let by_dim: Vec<usize> = (0..=k.dimension().unwrap_or(0)).map(|i| k.of_dim(i).count()).collect();
            let summary = serde_json::json!({
                "simplices": k.len(),
                "by_dimension": by_dim,
                "maximal": k.maximal(),
            });
            Ok((run.json("complex.json", &summary)?, None))
        }
        Command::Realize(a) => {
            let s = &a.input;
            let c = canvas(&s.domain)?;
            let f = load_field(s.field.as_deref())?;
            let sites = load_sites(&s.sites, s.domain.dim)?;
            let k = extract_complex(&color_canvas(&c, &f, &sites)?);
            let realized = match a.mode {
                Mode::Curved => realize(&c, &SiteFields::compute(&c, &f, &sites)?, &k, &sites, a.resolution)?,
                _ => realize_straight(&k, &sites),
            };
            let view = RealizationView {
                mode: a.mode,
                site_coords: &realized.site_coords,
                maximal: realized.complex.maximal(),
                curved_samples: &realized.curved_samples,
            };
            run.json("realization.json", &view)?;
            let emb = check_embedding(&k, &sites, s.domain.dim)?;
            Ok((run.json("embedding.json", &emb)?, Some(emb.embedded)))
        }
        Command::Render(a) => {
            let s = &a.input;
            let c = canvas(&s.domain)?;
            let f = load_field(s.field.as_deref())?;
            let sites = load_sites(&s.sites, s.domain.dim)?;
            let d = color_canvas(&c, &f, &sites)?;
            let k = extract_complex(&d);
            let realized = match a.mode {
                Mode::None => None,
                Mode::Straight => Some(realize_straight(&k, &sites)),
                Mode::Curved => Some(realize(&c, &SiteFields::compute(&c, &f, &sites)?, &k, &sites, a.resolution)?),
            };
            let svg = render_svg(&c, &d, realized.as_ref())?;
            run.write("diagram.svg", svg.as_bytes())?;
            Ok((format!("{}\n", run.out_dir.join("diagram.svg").display()), None))
        }
        Command::Bounds(a) => {
            let p = match &a.params {
                Some(path) => parse_theory_params(&read_text(path)?)
                    .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?,
                None => {
                    let need = |v: Option<f64>, n: &str| v.ok_or_else(|| Failure::Input(format!("missing --{n} (or --params)")));
                    TheoryParams::new(need(a.epsilon, "epsilon")?, need(a.mu, "mu")?, need(a.delta, "delta")?, a.psi0)
                }
            };
            let report = evaluate_bounds(&p, a.dim, a.xi)?;
            Ok((run.json("bounds.json", &report)?, None))
        }
        Command::Verify { check } => verify(check, run),
    }
}

fn verify(check: &Check, run: &mut Run) -> Res<(String, Option<bool>)> {
    match check {
        Check::Equality(a) => {
            let s = &a.input;
            let bbox = domain(&s.domain)?;
            let c = canvas(&s.domain)?;
            let f = load_field(s.field.as_deref())?;
            let m = f
                .constant(s.domain.dim)
                .ok_or_else(|| Failure::Input("equality needs a constant metric field".into()))?;
            let sites = load_sites(&s.sites, s.domain.dim)?;
            let edge = match a.check_edge {
                Some(e) => e,
                None => {
                    let r = net_report(&c, &f, &sites)?;
                    let eps = r.epsilon_hat;
                    let mu = r.mu_hat.ok_or(Error::TooFewSites { need: 2, got: sites.len() })?;
                    let delta = r.delta_exact.or(r.delta_hat).ok_or(Error::DegenerateSites)?;
                    let root_min = m.eigenvalues().into_iter().fold(f64::INFINITY, f64::min).sqrt();
                    root_min * (mu / 16.0).min(delta * delta / (64.0 * eps))
                }
            };
            let cfg = EqualityConfig {
                domain: Some(bbox),
                vertex_cap: s.domain.vertex_cap,
                ..EqualityConfig::default()
            };
            let report = if m == Metric::identity(s.domain.dim) {
                verify_euclidean_equality_with(&sites, edge, &cfg)?
            } else {
                verify_uniform_equality_with(&sites, &m, edge, &cfg)?
            };
            Ok((run.json("equality.json", &report)?, Some(report.verdict.equal)))
        }
        Check::Separation(a) => {
            let c = canvas(&a.domain)?;
            if a.field.is_some() {
                return Err(Failure::Input("separation is defined for the Euclidean metric only".into()));
            }
            let sites = load_sites(&a.sites, a.domain.dim)?;
            let report = verify_separation(&sites, &c)?;
            Ok((run.json("separation.json", &report)?, Some(report.holds)))
        }
        Check::Encompassing(a) => {
            let s = &a.input;
            let c = canvas(&s.domain)?;
            let sites = load_sites(&s.sites, s.domain.dim)?;
            let report = verify_encompassing(&sites, &load_field(s.field.as_deref())?, a.site, &c)?;
            Ok((run.json("encompassing.json", &report)?, Some(report.holds)))
        }
        Check::Refinement(a) => {
            let bbox = domain(&a.domain)?;
            let sites = load_sites(&a.sites, a.domain.dim)?;
            let counts = grid_counts(&bbox, a.domain.canvas_edge)?;
            let report = verify_refinement(&sites, &load_field(a.field.as_deref())?, &bbox, &counts, a.domain.vertex_cap)?;
            Ok((run.json("refinement.json", &report)?, Some(report.verdict.equal)))
        }
    }
}

fn execute(cli: &Cli) -> Res<bool> {
    let threads = configure_threads(cli.threads)?;
    fs::create_dir_all(&cli.out_dir).map_err(|e| Failure::Input(format!("{}: {e}", cli.out_dir.display())))?;
    let mut run = Run {
        out_dir: &cli.out_dir,
        outputs: Vec::new(),
    };
    let (summary, passed) = dispatch(cli, &mut run)?;
    let mut outputs = std::mem::take(&mut run.outputs);
    outputs.push("manifest.json".into());
    let manifest = Manifest {
        tool: "anisomesh",
        version: env!("CARGO_PKG_VERSION"),
        rng_seed: cli.rng_seed,
        threads,
        config: cli,
        outputs,
        passed,
    };
    run.json("manifest.json", &manifest)?;
    print!("{summary}");
    Ok(passed != Some(false) || !cli.assertion_mode)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("anisomesh: check failed");
            ExitCode::from(1)
        }
        Err(Failure::Input(m)) => {
            eprintln!("anisomesh: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Run(m)) => {
            eprintln!("anisomesh: {m}");
            ExitCode::from(1)
        }
    }
}
