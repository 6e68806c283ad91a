//! Metrics, metric fields and the quantities derived from them.
//!
//! A [`Metric`] is a symmetric positive-definite matrix `G`; lengths are
//! measured as `sqrt(vᵀ G v)`. A [`MetricField`] assigns a metric to every
//! point of the domain.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance on `|G_ij - G_ji|`.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Smallest admissible eigenvalue.
pub const EIGEN_FLOOR: f64 = 1e-12;

/// A symmetric positive-definite matrix of dimension 1 to 3, stored inline.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Metric {
    dim: usize,
    m: [f64; 9],
}

impl Metric {
    /// Builds a metric from row-major entries, validating symmetry and definiteness.
    pub fn new(dim: usize, entries: &[f64]) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidMetric(format!("dimension {dim} not in 1..=3")));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionError {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        let mut m = [0.0; 9];
        m[..dim * dim].copy_from_slice(entries);
        let metric = Self { dim, m };
        metric.validate()?;
        Ok(metric)
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = [0.0; 9];
        for i in 0..dim {
            m[i * dim + i] = 1.0;
        }
        Self { dim, m }
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        let dim = values.len();
        let mut entries = vec![0.0; dim * dim];
        for (i, v) in values.iter().enumerate() {
            entries[i * dim + i] = *v;
        }
        Self::new(dim, &entries)
    }

    /// 2D metric from its upper triangle `g11 g12 g22`.
    pub fn from_upper_2d(g11: f64, g12: f64, g22: f64) -> Result<Self> {
        Self::new(2, &[g11, g12, g12, g22])
    }

    /// Skips validation; callers guarantee SPD by construction.
    pub(crate) fn from_raw(dim: usize, m: [f64; 9]) -> Self {
        Self { dim, m }
    }

    fn validate(&self) -> Result<()> {
        let d = self.dim;
        let scale = self.m[..d * d].iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if !self.m[..d * d].iter().all(|v| v.is_finite()) || scale == 0.0 {
            return Err(Error::InvalidMetric("non-finite or zero entries".into()));
        }
        for i in 0..d {
            for j in (i + 1)..d {
                if (self.get(i, j) - self.get(j, i)).abs() > SYMMETRY_TOL * scale {
                    return Err(Error::InvalidMetric(format!("asymmetric at ({i},{j})")));
                }
            }
        }
        let lo = self.eigenvalues()[0];
        if !(lo > EIGEN_FLOOR) {
            return Err(Error::InvalidMetric(format!("eigenvalue {lo:e} below floor")));
        }
        Ok(())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[i * self.dim + j]
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.m[..self.dim * self.dim])
    }

    /// Entries of the upper triangle in row order.
    pub fn upper(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim * (self.dim + 1) / 2);
        for i in 0..self.dim {
            for j in i..self.dim {
                out.push(self.get(i, j));
            }
        }
        out
    }

    /// `vᵀ G v`.
    #[inline]
    pub fn quad(&self, v: &[f64]) -> f64 {
        let d = self.dim;
        let mut s = 0.0;
        for i in 0..d {
            let mut row = 0.0;
            for j in 0..d {
                row += self.m[i * d + j] * v[j];
            }
            s += v[i] * row;
        }
        s
    }

    #[inline]
    pub fn norm(&self, v: &[f64]) -> f64 {
        self.quad(v).max(0.0).sqrt()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.to_matrix()).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Frobenius norm of `self - other` relative to the Frobenius norm of `self`.
    #[inline]
    pub fn relative_drift(&self, other: &Metric) -> f64 {
        let n = self.dim * self.dim;
        let mut diff = 0.0;
        let mut base = 0.0;
        for k in 0..n {
            let a = self.m[k];
            diff += (a - other.m[k]).powi(2);
            base += a * a;
        }
        (diff / base).sqrt()
    }

    /// `c * G`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        let mut m = self.m;
        m.iter_mut().for_each(|v| *v *= c);
        let out = Self { dim: self.dim, m };
        out.validate()?;
        Ok(out)
    }
}

/// Symmetric square root `F = Oᵀ √D O` with `F F = G`.
pub fn sqrt_metric(m: &Metric) -> Result<DMatrix<f64>> {
    m.validate()?;
    Ok(sym_power(m, 0.5))
}

fn sym_power(m: &Metric, p: f64) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(m.to_matrix());
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.powf(p)));
    &eig.eigenvectors * d * eig.eigenvectors.transpose()
}

/// Precomputed `F⁻¹` of a reference metric, for repeated distortion queries.
#[derive(Clone, Debug)]
pub struct DistortionRef {
    inv_root: DMatrix<f64>,
    metric: Metric,
}

impl DistortionRef {
    pub fn new(reference: &Metric) -> Result<Self> {
        reference.validate()?;
        Ok(Self {
            inv_root: sym_power(reference, -0.5),
            metric: *reference,
        })
    }

    /// `ψ(m, reference)`.
    pub fn distortion(&self, m: &Metric) -> Result<f64> {
        if m.dim() != self.metric.dim() {
            return Err(Error::DimensionError {
                expected: self.metric.dim(),
                got: m.dim(),
            });
        }
        // Spectral norms of F_m F_r⁻¹ and F_r F_m⁻¹ are the square roots of the
        // extreme eigenvalues of F_r⁻¹ G_m F_r⁻¹.
        let w = &self.inv_root * m.to_matrix() * &self.inv_root;
        let w = (&w + w.transpose()) * 0.5;
        let ev = SymmetricEigen::new(w).eigenvalues;
        let hi = ev.iter().copied().fold(f64::MIN, f64::max);
        let lo = ev.iter().copied().fold(f64::MAX, f64::min);
        if !(lo > 0.0) {
            return Err(Error::InvalidMetric("non-positive generalized eigenvalue".into()));
        }
        Ok(hi.sqrt().max(1.0 / lo.sqrt()).max(1.0))
    }
}

/// `ψ(G1, G2) = max{‖F1 F2⁻¹‖₂, ‖F2 F1⁻¹‖₂}`.
pub fn distortion(m1: &Metric, m2: &Metric) -> Result<f64> {
    m1.validate()?;
    let f1 = sym_power(m1, 0.5);
    let f2 = sym_power(m2, 0.5);
    let r2 = DistortionRef::new(m2)?;
    let inv1 = sym_power(m1, -0.5);
    let a = (&f1 * &r2.inv_root).svd(false, false).singular_values.max();
    let b = (&f2 * &inv1).svd(false, false).singular_values.max();
    Ok(a.max(b))
}

/// Geodesic distance under a constant metric.
pub fn uniform_distance(m: &Metric, x: &[f64], y: &[f64]) -> Result<f64> {
    let d = m.dim();
    for p in [x, y] {
        if p.len() != d {
            return Err(Error::DimensionError {
                expected: d,
                got: p.len(),
            });
        }
    }
    let mut v = [0.0; 3];
    for i in 0..d {
        v[i] = y[i] - x[i];
    }
    Ok(m.norm(&v[..d]))
}

/// Sampled supremum of `ψ(f(p), reference)`.
pub fn region_distortion_bound<'a, I>(f: &MetricField, reference: &Metric, samples: I) -> Result<f64>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let r = DistortionRef::new(reference)?;
    let mut best: Option<f64> = None;
    for p in samples {
        let psi = r.distortion(&f.eval(p))?;
        best = Some(best.map_or(psi, |b: f64| b.max(psi)));
    }
    best.ok_or(Error::EmptyInput("sample set"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    Euclidean,
    Uniform,
    HyperbolicShock,
    Swirl,
    CustomGrid,
}

impl FieldKind {
    pub fn name(self) -> &'static str {
        match self {
            FieldKind::Euclidean => "euclidean",
            FieldKind::Uniform => "uniform",
            FieldKind::HyperbolicShock => "hyperbolic_shock",
            FieldKind::Swirl => "swirl",
            FieldKind::CustomGrid => "custom_grid",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "euclidean" => FieldKind::Euclidean,
            "uniform" => FieldKind::Uniform,
            "hyperbolic_shock" | "shock" => FieldKind::HyperbolicShock,
            "swirl" => FieldKind::Swirl,
            "custom_grid" => FieldKind::CustomGrid,
            _ => return None,
        })
    }
}

/// Smooth ridge of anisotropy across a sinusoidal curve:
///
/// `g(p) = I + α² sech²(β φ(p)) n nᵀ`, `φ = y - y0 - a sin(2π ω x)`, `n = ∇φ / |∇φ|`.
///
/// Eigenvalues are 1 (along the curve) and `1 + α² sech²(β φ)` (across it), so
/// the distortion against the identity never exceeds `sqrt(1 + α²)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShockParams {
    pub alpha: f64,
    pub beta: f64,
    pub y0: f64,
    pub amplitude: f64,
    pub frequency: f64,
}

impl Default for ShockParams {
    fn default() -> Self {
        Self {
            alpha: 0.3,
            beta: 8.0,
            y0: 0.5,
            amplitude: 0.15,
            frequency: 1.0,
        }
    }
}

impl ShockParams {
    /// Largest `α` keeping `ψ(g(p), I) ≤ psi0` everywhere.
    pub fn alpha_for_distortion(psi0: f64) -> f64 {
        (psi0 * psi0 - 1.0).max(0.0).sqrt()
    }

    #[inline]
    fn eval(&self, p: &[f64]) -> Metric {
        let dim = p.len();
        let (x, y) = (p[0], p[1]);
        let w = 2.0 * PI * self.frequency;
        let phi = y - self.y0 - self.amplitude * (w * x).sin();
        let gx = -self.amplitude * w * (w * x).cos();
        let inv = 1.0 / (gx * gx + 1.0).sqrt();
        let n = [gx * inv, inv];
        let sech = 1.0 / (self.beta * phi).cosh();
        let k = self.alpha * self.alpha * sech * sech;
        let mut m = Metric::identity(dim).m;
        for i in 0..2 {
            for j in 0..2 {
                m[i * dim + j] += k * n[i] * n[j];
            }
        }
        Metric::from_raw(dim, m)
    }
}

/// Tangential anisotropy around a center:
/// `g(p) = I + (a - 1) w(r) t tᵀ`, `t` the unit tangent, `w = r² / (r² + r0²)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SwirlParams {
    pub anisotropy: f64,
    pub cx: f64,
    pub cy: f64,
    pub r0: f64,
}

impl Default for SwirlParams {
    fn default() -> Self {
        Self {
            anisotropy: 4.0,
            cx: 0.5,
            cy: 0.5,
            r0: 0.1,
        }
    }
}

impl SwirlParams {
    #[inline]
    fn eval(&self, p: &[f64]) -> Metric {
        let dim = p.len();
        let (dx, dy) = (p[0] - self.cx, p[1] - self.cy);
        let r2 = dx * dx + dy * dy;
        let mut m = Metric::identity(dim).m;
        if r2 > 0.0 {
            let r = r2.sqrt();
            let t = [-dy / r, dx / r];
            let k = (self.anisotropy - 1.0) * r2 / (r2 + self.r0 * self.r0);
            for i in 0..2 {
                for j in 0..2 {
                    m[i * dim + j] += k * t[i] * t[j];
                }
            }
        }
        Metric::from_raw(dim, m)
    }
}

/// Per-cell 2D metrics on a regular grid, bilinearly interpolated between cell centers.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricGrid {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
    pub nx: usize,
    pub ny: usize,
    /// Row-major (`y` outer) `[g11, g12, g22]` per cell.
    pub values: Vec<[f64; 3]>,
}

impl MetricGrid {
    pub fn new(lo: [f64; 2], hi: [f64; 2], nx: usize, ny: usize, values: Vec<[f64; 3]>) -> Result<Self> {
        if nx == 0 || ny == 0 || values.len() != nx * ny {
            return Err(Error::InvalidMetric(format!(
                "grid {nx}x{ny} needs {} cells, got {}",
                nx * ny,
                values.len()
            )));
        }
        if !(hi[0] > lo[0] && hi[1] > lo[1]) {
            return Err(Error::InvalidMetric("empty grid extent".into()));
        }
        for (k, v) in values.iter().enumerate() {
            Metric::from_upper_2d(v[0], v[1], v[2])
                .map_err(|e| Error::InvalidMetric(format!("cell {k}: {e}")))?;
        }
        Ok(Self { lo, hi, nx, ny, values })
    }

    fn eval(&self, p: &[f64]) -> Metric {
        let axis = |t: f64, lo: f64, hi: f64, n: usize| -> (usize, usize, f64) {
            let s = ((t - lo) / (hi - lo) * n as f64 - 0.5).clamp(0.0, (n - 1) as f64);
            let i0 = (s.floor() as usize).min(n - 1);
            let i1 = (i0 + 1).min(n - 1);
            (i0, i1, s - i0 as f64)
        };
        let (i0, i1, fx) = axis(p[0], self.lo[0], self.hi[0], self.nx);
        let (j0, j1, fy) = axis(p[1], self.lo[1], self.hi[1], self.ny);
        let at = |i: usize, j: usize| self.values[j * self.nx + i];
        let mut g = [0.0; 3];
        for k in 0..3 {
            let bottom = at(i0, j0)[k] * (1.0 - fx) + at(i1, j0)[k] * fx;
            let top = at(i0, j1)[k] * (1.0 - fx) + at(i1, j1)[k] * fx;
            g[k] = bottom * (1.0 - fy) + top * fy;
        }
        let dim = p.len();
        let mut m = Metric::identity(dim).m;
        m[0] = g[0];
        m[1] = g[1];
        m[dim] = g[1];
        m[dim + 1] = g[2];
        Metric::from_raw(dim, m)
    }
}

#[derive(Clone, Debug)]
enum Repr {
    Euclidean,
    Constant(Metric),
    Shock(ShockParams),
    Swirl(SwirlParams),
    Grid(Arc<MetricGrid>),
}

/// A named metric field with its parameters.
#[derive(Clone, Debug)]
pub struct MetricField {
    kind: FieldKind,
    params: BTreeMap<String, f64>,
    repr: Repr,
}

impl MetricField {
    pub fn euclidean() -> Self {
        Self {
            kind: FieldKind::Euclidean,
            params: BTreeMap::new(),
            repr: Repr::Euclidean,
        }
    }

    pub fn uniform(m: Metric) -> Self {
        let mut params = BTreeMap::new();
        for i in 0..m.dim() {
            for j in i..m.dim() {
                params.insert(format!("g{}{}", i + 1, j + 1), m.get(i, j));
            }
        }
        Self {
            kind: FieldKind::Uniform,
            params,
            repr: Repr::Constant(m),
        }
    }

    pub fn hyperbolic_shock(p: ShockParams) -> Self {
        let params = [
            ("alpha", p.alpha),
            ("beta", p.beta),
            ("y0", p.y0),
            ("amplitude", p.amplitude),
            ("frequency", p.frequency),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        Self {
            kind: FieldKind::HyperbolicShock,
            params,
            repr: Repr::Shock(p),
        }
    }

    pub fn swirl(p: SwirlParams) -> Self {
        let params = [("anisotropy", p.anisotropy), ("cx", p.cx), ("cy", p.cy), ("r0", p.r0)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        Self {
            kind: FieldKind::Swirl,
            params,
            repr: Repr::Swirl(p),
        }
    }

    pub fn custom_grid(grid: MetricGrid) -> Self {
        let params = [
            ("x0", grid.lo[0]),
            ("y0", grid.lo[1]),
            ("x1", grid.hi[0]),
            ("y1", grid.hi[1]),
            ("nx", grid.nx as f64),
            ("ny", grid.ny as f64),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        Self {
            kind: FieldKind::CustomGrid,
            params,
            repr: Repr::Grid(Arc::new(grid)),
        }
    }

    /// Builds a catalog field from its kind and named parameters; missing
    /// parameters take their defaults. `custom_grid` needs [`MetricField::custom_grid`].
    pub fn from_params(kind: FieldKind, params: &BTreeMap<String, f64>) -> Result<Self> {
        let get = |k: &str, d: f64| params.get(k).copied().unwrap_or(d);
        let known: &[&str] = match kind {
            FieldKind::Euclidean => &[],
            FieldKind::Uniform => &["g11", "g12", "g22", "g13", "g23", "g33"],
            FieldKind::HyperbolicShock => &["alpha", "beta", "y0", "amplitude", "frequency"],
            FieldKind::Swirl => &["anisotropy", "cx", "cy", "r0"],
            FieldKind::CustomGrid => {
                return Err(Error::InvalidMetric("custom_grid needs grid data".into()));
            }
        };
        if let Some(k) = params.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(Error::InvalidMetric(format!("unknown parameter '{k}' for {}", kind.name())));
        }
        Ok(match kind {
            FieldKind::Euclidean => Self::euclidean(),
            FieldKind::Uniform => {
                let m = if params.contains_key("g33") {
                    let (a, b, c) = (get("g11", 1.0), get("g12", 0.0), get("g13", 0.0));
                    let (d, e, f) = (get("g22", 1.0), get("g23", 0.0), get("g33", 1.0));
                    Metric::new(3, &[a, b, c, b, d, e, c, e, f])?
                } else {
                    Metric::from_upper_2d(get("g11", 1.0), get("g12", 0.0), get("g22", 1.0))?
                };
                Self::uniform(m)
            }
            FieldKind::HyperbolicShock => {
                let d = ShockParams::default();
                Self::hyperbolic_shock(ShockParams {
                    alpha: get("alpha", d.alpha),
                    beta: get("beta", d.beta),
                    y0: get("y0", d.y0),
                    amplitude: get("amplitude", d.amplitude),
                    frequency: get("frequency", d.frequency),
                })
            }
            FieldKind::Swirl => {
                let d = SwirlParams::default();
                let p = SwirlParams {
                    anisotropy: get("anisotropy", d.anisotropy),
                    cx: get("cx", d.cx),
                    cy: get("cy", d.cy),
                    r0: get("r0", d.r0),
                };
                if !(p.anisotropy > 0.0) || !(p.r0 > 0.0) {
                    return Err(Error::InvalidMetric("swirl needs anisotropy > 0 and r0 > 0".into()));
                }
                Self::swirl(p)
            }
            FieldKind::CustomGrid => unreachable!(),
        })
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn grid(&self) -> Option<&MetricGrid> {
        match &self.repr {
            Repr::Grid(g) => Some(g),
            _ => None,
        }
    }

    /// Dimension fixed by the field itself, if any.
    pub fn fixed_dim(&self) -> Option<usize> {
        match &self.repr {
            Repr::Constant(m) => Some(m.dim()),
            Repr::Grid(_) => Some(2),
            _ => None,
        }
    }

    /// The constant value of a position-independent field in dimension `dim`.
    pub fn constant(&self, dim: usize) -> Option<Metric> {
        match &self.repr {
            Repr::Euclidean => Some(Metric::identity(dim)),
            Repr::Constant(m) if m.dim() == dim => Some(*m),
            _ => None,
        }
    }

    /// The metric at `p`; the dimension is `p.len()`.
    #[inline]
    pub fn eval(&self, p: &[f64]) -> Metric {
        match &self.repr {
            Repr::Euclidean => Metric::identity(p.len()),
            Repr::Constant(m) => *m,
            Repr::Shock(s) => s.eval(p),
            Repr::Swirl(s) => s.eval(p),
            Repr::Grid(g) => g.eval(p),
        }
    }

    /// Checks the field against a dimension.
    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if let Some(d) = self.fixed_dim() {
            if d != dim {
                return Err(Error::DimensionError { expected: d, got: dim });
            }
        }
        if dim < 2 && !matches!(self.repr, Repr::Euclidean | Repr::Constant(_)) {
            return Err(Error::DimensionError { expected: 2, got: dim });
        }
        Ok(())
    }
}

/// Net and metric parameters consumed by the closed-form bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoryParams {
    pub epsilon: f64,
    pub mu: f64,
    pub delta: f64,
    pub iota: f64,
    pub lambda: f64,
    pub psi0: f64,
    pub lambda_min_eigen: f64,
    pub lambda_max_eigen: f64,
    pub sec_curv_lo: Option<f64>,
    pub sec_curv_hi: Option<f64>,
    pub inj_radius: Option<f64>,
}

impl TheoryParams {
    /// Euclidean-scaled parameters; `iota` and `lambda` are derived.
    pub fn new(epsilon: f64, mu: f64, delta: f64, psi0: f64) -> Self {
        Self {
            epsilon,
            mu,
            delta,
            iota: delta / epsilon,
            lambda: mu / epsilon,
            psi0,
            lambda_min_eigen: 1.0,
            lambda_max_eigen: 1.0,
            sec_curv_lo: None,
            sec_curv_hi: None,
            inj_radius: None,
        }
    }

    pub fn with_eigen_range(mut self, lo: f64, hi: f64) -> Self {
        self.lambda_min_eigen = lo;
        self.lambda_max_eigen = hi;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.into()));
        let all = [self.epsilon, self.mu, self.delta, self.psi0, self.iota, self.lambda];
        if !all.iter().all(|v| v.is_finite()) {
            return bad("non-finite value");
        }
        if !(self.epsilon > 0.0) {
            return bad("epsilon must be positive");
        }
        if !(self.mu > 0.0 && self.mu <= 2.0 * self.epsilon) {
            return bad("need 0 < mu <= 2 epsilon");
        }
        if !(self.delta >= 0.0 && self.delta <= self.epsilon) {
            return bad("need 0 <= delta <= epsilon");
        }
        let rel = |a: f64, b: f64| (a - b).abs() <= 1e-9 * b.abs().max(1.0);
        if !rel(self.iota, self.delta / self.epsilon) {
            return bad("iota must equal delta / epsilon");
        }
        if !rel(self.lambda, self.mu / self.epsilon) {
            return bad("lambda must equal mu / epsilon");
        }
        if !(self.psi0 >= 1.0) {
            return bad("psi0 must be >= 1");
        }
        if !(self.lambda_min_eigen > 0.0 && self.lambda_min_eigen <= self.lambda_max_eigen) {
            return bad("need 0 < lambda_min_eigen <= lambda_max_eigen");
        }
        Ok(())
    }
}
