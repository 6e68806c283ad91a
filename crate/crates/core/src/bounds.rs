//! Closed-form separation, stability and canvas-density bounds.
//!
//! Quantities that depend on the metric distortion `ψ₀` use the perturbed
//! net parameters `ε₀ = ψ₀ ε`, `μ₀ = μ / ψ₀` and `ρ₀ = 2 ε₀`. A quantity
//! whose formula leaves its domain (negative square, vanishing
//! denominator, negative length) is reported as `None` together with the
//! inequality that failed.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::TheoryParams;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub dim: usize,
    pub xi: f64,
    /// `δ²/4ε`: distance between adjacent Voronoi vertices.
    pub sep_vertices: f64,
    /// `δ²/8ε`: distance from a Voronoi vertex to foreign Voronoi faces.
    pub sep_foreign_faces: f64,
    /// `δ²/16ε`: thickness of Voronoi faces.
    pub face_thickness: f64,
    /// `min{μ/16, δ²/64ε}`.
    pub canvas_bound_euclidean: f64,
    /// `min{μ/3, δ²/32ε}`.
    pub canvas_bound_theorem5_loose: f64,
    /// `√λ_min · min{μ/3, δ²/32ε}`.
    pub canvas_bound_uniform: f64,
    pub voronoi_angle_lo: f64,
    pub voronoi_angle_hi: f64,
    /// `ι²/2`.
    pub dihedral_s0: f64,
    pub dihedral_lo: f64,
    pub dihedral_hi: f64,
    pub epsilon0: f64,
    pub mu0: f64,
    pub rho0: f64,
    /// `2ρ₀²(ψ₀² − 1)`.
    pub omega0: f64,
    /// `ρ₀²(ψ₀² − 1)/μ₀`.
    pub eta0: f64,
    pub chi2: Option<f64>,
    /// `½[ι²/(4ψ₀²) − ½(ψ₀² − 1/ψ₀²)]`, the sine lower bound used by `χ`.
    pub chi_s0: f64,
    pub chi: Option<f64>,
    pub delta0_sq: Option<f64>,
    pub ell0: Option<f64>,
    /// `√λ_min · min{μ/3, ℓ₀/2}`.
    pub canvas_bound_arbitrary: Option<f64>,
    /// `2ξρ̃²` with `ρ̃ = 2ε`.
    pub approx_relax_omega: f64,
    /// `ε·√(128(ψ₀ − 1))`.
    pub straightening_bound: f64,
    /// Straight realizations embed below `1 + ι⁴/(32·4³)`.
    pub embedding_psi0_threshold: f64,
    pub ineq19_lhs: Option<f64>,
    pub ineq19_rhs: f64,
    /// Zero-distortion limit `δ²/4ε` of the minimal Voronoi-cell altitude.
    pub h_min_limit: f64,
    /// Field name to the inequality that made it undefined.
    pub not_applicable: BTreeMap<String, String>,
}

/// `√(1+x) − √(1−x)`, i.e. `2 sin(½ arcsin x)`.
fn two_root_gap(x: f64) -> f64 {
    (1.0 + x).sqrt() - (1.0 - x).sqrt()
}

/// Evaluates every bound for a net in dimension `dim` with geodesic relaxation `xi`.
pub fn evaluate_bounds(p: &TheoryParams, dim: usize, xi: f64) -> Result<BoundsReport> {
    p.validate()?;
    if dim < 2 {
        return Err(Error::InvalidParams(format!("dimension {dim} < 2")));
    }
    if !(xi >= 0.0) || !xi.is_finite() {
        return Err(Error::InvalidParams("xi must be finite and >= 0".into()));
    }
    let (eps, mu, delta, psi) = (p.epsilon, p.mu, p.delta, p.psi0);
    let (iota, lambda) = (p.iota, p.lambda);
    let mut na = BTreeMap::new();
    let d2 = delta * delta;
    let root_min = p.lambda_min_eigen.sqrt();

    let x = mu / (2.0 * eps);
    let voronoi_angle_lo = 2.0 * x.asin();
    let voronoi_angle_hi = PI - x.asin();
    if voronoi_angle_lo > voronoi_angle_hi {
        na.insert("voronoi_angle".into(), "3·arcsin(μ/2ε) <= π".into());
    }
    let dihedral_s0 = iota * iota / 2.0;

    let psi2 = psi * psi;
    let epsilon0 = psi * eps;
    let mu0 = mu / psi;
    let rho0 = 2.0 * epsilon0;
    let omega0 = 2.0 * rho0 * rho0 * (psi2 - 1.0);
    let eta0 = rho0 * rho0 * (psi2 - 1.0) / mu0;

    // μ₀/2ε₀ = λ/(2ψ₀²) stays in (0, 1] for valid params.
    let d1 = two_root_gap(lambda / (2.0 * psi2));
    let chi2 = if d1 > 0.0 {
        Some(2.0 * eta0 / d1)
    } else {
        na.insert("chi2".into(), "√(1+μ₀/2ε₀) − √(1−μ₀/2ε₀) > 0".into());
        None
    };
    let chi_s0 = 0.5 * (iota * iota / (4.0 * psi2) - 0.5 * (psi2 - 1.0 / psi2));
    let d2_gap = if chi_s0 > 0.0 { two_root_gap(chi_s0.min(1.0)) } else { 0.0 };
    let sine_pow = (d2_gap / 2.0).powi(dim as i32 - 2);
    let chi = chi2.and_then(|c2| {
        if dim == 2 || c2 == 0.0 {
            Some(c2)
        } else if sine_pow > 0.0 {
            Some(c2 / sine_pow)
        } else {
            na.insert(
                "chi".into(),
                "ι²/(4ψ₀²) > ½(ψ₀² − 1/ψ₀²) (positive dihedral sine)".into(),
            );
            None
        }
    });
    let delta0_sq = chi.and_then(|chi| {
        let v = (1.0 / psi2 - psi2) * (eps + chi).powi(2) - 4.0 * eps * chi / psi2 + d2 / psi2;
        if v >= 0.0 {
            Some(v)
        } else {
            na.insert("delta0_sq".into(), "δ₀² >= 0".into());
            None
        }
    });
    let correction_den = d1 * d2_gap.powi(dim as i32 - 2);
    let ell0 = delta0_sq.and_then(|d0| {
        let corr = if eta0 == 0.0 {
            0.0
        } else if correction_den > 0.0 {
            8.0 * eta0 / correction_den
        } else {
            na.insert("ell0".into(), "positive ℓ₀ denominators".into());
            return None;
        };
        let v = d0 / (4.0 * epsilon0) - corr;
        if v >= 0.0 {
            Some(v)
        } else {
            na.insert("ell0".into(), "ℓ₀ >= 0".into());
            None
        }
    });
    let canvas_bound_arbitrary = match ell0 {
        Some(l) if l > 0.0 => Some(root_min * (mu / 3.0).min(l / 2.0)),
        _ => {
            na.insert("canvas_bound_arbitrary".into(), "ℓ₀ > 0".into());
            None
        }
    };
    let ineq19_lhs = if psi2 == 1.0 {
        Some(0.0)
    } else if correction_den > 0.0 {
        Some(psi2 * (psi2 - 1.0) / correction_den)
    } else {
        na.insert("ineq19_lhs".into(), "positive ℓ₀ denominators".into());
        None
    };
    let rho_tilde = 2.0 * eps;

    Ok(BoundsReport {
        dim,
        xi,
        sep_vertices: d2 / (4.0 * eps),
        sep_foreign_faces: d2 / (8.0 * eps),
        face_thickness: d2 / (16.0 * eps),
        canvas_bound_euclidean: (mu / 16.0).min(d2 / (64.0 * eps)),
        canvas_bound_theorem5_loose: (mu / 3.0).min(d2 / (32.0 * eps)),
        canvas_bound_uniform: root_min * (mu / 3.0).min(d2 / (32.0 * eps)),
        voronoi_angle_lo,
        voronoi_angle_hi,
        dihedral_s0,
        dihedral_lo: dihedral_s0.asin(),
        dihedral_hi: PI - dihedral_s0.asin(),
        epsilon0,
        mu0,
        rho0,
        omega0,
        eta0,
        chi2,
        chi_s0,
        chi,
        delta0_sq,
        ell0,
        canvas_bound_arbitrary,
        approx_relax_omega: 2.0 * xi * rho_tilde * rho_tilde,
        straightening_bound: straightening_bound(eps, psi),
        embedding_psi0_threshold: 1.0 + iota.powi(4) / (32.0 * 64.0),
        ineq19_lhs,
        ineq19_rhs: lambda / 16.0,
        h_min_limit: d2 / (4.0 * eps),
        not_applicable: na,
    })
}

/// `ε·√(2·4³(ψ₀ − 1))`: distance between curved and straight barycentric points.
pub fn straightening_bound(epsilon: f64, psi0: f64) -> f64 {
    epsilon * (128.0 * (psi0 - 1.0).max(0.0)).sqrt()
}
