//! Linearization of the datum map `(γ, σ, μ) ↦ H`.
//!
//! For a direction `(δγ, δσ, δμ)` the solution derivative `v` satisfies
//!
//! ```text
//! -div(γ∇v) + (σ + 2μ|u|) v = div(δγ∇u) - δσ u - δμ |u| u,   v = 0 on ∂Ω,
//! ```
//!
//! discretized exactly as the derivative of the discrete forward residual,
//! and the datum derivative is `δH = Γ (δσ u + δμ |u| u + (σ + 2μ|u|) v)`.

use crate::error::{Error, Result};
use crate::fem::{self, NodalField};
use crate::forward::{BoundaryField, BoundarySource, CoefficientSet, SemilinearOperator};
use crate::mesh::Mesh;

const SENSITIVITY_TOL: f64 = 1e-12;

/// Relative threshold on `||g₂| - |g₁||` below which boundary traces are
/// considered ill-conditioned.
pub const TRACE_GAP_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientPerturbation {
    pub d_gamma: NodalField,
    pub d_sigma: NodalField,
    pub d_mu: NodalField,
}

impl CoefficientPerturbation {
    pub fn zeros(mesh: &Mesh) -> Self {
        let z = NodalField::zeros(mesh.num_nodes());
        CoefficientPerturbation {
            d_gamma: z.clone(),
            d_sigma: z.clone(),
            d_mu: z,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        CoefficientPerturbation {
            d_gamma: self.d_gamma.scaled(factor),
            d_sigma: self.d_sigma.scaled(factor),
            d_mu: self.d_mu.scaled(factor),
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        CoefficientPerturbation {
            d_gamma: self.d_gamma.axpy(1.0, &other.d_gamma),
            d_sigma: self.d_sigma.axpy(1.0, &other.d_sigma),
            d_mu: self.d_mu.axpy(1.0, &other.d_mu),
        }
    }

    /// `coeffs + t * self`, leaving Γ untouched.
    pub fn apply(&self, coeffs: &CoefficientSet, t: f64) -> CoefficientSet {
        CoefficientSet {
            gruneisen: coeffs.gruneisen.clone(),
            diffusion: coeffs.diffusion.axpy(t, &self.d_gamma),
            single_photon: coeffs.single_photon.axpy(t, &self.d_sigma),
            two_photon: coeffs.two_photon.axpy(t, &self.d_mu),
        }
    }

    fn check_mesh(&self, mesh: &Mesh) -> Result<()> {
        self.d_gamma.check_mesh(mesh, "d_gamma")?;
        self.d_sigma.check_mesh(mesh, "d_sigma")?;
        self.d_mu.check_mesh(mesh, "d_mu")
    }
}

/// Solution derivative `v` in direction `pert` at the forward solution `u`.
pub fn solve_sensitivity(
    mesh: &Mesh,
    coeffs: &CoefficientSet,
    u: &NodalField,
    pert: &CoefficientPerturbation,
) -> Result<NodalField> {
    coeffs.validate(mesh)?;
    u.check_mesh(mesh, "forward solution")?;
    pert.check_mesh(mesh)?;
    let op = SemilinearOperator::new(mesh, &coeffs.diffusion)?;
    let d_stiffness = fem::assemble_stiffness(mesh, &pert.d_gamma)?;
    let ku = d_stiffness.mul_vec(u.values());
    let m = op.lumped_mass();
    let rhs: Vec<f64> = (0..u.len())
        .map(|i| -ku[i] - m[i] * (pert.d_sigma[i] * u[i] + pert.d_mu[i] * u[i].abs() * u[i]))
        .collect();
    op.solve_linearized(&coeffs.single_photon, &coeffs.two_photon, u, &rhs, SENSITIVITY_TOL)
        .map(NodalField::new)
}

/// `δH = Γ (δσ u + δμ |u| u + (σ + 2μ|u|) v)` nodewise.
pub fn datum_derivative(
    coeffs: &CoefficientSet,
    u: &NodalField,
    v: &NodalField,
    pert: &CoefficientPerturbation,
) -> Result<NodalField> {
    let n = u.len();
    for (what, len) in [
        ("sensitivity", v.len()),
        ("gruneisen", coeffs.gruneisen.len()),
        ("single_photon", coeffs.single_photon.len()),
        ("two_photon", coeffs.two_photon.len()),
        ("d_sigma", pert.d_sigma.len()),
        ("d_mu", pert.d_mu.len()),
    ] {
        Error::check_len(what, n, len)?;
    }
    Ok(NodalField::new(
        (0..n)
            .map(|i| {
                let (ui, au) = (u[i], u[i].abs());
                let reaction = coeffs.single_photon[i] + 2.0 * coeffs.two_photon[i] * au;
                coeffs.gruneisen[i] * (pert.d_sigma[i] * ui + pert.d_mu[i] * au * ui + reaction * v[i])
            })
            .collect(),
    ))
}

/// Recovers `(δσ, δμ)` on ∂Ω from two datum derivatives.
///
/// On the boundary `v = 0`, so `δH_j = Γ (g_j δσ + |g_j| g_j δμ)`; the 2×2
/// system is inverted explicitly at every boundary node.
pub fn boundary_traces(
    mesh: &Mesh,
    d_h1: &NodalField,
    d_h2: &NodalField,
    g1: &BoundarySource,
    g2: &BoundarySource,
    gruneisen: &NodalField,
) -> Result<(BoundaryField, BoundaryField)> {
    d_h1.check_mesh(mesh, "dH1")?;
    d_h2.check_mesh(mesh, "dH2")?;
    gruneisen.check_mesh(mesh, "gruneisen")?;
    g1.check_mesh(mesh)?;
    g2.check_mesh(mesh)?;
    for (index, g) in [(1, g1), (2, g2)] {
        if !(g.min() > 0.0) {
            return Err(Error::NonPositiveSource { index, min: g.min() });
        }
    }
    let mut d_sigma = Vec::with_capacity(g1.nodes().len());
    let mut d_mu = Vec::with_capacity(g1.nodes().len());
    for ((node, a), (_, b)) in g1.iter().zip(g2.iter()) {
        let gap = b.abs() - a.abs();
        if gap.abs() < TRACE_GAP_THRESHOLD * a.abs().max(b.abs()) {
            return Err(Error::IllConditionedTrace { node, gap });
        }
        let denom = gruneisen[node] * a * b * gap;
        d_sigma.push((d_h1[node] * b.abs() * b - d_h2[node] * a.abs() * a) / denom);
        d_mu.push((d_h2[node] * a - d_h1[node] * b) / denom);
    }
    let nodes = g1.nodes();
    let build = |values: Vec<f64>| {
        BoundaryField::from_map(mesh, &nodes.iter().copied().zip(values).collect())
    };
    Ok((build(d_sigma)?, build(d_mu)?))
}
