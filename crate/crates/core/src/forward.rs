//! Forward model: the semilinear diffusion problem
//!
//! ```text
//! -div(γ ∇u) + σ u + μ |u| u = 0   in Ω,     u = g   on ∂Ω,
//! ```
//!
//! and the internal datum `H = Γ (σ u + μ |u| u)`.
//!
//! The zeroth-order terms use group finite elements with vertex quadrature:
//! the nonlinearity is interpolated nodally and integrated against the
//! lumped mass. The Newton Jacobian is then `K + diag(m (σ + 2μ|u|))`, the
//! same operator that appears in the sensitivity and adjoint equations, and
//! on meshes without obtuse angles it is an M-matrix, so the discrete
//! comparison and maximum principles hold.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fem::{self, CgSettings, NodalField, SparseMatrix};
use crate::mesh::Mesh;

/// The coefficient quadruple (Γ, γ, σ, μ).
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    pub gruneisen: NodalField,
    pub diffusion: NodalField,
    pub single_photon: NodalField,
    pub two_photon: NodalField,
}

impl CoefficientSet {
    pub fn new(gruneisen: NodalField, diffusion: NodalField, single_photon: NodalField, two_photon: NodalField) -> Self {
        CoefficientSet {
            gruneisen,
            diffusion,
            single_photon,
            two_photon,
        }
    }

    pub fn constant(mesh: &Mesh, gruneisen: f64, diffusion: f64, single_photon: f64, two_photon: f64) -> Self {
        CoefficientSet {
            gruneisen: NodalField::constant(mesh, gruneisen),
            diffusion: NodalField::constant(mesh, diffusion),
            single_photon: NodalField::constant(mesh, single_photon),
            two_photon: NodalField::constant(mesh, two_photon),
        }
    }

    fn fields(&self) -> [(&'static str, &NodalField); 4] {
        [
            ("gruneisen", &self.gruneisen),
            ("diffusion", &self.diffusion),
            ("single_photon", &self.single_photon),
            ("two_photon", &self.two_photon),
        ]
    }

    /// Checks sizes and strict positivity; returns the tightest (θ, Θ)
    /// with θ ≤ Γ, γ, σ, μ ≤ Θ.
    pub fn validate(&self, mesh: &Mesh) -> Result<(f64, f64)> {
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for (name, field) in self.fields() {
            field.check_mesh(mesh, name)?;
            for (node, &value) in field.values().iter().enumerate() {
                if !(value > 0.0 && value.is_finite()) {
                    return Err(Error::CoefficientBounds {
                        field: name,
                        node,
                        value,
                    });
                }
                lo = lo.min(value);
                hi = hi.max(value);
            }
        }
        Ok((lo, hi))
    }
}

/// Values on the boundary nodes of a mesh, in increasing node order.
///
/// Used both for photon sources `g` and for boundary traces.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryField {
    nodes: Vec<usize>,
    values: Vec<f64>,
}

pub type BoundarySource = BoundaryField;

impl BoundaryField {
    pub fn from_fn(mesh: &Mesh, f: impl Fn([f64; 2]) -> f64) -> Self {
        let nodes = mesh.boundary_nodes().to_vec();
        let values = nodes.iter().map(|&i| f(mesh.nodes()[i])).collect();
        BoundaryField { nodes, values }
    }

    pub fn constant(mesh: &Mesh, value: f64) -> Self {
        Self::from_fn(mesh, |_| value)
    }

    /// Restriction of a nodal field to the boundary.
    pub fn trace(mesh: &Mesh, field: &NodalField) -> Result<Self> {
        field.check_mesh(mesh, "traced field")?;
        let nodes = mesh.boundary_nodes().to_vec();
        let values = nodes.iter().map(|&i| field[i]).collect();
        Ok(BoundaryField { nodes, values })
    }

    pub fn from_map(mesh: &Mesh, map: &BTreeMap<usize, f64>) -> Result<Self> {
        let field = BoundaryField {
            nodes: map.keys().copied().collect(),
            values: map.values().copied().collect(),
        };
        field.check_mesh(mesh)?;
        Ok(field)
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.nodes.iter().copied().zip(self.values.iter().copied())
    }

    pub fn get(&self, node: usize) -> Option<f64> {
        self.nodes.binary_search(&node).ok().map(|k| self.values[k])
    }

    pub fn to_map(&self) -> BTreeMap<usize, f64> {
        self.iter().collect()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// The field must be defined on exactly the boundary nodes of `mesh`.
    pub fn check_mesh(&self, mesh: &Mesh) -> Result<()> {
        if self.nodes != mesh.boundary_nodes() {
            if let Some(&bad) = self.nodes.iter().find(|&&i| i >= mesh.num_nodes() || !mesh.is_boundary(i)) {
                return Err(Error::NotBoundaryNode(bad));
            }
            return Err(Error::DimensionMismatch {
                what: "boundary field",
                expected: mesh.boundary_nodes().len(),
                found: self.nodes.len(),
            });
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("boundary field has non-finite values".into()));
        }
        Ok(())
    }

    /// Returns the smallest value if it is at least `epsilon > 0`.
    pub fn positivity_floor(&self, epsilon: f64) -> Option<f64> {
        let min = self.min();
        (epsilon > 0.0 && min >= epsilon).then_some(min)
    }

    pub(crate) fn dirichlet_slots(&self, num_nodes: usize) -> Vec<Option<f64>> {
        let mut fixed = vec![None; num_nodes];
        for (i, v) in self.iter() {
            fixed[i] = Some(v);
        }
        fixed
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("node,value\n");
        for (i, v) in self.iter() {
            s.push_str(&format!("{i},{v:?}\n"));
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonConfig {
    /// Absolute tolerance on the Euclidean norm of the interior residual.
    pub residual_tol: f64,
    pub max_iterations: usize,
    /// Backtracking factor applied to the step length on rejection.
    pub damping: f64,
    /// Relative tolerance of the inner linear solves.
    pub linear_tol: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig {
            residual_tol: 1e-10,
            max_iterations: 50,
            damping: 0.5,
            linear_tol: 1e-12,
        }
    }
}

impl NewtonConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.residual_tol > 0.0) {
            return Err(Error::InvalidArgument("residual_tol must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidArgument("max_iterations must be at least 1".into()));
        }
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(Error::InvalidArgument("damping must lie in (0, 1)".into()));
        }
        if !(self.linear_tol > 0.0) {
            return Err(Error::InvalidArgument("linear_tol must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolverReport {
    pub iterations: usize,
    /// Residual norm of the initial iterate followed by one entry per
    /// accepted step.
    pub residual_history: Vec<f64>,
    pub converged: bool,
}

/// Discretized semilinear operator for a fixed mesh and diffusion
/// coefficient. Holds the stiffness matrix and lumped mass so repeated
/// solves with different (σ, μ, g) skip reassembly.
#[derive(Debug, Clone)]
pub struct SemilinearOperator<'m> {
    mesh: &'m Mesh,
    stiffness: SparseMatrix,
    lumped: Vec<f64>,
}

impl<'m> SemilinearOperator<'m> {
    pub fn new(mesh: &'m Mesh, diffusion: &NodalField) -> Result<Self> {
        Ok(SemilinearOperator {
            mesh,
            stiffness: fem::assemble_stiffness(mesh, diffusion)?,
            lumped: fem::lumped_mass(mesh),
        })
    }

    pub fn mesh(&self) -> &'m Mesh {
        self.mesh
    }

    pub fn stiffness(&self) -> &SparseMatrix {
        &self.stiffness
    }

    pub fn lumped_mass(&self) -> &[f64] {
        &self.lumped
    }

    /// Interior residual `K u + m (σ u + μ |u| u)`; zero at boundary nodes.
    pub fn residual(&self, sigma: &NodalField, mu: &NodalField, u: &[f64]) -> Vec<f64> {
        let mut r = self.stiffness.mul_vec(u);
        for (i, ri) in r.iter_mut().enumerate() {
            if self.mesh.is_boundary(i) {
                *ri = 0.0;
            } else {
                *ri += self.lumped[i] * (sigma[i] * u[i] + mu[i] * u[i].abs() * u[i]);
            }
        }
        r
    }

    /// `K + diag(m w)` with `w = σ + 2μ|u|`.
    pub fn jacobian(&self, sigma: &NodalField, mu: &NodalField, u: &[f64]) -> SparseMatrix {
        let mut j = self.stiffness.clone();
        let diag: Vec<f64> = (0..u.len())
            .map(|i| self.lumped[i] * (sigma[i] + 2.0 * mu[i] * u[i].abs()))
            .collect();
        j.add_diagonal(&diag);
        j
    }

    /// Solves `(K + diag(m w)) x = rhs` on interior nodes with the given
    /// Dirichlet data; `rhs` entries at boundary nodes are ignored.
    pub fn solve_linear_problem(
        &self,
        weight: &[f64],
        rhs: &[f64],
        boundary: &[Option<f64>],
        tol: f64,
    ) -> Result<Vec<f64>> {
        let mut a = self.stiffness.clone();
        let diag: Vec<f64> = weight.iter().zip(&self.lumped).map(|(w, m)| w * m).collect();
        a.add_diagonal(&diag);
        let (a, b) = fem::eliminate(&a, rhs, boundary);
        let (mut x, _) = fem::solve_linear_with(&a, &b, None, CgSettings::for_dim(a.dim(), tol))?;
        pin(&mut x, boundary);
        Ok(x)
    }

    /// Solves the linearized problem `J(u) v = rhs` with `v = 0` on ∂Ω.
    pub fn solve_linearized(
        &self,
        sigma: &NodalField,
        mu: &NodalField,
        u: &NodalField,
        rhs: &[f64],
        tol: f64,
    ) -> Result<Vec<f64>> {
        let weight: Vec<f64> = (0..u.len()).map(|i| sigma[i] + 2.0 * mu[i] * u[i].abs()).collect();
        let zero = self.homogeneous_slots();
        self.solve_linear_problem(&weight, rhs, &zero, tol)
    }

    pub(crate) fn homogeneous_slots(&self) -> Vec<Option<f64>> {
        (0..self.mesh.num_nodes())
            .map(|i| self.mesh.is_boundary(i).then_some(0.0))
            .collect()
    }

    /// Damped Newton solve of the semilinear problem.
    pub fn solve(
        &self,
        sigma: &NodalField,
        mu: &NodalField,
        source: &BoundarySource,
        cfg: &NewtonConfig,
    ) -> Result<(NodalField, SolverReport)> {
        cfg.validate()?;
        let n = self.mesh.num_nodes();
        sigma.check_mesh(self.mesh, "single_photon")?;
        mu.check_mesh(self.mesh, "two_photon")?;
        source.check_mesh(self.mesh)?;
        let boundary = source.dirichlet_slots(n);

        // linear problem (μ = 0) as the initial iterate
        let mut u = self.solve_linear_problem(sigma.values(), &vec![0.0; n], &boundary, cfg.linear_tol)?;
        let mut residual = self.residual(sigma, mu, &u);
        let mut res_norm = fem::norm(&residual);
        let mut report = SolverReport {
            iterations: 0,
            residual_history: vec![res_norm],
            converged: false,
        };
        let zero = self.homogeneous_slots();

        while res_norm > cfg.residual_tol {
            if report.iterations >= cfg.max_iterations {
                return Err(Error::Newton {
                    reason: format!("residual {res_norm:e} above tolerance {:e}", cfg.residual_tol),
                    report: Box::new(report),
                });
            }
            let jac = self.jacobian(sigma, mu, &u);
            let rhs: Vec<f64> = residual.iter().map(|r| -r).collect();
            let (a, b) = fem::eliminate(&jac, &rhs, &zero);
            let (mut step, _) = fem::solve_linear_with(&a, &b, None, CgSettings::for_dim(n, cfg.linear_tol))
                .map_err(|e| Error::Newton {
                    reason: format!("linear solve failed: {e}"),
                    report: Box::new(report.clone()),
                })?;
            pin(&mut step, &zero);

            let mut alpha = 1.0;
            loop {
                let trial: Vec<f64> = u.iter().zip(&step).map(|(ui, si)| ui + alpha * si).collect();
                let trial_residual = self.residual(sigma, mu, &trial);
                let trial_norm = fem::norm(&trial_residual);
                if trial_norm <= (1.0 - 1e-4 * alpha) * res_norm || trial_norm <= cfg.residual_tol {
                    u = trial;
                    residual = trial_residual;
                    res_norm = trial_norm;
                    break;
                }
                alpha *= cfg.damping;
                if alpha < 1e-10 {
                    return Err(Error::Newton {
                        reason: format!("line search stalled at residual {res_norm:e}"),
                        report: Box::new(report),
                    });
                }
            }
            report.iterations += 1;
            report.residual_history.push(res_norm);
        }
        report.converged = true;
        Ok((NodalField::new(u), report))
    }
}

/// Overwrites constrained entries with their exact values; the iterative
/// solve only reproduces identity rows to within its tolerance.
fn pin(x: &mut [f64], fixed: &[Option<f64>]) {
    for (xi, f) in x.iter_mut().zip(fixed) {
        if let Some(v) = f {
            *xi = *v;
        }
    }
}

/// Solves `-div(γ∇u) + σu + μ|u|u = 0`, `u = g` on ∂Ω.
pub fn solve_semilinear(
    mesh: &Mesh,
    coeffs: &CoefficientSet,
    source: &BoundarySource,
    cfg: &NewtonConfig,
) -> Result<(NodalField, SolverReport)> {
    coeffs.validate(mesh)?;
    SemilinearOperator::new(mesh, &coeffs.diffusion)?.solve(&coeffs.single_photon, &coeffs.two_photon, source, cfg)
}

/// `H = Γ (σ u + μ |u| u)` nodewise.
pub fn compute_datum(coeffs: &CoefficientSet, u: &NodalField) -> Result<NodalField> {
    let n = u.len();
    for (name, f) in coeffs.fields() {
        Error::check_len(name, n, f.len())?;
    }
    Ok(NodalField::new(
        (0..n)
            .map(|i| {
                let ui = u[i];
                coeffs.gruneisen[i] * (coeffs.single_photon[i] * ui + coeffs.two_photon[i] * ui.abs() * ui)
            })
            .collect(),
    ))
}

/// Multiplies each value by `1 + √3 ε 10⁻² r` with `r ~ U[-1, 1]`, so the
/// multipliers have standard deviation `ε` percent.
pub fn add_noise(h: &NodalField, epsilon: f64, seed: u64) -> Result<NodalField> {
    add_noise_stream(h, epsilon, seed, 0)
}

/// [`add_noise`] drawing from an independent stream of the seeded generator.
pub fn add_noise_stream(h: &NodalField, epsilon: f64, seed: u64, stream: u64) -> Result<NodalField> {
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidArgument(format!("noise level must be non-negative, got {epsilon}")));
    }
    if epsilon == 0.0 {
        return Ok(h.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let amplitude = 3f64.sqrt() * epsilon * 1e-2;
    Ok(NodalField::new(
        h.values()
            .iter()
            .map(|&v| v * (1.0 + amplitude * rng.gen_range(-1.0..=1.0)))
            .collect(),
    ))
}
