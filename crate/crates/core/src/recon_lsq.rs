//! Output least-squares reconstruction of (σ, μ).
//!
//! Minimizes
//!
//! ```text
//! Φ(σ, μ) = ½ Σ_j ∫ (Γσu_j + Γμ|u_j|u_j - H_j)² + κ/2 (∫|∇σ|² + ∫|∇μ|²)
//! ```
//!
//! with adjoint-state gradients and a projected limited-memory BFGS method.
//! The misfit integral uses vertex quadrature, matching the forward
//! discretization, so the adjoint gradient is the exact derivative of the
//! discrete objective. Gradients are returned as Riesz representers in the
//! lumped-mass inner product.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fem::{self, NodalField, SparseMatrix};
use crate::forward::{CoefficientSet, NewtonConfig, SemilinearOperator};
use crate::mesh::Mesh;
use crate::recon_direct::DatumSet;

const ADJOINT_TOL: f64 = 1e-12;

/// Which coefficients the optimizer updates; the others stay at their
/// initial values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unknowns {
    Both,
    SigmaOnly,
    MuOnly,
}

impl Unknowns {
    fn sigma(self) -> bool {
        matches!(self, Unknowns::Both | Unknowns::SigmaOnly)
    }

    fn mu(self) -> bool {
        matches!(self, Unknowns::Both | Unknowns::MuOnly)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LsqConfig {
    /// Weight of the gradient-norm regularization.
    pub kappa: f64,
    /// Stop once the projected gradient norm falls below this fraction of
    /// its initial value.
    pub grad_tol: f64,
    pub max_iterations: usize,
    /// Number of correction pairs kept by the limited-memory update.
    pub history_size: usize,
    pub bound_floor: f64,
    pub bound_ceiling: f64,
    pub unknowns: Unknowns,
    pub newton: NewtonConfig,
}

impl Default for LsqConfig {
    fn default() -> Self {
        LsqConfig {
            kappa: 0.0,
            grad_tol: 1e-8,
            max_iterations: 500,
            history_size: 10,
            bound_floor: 1e-3,
            bound_ceiling: 10.0,
            unknowns: Unknowns::Both,
            newton: NewtonConfig::default(),
        }
    }
}

impl LsqConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(msg.into()));
        if !(self.kappa >= 0.0) {
            return bad("kappa must be non-negative");
        }
        if !(self.grad_tol > 0.0) {
            return bad("grad_tol must be positive");
        }
        if !(self.bound_floor > 0.0) {
            return bad("bound_floor must be positive");
        }
        if !(self.bound_ceiling > self.bound_floor) {
            return bad("bound_ceiling must exceed bound_floor");
        }
        if self.history_size == 0 {
            return bad("history_size must be at least 1");
        }
        self.newton.validate()
    }

    /// `1e-8 · (max_j max |H_j|)²`.
    pub fn default_kappa(data: &DatumSet) -> f64 {
        let scale = data
            .data()
            .iter()
            .flat_map(|h| h.values().iter())
            .fold(0.0f64, |m, v| m.max(v.abs()));
        1e-8 * scale * scale
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveValue {
    pub value: f64,
    /// `½ ∫ z_j²` for each source.
    pub misfits: Vec<f64>,
    /// `R(σ, μ)`, before multiplication by κ.
    pub regularization: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub sigma: NodalField,
    pub mu: NodalField,
}

/// Forward states at one coefficient pair, reused by the gradient.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub objective: ObjectiveValue,
    pub states: Vec<NodalField>,
    pub residuals: Vec<NodalField>,
}

/// The least-squares problem for fixed (Γ, γ), data and κ.
pub struct LsqProblem<'a> {
    op: SemilinearOperator<'a>,
    gruneisen: &'a NodalField,
    data: &'a DatumSet,
    kappa: f64,
    newton: NewtonConfig,
    regularizer: SparseMatrix,
}

impl<'a> LsqProblem<'a> {
    pub fn new(
        mesh: &'a Mesh,
        gruneisen: &'a NodalField,
        diffusion: &NodalField,
        data: &'a DatumSet,
        kappa: f64,
        newton: NewtonConfig,
    ) -> Result<Self> {
        gruneisen.check_mesh(mesh, "gruneisen")?;
        data.check_mesh(mesh)?;
        if !(kappa >= 0.0) {
            return Err(Error::InvalidArgument("kappa must be non-negative".into()));
        }
        Ok(LsqProblem {
            op: SemilinearOperator::new(mesh, diffusion)?,
            gruneisen,
            data,
            kappa,
            newton,
            regularizer: fem::assemble_stiffness(mesh, &NodalField::constant(mesh, 1.0))?,
        })
    }

    pub fn mesh(&self) -> &'a Mesh {
        self.op.mesh()
    }

    pub fn lumped_mass(&self) -> &[f64] {
        self.op.lumped_mass()
    }

    fn check_trial(&self, sigma: &NodalField, mu: &NodalField) -> Result<()> {
        let mesh = self.mesh();
        sigma.check_mesh(mesh, "trial sigma")?;
        mu.check_mesh(mesh, "trial mu")?;
        for (field, f) in [("single_photon", sigma), ("two_photon", mu)] {
            if let Some(node) = f.values().iter().position(|&v| !(v > 0.0 && v.is_finite())) {
                return Err(Error::CoefficientBounds {
                    field,
                    node,
                    value: f[node],
                });
            }
        }
        Ok(())
    }

    /// Runs the J forward solves and evaluates Φ.
    pub fn evaluate(&self, sigma: &NodalField, mu: &NodalField) -> Result<Evaluation> {
        self.check_trial(sigma, mu)?;
        let states = self
            .data
            .sources()
            .par_iter()
            .enumerate()
            .map(|(index, g)| {
                self.op
                    .solve(sigma, mu, g, &self.newton)
                    .map(|(u, _)| u)
                    .map_err(|e| Error::Source {
                        index,
                        source: Box::new(e),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        let m = self.lumped_mass();
        let mut residuals = Vec::with_capacity(states.len());
        let mut misfits = Vec::with_capacity(states.len());
        for (u, h) in states.iter().zip(self.data.data()) {
            let z: Vec<f64> = (0..u.len())
                .map(|i| self.gruneisen[i] * (sigma[i] * u[i] + mu[i] * u[i].abs() * u[i]) - h[i])
                .collect();
            misfits.push(0.5 * z.iter().zip(m).map(|(zi, mi)| mi * zi * zi).sum::<f64>());
            residuals.push(NodalField::new(z));
        }
        let regularization = 0.5
            * (fem::dot(sigma.values(), &self.regularizer.mul_vec(sigma.values()))
                + fem::dot(mu.values(), &self.regularizer.mul_vec(mu.values())));
        let value = misfits.iter().sum::<f64>() + self.kappa * regularization;
        Ok(Evaluation {
            objective: ObjectiveValue {
                value,
                misfits,
                regularization,
            },
            states,
            residuals,
        })
    }

    pub fn objective(&self, sigma: &NodalField, mu: &NodalField) -> Result<ObjectiveValue> {
        self.evaluate(sigma, mu).map(|e| e.objective)
    }

    /// Adjoint solve `J(u) v = -m Γ (σ + 2μ|u|) z`, `v = 0` on ∂Ω.
    pub fn adjoint(&self, sigma: &NodalField, mu: &NodalField, u: &NodalField, z: &NodalField) -> Result<NodalField> {
        let m = self.lumped_mass();
        let rhs: Vec<f64> = (0..u.len())
            .map(|i| -m[i] * z[i] * self.gruneisen[i] * (sigma[i] + 2.0 * mu[i] * u[i].abs()))
            .collect();
        self.op
            .solve_linearized(sigma, mu, u, &rhs, ADJOINT_TOL)
            .map(NodalField::new)
    }

    /// Riesz representers of Φ'_σ and Φ'_μ at an evaluated point.
    pub fn gradient_at(&self, sigma: &NodalField, mu: &NodalField, eval: &Evaluation) -> Result<Gradient> {
        let n = sigma.len();
        let adjoints = eval
            .states
            .par_iter()
            .zip(eval.residuals.par_iter())
            .map(|(u, z)| self.adjoint(sigma, mu, u, z))
            .collect::<Result<Vec<_>>>()?;
        let mut g_sigma = vec![0.0; n];
        let mut g_mu = vec![0.0; n];
        for ((u, z), v) in eval.states.iter().zip(&eval.residuals).zip(&adjoints) {
            for i in 0..n {
                let w = z[i] * self.gruneisen[i] + v[i];
                g_sigma[i] += w * u[i];
                g_mu[i] += w * u[i].abs() * u[i];
            }
        }
        if self.kappa > 0.0 {
            let m = self.lumped_mass();
            let ks = self.regularizer.mul_vec(sigma.values());
            let km = self.regularizer.mul_vec(mu.values());
            for i in 0..n {
                g_sigma[i] += self.kappa * ks[i] / m[i];
                g_mu[i] += self.kappa * km[i] / m[i];
            }
        }
        Ok(Gradient {
            sigma: NodalField::new(g_sigma),
            mu: NodalField::new(g_mu),
        })
    }

    pub fn gradient(&self, sigma: &NodalField, mu: &NodalField) -> Result<(ObjectiveValue, Gradient)> {
        let eval = self.evaluate(sigma, mu)?;
        let grad = self.gradient_at(sigma, mu, &eval)?;
        Ok((eval.objective, grad))
    }

    /// `⟨a, b⟩` in the lumped-mass inner product.
    pub fn inner(&self, a: &NodalField, b: &NodalField) -> f64 {
        self.lumped_mass()
            .iter()
            .zip(a.values().iter().zip(b.values()))
            .map(|(m, (x, y))| m * x * y)
            .sum()
    }
}

/// Φ at (σ, μ) with fixed (Γ, γ).
pub fn objective(
    mesh: &Mesh,
    sigma: &NodalField,
    mu: &NodalField,
    fixed: (&NodalField, &NodalField),
    data: &DatumSet,
    kappa: f64,
) -> Result<ObjectiveValue> {
    LsqProblem::new(mesh, fixed.0, fixed.1, data, kappa, NewtonConfig::default())?.objective(sigma, mu)
}

/// Adjoint field for one source with residual `z = Γ(σu + μ|u|u) - H`.
pub fn solve_adjoint(mesh: &Mesh, coeffs: &CoefficientSet, u: &NodalField, z: &NodalField) -> Result<NodalField> {
    coeffs.validate(mesh)?;
    u.check_mesh(mesh, "forward solution")?;
    z.check_mesh(mesh, "residual")?;
    let op = SemilinearOperator::new(mesh, &coeffs.diffusion)?;
    let m = op.lumped_mass();
    let (sigma, mu, gamma) = (&coeffs.single_photon, &coeffs.two_photon, &coeffs.gruneisen);
    let rhs: Vec<f64> = (0..u.len())
        .map(|i| -m[i] * z[i] * gamma[i] * (sigma[i] + 2.0 * mu[i] * u[i].abs()))
        .collect();
    op.solve_linearized(sigma, mu, u, &rhs, ADJOINT_TOL).map(NodalField::new)
}

/// Gradient of Φ at (σ, μ) with fixed (Γ, γ).
pub fn gradient(
    mesh: &Mesh,
    sigma: &NodalField,
    mu: &NodalField,
    fixed: (&NodalField, &NodalField),
    data: &DatumSet,
    kappa: f64,
) -> Result<Gradient> {
    LsqProblem::new(mesh, fixed.0, fixed.1, data, kappa, NewtonConfig::default())?
        .gradient(sigma, mu)
        .map(|(_, g)| g)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LsqReport {
    pub iterations: usize,
    /// Objective at the initial point and after every accepted step.
    pub objective_history: Vec<f64>,
    /// Projected gradient norm at the same points.
    pub grad_norm_history: Vec<f64>,
    /// Accepted step lengths; the entry for the initial point is 0.
    pub step_lengths: Vec<f64>,
    pub evaluations: usize,
    pub converged: bool,
    pub message: String,
}

impl LsqReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("iteration,objective,grad_norm,step_length\n");
        for k in 0..self.objective_history.len() {
            writeln!(
                s,
                "{k},{:?},{:?},{:?}",
                self.objective_history[k], self.grad_norm_history[k], self.step_lengths[k]
            )
            .unwrap();
        }
        s
    }
}

#[derive(Debug, Clone)]
pub struct LsqResult {
    pub sigma: NodalField,
    pub mu: NodalField,
    pub report: LsqReport,
}

/// Optimization vector: the active coefficients stacked.
struct Layout {
    n: usize,
    unknowns: Unknowns,
}

impl Layout {
    fn pack(&self, sigma: &NodalField, mu: &NodalField) -> Vec<f64> {
        let mut x = Vec::with_capacity(2 * self.n);
        if self.unknowns.sigma() {
            x.extend_from_slice(sigma.values());
        }
        if self.unknowns.mu() {
            x.extend_from_slice(mu.values());
        }
        x
    }

    fn unpack(&self, x: &[f64], sigma: &NodalField, mu: &NodalField) -> (NodalField, NodalField) {
        let mut offset = 0;
        let s = if self.unknowns.sigma() {
            offset = self.n;
            NodalField::new(x[..self.n].to_vec())
        } else {
            sigma.clone()
        };
        let m = if self.unknowns.mu() {
            NodalField::new(x[offset..offset + self.n].to_vec())
        } else {
            mu.clone()
        };
        (s, m)
    }

    fn pack_gradient(&self, g: &Gradient) -> Vec<f64> {
        self.pack(&g.sigma, &g.mu)
    }
}

/// Projected limited-memory BFGS in the lumped-mass inner product with
/// Armijo backtracking along the projection arc.
pub fn run_lsq(
    mesh: &Mesh,
    fixed: (&NodalField, &NodalField),
    data: &DatumSet,
    init: (&NodalField, &NodalField),
    cfg: &LsqConfig,
) -> Result<LsqResult> {
    cfg.validate()?;
    let problem = LsqProblem::new(mesh, fixed.0, fixed.1, data, cfg.kappa, cfg.newton)?;
    run_lsq_on(&problem, init, cfg)
}

pub fn run_lsq_on(problem: &LsqProblem<'_>, init: (&NodalField, &NodalField), cfg: &LsqConfig) -> Result<LsqResult> {
    cfg.validate()?;
    let mesh = problem.mesh();
    init.0.check_mesh(mesh, "initial sigma")?;
    init.1.check_mesh(mesh, "initial mu")?;
    let (lo, hi) = (cfg.bound_floor, cfg.bound_ceiling);
    let layout = Layout {
        n: mesh.num_nodes(),
        unknowns: cfg.unknowns,
    };
    let weights: Vec<f64> = match cfg.unknowns {
        Unknowns::Both => [problem.lumped_mass(), problem.lumped_mass()].concat(),
        _ => problem.lumped_mass().to_vec(),
    };
    let inner = |a: &[f64], b: &[f64]| -> f64 { weights.iter().zip(a.iter().zip(b)).map(|(w, (x, y))| w * x * y).sum() };
    let project = |x: &mut [f64]| x.iter_mut().for_each(|v| *v = v.clamp(lo, hi));
    let projected_gradient = |x: &[f64], g: &[f64]| -> Vec<f64> {
        x.iter()
            .zip(g)
            .map(|(&xi, &gi)| if (xi <= lo && gi > 0.0) || (xi >= hi && gi < 0.0) { 0.0 } else { gi })
            .collect()
    };

    let (sigma_fixed, mu_fixed) = (init.0.clone(), init.1.clone());
    let mut x = layout.pack(init.0, init.1);
    project(&mut x);
    let (s0, m0) = layout.unpack(&x, &sigma_fixed, &mu_fixed);
    let mut eval = problem.evaluate(&s0, &m0)?;
    let mut grad = layout.pack_gradient(&problem.gradient_at(&s0, &m0, &eval)?);
    let mut f = eval.objective.value;
    let data_energy: f64 = problem
        .data
        .data()
        .iter()
        .map(|h| 0.5 * problem.inner(h, h))
        .sum();

    let mut pg = projected_gradient(&x, &grad);
    let g0 = inner(&pg, &pg).sqrt();
    let mut report = LsqReport {
        objective_history: vec![f],
        grad_norm_history: vec![g0],
        step_lengths: vec![0.0],
        evaluations: 1,
        ..Default::default()
    };
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();

    loop {
        let g_norm = inner(&pg, &pg).sqrt();
        if g_norm <= cfg.grad_tol * g0 || g_norm == 0.0 || f <= 1e-20 * data_energy {
            report.converged = true;
            report.message = "projected gradient below tolerance".into();
            break;
        }
        if report.iterations >= cfg.max_iterations {
            report.message = "iteration limit reached".into();
            break;
        }

        // free variables: not pinned at a bound by the gradient
        let free: Vec<bool> = pg.iter().map(|&v| v != 0.0).collect();
        let masked = |v: &[f64]| -> Vec<f64> { v.iter().zip(&free).map(|(&a, &f)| if f { a } else { 0.0 }).collect() };

        let mut q = masked(&grad);
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let a = rho * inner(&masked(s), &q);
            let y = masked(y);
            q.iter_mut().zip(&y).for_each(|(qi, yi)| *qi -= a * yi);
            alphas.push(a);
        }
        if let Some((s, y, _)) = history.back() {
            let (s, y) = (masked(s), masked(y));
            let yy = inner(&y, &y);
            if yy > 0.0 {
                let scale = inner(&s, &y) / yy;
                q.iter_mut().for_each(|v| *v *= scale);
            }
        }
        for ((s, y, rho), a) in history.iter().zip(alphas.iter().rev()) {
            let b = rho * inner(&masked(y), &q);
            let s = masked(s);
            q.iter_mut().zip(&s).for_each(|(qi, si)| *qi += (a - b) * si);
        }
        let mut dir: Vec<f64> = masked(&q).iter().map(|v| -v).collect();
        if inner(&dir, &grad) >= 0.0 {
            history.clear();
            dir = masked(&grad).iter().map(|v| -v).collect();
        }

        let mut alpha = if history.is_empty() {
            let d_max = dir.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let x_max = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            (0.1 * x_max / d_max).min(1.0)
        } else {
            1.0
        };

        let mut accepted = None;
        for _ in 0..40 {
            let mut trial: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + alpha * di).collect();
            project(&mut trial);
            let step: Vec<f64> = trial.iter().zip(&x).map(|(a, b)| a - b).collect();
            let slope = inner(&grad, &step);
            if slope < 0.0 {
                let (ts, tm) = layout.unpack(&trial, &sigma_fixed, &mu_fixed);
                report.evaluations += 1;
                if let Ok(e) = problem.evaluate(&ts, &tm) {
                    let ft = e.objective.value;
                    if ft < f && ft <= f + 1e-4 * slope {
                        accepted = Some((trial, step, e, ts, tm));
                        break;
                    }
                }
            }
            alpha *= 0.5;
        }
        let Some((x_new, step, e_new, ts, tm)) = accepted else {
            report.message = "line search failed".into();
            break;
        };

        let g_new = layout.pack_gradient(&problem.gradient_at(&ts, &tm, &e_new)?);
        let y: Vec<f64> = g_new.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy = inner(&step, &y);
        if sy > 1e-12 * inner(&step, &step).sqrt() * inner(&y, &y).sqrt() {
            if history.len() == cfg.history_size {
                history.pop_front();
            }
            history.push_back((step, y, 1.0 / sy));
        }
        x = x_new;
        grad = g_new;
        eval = e_new;
        f = eval.objective.value;
        pg = projected_gradient(&x, &grad);
        report.iterations += 1;
        report.objective_history.push(f);
        report.grad_norm_history.push(inner(&pg, &pg).sqrt());
        report.step_lengths.push(alpha);
    }

    let (sigma, mu) = layout.unpack(&x, &sigma_fixed, &mu_fixed);
    Ok(LsqResult { sigma, mu, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::{compute_datum, solve_semilinear, BoundaryField};

    fn synthetic(n: usize) -> (Mesh, CoefficientSet, DatumSet) {
        let mesh = Mesh::square(n).unwrap();
        let coeffs = CoefficientSet::new(
            NodalField::constant(&mesh, 1.0),
            NodalField::constant(&mesh, 0.1),
            NodalField::from_fn(&mesh, |p| 0.2 + 0.05 * p[0]),
            NodalField::from_fn(&mesh, |p| 0.3 + 0.1 * p[1]),
        );
        let sources = vec![
            BoundaryField::constant(&mesh, 2.0),
            BoundaryField::from_fn(&mesh, |p| 1.0 + 0.5 * p[0]),
        ];
        let data = sources
            .iter()
            .map(|g| {
                let (u, _) = solve_semilinear(&mesh, &coeffs, g, &NewtonConfig::default()).unwrap();
                compute_datum(&coeffs, &u).unwrap()
            })
            .collect();
        (mesh, coeffs.clone(), DatumSet::noiseless(sources, data).unwrap())
    }

    #[test]
    fn zero_residual_at_truth() {
        let (mesh, c, data) = synthetic(6);
        let obj = objective(&mesh, &c.single_photon, &c.two_photon, (&c.gruneisen, &c.diffusion), &data, 0.0).unwrap();
        let scale: f64 = data.data().iter().map(|h| h.max().powi(2)).sum();
        assert!(obj.value <= 1e-16 * scale, "{}", obj.value);
    }

    #[test]
    fn regularization_vanishes_for_constants_and_is_affine_in_kappa() {
        let (mesh, c, data) = synthetic(4);
        let fixed = (&c.gruneisen, &c.diffusion);
        let s = NodalField::constant(&mesh, 0.25);
        let m = NodalField::constant(&mesh, 0.35);
        let obj = objective(&mesh, &s, &m, fixed, &data, 3.0).unwrap();
        assert!(obj.regularization.abs() < 1e-14);

        let obj1 = objective(&mesh, &c.single_photon, &c.two_photon, fixed, &data, 1.0).unwrap();
        let obj2 = objective(&mesh, &c.single_photon, &c.two_photon, fixed, &data, 2.0).unwrap();
        assert!(((obj2.value - obj1.value) - obj1.regularization).abs() < 1e-14);
    }

    #[test]
    fn adjoint_of_zero_residual_is_zero_and_linear() {
        let (mesh, c, data) = synthetic(5);
        let (u, _) = solve_semilinear(&mesh, &c, &data.sources()[0], &NewtonConfig::default()).unwrap();
        let zero = solve_adjoint(&mesh, &c, &u, &NodalField::zeros(mesh.num_nodes())).unwrap();
        assert!(zero.values().iter().all(|&v| v == 0.0));
        let z = NodalField::from_fn(&mesh, |p| p[0] - 0.3 * p[1]);
        let v1 = solve_adjoint(&mesh, &c, &u, &z).unwrap();
        let v2 = solve_adjoint(&mesh, &c, &u, &z.scaled(2.0)).unwrap();
        for i in 0..mesh.num_nodes() {
            assert!((v2[i] - 2.0 * v1[i]).abs() <= 1e-10 * v1[i].abs().max(1e-12));
        }
    }

    #[test]
    fn stationary_at_truth() {
        let (mesh, c, data) = synthetic(6);
        let cfg = LsqConfig::default();
        let res = run_lsq(
            &mesh,
            (&c.gruneisen, &c.diffusion),
            &data,
            (&c.single_photon, &c.two_photon),
            &cfg,
        )
        .unwrap();
        assert!(res.report.iterations <= 1);
        assert!(res.report.converged);
        for i in 0..mesh.num_nodes() {
            assert!((res.sigma[i] - c.single_photon[i]).abs() < 1e-8);
            assert!((res.mu[i] - c.two_photon[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn config_validation() {
        let cfg = LsqConfig {
            bound_floor: 0.0,
            ..LsqConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = LsqConfig {
            grad_tol: 0.0,
            ..LsqConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
