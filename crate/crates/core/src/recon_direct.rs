//! Direct reconstruction of the absorption coefficients.
//!
//! Each datum gives `u*_j` through one linear solve of
//! `-div(γ∇u) = -H_j/Γ` with `u = g_j` on ∂Ω. Then at every node
//! `σ + μ|u*_j| = H_j/(Γ u*_j)` for all sources, which is inverted either
//! for a single unknown or, with two or more sources, for (σ, μ) by
//! pointwise least squares.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fem::NodalField;
use crate::forward::{BoundarySource, SemilinearOperator};
use crate::mesh::Mesh;

const RECOVERY_TOL: f64 = 1e-12;

/// `u*` must exceed this fraction of `max |u*|` at every node.
pub const POSITIVITY_FLOOR: f64 = 1e-8;

/// Minimum relative spread of `{|u*_j|}` at a node for the pointwise
/// (σ, μ) system to count as well conditioned.
pub const SPREAD_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DatumMeta {
    pub noise_level: f64,
    pub seed: Option<u64>,
}

/// Internal data `H_j` paired with the boundary sources `g_j` that
/// generated them.
#[derive(Debug, Clone, PartialEq)]
pub struct DatumSet {
    sources: Vec<BoundarySource>,
    data: Vec<NodalField>,
    meta: Vec<DatumMeta>,
}

impl DatumSet {
    pub fn new(sources: Vec<BoundarySource>, data: Vec<NodalField>, meta: Vec<DatumMeta>) -> Result<Self> {
        if sources.is_empty() {
            return Err(Error::InvalidArgument("datum set needs at least one source".into()));
        }
        Error::check_len("datum list", sources.len(), data.len())?;
        Error::check_len("datum metadata", sources.len(), meta.len())?;
        Ok(DatumSet { sources, data, meta })
    }

    pub fn noiseless(sources: Vec<BoundarySource>, data: Vec<NodalField>) -> Result<Self> {
        let meta = vec![DatumMeta::default(); sources.len()];
        Self::new(sources, data, meta)
    }

    pub fn len(&self) -> usize {
        self.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }

    pub fn sources(&self) -> &[BoundarySource] {
        &self.sources
    }

    pub fn data(&self) -> &[NodalField] {
        &self.data
    }

    pub fn meta(&self) -> &[DatumMeta] {
        &self.meta
    }

    pub fn check_mesh(&self, mesh: &Mesh) -> Result<()> {
        for (g, h) in self.sources.iter().zip(&self.data) {
            g.check_mesh(mesh)?;
            h.check_mesh(mesh, "datum")?;
        }
        Ok(())
    }
}

/// Solves `-div(γ∇u) = -H/Γ`, `u = g` on ∂Ω, discretized consistently with
/// the forward operator.
pub fn recover_field(
    mesh: &Mesh,
    gruneisen: &NodalField,
    diffusion: &NodalField,
    h: &NodalField,
    source: &BoundarySource,
) -> Result<NodalField> {
    let op = SemilinearOperator::new(mesh, diffusion)?;
    recover_with(&op, gruneisen, h, source)
}

fn recover_with(
    op: &SemilinearOperator<'_>,
    gruneisen: &NodalField,
    h: &NodalField,
    source: &BoundarySource,
) -> Result<NodalField> {
    let mesh = op.mesh();
    gruneisen.check_mesh(mesh, "gruneisen")?;
    h.check_mesh(mesh, "datum")?;
    source.check_mesh(mesh)?;
    if let Some(i) = gruneisen.values().iter().position(|&v| !(v > 0.0)) {
        return Err(Error::CoefficientBounds {
            field: "gruneisen",
            node: i,
            value: gruneisen[i],
        });
    }
    let n = mesh.num_nodes();
    let m = op.lumped_mass();
    let rhs: Vec<f64> = (0..n).map(|i| -m[i] * h[i] / gruneisen[i]).collect();
    op.solve_linear_problem(&vec![0.0; n], &rhs, &source.dirichlet_slots(n), RECOVERY_TOL)
        .map(NodalField::new)
}

fn check_positive(u: &NodalField) -> Result<()> {
    let scale = u.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = POSITIVITY_FLOOR * scale;
    let nodes: Vec<usize> = (0..u.len()).filter(|&i| !(u[i] > floor)).collect();
    if nodes.is_empty() {
        Ok(())
    } else {
        Err(Error::BelowPositivityFloor { nodes, floor })
    }
}

fn check_lengths(h: &NodalField, gruneisen: &NodalField, u: &NodalField, known: &NodalField) -> Result<()> {
    Error::check_len("gruneisen", h.len(), gruneisen.len())?;
    Error::check_len("recovered field", h.len(), u.len())?;
    Error::check_len("known coefficient", h.len(), known.len())
}

/// `σ = H/(Γu) - μ|u|` with μ known.
pub fn recover_sigma(h: &NodalField, gruneisen: &NodalField, u: &NodalField, mu: &NodalField) -> Result<NodalField> {
    check_lengths(h, gruneisen, u, mu)?;
    check_positive(u)?;
    Ok(NodalField::new(
        (0..h.len())
            .map(|i| h[i] / (gruneisen[i] * u[i]) - mu[i] * u[i].abs())
            .collect(),
    ))
}

/// `μ = H/(Γu|u|) - σ/|u|` with σ known.
pub fn recover_mu(h: &NodalField, gruneisen: &NodalField, u: &NodalField, sigma: &NodalField) -> Result<NodalField> {
    check_lengths(h, gruneisen, u, sigma)?;
    check_positive(u)?;
    Ok(NodalField::new(
        (0..h.len())
            .map(|i| {
                let au = u[i].abs();
                h[i] / (gruneisen[i] * u[i] * au) - sigma[i] / au
            })
            .collect(),
    ))
}

/// Conditioning of the pointwise J×2 system at one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeCondition {
    /// 2-norm condition number of the matrix with rows `(1, |u*_j|)`.
    pub condition: f64,
    /// Set when the spread of `|u*_j|` fell below [`SPREAD_THRESHOLD`] and
    /// the value was filled from the nearest well-conditioned node.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairReconstruction {
    pub sigma: NodalField,
    pub mu: NodalField,
    /// `max(σ, 0)` companion field.
    pub sigma_clipped: NodalField,
    /// `max(μ, 0)` companion field.
    pub mu_clipped: NodalField,
    pub recovered: Vec<NodalField>,
    pub condition: Vec<NodeCondition>,
}

impl PairReconstruction {
    pub fn flagged_nodes(&self) -> Vec<usize> {
        (0..self.condition.len()).filter(|&i| self.condition[i].flagged).collect()
    }

    pub fn condition_csv(&self) -> String {
        let mut s = String::from("node,condition,flag\n");
        for (i, c) in self.condition.iter().enumerate() {
            s.push_str(&format!("{i},{:?},{}\n", c.condition, u8::from(c.flagged)));
        }
        s
    }
}

/// Solves the 2-parameter least-squares problem
/// `min Σ_j (σ + μ a_j - r_j)²` returning `(σ, μ, condition, well_posed)`.
pub fn pointwise_pair(a: &[f64], r: &[f64]) -> (f64, f64, f64, bool) {
    let j = a.len() as f64;
    let (a_max, a_min) = a.iter().fold((f64::NEG_INFINITY, f64::INFINITY), |(hi, lo), &v| (hi.max(v), lo.min(v)));
    let well_posed = a_max - a_min >= SPREAD_THRESHOLD * a_max.abs() && a_max > a_min;

    let a_mean = a.iter().sum::<f64>() / j;
    let r_mean = r.iter().sum::<f64>() / j;
    let var: f64 = a.iter().map(|v| (v - a_mean).powi(2)).sum();
    let cov: f64 = a.iter().zip(r).map(|(x, y)| (x - a_mean) * (y - r_mean)).sum();
    let (sigma, mu) = if var > 0.0 {
        let mu = cov / var;
        (r_mean - mu * a_mean, mu)
    } else {
        (f64::NAN, f64::NAN)
    };

    // eigenvalues of the 2×2 normal matrix [[J, Σa], [Σa, Σa²]]
    let s1: f64 = a.iter().sum();
    let s2: f64 = a.iter().map(|v| v * v).sum();
    let tr = j + s2;
    let det = j * s2 - s1 * s1;
    let disc = ((tr * tr / 4.0) - det).max(0.0).sqrt();
    let (l_max, l_min) = (tr / 2.0 + disc, tr / 2.0 - disc);
    // det is computed more accurately as J·var than via the trace formula
    let l_min = if var > 0.0 { (j * var / l_max).max(l_min) } else { 0.0 };
    let condition = if l_min > 0.0 { (l_max / l_min).sqrt() } else { f64::INFINITY };
    (sigma, mu, condition, well_posed)
}

/// Joint pointwise least-squares reconstruction of (σ, μ) from J ≥ 2 data.
pub fn recover_pair(
    mesh: &Mesh,
    gruneisen: &NodalField,
    diffusion: &NodalField,
    data: &DatumSet,
) -> Result<PairReconstruction> {
    if data.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "pair reconstruction needs at least 2 sources, got {}",
            data.len()
        )));
    }
    data.check_mesh(mesh)?;
    for (index, g) in data.sources().iter().enumerate() {
        if !(g.min() > 0.0) {
            return Err(Error::NonPositiveSource { index, min: g.min() });
        }
    }
    let op = SemilinearOperator::new(mesh, diffusion)?;
    let recovered = data
        .sources()
        .par_iter()
        .zip(data.data().par_iter())
        .map(|(g, h)| recover_with(&op, gruneisen, h, g))
        .collect::<Result<Vec<_>>>()?;
    for u in &recovered {
        check_positive(u)?;
    }

    let n = mesh.num_nodes();
    let solved: Vec<(f64, f64, f64, bool)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let a: Vec<f64> = recovered.iter().map(|u| u[i].abs()).collect();
            let r: Vec<f64> = recovered
                .iter()
                .zip(data.data())
                .map(|(u, h)| h[i] / (gruneisen[i] * u[i]))
                .collect();
            pointwise_pair(&a, &r)
        })
        .collect();

    let good: Vec<usize> = (0..n).filter(|&i| solved[i].3).collect();
    if good.is_empty() {
        return Err(Error::NoWellConditionedNode);
    }
    let mut sigma = Vec::with_capacity(n);
    let mut mu = Vec::with_capacity(n);
    let mut condition = Vec::with_capacity(n);
    for (i, &(s, m, cond, ok)) in solved.iter().enumerate() {
        if ok {
            sigma.push(s);
            mu.push(m);
        } else {
            let donor = nearest(mesh, i, &good);
            sigma.push(solved[donor].0);
            mu.push(solved[donor].1);
        }
        condition.push(NodeCondition {
            condition: cond,
            flagged: !ok,
        });
    }
    let sigma = NodalField::new(sigma);
    let mu = NodalField::new(mu);
    Ok(PairReconstruction {
        sigma_clipped: sigma.map(|v| v.max(0.0)),
        mu_clipped: mu.map(|v| v.max(0.0)),
        sigma,
        mu,
        recovered,
        condition,
    })
}

/// μ from J ≥ 1 data with σ known: pointwise least squares of
/// `μ|u*_j| = H_j/(Γu*_j) - σ` over the sources.
pub fn recover_mu_joint(
    mesh: &Mesh,
    gruneisen: &NodalField,
    diffusion: &NodalField,
    sigma: &NodalField,
    data: &DatumSet,
) -> Result<(NodalField, Vec<NodalField>)> {
    if data.is_empty() {
        return Err(Error::InvalidArgument("no data to reconstruct from".into()));
    }
    data.check_mesh(mesh)?;
    sigma.check_mesh(mesh, "single_photon")?;
    let op = SemilinearOperator::new(mesh, diffusion)?;
    let recovered = data
        .sources()
        .par_iter()
        .zip(data.data().par_iter())
        .map(|(g, h)| recover_with(&op, gruneisen, h, g))
        .collect::<Result<Vec<_>>>()?;
    for u in &recovered {
        check_positive(u)?;
    }
    let mu = (0..mesh.num_nodes())
        .map(|i| {
            let (mut num, mut den) = (0.0, 0.0);
            for (u, h) in recovered.iter().zip(data.data()) {
                let a = u[i].abs();
                num += a * (h[i] / (gruneisen[i] * u[i]) - sigma[i]);
                den += a * a;
            }
            num / den
        })
        .collect();
    Ok((NodalField::new(mu), recovered))
}

fn nearest(mesh: &Mesh, node: usize, candidates: &[usize]) -> usize {
    let p = mesh.nodes()[node];
    let dist = |k: usize| {
        let q = mesh.nodes()[k];
        (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)
    };
    // candidates are sorted, so ties resolve to the lowest index
    candidates
        .iter()
        .copied()
        .fold((usize::MAX, f64::INFINITY), |(best, bd), k| {
            let d = dist(k);
            if d < bd {
                (k, d)
            } else {
                (best, bd)
            }
        })
        .0
}
