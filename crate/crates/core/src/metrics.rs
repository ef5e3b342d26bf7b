//! Reconstruction error and checks of the discrete maximum, positivity and
//! comparison principles.

use std::fmt;

use crate::error::{Error, Result};
use crate::fem::{self, NodalField};
use crate::forward::BoundarySource;
use crate::mesh::Mesh;

/// Tolerance on `max u - max g` for the discrete maximum principle.
pub const MAX_PRINCIPLE_TOL: f64 = 1e-8;

/// `100 ‖r - t‖ / ‖t‖` in the L² norm of P1 fields (consistent mass).
pub fn relative_l2_error(reconstructed: &NodalField, truth: &NodalField, mesh: &Mesh) -> Result<f64> {
    reconstructed.check_mesh(mesh, "reconstructed field")?;
    truth.check_mesh(mesh, "true field")?;
    let mass = fem::assemble_weighted_mass(mesh, &NodalField::constant(mesh, 1.0))?;
    let diff: Vec<f64> = reconstructed.values().iter().zip(truth.values()).map(|(r, t)| r - t).collect();
    let num = fem::dot(&diff, &mass.mul_vec(&diff)).max(0.0).sqrt();
    let den = fem::dot(truth.values(), &mass.mul_vec(truth.values())).max(0.0).sqrt();
    if den == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(100.0 * num / den)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxPrincipleReport {
    pub pass: bool,
    pub max_interior: f64,
    pub max_boundary: f64,
    /// Interior node attaining the maximum when the check fails.
    pub offending_node: Option<usize>,
}

impl fmt::Display for MaxPrincipleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "maximum principle: {} (max interior {:e}, max boundary {:e}",
            if self.pass { "pass" } else { "FAIL" },
            self.max_interior,
            self.max_boundary
        )?;
        if let Some(node) = self.offending_node {
            write!(f, ", offending node {node}")?;
        }
        write!(f, ")")
    }
}

impl MaxPrincipleReport {
    pub const CSV_HEADER: &'static str = "check,pass,max_interior,max_boundary,node";

    pub fn csv_row(&self) -> String {
        format!(
            "max_principle,{},{:?},{:?},{}",
            self.pass,
            self.max_interior,
            self.max_boundary,
            self.offending_node.map_or(String::new(), |n| n.to_string())
        )
    }
}

/// Passes iff `max_interior u ≤ max_∂Ω g + 1e-8`.
pub fn check_max_principle(mesh: &Mesh, u: &NodalField, g: &BoundarySource) -> Result<MaxPrincipleReport> {
    u.check_mesh(mesh, "solution")?;
    g.check_mesh(mesh)?;
    let max_boundary = g.max();
    let (offending, max_interior) = mesh
        .interior_nodes()
        .map(|i| (i, u[i]))
        .fold((None, f64::NEG_INFINITY), |(bi, bv), (i, v)| if v > bv { (Some(i), v) } else { (bi, bv) });
    let pass = !(max_interior > max_boundary + MAX_PRINCIPLE_TOL);
    Ok(MaxPrincipleReport {
        pass,
        max_interior,
        max_boundary,
        offending_node: if pass { None } else { offending },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositivityReport {
    /// False when the source does not satisfy `min g ≥ ε > 0`.
    pub applicable: bool,
    pub pass: bool,
    pub min_value: f64,
    pub min_node: usize,
}

impl fmt::Display for PositivityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.applicable {
            return write!(f, "positivity: not applicable (source below threshold)");
        }
        write!(
            f,
            "positivity: {} (min {:e} at node {})",
            if self.pass { "pass" } else { "FAIL" },
            self.min_value,
            self.min_node
        )
    }
}

impl PositivityReport {
    pub const CSV_HEADER: &'static str = "check,applicable,pass,min_value,node";

    pub fn csv_row(&self) -> String {
        format!(
            "positivity,{},{},{:?},{}",
            self.applicable, self.pass, self.min_value, self.min_node
        )
    }
}

/// Passes iff `min u > 0` whenever `min g ≥ epsilon > 0`.
pub fn check_positivity(mesh: &Mesh, u: &NodalField, g: &BoundarySource, epsilon: f64) -> Result<PositivityReport> {
    u.check_mesh(mesh, "solution")?;
    g.check_mesh(mesh)?;
    let (min_node, min_value) = u
        .values()
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, v)| if v < bv { (i, v) } else { (bi, bv) });
    let applicable = g.positivity_floor(epsilon).is_some();
    Ok(PositivityReport {
        applicable,
        pass: applicable && min_value > 0.0,
        min_value,
        min_node,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub pass: bool,
    /// Smallest interior value of `u₁ - u₂`.
    pub min_gap: f64,
    pub min_node: Option<usize>,
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "comparison: {} (min interior gap {:e}",
            if self.pass { "pass" } else { "FAIL" },
            self.min_gap
        )?;
        if let Some(node) = self.min_node {
            write!(f, " at node {node}")?;
        }
        write!(f, ")")
    }
}

/// Passes iff `u₁ > u₂` at every interior node.
pub fn check_comparison(mesh: &Mesh, u1: &NodalField, u2: &NodalField) -> Result<ComparisonReport> {
    u1.check_mesh(mesh, "upper solution")?;
    u2.check_mesh(mesh, "lower solution")?;
    let (min_node, min_gap) = mesh
        .interior_nodes()
        .map(|i| (i, u1[i] - u2[i]))
        .fold((None, f64::INFINITY), |(bi, bv), (i, v)| if v < bv { (Some(i), v) } else { (bi, bv) });
    Ok(ComparisonReport {
        pass: min_node.is_none() || min_gap > 0.0,
        min_gap,
        min_node,
    })
}

/// Central difference `(F(x + tδ) - F(x - tδ)) / 2t`.
pub fn fd_directional_derivative<F>(functional: F, point: &[f64], direction: &[f64], step: f64) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    let shifted = |t: f64| -> Vec<f64> { point.iter().zip(direction).map(|(x, d)| x + t * d).collect() };
    (functional(&shifted(step)) - functional(&shifted(-step))) / (2.0 * step)
}
