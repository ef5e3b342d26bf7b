//! Experiment configuration: a TOML document with a mesh size, a phantom
//! (background plus inclusions for each of Γ, γ, σ, μ), boundary sources,
//! noise levels, seeds and solver settings.

use std::path::Path;

use serde::{Deserialize, Serialize};
use twophoton_core::{BoundaryField, CoefficientSet, LsqConfig, Mesh, NewtonConfig, NodalField, Unknowns};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    #[default]
    Direct,
    Lsq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Targets {
    /// Reconstruct μ with σ known.
    Mu,
    /// Reconstruct σ and μ jointly.
    #[default]
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Disk,
    Square,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inclusion {
    pub shape: Shape,
    pub center: [f64; 2],
    /// Disk radius, or half the side length of a square.
    pub radius: f64,
    /// Coefficient value inside the inclusion.
    pub value: f64,
    /// Width of the smooth transition band across the edge; 0 gives a
    /// sharp jump.
    #[serde(default)]
    pub edge: f64,
}

impl Inclusion {
    /// Signed distance to the edge, negative inside.
    fn distance(&self, p: [f64; 2]) -> f64 {
        let (dx, dy) = (p[0] - self.center[0], p[1] - self.center[1]);
        match self.shape {
            Shape::Disk => dx.hypot(dy) - self.radius,
            Shape::Square => dx.abs().max(dy.abs()) - self.radius,
        }
    }

    /// Indicator in [0, 1], blended with a smoothstep over `edge`.
    fn weight(&self, p: [f64; 2]) -> f64 {
        let d = self.distance(p);
        if self.edge <= 0.0 {
            return if d <= 0.0 { 1.0 } else { 0.0 };
        }
        let s = (0.5 - d / self.edge).clamp(0.0, 1.0);
        s * s * (3.0 - 2.0 * s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub background: f64,
    /// Relative amplitude of a smooth bump `1 + ripple·cos(πx/2)cos(πy/2)`
    /// modulating the background.
    #[serde(default)]
    pub ripple: f64,
    #[serde(default)]
    pub inclusions: Vec<Inclusion>,
}

impl FieldSpec {
    pub fn constant(value: f64) -> Self {
        FieldSpec {
            background: value,
            ripple: 0.0,
            inclusions: Vec::new(),
        }
    }

    /// Later inclusions are painted over earlier ones.
    pub fn eval(&self, p: [f64; 2]) -> f64 {
        let half_pi = std::f64::consts::FRAC_PI_2;
        let bump = (half_pi * p[0]).cos() * (half_pi * p[1]).cos();
        let mut v = self.background * (1.0 + self.ripple * bump);
        for inc in &self.inclusions {
            let w = inc.weight(p);
            v = (1.0 - w) * v + w * inc.value;
        }
        v
    }

    pub fn sample(&self, mesh: &Mesh) -> NodalField {
        NodalField::from_fn(mesh, |p| self.eval(p))
    }

    fn validate(&self, name: &str) -> CliResult<()> {
        let field = format!("phantom.{name}");
        positive(&format!("{field}.background"), self.background)?;
        if !(self.ripple.abs() < 1.0) {
            return Err(CliError::config(format!("{field}.ripple"), "must lie in (-1, 1)"));
        }
        for (k, inc) in self.inclusions.iter().enumerate() {
            let at = format!("{field}.inclusions[{k}]");
            positive(&format!("{at}.value"), inc.value)?;
            positive(&format!("{at}.radius"), inc.radius)?;
            if !(inc.edge >= 0.0) {
                return Err(CliError::config(format!("{at}.edge"), "must be non-negative"));
            }
            if !inc.center.iter().all(|c| c.is_finite()) {
                return Err(CliError::config(format!("{at}.center"), "must be finite"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Phantom {
    pub gruneisen: FieldSpec,
    pub diffusion: FieldSpec,
    pub sigma: FieldSpec,
    pub mu: FieldSpec,
}

impl Phantom {
    pub fn coefficients(&self, mesh: &Mesh) -> CoefficientSet {
        CoefficientSet::new(
            self.gruneisen.sample(mesh),
            self.diffusion.sample(mesh),
            self.sigma.sample(mesh),
            self.mu.sample(mesh),
        )
    }
}

impl Default for Phantom {
    /// Smooth diffusion background with one inclusion, and disk/square
    /// inclusions in both absorption coefficients.
    fn default() -> Self {
        let inc = |shape, center, radius, value| Inclusion {
            shape,
            center,
            radius,
            value,
            edge: 0.0,
        };
        Phantom {
            gruneisen: FieldSpec::constant(1.0),
            diffusion: FieldSpec {
                background: 0.1,
                ripple: 0.25,
                inclusions: vec![inc(Shape::Disk, [-0.5, 0.5], 0.3, 0.15)],
            },
            sigma: FieldSpec {
                background: 0.1,
                ripple: 0.0,
                inclusions: vec![
                    inc(Shape::Disk, [0.5, 0.5], 0.3, 0.2),
                    inc(Shape::Square, [-0.4, -0.4], 0.25, 0.15),
                ],
            },
            mu: FieldSpec {
                background: 0.02,
                ripple: 0.0,
                inclusions: vec![
                    inc(Shape::Disk, [0.0, -0.5], 0.3, 0.04),
                    inc(Shape::Square, [0.5, 0.3], 0.2, 0.03),
                ],
            },
        }
    }
}

/// Boundary illumination `g(x, y) = constant + gradient·(x, y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSpec {
    pub constant: f64,
    #[serde(default)]
    pub gradient: [f64; 2],
}

impl SourceSpec {
    pub fn eval(&self, p: [f64; 2]) -> f64 {
        self.constant + self.gradient[0] * p[0] + self.gradient[1] * p[1]
    }

    pub fn on(&self, mesh: &Mesh) -> BoundaryField {
        BoundaryField::from_fn(mesh, |p| self.eval(p))
    }

    /// Minimum over the square boundary, attained at a corner.
    pub fn min_on_boundary(&self) -> f64 {
        self.constant - self.gradient[0].abs() - self.gradient[1].abs()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewtonSettings {
    pub residual_tol: Option<f64>,
    pub max_iterations: Option<usize>,
    pub damping: Option<f64>,
}

impl NewtonSettings {
    pub fn resolve(&self) -> NewtonConfig {
        let d = NewtonConfig::default();
        NewtonConfig {
            residual_tol: self.residual_tol.unwrap_or(d.residual_tol),
            max_iterations: self.max_iterations.unwrap_or(d.max_iterations),
            damping: self.damping.unwrap_or(d.damping),
            ..d
        }
    }
}

/// Least-squares settings; unset entries fall back to library defaults,
/// and the initial guesses to the phantom backgrounds.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LsqSettings {
    pub kappa: Option<f64>,
    pub grad_tol: Option<f64>,
    pub max_iterations: Option<usize>,
    pub history_size: Option<usize>,
    pub bound_floor: Option<f64>,
    pub bound_ceiling: Option<f64>,
    pub init_sigma: Option<f64>,
    pub init_mu: Option<f64>,
}

impl LsqSettings {
    /// `kappa` is left at zero; callers resolve it against the data.
    pub fn resolve(&self, unknowns: Unknowns, newton: NewtonConfig) -> LsqConfig {
        let d = LsqConfig::default();
        LsqConfig {
            kappa: self.kappa.unwrap_or(0.0),
            grad_tol: self.grad_tol.unwrap_or(d.grad_tol),
            max_iterations: self.max_iterations.unwrap_or(d.max_iterations),
            history_size: self.history_size.unwrap_or(d.history_size),
            bound_floor: self.bound_floor.unwrap_or(d.bound_floor),
            bound_ceiling: self.bound_ceiling.unwrap_or(d.bound_ceiling),
            unknowns,
            newton,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Cells per side of the reconstruction mesh.
    pub mesh_n: usize,
    /// Cells per side of the mesh the data are generated on; when set and
    /// different from `mesh_n`, data are transferred between meshes.
    #[serde(default)]
    pub data_mesh_n: Option<usize>,
    /// Used by the single-reconstruction commands; experiments fix their own.
    #[serde(default)]
    pub algorithm: Algorithm,
    #[serde(default)]
    pub targets: Targets,
    pub noise_levels: Vec<f64>,
    pub seeds: Vec<u64>,
    pub sources: Vec<SourceSpec>,
    pub phantom: Phantom,
    #[serde(default)]
    pub newton: NewtonSettings,
    #[serde(default)]
    pub lsq: LsqSettings,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let src = |constant, gx, gy| SourceSpec {
            constant,
            gradient: [gx, gy],
        };
        ExperimentConfig {
            mesh_n: 32,
            data_mesh_n: None,
            algorithm: Algorithm::Direct,
            targets: Targets::Both,
            noise_levels: vec![0.0, 1.0, 2.0, 5.0],
            seeds: (1..=10).collect(),
            sources: vec![src(0.25, 0.0, 0.0), src(1.0, 0.25, 0.0), src(2.0, 0.0, 0.5), src(4.0, 0.0, 0.0)],
            phantom: Phantom::default(),
            newton: NewtonSettings::default(),
            lsq: LsqSettings::default(),
        }
    }
}

fn positive(field: &str, v: f64) -> CliResult<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::config(field, format!("must be positive and finite, got {v}")))
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> CliResult<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.mesh_n == 0 {
            return Err(CliError::config("mesh_n", "must be at least 1"));
        }
        if self.data_mesh_n == Some(0) {
            return Err(CliError::config("data_mesh_n", "must be at least 1"));
        }
        if self.sources.is_empty() {
            return Err(CliError::config("sources", "at least one source is required"));
        }
        if self.targets == Targets::Both && self.sources.len() < 2 {
            return Err(CliError::config(
                "sources",
                "joint (sigma, mu) reconstruction needs at least 2 sources",
            ));
        }
        for (k, s) in self.sources.iter().enumerate() {
            if !(s.constant.is_finite() && s.gradient.iter().all(|g| g.is_finite())) {
                return Err(CliError::config(format!("sources[{k}]"), "must be finite"));
            }
            if self.algorithm == Algorithm::Direct && !(s.min_on_boundary() > 0.0) {
                return Err(CliError::config(
                    format!("sources[{k}]"),
                    "the direct algorithm needs a strictly positive source on the whole boundary",
                ));
            }
        }
        if self.noise_levels.is_empty() {
            return Err(CliError::config("noise_levels", "must not be empty"));
        }
        if let Some(e) = self.noise_levels.iter().find(|e| !(**e >= 0.0 && e.is_finite())) {
            return Err(CliError::config("noise_levels", format!("must be non-negative, got {e}")));
        }
        if self.seeds.is_empty() {
            return Err(CliError::config("seeds", "must not be empty"));
        }
        self.phantom.gruneisen.validate("gruneisen")?;
        self.phantom.diffusion.validate("diffusion")?;
        self.phantom.sigma.validate("sigma")?;
        self.phantom.mu.validate("mu")?;
        if let Some(k) = self.lsq.kappa {
            if !(k >= 0.0) {
                return Err(CliError::config("lsq.kappa", "must be non-negative"));
            }
        }
        for (name, v) in [("lsq.init_sigma", self.lsq.init_sigma), ("lsq.init_mu", self.lsq.init_mu)] {
            if let Some(v) = v {
                positive(name, v)?;
            }
        }
        self.newton
            .resolve()
            .validate()
            .map_err(|e| CliError::config("newton", e.to_string()))?;
        self.lsq
            .resolve(Unknowns::Both, NewtonConfig::default())
            .validate()
            .map_err(|e| CliError::config("lsq", e.to_string()))?;
        Ok(())
    }

    pub fn data_mesh_n(&self) -> usize {
        self.data_mesh_n.unwrap_or(self.mesh_n)
    }

    pub fn crime_free(&self) -> bool {
        self.data_mesh_n() != self.mesh_n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips_through_toml() {
        let cfg = ExperimentConfig::default();
        cfg.validate().unwrap();
        let back = ExperimentConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn inclusions_paint_over_background() {
        let spec = FieldSpec {
            background: 1.0,
            ripple: 0.0,
            inclusions: vec![Inclusion {
                shape: Shape::Square,
                center: [0.0, 0.0],
                radius: 0.5,
                value: 3.0,
                edge: 0.0,
            }],
        };
        assert_eq!(spec.eval([0.4, -0.4]), 3.0);
        assert_eq!(spec.eval([0.6, 0.0]), 1.0);
    }

    #[test]
    fn smooth_edge_is_halfway_on_the_boundary() {
        let inc = Inclusion {
            shape: Shape::Disk,
            center: [0.0, 0.0],
            radius: 0.5,
            value: 2.0,
            edge: 0.2,
        };
        assert!((inc.weight([0.5, 0.0]) - 0.5).abs() < 1e-12);
        assert_eq!(inc.weight([0.0, 0.0]), 1.0);
        assert_eq!(inc.weight([0.7, 0.0]), 0.0);
    }

    #[test]
    fn ripple_vanishes_on_boundary() {
        let spec = FieldSpec {
            background: 2.0,
            ripple: 0.5,
            inclusions: vec![],
        };
        assert!((spec.eval([1.0, 0.3]) - 2.0).abs() < 1e-12);
        assert!((spec.eval([0.0, 0.0]) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn validation_names_the_field() {
        let mut cfg = ExperimentConfig::default();
        cfg.phantom.mu.inclusions[1].value = -1.0;
        let msg = cfg.validate().unwrap_err().to_string();
        assert!(msg.contains("phantom.mu.inclusions[1].value"), "{msg}");

        let mut cfg = ExperimentConfig::default();
        cfg.sources.truncate(1);
        assert!(cfg.validate().unwrap_err().to_string().contains("sources"));

        let mut cfg = ExperimentConfig::default();
        cfg.sources[0].gradient = [2.0, 0.0];
        assert!(cfg.validate().is_err());
        cfg.algorithm = Algorithm::Lsq;
        cfg.validate().unwrap();
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = ExperimentConfig::default().to_toml().replace("mesh_n = 32", "mesh_n = 32\nmesh_size = 3");
        assert!(matches!(ExperimentConfig::from_toml(&text), Err(CliError::Parse(_))));
    }
}
