//! Declarative TOML configuration: custom product manifolds with named cycles,
//! and named function families for image-rank sweeps.
//!
//! ```toml
//! [[manifold]]
//! name = "t2xs2"
//! coords = ["a", "b", "u0", "u1", "u2"]        # optional
//! factors = [{ torus = 2, period = "2*pi" }, { sphere = 2 }]
//!
//! [[manifold.cycle]]
//! name = "a=0"
//! torus = [0.0, "vary"]                        # "vary" or a pinned angle
//! spheres = ["vary"]                           # "vary" or a unit vector
//! sign = -1                                    # optional, default +1
//!
//! [[family]]
//! name = "z-modes"
//! manifold = "torus3"
//! functions = ["1", "sin(z)", "cos(z)", "sin(2*z)"]
//! ```

use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;

use contact_flux::manifolds::{CycleSpec, Factor, SphereSlot, TorusSlot};
use contact_flux::ManifoldSpec;

use crate::expr::parse_constant;

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub manifold: Vec<ManifoldConfig>,
    #[serde(default)]
    pub family: Vec<FamilyConfig>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldConfig {
    pub name: String,
    #[serde(default)]
    pub coords: Vec<String>,
    pub factors: Vec<FactorConfig>,
    #[serde(default)]
    pub cycle: Vec<CycleConfig>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorConfig {
    pub torus: Option<usize>,
    pub period: Option<Number>,
    pub sphere: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Float(f64),
    Int(i64),
    Expr(String),
}

impl Number {
    fn value(&self) -> Result<f64, String> {
        match self {
            Number::Float(x) => Ok(*x),
            Number::Int(i) => Ok(*i as f64),
            Number::Expr(s) => parse_constant(s).map_err(|e| format!("`{s}`: {e}")),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum SphereSlotConfig {
    Point(Vec<f64>),
    Word(String),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CycleConfig {
    pub name: String,
    /// `"vary"` or a pinned angle.
    pub torus: Vec<Number>,
    #[serde(default)]
    pub spheres: Vec<SphereSlotConfig>,
    pub sign: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    pub name: String,
    pub manifold: String,
    pub functions: Vec<String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn find_manifold(&self, name: &str) -> Option<&ManifoldConfig> {
        self.manifold.iter().find(|m| m.name == name)
    }

    pub fn find_family(&self, name: &str) -> Option<&FamilyConfig> {
        self.family.iter().find(|f| f.name == name)
    }
}

impl ManifoldConfig {
    pub fn build(&self) -> Result<(Arc<ManifoldSpec>, Vec<CycleSpec>), String> {
        let mut factors = Vec::new();
        for f in &self.factors {
            match (f.torus, f.sphere) {
                (Some(dim), None) => {
                    let period = f.period.as_ref().map(Number::value).transpose()?.unwrap_or(std::f64::consts::TAU);
                    factors.push(Factor::Torus { dim, period });
                }
                (None, Some(dim)) if f.period.is_none() => factors.push(Factor::Sphere { dim }),
                _ => return Err(format!("manifold `{}`: each factor is `{{ torus = k, period = P }}` or `{{ sphere = k }}`", self.name)),
            }
        }
        let m = Arc::new(ManifoldSpec::new(self.name.clone(), factors, self.coords.clone()).map_err(|e| e.to_string())?);
        let cycles = self.cycle.iter().map(|c| c.build(&m)).collect::<Result<Vec<_>, _>>()?;
        Ok((m, cycles))
    }
}

impl CycleConfig {
    fn build(&self, m: &ManifoldSpec) -> Result<CycleSpec, String> {
        let torus = self
            .torus
            .iter()
            .map(|n| match n {
                Number::Expr(s) if s == "vary" => Ok(TorusSlot::Vary),
                other => other.value().map(TorusSlot::Pinned),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let spheres = self
            .spheres
            .iter()
            .map(|s| match s {
                SphereSlotConfig::Word(w) if w == "vary" => Ok(SphereSlot::Vary),
                SphereSlotConfig::Word(w) => Err(format!("cycle `{}`: unknown sphere slot `{w}`", self.name)),
                SphereSlotConfig::Point(p) => Ok(SphereSlot::Pinned(p.clone())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let c = CycleSpec { name: self.name.clone(), torus, spheres, sign: self.sign.unwrap_or(1.0) };
        c.validate(m).map_err(|e| format!("cycle `{}`: {e}", self.name))?;
        Ok(c)
    }
}
