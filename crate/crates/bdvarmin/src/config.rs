//! Experiment configuration (JSON) and its validation.

use std::path::PathBuf;

use bdvarmin_core::solver::Schedule;
use bdvarmin_core::{GridDomain, Integrand, VectorField};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("{path}: {message}")]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

fn err(path: &str, message: impl Into<String>) -> ConfigError {
    ConfigError { path: path.into(), message: message.into() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Diagnostic {
    /// Unstabilised minimiser.
    Solve,
    /// Viscosity sequence along the schedule, with its monitors.
    Sequence,
    /// Duality gaps of the solve and of every sequence member.
    Dual,
    /// Relaxed functional and boundary attainment of the final minimiser.
    Relax,
    Nogap,
    Uniqueness,
    Lbmo,
    Korn,
    /// Seminorms of the final minimiser.
    Spaces,
    Exponents,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    #[serde(default = "default_j_values")]
    pub j_values: Vec<u64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
}

fn default_j_values() -> Vec<u64> {
    (0..=8).map(|k| 1u64 << k).collect()
}
fn default_tol() -> f64 {
    1e-10
}
fn default_max_iters() -> usize {
    200
}

impl Default for ScheduleSpec {
    fn default() -> Self {
        ScheduleSpec { j_values: default_j_values(), tol: default_tol(), max_iters: default_max_iters() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_name")]
    pub name: String,
    /// Registry name, e.g. `phi_mu:1.2`, `area`, `quadratic`.
    pub integrand: String,
    /// `NXxNY` nodes; the spacing is `1/(NX-1)`.
    pub grid: String,
    /// Generator name (see [`U0_GENERATORS`]) or `file:<path>`.
    pub u0: String,
    #[serde(default)]
    pub schedule: ScheduleSpec,
    #[serde(default)]
    pub diagnostics: Vec<Diagnostic>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

fn default_name() -> String {
    "experiment".into()
}

pub const U0_GENERATORS: [&str; 6] = ["zero", "rigid", "stretch", "affine", "shear", "bend"];

pub fn parse_grid(spec: &str) -> Result<GridDomain, String> {
    let (a, b) = spec.split_once(['x', 'X']).ok_or("expected NXxNY")?;
    let nx: usize = a.trim().parse().map_err(|_| format!("bad node count `{a}`"))?;
    let ny: usize = b.trim().parse().map_err(|_| format!("bad node count `{b}`"))?;
    if nx < 3 || ny < 3 {
        return Err("need at least 3 nodes per side".into());
    }
    GridDomain::new(nx, ny, 1.0 / (nx - 1) as f64).map_err(|e| e.to_string())
}

/// Named boundary data. All are smooth on the closed rectangle.
pub fn generate_u0(name: &str, g: GridDomain) -> Option<VectorField> {
    let f: fn(f64, f64) -> [f64; 2] = match name {
        "zero" => |_, _| [0.0, 0.0],
        "rigid" => |x, y| [0.1 - 0.2 * y, 0.3 + 0.2 * x],
        "stretch" => |x, _| [0.1 * x, 0.0],
        "affine" => |x, y| [0.3 * x + 0.1 * y, 0.1 * x - 0.2 * y],
        "shear" => |x, y| [0.5 * (3.0 * x * y).sin(), x * x - 0.5 * y],
        "bend" => |x, y| [0.4 * x * y, -0.2 * x * x + 0.3 * (std::f64::consts::PI * y).sin()],
        _ => return None,
    };
    Some(VectorField::from_fn(g, f))
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| err("$", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let f = Integrand::from_name(&self.integrand).map_err(|e| err("integrand", e.to_string()))?;
        let g = parse_grid(&self.grid).map_err(|m| err("grid", m))?;
        match self.u0.strip_prefix("file:") {
            Some(p) => {
                if p.is_empty() {
                    return Err(err("u0", "empty file path"));
                }
            }
            None => {
                if generate_u0(&self.u0, g).is_none() {
                    return Err(err("u0", format!("unknown generator `{}` (known: {})", self.u0, U0_GENERATORS.join(", "))));
                }
            }
        }
        let s = &self.schedule;
        if s.j_values.is_empty() {
            return Err(err("schedule.j_values", "must not be empty"));
        }
        if s.j_values[0] == 0 {
            return Err(err("schedule.j_values[0]", "must be positive"));
        }
        if let Some(k) = s.j_values.windows(2).position(|w| w[0] >= w[1]) {
            return Err(err(&format!("schedule.j_values[{}]", k + 1), "must exceed the previous entry"));
        }
        if !(s.tol > 0.0 && s.tol.is_finite()) {
            return Err(err("schedule.tol", "must be positive"));
        }
        if s.max_iters == 0 {
            return Err(err("schedule.max_iters", "must be positive"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for (k, d) in self.diagnostics.iter().enumerate() {
            if !seen.insert(*d) {
                return Err(err(&format!("diagnostics[{k}]"), "duplicate entry"));
            }
            if *d == Diagnostic::Exponents && f.mu.is_none() {
                return Err(err(&format!("diagnostics[{k}]"), "exponents need an integrand with an ellipticity exponent"));
            }
        }
        Ok(())
    }

    pub fn integrand(&self) -> Integrand {
        Integrand::from_name(&self.integrand).expect("validated")
    }

    pub fn grid_domain(&self) -> GridDomain {
        parse_grid(&self.grid).expect("validated")
    }

    pub fn schedule(&self) -> Schedule {
        Schedule::new(self.schedule.j_values.clone(), self.schedule.tol, self.schedule.max_iters).expect("validated")
    }

    pub fn load_u0(&self) -> anyhow::Result<VectorField> {
        let g = self.grid_domain();
        match self.u0.strip_prefix("file:") {
            Some(p) => {
                let (u, _) = crate::io::read_vector_field(crate::io::open(p.as_ref())?)?;
                if !u.grid.same_shape(&g) {
                    anyhow::bail!("u0: file grid {}x{} differs from `{}`", u.grid.nx(), u.grid.ny(), self.grid);
                }
                Ok(u)
            }
            None => Ok(generate_u0(&self.u0, g).expect("validated")),
        }
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config serialises");
        format!("{:x}", Sha256::digest(text.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ExperimentConfig {
        ExperimentConfig::from_json(r#"{"integrand":"quadratic","grid":"8x8","u0":"affine"}"#).unwrap()
    }

    #[test]
    fn defaults_fill_in() {
        let c = base();
        assert_eq!(c.schedule.j_values.last(), Some(&256));
        assert!(c.diagnostics.is_empty());
        assert_eq!(c.grid_domain().nx(), 8);
    }

    #[test]
    fn errors_name_the_field() {
        let e = ExperimentConfig::from_json(r#"{"integrand":"phi_mu:0.5","grid":"8x8","u0":"affine"}"#).unwrap_err();
        assert_eq!(e.path, "integrand");
        let e = ExperimentConfig::from_json(r#"{"integrand":"area","grid":"8x8","u0":"nope"}"#).unwrap_err();
        assert_eq!(e.path, "u0");
        let e = ExperimentConfig::from_json(r#"{"integrand":"area","grid":"8by8","u0":"zero"}"#).unwrap_err();
        assert_eq!(e.path, "grid");
        let e = ExperimentConfig::from_json(r#"{"integrand":"area","grid":"8x8","u0":"zero","schedule":{"j_values":[1,4,2]}}"#)
            .unwrap_err();
        assert_eq!(e.path, "schedule.j_values[2]");
        let e = ExperimentConfig::from_json(r#"{"integrand":"quadratic","grid":"8x8","u0":"zero","diagnostics":["exponents"]}"#)
            .unwrap_err();
        assert_eq!(e.path, "diagnostics[0]");
    }

    #[test]
    fn hash_tracks_content() {
        let a = base();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.seed = 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
