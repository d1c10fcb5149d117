//! Scenario files: a single JSON document that pins every input of a run.
//!
//! Unknown keys are rejected, all module preconditions are checked before
//! any computation, and the canonical serialization (hashed into every
//! output) makes runs reproducible byte for byte.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use thinlayer::em::{torus_vector_potential, FieldConfig};
use thinlayer::geometry::{builtin_chart, BuiltinSurface, ChartPoint, SurfaceChart};
use thinlayer::geometry::{curvature, fundamental_forms};
use thinlayer::potentials::PhysicalScale;
use thinlayer::solver::GridSpec;

use crate::CliError;

/// Surface shape and parameters, lengths in nm.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceSpec {
    #[serde(rename = "torus")]
    Torus {
        minor_radius: f64,
        major_radius: f64,
    },
    #[serde(rename = "sphere")]
    Sphere { radius: f64 },
    #[serde(rename = "cylinder")]
    Cylinder { radius: f64, length: f64 },
    #[serde(rename = "plane")]
    Plane { l1: f64, l2: f64 },
    /// Doubly periodic flat box; the solver's free-particle debug surface.
    #[serde(rename = "flat_box")]
    FlatBox { l1: f64, l2: f64 },
}

/// Uniform-field parameters of the torus gauge (internal units).
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    #[serde(default)]
    pub b0: f64,
    #[serde(default)]
    pub b1: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n1: usize,
    pub n2: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n1: 64, n2: 64 }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum UnitSystem {
    /// hbar = 1, 2m = 1, e = 1; lengths in nm.
    Internal,
    /// Energies in V0 = hbar^2/(8 m a^2) of the scenario's radius scale.
    V0,
}

/// One reproducible run: surface, field, layer thickness, grid and units.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub surface: SurfaceSpec,
    #[serde(default)]
    pub field: FieldSpec,
    /// Layer offset q3 in nm (a configuration constant, not a coordinate).
    #[serde(default)]
    pub thickness: f64,
    #[serde(default)]
    pub grid: GridConfig,
    /// Unit system for energy-valued outputs; per-command default if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<UnitSystem>,
}

/// Scenario with its preconditions checked and heavy objects built.
pub struct Prepared {
    pub scenario: Scenario,
    pub chart: SurfaceChart,
    pub field: FieldConfig,
    pub scale: PhysicalScale,
    pub grid: GridSpec,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| {
            CliError::Validation(format!(
                "scenario parse error at line {}, column {}: {e}",
                e.line(),
                e.column()
            ))
        })
    }

    /// Canonical serialization (fixed field order) used for hashing and
    /// echoing.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("scenario serialization cannot fail")
    }

    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_json().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// The scenario's V0 energy unit in internal units,
    /// `V0 = kappa/(4 a^2)` with `a` the radius scale; `None` for flat
    /// surfaces, which have no curvature scale.
    pub fn energy_unit(&self, scale: &PhysicalScale) -> Option<f64> {
        let a = match self.surface {
            SurfaceSpec::Torus { minor_radius, .. } => minor_radius,
            SurfaceSpec::Sphere { radius } => radius,
            SurfaceSpec::Cylinder { radius, .. } => radius,
            SurfaceSpec::Plane { .. } | SurfaceSpec::FlatBox { .. } => return None,
        };
        Some(scale.kinetic_coeff / (4.0 * a * a))
    }

    /// Validates every module precondition and builds the chart, field and
    /// grid. Rejects nonzero uniform fields on surfaces without a gauge
    /// choice, and thicknesses beyond the focal set.
    pub fn prepare(self) -> Result<Prepared, CliError> {
        let kind = match self.surface {
            SurfaceSpec::Torus { minor_radius, major_radius } => {
                BuiltinSurface::Torus { minor_radius, major_radius }
            }
            SurfaceSpec::Sphere { radius } => BuiltinSurface::Sphere { radius },
            SurfaceSpec::Cylinder { radius, length } => {
                BuiltinSurface::Cylinder { radius, length }
            }
            SurfaceSpec::Plane { l1, l2 } => BuiltinSurface::Plane { l1, l2 },
            SurfaceSpec::FlatBox { l1, l2 } => BuiltinSurface::FlatBox { l1, l2 },
        };
        let chart = builtin_chart(kind).map_err(validation)?;

        let field = match self.surface {
            SurfaceSpec::Torus { minor_radius, major_radius } => {
                torus_vector_potential(minor_radius, major_radius, self.field.b0, self.field.b1)
                    .map_err(validation)?
            }
            _ if self.field.b0 != 0.0 || self.field.b1 != 0.0 => {
                return Err(CliError::Validation(
                    "field.b0/field.b1: uniform fields are only defined for the torus gauge; set them to 0 for other surfaces"
                        .into(),
                ));
            }
            _ => FieldConfig::zero(),
        };

        if !self.thickness.is_finite() {
            return Err(CliError::Validation(format!(
                "thickness: must be finite, got {}",
                self.thickness
            )));
        }
        if self.thickness != 0.0 {
            check_thickness_admissible(&chart, self.thickness)?;
        }

        let grid = GridSpec::new(self.grid.n1, self.grid.n2).map_err(validation)?;

        Ok(Prepared {
            scenario: self,
            chart,
            field,
            scale: PhysicalScale::default(),
            grid,
        })
    }
}

fn validation(e: thinlayer::Error) -> CliError {
    CliError::Validation(e.to_string())
}

/// The layer factor f must stay positive over the whole chart at the
/// configured offset.
fn check_thickness_admissible(chart: &SurfaceChart, q3: f64) -> Result<(), CliError> {
    let d = chart.domain();
    let samples = 256;
    for i in 0..samples {
        for j in [0, samples / 3, 2 * samples / 3] {
            let p = ChartPoint::new(
                d[0].lo + (i as f64 + 0.5) / samples as f64 * d[0].span(),
                d[1].lo + (j as f64 + 0.5) / samples as f64 * d[1].span(),
            );
            let forms = fundamental_forms(chart, p).map_err(validation)?;
            let f = curvature(&forms).layer_factor(q3);
            if f <= 0.0 {
                return Err(CliError::Validation(format!(
                    "thickness: layer factor f = {f:.3e} <= 0 at ({:.4}, {:.4}); |q3| exceeds the focal distance",
                    p.q1, p.q2
                )));
            }
        }
    }
    Ok(())
}
