//! JSON config schemas. Unknown fields are rejected; matrices travel as flat
//! row-major arrays of length n^2.

use super::CliError;
use crate::energy::{EnergyModel, LogStrainEnergy, LogStrainKind, Moduli};
use crate::plasticity::{
    Formulation, PathSpec, YieldSurface, DOMAIN_FACTOR_DEFAULT, DOMAIN_FACTOR_MULTIPLICATIVE,
};
use crate::tensor::{SquareMatrix, SymmetricMatrix};
use serde::{Deserialize, Serialize};

fn default_k() -> f64 {
    1.0
}

fn default_khat() -> f64 {
    1.0
}

fn default_resolution() -> usize {
    128
}

fn default_probe_resolution() -> usize {
    64
}

/// Frozen plastic state attached to a model.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlasticConfig {
    /// `additive_log` | `multiplicative` | `small_strain` | `green_lagrange`
    pub variant: String,
    /// row-major n x n entries
    pub entries: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    /// `quadratic_hencky` | `exponentiated_hencky` | `saint_venant_kirchhoff`
    /// | `small_strain`
    pub family: String,
    pub n: usize,
    pub mu: f64,
    #[serde(default)]
    pub kappa: f64,
    #[serde(default)]
    pub lambda: f64,
    #[serde(default = "default_k")]
    pub k: f64,
    #[serde(default = "default_khat")]
    pub khat: f64,
    #[serde(default)]
    pub plastic: Option<PlasticConfig>,
}

pub fn square_from_flat<const N: usize>(entries: &[f64]) -> Result<SquareMatrix<N>, CliError> {
    if entries.len() != N * N {
        return Err(CliError::Config(format!(
            "expected {} row-major entries for an {N}x{N} matrix, got {}",
            N * N,
            entries.len()
        )));
    }
    let mut m = SquareMatrix::zero();
    for i in 0..N {
        for j in 0..N {
            m.entries[i][j] = entries[i * N + j];
        }
    }
    if !m.is_finite() {
        return Err(CliError::Config("matrix entries must be finite".into()));
    }
    Ok(m)
}

pub fn sym_from_flat<const N: usize>(entries: &[f64]) -> Result<SymmetricMatrix<N>, CliError> {
    let m = square_from_flat::<N>(entries)?;
    let scale = m.frobenius_norm().max(1.0);
    for i in 0..N {
        for j in (i + 1)..N {
            if (m.entries[i][j] - m.entries[j][i]).abs() > 1e-12 * scale {
                return Err(CliError::Config(format!(
                    "entries ({i},{j}) and ({j},{i}) differ; a symmetric matrix is required"
                )));
            }
        }
    }
    Ok(m.symmetric_part())
}

impl ModelConfig {
    fn core(&self) -> Result<LogStrainEnergy, CliError> {
        let kind = match self.family.as_str() {
            "quadratic_hencky" => LogStrainKind::QuadraticHencky,
            "exponentiated_hencky" => LogStrainKind::ExponentiatedHencky,
            other => {
                return Err(CliError::Config(format!(
                    "family `{other}` has no log-strain core"
                )))
            }
        };
        let moduli = Moduli {
            mu: self.mu,
            kappa: self.kappa,
            lambda: self.lambda,
            k: self.k,
            khat: self.khat,
        };
        moduli.validate(kind).map_err(|e| CliError::Config(e.to_string()))?;
        Ok(LogStrainEnergy { kind, moduli })
    }

    /// Builds the energy model plus advisory warnings.
    pub fn build<const N: usize>(&self) -> Result<(EnergyModel<N>, Vec<String>), CliError> {
        if self.n != N {
            return Err(CliError::Config(format!(
                "dimension mismatch: config says n = {}, dispatch requested {N}",
                self.n
            )));
        }
        let mut warnings = Vec::new();
        let model = match self.family.as_str() {
            "quadratic_hencky" | "exponentiated_hencky" => {
                let core = self.core()?;
                if core.kind == LogStrainKind::ExponentiatedHencky && N == 2 {
                    warnings.extend(core.moduli.rank_one_warnings_2d());
                }
                match &self.plastic {
                    None => EnergyModel::Hyperelastic { core },
                    Some(p) => match p.variant.as_str() {
                        "additive_log" => {
                            let ep = sym_from_flat::<N>(&p.entries)?;
                            if ep.trace().abs() > 1e-10 * ep.frobenius_norm().max(1.0) {
                                warnings.push(format!(
                                    "plastic log-stretch has trace {:e}; the formulation assumes it is traceless",
                                    ep.trace()
                                ));
                            }
                            EnergyModel::AdditiveLog { core, plastic_log_strain: ep }
                        }
                        "multiplicative" => {
                            let fp = square_from_flat::<N>(&p.entries)?;
                            if fp.det() <= 0.0 {
                                return Err(CliError::Config(format!(
                                    "plastic distortion must have positive determinant, got {:e}",
                                    fp.det()
                                )));
                            }
                            if (fp.det() - 1.0).abs() > 1e-8 {
                                warnings.push(format!(
                                    "plastic distortion determinant {:e} deviates from 1",
                                    fp.det()
                                ));
                            }
                            EnergyModel::Multiplicative { core, plastic_distortion: fp }
                        }
                        other => {
                            return Err(CliError::Config(format!(
                                "plastic variant `{other}` does not apply to family `{}`",
                                self.family
                            )))
                        }
                    },
                }
            }
            "saint_venant_kirchhoff" | "small_strain" => {
                let plastic_strain = match &self.plastic {
                    None => SymmetricMatrix::zero(),
                    Some(p) => {
                        let expected =
                            if self.family == "small_strain" { "small_strain" } else { "green_lagrange" };
                        if p.variant != expected {
                            return Err(CliError::Config(format!(
                                "plastic variant `{}` does not apply to family `{}` (expected `{expected}`)",
                                p.variant, self.family
                            )));
                        }
                        sym_from_flat::<N>(&p.entries)?
                    }
                };
                if !(self.mu > 0.0) {
                    return Err(CliError::Config(format!("mu must be > 0, got {}", self.mu)));
                }
                if self.family == "small_strain" {
                    EnergyModel::SmallStrainQuadratic { mu: self.mu, lambda: self.lambda, plastic_strain }
                } else {
                    EnergyModel::SaintVenantKirchhoff { mu: self.mu, lambda: self.lambda, plastic_strain }
                }
            }
            other => return Err(CliError::Config(format!("unknown model family `{other}`"))),
        };
        Ok((model, warnings))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalConfig {
    pub model: ModelConfig,
    /// row-major deformation gradient
    pub f: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CounterexampleConfig {
    pub a: f64,
    pub b: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub samples: usize,
}

impl Default for CounterexampleConfig {
    fn default() -> Self {
        Self { a: -2.0, b: 0.0, t_min: -2.0, t_max: 2.0, samples: 401 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShearPathConfig {
    pub t_min: f64,
    pub t_max: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomScanConfig {
    pub count: usize,
    /// singular value range of the sampled deformation gradients
    pub sv_min: f64,
    pub sv_max: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub model: ModelConfig,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    /// explicit base points, row-major
    #[serde(default)]
    pub points: Vec<Vec<f64>>,
    /// base points F(t) = 1 + t e1 (x) e2 on a uniform t grid
    #[serde(default)]
    pub shear_path: Option<ShearPathConfig>,
    /// random base points, seeded by --seed
    #[serde(default)]
    pub random: Option<RandomScanConfig>,
    /// write per-direction-cell CSVs (2D only)
    #[serde(default)]
    pub write_cells: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepConfig {
    pub t: f64,
    /// row-major deformation gradient
    pub f: Vec<f64>,
}

/// Shared schema of `path` (set `formulation`) and `compare`
/// (set `formulations`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathConfig {
    #[serde(default)]
    pub formulation: Option<String>,
    #[serde(default)]
    pub formulations: Option<Vec<String>>,
    /// `quadratic_hencky` | `exponentiated_hencky`
    pub family: String,
    pub n: usize,
    pub mu: f64,
    #[serde(default)]
    pub kappa: f64,
    /// volumetric coefficient of the small-strain formulation
    #[serde(default)]
    pub lambda: f64,
    #[serde(default = "default_k")]
    pub k: f64,
    #[serde(default = "default_khat")]
    pub khat: f64,
    pub sigma_y: f64,
    /// elastic-domain factor; defaults to 2/3, or 1/3 for the multiplicative
    /// formulation
    #[serde(default)]
    pub domain_radius_factor: Option<f64>,
    #[serde(default)]
    pub probe_ellipticity: bool,
    #[serde(default = "default_probe_resolution")]
    pub probe_resolution: usize,
    pub steps: Vec<StepConfig>,
}

pub fn parse_formulation(name: &str) -> Result<Formulation, CliError> {
    match name {
        "small_strain" => Ok(Formulation::SmallStrain),
        "additive_log" => Ok(Formulation::AdditiveLog),
        "multiplicative" => Ok(Formulation::Multiplicative),
        other => Err(CliError::Config(format!("unknown formulation `{other}`"))),
    }
}

impl PathConfig {
    fn core(&self) -> Result<LogStrainEnergy, CliError> {
        let kind = match self.family.as_str() {
            "quadratic_hencky" => LogStrainKind::QuadraticHencky,
            "exponentiated_hencky" => LogStrainKind::ExponentiatedHencky,
            other => {
                return Err(CliError::Config(format!(
                    "path family must be a log-strain core, got `{other}`"
                )))
            }
        };
        let moduli = Moduli {
            mu: self.mu,
            kappa: self.kappa,
            lambda: self.lambda,
            k: self.k,
            khat: self.khat,
        };
        moduli.validate(kind).map_err(|e| CliError::Config(e.to_string()))?;
        Ok(LogStrainEnergy { kind, moduli })
    }

    pub fn domain_factor(&self, formulation: Formulation) -> f64 {
        self.domain_radius_factor.unwrap_or(match formulation {
            Formulation::Multiplicative => DOMAIN_FACTOR_MULTIPLICATIVE,
            _ => DOMAIN_FACTOR_DEFAULT,
        })
    }

    pub fn to_spec<const N: usize>(&self, formulation: Formulation) -> Result<PathSpec<N>, CliError> {
        if self.n != N {
            return Err(CliError::Config(format!(
                "dimension mismatch: config says n = {}, dispatch requested {N}",
                self.n
            )));
        }
        if !(self.sigma_y > 0.0) {
            return Err(CliError::Config(format!("sigma_y must be > 0, got {}", self.sigma_y)));
        }
        if self.steps.is_empty() {
            return Err(CliError::Config("path needs at least one step".into()));
        }
        let mut steps = Vec::with_capacity(self.steps.len());
        for s in &self.steps {
            steps.push((s.t, square_from_flat::<N>(&s.f)?));
        }
        let spec = PathSpec {
            formulation,
            core: self.core()?,
            yield_surface: YieldSurface::with_factor(self.sigma_y, self.domain_factor(formulation)),
            steps,
        };
        spec.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_config_round_trip() {
        let raw = r#"{
            "family": "exponentiated_hencky",
            "n": 2, "mu": 1.0, "kappa": 0.0,
            "plastic": {"variant": "additive_log", "entries": [-2.0, 0.0, 0.0, 2.0]}
        }"#;
        let cfg: ModelConfig = serde_json::from_str(raw).unwrap();
        assert_eq!(cfg.k, 1.0);
        let (model, warnings) = cfg.build::<2>().unwrap();
        assert!(warnings.is_empty());
        assert!(matches!(model, EnergyModel::AdditiveLog { .. }));
    }

    #[test]
    fn unknown_fields_rejected() {
        let raw = r#"{"family": "quadratic_hencky", "n": 2, "mu": 1.0, "bogus": 3}"#;
        assert!(serde_json::from_str::<ModelConfig>(raw).is_err());
    }

    #[test]
    fn asymmetric_plastic_entries_rejected() {
        let cfg = ModelConfig {
            family: "quadratic_hencky".into(),
            n: 2,
            mu: 1.0,
            kappa: 1.0,
            lambda: 0.0,
            k: 1.0,
            khat: 1.0,
            plastic: Some(PlasticConfig {
                variant: "additive_log".into(),
                entries: vec![0.0, 1.0, -1.0, 0.0],
            }),
        };
        assert!(matches!(cfg.build::<2>(), Err(CliError::Config(_))));
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let cfg = ModelConfig {
            family: "quadratic_hencky".into(),
            n: 3,
            mu: 1.0,
            kappa: 1.0,
            lambda: 0.0,
            k: 1.0,
            khat: 1.0,
            plastic: None,
        };
        assert!(cfg.build::<2>().is_err());
        assert!(cfg.build::<3>().is_ok());
    }

    #[test]
    fn path_config_defaults() {
        let raw = r#"{
            "formulation": "multiplicative",
            "family": "quadratic_hencky",
            "n": 2, "mu": 1.0, "kappa": 1.0, "sigma_y": 0.5,
            "steps": [{"t": 0.0, "f": [1.0, 0.0, 0.0, 1.0]}]
        }"#;
        let cfg: PathConfig = serde_json::from_str(raw).unwrap();
        let spec = cfg.to_spec::<2>(Formulation::Multiplicative).unwrap();
        assert_eq!(spec.yield_surface.domain_factor, DOMAIN_FACTOR_MULTIPLICATIVE);
        let spec = cfg.to_spec::<2>(Formulation::AdditiveLog).unwrap();
        assert_eq!(spec.yield_surface.domain_factor, DOMAIN_FACTOR_DEFAULT);
    }
}
