use num_complex::Complex64;
use serde::Deserialize;

use hilmod::{
    DiagonalKernelSpec, GeneratorInput, IdealSpec, MonomialIdeal, MultiIndex, Poly,
};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub kernel: KernelConfig,
    pub ideal: IdealConfig,
    pub truncation: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub tasks: Vec<TaskConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub family: String,
    #[serde(default)]
    pub lambda: Option<Vec<f64>>,
    #[serde(default)]
    pub variables: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdealConfig {
    #[serde(default)]
    pub monomials: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    pub vanish_at_origin: Option<bool>,
    #[serde(default)]
    pub full: Option<bool>,
    #[serde(default)]
    pub factored: Option<Vec<FactoredGenerator>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactoredGenerator {
    pub monomial: Vec<usize>,
    pub unit: Vec<PolyTerm>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyTerm {
    pub coeff: [f64; 2],
    pub exponents: Vec<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_rank_eps")]
    pub rank_eps: f64,
    #[serde(default = "default_jet_order")]
    pub jet_order: usize,
}

fn default_rank_eps() -> f64 {
    1e-9
}

fn default_jet_order() -> usize {
    2
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank_eps: default_rank_eps(),
            jet_order: default_jet_order(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum TaskConfig {
    JointKernelGrid {
        extent: f64,
        points_per_side: usize,
    },
    Curvature {
        base_point: Vec<[f64; 2]>,
        #[serde(default)]
        convention: Option<String>,
    },
    Gleason {
        points: Vec<Vec<[f64; 2]>>,
    },
    Privilege {
        matrix: Vec<Vec<Vec<PolyTerm>>>,
        domain: String,
        density: usize,
    },
    NkCurvature {
        n: usize,
        k: usize,
        theta_samples: Vec<[f64; 2]>,
        #[serde(default = "default_fd_step")]
        fd_step: f64,
    },
}

fn default_fd_step() -> f64 {
    1e-3
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    pub modules: Vec<ModuleBlock>,
    #[serde(default)]
    pub base_point: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

/// Either a kernel-space module (kernel + ideal + truncation) or a scalar
/// section family given by (n, k, theta).
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleBlock {
    #[serde(default)]
    pub kernel: Option<KernelConfig>,
    #[serde(default)]
    pub ideal: Option<IdealConfig>,
    #[serde(default)]
    pub truncation: Option<usize>,
    #[serde(default)]
    pub nk: Option<NkBlock>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NkBlock {
    pub n: usize,
    pub k: usize,
    pub theta: [f64; 2],
}

pub fn complex(pair: [f64; 2]) -> Complex64 {
    Complex64::new(pair[0], pair[1])
}

pub fn build_kernel(cfg: &KernelConfig) -> Result<DiagonalKernelSpec, String> {
    match cfg.family.as_str() {
        "power" => {
            let lambda = cfg
                .lambda
                .as_ref()
                .ok_or("power kernel requires a lambda array")?;
            DiagonalKernelSpec::power(lambda.clone()).map_err(|e| e.to_string())
        }
        "hardy" => {
            let m = cfg.variables.ok_or("hardy kernel requires variables")?;
            if m == 0 {
                return Err("variables must be positive".into());
            }
            Ok(DiagonalKernelSpec::hardy(m))
        }
        "bergman" => {
            let m = cfg.variables.ok_or("bergman kernel requires variables")?;
            if m == 0 {
                return Err("variables must be positive".into());
            }
            Ok(DiagonalKernelSpec::bergman(m))
        }
        other => Err(format!("unknown kernel family {other:?}")),
    }
}

pub fn build_poly(terms: &[PolyTerm], m: usize) -> Result<Poly, String> {
    let mapped: Result<Vec<_>, String> = terms
        .iter()
        .map(|t| {
            if t.exponents.len() != m {
                return Err(format!(
                    "term exponent arity {} does not match {} variables",
                    t.exponents.len(),
                    m
                ));
            }
            Ok((
                Complex64::new(t.coeff[0], t.coeff[1]),
                MultiIndex::new(t.exponents.clone()),
            ))
        })
        .collect();
    Poly::new(mapped?).map_err(|e| e.to_string())
}

pub fn build_ideal(cfg: &IdealConfig, m: usize) -> Result<IdealSpec, String> {
    let chosen = [
        cfg.monomials.is_some(),
        cfg.vanish_at_origin.is_some(),
        cfg.full.is_some(),
        cfg.factored.is_some(),
    ]
    .iter()
    .filter(|&&b| b)
    .count();
    if chosen != 1 {
        return Err("ideal must set exactly one of monomials / vanish_at_origin / full / factored".into());
    }
    if let Some(list) = &cfg.monomials {
        let gens: Result<Vec<_>, String> = list
            .iter()
            .map(|e| {
                if e.len() != m {
                    Err(format!("monomial arity {} does not match {m} variables", e.len()))
                } else {
                    Ok(MultiIndex::new(e.clone()))
                }
            })
            .collect();
        let ideal = MonomialIdeal::new(gens?).map_err(|e| e.to_string())?;
        return Ok(IdealSpec::Monomial(ideal));
    }
    if cfg.vanish_at_origin == Some(true) {
        return Ok(IdealSpec::VanishAtOrigin);
    }
    if cfg.full == Some(true) {
        return Ok(IdealSpec::Full);
    }
    if let Some(factored) = &cfg.factored {
        let gens: Result<Vec<_>, String> = factored
            .iter()
            .map(|f| {
                if f.monomial.len() != m {
                    Err(format!(
                        "monomial arity {} does not match {m} variables",
                        f.monomial.len()
                    ))
                } else {
                    Ok(MultiIndex::new(f.monomial.clone()))
                }
            })
            .collect();
        let ideal = MonomialIdeal::new(gens?).map_err(|e| e.to_string())?;
        return Ok(IdealSpec::Monomial(ideal));
    }
    Err("vanish_at_origin / full must be true when present".into())
}

/// Generator descriptors (with unit witnesses where given) for stalk tasks.
pub fn build_generators(cfg: &IdealConfig, m: usize) -> Result<Vec<GeneratorInput>, String> {
    if let Some(factored) = &cfg.factored {
        return factored
            .iter()
            .map(|f| {
                Ok(GeneratorInput::factored(
                    MultiIndex::new(f.monomial.clone()),
                    build_poly(&f.unit, m)?,
                ))
            })
            .collect();
    }
    let ideal = build_ideal(cfg, m)?;
    Ok(ideal
        .as_monomial(m)
        .generators()
        .iter()
        .map(|g| GeneratorInput::monomial(g.clone()))
        .collect())
}

pub fn validate(cfg: &Config) -> Result<(), String> {
    if cfg.truncation < 2 {
        return Err("truncation must be at least 2".into());
    }
    if !(cfg.tolerances.rank_eps > 0.0 && cfg.tolerances.rank_eps < 1.0) {
        return Err("rank_eps must lie in (0,1)".into());
    }
    if cfg.tolerances.jet_order < 2 {
        return Err("jet_order must be at least 2".into());
    }
    let kernel = build_kernel(&cfg.kernel)?;
    let m = kernel.variables();
    build_ideal(&cfg.ideal, m)?;
    for (i, task) in cfg.tasks.iter().enumerate() {
        let err = |msg: String| Err(format!("task {i}: {msg}"));
        match task {
            TaskConfig::JointKernelGrid {
                extent,
                points_per_side,
            } => {
                if !(extent.is_finite() && *extent > 0.0 && *extent < 1.0) {
                    return err("grid extent must lie in (0,1)".into());
                }
                if *points_per_side < 2 {
                    return err("need at least 2 points per side".into());
                }
            }
            TaskConfig::Curvature { base_point, .. } => {
                if base_point.len() != m {
                    return err(format!(
                        "base point arity {} does not match {m} variables",
                        base_point.len()
                    ));
                }
            }
            TaskConfig::Gleason { points } => {
                for p in points {
                    if p.len() != m {
                        return err(format!(
                            "point arity {} does not match {m} variables",
                            p.len()
                        ));
                    }
                }
            }
            TaskConfig::Privilege {
                matrix,
                domain,
                density,
            } => {
                if matrix.is_empty() || matrix[0].is_empty() {
                    return err("privilege matrix must be non-empty".into());
                }
                if domain != "polydisc" && domain != "ball" {
                    return err(format!("unknown domain {domain:?}"));
                }
                if *density < 8 {
                    return err("density must be at least 8".into());
                }
            }
            TaskConfig::NkCurvature { n, k, fd_step, .. } => {
                if *k == 0 || k >= n {
                    return err("need 0 < k < n".into());
                }
                if !(fd_step.is_finite() && *fd_step > 0.0 && *fd_step <= 0.1) {
                    return err("fd_step must lie in (0, 0.1]".into());
                }
            }
        }
    }
    Ok(())
}
