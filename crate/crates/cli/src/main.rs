mod config;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;

use hilmod::{
    build_truncated_module, compare_curvature, curvature_at, gleason_report, joint_kernel,
    nk_curvature_closed, nk_curvature_numeric, privilege_verdict, ComparisonVerdict,
    CurvatureConvention, CurvatureTensor, Domain, Error as CoreError, PolyMatrix,
    PrivilegeVerdict,
};

use config::{
    build_generators, build_ideal, build_kernel, build_poly, complex, validate, CompareConfig,
    Config, TaskConfig,
};
use report::{
    complex_pair, matrix_rows, render, GleasonEntry, NkRow, Provenance, Report, TaskReport,
    TaskResult, Witness, SCHEMA_VERSION,
};

#[derive(Parser)]
#[command(name = "hilmod", version, about = "Invariants of Hilbert modules on the polydisc")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the tasks in a config file and write a report.
    Run {
        config: PathBuf,
        /// Report path (defaults to the config path with a .report.json extension)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the curvature of two module blocks.
    Compare {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a config file without running anything.
    Validate { config: PathBuf },
}

enum CliError {
    Config(String),
    Task { id: usize, source: CoreError },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Task { source, .. } => match source {
                CoreError::TruncationStarvation { .. } | CoreError::TruncationTooSmall { .. } => 4,
                CoreError::InvalidArgument(_)
                | CoreError::DimensionMismatch { .. }
                | CoreError::InvalidWitness { .. } => 2,
                _ => 3,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Config(msg) => format!("config error: {msg}"),
            CliError::Task { id, source } => format!("task {id}: {source}"),
        }
    }
}

fn read_config(path: &Path) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let cfg: Config =
        serde_json::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?;
    validate(&cfg).map_err(CliError::Config)?;
    Ok(cfg)
}

fn default_out(config: &Path) -> PathBuf {
    config.with_extension("report.json")
}

fn parse_convention(name: Option<&str>) -> Result<CurvatureConvention, String> {
    match name.unwrap_or("jet") {
        "jet" => Ok(CurvatureConvention::Jet),
        "line_bundle_sign" => Ok(CurvatureConvention::LineBundleSign),
        other => Err(format!("unknown convention {other:?}")),
    }
}

fn convention_name(c: CurvatureConvention) -> &'static str {
    match c {
        CurvatureConvention::Jet => "jet",
        CurvatureConvention::LineBundleSign => "line_bundle_sign",
    }
}

fn verdict_name(v: &PrivilegeVerdict) -> &'static str {
    match v {
        PrivilegeVerdict::Privileged => "privileged",
        PrivilegeVerdict::NotPrivileged => "not-privileged",
        PrivilegeVerdict::Inconclusive => "inconclusive",
    }
}

fn run_tasks(cfg: &Config) -> Result<Report, CliError> {
    let kernel = build_kernel(&cfg.kernel).map_err(CliError::Config)?;
    let m = kernel.variables();
    let ideal = build_ideal(&cfg.ideal, m).map_err(CliError::Config)?;
    let eps = cfg.tolerances.rank_eps;
    let mut tasks = Vec::new();
    for (id, task) in cfg.tasks.iter().enumerate() {
        let wrap = |source: CoreError| CliError::Task { id, source };
        let result = match task {
            TaskConfig::JointKernelGrid {
                extent,
                points_per_side,
            } => {
                let module =
                    build_truncated_module(kernel.clone(), ideal.clone(), cfg.truncation)
                        .map_err(wrap)?;
                let n = *points_per_side;
                let step = 2.0 * extent / (n - 1) as f64;
                let mut dimensions = Vec::with_capacity(n);
                for i in 0..n {
                    let mut row = Vec::with_capacity(n);
                    for j in 0..n {
                        let w = vec![
                            Complex64::new(-extent + step * i as f64, 0.0),
                            Complex64::new(-extent + step * j as f64, 0.0),
                        ];
                        row.push(joint_kernel(&module, &w, eps).map_err(wrap)?.dim);
                    }
                    dimensions.push(row);
                }
                TaskResult::JointKernelGrid {
                    extent: *extent,
                    points_per_side: n,
                    dimensions,
                }
            }
            TaskConfig::Curvature {
                base_point,
                convention,
            } => {
                let conv = parse_convention(convention.as_deref()).map_err(CliError::Config)?;
                let module =
                    build_truncated_module(kernel.clone(), ideal.clone(), cfg.truncation)
                        .map_err(wrap)?;
                let w0: Vec<Complex64> = base_point.iter().map(|&p| complex(p)).collect();
                let tensor = curvature_at(&module, &w0, eps, conv).map_err(wrap)?;
                TaskResult::Curvature {
                    convention: convention_name(conv).into(),
                    base_point: base_point.clone(),
                    blocks: tensor
                        .blocks
                        .iter()
                        .map(|row| row.iter().map(matrix_rows).collect())
                        .collect(),
                    warning: tensor.warning,
                }
            }
            TaskConfig::Gleason { points } => {
                let generators = build_generators(&cfg.ideal, m).map_err(CliError::Config)?;
                let mut entries = Vec::new();
                for p in points {
                    let w: Vec<Complex64> = p.iter().map(|&x| complex(x)).collect();
                    let r = gleason_report(&kernel, &generators, &w, cfg.truncation, eps)
                        .map_err(wrap)?;
                    entries.push(GleasonEntry {
                        point: p.clone(),
                        d_stalk: r.d_stalk,
                        d_kernel: r.d_kernel,
                        equal: r.equal,
                        sigma_gap: r.sigma_gap,
                    });
                }
                TaskResult::Gleason { entries }
            }
            TaskConfig::Privilege {
                matrix,
                domain,
                density,
            } => {
                let rows: Result<Vec<Vec<_>>, String> = matrix
                    .iter()
                    .map(|row| row.iter().map(|terms| build_poly(terms, m)).collect())
                    .collect();
                let a = PolyMatrix::new(rows.map_err(CliError::Config)?)
                    .map_err(wrap)?;
                let dom = match domain.as_str() {
                    "polydisc" => Domain::Polydisc(m),
                    "ball" => Domain::Ball(m),
                    other => return Err(CliError::Config(format!("unknown domain {other:?}"))),
                };
                let r = privilege_verdict(&a, dom, *density, eps).map_err(wrap)?;
                TaskResult::Privilege {
                    verdict: verdict_name(&r.verdict).into(),
                    sample_count: r.sample_count,
                    rank_counts: r.rank_counts.iter().map(|&(a, b)| [a, b]).collect(),
                    witnesses: r
                        .witnesses
                        .iter()
                        .map(|(rank, point)| Witness {
                            rank: *rank,
                            point: point.iter().map(|&z| complex_pair(z)).collect(),
                        })
                        .collect(),
                    min_nonzero_sigma: r.min_nonzero_sigma,
                }
            }
            TaskConfig::NkCurvature {
                n,
                k,
                theta_samples,
                fd_step,
            } => {
                let mut rows = Vec::new();
                let mut csv = String::from("theta_re,theta_im,closed,numeric\n");
                for &pair in theta_samples {
                    let theta = complex(pair);
                    let closed = nk_curvature_closed(*n, *k, theta).map_err(wrap)?;
                    let numeric =
                        nk_curvature_numeric(*n, *k, theta, *fd_step).map_err(wrap)?;
                    csv.push_str(&format!(
                        "{},{},{},{}\n",
                        pair[0], pair[1], closed, numeric
                    ));
                    rows.push(NkRow {
                        theta: pair,
                        closed,
                        numeric,
                    });
                }
                TaskResult::NkCurvature {
                    n: *n,
                    k: *k,
                    fd_step: *fd_step,
                    rows,
                    csv,
                }
            }
        };
        tasks.push(TaskReport { id, result });
    }
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        provenance: Provenance::new(eps, cfg.truncation),
        tasks,
    })
}

fn block_tensor(
    block: &config::ModuleBlock,
    base_point: Option<&Vec<[f64; 2]>>,
    eps: f64,
    id: usize,
) -> Result<CurvatureTensor, CliError> {
    if let Some(nk) = &block.nk {
        let value = nk_curvature_closed(nk.n, nk.k, complex(nk.theta))
            .map_err(|source| CliError::Task { id, source })?;
        return Ok(CurvatureTensor::scalar(
            value,
            CurvatureConvention::LineBundleSign,
        ));
    }
    let (kernel_cfg, ideal_cfg, trunc) = match (&block.kernel, &block.ideal, block.truncation) {
        (Some(k), Some(i), Some(t)) => (k, i, t),
        _ => {
            return Err(CliError::Config(
                "module block needs kernel + ideal + truncation, or nk".into(),
            ))
        }
    };
    let kernel = build_kernel(kernel_cfg).map_err(CliError::Config)?;
    let m = kernel.variables();
    let ideal = build_ideal(ideal_cfg, m).map_err(CliError::Config)?;
    let module = build_truncated_module(kernel, ideal, trunc)
        .map_err(|source| CliError::Task { id, source })?;
    let w0: Vec<Complex64> = match base_point {
        Some(p) => p.iter().map(|&x| complex(x)).collect(),
        None => vec![Complex64::new(0.0, 0.0); m],
    };
    curvature_at(&module, &w0, eps, CurvatureConvention::Jet)
        .map_err(|source| CliError::Task { id, source })
}

fn run_compare(path: &Path) -> Result<Report, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let cfg: CompareConfig =
        serde_json::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?;
    if cfg.modules.len() != 2 {
        return Err(CliError::Config("compare needs exactly two module blocks".into()));
    }
    let eps = cfg.tolerances.rank_eps;
    let a = block_tensor(&cfg.modules[0], cfg.base_point.as_ref(), eps, 0)?;
    let b = block_tensor(&cfg.modules[1], cfg.base_point.as_ref(), eps, 1)?;
    let verdict = compare_curvature(&a, &b).map_err(|source| CliError::Task { id: 0, source })?;
    let result = match verdict {
        ComparisonVerdict::Distinguished {
            invariant,
            deviation,
        } => TaskResult::Comparison {
            verdict: "distinguished".into(),
            invariant: Some(invariant),
            deviation: Some(deviation),
        },
        ComparisonVerdict::NotDistinguished => TaskResult::Comparison {
            verdict: "not-distinguished".into(),
            invariant: None,
            deviation: None,
        },
    };
    let truncation = cfg
        .modules
        .iter()
        .filter_map(|b| b.truncation)
        .max()
        .unwrap_or(0);
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        provenance: Provenance::new(eps, truncation),
        tasks: vec![TaskReport { id: 0, result }],
    })
}

fn write_report(report: &Report, out: &Path) -> Result<(), CliError> {
    std::fs::write(out, render(report))
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", out.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run { config, out } => read_config(config).and_then(|cfg| {
            let report = run_tasks(&cfg)?;
            let path = out.clone().unwrap_or_else(|| default_out(config));
            write_report(&report, &path)?;
            println!("{}", path.display());
            Ok(())
        }),
        Command::Compare { config, out } => run_compare(config).and_then(|report| {
            let path = out.clone().unwrap_or_else(|| default_out(config));
            write_report(&report, &path)?;
            println!("{}", path.display());
            Ok(())
        }),
        Command::Validate { config } => read_config(config).map(|_| println!("ok")),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
