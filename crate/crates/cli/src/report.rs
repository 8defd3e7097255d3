use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub rank_eps: f64,
    pub truncation: usize,
    pub basis_order: String,
}

impl Provenance {
    pub fn new(rank_eps: f64, truncation: usize) -> Self {
        Provenance {
            tool: "hilmod".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            rank_eps,
            truncation,
            basis_order: "graded lexicographic, z1 heaviest".into(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub provenance: Provenance,
    pub tasks: Vec<TaskReport>,
}

#[derive(Debug, Serialize)]
pub struct TaskReport {
    pub id: usize,
    #[serde(flatten)]
    pub result: TaskResult,
}

#[derive(Debug, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TaskResult {
    JointKernelGrid {
        extent: f64,
        points_per_side: usize,
        /// dimensions[i][j] at w = (-extent + i*step, -extent + j*step)
        dimensions: Vec<Vec<usize>>,
    },
    Curvature {
        convention: String,
        base_point: Vec<[f64; 2]>,
        /// blocks[p][q] is a rank x rank matrix, entries as [re, im]
        blocks: Vec<Vec<Vec<Vec<[f64; 2]>>>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        warning: Option<String>,
    },
    Gleason {
        entries: Vec<GleasonEntry>,
    },
    Privilege {
        verdict: String,
        sample_count: usize,
        rank_counts: Vec<[usize; 2]>,
        witnesses: Vec<Witness>,
        min_nonzero_sigma: f64,
    },
    NkCurvature {
        n: usize,
        k: usize,
        fd_step: f64,
        rows: Vec<NkRow>,
        /// plot-ready sweep: theta_re,theta_im,closed,numeric
        csv: String,
    },
    Comparison {
        verdict: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        invariant: Option<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        deviation: Option<f64>,
    },
}

#[derive(Debug, Serialize)]
pub struct GleasonEntry {
    pub point: Vec<[f64; 2]>,
    pub d_stalk: usize,
    pub d_kernel: usize,
    pub equal: bool,
    pub sigma_gap: f64,
}

#[derive(Debug, Serialize)]
pub struct Witness {
    pub rank: usize,
    pub point: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize)]
pub struct NkRow {
    pub theta: [f64; 2],
    pub closed: f64,
    pub numeric: f64,
}

pub fn complex_pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn matrix_rows(mat: &DMatrix<Complex64>) -> Vec<Vec<[f64; 2]>> {
    (0..mat.nrows())
        .map(|i| (0..mat.ncols()).map(|j| complex_pair(mat[(i, j)])).collect())
        .collect()
}

pub fn render(report: &Report) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    text
}
