use serde::{Deserialize, Serialize};
use zonofit::cone::Certificate;
use zonofit::descent::{DescentConfig, DescentTrace, Termination};
use zonofit::io::{PolytopeFile, ZonotopeFile};

/// Everything needed to repeat an optimize run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub polytope_path: String,
    pub polytope: PolytopeFile,
    /// `auto`, `random` or the path of the starting zonotope.
    pub init: String,
    pub initial: ZonotopeFile,
    pub config: DescentConfig,
    pub seed: u64,
    pub termination: Termination,
    pub certificate: Option<Certificate>,
    pub iterations: usize,
    pub d_exact: f64,
    pub d_coarse: f64,
    pub wall_ms: f64,
    pub final_zonotope: ZonotopeFile,
    /// Trace rows without the timing column.
    pub trace: Vec<String>,
}

pub fn timeless_rows(trace: &DescentTrace) -> Vec<String> {
    zonofit::io::trace_csv(&trace.records)
        .lines()
        .skip(1)
        .map(|line| line.rsplit_once(',').map_or(line, |(head, _)| head).to_string())
        .collect()
}
