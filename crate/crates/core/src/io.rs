//! File formats: polytope and zonotope JSON, trace CSV.

use std::io::Write;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::descent::TraceRecord;
use crate::error::{Error, Result};
use crate::geom::{Polytope, Zonotope};

pub const TRACE_HEADER: &str = "iter,d_exact,d_coarse,step,rule,active_pairs,cone_status,ms";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolytopeFile {
    pub vertices: Vec<Vec<f64>>,
    /// Rows `[η..., c]` describing `⟨η, x⟩ ≤ c`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facets: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZonotopeFile {
    pub generators: Vec<Vec<f64>>,
    pub translation: Vec<f64>,
}

impl PolytopeFile {
    pub fn build(&self) -> Result<Polytope> {
        let vertices: Vec<DVector<f64>> = self.vertices.iter().map(|r| DVector::from_column_slice(r)).collect();
        match &self.facets {
            None => Polytope::new(vertices),
            Some(rows) => {
                let mut facets = Vec::with_capacity(rows.len());
                for row in rows {
                    let (c, eta) = row.split_last().ok_or_else(|| Error::Parse("empty facet row".into()))?;
                    facets.push((DVector::from_column_slice(eta), *c));
                }
                Polytope::with_facets(vertices, facets)
            }
        }
    }
}

impl From<&Polytope> for PolytopeFile {
    fn from(p: &Polytope) -> Self {
        PolytopeFile {
            vertices: p.vertices().iter().map(|v| v.iter().copied().collect()).collect(),
            facets: Some(
                p.facets()
                    .iter()
                    .map(|f| f.normal.iter().copied().chain(std::iter::once(f.offset)).collect())
                    .collect(),
            ),
        }
    }
}

impl ZonotopeFile {
    pub fn build(&self) -> Result<Zonotope> {
        Zonotope::from_rows(&self.generators, &self.translation)
    }
}

impl From<&Zonotope> for ZonotopeFile {
    fn from(z: &Zonotope) -> Self {
        ZonotopeFile { generators: z.generator_rows(), translation: z.translation().iter().copied().collect() }
    }
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn polytope_from_json(text: &str) -> Result<Polytope> {
    parse::<PolytopeFile>(text)?.build()
}

pub fn zonotope_from_json(text: &str) -> Result<Zonotope> {
    parse::<ZonotopeFile>(text)?.build()
}

pub fn polytope_to_json(p: &Polytope) -> String {
    serde_json::to_string_pretty(&PolytopeFile::from(p)).expect("plain data serializes")
}

pub fn zonotope_to_json(z: &Zonotope) -> String {
    serde_json::to_string_pretty(&ZonotopeFile::from(z)).expect("plain data serializes")
}

/// Write the trace as CSV. Floats use the shortest round-tripping form, so a
/// reparsed trace is bitwise equal to the original.
pub fn write_trace_csv(records: &[TraceRecord], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{TRACE_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{:?},{:?},{:?},{},{},{},{:?}",
            r.iter, r.d_exact, r.d_coarse, r.step, r.rule, r.active_pairs, r.cone_status, r.ms
        )?;
    }
    Ok(())
}

pub fn trace_csv(records: &[TraceRecord]) -> String {
    let mut buf = Vec::new();
    write_trace_csv(records, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("ascii output")
}
