//! Mesh file format: a JSON object with the fields `dimension`,
//! `vertices` (coordinate arrays) and `simplices` ((n+1)-tuples of 0-based
//! vertex indices whose order defines the orientation). The parser rejects
//! trailing garbage and non-finite numbers.

use super::{build_complex, Point, SimplicialComplex};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeshFile {
    dimension: usize,
    vertices: Vec<Vec<f64>>,
    simplices: Vec<Vec<usize>>,
}

/// Parse a mesh from JSON text.
pub fn mesh_from_json(text: &str) -> Result<SimplicialComplex> {
    let file: MeshFile =
        serde_json::from_str(text).map_err(|e| Error::MeshFormat(e.to_string()))?;
    for v in &file.vertices {
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::MeshFormat("non-finite vertex coordinate".into()));
        }
        if v.len() != file.dimension {
            return Err(Error::MeshFormat(format!(
                "vertex arity {} does not match dimension {}",
                v.len(),
                file.dimension
            )));
        }
    }
    for s in &file.simplices {
        if s.len() != file.dimension + 1 {
            return Err(Error::MeshFormat(format!(
                "simplex arity {} does not match dimension {}",
                s.len(),
                file.dimension
            )));
        }
    }
    let vertices: Vec<Point> = file.vertices.into_iter().map(Point::new).collect();
    build_complex(vertices, &file.simplices)
}

/// Serialize a complex back to the mesh JSON format. Top simplices are
/// written in their oriented vertex order.
pub fn mesh_to_json(complex: &SimplicialComplex) -> String {
    let n = complex.dim();
    let simplices: Vec<Vec<usize>> = complex
        .simplices(n)
        .iter()
        .map(|s| {
            let mut t = s.vertices.clone();
            if s.orientation < 0 && t.len() >= 2 {
                t.swap(0, 1);
            }
            t
        })
        .collect();
    let file = MeshFile {
        dimension: n,
        vertices: complex
            .vertices()
            .iter()
            .map(|p| p.coords.clone())
            .collect(),
        simplices,
    };
    serde_json::to_string_pretty(&file).expect("mesh serialization cannot fail")
}
