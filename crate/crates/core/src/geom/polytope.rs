use nalgebra::{DMatrix, DVector};

use super::face::{AffineHull, FaceDescriptor, FaceKind};
use crate::error::{Error, Result};
use crate::linalg::{cofactor_normal, combinations, rank};

#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    /// Unit outward normal.
    pub normal: DVector<f64>,
    pub offset: f64,
    /// Indices of the vertices on this facet.
    pub vertices: Vec<usize>,
}

/// Full-dimensional convex polytope with both descriptions.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    vertices: Vec<DVector<f64>>,
    facets: Vec<Facet>,
    scale: f64,
}

fn check_points(points: &[DVector<f64>]) -> Result<usize> {
    let d = points.first().map(|p| p.len()).ok_or_else(|| Error::InvalidInput("no vertices".into()))?;
    if d == 0 {
        return Err(Error::InvalidInput("zero-dimensional points".into()));
    }
    for p in points {
        if p.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: p.len() });
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite vertex coordinate".into()));
        }
    }
    let diffs = DMatrix::from_fn(d, points.len() - 1, |r, c| points[c + 1][r] - points[0][r]);
    let rk = if points.len() > 1 { rank(&diffs, 1e-10) } else { 0 };
    if rk < d {
        return Err(Error::DegeneratePolytope { rank: rk, dim: d });
    }
    Ok(d)
}

fn scale_of(points: &[DVector<f64>]) -> f64 {
    1.0 + points.iter().map(|p| p.amax()).fold(0.0, f64::max)
}

impl Polytope {
    /// Convex hull of `points`. Points that are not extreme are discarded and
    /// facets are found by checking every `d`-subset for a supporting plane.
    pub fn new(points: Vec<DVector<f64>>) -> Result<Self> {
        let d = check_points(&points)?;
        let scale = scale_of(&points);
        let tol = 1e-9 * scale;
        let mut planes: Vec<(DVector<f64>, f64)> = Vec::new();
        for s in combinations(points.len(), d) {
            let diffs = DMatrix::from_fn(d - 1, d, |r, c| points[s[r + 1]][c] - points[s[0]][c]);
            let eta = cofactor_normal(&diffs);
            let nrm = eta.norm();
            if nrm <= 1e-12 * scale.powi(d as i32 - 1) {
                continue;
            }
            let mut eta = eta / nrm;
            let mut c = eta.dot(&points[s[0]]);
            let vals: Vec<f64> = points.iter().map(|p| eta.dot(p) - c).collect();
            let above = vals.iter().any(|&v| v > tol);
            let below = vals.iter().any(|&v| v < -tol);
            if above && below {
                continue;
            }
            if above {
                eta = -eta;
                c = -c;
            }
            if !planes.iter().any(|(n, o)| (n - &eta).norm() < 1e-9 && (o - c).abs() < tol) {
                planes.push((eta, c));
            }
        }
        // A point is a vertex iff the normals of the facets through it span R^d.
        let keep: Vec<usize> = (0..points.len())
            .filter(|&k| {
                let on: Vec<&DVector<f64>> =
                    planes.iter().filter(|(n, c)| (n.dot(&points[k]) - c).abs() <= tol).map(|(n, _)| n).collect();
                if on.len() < d {
                    return false;
                }
                let m = DMatrix::from_fn(on.len(), d, |r, c| on[r][c]);
                rank(&m, 1e-9) == d
            })
            .collect();
        // Drop duplicates of the same vertex.
        let mut vertices: Vec<DVector<f64>> = Vec::new();
        for k in keep {
            if !vertices.iter().any(|v| (v - &points[k]).norm() <= tol) {
                vertices.push(points[k].clone());
            }
        }
        let facets = planes
            .into_iter()
            .map(|(normal, offset)| {
                let vs = (0..vertices.len()).filter(|&k| (normal.dot(&vertices[k]) - offset).abs() <= tol).collect();
                Facet { normal, offset, vertices: vs }
            })
            .collect();
        Ok(Self { vertices, facets, scale })
    }

    /// Polytope with a caller-supplied H-description. Normals are rescaled to
    /// unit length; each vertex must satisfy every inequality.
    pub fn with_facets(vertices: Vec<DVector<f64>>, facets: Vec<(DVector<f64>, f64)>) -> Result<Self> {
        let d = check_points(&vertices)?;
        let scale = scale_of(&vertices);
        let tol = 1e-9 * scale;
        let mut out = Vec::with_capacity(facets.len());
        for (n, c) in facets {
            if n.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: n.len() });
            }
            let nrm = n.norm();
            if !(nrm > 0.0) || !c.is_finite() {
                return Err(Error::InvalidInput("degenerate facet normal".into()));
            }
            let (normal, offset) = (n / nrm, c / nrm);
            let mut on = Vec::new();
            for (k, v) in vertices.iter().enumerate() {
                let r = normal.dot(v) - offset;
                if r > tol {
                    return Err(Error::InvalidInput(format!("vertex {k} violates a supplied facet by {r:.3e}")));
                }
                if r.abs() <= tol {
                    on.push(k);
                }
            }
            out.push(Facet { normal, offset, vertices: on });
        }
        Ok(Self { vertices, facets: out, scale })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(rows.iter().map(|r| DVector::from_column_slice(r)).collect())
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn vertices(&self) -> &[DVector<f64>] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// `1 + max |coordinate|`; tolerances on this polytope are relative to it.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn barycenter(&self) -> DVector<f64> {
        let mut s = DVector::zeros(self.dim());
        for v in &self.vertices {
            s += v;
        }
        s / self.vertices.len() as f64
    }

    pub fn diameter(&self) -> f64 {
        let mut m = 0.0f64;
        for a in &self.vertices {
            for b in &self.vertices {
                m = m.max((a - b).norm());
            }
        }
        m
    }

    /// `max_k (⟨η_k, x⟩ − c_k)`
    pub fn facet_residual(&self, x: &DVector<f64>) -> f64 {
        self.facets.iter().map(|f| f.normal.dot(x) - f.offset).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        self.facet_residual(x) <= tol * self.scale
    }

    /// Indices of facets with `|⟨η, x⟩ − c| ≤ tol·scale`.
    pub fn active_facets(&self, x: &DVector<f64>, tol: f64) -> Vec<usize> {
        let band = tol * self.scale;
        (0..self.facets.len())
            .filter(|&k| (self.facets[k].normal.dot(x) - self.facets[k].offset).abs() <= band)
            .collect()
    }

    /// Smallest face containing `x`.
    pub fn minimal_face(&self, x: &DVector<f64>, tol: f64) -> Result<FaceDescriptor> {
        let excess = self.facet_residual(x);
        if excess > tol * self.scale {
            return Err(Error::PointOutsidePolytope { excess });
        }
        let active = self.active_facets(x, tol);
        let mut verts: Vec<usize> = (0..self.vertices.len()).collect();
        for &k in &active {
            verts.retain(|v| self.facets[k].vertices.contains(v));
        }
        let hull = if active.is_empty() {
            AffineHull { base: x.clone(), normals: Vec::new(), offsets: Vec::new() }
        } else {
            let pts: Vec<DVector<f64>> = verts.iter().map(|&k| self.vertices[k].clone()).collect();
            if pts.is_empty() {
                return Err(Error::PointOutsidePolytope { excess });
            }
            AffineHull::from_points(&pts)
        };
        Ok(FaceDescriptor { kind: FaceKind::Polytope { vertices: verts }, hull })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> Polytope {
        Polytope::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap()
    }

    fn v(a: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(a)
    }

    #[test]
    fn square_facets() {
        let p = unit_square();
        assert_eq!(p.facets().len(), 4);
        for f in p.facets() {
            assert!((f.normal.norm() - 1.0).abs() < 1e-12);
            assert_eq!(f.vertices.len(), 2);
        }
    }

    #[test]
    fn interior_points_are_dropped() {
        let p = Polytope::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, 0.0], vec![0.3, 0.3], vec![0.0, 1.0]])
            .unwrap();
        assert_eq!(p.vertices().len(), 3);
    }

    #[test]
    fn degenerate_rejected() {
        assert!(matches!(
            Polytope::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]]),
            Err(Error::DegeneratePolytope { rank: 1, dim: 2 })
        ));
    }

    #[test]
    fn minimal_faces_of_square() {
        let p = unit_square();
        let edge = p.minimal_face(&v(&[0.5, 0.0]), 1e-9).unwrap();
        assert_eq!(edge.codim(), 1);
        let h = edge.affine_hull().unwrap();
        assert!((h.normals[0][1].abs() - 1.0).abs() < 1e-12);
        assert!((h.normals[0].dot(&v(&[0.2, 0.0])) - h.offsets[0]).abs() < 1e-12);
        let corner = p.minimal_face(&v(&[0.0, 0.0]), 1e-9).unwrap();
        assert_eq!(corner.codim(), 2);
        let whole = p.minimal_face(&v(&[0.5, 0.5]), 1e-9).unwrap();
        assert_eq!(whole.codim(), 0);
        assert_eq!(whole.affine_hull(), Err(Error::CodimZeroFace));
        assert!(matches!(p.minimal_face(&v(&[2.0, 0.5]), 1e-9), Err(Error::PointOutsidePolytope { .. })));
    }

    #[test]
    fn cube_in_3d() {
        let mut pts = Vec::new();
        for m in 0..8 {
            pts.push(v(&[(m & 1) as f64, (m >> 1 & 1) as f64, (m >> 2 & 1) as f64]));
        }
        pts.push(v(&[0.5, 0.5, 0.5]));
        let p = Polytope::new(pts).unwrap();
        assert_eq!(p.vertices().len(), 8);
        assert_eq!(p.facets().len(), 6);
    }
}
